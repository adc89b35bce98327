//! Compactly supported test functions on interior balls.
//!
//! Two profiles are used throughout: piecewise-linear tents
//! `(1 - |x - c|/r)_+` and smooth bumps `(1 - (|x - c|/r)^2)_+^2`. Both
//! vanish identically outside their ball, so sampled fields are compactly
//! supported node-by-node.

use crate::grid::{Ball, Grid, ScalarField};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestProfile {
    Tent,
    Bump,
}

/// One test function: samples plus the ball that carries its support.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub field: ScalarField,
    pub ball: Ball,
    pub profile: TestProfile,
    pub height: f64,
}

pub fn sample_profile(
    grid: &Arc<Grid>,
    ball: &Ball,
    profile: TestProfile,
    height: f64,
) -> ScalarField {
    let [cx, cy] = ball.center;
    let r = ball.radius;
    ScalarField::sample(grid, move |x, y| {
        let d = ((x - cx) * (x - cx) + (y - cy) * (y - cy)).sqrt();
        if d >= r {
            return 0.0;
        }
        match profile {
            TestProfile::Tent => height * (1.0 - d / r),
            TestProfile::Bump => {
                let t = 1.0 - (d / r) * (d / r);
                height * t * t
            }
        }
    })
}

/// Deterministic family of tents and bumps on random interior balls.
///
/// Balls keep their closed support strictly inside the domain (margin of two
/// cells) so gradients of the test functions never touch boundary stencils.
pub fn random_family(
    grid: &Arc<Grid>,
    count: usize,
    radius_range: (f64, f64),
    seed: u64,
) -> Result<Vec<TestFunction>> {
    if count == 0 {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    let (r_lo, r_hi) = radius_range;
    if !(r_lo > 0.0 && r_hi >= r_lo) {
        return Err(Error::InvalidParameter(format!(
            "bad radius range [{r_lo}, {r_hi}]"
        )));
    }
    if r_lo < 4.0 * grid.spacing() {
        return Err(Error::InvalidParameter(format!(
            "test-function radius {r_lo} below 4h = {}",
            4.0 * grid.spacing()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 2.0 * grid.spacing();
    let mut family = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while family.len() < count {
        attempts += 1;
        if attempts > 200 * count {
            return Err(Error::InvalidParameter(
                "could not place test functions inside the domain; radii too large".into(),
            ));
        }
        let r = rng.gen_range(r_lo..=r_hi);
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if !grid.domain().contains(x, y) {
            continue;
        }
        if grid.domain().boundary_distance(x, y) < r + margin {
            continue;
        }
        let ball = Ball::new([x, y], r)?;
        let profile = if rng.gen_bool(0.5) {
            TestProfile::Tent
        } else {
            TestProfile::Bump
        };
        let height = rng.gen_range(0.5..2.0);
        family.push(TestFunction {
            field: sample_profile(grid, &ball, profile, height),
            ball,
            profile,
            height,
        });
    }
    Ok(family)
}

/// Family of tents centered on a fixed point with radii in a geometric
/// sweep and scale-proportional center jitter; used for ratio-vs-radius
/// trend checks where the geometry must be statistically scale-invariant.
pub fn scaled_family_at(
    grid: &Arc<Grid>,
    anchor: [f64; 2],
    radii: &[f64],
    per_radius: usize,
    jitter: f64,
    seed: u64,
) -> Result<Vec<TestFunction>> {
    if radii.is_empty() || per_radius == 0 {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = Vec::with_capacity(radii.len() * per_radius);
    for &r in radii {
        if r < 4.0 * grid.spacing() {
            return Err(Error::InvalidParameter(format!(
                "test-function radius {r} below 4h = {}",
                4.0 * grid.spacing()
            )));
        }
        for _ in 0..per_radius {
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let dist = rng.gen_range(0.0..jitter) * r;
            let center = [
                anchor[0] + dist * angle.cos(),
                anchor[1] + dist * angle.sin(),
            ];
            if grid.domain().boundary_distance(center[0], center[1]) < r + 2.0 * grid.spacing() {
                return Err(Error::BallOutsideDomain(format!(
                    "scaled family ball radius {r} at ({:.3}, {:.3})",
                    center[0], center[1]
                )));
            }
            let ball = Ball::new(center, r)?;
            let profile = if rng.gen_bool(0.5) {
                TestProfile::Tent
            } else {
                TestProfile::Bump
            };
            let height = rng.gen_range(0.5..2.0);
            family.push(TestFunction {
                field: sample_profile(grid, &ball, profile, height),
                ball,
                profile,
                height,
            });
        }
    }
    Ok(family)
}
