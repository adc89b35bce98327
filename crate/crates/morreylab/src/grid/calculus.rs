//! Discrete calculus: integrals, gradients, ball averages.

use super::{Ball, Grid, NodeFlag, Region, ScalarField, VectorField};
use crate::{Error, Result};

fn region_nodes(grid: &Grid, region: &Region) -> Result<Vec<usize>> {
    let nodes: Vec<usize> = match region {
        Region::Whole => grid.active_nodes().collect(),
        Region::Ball(b) => grid.nodes_in_ball(b),
    };
    if nodes.is_empty() {
        let what = match region {
            Region::Whole => "domain has no active nodes".to_string(),
            Region::Ball(b) => format!(
                "ball at ({:.4}, {:.4}) radius {:.4} contains no domain nodes",
                b.center[0], b.center[1], b.radius
            ),
        };
        return Err(Error::EmptyRegion(what));
    }
    Ok(nodes)
}

/// Midpoint-rule integral of `f` over `region` intersected with the domain.
///
/// Each active node contributes `h^n` times its value; a singular node
/// already stores its cell average, so its contribution equals the subcell
/// quadrature of the underlying formula.
pub fn integrate(f: &ScalarField, region: impl Into<Region>) -> Result<f64> {
    let region = region.into();
    let grid = f.grid();
    let nodes = region_nodes(grid, &region)?;
    let cell = grid.spacing() * grid.spacing();
    Ok(nodes.iter().map(|&idx| f.get(idx)).sum::<f64>() * cell)
}

/// Componentwise midpoint-rule integral of a vector field.
pub fn integrate_vector(g: &VectorField, region: impl Into<Region>) -> Result<[f64; 2]> {
    let region = region.into();
    let grid = g.grid();
    let nodes = region_nodes(grid, &region)?;
    let cell = grid.spacing() * grid.spacing();
    let mut acc = [0.0; 2];
    for &idx in &nodes {
        let v = g.get(idx);
        acc[0] += v[0];
        acc[1] += v[1];
    }
    Ok([acc[0] * cell, acc[1] * cell])
}

/// Integral average over `ball` intersected with the domain.
///
/// The measure is the discrete one (`h^n` per node), so the average of a
/// constant field is exactly that constant for every ball.
pub fn ball_average(f: &ScalarField, ball: &Ball) -> Result<f64> {
    let nodes = f.grid().nodes_in_ball(ball);
    if nodes.is_empty() {
        return Err(Error::EmptyRegion(format!(
            "ball at ({:.4}, {:.4}) radius {:.4} misses the domain",
            ball.center[0], ball.center[1], ball.radius
        )));
    }
    Ok(nodes.iter().map(|&idx| f.get(idx)).sum::<f64>() / nodes.len() as f64)
}

/// Componentwise integral average of a vector field over a ball.
pub fn ball_average_vector(g: &VectorField, ball: &Ball) -> Result<[f64; 2]> {
    let nodes = g.grid().nodes_in_ball(ball);
    if nodes.is_empty() {
        return Err(Error::EmptyRegion(format!(
            "ball at ({:.4}, {:.4}) radius {:.4} misses the domain",
            ball.center[0], ball.center[1], ball.radius
        )));
    }
    let mut acc = [0.0; 2];
    for &idx in &nodes {
        let v = g.get(idx);
        acc[0] += v[0];
        acc[1] += v[1];
    }
    let m = nodes.len() as f64;
    Ok([acc[0] / m, acc[1] / m])
}

/// Finite-difference gradient: centered at interior nodes, one-sided
/// (second order where two neighbors exist, first order otherwise) at
/// boundary nodes, zero at exterior nodes.
pub fn gradient(u: &ScalarField) -> VectorField {
    let grid = u.grid();
    let h = grid.spacing();
    let mut out = VectorField::zeros(grid);
    let values = u.values();
    let (nx, _ny) = grid.shape();

    let axis_derivative = |idx: usize, stride: isize, i: isize, j: isize, axis: usize| -> f64 {
        let step = |k: isize| -> bool {
            if axis == 0 {
                grid.active_at(i + k, j)
            } else {
                grid.active_at(i, j + k)
            }
        };
        let at = |k: isize| values[(idx as isize + k * stride) as usize];
        match (step(-1), step(1)) {
            (true, true) => (at(1) - at(-1)) / (2.0 * h),
            (false, true) => {
                if step(2) {
                    (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                } else {
                    (at(1) - at(0)) / h
                }
            }
            (true, false) => {
                if step(-2) {
                    (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h)
                } else {
                    (at(0) - at(-1)) / h
                }
            }
            (false, false) => 0.0,
        }
    };

    for idx in 0..grid.node_count() {
        if grid.flag(idx) == NodeFlag::Exterior {
            continue;
        }
        let (i, j) = grid.coords(idx);
        let (i, j) = (i as isize, j as isize);
        let gx = axis_derivative(idx, 1, i, j, 0);
        let gy = axis_derivative(idx, nx as isize, i, j, 1);
        out.values_mut()[idx] = [gx, gy];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DomainKind, Grid};
    use rand::{Rng, SeedableRng};

    #[test]
    fn integrate_constant_over_unit_square() {
        let g = Grid::new(DomainKind::UnitSquare, 1.0 / 64.0).unwrap();
        let one = ScalarField::constant(&g, 1.0);
        let v = integrate(&one, Region::Whole).unwrap();
        // midpoint cells of edge nodes stick out: O(h) area error
        assert!((v - 1.0).abs() < 4.0 * g.spacing(), "area = {v}");
    }

    #[test]
    fn integrate_zero_field_any_ball() {
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 32.0).unwrap();
        let zero = ScalarField::zeros(&g);
        let b = Ball::new([0.2, 0.1], 0.3).unwrap();
        assert_eq!(integrate(&zero, b).unwrap(), 0.0);
    }

    #[test]
    fn integrate_sqrt_singularity_on_disk() {
        // integral of |x|^{-1/2} over the unit disk = 2*pi*2/3
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 128.0).unwrap();
        let f = ScalarField::sample_singular(
            &g,
            |x, y| 1.0 / (x * x + y * y).sqrt().sqrt(),
            [0.0, 0.0],
        );
        let v = integrate(&f, Ball::new([0.0, 0.0], 1.0).unwrap()).unwrap();
        let exact = 2.0 * std::f64::consts::PI * 2.0 / 3.0;
        assert!(
            (v - exact).abs() < 0.01 * exact,
            "integral {v} vs exact {exact}"
        );
    }

    #[test]
    fn integrate_singular_refinement_order_at_least_one() {
        let exact = 2.0 * std::f64::consts::PI * 2.0 / 3.0;
        let sizes = [32.0, 64.0, 128.0, 256.0];
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let g = Grid::new(DomainKind::UnitDisk, 1.0 / n).unwrap();
                let f = ScalarField::sample_singular(
                    &g,
                    |x, y| 1.0 / (x * x + y * y).sqrt().sqrt(),
                    [0.0, 0.0],
                );
                (integrate(&f, Ball::new([0.0, 0.0], 1.0).unwrap()).unwrap() - exact).abs()
            })
            .collect();
        // rim-node quantization makes pairwise ratios noisy; fit the order
        // across all levels instead
        let xs: Vec<f64> = sizes.iter().map(|n| (1.0 / n).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(order > 0.9, "refinement order {order} below 1 ({errs:?})");
    }

    #[test]
    fn integrate_errors_on_region_outside_domain() {
        let g = Grid::new(DomainKind::UnitSquare, 1.0 / 16.0).unwrap();
        let f = ScalarField::constant(&g, 1.0);
        let far = Ball::new([5.0, 5.0], 0.3).unwrap();
        assert!(matches!(integrate(&f, far), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn integrate_is_linear_to_machine_precision() {
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 24.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = ScalarField::sample(&g, |x, y| (3.0 * x).sin() + y * y);
        let gfield = ScalarField::sample(&g, |x, y| x * y - 0.5 * (2.0 * y).cos());
        for _ in 0..20 {
            let a: f64 = rng.gen_range(-2.0..2.0);
            let b: f64 = rng.gen_range(-2.0..2.0);
            let combo = ScalarField::from_values(
                &g,
                f.values()
                    .iter()
                    .zip(gfield.values())
                    .map(|(&u, &v)| a * u + b * v)
                    .collect(),
            )
            .unwrap();
            let ball = Ball::new([0.1, -0.2], 0.5).unwrap();
            let lhs = integrate(&combo, ball).unwrap();
            let rhs = a * integrate(&f, ball).unwrap() + b * integrate(&gfield, ball).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn ball_average_of_constant_on_random_balls() {
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 40.0).unwrap();
        let c = 3.25;
        let f = ScalarField::constant(&g, c);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut tested = 0;
        while tested < 100 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let r: f64 = rng.gen_range(0.05..0.8);
            let ball = Ball::new([x, y], r).unwrap();
            match ball_average(&f, &ball) {
                Ok(avg) => {
                    assert_eq!(avg, c);
                    tested += 1;
                }
                Err(_) => continue, // ball missed the domain entirely
            }
        }
    }

    #[test]
    fn ball_average_odd_field_vanishes_at_origin() {
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 32.0).unwrap();
        let f = ScalarField::sample(&g, |x, _| x);
        let avg = ball_average(&f, &Ball::new([0.0, 0.0], 0.5).unwrap()).unwrap();
        assert!(avg.abs() < 1e-14, "odd symmetry broken: {avg}");
    }

    #[test]
    fn ball_average_quadratic_matches_polar_integral() {
        // mean of x^2 over B_{1/2}(0) = r^2/4 = 1/16
        let g = Grid::new(DomainKind::UnitDisk, 1.0 / 128.0).unwrap();
        let f = ScalarField::sample(&g, |x, _| x * x);
        let avg = ball_average(&f, &Ball::new([0.0, 0.0], 0.5).unwrap()).unwrap();
        assert!(
            (avg - 1.0 / 16.0).abs() < 0.02 / 16.0,
            "mean {avg} vs 1/16"
        );
    }

    #[test]
    fn gradient_exact_on_affine_fields() {
        for domain in [DomainKind::UnitSquare, DomainKind::UnitDisk] {
            let g = Grid::new(domain, 1.0 / 32.0).unwrap();
            let (a, b, c) = (1.3, -0.7, 0.25);
            let u = ScalarField::sample(&g, |x, y| a * x + b * y + c);
            let du = gradient(&u);
            for idx in 0..g.node_count() {
                if !g.is_active(idx) {
                    continue;
                }
                let v = du.get(idx);
                assert!(
                    (v[0] - a).abs() < 1e-12 && (v[1] - b).abs() < 1e-12,
                    "affine gradient off at node {idx}: {v:?}"
                );
            }
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = Grid::new(DomainKind::Annulus { inner: 0.25 }, 1.0 / 32.0).unwrap();
        let u = ScalarField::constant(&g, 4.0);
        let du = gradient(&u);
        for idx in 0..g.node_count() {
            let v = du.get(idx);
            assert_eq!(v, [0.0, 0.0]);
        }
    }

    #[test]
    fn gradient_second_order_on_smooth_field() {
        // u = 1 - r^2 has gradient (-2x, -2y); interior error is O(h^2)
        // (exact here since u is quadratic), boundary one-sided stencils are
        // exercised separately with a cubic.
        let errs: Vec<f64> = [16.0, 32.0, 64.0]
            .iter()
            .map(|&nn| {
                let g = Grid::new(DomainKind::UnitDisk, 1.0 / nn).unwrap();
                let u = ScalarField::sample(&g, |x, y| x * x * x + y * y * y - x * y);
                let du = gradient(&u);
                let mut worst: f64 = 0.0;
                for idx in g.interior_nodes() {
                    let p = g.position(idx);
                    let exact = [3.0 * p[0] * p[0] - p[1], 3.0 * p[1] * p[1] - p[0]];
                    let got = du.get(idx);
                    worst = worst
                        .max((got[0] - exact[0]).abs())
                        .max((got[1] - exact[1]).abs());
                }
                worst
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "interior gradient order {order} ({errs:?})");
        }
    }
}
