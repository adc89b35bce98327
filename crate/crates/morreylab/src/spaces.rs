//! Morrey-norm and Stummel–Kato estimators over sampled fields, embedding
//! checks, and the closed-form predicted gradient Hölder exponent.
//!
//! The continuum suprema over `x in Omega, 0 < r < diam(Omega)` are
//! discretized by a [`BallFamily`]: centers on a coarse sublattice, radii in
//! a geometric sweep. The discrete sup is a max over a fixed finite set, so
//! results are deterministic regardless of evaluation order and the search
//! parallelizes over centers.

use crate::fit::ols_line;
use crate::grid::{singular_cell_integral, Ball, Grid, ScalarField};
use crate::report::{EmbeddingReport, MorreyReport, StummelReport};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exponent pair `(p, lambda)` identifying a Morrey space `L^{p,lambda}`.
///
/// `lambda = 0` recovers `L^p`; `lambda = n` recovers `L^inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyIndex {
    pub p: f64,
    pub lambda: f64,
}

impl MorreyIndex {
    pub fn new(p: f64, lambda: f64, n: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Morrey exponent p must satisfy 1 <= p < inf, got {p}"
            )));
        }
        if !(0.0..=n).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "Morrey exponent lambda must lie in [0, n] = [0, {n}], got {lambda}"
            )));
        }
        Ok(MorreyIndex { p, lambda })
    }
}

/// Discretization of the sup over balls: a center sublattice crossed with a
/// geometric radius sweep.
#[derive(Debug, Clone)]
pub struct BallFamily {
    pub centers: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
}

impl BallFamily {
    /// Family covering the whole domain: radii decrease geometrically with
    /// ratio `2^{-1/2}` from `diam(Omega)` down to `r_min >= 4h`; centers sit
    /// on a sublattice with spacing at most `r_min`.
    pub fn covering(grid: &Grid, r_min: f64) -> Result<Self> {
        let h = grid.spacing();
        if r_min < 4.0 * h {
            return Err(Error::InvalidParameter(format!(
                "ball family r_min = {r_min} below 4h = {}",
                4.0 * h
            )));
        }
        let ratio = std::f64::consts::FRAC_1_SQRT_2;
        let mut radii = Vec::new();
        let mut r = grid.diameter();
        while r >= r_min {
            radii.push(r);
            r *= ratio;
        }
        if radii.len() < 8 {
            return Err(Error::InvalidParameter(format!(
                "ball family has {} radii; need at least 8 (shrink r_min)",
                radii.len()
            )));
        }
        let stride = ((r_min / h).floor() as usize).max(1);
        let (nx, ny) = grid.shape();
        let mut centers = Vec::new();
        for j in (0..ny).step_by(stride) {
            for i in (0..nx).step_by(stride) {
                let idx = grid.index(i, j);
                if grid.is_active(idx) {
                    centers.push(grid.position(idx));
                }
            }
        }
        // the worst-case balls for singular data sit at the origin; make sure
        // the sublattice does not skip it
        let origin = grid.position(grid.nearest_node(0.0, 0.0));
        if grid.domain().contains(origin[0], origin[1])
            && !centers.iter().any(|c| c == &origin)
        {
            centers.push(origin);
        }
        Self::new(grid, centers, radii)
    }

    pub fn new(grid: &Grid, centers: Vec<[f64; 2]>, radii: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || radii.is_empty() {
            return Err(Error::InvalidParameter("empty ball family".into()));
        }
        for &r in &radii {
            if !(r > 0.0 && r <= grid.diameter() + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "family radius {r} outside (0, diam(Omega) = {}]",
                    grid.diameter()
                )));
            }
        }
        Ok(BallFamily { centers, radii })
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty() || self.radii.is_empty()
    }
}

/// Geometric radius sweep `r_max * ratio^k` down to `r_min` (inclusive
/// within floating slack), largest first.
pub fn geometric_radii(r_max: f64, r_min: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(r_max > 0.0 && r_min > 0.0 && r_min <= r_max) {
        return Err(Error::InvalidParameter(format!(
            "bad radius range [{r_min}, {r_max}]"
        )));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "geometric ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let mut out = Vec::new();
    let mut r = r_max;
    while r >= r_min * (1.0 - 1e-12) {
        out.push(r);
        r *= ratio;
    }
    Ok(out)
}

/// Discrete Morrey norm: max over the family of
/// `(r^{-lambda} * integral_{Omega \cap B_r(x)} |f|^p)^{1/p}`.
pub fn morrey_norm(f: &ScalarField, idx: MorreyIndex, fam: &BallFamily) -> Result<MorreyReport> {
    if fam.is_empty() {
        return Err(Error::InvalidParameter("empty ball family".into()));
    }
    f.check_finite()?;
    let grid = f.grid();
    let cell = grid.spacing() * grid.spacing();
    let powers: Vec<f64> = f.values().iter().map(|v| v.abs().powf(idx.p)).collect();

    let per_center: Vec<(f64, usize)> = fam
        .centers
        .par_iter()
        .map(|&c| {
            let mut best = (f64::NEG_INFINITY, 0usize);
            // nested balls: scan the largest once and bucket nodes by radius
            let r_max = fam.radii[0];
            let nodes = grid.nodes_in_ball(&Ball {
                center: c,
                radius: r_max,
            });
            for (k, &r) in fam.radii.iter().enumerate() {
                let r2 = r * r;
                let mut acc = 0.0;
                for &node in &nodes {
                    let p = grid.position(node);
                    let dx = p[0] - c[0];
                    let dy = p[1] - c[1];
                    if dx * dx + dy * dy <= r2 {
                        acc += powers[node];
                    }
                }
                let val = acc * cell / r.powf(idx.lambda);
                if val > best.0 {
                    best = (val, k);
                }
            }
            best
        })
        .collect();

    let mut best_val = f64::NEG_INFINITY;
    let mut best_center = fam.centers[0];
    let mut best_radius = fam.radii[0];
    for (ci, &(v, k)) in per_center.iter().enumerate() {
        if v > best_val {
            best_val = v;
            best_center = fam.centers[ci];
            best_radius = fam.radii[k];
        }
    }
    Ok(MorreyReport {
        p: idx.p,
        lambda: idx.lambda,
        value: best_val.max(0.0).powf(1.0 / idx.p),
        argmax_center: best_center,
        argmax_radius: best_radius,
        grid_h: grid.spacing(),
    })
}

/// Stummel–Kato modulus at radius `r`:
/// `max over centers of integral_{Omega \cap B_r(x)} |f(y)| / |x-y|^{n-p} dy`.
///
/// The kernel cell at `y = x` is integrated by the polar subcell rule.
pub fn stummel_modulus(
    f: &ScalarField,
    p: f64,
    r: f64,
    centers: &[[f64; 2]],
) -> Result<StummelReport> {
    let grid = f.grid();
    let n = grid.dim() as f64;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Stummel exponent p must satisfy p >= 1, got {p}"
        )));
    }
    if p >= n {
        return Err(Error::InvalidParameter(format!(
            "kernel requires p < n (got p = {p}, n = {n})"
        )));
    }
    if centers.is_empty() {
        return Err(Error::InvalidParameter("empty center list".into()));
    }
    let h = grid.spacing();
    if !(r > 4.0 * h) {
        return Err(Error::InvalidParameter(format!(
            "Stummel radius {r} must exceed 4h = {}",
            4.0 * h
        )));
    }
    f.check_finite()?;
    let a = n - p;
    let cell = h * h;

    let per_center: Vec<f64> = centers
        .par_iter()
        .map(|&c| {
            let node_c = grid.nearest_node(c[0], c[1]);
            let pc = grid.position(node_c);
            let nodes = grid.nodes_in_ball(&Ball {
                center: c,
                radius: r,
            });
            let mut acc = 0.0;
            for &node in &nodes {
                if node == node_c {
                    continue;
                }
                let q = grid.position(node);
                let d = ((q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2)).sqrt();
                if d <= 0.0 {
                    continue;
                }
                acc += f.get(node).abs() / d.powf(a) * cell;
            }
            // kernel mass of the center's own cell, weighted by the nodal
            // sample (which is the cell average if that node is singular)
            if grid.is_active(node_c) && (Ball { center: c, radius: r }).contains(pc[0], pc[1]) {
                let kernel_mass = singular_cell_integral(pc, h, |x, y| {
                    let d = ((x - pc[0]).powi(2) + (y - pc[1]).powi(2)).sqrt();
                    d.powf(-a)
                });
                acc += f.get(node_c).abs() * kernel_mass;
            }
            acc
        })
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut best_center = centers[0];
    for (i, &v) in per_center.iter().enumerate() {
        if v > best {
            best = v;
            best_center = centers[i];
        }
    }
    Ok(StummelReport {
        p,
        r,
        value: best,
        argmax_center: best_center,
        grid_h: h,
    })
}

/// Log-log slope of the Stummel modulus `eta(r)` over the given radii.
///
/// For `f in L^{1,lambda}` the modulus decays at least like
/// `r^{lambda - n + p}`, so the fitted slope certifies the decay rate.
pub fn stummel_decay_slope(
    f: &ScalarField,
    p: f64,
    radii: &[f64],
    centers: &[[f64; 2]],
) -> Result<f64> {
    if radii.len() < 6 {
        return Err(Error::InvalidParameter(format!(
            "need at least 6 radii for the decay slope, got {}",
            radii.len()
        )));
    }
    let span = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / radii.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 9.5 {
        return Err(Error::InvalidParameter(format!(
            "radii must span at least one decade, got ratio {span:.3}"
        )));
    }
    let zero_field = f.values().iter().all(|v| *v == 0.0);
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let eta = stummel_modulus(f, p, r, centers)?.value;
        if eta <= 0.0 {
            if zero_field {
                return Err(Error::DegenerateProfile(
                    "eta(r) = 0: field vanishes identically".into(),
                ));
            }
            return Err(Error::DegenerateProfile(format!(
                "eta({r}) = 0 for a nonzero field"
            )));
        }
        xs.push(r.ln());
        ys.push(eta.ln());
    }
    let (slope, _, _) = ols_line(&xs, &ys);
    Ok(slope)
}

/// Log-log growth slope of `M(r) = sup_x integral_{B_r(x)} |f|^p dy`; used as
/// a measured Morrey exponent `lambda_hat` (for `p = 1` this estimates the
/// `lambda` of `L^{1,lambda}` membership saturated by the data).
pub fn morrey_growth_slope(
    f: &ScalarField,
    p: f64,
    radii: &[f64],
    centers: &[[f64; 2]],
) -> Result<f64> {
    if radii.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 radii for the growth slope, got {}",
            radii.len()
        )));
    }
    f.check_finite()?;
    let grid = f.grid();
    let cell = grid.spacing() * grid.spacing();
    let powers: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &r in radii {
        let sup = centers
            .par_iter()
            .map(|&c| {
                grid.nodes_in_ball(&Ball { center: c, radius: r })
                    .iter()
                    .map(|&n| powers[n])
                    .sum::<f64>()
                    * cell
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if sup <= 0.0 {
            return Err(Error::DegenerateProfile(format!(
                "ball mass vanished at r = {r}"
            )));
        }
        xs.push(r.ln());
        ys.push(sup.ln());
    }
    let (slope, _, _) = ols_line(&xs, &ys);
    Ok(slope)
}

/// Embedding check `L^{q,mu} subset L^{p,lambda}`: verifies the hypothesis
/// `(n - mu)/q <= (n - lambda)/p` (with `p <= q`) and reports both norms and
/// their ratio, which must stay bounded under grid refinement.
pub fn check_embedding(
    f: &ScalarField,
    from_idx: MorreyIndex,
    to_idx: MorreyIndex,
    fam: &BallFamily,
) -> Result<EmbeddingReport> {
    let n = f.grid().dim() as f64;
    let (q, mu) = (from_idx.p, from_idx.lambda);
    let (p, lambda) = (to_idx.p, to_idx.lambda);
    if p > q {
        return Err(Error::HypothesisViolated(format!(
            "embedding hypothesis violated: requires p <= q, got p = {p} > q = {q}"
        )));
    }
    if (n - mu) / q > (n - lambda) / p + 1e-14 {
        return Err(Error::HypothesisViolated(format!(
            "embedding hypothesis violated: (n-mu)/q = {:.6} > (n-lambda)/p = {:.6}",
            (n - mu) / q,
            (n - lambda) / p
        )));
    }
    let norm_from = morrey_norm(f, from_idx, fam)?;
    let norm_to = morrey_norm(f, to_idx, fam)?;
    let ratio = if norm_from.value == 0.0 {
        0.0
    } else {
        norm_to.value / norm_from.value
    };
    Ok(EmbeddingReport {
        from_p: q,
        from_lambda: mu,
        to_p: p,
        to_lambda: lambda,
        norm_from: norm_from.value,
        norm_to: norm_to.value,
        ratio,
    })
}

/// Which growth regime of the p-Laplacian the prediction sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaBranch {
    /// `p >= 2`: flux vanishes where the gradient does.
    Degenerate,
    /// `p < 2`: flux blows up where the gradient vanishes.
    Singular,
}

/// Predicted gradient Hölder exponent with its inputs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExponentPrediction {
    pub alpha: f64,
    pub branch: AlphaBranch,
    pub gamma_cap: f64,
    pub p: f64,
    pub lambda: f64,
    pub n: u32,
}

/// Closed-form predicted exponent:
/// `min(gamma, lambda + 1 - 2n/p)` for `2n/(lambda+1) < p <= 2` and
/// `min(gamma, (lambda + 1 - n)/(p - 1))` for `2 <= p < n`.
///
/// Both formulas agree exactly at `p = 2`; the reported branch is degenerate
/// for `p >= 2`. Errors name the failing inequality.
pub fn predicted_alpha(p: f64, lambda: f64, n: u32, gamma: f64) -> Result<ExponentPrediction> {
    let nf = n as f64;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::HypothesisViolated(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if !(lambda > nf - 1.0) {
        return Err(Error::HypothesisViolated(format!(
            "lambda <= n-1 (lambda = {lambda}, n-1 = {})",
            nf - 1.0
        )));
    }
    if !(lambda < nf) {
        return Err(Error::HypothesisViolated(format!(
            "lambda >= n (lambda = {lambda}, n = {nf})"
        )));
    }
    let p_low = 2.0 * nf / (lambda + 1.0);
    if !(p > p_low) {
        return Err(Error::HypothesisViolated(format!(
            "p <= 2n/(lambda+1) (p = {p}, 2n/(lambda+1) = {p_low:.6})"
        )));
    }
    if p > 2.0 && !(p < nf) {
        return Err(Error::HypothesisViolated(format!(
            "p >= n (p = {p}, n = {nf}; the degenerate branch requires 2 <= p < n)"
        )));
    }
    let (rate, branch) = if p >= 2.0 {
        ((lambda + 1.0 - nf) / (p - 1.0), AlphaBranch::Degenerate)
    } else {
        (lambda + 1.0 - 2.0 * nf / p, AlphaBranch::Singular)
    };
    Ok(ExponentPrediction {
        alpha: gamma.min(rate),
        branch,
        gamma_cap: gamma,
        p,
        lambda,
        n,
    })
}

/// The branch rate without the gamma cap; used by benchmarks whose measured
/// exponent saturates the rate itself.
pub fn alpha_rate(p: f64, lambda: f64, n: u32) -> f64 {
    let nf = n as f64;
    if p >= 2.0 {
        (lambda + 1.0 - nf) / (p - 1.0)
    } else {
        lambda + 1.0 - 2.0 * nf / p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainKind;
    use std::sync::Arc;

    fn disk(h: f64) -> Arc<Grid> {
        Grid::new(DomainKind::UnitDisk, h).unwrap()
    }

    #[test]
    fn morrey_norm_of_one_on_unit_square() {
        // p = 1, lambda = 0: the norm is the area of the domain, attained at
        // any ball covering it.
        let g = Grid::new(DomainKind::UnitSquare, 1.0 / 128.0).unwrap();
        let f = ScalarField::constant(&g, 1.0);
        let fam = BallFamily::covering(&g, 6.0 * g.spacing()).unwrap();
        let rep = morrey_norm(&f, MorreyIndex::new(1.0, 0.0, 2.0).unwrap(), &fam).unwrap();
        assert!((rep.value - 1.0).abs() < 0.02, "norm {}", rep.value);
        assert!(rep.argmax_radius > 0.9, "sup should sit at a large ball");
    }

    #[test]
    fn morrey_norm_of_zero_field() {
        let g = disk(1.0 / 32.0);
        let f = ScalarField::zeros(&g);
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        let rep = morrey_norm(&f, MorreyIndex::new(1.5, 1.0, 2.0).unwrap(), &fam).unwrap();
        assert_eq!(rep.value, 0.0);
    }

    #[test]
    fn morrey_norm_sqrt_singularity_saturates_at_origin() {
        // f = |x|^{-1/2}, p = 1, lambda = 3/2: every origin ball gives
        // r^{-3/2} * 2 pi r^{3/2} * 2/3... = 4 pi / 3.
        let g = disk(1.0 / 128.0);
        let f = ScalarField::sample_singular(
            &g,
            |x, y| 1.0 / (x * x + y * y).sqrt().sqrt(),
            [0.0, 0.0],
        );
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        let rep = morrey_norm(&f, MorreyIndex::new(1.0, 1.5, 2.0).unwrap(), &fam).unwrap();
        let exact = 4.0 * std::f64::consts::PI / 3.0;
        assert!(
            (rep.value - exact).abs() < 0.05 * exact,
            "norm {} vs {exact}",
            rep.value
        );
        let d = (rep.argmax_center[0].powi(2) + rep.argmax_center[1].powi(2)).sqrt();
        assert!(d < 0.1, "argmax center should sit at the origin, got {d}");
    }

    #[test]
    fn morrey_norm_positive_homogeneity() {
        let g = disk(1.0 / 32.0);
        let f = ScalarField::sample(&g, |x, y| (x + 0.3).abs() + y * y);
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        let idx = MorreyIndex::new(1.5, 0.75, 2.0).unwrap();
        let base = morrey_norm(&f, idx, &fam).unwrap().value;
        let c = 3.7;
        let scaled = morrey_norm(&f.map(|v| c * v), idx, &fam).unwrap().value;
        assert!((scaled - c * base).abs() <= 1e-10 * scaled.max(1.0));
    }

    #[test]
    fn morrey_norm_lambda_monotonicity_bound() {
        let g = disk(1.0 / 32.0);
        let f = ScalarField::sample(&g, |x, y| 1.0 + x * y);
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        let p = 2.0;
        let (l1, l2) = (0.5, 1.25);
        let n1 = morrey_norm(&f, MorreyIndex::new(p, l1, 2.0).unwrap(), &fam)
            .unwrap()
            .value;
        let n2 = morrey_norm(&f, MorreyIndex::new(p, l2, 2.0).unwrap(), &fam)
            .unwrap()
            .value;
        let bound = g.diameter().powf((l2 - l1) / p) * n2;
        assert!(n1 <= bound * (1.0 + 1e-12), "{n1} vs bound {bound}");
    }

    #[test]
    fn morrey_lambda_zero_is_plain_lp() {
        let g = Grid::new(DomainKind::UnitSquare, 1.0 / 64.0).unwrap();
        let f = ScalarField::sample(&g, |x, y| 1.0 + 0.5 * (3.0 * x).sin() * (2.0 * y).cos());
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        let p = 2.0;
        let rep = morrey_norm(&f, MorreyIndex::new(p, 0.0, 2.0).unwrap(), &fam).unwrap();
        let cell = g.spacing() * g.spacing();
        let lp: f64 = f
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| g.is_active(*i))
            .map(|(_, v)| v.abs().powf(p))
            .sum::<f64>()
            * cell;
        let lp = lp.powf(1.0 / p);
        assert!(
            (rep.value - lp).abs() <= 0.03 * lp,
            "L^{{p,0}} = {} vs L^p = {lp}",
            rep.value
        );
    }

    #[test]
    fn stummel_modulus_constant_field() {
        // f = 1, p = 1, n = 2: integral of |x-y|^{-1} over B_r = 2 pi r.
        let g = disk(1.0 / 64.0);
        let f = ScalarField::constant(&g, 1.0);
        let rep = stummel_modulus(&f, 1.0, 0.25, &[[0.1, -0.05]]).unwrap();
        let exact = 2.0 * std::f64::consts::PI * 0.25;
        assert!(
            (rep.value - exact).abs() < 0.03 * exact,
            "eta {} vs {exact}",
            rep.value
        );
    }

    #[test]
    fn stummel_modulus_zero_field_and_errors() {
        let g = disk(1.0 / 32.0);
        let zero = ScalarField::zeros(&g);
        assert_eq!(
            stummel_modulus(&zero, 1.0, 0.2, &[[0.0, 0.0]]).unwrap().value,
            0.0
        );
        let f = ScalarField::constant(&g, 1.0);
        let err = stummel_modulus(&f, 2.0, 0.2, &[[0.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("kernel requires p < n"));
        assert!(stummel_modulus(&f, 1.0, 2.0 * g.spacing(), &[[0.0, 0.0]]).is_err());
    }

    #[test]
    fn stummel_modulus_monotone_in_radius() {
        let g = disk(1.0 / 48.0);
        let f = ScalarField::sample(&g, |x, y| 1.0 + (x - y).abs());
        let centers = [[0.0, 0.0], [0.3, 0.2], [-0.4, 0.1]];
        let mut last = 0.0;
        for r in [0.1, 0.15, 0.22, 0.3, 0.4] {
            // fixed centers and nested node sets => exactly nondecreasing
            let per_center: Vec<f64> = centers
                .iter()
                .map(|&c| stummel_modulus(&f, 1.0, r, &[c]).unwrap().value)
                .collect();
            let v = per_center.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(v >= last - 1e-14, "eta not monotone: {v} < {last}");
            last = v;
        }
    }

    #[test]
    fn stummel_decay_slope_constant_field() {
        // eta(r) = 2 pi r exactly, slope 1
        let g = disk(1.0 / 128.0);
        let f = ScalarField::constant(&g, 1.0);
        let radii = geometric_radii(0.4, 0.04, 0.75).unwrap();
        let slope = stummel_decay_slope(&f, 1.0, &radii, &[[0.0, 0.0], [0.2, 0.1]]).unwrap();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn stummel_decay_slope_sqrt_singularity() {
        // f = |x|^{-1/2} in L^{1,3/2}: eta decays like r^{1/2}
        let g = disk(1.0 / 128.0);
        let f = ScalarField::sample_singular(
            &g,
            |x, y| 1.0 / (x * x + y * y).sqrt().sqrt(),
            [0.0, 0.0],
        );
        let radii = geometric_radii(0.4, 0.04, 0.75).unwrap();
        let centers = [[0.0, 0.0], [0.05, 0.05], [0.3, -0.2]];
        let slope = stummel_decay_slope(&f, 1.0, &radii, &centers).unwrap();
        assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn stummel_decay_rejects_zero_field() {
        let g = disk(1.0 / 64.0);
        let zero = ScalarField::zeros(&g);
        let radii = geometric_radii(0.4, 0.04, 0.75).unwrap();
        assert!(matches!(
            stummel_decay_slope(&zero, 1.0, &radii, &[[0.0, 0.0]]),
            Err(Error::DegenerateProfile(_))
        ));
    }

    #[test]
    fn embedding_hypothesis_arithmetic() {
        let g = Grid::new(DomainKind::UnitSquare, 1.0 / 64.0).unwrap();
        let f = ScalarField::constant(&g, 1.0);
        let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
        // (q, mu) = (2, 0) -> (p, lambda) = (1, 1): (2-0)/2 = 1 <= (2-1)/1 = 1
        let rep = check_embedding(
            &f,
            MorreyIndex::new(2.0, 0.0, 2.0).unwrap(),
            MorreyIndex::new(1.0, 1.0, 2.0).unwrap(),
            &fam,
        )
        .unwrap();
        assert!(rep.norm_from.is_finite() && rep.norm_to.is_finite());
        assert!(rep.ratio.is_finite());

        // (q, mu) = (1, 1.9) -> (p, lambda) = (1, 1.5): 0.1 <= 0.5 holds
        let rep2 = check_embedding(
            &f,
            MorreyIndex::new(1.0, 1.9, 2.0).unwrap(),
            MorreyIndex::new(1.0, 1.5, 2.0).unwrap(),
            &fam,
        )
        .unwrap();
        assert!(rep2.ratio.is_finite());

        // reversed: (q, mu) = (1, 1.5) -> (p, lambda) = (1, 1.9): 0.5 > 0.1
        let err = check_embedding(
            &f,
            MorreyIndex::new(1.0, 1.5, 2.0).unwrap(),
            MorreyIndex::new(1.0, 1.9, 2.0).unwrap(),
            &fam,
        )
        .unwrap_err();
        assert!(err.to_string().contains("embedding hypothesis violated"));
    }

    #[test]
    fn embedding_ratio_stable_under_refinement() {
        // |f| = |x|^{-1/2}: ||f||_{1,3/2} <= c ||f||_{2,1}
        let ratios: Vec<f64> = [64.0, 128.0]
            .iter()
            .map(|&nn| {
                let g = disk(1.0 / nn);
                let f = ScalarField::sample_singular(
                    &g,
                    |x, y| 1.0 / (x * x + y * y).sqrt().sqrt(),
                    [0.0, 0.0],
                );
                let fam = BallFamily::covering(&g, 5.0 * g.spacing()).unwrap();
                check_embedding(
                    &f,
                    MorreyIndex::new(2.0, 1.0, 2.0).unwrap(),
                    MorreyIndex::new(1.0, 1.5, 2.0).unwrap(),
                    &fam,
                )
                .unwrap()
                .ratio
            })
            .collect();
        let rel = (ratios[1] - ratios[0]).abs() / ratios[0];
        assert!(rel < 0.1, "embedding ratio drifted {rel:.3} ({ratios:?})");
    }

    #[test]
    fn predicted_alpha_worked_examples() {
        // p = 2, n = 2, lambda = 1.5: both branches give 0.5
        let p1 = predicted_alpha(2.0, 1.5, 2, 0.9).unwrap();
        assert_eq!(p1.alpha, 0.5);
        assert_eq!(p1.branch, AlphaBranch::Degenerate);

        // p = 2.5, n = 3, lambda = 2.5: (2.5 + 1 - 3)/1.5 = 1/3
        let p2 = predicted_alpha(2.5, 2.5, 3, 0.9).unwrap();
        assert!((p2.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p2.branch, AlphaBranch::Degenerate);

        // gamma caps the rate
        let p3 = predicted_alpha(2.0, 1.9, 2, 0.3).unwrap();
        assert_eq!(p3.alpha, 0.3);
    }

    #[test]
    fn predicted_alpha_named_hypothesis_errors() {
        let e1 = predicted_alpha(1.2, 1.5, 2, 0.9).unwrap_err();
        assert!(e1.to_string().contains("p <= 2n/(lambda+1)"), "{e1}");
        let e2 = predicted_alpha(2.0, 1.0, 2, 0.9).unwrap_err();
        assert!(e2.to_string().contains("lambda <= n-1"), "{e2}");
        let e3 = predicted_alpha(2.5, 1.9, 2, 0.9).unwrap_err();
        assert!(e3.to_string().contains("p >= n"), "{e3}");
        let e4 = predicted_alpha(2.0, 1.5, 2, 1.2).unwrap_err();
        assert!(e4.to_string().contains("gamma"), "{e4}");
    }
}
