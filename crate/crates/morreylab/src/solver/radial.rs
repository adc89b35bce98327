//! Exact radial solutions used as verification oracles.
//!
//! For source `f = c r^{-s}` on the unit ball with zero boundary data, one
//! integration of the radial p-Laplacian gives the closed form
//!
//! ```text
//! u'(r) = -(c/(n-s))^{1/(p-1)} r^{(1-s)/(p-1)}
//! u(r)  =  (c/(n-s))^{1/(p-1)} (1 - r^{beta+1})/(beta+1),   beta = (1-s)/(p-1)
//! ```
//!
//! so `u(1) = 0` and the gradient has the exact Hölder exponent
//! `min(1, beta)`. Profiles of the form `offset + scale * r^power` also cover
//! the Serrin family `u = ±|x|^gamma`, so the same plumbing verifies both.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Radial profile `u(r) = offset + scale * r^power`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadialProfile {
    pub offset: f64,
    pub scale: f64,
    pub power: f64,
}

impl RadialProfile {
    pub fn u(&self, r: f64) -> f64 {
        self.offset + self.scale * r.powf(self.power)
    }

    /// Radial derivative `u'(r)`.
    pub fn du(&self, r: f64) -> f64 {
        self.scale * self.power * r.powf(self.power - 1.0)
    }

    /// The source `f = -Delta_p u` as a radial power `coeff * r^exponent`,
    /// via the power algebra of the flux `r^{n-1} |u'|^{p-2} u'`.
    pub fn p_laplacian_source(&self, p: f64, n: u32) -> (f64, f64) {
        let nf = n as f64;
        let b = self.scale * self.power; // u' = b * r^{power-1}
        let e = (self.power - 1.0) * (p - 1.0);
        let flux_coeff = b.signum() * b.abs().powf(p - 1.0);
        // -Delta_p u = -r^{1-n} d/dr [ r^{n-1} * flux_coeff * r^e ]
        let coeff = -flux_coeff * (nf - 1.0 + e);
        (coeff, e - 1.0)
    }

    /// Pointwise residual of `-Delta_p u = coeff_ref * r^expo_ref` at `m`
    /// sample radii in `(0, 1]`; both sides evaluated through independent
    /// floating-point paths.
    pub fn substitution_residual(
        &self,
        p: f64,
        n: u32,
        coeff_ref: f64,
        expo_ref: f64,
        m: usize,
    ) -> f64 {
        let (coeff, expo) = self.p_laplacian_source(p, n);
        let mut worst: f64 = 0.0;
        for k in 1..=m {
            let r = k as f64 / m as f64;
            let lhs = coeff * r.powf(expo);
            let rhs = coeff_ref * r.powf(expo_ref);
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
        worst
    }
}

/// Oracle for `-Delta_p u = c r^{-s}` on the unit ball, `u(1) = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadialOracle {
    pub s: f64,
    pub c: f64,
    pub p: f64,
    pub n: u32,
    /// Gradient amplitude `(c/(n-s))^{1/(p-1)}`.
    pub amplitude: f64,
    /// Gradient Hölder exponent `(1-s)/(p-1)` (uncapped).
    pub beta: f64,
    pub profile: RadialProfile,
}

/// Build the oracle; the construction self-checks by substituting the
/// profile back into the radial operator at 100 radii (tolerance 1e-10).
pub fn radial_oracle(s: f64, c: f64, p: f64, n: u32) -> Result<RadialOracle> {
    let nf = n as f64;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    if !(s >= 0.0 && s < 2.0f64.min(nf)) {
        return Err(Error::InvalidParameter(format!(
            "source exponent must satisfy 0 <= s < min(2, n), got s = {s}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "source coefficient must be positive, got c = {c}"
        )));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "growth exponent must satisfy p > 1, got p = {p}"
        )));
    }
    let amplitude = (c / (nf - s)).powf(1.0 / (p - 1.0));
    let beta = (1.0 - s) / (p - 1.0);
    let profile = RadialProfile {
        offset: amplitude / (beta + 1.0),
        scale: -amplitude / (beta + 1.0),
        power: beta + 1.0,
    };
    let oracle = RadialOracle {
        s,
        c,
        p,
        n,
        amplitude,
        beta,
        profile,
    };
    let residual = profile.substitution_residual(p, n, c, -s, 100);
    if residual > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "radial oracle self-check failed: substitution residual {residual:.3e}"
        )));
    }
    Ok(oracle)
}

impl RadialOracle {
    pub fn u(&self, r: f64) -> f64 {
        self.profile.u(r)
    }

    /// `u'(r) = -amplitude * r^beta`.
    pub fn du(&self, r: f64) -> f64 {
        -self.amplitude * r.powf(self.beta)
    }

    /// Gradient vector at a point (radial direction times `u'`).
    pub fn gradient_at(&self, x: f64, y: f64) -> [f64; 2] {
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            // beta > 0 benchmarks have Du(0) = 0; beta <= 0 has no limit,
            // return zero and let callers exclude the origin node.
            return [0.0, 0.0];
        }
        let g = self.du(r) / r;
        [g * x, g * y]
    }

    pub fn source_at(&self, x: f64, y: f64) -> f64 {
        let r = (x * x + y * y).sqrt();
        self.c * r.powf(-self.s)
    }
}

/// `-Delta_p u` of a radial profile, computed by fourth-order numerical
/// differentiation of the flux `r^{n-1} |u'|^{p-2} u'`. Independent of the
/// power algebra in [`RadialProfile::p_laplacian_source`]; used to cross-check
/// it in tests.
pub fn radial_operator_fd(profile: &RadialProfile, p: f64, n: u32, r: f64) -> f64 {
    let nf = n as f64;
    let flux = |t: f64| -> f64 {
        let du = profile.du(t);
        t.powf(nf - 1.0) * du.abs().powf(p - 2.0) * du
    };
    let delta = 1e-4 * r;
    let d = (-flux(r + 2.0 * delta) + 8.0 * flux(r + delta) - 8.0 * flux(r - delta)
        + flux(r - 2.0 * delta))
        / (12.0 * delta);
    -d * r.powf(1.0 - nf)
}
