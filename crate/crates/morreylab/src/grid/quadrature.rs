//! Quadrature for integrable point singularities.
//!
//! The midpoint rule diverges too slowly when the integrand blows up at a
//! lattice node. The cell owning the singularity is instead integrated in
//! polar coordinates around the singular point: the radial weight `r dr`
//! tames kernels `r^{-s}` with `s <= 1` (the Stummel kernel and the benchmark
//! sources), and the midpoint rule in `r` is then exact or near-exact.

/// Angular subdivisions of the singular cell.
const SECTORS: usize = 64;
/// Radial subdivisions per ray.
const RINGS: usize = 8;

/// Integral of `f` over the square cell of side `h` centered at `center`,
/// where `f` may blow up at the center itself.
///
/// The cell is swept by `SECTORS` angular midpoints; along each ray the
/// radial extent runs to the cell edge and is subdivided into `RINGS`
/// midpoint intervals, so `f` is never evaluated at the singular point.
pub fn singular_cell_integral(center: [f64; 2], h: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let dtheta = 2.0 * std::f64::consts::PI / SECTORS as f64;
    let mut total = 0.0;
    for k in 0..SECTORS {
        let theta = (k as f64 + 0.5) * dtheta;
        let (sin_t, cos_t) = theta.sin_cos();
        // distance from the center to the cell edge along this ray
        let reach = 0.5 * h / cos_t.abs().max(sin_t.abs());
        let dr = reach / RINGS as f64;
        let mut ray = 0.0;
        for m in 0..RINGS {
            let r = (m as f64 + 0.5) * dr;
            ray += r * f(center[0] + r * cos_t, center[1] + r * sin_t);
        }
        total += ray * dr * dtheta;
    }
    total
}

/// Average of `f` over the singular cell; used to replace the nodal sample at
/// a singular node so plain midpoint sums stay consistent with the integral.
pub(crate) fn singular_cell_average(
    center: [f64; 2],
    h: f64,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    singular_cell_integral(center, h, f) / (h * h)
}
