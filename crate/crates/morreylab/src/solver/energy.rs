//! Discrete p-Dirichlet energy on the triangulated lattice.
//!
//! Each lattice cell with all four corners active splits into two triangles
//! along its NE diagonal. Gradients are constant per triangle; for `p = 2`
//! the assembled stiffness reduces to the classical five-point stencil, so
//! quadratic solutions are reproduced exactly. Both triangle orientations
//! share one algebraic form: with vertex triple `(a, b, c)` the derivative
//! pair is `d1 = (u_b - u_a)/h`, `d2 = (u_c - u_b)/h` and
//! `|grad u|^2 = d1^2 + d2^2`.

use crate::grid::Grid;

/// Triangle list over active cells plus the free-node indexing used by the
/// minimizer.
pub(crate) struct EnergyWorkspace {
    /// Vertex triples `(a, b, c)`; the derivative pair of the triple is the
    /// per-triangle gradient in some orthonormal frame.
    pub tris: Vec<[u32; 3]>,
    pub h: f64,
    /// Triangle area `h^2 / 2`.
    pub area: f64,
    /// 1-based position in the free vector, 0 for frozen nodes.
    pub free_index: Vec<u32>,
    pub free_nodes: Vec<u32>,
}

impl EnergyWorkspace {
    /// `free`: nodes the minimizer may move. Triangles need all vertices
    /// active; triangles with no free vertex contribute constants and are
    /// dropped.
    pub fn new(grid: &Grid, free: impl Fn(usize) -> bool) -> Self {
        let (nx, ny) = grid.shape();
        let mut free_index = vec![0u32; grid.node_count()];
        let mut free_nodes = Vec::new();
        for idx in 0..grid.node_count() {
            if grid.is_active(idx) && free(idx) {
                free_nodes.push(idx as u32);
                free_index[idx] = free_nodes.len() as u32;
            }
        }
        let mut tris = Vec::new();
        let mut push_if_relevant = |t: [usize; 3]| {
            if t.iter().any(|&v| free_index[v] != 0) {
                tris.push([t[0] as u32, t[1] as u32, t[2] as u32]);
            }
        };
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let v00 = grid.index(i, j);
                let v10 = grid.index(i + 1, j);
                let v01 = grid.index(i, j + 1);
                let v11 = grid.index(i + 1, j + 1);
                if [v00, v10, v01, v11].iter().all(|&v| grid.is_active(v)) {
                    // lower triangle: d1 along x, d2 along y
                    push_if_relevant([v00, v10, v11]);
                    // upper triangle: d1 along y, d2 along x
                    push_if_relevant([v00, v01, v11]);
                }
            }
        }
        EnergyWorkspace {
            tris,
            h: grid.spacing(),
            area: 0.5 * grid.spacing() * grid.spacing(),
            free_index,
            free_nodes,
        }
    }

    pub fn free_count(&self) -> usize {
        self.free_nodes.len()
    }

    #[inline]
    fn derivative_pair(&self, u: &[f64], t: &[u32; 3]) -> (f64, f64) {
        let d1 = (u[t[1] as usize] - u[t[0] as usize]) / self.h;
        let d2 = (u[t[2] as usize] - u[t[1] as usize]) / self.h;
        (d1, d2)
    }

    /// Regularized p-Dirichlet part: `sum area/p (kappa^2 + |grad u|^2)^{p/2}`
    /// over the listed triangles.
    pub fn dirichlet_energy(&self, u: &[f64], p: f64, kappa: f64) -> f64 {
        let k2 = kappa * kappa;
        let mut acc = 0.0;
        for t in &self.tris {
            let (d1, d2) = self.derivative_pair(u, t);
            acc += (k2 + d1 * d1 + d2 * d2).powf(0.5 * p);
        }
        acc * self.area / p
    }

    /// Full energy `J(u) = dirichlet - sum b_i u_i` with `b` the lumped
    /// source over free nodes.
    pub fn energy(&self, u: &[f64], b: &[f64], p: f64, kappa: f64) -> f64 {
        let mut src = 0.0;
        for (k, &node) in self.free_nodes.iter().enumerate() {
            src += b[k] * u[node as usize];
        }
        self.dirichlet_energy(u, p, kappa) - src
    }

    /// Gradient of `J` with respect to the free nodal values.
    pub fn gradient(&self, u: &[f64], b: &[f64], p: f64, kappa: f64, out: &mut [f64]) {
        let k2 = kappa * kappa;
        out.fill(0.0);
        let inv_h = 1.0 / self.h;
        for t in &self.tris {
            let (d1, d2) = self.derivative_pair(u, t);
            let q = k2 + d1 * d1 + d2 * d2;
            if q == 0.0 {
                continue;
            }
            let w = q.powf(0.5 * p - 1.0) * self.area * inv_h;
            let (a, bb, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let fa = self.free_index[a];
            if fa != 0 {
                out[(fa - 1) as usize] -= w * d1;
            }
            let fb = self.free_index[bb];
            if fb != 0 {
                out[(fb - 1) as usize] += w * (d1 - d2);
            }
            let fc = self.free_index[c];
            if fc != 0 {
                out[(fc - 1) as usize] += w * d2;
            }
        }
        for k in 0..out.len() {
            out[k] -= b[k];
        }
    }

    /// Per-triangle weights `(kappa^2 + |grad u|^2)^{(p-2)/2}` for the
    /// linearized (lagged-diffusivity) operator, floored for SPD-ness.
    pub fn weights(&self, u: &[f64], p: f64, kappa: f64, out: &mut Vec<f64>) {
        let k2 = kappa * kappa;
        out.clear();
        out.reserve(self.tris.len());
        let mut w_max = 0.0f64;
        for t in &self.tris {
            let (d1, d2) = self.derivative_pair(u, t);
            let q = k2 + d1 * d1 + d2 * d2;
            let w = if q == 0.0 { 0.0 } else { q.powf(0.5 * p - 1.0) };
            w_max = w_max.max(w);
            out.push(w);
        }
        let floor = if w_max > 0.0 { 1e-12 * w_max } else { 1.0 };
        for w in out.iter_mut() {
            if *w < floor {
                *w = floor;
            }
        }
    }

    /// Matrix-vector product of the weighted stiffness on the free vector.
    /// `x` and `y` are indexed by free position; frozen nodes act as zeros.
    pub fn weighted_matvec(&self, weights: &[f64], x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        let scale = self.area / (self.h * self.h);
        for (ti, t) in self.tris.iter().enumerate() {
            let (a, b, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let (fa, fb, fc) = (self.free_index[a], self.free_index[b], self.free_index[c]);
            let xa = if fa != 0 { x[(fa - 1) as usize] } else { 0.0 };
            let xb = if fb != 0 { x[(fb - 1) as usize] } else { 0.0 };
            let xc = if fc != 0 { x[(fc - 1) as usize] } else { 0.0 };
            let e1 = xb - xa;
            let e2 = xc - xb;
            let w = weights[ti] * scale;
            if fa != 0 {
                y[(fa - 1) as usize] -= w * e1;
            }
            if fb != 0 {
                y[(fb - 1) as usize] += w * (e1 - e2);
            }
            if fc != 0 {
                y[(fc - 1) as usize] += w * e2;
            }
        }
    }

    /// Diagonal of the weighted stiffness (Jacobi preconditioner).
    pub fn weighted_diagonal(&self, weights: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let scale = self.area / (self.h * self.h);
        for (ti, t) in self.tris.iter().enumerate() {
            let w = weights[ti] * scale;
            let (fa, fb, fc) = (
                self.free_index[t[0] as usize],
                self.free_index[t[1] as usize],
                self.free_index[t[2] as usize],
            );
            if fa != 0 {
                out[(fa - 1) as usize] += w;
            }
            if fb != 0 {
                out[(fb - 1) as usize] += 2.0 * w;
            }
            if fc != 0 {
                out[(fc - 1) as usize] += w;
            }
        }
    }

    /// Flux pairing `integral |grad u|^{p-2} grad u . grad phi` over the
    /// triangles (unregularized flux).
    pub fn flux_pairing(&self, u: &[f64], phi: &[f64], p: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.tris {
            let (d1, d2) = self.derivative_pair(u, t);
            let q = d1 * d1 + d2 * d2;
            if q == 0.0 {
                continue;
            }
            let (e1, e2) = self.derivative_pair(phi, t);
            acc += q.powf(0.5 * p - 1.0) * (d1 * e1 + d2 * e2);
        }
        acc * self.area
    }

    /// `integral |grad phi|^p` over the triangles.
    pub fn gradient_p_norm_pow(&self, phi: &[f64], p: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.tris {
            let (d1, d2) = self.derivative_pair(phi, t);
            acc += (d1 * d1 + d2 * d2).powf(0.5 * p);
        }
        acc * self.area
    }
}

/// Jacobi-preconditioned conjugate gradients for the weighted stiffness.
/// Returns the iteration count; `x` holds the solution.
pub(crate) fn solve_cg(
    ws: &EnergyWorkspace,
    weights: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> usize {
    let m = rhs.len();
    let mut diag = vec![0.0; m];
    ws.weighted_diagonal(weights, &mut diag);
    for d in diag.iter_mut() {
        if *d <= 0.0 {
            *d = 1.0;
        }
    }
    x.fill(0.0);
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut pdir = z.clone();
    let mut ap = vec![0.0; m];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rhs_norm == 0.0 {
        return 0;
    }
    let target = rel_tol * rhs_norm;
    for it in 0..max_iter {
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn <= target {
            return it;
        }
        ws.weighted_matvec(weights, &pdir, &mut ap);
        let pap: f64 = pdir.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return it; // numerically semi-definite; direction exhausted
        }
        let alpha = rz / pap;
        for k in 0..m {
            x[k] += alpha * pdir[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            pdir[k] = z[k] + beta * pdir[k];
        }
    }
    max_iter
}
