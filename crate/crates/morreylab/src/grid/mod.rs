//! Lattice discretization of a bounded planar domain.
//!
//! The domain is represented by a regular lattice with spacing `h` and a
//! per-node mask (interior / boundary / exterior). Balls and averages, which
//! the estimators need in large numbers, reduce to cheap index scans on the
//! lattice. The dimension is fixed at `n = 2` in this version; formulas keep
//! `n` symbolic where it appears.

mod calculus;
mod field;
mod io;
mod quadrature;

pub use calculus::{ball_average, ball_average_vector, gradient, integrate, integrate_vector};
pub use field::{ScalarField, VectorField};
pub use io::{read_field_csv, write_field_csv};
pub use quadrature::singular_cell_integral;

use crate::{Error, Result};
use std::sync::Arc;

/// Shape of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum DomainKind {
    /// Disk of radius 1 centered at the origin.
    UnitDisk,
    /// Square `[0, 1]^2`.
    UnitSquare,
    /// Annulus centered at the origin with the given inner radius and outer
    /// radius 1.
    Annulus { inner: f64 },
}

impl DomainKind {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            DomainKind::UnitDisk => x * x + y * y <= 1.0,
            DomainKind::UnitSquare => (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y),
            DomainKind::Annulus { inner } => {
                let r2 = x * x + y * y;
                r2 >= inner * inner && r2 <= 1.0
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainKind::UnitDisk | DomainKind::Annulus { .. } => 2.0,
            DomainKind::UnitSquare => std::f64::consts::SQRT_2,
        }
    }

    /// Distance from an interior point to the domain boundary.
    pub fn boundary_distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            DomainKind::UnitDisk => 1.0 - (x * x + y * y).sqrt(),
            DomainKind::UnitSquare => {
                let dx = x.min(1.0 - x);
                let dy = y.min(1.0 - y);
                dx.min(dy)
            }
            DomainKind::Annulus { inner } => {
                let r = (x * x + y * y).sqrt();
                (1.0 - r).min(r - inner)
            }
        }
    }
}

/// Classification of a lattice node relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeFlag {
    Interior,
    Boundary,
    Exterior,
}

impl NodeFlag {
    /// Integer code used in the CSV node table: 0 interior, 1 boundary,
    /// 2 exterior.
    pub fn code(self) -> u8 {
        match self {
            NodeFlag::Interior => 0,
            NodeFlag::Boundary => 1,
            NodeFlag::Exterior => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(NodeFlag::Interior),
            1 => Ok(NodeFlag::Boundary),
            2 => Ok(NodeFlag::Exterior),
            other => Err(Error::Parse(format!("unknown node flag code {other}"))),
        }
    }
}

/// A ball used for averages, norms, and replacement subproblems.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Integration region: the whole domain or its intersection with a ball.
#[derive(Debug, Clone, Copy)]
pub enum Region {
    Whole,
    Ball(Ball),
}

impl From<Ball> for Region {
    fn from(b: Ball) -> Self {
        Region::Ball(b)
    }
}

/// Regular lattice with an interior/boundary/exterior mask.
///
/// Node `(i, j)` sits at `origin + (i, j) * h`; nodes are stored row-major
/// (`idx = j * nx + i`). Interior nodes have all four axis neighbors inside
/// the domain; boundary nodes are inside the domain with at least one inside
/// neighbor along each axis (nodes without such support are reclassified as
/// exterior so one-sided difference stencils always have data).
#[derive(Debug)]
pub struct Grid {
    n: usize,
    h: f64,
    nx: usize,
    ny: usize,
    origin: [f64; 2],
    domain: DomainKind,
    flags: Vec<NodeFlag>,
    diameter: f64,
    interior_count: usize,
}

impl Grid {
    /// Build the lattice for a domain at spacing `h`.
    ///
    /// The lattice is aligned so that for the disk and annulus the origin is
    /// a node (benchmark sources are singular there), and for the unit square
    /// the corners are nodes.
    pub fn new(domain: DomainKind, h: f64) -> Result<Arc<Self>> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if let DomainKind::Annulus { inner } = domain {
            if !(inner > 0.0 && inner < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "annulus inner radius must lie in (0, 1), got {inner}"
                )));
            }
        }
        let (origin, nx, ny) = match domain {
            DomainKind::UnitDisk | DomainKind::Annulus { .. } => {
                let half = (1.0 / h).ceil() as usize;
                ([-(half as f64) * h, -(half as f64) * h], 2 * half + 1, 2 * half + 1)
            }
            DomainKind::UnitSquare => {
                let steps = (1.0 / h).round() as usize;
                ([0.0, 0.0], steps + 1, steps + 1)
            }
        };
        if nx < 5 || ny < 5 {
            return Err(Error::InvalidParameter(format!(
                "grid spacing {h} leaves fewer than 5 nodes per axis"
            )));
        }

        let mut flags = vec![NodeFlag::Exterior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let x = origin[0] + i as f64 * h;
                let y = origin[1] + j as f64 * h;
                if domain.contains(x, y) {
                    flags[j * nx + i] = NodeFlag::Boundary; // provisional: inside
                }
            }
        }

        // Iterate the classification until stable. Interior nodes need all
        // eight surrounding nodes non-exterior, so the four lattice cells
        // around every interior node are complete (this keeps the assembled
        // interior stencil exact; diagonally exposed nodes join the Dirichlet
        // band instead). Boundary nodes need at least one non-exterior
        // neighbor along each axis, otherwise no difference stencil exists
        // there and the node is dropped.
        loop {
            let mut changed = false;
            let mut next = flags.clone();
            for j in 0..ny {
                for i in 0..nx {
                    let idx = j * nx + i;
                    if flags[idx] == NodeFlag::Exterior {
                        continue;
                    }
                    let active = |ii: isize, jj: isize| -> bool {
                        ii >= 0
                            && jj >= 0
                            && (ii as usize) < nx
                            && (jj as usize) < ny
                            && flags[jj as usize * nx + ii as usize] != NodeFlag::Exterior
                    };
                    let (i, j) = (i as isize, j as isize);
                    let e = active(i + 1, j);
                    let w = active(i - 1, j);
                    let nn = active(i, j + 1);
                    let s = active(i, j - 1);
                    let ring = e
                        && w
                        && nn
                        && s
                        && active(i + 1, j + 1)
                        && active(i + 1, j - 1)
                        && active(i - 1, j + 1)
                        && active(i - 1, j - 1);
                    let new_flag = if ring {
                        NodeFlag::Interior
                    } else if (e || w) && (nn || s) {
                        NodeFlag::Boundary
                    } else {
                        NodeFlag::Exterior
                    };
                    if new_flag != flags[idx] {
                        changed = true;
                    }
                    next[idx] = new_flag;
                }
            }
            flags = next;
            if !changed {
                break;
            }
        }

        let interior_count = flags.iter().filter(|f| **f == NodeFlag::Interior).count();
        if interior_count == 0 {
            return Err(Error::InvalidParameter(
                "grid has no interior nodes; spacing too coarse for the domain".into(),
            ));
        }

        Ok(Arc::new(Grid {
            n: 2,
            h,
            nx,
            ny,
            origin,
            domain,
            flags,
            diameter: domain.diameter(),
            interior_count,
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn interior_count(&self) -> usize {
        self.interior_count
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.coords(idx);
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
        ]
    }

    #[inline]
    pub fn flag(&self, idx: usize) -> NodeFlag {
        self.flags[idx]
    }

    /// Non-exterior: the node carries field data.
    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.flags[idx] != NodeFlag::Exterior
    }

    #[inline]
    pub fn active_at(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nx
            && (j as usize) < self.ny
            && self.flags[j as usize * self.nx + i as usize] != NodeFlag::Exterior
    }

    /// Indices of active nodes inside the closed ball (deterministic order).
    pub fn nodes_in_ball(&self, ball: &Ball) -> Vec<usize> {
        let mut out = Vec::new();
        let i_lo = (((ball.center[0] - ball.radius) - self.origin[0]) / self.h).floor() as isize;
        let i_hi = (((ball.center[0] + ball.radius) - self.origin[0]) / self.h).ceil() as isize;
        let j_lo = (((ball.center[1] - ball.radius) - self.origin[1]) / self.h).floor() as isize;
        let j_hi = (((ball.center[1] + ball.radius) - self.origin[1]) / self.h).ceil() as isize;
        let r2 = ball.radius * ball.radius;
        for j in j_lo.max(0)..=j_hi.min(self.ny as isize - 1) {
            for i in i_lo.max(0)..=i_hi.min(self.nx as isize - 1) {
                let idx = j as usize * self.nx + i as usize;
                if self.flags[idx] == NodeFlag::Exterior {
                    continue;
                }
                let p = self.position(idx);
                let dx = p[0] - ball.center[0];
                let dy = p[1] - ball.center[1];
                if dx * dx + dy * dy <= r2 {
                    out.push(idx);
                }
            }
        }
        out
    }

    /// Indices of all active nodes (deterministic order).
    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&idx| self.is_active(idx))
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&idx| self.flags[idx] == NodeFlag::Interior)
    }

    /// Whether the closed ball lies inside the domain (geometric test).
    pub fn contains_ball(&self, ball: &Ball) -> bool {
        let [cx, cy] = ball.center;
        self.domain.contains(cx, cy)
            && self.domain.boundary_distance(cx, cy) >= ball.radius
    }

    /// Nearest lattice node to a point.
    pub fn nearest_node(&self, x: f64, y: f64) -> usize {
        let i = (((x - self.origin[0]) / self.h).round() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let j = (((y - self.origin[1]) / self.h).round() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        self.index(i, j)
    }

    /// Fingerprint used to detect mismatched grids between fields.
    pub(crate) fn same_layout(&self, other: &Grid) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.h == other.h
            && self.origin == other.origin
            && self.domain == other.domain
    }
}
