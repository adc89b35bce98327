//! Sampled scalar and vector fields on a grid.

use super::quadrature::singular_cell_average;
use super::{Grid, NodeFlag};
use crate::{Error, Result};
use std::sync::Arc;

/// Real-valued samples, one per lattice node.
///
/// A field may carry one `singular_node`: a node where the analytic formula
/// blows up. At that node the stored value is the average of the formula over
/// the node's cell (computed by the polar subcell rule), so plain midpoint
/// sums remain consistent with the integral of the formula.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    singular_node: Option<usize>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.node_count()],
            singular_node: None,
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![c; grid.node_count()],
            singular_node: None,
        }
    }

    /// Sample a smooth formula at every node.
    pub fn sample(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|idx| {
                let p = grid.position(idx);
                f(p[0], p[1])
            })
            .collect();
        ScalarField {
            grid: Arc::clone(grid),
            values,
            singular_node: None,
        }
    }

    /// Sample a formula that blows up at `singular_at`; the nearest node gets
    /// the cell average of the formula instead of the (infinite) point value.
    pub fn sample_singular(
        grid: &Arc<Grid>,
        f: impl Fn(f64, f64) -> f64,
        singular_at: [f64; 2],
    ) -> Self {
        let node = grid.nearest_node(singular_at[0], singular_at[1]);
        let mut field = Self::sample(grid, &f);
        let center = grid.position(node);
        field.values[node] = singular_cell_average(center, grid.spacing(), &f);
        field.singular_node = Some(node);
        field
    }

    /// Sample a formula on boundary-flagged nodes only; interior and
    /// exterior nodes get zero. Used for Dirichlet data (the boundary field
    /// doubles as the solver's initial iterate).
    pub fn sample_boundary(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|idx| {
                if grid.flag(idx) == NodeFlag::Boundary {
                    let p = grid.position(idx);
                    f(p[0], p[1])
                } else {
                    0.0
                }
            })
            .collect();
        ScalarField {
            grid: Arc::clone(grid),
            values,
            singular_node: None,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "value vector length {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
            singular_node: None,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn singular_node(&self) -> Option<usize> {
        self.singular_node
    }

    pub fn set_singular_node(&mut self, node: Option<usize>) {
        self.singular_node = node;
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// All active nodes carry finite values (the singular node included,
    /// since it stores a cell average).
    pub fn check_finite(&self) -> Result<()> {
        for idx in 0..self.values.len() {
            if self.grid.is_active(idx) && !self.values[idx].is_finite() {
                let p = self.grid.position(idx);
                return Err(Error::NonFinite(format!(
                    "field value at node ({:.4}, {:.4})",
                    p[0], p[1]
                )));
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
            singular_node: self.singular_node,
        }
    }
}

/// Vector-valued samples (one `n`-vector per node, `n = 2`).
#[derive(Debug, Clone)]
pub struct VectorField {
    grid: Arc<Grid>,
    values: Vec<[f64; 2]>,
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            grid: Arc::clone(grid),
            values: vec![[0.0; 2]; grid.node_count()],
        }
    }

    pub fn sample(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let values = (0..grid.node_count())
            .map(|idx| {
                let p = grid.position(idx);
                f(p[0], p[1])
            })
            .collect();
        VectorField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "value vector length {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(VectorField {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [[f64; 2]] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, idx: usize) -> [f64; 2] {
        self.values[idx]
    }

    pub fn check_finite_interior(&self) -> Result<()> {
        for idx in 0..self.values.len() {
            if self.grid.flag(idx) == NodeFlag::Interior
                && !(self.values[idx][0].is_finite() && self.values[idx][1].is_finite())
            {
                let p = self.grid.position(idx);
                return Err(Error::NonFinite(format!(
                    "vector value at node ({:.4}, {:.4})",
                    p[0], p[1]
                )));
            }
        }
        Ok(())
    }
}
