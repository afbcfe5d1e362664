use serde::{Deserialize, Serialize};

use super::{AxisLayout, SbpOperatorSet, Which};
use crate::error::{Error, Result};

/// Reference-cube axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Q,
    R,
    S,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Q, Axis::R, Axis::S];

    pub fn index(self) -> usize {
        match self {
            Axis::Q => 0,
            Axis::R => 1,
            Axis::S => 2,
        }
    }
}

/// Scalar field on an `(n_q+1) x (n_r+1) x (n_s+1)` grid, stored row-major
/// with `s` fastest: `index = (i * dims[1] + j) * dims[2] + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction3D {
    dims: [usize; 3],
    values: Vec<f64>,
}

impl GridFunction3D {
    pub fn new(dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.iter().product::<usize>() {
            return Err(Error::Dimension(format!("{} values for dims {dims:?}", values.len())));
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        Self { dims, values: vec![0.0; dims.iter().product()] }
    }

    /// Sample `f(q, r, s)` on the uniform reference grid of `[0, 1]^3`.
    pub fn from_fn(dims: [usize; 3], f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let coord = |i: usize, d: usize| if d > 1 { i as f64 / (d - 1) as f64 } else { 0.0 };
        let mut values = Vec::with_capacity(dims.iter().product());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    values.push(f(coord(i, dims[0]), coord(j, dims[1]), coord(k, dims[2])));
                }
            }
        }
        Self { dims, values }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }
}

/// Apply `D-` or `D+` along one axis without forming the tensor product.
pub fn apply_axis(ops: &SbpOperatorSet, which: Which, axis: Axis, f: &GridFunction3D) -> Result<GridFunction3D> {
    let dims = f.dims();
    let a = axis.index();
    if dims[a] != ops.nodes() {
        return Err(Error::Dimension(format!(
            "axis {axis:?} has {} nodes, operator expects {}",
            dims[a],
            ops.nodes()
        )));
    }
    let mut out = GridFunction3D::zeros(dims);
    ops.op(which).apply_layout(AxisLayout::new(dims, a), f.values(), out.values_mut(), false);
    Ok(out)
}
