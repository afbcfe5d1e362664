//! Curvilinear blocks: coordinates, metric terms, Jacobians and face frames.
//!
//! A block maps the reference cube `(q, r, s) ∈ [0, 1]³` to physical space.
//! Node `(i, j, k)` sits at `(i/n_q, j/n_r, k/n_s)` and is stored at
//! `(i * (n_r + 1) + j) * (n_s + 1) + k`. Lengths are in km.
//!
//! In a two-block setup the fault is the `q = 1` face of the minus block and
//! the `q = 0` face of the plus block. Face normals are `∇ξ / |∇ξ|`, so on the
//! fault both sides share the normal pointing from minus into plus.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sbp::{Axis, AxisLayout, Family, SbpOperatorSet};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

/// Interface surface `x = offset + slope * depth * r + bump * sin(πr) sin(πs)`
/// shared by both blocks of a two-block mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceShape {
    pub offset: f64,
    pub slope: f64,
    #[serde(default)]
    pub bump: f64,
}

/// Named analytic mappings from the reference cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Mapping {
    Identity,
    Box {
        lower: Vec3,
        upper: Vec3,
    },
    /// `x = origin + A (q, r, s)` with `matrix[i][j] = ∂x_i/∂ξ_j`.
    Affine {
        origin: Vec3,
        matrix: Mat3,
    },
    /// `x = q + amplitude * sin(πr)`, `y = r`, `z = s`.
    Sinusoidal {
        amplitude: f64,
    },
    /// One side of a block pair split by [`InterfaceShape`]; the outer wall
    /// sits at `x = ∓outer`, depth runs over `y ∈ [0, depth]` and strike over
    /// `z ∈ [-half_width, half_width]`.
    TwoBlock {
        side: Side,
        outer: f64,
        depth: f64,
        half_width: f64,
        interface: InterfaceShape,
    },
}

impl Mapping {
    /// Block of a 60-degree-style dipping fault: interface `x = x0 + y cot(dip)`.
    pub fn dipping(side: Side, outer: f64, depth: f64, half_width: f64, x0: f64, dip_degrees: f64) -> Self {
        let slope = 1.0 / dip_degrees.to_radians().tan();
        Mapping::TwoBlock { side, outer, depth, half_width, interface: InterfaceShape { offset: x0, slope, bump: 0.0 } }
    }

    /// Physical position and `∂x_i/∂ξ_j` at a reference point.
    pub fn eval(&self, xi: Vec3) -> (Vec3, Mat3) {
        let [q, r, s] = xi;
        match self {
            Mapping::Identity => (xi, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            Mapping::Box { lower, upper } => {
                let mut x = [0.0; 3];
                let mut a = [[0.0; 3]; 3];
                for d in 0..3 {
                    a[d][d] = upper[d] - lower[d];
                    x[d] = lower[d] + a[d][d] * xi[d];
                }
                (x, a)
            }
            Mapping::Affine { origin, matrix } => {
                let mut x = *origin;
                for (i, xi_row) in x.iter_mut().enumerate() {
                    for j in 0..3 {
                        *xi_row += matrix[i][j] * xi[j];
                    }
                }
                (x, *matrix)
            }
            Mapping::Sinusoidal { amplitude } => {
                let x = [q + amplitude * (PI * r).sin(), r, s];
                let a = [[1.0, amplitude * PI * (PI * r).cos(), 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
                (x, a)
            }
            Mapping::TwoBlock { side, outer, depth, half_width, interface } => {
                let xf = interface.offset
                    + interface.slope * depth * r
                    + interface.bump * (PI * r).sin() * (PI * s).sin();
                let xf_r = interface.slope * depth + interface.bump * PI * (PI * r).cos() * (PI * s).sin();
                let xf_s = interface.bump * PI * (PI * r).sin() * (PI * s).cos();
                let (x, xq, weight) = match side {
                    Side::Minus => (-outer + q * (xf + outer), xf + outer, q),
                    Side::Plus => (xf + q * (outer - xf), outer - xf, 1.0 - q),
                };
                let pos = [x, depth * r, half_width * (2.0 * s - 1.0)];
                let a = [[xq, weight * xf_r, weight * xf_s], [0.0, *depth, 0.0], [0.0, 0.0, 2.0 * half_width]];
                (pos, a)
            }
        }
    }
}

/// How metric terms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricMethod {
    #[default]
    Analytic,
    /// Coordinate derivatives by traditional central SBP operators (order 6
    /// where the grid allows, falling back to 4 and 2 on very small grids).
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvilinearBlock {
    dims: [usize; 3],
    coords: [Vec<f64>; 3],
    /// `metrics[j][i][node] = ∂ξ_j/∂x_i`.
    metrics: [[Vec<f64>; 3]; 3],
    jacobian: Vec<f64>,
}

fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// `(J, inverse)` with `inverse[j][i] = ∂ξ_j/∂x_i`.
fn invert(a: &Mat3) -> (f64, Mat3) {
    let jac = det3(a);
    let mut inv = [[0.0; 3]; 3];
    for (j, row) in inv.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            // cofactor of a[i][j]
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            *v = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / jac;
        }
    }
    (jac, inv)
}

fn reference_coord(i: usize, n: usize) -> f64 {
    i as f64 / n as f64
}

fn metric_operator(n: usize) -> Result<SbpOperatorSet> {
    for order in [6, 4, 2] {
        if n >= SbpOperatorSet::min_intervals(Family::Traditional, order) {
            return SbpOperatorSet::build_traditional(order, n);
        }
    }
    Err(Error::GridTooSmall { needed: SbpOperatorSet::min_intervals(Family::Traditional, 2) + 1, got: n + 1 })
}

impl CurvilinearBlock {
    /// Sample `map` on a grid with `dims = [n_q + 1, n_r + 1, n_s + 1]` nodes.
    pub fn build(map: &Mapping, dims: [usize; 3], method: MetricMethod) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!("block needs at least 2 nodes per axis, got {dims:?}")));
        }
        let total: usize = dims.iter().product();
        let mut coords = [vec![0.0; total], vec![0.0; total], vec![0.0; total]];
        let mut partials: Vec<Mat3> = Vec::with_capacity(total);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let xi = [
                        reference_coord(i, dims[0] - 1),
                        reference_coord(j, dims[1] - 1),
                        reference_coord(k, dims[2] - 1),
                    ];
                    let (x, a) = map.eval(xi);
                    let idx = (i * dims[1] + j) * dims[2] + k;
                    for d in 0..3 {
                        coords[d][idx] = x[d];
                    }
                    partials.push(a);
                }
            }
        }
        if method == MetricMethod::Discrete {
            let mut deriv = vec![0.0; total];
            for axis in 0..3 {
                let ops = metric_operator(dims[axis] - 1)?;
                let layout = AxisLayout::new(dims, axis);
                for comp in 0..3 {
                    ops.plus().apply_layout(layout, &coords[comp], &mut deriv, false);
                    for (p, d) in partials.iter_mut().zip(&deriv) {
                        p[comp][axis] = *d;
                    }
                }
            }
        }
        Self::from_partials(dims, coords, &partials)
    }

    fn from_partials(dims: [usize; 3], coords: [Vec<f64>; 3], partials: &[Mat3]) -> Result<Self> {
        let total = partials.len();
        let mut metrics: [[Vec<f64>; 3]; 3] = Default::default();
        for row in metrics.iter_mut() {
            for m in row.iter_mut() {
                *m = vec![0.0; total];
            }
        }
        let mut jacobian = vec![0.0; total];
        for (idx, a) in partials.iter().enumerate() {
            let (jac, inv) = invert(a);
            if !(jac > 0.0) {
                let (i, rem) = (idx / (dims[1] * dims[2]), idx % (dims[1] * dims[2]));
                return Err(Error::FoldedMesh { i, j: rem / dims[2], k: rem % dims[2], jacobian: jac });
            }
            jacobian[idx] = jac;
            for j in 0..3 {
                for i in 0..3 {
                    metrics[j][i][idx] = inv[j][i];
                }
            }
        }
        Ok(Self { dims, coords, metrics, jacobian })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.jacobian.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jacobian.is_empty()
    }

    /// Reference spacings `1/n_ξ`.
    pub fn spacing(&self) -> Vec3 {
        [
            1.0 / (self.dims[0] - 1) as f64,
            1.0 / (self.dims[1] - 1) as f64,
            1.0 / (self.dims[2] - 1) as f64,
        ]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coord(&self, component: usize) -> &[f64] {
        &self.coords[component]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        [self.coords[0][idx], self.coords[1][idx], self.coords[2][idx]]
    }

    /// `∂ξ/∂x_i` for `ξ = axis`, all nodes.
    pub fn metric(&self, axis: Axis, component: usize) -> &[f64] {
        &self.metrics[axis.index()][component]
    }

    /// `∇ξ` at one node.
    pub fn gradient(&self, axis: Axis, idx: usize) -> Vec3 {
        let m = &self.metrics[axis.index()];
        [m[0][idx], m[1][idx], m[2][idx]]
    }

    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    /// Discrete free-stream residual `max_i |Σ_ξ D(J ∂ξ/∂x_i)|` using `ops`
    /// along every axis (the same operator size is required on each axis).
    pub fn free_stream_residual(&self, ops: &[&SbpOperatorSet; 3], interior_only: bool) -> f64 {
        let total = self.len();
        let mut worst: f64 = 0.0;
        let mut sum = vec![0.0; total];
        let mut weighted = vec![0.0; total];
        for comp in 0..3 {
            sum.iter_mut().for_each(|v| *v = 0.0);
            for axis in Axis::ALL {
                let a = axis.index();
                for (w, (m, j)) in weighted.iter_mut().zip(self.metrics[a][comp].iter().zip(&self.jacobian)) {
                    *w = m * j;
                }
                ops[a].plus().apply_layout(AxisLayout::new(self.dims, a), &weighted, &mut sum, true);
            }
            for i in 0..self.dims[0] {
                for j in 0..self.dims[1] {
                    for k in 0..self.dims[2] {
                        if interior_only {
                            let inside = [(i, 0), (j, 1), (k, 2)].iter().all(|&(c, a)| {
                                let op = ops[a].plus();
                                c >= op.left_rows().len() && c < self.dims[a] - op.right_rows().len()
                            });
                            if !inside {
                                continue;
                            }
                        }
                        worst = worst.max(sum[self.index(i, j, k)].abs());
                    }
                }
            }
        }
        worst
    }

    /// CSV with header `i,j,k,x,y,z,J`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,j,k,x,y,z,J")?;
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                for k in 0..self.dims[2] {
                    let idx = self.index(i, j, k);
                    writeln!(
                        out,
                        "{i},{j},{k},{:.12e},{:.12e},{:.12e},{:.12e}",
                        self.coords[0][idx], self.coords[1][idx], self.coords[2][idx], self.jacobian[idx]
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// A boundary face of a block: `ξ = 0` (`high = false`) or `ξ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub axis: Axis,
    pub high: bool,
}

impl Face {
    pub const Q_LOW: Face = Face { axis: Axis::Q, high: false };
    pub const Q_HIGH: Face = Face { axis: Axis::Q, high: true };

    pub fn all() -> [Face; 6] {
        let mut out = [Face::Q_LOW; 6];
        for (n, axis) in Axis::ALL.into_iter().enumerate() {
            out[2 * n] = Face { axis, high: false };
            out[2 * n + 1] = Face { axis, high: true };
        }
        out
    }

    /// The two tangential axes, in storage order.
    pub fn tangential(self) -> [usize; 2] {
        match self.axis {
            Axis::Q => [1, 2],
            Axis::R => [0, 2],
            Axis::S => [0, 1],
        }
    }

    /// Volume indices of the face nodes, row-major in the tangential axes.
    pub fn node_indices(self, dims: [usize; 3]) -> Vec<usize> {
        let a = self.axis.index();
        let fixed = if self.high { dims[a] - 1 } else { 0 };
        let [t0, t1] = self.tangential();
        let mut out = Vec::with_capacity(dims[t0] * dims[t1]);
        for u in 0..dims[t0] {
            for w in 0..dims[t1] {
                let mut ijk = [0; 3];
                ijk[a] = fixed;
                ijk[t0] = u;
                ijk[t1] = w;
                out.push((ijk[0] * dims[1] + ijk[1]) * dims[2] + ijk[2]);
            }
        }
        out
    }
}

/// Per face node orthonormal frame `R = (nᵀ; mᵀ; lᵀ)` and surface scale `J |∇ξ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFrame {
    pub face: Face,
    pub dims: [usize; 2],
    pub nodes: Vec<usize>,
    pub rotation: Vec<Mat3>,
    pub surface_scale: Vec<f64>,
}

/// Default tangential reference: the dip direction of the benchmark geometry.
pub const DEFAULT_M0: Vec3 = [0.0, 1.0, 0.0];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

impl FaceFrame {
    pub fn normal(&self, node: usize) -> Vec3 {
        self.rotation[node][0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn face_frame(block: &CurvilinearBlock, face: Face, m0: Vec3) -> Result<FaceFrame> {
    let nodes = face.node_indices(block.dims());
    let [t0, t1] = face.tangential();
    let mut rotation = Vec::with_capacity(nodes.len());
    let mut surface_scale = Vec::with_capacity(nodes.len());
    for (local, &idx) in nodes.iter().enumerate() {
        let grad = block.gradient(face.axis, idx);
        let g = norm(grad);
        let n = [grad[0] / g, grad[1] / g, grad[2] / g];
        let proj = dot(n, m0);
        let mut m = [m0[0] - proj * n[0], m0[1] - proj * n[1], m0[2] - proj * n[2]];
        let mm = norm(m);
        if mm < 1e-10 {
            return Err(Error::DegenerateBasis { node: local });
        }
        m = [m[0] / mm, m[1] / mm, m[2] / mm];
        let l = cross(n, m);
        rotation.push([n, m, l]);
        surface_scale.push(g * block.jacobian()[idx]);
    }
    let dims = block.dims();
    Ok(FaceFrame { face, dims: [dims[t0], dims[t1]], nodes, rotation, surface_scale })
}

/// Frame with `m0` chosen as the coordinate axis least aligned with the
/// face normal; used on exterior faces where only `n` matters.
pub fn exterior_frame(block: &CurvilinearBlock, face: Face) -> Result<FaceFrame> {
    let probe = block.gradient(face.axis, face.node_indices(block.dims())[0]);
    let pick = (0..3)
        .min_by(|&a, &b| probe[a].abs().partial_cmp(&probe[b].abs()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(1);
    let mut m0 = [0.0; 3];
    m0[pick] = 1.0;
    face_frame(block, face, m0)
}

pub fn rotate(v: Vec3, r: &Mat3) -> Vec3 {
    [dot(r[0], v), dot(r[1], v), dot(r[2], v)]
}

pub fn rotate_back(v: Vec3, r: &Mat3) -> Vec3 {
    let mut out = [0.0; 3];
    for (row, &c) in r.iter().zip(&v) {
        for d in 0..3 {
            out[d] += row[d] * c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_shear_matrix() {
        let a = [[2.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]];
        let (jac, inv) = invert(&a);
        assert!((jac - 6.0).abs() < 1e-15);
        for i in 0..3 {
            for k in 0..3 {
                let v: f64 = (0..3).map(|j| a[i][j] * inv[j][k]).sum();
                assert!((v - if i == k { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn folded_map_is_rejected() {
        let map = Mapping::Affine { origin: [0.0; 3], matrix: [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };
        assert!(matches!(
            CurvilinearBlock::build(&map, [3, 3, 3], MetricMethod::Analytic),
            Err(Error::FoldedMesh { i: 0, j: 0, k: 0, .. })
        ));
    }

    #[test]
    fn face_indices_cover_face() {
        let dims = [3, 4, 5];
        let f = Face { axis: Axis::R, high: true };
        let idx = f.node_indices(dims);
        assert_eq!(idx.len(), 15);
        assert_eq!(idx[0], 3 * 5);
        assert_eq!(idx[14], (2 * 4 + 3) * 5 + 4);
    }
}
