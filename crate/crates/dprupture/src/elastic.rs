//! Material fields, the elastic state layout and the interior right-hand side
//! of the curvilinear first-order elastic system.
//!
//! The state is stored field-major: field `f` of node `idx` lives at
//! `f * nodes + idx`, with fields `(v_x, v_y, v_z, σ_xx, σ_yy, σ_zz, σ_xy,
//! σ_xz, σ_yz)`. Lengths are km, time s, density g/cm³ and moduli GPa.
//! Velocities and stresses are carried in m/s and MPa, which is the
//! km/s–GPa system scaled by 10³ and keeps fault quantities in the units of
//! the friction laws. Energies are then in TJ (10¹² J).
//!
//! The scheme is
//!
//! ```text
//! ρ J ∂t v_i = Σ_ξ D-_ξ (J σ_ij ∂ξ/∂x_j)
//!     ∂t σ   = C ε̇,   ε̇ = Σ_ξ pattern(∇ξ, D+_ξ v)
//! ```
//!
//! with `pattern(g, w) = (g_x w_x, g_y w_y, g_z w_z, g_y w_x + g_x w_y,
//! g_z w_x + g_x w_z, g_z w_y + g_y w_z)` (engineering shear strains).
//! Penalty terms are added to the "raw" quantities `ρ J ∂t v` and `ε̇`
//! before the material is applied.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{dot, CurvilinearBlock, Face, FaceFrame, Vec3};
use crate::sbp::{Axis, AxisLayout, SbpOperatorSet, Which};

pub const FIELDS: usize = 9;
pub const VX: usize = 0;
pub const SXX: usize = 3;
pub const FIELD_NAMES: [&str; FIELDS] = ["vx", "vy", "vz", "sxx", "syy", "szz", "sxy", "sxz", "syz"];

pub type Voigt = [f64; 6];

/// Voigt slot of `σ_ij`.
pub const fn voigt_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

/// Symmetric-gradient pattern used both by the interior scheme and the
/// penalty terms.
#[inline]
pub fn pattern(g: Vec3, w: Vec3) -> Voigt {
    [g[0] * w[0], g[1] * w[1], g[2] * w[2], g[1] * w[0] + g[0] * w[1], g[2] * w[0] + g[0] * w[2], g[2] * w[1] + g[1] * w[2]]
}

/// `σ̄ n`.
#[inline]
pub fn traction(sigma: &Voigt, n: Vec3) -> Vec3 {
    [
        sigma[0] * n[0] + sigma[3] * n[1] + sigma[4] * n[2],
        sigma[3] * n[0] + sigma[1] * n[1] + sigma[5] * n[2],
        sigma[4] * n[0] + sigma[5] * n[1] + sigma[2] * n[2],
    ]
}

/// Isotropic material per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    rho: Vec<f64>,
    lambda: Vec<f64>,
    mu: Vec<f64>,
}

impl Material {
    pub fn new(rho: Vec<f64>, lambda: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if rho.len() != lambda.len() || rho.len() != mu.len() {
            return Err(Error::Dimension("material arrays differ in length".into()));
        }
        for i in 0..rho.len() {
            let (r, l, m) = (rho[i], lambda[i], mu[i]);
            if !(r > 0.0) || !(m > 0.0) || !(l > -m) {
                return Err(Error::Material(format!("node {i}: rho = {r}, lambda = {l}, mu = {m}")));
            }
        }
        if let Some(i) = (0..rho.len()).find(|&i| lambda[i] <= -0.5 * mu[i]) {
            log::warn!("lambda <= -mu/2 at node {i}: the material is not strongly elliptic");
        }
        Ok(Self { rho, lambda, mu })
    }

    /// Uniform material from density and wave speeds (km/s).
    pub fn homogeneous(nodes: usize, rho: f64, cp: f64, cs: f64) -> Result<Self> {
        let mu = rho * cs * cs;
        let lambda = rho * cp * cp - 2.0 * mu;
        Self::new(vec![rho; nodes], vec![lambda; nodes], vec![mu; nodes])
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self, idx: usize) -> f64 {
        self.rho[idx]
    }

    pub fn lambda(&self, idx: usize) -> f64 {
        self.lambda[idx]
    }

    pub fn mu(&self, idx: usize) -> f64 {
        self.mu[idx]
    }

    pub fn cp(&self, idx: usize) -> f64 {
        ((self.lambda[idx] + 2.0 * self.mu[idx]) / self.rho[idx]).sqrt()
    }

    pub fn cs(&self, idx: usize) -> f64 {
        (self.mu[idx] / self.rho[idx]).sqrt()
    }

    /// `(Z_p, Z_s)`.
    pub fn impedances(&self, idx: usize) -> (f64, f64) {
        (self.rho[idx] * self.cp(idx), self.rho[idx] * self.cs(idx))
    }

    pub fn stiffness(&self, idx: usize) -> [[f64; 6]; 6] {
        let (l, m) = (self.lambda[idx], self.mu[idx]);
        let mut c = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = l;
            }
            c[i][i] += 2.0 * m;
            c[i + 3][i + 3] = m;
        }
        c
    }

    pub fn compliance(&self, idx: usize) -> [[f64; 6]; 6] {
        let (l, m) = (self.lambda[idx], self.mu[idx]);
        let off = -l / (2.0 * m * (3.0 * l + 2.0 * m));
        let mut s = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = off;
            }
            s[i][i] += 1.0 / (2.0 * m);
            s[i + 3][i + 3] = 1.0 / m;
        }
        s
    }

    /// `σᵀ S τ`.
    #[inline]
    pub fn compliance_product(&self, idx: usize, sigma: &Voigt, tau: &Voigt) -> f64 {
        let (l, m) = (self.lambda[idx], self.mu[idx]);
        let tr_s = sigma[0] + sigma[1] + sigma[2];
        let tr_t = tau[0] + tau[1] + tau[2];
        let normal = sigma[0] * tau[0] + sigma[1] * tau[1] + sigma[2] * tau[2];
        let shear = sigma[3] * tau[3] + sigma[4] * tau[4] + sigma[5] * tau[5];
        (normal - l / (3.0 * l + 2.0 * m) * tr_s * tr_t) / (2.0 * m) + shear / m
    }

    /// `C e` for engineering strains `e`.
    #[inline]
    pub fn apply_stiffness(&self, idx: usize, e: &Voigt) -> Voigt {
        let (l, m) = (self.lambda[idx], self.mu[idx]);
        let tr = e[0] + e[1] + e[2];
        [l * tr + 2.0 * m * e[0], l * tr + 2.0 * m * e[1], l * tr + 2.0 * m * e[2], m * e[3], m * e[4], m * e[5]]
    }
}

/// Scratch buffers reused across right-hand-side evaluations.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    bufs: [Vec<f64>; 3],
}

impl Workspace {
    pub fn new(nodes: usize) -> Self {
        Self { bufs: [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]] }
    }
}

/// Mesh, material and one operator set per reference axis.
#[derive(Debug, Clone)]
pub struct ElasticBlock {
    mesh: CurvilinearBlock,
    material: Material,
    ops: [Arc<SbpOperatorSet>; 3],
    /// `jmetric[ξ][i] = J ∂ξ/∂x_i`.
    jmetric: [[Vec<f64>; 3]; 3],
    weights: Vec<f64>,
}

impl ElasticBlock {
    pub fn new(mesh: CurvilinearBlock, material: Material, ops: [Arc<SbpOperatorSet>; 3]) -> Result<Self> {
        let dims = mesh.dims();
        for (a, op) in ops.iter().enumerate() {
            if op.nodes() != dims[a] {
                return Err(Error::Dimension(format!(
                    "axis {a}: operator has {} nodes, mesh has {}",
                    op.nodes(),
                    dims[a]
                )));
            }
        }
        if material.len() != mesh.len() {
            return Err(Error::Dimension("material and mesh sizes differ".into()));
        }
        let jac = mesh.jacobian();
        let jmetric = Axis::ALL.map(|axis| {
            [0, 1, 2].map(|c| mesh.metric(axis, c).iter().zip(jac).map(|(m, j)| m * j).collect::<Vec<f64>>())
        });
        let mut weights = Vec::with_capacity(mesh.len());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    weights.push(ops[0].norm()[i] * ops[1].norm()[j] * ops[2].norm()[k]);
                }
            }
        }
        Ok(Self { mesh, material, ops, jmetric, weights })
    }

    pub fn mesh(&self) -> &CurvilinearBlock {
        &self.mesh
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn ops(&self, axis: Axis) -> &SbpOperatorSet {
        &self.ops[axis.index()]
    }

    pub fn nodes(&self) -> usize {
        self.mesh.len()
    }

    pub fn state_len(&self) -> usize {
        FIELDS * self.nodes()
    }

    /// Volume quadrature weights `H_q H_r H_s` (without `J`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn velocity(&self, q: &[f64], idx: usize) -> Vec3 {
        let n = self.nodes();
        [q[idx], q[n + idx], q[2 * n + idx]]
    }

    pub fn stress(&self, q: &[f64], idx: usize) -> Voigt {
        let n = self.nodes();
        [q[3 * n + idx], q[4 * n + idx], q[5 * n + idx], q[6 * n + idx], q[7 * n + idx], q[8 * n + idx]]
    }

    /// Conservative flux of axis `ξ` at a node: velocity rows `J σ̄ ∇ξ`.
    pub fn flux_f(&self, q: &[f64], axis: Axis, idx: usize) -> [f64; FIELDS] {
        let jm = &self.jmetric[axis.index()];
        let g = [jm[0][idx], jm[1][idx], jm[2][idx]];
        let t = traction(&self.stress(q, idx), g);
        let mut out = [0.0; FIELDS];
        out[..3].copy_from_slice(&t);
        out
    }

    /// Non-conservative product of axis `ξ`: stress rows `J pattern(∇ξ, ∂ξ v)`.
    pub fn flux_b(&self, dv: Vec3, axis: Axis, idx: usize) -> [f64; FIELDS] {
        let jm = &self.jmetric[axis.index()];
        let p = pattern([jm[0][idx], jm[1][idx], jm[2][idx]], dv);
        let mut out = [0.0; FIELDS];
        out[3..].copy_from_slice(&p);
        out
    }

    /// Raw interior terms: `ρ J ∂t v` in the velocity slots and `ε̇` in the
    /// stress slots of `out`.
    pub fn rhs_raw(&self, q: &[f64], out: &mut [f64], work: &mut Workspace) {
        let n = self.nodes();
        let dims = self.mesh.dims();
        debug_assert_eq!(q.len(), FIELDS * n);
        out.fill(0.0);
        let [b0, b1, b2] = &mut work.bufs;
        for axis in Axis::ALL {
            let a = axis.index();
            let layout = AxisLayout::new(dims, a);
            let op = self.ops[a].op(Which::Plus);
            op.apply_layout(layout, &q[..n], b0, false);
            op.apply_layout(layout, &q[n..2 * n], b1, false);
            op.apply_layout(layout, &q[2 * n..3 * n], b2, false);
            let metric = [self.mesh.metric(axis, 0), self.mesh.metric(axis, 1), self.mesh.metric(axis, 2)];
            let (_, strain) = out.split_at_mut(3 * n);
            let (exx, rest) = strain.split_at_mut(n);
            let (eyy, rest) = rest.split_at_mut(n);
            let (ezz, rest) = rest.split_at_mut(n);
            let (exy, rest) = rest.split_at_mut(n);
            let (exz, eyz) = rest.split_at_mut(n);
            for idx in 0..n {
                let (gx, gy, gz) = (metric[0][idx], metric[1][idx], metric[2][idx]);
                let (wx, wy, wz) = (b0[idx], b1[idx], b2[idx]);
                exx[idx] += gx * wx;
                eyy[idx] += gy * wy;
                ezz[idx] += gz * wz;
                exy[idx] += gy * wx + gx * wy;
                exz[idx] += gz * wx + gx * wz;
                eyz[idx] += gz * wy + gy * wz;
            }
        }
        for axis in Axis::ALL {
            let a = axis.index();
            let layout = AxisLayout::new(dims, a);
            let jm = &self.jmetric[a];
            for idx in 0..n {
                let (gx, gy, gz) = (jm[0][idx], jm[1][idx], jm[2][idx]);
                let (sxx, syy, szz) = (q[3 * n + idx], q[4 * n + idx], q[5 * n + idx]);
                let (sxy, sxz, syz) = (q[6 * n + idx], q[7 * n + idx], q[8 * n + idx]);
                b0[idx] = sxx * gx + sxy * gy + sxz * gz;
                b1[idx] = sxy * gx + syy * gy + syz * gz;
                b2[idx] = sxz * gx + syz * gy + szz * gz;
            }
            let op = self.ops[a].op(Which::Minus);
            op.apply_layout(layout, b0, &mut out[..n], true);
            op.apply_layout(layout, b1, &mut out[n..2 * n], true);
            op.apply_layout(layout, b2, &mut out[2 * n..3 * n], true);
        }
    }

    /// Turn raw terms into `∂t Q` in place.
    pub fn finalize(&self, out: &mut [f64]) {
        let n = self.nodes();
        let jac = self.mesh.jacobian();
        for idx in 0..n {
            let s = 1.0 / (self.material.rho(idx) * jac[idx]);
            out[idx] *= s;
            out[n + idx] *= s;
            out[2 * n + idx] *= s;
            let e = [
                out[3 * n + idx],
                out[4 * n + idx],
                out[5 * n + idx],
                out[6 * n + idx],
                out[7 * n + idx],
                out[8 * n + idx],
            ];
            let sigma = self.material.apply_stiffness(idx, &e);
            for (c, v) in sigma.iter().enumerate() {
                out[(3 + c) * n + idx] = *v;
            }
        }
    }

    /// `∂t Q` without penalty terms.
    pub fn rhs_interior(&self, q: &[f64], out: &mut [f64], work: &mut Workspace) -> Result<()> {
        self.rhs_raw(q, out, work);
        self.finalize(out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: 0, time: f64::NAN });
        }
        Ok(())
    }

    /// 1D norm weight of the face axis at the face, and the orientation
    /// sign (+1 on `ξ = 1`, -1 on `ξ = 0`).
    pub fn face_weight(&self, face: Face) -> (f64, f64) {
        let h = self.ops[face.axis.index()].norm();
        if face.high {
            (h[h.len() - 1], 1.0)
        } else {
            (h[0], -1.0)
        }
    }

    /// Surface quadrature weights of the face nodes: tangential norm weights
    /// times `J |∇ξ|`.
    pub fn surface_weights(&self, face: Face) -> Vec<f64> {
        let [t0, t1] = face.tangential();
        let h0 = self.ops[t0].norm();
        let h1 = self.ops[t1].norm();
        let nodes = face.node_indices(self.mesh.dims());
        let mut out = Vec::with_capacity(nodes.len());
        let mut it = nodes.iter();
        for w0 in h0 {
            for w1 in h1 {
                let idx = *it.next().unwrap_or(&0);
                let g = self.mesh.gradient(face.axis, idx);
                out.push(w0 * w1 * dot(g, g).sqrt() * self.mesh.jacobian()[idx]);
            }
        }
        out
    }

    /// Add the penalty `-H⁻¹ e J|∇ξ| SAT` at one face node. `g` and `gt` are
    /// the physical-frame `G` and `G̃`; `stress_sign` is +1 for the
    /// high-face (minus-type) and -1 for the low-face (plus-type) form.
    #[inline]
    pub fn add_penalty(&self, raw: &mut [f64], face: Face, idx: usize, normal: Vec3, g: Vec3, gt: Vec3) {
        let n = self.nodes();
        let (hw, orient) = self.face_weight(face);
        let grad = self.mesh.gradient(face.axis, idx);
        let gnorm = dot(grad, grad).sqrt();
        let jac = self.mesh.jacobian()[idx];
        let sv = -gnorm * jac / hw;
        for c in 0..3 {
            raw[c * n + idx] += sv * g[c];
        }
        let p = pattern(normal, gt);
        let ss = -gnorm / hw * orient;
        for (c, v) in p.iter().enumerate() {
            raw[(3 + c) * n + idx] += ss * v;
        }
    }

    /// `E = ½ Σ H J (ρ|v|² + σᵀSσ)`.
    pub fn energy(&self, q: &[f64]) -> f64 {
        let jac = self.mesh.jacobian();
        (0..self.nodes())
            .map(|idx| {
                let v = self.velocity(q, idx);
                let s = self.stress(q, idx);
                0.5 * self.weights[idx]
                    * jac[idx]
                    * (self.material.rho(idx) * dot(v, v) + self.material.compliance_product(idx, &s, &s))
            })
            .sum()
    }

    /// `dE/dt = Σ H J (ρ v·∂t v + σᵀ S ∂t σ)`.
    pub fn energy_rate(&self, q: &[f64], dq: &[f64]) -> f64 {
        let jac = self.mesh.jacobian();
        (0..self.nodes())
            .map(|idx| {
                let v = self.velocity(q, idx);
                let dv = self.velocity(dq, idx);
                let s = self.stress(q, idx);
                let ds = self.stress(dq, idx);
                self.weights[idx]
                    * jac[idx]
                    * (self.material.rho(idx) * dot(v, dv) + self.material.compliance_product(idx, &s, &ds))
            })
            .sum()
    }

    /// `I(vᵀT)` over a face with `T = σ̄ ∇ξ/|∇ξ|`.
    pub fn boundary_power(&self, q: &[f64], face: Face) -> f64 {
        let nodes = face.node_indices(self.mesh.dims());
        let w = self.surface_weights(face);
        nodes
            .iter()
            .zip(&w)
            .map(|(&idx, &wt)| {
                let g = self.mesh.gradient(face.axis, idx);
                let gn = dot(g, g).sqrt();
                let t = traction(&self.stress(q, idx), [g[0] / gn, g[1] / gn, g[2] / gn]);
                wt * dot(self.velocity(q, idx), t)
            })
            .sum()
    }

    /// Physical and local (`n, m, l`) traction on the nodes of a face frame.
    pub fn traction_on_face(&self, q: &[f64], frame: &FaceFrame) -> Vec<(Vec3, Vec3)> {
        frame
            .nodes
            .iter()
            .zip(&frame.rotation)
            .map(|(&idx, r)| {
                let t = traction(&self.stress(q, idx), r[0]);
                (t, crate::mesh::rotate(t, r))
            })
            .collect()
    }

    /// Binary snapshot: a text header followed by little-endian f64 values,
    /// field-major.
    pub fn write_snapshot<W: Write>(&self, q: &[f64], time: f64, mut out: W) -> Result<()> {
        let d = self.mesh.dims();
        writeln!(out, "dims {} {} {}", d[0], d[1], d[2])?;
        writeln!(out, "fields {}", FIELD_NAMES.join(" "))?;
        writeln!(out, "time {time:.17e}")?;
        writeln!(out, "end_header")?;
        for v in q {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compliance_inverts_stiffness() {
        let m = Material::homogeneous(1, 2.7, 5.716, 3.3).unwrap();
        let c = m.stiffness(0);
        let s = m.compliance(0);
        for i in 0..6 {
            for j in 0..6 {
                let v: f64 = (0..6).map(|k| s[i][k] * c[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compliance_product_matches_matrix() {
        let m = Material::new(vec![1.5], vec![0.7], vec![1.3]).unwrap();
        let s = m.compliance(0);
        let a = [1.0, -2.0, 0.5, 0.3, -0.7, 1.1];
        let b = [0.2, 0.4, -1.0, 2.0, 0.1, -0.3];
        let dense: f64 = (0..6).map(|i| (0..6).map(|j| a[i] * s[i][j] * b[j]).sum::<f64>()).sum();
        assert!((m.compliance_product(0, &a, &b) - dense).abs() < 1e-14);
    }

    #[test]
    fn inadmissible_material_is_rejected() {
        assert!(Material::new(vec![1.0], vec![-1.5], vec![1.0]).is_err());
        assert!(Material::new(vec![0.0], vec![1.0], vec![1.0]).is_err());
        assert!(Material::new(vec![1.0], vec![1.0], vec![-1.0]).is_err());
        assert!(Material::new(vec![1.0], vec![-0.7], vec![1.0]).is_ok());
    }

    #[test]
    fn hydrostatic_traction() {
        let p = 3.0;
        let n = [0.6, 0.0, 0.8];
        let t = traction(&[-p, -p, -p, 0.0, 0.0, 0.0], n);
        for c in 0..3 {
            assert!((t[c] + p * n[c]).abs() < 1e-15);
        }
    }
}
