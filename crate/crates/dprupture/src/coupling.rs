//! Penalty (SAT) terms for the fault interface and the exterior faces, and
//! the surface terms of the discrete energy rate.
//!
//! A face on `ξ = 0` is treated like the plus side of an interface and a
//! face on `ξ = 1` like the minus side. Traction is `T = σ̄ n` with
//! `n = ∇ξ/|∇ξ|` on both kinds of face.

use serde::{Deserialize, Serialize};

use crate::elastic::{traction, ElasticBlock};
use crate::error::{Error, Result};
use crate::friction::{hat_variables_clamped, FaultNodeInputs, FrictionModel, HatVariables, NodeState};
use crate::mesh::{dot, face_frame, rotate, rotate_back, Face, FaceFrame, Vec3, DEFAULT_M0};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltySide {
    Minus,
    Plus,
}

impl PenaltySide {
    pub fn of_face(face: Face) -> Self {
        if face.high {
            Self::Minus
        } else {
            Self::Plus
        }
    }
}

/// `G` and `G̃ = G/Z`, componentwise in whatever frame the inputs used.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PenaltyFields {
    pub g: Vec3,
    pub g_tilde: Vec3,
}

impl PenaltyFields {
    /// `Σ_j G_j²/Z_j`.
    pub fn fluctuation(&self) -> f64 {
        (0..3).map(|j| self.g[j] * self.g_tilde[j]).sum()
    }
}

pub fn penalty_terms(v: Vec3, t: Vec3, v_hat: Vec3, t_hat: Vec3, z: Vec3, side: PenaltySide) -> PenaltyFields {
    let sign = match side {
        PenaltySide::Plus => -1.0,
        PenaltySide::Minus => 1.0,
    };
    let g = [0, 1, 2].map(|j| 0.5 * z[j] * (v[j] - v_hat[j]) + sign * 0.5 * (t[j] - t_hat[j]));
    PenaltyFields { g, g_tilde: [0, 1, 2].map(|j| g[j] / z[j]) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExteriorCondition {
    /// Zero traction (or prescribed traction data).
    FreeSurface,
    /// Zero incoming characteristic (or prescribed incoming data).
    Absorbing,
    /// No penalty; the face contributes its raw boundary power.
    Unconstrained,
}

/// Boundary data `(v̂, T̂)` for one component. `data` is the exact `(v, T)`
/// used to build the incoming data; `None` means homogeneous data.
fn exterior_hat(cond: ExteriorCondition, side: PenaltySide, v: f64, t: f64, z: f64, data: Option<(f64, f64)>) -> (f64, f64) {
    match (cond, side) {
        (ExteriorCondition::FreeSurface, PenaltySide::Plus) => {
            let th = data.map_or(0.0, |d| d.1);
            (v + (t - th) / z, th)
        }
        (ExteriorCondition::FreeSurface, PenaltySide::Minus) => {
            let th = data.map_or(0.0, |d| d.1);
            (v - (t - th) / z, th)
        }
        (ExteriorCondition::Absorbing, PenaltySide::Plus) => {
            let q = 0.5 * (z * v + t);
            let p_in = data.map_or(0.0, |(dv, dt)| 0.5 * (z * dv - dt));
            ((q + p_in) / z, q - p_in)
        }
        (ExteriorCondition::Absorbing, PenaltySide::Minus) => {
            let p = 0.5 * (z * v - t);
            let q_in = data.map_or(0.0, |(dv, dt)| 0.5 * (z * dv + dt));
            ((p + q_in) / z, q_in - p)
        }
        (ExteriorCondition::Unconstrained, _) => (v, t),
    }
}

fn split(a: Vec3, n: Vec3) -> (f64, Vec3) {
    let an = dot(a, n);
    (an, [a[0] - an * n[0], a[1] - an * n[1], a[2] - an * n[2]])
}

/// Add the exterior penalty of one face to the raw right-hand side and
/// return the surface term it contributes to `dE/dt`:
/// `−I(Σ|G|²/Z ± T̂·v̂)` for penalized faces, `±I(vᵀT)` when unconstrained.
///
/// `data`, when given, holds the exact `(v, T)` at each face node (physical
/// frame, face node order).
pub fn sat_exterior(
    block: &ElasticBlock,
    q: &[f64],
    face: Face,
    cond: ExteriorCondition,
    data: Option<&[(Vec3, Vec3)]>,
    raw: &mut [f64],
) -> f64 {
    let nodes = face.node_indices(block.mesh().dims());
    let weights = block.surface_weights(face);
    let side = PenaltySide::of_face(face);
    let orient = if face.high { 1.0 } else { -1.0 };
    let mut rate = 0.0;
    for (local, (&idx, &w)) in nodes.iter().zip(&weights).enumerate() {
        let grad = block.mesh().gradient(face.axis, idx);
        let gn = dot(grad, grad).sqrt();
        let n = [grad[0] / gn, grad[1] / gn, grad[2] / gn];
        let v = block.velocity(q, idx);
        let t = traction(&block.stress(q, idx), n);
        if cond == ExteriorCondition::Unconstrained {
            rate += orient * w * dot(v, t);
            continue;
        }
        let (zp, zs) = block.material().impedances(idx);
        let (vn, vt) = split(v, n);
        let (tn, tt) = split(t, n);
        let d = data.map(|d| d[local]);
        let dn = d.map(|(dv, dt)| (dot(dv, n), dot(dt, n)));
        let (vhn, thn) = exterior_hat(cond, side, vn, tn, zp, dn);
        let mut vh = [vhn * n[0], vhn * n[1], vhn * n[2]];
        let mut th = [thn * n[0], thn * n[1], thn * n[2]];
        for c in 0..3 {
            let dc = d.map(|(dv, dt)| (dv[c] - dot(dv, n) * n[c], dt[c] - dot(dt, n) * n[c]));
            let (a, b) = exterior_hat(cond, side, vt[c], tt[c], zs, dc);
            vh[c] += a;
            th[c] += b;
        }
        let (vhn, vht) = split(vh, n);
        let (thn, tht) = split(th, n);
        let pn = penalty_terms([vn, 0.0, 0.0], [tn, 0.0, 0.0], [vhn, 0.0, 0.0], [thn, 0.0, 0.0], [zp; 3], side);
        let pt = penalty_terms(vt, tt, vht, tht, [zs; 3], side);
        let g = [0, 1, 2].map(|c| pn.g[0] * n[c] + pt.g[c]);
        let gt = [0, 1, 2].map(|c| pn.g_tilde[0] * n[c] + pt.g_tilde[c]);
        block.add_penalty(raw, face, idx, n, g, gt);
        let fluct = pn.g[0] * pn.g_tilde[0] + (0..3).map(|c| pt.g[c] * pt.g_tilde[c]).sum::<f64>();
        rate -= w * (fluct - orient * dot(th, vh));
    }
    rate
}

/// Per-node fault evaluation of one right-hand-side call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultTrace {
    pub hat: HatVariables,
    pub minus: PenaltyFields,
    pub plus: PenaltyFields,
    pub clamped: bool,
}

/// Surface terms of the fault in `dE/dt`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaultRates {
    /// `−I(Σ|G⁻|²/Z⁻)`
    pub fluctuation_minus: f64,
    /// `−I(Σ|G⁺|²/Z⁺)`
    pub fluctuation_plus: f64,
    /// `−I(T̂·⟦v̂⟧)` with the total traction, i.e. `−I(α̂V̂²)`.
    pub interface: f64,
    /// `I(T₀·⟦v̂⟧)`, the rate of work of the initial traction.
    pub prestress_work: f64,
}

impl FaultRates {
    pub fn total(&self) -> f64 {
        self.fluctuation_minus + self.fluctuation_plus + self.interface + self.prestress_work
    }
}

/// Conforming fault between the `ξ = 1` face of the minus block and the
/// `ξ = 0` face of the plus block along the first reference axis.
#[derive(Debug, Clone)]
pub struct FaultInterface {
    frame: FaceFrame,
    plus_nodes: Vec<usize>,
    z_minus: Vec<Vec3>,
    z_plus: Vec<Vec3>,
    weights_minus: Vec<f64>,
    weights_plus: Vec<f64>,
    models: Vec<FrictionModel>,
    prestress: Vec<Vec3>,
}

impl FaultInterface {
    /// `models` and `prestress` (local frame) are per fault node in the
    /// face order of the minus block; a single entry is broadcast.
    pub fn new(
        minus: &ElasticBlock,
        plus: &ElasticBlock,
        models: Vec<FrictionModel>,
        prestress: Vec<Vec3>,
    ) -> Result<Self> {
        let frame = face_frame(minus.mesh(), Face::Q_HIGH, DEFAULT_M0)?;
        let plus_frame = face_frame(plus.mesh(), Face::Q_LOW, DEFAULT_M0)?;
        if frame.dims != plus_frame.dims {
            return Err(Error::Dimension(format!("fault faces {:?} and {:?} differ", frame.dims, plus_frame.dims)));
        }
        for (a, b) in frame.nodes.iter().zip(&plus_frame.nodes) {
            let (xa, xb) = (minus.mesh().position(*a), plus.mesh().position(*b));
            let gap = (0..3).map(|c| (xa[c] - xb[c]).abs()).fold(0.0, f64::max);
            if gap > 1e-9 * (1.0 + xa.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                return Err(Error::Dimension(format!("fault faces do not conform: gap {gap}")));
            }
        }
        let len = frame.len();
        let models = broadcast(models, len, "friction models")?;
        for m in &models {
            m.validate()?;
        }
        let prestress = broadcast(prestress, len, "initial tractions")?;
        let imp = |b: &ElasticBlock, idx: usize| {
            let (zp, zs) = b.material().impedances(idx);
            [zp, zs, zs]
        };
        Ok(Self {
            z_minus: frame.nodes.iter().map(|&i| imp(minus, i)).collect(),
            z_plus: plus_frame.nodes.iter().map(|&i| imp(plus, i)).collect(),
            weights_minus: minus.surface_weights(Face::Q_HIGH),
            weights_plus: plus.surface_weights(Face::Q_LOW),
            plus_nodes: plus_frame.nodes,
            frame,
            models,
            prestress,
        })
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn frame(&self) -> &FaceFrame {
        &self.frame
    }

    pub fn models(&self) -> &[FrictionModel] {
        &self.models
    }

    pub fn prestress(&self) -> &[Vec3] {
        &self.prestress
    }

    /// Surface weights on the minus side.
    pub fn weights(&self) -> &[f64] {
        &self.weights_minus
    }

    /// One-sided traces `(v, T)` in the local frame of fault node `node`.
    pub fn traces(&self, minus: &ElasticBlock, qm: &[f64], plus: &ElasticBlock, qp: &[f64], node: usize) -> [(Vec3, Vec3); 2] {
        let r = &self.frame.rotation[node];
        let n = r[0];
        let im = self.frame.nodes[node];
        let ip = self.plus_nodes[node];
        let vm = rotate(minus.velocity(qm, im), r);
        let tm = rotate(traction(&minus.stress(qm, im), n), r);
        let vp = rotate(plus.velocity(qp, ip), r);
        let tp = rotate(traction(&plus.stress(qp, ip), n), r);
        [(vm, tm), (vp, tp)]
    }

    /// Hat variables and penalties at every fault node.
    pub fn evaluate(
        &self,
        minus: &ElasticBlock,
        qm: &[f64],
        plus: &ElasticBlock,
        qp: &[f64],
        states: &[NodeState],
        prestress: Option<&[Vec3]>,
        clamp_tensile: bool,
    ) -> Result<Vec<FaultTrace>> {
        let prestress = prestress.unwrap_or(&self.prestress);
        (0..self.len())
            .map(|node| {
                let [(vm, tm), (vp, tp)] = self.traces(minus, qm, plus, qp, node);
                let (zm, zp) = (self.z_minus[node], self.z_plus[node]);
                let inputs = FaultNodeInputs::from_traces(vm, tm, vp, tp, zm, zp).with_prestress(prestress[node]);
                let (hat, clamped) = hat_variables_clamped(&inputs, &self.models[node], states[node], clamp_tensile)?;
                let minus_pen = penalty_terms(vm, tm, hat.v_minus, hat.traction, zm, PenaltySide::Minus);
                let plus_pen = penalty_terms(vp, tp, hat.v_plus, hat.traction, zp, PenaltySide::Plus);
                Ok(FaultTrace { hat, minus: minus_pen, plus: plus_pen, clamped })
            })
            .collect()
    }

    /// Add both fault penalties to the raw right-hand sides.
    pub fn apply(
        &self,
        minus: &ElasticBlock,
        raw_minus: &mut [f64],
        plus: &ElasticBlock,
        raw_plus: &mut [f64],
        traces: &[FaultTrace],
    ) {
        for (node, tr) in traces.iter().enumerate() {
            let r = &self.frame.rotation[node];
            let n = r[0];
            minus.add_penalty(
                raw_minus,
                Face::Q_HIGH,
                self.frame.nodes[node],
                n,
                rotate_back(tr.minus.g, r),
                rotate_back(tr.minus.g_tilde, r),
            );
            plus.add_penalty(
                raw_plus,
                Face::Q_LOW,
                self.plus_nodes[node],
                n,
                rotate_back(tr.plus.g, r),
                rotate_back(tr.plus.g_tilde, r),
            );
        }
    }

    /// Surface terms of `dE/dt` from one evaluation.
    pub fn rates(&self, traces: &[FaultTrace], prestress: Option<&[Vec3]>) -> FaultRates {
        let prestress = prestress.unwrap_or(&self.prestress);
        let mut out = FaultRates::default();
        for (node, tr) in traces.iter().enumerate() {
            let (wm, wp) = (self.weights_minus[node], self.weights_plus[node]);
            out.fluctuation_minus -= wm * tr.minus.fluctuation();
            out.fluctuation_plus -= wp * tr.plus.fluctuation();
            let h = &tr.hat;
            let total = h.total_traction;
            let t0 = prestress[node];
            let w = 0.5 * (wm + wp);
            out.interface -= w * dot(total, h.jump);
            out.prestress_work += w * dot(t0, h.jump);
        }
        out
    }
}

fn broadcast<T: Copy>(v: Vec<T>, len: usize, what: &str) -> Result<Vec<T>> {
    match v.len() {
        1 => Ok(vec![v[0]; len]),
        l if l == len => Ok(v),
        l => Err(Error::Dimension(format!("{what}: {l} entries for {len} fault nodes"))),
    }
}

/// Energy bookkeeping of one right-hand-side evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyDiagnostics {
    pub energy: f64,
    pub rate: f64,
    pub fault: FaultRates,
    /// Surface terms of the exterior faces.
    pub exterior: f64,
    /// Volume work of any body forcing.
    pub forcing: f64,
}

impl EnergyDiagnostics {
    /// `|dE/dt − (F⁻ + F⁺ + ITₛ + W₀ + exterior + forcing)|`.
    pub fn residual(&self) -> f64 {
        (self.rate - (self.fault.total() + self.exterior + self.forcing)).abs()
    }

    pub fn relative_residual(&self) -> f64 {
        let scale = self
            .rate
            .abs()
            .max(self.fault.fluctuation_minus.abs() + self.fault.fluctuation_plus.abs() + self.fault.interface.abs())
            .max(self.exterior.abs())
            .max(f64::MIN_POSITIVE);
        self.residual() / scale
    }
}
