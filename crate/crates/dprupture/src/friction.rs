//! Friction laws, state evolution and the hat-variable interface solve.
//!
//! Fault quantities live in the local frame `(n, m, l)`: index 0 is the
//! fault normal, 1 the dip direction `m` and 2 the strike direction `l`.
//! Tractions are in MPa, velocities in m/s, impedances in MPa·s/m
//! (numerically equal to GPa·s/km).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Vec3;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_REL_TOL: f64 = 1e-12;

/// Rate-and-state parameters shared by the aging and slip laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateStateParams {
    pub a: f64,
    pub b: f64,
    pub reference_friction: f64,
    /// m/s
    pub reference_slip_rate: f64,
    /// m
    pub critical_slip: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrictionModel {
    SlipWeakening {
        static_friction: f64,
        dynamic_friction: f64,
        /// m
        critical_slip: f64,
        /// MPa
        #[serde(default)]
        cohesion: f64,
    },
    RateStateAging(RateStateParams),
    RateStateSlip(RateStateParams),
    /// Linear strength `T̂ = α⟦v̂⟧` with constant `α` (MPa·s/m).
    FrozenLinear { alpha: f64 },
}

/// Internal state of one fault node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeState {
    /// Accumulated slip (m).
    pub slip: f64,
    /// Rate-and-state variable.
    pub psi: f64,
}

impl FrictionModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::SlipWeakening { static_friction, dynamic_friction, critical_slip, cohesion } => {
                0.0 < dynamic_friction && dynamic_friction < static_friction && critical_slip > 0.0 && cohesion >= 0.0
            }
            Self::RateStateAging(p) | Self::RateStateSlip(p) => {
                p.a > 0.0 && p.reference_slip_rate > 0.0 && p.critical_slip > 0.0 && p.b.is_finite()
            }
            Self::FrozenLinear { alpha } => alpha >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Friction(format!("invalid parameters {self:?}")))
        }
    }

    /// Whether the strength depends on the normal stress.
    pub fn uses_normal_stress(&self) -> bool {
        !matches!(self, Self::FrozenLinear { .. })
    }

    pub fn cohesion(&self) -> f64 {
        match *self {
            Self::SlipWeakening { cohesion, .. } => cohesion,
            _ => 0.0,
        }
    }

    /// Friction coefficient at slip rate `v` (m/s) and the node state.
    pub fn friction_coefficient(&self, v: f64, state: NodeState) -> Result<f64> {
        if v < 0.0 || v.is_nan() {
            return Err(Error::Domain(v));
        }
        if state.slip < 0.0 {
            return Err(Error::Domain(state.slip));
        }
        Ok(match *self {
            Self::SlipWeakening { static_friction, dynamic_friction, critical_slip, .. } => {
                if state.slip <= critical_slip {
                    static_friction - (static_friction - dynamic_friction) * state.slip / critical_slip
                } else {
                    dynamic_friction
                }
            }
            Self::RateStateAging(p) | Self::RateStateSlip(p) => rate_state_coefficient(&p, v, state.psi).0,
            Self::FrozenLinear { .. } => 0.0,
        })
    }

    /// `dψ/dt`; zero for laws without a state variable.
    pub fn state_rate(&self, v: f64, psi: f64) -> Result<f64> {
        if v < 0.0 || v.is_nan() {
            return Err(Error::Domain(v));
        }
        Ok(match *self {
            Self::RateStateAging(p) => {
                p.b * p.reference_slip_rate / p.critical_slip
                    * (((p.reference_friction - psi) / p.b).exp() - v / p.reference_slip_rate)
            }
            Self::RateStateSlip(p) => {
                if v == 0.0 {
                    0.0
                } else {
                    let f = rate_state_coefficient(&p, v, psi).0;
                    let steady = p.reference_friction - (p.b - p.a) * (v / p.reference_slip_rate).ln();
                    -v / p.critical_slip * (f - steady)
                }
            }
            _ => 0.0,
        })
    }

    /// Fault strength `τ(θ)` and `dτ/dθ` at trial slip rate `θ`.
    fn strength(&self, theta: f64, sigma_n: f64, state: NodeState) -> (f64, f64) {
        match *self {
            Self::SlipWeakening { cohesion, .. } => {
                let f = self.friction_coefficient(0.0, state).unwrap_or(0.0);
                (cohesion + sigma_n * f, 0.0)
            }
            Self::RateStateAging(p) | Self::RateStateSlip(p) => {
                let (f, df) = rate_state_coefficient(&p, theta, state.psi);
                (sigma_n * f, sigma_n * df)
            }
            Self::FrozenLinear { alpha } => (alpha * theta, alpha),
        }
    }
}

/// `a asinh(V e^{ψ/a} / 2V₀)` and its derivative in `V`.
fn rate_state_coefficient(p: &RateStateParams, v: f64, psi: f64) -> (f64, f64) {
    let scale = (psi / p.a).exp() / (2.0 * p.reference_slip_rate);
    let x = v * scale;
    (p.a * x.asinh(), p.a * scale / (1.0 + x * x).sqrt())
}

/// Outgoing characteristics and impedances on both sides of a fault node,
/// plus the initial traction (local frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultNodeInputs {
    /// `q = ½(Z v + T)` on the plus side.
    pub q_plus: Vec3,
    /// `p = ½(Z v − T)` on the minus side.
    pub p_minus: Vec3,
    pub z_plus: Vec3,
    pub z_minus: Vec3,
    pub prestress: Vec3,
}

impl FaultNodeInputs {
    /// Build from one-sided traces `(v, T)` in the local frame.
    pub fn from_traces(v_minus: Vec3, t_minus: Vec3, v_plus: Vec3, t_plus: Vec3, z_minus: Vec3, z_plus: Vec3) -> Self {
        Self {
            q_plus: [0, 1, 2].map(|j| 0.5 * (z_plus[j] * v_plus[j] + t_plus[j])),
            p_minus: [0, 1, 2].map(|j| 0.5 * (z_minus[j] * v_minus[j] - t_minus[j])),
            z_plus,
            z_minus,
            prestress: [0.0; 3],
        }
    }

    pub fn with_prestress(mut self, prestress: Vec3) -> Self {
        self.prestress = prestress;
        self
    }

    pub fn eta(&self) -> Vec3 {
        [0, 1, 2].map(|j| self.z_plus[j] * self.z_minus[j] / (self.z_plus[j] + self.z_minus[j]))
    }

    /// Stress transfer `Φ_j = η_j(2q⁺/Z⁺ − 2p⁻/Z⁻)` plus the initial traction.
    pub fn phi(&self) -> Vec3 {
        let eta = self.eta();
        [0, 1, 2].map(|j| {
            eta[j] * (2.0 * self.q_plus[j] / self.z_plus[j] - 2.0 * self.p_minus[j] / self.z_minus[j]) + self.prestress[j]
        })
    }

    fn validate(&self) -> Result<()> {
        if self.z_plus.iter().chain(&self.z_minus).all(|z| *z > 0.0) {
            Ok(())
        } else {
            Err(Error::Friction("impedances must be positive".into()))
        }
    }
}

/// `Θ(θ)` for the tangential components.
pub fn theta_function(
    phi: [f64; 2],
    eta: [f64; 2],
    sigma_n: f64,
    model: &FrictionModel,
    state: NodeState,
    theta: f64,
) -> f64 {
    let (tau, _) = model.strength(theta, sigma_n, state);
    (0..2).map(|j| (phi[j] / (eta[j] * theta + tau)).powi(2)).sum::<f64>().sqrt()
}

/// Unique root of `Θ(θ) = 1`, or zero when the node is locked.
pub fn solve_slip_rate(
    phi: [f64; 2],
    eta: [f64; 2],
    sigma_n: f64,
    model: &FrictionModel,
    state: NodeState,
) -> Result<f64> {
    if model.uses_normal_stress() && sigma_n < 0.0 {
        return Err(Error::TensileFault { sigma_n });
    }
    let mag = phi[0].hypot(phi[1]);
    if mag == 0.0 {
        return Ok(0.0);
    }
    // Θ(0⁺): finite only when the strength is bounded away from zero
    let (tau0, _) = model.strength(0.0, sigma_n, state);
    if tau0 > 0.0 && mag / tau0 <= 1.0 {
        return Ok(0.0);
    }
    // ln Θ as a function of u = ln θ, with its derivative in u
    let eval = |theta: f64| -> (f64, f64) {
        let (tau, dtau) = model.strength(theta, sigma_n, state);
        let mut sum = 0.0;
        let mut dsum = 0.0;
        for j in 0..2 {
            let den = eta[j] * theta + tau;
            let term = (phi[j] / den).powi(2);
            sum += term;
            dsum += term * (eta[j] + dtau) / den;
        }
        (0.5 * sum.ln(), -theta * dsum / sum)
    };
    // Θ(θ) ≤ |Φ| / (η_min θ) since τ ≥ 0
    let mut hi = mag / eta[0].min(eta[1]);
    let mut lo = f64::MIN_POSITIVE;
    let top = eval(hi).0;
    if top > 0.0 {
        // equality at the bound is reached by a frictionless linear law
        if top < NEWTON_REL_TOL {
            return Ok(hi);
        }
        return Err(Error::SolverDivergence { lo, hi });
    }
    if eval(lo).0 <= 0.0 {
        return Ok(0.0);
    }
    // geometric bisection guards the Newton steps: roots may lie many
    // decades below the upper bound
    let mid = |lo: f64, hi: f64| if hi > 4.0 * lo { lo.sqrt() * hi.sqrt() } else { 0.5 * (lo + hi) };
    let mut x = mid(lo, hi);
    let mut last = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let (g, dg) = eval(x);
        if g == 0.0 {
            return Ok(x);
        }
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 0.01 * NEWTON_REL_TOL * hi {
            return Ok(0.5 * (lo + hi));
        }
        let du = -g / dg;
        let next = x * du.exp();
        let stalled = g.abs() > 0.5 * last;
        last = g.abs();
        if dg < 0.0 && next > lo && next < hi && !stalled {
            x = next;
            if du.abs() <= 0.01 * NEWTON_REL_TOL {
                return Ok(x);
            }
        } else {
            x = mid(lo, hi);
        }
    }
    Err(Error::SolverDivergence { lo, hi })
}

/// Interface states that preserve the outgoing characteristics and satisfy
/// the friction law. All vectors are local-frame components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatVariables {
    pub v_plus: Vec3,
    pub v_minus: Vec3,
    /// Perturbation traction `T̂` (total minus initial).
    pub traction: Vec3,
    /// Total traction `T̂ + T₀`.
    pub total_traction: Vec3,
    /// `⟦v̂⟧ = v̂⁺ − v̂⁻`.
    pub jump: Vec3,
    /// `V̂ = |⟦v̂⟧|` (m/s).
    pub slip_rate: f64,
    /// Strength ratio `α̂ = τ/V̂`; `None` on a locked node.
    pub alpha: Option<f64>,
    pub sigma_n: f64,
    pub phi: Vec3,
    pub eta: Vec3,
}

impl HatVariables {
    /// `Σ_j T̂_j ⟦v̂_j⟧` with the total traction.
    pub fn dissipation(&self) -> f64 {
        (0..3).map(|j| self.total_traction[j] * self.jump[j]).sum()
    }
}

/// Hat variables with a tensile normal stress rejected.
pub fn hat_variables(inputs: &FaultNodeInputs, model: &FrictionModel, state: NodeState) -> Result<HatVariables> {
    hat_variables_clamped(inputs, model, state, false).map(|(h, _)| h)
}

/// Hat variables; with `clamp` a tensile normal stress is set to zero and
/// reported through the returned flag instead of failing.
pub fn hat_variables_clamped(
    inputs: &FaultNodeInputs,
    model: &FrictionModel,
    state: NodeState,
    clamp: bool,
) -> Result<(HatVariables, bool)> {
    inputs.validate()?;
    let eta = inputs.eta();
    let phi = inputs.phi();
    let mut sigma_n = -phi[0];
    let mut clamped = false;
    if sigma_n < 0.0 && clamp && model.uses_normal_stress() {
        sigma_n = 0.0;
        clamped = true;
    }
    let v = solve_slip_rate([phi[1], phi[2]], [eta[1], eta[2]], sigma_n, model, state)?;
    let mut total = [phi[0], phi[1], phi[2]];
    let mut jump = [0.0; 3];
    let alpha = if v > 0.0 {
        let (tau, _) = model.strength(v, sigma_n, state);
        let a = tau / v;
        for j in 1..3 {
            jump[j] = phi[j] / (eta[j] + a);
            total[j] = a * jump[j];
        }
        Some(a)
    } else {
        None
    };
    let traction = [0, 1, 2].map(|j| total[j] - inputs.prestress[j]);
    let v_minus = [0, 1, 2].map(|j| (2.0 * inputs.p_minus[j] + traction[j]) / inputs.z_minus[j]);
    let v_plus = [0, 1, 2].map(|j| v_minus[j] + jump[j]);
    let hat = HatVariables {
        v_plus,
        v_minus,
        traction,
        total_traction: total,
        jump,
        slip_rate: jump[1].hypot(jump[2]),
        alpha,
        sigma_n,
        phi,
        eta,
    };
    Ok((hat, clamped))
}

/// Largest residual of each algebraic identity satisfied by the hat
/// variables, scaled by the size of the inputs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IdentityResiduals {
    /// Outgoing characteristics preserved.
    pub preservation: f64,
    /// `q² − p̂² = Z T̂ v̂` on each side.
    pub quadratic: f64,
    /// Sum of the quadratic identities equals `T̂⟦v̂⟧`.
    pub energy: f64,
    /// Per-component dissipation `α̂Φ²/(η+α̂)²` and no opening.
    pub dissipation: f64,
    /// Total dissipation equals `α̂V̂²`.
    pub total: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [self.preservation, self.quadratic, self.energy, self.dissipation, self.total].into_iter().fold(0.0, f64::max)
    }
}

pub fn identity_residuals(inputs: &FaultNodeInputs, hat: &HatVariables) -> IdentityResiduals {
    let mut r = IdentityResiduals::default();
    let t = hat.traction;
    let scale_q = inputs.q_plus.iter().chain(&inputs.p_minus).chain(&inputs.prestress).fold(1.0f64, |m, v| m.max(v.abs()));
    for j in 0..3 {
        let (zp, zm) = (inputs.z_plus[j], inputs.z_minus[j]);
        let q_hat = 0.5 * (zp * hat.v_plus[j] + t[j]);
        let p_hat_plus = 0.5 * (zp * hat.v_plus[j] - t[j]);
        let p_hat = 0.5 * (zm * hat.v_minus[j] - t[j]);
        let q_hat_minus = 0.5 * (zm * hat.v_minus[j] + t[j]);
        r.preservation = r.preservation.max((q_hat - inputs.q_plus[j]).abs().max((p_hat - inputs.p_minus[j]).abs()) / scale_q);
        let lhs_p = inputs.q_plus[j].powi(2) - p_hat_plus.powi(2);
        let lhs_m = inputs.p_minus[j].powi(2) - q_hat_minus.powi(2);
        let sq = scale_q * scale_q;
        r.quadratic = r
            .quadratic
            .max((lhs_p - zp * t[j] * hat.v_plus[j]).abs().max((lhs_m + zm * t[j] * hat.v_minus[j]).abs()) / sq);
        let sum = lhs_p / zp + lhs_m / zm;
        r.energy = r.energy.max((sum - t[j] * hat.jump[j]).abs() * zp.min(zm) / sq);
    }
    let sq = scale_q * scale_q;
    let eta_min = hat.eta.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let mut per_component = (hat.total_traction[0] * hat.jump[0]).abs();
    let mut predicted = 0.0;
    if let Some(a) = hat.alpha {
        for j in 1..3 {
            let want = a * hat.phi[j].powi(2) / (hat.eta[j] + a).powi(2);
            predicted += want;
            per_component = per_component.max((hat.total_traction[j] * hat.jump[j] - want).abs());
        }
        let total = hat.dissipation();
        r.total = ((total - predicted).abs().max((total - a * hat.slip_rate.powi(2)).abs())) * eta_min / sq;
    } else {
        per_component = per_component.max(hat.jump.iter().fold(0.0f64, |m, v| m.max(v.abs())) * eta_min);
        r.total = hat.dissipation().abs() * eta_min / sq;
    }
    r.dissipation = per_component * eta_min / sq;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_state_derivative_matches_difference() {
        let p = RateStateParams { a: 0.01, b: 0.014, reference_friction: 0.6, reference_slip_rate: 1e-6, critical_slip: 0.02 };
        let (v, psi) = (0.3, 0.7);
        let h = 1e-7;
        let (_, d) = rate_state_coefficient(&p, v, psi);
        let fd = (rate_state_coefficient(&p, v + h, psi).0 - rate_state_coefficient(&p, v - h, psi).0) / (2.0 * h);
        assert!((d - fd).abs() < 1e-7 * d.abs());
    }
}
