//! Run configuration, read from and written to TOML. Unknown keys are
//! rejected at every level.
//!
//! ```toml
//! name = "example"
//! end_time = 1.0          # s
//! cfl = 0.5
//!
//! [operators]
//! family = "dp-upwind"    # traditional | dp-upwind | drp
//! order = 4
//!
//! [[blocks]]
//! nodes = [17, 17, 17]
//! mapping = { kind = "two-block", side = "minus", outer = 1.0, depth = 1.0,
//!             half_width = 1.0, interface = { offset = 0.0, slope = 0.5 } }
//! material = { rho = 2.7, cp = 5.716, cs = 3.3 }
//! boundaries = { r_low = "free-surface" }   # other faces default to absorbing
//!
//! # a second [[blocks]] entry with side = "plus" completes the pair
//!
//! [fault]
//! friction = { kind = "slip-weakening", static_friction = 0.76,
//!              dynamic_friction = 0.448, critical_slip = 0.5, cohesion = 0.2 }
//! stress = { normal_gradient = -7.387, shear_ratio = 0.55 }
//! receivers = [{ name = "r1", along_dip = 0.5, along_strike = 0.0 }]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupling::ExteriorCondition;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::mesh::{Mapping, MetricMethod};
use crate::sbp::Family;

fn default_cfl() -> f64 {
    0.5
}

fn default_one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

fn default_absorbing() -> ExteriorCondition {
    ExteriorCondition::Absorbing
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    /// s
    pub end_time: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub operators: OperatorConfig,
    pub blocks: Vec<BlockConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manufactured: Option<ManufacturedConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorChoice {
    pub family: Family,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub family: Family,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tol: Option<f64>,
    /// Operators on the second and third reference axes, when they differ
    /// from the first (used by quasi one-dimensional columns).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse: Option<OperatorChoice>,
}

impl OperatorConfig {
    pub fn new(family: Family, order: usize) -> Self {
        Self { family, order, alpha_tol: None, transverse: None }
    }

    pub fn for_axis(&self, axis: usize) -> OperatorChoice {
        match (axis, self.transverse) {
            (1 | 2, Some(t)) => t,
            _ => OperatorChoice { family: self.family, order: self.order, alpha_tol: self.alpha_tol },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// g/cm³
    pub rho: f64,
    /// km/s
    pub cp: f64,
    /// km/s
    pub cs: f64,
}

/// Exterior conditions per face; faces on the fault are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySet {
    #[serde(default = "default_absorbing")]
    pub q_low: ExteriorCondition,
    #[serde(default = "default_absorbing")]
    pub q_high: ExteriorCondition,
    #[serde(default = "default_absorbing")]
    pub r_low: ExteriorCondition,
    #[serde(default = "default_absorbing")]
    pub r_high: ExteriorCondition,
    #[serde(default = "default_absorbing")]
    pub s_low: ExteriorCondition,
    #[serde(default = "default_absorbing")]
    pub s_high: ExteriorCondition,
}

impl Default for BoundarySet {
    fn default() -> Self {
        Self::uniform(ExteriorCondition::Absorbing)
    }
}

impl BoundarySet {
    pub fn uniform(c: ExteriorCondition) -> Self {
        Self { q_low: c, q_high: c, r_low: c, r_high: c, s_low: c, s_high: c }
    }

    /// In `Face::all()` order.
    pub fn as_array(&self) -> [ExteriorCondition; 6] {
        [self.q_low, self.q_high, self.r_low, self.r_high, self.s_low, self.s_high]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    /// Node counts along `(q, r, s)`.
    pub nodes: [usize; 3],
    pub mapping: Mapping,
    #[serde(default)]
    pub metrics: MetricMethod,
    pub material: MaterialConfig,
    #[serde(default)]
    pub boundaries: BoundarySet,
}

/// Rectangle in fault-plane coordinates (km): down-dip distance from the
/// top edge of the fault and the strike coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultRect {
    pub along_dip: [f64; 2],
    pub along_strike: [f64; 2],
}

impl FaultRect {
    pub fn contains(&self, dip: f64, strike: f64) -> bool {
        let tol = 1e-9;
        dip >= self.along_dip[0] - tol
            && dip <= self.along_dip[1] + tol
            && strike >= self.along_strike[0] - tol
            && strike <= self.along_strike[1] + tol
    }

    pub fn is_inside(&self, other: &FaultRect) -> bool {
        self.along_dip[0] >= other.along_dip[0]
            && self.along_dip[1] <= other.along_dip[1]
            && self.along_strike[0] >= other.along_strike[0]
            && self.along_strike[1] <= other.along_strike[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionRegion {
    pub region: FaultRect,
    pub model: FrictionModel,
}

/// Region whose initial dip shear is raised to `(f_s + excess) σ₀ₙ + C₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverstressRegion {
    pub region: FaultRect,
    pub excess: f64,
}

/// Depth-dependent initial traction in the fault frame `(n, m, l)` (MPa).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressConfig {
    /// `T₀ₙ = normal_offset + normal_gradient · d / depth_scale` at down-dip
    /// distance `d`; negative values compress the fault.
    pub normal_gradient: f64,
    #[serde(default)]
    pub normal_offset: f64,
    /// Stress laws are evaluated at `d / depth_scale` so that a shrunken
    /// fault keeps the stress levels of the full-size one.
    #[serde(default = "default_one")]
    pub depth_scale: f64,
    /// Background `T₀ₘ = shear_ratio · σ₀ₙ`.
    #[serde(default)]
    pub shear_ratio: f64,
    /// Background `T₀ₗ = strike_ratio · σ₀ₙ`.
    #[serde(default)]
    pub strike_ratio: f64,
    #[serde(default)]
    pub overstress: Vec<OverstressRegion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Receiver {
    pub name: String,
    /// km
    pub along_dip: f64,
    /// km
    pub along_strike: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultConfig {
    pub friction: FrictionModel,
    #[serde(default)]
    pub regions: Vec<FrictionRegion>,
    pub stress: StressConfig,
    /// Initial rate-and-state variable; defaults to the reference friction
    /// for rate-and-state laws and 0 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<f64>,
    #[serde(default)]
    pub receivers: Vec<Receiver>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveKind {
    P,
    S,
}

/// Plane wave travelling in `+x`: a box of amplitude `amplitude` (m/s)
/// between `start` and `end` (km) with `tanh` edges of width `width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialField {
    pub wave: WaveKind,
    pub amplitude: f64,
    pub start: f64,
    pub end: f64,
    pub width: f64,
}

/// Trigonometric manufactured solution used for convergence studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManufacturedConfig {
    /// Spatial wavenumber (rad/km) along every axis.
    pub wavenumber: f64,
    /// Angular frequency (rad/s).
    pub frequency: f64,
    /// Velocity amplitude (m/s); stresses are scaled by the shear impedance.
    pub amplitude: f64,
    /// Refinement levels (intervals per axis) run by the `mms` command.
    #[serde(default)]
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Files are written only when a directory is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Steps between snapshots; 0 disables them.
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default = "default_true")]
    pub energy_log: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, snapshot_stride: 0, energy_log: true }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("CFL must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return Err(Error::Config(format!("end time must be positive, got {}", self.end_time)));
        }
        match (self.blocks.len(), &self.fault) {
            (1, None) | (2, Some(_)) => {}
            (n, f) => {
                return Err(Error::Config(format!(
                    "{n} blocks with {} fault; expected one block, or two blocks and a fault",
                    if f.is_some() { "a" } else { "no" }
                )))
            }
        }
        for b in &self.blocks {
            let m = b.material;
            if !(m.rho > 0.0 && m.cs > 0.0 && m.cp > m.cs) {
                return Err(Error::Config(format!("material needs rho > 0 and cp > cs > 0, got {m:?}")));
            }
        }
        if let Some(f) = &self.fault {
            f.friction.validate()?;
            for r in &f.regions {
                r.model.validate()?;
            }
            if f.stress.depth_scale <= 0.0 {
                return Err(Error::Config("stress depth scale must be positive".into()));
            }
        }
        if let Some(init) = &self.initial {
            if init.width <= 0.0 || init.end <= init.start {
                return Err(Error::Config("initial field needs width > 0 and end > start".into()));
            }
        }
        Ok(())
    }
}

/// Shared helper for scenario builders.
pub fn receiver(name: &str, along_dip: f64, along_strike: f64) -> Receiver {
    Receiver { name: name.into(), along_dip, along_strike }
}
