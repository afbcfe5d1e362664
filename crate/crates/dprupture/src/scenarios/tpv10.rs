//! The SCEC TPV10 benchmark: a 60° dipping normal fault with linear
//! slip-weakening friction, shrunk by a length factor for desk runs.
//!
//! Lengths scale by `domain_scale`, and so does the critical slip, which
//! keeps the ratio of cohesive zone to fault size. Stress laws are
//! evaluated at the full-size depth `ỹ / domain_scale`, so stress levels,
//! stress drop and strength excess match the full-size problem.

use crate::coupling::ExteriorCondition;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::mesh::{Mapping, MetricMethod, Side};
use crate::sbp::Family;
use crate::time_driver::config::{
    receiver, BlockConfig, BoundarySet, FaultConfig, FaultRect, FrictionRegion, MaterialConfig, OperatorConfig,
    OutputConfig, OverstressRegion, RunConfig, StressConfig,
};

/// Full-size geometry and parameters, in km, MPa, m and s.
#[derive(Debug, Clone, PartialEq)]
pub struct Tpv10Config {
    pub dip_degrees: f64,
    /// Outer half extent in `x`, depth and strike half width of the domain.
    pub outer: f64,
    pub depth: f64,
    pub half_width: f64,
    pub h: f64,
    pub scale: f64,
    pub nucleation: FaultRect,
    pub rupture: FaultRect,
    pub static_friction: f64,
    pub dynamic_friction: f64,
    pub critical_slip: f64,
    pub cohesion: f64,
    pub barrier_static_friction: f64,
    pub barrier_cohesion: f64,
    /// MPa per km of down-dip distance.
    pub normal_gradient: f64,
    pub shear_ratio: f64,
    pub overstress_excess: f64,
    pub material: MaterialConfig,
    pub end_time: f64,
}

/// Initial state of a fault node relative to its peak strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Overstressed,
    Locked,
}

impl Tpv10Config {
    pub fn full_size(h: f64) -> Self {
        Self {
            dip_degrees: 60.0,
            outer: 20.0,
            depth: 20.0,
            half_width: 20.0,
            h,
            scale: 1.0,
            nucleation: FaultRect { along_dip: [10.5, 13.5], along_strike: [-1.5, 1.5] },
            rupture: FaultRect { along_dip: [0.0, 15.0], along_strike: [-15.0, 15.0] },
            static_friction: 0.76,
            dynamic_friction: 0.448,
            critical_slip: 0.5,
            cohesion: 0.2,
            barrier_static_friction: 10000.0,
            barrier_cohesion: 1000.0,
            normal_gradient: -7.387,
            shear_ratio: 0.55,
            overstress_excess: 0.00057,
            material: MaterialConfig { rho: 2.7, cp: 5.716, cs: 3.3 },
            end_time: 15.0,
        }
    }

    /// Every length (and the critical slip and end time) multiplied by `scale`.
    pub fn scaled(h: f64, scale: f64) -> Self {
        let full = Self::full_size(h);
        let rect = |r: FaultRect| FaultRect {
            along_dip: r.along_dip.map(|v| v * scale),
            along_strike: r.along_strike.map(|v| v * scale),
        };
        Self {
            outer: full.outer * scale,
            depth: full.depth * scale,
            half_width: full.half_width * scale,
            scale,
            nucleation: rect(full.nucleation),
            rupture: rect(full.rupture),
            critical_slip: full.critical_slip * scale,
            end_time: full.end_time * scale,
            ..full
        }
    }

    /// Top of the fault at `x0`, centred in `x` over the depth range.
    pub fn fault_offset(&self) -> f64 {
        -0.5 * self.depth / self.dip_degrees.to_radians().tan()
    }

    pub fn intervals(&self) -> [usize; 3] {
        let n = |len: f64| (len / self.h).round().max(1.0) as usize;
        [n(self.outer), n(self.depth), n(2.0 * self.half_width)]
    }

    /// Grid spacing along the fault in the dip and strike directions.
    pub fn fault_spacing(&self) -> [f64; 2] {
        let [_, nr, ns] = self.intervals();
        let dip_length = self.depth / self.dip_degrees.to_radians().sin();
        [dip_length / nr as f64, 2.0 * self.half_width / ns as f64]
    }

    /// Grid nodes inside the nucleation patch along dip and strike.
    pub fn nucleation_nodes(&self) -> [usize; 2] {
        let sp = self.fault_spacing();
        let [_, nr, ns] = self.intervals();
        let count = |range: [f64; 2], start: f64, step: f64, n: usize| {
            (0..=n).map(|k| start + k as f64 * step).filter(|x| *x >= range[0] - 1e-9 && *x <= range[1] + 1e-9).count()
        };
        [
            count(self.nucleation.along_dip, 0.0, sp[0], nr),
            count(self.nucleation.along_strike, -self.half_width, sp[1], ns),
        ]
    }

    fn slip_weakening(&self, static_friction: f64, cohesion: f64) -> FrictionModel {
        FrictionModel::SlipWeakening {
            static_friction,
            dynamic_friction: self.dynamic_friction,
            critical_slip: self.critical_slip,
            cohesion,
        }
    }

    /// `σ₀ₙ` (MPa, positive in compression) at down-dip distance `d` (km).
    pub fn normal_stress(&self, d: f64) -> f64 {
        -self.normal_gradient * d / self.scale
    }

    pub fn initial_shear(&self, d: f64, strike: f64) -> f64 {
        let s = self.normal_stress(d);
        if self.nucleation.contains(d, strike) {
            (self.static_friction + self.overstress_excess) * s + self.cohesion
        } else {
            self.shear_ratio * s
        }
    }

    pub fn peak_strength(&self, d: f64, strike: f64) -> f64 {
        let s = self.normal_stress(d);
        if self.rupture.contains(d, strike) {
            self.static_friction * s + self.cohesion
        } else {
            self.barrier_static_friction * s + self.barrier_cohesion
        }
    }

    pub fn classify(&self, d: f64, strike: f64) -> NodeClass {
        if self.initial_shear(d, strike) > self.peak_strength(d, strike) {
            NodeClass::Overstressed
        } else {
            NodeClass::Locked
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nucleation.is_inside(&self.rupture) {
            return Err(Error::Scenario("nucleation patch must lie inside the rupture area".into()));
        }
        let dip_length = self.depth / self.dip_degrees.to_radians().sin();
        let plane = FaultRect { along_dip: [0.0, dip_length], along_strike: [-self.half_width, self.half_width] };
        if !self.rupture.is_inside(&plane) {
            return Err(Error::Scenario("rupture area must lie inside the fault plane".into()));
        }
        let nodes = self.nucleation_nodes();
        if nodes.iter().any(|&n| n < 4) {
            return Err(Error::Scenario(format!(
                "h = {} km leaves {nodes:?} nodes across the nucleation patch; at least 4 are needed",
                self.h
            )));
        }
        let d = 0.5 * (self.nucleation.along_dip[0] + self.nucleation.along_dip[1]);
        let z = 0.5 * (self.nucleation.along_strike[0] + self.nucleation.along_strike[1]);
        if self.classify(d, z) != NodeClass::Overstressed {
            return Err(Error::Scenario("nucleation shear does not exceed peak strength".into()));
        }
        Ok(())
    }

    pub fn to_run_config(&self, family: Family, order: usize) -> Result<RunConfig> {
        self.validate()?;
        let [nq, nr, ns] = self.intervals();
        let x0 = self.fault_offset();
        let boundaries = BoundarySet { r_low: ExteriorCondition::FreeSurface, ..BoundarySet::default() };
        let block = |side| BlockConfig {
            nodes: [nq + 1, nr + 1, ns + 1],
            mapping: Mapping::dipping(side, self.outer, self.depth, self.half_width, x0, self.dip_degrees),
            metrics: MetricMethod::Analytic,
            material: self.material,
            boundaries,
        };
        let hypo = [
            0.5 * (self.nucleation.along_dip[0] + self.nucleation.along_dip[1]),
            0.5 * (self.nucleation.along_strike[0] + self.nucleation.along_strike[1]),
        ];
        Ok(RunConfig {
            name: format!("tpv10-{family}{order}"),
            end_time: self.end_time,
            cfl: 0.5,
            operators: OperatorConfig::new(family, order),
            blocks: vec![block(Side::Minus), block(Side::Plus)],
            fault: Some(FaultConfig {
                friction: self.slip_weakening(self.barrier_static_friction, self.barrier_cohesion),
                regions: vec![FrictionRegion {
                    region: self.rupture,
                    model: self.slip_weakening(self.static_friction, self.cohesion),
                }],
                stress: StressConfig {
                    normal_gradient: self.normal_gradient,
                    normal_offset: 0.0,
                    depth_scale: self.scale,
                    shear_ratio: self.shear_ratio,
                    strike_ratio: 0.0,
                    overstress: vec![OverstressRegion { region: self.nucleation, excess: self.overstress_excess }],
                },
                initial_state: None,
                receivers: vec![
                    receiver("hypocentre", hypo[0], hypo[1]),
                    receiver("dip7.5_strike12", 7.5 * self.scale, 12.0 * self.scale),
                ],
            }),
            initial: None,
            manufactured: None,
            output: OutputConfig::default(),
        })
    }
}

/// Scaled TPV10 with DP order 4 operators.
pub fn build_tpv10(h: f64, domain_scale: f64) -> Result<RunConfig> {
    if !(h > 0.0 && domain_scale > 0.0) {
        return Err(Error::Scenario("h and the domain scale must be positive".into()));
    }
    Tpv10Config::scaled(h, domain_scale).to_run_config(Family::DpUpwind, 4)
}
