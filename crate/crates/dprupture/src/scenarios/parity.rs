//! A quasi one-dimensional column: a shear pulse with `tanh` edges crosses
//! a frozen fault, and the slip-rate trace at the fault is inspected for
//! spurious high-frequency content.

use crate::coupling::ExteriorCondition;
use crate::error::Result;
use crate::friction::FrictionModel;
use crate::mesh::{InterfaceShape, Mapping, MetricMethod, Side};
use crate::sbp::Family;
use crate::time_driver::config::{
    receiver, BlockConfig, BoundarySet, FaultConfig, InitialField, MaterialConfig, OperatorChoice, OperatorConfig,
    OutputConfig, RunConfig, StressConfig, WaveKind,
};
use crate::time_driver::Simulation;

use super::spectrum::high_frequency_fraction;

/// Intervals along the column in each block.
pub const PROBE_INTERVALS: usize = 100;
const TRANSVERSE_INTERVALS: usize = 4;
const BLOCK_LENGTH: f64 = 1.0;
const MATERIAL: MaterialConfig = MaterialConfig { rho: 1.0, cp: 2.0, cs: 1.0 };

/// Column of two blocks `[-1, 0]` and `[0, 1]` km, grid spacing
/// `h = 0.01` km, with a pulse whose edges have width `width_cells · h`.
pub fn build_parity_probe_with(family: Family, order: usize, width_cells: f64) -> Result<RunConfig> {
    let h = BLOCK_LENGTH / PROBE_INTERVALS as f64;
    let depth = TRANSVERSE_INTERVALS as f64 * h;
    let boundaries = BoundarySet {
        r_low: ExteriorCondition::Unconstrained,
        r_high: ExteriorCondition::Unconstrained,
        s_low: ExteriorCondition::Unconstrained,
        s_high: ExteriorCondition::Unconstrained,
        ..BoundarySet::default()
    };
    let block = |side| BlockConfig {
        nodes: [PROBE_INTERVALS + 1, TRANSVERSE_INTERVALS + 1, TRANSVERSE_INTERVALS + 1],
        mapping: Mapping::TwoBlock {
            side,
            outer: BLOCK_LENGTH,
            depth,
            half_width: 0.5 * depth,
            interface: InterfaceShape { offset: 0.0, slope: 0.0, bump: 0.0 },
        },
        metrics: MetricMethod::Analytic,
        material: MATERIAL,
        boundaries,
    };
    Ok(RunConfig {
        name: format!("parity-{family}{order}"),
        end_time: 1.2,
        cfl: 0.5,
        operators: OperatorConfig {
            family,
            order,
            alpha_tol: None,
            transverse: Some(OperatorChoice { family: Family::Traditional, order: 2, alpha_tol: None }),
        },
        blocks: vec![block(Side::Minus), block(Side::Plus)],
        fault: Some(FaultConfig {
            friction: FrictionModel::FrozenLinear { alpha: MATERIAL.rho * MATERIAL.cs },
            regions: Vec::new(),
            stress: StressConfig {
                normal_gradient: 0.0,
                normal_offset: 0.0,
                depth_scale: 1.0,
                shear_ratio: 0.0,
                strike_ratio: 0.0,
                overstress: Vec::new(),
            },
            initial_state: None,
            receivers: vec![receiver("centre", 0.5 * depth, 0.0)],
        }),
        initial: Some(InitialField {
            wave: WaveKind::S,
            amplitude: 1.0,
            start: -0.8,
            end: -0.4,
            width: width_cells * h,
        }),
        manufactured: None,
        output: OutputConfig { dir: None, snapshot_stride: 0, energy_log: false },
    })
}

/// Steep fronts of width `2h`.
pub fn build_parity_probe(family: Family, order: usize) -> Result<RunConfig> {
    build_parity_probe_with(family, order, 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityProbe {
    pub dt: f64,
    /// Dip-direction slip rate at the centre of the fault.
    pub trace: Vec<f64>,
    /// Top-octave fraction below `c_s / (2h)`.
    pub high_frequency_fraction: f64,
}

pub fn run_parity_probe(config: &RunConfig) -> Result<ParityProbe> {
    let sim = Simulation::new(config)?;
    let (_, out) = sim.run()?;
    let trace = out.seismograms.first().map(|s| s.column(1)).unwrap_or_default();
    let h = BLOCK_LENGTH / (config.blocks[0].nodes[0] - 1) as f64;
    let f_max = config.blocks[0].material.cs / (2.0 * h);
    let fraction = high_frequency_fraction(&trace, sim.dt(), f_max);
    Ok(ParityProbe { dt: sim.dt(), trace, high_frequency_fraction: fraction })
}
