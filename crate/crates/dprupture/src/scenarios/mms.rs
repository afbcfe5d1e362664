//! Manufactured-solution convergence runs with a linear (frozen) fault.

use std::io::Write;

use crate::coupling::ExteriorCondition;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::mesh::{InterfaceShape, Mapping, MetricMethod, Side};
use crate::sbp::{Family, SbpOperatorSet};
use crate::time_driver::config::{
    BlockConfig, BoundarySet, FaultConfig, ManufacturedConfig, MaterialConfig, OperatorConfig, OutputConfig,
    RunConfig, StressConfig,
};
use crate::time_driver::Simulation;

/// Two curved blocks of unit size with a bumped, inclined interface.
pub fn build_mms_linear(family: Family, order: usize, h: f64, alpha: f64) -> Result<RunConfig> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(Error::Scenario(format!("frozen friction constant must be non-negative, got {alpha}")));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::Scenario(format!("grid spacing must lie in (0, 1], got {h}")));
    }
    let n = (1.0 / h).round() as usize;
    let needed = SbpOperatorSet::min_intervals(family, order);
    if n < needed {
        return Err(Error::GridTooSmall { needed: needed + 1, got: n + 1 });
    }
    let interface = InterfaceShape { offset: 0.0, slope: 0.25, bump: 0.05 };
    let boundaries = BoundarySet { r_low: ExteriorCondition::FreeSurface, ..BoundarySet::default() };
    let block = |side, material| BlockConfig {
        nodes: [n + 1; 3],
        mapping: Mapping::TwoBlock { side, outer: 1.0, depth: 1.0, half_width: 0.5, interface },
        metrics: MetricMethod::Analytic,
        material,
        boundaries,
    };
    Ok(RunConfig {
        name: format!("mms-{family}{order}-n{n}"),
        end_time: 0.25,
        cfl: 0.5,
        operators: OperatorConfig::new(family, order),
        blocks: vec![
            block(Side::Minus, MaterialConfig { rho: 1.0, cp: 2.0, cs: 1.0 }),
            block(Side::Plus, MaterialConfig { rho: 1.5, cp: 2.4, cs: 1.3 }),
        ],
        fault: Some(FaultConfig {
            friction: FrictionModel::FrozenLinear { alpha },
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
            receivers: Vec::new(),
        }),
        initial: None,
        manufactured: Some(ManufacturedConfig { wavenumber: 2.5, frequency: 3.0, amplitude: 1.0, levels: vec![] }),
        output: OutputConfig { dir: None, snapshot_stride: 0, energy_log: false },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsRow {
    pub h: f64,
    pub error: f64,
    /// Observed order against the previous row; `NaN` on the first.
    pub rate: f64,
}

/// Run `config` at every refinement level (intervals per axis) and report
/// the energy-norm error at the end time.
pub fn run_mms(config: &RunConfig, levels: &[usize]) -> Result<Vec<MmsRow>> {
    if config.manufactured.is_none() {
        return Err(Error::Config("mms runs need a [manufactured] section".into()));
    }
    let mut rows: Vec<MmsRow> = Vec::with_capacity(levels.len());
    for &n in levels {
        let mut cfg = config.clone();
        cfg.output = OutputConfig { dir: None, snapshot_stride: 0, energy_log: false };
        for b in &mut cfg.blocks {
            b.nodes = [n + 1; 3];
        }
        let sim = Simulation::new(&cfg)?;
        let (y, _) = sim.run()?;
        let error = sim.manufactured_error(&y, cfg.end_time).unwrap_or(f64::NAN);
        let h = 1.0 / n as f64;
        let rate = rows.last().map_or(f64::NAN, |p| (p.error / error).ln() / (p.h / h).ln());
        log::info!("mms n = {n}: error {error:.4e}, rate {rate:.3}");
        rows.push(MmsRow { h, error, rate });
    }
    Ok(rows)
}

pub fn write_mms_csv<W: Write>(rows: &[MmsRow], mut out: W) -> Result<()> {
    writeln!(out, "h,error,rate")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.h, r.error, r.rate)?;
    }
    Ok(())
}
