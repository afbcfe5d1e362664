//! Turning a [`RunConfig`] into a [`RuptureSystem`] and stepping it.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use crate::coupling::FaultInterface;
use crate::elastic::{ElasticBlock, Material, FIELDS};
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::mesh::{norm, CurvilinearBlock, Vec3};
use crate::sbp::SbpOperatorSet;
use crate::scenarios::manufactured::TrigSolution;
use crate::system::{RhsInfo, RuptureSystem};

use super::config::{FaultConfig, InitialField, RunConfig, WaveKind};
use super::output::{EnergyRecord, FaultSnapshot, RunOutput, Seismogram, Summary};
use super::{compute_dt, Lsrk45};

/// A ready-to-run configuration.
#[derive(Debug)]
pub struct Simulation {
    config: RunConfig,
    system: RuptureSystem,
    dt: f64,
    steps: usize,
    fault_coords: Vec<[f64; 2]>,
    receivers: Vec<(String, usize)>,
    initial: Vec<f64>,
}

type OperatorKey = (crate::sbp::Family, usize, u64, usize);

fn build_blocks(config: &RunConfig) -> Result<Vec<ElasticBlock>> {
    let mut cache: HashMap<OperatorKey, Arc<SbpOperatorSet>> = HashMap::new();
    let mut blocks = Vec::with_capacity(config.blocks.len());
    for bc in &config.blocks {
        let mesh = CurvilinearBlock::build(&bc.mapping, bc.nodes, bc.metrics)?;
        let mut ops = Vec::with_capacity(3);
        for axis in 0..3 {
            let choice = config.operators.for_axis(axis);
            let n = bc.nodes[axis] - 1;
            let key = (choice.family, choice.order, choice.alpha_tol.map_or(0, f64::to_bits), n);
            let op = match cache.get(&key) {
                Some(op) => op.clone(),
                None => {
                    let op = Arc::new(SbpOperatorSet::build(choice.family, choice.order, n, choice.alpha_tol)?);
                    cache.insert(key, op.clone());
                    op
                }
            };
            ops.push(op);
        }
        let m = bc.material;
        let material = Material::homogeneous(mesh.len(), m.rho, m.cp, m.cs)?;
        let ops: [Arc<SbpOperatorSet>; 3] = [ops[0].clone(), ops[1].clone(), ops[2].clone()];
        blocks.push(ElasticBlock::new(mesh, material, ops)?);
    }
    Ok(blocks)
}

/// `(along_dip, along_strike)` of every fault node: arc length along the
/// second reference axis from its first node, and the `z` coordinate.
fn fault_plane_coords(block: &ElasticBlock, nodes: &[usize], dims: [usize; 2]) -> Vec<[f64; 2]> {
    let mesh = block.mesh();
    let mut out = vec![[0.0; 2]; nodes.len()];
    for k in 0..dims[1] {
        let mut dist = 0.0;
        let mut prev: Option<Vec3> = None;
        for j in 0..dims[0] {
            let local = j * dims[1] + k;
            let x = mesh.position(nodes[local]);
            if let Some(p) = prev {
                dist += norm([x[0] - p[0], x[1] - p[1], x[2] - p[2]]);
            }
            prev = Some(x);
            out[local] = [dist, x[2]];
        }
    }
    out
}

fn node_model(fc: &FaultConfig, coord: [f64; 2]) -> FrictionModel {
    fc.regions
        .iter()
        .rev()
        .find(|r| r.region.contains(coord[0], coord[1]))
        .map_or(fc.friction, |r| r.model)
}

fn node_prestress(fc: &FaultConfig, coord: [f64; 2], model: &FrictionModel) -> Result<Vec3> {
    let s = &fc.stress;
    let d = coord[0] / s.depth_scale;
    let tn = s.normal_offset + s.normal_gradient * d;
    let sigma0 = -tn;
    let mut tm = s.shear_ratio * sigma0;
    let tl = s.strike_ratio * sigma0;
    if let Some(o) = s.overstress.iter().rev().find(|o| o.region.contains(coord[0], coord[1])) {
        match *model {
            FrictionModel::SlipWeakening { static_friction, cohesion, .. } => {
                tm = (static_friction + o.excess) * sigma0 + cohesion;
            }
            _ => return Err(Error::Config("overstress regions require slip-weakening friction".into())),
        }
    }
    Ok([tn, tm, tl])
}

fn plane_wave(init: &InitialField, block: &ElasticBlock, q: &mut [f64]) {
    let n = block.nodes();
    for idx in 0..n {
        let x = block.mesh().position(idx)[0];
        let f = 0.5 * init.amplitude * (((x - init.start) / init.width).tanh() - ((x - init.end) / init.width).tanh());
        let m = block.material();
        let (rho, lambda) = (m.rho(idx), m.lambda(idx));
        match init.wave {
            WaveKind::S => {
                q[n + idx] = f;
                q[6 * n + idx] = -rho * m.cs(idx) * f;
            }
            WaveKind::P => {
                let c = m.cp(idx);
                q[idx] = f;
                q[3 * n + idx] = -rho * c * f;
                q[4 * n + idx] = -lambda / c * f;
                q[5 * n + idx] = -lambda / c * f;
            }
        }
    }
}

impl Simulation {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let blocks = build_blocks(config)?;
        let boundaries = config.blocks.iter().map(|b| b.boundaries.as_array()).collect();
        let mut fault_coords = Vec::new();
        let mut receivers = Vec::new();
        let mut psi0 = Vec::new();
        let fault = match &config.fault {
            Some(fc) => {
                let probe = FaultInterface::new(
                    &blocks[0],
                    &blocks[1],
                    vec![FrictionModel::FrozenLinear { alpha: 0.0 }],
                    vec![[0.0; 3]],
                )?;
                let frame = probe.frame();
                fault_coords = fault_plane_coords(&blocks[0], &frame.nodes, frame.dims);
                let models: Vec<FrictionModel> = fault_coords.iter().map(|&c| node_model(fc, c)).collect();
                let prestress =
                    fault_coords.iter().zip(&models).map(|(&c, m)| node_prestress(fc, c, m)).collect::<Result<_>>()?;
                psi0 = models
                    .iter()
                    .map(|m| match (fc.initial_state, m) {
                        (Some(v), _) => v,
                        (None, FrictionModel::RateStateAging(p) | FrictionModel::RateStateSlip(p)) => {
                            p.reference_friction
                        }
                        _ => 0.0,
                    })
                    .collect();
                let (lo, hi) = fault_coords.iter().fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), c| {
                    ([lo[0].min(c[0]), lo[1].min(c[1])], [hi[0].max(c[0]), hi[1].max(c[1])])
                });
                for r in &fc.receivers {
                    let tol = 1e-9 * (1.0 + hi[0].abs().max(hi[1].abs()));
                    if r.along_dip < lo[0] - tol
                        || r.along_dip > hi[0] + tol
                        || r.along_strike < lo[1] - tol
                        || r.along_strike > hi[1] + tol
                    {
                        return Err(Error::Config(format!("receiver '{}' lies outside the fault plane", r.name)));
                    }
                    let node = fault_coords
                        .iter()
                        .enumerate()
                        .map(|(i, c)| (i, (c[0] - r.along_dip).hypot(c[1] - r.along_strike)))
                        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
                        .0;
                    receivers.push((r.name.clone(), node));
                }
                Some(FaultInterface::new(&blocks[0], &blocks[1], models, prestress)?)
            }
            None => None,
        };
        let materials: Vec<_> = config.blocks.iter().map(|b| b.material).collect();
        let mut system = RuptureSystem::new(blocks, boundaries, fault)?;
        if let Some(m) = &config.manufactured {
            system = system.with_forcing(Arc::new(TrigSolution::new(m, &materials)));
        }
        let dt_max = compute_dt(system.blocks(), config.cfl)?;
        let steps = (config.end_time / dt_max).ceil().max(1.0) as usize;
        let dt = config.end_time / steps as f64;
        let mut initial = system.zero_state();
        if let Some(init) = &config.initial {
            for (b, block) in system.blocks().iter().enumerate() {
                plane_wave(init, block, system.block_state_mut(&mut initial, b));
            }
        }
        system.project_exact(&mut initial, 0.0);
        if !psi0.is_empty() {
            system.fault_array_mut(&mut initial, 1).copy_from_slice(&psi0);
        }
        Ok(Self { config: config.clone(), system, dt, steps, fault_coords, receivers, initial })
    }

    pub fn system(&self) -> &RuptureSystem {
        &self.system
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Step size: the CFL bound reduced so that whole steps reach the end time.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn fault_coords(&self) -> &[[f64; 2]] {
        &self.fault_coords
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial
    }

    /// Integrate to the end time; returns the final state with the outputs.
    pub fn run(&self) -> Result<(Vec<f64>, RunOutput)> {
        let start = Instant::now();
        let cfg = &self.config;
        let sys = &self.system;
        let nf = sys.fault_len();
        let mut out = RunOutput {
            seismograms: self
                .receivers
                .iter()
                .map(|(name, node)| Seismogram {
                    name: name.clone(),
                    node: *node,
                    along_dip: self.fault_coords[*node][0],
                    along_strike: self.fault_coords[*node][1],
                    samples: Vec::with_capacity(self.steps + 1),
                })
                .collect(),
            fault_coords: self.fault_coords.clone(),
            fault_weights: sys.fault().map(|f| f.weights().to_vec()).unwrap_or_default(),
            peak_slip_rate: vec![0.0; nf],
            summary: Summary { name: cfg.name.clone(), dt: self.dt, end_time: cfg.end_time, ..Default::default() },
            ..Default::default()
        };
        let mut y = self.initial.clone();
        let mut rk = Lsrk45::new(y.len());
        let mut scratch = vec![0.0; y.len()];
        let stride = cfg.output.snapshot_stride;
        let energy = cfg.output.energy_log;
        for step in 0..=self.steps {
            let t = step as f64 * self.dt;
            let snapshot = stride > 0 && (step % stride == 0 || step == self.steps);
            if step == self.steps {
                let info = sys.rhs(t, &y, &mut scratch, energy).map_err(|e| at_step(e, step, t))?;
                self.record(&mut out, t, &y, &info, snapshot.then_some(step));
                break;
            }
            rk.step(t, self.dt, &mut y, |stage, ts, ys, dys| {
                let info = sys.rhs(ts, ys, dys, stage == 0 && energy)?;
                if stage == 0 {
                    self.record(&mut out, t, ys, &info, snapshot.then_some(step));
                }
                Ok(())
            })
            .map_err(|e| at_step(e, step, t))?;
        }
        out.summary.steps = self.steps;
        if nf > 0 {
            out.final_slip = sys.fault_array(&y, 0).to_vec();
            out.summary.final_slip_max = out.final_slip.iter().copied().fold(0.0, f64::max);
            out.summary.final_slip_mean = out.final_slip.iter().sum::<f64>() / nf as f64;
        }
        out.summary.wall_time = start.elapsed().as_secs_f64();
        if let Some(dir) = &cfg.output.dir {
            out.write(dir)?;
        }
        Ok((y, out))
    }

    fn record(&self, out: &mut RunOutput, t: f64, y: &[f64], info: &RhsInfo, snapshot: Option<usize>) {
        let sys = &self.system;
        out.summary.clamped_evaluations += info.clamped;
        if let Some(d) = &info.diagnostics {
            let rec = EnergyRecord {
                t,
                energy: d.energy,
                rate: d.rate,
                interface: d.fault.interface,
                fluctuation_minus: d.fault.fluctuation_minus,
                fluctuation_plus: d.fault.fluctuation_plus,
                residual: d.residual(),
                exterior: d.exterior,
                prestress_work: d.fault.prestress_work,
                total_energy: sys.total_energy(y),
            };
            out.summary.max_energy_residual = out.summary.max_energy_residual.max(rec.residual);
            out.energy.push(rec);
        }
        if info.traces.is_empty() {
            return;
        }
        let slip = sys.fault_array(y, 0);
        for (node, tr) in info.traces.iter().enumerate() {
            let v = tr.hat.slip_rate;
            if v > out.peak_slip_rate[node] {
                out.peak_slip_rate[node] = v;
            }
            if v > out.summary.max_slip_rate {
                out.summary.max_slip_rate = v;
                out.summary.max_slip_rate_time = t;
            }
        }
        for s in &mut out.seismograms {
            let h = &info.traces[s.node].hat;
            let tt = h.total_traction;
            s.samples.push([t, h.jump[1], h.jump[2], h.slip_rate, tt[1], tt[2], tt[0], slip[s.node]]);
        }
        if let (Some(step), Some(fault)) = (snapshot, sys.fault()) {
            let psi = sys.fault_array(y, 1);
            let pick = |f: &dyn Fn(usize) -> f64| (0..info.traces.len()).map(f).collect::<Vec<f64>>();
            out.snapshots.push(FaultSnapshot {
                step,
                time: t,
                dims: fault.frame().dims,
                fields: [
                    pick(&|i| info.traces[i].hat.slip_rate),
                    slip.to_vec(),
                    pick(&|i| info.traces[i].hat.total_traction[1]),
                    pick(&|i| info.traces[i].hat.total_traction[2]),
                    pick(&|i| info.traces[i].hat.total_traction[0]),
                    psi.to_vec(),
                ],
            });
        }
    }

    /// `sqrt(Σ_blocks (e_v, e_σ) in the energy norm)` of `y` against the
    /// manufactured solution at time `t`.
    pub fn manufactured_error(&self, y: &[f64], t: f64) -> Option<f64> {
        let forcing = self.system.forcing()?;
        let mut total = 0.0;
        for (b, block) in self.system.blocks().iter().enumerate() {
            let q = self.system.block_state(y, b);
            let n = block.nodes();
            let mut err = vec![0.0; q.len()];
            for idx in 0..n {
                let e = forcing.exact(block.mesh().position(idx), t);
                for f in 0..FIELDS {
                    err[f * n + idx] = q[f * n + idx] - e[f];
                }
            }
            total += 2.0 * block.energy(&err);
        }
        Some(total.sqrt())
    }
}

fn at_step(e: Error, step: usize, t: f64) -> Error {
    match e {
        Error::Divergence { time, .. } => Error::Divergence { step, time: if time.is_finite() { time } else { t } },
        other => other,
    }
}

/// Build and integrate `config`.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let sim = Simulation::new(config)?;
    let (_, out) = sim.run()?;
    log::info!(
        "{}: {} steps, max slip rate {:.4e} m/s, wall time {:.2} s",
        out.summary.name,
        out.summary.steps,
        out.summary.max_slip_rate,
        out.summary.wall_time
    );
    Ok(out)
}
