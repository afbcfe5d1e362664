//! The full semi-discrete right-hand side: interior terms of every block,
//! exterior penalties, the fault interface and the friction state rates.
//!
//! The global state is one flat vector: each block's field-major state in
//! order, then four arrays over the fault nodes holding slip `S`, the state
//! variable `ψ` and the dip and strike slip components.

use std::sync::Arc;

use rayon::prelude::*;

use crate::coupling::{sat_exterior, EnergyDiagnostics, ExteriorCondition, FaultInterface, FaultTrace};
use crate::elastic::{traction, ElasticBlock, Workspace, FIELDS};
use crate::error::{Error, Result};
use crate::friction::NodeState;
use crate::mesh::{dot, Face, Mat3, Vec3};

/// Manufactured solution driving a verification run.
pub trait Forcing: Send + Sync {
    /// Exact `(v, σ)` at a point.
    fn exact(&self, x: Vec3, t: f64) -> [f64; FIELDS];
    /// `∂t Q − L Q` of the exact solution in block `block`.
    fn source(&self, block: usize, x: Vec3, t: f64) -> [f64; FIELDS];
    /// Initial traction that makes the exact solution satisfy the fault law.
    fn fault_prestress(&self, _x: Vec3, _rotation: &Mat3, _t: f64) -> Option<Vec3> {
        None
    }
}

pub const FAULT_ARRAYS: usize = 4;

/// Output of one right-hand-side evaluation.
#[derive(Debug, Clone, Default)]
pub struct RhsInfo {
    pub traces: Vec<FaultTrace>,
    pub clamped: usize,
    pub diagnostics: Option<EnergyDiagnostics>,
}

pub struct RuptureSystem {
    blocks: Vec<ElasticBlock>,
    boundaries: Vec<[ExteriorCondition; 6]>,
    fault: Option<FaultInterface>,
    forcing: Option<Arc<dyn Forcing>>,
    clamp_tensile: bool,
    offsets: Vec<usize>,
    raw: std::sync::Mutex<Scratch>,
}

#[derive(Default)]
struct Scratch {
    work: Vec<Workspace>,
    data: Vec<(Vec3, Vec3)>,
    prestress: Vec<Vec3>,
}

impl std::fmt::Debug for RuptureSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RuptureSystem")
            .field("blocks", &self.blocks.len())
            .field("fault_nodes", &self.fault.as_ref().map_or(0, |x| x.len()))
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl RuptureSystem {
    /// One block, or two blocks joined by a fault on the first reference
    /// axis. Boundary conditions are listed in `Face::all()` order; the
    /// entries of fault faces are ignored.
    pub fn new(
        blocks: Vec<ElasticBlock>,
        boundaries: Vec<[ExteriorCondition; 6]>,
        fault: Option<FaultInterface>,
    ) -> Result<Self> {
        if blocks.is_empty() || blocks.len() > 2 || boundaries.len() != blocks.len() {
            return Err(Error::Config("one or two blocks, each with six boundary conditions".into()));
        }
        if (blocks.len() == 2) != fault.is_some() {
            return Err(Error::Config("two blocks require a fault and one block must not have one".into()));
        }
        let mut offsets = vec![0];
        for b in &blocks {
            offsets.push(offsets.last().copied().unwrap_or(0) + b.state_len());
        }
        let work = blocks.iter().map(|b| Workspace::new(b.nodes())).collect();
        Ok(Self {
            blocks,
            boundaries,
            fault,
            forcing: None,
            clamp_tensile: true,
            offsets,
            raw: std::sync::Mutex::new(Scratch { work, ..Default::default() }),
        })
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    /// Reject tensile normal stress on the fault instead of clamping it.
    pub fn strict_tensile(mut self) -> Self {
        self.clamp_tensile = false;
        self
    }

    pub fn blocks(&self) -> &[ElasticBlock] {
        &self.blocks
    }

    pub fn fault(&self) -> Option<&FaultInterface> {
        self.fault.as_ref()
    }

    pub fn forcing(&self) -> Option<&Arc<dyn Forcing>> {
        self.forcing.as_ref()
    }

    pub fn fault_len(&self) -> usize {
        self.fault.as_ref().map_or(0, |f| f.len())
    }

    pub fn state_len(&self) -> usize {
        self.offsets[self.blocks.len()] + FAULT_ARRAYS * self.fault_len()
    }

    pub fn zero_state(&self) -> Vec<f64> {
        vec![0.0; self.state_len()]
    }

    pub fn block_state<'a>(&self, y: &'a [f64], b: usize) -> &'a [f64] {
        &y[self.offsets[b]..self.offsets[b + 1]]
    }

    pub fn block_state_mut<'a>(&self, y: &'a mut [f64], b: usize) -> &'a mut [f64] {
        &mut y[self.offsets[b]..self.offsets[b + 1]]
    }

    /// Fault array `which` (0 slip, 1 ψ, 2 dip slip, 3 strike slip).
    pub fn fault_array<'a>(&self, y: &'a [f64], which: usize) -> &'a [f64] {
        let n = self.fault_len();
        let start = self.offsets[self.blocks.len()] + which * n;
        &y[start..start + n]
    }

    pub fn fault_array_mut<'a>(&self, y: &'a mut [f64], which: usize) -> &'a mut [f64] {
        let n = self.fault_len();
        let start = self.offsets[self.blocks.len()] + which * n;
        &mut y[start..start + n]
    }

    /// Fill the block states with the exact solution of the forcing.
    pub fn project_exact(&self, y: &mut [f64], t: f64) {
        let Some(forcing) = &self.forcing else { return };
        for (b, block) in self.blocks.iter().enumerate() {
            let n = block.nodes();
            let q = self.block_state_mut(y, b);
            for idx in 0..n {
                let e = forcing.exact(block.mesh().position(idx), t);
                for f in 0..FIELDS {
                    q[f * n + idx] = e[f];
                }
            }
        }
    }

    fn is_fault_face(&self, b: usize, face: Face) -> bool {
        self.fault.is_some() && face.axis.index() == 0 && face.high == (b == 0)
    }

    /// Evaluate `dy = F(t, y)`; with `diagnostics` the energy terms are
    /// gathered as well.
    pub fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64], diagnostics: bool) -> Result<RhsInfo> {
        let mut scratch = self.raw.lock().unwrap_or_else(|e| e.into_inner());
        let Scratch { work, data, prestress } = &mut *scratch;
        let mut info = RhsInfo::default();
        let split = self.offsets[self.blocks.len()];
        let (dblocks, dfault) = dy.split_at_mut(split);
        {
            let mut rest = &mut dblocks[..];
            let mut outs = Vec::with_capacity(self.blocks.len());
            for b in &self.blocks {
                let (head, tail) = rest.split_at_mut(b.state_len());
                outs.push(head);
                rest = tail;
            }
            outs.par_iter_mut().zip(work.par_iter_mut()).enumerate().for_each(|(b, (out, w))| {
                self.blocks[b].rhs_raw(self.block_state(y, b), out, w);
            });
            let mut exterior = 0.0;
            for (b, block) in self.blocks.iter().enumerate() {
                let q = self.block_state(y, b);
                for (fi, face) in Face::all().into_iter().enumerate() {
                    if self.is_fault_face(b, face) {
                        continue;
                    }
                    let cond = self.boundaries[b][fi];
                    let face_data = match &self.forcing {
                        Some(forcing) if cond != ExteriorCondition::Unconstrained => {
                            data.clear();
                            for idx in face.node_indices(block.mesh().dims()) {
                                let e = forcing.exact(block.mesh().position(idx), t);
                                let g = block.mesh().gradient(face.axis, idx);
                                let gn = dot(g, g).sqrt();
                                let sigma = [e[3], e[4], e[5], e[6], e[7], e[8]];
                                let n = [g[0] / gn, g[1] / gn, g[2] / gn];
                                data.push(([e[0], e[1], e[2]], traction(&sigma, n)));
                            }
                            Some(&data[..])
                        }
                        _ => None,
                    };
                    exterior += sat_exterior(block, q, face, cond, face_data, outs[b]);
                }
            }
            if let Some(fault) = &self.fault {
                let nf = fault.len();
                let states: Vec<NodeState> = (0..nf)
                    .map(|i| NodeState { slip: self.fault_array(y, 0)[i], psi: self.fault_array(y, 1)[i] })
                    .collect();
                let override_prestress = match &self.forcing {
                    Some(forcing) => {
                        prestress.clear();
                        for node in 0..nf {
                            let x = self.blocks[0].mesh().position(fault.frame().nodes[node]);
                            let r = &fault.frame().rotation[node];
                            prestress.push(forcing.fault_prestress(x, r, t).unwrap_or(fault.prestress()[node]));
                        }
                        Some(&prestress[..])
                    }
                    None => None,
                };
                let traces = fault.evaluate(
                    &self.blocks[0],
                    self.block_state(y, 0),
                    &self.blocks[1],
                    self.block_state(y, 1),
                    &states,
                    override_prestress,
                    self.clamp_tensile,
                )?;
                let (om, op) = outs.split_at_mut(1);
                fault.apply(&self.blocks[0], om[0], &self.blocks[1], op[0], &traces);
                for (i, tr) in traces.iter().enumerate() {
                    let v = tr.hat.slip_rate;
                    dfault[i] = v;
                    dfault[nf + i] = fault.models()[i].state_rate(v, states[i].psi)?;
                    dfault[2 * nf + i] = tr.hat.jump[1];
                    dfault[3 * nf + i] = tr.hat.jump[2];
                }
                info.clamped = traces.iter().filter(|t| t.clamped).count();
                if diagnostics {
                    let fr = fault.rates(&traces, override_prestress);
                    info.diagnostics = Some(EnergyDiagnostics { fault: fr, ..Default::default() });
                }
                info.traces = traces;
            }
            outs.par_iter_mut().enumerate().for_each(|(b, out)| self.blocks[b].finalize(out));
            let mut forcing_work = 0.0;
            if let Some(forcing) = &self.forcing {
                for (b, block) in self.blocks.iter().enumerate() {
                    let n = block.nodes();
                    let out = &mut outs[b];
                    for idx in 0..n {
                        let s = forcing.source(b, block.mesh().position(idx), t);
                        for f in 0..FIELDS {
                            out[f * n + idx] += s[f];
                        }
                    }
                    if diagnostics {
                        let mut src = vec![0.0; block.state_len()];
                        for idx in 0..n {
                            let s = forcing.source(b, block.mesh().position(idx), t);
                            for f in 0..FIELDS {
                                src[f * n + idx] = s[f];
                            }
                        }
                        forcing_work += block.energy_rate(self.block_state(y, b), &src);
                    }
                }
            }
            if diagnostics {
                let mut d = info.diagnostics.unwrap_or_default();
                d.exterior = exterior;
                d.forcing = forcing_work;
                for (b, block) in self.blocks.iter().enumerate() {
                    let q = self.block_state(y, b);
                    d.energy += block.energy(q);
                    d.rate += block.energy_rate(q, outs[b]);
                }
                info.diagnostics = Some(d);
            }
        }
        if dy.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: 0, time: t });
        }
        Ok(info)
    }

    /// `E_total = E − Σ I(T₀ · slip)`: the elastic energy plus the work of
    /// the initial traction, non-increasing for a dissipative fault.
    pub fn total_energy(&self, y: &[f64]) -> f64 {
        let mut e: f64 = self.blocks.iter().enumerate().map(|(b, blk)| blk.energy(self.block_state(y, b))).sum();
        if let Some(fault) = &self.fault {
            let (dip, strike) = (self.fault_array(y, 2), self.fault_array(y, 3));
            for node in 0..fault.len() {
                let t0 = fault.prestress()[node];
                e -= fault.weights()[node] * (t0[1] * dip[node] + t0[2] * strike[node]);
            }
        }
        e
    }
}
