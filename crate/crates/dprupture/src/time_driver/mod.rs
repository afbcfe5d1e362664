//! Time integration and run orchestration.

pub mod config;
mod output;
mod setup;

pub use config::RunConfig;
pub use output::{EnergyRecord, FaultSnapshot, RunOutput, Seismogram, Summary, SEISMOGRAM_HEADER};
pub use setup::{run, Simulation};

use crate::elastic::ElasticBlock;
use crate::error::{Error, Result};
use crate::mesh::dot;
use crate::sbp::Axis;

/// Five-stage fourth-order 2N-storage Runge–Kutta coefficients of
/// Carpenter and Kennedy (NASA TM-109112, 1994, solution 3). The third
/// stage time is the value implied by `A` and `B`; the published fraction
/// 2526269341429/6820363183101 differs from it by 4e-8.
pub const LSRK_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
pub const LSRK_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];
pub const LSRK_C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    0.370_400_957_364_204_75,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

/// Scratch registers for [`Lsrk45::step`].
#[derive(Debug, Clone)]
pub struct Lsrk45 {
    du: Vec<f64>,
    dy: Vec<f64>,
}

impl Lsrk45 {
    pub fn new(len: usize) -> Self {
        Self { du: vec![0.0; len], dy: vec![0.0; len] }
    }

    /// Advance `y` from `t` to `t + dt`. `rhs(stage, t, y, dy)` fills `dy`.
    pub fn step<F>(&mut self, t: f64, dt: f64, y: &mut [f64], mut rhs: F) -> Result<()>
    where
        F: FnMut(usize, f64, &[f64], &mut [f64]) -> Result<()>,
    {
        debug_assert_eq!(y.len(), self.du.len());
        self.du.fill(0.0);
        for stage in 0..5 {
            rhs(stage, t + LSRK_C[stage] * dt, y, &mut self.dy)?;
            let (a, b) = (LSRK_A[stage], LSRK_B[stage]);
            for ((u, yi), d) in self.du.iter_mut().zip(y.iter_mut()).zip(&self.dy) {
                *u = a * *u + dt * d;
                *yi += b * *u;
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { step: 0, time: t + LSRK_C[stage] * dt });
            }
        }
        Ok(())
    }
}

/// One step with freshly allocated scratch.
pub fn lsrk45_step<F>(t: f64, y: &mut [f64], dt: f64, rhs: F) -> Result<()>
where
    F: FnMut(usize, f64, &[f64], &mut [f64]) -> Result<()>,
{
    Lsrk45::new(y.len()).step(t, dt, y, rhs)
}

/// `CFL · min sqrt(h_ξ² / ((c_p² + c_s²) |∇ξ|²))` over nodes and axes.
pub fn compute_dt(blocks: &[ElasticBlock], cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("CFL must lie in (0, 1], got {cfl}")));
    }
    let mut best = f64::INFINITY;
    for block in blocks {
        let mesh = block.mesh();
        let spacing = mesh.spacing();
        for idx in 0..mesh.len() {
            let (cp, cs) = (block.material().cp(idx), block.material().cs(idx));
            let mut degenerate = true;
            for axis in Axis::ALL {
                let g = mesh.gradient(axis, idx);
                let g2 = dot(g, g);
                if g2 == 0.0 {
                    continue;
                }
                degenerate = false;
                let h = spacing[axis.index()];
                best = best.min((h * h / ((cp * cp + cs * cs) * g2)).sqrt());
            }
            if degenerate {
                return Err(Error::Dimension(format!("degenerate metric at node {idx}")));
            }
        }
    }
    Ok(cfl * best)
}
