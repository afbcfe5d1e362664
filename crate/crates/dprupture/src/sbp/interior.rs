//! Interior stencil designs of the upwind and dispersion-optimized families.
//!
//! Every interior stencil of `D+` is written as a central part plus a
//! dissipative part,
//!
//! ```text
//! h D+ = sum_k a_k (E^k - E^-k)  -  sum_l d_l (E^{1/2} - E^{-1/2})^{2l}_sym,  d_l >= 0,
//! ```
//!
//! whose symbol is `i A(t) - sum_l d_l (2 - 2 cos t)^l`. The matching `D-`
//! flips the sign of the dissipative part.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::closure::central_half_stencil;
use crate::error::{Error, Result};

/// Half-width of the optimized interior stencils (9 points).
pub const DRP_HALF_WIDTH: usize = 4;

const DESIGN_SAMPLES: usize = 600;
const CHECK_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorDesign {
    /// Central coefficients `a_1..a_w`.
    pub half_stencil: Vec<f64>,
    /// Dissipation terms `(l, d_l)`.
    pub dissipation: Vec<(usize, f64)>,
}

impl InteriorDesign {
    /// Symbol of `h D+` at `t = kh`.
    pub fn symbol(&self, t: f64) -> Complex64 {
        let a: f64 = self
            .half_stencil
            .iter()
            .enumerate()
            .map(|(k, &c)| 2.0 * c * ((k + 1) as f64 * t).sin())
            .sum();
        let s: f64 = self.dissipation.iter().map(|&(l, d)| -d * (2.0 - 2.0 * t.cos()).powi(l as i32)).sum();
        Complex64::new(s, a)
    }

    /// `(l2 relative, max relative)` error of the paired frequency `|symbol|`
    /// on `samples` uniform points of `(0, pi]`.
    pub fn frequency_errors(&self, samples: usize) -> (f64, f64) {
        frequency_errors(|t| self.symbol(t).norm(), samples)
    }
}

pub(crate) fn frequency_errors(freq: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut worst: f64 = 0.0;
    for i in 1..=samples {
        let t = PI * i as f64 / samples as f64;
        let e = freq(t) - t;
        num += e * e;
        den += t * t;
        worst = worst.max(e.abs() / t);
    }
    ((num / den).sqrt(), worst)
}

/// Interior of the upwind family: the unique minimal-width biased stencils
/// for even orders, and the standard odd-order upwind stencils.
pub fn dp_interior(order: usize) -> Result<InteriorDesign> {
    let design = match order {
        4 => InteriorDesign {
            half_stencil: vec![7.0 / 8.0, -1.0 / 4.0, 1.0 / 24.0],
            dissipation: vec![(3, 1.0 / 24.0)],
        },
        5 => InteriorDesign { half_stencil: central_half_stencil(6).unwrap(), dissipation: vec![(3, 1.0 / 60.0)] },
        6 => InteriorDesign {
            half_stencil: vec![13.0 / 15.0, -4.0 / 15.0, 1.0 / 15.0, -1.0 / 120.0],
            dissipation: vec![(4, 1.0 / 120.0)],
        },
        7 => InteriorDesign { half_stencil: central_half_stencil(8).unwrap(), dissipation: vec![(4, 1.0 / 280.0)] },
        _ => return Err(Error::Unsupported(format!("upwind interior order {order}; expected 4..=7"))),
    };
    Ok(design)
}

/// Parameterization of the optimized interiors: a particular central stencil
/// plus multiples of higher-order corrections, and squared dissipation
/// amplitudes above a floor.
struct DrpProblem {
    base: Vec<f64>,
    corrections: Vec<Vec<f64>>,
    levels: Vec<usize>,
    floors: Vec<f64>,
    alpha: f64,
}

impl DrpProblem {
    fn new(order: usize, alpha: f64) -> Result<Self> {
        let central_order = if order % 2 == 0 { order } else { order + 1 };
        let pad = |mut v: Vec<f64>| {
            v.resize(DRP_HALF_WIDTH, 0.0);
            v
        };
        let base = pad(central_half_stencil(central_order).unwrap());
        let corrections = (central_order / 2 + 1..=DRP_HALF_WIDTH)
            .map(|m| {
                let higher = pad(central_half_stencil(2 * m).unwrap());
                higher.iter().zip(&base).map(|(h, b)| h - b).collect()
            })
            .collect();
        let p = order / 2;
        let levels: Vec<usize> = (p + 1..=DRP_HALF_WIDTH).collect();
        let mut floors = vec![0.0; levels.len()];
        if order % 2 == 1 {
            // Keep the odd-order leading dissipation active.
            floors[0] = dp_interior(order)?.dissipation[0].1 / 4.0;
        }
        Ok(Self { base, corrections, levels, floors, alpha })
    }

    fn dim(&self) -> usize {
        self.corrections.len() + self.levels.len()
    }

    fn design(&self, x: &[f64]) -> InteriorDesign {
        let mut a = self.base.clone();
        for (c, w) in self.corrections.iter().zip(x) {
            for (ak, ck) in a.iter_mut().zip(c) {
                *ak += w * ck;
            }
        }
        let off = self.corrections.len();
        let dissipation = self
            .levels
            .iter()
            .zip(&self.floors)
            .enumerate()
            .map(|(i, (&l, &f))| (l, f + x[off + i] * x[off + i]))
            .collect();
        InteriorDesign { half_stencil: a, dissipation }
    }
}

impl CostFunction for DrpProblem {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (l2, worst) = self.design(x).frequency_errors(DESIGN_SAMPLES);
        let excess = (worst - 0.96 * self.alpha).max(0.0);
        Ok(l2 + 5000.0 * excess * excess)
    }
}

fn nelder_mead(problem: &DrpProblem, start: Vec<f64>, step: f64) -> Result<(Vec<f64>, f64)> {
    let dim = start.len();
    let mut simplex = vec![start.clone()];
    for i in 0..dim {
        let mut v = start.clone();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .map_err(|e| Error::Construction(e.to_string()))?;
    let problem_ref = DrpProblem {
        base: problem.base.clone(),
        corrections: problem.corrections.clone(),
        levels: problem.levels.clone(),
        floors: problem.floors.clone(),
        alpha: problem.alpha,
    };
    let res = Executor::new(problem_ref, solver)
        .configure(|s| s.max_iters(3000))
        .run()
        .map_err(|e| Error::Construction(e.to_string()))?;
    let state = res.state();
    let best = state.get_best_param().cloned().unwrap_or(start);
    Ok((best, state.get_best_cost()))
}

fn optimize_drp(order: usize, alpha: f64) -> Result<InteriorDesign> {
    let problem = DrpProblem::new(order, alpha)?;
    let dim = problem.dim();
    let ncorr = problem.corrections.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xd4b0_0000 + order as u64);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for trial in 0..8 {
        let start: Vec<f64> = (0..dim)
            .map(|i| {
                let centre = if i < ncorr { 0.0 } else { 0.1 };
                if trial == 0 {
                    centre
                } else {
                    centre + rng.gen_range(-0.5..0.5) * if i < ncorr { 1.0 } else { 0.1 }
                }
            })
            .collect();
        let (x, c) = nelder_mead(&problem, start, 0.05)?;
        let (x, c) = {
            let (x2, c2) = nelder_mead(&problem, x.clone(), 0.005)?;
            if c2 < c {
                (x2, c2)
            } else {
                (x, c)
            }
        };
        if best.as_ref().map_or(true, |(_, bc)| c < *bc) {
            best = Some((x, c));
        }
    }
    let (x, _) = best.expect("at least one trial");
    let design = problem.design(&x);
    let (_, worst) = design.frequency_errors(CHECK_SAMPLES);
    if worst > alpha {
        return Err(Error::ToleranceInfeasible { requested: alpha, achieved: worst });
    }
    Ok(design)
}

/// Dispersion-optimized interior of the given order meeting the tolerance on
/// the maximum relative frequency error. Results are cached per request.
pub fn drp_interior(order: usize, alpha: f64) -> Result<InteriorDesign> {
    if !(4..=7).contains(&order) {
        return Err(Error::Unsupported(format!("dispersion-optimized order {order}; expected 4..=7")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Unsupported(format!("tolerance {alpha} outside (0, 1]")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), InteriorDesign>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (order, alpha.to_bits());
    if let Some(d) = cache.lock().unwrap().get(&key) {
        return Ok(d.clone());
    }
    let design = optimize_drp(order, alpha)?;
    cache.lock().unwrap().insert(key, design.clone());
    Ok(design)
}
