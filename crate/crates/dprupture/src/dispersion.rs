//! Modified wavenumbers, parity of the leading truncation error and
//! dispersion-error metrics of interior stencils.
//!
//! For a plane wave `e^{ikx}` an interior row of `D` returns `i k̃ e^{ikx}`.
//! The pair `(D-, D+)` of a first-order system propagates the numerical
//! frequency `|k̃|`, since the symbols satisfy `d- = -conj(d+)`. The error
//! metrics use this modulus, which reduces to `|k̃|` of the single operator for
//! central stencils.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sbp::{SbpOperatorSet, Which};

/// Number of uniform `kh` samples in `(0, π]` used by the error metrics.
pub const METRIC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Minus,
    Plus,
    /// Symbol of `(D+ + D-)/2`.
    Average,
}

/// Interior stencil in unit spacing: `(D f)_j h = Σ_c coefs[c] f_{j+offset+c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSymbol {
    pub offset: isize,
    pub coefs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    PhaseDominated,
    AmplitudeDominated,
}

/// Leading truncation behaviour: `k̃h - kh ≈ β (kh)^{ν+1}` for phase-dominated
/// stencils and `≈ iβ (kh)^{ν+1}` for amplitude-dominated ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityClass {
    pub parity: Parity,
    pub order: usize,
    pub beta: f64,
    /// Fitted log-log slope of `|k̃h - kh|`.
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionErrors {
    pub l2_relative: f64,
    pub max_relative: f64,
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

impl StencilSymbol {
    pub fn new(offset: isize, coefs: Vec<f64>) -> Self {
        Self { offset, coefs }
    }

    fn taps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coefs.iter().enumerate().map(move |(c, &w)| ((self.offset + c as isize) as f64, w))
    }

    /// `k̃h` at `kh`.
    pub fn eval(&self, kh: f64) -> Complex64 {
        let s: Complex64 = self.taps().map(|(j, w)| Complex64::from_polar(w, j * kh)).sum();
        s / Complex64::i()
    }

    /// Moments `Σ_j c_j j^m` with round-off-level values set to zero.
    fn moments(&self, count: usize) -> Vec<f64> {
        (0..count)
            .map(|m| {
                let (sum, mag) = self.taps().fold((0.0, 0.0), |(s, a), (j, w)| {
                    let t = w * j.powi(m as i32);
                    (s + t, a + t.abs())
                });
                if sum.abs() <= 1e-11 * mag.max(1.0) {
                    0.0
                } else {
                    sum
                }
            })
            .collect()
    }

    /// `k̃h - kh` evaluated through its Taylor series, accurate for small `kh`
    /// where direct evaluation loses all digits.
    pub fn error_series(&self, kh: f64) -> Complex64 {
        let moments = self.moments(32);
        let mut total = Complex64::new(0.0, 0.0);
        let mut ipow = Complex64::i(); // i^{m-1} at m = 2
        for (m, &mm) in moments.iter().enumerate().skip(2) {
            total += ipow * (mm * kh.powi(m as i32) / factorial(m));
            ipow *= Complex64::i();
        }
        total
    }

    pub fn is_consistent(&self) -> bool {
        let m = self.moments(2);
        m[0] == 0.0 && (m[1] - 1.0).abs() < 1e-10
    }
}

/// Interior symbol of `D-`, `D+` or their average.
pub fn interior_symbol(ops: &SbpOperatorSet, kind: SymbolKind) -> Result<StencilSymbol> {
    let pick = |which| -> Result<StencilSymbol> {
        let op = ops.op(which);
        if op.left_rows().len() + op.right_rows().len() >= op.len() {
            return Err(Error::Malformed("operator has no translation-invariant interior".into()));
        }
        let st = op.interior();
        Ok(StencilSymbol::new(st.offset, st.coefs.iter().map(|c| c * ops.h()).collect()))
    };
    match kind {
        SymbolKind::Minus => pick(Which::Minus),
        SymbolKind::Plus => pick(Which::Plus),
        SymbolKind::Average => {
            let a = pick(Which::Minus)?;
            let b = pick(Which::Plus)?;
            let lo = a.offset.min(b.offset);
            let hi = (a.offset + a.coefs.len() as isize).max(b.offset + b.coefs.len() as isize);
            let mut coefs = vec![0.0; (hi - lo) as usize];
            for s in [&a, &b] {
                for (c, &w) in s.coefs.iter().enumerate() {
                    coefs[(s.offset - lo) as usize + c] += 0.5 * w;
                }
            }
            Ok(StencilSymbol::new(lo, coefs))
        }
    }
}

/// Fit the leading error term on `kh ∈ [1e-3, 1e-2]` and classify it.
pub fn classify_parity(sym: &StencilSymbol) -> Result<ParityClass> {
    if !sym.is_consistent() {
        return Err(Error::SymbolFit("stencil is not a consistent first derivative".into()));
    }
    let samples = 16;
    let (lo, hi) = (1e-3f64.ln(), 1e-2f64.ln());
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let e = sym.error_series(x.exp()).norm();
        if e == 0.0 || !e.is_finite() {
            return Err(Error::SymbolFit("error vanishes to round-off in the fit window".into()));
        }
        pts.push((x, e.ln()));
    }
    let n = samples as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let rounded = slope.round();
    if (slope - rounded).abs() > 0.2 || rounded < 2.0 {
        return Err(Error::SymbolFit(format!("non-integer leading slope {slope:.3}")));
    }
    let order = rounded as usize - 1;
    let m = order + 1;
    let moment = sym.moments(m + 1)[m];
    if moment == 0.0 {
        return Err(Error::SymbolFit(format!("fitted slope {slope:.3} does not match a nonzero moment")));
    }
    // i^{m-1} = i^order
    let coef = moment / factorial(m);
    let (parity, beta) = match order % 4 {
        0 => (Parity::PhaseDominated, coef),
        1 => (Parity::AmplitudeDominated, coef),
        2 => (Parity::PhaseDominated, -coef),
        _ => (Parity::AmplitudeDominated, -coef),
    };
    Ok(ParityClass { parity, order, beta, slope })
}

/// Relative dispersion errors of the paired frequency `|k̃h|` against `kh`
/// on [`METRIC_SAMPLES`] uniform points of `(0, π]`.
pub fn dispersion_errors(ops: &SbpOperatorSet) -> Result<DispersionErrors> {
    let sym = interior_symbol(ops, SymbolKind::Plus)?;
    Ok(symbol_errors(&sym, METRIC_SAMPLES))
}

pub fn symbol_errors(sym: &StencilSymbol, samples: usize) -> DispersionErrors {
    let (l2_relative, max_relative) = crate::sbp::interior::frequency_errors(|t| sym.eval(t).norm(), samples);
    DispersionErrors { l2_relative, max_relative }
}

/// One row per sample: `(kh, Re k̃h, Im k̃h, relative error of |k̃h|)`.
pub fn dispersion_table(ops: &SbpOperatorSet, samples: usize) -> Result<Vec<[f64; 4]>> {
    let sym = interior_symbol(ops, SymbolKind::Plus)?;
    Ok((1..=samples)
        .map(|i| {
            let kh = PI * i as f64 / samples as f64;
            let k = sym.eval(kh);
            [kh, k.re, k.im, (k.norm() - kh).abs() / kh]
        })
        .collect())
}
