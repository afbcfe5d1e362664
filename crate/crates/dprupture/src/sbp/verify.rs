use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SbpOperatorSet, Which};

pub const SBP_TOLERANCE: f64 = 1e-11;
pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const ACCURACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// All norm weights strictly positive; other checks are skipped otherwise.
    pub norm_positive: bool,
    /// Worst `|(D+f)ᵀHg + fᵀH(D-g) - (f_n g_n - f_0 g_0)| / (|f|∞ |g|∞)` over random pairs.
    pub sbp_residual: Option<f64>,
    pub s_plus_max: Option<f64>,
    pub s_minus_min: Option<f64>,
    /// Worst relative monomial residual on boundary rows, per degree `0..=γ`.
    pub boundary_accuracy: Vec<f64>,
    /// Worst relative monomial residual on interior rows, per degree `0..=ν`.
    pub interior_accuracy: Vec<f64>,
    pub verified: bool,
}

fn sbp_residual(ops: &SbpOperatorSet, pairs: usize) -> f64 {
    let size = ops.nodes();
    let h = ops.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b9);
    let mut dpf = vec![0.0; size];
    let mut dmg = vec![0.0; size];
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let f: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ops.plus().apply(&f, &mut dpf);
        ops.minus().apply(&g, &mut dmg);
        let lhs: f64 = (0..size).map(|i| dpf[i] * h[i] * g[i] + f[i] * h[i] * dmg[i]).sum();
        let rhs = f[size - 1] * g[size - 1] - f[0] * g[0];
        let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs())) * g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

/// Worst relative residual of `D x^p = p x^{p-1}` over the selected rows.
fn monomial_residual(ops: &SbpOperatorSet, which: Which, degree: usize, rows: &[usize]) -> f64 {
    let size = ops.nodes();
    let x: Vec<f64> = (0..size).map(|i| i as f64 * ops.h()).collect();
    let f: Vec<f64> = x.iter().map(|&xi| xi.powi(degree as i32)).collect();
    let exact: Vec<f64> =
        x.iter().map(|&xi| if degree == 0 { 0.0 } else { degree as f64 * xi.powi(degree as i32 - 1) }).collect();
    let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut d = vec![0.0; size];
    ops.op(which).apply(&f, &mut d);
    rows.iter().map(|&i| (d[i] - exact[i]).abs() / scale).fold(0.0, f64::max)
}

pub fn verify_operator(ops: &SbpOperatorSet) -> VerificationReport {
    let norm_positive = ops.norm().iter().all(|&w| w > 0.0 && w.is_finite());
    if !norm_positive {
        return VerificationReport {
            norm_positive,
            sbp_residual: None,
            s_plus_max: None,
            s_minus_min: None,
            boundary_accuracy: Vec::new(),
            interior_accuracy: Vec::new(),
            verified: false,
        };
    }
    let sbp = sbp_residual(ops, 100);
    let (s_plus_max, s_minus_min) = ops.dissipation_extremes();
    let size = ops.nodes();
    let mut boundary_rows = Vec::new();
    let mut interior_rows = Vec::new();
    for which in [Which::Minus, Which::Plus] {
        let op = ops.op(which);
        let nl = op.left_rows().len();
        let nr = op.right_rows().len();
        boundary_rows.push((which, (0..nl).chain(size - nr..size).collect::<Vec<_>>()));
        interior_rows.push((which, (nl..size - nr).collect::<Vec<_>>()));
    }
    let worst_over = |rows: &[(Which, Vec<usize>)], degree| {
        rows.iter().map(|(w, r)| monomial_residual(ops, *w, degree, r)).fold(0.0, f64::max)
    };
    let boundary_accuracy: Vec<f64> = (0..=ops.boundary_order()).map(|p| worst_over(&boundary_rows, p)).collect();
    let interior_accuracy: Vec<f64> = (0..=ops.interior_order()).map(|p| worst_over(&interior_rows, p)).collect();
    let verified = sbp < SBP_TOLERANCE
        && s_plus_max <= EIGEN_TOLERANCE
        && s_minus_min >= -EIGEN_TOLERANCE
        && boundary_accuracy.iter().chain(&interior_accuracy).all(|&r| r < ACCURACY_TOLERANCE);
    VerificationReport {
        norm_positive,
        sbp_residual: Some(sbp),
        s_plus_max: Some(s_plus_max),
        s_minus_min: Some(s_minus_min),
        boundary_accuracy,
        interior_accuracy,
        verified,
    }
}
