//! Spectral content of fault time series.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Power spectrum of a mean-removed, Hann-windowed trace: `(f, |X(f)|²)`
/// for the non-negative frequencies.
pub fn power_spectrum(trace: &[f64], dt: f64) -> Vec<(f64, f64)> {
    let n = trace.len();
    if n < 2 {
        return Vec::new();
    }
    let mean = trace.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = trace
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
            Complex64::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dt);
    (0..=n / 2).map(|k| (k as f64 * df, buf[k].norm_sqr())).collect()
}

/// Fraction of the spectral energy in `(0, f_max]` that lies in the top
/// octave `[f_max/2, f_max]`. `f_max` is usually the highest frequency a
/// wave can carry on the grid, `c_s / (2h)`.
pub fn high_frequency_fraction(trace: &[f64], dt: f64, f_max: f64) -> f64 {
    let spec = power_spectrum(trace, dt);
    let (mut top, mut all) = (0.0, 0.0);
    for &(f, p) in spec.iter().skip(1) {
        if f > f_max {
            break;
        }
        all += p;
        if f >= 0.5 * f_max {
            top += p;
        }
    }
    if all > 0.0 {
        top / all
    } else {
        0.0
    }
}
