//! Separable trigonometric exact solutions for the isotropic elastic
//! equations, with the volume source that makes them exact.

use crate::elastic::{traction, FIELDS};
use crate::mesh::{rotate, Mat3, Vec3};
use crate::system::Forcing;
use crate::time_driver::config::{ManufacturedConfig, MaterialConfig};

/// Each field is `A_c cos(ωt + θ_c) Π_d sin(k x_d + φ_cd)`.
#[derive(Debug, Clone)]
pub struct TrigSolution {
    wavenumber: f64,
    frequency: f64,
    amplitude: [f64; FIELDS],
    time_phase: [f64; FIELDS],
    space_phase: [[f64; 3]; FIELDS],
    /// `(ρ, λ, μ)` per block.
    materials: Vec<(f64, f64, f64)>,
}

impl TrigSolution {
    pub fn new(cfg: &ManufacturedConfig, materials: &[MaterialConfig]) -> Self {
        let reference = materials.first().map_or(1.0, |m| m.rho * m.cs);
        let mut amplitude = [0.0; FIELDS];
        let mut time_phase = [0.0; FIELDS];
        let mut space_phase = [[0.0; 3]; FIELDS];
        for c in 0..FIELDS {
            let scale = if c < 3 { 1.0 } else { reference };
            amplitude[c] = cfg.amplitude * scale * (1.0 + 0.1 * c as f64);
            time_phase[c] = 0.3 + 0.7 * c as f64;
            for (d, p) in space_phase[c].iter_mut().enumerate() {
                *p = 0.4 + 0.37 * c as f64 + 1.1 * d as f64;
            }
        }
        let materials = materials
            .iter()
            .map(|m| {
                let mu = m.rho * m.cs * m.cs;
                (m.rho, m.rho * m.cp * m.cp - 2.0 * mu, mu)
            })
            .collect();
        Self { wavenumber: cfg.wavenumber, frequency: cfg.frequency, amplitude, time_phase, space_phase, materials }
    }

    fn value(&self, c: usize, x: Vec3, t: f64) -> f64 {
        let k = self.wavenumber;
        let s: f64 = (0..3).map(|d| (k * x[d] + self.space_phase[c][d]).sin()).product();
        self.amplitude[c] * (self.frequency * t + self.time_phase[c]).cos() * s
    }

    fn time_derivative(&self, c: usize, x: Vec3, t: f64) -> f64 {
        let k = self.wavenumber;
        let s: f64 = (0..3).map(|d| (k * x[d] + self.space_phase[c][d]).sin()).product();
        -self.amplitude[c] * self.frequency * (self.frequency * t + self.time_phase[c]).sin() * s
    }

    fn gradient(&self, c: usize, x: Vec3, t: f64) -> Vec3 {
        let k = self.wavenumber;
        let arg = |d: usize| k * x[d] + self.space_phase[c][d];
        let amp = self.amplitude[c] * (self.frequency * t + self.time_phase[c]).cos();
        let mut g = [0.0; 3];
        for (d, gd) in g.iter_mut().enumerate() {
            let mut p = amp * k * arg(d).cos();
            for e in (0..3).filter(|&e| e != d) {
                p *= arg(e).sin();
            }
            *gd = p;
        }
        g
    }
}

impl Forcing for TrigSolution {
    fn exact(&self, x: Vec3, t: f64) -> [f64; FIELDS] {
        std::array::from_fn(|c| self.value(c, x, t))
    }

    fn source(&self, block: usize, x: Vec3, t: f64) -> [f64; FIELDS] {
        let (rho, lambda, mu) = self.materials[block.min(self.materials.len() - 1)];
        let grad: [Vec3; FIELDS] = std::array::from_fn(|c| self.gradient(c, x, t));
        let mut out: [f64; FIELDS] = std::array::from_fn(|c| self.time_derivative(c, x, t));
        // Voigt: xx yy zz xy xz yz at 3..9
        let div = [
            grad[3][0] + grad[6][1] + grad[7][2],
            grad[6][0] + grad[4][1] + grad[8][2],
            grad[7][0] + grad[8][1] + grad[5][2],
        ];
        for i in 0..3 {
            out[i] -= div[i] / rho;
        }
        let (dvx, dvy, dvz) = (grad[0], grad[1], grad[2]);
        let trace = dvx[0] + dvy[1] + dvz[2];
        out[3] -= lambda * trace + 2.0 * mu * dvx[0];
        out[4] -= lambda * trace + 2.0 * mu * dvy[1];
        out[5] -= lambda * trace + 2.0 * mu * dvz[2];
        out[6] -= mu * (dvx[1] + dvy[0]);
        out[7] -= mu * (dvx[2] + dvz[0]);
        out[8] -= mu * (dvy[2] + dvz[1]);
        out
    }

    /// Cancels the exact tangential traction so that the exact solution,
    /// continuous across the fault, satisfies `T₀ + T = α⟦v⟧ = 0`.
    fn fault_prestress(&self, x: Vec3, rotation: &Mat3, t: f64) -> Option<Vec3> {
        let e = self.exact(x, t);
        let sigma = [e[3], e[4], e[5], e[6], e[7], e[8]];
        let local = rotate(traction(&sigma, rotation[0]), rotation);
        Some([0.0, -local[1], -local[2]])
    }
}
