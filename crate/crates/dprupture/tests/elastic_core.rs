use std::sync::Arc;

use dprupture::elastic::{ElasticBlock, Material, Workspace, FIELDS};
use dprupture::mesh::{CurvilinearBlock, Face, Mapping, MetricMethod, Side};
use dprupture::sbp::{apply_axis, Axis, Family, GridFunction3D, SbpOperatorSet, Which};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn block(map: &Mapping, family: Family, order: usize, n: usize) -> ElasticBlock {
    let dims = [n + 1; 3];
    let mesh = CurvilinearBlock::build(map, dims, MetricMethod::Analytic).unwrap();
    let mat = Material::homogeneous(mesh.len(), 2.67, 6.0, 3.464).unwrap();
    let ops = Arc::new(SbpOperatorSet::build(family, order, n, None).unwrap());
    ElasticBlock::new(mesh, mat, [ops.clone(), ops.clone(), ops]).unwrap()
}

fn dipping() -> Mapping {
    Mapping::dipping(Side::Minus, 2.0, 1.5, 1.0, -0.3, 60.0)
}

fn random_state(b: &ElasticBlock, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..b.state_len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn constant_state_has_zero_rate() {
    let b = block(&dipping(), Family::DpUpwind, 5, 16);
    let n = b.nodes();
    let mut q = vec![0.0; b.state_len()];
    let values = [1.0, -2.0, 0.5, 3.0, -1.0, 2.0, 0.25, -0.75, 1.5];
    for (f, v) in values.iter().enumerate() {
        q[f * n..(f + 1) * n].fill(*v);
    }
    let mut out = vec![0.0; q.len()];
    b.rhs_interior(&q, &mut out, &mut Workspace::new(n)).unwrap();
    let worst = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn uniform_motion_energy() {
    // unit cube, ρ = 2, v_x = 1: E = ½ ρ |v|² · volume = 1
    let mesh = CurvilinearBlock::build(&Mapping::Identity, [9, 9, 9], MetricMethod::Analytic).unwrap();
    let mat = Material::new(vec![2.0; mesh.len()], vec![1.0; mesh.len()], vec![1.0; mesh.len()]).unwrap();
    let ops = Arc::new(SbpOperatorSet::build_traditional(4, 8).unwrap());
    let b = ElasticBlock::new(mesh, mat, [ops.clone(), ops.clone(), ops]).unwrap();
    let mut q = vec![0.0; b.state_len()];
    q[..b.nodes()].fill(1.0);
    assert!((b.energy(&q) - 1.0).abs() < 1e-13);
}

#[test]
fn energy_matches_dense_sum() {
    let b = block(&dipping(), Family::Drp, 4, 16);
    let q = random_state(&b, 3);
    let s = b.material().compliance(0);
    let n = b.nodes();
    let mut want = 0.0;
    for idx in 0..n {
        let v: Vec<f64> = (0..3).map(|c| q[c * n + idx]).collect();
        let sig: Vec<f64> = (3..9).map(|c| q[c * n + idx]).collect();
        let kinetic = b.material().rho(idx) * v.iter().map(|x| x * x).sum::<f64>();
        let strain: f64 = (0..6).map(|i| (0..6).map(|j| sig[i] * s[i][j] * sig[j]).sum::<f64>()).sum();
        want += 0.5 * b.weights()[idx] * b.mesh().jacobian()[idx] * (kinetic + strain);
    }
    assert!((b.energy(&q) - want).abs() < 1e-12 * want);
}

#[test]
fn energy_rate_equals_boundary_power() {
    for (family, order) in [(Family::DpUpwind, 4), (Family::DpUpwind, 7), (Family::Drp, 6), (Family::Traditional, 4)] {
        let b = block(&dipping(), family, order, 20);
        let q = random_state(&b, 11);
        let mut dq = vec![0.0; q.len()];
        b.rhs_interior(&q, &mut dq, &mut Workspace::new(b.nodes())).unwrap();
        let rate = b.energy_rate(&q, &dq);
        let boundary: f64 = Face::all()
            .iter()
            .map(|&f| if f.high { b.boundary_power(&q, f) } else { -b.boundary_power(&q, f) })
            .sum();
        let scale = b.energy(&q);
        assert!((rate - boundary).abs() < 1e-11 * scale, "{family} {order}: {rate} vs {boundary}");
    }
}

#[test]
fn flux_pairing_is_skew() {
    // Σ_ξ (D+_ξ v)ᵀ H F_ξ(Q) = Σ_ξ Qᵀ H B_ξ(D+_ξ v) holds node by node
    let b = block(&dipping(), Family::DpUpwind, 6, 24);
    let q = random_state(&b, 5);
    let n = b.nodes();
    let dims = b.mesh().dims();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for axis in Axis::ALL {
        let dv: Vec<GridFunction3D> = (0..3)
            .map(|c| {
                let f = GridFunction3D::new(dims, q[c * n..(c + 1) * n].to_vec()).unwrap();
                apply_axis(b.ops(axis), Which::Plus, axis, &f).unwrap()
            })
            .collect();
        for idx in 0..n {
            let w = [dv[0].values()[idx], dv[1].values()[idx], dv[2].values()[idx]];
            let f = b.flux_f(&q, axis, idx);
            let bb = b.flux_b(w, axis, idx);
            let h = b.weights()[idx];
            lhs += h * (0..3).map(|i| w[i] * f[i]).sum::<f64>();
            rhs += h * (3..FIELDS).map(|i| q[i * n + idx] * bb[i]).sum::<f64>();
        }
    }
    assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
}

/// Worst interior truncation error for a shear wave on a sheared box.
fn truncation(family: Family, order: usize, n: usize) -> f64 {
    let map = Mapping::Affine { origin: [0.0; 3], matrix: [[1.0, 0.3, 0.0], [0.0, 1.0, 0.0], [0.0, 0.2, 1.0]] };
    let b = block(&map, family, order, n);
    let (rho, cs) = (2.67, 3.464);
    let mu = rho * cs * cs;
    let k = 2.0;
    let nodes = b.nodes();
    let mut q = vec![0.0; b.state_len()];
    let mut want = vec![0.0; b.state_len()];
    // v_y = sin(k(x - cs t)), σ_xy = -ρ cs v_y
    for idx in 0..nodes {
        let x = b.mesh().position(idx)[0];
        let (s, c) = (k * x).sin_cos();
        q[nodes + idx] = s;
        q[6 * nodes + idx] = -rho * cs * s;
        want[nodes + idx] = -k * cs * c;
        want[6 * nodes + idx] = mu * k * c;
    }
    let mut out = vec![0.0; q.len()];
    b.rhs_interior(&q, &mut out, &mut Workspace::new(nodes)).unwrap();
    let skip = b.ops(Axis::Q).plus().left_rows().len().max(b.ops(Axis::Q).minus().left_rows().len());
    let dims = b.mesh().dims();
    let mut worst: f64 = 0.0;
    for i in skip..dims[0] - skip {
        for j in skip..dims[1] - skip {
            for kk in skip..dims[2] - skip {
                let idx = b.mesh().index(i, j, kk);
                for f in [1, 6] {
                    let e = (out[f * nodes + idx] - want[f * nodes + idx]).abs() / (mu * k);
                    worst = worst.max(e);
                }
            }
        }
    }
    worst
}

#[test]
fn interior_truncation_converges() {
    for (family, order) in [(Family::DpUpwind, 4), (Family::DpUpwind, 6), (Family::Traditional, 4)] {
        let coarse = truncation(family, order, 32);
        let fine = truncation(family, order, 64);
        let rate = (coarse / fine).log2();
        assert!(rate > order as f64 - 0.35, "{family} {order}: rate {rate} ({coarse:e} -> {fine:e})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_is_quadratic_and_positive(seed in 0u64..1000, scale in 0.1f64..10.0) {
        let b = block(&dipping(), Family::DpUpwind, 4, 12);
        let q = random_state(&b, seed);
        let e = b.energy(&q);
        prop_assert!(e > 0.0);
        let scaled: Vec<f64> = q.iter().map(|v| v * scale).collect();
        prop_assert!((b.energy(&scaled) - scale * scale * e).abs() < 1e-12 * scale * scale * e);
    }
}

