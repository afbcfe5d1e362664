use dprupture::mesh::{
    cross, face_frame, norm, rotate, rotate_back, CurvilinearBlock, Face, InterfaceShape, Mapping, MetricMethod, Side,
    DEFAULT_M0,
};
use dprupture::sbp::{Axis, SbpOperatorSet};
use dprupture::Error;
use proptest::prelude::*;

const SIN60: f64 = 0.866_025_403_784_438_6;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn identity_map_has_unit_metrics() {
    let b = CurvilinearBlock::build(&Mapping::Identity, [9, 9, 9], MetricMethod::Analytic).unwrap();
    assert!(b.jacobian().iter().all(|&j| j == 1.0));
    for axis in Axis::ALL {
        for c in 0..3 {
            let want = if axis.index() == c { 1.0 } else { 0.0 };
            assert!(b.metric(axis, c).iter().all(|&m| m == want));
        }
    }
}

#[test]
fn shear_map_has_constant_metrics() {
    let cot = 1.0 / 60f64.to_radians().tan();
    let map = Mapping::Affine { origin: [0.0; 3], matrix: [[1.0, cot, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };
    let b = CurvilinearBlock::build(&map, [7, 8, 9], MetricMethod::Analytic).unwrap();
    assert!(b.jacobian().iter().all(|&j| close(j, 1.0, 1e-15)));
    // inverse of [[1, c], [0, 1]] is [[1, -c], [0, 1]]
    assert!(b.metric(Axis::Q, 1).iter().all(|&m| close(m, -cot, 1e-15)));
    assert!(b.metric(Axis::R, 0).iter().all(|&m| m == 0.0));
}

#[test]
fn affine_metrics_agree_between_pipelines() {
    let map = Mapping::Affine {
        origin: [1.0, -2.0, 0.5],
        matrix: [[3.0, 0.4, -0.2], [0.1, 2.0, 0.3], [0.0, -0.5, 4.0]],
    };
    let a = CurvilinearBlock::build(&map, [13, 14, 15], MetricMethod::Analytic).unwrap();
    let d = CurvilinearBlock::build(&map, [13, 14, 15], MetricMethod::Discrete).unwrap();
    for axis in Axis::ALL {
        for c in 0..3 {
            for (x, y) in a.metric(axis, c).iter().zip(d.metric(axis, c)) {
                assert!(close(*x, *y, 1e-12));
            }
        }
    }
    for (x, y) in a.jacobian().iter().zip(d.jacobian()) {
        assert!(close(*x, *y, 1e-12 * x.abs()));
    }
}

fn metric_discrepancy(n: usize, interior_only: bool) -> f64 {
    let map = Mapping::Sinusoidal { amplitude: 0.05 };
    let a = CurvilinearBlock::build(&map, [n + 1; 3], MetricMethod::Analytic).unwrap();
    let d = CurvilinearBlock::build(&map, [n + 1; 3], MetricMethod::Discrete).unwrap();
    let ops = SbpOperatorSet::build_traditional(6, n).unwrap();
    let skip = ops.plus().left_rows().len();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                let inside = [i, j, k].iter().all(|&c| c >= skip && c <= n - skip);
                if interior_only && !inside {
                    continue;
                }
                let idx = a.index(i, j, k);
                worst = worst.max((a.metric(Axis::Q, 1)[idx] - d.metric(Axis::Q, 1)[idx]).abs());
            }
        }
    }
    worst
}

#[test]
fn discrete_metrics_converge_on_perturbed_map() {
    let ns = [24, 48, 96];
    let interior: Vec<f64> = ns.iter().map(|&n| metric_discrepancy(n, true)).collect();
    let all: Vec<f64> = ns.iter().map(|&n| metric_discrepancy(n, false)).collect();
    for w in interior.windows(2) {
        let rate = (w[0] / w[1]).log2();
        assert!(rate > 5.5, "interior rate {rate} from {interior:?}");
    }
    for w in all.windows(2) {
        let rate = (w[0] / w[1]).log2();
        assert!(rate > 2.5, "boundary-limited rate {rate} from {all:?}");
    }
}

#[test]
fn identity_frame_is_cartesian() {
    let b = CurvilinearBlock::build(&Mapping::Identity, [5, 5, 5], MetricMethod::Analytic).unwrap();
    let f = face_frame(&b, Face::Q_HIGH, DEFAULT_M0).unwrap();
    for r in &f.rotation {
        assert_eq!(*r, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }
    assert_eq!(rotate([1.0, 0.0, 0.0], &f.rotation[0]), [1.0, 0.0, 0.0]);
}

fn dipping_block(side: Side) -> CurvilinearBlock {
    let map = Mapping::dipping(side, 4.0, 4.0, 4.0, -1.0, 60.0);
    CurvilinearBlock::build(&map, [9, 10, 11], MetricMethod::Analytic).unwrap()
}

#[test]
fn dipping_plane_normal_and_area() {
    for (side, face) in [(Side::Minus, Face::Q_HIGH), (Side::Plus, Face::Q_LOW)] {
        let b = dipping_block(side);
        let f = face_frame(&b, face, DEFAULT_M0).unwrap();
        for (local, r) in f.rotation.iter().enumerate() {
            let n = r[0];
            assert!(close(n[0], SIN60, 1e-14) && close(n[1], -0.5, 1e-14) && n[2].abs() < 1e-15);
            // area element |x_r × x_s| of the face parametrization
            let x_r = [4.0 / 60f64.to_radians().tan(), 4.0, 0.0];
            let x_s = [0.0, 0.0, 8.0];
            assert!(close(f.surface_scale[local], norm(cross(x_r, x_s)), 1e-12));
        }
    }
}

#[test]
fn blocks_conform_on_the_interface() {
    let shape = InterfaceShape { offset: 0.1, slope: 0.4, bump: 0.05 };
    let minus = Mapping::TwoBlock { side: Side::Minus, outer: 1.0, depth: 1.0, half_width: 0.5, interface: shape };
    let plus = Mapping::TwoBlock { side: Side::Plus, outer: 1.0, depth: 1.0, half_width: 0.5, interface: shape };
    let bm = CurvilinearBlock::build(&minus, [6, 7, 8], MetricMethod::Analytic).unwrap();
    let bp = CurvilinearBlock::build(&plus, [9, 7, 8], MetricMethod::Analytic).unwrap();
    let fm = face_frame(&bm, Face::Q_HIGH, DEFAULT_M0).unwrap();
    let fp = face_frame(&bp, Face::Q_LOW, DEFAULT_M0).unwrap();
    for (a, b) in fm.nodes.iter().zip(&fp.nodes) {
        let (xa, xb) = (bm.position(*a), bp.position(*b));
        for d in 0..3 {
            assert!(close(xa[d], xb[d], 1e-14));
        }
    }
    for (ra, rb) in fm.rotation.iter().zip(&fp.rotation) {
        for d in 0..3 {
            assert!(close(ra[0][d], rb[0][d], 1e-13));
        }
    }
}

#[test]
fn parallel_reference_vector_is_degenerate() {
    let b = CurvilinearBlock::build(&Mapping::Identity, [4, 4, 4], MetricMethod::Analytic).unwrap();
    assert!(matches!(face_frame(&b, Face::Q_LOW, [1.0, 0.0, 0.0]), Err(Error::DegenerateBasis { .. })));
}

#[test]
fn normal_load_rotates_to_pure_normal_traction() {
    let b = dipping_block(Side::Minus);
    let f = face_frame(&b, Face::Q_HIGH, DEFAULT_M0).unwrap();
    let r = &f.rotation[3];
    let n = r[0];
    let load = -2.5;
    // σ̄ = T n nᵀ, traction σ̄ n = T n
    let mut traction = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            traction[i] += load * n[i] * n[j] * n[j];
        }
    }
    let local = rotate(traction, r);
    assert!(close(local[0], load, 1e-14) && local[1].abs() < 1e-14 && local[2].abs() < 1e-14);
}

#[test]
fn mesh_dump_has_header_and_rows() {
    let b = CurvilinearBlock::build(&Mapping::Identity, [2, 2, 3], MetricMethod::Analytic).unwrap();
    let mut buf = Vec::new();
    b.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,j,k,x,y,z,J");
    assert_eq!(lines.len(), 13);
    assert!(lines[12].starts_with("1,1,2,1.0"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frames_are_orthonormal(
        offset in -0.5f64..0.5,
        slope in -1.0f64..1.0,
        bump in -0.1f64..0.1,
        side in prop::bool::ANY,
    ) {
        let side = if side { Side::Plus } else { Side::Minus };
        let interface = InterfaceShape { offset, slope, bump };
        let map = Mapping::TwoBlock { side, outer: 2.0, depth: 1.0, half_width: 1.0, interface };
        let b = CurvilinearBlock::build(&map, [5, 10, 10], MetricMethod::Analytic).unwrap();
        let face = if side == Side::Minus { Face::Q_HIGH } else { Face::Q_LOW };
        let f = face_frame(&b, face, DEFAULT_M0).unwrap();
        for r in &f.rotation {
            for i in 0..3 {
                for j in 0..3 {
                    let v: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((v - want).abs() < 1e-13);
                }
            }
            let l = cross(r[0], r[1]);
            for d in 0..3 {
                prop_assert!((l[d] - r[2][d]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_round_trip(v in prop::array::uniform3(-10.0f64..10.0), bump in -0.1f64..0.1) {
        let interface = InterfaceShape { offset: 0.0, slope: 0.6, bump };
        let map = Mapping::TwoBlock { side: Side::Minus, outer: 1.0, depth: 1.0, half_width: 1.0, interface };
        let b = CurvilinearBlock::build(&map, [4, 6, 6], MetricMethod::Analytic).unwrap();
        let f = face_frame(&b, Face::Q_HIGH, DEFAULT_M0).unwrap();
        for r in &f.rotation {
            let back = rotate_back(rotate(v, r), r);
            for d in 0..3 {
                prop_assert!((back[d] - v[d]).abs() < 1e-14 * 10.0);
            }
        }
    }

    #[test]
    fn scaling_leaves_positive_jacobian(scale in 0.1f64..10.0) {
        let map = Mapping::dipping(Side::Plus, 4.0 * scale, 4.0 * scale, 4.0 * scale, -scale, 60.0);
        let b = CurvilinearBlock::build(&map, [5, 5, 5], MetricMethod::Analytic).unwrap();
        prop_assert!(b.jacobian().iter().all(|&j| j > 0.0));
    }
}
