use std::sync::Arc;

use dprupture::coupling::ExteriorCondition;
use dprupture::elastic::{ElasticBlock, Material};
use dprupture::friction::FrictionModel;
use dprupture::mesh::{CurvilinearBlock, InterfaceShape, Mapping, MetricMethod, Side};
use dprupture::sbp::{Family, SbpOperatorSet};
use dprupture::time_driver::config::{
    receiver, BlockConfig, BoundarySet, FaultConfig, InitialField, MaterialConfig, OperatorChoice, OperatorConfig,
    OutputConfig, RunConfig, StressConfig, WaveKind,
};
use dprupture::time_driver::{compute_dt, lsrk45_step, run, Lsrk45, Simulation, SEISMOGRAM_HEADER};
use dprupture::Error;

fn decay_error(steps: usize) -> f64 {
    let dt = 1.0 / steps as f64;
    let mut y = vec![1.0];
    let mut rk = Lsrk45::new(1);
    for s in 0..steps {
        rk.step(s as f64 * dt, dt, &mut y, |_, _, y, dy| {
            dy[0] = -y[0];
            Ok(())
        })
        .unwrap();
    }
    (y[0] - (-1.0f64).exp()).abs()
}

#[test]
fn lsrk_is_fourth_order_on_linear_decay() {
    let errors: Vec<f64> = [10, 20, 40, 80].iter().map(|&n| decay_error(n)).collect();
    for pair in errors.windows(2) {
        let rate = (pair[0] / pair[1]).log2();
        assert!(rate >= 3.9, "observed order {rate} from {errors:?}");
    }
}

#[test]
fn lsrk_integrates_time_exactly() {
    // y' = t is integrated exactly by any consistent 4th order method
    let mut y = vec![0.0];
    lsrk45_step(0.5, &mut y, 0.25, |_, t, _, dy| {
        dy[0] = t;
        Ok(())
    })
    .unwrap();
    assert!((y[0] - 0.5 * (0.75f64.powi(2) - 0.25)).abs() < 1e-15);
}

#[test]
fn lsrk_leaves_constant_state_unchanged() {
    let start = vec![1.5, -2.25, 3.0e-7, 0.0];
    let mut y = start.clone();
    lsrk45_step(0.0, &mut y, 0.1, |_, _, _, dy| {
        dy.fill(0.0);
        Ok(())
    })
    .unwrap();
    assert_eq!(y, start);
}

#[test]
fn lsrk_reports_divergence() {
    let mut y = vec![1.0];
    let err = lsrk45_step(0.0, &mut y, 1.0, |_, _, _, dy| {
        dy[0] = f64::NAN;
        Ok(())
    })
    .unwrap_err();
    assert!(matches!(err, Error::Divergence { .. }));
}

fn block(map: Mapping, dims: [usize; 3], cp: f64, cs: f64) -> ElasticBlock {
    let mesh = CurvilinearBlock::build(&map, dims, MetricMethod::Analytic).unwrap();
    let ops = [0, 1, 2].map(|a| Arc::new(SbpOperatorSet::build_traditional(2, dims[a] - 1).unwrap()));
    let material = Material::homogeneous(mesh.len(), 1.0, cp, cs).unwrap();
    ElasticBlock::new(mesh, material, ops).unwrap()
}

#[test]
fn dt_on_unit_cube() {
    let b = block(Mapping::Identity, [101, 101, 101], 2.0, 1.0);
    let dt = compute_dt(&[b], 0.5).unwrap();
    let expected = 0.5 * 0.01 / 5.0f64.sqrt();
    assert!((dt - expected).abs() < 1e-15, "{dt} vs {expected}");
    assert!((dt - 2.2360679e-3).abs() < 1e-10);
}

#[test]
fn dt_scales_with_domain_size() {
    let affine = |l: f64| Mapping::Affine {
        origin: [0.3, -0.1, 0.2],
        matrix: [[1.0 * l, 0.2 * l, 0.0], [0.1 * l, 0.9 * l, 0.1 * l], [0.0, 0.3 * l, 1.2 * l]],
    };
    let d1 = compute_dt(&[block(affine(1.0), [9, 10, 11], 2.0, 1.0)], 0.5).unwrap();
    let d3 = compute_dt(&[block(affine(3.0), [9, 10, 11], 2.0, 1.0)], 0.5).unwrap();
    assert!((d3 / 3.0 - d1).abs() < 1e-14 * d1);
}

#[test]
fn dt_rejects_bad_cfl() {
    let b = block(Mapping::Identity, [5, 5, 5], 2.0, 1.0);
    assert!(matches!(compute_dt(std::slice::from_ref(&b), 0.0), Err(Error::Config(_))));
    assert!(matches!(compute_dt(&[b], 1.5), Err(Error::Config(_))));
}

const MAT: MaterialConfig = MaterialConfig { rho: 1.0, cp: 2.0, cs: 1.0 };

fn quiet_stress(shear_ratio: f64, strike_ratio: f64) -> StressConfig {
    StressConfig {
        normal_gradient: 0.0,
        normal_offset: -50.0,
        depth_scale: 1.0,
        shear_ratio,
        strike_ratio,
        overstress: Vec::new(),
    }
}

fn two_block(name: &str, n: usize, friction: FrictionModel, stress: StressConfig, initial: Option<InitialField>) -> RunConfig {
    let interface = InterfaceShape { offset: 0.0, slope: 0.3, bump: 0.04 };
    let block = |side| BlockConfig {
        nodes: [n + 1; 3],
        mapping: Mapping::TwoBlock { side, outer: 1.0, depth: 1.0, half_width: 0.5, interface },
        metrics: MetricMethod::Analytic,
        material: MAT,
        boundaries: BoundarySet { r_low: ExteriorCondition::FreeSurface, ..BoundarySet::default() },
    };
    RunConfig {
        name: name.into(),
        end_time: 0.6,
        cfl: 0.5,
        operators: OperatorConfig::new(Family::DpUpwind, 4),
        blocks: vec![block(Side::Minus), block(Side::Plus)],
        fault: Some(FaultConfig {
            friction,
            regions: Vec::new(),
            stress,
            initial_state: None,
            receivers: vec![receiver("mid", 0.5, 0.0), receiver("shallow", 0.2, 0.25)],
        }),
        initial,
        manufactured: None,
        output: OutputConfig::default(),
    }
}

fn pulse() -> Option<InitialField> {
    Some(InitialField { wave: WaveKind::S, amplitude: 1.0, start: -0.8, end: -0.5, width: 0.08 })
}

#[test]
fn locked_fault_energy_does_not_grow() {
    let barrier = FrictionModel::SlipWeakening {
        static_friction: 10000.0,
        dynamic_friction: 0.5,
        critical_slip: 0.1,
        cohesion: 1000.0,
    };
    let cfg = two_block("locked", 16, barrier, quiet_stress(0.3, 0.0), pulse());
    let out = run(&cfg).unwrap();
    let e: Vec<f64> = out.energy.iter().map(|r| r.energy).collect();
    assert!(e[0] > 0.0);
    for w in e.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-10), "energy grew: {} -> {}", w[0], w[1]);
    }
    assert!(*e.last().unwrap() <= e[0] * (1.0 + 1e-10));
    assert_eq!(out.summary.max_slip_rate, 0.0);
}

#[test]
fn quiet_start_stays_quiet() {
    let sw = FrictionModel::SlipWeakening {
        static_friction: 0.6,
        dynamic_friction: 0.4,
        critical_slip: 0.1,
        cohesion: 0.0,
    };
    let mut cfg = two_block("quiet", 12, sw, quiet_stress(0.55, 0.0), None);
    cfg.end_time = 0.2;
    let out = run(&cfg).unwrap();
    assert!(out.energy.iter().all(|r| r.energy == 0.0 && r.rate == 0.0));
    assert!(out.seismograms.iter().all(|s| s.samples.iter().all(|row| row[1..4].iter().all(|&v| v == 0.0))));
    assert_eq!(out.summary.final_slip_max, 0.0);
}

#[test]
fn receivers_report_consistent_slip_rate() {
    let frozen = FrictionModel::FrozenLinear { alpha: 2.0 };
    let mut cfg = two_block("frozen", 12, frozen, quiet_stress(0.1, 0.05), pulse());
    cfg.end_time = 0.3;
    let out = run(&cfg).unwrap();
    let mut moving = 0;
    for s in &out.seismograms {
        assert_eq!(s.samples.len(), out.summary.steps + 1);
        for row in &s.samples {
            assert!((row[3] - row[1].hypot(row[2])).abs() <= 1e-12 * (1.0 + row[3]));
            if row[3] > 1e-3 {
                moving += 1;
            }
        }
    }
    assert!(moving > 0);
    assert!(out.summary.max_slip_rate > 0.0);
    let dt = out.summary.dt;
    assert!((dt * out.summary.steps as f64 - cfg.end_time).abs() < 1e-12);
}

#[test]
fn outputs_are_bit_identical() {
    let sw = FrictionModel::SlipWeakening {
        static_friction: 0.6,
        dynamic_friction: 0.4,
        critical_slip: 0.05,
        cohesion: 0.0,
    };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for d in &dirs {
        let mut cfg = two_block("repeat", 12, sw, quiet_stress(0.59, 0.02), pulse());
        cfg.end_time = 0.25;
        cfg.output = OutputConfig { dir: Some(d.path().to_path_buf()), snapshot_stride: 10, energy_log: true };
        files.push(run(&cfg).unwrap().files);
    }
    assert_eq!(files[0].len(), files[1].len());
    assert!(files[0].len() > 4);
    for (a, b) in files[0].iter().zip(&files[1]) {
        assert_eq!(a.file_name(), b.file_name());
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{a:?} differs");
    }
    let seis = std::fs::read_to_string(dirs[0].path().join("seismogram_mid.csv")).unwrap();
    assert_eq!(seis.lines().next().unwrap(), SEISMOGRAM_HEADER.join(","));
}

/// Single-block column along `x` carrying a right-going shear pulse.
fn column(far_end: ExteriorCondition) -> RunConfig {
    let lateral = ExteriorCondition::Unconstrained;
    RunConfig {
        name: "column".into(),
        end_time: 1.8,
        cfl: 0.5,
        operators: OperatorConfig {
            family: Family::DpUpwind,
            order: 4,
            alpha_tol: None,
            transverse: Some(OperatorChoice { family: Family::Traditional, order: 2, alpha_tol: None }),
        },
        blocks: vec![BlockConfig {
            nodes: [201, 5, 5],
            mapping: Mapping::Box { lower: [0.0, 0.0, 0.0], upper: [2.0, 0.04, 0.04] },
            metrics: MetricMethod::Analytic,
            material: MAT,
            boundaries: BoundarySet {
                q_low: ExteriorCondition::Absorbing,
                q_high: far_end,
                r_low: lateral,
                r_high: lateral,
                s_low: lateral,
                s_high: lateral,
            },
        }],
        fault: None,
        initial: Some(InitialField { wave: WaveKind::S, amplitude: 1.0, start: 0.6, end: 1.0, width: 0.05 }),
        manufactured: None,
        output: OutputConfig::default(),
    }
}

#[test]
fn free_surface_reflects_with_unit_coefficients() {
    let sim = Simulation::new(&column(ExteriorCondition::FreeSurface)).unwrap();
    let (y, _) = sim.run().unwrap();
    let blk = &sim.system().blocks()[0];
    let n = blk.nodes();
    // reflected pulse centre at x = 3.2 - t = 1.4
    let idx = blk.mesh().index(140, 2, 2);
    let v = y[n + idx];
    let s = y[6 * n + idx];
    assert!((v - 1.0).abs() < 1e-2, "velocity reflection {v}");
    // incident shear stress was -Z; the reflected one is +Z
    assert!((s / -1.0 + 1.0).abs() < 1e-2, "stress reflection {s}");
}

#[test]
fn absorbing_end_lets_the_pulse_leave() {
    let sim = Simulation::new(&column(ExteriorCondition::Absorbing)).unwrap();
    let (_, out) = sim.run().unwrap();
    let e0 = out.energy.first().unwrap().energy;
    let e1 = out.energy.last().unwrap().energy;
    assert!(e1 < 0.01 * e0, "remaining fraction {}", e1 / e0);
}

#[test]
fn config_round_trips_and_rejects_unknown_keys() {
    let cfg = two_block("rt", 12, FrictionModel::FrozenLinear { alpha: 1.0 }, quiet_stress(0.1, 0.0), pulse());
    let text = cfg.to_toml().unwrap();
    assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    let bad = format!("{text}\nbogus = 1\n");
    assert!(RunConfig::from_toml(&bad).is_err());
    let mut no_cfl = cfg.clone();
    no_cfl.cfl = 0.0;
    assert!(matches!(no_cfl.validate(), Err(Error::Config(_))));
    let mut outside = cfg;
    outside.fault.as_mut().unwrap().receivers.push(receiver("far", 5.0, 0.0));
    assert!(matches!(Simulation::new(&outside), Err(Error::Config(_))));
}
