use dprupture::friction::{
    hat_variables, hat_variables_clamped, identity_residuals, solve_slip_rate, theta_function, FaultNodeInputs,
    FrictionModel, NodeState, RateStateParams,
};
use dprupture::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SW: FrictionModel =
    FrictionModel::SlipWeakening { static_friction: 0.76, dynamic_friction: 0.448, critical_slip: 0.5, cohesion: 0.2 };
const BARRIER: FrictionModel =
    FrictionModel::SlipWeakening { static_friction: 10000.0, dynamic_friction: 0.448, critical_slip: 0.5, cohesion: 1000.0 };
const RS: RateStateParams =
    RateStateParams { a: 0.008, b: 0.012, reference_friction: 0.6, reference_slip_rate: 1e-6, critical_slip: 0.02 };

fn at(slip: f64) -> NodeState {
    NodeState { slip, psi: 0.0 }
}

#[test]
fn slip_weakening_coefficients() {
    assert_eq!(SW.friction_coefficient(0.0, at(0.0)).unwrap(), 0.76);
    assert!((SW.friction_coefficient(0.0, at(0.5)).unwrap() - 0.448).abs() < 1e-15);
    assert_eq!(SW.friction_coefficient(0.0, at(1.0)).unwrap(), 0.448);
    assert!((SW.friction_coefficient(0.0, at(0.25)).unwrap() - 0.604).abs() < 1e-15);
}

#[test]
fn rate_state_coefficient_vanishes_at_rest() {
    let m = FrictionModel::RateStateAging(RS);
    assert_eq!(m.friction_coefficient(0.0, NodeState { slip: 0.0, psi: 0.7 }).unwrap(), 0.0);
    let lo = m.friction_coefficient(1e-3, NodeState { slip: 0.0, psi: 0.7 }).unwrap();
    let hi = m.friction_coefficient(1e-2, NodeState { slip: 0.0, psi: 0.7 }).unwrap();
    assert!(hi > lo && lo > 0.0);
}

#[test]
fn negative_arguments_are_domain_errors() {
    assert!(matches!(SW.friction_coefficient(-1.0, at(0.0)), Err(Error::Domain(_))));
    assert!(matches!(SW.friction_coefficient(0.0, at(-0.1)), Err(Error::Domain(_))));
    assert!(matches!(FrictionModel::RateStateSlip(RS).state_rate(-1.0, 0.5), Err(Error::Domain(_))));
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = FrictionModel::SlipWeakening { static_friction: 0.4, dynamic_friction: 0.5, critical_slip: 0.5, cohesion: 0.0 };
    assert!(bad.validate().is_err());
    assert!(FrictionModel::FrozenLinear { alpha: -1.0 }.validate().is_err());
    assert!(FrictionModel::RateStateAging(RateStateParams { a: 0.0, ..RS }).validate().is_err());
    assert!(SW.validate().is_ok());
}

#[test]
fn state_evolution_laws() {
    let aging = FrictionModel::RateStateAging(RS);
    assert!(aging.state_rate(RS.reference_slip_rate, RS.reference_friction).unwrap().abs() < 1e-15);
    let heal = aging.state_rate(0.0, 0.5).unwrap();
    let want = RS.b * RS.reference_slip_rate / RS.critical_slip * ((RS.reference_friction - 0.5) / RS.b).exp();
    assert!(heal > 0.0 && (heal - want).abs() < 1e-15 * want);

    let slip = FrictionModel::RateStateSlip(RS);
    assert_eq!(slip.state_rate(0.0, 0.5).unwrap(), 0.0);
    // choose ψ so that f(V, ψ) = f_ss(V)
    let v: f64 = 0.01;
    let fss = RS.reference_friction - (RS.b - RS.a) * (v / RS.reference_slip_rate).ln();
    let psi = RS.a * ((fss / RS.a).sinh() * 2.0 * RS.reference_slip_rate / v).ln();
    assert!(slip.state_rate(v, psi).unwrap().abs() < 1e-12);
}

#[test]
fn zero_transfer_means_no_slip() {
    for m in [SW, FrictionModel::RateStateAging(RS), FrictionModel::FrozenLinear { alpha: 2.0 }] {
        assert_eq!(solve_slip_rate([0.0, 0.0], [10.0, 10.0], 50.0, &m, at(0.0)).unwrap(), 0.0);
    }
}

#[test]
fn frozen_linear_closed_form() {
    let (eta, alpha) = (4.5, 1.7);
    let phi = [3.0, -4.0];
    let m = FrictionModel::FrozenLinear { alpha };
    let v = solve_slip_rate(phi, [eta, eta], 0.0, &m, at(0.0)).unwrap();
    assert!((v - 5.0 / (eta + alpha)).abs() < 1e-13);
}

/// Bisection on Θ(θ) = 1 to a 1e-14 bracket, independent of the Newton path.
fn bisect(phi: [f64; 2], eta: [f64; 2], sigma_n: f64, m: &FrictionModel, s: NodeState) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while theta_function(phi, eta, sigma_n, m, s, hi) > 1.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if theta_function(phi, eta, sigma_n, m, s, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn newton_agrees_with_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut solved = 0;
    for _ in 0..2000 {
        let phi = [rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0)];
        let eta = [rng.gen_range(2.0..6.0), rng.gen_range(6.0..12.0)];
        let sigma_n = rng.gen_range(0.0..100.0);
        let state = at(rng.gen_range(0.0..1.0));
        let models = [SW, FrictionModel::RateStateAging(RS), FrictionModel::RateStateSlip(RS)];
        let m = models[rng.gen_range(0..3)];
        let state = NodeState { psi: rng.gen_range(0.3..0.9), ..state };
        let v = solve_slip_rate(phi, eta, sigma_n, &m, state).unwrap();
        if v == 0.0 {
            assert!(theta_function(phi, eta, sigma_n, &m, state, 1e-300) <= 1.0);
            continue;
        }
        solved += 1;
        assert!((theta_function(phi, eta, sigma_n, &m, state, v) - 1.0).abs() < 1e-10);
        let oracle = bisect(phi, eta, sigma_n, &m, state);
        assert!((v - oracle).abs() < 1e-9 * oracle, "{v} vs {oracle}");
    }
    assert!(solved > 500);
}

#[test]
fn tensile_normal_stress_is_an_error() {
    assert!(matches!(solve_slip_rate([1.0, 0.0], [1.0, 1.0], -2.0, &SW, at(0.0)), Err(Error::TensileFault { .. })));
    let inputs = FaultNodeInputs::from_traces([0.0; 3], [5.0, 1.0, 0.0], [0.0; 3], [5.0, 1.0, 0.0], [16.0, 9.0, 9.0], [16.0, 9.0, 9.0]);
    assert!(matches!(hat_variables(&inputs, &SW, at(0.0)), Err(Error::TensileFault { .. })));
    let (hat, clamped) = hat_variables_clamped(&inputs, &SW, at(0.0), true).unwrap();
    assert!(clamped && hat.sigma_n == 0.0);
}

fn traces(rng: &mut ChaCha8Rng) -> FaultNodeInputs {
    let mut v3 = |lo: f64, hi: f64| [rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi)];
    let (vm, vp) = (v3(-2.0, 2.0), v3(-2.0, 2.0));
    let (mut tm, mut tp) = (v3(-30.0, 30.0), v3(-30.0, 30.0));
    tm[0] -= 60.0;
    tp[0] -= 60.0;
    let zm = { let p = v3(14.0, 18.0); [p[0], p[1] * 0.55, p[1] * 0.55] };
    let zp = { let p = v3(12.0, 20.0); [p[0], p[1] * 0.55, p[2] * 0.55] };
    FaultNodeInputs::from_traces(vm, tm, vp, tp, zm, zp)
}

#[test]
fn barrier_locks_and_preserves_characteristics() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let inputs = traces(&mut rng);
        let hat = hat_variables(&inputs, &BARRIER, at(0.0)).unwrap();
        assert_eq!(hat.slip_rate, 0.0);
        assert_eq!(hat.alpha, None);
        for j in 0..3 {
            assert!((hat.total_traction[j] - hat.phi[j]).abs() < 1e-12 * hat.phi[j].abs().max(1.0));
        }
        assert!(identity_residuals(&inputs, &hat).preservation < 1e-12);
    }
}

#[test]
fn frictionless_interface_slides_freely() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inputs = traces(&mut rng);
    let hat = hat_variables(&inputs, &FrictionModel::FrozenLinear { alpha: 0.0 }, at(0.0)).unwrap();
    for j in 1..3 {
        assert!(hat.total_traction[j].abs() < 1e-13);
        assert!((hat.jump[j] - hat.phi[j] / hat.eta[j]).abs() < 1e-13 * hat.jump[j].abs().max(1.0));
    }
    assert_eq!(hat.jump[0], 0.0);
}

#[test]
fn frozen_hat_variables_match_radiation_damping() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alpha = 3.3;
    for _ in 0..100 {
        let inputs = traces(&mut rng).with_prestress([-40.0, 12.0, -3.0]);
        let hat = hat_variables(&inputs, &FrictionModel::FrozenLinear { alpha }, at(0.0)).unwrap();
        let eta = inputs.eta();
        let phi = inputs.phi();
        for j in 1..3 {
            let jump = phi[j] / (eta[j] + alpha);
            assert!((hat.jump[j] - jump).abs() < 1e-13 * jump.abs().max(1.0));
            assert!((hat.total_traction[j] - alpha * jump).abs() < 1e-13 * phi[j].abs().max(1.0));
        }
    }
}

#[test]
fn identities_hold_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let models = [
        SW,
        BARRIER,
        FrictionModel::RateStateAging(RS),
        FrictionModel::RateStateSlip(RS),
        FrictionModel::FrozenLinear { alpha: 1.5 },
        FrictionModel::FrozenLinear { alpha: 0.0 },
    ];
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let m = models[i % models.len()];
        let inputs = traces(&mut rng).with_prestress([rng.gen_range(-20.0..0.0), rng.gen_range(-40.0..40.0), 0.0]);
        let state = NodeState { slip: rng.gen_range(0.0..1.0), psi: rng.gen_range(0.3..0.9) };
        let hat = hat_variables(&inputs, &m, state).unwrap();
        assert_eq!(hat.jump[0], 0.0);
        assert!(hat.dissipation() >= 0.0);
        worst = worst.max(identity_residuals(&inputs, &hat).max());
    }
    assert!(worst < 1e-10, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn theta_is_strictly_decreasing(
        phi in prop::array::uniform2(-100.0f64..100.0),
        eta in prop::array::uniform2(0.5f64..20.0),
        sigma_n in 0.0f64..120.0,
        psi in 0.2f64..1.0,
        slip in 0.0f64..1.0,
        t1 in 1e-6f64..5.0,
        dt in 1e-6f64..5.0,
        which in 0usize..4,
    ) {
        prop_assume!(phi[0].hypot(phi[1]) > 1e-3);
        let m = [SW, FrictionModel::RateStateAging(RS), FrictionModel::RateStateSlip(RS), FrictionModel::FrozenLinear { alpha: 0.8 }][which];
        let s = NodeState { slip, psi };
        prop_assert!(theta_function(phi, eta, sigma_n, &m, s, t1) > theta_function(phi, eta, sigma_n, &m, s, t1 + dt));
    }

    #[test]
    fn characteristics_are_preserved(seed in 0u64..10_000, which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = traces(&mut rng);
        let m = [SW, FrictionModel::RateStateAging(RS), FrictionModel::RateStateSlip(RS), FrictionModel::FrozenLinear { alpha: 0.8 }][which];
        let hat = hat_variables(&inputs, &m, NodeState { slip: 0.1, psi: 0.6 }).unwrap();
        prop_assert!(identity_residuals(&inputs, &hat).preservation < 1e-12);
        prop_assert_eq!(hat.v_plus[0] - hat.v_minus[0], 0.0);
    }

    #[test]
    fn frozen_linear_slip_rate_scales_with_the_load(
        phi in prop::array::uniform2(-1.0f64..1.0),
        eta in 0.5f64..20.0,
        alpha in 0.0f64..5.0,
        exponent in -20i32..20,
    ) {
        prop_assume!(phi[0].hypot(phi[1]) > 1e-3);
        let m = FrictionModel::FrozenLinear { alpha };
        let scale = 10f64.powi(exponent);
        let v = solve_slip_rate(phi.map(|p| p * scale), [eta, eta], 0.0, &m, at(0.0)).unwrap();
        let exact = scale * phi[0].hypot(phi[1]) / (eta + alpha);
        prop_assert!((v - exact).abs() <= 1e-10 * exact);
    }
}
