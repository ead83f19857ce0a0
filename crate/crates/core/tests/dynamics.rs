use std::f64::consts::PI;

use finite_proxy::dynamics::{
    build_modal_map, simulate_chain, total_energy, ChainState, Integrator, SimulationOptions,
};
use finite_proxy::inverse::{reconstruct_chain, string_spectrum, SpringMassChain};
use finite_proxy::reduction::Nonlinearity;
use finite_proxy::Error;
use proptest::prelude::*;

fn five_chain() -> SpringMassChain {
    reconstruct_chain(&string_spectrum(5, 1.0).unwrap(), 1.0).unwrap().chain
}

#[test]
fn linear_modes_rotate_in_place() {
    let chain = five_chain();
    let map = build_modal_map(&chain).unwrap();
    let init = ChainState { positions: map.mode_shape(2).iter().map(|v| 0.2 * v).collect(), velocities: vec![0.0; 5] };
    let opts = SimulationOptions { sample_every: 50, ..SimulationOptions::new(1e-3, 5000) };
    let rec = simulate_chain(&chain, &Nonlinearity::zero(), &init, &opts).unwrap();
    let w = map.frequencies()[2];
    for (t, q) in rec.times.iter().zip(&rec.modal) {
        assert!((q[2] - 0.2 * (w * t).cos()).abs() < 1e-10);
        for (k, v) in q.iter().enumerate() {
            if k != 2 {
                assert!(v.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn nonlinear_chain_keeps_energy() {
    let chain = five_chain();
    let map = build_modal_map(&chain).unwrap();
    let init = ChainState { positions: map.mode_shape(0).iter().map(|v| 0.5 * v).collect(), velocities: vec![0.0; 5] };
    let nl = Nonlinearity::scaled_sine(2.0).unwrap();
    for integrator in [Integrator::ModalSplit, Integrator::ModalSplit4, Integrator::VelocityVerlet] {
        let opts = SimulationOptions { integrator, sample_every: 100, ..SimulationOptions::new(1e-3, 20_000) };
        let rec = simulate_chain(&chain, &nl, &init, &opts).unwrap();
        // second-order schemes: drift is bounded and small, not zero
        assert!(rec.relative_energy_drift() < 1e-4, "{integrator:?}: {}", rec.relative_energy_drift());
        // the nonlinearity couples the modes
        assert!(rec.modal.iter().any(|q| q[2].abs() > 1e-8));
    }
}

#[test]
fn triple_jump_is_fourth_order() {
    let chain = five_chain();
    let map = build_modal_map(&chain).unwrap();
    let init = ChainState { positions: map.mode_shape(0).iter().map(|v| 0.5 * v).collect(), velocities: vec![0.0; 5] };
    let nl = Nonlinearity::scaled_sine(2.0).unwrap();
    let drift = |integrator, dt: f64| {
        let steps = (2.0 / dt).round() as usize;
        let opts = SimulationOptions { integrator, sample_every: 1, ..SimulationOptions::new(dt, steps) };
        simulate_chain(&chain, &nl, &init, &opts).unwrap().relative_energy_drift()
    };
    let (coarse, fine) = (drift(Integrator::ModalSplit4, 4e-3), drift(Integrator::ModalSplit4, 2e-3));
    assert!(coarse / fine > 12.0, "{coarse:.3e} -> {fine:.3e}");
    assert!(coarse < drift(Integrator::ModalSplit, 4e-3) / 100.0);
}

#[test]
fn energy_matches_modal_sum() {
    let chain = five_chain();
    let map = build_modal_map(&chain).unwrap();
    let q = [0.1, -0.2, 0.05, 0.0, 0.3];
    let p = [0.0, 0.4, -0.1, 0.2, 0.0];
    let state = ChainState { positions: map.from_modal(&q).unwrap(), velocities: map.from_modal(&p).unwrap() };
    let modal: f64 = (0..5).map(|k| 0.5 * (p[k] * p[k] + map.eigenvalues()[k] * q[k] * q[k])).sum();
    assert!((total_energy(&chain, &state, &Nonlinearity::zero()) - modal).abs() < 1e-10 * modal);
}

#[test]
fn string_chain_frequencies_are_the_string_ones() {
    let l = 2.0;
    let chain = reconstruct_chain(&string_spectrum(7, l).unwrap(), 1.0).unwrap().chain;
    let map = build_modal_map(&chain).unwrap();
    for (k, w) in map.frequencies().iter().enumerate() {
        let exact = PI * (k + 1) as f64 / l;
        assert!((w - exact).abs() < 1e-10 * exact);
    }
}

#[test]
fn step_guard_rejects_large_steps() {
    let chain = five_chain();
    let top = build_modal_map(&chain).unwrap().frequencies()[4];
    let init = ChainState::at_rest(5);
    let err = simulate_chain(&chain, &Nonlinearity::zero(), &init, &SimulationOptions::new(1.0 / top, 10)).unwrap_err();
    assert!(matches!(err, Error::StepSize { .. }));
    let bad = ChainState::at_rest(4);
    assert!(matches!(
        simulate_chain(&chain, &Nonlinearity::zero(), &bad, &SimulationOptions::new(1e-3, 10)),
        Err(Error::Dimension(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn modal_map_round_trip(u in prop::collection::vec(-1.0..1.0f64, 6)) {
        let chain = reconstruct_chain(&string_spectrum(6, 1.3).unwrap(), 0.7).unwrap().chain;
        let map = build_modal_map(&chain).unwrap();
        let back = map.from_modal(&map.to_modal(&u).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(map.mass_orthonormality_defect() < 1e-12);
    }

    #[test]
    fn linear_energy_is_conserved(q in prop::collection::vec(-1.0..1.0f64, 5)) {
        let chain = five_chain();
        let map = build_modal_map(&chain).unwrap();
        let init = ChainState { positions: map.from_modal(&q).unwrap(), velocities: vec![0.0; 5] };
        let opts = SimulationOptions { sample_every: 100, ..SimulationOptions::new(1e-3, 2000) };
        let rec = simulate_chain(&chain, &Nonlinearity::zero(), &init, &opts).unwrap();
        // exact flow, so only rounding accumulates
        prop_assert!(rec.relative_energy_drift() < 1e-10);
    }
}
