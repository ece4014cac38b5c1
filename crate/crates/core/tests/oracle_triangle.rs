use std::f64::consts::TAU;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wavelink::oracle::{effective_propagate, lindblad_evolve};
use wavelink::{occupations_series, Model, SystemParams, TimeGrid};

/// Closed form, no-jump eigen-propagation and the master equation agree
/// on random weak-loss parameter sets.
#[test]
fn three_methods_agree() {
    let mut rng = StdRng::seed_from_u64(7);
    for case in 0..100 {
        let g = rng.random_range(0.05..2.0);
        let dw = rng.random_range(-4.0..4.0);
        let kappa = rng.random_range(0.0..0.1 * g);
        let gamma = rng.random_range(0.0..0.1 * g);
        let p = SystemParams::new(dw, g, kappa, gamma)
            .unwrap()
            .with_omega_q(rng.random_range(-2.0..2.0));
        let theta = p.derive().unwrap().osc_freq;
        let grid = TimeGrid::uniform(3.0 * TAU / theta, 150).unwrap();
        let analytic = occupations_series(&p, &grid, Model::Lossy).unwrap();
        let effective = effective_propagate(&p, &grid).unwrap();
        let lindblad = lindblad_evolve(&p, &grid).unwrap();
        let ae = analytic.max_abs_diff(&effective).unwrap();
        let al = analytic.max_abs_diff(&lindblad).unwrap();
        assert!(ae < 1e-6, "case {case}: analytic vs effective {ae:e} for {p:?}");
        assert!(al < 1e-6, "case {case}: analytic vs lindblad {al:e} for {p:?}");
    }
}

#[test]
fn lossless_model_matches_lossy_model_without_loss() {
    let p = SystemParams::lossless(0.5 * TAU, 1.1 * TAU).unwrap();
    let grid = TimeGrid::uniform(3.0, 1000).unwrap();
    let a = occupations_series(&p, &grid, Model::Lossless).unwrap();
    let b = occupations_series(&p, &grid, Model::Lossy).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
}

#[test]
fn qubit_frequency_is_a_global_phase() {
    let base = SystemParams::new(0.7, 0.4, 0.05, 0.02).unwrap();
    let grid = TimeGrid::uniform(20.0, 200).unwrap();
    let reference = lindblad_evolve(&base, &grid).unwrap();
    for omega_q in [-3.0, 5.0] {
        let shifted = lindblad_evolve(&base.with_omega_q(omega_q), &grid).unwrap();
        assert!(reference.max_abs_diff(&shifted).unwrap() < 1e-8);
        let eff = effective_propagate(&base.with_omega_q(omega_q), &grid).unwrap();
        assert!(reference.max_abs_diff(&eff).unwrap() < 1e-8);
    }
}
