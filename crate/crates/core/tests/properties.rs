use proptest::prelude::*;

use wavelink::analytic::{envelope_coefficients, envelope_norm_identity, lossless_occupations, lossy_occupations};
use wavelink::metrics::{classify_n_default, transfer_metrics, Eta};
use wavelink::oracle::lindblad::Lindbladian;
use wavelink::oracle::{biorthogonal_eigensystem, is_block_diagonal, jump_rate_series, multi_excitation_hamiltonian};
use wavelink::{occupations_series, Model, SystemParams, TimeGrid};

fn lossless() -> impl Strategy<Value = SystemParams> {
    (0.01f64..3.0, -5.0f64..5.0).prop_map(|(g, dw)| SystemParams::lossless(dw, g).unwrap())
}

/// Losses kept below the coupling so no exceptional point is reachable.
fn weak_loss() -> impl Strategy<Value = SystemParams> {
    (0.05f64..2.0, -3.0f64..3.0, 0.0f64..0.1, 0.0f64..0.1)
        .prop_map(|(g, dw, k, gm)| SystemParams::new(dw, g, k, gm).unwrap())
}

fn any_loss() -> impl Strategy<Value = SystemParams> {
    (0.0f64..2.0, -3.0f64..3.0, 0.0f64..2.0, 0.0f64..2.0)
        .prop_map(|(g, dw, k, gm)| SystemParams::new(dw, g, k, gm).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn lossless_probabilities_sum_to_one(p in lossless(), t in 0.0f64..200.0) {
        let o = lossless_occupations(t, &p.derive().unwrap()).unwrap();
        prop_assert!((o.total() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn occupations_are_probabilities(p in any_loss(), t in 0.0f64..500.0) {
        let o = lossy_occupations(t, &p.derive().unwrap());
        for x in [o.p_a, o.p_wg, o.p_b] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x), "{o:?}");
        }
        prop_assert!(o.total() <= 1.0 + 1e-12);
    }

    #[test]
    fn lossy_norm_never_grows(p in any_loss(), t in 0.0f64..100.0, dt in 0.0f64..10.0) {
        let d = p.derive().unwrap();
        prop_assert!(lossy_occupations(t + dt, &d).total() <= lossy_occupations(t, &d).total() + 1e-12);
    }

    #[test]
    fn envelope_norm_identity_holds(p in weak_loss(), t in 0.0f64..300.0) {
        let d = p.derive().unwrap();
        let e = envelope_coefficients(t, &d);
        let lhs = e.a_t * e.a_t + e.b_t * e.b_t;
        prop_assert!((lhs - envelope_norm_identity(t, &d)).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn decay_split_sign(p in any_loss()) {
        let d = p.derive().unwrap();
        let s = d.half_detuning * d.loss_asymmetry;
        if s != 0.0 && d.decay_split != 0.0 {
            prop_assert_eq!(d.decay_split.signum(), s.signum());
        }
    }

    #[test]
    fn biorthonormal(p in weak_loss(), omega_q in -5.0f64..5.0) {
        let sys = biorthogonal_eigensystem(&p.with_omega_q(omega_q)).unwrap();
        prop_assert!(sys.biorthogonality_error() < 1e-10);
    }

    #[test]
    fn excitation_blocks_decouple(p in any_loss(), omega_q in -5.0f64..5.0, blocks in 2usize..6) {
        prop_assert!(is_block_diagonal(&multi_excitation_hamiltonian(blocks, &p.with_omega_q(omega_q)), 3));
    }

    #[test]
    fn larger_eta_never_delays(p in weak_loss(), e1 in 0.0f64..0.2, e2 in 0.0f64..0.2) {
        let grid = TimeGrid::uniform(30.0, 600).unwrap();
        let s = occupations_series(&p, &grid, Model::Lossy).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = transfer_metrics(&s, Eta::per_ns(lo).unwrap()).unwrap();
        let b = transfer_metrics(&s, Eta::per_ns(hi).unwrap()).unwrap();
        prop_assert!(a.latency >= b.latency);
    }

    #[test]
    fn optimum_dominates_grid(p in weak_loss(), eta in 0.0f64..0.2) {
        let grid = TimeGrid::uniform(30.0, 300).unwrap();
        let s = occupations_series(&p, &grid, Model::Lossy).unwrap();
        let m = transfer_metrics(&s, Eta::per_ns(eta).unwrap()).unwrap();
        prop_assert_eq!(m.fidelity, s.occupations[m.achieved_index.unwrap()].p_b);
        for (t, o) in s.times.iter().zip(&s.occupations) {
            prop_assert!(m.efficiency >= o.p_b - eta * t);
        }
    }

    #[test]
    fn classification_is_scale_invariant(g in 0.01f64..1.0, dw in 0.01f64..1.0, k in 0.1f64..10.0) {
        let a = classify_n_default(&SystemParams::lossless(dw, g).unwrap().derive().unwrap());
        let b = classify_n_default(&SystemParams::lossless(dw * k, g * k).unwrap().derive().unwrap());
        prop_assert_eq!(a.kind, b.kind);
    }

    #[test]
    fn jump_rate_is_norm_loss(p in weak_loss()) {
        let grid = TimeGrid::uniform(20.0, 100_001).unwrap();
        let h = grid.step().unwrap();
        let s = occupations_series(&p, &grid, Model::Lossy).unwrap();
        let rates = jump_rate_series(&s, &p);
        for i in (1..100_000).step_by(9_973) {
            let dn = (s.occupations[i + 1].total() - s.occupations[i - 1].total()) / (2.0 * h);
            prop_assert!((dn + rates[i]).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn master_equation_state_is_physical(p in weak_loss()) {
        let grid = TimeGrid::uniform(10.0, 50).unwrap();
        for rho in Lindbladian::new(&p).unwrap().states(&grid, 400) {
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-10 && rho.trace().im.abs() < 1e-12);
            prop_assert!(rho.hermiticity_error() < 1e-12);
            prop_assert!(rho.min_eigenvalue() >= -1e-10);
        }
    }
}
