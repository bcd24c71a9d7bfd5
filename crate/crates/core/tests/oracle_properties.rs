use std::f64::consts::PI;

use proptest::prelude::*;
use qtm_core::collision::{collide, heisenberg_closed_form};
use qtm_core::oracle::{
    build_total_hamiltonian, heisenberg_coefficients, oracle_collision, DenseEvolution, DenseOperator, OracleStatus,
    PairSpace, TruncationPolicy, DEFAULT_MAX_DIMENSION,
};
use qtm_core::{MachineConfig, SystemKind};

/// Qubit pair parametrised by the ratios the closed form depends on.
fn qubit_point() -> impl Strategy<Value = (MachineConfig, f64)> {
    (-2.0f64..2.0, 1e-6f64..=1.0, 0.1f64..10.0, 0.1f64..10.0, 0.2f64..5.0, any::<bool>()).prop_map(
        |(log_ratio, kt_frac, xc, xh, wc, hotter)| {
            let g_over_delta = 10f64.powf(log_ratio);
            let delta = if hotter { 0.5 * wc } else { -0.25 * wc };
            let wh = wc + 2.0 * delta;
            let g = g_over_delta * delta.abs();
            let k = delta.hypot(g);
            let tau = 2.0 * PI * kt_frac / k;
            let m = MachineConfig::new(wc, wh, wc / xc, wh / xh, g).unwrap();
            (m, tau)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qubit_oracle_matches_closed_form((m, tau) in qubit_point()) {
        let policy = TruncationPolicy::default();
        let r = oracle_collision(&m, tau, &policy).unwrap();
        prop_assert_eq!(r.status, OracleStatus::Exact);
        let exact = collide(&m, tau).unwrap();
        prop_assert!((r.outcome.n_h_post - exact.n_h_post).abs() <= 1e-10);
        prop_assert!((r.outcome.n_c_post - exact.n_c_post).abs() <= 1e-10);
        prop_assert!((r.outcome.work - exact.work).abs() <= 1e-10 * m.omega_h().max(m.omega_c()));
        prop_assert!(r.excitation_drift.abs() <= 1e-12);
    }

    #[test]
    fn evolution_is_unitary(
        n_c in 2usize..6, n_h in 2usize..6, wc in 0.1f64..5.0, wh in 0.1f64..5.0,
        g in 0.0f64..3.0, tau in 0.0f64..10.0, xc in 0.1f64..5.0, xh in 0.1f64..5.0,
    ) {
        let space = PairSpace::new(SystemKind::FiniteLevels(n_c), SystemKind::FiniteLevels(n_h), n_c, n_h).unwrap();
        let h = build_total_hamiltonian(&space, wc, wh, g, DEFAULT_MAX_DIMENSION).unwrap();
        prop_assert!(h.is_hermitian(1e-14));
        let evolution = DenseEvolution::new(&h).unwrap();
        let rho0 = DenseOperator::thermal_product_state(&space, wc, wh, wc / xc, wh / xh).unwrap();
        let rho = evolution.evolve(&rho0, tau);
        prop_assert!(rho.is_density_matrix(1e-12));
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        // excitation number commutes with H
        let mut total = DenseOperator::number_operator(&space, qtm_core::oracle::Side::Cold).matrix().clone();
        total += DenseOperator::number_operator(&space, qtm_core::oracle::Side::Hot).matrix();
        let total = DenseOperator::new(total).unwrap();
        prop_assert!(h.commutator_norm(&total) <= 1e-12 * (1.0 + g + wc + wh));
    }

    #[test]
    fn heisenberg_partition(g in 1e-2f64..10.0, delta in -10.0f64..10.0, t in 0.0f64..20.0) {
        let f = heisenberg_closed_form(g, delta, t);
        prop_assert!((f.f_h + f.f_c - 1.0).abs() <= 1e-14);
        prop_assert!(f.f_h >= -1e-15 && f.f_c >= -1e-15);
        // unitarity of the single-excitation block
        prop_assert!((f.f_h * f.f_c - f.f_plus * f.f_plus - f.f_minus_im * f.f_minus_im).abs() <= 1e-13);
    }
}

#[test]
fn heisenberg_matrix_elements_match_closed_form() {
    let space = PairSpace::new(SystemKind::Oscillator, SystemKind::Oscillator, 6, 6).unwrap();
    for &(wc, wh, g, tau) in &[(1.0, 2.0, 0.3, 0.7), (1.0, 5.0, 1.0, 2.3), (3.0, 1.0, 0.8, 4.1)] {
        let num = heisenberg_coefficients(&space, wc, wh, g, tau).unwrap();
        let exact = heisenberg_closed_form(g, (wh - wc) / 2.0, tau);
        assert!((num.form.f_h - exact.f_h).abs() < 1e-12);
        assert!((num.form.f_c - exact.f_c).abs() < 1e-12);
        assert!((num.form.f_plus - exact.f_plus).abs() < 1e-12);
        assert!((num.form.f_minus_im - exact.f_minus_im).abs() < 1e-12);
        assert!(num.f_minus_re.abs() < 1e-12);
        assert!(num.identity_residual < 1e-10, "{}", num.identity_residual);
    }
}

#[test]
fn many_levels_reproduce_the_oscillator() {
    let n = 40;
    let policy = TruncationPolicy::new(n, 1e-10).unwrap();
    for &(wc, wh, tc, th, g, tau) in &[
        (1.0, 2.0, 0.5, 1.5, 0.4, 1.1),
        (2.0, 3.0, 1.0, 2.5, 1.2, 0.6),
        (1.5, 4.0, 1.0, 3.0, 2.0, 3.0),
    ] {
        let levels = MachineConfig::new(wc, wh, tc, th, g)
            .unwrap()
            .with_kind(SystemKind::FiniteLevels(n));
        let osc = MachineConfig::new(wc, wh, tc, th, g)
            .unwrap()
            .with_kind(SystemKind::Oscillator);
        let r = oracle_collision(&levels, tau, &policy).unwrap();
        assert_eq!(r.status, OracleStatus::Exact);
        let exact = collide(&osc, tau).unwrap();
        assert!((r.outcome.n_h_post - exact.n_h_post).abs() < 1e-6);
        assert!((r.outcome.n_c_post - exact.n_c_post).abs() < 1e-6);
    }
}
