use bo_core::birkhoff::{birkhoff_forward_with_spectrum, BirkhoffConfig};
use bo_core::illposed::{
    build_uk, divergent_gammas, eval_f, eval_f_detailed, lambda0_root, renormalization_scan, two_gap_divergence,
    windowed_integral, xi_timeseries, IllposedParams, DEFAULT_MAX_ORDER, F_ROOT_TOL,
};
use bo_core::lax::{assemble_lax, eigendecompose, LaxConfig};
use bo_core::flow::{evolve_potential, FlowMethod, FlowSpec};
use bo_core::spectral::{disc_eval, one_gap_potential, SobolevIndex, SobolevNorm};
use bo_core::C64;
use bo_core::Error;

#[test]
fn f_sign_grid_at_upper_endpoint() {
    for &e in &[0.05, 0.1, 0.2, 0.3, 0.4] {
        for &q in &[0.45, 0.6, 0.75, 0.9, 0.99] {
            let p = IllposedParams::new(e, q, 1.0).unwrap();
            let p = p.with_mu(p.mu_upper()).unwrap();
            let f = eval_f_detailed(&p).unwrap();
            assert!(f.value > 0.0, "eps {e} q {q}: {f:?}");
        }
    }
}

#[test]
fn root_matches_galerkin_ground_state() {
    let (e, q) = (0.3, 0.6);
    let root = lambda0_root(e, 1.0 - q * q).unwrap();
    assert!(root.f_value.abs() < F_ROOT_TOL);
    assert!(root.dfdmu > 0.0);
    let u = one_gap_potential(q, e, 256).unwrap();
    let spec = eigendecompose(&assemble_lax(&u, 256).unwrap(), &LaxConfig::default()).unwrap();
    let lambda0 = spec.lambda()[0];
    assert!((lambda0 + root.mu).abs() < 1e-6, "{lambda0} vs {}", -root.mu);
}

#[test]
fn root_is_unique_sign_change() {
    let (e, q) = (0.2, 0.9);
    let root = lambda0_root(e, 1.0 - q * q).unwrap();
    let base = IllposedParams::new(e, q, 1.0).unwrap();
    for i in 1..40 {
        let mu = root.upper * i as f64 / 40.0;
        let f = eval_f(&base.with_mu(mu).unwrap()).unwrap();
        if mu < root.mu * (1.0 - 1e-6) {
            assert!(f < 0.0, "mu {mu}");
        } else if mu > root.mu * (1.0 + 1e-6) {
            assert!(f > 0.0, "mu {mu}");
        }
    }
}

fn unit_grid() -> Vec<f64> {
    (0..=10_000).map(|i| i as f64 * 1e-4).collect()
}

#[test]
fn deep_ground_states() {
    let cfg = BirkhoffConfig::default();
    let mut previous_lambda0 = 0.0;
    for k in 1..=3 {
        let uk = build_uk(k, None, DEFAULT_MAX_ORDER).unwrap();
        assert!(uk.f_at_k < 0.0);
        let (state, spec) = birkhoff_forward_with_spectrum(&uk.field, &cfg).unwrap();
        let lambda = spec.lambda();
        assert!(lambda[0] < -(k as f64), "k {k}: lambda0 {}", lambda[0]);
        assert!(lambda[0] < previous_lambda0);
        previous_lambda0 = lambda[0];
        assert_eq!(lambda.iter().filter(|l| **l < 0.0).count(), 1);
        let rest: f64 = state.gamma()[1..].iter().sum::<f64>() + state.tail_action();
        assert!(rest <= 1.0 + 1e-6, "k {k}: {rest}");
        let norm = uk.field.sobolev_norm(SobolevIndex(-0.5)).powi(2);
        assert!((norm - uk.norm_minus_half_sq()).abs() < 1e-6);
    }
}

#[test]
fn deep_family_truncation_limit() {
    assert!(build_uk(4, None, DEFAULT_MAX_ORDER).is_ok());
    assert!(matches!(build_uk(5, None, DEFAULT_MAX_ORDER), Err(Error::TruncationInsufficient { .. })));
}

#[test]
fn xi_starts_at_first_mode_and_stays_away_from_zero() {
    let cfg = BirkhoffConfig::default();
    for k in 1..=3 {
        let uk = build_uk(k, None, DEFAULT_MAX_ORDER).unwrap();
        let series = xi_timeseries(&uk.field, &unit_grid(), 0.0, &cfg).unwrap();
        assert!((series.xi[0] - uk.epsilon() * uk.q()).norm() < 1e-8);
        let lambda0 = series.state.lambda()[0];
        let w = windowed_integral(&series, (0.0, 1.0), lambda0).unwrap();
        assert!(w.value.norm() > 0.5 * 2f64.sqrt(), "k {k}: {}", w.value);
        assert!((w.value - w.predicted).norm() * lambda0.abs() < 3.0);
    }
}

#[test]
fn xi_with_mean_is_a_phase_rotation() {
    let uk = build_uk(1, None, DEFAULT_MAX_ORDER).unwrap();
    let cfg = BirkhoffConfig::default();
    let grid = unit_grid();
    let a = xi_timeseries(&uk.field, &grid, 0.0, &cfg).unwrap();
    let b = xi_timeseries(&uk.field.with_mean(0.7), &grid, 0.7, &cfg).unwrap();
    for (t, (x, y)) in grid.iter().zip(a.xi.iter().zip(&b.xi)).step_by(500) {
        assert!((y - x * C64::from_polar(1.0, -1.4 * t)).norm() < 1e-12);
    }
}

#[test]
fn two_gap_factors_stay_in_disc() {
    for &g in &[1.0, 10.0, 100.0, 1000.0] {
        for &t in &[0.0, 0.3, 2.0] {
            let d = two_gap_divergence(g, t, 8).unwrap();
            assert!(d.q1.norm() < 1.0 && d.q2.norm() < 1.0, "gamma {g} t {t}");
            // Q(z) = (1 + q_1 z)(1 + q_2 z)
            assert!((d.alpha - (d.q1 + d.q2)).norm() < 1e-10 * (1.0 + g));
            assert!((d.beta - d.q1 * d.q2).norm() < 1e-10 * (1.0 + g));
        }
    }
}

#[test]
fn two_gap_coefficients_alternate_at_time_zero() {
    // Πu → −2z/(1 + z) as γ → ∞, so û(n) → 2(−1)^n
    let mut last = f64::INFINITY;
    for &g in &[1.0, 10.0, 100.0, 1000.0] {
        let d = two_gap_divergence(g, 0.0, 8).unwrap();
        let dist = (1..=8)
            .map(|n| (d.field.coeff(n) - 2.0 * (-1f64).powi(n as i32)).norm())
            .fold(0.0, f64::max);
        assert!(dist < last, "gamma {g}");
        last = dist;
    }
    assert!(last / 2.0 < 1e-2);
}

#[test]
fn renormalized_factors_stay_apart() {
    let t = 1.0;
    let gammas = divergent_gammas(1.0, t, 8).unwrap();
    for row in renormalization_scan(&gammas, t, 2048).unwrap() {
        assert!(row.distance > 0.1, "{row:?}");
    }
}

#[test]
fn ground_state_ratio_at_q() {
    let (e, q) = (0.3, 0.6);
    let root = lambda0_root(e, 1.0 - q * q).unwrap();
    let u = one_gap_potential(q, e, 256).unwrap();
    let spec = eigendecompose(&assemble_lax(&u, 256).unwrap(), &LaxConfig::default()).unwrap();
    let f0 = spec.eigenvector(0);
    let at_q = disc_eval(&f0, C64::new(q, 0.0)).unwrap();
    let at_0 = disc_eval(&f0, C64::new(0.0, 0.0)).unwrap();
    let expected = (e + root.mu) / e;
    assert!((at_q / at_0 - expected).norm() < 1e-6 * expected, "{} vs {expected}", at_q / at_0);
}

#[test]
fn deep_first_excited_level_is_in_unit_interval() {
    let uk = build_uk(2, None, DEFAULT_MAX_ORDER).unwrap();
    let (state, spec) = birkhoff_forward_with_spectrum(&uk.field, &BirkhoffConfig::default()).unwrap();
    let l1 = spec.lambda()[1];
    assert!((0.0..=1.0).contains(&l1), "{l1}");
    // positive until they fall below resolution, and they stay there
    let gaps = spec.gap_sequence().unwrap();
    let first_small = gaps.iter().position(|g| *g < 1e-12).unwrap_or(gaps.len());
    assert!(first_small > 10);
    assert!(gaps[first_small..].iter().all(|g| *g < 1e-10));
    assert!(state.gamma()[1..].iter().all(|g| *g >= 0.0));
}

#[test]
fn xi_series_matches_evolved_first_mode() {
    let uk = build_uk(1, None, DEFAULT_MAX_ORDER).unwrap();
    let times = vec![0.0, 0.25, 0.5, 1.0];
    let series = xi_timeseries(&uk.field, &times, 0.0, &BirkhoffConfig::default()).unwrap();
    let traj = evolve_potential(&uk.field, &FlowSpec::new(times, FlowMethod::Quadrature)).unwrap();
    for (x, v) in series.xi.iter().zip(&traj.fields) {
        assert!((x - v.coeff(1)).norm() < 1e-6, "{x} vs {}", v.coeff(1));
    }
}
