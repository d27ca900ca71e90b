//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always print, in order.
//! The process fails when a criterion fails that is not listed in
//! `KNOWN_RED`, or when a listed one starts passing.

use std::f64::consts::PI;
use std::time::Instant;

use bo_core::birkhoff::{
    birkhoff_forward, birkhoff_forward_with_spectrum, frequencies, trace_formula, BirkhoffConfig, BirkhoffState,
};
use bo_core::flow::{compare_trajectories, evolve_potential, FlowMethod, FlowSpec};
use bo_core::illposed::{
    build_uk, eval_f_detailed, lambda0_root, two_gap_divergence, windowed_integral, xi_timeseries, IllposedParams,
    DEFAULT_MAX_ORDER,
};
use bo_core::inverse::{reconstruct, transfer_matrix, two_gap_closed_form};
use bo_core::lax::{assemble_lax, eigendecompose, genfun_product, genfun_resolvent, LaxConfig};
use bo_core::probes::{normtrack, recurrence_probe, roundtrip_suite, stability_probe, NormTrackOptions, StabilityOptions};
use bo_core::random::{band_limited_fixtures, fixture_rng};
use bo_core::spectral::{one_gap_potential, traveling_wave, SobolevIndex, SobolevNorm};
use bo_core::{Result, C64};
use rand::Rng;

const ONE_GAP_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-8;
const GENFUN_REL_TOL: f64 = 1e-8;
const CLOSED_FORM_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL: f64 = 1e-6;
const FLOW_DISTANCE_TOL: f64 = 1e-4;
const GAP_DRIFT_TOL: f64 = 1e-6;
const CONSERVATION_TOL: f64 = 1e-8;
const TRAVELING_TOL: f64 = 1e-6;
const F_ROOT_TOL: f64 = 1e-10;
const ROOT_GALERKIN_TOL: f64 = 1e-6;
const DEEP_TAIL_SLACK: f64 = 1e-6;
const DEEP_NORM_TOL: f64 = 1e-6;
const XI_START_TOL: f64 = 1e-8;
/// Bound on `|integral − predicted| · |λ_0|` across the representable `k`.
const REMAINDER_BOUND: f64 = 3.0;
const LIMIT_REL_TOL: f64 = 1e-2;
const RETURN_TIME_TOL: f64 = 1e-8;
const RETURN_DISTANCE_TOL: f64 = 1e-8;
const CONSTANT_NORM_REL_TOL: f64 = 1e-12;
const GROWTH_TOL: f64 = 1e-8;

/// Criteria expected to fail, with the reason.
const KNOWN_RED: &[(usize, &str)] = &[(
    11,
    "target sign: with Q = (1 + q1 z)(1 + q2 z) and Πu = −zQ'/Q the coefficients tend to 2(−1)^n, not 2(−1)^(n+1)",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn one_gap_identities() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for q in [0.3, 0.5, 0.7] {
        let u = traveling_wave(q, 256)?;
        let (state, spec) = birkhoff_forward_with_spectrum(&u, &BirkhoffConfig::default())?;
        let gaps = spec.gap_sequence()?;
        let g1 = q * q / (1.0 - q * q);
        let w1 = (1.0 - 3.0 * q * q) / (1.0 - q * q);
        let rest = gaps[1..].iter().copied().fold(0.0, f64::max);
        worst = worst
            .max((gaps[0] - g1).abs())
            .max((spec.lambda()[0] + g1).abs())
            .max((frequencies(&state, 0.0).omega[0] - w1).abs())
            .max(rest);
    }
    outcome(worst < ONE_GAP_TOL, format!("max deviation {worst:.2e}"))
}

fn random_fields() -> Result<Vec<bo_core::RealField>> {
    band_limited_fixtures(2024, 10, 64, 6)
}

fn trace_formula_check() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for u in random_fields()? {
        let state = birkhoff_forward(&u, &BirkhoffConfig::default())?;
        worst = worst.max((u.l2_norm().powi(2) - trace_formula(&state)).abs());
    }
    outcome(worst < TRACE_TOL, format!("max |‖u‖² − 2Σnγ_n| {worst:.2e}"))
}

fn generating_function() -> Result<Outcome> {
    let cfg = LaxConfig::default();
    let mut worst: f64 = 0.0;
    for (i, u) in random_fields()?.iter().enumerate() {
        let lax = assemble_lax(u, u.order())?;
        let spec = eigendecompose(&lax, &cfg)?;
        let mut rng = fixture_rng(2024, 100 + i as u64);
        for _ in 0..20 {
            let im: f64 = rng.gen_range(0.05..3.0);
            let z = C64::new(rng.gen_range(-5.0..5.0), if rng.gen::<bool>() { im } else { -im });
            let a = genfun_resolvent(&lax, z, &cfg)?.value;
            let b = genfun_product(&spec, z, &cfg)?.value;
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    outcome(worst < GENFUN_REL_TOL, format!("200 points, max relative error {worst:.2e}"))
}

fn two_gap_closed_forms() -> Result<Outcome> {
    let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
    let (p1, p2) = (0.3, 2.1);
    let mut worst: f64 = 0.0;
    for &g1 in &grid {
        for &g2 in &grid {
            let cf = two_gap_closed_form(g1, g2, p1, p2);
            let state = BirkhoffState::from_actions_angles(&[g1, g2], &[p1, p2], 0.0)?;
            let m = transfer_matrix(&state)?;
            for n in 0..2 {
                for p in 0..2 {
                    worst = worst.max((m.entry(n, p) - cf.m[n][p]).norm());
                }
            }
            let w = frequencies(&state, 0.0).omega;
            worst = worst
                .max((state.kappa()[0] - cf.kappa0).abs())
                .max((state.kappa()[1] - cf.kappa1).abs())
                .max((w[0] - cf.omega1).abs())
                .max((w[1] - cf.omega2).abs());
        }
    }
    outcome(worst < CLOSED_FORM_TOL, format!("25 grid points, max deviation {worst:.2e}"))
}

fn round_trip() -> Result<Outcome> {
    let r = roundtrip_suite(7, 25, 4, 128)?;
    outcome(
        r.max_action_error < ROUNDTRIP_TOL && r.max_potential_error < ROUNDTRIP_TOL,
        format!("action {:.2e}, potential {:.2e}", r.max_action_error, r.max_potential_error),
    )
}

fn flow_cross_validation() -> Result<Outcome> {
    let state = BirkhoffState::from_actions_angles(&[0.5, 0.25], &[0.0, 0.0], 0.0)?;
    let v0 = reconstruct(&state, 128)?;
    let mut q = FlowSpec::uniform(1.0, 10, FlowMethod::Quadrature);
    q.gap_count = 2;
    q.dt = 1e-4;
    let mut d = q.clone();
    d.method = FlowMethod::Direct;
    let a = evolve_potential(&v0, &q)?;
    let b = evolve_potential(&v0, &d)?;
    let cmp = compare_trajectories(&a, &b, SobolevIndex::L2)?;
    let gap_drift = cmp.gap_drift_b.iter().copied().fold(0.0, f64::max);
    let d0 = &b.diagnostics[0];
    let conservation = b
        .diagnostics
        .iter()
        .map(|x| (x.mean - d0.mean).abs().max((x.l2 - d0.l2).abs()))
        .fold(0.0, f64::max);
    outcome(
        cmp.max_distance < FLOW_DISTANCE_TOL && gap_drift < GAP_DRIFT_TOL && conservation < CONSERVATION_TOL,
        format!("distance {:.2e}, gap drift {gap_drift:.2e}, mean/L2 drift {conservation:.2e}", cmp.max_distance),
    )
}

fn traveling_wave_direct() -> Result<Outcome> {
    let u = traveling_wave(0.5, 128)?;
    let traj = evolve_potential(&u, &FlowSpec::new(vec![0.0, 1.0], FlowMethod::Direct))?;
    let err = traj.fields[1].distance(&u.translated(1.0 / 3.0), SobolevIndex::L2);
    outcome(err < TRAVELING_TOL, format!("L2 error at t = 1 {err:.2e}"))
}

fn f_function_suite() -> Result<Outcome> {
    let mut positive = true;
    let mut worst_f: f64 = 0.0;
    let mut slopes_positive = true;
    for &e in &[0.05, 0.1, 0.2, 0.3, 0.4] {
        for &q in &[0.45, 0.6, 0.75, 0.9, 0.99] {
            let p = IllposedParams::new(e, q, 1.0)?;
            positive &= eval_f_detailed(&p.with_mu(p.mu_upper())?)?.value > 0.0;
            let root = lambda0_root(e, 1.0 - q * q)?;
            worst_f = worst_f.max(root.f_value.abs());
            slopes_positive &= root.dfdmu > 0.0;
        }
    }
    let (e, q) = (0.3, 0.6);
    let root = lambda0_root(e, 1.0 - q * q)?;
    let u = one_gap_potential(q, e, 256)?;
    let spec = eigendecompose(&assemble_lax(&u, 256)?, &LaxConfig::default())?;
    let galerkin = (spec.lambda()[0] + root.mu).abs();
    outcome(
        positive && slopes_positive && worst_f < F_ROOT_TOL && galerkin < ROOT_GALERKIN_TOL,
        format!(
            "F > 0 at upper end: {positive}, max |F(μ*)| {worst_f:.2e}, ∂F > 0: {slopes_positive}, Galerkin gap {galerkin:.2e}"
        ),
    )
}

fn deep_ground_states() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let uk = build_uk(k, None, DEFAULT_MAX_ORDER)?;
        let (state, spec) = birkhoff_forward_with_spectrum(&uk.field, &BirkhoffConfig::default())?;
        let lambda0 = spec.lambda()[0];
        let negatives = spec.lambda().iter().filter(|l| **l < 0.0).count();
        let tail = state.gamma()[1..].iter().sum::<f64>() + state.tail_action();
        let e = uk.epsilon();
        let closed = -2.0 * e * e * uk.params.one_minus_q2.ln();
        let norm = uk.field.sobolev_norm(SobolevIndex(-0.5)).powi(2);
        pass &= lambda0 < -(k as f64)
            && negatives == 1
            && tail <= 1.0 + DEEP_TAIL_SLACK
            && (norm - closed).abs() < DEEP_NORM_TOL;
        parts.push(format!("k={k}: ε={e}, λ0={lambda0:.3}, tail={tail:.3}, norm gap {:.1e}", (norm - closed).abs()));
    }
    outcome(pass, parts.join("; "))
}

fn divergence_witness() -> Result<Outcome> {
    let grid: Vec<f64> = (0..=10_000).map(|i| i as f64 * 1e-4).collect();
    let cfg = BirkhoffConfig::default();
    let mut k = 1;
    let mut start_ok = true;
    let mut bound_ok = true;
    let mut largest = None;
    let mut remainders = Vec::new();
    loop {
        let uk = match build_uk(k, None, DEFAULT_MAX_ORDER) {
            Ok(uk) => uk,
            Err(bo_core::Error::TruncationInsufficient { .. }) if k > 1 => break,
            Err(e) => return Err(e),
        };
        let series = xi_timeseries(&uk.field, &grid, 0.0, &cfg)?;
        start_ok &= (series.xi[0] - uk.epsilon() * uk.q()).norm() < XI_START_TOL;
        let lambda0 = series.state.lambda()[0];
        let w = windowed_integral(&series, (0.0, 1.0), lambda0)?;
        let remainder = (w.value - w.predicted).norm() * lambda0.abs();
        bound_ok &= remainder < REMAINDER_BOUND;
        remainders.push(format!("{remainder:.2}"));
        largest = Some((k, w.value.norm()));
        k += 1;
    }
    let (k_max, modulus) = largest.expect("k = 1 is representable");
    let big = modulus > 0.5 * 2f64.sqrt();
    outcome(
        start_ok && bound_ok && big,
        format!(
            "ξ(0) ok: {start_ok}; k_max={k_max}, |integral|={modulus:.3} (> {:.3}); remainder·|λ0| = [{}]",
            0.5 * 2f64.sqrt(),
            remainders.join(", ")
        ),
    )
}

fn two_gap_limit() -> Result<Outcome> {
    let target = |n: i32| 2.0 * (-1f64).powi(n + 1);
    let mut last = f64::INFINITY;
    let mut monotone = true;
    let mut in_disc = true;
    let mut dist = Vec::new();
    let mut opposite = Vec::new();
    for &g in &[1.0, 10.0, 100.0, 1000.0] {
        let d = two_gap_divergence(g, 0.0, 8)?;
        in_disc &= d.q1.norm() < 1.0 && d.q2.norm() < 1.0;
        let rel = |f: &dyn Fn(i32) -> f64| {
            (1..=8).map(|n| (d.field.coeff(n as i64) - f(n)).norm() / 2.0).fold(0.0, f64::max)
        };
        let r = rel(&target);
        monotone &= r < last;
        last = r;
        dist.push(format!("{r:.2e}"));
        opposite.push(format!("{:.2e}", rel(&|n| -target(n))));
    }
    outcome(
        monotone && last < LIMIT_REL_TOL && in_disc,
        format!(
            "|q_i| < 1: {in_disc}; deviation from 2(−1)^(n+1): [{}]; from 2(−1)^n: [{}]",
            dist.join(", "),
            opposite.join(", ")
        ),
    )
}

fn probe_suite() -> Result<Outcome> {
    let still = stability_probe(0.5, 0.0, SobolevIndex::L2, 50.0, &StabilityOptions::default())?;
    let stable = still.sup_distance == 0.0;

    let one = birkhoff_forward(&traveling_wave(0.5, 128)?, &BirkhoffConfig::default())?;
    let r1 = recurrence_probe(&one, 0.0, 40.0, 1e-6, SobolevIndex::L2, 128)?;
    let two = BirkhoffState::from_actions_angles(&[1.0, 1.0], &[0.2, -0.7], 0.0)?;
    let r2 = recurrence_probe(&two, 0.0, 10.0, 1e-6, SobolevIndex::L2, 128)?;
    let returns = |r: &bo_core::probes::RecurrenceReport, period: f64| {
        r.returns.first().is_some_and(|x| (x.t - period).abs() < RETURN_TIME_TOL && x.distance < RETURN_DISTANCE_TOL)
    };
    let periodic = returns(&r1, 6.0 * PI) && returns(&r2, 2.0 * PI);

    let s = [SobolevIndex(-0.5), SobolevIndex::L2, SobolevIndex(1.0)];
    let wave = normtrack(&traveling_wave(0.5, 128)?, &s, 100.0, &NormTrackOptions::default())?;
    let constant = wave.quadrature.iter().all(|n| n.sup - n.inf < CONSTANT_NORM_REL_TOL * n.sup);
    let v0 = reconstruct(&BirkhoffState::from_actions_angles(&[0.5, 0.25], &[0.3, 1.1], 0.0)?, 128)?;
    // the norms depend on φ_2 − 2φ_1 only, which turns at rate 3; sample whole laps covering [0, 100]
    let period = 2.0 * PI / 3.0;
    let laps = (100.0 / period).ceil() as usize;
    let opts = NormTrackOptions { samples: 50 * laps, ..NormTrackOptions::default() };
    let gap2 = normtrack(&v0, &s, period * laps as f64, &opts)?;
    let growth = gap2.quadrature.iter().map(|n| n.growth).fold(f64::NEG_INFINITY, f64::max);
    let bounded = growth < GROWTH_TOL;
    outcome(
        stable && periodic && constant && bounded,
        format!(
            "δ=0 sup {:.1e}; returns {:?} / {:?}; wave norms constant: {constant}; two-gap growth {growth:.1e}",
            still.sup_distance,
            r1.returns.first().map(|x| x.t),
            r2.returns.first().map(|x| x.t)
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("one-gap spectral identities", one_gap_identities),
        ("trace formula", trace_formula_check),
        ("generating function", generating_function),
        ("two-gap closed forms", two_gap_closed_forms),
        ("round trip", round_trip),
        ("flow cross-validation", flow_cross_validation),
        ("traveling wave", traveling_wave_direct),
        ("F function", f_function_suite),
        ("deep ground states", deep_ground_states),
        ("divergence witness", divergence_witness),
        ("two-gap large-action limit", two_gap_limit),
        ("probe suite", probe_suite),
    ];
    let mut unexpected = Vec::new();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let clock = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = clock.elapsed().as_secs_f64();
        println!("{} {id:>2} {name} ({secs:.1} s): {detail}", if pass { "PASS" } else { "FAIL" });
        let known = KNOWN_RED.iter().find(|(n, _)| *n == id);
        if let Some((_, why)) = known {
            println!("        known red: {why}");
        }
        if !pass {
            failed += 1;
        }
        if pass == known.is_some() {
            unexpected.push(id);
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
