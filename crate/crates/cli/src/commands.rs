use std::fmt::Write as _;
use std::path::PathBuf;

use bo_core::birkhoff::{birkhoff_forward_with_spectrum, frequencies, hamiltonian_b, trace_formula};
use bo_core::flow::{compare_trajectories, evolve_potential, FlowMethod, FlowSpec, Trajectory};
use bo_core::illposed::{
    build_uk, divergent_gammas, lambda0_root, renormalization_scan, two_gap_divergence, windowed_integral,
    xi_timeseries, DEFAULT_MAX_ORDER,
};
use bo_core::inverse::{check_roots, first_coefficient, q_polynomial, reconstruct, resolving_order, transfer_matrix};
use bo_core::io::{field_csv, read_field, read_gaps, read_state, trajectory_csv, BirkhoffJson, FieldJson, SpectrumJson};
use bo_core::lax::{assemble_lax, eigendecompose, genfun_product, genfun_resolvent};
use bo_core::probes::{
    normtrack, recurrence_probe, roundtrip_case, stability_probe, summarize_roundtrip, NormTrackOptions,
    StabilityOptions, ROUNDTRIP_MAX_ORDER,
};
use bo_core::random::finite_gap_fixtures;
use bo_core::spectral::{one_gap_potential, SobolevNorm};
use bo_core::{birkhoff_forward, BirkhoffState, RealField, SobolevIndex, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Command, FlowArgs, InputArgs};
use crate::settings::parse_list;
use crate::{CliError, Context};

const DEFAULT_MODES: usize = 256;
const PROBE_MODES: usize = 128;
/// Dropped inverse-map coefficients below this when the order is automatic.
const RESOLVE_TOL: f64 = 1e-14;

pub fn execute(cmd: &Command, ctx: &mut Context) -> Result<Value, CliError> {
    match cmd {
        Command::Forward(input) => forward(ctx, input),
        Command::Inverse(input) => inverse(ctx, input),
        Command::Spectrum { input, vectors } => spectrum(ctx, input, *vectors),
        Command::Genfun { input, lambda_re, lambda_im, points } => genfun(ctx, input, *lambda_re, *lambda_im, *points),
        Command::Evolve { input, flow } => evolve(ctx, input, flow),
        Command::Compare { input, flow } => compare(ctx, input, flow),
        Command::IllposedHalf { k, eps, tmax, dt, window } => illposed_half(ctx, *k, *eps, *tmax, *dt, window.clone()),
        Command::IllposedDeep { gamma, t, count, eta_points } => illposed_deep(ctx, *gamma, *t, *count, *eta_points),
        Command::Stability { q, delta, s, tmax, samples, band, shift } => {
            stability(ctx, *q, *delta, *s, *tmax, *samples, *band, *shift)
        }
        Command::Recurrence { input, horizon, return_eps, s } => recurrence(ctx, input, *horizon, *return_eps, *s),
        Command::Normtrack { input, s, tmax, samples, direct_tmax, dt } => {
            norm_track(ctx, input, s.clone(), *tmax, *samples, *direct_tmax, *dt)
        }
        Command::Roundtrip { gaps, count } => roundtrip(ctx, *gaps, *count),
    }
}

enum Source {
    Field(RealField),
    State(BirkhoffState),
}

fn source(ctx: &Context, input: &InputArgs) -> Result<Source, CliError> {
    let s = &ctx.settings;
    let q = s.get("q", input.q)?;
    let eps = s.get("eps", input.eps)?;
    let field = s.get::<PathBuf>("field", input.field.clone())?;
    let gaps = s.get::<PathBuf>("gaps", input.gaps.clone())?;
    let state = s.get::<PathBuf>("state", input.state.clone())?;
    let mean = s.get("mean", input.mean)?;
    let given = [q.is_some(), field.is_some(), gaps.is_some(), state.is_some()].iter().filter(|b| **b).count();
    if given != 1 {
        return Err(CliError::Usage("give exactly one of --q, --field, --gaps, --state".into()));
    }
    if eps.is_some() && q.is_none() {
        return Err(CliError::Usage("--eps needs --q".into()));
    }
    if let Some(q) = q {
        let u = one_gap_potential(q, eps.unwrap_or(1.0), ctx.modes.unwrap_or(DEFAULT_MODES))?;
        return Ok(Source::Field(u.with_mean(mean.unwrap_or(0.0))));
    }
    if let Some(p) = field {
        let mut u = read_field(&p)?;
        if let Some(n) = ctx.modes {
            u = u.resized(n);
        }
        if let Some(c) = mean {
            u = u.with_mean(c);
        }
        return Ok(Source::Field(u));
    }
    if let Some(p) = gaps {
        return Ok(Source::State(read_gaps(&p, mean.unwrap_or(0.0))?));
    }
    let st = read_state(&state.expect("one source is set"))?;
    Ok(Source::State(match mean {
        Some(c) => st.with_mean(c),
        None => st,
    }))
}

fn order_for(ctx: &Context, state: &BirkhoffState) -> Result<usize, CliError> {
    match ctx.modes {
        Some(n) => Ok(n),
        None => Ok(resolving_order(state, DEFAULT_MODES, RESOLVE_TOL)?.min(ROUNDTRIP_MAX_ORDER)),
    }
}

fn potential(ctx: &Context, src: Source) -> Result<RealField, CliError> {
    match src {
        Source::Field(u) => Ok(u),
        Source::State(st) => Ok(reconstruct(&st, order_for(ctx, &st)?)?),
    }
}

fn birkhoff(ctx: &Context, src: Source) -> Result<BirkhoffState, CliError> {
    match src {
        Source::Field(u) => Ok(birkhoff_forward(&u, &ctx.forward)?),
        Source::State(st) => Ok(st),
    }
}

fn sobolev(key: &str, s: f64) -> Result<SobolevIndex, CliError> {
    SobolevIndex::new(s).map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

fn count(key: &str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Usage(format!("{key} must be positive")));
    }
    Ok(n)
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn forward(ctx: &mut Context, input: &InputArgs) -> Result<Value, CliError> {
    let (state, norm) = match source(ctx, input)? {
        Source::Field(u) => {
            let (state, _) = birkhoff_forward_with_spectrum(&u, &ctx.forward)?;
            (state, Some(u.without_mean().l2_norm().powi(2)))
        }
        Source::State(st) => (st, None),
    };
    ctx.out.json("state.json", &BirkhoffJson::from(&state))?;
    Ok(json!({
        "gaps": state.gaps(),
        "mean": state.mean_c(),
        "gamma": state.gamma(),
        "angles": state.angles(),
        "lambda": state.lambda(),
        "tail_action": state.tail_action(),
        "trace": { "actions": trace_formula(&state), "l2_squared": norm },
        "hamiltonian": hamiltonian_b(&state),
        "frequencies": frequencies(&state, state.mean_c()).omega,
    }))
}

fn inverse(ctx: &mut Context, input: &InputArgs) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let state = birkhoff(ctx, src)?;
    let order = order_for(ctx, &state)?;
    let u = reconstruct(&state, order)?;
    let m = transfer_matrix(&state)?;
    let roots = check_roots(&m)?;
    ctx.out.json("field.json", &FieldJson::from(&u))?;
    ctx.out.text("field.csv", &field_csv(&u))?;
    Ok(json!({
        "order": order,
        "gaps": state.gaps(),
        "q_coefficients": q_polynomial(&m).into_iter().map(pair).collect::<Vec<_>>(),
        "roots": roots.iter().map(|r| pair(*r)).collect::<Vec<_>>(),
        "max_root_modulus": roots.iter().map(|r| r.norm()).fold(0.0, f64::max),
        "first_coefficient": pair(first_coefficient(&state)),
        "l2_squared": u.without_mean().l2_norm().powi(2),
        "trace_actions": trace_formula(&state),
    }))
}

fn spectrum(ctx: &mut Context, input: &InputArgs, vectors: bool) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let u = potential(ctx, src)?;
    let vectors = ctx.settings.or("vectors", if vectors { Some(true) } else { None }, false)?;
    let order = ctx.modes.unwrap_or(u.order());
    let lax = assemble_lax(&u, order)?;
    let spec = eigendecompose(&lax, &ctx.forward.lax)?;
    let summary = SpectrumJson::from_spectrum(&spec)?;
    ctx.out.json("spectrum.json", &summary)?;
    if vectors {
        bo_core::io::write_eigenvectors(ctx.out.dir(), "eigenvectors", &spec)?;
        ctx.out.record("eigenvectors.bin");
        ctx.out.record("eigenvectors.json");
    }
    let residual = (0..=spec.n_trust()).map(|n| spec.residual(&lax, n)).fold(0.0, f64::max);
    Ok(json!({
        "order": order,
        "n_trust": spec.n_trust(),
        "lambda0": spec.lambda()[0],
        "gap_sum": summary.gamma.iter().sum::<f64>(),
        "max_residual": residual,
        "negative_eigenvalues": spec.lambda().iter().filter(|l| **l < 0.0).count(),
    }))
}

/// Deterministic points off the real axis, alternating half-planes.
fn genfun_points(k: usize) -> Vec<C64> {
    (0..k)
        .map(|j| {
            let re = if k == 1 { 0.0 } else { -5.0 + 10.0 * j as f64 / (k - 1) as f64 };
            let im = (0.1 + (j % 3) as f64) * if j % 2 == 0 { 1.0 } else { -1.0 };
            C64::new(re, im)
        })
        .collect()
}

fn genfun(
    ctx: &mut Context,
    input: &InputArgs,
    re: Option<f64>,
    im: Option<f64>,
    points: Option<usize>,
) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let u = potential(ctx, src)?;
    let s = &ctx.settings;
    let re = s.get("lambda_re", re)?;
    let im = s.get("lambda_im", im)?;
    let zs = if re.is_some() || im.is_some() {
        vec![C64::new(re.unwrap_or(0.0), im.unwrap_or(1.0))]
    } else {
        genfun_points(count("points", s.or("points", points, 12)?)?)
    };
    let order = ctx.modes.unwrap_or(u.order());
    let lax = assemble_lax(&u, order)?;
    let cfg = ctx.forward.lax;
    let spec = eigendecompose(&lax, &cfg)?;
    let rows = zs
        .par_iter()
        .map(|z| {
            let a = genfun_resolvent(&lax, *z, &cfg)?.value;
            let b = genfun_product(&spec, *z, &cfg)?.value;
            Ok((*z, a, b, (a - b).norm() / b.norm()))
        })
        .collect::<Result<Vec<_>, bo_core::Error>>()?;
    let max_rel = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(json!({
        "order": order,
        "points": rows.iter().map(|(z, a, b, e)| json!({
            "lambda": pair(*z), "resolvent": pair(*a), "product": pair(*b), "relative_error": e,
        })).collect::<Vec<_>>(),
        "max_relative_error": max_rel,
    }))
}

fn method(key: &str, text: &str) -> Result<FlowMethod, CliError> {
    match text {
        "quadrature" => Ok(FlowMethod::Quadrature),
        "direct" => Ok(FlowMethod::Direct),
        other => Err(CliError::Usage(format!("{key}: expected quadrature or direct, got {other}"))),
    }
}

fn flow_spec(ctx: &Context, flow: &FlowArgs, m: FlowMethod) -> Result<FlowSpec, CliError> {
    let s = &ctx.settings;
    let t_max = s.positive("tmax", flow.tmax, 1.0)?;
    let samples = count("samples", s.or("samples", flow.samples, 10)?)?;
    let mut spec = FlowSpec::uniform(t_max, samples, m);
    spec.dt = s.positive("dt", flow.dt, spec.dt)?;
    let exps = s.or("s", flow.s.clone(), "0,1".to_string())?;
    spec.sobolev = parse_list("s", &exps)?;
    for v in &spec.sobolev {
        sobolev("s", *v)?;
    }
    spec.gap_count = s.or("track_gaps", flow.track_gaps, 0)?;
    spec.order = ctx.modes;
    spec.forward = ctx.forward;
    Ok(spec)
}

fn drift(traj: &Trajectory) -> Value {
    let first = &traj.diagnostics[0];
    let max = |f: &dyn Fn(&bo_core::flow::Diagnostics) -> f64| {
        traj.diagnostics.iter().map(|d| (f(d) - f(first)).abs()).fold(0.0, f64::max)
    };
    json!({
        "mean": max(&|d| d.mean),
        "l2": max(&|d| d.l2),
        "energy": max(&|d| d.energy),
    })
}

fn evolve(ctx: &mut Context, input: &InputArgs, flow: &FlowArgs) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let u = potential(ctx, src)?;
    let name = ctx.settings.or("method", flow.method.clone(), "quadrature".to_string())?;
    let spec = flow_spec(ctx, flow, method("method", &name)?)?;
    let traj = evolve_potential(&u, &spec)?;
    ctx.out.text("trajectory.csv", &trajectory_csv(&traj))?;
    for (i, f) in traj.fields.iter().enumerate() {
        ctx.out.json(&format!("fields/field_{i:05}.json"), &FieldJson::from(f))?;
    }
    Ok(json!({
        "method": name,
        "times": traj.times,
        "tail_action": traj.tail_action,
        "final": traj.diagnostics.last(),
        "drift": drift(&traj),
    }))
}

fn compare(ctx: &mut Context, input: &InputArgs, flow: &FlowArgs) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let u = potential(ctx, src)?;
    let quad = flow_spec(ctx, flow, FlowMethod::Quadrature)?;
    let mut direct = quad.clone();
    direct.method = FlowMethod::Direct;
    let (a, b) = rayon::join(|| evolve_potential(&u, &quad), || evolve_potential(&u, &direct));
    let (a, b) = (a?, b?);
    let s = sobolev("s", quad.sobolev.first().copied().unwrap_or(0.0))?;
    let cmp = compare_trajectories(&a, &b, s)?;
    ctx.out.text("trajectory_quadrature.csv", &trajectory_csv(&a))?;
    ctx.out.text("trajectory_direct.csv", &trajectory_csv(&b))?;
    let mut csv = String::from("t,distance\n");
    for (t, d) in cmp.times.iter().zip(&cmp.distance) {
        let _ = writeln!(csv, "{t},{d}");
    }
    ctx.out.text("compare.csv", &csv)?;
    let peak = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(json!({
        "s": cmp.s,
        "max_distance": cmp.max_distance,
        "final_distance": cmp.distance.last(),
        "gap_drift_quadrature": peak(&cmp.gap_drift_a),
        "gap_drift_direct": peak(&cmp.gap_drift_b),
        "drift_quadrature": drift(&a),
        "drift_direct": drift(&b),
    }))
}

fn illposed_half(
    ctx: &mut Context,
    k: Option<usize>,
    eps: Option<f64>,
    tmax: Option<f64>,
    dt: Option<f64>,
    window: Option<String>,
) -> Result<Value, CliError> {
    let s = &ctx.settings;
    let k = count("k", s.or("k", k, 1)?)?;
    let eps = s.get("eps", eps)?;
    let t_max = s.positive("tmax", tmax, 1.0)?;
    let dt = s.positive("dt", dt, 1e-4)?;
    let window = match s.get("window", window)? {
        Some(w) => match parse_list("window", &w)?[..] {
            [a, b] => (a, b),
            _ => return Err(CliError::Usage("window takes two numbers a,b".into())),
        },
        None => (0.0, t_max),
    };
    let uk = build_uk(k, eps, ctx.modes.unwrap_or(DEFAULT_MAX_ORDER))?;
    let root = lambda0_root(uk.epsilon(), uk.params.one_minus_q2)?;
    let steps = (t_max / dt).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();
    let series = xi_timeseries(&uk.field, &grid, uk.field.mean(), &ctx.forward)?;
    let lambda = series.state.lambda();
    let lambda0 = lambda[0];
    let w = windowed_integral(&series, window, lambda0)?;
    ctx.out.json("uk.json", &FieldJson::from(&uk.field))?;
    let mut csv = String::from("t,re,im\n");
    for (t, x) in series.times.iter().zip(&series.xi) {
        let _ = writeln!(csv, "{t},{},{}", x.re, x.im);
    }
    ctx.out.text("xi.csv", &csv)?;
    Ok(json!({
        "k": k,
        "epsilon": uk.epsilon(),
        "q": uk.q(),
        "one_minus_q2": uk.params.one_minus_q2,
        "order": uk.field.order(),
        "f_at_k": uk.f_at_k,
        "root": root,
        "lambda0": lambda0,
        "lambda0_root": -root.mu,
        "negative_eigenvalues": lambda.iter().filter(|l| **l < 0.0).count(),
        "norms": {
            "minus_half_squared": uk.field.sobolev_norm(SobolevIndex(-0.5)).powi(2),
            "minus_half_squared_closed_form": uk.norm_minus_half_sq(),
            "l2": uk.field.l2_norm(),
        },
        "xi0": pair(series.xi[0]),
        "epsilon_q": uk.epsilon() * uk.q(),
        "window": [window.0, window.1],
        "integral": pair(w.value),
        "integral_modulus": w.value.norm(),
        "predicted": pair(w.predicted),
        "remainder_times_lambda0": (w.value - w.predicted).norm() * lambda0.abs(),
    }))
}

fn illposed_deep(
    ctx: &mut Context,
    gamma: Option<f64>,
    t: Option<f64>,
    n: Option<usize>,
    eta_points: Option<usize>,
) -> Result<Value, CliError> {
    let s = &ctx.settings;
    let gamma = s.positive("gamma", gamma, 100.0)?;
    let t = s.or("t", t, 1.0)?;
    let n = s.or("count", n, 6)?;
    let eta_points = count("eta_points", s.or("eta_points", eta_points, 2048)?)?;
    let order = ctx.modes.unwrap_or(DEFAULT_MODES);
    let d = two_gap_divergence(gamma, t, order)?;
    ctx.out.json("field.json", &FieldJson::from(&d.field))?;
    let coeffs: Vec<C64> = (1..=8).map(|m| d.field.coeff(m)).collect();
    let alternating = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (c - 2.0 * if i % 2 == 0 { -1.0 } else { 1.0 }).norm())
        .fold(0.0, f64::max);
    let mut rows = Vec::new();
    if n > 0 && t != 0.0 {
        let gammas = divergent_gammas(gamma, t, n)?;
        rows = renormalization_scan(&gammas, t, eta_points)?;
        let mut csv = String::from("gamma,gamma_next,eta,distance\n");
        for r in &rows {
            let _ = writeln!(csv, "{},{},{},{}", r.gamma, r.gamma_next, r.eta, r.distance);
        }
        ctx.out.text("scan.csv", &csv)?;
    }
    Ok(json!({
        "gamma": d.gamma,
        "t": d.t,
        "phi": [d.phi1, d.phi2],
        "order": order,
        "alpha": pair(d.alpha),
        "beta": pair(d.beta),
        "q1": pair(d.q1),
        "q2": pair(d.q2),
        "factor_moduli": [d.q1.norm(), d.q2.norm()],
        "coefficients": coeffs.into_iter().map(pair).collect::<Vec<_>>(),
        "alternating_limit_distance": alternating,
        "scan": rows,
        "min_scan_distance": rows.iter().map(|r| r.distance).fold(f64::INFINITY, f64::min),
    }))
}

#[allow(clippy::too_many_arguments)]
fn stability(
    ctx: &mut Context,
    q: Option<f64>,
    delta: Option<f64>,
    s_idx: Option<f64>,
    tmax: Option<f64>,
    samples: Option<usize>,
    band: Option<usize>,
    shift: Option<f64>,
) -> Result<Value, CliError> {
    let s = &ctx.settings;
    let q = s.positive("q", q, 0.5)?;
    let delta = s.or("delta", delta, 1e-3)?;
    let sv = s.or("s", s_idx, 0.0)?;
    let t_max = s.positive("tmax", tmax, 50.0)?;
    let opts = StabilityOptions {
        order: ctx.modes.unwrap_or(PROBE_MODES),
        samples: count("samples", s.or("samples", samples, 200)?)?,
        seed: ctx.seed,
        band: count("band", s.or("band", band, 8)?)?,
        shift: s.or("shift", shift, 0.0)?,
    };
    let report = stability_probe(q, delta, sobolev("s", sv)?, t_max, &opts)?;
    let mut csv = String::from("t,distance,tau\n");
    for ((t, d), tau) in report.times.iter().zip(&report.distance).zip(&report.tau) {
        let _ = writeln!(csv, "{t},{d},{tau}");
    }
    ctx.out.text("stability.csv", &csv)?;
    Ok(json!({
        "q": report.q,
        "delta": report.delta,
        "s": report.s,
        "t_max": report.t_max,
        "tau_grid": report.tau_grid,
        "sup_distance": report.sup_distance,
        "constant": report.constant,
        "options": report.options,
    }))
}

fn recurrence(
    ctx: &mut Context,
    input: &InputArgs,
    horizon: Option<f64>,
    eps: Option<f64>,
    s_idx: Option<f64>,
) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let state = birkhoff(ctx, src)?;
    let s = &ctx.settings;
    let horizon = s.positive("horizon", horizon, 50.0)?;
    let eps = s.positive("return_eps", eps, 1e-6)?;
    let sv = sobolev("s", s.or("s", s_idx, 0.0)?)?;
    let order = ctx.modes.unwrap_or(PROBE_MODES);
    let report = recurrence_probe(&state, state.mean_c(), horizon, eps, sv, order)?;
    Ok(serde_json::to_value(report).expect("report serializes"))
}

fn norm_track(
    ctx: &mut Context,
    input: &InputArgs,
    exps: Option<String>,
    tmax: Option<f64>,
    samples: Option<usize>,
    direct_tmax: Option<f64>,
    dt: Option<f64>,
) -> Result<Value, CliError> {
    let src = source(ctx, input)?;
    let u = potential(ctx, src)?;
    let s = &ctx.settings;
    let exps = parse_list("s", &s.or("s", exps, "-0.5,0,1".to_string())?)?;
    let idx = exps.iter().map(|v| sobolev("s", *v)).collect::<Result<Vec<_>, _>>()?;
    let t_max = s.positive("tmax", tmax, 100.0)?;
    let opts = NormTrackOptions {
        samples: count("samples", s.or("samples", samples, 400)?)?,
        direct_t_max: s.get("direct_tmax", direct_tmax)?,
        dt: s.positive("dt", dt, 1e-4)?,
    };
    let report = normtrack(&u, &idx, t_max, &opts)?;
    let mut csv = String::from("t");
    for v in &exps {
        let _ = write!(csv, ",H{v}");
    }
    csv.push('\n');
    for (i, t) in report.times.iter().enumerate() {
        let _ = write!(csv, "{t}");
        for series in &report.quadrature {
            let _ = write!(csv, ",{}", series.values[i]);
        }
        csv.push('\n');
    }
    ctx.out.text("norms.csv", &csv)?;
    let summary = |list: &[bo_core::probes::NormSeries]| {
        list.iter()
            .map(|n| json!({ "s": n.s, "sup": n.sup, "inf": n.inf, "growth": n.growth }))
            .collect::<Vec<_>>()
    };
    Ok(json!({
        "t_max": t_max,
        "samples": opts.samples,
        "quadrature": summary(&report.quadrature),
        "direct": report.direct.as_ref().map(|d| json!({
            "t_max": d.t_max,
            "dt": d.dt,
            "mean_drift": d.mean_drift,
            "l2_drift": d.l2_drift,
            "norms": summary(&d.norms),
        })),
    }))
}

fn roundtrip(ctx: &mut Context, gaps: Option<usize>, n: Option<usize>) -> Result<Value, CliError> {
    let s = &ctx.settings;
    let gaps = count("gaps", s.or("gaps", gaps, 4)?)?;
    let n = count("count", s.or("count", n, 25)?)?;
    let order = ctx.modes.unwrap_or(PROBE_MODES);
    let states = finite_gap_fixtures(ctx.seed, n, gaps)?;
    let cfg = ctx.forward;
    let cases = states
        .par_iter()
        .map(|st| roundtrip_case(st, order, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let report = summarize_roundtrip(ctx.seed, order, cases);
    let mut csv = String::from("case,gaps,order,action_error,potential_error\n");
    for (i, c) in report.cases.iter().enumerate() {
        let _ = writeln!(csv, "{i},{},{},{},{}", c.gaps, c.order, c.action_error, c.potential_error);
    }
    ctx.out.text("roundtrip.csv", &csv)?;
    Ok(serde_json::to_value(report).expect("report serializes"))
}
