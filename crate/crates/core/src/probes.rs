//! Quantitative surrogates for the long-time statements: orbital stability
//! of traveling waves, almost-periodic returns of finite-gap data, and
//! boundedness of Sobolev norms along the flow.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_forward, frequencies, BirkhoffConfig, BirkhoffState};
use crate::error::{Error, Result};
use crate::flow::{evolve_potential, quadrature_evolve, FlowMethod, FlowSpec};
use crate::inverse::{reconstruct, resolving_order};
use crate::random::{finite_gap_fixtures, fixture_rng, perturbation};
use crate::spectral::{traveling_wave, RealField, SobolevIndex};
use crate::C64;

const NEWTON_STEPS: usize = 5;

/// `inf_τ ‖v − u(·+τ)‖_s` and the minimizing `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitDistance {
    pub tau: f64,
    pub distance: f64,
}

/// Distance from `v` to the translation orbit of `u`.
///
/// `‖v − u(·+τ)‖² = const − 4Re Σ_{n≥1} ⟨n⟩^{2s} v̂(n) conj(û(n)) e^{−inτ}` is
/// sampled on `grid` points with one FFT; the best sample is polished by
/// Newton steps on the correlation, each kept only if it lowers the distance.
pub fn orbit_distance(v: &RealField, u: &RealField, s: SobolevIndex, grid: usize) -> Result<OrbitDistance> {
    let order = v.order().max(u.order());
    if grid <= 2 * order {
        return Err(Error::InvalidParameter(format!("tau grid of {grid} points cannot resolve {order} modes")));
    }
    let a: Vec<C64> = (0..=order as i64).map(|n| s.weight(n) * v.coeff(n) * u.coeff(n).conj()).collect();
    let mut buf = vec![C64::new(0.0, 0.0); grid];
    buf[1..=order].copy_from_slice(&a[1..]);
    FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
    let best = (0..grid).max_by(|&i, &j| buf[i].re.total_cmp(&buf[j].re)).unwrap_or(0);
    let tau0 = std::f64::consts::TAU * best as f64 / grid as f64;

    // g(τ) = Re Σ a_n e^{−inτ}; Newton steps towards a stationary point of g
    let exact = |tau: f64| v.distance(&u.translated(tau), s);
    let mut out = OrbitDistance { tau: tau0, distance: exact(tau0) };
    for _ in 0..NEWTON_STEPS {
        let (mut d1, mut d2) = (0.0, 0.0);
        for (n, an) in a.iter().enumerate().skip(1) {
            let nf = n as f64;
            let z = an * C64::from_polar(1.0, -nf * out.tau);
            d1 += nf * z.im;
            d2 -= nf * nf * z.re;
        }
        if !(d2 < 0.0) {
            break;
        }
        let tau = (out.tau - d1 / d2).rem_euclid(std::f64::consts::TAU);
        let distance = exact(tau);
        if !(distance < out.distance) {
            break;
        }
        out = OrbitDistance { tau, distance };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    /// Modes carrying the perturbation.
    pub band: usize,
    /// Translation of the perturbed data before evolving.
    pub shift: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { order: 128, samples: 200, seed: 0, band: 8, shift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub q: f64,
    pub delta: f64,
    pub s: f64,
    pub t_max: f64,
    pub tau_grid: usize,
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    pub tau: Vec<f64>,
    pub sup_distance: f64,
    /// `sup / δ`, absent for `δ = 0`.
    pub constant: Option<f64>,
    pub options: StabilityOptions,
}

/// Evolve `u_{0,q}` and `u_{0,q} + w` with `‖w‖_s = δ` by the quadrature
/// flow and track `inf_τ ‖v(t) − u(t)(·+τ)‖_s`.
pub fn stability_probe(q: f64, delta: f64, s: SobolevIndex, t_max: f64, opts: &StabilityOptions) -> Result<StabilityReport> {
    if !(s.0 > -0.5) {
        return Err(Error::InvalidParameter(format!("stability needs s > -1/2, got {}", s.0)));
    }
    if !(t_max >= 0.0) || opts.samples == 0 {
        return Err(Error::InvalidParameter("stability needs t_max >= 0 and at least one sample".into()));
    }
    let u0 = traveling_wave(q, opts.order)?;
    let w = perturbation(&mut fixture_rng(opts.seed, 0), opts.order, opts.band, s, delta)?;
    let v0 = (&u0 + &w).translated(opts.shift);
    let spec = FlowSpec::uniform(t_max, opts.samples, FlowMethod::Quadrature);
    let orbit = evolve_potential(&u0, &spec)?;
    let perturbed = if delta == 0.0 && opts.shift == 0.0 { orbit.clone() } else { evolve_potential(&v0, &spec)? };
    let tau_grid = 8 * opts.order;
    let mut distance = Vec::with_capacity(spec.t_grid.len());
    let mut tau = Vec::with_capacity(spec.t_grid.len());
    for (v, u) in perturbed.fields.iter().zip(&orbit.fields) {
        let d = orbit_distance(v, u, s, tau_grid)?;
        distance.push(d.distance);
        tau.push(d.tau);
    }
    let sup_distance = distance.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        q,
        delta,
        s: s.0,
        t_max,
        tau_grid,
        times: spec.t_grid,
        distance,
        tau,
        sup_distance,
        constant: (delta > 0.0).then(|| sup_distance / delta),
        options: opts.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub t: f64,
    /// `max_n |e^{iω_n t} − 1|`.
    pub defect: f64,
    /// `‖v(t) − v(0)‖_s` of the reconstructed potentials.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub c: f64,
    pub horizon: f64,
    pub eps: f64,
    pub s: f64,
    pub frequencies: Vec<f64>,
    pub scan_step: f64,
    pub returns: Vec<Recurrence>,
    pub none_found: bool,
}

fn phase_defect(omega: &[f64], t: f64) -> f64 {
    omega.iter().map(|w| (C64::from_polar(1.0, w * t) - 1.0).norm()).fold(0.0, f64::max)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Up to three `eps`-almost periods of the lab-frame phase flow in
/// `(0, horizon]`, located on a scan grid and refined by golden section.
pub fn recurrence_probe(
    state: &BirkhoffState,
    c: f64,
    horizon: f64,
    eps: f64,
    s: SobolevIndex,
    order: usize,
) -> Result<RecurrenceReport> {
    if !(horizon > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParameter("recurrence needs horizon > 0 and eps > 0".into()));
    }
    // the potential with mean c rotates at ω_n − 2cn in the lab frame
    let omega: Vec<f64> = frequencies(state, -c)
        .omega
        .into_iter()
        .zip(state.gamma())
        .filter(|(_, g)| **g > 0.0)
        .map(|(w, _)| w)
        .collect();
    let wmax = omega.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let step = if wmax > 0.0 { (std::f64::consts::PI / (16.0 * wmax)).min(horizon / 64.0) } else { horizon / 64.0 };
    let count = (horizon / step).ceil() as usize;
    if count > 50_000_000 {
        return Err(Error::InvalidParameter(format!("scan of {count} points exceeds the budget")));
    }
    let base = reconstruct(state, order)?;
    let at = |t: f64| -> Result<Recurrence> {
        let moved = reconstruct(&quadrature_evolve(state, t, -c), order)?;
        Ok(Recurrence { t, defect: phase_defect(&omega, t), distance: moved.distance(&base, s) })
    };
    let mut returns = Vec::new();
    let sample = |j: usize| phase_defect(&omega, (j as f64 * step).min(horizon));
    let mut inside = false;
    let (mut prev, mut cur) = (sample(0), sample(1));
    for j in 1..=count {
        let next = if j < count { sample(j + 1) } else { f64::INFINITY };
        if omega.is_empty() {
            returns.push(at(step)?);
            break;
        }
        if inside && cur > eps {
            inside = false;
        }
        if !inside && cur <= prev && cur <= next {
            let lo = ((j - 1) as f64 * step).max(0.0);
            let hi = ((j + 1) as f64 * step).min(horizon);
            let t = golden_min(|t| phase_defect(&omega, t), lo, hi);
            if t > 0.0 && phase_defect(&omega, t) < eps {
                returns.push(at(t)?);
                inside = true;
                if returns.len() == 3 {
                    break;
                }
            }
        }
        prev = cur;
        cur = next;
    }
    Ok(RecurrenceReport {
        c,
        horizon,
        eps,
        s: s.0,
        frequencies: omega,
        scan_step: step,
        none_found: returns.is_empty(),
        returns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub s: f64,
    pub values: Vec<f64>,
    pub sup: f64,
    pub inf: f64,
    /// `sup` over the second half of the window divided by `sup` over the
    /// first half, minus one.
    pub growth: f64,
}

fn series(s: f64, values: Vec<f64>) -> NormSeries {
    let half = values.len() / 2;
    let (a, b) = values.split_at(half.max(1).min(values.len()));
    let sup_a = a.iter().copied().fold(0.0, f64::max);
    let sup_b = b.iter().copied().fold(0.0, f64::max);
    NormSeries {
        s,
        sup: values.iter().copied().fold(0.0, f64::max),
        inf: values.iter().copied().fold(f64::INFINITY, f64::min),
        growth: if sup_a > 0.0 { sup_b / sup_a - 1.0 } else { 0.0 },
        values,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectDrift {
    pub t_max: f64,
    pub dt: f64,
    pub mean_drift: f64,
    pub l2_drift: f64,
    pub norms: Vec<NormSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTrackReport {
    pub times: Vec<f64>,
    pub quadrature: Vec<NormSeries>,
    pub direct: Option<DirectDrift>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTrackOptions {
    pub samples: usize,
    /// Horizon of the direct run; `None` skips it.
    pub direct_t_max: Option<f64>,
    pub dt: f64,
}

impl Default for NormTrackOptions {
    fn default() -> Self {
        Self { samples: 400, direct_t_max: None, dt: 1e-4 }
    }
}

/// `‖S(t, v0)‖_s` along the quadrature flow, and optionally the drift of the
/// conserved quantities under direct integration.
pub fn normtrack(v0: &RealField, s_list: &[SobolevIndex], t_max: f64, opts: &NormTrackOptions) -> Result<NormTrackReport> {
    let mut spec = FlowSpec::uniform(t_max, opts.samples, FlowMethod::Quadrature);
    spec.sobolev = s_list.iter().map(|s| s.0).collect();
    let quad = evolve_potential(v0, &spec)?;
    let quadrature = s_list
        .iter()
        .enumerate()
        .map(|(i, s)| series(s.0, quad.diagnostics.iter().map(|d| d.sobolev[i].1).collect()))
        .collect();
    let direct = match opts.direct_t_max {
        None => None,
        Some(horizon) => {
            let mut d = FlowSpec::uniform(horizon, opts.samples.min(100), FlowMethod::Direct);
            d.dt = opts.dt;
            d.sobolev = spec.sobolev.clone();
            let traj = evolve_potential(v0, &d)?;
            let first = &traj.diagnostics[0];
            let drift = |f: &dyn Fn(&crate::flow::Diagnostics) -> f64| {
                traj.diagnostics.iter().map(|x| (f(x) - f(first)).abs()).fold(0.0, f64::max)
            };
            Some(DirectDrift {
                t_max: horizon,
                dt: opts.dt,
                mean_drift: drift(&|x| x.mean),
                l2_drift: drift(&|x| x.l2),
                norms: s_list
                    .iter()
                    .enumerate()
                    .map(|(i, s)| series(s.0, traj.diagnostics.iter().map(|x| x.sobolev[i].1).collect()))
                    .collect(),
            })
        }
    };
    Ok(NormTrackReport { times: quad.times, quadrature, direct })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTripCase {
    pub gaps: usize,
    pub order: usize,
    /// `max_n |γ_n(Φ(Φ^{−1}(ζ))) − γ_n|`.
    pub action_error: f64,
    /// `‖Φ^{−1}(Φ(u)) − u‖` for `u = Φ^{−1}(ζ)`.
    pub potential_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub seed: u64,
    /// Smallest order tried.
    pub order: usize,
    pub cases: Vec<RoundTripCase>,
    pub max_action_error: f64,
    pub max_potential_error: f64,
}

/// Largest order used by the round trip.
pub const ROUNDTRIP_MAX_ORDER: usize = 2048;

/// Forward/inverse consistency for one finite-gap state, resolved at the
/// smallest order of at least `order` whose dropped coefficients are below
/// `1e−14`.
pub fn roundtrip_case(state: &BirkhoffState, order: usize, cfg: &BirkhoffConfig) -> Result<RoundTripCase> {
    let order = resolving_order(state, order, 1e-14)?.min(ROUNDTRIP_MAX_ORDER);
    let u = reconstruct(state, order)?;
    let back = birkhoff_forward(&u, cfg)?;
    let n = state.gaps().max(back.gaps());
    let g = |s: &BirkhoffState, i: usize| s.gamma().get(i).copied().unwrap_or(0.0);
    let action_error = (0..n).map(|i| (g(state, i) - g(&back, i)).abs()).fold(back.tail_action(), f64::max);
    let again = reconstruct(&back, order)?;
    Ok(RoundTripCase { gaps: state.gaps(), order, action_error, potential_error: again.distance(&u, SobolevIndex::L2) })
}

pub fn summarize_roundtrip(seed: u64, order: usize, cases: Vec<RoundTripCase>) -> RoundTripReport {
    RoundTripReport {
        seed,
        order,
        max_action_error: cases.iter().map(|c| c.action_error).fold(0.0, f64::max),
        max_potential_error: cases.iter().map(|c| c.potential_error).fold(0.0, f64::max),
        cases,
    }
}

/// [`roundtrip_case`] on `count` seeded states with at most `max_gaps` gaps.
pub fn roundtrip_suite(seed: u64, count: usize, max_gaps: usize, order: usize) -> Result<RoundTripReport> {
    let cfg = BirkhoffConfig::default();
    let cases = finite_gap_fixtures(seed, count, max_gaps)?
        .iter()
        .map(|state| roundtrip_case(state, order, &cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_roundtrip(seed, order, cases))
}
