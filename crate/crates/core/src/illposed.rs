//! Deep-ground-state and two-gap divergence families.
//!
//! For `u = 2Re(εqe^{ix}/(1 − qe^{ix}))` with `0 < ε < q < 1`, `−μ < 0` is an
//! eigenvalue of `L_u` exactly when
//!
//! ```text
//!     F(μ, ε, q) = ∫_0^q t^{ε+μ}(1 − qt)^ε (q − t)^{−ε} (μ/t − εq/(1 − qt)) dt = 0.
//! ```

use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_forward, BirkhoffConfig, BirkhoffState};
use crate::error::{Error, Result};
use crate::inverse::{check_roots, q_polynomial, reconstruct, transfer_matrix};
use crate::quadrature::{converge, graded_integral, left_panel, right_panels, PanelRules, PanelSum};
use crate::spectral::{one_gap_potential, RealField};
use crate::C64;

/// Node-doubling tolerance of the F quadratures.
pub const F_QUAD_TOL: f64 = 1e-12;
/// Allowed disagreement of the two F representations, relative to the
/// integral of the absolute integrand.
pub const F_CROSS_TOL: f64 = 1e-8;
/// Target `|F(μ*)|` of the root finder.
pub const F_ROOT_TOL: f64 = 1e-10;
/// Largest Galerkin order used for `u^{(k)}`.
pub const DEFAULT_MAX_ORDER: usize = 2048;

/// `(ε, q, μ)` with `1 − q²` carried separately, since `q` rounds to 1 for
/// the deep family long before `1 − q²` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllposedParams {
    pub epsilon: f64,
    pub q: f64,
    pub one_minus_q2: f64,
    pub mu: f64,
}

impl IllposedParams {
    pub fn new(epsilon: f64, q: f64, mu: f64) -> Result<Self> {
        Self::checked(epsilon, q, (1.0 - q) * (1.0 + q), mu)
    }

    pub fn from_one_minus_q2(epsilon: f64, one_minus_q2: f64, mu: f64) -> Result<Self> {
        Self::checked(epsilon, (1.0 - one_minus_q2).sqrt(), one_minus_q2, mu)
    }

    fn checked(epsilon: f64, q: f64, one_minus_q2: f64, mu: f64) -> Result<Self> {
        if !(one_minus_q2 > 0.0 && one_minus_q2 < 1.0) {
            return Err(Error::InvalidParameter(format!("1 - q^2 = {one_minus_q2} must lie in (0, 1)")));
        }
        if !(epsilon > 0.0 && epsilon < q) {
            return Err(Error::InvalidParameter(format!("need 0 < eps < q (eps = {epsilon}, q = {q})")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu = {mu} must be positive")));
        }
        Ok(Self { epsilon, q, one_minus_q2, mu })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::checked(self.epsilon, self.q, self.one_minus_q2, mu)
    }

    /// `εq²/(1 − q²)`, where `F > 0`.
    pub fn mu_upper(&self) -> f64 {
        self.epsilon * self.q * self.q / self.one_minus_q2
    }
}

/// Both evaluations of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FEvaluation {
    pub value: f64,
    /// The integration-by-parts form.
    pub alternative: f64,
    /// Integral of the absolute integrand of the primary form.
    pub magnitude: f64,
}

fn f_primary(p: &IllposedParams) -> Result<crate::quadrature::GradedValue> {
    let IllposedParams { epsilon: e, q, one_minus_q2: delta, mu } = *p;
    graded_integral(
        q,
        e + mu - 1.0,
        -e,
        delta / q,
        |t, d| {
            let w = delta + q * d; // 1 − qt
            w.powf(e) * (mu - e * q * t / w)
        },
        F_QUAD_TOL,
    )
}

/// `εq ∫ t^{ε−1}(q − t)^{−ε−1} (G(q) − G(t)) dt` with `G(t) = t^μ(1 − qt)^ε`.
fn f_alternative(p: &IllposedParams) -> Result<f64> {
    let IllposedParams { epsilon: e, q, one_minus_q2: delta, mu } = *p;
    let gq = q.powf(mu) * delta.powf(e);
    let value = converge(F_QUAD_TOL, |n| {
        let near = PanelRules::new(n, e - 1.0, -e)?;
        let far = PanelRules::new(n, e + mu - 1.0, -e)?;
        // on [0, q/2] the difference has no cancellation; G(t) carries its own t^μ
        let a = left_panel(q, e - 1.0, &|_, d| d.powf(-e - 1.0), &near);
        let b = left_panel(q, e + mu - 1.0, &|_, d| d.powf(-e - 1.0) * (delta + q * d).powf(e), &far);
        let right = right_panels(
            q,
            -e,
            delta / q,
            &|t, d| {
                let log_ratio = mu * (-d / q).ln_1p() + e * (q * d / delta).ln_1p();
                -gq * log_ratio.exp_m1() * t.powf(e - 1.0) / d
            },
            &near,
        );
        let left_value = gq * a.value - b.value;
        Ok(PanelSum { value: left_value, magnitude: (gq * a.magnitude) + b.magnitude } + right)
    })?;
    Ok(e * q * value.value)
}

/// `F(μ, ε, q)` with the integration-by-parts form as a cross-check.
pub fn eval_f_detailed(p: &IllposedParams) -> Result<FEvaluation> {
    let primary = f_primary(p)?;
    let alternative = f_alternative(p)?;
    if (primary.value - alternative).abs() > F_CROSS_TOL * primary.magnitude {
        return Err(Error::QuadratureNotConverged(format!(
            "F forms disagree: {} vs {} (scale {})",
            primary.value, alternative, primary.magnitude
        )));
    }
    Ok(FEvaluation { value: primary.value, alternative, magnitude: primary.magnitude })
}

pub fn eval_f(p: &IllposedParams) -> Result<f64> {
    eval_f_detailed(p).map(|f| f.value)
}

/// Central difference `∂_μ F`.
pub fn eval_f_dmu(p: &IllposedParams) -> Result<f64> {
    let h = 1e-5 * p.mu.max(1.0);
    let h = h.min(0.5 * p.mu);
    let up = f_primary(&p.with_mu(p.mu + h)?)?.value;
    let dn = f_primary(&p.with_mu(p.mu - h)?)?.value;
    Ok((up - dn) / (2.0 * h))
}

/// Root of `F(·, ε, q)` and its certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub mu: f64,
    pub f_value: f64,
    pub dfdmu: f64,
    pub upper: f64,
    pub lower: f64,
    pub iterations: usize,
}

/// Unique positive root `μ*` of `F(·, ε, q)`; `λ_0 = −μ*`.
///
/// The bracket is `[μ_hi 2^{−j}, μ_hi]` with `μ_hi = εq²/(1 − q²)`; bisection
/// narrows it and Newton steps polish the root.
pub fn lambda0_root(epsilon: f64, one_minus_q2: f64) -> Result<RootReport> {
    let base = IllposedParams::from_one_minus_q2(epsilon, one_minus_q2, 1.0)?;
    let upper = base.mu_upper();
    let f = |mu: f64| -> Result<f64> { f_primary(&base.with_mu(mu)?).map(|v| v.value) };
    if !(f(upper)? > 0.0) {
        return Err(Error::NoBracket { upper });
    }
    let mut lo = upper;
    let mut found = false;
    for _ in 0..200 {
        lo *= 0.5;
        if f(lo)? < 0.0 {
            found = true;
            break;
        }
    }
    if !found {
        return Err(Error::NoBracket { upper });
    }
    let lower = lo;
    let mut hi = 2.0 * lo;
    let mut iterations = 0;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut mu = 0.5 * (lo + hi);
    let mut value = f(mu)?;
    for _ in 0..8 {
        if value.abs() < 0.01 * F_ROOT_TOL {
            break;
        }
        let slope = eval_f_dmu(&base.with_mu(mu)?)?;
        let next = mu - value / slope;
        if !(next > lo && next < hi) {
            break;
        }
        let next_value = f(next)?;
        if next_value.abs() >= value.abs() {
            break;
        }
        mu = next;
        value = next_value;
        iterations += 1;
    }
    let dfdmu = eval_f_dmu(&base.with_mu(mu)?)?;
    Ok(RootReport { mu, f_value: value, dfdmu, upper, lower, iterations })
}

/// `1 − q_k² = exp(−ε^{−3/2})`.
pub fn deep_one_minus_q2(epsilon: f64) -> f64 {
    (-epsilon.powf(-1.5)).exp()
}

/// How `ε_k` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRule {
    /// Largest `m/64` satisfying both conditions.
    LargestSixtyFourth,
    /// The supplied value, possibly halved until both conditions hold.
    Supplied { halvings: u32 },
}

/// Member `u^{(k)}` of the deep-ground-state family.
#[derive(Debug, Clone)]
pub struct DeepGroundState {
    pub k: usize,
    pub params: IllposedParams,
    pub rule: EpsilonRule,
    /// `F(k, ε_k, q_k)`, negative by construction.
    pub f_at_k: f64,
    pub field: RealField,
}

impl DeepGroundState {
    pub fn epsilon(&self) -> f64 {
        self.params.epsilon
    }

    pub fn q(&self) -> f64 {
        self.params.q
    }

    /// `−2ε² log(1 − q²)`.
    pub fn norm_minus_half_sq(&self) -> f64 {
        -2.0 * self.params.epsilon.powi(2) * self.params.one_minus_q2.ln()
    }
}

fn deep_conditions(k: usize, epsilon: f64) -> Result<Option<(IllposedParams, f64)>> {
    let delta = deep_one_minus_q2(epsilon);
    if !(delta > 0.0) {
        return Ok(None);
    }
    let Ok(p) = IllposedParams::from_one_minus_q2(epsilon, delta, k as f64) else { return Ok(None) };
    if !(p.mu_upper() > k as f64) {
        return Ok(None);
    }
    let f = eval_f(&p)?;
    Ok(if f < 0.0 { Some((p, f)) } else { None })
}

/// Build `u^{(k)} = 2Re(ε_kq_ke^{ix}/(1 − q_ke^{ix}))` with
/// `q_k² = 1 − e^{−ε_k^{−3/2}}`, checking `F(k, ε_k, q_k) < 0`,
/// `ε_kq_k²/(1 − q_k²) > k` and `ε_k < q_k`.
///
/// The order is the smallest `N` with `q^N < 1e−14`, capped at `max_order`;
/// a cap with `q^N > 1e−10` is reported as insufficient.
pub fn build_uk(k: usize, epsilon: Option<f64>, max_order: usize) -> Result<DeepGroundState> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (params, f_at_k, rule) = match epsilon {
        None => {
            let mut chosen = None;
            for m in (1..64).rev() {
                if let Some((p, f)) = deep_conditions(k, m as f64 / 64.0)? {
                    chosen = Some((p, f, EpsilonRule::LargestSixtyFourth));
                    break;
                }
            }
            chosen.ok_or_else(|| Error::InvalidParameter(format!("no eps = m/64 satisfies the k = {k} conditions")))?
        }
        Some(e0) => {
            let mut e = e0;
            let mut halvings = 0;
            loop {
                if let Some((p, f)) = deep_conditions(k, e)? {
                    break (p, f, EpsilonRule::Supplied { halvings });
                }
                e *= 0.5;
                halvings += 1;
                if halvings > 8 {
                    return Err(Error::InvalidParameter(format!("eps = {e0} cannot be shrunk into range for k = {k}")));
                }
            }
        }
    };
    let log_q = 0.5 * (-params.one_minus_q2).ln_1p();
    let wanted = (1e-14f64.ln() / log_q).ceil() as usize;
    let order = wanted.clamp(16, max_order);
    let residual = (order as f64 * log_q).exp();
    if residual > 1e-10 {
        return Err(Error::TruncationInsufficient { modes: order, residual });
    }
    let field = one_gap_potential(params.q, params.epsilon, order)?;
    Ok(DeepGroundState { k, params, rule, f_at_k, field })
}

/// `ξ(t) = ⟨v(t)|e^{ix}⟩` from the closed-form series.
#[derive(Debug, Clone)]
pub struct XiSeries {
    pub times: Vec<f64>,
    pub xi: Vec<C64>,
    pub c: f64,
    pub state: BirkhoffState,
}

/// `ξ_c(t) = −e^{−2ict} Σ_n sqrt(μ_{n+1}κ_n/κ_{n+1}) ζ_{n+1} conj(ζ_n) e^{it(1 + 2λ_n)}`
/// for the mean-zero part of `u`; `c` is the mean of the evolved data.
pub fn xi_timeseries(u: &RealField, t_grid: &[f64], c: f64, cfg: &BirkhoffConfig) -> Result<XiSeries> {
    let state = birkhoff_forward(&u.without_mean(), cfg)?;
    Ok(xi_from_state(state, t_grid, c))
}

pub fn xi_from_state(state: BirkhoffState, t_grid: &[f64], c: f64) -> XiSeries {
    let kappa = state.kappa();
    let ratio = state.mu_ratio();
    let lambda = state.lambda();
    let terms: Vec<(C64, f64)> = (0..state.gaps())
        .map(|n| {
            let a = -(ratio[n] * kappa[n]).sqrt() * state.zeta_at(n + 1) * state.zeta_at(n).conj();
            (a, 1.0 + 2.0 * lambda[n])
        })
        .collect();
    let xi = t_grid
        .iter()
        .map(|&t| {
            let sum: C64 = terms.iter().map(|(a, w)| a * C64::from_polar(1.0, w * t)).sum();
            sum * C64::from_polar(1.0, -2.0 * c * t)
        })
        .collect();
    XiSeries { times: t_grid.to_vec(), xi, c, state }
}

/// `∫_I ξ(t) e^{−it(1 + 2λ_0)} dt` and its leading-order prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowedIntegral {
    pub value: C64,
    /// `−√2 ζ_1/√γ_1 · |I|`.
    pub predicted: C64,
    pub length: f64,
}

/// Trapezoidal rule over the series samples inside `[t_a, t_b]`.
pub fn windowed_integral(series: &XiSeries, interval: (f64, f64), lambda0: f64) -> Result<WindowedIntegral> {
    let (ta, tb) = interval;
    let pts: Vec<(f64, C64)> = series
        .times
        .iter()
        .zip(&series.xi)
        .filter(|(t, _)| **t >= ta && **t <= tb)
        .map(|(t, x)| (*t, x * C64::from_polar(1.0, -(1.0 + 2.0 * lambda0) * t)))
        .collect();
    if !(tb > ta) || pts.len() < 2 {
        return Err(Error::IntervalTooShort);
    }
    let value: C64 = pts.windows(2).map(|w| (w[0].1 + w[1].1) * (0.5 * (w[1].0 - w[0].0))).sum();
    let length = pts[pts.len() - 1].0 - pts[0].0;
    let z1 = series.state.zeta_at(1);
    let g1 = series.state.gamma().first().copied().unwrap_or(0.0);
    let predicted = if g1 > 0.0 {
        -z1 * (2f64.sqrt() / g1.sqrt() * length)
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(WindowedIntegral { value, predicted, length })
}

/// Two-gap member with `γ_1 = γ_2 = γ` at time `t`.
#[derive(Debug, Clone)]
pub struct TwoGapDivergence {
    pub gamma: f64,
    pub t: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub state: BirkhoffState,
    pub field: RealField,
    /// `Q(z) = 1 + αz + βz²`.
    pub alpha: C64,
    pub beta: C64,
    /// `Q(z) = (1 + q_1z)(1 + q_2z)`; `q_1` is the factor nearer `e^{iφ_1}`.
    pub q1: C64,
    pub q2: C64,
}

/// State with `φ_1(0) = φ_2(0) = 0` moved to time `t` by
/// `φ_1 = t(1 − 4γ)`, `φ_2 − φ_1 = t(3 − 2γ)`, and its reconstruction.
pub fn two_gap_divergence(gamma: f64, t: f64, order: usize) -> Result<TwoGapDivergence> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    let phi1 = t * (1.0 - 4.0 * gamma);
    let phi2 = phi1 + t * (3.0 - 2.0 * gamma);
    let state = BirkhoffState::from_actions_angles(&[gamma, gamma], &[phi1, phi2], 0.0)?;
    let m = transfer_matrix(&state)?;
    let rho = check_roots(&m)?;
    let poly = q_polynomial(&m);
    let field = reconstruct(&state, order)?;
    // 1 − ρz = 1 + qz
    let (a, b) = (-rho[0], -rho[1]);
    let target = C64::from_polar(1.0, phi1);
    let (q1, q2) = if (a - target).norm() <= (b - target).norm() { (a, b) } else { (b, a) };
    Ok(TwoGapDivergence { gamma, t, phi1, phi2, state, field, alpha: poly[1], beta: poly[2], q1, q2 })
}

/// One step of the renormalization scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormalizationRow {
    pub gamma: f64,
    pub gamma_next: f64,
    /// Minimizing phase `η`.
    pub eta: f64,
    /// `min_η |q_1(γ′) − e^{iη}q_1(γ)| + |q_2(γ′) − e^{iη}q_2(γ)|`.
    pub distance: f64,
}

/// Diverging actions `γ_0 < γ_1 < …` (roughly doubling) whose consecutive
/// differences satisfy `2t(γ_{j+1} − γ_j) ≡ π (mod 2π)`, so the two factor
/// phases move apart by a half turn at every step.
pub fn divergent_gammas(gamma0: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    if t == 0.0 {
        return Err(Error::InvalidParameter("the scan needs t != 0".into()));
    }
    let unit = std::f64::consts::PI / (2.0 * t.abs());
    let mut out = vec![gamma0];
    for _ in 1..count {
        let last = out[out.len() - 1];
        let m = ((last / unit - 1.0) / 2.0).round().max(0.0);
        out.push(last + (2.0 * m + 1.0) * unit);
    }
    Ok(out)
}

/// Best phase alignment of the factors of consecutive members, over a grid
/// of `eta_points` phases.
pub fn renormalization_scan(gammas: &[f64], t: f64, eta_points: usize) -> Result<Vec<RenormalizationRow>> {
    let factors: Vec<(C64, C64)> = gammas
        .iter()
        .map(|&g| two_gap_divergence(g, t, 1).map(|d| (d.q1, d.q2)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(gammas.len().saturating_sub(1));
    for j in 1..gammas.len() {
        let (a1, a2) = factors[j - 1];
        let (b1, b2) = factors[j];
        let mut best = (0.0, f64::INFINITY);
        for i in 0..eta_points {
            let eta = 2.0 * std::f64::consts::PI * i as f64 / eta_points as f64;
            let rot = C64::from_polar(1.0, eta);
            let d = (b1 - rot * a1).norm() + (b2 - rot * a2).norm();
            if d < best.1 {
                best = (eta, d);
            }
        }
        rows.push(RenormalizationRow { gamma: gammas[j - 1], gamma_next: gammas[j], eta: best.0, distance: best.1 });
    }
    Ok(rows)
}
