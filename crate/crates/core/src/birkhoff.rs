//! Forward Birkhoff map: from the spectrum of `L_u` to the coordinates
//! `ζ_n = ⟨1|f_n⟩/√κ_n`, together with normalizing constants, frequencies and
//! the Hamiltonian expressed in actions.

use crate::error::{Error, Result};
use crate::lax::{assemble_lax, eigendecompose, LaxConfig, LaxSpectrum};
use crate::spectral::RealField;
use crate::C64;

/// Settings of the forward map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirkhoffConfig {
    pub lax: LaxConfig,
    /// Galerkin order; the order of the input field when absent.
    pub order: Option<usize>,
    /// Retained gaps stop once the remaining action drops below this, and
    /// smaller individual gaps get `ζ_n = 0`.
    pub tol_tail: f64,
    /// Hard cap on retained gaps.
    pub max_gaps: Option<usize>,
}

impl Default for BirkhoffConfig {
    fn default() -> Self {
        Self { lax: LaxConfig::default(), order: None, tol_tail: 1e-10, max_gaps: None }
    }
}

/// `κ_0 = Π_{p≥1}(1 − γ_p/(λ_p − λ_0))` and, for `n ≥ 1`,
/// `κ_n = 1/(λ_n − λ_0) Π_{p≠n}(1 − γ_p/(λ_p − λ_n))`.
///
/// `lambda` holds `λ_0..λ_P`, `gamma` holds `γ_1..γ_P`.
pub fn kappa_from_spectrum(lambda: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    let count = gamma.len();
    debug_assert!(lambda.len() > count);
    let mut kappa = Vec::with_capacity(count + 1);
    for n in 0..=count {
        let mut value = if n == 0 { 1.0 } else { 1.0 / (lambda[n] - lambda[0]) };
        for p in 1..=count {
            if p != n {
                value *= 1.0 - gamma[p - 1] / (lambda[p] - lambda[n]);
            }
        }
        if !(value > 0.0) {
            return Err(Error::NonPositiveKappa { n, value });
        }
        kappa.push(value);
    }
    Ok(kappa)
}

/// `μ_{n+1}/κ_{n+1} = (λ_n + 1 − λ_0) / Π_{1≤p≠n+1}(1 − γ_p/(λ_p − λ_n − 1))`
/// for `n = 0..P−1`.
pub fn mu_ratio_from_spectrum(lambda: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    let count = gamma.len();
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let mut denom = 1.0;
        for p in 1..=count {
            if p != n + 1 {
                denom *= 1.0 - gamma[p - 1] / (lambda[p] - lambda[n] - 1.0);
            }
        }
        let value = (lambda[n] + 1.0 - lambda[0]) / denom;
        if !(value > 0.0) {
            return Err(Error::NonPositiveKappa { n: n + 1, value });
        }
        out.push(value);
    }
    Ok(out)
}

/// `κ_0..κ_{N_trust}` of a computed spectrum.
pub fn kappa_sequence(spec: &LaxSpectrum) -> Result<Vec<f64>> {
    let gamma = spec.gap_sequence()?;
    kappa_from_spectrum(spec.lambda(), &gamma)
}

/// `μ_{n+1}/κ_{n+1}` for `n = 0..N_trust−1` of a computed spectrum.
pub fn mu_ratio_sequence(spec: &LaxSpectrum) -> Result<Vec<f64>> {
    let gamma = spec.gap_sequence()?;
    mu_ratio_from_spectrum(spec.lambda(), &gamma)
}

/// `λ_n = n − Σ_{k>n} γ_k` for `n = 0..P`.
pub fn lambda_from_gaps(gamma: &[f64]) -> Vec<f64> {
    let count = gamma.len();
    let mut lambda = vec![0.0; count + 1];
    let mut tail = 0.0;
    for n in (0..=count).rev() {
        lambda[n] = n as f64 - tail;
        if n > 0 {
            tail += gamma[n - 1];
        }
    }
    lambda
}

/// Birkhoff coordinates of a finite-gap (or truncated) potential.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffState {
    mean_c: f64,
    zeta: Vec<C64>,
    gamma: Vec<f64>,
    lambda: Vec<f64>,
    kappa: Vec<f64>,
    mu_ratio: Vec<f64>,
    tail_action: f64,
}

impl BirkhoffState {
    /// State with coordinates `ζ_1..ζ_P`; every derived quantity is rebuilt
    /// from the actions `|ζ_n|²`.
    pub fn from_zeta(zeta: Vec<C64>, mean_c: f64) -> Result<Self> {
        if zeta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || !mean_c.is_finite() {
            return Err(Error::InvalidParameter("non-finite Birkhoff data".into()));
        }
        let gamma: Vec<f64> = zeta.iter().map(|z| z.norm_sqr()).collect();
        Self::assemble(zeta, gamma, mean_c, 0.0)
    }

    /// `ζ_n = √γ_n e^{iφ_n}`.
    pub fn from_actions_angles(gamma: &[f64], phi: &[f64], mean_c: f64) -> Result<Self> {
        if gamma.len() != phi.len() {
            return Err(Error::InvalidParameter("actions and angles differ in length".into()));
        }
        if let Some(g) = gamma.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!("action {g} is not a nonnegative number")));
        }
        let zeta = gamma.iter().zip(phi).map(|(g, p)| C64::from_polar(g.sqrt(), *p)).collect();
        Self::from_zeta(zeta, mean_c)
    }

    fn assemble(zeta: Vec<C64>, gamma: Vec<f64>, mean_c: f64, tail_action: f64) -> Result<Self> {
        let lambda = lambda_from_gaps(&gamma);
        let kappa = kappa_from_spectrum(&lambda, &gamma)?;
        let mu_ratio = mu_ratio_from_spectrum(&lambda, &gamma)?;
        Ok(Self { mean_c, zeta, gamma, lambda, kappa, mu_ratio, tail_action })
    }

    /// Same actions, new coordinates; `ζ_n` must have modulus `√γ_n`.
    /// Every action-dependent quantity is copied bit for bit.
    pub fn with_rotated(&self, zeta: Vec<C64>) -> Self {
        debug_assert_eq!(zeta.len(), self.zeta.len());
        Self { zeta, ..self.clone() }
    }

    /// Multiply `ζ_n` by `e^{iθ_n}`.
    pub fn rotated(&self, theta: impl Fn(usize) -> f64) -> Self {
        let zeta =
            self.zeta.iter().enumerate().map(|(i, z)| z * C64::from_polar(1.0, theta(i + 1))).collect();
        self.with_rotated(zeta)
    }

    pub fn with_mean(&self, c: f64) -> Self {
        Self { mean_c: c, ..self.clone() }
    }

    /// Number `P` of retained gaps.
    pub fn gaps(&self) -> usize {
        self.zeta.len()
    }

    pub fn mean_c(&self) -> f64 {
        self.mean_c
    }

    /// `ζ_1..ζ_P` (index `n − 1`).
    pub fn zeta(&self) -> &[C64] {
        &self.zeta
    }

    /// `ζ_n` with the convention `ζ_0 = 1` and `ζ_n = 0` beyond `P`.
    pub fn zeta_at(&self, n: usize) -> C64 {
        match n {
            0 => C64::new(1.0, 0.0),
            n if n <= self.zeta.len() => self.zeta[n - 1],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// `γ_1..γ_P` (index `n − 1`).
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `λ_0..λ_P`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `κ_0..κ_P`.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// `μ_{n+1}/κ_{n+1}` for `n = 0..P−1`.
    pub fn mu_ratio(&self) -> &[f64] {
        &self.mu_ratio
    }

    /// Angles `φ_n = arg ζ_n`; zero where the gap is closed.
    pub fn angles(&self) -> Vec<f64> {
        self.zeta.iter().map(|z| if z.norm() == 0.0 { 0.0 } else { z.arg() }).collect()
    }

    /// Action left out of the retained gaps by the forward map.
    pub fn tail_action(&self) -> f64 {
        self.tail_action
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(|g| *g == 0.0)
    }
}

/// The forward map with its intermediate spectrum.
pub fn birkhoff_forward_with_spectrum(
    u: &RealField,
    cfg: &BirkhoffConfig,
) -> Result<(BirkhoffState, LaxSpectrum)> {
    let order = cfg.order.unwrap_or(u.order());
    let lax = assemble_lax(&u.without_mean(), order)?;
    let spec = eigendecompose(&lax, &cfg.lax)?;
    let gaps = spec.gap_sequence()?;
    let kappa = kappa_from_spectrum(spec.lambda(), &gaps)?;

    // smallest P whose discarded tail is below tolerance
    let mut keep = gaps.len();
    let mut tail = 0.0;
    while keep > 0 && tail + gaps[keep - 1] < cfg.tol_tail {
        tail += gaps[keep - 1];
        keep -= 1;
    }
    if let Some(cap) = cfg.max_gaps {
        while keep > cap {
            tail += gaps[keep - 1];
            keep -= 1;
        }
    }

    let zeta: Vec<C64> = (1..=keep)
        .map(|n| {
            if gaps[n - 1] < cfg.tol_tail {
                C64::new(0.0, 0.0)
            } else {
                spec.one_overlap(n) / kappa[n].sqrt()
            }
        })
        .collect();
    let gamma = zeta.iter().map(|z| z.norm_sqr()).collect();
    let state = BirkhoffState::assemble(zeta, gamma, u.mean(), tail)?;
    Ok((state, spec))
}

/// `ζ_n(u) = ⟨1|f_n⟩/√κ_n` for the retained gaps of `u`; the mean of `u` is
/// carried along and the spectrum is computed for `u − ⟨u|1⟩`.
pub fn birkhoff_forward(u: &RealField, cfg: &BirkhoffConfig) -> Result<BirkhoffState> {
    birkhoff_forward_with_spectrum(u, cfg).map(|(s, _)| s)
}

/// Frequencies `ω_{c,n}` for `n = 1..P`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    pub omega: Vec<f64>,
    pub c: f64,
}

/// `ω_{c,n} = n² − 2 Σ_k min(n,k) γ_k + 2cn`.
pub fn frequencies(state: &BirkhoffState, c: f64) -> FrequencyVector {
    let gamma = state.gamma();
    let count = gamma.len();
    // Σ_k min(n,k)γ_k = Σ_{k≤n} k γ_k + n Σ_{k>n} γ_k
    let mut omega = Vec::with_capacity(count);
    let mut head = 0.0;
    let total: f64 = gamma.iter().sum();
    let mut below = 0.0;
    for n in 1..=count {
        head += n as f64 * gamma[n - 1];
        below += gamma[n - 1];
        let nf = n as f64;
        omega.push(nf * nf - 2.0 * (head + nf * (total - below)) + 2.0 * c * nf);
    }
    FrequencyVector { omega, c }
}

/// `H_B = Σ k²γ_k − Σ_k (Σ_{p≥k} γ_p)²`.
pub fn hamiltonian_b(state: &BirkhoffState) -> f64 {
    hamiltonian_from_actions(state.gamma())
}

pub fn hamiltonian_from_actions(gamma: &[f64]) -> f64 {
    let quad: f64 = gamma.iter().enumerate().map(|(i, g)| ((i + 1) * (i + 1)) as f64 * g).sum();
    let mut tail = 0.0;
    let mut squares = 0.0;
    for g in gamma.iter().rev() {
        tail += g;
        squares += tail * tail;
    }
    quad - squares
}

/// `2 Σ n γ_n`, which equals `‖u − ⟨u|1⟩‖²`.
pub fn trace_formula(state: &BirkhoffState) -> f64 {
    2.0 * state.gamma().iter().enumerate().map(|(i, g)| (i + 1) as f64 * g).sum::<f64>()
}
