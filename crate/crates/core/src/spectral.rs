//! Truncated Fourier representations of torus functions.
//!
//! A [`RealField`] stores the coefficients `û(n)` for `n = 0..=N`; the
//! negative modes are implied by `û(−n) = conj(û(n))`, so every stored field
//! is real valued by construction. A [`HardyField`] stores the nonnegative
//! modes of an element of the Hardy space `H_+`.
//!
//! Inner products are normalized, `⟨f|g⟩ = (1/2π) ∫ f ḡ dx`, so in coefficient
//! space `⟨f|g⟩ = Σ f̂(n) conj(ĝ(n))`.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::linear_convolve;
use crate::C64;

/// Relative asymmetry above which a coefficient array is not accepted as the
/// spectrum of a real function.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 256;

/// Regularity exponent `s` of the Sobolev norm `‖f‖_s² = Σ ⟨n⟩^{2s} |f̂(n)|²`
/// with `⟨n⟩ = max(1, |n|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex(pub f64);

impl SobolevIndex {
    pub const L2: SobolevIndex = SobolevIndex(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("Sobolev index {s} is not finite")));
        }
        Ok(Self(s))
    }

    /// `⟨n⟩^{2s}`.
    pub fn weight(self, n: i64) -> f64 {
        let m = n.unsigned_abs().max(1) as f64;
        m.powf(2.0 * self.0)
    }
}

/// Fields whose coefficients carry a Sobolev norm.
pub trait SobolevNorm {
    fn sobolev_norm(&self, s: SobolevIndex) -> f64;
}

/// Real-valued function on the torus, truncated at order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    coeffs: Vec<C64>,
}

impl RealField {
    pub fn zeros(order: usize) -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(order: usize, c: f64) -> Self {
        let mut f = Self::zeros(order);
        f.coeffs[0] = C64::new(c, 0.0);
        f
    }

    /// Builds a field from `û(0), …, û(N)`. The zero mode must be real up to
    /// [`HERMITIAN_TOL`] relative to the largest coefficient.
    pub fn from_nonnegative(mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient array".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let asym = coeffs[0].im.abs();
        if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonHermitian { asymmetry: asym / scale });
        }
        coeffs[0].im = 0.0;
        Ok(Self { coeffs })
    }

    /// Builds a field from the full array `û(−N), …, û(N)` (length `2N + 1`),
    /// symmetrizing roundoff and rejecting genuine asymmetry.
    pub fn from_modes(modes: &[C64]) -> Result<Self> {
        if modes.len() % 2 == 0 {
            return Err(Error::InvalidParameter("mode array must have odd length 2N+1".into()));
        }
        let order = modes.len() / 2;
        let scale = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut asym: f64 = 0.0;
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let plus = modes[order + n];
            let minus = modes[order - n];
            asym = asym.max((plus - minus.conj()).norm());
            coeffs.push(0.5 * (plus + minus.conj()));
        }
        if scale > 0.0 && asym > HERMITIAN_TOL * scale {
            return Err(Error::NonHermitian { asymmetry: asym / scale });
        }
        coeffs[0].im = 0.0;
        Ok(Self { coeffs })
    }

    /// `c + Σ_{n≥1} 2 Re(a_n e^{inx})` with `a_n = positive[n − 1]`.
    pub fn from_positive_modes(mean: f64, positive: &[C64]) -> Self {
        let mut coeffs = Vec::with_capacity(positive.len() + 1);
        coeffs.push(C64::new(mean, 0.0));
        coeffs.extend_from_slice(positive);
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `û(n)` for any integer `n`; zero outside the stored band.
    pub fn coeff(&self, n: i64) -> C64 {
        let m = n.unsigned_abs() as usize;
        if m > self.order() {
            return C64::new(0.0, 0.0);
        }
        if n >= 0 {
            self.coeffs[m]
        } else {
            self.coeffs[m].conj()
        }
    }

    pub fn nonnegative(&self) -> &[C64] {
        &self.coeffs
    }

    /// Full array `û(−N), …, û(N)`.
    pub fn modes(&self) -> Vec<C64> {
        let n = self.order() as i64;
        (-n..=n).map(|k| self.coeff(k)).collect()
    }

    /// The average `⟨u|1⟩ = û(0)`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn with_mean(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = C64::new(c, 0.0);
        out
    }

    pub fn without_mean(&self) -> Self {
        self.with_mean(0.0)
    }

    /// Truncate or zero-extend to order `order`.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, C64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// `x ↦ u(x + a)`, i.e. `û(n) ↦ û(n) e^{ina}`.
    pub fn translated(&self, a: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * C64::from_polar(1.0, n as f64 * a))
            .collect();
        Self { coeffs }
    }

    /// `x ↦ u(−x)`.
    pub fn reflected(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(SobolevIndex::L2)
    }

    /// `‖self − other‖_s` over the union of both bands.
    pub fn distance(&self, other: &RealField, s: SobolevIndex) -> f64 {
        (self - other).sobolev_norm(s)
    }

    /// Point value `u(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * (c * C64::from_polar(1.0, n as f64 * x)).re;
        }
        acc
    }

    fn zip_with(&self, other: &RealField, op: impl Fn(C64, C64) -> C64) -> RealField {
        let order = self.order().max(other.order());
        let coeffs = (0..=order as i64).map(|n| op(self.coeff(n), other.coeff(n))).collect();
        RealField { coeffs }
    }
}

impl Add for &RealField {
    type Output = RealField;
    fn add(self, rhs: &RealField) -> RealField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &RealField {
    type Output = RealField;
    fn sub(self, rhs: &RealField) -> RealField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl SobolevNorm for RealField {
    fn sobolev_norm(&self, s: SobolevIndex) -> f64 {
        let mut acc = s.weight(0) * self.coeffs[0].norm_sqr();
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * s.weight(n as i64) * c.norm_sqr();
        }
        acc.sqrt()
    }
}

/// Element of the Hardy space `H_+`, truncated at order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyField {
    coeffs: Vec<C64>,
}

impl HardyField {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "Hardy field needs at least the zero mode");
        Self { coeffs }
    }

    /// The constant function 1.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); order + 1];
        coeffs[0] = C64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `⟨self|other⟩ = Σ f̂(n) conj(ĝ(n))`.
    pub fn inner(&self, other: &HardyField) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    /// Multiplication by `e^{ix}` (the shift `S`), truncated to the same order.
    pub fn shifted(&self) -> HardyField {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        coeffs[1..].copy_from_slice(&self.coeffs[..self.coeffs.len() - 1]);
        HardyField { coeffs }
    }
}

impl SobolevNorm for HardyField {
    fn sobolev_norm(&self, s: SobolevIndex) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| s.weight(n as i64) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `(Σ_n ⟨n⟩^{2s} |f̂(n)|²)^{1/2}` over the stored range.
pub fn sobolev_norm<F: SobolevNorm + ?Sized>(f: &F, s: SobolevIndex) -> f64 {
    f.sobolev_norm(s)
}

/// Szegő projection `Π`: keep the modes `n ≥ 0`.
pub fn szego_project(f: &RealField) -> HardyField {
    HardyField { coeffs: f.coeffs.clone() }
}

/// Hilbert transform, `f̂(n) ↦ −i sign(n) f̂(n)` with `sign(0) = 0`.
pub fn hilbert_apply(f: &RealField) -> RealField {
    let mut coeffs: Vec<C64> = f.coeffs.iter().map(|c| C64::new(c.im, -c.re)).collect();
    coeffs[0] = C64::new(0.0, 0.0);
    RealField { coeffs }
}

/// Toeplitz operator `T_u f = Π(u f)`:
/// `(T_u f)^(n) = Σ_{p=0..N} û(n − p) f̂(p)` for `n = 0..N`, where `N` is the
/// order of `f`.
pub fn toeplitz_apply(u: &RealField, f: &HardyField) -> HardyField {
    let nu = u.order();
    let nf = f.order();
    // symbol laid out as û(−N_u), …, û(N_u); output index n sits at n + N_u
    let full = linear_convolve(&u.modes(), &f.coeffs);
    let coeffs = (0..=nf).map(|n| full[n + nu]).collect();
    HardyField { coeffs }
}

/// Horner evaluation `Σ f̂(n) z^n` of a Hardy field inside the unit disc.
pub fn disc_eval(f: &HardyField, z: C64) -> Result<C64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisc { re: z.re, im: z.im });
    }
    Ok(f.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c))
}

/// `u(x) = 2 Re(ε q e^{ix} / (1 − q e^{ix}))`, i.e. `û(n) = ε q^n` for `n ≥ 1`.
///
/// `ε = 1` gives the one-gap traveling-wave profile `u_{0,q}` (see
/// [`traveling_wave`]); `ε < q` the deep-ground-state family.
pub fn one_gap_potential(q: f64, eps: f64, order: usize) -> Result<RealField> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1]")));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(C64::new(0.0, 0.0));
    let mut qn = 1.0;
    for _ in 1..=order {
        qn *= q;
        coeffs.push(C64::new(eps * qn, 0.0));
    }
    Ok(RealField { coeffs })
}

/// `u_{0,q}(x) = 2 Re(q e^{ix} / (1 − q e^{ix}))`, i.e. `û(n) = q^n`.
pub fn traveling_wave(q: f64, order: usize) -> Result<RealField> {
    one_gap_potential(q, 1.0, order)
}

/// Sample points `x_j = 2πj/M`.
pub fn grid_points(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}
