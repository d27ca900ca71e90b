//! Galerkin truncation of the Lax operator `L_u = D − T_u` on the Hardy modes
//! `e^{inx}`, `n = 0..N`, its eigendecomposition, gaps and generating function.
//!
//! In the mode basis `L_u` has entries `n δ_{np} − û(n − p)`. Eigenvectors are
//! normalized by the phase chain `⟨f_0|1⟩ > 0`, `⟨f_{n+1}|S f_n⟩ > 0` where `S`
//! is multiplication by `e^{ix}`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{HardyField, RealField};
use crate::C64;

/// Tolerances of the spectral stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxConfig {
    /// Negative gaps down to `−tol_gap` are treated as roundoff and clipped.
    pub tol_gap: f64,
    /// Minimum modulus of a phase-chain overlap.
    pub tol_phase: f64,
    /// Minimum distance of a spectral parameter from the poles `−λ_n`.
    pub tol_pole: f64,
    /// Number of trusted eigenpairs; `⌊N/2⌋` when absent.
    pub n_trust: Option<usize>,
}

impl Default for LaxConfig {
    fn default() -> Self {
        Self { tol_gap: 1e-8, tol_phase: 1e-10, tol_pole: 1e-6, n_trust: None }
    }
}

/// Truncated Lax matrix of size `(N+1) × (N+1)`.
#[derive(Debug, Clone)]
pub struct LaxMatrix {
    entries: Mat<C64>,
}

impl LaxMatrix {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn entry(&self, n: usize, p: usize) -> C64 {
        self.entries[(n, p)]
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.entries
    }

    /// `L f` on the truncated modes.
    pub fn apply(&self, f: &HardyField) -> HardyField {
        let dim = self.entries.nrows();
        let out = (0..dim)
            .map(|n| (0..dim).map(|p| self.entries[(n, p)] * f.coeffs()[p]).sum())
            .collect();
        HardyField::new(out)
    }
}

/// Assemble `L_u` truncated at order `order`.
pub fn assemble_lax(u: &RealField, order: usize) -> Result<LaxMatrix> {
    if u.nonnegative().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameter("potential has non-finite coefficients".into()));
    }
    let entries = Mat::from_fn(order + 1, order + 1, |n, p| {
        let sym = u.coeff(n as i64 - p as i64);
        if n == p {
            C64::new(n as f64 - sym.re, 0.0)
        } else {
            -sym
        }
    });
    Ok(LaxMatrix { entries })
}

/// Assemble `L_u` from the full mode array `û(−N..N)`; rejects coefficients
/// that do not describe a real potential.
pub fn assemble_lax_from_modes(modes: &[C64], order: usize) -> Result<LaxMatrix> {
    let u = RealField::from_modes(modes)?;
    assemble_lax(&u, order)
}

/// Ordered eigenpairs of a truncated Lax matrix.
#[derive(Debug, Clone)]
pub struct LaxSpectrum {
    lambda: Vec<f64>,
    vectors: Mat<C64>,
    raw_gamma: Vec<f64>,
    n_trust: usize,
    tol_gap: f64,
}

/// Full dense eigendecomposition with the phase-chain normalization.
pub fn eigendecompose(lax: &LaxMatrix, cfg: &LaxConfig) -> Result<LaxSpectrum> {
    let dim = lax.entries.nrows();
    let order = dim - 1;
    let evd = lax
        .entries
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let lambda: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    let mut vectors = evd.U().to_owned();
    let n_trust = cfg.n_trust.unwrap_or(order / 2).min(order);

    // ⟨f_0|1⟩ is the zero-mode coefficient of f_0
    let head = vectors[(0, 0)];
    if head.norm() < cfg.tol_phase {
        return Err(Error::PhaseDegenerate { n: 0, overlap: head.norm() });
    }
    rotate_column(&mut vectors, 0, head.conj() / head.norm());
    for n in 0..order {
        // ⟨f_{n+1}|S f_n⟩ = Σ_m f_{n+1}[m+1] conj(f_n[m])
        let overlap: C64 =
            (0..order).map(|m| vectors[(m + 1, n + 1)] * vectors[(m, n)].conj()).sum();
        let modulus = overlap.norm();
        if modulus < cfg.tol_phase {
            if n < n_trust {
                return Err(Error::PhaseDegenerate { n, overlap: modulus });
            }
            // untrusted tail: keep the solver's phases from here on
            break;
        }
        rotate_column(&mut vectors, n + 1, overlap.conj() / modulus);
    }

    let raw_gamma = (1..=n_trust).map(|n| lambda[n] - lambda[n - 1] - 1.0).collect();
    Ok(LaxSpectrum { lambda, vectors, raw_gamma, n_trust, tol_gap: cfg.tol_gap })
}

fn rotate_column(m: &mut Mat<C64>, col: usize, phase: C64) {
    for r in 0..m.nrows() {
        m[(r, col)] *= phase;
    }
}

impl LaxSpectrum {
    /// Truncation order `N` (there are `N + 1` eigenpairs).
    pub fn order(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn n_trust(&self) -> usize {
        self.n_trust
    }

    /// All eigenvalues, ascending.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Unclipped `λ_n − λ_{n−1} − 1` for `n = 1..=N_trust` (index `n − 1`).
    pub fn raw_gamma(&self) -> &[f64] {
        &self.raw_gamma
    }

    pub fn vectors(&self) -> &Mat<C64> {
        &self.vectors
    }

    /// Eigenvector `f_n` in the mode basis.
    pub fn eigenvector(&self, n: usize) -> HardyField {
        HardyField::new((0..self.vectors.nrows()).map(|r| self.vectors[(r, n)]).collect())
    }

    /// `⟨1|f_n⟩ = conj(f̂_n(0))`.
    pub fn one_overlap(&self, n: usize) -> C64 {
        self.vectors[(0, n)].conj()
    }

    /// Gaps `γ_1..γ_{N_trust}` clipped at zero (index `n − 1`).
    pub fn gap_sequence(&self) -> Result<Vec<f64>> {
        self.raw_gamma
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                if g < -self.tol_gap {
                    Err(Error::GapViolation { n: i + 1, gamma: g })
                } else {
                    Ok(g.max(0.0))
                }
            })
            .collect()
    }

    /// `‖L f_n − λ_n f_n‖`.
    pub fn residual(&self, lax: &LaxMatrix, n: usize) -> f64 {
        let f = self.eigenvector(n);
        let lf = lax.apply(&f);
        lf.coeffs()
            .iter()
            .zip(f.coeffs())
            .map(|(a, b)| (a - b * self.lambda[n]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Free-function form of [`LaxSpectrum::gap_sequence`].
pub fn gap_sequence(spec: &LaxSpectrum) -> Result<Vec<f64>> {
    spec.gap_sequence()
}

/// Value of the generating function `H_λ = ⟨(L_u + λ)^{-1} 1 | 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenFunValue {
    pub lambda_arg: C64,
    pub value: C64,
}

/// `H_λ` from the resolvent: solve `(L + λ) w = 1` and return `w_0`.
pub fn genfun_resolvent(lax: &LaxMatrix, lambda_arg: C64, cfg: &LaxConfig) -> Result<GenFunValue> {
    let dim = lax.entries.nrows();
    if lambda_arg.im.abs() < cfg.tol_pole {
        let eigs = lax
            .entries
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let distance = eigs.iter().map(|l| (lambda_arg + l).norm()).fold(f64::INFINITY, f64::min);
        if distance < cfg.tol_pole {
            return Err(Error::NearPole { distance });
        }
    }
    let shifted = Mat::from_fn(dim, dim, |n, p| {
        let e = lax.entries[(n, p)];
        if n == p {
            e + lambda_arg
        } else {
            e
        }
    });
    let mut rhs = Mat::<C64>::zeros(dim, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);
    let w = shifted.partial_piv_lu().solve(&rhs);
    Ok(GenFunValue { lambda_arg, value: w[(0, 0)] })
}

/// `H_λ = 1/(λ_0 + λ) Π_{n=1}^{N_trust} (1 − γ_n/(λ_n + λ))`.
pub fn genfun_product(spec: &LaxSpectrum, lambda_arg: C64, cfg: &LaxConfig) -> Result<GenFunValue> {
    let gamma = spec.gap_sequence()?;
    let lam = spec.lambda();
    let distance = lam[..=spec.n_trust]
        .iter()
        .map(|l| (lambda_arg + l).norm())
        .fold(f64::INFINITY, f64::min);
    if distance < cfg.tol_pole {
        return Err(Error::NearPole { distance });
    }
    let mut value = C64::new(1.0, 0.0) / (lambda_arg + lam[0]);
    for (i, g) in gamma.iter().enumerate() {
        value *= C64::new(1.0, 0.0) - g / (lambda_arg + lam[i + 1]);
    }
    Ok(GenFunValue { lambda_arg, value })
}
