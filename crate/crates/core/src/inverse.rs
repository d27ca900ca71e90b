//! Inverse Birkhoff map for finite-gap states: `Πu(z) = −z Q′(z)/Q(z)` with
//! `Q(z) = det(I − zM)`.

use faer::Mat;

use crate::birkhoff::BirkhoffState;
use crate::error::{Error, Result};
use crate::spectral::RealField;
use crate::C64;

/// Roots of `Q` must have modulus above `1 + ROOT_MARGIN`.
pub const ROOT_MARGIN: f64 = 1e-10;

/// The `P × P` matrix `M_{np}`, `0 ≤ n, p < P`.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    m: Mat<C64>,
}

impl TransferMatrix {
    pub fn from_mat(m: Mat<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "transfer matrix must be square");
        Self { m }
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, n: usize, p: usize) -> C64 {
        self.m[(n, p)]
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        (0..self.size()).map(|i| self.m[(i, i)]).sum()
    }

    /// Eigenvalues `ρ_i`; the roots of `Q` are `1/ρ_i`.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        if self.size() == 0 {
            return Ok(Vec::new());
        }
        self.m.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
    }
}

/// `M_{np} = sqrt(μ_{n+1}κ_p/κ_{n+1}) ζ_{n+1} conj(ζ_p) / (λ_p − λ_n − 1)`, `ζ_0 = 1`.
///
/// On the superdiagonal the denominator is `γ_{n+1}` and the entry reduces to
/// `√μ_{n+1}`; it is evaluated in that form, which stays valid when a
/// retained gap is closed.
pub fn transfer_matrix(state: &BirkhoffState) -> Result<TransferMatrix> {
    let size = state.gaps();
    let lambda = state.lambda();
    let kappa = state.kappa();
    let ratio = state.mu_ratio();
    let mut m = Mat::<C64>::zeros(size, size);
    for n in 0..size {
        let zn = state.zeta_at(n + 1);
        for p in 0..size {
            if p == n + 1 {
                m[(n, p)] = C64::new((ratio[n] * kappa[n + 1]).sqrt(), 0.0);
                continue;
            }
            let denom = lambda[p] - lambda[n] - 1.0;
            if denom.abs() < 1e-12 {
                return Err(Error::ZeroDenominator { n, p });
            }
            let scale = (ratio[n] * kappa[p]).sqrt();
            m[(n, p)] = zn * state.zeta_at(p).conj() * (scale / denom);
        }
    }
    Ok(TransferMatrix { m })
}

/// Coefficients `Q_0..Q_P` of `Q(z) = det(I − zM)` by Faddeev–LeVerrier;
/// `Q_0 = 1`.
pub fn q_polynomial(m: &TransferMatrix) -> Vec<C64> {
    let size = m.size();
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    let mut acc = Mat::<C64>::zeros(size, size);
    for k in 1..=size {
        // acc ← M·acc + c_{k−1} I, then c_k = −tr(M·acc)/k
        let mut next = &m.m * &acc;
        for i in 0..size {
            next[(i, i)] += coeffs[k - 1];
        }
        let prod = &m.m * &next;
        let trace: C64 = (0..size).map(|i| prod[(i, i)]).sum();
        coeffs.push(-trace / k as f64);
        acc = next;
    }
    coeffs
}

/// Evaluate `Σ Q_k z^k`.
pub fn q_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Taylor coefficients `a_0..a_order` of `−zQ′(z)/Q(z)`, i.e. the power sums
/// `Σ_i ρ_i^n` over the reciprocal roots, by the Newton recurrence.
pub fn log_derivative_series(q: &[C64], order: usize) -> Vec<C64> {
    let degree = q.len() - 1;
    let mut p = vec![C64::new(0.0, 0.0); order + 1];
    for n in 1..=order {
        let mut value = if n <= degree { -q[n] * n as f64 } else { C64::new(0.0, 0.0) };
        for k in 1..=degree.min(n - 1) {
            value -= q[k] * p[n - k];
        }
        p[n] = value;
    }
    p
}

/// Check that every root of `Q` lies outside the closed unit disc.
pub fn check_roots(m: &TransferMatrix) -> Result<Vec<C64>> {
    let rho = m.eigenvalues()?;
    for r in &rho {
        let modulus = r.norm();
        if modulus * (1.0 + ROOT_MARGIN) >= 1.0 {
            return Err(Error::RootInsideDisc { modulus: 1.0 / modulus });
        }
    }
    Ok(rho)
}

/// Smallest order (at least `floor`) at which the dropped coefficients of
/// the reconstruction are below `tol`; they decay like `max_i |ρ_i|^n`.
pub fn resolving_order(state: &BirkhoffState, floor: usize, tol: f64) -> Result<usize> {
    let rho = check_roots(&transfer_matrix(state)?)?;
    let radius = rho.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if radius == 0.0 {
        return Ok(floor.max(1));
    }
    let needed = (tol.ln() / radius.ln()).ceil().max(1.0) as usize;
    Ok(needed.max(floor))
}

/// Potential `u` with `Πu = −zQ′/Q + c` truncated at `order`.
pub fn reconstruct(state: &BirkhoffState, order: usize) -> Result<RealField> {
    let m = transfer_matrix(state)?;
    check_roots(&m)?;
    let q = q_polynomial(&m);
    let mut coeffs = log_derivative_series(&q, order);
    coeffs[0] = C64::new(state.mean_c(), 0.0);
    Ok(RealField::from_positive_modes(state.mean_c(), &coeffs[1..]))
}

/// `û(1) = −Σ_{n=0}^{P−1} sqrt(μ_{n+1}κ_n/κ_{n+1}) ζ_{n+1} conj(ζ_n)`.
pub fn first_coefficient(state: &BirkhoffState) -> C64 {
    let kappa = state.kappa();
    let ratio = state.mu_ratio();
    -(0..state.gaps())
        .map(|n| (ratio[n] * kappa[n]).sqrt() * state.zeta_at(n + 1) * state.zeta_at(n).conj())
        .sum::<C64>()
}

/// Closed-form two-gap data in terms of `(γ_1, γ_2, φ_1, φ_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGapClosedForm {
    pub kappa0: f64,
    pub kappa1: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub m: [[C64; 2]; 2],
    pub alpha: C64,
    pub beta: C64,
}

pub fn two_gap_closed_form(g1: f64, g2: f64, phi1: f64, phi2: f64) -> TwoGapClosedForm {
    let e1 = C64::from_polar(1.0, phi1);
    let e2 = C64::from_polar(1.0, phi2);
    let e21 = C64::from_polar(1.0, phi2 - phi1);
    let s = 2.0 + g1 + g2;
    let r = 1.0 + g1 + g2;
    let m00 = -e1 * ((g1 * (2.0 + g1) * r / s).sqrt() / (1.0 + g1));
    let m01 = C64::new((r / (1.0 + g2)).sqrt() / (1.0 + g1), 0.0);
    let m10 = -e2 * ((g2 / s).sqrt() / (1.0 + g1));
    let m11 = -e21 * ((g1 * g2 * (2.0 + g1) / (1.0 + g2)).sqrt() / (1.0 + g1));
    let alpha = ((g1 * (2.0 + g1)).sqrt() / (1.0 + g1))
        * (e1 * (r / s).sqrt() + e21 * (g2 / (1.0 + g2)).sqrt());
    let beta = e2 * (r * g2 / ((1.0 + g2) * s)).sqrt();
    TwoGapClosedForm {
        kappa0: (2.0 + g1) / ((1.0 + g1) * s),
        kappa1: 1.0 / ((1.0 + g1) * (1.0 + g2)),
        omega1: 1.0 - 2.0 * g1 - 2.0 * g2,
        omega2: 4.0 - 2.0 * g1 - 4.0 * g2,
        m: [[m00, m01], [m10, m11]],
        alpha,
        beta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::traveling_wave;

    #[test]
    fn zero_state_reconstructs_mean() {
        let s = BirkhoffState::from_zeta(vec![C64::new(0.0, 0.0); 3], 1.5).unwrap();
        let m = transfer_matrix(&s).unwrap();
        let q = q_polynomial(&m);
        assert!((q[0] - 1.0).norm() == 0.0);
        assert!(q[1..].iter().all(|c| c.norm() < 1e-15));
        let u = reconstruct(&s, 16).unwrap();
        assert_eq!(u.mean(), 1.5);
        assert!(u.without_mean().l2_norm() < 1e-15);
    }

    #[test]
    fn one_gap_matrix_and_reconstruction() {
        let q: f64 = 0.5;
        let g = q * q / (1.0 - q * q);
        // the phase chain makes ⟨1|f_1⟩ = −q for u_{0,q}
        let s = BirkhoffState::from_actions_angles(&[g], &[std::f64::consts::PI], 0.0).unwrap();
        let m = transfer_matrix(&s).unwrap();
        assert!((m.entry(0, 0) - q).norm() < 1e-15);
        let poly = q_polynomial(&m);
        assert!((poly[1] + q).norm() < 1e-15);
        let u = reconstruct(&s, 64).unwrap();
        let exact = traveling_wave(q, 64).unwrap();
        assert!(u.distance(&exact, crate::spectral::SobolevIndex::L2) < 1e-14);
        assert!((first_coefficient(&s) - q).norm() < 1e-15);
    }

    #[test]
    fn leverrier_matches_two_by_two() {
        let s = BirkhoffState::from_actions_angles(&[1.0, 1.0], &[0.4, 1.9], 0.0).unwrap();
        let m = transfer_matrix(&s).unwrap();
        let q = q_polynomial(&m);
        let det = m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0);
        assert!((q[1] + m.trace()).norm() < 1e-14);
        assert!((q[2] - det).norm() < 1e-14);
        let z = C64::new(0.3, -0.2);
        let direct = (1.0 - z * m.entry(0, 0)) * (1.0 - z * m.entry(1, 1)) - z * z * m.entry(0, 1) * m.entry(1, 0);
        assert!((q_eval(&q, z) - direct).norm() < 1e-14);
    }

    #[test]
    fn closed_forms_match_pipeline() {
        let (g1, g2, p1, p2) = (0.7, 2.0, 0.3, -1.2);
        let s = BirkhoffState::from_actions_angles(&[g1, g2], &[p1, p2], 0.0).unwrap();
        let cf = two_gap_closed_form(g1, g2, p1, p2);
        let m = transfer_matrix(&s).unwrap();
        for n in 0..2 {
            for p in 0..2 {
                assert!((m.entry(n, p) - cf.m[n][p]).norm() < 1e-14);
            }
        }
        let q = q_polynomial(&m);
        assert!((q[1] - cf.alpha).norm() < 1e-14);
        assert!((q[2] - cf.beta).norm() < 1e-14);
        assert!((s.kappa()[0] - cf.kappa0).abs() < 1e-15);
        assert!((s.kappa()[1] - cf.kappa1).abs() < 1e-15);
    }

    #[test]
    fn power_sums_match_traces() {
        let s = BirkhoffState::from_actions_angles(&[0.5, 0.25, 0.8], &[0.1, 2.0, -0.7], 0.0).unwrap();
        let m = transfer_matrix(&s).unwrap();
        let series = log_derivative_series(&q_polynomial(&m), 8);
        let mut power = m.as_mat().clone();
        for n in 1..=8 {
            let tr: C64 = (0..3).map(|i| power[(i, i)]).sum();
            assert!((series[n] - tr).norm() < 1e-13, "n = {n}");
            power = &power * m.as_mat();
        }
        assert!((series[1] - first_coefficient(&s)).norm() < 1e-14);
    }

    #[test]
    fn closed_gap_in_the_middle() {
        // γ_2 = 0 with neighbors open: limit of the general formula
        let s = BirkhoffState::from_actions_angles(&[0.5, 0.0, 0.3], &[0.2, 0.0, 1.0], 0.0).unwrap();
        let near = BirkhoffState::from_actions_angles(&[0.5, 1e-14, 0.3], &[0.2, 0.5, 1.0], 0.0).unwrap();
        let a = reconstruct(&s, 32).unwrap();
        let b = reconstruct(&near, 32).unwrap();
        assert!(a.distance(&b, crate::spectral::SobolevIndex::L2) < 1e-6);
    }
}
