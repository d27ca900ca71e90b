//! Gauss–Jacobi rules by the Golub–Welsch construction, and graded panel
//! sums for `∫_0^q t^β (q − t)^α g(t) dt` where `g` may vary on a small length
//! scale near `t = q`.

use faer::{Mat, Side};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights on `[−1, 1]` for the weight `(1 − x)^α (1 + x)^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 || !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Jacobi needs n > 0 and exponents > -1 (n = {n}, alpha = {alpha}, beta = {beta})"
        )));
    }
    let ab = alpha + beta;
    let diag = |k: usize| -> f64 {
        if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            let s = 2.0 * k as f64 + ab;
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        }
    };
    let off = |k: usize| -> f64 {
        // k ≥ 1; the k = 1 case has (k + α + β)/(2k + α + β − 1) = 1 cancelled
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let b = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        b.sqrt()
    };
    let jac = Mat::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            diag(i)
        } else if i == j + 1 {
            off(i)
        } else if j == i + 1 {
            off(j)
        } else {
            0.0
        }
    });
    let evd = jac.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let s = evd.S().column_vector();
    let u = evd.U();
    let nodes = (0..n).map(|i| s[i]).collect();
    let weights = (0..n).map(|i| mu0 * u[(0, i)] * u[(0, i)]).collect();
    Ok(GaussRule { nodes, weights })
}

pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Panel rules at one node count.
pub struct PanelRules {
    left: GaussRule,
    right: GaussRule,
    plain: GaussRule,
}

impl PanelRules {
    /// Rules for `t^β` on the left panel and `d^α` on the first right panel.
    pub fn new(n: usize, beta: f64, alpha: f64) -> Result<Self> {
        Ok(Self { left: gauss_jacobi(n, 0.0, beta)?, right: gauss_jacobi(n, 0.0, alpha)?, plain: gauss_legendre(n)? })
    }
}

/// Value and integral of the absolute integrand.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PanelSum {
    pub value: f64,
    pub magnitude: f64,
}

impl std::ops::Add for PanelSum {
    type Output = PanelSum;
    fn add(self, o: PanelSum) -> PanelSum {
        PanelSum { value: self.value + o.value, magnitude: self.magnitude + o.magnitude }
    }
}

/// `∫_0^{q/2} t^β g(t, q − t) dt` on one Gauss–Jacobi panel carrying `t^β`.
pub fn left_panel(q: f64, beta: f64, g: &impl Fn(f64, f64) -> f64, rules: &PanelRules) -> PanelSum {
    // t = (q/4)(1 + x)
    let h = 0.25 * q;
    let pref = h.powf(beta + 1.0);
    let mut sum = PanelSum::default();
    for (x, w) in rules.left.nodes.iter().zip(&rules.left.weights) {
        let t = h * (1.0 + x);
        let v = pref * w * g(t, q - t);
        sum.value += v;
        sum.magnitude += v.abs();
    }
    sum
}

/// `∫_{q/2}^q d^α g(q − d, d) dt` with `d = q − t` graded geometrically from
/// `d_0 = min(scale, q/2)`; the first panel `[0, d_0]` carries `d^α`, so `g`
/// may change on the length scale `scale` near `d = 0`.
pub fn right_panels(q: f64, alpha: f64, scale: f64, g: &impl Fn(f64, f64) -> f64, rules: &PanelRules) -> PanelSum {
    let half = 0.5 * q;
    let mut sum = PanelSum::default();
    let d0 = scale.min(half);
    let h = 0.5 * d0;
    let pref = h.powf(alpha + 1.0);
    for (x, w) in rules.right.nodes.iter().zip(&rules.right.weights) {
        let d = h * (1.0 + x);
        let v = pref * w * g(q - d, d);
        sum.value += v;
        sum.magnitude += v.abs();
    }
    let mut a = d0;
    while a < half {
        let b = (2.0 * a).min(half);
        let mid = 0.5 * (a + b);
        let rad = 0.5 * (b - a);
        for (x, w) in rules.plain.nodes.iter().zip(&rules.plain.weights) {
            let d = mid + rad * x;
            let v = rad * w * d.powf(alpha) * g(q - d, d);
            sum.value += v;
            sum.magnitude += v.abs();
        }
        a = b;
    }
    sum
}

/// Result of a converged panel sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradedValue {
    pub value: f64,
    /// Integral of the absolute integrand (at the final resolution).
    pub magnitude: f64,
    pub nodes_per_panel: usize,
}

/// Double the nodes per panel, starting at 16, until two consecutive sums
/// agree to `tol` relative to the integral of the absolute integrand.
pub fn converge(tol: f64, mut eval: impl FnMut(usize) -> Result<PanelSum>) -> Result<GradedValue> {
    let mut n = 16;
    let mut prev = eval(n)?.value;
    while n < 512 {
        n *= 2;
        let sum = eval(n)?;
        if !sum.value.is_finite() {
            return Err(Error::QuadratureNotConverged(format!("non-finite value at n = {n}")));
        }
        if (sum.value - prev).abs() <= tol * sum.magnitude.max(f64::MIN_POSITIVE) {
            return Ok(GradedValue { value: sum.value, magnitude: sum.magnitude, nodes_per_panel: n });
        }
        prev = sum.value;
    }
    Err(Error::QuadratureNotConverged(format!("no agreement to {tol:e} after {n} nodes per panel")))
}

/// `∫_0^q t^β (q − t)^α g(t, q − t) dt`, see [`left_panel`] and
/// [`right_panels`].
pub fn graded_integral(
    q: f64,
    beta: f64,
    alpha: f64,
    scale: f64,
    g: impl Fn(f64, f64) -> f64,
    tol: f64,
) -> Result<GradedValue> {
    if !(q > 0.0 && scale > 0.0) {
        return Err(Error::InvalidParameter("graded integral needs q > 0 and scale > 0".into()));
    }
    converge(tol, |n| {
        let rules = PanelRules::new(n, beta, alpha)?;
        let left = left_panel(q, beta, &|t, d| d.powf(alpha) * g(t, d), &rules);
        let right = right_panels(q, alpha, scale, &|t, d| t.powf(beta) * g(t, d), &rules);
        Ok(left + right)
    })
}
