//! Time evolution of `∂t v = H∂x²v − ∂x(v²)`.
//!
//! The quadrature path rotates Birkhoff coordinates and reconstructs; data of
//! mean `c` are handled through `v(t, x) = u(t, x − 2ct) + c` with `u` the
//! mean-zero solution issued from `v(0) − c`. The direct path is an
//! integrating-factor RK4 scheme in coefficient space.

use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_forward, frequencies, BirkhoffConfig, BirkhoffState};
use crate::error::{Error, Result};
use crate::fft::GridTransform;
use crate::inverse::reconstruct;
use crate::lax::{assemble_lax, eigendecompose, LaxConfig};
use crate::spectral::{RealField, SobolevIndex, SobolevNorm};
use crate::C64;

/// Largest admissible `dt · K²` for the direct scheme.
pub const STEP_LIMIT: f64 = 2.0 * std::f64::consts::PI;

/// Norm above which the direct scheme reports blow-up.
pub const BLOWUP_NORM: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowMethod {
    Quadrature,
    Direct,
}

/// Output times and numerical settings of an evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub t_grid: Vec<f64>,
    pub method: FlowMethod,
    /// Time step of the direct scheme.
    pub dt: f64,
    /// Fraction of the stored modes evolved by the direct scheme.
    pub dealias: f64,
    /// Order of the output fields; the order of the initial data when absent.
    pub order: Option<usize>,
    /// Sobolev exponents recorded in the diagnostics besides `L²`.
    pub sobolev: Vec<f64>,
    /// Number of gaps recorded per output time (direct path only computes
    /// them when this is positive).
    pub gap_count: usize,
    pub forward: BirkhoffConfig,
}

impl FlowSpec {
    pub fn new(t_grid: Vec<f64>, method: FlowMethod) -> Self {
        Self {
            t_grid,
            method,
            dt: 1e-4,
            dealias: 1.0,
            order: None,
            sobolev: Vec::new(),
            gap_count: 0,
            forward: BirkhoffConfig::default(),
        }
    }

    /// `n + 1` equally spaced times on `[0, t_max]`.
    pub fn uniform(t_max: f64, n: usize, method: FlowMethod) -> Self {
        let grid = (0..=n).map(|i| t_max * i as f64 / n.max(1) as f64).collect();
        Self::new(grid, method)
    }

    fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("time grid must be nonempty and finite".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
        }
        if self.method == FlowMethod::Direct {
            if !(self.dt > 0.0) {
                return Err(Error::InvalidParameter("dt must be positive".into()));
            }
            if !(self.dealias > 0.0 && self.dealias <= 1.0) {
                return Err(Error::InvalidParameter("dealias fraction must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Per-time conserved quantities and norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mean: f64,
    pub l2: f64,
    pub energy: f64,
    /// `(s, ‖v‖_s)` for each requested exponent.
    pub sobolev: Vec<(f64, f64)>,
    pub gaps: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub method: FlowMethod,
    pub times: Vec<f64>,
    pub fields: Vec<RealField>,
    /// Birkhoff coordinates of `v(t) − c` (quadrature path).
    pub states: Option<Vec<BirkhoffState>>,
    pub diagnostics: Vec<Diagnostics>,
    /// Action discarded by the finite-gap truncation (quadrature path).
    pub tail_action: f64,
}

/// `ζ_n ↦ ζ_n e^{itω_{c,n}}` with `ω_{c,n}` from [`frequencies`].
pub fn quadrature_evolve(state: &BirkhoffState, t: f64, c: f64) -> BirkhoffState {
    let omega = frequencies(state, c).omega;
    state.rotated(|n| t * omega[n - 1])
}

/// `H(v) = Σ_{n≥1} n|v̂(n)|² − (1/3) ⟨v³|1⟩`.
pub fn energy(v: &RealField) -> f64 {
    let quad: f64 = v.nonnegative().iter().enumerate().skip(1).map(|(n, c)| n as f64 * c.norm_sqr()).sum();
    let order = v.order();
    let transform = GridTransform::new((3 * order + 1).next_power_of_two());
    let mut buf = load_grid(&transform, v.nonnegative());
    transform.to_grid(&mut buf);
    let cube: f64 = buf.iter().map(|g| g.re.powi(3)).sum::<f64>() / transform.size() as f64;
    quad - cube / 3.0
}

fn load_grid(transform: &GridTransform, modes: &[C64]) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); transform.size()];
    buf[0] = modes[0];
    for (n, c) in modes.iter().enumerate().skip(1) {
        buf[n] = *c;
        buf[transform.slot(-(n as i64))] = c.conj();
    }
    buf
}

fn diagnostics(v: &RealField, t: f64, spec: &FlowSpec, gaps: Vec<f64>) -> Diagnostics {
    Diagnostics {
        t,
        mean: v.mean(),
        l2: v.l2_norm(),
        energy: energy(v),
        sobolev: spec.sobolev.iter().map(|&s| (s, v.sobolev_norm(SobolevIndex(s)))).collect(),
        gaps,
    }
}

fn first_gaps(v: &RealField, count: usize) -> Result<Vec<f64>> {
    let lax = assemble_lax(&v.without_mean(), v.order())?;
    let spec = eigendecompose(&lax, &LaxConfig::default())?;
    let mut gaps = spec.gap_sequence()?;
    gaps.truncate(count);
    Ok(gaps)
}

/// `S(t, v0)` on the output grid of `spec`.
pub fn evolve_potential(v0: &RealField, spec: &FlowSpec) -> Result<Trajectory> {
    spec.validate()?;
    match spec.method {
        FlowMethod::Direct => direct_integrate(v0, spec),
        FlowMethod::Quadrature => quadrature_trajectory(v0, spec),
    }
}

fn quadrature_trajectory(v0: &RealField, spec: &FlowSpec) -> Result<Trajectory> {
    let order = spec.order.unwrap_or(v0.order());
    let c = v0.mean();
    let state = birkhoff_forward(v0, &spec.forward)?;
    if state.tail_action() > spec.forward.tol_tail {
        return Err(Error::NotFiniteGap { tail: state.tail_action(), tol: spec.forward.tol_tail });
    }
    let base = state.with_mean(0.0);
    let mut fields = Vec::with_capacity(spec.t_grid.len());
    let mut states = Vec::with_capacity(spec.t_grid.len());
    let mut diags = Vec::with_capacity(spec.t_grid.len());
    for &t in &spec.t_grid {
        let moved = quadrature_evolve(&base, t, 0.0);
        let u = reconstruct(&moved, order)?;
        let v = u.translated(-2.0 * c * t).with_mean(c);
        let gaps = moved.gamma().iter().take(spec.gap_count).copied().collect();
        diags.push(diagnostics(&v, t, spec, gaps));
        fields.push(v);
        states.push(moved.rotated(|n| -2.0 * c * t * n as f64).with_mean(c));
    }
    Ok(Trajectory {
        method: FlowMethod::Quadrature,
        times: spec.t_grid.clone(),
        fields,
        states: Some(states),
        diagnostics: diags,
        tail_action: state.tail_action(),
    })
}

/// Integrating-factor RK4 stepper on the modes `0..=K`.
pub struct DirectStepper {
    modes: usize,
    transform: GridTransform,
}

impl DirectStepper {
    /// The product grid has at least `3K + 1` points, so the quadratic term
    /// is alias-free on the retained band.
    pub fn new(modes: usize) -> Self {
        Self { modes, transform: GridTransform::new((3 * modes + 1).next_power_of_two()) }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `−∂x(v²)` on the retained band.
    fn nonlinear(&self, v: &[C64], out: &mut [C64]) {
        let mut buf = load_grid(&self.transform, v);
        self.transform.to_grid(&mut buf);
        for g in buf.iter_mut() {
            *g = C64::new(g.re * g.re, 0.0);
        }
        self.transform.to_modes(&mut buf);
        for (n, o) in out.iter_mut().enumerate() {
            *o = buf[n] * C64::new(0.0, -(n as f64));
        }
    }

    fn propagator(&self, h: f64) -> Vec<C64> {
        (0..=self.modes).map(|n| C64::from_polar(1.0, (n * n) as f64 * h)).collect()
    }

    /// Advance by `t` (either sign) in steps of at most `dt`.
    pub fn advance(&self, v: &mut [C64], t: f64, dt: f64) {
        if t == 0.0 {
            return;
        }
        let steps = (t.abs() / dt).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let full = self.propagator(h);
        let half = self.propagator(0.5 * h);
        let len = v.len();
        let (mut a, mut b, mut c, mut d) =
            (vec![C64::default(); len], vec![C64::default(); len], vec![C64::default(); len], vec![C64::default(); len]);
        let mut tmp = vec![C64::default(); len];
        for _ in 0..steps {
            self.nonlinear(v, &mut a);
            for i in 0..len {
                tmp[i] = half[i] * (v[i] + 0.5 * h * a[i]);
            }
            self.nonlinear(&tmp, &mut b);
            for i in 0..len {
                tmp[i] = half[i] * v[i] + 0.5 * h * b[i];
            }
            self.nonlinear(&tmp, &mut c);
            for i in 0..len {
                tmp[i] = full[i] * v[i] + h * half[i] * c[i];
            }
            self.nonlinear(&tmp, &mut d);
            for i in 0..len {
                v[i] = full[i] * v[i]
                    + (h / 6.0) * (full[i] * a[i] + 2.0 * half[i] * (b[i] + c[i]) + d[i]);
            }
            v[0].im = 0.0;
        }
    }
}

/// Pseudospectral integration of `v0` with outputs on the grid of `spec`.
pub fn direct_integrate(v0: &RealField, spec: &FlowSpec) -> Result<Trajectory> {
    spec.validate()?;
    let order = spec.order.unwrap_or(v0.order());
    let modes = ((spec.dealias * order as f64).floor() as usize).max(1);
    let value = spec.dt * (modes * modes) as f64;
    if value > STEP_LIMIT {
        return Err(Error::StepTooLarge { dt: spec.dt, modes, value, limit: STEP_LIMIT });
    }
    let stepper = DirectStepper::new(modes);
    let mut v: Vec<C64> = (0..=modes).map(|n| v0.coeff(n as i64)).collect();
    let mut now = 0.0;
    let mut fields = Vec::with_capacity(spec.t_grid.len());
    let mut diags = Vec::with_capacity(spec.t_grid.len());
    for &t in &spec.t_grid {
        stepper.advance(&mut v, t - now, spec.dt);
        now = t;
        let field = RealField::from_positive_modes(v[0].re, &v[1..]).resized(order);
        let norm = field.l2_norm();
        if !(norm <= BLOWUP_NORM) {
            return Err(Error::BlowupDetected { t, norm });
        }
        let gaps = if spec.gap_count > 0 { first_gaps(&field, spec.gap_count)? } else { Vec::new() };
        diags.push(diagnostics(&field, t, spec, gaps));
        fields.push(field);
    }
    Ok(Trajectory {
        method: FlowMethod::Direct,
        times: spec.t_grid.clone(),
        fields,
        states: None,
        diagnostics: diags,
        tail_action: 0.0,
    })
}

/// Distances between two trajectories on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryComparison {
    pub s: f64,
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    pub max_distance: f64,
    /// `max_n |γ_n(t) − γ_n(0)|` per time, when gaps were recorded.
    pub gap_drift_a: Vec<f64>,
    pub gap_drift_b: Vec<f64>,
}

fn gap_drift(traj: &Trajectory) -> Vec<f64> {
    let Some(first) = traj.diagnostics.first() else { return Vec::new() };
    if first.gaps.is_empty() {
        return Vec::new();
    }
    traj.diagnostics
        .iter()
        .map(|d| d.gaps.iter().zip(&first.gaps).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect()
}

pub fn compare_trajectories(a: &Trajectory, b: &Trajectory, s: SobolevIndex) -> Result<TrajectoryComparison> {
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::GridMismatch);
    }
    let distance: Vec<f64> = a.fields.iter().zip(&b.fields).map(|(x, y)| x.distance(y, s)).collect();
    Ok(TrajectoryComparison {
        s: s.0,
        times: a.times.clone(),
        max_distance: distance.iter().copied().fold(0.0, f64::max),
        distance,
        gap_drift_a: gap_drift(a),
        gap_drift_b: gap_drift(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::traveling_wave;

    #[test]
    fn energy_of_traveling_wave() {
        let u = traveling_wave(0.5, 128).unwrap();
        assert!((energy(&u) - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_identity_and_group() {
        let s = BirkhoffState::from_actions_angles(&[0.5, 0.25], &[0.3, 1.0], 0.0).unwrap();
        assert_eq!(quadrature_evolve(&s, 0.0, 0.0).zeta(), s.zeta());
        let ab = quadrature_evolve(&quadrature_evolve(&s, 0.7, 0.2), 1.1, 0.2);
        let direct = quadrature_evolve(&s, 1.8, 0.2);
        for (x, y) in ab.zeta().iter().zip(direct.zeta()) {
            assert!((x - y).norm() < 1e-15);
        }
        assert_eq!(ab.gamma(), s.gamma());
    }

    #[test]
    fn constant_data_stays_constant() {
        let v0 = RealField::constant(16, 0.8);
        for method in [FlowMethod::Quadrature, FlowMethod::Direct] {
            let traj = evolve_potential(&v0, &FlowSpec::uniform(0.5, 5, method)).unwrap();
            for f in &traj.fields {
                assert!(f.distance(&v0, SobolevIndex::L2) < 1e-15);
            }
        }
    }

    #[test]
    fn traveling_wave_quadrature() {
        let q = 0.5;
        let u = traveling_wave(q, 96).unwrap();
        let traj = evolve_potential(&u, &FlowSpec::uniform(10.0, 20, FlowMethod::Quadrature)).unwrap();
        let omega = (1.0 - 3.0 * q * q) / (1.0 - q * q);
        for (t, f) in traj.times.iter().zip(&traj.fields) {
            let exact = u.translated(omega * t);
            assert!(f.distance(&exact, SobolevIndex::L2) < 1e-9, "t = {t}");
            assert_eq!(f.mean(), 0.0);
        }
    }

    #[test]
    fn step_limit_enforced() {
        let u = traveling_wave(0.5, 128).unwrap();
        let mut spec = FlowSpec::uniform(1.0, 2, FlowMethod::Direct);
        spec.dt = 1e-3;
        assert!(matches!(direct_integrate(&u, &spec), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn grid_mismatch_detected() {
        let u = RealField::zeros(8);
        let a = evolve_potential(&u, &FlowSpec::uniform(1.0, 2, FlowMethod::Quadrature)).unwrap();
        let b = evolve_potential(&u, &FlowSpec::uniform(1.0, 3, FlowMethod::Quadrature)).unwrap();
        assert_eq!(compare_trajectories(&a, &b, SobolevIndex::L2).unwrap_err(), Error::GridMismatch);
        let same = compare_trajectories(&a, &a, SobolevIndex::L2).unwrap();
        assert_eq!(same.max_distance, 0.0);
    }
}
