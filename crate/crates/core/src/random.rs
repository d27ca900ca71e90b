//! Seeded fixtures. Every draw comes from a ChaCha stream keyed by
//! `(seed, stream)`, so fixtures are identical across platforms and do not
//! depend on how many other fixtures were drawn before them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::birkhoff::BirkhoffState;
use crate::error::{Error, Result};
use crate::spectral::{RealField, SobolevIndex, SobolevNorm};
use crate::C64;

pub fn fixture_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean-zero field with modes `1..=band`, `|û(n)| ≲ e^{−n/decay}`.
pub fn band_limited_field(rng: &mut impl Rng, order: usize, band: usize, decay: f64) -> Result<RealField> {
    if band == 0 || band > order || !(decay > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "band-limited field needs 0 < band <= order and decay > 0 (band = {band}, order = {order})"
        )));
    }
    let positive: Vec<C64> = (1..=order)
        .map(|n| {
            if n > band {
                return C64::new(0.0, 0.0);
            }
            let scale = (-(n as f64) / decay).exp();
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        })
        .collect();
    Ok(RealField::from_positive_modes(0.0, &positive))
}

/// Band-limited field rescaled to `‖w‖_s = norm` (zero for `norm = 0`).
pub fn perturbation(rng: &mut impl Rng, order: usize, band: usize, s: SobolevIndex, norm: f64) -> Result<RealField> {
    if !(norm >= 0.0) {
        return Err(Error::InvalidParameter(format!("perturbation size {norm} must be non-negative")));
    }
    let w = band_limited_field(rng, order, band, band as f64)?;
    if norm == 0.0 {
        return Ok(RealField::zeros(order));
    }
    Ok(w.scaled(norm / w.sobolev_norm(s)))
}

/// Gaps `1..=P` with `P` uniform in `1..=max_gaps`, actions uniform in
/// `[gamma_min, gamma_max]` and uniform phases.
pub fn finite_gap_state(rng: &mut impl Rng, max_gaps: usize, gamma_min: f64, gamma_max: f64) -> Result<BirkhoffState> {
    if max_gaps == 0 || !(gamma_min > 0.0 && gamma_max >= gamma_min) {
        return Err(Error::InvalidParameter("finite-gap fixture needs max_gaps > 0 and 0 < gamma_min <= gamma_max".into()));
    }
    let p = rng.gen_range(1..=max_gaps);
    let gamma: Vec<f64> = (0..p).map(|_| rng.gen_range(gamma_min..=gamma_max)).collect();
    let phi: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    BirkhoffState::from_actions_angles(&gamma, &phi, 0.0)
}

/// `count` finite-gap states, the `i`-th drawn from stream `i` of `seed`.
pub fn finite_gap_fixtures(seed: u64, count: usize, max_gaps: usize) -> Result<Vec<BirkhoffState>> {
    (0..count).map(|i| finite_gap_state(&mut fixture_rng(seed, i as u64), max_gaps, 0.1, 2.0)).collect()
}

/// `count` band-limited mean-zero fields, one stream each.
pub fn band_limited_fixtures(seed: u64, count: usize, order: usize, band: usize) -> Result<Vec<RealField>> {
    (0..count)
        .map(|i| band_limited_field(&mut fixture_rng(seed, i as u64), order, band, band as f64 / 2.0))
        .collect()
}
