use bo_core::birkhoff::{birkhoff_forward, BirkhoffConfig, BirkhoffState};
use bo_core::inverse::reconstruct;
use bo_core::probes::{normtrack, recurrence_probe, roundtrip_suite, stability_probe, NormTrackOptions, StabilityOptions};
use bo_core::spectral::{traveling_wave, SobolevIndex};
use std::f64::consts::PI;

#[test]
fn unperturbed_wave_tracks_itself() {
    let r = stability_probe(0.5, 0.0, SobolevIndex::L2, 50.0, &StabilityOptions::default()).unwrap();
    assert_eq!(r.sup_distance, 0.0);
    assert!(r.constant.is_none());
}

#[test]
fn small_perturbation_stays_close_to_orbit() {
    let opts = StabilityOptions { samples: 100, ..StabilityOptions::default() };
    let r = stability_probe(0.5, 1e-3, SobolevIndex::L2, 50.0, &opts).unwrap();
    let c = r.constant.unwrap();
    println!("stability constant {c}");
    assert!(c <= 10.0, "{c}");
    // initial distance cannot exceed the perturbation size
    assert!(r.distance[0] <= 1e-3 * (1.0 + 1e-9));

    let shifted = stability_probe(0.5, 1e-3, SobolevIndex::L2, 50.0, &StabilityOptions { shift: 0.9, ..opts }).unwrap();
    assert!((shifted.sup_distance - r.sup_distance).abs() < 1e-9 * r.sup_distance.max(1e-3));
}

#[test]
fn one_gap_period() {
    let state = birkhoff_forward(&traveling_wave(0.5, 128).unwrap(), &BirkhoffConfig::default()).unwrap();
    let r = recurrence_probe(&state, 0.0, 40.0, 1e-6, SobolevIndex::L2, 128).unwrap();
    assert!(!r.none_found);
    assert!((r.returns[0].t - 6.0 * PI).abs() < 1e-8, "{:?}", r.returns[0]);
    assert!((r.returns[1].t - 12.0 * PI).abs() < 1e-8);
    assert!(r.returns[0].distance < 1e-8);
}

#[test]
fn two_gap_integer_frequencies() {
    let state = BirkhoffState::from_actions_angles(&[1.0, 1.0], &[0.2, -0.7], 0.0).unwrap();
    let r = recurrence_probe(&state, 0.0, 10.0, 1e-6, SobolevIndex(1.0), 128).unwrap();
    assert_eq!(r.frequencies, vec![-3.0, -2.0]);
    let first = r.returns[0];
    assert!((first.t - 2.0 * PI).abs() < 1e-8, "{first:?}");
    assert!(first.distance < 1e-8);
}

#[test]
fn mean_shifts_the_return_time() {
    // ω − 2cn with c = 1/2 gives (−4, −4): period π/2
    let state = BirkhoffState::from_actions_angles(&[1.0, 1.0], &[0.0, 0.0], 0.5).unwrap();
    let r = recurrence_probe(&state, 0.5, 3.0, 1e-6, SobolevIndex::L2, 128).unwrap();
    assert!((r.returns[0].t - PI / 2.0).abs() < 1e-8, "{:?}", r.returns[0]);
    assert!(r.returns[0].distance < 1e-8);
}

#[test]
fn traveling_wave_norms_are_constant() {
    let u = traveling_wave(0.5, 128).unwrap();
    let s = [SobolevIndex(-0.5), SobolevIndex::L2, SobolevIndex(1.0)];
    let r = normtrack(&u, &s, 100.0, &NormTrackOptions::default()).unwrap();
    for series in &r.quadrature {
        assert!(series.sup - series.inf < 1e-12 * series.sup, "{}", series.s);
    }
}

#[test]
fn two_gap_norms_repeat_each_relative_period() {
    // ω = (−1/2, 2); the shape depends on φ_2 − 2φ_1, which turns at rate 3
    let state = BirkhoffState::from_actions_angles(&[0.5, 0.25], &[0.3, 1.1], 0.0).unwrap();
    let v0 = reconstruct(&state, 128).unwrap();
    let period = 2.0 * PI / 3.0;
    let per = 50;
    let laps = (100.0 / period).floor() as usize;
    let opts = NormTrackOptions { samples: per * laps, ..NormTrackOptions::default() };
    let long = normtrack(&v0, &[SobolevIndex(1.0)], period * laps as f64, &opts).unwrap();
    let one = normtrack(&v0, &[SobolevIndex(1.0)], period, &NormTrackOptions { samples: per, ..opts }).unwrap();
    let (a, b) = (&long.quadrature[0], &one.quadrature[0]);
    assert!((a.sup - b.sup).abs() < 1e-8, "{} vs {}", a.sup, b.sup);
    assert!(a.growth.abs() < 1e-8);
}

#[test]
fn direct_conserves_mean_and_l2() {
    let state = BirkhoffState::from_actions_angles(&[0.5, 0.25], &[0.3, 1.1], 0.0).unwrap();
    let v0 = reconstruct(&state, 128).unwrap().with_mean(0.2);
    let opts = NormTrackOptions { samples: 20, direct_t_max: Some(1.0), dt: 1e-4 };
    let r = normtrack(&v0, &[SobolevIndex(1.0)], 1.0, &opts).unwrap();
    let d = r.direct.unwrap();
    assert!(d.mean_drift < 1e-8 && d.l2_drift < 1e-8, "{d:?}");
}

#[test]
fn roundtrip_on_seeded_states() {
    let r = roundtrip_suite(7, 25, 4, 128).unwrap();
    println!("{} {}", r.max_action_error, r.max_potential_error);
    assert!(r.max_action_error < 1e-6);
    assert!(r.max_potential_error < 1e-6);
    assert_eq!(r, roundtrip_suite(7, 25, 4, 128).unwrap());
}
