#![allow(clippy::needless_range_loop)] // loops mirror the index-sum notation

//! Brute-force enumeration oracle for the closed-form rates.
//!
//! Walks the complete discrete event tree of one photon — Alice's 2n
//! preparations, Evan's two measurement outcomes, Bob's n bases and two
//! outcomes, and both set announcements — with exact probability
//! weights, applying the encoding/decoding tables inlined here rather
//! than the crate's sifting code. The resulting event-level ITER, QBER,
//! and key-bit rates must match the closed forms.

use kmb09::qstate::{basis_from_angles, overlap_prob, BasisLabel, MeasurementBasis, PureState};
use kmb09::rates_kmb09::{kmb09_eta, kmb09_eta_evan, kmb09_iter, kmb09_qber, Kmb09Params};
use kmb09::rates_variant::{variant_eta, variant_iter, variant_qb, variant_qber, VariantParams};

const TOL: f64 = 1e-9;

/// Independent copy of the pair-set encoding: sets {e,f}, {e,h}, {f,h};
/// within a set the first member encodes 0 and the second 1.
const SETS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];

fn set_encode(set: usize, member: usize) -> Option<u8> {
    let [zero, one] = SETS[set];
    if member == zero {
        Some(0)
    } else if member == one {
        Some(1)
    } else {
        None
    }
}

struct EventRates {
    iter: f64,
    qber: f64,
    key_rate: f64,
}

/// Exact probability bookkeeping over every prepare/intercept/measure
/// combination. `bases` holds e, f (and h for the variant).
fn enumerate(bases: &[MeasurementBasis], eve: Option<&MeasurementBasis>) -> EventRates {
    let n = bases.len();
    let variant = n == 3;
    let mut p_same_basis = 0.0;
    let mut p_same_basis_index_error = 0.0;
    let mut p_key = 0.0;
    let mut p_wrong = 0.0;

    for (a, alice_basis) in bases.iter().enumerate() {
        for alice_index in 0..2 {
            let p_prep = 1.0 / (2.0 * n as f64);
            let prepared = state_of(alice_basis, alice_index);
            let forwarded: Vec<(PureState, f64)> = match eve {
                None => vec![(*prepared, 1.0)],
                Some(g) => vec![
                    (g.state1, overlap_prob(&g.state1, prepared)),
                    (g.state2, overlap_prob(&g.state2, prepared)),
                ],
            };
            for (travelling, p_forward) in forwarded {
                for (b, bob_basis) in bases.iter().enumerate() {
                    let p_basis = 1.0 / n as f64;
                    for bob_index in 0..2 {
                        let p_measure = overlap_prob(state_of(bob_basis, bob_index), &travelling);
                        let p_event = p_prep * p_forward * p_basis * p_measure;
                        if p_event == 0.0 {
                            continue;
                        }
                        if a == b {
                            p_same_basis += p_event;
                            if alice_index != bob_index {
                                p_same_basis_index_error += p_event;
                            }
                        }
                        if alice_index == bob_index {
                            continue;
                        }
                        if !variant {
                            // two-basis decoding: bob's e means 1, f means 0;
                            // alice's e encodes 0, f encodes 1
                            let decoded = if b == 0 { 1 } else { 0 };
                            let intended = if a == 0 { 0 } else { 1 };
                            p_key += p_event;
                            if decoded != intended {
                                p_wrong += p_event;
                            }
                        } else {
                            for set in 0..3 {
                                if !SETS[set].contains(&b) {
                                    continue;
                                }
                                let p_announced = 0.5 * p_event;
                                let Some(intended) = set_encode(set, a) else {
                                    continue; // alice's basis outside the set: discarded
                                };
                                let other = if SETS[set][0] == b {
                                    SETS[set][1]
                                } else {
                                    SETS[set][0]
                                };
                                let decoded = set_encode(set, other).unwrap();
                                p_key += p_announced;
                                if decoded != intended {
                                    p_wrong += p_announced;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    EventRates {
        iter: p_same_basis_index_error / p_same_basis,
        qber: if p_key > 0.0 { p_wrong / p_key } else { 0.0 },
        key_rate: p_key,
    }
}

fn state_of(basis: &MeasurementBasis, index: usize) -> &PureState {
    if index == 0 {
        &basis.state1
    } else {
        &basis.state2
    }
}

fn kmb09_bases(theta1: f64) -> Vec<MeasurementBasis> {
    vec![
        basis_from_angles(0.0, 0.0, BasisLabel::E).unwrap(),
        basis_from_angles(theta1, 0.0, BasisLabel::F).unwrap(),
    ]
}

fn variant_bases(theta1: f64, theta2: f64, phi2: f64) -> Vec<MeasurementBasis> {
    vec![
        basis_from_angles(0.0, 0.0, BasisLabel::E).unwrap(),
        basis_from_angles(theta1, 0.0, BasisLabel::F).unwrap(),
        basis_from_angles(theta2, phi2, BasisLabel::H).unwrap(),
    ]
}

fn eve_basis(theta3: f64, phi3: f64) -> MeasurementBasis {
    basis_from_angles(theta3, phi3, BasisLabel::G).unwrap()
}

/// Deterministic spread of test angles (radians).
fn angle_samples() -> Vec<f64> {
    (0..7).map(|k| 0.37 + k as f64 * 0.83).collect()
}

#[test]
fn kmb09_reference_points_match_enumeration() {
    let bases = kmb09_bases(90f64.to_radians());
    let g = eve_basis(0.0, 0.0);
    let rates = enumerate(&bases, Some(&g));
    assert!((rates.iter - 0.25).abs() < TOL);
    assert!((rates.qber - 1.0 / 3.0).abs() < TOL);
    assert!((rates.key_rate - 0.375).abs() < TOL);

    let g = eve_basis(315f64.to_radians(), 0.0);
    let rates = enumerate(&bases, Some(&g));
    assert!((rates.iter - 0.25).abs() < TOL);
    assert!((rates.qber - 0.25).abs() < TOL);
    assert!((rates.key_rate - 0.5).abs() < TOL);
}

#[test]
fn kmb09_closed_forms_match_enumeration_across_angles() {
    for &theta1 in &angle_samples() {
        for &theta3 in &angle_samples() {
            for &phi3 in &[0.0, 1.1, 4.4] {
                let p = Kmb09Params::new(theta1, theta3, phi3).unwrap();
                let rates = enumerate(&kmb09_bases(theta1), Some(&eve_basis(theta3, phi3)));
                assert!(
                    (kmb09_iter(&p) - rates.iter).abs() < TOL,
                    "iter mismatch at ({theta1}, {theta3}, {phi3})"
                );
                assert!(
                    (kmb09_qber(&p).unwrap() - rates.qber).abs() < TOL,
                    "qber mismatch at ({theta1}, {theta3}, {phi3})"
                );
                assert!(
                    (kmb09_eta_evan(&p) - rates.key_rate).abs() < TOL,
                    "eta_evan mismatch at ({theta1}, {theta3}, {phi3})"
                );
            }
        }
    }
}

#[test]
fn kmb09_quiet_channel_matches_eta() {
    for &theta1 in &angle_samples() {
        let rates = enumerate(&kmb09_bases(theta1), None);
        assert!((rates.key_rate - kmb09_eta(theta1)).abs() < TOL);
        assert!(rates.iter.abs() < TOL);
        assert!(rates.qber.abs() < TOL);
    }
}

#[test]
fn variant_reference_point_matches_enumeration() {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let bases = variant_bases(half_pi, half_pi, half_pi);
    let rates = enumerate(&bases, Some(&eve_basis(0.0, 0.0)));
    assert!((rates.iter - 1.0 / 3.0).abs() < TOL);
    assert!((rates.key_rate - 2.5 / 9.0).abs() < TOL);
    assert!((rates.qber - 0.4).abs() < TOL);
}

#[test]
fn variant_closed_forms_match_enumeration_across_angles() {
    let triples = [
        (65.0, 65.0, 280.0),
        (90.0, 90.0, 90.0),
        (110.0, 225.0, 0.0),
        (33.0, 147.0, 58.0),
    ];
    for &(t1, t2, p2) in &triples {
        let (t1, t2, p2) = (rad(t1), rad(t2), rad(p2));
        for &theta3 in &angle_samples() {
            for &phi3 in &[0.0, 2.2, 5.0] {
                let p = VariantParams::new(t1, t2, p2, theta3, phi3).unwrap();
                let rates = enumerate(&variant_bases(t1, t2, p2), Some(&eve_basis(theta3, phi3)));
                assert!((variant_iter(&p) - rates.iter).abs() < TOL);
                assert!((variant_qb(&p) - rates.key_rate).abs() < TOL);
                assert!((variant_qber(&p).unwrap() - rates.qber).abs() < TOL);
            }
        }
    }
}

#[test]
fn variant_quiet_channel_matches_eta() {
    let triples = [(65.0, 65.0, 280.0), (90.0, 90.0, 90.0), (110.0, 225.0, 0.0)];
    for &(t1, t2, p2) in &triples {
        let (t1, t2, p2) = (rad(t1), rad(t2), rad(p2));
        let rates = enumerate(&variant_bases(t1, t2, p2), None);
        assert!((rates.key_rate - variant_eta(t1, t2, p2)).abs() < TOL);
        assert!(rates.iter.abs() < TOL);
        assert!(rates.qber.abs() < TOL);
    }
}

fn rad(deg: f64) -> f64 {
    deg.to_radians()
}
