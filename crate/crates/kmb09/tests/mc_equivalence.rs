//! Monte Carlo sessions against the analytic rates: empirical
//! frequencies must sit within three binomial standard deviations of
//! the closed forms.

use kmb09::protocol::{
    run_session, EveStrategy, NoiseSpec, ProtocolSpec, SessionConfig, SessionStats,
};
use kmb09::qstate::{basis_from_angles, born_sample, overlap_prob, BasisLabel, StateIndex};
use kmb09::rates_kmb09::{kmb09_eta, kmb09_rates, Kmb09Params};
use kmb09::rates_variant::{variant_eta, variant_rates, VariantParams};

/// Deterministic splitmix64 stream for driving born_sample directly.
struct Mix(u64);

impl Mix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn within_3_sigma(observed: f64, expected: f64, samples: u64) -> bool {
    let sigma = (expected * (1.0 - expected) / samples as f64).sqrt();
    (observed - expected).abs() <= 3.0 * sigma
}

#[test]
fn born_frequencies_match_the_overlap() {
    let e = basis_from_angles(0.0, 0.0, BasisLabel::E).unwrap();
    let f = basis_from_angles(90f64.to_radians(), 0.0, BasisLabel::F).unwrap();
    let mut mix = Mix(0xC0FFEE);
    let n = 1_000_000u64;
    let ones = (0..n)
        .filter(|_| born_sample(&e.state1, &f, mix.next_unit()) == StateIndex::One)
        .count();
    let frequency = ones as f64 / n as f64;
    assert!((frequency - 0.5).abs() < 0.002, "frequency {frequency}");

    // a skewed pair at smaller n, inside the 3 sigma band
    let g = basis_from_angles(1.0, 2.0, BasisLabel::G).unwrap();
    let p = overlap_prob(&g.state1, &e.state1);
    let n = 100_000u64;
    let ones = (0..n)
        .filter(|_| born_sample(&e.state1, &g, mix.next_unit()) == StateIndex::One)
        .count();
    assert!(within_3_sigma(ones as f64 / n as f64, p, n));
}

fn check_against(stats: &SessionStats, iter: f64, qber: f64, key_rate: f64) {
    let est_iter = stats.est_iter.expect("same-basis events were revealed");
    let est_qber = stats.est_qber.expect("key bits were tested");
    assert!(
        within_3_sigma(est_iter.value, iter, stats.same_basis_tested),
        "iter {} vs {} over {}",
        est_iter.value,
        iter,
        stats.same_basis_tested
    );
    assert!(
        within_3_sigma(est_qber.value, qber, stats.tested_bits),
        "qber {} vs {} over {}",
        est_qber.value,
        qber,
        stats.tested_bits
    );
    assert!(
        within_3_sigma(stats.est_efficiency.value, key_rate, stats.photons_sent),
        "efficiency {} vs {}",
        stats.est_efficiency.value,
        key_rate
    );
}

#[test]
fn quiet_kmb09_session_has_no_errors_and_quarter_efficiency() {
    let spec = ProtocolSpec::Kmb09 {
        theta1: 90f64.to_radians(),
    };
    let stats = run_session(
        &spec,
        &EveStrategy::Absent,
        &NoiseSpec::none(),
        SessionConfig::new(100_000, 0.2, 7).unwrap(),
    )
    .unwrap();
    assert_eq!(stats.est_qber.unwrap().value, 0.0);
    assert_eq!(stats.est_iter.unwrap().value, 0.0);
    assert!(within_3_sigma(stats.est_efficiency.value, 0.25, 100_000));
}

#[test]
fn eavesdropped_variant_session_matches_the_closed_forms() {
    let spec = ProtocolSpec::Variant {
        theta1: 90f64.to_radians(),
        theta2: 90f64.to_radians(),
        phi2: 90f64.to_radians(),
    };
    let stats = run_session(
        &spec,
        &EveStrategy::InterceptResend {
            theta3: 0.0,
            phi3: 0.0,
        },
        &NoiseSpec::none(),
        SessionConfig::new(100_000, 0.2, 7).unwrap(),
    )
    .unwrap();
    check_against(&stats, 1.0 / 3.0, 0.4, 2.5 / 9.0);
}

#[test]
fn eavesdropped_kmb09_sessions_match_across_a_grid() {
    for (k, &theta1_deg) in [54.0f64, 71.0, 90.0].iter().enumerate() {
        for (j, &(t3, p3)) in [(0.0f64, 0.0f64), (117.0, 45.0), (300.0, 200.0)]
            .iter()
            .enumerate()
        {
            let theta1 = theta1_deg.to_radians();
            let params = Kmb09Params::new(theta1, t3.to_radians(), p3.to_radians()).unwrap();
            let rates = kmb09_rates(&params).unwrap();
            let stats = run_session(
                &ProtocolSpec::Kmb09 { theta1 },
                &EveStrategy::InterceptResend {
                    theta3: t3.to_radians(),
                    phi3: p3.to_radians(),
                },
                &NoiseSpec::none(),
                SessionConfig::new(100_000, 0.2, (k * 10 + j) as u64).unwrap(),
            )
            .unwrap();
            check_against(&stats, rates.iter, rates.qber, rates.eta_evan);
        }
    }
}

#[test]
fn eavesdropped_variant_sessions_match_across_a_grid() {
    let triples = [(65.0f64, 65.0f64, 280.0f64), (110.0, 225.0, 0.0)];
    for (k, &(t1, t2, p2)) in triples.iter().enumerate() {
        for (j, &(t3, p3)) in [(30.0f64, 60.0f64), (222.0, 310.0)].iter().enumerate() {
            let (t1, t2, p2) = (t1.to_radians(), t2.to_radians(), p2.to_radians());
            let params = VariantParams::new(t1, t2, p2, t3.to_radians(), p3.to_radians()).unwrap();
            let rates = variant_rates(&params).unwrap();
            let stats = run_session(
                &ProtocolSpec::Variant {
                    theta1: t1,
                    theta2: t2,
                    phi2: p2,
                },
                &EveStrategy::InterceptResend {
                    theta3: t3.to_radians(),
                    phi3: p3.to_radians(),
                },
                &NoiseSpec::none(),
                SessionConfig::new(100_000, 0.2, (100 + k * 10 + j) as u64).unwrap(),
            )
            .unwrap();
            check_against(&stats, rates.iter, rates.qber, rates.qb);
        }
    }
}

#[test]
fn quiet_efficiencies_match_eta_for_both_protocols() {
    let theta1 = 54f64.to_radians();
    let stats = run_session(
        &ProtocolSpec::Kmb09 { theta1 },
        &EveStrategy::Absent,
        &NoiseSpec::none(),
        SessionConfig::new(100_000, 0.2, 31).unwrap(),
    )
    .unwrap();
    assert!(within_3_sigma(
        stats.est_efficiency.value,
        kmb09_eta(theta1),
        100_000
    ));

    let (t1, t2, p2) = (110f64.to_radians(), 225f64.to_radians(), 0f64.to_radians());
    let stats = run_session(
        &ProtocolSpec::Variant {
            theta1: t1,
            theta2: t2,
            phi2: p2,
        },
        &EveStrategy::Absent,
        &NoiseSpec::none(),
        SessionConfig::new(100_000, 0.2, 32).unwrap(),
    )
    .unwrap();
    assert!(within_3_sigma(
        stats.est_efficiency.value,
        variant_eta(t1, t2, p2),
        100_000
    ));
}

#[test]
fn noisy_quiet_session_shows_uncorrelated_drift() {
    // depolarizing noise alone: iter ~ p/2, qber ~ p/(1+p) at the
    // mutually unbiased triple
    let p = 0.05f64;
    let spec = ProtocolSpec::Variant {
        theta1: 90f64.to_radians(),
        theta2: 90f64.to_radians(),
        phi2: 90f64.to_radians(),
    };
    let stats = run_session(
        &spec,
        &EveStrategy::Absent,
        &NoiseSpec::new(p).unwrap(),
        SessionConfig::new(200_000, 0.2, 77).unwrap(),
    )
    .unwrap();
    let est_iter = stats.est_iter.unwrap().value;
    let est_qber = stats.est_qber.unwrap().value;
    assert!(within_3_sigma(est_iter, p / 2.0, stats.same_basis_tested));
    assert!(within_3_sigma(est_qber, p / (1.0 + p), stats.tested_bits));
}
