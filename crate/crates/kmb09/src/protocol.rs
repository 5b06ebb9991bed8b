//! Event-level Monte Carlo simulation of full protocol sessions:
//! photon preparation, optional intercept-resend eavesdropping,
//! optional channel noise, Bob's measurement, the classical
//! announcements, sifting, and rate estimation from revealed test
//! samples.
//!
//! # Determinism
//!
//! Every per-photon draw comes from a counter-based stream keyed by
//! `(session seed, photon index)`: each photon owns one ChaCha8 stream
//! and consumes its draws in a fixed slot order (Alice basis, Alice
//! index, Evan measurement, Bob basis, Bob measurement, noise trigger
//! and replacement, set announcement, test reveal). Results are
//! therefore identical no matter how a session is partitioned across
//! workers, and a session can be reproduced photon-by-photon from its
//! seed alone.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;
use crate::qstate::{basis_from_angles, born_sample, BasisLabel, MeasurementBasis, StateIndex};

/// Which protocol a session runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Two bases `e`, `f`.
    Kmb09,
    /// Three bases `e`, `f`, `h` with set announcements.
    Variant,
}

/// Protocol selection plus the Alice/Bob basis angles (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolSpec {
    /// Two-basis protocol; `e` is canonical, `f` sits at `theta1`.
    Kmb09 {
        /// Polar separation of the `f` basis.
        theta1: f64,
    },
    /// Three-basis variant with `h` at `(theta2, phi2)`.
    Variant {
        /// Polar separation of the `f` basis.
        theta1: f64,
        /// Polar angle of the `h` basis.
        theta2: f64,
        /// Azimuthal angle of the `h` basis.
        phi2: f64,
    },
}

impl ProtocolSpec {
    /// Which protocol this spec describes.
    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolSpec::Kmb09 { .. } => ProtocolKind::Kmb09,
            ProtocolSpec::Variant { .. } => ProtocolKind::Variant,
        }
    }

    /// The prepared/measured bases, in announcement order `e`, `f`(, `h`).
    pub fn bases(&self) -> Result<Vec<MeasurementBasis>, Error> {
        match *self {
            ProtocolSpec::Kmb09 { theta1 } => Ok([
                basis_from_angles(0.0, 0.0, BasisLabel::E)?,
                basis_from_angles(theta1, 0.0, BasisLabel::F)?,
            ]
            .into()),
            ProtocolSpec::Variant {
                theta1,
                theta2,
                phi2,
            } => Ok([
                basis_from_angles(0.0, 0.0, BasisLabel::E)?,
                basis_from_angles(theta1, 0.0, BasisLabel::F)?,
                basis_from_angles(theta2, phi2, BasisLabel::H)?,
            ]
            .into()),
        }
    }
}

/// The eavesdropper's behaviour for a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveStrategy {
    /// No eavesdropper on the line.
    Absent,
    /// Evan measures every photon in the `g` basis at `(theta3, phi3)`
    /// and forwards the collapsed state to Bob.
    InterceptResend {
        /// Evan's polar angle.
        theta3: f64,
        /// Evan's azimuthal angle.
        phi3: f64,
    },
}

/// Per-photon depolarizing channel noise: with probability `flip_prob`,
/// Bob's measured index is replaced by a uniform draw over the two
/// indices, independent of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Probability of replacing Bob's outcome.
    pub flip_prob: f64,
}

impl NoiseSpec {
    /// A noiseless channel.
    pub fn none() -> Self {
        Self { flip_prob: 0.0 }
    }

    /// Validates that `flip_prob` is a probability.
    pub fn new(flip_prob: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&flip_prob) {
            return Err(Error::InvalidParameter(
                "noise probability must lie in [0, 1]",
            ));
        }
        Ok(Self { flip_prob })
    }
}

/// One of the three two-element basis sets announced by Bob in the
/// variant protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetId {
    /// `{e, f}`
    S1,
    /// `{e, h}`
    S2,
    /// `{f, h}`
    S3,
}

impl SetId {
    /// The two member bases of this set.
    pub fn members(self) -> [BasisLabel; 2] {
        match self {
            SetId::S1 => [BasisLabel::E, BasisLabel::F],
            SetId::S2 => [BasisLabel::E, BasisLabel::H],
            SetId::S3 => [BasisLabel::F, BasisLabel::H],
        }
    }

    /// Whether `label` belongs to this set.
    pub fn contains(self, label: BasisLabel) -> bool {
        let [a, b] = self.members();
        label == a || label == b
    }

    /// The key bit a member basis encodes within this set. One member
    /// encodes 0 and the other 1; non-members encode nothing.
    pub fn encode(self, label: BasisLabel) -> Option<u8> {
        match (self, label) {
            (SetId::S1, BasisLabel::E) => Some(0),
            (SetId::S1, BasisLabel::F) => Some(1),
            (SetId::S2, BasisLabel::E) => Some(0),
            (SetId::S2, BasisLabel::H) => Some(1),
            (SetId::S3, BasisLabel::F) => Some(0),
            (SetId::S3, BasisLabel::H) => Some(1),
            _ => None,
        }
    }

    /// The two sets containing `label`, in ascending set order.
    pub fn containing(label: BasisLabel) -> [SetId; 2] {
        match label {
            BasisLabel::E => [SetId::S1, SetId::S2],
            BasisLabel::F => [SetId::S1, SetId::S3],
            BasisLabel::H => [SetId::S2, SetId::S3],
            BasisLabel::G => unreachable!("the eavesdropper's basis belongs to no set"),
        }
    }

    /// The member that is not `label`.
    pub fn other_member(self, label: BasisLabel) -> BasisLabel {
        let [a, b] = self.members();
        if label == a {
            b
        } else {
            a
        }
    }

    /// Name used in traces and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            SetId::S1 => "S1",
            SetId::S2 => "S2",
            SetId::S3 => "S3",
        }
    }
}

/// What one photon contributed after sifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Same index on both ends; no bit.
    NoBit,
    /// A key bit: what Bob decoded and what Alice intended.
    KeyBit {
        /// Bob's decoded bit value.
        decoded: u8,
        /// Alice's intended bit value.
        intended: u8,
    },
    /// Indices differed but Bob's announced set missed Alice's basis.
    DiscardedSetMiss,
}

impl Outcome {
    /// Whether a key bit was obtained.
    pub fn is_key_bit(&self) -> bool {
        matches!(self, Outcome::KeyBit { .. })
    }

    /// Name used in traces.
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::NoBit => "NO_BIT",
            Outcome::KeyBit { .. } => "KEY_BIT",
            Outcome::DiscardedSetMiss => "DISCARDED_SET_MISS",
        }
    }
}

/// KMB09 sifting: a key bit is obtained exactly when the indices
/// differ; Bob decodes 1 from an `e` measurement and 0 from `f`, while
/// Alice's own basis encodes `e` as 0 and `f` as 1.
pub fn sift_kmb09(
    alice_basis: BasisLabel,
    alice_index: StateIndex,
    bob_basis: BasisLabel,
    bob_index: StateIndex,
) -> Outcome {
    debug_assert!(matches!(alice_basis, BasisLabel::E | BasisLabel::F));
    debug_assert!(matches!(bob_basis, BasisLabel::E | BasisLabel::F));
    if alice_index == bob_index {
        return Outcome::NoBit;
    }
    let decoded = if bob_basis == BasisLabel::E { 1 } else { 0 };
    let intended = if alice_basis == BasisLabel::E { 0 } else { 1 };
    Outcome::KeyBit { decoded, intended }
}

/// Variant sifting: on differing indices Bob announces one of the two
/// sets containing his basis (`set_draw` picks between them in
/// ascending set order); the photon is discarded if Alice's basis is
/// outside the set, otherwise Bob decodes the bit of the set member he
/// did not measure in and Alice's intended bit is her own basis's
/// encoding in that set.
pub fn sift_variant(
    alice_basis: BasisLabel,
    alice_index: StateIndex,
    bob_basis: BasisLabel,
    bob_index: StateIndex,
    set_draw: bool,
) -> (Outcome, Option<SetId>) {
    if alice_index == bob_index {
        return (Outcome::NoBit, None);
    }
    let set = SetId::containing(bob_basis)[usize::from(set_draw)];
    if !set.contains(alice_basis) {
        return (Outcome::DiscardedSetMiss, Some(set));
    }
    let decoded = set
        .encode(set.other_member(bob_basis))
        .expect("both set members encode a bit");
    let intended = set
        .encode(alice_basis)
        .expect("alice's basis is in the set");
    (Outcome::KeyBit { decoded, intended }, Some(set))
}

/// Everything observed about one transmitted photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRecord {
    /// Position in the session's photon sequence.
    pub photon_index: u64,
    /// Basis Alice prepared in.
    pub alice_basis: BasisLabel,
    /// Index Alice prepared.
    pub alice_index: StateIndex,
    /// Evan's measured index, when intercepting.
    pub eve_index: Option<StateIndex>,
    /// Whether channel noise replaced Bob's outcome.
    pub noise_applied: bool,
    /// Basis Bob measured in.
    pub bob_basis: BasisLabel,
    /// Index Bob obtained.
    pub bob_index: StateIndex,
    /// Set announced by Bob (variant, differing indices only).
    pub announced_set: Option<SetId>,
    /// Sifting result.
    pub outcome: Outcome,
}

/// A photon record plus whether it fell into the revealed test sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonEvent {
    /// The photon's record.
    pub record: PhotonRecord,
    /// Whether this photon is part of the openly compared sample.
    pub revealed: bool,
}

/// Session size, test fraction, and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    /// Number of photons Alice sends.
    pub n_photons: u64,
    /// Probability that a photon's data is revealed for rate
    /// estimation.
    pub test_fraction: f64,
    /// Session seed; fixes every draw.
    pub seed: u64,
}

impl SessionConfig {
    /// Validates the photon count and test fraction.
    pub fn new(n_photons: u64, test_fraction: f64, seed: u64) -> Result<Self, Error> {
        if n_photons == 0 {
            return Err(Error::InvalidParameter("session needs at least one photon"));
        }
        if !test_fraction.is_finite() || test_fraction <= 0.0 || test_fraction > 1.0 {
            return Err(Error::InvalidParameter("test fraction must lie in (0, 1]"));
        }
        Ok(Self {
            n_photons,
            test_fraction,
            seed,
        })
    }
}

/// A value estimated from revealed counts, with its plug-in binomial
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// The estimated probability.
    pub value: f64,
    /// `sqrt(value * (1 - value) / samples)`.
    pub std_error: f64,
}

/// Counts and estimated rates from one simulated session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionStats {
    /// Photons Alice sent.
    pub photons_sent: u64,
    /// Key bits obtained (before removing tested bits).
    pub key_bits: u64,
    /// Revealed key bits.
    pub tested_bits: u64,
    /// Revealed key bits where Bob's decoded bit differed from Alice's.
    pub wrong_test_bits: u64,
    /// Revealed photons where both parties used the same basis.
    pub same_basis_tested: u64,
    /// Revealed same-basis photons with differing indices.
    pub index_errors_same_basis: u64,
    /// QBER estimate; absent when no bits were tested.
    pub est_qber: Option<Estimate>,
    /// ITER estimate; absent when no same-basis photons were revealed.
    pub est_iter: Option<Estimate>,
    /// Key bits per photon.
    pub est_efficiency: Estimate,
    /// Seed the session ran with.
    pub seed: u64,
}

impl SessionStats {
    /// Key bits remaining after the tested ones are discarded.
    pub fn final_key_bits(&self) -> u64 {
        self.key_bits - self.tested_bits
    }
}

/// Order-independent accumulator of per-photon contributions; merging
/// two tallies is plain addition, so a session may be partitioned
/// photon-wise across any number of workers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionTally {
    /// Photons recorded.
    pub photons: u64,
    /// Key-bit outcomes.
    pub key_bits: u64,
    /// Revealed key bits.
    pub tested_bits: u64,
    /// Revealed key bits with decoded != intended.
    pub wrong_test_bits: u64,
    /// Revealed same-basis photons.
    pub same_basis_tested: u64,
    /// Revealed same-basis photons with differing indices.
    pub index_errors_same_basis: u64,
}

impl SessionTally {
    /// Folds one photon into the tally.
    pub fn record(&mut self, event: &PhotonEvent) {
        self.photons += 1;
        let r = &event.record;
        if r.outcome.is_key_bit() {
            self.key_bits += 1;
        }
        if event.revealed {
            if let Outcome::KeyBit { decoded, intended } = r.outcome {
                self.tested_bits += 1;
                if decoded != intended {
                    self.wrong_test_bits += 1;
                }
            }
            if r.alice_basis == r.bob_basis {
                self.same_basis_tested += 1;
                if r.alice_index != r.bob_index {
                    self.index_errors_same_basis += 1;
                }
            }
        }
    }

    /// Adds another tally's counts into this one.
    pub fn merge(&mut self, other: &SessionTally) {
        self.photons += other.photons;
        self.key_bits += other.key_bits;
        self.tested_bits += other.tested_bits;
        self.wrong_test_bits += other.wrong_test_bits;
        self.same_basis_tested += other.same_basis_tested;
        self.index_errors_same_basis += other.index_errors_same_basis;
    }

    /// Turns counts into estimates.
    pub fn finalize(&self, seed: u64) -> SessionStats {
        fn ratio(numerator: u64, denominator: u64) -> Option<Estimate> {
            (denominator > 0).then(|| {
                let value = numerator as f64 / denominator as f64;
                Estimate {
                    value,
                    std_error: (value * (1.0 - value) / denominator as f64).sqrt(),
                }
            })
        }
        SessionStats {
            photons_sent: self.photons,
            key_bits: self.key_bits,
            tested_bits: self.tested_bits,
            wrong_test_bits: self.wrong_test_bits,
            same_basis_tested: self.same_basis_tested,
            index_errors_same_basis: self.index_errors_same_basis,
            est_qber: ratio(self.wrong_test_bits, self.tested_bits),
            est_iter: ratio(self.index_errors_same_basis, self.same_basis_tested),
            est_efficiency: ratio(self.key_bits, self.photons)
                .expect("a session records at least one photon"),
            seed,
        }
    }
}

/// One photon's private ChaCha8 draw stream.
struct PhotonDraws {
    rng: ChaCha8Rng,
}

impl PhotonDraws {
    fn new(seed: u64, photon_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(photon_index);
        Self { rng }
    }

    /// Uniform draw in `[0, 1)`.
    fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn uniform_choice(unit: f64, n: usize) -> usize {
    ((unit * n as f64) as usize).min(n - 1)
}

fn index_from(unit: f64) -> StateIndex {
    if unit < 0.5 {
        StateIndex::One
    } else {
        StateIndex::Two
    }
}

/// A fully prepared session that evaluates photons by index.
///
/// `simulate_photon` is a pure function of `(seed, photon_index)`, so
/// external drivers may evaluate disjoint index ranges concurrently and
/// merge the tallies.
pub struct SessionEngine {
    kind: ProtocolKind,
    bases: Vec<MeasurementBasis>,
    eve_basis: Option<MeasurementBasis>,
    flip_prob: f64,
    config: SessionConfig,
}

impl SessionEngine {
    /// Builds the bases and validates all inputs.
    pub fn new(
        spec: &ProtocolSpec,
        eve: &EveStrategy,
        noise: &NoiseSpec,
        config: SessionConfig,
    ) -> Result<Self, Error> {
        let bases = spec.bases()?;
        let eve_basis = match *eve {
            EveStrategy::Absent => None,
            EveStrategy::InterceptResend { theta3, phi3 } => {
                Some(basis_from_angles(theta3, phi3, BasisLabel::G)?)
            }
        };
        let noise = NoiseSpec::new(noise.flip_prob)?;
        Ok(Self {
            kind: spec.kind(),
            bases,
            eve_basis,
            flip_prob: noise.flip_prob,
            config,
        })
    }

    /// Number of photons this session sends.
    pub fn n_photons(&self) -> u64 {
        self.config.n_photons
    }

    /// The session seed.
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    /// Which protocol runs.
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    /// Simulates one photon end to end.
    pub fn simulate_photon(&self, photon_index: u64) -> PhotonEvent {
        let mut draws = PhotonDraws::new(self.config.seed, photon_index);
        let n = self.bases.len();

        let alice_basis = &self.bases[uniform_choice(draws.next_unit(), n)];
        let alice_index = index_from(draws.next_unit());
        let mut state = *alice_basis.state(alice_index);

        let eve_index = self.eve_basis.as_ref().map(|g| {
            let measured = born_sample(&state, g, draws.next_unit());
            // Evan forwards the photon in the collapsed state he found
            state = *g.state(measured);
            measured
        });

        let bob_basis = &self.bases[uniform_choice(draws.next_unit(), n)];
        let mut bob_index = born_sample(&state, bob_basis, draws.next_unit());

        let mut noise_applied = false;
        if self.flip_prob > 0.0 && draws.next_unit() < self.flip_prob {
            noise_applied = true;
            bob_index = index_from(draws.next_unit());
        }

        let (outcome, announced_set) = match self.kind {
            ProtocolKind::Kmb09 => (
                sift_kmb09(alice_basis.label, alice_index, bob_basis.label, bob_index),
                None,
            ),
            ProtocolKind::Variant => {
                if alice_index == bob_index {
                    (Outcome::NoBit, None)
                } else {
                    let set_draw = draws.next_unit() < 0.5;
                    sift_variant(
                        alice_basis.label,
                        alice_index,
                        bob_basis.label,
                        bob_index,
                        set_draw,
                    )
                }
            }
        };

        let revealed = draws.next_unit() < self.config.test_fraction;

        PhotonEvent {
            record: PhotonRecord {
                photon_index,
                alice_basis: alice_basis.label,
                alice_index,
                eve_index,
                noise_applied,
                bob_basis: bob_basis.label,
                bob_index,
                announced_set,
                outcome,
            },
            revealed,
        }
    }
}

/// Runs a full session and returns its statistics.
pub fn run_session(
    spec: &ProtocolSpec,
    eve: &EveStrategy,
    noise: &NoiseSpec,
    config: SessionConfig,
) -> Result<SessionStats, Error> {
    let engine = SessionEngine::new(spec, eve, noise, config)?;
    let mut tally = SessionTally::default();
    for index in 0..engine.n_photons() {
        tally.record(&engine.simulate_photon(index));
    }
    Ok(tally.finalize(engine.seed()))
}

/// Runs a full session keeping the per-photon trace.
pub fn run_session_traced(
    spec: &ProtocolSpec,
    eve: &EveStrategy,
    noise: &NoiseSpec,
    config: SessionConfig,
) -> Result<(SessionStats, Vec<PhotonRecord>), Error> {
    let engine = SessionEngine::new(spec, eve, noise, config)?;
    let mut tally = SessionTally::default();
    let mut trace = Vec::with_capacity(engine.n_photons() as usize);
    for index in 0..engine.n_photons() {
        let event = engine.simulate_photon(index);
        tally.record(&event);
        trace.push(event.record);
    }
    Ok((tally.finalize(engine.seed()), trace))
}

/// One piece of classical information disclosed during a photon's
/// handling, in protocol order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Announcement {
    /// Alice announces the prepared state's index.
    AliceIndex(StateIndex),
    /// Bob announces that his index differed (variant).
    BobIndexDiffers,
    /// Bob announces a set containing his measurement basis.
    BobSet(SetId),
    /// Alice answers whether her basis lies in the announced set.
    AliceBasisInSet(bool),
    /// Test sample only: Alice discloses her basis.
    RevealBasis(BasisLabel),
    /// Test sample only: both disclose the key bit.
    RevealBit {
        /// Bob's decoded value.
        decoded: u8,
        /// Alice's intended value.
        intended: u8,
    },
}

/// Reconstructs the ordered classical transcript of one photon.
///
/// Alice's basis never appears before the set exchange concludes, and
/// the only announcement carrying a state index is her step-four index
/// disclosure.
pub fn transcript(kind: ProtocolKind, event: &PhotonEvent) -> Vec<Announcement> {
    let r = &event.record;
    let mut out = Vec::new();
    out.push(Announcement::AliceIndex(r.alice_index));
    if kind == ProtocolKind::Variant && r.alice_index != r.bob_index {
        out.push(Announcement::BobIndexDiffers);
        if let Some(set) = r.announced_set {
            out.push(Announcement::BobSet(set));
            out.push(Announcement::AliceBasisInSet(set.contains(r.alice_basis)));
        }
    }
    if event.revealed {
        out.push(Announcement::RevealBasis(r.alice_basis));
        if let Outcome::KeyBit { decoded, intended } = r.outcome {
            out.push(Announcement::RevealBit { decoded, intended });
        }
    }
    out
}
