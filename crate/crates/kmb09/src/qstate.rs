//! Two-dimensional complex state vectors, angle-parametrized measurement
//! bases, overlap probabilities, and projective measurement sampling.
//!
//! A basis is generated from a polar angle `theta` and an azimuthal angle
//! `phi` as the orthonormal pair
//!
//! ```text
//! |b1> = ( cos(theta/2),  e^{i phi} sin(theta/2) )
//! |b2> = ( sin(theta/2), -e^{i phi} cos(theta/2) )
//! ```
//!
//! The global phase convention is fixed exactly as above (the second
//! vector carries `-e^{i phi} cos`); the pair is never re-phased, so
//! constructed amplitudes are bit-for-bit reproducible.

use core::f64::consts::TAU;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;

/// A two-dimensional complex unit vector (a qubit state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    /// Amplitude of the first canonical component.
    pub amp0: Complex64,
    /// Amplitude of the second canonical component.
    pub amp1: Complex64,
}

impl PureState {
    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// `|amp0|^2 + |amp1|^2`; 1 within 1e-12 for any state built here.
    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }
}

/// Which of the two orthogonal states within a basis a photon is
/// prepared or found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateIndex {
    /// Index 1.
    One,
    /// Index 2.
    Two,
}

impl StateIndex {
    /// The other index of the pair.
    pub fn other(self) -> StateIndex {
        match self {
            StateIndex::One => StateIndex::Two,
            StateIndex::Two => StateIndex::One,
        }
    }

    /// 1 or 2, for reports and traces.
    pub fn as_u8(self) -> u8 {
        match self {
            StateIndex::One => 1,
            StateIndex::Two => 2,
        }
    }
}

/// Name of a basis in the protocols: Alice/Bob use `E`, `F` (and `H` in
/// the three-basis variant); the eavesdropper measures in `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Alice/Bob's canonical basis.
    E,
    /// Alice/Bob's rotated basis at `theta1`.
    F,
    /// The variant's third basis at `(theta2, phi2)`.
    H,
    /// The eavesdropper's basis at `(theta3, phi3)`.
    G,
}

impl BasisLabel {
    /// Single-letter form used in trace files.
    pub fn as_str(self) -> &'static str {
        match self {
            BasisLabel::E => "E",
            BasisLabel::F => "F",
            BasisLabel::H => "H",
            BasisLabel::G => "G",
        }
    }
}

/// An orthonormal pair of [`PureState`]s together with the angles that
/// generated it.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    /// First basis state.
    pub state1: PureState,
    /// Second basis state, orthogonal to the first.
    pub state2: PureState,
    /// Generating polar angle, reduced to `[0, 2*pi)`.
    pub theta: f64,
    /// Generating azimuthal angle, reduced to `[0, 2*pi)`.
    pub phi: f64,
    /// Protocol role of this basis.
    pub label: BasisLabel,
}

impl MeasurementBasis {
    /// The state with the given index.
    pub fn state(&self, index: StateIndex) -> &PureState {
        match index {
            StateIndex::One => &self.state1,
            StateIndex::Two => &self.state2,
        }
    }
}

/// Reduces an angle to the canonical range `[0, 2*pi)`.
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// The orthonormal pair generated by `(theta, phi)`, with no validation.
pub(crate) fn basis_states(theta: f64, phi: f64) -> (PureState, PureState) {
    let (half_sin, half_cos) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let phase = Complex64::new(phi.cos(), phi.sin());
    let s1 = PureState {
        amp0: Complex64::new(half_cos, 0.0),
        amp1: phase * half_sin,
    };
    let s2 = PureState {
        amp0: Complex64::new(half_sin, 0.0),
        amp1: -phase * half_cos,
    };
    (s1, s2)
}

/// Builds the measurement basis generated by `(theta, phi)`.
///
/// Angles may be any finite value; they are reduced to `[0, 2*pi)`
/// before the states are evaluated. Non-finite input is rejected.
pub fn basis_from_angles(
    theta: f64,
    phi: f64,
    label: BasisLabel,
) -> Result<MeasurementBasis, Error> {
    if !theta.is_finite() {
        return Err(Error::InvalidAngle(theta));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidAngle(phi));
    }
    let theta = reduce_angle(theta);
    let phi = reduce_angle(phi);
    let (state1, state2) = basis_states(theta, phi);
    Ok(MeasurementBasis {
        state1,
        state2,
        theta,
        phi,
        label,
    })
}

/// `|<a|b>|^2`, clamped to `[0, 1]`.
///
/// Round-off can push the raw value marginally outside the unit
/// interval (by at most ~1e-12 for unit-norm inputs); the clamp restores
/// the probability contract relied on downstream.
pub fn overlap_prob(a: &PureState, b: &PureState) -> f64 {
    let p = a.inner(b).norm_sqr();
    debug_assert!(
        p > -1.0e-12 && p < 1.0 + 1.0e-12,
        "overlap {p} outside unit slack"
    );
    p.clamp(0.0, 1.0)
}

/// Projectively measures `state` in `basis`, deciding the outcome with
/// one uniform draw.
///
/// Returns [`StateIndex::One`] when `rand < overlap_prob(basis.state1,
/// state)` and [`StateIndex::Two`] otherwise; deterministic given
/// `rand`.
///
/// Panics if `rand` lies outside `[0, 1)` (caller contract violation).
pub fn born_sample(state: &PureState, basis: &MeasurementBasis, rand: f64) -> StateIndex {
    assert!(
        (0.0..1.0).contains(&rand),
        "born_sample draw {rand} outside [0, 1)"
    );
    if rand < overlap_prob(&basis.state1, state) {
        StateIndex::One
    } else {
        StateIndex::Two
    }
}
