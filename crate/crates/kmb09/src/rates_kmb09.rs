//! Closed-form KMB09 quantities under intercept-resend eavesdropping:
//! index transmission error rate, quantum bit error rate, and key-bit
//! efficiencies with and without the eavesdropper.
//!
//! Everything reduces to the two overlap probabilities
//! `x = |<g1|e1>|^2` and `y = |<g1|f1>|^2`, where `e`, `f` are Alice and
//! Bob's bases (polar separation `theta1`) and `g` is Evan's basis
//! (`theta3`, `phi3`).

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;
use crate::qstate::{basis_states, overlap_prob, reduce_angle};

/// Denominators smaller than this are treated as exactly degenerate.
const DEGENERACY_EPS: f64 = 1e-12;

/// Angles of a KMB09 configuration: Alice/Bob basis separation plus
/// Evan's measurement basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kmb09Params {
    /// Polar angle separating Alice/Bob's `f` basis from `e`.
    pub theta1: f64,
    /// Evan's polar angle.
    pub theta3: f64,
    /// Evan's azimuthal angle.
    pub phi3: f64,
}

impl Kmb09Params {
    /// Validates finiteness and reduces every angle to `[0, 2*pi)`.
    pub fn new(theta1: f64, theta3: f64, phi3: f64) -> Result<Self, Error> {
        for angle in [theta1, theta3, phi3] {
            if !angle.is_finite() {
                return Err(Error::InvalidAngle(angle));
            }
        }
        Ok(Self {
            theta1: reduce_angle(theta1),
            theta3: reduce_angle(theta3),
            phi3: reduce_angle(phi3),
        })
    }

    /// `(x, y)` = Evan's overlap probabilities with `e1` and `f1`.
    fn overlaps(&self) -> (f64, f64) {
        let (e1, _) = basis_states(0.0, 0.0);
        let (f1, _) = basis_states(self.theta1, 0.0);
        let (g1, _) = basis_states(self.theta3, self.phi3);
        (overlap_prob(&g1, &e1), overlap_prob(&g1, &f1))
    }
}

/// The four analytic quantities of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuartet {
    /// Index transmission error rate.
    pub iter: f64,
    /// Quantum bit error rate.
    pub qber: f64,
    /// Key bits per photon without eavesdropping; at most 1/2.
    pub eta: f64,
    /// Key bits per photon under intercept-resend eavesdropping.
    pub eta_evan: f64,
}

/// Index transmission error rate, `x + y - x^2 - y^2`.
pub fn kmb09_iter(p: &Kmb09Params) -> f64 {
    let (x, y) = p.overlaps();
    (x + y - x * x - y * y).clamp(0.0, 1.0)
}

/// Quantum bit error rate,
/// `(x + y - x^2 - y^2) / (2(x+y) - (x+y)^2)`.
///
/// The denominator vanishes only when Evan's basis coincides with both
/// `e` and `f` (or is orthogonal to both), which requires `e = f`; that
/// configuration is reported as [`Error::UndefinedRate`] rather than a
/// NaN.
pub fn kmb09_qber(p: &Kmb09Params) -> Result<f64, Error> {
    let (x, y) = p.overlaps();
    let s = x + y;
    let denominator = 2.0 * s - s * s;
    if denominator.abs() < DEGENERACY_EPS {
        return Err(Error::UndefinedRate(
            "QBER denominator vanishes (Evan's basis aligned with coincident e and f)",
        ));
    }
    Ok(((x + y - x * x - y * y) / denominator).clamp(0.0, 1.0))
}

/// Key-bit efficiency without eavesdropping, `sin^2(theta1/2) / 2`.
pub fn kmb09_eta(theta1: f64) -> f64 {
    let s = (theta1 / 2.0).sin();
    0.5 * s * s
}

/// Key-bit transmission rate under eavesdropping, `s - s^2/2` with
/// `s = x + y`.
pub fn kmb09_eta_evan(p: &Kmb09Params) -> f64 {
    let (x, y) = p.overlaps();
    let s = x + y;
    (s - s * s / 2.0).clamp(0.0, 1.0)
}

/// All four quantities at once.
pub fn kmb09_rates(p: &Kmb09Params) -> Result<RateQuartet, Error> {
    Ok(RateQuartet {
        iter: kmb09_iter(p),
        qber: kmb09_qber(p)?,
        eta: kmb09_eta(p.theta1),
        eta_evan: kmb09_eta_evan(p),
    })
}
