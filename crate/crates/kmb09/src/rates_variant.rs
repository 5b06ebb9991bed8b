//! Closed-form quantities for the three-basis variant: index
//! transmission error rate, key-bit probability, quantum bit error
//! rate, and efficiencies with and without eavesdropping.
//!
//! The third basis `h` (angles `theta2`, `phi2`) joins `e` and `f`; the
//! rates reduce to the three overlaps `x = |<g1|e1>|^2`,
//! `y = |<g1|f1>|^2`, `z = |<g1|h1>|^2` with Evan's basis `g`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;
use crate::qstate::{basis_states, overlap_prob, reduce_angle};

/// Key-bit probabilities at or below this are "no detected bits".
const NO_BITS_EPS: f64 = 1e-12;

/// Angles of a variant configuration: the three Alice/Bob bases plus
/// Evan's measurement basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantParams {
    /// Polar angle of the `f` basis.
    pub theta1: f64,
    /// Polar angle of the `h` basis.
    pub theta2: f64,
    /// Azimuthal angle of the `h` basis.
    pub phi2: f64,
    /// Evan's polar angle.
    pub theta3: f64,
    /// Evan's azimuthal angle.
    pub phi3: f64,
}

impl VariantParams {
    /// Validates finiteness and reduces every angle to `[0, 2*pi)`.
    pub fn new(theta1: f64, theta2: f64, phi2: f64, theta3: f64, phi3: f64) -> Result<Self, Error> {
        for angle in [theta1, theta2, phi2, theta3, phi3] {
            if !angle.is_finite() {
                return Err(Error::InvalidAngle(angle));
            }
        }
        Ok(Self {
            theta1: reduce_angle(theta1),
            theta2: reduce_angle(theta2),
            phi2: reduce_angle(phi2),
            theta3: reduce_angle(theta3),
            phi3: reduce_angle(phi3),
        })
    }

    /// `(x, y, z)` = Evan's overlap probabilities with `e1`, `f1`, `h1`.
    fn overlaps(&self) -> (f64, f64, f64) {
        let (e1, _) = basis_states(0.0, 0.0);
        let (f1, _) = basis_states(self.theta1, 0.0);
        let (h1, _) = basis_states(self.theta2, self.phi2);
        let (g1, _) = basis_states(self.theta3, self.phi3);
        (
            overlap_prob(&g1, &e1),
            overlap_prob(&g1, &f1),
            overlap_prob(&g1, &h1),
        )
    }
}

/// The analytic quantities of one variant configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantRates {
    /// Index transmission error rate.
    pub iter: f64,
    /// Key-bit probability per photon under eavesdropping (equals the
    /// eavesdropped efficiency).
    pub qb: f64,
    /// Quantum bit error rate, `iter / (3 qb)`.
    pub qber: f64,
    /// Key bits per photon without eavesdropping; at most 1/4.
    pub eta: f64,
}

/// Index transmission error rate,
/// `(2/3)(x + y + z - x^2 - y^2 - z^2)`.
pub fn variant_iter(p: &VariantParams) -> f64 {
    let (x, y, z) = p.overlaps();
    ((2.0 / 3.0) * (x + y + z - x * x - y * y - z * z)).clamp(0.0, 1.0)
}

/// Probability of obtaining a key bit per transmitted photon,
/// `(4/9)(x+y+z) - (2/9)(x^2+y^2+z^2 + xy + xz + yz)`.
pub fn variant_qb(p: &VariantParams) -> f64 {
    let (x, y, z) = p.overlaps();
    let linear = x + y + z;
    let quadratic = x * x + y * y + z * z + x * y + x * z + y * z;
    ((4.0 / 9.0) * linear - (2.0 / 9.0) * quadratic).clamp(0.0, 1.0)
}

/// Quantum bit error rate, `variant_iter / (3 variant_qb)`.
///
/// With no detected bits (`qb` at round-off scale, i.e. all bases
/// coincident) there is nothing to be wrong about and the rate is
/// reported as [`Error::UndefinedRate`].
pub fn variant_qber(p: &VariantParams) -> Result<f64, Error> {
    let qb = variant_qb(p);
    if qb <= NO_BITS_EPS {
        return Err(Error::UndefinedRate(
            "no detected bits (all bases coincident)",
        ));
    }
    Ok((variant_iter(p) / (3.0 * qb)).clamp(0.0, 1.0))
}

/// Key-bit efficiency without eavesdropping,
/// `1/6 - (cos t1 + cos t2 + cos t1 cos t2 + cos p2 sin t1 sin t2)/18`.
pub fn variant_eta(theta1: f64, theta2: f64, phi2: f64) -> f64 {
    let bracket = theta1.cos()
        + theta2.cos()
        + theta1.cos() * theta2.cos()
        + phi2.cos() * theta1.sin() * theta2.sin();
    (1.0 / 6.0 - bracket / 18.0).clamp(0.0, 1.0)
}

/// Key-bit transmission rate under eavesdropping; identical to
/// [`variant_qb`].
pub fn variant_eta_evan(p: &VariantParams) -> f64 {
    variant_qb(p)
}

/// All quantities at once.
pub fn variant_rates(p: &VariantParams) -> Result<VariantRates, Error> {
    Ok(VariantRates {
        iter: variant_iter(p),
        qb: variant_qb(p),
        qber: variant_qber(p)?,
        eta: variant_eta(p.theta1, p.theta2, p.phi2),
    })
}
