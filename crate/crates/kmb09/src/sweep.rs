//! Grid sweeps over Evan's measurement basis, extrema location, and the
//! ITER-vs-QBER signature fit used to tell eavesdropping apart from
//! system errors.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Error;
use crate::protocol::{ProtocolSpec, SessionStats};
use crate::rates_kmb09::{kmb09_eta, kmb09_eta_evan, kmb09_iter, kmb09_qber, Kmb09Params};
use crate::rates_variant::{
    variant_eta, variant_eta_evan, variant_iter, variant_qber, VariantParams,
};

/// Sums of squares below this are treated as an exactly constant
/// response (pure round-off).
const VARIANCE_EPS: f64 = 1e-18;

/// Deviation scores at or below this are consistent with the fitted
/// eavesdropping line; calibrated over seeded Evan-only sessions (the
/// score is approximately a standard normal under eavesdropping, so 3
/// keeps ~99.7% of them on the line).
pub const SIGNATURE_THRESHOLD: f64 = 3.0;

/// One eavesdropper basis point with its analytic quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// Evan's polar angle (radians).
    pub theta3: f64,
    /// Evan's azimuthal angle (radians).
    pub phi3: f64,
    /// Index transmission error rate.
    pub iter: f64,
    /// Quantum bit error rate; `None` marks an undefined-rate sentinel
    /// (the point is kept so the grid size is preserved).
    pub qber: Option<f64>,
    /// Key-bit rate under eavesdropping.
    pub eta_evan: f64,
    /// Key-bit rate without eavesdropping (constant per sweep).
    pub eta: f64,
}

impl SweepRecord {
    /// Whether the QBER is defined at this point.
    pub fn is_valid(&self) -> bool {
        self.qber.is_some()
    }
}

/// Evaluates the analytic rates on the uniform grid
/// `theta3, phi3 in {2*pi*k/grid_n : k = 0..grid_n-1}`, row-major with
/// `theta3` outermost.
pub fn sweep_eve(spec: &ProtocolSpec, grid_n: u32) -> Result<Vec<SweepRecord>, Error> {
    if grid_n < 2 {
        return Err(Error::InvalidParameter(
            "sweep grid needs at least 2 points per axis",
        ));
    }
    let step = TAU / grid_n as f64;
    let mut records = Vec::with_capacity((grid_n as usize) * (grid_n as usize));
    match *spec {
        ProtocolSpec::Kmb09 { theta1 } => {
            let eta = kmb09_eta(theta1);
            for k_theta in 0..grid_n {
                let theta3 = step * k_theta as f64;
                for k_phi in 0..grid_n {
                    let phi3 = step * k_phi as f64;
                    let p = Kmb09Params::new(theta1, theta3, phi3)?;
                    let qber = match kmb09_qber(&p) {
                        Ok(v) => Some(v),
                        Err(Error::UndefinedRate(_)) => None,
                        Err(e) => return Err(e),
                    };
                    records.push(SweepRecord {
                        theta3,
                        phi3,
                        iter: kmb09_iter(&p),
                        qber,
                        eta_evan: kmb09_eta_evan(&p),
                        eta,
                    });
                }
            }
        }
        ProtocolSpec::Variant {
            theta1,
            theta2,
            phi2,
        } => {
            let eta = variant_eta(theta1, theta2, phi2);
            for k_theta in 0..grid_n {
                let theta3 = step * k_theta as f64;
                for k_phi in 0..grid_n {
                    let phi3 = step * k_phi as f64;
                    let p = VariantParams::new(theta1, theta2, phi2, theta3, phi3)?;
                    let qber = match variant_qber(&p) {
                        Ok(v) => Some(v),
                        Err(Error::UndefinedRate(_)) => None,
                        Err(e) => return Err(e),
                    };
                    records.push(SweepRecord {
                        theta3,
                        phi3,
                        iter: variant_iter(&p),
                        qber,
                        eta_evan: variant_eta_evan(&p),
                        eta,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Least-squares line through the (QBER, ITER) cloud plus the QBER
/// minimum and its co-located quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureFit {
    /// Slope of ITER as a linear function of QBER.
    pub slope: f64,
    /// Intercept of the fit.
    pub intercept: f64,
    /// Coefficient of determination in `[0, 1]`. A numerically constant
    /// ITER response is fit exactly by the zero-slope line and scores 1.
    pub r_squared: f64,
    /// Number of valid records entering the fit.
    pub n_points: usize,
    /// Smallest defined QBER over the records.
    pub qber_min: f64,
    /// `(theta3, phi3)` of the minimum; ties go to the
    /// lexicographically smallest pair.
    pub argmin: (f64, f64),
    /// ITER at the minimizing record.
    pub iter_at_min: f64,
    /// Eavesdropped key-bit rate at the minimizing record.
    pub eta_evan_at_min: f64,
}

/// Fits ITER against QBER over all valid records by ordinary least
/// squares and scans for the QBER minimum.
///
/// Sentinel (undefined-rate) records are skipped. Fails when fewer than
/// two valid records remain or the QBER has zero variance.
pub fn fit_signature(records: &[SweepRecord]) -> Result<SignatureFit, Error> {
    let mut n = 0usize;
    let mut sum_q = 0.0;
    let mut sum_i = 0.0;
    for r in records.iter().filter(|r| r.is_valid()) {
        n += 1;
        sum_q += r.qber.unwrap();
        sum_i += r.iter;
    }
    if n < 2 {
        return Err(Error::DegenerateFit("fewer than two valid records"));
    }
    let mean_q = sum_q / n as f64;
    let mean_i = sum_i / n as f64;

    let mut s_qq = 0.0;
    let mut s_qi = 0.0;
    let mut ss_tot = 0.0;
    for r in records.iter().filter(|r| r.is_valid()) {
        let dq = r.qber.unwrap() - mean_q;
        let di = r.iter - mean_i;
        s_qq += dq * dq;
        s_qi += dq * di;
        ss_tot += di * di;
    }
    if s_qq < VARIANCE_EPS {
        return Err(Error::DegenerateFit("zero variance in qber"));
    }
    let slope = s_qi / s_qq;
    let intercept = mean_i - slope * mean_q;

    let mut ss_res = 0.0;
    for r in records.iter().filter(|r| r.is_valid()) {
        let residual = r.iter - (slope * r.qber.unwrap() + intercept);
        ss_res += residual * residual;
    }
    let r_squared = if ss_tot < VARIANCE_EPS {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };

    let mut best: Option<&SweepRecord> = None;
    for r in records.iter().filter(|r| r.is_valid()) {
        let better = match best {
            None => true,
            Some(b) => {
                let (q, bq) = (r.qber.unwrap(), b.qber.unwrap());
                q < bq || (q == bq && (r.theta3, r.phi3) < (b.theta3, b.phi3))
            }
        };
        if better {
            best = Some(r);
        }
    }
    let best = best.expect("at least two valid records");

    Ok(SignatureFit {
        slope,
        intercept,
        r_squared,
        n_points: n,
        qber_min: best.qber.unwrap(),
        argmin: (best.theta3, best.phi3),
        iter_at_min: best.iter,
        eta_evan_at_min: best.eta_evan,
    })
}

/// How far a session's `(QBER, ITER)` pair sits off the fitted
/// eavesdropping line, in units of the combined standard error.
///
/// Plug-in standard errors vanish for zero-count estimates, so each is
/// floored at the estimator's resolution (`1/n`) before combining.
pub fn signature_deviation(observed: &SessionStats, fit: &SignatureFit) -> Result<f64, Error> {
    let iter = observed
        .est_iter
        .ok_or(Error::NoData("session produced no ITER estimate"))?;
    let qber = observed
        .est_qber
        .ok_or(Error::NoData("session produced no QBER estimate"))?;
    let se_iter = iter.std_error.max(1.0 / observed.same_basis_tested as f64);
    let se_qber = qber.std_error.max(1.0 / observed.tested_bits as f64);
    let combined = (se_iter * se_iter + (fit.slope * se_qber) * (fit.slope * se_qber)).sqrt();
    let predicted = fit.slope * qber.value + fit.intercept;
    Ok((iter.value - predicted).abs() / combined)
}

/// Classification of a deviation score against the calibrated
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Consistent with intercept-resend eavesdropping.
    OnLine,
    /// Off the eavesdropping line (e.g. system errors).
    OffLine,
}

impl Verdict {
    /// Name used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::OnLine => "ON-LINE",
            Verdict::OffLine => "OFF-LINE",
        }
    }
}

/// Applies [`SIGNATURE_THRESHOLD`] to a deviation score.
pub fn classify_deviation(score: f64) -> Verdict {
    if score <= SIGNATURE_THRESHOLD {
        Verdict::OnLine
    } else {
        Verdict::OffLine
    }
}
