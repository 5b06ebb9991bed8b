//! Sweep CSV and trace file formats.
//!
//! Sweep files carry the fixed header
//! `theta3_deg,phi3_deg,iter,qber,eta_evan,eta`, one row per grid point
//! in row-major order, every value printed with nine digits after the
//! decimal point; undefined QBER points are written as `nan` so the
//! grid size is preserved.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use kmb09::protocol::PhotonRecord;
use kmb09::sweep::SweepRecord;

/// The exact sweep CSV header.
pub const SWEEP_HEADER: &str = "theta3_deg,phi3_deg,iter,qber,eta_evan,eta";

/// Fixed nine-decimal formatting used for all reported values.
pub fn fmt9(value: f64) -> String {
    format!("{value:.9}")
}

/// Writes a sweep to `path`.
pub fn write_sweep(path: &Path, records: &[SweepRecord]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        let qber = match r.qber {
            Some(q) => fmt9(q),
            None => "nan".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt9(r.theta3.to_degrees()),
            fmt9(r.phi3.to_degrees()),
            fmt9(r.iter),
            qber,
            fmt9(r.eta_evan),
            fmt9(r.eta),
        )?;
    }
    out.flush()
}

/// Reads a sweep CSV back into records (degrees back to radians).
pub fn read_sweep(path: &Path) -> Result<Vec<SweepRecord>, String> {
    let file = File::open(path).map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| format!("{}: empty sweep file", path.display()))?
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if header.trim_end() != SWEEP_HEADER {
        return Err(format!(
            "{}: malformed sweep file (expected header `{SWEEP_HEADER}`)",
            path.display()
        ));
    }
    let mut records = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let line = line.map_err(|e| format!("{}: {e}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(format!(
                "{}: malformed sweep file (row {} has {} fields, expected 6)",
                path.display(),
                line_no + 2,
                fields.len()
            ));
        }
        let parse = |text: &str, what: &str| -> Result<f64, String> {
            text.trim().parse::<f64>().map_err(|_| {
                format!(
                    "{}: malformed sweep file (row {}: bad {what} `{text}`)",
                    path.display(),
                    line_no + 2
                )
            })
        };
        let qber_raw = parse(fields[3], "qber")?;
        records.push(SweepRecord {
            theta3: parse(fields[0], "theta3_deg")?.to_radians(),
            phi3: parse(fields[1], "phi3_deg")?.to_radians(),
            iter: parse(fields[2], "iter")?,
            qber: (!qber_raw.is_nan()).then_some(qber_raw),
            eta_evan: parse(fields[4], "eta_evan")?,
            eta: parse(fields[5], "eta")?,
        });
    }
    if records.is_empty() {
        return Err(format!("{}: sweep file has no records", path.display()));
    }
    Ok(records)
}

/// Writes the per-photon trace: one row per photon with `-` marking
/// fields that do not apply.
pub fn write_trace(path: &Path, records: &[PhotonRecord]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "photon_index,alice_basis,alice_index,eve_index,noise_applied,bob_basis,bob_index,set,outcome,decoded,intended"
    )?;
    for r in records {
        let eve = r
            .eve_index
            .map_or("-".to_string(), |i| i.as_u8().to_string());
        let set = r.announced_set.map_or("-", |s| s.as_str());
        let (decoded, intended) = match r.outcome {
            kmb09::protocol::Outcome::KeyBit { decoded, intended } => {
                (decoded.to_string(), intended.to_string())
            }
            _ => ("-".to_string(), "-".to_string()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.photon_index,
            r.alice_basis.as_str(),
            r.alice_index.as_u8(),
            eve,
            r.noise_applied,
            r.bob_basis.as_str(),
            r.bob_index.as_u8(),
            set,
            r.outcome.as_str(),
            decoded,
            intended,
        )?;
    }
    out.flush()
}
