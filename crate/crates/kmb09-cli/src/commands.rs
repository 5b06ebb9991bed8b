//! The four subcommands: rate queries, sweeps, sessions, and signature
//! verdicts. Values are printed as `name value` lines with fixed
//! nine-decimal formatting so repeated runs diff cleanly.

use std::path::Path;

use kmb09::protocol::{
    EveStrategy, NoiseSpec, ProtocolSpec, SessionConfig, SessionEngine, SessionStats,
};
use kmb09::rates_kmb09::{kmb09_eta, kmb09_rates, Kmb09Params};
use kmb09::rates_variant::{variant_eta, variant_rates, VariantParams};
use kmb09::sweep::{
    classify_deviation, fit_signature, signature_deviation, sweep_eve, SignatureFit, SweepRecord,
    SIGNATURE_THRESHOLD,
};
use kmb09::Error;

use crate::io::{fmt9, read_sweep, write_sweep, write_trace};
use crate::runner::run_partitioned;
use crate::{
    AnalyticArgs, CliError, ProtocolArgs, ProtocolChoice, SessionArgs, SignatureArgs, SimulateArgs,
    SweepArgs,
};

fn kv(name: &str, value: impl std::fmt::Display) {
    println!("{name:<24}{value}");
}

fn protocol_name(choice: ProtocolChoice) -> &'static str {
    match choice {
        ProtocolChoice::Kmb09 => "kmb09",
        ProtocolChoice::Variant => "variant",
    }
}

fn print_protocol_block(args: &ProtocolArgs) {
    kv("protocol", protocol_name(args.protocol));
    kv("theta1_deg", fmt9(args.theta1));
    if args.protocol == ProtocolChoice::Variant {
        kv("theta2_deg", fmt9(args.theta2.expect("validated")));
        kv("phi2_deg", fmt9(args.phi2.expect("validated")));
    }
}

fn runtime(error: Error) -> CliError {
    CliError::Runtime(error.to_string())
}

pub fn analytic(args: &AnalyticArgs) -> Result<(), CliError> {
    let spec = args.protocol.spec()?;
    let evan = args.theta3.zip(args.phi3);

    // compute everything before printing anything
    let report = match (spec, evan) {
        (ProtocolSpec::Kmb09 { theta1 }, None) => (kmb09_eta(theta1), None),
        (ProtocolSpec::Kmb09 { theta1 }, Some((t3, p3))) => {
            let params =
                Kmb09Params::new(theta1, t3.to_radians(), p3.to_radians()).map_err(runtime)?;
            let rates = kmb09_rates(&params).map_err(runtime)?;
            (
                rates.eta,
                Some((rates.iter, rates.qber, None, rates.eta_evan)),
            )
        }
        (
            ProtocolSpec::Variant {
                theta1,
                theta2,
                phi2,
            },
            None,
        ) => (variant_eta(theta1, theta2, phi2), None),
        (
            ProtocolSpec::Variant {
                theta1,
                theta2,
                phi2,
            },
            Some((t3, p3)),
        ) => {
            let params = VariantParams::new(theta1, theta2, phi2, t3.to_radians(), p3.to_radians())
                .map_err(runtime)?;
            let rates = variant_rates(&params).map_err(runtime)?;
            (
                rates.eta,
                Some((rates.iter, rates.qber, Some(rates.qb), rates.qb)),
            )
        }
    };

    print_protocol_block(&args.protocol);
    if let Some((t3, p3)) = evan {
        kv("theta3_deg", fmt9(t3));
        kv("phi3_deg", fmt9(p3));
    }
    kv("eta", fmt9(report.0));
    match report.1 {
        Some((iter, qber, qb, eta_evan)) => {
            kv("iter", fmt9(iter));
            kv("qber", fmt9(qber));
            if let Some(qb) = qb {
                kv("p_qb", fmt9(qb));
            }
            kv("eta_evan", fmt9(eta_evan));
        }
        None => {
            kv("iter", "n/a");
            kv("qber", "n/a");
            if args.protocol.protocol == ProtocolChoice::Variant {
                kv("p_qb", "n/a");
            }
            kv("eta_evan", "n/a");
        }
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let spec = args.protocol.spec()?;
    let records = sweep_eve(&spec, args.grid).map_err(runtime)?;
    write_sweep(&args.out, &records)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    // the data file is on disk either way; a degenerate fit still fails
    let fit = fit_signature(&records).map_err(runtime)?;

    print_protocol_block(&args.protocol);
    kv("grid", args.grid);
    kv("records", records.len());
    kv("eta", fmt9(records[0].eta));
    print_fit(&fit);
    kv("out", args.out.display());
    Ok(())
}

fn print_fit(fit: &SignatureFit) {
    kv("qber_min", fmt9(fit.qber_min));
    kv("argmin_theta3_deg", fmt9(fit.argmin.0.to_degrees()));
    kv("argmin_phi3_deg", fmt9(fit.argmin.1.to_degrees()));
    kv("iter_at_min", fmt9(fit.iter_at_min));
    kv("eta_evan_at_min", fmt9(fit.eta_evan_at_min));
    kv("fit_slope", fmt9(fit.slope));
    kv("fit_intercept", fmt9(fit.intercept));
    kv("fit_r_squared", fmt9(fit.r_squared));
    kv("fit_points", fit.n_points);
}

/// Builds the engine shared by `simulate` and `signature`; returns it
/// with the (possibly auto-generated) seed.
fn build_session(
    protocol: &ProtocolArgs,
    session: &SessionArgs,
) -> Result<(SessionEngine, u64), CliError> {
    let spec = protocol.spec()?;
    let eve = if session.eve {
        let (Some(t3), Some(p3)) = (session.theta3, session.phi3) else {
            return Err(CliError::Usage("--eve requires --theta3 and --phi3".into()));
        };
        EveStrategy::InterceptResend {
            theta3: t3.to_radians(),
            phi3: p3.to_radians(),
        }
    } else {
        if session.theta3.is_some() {
            return Err(CliError::Usage("--theta3/--phi3 need --eve".into()));
        }
        EveStrategy::Absent
    };
    if session.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let noise = NoiseSpec::new(session.noise).map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = session.seed.unwrap_or_else(rand::random);
    let config = SessionConfig::new(session.photons, session.test_fraction, seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let engine = SessionEngine::new(&spec, &eve, &noise, config).map_err(runtime)?;
    Ok((engine, seed))
}

fn print_session_block(session: &SessionArgs, seed: u64) {
    kv("eve", if session.eve { "yes" } else { "no" });
    if let Some((t3, p3)) = session.theta3.zip(session.phi3) {
        kv("theta3_deg", fmt9(t3));
        kv("phi3_deg", fmt9(p3));
    }
    kv("noise", fmt9(session.noise));
    kv("photons", session.photons);
    kv("test_fraction", fmt9(session.test_fraction));
    kv("seed", seed);
}

fn print_estimate(name: &str, estimate: Option<kmb09::protocol::Estimate>, missing: &str) {
    match estimate {
        Some(e) => kv(name, format!("{} +/- {}", fmt9(e.value), fmt9(e.std_error))),
        None => kv(name, format!("n/a ({missing})")),
    }
}

fn print_stats(stats: &SessionStats) {
    kv("key_bits", stats.key_bits);
    kv("tested_bits", stats.tested_bits);
    kv("wrong_test_bits", stats.wrong_test_bits);
    kv("same_basis_tested", stats.same_basis_tested);
    kv("index_errors_same_basis", stats.index_errors_same_basis);
    kv("final_key_bits", stats.final_key_bits());
    print_estimate("est_qber", stats.est_qber, "no tested bits");
    print_estimate("est_iter", stats.est_iter, "no same-basis photons revealed");
    print_estimate("est_efficiency", Some(stats.est_efficiency), "");
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let (engine, seed) = build_session(&args.protocol, &args.session)?;
    let (stats, trace) = run_partitioned(&engine, args.session.workers, args.trace);

    print_protocol_block(&args.protocol);
    print_session_block(&args.session, seed);
    print_stats(&stats);
    if args.trace {
        let records = trace.expect("trace collected when requested");
        write_trace(&args.out, &records)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
        kv("trace_out", args.out.display());
    }
    Ok(())
}

pub fn signature(args: &SignatureArgs) -> Result<(), CliError> {
    let records: Vec<SweepRecord> = match &args.sweep {
        Some(path) => read_sweep(Path::new(path)).map_err(CliError::Runtime)?,
        None => {
            if args.grid < 2 {
                return Err(CliError::Usage("--grid must be at least 2".into()));
            }
            let spec = args.protocol.spec()?;
            sweep_eve(&spec, args.grid).map_err(runtime)?
        }
    };
    let fit = fit_signature(&records).map_err(runtime)?;
    let (engine, seed) = build_session(&args.protocol, &args.session)?;
    let (stats, _) = run_partitioned(&engine, args.session.workers, false);
    let score = signature_deviation(&stats, &fit).map_err(runtime)?;
    let verdict = classify_deviation(score);

    print_protocol_block(&args.protocol);
    print_session_block(&args.session, seed);
    print_estimate("est_qber", stats.est_qber, "no tested bits");
    print_estimate("est_iter", stats.est_iter, "no same-basis photons revealed");
    kv("fit_slope", fmt9(fit.slope));
    kv("fit_intercept", fmt9(fit.intercept));
    kv("score", fmt9(score));
    kv("threshold", fmt9(SIGNATURE_THRESHOLD));
    kv("verdict", verdict.as_str());
    Ok(())
}
