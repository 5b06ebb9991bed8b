//! Worker-partitioned session execution.
//!
//! Photon indices are split into contiguous ranges, one per worker;
//! every per-photon draw comes from a stream keyed by the photon's
//! index, so tallies and traces are identical for any worker count.

use kmb09::protocol::{PhotonRecord, SessionEngine, SessionStats, SessionTally};

/// Runs the whole session across `workers` threads, optionally
/// collecting the full trace in photon order.
pub fn run_partitioned(
    engine: &SessionEngine,
    workers: usize,
    collect_trace: bool,
) -> (SessionStats, Option<Vec<PhotonRecord>>) {
    let n = engine.n_photons();
    let workers = workers.max(1).min(n.max(1) as usize);

    if workers == 1 {
        let (tally, trace) = simulate_range(engine, 0, n, collect_trace);
        return (tally.finalize(engine.seed()), trace);
    }

    let ranges = split_ranges(n, workers as u64);
    let parts = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(start, end)| {
                scope.spawn(move || simulate_range(engine, start, end, collect_trace))
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("simulation worker panicked"))
            .collect::<Vec<_>>()
    });

    let mut total = SessionTally::default();
    let mut trace = collect_trace.then(|| Vec::with_capacity(n as usize));
    for (tally, part_trace) in parts {
        total.merge(&tally);
        if let (Some(all), Some(part)) = (trace.as_mut(), part_trace) {
            all.extend(part);
        }
    }
    (total.finalize(engine.seed()), trace)
}

fn simulate_range(
    engine: &SessionEngine,
    start: u64,
    end: u64,
    collect_trace: bool,
) -> (SessionTally, Option<Vec<PhotonRecord>>) {
    let mut tally = SessionTally::default();
    let mut trace = collect_trace.then(|| Vec::with_capacity((end - start) as usize));
    for index in start..end {
        let event = engine.simulate_photon(index);
        tally.record(&event);
        if let Some(t) = trace.as_mut() {
            t.push(event.record);
        }
    }
    (tally, trace)
}

/// Contiguous near-equal ranges covering `0..n`.
fn split_ranges(n: u64, workers: u64) -> Vec<(u64, u64)> {
    let base = n / workers;
    let extra = n % workers;
    let mut ranges = Vec::with_capacity(workers as usize);
    let mut start = 0;
    for w in 0..workers {
        let len = base + u64::from(w < extra);
        ranges.push((start, start + len));
        start += len;
    }
    ranges
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmb09::protocol::{EveStrategy, NoiseSpec, ProtocolSpec, SessionConfig};

    #[test]
    fn ranges_cover_everything_once() {
        for (n, w) in [(10, 3), (7, 8), (1, 1), (100, 8)] {
            let ranges = split_ranges(n, w);
            let mut cursor = 0;
            for (start, end) in ranges {
                assert_eq!(start, cursor);
                cursor = end;
            }
            assert_eq!(cursor, n);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = ProtocolSpec::Variant {
            theta1: 90f64.to_radians(),
            theta2: 90f64.to_radians(),
            phi2: 90f64.to_radians(),
        };
        let engine = SessionEngine::new(
            &spec,
            &EveStrategy::InterceptResend {
                theta3: 0.4,
                phi3: 2.2,
            },
            &NoiseSpec::new(0.02).unwrap(),
            SessionConfig::new(5000, 0.2, 99).unwrap(),
        )
        .unwrap();
        let (stats_1, trace_1) = run_partitioned(&engine, 1, true);
        let (stats_2, trace_2) = run_partitioned(&engine, 2, true);
        let (stats_8, trace_8) = run_partitioned(&engine, 8, true);
        assert_eq!(stats_1, stats_2);
        assert_eq!(stats_1, stats_8);
        assert_eq!(trace_1, trace_2);
        assert_eq!(trace_1, trace_8);
    }
}
