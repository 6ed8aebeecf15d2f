//! Per-phase timing tables.

use std::io::Write;

use super::config::SessionConfig;
use super::session::run_session;
use crate::error::{Error, Result};
use crate::mixnet::QueryKind;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub phase: String,
    pub role: String,
    pub seconds: f64,
}

/// One session per n with a trace-in and a trace-out query over all
/// indices, so every proof runs with real signatures in the primary run.
pub fn bench(n_list: &[usize], m: usize, seed: u64, paillier_bits: u32) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let all = (0..n).collect::<std::collections::BTreeSet<_>>();
        let mut cfg = SessionConfig::new(n, m, seed)
            .with_query(QueryKind::TraceIn, all.clone(), all.clone())
            .with_query(QueryKind::TraceOut, all.clone(), all);
        cfg.paillier_bits = paillier_bits;
        let out = run_session(&cfg)?;
        rows.extend(out.timer.rows().map(|(phase, role, seconds)| BenchRow {
            n,
            m,
            phase: phase.to_owned(),
            role: role.to_string(),
            seconds,
        }));
    }
    Ok(rows)
}

/// Sum of `seconds` over rows for `n` whose phase starts with `prefix`.
pub fn total(rows: &[BenchRow], n: usize, prefix: &str) -> f64 {
    rows.iter().filter(|r| r.n == n && r.phase.starts_with(prefix)).map(|r| r.seconds).sum()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "phase", "role", "seconds"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.phase.clone(),
            r.role.clone(),
            format!("{:.6}", r.seconds),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
