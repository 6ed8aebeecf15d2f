//! Shared fixtures for the criterion benches.

use std::collections::BTreeSet;

use tracemix_core::harness::SessionConfig;
use tracemix_core::mixnet::QueryKind;

/// Paillier modulus size for the protocol benches; small enough that a
/// criterion sample finishes in seconds.
pub const BENCH_PAILLIER_BITS: u32 = 1024;

/// A session with one query of `kind` over every index.
pub fn full_query(kind: QueryKind, n: usize, m: usize) -> SessionConfig {
    let all: BTreeSet<usize> = (0..n).collect();
    let mut cfg = SessionConfig::new(n, m, 7).with_query(kind, all.clone(), all);
    cfg.paillier_bits = BENCH_PAILLIER_BITS;
    cfg
}
