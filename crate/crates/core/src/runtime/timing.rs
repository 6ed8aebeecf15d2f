use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use super::Role;

/// Accumulated wall-clock time per (phase, role).
#[derive(Debug, Default, Clone)]
pub struct PhaseTimer {
    totals: BTreeMap<(String, Role), Duration>,
}

impl PhaseTimer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, phase: &str, role: Role, since: Instant) {
        *self.totals.entry((phase.to_owned(), role)).or_default() += since.elapsed();
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, Role, f64)> + '_ {
        self.totals.iter().map(|((p, r), d)| (p.as_str(), *r, d.as_secs_f64()))
    }

    /// Sum over all phases whose label starts with `prefix`.
    pub fn total(&self, prefix: &str) -> f64 {
        self.rows().filter(|(p, _, _)| p.starts_with(prefix)).map(|(_, _, s)| s).sum()
    }

    pub fn clear(&mut self) {
        self.totals.clear();
    }
}
