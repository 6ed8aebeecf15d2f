//! Session configuration, read from TOML.
//!
//! ```toml
//! n = 8
//! m = 2
//! seed = 42                 # master seed for all randomness
//! setup_seed = "tracemix"   # generator derivation
//! paillier_bits = 2048
//! output = "session.tmxt"   # transcript path
//! tamper = ["s1:sm-blind:3"]
//!
//! [[query]]
//! kind = "trace-in"         # or "trace-out"
//! i = "all"                 # "all", "none", "a..b", or a list
//! j = [0, 1, 2, 3]
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mixnet::QueryKind;
use crate::runtime::{TamperDirective, TamperSet};

pub const DEFAULT_PAILLIER_BITS: u32 = 2048;
pub const DEFAULT_SETUP_SEED: &str = "tracemix";

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub i_set: BTreeSet<usize>,
    pub j_set: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub setup_seed: String,
    pub paillier_bits: u32,
    pub output: Option<PathBuf>,
    /// Sender payloads; random when absent. A 64-bit nonce is appended to
    /// each so that values are distinct.
    pub payloads: Option<Vec<u64>>,
    pub queries: Vec<QuerySpec>,
    pub tamper: TamperSet,
    pub white_box: bool,
}

impl SessionConfig {
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            seed,
            setup_seed: DEFAULT_SETUP_SEED.into(),
            paillier_bits: DEFAULT_PAILLIER_BITS,
            output: None,
            payloads: None,
            queries: Vec::new(),
            tamper: TamperSet::none(),
            white_box: false,
        }
    }

    pub fn with_query(mut self, kind: QueryKind, i_set: BTreeSet<usize>, j_set: BTreeSet<usize>) -> Self {
        self.queries.push(QuerySpec { kind, i_set, j_set });
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Config("n and m must be positive".into()));
        }
        if let Some(p) = &self.payloads {
            if p.len() != self.n {
                return Err(Error::Config(format!("{} payloads for n = {}", p.len(), self.n)));
            }
        }
        for (k, q) in self.queries.iter().enumerate() {
            for (name, set) in [("i", &q.i_set), ("j", &q.j_set)] {
                if let Some(&x) = set.iter().next_back().filter(|&&x| x >= self.n) {
                    return Err(Error::Config(format!("query {k}: {name} contains {x}, n = {}", self.n)));
                }
            }
        }
        for d in &self.tamper.0 {
            d.validate(self.n, self.m)?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    m: usize,
    #[serde(default)]
    seed: u64,
    setup_seed: Option<String>,
    paillier_bits: Option<u32>,
    output: Option<PathBuf>,
    payloads: Option<Vec<u64>>,
    #[serde(default)]
    white_box: bool,
    #[serde(default)]
    tamper: Vec<String>,
    #[serde(default)]
    query: Vec<RawQuery>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    kind: String,
    i: RawSet,
    j: RawSet,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSet {
    List(Vec<usize>),
    Named(String),
}

impl RawSet {
    fn resolve(&self, n: usize) -> Result<BTreeSet<usize>> {
        match self {
            RawSet::List(v) => Ok(v.iter().copied().collect()),
            RawSet::Named(s) => parse_set(s, n),
        }
    }
}

/// `all`, `none`, a half-open range `a..b`, or comma-separated indices.
pub fn parse_set(s: &str, n: usize) -> Result<BTreeSet<usize>> {
    let s = s.trim();
    match s {
        "all" => return Ok((0..n).collect()),
        "none" | "" => return Ok(BTreeSet::new()),
        _ => {}
    }
    let bad = || Error::Config(format!("bad index set {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_kind(s: &str) -> Result<QueryKind> {
    match s {
        "trace-in" => Ok(QueryKind::TraceIn),
        "trace-out" => Ok(QueryKind::TraceOut),
        _ => Err(Error::Config(format!("unknown query kind {s:?}"))),
    }
}

impl RawConfig {
    fn resolve(self) -> Result<SessionConfig> {
        let queries = self
            .query
            .iter()
            .map(|q| {
                Ok(QuerySpec { kind: parse_kind(&q.kind)?, i_set: q.i.resolve(self.n)?, j_set: q.j.resolve(self.n)? })
            })
            .collect::<Result<_>>()?;
        let tamper = self
            .tamper
            .iter()
            .map(|t| t.parse::<TamperDirective>().map_err(|e| Error::Config(format!("tamper {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let cfg = SessionConfig {
            n: self.n,
            m: self.m,
            seed: self.seed,
            setup_seed: self.setup_seed.unwrap_or_else(|| DEFAULT_SETUP_SEED.into()),
            paillier_bits: self.paillier_bits.unwrap_or(DEFAULT_PAILLIER_BITS),
            output: self.output,
            payloads: self.payloads,
            queries,
            tamper: TamperSet(tamper),
            white_box: self.white_box,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
