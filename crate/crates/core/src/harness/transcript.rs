//! Session transcripts: a versioned binary file holding everything the
//! querier saw, re-verifiable offline.
//!
//! Layout (all integers big-endian, sequences `u32`-length-prefixed):
//!
//! | field        | encoding                                            |
//! |--------------|-----------------------------------------------------|
//! | magic        | `"TMXT"`                                            |
//! | version      | `u16`                                               |
//! | session      | 16 bytes                                            |
//! | n, m         | `u32`, `u32`                                        |
//! | setup seed   | bytes                                               |
//! | mpk          | PKE keys, ElGamal key, Paillier modulus             |
//! | ciphertexts  | n sender ciphertexts                                |
//! | v'           | n scalars                                           |
//! | queries      | sequence of query records                           |
//!
//! A query record is `kind u8 || I || J || primary run || complement run?
//! || outcome`. A run record is the querier's publication, an optional
//! abort, the blinded values and one DPK transcript per requested index.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{setup, SetupParams};
use crate::commitment::{verify_opening, Commitment, OpeningProof};
use crate::dpk::{self, DpkContext};
use crate::error::Result;
use crate::membership::rsm::{self, check_sender_proofs};
use crate::membership::{
    complement, p_bb, p_bbsplus, sm, AbortInfo, HBases, IndexProof, RsmRecord, SmRecord, P_BB, P_BBS_PLUS,
};
use crate::mixnet::{
    decide, MixnetPublicKey, QueryAbort, QueryKind, QueryOutcome, QueryResult, RunRecord, SenderCiphertext,
};
use crate::runtime::{Role, RunKind};
use crate::wire::{DecodeError, Reader, Writer};

pub const MAGIC: &[u8; 4] = b"TMXT";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub session: [u8; 16],
    pub n: usize,
    pub m: usize,
    pub setup_seed: Vec<u8>,
    pub mpk: MixnetPublicKey,
    pub cts: Vec<SenderCiphertext>,
    pub v_out: Vec<crate::algebra::Scalar>,
    pub queries: Vec<QueryTranscript>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTranscript {
    pub kind: QueryKind,
    pub i_set: BTreeSet<usize>,
    pub j_set: BTreeSet<usize>,
    pub primary: RunRecord,
    pub complement: Option<RunRecord>,
    pub outcome: QueryOutcome,
}

impl QueryTranscript {
    pub fn from_result(r: &QueryResult) -> Self {
        Self {
            kind: r.kind,
            i_set: r.i_set.clone(),
            j_set: r.j_set.clone(),
            primary: r.primary_record(),
            complement: r.complement_record(),
            outcome: r.outcome.clone(),
        }
    }
}

/// Result of offline verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept { queries: usize },
    Reject { location: String, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept { queries } => write!(f, "accept ({queries} queries)"),
            Verdict::Reject { location, reason } => write!(f, "reject at {location}: {reason}"),
        }
    }
}

impl Transcript {
    pub fn to_bytes(&self) -> Vec<u8> {
        let pz = &self.mpk.pk_z;
        let mut w = Writer::new();
        w.raw(MAGIC).u16(VERSION).raw(&self.session).u32(self.n as u32).u32(self.m as u32);
        w.bytes(&self.setup_seed).put(&self.mpk);
        w.len_prefix(self.cts.len());
        for c in &self.cts {
            c.encode_with(pz, &mut w);
        }
        w.seq(&self.v_out);
        w.len_prefix(self.queries.len());
        for q in &self.queries {
            w.u8(q.kind.code());
            encode_set(&mut w, &q.i_set);
            encode_set(&mut w, &q.j_set);
            encode_run(&mut w, &q.primary, &self.mpk);
            match &q.complement {
                Some(c) => {
                    w.u8(1);
                    encode_run(&mut w, c, &self.mpk);
                }
                None => {
                    w.u8(0);
                }
            }
            encode_outcome(&mut w, &q.outcome);
        }
        w.into_bytes()
    }

    /// Parses a transcript; errors carry the byte offset.
    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        if r.raw(4)? != MAGIC {
            return Err(DecodeError { offset: 0, what: "not a transcript file".into() });
        }
        let at = r.offset();
        let version = r.u16()?;
        if version != VERSION {
            return Err(DecodeError { offset: at, what: format!("unsupported version {version}") });
        }
        let session: [u8; 16] = r.raw(16)?.try_into().expect("16 bytes");
        let n = r.u32()? as usize;
        let m = r.u32()? as usize;
        let setup_seed = r.bytes()?.to_vec();
        let mpk: MixnetPublicKey = r.get()?;
        let pz = &mpk.pk_z;
        let count = r.len_prefix(1)?;
        let cts =
            (0..count).map(|_| SenderCiphertext::decode_with(&mut r, pz)).collect::<std::result::Result<_, _>>()?;
        let v_out = r.seq()?;
        let count = r.len_prefix(1)?;
        let mut queries = Vec::with_capacity(count);
        for _ in 0..count {
            let at = r.offset();
            let kind =
                QueryKind::from_code(r.u8()?).ok_or(DecodeError { offset: at, what: "bad query kind".into() })?;
            let i_set = decode_set(&mut r)?;
            let j_set = decode_set(&mut r)?;
            let primary = decode_run(&mut r, kind, &mpk)?;
            let complement = match r.u8()? {
                0 => None,
                1 => Some(decode_run(&mut r, kind, &mpk)?),
                _ => return Err(r.err("bad complement flag")),
            };
            let outcome = decode_outcome(&mut r)?;
            queries.push(QueryTranscript { kind, i_set, j_set, primary, complement, outcome });
        }
        r.finish()?;
        Ok(Self { session, n, m, setup_seed, mpk, cts, v_out, queries })
    }
}

fn encode_set(w: &mut Writer, s: &BTreeSet<usize>) {
    let v: Vec<u32> = s.iter().map(|&i| i as u32).collect();
    w.seq(&v);
}

fn decode_set(r: &mut Reader<'_>) -> std::result::Result<BTreeSet<usize>, DecodeError> {
    Ok(r.seq::<u32>()?.into_iter().map(|i| i as usize).collect())
}

fn encode_run(w: &mut Writer, run: &RunRecord, mpk: &MixnetPublicKey) {
    match run {
        RunRecord::Sm(s) => {
            w.put(s);
        }
        RunRecord::Rsm(s) => s.encode_with(&mpk.pk_z, w),
    }
}

fn decode_run(
    r: &mut Reader<'_>,
    kind: QueryKind,
    mpk: &MixnetPublicKey,
) -> std::result::Result<RunRecord, DecodeError> {
    Ok(match kind {
        QueryKind::TraceIn => RunRecord::Sm(r.get()?),
        QueryKind::TraceOut => RunRecord::Rsm(RsmRecord::decode_with(r, &mpk.pk_z)?),
    })
}

fn encode_outcome(w: &mut Writer, o: &QueryOutcome) {
    match o {
        QueryOutcome::Output(s) => {
            w.u8(0);
            encode_set(w, s);
        }
        QueryOutcome::Abort(QueryAbort::Stage1 { run, info }) => {
            w.u8(1).u8(run.code()).put(info);
        }
        QueryOutcome::Abort(QueryAbort::Union { missing }) => {
            w.u8(2);
            encode_set(w, missing);
        }
    }
}

fn decode_outcome(r: &mut Reader<'_>) -> std::result::Result<QueryOutcome, DecodeError> {
    let at = r.offset();
    Ok(match r.u8()? {
        0 => QueryOutcome::Output(decode_set(r)?),
        1 => {
            let run = RunKind::from_code(r.u8()?).ok_or(DecodeError { offset: at + 1, what: "bad run kind".into() })?;
            QueryOutcome::Abort(QueryAbort::Stage1 { run, info: r.get()? })
        }
        2 => QueryOutcome::Abort(QueryAbort::Union { missing: decode_set(r)? }),
        _ => return Err(DecodeError { offset: at, what: "bad outcome tag".into() }),
    })
}

/// Reads and verifies a transcript file. Parse failures are errors; a
/// well-formed transcript that fails any check is a [`Verdict::Reject`].
pub fn verify_transcript_file(path: &std::path::Path) -> Result<Verdict> {
    let bytes = std::fs::read(path)?;
    verify_transcript_bytes(&bytes)
}

pub fn verify_transcript_bytes(bytes: &[u8]) -> Result<Verdict> {
    let t = Transcript::from_bytes(bytes)?;
    Ok(verify_transcript(&t))
}

struct Rejection {
    location: String,
    reason: String,
}

fn reject<T>(location: impl Into<String>, reason: impl Into<String>) -> std::result::Result<T, Rejection> {
    Err(Rejection { location: location.into(), reason: reason.into() })
}

/// Re-checks sender proofs, the querier's publications, every DPK and the
/// querier's decisions. Accepts only if every query produced an output.
pub fn verify_transcript(t: &Transcript) -> Verdict {
    match verify_inner(t) {
        Ok(()) => Verdict::Accept { queries: t.queries.len() },
        Err(Rejection { location, reason }) => Verdict::Reject { location, reason },
    }
}

fn verify_inner(t: &Transcript) -> std::result::Result<(), Rejection> {
    let params = match setup(&t.setup_seed, t.m, t.n) {
        Ok(p) => p,
        Err(e) => return reject("header", e.to_string()),
    };
    if t.mpk.m() != t.m {
        return reject("header", format!("{} share-channel keys for m = {}", t.mpk.m(), t.m));
    }
    if t.cts.len() != t.n || t.v_out.len() != t.n {
        return reject("header", "ciphertext or output list has the wrong length");
    }
    for (i, c) in t.cts.iter().enumerate() {
        if !verify_opening(&params, &c.gamma, &c.rho) {
            return reject(format!("sender {i}"), "opening proof does not verify");
        }
    }
    let gammas: Vec<Commitment> = t.cts.iter().map(|c| c.gamma).collect();
    let rho: Vec<OpeningProof> = t.cts.iter().map(|c| c.rho).collect();
    for (k, q) in t.queries.iter().enumerate() {
        let here = |run: RunKind| format!("query {k} ({}) {run} run", q.kind);
        let (requested, runs) = match q.kind {
            QueryKind::TraceIn => {
                (&q.i_set, [(q.i_set.clone(), q.j_set.clone()), (q.i_set.clone(), complement(&q.j_set, t.n))])
            }
            QueryKind::TraceOut => {
                (&q.j_set, [(q.i_set.clone(), q.j_set.clone()), (complement(&q.i_set, t.n), q.j_set.clone())])
            }
        };
        for set in [&q.i_set, &q.j_set] {
            if set.iter().any(|&i| i >= t.n) {
                return reject(format!("query {k}"), "index set out of range");
            }
        }
        let records = [(RunKind::Primary, Some(&q.primary)), (RunKind::Complement, q.complement.as_ref())];
        for ((run, rec), (i_set, j_set)) in records.into_iter().zip(&runs) {
            let Some(rec) = rec else { continue };
            let ctx = Ctx { t, params: &params, gammas: &gammas, rho: &rho, query: k as u32, run, i_set, j_set };
            match rec {
                RunRecord::Sm(s) if q.kind == QueryKind::TraceIn => ctx.check_sm(s),
                RunRecord::Rsm(s) if q.kind == QueryKind::TraceOut => ctx.check_rsm(s),
                _ => Err((None, "run record does not match the query kind".into())),
            }
            .map_err(|(index, reason)| Rejection {
                location: match index {
                    Some(i) => format!("{}, index {i}", here(run)),
                    None => here(run),
                },
                reason,
            })?;
        }
        let outcome = decide(requested, &q.primary, q.complement.as_ref());
        if outcome != q.outcome {
            return reject(format!("query {k} ({})", q.kind), "recorded outcome differs from the recomputed one");
        }
        if let QueryOutcome::Abort(a) = &outcome {
            let location = match a {
                QueryAbort::Stage1 { run, info } => format!("{}, index {}", here(*run), info.index),
                QueryAbort::Union { missing } => {
                    format!("query {k} ({}), index {}", q.kind, missing.iter().next().copied().unwrap_or(0))
                }
            };
            return reject(location, format!("query aborted: {a}"));
        }
    }
    Ok(())
}

type RunCheck = std::result::Result<(), (Option<usize>, String)>;

struct Ctx<'a> {
    t: &'a Transcript,
    params: &'a SetupParams,
    gammas: &'a [Commitment],
    rho: &'a [OpeningProof],
    query: u32,
    run: RunKind,
    i_set: &'a BTreeSet<usize>,
    j_set: &'a BTreeSet<usize>,
}

impl Ctx<'_> {
    fn dpk_ctx(&self, protocol: &'static str, index: usize) -> DpkContext {
        DpkContext { session: self.t.session, protocol, query: self.query, run: self.run.code(), index: index as u32 }
    }

    /// `failed` is the first index at which the servers' publication check
    /// fails, if any.
    fn check_abort(&self, recorded: &Option<AbortInfo>, failed: Option<(usize, &str)>) -> RunCheck {
        match (recorded, failed) {
            (None, None) => Ok(()),
            (Some(a), Some((index, _))) if a.index == index && matches!(a.by, Role::Server(_)) => Ok(()),
            (Some(a), None) => Err((Some(a.index), format!("recorded abort is not justified: {}", a.reason))),
            (_, Some((index, why))) => {
                Err((Some(index), format!("publication check fails without a matching abort: {why}")))
            }
        }
    }

    fn check_proofs(
        &self,
        proofs: &[IndexProof],
        requested: &BTreeSet<usize>,
        recorded: &BTreeSet<usize>,
        verify: &dyn Fn(&IndexProof) -> std::result::Result<bool, String>,
    ) -> RunCheck {
        let indices: Vec<usize> = proofs.iter().map(|p| p.index).collect();
        if indices != requested.iter().copied().collect::<Vec<_>>() {
            return Err((None, "proofs do not cover the requested indices in order".into()));
        }
        let mut accepted = BTreeSet::new();
        for p in proofs {
            let ok = verify(p).map_err(|e| (Some(p.index), e))?;
            if ok != p.accepted {
                let why = if p.accepted {
                    "proof recorded as accepted does not verify"
                } else {
                    "proof recorded as rejected verifies"
                };
                return Err((Some(p.index), why.into()));
            }
            if ok {
                accepted.insert(p.index);
            }
        }
        if accepted != *recorded {
            return Err((None, "accepted set differs from the proofs".into()));
        }
        Ok(())
    }

    fn check_sm(&self, s: &SmRecord) -> RunCheck {
        let t = self.t;
        let bad = sm::check_publish(self.params, &t.mpk.pk_g, &t.v_out, self.j_set, &s.publish);
        self.check_abort(&s.abort, bad)?;
        if s.abort.is_some() {
            return Ok(());
        }
        if s.blinded.len() != t.n {
            return Err((None, "blinded list has the wrong length".into()));
        }
        let y = s.publish.y;
        self.check_proofs(&s.proofs, self.i_set, &s.accepted, &|p| {
            if p.z1.is_some() {
                return Err("unexpected 𝔷1".into());
            }
            let pred = p_bb(self.params, &self.gammas[p.index], &s.blinded[p.index], &y);
            Ok(dpk::verify(&self.dpk_ctx(P_BB, p.index), &pred, &p.transcript))
        })
    }

    fn check_rsm(&self, s: &RsmRecord) -> RunCheck {
        let t = self.t;
        if let Some(i) = check_sender_proofs(self.params, self.gammas, self.rho, self.i_set) {
            return match &s.abort {
                Some(a) if a.by == Role::Querier && a.index == i => Ok(()),
                _ => Err((Some(i), "sender opening proof fails without a matching abort".into())),
            };
        }
        let Some(publish) = &s.publish else {
            return Err((None, "publication missing".into()));
        };
        let bad = rsm::check_publish(self.params, &t.mpk.pk_g, &t.mpk.pk_z, self.gammas, self.i_set, publish)
            .map_err(|e| (None, e.to_string()))?;
        self.check_abort(&s.abort, bad)?;
        if s.abort.is_some() {
            return Ok(());
        }
        if s.blinded.len() != t.n {
            return Err((None, "blinded list has the wrong length".into()));
        }
        let h = HBases::new(self.params);
        self.check_proofs(&s.proofs, self.j_set, &s.accepted, &|p| {
            let z1 = p.z1.ok_or("missing 𝔷1")?;
            let pred = p_bbsplus(self.params, &h, &publish.y, &s.blinded[p.index], &t.v_out[p.index], &z1);
            Ok(dpk::verify(&self.dpk_ctx(P_BBS_PLUS, p.index), &pred, &p.transcript))
        })
    }
}
