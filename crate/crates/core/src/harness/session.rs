//! Runs a full session in process: setup, key generation, sender encryption,
//! mixing and the configured queries.

use std::collections::HashSet;

use rand::{Rng, RngCore};

use super::config::SessionConfig;
use super::transcript::{QueryTranscript, Transcript};
use crate::algebra::{setup, Scalar, SetupParams};
use crate::commitment::Opening;
use crate::error::Result;
use crate::mixnet::{self, btrace_in, btrace_out, MixOutput, MixServerSecret, QueryKind, QueryResult};
use crate::runtime::{PhaseTimer, ProtocolEnv, RngForge, Role, RunKind};

pub struct SessionOutput {
    pub params: SetupParams,
    pub transcript: Transcript,
    pub results: Vec<QueryResult>,
    /// Sender plaintexts in input order.
    pub values: Vec<Scalar>,
    pub openings: Vec<Opening>,
    pub secrets: Vec<MixServerSecret>,
    pub mix: MixOutput,
    pub timer: PhaseTimer,
}

/// `payload · 2^64 + nonce`.
pub fn padded_value(payload: u64, nonce: u64) -> Scalar {
    Scalar::from(((payload as u128) << 64) | nonce as u128)
}

/// Distinct nonce-padded sender values.
pub fn sender_values<R: RngCore + ?Sized>(payloads: &[u64], rng: &mut R) -> Vec<Scalar> {
    let mut seen = HashSet::new();
    payloads
        .iter()
        .map(|&p| loop {
            let v = padded_value(p, rng.gen());
            if seen.insert(v) {
                break v;
            }
        })
        .collect()
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionOutput> {
    cfg.validate()?;
    let (n, m) = (cfg.n, cfg.m);
    let forge = RngForge::new(cfg.seed);
    let params = setup(cfg.setup_seed.as_bytes(), m, n)?;

    let mut session = [0u8; 16];
    forge.rng("session", Role::Dealer).fill_bytes(&mut session);
    let (mpk, secrets) = mixnet::keygen(&params, m, cfg.paillier_bits, &mut forge.rng("keygen", Role::Dealer))?;

    let mut sender_rng = forge.rng("senders", Role::Dealer);
    let payloads: Vec<u64> = match &cfg.payloads {
        Some(p) => p.clone(),
        None => (0..n).map(|_| sender_rng.gen()).collect(),
    };
    let values = sender_values(&payloads, &mut sender_rng);
    let mut cts = Vec::with_capacity(n);
    let mut openings = Vec::with_capacity(n);
    for v in &values {
        let (ct, o) = mixnet::enc_opened(&params, &mpk, v, &mut sender_rng)?;
        cts.push(ct);
        openings.push(o);
    }

    let mut timer = PhaseTimer::new();
    let mut env = ProtocolEnv {
        session,
        query: 0,
        run: RunKind::Primary,
        forge: &forge,
        tamper: &cfg.tamper,
        timer: &mut timer,
        white_box: cfg.white_box,
    };
    let mix = mixnet::mix(&mut env, &params, &mpk, &cts, &secrets)?;

    let mut results = Vec::with_capacity(cfg.queries.len());
    for (k, q) in cfg.queries.iter().enumerate() {
        env.query = k as u32;
        let query = match q.kind {
            QueryKind::TraceIn => btrace_in,
            QueryKind::TraceOut => btrace_out,
        };
        results.push(query(&mut env, &params, &mpk, &cts, &mix.v_out, &q.i_set, &q.j_set, &secrets, &mix.witnesses)?);
    }

    let transcript = Transcript {
        session,
        n,
        m,
        setup_seed: cfg.setup_seed.as_bytes().to_vec(),
        mpk,
        cts,
        v_out: mix.v_out.clone(),
        queries: results.iter().map(QueryTranscript::from_result).collect(),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, transcript.to_bytes())?;
    }
    Ok(SessionOutput { params, transcript, results, values, openings, secrets, mix, timer })
}
