//! The traceable mixnet: key generation, sender encryption, mixing and the
//! two batched trace queries with their complement reruns.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::RngCore;
use rand_chacha::ChaCha20Rng;

use crate::algebra::{integer_to_scalar, q_integer, random_scalar, scalar_to_integer, Scalar, SetupParams};
use crate::commitment::{commit, prove_opening, verify_opening, Commitment, Opening, OpeningProof};
use crate::encryption::elgamal::{self, EgPublicKey, EgSecretShare};
use crate::encryption::paillier::{self, PaillierCiphertext, PaillierDecShare, PaillierKeyShare, PaillierPublicKey};
use crate::encryption::pke::{self, PkeCiphertext, PkePublicKey, PkeSecretKey};
use crate::encryption::shuffle::{hop, Permutation};
use crate::error::{Error, Result};
use crate::membership::{
    complement, db_rsm, db_sm, AbortInfo, RsmInputs, RsmOutput, RsmRecord, RsmServerInput, SmInputs, SmOutput,
    SmRecord, SmServerInput,
};
use crate::runtime::{Bus, PhaseTag, ProtocolEnv, Role, RunKind};
use crate::sharing::share_mm;
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixnetPublicKey {
    pub pke: Vec<PkePublicKey>,
    pub pk_g: EgPublicKey,
    pub pk_z: PaillierPublicKey,
}

impl MixnetPublicKey {
    pub fn m(&self) -> usize {
        self.pke.len()
    }
}

#[derive(Debug, Clone)]
pub struct MixServerSecret {
    pub pke: PkeSecretKey,
    pub sk_g: EgSecretShare,
    pub sk_z: PaillierKeyShare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderCiphertext {
    pub eps: PaillierCiphertext,
    pub gamma: Commitment,
    pub ev: Vec<PkeCiphertext>,
    pub er: Vec<PkeCiphertext>,
    pub rho: OpeningProof,
    pub eps_r: PaillierCiphertext,
}

/// What server k keeps after mixing.
#[derive(Debug, Clone)]
pub struct MixWitness {
    pub perm: Permutation,
    pub v_shares: Vec<Scalar>,
    pub r_shares: Vec<Scalar>,
}

/// ElGamal keys are generated per party and combined; the Paillier key comes
/// from a trusted dealer.
pub fn keygen<R: RngCore + ?Sized>(
    params: &SetupParams,
    m: usize,
    paillier_bits: u32,
    rng: &mut R,
) -> Result<(MixnetPublicKey, Vec<MixServerSecret>)> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let mut pke_pks = Vec::with_capacity(m);
    let mut pke_sks = Vec::with_capacity(m);
    let mut eg_parts = Vec::with_capacity(m);
    let mut eg_sks = Vec::with_capacity(m);
    for _ in 0..m {
        let (sk, pk) = pke::keygen(params, rng);
        pke_pks.push(pk);
        pke_sks.push(sk);
        let (sk_g, part) = elgamal::keygen_party(params, rng);
        eg_sks.push(sk_g);
        eg_parts.push(part);
    }
    let (pk_z, sk_z) = paillier::keygen_dealer(paillier_bits, m, rng)?;
    pk_z.precompute();
    let secrets = pke_sks
        .into_iter()
        .zip(eg_sks)
        .zip(sk_z)
        .map(|((pke, sk_g), sk_z)| MixServerSecret { pke, sk_g, sk_z })
        .collect();
    Ok((MixnetPublicKey { pke: pke_pks, pk_g: elgamal::combine_pk(&eg_parts), pk_z }, secrets))
}

pub fn enc<R: RngCore + ?Sized>(
    params: &SetupParams,
    mpk: &MixnetPublicKey,
    v: &Scalar,
    rng: &mut R,
) -> Result<SenderCiphertext> {
    enc_opened(params, mpk, v, rng).map(|(ct, _)| ct)
}

/// [`enc`], also returning the commitment opening.
pub fn enc_opened<R: RngCore + ?Sized>(
    params: &SetupParams,
    mpk: &MixnetPublicKey,
    v: &Scalar,
    rng: &mut R,
) -> Result<(SenderCiphertext, Opening)> {
    let m = mpk.m();
    let pz = &mpk.pk_z;
    let eps = pz.enc(&scalar_to_integer(v), rng)?;
    let r = random_scalar(rng);
    let gamma = commit(params, v, &r);
    let opening = Opening { v: *v, r };
    let rho = prove_opening(params, &gamma, &opening, rng)?;
    let eps_r = pz.enc(&scalar_to_integer(&r), rng)?;
    let vs = share_mm(v, m, rng)?;
    let rs = share_mm(&r, m, rng)?;
    let ev = mpk.pke.iter().zip(&vs.0).map(|(pk, s)| pke::enc(params, pk, s, rng)).collect();
    let er = mpk.pke.iter().zip(&rs.0).map(|(pk, s)| pke::enc(params, pk, s, rng)).collect();
    Ok((SenderCiphertext { eps, gamma, ev, er, rho, eps_r }, opening))
}

#[derive(Debug, Clone)]
pub struct MixOutput {
    pub v_out: Vec<Scalar>,
    pub witnesses: Vec<MixWitness>,
}

/// Re-encryption mix of the ε list, threshold decryption of the result and
/// per-server decryption of the share channel.
pub fn mix(
    env: &mut ProtocolEnv<'_>,
    params: &SetupParams,
    mpk: &MixnetPublicKey,
    cts: &[SenderCiphertext],
    secrets: &[MixServerSecret],
) -> Result<MixOutput> {
    let m = secrets.len();
    let n = cts.len();
    let pz = &mpk.pk_z;
    if m != mpk.m() {
        return Err(Error::LengthMismatch { expected: mpk.m(), got: m });
    }
    for (i, c) in cts.iter().enumerate() {
        if c.ev.len() != m || c.er.len() != m {
            return Err(Error::Protocol(format!("sender {i}: wrong number of encrypted shares")));
        }
        if !verify_opening(params, &c.gamma, &c.rho) {
            return Err(Error::Protocol(format!("sender {i}: opening proof does not verify")));
        }
    }
    let parties: Vec<Role> = (0..m).map(Role::Server).collect();
    let mut bus = Bus::new(env.session, &parties);
    let mut rngs: Vec<ChaCha20Rng> = (0..m).map(|k| env.rng("mix", Role::Server(k))).collect();

    let mut list: Vec<PaillierCiphertext> = cts.iter().map(|c| c.eps.clone()).collect();
    let mut perms = Vec::with_capacity(m);
    for k in 0..m {
        let t0 = Instant::now();
        if k > 0 {
            let msg = bus.recv(Role::Server(k), Role::Server(k - 1), PhaseTag::MixShuffle)?;
            let mut r = Reader::trusted(msg);
            list = pz.decode_cts(&mut r)?;
            r.finish()?;
        }
        let perm = Permutation::random(n, &mut rngs[k]);
        list = hop(pz, &list, &perm, &mut rngs[k])?;
        let mut w = Writer::new();
        pz.encode_cts(&list, &mut w);
        bus.broadcast(PhaseTag::MixShuffle, Role::Server(k), w.into_bytes());
        env.timer.record("mix.shuffle", Role::Server(k), t0);
        perms.push(perm);
    }

    let mut own = Vec::with_capacity(m);
    for (k, sk) in secrets.iter().enumerate() {
        let t0 = Instant::now();
        let shares: Vec<PaillierDecShare> = list.iter().map(|c| pz.dec_share(&sk.sk_z, c)).collect();
        bus.broadcast(PhaseTag::MixDecShare, Role::Server(k), shares.to_bytes());
        env.timer.record("mix.decryption", Role::Server(k), t0);
        own.push(shares);
    }
    let q = q_integer();
    let mut v_out = Vec::new();
    for k in 0..m {
        let t0 = Instant::now();
        let mut all = Vec::with_capacity(m);
        for j in 0..m {
            if j == k {
                all.push(own[k].clone());
            } else {
                let msg = bus.recv(Role::Server(k), Role::Server(j), PhaseTag::MixDecShare)?;
                all.push(Vec::<PaillierDecShare>::from_bytes(msg)?);
            }
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let shares: Vec<(usize, PaillierDecShare)> = (0..m).map(|j| (j, all[j][i].clone())).collect();
            let x = pz.combine(&shares, m)?;
            if x >= *q {
                return Err(Error::Protocol(format!("output {i} is not a value in Z_q")));
            }
            out.push(integer_to_scalar(&x));
        }
        env.timer.record("mix.decryption", Role::Server(k), t0);
        v_out = out;
    }

    let witnesses = perms
        .into_iter()
        .zip(secrets)
        .enumerate()
        .map(|(k, (perm, sk))| {
            let pk = &mpk.pke[k];
            let v_shares = cts.iter().map(|c| pke::dec(&sk.pke, pk, &c.ev[k])).collect();
            let r_shares = cts.iter().map(|c| pke::dec(&sk.pke, pk, &c.er[k])).collect();
            MixWitness { perm, v_shares, r_shares }
        })
        .collect();
    Ok(MixOutput { v_out, witnesses })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    TraceIn,
    TraceOut,
}

impl QueryKind {
    pub fn code(self) -> u8 {
        match self {
            QueryKind::TraceIn => 0,
            QueryKind::TraceOut => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(QueryKind::TraceIn),
            1 => Some(QueryKind::TraceOut),
            _ => None,
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::TraceIn => "trace-in",
            QueryKind::TraceOut => "trace-out",
        })
    }
}

/// One protocol execution as the querier recorded it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunRecord {
    Sm(SmRecord),
    Rsm(RsmRecord),
}

impl RunRecord {
    pub fn abort(&self) -> Option<&AbortInfo> {
        match self {
            RunRecord::Sm(r) => r.abort.as_ref(),
            RunRecord::Rsm(r) => r.abort.as_ref(),
        }
    }

    pub fn accepted(&self) -> &BTreeSet<usize> {
        match self {
            RunRecord::Sm(r) => &r.accepted,
            RunRecord::Rsm(r) => &r.accepted,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RunOutput {
    Sm(SmOutput),
    Rsm(RsmOutput),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAbort {
    /// A run stopped before its proofs.
    Stage1 { run: RunKind, info: AbortInfo },
    /// Requested indices accepted by neither run.
    Union { missing: BTreeSet<usize> },
}

impl fmt::Display for QueryAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAbort::Stage1 { run, info } => {
                write!(f, "{run} run aborted by {} at index {}: {}", info.by, info.index, info.reason)
            }
            QueryAbort::Union { missing } => write!(f, "union check failed, missing {missing:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutcome {
    Output(BTreeSet<usize>),
    Abort(QueryAbort),
}

impl QueryOutcome {
    pub fn output(&self) -> Option<&BTreeSet<usize>> {
        match self {
            QueryOutcome::Output(s) => Some(s),
            QueryOutcome::Abort(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QueryResult {
    pub kind: QueryKind,
    pub i_set: BTreeSet<usize>,
    pub j_set: BTreeSet<usize>,
    pub primary: RunOutput,
    pub complement: Option<RunOutput>,
    pub outcome: QueryOutcome,
}

impl QueryResult {
    pub fn primary_record(&self) -> RunRecord {
        run_record(&self.primary)
    }

    pub fn complement_record(&self) -> Option<RunRecord> {
        self.complement.as_ref().map(run_record)
    }
}

fn run_record(o: &RunOutput) -> RunRecord {
    match o {
        RunOutput::Sm(s) => RunRecord::Sm(s.record.clone()),
        RunOutput::Rsm(s) => RunRecord::Rsm(s.record.clone()),
    }
}

/// The querier's final decision from the two runs. The requested side is I
/// for trace-in and J for trace-out.
pub fn decide(requested: &BTreeSet<usize>, primary: &RunRecord, complement: Option<&RunRecord>) -> QueryOutcome {
    if let Some(info) = primary.abort() {
        return QueryOutcome::Abort(QueryAbort::Stage1 { run: RunKind::Primary, info: info.clone() });
    }
    let Some(comp) = complement else {
        return QueryOutcome::Abort(QueryAbort::Stage1 {
            run: RunKind::Complement,
            info: AbortInfo { by: Role::Querier, index: 0, reason: "complement run missing".into() },
        });
    };
    if let Some(info) = comp.abort() {
        return QueryOutcome::Abort(QueryAbort::Stage1 { run: RunKind::Complement, info: info.clone() });
    }
    let union: BTreeSet<usize> = primary.accepted().union(comp.accepted()).copied().collect();
    if union != *requested {
        let missing = requested.difference(&union).copied().collect();
        return QueryOutcome::Abort(QueryAbort::Union { missing });
    }
    QueryOutcome::Output(primary.accepted().clone())
}

fn check_servers(mpk: &MixnetPublicKey, secrets: &[MixServerSecret], wits: &[MixWitness]) -> Result<()> {
    if secrets.len() != mpk.m() || wits.len() != mpk.m() {
        return Err(Error::MissingParty(mpk.m()));
    }
    Ok(())
}

/// Which inputs commit a value in `v'_J`.
#[allow(clippy::too_many_arguments)]
pub fn btrace_in(
    env: &mut ProtocolEnv<'_>,
    params: &SetupParams,
    mpk: &MixnetPublicKey,
    cts: &[SenderCiphertext],
    v_out: &[Scalar],
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
    secrets: &[MixServerSecret],
    wits: &[MixWitness],
) -> Result<QueryResult> {
    check_servers(mpk, secrets, wits)?;
    let gammas: Vec<Commitment> = cts.iter().map(|c| c.gamma).collect();
    let servers: Vec<SmServerInput<'_>> = secrets
        .iter()
        .zip(wits)
        .map(|(s, w)| SmServerInput { sk_g: &s.sk_g, perm: &w.perm, v_shares: &w.v_shares, r_shares: &w.r_shares })
        .collect();
    let j_comp = complement(j_set, cts.len());
    let inputs = SmInputs { params, pk_g: &mpk.pk_g, gammas: &gammas, v_out, i_set, j_set };

    env.run = RunKind::Primary;
    let primary = db_sm(env, &inputs, &servers)?;
    let complement = if primary.record.abort.is_none() {
        env.run = RunKind::Complement;
        Some(db_sm(env, &SmInputs { j_set: &j_comp, ..inputs }, &servers)?)
    } else {
        None
    };
    let p_rec = RunRecord::Sm(primary.record.clone());
    let c_rec = complement.as_ref().map(|c| RunRecord::Sm(c.record.clone()));
    let outcome = decide(i_set, &p_rec, c_rec.as_ref());
    Ok(QueryResult {
        kind: QueryKind::TraceIn,
        i_set: i_set.clone(),
        j_set: j_set.clone(),
        primary: RunOutput::Sm(primary),
        complement: complement.map(RunOutput::Sm),
        outcome,
    })
}

/// Which outputs in `v'_J` are committed by some input in I.
#[allow(clippy::too_many_arguments)]
pub fn btrace_out(
    env: &mut ProtocolEnv<'_>,
    params: &SetupParams,
    mpk: &MixnetPublicKey,
    cts: &[SenderCiphertext],
    v_out: &[Scalar],
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
    secrets: &[MixServerSecret],
    wits: &[MixWitness],
) -> Result<QueryResult> {
    check_servers(mpk, secrets, wits)?;
    let gammas: Vec<Commitment> = cts.iter().map(|c| c.gamma).collect();
    let rho: Vec<OpeningProof> = cts.iter().map(|c| c.rho).collect();
    let enc_r: Vec<PaillierCiphertext> = cts.iter().map(|c| c.eps_r.clone()).collect();
    let servers: Vec<RsmServerInput<'_>> = secrets
        .iter()
        .zip(wits)
        .map(|(s, w)| RsmServerInput {
            sk_g: &s.sk_g,
            sk_z: &s.sk_z,
            perm: &w.perm,
            v_shares: &w.v_shares,
            r_shares: &w.r_shares,
        })
        .collect();
    let i_comp = complement(i_set, cts.len());
    let inputs = RsmInputs {
        params,
        pk_g: &mpk.pk_g,
        pk_z: &mpk.pk_z,
        gammas: &gammas,
        rho: &rho,
        enc_r: &enc_r,
        v_out,
        i_set,
        j_set,
    };

    env.run = RunKind::Primary;
    let primary = db_rsm(env, &inputs, &servers)?;
    let complement = if primary.record.abort.is_none() {
        env.run = RunKind::Complement;
        Some(db_rsm(env, &RsmInputs { i_set: &i_comp, ..inputs }, &servers)?)
    } else {
        None
    };
    let p_rec = RunRecord::Rsm(primary.record.clone());
    let c_rec = complement.as_ref().map(|c| RunRecord::Rsm(c.record.clone()));
    let outcome = decide(j_set, &p_rec, c_rec.as_ref());
    Ok(QueryResult {
        kind: QueryKind::TraceOut,
        i_set: i_set.clone(),
        j_set: j_set.clone(),
        primary: RunOutput::Rsm(primary),
        complement: complement.map(RunOutput::Rsm),
        outcome,
    })
}

impl Encode for MixnetPublicKey {
    fn encode(&self, w: &mut Writer) {
        w.seq(&self.pke).put(&self.pk_g).put(&self.pk_z);
    }
}

impl Decode for MixnetPublicKey {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(Self { pke: r.seq()?, pk_g: r.get()?, pk_z: r.get()? })
    }
}

impl SenderCiphertext {
    pub fn encode_with(&self, pz: &PaillierPublicKey, w: &mut Writer) {
        pz.encode_ct(&self.eps, w);
        w.put(&self.gamma).seq(&self.ev).seq(&self.er).put(&self.rho);
        pz.encode_ct(&self.eps_r, w);
    }

    pub fn decode_with(r: &mut Reader<'_>, pz: &PaillierPublicKey) -> std::result::Result<Self, DecodeError> {
        Ok(Self {
            eps: pz.decode_ct(r)?,
            gamma: r.get()?,
            ev: r.seq()?,
            er: r.seq()?,
            rho: r.get()?,
            eps_r: pz.decode_ct(r)?,
        })
    }
}
