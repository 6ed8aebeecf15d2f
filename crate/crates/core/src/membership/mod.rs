//! Distributed set membership (`db_sm`) and reverse set membership
//! (`db_rsm`), plus single-prover references.

mod record;
pub mod rsm;
pub mod single;
pub mod sm;

use std::collections::BTreeSet;
use std::time::Instant;

use rand_chacha::ChaCha20Rng;

use crate::algebra::{multi_pairing, pairing, GroupElement, Gt, Scalar, SetupParams, G1, G2};
use crate::commitment::Commitment;
use crate::dpk::{self, DpkContext, DpkProver, DpkTranscript, Predicate};
use crate::error::{Error, Result};
use crate::runtime::{Bus, Mutation, PhaseTag, ProtocolEnv, Role, TamperPhase};
use crate::wire::{Reader, Writer};

pub use record::{AbortInfo, IndexProof};
pub use rsm::{db_rsm, BlindedTriple, RsmInputs, RsmOutput, RsmPublish, RsmRecord, RsmServerInput, RsmWhiteBox};
pub use sm::{db_sm, SmInputs, SmOutput, SmPublish, SmRecord, SmServerInput, SmWhiteBox};

/// Challenge domain tag of the set-membership DPK.
pub const P_BB: &str = "p_BB";
/// Challenge domain tag of the reverse set-membership DPK.
pub const P_BBS_PLUS: &str = "p_BBS+";

/// Slots of `p_BB`: v, r, b.
pub fn p_bb(params: &SetupParams, gamma: &Commitment, sigma: &G1, y: &G2) -> Predicate {
    use dpk::Equation;
    let eq0 =
        Equation::new(GroupElement::G1(gamma.0), [(GroupElement::G1(params.g1), 0), (GroupElement::G1(params.h1), 1)]);
    let eq1 = Equation::new(
        GroupElement::Gt(pairing(sigma, y)),
        [(GroupElement::Gt(params.e_g1_g2), 2), (GroupElement::Gt(-pairing(sigma, &params.g2)), 0)],
    );
    Predicate::new(vec![eq0, eq1], 3).expect("well-formed p_BB")
}

/// The fixed bases 𝔥1 = e(h1,f2)^-1, 𝔥2 = e(g1,f2)^-1, 𝔥3 = fT.
#[derive(Debug, Clone, Copy)]
pub struct HBases {
    pub h1: Gt,
    pub h2: Gt,
    pub h3: Gt,
}

impl HBases {
    pub fn new(params: &SetupParams) -> Self {
        Self { h1: -params.e_h1_f2, h2: -params.e_g1_f2, h3: params.ft }
    }

    /// A prover's share of 𝔷1.
    pub fn z1_share(&self, b_s: &Scalar, delta0: &Scalar) -> Gt {
        self.h2 * b_s + self.h3 * delta0
    }
}

/// Slots of `p_BBS+`: b_S, b_c, b_r, δ0, δ1, δ2.
pub fn p_bbsplus(params: &SetupParams, h: &HBases, y: &G2, t: &BlindedTriple, v: &Scalar, z1: &Gt) -> Predicate {
    use dpk::Equation;
    let yc = *y + params.f2 * t.c;
    let g1_ = pairing(&t.s, &params.f2);
    let g2_ = pairing(&params.g1, &yc);
    let z2 = multi_pairing(&[t.s, -(params.f1 + params.g1 * v + params.h1 * t.r)], &[yc, params.f2]);
    let gt = GroupElement::Gt;
    let eq0 = Equation::new(gt(*z1), [(gt(h.h2), 0), (gt(h.h3), 3)]);
    let eq1 = Equation::new(gt(Gt::default()), [(gt(-*z1), 1), (gt(h.h2), 4), (gt(h.h3), 5)]);
    let eq2 = Equation::new(gt(z2), [(gt(g1_), 1), (gt(g2_), 0), (gt(h.h1), 2), (gt(h.h2), 4)]);
    Predicate::new(vec![eq0, eq1, eq2], 6).expect("well-formed p_BBS+")
}

/// Static description of one of the two protocols.
pub(crate) struct Proto {
    pub tag: &'static str,
    pub label: &'static str,
    pub a_tag: PhaseTag,
    pub z_tag: PhaseTag,
    pub a_tamper: TamperPhase,
    pub z_tamper: TamperPhase,
}

impl Proto {
    pub fn phase(&self, name: &str) -> String {
        format!("{}.{name}", self.label)
    }

    pub fn ctx(&self, env: &ProtocolEnv<'_>, index: usize) -> DpkContext {
        DpkContext {
            session: env.session,
            protocol: self.tag,
            query: env.query,
            run: env.run.code(),
            index: index as u32,
        }
    }
}

/// One distributed proof for `index`: every server runs both rounds, the
/// a-shares are broadcast and the z-shares go to the querier only. Each
/// party builds the predicate from its own view via `build`.
pub(crate) fn run_dpk(
    proto: &Proto,
    bus: &mut Bus,
    env: &mut ProtocolEnv<'_>,
    index: usize,
    build: &dyn Fn() -> Predicate,
    witnesses: Vec<Vec<Scalar>>,
    rngs: &mut [ChaCha20Rng],
) -> Result<IndexProof> {
    let m = witnesses.len();
    let ctx = proto.ctx(env, index);
    let prove = proto.phase("dpk-prove");

    let mut provers = Vec::with_capacity(m);
    let mut preds = Vec::with_capacity(m);
    let mut own_a = Vec::with_capacity(m);
    for (k, w) in witnesses.into_iter().enumerate() {
        let t0 = Instant::now();
        let pred = build();
        let mut prover = DpkProver::new(w);
        let mut a = prover.round1(&pred, &mut rngs[k])?;
        if env.tamper.hit(Role::Server(k), proto.a_tamper, index, env.run).is_some() {
            a[0] = a[0].mul(&pred.equations()[0].terms[0].base);
        }
        bus.broadcast(proto.a_tag, Role::Server(k), encode_indexed(index, |w| w.seq(&a)));
        env.timer.record(&prove, Role::Server(k), t0);
        provers.push(prover);
        preds.push(pred);
        own_a.push(a);
    }

    for k in 0..m {
        let t0 = Instant::now();
        let mut shares = Vec::with_capacity(m);
        for j in 0..m {
            if j == k {
                shares.push(own_a[k].clone());
            } else {
                let msg = bus.recv(Role::Server(k), Role::Server(j), proto.a_tag)?;
                shares.push(decode_indexed(msg, index, |r| r.seq())?);
            }
        }
        let a = dpk::combine_first(&shares).ok_or_else(|| Error::Protocol("mismatched a-shares".into()))?;
        let c = dpk::challenge(&ctx, &preds[k], &a);
        let mut z = provers[k].round2(&c)?;
        if env.tamper.hit(Role::Server(k), proto.z_tamper, index, env.run).is_some() {
            z[0] += Scalar::from(1u64);
        }
        bus.send(proto.z_tag, Role::Server(k), Role::Querier, encode_indexed(index, |w| w.seq(&z)));
        env.timer.record(&prove, Role::Server(k), t0);
    }

    let t0 = Instant::now();
    let pred = build();
    let mut a_shares = Vec::with_capacity(m);
    let mut z_shares = Vec::with_capacity(m);
    for k in 0..m {
        let msg = bus.recv(Role::Querier, Role::Server(k), proto.a_tag)?;
        a_shares.push(decode_indexed(msg, index, |r| r.seq())?);
    }
    for k in 0..m {
        let msg = bus.recv(Role::Querier, Role::Server(k), proto.z_tag)?;
        z_shares.push(decode_indexed(msg, index, |r| r.seq())?);
    }
    let a = dpk::combine_first(&a_shares).ok_or_else(|| Error::Protocol("mismatched a-shares".into()))?;
    let c = dpk::challenge(&ctx, &pred, &a);
    let transcript = DpkTranscript { a_shares, c, z_shares };
    let accepted = dpk::verify(&ctx, &pred, &transcript);
    env.timer.record(&proto.phase("dpk-verify"), Role::Querier, t0);
    Ok(IndexProof { index, z1: None, transcript, accepted })
}

pub(crate) fn encode_indexed(index: usize, body: impl FnOnce(&mut Writer) -> &mut Writer) -> Vec<u8> {
    let mut w = Writer::new();
    w.u32(index as u32);
    body(&mut w);
    w.into_bytes()
}

pub(crate) fn decode_indexed<T>(
    msg: &[u8],
    index: usize,
    body: impl FnOnce(&mut Reader<'_>) -> std::result::Result<T, crate::wire::DecodeError>,
) -> Result<T> {
    let mut r = Reader::trusted(msg);
    let got = r.u32()? as usize;
    if got != index {
        return Err(Error::Protocol(format!("message for index {got}, expected {index}")));
    }
    let v = body(&mut r)?;
    r.finish()?;
    Ok(v)
}

/// Applies a G1 tamper: `Increment` shifts by g1, `Fake` substitutes `fake`.
pub(crate) fn mutate_g1(x: &G1, m: Mutation, params: &SetupParams, fake: G1) -> G1 {
    match m {
        Mutation::Increment => *x + params.g1,
        Mutation::Fake => fake,
    }
}

pub(crate) fn all_parties(m: usize) -> Vec<Role> {
    std::iter::once(Role::Querier).chain((0..m).map(Role::Server)).collect()
}

/// `[0, n) \ set`.
pub fn complement(set: &BTreeSet<usize>, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

pub(crate) fn check_subset(set: &BTreeSet<usize>, n: usize, name: &str) -> Result<()> {
    match set.iter().next_back() {
        Some(&i) if i >= n => Err(Error::InvalidParameter(format!("{name} contains {i}, n = {n}"))),
        _ => Ok(()),
    }
}
