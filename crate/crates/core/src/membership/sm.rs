//! Distributed set membership: for each i in I, the servers prove that γ_i
//! commits a value in v'_J.

use std::collections::BTreeSet;
use std::time::Instant;

use ark_ff::Zero;
use rand_chacha::ChaCha20Rng;

use super::{all_parties, check_subset, mutate_g1, p_bb, run_dpk, AbortInfo, IndexProof, Proto, P_BB};
use crate::algebra::{random_scalar, Scalar, SetupParams, G1, G2};
use crate::commitment::Commitment;
use crate::encryption::elgamal::{self, EgCiphertext, EgPublicKey, EgScheme, EgSecretShare};
use crate::encryption::shuffle::{hop, Permutation};
use crate::error::{Error, Result};
use crate::runtime::{Bus, Mutation, PhaseTag, ProtocolEnv, Role, TamperPhase};
use crate::signatures::{bb_fake, bb_keygen, bb_sign, bb_verify};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

pub(crate) const PROTO: Proto = Proto {
    tag: P_BB,
    label: "db-sm",
    a_tag: PhaseTag::SmAShare,
    z_tag: PhaseTag::SmZShare,
    a_tamper: TamperPhase::SmAShare,
    z_tamper: TamperPhase::SmZShare,
};

pub struct SmInputs<'a> {
    pub params: &'a SetupParams,
    pub pk_g: &'a EgPublicKey,
    pub gammas: &'a [Commitment],
    pub v_out: &'a [Scalar],
    pub i_set: &'a BTreeSet<usize>,
    pub j_set: &'a BTreeSet<usize>,
}

/// One server's secret input.
pub struct SmServerInput<'a> {
    pub sk_g: &'a EgSecretShare,
    pub perm: &'a Permutation,
    pub v_shares: &'a [Scalar],
    pub r_shares: &'a [Scalar],
}

/// The querier's publication: key, (fake) signatures, their encryptions and
/// the encryption randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmPublish {
    pub y: G2,
    pub sigs: Vec<G1>,
    pub enc: Vec<EgCiphertext>,
    pub rand: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmRecord {
    pub publish: SmPublish,
    pub abort: Option<AbortInfo>,
    /// σ̃, one per input position; empty after an abort.
    pub blinded: Vec<G1>,
    pub proofs: Vec<IndexProof>,
    pub accepted: BTreeSet<usize>,
}

/// Reconstructed secrets, kept only on request.
#[derive(Debug, Clone)]
pub struct SmWhiteBox {
    pub x: Scalar,
    pub b: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct SmOutput {
    pub record: SmRecord,
    pub white_box: Option<SmWhiteBox>,
}

/// The servers' check of the querier's publication. Returns the first
/// offending index.
pub fn check_publish(
    params: &SetupParams,
    pk_g: &EgPublicKey,
    v_out: &[Scalar],
    j_set: &BTreeSet<usize>,
    p: &SmPublish,
) -> Option<(usize, &'static str)> {
    let n = v_out.len();
    if p.sigs.len() != n || p.enc.len() != n || p.rand.len() != n {
        return Some((0, "publication has the wrong length"));
    }
    let eg = EgScheme::new(params, *pk_g);
    let fake = bb_fake(params);
    for j in 0..n {
        let sig = crate::signatures::BBSignature(p.sigs[j]);
        if j_set.contains(&j) {
            if !bb_verify(params, &p.y, &v_out[j], &sig) {
                return Some((j, "signature does not verify"));
            }
        } else if sig != fake {
            return Some((j, "expected the fake signature"));
        }
        if eg.enc_with(&p.sigs[j], &p.rand[j]) != p.enc[j] {
            return Some((j, "ciphertext does not match its randomness"));
        }
    }
    None
}

pub fn db_sm(env: &mut ProtocolEnv<'_>, inp: &SmInputs<'_>, servers: &[SmServerInput<'_>]) -> Result<SmOutput> {
    let p = inp.params;
    let n = inp.gammas.len();
    let m = servers.len();
    validate(inp, servers)?;
    let proto = &PROTO;
    let eg = EgScheme::new(p, *inp.pk_g);
    let mut bus = Bus::new(env.session, &all_parties(m));
    let mut qrng = env.rng(proto.label, Role::Querier);
    let mut srng: Vec<ChaCha20Rng> = (0..m).map(|k| env.rng(proto.label, Role::Server(k))).collect();

    // Querier: signatures on v'_J, fakes elsewhere.
    let t0 = Instant::now();
    let key = bb_keygen(p, &mut qrng);
    let fake = bb_fake(p).0;
    let mut sigs = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = if inp.j_set.contains(&j) { bb_sign(p, &key, &inp.v_out[j])?.0 } else { fake };
        if let Some(mu) = env.tamper.hit(Role::Querier, TamperPhase::SmSignature, j, env.run) {
            s = mutate_g1(&s, mu, p, fake);
        }
        sigs.push(s);
    }
    let rand: Vec<Scalar> = (0..n).map(|_| random_scalar(&mut qrng)).collect();
    let enc = sigs.iter().zip(&rand).map(|(s, r)| eg.enc_with(s, r)).collect();
    let publish = SmPublish { y: key.y, sigs, enc, rand };
    bus.broadcast(PhaseTag::SmPublish, Role::Querier, publish.to_bytes());
    env.timer.record(&proto.phase("signing"), Role::Querier, t0);

    // Servers: check the publication.
    let mut first_list = Vec::new();
    for k in 0..m {
        let t0 = Instant::now();
        let view: SmPublish = decode_trusted(bus.recv(Role::Server(k), Role::Querier, PhaseTag::SmPublish)?)?;
        let bad = check_publish(p, inp.pk_g, inp.v_out, inp.j_set, &view);
        env.timer.record(&proto.phase("verifying"), Role::Server(k), t0);
        if let Some((index, reason)) = bad {
            let info = AbortInfo { by: Role::Server(k), index, reason: reason.into() };
            bus.broadcast(PhaseTag::Abort, Role::Server(k), info.to_bytes());
            let record =
                SmRecord { publish, abort: Some(info), blinded: vec![], proofs: vec![], accepted: BTreeSet::new() };
            return Ok(SmOutput { record, white_box: None });
        }
        if k == m - 1 {
            first_list = view.enc;
        }
    }

    // Reverse shuffle: server m first, each with its inverse permutation.
    let mut list = first_list;
    for k in (0..m).rev() {
        let t0 = Instant::now();
        if k != m - 1 {
            list = decode_trusted(bus.recv(Role::Server(k), Role::Server(k + 1), PhaseTag::SmShuffle)?)?;
        }
        let mut out = hop(&eg, &list, &servers[k].perm.inverse(), &mut srng[k])?;
        for (pos, ct) in out.iter_mut().enumerate() {
            if let Some(mu) = env.tamper.hit(Role::Server(k), TamperPhase::SmShuffle, pos, env.run) {
                *ct = match mu {
                    Mutation::Increment => elgamal::mul(ct, &eg.enc_with(&p.g1, &Scalar::zero())),
                    Mutation::Fake => eg.enc(&fake, &mut srng[k]),
                };
            }
        }
        bus.broadcast(PhaseTag::SmShuffle, Role::Server(k), out.to_bytes());
        env.timer.record(&proto.phase("shuffle"), Role::Server(k), t0);
        list = out;
    }
    let shuffled = list;

    // Homomorphic blinding.
    let mut b_shares = Vec::with_capacity(m);
    for k in 0..m {
        let t0 = Instant::now();
        let eps: Vec<EgCiphertext> = if k == 0 {
            shuffled.clone()
        } else {
            decode_trusted(bus.recv(Role::Server(k), Role::Server(0), PhaseTag::SmShuffle)?)?
        };
        let b: Vec<Scalar> = (0..n).map(|_| random_scalar(&mut srng[k])).collect();
        let contrib: Vec<EgCiphertext> = (0..n)
            .map(|i| {
                let mut bi = b[i];
                if env.tamper.hit(Role::Server(k), TamperPhase::SmBlind, i, env.run).is_some() {
                    bi += Scalar::from(1u64);
                }
                eg.renc(&elgamal::exp(&eps[i], &bi), &mut srng[k])
            })
            .collect();
        bus.broadcast(PhaseTag::SmBlind, Role::Server(k), contrib.to_bytes());
        env.timer.record(&proto.phase("blinding"), Role::Server(k), t0);
        b_shares.push((b, contrib));
    }
    let mut blinded_ct: Vec<Vec<EgCiphertext>> = Vec::with_capacity(m + 1);
    for party in all_parties(m).into_iter().skip(1).chain([Role::Querier]) {
        let t0 = Instant::now();
        let mut acc: Vec<EgCiphertext> = vec![EgCiphertext { c0: G1::zero(), c1: G1::zero() }; n];
        for j in 0..m {
            let contrib: Vec<EgCiphertext> = if party == Role::Server(j) {
                b_shares[j].1.clone()
            } else {
                decode_trusted(bus.recv(party, Role::Server(j), PhaseTag::SmBlind)?)?
            };
            check_len(&contrib, n)?;
            for (a, c) in acc.iter_mut().zip(&contrib) {
                *a = elgamal::mul(a, c);
            }
        }
        let phase = if party == Role::Querier { "decryption" } else { "blinding" };
        env.timer.record(&proto.phase(phase), party, t0);
        blinded_ct.push(acc);
    }

    // Threshold decryption; every party combines the shares itself.
    let mut own_shares = Vec::with_capacity(m);
    for k in 0..m {
        let t0 = Instant::now();
        let shares: Vec<G1> = blinded_ct[k]
            .iter()
            .enumerate()
            .map(|(i, ct)| {
                let d = elgamal::dec_share(servers[k].sk_g, ct);
                match env.tamper.hit(Role::Server(k), TamperPhase::SmDecShare, i, env.run) {
                    Some(_) => d + p.g1,
                    None => d,
                }
            })
            .collect();
        bus.broadcast(PhaseTag::SmDecShare, Role::Server(k), shares.to_bytes());
        env.timer.record(&proto.phase("decryption"), Role::Server(k), t0);
        own_shares.push(shares);
    }
    let mut blinded = Vec::new();
    for (slot, party) in all_parties(m).into_iter().skip(1).chain([Role::Querier]).enumerate() {
        let t0 = Instant::now();
        let mut per_party = Vec::with_capacity(m);
        for j in 0..m {
            let shares: Vec<G1> = if party == Role::Server(j) {
                own_shares[j].clone()
            } else {
                decode_trusted(bus.recv(party, Role::Server(j), PhaseTag::SmDecShare)?)?
            };
            check_len(&shares, n)?;
            per_party.push(shares);
        }
        let sigma: Vec<G1> = (0..n)
            .map(|i| {
                let shares: Vec<(usize, G1)> = (0..m).map(|j| (j, per_party[j][i])).collect();
                elgamal::combine(&blinded_ct[slot][i], &shares, m)
            })
            .collect::<Result<_>>()?;
        env.timer.record(&proto.phase("decryption"), party, t0);
        blinded = sigma;
    }

    // Stage 2: one distributed proof per i in I.
    let mut proofs = Vec::with_capacity(inp.i_set.len());
    let mut accepted = BTreeSet::new();
    for &i in inp.i_set {
        let witnesses = (0..m)
            .map(|k| {
                let s = &servers[k];
                let mut w = vec![s.v_shares[i], s.r_shares[i], b_shares[k].0[i]];
                for (slot, phase) in
                    [TamperPhase::SmWitnessV, TamperPhase::SmWitnessR, TamperPhase::SmWitnessB].into_iter().enumerate()
                {
                    if env.tamper.hit(Role::Server(k), phase, i, env.run).is_some() {
                        w[slot] += Scalar::from(1u64);
                    }
                }
                w
            })
            .collect();
        let build = || p_bb(p, &inp.gammas[i], &blinded[i], &publish.y);
        let proof = run_dpk(proto, &mut bus, env, i, &build, witnesses, &mut srng)?;
        if proof.accepted {
            accepted.insert(i);
        }
        proofs.push(proof);
    }

    let white_box = env
        .white_box
        .then(|| SmWhiteBox { x: key.x, b: (0..n).map(|i| b_shares.iter().map(|(b, _)| b[i]).sum()).collect() });
    Ok(SmOutput { record: SmRecord { publish, abort: None, blinded, proofs, accepted }, white_box })
}

fn validate(inp: &SmInputs<'_>, servers: &[SmServerInput<'_>]) -> Result<()> {
    let n = inp.gammas.len();
    if servers.is_empty() {
        return Err(Error::InvalidParameter("no servers".into()));
    }
    if inp.v_out.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: inp.v_out.len() });
    }
    for s in servers {
        for len in [s.perm.len(), s.v_shares.len(), s.r_shares.len()] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, got: len });
            }
        }
    }
    check_subset(inp.i_set, n, "I")?;
    check_subset(inp.j_set, n, "J")
}

pub(crate) fn check_len<T>(v: &[T], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: v.len() });
    }
    Ok(())
}

/// Decodes a bus payload from an authenticated peer.
pub(crate) fn decode_trusted<T: Decode>(msg: &[u8]) -> Result<T> {
    let mut r = Reader::trusted(msg);
    let v = r.get()?;
    r.finish()?;
    Ok(v)
}

impl Encode for SmPublish {
    fn encode(&self, w: &mut Writer) {
        w.g2(&self.y).seq(&self.sigs).seq(&self.enc).seq(&self.rand);
    }
}

impl Decode for SmPublish {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(Self { y: r.g2()?, sigs: r.seq()?, enc: r.seq()?, rand: r.seq()? })
    }
}

impl Encode for SmRecord {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.publish);
        super::record::encode_opt(w, &self.abort);
        w.seq(&self.blinded).seq(&self.proofs);
        let acc: Vec<u32> = self.accepted.iter().map(|&i| i as u32).collect();
        w.seq(&acc);
    }
}

impl Decode for SmRecord {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        let publish = r.get()?;
        let abort = super::record::decode_opt(r)?;
        let blinded = r.seq()?;
        let proofs = r.seq()?;
        let accepted = r.seq::<u32>()?.into_iter().map(|i| i as usize).collect();
        Ok(Self { publish, abort, blinded, proofs, accepted })
    }
}
