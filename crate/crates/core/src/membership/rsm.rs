//! Distributed reverse set membership: for each j in J, the servers prove
//! that v'_j is committed by some γ_i with i in I.

use std::collections::BTreeSet;
use std::time::Instant;

use ark_ff::Zero;
use rand_chacha::ChaCha20Rng;
use rug::Integer;

use super::sm::check_len;
use super::{all_parties, check_subset, decode_indexed, encode_indexed, mutate_g1, p_bbsplus, run_dpk};
use super::{AbortInfo, HBases, IndexProof, Proto, P_BBS_PLUS};
use crate::algebra::{integer_to_scalar, q_integer, random_scalar, scalar_to_integer, Gt, Scalar, SetupParams, G1, G2};
use crate::commitment::{verify_opening, Commitment, OpeningProof};
use crate::encryption::elgamal::{self, EgCiphertext, EgPublicKey, EgScheme, EgSecretShare};
use crate::encryption::paillier::{
    random_below, PaillierCiphertext, PaillierDecShare, PaillierKeyShare, PaillierPublicKey, ALPHA_BITS,
};
use crate::encryption::shuffle::{hop, Permutation};
use crate::error::{Error, Result};
use crate::runtime::{Bus, Mutation, PhaseTag, ProtocolEnv, Role, TamperPhase};
use crate::sharing::{deal_pools, mult_open, MultOpening};
use crate::signatures::{bbsplus_fake_s, bbsplus_keygen, quasi_sign, verq, QuasiBBSPlusSignature};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

pub(crate) const PROTO: Proto = Proto {
    tag: P_BBS_PLUS,
    label: "db-rsm",
    a_tag: PhaseTag::RsmAShare,
    z_tag: PhaseTag::RsmZShare,
    a_tamper: TamperPhase::RsmAShare,
    z_tamper: TamperPhase::RsmZShare,
};

const ALPHA_BYTES: usize = (ALPHA_BITS / 8) as usize;

pub struct RsmInputs<'a> {
    pub params: &'a SetupParams,
    pub pk_g: &'a EgPublicKey,
    pub pk_z: &'a PaillierPublicKey,
    pub gammas: &'a [Commitment],
    pub rho: &'a [OpeningProof],
    pub enc_r: &'a [PaillierCiphertext],
    pub v_out: &'a [Scalar],
    pub i_set: &'a BTreeSet<usize>,
    pub j_set: &'a BTreeSet<usize>,
}

pub struct RsmServerInput<'a> {
    pub sk_g: &'a EgSecretShare,
    pub sk_z: &'a PaillierKeyShare,
    pub perm: &'a Permutation,
    pub v_shares: &'a [Scalar],
    pub r_shares: &'a [Scalar],
}

/// The querier's quasi-signatures, their component encryptions and the
/// encryption randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsmPublish {
    pub y: G2,
    pub quasi: Vec<QuasiBBSPlusSignature>,
    pub enc_s: Vec<EgCiphertext>,
    pub rand_s: Vec<Scalar>,
    pub enc_c: Vec<PaillierCiphertext>,
    pub alpha_c: Vec<Integer>,
    pub enc_rhat: Vec<PaillierCiphertext>,
    pub alpha_rhat: Vec<Integer>,
}

/// (S̃', c̃', r̃') for one output position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlindedTriple {
    pub s: G1,
    pub c: Scalar,
    pub r: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsmRecord {
    /// `None` when the querier aborted on a sender proof.
    pub publish: Option<RsmPublish>,
    pub abort: Option<AbortInfo>,
    pub blinded: Vec<BlindedTriple>,
    pub proofs: Vec<IndexProof>,
    pub accepted: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct RsmWhiteBox {
    pub x: Scalar,
    pub c: Vec<Scalar>,
    pub r_hat: Vec<Scalar>,
    pub b_s: Vec<Scalar>,
    pub b_c: Vec<Scalar>,
    pub b_r: Vec<Scalar>,
    /// Reconstructed (δ0, δ1, δ2) per j in J.
    pub deltas: Vec<(usize, [Scalar; 3])>,
    /// Decrypted c̃'' and r̃'' before reduction mod q.
    pub c_raw: Vec<Integer>,
    pub r_raw: Vec<Integer>,
}

#[derive(Debug, Clone)]
pub struct RsmOutput {
    pub record: RsmRecord,
    pub white_box: Option<RsmWhiteBox>,
}

/// Bound on every decrypted sum: the value plus m padded blinds, each
/// below q², with room for one more q.
pub fn wraparound_bound(m: usize) -> Integer {
    let q = q_integer();
    Integer::from(q.square_ref()) * (m as u32 + 2)
}

/// First sender proof for i in I that fails, checked by the querier.
pub fn check_sender_proofs(
    params: &SetupParams,
    gammas: &[Commitment],
    rho: &[OpeningProof],
    i_set: &BTreeSet<usize>,
) -> Option<usize> {
    i_set.iter().copied().find(|&i| !verify_opening(params, &gammas[i], &rho[i]))
}

/// The servers' check of the querier's publication.
pub fn check_publish(
    params: &SetupParams,
    pk_g: &EgPublicKey,
    pk_z: &PaillierPublicKey,
    gammas: &[Commitment],
    i_set: &BTreeSet<usize>,
    p: &RsmPublish,
) -> Result<Option<(usize, &'static str)>> {
    let n = gammas.len();
    let lens = [
        p.quasi.len(),
        p.enc_s.len(),
        p.rand_s.len(),
        p.enc_c.len(),
        p.alpha_c.len(),
        p.enc_rhat.len(),
        p.alpha_rhat.len(),
    ];
    if lens.iter().any(|&l| l != n) {
        return Ok(Some((0, "publication has the wrong length")));
    }
    let eg = EgScheme::new(params, *pk_g);
    for i in 0..n {
        let q = &p.quasi[i];
        if i_set.contains(&i) {
            if !verq(params, q, &gammas[i], &p.y) {
                return Ok(Some((i, "quasi-signature does not verify")));
            }
        } else if q.s != bbsplus_fake_s() {
            return Ok(Some((i, "expected the fake quasi-signature")));
        }
        if eg.enc_with(&q.s, &p.rand_s[i]) != p.enc_s[i] {
            return Ok(Some((i, "S ciphertext does not match its randomness")));
        }
        // Re-encrypting the canonical scalar also pins the plaintext to [0, q).
        if pk_z.enc_with(&scalar_to_integer(&q.c), &p.alpha_c[i])? != p.enc_c[i] {
            return Ok(Some((i, "c ciphertext does not match its randomness")));
        }
        if pk_z.enc_with(&scalar_to_integer(&q.r_hat), &p.alpha_rhat[i])? != p.enc_rhat[i] {
            return Ok(Some((i, "r ciphertext does not match its randomness")));
        }
    }
    Ok(None)
}

pub fn db_rsm(env: &mut ProtocolEnv<'_>, inp: &RsmInputs<'_>, servers: &[RsmServerInput<'_>]) -> Result<RsmOutput> {
    let p = inp.params;
    let pz = inp.pk_z;
    let n = inp.gammas.len();
    let m = servers.len();
    validate(inp, servers)?;
    if wraparound_bound(m) >= *pz.n() {
        return Err(Error::Wraparound(format!("(m+2)q² ≥ N for m = {m}")));
    }
    let proto = &PROTO;
    let eg = EgScheme::new(p, *inp.pk_g);
    let mut bus = Bus::new(env.session, &all_parties(m));
    let mut qrng = env.rng(proto.label, Role::Querier);
    let mut srng: Vec<ChaCha20Rng> = (0..m).map(|k| env.rng(proto.label, Role::Server(k))).collect();
    let no_record = |abort| RsmRecord {
        publish: None,
        abort: Some(abort),
        blinded: vec![],
        proofs: vec![],
        accepted: BTreeSet::new(),
    };

    // Querier: sender proofs, then quasi-signatures on γ_I and fakes elsewhere.
    let t0 = Instant::now();
    if let Some(i) = check_sender_proofs(p, inp.gammas, inp.rho, inp.i_set) {
        let info = AbortInfo { by: Role::Querier, index: i, reason: "sender opening proof does not verify".into() };
        bus.broadcast(PhaseTag::Abort, Role::Querier, info.to_bytes());
        return Ok(RsmOutput { record: no_record(info), white_box: None });
    }
    let key = bbsplus_keygen(p, &mut qrng);
    let mut quasi = Vec::with_capacity(n);
    for i in 0..n {
        let mut q = if inp.i_set.contains(&i) {
            quasi_sign(p, &key, &inp.gammas[i], &mut qrng)
        } else {
            QuasiBBSPlusSignature { s: bbsplus_fake_s(), c: random_scalar(&mut qrng), r_hat: random_scalar(&mut qrng) }
        };
        if let Some(mu) = env.tamper.hit(Role::Querier, TamperPhase::RsmQuasi, i, env.run) {
            q.s = mutate_g1(&q.s, mu, p, bbsplus_fake_s());
        }
        quasi.push(q);
    }
    let rand_s: Vec<Scalar> = (0..n).map(|_| random_scalar(&mut qrng)).collect();
    let alpha_c: Vec<Integer> = (0..n).map(|_| pz.random_alpha(&mut qrng)).collect();
    let alpha_rhat: Vec<Integer> = (0..n).map(|_| pz.random_alpha(&mut qrng)).collect();
    let enc_s = quasi.iter().zip(&rand_s).map(|(q, r)| eg.enc_with(&q.s, r)).collect();
    let enc_c =
        quasi.iter().zip(&alpha_c).map(|(q, a)| pz.enc_with(&scalar_to_integer(&q.c), a)).collect::<Result<_>>()?;
    let enc_rhat = quasi
        .iter()
        .zip(&alpha_rhat)
        .map(|(q, a)| pz.enc_with(&scalar_to_integer(&q.r_hat), a))
        .collect::<Result<_>>()?;
    let publish = RsmPublish { y: key.y, quasi, enc_s, rand_s, enc_c, alpha_c, enc_rhat, alpha_rhat };
    bus.broadcast(PhaseTag::RsmPublish, Role::Querier, publish.to_bytes_with(pz));
    env.timer.record(&proto.phase("signing"), Role::Querier, t0);

    // Servers: check the publication, then fold in the senders' ε_r.
    let mut start = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..m {
        let t0 = Instant::now();
        let view = RsmPublish::decode_trusted(bus.recv(Role::Server(k), Role::Querier, PhaseTag::RsmPublish)?, pz)?;
        let bad = check_publish(p, inp.pk_g, pz, inp.gammas, inp.i_set, &view)?;
        env.timer.record(&proto.phase("verifying"), Role::Server(k), t0);
        if let Some((index, reason)) = bad {
            let info = AbortInfo { by: Role::Server(k), index, reason: reason.into() };
            bus.broadcast(PhaseTag::Abort, Role::Server(k), info.to_bytes());
            let record = RsmRecord { publish: Some(publish), ..no_record(info) };
            return Ok(RsmOutput { record, white_box: None });
        }
        if k == 0 {
            let t0 = Instant::now();
            let enc_rr = view.enc_rhat.iter().zip(inp.enc_r).map(|(a, b)| pz.add(a, b)).collect();
            start = (view.enc_s, view.enc_c, enc_rr);
            env.timer.record(&proto.phase("shuffle"), Role::Server(k), t0);
        }
    }

    // Forward shuffle of the three lists, server 1 first.
    let (mut ls, mut lc, mut lr) = start;
    for k in 0..m {
        let t0 = Instant::now();
        if k > 0 {
            let msg = bus.recv(Role::Server(k), Role::Server(k - 1), PhaseTag::RsmShuffle)?;
            (ls, lc, lr) = decode_triple_lists(msg, pz)?;
        }
        let perm = servers[k].perm;
        let mut out_s = hop(&eg, &ls, perm, &mut srng[k])?;
        let out_c = hop(pz, &lc, perm, &mut srng[k])?;
        let out_r = hop(pz, &lr, perm, &mut srng[k])?;
        for (pos, ct) in out_s.iter_mut().enumerate() {
            if let Some(mu) = env.tamper.hit(Role::Server(k), TamperPhase::RsmShuffle, pos, env.run) {
                *ct = match mu {
                    Mutation::Increment => elgamal::mul(ct, &eg.enc_with(&p.g1, &Scalar::zero())),
                    Mutation::Fake => eg.enc(&bbsplus_fake_s(), &mut srng[k]),
                };
            }
        }
        bus.broadcast(PhaseTag::RsmShuffle, Role::Server(k), encode_triple_lists(&out_s, &out_c, &out_r, pz));
        env.timer.record(&proto.phase("shuffle"), Role::Server(k), t0);
        (ls, lc, lr) = (out_s, out_c, out_r);
    }
    let shuffled = (ls, lc, lr);

    // Padded homomorphic blinding.
    let q = q_integer();
    let q_minus_1 = Integer::from(q - 1u32);
    let mut blinds = Vec::with_capacity(m);
    for k in 0..m {
        let t0 = Instant::now();
        if k != m - 1 {
            // Everyone reads the final lists; only their length matters here.
            let msg = bus.recv(Role::Server(k), Role::Server(m - 1), PhaseTag::RsmShuffle)?;
            let (s, _, _) = decode_triple_lists(msg, pz)?;
            check_len(&s, n)?;
        }
        let rng = &mut srng[k];
        let b_s: Vec<Scalar> = (0..n).map(|_| random_scalar(rng)).collect();
        let b_c: Vec<Scalar> = (0..n).map(|_| random_scalar(rng)).collect();
        let b_r: Vec<Scalar> = (0..n).map(|_| random_scalar(rng)).collect();
        let one = Scalar::from(1u64);
        let bump =
            |phase, i| if env.tamper.hit(Role::Server(k), phase, i, env.run).is_some() { one } else { Scalar::zero() };
        let mut cs = Vec::with_capacity(n);
        let mut cc = Vec::with_capacity(n);
        let mut cr = Vec::with_capacity(n);
        for i in 0..n {
            cs.push(eg.enc(&(p.g1 * (b_s[i] + bump(TamperPhase::RsmBlindS, i))), rng));
            for (list, b, phase) in
                [(&mut cc, &b_c[i], TamperPhase::RsmBlindC), (&mut cr, &b_r[i], TamperPhase::RsmBlindR)]
            {
                let chi = random_below(&q_minus_1, rng);
                let padded = scalar_to_integer(&(*b + bump(phase, i))) + Integer::from(&chi * q);
                list.push(pz.enc(&padded, rng)?);
            }
        }
        bus.broadcast(PhaseTag::RsmBlind, Role::Server(k), encode_triple_lists(&cs, &cc, &cr, pz));
        env.timer.record(&proto.phase("blinding"), Role::Server(k), t0);
        blinds.push((b_s, b_c, b_r, (cs, cc, cr)));
    }
    let parties: Vec<Role> = (0..m).map(Role::Server).chain([Role::Querier]).collect();
    let mut blinded_ct = Vec::with_capacity(m + 1);
    for &party in &parties {
        let t0 = Instant::now();
        let (mut s, mut c, mut r) = shuffled.clone();
        for j in 0..m {
            let owned;
            let contrib = if party == Role::Server(j) {
                &blinds[j].3
            } else {
                owned = decode_triple_lists(bus.recv(party, Role::Server(j), PhaseTag::RsmBlind)?, pz)?;
                &owned
            };
            check_len(&contrib.0, n)?;
            for i in 0..n {
                s[i] = elgamal::mul(&s[i], &contrib.0[i]);
                c[i] = pz.add(&c[i], &contrib.1[i]);
                r[i] = pz.add(&r[i], &contrib.2[i]);
            }
        }
        let phase = if party == Role::Querier { "decryption" } else { "blinding" };
        env.timer.record(&proto.phase(phase), party, t0);
        blinded_ct.push((s, c, r));
    }

    // Threshold decryption.
    let mut own_shares = Vec::with_capacity(m);
    for k in 0..m {
        let t0 = Instant::now();
        let (s, c, r) = &blinded_ct[k];
        let ds: Vec<G1> = s
            .iter()
            .enumerate()
            .map(|(i, ct)| {
                let d = elgamal::dec_share(servers[k].sk_g, ct);
                match env.tamper.hit(Role::Server(k), TamperPhase::RsmDecShare, i, env.run) {
                    Some(_) => d + p.g1,
                    None => d,
                }
            })
            .collect();
        let dc: Vec<PaillierDecShare> = c.iter().map(|ct| pz.dec_share(servers[k].sk_z, ct)).collect();
        let dr: Vec<PaillierDecShare> = r.iter().map(|ct| pz.dec_share(servers[k].sk_z, ct)).collect();
        let mut w = Writer::new();
        w.seq(&ds).seq(&dc).seq(&dr);
        bus.broadcast(PhaseTag::RsmDecShare, Role::Server(k), w.into_bytes());
        env.timer.record(&proto.phase("decryption"), Role::Server(k), t0);
        own_shares.push((ds, dc, dr));
    }
    let bound = wraparound_bound(m);
    let mut blinded = Vec::new();
    let mut raw = (Vec::new(), Vec::new());
    for (slot, &party) in parties.iter().enumerate() {
        let t0 = Instant::now();
        let mut per_party = Vec::with_capacity(m);
        for j in 0..m {
            let shares = if party == Role::Server(j) {
                own_shares[j].clone()
            } else {
                let msg = bus.recv(party, Role::Server(j), PhaseTag::RsmDecShare)?;
                let mut rd = Reader::trusted(msg);
                let v: (Vec<G1>, Vec<PaillierDecShare>, Vec<PaillierDecShare>) = (rd.seq()?, rd.seq()?, rd.seq()?);
                rd.finish()?;
                v
            };
            check_len(&shares.0, n)?;
            check_len(&shares.1, n)?;
            check_len(&shares.2, n)?;
            per_party.push(shares);
        }
        let s = &blinded_ct[slot].0;
        let mut triples = Vec::with_capacity(n);
        let (mut c_raw, mut r_raw) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let es: Vec<(usize, G1)> = (0..m).map(|j| (j, per_party[j].0[i])).collect();
            let ec: Vec<(usize, PaillierDecShare)> = (0..m).map(|j| (j, per_party[j].1[i].clone())).collect();
            let er: Vec<(usize, PaillierDecShare)> = (0..m).map(|j| (j, per_party[j].2[i].clone())).collect();
            let s_i = elgamal::combine(&s[i], &es, m)?;
            let c_i = pz.combine(&ec, m)?;
            let r_i = pz.combine(&er, m)?;
            if c_i >= bound || r_i >= bound {
                return Err(Error::Wraparound(format!("decrypted sum at position {i} exceeds (m+2)q²")));
            }
            triples.push(BlindedTriple { s: s_i, c: integer_to_scalar(&c_i), r: integer_to_scalar(&r_i) });
            c_raw.push(c_i);
            r_raw.push(r_i);
        }
        env.timer.record(&proto.phase("decryption"), party, t0);
        blinded = triples;
        raw = (c_raw, r_raw);
    }

    // Stage 2.
    let h = HBases::new(p);
    let n_mults = 2 * inp.j_set.len();
    let mut pools = deal_pools(m, n_mults, &mut env.rng(proto.label, Role::Dealer))?;
    let mut proofs = Vec::with_capacity(inp.j_set.len());
    let mut accepted = BTreeSet::new();
    let mut deltas = Vec::new();
    let prove = proto.phase("dpk-prove");
    for &j in inp.j_set {
        // Beaver multiplications among the servers.
        let mut pending = Vec::with_capacity(m);
        let mut own_open = Vec::with_capacity(m);
        for k in 0..m {
            let t0 = Instant::now();
            let (b_s, b_c) = (blinds[k].0[j], blinds[k].1[j]);
            let d0 = random_scalar(&mut srng[k]);
            let (o1, p1) = mult_open(k, &b_s, &b_c, pools[k].take()?);
            let (o2, p2) = mult_open(k, &d0, &b_c, pools[k].take()?);
            let payload = encode_indexed(j, |w| w.put(&o1).put(&o2));
            for other in (0..m).filter(|&o| o != k) {
                bus.send(PhaseTag::RsmMultOpen, Role::Server(k), Role::Server(other), payload.clone());
            }
            env.timer.record(&prove, Role::Server(k), t0);
            pending.push((d0, p1, p2));
            own_open.push((o1, o2));
        }
        let mut witnesses = Vec::with_capacity(m);
        let mut z1_shares = Vec::with_capacity(m);
        for (k, (d0, p1, p2)) in pending.into_iter().enumerate() {
            let t0 = Instant::now();
            let mut ops1 = Vec::with_capacity(m);
            let mut ops2 = Vec::with_capacity(m);
            for other in 0..m {
                let (o1, o2) = if other == k {
                    own_open[k]
                } else {
                    let msg = bus.recv(Role::Server(k), Role::Server(other), PhaseTag::RsmMultOpen)?;
                    decode_indexed(msg, j, |r| Ok::<(MultOpening, MultOpening), DecodeError>((r.get()?, r.get()?)))?
                };
                ops1.push((other, o1));
                ops2.push((other, o2));
            }
            let d1 = p1.finish(&ops1, m)?;
            let d2 = p2.finish(&ops2, m)?;
            let (b_s, b_c, b_r) = (blinds[k].0[j], blinds[k].1[j], blinds[k].2[j]);
            let mut z1 = h.z1_share(&b_s, &d0);
            if env.tamper.hit(Role::Server(k), TamperPhase::RsmZ1Share, j, env.run).is_some() {
                z1 += h.h3;
            }
            bus.broadcast(PhaseTag::RsmZ1Share, Role::Server(k), encode_indexed(j, |w| w.gt(&z1)));
            let mut w = vec![b_s, b_c, b_r, d0, d1, d2];
            for (slot, phase) in [(3, TamperPhase::RsmDelta0), (4, TamperPhase::RsmDelta1)] {
                if env.tamper.hit(Role::Server(k), phase, j, env.run).is_some() {
                    w[slot] += Scalar::from(1u64);
                }
            }
            env.timer.record(&prove, Role::Server(k), t0);
            witnesses.push(w);
            z1_shares.push(z1);
        }
        // Every party multiplies the broadcast 𝔷1 shares.
        let mut z1_views = Vec::with_capacity(m + 1);
        for &party in &parties {
            let t0 = Instant::now();
            let mut z1 = Gt::zero();
            for k in 0..m {
                z1 += if party == Role::Server(k) {
                    z1_shares[k]
                } else {
                    decode_indexed(bus.recv(party, Role::Server(k), PhaseTag::RsmZ1Share)?, j, |r| r.gt())?
                };
            }
            let phase = if party == Role::Querier { "dpk-verify" } else { "dpk-prove" };
            env.timer.record(&proto.phase(phase), party, t0);
            z1_views.push(z1);
        }
        let z1 = z1_views[m];
        if z1_views.iter().any(|z| *z != z1) {
            return Err(Error::Protocol("parties disagree on 𝔷1".into()));
        }
        if env.white_box {
            let sum = |slot: usize| witnesses.iter().map(|w: &Vec<Scalar>| w[slot]).sum::<Scalar>();
            deltas.push((j, [sum(3), sum(4), sum(5)]));
        }
        let build = || p_bbsplus(p, &h, &publish.y, &blinded[j], &inp.v_out[j], &z1);
        let mut proof = run_dpk(proto, &mut bus, env, j, &build, witnesses, &mut srng)?;
        proof.z1 = Some(z1);
        if proof.accepted {
            accepted.insert(j);
        }
        proofs.push(proof);
    }

    let white_box = env.white_box.then(|| {
        let sum = |f: &dyn Fn(usize) -> Scalar| -> Scalar { (0..m).map(f).sum() };
        RsmWhiteBox {
            x: key.x,
            c: publish.quasi.iter().map(|q| q.c).collect(),
            r_hat: publish.quasi.iter().map(|q| q.r_hat).collect(),
            b_s: (0..n).map(|i| sum(&|k| blinds[k].0[i])).collect(),
            b_c: (0..n).map(|i| sum(&|k| blinds[k].1[i])).collect(),
            b_r: (0..n).map(|i| sum(&|k| blinds[k].2[i])).collect(),
            deltas,
            c_raw: raw.0,
            r_raw: raw.1,
        }
    });
    let record = RsmRecord { publish: Some(publish), abort: None, blinded, proofs, accepted };
    Ok(RsmOutput { record, white_box })
}

fn validate(inp: &RsmInputs<'_>, servers: &[RsmServerInput<'_>]) -> Result<()> {
    let n = inp.gammas.len();
    if servers.is_empty() {
        return Err(Error::InvalidParameter("no servers".into()));
    }
    for len in [inp.rho.len(), inp.enc_r.len(), inp.v_out.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
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

type TripleLists = (Vec<EgCiphertext>, Vec<PaillierCiphertext>, Vec<PaillierCiphertext>);

fn encode_triple_lists(
    s: &[EgCiphertext],
    c: &[PaillierCiphertext],
    r: &[PaillierCiphertext],
    pz: &PaillierPublicKey,
) -> Vec<u8> {
    let mut w = Writer::new();
    w.seq(s);
    pz.encode_cts(c, &mut w);
    pz.encode_cts(r, &mut w);
    w.into_bytes()
}

fn decode_triple_lists(msg: &[u8], pz: &PaillierPublicKey) -> Result<TripleLists> {
    let mut r = Reader::trusted(msg);
    let v = (r.seq()?, pz.decode_cts(&mut r)?, pz.decode_cts(&mut r)?);
    r.finish()?;
    Ok(v)
}

impl RsmPublish {
    pub fn encode_with(&self, pz: &PaillierPublicKey, w: &mut Writer) {
        w.g2(&self.y).seq(&self.quasi).seq(&self.enc_s).seq(&self.rand_s);
        pz.encode_cts(&self.enc_c, w);
        encode_alphas(&self.alpha_c, w);
        pz.encode_cts(&self.enc_rhat, w);
        encode_alphas(&self.alpha_rhat, w);
    }

    pub fn to_bytes_with(&self, pz: &PaillierPublicKey) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode_with(pz, &mut w);
        w.into_bytes()
    }

    pub fn decode_with(r: &mut Reader<'_>, pz: &PaillierPublicKey) -> std::result::Result<Self, DecodeError> {
        Ok(Self {
            y: r.g2()?,
            quasi: r.seq()?,
            enc_s: r.seq()?,
            rand_s: r.seq()?,
            enc_c: pz.decode_cts(r)?,
            alpha_c: decode_alphas(r)?,
            enc_rhat: pz.decode_cts(r)?,
            alpha_rhat: decode_alphas(r)?,
        })
    }

    fn decode_trusted(msg: &[u8], pz: &PaillierPublicKey) -> Result<Self> {
        let mut r = Reader::trusted(msg);
        let v = Self::decode_with(&mut r, pz)?;
        r.finish()?;
        Ok(v)
    }
}

fn encode_alphas(a: &[Integer], w: &mut Writer) {
    w.len_prefix(a.len());
    for x in a {
        w.integer(x, ALPHA_BYTES);
    }
}

fn decode_alphas(r: &mut Reader<'_>) -> std::result::Result<Vec<Integer>, DecodeError> {
    let n = r.len_prefix(ALPHA_BYTES)?;
    (0..n).map(|_| r.integer(ALPHA_BYTES)).collect()
}

impl Encode for BlindedTriple {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.s).scalar(&self.c).scalar(&self.r);
    }
}

impl Decode for BlindedTriple {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(Self { s: r.g1()?, c: r.scalar()?, r: r.scalar()? })
    }
}

impl RsmRecord {
    pub fn encode_with(&self, pz: &PaillierPublicKey, w: &mut Writer) {
        match &self.publish {
            Some(p) => {
                w.u8(1);
                p.encode_with(pz, w);
            }
            None => {
                w.u8(0);
            }
        }
        super::record::encode_opt(w, &self.abort);
        w.seq(&self.blinded).seq(&self.proofs);
        let acc: Vec<u32> = self.accepted.iter().map(|&i| i as u32).collect();
        w.seq(&acc);
    }

    pub fn decode_with(r: &mut Reader<'_>, pz: &PaillierPublicKey) -> std::result::Result<Self, DecodeError> {
        let publish = match r.u8()? {
            0 => None,
            1 => Some(RsmPublish::decode_with(r, pz)?),
            _ => return Err(r.err("bad publish flag")),
        };
        let abort = super::record::decode_opt(r)?;
        let blinded = r.seq()?;
        let proofs = r.seq()?;
        let accepted = r.seq::<u32>()?.into_iter().map(|i| i as usize).collect();
        Ok(Self { publish, abort, blinded, proofs, accepted })
    }
}
