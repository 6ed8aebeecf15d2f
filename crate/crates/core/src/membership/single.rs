//! Single-prover set membership and reverse set membership, used as
//! reference oracles for the distributed protocols.
//!
//! The Σ-protocols here are written out by hand against concrete groups and
//! share no code with [`crate::dpk`].

use rand::RngCore;

use crate::algebra::{hash_to_challenge, multi_pairing, pairing, random_scalar, Gt, Scalar, SetupParams, G1, G2};
use crate::commitment::{commit, prove_opening, verify_opening, Commitment, Opening};
use crate::signatures::{
    bb_fake, bb_keygen, bb_sign, bbsplus_fake_s, bbsplus_keygen, quasi_sign, QuasiBBSPlusSignature,
};
use crate::wire::Writer;

const SM_TAG: &[u8] = b"single-sm";
const RSM_TAG: &[u8] = b"single-rsm";

/// Prover's message for set membership: the blinded signature and the
/// Fiat-Shamir proof of (v, r, b).
#[derive(Debug, Clone, Copy)]
pub struct SmProof {
    pub sigma: G1,
    pub a1: G1,
    pub a2: Gt,
    pub z: [Scalar; 3],
}

/// `γ = g1^v h1^r` and `e(σ̃, y) = e(g1,g2)^b e(σ̃,g2)^-v`.
fn sm_statement(params: &SetupParams, y: &G2, sigma: &G1) -> (Gt, Gt, Gt) {
    (pairing(sigma, y), params.e_g1_g2, pairing(sigma, &params.g2))
}

fn sm_challenge(gamma: &Commitment, y: &G2, sigma: &G1, a1: &G1, a2: &Gt) -> Scalar {
    let mut w = Writer::new();
    w.g1(&gamma.0).g2(y).g1(sigma).g1(a1).gt(a2);
    hash_to_challenge(SM_TAG, &w.into_bytes())
}

pub fn sm_prove<R: RngCore + ?Sized>(
    params: &SetupParams,
    gamma: &Commitment,
    opening: &Opening,
    y: &G2,
    sig: &G1,
    rng: &mut R,
) -> SmProof {
    let b = random_scalar(rng);
    let sigma = *sig * b;
    let (_, e_gg, e_sg) = sm_statement(params, y, &sigma);
    let k = [random_scalar(rng), random_scalar(rng), random_scalar(rng)];
    let a1 = params.g1 * k[0] + params.h1 * k[1];
    let a2 = e_gg * k[2] - e_sg * k[0];
    let c = sm_challenge(gamma, y, &sigma, &a1, &a2);
    let w = [opening.v, opening.r, b];
    SmProof { sigma, a1, a2, z: [k[0] + c * w[0], k[1] + c * w[1], k[2] + c * w[2]] }
}

pub fn sm_verify(params: &SetupParams, gamma: &Commitment, y: &G2, proof: &SmProof) -> bool {
    let (lhs, e_gg, e_sg) = sm_statement(params, y, &proof.sigma);
    let c = sm_challenge(gamma, y, &proof.sigma, &proof.a1, &proof.a2);
    let [zv, zr, zb] = proof.z;
    params.g1 * zv + params.h1 * zr == proof.a1 + gamma.0 * c && e_gg * zb - e_sg * zv == proof.a2 + lhs * c
}

/// The verifier signs every element of `phi` under a fresh key; the prover
/// blinds the signature on its value, or the fake one when it has none.
pub fn single_prover_sm<R: RngCore + ?Sized>(
    params: &SetupParams,
    gamma: &Commitment,
    phi: &[Scalar],
    opening: &Opening,
    rng: &mut R,
) -> bool {
    let key = bb_keygen(params, rng);
    let sigs: Vec<(Scalar, G1)> = phi.iter().filter_map(|v| bb_sign(params, &key, v).ok().map(|s| (*v, s.0))).collect();
    let sig = sigs.iter().find(|(v, _)| *v == opening.v).map_or(bb_fake(params).0, |(_, s)| *s);
    let proof = sm_prove(params, gamma, opening, &key.y, &sig, rng);
    sm_verify(params, gamma, &key.y, &proof)
}

/// Prover's messages for reverse set membership.
#[derive(Debug, Clone, Copy)]
pub struct RsmProof {
    pub s: G1,
    pub c: Scalar,
    pub r: Scalar,
    pub z1: Gt,
    pub a: [Gt; 3],
    pub z: [Scalar; 6],
}

struct RsmBases {
    h1: Gt,
    h2: Gt,
    h3: Gt,
    g1: Gt,
    g2: Gt,
    z2: Gt,
}

fn rsm_bases(params: &SetupParams, y: &G2, v: &Scalar, s: &G1, c: &Scalar, r: &Scalar) -> RsmBases {
    let yc = *y + params.f2 * c;
    let msg = params.f1 + params.g1 * v + params.h1 * r;
    RsmBases {
        h1: -pairing(&params.h1, &params.f2),
        h2: -pairing(&params.g1, &params.f2),
        h3: params.ft,
        g1: pairing(s, &params.f2),
        g2: pairing(&params.g1, &yc),
        z2: multi_pairing(&[*s, -msg], &[yc, params.f2]),
    }
}

// Witness order: b_S, b_c, b_r, δ0, δ1, δ2.
fn rsm_first(b: &RsmBases, z1: &Gt, k: &[Scalar; 6]) -> [Gt; 3] {
    [
        b.h2 * k[0] + b.h3 * k[3],
        b.h2 * k[4] + b.h3 * k[5] - *z1 * k[1],
        b.g1 * k[1] + b.g2 * k[0] + b.h1 * k[2] + b.h2 * k[4],
    ]
}

fn rsm_challenge(y: &G2, v: &Scalar, p: &RsmProof) -> Scalar {
    let mut w = Writer::new();
    w.g2(y).scalar(v).g1(&p.s).scalar(&p.c).scalar(&p.r).gt(&p.z1);
    for a in &p.a {
        w.gt(a);
    }
    hash_to_challenge(RSM_TAG, &w.into_bytes())
}

/// Blinds `(S, c, r)` and proves knowledge of a BBS+ signature on `v`
/// hidden under the blinds.
pub fn rsm_prove<R: RngCore + ?Sized>(
    params: &SetupParams,
    y: &G2,
    v: &Scalar,
    sig: (G1, Scalar, Scalar),
    rng: &mut R,
) -> RsmProof {
    let (bs, bc, br, d0) = (random_scalar(rng), random_scalar(rng), random_scalar(rng), random_scalar(rng));
    let w = [bs, bc, br, d0, bs * bc, d0 * bc];
    let (s, c, r) = (sig.0 + params.g1 * bs, sig.1 + bc, sig.2 + br);
    let bases = rsm_bases(params, y, v, &s, &c, &r);
    let z1 = bases.h2 * bs + bases.h3 * d0;
    let k: [Scalar; 6] = std::array::from_fn(|_| random_scalar(rng));
    let a = rsm_first(&bases, &z1, &k);
    let mut proof = RsmProof { s, c, r, z1, a, z: [Scalar::from(0u64); 6] };
    let ch = rsm_challenge(y, v, &proof);
    proof.z = std::array::from_fn(|i| k[i] + ch * w[i]);
    proof
}

pub fn rsm_verify(params: &SetupParams, y: &G2, v: &Scalar, proof: &RsmProof) -> bool {
    let b = rsm_bases(params, y, v, &proof.s, &proof.c, &proof.r);
    let ch = rsm_challenge(y, v, proof);
    let lhs = rsm_first(&b, &proof.z1, &proof.z);
    let targets = [proof.z1, Gt::default(), b.z2];
    (0..3).all(|i| lhs[i] == proof.a[i] + targets[i] * ch)
}

/// The prover sends opening proofs for every commitment in `phi`, the
/// verifier quasi-signs each one under a single key, and the prover proves
/// it holds a signature on `v`. With no commitment to `v` the prover uses
/// the fake `S` and the proof fails.
pub fn single_prover_rsm<R: RngCore + ?Sized>(
    params: &SetupParams,
    phi: &[(Commitment, Opening)],
    v: &Scalar,
    rng: &mut R,
) -> bool {
    for (gamma, opening) in phi {
        let Ok(rho) = prove_opening(params, gamma, opening, rng) else { return false };
        if !verify_opening(params, gamma, &rho) {
            return false;
        }
    }
    let key = bbsplus_keygen(params, rng);
    let quasi: Vec<QuasiBBSPlusSignature> = phi.iter().map(|(g, _)| quasi_sign(params, &key, g, rng)).collect();
    let sig = phi
        .iter()
        .zip(&quasi)
        .find(|((g, o), _)| o.v == *v && commit(params, &o.v, &o.r) == *g)
        .map(|((_, o), q)| (q.s, q.c, q.r_hat + o.r))
        .unwrap_or_else(|| (bbsplus_fake_s(), random_scalar(rng), random_scalar(rng)));
    let proof = rsm_prove(params, &key.y, v, sig, rng);
    rsm_verify(params, &key.y, v, &proof)
}
