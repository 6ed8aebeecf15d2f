//! Boneh-Boyen and BBS+ signatures on scalars, plus BBS+ quasi-signatures
//! issued against Pedersen commitments.

use ark_ff::{Field, Zero};
use rand::RngCore;

use crate::algebra::{multi_pairing, random_nonzero_scalar, random_scalar, Scalar, SetupParams, G1, G2};
use crate::commitment::Commitment;
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, Copy)]
pub struct BBKeyPair {
    pub x: Scalar,
    pub y: G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBSignature(pub G1);

#[derive(Debug, Clone, Copy)]
pub struct BBSPlusKeyPair {
    pub x: Scalar,
    pub y: G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBSPlusSignature {
    pub s: G1,
    pub c: Scalar,
    pub r: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuasiBBSPlusSignature {
    pub s: G1,
    pub c: Scalar,
    pub r_hat: Scalar,
}

/// Placeholder published for indices outside the signed set in set membership.
pub fn bb_fake(params: &SetupParams) -> BBSignature {
    BBSignature(params.g1)
}

/// Placeholder S component for indices outside the signed set in reverse set
/// membership.
pub fn bbsplus_fake_s() -> G1 {
    G1::zero()
}

pub fn bb_keygen<R: RngCore + ?Sized>(params: &SetupParams, rng: &mut R) -> BBKeyPair {
    let x = random_scalar(rng);
    BBKeyPair { x, y: params.g2 * x }
}

pub fn bb_sign(params: &SetupParams, key: &BBKeyPair, v: &Scalar) -> Result<BBSignature> {
    let inv = (key.x + v).inverse().ok_or(Error::DegenerateMessage)?;
    Ok(BBSignature(params.g1 * inv))
}

/// e(σ, y·g2^v) = e(g1, g2)
pub fn bb_verify(params: &SetupParams, y: &G2, v: &Scalar, sig: &BBSignature) -> bool {
    multi_pairing(&[sig.0, -params.g1], &[*y + params.g2 * v, params.g2]).is_zero()
}

pub fn bbsplus_keygen<R: RngCore + ?Sized>(params: &SetupParams, rng: &mut R) -> BBSPlusKeyPair {
    let x = random_nonzero_scalar(rng);
    BBSPlusKeyPair { x, y: params.f2 * x }
}

/// Samples c with c + x invertible.
fn fresh_c<R: RngCore + ?Sized>(key: &BBSPlusKeyPair, rng: &mut R) -> (Scalar, Scalar) {
    loop {
        let c = random_scalar(rng);
        if let Some(inv) = (c + key.x).inverse() {
            return (c, inv);
        }
    }
}

fn message_base(params: &SetupParams, v: &Scalar, r: &Scalar) -> G1 {
    params.f1 + params.g1 * v + params.h1 * r
}

pub fn bbsplus_sign<R: RngCore + ?Sized>(
    params: &SetupParams,
    key: &BBSPlusKeyPair,
    v: &Scalar,
    rng: &mut R,
) -> BBSPlusSignature {
    let (c, inv) = fresh_c(key, rng);
    let r = random_scalar(rng);
    BBSPlusSignature { s: message_base(params, v, &r) * inv, c, r }
}

/// e(S, y·f2^c) = e(f1 g1^v h1^r, f2)
pub fn bbsplus_verify(params: &SetupParams, y: &G2, v: &Scalar, sig: &BBSPlusSignature) -> bool {
    multi_pairing(&[sig.s, -message_base(params, v, &sig.r)], &[*y + params.f2 * sig.c, params.f2]).is_zero()
}

/// Signs the value hidden in `gamma`. The caller must already have checked a
/// proof of knowledge of the opening.
pub fn quasi_sign<R: RngCore + ?Sized>(
    params: &SetupParams,
    key: &BBSPlusKeyPair,
    gamma: &Commitment,
    rng: &mut R,
) -> QuasiBBSPlusSignature {
    let (c, inv) = fresh_c(key, rng);
    let r_hat = random_scalar(rng);
    QuasiBBSPlusSignature { s: (params.f1 + params.h1 * r_hat + gamma.0) * inv, c, r_hat }
}

/// e(S, y·f2^c) = e(f1 h1^r̂ γ, f2)
pub fn verq(params: &SetupParams, sig: &QuasiBBSPlusSignature, gamma: &Commitment, y: &G2) -> bool {
    let base = params.f1 + params.h1 * sig.r_hat + gamma.0;
    multi_pairing(&[sig.s, -base], &[*y + params.f2 * sig.c, params.f2]).is_zero()
}

pub fn derive_from_quasi(sig: &QuasiBBSPlusSignature, r: &Scalar) -> BBSPlusSignature {
    BBSPlusSignature { s: sig.s, c: sig.c, r: sig.r_hat + r }
}

impl Encode for BBSignature {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.0);
    }
}

impl Decode for BBSignature {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(BBSignature(r.g1()?))
    }
}

impl Encode for BBSPlusSignature {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.s).scalar(&self.c).scalar(&self.r);
    }
}

impl Decode for BBSPlusSignature {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(BBSPlusSignature { s: r.g1()?, c: r.scalar()?, r: r.scalar()? })
    }
}

impl Encode for QuasiBBSPlusSignature {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.s).scalar(&self.c).scalar(&self.r_hat);
    }
}

impl Decode for QuasiBBSPlusSignature {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(QuasiBBSPlusSignature { s: r.g1()?, c: r.scalar()?, r_hat: r.scalar()? })
    }
}
