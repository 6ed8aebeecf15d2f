//! Pedersen commitments `g1^v h1^r` and Schnorr-style proofs of opening.

use rand::RngCore;

use crate::algebra::{hash_to_challenge, random_scalar, Scalar, SetupParams, G1};
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

pub const OPENING_TAG: &[u8] = b"pok-opening";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commitment(pub G1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Opening {
    pub v: Scalar,
    pub r: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpeningProof {
    pub a: G1,
    pub c: Scalar,
    pub z_v: Scalar,
    pub z_r: Scalar,
}

pub fn commit(params: &SetupParams, v: &Scalar, r: &Scalar) -> Commitment {
    Commitment(params.g1 * v + params.h1 * r)
}

impl Commitment {
    /// Homomorphic combination: commits to the sums of the openings.
    pub fn combine(&self, other: &Commitment) -> Commitment {
        Commitment(self.0 + other.0)
    }
}

fn opening_challenge(params: &SetupParams, gamma: &Commitment, a: &G1) -> Scalar {
    let mut w = Writer::new();
    w.raw(&params.generator_bytes()).g1(&gamma.0).g1(a);
    hash_to_challenge(OPENING_TAG, &w.into_bytes())
}

pub fn prove_opening<R: RngCore + ?Sized>(
    params: &SetupParams,
    gamma: &Commitment,
    opening: &Opening,
    rng: &mut R,
) -> Result<OpeningProof> {
    if commit(params, &opening.v, &opening.r) != *gamma {
        return Err(Error::OpeningMismatch);
    }
    let (k_v, k_r) = (random_scalar(rng), random_scalar(rng));
    let a = params.g1 * k_v + params.h1 * k_r;
    let c = opening_challenge(params, gamma, &a);
    Ok(OpeningProof { a, c, z_v: k_v - c * opening.v, z_r: k_r - c * opening.r })
}

pub fn verify_opening(params: &SetupParams, gamma: &Commitment, proof: &OpeningProof) -> bool {
    proof.c == opening_challenge(params, gamma, &proof.a)
        && proof.a == gamma.0 * proof.c + params.g1 * proof.z_v + params.h1 * proof.z_r
}

impl Encode for Commitment {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.0);
    }
}

impl Decode for Commitment {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(Commitment(r.g1()?))
    }
}

impl Encode for OpeningProof {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.a).scalar(&self.c).scalar(&self.z_v).scalar(&self.z_r);
    }
}

impl Decode for OpeningProof {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(OpeningProof { a: r.g1()?, c: r.scalar()?, z_v: r.scalar()?, z_r: r.scalar()? })
    }
}
