//! Share channel: hashed ElGamal on G1 with plaintexts in Z_q.

use rand::RngCore;

use crate::algebra::{hash_to_challenge, random_scalar, Scalar, SetupParams, G1};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

const MASK_TAG: &[u8] = b"share-channel-mask";

#[derive(Debug, Clone, Copy)]
pub struct PkeSecretKey(pub Scalar);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PkePublicKey(pub G1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PkeCiphertext {
    pub u: G1,
    pub w: Scalar,
}

pub fn keygen<R: RngCore + ?Sized>(params: &SetupParams, rng: &mut R) -> (PkeSecretKey, PkePublicKey) {
    let sk = random_scalar(rng);
    (PkeSecretKey(sk), PkePublicKey(params.g1 * sk))
}

fn mask(pk: &PkePublicKey, shared: &G1) -> Scalar {
    let mut w = Writer::new();
    w.g1(&pk.0).g1(shared);
    hash_to_challenge(MASK_TAG, &w.into_bytes())
}

pub fn enc<R: RngCore + ?Sized>(params: &SetupParams, pk: &PkePublicKey, s: &Scalar, rng: &mut R) -> PkeCiphertext {
    let rho = random_scalar(rng);
    PkeCiphertext { u: params.g1 * rho, w: *s + mask(pk, &(pk.0 * rho)) }
}

pub fn dec(sk: &PkeSecretKey, pk: &PkePublicKey, ct: &PkeCiphertext) -> Scalar {
    ct.w - mask(pk, &(ct.u * sk.0))
}

impl Encode for PkeCiphertext {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.u).scalar(&self.w);
    }
}

impl Decode for PkeCiphertext {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(PkeCiphertext { u: r.g1()?, w: r.scalar()? })
    }
}

impl Encode for PkePublicKey {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.0);
    }
}

impl Decode for PkePublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(PkePublicKey(r.g1()?))
    }
}
