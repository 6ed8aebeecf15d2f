//! BN254 group context: generators, canonical encodings and challenge hashing.

use std::sync::OnceLock;

use ark_bn254::{Bn254, Fq, Fq2, G1Affine, G2Affine};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::AffineRepr;
use ark_ff::{BigInteger, Field, PrimeField, UniformRand, Zero};
use rand::RngCore;
use rug::integer::Order;
use rug::Integer;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::wire::{DecodeError, Encode, Reader, Writer};

pub type Scalar = ark_bn254::Fr;
pub type G1 = ark_bn254::G1Projective;
pub type G2 = ark_bn254::G2Projective;
pub type Gt = PairingOutput<Bn254>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum GroupId {
    G1 = 1,
    G2 = 2,
    Gt = 3,
}

impl GroupId {
    pub fn from_u8(b: u8) -> Option<Self> {
        match b {
            1 => Some(Self::G1),
            2 => Some(Self::G2),
            3 => Some(Self::Gt),
            _ => None,
        }
    }

    /// Encoded length including the id byte.
    pub fn encoded_len(self) -> usize {
        1 + match self {
            Self::G1 => 32,
            Self::G2 => 64,
            Self::Gt => 384,
        }
    }
}

/// An element of one of the three groups, written multiplicatively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupElement {
    G1(G1),
    G2(G2),
    Gt(Gt),
}

impl GroupElement {
    pub fn group_id(&self) -> GroupId {
        match self {
            Self::G1(_) => GroupId::G1,
            Self::G2(_) => GroupId::G2,
            Self::Gt(_) => GroupId::Gt,
        }
    }

    pub fn identity(id: GroupId) -> Self {
        match id {
            GroupId::G1 => Self::G1(G1::zero()),
            GroupId::G2 => Self::G2(G2::zero()),
            GroupId::Gt => Self::Gt(Gt::zero()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Self::G1(p) => p.is_zero(),
            Self::G2(p) => p.is_zero(),
            Self::Gt(p) => p.is_zero(),
        }
    }

    /// Group operation. Panics if the operands live in different groups.
    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::G1(a), Self::G1(b)) => Self::G1(*a + b),
            (Self::G2(a), Self::G2(b)) => Self::G2(*a + b),
            (Self::Gt(a), Self::Gt(b)) => Self::Gt(*a + b),
            _ => panic!("group mismatch: {:?} * {:?}", self.group_id(), other.group_id()),
        }
    }

    pub fn pow(&self, e: &Scalar) -> Self {
        match self {
            Self::G1(a) => Self::G1(*a * e),
            Self::G2(a) => Self::G2(*a * e),
            Self::Gt(a) => Self::Gt(*a * e),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Self::G1(a) => Self::G1(-*a),
            Self::G2(a) => Self::G2(-*a),
            Self::Gt(a) => Self::Gt(-*a),
        }
    }
}

/// Public parameters. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetupParams {
    pub seed: Vec<u8>,
    pub m: usize,
    pub n: usize,
    pub f1: G1,
    pub g1: G1,
    pub h1: G1,
    pub f2: G2,
    pub g2: G2,
    pub ft: Gt,
    /// e(g1, g2)
    pub e_g1_g2: Gt,
    /// e(g1, f2)
    pub e_g1_f2: Gt,
    /// e(h1, f2)
    pub e_h1_f2: Gt,
}

pub fn setup(seed: &[u8], m: usize, n: usize) -> Result<SetupParams> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let f1 = hash_to_g1(seed, b"f1");
    let g1 = hash_to_g1(seed, b"g1");
    let h1 = hash_to_g1(seed, b"h1");
    let f2 = hash_to_g2(seed, b"f2");
    let g2 = hash_to_g2(seed, b"g2");
    let ft = pairing(&hash_to_g1(seed, b"fT/1"), &hash_to_g2(seed, b"fT/2"));
    Ok(SetupParams {
        seed: seed.to_vec(),
        m,
        n,
        f1,
        g1,
        h1,
        f2,
        g2,
        ft,
        e_g1_g2: pairing(&g1, &g2),
        e_g1_f2: pairing(&g1, &f2),
        e_h1_f2: pairing(&h1, &f2),
    })
}

impl SetupParams {
    /// Generator encodings bound into every Fiat-Shamir challenge.
    pub fn generator_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.g1(&self.f1).g1(&self.g1).g1(&self.h1).g2(&self.f2).g2(&self.g2).gt(&self.ft);
        w.into_bytes()
    }
}

impl Encode for SetupParams {
    fn encode(&self, w: &mut Writer) {
        w.bytes(&self.seed).u32(self.m as u32).u32(self.n as u32);
        w.g1(&self.f1).g1(&self.g1).g1(&self.h1).g2(&self.f2).g2(&self.g2).gt(&self.ft);
    }
}

impl SetupParams {
    /// Reads encoded params and checks they are exactly what `setup` derives
    /// from the embedded seed.
    pub fn decode_checked(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        let at = r.offset();
        let seed = r.bytes()?.to_vec();
        let m = r.u32()? as usize;
        let n = r.u32()? as usize;
        let gens = (r.g1()?, r.g1()?, r.g1()?, r.g2()?, r.g2()?, r.gt()?);
        let params = setup(&seed, m, n).map_err(|e| DecodeError { offset: at, what: e.to_string() })?;
        if gens != (params.f1, params.g1, params.h1, params.f2, params.g2, params.ft) {
            return Err(DecodeError { offset: at, what: "generators do not match seed".into() });
        }
        Ok(params)
    }
}

pub fn pairing(a: &G1, b: &G2) -> Gt {
    Bn254::pairing(*a, *b)
}

/// Product of pairings, sharing one final exponentiation.
pub fn multi_pairing(a: &[G1], b: &[G2]) -> Gt {
    Bn254::multi_pairing(a.iter().copied(), b.iter().copied())
}

fn h2c_digest(seed: &[u8], label: &[u8], ctr: u32, part: u8) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"tracemix/h2c");
    h.update((seed.len() as u32).to_be_bytes());
    h.update(seed);
    h.update((label.len() as u32).to_be_bytes());
    h.update(label);
    h.update(ctr.to_be_bytes());
    h.update([part]);
    h.finalize().into()
}

/// Try-and-increment. G1 has cofactor 1 on BN254, so any curve point is in
/// the prime-order group.
fn hash_to_g1(seed: &[u8], label: &[u8]) -> G1 {
    for ctr in 0u32.. {
        let x = Fq::from_be_bytes_mod_order(&h2c_digest(seed, label, ctr, 0));
        if let Some(p) = G1Affine::get_point_from_x_unchecked(x, false) {
            if !p.is_zero() {
                return p.into_group();
            }
        }
    }
    unreachable!()
}

fn hash_to_g2(seed: &[u8], label: &[u8]) -> G2 {
    for ctr in 0u32.. {
        let x = Fq2::new(
            Fq::from_be_bytes_mod_order(&h2c_digest(seed, label, ctr, 0)),
            Fq::from_be_bytes_mod_order(&h2c_digest(seed, label, ctr, 1)),
        );
        if let Some(p) = G2Affine::get_point_from_x_unchecked(x, false) {
            let p = p.clear_cofactor();
            if !p.is_zero() {
                return p.into_group();
            }
        }
    }
    unreachable!()
}

/// SHA-256 of `len(tag) || tag || transcript`, read big-endian and reduced mod q.
pub fn hash_to_challenge(domain_tag: &[u8], transcript: &[u8]) -> Scalar {
    let mut h = Sha256::new();
    h.update((domain_tag.len() as u32).to_be_bytes());
    h.update(domain_tag);
    h.update(transcript);
    Scalar::from_be_bytes_mod_order(&h.finalize())
}

pub fn random_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
    let mut rng = rng;
    Scalar::rand(&mut rng)
}

pub fn random_nonzero_scalar<R: RngCore + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = random_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn scalar_to_bytes(s: &Scalar) -> [u8; 32] {
    let v = s.into_bigint().to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - v.len()..].copy_from_slice(&v);
    out
}

/// Canonical decoding: rejects encodings of integers >= q.
pub fn scalar_from_bytes(b: &[u8]) -> Option<Scalar> {
    if b.len() != 32 {
        return None;
    }
    let s = Scalar::from_be_bytes_mod_order(b);
    (scalar_to_bytes(&s) == b).then_some(s)
}

pub fn scalar_inverse(s: &Scalar) -> Option<Scalar> {
    s.inverse()
}

/// q as an arbitrary-precision integer.
pub fn q_integer() -> &'static Integer {
    static Q: OnceLock<Integer> = OnceLock::new();
    Q.get_or_init(|| Integer::from_digits(&Scalar::MODULUS.to_bytes_be(), Order::Msf))
}

pub fn scalar_to_integer(s: &Scalar) -> Integer {
    Integer::from_digits(&scalar_to_bytes(s), Order::Msf)
}

/// Reduces a nonnegative integer mod q.
pub fn integer_to_scalar(x: &Integer) -> Scalar {
    let r = Integer::from(x % q_integer());
    let r = if r.cmp0().is_lt() { r + q_integer() } else { r };
    Scalar::from_be_bytes_mod_order(&r.to_digits::<u8>(Order::Msf))
}
