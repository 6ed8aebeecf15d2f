use ark_ff::Zero;
use rand::RngCore;

use crate::algebra::{random_scalar, Scalar, SetupParams, G1};
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgPublicKey(pub G1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgSecretShare(pub Scalar);

#[derive(Debug, Clone)]
pub struct EgKeyMaterial {
    pub pk: EgPublicKey,
    pub shares: Vec<EgSecretShare>,
}

/// (g1^ρ, M·pk^ρ)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgCiphertext {
    pub c0: G1,
    pub c1: G1,
}

/// A party's independent key share and its public part g1^sk.
pub fn keygen_party<R: RngCore + ?Sized>(params: &SetupParams, rng: &mut R) -> (EgSecretShare, G1) {
    let sk = random_scalar(rng);
    (EgSecretShare(sk), params.g1 * sk)
}

pub fn combine_pk(parts: &[G1]) -> EgPublicKey {
    EgPublicKey(parts.iter().sum())
}

pub fn keygen<R: RngCore + ?Sized>(params: &SetupParams, m: usize, rng: &mut R) -> EgKeyMaterial {
    let (shares, parts): (Vec<_>, Vec<_>) = (0..m).map(|_| keygen_party(params, rng)).unzip();
    EgKeyMaterial { pk: combine_pk(&parts), shares }
}

/// Public-key side of the scheme.
#[derive(Debug, Clone, Copy)]
pub struct EgScheme<'a> {
    pub params: &'a SetupParams,
    pub pk: EgPublicKey,
}

impl<'a> EgScheme<'a> {
    pub fn new(params: &'a SetupParams, pk: EgPublicKey) -> Self {
        Self { params, pk }
    }

    pub fn enc_with(&self, msg: &G1, rho: &Scalar) -> EgCiphertext {
        EgCiphertext { c0: self.params.g1 * rho, c1: *msg + self.pk.0 * rho }
    }

    pub fn enc<R: RngCore + ?Sized>(&self, msg: &G1, rng: &mut R) -> EgCiphertext {
        self.enc_with(msg, &random_scalar(rng))
    }

    pub fn renc<R: RngCore + ?Sized>(&self, ct: &EgCiphertext, rng: &mut R) -> EgCiphertext {
        mul(ct, &self.enc(&G1::zero(), rng))
    }
}

/// Raises the plaintext to `b`.
pub fn exp(ct: &EgCiphertext, b: &Scalar) -> EgCiphertext {
    EgCiphertext { c0: ct.c0 * b, c1: ct.c1 * b }
}

/// Multiplies the plaintexts.
pub fn mul(a: &EgCiphertext, b: &EgCiphertext) -> EgCiphertext {
    EgCiphertext { c0: a.c0 + b.c0, c1: a.c1 + b.c1 }
}

pub fn dec_share(sk: &EgSecretShare, ct: &EgCiphertext) -> G1 {
    ct.c0 * sk.0
}

/// c1 / Π c0^{sk_k}; needs exactly one share from each of the `m` parties.
pub fn combine(ct: &EgCiphertext, shares: &[(usize, G1)], m: usize) -> Result<G1> {
    let mut seen = vec![false; m];
    let mut acc = G1::zero();
    for (k, s) in shares {
        let slot = seen.get_mut(*k).ok_or(Error::MissingParty(*k))?;
        if *slot {
            return Err(Error::DuplicateParty(*k));
        }
        *slot = true;
        acc += s;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::MissingParty(k));
    }
    Ok(ct.c1 - acc)
}

/// Local threshold decryption with every share in hand.
pub fn tdec(ct: &EgCiphertext, keys: &[EgSecretShare]) -> Result<G1> {
    let shares: Vec<_> = keys.iter().enumerate().map(|(k, sk)| (k, dec_share(sk, ct))).collect();
    combine(ct, &shares, keys.len())
}

impl Encode for EgCiphertext {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.c0).g1(&self.c1);
    }
}

impl Decode for EgCiphertext {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(EgCiphertext { c0: r.g1()?, c1: r.g1()? })
    }
}

impl Encode for EgPublicKey {
    fn encode(&self, w: &mut Writer) {
        w.g1(&self.0);
    }
}

impl Decode for EgPublicKey {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(EgPublicKey(r.g1()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::setup;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn params() -> SetupParams {
        setup(b"eg", 1, 1).unwrap()
    }

    #[test]
    fn single_party_pk() {
        let p = params();
        let keys = keygen(&p, 1, &mut ChaCha20Rng::seed_from_u64(0));
        assert_eq!(keys.pk.0, p.g1 * keys.shares[0].0);
    }

    #[test]
    fn partial_decryption_is_an_error() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let keys = keygen(&p, 3, &mut rng);
        let ct = EgScheme::new(&p, keys.pk).enc(&p.f1, &mut rng);
        let two: Vec<_> = (0..2).map(|k| (k, dec_share(&keys.shares[k], &ct))).collect();
        assert!(matches!(combine(&ct, &two, 3), Err(Error::MissingParty(2))));
        let dup = vec![two[0], two[0], two[1]];
        assert!(matches!(combine(&ct, &dup, 3), Err(Error::DuplicateParty(0))));
    }

    #[test]
    fn exp_zero_gives_identity() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let keys = keygen(&p, 2, &mut rng);
        let ct = EgScheme::new(&p, keys.pk).enc(&p.h1, &mut rng);
        assert!(tdec(&exp(&ct, &Scalar::zero()), &keys.shares).unwrap().is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn homomorphisms(seed in any::<u64>(), m in 1usize..=4) {
            let p = params();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let keys = keygen(&p, m, &mut rng);
            let eg = EgScheme::new(&p, keys.pk);
            let (a, b, e) = (random_scalar(&mut rng), random_scalar(&mut rng), random_scalar(&mut rng));
            let (m1, m2) = (p.g1 * a, p.g1 * b);
            let (c1, c2) = (eg.enc(&m1, &mut rng), eg.enc(&m2, &mut rng));
            prop_assert_eq!(tdec(&c1, &keys.shares).unwrap(), m1);
            prop_assert_eq!(tdec(&mul(&c1, &c2), &keys.shares).unwrap(), m1 + m2);
            prop_assert_eq!(tdec(&exp(&c1, &e), &keys.shares).unwrap(), m1 * e);
            let re = eg.renc(&c1, &mut rng);
            prop_assert_ne!(re, c1);
            prop_assert_eq!(tdec(&re, &keys.shares).unwrap(), m1);
        }
    }
}
