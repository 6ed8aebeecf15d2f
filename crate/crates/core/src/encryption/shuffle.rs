//! Sequential re-encryption shuffle.
//!
//! A hop with permutation `p` maps an input list to `out[j] = renc(in[p(j)])`.
//! After hops p1, ..., pm the output slot j holds input slot
//! `p1(p2(...pm(j)))`, which [`compose`] computes.

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::encryption::elgamal::{EgCiphertext, EgScheme};
use crate::encryption::paillier::{PaillierCiphertext, PaillierPublicKey};
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPermutation(n));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(&mut RngAdapter(rng));
        Self(map)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (j, &x) in self.0.iter().enumerate() {
            inv[x] = j;
        }
        Self(inv)
    }

    /// `out[j] = items[self(j)]`
    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.0.len() {
            return Err(Error::LengthMismatch { expected: self.0.len(), got: items.len() });
        }
        Ok(self.0.iter().map(|&i| items[i].clone()).collect())
    }
}

/// Position map of the hops `perms[0], perms[1], ...` applied in order.
pub fn compose(perms: &[Permutation]) -> Result<Permutation> {
    let n = perms.first().map_or(0, Permutation::len);
    let mut acc = Permutation::identity(n);
    for p in perms {
        if p.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: p.len() });
        }
        acc = Permutation(p.0.iter().map(|&j| acc.0[j]).collect());
    }
    Ok(acc)
}

// `SliceRandom::shuffle` wants a sized `Rng`.
struct RngAdapter<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

pub trait ReEncrypt {
    type Ciphertext: Clone;
    fn reencrypt(&self, ct: &Self::Ciphertext, rng: &mut dyn RngCore) -> Self::Ciphertext;
}

impl ReEncrypt for EgScheme<'_> {
    type Ciphertext = EgCiphertext;
    fn reencrypt(&self, ct: &EgCiphertext, rng: &mut dyn RngCore) -> EgCiphertext {
        self.renc(ct, rng)
    }
}

impl ReEncrypt for PaillierPublicKey {
    type Ciphertext = PaillierCiphertext;
    fn reencrypt(&self, ct: &PaillierCiphertext, rng: &mut dyn RngCore) -> PaillierCiphertext {
        self.renc(ct, rng)
    }
}

/// One party's step: re-encrypt everything, then permute.
pub fn hop<S: ReEncrypt + ?Sized>(
    scheme: &S,
    list: &[S::Ciphertext],
    perm: &Permutation,
    rng: &mut dyn RngCore,
) -> Result<Vec<S::Ciphertext>> {
    let fresh: Vec<_> = list.iter().map(|c| scheme.reencrypt(c, rng)).collect();
    perm.apply(&fresh)
}

/// Hops in party order 1..m; returns every intermediate list.
pub fn shuffle<S: ReEncrypt + ?Sized>(
    scheme: &S,
    list: &[S::Ciphertext],
    perms: &[Permutation],
    rng: &mut dyn RngCore,
) -> Result<Vec<S::Ciphertext>> {
    let mut cur = list.to_vec();
    for p in perms {
        cur = hop(scheme, &cur, p, rng)?;
    }
    Ok(cur)
}

/// Hops in party order m..1, each with its inverse permutation; undoes
/// [`shuffle`] with the same permutations.
pub fn shuffle_reverse<S: ReEncrypt + ?Sized>(
    scheme: &S,
    list: &[S::Ciphertext],
    perms: &[Permutation],
    rng: &mut dyn RngCore,
) -> Result<Vec<S::Ciphertext>> {
    let mut cur = list.to_vec();
    for p in perms.iter().rev() {
        cur = hop(scheme, &cur, &p.inverse(), rng)?;
    }
    Ok(cur)
}

impl Encode for Permutation {
    fn encode(&self, w: &mut Writer) {
        w.len_prefix(self.0.len());
        for &x in &self.0 {
            w.u32(x as u32);
        }
    }
}

impl Decode for Permutation {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        let at = r.offset();
        let n = r.len_prefix(4)?;
        let map = (0..n).map(|_| r.u32().map(|x| x as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
        Permutation::new(map).map_err(|e| DecodeError { offset: at, what: e.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_scalar, setup, G1};
    use crate::encryption::elgamal;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn rejects_non_permutations() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn length_mismatch() {
        let p = Permutation::identity(3);
        assert!(p.apply(&[1, 2]).is_err());
        assert!(compose(&[Permutation::identity(2), Permutation::identity(3)]).is_err());
    }

    #[test]
    fn composition_by_hand() {
        // hop 1: [2,0,1], hop 2: [1,2,0]; slot j ends up holding p1(p2(j)).
        let p1 = Permutation::new(vec![2, 0, 1]).unwrap();
        let p2 = Permutation::new(vec![1, 2, 0]).unwrap();
        let items = ['a', 'b', 'c'];
        let after = p2.apply(&p1.apply(&items).unwrap()).unwrap();
        assert_eq!(after, vec!['a', 'b', 'c']);
        assert_eq!(compose(&[p1, p2]).unwrap(), Permutation::identity(3));
    }

    fn eg_setup(m: usize, seed: u64) -> (crate::algebra::SetupParams, elgamal::EgKeyMaterial, ChaCha20Rng) {
        let p = setup(b"shuffle", m, 8).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keys = elgamal::keygen(&p, m, &mut rng);
        (p, keys, rng)
    }

    #[test]
    fn identity_shuffle_preserves_order() {
        let (p, keys, mut rng) = eg_setup(3, 1);
        let eg = EgScheme::new(&p, keys.pk);
        let msgs: Vec<G1> = (0..5).map(|_| p.g1 * random_scalar(&mut rng)).collect();
        let cts: Vec<_> = msgs.iter().map(|m| eg.enc(m, &mut rng)).collect();
        let perms = vec![Permutation::identity(5); 3];
        let out = shuffle(&eg, &cts, &perms, &mut rng).unwrap();
        for (o, (c, m)) in out.iter().zip(cts.iter().zip(&msgs)) {
            assert_ne!(o, c);
            assert_eq!(elgamal::tdec(o, &keys.shares).unwrap(), *m);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn positional_law_and_reverse(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=6) {
            let (p, keys, mut rng) = eg_setup(m, seed);
            let eg = EgScheme::new(&p, keys.pk);
            let msgs: Vec<G1> = (0..n).map(|_| p.g1 * random_scalar(&mut rng)).collect();
            let cts: Vec<_> = msgs.iter().map(|x| eg.enc(x, &mut rng)).collect();
            let perms: Vec<_> = (0..m).map(|_| Permutation::random(n, &mut rng)).collect();
            let pi = compose(&perms).unwrap();
            let out = shuffle(&eg, &cts, &perms, &mut rng).unwrap();
            let dec: Vec<G1> = out.iter().map(|c| elgamal::tdec(c, &keys.shares).unwrap()).collect();
            for j in 0..n {
                prop_assert_eq!(dec[j], msgs[pi.get(j)]);
            }
            // Multiset preservation, independent of the positional law.
            let mut a: Vec<_> = dec.iter().map(|x| x.to_bytes()).collect();
            let mut b: Vec<_> = msgs.iter().map(|x| x.to_bytes()).collect();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
            let back = shuffle_reverse(&eg, &out, &perms, &mut rng).unwrap();
            for i in 0..n {
                prop_assert_eq!(elgamal::tdec(&back[i], &keys.shares).unwrap(), msgs[i]);
            }
        }
    }
}
