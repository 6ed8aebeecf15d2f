//! m-of-m threshold Paillier with a trusted dealer.
//!
//! Encryption uses the short-exponent form `(1 + xN)·hs^α mod N²` with
//! `hs = (-u²)^N`, and `hs^α` comes from a lazily built fixed-base table.
//! The decryption exponent `d` (d ≡ 0 mod λ, d ≡ 1 mod N) is split into
//! additive shares modulo Nλ.

use std::sync::{Arc, OnceLock};

use rand::RngCore;
use rug::integer::{IsPrime, Order};
use rug::Integer;

use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

/// Bits of the encryption randomness α.
pub const ALPHA_BITS: u32 = 1024;
const WINDOW: u32 = 8;

pub fn random_bits<R: RngCore + ?Sized>(bits: u32, rng: &mut R) -> Integer {
    let mut buf = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill_bytes(&mut buf);
    let extra = buf.len() as u32 * 8 - bits;
    if extra > 0 {
        buf[0] &= 0xff >> extra;
    }
    Integer::from_digits(&buf, Order::Msf)
}

/// Uniform in [0, bound).
pub fn random_below<R: RngCore + ?Sized>(bound: &Integer, rng: &mut R) -> Integer {
    let bits = bound.significant_bits() + 64;
    random_bits(bits, rng) % bound
}

fn random_prime<R: RngCore + ?Sized>(bits: u32, rng: &mut R) -> Integer {
    loop {
        let mut c = random_bits(bits, rng);
        c.set_bit(bits - 1, true);
        c.set_bit(bits - 2, true);
        c.set_bit(0, true);
        let p = c.next_prime();
        if p.significant_bits() == bits && p.is_probably_prime(30) != IsPrime::No {
            return p;
        }
    }
}

struct FixedBase {
    rows: Vec<Vec<Integer>>,
}

impl FixedBase {
    fn build(base: &Integer, modulus: &Integer, bits: u32) -> Self {
        let width = 1usize << WINDOW;
        let mut rows = Vec::with_capacity(bits.div_ceil(WINDOW) as usize);
        let mut step = base.clone();
        for _ in 0..bits.div_ceil(WINDOW) {
            let mut row = Vec::with_capacity(width);
            row.push(Integer::from(1));
            for j in 1..width {
                let next = Integer::from(&row[j - 1] * &step) % modulus;
                row.push(next);
            }
            step = Integer::from(&row[width - 1] * &step) % modulus;
            rows.push(row);
        }
        Self { rows }
    }

    fn pow(&self, e: &Integer, modulus: &Integer) -> Integer {
        let digits = e.to_digits::<u8>(Order::Lsf);
        let mut acc = Integer::from(1);
        for (i, d) in digits.iter().enumerate() {
            if *d != 0 {
                acc *= &self.rows[i][*d as usize];
                acc %= modulus;
            }
        }
        acc
    }
}

#[derive(Clone)]
pub struct PaillierPublicKey {
    n: Integer,
    n2: Integer,
    hs: Integer,
    bytes: usize,
    table: Arc<OnceLock<FixedBase>>,
}

impl std::fmt::Debug for PaillierPublicKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PaillierPublicKey({} bits)", self.n.significant_bits())
    }
}

impl PartialEq for PaillierPublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.hs == other.hs
    }
}

impl Eq for PaillierPublicKey {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierCiphertext(pub Integer);

/// A party's additive share of the decryption exponent.
#[derive(Debug, Clone)]
pub struct PaillierKeyShare {
    pub party: usize,
    d: Integer,
}

/// c^{d_k} mod N²
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierDecShare(pub Integer);

impl PaillierPublicKey {
    fn from_parts(n: Integer, hs: Integer) -> Self {
        let n2 = Integer::from(n.square_ref());
        let bytes = n.significant_bits().div_ceil(8) as usize;
        Self { n, n2, hs, bytes, table: Arc::new(OnceLock::new()) }
    }

    pub fn n(&self) -> &Integer {
        &self.n
    }

    pub fn n_squared(&self) -> &Integer {
        &self.n2
    }

    /// Byte width of N; ciphertexts are twice this.
    pub fn modulus_bytes(&self) -> usize {
        self.bytes
    }

    /// Builds the fixed-base table now instead of on first use.
    pub fn precompute(&self) {
        self.table();
    }

    fn table(&self) -> &FixedBase {
        self.table.get_or_init(|| FixedBase::build(&self.hs, &self.n2, ALPHA_BITS))
    }

    fn hs_pow(&self, alpha: &Integer) -> Integer {
        if alpha.significant_bits() <= ALPHA_BITS && alpha.cmp0().is_ge() {
            self.table().pow(alpha, &self.n2)
        } else {
            Integer::from(self.hs.pow_mod_ref(alpha, &self.n2).expect("nonnegative exponent"))
        }
    }

    pub fn random_alpha<R: RngCore + ?Sized>(&self, rng: &mut R) -> Integer {
        random_bits(ALPHA_BITS, rng)
    }

    pub fn enc_with(&self, x: &Integer, alpha: &Integer) -> Result<PaillierCiphertext> {
        if x.cmp0().is_lt() || *x >= self.n {
            return Err(Error::PlaintextTooLarge);
        }
        let g_x = Integer::from(x * &self.n) + 1u32;
        Ok(PaillierCiphertext(g_x * self.hs_pow(alpha) % &self.n2))
    }

    pub fn enc<R: RngCore + ?Sized>(&self, x: &Integer, rng: &mut R) -> Result<PaillierCiphertext> {
        self.enc_with(x, &self.random_alpha(rng))
    }

    pub fn renc<R: RngCore + ?Sized>(&self, ct: &PaillierCiphertext, rng: &mut R) -> PaillierCiphertext {
        let mask = self.hs_pow(&self.random_alpha(rng));
        PaillierCiphertext(mask * &ct.0 % &self.n2)
    }

    /// Adds the plaintexts mod N.
    pub fn add(&self, a: &PaillierCiphertext, b: &PaillierCiphertext) -> PaillierCiphertext {
        PaillierCiphertext(Integer::from(&a.0 * &b.0) % &self.n2)
    }

    pub fn dec_share(&self, key: &PaillierKeyShare, ct: &PaillierCiphertext) -> PaillierDecShare {
        PaillierDecShare(Integer::from(ct.0.pow_mod_ref(&key.d, &self.n2).expect("nonnegative exponent")))
    }

    /// L(Π shares) with exactly one share per party.
    pub fn combine(&self, shares: &[(usize, PaillierDecShare)], m: usize) -> Result<Integer> {
        let mut seen = vec![false; m];
        let mut acc = Integer::from(1);
        for (k, s) in shares {
            let slot = seen.get_mut(*k).ok_or(Error::MissingParty(*k))?;
            if *slot {
                return Err(Error::DuplicateParty(*k));
            }
            *slot = true;
            acc *= &s.0;
            acc %= &self.n2;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::MissingParty(k));
        }
        Ok((acc - 1u32) / &self.n)
    }

    /// Local threshold decryption with every share in hand.
    pub fn tdec(&self, ct: &PaillierCiphertext, keys: &[PaillierKeyShare]) -> Result<Integer> {
        let shares: Vec<_> = keys.iter().map(|k| (k.party, self.dec_share(k, ct))).collect();
        self.combine(&shares, keys.len())
    }
}

/// Dealer key generation: an RSA modulus of exactly `bits` bits and `m`
/// additive shares of the decryption exponent.
pub fn keygen_dealer<R: RngCore + ?Sized>(
    bits: u32,
    m: usize,
    rng: &mut R,
) -> Result<(PaillierPublicKey, Vec<PaillierKeyShare>)> {
    if bits < 64 || bits % 2 != 0 {
        return Err(Error::InvalidParameter(format!("unsupported modulus size {bits}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let (p, q, n) = loop {
        let p = random_prime(bits / 2, rng);
        let q = random_prime(bits / 2, rng);
        let n = Integer::from(&p * &q);
        if p != q && n.significant_bits() == bits {
            break (p, q, n);
        }
    };
    let lambda = Integer::from(&p - 1u32).lcm(&Integer::from(&q - 1u32));
    let mu = lambda.clone().invert(&n).map_err(|_| Error::Protocol("λ not invertible mod N".into()))?;
    let n_lambda = Integer::from(&n * &lambda);
    let d = Integer::from(&lambda * &mu) % &n_lambda;

    let n2 = Integer::from(n.square_ref());
    let u = loop {
        let u = random_below(&n, rng);
        if u > 1 && u.clone().gcd(&n) == 1 {
            break u;
        }
    };
    let h = &n - Integer::from(u.square_ref()) % &n;
    let hs = Integer::from(h.pow_mod_ref(&n, &n2).expect("nonnegative exponent"));

    let mut shares = Vec::with_capacity(m);
    let mut sum = Integer::new();
    for party in 0..m - 1 {
        let s = random_below(&n_lambda, rng);
        sum += &s;
        shares.push(PaillierKeyShare { party, d: s });
    }
    let mut last = (d - sum) % &n_lambda;
    if last.cmp0().is_lt() {
        last += &n_lambda;
    }
    shares.push(PaillierKeyShare { party: m - 1, d: last });
    Ok((PaillierPublicKey::from_parts(n, hs), shares))
}

impl PaillierPublicKey {
    pub fn encode_ct(&self, ct: &PaillierCiphertext, w: &mut Writer) {
        w.integer(&ct.0, 2 * self.bytes);
    }

    pub fn decode_ct(&self, r: &mut Reader<'_>) -> std::result::Result<PaillierCiphertext, DecodeError> {
        let at = r.offset();
        let v = r.integer(2 * self.bytes)?;
        if v >= self.n2 || v.cmp0().is_eq() {
            return Err(DecodeError { offset: at, what: "paillier ciphertext out of range".into() });
        }
        Ok(PaillierCiphertext(v))
    }

    pub fn encode_cts(&self, cts: &[PaillierCiphertext], w: &mut Writer) {
        w.len_prefix(cts.len());
        for c in cts {
            self.encode_ct(c, w);
        }
    }

    pub fn decode_cts(&self, r: &mut Reader<'_>) -> std::result::Result<Vec<PaillierCiphertext>, DecodeError> {
        let n = r.len_prefix(2 * self.bytes)?;
        (0..n).map(|_| self.decode_ct(r)).collect()
    }
}

impl Encode for PaillierPublicKey {
    fn encode(&self, w: &mut Writer) {
        w.u32(self.bytes as u32).integer(&self.n, self.bytes).integer(&self.hs, 2 * self.bytes);
    }
}

impl Decode for PaillierPublicKey {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        let at = r.offset();
        let bytes = r.u32()? as usize;
        if bytes == 0 || bytes > 4096 {
            return Err(DecodeError { offset: at, what: format!("implausible modulus width {bytes}") });
        }
        let n = r.integer(bytes)?;
        let hs = r.integer(2 * bytes)?;
        if n.significant_bits().div_ceil(8) as usize != bytes || n.is_even() {
            return Err(DecodeError { offset: at, what: "malformed paillier modulus".into() });
        }
        let pk = PaillierPublicKey::from_parts(n, hs);
        if pk.hs >= pk.n2 {
            return Err(DecodeError { offset: at, what: "paillier base out of range".into() });
        }
        Ok(pk)
    }
}

impl Encode for PaillierDecShare {
    fn encode(&self, w: &mut Writer) {
        w.bytes(&self.0.to_digits::<u8>(Order::Msf));
    }
}

impl Decode for PaillierDecShare {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(PaillierDecShare(Integer::from_digits(r.bytes()?, Order::Msf)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q_integer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    /// One 2048-bit key shared by the tests in this module.
    fn key() -> &'static (PaillierPublicKey, Vec<PaillierKeyShare>) {
        static KEY: OnceLock<(PaillierPublicKey, Vec<PaillierKeyShare>)> = OnceLock::new();
        KEY.get_or_init(|| keygen_dealer(2048, 3, &mut ChaCha20Rng::seed_from_u64(11)).unwrap())
    }

    #[test]
    fn modulus_shape() {
        let (pk, shares) = key();
        assert_eq!(pk.n().significant_bits(), 2048);
        assert_eq!(shares.len(), 3);
        assert_eq!(pk.modulus_bytes(), 256);
    }

    #[test]
    fn zero_roundtrip() {
        let (pk, shares) = key();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let ct = pk.enc(&Integer::new(), &mut rng).unwrap();
        assert_eq!(pk.tdec(&ct, shares).unwrap(), 0);
    }

    #[test]
    fn plaintext_bounds() {
        let (pk, _) = key();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        assert!(matches!(pk.enc(pk.n(), &mut rng), Err(Error::PlaintextTooLarge)));
        assert!(matches!(pk.enc(&Integer::from(-1), &mut rng), Err(Error::PlaintextTooLarge)));
        let top = Integer::from(pk.n() - 1u32);
        let ct = pk.enc(&top, &mut rng).unwrap();
        assert_eq!(pk.tdec(&ct, &key().1).unwrap(), top);
    }

    #[test]
    fn table_matches_modpow() {
        let (pk, _) = key();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = pk.random_alpha(&mut rng);
            let direct = Integer::from(pk.hs.pow_mod_ref(&a, pk.n_squared()).unwrap());
            assert_eq!(pk.hs_pow(&a), direct);
        }
    }

    #[test]
    fn missing_share_is_an_error() {
        let (pk, shares) = key();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let ct = pk.enc(&Integer::from(7), &mut rng).unwrap();
        let partial: Vec<_> = shares[..2].iter().map(|k| (k.party, pk.dec_share(k, &ct))).collect();
        assert!(matches!(pk.combine(&partial, 3), Err(Error::MissingParty(2))));
    }

    #[test]
    fn single_party_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (pk, shares) = keygen_dealer(512, 1, &mut rng).unwrap();
        let ct = pk.enc(&Integer::from(123456), &mut rng).unwrap();
        assert_eq!(pk.tdec(&ct, &shares).unwrap(), 123456);
    }

    #[test]
    fn ciphertext_encoding_fixed_width() {
        let (pk, _) = key();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let ct = pk.enc(&Integer::from(9), &mut rng).unwrap();
        let mut w = Writer::new();
        pk.encode_ct(&ct, &mut w);
        let bytes = w.into_bytes();
        assert_eq!(bytes.len(), 512);
        assert_eq!(pk.decode_ct(&mut Reader::new(&bytes)).unwrap(), ct);
        let pk2 = PaillierPublicKey::from_bytes(&pk.to_bytes()).unwrap();
        assert_eq!(&pk2, pk);
    }

    /// 100 randomized trials of the additive homomorphism, re-encryption and
    /// the mod-q padded blinding identity.
    #[test]
    fn homomorphism_trials() {
        let (pk, shares) = key();
        let q = q_integer();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let q_minus_1 = Integer::from(q - 1u32);
        for _ in 0..100 {
            let x = random_below(q, &mut rng);
            let y = random_below(q, &mut rng);
            let (cx, cy) = (pk.enc(&x, &mut rng).unwrap(), pk.enc(&y, &mut rng).unwrap());
            let sum = pk.tdec(&pk.add(&cx, &cy), shares).unwrap();
            assert_eq!(sum, Integer::from(&x + &y));
            let re = pk.renc(&cx, &mut rng);
            assert_ne!(re, cx);
            assert_eq!(pk.tdec(&re, shares).unwrap(), x);

            // t in [0, 2q), blind b + qχ with b in [0, q), χ in [0, q-1)
            let t = random_below(&Integer::from(q * 2u32), &mut rng);
            let b = random_below(q, &mut rng);
            let chi = random_below(&q_minus_1, &mut rng);
            let padded = &b + Integer::from(q * &chi);
            let ct = pk.add(&pk.enc(&t, &mut rng).unwrap(), &pk.enc(&padded, &mut rng).unwrap());
            let dec = pk.tdec(&ct, shares).unwrap();
            assert_eq!(dec, Integer::from(&t + &padded));
            assert_eq!(dec % q, Integer::from(&t + &b) % q);
        }
    }
}
