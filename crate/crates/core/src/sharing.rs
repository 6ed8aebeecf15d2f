//! (m,m) additive secret sharing over Z_q and Beaver-triple multiplication.

use std::collections::VecDeque;

use ark_ff::Zero;
use rand::RngCore;

use crate::algebra::{random_scalar, Scalar};
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector(pub Vec<Scalar>);

pub fn share_mm<R: RngCore + ?Sized>(x: &Scalar, m: usize, rng: &mut R) -> Result<ShareVector> {
    if m == 0 {
        return Err(Error::InvalidParameter("cannot share among zero parties".into()));
    }
    let mut shares: Vec<Scalar> = (0..m - 1).map(|_| random_scalar(rng)).collect();
    let partial: Scalar = shares.iter().sum();
    shares.push(*x - partial);
    Ok(ShareVector(shares))
}

pub fn recons(shares: &[Scalar]) -> Result<Scalar> {
    if shares.is_empty() {
        return Err(Error::InvalidParameter("no shares to reconstruct".into()));
    }
    Ok(shares.iter().sum())
}

impl ShareVector {
    pub fn recons(&self) -> Result<Scalar> {
        recons(&self.0)
    }

    pub fn add(&self, other: &ShareVector) -> Result<ShareVector> {
        if self.0.len() != other.0.len() {
            return Err(Error::LengthMismatch { expected: self.0.len(), got: other.0.len() });
        }
        Ok(ShareVector(self.0.iter().zip(&other.0).map(|(a, b)| *a + b).collect()))
    }
}

/// One party's share of a triple (a, b, ab). Deliberately not `Clone`: a
/// share is moved into the multiplication that consumes it.
#[derive(Debug)]
pub struct TripleShare {
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

#[derive(Debug)]
pub struct BeaverTriple {
    shares: Vec<TripleShare>,
}

impl BeaverTriple {
    pub fn into_shares(self) -> Vec<TripleShare> {
        self.shares
    }

    /// Reconstructed (a, b, ab); test and audit helper.
    pub fn reconstruct(&self) -> (Scalar, Scalar, Scalar) {
        let sum = |f: fn(&TripleShare) -> Scalar| self.shares.iter().map(f).sum();
        (sum(|s| s.a), sum(|s| s.b), sum(|s| s.c))
    }
}

/// Trusted-dealer triple generation.
pub fn deal_triples<R: RngCore + ?Sized>(m: usize, count: usize, rng: &mut R) -> Result<Vec<BeaverTriple>> {
    (0..count)
        .map(|_| {
            let (a, b) = (random_scalar(rng), random_scalar(rng));
            let (sa, sb, sc) = (share_mm(&a, m, rng)?, share_mm(&b, m, rng)?, share_mm(&(a * b), m, rng)?);
            let shares = (0..m).map(|k| TripleShare { a: sa.0[k], b: sb.0[k], c: sc.0[k] }).collect();
            Ok(BeaverTriple { shares })
        })
        .collect()
}

/// Per-party queue of triple shares, handed out once each.
#[derive(Debug, Default)]
pub struct TriplePool {
    shares: VecDeque<TripleShare>,
}

impl TriplePool {
    pub fn take(&mut self) -> Result<TripleShare> {
        self.shares.pop_front().ok_or(Error::TriplesExhausted)
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }
}

/// Deals `count` triples and splits them into one pool per party.
pub fn deal_pools<R: RngCore + ?Sized>(m: usize, count: usize, rng: &mut R) -> Result<Vec<TriplePool>> {
    let mut pools: Vec<TriplePool> = (0..m).map(|_| TriplePool::default()).collect();
    for t in deal_triples(m, count, rng)? {
        for (pool, s) in pools.iter_mut().zip(t.into_shares()) {
            pool.shares.push_back(s);
        }
    }
    Ok(pools)
}

/// A party's opened values d = x - a, e = y - b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultOpening {
    pub d: Scalar,
    pub e: Scalar,
}

/// A multiplication waiting for everyone's openings.
#[derive(Debug)]
pub struct PendingMult {
    party: usize,
    triple: TripleShare,
}

pub fn mult_open(party: usize, x: &Scalar, y: &Scalar, triple: TripleShare) -> (MultOpening, PendingMult) {
    let open = MultOpening { d: *x - triple.a, e: *y - triple.b };
    (open, PendingMult { party, triple })
}

impl PendingMult {
    /// Combines the openings of all `m` parties into this party's share of xy.
    pub fn finish(self, openings: &[(usize, MultOpening)], m: usize) -> Result<Scalar> {
        let mut seen = vec![false; m];
        let (mut d, mut e) = (Scalar::zero(), Scalar::zero());
        for (k, o) in openings {
            let slot = seen.get_mut(*k).ok_or(Error::MissingParty(*k))?;
            if *slot {
                return Err(Error::DuplicateParty(*k));
            }
            *slot = true;
            d += o.d;
            e += o.e;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::MissingParty(k));
        }
        let t = &self.triple;
        let mut z = t.c + d * t.b + e * t.a;
        if self.party == 0 {
            z += d * e;
        }
        Ok(z)
    }
}

/// Broadcast medium for the opening round of [`mult`].
pub trait OpeningChannel {
    fn publish(&mut self, party: usize, opening: MultOpening);
    fn collect(&mut self) -> Vec<(usize, MultOpening)>;
}

/// Channel that simply buffers every published opening.
#[derive(Default)]
pub struct LocalChannel {
    log: Vec<(usize, MultOpening)>,
}

impl OpeningChannel for LocalChannel {
    fn publish(&mut self, party: usize, opening: MultOpening) {
        self.log.push((party, opening));
    }

    fn collect(&mut self) -> Vec<(usize, MultOpening)> {
        std::mem::take(&mut self.log)
    }
}

/// Runs one Beaver multiplication for all parties over `channel`.
pub fn mult(
    x: &ShareVector,
    y: &ShareVector,
    triple: BeaverTriple,
    channel: &mut dyn OpeningChannel,
) -> Result<ShareVector> {
    let m = x.0.len();
    if y.0.len() != m || triple.shares.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: y.0.len().min(triple.shares.len()) });
    }
    let pending: Vec<PendingMult> = triple
        .into_shares()
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let (open, p) = mult_open(k, &x.0[k], &y.0[k], t);
            channel.publish(k, open);
            p
        })
        .collect();
    let openings = channel.collect();
    pending.into_iter().map(|p| p.finish(&openings, m)).collect::<Result<_>>().map(ShareVector)
}

impl Encode for MultOpening {
    fn encode(&self, w: &mut Writer) {
        w.scalar(&self.d).scalar(&self.e);
    }
}

impl Decode for MultOpening {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        Ok(MultOpening { d: r.scalar()?, e: r.scalar()? })
    }
}
