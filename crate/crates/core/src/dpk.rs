//! Distributed Fiat-Shamir proofs of knowledge for predicates
//! `∧_i y_i = Π_j g_ij^{ω_j}`, where each of m provers holds additive shares
//! of every ω_j.
//!
//! Exponents are always nonnegative slot values; a term with a negated
//! witness is written with the inverted base.

use ark_ff::PrimeField;
use rand::RngCore;

use crate::algebra::{hash_to_challenge, random_scalar, GroupElement, GroupId, Scalar};
use crate::error::{Error, Result};
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub base: GroupElement,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub target: GroupElement,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    equations: Vec<Equation>,
    slots: usize,
}

impl Equation {
    pub fn new(target: GroupElement, terms: impl IntoIterator<Item = (GroupElement, usize)>) -> Self {
        Self { target, terms: terms.into_iter().map(|(base, slot)| Term { base, slot }).collect() }
    }

    fn group(&self) -> GroupId {
        self.target.group_id()
    }

    /// Π base^{e[slot]}
    pub fn evaluate(&self, exponents: &[Scalar]) -> GroupElement {
        self.terms.iter().fold(GroupElement::identity(self.group()), |acc, t| acc.mul(&t.base.pow(&exponents[t.slot])))
    }
}

impl Predicate {
    pub fn new(equations: Vec<Equation>, slots: usize) -> Result<Self> {
        for (i, eq) in equations.iter().enumerate() {
            for t in &eq.terms {
                if t.base.group_id() != eq.group() {
                    return Err(Error::InvalidParameter(format!("equation {i} mixes groups")));
                }
                if t.slot >= slots {
                    return Err(Error::InvalidParameter(format!("equation {i} uses slot {} >= {slots}", t.slot)));
                }
            }
        }
        Ok(Self { equations, slots })
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Whether `witness` satisfies every equation.
    pub fn holds(&self, witness: &[Scalar]) -> bool {
        witness.len() == self.slots && self.equations.iter().all(|eq| eq.evaluate(witness) == eq.target)
    }
}

impl Encode for Predicate {
    fn encode(&self, w: &mut Writer) {
        w.u32(self.slots as u32).len_prefix(self.equations.len());
        for eq in &self.equations {
            w.u8(eq.group() as u8).element(&eq.target).len_prefix(eq.terms.len());
            for t in &eq.terms {
                w.element(&t.base).u32(t.slot as u32);
            }
        }
    }
}

/// Binds a proof to its session, protocol, run and index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpkContext {
    pub session: [u8; 16],
    pub protocol: &'static str,
    pub query: u32,
    pub run: u8,
    pub index: u32,
}

impl Encode for DpkContext {
    fn encode(&self, w: &mut Writer) {
        w.raw(&self.session).bytes(self.protocol.as_bytes()).u32(self.query).u8(self.run).u32(self.index);
    }
}

/// `a_i = Π_j g_ij^{r_j}`; depends on the nonces only.
pub fn first_message(predicate: &Predicate, nonces: &[Scalar]) -> Vec<GroupElement> {
    predicate.equations.iter().map(|eq| eq.evaluate(nonces)).collect()
}

/// `z_j = r_j - c·ω_j`, over any prime field.
pub fn response<F: PrimeField>(nonces: &[F], witness: &[F], c: F) -> Vec<F> {
    nonces.iter().zip(witness).map(|(r, w)| *r - c * w).collect()
}

/// Component-wise product of every party's first message.
pub fn combine_first(shares: &[Vec<GroupElement>]) -> Option<Vec<GroupElement>> {
    let first = shares.first()?;
    let mut acc = first.clone();
    for s in &shares[1..] {
        if s.len() != acc.len() {
            return None;
        }
        for (a, b) in acc.iter_mut().zip(s) {
            if a.group_id() != b.group_id() {
                return None;
            }
            *a = a.mul(b);
        }
    }
    Some(acc)
}

pub fn challenge(ctx: &DpkContext, predicate: &Predicate, a: &[GroupElement]) -> Scalar {
    let mut w = Writer::new();
    w.put(ctx).put(predicate).len_prefix(a.len());
    for x in a {
        w.element(x);
    }
    hash_to_challenge(ctx.protocol.as_bytes(), &w.into_bytes())
}

enum ProverState {
    Fresh,
    Committed(Vec<Scalar>),
    Spent,
}

/// One party's prover for a single proof.
pub struct DpkProver {
    witness: Vec<Scalar>,
    state: ProverState,
}

impl DpkProver {
    pub fn new(witness: Vec<Scalar>) -> Self {
        Self { witness, state: ProverState::Fresh }
    }

    pub fn round1<R: RngCore + ?Sized>(&mut self, predicate: &Predicate, rng: &mut R) -> Result<Vec<GroupElement>> {
        if !matches!(self.state, ProverState::Fresh) {
            return Err(Error::NonceReused);
        }
        if self.witness.len() != predicate.slots {
            return Err(Error::LengthMismatch { expected: predicate.slots, got: self.witness.len() });
        }
        let nonces: Vec<Scalar> = (0..predicate.slots).map(|_| random_scalar(rng)).collect();
        let a = first_message(predicate, &nonces);
        self.state = ProverState::Committed(nonces);
        Ok(a)
    }

    pub fn round2(&mut self, c: &Scalar) -> Result<Vec<Scalar>> {
        match std::mem::replace(&mut self.state, ProverState::Spent) {
            ProverState::Committed(nonces) => Ok(response(&nonces, &self.witness, *c)),
            ProverState::Fresh => {
                self.state = ProverState::Fresh;
                Err(Error::RoundOrder)
            }
            ProverState::Spent => Err(Error::NonceReused),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpkTranscript {
    /// `a_shares[k][i]`: party k's first message for equation i.
    pub a_shares: Vec<Vec<GroupElement>>,
    pub c: Scalar,
    /// `z_shares[k][j]`: party k's response for slot j.
    pub z_shares: Vec<Vec<Scalar>>,
}

/// Outcome of each verification check, for diagnosing failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpkCheck {
    pub well_formed: bool,
    pub challenge_ok: bool,
    pub equations: Vec<bool>,
}

impl DpkCheck {
    pub fn accepted(&self) -> bool {
        self.well_formed && self.challenge_ok && self.equations.iter().all(|b| *b)
    }

    /// Indices of the equations that do not hold.
    pub fn failing(&self) -> Vec<usize> {
        self.equations.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i).collect()
    }
}

pub fn check(ctx: &DpkContext, predicate: &Predicate, t: &DpkTranscript) -> DpkCheck {
    let ell = predicate.equations.len();
    let malformed = DpkCheck { well_formed: false, challenge_ok: false, equations: vec![false; ell] };
    if t.a_shares.is_empty()
        || t.a_shares.len() != t.z_shares.len()
        || t.a_shares.iter().any(|a| a.len() != ell)
        || t.z_shares.iter().any(|z| z.len() != predicate.slots)
    {
        return malformed;
    }
    let Some(a) = combine_first(&t.a_shares) else { return malformed };
    if a.iter().zip(&predicate.equations).any(|(x, eq)| x.group_id() != eq.group()) {
        return malformed;
    }
    let z: Vec<Scalar> = (0..predicate.slots).map(|j| t.z_shares.iter().map(|zk| zk[j]).sum()).collect();
    let equations =
        predicate.equations.iter().zip(&a).map(|(eq, a_i)| *a_i == eq.target.pow(&t.c).mul(&eq.evaluate(&z))).collect();
    DpkCheck { well_formed: true, challenge_ok: t.c == challenge(ctx, predicate, &a), equations }
}

pub fn verify(ctx: &DpkContext, predicate: &Predicate, t: &DpkTranscript) -> bool {
    check(ctx, predicate, t).accepted()
}

/// Runs all `m` provers locally; for tests and single-prover use.
pub fn prove_local<R: RngCore + ?Sized>(
    ctx: &DpkContext,
    predicate: &Predicate,
    witness_shares: Vec<Vec<Scalar>>,
    rng: &mut R,
) -> Result<DpkTranscript> {
    let mut provers: Vec<DpkProver> = witness_shares.into_iter().map(DpkProver::new).collect();
    let a_shares = provers.iter_mut().map(|p| p.round1(predicate, rng)).collect::<Result<Vec<_>>>()?;
    let a = combine_first(&a_shares).ok_or(Error::Protocol("no provers".into()))?;
    let c = challenge(ctx, predicate, &a);
    let z_shares = provers.iter_mut().map(|p| p.round2(&c)).collect::<Result<Vec<_>>>()?;
    Ok(DpkTranscript { a_shares, c, z_shares })
}

impl Encode for DpkTranscript {
    fn encode(&self, w: &mut Writer) {
        let m = self.a_shares.len();
        let ell = self.a_shares.first().map_or(0, Vec::len);
        let slots = self.z_shares.first().map_or(0, Vec::len);
        w.u32(m as u32).u32(ell as u32).u32(slots as u32);
        for a in &self.a_shares {
            assert_eq!(a.len(), ell, "ragged a-shares");
            for x in a {
                w.element(x);
            }
        }
        w.scalar(&self.c);
        for z in &self.z_shares {
            assert_eq!(z.len(), slots, "ragged z-shares");
            for x in z {
                w.scalar(x);
            }
        }
    }
}

impl Decode for DpkTranscript {
    fn decode(r: &mut Reader<'_>) -> std::result::Result<Self, DecodeError> {
        let at = r.offset();
        let (m, ell, slots) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
        let min = m.saturating_mul(ell.saturating_mul(33).saturating_add(slots.saturating_mul(32)));
        if m == 0 || min > r.remaining() {
            return Err(DecodeError { offset: at, what: format!("implausible dpk header ({m}, {ell}, {slots})") });
        }
        let a_shares =
            (0..m).map(|_| (0..ell).map(|_| r.element()).collect()).collect::<std::result::Result<_, _>>()?;
        let c = r.scalar()?;
        let z_shares =
            (0..m).map(|_| (0..slots).map(|_| r.scalar()).collect()).collect::<std::result::Result<_, _>>()?;
        Ok(DpkTranscript { a_shares, c, z_shares })
    }
}
