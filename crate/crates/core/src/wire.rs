//! Canonical byte encodings shared by transcripts, hashes and the message bus.
//!
//! Group elements are `group_id || compressed point`, scalars are 32 bytes
//! big-endian, and variable-length sequences carry a `u32` length prefix.

use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use rug::integer::Order;
use rug::Integer;

use crate::algebra::{GroupElement, GroupId, Gt, Scalar, G1, G2};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("decode error at byte {offset}: {what}")]
pub struct DecodeError {
    pub offset: usize,
    pub what: String,
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn len_prefix(&mut self, n: usize) -> &mut Self {
        self.u32(u32::try_from(n).expect("sequence longer than u32::MAX"))
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.len_prefix(bytes.len());
        self.raw(bytes)
    }

    pub fn scalar(&mut self, s: &Scalar) -> &mut Self {
        self.raw(&crate::algebra::scalar_to_bytes(s))
    }

    pub fn g1(&mut self, p: &G1) -> &mut Self {
        self.element(&GroupElement::G1(*p))
    }

    pub fn g2(&mut self, p: &G2) -> &mut Self {
        self.element(&GroupElement::G2(*p))
    }

    pub fn gt(&mut self, p: &Gt) -> &mut Self {
        self.element(&GroupElement::Gt(*p))
    }

    pub fn element(&mut self, e: &GroupElement) -> &mut Self {
        self.u8(e.group_id() as u8);
        match e {
            GroupElement::G1(p) => p.serialize_compressed(&mut self.buf),
            GroupElement::G2(p) => p.serialize_compressed(&mut self.buf),
            GroupElement::Gt(p) => p.serialize_compressed(&mut self.buf),
        }
        .expect("writing to a Vec cannot fail");
        self
    }

    /// Nonnegative integer as exactly `width` big-endian bytes.
    pub fn integer(&mut self, x: &Integer, width: usize) -> &mut Self {
        assert!(x.cmp0().is_ge(), "negative integer on the wire");
        let digits = x.to_digits::<u8>(Order::Msf);
        assert!(digits.len() <= width, "integer wider than {width} bytes");
        self.buf.resize(self.buf.len() + width - digits.len(), 0);
        self.raw(&digits)
    }

    pub fn seq<T: Encode>(&mut self, items: &[T]) -> &mut Self {
        self.len_prefix(items.len());
        for it in items {
            it.encode(self);
        }
        self
    }

    pub fn put<T: Encode + ?Sized>(&mut self, item: &T) -> &mut Self {
        item.encode(self);
        self
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    validate: bool,
}

impl<'a> Reader<'a> {
    /// Reader that performs full subgroup validation of every group element.
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0, validate: true }
    }

    /// Reader for messages between in-process parties. Points are still
    /// checked to lie on the curve, but the costly GT subgroup test is skipped.
    pub fn trusted(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0, validate: false }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn err(&self, what: impl Into<String>) -> DecodeError {
        DecodeError { offset: self.pos, what: what.into() }
    }

    pub fn finish(&self) -> Result<(), DecodeError> {
        if self.remaining() != 0 {
            return Err(self.err(format!("{} trailing bytes", self.remaining())));
        }
        Ok(())
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.remaining() < n {
            return Err(self.err(format!("truncated: need {n} bytes, {} left", self.remaining())));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.raw(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.raw(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.raw(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, DecodeError> {
        Ok(u64::from_be_bytes(self.raw(8)?.try_into().unwrap()))
    }

    /// Length prefix, sanity-bounded by the bytes left so corrupted counts
    /// fail fast instead of allocating.
    pub fn len_prefix(&mut self, min_item: usize) -> Result<usize, DecodeError> {
        let at = self.pos;
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item.max(1)) > self.remaining() {
            return Err(DecodeError { offset: at, what: format!("length {n} exceeds remaining input") });
        }
        Ok(n)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], DecodeError> {
        let n = self.len_prefix(1)?;
        self.raw(n)
    }

    pub fn scalar(&mut self) -> Result<Scalar, DecodeError> {
        let at = self.pos;
        let b = self.raw(32)?;
        crate::algebra::scalar_from_bytes(b).ok_or(DecodeError { offset: at, what: "scalar not reduced mod q".into() })
    }

    pub fn element(&mut self) -> Result<GroupElement, DecodeError> {
        let at = self.pos;
        let id = self.u8()?;
        let id = GroupId::from_u8(id).ok_or(DecodeError { offset: at, what: format!("unknown group id {id}") })?;
        let len = id.encoded_len() - 1;
        let body = self.raw(len)?;
        let validate = if self.validate || id != GroupId::Gt { Validate::Yes } else { Validate::No };
        let bad = |_| DecodeError { offset: at, what: format!("invalid {id:?} element") };
        Ok(match id {
            GroupId::G1 => GroupElement::G1(G1::deserialize_with_mode(body, Compress::Yes, validate).map_err(bad)?),
            GroupId::G2 => GroupElement::G2(G2::deserialize_with_mode(body, Compress::Yes, validate).map_err(bad)?),
            GroupId::Gt => GroupElement::Gt(Gt::deserialize_with_mode(body, Compress::Yes, validate).map_err(bad)?),
        })
    }

    fn typed(&mut self, want: GroupId) -> Result<GroupElement, DecodeError> {
        let at = self.pos;
        let e = self.element()?;
        if e.group_id() != want {
            return Err(DecodeError { offset: at, what: format!("expected {want:?}, found {:?}", e.group_id()) });
        }
        Ok(e)
    }

    pub fn g1(&mut self) -> Result<G1, DecodeError> {
        match self.typed(GroupId::G1)? {
            GroupElement::G1(p) => Ok(p),
            _ => unreachable!(),
        }
    }

    pub fn g2(&mut self) -> Result<G2, DecodeError> {
        match self.typed(GroupId::G2)? {
            GroupElement::G2(p) => Ok(p),
            _ => unreachable!(),
        }
    }

    pub fn gt(&mut self) -> Result<Gt, DecodeError> {
        match self.typed(GroupId::Gt)? {
            GroupElement::Gt(p) => Ok(p),
            _ => unreachable!(),
        }
    }

    pub fn integer(&mut self, width: usize) -> Result<Integer, DecodeError> {
        Ok(Integer::from_digits(self.raw(width)?, Order::Msf))
    }

    pub fn seq<T: Decode>(&mut self) -> Result<Vec<T>, DecodeError> {
        let n = self.len_prefix(1)?;
        (0..n).map(|_| T::decode(self)).collect()
    }

    pub fn get<T: Decode>(&mut self) -> Result<T, DecodeError> {
        T::decode(self)
    }
}

pub trait Encode {
    fn encode(&self, w: &mut Writer);

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError>;

    /// Decodes a complete buffer with full validation.
    fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

impl Encode for Scalar {
    fn encode(&self, w: &mut Writer) {
        w.scalar(self);
    }
}

impl Decode for Scalar {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.scalar()
    }
}

impl Encode for GroupElement {
    fn encode(&self, w: &mut Writer) {
        w.element(self);
    }
}

impl Decode for GroupElement {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.element()
    }
}

impl Encode for G1 {
    fn encode(&self, w: &mut Writer) {
        w.g1(self);
    }
}

impl Decode for G1 {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.g1()
    }
}

impl Encode for Gt {
    fn encode(&self, w: &mut Writer) {
        w.gt(self);
    }
}

impl Decode for Gt {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.gt()
    }
}

impl Encode for u32 {
    fn encode(&self, w: &mut Writer) {
        w.u32(*self);
    }
}

impl Decode for u32 {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.u32()
    }
}

impl<T: Encode> Encode for Vec<T> {
    fn encode(&self, w: &mut Writer) {
        w.seq(self);
    }
}

impl<T: Decode> Decode for Vec<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        r.seq()
    }
}

impl<A: Encode, B: Encode> Encode for (A, B) {
    fn encode(&self, w: &mut Writer) {
        self.0.encode(w);
        self.1.encode(w);
    }
}

impl<A: Decode, B: Decode> Decode for (A, B) {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok((A::decode(r)?, B::decode(r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_scalar, setup};
    use ark_ff::Zero;

    #[test]
    fn truncated_input_reports_offset() {
        let mut w = Writer::new();
        w.u32(7).u64(9);
        let bytes = w.into_bytes();
        let mut r = Reader::new(&bytes[..9]);
        r.u32().unwrap();
        let e = r.u64().unwrap_err();
        assert_eq!(e.offset, 4);
    }

    #[test]
    fn unreduced_scalar_rejected() {
        let bytes = [0xffu8; 32];
        let e = Scalar::from_bytes(&bytes).unwrap_err();
        assert_eq!(e.offset, 0);
    }

    #[test]
    fn wrong_group_rejected() {
        let p = setup(b"w", 1, 1).unwrap();
        let mut w = Writer::new();
        w.g2(&p.g2);
        let bytes = w.into_bytes();
        assert!(G1::from_bytes(&bytes).is_err());
    }

    #[test]
    fn integer_fixed_width() {
        let mut w = Writer::new();
        w.integer(&Integer::from(0x0102), 4);
        assert_eq!(w.into_bytes(), vec![0, 0, 1, 2]);
        let mut r = Reader::new(&[0, 0, 1, 2]);
        assert_eq!(r.integer(4).unwrap(), 0x0102);
    }

    #[test]
    fn sequence_length_bounded_by_input() {
        let mut w = Writer::new();
        w.u32(1_000_000);
        let bytes = w.into_bytes();
        assert!(Vec::<Scalar>::from_bytes(&bytes).is_err());
    }

    #[test]
    fn trusted_reader_roundtrip() {
        let p = setup(b"w", 1, 1).unwrap();
        let mut rng = ark_std::test_rng();
        let x = p.ft * random_scalar(&mut rng);
        let bytes = x.to_bytes();
        let mut r = Reader::trusted(&bytes);
        assert_eq!(r.gt().unwrap(), x);
        assert!(!x.is_zero());
    }
}
