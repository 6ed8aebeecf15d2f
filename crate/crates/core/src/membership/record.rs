use crate::algebra::Gt;
use crate::dpk::DpkTranscript;
use crate::runtime::Role;
use crate::wire::{Decode, DecodeError, Encode, Reader, Writer};

/// The querier's record of one per-index proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexProof {
    pub index: usize,
    /// The provers' combined 𝔷1 (reverse set membership only).
    pub z1: Option<Gt>,
    pub transcript: DpkTranscript,
    pub accepted: bool,
}

/// Why and where a run stopped before stage 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbortInfo {
    pub by: Role,
    pub index: usize,
    pub reason: String,
}

impl Encode for IndexProof {
    fn encode(&self, w: &mut Writer) {
        w.u32(self.index as u32);
        match &self.z1 {
            Some(z) => w.u8(1).gt(z),
            None => w.u8(0),
        };
        w.put(&self.transcript).u8(self.accepted as u8);
    }
}

impl Decode for IndexProof {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let index = r.u32()? as usize;
        let z1 = match r.u8()? {
            0 => None,
            1 => Some(r.gt()?),
            _ => return Err(r.err("bad z1 flag")),
        };
        let transcript = r.get()?;
        let accepted = decode_bool(r)?;
        Ok(Self { index, z1, transcript, accepted })
    }
}

impl Encode for AbortInfo {
    fn encode(&self, w: &mut Writer) {
        w.u16(self.by.code()).u32(self.index as u32).bytes(self.reason.as_bytes());
    }
}

impl Decode for AbortInfo {
    fn decode(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let by = Role::from_code(r.u16()?);
        let index = r.u32()? as usize;
        let at = r.offset();
        let reason = String::from_utf8(r.bytes()?.to_vec())
            .map_err(|_| DecodeError { offset: at, what: "abort reason is not utf-8".into() })?;
        Ok(Self { by, index, reason })
    }
}

pub(crate) fn decode_bool(r: &mut Reader<'_>) -> Result<bool, DecodeError> {
    match r.u8()? {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(r.err("bad boolean")),
    }
}

pub(crate) fn encode_opt<T: Encode>(w: &mut Writer, v: &Option<T>) {
    match v {
        Some(x) => w.u8(1).put(x),
        None => w.u8(0),
    };
}

pub(crate) fn decode_opt<T: Decode>(r: &mut Reader<'_>) -> Result<Option<T>, DecodeError> {
    match r.u8()? {
        0 => Ok(None),
        1 => Ok(Some(r.get()?)),
        _ => Err(r.err("bad option flag")),
    }
}
