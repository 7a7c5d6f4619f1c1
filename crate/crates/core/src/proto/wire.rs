//! Canonical byte encoding of messages and certificate blobs.
//!
//! All integers are little-endian. A message is a tag byte followed by its
//! payload: a claim code (1 byte), a rank (`u32`), indices (`u32` each),
//! field elements (`u64` each), a commitment (`k` permutation images as
//! `u32`, then `k` diagonal entries as `u64`), or a PLUQ factorization
//! (rank `u32`, `m` row images, `n` column images, `L` then `U` row-major).

use thiserror::Error;

use super::{Body, Claim};

pub(crate) const MAGIC: &[u8; 4] = b"RKC1";

const TAG_CLAIM: u8 = 1;
const TAG_RANK: u8 = 2;
const TAG_INDICES: u8 = 3;
const TAG_FIELD: u8 = 4;
const TAG_COMMITMENT: u8 = 5;
const TAG_PLUQ: u8 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("truncated input")]
    Truncated,
    #[error("unknown tag {0}")]
    UnknownTag(u8),
    #[error("unknown claim code {0}")]
    UnknownClaim(u8),
    #[error("payload length {0} does not fit the message type")]
    BadLength(usize),
    #[error("{0} is not a canonical residue")]
    NonCanonical(u64),
    #[error("trailing bytes")]
    Trailing,
    #[error("bad header")]
    BadHeader,
}

fn claim_code(c: Claim) -> u8 {
    match c {
        Claim::UpperConjugate => 0,
        Claim::NonSingular => 1,
        Claim::Singular => 2,
    }
}

fn put_u32s(out: &mut Vec<u8>, v: &[usize]) {
    for &x in v {
        out.extend_from_slice(&(x as u32).to_le_bytes());
    }
}

fn put_u64s(out: &mut Vec<u8>, v: &[u64]) {
    for &x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn encode_body(body: &Body) -> Vec<u8> {
    let mut out = Vec::new();
    match body {
        Body::Claim(c) => {
            out.push(TAG_CLAIM);
            out.push(claim_code(*c));
        }
        Body::Rank(r) => {
            out.push(TAG_RANK);
            put_u32s(&mut out, &[*r]);
        }
        Body::Indices(v) => {
            out.push(TAG_INDICES);
            put_u32s(&mut out, v);
        }
        Body::Field(v) => {
            out.push(TAG_FIELD);
            put_u64s(&mut out, v);
        }
        Body::Commitment { perm, diag } => {
            out.push(TAG_COMMITMENT);
            put_u32s(&mut out, perm);
            put_u64s(&mut out, diag);
        }
        Body::Pluq { rank, p, l, u, q } => {
            out.push(TAG_PLUQ);
            put_u32s(&mut out, &[*rank]);
            put_u32s(&mut out, p);
            put_u32s(&mut out, q);
            put_u64s(&mut out, l);
            put_u64s(&mut out, u);
        }
    }
    out
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.bytes.len() < n {
            return Err(WireError::Truncated);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn indices(&mut self, n: usize) -> Result<Vec<usize>, WireError> {
        (0..n).map(|_| self.u32().map(|x| x as usize)).collect()
    }

    fn residues(&mut self, n: usize, p: u64) -> Result<Vec<u64>, WireError> {
        (0..n)
            .map(|_| {
                let x = self.u64()?;
                if x >= p {
                    Err(WireError::NonCanonical(x))
                } else {
                    Ok(x)
                }
            })
            .collect()
    }
}

/// Decodes one message. `m` and `n` are the input dimensions, needed to
/// split a PLUQ payload; field elements must be canonical mod `p`.
pub fn decode_body(bytes: &[u8], p: u64, m: usize, n: usize) -> Result<Body, WireError> {
    let mut r = Reader::new(bytes);
    let tag = r.u8()?;
    let len = bytes.len() - 1;
    let body = match tag {
        TAG_CLAIM => Body::Claim(match r.u8()? {
            0 => Claim::UpperConjugate,
            1 => Claim::NonSingular,
            2 => Claim::Singular,
            c => return Err(WireError::UnknownClaim(c)),
        }),
        TAG_RANK => Body::Rank(r.u32()? as usize),
        TAG_INDICES if len.is_multiple_of(4) => Body::Indices(r.indices(len / 4)?),
        TAG_FIELD if len.is_multiple_of(8) => Body::Field(r.residues(len / 8, p)?),
        TAG_COMMITMENT if len.is_multiple_of(12) => {
            let k = len / 12;
            let perm = r.indices(k)?;
            let diag = r.residues(k, p)?;
            Body::Commitment { perm, diag }
        }
        TAG_PLUQ => {
            let rank = r.u32()? as usize;
            let expected = rank
                .checked_mul(m + n)
                .and_then(|x| x.checked_mul(8))
                .and_then(|x| x.checked_add(4 + 4 * (m + n)));
            if expected != Some(len) {
                return Err(WireError::BadLength(len));
            }
            let p_img = r.indices(m)?;
            let q_img = r.indices(n)?;
            let l = r.residues(m * rank, p)?;
            let u = r.residues(rank * n, p)?;
            Body::Pluq {
                rank,
                p: p_img,
                l,
                u,
                q: q_img,
            }
        }
        TAG_INDICES | TAG_FIELD | TAG_COMMITMENT => return Err(WireError::BadLength(len)),
        t => return Err(WireError::UnknownTag(t)),
    };
    if !r.is_empty() {
        return Err(WireError::Trailing);
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        assert_eq!(encode_body(&Body::Claim(Claim::Singular)), vec![1, 2]);
        assert_eq!(encode_body(&Body::Rank(258)), vec![2, 2, 1, 0, 0]);
        assert_eq!(
            encode_body(&Body::Field(vec![1])),
            vec![4, 1, 0, 0, 0, 0, 0, 0, 0]
        );
        assert_eq!(encode_body(&Body::Indices(vec![3])), vec![3, 3, 0, 0, 0]);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(decode_body(&[], 7, 1, 1), Err(WireError::Truncated));
        assert_eq!(decode_body(&[9], 7, 1, 1), Err(WireError::UnknownTag(9)));
        assert_eq!(decode_body(&[1, 5], 7, 1, 1), Err(WireError::UnknownClaim(5)));
        assert_eq!(decode_body(&[1, 0, 0], 7, 1, 1), Err(WireError::Trailing));
        assert_eq!(decode_body(&[4, 1, 0, 0], 7, 1, 1), Err(WireError::BadLength(3)));
        let mut seven = vec![4];
        seven.extend_from_slice(&7u64.to_le_bytes());
        assert_eq!(decode_body(&seven, 7, 1, 1), Err(WireError::NonCanonical(7)));
    }

    fn body_strategy() -> impl Strategy<Value = Body> {
        prop_oneof![
            prop::sample::select(vec![Claim::UpperConjugate, Claim::NonSingular, Claim::Singular])
                .prop_map(Body::Claim),
            (0usize..1000).prop_map(Body::Rank),
            prop::collection::vec(0usize..1000, 0..8).prop_map(Body::Indices),
            prop::collection::vec(0u64..101, 0..8).prop_map(Body::Field),
            prop::collection::vec((0usize..9, 1u64..101), 0..6).prop_map(|v| Body::Commitment {
                perm: v.iter().map(|x| x.0).collect(),
                diag: v.iter().map(|x| x.1).collect(),
            }),
            (0usize..3, prop::collection::vec(0u64..101, 30)).prop_map(|(r, pool)| Body::Pluq {
                rank: r,
                p: vec![1, 0, 2],
                l: pool[..3 * r].to_vec(),
                u: pool[10..10 + 4 * r].to_vec(),
                q: vec![3, 2, 1, 0],
            }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(body in body_strategy()) {
            let bytes = encode_body(&body);
            prop_assert_eq!(decode_body(&bytes, 101, 3, 4).unwrap(), body);
        }
    }
}
