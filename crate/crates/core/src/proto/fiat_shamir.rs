//! Non-interactive certificates from the public-coin protocols: every
//! challenge is a hash of the inputs and the messages before it, and the
//! certificate is the list of prover messages.
//!
//! Blob layout: magic, protocol code (`u8`), `p` (`u64`), `m`, `n` (`u32`),
//! then each prover message as a `u32` length and its encoding.

use super::channel::{execute, ReplayProver, Run};
use super::protocol::{honest_prover, verifier, Inputs, Output, ProtocolId};
use super::wire::{decode_body, encode_body, Reader, WireError, MAGIC};
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};

pub const BLOB_MAGIC: &[u8; 4] = MAGIC;

fn source(id: ProtocolId, inputs: &Inputs) -> ChallengeSource {
    ChallengeSource::fiat_shamir(id, &inputs.a, &inputs.public_bytes(id))
}

fn header(id: ProtocolId, inputs: &Inputs) -> Vec<u8> {
    let a = &inputs.a;
    let mut out = MAGIC.to_vec();
    out.push(id.code());
    out.extend_from_slice(&a.field().modulus().to_le_bytes());
    out.extend_from_slice(&(a.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(a.cols() as u32).to_le_bytes());
    out
}

/// Runs the honest prover against hashed challenges and packs its
/// messages. Fails if the honest run does not accept.
pub fn fiat_shamir_seal(id: ProtocolId, inputs: &Inputs) -> Result<Vec<u8>, ProtoError> {
    let mut v = verifier(id, inputs)?;
    let mut p = honest_prover(id, inputs)?;
    let run = execute(&mut v, &mut p, &mut source(id, inputs));
    match run.verdict {
        Verdict::Accept => {}
        Verdict::Abort(_) | Verdict::Reject(_) => {
            return Err(ProtoError::NoWitness("the honest run did not accept"))
        }
    }
    let mut out = header(id, inputs);
    for body in run.transcript.prover_messages() {
        let bytes = encode_body(body);
        out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    Ok(out)
}

fn unpack(id: ProtocolId, inputs: &Inputs, blob: &[u8]) -> Result<Vec<Body>, WireError> {
    let head = header(id, inputs);
    let mut r = Reader::new(blob);
    if r.take(head.len()).map_err(|_| WireError::BadHeader)? != head.as_slice() {
        return Err(WireError::BadHeader);
    }
    let a = &inputs.a;
    let mut bodies = Vec::new();
    while !r.is_empty() {
        let len = r.u32()? as usize;
        bodies.push(decode_body(r.take(len)?, a.field().modulus(), a.rows(), a.cols())?);
    }
    Ok(bodies)
}

/// Replays a sealed certificate against the verifier of `id`, recomputing
/// every challenge. Bad framing, missing messages and leftover messages
/// all reject.
pub fn fiat_shamir_verify(id: ProtocolId, inputs: &Inputs, blob: &[u8]) -> Run<Output> {
    let reject = |verdict| Run {
        verdict,
        output: None,
        transcript: Default::default(),
        meter: Default::default(),
    };
    let bodies = match unpack(id, inputs, blob) {
        Ok(b) => b,
        Err(_) => return reject(Verdict::Reject(RejectCause::MalformedCertificate)),
    };
    let mut v = match verifier(id, inputs) {
        Ok(v) => v,
        Err(e) => return reject(e.verdict()),
    };
    let mut prover = ReplayProver::new(bodies);
    let mut run = execute(&mut v, &mut prover, &mut source(id, inputs));
    if run.verdict.is_accept() && prover.remaining() > 0 {
        run.verdict = Verdict::Reject(RejectCause::MalformedCertificate);
        run.output = None;
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use crate::la::DenseMatrix;

    #[test]
    fn seal_and_verify_round_trip() {
        let f = PrimeField::new(7).unwrap();
        let inputs = Inputs::new(DenseMatrix::identity(f, 2));
        let blob = fiat_shamir_seal(ProtocolId::Det, &inputs).unwrap();
        assert_eq!(&blob[..4], BLOB_MAGIC);
        let run = fiat_shamir_verify(ProtocolId::Det, &inputs, &blob);
        assert_eq!(run.output, Some(Output::Determinant(1)));
        let run = fiat_shamir_verify(ProtocolId::Ldup, &inputs, &blob);
        assert_eq!(run.verdict, Verdict::Reject(RejectCause::MalformedCertificate));
        let mut extra = blob.clone();
        extra.extend_from_slice(&[2, 0, 0, 0, 1, 0]);
        let run = fiat_shamir_verify(ProtocolId::Det, &inputs, &extra);
        assert_eq!(run.verdict, Verdict::Reject(RejectCause::MalformedCertificate));
    }
}
