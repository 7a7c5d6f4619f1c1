use sha2::{Digest, Sha256};

use super::protocol::ProtocolId;
use super::wire::{encode_body, MAGIC};
use super::{Body, Direction, ProtoError};
use crate::ff::{seeded, RandomSource, SampleSet};
use crate::la::DenseMatrix;

/// Where verifier randomness comes from.
#[derive(Clone, Debug)]
pub enum ChallengeSource {
    /// A seeded generator; the prover never sees its state.
    Interactive(RandomSource),
    /// A SHA-256 chain over the inputs and every message so far.
    FiatShamir(HashChain),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashChain {
    state: [u8; 32],
    counter: u64,
}

impl HashChain {
    fn absorb(&mut self, label: &[u8], data: &[u8]) {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update(label);
        h.update((data.len() as u32).to_le_bytes());
        h.update(data);
        self.state = h.finalize().into();
    }

    fn draw(&mut self, s: &SampleSet) -> Result<u64, ProtoError> {
        let size = s.size();
        if size == 0 {
            return Err(crate::ff::FieldError::EmptySampleSet.into());
        }
        // Largest multiple of `size` that fits; values above it are
        // rejected so the reduction is exactly uniform.
        let zone = (u64::MAX / size) * size;
        loop {
            let mut h = Sha256::new();
            h.update(self.state);
            h.update(b"challenge");
            h.update(self.counter.to_le_bytes());
            self.counter += 1;
            let block: [u8; 32] = h.finalize().into();
            for chunk in block.chunks_exact(8) {
                let x = u64::from_le_bytes(chunk.try_into().unwrap());
                if x < zone {
                    let value = s.nth(x % size)?;
                    self.absorb(b"drawn", &value.to_le_bytes());
                    return Ok(value);
                }
            }
        }
    }
}

impl ChallengeSource {
    pub fn interactive(seed: u64) -> Self {
        ChallengeSource::Interactive(seeded(seed))
    }

    /// Starts a hash chain from the protocol, the input matrix, and any
    /// further public inputs already serialized in `extra`.
    pub fn fiat_shamir(id: ProtocolId, a: &DenseMatrix, extra: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(MAGIC);
        h.update([id.code()]);
        h.update(a.field().modulus().to_le_bytes());
        h.update((a.rows() as u32).to_le_bytes());
        h.update((a.cols() as u32).to_le_bytes());
        for &v in a.data() {
            h.update(v.to_le_bytes());
        }
        h.update(extra);
        ChallengeSource::FiatShamir(HashChain {
            state: h.finalize().into(),
            counter: 0,
        })
    }

    pub fn is_fiat_shamir(&self) -> bool {
        matches!(self, ChallengeSource::FiatShamir(_))
    }

    pub fn draw(&mut self, s: &SampleSet) -> Result<u64, ProtoError> {
        match self {
            ChallengeSource::Interactive(rng) => Ok(s.sample(rng)?),
            ChallengeSource::FiatShamir(chain) => chain.draw(s),
        }
    }

    pub fn draw_vec(&mut self, s: &SampleSet, len: usize) -> Result<Vec<u64>, ProtoError> {
        (0..len).map(|_| self.draw(s)).collect()
    }

    /// Feeds a message into the hash chain; no effect in interactive mode.
    pub fn absorb(&mut self, direction: Direction, body: &Body) {
        if let ChallengeSource::FiatShamir(chain) = self {
            let label: &[u8] = match direction {
                Direction::ProverToVerifier => b"P",
                Direction::VerifierToProver => b"V",
            };
            chain.absorb(label, &encode_body(body));
        }
    }
}
