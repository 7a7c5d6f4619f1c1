//! The protocol engine.
//!
//! Every certificate is a pair of state machines, a [`VerifierMachine`] and
//! a [`ProverMachine`], driven by [`execute`] over a channel that records
//! the transcript and meters communication. Machines refuse to act out of
//! turn: soundness depends on what the prover knows when it commits, so an
//! ordering violation aborts the run instead of being reordered.

mod challenge;
mod channel;
mod crp;
mod fiat_shamir;
mod freivalds;
mod grp;
mod ldup;
mod meter;
mod noninteractive;
mod protocol;
mod rank;
mod rpm;
mod tri_equiv;
mod wire;

use thiserror::Error;

use crate::ff::FieldError;
use crate::la::LaError;

pub use challenge::ChallengeSource;
pub use channel::{
    execute, execute_faulty, replay, Ctx, Fault, ProverMachine, ReplayProver, Run, Turn,
    VerifierMachine,
};
pub use crp::{run_crp, run_rrp, CrpProjection, CrpProver, CrpVerifier};
pub use fiat_shamir::{fiat_shamir_seal, fiat_shamir_verify, BLOB_MAGIC};
pub use freivalds::{freivalds_check, FreivaldsVerifier, SilentProver};
pub use grp::{run_grp, run_grp_nonsingular, GrpProver, GrpVerifier};
pub use ldup::{run_det, run_ldup, DetProver, DetVerifier, LdupProver, LdupVerifier};
pub use meter::CostMeter;
pub use noninteractive::{
    crp_noninteractive_verify, pluq_certificate, rpm_noninteractive_verify, NonInteractiveVerifier,
    PluqKind, PluqProver,
};
pub use protocol::{honest_prover, run, verifier, Inputs, Output, ProtocolId};
pub use rank::{
    run_rank_lower, run_rank_upper, RankLowerProver, RankLowerVerifier, RankUpperProver,
    RankUpperVerifier,
};
pub use rpm::{run_rpm, run_rpm_invertible, RpmInvProver, RpmInvVerifier, RpmProver, RpmVerifier};
pub use tri_equiv::{run_triangular_equiv, Side, TriEquivProver, TriEquivVerifier};
pub use wire::{decode_body, encode_body, WireError};

pub(crate) use channel::{field_challenge, Script, Step};
pub(crate) use crp::{nullspace_candidate, rref_on};
pub(crate) use rank::IndependenceAnswer;
pub(crate) use tri_equiv::transform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    ProverToVerifier,
    VerifierToProver,
}

/// A one-byte assertion made by the prover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// The conjugate `PᵀU₁P` of the committed LDUP factor is upper triangular.
    UpperConjugate,
    NonSingular,
    Singular,
}

/// Message payloads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    Claim(Claim),
    Rank(usize),
    Indices(Vec<usize>),
    Field(Vec<u64>),
    /// A permutation and an invertible diagonal.
    Commitment { perm: Vec<usize>, diag: Vec<u64> },
    /// A full PLUQ factorization, `l` is `m x rank` and `u` is `rank x n`,
    /// both row-major.
    Pluq {
        rank: usize,
        p: Vec<usize>,
        l: Vec<u64>,
        u: Vec<u64>,
        q: Vec<usize>,
    },
}

impl Body {
    pub fn field_elements(&self) -> u64 {
        match self {
            Body::Field(v) => v.len() as u64,
            Body::Commitment { diag, .. } => diag.len() as u64,
            Body::Pluq { l, u, .. } => (l.len() + u.len()) as u64,
            Body::Claim(_) | Body::Rank(_) | Body::Indices(_) => 0,
        }
    }

    pub fn integers(&self) -> u64 {
        match self {
            Body::Rank(_) => 1,
            Body::Indices(v) => v.len() as u64,
            Body::Commitment { perm, .. } => perm.len() as u64,
            Body::Pluq { p, q, .. } => (1 + p.len() + q.len()) as u64,
            Body::Claim(_) | Body::Field(_) => 0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Body::Claim(_) => "claim",
            Body::Rank(_) => "rank",
            Body::Indices(_) => "indices",
            Body::Field(_) => "field elements",
            Body::Commitment { .. } => "commitment",
            Body::Pluq { .. } => "PLUQ factorization",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub direction: Direction,
    pub body: Body,
}

/// Messages in the order they crossed the channel.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn prover_messages(&self) -> impl Iterator<Item = &Body> {
        self.messages
            .iter()
            .filter(|m| m.direction == Direction::ProverToVerifier)
            .map(|m| &m.body)
    }

    pub fn verifier_messages(&self) -> impl Iterator<Item = &Body> {
        self.messages
            .iter()
            .filter(|m| m.direction == Direction::VerifierToProver)
            .map(|m| &m.body)
    }
}

/// Which check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectCause {
    /// A final linear identity did not hold.
    ProductCheck,
    /// The conjugated-factor check of the rank profile matrix protocol.
    ConjugateCheck,
    /// `A·z ≠ 0` in the column rank profile protocol.
    NullspaceCheck,
    /// `A·γ ≠ w` in the upper rank bound.
    ImageMismatch,
    /// `γ` has more nonzeros than the claimed rank.
    WeightExceedsRank,
    /// The prover did not recover the verifier's secret.
    SecretMismatch,
    NotRowEchelon,
    NotTriangular,
    /// A claimed rank or index list is out of range or not increasing.
    InvalidClaim,
    /// Row and column rank profiles of different lengths.
    RankMismatch,
    MalformedMessage,
    MalformedCommitment,
    MalformedWitness,
    MalformedCertificate,
}

/// Why a run stopped before a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbortCause {
    OutOfOrder,
    NoGrpWitness,
    SingularMatrix,
    NoWitness,
    InvalidInput,
    Internal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject(RejectCause),
    Abort(AbortCause),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, Verdict::Reject(_))
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, Verdict::Abort(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject(_) => "reject",
            Verdict::Abort(_) => "abort",
        }
    }

    pub fn cause(&self) -> Option<String> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(c) => Some(format!("{c:?}")),
            Verdict::Abort(c) => Some(format!("{c:?}")),
        }
    }
}

/// Engine-level failures. Any of these ends a run with [`Verdict::Abort`],
/// except an exhausted certificate, which is a rejection.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtoError {
    #[error("out of order: {0}")]
    OutOfOrder(&'static str),
    #[error("matrix has no generic rank profile")]
    NoGrpWitness,
    #[error("matrix is singular")]
    Singular,
    #[error("prover has no witness: {0}")]
    NoWitness(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("certificate ended before the protocol did")]
    CertificateExhausted,
    #[error(transparent)]
    La(#[from] LaError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl ProtoError {
    pub fn verdict(&self) -> Verdict {
        Verdict::Abort(match self {
            ProtoError::OutOfOrder(_) => AbortCause::OutOfOrder,
            ProtoError::NoGrpWitness => AbortCause::NoGrpWitness,
            ProtoError::Singular => AbortCause::SingularMatrix,
            ProtoError::NoWitness(_) => AbortCause::NoWitness,
            ProtoError::InvalidInput(_) => AbortCause::InvalidInput,
            ProtoError::CertificateExhausted => {
                return Verdict::Reject(RejectCause::MalformedCertificate)
            }
            ProtoError::La(LaError::SingularMatrix) => AbortCause::SingularMatrix,
            ProtoError::La(LaError::NoGenericRankProfile) => AbortCause::NoGrpWitness,
            ProtoError::La(_) | ProtoError::Field(_) => AbortCause::Internal,
        })
    }
}
