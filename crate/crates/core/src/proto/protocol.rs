use std::borrow::Cow;

use super::channel::{execute, ProverMachine, Run, VerifierMachine};
use super::crp::{CrpProver, CrpVerifier};
use super::freivalds::{FreivaldsVerifier, SilentProver};
use super::grp::{GrpProver, GrpVerifier};
use super::ldup::{DetProver, DetVerifier, LdupProver, LdupVerifier};
use super::noninteractive::{NonInteractiveVerifier, PluqKind, PluqProver};
use super::rank::{RankLowerProver, RankLowerVerifier, RankUpperProver, RankUpperVerifier};
use super::rpm::{RpmInvProver, RpmInvVerifier, RpmProver, RpmVerifier};
use super::tri_equiv::{Side, TriEquivProver, TriEquivVerifier};
use super::{ChallengeSource, ProtoError};
use crate::la::{DenseMatrix, Diagonal, Permutation, RankProfile, RankProfileMatrix};

/// Every certificate, with its one-byte wire code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    Freivalds,
    CrpNonInteractive,
    RpmNonInteractive,
    TriEquivLower,
    TriEquivUpper,
    Grp,
    Ldup,
    Det,
    RankUpper,
    RankLower,
    Crp,
    Rrp,
    RpmInvertible,
    Rpm,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 14] = [
        ProtocolId::Freivalds,
        ProtocolId::CrpNonInteractive,
        ProtocolId::RpmNonInteractive,
        ProtocolId::TriEquivLower,
        ProtocolId::TriEquivUpper,
        ProtocolId::Grp,
        ProtocolId::Ldup,
        ProtocolId::Det,
        ProtocolId::RankUpper,
        ProtocolId::RankLower,
        ProtocolId::Crp,
        ProtocolId::Rrp,
        ProtocolId::RpmInvertible,
        ProtocolId::Rpm,
    ];

    pub fn code(self) -> u8 {
        Self::ALL.iter().position(|&p| p == self).unwrap() as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get((code as usize).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::Freivalds => "freivalds",
            ProtocolId::CrpNonInteractive => "crp-ni",
            ProtocolId::RpmNonInteractive => "rpm-ni",
            ProtocolId::TriEquivLower => "tri-equiv",
            ProtocolId::TriEquivUpper => "tri-equiv-upper",
            ProtocolId::Grp => "grp",
            ProtocolId::Ldup => "ldup",
            ProtocolId::Det => "det",
            ProtocolId::RankUpper => "rank-upper",
            ProtocolId::RankLower => "rank-lower",
            ProtocolId::Crp => "crp",
            ProtocolId::Rrp => "rrp",
            ProtocolId::RpmInvertible => "rpm-inv",
            ProtocolId::Rpm => "rpm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// Whether the protocol needs a second matrix `B`.
    pub fn needs_b(self) -> bool {
        matches!(self, ProtocolId::TriEquivLower | ProtocolId::TriEquivUpper)
    }
}

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Public inputs of a run. Only `a` is needed by most protocols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inputs {
    pub a: DenseMatrix,
    /// Second operand: `B` of a triangular equivalence or of a product.
    pub b: Option<DenseMatrix>,
    /// Claimed product for Freivalds; computed as `A·B` when absent.
    pub c: Option<DenseMatrix>,
    /// Claimed upper bound for the rank.
    pub rank: Option<usize>,
    /// Claimed independent columns.
    pub columns: Option<Vec<usize>>,
    /// Freivalds repetitions.
    pub repetitions: usize,
}

impl Inputs {
    pub fn new(a: DenseMatrix) -> Self {
        Self {
            a,
            b: None,
            c: None,
            rank: None,
            columns: None,
            repetitions: 1,
        }
    }

    pub fn with_b(mut self, b: DenseMatrix) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_c(mut self, c: DenseMatrix) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_rank(mut self, r: usize) -> Self {
        self.rank = Some(r);
        self
    }

    pub fn with_columns(mut self, cols: Vec<usize>) -> Self {
        self.columns = Some(cols);
        self
    }

    pub fn with_repetitions(mut self, k: usize) -> Self {
        self.repetitions = k;
        self
    }

    fn b_or_a(&self) -> &DenseMatrix {
        self.b.as_ref().unwrap_or(&self.a)
    }

    fn product(&self) -> Result<Cow<'_, DenseMatrix>, ProtoError> {
        Ok(match &self.c {
            Some(c) => Cow::Borrowed(c),
            None => Cow::Owned(self.a.mul(self.b_or_a())?),
        })
    }

    fn required_b(&self) -> Result<&DenseMatrix, ProtoError> {
        self.b
            .as_ref()
            .ok_or_else(|| ProtoError::InvalidInput("this protocol needs a second matrix".into()))
    }

    /// Canonical bytes of everything public besides `A`, hashed into the
    /// Fiat–Shamir chain.
    pub fn public_bytes(&self, id: ProtocolId) -> Vec<u8> {
        let mut out = Vec::new();
        let put_matrix = |out: &mut Vec<u8>, tag: u8, m: &DenseMatrix| {
            out.push(tag);
            out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
            out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
            for &v in m.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        };
        match id {
            ProtocolId::Freivalds => {
                put_matrix(&mut out, b'B', self.b_or_a());
                if let Ok(c) = self.product() {
                    put_matrix(&mut out, b'C', &c);
                }
                out.push(b'k');
                out.extend_from_slice(&(self.repetitions as u32).to_le_bytes());
            }
            ProtocolId::TriEquivLower | ProtocolId::TriEquivUpper => {
                if let Some(b) = &self.b {
                    put_matrix(&mut out, b'B', b);
                }
            }
            ProtocolId::RankUpper => {
                if let Some(r) = self.rank {
                    out.push(b'r');
                    out.extend_from_slice(&(r as u32).to_le_bytes());
                }
            }
            ProtocolId::RankLower => {
                if let Some(c) = &self.columns {
                    out.push(b'J');
                    out.extend_from_slice(&(c.len() as u32).to_le_bytes());
                    for &j in c {
                        out.extend_from_slice(&(j as u32).to_le_bytes());
                    }
                }
            }
            _ => {}
        }
        out
    }
}

/// What an accepting verifier has certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Output {
    /// A yes/no statement (a product or a triangular equivalence).
    Verified,
    Determinant(u64),
    ColumnProfile(RankProfile),
    RowProfile(RankProfile),
    RankProfileMatrix(RankProfileMatrix),
    /// The committed LDUP factors `P` and `D`.
    Ldup { p: Permutation, d: Diagonal },
    RankAtMost(usize),
    /// Columns shown to be independent, a lower bound on the rank.
    IndependentColumns(RankProfile),
}

/// The verifier machine of `id` on these inputs.
pub fn verifier(
    id: ProtocolId,
    inputs: &Inputs,
) -> Result<Box<dyn VerifierMachine + '_>, ProtoError> {
    let a = &inputs.a;
    Ok(match id {
        ProtocolId::Freivalds => Box::new(FreivaldsVerifier::new(
            Cow::Borrowed(a),
            Cow::Borrowed(inputs.b_or_a()),
            inputs.product()?,
            inputs.repetitions,
        )?),
        ProtocolId::CrpNonInteractive => Box::new(NonInteractiveVerifier::new(a, PluqKind::Crp)),
        ProtocolId::RpmNonInteractive => Box::new(NonInteractiveVerifier::new(a, PluqKind::Rpm)),
        ProtocolId::TriEquivLower => {
            Box::new(TriEquivVerifier::new(a, inputs.required_b()?, Side::Lower)?)
        }
        ProtocolId::TriEquivUpper => {
            Box::new(TriEquivVerifier::new(a, inputs.required_b()?, Side::Upper)?)
        }
        ProtocolId::Grp => Box::new(GrpVerifier::new(a)?),
        ProtocolId::Ldup => Box::new(LdupVerifier::new(a)?),
        ProtocolId::Det => Box::new(DetVerifier::new(a)?),
        ProtocolId::RankUpper => Box::new(RankUpperVerifier::new(a, inputs.rank)),
        ProtocolId::RankLower => Box::new(RankLowerVerifier::new(a, inputs.columns.clone())),
        ProtocolId::Crp => Box::new(CrpVerifier::columns(a)),
        ProtocolId::Rrp => Box::new(CrpVerifier::rows(a)),
        ProtocolId::RpmInvertible => Box::new(RpmInvVerifier::new(Cow::Borrowed(a), true)?),
        ProtocolId::Rpm => Box::new(RpmVerifier::new(a)),
    })
}

/// The honest prover of `id`. Provers without a witness abort on their
/// first move rather than here.
pub fn honest_prover(
    id: ProtocolId,
    inputs: &Inputs,
) -> Result<Box<dyn ProverMachine + '_>, ProtoError> {
    let a = &inputs.a;
    Ok(match id {
        ProtocolId::Freivalds => Box::new(SilentProver),
        ProtocolId::CrpNonInteractive => Box::new(PluqProver::honest(a, PluqKind::Crp)),
        ProtocolId::RpmNonInteractive => Box::new(PluqProver::honest(a, PluqKind::Rpm)),
        ProtocolId::TriEquivLower => {
            Box::new(TriEquivProver::new(a, inputs.required_b()?, Side::Lower))
        }
        ProtocolId::TriEquivUpper => {
            Box::new(TriEquivProver::new(a, inputs.required_b()?, Side::Upper))
        }
        ProtocolId::Grp => Box::new(GrpProver::new(a)),
        ProtocolId::Ldup => Box::new(LdupProver::new(a)),
        ProtocolId::Det => Box::new(DetProver::new(a)),
        ProtocolId::RankUpper => Box::new(RankUpperProver::new(a, inputs.rank)),
        ProtocolId::RankLower => Box::new(RankLowerProver::new(a, inputs.columns.clone())),
        ProtocolId::Crp => Box::new(CrpProver::columns(a)),
        ProtocolId::Rrp => Box::new(CrpProver::rows(a)),
        ProtocolId::RpmInvertible => Box::new(RpmInvProver::new(Cow::Borrowed(a))),
        ProtocolId::Rpm => Box::new(RpmProver::new(a)),
    })
}

/// Runs `id` with the honest prover.
pub fn run(id: ProtocolId, inputs: &Inputs, source: &mut ChallengeSource) -> Run<Output> {
    let machines = verifier(id, inputs).and_then(|v| Ok((v, honest_prover(id, inputs)?)));
    match machines {
        Ok((mut v, mut p)) => execute(&mut v, &mut p, source),
        Err(e) => Run {
            verdict: e.verdict(),
            output: None,
            transcript: Default::default(),
            meter: Default::default(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_and_names_round_trip() {
        for id in ProtocolId::ALL {
            assert_eq!(ProtocolId::from_code(id.code()), Some(id));
            assert_eq!(ProtocolId::from_name(id.name()), Some(id));
        }
        assert_eq!(ProtocolId::Freivalds.code(), 1);
        assert_eq!(ProtocolId::Det.code(), 8);
        assert_eq!(ProtocolId::Rpm.code(), 14);
        assert_eq!(ProtocolId::from_code(0), None);
        assert_eq!(ProtocolId::from_code(15), None);
    }
}
