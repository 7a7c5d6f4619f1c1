//! Certificates for exact linear algebra over prime fields.
//!
//! A prover that has done an expensive elimination convinces a verifier of
//! the result (a rank bound, a rank profile, the rank profile matrix, a
//! determinant, triangular equivalence) at roughly the cost of a few
//! matrix-vector products. Interactive protocols run over a simulated,
//! order-enforcing channel; a Fiat–Shamir mode turns any of them into a
//! static certificate blob.
//!
//! Indices are 0-based throughout.
//!
//! ```
//! use rankcert::prelude::*;
//!
//! let f = PrimeField::new(7).unwrap();
//! let a = DenseMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
//! let run = run_det(&a, &mut ChallengeSource::interactive(1)).unwrap();
//! assert!(run.verdict.is_accept());
//! assert_eq!(run.output, Some(5));
//! ```

pub mod adversary;
pub mod ff;
pub mod la;
pub mod oracle;
pub mod par;
pub mod proto;

pub mod prelude {
    pub use crate::ff::{seeded, FieldElement, PrimeField, RandomSource, SampleSet};
    pub use crate::la::{
        DenseMatrix, Diagonal, LdupFactorization, Permutation, PluqFactorization,
        RankProfile, RankProfileMatrix,
    };
    pub use crate::par::Execution;
    pub use crate::proto::{
        run_crp, run_det, run_grp, run_ldup, run_rank_lower, run_rank_upper, run_rpm,
        run_rpm_invertible, run_rrp, run_triangular_equiv, ChallengeSource, CostMeter,
        ProtocolId, Side, Verdict,
    };
}
