use std::borrow::Cow;

use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::protocol::Output;
use super::rank::{IndependenceAnswer, IndependenceCheck};
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{pluq_crp, DenseMatrix, RankProfile};

/// Which profile a run certifies. The row profile is the column profile of
/// `Aᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrpProjection {
    Columns,
    Rows,
}

impl CrpProjection {
    fn orient(self, a: &DenseMatrix) -> Cow<'_, DenseMatrix> {
        match self {
            CrpProjection::Columns => Cow::Borrowed(a),
            CrpProjection::Rows => Cow::Owned(a.transpose()),
        }
    }
}

/// `R` with `A = A_J·R`, `r x n`. Fails when `J` is dependent or does not
/// span the column space.
pub(crate) fn rref_on(a: &DenseMatrix, cols: &[usize]) -> Result<DenseMatrix, ProtoError> {
    let all: Vec<usize> = (0..a.rows()).collect();
    let aj = a.select(&all, cols);
    let solver = pluq_crp(&aj);
    if solver.rank < cols.len() {
        return Err(ProtoError::NoWitness("claimed columns are dependent"));
    }
    let mut r = DenseMatrix::zeros(a.field(), cols.len(), a.cols());
    for i in 0..a.cols() {
        for (j, &v) in solver.solve_on_pivots(&a.column(i))?.iter().enumerate() {
            r.set(j, i, v);
        }
    }
    if aj.mul(&r)? != *a {
        return Err(ProtoError::NoWitness("claimed columns do not span"));
    }
    Ok(r)
}

/// `Γ[j][k] = Σ_{i < c_{k+1}} R[j][i]·ν_i` with `c_r = n`, for `k ≥ j`.
pub(crate) fn gamma(r: &DenseMatrix, cols: &[usize], nu: &[u64]) -> Vec<Vec<u64>> {
    let f = r.field();
    let (rank, n) = (r.rows(), r.cols());
    (0..rank)
        .map(|j| {
            let row = r.row(j);
            let mut out = vec![0; rank];
            let mut acc = 0;
            let mut i = 0;
            for (k, slot) in out.iter_mut().enumerate() {
                let end = cols.get(k + 1).copied().unwrap_or(n);
                while i < end {
                    acc = f.mul_add(acc, row[i], nu[i]);
                    i += 1;
                }
                *slot = acc;
            }
            out
        })
        .collect()
}

/// The vector `z` the verifier tests against `A·z = 0`: `z_i = ν_i·s_i`
/// where `s_i` sums `x_k` over the pivots `c_{k+1} > i` (plus `x_pre` for
/// `i < c_0`), and `z_{c_j} -= y_j`.
pub(crate) fn nullspace_candidate(
    cols: &[usize],
    nu: &[u64],
    x: &[u64],
    y: &[u64],
    x_pre: u64,
    f: crate::ff::PrimeField,
) -> Vec<u64> {
    let r = cols.len();
    let mut suffix = vec![0; r + 1];
    for k in (0..r).rev() {
        suffix[k] = f.add(suffix[k + 1], x[k]);
    }
    let before = f.add(x_pre, suffix[0]);
    let mut seg = 0;
    let mut z: Vec<u64> = nu
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            while seg < r && cols[seg] <= i {
                seg += 1;
            }
            let s = if seg == 0 { before } else { suffix[seg - 1] };
            f.mul(v, s)
        })
        .collect();
    for (&c, &yj) in cols.iter().zip(y) {
        z[c] = f.sub(z[c], yj);
    }
    z
}

/// Verifier for the column (or row) rank profile. After the independence
/// exchange on the claimed `J`, the verifier sends `ν`, then streams
/// `x_{r-1}, …, x_0`, receiving `y_j = (R·(ν ⊙ s))_j` after each, and
/// finally checks `A·z = 0` with a fresh secret `x_pre`.
#[derive(Debug)]
pub struct CrpVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    projection: CrpProjection,
    check: IndependenceCheck,
    s: SampleSet,
    nu: Vec<u64>,
    x: Vec<u64>,
    y: Vec<u64>,
    script: Script,
}

impl<'a> CrpVerifier<'a> {
    fn new(a: Cow<'a, DenseMatrix>, projection: CrpProjection) -> Self {
        let mut script = Script::new();
        script.push(Step::Recv, 1);
        Self {
            check: IndependenceCheck::new(&a, None),
            s: SampleSet::full(a.field()),
            a,
            projection,
            nu: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            script,
        }
    }

    pub fn columns(a: &'a DenseMatrix) -> Self {
        Self::new(Cow::Borrowed(a), CrpProjection::Columns)
    }

    pub fn rows(a: &'a DenseMatrix) -> Self {
        Self::new(CrpProjection::Rows.orient(a), CrpProjection::Rows)
    }

    pub fn projection(&self) -> CrpProjection {
        self.projection
    }

    /// The certified profile, once accepted.
    pub fn profile(&self) -> Option<&[usize]> {
        match self.script.verdict() {
            Some(Verdict::Accept) => Some(self.check.columns()),
            _ => None,
        }
    }

    fn rank(&self) -> usize {
        self.check.columns().len()
    }
}

impl VerifierMachine for CrpVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        let pos = self.script.expect(&[Step::Send, Step::Local], "verifier send")?;
        self.script.advance();
        let r = self.rank();
        let f = self.a.field();
        match pos {
            1 => self.check.challenge(&self.a, ctx).map(Some),
            3 => {
                self.nu = ctx.draw_vec(&self.s, self.a.cols())?;
                Ok(Some(Body::Field(self.nu.clone())))
            }
            p if p < 4 + 2 * r => {
                let j = r - 1 - (p - 4) / 2;
                self.x[j] = ctx.draw(&self.s)?;
                Ok(Some(Body::Field(vec![self.x[j]])))
            }
            _ => {
                let x_pre = ctx.draw(&SampleSet::nonzero(f))?;
                let z = nullspace_candidate(self.check.columns(), &self.nu, &self.x, &self.y, x_pre, f);
                ctx.meter().charge_ops(2 * r + self.a.cols() + 1);
                let az = self.a.matvec(&z, ctx.meter())?;
                self.script.finish(if az.iter().all(|&v| v == 0) {
                    Verdict::Accept
                } else {
                    Verdict::Reject(RejectCause::NullspaceCheck)
                });
                Ok(None)
            }
        }
    }

    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        let r = self.rank();
        let result = match pos {
            0 => self.check.claim(&self.a, body).map(|()| {
                let r = self.rank();
                self.x = vec![0; r];
                self.y = vec![0; r];
                self.script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1);
                for _ in 0..r {
                    self.script.push(Step::Send, 1).push(Step::Recv, 1);
                }
                self.script.push(Step::Local, 1);
            }),
            2 => self.check.check(&self.a, body, ctx),
            p => {
                let j = r - 1 - (p - 5) / 2;
                match field_payload(body, 1, self.a.field()) {
                    Some(v) => {
                        self.y[j] = v[0];
                        Ok(())
                    }
                    None => Err(RejectCause::MalformedMessage),
                }
            }
        };
        if let Err(cause) = result {
            self.script.finish(Verdict::Reject(cause));
        }
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        let profile = RankProfile::new(self.profile()?.to_vec(), self.a.cols()).ok()?;
        Some(match self.projection {
            CrpProjection::Columns => Output::ColumnProfile(profile),
            CrpProjection::Rows => Output::RowProfile(profile),
        })
    }
}

#[derive(Clone, Debug)]
struct CrpWitness {
    cols: Vec<usize>,
    r: DenseMatrix,
    independence: IndependenceAnswer,
}

/// Honest prover: claims the profile from a column-pivoted elimination and
/// answers from `R`.
#[derive(Debug)]
pub struct CrpProver {
    witness: Result<CrpWitness, ProtoError>,
    gamma: Vec<Vec<u64>>,
    x: Vec<u64>,
    script: Script,
}

impl CrpProver {
    fn new(a: &DenseMatrix) -> Self {
        let cols = pluq_crp(a).column_profile().into_inner();
        Self::with_claim(a, cols)
    }

    /// A prover claiming `cols`; it can answer only when `A = A_J·R` has a
    /// solution with independent `A_J`.
    pub(crate) fn with_claim(a: &DenseMatrix, cols: Vec<usize>) -> Self {
        let witness = rref_on(a, &cols).and_then(|r| {
            Ok(CrpWitness {
                independence: IndependenceAnswer::new(a, cols.clone())?,
                cols,
                r,
            })
        });
        let rank = witness.as_ref().map_or(0, |w| w.cols.len());
        let mut script = Script::new();
        script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1);
        for _ in 0..rank {
            script.push(Step::Recv, 1).push(Step::Send, 1);
        }
        Self {
            witness,
            gamma: Vec::new(),
            x: vec![0; rank],
            script,
        }
    }

    pub fn columns(a: &DenseMatrix) -> Self {
        Self::new(a)
    }

    pub fn rows(a: &DenseMatrix) -> Self {
        Self::new(&a.transpose())
    }
}

impl ProverMachine for CrpProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let w = self.witness.as_mut().map_err(|e| e.clone())?;
        let rank = w.cols.len();
        match pos {
            1 => w.independence.receive(body)?,
            3 => {
                let nu = field_challenge(body, w.r.cols())?;
                self.gamma = gamma(&w.r, &w.cols, nu);
            }
            p => {
                let j = rank - 1 - (p - 4) / 2;
                self.x[j] = field_challenge(body, 1)?[0];
            }
        }
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let w = self.witness.as_ref().map_err(Clone::clone)?;
        let body = match pos {
            0 => w.independence.claim(),
            2 => w.independence.respond()?,
            p => {
                let j = w.cols.len() - 1 - (p - 5) / 2;
                let f = w.r.field();
                Body::Field(vec![f.dot(&self.gamma[j][j..], &self.x[j..])])
            }
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Certifies the column rank profile with the honest prover.
pub fn run_crp(a: &DenseMatrix, source: &mut ChallengeSource) -> Run<RankProfile> {
    let mut v = CrpVerifier::columns(a);
    let mut p = CrpProver::columns(a);
    execute(&mut v, &mut p, source).map(|o| match o {
        Output::ColumnProfile(c) => Some(c),
        _ => None,
    })
}

/// Certifies the row rank profile with the honest prover.
pub fn run_rrp(a: &DenseMatrix, source: &mut ChallengeSource) -> Run<RankProfile> {
    let mut v = CrpVerifier::rows(a);
    let mut p = CrpProver::rows(a);
    execute(&mut v, &mut p, source).map(|o| match o {
        Output::RowProfile(c) => Some(c),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{seeded, PrimeField};
    use crate::oracle::{oracle_crp, oracle_rrp};

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), &rows).unwrap()
    }

    #[test]
    fn honest_profile_accepts() {
        let a = m(101, &[&[0, 1, 1, 2], &[0, 2, 2, 4], &[0, 0, 0, 1]]);
        let run = run_crp(&a, &mut ChallengeSource::interactive(1));
        assert!(run.verdict.is_accept(), "{:?}", run.verdict);
        assert_eq!(run.output.unwrap().indices(), &[1, 3]);
        assert_eq!(run.meter.matvecs, 2);
        let run = run_rrp(&a, &mut ChallengeSource::interactive(1));
        assert_eq!(run.output.unwrap().indices(), &[0, 2]);
    }

    #[test]
    fn random_low_rank_matches_oracle() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = seeded(8);
        for seed in 0..30 {
            let (mm, n, r) = (1 + seed % 5, 1 + seed % 6, seed % 4);
            let a = DenseMatrix::random(f, mm, r, &mut rng).mul(&DenseMatrix::random(f, r, n, &mut rng)).unwrap();
            let run = run_crp(&a, &mut ChallengeSource::interactive(seed as u64));
            assert!(run.verdict.is_accept());
            assert_eq!(run.output.unwrap().indices(), oracle_crp(&a).indices());
            let run = run_rrp(&a, &mut ChallengeSource::interactive(seed as u64));
            assert_eq!(run.output.unwrap().indices(), oracle_rrp(&a).indices());
        }
    }

    #[test]
    fn nullspace_candidate_is_in_kernel_for_honest_y() {
        let f = PrimeField::new(101).unwrap();
        let a = m(101, &[&[1, 2, 0, 3], &[2, 4, 1, 1]]);
        let cols = [0, 2];
        let r = rref_on(&a, &cols).unwrap();
        let nu = [3, 5, 7, 9];
        let x = [11, 13];
        let g = gamma(&r, &cols, &nu);
        let y: Vec<u64> = (0..2).map(|j| f.dot(&g[j][j..], &x[j..])).collect();
        let z = nullspace_candidate(&cols, &nu, &x, &y, 17, f);
        assert!(a.apply(&z).unwrap().iter().all(|&v| v == 0));
    }

    #[test]
    fn later_columns_fail_spanning_check() {
        let a = m(101, &[&[1, 0], &[0, 0]]);
        assert!(rref_on(&a, &[1]).is_err());
    }
}
