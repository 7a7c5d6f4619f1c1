use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::protocol::Output;
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{pluq_crp, DenseMatrix, PluqFactorization, RankProfile};

/// Verifier for `rank A ≤ r`: the prover names `r`, the verifier sends
/// `w = A·ν` for a random `ν`, and the prover must return a preimage of
/// `w` with at most `r` nonzeros.
#[derive(Debug)]
pub struct RankUpperVerifier<'a> {
    a: &'a DenseMatrix,
    bound: Option<usize>,
    s: SampleSet,
    r: usize,
    w: Vec<u64>,
    script: Script,
}

impl<'a> RankUpperVerifier<'a> {
    /// `bound`, when given, is the public claim: the prover must name it
    /// (capped at `min(m, n)`). Otherwise the prover's claim is the output.
    pub fn new(a: &'a DenseMatrix, bound: Option<usize>) -> Self {
        let mut script = Script::new();
        script.push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1);
        Self {
            a,
            bound,
            s: SampleSet::full(a.field()),
            r: 0,
            w: Vec::new(),
            script,
        }
    }
}

impl VerifierMachine for RankUpperVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        self.script.expect(&[Step::Send], "verifier send")?;
        self.script.advance();
        let nu = ctx.draw_vec(&self.s, self.a.cols())?;
        self.w = self.a.matvec(&nu, ctx.meter())?;
        Ok(Some(Body::Field(self.w.clone())))
    }

    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        if pos == 0 {
            let full = self.a.rows().min(self.a.cols());
            // A public bound is the statement; a different claim would
            // certify something else.
            let ok = |r: usize| match self.bound {
                Some(b) => r == b.min(full),
                None => r <= full,
            };
            match body {
                Body::Rank(r) if ok(*r) => self.r = *r,
                Body::Rank(_) => self.script.finish(Verdict::Reject(RejectCause::InvalidClaim)),
                _ => self.script.finish(Verdict::Reject(RejectCause::MalformedMessage)),
            }
            return Ok(());
        }
        let Some(gamma) = field_payload(body, self.a.cols(), self.a.field()) else {
            self.script.finish(Verdict::Reject(RejectCause::MalformedMessage));
            return Ok(());
        };
        let weight = gamma.iter().filter(|&&g| g != 0).count();
        ctx.meter().charge_ops(gamma.len());
        let verdict = if weight > self.r {
            Verdict::Reject(RejectCause::WeightExceedsRank)
        } else if self.a.matvec(gamma, ctx.meter())? != self.w {
            Verdict::Reject(RejectCause::ImageMismatch)
        } else {
            Verdict::Accept
        };
        self.script.finish(verdict);
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        Some(Output::RankAtMost(self.r))
    }
}

/// Honest prover: claims the public bound, or the actual rank without
/// one, and solves on the pivot columns.
#[derive(Debug)]
pub struct RankUpperProver<'a> {
    a: &'a DenseMatrix,
    claim: usize,
    pluq: Result<PluqFactorization, ProtoError>,
    w: Option<Vec<u64>>,
    script: Script,
}

impl<'a> RankUpperProver<'a> {
    pub fn new(a: &'a DenseMatrix, bound: Option<usize>) -> Self {
        let pluq = pluq_crp(a);
        let claim = bound.map_or(pluq.rank, |b| b.min(a.rows().min(a.cols())));
        let pluq = match bound {
            Some(b) if pluq.rank > b => Err(ProtoError::NoWitness("rank exceeds the bound")),
            _ => Ok(pluq),
        };
        let mut script = Script::new();
        script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1);
        Self {
            a,
            claim,
            pluq,
            w: None,
            script,
        }
    }
}

impl ProverMachine for RankUpperProver<'_> {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.script.expect(&[Step::Recv], "prover receive")?;
        self.w = Some(field_challenge(body, self.a.rows())?.to_vec());
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let pluq = self.pluq.as_ref().map_err(Clone::clone)?;
        let body = if pos == 0 {
            Body::Rank(self.claim)
        } else {
            Body::Field(pluq.solve_on_pivots(self.w.as_deref().unwrap_or_default())?)
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Verifier half of the independence exchange: takes the claimed columns
/// `J`, sends `v = A·α` for a secret `α` supported on `J` with nonzero
/// entries, and expects `α_J` back.
#[derive(Clone, Debug)]
pub(crate) struct IndependenceCheck {
    expected: Option<Vec<usize>>,
    s: SampleSet,
    cols: Vec<usize>,
    alpha: Vec<u64>,
}

impl IndependenceCheck {
    pub(crate) fn new(a: &DenseMatrix, expected: Option<Vec<usize>>) -> Self {
        Self {
            expected,
            s: SampleSet::nonzero(a.field()),
            cols: Vec::new(),
            alpha: Vec::new(),
        }
    }

    pub(crate) fn columns(&self) -> &[usize] {
        &self.cols
    }

    pub(crate) fn claim(&mut self, a: &DenseMatrix, body: &Body) -> Result<(), RejectCause> {
        let Body::Indices(cols) = body else {
            return Err(RejectCause::MalformedMessage);
        };
        let increasing = cols.windows(2).all(|w| w[0] < w[1]);
        let in_range = cols.last().is_none_or(|&c| c < a.cols()) && cols.len() <= a.rows();
        let matches = self.expected.as_ref().is_none_or(|e| e == cols);
        if !(increasing && in_range && matches) {
            return Err(RejectCause::InvalidClaim);
        }
        self.cols = cols.clone();
        Ok(())
    }

    pub(crate) fn challenge(&mut self, a: &DenseMatrix, ctx: &mut Ctx<'_>) -> Result<Body, ProtoError> {
        self.alpha = ctx.draw_vec(&self.s, self.cols.len())?;
        let mut full = vec![0; a.cols()];
        for (&c, &x) in self.cols.iter().zip(&self.alpha) {
            full[c] = x;
        }
        Ok(Body::Field(a.matvec(&full, ctx.meter())?))
    }

    pub(crate) fn check(&self, a: &DenseMatrix, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), RejectCause> {
        let beta = field_payload(body, self.cols.len(), a.field()).ok_or(RejectCause::MalformedMessage)?;
        ctx.meter().charge_ops(beta.len());
        if beta == self.alpha.as_slice() {
            Ok(())
        } else {
            Err(RejectCause::SecretMismatch)
        }
    }
}

/// Prover half: recovers `α_J` from `A·α` by solving on `A_J`.
#[derive(Clone, Debug)]
pub(crate) struct IndependenceAnswer {
    cols: Vec<usize>,
    solver: PluqFactorization,
    v: Vec<u64>,
}

impl IndependenceAnswer {
    /// Fails when the columns are out of range or dependent.
    pub(crate) fn new(a: &DenseMatrix, cols: Vec<usize>) -> Result<Self, ProtoError> {
        if cols.iter().any(|&c| c >= a.cols()) {
            return Err(ProtoError::InvalidInput("column index out of range".into()));
        }
        let rows: Vec<usize> = (0..a.rows()).collect();
        let solver = pluq_crp(&a.select(&rows, &cols));
        if solver.rank < cols.len() {
            return Err(ProtoError::NoWitness("claimed columns are dependent"));
        }
        Ok(Self {
            cols,
            solver,
            v: Vec::new(),
        })
    }

    pub(crate) fn claim(&self) -> Body {
        Body::Indices(self.cols.clone())
    }

    pub(crate) fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.v = field_challenge(body, self.solver.p.len())?.to_vec();
        Ok(())
    }

    pub(crate) fn respond(&self) -> Result<Body, ProtoError> {
        Ok(Body::Field(self.solver.solve_on_pivots(&self.v)?))
    }
}

/// Verifier for "columns `J` of `A` are linearly independent", hence
/// `rank A ≥ |J|`.
#[derive(Debug)]
pub struct RankLowerVerifier<'a> {
    a: &'a DenseMatrix,
    check: IndependenceCheck,
    script: Script,
}

impl<'a> RankLowerVerifier<'a> {
    /// With `columns` given, the prover must name exactly those.
    pub fn new(a: &'a DenseMatrix, columns: Option<Vec<usize>>) -> Self {
        let mut script = Script::new();
        script.push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1);
        Self {
            check: IndependenceCheck::new(a, columns),
            a,
            script,
        }
    }
}

impl VerifierMachine for RankLowerVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        self.script.expect(&[Step::Send], "verifier send")?;
        self.script.advance();
        self.check.challenge(self.a, ctx).map(Some)
    }

    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        let result = if pos == 0 {
            self.check.claim(self.a, body)
        } else {
            self.check.check(self.a, body, ctx).map(|()| self.script.finish(Verdict::Accept))
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
        let cols = self.check.columns().to_vec();
        RankProfile::new(cols, self.a.cols()).ok().map(Output::IndependentColumns)
    }
}

/// Honest prover; without `columns` it claims the column rank profile.
#[derive(Debug)]
pub struct RankLowerProver {
    answer: Result<IndependenceAnswer, ProtoError>,
    script: Script,
}

impl RankLowerProver {
    pub fn new(a: &DenseMatrix, columns: Option<Vec<usize>>) -> Self {
        let cols = columns.unwrap_or_else(|| pluq_crp(a).column_profile().into_inner());
        let mut script = Script::new();
        script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1);
        Self {
            answer: IndependenceAnswer::new(a, cols),
            script,
        }
    }
}

impl ProverMachine for RankLowerProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.script.expect(&[Step::Recv], "prover receive")?;
        self.answer.as_mut().map_err(|e| e.clone())?.receive(body)?;
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let answer = self.answer.as_ref().map_err(Clone::clone)?;
        let body = if pos == 0 { answer.claim() } else { answer.respond()? };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Certifies `rank A ≤ r` with the honest prover, `r` the public `bound` or
/// else the prover's choice.
pub fn run_rank_upper(
    a: &DenseMatrix,
    bound: Option<usize>,
    source: &mut ChallengeSource,
) -> Run<usize> {
    let mut v = RankUpperVerifier::new(a, bound);
    let mut p = RankUpperProver::new(a, bound);
    execute(&mut v, &mut p, source).map(|o| match o {
        Output::RankAtMost(r) => Some(r),
        _ => None,
    })
}

/// Certifies that `columns` (by default the column rank profile) are
/// independent.
pub fn run_rank_lower(
    a: &DenseMatrix,
    columns: Option<Vec<usize>>,
    source: &mut ChallengeSource,
) -> Run<RankProfile> {
    let mut v = RankLowerVerifier::new(a, columns.clone());
    let mut p = RankLowerProver::new(a, columns);
    execute(&mut v, &mut p, source).map(|o| match o {
        Output::IndependentColumns(c) => Some(c),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use crate::proto::channel::ReplayProver;

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), &rows).unwrap()
    }

    #[test]
    fn upper_bound_accepts_true_rank() {
        let a = m(101, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let run = run_rank_upper(&a, None, &mut ChallengeSource::interactive(1));
        assert!(run.verdict.is_accept());
        assert_eq!(run.output, Some(2));
        assert_eq!(run.meter.matvecs, 2);
    }

    #[test]
    fn understated_rank_rejected() {
        let a = m(101, &[&[1, 0], &[0, 1]]);
        let mut v = RankUpperVerifier::new(&a, None);
        let run = execute(
            &mut v,
            &mut ReplayProver::new([Body::Rank(1), Body::Field(vec![1, 1])]),
            &mut ChallengeSource::interactive(3),
        );
        assert_eq!(run.verdict, Verdict::Reject(RejectCause::WeightExceedsRank));
        let mut v = RankUpperVerifier::new(&a, None);
        let run = execute(
            &mut v,
            &mut ReplayProver::new([Body::Rank(3)]),
            &mut ChallengeSource::interactive(3),
        );
        assert_eq!(run.verdict, Verdict::Reject(RejectCause::InvalidClaim));
    }

    #[test]
    fn public_bound_pins_the_claim() {
        let a = DenseMatrix::zeros(PrimeField::new(101).unwrap(), 3, 3);
        let run = run_rank_upper(&a, Some(2), &mut ChallengeSource::interactive(1));
        assert_eq!(run.output, Some(2));
        let run = run_rank_upper(&a, Some(7), &mut ChallengeSource::interactive(1));
        assert_eq!(run.output, Some(3));
        for claim in [0, 1, 3] {
            let mut v = RankUpperVerifier::new(&a, Some(2));
            let run = execute(
                &mut v,
                &mut ReplayProver::new([Body::Rank(claim), Body::Field(vec![0; 3])]),
                &mut ChallengeSource::interactive(3),
            );
            assert_eq!(run.verdict, Verdict::Reject(RejectCause::InvalidClaim), "{claim}");
        }
    }

    #[test]
    fn prover_over_bound_aborts() {
        let a = m(101, &[&[1, 0], &[0, 1]]);
        let run = run_rank_upper(&a, Some(1), &mut ChallengeSource::interactive(1));
        assert!(run.verdict.is_abort());
    }

    #[test]
    fn lower_bound_accepts_profile() {
        let a = m(101, &[&[0, 1, 2], &[0, 2, 4], &[0, 0, 1]]);
        let run = run_rank_lower(&a, None, &mut ChallengeSource::interactive(5));
        assert!(run.verdict.is_accept());
        assert_eq!(run.output.unwrap().indices(), &[1, 2]);
        assert_eq!(run.meter.matvecs, 1);
    }

    #[test]
    fn lower_bound_claims_validated() {
        let a = m(101, &[&[1, 1], &[1, 1]]);
        for cols in [vec![1, 0], vec![0, 2], vec![0, 0]] {
            let mut v = RankLowerVerifier::new(&a, None);
            let run = execute(
                &mut v,
                &mut ReplayProver::new([Body::Indices(cols)]),
                &mut ChallengeSource::interactive(1),
            );
            assert_eq!(run.verdict, Verdict::Reject(RejectCause::InvalidClaim));
        }
        let run = run_rank_lower(&a, Some(vec![0, 1]), &mut ChallengeSource::interactive(1));
        assert!(run.verdict.is_abort());
    }
}
