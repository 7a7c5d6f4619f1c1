use std::borrow::Cow;

use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::crp::{CrpProver, CrpVerifier};
use super::ldup::{LdupAnswers, LdupRounds};
use super::protocol::Output;
use super::{Body, ChallengeSource, Claim, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{ldup, pluq_crp, DenseMatrix, LdupFactorization, RankProfileMatrix};

/// Verifier for the rank profile matrix of an invertible `A`: an LDUP
/// certificate together with a check that `Ū`, the committed `U₁`
/// conjugated by `P`, is upper triangular. Then `P` itself is the rank
/// profile matrix.
///
/// Before the LDUP rounds the verifier streams `e_0, …, e_{n-1}` and the
/// prover answers `f_c = Σ_{a ≤ c} e_a·Ū[a][c]`; at the end
/// `Σ e_{p[i]}·x_i = Σ f_{p[i]}·φ_i` must hold for the LDUP vectors.
#[derive(Debug)]
pub struct RpmInvVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    count_mu: bool,
    core: LdupRounds,
    s: SampleSet,
    e: Vec<u64>,
    f: Vec<u64>,
    script: Script,
}

impl<'a> RpmInvVerifier<'a> {
    /// With `count_mu` off, the one product with `A` is charged as plain
    /// operations (for use on a submatrix).
    pub fn new(a: Cow<'a, DenseMatrix>, count_mu: bool) -> Result<Self, ProtoError> {
        if !a.is_square() {
            return Err(ProtoError::InvalidInput("matrix must be square".into()));
        }
        let n = a.rows();
        let mut script = Script::new();
        script.push(Step::Recv, 2);
        for _ in 0..n {
            script.push(Step::Send, 1).push(Step::Recv, 1);
        }
        LdupRounds::push_verifier(&mut script, n);
        script.push(Step::Local, 1);
        Ok(Self {
            core: LdupRounds::new(a.field(), n),
            s: SampleSet::full(a.field()),
            a,
            count_mu,
            e: vec![0; n],
            f: vec![0; n],
            script,
        })
    }

    fn base(&self) -> usize {
        2 + 2 * self.a.rows()
    }

    /// Ones at `(k, p[k])`, once accepted.
    pub fn matrix(&self) -> Option<RankProfileMatrix> {
        if self.script.verdict() != Some(Verdict::Accept) {
            return None;
        }
        let n = self.a.rows();
        let ones = self.core.perm()?.images().iter().copied().enumerate().collect();
        RankProfileMatrix::new(n, n, ones).ok()
    }
}

impl VerifierMachine for RpmInvVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        let pos = self.script.expect(&[Step::Send, Step::Local], "verifier send")?;
        self.script.advance();
        let base = self.base();
        if pos < base {
            let c = (pos - 2) / 2;
            self.e[c] = ctx.draw(&self.s)?;
            return Ok(Some(Body::Field(vec![self.e[c]])));
        }
        if pos < base + LdupRounds::steps(self.a.rows()) {
            return self.core.send(pos - base, ctx).map(Some);
        }
        if !self.core.check(&self.a, ctx, self.count_mu)? {
            self.script.finish(Verdict::Reject(RejectCause::ProductCheck));
            return Ok(None);
        }
        let fld = self.a.field();
        let perm = self.core.perm().expect("commitment precedes the check").images();
        let (x, phi) = (self.core.x(), self.core.phi());
        let (mut lhs, mut rhs) = (0, 0);
        for (i, &pi) in perm.iter().enumerate() {
            lhs = fld.mul_add(lhs, self.e[pi], x[i]);
            rhs = fld.mul_add(rhs, self.f[pi], phi[i]);
        }
        ctx.meter().charge_ops(4 * perm.len());
        self.script.finish(if lhs == rhs {
            Verdict::Accept
        } else {
            Verdict::Reject(RejectCause::ConjugateCheck)
        });
        Ok(None)
    }

    fn receive(&mut self, body: &Body, _: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        let base = self.base();
        let cause = match pos {
            0 => (!self.core.commit(body)).then_some(RejectCause::MalformedCommitment),
            1 => (body != &Body::Claim(Claim::UpperConjugate)).then_some(RejectCause::MalformedMessage),
            p if p < base => match field_payload(body, 1, self.a.field()) {
                Some(v) => {
                    self.f[(p - 3) / 2] = v[0];
                    None
                }
                None => Some(RejectCause::MalformedMessage),
            },
            p => (!self.core.receive(p - base, body)).then_some(RejectCause::MalformedMessage),
        };
        if let Some(cause) = cause {
            self.script.finish(Verdict::Reject(cause));
        }
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        self.matrix().map(Output::RankProfileMatrix)
    }
}

/// Honest prover for [`RpmInvVerifier`].
#[derive(Debug)]
pub struct RpmInvProver {
    answers: Result<LdupAnswers, ProtoError>,
    e: Vec<u64>,
    n: usize,
    script: Script,
}

impl RpmInvProver {
    pub fn new(a: Cow<'_, DenseMatrix>) -> Self {
        let fac = if a.is_square() {
            ldup(&a).map_err(ProtoError::from)
        } else {
            Err(ProtoError::InvalidInput("matrix must be square".into()))
        };
        Self::from_factors(fac, a.rows())
    }

    /// A prover answering from the given factors, honest or not.
    pub(crate) fn from_factors(fac: Result<LdupFactorization, ProtoError>, n: usize) -> Self {
        let answers = fac.map(LdupAnswers::new);
        let mut script = Script::new();
        script.push(Step::Send, 2);
        for _ in 0..n {
            script.push(Step::Recv, 1).push(Step::Send, 1);
        }
        LdupRounds::push_prover(&mut script, n);
        Self {
            answers,
            e: vec![0; n],
            n,
            script,
        }
    }

    /// `f_c = Σ_{a ≤ c} e_a·Ū[a][c]` with `Ū[p[i]][p[j]] = U₁[i][j]`.
    fn conjugate_answer(&self, c: usize) -> Result<u64, ProtoError> {
        let fac = &self.answers.as_ref().map_err(Clone::clone)?.fac;
        let f = fac.u1.field();
        let p = fac.p.images();
        let j = fac.p.inverse().apply(c);
        Ok((0..self.n).fold(0, |acc, i| {
            if p[i] <= c {
                f.mul_add(acc, self.e[p[i]], fac.u1.get(i, j))
            } else {
                acc
            }
        }))
    }
}

impl ProverMachine for RpmInvProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let base = 2 + 2 * self.n;
        let answers = self.answers.as_mut().map_err(|e| e.clone())?;
        if pos < base {
            self.e[(pos - 2) / 2] = field_challenge(body, 1)?[0];
        } else {
            answers.receive(pos - base, body)?;
        }
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let base = 2 + 2 * self.n;
        let answers = self.answers.as_ref().map_err(Clone::clone)?;
        let body = match pos {
            0 => answers.commitment(),
            1 => Body::Claim(Claim::UpperConjugate),
            p if p < base => Body::Field(vec![self.conjugate_answer((p - 3) / 2)?]),
            p => answers.respond(p - base),
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

#[derive(Debug)]
enum Stage<'a> {
    Rows(CrpVerifier<'a>),
    Cols(Vec<usize>, CrpVerifier<'a>),
    Inv(Vec<usize>, Vec<usize>, RpmInvVerifier<'static>),
}

/// Verifier for the rank profile matrix of any `A`: certify the row
/// profile `I` and the column profile `J`, then the rank profile matrix
/// of the invertible `A[I, J]`, and embed it.
#[derive(Debug)]
pub struct RpmVerifier<'a> {
    a: &'a DenseMatrix,
    stage: Stage<'a>,
    verdict: Option<Verdict>,
    result: Option<RankProfileMatrix>,
}

impl<'a> RpmVerifier<'a> {
    pub fn new(a: &'a DenseMatrix) -> Self {
        Self {
            a,
            stage: Stage::Rows(CrpVerifier::rows(a)),
            verdict: None,
            result: None,
        }
    }

    fn current(&mut self) -> &mut dyn VerifierMachine {
        match &mut self.stage {
            Stage::Rows(v) | Stage::Cols(_, v) => v,
            Stage::Inv(_, _, v) => v,
        }
    }

    /// Moves to the next stage once the current one has finished.
    fn settle(&mut self, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        if self.verdict.is_some() {
            return Ok(());
        }
        let Some(verdict) = self.current().verdict() else {
            return Ok(());
        };
        if !verdict.is_accept() {
            self.verdict = Some(verdict);
            return Ok(());
        }
        let (m, n) = (self.a.rows(), self.a.cols());
        match &self.stage {
            Stage::Rows(v) => {
                let rows = v.profile().unwrap_or_default().to_vec();
                self.stage = Stage::Cols(rows, CrpVerifier::columns(self.a));
            }
            Stage::Cols(rows, v) => {
                let cols = v.profile().unwrap_or_default().to_vec();
                if cols.len() != rows.len() {
                    self.verdict = Some(Verdict::Reject(RejectCause::RankMismatch));
                } else if cols.is_empty() {
                    self.result = Some(RankProfileMatrix::new(m, n, Vec::new())?);
                    self.verdict = Some(Verdict::Accept);
                } else {
                    let sub = self.a.select(rows, &cols);
                    ctx.meter().charge_ops(rows.len() * cols.len());
                    let inv = RpmInvVerifier::new(Cow::Owned(sub), false)?;
                    self.stage = Stage::Inv(rows.clone(), cols, inv);
                }
            }
            Stage::Inv(rows, cols, v) => {
                let sub = v.matrix().ok_or(ProtoError::OutOfOrder("missing sub-result"))?;
                let ones = sub.ones().iter().map(|&(i, j)| (rows[i], cols[j])).collect();
                self.result = Some(RankProfileMatrix::new(m, n, ones)?);
                self.verdict = Some(Verdict::Accept);
            }
        }
        Ok(())
    }
}

impl VerifierMachine for RpmVerifier<'_> {
    fn turn(&self) -> Turn {
        if self.verdict.is_some() {
            return Turn::Finished;
        }
        match &self.stage {
            Stage::Rows(v) | Stage::Cols(_, v) => v.turn(),
            Stage::Inv(_, _, v) => v.turn(),
        }
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        if self.verdict.is_some() {
            return Err(ProtoError::OutOfOrder("verifier send"));
        }
        let out = self.current().send(ctx)?;
        self.settle(ctx)?;
        Ok(out)
    }

    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        if self.verdict.is_some() {
            return Err(ProtoError::OutOfOrder("verifier receive"));
        }
        self.current().receive(body, ctx)?;
        self.settle(ctx)
    }

    fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }

    fn output(&self) -> Option<Output> {
        self.result.clone().map(Output::RankProfileMatrix)
    }
}

#[derive(Debug)]
enum ProverStage {
    Rows(CrpProver),
    Cols(CrpProver),
    Inv(RpmInvProver),
}

/// Honest prover for [`RpmVerifier`].
#[derive(Debug)]
pub struct RpmProver<'a> {
    a: &'a DenseMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
    stage: ProverStage,
}

impl<'a> RpmProver<'a> {
    pub fn new(a: &'a DenseMatrix) -> Self {
        Self {
            a,
            rows: pluq_crp(&a.transpose()).column_profile().into_inner(),
            cols: pluq_crp(a).column_profile().into_inner(),
            stage: ProverStage::Rows(CrpProver::rows(a)),
        }
    }

    fn advance(&mut self) {
        match &self.stage {
            ProverStage::Rows(p) if p.is_done() => {
                self.stage = ProverStage::Cols(CrpProver::columns(self.a));
            }
            ProverStage::Cols(p) if p.is_done() && !self.cols.is_empty() => {
                let sub = self.a.select(&self.rows, &self.cols);
                self.stage = ProverStage::Inv(RpmInvProver::new(Cow::Owned(sub)));
            }
            _ => {}
        }
    }

    fn current(&mut self) -> &mut dyn ProverMachine {
        self.advance();
        match &mut self.stage {
            ProverStage::Rows(p) | ProverStage::Cols(p) => p,
            ProverStage::Inv(p) => p,
        }
    }
}

impl ProverMachine for RpmProver<'_> {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.current().receive(body)
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        self.current().respond()
    }

    fn is_done(&self) -> bool {
        match &self.stage {
            ProverStage::Rows(_) => false,
            ProverStage::Cols(p) => p.is_done() && self.cols.is_empty(),
            ProverStage::Inv(p) => p.is_done(),
        }
    }
}

/// Certifies the rank profile matrix of an invertible `A`.
pub fn run_rpm_invertible(
    a: &DenseMatrix,
    source: &mut ChallengeSource,
) -> Result<Run<RankProfileMatrix>, ProtoError> {
    let mut v = RpmInvVerifier::new(Cow::Borrowed(a), true)?;
    let mut p = RpmInvProver::new(Cow::Borrowed(a));
    Ok(execute(&mut v, &mut p, source).map(|o| match o {
        Output::RankProfileMatrix(r) => Some(r),
        _ => None,
    }))
}

/// Certifies the rank profile matrix of any `A`.
pub fn run_rpm(a: &DenseMatrix, source: &mut ChallengeSource) -> Run<RankProfileMatrix> {
    let mut v = RpmVerifier::new(a);
    let mut p = RpmProver::new(a);
    execute(&mut v, &mut p, source).map(|o| match o {
        Output::RankProfileMatrix(r) => Some(r),
        _ => None,
    })
}
