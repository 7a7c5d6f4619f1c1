use std::borrow::Cow;

use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::protocol::Output;
use super::rank::{RankUpperProver, RankUpperVerifier};
use super::{Body, ChallengeSource, Claim, ProtoError, RejectCause, Verdict};
use crate::ff::{PrimeField, SampleSet};
use crate::la::{ldup, DenseMatrix, Diagonal, LdupFactorization, Permutation};

/// Verifier state of the LDUP rounds, shared with the rank profile matrix
/// protocol. Round `t` handles `i = n-1-t` and has four steps: send
/// `(φ_i, ψ_i)`, receive `(x̃_{i-1}, ỹ_{i-1})`, send `λ_i`, receive
/// `z̃_{i-1}`. The prover's values are the strictly upper parts of
/// `x = U₁·φ`, `y = U₁·ψ` and `z = Lᵀ·λ`.
#[derive(Clone, Debug)]
pub(crate) struct LdupRounds {
    n: usize,
    f: PrimeField,
    s: SampleSet,
    perm: Option<Permutation>,
    diag: Vec<u64>,
    phi: Vec<u64>,
    psi: Vec<u64>,
    lambda: Vec<u64>,
    xt: Vec<u64>,
    yt: Vec<u64>,
    zt: Vec<u64>,
}

impl LdupRounds {
    pub(crate) fn new(f: PrimeField, n: usize) -> Self {
        Self {
            n,
            f,
            s: SampleSet::full(f),
            perm: None,
            diag: Vec::new(),
            phi: vec![0; n],
            psi: vec![0; n],
            lambda: vec![0; n],
            xt: vec![0; n],
            yt: vec![0; n],
            zt: vec![0; n],
        }
    }

    /// Steps of the interactive rounds.
    pub(crate) fn steps(n: usize) -> usize {
        4 * n.saturating_sub(1)
    }

    /// Round steps from the verifier's side.
    pub(crate) fn push_verifier(script: &mut Script, n: usize) {
        for _ in 1..n {
            script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1);
        }
    }

    pub(crate) fn push_prover(script: &mut Script, n: usize) {
        for _ in 1..n {
            script.push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1);
        }
    }

    /// Takes the committed `P` and `D`; false when they are not a
    /// permutation of `0..n` and an invertible diagonal.
    pub(crate) fn commit(&mut self, body: &Body) -> bool {
        let Body::Commitment { perm, diag } = body else {
            return false;
        };
        if perm.len() != self.n || diag.len() != self.n {
            return false;
        }
        if diag.iter().any(|&d| d == 0 || d >= self.f.modulus()) {
            return false;
        }
        match Permutation::new(perm.clone()) {
            Ok(p) => {
                self.perm = Some(p);
                self.diag = diag.clone();
                true
            }
            Err(_) => false,
        }
    }

    fn index(&self, j: usize) -> usize {
        self.n - 1 - j / 4
    }

    pub(crate) fn send(&mut self, j: usize, ctx: &mut Ctx<'_>) -> Result<Body, ProtoError> {
        let i = self.index(j);
        if j.is_multiple_of(4) {
            self.phi[i] = ctx.draw(&self.s.without(self.f.neg(self.xt[i])))?;
            self.psi[i] = ctx.draw(&self.s)?;
            Ok(Body::Field(vec![self.phi[i], self.psi[i]]))
        } else {
            self.lambda[i] = ctx.draw(&self.s)?;
            Ok(Body::Field(vec![self.lambda[i]]))
        }
    }

    /// False when the message is malformed.
    pub(crate) fn receive(&mut self, j: usize, body: &Body) -> bool {
        let i = self.index(j);
        if j % 4 == 1 {
            match field_payload(body, 2, self.f) {
                Some(v) => {
                    (self.xt[i - 1], self.yt[i - 1]) = (v[0], v[1]);
                    true
                }
                None => false,
            }
        } else {
            match field_payload(body, 1, self.f) {
                Some(v) => {
                    self.zt[i - 1] = v[0];
                    true
                }
                None => false,
            }
        }
    }

    /// Draws the last challenges and checks `λᵀ·L·D·U₁·φ = λᵀ·A·Pᵀ·φ`
    /// (and the same for `ψ`). With `count_mu` off the product `λᵀ·A` is
    /// charged as plain operations.
    pub(crate) fn check(
        &mut self,
        a: &DenseMatrix,
        ctx: &mut Ctx<'_>,
        count_mu: bool,
    ) -> Result<bool, ProtoError> {
        let n = self.n;
        if n == 0 {
            return Ok(true);
        }
        let f = self.f;
        self.phi[0] = ctx.draw(&self.s.without(f.neg(self.xt[0])))?;
        self.psi[0] = ctx.draw(&self.s)?;
        self.lambda[0] = ctx.draw(&self.s)?;
        let t = a.apply_left(&self.lambda)?;
        let m = ctx.meter();
        if count_mu {
            m.charge_matvec(n, n);
        } else {
            m.charge_dense(n, n);
        }
        let perm = self.perm.as_ref().expect("commitment precedes the check");
        let (mut lhs_x, mut lhs_y, mut rhs_x, mut rhs_y) = (0, 0, 0, 0);
        for k in 0..n {
            let x = f.add(self.phi[k], self.xt[k]);
            let y = f.add(self.psi[k], self.yt[k]);
            let zd = f.mul(f.add(self.lambda[k], self.zt[k]), self.diag[k]);
            lhs_x = f.mul_add(lhs_x, zd, x);
            lhs_y = f.mul_add(lhs_y, zd, y);
            let tk = t[perm.apply(k)];
            rhs_x = f.mul_add(rhs_x, tk, self.phi[k]);
            rhs_y = f.mul_add(rhs_y, tk, self.psi[k]);
            self.xt[k] = x;
        }
        m.charge_ops(12 * n);
        Ok(lhs_x == rhs_x && lhs_y == rhs_y)
    }

    /// `x = U₁·φ` as claimed by the prover, valid after [`Self::check`].
    pub(crate) fn x(&self) -> &[u64] {
        &self.xt
    }

    pub(crate) fn phi(&self) -> &[u64] {
        &self.phi
    }

    pub(crate) fn perm(&self) -> Option<&Permutation> {
        self.perm.as_ref()
    }

    pub(crate) fn output(&self) -> Option<(Permutation, Diagonal)> {
        let p = self.perm.clone()?;
        let d = Diagonal::new(self.f, self.diag.clone()).ok()?;
        Some((p, d))
    }
}

/// Prover side of [`LdupRounds`].
#[derive(Clone, Debug)]
pub(crate) struct LdupAnswers {
    pub(crate) fac: LdupFactorization,
    phi: Vec<u64>,
    psi: Vec<u64>,
    lambda: Vec<u64>,
}

impl LdupAnswers {
    pub(crate) fn new(fac: LdupFactorization) -> Self {
        let n = fac.p.len();
        Self {
            fac,
            phi: vec![0; n],
            psi: vec![0; n],
            lambda: vec![0; n],
        }
    }

    fn n(&self) -> usize {
        self.fac.p.len()
    }

    pub(crate) fn commitment(&self) -> Body {
        Body::Commitment {
            perm: self.fac.p.images().to_vec(),
            diag: self.fac.d.entries().to_vec(),
        }
    }

    pub(crate) fn receive(&mut self, j: usize, body: &Body) -> Result<(), ProtoError> {
        let i = self.n() - 1 - j / 4;
        if j.is_multiple_of(4) {
            let v = field_challenge(body, 2)?;
            (self.phi[i], self.psi[i]) = (v[0], v[1]);
        } else {
            self.lambda[i] = field_challenge(body, 1)?[0];
        }
        Ok(())
    }

    pub(crate) fn respond(&self, j: usize) -> Body {
        let n = self.n();
        let i = n - 1 - j / 4;
        let f = self.fac.l.field();
        if j % 4 == 1 {
            let row = &self.fac.u1.row(i - 1)[i..];
            Body::Field(vec![f.dot(row, &self.phi[i..]), f.dot(row, &self.psi[i..])])
        } else {
            let z = (i..n).fold(0, |acc, k| f.mul_add(acc, self.lambda[k], self.fac.l.get(k, i - 1)));
            Body::Field(vec![z])
        }
    }
}

fn square(a: &DenseMatrix) -> Result<(), ProtoError> {
    if a.is_square() {
        Ok(())
    } else {
        Err(ProtoError::InvalidInput("matrix must be square".into()))
    }
}

/// Verifier for `A = L·D·U₁·P` with the committed `P` and `D`.
#[derive(Debug)]
pub struct LdupVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    core: LdupRounds,
    script: Script,
}

impl<'a> LdupVerifier<'a> {
    pub fn new(a: &'a DenseMatrix) -> Result<Self, ProtoError> {
        square(a)?;
        let n = a.rows();
        let mut script = Script::new();
        script.push(Step::Recv, 1);
        LdupRounds::push_verifier(&mut script, n);
        script.push(Step::Local, 1);
        Ok(Self {
            core: LdupRounds::new(a.field(), n),
            a: Cow::Borrowed(a),
            script,
        })
    }

    /// `(P, D)` once accepted.
    pub fn factors(&self) -> Option<(Permutation, Diagonal)> {
        match self.script.verdict() {
            Some(Verdict::Accept) => self.core.output(),
            _ => None,
        }
    }
}

impl VerifierMachine for LdupVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        let pos = self.script.expect(&[Step::Send, Step::Local], "verifier send")?;
        self.script.advance();
        if pos <= LdupRounds::steps(self.a.rows()) {
            return self.core.send(pos - 1, ctx).map(Some);
        }
        let ok = self.core.check(&self.a, ctx, true)?;
        self.script.finish(if ok {
            Verdict::Accept
        } else {
            Verdict::Reject(RejectCause::ProductCheck)
        });
        Ok(None)
    }

    fn receive(&mut self, body: &Body, _: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        if pos == 0 {
            if !self.core.commit(body) {
                self.script.finish(Verdict::Reject(RejectCause::MalformedCommitment));
            }
        } else if !self.core.receive(pos - 1, body) {
            self.script.finish(Verdict::Reject(RejectCause::MalformedMessage));
        }
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        self.factors().map(|(p, d)| Output::Ldup { p, d })
    }
}

/// Honest LDUP prover.
#[derive(Debug)]
pub struct LdupProver {
    answers: Result<LdupAnswers, ProtoError>,
    script: Script,
}

impl LdupProver {
    pub fn new(a: &DenseMatrix) -> Self {
        Self::from_factors(ldup(a).map_err(ProtoError::from), a.rows())
    }

    pub(crate) fn from_factors(fac: Result<LdupFactorization, ProtoError>, n: usize) -> Self {
        let mut script = Script::new();
        script.push(Step::Send, 1);
        LdupRounds::push_prover(&mut script, n);
        Self {
            answers: fac.map(LdupAnswers::new),
            script,
        }
    }
}

impl ProverMachine for LdupProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        self.answers.as_mut().map_err(|e| e.clone())?.receive(pos - 1, body)?;
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let answers = self.answers.as_ref().map_err(Clone::clone)?;
        let body = if pos == 0 {
            answers.commitment()
        } else {
            answers.respond(pos - 1)
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Runs the LDUP certificate with the honest prover.
pub fn run_ldup(
    a: &DenseMatrix,
    source: &mut ChallengeSource,
) -> Result<Run<(Permutation, Diagonal)>, ProtoError> {
    let mut v = LdupVerifier::new(a)?;
    let mut p = LdupProver::new(a);
    let run = execute(&mut v, &mut p, source);
    Ok(run.map(|o| match o {
        Output::Ldup { p, d } => Some((p, d)),
        _ => None,
    }))
}

#[derive(Debug)]
enum DetBranch<'a> {
    Pending,
    NonSingular(LdupVerifier<'a>),
    Singular(RankUpperVerifier<'a>),
}

/// Determinant certificate. The prover first claims whether `A` is
/// singular; a non-singular claim is backed by an LDUP certificate
/// (`det A = sign(P)·det D`), a singular one by a rank bound of `n-1`.
#[derive(Debug)]
pub struct DetVerifier<'a> {
    a: &'a DenseMatrix,
    branch: DetBranch<'a>,
    rejected: Option<Verdict>,
}

impl<'a> DetVerifier<'a> {
    pub fn new(a: &'a DenseMatrix) -> Result<Self, ProtoError> {
        square(a)?;
        Ok(Self {
            a,
            branch: DetBranch::Pending,
            rejected: None,
        })
    }
}

impl VerifierMachine for DetVerifier<'_> {
    fn turn(&self) -> Turn {
        if self.rejected.is_some() {
            return Turn::Finished;
        }
        match &self.branch {
            DetBranch::Pending => Turn::Prover,
            DetBranch::NonSingular(v) => v.turn(),
            DetBranch::Singular(v) => v.turn(),
        }
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        if self.rejected.is_some() {
            return Err(ProtoError::OutOfOrder("verifier send"));
        }
        match &mut self.branch {
            DetBranch::Pending => Err(ProtoError::OutOfOrder("verifier send before the claim")),
            DetBranch::NonSingular(v) => v.send(ctx),
            DetBranch::Singular(v) => v.send(ctx),
        }
    }

    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        if self.rejected.is_some() {
            return Err(ProtoError::OutOfOrder("verifier receive"));
        }
        match &mut self.branch {
            DetBranch::Pending => {
                self.branch = match body {
                    Body::Claim(Claim::NonSingular) => {
                        DetBranch::NonSingular(LdupVerifier::new(self.a)?)
                    }
                    Body::Claim(Claim::Singular) => {
                        let bound = self.a.rows().saturating_sub(1);
                        DetBranch::Singular(RankUpperVerifier::new(self.a, Some(bound)))
                    }
                    _ => {
                        self.rejected = Some(Verdict::Reject(RejectCause::MalformedMessage));
                        DetBranch::Pending
                    }
                };
                Ok(())
            }
            DetBranch::NonSingular(v) => v.receive(body, ctx),
            DetBranch::Singular(v) => v.receive(body, ctx),
        }
    }

    fn verdict(&self) -> Option<Verdict> {
        if self.rejected.is_some() {
            return self.rejected;
        }
        match &self.branch {
            DetBranch::Pending => None,
            DetBranch::NonSingular(v) => v.verdict(),
            DetBranch::Singular(v) => v.verdict(),
        }
    }

    fn output(&self) -> Option<Output> {
        let f = self.a.field();
        match &self.branch {
            DetBranch::NonSingular(v) => v.factors().map(|(p, d)| {
                let det = d.determinant(f);
                Output::Determinant(if p.sign() < 0 { f.neg(det) } else { det })
            }),
            DetBranch::Singular(v) if v.verdict() == Some(Verdict::Accept) => {
                Some(Output::Determinant(0))
            }
            _ => None,
        }
    }
}

#[derive(Debug)]
enum DetProverBranch<'a> {
    NonSingular(LdupProver),
    Singular(RankUpperProver<'a>),
}

/// Honest determinant prover: claims by the actual rank.
#[derive(Debug)]
pub struct DetProver<'a> {
    branch: Result<DetProverBranch<'a>, ProtoError>,
    claimed: bool,
}

impl<'a> DetProver<'a> {
    pub fn new(a: &'a DenseMatrix) -> Self {
        let branch = square(a).map(|()| match ldup(a) {
            Ok(fac) => DetProverBranch::NonSingular(LdupProver::from_factors(Ok(fac), a.rows())),
            Err(_) => DetProverBranch::Singular(RankUpperProver::new(a, Some(a.rows().saturating_sub(1)))),
        });
        Self {
            branch,
            claimed: false,
        }
    }
}

impl ProverMachine for DetProver<'_> {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        if !self.claimed {
            return Err(ProtoError::OutOfOrder("challenge before the claim"));
        }
        match self.branch.as_mut().map_err(|e| e.clone())? {
            DetProverBranch::NonSingular(p) => p.receive(body),
            DetProverBranch::Singular(p) => p.receive(body),
        }
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let branch = self.branch.as_mut().map_err(|e| e.clone())?;
        if !self.claimed {
            self.claimed = true;
            return Ok(Body::Claim(match branch {
                DetProverBranch::NonSingular(_) => Claim::NonSingular,
                DetProverBranch::Singular(_) => Claim::Singular,
            }));
        }
        match branch {
            DetProverBranch::NonSingular(p) => p.respond(),
            DetProverBranch::Singular(p) => p.respond(),
        }
    }

    fn is_done(&self) -> bool {
        match &self.branch {
            Err(_) => true,
            Ok(_) if !self.claimed => false,
            Ok(DetProverBranch::NonSingular(p)) => p.is_done(),
            Ok(DetProverBranch::Singular(p)) => p.is_done(),
        }
    }
}

/// Runs the determinant certificate with the honest prover and returns the
/// certified determinant.
pub fn run_det(a: &DenseMatrix, source: &mut ChallengeSource) -> Result<Run<u64>, ProtoError> {
    let mut v = DetVerifier::new(a)?;
    let mut p = DetProver::new(a);
    Ok(execute(&mut v, &mut p, source).map(|o| match o {
        Output::Determinant(d) => Some(d),
        _ => None,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::seeded;
    use crate::oracle::oracle_det;
    use crate::proto::channel::ReplayProver;

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), &rows).unwrap()
    }

    #[test]
    fn ldup_accepts_and_meters() {
        let a = m(101, &[&[0, 2, 1], &[3, 1, 0], &[1, 1, 1]]);
        let run = run_ldup(&a, &mut ChallengeSource::interactive(9)).unwrap();
        assert!(run.verdict.is_accept());
        assert_eq!(run.meter.field_total(), 7 * 3 - 6);
        assert_eq!(run.meter.ints_total(), 3);
        assert_eq!(run.meter.matvecs, 1);
    }

    #[test]
    fn ldup_singular_aborts() {
        let a = m(7, &[&[1, 2], &[2, 4]]);
        let run = run_ldup(&a, &mut ChallengeSource::interactive(1)).unwrap();
        assert!(run.verdict.is_abort());
    }

    #[test]
    fn bad_commitment_rejected() {
        let a = m(7, &[&[1, 2], &[3, 4]]);
        for body in [
            Body::Commitment { perm: vec![0, 0], diag: vec![1, 1] },
            Body::Commitment { perm: vec![0, 1], diag: vec![1, 0] },
            Body::Commitment { perm: vec![0, 1], diag: vec![1, 7] },
            Body::Field(vec![1, 2]),
        ] {
            let mut v = LdupVerifier::new(&a).unwrap();
            let run = execute(&mut v, &mut ReplayProver::new([body]), &mut ChallengeSource::interactive(1));
            assert_eq!(run.verdict, Verdict::Reject(RejectCause::MalformedCommitment));
        }
    }

    #[test]
    fn determinants_match_oracle() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = seeded(4);
        for n in 0..7 {
            for _ in 0..5 {
                let a = DenseMatrix::random(f, n, n, &mut rng);
                let run = run_det(&a, &mut ChallengeSource::interactive(n as u64)).unwrap();
                assert!(run.verdict.is_accept(), "{:?}", run.verdict);
                assert_eq!(run.output, Some(oracle_det(&a).unwrap()));
            }
        }
        let run = run_det(&m(7, &[&[1, 2], &[2, 4]]), &mut ChallengeSource::interactive(2)).unwrap();
        assert_eq!(run.output, Some(0));
    }

    #[test]
    fn wrong_claim_is_not_accepted() {
        let a = m(7, &[&[1, 2], &[3, 4]]);
        let mut v = DetVerifier::new(&a).unwrap();
        let run = execute(
            &mut v,
            &mut ReplayProver::new([Body::Claim(Claim::Singular), Body::Rank(1)]),
            &mut ChallengeSource::interactive(1),
        );
        assert!(!run.verdict.is_accept());
    }
}
