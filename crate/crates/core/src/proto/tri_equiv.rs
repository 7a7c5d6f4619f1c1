use std::borrow::Cow;

use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::protocol::Output;
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{is_lower_triangular, is_upper_triangular, pluq_crp, DenseMatrix};

/// Which triangular shape `T` in `A·T = B` is claimed to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    /// Index handled in round `t`: lower triangular streams forward,
    /// upper triangular backward.
    pub fn index(self, t: usize, n: usize) -> usize {
        match self {
            Side::Lower => t,
            Side::Upper => n - 1 - t,
        }
    }
}

fn check_shapes(a: &DenseMatrix, b: &DenseMatrix) -> Result<(), ProtoError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) || a.field() != b.field() {
        return Err(ProtoError::InvalidInput("A and B must have the same shape and field".into()));
    }
    if a.rows() < a.cols() {
        return Err(ProtoError::InvalidInput("A must have at least as many rows as columns".into()));
    }
    Ok(())
}

/// Verifier for "there is a triangular `T` with `A·T = B`", `A` of full
/// column rank: stream `x`, receive `y = T·x`, check `A·y = B·x`.
#[derive(Debug)]
pub struct TriEquivVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    b: Cow<'a, DenseMatrix>,
    side: Side,
    s: SampleSet,
    x: Vec<u64>,
    y: Vec<u64>,
    script: Script,
}

impl<'a> TriEquivVerifier<'a> {
    pub fn new(a: &'a DenseMatrix, b: &'a DenseMatrix, side: Side) -> Result<Self, ProtoError> {
        check_shapes(a, b)?;
        let n = a.cols();
        let mut script = Script::new();
        for _ in 0..n {
            script.push(Step::Send, 1).push(Step::Recv, 1);
        }
        script.push(Step::Local, 1);
        Ok(Self {
            s: SampleSet::full(a.field()),
            a: Cow::Borrowed(a),
            b: Cow::Borrowed(b),
            side,
            x: vec![0; n],
            y: vec![0; n],
            script,
        })
    }

    fn n(&self) -> usize {
        self.a.cols()
    }
}

impl VerifierMachine for TriEquivVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        let pos = self.script.expect(&[Step::Send, Step::Local], "verifier send")?;
        self.script.advance();
        let n = self.n();
        if pos < 2 * n {
            let i = self.side.index(pos / 2, n);
            self.x[i] = ctx.draw(&self.s)?;
            return Ok(Some(Body::Field(vec![self.x[i]])));
        }
        let ay = self.a.matvec(&self.y, ctx.meter())?;
        let bx = self.b.matvec(&self.x, ctx.meter())?;
        self.script.finish(if ay == bx {
            Verdict::Accept
        } else {
            Verdict::Reject(RejectCause::ProductCheck)
        });
        Ok(None)
    }

    fn receive(&mut self, body: &Body, _: &mut Ctx<'_>) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        let i = self.side.index(pos / 2, self.n());
        match field_payload(body, 1, self.a.field()) {
            Some(y) => self.y[i] = y[0],
            None => self.script.finish(Verdict::Reject(RejectCause::MalformedMessage)),
        }
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        Some(Output::Verified)
    }
}

/// The unique `T` with `A·T = B`, when `A` has full column rank.
pub(crate) fn transform(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, ProtoError> {
    let n = a.cols();
    let d = pluq_crp(a);
    if d.rank < n {
        return Err(ProtoError::NoWitness("A does not have full column rank"));
    }
    let mut t = DenseMatrix::zeros(a.field(), n, n);
    for j in 0..n {
        let col = d.solve_on_pivots(&b.column(j))?;
        for (i, &v) in col.iter().enumerate() {
            t.set(i, j, v);
        }
    }
    if a.mul(&t)? != *b {
        return Err(ProtoError::NoWitness("B is not a right multiple of A"));
    }
    Ok(t)
}

/// Honest prover: answers `y_i = (T·x)_i` as soon as the entries of `x` it
/// depends on are known.
#[derive(Debug)]
pub struct TriEquivProver {
    t: Result<DenseMatrix, ProtoError>,
    side: Side,
    n: usize,
    x: Vec<u64>,
    script: Script,
}

impl TriEquivProver {
    pub fn new(a: &DenseMatrix, b: &DenseMatrix, side: Side) -> Self {
        let t = check_shapes(a, b).and_then(|_| transform(a, b)).and_then(|t| {
            let ok = match side {
                Side::Lower => is_lower_triangular(&t),
                Side::Upper => is_upper_triangular(&t),
            };
            if ok {
                Ok(t)
            } else {
                Err(ProtoError::NoWitness("the transform is not triangular"))
            }
        });
        Self::with_transform(t, side, a.cols())
    }

    /// A prover answering with a given `T`, triangular or not.
    pub(crate) fn with_transform(t: Result<DenseMatrix, ProtoError>, side: Side, n: usize) -> Self {
        let mut script = Script::new();
        for _ in 0..n {
            script.push(Step::Recv, 1).push(Step::Send, 1);
        }
        Self {
            t,
            side,
            n,
            x: vec![0; n],
            script,
        }
    }

    fn t(&self) -> Result<&DenseMatrix, ProtoError> {
        self.t.as_ref().map_err(Clone::clone)
    }
}

impl ProverMachine for TriEquivProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.t()?;
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let x = field_challenge(body, 1)?[0];
        self.x[self.side.index(pos / 2, self.n)] = x;
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let t = self.t()?;
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let i = self.side.index(pos / 2, self.n);
        let f = t.field();
        let range = match self.side {
            Side::Lower => 0..i + 1,
            Side::Upper => i..self.n,
        };
        let y = range.fold(0, |acc, j| f.mul_add(acc, t.get(i, j), self.x[j]));
        self.script.advance();
        Ok(Body::Field(vec![y]))
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Runs the triangular equivalence certificate with the honest prover.
pub fn run_triangular_equiv(
    a: &DenseMatrix,
    b: &DenseMatrix,
    side: Side,
    source: &mut ChallengeSource,
) -> Result<Run<()>, ProtoError> {
    let mut v = TriEquivVerifier::new(a, b, side)?;
    let mut p = TriEquivProver::new(a, b, side);
    Ok(execute(&mut v, &mut p, source).map(|_| Some(())))
}
