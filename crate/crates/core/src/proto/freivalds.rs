use std::borrow::Cow;

use super::channel::{Ctx, ProverMachine, Script, Step, Turn, VerifierMachine};
use super::protocol::Output;
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{DenseMatrix, LaError};

/// Checks `A·(B·v) = C·v` for `k` random vectors; a wrong `C` passes each
/// round with probability at most `1/|S|`.
#[derive(Debug)]
pub struct FreivaldsVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    b: Cow<'a, DenseMatrix>,
    c: Cow<'a, DenseMatrix>,
    s: SampleSet,
    script: Script,
}

impl<'a> FreivaldsVerifier<'a> {
    pub fn new(
        a: Cow<'a, DenseMatrix>,
        b: Cow<'a, DenseMatrix>,
        c: Cow<'a, DenseMatrix>,
        repetitions: usize,
    ) -> Result<Self, ProtoError> {
        if a.cols() != b.rows() {
            return Err(LaError::dims("Freivalds inner dimension", a.cols(), b.rows()).into());
        }
        if c.rows() != a.rows() || c.cols() != b.cols() {
            return Err(LaError::Shape(format!(
                "product is {}x{}, expected {}x{}",
                c.rows(),
                c.cols(),
                a.rows(),
                b.cols()
            ))
            .into());
        }
        let mut script = Script::new();
        script.push(Step::Local, repetitions);
        Ok(Self {
            s: SampleSet::full(a.field()),
            a,
            b,
            c,
            script,
        })
    }
}

impl VerifierMachine for FreivaldsVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        self.script.expect(&[Step::Local], "Freivalds check")?;
        let v = ctx.draw_vec(&self.s, self.b.cols())?;
        let bv = self.b.matvec(&v, ctx.meter())?;
        let abv = self.a.matvec(&bv, ctx.meter())?;
        let cv = self.c.matvec(&v, ctx.meter())?;
        self.script.advance();
        if abv != cv {
            self.script.finish(Verdict::Reject(RejectCause::ProductCheck));
        } else if self.script.done() {
            self.script.finish(Verdict::Accept);
        }
        Ok(None)
    }

    fn receive(&mut self, _: &Body, _: &mut Ctx<'_>) -> Result<(), ProtoError> {
        Err(ProtoError::OutOfOrder("Freivalds takes no prover messages"))
    }

    fn verdict(&self) -> Option<Verdict> {
        match self.script.verdict() {
            None if self.script.done() => Some(Verdict::Accept),
            v => v,
        }
    }

    fn output(&self) -> Option<Output> {
        Some(Output::Verified)
    }
}

/// A prover with nothing to say.
#[derive(Clone, Copy, Debug, Default)]
pub struct SilentProver;

impl ProverMachine for SilentProver {
    fn receive(&mut self, _: &Body) -> Result<(), ProtoError> {
        Err(ProtoError::OutOfOrder("this prover takes no challenges"))
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        Err(ProtoError::OutOfOrder("this prover has nothing to send"))
    }

    fn is_done(&self) -> bool {
        true
    }
}

/// One-shot Freivalds check of `A·B = C` with `k` repetitions.
pub fn freivalds_check(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    repetitions: usize,
    source: &mut ChallengeSource,
) -> Result<Verdict, ProtoError> {
    let mut v = FreivaldsVerifier::new(Cow::Borrowed(a), Cow::Borrowed(b), Cow::Borrowed(c), repetitions)?;
    Ok(super::execute(&mut v, &mut SilentProver, source).verdict)
}
