use std::collections::VecDeque;

use super::protocol::Output;
use super::{Body, ChallengeSource, CostMeter, Direction, Message, ProtoError, Transcript, Verdict};
use crate::ff::{PrimeField, SampleSet};

/// Whose move it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Turn {
    Verifier,
    Prover,
    Finished,
}

/// Verifier-side view of the channel: randomness and the cost meter.
pub struct Ctx<'c> {
    pub(crate) source: &'c mut ChallengeSource,
    pub(crate) meter: &'c mut CostMeter,
}

impl<'c> Ctx<'c> {
    pub fn new(source: &'c mut ChallengeSource, meter: &'c mut CostMeter) -> Self {
        Self { source, meter }
    }

    pub fn draw(&mut self, s: &SampleSet) -> Result<u64, ProtoError> {
        self.source.draw(s)
    }

    pub fn draw_vec(&mut self, s: &SampleSet, len: usize) -> Result<Vec<u64>, ProtoError> {
        self.source.draw_vec(s, len)
    }

    pub fn meter(&mut self) -> &mut CostMeter {
        self.meter
    }

    /// A context sharing this one's source and meter, for sub-protocols.
    pub fn reborrow(&mut self) -> Ctx<'_> {
        Ctx {
            source: self.source,
            meter: self.meter,
        }
    }
}

pub trait VerifierMachine {
    fn turn(&self) -> Turn;
    /// Next challenge, or `None` when the step was local (a final check or
    /// a secret draw). Fails when it is not the verifier's turn.
    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError>;
    /// Takes a prover message. Malformed messages end the run with a
    /// rejection; a message arriving out of turn is an error.
    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError>;
    fn verdict(&self) -> Option<Verdict>;
    /// The certified result, once accepted.
    fn output(&self) -> Option<Output>;
}

pub trait ProverMachine {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError>;
    fn respond(&mut self) -> Result<Body, ProtoError>;
    /// Whether the prover has sent its last message.
    fn is_done(&self) -> bool;
}

impl<V: VerifierMachine + ?Sized> VerifierMachine for Box<V> {
    fn turn(&self) -> Turn {
        (**self).turn()
    }
    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        (**self).send(ctx)
    }
    fn receive(&mut self, body: &Body, ctx: &mut Ctx<'_>) -> Result<(), ProtoError> {
        (**self).receive(body, ctx)
    }
    fn verdict(&self) -> Option<Verdict> {
        (**self).verdict()
    }
    fn output(&self) -> Option<Output> {
        (**self).output()
    }
}

impl<P: ProverMachine + ?Sized> ProverMachine for Box<P> {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        (**self).receive(body)
    }
    fn respond(&mut self) -> Result<Body, ProtoError> {
        (**self).respond()
    }
    fn is_done(&self) -> bool {
        (**self).is_done()
    }
}

/// The outcome of one run.
#[derive(Clone, Debug)]
pub struct Run<T> {
    pub verdict: Verdict,
    /// Present only on acceptance.
    pub output: Option<T>,
    pub transcript: Transcript,
    pub meter: CostMeter,
}

impl<T> Run<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> Option<U>) -> Run<U> {
        Run {
            verdict: self.verdict,
            output: self.output.and_then(f),
            transcript: self.transcript,
            meter: self.meter,
        }
    }
}

/// Deliberate channel misbehavior, for testing the ordering contract.
/// Positions count pending prover responses from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// While response `k` is pending, ask the verifier for its next
    /// challenge.
    EarlyChallenge(usize),
    /// While response `k` is pending, hand the prover another challenge.
    RepeatedChallenge(usize),
    /// Deliver response `k` to the verifier twice.
    DuplicateResponse(usize),
}

/// Drives a verifier and a prover to completion.
pub fn execute(
    verifier: &mut dyn VerifierMachine,
    prover: &mut dyn ProverMachine,
    source: &mut ChallengeSource,
) -> Run<Output> {
    execute_inner(verifier, prover, source, None)
}

/// [`execute`] over a channel that commits `fault` once.
pub fn execute_faulty(
    verifier: &mut dyn VerifierMachine,
    prover: &mut dyn ProverMachine,
    source: &mut ChallengeSource,
    fault: Fault,
) -> Run<Output> {
    execute_inner(verifier, prover, source, Some(fault))
}

fn execute_inner(
    verifier: &mut dyn VerifierMachine,
    prover: &mut dyn ProverMachine,
    source: &mut ChallengeSource,
    fault: Option<Fault>,
) -> Run<Output> {
    let mut transcript = Transcript::default();
    let mut meter = CostMeter::default();
    let result = drive(verifier, prover, source, &mut transcript, &mut meter, fault);
    let verdict = match result {
        Ok(()) => verifier
            .verdict()
            .unwrap_or(Verdict::Abort(super::AbortCause::Internal)),
        Err(e) => e.verdict(),
    };
    let output = if verdict.is_accept() {
        verifier.output()
    } else {
        None
    };
    Run {
        verdict,
        output,
        transcript,
        meter,
    }
}

fn drive(
    verifier: &mut dyn VerifierMachine,
    prover: &mut dyn ProverMachine,
    source: &mut ChallengeSource,
    transcript: &mut Transcript,
    meter: &mut CostMeter,
    fault: Option<Fault>,
) -> Result<(), ProtoError> {
    let mut pending = 0;
    let mut last_challenge: Option<Body> = None;
    loop {
        match verifier.turn() {
            Turn::Finished => return Ok(()),
            Turn::Verifier => {
                let sent = verifier.send(&mut Ctx::new(source, meter))?;
                if let Some(body) = sent {
                    meter.record(Direction::VerifierToProver, &body);
                    source.absorb(Direction::VerifierToProver, &body);
                    prover.receive(&body)?;
                    transcript.messages.push(Message {
                        direction: Direction::VerifierToProver,
                        body: body.clone(),
                    });
                    last_challenge = Some(body);
                }
            }
            Turn::Prover => {
                match fault {
                    Some(Fault::EarlyChallenge(k)) if k == pending => {
                        if let Some(body) = verifier.send(&mut Ctx::new(source, meter))? {
                            prover.receive(&body)?;
                        }
                    }
                    Some(Fault::RepeatedChallenge(k)) if k == pending => {
                        let body = last_challenge.clone().unwrap_or(Body::Field(vec![0]));
                        prover.receive(&body)?;
                    }
                    _ => {}
                }
                let body = prover.respond()?;
                meter.record(Direction::ProverToVerifier, &body);
                source.absorb(Direction::ProverToVerifier, &body);
                verifier.receive(&body, &mut Ctx::new(source, meter))?;
                if fault == Some(Fault::DuplicateResponse(pending)) {
                    verifier.receive(&body, &mut Ctx::new(source, meter))?;
                }
                transcript.messages.push(Message {
                    direction: Direction::ProverToVerifier,
                    body,
                });
                pending += 1;
            }
        }
    }
}

/// A prover that plays back recorded messages, optionally checking that
/// the verifier regenerates the recorded challenges.
#[derive(Clone, Debug, Default)]
pub struct ReplayProver {
    responses: VecDeque<Body>,
    challenges: Option<VecDeque<Body>>,
}

impl ReplayProver {
    pub fn new(responses: impl IntoIterator<Item = Body>) -> Self {
        Self {
            responses: responses.into_iter().collect(),
            challenges: None,
        }
    }

    pub fn from_transcript(t: &Transcript) -> Self {
        Self {
            responses: t.prover_messages().cloned().collect(),
            challenges: Some(t.verifier_messages().cloned().collect()),
        }
    }

    /// Recorded responses not yet played.
    pub fn remaining(&self) -> usize {
        self.responses.len()
    }
}

impl ProverMachine for ReplayProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        if let Some(expected) = &mut self.challenges {
            if expected.pop_front().as_ref() != Some(body) {
                return Err(ProtoError::InvalidInput(
                    "replayed challenge differs from the transcript".into(),
                ));
            }
        }
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        self.responses
            .pop_front()
            .ok_or(ProtoError::CertificateExhausted)
    }

    fn is_done(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Replays a transcript against a fresh verifier with the same randomness.
/// Leftover recorded responses make the run a rejection.
pub fn replay(
    verifier: &mut dyn VerifierMachine,
    transcript: &Transcript,
    source: &mut ChallengeSource,
) -> Run<Output> {
    let mut prover = ReplayProver::from_transcript(transcript);
    let mut run = execute(verifier, &mut prover, source);
    if run.verdict.is_accept() && prover.remaining() > 0 {
        run.verdict = Verdict::Reject(super::RejectCause::MalformedCertificate);
        run.output = None;
    }
    run
}

/// Step kinds of a machine's fixed schedule. For a verifier, `Send` and
/// `Local` are its own moves; for a prover, `Send` is a response.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Send,
    Recv,
    Local,
}

/// Position in a machine's schedule, plus its verdict once decided.
#[derive(Clone, Debug, Default)]
pub(crate) struct Script {
    steps: Vec<Step>,
    pos: usize,
    verdict: Option<Verdict>,
}

impl Script {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, step: Step, times: usize) -> &mut Self {
        self.steps.extend(std::iter::repeat_n(step, times));
        self
    }

    /// Verifier turn.
    pub(crate) fn turn(&self) -> Turn {
        if self.verdict.is_some() {
            return Turn::Finished;
        }
        match self.steps.get(self.pos) {
            None => Turn::Finished,
            Some(Step::Send | Step::Local) => Turn::Verifier,
            Some(Step::Recv) => Turn::Prover,
        }
    }

    pub(crate) fn done(&self) -> bool {
        self.verdict.is_some() || self.pos >= self.steps.len()
    }

    /// Checks that the next step is one of `allowed` and returns its index.
    pub(crate) fn expect(&self, allowed: &[Step], what: &'static str) -> Result<usize, ProtoError> {
        if self.verdict.is_some() {
            return Err(ProtoError::OutOfOrder(what));
        }
        match self.steps.get(self.pos) {
            Some(s) if allowed.contains(s) => Ok(self.pos),
            _ => Err(ProtoError::OutOfOrder(what)),
        }
    }

    pub(crate) fn advance(&mut self) {
        self.pos += 1;
    }

    pub(crate) fn finish(&mut self, verdict: Verdict) {
        self.verdict = Some(verdict);
    }

    pub(crate) fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }
}

/// The payload of a `Field` message of exactly `len` canonical residues.
pub(crate) fn field_payload(body: &Body, len: usize, f: PrimeField) -> Option<&[u64]> {
    match body {
        Body::Field(v) if v.len() == len && v.iter().all(|&x| x < f.modulus()) => Some(v),
        _ => None,
    }
}

/// Unwraps a `Field` challenge of the expected length, for provers.
pub(crate) fn field_challenge(body: &Body, len: usize) -> Result<&[u64], ProtoError> {
    match body {
        Body::Field(v) if v.len() == len => Ok(v),
        _ => Err(ProtoError::OutOfOrder("challenge of the wrong shape")),
    }
}
