use std::borrow::Cow;

use super::channel::{
    execute, field_challenge, field_payload, Ctx, ProverMachine, Run, Script, Step, Turn,
    VerifierMachine,
};
use super::protocol::Output;
use super::rank::{RankLowerProver, RankLowerVerifier};
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{lu_generic, DenseMatrix, LaError};

fn grp_script(n: usize, verifier: bool) -> Script {
    let (first, second) = if verifier {
        (Step::Send, Step::Recv)
    } else {
        (Step::Recv, Step::Send)
    };
    let mut s = Script::new();
    for _ in 0..n {
        s.push(first, 1).push(second, 1).push(first, 1).push(second, 1);
    }
    if verifier {
        s.push(Step::Local, 1);
    }
    s
}

/// Verifier for "`A = L·U` without pivoting". Round `i` runs from `n-1`
/// down to 0: send `(u_i, v_i)`, receive `(x_i, y_i)`, send `w_i`, receive
/// `z_i`; finally check `zᵀx = (wᵀA)·u` and `zᵀy = (wᵀA)·v`.
#[derive(Debug)]
pub struct GrpVerifier<'a> {
    a: Cow<'a, DenseMatrix>,
    s: SampleSet,
    u: Vec<u64>,
    v: Vec<u64>,
    w: Vec<u64>,
    x: Vec<u64>,
    y: Vec<u64>,
    z: Vec<u64>,
    script: Script,
}

impl<'a> GrpVerifier<'a> {
    pub fn new(a: &'a DenseMatrix) -> Result<Self, ProtoError> {
        if !a.is_square() {
            return Err(ProtoError::InvalidInput("GRP needs a square matrix".into()));
        }
        let n = a.rows();
        Ok(Self {
            s: SampleSet::full(a.field()),
            a: Cow::Borrowed(a),
            u: vec![0; n],
            v: vec![0; n],
            w: vec![0; n],
            x: vec![0; n],
            y: vec![0; n],
            z: vec![0; n],
            script: grp_script(n, true),
        })
    }
}

impl VerifierMachine for GrpVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        let pos = self.script.expect(&[Step::Send, Step::Local], "verifier send")?;
        self.script.advance();
        let n = self.a.rows();
        if pos < 4 * n {
            let i = n - 1 - pos / 4;
            return Ok(Some(if pos % 4 == 0 {
                self.u[i] = ctx.draw(&self.s)?;
                self.v[i] = ctx.draw(&self.s)?;
                Body::Field(vec![self.u[i], self.v[i]])
            } else {
                self.w[i] = ctx.draw(&self.s)?;
                Body::Field(vec![self.w[i]])
            }));
        }
        let f = self.a.field();
        let t = self.a.vecmat(&self.w, ctx.meter())?;
        let m = ctx.meter();
        for _ in 0..4 {
            m.charge_dot(n);
        }
        let ok = f.dot(&self.z, &self.x) == f.dot(&t, &self.u)
            && f.dot(&self.z, &self.y) == f.dot(&t, &self.v);
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
        let n = self.a.rows();
        let i = n - 1 - pos / 4;
        let f = self.a.field();
        if pos % 4 == 1 {
            match field_payload(body, 2, f) {
                Some(xy) => (self.x[i], self.y[i]) = (xy[0], xy[1]),
                None => self.script.finish(Verdict::Reject(RejectCause::MalformedMessage)),
            }
        } else {
            match field_payload(body, 1, f) {
                Some(z) => self.z[i] = z[0],
                None => self.script.finish(Verdict::Reject(RejectCause::MalformedMessage)),
            }
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

/// Honest prover: `[x y] = U·[u v]` and `zᵀ = wᵀ·L` for `A = L·U`. Both
/// factors are triangular, so every answer only needs challenges already
/// received.
#[derive(Debug)]
pub struct GrpProver {
    lu: Result<(DenseMatrix, DenseMatrix), ProtoError>,
    n: usize,
    u: Vec<u64>,
    v: Vec<u64>,
    w: Vec<u64>,
    script: Script,
}

impl GrpProver {
    pub fn new(a: &DenseMatrix) -> Self {
        let lu = lu_generic(a).map_err(|e| match e {
            LaError::NoGenericRankProfile => ProtoError::NoGrpWitness,
            e => e.into(),
        });
        let n = a.rows();
        Self {
            lu,
            n,
            u: vec![0; n],
            v: vec![0; n],
            w: vec![0; n],
            script: grp_script(n, false),
        }
    }
}

impl ProverMachine for GrpProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        self.lu.as_ref().map_err(Clone::clone)?;
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let i = self.n - 1 - pos / 4;
        if pos % 4 == 0 {
            let uv = field_challenge(body, 2)?;
            (self.u[i], self.v[i]) = (uv[0], uv[1]);
        } else {
            self.w[i] = field_challenge(body, 1)?[0];
        }
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let (l, u) = self.lu.as_ref().map_err(Clone::clone)?;
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let i = self.n - 1 - pos / 4;
        let f = l.field();
        let body = if pos % 4 == 1 {
            let row = &u.row(i)[i..];
            Body::Field(vec![f.dot(row, &self.u[i..]), f.dot(row, &self.v[i..])])
        } else {
            let z = (i..self.n).fold(0, |acc, k| f.mul_add(acc, self.w[k], l.get(k, i)));
            Body::Field(vec![z])
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Runs the generic rank profile certificate with the honest prover.
pub fn run_grp(a: &DenseMatrix, source: &mut ChallengeSource) -> Result<Run<()>, ProtoError> {
    let mut v = GrpVerifier::new(a)?;
    let mut p = GrpProver::new(a);
    Ok(execute(&mut v, &mut p, source).map(|_| Some(())))
}

/// Certifies non-singularity first (independence of all columns), then
/// the generic rank profile. The two runs are metered separately; the
/// second only happens if the first accepts.
pub fn run_grp_nonsingular(
    a: &DenseMatrix,
    source: &mut ChallengeSource,
) -> Result<(Run<()>, Option<Run<()>>), ProtoError> {
    let all: Vec<usize> = (0..a.cols()).collect();
    let mut v = RankLowerVerifier::new(a, Some(all.clone()));
    let mut p = RankLowerProver::new(a, Some(all));
    let prologue = execute(&mut v, &mut p, source).map(|_| Some(()));
    if !prologue.verdict.is_accept() {
        return Ok((prologue, None));
    }
    let main = run_grp(a, source)?;
    Ok((prologue, Some(main)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use crate::proto::AbortCause;

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), &rows).unwrap()
    }

    #[test]
    fn identity_echoes_challenges() {
        let a = DenseMatrix::identity(PrimeField::new(101).unwrap(), 3);
        let run = run_grp(&a, &mut ChallengeSource::interactive(3)).unwrap();
        assert!(run.verdict.is_accept());
        let msgs = &run.transcript.messages;
        for round in msgs.chunks(4) {
            let (Body::Field(uv), Body::Field(xy)) = (&round[0].body, &round[1].body) else {
                panic!()
            };
            assert_eq!(uv, xy);
            assert_eq!(round[2].body, round[3].body);
        }
    }

    #[test]
    fn generic_profile_accepts() {
        let run = run_grp(&m(5, &[&[1, 1], &[1, 0]]), &mut ChallengeSource::interactive(1)).unwrap();
        assert!(run.verdict.is_accept());
        assert_eq!((run.meter.field_v2p, run.meter.field_p2v), (6, 6));
        assert_eq!(run.meter.matvecs, 1);
    }

    #[test]
    fn missing_profile_aborts() {
        let run = run_grp(&m(5, &[&[0, 1], &[1, 0]]), &mut ChallengeSource::interactive(1)).unwrap();
        assert_eq!(run.verdict, Verdict::Abort(AbortCause::NoGrpWitness));
    }

    #[test]
    fn prologue_rejects_singular_input() {
        let a = m(7, &[&[1, 2], &[2, 4]]);
        let (pro, main) = run_grp_nonsingular(&a, &mut ChallengeSource::interactive(2)).unwrap();
        assert!(!pro.verdict.is_accept());
        assert!(main.is_none());
        let a = m(7, &[&[1, 2], &[3, 4]]);
        let (pro, main) = run_grp_nonsingular(&a, &mut ChallengeSource::interactive(2)).unwrap();
        assert!(pro.verdict.is_accept());
        assert!(main.unwrap().verdict.is_accept());
    }
}
