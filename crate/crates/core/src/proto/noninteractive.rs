use super::channel::{execute, Ctx, ProverMachine, Run, Script, Step, Turn, VerifierMachine};
use super::protocol::Output;
use super::{Body, ChallengeSource, ProtoError, RejectCause, Verdict};
use crate::ff::SampleSet;
use crate::la::{
    echelon_pivots, pluq_crp, pluq_rpm, DenseMatrix, Permutation, PluqFactorization, RankProfile,
    RankProfileMatrix,
};

/// Which profile a PLUQ witness is supposed to reveal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PluqKind {
    /// `U·Q` in row echelon form: the column rank profile.
    Crp,
    /// `P·L·Pᵀ` lower and `Qᵀ·U·Q` upper triangular: the rank profile
    /// matrix.
    Rpm,
}

/// The one-message certificate carrying `fac`.
pub fn pluq_certificate(fac: &PluqFactorization) -> Body {
    Body::Pluq {
        rank: fac.rank,
        p: fac.p.images().to_vec(),
        l: fac.l.data().to_vec(),
        u: fac.u.data().to_vec(),
        q: fac.q.images().to_vec(),
    }
}

/// Rebuilds and checks the shape of a claimed factorization: permutations
/// of the right sizes, `L` unit lower trapezoidal, `U` upper trapezoidal
/// with a nonzero diagonal.
fn parse_witness(a: &DenseMatrix, body: &Body) -> Option<PluqFactorization> {
    let Body::Pluq { rank, p, l, u, q } = body else {
        return None;
    };
    let (m, n, r, f) = (a.rows(), a.cols(), *rank, a.field());
    if r > m.min(n) || p.len() != m || q.len() != n || l.len() != m * r || u.len() != r * n {
        return None;
    }
    let l = DenseMatrix::new(f, m, r, l.clone()).ok()?;
    let u = DenseMatrix::new(f, r, n, u.clone()).ok()?;
    for k in 0..r {
        if l.get(k, k) != 1 || u.get(k, k) == 0 {
            return None;
        }
        if l.row(k)[k + 1..].iter().any(|&v| v != 0) || u.row(k)[..k].iter().any(|&v| v != 0) {
            return None;
        }
    }
    Some(PluqFactorization {
        rank: r,
        p: Permutation::new(p.clone()).ok()?,
        l,
        u,
        q: Permutation::new(q.clone()).ok()?,
    })
}

/// Entrywise triangularity of the conjugated factors, reading only the
/// stored `m x r` and `r x n` blocks.
fn conjugates_triangular(fac: &PluqFactorization) -> bool {
    let (p, q) = (fac.p.images(), fac.q.images());
    let lower = (0..fac.l.rows()).all(|i| {
        fac.l.row(i).iter().enumerate().all(|(k, &v)| v == 0 || p[i] >= p[k])
    });
    let upper = (0..fac.rank).all(|k| {
        fac.u.row(k).iter().enumerate().all(|(t, &v)| v == 0 || q[k] <= q[t])
    });
    lower && upper
}

/// Verifier of a one-message PLUQ certificate: structural checks on the
/// factors, then one randomized test of `A = P·L·U·Q`.
#[derive(Debug)]
pub struct NonInteractiveVerifier<'a> {
    a: &'a DenseMatrix,
    kind: PluqKind,
    fac: Option<PluqFactorization>,
    result: Option<Output>,
    script: Script,
}

impl<'a> NonInteractiveVerifier<'a> {
    pub fn new(a: &'a DenseMatrix, kind: PluqKind) -> Self {
        let mut script = Script::new();
        script.push(Step::Recv, 1).push(Step::Local, 1);
        Self {
            a,
            kind,
            fac: None,
            result: None,
            script,
        }
    }
}

impl VerifierMachine for NonInteractiveVerifier<'_> {
    fn turn(&self) -> Turn {
        self.script.turn()
    }

    fn send(&mut self, ctx: &mut Ctx<'_>) -> Result<Option<Body>, ProtoError> {
        self.script.expect(&[Step::Local], "verifier check")?;
        self.script.advance();
        let fac = self.fac.as_ref().ok_or(ProtoError::OutOfOrder("check before witness"))?;
        let (m, n, r) = (self.a.rows(), self.a.cols(), fac.rank);
        let output = match self.kind {
            PluqKind::Crp => {
                ctx.meter().charge_ops(r * n);
                match echelon_pivots(&fac.uq()?) {
                    Some(pivots) => Output::ColumnProfile(RankProfile::new(pivots, n)?),
                    None => {
                        self.script.finish(Verdict::Reject(RejectCause::NotRowEchelon));
                        return Ok(None);
                    }
                }
            }
            PluqKind::Rpm => {
                ctx.meter().charge_ops(r * (m + n));
                if !conjugates_triangular(fac) {
                    self.script.finish(Verdict::Reject(RejectCause::NotTriangular));
                    return Ok(None);
                }
                Output::RankProfileMatrix(fac.rank_profile_matrix())
            }
        };
        let v = ctx.draw_vec(&SampleSet::full(self.a.field()), n)?;
        let av = self.a.matvec(&v, ctx.meter())?;
        let uv = fac.u.apply(&fac.q.gather(&v))?;
        let luv = fac.l.apply(&uv)?;
        ctx.meter().charge_dense(r, n);
        ctx.meter().charge_dense(m, r);
        if av == fac.p.scatter(&luv) {
            self.result = Some(output);
            self.script.finish(Verdict::Accept);
        } else {
            self.script.finish(Verdict::Reject(RejectCause::ProductCheck));
        }
        Ok(None)
    }

    fn receive(&mut self, body: &Body, _: &mut Ctx<'_>) -> Result<(), ProtoError> {
        self.script.expect(&[Step::Recv], "verifier receive")?;
        self.script.advance();
        match parse_witness(self.a, body) {
            Some(fac) => self.fac = Some(fac),
            None => self.script.finish(Verdict::Reject(RejectCause::MalformedWitness)),
        }
        Ok(())
    }

    fn verdict(&self) -> Option<Verdict> {
        self.script.verdict()
    }

    fn output(&self) -> Option<Output> {
        self.result.clone()
    }
}

/// Sends a fixed factorization.
#[derive(Debug)]
pub struct PluqProver {
    body: Body,
    sent: bool,
}

impl PluqProver {
    pub fn new(fac: &PluqFactorization) -> Self {
        Self {
            body: pluq_certificate(fac),
            sent: false,
        }
    }

    /// The factorization the honest prover of `kind` computes.
    pub fn honest(a: &DenseMatrix, kind: PluqKind) -> Self {
        Self::new(&match kind {
            PluqKind::Crp => pluq_crp(a),
            PluqKind::Rpm => pluq_rpm(a),
        })
    }
}

impl ProverMachine for PluqProver {
    fn receive(&mut self, _: &Body) -> Result<(), ProtoError> {
        Err(ProtoError::OutOfOrder("non-interactive prover takes no challenges"))
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        if self.sent {
            return Err(ProtoError::OutOfOrder("witness already sent"));
        }
        self.sent = true;
        Ok(self.body.clone())
    }

    fn is_done(&self) -> bool {
        self.sent
    }
}

/// Checks a claimed CRP-revealing factorization of `a`.
pub fn crp_noninteractive_verify(
    a: &DenseMatrix,
    fac: &PluqFactorization,
    source: &mut ChallengeSource,
) -> Run<RankProfile> {
    let mut v = NonInteractiveVerifier::new(a, PluqKind::Crp);
    execute(&mut v, &mut PluqProver::new(fac), source).map(|o| match o {
        Output::ColumnProfile(c) => Some(c),
        _ => None,
    })
}

/// Checks a claimed RPM-revealing factorization of `a`.
pub fn rpm_noninteractive_verify(
    a: &DenseMatrix,
    fac: &PluqFactorization,
    source: &mut ChallengeSource,
) -> Run<RankProfileMatrix> {
    let mut v = NonInteractiveVerifier::new(a, PluqKind::Rpm);
    execute(&mut v, &mut PluqProver::new(fac), source).map(|o| match o {
        Output::RankProfileMatrix(r) => Some(r),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{seeded, PrimeField};
    use crate::oracle::{oracle_crp, oracle_rpm};

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(PrimeField::new(p).unwrap(), &rows).unwrap()
    }

    #[test]
    fn honest_witnesses_accept() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = seeded(6);
        for seed in 0..20u64 {
            let (mm, n, r) = (1 + seed as usize % 6, 1 + seed as usize % 5, seed as usize % 4);
            let a = DenseMatrix::random(f, mm, r, &mut rng).mul(&DenseMatrix::random(f, r, n, &mut rng)).unwrap();
            let run = crp_noninteractive_verify(&a, &pluq_crp(&a), &mut ChallengeSource::interactive(seed));
            assert_eq!(run.output.as_ref(), Some(&oracle_crp(&a)));
            assert_eq!(run.meter.matvecs, 1);
            let run = rpm_noninteractive_verify(&a, &pluq_rpm(&a), &mut ChallengeSource::interactive(seed));
            assert_eq!(run.output, Some(oracle_rpm(&a)));
        }
    }

    #[test]
    fn shape_violations_rejected() {
        let a = m(7, &[&[0, 1], &[1, 0]]);
        let crp = pluq_crp(&a);
        let rpm = pluq_rpm(&a);
        let mut bad = rpm.clone();
        bad.l.set(0, 0, 2);
        let run = rpm_noninteractive_verify(&a, &bad, &mut ChallengeSource::interactive(1));
        assert_eq!(run.verdict, Verdict::Reject(RejectCause::MalformedWitness));
        let mut wrong = rpm.clone();
        wrong.u.set(0, 1, 3);
        let run = rpm_noninteractive_verify(&a, &wrong, &mut ChallengeSource::interactive(1));
        assert!(run.verdict.is_reject());
        assert!(crp_noninteractive_verify(&a, &crp, &mut ChallengeSource::interactive(1)).verdict.is_accept());
    }

    #[test]
    fn non_echelon_and_non_triangular_rejected() {
        let swapped = PluqFactorization {
            rank: 2,
            p: Permutation::swap(2, 0, 1),
            l: m(7, &[&[1, 0], &[1, 1]]),
            u: m(7, &[&[1, 0], &[0, 6]]),
            q: Permutation::identity(2),
        };
        let b = swapped.reconstruct().unwrap();
        assert!(rpm_noninteractive_verify(&b, &swapped, &mut ChallengeSource::interactive(1)).verdict
            == Verdict::Reject(RejectCause::NotTriangular));
        let echelon_breaker = PluqFactorization {
            rank: 2,
            p: Permutation::identity(2),
            l: DenseMatrix::identity(PrimeField::new(7).unwrap(), 2),
            u: DenseMatrix::identity(PrimeField::new(7).unwrap(), 2),
            q: Permutation::swap(2, 0, 1),
        };
        let c = echelon_breaker.reconstruct().unwrap();
        assert!(crp_noninteractive_verify(&c, &echelon_breaker, &mut ChallengeSource::interactive(1)).verdict
            == Verdict::Reject(RejectCause::NotRowEchelon));
    }
}
