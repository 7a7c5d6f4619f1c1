//! Cheating provers, for measuring soundness empirically.
//!
//! Each strategy makes a false claim and then plays on with legal
//! messages, guessing the challenges it has not seen yet. A run of
//! [`measure`] plays many independent trials against the real verifier and
//! compares the acceptance rate with the bound the protocol promises.

use rand::Rng;
use thiserror::Error;

use crate::ff::{seeded, PrimeField, RandomSource, SampleSet};
use crate::la::{
    lu_generic, pluq_crp, DenseMatrix, Diagonal, LdupFactorization, Permutation,
};
use crate::par::Execution;
use crate::proto::{
    execute, field_challenge, nullspace_candidate, rref_on, transform, verifier, Body,
    ChallengeSource, IndependenceAnswer, Inputs, LdupProver, ProtoError, ProtocolId,
    ProverMachine, RpmInvProver, Script, Side, SilentProver, Step,
};

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Proto(#[from] ProtoError),
    #[error("at least one trial is needed")]
    NoTrials,
}

/// The named strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adversary {
    /// GRP on a matrix without one: honest on a perturbed matrix, then a
    /// guess of the last `w_0`.
    GrpForge,
    /// As [`Adversary::GrpForge`], but solves for `z_0` after seeing `w_0`,
    /// which also wins whenever a 2x2 determinant of the transcript
    /// vanishes. On the antidiagonal that determinant is
    /// `w_1·(u_1·v_0 − u_0·v_1)`, so the rate is near `3/|S|`, above the
    /// `1/|S|` the GRP theorem claims; [`measure`] reports it as failing.
    GrpForgeSolve,
    /// LDUP committing `c·D`.
    ScaleD,
    /// LDUP committing `D` with only the first pivot scaled.
    ScaleDFirst,
    /// CRP claiming a non-minimal set of independent columns.
    CrpShift,
    /// As [`Adversary::CrpShift`], also guessing the verifier's final
    /// secret.
    CrpShiftGuess,
    /// Triangular equivalence when the transform is not triangular.
    TriGhost,
    /// A wrong product `C = A·B + e₀e₀ᵀ`.
    Freivalds,
    /// Rank profile matrix of an invertible matrix, committing `P = I`.
    RpmIdentity,
}

impl Adversary {
    pub const ALL: [Adversary; 9] = [
        Adversary::GrpForge,
        Adversary::GrpForgeSolve,
        Adversary::ScaleD,
        Adversary::ScaleDFirst,
        Adversary::CrpShift,
        Adversary::CrpShiftGuess,
        Adversary::TriGhost,
        Adversary::Freivalds,
        Adversary::RpmIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Adversary::GrpForge => "grp-forge",
            Adversary::GrpForgeSolve => "grp-forge-solve",
            Adversary::ScaleD => "scale-d",
            Adversary::ScaleDFirst => "scale-d-first",
            Adversary::CrpShift => "crp-shift",
            Adversary::CrpShiftGuess => "crp-shift-guess",
            Adversary::TriGhost => "tri-ghost",
            Adversary::Freivalds => "freivalds",
            Adversary::RpmIdentity => "rpm-identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn protocol(self) -> ProtocolId {
        match self {
            Adversary::GrpForge | Adversary::GrpForgeSolve => ProtocolId::Grp,
            Adversary::ScaleD | Adversary::ScaleDFirst => ProtocolId::Ldup,
            Adversary::CrpShift | Adversary::CrpShiftGuess => ProtocolId::Crp,
            Adversary::TriGhost => ProtocolId::TriEquivLower,
            Adversary::Freivalds => ProtocolId::Freivalds,
            Adversary::RpmIdentity => ProtocolId::RpmInvertible,
        }
    }

    /// How many guesses out of `|S|` the strategy's bound allows: the
    /// bound is this over `p`.
    pub fn bound_numerator(self) -> u64 {
        match self {
            Adversary::GrpForge
            | Adversary::GrpForgeSolve
            | Adversary::CrpShift
            | Adversary::TriGhost
            | Adversary::Freivalds => 1,
            Adversary::ScaleD
            | Adversary::ScaleDFirst
            | Adversary::CrpShiftGuess
            | Adversary::RpmIdentity => 2,
        }
    }

    pub fn bound(self, field: PrimeField) -> f64 {
        self.bound_numerator() as f64 / field.modulus() as f64
    }

    /// The fixed instance trials are played on. Random instances are drawn
    /// from `seed` until they meet the strategy's precondition.
    pub fn instance(self, field: PrimeField, seed: u64) -> Result<Inputs, AdversaryError> {
        let m = |rows: &[&[u64]]| -> Result<DenseMatrix, AdversaryError> {
            let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
            Ok(DenseMatrix::from_rows(field, &rows).map_err(ProtoError::from)?)
        };
        let mut rng = seeded(seed);
        Ok(match self {
            Adversary::GrpForge | Adversary::GrpForgeSolve | Adversary::RpmIdentity => {
                Inputs::new(m(&[&[0, 1], &[1, 0]])?)
            }
            Adversary::CrpShift | Adversary::CrpShiftGuess => Inputs::new(m(&[&[1, 1], &[2, 2]])?),
            Adversary::ScaleD | Adversary::ScaleDFirst => Inputs::new(random_invertible(field, 4, &mut rng)),
            Adversary::TriGhost => {
                let a = random_invertible(field, 4, &mut rng);
                let t = ghost_transform(field, 4, &mut rng);
                let b = a.mul(&t).map_err(ProtoError::from)?;
                Inputs::new(a).with_b(b)
            }
            Adversary::Freivalds => {
                let a = DenseMatrix::random(field, 4, 4, &mut rng);
                let b = DenseMatrix::random(field, 4, 4, &mut rng);
                let mut c = a.mul(&b).map_err(ProtoError::from)?;
                c.set(0, 0, field.add(c.get(0, 0), 1));
                Inputs::new(a).with_b(b).with_c(c)
            }
        })
    }

    /// A fresh cheating prover for `inputs`; `rng` supplies its guesses.
    pub fn prover(
        self,
        inputs: &Inputs,
        rng: RandomSource,
    ) -> Result<Box<dyn ProverMachine>, AdversaryError> {
        let a = &inputs.a;
        Ok(match self {
            Adversary::GrpForge => Box::new(adversary_grp_forge(a, ForgeStrategy::Guess, rng)?),
            Adversary::GrpForgeSolve => Box::new(adversary_grp_forge(a, ForgeStrategy::Solve, rng)?),
            Adversary::ScaleD => Box::new(adversary_scale_d(a, 2, ScaleScope::Whole)?),
            Adversary::ScaleDFirst => Box::new(adversary_scale_d(a, 2, ScaleScope::FirstPivot)?),
            Adversary::CrpShift => Box::new(adversary_crp_shift(a, false, rng)?),
            Adversary::CrpShiftGuess => Box::new(adversary_crp_shift(a, true, rng)?),
            Adversary::TriGhost => {
                let b = inputs.b.as_ref().ok_or(AdversaryError::Precondition("needs B"))?;
                Box::new(adversary_triangular_ghost(a, b, Side::Lower, rng)?)
            }
            Adversary::Freivalds => Box::new(SilentProver),
            Adversary::RpmIdentity => Box::new(adversary_rpm_identity(a, rng)?),
        })
    }
}

impl std::fmt::Display for Adversary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn random_invertible(field: PrimeField, n: usize, rng: &mut RandomSource) -> DenseMatrix {
    loop {
        let a = DenseMatrix::random(field, n, n, rng);
        if pluq_crp(&a).rank == n {
            return a;
        }
    }
}

/// Unit lower triangular with one nonzero entry above the diagonal.
fn ghost_transform(field: PrimeField, n: usize, rng: &mut RandomSource) -> DenseMatrix {
    let mut t = DenseMatrix::from_fn(field, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Greater => field.random(rng),
        std::cmp::Ordering::Less => 0,
    });
    if n >= 2 {
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        t.set(i, j, field.random_nonzero(rng));
    }
    t
}

/// `A + diag(δ)` with a generic rank profile, and its `L·U`.
fn perturb_to_grp(
    a: &DenseMatrix,
    rng: &mut RandomSource,
) -> Result<(DenseMatrix, DenseMatrix), AdversaryError> {
    let f = a.field();
    for _ in 0..1000 {
        let mut b = a.clone();
        for k in 0..a.rows() {
            b.set(k, k, f.add(a.get(k, k), f.random_nonzero(rng)));
        }
        if let Ok(lu) = lu_generic(&b) {
            return Ok(lu);
        }
    }
    Err(AdversaryError::Precondition("no perturbation with a generic rank profile"))
}

fn require_invertible_without_grp(a: &DenseMatrix) -> Result<(), AdversaryError> {
    if !a.is_square() || a.rows() < 2 {
        return Err(AdversaryError::Precondition("needs a square matrix of order at least 2"));
    }
    if pluq_crp(a).rank < a.rows() {
        return Err(AdversaryError::Precondition("matrix is singular"));
    }
    if lu_generic(a).is_ok() {
        return Err(AdversaryError::Precondition("matrix has a generic rank profile"));
    }
    Ok(())
}

/// What the GRP forger does once it has seen `w_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForgeStrategy {
    /// Answer `z_0 = 1`, right exactly when the guess of `w_0` was.
    Guess,
    /// Pick `z_0` to satisfy both final equations whenever possible.
    Solve,
}

/// Cheating GRP prover. Rounds `n-1..1` are answered honestly for
/// `A + diag(δ)`. In the last round the two final checks read
/// `z_0·x_0 = a·w_0 + b` and `z_0·y_0 = c·w_0 + d` with known `a..d`, so
/// the prover sends `(x_0, y_0) = (g·a + b, g·c + d)` for a guess `g` of
/// `w_0`.
#[derive(Debug)]
pub struct GrpForgeProver {
    a: DenseMatrix,
    l: DenseMatrix,
    u_fac: DenseMatrix,
    strategy: ForgeStrategy,
    guess: u64,
    u: Vec<u64>,
    v: Vec<u64>,
    w: Vec<u64>,
    x: Vec<u64>,
    y: Vec<u64>,
    z: Vec<u64>,
    coeffs: [u64; 4],
    script: Script,
}

pub fn adversary_grp_forge(
    a: &DenseMatrix,
    strategy: ForgeStrategy,
    mut rng: RandomSource,
) -> Result<GrpForgeProver, AdversaryError> {
    require_invertible_without_grp(a)?;
    let (l, u_fac) = perturb_to_grp(a, &mut rng)?;
    let n = a.rows();
    let guess = SampleSet::full(a.field()).sample(&mut rng).map_err(ProtoError::from)?;
    let mut script = Script::new();
    for _ in 0..n {
        script.push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1);
    }
    Ok(GrpForgeProver {
        a: a.clone(),
        l,
        u_fac,
        strategy,
        guess,
        u: vec![0; n],
        v: vec![0; n],
        w: vec![0; n],
        x: vec![0; n],
        y: vec![0; n],
        z: vec![0; n],
        coeffs: [0; 4],
        script,
    })
}

impl GrpForgeProver {
    fn index(&self, pos: usize) -> usize {
        self.a.rows() - 1 - pos / 4
    }

    /// `a..d` of the last round, once every `u`, `v` and `w_{≥1}` is known.
    fn last_round_coefficients(&self) -> Result<[u64; 4], ProtoError> {
        let f = self.a.field();
        let au = self.a.apply(&self.u)?;
        let av = self.a.apply(&self.v)?;
        let su = f.dot(&self.z[1..], &self.x[1..]);
        let sv = f.dot(&self.z[1..], &self.y[1..]);
        Ok([
            au[0],
            f.sub(f.dot(&self.w[1..], &au[1..]), su),
            av[0],
            f.sub(f.dot(&self.w[1..], &av[1..]), sv),
        ])
    }
}

impl ProverMachine for GrpForgeProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let i = self.index(pos);
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
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let i = self.index(pos);
        let n = self.a.rows();
        let f = self.a.field();
        let body = match (i, pos % 4) {
            (0, 1) => {
                self.coeffs = self.last_round_coefficients()?;
                let [a, b, c, d] = self.coeffs;
                self.x[0] = f.mul_add(b, self.guess, a);
                self.y[0] = f.mul_add(d, self.guess, c);
                Body::Field(vec![self.x[0], self.y[0]])
            }
            (0, _) => {
                let [a, b, c, d] = self.coeffs;
                let w0 = self.w[0];
                let z0 = match self.strategy {
                    ForgeStrategy::Guess => 1,
                    ForgeStrategy::Solve => {
                        let (tx, ty) = (f.mul_add(b, a, w0), f.mul_add(d, c, w0));
                        if self.x[0] != 0 {
                            f.div(tx, self.x[0]).map_err(ProtoError::from)?
                        } else if self.y[0] != 0 {
                            f.div(ty, self.y[0]).map_err(ProtoError::from)?
                        } else {
                            1
                        }
                    }
                };
                Body::Field(vec![z0])
            }
            (_, 1) => {
                let row = &self.u_fac.row(i)[i..];
                self.x[i] = f.dot(row, &self.u[i..]);
                self.y[i] = f.dot(row, &self.v[i..]);
                Body::Field(vec![self.x[i], self.y[i]])
            }
            _ => {
                self.z[i] = (i..n).fold(0, |acc, k| f.mul_add(acc, self.w[k], self.l.get(k, i)));
                Body::Field(vec![self.z[i]])
            }
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Which entries of `D` the scaling adversary changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleScope {
    Whole,
    FirstPivot,
}

/// LDUP prover committing a scaled `D` and otherwise answering honestly.
/// With `c = 1` it is the honest prover.
pub fn adversary_scale_d(a: &DenseMatrix, c: u64, scope: ScaleScope) -> Result<LdupProver, AdversaryError> {
    let fac = crate::la::ldup(a).map_err(|_| AdversaryError::Precondition("matrix is singular"))?;
    let f = a.field();
    let c = f.reduce(c);
    if c == 0 {
        return Err(AdversaryError::Precondition("scale must be nonzero"));
    }
    let entries = fac
        .d
        .entries()
        .iter()
        .enumerate()
        .map(|(k, &d)| match scope {
            ScaleScope::FirstPivot if k > 0 => d,
            _ => f.mul(c, d),
        })
        .collect();
    let n = a.rows();
    let fac = LdupFactorization {
        d: Diagonal::new(f, entries).map_err(ProtoError::from)?,
        ..fac
    };
    Ok(LdupProver::from_factors(Ok(fac), n))
}

/// Rank profile matrix prover committing `P = I` for an invertible `A`
/// without a generic rank profile, answering from the LDUP of a perturbed
/// `A + diag(δ)`.
pub fn adversary_rpm_identity(a: &DenseMatrix, mut rng: RandomSource) -> Result<RpmInvProver, AdversaryError> {
    require_invertible_without_grp(a)?;
    let f = a.field();
    let n = a.rows();
    let (l, u) = perturb_to_grp(a, &mut rng)?;
    let diag: Vec<u64> = (0..n).map(|k| u.get(k, k)).collect();
    let inv: Vec<u64> = diag.iter().map(|&d| f.inv(d)).collect::<Result<_, _>>().map_err(ProtoError::from)?;
    let u1 = DenseMatrix::from_fn(f, n, n, |i, j| f.mul(inv[i], u.get(i, j)));
    let fac = LdupFactorization {
        l,
        d: Diagonal::new(f, diag).map_err(ProtoError::from)?,
        u1,
        p: Permutation::identity(n),
    };
    Ok(RpmInvProver::from_factors(Ok(fac), n))
}

/// Cheating CRP prover claiming a column set that spans but is not
/// lexicographically first. Each `y_j` is the honest formula for the
/// claimed set, with the `x_k` not yet seen (and optionally the verifier's
/// final secret) replaced by guesses.
#[derive(Debug)]
pub struct CrpShiftProver {
    cols: Vec<usize>,
    r: DenseMatrix,
    independence: IndependenceAnswer,
    guesses: Vec<u64>,
    pre_guess: u64,
    nu: Vec<u64>,
    script: Script,
}

/// Replaces one index of the column rank profile by a later column such
/// that the set still spans.
fn shifted_claim(a: &DenseMatrix) -> Option<(Vec<usize>, DenseMatrix)> {
    let profile = pluq_crp(a).column_profile().into_inner();
    for t in (0..profile.len()).rev() {
        for c in profile[t] + 1..a.cols() {
            if profile.contains(&c) {
                continue;
            }
            let mut cols = profile.clone();
            cols[t] = c;
            cols.sort_unstable();
            if let Ok(r) = rref_on(a, &cols) {
                return Some((cols, r));
            }
        }
    }
    None
}

pub fn adversary_crp_shift(
    a: &DenseMatrix,
    guess_secret: bool,
    mut rng: RandomSource,
) -> Result<CrpShiftProver, AdversaryError> {
    let (cols, r) = shifted_claim(a).ok_or(AdversaryError::Precondition(
        "the column rank profile is the only spanning set of independent columns",
    ))?;
    let f = a.field();
    let rank = cols.len();
    let guesses = (0..rank).map(|_| f.random(&mut rng)).collect();
    let pre_guess = if guess_secret { f.random_nonzero(&mut rng) } else { 0 };
    let mut script = Script::new();
    script.push(Step::Send, 1).push(Step::Recv, 1).push(Step::Send, 1).push(Step::Recv, 1);
    for _ in 0..rank {
        script.push(Step::Recv, 1).push(Step::Send, 1);
    }
    Ok(CrpShiftProver {
        independence: IndependenceAnswer::new(a, cols.clone())?,
        cols,
        r,
        guesses,
        pre_guess,
        nu: Vec::new(),
        script,
    })
}

impl CrpShiftProver {
    pub fn claim(&self) -> &[usize] {
        &self.cols
    }
}

impl ProverMachine for CrpShiftProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        let rank = self.cols.len();
        match pos {
            1 => self.independence.receive(body)?,
            3 => self.nu = field_challenge(body, self.r.cols())?.to_vec(),
            p => {
                let j = rank - 1 - (p - 4) / 2;
                self.guesses[j] = field_challenge(body, 1)?[0];
            }
        }
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let body = match pos {
            0 => self.independence.claim(),
            2 => self.independence.respond()?,
            p => {
                let j = self.cols.len() - 1 - (p - 5) / 2;
                let f = self.r.field();
                let s = nullspace_candidate(&self.cols, &self.nu, &self.guesses, &[], self.pre_guess, f);
                Body::Field(vec![f.dot(self.r.row(j), &s)])
            }
        };
        self.script.advance();
        Ok(body)
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Triangular equivalence prover for a transform that may not be
/// triangular: `y_i = T_{i,*}·x` with unseen entries of `x` guessed.
#[derive(Debug)]
pub struct TriGhostProver {
    t: DenseMatrix,
    side: Side,
    x: Vec<u64>,
    script: Script,
}

pub fn adversary_triangular_ghost(
    a: &DenseMatrix,
    b: &DenseMatrix,
    side: Side,
    mut rng: RandomSource,
) -> Result<TriGhostProver, AdversaryError> {
    if a.rows() < a.cols() || (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(AdversaryError::Precondition("A and B must be tall and of the same shape"));
    }
    let t = transform(a, b)?;
    let n = t.rows();
    let f = a.field();
    let mut script = Script::new();
    for _ in 0..n {
        script.push(Step::Recv, 1).push(Step::Send, 1);
    }
    Ok(TriGhostProver {
        x: (0..n).map(|_| f.random(&mut rng)).collect(),
        t,
        side,
        script,
    })
}

impl ProverMachine for TriGhostProver {
    fn receive(&mut self, body: &Body) -> Result<(), ProtoError> {
        let pos = self.script.expect(&[Step::Recv], "prover receive")?;
        self.x[self.side.index(pos / 2, self.t.rows())] = field_challenge(body, 1)?[0];
        self.script.advance();
        Ok(())
    }

    fn respond(&mut self) -> Result<Body, ProtoError> {
        let pos = self.script.expect(&[Step::Send], "prover respond")?;
        let i = self.side.index(pos / 2, self.t.rows());
        let y = self.t.field().dot(self.t.row(i), &self.x);
        self.script.advance();
        Ok(Body::Field(vec![y]))
    }

    fn is_done(&self) -> bool {
        self.script.done()
    }
}

/// Outcome of [`measure`].
#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub adversary: Adversary,
    pub modulus: u64,
    pub trials: usize,
    pub accepted: usize,
    pub rate: f64,
    pub bound: f64,
    /// Three binomial standard deviations at the bound.
    pub slack: f64,
    pub pass: bool,
}

/// Seed of trial `k`: the verifier's randomness. The prover's guesses use
/// an unrelated stream.
fn trial_seeds(seed: u64, k: usize) -> (u64, u64) {
    let s = seed.wrapping_add(k as u64);
    (s, s ^ 0x9e37_79b9_7f4a_7c15)
}

/// Plays `trials` independent runs of `adversary` against the verifier on
/// its fixed instance. Trials may run in parallel; results do not depend on
/// `exec`.
pub fn measure(
    adversary: Adversary,
    field: PrimeField,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<AttackReport, AdversaryError> {
    if trials == 0 {
        return Err(AdversaryError::NoTrials);
    }
    let inputs = adversary.instance(field, seed)?;
    adversary.prover(&inputs, seeded(0))?;
    let id = adversary.protocol();
    let outcomes = exec.for_work(trials * 1024).map(trials, |k| {
        let (vs, ps) = trial_seeds(seed, k);
        let mut v = verifier(id, &inputs)?;
        let mut p = adversary.prover(&inputs, seeded(ps))?;
        let run = execute(&mut v, &mut p, &mut ChallengeSource::interactive(vs));
        Ok::<_, AdversaryError>(run.verdict.is_accept())
    });
    let mut accepted = 0;
    for o in outcomes {
        accepted += o? as usize;
    }
    let rate = accepted as f64 / trials as f64;
    let bound = adversary.bound(field);
    let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
    Ok(AttackReport {
        adversary,
        modulus: field.modulus(),
        trials,
        accepted,
        rate,
        bound,
        slack,
        pass: rate <= bound + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::{CrpProver, CrpVerifier, Verdict};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for a in Adversary::ALL {
            assert_eq!(Adversary::from_name(a.name()), Some(a));
        }
        assert_eq!(Adversary::from_name("nope"), None);
    }

    #[test]
    fn grp_forge_refuses_matrices_with_grp() {
        let a = DenseMatrix::identity(f(101), 3);
        assert!(matches!(
            adversary_grp_forge(&a, ForgeStrategy::Guess, seeded(1)),
            Err(AdversaryError::Precondition(_))
        ));
    }

    #[test]
    fn grp_forge_wins_with_the_right_guess() {
        let inputs = Adversary::GrpForge.instance(f(7), 0).unwrap();
        let mut wins = 0;
        for k in 0..700 {
            let mut v = verifier(ProtocolId::Grp, &inputs).unwrap();
            let mut p = adversary_grp_forge(&inputs.a, ForgeStrategy::Guess, seeded(k)).unwrap();
            let run = execute(&mut v, &mut p, &mut ChallengeSource::interactive(k + 5000));
            assert!(!run.verdict.is_abort());
            wins += run.verdict.is_accept() as usize;
        }
        // About 1/7 of 700; far from both 0 and 2/7.
        assert!((60..150).contains(&wins), "{wins}");
    }

    #[test]
    fn unit_scale_is_honest() {
        let inputs = Adversary::ScaleD.instance(f(101), 3).unwrap();
        for k in 0..20 {
            let mut v = verifier(ProtocolId::Ldup, &inputs).unwrap();
            let mut p = adversary_scale_d(&inputs.a, 1, ScaleScope::Whole).unwrap();
            let run = execute(&mut v, &mut p, &mut ChallengeSource::interactive(k));
            assert!(run.verdict.is_accept());
        }
    }

    #[test]
    fn crp_shift_needs_an_alternative() {
        let a = DenseMatrix::identity(f(101), 2);
        assert!(adversary_crp_shift(&a, false, seeded(1)).is_err());
        let inputs = Adversary::CrpShift.instance(f(101), 0).unwrap();
        let p = adversary_crp_shift(&inputs.a, false, seeded(1)).unwrap();
        assert_eq!(p.claim(), &[1]);
        let mut v = CrpVerifier::columns(&inputs.a);
        let mut honest = CrpProver::columns(&inputs.a);
        let run = execute(&mut v, &mut honest, &mut ChallengeSource::interactive(1));
        assert_eq!(run.verdict, Verdict::Accept);
    }

    #[test]
    fn ghost_with_triangular_transform_is_honest() {
        let field = f(101);
        let mut rng = seeded(2);
        let a = random_invertible(field, 4, &mut rng);
        let t = DenseMatrix::from_fn(field, 4, 4, |i, j| if j <= i { 1 + (i + j) as u64 } else { 0 });
        let b = a.mul(&t).unwrap();
        let inputs = Inputs::new(a).with_b(b);
        for k in 0..20 {
            let mut v = verifier(ProtocolId::TriEquivLower, &inputs).unwrap();
            let mut p = adversary_triangular_ghost(&inputs.a, inputs.b.as_ref().unwrap(), Side::Lower, seeded(k)).unwrap();
            assert!(execute(&mut v, &mut p, &mut ChallengeSource::interactive(k)).verdict.is_accept());
        }
    }

    #[test]
    fn adversaries_only_get_algebraic_rejections() {
        for adv in Adversary::ALL {
            let inputs = adv.instance(f(101), 7).unwrap();
            for k in 0..50 {
                let mut v = verifier(adv.protocol(), &inputs).unwrap();
                let mut p = adv.prover(&inputs, seeded(k)).unwrap();
                let run = execute(&mut v, &mut p, &mut ChallengeSource::interactive(k));
                assert!(
                    matches!(
                        run.verdict,
                        Verdict::Accept
                            | Verdict::Reject(
                                crate::proto::RejectCause::ProductCheck
                                    | crate::proto::RejectCause::ConjugateCheck
                                    | crate::proto::RejectCause::NullspaceCheck
                            )
                    ),
                    "{adv}: {:?}",
                    run.verdict
                );
            }
        }
    }

    #[test]
    fn measurement_is_reproducible_and_strategy_independent() {
        let a = measure(Adversary::Freivalds, f(7), 400, 11, Execution::Sequential).unwrap();
        let b = measure(Adversary::Freivalds, f(7), 400, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(measure(Adversary::Freivalds, f(7), 0, 1, Execution::Sequential).is_err());
    }
}
