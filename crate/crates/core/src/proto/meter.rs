use super::{Body, Direction};

/// Communication and verifier work of one run. Counters only grow.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostMeter {
    pub field_p2v: u64,
    pub field_v2p: u64,
    pub ints_p2v: u64,
    pub ints_v2p: u64,
    /// Field operations performed by the verifier, matrix-vector products
    /// included.
    pub verifier_field_ops: u64,
    /// Matrix-vector products with the input, the unit `μ(A)`.
    pub matvecs: u64,
}

impl CostMeter {
    pub fn record(&mut self, direction: Direction, body: &Body) {
        let (field, ints) = (body.field_elements(), body.integers());
        match direction {
            Direction::ProverToVerifier => {
                self.field_p2v += field;
                self.ints_p2v += ints;
            }
            Direction::VerifierToProver => {
                self.field_v2p += field;
                self.ints_v2p += ints;
            }
        }
    }

    /// One product with an `m x n` matrix: `2mn - m` operations.
    pub fn charge_matvec(&mut self, m: usize, n: usize) {
        self.matvecs += 1;
        self.charge_dense(m, n);
    }

    /// The operations of an `m x n` product without counting a `μ`.
    pub fn charge_dense(&mut self, m: usize, n: usize) {
        self.verifier_field_ops += (2 * m * n).saturating_sub(m) as u64;
    }

    pub fn charge_ops(&mut self, ops: usize) {
        self.verifier_field_ops += ops as u64;
    }

    /// A dot product of length `n`.
    pub fn charge_dot(&mut self, n: usize) {
        self.charge_ops((2 * n).saturating_sub(1));
    }

    pub fn field_total(&self) -> u64 {
        self.field_p2v + self.field_v2p
    }

    pub fn ints_total(&self) -> u64 {
        self.ints_p2v + self.ints_v2p
    }

    /// Field elements plus integers, both directions.
    pub fn communication(&self) -> u64 {
        self.field_total() + self.ints_total()
    }

    pub fn absorb(&mut self, other: &CostMeter) {
        self.field_p2v += other.field_p2v;
        self.field_v2p += other.field_v2p;
        self.ints_p2v += other.ints_p2v;
        self.ints_v2p += other.ints_v2p;
        self.verifier_field_ops += other.verifier_field_ops;
        self.matvecs += other.matvecs;
    }
}
