//! Stabilizer tableau with destabilizers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::pauli::{Pauli, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    Zero,
    One,
    Plus,
    Minus,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [
        BasisState::Zero,
        BasisState::One,
        BasisState::Plus,
        BasisState::Minus,
    ];

    /// The single-qubit Pauli stabilizing this state, and whether its sign
    /// is negative.
    pub fn stabilizer(self) -> (Pauli, bool) {
        match self {
            BasisState::Zero => (Pauli::Z, false),
            BasisState::One => (Pauli::Z, true),
            BasisState::Plus => (Pauli::X, false),
            BasisState::Minus => (Pauli::X, true),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// true for the −1 eigenvalue.
    pub negative: bool,
    pub deterministic: bool,
}

impl Measurement {
    pub fn value(self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Plus,
    Minus,
    NotInGroup,
}

#[derive(Clone, Debug)]
pub struct Tableau {
    destabilizers: Vec<PauliOperator>,
    stabilizers: Vec<PauliOperator>,
}

// Exhaustive invariant checks are quadratic; only run them on the small
// registers used by the verification suites.
const CHECK_LIMIT: usize = 32;

impl Tableau {
    pub fn prepare_product(assignment: &[BasisState]) -> Self {
        let n = assignment.len();
        let mut destabilizers = Vec::with_capacity(n);
        let mut stabilizers = Vec::with_capacity(n);
        for (q, &s) in assignment.iter().enumerate() {
            let (kind, negative) = s.stabilizer();
            let dual = if kind == Pauli::Z { Pauli::X } else { Pauli::Z };
            stabilizers.push(PauliOperator::single(n, q, kind).with_sign(negative));
            destabilizers.push(PauliOperator::single(n, q, dual));
        }
        let t = Self {
            destabilizers,
            stabilizers,
        };
        t.debug_check();
        t
    }

    pub fn qubit_count(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliOperator] {
        &self.destabilizers
    }

    /// Conjugate the state by `p`.
    pub fn apply(&mut self, p: &PauliOperator) {
        for row in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            if !row.commutes_with(p) {
                *row = row.clone().negated();
            }
        }
        self.debug_check();
    }

    /// Projective measurement of a Hermitian Pauli; the outcome refers to the
    /// eigenvalue of `p` including its sign.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R) -> Measurement {
        assert_eq!(p.qubit_count(), self.qubit_count());
        let n = self.qubit_count();
        let pivot = (0..n).find(|&k| !self.stabilizers[k].commutes_with(p));
        let Some(k) = pivot else {
            let forced = self.forced_sign(p);
            return Measurement {
                negative: forced ^ p.is_negative(),
                deterministic: true,
            };
        };
        let pivot_row = self.stabilizers[k].clone();
        for i in 0..n {
            if i != k && !self.stabilizers[i].commutes_with(p) {
                self.stabilizers[i].mul_assign_commuting(&pivot_row);
            }
            if i != k && !self.destabilizers[i].commutes_with(p) {
                self.destabilizers[i].mul_assign_commuting(&pivot_row);
            }
        }
        let negative: bool = rng.random();
        self.destabilizers[k] = pivot_row;
        self.stabilizers[k] = p.clone().with_sign(p.is_negative() ^ negative);
        self.debug_check();
        Measurement {
            negative,
            deterministic: false,
        }
    }

    /// Sign with which `p`'s Pauli string belongs to the stabilizer group.
    pub fn contains(&self, p: &PauliOperator) -> Membership {
        if self.stabilizers.iter().any(|s| !s.commutes_with(p)) {
            return Membership::NotInGroup;
        }
        if self.forced_sign(p) ^ p.is_negative() {
            Membership::Minus
        } else {
            Membership::Plus
        }
    }

    // Sign (true = −) of the group element with the same string as `p`,
    // which must commute with every stabilizer. For a full-rank tableau the
    // element is the product of stabilizers whose destabilizer partner
    // anticommutes with `p`.
    fn forced_sign(&self, p: &PauliOperator) -> bool {
        let n = self.qubit_count();
        let mut acc = PauliOperator::identity(n);
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes_with(p) {
                acc.mul_assign_commuting(s);
            }
        }
        debug_assert!(acc.same_string(p), "commuting operator outside the group");
        acc.is_negative()
    }

    /// Reset `q` to a basis state by measuring and flipping.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, state: BasisState, rng: &mut R) {
        let n = self.qubit_count();
        let (kind, negative) = state.stabilizer();
        let m = self.measure(&PauliOperator::single(n, q, kind), rng);
        if m.negative != negative {
            let flip = if kind == Pauli::Z { Pauli::X } else { Pauli::Z };
            self.apply(&PauliOperator::single(n, q, flip));
        }
    }

    /// Equal stabilizer groups, signs included.
    pub fn same_state(&self, other: &Tableau) -> bool {
        self.qubit_count() == other.qubit_count()
            && self
                .stabilizers
                .iter()
                .all(|s| other.contains(s) == Membership::Plus)
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.qubit_count();
        for i in 0..n {
            for j in 0..n {
                if i < j && !self.stabilizers[i].commutes_with(&self.stabilizers[j]) {
                    return Err(format!("stabilizers {i} and {j} anticommute"));
                }
                let anti = !self.destabilizers[i].commutes_with(&self.stabilizers[j]);
                if anti != (i == j) {
                    return Err(format!("destabilizer {i} vs stabilizer {j} pairing broken"));
                }
            }
        }
        if symplectic_rank(&self.stabilizers) != n {
            return Err("stabilizer generators are dependent".into());
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        if cfg!(debug_assertions) && self.qubit_count() <= CHECK_LIMIT {
            if let Err(e) = self.check_invariants() {
                panic!("tableau invariant violated: {e}");
            }
        }
    }
}

/// GF(2) rank of the binary symplectic matrix [x | z] of `ops`.
pub fn symplectic_rank(ops: &[PauliOperator]) -> usize {
    let Some(first) = ops.first() else {
        return 0;
    };
    let n = first.qubit_count();
    let mut rows: Vec<BitVector> = ops
        .iter()
        .map(|p| {
            let mut r = BitVector::zeros(2 * n);
            for q in p.x_bits().ones() {
                r.set(q, true);
            }
            for q in p.z_bits().ones() {
                r.set(n + q, true);
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..2 * n {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Whether `p`'s Pauli string lies in the span of `ops`, sign ignored.
pub fn in_span(ops: &[PauliOperator], p: &PauliOperator) -> bool {
    let mut with = ops.to_vec();
    with.push(p.clone());
    symplectic_rank(&with) == symplectic_rank(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_preparation() {
        let t = Tableau::prepare_product(&[BasisState::Plus, BasisState::One]);
        assert_eq!(t.stabilizers()[0].to_string(), "+XI");
        assert_eq!(t.stabilizers()[1].to_string(), "-IZ");
    }

    #[test]
    fn forced_and_random_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = Tableau::prepare_product(&[BasisState::Zero]);
        let m = t.measure(&PauliOperator::z_on(1, [0]), &mut rng);
        assert!(m.deterministic && !m.negative);
        let m = t.measure(&PauliOperator::x_on(1, [0]), &mut rng);
        assert!(!m.deterministic);
        let again = t.measure(&PauliOperator::x_on(1, [0]), &mut rng);
        assert!(again.deterministic);
        assert_eq!(again.negative, m.negative);
    }

    #[test]
    fn apply_flips_sign() {
        let mut t = Tableau::prepare_product(&[BasisState::Zero]);
        t.apply(&PauliOperator::x_on(1, [0]));
        assert_eq!(t.stabilizers()[0].to_string(), "-Z");
        t.apply(&PauliOperator::x_on(1, [0]));
        assert_eq!(t.stabilizers()[0].to_string(), "+Z");
    }

    #[test]
    fn membership() {
        let t = Tableau::prepare_product(&[BasisState::Zero, BasisState::Zero]);
        assert_eq!(t.contains(&PauliOperator::z_on(2, [0, 1])), Membership::Plus);
        assert_eq!(t.contains(&PauliOperator::x_on(2, [0])), Membership::NotInGroup);
        assert_eq!(
            t.contains(&PauliOperator::z_on(2, [0]).negated()),
            Membership::Minus
        );
    }

    #[test]
    fn all_plus_parity_is_forced() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = Tableau::prepare_product(&[BasisState::Plus; 3]);
        let m = t.measure(&PauliOperator::x_on(3, [0, 1, 2]), &mut rng);
        assert!(m.deterministic && !m.negative);
    }
}
