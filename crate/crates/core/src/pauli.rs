//! Signed multi-qubit Pauli operators.
//!
//! An operator is `(-1)^sign · ⊗_q σ(x_q, z_q)` with `σ(1,0)=X`, `σ(0,1)=Z`,
//! `σ(1,1)=Y`. Only Hermitian operators are representable.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVector,
    z: BitVector,
    negative: bool,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            negative: false,
        }
    }

    pub fn from_bits(x: BitVector, z: BitVector, negative: bool) -> Self {
        assert_eq!(x.len(), z.len());
        Self { x, z, negative }
    }

    /// `kind` on every qubit of `support`. Repeated indices cancel.
    pub fn uniform(n: usize, kind: Pauli, support: impl IntoIterator<Item = usize>) -> Self {
        let mut op = Self::identity(n);
        let (bx, bz) = kind.bits();
        for q in support {
            if bx {
                op.x.flip(q);
            }
            if bz {
                op.z.flip(q);
            }
        }
        op
    }

    pub fn x_on(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self::uniform(n, Pauli::X, support)
    }

    pub fn z_on(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self::uniform(n, Pauli::Z, support)
    }

    pub fn single(n: usize, qubit: usize, kind: Pauli) -> Self {
        Self::uniform(n, kind, [qubit])
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    #[inline]
    pub fn qubit_count(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or −1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVector {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVector {
        &self.z
    }

    pub fn x_support(&self) -> Vec<usize> {
        self.x.ones().collect()
    }

    pub fn z_support(&self) -> Vec<usize> {
        self.z.ones().collect()
    }

    pub fn get(&self, q: usize) -> Option<Pauli> {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn weight(&self) -> usize {
        let mut support = self.x.clone();
        for q in self.z.ones() {
            support.set(q, true);
        }
        support.count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Same Pauli string, ignoring sign.
    pub fn same_string(&self, other: &PauliOperator) -> bool {
        self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)).is_multiple_of(2)
    }

    /// Product `self · other`, defined only for commuting operators (the
    /// product of anticommuting Hermitian Paulis is anti-Hermitian).
    pub fn compose(&self, other: &PauliOperator) -> Option<PauliOperator> {
        if !self.commutes_with(other) {
            return None;
        }
        let mut out = self.clone();
        out.mul_assign_commuting(other);
        Some(out)
    }

    /// In-place `self ← self · other`; caller guarantees commutation.
    pub(crate) fn mul_assign_commuting(&mut self, other: &PauliOperator) {
        let e = self.phase_exponent_of_product(other);
        debug_assert!(e.is_multiple_of(2), "product of anticommuting Paulis");
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.negative ^= other.negative ^ (e == 2);
    }

    /// With `σ(x,z) = i^{x·z} X^x Z^z`, the product of two strings carries an
    /// extra `i^e` relative to the Hermitian form of the result; returns
    /// `e mod 4`.
    pub(crate) fn phase_exponent_of_product(&self, other: &PauliOperator) -> usize {
        let y1 = self.x.and_count(&self.z);
        let y2 = other.x.and_count(&other.z);
        let cross = self.z.and_count(&other.x);
        // |x3 ∧ z3| where x3 = x1⊕x2, z3 = z1⊕z2
        let mut x3 = self.x.clone();
        x3.xor_assign(&other.x);
        let mut z3 = self.z.clone();
        z3.xor_assign(&other.z);
        let y3 = x3.and_count(&z3);
        (y1 + y2 + 2 * cross + 4 * self.qubit_count() - y3) % 4
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.qubit_count() {
            let c = match self.get(q) {
                None => 'I',
                Some(Pauli::X) => 'X',
                Some(Pauli::Y) => 'Y',
                Some(Pauli::Z) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct SparsePauli {
    qubits: usize,
    sign: i8,
    x: Vec<usize>,
    z: Vec<usize>,
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SparsePauli {
            qubits: self.qubit_count(),
            sign: self.sign(),
            x: self.x_support(),
            z: self.z_support(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let sp = SparsePauli::deserialize(d)?;
        if sp.sign != 1 && sp.sign != -1 {
            return Err(D::Error::custom(format!("sign must be ±1, got {}", sp.sign)));
        }
        if let Some(&q) = sp.x.iter().chain(&sp.z).find(|&&q| q >= sp.qubits) {
            return Err(D::Error::custom(format!(
                "qubit {q} outside register of {}",
                sp.qubits
            )));
        }
        let x = BitVector::from_indices(sp.qubits, sp.x);
        let z = BitVector::from_indices(sp.qubits, sp.z);
        Ok(Self::from_bits(x, z, sp.sign < 0))
    }
}
