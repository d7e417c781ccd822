//! Tableau engine against a dense state-vector simulator.

use num_complex::Complex64 as C;
use planar_memory::protocols::{CorrectionRule, Engine, OutcomeRef, Phase, Preparation, ProtocolSchedule};
use planar_memory::{BasisState, LatticeGeometry, Membership, Pauli, PauliOperator, Tableau};
use proptest::prelude::*;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
struct Dense {
    n: usize,
    amp: Vec<C>,
}

impl Dense {
    fn product(states: &[BasisState]) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = vec![C::new(1.0, 0.0)];
        for &s in states {
            let (a0, a1) = match s {
                BasisState::Zero => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
                BasisState::One => (C::new(0.0, 0.0), C::new(1.0, 0.0)),
                BasisState::Plus => (C::new(h, 0.0), C::new(h, 0.0)),
                BasisState::Minus => (C::new(h, 0.0), C::new(-h, 0.0)),
            };
            let mut next = vec![C::new(0.0, 0.0); amp.len() * 2];
            // Qubit q is bit q of the basis index.
            let bit = amp.len();
            for (k, &a) in amp.iter().enumerate() {
                next[k] += a * a0;
                next[k | bit] += a * a1;
            }
            amp = next;
        }
        Self { n: states.len(), amp }
    }

    fn apply(&self, p: &PauliOperator) -> Vec<C> {
        let mut x = 0usize;
        let mut z = 0usize;
        let mut ys = 0u32;
        for q in 0..self.n {
            match p.get(q) {
                Some(Pauli::X) => x |= 1 << q,
                Some(Pauli::Z) => z |= 1 << q,
                Some(Pauli::Y) => {
                    x |= 1 << q;
                    z |= 1 << q;
                    ys += 1;
                }
                None => {}
            }
        }
        let global = C::i().powu(ys) * if p.is_negative() { -1.0 } else { 1.0 };
        let mut out = vec![C::new(0.0, 0.0); self.amp.len()];
        for (k, &a) in self.amp.iter().enumerate() {
            let sign = if (k & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[k ^ x] += a * global * sign;
        }
        out
    }

    fn expectation(&self, p: &PauliOperator) -> f64 {
        let pv = self.apply(p);
        self.amp.iter().zip(&pv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn project(&mut self, p: &PauliOperator, negative: bool) {
        let pv = self.apply(p);
        let s = if negative { -1.0 } else { 1.0 };
        for (a, b) in self.amp.iter_mut().zip(&pv) {
            *a = (*a + b * s) * 0.5;
        }
        let norm: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-9, "projected onto an impossible outcome");
        for a in &mut self.amp {
            *a /= norm;
        }
    }

    fn stabilized_by(&self, p: &PauliOperator) -> bool {
        (self.expectation(p) - 1.0).abs() < 1e-9
    }
}

fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOperator {
    loop {
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            let kind = match rng.random_range(0..4) {
                0 => continue,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            p = p.compose(&PauliOperator::single(n, q, kind)).unwrap();
        }
        if !p.is_identity() {
            return p.with_sign(rng.random());
        }
    }
}

fn random_product<R: Rng>(rng: &mut R, n: usize) -> Vec<BasisState> {
    (0..n).map(|_| BasisState::ALL[rng.random_range(0..4)]).collect()
}

#[test]
fn agrees_with_state_vector_up_to_4_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        for _ in 0..200 {
            let init = random_product(&mut rng, n);
            let mut t = Tableau::prepare_product(&init);
            let mut d = Dense::product(&init);
            for _ in 0..12 {
                let p = random_pauli(&mut rng, n);
                if rng.random_bool(0.3) {
                    t.apply(&p);
                    d.amp = d.apply(&p);
                    continue;
                }
                let e = d.expectation(&p);
                let member = t.contains(&p);
                match member {
                    Membership::Plus => assert!((e - 1.0).abs() < 1e-9),
                    Membership::Minus => assert!((e + 1.0).abs() < 1e-9),
                    Membership::NotInGroup => assert!(e.abs() < 1e-9, "expectation {e}"),
                }
                let m = t.measure(&p, &mut rng);
                assert_eq!(m.deterministic, member != Membership::NotInGroup);
                if m.deterministic {
                    assert_eq!(m.negative, member == Membership::Minus);
                }
                d.project(&p, m.negative);
                for s in t.stabilizers() {
                    assert!(d.stabilized_by(s), "{s} does not stabilize the dense state");
                }
            }
        }
    }
}

#[test]
fn two_by_two_code_logical_is_forced() {
    let g = LatticeGeometry::new(2, 2).unwrap();
    let n = g.qubit_count();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut t = Tableau::prepare_product(&vec![BasisState::Zero; n]);
    let mut d = Dense::product(&vec![BasisState::Zero; n]);
    for s in g.stabilizers() {
        let m = t.measure(&s, &mut rng);
        d.project(&s, m.negative);
    }
    for s in g.stabilizers() {
        let negative = t.contains(&s) == Membership::Minus;
        assert!(d.stabilized_by(&s.with_sign(negative)));
    }
    // Whatever the check signs, Z_L is fixed at +1 by the |0…0⟩ start.
    let m = t.measure(&g.logical_z(), &mut rng);
    assert!(m.deterministic && !m.negative);
    assert!(d.stabilized_by(&g.logical_z()));
}

#[test]
fn plaquette_sign_tracks_bit_flip() {
    let g = LatticeGeometry::new(3, 3).unwrap();
    let n = g.qubit_count();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut t = Tableau::prepare_product(&vec![BasisState::Zero; n]);
    for s in g.stabilizers() {
        t.measure(&s, &mut rng);
    }
    let before: Vec<_> = g.stabilizers().iter().map(|s| t.contains(s)).collect();
    let q = g.vertical(2, 2);
    t.apply(&PauliOperator::single(n, q, Pauli::X));
    for (s, b) in g.stabilizers().iter().zip(before) {
        let flipped = s.z_support().contains(&q);
        let now = t.contains(s);
        assert_eq!(now != b, flipped, "{s}");
    }
    let product = g
        .checks(planar_memory::CheckKind::Plaquette)
        .iter()
        .flatten()
        .fold(vec![false; n], |mut acc, &q| {
            acc[q] ^= true;
            acc
        });
    let op = PauliOperator::z_on(n, (0..n).filter(|&q| product[q]));
    assert_ne!(t.contains(&op), Membership::NotInGroup);
}

#[test]
fn x_measurement_on_zero_is_fair() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shots = 10_000;
    let mut minus = 0;
    for _ in 0..shots {
        let mut t = Tableau::prepare_product(&[BasisState::Zero]);
        minus += t.measure(&PauliOperator::x_on(1, [0]), &mut rng).negative as usize;
    }
    let f = minus as f64 / shots as f64;
    let sigma = (0.25 / shots as f64).sqrt();
    assert!((f - 0.5).abs() < 3.0 * sigma, "frequency {f}");
}

#[test]
fn apply_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let mut t = Tableau::prepare_product(&random_product(&mut rng, n));
        for _ in 0..5 {
            let p = random_pauli(&mut rng, n);
            t.measure(&p, &mut rng);
        }
        let before = t.clone();
        let p = random_pauli(&mut rng, n);
        t.apply(&p);
        t.apply(&p);
        assert!(t.same_state(&before));
    }
}

fn teleport_schedule() -> ProtocolSchedule {
    let n = 3;
    let zz = |a, b| PauliOperator::z_on(n, [a, b]);
    let xx = |a, b| PauliOperator::x_on(n, [a, b]);
    ProtocolSchedule {
        name: "three-qubit-teleport".into(),
        qubits: n,
        geometry: None,
        phases: vec![
            Phase::Measure { operators: vec![xx(0, 1)] },
            Phase::Correct {
                rules: vec![CorrectionRule::OnOddParity {
                    outcomes: vec![OutcomeRef { phase: 0, index: 0 }],
                    correction: zz(1, 2),
                }],
            },
            Phase::Measure { operators: vec![zz(0, 1)] },
            Phase::Correct {
                rules: vec![CorrectionRule::OnOddParity {
                    outcomes: vec![OutcomeRef { phase: 2, index: 0 }],
                    correction: xx(1, 2),
                }],
            },
        ],
    }
}

fn bell_23<E: Engine>(e: &mut E, rng: &mut dyn RngCore) {
    let n = 3;
    let prep = ProtocolSchedule {
        name: "bell".into(),
        qubits: n,
        geometry: None,
        phases: vec![
            Phase::Prepare {
                qubits: vec![
                    Preparation { qubit: 1, state: BasisState::Plus },
                    Preparation { qubit: 2, state: BasisState::Plus },
                ],
            },
            Phase::Measure {
                operators: vec![PauliOperator::z_on(n, [1, 2])],
            },
            Phase::Correct {
                rules: vec![CorrectionRule::OnOddParity {
                    outcomes: vec![OutcomeRef { phase: 1, index: 0 }],
                    correction: PauliOperator::x_on(n, [2]),
                }],
            },
        ],
    };
    prep.execute(e, &[0, 1, 2], rng).unwrap();
}

#[test]
fn three_qubit_teleportation_on_tableau() {
    let sched = teleport_schedule();
    for input in BasisState::ALL {
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Tableau::prepare_product(&[input, BasisState::Zero, BasisState::Zero]);
            bell_23(&mut t, &mut rng);
            sched.execute(&mut t, &[0, 1, 2], &mut rng).unwrap();
            let (kind, negative) = input.stabilizer();
            let want = PauliOperator::single(3, 2, kind).with_sign(negative);
            assert_eq!(t.contains(&want), Membership::Plus, "{input:?} seed {seed}");
            assert_eq!(t.contains(&PauliOperator::x_on(3, [0, 1])), Membership::Plus);
            assert_eq!(t.contains(&PauliOperator::z_on(3, [0, 1])), Membership::Plus);
        }
    }
}

/// Dense engine so the same schedule can teleport a non-stabilizer state.
struct DenseEngine(Dense);

impl Engine for DenseEngine {
    fn qubit_count(&self) -> usize {
        self.0.n
    }

    fn prepare(&mut self, qubit: usize, state: BasisState, rng: &mut dyn RngCore) {
        let (kind, negative) = state.stabilizer();
        let p = PauliOperator::single(self.0.n, qubit, kind);
        let m = self.measure(&p, rng);
        if m.negative != negative {
            let flip = if kind == Pauli::Z { Pauli::X } else { Pauli::Z };
            self.correct(&PauliOperator::single(self.0.n, qubit, flip));
        }
    }

    fn measure(&mut self, op: &PauliOperator, rng: &mut dyn RngCore) -> planar_memory::Measurement {
        let e = self.0.expectation(op);
        let p_minus = ((1.0 - e) / 2.0).clamp(0.0, 1.0);
        let negative = rng.random_bool(p_minus);
        self.0.project(op, negative);
        planar_memory::Measurement {
            negative,
            deterministic: p_minus < 1e-12 || p_minus > 1.0 - 1e-12,
        }
    }

    fn correct(&mut self, op: &PauliOperator) {
        self.0.amp = self.0.apply(op);
    }
}

#[test]
fn three_qubit_teleportation_of_arbitrary_state() {
    let sched = teleport_schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let (a, b) = (
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        let mut e = DenseEngine(Dense::product(&[BasisState::Zero; 3]));
        e.0.amp[0] = a;
        e.0.amp[1] = b;
        bell_23(&mut e, &mut rng);
        sched.execute(&mut e, &[0, 1, 2], &mut rng).unwrap();
        // Expected: Bell pair on (0,1) times a|0⟩+b|1⟩ on qubit 2.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut want = vec![C::new(0.0, 0.0); 8];
        for (k01, amp01) in [(0b00, h), (0b11, h)] {
            want[k01] += a * amp01;
            want[k01 | 0b100] += b * amp01;
        }
        let overlap: C = want.iter().zip(&e.0.amp).map(|(w, v)| w.conj() * v).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9, "fidelity {}", overlap.norm_sqr());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn repeated_measurement_is_idempotent(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::prepare_product(&random_product(&mut rng, n));
        for _ in 0..n {
            let p = random_pauli(&mut rng, n);
            t.measure(&p, &mut rng);
        }
        let p = random_pauli(&mut rng, n);
        let first = t.measure(&p, &mut rng);
        let second = t.measure(&p, &mut rng);
        prop_assert!(second.deterministic);
        prop_assert_eq!(first.negative, second.negative);
        prop_assert!(t.check_invariants().is_ok());
    }
}
