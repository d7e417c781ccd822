//! Measurement-only manipulation of planar codes: growing and shrinking a
//! patch, one-shot encoding and decoding of an unknown qubit, and the
//! teleportation form of the encoder.
//!
//! Protocols are data ([`ProtocolSchedule`]) executed on an [`Engine`]. The
//! schedules refer to qubits of one geometry; [`CodeState`] embeds that
//! geometry into a fixed register anchored at the south-west corner so that
//! a patch can grow and shrink in place.

use std::collections::VecDeque;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CheckKind, LatticeGeometry, Region, TriangleSplit};
use crate::pauli::{Pauli, PauliOperator};
use crate::tableau::{BasisState, Measurement, Membership, Tableau};

/// Something that can run a schedule.
pub trait Engine {
    fn qubit_count(&self) -> usize;
    fn prepare(&mut self, qubit: usize, state: BasisState, rng: &mut dyn RngCore);
    fn measure(&mut self, op: &PauliOperator, rng: &mut dyn RngCore) -> Measurement;
    /// Conditional correction. Engines may track it classically.
    fn correct(&mut self, op: &PauliOperator);
}

impl Engine for Tableau {
    fn qubit_count(&self) -> usize {
        Tableau::qubit_count(self)
    }

    fn prepare(&mut self, qubit: usize, state: BasisState, rng: &mut dyn RngCore) {
        self.reset(qubit, state, rng);
    }

    fn measure(&mut self, op: &PauliOperator, rng: &mut dyn RngCore) -> Measurement {
        Tableau::measure(self, op, rng)
    }

    fn correct(&mut self, op: &PauliOperator) {
        self.apply(op);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preparation {
    pub qubit: usize,
    pub state: BasisState,
}

/// Reference to outcome `index` of the measurement phase `phase`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRef {
    pub phase: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CorrectionRule {
    /// Apply `correction` iff an odd number of the referenced outcomes are −1.
    OnOddParity {
        outcomes: Vec<OutcomeRef>,
        correction: PauliOperator,
    },
    /// The checks measured in `phase` (operator `i` is check `checks[i]` of
    /// `kind`) are paired up through `allowed` qubits, or joined to the
    /// boundary, and `flip` is applied along the joining chains.
    JoinDefects {
        phase: usize,
        kind: CheckKind,
        checks: Vec<usize>,
        flip: Pauli,
        allowed: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Phase {
    Prepare { qubits: Vec<Preparation> },
    Measure { operators: Vec<PauliOperator> },
    Correct { rules: Vec<CorrectionRule> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub name: String,
    pub qubits: usize,
    /// (rows, cols) of the lattice the qubit indices refer to, if any.
    pub geometry: Option<(usize, usize)>,
    pub phases: Vec<Phase>,
}

/// What happened while executing a schedule, in schedule-local indices.
#[derive(Clone, Debug, Default)]
pub struct ExecutionRecord {
    pub outcomes: Vec<Vec<Measurement>>,
    pub corrections: Vec<PauliOperator>,
}

impl ExecutionRecord {
    pub fn outcome(&self, r: OutcomeRef) -> Measurement {
        self.outcomes[r.phase][r.index]
    }

    /// Product of all corrections, sign dropped.
    pub fn total_correction(&self, n: usize) -> PauliOperator {
        let mut x = crate::bits::BitVector::zeros(n);
        let mut z = crate::bits::BitVector::zeros(n);
        for c in &self.corrections {
            x.xor_assign(c.x_bits());
            z.xor_assign(c.z_bits());
        }
        PauliOperator::from_bits(x, z, false)
    }
}

impl ProtocolSchedule {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sched: Self = serde_json::from_str(s).map_err(|e| Error::Schedule(e.to_string()))?;
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Schedule(m));
        let geom = match self.geometry {
            Some((r, c)) => {
                let g = LatticeGeometry::new(r, c)?;
                if g.qubit_count() != self.qubits {
                    return bad(format!(
                        "{r}x{c} lattice has {} qubits, schedule declares {}",
                        g.qubit_count(),
                        self.qubits
                    ));
                }
                Some(g)
            }
            None => None,
        };
        let check_op = |p: &PauliOperator| {
            if p.qubit_count() != self.qubits {
                Err(Error::Schedule(format!(
                    "operator on {} qubits in a {}-qubit schedule",
                    p.qubit_count(),
                    self.qubits
                )))
            } else {
                Ok(())
            }
        };
        for (pi, phase) in self.phases.iter().enumerate() {
            match phase {
                Phase::Prepare { qubits } => {
                    if let Some(p) = qubits.iter().find(|p| p.qubit >= self.qubits) {
                        return bad(format!("phase {pi}: qubit {} out of range", p.qubit));
                    }
                }
                Phase::Measure { operators } => {
                    for (a, p) in operators.iter().enumerate() {
                        check_op(p)?;
                        if operators[..a].iter().any(|q| !q.commutes_with(p)) {
                            return bad(format!("phase {pi}: operator {a} does not commute"));
                        }
                    }
                }
                Phase::Correct { rules } => {
                    for rule in rules {
                        let measured = |phase: usize| match self.phases.get(phase) {
                            Some(Phase::Measure { operators }) if phase < pi => Ok(operators.len()),
                            _ => Err(Error::Schedule(format!(
                                "phase {pi}: reference to phase {phase}, which is not an earlier measurement"
                            ))),
                        };
                        match rule {
                            CorrectionRule::OnOddParity {
                                outcomes,
                                correction,
                            } => {
                                check_op(correction)?;
                                for r in outcomes {
                                    if r.index >= measured(r.phase)? {
                                        return bad(format!("phase {pi}: outcome index out of range"));
                                    }
                                }
                            }
                            CorrectionRule::JoinDefects {
                                phase,
                                kind,
                                checks,
                                allowed,
                                ..
                            } => {
                                let Some(g) = &geom else {
                                    return bad(format!("phase {pi}: defect joining needs a lattice"));
                                };
                                if checks.len() != measured(*phase)? {
                                    return bad(format!("phase {pi}: check list length mismatch"));
                                }
                                if checks.iter().any(|&c| c >= g.check_count(*kind)) {
                                    return bad(format!("phase {pi}: unknown {}", kind.name()));
                                }
                                if allowed.iter().any(|&q| q >= self.qubits) {
                                    return bad(format!("phase {pi}: allowed qubit out of range"));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Run on `engine`, where local qubit `q` is engine qubit `map[q]`.
    pub fn execute<E: Engine + ?Sized>(
        &self,
        engine: &mut E,
        map: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<ExecutionRecord> {
        assert_eq!(map.len(), self.qubits);
        let geom = match self.geometry {
            Some((r, c)) => Some(LatticeGeometry::new(r, c)?),
            None => None,
        };
        let n = engine.qubit_count();
        let mut rec = ExecutionRecord::default();
        for phase in &self.phases {
            let mut measured = Vec::new();
            match phase {
                Phase::Prepare { qubits } => {
                    for p in qubits {
                        engine.prepare(map[p.qubit], p.state, rng);
                    }
                }
                Phase::Measure { operators } => {
                    for op in operators {
                        measured.push(engine.measure(&embed(op, map, n), rng));
                    }
                }
                Phase::Correct { rules } => {
                    for rule in rules {
                        let correction = match rule {
                            CorrectionRule::OnOddParity {
                                outcomes,
                                correction,
                            } => {
                                let odd = outcomes
                                    .iter()
                                    .fold(false, |acc, &r| acc ^ rec.outcome(r).negative);
                                odd.then(|| correction.clone())
                            }
                            CorrectionRule::JoinDefects {
                                phase,
                                kind,
                                checks,
                                flip,
                                allowed,
                            } => {
                                let g = geom.as_ref().ok_or_else(|| {
                                    Error::Schedule("defect joining needs a lattice".into())
                                })?;
                                let defects: Vec<usize> = checks
                                    .iter()
                                    .zip(&rec.outcomes[*phase])
                                    .filter(|(_, m)| m.negative)
                                    .map(|(&c, _)| c)
                                    .collect();
                                let mut mask = vec![false; g.qubit_count()];
                                for &q in allowed {
                                    mask[q] = true;
                                }
                                let chain = join_defects(g, *kind, &defects, &mask)?;
                                (!chain.is_empty())
                                    .then(|| PauliOperator::uniform(self.qubits, *flip, chain))
                            }
                        };
                        if let Some(c) = correction {
                            engine.correct(&embed(&c, map, n));
                            rec.corrections.push(c);
                        }
                    }
                }
            }
            rec.outcomes.push(measured);
        }
        Ok(rec)
    }
}

fn embed(op: &PauliOperator, map: &[usize], n: usize) -> PauliOperator {
    let x = crate::bits::BitVector::from_indices(n, op.x_bits().ones().map(|q| map[q]));
    let z = crate::bits::BitVector::from_indices(n, op.z_bits().ones().map(|q| map[q]));
    PauliOperator::from_bits(x, z, op.is_negative())
}

/// A chain of `allowed` qubits whose boundary (in checks of `kind`) is
/// exactly `defects`. Defects are paired greedily by graph distance through
/// allowed qubits; a defect left without a reachable partner is joined to
/// the nearest boundary.
pub fn join_defects(
    geom: &LatticeGeometry,
    kind: CheckKind,
    defects: &[usize],
    allowed: &[bool],
) -> Result<Vec<usize>> {
    let nodes = geom.check_count(kind);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    let mut exits: Vec<Option<usize>> = vec![None; nodes];
    for q in (0..geom.qubit_count()).filter(|&q| allowed[q]) {
        match geom.qubit_checks(kind, q) {
            [a, b] => {
                adj[*a].push((*b, q));
                adj[*b].push((*a, q));
            }
            [a] => {
                exits[*a].get_or_insert(q);
            }
            _ => {}
        }
    }
    let mut remaining: Vec<usize> = defects.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut chain = vec![false; geom.qubit_count()];
    let walk = |parent: &[Option<(usize, usize)>], mut at: usize, chain: &mut [bool]| {
        while let Some((prev, q)) = parent[at] {
            chain[q] ^= true;
            at = prev;
        }
    };
    while !remaining.is_empty() {
        // Closest remaining pair.
        let mut best: Option<(usize, usize, usize, Vec<Option<(usize, usize)>>)> = None;
        for (ai, &a) in remaining.iter().enumerate() {
            let (dist, parent) = bfs(&adj, a);
            for &b in &remaining[ai + 1..] {
                if let Some(d) = dist[b] {
                    if best.as_ref().is_none_or(|x| d < x.0) {
                        best = Some((d, a, b, parent.clone()));
                    }
                }
            }
        }
        if let Some((_, a, b, parent)) = best {
            walk(&parent, b, &mut chain);
            remaining.retain(|&d| d != a && d != b);
            continue;
        }
        // No pairs left: every remaining defect goes to its nearest exit.
        for &a in &remaining {
            let (dist, parent) = bfs(&adj, a);
            let target = (0..nodes)
                .filter(|&v| exits[v].is_some() && dist[v].is_some())
                .min_by_key(|&v| (dist[v], v))
                .ok_or(Error::DefectJoining(remaining.len()))?;
            walk(&parent, target, &mut chain);
            chain[exits[target].unwrap()] ^= true;
        }
        break;
    }
    Ok((0..chain.len()).filter(|&q| chain[q]).collect())
}

type Parent = Option<(usize, usize)>;

fn bfs(adj: &[Vec<(usize, usize)>], from: usize) -> (Vec<Option<usize>>, Vec<Parent>) {
    let mut dist = vec![None; adj.len()];
    let mut parent = vec![None; adj.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &(w, q) in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                parent[w] = Some((v, q));
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CorrectionMode {
    /// Record corrections classically and fold them into later readouts.
    #[default]
    Frame,
    /// Apply corrections to the state.
    Physical,
}

/// A planar code living in a fixed register of `capacity` size.
///
/// The active code occupies the south-west corner of the register; qubits
/// outside it sit in product states.
#[derive(Clone, Debug)]
pub struct CodeState {
    tableau: Tableau,
    capacity: LatticeGeometry,
    geometry: LatticeGeometry,
    frame: PauliOperator,
    mode: CorrectionMode,
    sign_fault: bool,
}

impl CodeState {
    pub fn new(capacity: (usize, usize), size: (usize, usize), mode: CorrectionMode) -> Result<Self> {
        let capacity = LatticeGeometry::new(capacity.0, capacity.1)?;
        let geometry = LatticeGeometry::new(size.0, size.1)?;
        check_fits(&capacity, &geometry)?;
        let n = capacity.qubit_count();
        Ok(Self {
            tableau: Tableau::prepare_product(&vec![BasisState::Zero; n]),
            capacity,
            geometry,
            frame: PauliOperator::identity(n),
            mode,
            sign_fault: false,
        })
    }

    /// Negative control for the verification suite: every reported
    /// measurement outcome is inverted.
    #[doc(hidden)]
    pub fn with_sign_fault(mut self) -> Self {
        self.sign_fault = true;
        self
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn capacity(&self) -> &LatticeGeometry {
        &self.capacity
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn mode(&self) -> CorrectionMode {
        self.mode
    }

    /// Register index of each qubit of `geom` placed in the south-west corner.
    pub fn embedding(&self, geom: &LatticeGeometry) -> Vec<usize> {
        let shift = self.capacity.rows() - geom.rows();
        (0..geom.qubit_count())
            .map(|q| match geom.site(q) {
                crate::Site::Vertical { row, col } => self.capacity.vertical(row + shift, col),
                crate::Site::Horizontal { row, col } => self.capacity.horizontal(row + shift, col),
            })
            .collect()
    }

    /// Register index of the active code's black qubit.
    pub fn black(&self) -> usize {
        self.embedding(&self.geometry)[self.geometry.black()]
    }

    /// Membership of an operator on the active code's qubits, with pending
    /// frame corrections folded in.
    pub fn value(&self, op: &PauliOperator) -> Membership {
        let map = self.embedding(&self.geometry);
        self.register_value(&embed(op, &map, self.capacity.qubit_count()))
    }

    pub fn register_value(&self, op: &PauliOperator) -> Membership {
        let m = self.tableau.contains(op);
        if self.frame.commutes_with(op) {
            return m;
        }
        match m {
            Membership::Plus => Membership::Minus,
            Membership::Minus => Membership::Plus,
            Membership::NotInGroup => Membership::NotInGroup,
        }
    }

    pub fn in_code(&self) -> bool {
        self.geometry
            .stabilizers()
            .iter()
            .all(|s| self.value(s) == Membership::Plus)
    }

    pub fn logical_z(&self) -> Membership {
        self.value(&self.geometry.logical_z())
    }

    pub fn logical_x(&self) -> Membership {
        self.value(&self.geometry.logical_x())
    }

    /// Run a schedule written for `geom` (which must fit the register).
    pub fn run(
        &mut self,
        schedule: &ProtocolSchedule,
        geom: &LatticeGeometry,
        rng: &mut dyn RngCore,
    ) -> Result<ExecutionRecord> {
        check_fits(&self.capacity, geom)?;
        let map = self.embedding(geom);
        schedule.execute(self, &map, rng)
    }

    /// Fold the frame into the state.
    pub fn flush_frame(&mut self) {
        if !self.frame.is_identity() {
            let f = std::mem::replace(&mut self.frame, PauliOperator::identity(self.capacity.qubit_count()));
            self.tableau.apply(&f);
        }
    }
}

fn check_fits(capacity: &LatticeGeometry, geom: &LatticeGeometry) -> Result<()> {
    if geom.rows() > capacity.rows() || geom.cols() > capacity.cols() {
        return Err(Error::Capacity {
            rows: geom.rows(),
            cols: geom.cols(),
            cap_rows: capacity.rows(),
            cap_cols: capacity.cols(),
        });
    }
    Ok(())
}

impl Engine for CodeState {
    fn qubit_count(&self) -> usize {
        self.capacity.qubit_count()
    }

    fn prepare(&mut self, qubit: usize, state: BasisState, rng: &mut dyn RngCore) {
        self.tableau.reset(qubit, state, rng);
        let n = self.capacity.qubit_count();
        let mut x = self.frame.x_bits().clone();
        let mut z = self.frame.z_bits().clone();
        x.set(qubit, false);
        z.set(qubit, false);
        self.frame = PauliOperator::from_bits(x, z, false);
        debug_assert_eq!(self.frame.qubit_count(), n);
    }

    fn measure(&mut self, op: &PauliOperator, rng: &mut dyn RngCore) -> Measurement {
        let mut m = self.tableau.measure(op, rng);
        m.negative ^= !self.frame.commutes_with(op);
        m.negative ^= self.sign_fault;
        m
    }

    fn correct(&mut self, op: &PauliOperator) {
        match self.mode {
            CorrectionMode::Frame => {
                let mut x = self.frame.x_bits().clone();
                let mut z = self.frame.z_bits().clone();
                x.xor_assign(op.x_bits());
                z.xor_assign(op.z_bits());
                self.frame = PauliOperator::from_bits(x, z, false);
            }
            CorrectionMode::Physical => self.tableau.apply(op),
        }
    }
}

fn check_operators(geom: &LatticeGeometry, kind: CheckKind, checks: &[usize]) -> Vec<PauliOperator> {
    checks.iter().map(|&c| geom.check_operator(kind, c)).collect()
}

/// Checks of `kind` whose support meets `region`.
fn checks_touching(geom: &LatticeGeometry, split: &TriangleSplit, kind: CheckKind, region: Region) -> Vec<usize> {
    (0..geom.check_count(kind))
        .filter(|&c| geom.checks(kind)[c].iter().any(|&q| split.region(q) == region))
        .collect()
}

fn triangle_preparations(geom: &LatticeGeometry, split: &TriangleSplit) -> Vec<Preparation> {
    (0..geom.qubit_count())
        .filter_map(|q| {
            let state = match split.region(q) {
                Region::Lower => BasisState::Plus,
                Region::Upper => BasisState::Zero,
                Region::Black => return None,
            };
            Some(Preparation { qubit: q, state })
        })
        .collect()
}

fn phase_index(phases: &[Phase]) -> usize {
    phases.len()
}

/// One-shot encoder: lower triangle in |+⟩, upper triangle in |0⟩, measure
/// every star touching the upper triangle and every plaquette touching the
/// lower one, then remove the defects inside their triangles. The black
/// qubit is expected to already hold the input.
pub fn one_shot_encode_schedule(geom: &LatticeGeometry, split: &TriangleSplit) -> ProtocolSchedule {
    let stars = checks_touching(geom, split, CheckKind::Star, Region::Upper);
    let plaqs = checks_touching(geom, split, CheckKind::Plaquette, Region::Lower);
    let mut phases = vec![Phase::Prepare {
        qubits: triangle_preparations(geom, split),
    }];
    let star_phase = phase_index(&phases);
    phases.push(Phase::Measure {
        operators: check_operators(geom, CheckKind::Star, &stars),
    });
    let plaq_phase = phase_index(&phases);
    phases.push(Phase::Measure {
        operators: check_operators(geom, CheckKind::Plaquette, &plaqs),
    });
    phases.push(Phase::Correct {
        rules: vec![
            CorrectionRule::JoinDefects {
                phase: star_phase,
                kind: CheckKind::Star,
                checks: stars,
                flip: Pauli::Z,
                allowed: split.upper(),
            },
            CorrectionRule::JoinDefects {
                phase: plaq_phase,
                kind: CheckKind::Plaquette,
                checks: plaqs,
                flip: Pauli::X,
                allowed: split.lower(),
            },
        ],
    });
    ProtocolSchedule {
        name: "one-shot-encode".into(),
        qubits: geom.qubit_count(),
        geometry: Some((geom.rows(), geom.cols())),
        phases,
    }
}

/// Encoder written as teleportation: first every syndrome away from the
/// black qubit, then the plaquette and the star touching it, each followed
/// by the flip string that removes its defect.
pub fn teleport_encode_schedule(geom: &LatticeGeometry, split: &TriangleSplit) -> Result<ProtocolSchedule> {
    let (n, m) = (geom.rows(), geom.cols());
    if n < 2 || m < 2 {
        return Err(Error::Schedule(format!("teleport encoder needs at least 2x2, got {n}x{m}")));
    }
    let black_star = geom.star_index(n - 1, 1)?;
    let black_plaq = geom.plaquette_index(n, 1)?;
    let stars: Vec<usize> = checks_touching(geom, split, CheckKind::Star, Region::Upper)
        .into_iter()
        .filter(|&s| s != black_star)
        .collect();
    let plaqs: Vec<usize> = checks_touching(geom, split, CheckKind::Plaquette, Region::Lower)
        .into_iter()
        .filter(|&p| p != black_plaq)
        .collect();
    let nq = geom.qubit_count();
    let mut phases = vec![
        Phase::Prepare {
            qubits: triangle_preparations(geom, split),
        },
        Phase::Measure {
            operators: check_operators(geom, CheckKind::Star, &stars),
        },
        Phase::Measure {
            operators: check_operators(geom, CheckKind::Plaquette, &plaqs),
        },
    ];
    phases.push(Phase::Correct {
        rules: vec![
            CorrectionRule::JoinDefects {
                phase: 1,
                kind: CheckKind::Star,
                checks: stars,
                flip: Pauli::Z,
                allowed: split.upper(),
            },
            CorrectionRule::JoinDefects {
                phase: 2,
                kind: CheckKind::Plaquette,
                checks: plaqs,
                flip: Pauli::X,
                allowed: split.lower(),
            },
        ],
    });
    phases.push(Phase::Measure {
        operators: vec![geom.check_operator(CheckKind::Plaquette, black_plaq)],
    });
    phases.push(Phase::Correct {
        rules: vec![CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 4, index: 0 }],
            correction: PauliOperator::x_on(nq, (2..=m).map(|j| geom.vertical(n, j))),
        }],
    });
    phases.push(Phase::Measure {
        operators: vec![geom.check_operator(CheckKind::Star, black_star)],
    });
    phases.push(Phase::Correct {
        rules: vec![CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 6, index: 0 }],
            correction: PauliOperator::z_on(nq, (1..n).map(|i| geom.vertical(i, 1))),
        }],
    });
    Ok(ProtocolSchedule {
        name: "teleport-encode".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases,
    })
}

/// Measure the south row (minus black) in X and the west column (minus
/// black) in Z; flip the black qubit's phase or bit on odd parity.
pub fn one_shot_decode_schedule(geom: &LatticeGeometry) -> ProtocolSchedule {
    let (n, m) = (geom.rows(), geom.cols());
    let nq = geom.qubit_count();
    let black = geom.black();
    let row: Vec<usize> = (2..=m).map(|j| geom.vertical(n, j)).collect();
    let col: Vec<usize> = (1..n).map(|i| geom.vertical(i, 1)).collect();
    let operators = row
        .iter()
        .map(|&q| PauliOperator::single(nq, q, Pauli::X))
        .chain(col.iter().map(|&q| PauliOperator::single(nq, q, Pauli::Z)))
        .collect();
    let refs = |range: std::ops::Range<usize>| {
        range.map(|index| OutcomeRef { phase: 0, index }).collect::<Vec<_>>()
    };
    ProtocolSchedule {
        name: "one-shot-decode".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases: vec![
            Phase::Measure { operators },
            Phase::Correct {
                rules: vec![
                    CorrectionRule::OnOddParity {
                        outcomes: refs(0..row.len()),
                        correction: PauliOperator::single(nq, black, Pauli::Z),
                    },
                    CorrectionRule::OnOddParity {
                        outcomes: refs(row.len()..row.len() + col.len()),
                        correction: PauliOperator::single(nq, black, Pauli::X),
                    },
                ],
            },
        ],
    }
}

/// Grow `geom` by one column on the east (smooth) side. Written for the
/// grown lattice.
pub fn append_smooth_column_schedule(geom: &LatticeGeometry) -> Result<ProtocolSchedule> {
    let (n, m) = (geom.rows(), geom.cols() + 1);
    let g = LatticeGeometry::new(n, m)?;
    let nq = g.qubit_count();
    let mut prep: Vec<Preparation> = (1..=n)
        .map(|i| Preparation {
            qubit: g.vertical(i, m),
            state: BasisState::Plus,
        })
        .collect();
    prep.extend((1..n).map(|i| Preparation {
        qubit: g.horizontal(i, m - 1),
        state: BasisState::Plus,
    }));
    let plaqs: Vec<usize> = (1..=n).map(|i| g.plaquette_index(i, m - 1).unwrap()).collect();
    let rules = (1..=n)
        .map(|i| CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 1, index: i - 1 }],
            correction: PauliOperator::single(nq, g.vertical(i, m), Pauli::X),
        })
        .collect();
    Ok(ProtocolSchedule {
        name: "append-smooth-column".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases: vec![
            Phase::Prepare { qubits: prep },
            Phase::Measure {
                operators: check_operators(&g, CheckKind::Plaquette, &plaqs),
            },
            Phase::Correct { rules },
        ],
    })
}

/// Shrink `geom` by its east column. Written for the original lattice.
pub fn remove_smooth_column_schedule(geom: &LatticeGeometry) -> Result<ProtocolSchedule> {
    let (n, m) = (geom.rows(), geom.cols());
    if m < 2 {
        return Err(Error::Schedule("cannot remove the only column".into()));
    }
    let nq = geom.qubit_count();
    let mut operators: Vec<PauliOperator> = (1..=n)
        .map(|i| PauliOperator::single(nq, geom.vertical(i, m), Pauli::X))
        .collect();
    operators.extend((1..n).map(|i| PauliOperator::single(nq, geom.horizontal(i, m - 1), Pauli::X)));
    let rules = (1..=n)
        .map(|i| CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 0, index: i - 1 }],
            correction: PauliOperator::single(nq, geom.vertical(i, m - 1), Pauli::Z),
        })
        .collect();
    Ok(ProtocolSchedule {
        name: "remove-smooth-column".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases: vec![Phase::Measure { operators }, Phase::Correct { rules }],
    })
}

/// Grow `geom` by one row on the north (rough) side. Written for the grown
/// lattice, whose row 1 is the new row.
pub fn append_rough_row_schedule(geom: &LatticeGeometry) -> Result<ProtocolSchedule> {
    let (n, m) = (geom.rows() + 1, geom.cols());
    let g = LatticeGeometry::new(n, m)?;
    let nq = g.qubit_count();
    let mut prep: Vec<Preparation> = (1..=m)
        .map(|j| Preparation {
            qubit: g.vertical(1, j),
            state: BasisState::Zero,
        })
        .collect();
    prep.extend((1..m).map(|j| Preparation {
        qubit: g.horizontal(1, j),
        state: BasisState::Zero,
    }));
    let stars: Vec<usize> = (1..=m).map(|j| g.star_index(1, j).unwrap()).collect();
    let rules = (1..=m)
        .map(|j| CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 1, index: j - 1 }],
            correction: PauliOperator::single(nq, g.vertical(1, j), Pauli::Z),
        })
        .collect();
    Ok(ProtocolSchedule {
        name: "append-rough-row".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases: vec![
            Phase::Prepare { qubits: prep },
            Phase::Measure {
                operators: check_operators(&g, CheckKind::Star, &stars),
            },
            Phase::Correct { rules },
        ],
    })
}

/// Shrink `geom` by its north row. Written for the original lattice.
pub fn remove_rough_row_schedule(geom: &LatticeGeometry) -> Result<ProtocolSchedule> {
    let (n, m) = (geom.rows(), geom.cols());
    if n < 2 {
        return Err(Error::Schedule("cannot remove the only row".into()));
    }
    let nq = geom.qubit_count();
    let mut operators: Vec<PauliOperator> = (1..=m)
        .map(|j| PauliOperator::single(nq, geom.vertical(1, j), Pauli::Z))
        .collect();
    operators.extend((1..m).map(|j| PauliOperator::single(nq, geom.horizontal(1, j), Pauli::Z)));
    let rules = (1..=m)
        .map(|j| CorrectionRule::OnOddParity {
            outcomes: vec![OutcomeRef { phase: 0, index: j - 1 }],
            correction: PauliOperator::single(nq, geom.vertical(2, j), Pauli::X),
        })
        .collect();
    Ok(ProtocolSchedule {
        name: "remove-rough-row".into(),
        qubits: nq,
        geometry: Some((n, m)),
        phases: vec![Phase::Measure { operators }, Phase::Correct { rules }],
    })
}

fn resize(state: &mut CodeState, rows: usize, cols: usize) -> Result<()> {
    let g = LatticeGeometry::new(rows, cols)?;
    check_fits(&state.capacity, &g)?;
    state.geometry = g;
    Ok(())
}

pub fn append_smooth_column(state: &mut CodeState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let sched = append_smooth_column_schedule(&state.geometry)?;
    let g = LatticeGeometry::new(state.geometry.rows(), state.geometry.cols() + 1)?;
    let rec = state.run(&sched, &g, rng)?;
    resize(state, g.rows(), g.cols())?;
    Ok(rec)
}

pub fn remove_smooth_column(state: &mut CodeState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let sched = remove_smooth_column_schedule(&state.geometry)?;
    let g = state.geometry.clone();
    let rec = state.run(&sched, &g, rng)?;
    resize(state, g.rows(), g.cols() - 1)?;
    Ok(rec)
}

pub fn append_rough_row(state: &mut CodeState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let sched = append_rough_row_schedule(&state.geometry)?;
    let g = LatticeGeometry::new(state.geometry.rows() + 1, state.geometry.cols())?;
    let rec = state.run(&sched, &g, rng)?;
    resize(state, g.rows(), g.cols())?;
    Ok(rec)
}

pub fn remove_rough_row(state: &mut CodeState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let sched = remove_rough_row_schedule(&state.geometry)?;
    let g = state.geometry.clone();
    let rec = state.run(&sched, &g, rng)?;
    resize(state, g.rows() - 1, g.cols())?;
    Ok(rec)
}

/// Put `input` on the black qubit of the active code and encode it.
pub fn one_shot_encode(state: &mut CodeState, input: BasisState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let g = state.geometry.clone();
    let split = TriangleSplit::diagonal(&g);
    let black = state.black();
    state.prepare(black, input, rng);
    state.run(&one_shot_encode_schedule(&g, &split), &g, rng)
}

pub fn teleport_encode(state: &mut CodeState, input: BasisState, rng: &mut dyn RngCore) -> Result<ExecutionRecord> {
    let g = state.geometry.clone();
    let split = TriangleSplit::diagonal(&g);
    let black = state.black();
    state.prepare(black, input, rng);
    state.run(&teleport_encode_schedule(&g, &split)?, &g, rng)
}

/// State of the black qubit after decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodedQubit {
    pub z: Membership,
    pub x: Membership,
}

impl DecodedQubit {
    /// Whether the qubit is exactly in `state`.
    pub fn is(self, state: BasisState) -> bool {
        let (kind, negative) = state.stabilizer();
        let m = if kind == Pauli::Z { self.z } else { self.x };
        m == if negative { Membership::Minus } else { Membership::Plus }
    }
}

pub fn one_shot_decode(state: &mut CodeState, rng: &mut dyn RngCore) -> Result<DecodedQubit> {
    let g = state.geometry.clone();
    state.run(&one_shot_decode_schedule(&g), &g, rng)?;
    let n = state.capacity.qubit_count();
    let black = state.black();
    Ok(DecodedQubit {
        z: state.register_value(&PauliOperator::single(n, black, Pauli::Z)),
        x: state.register_value(&PauliOperator::single(n, black, Pauli::X)),
    })
}

/// Eigenvalue of the logical operator matching `input`'s basis.
pub fn logical_value(state: &CodeState, input: BasisState) -> Membership {
    match input.stabilizer().0 {
        Pauli::Z => state.logical_z(),
        _ => state.logical_x(),
    }
}

pub fn expected_membership(input: BasisState) -> Membership {
    if input.stabilizer().1 {
        Membership::Minus
    } else {
        Membership::Plus
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_qubit_encode_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for input in BasisState::ALL {
            let mut s = CodeState::new((1, 1), (1, 1), CorrectionMode::Frame).unwrap();
            one_shot_encode(&mut s, input, &mut rng).unwrap();
            assert_eq!(logical_value(&s, input), expected_membership(input));
            assert!(one_shot_decode(&mut s, &mut rng).unwrap().is(input));
        }
    }

    #[test]
    fn three_by_three_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..20 {
            let mut rng2 = ChaCha8Rng::seed_from_u64(seed);
            let mut s = CodeState::new((3, 3), (3, 3), CorrectionMode::Physical).unwrap();
            one_shot_encode(&mut s, BasisState::Zero, &mut rng2).unwrap();
            assert!(s.in_code());
            assert_eq!(s.logical_z(), Membership::Plus);
            assert!(one_shot_decode(&mut s, &mut rng).unwrap().is(BasisState::Zero));
        }
    }

    #[test]
    fn append_to_single_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = CodeState::new((1, 2), (1, 1), CorrectionMode::Physical).unwrap();
        one_shot_encode(&mut s, BasisState::Zero, &mut rng).unwrap();
        append_smooth_column(&mut s, &mut rng).unwrap();
        let zz = PauliOperator::z_on(2, [0, 1]);
        assert_eq!(s.value(&zz), Membership::Plus);
        assert_eq!(s.logical_z(), Membership::Plus);
    }

    #[test]
    fn join_defects_has_requested_boundary() {
        let g = LatticeGeometry::new(4, 5).unwrap();
        let all = vec![true; g.qubit_count()];
        let chain = join_defects(&g, CheckKind::Plaquette, &[0, 5, 9], &all).unwrap();
        let mut config = vec![false; g.qubit_count()];
        for q in chain {
            config[q] = true;
        }
        let syn = g.syndrome(&config, CheckKind::Plaquette);
        let hit: Vec<usize> = (0..syn.len()).filter(|&c| syn[c]).collect();
        assert_eq!(hit, vec![0, 5, 9]);
    }
}
