//! Space-time matching decoder and logical readout.

use std::collections::VecDeque;

use fusion_blossom::mwpm_solver::{PrimalDualSolver, SolverSerial};
use fusion_blossom::util::{SolverInitializer, SyndromePattern};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{line_support, CheckKind, LatticeGeometry, ReadoutPaths, Sector};

/// Per-round check outcomes (true = −1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeHistory {
    checks: usize,
    rounds: Vec<Vec<bool>>,
}

impl SyndromeHistory {
    pub fn new(checks: usize) -> Self {
        Self {
            checks,
            rounds: Vec::new(),
        }
    }

    pub fn push(&mut self, round: Vec<bool>) {
        assert_eq!(round.len(), self.checks, "round has the wrong number of checks");
        self.rounds.push(round);
    }

    pub fn rounds(&self) -> &[Vec<bool>] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn checks(&self) -> usize {
        self.checks
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Defect {
    pub round: usize,
    pub check: usize,
}

/// Defects are the points where a check's outcome changes between
/// consecutive rounds; the round before the first reads all +1.
pub fn extract_defects(history: &SyndromeHistory) -> Vec<Defect> {
    let mut out = Vec::new();
    let mut prev = vec![false; history.checks];
    for (t, round) in history.rounds.iter().enumerate() {
        for (c, (&now, before)) in round.iter().zip(prev.iter_mut()).enumerate() {
            if now != *before {
                out.push(Defect { round: t, check: c });
            }
            *before = now;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeBoundary {
    /// The last layer is final; defects pair only in space-time or with
    /// spatial boundaries.
    Closed,
    /// Each check may also pair with a boundary one step after the last
    /// layer.
    Open,
}

/// Where a matched defect went.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partner {
    Defect(Defect),
    Boundary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchingOutcome {
    pub pairs: Vec<(Defect, Partner)>,
    /// Total weight in unit edge costs.
    pub weight: u64,
    /// Qubits flipped by the correction.
    pub correction: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct GraphEdge {
    a: usize,
    b: usize,
    qubit: Option<usize>,
}

/// Matching graph over `layers` copies of the checks of one kind, reused
/// across decoding calls.
pub struct DecodingGraph {
    checks: usize,
    layers: usize,
    qubits: usize,
    real: usize,
    edges: Vec<GraphEdge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Per real vertex: whether its component reaches a boundary.
    grounded: Vec<bool>,
    component: Vec<usize>,
    solver: Option<SolverSerial>,
    /// For star graphs, which are built as the plaquette graph of the
    /// transposed lattice: outside check index → inside, inside → outside,
    /// and inside qubit → outside qubit.
    relabel: Option<Relabel>,
}

struct Relabel {
    check_in: Vec<usize>,
    check_out: Vec<usize>,
    qubit_out: Vec<usize>,
}

// Edge weights must be even for the solver. Edges to the open time
// boundary carry a small extra cost, so that among matchings of equal
// length the one explaining defects by qubit errors wins. A matching uses
// at most one such edge per check, and one unit of distance outweighs all
// of them together.
const PENALTY: isize = 2;

impl DecodingGraph {
    /// `layer0_allowed` restricts which qubits may carry spatial edges in
    /// the first layer (all qubits when `None`).
    ///
    /// Equal-weight matchings are resolved by vertex numbering, so star
    /// graphs reuse the plaquette numbering of the transposed lattice; a
    /// lattice and its transpose then make identical choices in the two
    /// sectors.
    pub fn new(
        geom: &LatticeGeometry,
        kind: CheckKind,
        layers: usize,
        time_boundary: TimeBoundary,
        layer0_allowed: Option<&[bool]>,
    ) -> Self {
        if kind == CheckKind::Plaquette {
            return Self::build(geom, kind, layers, time_boundary, layer0_allowed);
        }
        let (t, map) = geom.transposed();
        let mut qubit_out = vec![0; map.len()];
        for (q, &tq) in map.iter().enumerate() {
            qubit_out[tq] = q;
        }
        let plaquette_of: std::collections::HashMap<Vec<usize>, usize> = t
            .checks(CheckKind::Plaquette)
            .iter()
            .enumerate()
            .map(|(c, s)| (sorted(s.iter().copied()), c))
            .collect();
        let check_in: Vec<usize> = geom
            .checks(CheckKind::Star)
            .iter()
            .map(|s| plaquette_of[&sorted(s.iter().map(|&q| map[q]))])
            .collect();
        let mut check_out = vec![0; check_in.len()];
        for (c, &tc) in check_in.iter().enumerate() {
            check_out[tc] = c;
        }
        let mask = layer0_allowed.map(|m| (0..m.len()).map(|tq| m[qubit_out[tq]]).collect::<Vec<_>>());
        let mut g = Self::build(&t, CheckKind::Plaquette, layers, time_boundary, mask.as_deref());
        g.relabel = Some(Relabel {
            check_in,
            check_out,
            qubit_out,
        });
        g
    }

    fn build(
        geom: &LatticeGeometry,
        kind: CheckKind,
        layers: usize,
        time_boundary: TimeBoundary,
        layer0_allowed: Option<&[bool]>,
    ) -> Self {
        assert!(layers >= 1);
        let checks = geom.check_count(kind);
        let real = checks * layers;
        let mut edges = Vec::new();
        let mut next_virtual = real;
        for t in 0..layers {
            for q in 0..geom.qubit_count() {
                if t == 0 && layer0_allowed.is_some_and(|m| !m[q]) {
                    continue;
                }
                match geom.qubit_checks(kind, q) {
                    [a, b] => edges.push(GraphEdge {
                        a: t * checks + a,
                        b: t * checks + b,
                        qubit: Some(q),
                    }),
                    [a] => {
                        edges.push(GraphEdge {
                            a: t * checks + a,
                            b: next_virtual,
                            qubit: Some(q),
                        });
                        next_virtual += 1;
                    }
                    _ => {}
                }
            }
            if t + 1 < layers {
                for c in 0..checks {
                    edges.push(GraphEdge {
                        a: t * checks + c,
                        b: (t + 1) * checks + c,
                        qubit: None,
                    });
                }
            }
        }
        if time_boundary == TimeBoundary::Open {
            for c in 0..checks {
                edges.push(GraphEdge {
                    a: (layers - 1) * checks + c,
                    b: next_virtual,
                    qubit: None,
                });
                next_virtual += 1;
            }
        }
        let vertex_num = next_virtual;
        let mut adjacency = vec![Vec::new(); vertex_num];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
        }
        let (component, grounded) = components(&adjacency, real);
        let solver = (real > 0).then(|| {
            let unit = match time_boundary {
                TimeBoundary::Open => PENALTY * (checks as isize + 1),
                TimeBoundary::Closed => PENALTY,
            };
            let weight = |e: &GraphEdge| {
                if e.qubit.is_none() && e.b >= real {
                    unit + PENALTY
                } else {
                    unit
                }
            };
            let init = SolverInitializer::new(
                vertex_num,
                edges.iter().map(|e| (e.a, e.b, weight(e))).collect(),
                (real..vertex_num).collect(),
            );
            SolverSerial::new(&init)
        });
        Self {
            checks,
            layers,
            qubits: geom.qubit_count(),
            real,
            edges,
            adjacency,
            grounded,
            component,
            solver,
            relabel: None,
        }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    fn vertex(&self, d: Defect) -> usize {
        assert!(d.round < self.layers && d.check < self.checks, "defect {d:?} outside graph");
        let check = self.relabel.as_ref().map_or(d.check, |r| r.check_in[d.check]);
        d.round * self.checks + check
    }

    fn defect_at(&self, v: usize) -> Defect {
        let check = v % self.checks;
        Defect {
            round: v / self.checks,
            check: self.relabel.as_ref().map_or(check, |r| r.check_out[check]),
        }
    }

    fn outside_qubit(&self, q: usize) -> usize {
        self.relabel.as_ref().map_or(q, |r| r.qubit_out[q])
    }

    // Components with no boundary must hold an even number of defects.
    fn check_matchable(&self, vertices: &[usize]) -> Result<()> {
        let mut odd = std::collections::HashMap::new();
        for &v in vertices {
            if !self.grounded[v] {
                *odd.entry(self.component[v]).or_insert(0usize) += 1;
            }
        }
        let bad: usize = odd.values().filter(|&&c| c % 2 == 1).count();
        if bad > 0 {
            return Err(Error::DefectJoining(bad));
        }
        Ok(())
    }

    fn solve(&mut self, defects: &[Defect]) -> Result<Option<Vec<usize>>> {
        let mut vertices: Vec<usize> = defects.iter().map(|&d| self.vertex(d)).collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Ok(None);
        }
        self.check_matchable(&vertices)?;
        let solver = self.solver.as_mut().expect("graph with defects has vertices");
        solver.solve(&SyndromePattern::new_vertices(vertices));
        Ok(Some(solver.subgraph()))
    }

    /// Flip bit per qubit for the minimum-weight correction.
    pub fn decode(&mut self, defects: &[Defect]) -> Result<Vec<bool>> {
        let mut flips = vec![false; self.qubits];
        if let Some(subgraph) = self.solve(defects)? {
            for e in subgraph {
                if let Some(q) = self.edges[e].qubit {
                    flips[self.outside_qubit(q)] ^= true;
                }
            }
            self.solver.as_mut().unwrap().clear();
        }
        Ok(flips)
    }

    /// Decode and report the pairing and its weight.
    pub fn decode_detailed(&mut self, defects: &[Defect]) -> Result<MatchingOutcome> {
        let Some(subgraph) = self.solve(defects)? else {
            return Ok(MatchingOutcome {
                pairs: Vec::new(),
                weight: 0,
                correction: Vec::new(),
            });
        };
        let solver = self.solver.as_mut().unwrap();
        let matching = solver.perfect_matching();
        let mut raw = Vec::new();
        for (a, b) in &matching.peer_matchings {
            raw.push((a.get_representative_vertex(), b.get_representative_vertex()));
        }
        for (a, v) in &matching.virtual_matchings {
            raw.push((a.get_representative_vertex(), *v));
        }
        solver.clear();
        let mut flips = vec![false; self.qubits];
        for e in subgraph {
            if let Some(q) = self.edges[e].qubit {
                flips[self.outside_qubit(q)] ^= true;
            }
        }
        let mut weight = 0u64;
        let mut pairs = Vec::new();
        for (a, b) in raw {
            let d = self.distance(a, b).expect("matched vertices are connected");
            weight += d as u64;
            let partner = if b < self.real {
                Partner::Defect(self.defect_at(b))
            } else {
                Partner::Boundary
            };
            pairs.push((self.defect_at(a), partner));
        }
        Ok(MatchingOutcome {
            pairs,
            weight,
            correction: (0..self.qubits).filter(|&q| flips[q]).collect(),
        })
    }

    /// Unit-cost shortest path length between two vertices, never passing
    /// through a boundary vertex.
    fn distance(&self, from: usize, to: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.adjacency.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return Some(dist[v]);
            }
            if v >= self.real && v != from {
                continue;
            }
            for &(w, _) in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

fn sorted(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.sort_unstable();
    v
}

fn components(adjacency: &[Vec<(usize, usize)>], real: usize) -> (Vec<usize>, Vec<bool>) {
    let mut comp = vec![usize::MAX; adjacency.len()];
    let mut grounded_comp = Vec::new();
    for s in 0..real {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = grounded_comp.len();
        let mut grounded = false;
        comp[s] = id;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if w >= real {
                    grounded = true;
                    continue;
                }
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        grounded_comp.push(grounded);
    }
    let grounded = (0..real).map(|v| grounded_comp[comp[v]]).collect();
    (comp, grounded)
}

/// One-shot matching of a defect set with a closed time boundary.
/// With `protect_black`, the black qubit carries no edge in the first
/// layer, so the correction never flips it there.
pub fn match_defects(
    defects: &[Defect],
    geom: &LatticeGeometry,
    kind: CheckKind,
    protect_black: bool,
) -> Result<MatchingOutcome> {
    let layers = defects.iter().map(|d| d.round + 1).max().unwrap_or(1);
    let mask = protect_black.then(|| {
        let mut m = vec![true; geom.qubit_count()];
        m[geom.black()] = false;
        m
    });
    let mut graph = DecodingGraph::new(geom, kind, layers, TimeBoundary::Closed, mask.as_deref());
    graph.decode_detailed(defects)
}

/// Flip decision from the parity of the logical line, black excluded.
pub fn line_readout(bits: &[bool], geom: &LatticeGeometry, sector: Sector) -> bool {
    line_support(geom, sector)
        .into_iter()
        .fold(false, |acc, q| acc ^ bits[q])
}

/// Flip decision by strict majority over all readout paths; a tie keeps the
/// value.
pub fn multiline_readout(bits: &[bool], paths: &ReadoutPaths) -> bool {
    let (even, odd) = paths.parity_counts(bits);
    odd > even
}
