//! Exhaustive minimum-weight pairing, shared by the decoder suites.

use std::collections::VecDeque;

use planar_memory::decoder::{Defect, DecodingGraph, TimeBoundary};
use planar_memory::{CheckKind, LatticeGeometry};
use rand::seq::index::sample;
use rand::Rng;

/// Check-to-check distances in the spatial graph (checks sharing a qubit are
/// adjacent) and each check's distance to an open boundary.
pub struct Spatial {
    pub dist: Vec<Vec<usize>>,
    pub to_boundary: Vec<usize>,
}

impl Spatial {
    pub fn new(g: &LatticeGeometry, kind: CheckKind) -> Self {
        let c = g.check_count(kind);
        let mut adj = vec![Vec::new(); c];
        let mut edge_to_boundary = vec![false; c];
        for q in 0..g.qubit_count() {
            match g.qubit_checks(kind, q) {
                [a, b] => {
                    adj[*a].push(*b);
                    adj[*b].push(*a);
                }
                [a] => edge_to_boundary[*a] = true,
                _ => {}
            }
        }
        let dist: Vec<Vec<usize>> = (0..c)
            .map(|s| {
                let mut d = vec![usize::MAX; c];
                d[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if d[w] == usize::MAX {
                            d[w] = d[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                d
            })
            .collect();
        let to_boundary = (0..c)
            .map(|s| {
                (0..c)
                    .filter(|&b| edge_to_boundary[b] && dist[s][b] != usize::MAX)
                    .map(|b| dist[s][b] + 1)
                    .min()
                    .unwrap_or(usize::MAX)
            })
            .collect();
        Self { dist, to_boundary }
    }
}

pub fn exhaustive_weight(defects: &[Defect], sp: &Spatial, layers: usize, open: bool) -> usize {
    let n = defects.len();
    let boundary = |d: &Defect| {
        let b = sp.to_boundary[d.check];
        if open {
            b.min(layers - d.round)
        } else {
            b
        }
    };
    let pair = |a: &Defect, b: &Defect| {
        let s = sp.dist[a.check][b.check];
        if s == usize::MAX {
            usize::MAX
        } else {
            s + a.round.abs_diff(b.round)
        }
    };
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1usize..(1 << n) {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut v = best[rest].saturating_add(boundary(&defects[i]));
        for j in (i + 1)..n {
            if rest & (1 << j) != 0 {
                v = v.min(best[rest & !(1 << j)].saturating_add(pair(&defects[i], &defects[j])));
            }
        }
        best[mask] = v;
    }
    best[(1 << n) - 1]
}

/// Random instances on lattices up to 5×5 with up to 5 rounds and 8
/// defects; returns (instances, mismatches, first mismatch).
pub fn compare_with_exhaustive<R: Rng>(rng: &mut R, instances: usize) -> (usize, usize, Option<String>) {
    let (mut done, mut bad, mut first) = (0, 0, None);
    while done < instances {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let kind = if rng.random() { CheckKind::Plaquette } else { CheckKind::Star };
        let g = LatticeGeometry::new(n, m).unwrap();
        let checks = g.check_count(kind);
        if checks == 0 {
            continue;
        }
        let layers = rng.random_range(1..=5);
        let open = rng.random();
        let boundary = if open { TimeBoundary::Open } else { TimeBoundary::Closed };
        let total = checks * layers;
        let k = rng.random_range(1..=8usize.min(total));
        let defects: Vec<Defect> = sample(rng, total, k)
            .into_iter()
            .map(|v| Defect { round: v / checks, check: v % checks })
            .collect();
        let sp = Spatial::new(&g, kind);
        let want = exhaustive_weight(&defects, &sp, layers, open);
        let mut graph = DecodingGraph::new(&g, kind, layers, boundary, None);
        let got = graph.decode_detailed(&defects).unwrap().weight as usize;
        if got != want {
            bad += 1;
            first.get_or_insert_with(|| format!("{n}x{m} {kind:?} layers {layers} open {open}: {got} vs {want}"));
        }
        done += 1;
    }
    (done, bad, first)
}
