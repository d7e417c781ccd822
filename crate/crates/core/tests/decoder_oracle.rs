//! Matching decoder against exhaustive pairing, and correction validity.

mod common;

use planar_memory::decoder::{extract_defects, match_defects, DecodingGraph, Defect, SyndromeHistory, TimeBoundary};
use planar_memory::{CheckKind, LatticeGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn matching_weight_equals_exhaustive_search() {
    let (done, bad, first) = common::compare_with_exhaustive(&mut ChaCha8Rng::seed_from_u64(2024), 1000);
    assert_eq!(done, 1000);
    assert_eq!(bad, 0, "{first:?}");
}

#[test]
fn adjacent_pair_and_single_defect_examples() {
    let g = LatticeGeometry::new(3, 3).unwrap();
    let q = g.horizontal(1, 1);
    let [a, b] = g.qubit_checks(CheckKind::Plaquette, q) else { panic!() };
    let d = [Defect { round: 0, check: *a }, Defect { round: 0, check: *b }];
    let out = match_defects(&d, &g, CheckKind::Plaquette, false).unwrap();
    assert_eq!((out.weight, out.correction.clone()), (1, vec![q]));
    // p(2,2) on 3×3 sits against the east boundary.
    let c = g.plaquette_index(2, 2).unwrap();
    let out = match_defects(&[Defect { round: 0, check: c }], &g, CheckKind::Plaquette, false).unwrap();
    assert_eq!(out.correction, vec![g.vertical(2, 3)]);
}

#[test]
fn single_error_gives_two_defects() {
    let g = LatticeGeometry::new(3, 3).unwrap();
    let n = g.qubit_count();
    let mut err = vec![false; n];
    let mut h = SyndromeHistory::new(g.plaquette_count());
    h.push(g.syndrome(&err, CheckKind::Plaquette));
    err[g.horizontal(1, 1)] = true;
    for _ in 0..3 {
        h.push(g.syndrome(&err, CheckKind::Plaquette));
    }
    let d = extract_defects(&h);
    assert_eq!(d.len(), 2);
    assert!(d.iter().all(|x| x.round == 1));
}

#[test]
fn corrections_clear_the_final_syndrome() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(2..=6);
        let g = LatticeGeometry::new(n, m).unwrap();
        let kind = CheckKind::Plaquette;
        let rounds = rng.random_range(1..=5);
        let p = rng.random_range(0.0..0.15);
        let q_noise = rng.random_range(0.0..0.1);
        let mut err = vec![false; g.qubit_count()];
        let mut h = SyndromeHistory::new(g.plaquette_count());
        for t in 0..rounds {
            for e in err.iter_mut() {
                if rng.random_bool(p) {
                    *e ^= true;
                }
            }
            let mut s = g.syndrome(&err, kind);
            // The last round is read perfectly.
            if t + 1 < rounds {
                for b in s.iter_mut() {
                    if rng.random_bool(q_noise) {
                        *b ^= true;
                    }
                }
            }
            h.push(s);
        }
        let mut graph = DecodingGraph::new(&g, kind, rounds, TimeBoundary::Closed, None);
        let c = graph.decode(&extract_defects(&h)).unwrap();
        let residual: Vec<bool> = err.iter().zip(&c).map(|(a, b)| a ^ b).collect();
        assert!(g.syndrome(&residual, kind).iter().all(|&b| !b));
    }
}

#[test]
fn protected_black_is_never_flipped() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..10_000 {
        let n = 1 + i % 7;
        let m = 1 + (i / 7) % 8;
        let g = LatticeGeometry::new(n, m).unwrap();
        let kind = if i % 2 == 0 { CheckKind::Plaquette } else { CheckKind::Star };
        let mut err: Vec<bool> = (0..g.qubit_count()).map(|_| rng.random_bool(0.3)).collect();
        err[g.black()] = false;
        let defects: Vec<Defect> = g
            .syndrome(&err, kind)
            .into_iter()
            .enumerate()
            .filter(|&(_, b)| b)
            .map(|(c, _)| Defect { round: 0, check: c })
            .collect();
        let out = match_defects(&defects, &g, kind, true).unwrap();
        assert!(!out.correction.contains(&g.black()), "{n}x{m} {kind:?}");
    }
}
