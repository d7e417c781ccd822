use planar_memory::tableau::symplectic_rank;
use planar_memory::{CheckKind, LatticeGeometry, Sector};
use proptest::prelude::*;

fn even_overlap(a: &[usize], b: &[usize]) -> bool {
    a.iter().filter(|q| b.contains(q)).count() % 2 == 0
}

#[test]
fn stars_and_plaquettes_commute_up_to_8x8() {
    for n in 1..=8 {
        for m in 1..=8 {
            let g = LatticeGeometry::new(n, m).unwrap();
            for p in g.checks(CheckKind::Plaquette) {
                for s in g.checks(CheckKind::Star) {
                    assert!(even_overlap(p, s), "{n}x{m}: {p:?} vs {s:?}");
                }
            }
        }
    }
}

#[test]
fn logicals_commute_with_checks_and_anticommute_together() {
    for n in 1..=8 {
        for m in 1..=8 {
            let g = LatticeGeometry::new(n, m).unwrap();
            assert_eq!(g.plaquette_count(), n * (m - 1));
            assert_eq!(g.star_count(), (n - 1) * m);
            let (lz, lx) = (g.logical_z(), g.logical_x());
            for s in g.stabilizers() {
                assert!(s.commutes_with(&lz) && s.commutes_with(&lx), "{n}x{m}: {s}");
            }
            assert!(!lz.commutes_with(&lx));
            let common: Vec<_> = lz.z_support().into_iter().filter(|q| lx.x_support().contains(q)).collect();
            assert_eq!(common, vec![g.black()]);
        }
    }
}

#[test]
fn one_logical_qubit_up_to_6x6() {
    for n in 1..=6 {
        for m in 1..=6 {
            let g = LatticeGeometry::new(n, m).unwrap();
            let stabs = g.stabilizers();
            assert_eq!(symplectic_rank(&stabs), g.qubit_count() - 1, "{n}x{m}");
        }
    }
}

#[test]
fn support_examples() {
    let g = LatticeGeometry::new(3, 3).unwrap();
    assert_eq!(g.plaquette_support(2, 1).unwrap().len(), 4);
    assert_eq!(g.star_support(1, 2).unwrap().len(), 4);
    let g = LatticeGeometry::new(2, 2).unwrap();
    let mut s = g.star_support(1, 1).unwrap().to_vec();
    s.sort();
    let mut want = vec![g.vertical(1, 1), g.vertical(2, 1), g.horizontal(1, 1)];
    want.sort();
    assert_eq!(s, want);
    let g = LatticeGeometry::new(2, 1).unwrap();
    assert_eq!(g.star_support(1, 1).unwrap().len(), 2);
    assert!(LatticeGeometry::new(0, 3).is_err());
    assert!(g.plaquette_index(1, 1).is_err());
}

#[test]
fn homology_examples() {
    let g = LatticeGeometry::new(3, 3).unwrap();
    let zero = vec![false; g.qubit_count()];
    assert!(!g.homology_parity(&zero, Sector::Z).unwrap());
    // A star's support is a closed dual loop for the bit sector.
    let mut loop_ = zero.clone();
    for &q in g.star_support(1, 2).unwrap() {
        loop_[q] = true;
    }
    assert!(!g.homology_parity(&loop_, Sector::Z).unwrap());
    // A plaquette's support is trivial for the phase sector.
    let mut ring = zero.clone();
    for &q in g.plaquette_support(2, 1).unwrap() {
        ring[q] = true;
    }
    assert!(!g.homology_parity(&ring, Sector::X).unwrap());
    // The south row is a nontrivial bit-flip chain crossing the west column once.
    let mut row = zero.clone();
    for j in 1..=3 {
        row[g.vertical(3, j)] = true;
    }
    assert!(g.homology_parity(&row, Sector::Z).unwrap());
    // The west column itself has endpoints inside: rejected.
    let mut col = zero;
    for i in 1..=3 {
        col[g.vertical(i, 1)] = true;
    }
    assert!(g.homology_parity(&col, Sector::Z).is_err());
}

/// Random valid configuration: a random product of check supports of the
/// other type, optionally times a logical representative.
fn valid_config(g: &LatticeGeometry, sector: Sector, picks: &[bool], logical: bool) -> Vec<bool> {
    let generators = match sector {
        Sector::Z => CheckKind::Star,
        Sector::X => CheckKind::Plaquette,
    };
    let mut c = vec![false; g.qubit_count()];
    for (support, &on) in g.checks(generators).iter().zip(picks) {
        if on {
            for &q in support {
                c[q] ^= true;
            }
        }
    }
    if logical {
        // Dual representative: the south row for bit flips, the west
        // column for phase flips.
        let rep = match sector {
            Sector::Z => g.logical_support(Sector::X),
            Sector::X => g.logical_support(Sector::Z),
        };
        for q in rep {
            c[q] ^= true;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homology_invariant_under_stabilizers(
        n in 1usize..=6,
        m in 1usize..=6,
        picks in proptest::collection::vec(any::<bool>(), 64),
        logical in any::<bool>(),
        phase in any::<bool>(),
    ) {
        let g = LatticeGeometry::new(n, m).unwrap();
        let sector = if phase { Sector::X } else { Sector::Z };
        let c = valid_config(&g, sector, &picks, logical);
        let base = g.homology_parity(&c, sector).unwrap();
        prop_assert_eq!(base, logical);
        let generators = match sector {
            Sector::Z => CheckKind::Star,
            Sector::X => CheckKind::Plaquette,
        };
        for support in g.checks(generators) {
            let mut d = c.clone();
            for &q in support {
                d[q] ^= true;
            }
            prop_assert_eq!(g.homology_parity(&d, sector).unwrap(), base);
        }
    }
}
