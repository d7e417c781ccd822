//! Planar-code geometry.
//!
//! Rows run top (1) to bottom (N), columns left (1) to right (M). Qubits sit
//! on vertical edges v(i,j), 1≤i≤N, 1≤j≤M, and horizontal edges h(i,j),
//! 1≤i≤N−1, 1≤j≤M−1. Plaquette p(i,j) (1≤i≤N, 1≤j≤M−1) acts with Z on
//! v(i,j), v(i,j+1), h(i−1,j), h(i,j); star s(i,j) (1≤i≤N−1, 1≤j≤M) acts
//! with X on v(i,j), v(i+1,j), h(i,j−1), h(i,j). Missing edges are dropped
//! at the border.
//!
//! Z_L lives on the west column v(·,1), X_L on the south row v(N,·); they
//! meet only at the black qubit v(N,1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    Vertical { row: usize, col: usize },
    Horizontal { row: usize, col: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckKind {
    /// Z-type face operators; detect bit flips.
    Plaquette,
    /// X-type vertex operators; detect phase flips.
    Star,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Plaquette => "plaquette",
            CheckKind::Star => "star",
        }
    }
}

/// Which logical observable a configuration of flips is read against.
///
/// `Z`: bit-flip configurations, checked by plaquettes, read on the Z_L
/// support. `X`: phase-flip configurations, checked by stars, read on the
/// X_L support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Z,
    X,
}

impl Sector {
    pub fn check_kind(self) -> CheckKind {
        match self {
            Sector::Z => CheckKind::Plaquette,
            Sector::X => CheckKind::Star,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeGeometry {
    rows: usize,
    cols: usize,
    plaquettes: Vec<Vec<usize>>,
    stars: Vec<Vec<usize>>,
    qubit_plaquettes: Vec<Vec<usize>>,
    qubit_stars: Vec<Vec<usize>>,
}

impl LatticeGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyLattice { rows, cols });
        }
        let mut g = Self {
            rows,
            cols,
            plaquettes: Vec::new(),
            stars: Vec::new(),
            qubit_plaquettes: Vec::new(),
            qubit_stars: Vec::new(),
        };
        let n = g.qubit_count();
        g.qubit_plaquettes = vec![Vec::new(); n];
        g.qubit_stars = vec![Vec::new(); n];
        for i in 1..=rows {
            for j in 1..cols {
                let mut s = vec![g.vertical(i, j), g.vertical(i, j + 1)];
                if i > 1 {
                    s.push(g.horizontal(i - 1, j));
                }
                if i < rows {
                    s.push(g.horizontal(i, j));
                }
                s.sort_unstable();
                let idx = g.plaquettes.len();
                for &q in &s {
                    g.qubit_plaquettes[q].push(idx);
                }
                g.plaquettes.push(s);
            }
        }
        for i in 1..rows {
            for j in 1..=cols {
                let mut s = vec![g.vertical(i, j), g.vertical(i + 1, j)];
                if j > 1 {
                    s.push(g.horizontal(i, j - 1));
                }
                if j < cols {
                    s.push(g.horizontal(i, j));
                }
                s.sort_unstable();
                let idx = g.stars.len();
                for &q in &s {
                    g.qubit_stars[q].push(idx);
                }
                g.stars.push(s);
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn qubit_count(&self) -> usize {
        self.rows * self.cols + (self.rows - 1) * (self.cols - 1)
    }

    #[inline]
    pub fn vertical(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.rows).contains(&i) && (1..=self.cols).contains(&j));
        (i - 1) * self.cols + (j - 1)
    }

    #[inline]
    pub fn horizontal(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..self.rows).contains(&i) && (1..self.cols).contains(&j));
        self.rows * self.cols + (i - 1) * (self.cols - 1) + (j - 1)
    }

    pub fn site(&self, q: usize) -> Site {
        let nv = self.rows * self.cols;
        if q < nv {
            Site::Vertical {
                row: q / self.cols + 1,
                col: q % self.cols + 1,
            }
        } else {
            let r = q - nv;
            Site::Horizontal {
                row: r / (self.cols - 1) + 1,
                col: r % (self.cols - 1) + 1,
            }
        }
    }

    pub fn qubit_at(&self, site: Site) -> Option<usize> {
        match site {
            Site::Vertical { row, col }
                if (1..=self.rows).contains(&row) && (1..=self.cols).contains(&col) =>
            {
                Some(self.vertical(row, col))
            }
            Site::Horizontal { row, col }
                if (1..self.rows).contains(&row) && (1..self.cols).contains(&col) =>
            {
                Some(self.horizontal(row, col))
            }
            _ => None,
        }
    }

    #[inline]
    pub fn black(&self) -> usize {
        self.vertical(self.rows, 1)
    }

    pub fn plaquette_count(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn star_count(&self) -> usize {
        self.stars.len()
    }

    pub fn check_count(&self, kind: CheckKind) -> usize {
        self.checks(kind).len()
    }

    pub fn plaquette_index(&self, i: usize, j: usize) -> Result<usize> {
        if (1..=self.rows).contains(&i) && (1..self.cols).contains(&j) {
            Ok((i - 1) * (self.cols - 1) + (j - 1))
        } else {
            Err(self.bad_index("plaquette", i, j))
        }
    }

    pub fn star_index(&self, i: usize, j: usize) -> Result<usize> {
        if (1..self.rows).contains(&i) && (1..=self.cols).contains(&j) {
            Ok((i - 1) * self.cols + (j - 1))
        } else {
            Err(self.bad_index("star", i, j))
        }
    }

    fn bad_index(&self, kind: &'static str, row: usize, col: usize) -> Error {
        Error::InvalidIndex {
            kind,
            row,
            col,
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn plaquette_support(&self, i: usize, j: usize) -> Result<&[usize]> {
        Ok(&self.plaquettes[self.plaquette_index(i, j)?])
    }

    pub fn star_support(&self, i: usize, j: usize) -> Result<&[usize]> {
        Ok(&self.stars[self.star_index(i, j)?])
    }

    pub fn checks(&self, kind: CheckKind) -> &[Vec<usize>] {
        match kind {
            CheckKind::Plaquette => &self.plaquettes,
            CheckKind::Star => &self.stars,
        }
    }

    /// Checks of `kind` whose support contains `q` (one or two; zero only on
    /// degenerate strips).
    pub fn qubit_checks(&self, kind: CheckKind, q: usize) -> &[usize] {
        match kind {
            CheckKind::Plaquette => &self.qubit_plaquettes[q],
            CheckKind::Star => &self.qubit_stars[q],
        }
    }

    /// Grid coordinates (i,j) of a check.
    pub fn check_coords(&self, kind: CheckKind, c: usize) -> (usize, usize) {
        match kind {
            CheckKind::Plaquette => (c / (self.cols - 1) + 1, c % (self.cols - 1) + 1),
            CheckKind::Star => (c / self.cols + 1, c % self.cols + 1),
        }
    }

    /// Number of dual (plaquettes) or primal (stars) edges from the check to
    /// the nearest boundary that absorbs its strings.
    pub fn boundary_distance(&self, kind: CheckKind, c: usize) -> usize {
        let (i, j) = self.check_coords(kind, c);
        match kind {
            CheckKind::Plaquette => j.min(self.cols - j),
            CheckKind::Star => i.min(self.rows - i),
        }
    }

    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        let n = self.qubit_count();
        self.stars
            .iter()
            .map(|s| PauliOperator::x_on(n, s.iter().copied()))
            .chain(
                self.plaquettes
                    .iter()
                    .map(|p| PauliOperator::z_on(n, p.iter().copied())),
            )
            .collect()
    }

    pub fn check_operator(&self, kind: CheckKind, c: usize) -> PauliOperator {
        let n = self.qubit_count();
        let s = self.checks(kind)[c].iter().copied();
        match kind {
            CheckKind::Plaquette => PauliOperator::z_on(n, s),
            CheckKind::Star => PauliOperator::x_on(n, s),
        }
    }

    /// West column.
    pub fn z_logical_support(&self) -> Vec<usize> {
        (1..=self.rows).map(|i| self.vertical(i, 1)).collect()
    }

    /// South row.
    pub fn x_logical_support(&self) -> Vec<usize> {
        (1..=self.cols).map(|j| self.vertical(self.rows, j)).collect()
    }

    pub fn logical_support(&self, sector: Sector) -> Vec<usize> {
        match sector {
            Sector::Z => self.z_logical_support(),
            Sector::X => self.x_logical_support(),
        }
    }

    pub fn logical_z(&self) -> PauliOperator {
        PauliOperator::z_on(self.qubit_count(), self.z_logical_support())
    }

    pub fn logical_x(&self) -> PauliOperator {
        PauliOperator::x_on(self.qubit_count(), self.x_logical_support())
    }

    /// Outcome bit (true = −1) of every check of `kind` for a flip
    /// configuration of the opposite type.
    pub fn syndrome(&self, config: &[bool], kind: CheckKind) -> Vec<bool> {
        self.checks(kind)
            .iter()
            .map(|s| s.iter().fold(false, |acc, &q| acc ^ config[q]))
            .collect()
    }

    /// Homology class of a closed flip configuration: its parity on the
    /// logical support of `sector`.
    pub fn homology_parity(&self, config: &[bool], sector: Sector) -> Result<bool> {
        assert_eq!(config.len(), self.qubit_count());
        let kind = sector.check_kind();
        if self.syndrome(config, kind).iter().any(|&b| b) {
            return Err(Error::NontrivialSyndrome(kind.name()));
        }
        Ok(self
            .logical_support(sector)
            .iter()
            .fold(false, |acc, &q| acc ^ config[q]))
    }

    /// The mirror-image lattice (M×N) exchanging stars and plaquettes, with
    /// the image of each qubit index. Maps v(i,j) ↦ v(M+1−j, N+1−i) and
    /// h(i,j) ↦ h(M−j, N−i); the black qubit is fixed and Z_L ↔ X_L.
    pub fn transposed(&self) -> (LatticeGeometry, Vec<usize>) {
        let t = LatticeGeometry::new(self.cols, self.rows).expect("nonempty");
        let map = (0..self.qubit_count())
            .map(|q| match self.site(q) {
                Site::Vertical { row, col } => {
                    t.vertical(self.cols + 1 - col, self.rows + 1 - row)
                }
                Site::Horizontal { row, col } => t.horizontal(self.cols - col, self.rows - row),
            })
            .collect();
        (t, map)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// South-east of the diagonal; prepared in |+⟩ during encoding.
    Lower,
    /// North-west of the diagonal; prepared in |0⟩ during encoding.
    Upper,
    Black,
}

/// Partition of the qubits by the diagonal through the black qubit.
///
/// Each qubit gets normalized coordinates X ∈ [0,1] (west→east) and
/// Y ∈ [0,1] (south→north) with the black qubit at the origin. A qubit is
/// `Lower` iff X > Y and `Upper` iff X < Y. Ties go `Upper` when N ≤ M and
/// `Lower` otherwise, so that on non-square lattices the split commutes with
/// [`LatticeGeometry::transposed`] (upper ↔ lower).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleSplit {
    region: Vec<Region>,
    black: usize,
}

impl TriangleSplit {
    pub fn diagonal(geom: &LatticeGeometry) -> Self {
        let (n, m) = (geom.rows() as i64, geom.cols() as i64);
        // Coordinates as fractions num/den with doubled numerators so that
        // horizontal midpoints stay integral.
        let frac = |num: i64, den: i64| if den == 0 { (0, 1) } else { (num, den) };
        let black = geom.black();
        let region = (0..geom.qubit_count())
            .map(|q| {
                if q == black {
                    return Region::Black;
                }
                let ((xn, xd), (yn, yd)) = match geom.site(q) {
                    Site::Vertical { row, col } => (
                        frac(2 * (col as i64 - 1), 2 * (m - 1)),
                        frac(2 * (n - row as i64), 2 * (n - 1)),
                    ),
                    Site::Horizontal { row, col } => (
                        frac(2 * col as i64 - 1, 2 * (m - 1)),
                        frac(2 * (n - row as i64) - 1, 2 * (n - 1)),
                    ),
                };
                match (xn * yd).cmp(&(yn * xd)) {
                    std::cmp::Ordering::Greater => Region::Lower,
                    std::cmp::Ordering::Less => Region::Upper,
                    std::cmp::Ordering::Equal if n <= m => Region::Upper,
                    std::cmp::Ordering::Equal => Region::Lower,
                }
            })
            .collect();
        Self { region, black }
    }

    #[inline]
    pub fn region(&self, q: usize) -> Region {
        self.region[q]
    }

    #[inline]
    pub fn black(&self) -> usize {
        self.black
    }

    pub fn members(&self, region: Region) -> Vec<usize> {
        (0..self.region.len())
            .filter(|&q| self.region[q] == region)
            .collect()
    }

    pub fn lower(&self) -> Vec<usize> {
        self.members(Region::Lower)
    }

    pub fn upper(&self) -> Vec<usize> {
        self.members(Region::Upper)
    }
}

/// Monotone readout paths ending at the black qubit, as a DAG.
///
/// For `Sector::X` these are the dual paths entering from the east edge and
/// stepping west or south through `Lower` qubits (X_L representatives). For
/// `Sector::Z` they are primal paths entering from the north edge and stepping
/// south or west through `Upper` qubits (Z_L representatives). Horizontal
/// qubits crossed on the way are part of the path.
#[derive(Clone, Debug)]
pub struct ReadoutPaths {
    black: usize,
    qubits: usize,
    /// Node visiting order compatible with the step direction.
    topo: Vec<usize>,
    entries: Vec<(usize, usize)>,
    steps: Vec<Vec<(usize, usize)>>,
    exit: Option<usize>,
}

impl ReadoutPaths {
    pub fn new(geom: &LatticeGeometry, split: &TriangleSplit, sector: Sector) -> Self {
        let (n, m) = (geom.rows(), geom.cols());
        let black = geom.black();
        let want = match sector {
            Sector::X => Region::Lower,
            Sector::Z => Region::Upper,
        };
        let ok = |q: usize| split.region(q) == want;
        // Logical representatives run through the checks of the other type.
        let nodes = match sector {
            Sector::X => geom.plaquette_count(),
            Sector::Z => geom.star_count(),
        };
        let mut steps = vec![Vec::new(); nodes];
        let mut entries = Vec::new();
        let mut topo = Vec::with_capacity(nodes);
        let exit;
        match sector {
            Sector::X => {
                if m == 1 {
                    exit = None;
                } else {
                    let p = |i, j| geom.plaquette_index(i, j).unwrap();
                    for i in 1..=n {
                        if ok(geom.vertical(i, m)) {
                            entries.push((p(i, m - 1), geom.vertical(i, m)));
                        }
                        for j in (1..m).rev() {
                            topo.push(p(i, j));
                            if j >= 2 && ok(geom.vertical(i, j)) {
                                steps[p(i, j)].push((p(i, j - 1), geom.vertical(i, j)));
                            }
                            if i < n && ok(geom.horizontal(i, j)) {
                                steps[p(i, j)].push((p(i + 1, j), geom.horizontal(i, j)));
                            }
                        }
                    }
                    exit = Some(p(n, 1));
                }
            }
            Sector::Z => {
                if n == 1 {
                    exit = None;
                } else {
                    let s = |i, j| geom.star_index(i, j).unwrap();
                    for r in 1..n {
                        for c in (1..=m).rev() {
                            if r == 1 && ok(geom.vertical(1, c)) {
                                entries.push((s(1, c), geom.vertical(1, c)));
                            }
                            topo.push(s(r, c));
                            if r + 1 < n && ok(geom.vertical(r + 1, c)) {
                                steps[s(r, c)].push((s(r + 1, c), geom.vertical(r + 1, c)));
                            }
                            if c >= 2 && ok(geom.horizontal(r, c - 1)) {
                                steps[s(r, c)].push((s(r, c - 1), geom.horizontal(r, c - 1)));
                            }
                        }
                    }
                    exit = Some(s(n - 1, 1));
                }
            }
        }
        Self {
            black,
            qubits: geom.qubit_count(),
            topo,
            entries,
            steps,
            exit,
        }
    }

    /// Every path as its qubit sequence, black qubit last.
    pub fn enumerate(&self) -> Vec<Vec<usize>> {
        let Some(exit) = self.exit else {
            return vec![vec![self.black]];
        };
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for &(node, q) in &self.entries {
            stack.push(q);
            self.walk(node, exit, &mut stack, &mut out);
            stack.pop();
        }
        out
    }

    fn walk(&self, node: usize, exit: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if node == exit {
            let mut path = stack.clone();
            path.push(self.black);
            out.push(path);
        }
        for &(next, q) in &self.steps[node] {
            stack.push(q);
            self.walk(next, exit, stack, out);
            stack.pop();
        }
    }

    /// Number of paths whose parity over `bits` (black excluded) is
    /// (even, odd).
    pub fn parity_counts(&self, bits: &[bool]) -> (u128, u128) {
        let Some(exit) = self.exit else {
            return (1, 0);
        };
        let mut even = vec![0u128; self.steps.len()];
        let mut odd = vec![0u128; self.steps.len()];
        for &(node, q) in &self.entries {
            if bits[q] {
                odd[node] += 1;
            } else {
                even[node] += 1;
            }
        }
        for &node in &self.topo {
            let (e, o) = (even[node], odd[node]);
            if e == 0 && o == 0 {
                continue;
            }
            for &(next, q) in &self.steps[node] {
                if bits[q] {
                    even[next] += o;
                    odd[next] += e;
                } else {
                    even[next] += e;
                    odd[next] += o;
                }
            }
        }
        (even[exit], odd[exit])
    }

    pub fn path_count(&self) -> u128 {
        self.parity_counts(&vec![false; self.qubits]).0
    }
}

/// Dual paths from the east edge to the black qubit inside the lower
/// triangle, moving west or south.
pub fn monotone_paths(geom: &LatticeGeometry, split: &TriangleSplit) -> Vec<Vec<usize>> {
    ReadoutPaths::new(geom, split, Sector::X).enumerate()
}

/// The logical support with the black qubit removed: north part of the west
/// column for `Sector::Z`, east part of the south row for `Sector::X`.
pub fn line_support(geom: &LatticeGeometry, sector: Sector) -> Vec<usize> {
    let black = geom.black();
    geom.logical_support(sector)
        .into_iter()
        .filter(|&q| q != black)
        .collect()
}
