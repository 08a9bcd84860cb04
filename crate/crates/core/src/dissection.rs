//! Dissections of a convex polygon, their cells and quiddities.
//!
//! Vertices are labelled `0..n` counterclockwise. A chord is stored as `(i, j)` with
//! `i < j`, and a [`Dissection`] keeps its chords sorted lexicographically so that two
//! equal dissections always compare equal.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A diagonal `(i, j)` with `i < j`.
pub type Chord = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dissection {
    n: usize,
    chords: Vec<Chord>,
}

fn chord_token((i, j): Chord) -> String {
    format!("{i}-{j}")
}

/// `true` when the two chords cross in the interior of the polygon.
pub fn chords_cross(x: Chord, y: Chord) -> bool {
    let ((a, b), (c, d)) = if x <= y { (x, y) } else { (y, x) };
    a < c && c < b && b < d
}

impl Dissection {
    /// Builds a dissection from an arbitrary list of chords, normalizing each chord and
    /// validating the whole set.
    pub fn new(n: usize, chords: impl IntoIterator<Item = Chord>) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let mut out: Vec<Chord> = Vec::new();
        for (a, b) in chords {
            let token = chord_token((a, b));
            if a >= n || b >= n {
                return Err(Error::ChordOutOfRange { token, n });
            }
            let c = (a.min(b), a.max(b));
            if c.1 - c.0 < 2 || (c.0 == 0 && c.1 == n - 1) {
                return Err(Error::PolygonEdge { token });
            }
            out.push(c);
        }
        out.sort_unstable();
        for w in out.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateChord {
                    token: chord_token(w[0]),
                });
            }
        }
        for (k, &x) in out.iter().enumerate() {
            for &y in &out[k + 1..] {
                if chords_cross(x, y) {
                    return Err(Error::Crossing {
                        token: chord_token(y),
                        other: chord_token(x),
                    });
                }
            }
        }
        Ok(Self { n, chords: out })
    }

    /// The dissection with no chords: a single cell.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// Wraps chords that the caller guarantees are valid, normalized and sorted.
    pub(crate) fn from_canonical(n: usize, chords: Vec<Chord>) -> Self {
        debug_assert!(Self::new(n, chords.iter().copied()).map(|d| d.chords) == Ok(chords.clone()));
        Self { n, chords }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn has_chord(&self, a: usize, b: usize) -> bool {
        self.chords.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Number of cells, always one more than the number of chords.
    pub fn cell_count(&self) -> usize {
        self.chords.len() + 1
    }

    /// `true` when `(a, b)` is a side of the polygon.
    pub fn is_polygon_edge(&self, a: usize, b: usize) -> bool {
        let (lo, hi) = (a.min(b), a.max(b));
        hi - lo == 1 || (lo == 0 && hi == self.n - 1)
    }

    pub fn chord_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for &(a, b) in &self.chords {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Decomposes the polygon into its cells by walking every interior directed edge,
    /// always turning as sharply counterclockwise as the chords permit.
    pub fn cells(&self) -> CellList {
        let n = self.n;
        // Neighbors of v sorted by counterclockwise offset (w - v) mod n.
        let mut adj: Vec<Vec<usize>> = (0..n).map(|v| vec![(v + 1) % n, (v + n - 1) % n]).collect();
        for &(a, b) in &self.chords {
            adj[a].push(b);
            adj[b].push(a);
        }
        let offset = |v: usize, w: usize| (w + n - v) % n;
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable_by_key(|&w| offset(v, w));
        }
        // Edge v -> adj[v][k]; the last slot (offset n-1) points clockwise along the
        // boundary and borders the outer face.
        let mut owner: Vec<Vec<Option<usize>>> = adj.iter().map(|l| vec![None; l.len()]).collect();
        let slot = |adj: &Vec<Vec<usize>>, v: usize, w: usize| {
            adj[v]
                .binary_search_by_key(&offset(v, w), |&x| offset(v, x))
                .expect("edge present in adjacency")
        };

        let mut raw: Vec<Vec<usize>> = Vec::with_capacity(self.chords.len() + 1);
        for start in 0..n {
            for k in 0..adj[start].len() - 1 {
                if owner[start][k].is_some() {
                    continue;
                }
                let id = raw.len();
                let mut verts = Vec::new();
                let (mut u, mut ku) = (start, k);
                loop {
                    owner[u][ku] = Some(id);
                    verts.push(u);
                    let v = adj[u][ku];
                    let back = slot(&adj, v, u);
                    debug_assert!(back > 0, "walked onto the outer face");
                    let kv = back - 1;
                    if v == start && kv == k {
                        break;
                    }
                    u = v;
                    ku = kv;
                }
                let min_pos = verts.iter().enumerate().min_by_key(|(_, &x)| x).unwrap().0;
                verts.rotate_left(min_pos);
                raw.push(verts);
            }
        }

        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&x, &y| {
            (raw[x][0], raw[x].len(), &raw[x]).cmp(&(raw[y][0], raw[y].len(), &raw[y]))
        });
        let mut rank = vec![0; raw.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let dual_edges = self
            .chords
            .iter()
            .map(|&(a, b)| {
                let x = rank[owner[a][slot(&adj, a, b)].unwrap()];
                let y = rank[owner[b][slot(&adj, b, a)].unwrap()];
                DualEdge {
                    cells: (x.min(y), x.max(y)),
                    chord: (a, b),
                }
            })
            .collect();
        let cells = order
            .into_iter()
            .map(|i| Cell {
                vertices: std::mem::take(&mut raw[i]),
            })
            .collect();
        CellList { cells, dual_edges }
    }

    /// Quiddity computed from chord degrees and cross-checked against cell membership
    /// in debug builds.
    pub fn quiddity(&self) -> Quiddity {
        let q = Quiddity(self.chord_degrees().into_iter().map(|d| d + 1).collect());
        debug_assert_eq!(
            q,
            self.quiddity_from_cells(&self.cells()),
            "quiddity routes disagree for {self}"
        );
        q
    }

    /// Quiddity obtained by the second route only: counting cells through each vertex.
    pub fn quiddity_from_cells(&self, cells: &CellList) -> Quiddity {
        let mut c = vec![0u32; self.n];
        for cell in &cells.cells {
            for &v in &cell.vertices {
                c[v] += 1;
            }
        }
        Quiddity(c)
    }

    /// Quiddity computed both ways, panicking if the routes disagree.
    pub fn quiddity_checked(&self) -> Quiddity {
        let by_degree = Quiddity(self.chord_degrees().into_iter().map(|d| d + 1).collect());
        let by_cells = self.quiddity_from_cells(&self.cells());
        assert_eq!(by_degree, by_cells, "quiddity routes disagree for {self}");
        by_degree
    }

    /// Sorted multiset of cell sizes.
    pub fn cell_size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.cells().cells.iter().map(Cell::size).collect();
        sizes.sort_unstable();
        sizes
    }

    /// Every cell has `3 (mod ell)` vertices.
    pub fn is_ell_periodic(&self, ell: usize) -> Result<bool> {
        if ell < 1 {
            return Err(Error::InvalidArgument("ell must be at least 1".into()));
        }
        Ok(self.cell_size_profile().iter().all(|&s| s % ell == 3 % ell))
    }

    pub fn is_size_restricted(&self, allowed: &BTreeSet<usize>) -> bool {
        self.cell_size_profile().iter().all(|s| allowed.contains(s))
    }

    /// Relabels `i -> rotation + i` (or `rotation - i` when `reflected`), modulo `n`.
    pub fn dihedral_transform(&self, rotation: i64, reflected: bool) -> Dissection {
        let n = self.n as i64;
        let map = |i: usize| {
            let i = if reflected { -(i as i64) } else { i as i64 };
            (i + rotation).rem_euclid(n) as usize
        };
        let mut chords: Vec<Chord> = self
            .chords
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (map(a), map(b));
                (x.min(y), x.max(y))
            })
            .collect();
        chords.sort_unstable();
        Dissection::from_canonical(self.n, chords)
    }

    /// All `2n` images under the dihedral group, deduplicated.
    pub fn dihedral_orbit(&self) -> BTreeSet<Dissection> {
        (0..self.n as i64)
            .flat_map(|r| [false, true].map(|f| self.dihedral_transform(r, f)))
            .collect()
    }
}

impl fmt::Display for Dissection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (k, &(a, b)) in self.chords.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

/// Parses `N:` or `N:i-j,k-l,...`; chord order is irrelevant.
pub fn parse_dissection(text: &str) -> Result<Dissection> {
    let malformed = |reason: &str| Error::Malformed {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let (head, tail) = text
        .split_once(':')
        .ok_or_else(|| malformed("missing `:`"))?;
    let n = parse_index(head).ok_or_else(|| malformed(&format!("bad vertex count `{head}`")))?;
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let mut chords = Vec::new();
    if !tail.is_empty() {
        for token in tail.split(',') {
            let parsed = token
                .split_once('-')
                .and_then(|(a, b)| Some((parse_index(a)?, parse_index(b)?)));
            let c = parsed.ok_or_else(|| malformed(&format!("bad chord `{token}`")))?;
            chords.push(c);
        }
    }
    Dissection::new(n, chords)
}

fn parse_index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Dissection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_dissection(s)
    }
}

impl Serialize for Dissection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dissection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sub-polygon, vertices listed counterclockwise from the smallest label (hence
/// increasing).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub vertices: Vec<usize>,
}

impl Cell {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Boundary edges in cyclic order: `(v_k, v_{k+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }
}

/// The dual graph has one node per cell and one edge per chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DualEdge {
    pub cells: (usize, usize),
    pub chord: Chord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellList {
    pub cells: Vec<Cell>,
    pub dual_edges: Vec<DualEdge>,
}

impl CellList {
    /// Index of the cell containing the polygon side `(0, n-1)`.
    pub fn base_cell(&self, n: usize) -> usize {
        self.cells
            .iter()
            .position(|c| c.vertices[0] == 0 && *c.vertices.last().unwrap() == n - 1)
            .expect("some cell owns the side (0, n-1)")
    }

    /// For each cell, the list of `(neighbor, shared chord)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Chord)>> {
        let mut adj = vec![Vec::new(); self.cells.len()];
        for e in &self.dual_edges {
            adj[e.cells.0].push((e.cells.1, e.chord));
            adj[e.cells.1].push((e.cells.0, e.chord));
        }
        adj
    }

    /// `true` when the dual graph is connected with `cells - 1` edges.
    pub fn dual_is_tree(&self) -> bool {
        if self.dual_edges.len() + 1 != self.cells.len() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &(x, _) in &adj[c] {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// The vector of cell-contact counts `(c_1, ..., c_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quiddity(pub Vec<u32>);

impl Quiddity {
    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// Cell count implied by the entry sum: `sum = N + 2(m - 1)`.
    pub fn implied_cell_count(&self) -> u64 {
        (self.sum() - self.0.len() as u64) / 2 + 1
    }
}

impl fmt::Display for Quiddity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Quiddity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidArgument(format!("bad quiddity entry `{t}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Quiddity)
    }
}
