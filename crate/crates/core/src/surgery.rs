//! Quiddity-preserving surgery on single cells, opening surgeries relative to the base
//! side `(0, n-1)`, and the maximally open representative of a 3-periodic class.
//!
//! A surgery on a cell with boundary `..., a, b, ..., c, d, ...` removes the two chords
//! `(a, b)` and `(c, d)` and inserts `(b, c)` and `(d, a)`. Both boundary arcs between
//! the removed chords must contain at least two further edges of the cell. The two
//! neighbors across the removed chords merge into one cell, and the acting cell splits in
//! two, so every vertex keeps its cell count.

use std::cmp::Reverse;
use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::dissection::{CellList, Chord, Dissection};
use crate::error::{Error, Result};

/// Largest surgery class explored before giving up.
pub const DEFAULT_CLASS_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SurgeryMove {
    pub cell_index: usize,
    /// Sorted.
    pub removed: [Chord; 2],
    /// Sorted.
    pub added: [Chord; 2],
}

fn norm(a: usize, b: usize) -> Chord {
    (a.min(b), a.max(b))
}

fn sorted_pair(x: Chord, y: Chord) -> [Chord; 2] {
    if x <= y {
        [x, y]
    } else {
        [y, x]
    }
}

/// Sizes of the three cells a move creates: the two pieces of the acting cell and the
/// merge of the two neighbors.
fn resulting_sizes(
    neighbor_size: &dyn Fn(Chord) -> usize,
    mv: &SurgeryMove,
    k: usize,
    span: usize,
) -> [usize; 3] {
    [
        span,
        k - span,
        neighbor_size(mv.removed[0]) + neighbor_size(mv.removed[1]),
    ]
}

fn require_periodic(d: &Dissection) -> Result<()> {
    if d.is_ell_periodic(3)? {
        Ok(())
    } else {
        Err(Error::NotThreePeriodic(d.to_string()))
    }
}

/// Every legal surgery, or only those whose result is again 3-periodic.
pub fn find_surgeries(d: &Dissection, require_3periodic: bool) -> Result<Vec<SurgeryMove>> {
    if require_3periodic {
        require_periodic(d)?;
    }
    let cells = d.cells();
    Ok(moves_in(d, &cells, require_3periodic))
}

fn moves_in(d: &Dissection, cells: &CellList, require_3periodic: bool) -> Vec<SurgeryMove> {
    let mut out = Vec::new();
    for (ci, cell) in cells.cells.iter().enumerate() {
        let k = cell.size();
        if k < 6 {
            continue;
        }
        let v = &cell.vertices;
        let edge = |i: usize| (v[i], v[(i + 1) % k]);
        for i in 0..k {
            let (a, b) = edge(i);
            if !d.has_chord(a, b) {
                continue;
            }
            for j in i + 3..k {
                if k - (j - i) < 3 {
                    break;
                }
                let (c, dd) = edge(j);
                if !d.has_chord(c, dd) {
                    continue;
                }
                let mv = SurgeryMove {
                    cell_index: ci,
                    removed: sorted_pair(norm(a, b), norm(c, dd)),
                    added: sorted_pair(norm(b, c), norm(dd, a)),
                };
                if require_3periodic {
                    let other = |ch: Chord| {
                        let e = cells
                            .dual_edges
                            .iter()
                            .find(|e| e.chord == ch)
                            .expect("chord has a dual edge");
                        let (x, y) = e.cells;
                        cells.cells[if x == ci { y } else { x }].size()
                    };
                    let sizes = resulting_sizes(&other, &mv, k, j - i);
                    let periodic = sizes.iter().all(|s| s % 3 == 0);
                    // Neighbors are already multiples of 3, so only the arcs matter.
                    debug_assert_eq!(periodic, (j - i) % 3 == 0 && (k - (j - i)) % 3 == 0);
                    if !periodic {
                        continue;
                    }
                }
                out.push(mv);
            }
        }
    }
    out
}

/// Performs a legal move.
pub fn apply_surgery(d: &Dissection, mv: &SurgeryMove) -> Result<Dissection> {
    if !find_surgeries(d, false)?.contains(mv) {
        return Err(Error::IllegalSurgery(format!("{mv:?} on {d}")));
    }
    Ok(apply_unchecked(d, mv))
}

fn apply_unchecked(d: &Dissection, mv: &SurgeryMove) -> Dissection {
    let chords = d
        .chords()
        .iter()
        .copied()
        .filter(|c| !mv.removed.contains(c))
        .chain(mv.added);
    Dissection::new(d.n_vertices(), chords).expect("surgery keeps the chords non-crossing")
}

/// A dissection with the polygon side `(0, n-1)` as base, and the induced base edge and
/// depth of every cell in the dual tree.
#[derive(Debug, Clone)]
pub struct BasedDissection {
    pub dissection: Dissection,
    pub cells: CellList,
    pub base_cell: usize,
    /// Chord towards the base cell; `None` for the base cell itself.
    pub parent_chord: Vec<Option<Chord>>,
    pub distance: Vec<usize>,
}

impl BasedDissection {
    pub fn new(d: &Dissection) -> Self {
        let cells = d.cells();
        let n = d.n_vertices();
        let base_cell = cells.base_cell(n);
        let adj = cells.adjacency();
        let mut parent_chord = vec![None; cells.cells.len()];
        let mut distance = vec![usize::MAX; cells.cells.len()];
        distance[base_cell] = 0;
        let mut queue = VecDeque::from([base_cell]);
        while let Some(c) = queue.pop_front() {
            for &(x, chord) in &adj[c] {
                if distance[x] == usize::MAX {
                    distance[x] = distance[c] + 1;
                    parent_chord[x] = Some(chord);
                    queue.push_back(x);
                }
            }
        }
        Self {
            dissection: d.clone(),
            cells,
            base_cell,
            parent_chord,
            distance,
        }
    }

    /// The edge of `cell` closest to the base side; the base side itself for the base cell.
    pub fn base_edge(&self, cell: usize) -> Chord {
        self.parent_chord[cell].unwrap_or((0, self.dissection.n_vertices() - 1))
    }

    pub fn is_opening(&self, mv: &SurgeryMove) -> bool {
        self.parent_chord[mv.cell_index].is_some_and(|p| mv.removed.contains(&p))
    }

    /// 3-periodic surgeries that remove the acting cell's base edge.
    pub fn opening_moves(&self) -> Vec<SurgeryMove> {
        moves_in(&self.dissection, &self.cells, true)
            .into_iter()
            .filter(|mv| self.is_opening(mv))
            .collect()
    }
}

pub fn is_opening(bd: &BasedDissection, mv: &SurgeryMove) -> bool {
    bd.is_opening(mv)
}

pub fn is_maximally_open(d: &Dissection) -> Result<bool> {
    require_periodic(d)?;
    Ok(BasedDissection::new(d).opening_moves().is_empty())
}

/// Runs opening surgeries until none remains, letting `choose` pick the next move among
/// all admissible ones. Returns the fixed point and the moves applied.
pub fn canonicalize_with(
    d: &Dissection,
    mut choose: impl FnMut(&BasedDissection, &[SurgeryMove]) -> usize,
) -> Result<(Dissection, Vec<SurgeryMove>)> {
    require_periodic(d)?;
    // The total dual-tree depth drops with every opening surgery.
    let limit = d.n_vertices() * d.n_vertices() + 1;
    let mut current = d.clone();
    let mut trace = Vec::new();
    loop {
        let bd = BasedDissection::new(&current);
        let moves = bd.opening_moves();
        if moves.is_empty() {
            return Ok((current, trace));
        }
        if trace.len() >= limit {
            return Err(Error::NonConvergence(format!(
                "opening surgeries on {d} did not terminate"
            )));
        }
        let mv = moves[choose(&bd, &moves)].clone();
        current = apply_unchecked(&current, &mv);
        trace.push(mv);
    }
}

/// Deepest cell first (ties: smaller first vertex), then the move with the smallest
/// added chords.
fn deepest_first(bd: &BasedDissection, moves: &[SurgeryMove]) -> usize {
    (0..moves.len())
        .min_by_key(|&i| {
            let c = moves[i].cell_index;
            (
                Reverse(bd.distance[c]),
                bd.cells.cells[c].vertices[0],
                moves[i].added,
            )
        })
        .unwrap()
}

/// The maximally open dissection reached from `d`, with the moves taken.
pub fn canonicalize_traced(d: &Dissection) -> Result<(Dissection, Vec<SurgeryMove>)> {
    canonicalize_with(d, deepest_first)
}

pub fn canonicalize_maximally_open(d: &Dissection) -> Result<Dissection> {
    canonicalize_traced(d).map(|(c, _)| c)
}

/// Closure of `d` under (3-periodic) surgeries.
pub fn surgery_class(d: &Dissection, require_3periodic: bool) -> Result<BTreeSet<Dissection>> {
    surgery_class_capped(d, require_3periodic, DEFAULT_CLASS_CAP)
}

pub fn surgery_class_capped(
    d: &Dissection,
    require_3periodic: bool,
    cap: usize,
) -> Result<BTreeSet<Dissection>> {
    if require_3periodic {
        require_periodic(d)?;
    }
    let mut seen = BTreeSet::from([d.clone()]);
    let mut queue = VecDeque::from([d.clone()]);
    while let Some(x) = queue.pop_front() {
        let cells = x.cells();
        for mv in moves_in(&x, &cells, require_3periodic) {
            let y = apply_unchecked(&x, &mv);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::ResourceCap(format!(
                        "surgery class of {d} exceeds {cap} members"
                    )));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}
