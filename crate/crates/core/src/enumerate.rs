//! Exhaustive generation of dissections, filtered by cell size.
//!
//! Generation follows the base-edge decomposition: the cell containing the side
//! `(0, n-1)` is chosen first, which splits the rest of the polygon into independent
//! sub-polygons, each with its own base edge. Every dissection is produced exactly once,
//! so no duplicate rejection is needed. A counting table over sub-polygon sizes prunes
//! branches that cannot reach the requested cell count.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dissection::{Chord, Dissection, Quiddity};
use crate::error::{Error, Result};

/// Refuse to materialize more dissections than this.
pub const DEFAULT_MATERIALIZE_CAP: u64 = 10_000_000;
/// Largest polygon accepted by [`quiddity_classes`].
pub const DEFAULT_CLASS_MAX_N: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CellFilter {
    All,
    /// Every cell has `3 (mod ell)` vertices.
    EllPeriodic(usize),
    SizeSet(BTreeSet<usize>),
    /// Every cell has exactly `k` vertices.
    EqualSize(usize),
}

impl CellFilter {
    pub fn validate(&self) -> Result<()> {
        match self {
            CellFilter::All => Ok(()),
            CellFilter::EllPeriodic(0) => {
                Err(Error::InvalidArgument("ell must be at least 1".into()))
            }
            CellFilter::EllPeriodic(_) => Ok(()),
            CellFilter::SizeSet(s) if s.is_empty() => {
                Err(Error::InvalidArgument("size set must be nonempty".into()))
            }
            CellFilter::SizeSet(s) if s.iter().any(|&k| k < 3) => Err(Error::InvalidArgument(
                "cell sizes must be at least 3".into(),
            )),
            CellFilter::SizeSet(_) => Ok(()),
            CellFilter::EqualSize(k) if *k < 3 => Err(Error::InvalidArgument(
                "cell sizes must be at least 3".into(),
            )),
            CellFilter::EqualSize(_) => Ok(()),
        }
    }

    pub fn allows(&self, size: usize) -> bool {
        match self {
            CellFilter::All => true,
            CellFilter::EllPeriodic(ell) => size % ell == 3 % ell,
            CellFilter::SizeSet(s) => s.contains(&size),
            CellFilter::EqualSize(k) => size == *k,
        }
    }

    pub fn accepts(&self, d: &Dissection) -> bool {
        d.cell_size_profile().into_iter().all(|s| self.allows(s))
    }
}

impl fmt::Display for CellFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellFilter::All => f.write_str("all"),
            CellFilter::EllPeriodic(l) => write!(f, "ell={l}"),
            CellFilter::SizeSet(s) => {
                f.write_str("sizes=")?;
                let parts: Vec<String> = s.iter().map(|k| k.to_string()).collect();
                f.write_str(&parts.join("+"))
            }
            CellFilter::EqualSize(k) => write!(f, "equal={k}"),
        }
    }
}

/// `counts[len][k]`: dissections of the `(len+1)`-gon into `k` cells whose cells all pass
/// the filter, with the 2-gon (`len = 1`) counted once with zero cells.
#[derive(Debug, Clone)]
pub struct CountTable {
    counts: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn new(max_len: usize, filter: &CellFilter) -> Self {
        let max_len = max_len.max(1);
        let mut counts: Vec<Vec<BigUint>> = vec![Vec::new(); max_len + 1];
        counts[1] = vec![BigUint::one()];
        // gaps[j][len][k]: ordered sequences of j sub-polygons of total length len with k cells.
        let mut gaps: Vec<Vec<Vec<BigUint>>> = vec![vec![Vec::new(); max_len + 1]; max_len + 1];
        gaps[1][1] = counts[1].clone();
        for len in 2..=max_len {
            for j in 2..=len {
                let mut acc = vec![BigUint::zero(); len];
                for first in 1..=len - (j - 1) {
                    let rest = &gaps[j - 1][len - first];
                    for (k1, x) in counts[first].iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        for (k2, y) in rest.iter().enumerate() {
                            if !y.is_zero() {
                                acc[k1 + k2] += x * y;
                            }
                        }
                    }
                }
                gaps[j][len] = acc;
            }
            let mut row = vec![BigUint::zero(); len];
            for interior in 1..len {
                if !filter.allows(interior + 2) {
                    continue;
                }
                for (k, x) in gaps[interior + 1][len].iter().enumerate() {
                    if k + 1 < len {
                        row[k + 1] += x;
                    }
                }
            }
            gaps[1][len] = row.clone();
            counts[len] = row;
        }
        Self { counts }
    }

    pub fn get(&self, len: usize, cells: usize) -> BigUint {
        self.counts
            .get(len)
            .and_then(|r| r.get(cells))
            .cloned()
            .unwrap_or_default()
    }

    fn feasible(&self, len: usize, cells: usize) -> bool {
        self.counts
            .get(len)
            .and_then(|r| r.get(cells))
            .is_some_and(|c| !c.is_zero())
    }
}

fn check_args(n: usize, m: Option<usize>, filter: &CellFilter) -> Result<()> {
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if let Some(m) = m {
        if m < 1 || m > n - 2 {
            return Err(Error::InvalidArgument(format!(
                "cell count {m} outside 1..={} for a {n}-gon",
                n - 2
            )));
        }
    }
    filter.validate()
}

/// Pending work: the sub-polygon on vertices `lo..=hi` must receive exactly `cells` cells.
#[derive(Debug, Clone, Copy)]
struct Pending {
    lo: usize,
    hi: usize,
    cells: usize,
}

/// One way to place the cell on a pending sub-polygon's base edge.
#[derive(Debug, Clone)]
struct Placement {
    chords: Vec<Chord>,
    children: Vec<Pending>,
}

struct Generator<'a> {
    n: usize,
    filter: &'a CellFilter,
    table: &'a CountTable,
}

impl Generator<'_> {
    /// All placements of the cell on base edge `(p.lo, p.hi)`, in a fixed order.
    fn placements(&self, p: Pending) -> Vec<Placement> {
        let mut out = Vec::new();
        let mut chosen = vec![p.lo];
        self.choose_vertices(p, p.lo + 1, &mut chosen, &mut out);
        out
    }

    fn choose_vertices(
        &self,
        p: Pending,
        next: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Placement>,
    ) {
        if chosen.len() >= 2 && self.filter.allows(chosen.len() + 1) {
            chosen.push(p.hi);
            self.distribute(p, chosen, out);
            chosen.pop();
        }
        for v in next..p.hi {
            chosen.push(v);
            self.choose_vertices(p, v + 1, chosen, out);
            chosen.pop();
        }
    }

    fn distribute(&self, p: Pending, corners: &[usize], out: &mut Vec<Placement>) {
        let lens: Vec<usize> = corners.windows(2).map(|w| w[1] - w[0]).collect();
        let need = p.cells - 1;
        // reach[i][r]: the gaps i.. can absorb exactly r cells.
        let mut reach = vec![vec![false; need + 1]; lens.len() + 1];
        reach[lens.len()][0] = true;
        for i in (0..lens.len()).rev() {
            for r in 0..=need {
                reach[i][r] =
                    (0..=r).any(|k| self.table.feasible(lens[i], k) && reach[i + 1][r - k]);
            }
        }
        if !reach[0][need] {
            return;
        }
        let mut split = Vec::with_capacity(lens.len());
        self.split_cells(corners, &lens, &reach, 0, need, &mut split, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn split_cells(
        &self,
        corners: &[usize],
        lens: &[usize],
        reach: &[Vec<bool>],
        i: usize,
        left: usize,
        split: &mut Vec<usize>,
        out: &mut Vec<Placement>,
    ) {
        if i == lens.len() {
            let mut chords = Vec::new();
            let mut children = Vec::new();
            for (g, &k) in split.iter().enumerate() {
                if lens[g] >= 2 {
                    let (lo, hi) = (corners[g], corners[g + 1]);
                    chords.push((lo, hi));
                    children.push(Pending { lo, hi, cells: k });
                }
            }
            out.push(Placement { chords, children });
            return;
        }
        for k in 0..=left {
            if self.table.feasible(lens[i], k) && reach[i + 1][left - k] {
                split.push(k);
                self.split_cells(corners, lens, reach, i + 1, left - k, split, out);
                split.pop();
            }
        }
    }

    fn run(
        &self,
        pending: &mut Vec<Pending>,
        chords: &mut Vec<Chord>,
        emit: &mut dyn FnMut(&[Chord]),
    ) {
        let Some(p) = pending.pop() else {
            emit(chords);
            return;
        };
        for pl in self.placements(p) {
            let (nc, np) = (chords.len(), pending.len());
            chords.extend_from_slice(&pl.chords);
            pending.extend_from_slice(&pl.children);
            self.run(pending, chords, emit);
            chords.truncate(nc);
            pending.truncate(np);
        }
        pending.push(p);
    }

    fn root(&self, cells: usize) -> Pending {
        Pending {
            lo: 0,
            hi: self.n - 1,
            cells,
        }
    }
}

fn canonical(n: usize, chords: &[Chord]) -> Dissection {
    let mut c = chords.to_vec();
    c.sort_unstable();
    Dissection::from_canonical(n, c)
}

fn cell_counts(n: usize, m: Option<usize>) -> Vec<usize> {
    match m {
        Some(m) => vec![m],
        None => (1..=n - 2).collect(),
    }
}

/// Streams every matching dissection to `visit`, sequentially and in the canonical
/// generation order.
pub fn for_each_dissection(
    n: usize,
    m: Option<usize>,
    filter: &CellFilter,
    mut visit: impl FnMut(Dissection),
) -> Result<()> {
    check_args(n, m, filter)?;
    let table = CountTable::new(n - 1, filter);
    let gen = Generator {
        n,
        filter,
        table: &table,
    };
    for cells in cell_counts(n, m) {
        if !table.feasible(n - 1, cells) {
            continue;
        }
        let mut pending = vec![gen.root(cells)];
        gen.run(&mut pending, &mut Vec::new(), &mut |c| {
            visit(canonical(n, c))
        });
    }
    Ok(())
}

/// Runs `work` once per base-cell placement, in parallel, returning results in the
/// deterministic placement order.
fn par_branches<T: Send>(
    n: usize,
    m: Option<usize>,
    filter: &CellFilter,
    work: impl Fn(&mut dyn FnMut(&mut dyn FnMut(&[Chord]))) -> T + Sync,
) -> Result<Vec<T>> {
    check_args(n, m, filter)?;
    let table = CountTable::new(n - 1, filter);
    let gen = Generator {
        n,
        filter,
        table: &table,
    };
    let branches: Vec<Placement> = cell_counts(n, m)
        .into_iter()
        .filter(|&k| table.feasible(n - 1, k))
        .flat_map(|k| gen.placements(gen.root(k)))
        .collect();
    Ok(branches
        .into_par_iter()
        .map(|pl| {
            work(&mut |emit: &mut dyn FnMut(&[Chord])| {
                let mut chords = pl.chords.clone();
                let mut pending = pl.children.clone();
                gen.run(&mut pending, &mut chords, emit);
            })
        })
        .collect())
}

/// Every matching dissection, each exactly once, in the generation order.
pub fn enumerate_dissections(
    n: usize,
    m: Option<usize>,
    filter: &CellFilter,
) -> Result<Vec<Dissection>> {
    enumerate_dissections_capped(n, m, filter, DEFAULT_MATERIALIZE_CAP)
}

pub fn enumerate_dissections_capped(
    n: usize,
    m: Option<usize>,
    filter: &CellFilter,
    cap: u64,
) -> Result<Vec<Dissection>> {
    check_args(n, m, filter)?;
    let table = CountTable::new(n - 1, filter);
    let total: BigUint = cell_counts(n, m)
        .into_iter()
        .map(|k| table.get(n - 1, k))
        .sum();
    if total > BigUint::from(cap) {
        return Err(Error::ResourceCap(format!(
            "{total} dissections exceed the cap of {cap}"
        )));
    }
    let parts = par_branches(n, m, filter, |run| {
        let mut out = Vec::new();
        run(&mut |c| out.push(canonical(n, c)));
        out
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Number of dissections of the `n`-gon into `m` cells passing `filter`, from the
/// counting table (nothing is materialized).
pub fn count_dissections(n: usize, m: usize, filter: &CellFilter) -> Result<BigUint> {
    check_args(n, Some(m), filter)?;
    Ok(CountTable::new(n - 1, filter).get(n - 1, m))
}

fn quiddity_of_chords(n: usize, chords: &[Chord]) -> Vec<u32> {
    let mut q = vec![1u32; n];
    for &(a, b) in chords {
        q[a] += 1;
        q[b] += 1;
    }
    q
}

/// Number of distinct quiddity vectors (raw `n`-tuples, no dihedral normalization).
pub fn count_quiddities(n: usize, m: usize, filter: &CellFilter) -> Result<BigUint> {
    let sets = par_branches(n, Some(m), filter, |run| {
        let mut seen = HashSet::new();
        run(&mut |c| {
            seen.insert(quiddity_of_chords(n, c));
        });
        seen
    })?;
    let mut all: HashSet<Vec<u32>> = HashSet::new();
    for s in sets {
        all.extend(s);
    }
    Ok(BigUint::from(all.len()))
}

/// Dissections grouped by quiddity.
#[derive(Debug, Clone)]
pub struct QuiddityClassTable {
    pub n: usize,
    pub m: usize,
    pub filter: CellFilter,
    pub classes: BTreeMap<Quiddity, Vec<Dissection>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub quiddity: String,
    pub members: Vec<Dissection>,
    /// Every member lies in the dihedral orbit of the first.
    pub dihedral_congruent: bool,
}

impl QuiddityClassTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn dissection_count(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    /// `class size -> number of classes of that size`.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for v in self.classes.values() {
            *h.entry(v.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn reports(&self) -> Vec<ClassReport> {
        self.classes
            .iter()
            .map(|(q, members)| {
                let orbit = members[0].dihedral_orbit();
                ClassReport {
                    quiddity: q.to_string(),
                    members: members.clone(),
                    dihedral_congruent: members.iter().all(|d| orbit.contains(d)),
                }
            })
            .collect()
    }

    /// Quiddity string to member dissection strings.
    pub fn export_map(&self) -> BTreeMap<String, Vec<String>> {
        self.classes
            .iter()
            .map(|(q, v)| (q.to_string(), v.iter().map(|d| d.to_string()).collect()))
            .collect()
    }
}

pub fn quiddity_classes(n: usize, m: usize, filter: &CellFilter) -> Result<QuiddityClassTable> {
    quiddity_classes_capped(n, m, filter, DEFAULT_CLASS_MAX_N)
}

pub fn quiddity_classes_capped(
    n: usize,
    m: usize,
    filter: &CellFilter,
    max_n: usize,
) -> Result<QuiddityClassTable> {
    if n > max_n {
        return Err(Error::ResourceCap(format!(
            "class tables are limited to n <= {max_n}"
        )));
    }
    let mut classes: BTreeMap<Quiddity, Vec<Dissection>> = BTreeMap::new();
    for d in enumerate_dissections(n, Some(m), filter)? {
        classes.entry(d.quiddity()).or_default().push(d);
    }
    for v in classes.values_mut() {
        v.sort();
    }
    Ok(QuiddityClassTable {
        n,
        m,
        filter: filter.clone(),
        classes,
    })
}

/// Total number of dissections of the `n`-gon (all cell counts) passing `filter`.
pub fn count_all_cells(n: usize, filter: &CellFilter) -> Result<BigUint> {
    check_args(n, None, filter)?;
    let table = CountTable::new(n - 1, filter);
    Ok((1..=n - 2).map(|k| table.get(n - 1, k)).sum())
}

/// Convenience for tests and reports that need a machine-sized count.
pub fn count_u64(c: &BigUint) -> u64 {
    c.to_u64().expect("count fits in u64")
}
