//! Continued fractions, the strip triangulation whose top quiddity spells the
//! Hirzebruch-Jung expansion, and products of elementary `SL(2, Z)` matrices.

use std::collections::HashSet;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dissection::{Chord, Dissection};
use crate::enumerate::{for_each_dissection, CellFilter};
use crate::error::{Error, Result};

/// Regular expansion `a_1 + 1/(a_2 + 1/(... + 1/a_2m))` with an even number of terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularCF(Vec<u64>);

/// Minus-sign expansion `c_1 - 1/(c_2 - 1/(... - 1/c_k))` with every `c_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HJContinuedFraction(Vec<u64>);

impl RegularCF {
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "continued fraction needs at least one term".into(),
            ));
        }
        if !terms.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "regular expansion must have an even number of terms, got {}",
                terms.len()
            )));
        }
        if terms.contains(&0) {
            return Err(Error::InvalidArgument(
                "regular terms must be at least 1".into(),
            ));
        }
        Ok(Self(terms))
    }

    pub fn terms(&self) -> &[u64] {
        &self.0
    }

    /// The even-length regular expansion of a rational `> 1`.
    pub fn from_rational(q: &BigRational) -> Result<Self> {
        check_above_one(q)?;
        let (mut r, mut s) = (q.numer().clone(), q.denom().clone());
        let mut terms = Vec::new();
        while !s.is_zero() {
            let (a, rem) = r.div_rem(&s);
            terms.push(a.to_u64().expect("term fits in u64"));
            r = s;
            s = rem;
        }
        if terms.len() % 2 == 1 {
            // [..., a] = [..., a - 1, 1]; the last term is >= 2 here since q > 1.
            let last = terms.last_mut().unwrap();
            *last -= 1;
            terms.push(1);
        }
        Self::new(terms)
    }
}

impl HJContinuedFraction {
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "continued fraction needs at least one term".into(),
            ));
        }
        if let Some(&c) = terms.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidArgument(format!(
                "Hirzebruch-Jung terms must be at least 2, got {c}"
            )));
        }
        Ok(Self(terms))
    }

    pub fn terms(&self) -> &[u64] {
        &self.0
    }

    /// Ceiling-division Euclid: `c = ceil(r/s)`, continue with `1 / (c - r/s)`.
    pub fn from_rational(q: &BigRational) -> Result<Self> {
        check_above_one(q)?;
        let (mut r, mut s) = (q.numer().clone(), q.denom().clone());
        let mut terms = Vec::new();
        loop {
            let c = r.div_ceil(&s);
            terms.push(c.to_u64().expect("term fits in u64"));
            let next = &c * &s - &r;
            if next.is_zero() {
                break;
            }
            r = std::mem::replace(&mut s, next);
        }
        Self::new(terms)
    }
}

fn check_above_one(q: &BigRational) -> Result<()> {
    if q <= &BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "expected a rational > 1, got {q}"
        )));
    }
    Ok(())
}

fn fmt_terms(terms: &[u64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = terms.iter().map(u64::to_string).collect();
    f.write_str(&parts.join(","))
}

impl fmt::Display for RegularCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.0, f)
    }
}

impl fmt::Display for HJContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.0, f)
    }
}

pub fn eval_regular(cf: &RegularCF) -> BigRational {
    let mut it = cf.0.iter().rev();
    let mut p = BigInt::from(*it.next().unwrap());
    let mut q = BigInt::one();
    for &a in it {
        let np = BigInt::from(a) * &p + &q;
        q = std::mem::replace(&mut p, np);
    }
    BigRational::new(p, q)
}

pub fn eval_hj(cf: &HJContinuedFraction) -> BigRational {
    let mut it = cf.0.iter().rev();
    let mut p = BigInt::from(*it.next().unwrap());
    let mut q = BigInt::one();
    for &c in it {
        let np = BigInt::from(c) * &p - &q;
        q = std::mem::replace(&mut p, np);
    }
    BigRational::new(p, q)
}

pub fn regular_to_hj(cf: &RegularCF) -> HJContinuedFraction {
    HJContinuedFraction::from_rational(&eval_regular(cf)).expect("regular expansions are > 1")
}

pub fn hj_to_regular(cf: &HJContinuedFraction) -> RegularCF {
    RegularCF::from_rational(&eval_hj(cf)).expect("Hirzebruch-Jung expansions are > 1")
}

/// Zigzag triangulation of a strip: `a_1` triangles with their base on the bottom row,
/// then `a_2` with their base on the top row, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StripTriangulation {
    pub dissection: Dissection,
    /// Polygon labels of the top row, left to right.
    pub top_vertices: Vec<usize>,
    /// Polygon labels of the bottom row, left to right.
    pub bottom_vertices: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
}

impl StripTriangulation {
    /// Quiddity entries along the top row, left to right.
    pub fn top_quiddity(&self) -> Vec<u32> {
        let q = self.dissection.quiddity();
        self.top_vertices.iter().map(|&v| q.0[v]).collect()
    }
}

pub fn strip_triangulation(cf: &RegularCF) -> StripTriangulation {
    let a = cf.terms();
    let bottom_len = 1 + a.iter().step_by(2).sum::<u64>() as usize;
    let top_len = 1 + a.iter().skip(1).step_by(2).sum::<u64>() as usize;
    let n = bottom_len + top_len;
    // Counterclockwise: bottom row left to right, then top row right to left.
    let bottom: Vec<usize> = (0..bottom_len).collect();
    let top: Vec<usize> = (0..top_len).map(|j| n - 1 - j).collect();
    let (mut b, mut t) = (0usize, 0usize);
    let mut triangles = Vec::new();
    let mut rungs: Vec<Chord> = vec![(bottom[0], top[0])];
    for (i, &count) in a.iter().enumerate() {
        for _ in 0..count {
            if i % 2 == 0 {
                triangles.push([bottom[b], bottom[b + 1], top[t]]);
                b += 1;
            } else {
                triangles.push([top[t], top[t + 1], bottom[b]]);
                t += 1;
            }
            rungs.push((bottom[b].min(top[t]), bottom[b].max(top[t])));
        }
    }
    // The first and last rungs are polygon sides.
    let chords = rungs[1..rungs.len() - 1].iter().copied();
    let dissection = Dissection::new(n, chords).expect("strip rungs never cross");
    StripTriangulation {
        dissection,
        top_vertices: top,
        bottom_vertices: bottom,
        triangles,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn minus_identity() -> Self {
        Self::new(-1, 0, 0, -1)
    }

    /// `(c, -1; 1, 0)`.
    pub fn elementary(c: i64) -> Self {
        Self::new(c, -1, 1, 0)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }

    /// Entries as `[[a, b], [c, d]]` decimal strings.
    pub fn rows(&self) -> [[String; 2]; 2] {
        [
            [self.a.to_string(), self.b.to_string()],
            [self.c.to_string(), self.d.to_string()],
        ]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, r: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `M(c_1) M(c_2) ... M(c_N)`, left to right.
pub fn elementary_product(c: &[u64]) -> Result<Mat2> {
    if c.is_empty() {
        return Err(Error::InvalidArgument("need at least one entry".into()));
    }
    if c.contains(&0) {
        return Err(Error::InvalidArgument("entries must be positive".into()));
    }
    Ok(c.iter().fold(Mat2::identity(), |acc, &x| {
        &acc * &Mat2::elementary(x as i64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Monodromy {
    /// Every solution of `v_{i+1} = c_i v_i - v_{i-1}` is N-periodic.
    PlusIdentity,
    /// Every solution is N-antiperiodic.
    MinusIdentity,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyReport {
    pub matrix: Mat2,
    pub classification: Monodromy,
}

pub fn classify_monodromy(c: &[u64]) -> Result<MonodromyReport> {
    let matrix = elementary_product(c)?;
    let classification = if matrix == Mat2::identity() {
        Monodromy::PlusIdentity
    } else if matrix == Mat2::minus_identity() {
        Monodromy::MinusIdentity
    } else {
        Monodromy::Neither
    };
    Ok(MonodromyReport {
        matrix,
        classification,
    })
}

/// Largest converse sweep accepted by [`verify_theorem_val`].
pub const DEFAULT_SWEEP_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    /// 3-periodic dissections whose quiddity was multiplied out.
    pub forward_checked: u64,
    /// Quiddities whose product is not `+-Id`.
    pub forward_failures: Vec<String>,
    /// Tuples in `[1, entry_bound]^N` swept.
    pub converse_checked: u64,
    /// Quiddities within the entry bound that the sweep did not find as `+-Id`.
    pub converse_missing: Vec<String>,
    /// Tuples with product `+-Id` that are not quiddities of 3-periodic dissections.
    pub converse_extra: Vec<String>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.forward_failures.is_empty()
            && self.converse_missing.is_empty()
            && self.converse_extra.is_empty()
    }
}

fn join(t: &[u64]) -> String {
    t.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Checks both directions of the correspondence between 3-periodic quiddities and
/// tuples whose elementary product is `+-Id`, the converse only over entries
/// `<= entry_bound`.
pub fn verify_theorem_val(n: usize, entry_bound: u64) -> Result<TheoremReport> {
    if entry_bound < 1 {
        return Err(Error::InvalidArgument(
            "entry bound must be at least 1".into(),
        ));
    }
    let sweep = (entry_bound as f64).powi(n as i32);
    if sweep > DEFAULT_SWEEP_CAP as f64 {
        return Err(Error::ResourceCap(format!(
            "{entry_bound}^{n} tuples exceed the sweep cap"
        )));
    }
    let mut quiddities: HashSet<Vec<u64>> = HashSet::new();
    let mut forward_checked = 0u64;
    for_each_dissection(n, None, &CellFilter::EllPeriodic(3), |d| {
        forward_checked += 1;
        quiddities.insert(d.quiddity().0.into_iter().map(u64::from).collect());
    })?;
    let mut forward_failures: Vec<String> = quiddities
        .iter()
        .filter(|q| {
            classify_monodromy(q)
                .map(|r| r.classification == Monodromy::Neither)
                .unwrap_or(true)
        })
        .map(|q| join(q))
        .collect();
    forward_failures.sort();

    let total = entry_bound.pow(n as u32);
    let hits: Vec<Vec<u64>> = (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut t = vec![0u64; n];
            for slot in t.iter_mut().rev() {
                *slot = code % entry_bound + 1;
                code /= entry_bound;
            }
            let m = elementary_product(&t).ok()?;
            (m == Mat2::identity() || m == Mat2::minus_identity()).then_some(t)
        })
        .collect();
    let hit_set: HashSet<&Vec<u64>> = hits.iter().collect();
    let converse_extra = hits
        .iter()
        .filter(|t| !quiddities.contains(*t))
        .map(|t| join(t))
        .collect();
    let mut converse_missing: Vec<String> = quiddities
        .iter()
        .filter(|q| q.iter().all(|&c| c <= entry_bound) && !hit_set.contains(q))
        .map(|q| join(q))
        .collect();
    converse_missing.sort();
    Ok(TheoremReport {
        forward_checked,
        forward_failures,
        converse_checked: total,
        converse_missing,
        converse_extra,
    })
}

/// Iterates `v_{i+1} = c_i v_i - v_{i-1}` over one period from `(v_0, v_1)` and returns
/// `(v_N, v_{N+1})`.
pub fn iterate_recurrence(c: &[u64], v0: BigInt, v1: BigInt) -> (BigInt, BigInt) {
    let (mut prev, mut cur) = (v0, v1);
    for &ci in c {
        let next = BigInt::from(ci) * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    (prev, cur)
}

/// Sign `s` such that every solution satisfies `v_{i+N} = s v_i`, found by direct
/// iteration of the two basis solutions.
pub fn recurrence_period_sign(c: &[u64]) -> Option<i32> {
    let basis = [
        (BigInt::one(), BigInt::zero()),
        (BigInt::zero(), BigInt::one()),
    ];
    let mut sign = None;
    for (v0, v1) in basis {
        let (vn, vn1) = iterate_recurrence(c, v0.clone(), v1.clone());
        let s = if vn == v0 && vn1 == v1 {
            1
        } else if vn == -&v0 && vn1 == -&v1 {
            -1
        } else {
            return None;
        };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    sign
}

impl Mat2 {
    pub fn is_plus_or_minus_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && self.a.abs().is_one()
    }
}
