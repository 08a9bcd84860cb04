//! Oracle-equivalence checks run by `quiddity verify-all`.
//!
//! Each check compares an exhaustive enumeration (or a second algebraic route) with a
//! closed form. The closed forms are passed in as function values, which lets tests
//! confirm that a wrong formula is caught.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};

use crate::bridges::{self, Monodromy, RegularCF};
use crate::dissection::{Dissection, Quiddity};
use crate::enumerate::{self, CellFilter};
use crate::error::Result;
use crate::formulas;
use crate::series::{self, EquationSpec};
use crate::surgery;

/// The published table of `Q_{n,m}`: rows `m = n, n-3, n-6, n-9, n-12`, as
/// `(n, m, value)` for `n = 0..=14`.
pub const QUIDDITY_TABLE: &[(u32, u32, u64)] = &[
    (0, 0, 1),
    (1, 1, 1),
    (2, 2, 2),
    (3, 3, 5),
    (4, 4, 14),
    (5, 5, 42),
    (6, 6, 132),
    (7, 7, 429),
    (8, 8, 1430),
    (9, 9, 4862),
    (10, 10, 16796),
    (11, 11, 58786),
    (12, 12, 208012),
    (13, 13, 742900),
    (14, 14, 2674440),
    (4, 1, 1),
    (5, 2, 7),
    (6, 3, 34),
    (7, 4, 147),
    (8, 5, 605),
    (9, 6, 2431),
    (10, 7, 9646),
    (11, 8, 38012),
    (12, 9, 149226),
    (13, 10, 584630),
    (14, 11, 2288132),
    (7, 1, 1),
    (8, 2, 15),
    (9, 3, 121),
    (10, 4, 758),
    (11, 5, 4160),
    (12, 6, 21098),
    (13, 7, 101660),
    (14, 8, 472872),
    (10, 1, 1),
    (11, 2, 26),
    (12, 3, 315),
    (13, 4, 2710),
    (14, 5, 19234),
    (13, 1, 1),
    (14, 2, 40),
];

pub type CountFormula<'a> = &'a dyn Fn(i64, i64) -> BigUint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Fast,
    Full,
}

impl Scope {
    /// Largest polygon for enumeration-heavy checks.
    pub fn max_n(self) -> usize {
        match self {
            Scope::Fast => 8,
            Scope::Full => 10,
        }
    }

    /// Largest polygon for the 3-periodic quiddity count.
    pub fn max_n_quiddity(self) -> usize {
        match self {
            Scope::Fast => 8,
            Scope::Full => 11,
        }
    }

    pub fn series_order(self) -> usize {
        match self {
            Scope::Fast => 10,
            Scope::Full => 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(
    name: &str,
    f: impl FnOnce() -> Result<std::result::Result<String, String>>,
) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Table entries reproduced by `formula`.
pub fn check_quiddity_table(formula: CountFormula) -> std::result::Result<String, String> {
    for &(n, m, v) in QUIDDITY_TABLE {
        let got = formula(n as i64, m as i64);
        if got != BigUint::from(v) {
            return Err(format!("Q({n},{m}) = {got}, table says {v}"));
        }
    }
    Ok(format!("{} entries", QUIDDITY_TABLE.len()))
}

/// Dissection counts under `filter` equal `formula(N - 2, m)` for every `3 <= N <= max_n`
/// and every `m`, counting by exhaustive generation.
pub fn check_dissection_counts(
    max_n: usize,
    filter: &CellFilter,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    let mut compared = 0;
    for n in 3..=max_n {
        let mut by_m: BTreeMap<usize, u64> = BTreeMap::new();
        enumerate::for_each_dissection(n, None, filter, |d| {
            *by_m.entry(d.cell_count()).or_default() += 1
        })?;
        for m in 1..=n - 2 {
            let got = by_m.get(&m).copied().unwrap_or(0);
            let want = formula(n as i64 - 2, m as i64);
            if BigUint::from(got) != want {
                return Ok(Err(format!(
                    "N={n} m={m} {filter}: enumerated {got}, formula {want}"
                )));
            }
            compared += 1;
        }
    }
    Ok(Ok(format!("{compared} (N, m) pairs")))
}

/// 3-periodic quiddity counts by enumeration equal `formula(N - 2, m)`.
pub fn check_quiddity_counts(
    max_n: usize,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    let f = CellFilter::EllPeriodic(3);
    let mut compared = 0;
    for n in 3..=max_n {
        for m in 1..=n - 2 {
            let got = enumerate::count_quiddities(n, m, &f)?;
            let want = formula(n as i64 - 2, m as i64);
            if got != want {
                return Ok(Err(format!(
                    "N={n} m={m}: {got} quiddities, formula {want}"
                )));
            }
            compared += 1;
        }
    }
    Ok(Ok(format!("{compared} (N, m) pairs")))
}

/// Series coefficients `[z^n w^m]` for `m >= 1` equal `formula(n, m)`.
pub fn check_series(
    spec: EquationSpec,
    order: usize,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    let s = series::solve_fixed_point(spec, order)?;
    compare_series(&s, order, formula)
}

fn compare_series(
    s: &series::BivariateSeries,
    order: usize,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    for n in 1..=order {
        for m in 1..=n {
            let got = s.coefficient(n, m)?;
            let want = BigInt::from(formula(n as i64, m as i64));
            if got != want {
                return Ok(Err(format!("[z^{n} w^{m}] = {got}, formula {want}")));
            }
        }
    }
    Ok(Ok(format!("order {order}")))
}

pub fn check_q_series(
    order: usize,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    let p = series::solve_fixed_point(EquationSpec::P, order)?;
    let q = series::compose_q(&p)?;
    compare_series(&q, order, formula)
}

pub fn check_lagrange(
    max_n: usize,
    formula: CountFormula,
) -> Result<std::result::Result<String, String>> {
    let phi = series::kirkman_cayley_phi(max_n);
    for n in 0..=max_n {
        let poly = series::lagrange_invert(&phi, n + 1)?;
        for m in 0..=n {
            let got = poly.get(m).cloned().unwrap_or_default();
            let want = BigInt::from(formula(n as i64, m as i64));
            if got != want {
                return Ok(Err(format!(
                    "[z^{}] y at w^{m} = {got}, formula {want}",
                    n + 1
                )));
            }
        }
    }
    Ok(Ok(format!("n <= {max_n}")))
}

/// For every 3-periodic dissection with `N <= max_n`: surgery class equals quiddity class
/// and each class has exactly one maximally open member, which canonicalization reaches.
pub fn check_surgery_structure(max_n: usize) -> Result<std::result::Result<String, String>> {
    let f = CellFilter::EllPeriodic(3);
    let mut checked = 0;
    for n in 3..=max_n {
        let mut classes: BTreeMap<Quiddity, BTreeSet<Dissection>> = BTreeMap::new();
        enumerate::for_each_dissection(n, None, &f, |d| {
            classes.entry(d.quiddity()).or_default().insert(d);
        })?;
        for members in classes.values() {
            let first = members.first().unwrap();
            if &surgery::surgery_class(first, true)? != members {
                return Ok(Err(format!(
                    "surgery class of {first} differs from its quiddity class"
                )));
            }
            let open: Vec<&Dissection> = members
                .iter()
                .filter(|d| surgery::is_maximally_open(d).unwrap_or(false))
                .collect();
            if open.len() != 1 {
                return Ok(Err(format!(
                    "class of {first} has {} maximally open members",
                    open.len()
                )));
            }
            for d in members {
                if &surgery::canonicalize_maximally_open(d)? != open[0] {
                    return Ok(Err(format!("{d} does not canonicalize to {}", open[0])));
                }
                checked += 1;
            }
        }
    }
    Ok(Ok(format!("{checked} dissections")))
}

pub fn check_monodromy_forward(max_n: usize) -> Result<std::result::Result<String, String>> {
    let mut checked = 0;
    for n in 3..=max_n {
        let r = bridges::verify_theorem_val(n, 1)?;
        if let Some(bad) = r.forward_failures.first() {
            return Ok(Err(format!("N={n}: product of {bad} is not +-Id")));
        }
        checked += r.forward_checked;
    }
    for n in 3..=max_n.min(9) {
        let mut bad = None;
        enumerate::for_each_dissection(n, Some(n - 2), &CellFilter::All, |t| {
            let q: Vec<u64> = t.quiddity().0.into_iter().map(u64::from).collect();
            if bad.is_none()
                && bridges::classify_monodromy(&q).map(|r| r.classification)
                    != Ok(Monodromy::MinusIdentity)
            {
                bad = Some(t);
            }
        })?;
        if let Some(t) = bad {
            return Ok(Err(format!("triangulation {t} does not give -Id")));
        }
    }
    Ok(Ok(format!("{checked} 3-periodic dissections")))
}

pub fn check_monodromy_converse(max_n: usize) -> Result<std::result::Result<String, String>> {
    for n in 3..=max_n {
        let r = bridges::verify_theorem_val(n, (n as u64 - 2).max(1))?;
        if !r.passed() {
            return Ok(Err(format!(
                "N={n}: missing {:?}, extra {:?}",
                r.converse_missing, r.converse_extra
            )));
        }
    }
    Ok(Ok(format!("N <= {max_n}")))
}

pub fn check_continued_fractions(max_sum: u64) -> std::result::Result<String, String> {
    let mut checked = 0;
    let mut stack: Vec<Vec<u64>> = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        let sum: u64 = prefix.iter().sum();
        if !prefix.is_empty() && prefix.len() % 2 == 0 {
            let cf = RegularCF::new(prefix.clone()).map_err(|e| e.to_string())?;
            let hj = bridges::regular_to_hj(&cf);
            if bridges::eval_hj(&hj) != bridges::eval_regular(&cf) {
                return Err(format!("{cf}: expansions disagree"));
            }
            let strip = bridges::strip_triangulation(&cf);
            let top = strip.top_quiddity();
            let spelled: Vec<u64> = top[..hj.terms().len()].iter().map(|&c| c as u64).collect();
            if spelled != hj.terms() {
                return Err(format!("{cf}: top quiddity {top:?} but expansion {hj}"));
            }
            checked += 1;
        }
        for a in 1..=max_sum.saturating_sub(sum) {
            let mut next = prefix.clone();
            next.push(a);
            stack.push(next);
        }
    }
    Ok(format!("{checked} expansions"))
}

fn formula_result(f: impl Fn(i64, i64) -> Result<BigUint>) -> impl Fn(i64, i64) -> BigUint {
    move |n, m| f(n, m).expect("formula domain")
}

/// Runs every check at the scope's caps.
pub fn verify_all(scope: Scope) -> Vec<CheckResult> {
    let kc = formula_result(formulas::kirkman_cayley);
    let q3 = formula_result(formulas::quiddity_count_3periodic);
    let tq = formula_result(formulas::tri_quad_count);
    let ell = |l: i64| move |n: i64, m: i64| formulas::ell_periodic_count(n, m, l).unwrap();
    let n = scope.max_n();
    let order = scope.series_order();
    let mut out = vec![timed("quiddity-table", || Ok(check_quiddity_table(&q3)))];
    out.push(timed("dissections-vs-kirkman-cayley", || {
        check_dissection_counts(n, &CellFilter::All, &kc)
    }));
    for l in 1..=3 {
        let f = ell(l as i64);
        out.push(timed(&format!("dissections-vs-ell-periodic-{l}"), || {
            check_dissection_counts(n, &CellFilter::EllPeriodic(l), &f)
        }));
    }
    out.push(timed("dissections-vs-tri-quad", || {
        check_dissection_counts(n, &CellFilter::SizeSet([3, 4].into()), &tq)
    }));
    out.push(timed("quiddities-vs-formula", || {
        check_quiddity_counts(scope.max_n_quiddity(), &q3)
    }));
    out.push(timed("series-catalan", || {
        let s = series::solve_fixed_point(EquationSpec::Catalan, order)?;
        for k in 0..=order {
            if s.coefficient(k, 0)? != BigInt::from(formulas::catalan(k as i64)?) {
                return Ok(Err(format!("[z^{k}] C differs")));
            }
        }
        Ok(Ok(format!("order {order}")))
    }));
    out.push(timed("series-kirkman-cayley", || {
        check_series(EquationSpec::KirkmanCayley, order, &kc)
    }));
    for l in 2..=3 {
        let f = ell(l as i64);
        out.push(timed(&format!("series-ell-periodic-{l}"), || {
            check_series(EquationSpec::EllPeriodic(l), order, &f)
        }));
    }
    out.push(timed("series-tri-quad", || {
        check_series(EquationSpec::TriQuad, order, &tq)
    }));
    out.push(timed("series-q-from-p", || check_q_series(order, &q3)));
    out.push(timed("lagrange-kirkman-cayley", || check_lagrange(12, &kc)));
    out.push(timed("surgery-classes", || check_surgery_structure(n)));
    out.push(timed("monodromy-forward", || check_monodromy_forward(n)));
    out.push(timed("monodromy-converse", || check_monodromy_converse(6)));
    out.push(timed("continued-fractions", || {
        Ok(check_continued_fractions(12))
    }));
    out
}
