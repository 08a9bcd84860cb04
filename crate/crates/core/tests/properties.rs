use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quiddity_core::bridges::{self, HJContinuedFraction, Mat2, Monodromy, RegularCF};
use quiddity_core::dissection::chords_cross;
use quiddity_core::enumerate::{self, CellFilter};
use quiddity_core::{formulas, surgery, BigInt, BigRational, Dissection};

/// Greedily keeps the candidate chords that are diagonals and cross nothing kept so far.
fn build(n: usize, candidates: &[(usize, usize)]) -> Dissection {
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for &(x, y) in candidates {
        let (a, b) = ((x % n).min(y % n), (x % n).max(y % n));
        let diagonal = b > a + 1 && !(a == 0 && b == n - 1);
        if diagonal && !kept.contains(&(a, b)) && kept.iter().all(|&c| !chords_cross(c, (a, b))) {
            kept.push((a, b));
        }
    }
    Dissection::new(n, kept).unwrap()
}

fn dissection() -> impl Strategy<Value = Dissection> {
    (
        3usize..=14,
        prop::collection::vec((0usize..14, 0usize..14), 0..24),
    )
        .prop_map(|(n, c)| build(n, &c))
}

proptest! {
    #[test]
    fn cell_structure(d in dissection()) {
        let cells = d.cells();
        let n = d.n_vertices();
        prop_assert_eq!(cells.cells.len(), d.chords().len() + 1);
        let total: usize = cells.cells.iter().map(|c| c.size()).sum();
        prop_assert_eq!(total, n + 2 * d.chords().len());
        prop_assert!(cells.dual_is_tree());
        prop_assert_eq!(cells.dual_edges.len(), d.chords().len());
        prop_assert!(cells.cells.iter().all(|c| c.size() >= 3));
    }

    #[test]
    fn quiddity_routes_agree(d in dissection()) {
        let q = d.quiddity();
        prop_assert_eq!(&q, &d.quiddity_from_cells(&d.cells()));
        let m = d.cell_count() as u64;
        prop_assert_eq!(q.sum(), d.n_vertices() as u64 + 2 * (m - 1));
        prop_assert_eq!(q.implied_cell_count(), m);
        prop_assert!(q.entries().iter().all(|&c| c >= 1));
    }

    #[test]
    fn text_round_trip(d in dissection()) {
        let text = d.to_string();
        prop_assert_eq!(text.parse::<Dissection>().unwrap(), d.clone());
        let json = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<Dissection>(&json).unwrap(), d);
    }

    #[test]
    fn chord_order_is_irrelevant(d in dissection(), seed in any::<u64>()) {
        let mut chords = d.chords().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..chords.len()).rev() {
            chords.swap(i, rng.gen_range(0..=i));
        }
        let flipped = chords.into_iter().map(|(a, b)| (b, a));
        prop_assert_eq!(Dissection::new(d.n_vertices(), flipped).unwrap(), d);
    }

    #[test]
    fn dihedral_moves_the_quiddity(d in dissection(), rot in -20i64..20, reflected in any::<bool>()) {
        let n = d.n_vertices() as i64;
        let image = d.dihedral_transform(rot, reflected);
        let q = d.quiddity();
        let qi = image.quiddity();
        for i in 0..n {
            let j = if reflected { -i + rot } else { i + rot }.rem_euclid(n);
            prop_assert_eq!(q.0[i as usize], qi.0[j as usize]);
        }
        prop_assert_eq!(image.cell_size_profile(), d.cell_size_profile());
        prop_assert!(d.dihedral_orbit().contains(&image));
    }

    #[test]
    fn legal_surgeries_preserve_quiddity(d in dissection()) {
        let q = d.quiddity();
        let periodic = d.is_ell_periodic(3).unwrap();
        for mv in surgery::find_surgeries(&d, false).unwrap() {
            let e = surgery::apply_surgery(&d, &mv).unwrap();
            prop_assert_eq!(e.quiddity(), q.clone());
            prop_assert_eq!(e.chords().len(), d.chords().len());
            prop_assert_eq!(e.cell_count(), d.cell_count());
        }
        if periodic {
            for mv in surgery::find_surgeries(&d, true).unwrap() {
                prop_assert!(surgery::apply_surgery(&d, &mv).unwrap().is_ell_periodic(3).unwrap());
            }
        }
    }
}

#[test]
fn pentagon_dissections_under_the_dihedral_group() {
    let all: BTreeSet<Dissection> = enumerate::enumerate_dissections(5, None, &CellFilter::All)
        .unwrap()
        .into_iter()
        .collect();
    assert_eq!(all.len(), 11);
    for d in &all {
        for rot in 0..5 {
            for reflected in [false, true] {
                let image = d.dihedral_transform(rot, reflected);
                assert!(all.contains(&image));
                assert_eq!(image.cell_count(), d.cell_count());
                let mut a = d.quiddity().0;
                let mut b = image.quiddity().0;
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }
    let orbits: BTreeSet<BTreeSet<Dissection>> = all.iter().map(|d| d.dihedral_orbit()).collect();
    // The empty pentagon, single chords, and the fan triangulations.
    assert_eq!(orbits.len(), 3);
}

#[test]
fn surgery_preserves_quiddity_exhaustively() {
    for n in 6..=10 {
        enumerate::for_each_dissection(n, None, &CellFilter::All, |d| {
            let q = d.quiddity();
            for mv in surgery::find_surgeries(&d, false).unwrap() {
                let e = surgery::apply_surgery(&d, &mv).unwrap();
                assert_eq!(e.quiddity(), q, "{d} -> {e}");
                let back = surgery::find_surgeries(&e, false).unwrap();
                assert!(
                    back.iter()
                        .any(|r| surgery::apply_surgery(&e, r).unwrap() == d),
                    "{e} cannot undo to {d}"
                );
            }
        })
        .unwrap();
    }
}

#[test]
fn three_periodic_classes_count_like_the_formula() {
    for n in 3..=10 {
        for m in 1..=n - 2 {
            let table = enumerate::quiddity_classes(n, m, &CellFilter::EllPeriodic(3)).unwrap();
            let mut surgery_classes: BTreeSet<BTreeSet<Dissection>> = BTreeSet::new();
            for members in table.classes.values() {
                surgery_classes.insert(surgery::surgery_class(&members[0], true).unwrap());
            }
            let want = formulas::quiddity_count_3periodic(n as i64 - 2, m as i64).unwrap();
            assert_eq!(
                quiddity_core::BigUint::from(surgery_classes.len()),
                want,
                "N={n} m={m}"
            );
        }
    }
}

#[test]
fn fourteen_gon_opens_in_two_surgeries() {
    let d: Dissection = "14:1-13,2-13,3-13,5-11,8-10".parse().unwrap();
    assert_eq!(d.cell_size_profile(), [3, 3, 3, 3, 6, 6]);
    let (open, moves) = surgery::canonicalize_traced(&d).unwrap();
    assert_eq!(moves.len(), 2);
    assert_eq!(open.to_string(), "14:1-13,2-8,3-5,10-13,11-13");
    assert!(surgery::is_maximally_open(&open).unwrap());
    assert!(!surgery::is_maximally_open(&d).unwrap());
    assert_eq!(open.quiddity(), d.quiddity());
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let (r, _) = surgery::canonicalize_with(&d, |_, m| rng.gen_range(0..m.len())).unwrap();
        assert_eq!(r, open);
    }
}

#[test]
fn random_larger_three_periodic_dissections_canonicalize_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let all = enumerate::enumerate_dissections(13, None, &CellFilter::EllPeriodic(3)).unwrap();
    for _ in 0..40 {
        let d = &all[rng.gen_range(0..all.len())];
        let open = surgery::canonicalize_maximally_open(d).unwrap();
        assert_eq!(open.quiddity(), d.quiddity());
        for _ in 0..5 {
            let (r, _) = surgery::canonicalize_with(d, |_, m| rng.gen_range(0..m.len())).unwrap();
            assert_eq!(r, open, "{d}");
        }
    }
}

#[test]
fn tri_quad_pair_is_out_of_surgery_reach() {
    let f = CellFilter::SizeSet([3, 4].into());
    let mut found = None;
    for m in 1..=6 {
        let t = enumerate::quiddity_classes(8, m, &f).unwrap();
        found = found.or_else(|| t.classes.values().find(|v| v.len() > 1).cloned());
    }
    let pair = found.expect(
        "an equal-quiddity pair among octagon dissections into triangles and quadrilaterals",
    );
    for d in &pair {
        assert!(surgery::find_surgeries(d, false).unwrap().is_empty());
    }
}

#[test]
fn two_periodic_quiddity_classes_split_under_surgery() {
    let f = CellFilter::EllPeriodic(2);
    let mut witness = None;
    for m in 1..=8 {
        for members in enumerate::quiddity_classes(10, m, &f)
            .unwrap()
            .classes
            .values()
        {
            let class = surgery::surgery_class(&members[0], false).unwrap();
            if let Some(other) = members.iter().find(|d| !class.contains(d)) {
                witness = Some((members[0].clone(), other.clone()));
            }
        }
    }
    let (a, b) = witness.expect("a triangle/pentagon class split under surgery at N = 10");
    assert_eq!(a.quiddity(), b.quiddity());
}

fn random_regular(rng: &mut ChaCha8Rng, max_sum: u64) -> RegularCF {
    loop {
        let len = 2 * rng.gen_range(1..=4);
        let terms: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=5)).collect();
        if terms.iter().sum::<u64>() <= max_sum {
            return RegularCF::new(terms).unwrap();
        }
    }
}

/// Value of `[a_1; a_2, ...]` from the product of `((a, 1), (1, 0))`.
fn regular_by_matrices(a: &[u64]) -> BigRational {
    let m = a.iter().fold(Mat2::identity(), |acc, &x| {
        &acc * &Mat2::new(x as i64, 1, 1, 0)
    });
    BigRational::new(m.a.clone(), m.c.clone())
}

#[test]
fn expansions_agree_on_random_fractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..200 {
        let cf = random_regular(&mut rng, 20);
        let v = bridges::eval_regular(&cf);
        assert_eq!(v, regular_by_matrices(cf.terms()));
        let hj = bridges::regular_to_hj(&cf);
        assert_eq!(bridges::eval_hj(&hj), v);
        let m = bridges::elementary_product(hj.terms()).unwrap();
        assert_eq!(BigRational::new(m.a.clone(), m.c.clone()), v);
        assert_eq!(bridges::hj_to_regular(&hj), cf);
        assert_eq!(RegularCF::from_rational(&v).unwrap(), cf);
        assert_eq!(HJContinuedFraction::from_rational(&v).unwrap(), hj);
    }
}

#[test]
fn random_strips_read_their_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let cf = random_regular(&mut rng, 12);
        let strip = bridges::strip_triangulation(&cf);
        let sum: u64 = cf.terms().iter().sum();
        assert_eq!(strip.dissection.cell_count() as u64, sum);
        assert!(strip.dissection.cell_size_profile().iter().all(|&s| s == 3));
        let hj = bridges::regular_to_hj(&cf);
        let top = strip.top_quiddity();
        assert_eq!(top.len(), hj.terms().len() + 1);
        assert!(top.iter().zip(hj.terms()).all(|(&c, &h)| c as u64 == h));
        assert_eq!(*top.last().unwrap(), 1);
    }
}

#[test]
fn monodromy_matches_the_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut seen = [0usize; 3];
    for trial in 0..100 {
        // A third of the tuples come from triangulations so that -Id is exercised.
        let c: Vec<u64> = if trial % 3 == 0 {
            let n = rng.gen_range(3..=9);
            let t = enumerate::enumerate_dissections(n, Some(n - 2), &CellFilter::All).unwrap();
            t[rng.gen_range(0..t.len())]
                .quiddity()
                .0
                .into_iter()
                .map(u64::from)
                .collect()
        } else {
            (0..rng.gen_range(1..=8))
                .map(|_| rng.gen_range(1..=4))
                .collect()
        };
        let class = bridges::classify_monodromy(&c).unwrap().classification;
        let sign = bridges::recurrence_period_sign(&c);
        let mut by_iteration = Monodromy::Neither;
        for s in [1i32, -1] {
            let basis = [
                (BigInt::from(1), BigInt::from(0)),
                (BigInt::from(0), BigInt::from(1)),
            ];
            if basis.iter().all(|(v0, v1)| {
                let (vn, vn1) = bridges::iterate_recurrence(&c, v0.clone(), v1.clone());
                vn == v0 * BigInt::from(s) && vn1 == v1 * BigInt::from(s)
            }) {
                by_iteration = if s == 1 {
                    Monodromy::PlusIdentity
                } else {
                    Monodromy::MinusIdentity
                };
            }
        }
        assert_eq!(class, by_iteration, "{c:?}");
        let expected_sign = match class {
            Monodromy::PlusIdentity => Some(1),
            Monodromy::MinusIdentity => Some(-1),
            Monodromy::Neither => None,
        };
        assert_eq!(sign, expected_sign, "{c:?}");
        seen[match class {
            Monodromy::PlusIdentity => 0,
            Monodromy::MinusIdentity => 1,
            Monodromy::Neither => 2,
        }] += 1;
    }
    assert!(seen[1] > 0 && seen[2] > 0);
}

#[test]
fn classification_is_invariant_under_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let mut c: Vec<u64> = (0..rng.gen_range(1..=9))
            .map(|_| rng.gen_range(1..=4))
            .collect();
        let class = bridges::classify_monodromy(&c).unwrap().classification;
        for _ in 0..c.len() {
            c.rotate_left(1);
            assert_eq!(
                bridges::classify_monodromy(&c).unwrap().classification,
                class
            );
        }
    }
}

/// Shortest positive tuple with entries `<= 3` whose elementary product is `target`.
fn factor(target: &Mat2, max_len: usize) -> Option<Vec<u64>> {
    let mut frontier: Vec<(Vec<u64>, Mat2)> = vec![(vec![], Mat2::identity())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, m) in &frontier {
            for c in 1..=3u64 {
                let p = m * &Mat2::elementary(c as i64);
                let mut w = word.clone();
                w.push(c);
                if &p == target {
                    return Some(w);
                }
                next.push((w, p));
            }
        }
        frontier = next;
    }
    None
}

#[test]
fn sample_modular_matrices_factor_into_elementary_ones() {
    let samples = [
        Mat2::new(1, 1, 0, 1),
        Mat2::new(0, -1, 1, 0),
        Mat2::new(1, 0, 1, 1),
        Mat2::new(2, 1, 1, 1),
        Mat2::new(3, -2, 2, -1),
        Mat2::minus_identity(),
        Mat2::identity(),
    ];
    for a in &samples {
        assert_eq!(a.det(), BigInt::from(1));
        let w = factor(a, 8).unwrap_or_else(|| panic!("no factorization of {a} found"));
        assert_eq!(&bridges::elementary_product(&w).unwrap(), a);
    }
}
