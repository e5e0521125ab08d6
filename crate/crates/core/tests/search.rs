mod common;

use pingpong::certificate::check_wandering_certificate;
use pingpong::circle::{CircleModel, CircleRegion, Mobius};
use pingpong::model::{BoundaryModel, CertKind, ElementKind};
use pingpong::search::*;
use pingpong::symbolic::SymbolicModel;
use pingpong::word::Alphabet;
use pingpong::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arc(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> CircleRegion {
    CircleRegion::rational_arc(a, b)
}

fn single(matrix: [i64; 4]) -> CircleModel {
    let al = Alphabet::new(vec!["g".into()], vec![0]).unwrap();
    let g = Mobius::from_i64(matrix[0], matrix[1], matrix[2], matrix[3]).unwrap();
    let al = match CircleModel::new(al, vec![g.clone()]) {
        Ok(m) => return m,
        Err(_) => Alphabet::new(vec!["g".into()], vec![order_of(&g)]).unwrap(),
    };
    CircleModel::new(al, vec![g]).unwrap()
}

fn order_of(g: &Mobius) -> u32 {
    let mut p = g.clone();
    for n in 1..=12 {
        if p.is_identity() {
            return n;
        }
        p = p.mul(g);
    }
    0
}

#[test]
fn loxodromic_into_prescribed_arcs() {
    let m = CircleModel::psl2z();
    let u = arc(Some((1, 1)), Some((2, 1)));
    let v = arc(Some((-2, 1)), Some((-1, 1)));
    let h = find_loxodromic(&m, &u, &v, &SearchBudget::default()).unwrap();
    let c = m.classify(&h.element).unwrap();
    assert_eq!(c.kind, ElementKind::Loxodromic);
    let (plus, minus) = (c.attracting().unwrap(), c.repelling().unwrap());
    assert!(m.interior_contains_point(&u, plus) && m.interior_contains_point(&v, minus));
    assert_eq!(&m.apply_point(&h.element, plus), plus);
    assert_eq!(m.evaluate(&h.word), h.element);
}

#[test]
fn unconstrained_loxodromic_is_the_first_in_bfs_order() {
    let m = CircleModel::psl2z();
    let h = find_loxodromic(&m, &m.full(), &m.full(), &SearchBudget::default()).unwrap();
    assert_eq!(m.classify(&h.element).unwrap().kind, ElementKind::Loxodromic);
    let al = m.alphabet();
    for w in words_in_order(al, h.word.letter_len(al.orders()) - 1) {
        let k = m.classify(&m.evaluate(&al.from_letters(&w))).unwrap().kind;
        assert_ne!(k, ElementKind::Loxodromic);
    }
}

#[test]
fn finite_group_has_no_loxodromic() {
    let m = single([0, -1, 1, 0]);
    let r = find_loxodromic(&m, &m.full(), &m.full(), &SearchBudget::default());
    assert!(matches!(r, Err(Error::BudgetExhausted(_))));
}

#[test]
fn symbolic_placement_uses_the_short_word() {
    let m = SymbolicModel::f2();
    let sigma = m.complement(&m.cylinders(&["B"]).unwrap());
    let o = m.cylinders(&["ab"]).unwrap();
    let d = place(&m, &sigma, &o, &SearchBudget::default()).unwrap();
    assert_eq!(m.format_element(&d.element), "ab");
    assert!(m.contains(&o, &m.apply_region(&d.element, &sigma).unwrap()));
}

#[test]
fn placement_edge_cases() {
    let m = SymbolicModel::f2();
    let b = SearchBudget::default();
    let o = m.cylinders(&["ab"]).unwrap();
    assert!(place(&m, &m.empty(), &o, &b).unwrap().word.is_identity());
    assert!(matches!(place(&m, &m.full(), &o, &b), Err(Error::ImproperSigma)));
}

#[test]
fn circle_placement_through_a_loxodromic_power() {
    let m = CircleModel::psl2z();
    let sigma = arc(Some((2, 1)), Some((-3, 1)));
    let o = arc(Some((1, 3)), Some((1, 2)));
    let d = place(&m, &sigma, &o, &SearchBudget::default()).unwrap();
    assert!(m.contains(&o, &m.apply_region(&d.element, &sigma).unwrap()));
}

#[test]
fn parabolic_wandering_certificate() {
    let m = single([1, 1, 0, 1]);
    let cert = find_wandering_certificate(&m, &m.alphabet().parse_word("g").unwrap(), &SearchBudget::default()).unwrap();
    assert_eq!(
        cert.kind,
        CertKind::InfiniteOrder { omega_minus: arc(None, Some((0, 1))), omega_plus: arc(Some((1, 1)), None) }
    );
    assert_eq!(common::sampled_wandering_violations(&m, &cert, 100, 50), 0);
}

#[test]
fn golden_and_elliptic_wandering_certificates() {
    for matrix in [[2, 1, 1, 1], [0, -1, 1, 0], [0, -1, 1, -1], [1, 1, 0, 1], [1, 0, -1, 1], [3, 0, 0, 1]] {
        let m = single(matrix);
        let w = m.alphabet().parse_word("g").unwrap();
        let cert = find_wandering_certificate(&m, &w, &SearchBudget::default()).unwrap();
        assert!(check_wandering_certificate(&m, &cert).unwrap().is_valid());
        assert_eq!(common::sampled_wandering_violations(&m, &cert, 100, 50), 0, "{matrix:?}");
    }
}

#[test]
fn conjugation_into_wandering_position() {
    let m = SymbolicModel::f2();
    let b = SearchBudget::default();
    let sigma = m.complement(&m.cylinders(&["ba"]).unwrap());
    let c = conjugate_to_wandering(&m, &m.word("a").unwrap(), &sigma, &b).unwrap();
    assert!(check_wandering_certificate(&m, &c.cert).unwrap().is_valid());
    assert!(m.contains(&c.cert.sigma(&m), &sigma));
    let al = m.alphabet();
    assert_eq!(c.cert.word, al.conjugate(&m.word("a").unwrap(), &c.delta.word));

    let inside = c.initial.sigma(&m);
    let again = conjugate_to_wandering(&m, &m.word("a").unwrap(), &inside, &b).unwrap();
    assert!(again.delta.word.is_identity());
    assert!(matches!(conjugate_to_wandering(&m, &m.word("1").unwrap(), &sigma, &b), Err(Error::IdentityElement)));
}

#[test]
fn circle_conjugation_for_every_kind() {
    let m = CircleModel::psl2z();
    let b = SearchBudget::default();
    let sigma = m.complement(&arc(Some((1, 4)), Some((1, 3))));
    for w in ["s", "t", "t^2", "st", "stst^2"] {
        let c = conjugate_to_wandering(&m, &m.alphabet().parse_word(w).unwrap(), &sigma, &b).unwrap();
        assert!(check_wandering_certificate(&m, &c.cert).unwrap().is_valid(), "{w}");
        assert!(m.contains(&c.cert.sigma(&m), &sigma), "{w}");
        assert_eq!(common::sampled_wandering_violations(&m, &c.cert, 50, 50), 0, "{w}");
    }
}

#[test]
fn collapse_of_powers() {
    let m = SymbolicModel::f2();
    let a = m.word("a").unwrap();
    let elements: Vec<_> = (1..=20).map(|n| m.alphabet().pow(&a, n)).collect();
    let samples = m.sample_interior_points(&m.full(), 12);
    match collapse_diagnostic(&m, &elements, &samples, 3) {
        CollapseReport::Collapse { attracting_key, repelling_key, .. } => {
            assert_eq!(attracting_key, "aaa");
            assert_eq!(repelling_key, "AAA");
        }
        CollapseReport::NoCollapse => panic!("no collapse"),
    }
    let ids = vec![m.word("1").unwrap(); 5];
    assert_eq!(collapse_diagnostic(&m, &ids, &samples, 3), CollapseReport::NoCollapse);
}

#[test]
fn collapse_among_random_words() {
    let m = SymbolicModel::f2();
    let al = m.alphabet();
    let letters = al.letters();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut elements = Vec::new();
    while elements.len() < 20 {
        let raw: Vec<_> = (0..rng.gen_range(6..12)).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let w = al.from_letters(&al.reduce_letters(raw));
        if w.syllable_len() > 2 && !elements.contains(&w) {
            elements.push(w);
        }
    }
    let samples = m.sample_interior_points(&m.full(), 12);
    assert!(matches!(collapse_diagnostic(&m, &elements, &samples, 1), CollapseReport::Collapse { .. }));
}
