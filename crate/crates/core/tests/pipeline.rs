mod common;

use pingpong::certificate::{check_pingpong_table, limit_set_bound};
use pingpong::circle::CircleModel;
use pingpong::classes::{first_classes, ConjugacyClassRep};
use pingpong::model::BoundaryModel;
use pingpong::pipeline::{build_independent_set, IndependentSetCertificate, SlotLayout};
use pingpong::presentation::GroupPresentation;
use pingpong::search::SearchBudget;
use pingpong::symbolic::SymbolicModel;

fn requests(p: &GroupPresentation, n: usize) -> Vec<(ConjugacyClassRep, usize)> {
    first_classes(p, n, 8).unwrap().into_iter().map(|c| (c, 1)).collect()
}

fn reverify<M: SlotLayout>(m: &M, cert: &IndependentSetCertificate<M>) {
    assert!(check_pingpong_table(m, &cert.table).unwrap().is_valid());
    assert!(limit_set_bound(m, &cert.table, 3, &cert.witness).unwrap().is_proper());
    let al = m.alphabet();
    for c in &cert.classes {
        assert_eq!(c.conjugate, al.conjugate(&c.representative, &c.delta));
        assert_eq!(common::sampled_wandering_violations(m, &c.cert, 20, 20), 0);
        assert!(m.contains(&c.omega, &c.cert.covered(m)));
    }
    for e in &cert.table.entries {
        assert!(m.disjoint(&e.omega, &cert.witness));
    }
}

#[test]
fn free_group_two_classes() {
    let m = SymbolicModel::f2();
    let cert = build_independent_set(&m, &requests(&GroupPresentation::f2(), 2), &SearchBudget::default(), 4).unwrap();
    assert_eq!(cert.classes.len(), 2);
    assert_eq!(m.region_to_json(&cert.witness).to_string(), r#"["B"]"#);
    reverify(&m, &cert);
}

#[test]
fn modular_group_three_classes() {
    let m = CircleModel::psl2z();
    let cert = build_independent_set(&m, &requests(&GroupPresentation::psl2z(), 3), &SearchBudget::default(), 3).unwrap();
    assert_eq!(cert.classes.iter().map(|c| c.key.as_str()).collect::<Vec<_>>(), ["s", "t", "t^2"]);
    reverify(&m, &cert);
}

#[test]
fn empty_request_gives_the_window() {
    let m = CircleModel::psl2z();
    let cert = build_independent_set(&m, &[], &SearchBudget::default(), 3).unwrap();
    assert!(cert.table.entries.is_empty());
    assert_eq!(cert.witness, m.slot_layout(0).1);
    assert!(check_pingpong_table(&m, &cert.table).unwrap().is_valid());
}

#[test]
fn multiplicities_are_respected() {
    let p = GroupPresentation::f2();
    let cs = first_classes(&p, 3, 4).unwrap();
    let reqs: Vec<_> = cs.into_iter().zip([3, 1, 2]).collect();
    let m = SymbolicModel::f2();
    let cert = build_independent_set(&m, &reqs, &SearchBudget::default(), 3).unwrap();
    for (c, k) in &reqs {
        assert_eq!(cert.classes.iter().filter(|x| x.key == c.key).count(), *k);
    }
    reverify(&m, &cert);
}
