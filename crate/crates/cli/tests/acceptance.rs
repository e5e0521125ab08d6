//! Acceptance suite: one PASS/FAIL line per criterion, with wall time.

#[path = "acceptance/controls.rs"]
mod controls;
#[path = "acceptance/pipelines.rs"]
mod pipelines;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use anyhow::{ensure, Result};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pingpong::certificate::{
    check_wandering_certificate, recover_word, PingPongTable, ReducedExpression, TableEntry, WanderingCertificate,
};
use pingpong::circle::{parse_matrix, CircleModel, CircleRegion};
use pingpong::classes::{first_classes, ConjugacyClassRep};
use pingpong::exact::{ProjectivePoint, QuadraticNumber, Rational};
use pingpong::model::{an_region, BoundaryModel, CertKind, ElementKind};
use pingpong::pipeline::{build_independent_set, IndependentSetCertificate, SlotLayout};
use pingpong::presentation::GroupPresentation;
use pingpong::search::SearchBudget;
use pingpong::symbolic::SymbolicModel;

pub const SEED: u64 = 0x5eed;

/// Sampled wandering check, written without the certificate checker: for
/// interior points `s` of `Σ` and `0 < |k| ≤ kmax` (skipping multiples of a
/// finite order), `γᵏ·s` must leave `Σ`.
pub fn sampled_violations<M: BoundaryModel>(m: &M, cert: &WanderingCertificate<M>, samples: usize, kmax: i64) -> usize {
    let sigma = cert.sigma(m);
    let order = cert.order().map(|n| n as i64);
    let ginv = m.inverse(&cert.gamma);
    let mut bad = 0;
    for s in m.sample_interior_points(&sigma, samples) {
        let (mut fwd, mut back) = (s.clone(), s);
        for k in 1..=kmax {
            fwd = m.apply_point(&cert.gamma, &fwd);
            back = m.apply_point(&ginv, &back);
            if order.is_some_and(|n| k % n == 0) {
                continue;
            }
            bad += m.contains_point(&sigma, &fwd) as usize + m.contains_point(&sigma, &back) as usize;
        }
    }
    bad
}

pub fn requests(p: &GroupPresentation, n: usize) -> Vec<(ConjugacyClassRep, usize)> {
    first_classes(p, n, 10).expect("enough classes").into_iter().map(|c| (c, 1)).collect()
}

pub fn pipeline<M: SlotLayout>(m: &M, p: &GroupPresentation, n: usize, depth: u32) -> Result<IndependentSetCertificate<M>> {
    Ok(build_independent_set(m, &requests(p, n), &SearchBudget::default(), depth)?)
}

pub fn worked_f2_table(m: &SymbolicModel) -> PingPongTable<SymbolicModel> {
    let entry = |word: &str, minus: &str, plus: &str| {
        let w = m.word(word).unwrap();
        let kind = CertKind::InfiniteOrder {
            omega_minus: m.cylinders(&[minus]).unwrap(),
            omega_plus: m.cylinders(&[plus]).unwrap(),
        };
        let cert = WanderingCertificate::new(m, w.clone(), kind);
        TableEntry { alpha: m.evaluate(&w), word: w, omega: m.cylinders(&[minus, plus]).unwrap(), cert }
    };
    PingPongTable {
        entries: vec![entry("baB", "bA", "ba"), entry("abA", "aB", "ab")],
        basepoint: m.parse_point("(B)").unwrap(),
    }
}

/// A random reduced expression over `table` with at most `max_len` syllables.
pub fn random_expression<M: BoundaryModel>(
    rng: &mut ChaCha8Rng,
    table: &PingPongTable<M>,
    max_len: usize,
) -> ReducedExpression {
    let n = table.entries.len();
    let len = if n < 2 { rng.gen_range(0..=1) } else { rng.gen_range(0..=max_len) };
    let mut syllables: Vec<(usize, i64)> = Vec::with_capacity(len);
    while syllables.len() < len {
        let i = rng.gen_range(0..n);
        if syllables.last().is_some_and(|&(k, _)| k == i) {
            continue;
        }
        let j = match table.entries[i].cert.order() {
            Some(order) => rng.gen_range(1..order as i64),
            None => rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 },
        };
        syllables.push((i, j));
    }
    ReducedExpression { syllables }
}

fn criterion(n: u32, limit_secs: f64, f: impl FnOnce() -> Result<String>) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(Ok(d)) if secs < limit_secs => (true, d),
        Ok(Ok(d)) => (false, format!("{d}; over the {limit_secs} s limit")),
        Ok(Err(e)) => (false, format!("{e:#}")),
        Err(_) => (false, "panicked".into()),
    };
    println!("criterion {n:>2}: {} {detail} [{secs:.2} s]", if pass { "PASS" } else { "FAIL" });
    pass
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn classification_suite() -> Result<String> {
    let m = CircleModel::psl2z();
    let c = |s: &str| m.classify_matrix(&parse_matrix(s).unwrap()).unwrap();
    let par = c("[[1,1],[0,1]]");
    ensure!(par.kind == ElementKind::Parabolic && par.fixed_points == [ProjectivePoint::Infinity]);
    let lox = c("[[2,1],[1,1]]");
    let root = |sign| ProjectivePoint::Finite(QuadraticNumber::new(q(1, 2), q(sign, 2), BigInt::from(5)).unwrap());
    ensure!(lox.kind == ElementKind::Loxodromic);
    ensure!(lox.fixed_points == [root(-1), root(1)], "fixed points {:?}", lox.fixed_points);
    ensure!(c("[[0,-1],[1,0]]").kind == ElementKind::Elliptic { order: 2 });
    ensure!(c("[[0,-1],[1,-1]]").kind == ElementKind::Elliptic { order: 3 });
    Ok("parabolic, loxodromic (1±√5)/2, elliptic orders 2 and 3".into())
}

fn an_region_structure() -> Result<String> {
    let m = CircleModel::psl2z();
    let g = parse_matrix("[[1,1],[0,1]]")?;
    let arc = |s: Option<(i64, i64)>, e: Option<(i64, i64)>| CircleRegion::rational_arc(s, e);
    let a = arc(Some((2, 1)), None);
    let a1 = an_region(&m, &g, &a, 1)?;
    let a2 = an_region(&m, &g, &a, 2)?;
    ensure!(a1 == arc(Some((1, 1)), None), "A1 = {a1:?}");
    ensure!(a2 == arc(Some((0, 1)), None), "A2 = {a2:?}");
    // A2 \ A1 = [0, 1), decided pointwise
    let in_diff = |p: &ProjectivePoint| m.contains_point(&a2, p) && !m.contains_point(&a1, p);
    let (zero, one) = (ProjectivePoint::integer(0), ProjectivePoint::integer(1));
    ensure!(in_diff(&zero) && !in_diff(&one) && !in_diff(&ProjectivePoint::Infinity));
    let closure = arc(Some((0, 1)), Some((1, 1)));
    let samples = m.sample_interior_points(&closure, 100);
    ensure!(samples.len() >= 10);
    let mut checked = 0;
    for s in &samples {
        for k in (-50i64..=50).filter(|&k| k != 0) {
            ensure!(!in_diff(&m.apply_point(&m.power(&g, k), s)), "γ^{k} returns {s:?}");
            checked += 1;
        }
    }
    Ok(format!("A1 = [1,∞], A2 = [0,∞], [0,1) wandering on {checked} sampled iterates"))
}

fn soundness_of<M: SlotLayout>(m: &M, cert: &IndependentSetCertificate<M>) -> (usize, usize) {
    let bad = cert
        .classes
        .iter()
        .map(|c| {
            let valid = check_wandering_certificate(m, &c.cert).is_ok_and(|v| v.is_valid());
            sampled_violations(m, &c.cert, 100, 50) + usize::from(!valid)
        })
        .sum();
    (cert.classes.len(), bad)
}

fn wandering_soundness() -> Result<String> {
    let (f2, psl, sanov) = (SymbolicModel::f2(), CircleModel::psl2z(), CircleModel::sanov());
    let modular = GroupPresentation::free_product(&["s", "t"], &[2, 3]);
    let pslsym = SymbolicModel::new(modular.alphabet()?)?;
    let parts = [
        soundness_of(&f2, &pipeline(&f2, &GroupPresentation::f2(), 15, 2)?),
        soundness_of(&psl, &pipeline(&psl, &GroupPresentation::psl2z(), 8, 2)?),
        soundness_of(&sanov, &pipeline(&sanov, &GroupPresentation::sanov(), 12, 2)?),
        soundness_of(&pslsym, &pipeline(&pslsym, &modular, 15, 2)?),
    ];
    let certs: usize = parts.iter().map(|p| p.0).sum();
    let bad: usize = parts.iter().map(|p| p.1).sum();
    ensure!(certs == 50, "{certs} certificates");
    ensure!(bad == 0, "{bad} sampled violations");
    Ok(format!("{certs} certificates, 100 points × k ∈ [-50,50], 0 violations"))
}

fn round_trip_on<M: BoundaryModel>(m: &M, table: &PingPongTable<M>, rng: &mut ChaCha8Rng, n: usize) -> Result<usize> {
    let mut nonempty = 0;
    for _ in 0..n {
        let expr = random_expression(rng, table, 30);
        let g = expr.evaluate(m, table);
        ensure!(m.is_identity(&g) == expr.syllables.is_empty(), "identity collision at {expr}");
        let back = recover_word(m, table, &g, 100)?;
        ensure!(back == expr, "recovered {back} for {expr}");
        nonempty += usize::from(!expr.syllables.is_empty());
    }
    Ok(nonempty)
}

fn pingpong_round_trip() -> Result<String> {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(SEED);
    let f2 = SymbolicModel::f2();
    let a = round_trip_on(&f2, &worked_f2_table(&f2), &mut rng, 1000)?;
    let psl = CircleModel::psl2z();
    let table = pipeline(&psl, &GroupPresentation::psl2z(), 8, 2)?.table;
    let b = round_trip_on(&psl, &table, &mut rng, 1000)?;
    Ok(format!("2 × 1000 expressions recovered exactly ({a} + {b} nonempty), no identity collisions"))
}

fn main() {
    let results = [
        criterion(1, 1.0, classification_suite),
        criterion(2, 1.0, an_region_structure),
        criterion(3, 60.0, wandering_soundness),
        criterion(4, 30.0, pingpong_round_trip),
        criterion(5, 120.0, pipelines::symbolic_theorem),
        criterion(6, 300.0, pipelines::matrix_theorem),
        criterion(7, 60.0, pipelines::wiegold_construction),
        criterion(8, 60.0, pipelines::multiplicities),
        criterion(9, 60.0, controls::negative_controls),
        criterion(10, 120.0, controls::cross_model),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
