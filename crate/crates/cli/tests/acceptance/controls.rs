use std::collections::BTreeSet;
use std::process::Command;

use anyhow::{bail, ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pingpong::certificate::{check_pingpong_table, recover_word, PingPongTable, Verdict, WanderingCertificate};
use pingpong::circle::CircleModel;
use pingpong::classes::class_key;
use pingpong::folding::{fold, folding_oracle, FoldingVerdict};
use pingpong::model::{BoundaryModel, CertKind, ElementKind};
use pingpong::presentation::GroupPresentation;
use pingpong::schema;
use pingpong::symbolic::SymbolicModel;
use pingpong::word::{Alphabet, GroupWord};
use pingpong::Error;

use super::{pipeline, random_expression, worked_f2_table, SEED};

fn violation<M: BoundaryModel>(m: &M, t: &PingPongTable<M>) -> Result<Option<pingpong::certificate::Violation>> {
    Ok(match check_pingpong_table(m, t)? {
        Verdict::Valid => None,
        Verdict::Violation(v) => Some(v),
    })
}

/// `certify` on the serialized table must exit 1 and print a witness.
fn cli_rejects(m: &SymbolicModel, t: &PingPongTable<SymbolicModel>, dir: &tempfile::TempDir, name: &str) -> Result<()> {
    let path = dir.path().join(name);
    let doc = schema::table_to_json(m, &GroupPresentation::f2(), t, Some(&m.cylinders(&["B"])?));
    std::fs::write(&path, doc.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_pingpong")).arg("certify").arg(&path).output()?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(out.status.code() == Some(1), "{name}: exit {:?}", out.status.code());
    ensure!(text.contains("witness"), "{name}: {text}");
    Ok(())
}

fn named_controls() -> Result<()> {
    let m = SymbolicModel::f2();
    let base = worked_f2_table(&m);
    let dir = tempfile::TempDir::new()?;

    let mut overlap = base.clone();
    overlap.entries[1].omega = m.cylinders(&["aB", "ab", "baa"])?;
    let v = violation(&m, &overlap)?.ok_or_else(|| anyhow::anyhow!("overlap accepted"))?;
    ensure!(v.condition.contains("disjoint") && v.witness.is_some(), "overlap: {v}");
    cli_rejects(&m, &overlap, &dir, "overlap.json")?;

    let mut inside = base.clone();
    inside.basepoint = m.parse_point("ba(b)")?;
    let v = violation(&m, &inside)?.ok_or_else(|| anyhow::anyhow!("basepoint inside accepted"))?;
    ensure!(v.condition.contains("basepoint") && v.witness.is_some(), "basepoint: {v}");
    cli_rejects(&m, &inside, &dir, "basepoint.json")?;

    // Ω⁺ = C_ba ∪ C_bA keeps the first inclusion but γ·C_bA leaves Ω⁺
    let mut plus = base.clone();
    let e = &mut plus.entries[0];
    e.cert = WanderingCertificate::new(
        &m,
        e.word.clone(),
        CertKind::InfiniteOrder { omega_minus: m.cylinders(&["bA"])?, omega_plus: m.cylinders(&["ba", "bA"])? },
    );
    let v = violation(&m, &plus)?.ok_or_else(|| anyhow::anyhow!("Ω⁺ mutation accepted"))?;
    ensure!(v.condition.contains("(ii)") && v.witness.is_some(), "Ω⁺: {v}");
    cli_rejects(&m, &plus, &dir, "omega_plus.json")?;
    Ok(())
}

/// A mutation that makes the table unsound by construction, or `None` when
/// the chosen kind does not apply to the chosen entry.
fn mutate<M: BoundaryModel>(m: &M, t: &PingPongTable<M>, kind: u32, i: usize, j: usize) -> Result<Option<PingPongTable<M>>> {
    let mut out = t.clone();
    let e = &t.entries[i];
    match kind {
        // some other Ωⱼ swallows part of the interior of Ωᵢ
        0 if i != j => {
            let inner = m.interior_subregion(&e.omega);
            out.entries[j].omega = m.union(&t.entries[j].omega, &inner);
        }
        // basepoint moved into the interior of Ωᵢ
        1 => out.basepoint = m.sample_interior_point(&e.omega)?,
        // Ω⁺ loses a neighbourhood of the attracting point, or a finite order is misreported
        2 => match &e.cert.kind {
            CertKind::InfiniteOrder { omega_minus, omega_plus } => {
                let class = m.classify(&e.alpha)?;
                let Some(w) = (0..16).find_map(|l| m.attracting_neighbourhood(&e.alpha, &class, l)) else {
                    return Ok(None);
                };
                let kind = CertKind::InfiniteOrder {
                    omega_minus: omega_minus.clone(),
                    omega_plus: m.intersect(omega_plus, &m.complement(&w)),
                };
                out.entries[i].cert = WanderingCertificate::new(m, e.word.clone(), kind);
            }
            CertKind::FiniteOrder { order, omega } => {
                let kind = CertKind::FiniteOrder { order: order + 1, omega: omega.clone() };
                out.entries[i].cert = WanderingCertificate::new(m, e.word.clone(), kind);
            }
        },
        // the entry replaced by its inverse, regions unchanged
        3 => {
            let CertKind::InfiniteOrder { omega_plus, .. } = &e.cert.kind else { return Ok(None) };
            let class = m.classify(&e.alpha)?;
            let rep = class.repelling().expect("infinite order");
            if class.kind != ElementKind::Loxodromic || m.contains_point(omega_plus, rep) {
                return Ok(None);
            }
            let inv = m.alphabet().inverse(&e.word);
            out.entries[i].alpha = m.evaluate(&inv);
            out.entries[i].word = inv.clone();
            out.entries[i].cert = WanderingCertificate::new(m, inv, e.cert.kind.clone());
        }
        _ => return Ok(None),
    }
    Ok(Some(out))
}

fn mutation_round<M: BoundaryModel>(m: &M, t: &PingPongTable<M>, rng: &mut ChaCha8Rng) -> Result<bool> {
    ensure!(check_pingpong_table(m, t)?.is_valid(), "base table must be valid");
    let n = t.entries.len();
    loop {
        let (kind, i, j) = (rng.gen_range(0..4), rng.gen_range(0..n), rng.gen_range(0..n));
        if let Some(bad) = mutate(m, t, kind, i, j)? {
            return Ok(!check_pingpong_table(m, &bad)?.is_valid());
        }
    }
}

pub fn negative_controls() -> Result<String> {
    named_controls()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let f2 = SymbolicModel::f2();
    let (psl, sanov) = (CircleModel::psl2z(), CircleModel::sanov());
    let worked = worked_f2_table(&f2);
    let f2_six = pipeline(&f2, &GroupPresentation::f2(), 6, 2)?.table;
    let psl_four = pipeline(&psl, &GroupPresentation::psl2z(), 4, 2)?.table;
    let sanov_four = pipeline(&sanov, &GroupPresentation::sanov(), 4, 2)?.table;
    let mut false_accepts = 0;
    for k in 0..100 {
        let rejected = match k % 4 {
            0 => mutation_round(&f2, &worked, &mut rng)?,
            1 => mutation_round(&f2, &f2_six, &mut rng)?,
            2 => mutation_round(&psl, &psl_four, &mut rng)?,
            _ => mutation_round(&sanov, &sanov_four, &mut rng)?,
        };
        false_accepts += usize::from(!rejected);
    }
    ensure!(false_accepts == 0, "{false_accepts} false accepts");
    Ok("overlap, basepoint and Ω⁺ controls exit 1 with witnesses; 100 mutations, 0 false accepts".into())
}

fn random_word(rng: &mut ChaCha8Rng, al: &Alphabet, max_len: usize) -> GroupWord {
    let letters = al.letters();
    let len = rng.gen_range(1..=max_len);
    let mut out = Vec::new();
    while out.len() < len {
        let x = letters[rng.gen_range(0..letters.len())];
        if out.last().is_none_or(|l| al.follows(l, &x)) {
            out.push(x);
        }
    }
    al.from_letters(&out)
}

/// Membership answer of `recover_word`: `Some(expr)` or `None` for "not in
/// the subgroup"; any other error is a failure.
fn member<M: BoundaryModel>(m: &M, t: &PingPongTable<M>, w: &GroupWord) -> Result<Option<Vec<(usize, i64)>>> {
    match recover_word(m, t, &m.evaluate(w), 1000) {
        Ok(e) => {
            ensure!(m.alphabet().format_word(&e.to_word(m, t)) == m.alphabet().format_word(w));
            Ok(Some(e.syllables))
        }
        Err(Error::NotInSubgroup(_)) => Ok(None),
        Err(e) => bail!("recover_word on {}: {e}", m.alphabet().format_word(w)),
    }
}

pub fn cross_model() -> Result<String> {
    let sym = SymbolicModel::f2();
    let mat = CircleModel::sanov();
    let al = sym.alphabet().clone();
    let st = pipeline(&sym, &GroupPresentation::f2(), 4, 2)?.table;
    let mt = pipeline(&mat, &GroupPresentation::sanov(), 4, 2)?.table;
    let sw: Vec<GroupWord> = st.entries.iter().map(|e| e.word.clone()).collect();
    let mw: Vec<GroupWord> = mt.entries.iter().map(|e| e.word.clone()).collect();
    ensure!(folding_oracle(&al, &sw)? == FoldingVerdict::Independent { rank: 4 });
    ensure!(folding_oracle(&al, &mw)? == FoldingVerdict::Independent { rank: 4 });
    let (sg, mg) = (fold(&al, &sw)?, fold(&al, &mw)?);
    // parabolic classes of the matrix copy: powers of a, b and aB
    let cusps: BTreeSet<String> = ["a", "b", "aB"]
        .iter()
        .flat_map(|w| {
            let w = al.parse_word(w).unwrap();
            let al = &al;
            (1..=12).flat_map(move |k| [class_key(al, &al.pow(&w, k)), class_key(al, &al.pow(&w, -k))])
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let (mut parabolic, mut members) = (0, 0);
    for _ in 0..200 {
        let g = random_word(&mut rng, &al, 10);
        let d = random_word(&mut rng, &al, 4);
        let key = class_key(&al, &g);
        ensure!(class_key(&al, &al.conjugate(&g, &d)) == key);
        for w in [g.clone(), al.conjugate(&g, &d)] {
            let ks = sym.classify(&sym.evaluate(&w))?.kind;
            let km = mat.classify(&mat.evaluate(&w))?.kind;
            ensure!(ks == ElementKind::Loxodromic, "symbolic {ks:?}");
            let want = if cusps.contains(&key) { ElementKind::Parabolic } else { ElementKind::Loxodromic };
            ensure!(km == want, "{} is {km:?} in the matrix copy", al.format_word(&w));
        }
        parabolic += usize::from(cusps.contains(&key));

        // the same reduced expression over both tables
        let expr = random_expression(&mut rng, &st, 6);
        let ws = expr.to_word(&sym, &st);
        let wm = expr.to_word(&mat, &mt);
        ensure!(member(&sym, &st, &ws)? == Some(expr.syllables.clone()));
        ensure!(member(&mat, &mt, &wm)? == Some(expr.syllables.clone()));
        ensure!(sg.accepts(&ws) && mg.accepts(&wm));

        // a random word: recover_word and folding agree on membership
        for (w, t_sym) in [(g.clone(), true), (g, false)] {
            let (found, accepted) = if t_sym {
                (member(&sym, &st, &w)?.is_some(), sg.accepts(&w))
            } else {
                (member(&mat, &mt, &w)?.is_some(), mg.accepts(&w))
            };
            ensure!(found == accepted, "membership of {} disagrees", al.format_word(&w));
            members += usize::from(found);
        }
    }
    Ok(format!("200 instances agree in both models ({parabolic} parabolic in the matrix copy, {members} random members)"))
}
