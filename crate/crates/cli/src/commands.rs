use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use pingpong::certificate::{
    check_pingpong_table, check_wandering_certificate, limit_set_bound, recover_word, LimitSetVerdict, Verdict,
};
use pingpong::circle::{parse_matrix, CircleModel};
use pingpong::classes::{class_of, enumerate_conjugacy_classes, first_classes, ConjugacyClassRep};
use pingpong::model::{BoundaryModel, ElementKind};
use pingpong::pipeline::build_independent_set;
use pingpong::presentation::{GroupPresentation, Realized};
use pingpong::render;
use pingpong::schema;
use pingpong::search::{find_wandering_certificate, place, SearchBudget};
use pingpong::symbolic::SymbolicModel;
use pingpong::wiegold::{wiegold_list, Convention};
use pingpong::Error;

use crate::{Command, Global};

macro_rules! with_model {
    ($p:expr, |$m:ident| $body:expr) => {
        match $p.realize()? {
            Realized::Circle($m) => $body,
            Realized::Symbolic($m) => $body,
        }
    };
}

/// Error kind for the JSON error report, and the exit status.
pub fn classify_error(e: &anyhow::Error) -> (&'static str, u8) {
    let Some(err) = e.downcast_ref::<Error>() else { return ("InvalidInput", 2) };
    let kind = match err {
        Error::Parse(_) => "Parse",
        Error::CrossFieldArithmetic => "CrossFieldArithmetic",
        Error::CrossFieldComparison => "CrossFieldComparison",
        Error::DivisionByZero => "DivisionByZero",
        Error::UnsupportedField => "UnsupportedField",
        Error::IdentityElement => "IdentityElement",
        Error::EllipticOrderOverflow(_) => "EllipticOrderOverflow",
        Error::IterationCapExceeded(_) => "IterationCapExceeded",
        Error::NotForwardInvariant => "NotForwardInvariant",
        Error::EmptyRegionSample => "EmptyRegionSample",
        Error::ModelMismatch(_) => "ModelMismatch",
        Error::NotInSubgroup(_) => "NotInSubgroup",
        Error::ExponentCapExceeded(_) => "ExponentCapExceeded",
        Error::BudgetExhausted(_) => "BudgetExhausted",
        Error::ImproperSigma => "ImproperSigma",
        Error::UnsupportedFamily(_) => "UnsupportedFamily",
        Error::ElementaryGroup(_) => "ElementaryGroup",
        Error::UnsupportedModel(_) => "UnsupportedModel",
        Error::InvalidPresentation(_) => "InvalidPresentation",
        Error::Json(_) => "Json",
    };
    let code = if matches!(err, Error::NotInSubgroup(_)) { 1 } else { 2 };
    (kind, code)
}

fn load_group(arg: &str) -> Result<GroupPresentation> {
    Ok(match arg {
        "f2" => GroupPresentation::f2(),
        "sanov" => GroupPresentation::sanov(),
        "psl2z" => GroupPresentation::psl2z(),
        "psl2z-symbolic" => GroupPresentation::free_product(&["s", "t"], &[2, 3]),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            GroupPresentation::from_json(&text)?
        }
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn parse_region<M: BoundaryModel>(m: &M, s: &str) -> Result<M::Region> {
    Ok(m.region_from_json(&serde_json::from_str(s).map_err(Error::from)?)?)
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.output {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(g: &Global, v: &Value) -> Result<()> {
    emit(g, &serde_json::to_string_pretty(v).expect("serializable"))
}

/// Either the JSON value or the text, depending on `--json`.
fn report(g: &Global, v: &Value, text: &str) -> Result<()> {
    if g.json {
        emit_json(g, v)
    } else {
        emit(g, text)
    }
}

pub fn run(g: &Global, cmd: Command) -> Result<u8> {
    let budget = SearchBudget::new(g.max_word_len, g.max_power, g.max_refine)?;
    match cmd {
        Command::Classify { group, word } => {
            let p = load_group(&group.group)?;
            let (v, text) = with_model!(p, |m| classify(&m, &word)?);
            report(g, &v, &text)?;
            Ok(0)
        }
        Command::Wander { group, word } => {
            let p = load_group(&group.group)?;
            let v = with_model!(p, |m| {
                let w = m.alphabet().parse_word(&word)?;
                schema::wandering_to_json(&m, &p, &find_wandering_certificate(&m, &w, &budget)?)
            });
            emit_json(g, &v)?;
            Ok(0)
        }
        Command::Place { group, sigma, target } => {
            let p = load_group(&group.group)?;
            let (v, text) = with_model!(p, |m| {
                let s = parse_region(&m, &sigma)?;
                let o = parse_region(&m, &target)?;
                let found = place(&m, &s, &o, &budget)?;
                let image = m.region_to_json(&m.apply_region(&found.element, &s)?);
                let word = m.alphabet().format_word(&found.word);
                let text = format!("δ = {word}\nimage: {image}");
                (json!({"delta": word, "element": m.format_element(&found.element), "image": image}), text)
            });
            report(g, &v, &text)?;
            Ok(0)
        }
        Command::Certify { file, depth } => {
            let doc = read_json(&file)?;
            let p = schema::read_group(&doc)?;
            let (v, text, ok) = with_model!(p, |m| certify(&m, &doc, depth)?);
            report(g, &v, &text)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Recover { file, word, max_exponent } => {
            let doc = read_json(&file)?;
            let p = schema::read_group(&doc)?;
            let (v, text) = with_model!(p, |m| {
                let table = schema::table_from_json(&m, &doc)?.table;
                let w = m.alphabet().parse_word(&word)?;
                let expr = recover_word(&m, &table, &m.evaluate(&w), max_exponent)?;
                let syllables: Vec<Value> =
                    expr.syllables.iter().map(|&(i, j)| json!({"entry": i + 1, "exponent": j})).collect();
                let v = json!({
                    "word": m.alphabet().format_word(&w),
                    "expression": syllables,
                    "product": m.alphabet().format_word(&expr.to_word(&m, &table)),
                });
                (v, expr.to_string())
            });
            report(g, &v, &text)?;
            Ok(0)
        }
        Command::IndependentSet { group, count, classes, multiplicity, max_class_len, depth } => {
            let p = load_group(&group.group)?;
            let reps: Vec<ConjugacyClassRep> = if !classes.is_empty() {
                let al = p.alphabet()?;
                classes.iter().map(|s| Ok(class_of(&al, &al.parse_word(s)?))).collect::<Result<_>>()?
            } else if let Some(n) = count {
                first_classes(&p, n, max_class_len)?
            } else {
                bail!("give --count or --classes");
            };
            let mult = if multiplicity.is_empty() { vec![1; reps.len()] } else { multiplicity };
            if mult.len() != reps.len() {
                bail!("{} multiplicities for {} classes", mult.len(), reps.len());
            }
            let requests: Vec<_> = reps.into_iter().zip(mult).collect();
            let v = with_model!(p, |m| {
                schema::independent_set_to_json(&m, &p, &build_independent_set(&m, &requests, &budget, depth)?)
            });
            emit_json(g, &v)?;
            Ok(0)
        }
        Command::Wiegold { classes, opposite, max_class_len } => {
            let conv = if opposite { Convention::Opposite } else { Convention::Standard };
            let (v, ok) = wiegold(classes, max_class_len, conv, &budget)?;
            emit_json(g, &v)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::EnumerateClasses { group, max_len, limit } => {
            let p = load_group(&group.group)?;
            let al = p.alphabet()?;
            let cs = enumerate_conjugacy_classes(&p, max_len)?;
            let cs = &cs[..limit.unwrap_or(cs.len()).min(cs.len())];
            let v: Vec<Value> = cs
                .iter()
                .map(|c| json!({"key": c.key, "representative": al.format_word(&c.representative)}))
                .collect();
            let text = cs.iter().map(|c| c.key.as_str()).collect::<Vec<_>>().join("\n");
            report(g, &Value::Array(v), &text)?;
            Ok(0)
        }
        Command::Render { file, tree, reproducible, depth } => {
            let doc = read_json(&file)?;
            let p = schema::read_group(&doc)?;
            let title = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let svg = match p.realize()? {
                Realized::Circle(m) => render::circle_svg(&m, &scene(&m, &doc, depth)?, &title, reproducible),
                Realized::Symbolic(m) => {
                    if !tree {
                        return Err(Error::UnsupportedModel("symbolic input is drawn with --tree".into()).into());
                    }
                    render::tree_svg(&m, &scene(&m, &doc, depth)?, 3, &title, reproducible)
                }
            };
            match &g.output {
                Some(path) => fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{svg}"),
            }
            Ok(0)
        }
        Command::Selftest => selftest(g, &budget),
    }
}

fn classify<M: BoundaryModel>(m: &M, word: &str) -> Result<(Value, String)> {
    let w = m.alphabet().parse_word(word)?;
    let e = m.evaluate(&w);
    let c = m.classify(&e)?;
    let fixed: Vec<String> = c.fixed_points.iter().map(|p| m.format_point(p)).collect();
    let v = json!({
        "word": m.alphabet().format_word(&w),
        "element": m.format_element(&e),
        "kind": c.kind.name(),
        "order": c.kind.order(),
        "fixedPoints": fixed,
    });
    let mut text = c.kind.name().to_string();
    if let Some(n) = c.kind.order() {
        text.push_str(&format!(" of order {n}"));
    }
    text.push_str(&format!("\nelement: {}", m.format_element(&e)));
    match c.kind {
        ElementKind::Loxodromic => {
            text.push_str(&format!("\nrepelling: {}\nattracting: {}", fixed[0], fixed[1]));
        }
        _ if !fixed.is_empty() => text.push_str(&format!("\nfixed points: {}", fixed.join(", "))),
        _ => {}
    }
    Ok((v, text))
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Valid => json!({"verdict": "Valid"}),
        Verdict::Violation(x) => json!({"verdict": "Violation", "condition": x.condition, "witness": x.witness}),
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Valid => "Valid".into(),
        Verdict::Violation(x) => format!("Violation: {x}"),
    }
}

fn certify<M: BoundaryModel>(m: &M, doc: &Value, depth: u32) -> Result<(Value, String, bool)> {
    if doc.get("entries").is_none() {
        let cert = schema::wandering_from_json(m, doc)?;
        let verdict = check_wandering_certificate(m, &cert)?;
        let ok = verdict.is_valid();
        return Ok((json!({"kind": "wandering", "certificate": verdict_json(&verdict)}), verdict_text(&verdict), ok));
    }
    let parsed = schema::table_from_json(m, doc)?;
    let verdict = check_pingpong_table(m, &parsed.table)?;
    let mut ok = verdict.is_valid();
    let mut parts = vec![verdict_text(&verdict)];
    let mut v = json!({"kind": "table", "entries": parsed.table.entries.len(), "table": verdict_json(&verdict)});
    if let Some(problem) = schema::check_class_records(m, doc)? {
        ok = false;
        parts.push(format!("Violation: {problem}"));
        v["classes"] = json!({"verdict": "Violation", "detail": problem});
    }
    if let Some(w) = &parsed.witness {
        match limit_set_bound(m, &parsed.table, depth, w)? {
            LimitSetVerdict::Proper { orbit_points, depth } => {
                parts.push("Proper".into());
                v["limitSet"] = json!({"verdict": "Proper", "orbitPoints": orbit_points, "depth": depth});
            }
            LimitSetVerdict::Inconclusive { escapee } => {
                ok = false;
                parts.push(format!("Inconclusive: {escapee}"));
                v["limitSet"] = json!({"verdict": "Inconclusive", "escapee": escapee});
            }
        }
    }
    Ok((v, parts.join(", "), ok))
}

fn scene<M: BoundaryModel>(m: &M, doc: &Value, depth: u32) -> Result<render::Scene<M>> {
    if doc.get("entries").is_some() {
        let parsed = schema::table_from_json(m, doc)?;
        Ok(render::table_scene(m, &parsed.table, parsed.witness.as_ref(), depth)?)
    } else {
        Ok(render::certificate_scene(m, &schema::wandering_from_json(m, doc)?)?)
    }
}

fn wiegold(n: usize, max_len: usize, conv: Convention, budget: &SearchBudget) -> Result<(Value, bool)> {
    let r = wiegold_list(n, max_len, conv, budget)?;
    let m = SymbolicModel::f2();
    let al = m.alphabet();
    let mut v = schema::table_to_json(&m, &GroupPresentation::f2(), &r.table, Some(&r.witness));
    let classes: Vec<Value> = (0..r.list.len())
        .map(|i| {
            let k = (i + 1) as i64;
            let delta = al.word([(0, if conv == Convention::Standard { -k } else { k })]);
            json!({
                "key": r.classes[i].key,
                "representative": al.format_word(&r.bordered[i]),
                "delta": al.format_word(&delta),
                "conjugate": al.format_word(&r.list[i]),
            })
        })
        .collect();
    v["classes"] = Value::Array(classes);
    v["folding"] = match &r.folding {
        pingpong::folding::FoldingVerdict::Independent { rank } => json!({"verdict": "Independent", "rank": rank}),
        pingpong::folding::FoldingVerdict::Dependent { rank, relation } => {
            json!({"verdict": "Dependent", "rank": rank, "relation": relation})
        }
    };
    v["transcript"] = json!([
        format!("ping-pong table: {}", verdict_text(&r.table_verdict)),
        format!("limit set bound: {:?}", r.limit_verdict),
    ]);
    Ok((v, r.independent()))
}

fn selftest(g: &Global, budget: &SearchBudget) -> Result<u8> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        ok &= pass;
        lines.push(format!("{} {name}", if pass { "ok  " } else { "FAIL" }));
    };
    let circle = CircleModel::psl2z();
    for (m, want) in [
        ("[[1,1],[0,1]]", ElementKind::Parabolic),
        ("[[2,1],[1,1]]", ElementKind::Loxodromic),
        ("[[0,-1],[1,0]]", ElementKind::Elliptic { order: 2 }),
        ("[[0,-1],[1,-1]]", ElementKind::Elliptic { order: 3 }),
    ] {
        let got = circle.classify_matrix(&parse_matrix(m)?)?.kind;
        check(&format!("classify {m}"), got == want);
    }
    let p = GroupPresentation::f2();
    let m = SymbolicModel::f2();
    let reqs: Vec<_> = first_classes(&p, 4, 4)?.into_iter().map(|c| (c, 1)).collect();
    let cert = build_independent_set(&m, &reqs, budget, 3)?;
    let doc = schema::independent_set_to_json(&m, &p, &cert);
    let (_, _, valid) = certify(&m, &doc, 3)?;
    check("F2 independent set of 4 classes re-verifies", valid);
    let w = m.alphabet().product(cert.table.entries.iter().map(|e| &e.word));
    let expr = recover_word(&m, &cert.table, &m.evaluate(&w), 100)?;
    check("recover the product of the table entries", expr.syllables == [(0, 1), (1, 1), (2, 1), (3, 1)]);
    let ok = ok;
    let text = lines.join("\n");
    report(g, &json!({"ok": ok, "checks": lines}), &text)?;
    Ok(if ok { 0 } else { 1 })
}
