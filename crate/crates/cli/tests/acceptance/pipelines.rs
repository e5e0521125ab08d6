use anyhow::{ensure, Result};

use pingpong::certificate::{check_pingpong_table, limit_set_bound, LimitSetVerdict, TableEntry, WanderingCertificate};
use pingpong::circle::CircleModel;
use pingpong::classes::first_classes;
use pingpong::folding::{folding_oracle, FoldingVerdict};
use pingpong::model::{BoundaryModel, CertKind};
use pingpong::pipeline::{build_independent_set, SlotLayout};
use pingpong::presentation::GroupPresentation;
use pingpong::search::{find_wandering_certificate, SearchBudget};
use pingpong::symbolic::SymbolicModel;
use pingpong::wiegold::{wiegold_list, wiegold_slot, Convention};

use super::pipeline;

pub fn symbolic_theorem() -> Result<String> {
    let m = SymbolicModel::f2();
    let cert = pipeline(&m, &GroupPresentation::f2(), 15, 2)?;
    ensure!(check_pingpong_table(&m, &cert.table)?.is_valid());
    let LimitSetVerdict::Proper { orbit_points, .. } = limit_set_bound(&m, &cert.table, 5, &cert.witness)? else {
        anyhow::bail!("limit set bound inconclusive at depth 5");
    };
    let words: Vec<_> = cert.table.entries.iter().map(|e| e.word.clone()).collect();
    let folding = folding_oracle(m.alphabet(), &words)?;
    ensure!(folding == FoldingVerdict::Independent { rank: 15 }, "folding: {folding:?}");
    Ok(format!("15 classes Valid, Proper at depth 5 ({orbit_points} orbit points), folding rank 15"))
}

pub fn matrix_theorem() -> Result<String> {
    let m = CircleModel::psl2z();
    let cert = pipeline(&m, &GroupPresentation::psl2z(), 8, 4)?;
    let keys: Vec<&str> = cert.classes.iter().map(|c| c.key.as_str()).collect();
    ensure!(keys[..3] == ["s", "t", "t^2"], "keys {keys:?}");
    let finite = cert.classes.iter().filter(|c| c.cert.order().is_some()).count();
    ensure!(finite == 3, "{finite} finite-order certificates");
    ensure!(check_pingpong_table(&m, &cert.table)?.is_valid());
    ensure!(limit_set_bound(&m, &cert.table, 4, &cert.witness)?.is_proper());
    Ok(format!("8 classes {keys:?} Valid, Proper, 3 finite-order certificates"))
}

/// Swap entry `i` for `w`, keeping whatever regions the caller supplies.
fn mutated(
    m: &SymbolicModel,
    table: &pingpong::certificate::PingPongTable<SymbolicModel>,
    i: usize,
    w: &pingpong::word::GroupWord,
    omega: pingpong::symbolic::CylinderRegion,
    kind: CertKind<pingpong::symbolic::CylinderRegion>,
) -> pingpong::certificate::PingPongTable<SymbolicModel> {
    let mut t = table.clone();
    let cert = WanderingCertificate::new(m, w.clone(), kind);
    t.entries[i] = TableEntry { alpha: m.evaluate(w), word: w.clone(), omega, cert };
    t
}

pub fn wiegold_construction() -> Result<String> {
    let budget = SearchBudget::default();
    for conv in [Convention::Standard, Convention::Opposite] {
        let r = wiegold_list(8, 8, conv, &budget)?;
        ensure!(r.table_verdict.is_valid(), "{conv:?}: {:?}", r.table_verdict);
        ensure!(r.limit_verdict.is_proper(), "{conv:?}: {:?}", r.limit_verdict);
        ensure!(r.folding == FoldingVerdict::Independent { rank: 8 }, "{conv:?}: {:?}", r.folding);
    }
    let m = SymbolicModel::f2();
    let r = wiegold_list(8, 8, Convention::Standard, &budget)?;
    let n = r.list.len();
    let mut detected = 0;
    for i in 0..n {
        let w = &r.bordered[i];
        // (a) the unconjugated element squeezed into its old slot
        let e = &r.table.entries[i];
        let a = mutated(&m, &r.table, i, w, e.omega.clone(), e.cert.kind.clone());
        // (b) its own certificate, with the region forced over the next slot
        let own = find_wandering_certificate(&m, w, &budget)?;
        let next = wiegold_slot(&m, (i + 1) % n + 1, Convention::Standard);
        let omega = m.union(&own.covered(&m), &next);
        let b = mutated(&m, &r.table, i, w, omega, own.kind.clone());
        for t in [a, b] {
            if !check_pingpong_table(&m, &t)?.is_valid() {
                detected += 1;
            }
        }
    }
    ensure!(detected == 2 * n, "{detected} of {} mutations detected", 2 * n);
    Ok(format!("both conventions independent (table and folding rank 8), {detected}/{} mutations rejected", 2 * n))
}

fn multiplicity_on<M: SlotLayout>(m: &M, p: &GroupPresentation) -> Result<usize> {
    let classes = first_classes(p, 3, 6)?;
    let requests: Vec<_> = classes.into_iter().zip([3, 1, 2]).collect();
    let cert = build_independent_set(m, &requests, &SearchBudget::default(), 3)?;
    for (c, k) in &requests {
        let got = cert.classes.iter().filter(|x| x.key == c.key).count();
        ensure!(got == *k, "class {} appears {got} times, wanted {k}", c.key);
    }
    ensure!(check_pingpong_table(m, &cert.table)?.is_valid());
    ensure!(limit_set_bound(m, &cert.table, 3, &cert.witness)?.is_proper());
    let mut deltas: Vec<_> = cert.classes.iter().map(|c| (&c.key, &c.delta)).collect();
    deltas.sort_by_key(|(k, d)| (k.to_string(), m.alphabet().format_word(d)));
    deltas.dedup();
    ensure!(deltas.len() == cert.classes.len(), "repeated conjugators");
    Ok(cert.classes.len())
}

pub fn multiplicities() -> Result<String> {
    let a = multiplicity_on(&SymbolicModel::f2(), &GroupPresentation::f2())?;
    let b = multiplicity_on(&CircleModel::psl2z(), &GroupPresentation::psl2z())?;
    Ok(format!("(3,1,2) honoured in F2 ({a} entries) and PSL(2,Z) ({b} entries), Valid + Proper"))
}
