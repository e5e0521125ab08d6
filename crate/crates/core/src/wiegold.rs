//! Wiegold's explicit independent set in F₂: b-bordered class
//! representatives conjugated by growing powers of `a`.

use crate::certificate::{
    check_pingpong_table, limit_set_bound, LimitSetVerdict, PingPongTable, TableEntry, Verdict, WanderingCertificate,
};
use crate::classes::{first_classes, ConjugacyClassRep};
use crate::error::{Error, Result};
use crate::folding::{folding_oracle, FoldingVerdict};
use crate::model::BoundaryModel;
use crate::presentation::GroupPresentation;
use crate::search::SearchBudget;
use crate::symbolic::{CylinderRegion, SymbolicModel};
use crate::word::{Alphabet, GroupWord};

const A: usize = 0;
const B: usize = 1;

/// Which side the `aⁿ` goes on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `aⁿ·w·a⁻ⁿ`
    #[default]
    Standard,
    /// `a⁻ⁿ·w·aⁿ`
    Opposite,
}

#[derive(Clone, Debug)]
pub struct WiegoldReport {
    pub classes: Vec<ConjugacyClassRep>,
    /// Class representatives rewritten to start and end with a power of `b`.
    pub bordered: Vec<GroupWord>,
    pub list: Vec<GroupWord>,
    pub table: PingPongTable<SymbolicModel>,
    pub witness: CylinderRegion,
    pub table_verdict: Verdict,
    pub limit_verdict: LimitSetVerdict,
    pub folding: FoldingVerdict,
}

impl WiegoldReport {
    pub fn independent(&self) -> bool {
        self.table_verdict.is_valid() && self.limit_verdict.is_proper() && self.folding.is_independent()
    }
}

fn is_b_bordered(w: &GroupWord) -> bool {
    let s = w.syllables();
    !s.is_empty() && s[0].0 == B && s[s.len() - 1].0 == B
}

/// A conjugate of the cyclically reduced `w` that starts and ends with a
/// nonzero power of `b`.
pub fn b_bordered(al: &Alphabet, w: &GroupWord) -> GroupWord {
    if is_b_bordered(w) || w.is_identity() {
        return w.clone();
    }
    let s = w.syllables();
    if s.iter().all(|&(g, _)| g == A) {
        return al.conjugate(w, &al.word([(B, -1)]));
    }
    let k = s.iter().position(|&(g, _)| g == A).expect("contains a");
    let rotated: Vec<(usize, i64)> = s[k..].iter().chain(&s[..k]).copied().collect();
    let rot = al.word(rotated);
    let j = rot.syllables().last().expect("nonempty").1;
    // b^{-sign j}·rot·b^{sign j}: leading b-power is new, trailing one grows
    al.conjugate(&rot, &al.word([(B, j.signum())]))
}

fn conjugator(n: usize, conv: Convention) -> (usize, i64) {
    match conv {
        Convention::Standard => (A, -(n as i64)),
        Convention::Opposite => (A, n as i64),
    }
}

/// `w^{aⁿ}` under the chosen convention.
pub fn wiegold_element(al: &Alphabet, w: &GroupWord, n: usize, conv: Convention) -> GroupWord {
    al.conjugate(w, &al.word([conjugator(n, conv)]))
}

/// `C_{aⁿb} ∪ C_{aⁿB}` (or with `a⁻ⁿ`).
pub fn wiegold_slot(m: &SymbolicModel, n: usize, conv: Convention) -> CylinderRegion {
    let lead = match conv {
        Convention::Standard => "a",
        Convention::Opposite => "A",
    }
    .repeat(n);
    m.cylinders(&[&format!("{lead}b"), &format!("{lead}B")]).expect("reduced prefixes")
}

/// First valid wandering certificate for `w` whose regions lie in `omega`.
pub fn certificate_within(
    m: &SymbolicModel,
    w: &GroupWord,
    omega: &CylinderRegion,
    budget: &SearchBudget,
) -> Result<WanderingCertificate<SymbolicModel>> {
    let g = m.evaluate(w);
    let class = m.classify(&g)?;
    for level in 0..budget.max_refinements {
        for kind in m.wandering_candidates(&g, &class, level) {
            let cert = WanderingCertificate { gamma: g.clone(), word: w.clone(), kind };
            if m.contains(omega, &cert.covered(m))
                && crate::certificate::check_wandering_certificate(m, &cert)?.is_valid()
            {
                return Ok(cert);
            }
        }
    }
    Err(Error::BudgetExhausted(format!("no certificate for {} inside its slot", m.format_element(&g))))
}

pub fn wiegold_list(
    num_classes: usize,
    max_len: usize,
    conv: Convention,
    budget: &SearchBudget,
) -> Result<WiegoldReport> {
    let p = GroupPresentation::f2();
    let m = SymbolicModel::f2();
    let al = m.alphabet().clone();
    let classes = first_classes(&p, num_classes, max_len)?;
    let bordered: Vec<GroupWord> = classes.iter().map(|c| b_bordered(&al, &c.representative)).collect();
    let list: Vec<GroupWord> =
        bordered.iter().enumerate().map(|(i, w)| wiegold_element(&al, w, i + 1, conv)).collect();
    let entries = list
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let omega = wiegold_slot(&m, i + 1, conv);
            let cert = certificate_within(&m, w, &omega, budget)?;
            Ok(TableEntry { alpha: m.evaluate(w), word: w.clone(), omega, cert })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = PingPongTable { entries, basepoint: m.parse_point("(B)")? };
    let witness = m.cylinders(&["B"])?;
    let table_verdict = check_pingpong_table(&m, &table)?;
    let limit_verdict = limit_set_bound(&m, &table, 3, &witness)?;
    let folding = folding_oracle(&al, &list)?;
    Ok(WiegoldReport { classes, bordered, list, table, witness, table_verdict, limit_verdict, folding })
}
