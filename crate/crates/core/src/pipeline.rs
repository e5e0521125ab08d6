//! End-to-end construction of an independent set of conjugacy-class
//! representatives with a verified ping-pong table.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::certificate::{
    check_pingpong_table, limit_set_bound, LimitSetVerdict, PingPongTable, TableEntry, Verdict, WanderingCertificate,
};
use crate::circle::{CircleModel, CircleRegion};
use crate::classes::ConjugacyClassRep;
use crate::error::{Error, Result};
use crate::exact::{ProjectivePoint, Rational};
use crate::model::BoundaryModel;
use crate::search::{conjugate_to_wandering, find_loxodromic, SearchBudget};
use crate::symbolic::{CylinderRegion, SymbolicModel};
use crate::word::{GroupWord, Letter};

/// Deterministic choice of pairwise disjoint slots plus a disjoint witness.
pub trait SlotLayout: BoundaryModel {
    /// `n` slots and the witness region.
    fn slot_layout(&self, n: usize) -> (Vec<Self::Region>, Self::Region);
}

impl SlotLayout for CircleModel {
    /// Slots are the middle thirds of `n + 1` equal parts of `[0, 1]`; the
    /// last part is the witness (the whole window when `n = 0`).
    fn slot_layout(&self, n: usize) -> (Vec<CircleRegion>, CircleRegion) {
        let q = |num: usize, den: usize| ProjectivePoint::rational(Rational::new(BigInt::from(num), BigInt::from(den)));
        if n == 0 {
            return (vec![], CircleRegion::arc(q(0, 1), q(1, 1)));
        }
        let den = 3 * (n + 1);
        let mut parts: Vec<CircleRegion> =
            (0..=n).map(|k| CircleRegion::arc(q(3 * k + 1, den), q(3 * k + 2, den))).collect();
        let witness = parts.pop().expect("n + 1 parts");
        (parts, witness)
    }
}

impl SlotLayout for SymbolicModel {
    /// Cylinders of the least depth that gives `n + 1` of them, in canonical
    /// order; the last cylinder of that depth is the witness.
    fn slot_layout(&self, n: usize) -> (Vec<CylinderRegion>, CylinderRegion) {
        if n == 0 {
            return (vec![], self.full());
        }
        let al = self.alphabet();
        let mut level: Vec<Vec<Letter>> = vec![vec![]];
        loop {
            level = level
                .iter()
                .flat_map(|w| {
                    al.letters().into_iter().filter(|x| w.last().is_none_or(|l| al.follows(l, x))).map(move |x| {
                        let mut v = w.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
            if level.len() > n {
                break;
            }
        }
        let region = |w: &Vec<Letter>| self.cylinders(&[al.format_letters(w).as_str()]).expect("reduced prefix");
        let slots = level[..n].iter().map(region).collect();
        (slots, region(level.last().expect("nonempty level")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassInstance<M: BoundaryModel> {
    pub key: String,
    pub representative: GroupWord,
    pub delta: GroupWord,
    /// `δ⁻¹·γ·δ`
    pub conjugate: GroupWord,
    pub omega: M::Region,
    pub cert: WanderingCertificate<M>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependentSetCertificate<M: BoundaryModel> {
    pub classes: Vec<ClassInstance<M>>,
    pub table: PingPongTable<M>,
    pub witness: M::Region,
    pub transcript: Vec<String>,
}

/// Build a certificate for `requests`, each class with its multiplicity.
pub fn build_independent_set<M: SlotLayout>(
    model: &M,
    requests: &[(ConjugacyClassRep, usize)],
    budget: &SearchBudget,
    orbit_depth: u32,
) -> Result<IndependentSetCertificate<M>> {
    let al = model.alphabet();
    let instances: Vec<&ConjugacyClassRep> =
        requests.iter().flat_map(|(c, k)| std::iter::repeat_n(c, *k)).collect();
    let mut transcript = Vec::new();
    if !instances.is_empty() {
        if let Err(e) = find_loxodromic(model, &model.full(), &model.full(), budget) {
            return Err(Error::ElementaryGroup(format!("no loxodromic element found: {e}")));
        }
    }
    let (slots, witness) = model.slot_layout(instances.len());
    transcript.push(format!("{} slots, witness {}", slots.len(), model.region_to_json(&witness)));
    let results: Vec<Result<ClassInstance<M>>> = instances
        .par_iter()
        .zip(slots.par_iter())
        .map(|(c, omega)| {
            let sigma = model.complement(omega);
            let conj = conjugate_to_wandering(model, &c.representative, &sigma, budget)?;
            Ok(ClassInstance {
                key: c.key.clone(),
                representative: c.representative.clone(),
                delta: conj.delta.word,
                conjugate: conj.cert.word.clone(),
                omega: omega.clone(),
                cert: conj.cert,
            })
        })
        .collect();
    let mut classes = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let inst = r?;
        transcript.push(format!(
            "class {} [{}]: δ = {}, γ′ = {}",
            i + 1,
            inst.key,
            al.format_word(&inst.delta),
            al.format_word(&inst.conjugate)
        ));
        classes.push(inst);
    }
    let basepoint = model.sample_interior_point(&witness)?;
    let entries = classes
        .iter()
        .map(|c| TableEntry {
            alpha: c.cert.gamma.clone(),
            word: c.conjugate.clone(),
            omega: c.omega.clone(),
            cert: c.cert.clone(),
        })
        .collect();
    let table = PingPongTable { entries, basepoint };
    match check_pingpong_table(model, &table)? {
        Verdict::Valid => transcript.push("ping-pong table: Valid".into()),
        Verdict::Violation(v) => return Err(Error::BudgetExhausted(format!("assembled table rejected: {v}"))),
    }
    match limit_set_bound(model, &table, orbit_depth, &witness)? {
        LimitSetVerdict::Proper { orbit_points, depth } => {
            transcript.push(format!("limit set bound: Proper ({orbit_points} orbit points, depth {depth})"))
        }
        LimitSetVerdict::Inconclusive { escapee } => {
            return Err(Error::BudgetExhausted(format!("limit set bound inconclusive: {escapee}")))
        }
    }
    Ok(IndependentSetCertificate { classes, table, witness, transcript })
}
