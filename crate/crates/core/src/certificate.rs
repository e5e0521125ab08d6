//! Wandering certificates, ping-pong tables, word recovery and the
//! limit-set bound.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BoundaryModel, CertKind};
use crate::word::GroupWord;

/// Hard cap on the number of syllables `recover_word` will peel.
pub const MAX_SYLLABLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct WanderingCertificate<M: BoundaryModel> {
    pub gamma: M::Element,
    pub word: GroupWord,
    pub kind: CertKind<M::Region>,
}

impl<M: BoundaryModel> WanderingCertificate<M> {
    pub fn new(model: &M, word: GroupWord, kind: CertKind<M::Region>) -> Self {
        Self { gamma: model.evaluate(&word), word, kind }
    }

    /// `Σ = cl(X ∖ (Ω⁻ ∪ Ω⁺))`, or `cl(X ∖ Ω)` in the finite-order case.
    pub fn sigma(&self, model: &M) -> M::Region {
        model.complement(&self.covered(model))
    }

    /// `Ω⁻ ∪ Ω⁺`, or `Ω`.
    pub fn covered(&self, model: &M) -> M::Region {
        match &self.kind {
            CertKind::InfiniteOrder { omega_minus, omega_plus } => model.union(omega_minus, omega_plus),
            CertKind::FiniteOrder { omega, .. } => omega.clone(),
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self.kind {
            CertKind::FiniteOrder { order, .. } => Some(order),
            CertKind::InfiniteOrder { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: String,
    pub witness: Option<String>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.witness {
            Some(w) => write!(f, "{} (witness {w})", self.condition),
            None => write!(f, "{}", self.condition),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Violation(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    fn violation(condition: impl Into<String>, witness: Option<String>) -> Self {
        Verdict::Violation(Violation { condition: condition.into(), witness })
    }

    fn prefixed(self, prefix: &str) -> Self {
        match self {
            Verdict::Valid => Verdict::Valid,
            Verdict::Violation(v) => {
                Verdict::Violation(Violation { condition: format!("{prefix}: {}", v.condition), witness: v.witness })
            }
        }
    }
}

fn witness_of<M: BoundaryModel>(model: &M, r: &M::Region) -> Option<M::Point> {
    let pts = if model.interior_nonempty(r) { model.sample_interior_points(r, 1) } else { model.boundary_points(r) };
    pts.into_iter().find(|p| model.contains_point(r, p))
}

pub fn check_wandering_certificate<M: BoundaryModel>(model: &M, cert: &WanderingCertificate<M>) -> Result<Verdict> {
    if model.evaluate(&cert.word) != cert.gamma {
        return Ok(Verdict::violation("certificate element does not match its word", None));
    }
    let g = &cert.gamma;
    if model.is_identity(g) {
        return Ok(Verdict::violation("certificate element is the identity", None));
    }
    match &cert.kind {
        CertKind::InfiniteOrder { omega_minus, omega_plus } => {
            let outside = model.complement(omega_minus);
            let img = model.apply_region(g, &outside)?;
            if !model.contains(omega_plus, &img) {
                let ginv = model.inverse(g);
                let w = model.point_outside(omega_plus, &img).map(|q| model.format_point(&model.apply_point(&ginv, &q)));
                return Ok(Verdict::violation("(i) γ·cl(X∖Ω⁻) ⊆ Ω⁺", w));
            }
            let img = model.apply_region(g, omega_plus)?;
            if !model.contains(omega_plus, &img) {
                let ginv = model.inverse(g);
                let w = model.point_outside(omega_plus, &img).map(|q| model.format_point(&model.apply_point(&ginv, &q)));
                return Ok(Verdict::violation("(ii) γ·Ω⁺ ⊆ Ω⁺", w));
            }
            if !model.interior_nonempty(&cert.sigma(model)) {
                return Ok(Verdict::violation("(iii) interior(Σ) ≠ ∅", None));
            }
        }
        CertKind::FiniteOrder { order, omega } => {
            if *order < 2 || !model.is_identity(&model.power(g, *order as i64)) {
                return Ok(Verdict::violation(format!("element does not have order {order}"), None));
            }
            let sigma = model.complement(omega);
            let mut gk = g.clone();
            for k in 1..*order {
                let img = model.apply_region(&gk, &sigma)?;
                if !model.contains(omega, &img) {
                    let back = model.inverse(&gk);
                    let w = model.point_outside(omega, &img).map(|q| model.format_point(&model.apply_point(&back, &q)));
                    return Ok(Verdict::violation(format!("γ^{k}·cl(X∖Ω) ⊆ Ω"), w));
                }
                gk = model.compose(g, &gk);
            }
            if !model.interior_nonempty(&sigma) {
                return Ok(Verdict::violation("interior(Σ) ≠ ∅", None));
            }
        }
    }
    Ok(Verdict::Valid)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry<M: BoundaryModel> {
    pub alpha: M::Element,
    pub word: GroupWord,
    pub omega: M::Region,
    pub cert: WanderingCertificate<M>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PingPongTable<M: BoundaryModel> {
    pub entries: Vec<TableEntry<M>>,
    pub basepoint: M::Point,
}

impl<M: BoundaryModel> PingPongTable<M> {
    /// Exponents `j` for which `αᵢ^j` is a distinct nontrivial syllable.
    fn syllable_exponents(&self, i: usize) -> Vec<i64> {
        match self.entries[i].cert.order() {
            Some(n) => (1..n as i64).collect(),
            None => vec![1, -1],
        }
    }
}

pub fn check_pingpong_table<M: BoundaryModel>(model: &M, table: &PingPongTable<M>) -> Result<Verdict> {
    let es = &table.entries;
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            if !model.disjoint(&es[i].omega, &es[j].omega) {
                let meet = model.intersect(&es[i].omega, &es[j].omega);
                let w = witness_of(model, &meet).map(|p| model.format_point(&p));
                return Ok(Verdict::violation(format!("disjointness of Ω{} and Ω{}", i + 1, j + 1), w));
            }
        }
    }
    let verdicts: Vec<Result<Verdict>> = es.par_iter().enumerate().map(|(i, e)| check_entry(model, i, e)).collect();
    for v in verdicts {
        let v = v?;
        if !v.is_valid() {
            return Ok(v);
        }
    }
    for (i, e) in es.iter().enumerate() {
        if model.contains_point(&e.omega, &table.basepoint) {
            let w = Some(model.format_point(&table.basepoint));
            return Ok(Verdict::violation(format!("basepoint outside Ω{}", i + 1), w));
        }
    }
    Ok(Verdict::Valid)
}

fn check_entry<M: BoundaryModel>(model: &M, i: usize, e: &TableEntry<M>) -> Result<Verdict> {
    let label = format!("entry {}", i + 1);
    if e.cert.gamma != e.alpha || model.evaluate(&e.word) != e.alpha {
        return Ok(Verdict::violation(format!("{label}: certificate element differs from α{}", i + 1), None));
    }
    let v = check_wandering_certificate(model, &e.cert)?;
    if !v.is_valid() {
        return Ok(v.prefixed(&label));
    }
    let covered = e.cert.covered(model);
    if !model.contains(&e.omega, &covered) {
        let w = model.point_outside(&e.omega, &covered).map(|p| model.format_point(&p));
        let what = if e.cert.order().is_some() { "Ω" } else { "Ω⁻ ∪ Ω⁺" };
        return Ok(Verdict::violation(format!("{label}: {what} ⊆ Ω{}", i + 1), w));
    }
    Ok(Verdict::Valid)
}

/// Reduced word in the table entries: `(entry index, exponent)` syllables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedExpression {
    pub syllables: Vec<(usize, i64)>,
}

impl ReducedExpression {
    pub fn evaluate<M: BoundaryModel>(&self, model: &M, table: &PingPongTable<M>) -> M::Element {
        let mut acc = model.evaluate(&GroupWord::identity());
        for &(i, j) in &self.syllables {
            acc = model.compose(&acc, &model.power(&table.entries[i].alpha, j));
        }
        acc
    }

    /// Same expression as a word over the ambient generators.
    pub fn to_word<M: BoundaryModel>(&self, model: &M, table: &PingPongTable<M>) -> GroupWord {
        let al = model.alphabet();
        let parts: Vec<GroupWord> = self.syllables.iter().map(|&(i, j)| al.pow(&table.entries[i].word, j)).collect();
        al.product(parts.iter())
    }

    pub fn is_reduced<M: BoundaryModel>(&self, table: &PingPongTable<M>) -> bool {
        self.syllables.windows(2).all(|w| w[0].0 != w[1].0)
            && self.syllables.iter().all(|&(i, j)| match table.entries.get(i).map(|e| e.cert.order()) {
                None => false,
                Some(None) => j != 0,
                Some(Some(n)) => j > 0 && (j as u64) < n,
            })
    }
}

impl std::fmt::Display for ReducedExpression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.syllables.iter().map(|(i, j)| format!("({},{j:+})", i + 1)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Unique reduced expression of `g` in the table entries, read off from the
/// boundary orbit of the basepoint.
pub fn recover_word<M: BoundaryModel>(
    model: &M,
    table: &PingPongTable<M>,
    g: &M::Element,
    max_exponent: u64,
) -> Result<ReducedExpression> {
    let x = &table.basepoint;
    let mut p = model.apply_point(g, x);
    let mut syllables = Vec::new();
    while p != *x {
        if syllables.len() >= MAX_SYLLABLES {
            return Err(Error::NotInSubgroup(format!("more than {MAX_SYLLABLES} syllables")));
        }
        let i = table
            .entries
            .iter()
            .position(|e| model.contains_point(&e.omega, &p))
            .ok_or_else(|| Error::NotInSubgroup(format!("point {} lies outside every Ω", model.format_point(&p))))?;
        let alpha = &table.entries[i].alpha;
        let (j, q) = match table.entries[i].cert.order() {
            Some(n) => peel_finite(model, alpha, &table.entries[i].omega, &p, n)?,
            None => peel_infinite(model, alpha, &table.entries[i].omega, &p, max_exponent)?,
        };
        syllables.push((i, j));
        p = q;
    }
    let expr = ReducedExpression { syllables };
    if expr.evaluate(model, table) != *g {
        return Err(Error::NotInSubgroup("orbit decoding does not multiply out to the element".into()));
    }
    Ok(expr)
}

/// A region `W ⊆ omega` with `g·W ⊆ W`.
fn trap<M: BoundaryModel>(model: &M, g: &M::Element, omega: &M::Region) -> Option<M::Region> {
    let class = model.classify(g).ok()?;
    (0..32).find_map(|level| {
        let w = model.attracting_neighbourhood(g, &class, level)?;
        let ok = model.contains(omega, &w) && model.apply_region(g, &w).is_ok_and(|gw| model.contains(&w, &gw));
        ok.then_some(w)
    })
}

/// Past this many powers, check whether both orbit directions are trapped.
const TRAP_AFTER: i64 = 8;

fn peel_infinite<M: BoundaryModel>(
    model: &M,
    alpha: &M::Element,
    omega: &M::Region,
    p: &M::Point,
    cap: u64,
) -> Result<(i64, M::Point)> {
    let ainv = model.inverse(alpha);
    let (mut fwd, mut back) = (p.clone(), p.clone());
    let mut traps: Option<Option<(M::Region, M::Region)>> = None;
    for j in 1..=cap as i64 {
        if j > TRAP_AFTER {
            // once both directions sit in invariant subsets of Ω, no power ever leaves it
            let t = traps.get_or_insert_with(|| Some((trap(model, &ainv, omega)?, trap(model, alpha, omega)?)));
            if let Some((down, up)) = t {
                if model.contains_point(down, &fwd) && model.contains_point(up, &back) {
                    return Err(Error::NotInSubgroup(format!(
                        "no power of the entry moves {} out of its region",
                        model.format_point(p)
                    )));
                }
            }
        }
        fwd = model.apply_point(&ainv, &fwd);
        if !model.contains_point(omega, &fwd) {
            return Ok((j, fwd));
        }
        if j == 1 && fwd == *p {
            return Err(Error::NotInSubgroup(format!("orbit point {} is fixed by an entry", model.format_point(p))));
        }
        back = model.apply_point(alpha, &back);
        if !model.contains_point(omega, &back) {
            return Ok((-j, back));
        }
    }
    Err(Error::ExponentCapExceeded(cap))
}

fn peel_finite<M: BoundaryModel>(
    model: &M,
    alpha: &M::Element,
    omega: &M::Region,
    p: &M::Point,
    order: u64,
) -> Result<(i64, M::Point)> {
    let ainv = model.inverse(alpha);
    let mut q = p.clone();
    for j in 1..order as i64 {
        q = model.apply_point(&ainv, &q);
        if !model.contains_point(omega, &q) {
            return Ok((j, q));
        }
    }
    Err(Error::NotInSubgroup("no power of a finite-order entry leaves its region".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitSetVerdict {
    /// Witness is disjoint from every Ωᵢ and all `orbit_points` checked land where expected.
    Proper { orbit_points: u64, depth: u32 },
    Inconclusive { escapee: String },
}

impl LimitSetVerdict {
    pub fn is_proper(&self) -> bool {
        matches!(self, Self::Proper { .. })
    }
}

/// Exact non-density witness plus depth-bounded orbit confirmation.
pub fn limit_set_bound<M: BoundaryModel>(
    model: &M,
    table: &PingPongTable<M>,
    depth: u32,
    witness: &M::Region,
) -> Result<LimitSetVerdict> {
    if !model.interior_nonempty(witness) {
        return Ok(LimitSetVerdict::Inconclusive { escapee: "witness region has empty interior".into() });
    }
    for (i, e) in table.entries.iter().enumerate() {
        if !model.disjoint(witness, &e.omega) {
            let meet = model.intersect(witness, &e.omega);
            let at = witness_of(model, &meet).map(|p| model.format_point(&p)).unwrap_or_default();
            return Ok(LimitSetVerdict::Inconclusive { escapee: format!("witness meets Ω{} at {at}", i + 1) });
        }
    }
    let moves: Vec<(usize, i64, M::Element)> = (0..table.entries.len())
        .flat_map(|i| table.syllable_exponents(i).into_iter().map(move |j| (i, j)))
        .map(|(i, j)| (i, j, model.power(&table.entries[i].alpha, j)))
        .collect();
    if depth == 0 || moves.is_empty() {
        return Ok(LimitSetVerdict::Proper { orbit_points: 0, depth });
    }
    let results: Vec<std::result::Result<u64, Vec<(usize, i64)>>> = moves
        .par_iter()
        .map(|(i, j, a)| {
            let q = model.apply_point(a, &table.basepoint);
            let mut path = vec![(*i, *j)];
            orbit_dfs(model, table, &moves, q, &mut path, depth)
        })
        .collect();
    let mut total = 0;
    for r in results {
        match r {
            Ok(n) => total += n,
            Err(path) => {
                let expr = ReducedExpression { syllables: path.into_iter().rev().collect() };
                return Ok(LimitSetVerdict::Inconclusive { escapee: format!("orbit point of {expr} escapes") });
            }
        }
    }
    Ok(LimitSetVerdict::Proper { orbit_points: total, depth })
}

/// `path` lists syllables innermost first; `p` is the current orbit point.
fn orbit_dfs<M: BoundaryModel>(
    model: &M,
    table: &PingPongTable<M>,
    moves: &[(usize, i64, M::Element)],
    p: M::Point,
    path: &mut Vec<(usize, i64)>,
    depth: u32,
) -> std::result::Result<u64, Vec<(usize, i64)>> {
    let last = path.last().expect("nonempty").0;
    if !model.contains_point(&table.entries[last].omega, &p) {
        return Err(path.clone());
    }
    let mut count = 1;
    if path.len() < depth as usize {
        for (i, j, a) in moves {
            if *i == last {
                continue;
            }
            path.push((*i, *j));
            count += orbit_dfs(model, table, moves, model.apply_point(a, &p), path, depth)?;
            path.pop();
        }
    }
    Ok(count)
}
