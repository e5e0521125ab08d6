//! Verified searches: loxodromic elements with prescribed fixed points,
//! placement of a closed set inside an open one, wandering certificates and
//! conjugation into wandering position.
//!
//! Every search enumerates words in canonical order (length, then
//! lexicographic in [`Alphabet::letters`] order) and re-verifies its output
//! exactly before returning it.

use std::collections::BTreeMap;

use crate::certificate::{check_wandering_certificate, WanderingCertificate};
use crate::error::{Error, Result};
use crate::model::{BoundaryModel, ElementKind};
use crate::word::{Alphabet, GroupWord, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_word_len: usize,
    pub max_power: u32,
    pub max_refinements: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_word_len: 8, max_power: 64, max_refinements: 24 }
    }
}

impl SearchBudget {
    pub fn new(max_word_len: usize, max_power: u32, max_refinements: u32) -> Result<Self> {
        if max_word_len == 0 || max_power == 0 || max_refinements == 0 {
            return Err(Error::Parse("budget values must be positive".into()));
        }
        Ok(Self { max_word_len, max_power, max_refinements })
    }
}

/// Nonempty reduced letter words of length `1..=max_len` in canonical order.
pub fn words_in_order(alphabet: &Alphabet, max_len: usize) -> impl Iterator<Item = Vec<Letter>> + '_ {
    let letters = alphabet.letters();
    let mut level: Vec<Vec<Letter>> = vec![vec![]];
    let mut len = 0;
    std::iter::from_fn(move || {
        if len >= max_len {
            return None;
        }
        len += 1;
        level = level
            .iter()
            .flat_map(|w| {
                letters.iter().filter(|x| w.last().is_none_or(|l| alphabet.follows(l, x))).map(move |x| {
                    let mut v = w.clone();
                    v.push(*x);
                    v
                })
            })
            .collect();
        Some(level.clone())
    })
    .flatten()
}

/// A group element together with the word that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Found<M: BoundaryModel> {
    pub word: GroupWord,
    pub element: M::Element,
}

impl<M: BoundaryModel> Found<M> {
    fn new(model: &M, word: GroupWord) -> Self {
        Self { element: model.evaluate(&word), word }
    }
}

fn loxodromic_with<M: BoundaryModel>(model: &M, g: &M::Element, u: &M::Region, v: &M::Region) -> bool {
    match model.classify(g) {
        Ok(c) if c.kind == ElementKind::Loxodromic => {
            model.interior_contains_point(u, c.attracting().expect("loxodromic"))
                && model.interior_contains_point(v, c.repelling().expect("loxodromic"))
        }
        _ => false,
    }
}

/// Loxodromic `h` with `h⁺ ∈ int U` and `h⁻ ∈ int V`, as `α·φⁿ·β⁻¹`.
pub fn find_loxodromic<M: BoundaryModel>(
    model: &M,
    u: &M::Region,
    v: &M::Region,
    budget: &SearchBudget,
) -> Result<Found<M>> {
    if !model.interior_nonempty(u) || !model.interior_nonempty(v) {
        return Err(Error::EmptyRegionSample);
    }
    let al = model.alphabet();
    let (phi, class) = words_in_order(al, budget.max_word_len)
        .map(|w| al.from_letters(&w))
        .find_map(|w| {
            let g = model.evaluate(&w);
            match model.classify(&g) {
                Ok(c) if c.kind == ElementKind::Loxodromic => Some((Found::<M>::new(model, w), c)),
                _ => None,
            }
        })
        .ok_or_else(|| Error::BudgetExhausted("no loxodromic element within the word-length budget".into()))?;
    if loxodromic_with(model, &phi.element, u, v) {
        return Ok(phi);
    }
    let plus = class.attracting().expect("loxodromic").clone();
    let minus = class.repelling().expect("loxodromic").clone();
    let movers = |target: &M::Region, p: &M::Point| -> Vec<GroupWord> {
        let mut found: Vec<GroupWord> = std::iter::once(vec![])
            .chain(words_in_order(al, budget.max_word_len))
            .map(|w| al.from_letters(&w))
            .filter(|w| model.interior_contains_point(target, &model.apply_point(&model.evaluate(w), p)))
            .take(4)
            .collect();
        if found.is_empty() {
            found.extend(steer(model, p, target, 16 * budget.max_word_len));
        }
        found
    };
    let alphas = movers(u, &plus);
    let betas = movers(v, &minus);
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::BudgetExhausted("no word moves the fixed points of φ into U and V".into()));
    }
    for n in 1..=budget.max_power as i64 {
        let phin = al.pow(&phi.word, n);
        for a in &alphas {
            for b in &betas {
                let w = al.product([a, &phin, &al.inverse(b)]);
                let h = model.evaluate(&w);
                if loxodromic_with(model, &h, u, v) {
                    return Ok(Found { word: w, element: h });
                }
            }
        }
    }
    Err(Error::BudgetExhausted(format!("no α·φⁿ·β⁻¹ with n ≤ {} verifies", budget.max_power)))
}

/// Word `α` with `α·p ∈ int U`, found by greedily enlarging `U`: prepend
/// the letter whose image of the current region is largest until the region
/// swallows `p`. The result is checked exactly.
pub fn steer<M: BoundaryModel>(model: &M, p: &M::Point, u: &M::Region, max_steps: usize) -> Option<GroupWord> {
    let al = model.alphabet();
    let letters = al.letters();
    let mut beta: Vec<Letter> = Vec::new();
    let mut region = u.clone();
    for _ in 0..=max_steps {
        if model.interior_contains_point(&region, p) {
            let alpha = al.inverse(&al.from_letters(&beta));
            let ok = model.interior_contains_point(u, &model.apply_point(&model.evaluate(&alpha), p));
            return ok.then_some(alpha);
        }
        let mut best: Option<(f64, Letter, M::Region)> = None;
        for x in letters.iter().filter(|x| beta.first().is_none_or(|f| al.follows(x, f))) {
            let Ok(img) = model.apply_region(&model.evaluate(&al.from_letters(&[*x])), &region) else { continue };
            let size = model.measure(&img);
            if best.as_ref().is_none_or(|(b, _, _)| size > *b) {
                best = Some((size, *x, img));
            }
        }
        let (_, x, img) = best?;
        beta.insert(0, x);
        region = img;
    }
    None
}

/// `δ` with `δ·Σ ⊆ O`.
pub fn place<M: BoundaryModel>(model: &M, sigma: &M::Region, o: &M::Region, budget: &SearchBudget) -> Result<Found<M>> {
    let al = model.alphabet();
    let identity = Found::new(model, GroupWord::identity());
    if model.is_empty(sigma) {
        return Ok(identity);
    }
    if model.is_full(sigma) {
        return Err(Error::ImproperSigma);
    }
    if !model.interior_nonempty(o) {
        return Err(Error::EmptyRegionSample);
    }
    if model.contains(o, sigma) {
        return Ok(identity);
    }
    let fits = |g: &M::Element| -> Result<bool> { Ok(model.contains(o, &model.apply_region(g, sigma)?)) };
    for w in words_in_order(al, budget.max_word_len.min(4)) {
        let d = Found::new(model, al.from_letters(&w));
        if fits(&d.element)? {
            return Ok(d);
        }
    }
    let h = find_loxodromic(model, o, &model.complement(sigma), budget)?;
    let mut hn = h.element.clone();
    for n in 1..=budget.max_power as i64 {
        if fits(&hn)? {
            return Ok(Found { word: al.pow(&h.word, n), element: hn });
        }
        hn = model.compose(&h.element, &hn);
    }
    Err(Error::BudgetExhausted(format!("hⁿ·Σ ⊄ O for n ≤ {}", budget.max_power)))
}

pub fn find_wandering_certificate<M: BoundaryModel>(
    model: &M,
    word: &GroupWord,
    budget: &SearchBudget,
) -> Result<WanderingCertificate<M>> {
    let g = model.evaluate(word);
    let class = model.classify(&g)?;
    for level in 0..budget.max_refinements {
        for kind in model.wandering_candidates(&g, &class, level) {
            let cert = WanderingCertificate { gamma: g.clone(), word: word.clone(), kind };
            if check_wandering_certificate(model, &cert)?.is_valid() {
                return Ok(cert);
            }
        }
    }
    Err(Error::BudgetExhausted(format!("no wandering certificate after {} refinements", budget.max_refinements)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conjugation<M: BoundaryModel> {
    pub delta: Found<M>,
    /// Certificate for the original element.
    pub initial: WanderingCertificate<M>,
    /// Certificate for `δ⁻¹·g·δ` whose `Σ` contains the requested set.
    pub cert: WanderingCertificate<M>,
}

/// `δ` such that `Σ` is wandering for `δ⁻¹·g·δ`, with a verified certificate.
pub fn conjugate_to_wandering<M: BoundaryModel>(
    model: &M,
    word: &GroupWord,
    sigma: &M::Region,
    budget: &SearchBudget,
) -> Result<Conjugation<M>> {
    if word.is_identity() || model.is_identity(&model.evaluate(word)) {
        return Err(Error::IdentityElement);
    }
    if model.is_full(sigma) {
        return Err(Error::ImproperSigma);
    }
    let initial = find_wandering_certificate(model, word, budget)?;
    let sigma0 = initial.sigma(model);
    let delta = if model.contains(&sigma0, sigma) {
        Found::new(model, GroupWord::identity())
    } else {
        place(model, sigma, &model.interior_subregion(&sigma0), budget)?
    };
    let al = model.alphabet();
    let dinv = model.inverse(&delta.element);
    let kind = initial.kind.try_map(|r| model.apply_region(&dinv, r))?;
    let cert = WanderingCertificate::new(model, al.conjugate(word, &delta.word), kind);
    if !check_wandering_certificate(model, &cert)?.is_valid() || !model.contains(&cert.sigma(model), sigma) {
        return Err(Error::BudgetExhausted("conjugated certificate failed its exact re-check".into()));
    }
    Ok(Conjugation { delta, initial, cert })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CollapseReport<P> {
    Collapse {
        attracting: P,
        repelling: P,
        attracting_key: String,
        repelling_key: String,
        /// Indices of the elements forming the collapsing subfamily.
        members: Vec<usize>,
    },
    NoCollapse,
}

/// Sample-scale analogue of a collapsing subfamily.
///
/// An element concentrates if most sample images land in one cluster, and
/// likewise for its inverse; elements sharing both clusters form the
/// reported family. Diagnostic only.
pub fn collapse_diagnostic<M: BoundaryModel>(
    model: &M,
    elements: &[M::Element],
    samples: &[M::Point],
    resolution: u32,
) -> CollapseReport<M::Point> {
    const THRESHOLD: f64 = 0.6;
    if elements.len() < 3 || samples.len() < 3 {
        return CollapseReport::NoCollapse;
    }
    let majority = |points: Vec<M::Point>| -> (String, M::Point, f64) {
        let mut bins: BTreeMap<String, (usize, M::Point)> = BTreeMap::new();
        for p in &points {
            bins.entry(model.cluster_key(p, resolution)).or_insert((0, p.clone())).0 += 1;
        }
        let n = points.len();
        let (key, (count, rep)) = bins.into_iter().max_by_key(|(_, (c, _))| *c).expect("nonempty");
        (key, rep, count as f64 / n as f64)
    };
    let (_, _, base) = majority(samples.to_vec());
    let mut groups: BTreeMap<(String, String), (Vec<usize>, M::Point, M::Point)> = BTreeMap::new();
    for (i, g) in elements.iter().enumerate() {
        let ginv = model.inverse(g);
        let (ak, a, fa) = majority(samples.iter().map(|s| model.apply_point(g, s)).collect());
        let (rk, r, fr) = majority(samples.iter().map(|s| model.apply_point(&ginv, s)).collect());
        if fa >= THRESHOLD && fr >= THRESHOLD && fa > base && fr > base {
            groups.entry((ak, rk)).or_insert((vec![], a, r)).0.push(i);
        }
    }
    match groups.into_iter().filter(|(_, (m, _, _))| m.len() >= 2).max_by_key(|(_, (m, _, _))| m.len()) {
        Some(((attracting_key, repelling_key), (members, attracting, repelling))) => {
            CollapseReport::Collapse { attracting, repelling, attracting_key, repelling_key, members }
        }
        None => CollapseReport::NoCollapse,
    }
}
