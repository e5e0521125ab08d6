//! The contract shared by the two concrete convergence actions.
//!
//! All certificate, search and pipeline logic is written against
//! [`BoundaryModel`]; the circle model ([`crate::circle`]) and the symbolic
//! model ([`crate::symbolic`]) implement it.

use std::fmt::Debug;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::word::{Alphabet, GroupWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Elliptic { order: u64 },
    Parabolic,
    Loxodromic,
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Elliptic { .. } => "Elliptic",
            Self::Parabolic => "Parabolic",
            Self::Loxodromic => "Loxodromic",
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            Self::Elliptic { order } => Some(*order),
            _ => None,
        }
    }
}

/// Kind plus boundary fixed points, repelling first and attracting last.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification<P> {
    pub kind: ElementKind,
    pub fixed_points: Vec<P>,
}

impl<P> Classification<P> {
    pub fn attracting(&self) -> Option<&P> {
        match self.kind {
            ElementKind::Elliptic { .. } => None,
            _ => self.fixed_points.last(),
        }
    }

    pub fn repelling(&self) -> Option<&P> {
        match self.kind {
            ElementKind::Elliptic { .. } => None,
            _ => self.fixed_points.first(),
        }
    }
}

/// Region data of a wandering certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum CertKind<R> {
    /// `γ·cl(X∖Ω⁻) ⊆ Ω⁺` and `γ·Ω⁺ ⊆ Ω⁺`.
    InfiniteOrder { omega_minus: R, omega_plus: R },
    /// `γᵏ·cl(X∖Ω) ⊆ Ω` for `k = 1..order-1`.
    FiniteOrder { order: u64, omega: R },
}

impl<R> CertKind<R> {
    pub fn map<S>(&self, mut f: impl FnMut(&R) -> S) -> CertKind<S> {
        match self {
            Self::InfiniteOrder { omega_minus, omega_plus } => {
                CertKind::InfiniteOrder { omega_minus: f(omega_minus), omega_plus: f(omega_plus) }
            }
            Self::FiniteOrder { order, omega } => CertKind::FiniteOrder { order: *order, omega: f(omega) },
        }
    }

    pub fn try_map<S>(&self, mut f: impl FnMut(&R) -> Result<S>) -> Result<CertKind<S>> {
        Ok(match self {
            Self::InfiniteOrder { omega_minus, omega_plus } => {
                CertKind::InfiniteOrder { omega_minus: f(omega_minus)?, omega_plus: f(omega_plus)? }
            }
            Self::FiniteOrder { order, omega } => CertKind::FiniteOrder { order: *order, omega: f(omega)? },
        })
    }
}

pub trait BoundaryModel: Clone + Debug + Send + Sync {
    type Element: Clone + PartialEq + Debug + Send + Sync;
    type Point: Clone + PartialEq + Debug + Send + Sync;
    /// Closed subsets of the boundary in canonical form.
    type Region: Clone + PartialEq + Debug + Send + Sync;

    fn tag(&self) -> &'static str;
    fn alphabet(&self) -> &Alphabet;

    fn evaluate(&self, w: &GroupWord) -> Self::Element;
    fn compose(&self, g: &Self::Element, h: &Self::Element) -> Self::Element;
    fn inverse(&self, g: &Self::Element) -> Self::Element;
    fn is_identity(&self, g: &Self::Element) -> bool;

    fn power(&self, g: &Self::Element, n: i64) -> Self::Element {
        let base = if n < 0 { self.inverse(g) } else { g.clone() };
        let mut acc = self.evaluate(&GroupWord::identity());
        for _ in 0..n.unsigned_abs() {
            acc = self.compose(&acc, &base);
        }
        acc
    }

    /// `d⁻¹·g·d`
    fn conjugate(&self, g: &Self::Element, d: &Self::Element) -> Self::Element {
        self.compose(&self.compose(&self.inverse(d), g), d)
    }

    fn apply_point(&self, g: &Self::Element, p: &Self::Point) -> Self::Point;
    fn apply_region(&self, g: &Self::Element, r: &Self::Region) -> Result<Self::Region>;

    fn full(&self) -> Self::Region;
    fn empty(&self) -> Self::Region;
    /// Closure of the complement.
    fn complement(&self, r: &Self::Region) -> Self::Region;
    fn union(&self, r: &Self::Region, s: &Self::Region) -> Self::Region;
    fn intersect(&self, r: &Self::Region, s: &Self::Region) -> Self::Region;
    /// `inner ⊆ outer`
    fn contains(&self, outer: &Self::Region, inner: &Self::Region) -> bool;
    fn contains_point(&self, r: &Self::Region, p: &Self::Point) -> bool;
    fn interior_contains_point(&self, r: &Self::Region, p: &Self::Point) -> bool;
    fn disjoint(&self, r: &Self::Region, s: &Self::Region) -> bool;
    fn is_empty(&self, r: &Self::Region) -> bool;
    fn is_full(&self, r: &Self::Region) -> bool {
        self.contains(r, &self.full())
    }
    fn interior_nonempty(&self, r: &Self::Region) -> bool;
    fn sample_interior_point(&self, r: &Self::Region) -> Result<Self::Point>;
    /// Up to `n` distinct points of the interior, deterministic.
    fn sample_interior_points(&self, r: &Self::Region, n: usize) -> Vec<Self::Point>;
    /// A closed region contained in the interior of `r`, with nonempty
    /// interior whenever `r` has one.
    fn interior_subregion(&self, r: &Self::Region) -> Self::Region;

    /// A point of `s` that is not in `r`, if `s ⊄ r`.
    fn point_outside(&self, r: &Self::Region, s: &Self::Region) -> Option<Self::Point> {
        let diff = self.intersect(s, &self.complement(r));
        let candidates = if self.interior_nonempty(&diff) {
            self.sample_interior_points(&diff, 8)
        } else {
            self.boundary_points(&diff)
        };
        candidates.into_iter().find(|p| self.contains_point(s, p) && !self.contains_point(r, p))
    }

    /// Endpoints (circle) or sample points (symbolic) of the pieces of `r`.
    fn boundary_points(&self, r: &Self::Region) -> Vec<Self::Point>;

    fn classify(&self, g: &Self::Element) -> Result<Classification<Self::Point>>;

    /// A candidate neighbourhood of the attracting fixed point at refinement
    /// `level`; smaller for larger levels. Callers check invariance.
    fn attracting_neighbourhood(
        &self,
        g: &Self::Element,
        class: &Classification<Self::Point>,
        level: u32,
    ) -> Option<Self::Region>;

    /// Candidate wandering-certificate regions at refinement `level`.
    fn wandering_candidates(
        &self,
        g: &Self::Element,
        class: &Classification<Self::Point>,
        level: u32,
    ) -> Vec<CertKind<Self::Region>>;

    /// Approximate visual size of `r` as a fraction of the whole space.
    /// Only steers searches; never decides anything.
    fn measure(&self, r: &Self::Region) -> f64;

    /// Coarse location label used by the collapse diagnostic.
    fn cluster_key(&self, p: &Self::Point, resolution: u32) -> String;

    fn format_point(&self, p: &Self::Point) -> String;
    fn parse_point(&self, s: &str) -> Result<Self::Point>;
    fn format_element(&self, g: &Self::Element) -> String;
    fn region_to_json(&self, r: &Self::Region) -> Value;
    fn region_from_json(&self, v: &Value) -> Result<Self::Region>;

    fn check_same_model(&self, tag: &str) -> Result<()> {
        if tag == self.tag() {
            Ok(())
        } else {
            Err(Error::ModelMismatch(format!("expected {}, got {tag}", self.tag())))
        }
    }
}

/// Minimal `N` such that `gⁿ·x ∈ U` for every `n ≥ N`.
///
/// The tail is certified by an attracting neighbourhood `W ⊆ U` with
/// `g·W ⊆ W`: once the orbit enters `W` it never leaves `U`.
pub fn attraction_time<M: BoundaryModel>(
    model: &M,
    g: &M::Element,
    u: &M::Region,
    x: &M::Point,
    cap: u64,
) -> Result<u64> {
    let class = model.classify(g)?;
    if let ElementKind::Elliptic { .. } = class.kind {
        return Err(Error::ModelMismatch("attraction time needs a non-elliptic element".into()));
    }
    let attracting = class.attracting().expect("non-elliptic");
    if !model.interior_contains_point(u, attracting) {
        return Err(Error::Parse("attracting fixed point is not interior to U".into()));
    }
    if class.kind == ElementKind::Loxodromic && class.repelling() == Some(x) {
        return Err(Error::Parse("x is the repelling fixed point".into()));
    }
    let mut trap = None;
    for level in 0..64 {
        if let Some(w) = model.attracting_neighbourhood(g, &class, level) {
            if model.contains(u, &w) && model.contains(&w, &model.apply_region(g, &w)?) {
                trap = Some(w);
                break;
            }
        }
    }
    let trap = trap.ok_or(Error::IterationCapExceeded(64))?;
    let mut p = x.clone();
    let mut last_outside: Option<u64> = None;
    for n in 0..=cap {
        if model.contains_point(&trap, &p) {
            return Ok(last_outside.map_or(0, |m| m + 1));
        }
        if !model.contains_point(u, &p) {
            last_outside = Some(n);
        }
        p = model.apply_point(g, &p);
    }
    Err(Error::IterationCapExceeded(cap))
}

/// `Aₙ = g^{-n}·A`, the set of points whose forward orbit lies in `A` from
/// step `n` on. Requires `g·A ⊆ A`.
pub fn an_region<M: BoundaryModel>(model: &M, g: &M::Element, a: &M::Region, n: u32) -> Result<M::Region> {
    if n == 0 {
        return Err(Error::Parse("n must be positive".into()));
    }
    if !model.contains(a, &model.apply_region(g, a)?) {
        return Err(Error::NotForwardInvariant);
    }
    let ginv = model.inverse(g);
    let mut out = a.clone();
    for _ in 0..n {
        out = model.apply_region(&ginv, &out)?;
    }
    Ok(out)
}
