//! Orientation-preserving Möbius maps acting on the projective circle `ℝP¹`.
//!
//! Regions are finite unions of closed counterclockwise arcs. An arc
//! `[a, b]` runs from `a` in the increasing direction (through ∞ if needed)
//! to `b`; `[a, a]` is a singleton. The whole circle is [`CircleRegion::Full`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{ccw, cyclic_cmp, gcd_all, is_perfect_square, Orientation, ProjectivePoint, QuadraticNumber, Rational};
use crate::model::{BoundaryModel, CertKind, Classification, ElementKind};
use crate::word::{Alphabet, GroupWord};

pub const DEFAULT_ELLIPTIC_CAP: u64 = 1_000_000;

/// Projective class of a 2×2 integer matrix with positive determinant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mobius {
    m: [BigInt; 4],
}

impl Mobius {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_positive() {
            return Err(Error::InvalidPresentation(format!("determinant {det} is not positive")));
        }
        let mut m = [a, b, c, d];
        let g = gcd_all(&m.iter().collect::<Vec<_>>());
        let neg = m.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in &mut m {
            *x /= &g;
            if neg {
                *x = -&*x;
            }
        }
        Ok(Self { m })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1).unwrap()
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.m
    }

    pub fn det(&self) -> BigInt {
        let [a, b, c, d] = &self.m;
        a * d - b * c
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0] + &self.m[3]
    }

    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = &self.m;
        b.is_zero() && c.is_zero() && a == d
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &o.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h).expect("product of positive determinants")
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = &self.m;
        Self::new(d.clone(), -b, -c, a.clone()).expect("adjugate keeps the determinant")
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let [a, b, c, d] = &self.m;
        let ra = |x: &BigInt| Rational::from_integer(x.clone());
        match p {
            ProjectivePoint::Infinity => {
                if c.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::rational(Rational::new(a.clone(), c.clone()))
                }
            }
            ProjectivePoint::Finite(x) => {
                let num = x.scale(&ra(a)).add_rational(&ra(b));
                let den = x.scale(&ra(c)).add_rational(&ra(d));
                if den.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::Finite(num.div(&den).expect("same field"))
                }
            }
        }
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: ProjectivePoint,
    pub end: ProjectivePoint,
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

impl Arc {
    pub fn new(start: ProjectivePoint, end: ProjectivePoint) -> Self {
        Self { start, end }
    }

    pub fn is_singleton(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        *p == self.start || *p == self.end || ccw(&self.start, p, &self.end) == Orientation::Ccw
    }

    pub fn interior_contains(&self, p: &ProjectivePoint) -> bool {
        *p != self.start && *p != self.end && ccw(&self.start, p, &self.end) == Orientation::Ccw
    }

    pub fn contains_arc(&self, inner: &Arc) -> bool {
        if self.is_singleton() {
            return inner.is_singleton() && inner.start == self.start;
        }
        self.contains(&inner.start)
            && self.contains(&inner.end)
            && cyclic_cmp(&self.start, &inner.start, &inner.end) != Ordering::Greater
    }

    fn meets(&self, o: &Arc) -> bool {
        self.contains(&o.start) || o.contains(&self.start)
    }

    /// Union of two meeting arcs; `None` means the whole circle.
    fn union(&self, o: &Arc) -> Option<Arc> {
        if self.contains_arc(o) {
            return Some(self.clone());
        }
        if o.contains_arc(self) {
            return Some(o.clone());
        }
        let o_start_in = self.contains(&o.start);
        let s_start_in = o.contains(&self.start);
        match (o_start_in, s_start_in) {
            (true, true) => None,
            (true, false) => Some(Arc::new(self.start.clone(), o.end.clone())),
            (false, true) => Some(Arc::new(o.start.clone(), self.end.clone())),
            (false, false) => unreachable!("union of disjoint arcs"),
        }
    }

    fn intersection(&self, o: &Arc) -> Vec<Arc> {
        if self.contains_arc(o) {
            return vec![o.clone()];
        }
        if o.contains_arc(self) {
            return vec![self.clone()];
        }
        let c_in = self.contains(&o.start);
        let d_in = self.contains(&o.end);
        let a_in = o.contains(&self.start);
        let b_in = o.contains(&self.end);
        if (c_in && d_in) || (a_in && b_in) {
            vec![Arc::new(self.start.clone(), o.end.clone()), Arc::new(o.start.clone(), self.end.clone())]
        } else if c_in {
            vec![Arc::new(o.start.clone(), self.end.clone())]
        } else if a_in {
            vec![Arc::new(self.start.clone(), o.end.clone())]
        } else {
            vec![]
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CircleRegion {
    Full,
    /// Pairwise disjoint arcs, sorted by start (∞ first, then increasing).
    Arcs(Vec<Arc>),
}

impl fmt::Debug for CircleRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full => f.write_str("full"),
            Self::Arcs(a) => f.debug_list().entries(a).finish(),
        }
    }
}

impl CircleRegion {
    pub fn arc(start: ProjectivePoint, end: ProjectivePoint) -> Self {
        Self::from_arcs(vec![Arc::new(start, end)])
    }

    /// Closed arc between two rationals given as `(num, den)` pairs; `None` is ∞.
    pub fn rational_arc(start: Option<(i64, i64)>, end: Option<(i64, i64)>) -> Self {
        let pt = |x: Option<(i64, i64)>| x.map_or(ProjectivePoint::Infinity, |(n, d)| ProjectivePoint::ratio(n, d));
        Self::arc(pt(start), pt(end))
    }

    pub fn from_arcs(arcs: Vec<Arc>) -> Self {
        let mut arcs = arcs;
        'outer: loop {
            for i in 0..arcs.len() {
                for j in (i + 1)..arcs.len() {
                    if arcs[i].meets(&arcs[j]) {
                        let Some(u) = arcs[i].union(&arcs[j]) else {
                            return Self::Full;
                        };
                        arcs.swap_remove(j);
                        arcs[i] = u;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        arcs.sort_by(|x, y| cyclic_cmp(&ProjectivePoint::Infinity, &x.start, &y.start));
        Self::Arcs(arcs)
    }

    pub fn arcs(&self) -> &[Arc] {
        match self {
            Self::Full => &[],
            Self::Arcs(a) => a,
        }
    }
}

/// A rational strictly between `x < y`.
pub fn rational_between(x: &QuadraticNumber, y: &QuadraticNumber) -> Rational {
    if let (Some(a), Some(b)) = (x.as_rational(), y.as_rational()) {
        return (a + b) / Rational::from_integer(BigInt::from(2));
    }
    for bits in 1.. {
        let step = Rational::new(BigInt::one(), BigInt::one() << bits);
        let mut r = y.lower_dyadic(bits);
        if QuadraticNumber::rational(r.clone()) == *y {
            r -= &step;
        }
        if QuadraticNumber::rational(r.clone()).total_cmp(x) == Ordering::Greater {
            return r;
        }
    }
    unreachable!()
}

/// A rational point strictly inside the non-singleton arc `[a, b]`.
fn rational_inside(a: &ProjectivePoint, b: &ProjectivePoint) -> Rational {
    use ProjectivePoint::*;
    match (a, b) {
        (Finite(x), Finite(y)) if x.total_cmp(y) == Ordering::Less => rational_between(x, y),
        (Finite(x), _) => Rational::from_integer(x.floor() + 1),
        (Infinity, Finite(y)) => Rational::from_integer(y.floor() - 1),
        (Infinity, Infinity) => Rational::zero(),
    }
}

/// Orientation-preserving chart `x ↦ -1/(x - c)` sending `c` to ∞.
struct Chart {
    c: Rational,
}

impl Chart {
    fn to_line(&self, p: &ProjectivePoint) -> QuadraticNumber {
        match p {
            ProjectivePoint::Infinity => QuadraticNumber::zero(),
            ProjectivePoint::Finite(x) => {
                let shifted = x.add_rational(&-&self.c);
                shifted.inv().expect("chart centre lies outside the arc").neg()
            }
        }
    }

    fn from_line(&self, t: &Rational) -> ProjectivePoint {
        if t.is_zero() {
            ProjectivePoint::Infinity
        } else {
            ProjectivePoint::rational(&self.c - t.recip())
        }
    }

    /// Chart adapted to a non-singleton arc, plus the arc's image interval.
    fn for_arc(arc: &Arc) -> (Self, QuadraticNumber, QuadraticNumber) {
        let chart = Chart { c: rational_inside(&arc.end, &arc.start) };
        let lo = chart.to_line(&arc.start);
        let hi = chart.to_line(&arc.end);
        (chart, lo, hi)
    }
}

fn arc_samples(arc: &Arc, n: usize) -> Vec<ProjectivePoint> {
    let (chart, lo, hi) = Chart::for_arc(arc);
    let mid = rational_between(&lo, &hi);
    if n <= 1 {
        return vec![chart.from_line(&mid)];
    }
    let a = rational_between(&lo, &QuadraticNumber::rational(mid.clone()));
    let b = rational_between(&QuadraticNumber::rational(mid), &hi);
    let span = &b - &a;
    (0..n)
        .map(|k| {
            let t = &a + &span * Rational::new(BigInt::from(k), BigInt::from(n - 1));
            chart.from_line(&t)
        })
        .collect()
}

fn shrink_arc(arc: &Arc) -> Arc {
    let (chart, lo, hi) = Chart::for_arc(arc);
    let mid = QuadraticNumber::rational(rational_between(&lo, &hi));
    let a = rational_between(&lo, &mid);
    let b = rational_between(&mid, &hi);
    Arc::new(chart.from_line(&a), chart.from_line(&b))
}

fn dyadic(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

#[derive(Clone, Debug)]
pub struct CircleModel {
    alphabet: Alphabet,
    generators: Vec<Mobius>,
    elliptic_cap: u64,
}

impl CircleModel {
    pub fn new(alphabet: Alphabet, generators: Vec<Mobius>) -> Result<Self> {
        if alphabet.rank() != generators.len() {
            return Err(Error::InvalidPresentation("generator count mismatch".into()));
        }
        let model = Self { alphabet, generators, elliptic_cap: DEFAULT_ELLIPTIC_CAP };
        for (g, &n) in model.alphabet.orders().iter().enumerate() {
            if n > 0 && !model.generators[g].is_identity() {
                let gn = model.power(&model.generators[g], n as i64);
                if !gn.is_identity() {
                    return Err(Error::InvalidPresentation(format!(
                        "generator {} does not have order {n}",
                        model.alphabet.names()[g]
                    )));
                }
            }
        }
        Ok(model)
    }

    pub fn with_elliptic_cap(mut self, cap: u64) -> Self {
        self.elliptic_cap = cap;
        self
    }

    pub fn generators(&self) -> &[Mobius] {
        &self.generators
    }

    /// `PSL(2,ℤ) = ⟨s⟩ ∗ ⟨t⟩ ≅ ℤ/2 ∗ ℤ/3` with `s = [[0,-1],[1,0]]`, `t = [[0,-1],[1,-1]]`.
    pub fn psl2z() -> Self {
        let al = Alphabet::new(vec!["s".into(), "t".into()], vec![2, 3]).unwrap();
        Self::new(al, vec![Mobius::from_i64(0, -1, 1, 0).unwrap(), Mobius::from_i64(0, -1, 1, -1).unwrap()]).unwrap()
    }

    /// Free group on `[[1,2],[0,1]]` and `[[1,0],[2,1]]` (Sanov's subgroup).
    pub fn sanov() -> Self {
        let al = Alphabet::new(vec!["a".into(), "b".into()], vec![0, 0]).unwrap();
        Self::new(al, vec![Mobius::from_i64(1, 2, 0, 1).unwrap(), Mobius::from_i64(1, 0, 2, 1).unwrap()]).unwrap()
    }

    /// Exact fixed points and type of a single matrix.
    pub fn classify_matrix(&self, g: &Mobius) -> Result<Classification<ProjectivePoint>> {
        if g.is_identity() {
            return Err(Error::IdentityElement);
        }
        let [a, b, c, d] = g.entries();
        let tr = g.trace();
        let det = g.det();
        let disc = &tr * &tr - BigInt::from(4) * &det;
        let ra = |x: BigInt| Rational::from_integer(x);
        match disc.sign() {
            num_bigint::Sign::Minus => {
                // a finite projective order forces tr²/det ∈ {0, 1, 2, 3}
                let tr2 = &tr * &tr;
                let order = if tr2.is_zero() {
                    Some(2)
                } else if tr2 == det {
                    Some(3)
                } else if tr2 == &det * 2 {
                    Some(4)
                } else if tr2 == &det * 3 {
                    Some(6)
                } else {
                    None
                };
                let order = match order {
                    Some(n) if n <= self.elliptic_cap => n,
                    _ => return Err(Error::EllipticOrderOverflow(self.elliptic_cap)),
                };
                debug_assert!(self.power_matrix(g, order).is_identity());
                Ok(Classification { kind: ElementKind::Elliptic { order }, fixed_points: vec![] })
            }
            num_bigint::Sign::NoSign => {
                let p = if c.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::rational(Rational::new(a - d, c * 2))
                };
                Ok(Classification { kind: ElementKind::Parabolic, fixed_points: vec![p] })
            }
            num_bigint::Sign::Plus => {
                let (x1, x2) = if c.is_zero() {
                    (ProjectivePoint::Infinity, ProjectivePoint::rational(Rational::new(b.clone(), d - a)))
                } else {
                    let two_c = ra(c * 2);
                    let base = ra(a - d) / &two_c;
                    let coef = Rational::one() / &two_c;
                    let plus = QuadraticNumber::new(base.clone(), coef.clone(), disc.clone())?;
                    let minus = QuadraticNumber::new(base, -coef, disc.clone())?;
                    debug_assert!(!is_perfect_square(&disc) || plus.is_rational());
                    (ProjectivePoint::Finite(plus), ProjectivePoint::Finite(minus))
                };
                let attracting = |x: &ProjectivePoint| match x {
                    // near ∞, g(x) ≈ (a/d)·x
                    ProjectivePoint::Infinity => a * a > det,
                    ProjectivePoint::Finite(v) => {
                        // derivative det/(cx+d)² < 1
                        let cxd = v.scale(&ra(c.clone())).add_rational(&ra(d.clone()));
                        let sq = cxd.mul(&cxd).expect("same field");
                        sq.total_cmp(&QuadraticNumber::rational(ra(det.clone()))) == Ordering::Greater
                    }
                };
                let fixed_points = if attracting(&x1) { vec![x2, x1] } else { vec![x1, x2] };
                Ok(Classification { kind: ElementKind::Loxodromic, fixed_points })
            }
        }
    }

    fn power_matrix(&self, g: &Mobius, n: u64) -> Mobius {
        (0..n).fold(Mobius::identity(), |acc, _| acc.mul(g))
    }
}

impl BoundaryModel for CircleModel {
    type Element = Mobius;
    type Point = ProjectivePoint;
    type Region = CircleRegion;

    fn tag(&self) -> &'static str {
        "mobius"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn evaluate(&self, w: &GroupWord) -> Mobius {
        let mut acc = Mobius::identity();
        for &(g, e) in w.syllables() {
            let base = if e < 0 { self.generators[g].inverse() } else { self.generators[g].clone() };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(&base);
            }
        }
        acc
    }

    fn compose(&self, g: &Mobius, h: &Mobius) -> Mobius {
        g.mul(h)
    }

    fn inverse(&self, g: &Mobius) -> Mobius {
        g.inverse()
    }

    fn is_identity(&self, g: &Mobius) -> bool {
        g.is_identity()
    }

    fn apply_point(&self, g: &Mobius, p: &ProjectivePoint) -> ProjectivePoint {
        g.apply(p)
    }

    fn apply_region(&self, g: &Mobius, r: &CircleRegion) -> Result<CircleRegion> {
        Ok(match r {
            CircleRegion::Full => CircleRegion::Full,
            CircleRegion::Arcs(arcs) => {
                CircleRegion::from_arcs(arcs.iter().map(|a| Arc::new(g.apply(&a.start), g.apply(&a.end))).collect())
            }
        })
    }

    fn full(&self) -> CircleRegion {
        CircleRegion::Full
    }

    fn empty(&self) -> CircleRegion {
        CircleRegion::Arcs(vec![])
    }

    fn complement(&self, r: &CircleRegion) -> CircleRegion {
        match r {
            CircleRegion::Full => self.empty(),
            CircleRegion::Arcs(arcs) if arcs.is_empty() => CircleRegion::Full,
            CircleRegion::Arcs(arcs) => {
                let n = arcs.len();
                let gaps = (0..n).map(|i| Arc::new(arcs[i].end.clone(), arcs[(i + 1) % n].start.clone()));
                let gaps: Vec<Arc> = gaps.collect();
                if n == 1 && arcs[0].is_singleton() {
                    return CircleRegion::Full;
                }
                CircleRegion::from_arcs(gaps)
            }
        }
    }

    fn union(&self, r: &CircleRegion, s: &CircleRegion) -> CircleRegion {
        match (r, s) {
            (CircleRegion::Full, _) | (_, CircleRegion::Full) => CircleRegion::Full,
            (CircleRegion::Arcs(a), CircleRegion::Arcs(b)) => {
                CircleRegion::from_arcs(a.iter().chain(b).cloned().collect())
            }
        }
    }

    fn intersect(&self, r: &CircleRegion, s: &CircleRegion) -> CircleRegion {
        match (r, s) {
            (CircleRegion::Full, x) | (x, CircleRegion::Full) => x.clone(),
            (CircleRegion::Arcs(a), CircleRegion::Arcs(b)) => {
                let pieces = a.iter().flat_map(|x| b.iter().flat_map(move |y| x.intersection(y))).collect();
                CircleRegion::from_arcs(pieces)
            }
        }
    }

    fn contains(&self, outer: &CircleRegion, inner: &CircleRegion) -> bool {
        match (outer, inner) {
            (CircleRegion::Full, _) => true,
            (CircleRegion::Arcs(_), CircleRegion::Full) => false,
            (CircleRegion::Arcs(o), CircleRegion::Arcs(i)) => {
                i.iter().all(|x| o.iter().any(|y| y.contains_arc(x)))
            }
        }
    }

    fn contains_point(&self, r: &CircleRegion, p: &ProjectivePoint) -> bool {
        match r {
            CircleRegion::Full => true,
            CircleRegion::Arcs(a) => a.iter().any(|x| x.contains(p)),
        }
    }

    fn interior_contains_point(&self, r: &CircleRegion, p: &ProjectivePoint) -> bool {
        match r {
            CircleRegion::Full => true,
            CircleRegion::Arcs(a) => a.iter().any(|x| x.interior_contains(p)),
        }
    }

    fn disjoint(&self, r: &CircleRegion, s: &CircleRegion) -> bool {
        match (r, s) {
            (CircleRegion::Full, x) | (x, CircleRegion::Full) => self.is_empty(x),
            (CircleRegion::Arcs(a), CircleRegion::Arcs(b)) => a.iter().all(|x| b.iter().all(|y| !x.meets(y))),
        }
    }

    fn is_empty(&self, r: &CircleRegion) -> bool {
        matches!(r, CircleRegion::Arcs(a) if a.is_empty())
    }

    fn is_full(&self, r: &CircleRegion) -> bool {
        matches!(r, CircleRegion::Full)
    }

    fn interior_nonempty(&self, r: &CircleRegion) -> bool {
        match r {
            CircleRegion::Full => true,
            CircleRegion::Arcs(a) => a.iter().any(|x| !x.is_singleton()),
        }
    }

    fn sample_interior_point(&self, r: &CircleRegion) -> Result<ProjectivePoint> {
        match r {
            CircleRegion::Full => Ok(ProjectivePoint::integer(0)),
            CircleRegion::Arcs(a) => a
                .iter()
                .find(|x| !x.is_singleton())
                .map(|x| ProjectivePoint::rational(rational_inside(&x.start, &x.end)))
                .ok_or(Error::EmptyRegionSample),
        }
    }

    fn sample_interior_points(&self, r: &CircleRegion, n: usize) -> Vec<ProjectivePoint> {
        let arcs: Vec<Arc> = match r {
            CircleRegion::Full => vec![
                Arc::new(ProjectivePoint::integer(0), ProjectivePoint::Infinity),
                Arc::new(ProjectivePoint::Infinity, ProjectivePoint::integer(0)),
            ],
            CircleRegion::Arcs(a) => a.iter().filter(|x| !x.is_singleton()).cloned().collect(),
        };
        if arcs.is_empty() || n == 0 {
            return vec![];
        }
        let per = n.div_ceil(arcs.len());
        let mut out: Vec<ProjectivePoint> = arcs.iter().flat_map(|a| arc_samples(a, per)).collect();
        out.truncate(n);
        out
    }

    fn interior_subregion(&self, r: &CircleRegion) -> CircleRegion {
        match r {
            CircleRegion::Full => CircleRegion::Full,
            CircleRegion::Arcs(a) => {
                CircleRegion::from_arcs(a.iter().filter(|x| !x.is_singleton()).map(shrink_arc).collect())
            }
        }
    }

    fn boundary_points(&self, r: &CircleRegion) -> Vec<ProjectivePoint> {
        r.arcs().iter().flat_map(|a| [a.start.clone(), a.end.clone()]).collect()
    }

    fn classify(&self, g: &Mobius) -> Result<Classification<ProjectivePoint>> {
        self.classify_matrix(g)
    }

    fn attracting_neighbourhood(
        &self,
        g: &Mobius,
        class: &Classification<ProjectivePoint>,
        level: u32,
    ) -> Option<CircleRegion> {
        let p = class.attracting()?;
        match class.kind {
            ElementKind::Loxodromic => {
                let arc = match p {
                    ProjectivePoint::Infinity => {
                        let m = BigInt::one() << level;
                        Arc::new(ProjectivePoint::rational(Rational::from_integer(m.clone())), ProjectivePoint::rational(Rational::from_integer(-m)))
                    }
                    ProjectivePoint::Finite(t) => {
                        let base = t.lower_dyadic(level);
                        let eps = dyadic(level);
                        Arc::new(
                            ProjectivePoint::rational(&base - &eps),
                            ProjectivePoint::rational(base + eps * Rational::from_integer(BigInt::from(2))),
                        )
                    }
                };
                let repelling = class.repelling()?;
                (!arc.contains(repelling)).then(|| CircleRegion::from_arcs(vec![arc]))
            }
            ElementKind::Parabolic => {
                let probe = match p {
                    ProjectivePoint::Infinity => ProjectivePoint::integer(0),
                    ProjectivePoint::Finite(x) => ProjectivePoint::Finite(x.add_rational(&Rational::one())),
                };
                let before = ccw(&probe, &g.apply(&probe), p) == Orientation::Ccw;
                let eps = dyadic(level);
                let arc = match (p, before) {
                    (ProjectivePoint::Infinity, true) => {
                        Arc::new(ProjectivePoint::rational(eps.recip()), ProjectivePoint::Infinity)
                    }
                    (ProjectivePoint::Infinity, false) => {
                        Arc::new(ProjectivePoint::Infinity, ProjectivePoint::rational(-eps.recip()))
                    }
                    (ProjectivePoint::Finite(x), true) => {
                        Arc::new(ProjectivePoint::Finite(x.add_rational(&-eps)), p.clone())
                    }
                    (ProjectivePoint::Finite(x), false) => {
                        Arc::new(p.clone(), ProjectivePoint::Finite(x.add_rational(&eps)))
                    }
                };
                Some(CircleRegion::from_arcs(vec![arc]))
            }
            ElementKind::Elliptic { .. } => None,
        }
    }

    fn wandering_candidates(
        &self,
        g: &Mobius,
        class: &Classification<ProjectivePoint>,
        level: u32,
    ) -> Vec<CertKind<CircleRegion>> {
        match class.kind {
            ElementKind::Elliptic { order } => {
                let eps = dyadic(level + 1);
                let one = Rational::one();
                let s = CircleRegion::arc(ProjectivePoint::rational(&one - &eps), ProjectivePoint::rational(&one + &eps));
                vec![CertKind::FiniteOrder { order, omega: self.complement(&s) }]
            }
            _ => {
                let Some(plus) = self.attracting_neighbourhood(g, class, level) else {
                    return vec![];
                };
                let pulled = self.apply_region(&g.inverse(), &plus).expect("circle images are exact");
                vec![CertKind::InfiniteOrder { omega_minus: self.complement(&pulled), omega_plus: plus }]
            }
        }
    }

    fn measure(&self, r: &CircleRegion) -> f64 {
        match r {
            CircleRegion::Full => 1.0,
            CircleRegion::Arcs(arcs) => arcs
                .iter()
                .map(|a| {
                    if a.is_singleton() {
                        return 0.0;
                    }
                    let d = (angle(&a.end) - angle(&a.start)).rem_euclid(std::f64::consts::TAU);
                    d / std::f64::consts::TAU
                })
                .sum(),
        }
    }

    fn cluster_key(&self, p: &ProjectivePoint, resolution: u32) -> String {
        let theta = angle(p);
        let bins = (1u64 << resolution) as f64;
        let bin = (((theta + std::f64::consts::PI) / std::f64::consts::TAU) * bins).floor() as u64;
        format!("arc#{}", bin.min((1u64 << resolution) - 1))
    }

    fn format_point(&self, p: &ProjectivePoint) -> String {
        p.to_string()
    }

    fn parse_point(&self, s: &str) -> Result<ProjectivePoint> {
        s.parse()
    }

    fn format_element(&self, g: &Mobius) -> String {
        g.to_string()
    }

    fn region_to_json(&self, r: &CircleRegion) -> Value {
        match r {
            CircleRegion::Full => json!("full"),
            CircleRegion::Arcs(a) => {
                Value::Array(a.iter().map(|x| json!([x.start.to_string(), x.end.to_string()])).collect())
            }
        }
    }

    fn region_from_json(&self, v: &Value) -> Result<CircleRegion> {
        if v.as_str() == Some("full") {
            return Ok(CircleRegion::Full);
        }
        let bad = || Error::Parse(format!("bad arc region {v}"));
        let arr = v.as_array().ok_or_else(bad)?;
        let mut arcs = Vec::new();
        for item in arr {
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
            let s = pair[0].as_str().ok_or_else(bad)?.parse()?;
            let e = pair[1].as_str().ok_or_else(bad)?.parse()?;
            arcs.push(Arc::new(s, e));
        }
        Ok(CircleRegion::from_arcs(arcs))
    }
}

/// Parses `[[a,b],[c,d]]` or `a,b,c,d`.
/// Position on the circle in `(-π, π]`, with `∞` at `π`.
fn angle(p: &ProjectivePoint) -> f64 {
    match p {
        ProjectivePoint::Infinity => std::f64::consts::PI,
        ProjectivePoint::Finite(x) => 2.0 * x.to_f64().atan(),
    }
}

pub fn parse_matrix(s: &str) -> Result<Mobius> {
    let nums: Vec<BigInt> = s
        .split(|c: char| !(c.is_ascii_digit() || c == '-'))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad matrix {s:?}"))))
        .collect::<Result<_>>()?;
    if nums.len() != 4 {
        return Err(Error::Parse(format!("matrix needs four entries: {s:?}")));
    }
    let [a, b, c, d]: [BigInt; 4] = nums.try_into().unwrap();
    Mobius::new(a, b, c, d)
}
