//! The boundary of a free product of cyclic groups as infinite reduced words.
//!
//! Points are eventually periodic words `pre·period^∞`; regions are finite
//! unions of cylinders `C_w` (all infinite reduced words with prefix `w`).
//! Cylinders are clopen, so every region is both closed and open.

use std::collections::BTreeSet;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{BoundaryModel, CertKind, Classification, ElementKind};
use crate::word::{Alphabet, GroupWord, Letter};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoundaryPoint {
    preperiod: Vec<Letter>,
    period: Vec<Letter>,
}

impl BoundaryPoint {
    pub fn preperiod(&self) -> &[Letter] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Letter {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    fn canonical(mut preperiod: Vec<Letter>, mut period: Vec<Letter>) -> Self {
        let n = period.len();
        for p in 1..=n {
            if n % p == 0 && (0..n).all(|i| period[i] == period[i % p]) {
                period.truncate(p);
                break;
            }
        }
        while let (Some(a), Some(b)) = (preperiod.last(), period.last()) {
            if a != b {
                break;
            }
            preperiod.pop();
            period.rotate_right(1);
        }
        Self { preperiod, period }
    }
}

/// Finite union of cylinders; canonical (no nesting, complete sibling sets merged, sorted).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CylinderRegion {
    prefixes: Vec<Vec<Letter>>,
}

impl CylinderRegion {
    pub fn prefixes(&self) -> &[Vec<Letter>] {
        &self.prefixes
    }
}

fn is_prefix(u: &[Letter], w: &[Letter]) -> bool {
    u.len() <= w.len() && w[..u.len()] == *u
}

#[derive(Clone, Debug)]
pub struct SymbolicModel {
    alphabet: Alphabet,
}

impl SymbolicModel {
    pub fn new(alphabet: Alphabet) -> Result<Self> {
        let orders = alphabet.orders();
        let infinite = orders.iter().filter(|&&n| n == 0).count();
        if orders.is_empty() || (orders.len() == 1 && infinite == 0) {
            return Err(Error::InvalidPresentation("symbolic boundary is empty".into()));
        }
        Ok(Self { alphabet })
    }

    pub fn free_group(rank: usize) -> Self {
        let names = (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        Self::new(Alphabet::new(names, vec![0; rank]).unwrap()).unwrap()
    }

    pub fn f2() -> Self {
        Self::free_group(2)
    }

    pub fn letters(&self, s: &str) -> Result<Vec<Letter>> {
        self.alphabet.parse_letters(s)
    }

    pub fn word(&self, s: &str) -> Result<GroupWord> {
        self.alphabet.parse_word(s)
    }

    /// Region from cylinder prefixes written as letter strings.
    pub fn cylinders(&self, prefixes: &[&str]) -> Result<CylinderRegion> {
        let ps = prefixes.iter().map(|p| self.letters(p)).collect::<Result<Vec<_>>>()?;
        if ps.iter().any(|p| p.is_empty()) {
            return Err(Error::Parse("empty cylinder prefix".into()));
        }
        Ok(self.canonicalize(ps))
    }

    pub fn point(&self, preperiod: &str, period: &str) -> Result<BoundaryPoint> {
        let pre = self.letters(preperiod)?;
        let per = self.letters(period)?;
        self.make_point(pre, per)
    }

    fn make_point(&self, pre: Vec<Letter>, per: Vec<Letter>) -> Result<BoundaryPoint> {
        let al = &self.alphabet;
        let ok = !per.is_empty()
            && al.is_cyclically_reduced_letters(&per)
            && (per.len() > 1 || al.follows(&per[0], &per[0]))
            && al.is_reduced_letters(&pre)
            && pre.last().is_none_or(|l| al.follows(l, &per[0]));
        if !ok {
            return Err(Error::Parse("boundary point is not a reduced infinite word".into()));
        }
        Ok(BoundaryPoint::canonical(pre, per))
    }

    fn children(&self, last: Option<&Letter>) -> Vec<Letter> {
        self.alphabet
            .letters()
            .into_iter()
            .filter(|x| last.is_none_or(|l| self.alphabet.follows(l, x)))
            .collect()
    }

    fn canonicalize(&self, prefixes: Vec<Vec<Letter>>) -> CylinderRegion {
        let mut set: BTreeSet<Vec<Letter>> = prefixes.into_iter().collect();
        loop {
            let minimal: BTreeSet<Vec<Letter>> = set
                .iter()
                .filter(|w| !set.iter().any(|u| u.len() < w.len() && is_prefix(u, w)))
                .cloned()
                .collect();
            set = minimal;
            let mut merged = None;
            for w in &set {
                if w.len() < 2 {
                    continue;
                }
                let parent = &w[..w.len() - 1];
                let kids = self.children(parent.last());
                if kids.iter().all(|k| {
                    let mut c = parent.to_vec();
                    c.push(*k);
                    set.contains(&c)
                }) {
                    merged = Some(parent.to_vec());
                    break;
                }
            }
            match merged {
                Some(p) => {
                    set.retain(|w| !is_prefix(&p, w));
                    set.insert(p);
                }
                None => break,
            }
        }
        CylinderRegion { prefixes: set.into_iter().collect() }
    }

    fn cylinder_subset(&self, w: &[Letter], r: &CylinderRegion) -> bool {
        if r.prefixes.iter().any(|u| is_prefix(u, w)) {
            return true;
        }
        if !r.prefixes.iter().any(|u| u.len() > w.len() && is_prefix(w, u)) {
            return false;
        }
        self.children(w.last()).into_iter().all(|c| {
            let mut ext = w.to_vec();
            ext.push(c);
            self.cylinder_subset(&ext, r)
        })
    }

    fn complement_below(&self, prefix: &[Letter], r: &CylinderRegion, out: &mut Vec<Vec<Letter>>) {
        for c in self.children(prefix.last()) {
            let mut w = prefix.to_vec();
            w.push(c);
            if r.prefixes.iter().any(|u| is_prefix(u, &w)) {
                continue;
            }
            if r.prefixes.iter().any(|u| u.len() > w.len() && is_prefix(&w, u)) {
                self.complement_below(&w, r, out);
            } else {
                out.push(w);
            }
        }
    }

    /// Image `h·C_w` as a list of cylinder prefixes.
    fn image_cylinder(&self, h: &[Letter], w: &[Letter]) -> Vec<Vec<Letter>> {
        let al = &self.alphabet;
        let mut h = h.to_vec();
        let mut w: std::collections::VecDeque<Letter> = w.iter().copied().collect();
        let last = *w.back().expect("nonempty prefix");
        while let (Some(x), Some(y)) = (h.last().copied(), w.front().copied()) {
            if x.gen != y.gen {
                break;
            }
            let n = al.orders()[x.gen];
            if n == 0 {
                if x.exp != -y.exp {
                    break;
                }
                h.pop();
                w.pop_front();
            } else {
                h.pop();
                let s = (x.exp + y.exp).rem_euclid(n as i64);
                if s == 0 {
                    w.pop_front();
                } else {
                    w[0].exp = s;
                    break;
                }
            }
        }
        if w.is_empty() {
            return self
                .children(Some(&last))
                .into_iter()
                .flat_map(|x| self.image_cylinder(&h, &[x]))
                .collect();
        }
        h.extend(w);
        vec![h]
    }

    /// Periodic continuation allowed after `last`.
    fn tail_after(&self, last: Option<&Letter>) -> Option<Vec<Letter>> {
        let al = &self.alphabet;
        for x in self.children(last) {
            if al.follows(&x, &x) {
                return Some(vec![x]);
            }
            if let Some(y) = self.children(Some(&x)).into_iter().find(|y| al.follows(y, &x)) {
                return Some(vec![x, y]);
            }
        }
        None
    }

    fn point_in_cylinder(&self, w: &[Letter]) -> Option<BoundaryPoint> {
        let tail = self.tail_after(w.last())?;
        Some(BoundaryPoint::canonical(w.to_vec(), tail))
    }

    /// `g = u·c·u⁻¹` with `c` cyclically reduced at the syllable level.
    pub fn cyclic_decomposition(&self, g: &GroupWord) -> (GroupWord, GroupWord) {
        let al = &self.alphabet;
        let mut u = GroupWord::identity();
        let mut c = g.clone();
        loop {
            let s = c.syllables();
            if s.len() < 2 || s[0].0 != s[s.len() - 1].0 {
                break;
            }
            let x = al.word([s[0]]);
            c = al.conjugate(&c, &x);
            // c_old = x·c_new·x⁻¹
            u = al.mul(&u, &x);
        }
        (u, c)
    }

    fn periodic_point(&self, u: &GroupWord, c: &GroupWord) -> BoundaryPoint {
        let per = self.alphabet.to_letters(c);
        let base = BoundaryPoint::canonical(vec![], per);
        self.apply_point(u, &base)
    }

    fn format_prefix(&self, w: &[Letter]) -> String {
        self.alphabet.format_letters(w)
    }
}

impl BoundaryModel for SymbolicModel {
    type Element = GroupWord;
    type Point = BoundaryPoint;
    type Region = CylinderRegion;

    fn tag(&self) -> &'static str {
        "symbolic"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn evaluate(&self, w: &GroupWord) -> GroupWord {
        self.alphabet.word(w.syllables().iter().copied())
    }

    fn compose(&self, g: &GroupWord, h: &GroupWord) -> GroupWord {
        self.alphabet.mul(g, h)
    }

    fn inverse(&self, g: &GroupWord) -> GroupWord {
        self.alphabet.inverse(g)
    }

    fn is_identity(&self, g: &GroupWord) -> bool {
        g.is_identity()
    }

    fn apply_point(&self, g: &GroupWord, p: &BoundaryPoint) -> BoundaryPoint {
        let al = &self.alphabet;
        let gl = al.to_letters(g);
        let per = p.period.len();
        let reps = gl.len().div_ceil(per) + 2;
        let len = p.preperiod.len() + per * reps;
        let mut out = gl;
        for i in 0..len {
            al.push_letter(&mut out, p.letter(i));
        }
        BoundaryPoint::canonical(out, p.period.clone())
    }

    fn apply_region(&self, g: &GroupWord, r: &CylinderRegion) -> Result<CylinderRegion> {
        let gl = self.alphabet.to_letters(g);
        let pieces = r.prefixes.iter().flat_map(|w| self.image_cylinder(&gl, w)).collect();
        Ok(self.canonicalize(pieces))
    }

    fn full(&self) -> CylinderRegion {
        self.canonicalize(self.alphabet.letters().into_iter().map(|l| vec![l]).collect())
    }

    fn empty(&self) -> CylinderRegion {
        CylinderRegion { prefixes: vec![] }
    }

    fn complement(&self, r: &CylinderRegion) -> CylinderRegion {
        let mut out = Vec::new();
        self.complement_below(&[], r, &mut out);
        self.canonicalize(out)
    }

    fn union(&self, r: &CylinderRegion, s: &CylinderRegion) -> CylinderRegion {
        self.canonicalize(r.prefixes.iter().chain(&s.prefixes).cloned().collect())
    }

    fn intersect(&self, r: &CylinderRegion, s: &CylinderRegion) -> CylinderRegion {
        let mut out = Vec::new();
        for u in &r.prefixes {
            for v in &s.prefixes {
                if is_prefix(u, v) {
                    out.push(v.clone());
                } else if is_prefix(v, u) {
                    out.push(u.clone());
                }
            }
        }
        self.canonicalize(out)
    }

    fn contains(&self, outer: &CylinderRegion, inner: &CylinderRegion) -> bool {
        inner.prefixes.iter().all(|w| self.cylinder_subset(w, outer))
    }

    fn contains_point(&self, r: &CylinderRegion, p: &BoundaryPoint) -> bool {
        r.prefixes.iter().any(|w| (0..w.len()).all(|i| p.letter(i) == w[i]))
    }

    fn interior_contains_point(&self, r: &CylinderRegion, p: &BoundaryPoint) -> bool {
        self.contains_point(r, p)
    }

    fn disjoint(&self, r: &CylinderRegion, s: &CylinderRegion) -> bool {
        r.prefixes.iter().all(|u| s.prefixes.iter().all(|v| !is_prefix(u, v) && !is_prefix(v, u)))
    }

    fn is_empty(&self, r: &CylinderRegion) -> bool {
        r.prefixes.is_empty()
    }

    fn interior_nonempty(&self, r: &CylinderRegion) -> bool {
        !r.prefixes.is_empty()
    }

    fn sample_interior_point(&self, r: &CylinderRegion) -> Result<BoundaryPoint> {
        r.prefixes.first().and_then(|w| self.point_in_cylinder(w)).ok_or(Error::EmptyRegionSample)
    }

    fn sample_interior_points(&self, r: &CylinderRegion, n: usize) -> Vec<BoundaryPoint> {
        let mut out: Vec<BoundaryPoint> = Vec::new();
        let mut queue: std::collections::VecDeque<Vec<Letter>> = r.prefixes.iter().cloned().collect();
        while out.len() < n {
            let Some(w) = queue.pop_front() else { break };
            if let Some(p) = self.point_in_cylinder(&w) {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            for c in self.children(w.last()) {
                let mut ext = w.clone();
                ext.push(c);
                queue.push_back(ext);
            }
        }
        out
    }

    fn interior_subregion(&self, r: &CylinderRegion) -> CylinderRegion {
        r.clone()
    }

    fn boundary_points(&self, r: &CylinderRegion) -> Vec<BoundaryPoint> {
        self.sample_interior_points(r, r.prefixes.len())
    }

    fn classify(&self, g: &GroupWord) -> Result<Classification<BoundaryPoint>> {
        if g.is_identity() {
            return Err(Error::IdentityElement);
        }
        let (u, c) = self.cyclic_decomposition(g);
        let s = c.syllables();
        if s.len() == 1 {
            let (gen, e) = s[0];
            let n = self.alphabet.orders()[gen] as u64;
            if n > 0 {
                let order = n / num_integer::gcd(n, e as u64);
                return Ok(Classification { kind: ElementKind::Elliptic { order }, fixed_points: vec![] });
            }
        }
        let plus = self.periodic_point(&u, &c);
        let minus = self.periodic_point(&u, &self.alphabet.inverse(&c));
        Ok(Classification { kind: ElementKind::Loxodromic, fixed_points: vec![minus, plus] })
    }

    fn attracting_neighbourhood(
        &self,
        g: &GroupWord,
        class: &Classification<BoundaryPoint>,
        level: u32,
    ) -> Option<CylinderRegion> {
        if class.kind != ElementKind::Loxodromic {
            return None;
        }
        let (u, c) = self.cyclic_decomposition(g);
        let cl = self.alphabet.to_letters(&c);
        let prefix: Vec<Letter> = (0..cl.len() * (level as usize + 1)).map(|i| cl[i % cl.len()]).collect();
        let base = CylinderRegion { prefixes: vec![prefix] };
        self.apply_region(&u, &base).ok()
    }

    fn wandering_candidates(
        &self,
        g: &GroupWord,
        class: &Classification<BoundaryPoint>,
        level: u32,
    ) -> Vec<CertKind<CylinderRegion>> {
        let al = &self.alphabet;
        let (u, c) = self.cyclic_decomposition(g);
        let conj = |r: CylinderRegion| self.apply_region(&u, &r).expect("symbolic images are exact");
        match class.kind {
            ElementKind::Elliptic { order } => {
                let gen = c.syllables()[0].0;
                let pieces = al.letters().into_iter().filter(|l| l.gen == gen).map(|l| vec![l]).collect();
                vec![CertKind::FiniteOrder { order, omega: conj(self.canonicalize(pieces)) }]
            }
            _ => {
                let mut out = Vec::new();
                if level == 0 {
                    // Schottky-type pair: C_{first letter of c} and C_{c⁻¹}
                    let cl = al.to_letters(&c);
                    let ci = al.to_letters(&al.inverse(&c));
                    let plus = self.canonicalize(vec![vec![cl[0]]]);
                    let minus = self.canonicalize(vec![ci]);
                    out.push(CertKind::InfiniteOrder { omega_minus: conj(minus), omega_plus: conj(plus) });
                }
                if let Some(plus) = self.attracting_neighbourhood(g, class, level) {
                    let pulled = self.apply_region(&al.inverse(g), &plus).expect("exact");
                    out.push(CertKind::InfiniteOrder { omega_minus: self.complement(&pulled), omega_plus: plus });
                }
                out
            }
        }
    }

    fn measure(&self, r: &CylinderRegion) -> f64 {
        r.prefixes
            .iter()
            .map(|w| {
                let mut m = 1.0;
                let mut prev: Option<&Letter> = None;
                for l in w {
                    m /= self.children(prev).len() as f64;
                    prev = Some(l);
                }
                m
            })
            .sum()
    }

    fn cluster_key(&self, p: &BoundaryPoint, resolution: u32) -> String {
        self.format_prefix(&p.prefix(resolution as usize))
    }

    fn format_point(&self, p: &BoundaryPoint) -> String {
        format!("{}({})", self.format_prefix(&p.preperiod), self.format_prefix(&p.period))
    }

    fn parse_point(&self, s: &str) -> Result<BoundaryPoint> {
        let t = s.trim().trim_end_matches("^∞").trim_end_matches("^inf");
        let (pre, per) = t
            .split_once('(')
            .and_then(|(a, b)| b.strip_suffix(')').map(|b| (a, b)))
            .ok_or_else(|| Error::Parse(format!("boundary point must look like pre(period): {s:?}")))?;
        self.point(pre, per)
    }

    fn format_element(&self, g: &GroupWord) -> String {
        self.alphabet.format_word(g)
    }

    fn region_to_json(&self, r: &CylinderRegion) -> Value {
        Value::Array(r.prefixes.iter().map(|w| Value::String(self.format_prefix(w))).collect())
    }

    fn region_from_json(&self, v: &Value) -> Result<CylinderRegion> {
        if v.as_str() == Some("full") {
            return Ok(self.full());
        }
        let arr = v.as_array().ok_or_else(|| Error::Parse(format!("bad cylinder region {v}")))?;
        let strs = arr
            .iter()
            .map(|x| x.as_str().ok_or_else(|| Error::Parse(format!("bad cylinder {x}"))))
            .collect::<Result<Vec<_>>>()?;
        self.cylinders(&strs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> SymbolicModel {
        SymbolicModel::f2()
    }

    #[test]
    fn point_action_reduces() {
        let m = f2();
        let p = m.point("baB", "B").unwrap();
        let q = m.apply_point(&m.word("A").unwrap(), &p);
        assert_eq!(m.format_point(&q), "Aba(B)");
        let back = m.apply_point(&m.word("a").unwrap(), &q);
        assert_eq!(back, p);
        let r = m.apply_point(&m.word("bAB").unwrap(), &p);
        assert_eq!(m.format_point(&r), "(B)");
    }

    #[test]
    fn canonical_points() {
        let m = f2();
        assert_eq!(m.point("BB", "B").unwrap(), m.point("", "BB").unwrap());
        assert_eq!(m.point("a", "ba").unwrap(), m.point("", "ab").unwrap());
        assert!(m.point("a", "A").is_err());
    }

    #[test]
    fn cylinder_images() {
        let m = f2();
        let cb = m.cylinders(&["b"]).unwrap();
        assert_eq!(m.apply_region(&m.word("a").unwrap(), &cb).unwrap(), m.cylinders(&["ab"]).unwrap());
        let ca = m.cylinders(&["a"]).unwrap();
        let img = m.apply_region(&m.word("A").unwrap(), &ca).unwrap();
        assert_eq!(img, m.cylinders(&["a", "b", "B"]).unwrap());
        assert_eq!(img, m.complement(&m.cylinders(&["A"]).unwrap()));
    }

    #[test]
    fn region_algebra() {
        let m = f2();
        assert!(m.disjoint(&m.cylinders(&["ab"]).unwrap(), &m.cylinders(&["aB"]).unwrap()));
        let sib = m.cylinders(&["aa", "ab", "aB"]).unwrap();
        assert_eq!(sib, m.cylinders(&["a"]).unwrap());
        assert_eq!(m.complement(&m.empty()), m.full());
        assert!(m.is_full(&m.union(&sib, &m.complement(&sib))));
        let x = m.cylinders(&["ba", "bA"]).unwrap();
        assert!(m.contains(&m.cylinders(&["b"]).unwrap(), &x));
        assert_eq!(m.intersect(&x, &m.cylinders(&["b"]).unwrap()), x);
    }

    #[test]
    fn free_product_cylinders() {
        let al = Alphabet::new(vec!["s".into(), "t".into()], vec![2, 3]).unwrap();
        let m = SymbolicModel::new(al).unwrap();
        // after t only s may follow, so C_ts = C_t
        assert_eq!(m.cylinders(&["ts"]).unwrap(), m.cylinders(&["t"]).unwrap());
        let s = m.word("s").unwrap();
        let img = m.apply_region(&s, &m.cylinders(&["s"]).unwrap()).unwrap();
        assert_eq!(img, m.cylinders(&["t", "t^2"]).unwrap());
        let c = m.classify(&m.word("t s t^2").unwrap()).unwrap();
        assert_eq!(c.kind, ElementKind::Elliptic { order: 2 });
        let c = m.classify(&m.word("s t").unwrap()).unwrap();
        assert_eq!(c.kind, ElementKind::Loxodromic);
        assert_eq!(m.format_point(&c.fixed_points[1]), "(st)");
    }

    #[test]
    fn classification_and_fixed_points() {
        let m = f2();
        let g = m.word("baB").unwrap();
        let c = m.classify(&g).unwrap();
        assert_eq!(c.kind, ElementKind::Loxodromic);
        assert_eq!(m.format_point(&c.fixed_points[1]), "b(a)");
        assert_eq!(m.format_point(&c.fixed_points[0]), "b(A)");
        for p in &c.fixed_points {
            assert_eq!(&m.apply_point(&g, p), p);
        }
        assert!(matches!(m.classify(&GroupWord::identity()), Err(Error::IdentityElement)));
    }

    #[test]
    fn json_round_trip() {
        let m = f2();
        let r = m.cylinders(&["ba", "bA", "ab"]).unwrap();
        assert_eq!(m.region_from_json(&m.region_to_json(&r)).unwrap(), r);
        let p = m.point("ba", "B").unwrap();
        assert_eq!(m.parse_point(&m.format_point(&p)).unwrap(), p);
    }
}
