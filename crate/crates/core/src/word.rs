//! Group words over a free product of cyclic groups.
//!
//! A [`GroupWord`] is a list of syllables `(generator, exponent)`, reduced
//! against the generator orders (0 = infinite order). A [`Letter`] is the
//! unit of the symbolic boundary: `a`/`A` for an infinite-order generator,
//! `s^e` with `0 < e < n` for one of order `n`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub exp: i64,
}

impl Letter {
    fn rank(&self) -> i64 {
        if self.exp < 0 {
            // a < A for infinite generators
            1
        } else {
            self.exp - 1
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gen, self.rank()).cmp(&(other.gen, other.rank()))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupWord {
    syllables: Vec<(usize, i64)>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllable_len(&self) -> usize {
        self.syllables.len()
    }

    pub fn letter_len(&self, orders: &[u32]) -> usize {
        self.syllables
            .iter()
            .map(|&(g, e)| if orders[g] == 0 { e.unsigned_abs() as usize } else { 1 })
            .sum()
    }
}

/// Generator names and orders; everything that turns words into text and back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    orders: Vec<u32>,
}

fn normalize_exp(order: u32, e: i64) -> i64 {
    if order == 0 {
        e
    } else {
        e.rem_euclid(order as i64)
    }
}

impl Alphabet {
    pub fn new(names: Vec<String>, orders: Vec<u32>) -> Result<Self> {
        if names.len() != orders.len() {
            return Err(Error::InvalidPresentation("names and orders differ in length".into()));
        }
        if orders.iter().any(|&n| n == 1) {
            return Err(Error::InvalidPresentation("generator of order 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(Error::InvalidPresentation(format!("bad or repeated name {n:?}")));
            }
        }
        Ok(Self { names, orders })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn word(&self, syllables: impl IntoIterator<Item = (usize, i64)>) -> GroupWord {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in syllables {
            let e = normalize_exp(self.orders[g], e);
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(top) if top.0 == g => {
                    let merged = normalize_exp(self.orders[g], top.1 + e);
                    if merged == 0 {
                        out.pop();
                    } else {
                        top.1 = merged;
                    }
                }
                _ => out.push((g, e)),
            }
        }
        GroupWord { syllables: out }
    }

    pub fn generator(&self, g: usize) -> GroupWord {
        self.word([(g, 1)])
    }

    pub fn mul(&self, x: &GroupWord, y: &GroupWord) -> GroupWord {
        self.word(x.syllables.iter().chain(&y.syllables).copied())
    }

    pub fn inverse(&self, x: &GroupWord) -> GroupWord {
        self.word(x.syllables.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn pow(&self, x: &GroupWord, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse(x) } else { x.clone() };
        let mut acc = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// `d⁻¹·w·d`
    pub fn conjugate(&self, w: &GroupWord, d: &GroupWord) -> GroupWord {
        self.mul(&self.mul(&self.inverse(d), w), d)
    }

    pub fn product<'a>(&self, words: impl IntoIterator<Item = &'a GroupWord>) -> GroupWord {
        self.word(words.into_iter().flat_map(|w| w.syllables.iter().copied()))
    }

    pub fn is_infinite(&self, g: usize) -> bool {
        self.orders[g] == 0
    }

    /// All boundary letters in canonical order.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for (g, &n) in self.orders.iter().enumerate() {
            if n == 0 {
                out.push(Letter { gen: g, exp: 1 });
                out.push(Letter { gen: g, exp: -1 });
            } else {
                out.extend((1..n as i64).map(|e| Letter { gen: g, exp: e }));
            }
        }
        out
    }

    /// Whether `next` may follow `prev` in a reduced letter sequence.
    pub fn follows(&self, prev: &Letter, next: &Letter) -> bool {
        prev.gen != next.gen || (self.is_infinite(prev.gen) && prev.exp == next.exp)
    }

    pub fn letter_inverse(&self, l: &Letter) -> Letter {
        Letter { gen: l.gen, exp: normalize_exp(self.orders[l.gen], -l.exp) }
    }

    pub fn to_letters(&self, w: &GroupWord) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(g, e) in &w.syllables {
            if self.is_infinite(g) {
                let l = Letter { gen: g, exp: e.signum() };
                out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
            } else {
                out.push(Letter { gen: g, exp: e });
            }
        }
        out
    }

    pub fn from_letters(&self, letters: &[Letter]) -> GroupWord {
        self.word(letters.iter().map(|l| (l.gen, l.exp)))
    }

    /// Free reduction of a letter sequence (stack based).
    pub fn reduce_letters(&self, letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            self.push_letter(&mut out, l);
        }
        out
    }

    pub(crate) fn push_letter(&self, out: &mut Vec<Letter>, l: Letter) {
        match out.last_mut() {
            Some(top) if top.gen == l.gen => {
                let n = self.orders[l.gen];
                if n == 0 {
                    if top.exp == -l.exp {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                } else {
                    let s = normalize_exp(n, top.exp + l.exp);
                    if s == 0 {
                        out.pop();
                    } else {
                        top.exp = s;
                    }
                }
            }
            _ => out.push(l),
        }
    }

    pub fn is_reduced_letters(&self, letters: &[Letter]) -> bool {
        letters.windows(2).all(|w| self.follows(&w[0], &w[1]))
    }

    /// Cyclically reduced as a cyclic letter sequence (a single letter always is).
    pub fn is_cyclically_reduced_letters(&self, letters: &[Letter]) -> bool {
        self.is_reduced_letters(letters)
            && (letters.len() <= 1 || self.follows(letters.last().unwrap(), &letters[0]))
    }

    fn single_char_lower(&self, g: usize) -> bool {
        let n = &self.names[g];
        n.chars().count() == 1 && n.chars().all(|c| c.is_ascii_lowercase())
    }

    fn compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    fn syllable_text(&self, g: usize, e: i64) -> String {
        let name = &self.names[g];
        match e {
            1 => name.clone(),
            -1 if self.single_char_lower(g) => name.to_ascii_uppercase(),
            _ => format!("{name}^{e}"),
        }
    }

    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.is_identity() {
            return "1".into();
        }
        let sep = if self.compact() { "" } else { " " };
        let parts: Vec<String> = w
            .syllables
            .iter()
            .flat_map(|&(g, e)| {
                // infinite-order syllables with single-letter names print letter by letter
                if self.single_char_lower(g) && self.is_infinite(g) && e.abs() <= 3 {
                    vec![self.syllable_text(g, e.signum()); e.unsigned_abs() as usize]
                } else {
                    vec![self.syllable_text(g, e)]
                }
            })
            .collect();
        parts.join(sep)
    }

    pub fn format_letters(&self, letters: &[Letter]) -> String {
        let sep = if self.compact() { "" } else { " " };
        letters
            .iter()
            .map(|l| self.syllable_text(l.gen, l.exp))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Parses words like `baB`, `b a b^-1`, `s t^2`, `1`.
    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        let raw = self.parse_raw(s)?;
        Ok(self.word(raw))
    }

    /// Parses a letter sequence; it must already be reduced.
    pub fn parse_letters(&self, s: &str) -> Result<Vec<Letter>> {
        let raw = self.parse_raw(s)?;
        let mut letters = Vec::new();
        for (g, e) in raw {
            let w = self.word([(g, e)]);
            letters.extend(self.to_letters(&w));
        }
        if !self.is_reduced_letters(&letters) {
            return Err(Error::Parse(format!("letter sequence {s:?} is not reduced")));
        }
        Ok(letters)
    }

    fn parse_raw(&self, s: &str) -> Result<Vec<(usize, i64)>> {
        let t = s.trim();
        if t.is_empty() || t == "1" || t == "ε" {
            return Ok(Vec::new());
        }
        let chars: Vec<char> = t.chars().collect();
        let mut i = 0;
        let mut out = Vec::new();
        let mut by_len: Vec<usize> = (0..self.names.len()).collect();
        by_len.sort_by_key(|&g| std::cmp::Reverse(self.names[g].chars().count()));
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '·' || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            let rest: String = chars[i..].iter().collect();
            let mut matched = None;
            for &g in &by_len {
                let name = &self.names[g];
                if rest.starts_with(name.as_str()) {
                    matched = Some((g, 1i64, name.chars().count()));
                    break;
                }
            }
            if matched.is_none() {
                for &g in &by_len {
                    if self.single_char_lower(g) && rest.starts_with(&self.names[g].to_ascii_uppercase()) {
                        matched = Some((g, -1, 1));
                        break;
                    }
                }
            }
            let Some((g, sign, len)) = matched else {
                return Err(Error::Parse(format!("unknown generator at {rest:?} in {s:?}")));
            };
            i += len;
            let mut e = sign;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                let n: i64 = num.parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
                e *= n;
            }
            out.push((g, e));
        }
        Ok(out)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}^{}", self.gen, self.exp)
    }
}
