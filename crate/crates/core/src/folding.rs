//! Stallings folding: rank of a finitely generated subgroup of a free group.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::word::{Alphabet, GroupWord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoldingVerdict {
    Independent { rank: usize },
    /// `relation` is a nonempty reduced product of the inputs equal to the
    /// identity, when the bounded search finds one.
    Dependent { rank: usize, relation: Option<Vec<(usize, i64)>> },
}

impl FoldingVerdict {
    pub fn is_independent(&self) -> bool {
        matches!(self, Self::Independent { .. })
    }
}

/// Folded core graph of the subgroup generated by some words.
#[derive(Clone, Debug)]
pub struct FoldedGraph {
    /// `(source, generator, target)` for positively oriented edges.
    pub edges: BTreeSet<(usize, usize, usize)>,
    pub vertices: usize,
}

impl FoldedGraph {
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices
    }

    /// Whether the graph reads `w` as a closed path at the base vertex.
    pub fn accepts(&self, w: &GroupWord) -> bool {
        let mut out: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut inc: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(u, g, v) in &self.edges {
            out.insert((u, g), v);
            inc.insert((v, g), u);
        }
        let mut at = 0;
        for &(g, e) in w.syllables() {
            for _ in 0..e.unsigned_abs() {
                let next = if e > 0 { out.get(&(at, g)) } else { inc.get(&(at, g)) };
                match next {
                    Some(&v) => at = v,
                    None => return false,
                }
            }
        }
        at == 0
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn free_check(al: &Alphabet) -> Result<()> {
    if al.orders().iter().any(|&o| o != 0) {
        return Err(Error::UnsupportedFamily("folding needs a free group".into()));
    }
    Ok(())
}

pub fn fold(al: &Alphabet, words: &[GroupWord]) -> Result<FoldedGraph> {
    free_check(al)?;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut n = 1;
    for w in words {
        let letters = al.to_letters(w);
        let mut at = 0;
        for (k, l) in letters.iter().enumerate() {
            let next = if k + 1 == letters.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            if l.exp > 0 {
                edges.push((at, l.gen, next));
            } else {
                edges.push((next, l.gen, at));
            }
            at = next;
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    loop {
        let mut out: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut inc: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut merged = false;
        for &(u, g, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (map, key, val) in [(&mut out, (u, g), v), (&mut inc, (v, g), u)] {
                match map.get(&key) {
                    Some(&w) if find(&mut parent, w) != find(&mut parent, val) => {
                        let (a, b) = (find(&mut parent, w), find(&mut parent, val));
                        parent[a.max(b)] = a.min(b);
                        merged = true;
                    }
                    Some(_) => {}
                    None => {
                        map.insert(key, val);
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    relabel.insert(0, 0);
    let mut roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    roots.sort();
    roots.dedup();
    for r in roots {
        let k = relabel.len();
        relabel.entry(r).or_insert(k);
    }
    let edges = edges
        .into_iter()
        .map(|(u, g, v)| (relabel[&find(&mut parent, u)], g, relabel[&find(&mut parent, v)]))
        .collect();
    Ok(FoldedGraph { edges, vertices: relabel.len() })
}

/// Independence of `words` as a free basis of the subgroup they generate.
pub fn folding_oracle(al: &Alphabet, words: &[GroupWord]) -> Result<FoldingVerdict> {
    let g = fold(al, words)?;
    let rank = g.rank();
    if rank == words.len() && words.iter().all(|w| !w.is_identity()) {
        return Ok(FoldingVerdict::Independent { rank });
    }
    Ok(FoldingVerdict::Dependent { rank, relation: find_relation(al, words) })
}

/// Shortest-first search for a nontrivial relation among `words`:
/// syllable length ≤ 4, exponents `|j| ≤ 3`, at most a million products.
pub fn find_relation(al: &Alphabet, words: &[GroupWord]) -> Option<Vec<(usize, i64)>> {
    if let Some(i) = words.iter().position(|w| w.is_identity()) {
        return Some(vec![(i, 1)]);
    }
    let exps = [1i64, -1, 2, -2, 3, -3];
    let mut budget = 1_000_000usize;
    let mut frontier: Vec<(Vec<(usize, i64)>, GroupWord)> = vec![(vec![], GroupWord::identity())];
    for _ in 0..4 {
        let mut next = Vec::new();
        for (expr, value) in &frontier {
            for i in 0..words.len() {
                if expr.last().is_some_and(|&(j, _)| j == i) {
                    continue;
                }
                for &e in &exps {
                    if budget == 0 {
                        return None;
                    }
                    budget -= 1;
                    let v = al.mul(value, &al.pow(&words[i], e));
                    let mut x = expr.clone();
                    x.push((i, e));
                    if v.is_identity() {
                        return Some(x);
                    }
                    next.push((x, v));
                }
            }
        }
        frontier = next;
    }
    None
}
