//! Conjugacy classes of free groups and free products of cyclic groups,
//! keyed by the least rotation of a cyclically reduced letter word.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::presentation::{Family, GroupPresentation};
use crate::search::words_in_order;
use crate::word::{Alphabet, GroupWord, Letter};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClassRep {
    pub representative: GroupWord,
    pub key: String,
    pub letters: Vec<Letter>,
}

fn least_rotation(letters: &[Letter]) -> Vec<Letter> {
    (0..letters.len())
        .map(|i| {
            let mut r = letters.to_vec();
            r.rotate_left(i);
            r
        })
        .min()
        .expect("nonempty")
}

fn cyclic_core(al: &Alphabet, w: &GroupWord) -> Vec<Letter> {
    let mut letters = al.to_letters(w);
    loop {
        let n = letters.len();
        if n < 2 || al.is_cyclically_reduced_letters(&letters) {
            return letters;
        }
        // rotate the last letter to the front and re-reduce
        let last = letters.pop().expect("nonempty");
        let mut out = vec![last];
        for l in letters {
            al.push_letter(&mut out, l);
        }
        letters = out;
    }
}

/// Canonical key of the conjugacy class of `w` (identity has key "1").
pub fn class_key(al: &Alphabet, w: &GroupWord) -> String {
    let core = cyclic_core(al, w);
    if core.is_empty() {
        return "1".into();
    }
    al.format_letters(&least_rotation(&core))
}

/// The class of a user-supplied word, keeping the word as representative.
pub fn class_of(al: &Alphabet, w: &GroupWord) -> ConjugacyClassRep {
    ConjugacyClassRep { representative: w.clone(), key: class_key(al, w), letters: al.to_letters(w) }
}

/// One representative per nontrivial class with cyclic length `≤ max_len`,
/// ordered by length and then key.
pub fn enumerate_classes(al: &Alphabet, max_len: usize) -> Vec<ConjugacyClassRep> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in words_in_order(al, max_len) {
        if w.len() > 1 && !al.is_cyclically_reduced_letters(&w) {
            continue;
        }
        let rot = least_rotation(&w);
        if rot != w || !seen.insert(rot.clone()) {
            continue;
        }
        out.push(ConjugacyClassRep { representative: al.from_letters(&rot), key: al.format_letters(&rot), letters: rot });
    }
    out
}

pub fn enumerate_conjugacy_classes(p: &GroupPresentation, max_len: usize) -> Result<Vec<ConjugacyClassRep>> {
    if p.family == Family::RawMatrixGroup {
        return Err(Error::UnsupportedFamily("conjugacy classes of raw matrix groups must be supplied".into()));
    }
    Ok(enumerate_classes(&p.alphabet()?, max_len))
}

/// The first `n` classes, growing the length bound as needed up to `max_len`.
pub fn first_classes(p: &GroupPresentation, n: usize, max_len: usize) -> Result<Vec<ConjugacyClassRep>> {
    for len in 1..=max_len {
        let cs = enumerate_conjugacy_classes(p, len)?;
        if cs.len() >= n {
            return Ok(cs.into_iter().take(n).collect());
        }
    }
    Err(Error::BudgetExhausted(format!("fewer than {n} classes of length ≤ {max_len}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_counts() {
        let al = GroupPresentation::f2().alphabet().unwrap();
        let keys: Vec<String> = enumerate_classes(&al, 1).into_iter().map(|c| c.key).collect();
        assert_eq!(keys, ["a", "A", "b", "B"]);
        assert_eq!(enumerate_classes(&al, 2).len(), 12);
    }

    #[test]
    fn modular_group_classes() {
        let al = GroupPresentation::psl2z().alphabet().unwrap();
        let keys: Vec<String> = enumerate_classes(&al, 2).into_iter().map(|c| c.key).collect();
        assert_eq!(keys.len(), 5);
        let first8 = first_classes(&GroupPresentation::psl2z(), 8, 8).unwrap();
        let reps: Vec<String> = first8.iter().map(|c| al.format_word(&c.representative)).collect();
        assert_eq!(reps[..3], ["s", "t", "t^2"]);
        assert_eq!(first8.len(), 8);
    }

    #[test]
    fn keys_are_conjugation_invariant() {
        let al = GroupPresentation::f2().alphabet().unwrap();
        let w = al.parse_word("abAAb").unwrap();
        let d = al.parse_word("bBa").unwrap();
        assert_eq!(class_key(&al, &w), class_key(&al, &al.conjugate(&w, &d)));
        assert_eq!(class_key(&al, &al.parse_word("baB").unwrap()), "a");
        assert_eq!(class_key(&al, &GroupWord::identity()), "1");
    }
}
