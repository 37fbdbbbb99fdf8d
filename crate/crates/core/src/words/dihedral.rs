//! Exact computations in dihedral Artin groups `A_st` with label `m`.
//!
//! Every element is uniquely `Δ^p · P` where `Δ` is the Garside element
//! (alternating word of length `m`) and `P` is a positive word containing no
//! alternating subword of length `m`. Such a `P` is the only positive word in
//! its class, which makes `(p, P)` a normal form.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, LazyLock, Mutex};

use super::{Letter, Word};

/// Left-greedy normal form `Δ^p · f_1 ⋯ f_k` of an element of `A_st`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DihedralNF {
    pub s: usize,
    pub t: usize,
    pub m: u32,
    pub delta_power: i64,
    /// Strictly alternating positive words of length `< m`; each factor starts
    /// with the letter its predecessor ends with.
    pub factors: Vec<Word>,
}

impl DihedralNF {
    /// Re-expands to a word in the group.
    pub fn to_word(&self) -> Word {
        let delta = Word::alternating(self.s, self.t, self.m as usize);
        let mut out = Vec::new();
        let p = self.delta_power;
        let block = if p >= 0 { delta.clone() } else { delta.inverse() };
        for _ in 0..p.unsigned_abs() {
            out.extend_from_slice(block.letters());
        }
        for f in &self.factors {
            out.extend_from_slice(f.letters());
        }
        Word(out)
    }

    pub fn is_identity(&self) -> bool {
        self.delta_power == 0 && self.factors.is_empty()
    }
}

/// Positive-part representation over local letters `0 = s`, `1 = t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct LocalNF {
    pub power: i64,
    pub positive: Vec<u8>,
}

fn tau(x: u8, m: u32) -> u8 {
    if m % 2 == 1 {
        1 - x
    } else {
        x
    }
}

fn push_positive(nf: &mut LocalNF, x: u8, m: u32) {
    nf.positive.push(x);
    let m = m as usize;
    let len = nf.positive.len();
    if len >= m {
        let tail = &nf.positive[len - m..];
        if tail.windows(2).all(|w| w[0] != w[1]) {
            // U·Δ = Δ·τ(U)
            nf.positive.truncate(len - m);
            for y in nf.positive.iter_mut() {
                *y = tau(*y, m as u32);
            }
            nf.power += 1;
        }
    }
}

fn push_inverse(nf: &mut LocalNF, x: u8, m: u32) {
    // x⁻¹ = Δ⁻¹·y with y·x = Δ; P·Δ⁻¹ = Δ⁻¹·τ(P).
    for y in nf.positive.iter_mut() {
        *y = tau(*y, m);
    }
    nf.power -= 1;
    let start = if m % 2 == 1 { x } else { 1 - x };
    for i in 0..(m as usize - 1) {
        let y = if i % 2 == 0 { start } else { 1 - start };
        push_positive(nf, y, m);
    }
}

/// Local letters: `0 = s`, `1 = s⁻¹`, `2 = t`, `3 = t⁻¹`.
pub(crate) fn local_nf(m: u32, letters: &[u8]) -> LocalNF {
    let mut nf = LocalNF { power: 0, positive: Vec::new() };
    for &l in letters {
        let x = l / 2;
        if l % 2 == 0 {
            push_positive(&mut nf, x, m);
        } else {
            push_inverse(&mut nf, x, m);
        }
    }
    nf
}

pub(crate) fn to_local(w: &Word, s: usize, t: usize) -> Option<Vec<u8>> {
    w.letters()
        .iter()
        .map(|l| {
            let base = if l.gen == s {
                0
            } else if l.gen == t {
                2
            } else {
                return None;
            };
            Some(base + l.inv as u8)
        })
        .collect()
}

pub(crate) fn from_local(local: &[u8], s: usize, t: usize) -> Word {
    Word(
        local
            .iter()
            .map(|&l| Letter { gen: if l / 2 == 0 { s } else { t }, inv: l % 2 == 1 })
            .collect(),
    )
}

fn order_pair(s: usize, t: usize) -> (usize, usize) {
    (s.min(t), s.max(t))
}

/// Normal form of `w`, a word over `{s, t}`. Panics on other letters.
pub fn dihedral_normal_form(m: u32, s: usize, t: usize, w: &Word) -> DihedralNF {
    let (s, t) = order_pair(s, t);
    let local = to_local(w, s, t).expect("word must use only the two dihedral generators");
    let nf = local_nf(m, &local);
    let mut factors = Vec::new();
    let mut cur: Vec<u8> = Vec::new();
    for &x in &nf.positive {
        if cur.last() == Some(&x) {
            factors.push(from_local(&cur.iter().map(|y| 2 * y).collect::<Vec<_>>(), s, t));
            cur.clear();
        }
        cur.push(x);
    }
    if !cur.is_empty() {
        factors.push(from_local(&cur.iter().map(|y| 2 * y).collect::<Vec<_>>(), s, t));
    }
    DihedralNF { s, t, m, delta_power: nf.power, factors }
}

pub fn dihedral_equal(m: u32, s: usize, t: usize, w1: &Word, w2: &Word) -> bool {
    let (s, t) = order_pair(s, t);
    match (to_local(w1, s, t), to_local(w2, s, t)) {
        (Some(a), Some(b)) => local_nf(m, &a) == local_nf(m, &b),
        _ => panic!("words must use only the two dihedral generators"),
    }
}

/// Freely reduced local words of length exactly `len`, in shortlex order.
fn reduced_words_of_len(len: usize) -> Vec<Vec<u8>> {
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for l in 0..4u8 {
                if w.last().is_some_and(|&p| p ^ 1 == l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        layer = next;
    }
    layer
}

/// Shortlex-least word for the left coset `w⟨gen⟩` in `A_st`.
pub fn dihedral_coset_rep(m: u32, s: usize, t: usize, w: &Word, gen: usize) -> Word {
    let (s, t) = order_pair(s, t);
    assert!(gen == s || gen == t);
    let w = w.free_reduce();
    let local_w = to_local(&w, s, t).expect("word must use only the two dihedral generators");
    let g = if gen == s { 0u8 } else { 2u8 };
    for len in 0..=local_w.len() {
        for u in reduced_words_of_len(len) {
            // u⁻¹w ∈ ⟨gen⟩ iff it equals gen^{height}.
            let mut x: Vec<u8> = u.iter().rev().map(|l| l ^ 1).collect();
            x.extend_from_slice(&local_w);
            let ht: i64 = x.iter().map(|l| if l % 2 == 0 { 1 } else { -1 }).sum();
            let letter = if ht >= 0 { g } else { g + 1 };
            let power = vec![letter; ht.unsigned_abs() as usize];
            if local_nf(m, &x) == local_nf(m, &power) {
                return from_local(&u, s, t);
            }
        }
    }
    unreachable!("w itself represents its coset")
}

/// Every freely reduced local word up to a fixed length, grouped by element.
#[derive(Debug)]
pub struct DihedralTable {
    pub m: u32,
    pub max_len: usize,
    class_of: HashMap<Vec<u8>, usize>,
    /// Words of each class in shortlex order.
    classes: Vec<Vec<Vec<u8>>>,
}

static TABLES: LazyLock<Mutex<HashMap<(u32, usize), Arc<DihedralTable>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl DihedralTable {
    pub fn get(m: u32, max_len: usize) -> Arc<DihedralTable> {
        let mut cache = TABLES.lock().unwrap();
        cache.entry((m, max_len)).or_insert_with(|| Arc::new(Self::build(m, max_len))).clone()
    }

    fn build(m: u32, max_len: usize) -> Self {
        let mut by_nf: HashMap<LocalNF, usize> = HashMap::new();
        let mut class_of = HashMap::new();
        let mut classes: Vec<Vec<Vec<u8>>> = Vec::new();
        for len in 0..=max_len {
            for w in reduced_words_of_len(len) {
                let nf = local_nf(m, &w);
                let id = *by_nf.entry(nf).or_insert_with(|| {
                    classes.push(Vec::new());
                    classes.len() - 1
                });
                classes[id].push(w.clone());
                class_of.insert(w, id);
            }
        }
        Self { m, max_len, class_of, classes }
    }

    /// All tabulated words equal to `local` in `A_st`, shortest first.
    pub(crate) fn class(&self, local: &[u8]) -> Option<&[Vec<u8>]> {
        self.class_of.get(local).map(|&id| self.classes[id].as_slice())
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Independent equality oracle by saturation in the positive monoid.
///
/// Rewrites each `x⁻¹` as `Δ⁻¹ y` by naive letter pushing, clears the common
/// `Δ` power, and decides equality of the two positive words by breadth-first
/// closure under the single positive relation `sts… = tst…`. Shares no code
/// with the normal-form engine.
pub fn naive_dihedral_closure(m: u32, w1: &[(bool, bool)], w2: &[(bool, bool)]) -> bool {
    // Letters are (is_t, inverse).
    fn to_delta_positive(m: usize, w: &[(bool, bool)]) -> (i64, Vec<bool>) {
        // Element = Δ^{-k} · P; Δ⁻¹ moves left through a positive letter by flipping it
        // when m is odd.
        let mut k = 0i64;
        let mut p: Vec<bool> = Vec::new();
        for &(is_t, inv) in w {
            if !inv {
                p.push(is_t);
            } else {
                k += 1;
                if m % 2 == 1 {
                    for x in p.iter_mut() {
                        *x = !*x;
                    }
                }
                // x⁻¹ = Δ⁻¹ · (alternating word of length m-1 that ends just before x)
                let last = is_t;
                let start = if m % 2 == 1 { last } else { !last };
                for i in 0..m - 1 {
                    p.push(if i % 2 == 0 { start } else { !start });
                }
            }
        }
        (k, p)
    }
    fn delta_times(m: usize, j: i64, mut p: Vec<bool>) -> Vec<bool> {
        let mut out = Vec::new();
        for _ in 0..j {
            for i in 0..m {
                out.push(i % 2 == 1);
            }
        }
        out.append(&mut p);
        out
    }
    let m = m as usize;
    let (k1, p1) = to_delta_positive(m, w1);
    let (k2, p2) = to_delta_positive(m, w2);
    let k = k1.max(k2);
    let a = delta_times(m, k - k1, p1);
    let b = delta_times(m, k - k2, p2);
    if a.len() != b.len() {
        return false;
    }
    let mut seen: HashSet<Vec<bool>> = HashSet::from([a.clone()]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            return true;
        }
        if x.len() < m {
            continue;
        }
        for i in 0..=x.len() - m {
            if x[i..i + m].windows(2).all(|w| w[0] != w[1]) {
                let mut y = x.clone();
                for c in &mut y[i..i + m] {
                    *c = !*c;
                }
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::PresentationGraph;

    fn ab() -> PresentationGraph {
        PresentationGraph::parse("edge a b 3").unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&ab(), s).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let nf = dihedral_normal_form(3, 0, 1, &w("a b a b"));
        assert_eq!(nf.delta_power, 1);
        assert_eq!(nf.factors, vec![w("b")]);
        assert!(dihedral_normal_form(3, 0, 1, &w("a b a b^-1 a^-1 b^-1")).is_identity());
        assert!(dihedral_normal_form(5, 0, 1, &Word::empty()).is_identity());
    }

    #[test]
    fn normal_form_round_trips() {
        for m in [3, 4, 5] {
            for len in 0..=5 {
                for local in reduced_words_of_len(len) {
                    let word = from_local(&local, 0, 1);
                    let nf = dihedral_normal_form(m, 0, 1, &word);
                    assert!(dihedral_equal(m, 0, 1, &nf.to_word(), &word));
                    for pair in nf.factors.windows(2) {
                        assert_eq!(pair[0].letters().last(), pair[1].letters().first());
                    }
                    assert!(nf.factors.iter().all(|f| f.len() < m as usize));
                }
            }
        }
    }

    #[test]
    fn equality_examples() {
        assert!(dihedral_equal(3, 0, 1, &w("a b a"), &w("b a b")));
        assert!(dihedral_equal(4, 0, 1, &w("a b a b"), &w("b a b a")));
        assert!(!dihedral_equal(4, 0, 1, &w("a b a"), &w("b a b")));
        for m in 3..8 {
            assert!(!dihedral_equal(m, 0, 1, &w("a"), &w("b")));
        }
    }

    #[test]
    fn coset_representatives() {
        assert_eq!(dihedral_coset_rep(3, 0, 1, &w("a"), 0), Word::empty());
        assert_eq!(dihedral_coset_rep(3, 0, 1, &w("b a"), 0), w("b"));
        assert_eq!(dihedral_coset_rep(3, 0, 1, &w("a b"), 0), w("a b"));
        // aba⟨b⟩ = bab⟨b⟩ = ba⟨b⟩
        assert_eq!(dihedral_coset_rep(3, 0, 1, &w("a b a"), 1), w("b a"));
    }

    #[test]
    fn naive_closure_agrees_on_relations() {
        let a = (false, false);
        let b = (true, false);
        let ai = (false, true);
        let bi = (true, true);
        assert!(naive_dihedral_closure(3, &[a, b, a], &[b, a, b]));
        assert!(!naive_dihedral_closure(4, &[a, b, a], &[b, a, b]));
        assert!(naive_dihedral_closure(3, &[a, b, a, bi, ai, bi], &[]));
        assert!(naive_dihedral_closure(5, &[a, ai], &[]));
        assert!(!naive_dihedral_closure(5, &[a, a], &[b, b]));
    }

    #[test]
    fn tables_group_words_by_element() {
        let t = DihedralTable::get(3, 4);
        let class = t.class(&[0, 2, 0]).unwrap();
        assert!(class.contains(&vec![2, 0, 2]));
        assert!(class.iter().all(|c| c.len() >= 3));
    }
}
