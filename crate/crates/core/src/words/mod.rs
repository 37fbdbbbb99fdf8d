//! Words in the standard generators of an Artin group, group homomorphisms
//! used as inequality certificates, the exact dihedral engine, and the
//! three-verdict equality oracle.

mod dihedral;
mod linear;
mod oracle;
mod ring;

use std::cmp::Ordering;
use std::fmt;

use crate::presentation::PresentationGraph;

pub use dihedral::{
    dihedral_coset_rep, dihedral_equal, dihedral_normal_form, naive_dihedral_closure, DihedralNF,
    DihedralTable,
};
pub use linear::{coxeter_image, deformed_image, LinearImage, RepKind, Representation, DEFORMATION};
pub use oracle::{
    equal_oracle, parabolic_membership_oracle, Budget, Certificate, EqualityVerdict, Membership,
    MembershipCertificate, Reducer, Reduction, StepKind, Trace, TraceStep,
};
pub use ring::{CyclotomicRing, RingElement};

/// A generator or its inverse. Ordered as `a < a⁻¹ < b < b⁻¹ < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Self { gen, inv: false }
    }

    pub fn neg(gen: usize) -> Self {
        Self { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Self { gen: self.gen, inv: !self.inv }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    fn key(self) -> usize {
        2 * self.gen + self.inv as usize
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("malformed letter {0:?}")]
    Malformed(String),
}

/// An element of `A_Γ` written as a sequence of signed generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Self(vec![Letter::pos(g)])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Self(letters.into_iter().collect())
    }

    /// Positive alternating word `s t s …` of the given length.
    pub fn alternating(s: usize, t: usize, len: usize) -> Self {
        Self((0..len).map(|i| Letter::pos(if i % 2 == 0 { s } else { t })).collect())
    }

    pub fn power(g: usize, k: i64) -> Self {
        let l = if k >= 0 { Letter::pos(g) } else { Letter::neg(g) };
        Self(vec![l; k.unsigned_abs() as usize])
    }

    /// Parses `a b a^-1`, also accepting the compact `aba^-1` when every
    /// generator name is a single character.
    pub fn parse(graph: &PresentationGraph, text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        let single_char = graph.names().iter().all(|n| n.chars().count() == 1);
        for tok in text.split_whitespace() {
            if tok == "1" || tok == "e" && graph.index_of("e").is_none() {
                continue;
            }
            if let Some(l) = parse_letter(graph, tok)? {
                letters.push(l);
                continue;
            }
            if !single_char {
                return Err(WordError::UnknownGenerator(tok.to_string()));
            }
            let chars: Vec<char> = tok.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let name = chars[i].to_string();
                let gen = graph.index_of(&name).ok_or_else(|| WordError::UnknownGenerator(name.clone()))?;
                i += 1;
                let mut inv = false;
                if chars[i..].starts_with(&['^', '-', '1']) {
                    inv = true;
                    i += 3;
                } else if chars[i..].starts_with(&['^', '1']) {
                    i += 2;
                } else if chars.get(i) == Some(&'^') {
                    return Err(WordError::Malformed(tok.to_string()));
                }
                letters.push(Letter { gen, inv });
            }
        }
        Ok(Self(letters))
    }

    pub fn display(&self, graph: &PresentationGraph) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|l| {
                if l.inv {
                    format!("{}^-1", graph.name(l.gen))
                } else {
                    graph.name(l.gen).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Cancels adjacent `x x⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// The height homomorphism: every generator counts `+1`.
    pub fn height(&self) -> i64 {
        self.0.iter().map(|l| l.sign()).sum()
    }

    /// Letter-by-letter substitution of generators by words.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for l in &self.0 {
            if l.inv {
                out.extend(images[l.gen].inverse().0);
            } else {
                out.extend_from_slice(&images[l.gen].0);
            }
        }
        Word(out).free_reduce()
    }

    pub fn generators_used(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.0.iter().map(|l| l.gen).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    pub fn uses_only(&self, gens: &[usize]) -> bool {
        self.0.iter().all(|l| gens.contains(&l.gen))
    }

    /// Exponent sum on each connected component of the odd-labelled subgraph.
    pub fn abelianization(&self, graph: &PresentationGraph) -> Vec<i64> {
        let comp = odd_components(graph);
        let k = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut v = vec![0i64; k];
        for l in &self.0 {
            v[comp[l.gen]] += l.sign();
        }
        v
    }
}

fn parse_letter(graph: &PresentationGraph, tok: &str) -> Result<Option<Letter>, WordError> {
    let (name, inv) = match tok.split_once('^') {
        Some((n, "-1")) => (n, true),
        Some((n, "1")) => (n, false),
        Some(_) => return Err(WordError::Malformed(tok.to_string())),
        None => (tok, false),
    };
    Ok(graph.index_of(name).map(|gen| Letter { gen, inv }))
}

/// Component index for each generator in the subgraph of odd-labelled edges,
/// numbered by first generator in input order.
pub fn odd_components(graph: &PresentationGraph) -> Vec<usize> {
    let n = graph.rank();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if comp[v] == usize::MAX && graph.label(u, v).is_some_and(|m| m % 2 == 1) {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

impl Ord for Word {
    /// Shortlex: shorter first, then lexicographic in the letter order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{}{}", l.gen, if l.inv { "^-1" } else { "" })?;
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn parse_and_display() {
        let g = g333();
        assert_eq!(w(&g, "a b a^-1"), w(&g, "aba^-1"));
        assert_eq!(w(&g, "a b^-1").display(&g), "a b^-1");
        assert_eq!(w(&g, "1"), Word::empty());
        assert!(Word::parse(&g, "a d").is_err());
        assert!(Word::parse(&g, "a^2").is_err());
    }

    #[test]
    fn free_reduction() {
        let g = g333();
        assert_eq!(w(&g, "a a^-1 b").free_reduce(), w(&g, "b"));
        assert_eq!(Word::empty().free_reduce(), Word::empty());
        assert_eq!(w(&g, "a b b^-1 a^-1").free_reduce(), Word::empty());
    }

    #[test]
    fn heights() {
        let g = g333();
        assert_eq!(w(&g, "a b a^-1").height(), 1);
        assert_eq!(w(&g, "a b a").height(), 3);
        assert_eq!(Word::empty().height(), 0);
    }

    #[test]
    fn abelianization_examples() {
        let g = g333();
        assert_eq!(w(&g, "a b^-1").abelianization(&g), vec![0]);
        let even = PresentationGraph::complete(&["a", "b", "c"], |_, _| 4);
        assert_eq!(w(&even, "a b^-1").abelianization(&even), vec![1, -1, 0]);
        let g = g345();
        assert_eq!(w(&g, "a b c").abelianization(&g), vec![3]);
    }

    #[test]
    fn shortlex_order() {
        let g = g333();
        let mut ws = vec![w(&g, "b"), w(&g, "a^-1"), w(&g, "a a"), w(&g, "a")];
        ws.sort();
        assert_eq!(ws, vec![w(&g, "a"), w(&g, "a^-1"), w(&g, "b"), w(&g, "a a")]);
    }
}
