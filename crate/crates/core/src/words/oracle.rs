//! Three-verdict equality and parabolic-membership oracles for `A_Γ`.
//!
//! `Equal` verdicts carry a trace of free cancellations/insertions and
//! dihedral subword replacements that can be replayed step by step;
//! `Unequal` verdicts carry the separating homomorphic invariant. Both kinds
//! are re-checked before they are returned.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::dihedral::{dihedral_equal, to_local, from_local, DihedralTable};
use super::linear::{LinearImage, RepKind, Representation};
use super::{Letter, Word};
use crate::presentation::PresentationGraph;

/// Longest dihedral window the rewriter replaces as a unit.
const WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Longest word any rewriting state may have.
    pub max_len: usize,
    /// Number of states expanded per reduction before giving up.
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_len: 24, max_states: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StepKind {
    FreeCancel,
    FreeInsert,
    /// Replacement of a subword over `{s, t}` by an equal word of `A_st`.
    Dihedral { s: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub at: usize,
    pub removed: Word,
    pub inserted: Word,
    pub kind: StepKind,
}

impl TraceStep {
    fn inverse(&self) -> TraceStep {
        let kind = match self.kind {
            StepKind::FreeCancel => StepKind::FreeInsert,
            StepKind::FreeInsert => StepKind::FreeCancel,
            StepKind::Dihedral { s, t } => StepKind::Dihedral { s, t },
        };
        TraceStep { at: self.at, removed: self.inserted.clone(), inserted: self.removed.clone(), kind }
    }
}

/// A replayable chain of relation moves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace(pub Vec<TraceStep>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {index}: {reason}")]
pub struct ReplayError {
    pub index: usize,
    pub reason: String,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies every step to `start`, checking that each one is a valid move
    /// in `A_Γ`, and returns the final word.
    pub fn replay(&self, graph: &PresentationGraph, start: &Word) -> Result<Word, ReplayError> {
        let mut cur = start.0.clone();
        for (index, step) in self.0.iter().enumerate() {
            let err = |reason: String| ReplayError { index, reason };
            let end = step.at + step.removed.len();
            if end > cur.len() || cur[step.at..end] != step.removed.0[..] {
                return Err(err("removed subword does not match".into()));
            }
            match step.kind {
                StepKind::FreeCancel | StepKind::FreeInsert => {
                    let pair = if step.kind == StepKind::FreeCancel {
                        (&step.removed, &step.inserted)
                    } else {
                        (&step.inserted, &step.removed)
                    };
                    let ok = pair.1.is_empty()
                        && pair.0.len() == 2
                        && pair.0 .0[0] == pair.0 .0[1].inverse();
                    if !ok {
                        return Err(err("not a free cancellation".into()));
                    }
                }
                StepKind::Dihedral { s, t } => {
                    let Some(m) = graph.label(s, t) else {
                        return Err(err("generators not adjacent".into()));
                    };
                    let gens = [s, t];
                    if !step.removed.uses_only(&gens) || !step.inserted.uses_only(&gens) {
                        return Err(err("letters outside the dihedral pair".into()));
                    }
                    if !dihedral_equal(m, s, t, &step.removed, &step.inserted) {
                        return Err(err("dihedral words are not equal".into()));
                    }
                }
            }
            cur.splice(step.at..end, step.inserted.0.iter().copied());
        }
        Ok(Word(cur))
    }

    fn extend(&mut self, other: Trace) {
        self.0.extend(other.0);
    }

    fn reversed(&self) -> Trace {
        Trace(self.0.iter().rev().map(TraceStep::inverse).collect())
    }
}

/// Separating invariant values for an `Unequal` verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Height { left: i64, right: i64 },
    Abelianization { left: Vec<i64>, right: Vec<i64> },
    Coxeter { left: LinearImage, right: LinearImage },
    /// Images under the deformed (non-involutive) representation differ.
    Deformed { left: LinearImage, right: LinearImage },
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::Height { .. } => "height",
            Certificate::Abelianization { .. } => "abelianization",
            Certificate::Coxeter { .. } => "coxeter",
            Certificate::Deformed { .. } => "deformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqualityVerdict {
    Equal(Trace),
    Unequal(Certificate),
    Unknown,
}

impl EqualityVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, EqualityVerdict::Equal(_))
    }

    pub fn is_unequal(&self) -> bool {
        matches!(self, EqualityVerdict::Unequal(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            EqualityVerdict::Equal(_) => "equal",
            EqualityVerdict::Unequal(_) => "unequal",
            EqualityVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipCertificate {
    /// The Coxeter image lies outside the finite dihedral subgroup `W_st`.
    Coxeter,
    /// Exponent sum on an odd-label component not meeting the subgroup.
    Abelianization { component: usize, value: i64 },
    /// A row of the deformed image outside the subgroup's generators is not a unit row.
    DeformedRows,
    /// For a cyclic subgroup `⟨s⟩`: the deformed image differs from that of `s^{height}`.
    DeformedCyclic,
    /// A reduct of `w` lies in the dihedral parabolic on `support`, which
    /// meets the subgroup in the parabolic on the common generators; the
    /// Garside normal forms rule out membership there.
    EdgeSupport { support: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    In { witness: Word, trace: Trace },
    NotIn(MembershipCertificate),
    Unknown,
}

/// Result of length-reducing rewriting.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub word: Word,
    pub trace: Trace,
    /// True when the equal-length closure of the final word was exhausted.
    pub complete: bool,
}

/// Rewriting engine and invariant cache for one presentation graph.
#[derive(Debug, Clone)]
pub struct Reducer {
    graph: Arc<PresentationGraph>,
    coxeter: Arc<Representation>,
    deformed: Arc<Representation>,
    tables: HashMap<u32, Arc<DihedralTable>>,
    components: Vec<usize>,
}

fn free_reduce_traced(mut cur: Vec<Letter>, trace: &mut Trace) -> Vec<Letter> {
    let mut i = 0;
    while i + 1 < cur.len() {
        if cur[i] == cur[i + 1].inverse() {
            trace.0.push(TraceStep {
                at: i,
                removed: Word(cur[i..i + 2].to_vec()),
                inserted: Word::empty(),
                kind: StepKind::FreeCancel,
            });
            cur.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    cur
}

impl Reducer {
    pub fn new(graph: &PresentationGraph) -> Self {
        let tables = graph
            .label_set()
            .into_iter()
            .map(|m| (m, DihedralTable::get(m, WINDOW)))
            .collect();
        Self {
            graph: Arc::new(graph.clone()),
            coxeter: Arc::new(Representation::new(graph, RepKind::Coxeter)),
            deformed: Arc::new(Representation::new(graph, RepKind::Deformed)),
            tables,
            components: super::odd_components(graph),
        }
    }

    pub fn graph(&self) -> &PresentationGraph {
        &self.graph
    }

    pub fn coxeter(&self) -> &Representation {
        &self.coxeter
    }

    pub fn deformed(&self) -> &Representation {
        &self.deformed
    }

    /// Words reachable from `x` by one non-lengthening dihedral replacement
    /// followed by free reduction.
    fn moves(&self, x: &[Letter]) -> Vec<(Vec<Letter>, Trace)> {
        let mut out = Vec::new();
        for i in 0..x.len() {
            let mut pair: Option<(usize, usize)> = None;
            for j in i + 1..x.len().min(i + WINDOW) {
                let g = x[j].gen;
                match pair {
                    None if g != x[i].gen => pair = Some((x[i].gen.min(g), x[i].gen.max(g))),
                    Some((s, t)) if g != s && g != t => break,
                    _ => {}
                }
                let Some((s, t)) = pair else { continue };
                let Some(m) = self.graph.label(s, t) else { break };
                let window = Word(x[i..=j].to_vec());
                let local = to_local(&window, s, t).expect("window over the pair");
                let Some(class) = self.tables[&m].class(&local) else { continue };
                for alt in class {
                    if alt.len() > local.len() {
                        break;
                    }
                    if *alt == local {
                        continue;
                    }
                    let inserted = from_local(alt, s, t);
                    let mut trace = Trace(vec![TraceStep {
                        at: i,
                        removed: window.clone(),
                        inserted: inserted.clone(),
                        kind: StepKind::Dihedral { s, t },
                    }]);
                    let mut y = x[..i].to_vec();
                    y.extend_from_slice(&inserted.0);
                    y.extend_from_slice(&x[j + 1..]);
                    let y = free_reduce_traced(y, &mut trace);
                    out.push((y, trace));
                }
            }
        }
        out
    }

    /// Rewrites `w` to the shortlex-least word found by non-lengthening
    /// moves, restarting from every strictly shorter word reached.
    pub fn reduce(&self, w: &Word, budget: Budget) -> Reduction {
        let mut trace = Trace::default();
        let mut cur = free_reduce_traced(w.0.clone(), &mut trace);
        if cur.len() > budget.max_len {
            return Reduction { word: Word(cur), trace, complete: false };
        }
        let mut expanded = 0usize;
        'outer: loop {
            let start = Word(cur.clone());
            let mut parent: HashMap<Word, (Word, Trace)> = HashMap::new();
            let mut seen: HashSet<Word> = HashSet::from([start.clone()]);
            let mut queue = VecDeque::from([start.clone()]);
            let path_to = |target: &Word, parent: &HashMap<Word, (Word, Trace)>| {
                let mut chunks = Vec::new();
                let mut node = target.clone();
                while let Some((prev, t)) = parent.get(&node) {
                    chunks.push(t.clone());
                    node = prev.clone();
                }
                let mut tr = Trace::default();
                for c in chunks.into_iter().rev() {
                    tr.extend(c);
                }
                tr
            };
            while let Some(x) = queue.pop_front() {
                expanded += 1;
                if expanded > budget.max_states {
                    let best = seen.iter().min().cloned().unwrap_or(start.clone());
                    trace.extend(path_to(&best, &parent));
                    return Reduction { word: best, trace, complete: false };
                }
                for (y, step) in self.moves(&x.0) {
                    let y = Word(y);
                    if seen.contains(&y) {
                        continue;
                    }
                    if y.len() < start.len() {
                        trace.extend(path_to(&x, &parent));
                        trace.extend(step);
                        cur = y.0;
                        continue 'outer;
                    }
                    seen.insert(y.clone());
                    parent.insert(y.clone(), (x.clone(), step));
                    queue.push_back(y);
                }
            }
            let best = seen.iter().min().cloned().expect("closure contains the start");
            trace.extend(path_to(&best, &parent));
            return Reduction { word: best, trace, complete: true };
        }
    }

    /// First separating invariant among height, abelianization, Coxeter and
    /// deformed images.
    pub fn certificate(&self, w1: &Word, w2: &Word) -> Option<Certificate> {
        let (h1, h2) = (w1.height(), w2.height());
        if h1 != h2 {
            return Some(Certificate::Height { left: h1, right: h2 });
        }
        let (a1, a2) = (w1.abelianization(&self.graph), w2.abelianization(&self.graph));
        if a1 != a2 {
            return Some(Certificate::Abelianization { left: a1, right: a2 });
        }
        if let (Some(c1), Some(c2)) = (self.coxeter.image(w1), self.coxeter.image(w2)) {
            if c1 != c2 {
                return Some(Certificate::Coxeter { left: c1, right: c2 });
            }
        }
        if let (Some(d1), Some(d2)) = (self.deformed.image(w1), self.deformed.image(w2)) {
            if d1 != d2 {
                return Some(Certificate::Deformed { left: d1, right: d2 });
            }
        }
        None
    }

    /// Recomputes the invariant named by `cert` from scratch and checks that
    /// it separates `w1` and `w2` with the recorded values.
    pub fn check_certificate(&self, w1: &Word, w2: &Word, cert: &Certificate) -> bool {
        match cert {
            Certificate::Height { left, right } => {
                left != right && w1.height() == *left && w2.height() == *right
            }
            Certificate::Abelianization { left, right } => {
                left != right
                    && w1.abelianization(&self.graph) == *left
                    && w2.abelianization(&self.graph) == *right
            }
            Certificate::Coxeter { left, right } | Certificate::Deformed { left, right } => {
                let rep = Representation::new(&self.graph, left.kind);
                left != right
                    && rep.image(w1).as_ref() == Some(left)
                    && rep.image(w2).as_ref() == Some(right)
            }
        }
    }

    /// Decides `w1 = w2` with a certificate, or reports `Unknown`.
    pub fn equal(&self, w1: &Word, w2: &Word, budget: Budget) -> EqualityVerdict {
        if let Some(cert) = self.certificate(w1, w2) {
            assert!(self.check_certificate(w1, w2, &cert), "certificate failed re-evaluation");
            return EqualityVerdict::Unequal(cert);
        }
        let r1 = self.reduce(w1, budget);
        let r2 = self.reduce(w2, budget);
        if r1.word != r2.word {
            return EqualityVerdict::Unknown;
        }
        let mut trace = r1.trace;
        trace.extend(r2.trace.reversed());
        let end = trace.replay(&self.graph, w1).expect("equality trace must replay");
        assert_eq!(end, *w2, "equality trace must end at the right-hand word");
        EqualityVerdict::Equal(trace)
    }

    /// Decides membership of `w` in the standard parabolic `A_{s,t}`.
    pub fn pair_membership(&self, w: &Word, s: usize, t: usize, budget: Budget) -> Membership {
        let gens = [s.min(t), s.max(t)];
        let red = self.reduce(w, budget);
        if red.word.uses_only(&gens) {
            assert_eq!(red.trace.replay(&self.graph, w).as_ref(), Ok(&red.word), "membership trace must replay");
            return Membership::In { witness: red.word, trace: red.trace };
        }
        let ab = w.abelianization(&self.graph);
        let allowed = [self.components[gens[0]], self.components[gens[1]]];
        for (component, &value) in ab.iter().enumerate() {
            if value != 0 && !allowed.contains(&component) {
                return Membership::NotIn(MembershipCertificate::Abelianization { component, value });
            }
        }
        if let Some(img) = self.coxeter.image(w) {
            if let Some(group) = self.coxeter.finite_subgroup(&gens, 64 * 64) {
                if !group.contains(&img) {
                    return Membership::NotIn(MembershipCertificate::Coxeter);
                }
            }
        }
        if let Some(img) = self.deformed.image(w) {
            if !img.fixes_complement_rows(&gens) {
                return Membership::NotIn(MembershipCertificate::DeformedRows);
            }
        }
        self.edge_support_membership(w, &red, &gens, budget)
    }

    /// Membership of `w` in `A_S` when a reduct `u` of `w` is supported on
    /// an edge `Y`: since `A_Y ∩ A_S = A_{Y∩S}`, this is a word problem in
    /// the dihedral group `A_Y`.
    fn edge_support_membership(&self, w: &Word, red: &Reduction, gens: &[usize], budget: Budget) -> Membership {
        let used = red.word.generators_used();
        let (y0, y1) = match used[..] {
            [u] => match (0..self.graph.rank()).find(|&v| v != u && self.graph.label(u, v).is_some()) {
                Some(v) => (u.min(v), u.max(v)),
                None => return Membership::Unknown,
            },
            [u, v] => (u, v),
            _ => return Membership::Unknown,
        };
        let Some(m) = self.graph.label(y0, y1) else { return Membership::Unknown };
        let common: Vec<usize> = [y0, y1].into_iter().filter(|g| gens.contains(g)).collect();
        let target = match common[..] {
            [] => Word::empty(),
            [s] => Word::power(s, w.height()),
            _ => return Membership::Unknown,
        };
        if !dihedral_equal(m, y0, y1, &red.word, &target) {
            return Membership::NotIn(MembershipCertificate::EdgeSupport { support: (y0, y1) });
        }
        match self.equal(w, &target, budget) {
            EqualityVerdict::Equal(trace) => Membership::In { witness: target, trace },
            _ => Membership::Unknown,
        }
    }

    /// Membership in the standard parabolic on `gens` (at most two).
    pub fn membership(&self, w: &Word, gens: &[usize], budget: Budget) -> Membership {
        match *gens {
            [] => match self.equal(w, &Word::empty(), budget) {
                EqualityVerdict::Equal(trace) => Membership::In { witness: Word::empty(), trace },
                EqualityVerdict::Unequal(_) => Membership::NotIn(MembershipCertificate::Coxeter),
                EqualityVerdict::Unknown => {
                    let red = self.reduce(w, budget);
                    self.edge_support_membership(w, &red, &[], budget)
                }
            },
            [s] => self.cyclic_membership(w, s, budget),
            [s, t] => self.pair_membership(w, s, t, budget),
            _ => Membership::Unknown,
        }
    }

    /// Re-evaluates a non-membership certificate from scratch.
    pub fn check_membership_certificate(
        &self,
        w: &Word,
        gens: &[usize],
        cert: &MembershipCertificate,
        budget: Budget,
    ) -> bool {
        matches!(self.membership(w, gens, budget), Membership::NotIn(c) if c == *cert)
    }

    /// Decides membership of `w` in the cyclic subgroup `⟨s⟩`.
    pub fn cyclic_membership(&self, w: &Word, s: usize, budget: Budget) -> Membership {
        let power = Word::power(s, w.height());
        match self.equal(w, &power, budget) {
            EqualityVerdict::Equal(trace) => Membership::In { witness: power, trace },
            EqualityVerdict::Unequal(Certificate::Deformed { .. }) => {
                Membership::NotIn(MembershipCertificate::DeformedCyclic)
            }
            EqualityVerdict::Unequal(Certificate::Coxeter { .. }) => {
                Membership::NotIn(MembershipCertificate::Coxeter)
            }
            EqualityVerdict::Unequal(Certificate::Abelianization { left, right }) => {
                let component = (0..left.len()).find(|&i| left[i] != right[i]).unwrap_or(0);
                Membership::NotIn(MembershipCertificate::Abelianization {
                    component,
                    value: left[component],
                })
            }
            // Heights agree by construction.
            EqualityVerdict::Unequal(Certificate::Height { .. }) => unreachable!(),
            EqualityVerdict::Unknown => {
                let red = self.reduce(w, budget);
                self.edge_support_membership(w, &red, &[s], budget)
            }
        }
    }
}

/// One-shot equality oracle.
pub fn equal_oracle(graph: &PresentationGraph, w1: &Word, w2: &Word, budget: Budget) -> EqualityVerdict {
    Reducer::new(graph).equal(w1, w2, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("generators {0} and {1} are not joined by an edge")]
pub struct NotAnEdge(pub usize, pub usize);

/// One-shot membership oracle for the standard parabolic `A_{s,t}`.
pub fn parabolic_membership_oracle(
    graph: &PresentationGraph,
    w: &Word,
    s: usize,
    t: usize,
    budget: Budget,
) -> Result<Membership, NotAnEdge> {
    if s == t || graph.label(s, t).is_none() {
        return Err(NotAnEdge(s, t));
    }
    Ok(Reducer::new(graph).pair_membership(w, s, t, budget))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn equal_examples() {
        let g = g333();
        let b = Budget::default();
        assert!(equal_oracle(&g, &w(&g, "a b a b"), &w(&g, "a b a b"), b).is_equal());
        match equal_oracle(&g, &w(&g, "a b"), &w(&g, "b a"), b) {
            EqualityVerdict::Unequal(c) => assert_eq!(c.name(), "coxeter"),
            other => panic!("{other:?}"),
        }
        let tiny = Budget { max_len: 3, max_states: 1 };
        assert!(!equal_oracle(&g, &w(&g, "a b c"), &w(&g, "c b a"), tiny).is_equal());
    }

    #[test]
    fn braid_moves_are_found() {
        let g = g345();
        let r = Reducer::new(&g);
        let b = Budget::default();
        for (x, y) in [
            ("a b a", "b a b"),
            ("a c a c", "c a c a"),
            ("b c b c b", "c b c b c"),
            ("a b a^-1", "b^-1 a b"),
            ("c a b a c^-1", "c b a b c^-1"),
            ("a b a b^-1 a^-1 b^-1", "1"),
        ] {
            let verdict = r.equal(&w(&g, x), &w(&g, y), b);
            let EqualityVerdict::Equal(trace) = verdict else { panic!("{x} = {y}: {verdict:?}") };
            assert_eq!(trace.replay(&g, &w(&g, x)).unwrap(), w(&g, y));
        }
    }

    #[test]
    fn deformation_separates_pure_braids() {
        let g = g333();
        match equal_oracle(&g, &w(&g, "a a b^-1 b^-1"), &Word::empty(), Budget::default()) {
            EqualityVerdict::Unequal(c) => assert_eq!(c.name(), "deformed"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn corrupted_traces_are_rejected() {
        let g = g333();
        let r = Reducer::new(&g);
        let EqualityVerdict::Equal(mut trace) = r.equal(&w(&g, "a b a"), &w(&g, "b a b"), Budget::default())
        else {
            panic!()
        };
        trace.0[0].inserted = w(&g, "b a a");
        assert!(trace.replay(&g, &w(&g, "a b a")).is_err());
    }

    #[test]
    fn membership_examples() {
        let g = g333();
        let b = Budget::default();
        assert!(matches!(
            parabolic_membership_oracle(&g, &w(&g, "a b a b^-1"), 0, 1, b).unwrap(),
            Membership::In { .. }
        ));
        assert!(matches!(
            parabolic_membership_oracle(&g, &w(&g, "c"), 0, 1, b).unwrap(),
            Membership::NotIn(_)
        ));
        assert!(!matches!(
            parabolic_membership_oracle(&g, &w(&g, "c a c^-1"), 0, 1, b).unwrap(),
            Membership::In { .. }
        ));
        let path = PresentationGraph::parse("edge a b 3\nedge b c 3").unwrap();
        assert!(parabolic_membership_oracle(&path, &Word::empty(), 0, 2, b).is_err());
    }

    #[test]
    fn cyclic_membership() {
        let g = g333();
        let r = Reducer::new(&g);
        let b = Budget::default();
        assert!(matches!(r.cyclic_membership(&w(&g, "b a a b^-1"), 0, b), Membership::NotIn(_)));
        assert!(matches!(r.cyclic_membership(&w(&g, "b a b^-1 a b a^-1 b^-1"), 0, b), Membership::NotIn(_)));
        // bab = aba, so bab·a⁻¹b⁻¹ = a
        assert!(matches!(r.cyclic_membership(&w(&g, "b a b a^-1 b^-1"), 0, b), Membership::In { .. }));
    }
}
