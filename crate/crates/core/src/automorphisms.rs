//! Automorphisms of `A_Γ` generated by conjugations, labelled graph
//! automorphisms and the global inversion; their action on a ball of the
//! Deligne complex and their decomposition `φ = φ_g ∘ ψ ∘ ι^ε`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::deligne::ComplexBall;
use crate::presentation::{LabeledGraphMap, PresentationGraph};
use crate::words::{Budget, EqualityVerdict, Reducer, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomorphismError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no image given for generator {0}")]
    MissingGenerator(String),
    #[error("generator images have mixed heights {0:?}")]
    MixedHeight(Vec<i64>),
    #[error("map does not preserve labels")]
    NotLabelPreserving,
    #[error("image of {0} could not be located in the ball")]
    UnresolvedImage(String),
    #[error("decomposition does not reproduce the automorphism on generator {0}")]
    VerificationFailed(String),
    #[error("graph is outside the supported class")]
    OutOfScope,
}

/// How a spec was built; composition concatenates the chains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Inner(String),
    Graph(Vec<usize>),
    Inversion,
}

/// Images of the standard generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSpec {
    pub images: Vec<Word>,
    pub provenance: Vec<Provenance>,
}

impl AutomorphismSpec {
    pub fn identity(graph: &PresentationGraph) -> Self {
        Self { images: (0..graph.rank()).map(Word::gen).collect(), provenance: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Parses lines `gen a -> b a b^-1`.
    pub fn parse(graph: &PresentationGraph, text: &str) -> Result<Self, AutomorphismError> {
        let mut images: Vec<Option<Word>> = vec![None; graph.rank()];
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let err = |msg: String| AutomorphismError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let rest = content.strip_prefix("gen ").ok_or_else(|| err("expected `gen x -> word`".into()))?;
            let (name, word) = rest.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
            let name = name.trim();
            let g = graph.index_of(name).ok_or_else(|| err(format!("unknown generator {name}")))?;
            if images[g].is_some() {
                return Err(err(format!("duplicate generator {name}")));
            }
            let w = Word::parse(graph, word.trim()).map_err(|e| err(e.to_string()))?;
            images[g] = Some(w.free_reduce());
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| AutomorphismError::MissingGenerator(graph.name(i).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { images, provenance: Vec::new() })
    }

    pub fn to_text(&self, graph: &PresentationGraph) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("gen {} -> {}\n", graph.name(i), w.display(graph)))
            .collect()
    }

    pub fn heights(&self) -> Vec<i64> {
        self.images.iter().map(Word::height).collect()
    }

    pub fn display<'a>(&'a self, graph: &'a PresentationGraph) -> impl fmt::Display + 'a {
        struct D<'a>(&'a AutomorphismSpec, &'a PresentationGraph);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self
                    .0
                    .images
                    .iter()
                    .enumerate()
                    .map(|(i, w)| format!("{} -> {}", self.1.name(i), w.display(self.1)))
                    .collect();
                f.write_str(&parts.join(", "))
            }
        }
        D(self, graph)
    }
}

/// `h ↦ g h g⁻¹`.
pub fn make_inner(graph: &PresentationGraph, g: &Word) -> AutomorphismSpec {
    let gi = g.inverse();
    AutomorphismSpec {
        images: (0..graph.rank()).map(|s| g.concat(&Word::gen(s)).concat(&gi).free_reduce()).collect(),
        provenance: vec![Provenance::Inner(g.display(graph))],
    }
}

pub fn make_graph(graph: &PresentationGraph, phi: &LabeledGraphMap) -> Result<AutomorphismSpec, AutomorphismError> {
    if !phi.preserves_labels(graph, graph) {
        return Err(AutomorphismError::NotLabelPreserving);
    }
    Ok(AutomorphismSpec {
        images: (0..graph.rank()).map(|s| Word::gen(phi.apply(s))).collect(),
        provenance: vec![Provenance::Graph(phi.images.clone())],
    })
}

pub fn global_inversion(graph: &PresentationGraph) -> AutomorphismSpec {
    AutomorphismSpec {
        images: (0..graph.rank()).map(|s| Word::gen(s).inverse()).collect(),
        provenance: vec![Provenance::Inversion],
    }
}

/// Letterwise substitution, freely reduced.
pub fn apply(f: &AutomorphismSpec, w: &Word) -> Word {
    w.substitute(&f.images)
}

/// `f ∘ g`: apply `g` first.
pub fn compose(f: &AutomorphismSpec, g: &AutomorphismSpec) -> AutomorphismSpec {
    AutomorphismSpec {
        images: g.images.iter().map(|w| apply(f, w)).collect(),
        provenance: f.provenance.iter().chain(&g.provenance).cloned().collect(),
    }
}

pub fn is_height_preserving(spec: &AutomorphismSpec) -> bool {
    spec.images.iter().all(|w| w.height() == 1)
}

/// Returns `(spec ∘ ι^ε, ε)` with the first component height-preserving.
pub fn normalize(spec: &AutomorphismSpec, graph: &PresentationGraph) -> Result<(AutomorphismSpec, u8), AutomorphismError> {
    let h = spec.heights();
    if h.iter().all(|&x| x == 1) {
        Ok((spec.clone(), 0))
    } else if h.iter().all(|&x| x == -1) {
        Ok((compose(spec, &global_inversion(graph)), 1))
    } else {
        Err(AutomorphismError::MixedHeight(h))
    }
}

/// Each defining relation is sent to a relation.
#[derive(Debug, Clone, Default, Serialize)]
pub struct HomomorphismCheck {
    pub relations: usize,
    pub equal: usize,
    pub unequal: usize,
    pub unknown: usize,
}

impl HomomorphismCheck {
    pub fn holds(&self) -> bool {
        self.equal == self.relations
    }
}

pub fn check_homomorphism(reducer: &Reducer, spec: &AutomorphismSpec, budget: Budget) -> HomomorphismCheck {
    let graph = reducer.graph();
    let mut r = HomomorphismCheck::default();
    for (s, t, m) in graph.edges() {
        let left = apply(spec, &Word::alternating(s, t, m as usize));
        let right = apply(spec, &Word::alternating(t, s, m as usize));
        r.relations += 1;
        match reducer.equal(&left, &right, budget) {
            EqualityVerdict::Equal(_) => r.equal += 1,
            EqualityVerdict::Unequal(_) => r.unequal += 1,
            EqualityVerdict::Unknown => r.unknown += 1,
        }
    }
    r
}

/// Generator-image equality of two specs. `None` when some comparison is
/// undecided.
pub fn specs_equal(reducer: &Reducer, f: &AutomorphismSpec, g: &AutomorphismSpec, budget: Budget) -> Option<bool> {
    let mut undecided = false;
    for (a, b) in f.images.iter().zip(&g.images) {
        match reducer.equal(a, b, budget) {
            EqualityVerdict::Equal(_) => {}
            EqualityVerdict::Unequal(_) => return Some(false),
            EqualityVerdict::Unknown => undecided = true,
        }
    }
    (!undecided).then_some(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexImage {
    Mapped(usize),
    /// The image lies outside the ball.
    Outside,
    /// Some identification needed for the image was undecided.
    Unresolved,
}

impl VertexImage {
    pub fn mapped(self) -> Option<usize> {
        match self {
            VertexImage::Mapped(v) => Some(v),
            _ => None,
        }
    }
}

/// Partial vertex map induced by an automorphism.
#[derive(Debug, Clone, Default)]
pub struct BallAction {
    pub images: HashMap<usize, VertexImage>,
}

impl BallAction {
    pub fn get(&self, v: usize) -> Option<usize> {
        self.images.get(&v).and_then(|i| i.mapped())
    }

    pub fn resolved(&self) -> usize {
        self.images.values().filter(|i| i.mapped().is_some()).count()
    }

    pub fn unresolved(&self) -> usize {
        self.images.values().filter(|i| **i == VertexImage::Unresolved).count()
    }
}

struct Actor<'a> {
    spec: &'a AutomorphismSpec,
    ball: &'a ComplexBall,
    type2: Vec<usize>,
    cache: HashMap<usize, VertexImage>,
}

impl Actor<'_> {
    fn conj(&self, rep: &Word, s: usize) -> Word {
        apply(self.spec, &rep.concat(&Word::gen(s)).concat(&rep.inverse()).free_reduce())
    }

    /// The unique type 2 vertex fixed by `φ(G_v)`.
    fn type2(&mut self, v: usize) -> VertexImage {
        if let Some(&i) = self.cache.get(&v) {
            return i;
        }
        let h = self.ball.vertex(v).handle.clone();
        let zs: Vec<Word> = h.gens.iter().map(|&s| self.conj(&h.rep, s)).collect();
        let mut found = Vec::new();
        let mut unknown = false;
        for &u in &self.type2 {
            let mut all = Some(true);
            for z in &zs {
                match self.ball.is_fixed_by(u, z) {
                    Some(true) => {}
                    Some(false) => {
                        all = Some(false);
                        break;
                    }
                    None => all = None,
                }
            }
            match all {
                Some(true) => found.push(u),
                Some(false) => {}
                None => unknown = true,
            }
        }
        let image = match (found.as_slice(), unknown) {
            ([u], false) => VertexImage::Mapped(*u),
            ([], false) => VertexImage::Outside,
            _ => VertexImage::Unresolved,
        };
        self.cache.insert(v, image);
        image
    }

    /// Common neighbour of a given type of the images of `around`.
    fn common(&mut self, around: &[usize], kind: usize) -> VertexImage {
        let mut images = Vec::new();
        for &w in around {
            let i = if self.ball.kind(w) == 2 { self.type2(w) } else { self.type1(w) };
            match i {
                VertexImage::Mapped(u) => images.push(u),
                other => return other,
            }
        }
        let Some(&first) = images.first() else { return VertexImage::Outside };
        let common: BTreeSet<usize> = self
            .ball
            .neighbours(first)
            .iter()
            .copied()
            .filter(|&c| self.ball.kind(c) == kind && images.iter().all(|&u| self.ball.has_edge(u, c)))
            .collect();
        match common.len() {
            1 => VertexImage::Mapped(*common.iter().next().unwrap()),
            0 => VertexImage::Outside,
            _ => VertexImage::Unresolved,
        }
    }

    /// Type 1 vertices are determined by their type 2 neighbours.
    fn type1(&mut self, x: usize) -> VertexImage {
        if let Some(&i) = self.cache.get(&x) {
            return i;
        }
        let members: Vec<usize> = self.ball.essential_neighbours(x).collect();
        let image = if members.len() < 2 { VertexImage::Outside } else { self.common(&members, 1) };
        self.cache.insert(x, image);
        image
    }

    /// Type 0 vertices are apexes of their links.
    fn type0(&mut self, g: usize) -> VertexImage {
        if let Some(&i) = self.cache.get(&g) {
            return i;
        }
        let link: Vec<usize> = self.ball.neighbours(g).iter().copied().collect();
        let image = self.common(&link, 0);
        self.cache.insert(g, image);
        image
    }
}

/// Images of `domain` under `spec`. Type 2 images are located by their
/// stabilizers, type 1 images as common neighbours of the images of their
/// type 2 neighbours, and type 0 images as apexes of their image links.
pub fn act_on_ball(spec: &AutomorphismSpec, ball: &ComplexBall, domain: &[usize]) -> BallAction {
    let type2 = (0..ball.vertex_count()).filter(|&v| ball.kind(v) == 2).collect();
    let mut actor = Actor { spec, ball, type2, cache: HashMap::new() };
    let mut action = BallAction::default();
    for &v in domain {
        let image = match ball.kind(v) {
            0 => actor.type0(v),
            1 => actor.type1(v),
            _ => actor.type2(v),
        };
        action.images.insert(v, image);
    }
    action
}

/// The vertices of the fundamental domain `K_Γ`.
pub fn fundamental_domain(ball: &ComplexBall) -> Vec<usize> {
    let mut k = vec![ball.center()];
    k.extend(ball.neighbours(ball.center()).iter().copied());
    k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub inner: Word,
    pub graph_map: LabeledGraphMap,
    pub epsilon: u8,
}

impl Decomposition {
    pub fn recompose(&self, graph: &PresentationGraph) -> AutomorphismSpec {
        let psi = make_graph(graph, &self.graph_map).expect("label-preserving by construction");
        let mut f = compose(&make_inner(graph, &self.inner), &psi);
        if self.epsilon == 1 {
            f = compose(&f, &global_inversion(graph));
        }
        f
    }
}

/// `spec = φ_g ∘ ψ ∘ ι^ε`: `ε` from the heights, `g` from the image of the
/// vertex `{1}`, `ψ` from the images of the type 1 vertices of `K_Γ`.
pub fn decompose(spec: &AutomorphismSpec, ball: &ComplexBall, budget: Budget) -> Result<Decomposition, AutomorphismError> {
    let graph = ball.graph();
    let (normal, epsilon) = normalize(spec, graph)?;
    let k = fundamental_domain(ball);
    let action = act_on_ball(&normal, ball, &k);
    let apex = action
        .get(ball.center())
        .ok_or_else(|| AutomorphismError::UnresolvedImage("{1}".into()))?;
    let inner = ball.vertex(apex).handle.rep.clone();
    let mut images = vec![0; graph.rank()];
    for s in 0..graph.rank() {
        let x = k
            .iter()
            .copied()
            .find(|&v| ball.kind(v) == 1 && ball.vertex(v).handle.gens == [s])
            .expect("K contains every type 1 vertex");
        let y = action.get(x).ok_or_else(|| AutomorphismError::UnresolvedImage(graph.name(s).to_string()))?;
        images[s] = ball.vertex(y).handle.gens[0];
    }
    let graph_map = LabeledGraphMap::from_images(images);
    if !graph_map.preserves_labels(graph, graph) {
        return Err(AutomorphismError::NotLabelPreserving);
    }
    let d = Decomposition { inner, graph_map, epsilon };
    let back = d.recompose(graph);
    for (s, (a, b)) in spec.images.iter().zip(&back.images).enumerate() {
        if !ball.reducer().equal(a, b, budget).is_equal() {
            return Err(AutomorphismError::VerificationFailed(graph.name(s).to_string()));
        }
    }
    Ok(d)
}

/// `Out(A_Γ) ≅ Aut(Γ) × Z/2`, as pairs `(ψ, ε)` with componentwise product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutGroupTable {
    pub elements: Vec<(LabeledGraphMap, u8)>,
    /// `table[i][j]` is the index of `elements[i] · elements[j]`.
    pub table: Vec<Vec<usize>>,
}

impl OutGroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.elements.iter().position(|(p, e)| p.is_identity() && *e == 0).expect("identity present")
    }

    /// Closure, identity, inverses and associativity.
    pub fn is_group(&self) -> bool {
        let n = self.order();
        let e = self.identity();
        let closed = self.table.iter().all(|row| row.len() == n && row.iter().all(|&x| x < n));
        let unit = (0..n).all(|i| self.table[e][i] == i && self.table[i][e] == i);
        let inverses = (0..n).all(|i| (0..n).any(|j| self.table[i][j] == e && self.table[j][i] == e));
        let assoc =
            (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.table[self.table[i][j]][k] == self.table[i][self.table[j][k]])));
        closed && unit && inverses && assoc
    }

    pub fn to_json(&self, graph: &PresentationGraph) -> serde_json::Value {
        let elements: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|(p, e)| serde_json::json!({ "graph_map": p.display(graph, graph), "inversion": e }))
            .collect();
        serde_json::json!({ "order": self.order(), "elements": elements, "table": self.table })
    }
}

pub fn out_group(graph: &PresentationGraph) -> Result<OutGroupTable, AutomorphismError> {
    if !graph.validate_class().in_scope {
        return Err(AutomorphismError::OutOfScope);
    }
    let mut auts = graph.graph_automorphisms();
    auts.sort();
    let elements: Vec<(LabeledGraphMap, u8)> =
        auts.iter().flat_map(|p| [(p.clone(), 0), (p.clone(), 1)]).collect();
    let index: HashMap<&(LabeledGraphMap, u8), usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let table = elements
        .iter()
        .map(|(p, e)| {
            elements
                .iter()
                .map(|(q, f)| index[&(p.compose(q), (e + f) % 2)])
                .collect()
        })
        .collect();
    Ok(OutGroupTable { elements, table })
}

/// Composite of `len` random generators: inner automorphisms by a single
/// letter, graph automorphisms and the inversion.
pub fn random_spec<R: Rng>(rng: &mut R, graph: &PresentationGraph, len: usize) -> AutomorphismSpec {
    let auts = graph.graph_automorphisms();
    let mut f = AutomorphismSpec::identity(graph);
    for _ in 0..len {
        let g = match rng.gen_range(0..3) {
            0 => {
                let s = rng.gen_range(0..graph.rank());
                let w = if rng.gen_bool(0.5) { Word::gen(s) } else { Word::gen(s).inverse() };
                make_inner(graph, &w)
            }
            1 => make_graph(graph, auts.choose(rng).expect("identity is an automorphism")).expect("enumerated"),
            _ => global_inversion(graph),
        };
        f = compose(&f, &g);
    }
    f
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StructureReport {
    pub sample: usize,
    pub homomorphisms: usize,
    pub decomposed: usize,
    pub round_trips: usize,
    pub mixed_height: usize,
    pub conjugation_relations: usize,
    pub inversion_relations: usize,
    pub multiplicative_pairs: usize,
    pub undecided: usize,
    pub violations: Vec<String>,
}

/// Decomposition round trips and the semidirect product relations on a
/// sample of specs.
pub fn verify_automorphism_structure(
    ball: &ComplexBall,
    specs: &[AutomorphismSpec],
    budget: Budget,
) -> StructureReport {
    let graph = ball.graph();
    let reducer = ball.reducer();
    let iota = global_inversion(graph);
    let mut r = StructureReport { sample: specs.len(), ..Default::default() };
    let check = |r: &mut StructureReport, verdict: Option<bool>, what: String| match verdict {
        Some(true) => true,
        Some(false) => {
            r.violations.push(what);
            false
        }
        None => {
            r.undecided += 1;
            false
        }
    };
    let mut decomposed = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        if check_homomorphism(reducer, spec, budget).holds() {
            r.homomorphisms += 1;
        } else {
            r.violations.push(format!("spec {i} does not respect the relations"));
        }
        match decompose(spec, ball, budget) {
            Ok(d) => {
                r.decomposed += 1;
                let back = d.recompose(graph);
                if check(&mut r, specs_equal(reducer, spec, &back, budget), format!("spec {i} does not round-trip")) {
                    r.round_trips += 1;
                }
                decomposed.push(d);
            }
            Err(AutomorphismError::MixedHeight(h)) => {
                r.mixed_height += 1;
                r.violations.push(format!("spec {i} has mixed heights {h:?}"));
            }
            Err(e) => r.violations.push(format!("spec {i}: {e}")),
        }
    }
    for (i, d) in decomposed.iter().enumerate() {
        let g = &d.inner;
        let inner = make_inner(graph, g);
        let psi = make_graph(graph, &d.graph_map).expect("label-preserving");
        let psi_inv = make_graph(graph, &d.graph_map.inverse()).expect("label-preserving");
        // ψ ∘ φ_g ∘ ψ⁻¹ = φ_{ψ(g)}
        let lhs = compose(&compose(&psi, &inner), &psi_inv);
        let rhs = make_inner(graph, &apply(&psi, g));
        if check(&mut r, specs_equal(reducer, &lhs, &rhs, budget), format!("conjugation relation fails for sample {i}")) {
            r.conjugation_relations += 1;
        }
        // ι ∘ ψ = ψ ∘ ι and ι ∘ φ_g ∘ ι = φ_{ι(g)}
        let commute = specs_equal(reducer, &compose(&iota, &psi), &compose(&psi, &iota), budget);
        let lhs = compose(&compose(&iota, &inner), &iota);
        let rhs = make_inner(graph, &apply(&iota, g));
        let both = match (commute, specs_equal(reducer, &lhs, &rhs, budget)) {
            (Some(a), Some(b)) => Some(a && b),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        };
        if check(&mut r, both, format!("inversion relation fails for sample {i}")) {
            r.inversion_relations += 1;
        }
    }
    // (ψ, ε) is multiplicative on graph-induced parts
    let out = out_group(graph).ok();
    for w in decomposed.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let part = |d: &Decomposition| {
            let mut f = make_graph(graph, &d.graph_map).expect("label-preserving");
            if d.epsilon == 1 {
                f = compose(&f, &iota);
            }
            f
        };
        let product = compose(&part(a), &part(b));
        let expected = (a.graph_map.compose(&b.graph_map), (a.epsilon + b.epsilon) % 2);
        match decompose(&product, ball, budget) {
            Ok(d) => {
                let trivial_inner = d.inner.is_empty();
                let in_table = out.as_ref().is_some_and(|t| t.elements.contains(&expected));
                if trivial_inner && (d.graph_map.clone(), d.epsilon) == expected && in_table {
                    r.multiplicative_pairs += 1;
                } else {
                    r.violations.push("graph-induced parts are not multiplicative".into());
                }
            }
            Err(e) => r.violations.push(format!("product of graph-induced parts: {e}")),
        }
    }
    r
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CentreCheck {
    pub words: usize,
    /// Non-trivial words commuting with every generator, or undecided.
    pub candidates: Vec<String>,
}

/// No freely reduced word of length `1..=max_len` is certified central.
pub fn centre_sanity(reducer: &Reducer, max_len: usize, budget: Budget) -> CentreCheck {
    let graph = reducer.graph();
    let n = graph.rank();
    let letters: Vec<Word> = (0..n).flat_map(|s| [Word::gen(s), Word::gen(s).inverse()]).collect();
    let mut frontier = vec![Word::empty()];
    let mut r = CentreCheck::default();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let x = w.concat(l);
                if x.is_freely_reduced() {
                    next.push(x);
                }
            }
        }
        for w in &next {
            r.words += 1;
            let separated = (0..n).any(|s| {
                let g = Word::gen(s);
                reducer.equal(&w.concat(&g), &g.concat(w), budget).is_unequal()
            });
            if !separated && !reducer.equal(w, &Word::empty(), budget).is_equal() {
                r.candidates.push(w.display(graph));
            }
        }
        frontier = next;
    }
    r
}
