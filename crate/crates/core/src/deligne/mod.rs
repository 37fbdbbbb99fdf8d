//! Finite balls of the Deligne complex `X_Γ`.
//!
//! A ball of radius `R ≥ 1` is the union of the chambers `gK_Γ` over all
//! elements `g` of word length `< R`; the ball of radius 0 is the single
//! vertex `{1}`. The depth of a vertex is one more than the length of the
//! shortest element whose chamber contains it, so radius 1 is `K_Γ` itself.
//!
//! Vertices are cosets `gA_S` with `|S| ≤ 2`. Two chambers share a vertex
//! only when the equality of cosets is certified by the membership oracles.
//! Cosets are bucketed by an exact invariant first: for `c ∉ S` the row `c`
//! of the deformed image of `g⁻¹` only depends on `gA_S`.

mod geometry;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::presentation::{ClassReport, PresentationGraph};
use crate::words::{
    Budget, EqualityVerdict, LinearImage, Membership, Reducer, Word, DEFORMATION,
};

pub use geometry::{moussong_geometry, LabelOutOfClass, MoussongTriangle, TrigValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BallError {
    #[error("graph is outside the large-type free-of-infinity rank ≥ 3 class")]
    OutOfScope(ClassReport),
    #[error("vertex {0} is on the boundary of the ball")]
    OnBoundary(usize),
    #[error("vertex {0} is not in the essential 1-skeleton")]
    NotEssential(usize),
    #[error("the fixed set of a type 0 subgroup is the whole complex")]
    TypeZero,
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),
}

/// The coset `rep · A_gens`, which is also the name of the parabolic
/// subgroup `rep · A_gens · rep⁻¹` stabilizing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicHandle {
    pub rep: Word,
    /// Sorted generator indices.
    pub gens: Vec<usize>,
}

impl ParabolicHandle {
    pub fn new(rep: Word, mut gens: Vec<usize>) -> Self {
        gens.sort_unstable();
        gens.dedup();
        assert!(gens.len() <= 2, "spherical parabolics have type at most 2");
        Self { rep, gens }
    }

    pub fn kind(&self) -> usize {
        self.gens.len()
    }

    pub fn display(&self, graph: &PresentationGraph) -> String {
        let gens: Vec<&str> = self.gens.iter().map(|&g| graph.name(g)).collect();
        format!("({}, {{{}}})", self.rep.display(graph), gens.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct BallVertex {
    pub handle: ParabolicHandle,
    pub depth: usize,
}

impl BallVertex {
    pub fn kind(&self) -> usize {
        self.handle.kind()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BallConfig {
    pub radius: usize,
    /// Distance kept between the safe region and the boundary.
    pub margin: usize,
    pub budget: Budget,
    /// Cap on the number of group elements; a layer that would exceed it is
    /// dropped and the radius lowered.
    pub max_elements: usize,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self { radius: 4, margin: 2, budget: Budget::default(), max_elements: 50_000 }
    }
}

/// Vertices of one chamber `gK_Γ`.
#[derive(Debug, Clone)]
pub struct Chamber {
    pub element: usize,
    pub vertex0: usize,
    /// Indexed by generator.
    pub vertex1: Vec<usize>,
    /// Keyed by `(s, t)` with `s < t`.
    pub vertex2: Vec<((usize, usize), usize)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub elements: usize,
    /// Identifications confirmed by an oracle trace.
    pub certified_identifications: usize,
    /// Candidate pairs with equal invariants shown distinct by a certificate.
    pub certified_distinct: usize,
    /// Candidate pairs the oracle could not decide; kept apart.
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CosetKey {
    gens: Vec<usize>,
    scale: u32,
    rows: Vec<Vec<i128>>,
}

fn coset_key(inverse_image: &LinearImage, gens: &[usize]) -> CosetKey {
    let n = inverse_image.dim;
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for r in (0..n).filter(|r| !gens.contains(r)) {
        let mut row = Vec::new();
        for c in 0..n {
            row.extend_from_slice(&inverse_image.entries[r * n + c].0);
        }
        rows.push(row);
    }
    let mut scale = inverse_image.scale;
    while scale > 0 && rows.iter().flatten().all(|x| x % DEFORMATION == 0) {
        for x in rows.iter_mut().flatten() {
            *x /= DEFORMATION;
        }
        scale -= 1;
    }
    CosetKey { gens: gens.to_vec(), scale, rows }
}

/// Result of looking a coset up in the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Found(usize),
    /// Certified: no vertex of the ball is this coset.
    Absent,
    /// Some candidate could be neither confirmed nor excluded.
    Unknown,
}

impl Lookup {
    pub fn found(self) -> Option<usize> {
        match self {
            Lookup::Found(id) => Some(id),
            _ => None,
        }
    }
}

/// Distance in the essential 1-skeleton of the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BallDistance {
    pub distance: Option<usize>,
    /// False when a shorter path through vertices outside the ball is not
    /// excluded.
    pub exact: bool,
}

/// Why two type 2 vertices are not at distance 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistanceCertificate {
    /// Distinct cosets of the same `A_st`.
    SameGenerators,
    /// The generating pairs share no generator.
    DisjointGenerators,
    /// `g⁻¹h` maps outside `W_S · W_T` in the Coxeter group.
    CoxeterDoubleCoset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceTwo {
    Yes { via: usize },
    No(DistanceCertificate),
    Unknown,
}

/// A set of vertices with every simplex of the ball spanned by them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subcomplex {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
}

/// Vertices of the ball fixed by a parabolic subgroup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixedSet {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Vertices for which the oracle could not decide.
    pub unresolved: Vec<usize>,
}

impl FixedSet {
    pub fn is_connected(&self) -> bool {
        connected(&self.vertices, &self.edges)
    }

    pub fn is_acyclic(&self) -> bool {
        let components = components(&self.vertices, &self.edges);
        self.edges.len() + components == self.vertices.len()
    }
}

fn components(vertices: &[usize], edges: &[(usize, usize)]) -> usize {
    let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = vertices.len();
    for &(u, v) in edges {
        let (a, b) = (root(&mut parent, index[&u]), root(&mut parent, index[&v]));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

fn connected(vertices: &[usize], edges: &[(usize, usize)]) -> bool {
    vertices.is_empty() || components(vertices, edges) == 1
}

#[derive(Debug, Serialize)]
struct JsonVertex {
    id: usize,
    #[serde(rename = "type")]
    kind: usize,
    rep: String,
    gens: Vec<String>,
    depth: usize,
}

#[derive(Debug, Serialize)]
struct JsonBall {
    vertices: Vec<JsonVertex>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    center: usize,
    radius: usize,
    safe_radius: usize,
    stats: BuildStats,
    log: Vec<String>,
}

#[derive(Debug)]
pub struct ComplexBall {
    reducer: Reducer,
    config: BallConfig,
    radius: usize,
    safe_radius: usize,
    elements: Vec<Word>,
    vertices: Vec<BallVertex>,
    vertex_keys: Vec<CosetKey>,
    keys: HashMap<CosetKey, Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
    triangles: BTreeSet<[usize; 3]>,
    adjacency: Vec<BTreeSet<usize>>,
    chambers: Vec<Chamber>,
    stats: BuildStats,
    log: Vec<String>,
    double_cosets: Mutex<HashMap<(Vec<usize>, Vec<usize>), Arc<HashSet<LinearImage>>>>,
}

struct Builder<'a> {
    ball: &'a mut ComplexBall,
    chamber_of: Vec<usize>,
    parent: Vec<Option<usize>>,
}

/// Builds the ball described by `config`.
pub fn build_ball(graph: &PresentationGraph, config: BallConfig) -> Result<ComplexBall, BallError> {
    let report = graph.validate_class();
    if !report.in_scope {
        return Err(BallError::OutOfScope(report));
    }
    let mut ball = ComplexBall {
        reducer: Reducer::new(graph),
        config,
        radius: config.radius,
        safe_radius: config.radius.saturating_sub(config.margin),
        elements: Vec::new(),
        vertices: Vec::new(),
        vertex_keys: Vec::new(),
        keys: HashMap::new(),
        edges: BTreeSet::new(),
        triangles: BTreeSet::new(),
        adjacency: Vec::new(),
        chambers: Vec::new(),
        stats: BuildStats::default(),
        log: Vec::new(),
        double_cosets: Mutex::new(HashMap::new()),
    };
    ball.elements.push(Word::empty());
    if config.radius == 0 {
        let key = ball.key_of(&Word::empty(), &[]).expect("identity image");
        ball.push_vertex(ParabolicHandle::new(Word::empty(), vec![]), 0, key);
        ball.stats.elements = 1;
        return Ok(ball);
    }
    let mut b = Builder { ball: &mut ball, chamber_of: Vec::new(), parent: vec![None] };
    b.add_chamber(0);
    let mut layer = vec![0usize];
    for len in 1..config.radius {
        match b.next_layer(&layer) {
            Some(next) => {
                for &e in &next {
                    b.add_chamber(e);
                }
                layer = next;
            }
            None => {
                let ball = &mut *b.ball;
                ball.log.push(format!(
                    "element cap {} reached at length {len}; radius lowered to {len}",
                    config.max_elements
                ));
                ball.radius = len;
                ball.safe_radius = ball.safe_radius.min(len.saturating_sub(config.margin));
                break;
            }
        }
    }
    ball.stats.elements = ball.elements.len();
    Ok(ball)
}

impl Builder<'_> {
    /// Elements of the next word length, or `None` when the cap is hit.
    fn next_layer(&mut self, layer: &[usize]) -> Option<Vec<usize>> {
        let n = self.ball.reducer.graph().rank();
        let budget = self.ball.config.budget;
        let mut by_key: HashMap<Option<CosetKey>, Vec<usize>> = HashMap::new();
        for (i, w) in self.ball.elements.iter().enumerate() {
            by_key.entry(self.ball.key_of(w, &[])).or_default().push(i);
        }
        let mut fresh: Vec<(Word, usize)> = Vec::new();
        let start = self.ball.elements.len();
        for &e in layer {
            let base = self.ball.elements[e].clone();
            for gen in 0..n {
                for inv in [false, true] {
                    let letter = crate::words::Letter { gen, inv };
                    if base.letters().last() == Some(&letter.inverse()) {
                        continue;
                    }
                    let mut w = base.clone();
                    w.0.push(letter);
                    let key = self.ball.key_of(&w, &[]);
                    let mut known = false;
                    let candidates = by_key.get(&key).cloned().unwrap_or_default();
                    for c in candidates {
                        let other = if c < start { self.ball.elements[c].clone() } else { fresh[c - start].0.clone() };
                        match self.ball.reducer.equal(&other, &w, budget) {
                            EqualityVerdict::Equal(_) => {
                                self.ball.stats.certified_identifications += 1;
                                known = true;
                                break;
                            }
                            EqualityVerdict::Unequal(_) => self.ball.stats.certified_distinct += 1,
                            EqualityVerdict::Unknown => {
                                self.ball.stats.unresolved += 1;
                                let depth = other.len().min(w.len()) + 1;
                                self.ball.note_unresolved(format!(
                                    "elements {} and {} not separated",
                                    other.display(self.ball.reducer.graph()),
                                    w.display(self.ball.reducer.graph())
                                ), depth);
                            }
                        }
                    }
                    if known {
                        continue;
                    }
                    if start + fresh.len() + 1 > self.ball.config.max_elements {
                        return None;
                    }
                    by_key.entry(key).or_default().push(start + fresh.len());
                    fresh.push((w, e));
                }
            }
        }
        let mut ids = Vec::with_capacity(fresh.len());
        for (w, parent) in fresh {
            ids.push(self.ball.elements.len());
            self.ball.elements.push(w);
            self.parent.push(Some(parent));
        }
        Some(ids)
    }

    fn add_chamber(&mut self, element: usize) {
        let g = self.ball.elements[element].clone();
        let graph = self.ball.reducer.graph().clone();
        let n = graph.rank();
        let depth = g.len() + 1;
        let last_gen = g.letters().last().map(|l| l.gen);
        let parent_chamber = self.parent[element].map(|p| self.chamber_of[p]);

        let key0 = self.ball.key_of(&g, &[]).expect("element image");
        let vertex0 = self.ball.push_vertex(ParabolicHandle::new(g.clone(), vec![]), depth, key0);

        let mut vertex1 = Vec::with_capacity(n);
        for s in 0..n {
            let id = match (last_gen, parent_chamber) {
                (Some(l), Some(pc)) if l == s => self.ball.chambers[pc].vertex1[s],
                _ => self.ball.locate_or_insert(&g, vec![s], depth),
            };
            vertex1.push(id);
        }
        let mut vertex2 = Vec::new();
        for (s, t, _) in graph.edges() {
            let id = match (last_gen, parent_chamber) {
                (Some(l), Some(pc)) if l == s || l == t => {
                    let pc = &self.ball.chambers[pc];
                    pc.vertex2.iter().find(|(k, _)| *k == (s, t)).expect("same edge set").1
                }
                _ => self.ball.locate_or_insert(&g, vec![s, t], depth),
            };
            vertex2.push(((s, t), id));
        }

        for s in 0..n {
            self.ball.add_edge(vertex0, vertex1[s]);
        }
        for &((s, t), v2) in &vertex2 {
            self.ball.add_edge(vertex0, v2);
            for x in [s, t] {
                self.ball.add_edge(vertex1[x], v2);
                self.ball.triangles.insert([vertex0, vertex1[x], v2]);
            }
        }
        self.chamber_of.push(self.ball.chambers.len());
        debug_assert_eq!(self.chamber_of.len(), element + 1);
        self.ball.chambers.push(Chamber { element, vertex0, vertex1, vertex2 });
    }
}

impl ComplexBall {
    fn key_of(&self, rep: &Word, gens: &[usize]) -> Option<CosetKey> {
        self.reducer.deformed().image(&rep.inverse()).map(|img| coset_key(&img, gens))
    }

    fn push_vertex(&mut self, handle: ParabolicHandle, depth: usize, key: CosetKey) -> usize {
        let id = self.vertices.len();
        self.keys.entry(key.clone()).or_default().push(id);
        self.vertex_keys.push(key);
        self.vertices.push(BallVertex { handle, depth });
        self.adjacency.push(BTreeSet::new());
        id
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        if self.edges.insert((u.min(v), u.max(v))) {
            self.adjacency[u].insert(v);
            self.adjacency[v].insert(u);
        }
    }

    fn note_unresolved(&mut self, what: String, depth: usize) {
        let safe = depth.saturating_sub(self.config.margin + 1);
        if safe < self.safe_radius {
            self.safe_radius = safe;
        }
        self.log.push(format!("{what}; safe radius now {}", self.safe_radius));
    }

    /// `Some(true)` when `r⁻¹w ∈ A_gens` is certified, `Some(false)` when its
    /// negation is, `None` otherwise.
    fn same_coset(&self, r: &Word, w: &Word, gens: &[usize]) -> Option<bool> {
        let z = r.inverse().concat(w).free_reduce();
        let budget = self.config.budget;
        let m = self.reducer.membership(&z, gens, budget);
        match m {
            Membership::In { .. } => Some(true),
            Membership::NotIn(_) => Some(false),
            Membership::Unknown => None,
        }
    }

    fn locate_or_insert(&mut self, g: &Word, gens: Vec<usize>, depth: usize) -> usize {
        let key = self.key_of(g, &gens).expect("coset image");
        let candidates = self.keys.get(&key).cloned().unwrap_or_default();
        for c in candidates {
            let rep = self.vertices[c].handle.rep.clone();
            match self.same_coset(&rep, g, &gens) {
                Some(true) => {
                    self.stats.certified_identifications += 1;
                    return c;
                }
                Some(false) => self.stats.certified_distinct += 1,
                None => {
                    self.stats.unresolved += 1;
                    let d = self.vertices[c].depth.min(depth);
                    let graph = self.reducer.graph();
                    let msg = format!(
                        "cosets {} and {} not separated",
                        self.vertices[c].handle.display(graph),
                        ParabolicHandle::new(g.clone(), gens.clone()).display(graph)
                    );
                    self.note_unresolved(msg, d);
                }
            }
        }
        self.push_vertex(ParabolicHandle::new(g.clone(), gens), depth, key)
    }

    pub fn graph(&self) -> &PresentationGraph {
        self.reducer.graph()
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }

    pub fn config(&self) -> BallConfig {
        self.config
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn safe_radius(&self) -> usize {
        self.safe_radius
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn center(&self) -> usize {
        0
    }

    /// Group elements whose chambers make up the ball, in shortlex order.
    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, id: usize) -> &BallVertex {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[BallVertex] {
        &self.vertices
    }

    pub fn kind(&self, id: usize) -> usize {
        self.vertices[id].kind()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.triangles.iter().copied()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn neighbours(&self, id: usize) -> &BTreeSet<usize> {
        &self.adjacency[id]
    }

    /// Neighbours in the essential 1-skeleton (types 1 and 2 only).
    pub fn essential_neighbours(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        let essential = self.kind(id) > 0;
        self.adjacency[id].iter().copied().filter(move |&v| essential && self.kind(v) > 0)
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.vertices[id].depth <= self.safe_radius
    }

    /// Interior vertices of the given type, in id order.
    pub fn interior_of_kind(&self, kind: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.kind(v) == kind && self.is_interior(v)).collect()
    }

    /// Finds the vertex `h.rep · A_{h.gens}`.
    pub fn find(&self, h: &ParabolicHandle) -> Lookup {
        let Some(key) = self.key_of(&h.rep, &h.gens) else { return Lookup::Unknown };
        let Some(cands) = self.keys.get(&key) else { return Lookup::Absent };
        let mut unknown = false;
        for &id in cands {
            match self.same_coset(&self.vertices[id].handle.rep, &h.rep, &h.gens) {
                Some(true) => return Lookup::Found(id),
                Some(false) => {}
                None => unknown = true,
            }
        }
        if unknown {
            Lookup::Unknown
        } else {
            Lookup::Absent
        }
    }

    /// The vertex `g · v`.
    pub fn translate(&self, g: &Word, id: usize) -> Lookup {
        let h = &self.vertices[id].handle;
        self.find(&ParabolicHandle::new(g.concat(&h.rep).free_reduce(), h.gens.clone()))
    }

    /// Whether the element `z` fixes vertex `id`.
    pub fn is_fixed_by(&self, id: usize, z: &Word) -> Option<bool> {
        let h = &self.vertices[id].handle;
        let moved = z.concat(&h.rep).free_reduce();
        let key = self.key_of(&moved, &h.gens)?;
        if key != self.vertex_keys[id] {
            return Some(false);
        }
        self.same_coset(&h.rep, &moved, &h.gens)
    }

    /// The stabilizer `gA_Sg⁻¹` of a vertex, named by its handle.
    pub fn stabilizer_handle(&self, id: usize) -> ParabolicHandle {
        self.vertices[id].handle.clone()
    }

    fn check_id(&self, id: usize) -> Result<(), BallError> {
        if id < self.vertices.len() {
            Ok(())
        } else {
            Err(BallError::UnknownVertex(id))
        }
    }

    /// Closed simplicial star of `id`.
    pub fn star(&self, id: usize) -> Result<Subcomplex, BallError> {
        self.check_id(id)?;
        // Stars of type 0 vertices are a single chamber and always complete.
        if self.kind(id) > 0 && self.vertices[id].depth >= self.radius {
            return Err(BallError::OnBoundary(id));
        }
        let mut vertices: BTreeSet<usize> = BTreeSet::from([id]);
        vertices.extend(self.adjacency[id].iter().copied());
        let triangles: Vec<[usize; 3]> =
            self.triangles.iter().filter(|t| t.contains(&id)).copied().collect();
        let mut edges: BTreeSet<(usize, usize)> =
            self.adjacency[id].iter().map(|&v| (id.min(v), id.max(v))).collect();
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        Ok(Subcomplex { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect(), triangles })
    }

    /// Simplices of the closed star not containing `id`.
    pub fn link(&self, id: usize) -> Result<Subcomplex, BallError> {
        let star = self.star(id)?;
        Ok(Subcomplex {
            vertices: star.vertices.into_iter().filter(|&v| v != id).collect(),
            edges: star.edges.into_iter().filter(|&(a, b)| a != id && b != id).collect(),
            triangles: Vec::new(),
        })
    }

    /// Star of a type 1 or 2 vertex inside the essential 1-skeleton.
    pub fn essential_star(&self, id: usize) -> Result<Subcomplex, BallError> {
        self.check_id(id)?;
        if self.kind(id) == 0 {
            return Err(BallError::NotEssential(id));
        }
        if self.vertices[id].depth >= self.radius {
            return Err(BallError::OnBoundary(id));
        }
        let nbrs: Vec<usize> = self.essential_neighbours(id).collect();
        let edges = nbrs.iter().map(|&v| (id.min(v), id.max(v))).collect();
        let mut vertices = nbrs;
        vertices.push(id);
        vertices.sort_unstable();
        Ok(Subcomplex { vertices, edges, triangles: Vec::new() })
    }

    /// Ball vertices fixed by the parabolic subgroup named by `h`.
    pub fn fixed_set(&self, h: &ParabolicHandle) -> Result<FixedSet, BallError> {
        match h.kind() {
            0 => Err(BallError::TypeZero),
            2 => Ok(match self.find(h) {
                Lookup::Found(id) => FixedSet { vertices: vec![id], ..Default::default() },
                Lookup::Absent => FixedSet::default(),
                Lookup::Unknown => FixedSet::default(),
            }),
            _ => {
                let z = h.rep.concat(&Word::gen(h.gens[0])).concat(&h.rep.inverse()).free_reduce();
                let mut set = FixedSet::default();
                for id in 0..self.vertices.len() {
                    if self.kind(id) == 0 {
                        continue;
                    }
                    match self.is_fixed_by(id, &z) {
                        Some(true) => set.vertices.push(id),
                        Some(false) => {}
                        None => set.unresolved.push(id),
                    }
                }
                let members: HashSet<usize> = set.vertices.iter().copied().collect();
                set.edges = self
                    .edges
                    .iter()
                    .filter(|(a, b)| members.contains(a) && members.contains(b))
                    .copied()
                    .collect();
                Ok(set)
            }
        }
    }

    /// Distance in the essential 1-skeleton of the ball.
    pub fn combinatorial_distance(&self, u: usize, v: usize) -> Result<BallDistance, BallError> {
        self.check_id(u)?;
        self.check_id(v)?;
        for x in [u, v] {
            if self.kind(x) == 0 {
                return Err(BallError::NotEssential(x));
            }
        }
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for y in self.essential_neighbours(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let distance = (dist[v] != usize::MAX).then_some(dist[v]);
        // Edges between ball vertices are always in the ball, and the
        // skeleton is bipartite by type, so distances up to 3 are exact.
        Ok(BallDistance { distance, exact: distance.is_some_and(|d| d <= 3) })
    }

    fn double_coset(&self, s: &[usize], t: &[usize]) -> Arc<HashSet<LinearImage>> {
        let key = (s.to_vec(), t.to_vec());
        if let Some(set) = self.double_cosets.lock().unwrap().get(&key) {
            return set.clone();
        }
        let cox = self.reducer.coxeter();
        let left = cox.finite_subgroup(s, 10_000).expect("spherical pair");
        let right = cox.finite_subgroup(t, 10_000).expect("spherical pair");
        let mut set = HashSet::new();
        for a in &left {
            for b in &right {
                set.insert(cox.mul(a, b).expect("small entries"));
            }
        }
        let set = Arc::new(set);
        self.double_cosets.lock().unwrap().insert(key, set.clone());
        set
    }

    /// Decides whether two distinct type 2 vertices are at distance 2.
    pub fn distance_two(&self, u: usize, v: usize) -> DistanceTwo {
        assert!(self.kind(u) == 2 && self.kind(v) == 2 && u != v);
        if let Some(&via) = self.adjacency[u].iter().find(|&&x| self.kind(x) == 1 && self.adjacency[v].contains(&x)) {
            return DistanceTwo::Yes { via };
        }
        let (hu, hv) = (&self.vertices[u].handle, &self.vertices[v].handle);
        if hu.gens == hv.gens {
            return DistanceTwo::No(DistanceCertificate::SameGenerators);
        }
        if !hu.gens.iter().any(|g| hv.gens.contains(g)) {
            return DistanceTwo::No(DistanceCertificate::DisjointGenerators);
        }
        let z = hu.rep.inverse().concat(&hv.rep).free_reduce();
        if let Some(img) = self.reducer.coxeter().image(&z) {
            if !self.double_coset(&hu.gens, &hv.gens).contains(&img) {
                return DistanceTwo::No(DistanceCertificate::CoxeterDoubleCoset);
            }
        }
        DistanceTwo::Unknown
    }

    /// Moussong triangle of a triangle of the ball, given as `[type 0, type 1, type 2]`.
    pub fn triangle_geometry(&self, tri: [usize; 3]) -> MoussongTriangle {
        let gens = &self.vertices[tri[2]].handle.gens;
        let m = self.graph().label(gens[0], gens[1]).expect("edge label");
        moussong_geometry(m).expect("large type")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let graph = self.graph();
        let out = JsonBall {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| JsonVertex {
                    id,
                    kind: v.kind(),
                    rep: v.handle.rep.display(graph),
                    gens: v.handle.gens.iter().map(|&g| graph.name(g).to_string()).collect(),
                    depth: v.depth,
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            triangles: self.triangles.iter().copied().collect(),
            center: self.center(),
            radius: self.radius,
            safe_radius: self.safe_radius,
            stats: self.stats,
            log: self.log.clone(),
        };
        serde_json::to_value(out).expect("serializable")
    }
}

#[cfg(test)]
mod tests;
