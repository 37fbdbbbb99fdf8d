//! Algebraic reconstruction of the Deligne complex on the safe region of a
//! ball: type 2 parabolics, the adjacency property, maximal adjacency sets,
//! the bipartite graph `D_1`, characteristic subgraphs and the cone-off.
//!
//! Each verdict only quantifies over the interior of the ball. A pairwise
//! intersection of type 2 parabolics is certified non-trivial by a common type
//! 1 neighbour; two distinct type 1 parabolics are taken to intersect
//! trivially, which decides the triple intersection.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::deligne::{ComplexBall, DistanceCertificate, DistanceTwo, Lookup, ParabolicHandle};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructionError {
    #[error("the two parabolics are the same subgroup")]
    Identical,
    #[error("parabolic {0} is not an interior vertex of the ball")]
    NotInterior(String),
    #[error("parabolic {0} is not of type 2")]
    NotTypeTwo(String),
}

/// A type 2 spherical parabolic with its fixed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dv2Element {
    pub handle: ParabolicHandle,
    pub vertex: usize,
}

/// One per interior type 2 vertex, in vertex order.
pub fn dv2_enumerate(ball: &ComplexBall) -> Vec<Dv2Element> {
    ball.interior_of_kind(2)
        .into_iter()
        .map(|vertex| Dv2Element { handle: ball.stabilizer_handle(vertex), vertex })
        .collect()
}

fn interior_type2(ball: &ComplexBall, h: &ParabolicHandle) -> Result<usize, ReconstructionError> {
    let name = || h.display(ball.graph());
    if h.kind() != 2 {
        return Err(ReconstructionError::NotTypeTwo(name()));
    }
    match ball.find(h) {
        Lookup::Found(v) if ball.is_interior(v) => Ok(v),
        _ => Err(ReconstructionError::NotInterior(name())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Trivial(DistanceCertificate),
    Type1 { handle: ParabolicHandle, vertex: usize },
    Undetermined,
}

/// Intersection of two distinct interior type 2 parabolics.
pub fn intersect_type2(
    ball: &ComplexBall,
    h1: &ParabolicHandle,
    h2: &ParabolicHandle,
) -> Result<Intersection, ReconstructionError> {
    let u = interior_type2(ball, h1)?;
    let v = interior_type2(ball, h2)?;
    if u == v {
        return Err(ReconstructionError::Identical);
    }
    Ok(match ball.distance_two(u, v) {
        DistanceTwo::Yes { via } => Intersection::Type1 { handle: ball.stabilizer_handle(via), vertex: via },
        DistanceTwo::No(cert) => Intersection::Trivial(cert),
        DistanceTwo::Unknown => Intersection::Undetermined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adjacency {
    /// `intersections` are the type 1 vertices for `H1∩H2`, `H1∩H3`, `H2∩H3`.
    Holds { witness: usize, intersections: [usize; 3] },
    /// No witness exists: the pair is certified not to be at distance 2.
    Fails(DistanceCertificate),
    Inconclusive,
}

impl Adjacency {
    pub fn holds(&self) -> bool {
        matches!(self, Adjacency::Holds { .. })
    }
}

/// Type 2 vertices sharing a type 1 neighbour with `u`, with the smallest such
/// neighbour.
fn second_neighbours(ball: &ComplexBall, u: usize) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for x in ball.essential_neighbours(u) {
        for h in ball.essential_neighbours(x) {
            if h != u {
                out.entry(h).or_insert(x);
            }
        }
    }
    out
}

fn adjacency_between(ball: &ComplexBall, u: usize, v: usize) -> Adjacency {
    let nu = second_neighbours(ball, u);
    let Some(&x12) = nu.get(&v) else {
        return match ball.distance_two(u, v) {
            DistanceTwo::No(cert) => Adjacency::Fails(cert),
            _ => Adjacency::Inconclusive,
        };
    };
    let nv = second_neighbours(ball, v);
    for (&h3, &x13) in &nu {
        if h3 == v {
            continue;
        }
        if let Some(&x23) = nv.get(&h3) {
            if x12 != x13 && x12 != x23 && x13 != x23 {
                return Adjacency::Holds { witness: h3, intersections: [x12, x13, x23] };
            }
        }
    }
    Adjacency::Inconclusive
}

/// Adjacency property for two distinct interior type 2 parabolics.
pub fn adjacency_property(
    ball: &ComplexBall,
    h1: &ParabolicHandle,
    h2: &ParabolicHandle,
) -> Result<Adjacency, ReconstructionError> {
    let u = interior_type2(ball, h1)?;
    let v = interior_type2(ball, h2)?;
    if u == v {
        return Err(ReconstructionError::Identical);
    }
    Ok(adjacency_between(ball, u, v))
}

/// Adjacency verdicts for every pair of interior type 2 vertices.
#[derive(Debug, Clone)]
pub struct AdjacencyTable {
    pub vertices: Vec<usize>,
    verdicts: HashMap<(usize, usize), Adjacency>,
}

impl AdjacencyTable {
    pub fn build(ball: &ComplexBall) -> Self {
        let vertices = ball.interior_of_kind(2);
        let mut verdicts = HashMap::new();
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                verdicts.insert((u, v), adjacency_between(ball, u, v));
            }
        }
        Self { vertices, verdicts }
    }

    pub fn get(&self, u: usize, v: usize) -> Option<Adjacency> {
        self.verdicts.get(&(u.min(v), u.max(v))).copied()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AdjacencyReport {
    /// Interior type 2 vertices.
    pub scope: usize,
    pub checked: usize,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
    pub inconclusive_rate: f64,
    /// Pairs at certified distance 2.
    pub distance_two: usize,
    /// Pairs at distance 2 whose witness search found nothing in the ball.
    pub distance_two_without_witness: usize,
    /// Witnesses whose fixed trees were checked to meet pairwise in the
    /// three type 2 vertices and nowhere else.
    pub witness_trees_checked: usize,
    pub violations: Vec<String>,
}

/// Holds ⟺ distance 2, for every pair of interior type 2 vertices.
pub fn verify_adjacency_criterion(ball: &ComplexBall, table: &AdjacencyTable) -> AdjacencyReport {
    let graph = ball.graph();
    let name = |v: usize| ball.vertex(v).handle.display(graph);
    let mut r = AdjacencyReport { scope: table.vertices.len(), ..Default::default() };
    let mut tree_budget = 8;
    for (i, &u) in table.vertices.iter().enumerate() {
        for &v in &table.vertices[i + 1..] {
            r.checked += 1;
            let verdict = table.get(u, v).expect("all pairs tabulated");
            let reverse = adjacency_between(ball, v, u);
            if verdict.holds() != reverse.holds() {
                r.violations.push(format!("adjacency not symmetric for {} and {}", name(u), name(v)));
            }
            let distance = ball.distance_two(u, v);
            if matches!(distance, DistanceTwo::Yes { .. }) {
                r.distance_two += 1;
            }
            match verdict {
                Adjacency::Holds { witness, intersections } => {
                    r.holds += 1;
                    if let DistanceTwo::No(cert) = distance {
                        r.violations.push(format!(
                            "{} and {} satisfy the adjacency property but are certified apart ({cert:?})",
                            name(u),
                            name(v)
                        ));
                    }
                    let distinct: HashSet<usize> = [u, v, witness].into_iter().collect();
                    let xs: HashSet<usize> = intersections.into_iter().collect();
                    if distinct.len() != 3 || xs.len() != 3 {
                        r.violations.push(format!("degenerate witness for {} and {}", name(u), name(v)));
                    }
                    if tree_budget > 0 {
                        tree_budget -= 1;
                        match check_witness_trees(ball, [u, v, witness], intersections) {
                            Some(true) => r.witness_trees_checked += 1,
                            Some(false) => r.violations.push(format!(
                                "fixed trees of the witness for {} and {} do not meet as a triangle",
                                name(u),
                                name(v)
                            )),
                            None => {}
                        }
                    }
                }
                Adjacency::Fails(_) => {
                    r.fails += 1;
                    if matches!(distance, DistanceTwo::Yes { .. }) {
                        r.violations.push(format!("{} and {} fail at distance 2", name(u), name(v)));
                    }
                }
                Adjacency::Inconclusive => {
                    r.inconclusive += 1;
                    if matches!(distance, DistanceTwo::Yes { .. }) {
                        r.distance_two_without_witness += 1;
                    }
                }
            }
        }
    }
    r.inconclusive_rate = if r.checked == 0 { 0.0 } else { r.inconclusive as f64 / r.checked as f64 };
    r
}

/// The fixed trees of the three intersections meet pairwise exactly in the
/// three type 2 vertices, with empty triple intersection.
fn check_witness_trees(ball: &ComplexBall, hs: [usize; 3], xs: [usize; 3]) -> Option<bool> {
    let mut trees = Vec::new();
    for x in xs {
        let fs = ball.fixed_set(&ball.stabilizer_handle(x)).ok()?;
        if !fs.unresolved.is_empty() {
            return None;
        }
        trees.push(fs.vertices.into_iter().filter(|&v| ball.kind(v) == 2).collect::<BTreeSet<_>>());
    }
    // xs = [H1∩H2, H1∩H3, H2∩H3]
    let meet = |i: usize, j: usize| trees[i].intersection(&trees[j]).copied().collect::<Vec<_>>();
    let triple = trees[0].intersection(&trees[1]).filter(|v| trees[2].contains(v)).count();
    Some(meet(0, 1) == vec![hs[0]] && meet(0, 2) == vec![hs[1]] && meet(1, 2) == vec![hs[2]] && triple == 0)
}

/// Maximal adjacency set attached to an interior type 1 vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dv1Set {
    /// The type 1 vertex `x` with `f_V1(set) = x`.
    pub vertex: usize,
    /// Type 2 vertices adjacent to `x`, sorted.
    pub members: Vec<usize>,
    /// Handle of the common intersection, the stabilizer of `x`.
    pub intersection: ParabolicHandle,
}

pub fn build_dv1(ball: &ComplexBall) -> Vec<Dv1Set> {
    ball.interior_of_kind(1)
        .into_iter()
        .map(|x| Dv1Set {
            vertex: x,
            members: ball.essential_neighbours(x).collect(),
            intersection: ball.stabilizer_handle(x),
        })
        .collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Dv1Report {
    pub scope: usize,
    pub checked: usize,
    /// Pairs of members with the adjacency property verified.
    pub pairwise_checked: usize,
    /// Candidates shown not to extend a set.
    pub maximality_checked: usize,
    pub maximality_inconclusive: usize,
    pub violations: Vec<String>,
}

/// Checks that every set is an adjacency set with non-trivial common
/// intersection, maximal among interior candidates, and that `f_V1` is
/// injective.
pub fn verify_dv1(ball: &ComplexBall, table: &AdjacencyTable, sets: &[Dv1Set]) -> Dv1Report {
    let graph = ball.graph();
    let name = |v: usize| ball.vertex(v).handle.display(graph);
    let mut r = Dv1Report { scope: ball.interior_of_kind(1).len(), ..Default::default() };
    let interior2 = &table.vertices;
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for set in sets {
        r.checked += 1;
        let x = set.vertex;
        let h = &set.intersection;
        let gen = h.gens[0];
        if set.members.len() != graph.degree(gen) {
            r.violations.push(format!("{} has {} type 2 neighbours", name(x), set.members.len()));
        }
        if let Some(prev) = seen.insert(set.members.clone(), x) {
            r.violations.push(format!("{} and {} give the same set", name(prev), name(x)));
        }
        for (i, &a) in set.members.iter().enumerate() {
            if !ball.is_interior(a) {
                r.violations.push(format!("member {} of {} is not interior", name(a), name(x)));
                continue;
            }
            for &b in &set.members[i + 1..] {
                match table.get(a, b) {
                    Some(adj) if adj.holds() => r.pairwise_checked += 1,
                    _ => r.violations.push(format!("members {} and {} of {} not adjacent", name(a), name(b), name(x))),
                }
            }
        }
        let z = h.rep.concat(&Word::gen(gen)).concat(&h.rep.inverse()).free_reduce();
        for &a in &set.members {
            if ball.is_fixed_by(a, &z) != Some(true) {
                r.violations.push(format!("stabilizer of {} not certified inside {}", name(x), name(a)));
            }
        }
        for &c in interior2 {
            if set.members.contains(&c) {
                continue;
            }
            let blocked_by_adjacency =
                set.members.iter().any(|&m| matches!(table.get(c, m), Some(Adjacency::Fails(_))));
            let all_adjacent = set.members.iter().all(|&m| table.get(c, m).is_some_and(|a| a.holds()));
            let contains = ball.is_fixed_by(c, &z);
            if blocked_by_adjacency || contains == Some(false) {
                r.maximality_checked += 1;
            } else if all_adjacent && contains == Some(true) {
                r.violations.push(format!("{} extends the set of {}", name(c), name(x)));
            } else {
                r.maximality_inconclusive += 1;
            }
        }
    }
    r
}

/// Bipartite graph on type 2 parabolics and maximal adjacency sets. Nodes
/// `0..dv2.len()` are the type 2 parabolics; the rest are the sets.
#[derive(Debug, Clone)]
pub struct D1Graph {
    pub dv2: Vec<Dv2Element>,
    pub dv1: Vec<Dv1Set>,
    pub edges: Vec<(usize, usize)>,
}

impl D1Graph {
    pub fn node_count(&self) -> usize {
        self.dv2.len() + self.dv1.len()
    }

    pub fn is_dv1(&self, node: usize) -> bool {
        node >= self.dv2.len()
    }

    /// Ball vertex of a node (`F_1`).
    pub fn ball_vertex(&self, node: usize) -> usize {
        if self.is_dv1(node) {
            self.dv1[node - self.dv2.len()].vertex
        } else {
            self.dv2[node].vertex
        }
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == node || b == node).count()
    }
}

pub fn build_d1(dv2: Vec<Dv2Element>, dv1: Vec<Dv1Set>) -> D1Graph {
    let index: HashMap<usize, usize> = dv2.iter().enumerate().map(|(i, e)| (e.vertex, i)).collect();
    let mut edges = Vec::new();
    for (j, set) in dv1.iter().enumerate() {
        for m in &set.members {
            if let Some(&i) = index.get(m) {
                edges.push((i, dv2.len() + j));
            }
        }
    }
    D1Graph { dv2, dv1, edges }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct D1Report {
    pub nodes: usize,
    pub edges: usize,
    pub skeleton_vertices: usize,
    pub skeleton_edges: usize,
    pub violations: Vec<String>,
}

/// `F_1` is an isomorphism onto the interior essential skeleton.
pub fn verify_d1(ball: &ComplexBall, d1: &D1Graph) -> D1Report {
    let interior: BTreeSet<usize> =
        ball.interior_of_kind(1).into_iter().chain(ball.interior_of_kind(2)).collect();
    let skeleton_edges: BTreeSet<(usize, usize)> = ball
        .edges()
        .filter(|(a, b)| interior.contains(a) && interior.contains(b))
        .collect();
    let mut r = D1Report {
        nodes: d1.node_count(),
        edges: d1.edges.len(),
        skeleton_vertices: interior.len(),
        skeleton_edges: skeleton_edges.len(),
        violations: Vec::new(),
    };
    let images: BTreeSet<usize> = (0..d1.node_count()).map(|n| d1.ball_vertex(n)).collect();
    if images.len() != d1.node_count() {
        r.violations.push("F_1 is not injective".into());
    }
    if images != interior {
        r.violations.push("F_1 is not onto the interior skeleton".into());
    }
    for (i, e) in d1.dv2.iter().enumerate() {
        if ball.kind(e.vertex) != 2 {
            r.violations.push(format!("node {i} maps to a vertex of type {}", ball.kind(e.vertex)));
        }
    }
    let mapped: BTreeSet<(usize, usize)> = d1
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (d1.ball_vertex(a), d1.ball_vertex(b));
            (x.min(y), x.max(y))
        })
        .collect();
    for &(a, b) in &d1.edges {
        let set = &d1.dv1[b - d1.dv2.len()];
        if !set.members.contains(&d1.dv2[a].vertex) {
            r.violations.push(format!("edge ({a}, {b}) joins a set to a non-member"));
        }
    }
    if mapped != skeleton_edges {
        r.violations.push(format!(
            "edge sets differ: {} mapped, {} in the skeleton",
            mapped.len(),
            skeleton_edges.len()
        ));
    }
    r
}

/// A subgraph of `D_1` isomorphic to the barycentric subdivision of a
/// complete graph, with its matched apex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicSubgraph {
    /// `D_1` nodes of maximal adjacency sets (the subdivided vertices).
    pub corners: Vec<usize>,
    /// `D_1` nodes of type 2 parabolics (the subdivided edges).
    pub connectors: Vec<usize>,
    /// Type 0 vertex `{g}` with `g·Γ_bar` equal to this subgraph.
    pub apex: Option<usize>,
}

impl CharacteristicSubgraph {
    pub fn nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.corners.iter().chain(&self.connectors).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn edge_count(&self) -> usize {
        2 * self.connectors.len()
    }

    pub fn apex_rep<'a>(&self, ball: &'a ComplexBall) -> Option<&'a Word> {
        self.apex.map(|a| &ball.vertex(a).handle.rep)
    }
}

/// Connector shared by two set nodes, if exactly one exists.
fn connectors(d1: &D1Graph) -> (HashMap<(usize, usize), usize>, Vec<(usize, usize)>) {
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in &d1.edges {
        members.entry(a).or_default().push(b);
    }
    let mut shared: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (&h, sets) in &members {
        for (i, &x) in sets.iter().enumerate() {
            for &y in &sets[i + 1..] {
                shared.entry((x.min(y), x.max(y))).or_default().push(h);
            }
        }
    }
    let mut unique = HashMap::new();
    let mut multiple = Vec::new();
    for (pair, hs) in shared {
        if hs.len() == 1 {
            unique.insert(pair, hs[0]);
        } else {
            multiple.push(pair);
        }
    }
    multiple.sort_unstable();
    (unique, multiple)
}

fn extend_cliques(
    current: &mut Vec<usize>,
    used: &mut Vec<usize>,
    candidates: &[usize],
    conn: &HashMap<(usize, usize), usize>,
    out: &mut Vec<(Vec<usize>, Vec<usize>)>,
) {
    if current.len() >= 3 {
        out.push((current.clone(), used.clone()));
    }
    for (i, &y) in candidates.iter().enumerate() {
        let mut new = Vec::with_capacity(current.len());
        let ok = current.iter().all(|&c| match conn.get(&(c.min(y), c.max(y))) {
            Some(&h) if !used.contains(&h) && !new.contains(&h) => {
                new.push(h);
                true
            }
            _ => false,
        });
        if !ok {
            continue;
        }
        current.push(y);
        let before = used.len();
        used.extend(new);
        extend_cliques(current, used, &candidates[i + 1..], conn, out);
        used.truncate(before);
        current.pop();
    }
}

/// Maximal subdivided complete subgraphs of `D_1` on at least three corners.
pub fn characteristic_subgraphs(ball: &ComplexBall, d1: &D1Graph) -> Vec<CharacteristicSubgraph> {
    let (conn, _) = connectors(d1);
    let mut partners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in conn.keys() {
        partners.entry(x).or_default().push(y);
    }
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (&x, ys) in &mut partners {
        ys.sort_unstable();
        let mut current = vec![x];
        let mut used = Vec::new();
        extend_cliques(&mut current, &mut used, ys, &conn, &mut found);
    }
    let sets: Vec<BTreeSet<usize>> = found.iter().map(|(c, _)| c.iter().copied().collect()).collect();
    let mut out = Vec::new();
    for (i, (corners, used)) in found.iter().enumerate() {
        let maximal = !sets
            .iter()
            .enumerate()
            .any(|(j, s)| j != i && s.len() > sets[i].len() && sets[i].is_subset(s));
        if !maximal {
            continue;
        }
        let mut connectors = used.clone();
        connectors.sort_unstable();
        let apex = match_apex(ball, d1, corners, &connectors);
        out.push(CharacteristicSubgraph { corners: corners.clone(), connectors, apex });
    }
    out.sort_by(|a, b| a.corners.cmp(&b.corners));
    out
}

/// The type 0 vertex whose essential link is exactly the subgraph.
fn match_apex(ball: &ComplexBall, d1: &D1Graph, corners: &[usize], connectors: &[usize]) -> Option<usize> {
    let targets: BTreeSet<usize> =
        corners.iter().chain(connectors).map(|&n| d1.ball_vertex(n)).collect();
    let first = d1.ball_vertex(corners[0]);
    let mut apexes = ball
        .neighbours(first)
        .iter()
        .copied()
        .filter(|&g| ball.kind(g) == 0 && targets.iter().all(|t| ball.has_edge(g, *t)));
    let apex = apexes.next()?;
    if apexes.next().is_some() {
        return None;
    }
    let link: BTreeSet<usize> = ball.neighbours(apex).iter().copied().collect();
    (link == targets).then_some(apex)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CharacteristicReport {
    pub subgraphs: usize,
    pub matched: usize,
    /// Interior 6-cycles of the skeleton.
    pub hexagons: usize,
    /// Interior type 0 vertices whose translate of `Γ_bar` was found.
    pub apexes_covered: usize,
    pub violations: Vec<String>,
}

pub fn verify_characteristic_subgraphs(
    ball: &ComplexBall,
    d1: &D1Graph,
    cs: &[CharacteristicSubgraph],
) -> CharacteristicReport {
    let graph = ball.graph();
    let n = graph.rank();
    let mut r = CharacteristicReport { subgraphs: cs.len(), ..Default::default() };
    let (conn, multiple) = connectors(d1);
    for (x, y) in multiple {
        r.violations.push(format!("set nodes {x} and {y} share more than one type 2 node"));
    }
    let bar = graph.barycentric_subdivision();
    let mut apexes = BTreeSet::new();
    for (i, c) in cs.iter().enumerate() {
        if c.corners.len() != n || c.connectors.len() != bar.nodes.len() - n || c.edge_count() != bar.edges.len() {
            r.violations.push(format!("subgraph {i} has {} corners, expected {n}", c.corners.len()));
        }
        match c.apex {
            Some(a) => {
                r.matched += 1;
                if !apexes.insert(a) {
                    r.violations.push(format!("apex {} matched twice", ball.vertex(a).handle.display(graph)));
                }
            }
            None => r.violations.push(format!("subgraph {i} matches no translate")),
        }
    }
    // every hexagon (three corners with distinct pairwise connectors) lies in
    // exactly one subgraph
    let corner_sets: Vec<BTreeSet<usize>> = cs.iter().map(|c| c.corners.iter().copied().collect()).collect();
    let mut pairs: Vec<(usize, usize)> = conn.keys().copied().collect();
    pairs.sort_unstable();
    let adjacent = |a: usize, b: usize| conn.get(&(a.min(b), a.max(b))).copied();
    let mut partners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in &pairs {
        partners.entry(x).or_default().push(y);
    }
    for (&x, ys) in &partners {
        for (i, &y) in ys.iter().enumerate() {
            for &z in &ys[i + 1..] {
                let (Some(h1), Some(h2), Some(h3)) = (adjacent(x, y), adjacent(x, z), adjacent(y, z)) else {
                    continue;
                };
                if h1 == h2 || h1 == h3 || h2 == h3 {
                    continue;
                }
                r.hexagons += 1;
                let containing = corner_sets
                    .iter()
                    .filter(|s| s.contains(&x) && s.contains(&y) && s.contains(&z))
                    .count();
                if containing != 1 {
                    r.violations.push(format!("hexagon on set nodes {x}, {y}, {z} lies in {containing} subgraphs"));
                }
            }
        }
    }
    // interior type 0 vertices with interior links are apexes
    for g in ball.interior_of_kind(0) {
        if ball.neighbours(g).iter().all(|&v| ball.is_interior(v)) {
            if apexes.contains(&g) {
                r.apexes_covered += 1;
            } else {
                r.violations.push(format!("translate of {} not found", ball.vertex(g).handle.display(graph)));
            }
        }
    }
    r
}

/// `D_1` with every characteristic subgraph coned off. Nodes
/// `0..d1.node_count()` are those of `D_1`; then one apex per subgraph.
#[derive(Debug, Clone)]
pub struct AlgebraicComplex {
    pub d1: D1Graph,
    pub subgraphs: Vec<CharacteristicSubgraph>,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
}

impl AlgebraicComplex {
    pub fn node_count(&self) -> usize {
        self.d1.node_count() + self.subgraphs.len()
    }

    pub fn apex_node(&self, i: usize) -> usize {
        self.d1.node_count() + i
    }
}

pub fn cone_off(d1: D1Graph, subgraphs: Vec<CharacteristicSubgraph>) -> AlgebraicComplex {
    let mut edges = d1.edges.clone();
    let mut triangles = Vec::new();
    for (i, c) in subgraphs.iter().enumerate() {
        let apex = d1.node_count() + i;
        for node in c.nodes() {
            edges.push((node, apex));
        }
        let conns: HashSet<usize> = c.connectors.iter().copied().collect();
        let corners: HashSet<usize> = c.corners.iter().copied().collect();
        for &(h, s) in &d1.edges {
            if conns.contains(&h) && corners.contains(&s) {
                triangles.push([apex, s, h]);
            }
        }
    }
    AlgebraicComplex { d1, subgraphs, edges, triangles }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IsomorphismReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub ball_vertices: usize,
    pub ball_edges: usize,
    pub ball_triangles: usize,
    pub equivariance_checked: usize,
    pub violations: Vec<String>,
}

/// `F` is a type-preserving simplicial isomorphism from the algebraic complex
/// onto the interior subcomplex of the ball.
pub fn verify_isomorphism(ball: &ComplexBall, dc: &AlgebraicComplex) -> IsomorphismReport {
    let graph = ball.graph();
    let mut region: BTreeSet<usize> =
        ball.interior_of_kind(1).into_iter().chain(ball.interior_of_kind(2)).collect();
    let apexes: Vec<usize> = (0..ball.vertex_count())
        .filter(|&g| ball.kind(g) == 0 && ball.neighbours(g).iter().all(|v| region.contains(v)))
        .collect();
    region.extend(apexes);
    let ball_edges: BTreeSet<(usize, usize)> =
        ball.edges().filter(|(a, b)| region.contains(a) && region.contains(b)).collect();
    let ball_triangles: BTreeSet<[usize; 3]> =
        ball.triangles().filter(|t| t.iter().all(|v| region.contains(v))).collect();

    let mut r = IsomorphismReport {
        vertices: dc.node_count(),
        edges: dc.edges.len(),
        triangles: dc.triangles.len(),
        ball_vertices: region.len(),
        ball_edges: ball_edges.len(),
        ball_triangles: ball_triangles.len(),
        ..Default::default()
    };
    let mut f: Vec<Option<usize>> = (0..dc.d1.node_count()).map(|n| Some(dc.d1.ball_vertex(n))).collect();
    f.extend(dc.subgraphs.iter().map(|c| c.apex));
    if f.iter().any(|x| x.is_none()) {
        r.violations.push("an apex has no image".into());
        return r;
    }
    let f: Vec<usize> = f.into_iter().map(|x| x.unwrap()).collect();
    for (node, &v) in f.iter().enumerate() {
        let expected = if node >= dc.d1.node_count() {
            0
        } else if dc.d1.is_dv1(node) {
            1
        } else {
            2
        };
        if ball.kind(v) != expected {
            r.violations.push(format!("node {node} of type {expected} maps to type {}", ball.kind(v)));
        }
    }
    let image: BTreeSet<usize> = f.iter().copied().collect();
    if image.len() != f.len() {
        r.violations.push("F is not injective".into());
    }
    if image != region {
        r.violations.push(format!("F hits {} of {} interior vertices", image.len(), region.len()));
    }
    let mapped_edges: BTreeSet<(usize, usize)> = dc
        .edges
        .iter()
        .map(|&(a, b)| (f[a].min(f[b]), f[a].max(f[b])))
        .collect();
    if mapped_edges != ball_edges {
        r.violations.push(format!("edges differ: {} mapped, {} in the ball", mapped_edges.len(), ball_edges.len()));
    }
    let mapped_triangles: BTreeSet<[usize; 3]> = dc
        .triangles
        .iter()
        .map(|t| {
            let mut v = [f[t[0]], f[t[1]], f[t[2]]];
            v.sort_by_key(|&x| ball.kind(x));
            v
        })
        .collect();
    if mapped_triangles != ball_triangles {
        r.violations.push(format!(
            "triangles differ: {} mapped, {} in the ball",
            mapped_triangles.len(),
            ball_triangles.len()
        ));
    }
    // F(s·H) = s·F(H) on type 2 nodes, computing s·H on handles
    let by_vertex: HashMap<usize, usize> = dc.d1.dv2.iter().enumerate().map(|(i, e)| (e.vertex, i)).collect();
    for e in &dc.d1.dv2 {
        for s in 0..graph.rank() {
            for sw in [Word::gen(s), Word::gen(s).inverse()] {
                let moved = ParabolicHandle::new(sw.concat(&e.handle.rep).free_reduce(), e.handle.gens.clone());
                let Lookup::Found(target) = ball.find(&moved) else { continue };
                if !by_vertex.contains_key(&target) {
                    continue;
                }
                match ball.translate(&sw, e.vertex) {
                    Lookup::Found(t) if t == target => r.equivariance_checked += 1,
                    _ => r.violations.push(format!("translate of {} disagrees", e.handle.display(graph))),
                }
            }
        }
    }
    r
}

/// All four reconstruction checks on one ball.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub safe_radius: usize,
    pub adjacency_distance: AdjacencyReport,
    pub dv1_bijection: Dv1Report,
    pub d1_skeleton: D1Report,
    pub characteristic_subgraphs: CharacteristicReport,
    pub complex_isomorphism: IsomorphismReport,
}

impl ReconstructionReport {
    pub fn violation_count(&self) -> usize {
        self.adjacency_distance.violations.len()
            + self.dv1_bijection.violations.len()
            + self.d1_skeleton.violations.len()
            + self.characteristic_subgraphs.violations.len()
            + self.complex_isomorphism.violations.len()
    }
}

/// Runs the whole pipeline on a ball.
pub fn reconstruct(ball: &ComplexBall) -> (AlgebraicComplex, ReconstructionReport) {
    let table = AdjacencyTable::build(ball);
    let adjacency_distance = verify_adjacency_criterion(ball, &table);
    let dv1 = build_dv1(ball);
    let dv1_bijection = verify_dv1(ball, &table, &dv1);
    let d1 = build_d1(dv2_enumerate(ball), dv1);
    let d1_skeleton = verify_d1(ball, &d1);
    let cs = characteristic_subgraphs(ball, &d1);
    let characteristic = verify_characteristic_subgraphs(ball, &d1, &cs);
    let dc = cone_off(d1, cs);
    let complex_isomorphism = verify_isomorphism(ball, &dc);
    let report = ReconstructionReport {
        safe_radius: ball.safe_radius(),
        adjacency_distance,
        dv1_bijection,
        d1_skeleton,
        characteristic_subgraphs: characteristic,
        complex_isomorphism,
    };
    (dc, report)
}
