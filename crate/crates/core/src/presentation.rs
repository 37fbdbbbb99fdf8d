//! Labelled presentation graphs: parsing, class membership, label-preserving
//! automorphisms and labelled isomorphism.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: label {label} on edge {u}-{v} is below 2")]
    LabelTooSmall { line: usize, u: String, v: String, label: i64 },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: self-loop on {v}")]
    SelfLoop { line: usize, v: String },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
}

/// A presentation graph `Γ`: generators, edges and their labels `m_ab ≥ 2`.
///
/// Vertices are indexed densely in first-appearance order; that order is the
/// generator order used for shortlex comparisons everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationGraph {
    names: Vec<String>,
    // labels[i][j] = m_ij, or 0 when there is no edge (and on the diagonal).
    labels: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub rank: usize,
    pub large_type: bool,
    pub free_of_infinity: bool,
    pub rank_at_least_3: bool,
    pub connected: bool,
    pub in_scope: bool,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PresentationGraph {
    /// Builds a graph from names and labelled edges, validating every edge.
    pub fn new(names: Vec<String>, edges: &[(usize, usize, u32)]) -> Result<Self, GraphError> {
        let n = names.len();
        let mut labels = vec![vec![0u32; n]; n];
        for &(u, v, m) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { line: 0, v: names[u].clone() });
            }
            if m < 2 {
                return Err(GraphError::LabelTooSmall {
                    line: 0,
                    u: names[u].clone(),
                    v: names[v].clone(),
                    label: m as i64,
                });
            }
            if labels[u][v] != 0 {
                return Err(GraphError::DuplicateEdge {
                    line: 0,
                    u: names[u].clone(),
                    v: names[v].clone(),
                });
            }
            labels[u][v] = m;
            labels[v][u] = m;
        }
        Ok(Self { names, labels })
    }

    /// Complete graph on the given names with `label(i, j)` on each edge.
    pub fn complete(names: &[&str], label: impl Fn(usize, usize) -> u32) -> Self {
        let n = names.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, label(i, j)));
            }
        }
        Self::new(names.iter().map(|s| s.to_string()).collect(), &edges)
            .expect("complete graph with valid labels")
    }

    /// Parses the line-oriented graph format (`edge u v m`, `vertex u`, `#`).
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            let syntax = |msg: &str| GraphError::Syntax { line, msg: msg.to_string() };
            match toks[0] {
                "vertex" => {
                    if toks.len() != 2 {
                        return Err(syntax("expected `vertex <name>`"));
                    }
                    if !is_identifier(toks[1]) {
                        return Err(syntax(&format!("invalid vertex name {:?}", toks[1])));
                    }
                    intern(toks[1], &mut names);
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(syntax("expected `edge <u> <v> <m>`"));
                    }
                    for t in &toks[1..3] {
                        if !is_identifier(t) {
                            return Err(syntax(&format!("invalid vertex name {t:?}")));
                        }
                    }
                    let m: i64 = toks[3]
                        .parse()
                        .map_err(|_| syntax(&format!("invalid label {:?}", toks[3])))?;
                    if toks[1] == toks[2] {
                        return Err(GraphError::SelfLoop { line, v: toks[1].to_string() });
                    }
                    if m < 2 {
                        return Err(GraphError::LabelTooSmall {
                            line,
                            u: toks[1].to_string(),
                            v: toks[2].to_string(),
                            label: m,
                        });
                    }
                    let u = intern(toks[1], &mut names);
                    let v = intern(toks[2], &mut names);
                    let key = (u.min(v), u.max(v));
                    if labels.contains_key(&key) {
                        return Err(GraphError::DuplicateEdge {
                            line,
                            u: toks[1].to_string(),
                            v: toks[2].to_string(),
                        });
                    }
                    let m = u32::try_from(m).map_err(|_| syntax("label out of range"))?;
                    labels.insert(key, m);
                }
                other => return Err(syntax(&format!("unknown directive {other:?}"))),
            }
        }
        let edges: Vec<_> = labels.into_iter().map(|((u, v), m)| (u, v, m)).collect();
        Self::new(names, &edges)
    }

    /// Serializes back to the graph file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(&format!("vertex {name}\n"));
        }
        for (u, v, m) in self.edges() {
            out.push_str(&format!("edge {} {} {}\n", self.names[u], self.names[v], m));
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Label of the edge `{u, v}`, or `None` when the vertices are not adjacent.
    pub fn label(&self, u: usize, v: usize) -> Option<u32> {
        match self.labels[u][v] {
            0 => None,
            m => Some(m),
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.labels[v].iter().filter(|&&m| m != 0).count()
    }

    /// Edges `(u, v, m)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let n = self.rank();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if let Some(m) = self.label(u, v) {
                    out.push((u, v, m));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Sorted distinct edge labels.
    pub fn label_set(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.edges().into_iter().map(|(_, _, m)| m).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn is_connected(&self) -> bool {
        let n = self.rank();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && self.labels[u][v] != 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn validate_class(&self) -> ClassReport {
        let n = self.rank();
        let large_type = self.edges().iter().all(|&(_, _, m)| m >= 3);
        let free_of_infinity = self.edge_count() == n * n.saturating_sub(1) / 2;
        let connected = self.is_connected();
        let rank_at_least_3 = n >= 3;
        ClassReport {
            rank: n,
            large_type,
            free_of_infinity,
            rank_at_least_3,
            connected,
            in_scope: large_type && free_of_infinity && rank_at_least_3 && connected,
        }
    }

    fn incident_profile(&self, v: usize) -> Vec<u32> {
        let mut p: Vec<u32> = self.labels[v].iter().copied().filter(|&m| m != 0).collect();
        p.sort_unstable();
        p
    }

    /// Every label-preserving automorphism of `Γ`, identity first, then in
    /// lexicographic order of the image tuple.
    pub fn graph_automorphisms(&self) -> Vec<LabeledGraphMap> {
        let mut maps = backtrack_isomorphisms(self, self, usize::MAX);
        maps.sort_by(|a, b| a.images.cmp(&b.images));
        debug_assert!(maps.first().is_some_and(LabeledGraphMap::is_identity));
        maps
    }

    /// The lexicographically least label-preserving isomorphism `self → other`.
    pub fn labeled_isomorphism(&self, other: &PresentationGraph) -> Option<LabeledGraphMap> {
        backtrack_isomorphisms(self, other, 1).into_iter().next()
    }

    pub fn barycentric_subdivision(&self) -> BarGraph {
        let edges = self.edges();
        let mut nodes: Vec<BarNode> = (0..self.rank()).map(BarNode::Vertex).collect();
        let mut adjacency = Vec::new();
        for (k, &(u, v, _)) in edges.iter().enumerate() {
            nodes.push(BarNode::Edge(u, v));
            let id = self.rank() + k;
            adjacency.push((u, id));
            adjacency.push((v, id));
        }
        BarGraph { nodes, edges: adjacency }
    }
}

/// Backtracking search for label-preserving bijections `g → h`, in
/// lexicographic order of images, pruned by incident-label multisets.
fn backtrack_isomorphisms(
    g: &PresentationGraph,
    h: &PresentationGraph,
    limit: usize,
) -> Vec<LabeledGraphMap> {
    let n = g.rank();
    if n != h.rank() || g.edge_count() != h.edge_count() {
        return Vec::new();
    }
    let gp: Vec<_> = (0..n).map(|v| g.incident_profile(v)).collect();
    let hp: Vec<_> = (0..n).map(|v| h.incident_profile(v)).collect();
    let mut out = Vec::new();
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        v: usize,
        g: &PresentationGraph,
        h: &PresentationGraph,
        gp: &[Vec<u32>],
        hp: &[Vec<u32>],
        images: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<LabeledGraphMap>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let n = g.rank();
        if v == n {
            out.push(LabeledGraphMap { images: images.clone() });
            return;
        }
        for cand in 0..n {
            if used[cand] || gp[v] != hp[cand] {
                continue;
            }
            let consistent = (0..v).all(|u| g.labels[v][u] == h.labels[cand][images[u]]);
            if !consistent {
                continue;
            }
            images[v] = cand;
            used[cand] = true;
            go(v + 1, g, h, gp, hp, images, used, out, limit);
            used[cand] = false;
            images[v] = usize::MAX;
        }
    }

    go(0, g, h, &gp, &hp, &mut images, &mut used, &mut out, limit);
    out
}

/// A vertex bijection `Γ → Γ'`, stored as the image of each vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledGraphMap {
    pub images: Vec<usize>,
}

impl LabeledGraphMap {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Self {
        Self { images }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LabeledGraphMap) -> LabeledGraphMap {
        LabeledGraphMap { images: other.images.iter().map(|&v| self.images[v]).collect() }
    }

    pub fn inverse(&self) -> LabeledGraphMap {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        LabeledGraphMap { images: inv }
    }

    /// True when this is a bijection `from → to` preserving adjacency and labels.
    pub fn preserves_labels(&self, from: &PresentationGraph, to: &PresentationGraph) -> bool {
        let n = from.rank();
        if self.images.len() != n || to.rank() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &j in &self.images {
            if j >= n || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        (0..n).all(|u| (0..n).all(|v| from.labels[u][v] == to.labels[self.images[u]][self.images[v]]))
    }

    pub fn display(&self, from: &PresentationGraph, to: &PresentationGraph) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}->{}", from.name(i), to.name(j)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BarNode {
    /// Type-1 role: a vertex of `Γ`.
    Vertex(usize),
    /// Type-2 role: an edge of `Γ`.
    Edge(usize, usize),
}

/// The barycentric subdivision `Γ_bar`: vertex nodes first, then edge nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarGraph {
    pub nodes: Vec<BarNode>,
    pub edges: Vec<(usize, usize)>,
}

impl BarGraph {
    pub fn is_bipartite_by_role(&self) -> bool {
        self.edges.iter().all(|&(u, v)| {
            matches!(
                (self.nodes[u], self.nodes[v]),
                (BarNode::Vertex(_), BarNode::Edge(..)) | (BarNode::Edge(..), BarNode::Vertex(_))
            )
        })
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|&&(u, v)| u == node || v == node).count()
    }
}

impl fmt::Display for PresentationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g333() -> PresentationGraph {
        PresentationGraph::parse("edge a b 3\nedge b c 3\nedge a c 3\n").unwrap()
    }

    fn g345() -> PresentationGraph {
        PresentationGraph::parse("edge a b 3\nedge a c 4\nedge b c 5\n").unwrap()
    }

    #[test]
    fn parses_triangle() {
        let g = g333();
        assert_eq!(g.names(), ["a", "b", "c"]);
        assert_eq!(g.label(0, 2), Some(3));
        assert!(g.validate_class().in_scope);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            PresentationGraph::parse("edge a b 1"),
            Err(GraphError::LabelTooSmall { line: 1, .. })
        ));
        assert!(matches!(
            PresentationGraph::parse("edge a b 3\nedge a b 4"),
            Err(GraphError::DuplicateEdge { line: 2, .. })
        ));
        assert!(matches!(
            PresentationGraph::parse("edge b a 3\nedge a b 4"),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(PresentationGraph::parse("edge a a 3"), Err(GraphError::SelfLoop { .. })));
        assert!(matches!(
            PresentationGraph::parse("# c\n\nedge a b x"),
            Err(GraphError::Syntax { line: 3, .. })
        ));
        assert!(matches!(PresentationGraph::parse("edge 1a b 3"), Err(GraphError::Syntax { .. })));
        assert!(matches!(PresentationGraph::parse("foo"), Err(GraphError::Syntax { .. })));
    }

    #[test]
    fn class_reports() {
        let path = PresentationGraph::parse("edge a b 3\nedge b c 3").unwrap();
        let r = path.validate_class();
        assert!(!r.free_of_infinity && !r.in_scope && r.connected);

        let edge = PresentationGraph::parse("edge a b 5").unwrap();
        let r = edge.validate_class();
        assert_eq!(r.rank, 2);
        assert!(!r.in_scope && r.free_of_infinity);

        let iso = PresentationGraph::parse("edge a b 3\nedge b c 3\nedge a c 3\nvertex d").unwrap();
        let r = iso.validate_class();
        assert!(!r.free_of_infinity && !r.connected);

        let small = PresentationGraph::parse("edge a b 2\nedge b c 3\nedge a c 3").unwrap();
        assert!(!small.validate_class().large_type);
    }

    #[test]
    fn automorphism_counts() {
        let auts = g333().graph_automorphisms();
        assert_eq!(auts.len(), 6);
        assert!(auts[0].is_identity());
        assert_eq!(g345().graph_automorphisms().len(), 1);
        let k4 = PresentationGraph::complete(&["a", "b", "c", "d"], |_, _| 3);
        assert_eq!(k4.graph_automorphisms().len(), 24);
    }

    #[test]
    fn automorphisms_form_a_group() {
        let k4 = PresentationGraph::complete(&["a", "b", "c", "d"], |i, j| if i + j == 3 { 4 } else { 3 });
        let auts = k4.graph_automorphisms();
        for f in &auts {
            assert!(f.preserves_labels(&k4, &k4));
            assert!(auts.contains(&f.inverse()));
            for g in &auts {
                assert!(auts.contains(&f.compose(g)));
            }
        }
    }

    #[test]
    fn isomorphism_examples() {
        let renamed = PresentationGraph::parse("edge x y 3\nedge y z 3\nedge x z 3").unwrap();
        let m = g333().labeled_isomorphism(&renamed).unwrap();
        assert_eq!(m.images, vec![0, 1, 2]);
        assert!(g333().labeled_isomorphism(&g345()).is_none());

        let k4 = PresentationGraph::parse(
            "edge a b 3\nedge a c 3\nedge a d 4\nedge b c 4\nedge b d 3\nedge c d 3",
        )
        .unwrap();
        // Same labels transported by the 4-cycle a->b->c->d->a.
        let cycle = [1usize, 2, 3, 0];
        let mut edges = Vec::new();
        for (u, v, m) in k4.edges() {
            edges.push((cycle[u], cycle[v], m));
        }
        let permuted = PresentationGraph::new(k4.names().to_vec(), &edges).unwrap();
        let iso = k4.labeled_isomorphism(&permuted).unwrap();
        assert!(iso.preserves_labels(&k4, &permuted));
    }

    #[test]
    fn barycentric_counts() {
        let bar = g333().barycentric_subdivision();
        assert_eq!(bar.nodes.len(), 6);
        assert_eq!(bar.edges.len(), 6);
        assert!(bar.is_bipartite_by_role());
        assert!((0..6).all(|v| bar.degree(v) == 2));

        let edge = PresentationGraph::parse("edge a b 3").unwrap().barycentric_subdivision();
        assert_eq!((edge.nodes.len(), edge.edges.len()), (3, 2));

        let k4 = PresentationGraph::complete(&["a", "b", "c", "d"], |_, _| 3).barycentric_subdivision();
        assert_eq!((k4.nodes.len(), k4.edges.len()), (10, 12));
    }

    #[test]
    fn round_trips_text() {
        let g = PresentationGraph::parse("edge a b 3\nedge a c 4\nvertex z\n").unwrap();
        assert_eq!(PresentationGraph::parse(&g.to_text()).unwrap(), g);
    }
}
