//! Angled disc diagrams and combinatorial curvature.
//!
//! All angles and curvatures are exact rationals in units of `π`.

mod arrows;
pub mod generate;
mod partition;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use num_rational::Rational64;

pub use arrows::{arrow_system, strip_check, Arrow, ArrowKind, ArrowSystem, StripReport};
pub use partition::{moussong_angles, proof_partition, PartitionReport};

/// Rational multiple of `π`.
pub type Angle = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("diagram is not a non-singular disc: {0}")]
    Malformed(String),
    #[error("vertex {0} has no type")]
    MissingType(String),
    #[error("type 2 vertex {0} has no label")]
    MissingLabel(String),
    #[error("label {1} at vertex {0} is below 3")]
    BadLabel(String, u32),
    #[error("marked vertex {0} is not a type 2 boundary vertex")]
    MarkNotOnBoundary(String),
    #[error("expected three distinct marked vertices, found {0}")]
    MarkCount(usize),
    #[error("faces {0} and {1} do not share an edge")]
    NotAdjacent(usize, usize),
    #[error("exponent 0 between faces {0} and {1}: adjacent faces must be distinct translates")]
    ZeroExponent(usize, usize),
    #[error("path {0} is not a side of the boundary")]
    NotASide(String),
    #[error("face {0} has no angles")]
    MissingAngles(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramVertex {
    pub name: String,
    /// 1 or 2 in the coarse structure of a Deligne disc.
    pub kind: Option<u8>,
    pub label: Option<u32>,
    pub mark: bool,
}

/// A corner `(v, f)` with its angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub face: usize,
    pub angle: Angle,
}

/// Arrow data read from a file: `face1 = None` is the reflected copy of
/// `face0` across the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowSpec {
    pub face0: usize,
    pub face1: Option<usize>,
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiscDiagram {
    pub vertices: Vec<DiagramVertex>,
    /// Each face is a cyclic vertex sequence.
    pub faces: Vec<Vec<usize>>,
    /// Corner table. Gauss–Bonnet is evaluated from this table only.
    pub corners: Vec<Corner>,
    /// Boundary cycle, as declared or derived.
    pub boundary: Vec<usize>,
    pub arrows: Vec<ArrowSpec>,
    /// Optional side for strip checks.
    pub side: Option<Vec<usize>>,
}

fn frac(r: Angle) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_angle(s: &str) -> Option<Angle> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.parse().ok()?, q.parse().ok()?);
            (q != 0).then(|| Angle::new(p, q))
        }
        None => Some(Angle::from_integer(s.parse().ok()?)),
    }
}

impl DiscDiagram {
    /// Builds a diagram from faces with per-corner angles; the boundary is
    /// derived.
    pub fn from_faces(
        vertices: Vec<DiagramVertex>,
        faces: Vec<Vec<usize>>,
        angles: Option<Vec<Vec<Angle>>>,
    ) -> Result<Self, DiagramError> {
        let mut corners = Vec::new();
        if let Some(angles) = angles {
            for (f, (face, a)) in faces.iter().zip(&angles).enumerate() {
                if face.len() != a.len() {
                    return Err(DiagramError::Malformed(format!("face {f} has {} angles", a.len())));
                }
                for (&vertex, &angle) in face.iter().zip(a) {
                    corners.push(Corner { vertex, face: f, angle });
                }
            }
        }
        let mut d = DiscDiagram { vertices, faces, corners, ..Default::default() };
        d.boundary = d.derive_boundary()?;
        d.validate()?;
        Ok(d)
    }

    /// Plain vertices named `v0, v1, ...`.
    pub fn plain_vertices(n: usize) -> Vec<DiagramVertex> {
        (0..n)
            .map(|i| DiagramVertex { name: format!("v{i}"), kind: None, label: None, mark: false })
            .collect()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Edges with the faces containing them.
    fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            for i in 0..face.len() {
                let (u, v) = (face[i], face[(i + 1) % face.len()]);
                out.entry((u.min(v), u.max(v))).or_default().push(f);
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edge_faces().len()
    }

    pub fn faces_share_edge(&self, f: usize, g: usize) -> bool {
        self.edge_faces().values().any(|fs| fs.contains(&f) && fs.contains(&g))
    }

    fn check_faces(&self) -> Result<(), DiagramError> {
        let bad = |m: String| DiagramError::Malformed(m);
        if self.faces.is_empty() {
            return Err(bad("no faces".into()));
        }
        for (f, face) in self.faces.iter().enumerate() {
            let distinct: HashSet<_> = face.iter().collect();
            if face.len() < 3 || distinct.len() != face.len() {
                return Err(bad(format!("face {f} needs at least 3 distinct corners")));
            }
            if face.iter().any(|&v| v >= self.vertices.len()) {
                return Err(bad(format!("face {f} uses an unknown vertex")));
            }
        }
        Ok(())
    }

    fn derive_boundary(&self) -> Result<Vec<usize>, DiagramError> {
        self.check_faces()?;
        let bad = |m: String| DiagramError::Malformed(m);
        let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut count = 0;
        for ((u, v), fs) in self.edge_faces() {
            match fs.len() {
                1 => {
                    next.entry(u).or_default().push(v);
                    next.entry(v).or_default().push(u);
                    count += 1;
                }
                2 => {}
                n => return Err(bad(format!("edge {}-{} lies in {n} faces", self.name(u), self.name(v)))),
            }
        }
        if count == 0 {
            return Err(bad("no boundary edges".into()));
        }
        if let Some((v, _)) = next.iter().find(|(_, ns)| ns.len() != 2) {
            return Err(bad(format!("boundary is not a simple cycle at {}", self.name(*v))));
        }
        let start = *next.keys().min().unwrap();
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = *next[&start].iter().min().unwrap();
        while cur != start {
            cycle.push(cur);
            let ns = &next[&cur];
            let n = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = n;
        }
        if cycle.len() != count {
            return Err(bad("boundary has more than one component".into()));
        }
        Ok(cycle)
    }

    fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    /// Disc checks: faces, edge multiplicities, single boundary cycle,
    /// connectivity, Euler characteristic 1 and vertex links that are paths
    /// (boundary) or cycles (interior).
    pub fn validate(&self) -> Result<(), DiagramError> {
        let bad = |m: String| DiagramError::Malformed(m);
        let derived = self.derive_boundary()?;
        if !same_cycle(&derived, &self.boundary) {
            return Err(bad("declared boundary does not match the faces".into()));
        }
        let used: HashSet<usize> = self.faces.iter().flatten().copied().collect();
        if used.len() != self.vertices.len() {
            return Err(bad("isolated vertex".into()));
        }
        let chi = self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64;
        if chi != 1 {
            return Err(bad(format!("Euler characteristic {chi}")));
        }
        // connectivity through shared edges
        let ef = self.edge_faces();
        let mut seen = vec![false; self.faces.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for fs in ef.values().filter(|fs| fs.contains(&f)) {
                for &g in fs {
                    if !seen[g] {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(bad("faces are not connected".into()));
        }
        // the faces around each vertex form a single fan
        let on_boundary: HashSet<usize> = self.boundary.iter().copied().collect();
        for v in 0..self.vertices.len() {
            let mut link: HashMap<usize, Vec<usize>> = HashMap::new();
            for face in &self.faces {
                if let Some(i) = face.iter().position(|&x| x == v) {
                    let (a, b) = (face[(i + face.len() - 1) % face.len()], face[(i + 1) % face.len()]);
                    link.entry(a).or_default().push(b);
                    link.entry(b).or_default().push(a);
                }
            }
            let ends = link.values().filter(|n| n.len() == 1).count();
            let expected_ends = if on_boundary.contains(&v) { 2 } else { 0 };
            let component = link_component(&link);
            if ends != expected_ends || link.values().any(|n| n.len() > 2) || component != link.len() {
                return Err(bad(format!("vertex {} is singular", self.name(v))));
            }
        }
        Ok(())
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary.contains(&v)
    }

    pub fn corners_of_vertex(&self, v: usize) -> impl Iterator<Item = &Corner> {
        self.corners.iter().filter(move |c| c.vertex == v)
    }

    pub fn corners_of_face(&self, f: usize) -> impl Iterator<Item = &Corner> {
        self.corners.iter().filter(move |c| c.face == f)
    }

    /// Faces containing `v`.
    pub fn faces_at(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(&v)).collect()
    }

    /// Removes one corner from the table, leaving the faces untouched.
    pub fn drop_corner(&mut self, index: usize) -> Corner {
        self.corners.remove(index)
    }

    /// Corner table covers every (vertex, face) incidence exactly once.
    pub fn corners_complete(&self) -> bool {
        let table: Vec<(usize, usize)> = self.corners.iter().map(|c| (c.vertex, c.face)).collect();
        let set: HashSet<(usize, usize)> = table.iter().copied().collect();
        let expected: HashSet<(usize, usize)> = self
            .faces
            .iter()
            .enumerate()
            .flat_map(|(f, face)| face.iter().map(move |&v| (v, f)))
            .collect();
        set.len() == table.len() && set == expected
    }

    /// Text form accepted by [`DiscDiagram::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str("vertex ");
            s.push_str(&v.name);
            if let Some(k) = v.kind {
                let _ = write!(s, " type={k}");
            }
            if let Some(m) = v.label {
                let _ = write!(s, " label={m}");
            }
            if v.mark {
                s.push_str(" mark");
            }
            s.push('\n');
        }
        for (f, face) in self.faces.iter().enumerate() {
            s.push_str("face");
            for &v in face {
                let _ = write!(s, " {}", self.name(v));
            }
            let angles: Vec<Option<Angle>> = face
                .iter()
                .map(|&v| self.corners.iter().find(|c| c.face == f && c.vertex == v).map(|c| c.angle))
                .collect();
            if angles.iter().all(|a| a.is_some()) && !self.corners.is_empty() {
                s.push_str(" angles");
                for a in angles.into_iter().flatten() {
                    let _ = write!(s, " {}", frac(a));
                }
            }
            s.push('\n');
        }
        s.push_str("boundary");
        for &v in &self.boundary {
            let _ = write!(s, " {}", self.name(v));
        }
        s.push('\n');
        if let Some(side) = &self.side {
            s.push_str("side");
            for &v in side {
                let _ = write!(s, " {}", self.name(v));
            }
            s.push('\n');
        }
        for a in &self.arrows {
            match a.face1 {
                Some(g) => {
                    let _ = writeln!(s, "arrow f{} f{} {}", a.face0, g, a.k);
                }
                None => {
                    let _ = writeln!(s, "arrow f{} out {}", a.face0, a.k);
                }
            }
        }
        s
    }

    /// Parses the line format
    ///
    /// ```text
    /// vertex v1 type=2 label=3 mark
    /// face v1 x v2 y v3 z angles 1/3 1 1/3 1 1/3 1
    /// boundary v1 x v2 y v3 z
    /// side v1 x v2
    /// arrow f0 f1 -2
    /// arrow f0 out 2
    /// ```
    ///
    /// `angles` may be omitted on every face; `boundary` is optional and
    /// checked when present. Faces are referred to as `f<index>`.
    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let mut d = DiscDiagram::default();
        let mut declared_boundary = None;
        let mut face_angles: Vec<Option<Vec<Angle>>> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let err = |msg: String| DiagramError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut parts = content.split_whitespace();
            let Some(head) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();
            let lookup = |d: &DiscDiagram, n: &str| d.vertex_index(n).ok_or_else(|| err(format!("unknown vertex {n}")));
            let face_ref = |d: &DiscDiagram, n: &str| -> Result<usize, DiagramError> {
                n.strip_prefix('f')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i < d.faces.len())
                    .ok_or_else(|| err(format!("unknown face {n}")))
            };
            match head {
                "vertex" => {
                    let name = rest.first().ok_or_else(|| err("vertex needs a name".into()))?;
                    if d.vertex_index(name).is_some() {
                        return Err(err(format!("duplicate vertex {name}")));
                    }
                    let mut v = DiagramVertex { name: name.to_string(), kind: None, label: None, mark: false };
                    for attr in &rest[1..] {
                        if *attr == "mark" {
                            v.mark = true;
                        } else if let Some(t) = attr.strip_prefix("type=") {
                            v.kind = Some(t.parse().ok().filter(|k| (0..=2).contains(k)).ok_or_else(|| err(format!("bad type {t}")))?);
                        } else if let Some(m) = attr.strip_prefix("label=") {
                            v.label = Some(m.parse().map_err(|_| err(format!("bad label {m}")))?);
                        } else {
                            return Err(err(format!("unknown attribute {attr}")));
                        }
                    }
                    d.vertices.push(v);
                }
                "face" => {
                    let split = rest.iter().position(|&t| t == "angles");
                    let (vs, angles) = match split {
                        Some(i) => (&rest[..i], Some(&rest[i + 1..])),
                        None => (&rest[..], None),
                    };
                    let face = vs.iter().map(|n| lookup(&d, n)).collect::<Result<Vec<_>, _>>()?;
                    let angles = match angles {
                        Some(a) => {
                            if a.len() != face.len() {
                                return Err(err(format!("{} angles for {} corners", a.len(), face.len())));
                            }
                            Some(
                                a.iter()
                                    .map(|s| parse_angle(s).ok_or_else(|| err(format!("bad angle {s}"))))
                                    .collect::<Result<Vec<_>, _>>()?,
                            )
                        }
                        None => None,
                    };
                    d.faces.push(face);
                    face_angles.push(angles);
                }
                "boundary" => {
                    declared_boundary = Some(rest.iter().map(|n| lookup(&d, n)).collect::<Result<Vec<_>, _>>()?);
                }
                "side" => {
                    d.side = Some(rest.iter().map(|n| lookup(&d, n)).collect::<Result<Vec<_>, _>>()?);
                }
                "arrow" => {
                    if rest.len() != 3 {
                        return Err(err("arrow needs two faces and an exponent".into()));
                    }
                    let face0 = face_ref(&d, rest[0])?;
                    let face1 = if rest[1] == "out" { None } else { Some(face_ref(&d, rest[1])?) };
                    let k = rest[2].parse().map_err(|_| err(format!("bad exponent {}", rest[2])))?;
                    d.arrows.push(ArrowSpec { face0, face1, k });
                }
                other => return Err(err(format!("unknown directive {other}"))),
            }
        }
        let with_angles = face_angles.iter().filter(|a| a.is_some()).count();
        if with_angles != 0 && with_angles != face_angles.len() {
            let f = face_angles.iter().position(|a| a.is_none()).unwrap();
            return Err(DiagramError::MissingAngles(f));
        }
        for (f, angles) in face_angles.iter().enumerate() {
            if let Some(a) = angles {
                for (&vertex, &angle) in d.faces[f].iter().zip(a) {
                    d.corners.push(Corner { vertex, face: f, angle });
                }
            }
        }
        d.boundary = d.derive_boundary()?;
        if let Some(b) = declared_boundary {
            if !same_cycle(&b, &d.boundary) {
                return Err(DiagramError::Malformed("declared boundary does not match the faces".into()));
            }
            d.boundary = b;
        }
        d.validate()?;
        Ok(d)
    }

    pub fn has_angles(&self) -> bool {
        !self.corners.is_empty()
    }
}

fn link_component(link: &HashMap<usize, Vec<usize>>) -> usize {
    let Some(&start) = link.keys().next() else { return 0 };
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &link[&x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    let Some(off) = b.iter().position(|&x| x == a[0]) else { return false };
    let forward = (0..n).all(|i| a[i] == b[(off + i) % n]);
    let backward = (0..n).all(|i| a[i] == b[(off + n - i) % n]);
    forward || backward
}

/// `2 − Σ∠c` for interior vertices, `1 − Σ∠c` on the boundary.
pub fn curvature_vertex(d: &DiscDiagram, v: usize) -> Angle {
    let sum: Angle = d.corners_of_vertex(v).map(|c| c.angle).sum();
    let base = if d.is_boundary(v) { 1 } else { 2 };
    Angle::from_integer(base) - sum
}

/// `2 − Σ(1 − ∠c)`.
pub fn curvature_face(d: &DiscDiagram, f: usize) -> Angle {
    let deficit: Angle = d.corners_of_face(f).map(|c| Angle::from_integer(1) - c.angle).sum();
    Angle::from_integer(2) - deficit
}

/// `Σ curv(v) + Σ curv(f) − 2`, evaluated from the corner table.
pub fn gauss_bonnet_residual(d: &DiscDiagram) -> Result<Angle, DiagramError> {
    d.derive_boundary()?;
    let v: Angle = (0..d.vertices.len()).map(|v| curvature_vertex(d, v)).sum();
    let f: Angle = (0..d.faces.len()).map(|f| curvature_face(d, f)).sum();
    Ok(v + f - Angle::from_integer(2))
}

/// Formats an angle as `p/q` (units of `π`).
pub fn format_angle(a: Angle) -> String {
    frac(a)
}
