use std::collections::BTreeSet;

use serde::Serialize;

use super::{ArrowSpec, DiagramError, DiscDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArrowKind {
    /// Points from `from` to `to`; `None` is the reflected face across the
    /// boundary.
    Single { from: Option<usize>, to: Option<usize> },
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub face0: usize,
    pub face1: Option<usize>,
    pub k: i64,
    pub kind: ArrowKind,
}

impl Arrow {
    pub fn is_double(&self) -> bool {
        self.kind == ArrowKind::Double
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ArrowSystem {
    pub arrows: Vec<Arrow>,
}

impl ArrowSystem {
    pub fn between(&self, f: usize, g: usize) -> Option<&Arrow> {
        self.arrows
            .iter()
            .find(|a| (a.face0 == f && a.face1 == Some(g)) || (a.face0 == g && a.face1 == Some(f)))
    }
}

/// Arrows from translate exponents: `g⁻¹h = a^k` gives a single arrow from
/// `g f` to `h f` when `k = 1` (reversed for `k = −1`) and a double arrow
/// when `|k| ≥ 2`.
pub fn arrow_system(d: &DiscDiagram, exponents: &[ArrowSpec]) -> Result<ArrowSystem, DiagramError> {
    let mut arrows = Vec::new();
    for spec in exponents {
        let (f, g) = (spec.face0, spec.face1);
        if let Some(g) = g {
            if f == g || !d.faces_share_edge(f, g) {
                return Err(DiagramError::NotAdjacent(f, g));
            }
        }
        let kind = match spec.k {
            0 => return Err(DiagramError::ZeroExponent(f, g.unwrap_or(usize::MAX))),
            1 => ArrowKind::Single { from: Some(f), to: g },
            -1 => ArrowKind::Single { from: g, to: Some(f) },
            _ => ArrowKind::Double,
        };
        arrows.push(Arrow { face0: f, face1: g, k: spec.k, kind });
    }
    Ok(ArrowSystem { arrows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StripReport {
    /// Faces with a vertex on the side.
    pub strip: Vec<usize>,
    pub across: usize,
    pub all_across_double: bool,
    /// Arrows between adjacent strip faces.
    pub internal: usize,
    pub pass: bool,
    pub violations: Vec<String>,
    /// Only the strip constraint is checked, not the full pattern list.
    pub partial: bool,
}

/// The side must be a run of consecutive boundary vertices.
fn check_side(d: &DiscDiagram, side: &[usize]) -> Result<(), DiagramError> {
    let names = || side.iter().map(|&v| d.vertices[v].name.clone()).collect::<Vec<_>>().join(" ");
    let n = d.boundary.len();
    if side.iter().any(|v| !d.boundary.contains(v)) {
        return Err(DiagramError::NotASide(names()));
    }
    for w in side.windows(2) {
        let i = d.boundary.iter().position(|&x| x == w[0]).unwrap();
        if d.boundary[(i + 1) % n] != w[1] && d.boundary[(i + n - 1) % n] != w[1] {
            return Err(DiagramError::NotASide(names()));
        }
    }
    Ok(())
}

/// If every arrow across `side` is double, every arrow between adjacent
/// faces of the strip around `side` must be single.
pub fn strip_check(d: &DiscDiagram, side: &[usize], arrows: &ArrowSystem) -> Result<StripReport, DiagramError> {
    check_side(d, side)?;
    let strip: Vec<usize> = if side.len() < 2 {
        Vec::new()
    } else {
        (0..d.faces.len()).filter(|&f| d.faces[f].iter().any(|v| side.contains(v))).collect()
    };
    let in_strip: BTreeSet<usize> = strip.iter().copied().collect();
    let across: Vec<&Arrow> =
        arrows.arrows.iter().filter(|a| a.face1.is_none() && in_strip.contains(&a.face0)).collect();
    let all_across_double = across.iter().all(|a| a.is_double());
    let internal: Vec<&Arrow> = arrows
        .arrows
        .iter()
        .filter(|a| a.face1.is_some_and(|g| in_strip.contains(&g)) && in_strip.contains(&a.face0))
        .collect();
    let mut violations = Vec::new();
    if all_across_double && !strip.is_empty() {
        for a in &internal {
            if a.is_double() {
                violations.push(format!("double arrow between strip faces f{} and f{}", a.face0, a.face1.unwrap()));
            }
        }
    }
    Ok(StripReport {
        strip,
        across: across.len(),
        all_across_double,
        internal: internal.len(),
        pass: violations.is_empty(),
        violations,
        partial: true,
    })
}
