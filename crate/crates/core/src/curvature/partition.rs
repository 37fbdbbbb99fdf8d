use std::collections::BTreeMap;

use serde::Serialize;

use super::{curvature_face, curvature_vertex, format_angle, Angle, Corner, DiagramError, DiscDiagram};

/// Assigns `π/m` at type 2 corners and `π` at type 1 corners. `labels`
/// overrides the labels stored on the vertices.
pub fn moussong_angles(d: &DiscDiagram, labels: &BTreeMap<usize, u32>) -> Result<DiscDiagram, DiagramError> {
    let mut out = d.clone();
    out.corners.clear();
    for (f, face) in d.faces.iter().enumerate() {
        for &v in face {
            let vx = &d.vertices[v];
            let angle = match vx.kind {
                Some(1) => Angle::from_integer(1),
                Some(2) => {
                    let m = labels
                        .get(&v)
                        .copied()
                        .or(vx.label)
                        .ok_or_else(|| DiagramError::MissingLabel(vx.name.clone()))?;
                    if m < 3 {
                        return Err(DiagramError::BadLabel(vx.name.clone(), m));
                    }
                    out.vertices[v].label = Some(m);
                    Angle::new(1, m as i64)
                }
                _ => return Err(DiagramError::MissingType(vx.name.clone())),
            };
            out.corners.push(Corner { vertex: v, face: f, angle });
        }
    }
    Ok(out)
}

fn ser_angle<S: serde::Serializer>(a: &Angle, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_angle(*a))
}

/// Curvature budgets for a disc bounded by three sides meeting at the marked
/// vertices `v1, v2, v3`, with the sign analysis and its equality case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    /// Sum over polygons containing no marked vertex.
    #[serde(serialize_with = "ser_angle")]
    pub c2_interior: Angle,
    /// Sum over interior type 2 vertices.
    #[serde(serialize_with = "ser_angle")]
    pub c0_interior: Angle,
    /// Sum over unmarked type 2 boundary vertices.
    #[serde(serialize_with = "ser_angle")]
    pub c0_boundary: Angle,
    /// Marked vertices plus the polygons containing them.
    #[serde(serialize_with = "ser_angle")]
    pub c_marked: Angle,
    /// Curvature carried by type 1 vertices (zero for Moussong angles).
    #[serde(serialize_with = "ser_angle")]
    pub type1: Angle,
    #[serde(serialize_with = "ser_angle")]
    pub total: Angle,
    /// Number of polygons containing each marked vertex.
    pub lambda: [usize; 3],
    pub labels: [u32; 3],
    /// Every interior type 2 vertex has angle sum at least `2π`.
    pub interior_precondition: bool,
    /// Every unmarked type 2 boundary vertex has angle sum at least `π`.
    pub boundary_precondition: bool,
    pub c2_interior_nonpositive: bool,
    /// Only asserted under the interior precondition.
    pub c0_interior_nonpositive: bool,
    /// Only asserted under the boundary precondition.
    pub c0_boundary_nonpositive: bool,
    pub c_marked_at_most_two: bool,
    /// `c_marked ≤ 3 − Σλ_i/3`.
    pub c_marked_within_lambda_bound: bool,
    /// Polygons without marked vertices are triangles with all labels 3.
    pub interior_polygons_equilateral: bool,
    pub interior_vertices_flat: bool,
    pub sides_straight: bool,
    pub marks_in_single_polygon: bool,
    pub marked_polygons_triangles: bool,
    pub budgets_maximal: bool,
    /// `total = 2` ⟺ `budgets_maximal`, given the preconditions.
    pub equality_consistent: bool,
    pub violations: Vec<String>,
}

/// Number of non-type-1 corners, i.e. the polygon's corner count in the
/// triangle structure.
fn polygon_sides(d: &DiscDiagram, f: usize) -> usize {
    d.faces[f].iter().filter(|&&v| d.vertices[v].kind != Some(1)).count()
}

fn angle_sum(d: &DiscDiagram, v: usize) -> Angle {
    d.corners_of_vertex(v).map(|c| c.angle).sum()
}

/// Splits the Gauss–Bonnet sum into the four budgets. Marks default to the
/// vertices flagged `mark`.
pub fn proof_partition(d: &DiscDiagram, marks: Option<[usize; 3]>) -> Result<PartitionReport, DiagramError> {
    let marks = match marks {
        Some(m) => m,
        None => {
            let flagged: Vec<usize> = (0..d.vertices.len()).filter(|&v| d.vertices[v].mark).collect();
            <[usize; 3]>::try_from(flagged.as_slice()).map_err(|_| DiagramError::MarkCount(flagged.len()))?
        }
    };
    if marks[0] == marks[1] || marks[0] == marks[2] || marks[1] == marks[2] {
        return Err(DiagramError::MarkCount(2));
    }
    if !d.has_angles() {
        return Err(DiagramError::MissingAngles(0));
    }
    let mut labels = [0u32; 3];
    for (i, &v) in marks.iter().enumerate() {
        let vx = &d.vertices[v];
        if !d.is_boundary(v) || vx.kind != Some(2) {
            return Err(DiagramError::MarkNotOnBoundary(vx.name.clone()));
        }
        labels[i] = vx.label.ok_or_else(|| DiagramError::MissingLabel(vx.name.clone()))?;
    }
    let zero = Angle::from_integer(0);
    let one = Angle::from_integer(1);
    let two = Angle::from_integer(2);

    let marked_faces: Vec<bool> = (0..d.faces.len()).map(|f| marks.iter().any(|m| d.faces[f].contains(m))).collect();
    let mut c2_interior = zero;
    let mut c2_marked = zero;
    let mut interior_polygons_equilateral = true;
    let mut marked_polygons_triangles = true;
    for f in 0..d.faces.len() {
        let c = curvature_face(d, f);
        if marked_faces[f] {
            c2_marked += c;
            marked_polygons_triangles &= polygon_sides(d, f) == 3;
        } else {
            c2_interior += c;
            let equilateral = polygon_sides(d, f) == 3
                && d.corners_of_face(f).all(|c| d.vertices[c.vertex].kind == Some(1) || c.angle == Angle::new(1, 3));
            interior_polygons_equilateral &= equilateral;
        }
    }
    let mut c0_interior = zero;
    let mut c0_boundary = zero;
    let mut c0_marked = zero;
    let mut type1 = zero;
    let mut interior_precondition = true;
    let mut boundary_precondition = true;
    for v in 0..d.vertices.len() {
        let c = curvature_vertex(d, v);
        if d.vertices[v].kind != Some(2) {
            type1 += c;
        } else if marks.contains(&v) {
            c0_marked += c;
        } else if d.is_boundary(v) {
            c0_boundary += c;
            boundary_precondition &= angle_sum(d, v) >= one;
        } else {
            c0_interior += c;
            interior_precondition &= angle_sum(d, v) >= two;
        }
    }
    let c_marked = c0_marked + c2_marked;
    let lambda = marks.map(|m| d.faces_at(m).len());
    let total = c2_interior + c0_interior + c0_boundary + c_marked + type1;
    let lambda_bound = Angle::from_integer(3) - Angle::new(lambda.iter().sum::<usize>() as i64, 3);

    let budgets_maximal = c2_interior == zero && c0_interior == zero && c0_boundary == zero && c_marked == two;
    let preconditions = interior_precondition && boundary_precondition;
    let mut r = PartitionReport {
        c2_interior,
        c0_interior,
        c0_boundary,
        c_marked,
        type1,
        total,
        lambda,
        labels,
        interior_precondition,
        boundary_precondition,
        c2_interior_nonpositive: c2_interior <= zero,
        c0_interior_nonpositive: c0_interior <= zero,
        c0_boundary_nonpositive: c0_boundary <= zero,
        c_marked_at_most_two: c_marked <= two,
        c_marked_within_lambda_bound: c_marked <= lambda_bound,
        interior_polygons_equilateral,
        interior_vertices_flat: c0_interior == zero,
        sides_straight: c0_boundary == zero,
        marks_in_single_polygon: lambda.iter().all(|&l| l == 1),
        marked_polygons_triangles,
        budgets_maximal,
        equality_consistent: !preconditions || ((total == two) == budgets_maximal),
        violations: Vec::new(),
    };
    let mut check = |ok: bool, msg: &str| {
        if !ok {
            r.violations.push(msg.to_string());
        }
    };
    check(r.c2_interior_nonpositive, "interior polygon curvature is positive");
    check(!interior_precondition || r.c0_interior_nonpositive, "interior vertex curvature is positive");
    check(!boundary_precondition || r.c0_boundary_nonpositive, "boundary vertex curvature is positive");
    check(r.c_marked_at_most_two, "marked budget exceeds 2π");
    check(r.c_marked_within_lambda_bound, "marked budget exceeds 3π − Σλπ/3");
    check(r.equality_consistent, "Gauss–Bonnet equality without maximal budgets");
    check(type1 == zero, "type 1 vertices carry curvature");
    // strictness: an interior polygon with more sides or a larger label
    let strict = (0..d.faces.len()).any(|f| {
        !marked_faces[f]
            && (polygon_sides(d, f) > 3
                || d.corners_of_face(f).any(|c| d.vertices[c.vertex].kind == Some(2) && c.angle < Angle::new(1, 3)))
    });
    check(!strict || c2_interior < zero, "interior budget not strictly negative");
    check(r.marks_in_single_polygon || c_marked < two, "marked budget maximal with a mark in two polygons");
    Ok(r)
}
