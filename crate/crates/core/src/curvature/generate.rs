//! Random well-formed disc diagrams.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;

use super::{Angle, DiagramVertex, DiscDiagram};

/// Grows a disc from a triangle by gluing polygons onto boundary edges and
/// filling boundary ears. Corner angles are arbitrary rationals in `[0, 2]`.
pub fn random_disc<R: Rng>(rng: &mut R, steps: usize, max_sides: usize) -> DiscDiagram {
    let max_sides = max_sides.max(3);
    let mut faces: Vec<Vec<usize>> = vec![vec![0, 1, 2]];
    let mut boundary: Vec<usize> = vec![0, 1, 2];
    let mut edges: HashSet<(usize, usize)> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
    let mut n = 3;
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    for _ in 0..steps {
        let len = boundary.len();
        let i = rng.gen_range(0..len);
        if len >= 4 && rng.gen_bool(0.4) {
            let (u, v, w) = (boundary[(i + len - 1) % len], boundary[i], boundary[(i + 1) % len]);
            if !edges.contains(&key(u, w)) {
                faces.push(vec![u, v, w]);
                edges.insert(key(u, w));
                boundary.remove(i);
                continue;
            }
        }
        let (u, v) = (boundary[i], boundary[(i + 1) % len]);
        let k = rng.gen_range(3..=max_sides);
        let new: Vec<usize> = (n..n + k - 2).collect();
        n += k - 2;
        let mut face = vec![v, u];
        face.extend(&new);
        let mut prev = u;
        for &x in new.iter().chain(std::iter::once(&v)) {
            edges.insert(key(prev, x));
            prev = x;
        }
        faces.push(face);
        for (j, &x) in new.iter().enumerate() {
            boundary.insert(i + 1 + j, x);
        }
    }
    let angles = faces
        .iter()
        .map(|f| {
            f.iter()
                .map(|_| {
                    let q = rng.gen_range(1..=12);
                    Angle::new(rng.gen_range(0..=2 * q), q)
                })
                .collect()
        })
        .collect();
    DiscDiagram::from_faces(DiscDiagram::plain_vertices(n), faces, Some(angles)).expect("grown discs are well-formed")
}

/// A triangular patch of side `n` of the equilateral lattice, in the coarse
/// structure of a Deligne disc: lattice points are type 2 vertices, every
/// lattice edge carries one or more type 1 vertices. The three corners are
/// marked and get labels from `corner_labels`; every other label is 3, so
/// interior angle sums are `2π` and side angle sums are `π`.
pub fn lattice_patch<R: Rng>(rng: &mut R, n: usize, corner_labels: [u32; 3], extra_type1: bool) -> DiscDiagram {
    let n = n.max(1);
    let mut vertices: Vec<DiagramVertex> = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let corners = [(0, 0), (n, 0), (0, n)];
    for i in 0..=n {
        for j in 0..=n - i {
            let c = corners.iter().position(|&p| p == (i, j));
            index.insert((i, j), vertices.len());
            vertices.push(DiagramVertex {
                name: format!("p{i}_{j}"),
                kind: Some(2),
                label: Some(c.map_or(3, |c| corner_labels[c])),
                mark: c.is_some(),
            });
        }
    }
    // type 1 vertices along each lattice edge
    let mut mids: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut edge_path = |a: usize, b: usize, vertices: &mut Vec<DiagramVertex>, rng: &mut R| -> Vec<usize> {
        let key = (a.min(b), a.max(b));
        let path = mids.entry(key).or_insert_with(|| {
            let count = if extra_type1 { rng.gen_range(1..=3) } else { 1 };
            (0..count)
                .map(|t| {
                    vertices.push(DiagramVertex {
                        name: format!("m{}_{}_{t}", key.0, key.1),
                        kind: Some(1),
                        label: None,
                        mark: false,
                    });
                    vertices.len() - 1
                })
                .collect()
        });
        if a < b {
            path.clone()
        } else {
            path.iter().rev().copied().collect()
        }
    };
    let mut faces = Vec::new();
    let mut triangle = |p: [usize; 3], vertices: &mut Vec<DiagramVertex>, rng: &mut R| {
        let mut face = Vec::new();
        for k in 0..3 {
            let (a, b) = (p[k], p[(k + 1) % 3]);
            face.push(a);
            face.extend(edge_path(a, b, vertices, rng));
        }
        faces.push(face);
    };
    for i in 0..n {
        for j in 0..n - i {
            let up = [index[&(i, j)], index[&(i + 1, j)], index[&(i, j + 1)]];
            triangle(up, &mut vertices, rng);
            if i + j + 2 <= n {
                let down = [index[&(i + 1, j)], index[&(i + 1, j + 1)], index[&(i, j + 1)]];
                triangle(down, &mut vertices, rng);
            }
        }
    }
    DiscDiagram::from_faces(vertices, faces, None).expect("lattice patches are discs")
}
