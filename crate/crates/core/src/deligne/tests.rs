use super::*;
use crate::words::{dihedral_coset_rep, Word};

fn g333() -> PresentationGraph {
    PresentationGraph::complete(&["a", "b", "c"], |_, _| 3)
}

fn g345() -> PresentationGraph {
    PresentationGraph::parse("edge a b 3\nedge a c 4\nedge b c 5").unwrap()
}

fn ball(g: &PresentationGraph, radius: usize) -> ComplexBall {
    build_ball(g, BallConfig { radius, ..Default::default() }).unwrap()
}

fn w(g: &PresentationGraph, s: &str) -> Word {
    Word::parse(g, s).unwrap()
}

fn vid(b: &ComplexBall, rep: &str, gens: &[usize]) -> usize {
    let h = ParabolicHandle::new(w(b.graph(), rep), gens.to_vec());
    b.find(&h).found().unwrap_or_else(|| panic!("{rep} {gens:?} not found"))
}

#[test]
fn radius_zero_is_the_center() {
    let b = ball(&g333(), 0);
    assert_eq!(b.vertex_count(), 1);
    assert_eq!(b.kind(b.center()), 0);
    assert_eq!(b.edge_count(), 0);
}

#[test]
fn radius_one_is_the_fundamental_domain() {
    let b = ball(&g333(), 1);
    assert_eq!(b.vertex_count(), 7);
    assert_eq!(b.edge_count(), 12);
    assert_eq!(b.triangle_count(), 6);
    let link = b.link(b.center()).unwrap();
    assert_eq!(link.vertices.len(), 6);
    assert_eq!(link.edges.len(), 6);
    // a 6-cycle: connected and every vertex of degree 2
    for v in &link.vertices {
        assert_eq!(link.edges.iter().filter(|(x, y)| x == v || y == v).count(), 2);
    }
    assert!(connected(&link.vertices, &link.edges));
}

#[test]
fn star_of_center_is_the_cone() {
    let b = ball(&g333(), 3);
    let star = b.star(b.center()).unwrap();
    assert_eq!(star.vertices.len(), 7);
    assert_eq!(star.triangles.len(), 6);
}

#[test]
fn type_one_essential_star_is_a_pod() {
    for g in [g333(), g345(), PresentationGraph::complete(&["a", "b", "c", "d"], |_, _| 3)] {
        let b = ball(&g, 3);
        for id in b.interior_of_kind(1) {
            let star = b.essential_star(id).unwrap();
            let gen = b.vertex(id).handle.gens[0];
            assert_eq!(star.vertices.len(), g.degree(gen) + 1);
            assert!(star.vertices.iter().all(|&v| v == id || b.kind(v) == 2));
        }
    }
    let g = g333();
    let b = ball(&g, 3);
    let a = vid(&b, "1", &[0]);
    let star = b.essential_star(a).unwrap();
    let ab = vid(&b, "1", &[0, 1]);
    let ac = vid(&b, "1", &[0, 2]);
    let mut expected = vec![a, ab, ac];
    expected.sort();
    assert_eq!(star.vertices, expected);
}

#[test]
fn dihedral_link_matches_coset_enumeration() {
    let g = g333();
    let b = ball(&g, 3);
    let ab = vid(&b, "1", &[0, 1]);
    let link: BTreeSet<usize> = b.essential_neighbours(ab).collect();
    let mut words = vec![Word::empty()];
    for len in 1..=2 {
        let mut next = Vec::new();
        for u in &words {
            if u.len() != len - 1 {
                continue;
            }
            for l in ["a", "a^-1", "b", "b^-1"] {
                let x = u.concat(&w(&g, l));
                if x.is_freely_reduced() {
                    next.push(x);
                }
            }
        }
        words.extend(next);
    }
    let mut expected = BTreeSet::new();
    for u in &words {
        for gen in [0, 1] {
            let rep = dihedral_coset_rep(3, 0, 1, u, gen);
            expected.insert(vid(&b, &rep.display(&g), &[gen]));
        }
    }
    assert!(expected.is_subset(&link));
    // every type 1 neighbour in the ball has a representative in A_ab
    for &x in &link {
        assert!(b.vertex(x).handle.rep.uses_only(&[0, 1]));
    }
}

#[test]
fn stabilizer_handles() {
    let g = g333();
    let b = ball(&g, 3);
    let ab = vid(&b, "1", &[0, 1]);
    assert_eq!(b.stabilizer_handle(ab), ParabolicHandle::new(Word::empty(), vec![0, 1]));
    let ca = vid(&b, "c", &[0]);
    assert_eq!(b.stabilizer_handle(ca), ParabolicHandle::new(w(&g, "c"), vec![0]));
    let x = vid(&b, "b a", &[]);
    assert_eq!(b.stabilizer_handle(x).kind(), 0);
}

#[test]
fn identifications_are_sound() {
    let g = g333();
    let b = ball(&g, 4);
    assert_eq!(b.stats().unresolved, 0);
    // aba = bab, so these chambers coincide and A_ab is shared with ⟨a⟩, ⟨b⟩
    assert_eq!(vid(&b, "a b a", &[]), vid(&b, "b a b", &[]));
    assert_eq!(vid(&b, "a b", &[0, 1]), vid(&b, "1", &[0, 1]));
    assert_ne!(vid(&b, "c", &[0, 1]), vid(&b, "1", &[0, 1]));
    // b⁻¹ab = aba⁻¹, so b⁻¹aba⟨a⟩ = ab⟨a⟩
    assert_eq!(vid(&b, "a b", &[0]), vid(&b, "b^-1 a b a", &[0]));
    // distinct elements stay distinct
    let reps: HashSet<Word> = b.vertices().iter().map(|v| v.handle.rep.clone()).collect();
    assert!(reps.len() <= b.vertex_count());
    for v in b.vertices() {
        assert!(v.handle.rep.is_freely_reduced());
        assert_eq!(v.depth, v.handle.rep.len() + 1);
    }
}

#[test]
fn representatives_are_shortlex_least_in_the_ball() {
    let g = g333();
    let b = ball(&g, 4);
    // aba has the smaller spelling; bab must not appear as a representative
    let x = vid(&b, "b a b", &[]);
    assert_eq!(b.vertex(x).handle.rep, w(&g, "a b a"));
}

#[test]
fn essential_skeleton_is_bipartite_and_edges_are_inclusions() {
    let g = g345();
    let b = ball(&g, 3);
    for (u, v) in b.edges() {
        let (hu, hv) = (&b.vertex(u).handle, &b.vertex(v).handle);
        assert_ne!(hu.kind(), hv.kind());
        let (small, big) = if hu.kind() < hv.kind() { (hu, hv) } else { (hv, hu) };
        assert!(small.gens.iter().all(|x| big.gens.contains(x)));
        // small ⊂ big as cosets: the small representative lies in the big coset
        assert_eq!(b.same_coset(&big.rep, &small.rep, &big.gens), Some(true));
    }
    for t in b.triangles() {
        assert_eq!([b.kind(t[0]), b.kind(t[1]), b.kind(t[2])], [0, 1, 2]);
        assert!(b.has_edge(t[0], t[1]) && b.has_edge(t[1], t[2]) && b.has_edge(t[0], t[2]));
    }
}

#[test]
fn fixed_sets() {
    let g = g333();
    let b = ball(&g, 3);
    let ab = vid(&b, "1", &[0, 1]);
    let fs = b.fixed_set(&ParabolicHandle::new(Word::empty(), vec![0, 1])).unwrap();
    assert_eq!(fs.vertices, vec![ab]);

    let tree = b.fixed_set(&ParabolicHandle::new(Word::empty(), vec![0])).unwrap();
    assert!(tree.unresolved.is_empty());
    for rep_gens in [("1", vec![0]), ("1", vec![0, 1]), ("1", vec![0, 2])] {
        assert!(tree.vertices.contains(&vid(&b, rep_gens.0, &rep_gens.1)));
    }
    // a fixes aba⟨b⟩ = ba⟨b⟩ because (aba)⁻¹ a (aba) = b
    assert!(tree.vertices.contains(&vid(&b, "b a", &[1])));
    assert!(!tree.vertices.contains(&vid(&b, "a b", &[1])));
    assert!(!tree.vertices.contains(&vid(&b, "1", &[1, 2])));
    assert!(tree.is_acyclic());

    let translated = b.fixed_set(&ParabolicHandle::new(w(&g, "c"), vec![0])).unwrap();
    assert!(translated.is_acyclic());
    for &v in &tree.vertices {
        if let Lookup::Found(cv) = b.translate(&w(&g, "c"), v) {
            assert!(translated.vertices.contains(&cv));
        }
    }
    for &v in &translated.vertices {
        if let Lookup::Found(u) = b.translate(&w(&g, "c^-1"), v) {
            assert!(tree.vertices.contains(&u));
        }
    }
    assert_eq!(b.fixed_set(&ParabolicHandle::new(Word::empty(), vec![])), Err(BallError::TypeZero));
}

#[test]
fn fixed_trees_in_safe_region_are_trees() {
    let g = g345();
    let b = ball(&g, 4);
    for id in b.interior_of_kind(1) {
        let fs = b.fixed_set(&b.stabilizer_handle(id)).unwrap();
        assert!(fs.unresolved.is_empty());
        assert!(fs.is_acyclic(), "cycle in fixed set of {}", b.vertex(id).handle.display(&g));
        let interior: Vec<usize> = fs.vertices.iter().copied().filter(|&v| b.is_interior(v)).collect();
        assert!(!interior.is_empty());
    }
}

#[test]
fn distances() {
    let g = g333();
    let b = ball(&g, 3);
    let ab = vid(&b, "1", &[0, 1]);
    let ac = vid(&b, "1", &[0, 2]);
    let a = vid(&b, "1", &[0]);
    let cab = vid(&b, "c", &[0, 1]);
    assert_eq!(b.combinatorial_distance(ab, ac).unwrap(), BallDistance { distance: Some(2), exact: true });
    assert_eq!(b.combinatorial_distance(a, ab).unwrap().distance, Some(1));
    assert!(b.combinatorial_distance(ab, cab).unwrap().distance.unwrap() > 2);
    assert!(matches!(b.distance_two(ab, ac), DistanceTwo::Yes { via } if via == a));
    assert_eq!(b.distance_two(ab, cab), DistanceTwo::No(DistanceCertificate::SameGenerators));
    assert_eq!(b.combinatorial_distance(b.center(), ab), Err(BallError::NotEssential(0)));
}

#[test]
fn generator_action_preserves_stars() {
    let g = g333();
    let b = ball(&g, 4);
    for s in ["a", "b^-1", "c"] {
        let sw = w(&g, s);
        for v in 0..b.vertex_count() {
            if b.vertex(v).depth > 2 {
                continue;
            }
            let Lookup::Found(sv) = b.translate(&sw, v) else { continue };
            if b.vertex(sv).depth > 2 {
                continue;
            }
            let star = b.star(v).unwrap();
            let moved: BTreeSet<usize> =
                star.vertices.iter().filter_map(|&x| b.translate(&sw, x).found()).collect();
            let target: BTreeSet<usize> = b.star(sv).unwrap().vertices.into_iter().collect();
            if b.kind(v) == 0 {
                assert_eq!(moved, target);
            } else {
                // stars of type 1 and 2 vertices are truncated by the ball
                assert!(moved.iter().all(|x| target.contains(x) || b.vertex(*x).depth >= 4));
            }
        }
    }
}

#[test]
fn json_export_has_stable_fields() {
    let b = ball(&g333(), 1);
    let j = b.to_json();
    let obj = j.as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    for k in ["vertices", "edges", "triangles", "center", "radius", "safe_radius"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(j["vertices"][0]["rep"], "1");
    assert_eq!(j["vertices"].as_array().unwrap().len(), 7);
}

#[test]
fn out_of_scope_graphs_are_rejected() {
    let path = PresentationGraph::parse("edge a b 3\nedge b c 3").unwrap();
    assert!(matches!(build_ball(&path, BallConfig::default()), Err(BallError::OutOfScope(_))));
}
