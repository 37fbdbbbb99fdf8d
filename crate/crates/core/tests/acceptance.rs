//! Acceptance runner. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use artin::automorphisms::{out_group, random_spec, verify_automorphism_structure};
use artin::curvature::generate::{lattice_patch, random_disc};
use artin::curvature::{gauss_bonnet_residual, moussong_angles, proof_partition, Angle};
use artin::deligne::{build_ball, BallConfig, ComplexBall};
use artin::presentation::PresentationGraph;
use artin::reconstruction::reconstruct;
use artin::words::{
    dihedral_equal, naive_dihedral_closure, Budget, EqualityVerdict, Letter, Membership, Reducer, Word,
};

const G333: &str = "edge a b 3\nedge a c 3\nedge b c 3";
const G345: &str = "edge a b 3\nedge a c 4\nedge b c 5";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn graph(text: &str) -> PresentationGraph {
    PresentationGraph::parse(text).expect("sample graph parses")
}

fn k4() -> PresentationGraph {
    PresentationGraph::complete(&["a", "b", "c", "d"], |_, _| 3)
}

fn ball(g: &PresentationGraph) -> ComplexBall {
    build_ball(g, BallConfig { radius: 4, margin: 2, ..Default::default() }).expect("ball builds")
}

fn out_group_orders() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, g, expected) in [("G333", graph(G333), 12), ("G345", graph(G345), 2), ("K4", k4(), 48)] {
        let start = Instant::now();
        let table = match out_group(&g) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let elapsed = start.elapsed();
        let ok = table.order() == expected && table.is_group() && elapsed < Duration::from_secs(1);
        pass &= ok;
        detail.push(format!("{name}={} ({:.0?})", table.order(), elapsed));
    }
    outcome(pass, detail.join(", "))
}

/// Exhaustive search over all vertex bijections.
fn brute_force_isomorphic(g: &PresentationGraph, h: &PresentationGraph) -> bool {
    let n = g.rank();
    if n != h.rank() {
        return false;
    }
    fn search(g: &PresentationGraph, h: &PresentationGraph, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let n = g.rank();
        if perm.len() == n {
            return (0..n).all(|u| (0..n).all(|v| u == v || g.label(u, v) == h.label(perm[u], perm[v])));
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                perm.push(x);
                let found = search(g, h, perm, used);
                perm.pop();
                used[x] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    search(g, h, &mut Vec::new(), &mut vec![false; n])
}

fn labeled_complete(n: usize, labels: &[u32]) -> PresentationGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, labels[k]));
            k += 1;
        }
    }
    PresentationGraph::new(names, &edges).expect("complete graph")
}

fn relabel<R: Rng>(rng: &mut R, g: &PresentationGraph) -> PresentationGraph {
    let n = g.rank();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = g.edges().into_iter().map(|(u, v, m)| (perm[u], perm[v], m)).collect();
    PresentationGraph::new(g.names().to_vec(), &edges).expect("relabelled graph")
}

fn rigidity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut graphs: Vec<PresentationGraph> = Vec::new();
    for code in 0..27u32 {
        let labels: Vec<u32> = (0..3).map(|i| 3 + (code / 3u32.pow(i)) % 3).collect();
        graphs.push(labeled_complete(3, &labels));
    }
    for (n, count) in [(4, 100), (5, 100)] {
        for _ in 0..count {
            let labels: Vec<u32> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(3..=5)).collect();
            graphs.push(labeled_complete(n, &labels));
        }
    }
    let copies: Vec<PresentationGraph> = graphs.iter().map(|g| relabel(&mut rng, g)).collect();
    graphs.extend(copies);

    let (mut pairs, mut positives, mut mismatches) = (0usize, 0usize, 0usize);
    for (i, g) in graphs.iter().enumerate() {
        for h in &graphs[i..] {
            if g.rank() != h.rank() {
                continue;
            }
            pairs += 1;
            let fast = g.labeled_isomorphism(h);
            if let Some(map) = &fast {
                if !map.preserves_labels(g, h) {
                    mismatches += 1;
                }
            }
            let slow = brute_force_isomorphic(g, h);
            positives += slow as usize;
            mismatches += (fast.is_some() != slow) as usize;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("{} graphs, {pairs} pairs, {positives} isomorphic, {mismatches} mismatches ({elapsed:.1?})", graphs.len()),
    )
}

fn adjacency_and_reconstruction(balls: &[(&str, ComplexBall)]) -> (Outcome, Outcome) {
    let (mut adj_pass, mut rec_pass) = (true, true);
    let (mut adj, mut rec) = (Vec::new(), Vec::new());
    for (name, b) in balls {
        let (complex, report) = reconstruct(b);
        let a = &report.adjacency_distance;
        let ok = a.violations.is_empty() && a.inconclusive_rate < 0.2 && a.checked > 0;
        adj_pass &= ok;
        adj.push(format!(
            "{name}: {} pairs, {} holds, {} fails, {:.1}% inconclusive, {} violations",
            a.checked,
            a.holds,
            a.fails,
            100.0 * a.inconclusive_rate,
            a.violations.len()
        ));
        let v = report.dv1_bijection.violations.len()
            + report.d1_skeleton.violations.len()
            + report.characteristic_subgraphs.violations.len()
            + report.complex_isomorphism.violations.len();
        rec_pass &= v == 0 && !complex.subgraphs.is_empty();
        rec.push(format!(
            "{name}: safe radius {}, {} subgraphs, {} triangles, {v} violations",
            report.safe_radius,
            complex.subgraphs.len(),
            complex.triangles.len()
        ));
    }
    (outcome(adj_pass, adj.join("; ")), outcome(rec_pass, rec.join("; ")))
}

fn gauss_bonnet() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let zero = Angle::from_integer(0);
    let (mut bad, mut undetected) = (0, 0);
    for _ in 0..1000 {
        let steps = rng.gen_range(0..20);
        let d = random_disc(&mut rng, steps, 7);
        if gauss_bonnet_residual(&d).map_or(true, |r| r != zero) {
            bad += 1;
        }
        let mut probe = d.clone();
        probe.drop_corner(rng.gen_range(0..d.corners.len()));
        if gauss_bonnet_residual(&probe).map_or(false, |r| r == zero) {
            undetected += 1;
        }
    }
    outcome(bad == 0 && undetected == 0, format!("1000 discs, {bad} nonzero residuals, {undetected} undetected corruptions"))
}

fn budget_signs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let (zero, two) = (Angle::from_integer(0), Angle::from_integer(2));
    let (mut checked, mut failures) = (0, Vec::new());
    while checked < 100 {
        let n = rng.gen_range(1..=5);
        let labels = [rng.gen_range(3..=6), rng.gen_range(3..=6), rng.gen_range(3..=6)];
        let extra = rng.gen_bool(0.5);
        let d = lattice_patch(&mut rng, n, labels, extra);
        let d = moussong_angles(&d, &BTreeMap::new()).expect("lattice labels are set");
        let r = proof_partition(&d, None).expect("three marks");
        if !(r.interior_precondition && r.boundary_precondition) {
            continue;
        }
        checked += 1;
        if !(r.c2_interior <= zero && r.c0_boundary <= zero && r.c_marked <= two && r.violations.is_empty()) {
            failures.push(format!("n={n} labels={labels:?}"));
        }
    }
    let single = {
        let d = lattice_patch(&mut rng, 1, [3, 3, 3], false);
        proof_partition(&moussong_angles(&d, &BTreeMap::new()).unwrap(), None).unwrap()
    };
    let analytic = [single.c2_interior, single.c0_interior, single.c0_boundary, single.c_marked] == [zero, zero, zero, two]
        && single.budgets_maximal
        && single.equality_consistent;
    outcome(
        failures.is_empty() && analytic,
        format!("{checked} patches, {} sign failures, single triangle analytic: {analytic}", failures.len()),
    )
}

fn automorphism_structure(balls: &[(&str, ComplexBall)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, b) in balls {
        let specs: Vec<_> = (0..50).map(|_| {
            let len = rng.gen_range(0..=4);
            random_spec(&mut rng, b.graph(), len)
        }).collect();
        let r = verify_automorphism_structure(b, &specs, Budget::default());
        let ok = r.violations.is_empty() && r.mixed_height == 0 && r.round_trips == r.sample;
        pass &= ok;
        detail.push(format!(
            "{name}: {}/{} round trips, {} mixed height, {} undecided, {} violations",
            r.round_trips,
            r.sample,
            r.mixed_height,
            r.undecided,
            r.violations.len()
        ));
    }
    outcome(pass, detail.join("; "))
}

fn random_word<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Word {
    Word::from_letters((0..len).map(|_| Letter { gen: rng.gen_range(0..rank), inv: rng.gen_bool(0.5) }))
}

/// Inserts a braid relator or a cancelling pair at a random position.
fn perturb<R: Rng>(rng: &mut R, g: &PresentationGraph, w: &Word) -> Word {
    let mut letters = w.letters().to_vec();
    let at = rng.gen_range(0..=letters.len());
    let n = g.rank();
    let s = rng.gen_range(0..n);
    if rng.gen_bool(0.5) {
        let l = Letter { gen: s, inv: rng.gen_bool(0.5) };
        letters.splice(at..at, [l, l.inverse()]);
    } else {
        let t = (s + rng.gen_range(1..n)) % n;
        let m = g.label(s, t).expect("complete graph") as usize;
        let alt = |a: usize, b: usize| (0..m).map(move |i| Letter::pos(if i % 2 == 0 { a } else { b }));
        let relator: Vec<Letter> = alt(s, t).chain(alt(t, s).collect::<Vec<_>>().into_iter().rev().map(Letter::inverse)).collect();
        letters.splice(at..at, relator);
    }
    Word::from_letters(letters)
}

fn oracle_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let budgets = [
        Budget { max_len: 6, max_states: 50 },
        Budget::default(),
        Budget { max_len: 32, max_states: 100_000 },
    ];
    let (mut pairs, mut equal, mut unequal, mut contradictions, mut broken) = (0, 0, 0, 0, 0);
    let mut memberships = 0;
    for g in [graph(G333), graph(G345), k4()] {
        let reducer = Reducer::new(&g);
        for _ in 0..150 {
            let (l1, l2) = (rng.gen_range(0..7), rng.gen_range(0..7));
            let w1 = random_word(&mut rng, g.rank(), l1);
            let w2 = if rng.gen_bool(0.5) { perturb(&mut rng, &g, &w1) } else { random_word(&mut rng, g.rank(), l2) };
            pairs += 1;
            let (mut saw_eq, mut saw_ne) = (false, false);
            for &budget in &budgets {
                match reducer.equal(&w1, &w2, budget) {
                    EqualityVerdict::Equal(trace) => {
                        saw_eq = true;
                        broken += (trace.replay(&g, &w1).as_ref() != Ok(&w2)) as usize;
                    }
                    EqualityVerdict::Unequal(cert) => {
                        saw_ne = true;
                        broken += !reducer.check_certificate(&w1, &w2, &cert) as usize;
                    }
                    EqualityVerdict::Unknown => {}
                }
            }
            equal += saw_eq as usize;
            unequal += saw_ne as usize;
            contradictions += (saw_eq && saw_ne) as usize;

            let gens: Vec<usize> = (0..g.rank()).filter(|_| rng.gen_bool(0.5)).take(2).collect();
            let z = w1.concat(&w2.inverse());
            for &budget in &budgets {
                match reducer.membership(&z, &gens, budget) {
                    Membership::In { witness, trace } => {
                        memberships += 1;
                        broken += (trace.replay(&g, &z).as_ref() != Ok(&witness)) as usize;
                        broken += witness.letters().iter().any(|l| !gens.contains(&l.gen)) as usize;
                    }
                    Membership::NotIn(cert) => {
                        memberships += 1;
                        broken += !reducer.check_membership_certificate(&z, &gens, &cert, budget) as usize;
                    }
                    Membership::Unknown => {}
                }
            }
        }
    }
    outcome(
        contradictions == 0 && broken == 0,
        format!(
            "{pairs} pairs, {equal} equal, {unequal} unequal, {contradictions} contradictions, \
             {memberships} membership verdicts, {broken} unverifiable"
        ),
    )
}

fn dihedral_engine() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let (mut mismatches, mut positives) = (0, 0);
    let sample = |rng: &mut ChaCha8Rng| -> Vec<(bool, bool)> {
        let len = rng.gen_range(0..=5);
        (0..len).map(|_| (rng.gen_bool(0.5), rng.gen_bool(0.5))).collect()
    };
    let to_word = |w: &[(bool, bool)]| Word::from_letters(w.iter().map(|&(t, inv)| Letter { gen: t as usize, inv }));
    for m in [3u32, 4, 5] {
        for i in 0..10_000 {
            let w1 = sample(&mut rng);
            // half the pairs are nudged towards equality by a relation swap
            let w2 = if i % 2 == 0 {
                sample(&mut rng)
            } else {
                let mut w = w1.clone();
                if let Some(k) = (!w.is_empty()).then(|| rng.gen_range(0..w.len())) {
                    let l = w[k];
                    w[k] = (!l.0, l.1);
                    w.insert(k, l);
                    w.insert(k + 2, (l.0, !l.1));
                }
                w.truncate(5);
                w
            };
            let fast = dihedral_equal(m, 0, 1, &to_word(&w1), &to_word(&w2));
            let slow = naive_dihedral_closure(m, &w1, &w2);
            positives += slow as usize;
            mismatches += (fast != slow) as usize;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("30000 pairs, {positives} equal, {mismatches} mismatches ({elapsed:.1?})"),
    )
}

fn main() -> ExitCode {
    let balls = [("G333", ball(&graph(G333))), ("G345", ball(&graph(G345)))];
    let (adjacency, reconstruction) = adjacency_and_reconstruction(&balls);
    let results = [
        ("out-group orders", out_group_orders()),
        ("rigidity against brute force", rigidity()),
        ("adjacency criterion", adjacency),
        ("reconstruction suite", reconstruction),
        ("Gauss-Bonnet", gauss_bonnet()),
        ("curvature budget signs", budget_signs()),
        ("automorphism structure", automorphism_structure(&balls)),
        ("oracle soundness", oracle_soundness()),
        ("dihedral engine", dihedral_engine()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        println!("{} criterion {}: {name}: {}", if r.pass { "PASS" } else { "FAIL" }, i + 1, r.detail);
        failed += !r.pass as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
