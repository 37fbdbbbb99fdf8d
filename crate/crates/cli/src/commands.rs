use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use artin::automorphisms::{self, random_spec, verify_automorphism_structure, AutomorphismError};
use artin::curvature::{
    arrow_system, curvature_face, curvature_vertex, format_angle, gauss_bonnet_residual, moussong_angles,
    proof_partition, strip_check, Angle, DiagramError, DiscDiagram,
};
use artin::deligne::{build_ball, BallConfig, BallError};
use artin::presentation::{GraphError, PresentationGraph};
use artin::reconstruction::reconstruct;
use artin::words::{Budget, EqualityVerdict, Reducer, StepKind, Word, WordError};

use crate::{BallArgs, CurvatureCommand, RunConfig, WordCommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    /// A negative answer or violations found.
    No = 1,
    Invalid = 2,
    Inconclusive = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
    #[error("{path}: {source}")]
    Diagram { path: PathBuf, source: DiagramError },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error("{0}")]
    Usage(String),
}

pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
    /// Printed on standard error after the report.
    pub diagnostics: Vec<String>,
}

impl Report {
    fn new(text: String, json: Value, status: Status) -> Self {
        Self { text, json, status, diagnostics: Vec::new() }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_graph(path: &Path) -> Result<PresentationGraph, CliError> {
    PresentationGraph::parse(&read(path)?).map_err(|source| CliError::Graph { path: path.to_path_buf(), source })
}

fn load_diagram(path: &Path) -> Result<DiscDiagram, CliError> {
    DiscDiagram::parse(&read(path)?).map_err(|source| CliError::Diagram { path: path.to_path_buf(), source })
}

fn in_scope(graph: &PresentationGraph, path: &Path) -> Result<(), CliError> {
    if graph.validate_class().in_scope {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{}: graph must be complete, large-type, connected and of rank at least 3",
            path.display()
        )))
    }
}

fn budget(c: &RunConfig) -> Budget {
    Budget { max_len: c.max_len as usize, max_states: c.max_states as usize }
}

pub fn validate(path: &Path) -> Result<Report, CliError> {
    let graph = load_graph(path)?;
    let r = graph.validate_class();
    let text = format!(
        "rank {}\nlarge type: {}\nfree of infinity: {}\nrank at least 3: {}\nconnected: {}\nin scope: {}\n",
        r.rank, r.large_type, r.free_of_infinity, r.rank_at_least_3, r.connected, r.in_scope
    );
    let status = if r.in_scope { Status::Ok } else { Status::No };
    Ok(Report::new(text, json!(r), status))
}

pub fn aut_gamma(path: &Path) -> Result<Report, CliError> {
    let graph = load_graph(path)?;
    let maps = graph.graph_automorphisms();
    let shown: Vec<String> = maps.iter().map(|m| m.display(&graph, &graph)).collect();
    let mut text = format!("order {}\n", maps.len());
    for s in &shown {
        writeln!(text, "{s}").unwrap();
    }
    Ok(Report::new(text, json!({ "order": maps.len(), "automorphisms": shown }), Status::Ok))
}

pub fn out_group(path: &Path) -> Result<Report, CliError> {
    let graph = load_graph(path)?;
    let table = automorphisms::out_group(&graph)?;
    let mut text = format!("order {}\n", table.order());
    for (i, (map, inversion)) in table.elements.iter().enumerate() {
        writeln!(text, "{i}: {} inversion^{inversion}", map.display(&graph, &graph)).unwrap();
    }
    text.push_str("table\n");
    for row in &table.table {
        let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(text, "{}", row.join(" ")).unwrap();
    }
    Ok(Report::new(text, table.to_json(&graph), Status::Ok))
}

pub fn iso(first: &Path, second: &Path) -> Result<Report, CliError> {
    let (g, h) = (load_graph(first)?, load_graph(second)?);
    in_scope(&g, first)?;
    in_scope(&h, second)?;
    Ok(match g.labeled_isomorphism(&h) {
        Some(map) => {
            let shown = map.display(&g, &h);
            Report::new(format!("isomorphic\n{shown}\n"), json!({ "isomorphic": true, "mapping": shown }), Status::Ok)
        }
        None => Report::new("not isomorphic\n".into(), json!({ "isomorphic": false }), Status::No),
    })
}

fn ball_config(c: &RunConfig, b: BallArgs) -> BallConfig {
    BallConfig { radius: b.radius, margin: b.margin, budget: budget(c), ..Default::default() }
}

pub fn ball(c: &RunConfig, path: &Path, b: BallArgs) -> Result<Report, CliError> {
    let graph = load_graph(path)?;
    in_scope(&graph, path)?;
    let ball = build_ball(&graph, ball_config(c, b))?;
    let text = format!(
        "radius {}\nsafe radius {}\nvertices {}\nedges {}\ntriangles {}\n",
        ball.radius(),
        ball.safe_radius(),
        ball.vertex_count(),
        ball.edge_count(),
        ball.triangle_count()
    );
    let mut report = Report::new(text, ball.to_json(), Status::Ok);
    report.diagnostics = ball.log().to_vec();
    Ok(report)
}

pub fn verify(c: &RunConfig, path: &Path, b: BallArgs, samples: usize, spec_len: usize) -> Result<Report, CliError> {
    let graph = load_graph(path)?;
    in_scope(&graph, path)?;
    let ball = build_ball(&graph, ball_config(c, b))?;
    let (_, rec) = reconstruct(&ball);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let specs: Vec<_> = (0..samples).map(|_| random_spec(&mut rng, &graph, spec_len)).collect();
    let aut = verify_automorphism_structure(&ball, &specs, budget(c));

    let a = &rec.adjacency_distance;
    let suites: [(&str, &[String]); 6] = [
        ("adjacency distance", &a.violations),
        ("dv1 bijection", &rec.dv1_bijection.violations),
        ("d1 skeleton", &rec.d1_skeleton.violations),
        ("characteristic subgraphs", &rec.characteristic_subgraphs.violations),
        ("complex isomorphism", &rec.complex_isomorphism.violations),
        ("automorphism structure", &aut.violations),
    ];
    let mut text = format!("safe radius {}\n", rec.safe_radius);
    let mut violations = 0;
    for (name, v) in suites {
        violations += v.len();
        writeln!(text, "{}: {name} ({} violations)", if v.is_empty() { "pass" } else { "FAIL" }, v.len()).unwrap();
        for line in v {
            writeln!(text, "  {line}").unwrap();
        }
    }
    writeln!(
        text,
        "adjacency: {} pairs, {} holds, {} fails, {} inconclusive",
        a.checked, a.holds, a.fails, a.inconclusive
    )
    .unwrap();
    writeln!(
        text,
        "automorphisms: {}/{} round trips, {} mixed height, {} undecided",
        aut.round_trips, aut.sample, aut.mixed_height, aut.undecided
    )
    .unwrap();
    let inconclusive = a.inconclusive + rec.dv1_bijection.maximality_inconclusive + aut.undecided;
    let status = if violations > 0 {
        Status::No
    } else if inconclusive > 0 {
        Status::Inconclusive
    } else {
        Status::Ok
    };
    Ok(Report::new(text, json!({ "reconstruction": rec, "automorphisms": aut }), status))
}

fn step_name(kind: &StepKind, graph: &PresentationGraph) -> String {
    match kind {
        StepKind::FreeCancel => "free cancel".into(),
        StepKind::FreeInsert => "free insert".into(),
        StepKind::Dihedral { s, t } => format!("braid {}{}", graph.name(*s), graph.name(*t)),
    }
}

pub fn word(c: &RunConfig, cmd: &WordCommand) -> Result<Report, CliError> {
    match cmd {
        WordCommand::Reduce { graph, word } => {
            let graph = load_graph(graph)?;
            let w = Word::parse(&graph, word)?;
            let r = Reducer::new(&graph).reduce(&w, budget(c));
            let shown = r.word.display(&graph);
            let mut report = Report::new(
                format!("{shown}\n"),
                json!({ "word": shown, "length": r.word.len(), "steps": r.trace.0.len(), "complete": r.complete }),
                Status::Ok,
            );
            if !r.complete {
                report.diagnostics.push("note: search budget ran out; the result may not be shortest".into());
            }
            Ok(report)
        }
        WordCommand::Equal { graph, left, right } => {
            let graph = load_graph(graph)?;
            let (w1, w2) = (Word::parse(&graph, left)?, Word::parse(&graph, right)?);
            Ok(match Reducer::new(&graph).equal(&w1, &w2, budget(c)) {
                EqualityVerdict::Equal(trace) => {
                    let mut text = String::from("equal\n");
                    let mut steps = Vec::new();
                    for step in &trace.0 {
                        let (from, to) = (step.removed.display(&graph), step.inserted.display(&graph));
                        let kind = step_name(&step.kind, &graph);
                        writeln!(text, "  at {}: {from} -> {to} ({kind})", step.at).unwrap();
                        steps.push(json!({ "at": step.at, "removed": from, "inserted": to, "move": kind }));
                    }
                    Report::new(text, json!({ "verdict": "equal", "trace": steps }), Status::Ok)
                }
                EqualityVerdict::Unequal(cert) => Report::new(
                    format!("unequal ({} invariant differs)\n", cert.name()),
                    json!({ "verdict": "unequal", "certificate": cert.name() }),
                    Status::No,
                ),
                EqualityVerdict::Unknown => {
                    Report::new("unknown\n".into(), json!({ "verdict": "unknown" }), Status::Inconclusive)
                }
            })
        }
        WordCommand::Height { graph, word } => {
            let graph = load_graph(graph)?;
            let h = Word::parse(&graph, word)?.height();
            Ok(Report::new(format!("{h}\n"), json!({ "height": h }), Status::Ok))
        }
    }
}

/// Name=label pairs from the command line, resolved to vertex indices.
fn label_overrides(d: &DiscDiagram, raw: &[String]) -> Result<BTreeMap<usize, u32>, CliError> {
    raw.iter()
        .map(|s| {
            let bad = || CliError::Usage(format!("bad label override {s:?}, expected vertex=m"));
            let (name, m) = s.split_once('=').ok_or_else(bad)?;
            let v = d.vertex_index(name.trim()).ok_or_else(|| CliError::Usage(format!("no vertex named {name}")))?;
            Ok((v, m.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn diagram_error(path: &Path, source: DiagramError) -> CliError {
    CliError::Diagram { path: path.to_path_buf(), source }
}

pub fn curvature(cmd: &CurvatureCommand) -> Result<Report, CliError> {
    match cmd {
        CurvatureCommand::Check { diagram } => {
            let mut d = load_diagram(diagram)?;
            if !d.has_angles() {
                d = moussong_angles(&d, &BTreeMap::new()).map_err(|e| diagram_error(diagram, e))?;
            }
            let residual = gauss_bonnet_residual(&d).map_err(|e| diagram_error(diagram, e))?;
            let mut text = String::new();
            let mut vertices = serde_json::Map::new();
            for (v, vertex) in d.vertices.iter().enumerate() {
                let k = format_angle(curvature_vertex(&d, v));
                writeln!(text, "vertex {} {k}", vertex.name).unwrap();
                vertices.insert(vertex.name.clone(), json!(k));
            }
            let faces: Vec<String> = (0..d.faces.len()).map(|f| format_angle(curvature_face(&d, f))).collect();
            for (f, k) in faces.iter().enumerate() {
                writeln!(text, "face {f} {k}").unwrap();
            }
            writeln!(text, "residual {}", format_angle(residual)).unwrap();
            let zero = residual == Angle::from_integer(0);
            let json = json!({ "vertices": vertices, "faces": faces, "residual": format_angle(residual) });
            Ok(Report::new(text, json, if zero { Status::Ok } else { Status::No }))
        }
        CurvatureCommand::Partition { diagram, labels } => {
            let d = load_diagram(diagram)?;
            let overrides = label_overrides(&d, labels)?;
            let d = moussong_angles(&d, &overrides).map_err(|e| diagram_error(diagram, e))?;
            let r = proof_partition(&d, None).map_err(|e| diagram_error(diagram, e))?;
            let mut text = String::new();
            for (name, value) in [
                ("interior polygons", r.c2_interior),
                ("interior vertices", r.c0_interior),
                ("boundary vertices", r.c0_boundary),
                ("marked", r.c_marked),
                ("type 1", r.type1),
                ("total", r.total),
            ] {
                writeln!(text, "{name}: {}", format_angle(value)).unwrap();
            }
            writeln!(text, "lambda: {:?}", r.lambda).unwrap();
            writeln!(text, "budgets maximal: {}", r.budgets_maximal).unwrap();
            for v in &r.violations {
                writeln!(text, "violation: {v}").unwrap();
            }
            let status = if r.violations.is_empty() { Status::Ok } else { Status::No };
            Ok(Report::new(text, json!(r), status))
        }
        CurvatureCommand::Strip { diagram } => {
            let d = load_diagram(diagram)?;
            let side = d
                .side
                .clone()
                .ok_or_else(|| CliError::Usage(format!("{}: diagram declares no side", diagram.display())))?;
            let arrows = arrow_system(&d, &d.arrows).map_err(|e| diagram_error(diagram, e))?;
            let r = strip_check(&d, &side, &arrows).map_err(|e| diagram_error(diagram, e))?;
            let mut text = format!(
                "strip faces {:?}\narrows across {} (all double: {})\narrows inside {}\n",
                r.strip, r.across, r.all_across_double, r.internal
            );
            for v in &r.violations {
                writeln!(text, "violation: {v}").unwrap();
            }
            writeln!(text, "{}", if r.pass { "pass" } else { "fail" }).unwrap();
            let status = if r.pass { Status::Ok } else { Status::No };
            Ok(Report::new(text, json!(r), status))
        }
    }
}
