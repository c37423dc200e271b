//! `pathfree`: generate graphs, check and shorten tree-decompositions, run the
//! exhaustive oracles, sweep the diameter bound and scan for good pairs.
//!
//! Exit codes: 0 success, 1 a checked property failed (or no good pair was
//! found), 2 usage or input error.

mod report;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pathfree_core::decomp::{is_linked, is_short, link_witness, validate};
use pathfree_core::embed::{
    find_embedding, good_pair_scan, EqualityOrder, LabeledRootedGraph, Mode, NaturalOrder, QuasiOrder, Respect,
    TrivialOrder,
};
use pathfree_core::families::{generate, FamilySpec};
use pathfree_core::io::{decomposition_to_json, graph_to_json, parse_decomposition, parse_graph, read_graph_lines};
use pathfree_core::multigraph::longest_path_length;
use pathfree_core::oracle::{brute_tree_diameter, brute_treewidth, canonical_code, enumerate_pm_free, OracleLimits};
use pathfree_core::shorten::{apply_plan, diameter_bound, shorten_pass_logged};
use pathfree_core::TreeDecomposition;
use report::{Format, RunReport};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "pathfree", version, about = "Tree-decompositions of graphs without long paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Vertex limit for the exhaustive oracles.
    #[arg(long, global = true)]
    limit_n: Option<usize>,
    /// Multiplicity limit for enumeration.
    #[arg(long, global = true)]
    limit_mult: Option<usize>,
    /// Seed for random families; overrides the seed in the family spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file. `gen` and `shorten` write their artifact here; other
    /// commands write the report.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph, e.g. `star:4`, `cycle:5+path:2`, `random:6,2,3,7`.
    Gen { family: String },
    /// Validate a decomposition and report width, diameter, shortness and linkedness.
    CheckDecomp { graph: PathBuf, decomp: PathBuf },
    /// Apply the diameter reduction to every adhesion value.
    Shorten { graph: PathBuf, decomp: PathBuf },
    /// Exact tree-width.
    Tw {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
    },
    /// Exact tree-diameter.
    Tdi {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
    },
    /// Check tree-width and tree-diameter bounds on every small graph without a path of m edges.
    VerifyBounds {
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 2)]
        mult: usize,
    },
    /// Look for a good pair in a JSON-lines stream of graphs (stdin when no file is given).
    Scan {
        input: Option<PathBuf>,
        #[arg(long, default_value = "subgraph")]
        mode: String,
        /// Comma-separated subset of roots, colors, labels.
        #[arg(long, default_value = "")]
        respect: String,
        /// Order on edge labels.
        #[arg(long, value_enum, default_value_t = LabelOrder::Trivial)]
        order: LabelOrder,
    },
    /// Re-render a saved JSON report.
    Report { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LabelOrder {
    Trivial,
    Natural,
    Equality,
}

impl LabelOrder {
    fn order(self) -> Box<dyn QuasiOrder> {
        match self {
            LabelOrder::Trivial => Box::new(TrivialOrder),
            LabelOrder::Natural => Box::new(NaturalOrder),
            LabelOrder::Equality => Box::new(EqualityOrder),
        }
    }
}

/// What a command produced besides its report.
struct Outcome {
    report: RunReport,
    artifact: Option<String>,
    code: u8,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Outcome { report, artifact: None, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let start = Instant::now();
    let mut out = dispatch(cli)?;
    out.report.duration_ms = start.elapsed().as_millis() as u64;

    match out.artifact {
        Some(artifact) => {
            match &cli.output {
                Some(path) => write_file(path, &artifact)?,
                None => println!("{artifact}"),
            }
            // keep stdout clean for the artifact
            let mut sink: Box<dyn Write> =
                if cli.output.is_some() { Box::new(io::stdout()) } else { Box::new(io::stderr()) };
            out.report.render(cli.format, &mut sink)?;
        }
        None => match &cli.output {
            Some(path) => {
                let mut buf = Vec::new();
                out.report.render(cli.format, &mut buf)?;
                fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            }
            None => out.report.render(cli.format, &mut io::stdout().lock())?,
        },
    }
    Ok(out.code)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

fn limits(cli: &Cli) -> OracleLimits {
    let mut l = OracleLimits::default();
    if let Some(n) = cli.limit_n {
        l.decomposition_n = n;
        l.enumerate_n = n;
        l.treewidth_n = l.treewidth_n.max(n);
    }
    if let Some(m) = cli.limit_mult {
        l.enumerate_mult = m;
    }
    l
}

fn record_limits(report: &mut RunReport, l: &OracleLimits) {
    report.param("limit_n", l.decomposition_n);
    report.param("limit_mult", l.enumerate_mult);
}

fn read_input(report: &mut RunReport, path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn load_graph(report: &mut RunReport, path: &Path) -> Result<LabeledRootedGraph> {
    let text = read_input(report, path)?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_pair(report: &mut RunReport, graph: &Path, decomp: &Path) -> Result<(LabeledRootedGraph, TreeDecomposition)> {
    let g = load_graph(report, graph)?;
    let text = read_input(report, decomp)?;
    let d = parse_decomposition(&text, &g.graph).with_context(|| format!("parsing {}", decomp.display()))?;
    Ok((g, d))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen { family } => gen(cli, family),
        Command::CheckDecomp { graph, decomp } => check_decomp(graph, decomp),
        Command::Shorten { graph, decomp } => shorten(graph, decomp),
        Command::Tw { graphs } => oracle_rows(cli, "tw", graphs, false),
        Command::Tdi { graphs } => oracle_rows(cli, "tdi", graphs, true),
        Command::VerifyBounds { m, nmax, mult } => verify_bounds(cli, *m, *nmax, *mult),
        Command::Scan { input, mode, respect, order } => scan(input.as_deref(), mode, respect, *order),
        Command::Report { input } => {
            let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            Ok(Outcome::ok(RunReport::parse(&text)?))
        }
    }
}

fn reseed(spec: FamilySpec, seed: u64) -> FamilySpec {
    match spec {
        FamilySpec::RandomPmFree { n, mult_max, m, .. } => FamilySpec::RandomPmFree { n, mult_max, m, seed },
        FamilySpec::DisjointUnion(parts) => FamilySpec::DisjointUnion(parts.into_iter().map(|p| reseed(p, seed)).collect()),
        other => other,
    }
}

fn gen(cli: &Cli, family: &str) -> Result<Outcome> {
    let mut spec: FamilySpec = family.parse()?;
    if let Some(seed) = cli.seed {
        spec = reseed(spec, seed);
    }
    let g = generate(&spec)?;
    let mut report = RunReport::new("gen");
    report.param("family", spec.to_string());
    report.outcome = "ok".into();
    report.columns(&["family", "n", "edges", "longest_path"]);
    let longest = if g.is_null() { Value::Null } else { json!(longest_path_length(&g)?) };
    report.row(vec![json!(spec.to_string()), json!(g.vertex_count()), json!(g.edge_count()), longest]);
    Ok(Outcome { report, artifact: Some(graph_to_json(&LabeledRootedGraph::plain(g))), code: 0 })
}

fn check_decomp(graph: &Path, decomp: &Path) -> Result<Outcome> {
    let mut report = RunReport::new("check-decomp");
    let (g, d) = load_pair(&mut report, graph, decomp)?;
    let g = &g.graph;
    report.columns(&["valid", "violation", "width", "diameter", "short", "linked"]);
    match validate(g, &d) {
        Err(v) => {
            report.outcome = "invalid".into();
            report.note("violation", v.to_string());
            report.row(vec![json!(false), json!(v.to_string()), json!(d.width()), json!(d.diameter()), Value::Null, Value::Null]);
            Ok(Outcome { report, artifact: None, code: 1 })
        }
        Ok(()) => {
            let witness = link_witness(g, &d);
            if let Some(w) = &witness {
                let ids = |s: pathfree_core::VertexSet| s.iter().map(|v| g.vertex_id(v).to_string()).collect::<Vec<_>>();
                report.note(
                    "link_witness",
                    json!({
                        "u": d.node_id(w.u).to_string(),
                        "v": d.node_id(w.v).to_string(),
                        "from": ids(w.from),
                        "to": ids(w.to),
                    }),
                );
            }
            report.outcome = "valid".into();
            report.row(vec![
                json!(true),
                Value::Null,
                json!(d.width()),
                json!(d.diameter()),
                json!(is_short(&d)),
                json!(witness.is_none()),
            ]);
            Ok(Outcome::ok(report))
        }
    }
}

fn shorten(graph: &Path, decomp: &Path) -> Result<Outcome> {
    let mut report = RunReport::new("shorten");
    let (g, d) = load_pair(&mut report, graph, decomp)?;
    let (s, plans) = shorten_pass_logged(&g.graph, &d)?;
    report.columns(&["target", "action", "from", "to"]);
    let mut current = d.clone();
    for plan in &plans {
        let target: Vec<String> = plan.target.iter().map(|v| g.graph.vertex_id(v).to_string()).collect();
        let node = |t: usize| json!(current.node_id(t).to_string());
        for id in &plan.deletions {
            let e = current.tree_edges().iter().find(|e| e.id == *id).expect("deleted edge exists");
            report.row(vec![json!(target.clone()), json!("delete"), node(e.ends.0), node(e.ends.1)]);
        }
        for &(w, u) in &plan.additions {
            report.row(vec![json!(target.clone()), json!("add"), node(w), node(u)]);
        }
        current = apply_plan(&current, plan);
    }
    debug_assert_eq!(current, s);
    report.outcome = "ok".into();
    report.note("diameter_before", d.diameter());
    report.note("diameter_after", s.diameter());
    report.note("short", is_short(&s));
    report.note("linked", is_linked(&g.graph, &s));
    Ok(Outcome { report, artifact: Some(decomposition_to_json(&g.graph, &s)), code: 0 })
}

fn oracle_rows(cli: &Cli, name: &str, graphs: &[PathBuf], with_tdi: bool) -> Result<Outcome> {
    let l = limits(cli);
    let mut report = RunReport::new(name);
    record_limits(&mut report, &l);
    if with_tdi {
        report.columns(&["graph", "n", "edges", "tw", "tdi"]);
    } else {
        report.columns(&["graph", "n", "edges", "tw"]);
    }
    for path in graphs {
        let g = load_graph(&mut report, path)?.graph;
        let mut row = vec![json!(path.display().to_string()), json!(g.vertex_count()), json!(g.edge_count())];
        row.push(json!(brute_treewidth(&g, &l)?));
        if with_tdi {
            row.push(json!(brute_tree_diameter(&g, &l)?));
        }
        report.row(row);
    }
    report.outcome = "ok".into();
    Ok(Outcome::ok(report))
}

fn verify_bounds(cli: &Cli, m: u64, nmax: usize, mult: usize) -> Result<Outcome> {
    let l = limits(cli);
    let mut report = RunReport::new("verify-bounds");
    record_limits(&mut report, &l);
    report.param("m", m);
    report.param("nmax", nmax);
    report.param("mult", mult);
    diameter_bound(m, true)?;
    let graphs = enumerate_pm_free(nmax, mult, m as usize, &l)?;
    report.columns(&["graph", "n", "edges", "tw", "tdi", "bound", "connected"]);
    let (mut max_tw, mut max_tdi, mut violations) = (0, 0, Vec::new());
    for g in &graphs {
        let id = hex::encode(canonical_code(g));
        let tw = brute_treewidth(g, &l)?;
        let tdi = brute_tree_diameter(g, &l)?;
        let connected = g.is_connected();
        let bound = diameter_bound(m, connected)?;
        if tw as u64 > m - 1 || tdi as u128 > bound {
            violations.push(json!({"graph": id, "tw": tw, "tdi": tdi}));
        }
        max_tw = max_tw.max(tw);
        max_tdi = max_tdi.max(tdi);
        report.row(vec![
            json!(id),
            json!(g.vertex_count()),
            json!(g.edge_count()),
            json!(tw),
            json!(tdi),
            json!(bound.to_string()),
            json!(connected),
        ]);
    }
    report.note("graphs", graphs.len());
    report.note("max_tw", max_tw);
    report.note("max_tdi", max_tdi);
    report.note("violations", violations.len());
    let code = if violations.is_empty() {
        report.outcome = "verified".into();
        0
    } else {
        report.outcome = "falsified".into();
        report.note("first_violation", violations[0].clone());
        1
    };
    Ok(Outcome { report, artifact: None, code })
}

fn scan(input: Option<&Path>, mode: &str, respect: &str, order: LabelOrder) -> Result<Outcome> {
    let mut report = RunReport::new("scan");
    let mode: Mode = mode.parse()?;
    let respect: Respect = respect.parse()?;
    report.param("mode", mode.to_string());
    report.param("respect", json!({"roots": respect.roots, "colors": respect.colors, "labels": respect.labels}));
    report.param("order", format!("{order:?}").to_lowercase());
    let graphs = match input {
        Some(path) if path != Path::new("-") => {
            let text = read_input(&mut report, path)?;
            read_graph_lines(BufReader::new(text.as_bytes()))?
        }
        _ => read_graph_lines(io::stdin().lock())?,
    };
    let q = order.order();
    report.note("graphs", graphs.len());
    report.columns(&["i", "j", "vertex_map"]);
    match good_pair_scan(&graphs, mode, respect, q.as_ref())? {
        Some(pair) => {
            let (x, y) = (&graphs[pair.i - 1], &graphs[pair.j - 1]);
            let e = find_embedding(x, y, mode, respect, q.as_ref())?.expect("scan found this pair");
            let map: serde_json::Map<String, Value> = e
                .vertex_map
                .iter()
                .enumerate()
                .map(|(a, &b)| (x.graph.vertex_id(a).to_string(), json!(y.graph.vertex_id(b).to_string())))
                .collect();
            report.row(vec![json!(pair.i), json!(pair.j), Value::Object(map)]);
            report.outcome = "found".into();
            Ok(Outcome::ok(report))
        }
        None => {
            report.outcome = "none".into();
            Ok(Outcome { report, artifact: None, code: 1 })
        }
    }
}
