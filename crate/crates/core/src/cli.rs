//! Command-line front end. `run` maps outcomes to exit codes: 0 success,
//! 1 property or validation failure, 2 usage or input-format error, 3 guard
//! exceeded.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::MedianAlgebra;
use crate::bitset::PointSet;
use crate::duality::{
    double_dual, medianize, wall_space_of, zero_completion, WallSpace, DEFAULT_CONVEX_SET_GUARD, DEFAULT_POINT_GUARD,
    DEFAULT_WALL_GUARD,
};
use crate::error::Error;
use crate::generators::{Generated, GeneratorSpec};
use crate::halfspaces::HalfspaceSystem;
use crate::harness::{self, Instance, InstanceData, Status, SuiteOptions, DEFAULT_SEED};
use crate::io::{self, Document};
use crate::metric::{l1_embed_interval, validate_median_metric, wall_weights, FiniteMedianSpace, WallWeighting};
use crate::rational::Rational;
use crate::report::ValidationReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "medianlab", version, about = "Exact computation on finite median algebras, median spaces and wall spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Input document; `-` or absent reads stdin.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Output file; `-` or absent writes stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for generators and the invariant suite
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Limit on enumerated walls (ultrafilter search) and points
    /// (zero-completion).
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Suppress standard output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the median algebra axioms and the median metric axioms.
    Validate,
    /// List the halfspaces.
    Halfspaces,
    /// Print the rank.
    Rank,
    /// Convex hull of a set of points.
    Hull {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<String>,
    },
    /// Gate of a point in a convex set.
    Gate {
        #[arg(long)]
        point: String,
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<String>,
    },
    /// Minimum chain cover of the halfspaces separating x from y.
    Chains {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Isometric ℓ¹ embedding of the interval I(x,y).
    Embed {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Wall weights of a median space, as a wall space document.
    Weights,
    /// Median space of ultrafilters of a wall space.
    Medianize,
    /// Algebra of all ultrafilters on the halfspace pocset.
    DoubleDual,
    /// Zero-completion at the first point.
    ZeroCompletion,
    /// Emit a generated instance.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the invariant suite on the input, or on the default corpus.
    Check {
        /// Run only this statement.
        #[arg(long)]
        filter: Option<String>,
        /// Include wall-clock times in the scorecard.
        #[arg(long)]
        timings: bool,
    },
    /// Gate projections of staircase corners onto the first step.
    DemoStaircase {
        #[arg(long, default_value_t = 5)]
        k_max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Weighted cube {0,1}^k
    Hypercube {
        k: usize,
        /// Comma-separated edge lengths, one per coordinate.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<Rational>>,
    },
    /// Path on n vertices
    Path {
        n: usize,
        /// Comma-separated edge lengths.
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<Rational>>,
    },
    /// Star with unit legs
    Star {
        legs: usize,
    },
    /// Random tree with random edge lengths (uses --seed)
    Tree {
        nodes: usize,
    },
    /// Unit grid of rows × cols vertices
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Corners of the k-step staircase and their median closure
    Staircase {
        k: usize,
    },
    /// Median closure of m random points of the weighted n-cube (uses --seed)
    Random {
        n: usize,
        m: usize,
    },
    /// Three points with three unit walls
    Tripod,
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard { .. } => EXIT_GUARD,
        Error::Syntax { .. } | Error::Schema { .. } | Error::Version { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// What a subcommand produced: text for `--format text`, a document for
/// `--format json`, and its exit code.
struct Output {
    text: String,
    json: Document,
    code: i32,
}

impl Output {
    /// `json` is the payload of a report document.
    fn ok(text: String, json: Value) -> Self {
        Output { text, json: Document::Report(json), code: EXIT_OK }
    }

    /// A document is emitted as such in both formats.
    fn document(doc: Document) -> Self {
        Output { text: io::emit(&doc), json: doc, code: EXIT_OK }
    }
}

struct Session<'a> {
    global: &'a Global,
    stdin: &'a mut dyn Read,
}

impl Session<'_> {
    fn read_document(&mut self) -> Result<Document, Failure> {
        let mut text = String::new();
        match self.global.input.as_deref() {
            None | Some("-") => {
                self.stdin.read_to_string(&mut text).map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
            }
            Some(path) => text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))?,
        }
        Ok(io::parse(&text)?)
    }

    fn read_space(&mut self) -> Result<FiniteMedianSpace, Failure> {
        space_of(self.read_document()?)
    }

    fn wall_guard(&self) -> usize {
        self.global.guard.unwrap_or(DEFAULT_WALL_GUARD)
    }

    fn seed(&self) -> u64 {
        self.global.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn space_of(doc: Document) -> Result<FiniteMedianSpace, Failure> {
    match doc {
        Document::Algebra(table) => {
            let algebra = MedianAlgebra::new(table)?;
            let walls = HalfspaceSystem::new(&algebra).walls().len();
            Ok(crate::metric::metric_from_weights(&algebra, &WallWeighting(vec![Rational::one(); walls]))?)
        }
        Document::MedianSpace { labels, dist, table: None } => Ok(FiniteMedianSpace::from_metric(labels, dist)?),
        Document::MedianSpace { dist, table: Some(t), .. } => Ok(FiniteMedianSpace::new(MedianAlgebra::new(t)?, dist)?),
        other => Err(Failure::Lib(Error::Schema {
            field: "kind".into(),
            message: format!("expected algebra or median_space, got {}", other.kind()),
        })),
    }
}

fn point(alg: &MedianAlgebra, label: &str) -> Result<usize, Failure> {
    alg.find(label).ok_or_else(|| Failure::Usage(format!("unknown point {label:?}")))
}

fn point_set(alg: &MedianAlgebra, labels: &[String]) -> Result<PointSet, Failure> {
    let ids = labels.iter().map(|l| point(alg, l)).collect::<Result<Vec<_>, _>>()?;
    Ok(alg.set_of(ids))
}

fn braces(names: Vec<&str>) -> String {
    format!("{{{}}}", names.join(","))
}

fn report_json(labels: &[String], report: &ValidationReport) -> Value {
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| {
            let witness: Vec<&str> = f.witness.iter().filter_map(|&i| labels.get(i).map(String::as_str)).collect();
            json!({"axiom": f.axiom, "witness": witness, "detail": f.detail})
        })
        .collect();
    json!({"valid": report.is_ok(), "failures": failures})
}

fn report_text(labels: &[String], report: &ValidationReport) -> String {
    let mut out = String::new();
    for f in &report.failures {
        let witness: Vec<&str> = f.witness.iter().filter_map(|&i| labels.get(i).map(String::as_str)).collect();
        out.push_str(&format!("FAIL {} ({}): {}\n", f.axiom, witness.join(", "), f.detail));
    }
    out
}

fn validate_cmd(doc: Document) -> Result<Output, Failure> {
    let (labels, mut report) = match &doc {
        Document::Algebra(t) => (t.labels().to_vec(), crate::algebra::validate(t)),
        Document::MedianSpace { labels, dist, table } => {
            let mut r = validate_median_metric(labels, dist);
            if let Some(t) = table {
                r.merge(crate::algebra::validate(t));
            }
            (labels.clone(), r)
        }
        Document::WallSpace(w) => (w.labels().to_vec(), ValidationReport::new()),
        Document::Report(_) => return Err(Failure::Usage("cannot validate a report".into())),
    };
    if report.is_ok() {
        if let Err(Failure::Lib(Error::Validation(r))) = match doc {
            Document::WallSpace(_) => Ok(()),
            d => space_of(d).map(|_| ()),
        } {
            report = r;
        }
    }
    let mut text = report_text(&labels, &report);
    if report.is_ok() {
        text.push_str(&format!("valid: {} points\n", labels.len()));
    }
    Ok(Output {
        text,
        json: Document::Report(report_json(&labels, &report)),
        code: if report.is_ok() { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn halfspaces_cmd(space: &FiniteMedianSpace) -> Output {
    let alg = space.algebra();
    let sys = HalfspaceSystem::new(alg);
    let mut text = String::new();
    let mut list = Vec::new();
    for (i, h) in sys.halfspaces().iter().enumerate() {
        let side = alg.names(&h.side);
        text.push_str(&format!("h{i} wall {} {}\n", h.wall, braces(side.clone())));
        list.push(json!({"index": i, "wall": h.wall, "complement": h.complement, "side": side}));
    }
    Output::ok(text, json!({"halfspaces": list, "walls": sys.walls().len()}))
}

fn chains_cmd(space: &FiniteMedianSpace, x: &str, y: &str) -> Result<Output, Failure> {
    let alg = space.algebra();
    let (x, y) = (point(alg, x)?, point(alg, y)?);
    let sys = HalfspaceSystem::new(alg);
    let d = sys.dilworth_decompose(x, y);
    let side = |h: usize| braces(alg.names(&sys.halfspace(h).side));
    let mut text = String::new();
    for (i, c) in d.chains.iter().enumerate() {
        let sides: Vec<String> = c.iter().map(|&h| side(h)).collect();
        text.push_str(&format!("chain {i}: {}\n", sides.join(" ⊂ ")));
    }
    text.push_str(&format!("width {}\n", d.width()));
    let json = json!({
        "chains": d.chains,
        "antichain": d.antichain,
        "width": d.width(),
        "rank": sys.rank(),
    });
    Ok(Output::ok(text, json))
}

fn embed_cmd(space: &FiniteMedianSpace, x: &str, y: &str) -> Result<Output, Failure> {
    let alg = space.algebra();
    let (x, y) = (point(alg, x)?, point(alg, y)?);
    let sys = HalfspaceSystem::new(alg);
    let weights = wall_weights(space)?;
    let e = l1_embed_interval(space, &sys, &weights, x, y)?;
    let labels: Vec<&str> = e.points.iter().map(|&p| alg.label(p)).collect();
    let coords: Vec<Vec<String>> = e.coordinates.iter().map(|c| c.iter().map(Rational::to_string).collect()).collect();
    let mut text = String::new();
    for (l, c) in labels.iter().zip(&coords) {
        text.push_str(&format!("{l}: ({})\n", c.join(", ")));
    }
    Ok(Output::ok(text, json!({"points": labels, "coordinates": coords, "chains": e.chains})))
}

fn zero_completion_cmd(space: &FiniteMedianSpace, point_guard: usize) -> Result<Output, Failure> {
    let alg = space.algebra();
    let z = zero_completion(alg, point_guard, DEFAULT_CONVEX_SET_GUARD)?;
    let intervals: Vec<Vec<&str>> = z.intervals.iter().map(|i| alg.names(i)).collect();
    let tuples: Vec<Vec<&str>> = z.tuples.iter().map(|t| t.iter().map(|&p| alg.label(p)).collect()).collect();
    let text = format!("zero-completion: {} points, rank {}, isomorphic to the input\n", z.tuples.len(), z.rank);
    Ok(Output::ok(text, json!({"points": z.tuples.len(), "rank": z.rank, "intervals": intervals, "tuples": tuples})))
}

fn family_spec(family: &Family, seed: u64) -> GeneratorSpec {
    match family {
        Family::Hypercube { k, weights } => GeneratorSpec::Hypercube { k: *k, weights: weights.clone() },
        Family::Path { n, lengths } => GeneratorSpec::Path { n: *n, lengths: lengths.clone() },
        Family::Star { legs } => GeneratorSpec::Star { legs: *legs },
        Family::Tree { nodes } => GeneratorSpec::RandomTree { nodes: *nodes, seed },
        Family::Grid { rows, cols } => GeneratorSpec::Grid { rows: *rows, cols: *cols },
        Family::Staircase { k } => GeneratorSpec::Staircase { k: *k },
        Family::Random { n, m } => GeneratorSpec::RandomSubalgebra { n: *n, m: *m, seed },
        Family::Tripod => GeneratorSpec::Tripod,
    }
}

fn instance_of(doc: Document) -> Result<Instance, Failure> {
    let data = match doc {
        Document::Algebra(t) => InstanceData::Table(t),
        Document::MedianSpace { labels, dist, table } => InstanceData::Metric { labels, dist, table },
        Document::WallSpace(w) => InstanceData::Walls(w),
        Document::Report(_) => return Err(Failure::Usage("cannot check a report".into())),
    };
    Ok(Instance::new("input", data))
}

fn check_cmd(session: &mut Session, filter: Option<String>, timings: bool) -> Result<Output, Failure> {
    let seed = session.seed();
    let corpus = if session.global.input.is_some() {
        vec![instance_of(session.read_document()?)?]
    } else {
        harness::default_corpus(seed)?
    };
    if let Some(f) = &filter {
        if !harness::REGISTRY.iter().any(|s| s.id == f) {
            return Err(Failure::Usage(format!("unknown statement {f:?}")));
        }
    }
    let options = SuiteOptions {
        seed,
        filter,
        wall_guard: session.wall_guard(),
        point_guard: session.global.guard.unwrap_or(DEFAULT_POINT_GUARD),
        ..SuiteOptions::default()
    };
    let card = harness::run_suite(&corpus, &options);
    let code = if card.count(Status::Fail) > 0 {
        EXIT_FAILURE
    } else if card.count(Status::Skipped) > 0 && card.entries.iter().any(|e| e.witness.as_deref().is_some_and(|w| w.contains("exceeds guard"))) {
        EXIT_GUARD
    } else {
        EXIT_OK
    };
    Ok(Output { text: card.to_text(), json: Document::Report(card.to_value(timings)), code })
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let mut session = Session { global: &cli.global, stdin };
    let guard = session.wall_guard();
    Ok(match &cli.command {
        Command::Validate => validate_cmd(session.read_document()?)?,
        Command::Halfspaces => halfspaces_cmd(&session.read_space()?),
        Command::Rank => {
            let r = HalfspaceSystem::new(session.read_space()?.algebra()).rank();
            Output::ok(format!("{r}\n"), json!({"rank": r}))
        }
        Command::Hull { points } => {
            let space = session.read_space()?;
            let alg = space.algebra();
            let hull = alg.convex_hull(&point_set(alg, points)?);
            let names = alg.names(&hull);
            Output::ok(format!("{}\n", braces(names.clone())), json!({"hull": names}))
        }
        Command::Gate { point: p, set } => {
            let space = session.read_space()?;
            let alg = space.algebra();
            let g = alg.gate(point(alg, p)?, &point_set(alg, set)?)?;
            Output::ok(format!("{}\n", alg.label(g)), json!({"gate": alg.label(g)}))
        }
        Command::Chains { x, y } => chains_cmd(&session.read_space()?, x, y)?,
        Command::Embed { x, y } => embed_cmd(&session.read_space()?, x, y)?,
        Command::Weights => Output::document(Document::WallSpace(wall_space_of(&session.read_space()?)?)),
        Command::Medianize => {
            let walls: WallSpace = match session.read_document()? {
                Document::WallSpace(w) => w,
                other => wall_space_of(&space_of(other)?)?,
            };
            Output::document(Document::from_space(&medianize(&walls, guard)?.space))
        }
        Command::DoubleDual => {
            let space = session.read_space()?;
            let dd = double_dual(space.algebra(), guard)?;
            Output::document(Document::Algebra(dd.algebra.table().clone()))
        }
        Command::ZeroCompletion => {
            let space = session.read_space()?;
            zero_completion_cmd(&space, cli.global.guard.unwrap_or(DEFAULT_POINT_GUARD))?
        }
        Command::Generate { family } => match family_spec(family, session.seed()).build()? {
            Generated::Space(s) => Output::document(Document::from_space(&s)),
            Generated::Walls(w) => Output::document(Document::WallSpace(w)),
        },
        Command::Check { filter, timings } => check_cmd(&mut session, filter.clone(), *timings)?,
        Command::DemoStaircase { k_max } => {
            let demo = harness::demo_staircase(*k_max)?;
            let mut text = String::new();
            for (k, corner, gate) in &demo.rows {
                text.push_str(&format!("k={k} {corner} -> {gate}\n"));
            }
            text.push_str(&format!("stable from k={}\n", demo.stable_from));
            Output::ok(text, demo.to_value())
        }
    })
}

fn write_output(global: &Global, body: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match global.output.as_deref() {
        None | Some("-") => {
            if !global.quiet {
                stdout.write_all(body.as_bytes()).map_err(|e| Failure::Usage(format!("writing output: {e}")))?;
            }
        }
        Some(path) => fs::write(path, body).map_err(|e| Failure::Usage(format!("writing {path}: {e}")))?,
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = execute(&cli, stdin).and_then(|out| {
        let body = match cli.global.format {
            Format::Text => out.text,
            Format::Json => io::emit(&out.json),
        };
        write_output(&cli.global, &body, stdout)?;
        Ok(out.code)
    });
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::Validation(r) = &e {
                let _ = writeln!(stderr, "{r}");
            }
            exit_code(&e)
        }
    }
}
