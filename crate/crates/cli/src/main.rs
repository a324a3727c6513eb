//! `codecraft`: build planar BB codes, deform them to measure logical
//! operators, paint storages, compute distances and plan logical schedules.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use codecraft_core::bb::bundled_spec;
use codecraft_core::pipeline::{paint_measurement, Session, Shape, Target, REPORT_SCHEMA_VERSION};
use codecraft_core::schedule::{plan, verify, LogicalId, Network, OracleReport, PlanRequest, Schedule};
use codecraft_core::{
    build_planar_bb, css_distance, optimize_basis, render_svg, CssCode, DistanceReport, Error, Measurement, Pauli,
    PlanarBBSpec, Result, SearchConfig, Side,
};

#[derive(Parser)]
#[command(name = "codecraft", version, about = "Code craft for planar bivariate-bicycle codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a configuration and report its parameters.
    Build(Opts),
    /// Build the deformed code that measures `--target`.
    Craft(Opts),
    /// Craft, then paint the storages to `--dth`.
    Paint(Opts),
    /// Distance of the base code.
    Distance(Opts),
    /// Logical basis suited to two-block measurements.
    Basis(Opts),
    /// Plan a CNOT, transfer or measurement over a network of deformed
    /// codes (`--config` names the network file).
    Plan(Opts),
    /// Draw the code, or the deformed code for `--target`, as SVG.
    Render(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Code configuration (JSON). A bundled code can be named by its file
    /// stem, e.g. `codes/54.json` or `54`.
    #[arg(long)]
    config: PathBuf,
    /// Logical operator such as `X0`, `Z1Z2` or `X0,X1` (two blocks); for
    /// `plan`, `cnot:C,T,A`, `transfer:S,T` or `measure:X:B.I`.
    #[arg(long)]
    target: Option<String>,
    /// Ancilla size of the intermediate code.
    #[arg(long)]
    ancilla: Option<usize>,
    /// Boundary to move; defaults to left for X and bottom for Z.
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    /// Painting threshold.
    #[arg(long)]
    dth: Option<usize>,
    /// Randomized search rounds.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Top,
    Bottom,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
            SideArg::Top => Side::Top,
            SideArg::Bottom => Side::Bottom,
        }
    }
}

impl Opts {
    fn search(&self) -> SearchConfig {
        let mut s = SearchConfig::default();
        if let Some(b) = self.budget {
            s.budget = b;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    fn spec(&self) -> Result<PlanarBBSpec> {
        load_spec(&self.config)
    }

    fn target(&self) -> Result<Target> {
        self.target
            .as_deref()
            .ok_or_else(|| Error::Config("--target is required".into()))?
            .parse()
    }

    fn session(&self) -> Result<Session> {
        let spec = self.spec()?;
        if spec.separations.is_some() {
            eprintln!("choosing the logical basis for {}", self.config.display());
        }
        Session::new(spec, &self.search())
    }

    fn shape(&self, session: &Session, target: &Target) -> Result<Shape> {
        session.shape(target, self.ancilla, self.side.map(Side::from))
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(&text)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn load_spec(path: &Path) -> Result<PlanarBBSpec> {
    match std::fs::read_to_string(path) {
        Ok(text) => PlanarBBSpec::from_json(&text),
        Err(e) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            bundled_spec(stem).ok_or(Error::Io(e))
        }
    }
}

#[derive(Serialize)]
struct BuildReport<'a> {
    schema_version: u32,
    name: &'a str,
    n: usize,
    k: usize,
    x_checks: usize,
    z_checks: usize,
    commuting: bool,
    code: &'a CssCode,
}

#[derive(Serialize)]
struct CraftReport<'a> {
    schema_version: u32,
    target: String,
    shape: Shape,
    ancilla: usize,
    n: usize,
    measurement: &'a Measurement,
}

#[derive(Serialize)]
struct DistanceOut<'a> {
    schema_version: u32,
    name: &'a str,
    n: usize,
    k: usize,
    distance: DistanceReport,
}

#[derive(Serialize)]
struct PlanReport {
    schema_version: u32,
    schedule: Schedule,
    oracle: OracleReport,
}

#[derive(Serialize)]
struct RenderReport {
    schema_version: u32,
    qubits: usize,
    x_checks: usize,
    z_checks: usize,
    gray: usize,
}

/// Algorithmic outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Failed(String),
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Build(o) => {
            let spec = o.spec()?;
            let (code, _) = build_planar_bb(&spec)?;
            if o.format == Format::Svg {
                return svg_out(&o, &code, None);
            }
            o.emit_json(&BuildReport {
                schema_version: REPORT_SCHEMA_VERSION,
                name: &spec.name,
                n: code.n(),
                k: code.logical_count(),
                x_checks: code.h_x.rows(),
                z_checks: code.h_z.rows(),
                commuting: code.validate_css(),
                code: &code,
            })?;
        }
        Command::Craft(o) => {
            let session = o.session()?;
            let target = o.target()?;
            let shape = o.shape(&session, &target)?;
            let m = session.measure(&target, shape)?;
            if o.format == Format::Svg {
                let inter = session.intermediate(&target, shape)?;
                return svg_out(&o, &m.deformed.as_css(), Some(&inter.as_css()));
            }
            o.emit_json(&CraftReport {
                schema_version: REPORT_SCHEMA_VERSION,
                target: target.to_string(),
                shape,
                ancilla: m.intermediate_ancilla,
                n: m.deformed.n(),
                measurement: &m,
            })?;
        }
        Command::Paint(o) => {
            let d_th = o.dth.ok_or_else(|| Error::Config("--dth is required".into()))?;
            let session = o.session()?;
            let target = o.target()?;
            let m = session.measure(&target, o.shape(&session, &target)?)?;
            eprintln!("painting {target} on {} qubits", m.deformed.n());
            let report = paint_measurement(&m, &target, d_th, &o.search())?;
            o.emit_json(&report)?;
            if let Some(f) = report.failure {
                return Ok(Outcome::Failed(f));
            }
        }
        Command::Distance(o) => {
            let spec = o.spec()?;
            let (code, _) = build_planar_bb(&spec)?;
            eprintln!("distance of a code with n = {}", code.n());
            o.emit_json(&DistanceOut {
                schema_version: REPORT_SCHEMA_VERSION,
                name: &spec.name,
                n: code.n(),
                k: code.logical_count(),
                distance: css_distance(&code, &o.search())?,
            })?;
        }
        Command::Basis(o) => {
            let spec = o.spec()?;
            let seps = spec
                .separations
                .clone()
                .ok_or_else(|| Error::Config("configuration has no separations".into()))?;
            let (code, _) = build_planar_bb(&spec)?;
            o.emit_json(&optimize_basis(&code, seps.xx, seps.zz, &o.search())?)?;
        }
        Command::Plan(o) => {
            let net = Network::from_json(&std::fs::read_to_string(&o.config)?)?;
            let request = parse_request(o.target.as_deref().unwrap_or_default())?;
            let schedule = plan(&net, &request)?;
            let oracle = verify(&schedule)?;
            let passed = oracle.passed;
            o.emit_json(&PlanReport { schema_version: REPORT_SCHEMA_VERSION, schedule, oracle })?;
            if !passed {
                return Ok(Outcome::Failed("schedule does not implement the requested operation".into()));
            }
        }
        Command::Render(o) => {
            let spec = o.spec()?;
            let (code, _) = build_planar_bb(&spec)?;
            let (main, ghost) = match o.target {
                Some(_) => {
                    let session = o.session()?;
                    let target = o.target()?;
                    let shape = o.shape(&session, &target)?;
                    let m = session.measure(&target, shape)?;
                    (m.deformed.as_css(), Some(session.intermediate(&target, shape)?.as_css()))
                }
                None => (code, None),
            };
            if o.format == Format::Json {
                let coords = main.coords.as_ref().ok_or_else(|| Error::Render("no coordinates".into()))?;
                let svg = render_svg(coords, ghost.as_ref().and_then(|g| g.coords.as_ref()))?;
                let (qubits, x_checks, z_checks, gray) = codecraft_core::svg::glyph_counts(&svg);
                o.emit_json(&RenderReport { schema_version: REPORT_SCHEMA_VERSION, qubits, x_checks, z_checks, gray })?;
            } else {
                return svg_out(&o, &main, ghost.as_ref());
            }
        }
    }
    Ok(Outcome::Ok)
}

fn svg_out(o: &Opts, code: &CssCode, ghost: Option<&CssCode>) -> Result<Outcome> {
    let coords = code.coords.as_ref().ok_or_else(|| Error::Render("code has no coordinates".into()))?;
    o.emit(&render_svg(coords, ghost.and_then(|g| g.coords.as_ref()))?)?;
    Ok(Outcome::Ok)
}

/// `cnot:C,T,A`, `transfer:S,T` or `measure:X:B.I`.
fn parse_request(s: &str) -> Result<PlanRequest> {
    let bad = || Error::Config(format!("bad plan target `{s}`; use cnot:C,T,A, transfer:S,T or measure:X:B.I"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let ids = |t: &str| t.split(',').map(str::parse).collect::<Result<Vec<LogicalId>>>();
    match kind {
        "cnot" => match ids(rest)?[..] {
            [control, target, ancilla] => Ok(PlanRequest::Cnot { control, target, ancilla }),
            _ => Err(bad()),
        },
        "transfer" => match ids(rest)?[..] {
            [source, target] => Ok(PlanRequest::Transfer { source, target }),
            _ => Err(bad()),
        },
        "measure" => {
            let (p, q) = rest.split_once(':').ok_or_else(bad)?;
            let pauli = match p {
                "X" | "x" => Pauli::X,
                "Z" | "z" => Pauli::Z,
                _ => return Err(bad()),
            };
            Ok(PlanRequest::Measure { qubit: q.parse()?, pauli })
        }
        _ => Err(bad()),
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("CODECRAFT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("CODECRAFT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(msg)) => {
            eprintln!("codecraft: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("codecraft: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
