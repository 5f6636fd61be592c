use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vindef::certificate::Certificate;
use vindef::checker::{check_certificate_with, DEFAULT_CHECK_EPSILON};
use vindef::diagram::{build_labeled, BuildOptions, Diagram, NumericMode, VectorsFile, DEFAULT_EPSILON};
use vindef::dot::{assignment_from_trace, export_dot_with_header};
use vindef::engine::{propagate, search_total_admissible, Assignment, DeductionStep, Outcome};
use vindef::error::Error;
use vindef::linalg::Vector;
use vindef::localizer::{localize_with, LocalizeOptions};
use vindef::scalar::Scalar;

/// `println!` that exits quietly once stdout is closed, e.g. under `| head`.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }};
}

#[derive(Parser)]
#[command(name = "vindef", version, about = "Build observable diagrams, propagate admissible values, localize value indefiniteness")]
struct Cli {
    /// Numeric backend.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Relative orthogonality tolerance (float mode) or checker tolerance.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Output file, or output directory for `localize`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave the generated-at stamp out of written files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    Contradiction,
    Fixpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Build a diagram from a vectors file (writes diagram.json unless --out is given).
    Build { vectors: PathBuf },
    /// Propagate seed values through a diagram.
    Propagate {
        diagram: PathBuf,
        /// Seed value as <label-or-id>=<0|1>; repeatable.
        #[arg(long = "set", value_name = "KEY=VAL")]
        set: Vec<String>,
        /// Exit 1 unless the outcome matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Enumerate total admissible assignments.
    Search {
        diagram: PathBuf,
        #[arg(long, default_value_t = vindef::engine::DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
    /// Construct a diagram and certificate showing phi is value indefinite given psi.
    Localize {
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// Distance from 1/√2 treated as exactly 1/√2.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Verify a certificate against its diagram.
    Check { diagram: PathBuf, certificate: PathBuf },
    /// Render a diagram, optionally colored by the values a trace establishes.
    Export {
        diagram: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long, value_name = "TRACE")]
        assignment: Option<PathBuf>,
    },
}

enum Fail {
    Semantic(String),
    Usage(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::ContractViolated(_) => Fail::Semantic(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type Run = Result<ExitCode, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Fail::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Run {
    if let Some(eps) = cli.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Fail::Usage(format!("--epsilon must be positive, got {eps}")));
        }
    }
    match &cli.command {
        Command::Build { vectors } => build(cli, vectors),
        Command::Propagate { diagram, set, expect } => propagate_cmd(cli, diagram, set, *expect),
        Command::Search { diagram, cap } => search(diagram, *cap),
        Command::Localize { psi, phi, window, max_iterations } => localize_cmd(cli, psi, phi, *window, *max_iterations),
        Command::Check { diagram, certificate } => check(cli, diagram, certificate),
        Command::Export { diagram, format: Format::Dot, assignment } => export(cli, diagram, assignment.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> Result<Diagram, Fail> {
    Diagram::from_json(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn stamp(cli: &Cli) -> Option<String> {
    (!cli.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

fn diagram_json(cli: &Cli, d: &Diagram) -> Result<String, Fail> {
    let mut file = d.to_file();
    file.generated_at = stamp(cli);
    serde_json::to_string_pretty(&file).map_err(|e| Fail::Usage(e.to_string()))
}

fn build(cli: &Cli, path: &Path) -> Run {
    let text = read(path)?;
    let file = VectorsFile::parse(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    let mode = cli.mode.map(|m| match m {
        ModeArg::Exact => NumericMode::Exact,
        ModeArg::Float => NumericMode::Float,
    });
    let opts = BuildOptions {
        mode: mode.or(file.mode()),
        epsilon: cli.epsilon.or(file.epsilon()).unwrap_or(DEFAULT_EPSILON),
    };
    let (d, report) = build_labeled(&file.entries(), opts)?;
    for (i, j, r) in &report.near_threshold {
        eprintln!("warning: observables {i} and {j} are near-orthogonal (residual {r:e})");
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("diagram.json"));
    write(&out, &diagram_json(cli, &d)?)?;
    out!("{}, {}", plural(d.len(), "observable"), plural(d.contexts().len(), "context"));
    Ok(ExitCode::SUCCESS)
}

fn parse_seed(d: &Diagram, items: &[String]) -> Result<Assignment, Fail> {
    let mut seed = Assignment::new();
    for item in items {
        let (key, val) = item.split_once('=').ok_or_else(|| Fail::Usage(format!("--set expects KEY=VAL, got `{item}`")))?;
        let id = d.resolve(key.trim())?;
        let v = match val.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(Fail::Usage(format!("value must be 0 or 1, got `{other}`"))),
        };
        seed.set(id, v);
    }
    Ok(seed)
}

fn names(d: &Diagram, a: &Assignment, value: u8) -> String {
    a.ids_with(value).into_iter().map(|id| d.display_name(id)).collect::<Vec<_>>().join(" ")
}

fn propagate_cmd(cli: &Cli, path: &Path, set: &[String], expect: Option<Expect>) -> Run {
    let d = load_diagram(path)?;
    let seed = parse_seed(&d, set)?;
    let res = propagate(&d, &seed)?;
    let got = match &res.outcome {
        Outcome::Fixpoint(_) => {
            out!("FIXPOINT");
            Expect::Fixpoint
        }
        Outcome::Contradiction { observable, .. } => {
            out!("CONTRADICTION at observable {observable} ({})", d.display_name(*observable));
            Expect::Contradiction
        }
    };
    let a = res.assignment();
    out!("value 1: {}", names(&d, a, 1));
    out!("value 0: {}", names(&d, a, 0));
    out!("undefined: {}", d.len() - a.len());
    if let Some(out) = &cli.out {
        write(out, &serde_json::to_string_pretty(&res.trace).map_err(|e| Fail::Usage(e.to_string()))?)?;
    }
    match expect {
        Some(want) if want != got => Err(Fail::Semantic("propagation outcome differs from --expect".into())),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn search(path: &Path, cap: usize) -> Run {
    let d = load_diagram(path)?;
    let s = search_total_admissible(&d, cap);
    if s.capped {
        out!("≥{cap} (capped) total admissible assignments");
    } else {
        out!("{} total admissible assignments", s.assignments.len());
    }
    for (i, a) in s.assignments.iter().enumerate() {
        out!("  {}: value 1 on {}", i + 1, names(&d, a, 1));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_vector(text: &str) -> Result<Vector, Fail> {
    let inner = text.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let coords = inner
        .split(',')
        .map(|c| Scalar::parse(c.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail::Usage(format!("vector `{text}`: {e}")))?;
    Ok(Vector::new(coords)?)
}

fn localize_cmd(cli: &Cli, psi: &str, phi: &str, window: Option<f64>, max_iterations: Option<usize>) -> Run {
    if matches!(cli.mode, Some(ModeArg::Exact)) {
        return Err(Fail::Usage("localize needs float mode: its gadgets use square roots outside Q(√2)".into()));
    }
    let (psi, phi) = (parse_vector(psi)?, parse_vector(phi)?);
    let mut opts = LocalizeOptions::default();
    if let Some(e) = cli.epsilon {
        opts.epsilon = e;
    }
    if let Some(w) = window {
        opts.window = w;
    }
    if let Some(m) = max_iterations {
        opts.max_iterations = m;
    }
    let l = match localize_with(&psi, &phi, &opts) {
        Err(Error::DegenerateOverlap { overlap, class }) => {
            out!("overlap: {overlap}");
            out!("value definite: {class:?}");
            return Ok(ExitCode::SUCCESS);
        }
        other => other?,
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Fail::Usage(format!("{}: {e}", dir.display())))?;
    let mut cert = l.certificate.clone();
    cert.generated_at = stamp(cli);
    write(&dir.join("diagram.json"), &diagram_json(cli, &l.diagram)?)?;
    write(&dir.join("certificate.json"), &cert.to_json()?)?;
    out!("overlap: {}", l.certificate.overlap);
    out!("path: {}", l.paths[0]);
    out!("zero-branch path: {}", l.paths[1]);
    out!("{}, {}", plural(l.diagram.len(), "observable"), plural(l.diagram.contexts().len(), "context"));
    for b in &l.certificate.branches {
        out!(
            "branch v(phi)={}: CONTRADICTION at observable {} after {} steps",
            b.assumption.1,
            b.contradiction.0,
            b.trace.len()
        );
    }
    out!("wrote {} and {}", dir.join("diagram.json").display(), dir.join("certificate.json").display());
    Ok(ExitCode::SUCCESS)
}

fn check(cli: &Cli, diagram: &Path, certificate: &Path) -> Run {
    let d = load_diagram(diagram)?;
    let c = Certificate::from_json(&read(certificate)?).map_err(|e| Fail::Usage(format!("{}: {e}", certificate.display())))?;
    let v = check_certificate_with(&d, &c, cli.epsilon.unwrap_or(DEFAULT_CHECK_EPSILON));
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    if v.ok {
        out!("OK (checker epsilon {:e}, diagram epsilon {:e})", v.checker_epsilon, v.diagram_epsilon);
        Ok(ExitCode::SUCCESS)
    } else {
        out!("FAILED");
        for f in &v.failures {
            out!("  {}: {}", f.stage.name(), f.detail);
        }
        Ok(ExitCode::from(1))
    }
}

fn export(cli: &Cli, diagram: &Path, trace: Option<&Path>) -> Run {
    let d = load_diagram(diagram)?;
    let assignment = match trace {
        Some(p) => {
            let steps: Vec<DeductionStep> =
                serde_json::from_str(&read(p)?).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
            if let Some(s) = steps.iter().find(|s| s.conclusion.0 >= d.len()) {
                return Err(Fail::Usage(format!("trace names unknown observable {}", s.conclusion.0)));
            }
            Some(assignment_from_trace(&steps))
        }
        None => None,
    };
    let header = stamp(cli).map(|t| format!("generated_at {t}"));
    let text = export_dot_with_header(&d, assignment.as_ref(), header.as_deref());
    match &cli.out {
        Some(out) => write(out, &text)?,
        None => out!("{}", text.trim_end()),
    }
    Ok(ExitCode::SUCCESS)
}
