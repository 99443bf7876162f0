//! Command-line front end: parse diagram, sphere, presentation, move, and
//! certificate files, run the library operations, and emit one structured
//! report per invocation on standard output.
//!
//! Exit codes: 0 verified/OK, 1 FAIL (an invariant or replay check failed),
//! 2 UNKNOWN (budget exhausted), 64 usage or parse error, 66 missing input
//! file.

use bandcalc::acsearch::{ac_search, SearchBudget, SearchOptions, SearchOutcome};
use bandcalc::alexander::{alexander_polynomial, AlexanderError};
use bandcalc::catalog;
use bandcalc::diagrams::{DiagramMove, RibbonPresentation};
use bandcalc::handles::{
    gluck_presentation, handle_counts, verify_product_ball, verify_step2, ClosedSphereSpec,
    HandleKind, ProductBallVerdict,
};
use bandcalc::presentations::{verify_certificate, AcCertificate, AcMove, GroupPresentation};
use bandcalc::triangular::{is_triangular, triangularize};
use bandcalc::undisking::{certify_undisking, UndiskingCertificate, UndiskingOutcome};
use bandcalc::words::Word;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NOINPUT: u8 = 66;

#[derive(Parser)]
#[command(name = "bandcalc", version, about = "Banded-unlink diagram calculus")]
struct Cli {
    /// Render the report for reading instead of as a single JSON line.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for the search engines. Verdicts do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Node budget for searches (accepts scientific notation, e.g. 1e6).
    #[arg(long, value_parser = parse_scientific)]
    max_nodes: Option<usize>,
    /// Total relator/word length roof for searches.
    #[arg(long)]
    max_total_length: Option<usize>,
    /// Longest conjugator word used by one search transition.
    #[arg(long)]
    max_conj: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        let mut b = SearchBudget::default();
        if let Some(n) = self.max_nodes {
            b.max_nodes = n;
        }
        if let Some(l) = self.max_total_length {
            b.max_total_length = l;
        }
        if let Some(c) = self.max_conj {
            b.max_conjugator_length = c;
        }
        b
    }
}

fn parse_scientific(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v.is_finite() && v >= 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format!("out of range: {s}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Structural diagnostics for a diagram or sphere file.
    Validate { file: PathBuf },
    /// Induced group, abelianization, and order ideal of a diagram.
    Invariants { file: PathBuf },
    /// Apply a move script to a diagram.
    Moves {
        #[command(subcommand)]
        action: MovesAction,
    },
    /// Search for an undisking certificate with at most the given passes.
    Undisking {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        bound: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Normalize a one-pass-certified disk into triangular form.
    Triangularize {
        file: PathBuf,
        /// Undisking certificate file ({"passes": [...], "trivialization": [...]}).
        #[arg(long)]
        certificate: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Slide band ends until the band graph is the standard path.
    Pathform { file: PathBuf },
    /// Handle counts for the twisted 4-manifold or the 5-dimensional product.
    Handles {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "gluck4")]
        kind: KindArg,
    },
    /// Induced presentation on the maxima meridians of a sphere spec.
    GluckPres { file: PathBuf },
    /// Certify the product presentation trivializes (constructive ladder or search).
    ProductBall {
        file: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Slide the twist 2-handle over another relator, then search.
    Step2 {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        /// Slide path conjugator as a word JSON, e.g. "[[2,1]]".
        #[arg(long)]
        u: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Search for a relator-move trivialization certificate.
    AcSearch {
        file: PathBuf,
        #[arg(long)]
        m: usize,
        /// Also allow generator stabilization moves.
        #[arg(long)]
        stab: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Replay a certificate against a presentation file.
    AcVerify {
        file: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Built-in example families.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum MovesAction {
    /// Apply a JSON array of tagged diagram moves to a diagram file.
    Apply { file: PathBuf, script: PathBuf },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the built-in entries.
    List,
    /// Emit one entry's payload.
    Get {
        name: String,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Recompute every stored invariant of every entry.
    Verify,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Gluck4,
    Product5,
}

#[derive(Serialize)]
struct Report {
    command: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariants: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<serde_json::Value>,
    diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<serde_json::Value>,
}

impl Report {
    fn new(command: &str, verdict: &'static str) -> Self {
        Report {
            command: command.to_string(),
            verdict,
            invariants: None,
            certificate: None,
            counts: None,
            result: None,
            diagnostics: Vec::new(),
            budget: None,
        }
    }

    fn exit_code(&self) -> u8 {
        match self.verdict {
            "OK" => EXIT_OK,
            "UNKNOWN" => EXIT_UNKNOWN,
            _ => EXIT_FAIL,
        }
    }

    fn emit(&self, pretty: bool) {
        if pretty {
            println!("command:  {}", self.command);
            println!("verdict:  {}", self.verdict);
            for d in &self.diagnostics {
                println!("note:     {}", d);
            }
            for (label, value) in [
                ("invariants", &self.invariants),
                ("counts", &self.counts),
                ("certificate", &self.certificate),
                ("result", &self.result),
                ("budget", &self.budget),
            ] {
                if let Some(v) = value {
                    println!(
                        "{label}:\n{}",
                        serde_json::to_string_pretty(v).expect("serializable")
                    );
                }
            }
        } else {
            println!("{}", serde_json::to_string(self).expect("serializable"));
        }
    }
}

/// Parse failure with a field path, or a missing file.
enum InputError {
    Missing(String),
    Parse(String),
}

impl InputError {
    fn exit(self) -> ExitCode {
        match self {
            InputError::Missing(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_NOINPUT)
            }
            InputError::Parse(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            InputError::Missing(format!("{}: file not found", path.display()))
        } else {
            InputError::Missing(format!("{}: {}", path.display(), e))
        }
    })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de)
        .map_err(|e| InputError::Parse(format!("{}: at {}: {}", path.display(), e.path(), e.inner())))
}

fn from_value<T: serde::de::DeserializeOwned>(
    path: &Path,
    value: serde_json::Value,
) -> Result<T, InputError> {
    serde_path_to_error::deserialize(value).map_err(|e: serde_path_to_error::Error<serde_json::Error>| {
        InputError::Parse(format!(
            "{}: at {}: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}

enum DiagramOrSphere {
    Diagram(RibbonPresentation),
    Sphere(ClosedSphereSpec),
}

fn parse_diagram_or_sphere(path: &Path) -> Result<DiagramOrSphere, InputError> {
    let value = read_json(path)?;
    if value.get("fusion").is_some() {
        Ok(DiagramOrSphere::Sphere(from_value(path, value)?))
    } else {
        Ok(DiagramOrSphere::Diagram(from_value(path, value)?))
    }
}

fn parse_sphere(path: &Path) -> Result<ClosedSphereSpec, InputError> {
    let value = read_json(path)?;
    from_value(path, value)
}

fn parse_presentation(path: &Path) -> Result<GroupPresentation, InputError> {
    let value = read_json(path)?;
    from_value(path, value)
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn invariants_value(p: &RibbonPresentation) -> Result<serde_json::Value, String> {
    let group = p.group().map_err(|e| e.to_string())?;
    let abelian = group.abelian_invariants();
    let alexander = match alexander_polynomial(&group) {
        Ok(delta) => Some(delta),
        Err(AlexanderError::WrongDeficiency { .. }) => None,
        Err(e) => return Err(e.to_string()),
    };
    Ok(serde_json::json!({
        "group": json(&group),
        "abelianization": json(&abelian),
        "alexander": alexander.as_ref().map(json),
    }))
}

fn budget_value(budget: &SearchBudget, outcome: Option<&SearchOutcome>) -> serde_json::Value {
    let mut v = serde_json::json!({
        "max_nodes": budget.max_nodes,
        "max_total_length": budget.max_total_length,
        "max_conjugator_length": budget.max_conjugator_length,
    });
    if let Some(SearchOutcome::Unknown(stats)) = outcome {
        v["nodes_expanded"] = json(&stats.nodes_expanded);
        v["space_exhausted"] = json(&stats.space_exhausted);
    }
    v
}

fn run(cli: &Cli) -> Result<Report, InputError> {
    match &cli.command {
        Command::Validate { file } => {
            let mut report = Report::new("validate", "OK");
            match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => {
                    let diag = d.validate();
                    report.result = Some(json(&diag));
                    if !diag.is_valid() {
                        report.verdict = "FAIL";
                        report.diagnostics = diag.issues.clone();
                    }
                }
                DiagramOrSphere::Sphere(s) => {
                    let diag = s.fusion.validate();
                    let euler = s.euler_check();
                    report.result = Some(serde_json::json!({
                        "fusion": json(&diag),
                        "euler": euler,
                        "standard_fission_shape": s.has_standard_fission_shape(),
                    }));
                    if !diag.is_valid() || !euler {
                        report.verdict = "FAIL";
                        report.diagnostics = diag.issues.clone();
                        if !euler {
                            report
                                .diagnostics
                                .push("band and maxima counts violate the closed-sphere identity".into());
                        }
                    }
                }
            }
            Ok(report)
        }
        Command::Invariants { file } => {
            let mut report = Report::new("invariants", "OK");
            match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => match invariants_value(&d) {
                    Ok(v) => report.invariants = Some(v),
                    Err(e) => {
                        report.verdict = "FAIL";
                        report.diagnostics.push(e);
                    }
                },
                DiagramOrSphere::Sphere(s) => {
                    let gp = gluck_presentation(&s).map_err(|e| InputError::Parse(e.to_string()))?;
                    report.invariants = Some(serde_json::json!({
                        "gluck_presentation": json(&gp),
                        "abelianization": json(&gp.abelian_invariants()),
                    }));
                }
            }
            Ok(report)
        }
        Command::Moves { action } => {
            let MovesAction::Apply { file, script } = action;
            let diagram: RibbonPresentation = match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => d,
                DiagramOrSphere::Sphere(_) => {
                    return Err(InputError::Parse(format!(
                        "{}: move scripts apply to diagrams, not sphere specs",
                        file.display()
                    )))
                }
            };
            let value = read_json(script)?;
            let moves: Vec<DiagramMove> = from_value(script, value)?;
            let mut report = Report::new("moves apply", "OK");
            match diagram.apply_all(&moves) {
                Ok(out) => {
                    report.result = Some(json(&out));
                    report.invariants = invariants_value(&out).ok();
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::Undisking { file, bound, budget } => {
            let diagram = match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => d,
                DiagramOrSphere::Sphere(_) => {
                    return Err(InputError::Parse(format!(
                        "{}: undisking applies to disk diagrams",
                        file.display()
                    )))
                }
            };
            let budget = budget.budget();
            let mut report = Report::new("undisking", "OK");
            report.budget = Some(budget_value(&budget, None));
            match certify_undisking(&diagram, *bound, &budget) {
                Ok(UndiskingOutcome::Certified(cert)) => {
                    report.certificate = Some(json(&cert));
                    report
                        .diagnostics
                        .push(format!("certified with {} passes", cert.passes.len()));
                }
                Ok(UndiskingOutcome::Unknown {
                    alexander_obstruction,
                }) => {
                    report.verdict = "UNKNOWN";
                    if let Some(delta) = alexander_obstruction {
                        report.diagnostics.push(format!(
                            "order ideal {} differs from 1: no pass-free trivialization exists",
                            delta
                        ));
                        report.invariants =
                            Some(serde_json::json!({ "alexander_obstruction": json(&delta) }));
                    }
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::Triangularize {
            file,
            certificate,
            budget,
        } => {
            let diagram = match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => d,
                DiagramOrSphere::Sphere(_) => {
                    return Err(InputError::Parse(format!(
                        "{}: triangularize applies to disk diagrams",
                        file.display()
                    )))
                }
            };
            let value = read_json(certificate)?;
            let cert: UndiskingCertificate = from_value(certificate, value)?;
            let mut report = Report::new("triangularize", "OK");
            match triangularize(&diagram, &cert, &budget.budget()) {
                Ok(form) => {
                    report.result = Some(json(&form.presentation));
                    report.certificate = Some(json(&form.certificate));
                    report
                        .diagnostics
                        .push(format!("triangular: {}", is_triangular(&form.presentation)));
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::Pathform { file } => {
            let diagram = match parse_diagram_or_sphere(file)? {
                DiagramOrSphere::Diagram(d) => d,
                DiagramOrSphere::Sphere(_) => {
                    return Err(InputError::Parse(format!(
                        "{}: pathform applies to disk diagrams",
                        file.display()
                    )))
                }
            };
            let mut report = Report::new("pathform", "OK");
            match diagram.to_path_form() {
                Ok(out) => report.result = Some(json(&out)),
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::Handles { file, kind } => {
            let spec = parse_sphere(file)?;
            let kind = match kind {
                KindArg::Gluck4 => HandleKind::Gluck4,
                KindArg::Product5 => HandleKind::Product5,
            };
            let mut report = Report::new("handles", "OK");
            match handle_counts(&spec, kind) {
                Ok(hs) => {
                    report.counts = Some(json(&hs));
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::GluckPres { file } => {
            let spec = parse_sphere(file)?;
            let mut report = Report::new("gluck-pres", "OK");
            match gluck_presentation(&spec) {
                Ok(gp) => report.result = Some(json(&gp)),
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::ProductBall { file, budget } => {
            let spec = parse_sphere(file)?;
            let budget = budget.budget();
            let mut report = Report::new("product-ball", "OK");
            report.budget = Some(budget_value(&budget, None));
            if let Ok(hs) = handle_counts(&spec, HandleKind::Product5) {
                report.counts = Some(json(&hs.counts));
            }
            match verify_product_ball(&spec, &budget) {
                Ok(ProductBallVerdict::CertifiedB5(cert)) => {
                    report.result = Some(serde_json::json!({"verdict": "CERTIFIED_B5"}));
                    report.certificate = Some(json(&cert));
                }
                Ok(ProductBallVerdict::Unknown) => {
                    report.verdict = "UNKNOWN";
                    report.result = Some(serde_json::json!({"verdict": "UNKNOWN"}));
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::Step2 {
            file,
            i,
            j,
            u,
            budget,
        } => {
            let spec = parse_sphere(file)?;
            let conjugator = match u {
                Some(text) => serde_json::from_str::<Word>(text)
                    .map_err(|e| InputError::Parse(format!("--u: {e}")))?,
                None => Word::empty(),
            };
            let budget = budget.budget();
            let mut report = Report::new("step2", "OK");
            match verify_step2(&spec, *i, *j, &conjugator, &budget) {
                Ok(SearchOutcome::Certified(cert)) => {
                    report.certificate = Some(json(&cert));
                    report.budget = Some(budget_value(&budget, None));
                }
                Ok(out @ SearchOutcome::Unknown(_)) => {
                    report.verdict = "UNKNOWN";
                    report.budget = Some(budget_value(&budget, Some(&out)));
                }
                Err(e) => {
                    report.verdict = "FAIL";
                    report.diagnostics.push(e.to_string());
                }
            }
            Ok(report)
        }
        Command::AcSearch {
            file,
            m,
            stab,
            budget,
        } => {
            let p = parse_presentation(file)?;
            let budget = budget.budget();
            let options = SearchOptions {
                allow_stabilization: *stab,
            };
            let mut report = Report::new("ac-search", "OK");
            let out = ac_search(&p, *m, &budget, &options);
            report.budget = Some(budget_value(&budget, Some(&out)));
            match out {
                SearchOutcome::Certified(cert) => {
                    report.certificate = Some(json(&cert));
                }
                SearchOutcome::Unknown(_) => {
                    report.verdict = "UNKNOWN";
                }
            }
            Ok(report)
        }
        Command::AcVerify {
            file,
            certificate,
            m,
        } => {
            let p = parse_presentation(file)?;
            let value = read_json(certificate)?;
            let cert: AcCertOrMoves = from_value(certificate, value)?;
            let mut report = Report::new("ac-verify", "OK");
            let ok = match cert {
                AcCertOrMoves::Full(cert) => verify_certificate(&p, &cert, *m),
                AcCertOrMoves::Moves(moves) => {
                    let mut cur = p.clone();
                    let mut ok = true;
                    for mv in &moves {
                        match cur.apply_move(mv) {
                            Ok(next) => cur = next,
                            Err(e) => {
                                report.diagnostics.push(e.to_string());
                                ok = false;
                                break;
                            }
                        }
                    }
                    ok && cur.is_m_trivial(*m)
                }
            };
            if !ok {
                report.verdict = "FAIL";
                report.diagnostics.push("certificate did not verify".into());
            }
            Ok(report)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let mut report = Report::new("catalog list", "OK");
                let names: Vec<serde_json::Value> = catalog::entries()
                    .iter()
                    .map(|e| serde_json::json!({ "name": e.name, "params": e.params }))
                    .collect();
                report.result = Some(serde_json::Value::Array(names));
                Ok(report)
            }
            CatalogAction::Get { name, n } => {
                let mut report = Report::new("catalog get", "OK");
                match catalog::get(name, *n) {
                    Ok(entry) => {
                        report.result = Some(match &entry.payload {
                            catalog::CatalogPayload::Diagram(d) => json(d),
                            catalog::CatalogPayload::Sphere(s) => json(s),
                            catalog::CatalogPayload::Presentation(p) => json(p),
                        });
                    }
                    Err(e) => {
                        report.verdict = "FAIL";
                        report.diagnostics.push(e.to_string());
                    }
                }
                Ok(report)
            }
            CatalogAction::Verify => {
                let mut report = Report::new("catalog verify", "OK");
                for entry in catalog::entries() {
                    if let Err(e) = entry.verify() {
                        report.verdict = "FAIL";
                        report.diagnostics.push(e);
                    }
                }
                if report.verdict == "OK" {
                    report
                        .diagnostics
                        .push(format!("{} entries verified", catalog::entries().len()));
                }
                Ok(report)
            }
        },
    }
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum AcCertOrMoves {
    Full(AcCertificate),
    Moves(Vec<AcMove>),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(&cli) {
        Ok(report) => {
            report.emit(cli.pretty);
            ExitCode::from(report.exit_code())
        }
        Err(e) => e.exit(),
    }
}
