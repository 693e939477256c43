//! The `gitcurves` command line. Every invocation reads at most one curve
//! document and writes one JSON object to standard output.
//!
//! Exit codes: 0 on success, 1 for malformed flags or input, 2 when a
//! hypothesis of the requested computation does not hold.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gitcurves::{
    basic_inequality, blow_up, census, classify_curve, contract_exceptional, decide, enumerate_multidegrees,
    fiber_strata, BalanceError, BalanceFlavor, BlowUpSelection, CensusKind, CurveDocument, CurveGraph, DecisionError,
    DocumentError, EnumerationError, GitStatus, NecessaryFailure, NecessaryVerdict, PolarizedCurve, Subcurve,
    SurgeryError,
};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "gitcurves", version, about = "GIT stability of polarized curves from their dual graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Curve document to read, or `-` for standard input.
    #[arg(long, global = true, default_value = "-")]
    pub input: String,
    /// Indent the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Drop unknown keys instead of rejecting the document.
    #[arg(long, global = true)]
    pub lenient: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the curve and its multidegree and decide GIT stability.
    Check,
    /// List the multidegrees of a given flavor.
    Enumerate {
        #[arg(long, default_value = "balanced")]
        flavor: BalanceFlavor,
        /// Only multidegrees positive on every component.
        #[arg(long)]
        positive: bool,
        /// Total degree; defaults to the one in the document.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Blow up nodes (by edge index) and cusps of a stable or p-stable curve.
    Blowup {
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
        /// `id=count`, repeatable.
        #[arg(long, value_parser = parse_cusps)]
        cusps: Vec<(String, u32)>,
    },
    /// Contract every exceptional component.
    Contract,
    /// Strata of the compactified Jacobian over a p-stable curve.
    Fiber {
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Stable or p-stable graphs of a given genus, up to isomorphism.
    Census {
        #[arg(long)]
        genus: i64,
        #[arg(long = "type", default_value = "stable")]
        kind: CensusKind,
        #[arg(long)]
        max_vertices: usize,
    },
}

fn parse_cusps(s: &str) -> Result<(String, u32), String> {
    let (id, count) = s.split_once('=').ok_or("expected id=count")?;
    let count = count.parse().map_err(|e| format!("bad count `{count}`: {e}"))?;
    Ok((id.to_string(), count))
}

/// Why an invocation failed, and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Input(String),
    Hypothesis { hypothesis: &'static str, detail: String },
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Hypothesis { .. } => 2,
        }
    }

    fn hypothesis(hypothesis: &'static str, detail: impl ToString) -> Self {
        Failure::Hypothesis {
            hypothesis,
            detail: detail.to_string(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "error: {msg}"),
            Failure::Hypothesis { hypothesis, detail } => {
                write!(f, "error: hypothesis violated ({hypothesis}): {detail}")
            }
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BalanceError> for Failure {
    fn from(e: BalanceError) -> Self {
        match e {
            BalanceError::GenusTooSmall(_) => Failure::hypothesis("arithmetic genus at least 2", e),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<DecisionError> for Failure {
    fn from(e: DecisionError) -> Self {
        match e {
            DecisionError::GenusTooSmall(_) => Failure::hypothesis("arithmetic genus at least 2", e),
            DecisionError::Disconnected => Failure::hypothesis("connected curve", e),
            DecisionError::NonPositiveDegree { .. } => Failure::hypothesis("positive degree on every component", e),
            DecisionError::WrongRegime(_) => Failure::hypothesis("degree range", e),
            DecisionError::Balance(e) => e.into(),
        }
    }
}

impl From<SurgeryError> for Failure {
    fn from(e: SurgeryError) -> Self {
        match e {
            SurgeryError::NotStableOrPStable => Failure::hypothesis("stable or p-stable curve", e),
            SurgeryError::CuspBlowUpNeedsPStable => Failure::hypothesis("p-stable curve", e),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<EnumerationError> for Failure {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::Balance(e) => e.into(),
            EnumerationError::Surgery(e) => e.into(),
            EnumerationError::NotBlowUpBase => Failure::hypothesis("stable or p-stable curve", e),
            EnumerationError::NotPStable => Failure::hypothesis("p-stable curve", e),
            EnumerationError::CensusRange { .. } => Failure::hypothesis("census range", e),
        }
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let out: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(report) => {
            let text = if cli.global.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            }
            .expect("reports serialize");
            let _ = writeln!(stdout, "{text}");
            0
        }
        Err(failure) => {
            let _ = writeln!(stderr, "{failure}");
            failure.code()
        }
    }
}

fn read_document(global: &Global, stdin: &mut dyn Read) -> Result<CurveDocument, Failure> {
    let mut text = String::new();
    if global.input == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
    } else {
        let path = PathBuf::from(&global.input);
        text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(CurveDocument::parse(&text, global.lenient)?)
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Value, Failure> {
    if let Command::Census {
        genus,
        kind,
        max_vertices,
    } = &cli.command
    {
        let graphs = census(*genus, *kind, *max_vertices)?;
        return Ok(json!({
            "genus": genus,
            "type": kind.to_string(),
            "max_vertices": max_vertices,
            "count": graphs.len(),
            "graphs": graphs.iter().map(|g| CurveDocument::from_graph(g).to_value()).collect::<Vec<_>>(),
        }));
    }
    let doc = read_document(&cli.global, stdin)?;
    let graph = doc.to_graph()?;
    match &cli.command {
        Command::Check => check(&doc, graph),
        Command::Enumerate {
            flavor,
            positive,
            degree,
        } => {
            let d = degree_of(&doc, *degree)?;
            let found = enumerate_multidegrees(&graph, d, *flavor, *positive)?;
            Ok(json!({
                "degree": d,
                "flavor": flavor.name(),
                "positive": positive,
                "count": found.len(),
                "multidegrees": found.iter().map(|m| m.to_map(&graph)).collect::<Vec<_>>(),
            }))
        }
        Command::Blowup { nodes, cusps } => {
            let selection = BlowUpSelection {
                nodes: nodes.iter().copied().collect(),
                cusps: cusps.iter().cloned().collect(),
            };
            Ok(CurveDocument::from_graph(&blow_up(&graph, &selection)?).to_value())
        }
        Command::Contract => Ok(CurveDocument::from_graph(&contract_exceptional(&graph)?).to_value()),
        Command::Fiber { degree } => {
            let d = degree_of(&doc, *degree)?;
            let strata = fiber_strata(&graph, d)?;
            Ok(json!({
                "degree": d,
                "count": strata.len(),
                "strata": strata
                    .iter()
                    .map(|s| json!({
                        "model": CurveDocument::from_graph(&s.model).to_value(),
                        "multidegree": s.multidegree.to_map(&s.model),
                    }))
                    .collect::<Vec<_>>(),
            }))
        }
        Command::Census { .. } => unreachable!(),
    }
}

fn degree_of(doc: &CurveDocument, flag: Option<i64>) -> Result<i64, Failure> {
    flag.or_else(|| doc.total_degree())
        .ok_or_else(|| Failure::Input("no degree: pass --degree or give one in the document".into()))
}

fn ids(graph: &CurveGraph, z: Subcurve) -> Vec<&str> {
    graph.subcurve_ids(z)
}

fn necessary(graph: &CurveGraph, verdict: &NecessaryVerdict) -> Value {
    match verdict {
        NecessaryVerdict::PassesNecessary => json!({"passes": true, "failures": []}),
        NecessaryVerdict::FailsNecessary(failures) => json!({
            "passes": false,
            "failures": failures
                .iter()
                .map(|f| match f {
                    NecessaryFailure::NotBalanced { witness } => json!({
                        "reason": f.to_string(),
                        "witness": witness.map(|z| ids(graph, z)),
                    }),
                    NecessaryFailure::TacnodalComponentNotLine { vertex, degree } => json!({
                        "reason": f.to_string(),
                        "vertex": vertex,
                        "degree": degree,
                    }),
                })
                .collect::<Vec<_>>(),
        }),
    }
}

fn check(doc: &CurveDocument, graph: CurveGraph) -> Result<Value, Failure> {
    let g = graph.arithmetic_genus();
    if g < 2 {
        return Err(DecisionError::GenusTooSmall(g).into());
    }
    if !graph.is_connected() {
        return Err(DecisionError::Disconnected.into());
    }
    let Some(pc) = doc.to_polarized()? else {
        // a bare graph: only the curve-level part of the report
        let class = classify_curve(&graph);
        let regime = match doc.degree {
            Some(d) => Some(gitcurves::regime(d, g)?.to_string()),
            None => None,
        };
        return Ok(json!({
            "genus": g,
            "degree": doc.degree,
            "regime": regime,
            "class": class,
        }));
    };
    report(&pc)
}

fn report(pc: &PolarizedCurve) -> Result<Value, Failure> {
    let decision = decide(pc)?;
    let graph = pc.graph();
    let balance = &decision.balance;
    let witness = match balance.witness {
        Some(z) => {
            let c = basic_inequality(pc, z)?;
            json!({
                "subcurve": ids(graph, z),
                "deviation": c.deviation,
                "bound": c.bound,
            })
        }
        None => Value::Null,
    };
    let (status, necessary) = match &decision.status {
        GitStatus::Unknown {
            necessary: Some(verdict),
            ..
        } => (decision.status.name(), necessary(graph, verdict)),
        other => (other.name(), Value::Null),
    };
    Ok(json!({
        "genus": decision.genus,
        "degree": decision.degree,
        "multidegree": pc.multidegree().to_map(graph),
        "regime": decision.regime.to_string(),
        "class": decision.class,
        "flavor": balance.flavor.name(),
        "witness": witness,
        "conditions": {
            "balanced": balance.balanced,
            "exceptional_degrees_one": balance.exceptional_degrees_one,
            "strict_inequalities": balance.strict_inequalities,
            "stable_inequalities": balance.stable_inequalities,
        },
        "status": status,
        "necessary": necessary,
        "geometric_quotient": decision.geometric_quotient,
        "trace": decision.trace,
    }))
}
