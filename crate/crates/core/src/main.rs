use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use psu3_grr::cayley::{export_graph, graph_summary, ExportFormat, GraphSummary};
use psu3_grr::certify::{
    certified_triple, run_certify, run_negative_control_q3, supported_field, RunConfig, Stage, Verdict,
};
use psu3_grr::grouporder::psu3_order;
use psu3_grr::Error;

const EXIT_REFUSAL: u8 = 2;
const EXIT_STAGE_FAILURE: u8 = 3;
const EXIT_INCONSISTENCY: u8 = 4;

/// Builds and certifies cubic graphical regular representations of PSU(3, q).
#[derive(Parser)]
#[command(name = "grr", version, after_help = "GRR_SEED is accepted and ignored: no result depends on randomness.")]
struct Cli {
    /// worker thread cap (defaults to all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// write JSON here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct FieldArgs {
    /// characteristic
    #[arg(long)]
    p: u32,
    /// q = p^f
    #[arg(long)]
    f: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Find the construction parameters (a, b).
    SearchParams(FieldArgs),
    /// Build the three involutions for the first valid parameters.
    Construct(FieldArgs),
    /// Run the certification pipeline.
    Certify {
        #[command(flatten)]
        field: FieldArgs,
        /// stages to run (dependencies are added); default all verdict stages
        #[arg(long = "stage", value_name = "STAGE")]
        stages: Vec<Stage>,
        /// build the explicit graph for q > 5
        #[arg(long)]
        allow_large_graph: bool,
    },
    /// Write the Cayley graph of the certified triple to --out; the summary goes to stdout.
    ExportGraph {
        #[command(flatten)]
        field: FieldArgs,
        /// edge-list or adjacency
        #[arg(long, default_value = "edge-list")]
        format: ExportFormat,
        #[arg(long)]
        allow_large_graph: bool,
    },
    /// Check that no triple of involutions generates PSU(3, 3).
    NegativeControlQ3,
}

#[derive(Serialize)]
struct ExportRecord {
    path: PathBuf,
    format: &'static str,
    #[serde(flatten)]
    summary: GraphSummary,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedQ(_) | Error::NotPrime(_) | Error::FieldTooLarge(..) | Error::PreconditionUnmet(_) => {
            EXIT_REFUSAL
        }
        Error::Inconsistency(_) => EXIT_INCONSISTENCY,
        _ => EXIT_STAGE_FAILURE,
    }
}

fn emit(out: &Option<PathBuf>, value: &impl Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())? + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::GrrConfirmed | Verdict::Incomplete { .. } => 0,
        Verdict::Failed { .. } => EXIT_STAGE_FAILURE,
    }
}

fn run(cli: Cli) -> Result<u8, (u8, String)> {
    let lib = |e: Error| (exit_code(&e), e.to_string());
    let io = |e: String| (EXIT_STAGE_FAILURE, e);
    match cli.command {
        Command::SearchParams(a) => {
            let cert = run_certify(&RunConfig::new(a.p, a.f, &[Stage::Search])).map_err(lib)?;
            match &cert.search {
                Some(s) => emit(&cli.out, s).map_err(io)?,
                None => emit(&cli.out, &cert).map_err(io)?,
            }
            Ok(verdict_code(&cert.verdict))
        }
        Command::Construct(a) => {
            let cert = run_certify(&RunConfig::new(a.p, a.f, &[Stage::Construct])).map_err(lib)?;
            match &cert.construct {
                Some(c) => emit(&cli.out, c).map_err(io)?,
                None => emit(&cli.out, &cert).map_err(io)?,
            }
            Ok(verdict_code(&cert.verdict))
        }
        Command::Certify { field, stages, allow_large_graph } => {
            let mut cfg = RunConfig::new(field.p, field.f, &stages);
            cfg.allow_large_graph = allow_large_graph;
            let cert = run_certify(&cfg).map_err(lib)?;
            emit(&cli.out, &cert).map_err(io)?;
            Ok(verdict_code(&cert.verdict))
        }
        Command::ExportGraph { field, format, allow_large_graph } => {
            let path = cli.out.ok_or((EXIT_REFUSAL, "export-graph requires --out".to_string()))?;
            let fld = supported_field(field.p, field.f).map_err(lib)?;
            let (triple, _) = certified_triple(&fld).map_err(lib)?;
            let (summary, graph) =
                graph_summary(&fld, &triple.mats(), psu3_order(fld.q() as u64), allow_large_graph).map_err(lib)?;
            std::fs::write(&path, export_graph(&graph, format)).map_err(|e| io(format!("{}: {e}", path.display())))?;
            let name = match format {
                ExportFormat::EdgeList => "edge-list",
                ExportFormat::Adjacency => "adjacency",
            };
            emit(&None, &ExportRecord { path, format: name, summary }).map_err(io)?;
            Ok(0)
        }
        Command::NegativeControlQ3 => {
            let report = run_negative_control_q3().map_err(lib)?;
            emit(&cli.out, &report).map_err(io)?;
            Ok(if report.generating_triples == 0 { 0 } else { EXIT_INCONSISTENCY })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("grr: {e}");
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("grr: {msg}");
            ExitCode::from(code)
        }
    }
}
