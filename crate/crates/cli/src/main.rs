use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use mcp_core::optimizer::{analyze_timed, sweep_with};
use mcp_core::report::SweepReport;
use mcp_core::{
    parse_edge_list, AnalysisConfig, AnalysisError, DistanceTransform, EdgeFormat, EnsembleMode,
    OutputFormat, RandomizationConfig, RunReport, TieBreak,
};

const EXIT_INPUT: u8 = 1;
const EXIT_NO_PARTITION: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TransformArg {
    SimComplement,
    InverseWeight,
    MaxMinus,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormatArg {
    Whitespace,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieBreakArg {
    HighestIds,
    LowestIds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnsembleArg {
    Shared,
    PerPartition,
}

/// Find the optimal multicore-periphery partition of a weighted network.
#[derive(Debug, Parser)]
#[command(name = "mcp", version)]
struct Args {
    /// Edge list: `label_u label_v [weight]` per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "whitespace")]
    input_format: InputFormatArg,
    #[arg(long, value_enum, default_value = "sim_complement")]
    transform: TransformArg,
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    #[arg(long, default_value_t = 10.0)]
    swap_factor: f64,
    /// Master seed; the MCP_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "highest-ids")]
    tie_break: TieBreakArg,
    #[arg(long, value_enum, default_value = "shared")]
    ensemble: EnsembleArg,
    /// Worker threads for the null ensemble (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Leave stage timings out of the JSON report.
    #[arg(long)]
    no_timing: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("mcp: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(args)
}

fn run(args: Args) -> ExitCode {
    let seed = match std::env::var("MCP_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => v,
            Err(_) => return fail(EXIT_USAGE, format!("MCP_SEED is not an unsigned integer: {s:?}")),
        },
        Err(_) => args.seed,
    };
    let randomization = RandomizationConfig {
        n_replicas: args.replicas,
        swap_factor: args.swap_factor,
        master_seed: seed,
        mode: match args.ensemble {
            EnsembleArg::Shared => EnsembleMode::Shared,
            EnsembleArg::PerPartition => EnsembleMode::PerPartition,
        },
    };
    if let Err(e) = randomization.validate() {
        return fail(EXIT_USAGE, e);
    }
    if args.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build_global()
        {
            return fail(EXIT_USAGE, e);
        }
    }
    let tie_break = match args.tie_break {
        TieBreakArg::HighestIds => TieBreak::HighestIds,
        TieBreakArg::LowestIds => TieBreak::LowestIds,
    };
    let format = match args.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };

    let text = match fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", args.input.display())),
    };
    let edge_format = match args.input_format {
        InputFormatArg::Whitespace => EdgeFormat::Whitespace,
        InputFormatArg::Csv => EdgeFormat::Csv,
    };
    let g = match parse_edge_list(&text, edge_format) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", args.input.display())),
    };

    let transform = match args.transform {
        TransformArg::SimComplement => DistanceTransform::SimComplement,
        TransformArg::InverseWeight => DistanceTransform::InverseWeight,
        TransformArg::MaxMinus => DistanceTransform::MaxMinus,
        TransformArg::Sweep => return run_sweep(&args, &g, &text, randomization, tie_break, format),
    };

    let cfg = AnalysisConfig {
        transform,
        tie_break,
        randomization,
    };
    let (result, timing) = match analyze_timed(&g, &cfg) {
        Ok(r) => r,
        Err(e @ AnalysisError::NoValidPartition) => return fail(EXIT_NO_PARTITION, e),
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let report = RunReport::new(&g, &text, result, (!args.no_timing).then_some(timing));
    if let Err(e) = report.write_outputs(&args.out, format) {
        return fail(EXIT_INPUT, format!("{}: {e}", args.out.display()));
    }
    println!("{}", report.summary());
    ExitCode::SUCCESS
}

fn run_sweep(
    args: &Args,
    g: &mcp_core::WeightedGraph,
    text: &str,
    randomization: RandomizationConfig,
    tie_break: TieBreak,
    format: OutputFormat,
) -> ExitCode {
    let sweep = sweep_with(g, &randomization, tie_break);
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(&args.out)?;
        fs::write(args.out.join("sweep.json"), SweepReport::new(text, &sweep).to_json())?;
        for outcome in &sweep.outcomes {
            match &outcome.result {
                Some(r) => {
                    let report = RunReport::new(g, text, r.clone(), None);
                    report.write_outputs(&args.out.join(outcome.transform.name()), format)?;
                    println!("{}", report.summary());
                }
                None => println!(
                    "transform={} error={}",
                    outcome.transform,
                    outcome.error.as_deref().unwrap_or("unknown")
                ),
            }
        }
        if let Some(best) = sweep.best() {
            let report = RunReport::new(g, text, best.clone(), None);
            report.write_outputs(&args.out, format)?;
            println!("best: {}", report.summary());
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(EXIT_INPUT, format!("{}: {e}", args.out.display()));
    }
    for a in &sweep.agreement {
        println!("agreement {} vs {}: {:.4}", a.a, a.b, a.pair_agreement);
    }
    if sweep.best().is_none() {
        return fail(EXIT_NO_PARTITION, "no transform produced a valid partition");
    }
    ExitCode::SUCCESS
}
