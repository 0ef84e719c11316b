//! `credal`: generate instances, solve them, verify results against the
//! simplex oracle and run benchmarks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use credal_core::bench::{
    self, digest, emit_plot_data, grid_preset, read_records, run_instance, summarize,
    write_records, write_summaries, Axis, BenchConfig, BenchmarkRecord, GridCell,
};
use credal_core::criteria::{self, Algorithm, CriterionKind, CriterionResult, SolveConfig};
use credal_core::generators::{gen_instance, GenConfig};
use credal_core::linprog::DEFAULT_EPS;
use credal_core::oracle::{oracle_opt_sets, OracleSets, ORACLE_TOL};
use credal_core::{Error, Instance};

#[derive(Parser)]
#[command(
    name = "credal",
    version,
    about = "Decision making with lower previsions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run one algorithm (or `all`) on an instance file.
    Solve(SolveArgs),
    /// Run a benchmark grid or an option sweep and write CSV records.
    Bench(BenchArgs),
    /// Check results (CSV records or a solve JSON report) against the oracle.
    Verify(VerifyArgs),
    /// Summarize benchmark records.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of outcomes |Ω|.
    #[arg(long)]
    omega: usize,
    /// Number of gambles in the domain of the lower prevision.
    #[arg(long)]
    dom: usize,
    /// Number of gambles to choose from.
    #[arg(long)]
    k: usize,
    /// Controlled set with the option's (ℓ, n) counts, `a` to `j`.
    #[arg(long)]
    option: Option<char>,
    #[arg(long, env = "CREDAL_SEED", default_value_t = 0)]
    seed: u64,
    /// Substream index within the seed.
    #[arg(long, default_value_t = 0)]
    instance: u64,
    /// Pmfs in the lower envelope.
    #[arg(long, default_value_t = 16)]
    s_coherent: usize,
    /// Separation used by controlled sets.
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    /// Output path; standard output if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Algorithm label, or `all`.
    #[arg(short, long, default_value = "id4")]
    algorithm: String,
    /// Solver tolerance on the duality gap and residuals.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    epsilon: f64,
    /// Step the sessions of an elimination round in parallel.
    #[arg(long)]
    parallel_rounds: bool,
    /// Write results: `.json` gives a full report, anything else CSV records.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Named grid: small, medium, domain or full.
    #[arg(long, default_value = "small")]
    grid: String,
    /// Option labels (comma separated) for a controlled sweep instead of a grid.
    #[arg(long, value_delimiter = ',')]
    options: Vec<char>,
    /// Sizes for an option sweep.
    #[arg(long, default_value_t = 16)]
    omega: usize,
    #[arg(long, default_value_t = 16)]
    dom: usize,
    #[arg(long, default_value_t = 16)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Algorithm labels (comma separated); all ten by default, the four
    /// interval-dominance ones for an option sweep.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<String>,
    #[arg(long, env = "CREDAL_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    epsilon: f64,
    /// Records CSV; standard output if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Plot CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Plot x axis: omega, dom, k or option.
    #[arg(long, default_value = "k")]
    axis: String,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    results: PathBuf,
    /// Decision-side tolerance on ties.
    #[arg(long, default_value_t = ORACLE_TOL)]
    tol: f64,
}

#[derive(Args)]
struct SummarizeArgs {
    records: PathBuf,
    /// Summary CSV; standard output if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, default_value = "k")]
    axis: String,
}

enum Failure {
    Verify(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Summarize(a) => cmd_summarize(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SolverBreakdown { .. }
        | Error::SolverFailed { .. }
        | Error::NotAvoidingSureLoss { .. }
        | Error::DegenerateAsl { .. }
        | Error::Generation(_) => 3,
        _ => 2,
    }
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let cfg = GenConfig {
        seed: a.seed,
        instance: a.instance,
        n_omega: a.omega,
        dom_size: a.dom,
        k: a.k,
        s_coherent: a.s_coherent,
        option: a.option,
        margin: a.margin,
    };
    let inst = gen_instance(&cfg)?;
    let mut w = output(a.out.as_deref())?;
    w.write_all(inst.to_text().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn parse_algorithms(labels: &[String]) -> Result<Vec<Algorithm>, Error> {
    labels.iter().map(|s| s.parse()).collect()
}

fn set(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn report(r: &CriterionResult) {
    let name = match r.algorithm {
        Algorithm::Maximin3 | Algorithm::Maximax3 => "R",
        _ if r.kind == CriterionKind::IntervalDominance => "I",
        _ => "chosen",
    };
    println!("algorithm: {}", r.algorithm);
    println!("{name} = {}", set(&r.chosen));
    if let Some(v) = r.value {
        println!("value: {v:.10}");
    }
    if let Some((lo, hi)) = r.maximin_bounds {
        println!("bounds: [{lo:.10}, {hi:.10}]");
    }
    if let Some(c) = &r.maximin_candidates {
        println!("R = {}", set(c));
    }
    println!(
        "iterations: {} (setup {}), programs: {}",
        r.cum_ipm_iterations, r.setup_iterations, r.lp_solves
    );
}

fn result_json(r: &CriterionResult) -> serde_json::Value {
    json!({
        "algorithm": r.algorithm.label(),
        "chosen": r.chosen_one_based(),
        "value": r.value,
        "maximin_bounds": r.maximin_bounds,
        "maximin_candidates": r.maximin_candidates.as_ref().map(|c| c.iter().map(|i| i + 1).collect::<Vec<_>>()),
        "lower_values": r.lower_values,
        "upper_values": r.upper_values,
        "per_gamble_iterations": r.per_gamble_iterations(),
        "cum_ipm_iterations": r.cum_ipm_iterations,
        "setup_iterations": r.setup_iterations,
        "lp_solves": r.lp_solves,
    })
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let algorithms = if a.algorithm == "all" {
        Algorithm::ALL.to_vec()
    } else {
        vec![a.algorithm.parse()?]
    };
    if !(a.epsilon > 0.0) {
        return Err(Error::Argument("epsilon must be positive".into()).into());
    }
    let inst = Instance::read(&a.instance)?;
    let cfg = SolveConfig {
        eps: a.epsilon,
        parallel_rounds: a.parallel_rounds,
        ..SolveConfig::default()
    };
    let is_json = a
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    if let (Some(path), false) = (&a.out, is_json) {
        let id = a
            .instance
            .file_stem()
            .map_or("instance".into(), |s| s.to_string_lossy().into_owned());
        let rows = run_instance(&id, &inst, None, &algorithms, &cfg);
        write_records(&rows, File::create(path)?)?;
    }
    let mut reports = Vec::new();
    for (n, alg) in algorithms.into_iter().enumerate() {
        let r = criteria::run(alg, &inst.prevision, &inst.gambles, &cfg)?;
        if n > 0 {
            println!();
        }
        report(&r);
        reports.push(result_json(&r));
    }
    if let (Some(path), true) = (&a.out, is_json) {
        let doc = if reports.len() == 1 {
            reports.pop().unwrap()
        } else {
            json!(reports)
        };
        let mut w = output(Some(path))?;
        serde_json::to_writer_pretty(&mut w, &doc).map_err(io::Error::from)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if !(a.epsilon > 0.0) {
        return Err(Error::Argument("epsilon must be positive".into()).into());
    }
    let axis: Axis = a.axis.parse()?;
    let cfg = BenchConfig {
        algorithms: parse_algorithms(&a.algorithms)?,
        repetitions: a.reps,
        seed: a.seed,
        jobs: a.jobs,
        solve: SolveConfig {
            eps: a.epsilon,
            ..SolveConfig::default()
        },
        ..BenchConfig::default()
    };
    let records = if a.options.is_empty() {
        let cfg = if cfg.algorithms.is_empty() {
            BenchConfig {
                algorithms: Algorithm::ALL.to_vec(),
                ..cfg
            }
        } else {
            cfg
        };
        bench::run_grid(&grid_preset(&a.grid)?, &cfg)?
    } else {
        let cell = GridCell {
            n_omega: a.omega,
            dom_size: a.dom,
            k: a.k,
        };
        bench::run_options(cell, &a.options, &cfg)?
    };
    write_records(&records, output(a.out.as_deref())?)?;
    if let Some(p) = &a.summary {
        write_summaries(&summarize(&records), File::create(p)?)?;
    }
    if let Some(p) = &a.plot {
        emit_plot_data(&records, axis, File::create(p)?)?;
    }
    let failed = records.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", records.len());
    }
    Ok(())
}

/// Digests an algorithm's result may legitimately have.
fn accepted_digests(alg: Algorithm, o: &OracleSets) -> Vec<String> {
    match alg {
        Algorithm::Maximin1 | Algorithm::Maximin2 => {
            o.maximin.iter().map(|&i| digest(&[i])).collect()
        }
        Algorithm::Maximax1 | Algorithm::Maximax2 => {
            o.maximax.iter().map(|&i| digest(&[i])).collect()
        }
        Algorithm::Maximin3 => vec![digest(&o.maximin)],
        Algorithm::Maximax3 => vec![digest(&o.maximax)],
        _ => vec![digest(&o.interval_dominant)],
    }
}

fn load_results(path: &Path) -> Result<Vec<(Algorithm, String)>, Failure> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(doc) = serde_json::from_str::<serde_json::Value>(&text) {
        let items = match doc {
            serde_json::Value::Array(v) => v,
            other => vec![other],
        };
        return items
            .iter()
            .map(|item| {
                let alg: Algorithm = item["algorithm"]
                    .as_str()
                    .ok_or_else(|| Error::Argument("report lacks `algorithm`".into()))?
                    .parse()?;
                let chosen = item["chosen"]
                    .as_array()
                    .ok_or_else(|| Error::Argument("report lacks `chosen`".into()))?
                    .iter()
                    .map(|v| v.as_u64().filter(|&i| i >= 1).map(|i| i as usize - 1))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Argument("`chosen` must hold 1-based indices".into()))?;
                Ok((alg, digest(&chosen)))
            })
            .collect();
    }
    let rows: Vec<BenchmarkRecord> = read_records(text.as_bytes())?;
    rows.into_iter()
        .map(|r| Ok((r.algorithm.parse()?, r.result_digest)))
        .collect()
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let inst = Instance::read(&a.instance)?;
    let results = load_results(&a.results)?;
    let o = oracle_opt_sets(&inst.prevision, &inst.gambles, a.tol)?;
    for (n, (alg, got)) in results.iter().enumerate() {
        let ok = accepted_digests(*alg, &o);
        if !ok.contains(got) {
            return Err(Failure::Verify(format!(
                "row {}: {alg} digest {got}, oracle expects {} (maximin {}, maximax {}, interval dominant {})",
                n + 1,
                ok.join(" or "),
                set(&o.maximin),
                set(&o.maximax),
                set(&o.interval_dominant)
            )));
        }
    }
    println!("ok: {} results agree with the oracle", results.len());
    Ok(())
}

fn cmd_summarize(a: SummarizeArgs) -> CmdResult {
    let axis: Axis = a.axis.parse()?;
    let records = read_records(File::open(&a.records)?)?;
    write_summaries(&summarize(&records), output(a.out.as_deref())?)?;
    if let Some(p) = &a.plot {
        emit_plot_data(&records, axis, File::create(p)?)?;
    }
    Ok(())
}
