//! Benchmark grids, CSV records and summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::{self, Algorithm, SolveConfig};
use crate::error::{Error, Result};
use crate::generators::{gen_instance, option_for, GenConfig};
use crate::instance::Instance;

pub const FAILED_DIGEST: &str = "failed";

/// One `(instance, algorithm)` run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub instance_id: String,
    pub algorithm: String,
    pub n_omega: usize,
    pub dom_size: usize,
    pub k: usize,
    /// Table option label, or `-`.
    pub option: String,
    pub wall_ns: u64,
    pub setup_ns: u64,
    pub cum_ipm_iterations: usize,
    pub lp_count: usize,
    pub result_digest: String,
}

impl BenchmarkRecord {
    pub fn failed(&self) -> bool {
        self.result_digest == FAILED_DIGEST
    }
}

/// Stable hash of a chosen index set: first 16 hex digits of the SHA-256 of
/// the sorted 1-based indices joined by commas.
pub fn digest(chosen: &[usize]) -> String {
    let mut v: Vec<usize> = chosen.iter().map(|i| i + 1).collect();
    v.sort_unstable();
    let text = v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Sha256::digest(text.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridCell {
    pub n_omega: usize,
    pub dom_size: usize,
    pub k: usize,
}

/// Named grids.
///
/// * `small`: `|dom P| = 4`, `|Ω|, k ∈ {4, 8, 16}`;
/// * `medium`: `|dom P| = 16`, `|Ω|, k ∈ {16, 32, 64}`;
/// * `domain`: `|Ω| = k = 16`, `|dom P| ∈ {16, 64, 256, 1024}`;
/// * `full`: `|dom P| = 16`, `|Ω|, k ∈ {16, 64, 256, 1024}`.
pub fn grid_preset(name: &str) -> Result<Vec<GridCell>> {
    let square = |dom: usize, sizes: &[usize]| {
        sizes
            .iter()
            .flat_map(|&n| {
                sizes.iter().map(move |&k| GridCell {
                    n_omega: n,
                    dom_size: dom,
                    k,
                })
            })
            .collect::<Vec<_>>()
    };
    Ok(match name {
        "small" => square(4, &[4, 8, 16]),
        "medium" => square(16, &[16, 32, 64]),
        "full" => square(16, &[16, 64, 256, 1024]),
        "domain" => [16, 64, 256, 1024]
            .iter()
            .map(|&d| GridCell {
                n_omega: 16,
                dom_size: d,
                k: 16,
            })
            .collect(),
        _ => {
            return Err(Error::Argument(format!(
                "unknown grid `{name}`; valid: small, medium, domain, full"
            )))
        }
    })
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub repetitions: usize,
    pub seed: u64,
    /// Worker threads; instances run concurrently, algorithms on one
    /// instance run in sequence.
    pub jobs: usize,
    pub solve: SolveConfig,
    pub s_coherent: usize,
    pub margin: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            repetitions: 1,
            seed: 0,
            jobs: 1,
            solve: SolveConfig::default(),
            s_coherent: 16,
            margin: 1e-3,
        }
    }
}

/// Runs every algorithm on one instance.
pub fn run_instance(
    instance_id: &str,
    inst: &Instance,
    option: Option<char>,
    algorithms: &[Algorithm],
    solve: &SolveConfig,
) -> Vec<BenchmarkRecord> {
    algorithms
        .iter()
        .map(|&alg| {
            let t0 = Instant::now();
            let res = criteria::run(alg, &inst.prevision, &inst.gambles, solve);
            let wall_ns = t0.elapsed().as_nanos() as u64;
            let mut rec = BenchmarkRecord {
                instance_id: instance_id.to_string(),
                algorithm: alg.label().to_string(),
                n_omega: inst.prevision.n_omega(),
                dom_size: inst.prevision.len(),
                k: inst.gambles.len(),
                option: option.map_or_else(|| "-".to_string(), |c| c.to_string()),
                wall_ns,
                setup_ns: 0,
                cum_ipm_iterations: 0,
                lp_count: 0,
                result_digest: FAILED_DIGEST.to_string(),
            };
            if let Ok(r) = res {
                rec.setup_ns = r.setup_ns.min(wall_ns);
                rec.cum_ipm_iterations = r.cum_ipm_iterations;
                rec.lp_count = r.lp_solves;
                rec.result_digest = digest(&r.chosen);
            }
            rec
        })
        .collect()
}

struct Job {
    id: String,
    gen: GenConfig,
}

fn run_jobs(jobs: Vec<Job>, cfg: &BenchConfig) -> Result<Vec<BenchmarkRecord>> {
    let work = |job: &Job| -> Result<Vec<BenchmarkRecord>> {
        let inst = gen_instance(&job.gen)?;
        Ok(run_instance(
            &job.id,
            &inst,
            job.gen.option,
            &cfg.algorithms,
            &cfg.solve,
        ))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    let chunks: Vec<Result<Vec<BenchmarkRecord>>> =
        pool.install(|| jobs.par_iter().map(work).collect());
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// One instance per cell and repetition with a uniform gamble set; every
/// algorithm runs on the same instance. Rows come out in cell, repetition,
/// algorithm order regardless of `jobs`.
pub fn run_grid(grid: &[GridCell], cfg: &BenchConfig) -> Result<Vec<BenchmarkRecord>> {
    let mut jobs = Vec::new();
    for (c, cell) in grid.iter().enumerate() {
        for r in 0..cfg.repetitions {
            jobs.push(Job {
                id: format!("n{}-d{}-k{}-r{r}", cell.n_omega, cell.dom_size, cell.k),
                gen: GenConfig {
                    seed: cfg.seed,
                    instance: (c * cfg.repetitions + r) as u64,
                    n_omega: cell.n_omega,
                    dom_size: cell.dom_size,
                    k: cell.k,
                    s_coherent: cfg.s_coherent,
                    option: None,
                    margin: cfg.margin,
                },
            });
        }
    }
    run_jobs(jobs, cfg)
}

/// Controlled sets for each option at one size. `cfg.algorithms` defaults
/// to the four interval-dominance algorithms when empty.
pub fn run_options(
    cell: GridCell,
    options: &[char],
    cfg: &BenchConfig,
) -> Result<Vec<BenchmarkRecord>> {
    for &o in options {
        option_for(cell.k, o)?;
    }
    let mut cfg = cfg.clone();
    if cfg.algorithms.is_empty() {
        cfg.algorithms = vec![
            Algorithm::Id1,
            Algorithm::Id2,
            Algorithm::Id3,
            Algorithm::Id4,
        ];
    }
    let mut jobs = Vec::new();
    for (c, &o) in options.iter().enumerate() {
        for r in 0..cfg.repetitions {
            jobs.push(Job {
                id: format!("n{}-d{}-k{}-{o}-r{r}", cell.n_omega, cell.dom_size, cell.k),
                gen: GenConfig {
                    seed: cfg.seed,
                    instance: (c * cfg.repetitions + r) as u64,
                    n_omega: cell.n_omega,
                    dom_size: cell.dom_size,
                    k: cell.k,
                    s_coherent: cfg.s_coherent,
                    option: Some(o),
                    margin: cfg.margin,
                },
            });
        }
    }
    run_jobs(jobs, &cfg)
}

pub fn write_records<W: Write>(records: &[BenchmarkRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if records.is_empty() {
        out.write_record([
            "instance_id",
            "algorithm",
            "n_omega",
            "dom_size",
            "k",
            "option",
            "wall_ns",
            "setup_ns",
            "cum_ipm_iterations",
            "lp_count",
            "result_digest",
        ])?;
    }
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<BenchmarkRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_omega: usize,
    pub dom_size: usize,
    pub k: usize,
    pub option: String,
    pub algorithm: String,
    pub n_runs: usize,
    pub n_failed: usize,
    pub median_wall_ns: f64,
    pub mean_wall_ns: f64,
    /// `1.96·sd/√n`, only for at least ten successful runs.
    pub ci_half_width: Option<f64>,
    pub median_iterations: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

struct Stats {
    n: usize,
    median: f64,
    mean: f64,
    ci: Option<f64>,
}

fn stats(v: Vec<f64>) -> Stats {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let ci = (n >= 10).then(|| {
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        1.96 * var.sqrt() / (n as f64).sqrt()
    });
    Stats {
        n,
        median: median(v),
        mean,
        ci,
    }
}

/// One row per `(sizes, option, algorithm)` group, in key order. Failed
/// runs count towards `n_runs` but not the statistics.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(usize, usize, usize, String, String), Vec<&BenchmarkRecord>> =
        BTreeMap::new();
    for r in records {
        groups
            .entry((
                r.n_omega,
                r.dom_size,
                r.k,
                r.option.clone(),
                r.algorithm.clone(),
            ))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((n_omega, dom_size, k, option, algorithm), rows)| {
            let ok: Vec<&&BenchmarkRecord> = rows.iter().filter(|r| !r.failed()).collect();
            let wall = stats(ok.iter().map(|r| r.wall_ns as f64).collect());
            Summary {
                n_omega,
                dom_size,
                k,
                option,
                algorithm,
                n_runs: rows.len(),
                n_failed: rows.len() - wall.n,
                median_wall_ns: wall.median,
                mean_wall_ns: wall.mean,
                ci_half_width: wall.ci,
                median_iterations: median(ok.iter().map(|r| r.cum_ipm_iterations as f64).collect()),
            }
        })
        .collect()
}

pub fn write_summaries<W: Write>(rows: &[Summary], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Horizontal axis of a plot series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    NOmega,
    DomSize,
    K,
    Option,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" | "n_omega" => Ok(Axis::NOmega),
            "dom" | "dom_size" => Ok(Axis::DomSize),
            "k" => Ok(Axis::K),
            "option" => Ok(Axis::Option),
            _ => Err(Error::Argument(format!(
                "unknown axis `{s}`; valid: omega, dom, k, option"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct PlotRow {
    series: String,
    x: String,
    n_runs: usize,
    mean_wall_ns: f64,
    ci_half_width: Option<f64>,
    median_iterations: f64,
}

/// Plot data: one series per algorithm, `x` from `axis`, mean wall time
/// with its confidence half-width.
pub fn emit_plot_data<W: Write>(records: &[BenchmarkRecord], axis: Axis, w: W) -> Result<()> {
    let mut groups: BTreeMap<(String, String), Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.failed()) {
        let x = match axis {
            Axis::NOmega => format!("{:>8}", r.n_omega),
            Axis::DomSize => format!("{:>8}", r.dom_size),
            Axis::K => format!("{:>8}", r.k),
            Axis::Option => r.option.clone(),
        };
        groups.entry((r.algorithm.clone(), x)).or_default().push(r);
    }
    let mut out = csv::Writer::from_writer(w);
    for ((series, x), rows) in groups {
        let wall = stats(rows.iter().map(|r| r.wall_ns as f64).collect());
        out.serialize(PlotRow {
            series,
            x: x.trim().to_string(),
            n_runs: wall.n,
            mean_wall_ns: wall.mean,
            ci_half_width: wall.ci,
            median_iterations: median(rows.iter().map(|r| r.cum_ipm_iterations as f64).collect()),
        })?;
    }
    out.flush()?;
    Ok(())
}
