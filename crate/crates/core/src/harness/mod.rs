//! Experiment orchestration behind the command-line tool.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{cell_label, ExperimentConfig, GraphSpec, ObjectiveSpec, Problem, Purpose, SweepAxes, SweepCell};
pub use output::{find_runs, read_run, summarize, RunFile, RunHeader, RunLine, SummaryRow};

use crate::analysis::{kernel_validation_cell, mean_stderr, smoothness_curve, MeanStderr};
use crate::baselines::{run_baseline, BaselineKind};
use crate::gp::KernelFamily;
use crate::graph::write_edge_list;
use crate::objectives::{ground_truth, Objective};
use crate::search::{run_graphcombo, run_graphcombo_noisy, RunConfig, RunRecord};
use crate::{Error, Result};

/// Failure split by exit code: bad input (2) or a failed run (3).
#[derive(Debug)]
pub enum HarnessError {
    Config(Vec<String>),
    Runtime(Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Config(problems) => {
                writeln!(f, "configuration has {} problem(s):", problems.len())?;
                for p in problems {
                    writeln!(f, "  - {p}")?;
                }
                Ok(())
            }
            HarnessError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => HarnessError::Config(vec![m]),
            other => HarnessError::Runtime(other),
        }
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

/// Command-line overrides shared by the subcommands.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

struct Loaded {
    config: ExperimentConfig,
    base: PathBuf,
    out: PathBuf,
    jobs: usize,
}

fn load(opts: &Options, purpose: Purpose) -> HarnessResult<Loaded> {
    let mut config = ExperimentConfig::load(&opts.config).map_err(HarnessError::Config)?;
    if let Some(seed) = opts.seed {
        config.search.seed = seed;
    }
    let base = opts.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let problems = config.problems(purpose, &base);
    if !problems.is_empty() {
        return Err(HarnessError::Config(problems));
    }
    if opts.jobs == Some(0) {
        return Err(HarnessError::Config(vec!["--jobs must be at least 1".into()]));
    }
    let out = opts
        .out
        .clone()
        .or_else(|| config.out.clone().map(|p| base.join(p)))
        .unwrap_or_else(|| PathBuf::from("results").join(&config.name));
    let jobs = opts
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    // Dense linear algebra runs single-threaded so results do not depend
    // on the worker count.
    faer::set_global_parallelism(faer::Par::Seq);
    Ok(Loaded { config, base, out, jobs })
}

fn pool(jobs: usize) -> HarnessResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Runtime(Error::InvalidParameters(e.to_string())))
}

/// Runs one method by name.
pub fn run_method(method: &str, config: &RunConfig, problem: &Problem) -> Result<RunRecord> {
    let (g, obj) = (&problem.graph, problem.objective.as_ref());
    match method {
        "graphcombo" => run_graphcombo(config, g, obj),
        "graphcombo_noisy" => run_graphcombo_noisy(config, g, obj),
        other => match BaselineKind::from_name(other) {
            Some(b) => run_baseline(b, config, g, obj),
            None => Err(Error::Config(format!("unknown method {other:?}"))),
        },
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    problem: &'a str,
    jobs: usize,
    started_unix: u64,
    wall_clock_seconds: f64,
    files: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn write_manifest(out: &Path, command: &str, loaded: &Loaded, problem: &str, started: (u64, Instant), files: Vec<String>) -> Result<()> {
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config: &loaded.config,
        problem,
        jobs: loaded.jobs,
        started_unix: started.0,
        wall_clock_seconds: started.1.elapsed().as_secs_f64(),
        files,
    };
    output::write_atomic(&out.join("manifest.json"), serde_json::to_string_pretty(&m)?.as_bytes())
}

/// Result of one (method × seed) grid.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub out: PathBuf,
    pub run_files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
    pub ground_truth: Option<f64>,
}

fn ground_truth_value(objective: &dyn Objective, k: usize, cap: usize) -> Result<Option<f64>> {
    Ok(ground_truth(objective, k, cap)?.map(|(v, _)| v))
}

fn run_grid(loaded: &Loaded, problem: &Problem, search: &RunConfig, out: &Path, workers: &rayon::ThreadPool) -> HarnessResult<RunOutcome> {
    let cfg = &loaded.config;
    let gt = ground_truth_value(problem.objective.as_ref(), search.k, cfg.ground_truth_cap)?;
    let cells: Vec<(String, u64)> = cfg
        .methods
        .iter()
        .flat_map(|m| (0..cfg.n_seeds as u64).map(move |i| (m.clone(), i)))
        .collect();
    let results: Vec<Result<(PathBuf, RunFile)>> = workers.install(|| {
        cells
            .par_iter()
            .map(|(method, i)| {
                let seed = search.seed.wrapping_add(*i);
                let config = RunConfig { seed, ..search.clone() };
                let record = run_method(method, &config, problem)?;
                let text = output::run_jsonl(&record, &problem.description, config.k, config.budget, gt, &problem.node_ids)?;
                let path = out.join("runs").join(format!("{method}_seed{seed}.jsonl"));
                output::write_atomic(&path, text.as_bytes())?;
                let file = read_run(&path)?;
                Ok((path, file))
            })
            .collect()
    });
    let mut run_files = Vec::new();
    let mut parsed = Vec::new();
    for r in results {
        let (p, f) = r?;
        run_files.push(p);
        parsed.push(f);
    }
    let summary = summarize(&parsed)?;
    output::write_atomic(&out.join("summary.csv"), &output::summary_csv(&summary)?)?;
    Ok(RunOutcome {
        out: out.to_path_buf(),
        run_files,
        summary,
        ground_truth: gt,
    })
}

fn relative(out: &Path, files: &[PathBuf]) -> Vec<String> {
    files
        .iter()
        .map(|p| p.strip_prefix(out).unwrap_or(p).display().to_string())
        .collect()
}

pub fn cmd_run(opts: &Options) -> HarnessResult<RunOutcome> {
    let started = (unix_now(), Instant::now());
    let loaded = load(opts, Purpose::Run)?;
    let problem = loaded.config.build_problem(&loaded.base)?;
    let workers = pool(loaded.jobs)?;
    let outcome = run_grid(&loaded, &problem, &loaded.config.search, &loaded.out, &workers)?;
    let mut files = relative(&loaded.out, &outcome.run_files);
    files.push("summary.csv".into());
    write_manifest(&loaded.out, "run", &loaded, &problem.description, started, files)?;
    Ok(outcome)
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub out: PathBuf,
    pub cells: Vec<(Vec<(String, String)>, RunOutcome)>,
}

pub fn cmd_sweep(opts: &Options) -> HarnessResult<SweepOutcome> {
    let started = (unix_now(), Instant::now());
    let loaded = load(opts, Purpose::Sweep)?;
    let problem = loaded.config.build_problem(&loaded.base)?;
    let workers = pool(loaded.jobs)?;
    let mut cells = Vec::new();
    let mut files = Vec::new();
    for (i, cell) in loaded.config.sweep.cells(&loaded.config.search).into_iter().enumerate() {
        let dir = loaded.out.join("cells").join(format!("{i:03}"));
        let outcome = run_grid(&loaded, &problem, &cell.config, &dir, &workers)?;
        files.extend(relative(&loaded.out, &outcome.run_files));
        files.push(format!("cells/{i:03}/summary.csv"));
        cells.push((cell.settings, outcome));
    }
    let table: Vec<(Vec<(String, String)>, Vec<SummaryRow>)> =
        cells.iter().map(|(s, o)| (s.clone(), o.summary.clone())).collect();
    output::write_atomic(&loaded.out.join("sweep.csv"), &output::sweep_csv(&table)?)?;
    files.push("sweep.csv".into());
    write_manifest(&loaded.out, "sweep", &loaded, &problem.description, started, files)?;
    Ok(SweepOutcome { out: loaded.out, cells })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelScore {
    pub kernel: KernelFamily,
    pub rho: MeanStderr,
}

pub fn cmd_kernel_validate(opts: &Options) -> HarnessResult<Vec<KernelScore>> {
    let started = (unix_now(), Instant::now());
    let loaded = load(opts, Purpose::KernelValidate)?;
    let section = loaded.config.kernel_validation.clone().unwrap_or_default();
    let setup = section.setup(loaded.config.ground_truth_cap);
    let base_seed = loaded.config.search.seed;
    let workers = pool(loaded.jobs)?;
    let per_seed: Vec<Result<Vec<(KernelFamily, f64)>>> = workers.install(|| {
        (0..section.n_seeds as u64)
            .into_par_iter()
            .map(|i| kernel_validation_cell(&setup, base_seed.wrapping_add(i)))
            .collect()
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "kernel", "rho"]).map_err(Error::from)?;
    let mut table: Vec<(KernelFamily, Vec<f64>)> = section.kernels.iter().map(|&k| (k, Vec::new())).collect();
    for (i, cell) in per_seed.into_iter().enumerate() {
        for (kernel, rho) in cell? {
            w.write_record([(base_seed + i as u64).to_string(), kernel.name().to_string(), rho.to_string()])
                .map_err(Error::from)?;
            if let Some((_, v)) = table.iter_mut().find(|(k, _)| *k == kernel) {
                v.push(rho);
            }
        }
    }
    let scores: Vec<KernelScore> = table
        .into_iter()
        .map(|(kernel, v)| KernelScore { kernel, rho: mean_stderr(&v) })
        .collect();
    let mut s = csv::Writer::from_writer(Vec::new());
    s.write_record(["kernel", "mean", "stderr", "n"]).map_err(Error::from)?;
    for k in &scores {
        s.write_record([k.kernel.name().to_string(), k.rho.mean.to_string(), k.rho.stderr.to_string(), k.rho.n.to_string()])
            .map_err(Error::from)?;
    }
    let bytes = |w: csv::Writer<Vec<u8>>| w.into_inner().map_err(|e| Error::Io(e.into_error()));
    output::write_atomic(&loaded.out.join("kernel_validation.csv"), &bytes(w)?)?;
    output::write_atomic(&loaded.out.join("kernel_validation_summary.csv"), &bytes(s)?)?;
    let files = vec!["kernel_validation.csv".into(), "kernel_validation_summary.csv".into()];
    write_manifest(&loaded.out, "kernel-validate", &loaded, "kernel validation", started, files)?;
    Ok(scores)
}

/// Mean cumulative-energy curve per eigenvector index.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessCurve {
    pub index: usize,
    pub points: Vec<MeanStderr>,
}

pub fn cmd_smoothness(opts: &Options) -> HarnessResult<Vec<SmoothnessCurve>> {
    let started = (unix_now(), Instant::now());
    let loaded = load(opts, Purpose::Smoothness)?;
    let s = loaded.config.smoothness.clone().unwrap_or_default();
    let cap = loaded.config.ground_truth_cap;
    let base_seed = loaded.config.search.seed;
    let workers = pool(loaded.jobs)?;
    let mut curves = Vec::new();
    for &j in &s.indices {
        let runs: Vec<Result<Vec<f64>>> = workers.install(|| {
            (0..s.n_seeds as u64)
                .into_par_iter()
                .map(|i| smoothness_curve(s.nodes, s.ba_m, s.k, j, cap, base_seed.wrapping_add(i)))
                .collect()
        });
        let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
        let len = runs[0].len();
        let points = (0..len)
            .map(|p| mean_stderr(&runs.iter().map(|r| r[p]).collect::<Vec<_>>()))
            .collect();
        curves.push(SmoothnessCurve { index: j, points });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "p", "mean", "stderr"]).map_err(Error::from)?;
    for c in &curves {
        for (p, m) in c.points.iter().enumerate() {
            w.write_record([c.index.to_string(), (p + 1).to_string(), m.mean.to_string(), m.stderr.to_string()])
                .map_err(Error::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    output::write_atomic(&loaded.out.join("smoothness.csv"), &bytes)?;
    write_manifest(&loaded.out, "smoothness", &loaded, "smoothness", started, vec!["smoothness.csv".into()])?;
    Ok(curves)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruthReport {
    pub problem: String,
    pub k: usize,
    pub value: f64,
    /// Optimal subset in original node ids.
    pub subset: Vec<u64>,
}

pub fn cmd_ground_truth(opts: &Options) -> HarnessResult<GroundTruthReport> {
    let loaded = load(opts, Purpose::GroundTruth)?;
    let problem = loaded.config.build_problem(&loaded.base)?;
    let k = loaded.config.search.k;
    let found = ground_truth(problem.objective.as_ref(), k, loaded.config.ground_truth_cap)?;
    let (value, subset) = found.ok_or(HarnessError::Runtime(Error::Undefined("ground truth (unavailable)")))?;
    let mut subset: Vec<u64> = subset.iter().map(|&v| problem.node_ids[v]).collect();
    subset.sort_unstable();
    let report = GroundTruthReport {
        problem: problem.description,
        k,
        value,
        subset,
    };
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    output::write_atomic(&loaded.out.join("ground_truth.json"), text.as_bytes())?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummarizeOutcome {
    pub files: usize,
    pub rows: usize,
    pub csv: PathBuf,
}

/// Aggregates every run file under `dir` into `out/summary.csv`.
pub fn cmd_summarize(dir: &Path, out: Option<&Path>) -> HarnessResult<SummarizeOutcome> {
    if !dir.is_dir() {
        return Err(HarnessError::Config(vec![format!("{} is not a directory", dir.display())]));
    }
    let paths = find_runs(dir)?;
    if paths.is_empty() {
        return Err(HarnessError::Config(vec![format!("no .jsonl run files under {}", dir.display())]));
    }
    let runs: Vec<RunFile> = paths.iter().map(|p| read_run(p)).collect::<Result<_>>()?;
    let rows = summarize(&runs)?;
    let csv_path = out.unwrap_or(dir).join("summary.csv");
    output::write_atomic(&csv_path, &output::summary_csv(&rows)?)?;
    Ok(SummarizeOutcome {
        files: runs.len(),
        rows: rows.len(),
        csv: csv_path,
    })
}

/// Writes the configured graph as an edge list (compact ids).
pub fn cmd_generate(opts: &Options) -> HarnessResult<PathBuf> {
    let loaded = load(opts, Purpose::Generate)?;
    let spec = loaded.config.graph.as_ref().expect("validated");
    let (graph, _) = spec.build(&loaded.base)?;
    let mut buf = Vec::new();
    write_edge_list(&graph, &mut buf)?;
    let path = loaded.out.join("graph.edgelist");
    output::write_atomic(&path, &buf)?;
    Ok(path)
}
