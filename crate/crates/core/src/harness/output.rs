//! Run files (JSONL), summary tables and atomic writes.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;
use crate::analysis::mean_stderr;
use crate::search::{InitRow, QueryRow, RunRecord};
use crate::{Error, Result};

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema_version: u32,
    pub method: String,
    pub seed: u64,
    pub problem: String,
    pub k: usize,
    pub budget: usize,
    pub ground_truth: Option<f64>,
    pub evaluations: usize,
    /// Start subset in original node ids.
    pub start: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RunLine {
    Header(RunHeader),
    Init(InitRow),
    Query(QueryRow),
}

fn relabel(ids: &[u64], subset: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = subset.iter().map(|&v| ids[v] as usize).collect();
    out.sort_unstable();
    out
}

/// JSONL text for one run, with subsets written in original node ids.
pub fn run_jsonl(record: &RunRecord, problem: &str, k: usize, budget: usize, ground_truth: Option<f64>, ids: &[u64]) -> Result<String> {
    let header = RunHeader {
        schema_version: SCHEMA_VERSION,
        method: record.method.clone(),
        seed: record.seed,
        problem: problem.to_string(),
        k,
        budget,
        ground_truth,
        evaluations: record.evaluations,
        start: relabel(ids, &record.start).into_iter().map(|v| v as u64).collect(),
    };
    let mut out = serde_json::to_string(&RunLine::Header(header))?;
    out.push('\n');
    for row in &record.init {
        let mut row = row.clone();
        row.query = relabel(ids, &row.query);
        out.push_str(&serde_json::to_string(&RunLine::Init(row))?);
        out.push('\n');
    }
    for row in &record.rows {
        let mut row = row.clone();
        row.query = relabel(ids, &row.query);
        row.incumbent = relabel(ids, &row.incumbent);
        out.push_str(&serde_json::to_string(&RunLine::Query(row))?);
        out.push('\n');
    }
    Ok(out)
}

/// A parsed run file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunFile {
    pub path: PathBuf,
    pub header: RunHeader,
    pub rows: Vec<QueryRow>,
}

pub fn read_run(path: &Path) -> Result<RunFile> {
    let schema = |message: String| Error::Schema {
        path: path.display().to_string(),
        message,
    };
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut header = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: RunLine = serde_json::from_str(&line).map_err(|e| schema(format!("line {}: {e}", i + 1)))?;
        match parsed {
            RunLine::Header(h) => {
                if h.schema_version != SCHEMA_VERSION {
                    return Err(schema(format!(
                        "schema_version {} is not the supported {SCHEMA_VERSION}",
                        h.schema_version
                    )));
                }
                if header.replace(h).is_some() {
                    return Err(schema("more than one header line".into()));
                }
            }
            RunLine::Init(_) => {}
            RunLine::Query(r) => rows.push(r),
        }
    }
    let header = header.ok_or_else(|| schema("missing header line".into()))?;
    if rows.len() != header.budget {
        return Err(schema(format!("{} query rows, header budget {}", rows.len(), header.budget)));
    }
    Ok(RunFile {
        path: path.to_path_buf(),
        header,
        rows,
    })
}

/// Every `*.jsonl` file under `dir`, sorted by path.
pub fn find_runs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "jsonl") {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub t: usize,
    pub n: usize,
    pub best_y_mean: f64,
    pub best_y_stderr: f64,
    pub best_clean_y_mean: f64,
    pub best_clean_y_stderr: f64,
    pub regret_mean: Option<f64>,
    pub regret_stderr: Option<f64>,
    pub explored_mean: f64,
    pub explored_stderr: f64,
    pub distance_mean: f64,
    pub distance_stderr: f64,
}

/// Per-(method, t) mean and standard error across seeds. Input order does
/// not matter; runs are grouped by method and sorted by seed.
pub fn summarize(runs: &[RunFile]) -> Result<Vec<SummaryRow>> {
    let mut by_method: BTreeMap<&str, Vec<&RunFile>> = BTreeMap::new();
    for r in runs {
        by_method.entry(&r.header.method).or_default().push(r);
    }
    let mut out = Vec::new();
    for (method, mut group) in by_method {
        group.sort_by(|a, b| a.header.seed.cmp(&b.header.seed).then_with(|| a.path.cmp(&b.path)));
        let budget = group[0].header.budget;
        if let Some(bad) = group.iter().find(|r| r.header.budget != budget) {
            return Err(Error::Schema {
                path: bad.path.display().to_string(),
                message: format!("budget {} differs from {budget} in other {method} runs", bad.header.budget),
            });
        }
        let all_gt = group.iter().all(|r| r.header.ground_truth.is_some());
        for t in 0..budget {
            let col = |f: &dyn Fn(&RunFile) -> f64| -> Vec<f64> { group.iter().map(|r| f(r)).collect() };
            let best = mean_stderr(&col(&|r| r.rows[t].best_y));
            let clean = mean_stderr(&col(&|r| r.rows[t].best_clean_y));
            let explored = mean_stderr(&col(&|r| r.rows[t].explored as f64));
            let distance = mean_stderr(&col(&|r| r.rows[t].distance as f64));
            let regret = all_gt.then(|| mean_stderr(&col(&|r| r.header.ground_truth.unwrap() - r.rows[t].best_clean_y)));
            out.push(SummaryRow {
                method: method.to_string(),
                t: t + 1,
                n: group.len(),
                best_y_mean: best.mean,
                best_y_stderr: best.stderr,
                best_clean_y_mean: clean.mean,
                best_clean_y_stderr: clean.stderr,
                regret_mean: regret.map(|r| r.mean),
                regret_stderr: regret.map(|r| r.stderr),
                explored_mean: explored.mean,
                explored_stderr: explored.stderr,
                distance_mean: distance.mean,
                distance_stderr: distance.stderr,
            });
        }
    }
    Ok(out)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Summary rows prefixed with sweep-cell columns.
pub fn sweep_csv(cells: &[(Vec<(String, String)>, Vec<SummaryRow>)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let axis_names: Vec<String> = cells.first().map(|(s, _)| s.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend(axis_names.iter().cloned());
    header.extend(
        [
            "method",
            "t",
            "n",
            "best_y_mean",
            "best_y_stderr",
            "best_clean_y_mean",
            "best_clean_y_stderr",
            "regret_mean",
            "regret_stderr",
            "explored_mean",
            "explored_stderr",
            "distance_mean",
            "distance_stderr",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (i, (settings, rows)) in cells.iter().enumerate() {
        for r in rows {
            let mut rec = vec![i.to_string()];
            rec.extend(settings.iter().map(|(_, v)| v.clone()));
            rec.extend([
                r.method.clone(),
                r.t.to_string(),
                r.n.to_string(),
                r.best_y_mean.to_string(),
                r.best_y_stderr.to_string(),
                r.best_clean_y_mean.to_string(),
                r.best_clean_y_stderr.to_string(),
                opt(r.regret_mean),
                opt(r.regret_stderr),
                r.explored_mean.to_string(),
                r.explored_stderr.to_string(),
                r.distance_mean.to_string(),
                r.distance_stderr.to_string(),
            ]);
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}
