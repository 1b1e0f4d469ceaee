//! Experiment files: TOML with one table per concern.
//!
//! ```toml
//! name = "ba-eigcent"
//! methods = ["graphcombo", "random_search", "k_random_walk"]
//! n_seeds = 10
//!
//! [graph]
//! generator = "ba"
//! n = 1000
//! m = 5
//!
//! [objective]
//! kind = "eigenvector_centrality"
//!
//! [search]
//! k = 4
//! budget = 300
//! init_method = { method = "random_walk", n_init = 10 }
//!
//! [sweep]
//! q = [500, 1000, 2000, 4000]
//! ```
//!
//! `search.seed` is the base seed; run `i` uses `seed + i`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{KernelValidationSetup, SignalSpec};
use crate::baselines::BaselineKind;
use crate::combo::DEFAULT_BRUTE_CAP;
use crate::gp::KernelFamily;
use crate::graph::{
    degree_centrality, eigenvector_centrality, generate_ba, generate_grid2d, generate_sbm, generate_ws, load_edge_list,
    pagerank, Graph,
};
use crate::objectives::{
    ackley_grid_scores, avg_node_score, eigenvector_signal_objective, patient_zero_scores,
    standardized_pagerank_objective, FlattenCurveObjective, IcParams, InfluenceObjective, Objective, SirParams,
    TransitivityDropObjective,
};
use crate::search::{RestartMethod, RunConfig};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub methods: Vec<String>,
    #[serde(default = "default_seeds")]
    pub n_seeds: usize,
    pub out: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub ground_truth_cap: usize,
    pub graph: Option<GraphSpec>,
    pub objective: Option<ObjectiveSpec>,
    #[serde(default)]
    pub search: RunConfig,
    #[serde(default)]
    pub sweep: SweepAxes,
    pub kernel_validation: Option<KernelValidationSection>,
    pub smoothness: Option<SmoothnessSection>,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_seeds() -> usize {
    20
}

fn default_cap() -> usize {
    DEFAULT_BRUTE_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Ba {
        n: usize,
        m: usize,
        #[serde(default)]
        seed: u64,
    },
    Ws {
        n: usize,
        k_ring: usize,
        p: f64,
        #[serde(default)]
        seed: u64,
    },
    Sbm {
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        #[serde(default)]
        seed: u64,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    EdgeList {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    EigenvectorCentrality,
    DegreeCentrality,
    Pagerank {
        #[serde(default = "default_damping")]
        damping: f64,
    },
    StandardizedPagerank,
    /// Average of the `index`-th (1-based) normalized-Laplacian eigenvector.
    EigenvectorSignal {
        index: usize,
    },
    /// Requires a grid graph.
    Ackley {
        #[serde(default = "default_ackley_noise")]
        noise_sigma: f64,
        #[serde(default)]
        seed: u64,
    },
    FlattenCurve {
        params: Option<SirParams>,
        #[serde(default)]
        seed: u64,
    },
    PatientZero {
        params: Option<SirParams>,
        #[serde(default)]
        seed: u64,
    },
    Influence {
        #[serde(default)]
        params: IcParams,
        #[serde(default)]
        seed: u64,
    },
    /// Searches edge subsets through the line graph.
    TransitivityDrop,
}

fn default_damping() -> f64 {
    0.85
}

fn default_ackley_noise() -> f64 {
    0.5
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub k: Option<Vec<usize>>,
    pub q: Option<Vec<usize>>,
    pub failtol: Option<Vec<usize>>,
    pub max_hops: Option<Vec<usize>>,
    pub budget: Option<Vec<usize>>,
    pub restart_method: Option<Vec<RestartMethod>>,
    pub kernel: Option<Vec<KernelFamily>>,
    pub gp_restarts: Option<Vec<usize>>,
    pub noise_sigma: Option<Vec<f64>>,
}

/// One cell of a sweep: the overridden settings and their label.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub settings: Vec<(String, String)>,
    pub config: RunConfig,
}

impl SweepAxes {
    /// Cartesian product in field order; no axes gives the base config.
    pub fn cells(&self, base: &RunConfig) -> Vec<SweepCell> {
        type Apply = Box<dyn Fn(&mut RunConfig)>;
        let mut axes: Vec<Vec<(String, String, Apply)>> = Vec::new();
        macro_rules! axis {
            ($field:ident, $wrap:expr) => {
                if let Some(values) = &self.$field {
                    axes.push(
                        values
                            .iter()
                            .map(|v| {
                                let v = v.clone();
                                let shown = serde_json::to_string(&v).unwrap_or_default().trim_matches('"').to_string();
                                let f: Apply = Box::new(move |c: &mut RunConfig| c.$field = $wrap(v.clone()));
                                (stringify!($field).to_string(), shown, f)
                            })
                            .collect(),
                    );
                }
            };
        }
        axis!(k, |v| v);
        axis!(q, |v| v);
        axis!(failtol, |v| v);
        axis!(max_hops, Some);
        axis!(budget, |v| v);
        axis!(restart_method, |v| v);
        axis!(kernel, |v| v);
        axis!(gp_restarts, |v| v);
        axis!(noise_sigma, |v| v);
        let mut cells = vec![SweepCell {
            settings: Vec::new(),
            config: base.clone(),
        }];
        for axis in &axes {
            let mut next = Vec::with_capacity(cells.len() * axis.len());
            for cell in &cells {
                for (name, shown, apply) in axis {
                    let mut c = cell.clone();
                    apply(&mut c.config);
                    c.settings.push((name.clone(), shown.clone()));
                    next.push(c);
                }
            }
            cells = next;
        }
        cells
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let empty = |name: &str, len: Option<usize>, out: &mut Vec<String>| {
            if len == Some(0) {
                out.push(format!("sweep.{name} is empty; remove it or list at least one value"));
            }
        };
        empty("k", self.k.as_ref().map(Vec::len), &mut out);
        empty("q", self.q.as_ref().map(Vec::len), &mut out);
        empty("failtol", self.failtol.as_ref().map(Vec::len), &mut out);
        empty("max_hops", self.max_hops.as_ref().map(Vec::len), &mut out);
        empty("budget", self.budget.as_ref().map(Vec::len), &mut out);
        empty("restart_method", self.restart_method.as_ref().map(Vec::len), &mut out);
        empty("kernel", self.kernel.as_ref().map(Vec::len), &mut out);
        empty("gp_restarts", self.gp_restarts.as_ref().map(Vec::len), &mut out);
        empty("noise_sigma", self.noise_sigma.as_ref().map(Vec::len), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelValidationSection {
    pub n_seeds: usize,
    pub nodes: usize,
    pub ba_m: usize,
    pub k: usize,
    pub signal: SignalSpec,
    pub train_fraction: f64,
    pub noise_sigma: f64,
    pub kernels: Vec<KernelFamily>,
    pub gp_restarts: usize,
}

impl Default for KernelValidationSection {
    fn default() -> Self {
        let d = KernelValidationSetup::default();
        Self {
            n_seeds: 20,
            nodes: d.nodes,
            ba_m: d.ba_m,
            k: d.k,
            signal: d.signal,
            train_fraction: d.train_fraction,
            noise_sigma: d.noise_sigma,
            kernels: d.kernels,
            gp_restarts: d.gp_restarts,
        }
    }
}

impl KernelValidationSection {
    pub fn setup(&self, cap: usize) -> KernelValidationSetup {
        KernelValidationSetup {
            nodes: self.nodes,
            ba_m: self.ba_m,
            k: self.k,
            signal: self.signal,
            train_fraction: self.train_fraction,
            noise_sigma: self.noise_sigma,
            kernels: self.kernels.clone(),
            gp_restarts: self.gp_restarts,
            cap,
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_seeds == 0 {
            out.push("kernel_validation.n_seeds must be at least 1".into());
        }
        if self.ba_m == 0 || self.ba_m >= self.nodes {
            out.push(format!("kernel_validation.ba_m must be in 1..{}", self.nodes));
        }
        if self.k == 0 || self.k > self.nodes {
            out.push(format!("kernel_validation.k must be in 1..={}", self.nodes));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            out.push("kernel_validation.train_fraction must lie strictly between 0 and 1".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            out.push("kernel_validation.noise_sigma must be finite and nonnegative".into());
        }
        if self.kernels.is_empty() {
            out.push("kernel_validation.kernels is empty".into());
        }
        if let SignalSpec::Eigenvector(j) = self.signal {
            if j == 0 || j > self.nodes {
                out.push(format!("kernel_validation.signal index must be in 1..={}", self.nodes));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothnessSection {
    pub n_seeds: usize,
    pub nodes: usize,
    pub ba_m: usize,
    pub k: usize,
    pub indices: Vec<usize>,
}

impl Default for SmoothnessSection {
    fn default() -> Self {
        Self {
            n_seeds: 50,
            nodes: 20,
            ba_m: 2,
            k: 3,
            indices: vec![2, 4, 8, 12, 16],
        }
    }
}

impl SmoothnessSection {
    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_seeds == 0 {
            out.push("smoothness.n_seeds must be at least 1".into());
        }
        if self.ba_m == 0 || self.ba_m >= self.nodes {
            out.push(format!("smoothness.ba_m must be in 1..{}", self.nodes));
        }
        if self.k == 0 || self.k > self.nodes {
            out.push(format!("smoothness.k must be in 1..={}", self.nodes));
        }
        for &j in &self.indices {
            if j == 0 || j > self.nodes {
                out.push(format!("smoothness.indices entry {j} is outside 1..={}", self.nodes));
            }
        }
        if self.indices.is_empty() {
            out.push("smoothness.indices is empty".into());
        }
        out
    }
}

/// Which parts of the file a command needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Run,
    Sweep,
    KernelValidate,
    Smoothness,
    GroundTruth,
    Generate,
}

/// The graph the search runs on, plus display ids for its nodes.
pub struct Problem {
    pub graph: Graph,
    pub objective: Box<dyn Objective>,
    pub node_ids: Vec<u64>,
    pub description: String,
}

impl GraphSpec {
    fn problems(&self, base: &Path) -> Vec<String> {
        let mut out = Vec::new();
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        match self {
            GraphSpec::Ba { n, m, .. } => {
                if *m == 0 || m >= n {
                    out.push(format!("graph.m must be in 1..{n}, got {m}"));
                }
            }
            GraphSpec::Ws { n, k_ring, p, .. } => {
                if *k_ring == 0 || k_ring % 2 == 1 || k_ring >= n {
                    out.push(format!("graph.k_ring must be even and in 2..{n}, got {k_ring}"));
                }
                if !unit(*p) {
                    out.push(format!("graph.p must be in [0, 1], got {p}"));
                }
            }
            GraphSpec::Sbm { sizes, p_in, p_out, .. } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    out.push("graph.sizes must list positive block sizes".into());
                }
                if !unit(*p_in) || !unit(*p_out) {
                    out.push(format!("graph.p_in and graph.p_out must be in [0, 1], got {p_in} and {p_out}"));
                }
            }
            GraphSpec::Grid { rows, cols } => {
                if *rows == 0 || *cols == 0 {
                    out.push("graph.rows and graph.cols must be at least 1".into());
                }
            }
            GraphSpec::EdgeList { path } => {
                let p = resolve(base, path);
                if !p.is_file() {
                    out.push(format!("graph.path {} does not exist", p.display()));
                }
            }
        }
        out
    }

    /// Node count without building the graph, when known up front.
    fn declared_nodes(&self) -> Option<usize> {
        match self {
            GraphSpec::Ba { n, .. } | GraphSpec::Ws { n, .. } => Some(*n),
            GraphSpec::Sbm { sizes, .. } => Some(sizes.iter().sum()),
            GraphSpec::Grid { rows, cols } => Some(rows * cols),
            GraphSpec::EdgeList { .. } => None,
        }
    }

    pub fn build(&self, base: &Path) -> Result<(Graph, Vec<u64>)> {
        let graph = match self {
            GraphSpec::Ba { n, m, seed } => generate_ba(*n, *m, *seed)?,
            GraphSpec::Ws { n, k_ring, p, seed } => generate_ws(*n, *k_ring, *p, *seed)?,
            GraphSpec::Sbm { sizes, p_in, p_out, seed } => generate_sbm(sizes, *p_in, *p_out, *seed)?,
            GraphSpec::Grid { rows, cols } => generate_grid2d(*rows, *cols)?,
            GraphSpec::EdgeList { path } => {
                let file = std::fs::File::open(resolve(base, path))?;
                let el = load_edge_list(std::io::BufReader::new(file))?;
                return Ok((el.graph, el.original_ids));
            }
        };
        let ids = (0..graph.num_nodes() as u64).collect();
        Ok((graph, ids))
    }

    fn describe(&self) -> String {
        match self {
            GraphSpec::Ba { n, m, seed } => format!("ba(n={n},m={m},seed={seed})"),
            GraphSpec::Ws { n, k_ring, p, seed } => format!("ws(n={n},k={k_ring},p={p},seed={seed})"),
            GraphSpec::Sbm { sizes, p_in, p_out, seed } => format!("sbm({sizes:?},{p_in},{p_out},seed={seed})"),
            GraphSpec::Grid { rows, cols } => format!("grid({rows}x{cols})"),
            GraphSpec::EdgeList { path } => format!("edge_list({})", path.display()),
        }
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl ObjectiveSpec {
    fn problems(&self, graph: Option<&GraphSpec>, nodes: Option<usize>) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            ObjectiveSpec::Pagerank { damping } if !(0.0..1.0).contains(damping) => {
                out.push(format!("objective.damping must be in [0, 1), got {damping}"));
            }
            ObjectiveSpec::EigenvectorSignal { index } => {
                if *index == 0 || nodes.is_some_and(|n| *index > n) {
                    out.push(format!("objective.index must be between 1 and the node count, got {index}"));
                }
            }
            ObjectiveSpec::Ackley { noise_sigma, .. } => {
                if !matches!(graph, Some(GraphSpec::Grid { .. })) {
                    out.push("objective ackley needs graph.generator = \"grid\"".into());
                }
                if !(*noise_sigma >= 0.0 && noise_sigma.is_finite()) {
                    out.push(format!("objective.noise_sigma must be finite and nonnegative, got {noise_sigma}"));
                }
            }
            ObjectiveSpec::FlattenCurve { params: Some(p), .. } | ObjectiveSpec::PatientZero { params: Some(p), .. } => {
                if let Err(e) = p.validate() {
                    out.push(format!("objective.params: {e}"));
                }
            }
            ObjectiveSpec::Influence { params, .. } => {
                if !(0.0..=1.0).contains(&params.activation_prob) || params.n_sims == 0 {
                    out.push("objective.params needs activation_prob in [0, 1] and n_sims >= 1".into());
                }
            }
            _ => {}
        }
        out
    }

    pub fn build(&self, graph: Graph, node_ids: Vec<u64>, grid: Option<(usize, usize)>) -> Result<Problem> {
        let scores = |o: crate::objectives::NodeScores| -> Box<dyn Objective> { Box::new(o) };
        let (objective, graph, node_ids): (Box<dyn Objective>, Graph, Vec<u64>) = match self {
            ObjectiveSpec::EigenvectorCentrality => {
                (scores(avg_node_score("eigenvector_centrality", eigenvector_centrality(&graph)?)), graph, node_ids)
            }
            ObjectiveSpec::DegreeCentrality => {
                (scores(avg_node_score("degree_centrality", degree_centrality(&graph)?)), graph, node_ids)
            }
            ObjectiveSpec::Pagerank { damping } => {
                (scores(avg_node_score("pagerank", pagerank(&graph, *damping, 1e-12)?)), graph, node_ids)
            }
            ObjectiveSpec::StandardizedPagerank => (scores(standardized_pagerank_objective(&graph)?), graph, node_ids),
            ObjectiveSpec::EigenvectorSignal { index } => {
                (scores(eigenvector_signal_objective(&graph, *index)?), graph, node_ids)
            }
            ObjectiveSpec::Ackley { noise_sigma, seed } => {
                let (rows, cols) = grid.ok_or_else(|| Error::Config("ackley needs a grid graph".into()))?;
                (scores(avg_node_score("ackley", ackley_grid_scores(rows, cols, *noise_sigma, *seed)?)), graph, node_ids)
            }
            ObjectiveSpec::FlattenCurve { params, seed } => {
                let p = params.unwrap_or_else(SirParams::flatten_curve);
                let obj = FlattenCurveObjective::new(graph.clone(), p, *seed)?;
                (Box::new(obj) as Box<dyn Objective>, graph, node_ids)
            }
            ObjectiveSpec::PatientZero { params, seed } => {
                let p = params.unwrap_or_else(SirParams::patient_zero);
                (scores(patient_zero_scores(&graph, &p, *seed)?), graph, node_ids)
            }
            ObjectiveSpec::Influence { params, seed } => {
                let obj = InfluenceObjective::new(graph.clone(), *params, *seed)?;
                (Box::new(obj) as Box<dyn Objective>, graph, node_ids)
            }
            ObjectiveSpec::TransitivityDrop => {
                let obj = TransitivityDropObjective::new(graph)?;
                let line = obj.line_graph().clone();
                let ids = (0..line.num_nodes() as u64).collect();
                (Box::new(obj) as Box<dyn Objective>, line, ids)
            }
        };
        Ok(Problem {
            description: objective.name(),
            graph,
            objective,
            node_ids,
        })
    }
}

pub fn is_known_method(name: &str) -> bool {
    matches!(name, "graphcombo" | "graphcombo_noisy") || BaselineKind::from_name(name).is_some()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, Vec<String>> {
        toml::from_str(text).map_err(|e| vec![e.to_string().trim_end().to_string()])
    }

    pub fn load(path: &Path) -> std::result::Result<Self, Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
        Self::parse(&text)
    }

    /// Every problem relevant to `purpose`, in file order. `base` resolves
    /// relative paths.
    pub fn problems(&self, purpose: Purpose, base: &Path) -> Vec<String> {
        let mut out = Vec::new();
        let needs_problem = matches!(purpose, Purpose::Run | Purpose::Sweep | Purpose::GroundTruth | Purpose::Generate);
        if needs_problem {
            match &self.graph {
                None => out.push("missing [graph] table".into()),
                Some(g) => out.extend(g.problems(base)),
            }
        }
        if matches!(purpose, Purpose::Run | Purpose::Sweep | Purpose::GroundTruth) {
            match &self.objective {
                None => out.push("missing [objective] table".into()),
                Some(o) => {
                    let nodes = self.graph.as_ref().and_then(GraphSpec::declared_nodes);
                    out.extend(o.problems(self.graph.as_ref(), nodes));
                }
            }
        }
        if matches!(purpose, Purpose::Run | Purpose::Sweep) {
            if self.methods.is_empty() {
                out.push("methods is empty; list at least one method".into());
            }
            for m in &self.methods {
                if !is_known_method(m) {
                    out.push(format!(
                        "unknown method {m:?}; expected graphcombo, graphcombo_noisy, {}",
                        BaselineKind::ALL.map(|b| b.name()).join(", ")
                    ));
                }
            }
            if self.n_seeds == 0 {
                out.push("n_seeds must be at least 1".into());
            }
            let nodes = self.universe_hint();
            let cells = if purpose == Purpose::Sweep {
                out.extend(self.sweep.problems());
                self.sweep.cells(&self.search)
            } else {
                vec![SweepCell {
                    settings: Vec::new(),
                    config: self.search.clone(),
                }]
            };
            for cell in cells {
                let label = if cell.settings.is_empty() {
                    "search".to_string()
                } else {
                    format!("sweep cell {}", cell_label(&cell.settings))
                };
                for p in cell.config.problems(nodes.unwrap_or(usize::MAX)) {
                    let p = format!("{label}: {p}");
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        if purpose == Purpose::GroundTruth && self.search.k == 0 {
            out.push("search.k must be at least 1".into());
        }
        if purpose == Purpose::KernelValidate {
            out.extend(self.kernel_validation.clone().unwrap_or_default().problems());
        }
        if purpose == Purpose::Smoothness {
            out.extend(self.smoothness.clone().unwrap_or_default().problems());
        }
        out
    }

    /// Size of the search universe when it is known without loading files.
    fn universe_hint(&self) -> Option<usize> {
        let nodes = self.graph.as_ref()?.declared_nodes()?;
        match self.objective {
            Some(ObjectiveSpec::TransitivityDrop) => None,
            _ => Some(nodes),
        }
    }

    pub fn build_problem(&self, base: &Path) -> Result<Problem> {
        let spec = self.graph.as_ref().ok_or_else(|| Error::Config("missing [graph] table".into()))?;
        let objective = self.objective.as_ref().ok_or_else(|| Error::Config("missing [objective] table".into()))?;
        let (graph, ids) = spec.build(base)?;
        let grid = match spec {
            GraphSpec::Grid { rows, cols } => Some((*rows, *cols)),
            _ => None,
        };
        let mut problem = objective.build(graph, ids, grid)?;
        problem.description = format!("{} on {}", problem.description, spec.describe());
        Ok(problem)
    }
}

pub fn cell_label(settings: &[(String, String)]) -> String {
    if settings.is_empty() {
        return "base".into();
    }
    settings.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "t"
methods = ["graphcombo", "random_search"]
n_seeds = 2

[graph]
generator = "ba"
n = 30
m = 2

[objective]
kind = "degree_centrality"

[search]
k = 2
budget = 5
q = 50
init_method = { method = "random_walk", n_init = 3 }
"#;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(c.search.k, 2);
        assert_eq!(c.search.failtol, 30);
        assert_eq!(c.search.init_method, crate::search::InitMethod::RandomWalk(3));
        assert!(c.problems(Purpose::Run, Path::new(".")).is_empty());
        let p = c.build_problem(Path::new(".")).unwrap();
        assert_eq!(p.graph.num_nodes(), 30);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASIC.replace("q = 50", "q = 50\nqq = 3");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err[0].contains("qq"), "{err:?}");
    }

    #[test]
    fn every_problem_is_reported() {
        let text = BASIC
            .replace("k = 2", "k = 0")
            .replace("budget = 5", "budget = 0")
            .replace("\"random_search\"", "\"annealing\"")
            .replace("n_seeds = 2", "n_seeds = 0")
            .replace("m = 2", "m = 40");
        let c = ExperimentConfig::parse(&text).unwrap();
        let p = c.problems(Purpose::Run, Path::new("."));
        assert_eq!(p.len(), 5, "{p:?}");
        assert!(p.iter().any(|s| s.contains("annealing")));
        assert!(p.iter().any(|s| s.contains("budget")));
    }

    #[test]
    fn missing_edge_list_is_reported() {
        let c = ExperimentConfig::parse(
            "methods = [\"graphcombo\"]\n[graph]\ngenerator = \"edge_list\"\npath = \"nope.txt\"\n[objective]\nkind = \"degree_centrality\"\n",
        )
        .unwrap();
        let p = c.problems(Purpose::Run, Path::new("/nonexistent"));
        assert!(p.iter().any(|s| s.contains("does not exist")));
    }

    #[test]
    fn sweep_cells_are_a_cartesian_product() {
        let axes = SweepAxes {
            q: Some(vec![500, 1000]),
            failtol: Some(vec![10, 30, 50]),
            ..SweepAxes::default()
        };
        let cells = axes.cells(&RunConfig::default());
        assert_eq!(cells.len(), 6);
        assert_eq!(cell_label(&cells[1].settings), "q=500,failtol=30");
        assert_eq!(cells[5].config.q, 1000);
        assert_eq!(cells[5].config.failtol, 50);
        assert_eq!(SweepAxes::default().cells(&RunConfig::default()).len(), 1);
    }

    #[test]
    fn ackley_requires_grid() {
        let text = BASIC.replace("kind = \"degree_centrality\"", "kind = \"ackley\"");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert!(c.problems(Purpose::Run, Path::new(".")).iter().any(|s| s.contains("grid")));
    }
}
