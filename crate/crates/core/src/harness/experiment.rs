//! Experiment orchestration: instances × algorithms × grid entries, run in
//! parallel, reduced to a solved-instance table.

use super::libsvm::parse_libsvm;
use super::synthetic::{generate, synthetic_suite, Problem, SyntheticSpec};
use crate::optimizers::{run, run_composite, Algorithm, RunConfig, RunSummary, RunTrace};
use crate::problems::{make_logistic, make_quadratic_2d, make_rosenbrock, make_smooth_svm, rosenbrock_start, with_reference_fstar};
use crate::{OsgmError, Parametrization, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Logistic,
    Svm,
}

/// Where an instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ProblemSpec {
    Synthetic(SyntheticSpec),
    /// The nine-instance synthetic suite.
    Suite {
        seed: u64,
    },
    Libsvm {
        path: PathBuf,
        model: Model,
        #[serde(default)]
        reg: f64,
    },
    Rosenbrock {
        n: usize,
    },
    Quadratic2d {
        kappa: f64,
    },
}

/// One point of an algorithm's hyperparameter grid.  `lr: None` means `1/L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    #[serde(default)]
    pub lr: Option<f64>,
    #[serde(default)]
    pub momentum: Option<f64>,
}

impl GridEntry {
    pub fn label(&self) -> String {
        let lr = self.lr.map_or("1/L".to_string(), |v| format!("{v:e}"));
        match self.momentum {
            Some(m) => format!("lr={lr};momentum={m}"),
            None => format!("lr={lr}"),
        }
    }
}

/// Tuning grids: momentum for heavy ball, learning rate for Adam and
/// AdaGrad, a single default entry for everything else.
pub fn default_grid(algorithm: Algorithm) -> Vec<GridEntry> {
    match algorithm {
        Algorithm::GdHb => [0.1, 0.5, 0.9, 0.99].iter().map(|&m| GridEntry { lr: None, momentum: Some(m) }).collect(),
        Algorithm::Adam | Algorithm::Adagrad => {
            let mut g = vec![GridEntry::default()];
            g.extend([1e-3, 1e-2, 1e-1, 1.0, 10.0].iter().map(|&lr| GridEntry { lr: Some(lr), momentum: None }));
            g
        }
        _ => vec![GridEntry::default()],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    /// Defaults to [`default_grid`].
    #[serde(default)]
    pub grid: Option<Vec<GridEntry>>,
}

impl AlgorithmSpec {
    pub fn new(algorithm: Algorithm) -> AlgorithmSpec {
        AlgorithmSpec { algorithm, grid: None }
    }

    pub fn entries(&self) -> Vec<GridEntry> {
        self.grid.clone().unwrap_or_else(|| default_grid(self.algorithm))
    }
}

/// Baselines and the lookahead heavy-ball method used for the solved-count table.
pub fn benchmark_algorithms() -> Vec<AlgorithmSpec> {
    [Algorithm::Gd, Algorithm::GdHb, Algorithm::AgdCvx, Algorithm::AgdScvx, Algorithm::Adam, Algorithm::Adagrad, Algorithm::OsgmBest]
        .into_iter()
        .map(AlgorithmSpec::new)
        .collect()
}

fn default_budget() -> u64 {
    RunConfig::DEFAULT_BUDGET
}
fn default_tol() -> f64 {
    RunConfig::DEFAULT_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    /// Traces and tables are written here when set.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problems: Vec<ProblemSpec>, algorithms: Vec<AlgorithmSpec>) -> ExperimentConfig {
        ExperimentConfig { problems, algorithms, budget: default_budget(), tol: default_tol(), seed: 0, out_dir: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(OsgmError::InvalidConfig("no algorithms".into()));
        }
        if let Some(a) = self.algorithms.iter().find(|a| a.entries().is_empty()) {
            return Err(OsgmError::InvalidConfig(format!("empty grid for {}", a.algorithm)));
        }
        if self.budget == 0 || !(self.tol > 0.0) {
            return Err(OsgmError::InvalidConfig("budget and tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| OsgmError::InvalidConfig(e.to_string()))
    }
}

/// A built instance with its fixed starting point (if it has a standard one).
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub problem: Problem,
    pub x0: Option<crate::Vector>,
}

/// Builds the instances named by `specs`; failures are kept per entry.
pub fn build_instances(specs: &[ProblemSpec]) -> Vec<(String, Result<Instance>)> {
    let mut out = Vec::new();
    for spec in specs {
        match spec {
            ProblemSpec::Suite { seed } => {
                for s in synthetic_suite(*seed) {
                    out.push((s.name(), from_synthetic(&s)));
                }
            }
            ProblemSpec::Synthetic(s) => out.push((s.name(), from_synthetic(s))),
            ProblemSpec::Libsvm { path, model, reg } => {
                let name = path.file_name().map_or("libsvm".into(), |n| n.to_string_lossy().into_owned());
                let name = format!("{name}-{}", if *model == Model::Logistic { "logistic" } else { "svm" });
                out.push((name.clone(), from_libsvm(path, *model, *reg, &name)));
            }
            ProblemSpec::Rosenbrock { n } => {
                let name = format!("rosenbrock-n{n}");
                let inst = make_rosenbrock(*n).map(|o| Instance { name: name.clone(), problem: Problem::Smooth(o), x0: Some(rosenbrock_start(*n)) });
                out.push((name, inst));
            }
            ProblemSpec::Quadratic2d { kappa } => {
                let name = format!("quadratic-2d-k{kappa}");
                let inst = make_quadratic_2d(*kappa).map(|o| Instance { name: name.clone(), problem: Problem::Smooth(o), x0: None });
                out.push((name, inst));
            }
        }
    }
    out
}

fn from_synthetic(s: &SyntheticSpec) -> Result<Instance> {
    let g = generate(s)?;
    Ok(Instance { name: g.name, problem: g.problem, x0: None })
}

fn from_libsvm(path: &Path, model: Model, reg: f64, name: &str) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| OsgmError::Io(format!("{}: {e}", path.display())))?;
    let design = parse_libsvm(&text)?.to_design()?;
    let obj = match model {
        Model::Logistic => make_logistic(design, reg)?,
        Model::Svm => make_smooth_svm(design, reg)?,
    };
    Ok(Instance { name: name.into(), problem: Problem::Smooth(with_reference_fstar(obj.with_name(name))), x0: None })
}

/// Run configuration for one grid entry.
pub fn run_config(algorithm: Algorithm, entry: &GridEntry, budget: u64, tol: f64, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(algorithm).with_budget(budget).with_tol(tol).with_seed(seed);
    if let Some(lr) = entry.lr {
        cfg = cfg.with_lr(lr);
    }
    if let Some(m) = entry.momentum {
        cfg = cfg.with_momentum(m);
    }
    if algorithm == Algorithm::OsgmBb {
        cfg = cfg.with_parametrization(Parametrization::Scalar);
    }
    cfg
}

/// Runs one configuration on private oracle counters and checks that the
/// trace's count equals the counters exactly.
pub fn run_instance(inst: &Instance, cfg: &RunConfig) -> Result<RunTrace> {
    let cfg = match &inst.x0 {
        Some(x0) if cfg.x0.is_none() => cfg.clone().with_x0(x0.clone()),
        _ => cfg.clone(),
    };
    let (trace, counts) = match &inst.problem {
        Problem::Smooth(o) => {
            let o = o.with_fresh_counters();
            let t = run(&o, &cfg)?;
            (t, o.counts())
        }
        Problem::Composite(c) => {
            let mut c = c.clone();
            c.smooth = c.smooth.with_fresh_counters();
            let t = run_composite(&c, &cfg)?;
            (t, c.smooth.counts())
        }
    };
    if trace.counts != counts {
        return Err(OsgmError::Io(format!("oracle audit failed on {}: trace {:?}, counters {counts:?}", inst.name, trace.counts)));
    }
    Ok(trace)
}

/// One `(instance, algorithm, grid entry)` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub instance: String,
    pub algorithm: Algorithm,
    pub grid_index: usize,
    pub grid: String,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

impl RunOutcome {
    pub fn solved(&self) -> bool {
        self.summary.as_ref().is_some_and(|s| s.status == crate::RunStatus::Converged)
    }

    fn file_stem(&self) -> String {
        let clean = |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect::<String>();
        format!("{}__{}__g{}", clean(&self.instance), self.algorithm, self.grid_index)
    }
}

/// Best grid entry of one algorithm on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub oracles: u64,
    pub grid: String,
}

/// Solved instances per algorithm; `cells[a][i]` is `None` when unsolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    pub algorithms: Vec<Algorithm>,
    pub instances: Vec<String>,
    pub cells: Vec<Vec<Option<Cell>>>,
    /// Instances that could not be built.
    pub errors: Vec<(String, String)>,
}

pub const STATS_CSV_HEADER: &str = "algorithm,instance,solved,oracles,grid";
pub const SOLVED_CSV_HEADER: &str = "algorithm,solved,instances";
pub const RUNS_CSV_HEADER: &str = "instance,algorithm,grid,status,iterations,oracles,final_f,final_gnorm_inf,error";

impl StatsTable {
    pub fn solved_count(&self, algorithm: Algorithm) -> usize {
        self.algorithms.iter().position(|a| *a == algorithm).map_or(0, |i| self.cells[i].iter().filter(|c| c.is_some()).count())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{STATS_CSV_HEADER}\n");
        for (a, row) in self.algorithms.iter().zip(&self.cells) {
            for (inst, cell) in self.instances.iter().zip(row) {
                match cell {
                    Some(c) => writeln!(out, "{a},{inst},true,{},{}", c.oracles, c.grid),
                    None => writeln!(out, "{a},{inst},false,,"),
                }
                .expect("writing to a string");
            }
        }
        out
    }

    pub fn solved_csv(&self) -> String {
        let mut out = format!("{SOLVED_CSV_HEADER}\n");
        for a in &self.algorithms {
            let _ = writeln!(out, "{a},{},{}", self.solved_count(*a), self.instances.len());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub stats: StatsTable,
    pub runs: Vec<RunOutcome>,
}

impl ExperimentResult {
    pub fn runs_csv(&self) -> String {
        use crate::optimizers::fmt_num;
        let mut out = format!("{RUNS_CSV_HEADER}\n");
        for r in &self.runs {
            let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            match &r.summary {
                Some(s) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{err}",
                        r.instance,
                        r.algorithm,
                        r.grid,
                        s.status.name(),
                        s.iterations,
                        s.oracles,
                        fmt_num(s.final_f),
                        fmt_num(s.final_gnorm_inf)
                    );
                }
                None => {
                    let _ = writeln!(out, "{},{},{},error,,,,,{err}", r.instance, r.algorithm, r.grid);
                }
            }
        }
        out
    }
}

/// Runs every grid entry of every algorithm on every instance.  All runs on
/// an instance start from the same point for a given seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let built = build_instances(&cfg.problems);
    let mut instances = Vec::new();
    let mut errors = Vec::new();
    for (name, inst) in built {
        match inst {
            Ok(i) => instances.push(i),
            Err(e) => errors.push((name, e.to_string())),
        }
    }
    let trace_dir = cfg.out_dir.as_ref().map(|d| d.join("traces"));
    if let Some(d) = &trace_dir {
        std::fs::create_dir_all(d)?;
    }
    let mut jobs = Vec::new();
    for (ii, _) in instances.iter().enumerate() {
        for (ai, spec) in cfg.algorithms.iter().enumerate() {
            for (gi, entry) in spec.entries().into_iter().enumerate() {
                jobs.push((ii, ai, gi, entry));
            }
        }
    }
    let mut runs: Vec<(usize, usize, usize, RunOutcome)> = jobs
        .par_iter()
        .map(|&(ii, ai, gi, entry)| {
            let inst = &instances[ii];
            let algorithm = cfg.algorithms[ai].algorithm;
            let rc = run_config(algorithm, &entry, cfg.budget, cfg.tol, cfg.seed);
            let mut outcome = RunOutcome { instance: inst.name.clone(), algorithm, grid_index: gi, grid: entry.label(), summary: None, error: None };
            match run_instance(inst, &rc) {
                Ok(t) => {
                    if let Some(d) = &trace_dir {
                        let stem = outcome.file_stem();
                        let written = std::fs::write(d.join(format!("{stem}.csv")), t.to_csv())
                            .and_then(|_| std::fs::write(d.join(format!("{stem}.json")), t.summary_json().unwrap_or_default()));
                        if let Err(e) = written {
                            outcome.error = Some(e.to_string());
                        }
                    }
                    outcome.summary = Some(t.summary());
                }
                Err(e) => outcome.error = Some(e.to_string()),
            }
            (ii, ai, gi, outcome)
        })
        .collect();
    runs.sort_by_key(|r| (r.0, r.1, r.2));
    let mut cells = vec![vec![None; instances.len()]; cfg.algorithms.len()];
    for (ii, ai, _, r) in &runs {
        if !r.solved() {
            continue;
        }
        let oracles = r.summary.as_ref().map_or(u64::MAX, |s| s.oracles);
        let cell: &mut Option<Cell> = &mut cells[*ai][*ii];
        if cell.as_ref().is_none_or(|c| oracles < c.oracles) {
            *cell = Some(Cell { oracles, grid: r.grid.clone() });
        }
    }
    let stats = StatsTable {
        algorithms: cfg.algorithms.iter().map(|a| a.algorithm).collect(),
        instances: instances.iter().map(|i| i.name.clone()).collect(),
        cells,
        errors,
    };
    let result = ExperimentResult { stats, runs: runs.into_iter().map(|r| r.3).collect() };
    if let Some(d) = &cfg.out_dir {
        std::fs::write(d.join("stats.csv"), result.stats.to_csv())?;
        std::fs::write(d.join("solved.csv"), result.stats.solved_csv())?;
        std::fs::write(d.join("runs.csv"), result.runs_csv())?;
    }
    Ok(result)
}
