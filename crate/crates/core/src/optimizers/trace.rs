use crate::problems::OracleCounts;
use crate::{Result, Vector};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
    MaxIterations,
    Diverged,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::BudgetExhausted => "budget-exhausted",
            RunStatus::MaxIterations => "max-iterations",
            RunStatus::Diverged => "diverged",
        }
    }
}

/// One iteration: the state at the top of iteration `k` and what the
/// iteration did with it.  The terminal record has `NaN` step fields.
#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// `f(x^k)`, or `φ(x^k)` for composite runs.
    pub f: f64,
    /// Norms of `∇f(x^k)`, or of the gradient map for composite runs.
    pub gnorm_inf: f64,
    pub gnorm_2: f64,
    /// Heavy-ball potential `φ_ω(z^k)` (shifted by `f*` when known), `NaN` otherwise.
    pub potential: f64,
    /// Feedback at the stepsize used in this iteration.
    pub feedback: f64,
    /// Dual norm of the feedback gradient.
    pub feedback_grad_norm: f64,
    /// Normalized merit change `b_k` or `h_k`.
    pub progress: f64,
    pub step_summary: f64,
    pub beta: f64,
    pub lambda: f64,
    pub accepted: bool,
    /// Gradient oracles spent when the record was opened.
    pub oracles: u64,
    pub x: Option<Vector>,
    /// Reference point `z₂^k` of heavy-ball runs.
    pub z2: Option<Vector>,
}

impl IterRecord {
    pub fn open(k: usize, f: f64, g: &Vector, oracles: u64) -> IterRecord {
        IterRecord {
            k,
            f,
            gnorm_inf: crate::linalg::norm_inf(g),
            gnorm_2: g.norm(),
            potential: f64::NAN,
            feedback: f64::NAN,
            feedback_grad_norm: f64::NAN,
            progress: f64::NAN,
            step_summary: f64::NAN,
            beta: f64::NAN,
            lambda: f64::NAN,
            accepted: false,
            oracles,
            x: None,
            z2: None,
        }
    }
}

/// Fixed CSV header of the per-iteration trace.
pub const TRACE_CSV_HEADER: &str = "k,f,gnorm_inf,gnorm_2,potential,feedback,progress,step_summary,oracles";

/// Full record of a run.
#[derive(Clone, Debug)]
pub struct RunTrace {
    pub algorithm: String,
    pub problem: String,
    pub records: Vec<IterRecord>,
    pub status: RunStatus,
    pub x_final: Vector,
    pub f_final: f64,
    pub gnorm_inf_final: f64,
    /// Oracles charged to the objective during the run.
    pub counts: OracleCounts,
    /// Working-set size in vectors of length `n` (learned-stepsize methods).
    pub memory_vectors: Option<usize>,
    pub notes: Vec<String>,
}

/// Terminal summary written next to every trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub problem: String,
    pub status: RunStatus,
    pub iterations: usize,
    pub oracles: u64,
    pub final_f: f64,
    pub final_gnorm_inf: f64,
    pub memory_vectors: Option<usize>,
    pub notes: Vec<String>,
}

/// Formats with 17 significant digits; non-finite values print as `nan`/`inf`/`-inf`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl RunTrace {
    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn oracles(&self) -> u64 {
        self.counts.gradients
    }

    pub fn solved(&self) -> bool {
        self.status == RunStatus::Converged
    }

    pub fn f_column(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f).collect()
    }

    pub fn step_column(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.step_summary).collect()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            algorithm: self.algorithm.clone(),
            problem: self.problem.clone(),
            status: self.status,
            iterations: self.iterations(),
            oracles: self.oracles(),
            final_f: self.f_final,
            final_gnorm_inf: self.gnorm_inf_final,
            memory_vectors: self.memory_vectors,
            notes: self.notes.clone(),
        }
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.summary()).map_err(|e| crate::OsgmError::Io(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.k,
                fmt_num(r.f),
                fmt_num(r.gnorm_inf),
                fmt_num(r.gnorm_2),
                fmt_num(r.potential),
                fmt_num(r.feedback),
                fmt_num(r.progress),
                fmt_num(r.step_summary),
                r.oracles
            );
        }
        out
    }
}
