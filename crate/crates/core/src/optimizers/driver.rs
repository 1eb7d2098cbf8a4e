//! Bookkeeping shared by every method: budget, stopping tests and records.

use super::config::{Algorithm, RunConfig};
use super::trace::{IterRecord, RunStatus, RunTrace};
use crate::feedback::EvalPoint;
use crate::linalg::{norm_inf, random_unit_vector};
use crate::problems::{Objective, OracleCounts};
use crate::stepsizes::{Parametrization, Stepsize};
use crate::{OsgmError, Result, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Starting point: the configured one, or a seeded unit vector.
pub fn resolve_x0(cfg: &RunConfig, n: usize) -> Result<Vector> {
    match &cfg.x0 {
        Some(x) if x.len() != n => Err(OsgmError::InvalidConfig(format!("x0 has length {} but the problem has dimension {n}", x.len()))),
        Some(x) => Ok(x.clone()),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            Ok(random_unit_vector(n, &mut rng))
        }
    }
}

/// Initial stepsize: the configured one, or `c·I` in the configured parametrization.
pub fn resolve_p0(cfg: &RunConfig, n: usize, c: f64) -> Result<Stepsize> {
    let p = cfg.p0.clone().unwrap_or_else(|| Stepsize::scaled_identity(cfg.parametrization, n, c));
    match (&p, p.dim()) {
        (_, Some(d)) if d != n => Err(OsgmError::InvalidConfig(format!("initial stepsize has size {d} but the problem has dimension {n}"))),
        (Stepsize::Full(m), _) if m.ncols() != n => Err(OsgmError::InvalidConfig("initial stepsize matrix is not square".into())),
        _ => Ok(p),
    }
}

pub fn require_scalar(p: &Stepsize, what: &str) -> Result<()> {
    if p.kind() != Parametrization::Scalar {
        return Err(OsgmError::UnsupportedParametrization(format!("{what} needs a scalar stepsize, got {}", p.kind())));
    }
    Ok(())
}

pub struct Driver<'a> {
    obj: &'a Objective,
    cfg: &'a RunConfig,
    algorithm: Algorithm,
    start: OracleCounts,
    pub records: Vec<IterRecord>,
    pub memory_vectors: Option<usize>,
    pub notes: Vec<String>,
}

impl<'a> Driver<'a> {
    pub fn new(obj: &'a Objective, cfg: &'a RunConfig, algorithm: Algorithm) -> Result<Driver<'a>> {
        cfg.validate()?;
        Ok(Driver { obj, cfg, algorithm, start: obj.counts(), records: Vec::new(), memory_vectors: None, notes: Vec::new() })
    }

    pub fn used(&self) -> u64 {
        (self.obj.counts() - self.start).gradients
    }

    /// Opens the record for iteration `k` at `cur` and decides whether to stop
    /// before spending `cost` more gradient oracles.
    pub fn open(&mut self, k: usize, cur: &EvalPoint, cost: u64) -> Option<RunStatus> {
        self.open_with(k, cur.f, &cur.g, &cur.x, cost)
    }

    /// As [`Driver::open`] with an explicit merit value and stationarity measure.
    pub fn open_with(&mut self, k: usize, f: f64, g: &Vector, x: &Vector, cost: u64) -> Option<RunStatus> {
        let mut rec = IterRecord::open(k, f, g, self.used());
        if self.cfg.record_iterates {
            rec.x = Some(x.clone());
        }
        self.records.push(rec);
        let finite = f.is_finite() && g.iter().all(|v| v.is_finite()) && x.iter().all(|v| v.is_finite());
        if !finite {
            Some(RunStatus::Diverged)
        } else if norm_inf(g) <= self.cfg.tol {
            Some(RunStatus::Converged)
        } else if k > self.cfg.max_iters {
            Some(RunStatus::MaxIterations)
        } else if self.used() + cost > self.cfg.budget {
            Some(RunStatus::BudgetExhausted)
        } else {
            None
        }
    }

    pub fn last(&mut self) -> &mut IterRecord {
        self.records.last_mut().expect("a record is open")
    }

    pub fn finish(self, status: RunStatus, x: Vector, f: f64, g: &Vector) -> RunTrace {
        let mut notes = self.notes;
        if let Some(m) = self.memory_vectors {
            if m > 7 {
                notes.push(format!("working set of {m} vectors exceeds 7"));
            }
        }
        RunTrace {
            algorithm: self.algorithm.name().to_string(),
            problem: self.obj.name().to_string(),
            records: self.records,
            status,
            x_final: x,
            f_final: f,
            gnorm_inf_final: norm_inf(g),
            counts: self.obj.counts() - self.start,
            memory_vectors: self.memory_vectors,
            notes,
        }
    }
}
