//! Scale-free stepsize dynamics of scalar hypergradient methods on
//! quadratics `f(x) = ½xᵀΛx`.
//!
//! Writing `x = ‖x‖ẑ`, both the scalar stepsize update and the direction of
//! the next iterate depend only on `(α, ẑ)`, which gives two maps:
//! `F_HDM` steps with the freshly updated stepsize and `F_OSGM` with the old one.

use crate::optimizers::{run, Algorithm, RunConfig, RunStatus, RunTrace};
use crate::problems::QuadraticProblem;
use crate::{Matrix, OsgmError, Parametrization, Result, Stepsize, Vector};
use serde::{Deserialize, Serialize};

/// Minimum gap between consecutive sorted eigenvalues.
pub const EIGEN_GAP: f64 = 1e-8;
/// Central-difference step for numerical Jacobians.
pub const FD_STEP: f64 = 1e-7;
const DEGENERATE: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Hdm,
    Osgm,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Hdm => "hdm",
            MapKind::Osgm => "osgm",
        }
    }
}

/// Stepsize and unit direction of the iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct DynState {
    pub alpha: f64,
    pub zhat: Vector,
}

impl DynState {
    /// Normalizes `z`; fails on a zero direction.
    pub fn new(alpha: f64, z: Vector) -> Result<DynState> {
        let nz = z.norm();
        if !(nz > DEGENERATE) || !nz.is_finite() {
            return Err(OsgmError::DegenerateDirection(nz));
        }
        Ok(DynState { alpha, zhat: z / nz })
    }

    fn to_vec(&self) -> Vector {
        let n = self.zhat.len();
        Vector::from_fn(n + 1, |i, _| if i == 0 { self.alpha } else { self.zhat[i - 1] })
    }

    fn from_vec(v: &Vector) -> DynState {
        DynState { alpha: v[0], zhat: v.rows(1, v.len() - 1).into_owned() }
    }

    pub fn distance(&self, other: &DynState) -> f64 {
        (self.alpha - other.alpha).abs().max((&self.zhat - &other.zhat).amax())
    }
}

/// Checks that `Λ` has positive entries separated by at least [`EIGEN_GAP`].
pub fn check_spectrum(lambda: &Vector) -> Result<()> {
    if lambda.is_empty() || lambda.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(OsgmError::InvalidParameter("eigenvalues must be positive and finite".into()));
    }
    let mut s: Vec<f64> = lambda.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    if s.windows(2).any(|w| w[1] - w[0] < EIGEN_GAP) {
        return Err(OsgmError::InvalidParameter(format!("eigenvalues must differ by at least {EIGEN_GAP:e}")));
    }
    Ok(())
}

/// `α⁺(ẑ) = α + η − αη⟨ẑ, Λ³ẑ⟩/⟨ẑ, Λ²ẑ⟩`.
pub fn alpha_update(s: &DynState, lambda: &Vector, eta: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (z, l) in s.zhat.iter().zip(lambda.iter()) {
        let w = z * z * l * l;
        den += w;
        num += w * l;
    }
    s.alpha + eta - s.alpha * eta * num / den
}

fn step_unchecked(kind: MapKind, s: &DynState, lambda: &Vector, eta: f64) -> Result<DynState> {
    let a_next = alpha_update(s, lambda, eta);
    let a_step = match kind {
        MapKind::Hdm => a_next,
        MapKind::Osgm => s.alpha,
    };
    let u = s.zhat.zip_map(lambda, |z, l| (1.0 - a_step * l) * z);
    let nu = u.norm();
    if !(nu >= DEGENERATE) {
        return Err(OsgmError::DegenerateDirection(nu));
    }
    Ok(DynState { alpha: a_next, zhat: u / nu })
}

pub fn step(kind: MapKind, s: &DynState, lambda: &Vector, eta: f64) -> Result<DynState> {
    check_spectrum(lambda)?;
    step_unchecked(kind, s, lambda, eta)
}

pub fn step_hdm(s: &DynState, lambda: &Vector, eta: f64) -> Result<DynState> {
    step(MapKind::Hdm, s, lambda, eta)
}

pub fn step_osgm(s: &DynState, lambda: &Vector, eta: f64) -> Result<DynState> {
    step(MapKind::Osgm, s, lambda, eta)
}

/// Eigenvalues `L = λ₁ > … > λ_n = μ`, evenly spaced.
pub fn orbit_spectrum(l: f64, mu: f64, n: usize) -> Result<Vector> {
    if !(l > mu && mu > 0.0) || n < 2 {
        return Err(OsgmError::InvalidParameter(format!("need L > μ > 0 and n ≥ 2, got L = {l}, μ = {mu}, n = {n}")));
    }
    Ok(Vector::from_fn(n, |i, _| l - (l - mu) * i as f64 / (n - 1) as f64))
}

/// The two states `(2/(L+μ), ±γe₁ + δe_n)` with `γ = μ/√(L²+μ²)`,
/// `δ = L/√(L²+μ²)`; `delta_sign` flips `δ`.
pub fn orbit(l: f64, mu: f64, n: usize, delta_sign: f64) -> Result<(DynState, DynState)> {
    orbit_spectrum(l, mu, n)?;
    let r = (l * l + mu * mu).sqrt();
    let (g, d) = (mu / r, delta_sign.signum() * l / r);
    let a = 2.0 / (l + mu);
    let mut z1 = Vector::zeros(n);
    let mut z2 = Vector::zeros(n);
    z1[0] = g;
    z1[n - 1] = d;
    z2[0] = -g;
    z2[n - 1] = d;
    Ok((DynState { alpha: a, zhat: z1 }, DynState { alpha: a, zhat: z2 }))
}

/// Central-difference Jacobian of a map on the ambient `(α, ẑ)` coordinates.
pub fn numeric_jacobian(kind: MapKind, s: &DynState, lambda: &Vector, eta: f64) -> Result<Matrix> {
    check_spectrum(lambda)?;
    let v = s.to_vec();
    let m = v.len();
    let mut jac = Matrix::zeros(m, m);
    for j in 0..m {
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[j] += FD_STEP;
        vm[j] -= FD_STEP;
        let fp = step_unchecked(kind, &DynState::from_vec(&vp), lambda, eta)?.to_vec();
        let fm = step_unchecked(kind, &DynState::from_vec(&vm), lambda, eta)?.to_vec();
        jac.set_column(j, &((fp - fm) / (2.0 * FD_STEP)));
    }
    Ok(jac)
}

/// Eigenvalue magnitudes, descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn of(m: &Matrix) -> Spectrum {
        let mut magnitudes: Vec<f64> = m.clone().complex_eigenvalues().iter().map(|c| c.norm()).collect();
        magnitudes.sort_by(|a, b| b.total_cmp(a));
        Spectrum { magnitudes }
    }

    pub fn radius(&self) -> f64 {
        self.magnitudes.first().copied().unwrap_or(0.0)
    }

    /// Distance from `v` to the nearest magnitude.
    pub fn distance_to(&self, v: f64) -> f64 {
        self.magnitudes.iter().map(|m| (m - v).abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Spectrum of `J(orbit₂)·J(orbit₁)` with `η = θ/L`.
pub fn orbit_product_spectrum(kind: MapKind, l: f64, mu: f64, n: usize, theta: f64) -> Result<Spectrum> {
    let lambda = orbit_spectrum(l, mu, n)?;
    let (s1, s2) = orbit(l, mu, n, 1.0)?;
    let eta = theta / l;
    let j1 = numeric_jacobian(kind, &s1, &lambda, eta)?;
    let j2 = numeric_jacobian(kind, &s2, &lambda, eta)?;
    Ok(Spectrum::of(&(j2 * j1)))
}

/// Spectral radius of the Jacobian product on the orbit, `η = 1/L`.
pub fn orbit_spectral_radius(kind: MapKind, l: f64, mu: f64, n: usize) -> Result<f64> {
    Ok(orbit_product_spectrum(kind, l, mu, n, 1.0)?.radius())
}

/// `(3κ + 1)/(2κ)`.
pub fn osgm_orbit_radius(kappa: f64) -> f64 {
    (3.0 * kappa + 1.0) / (2.0 * kappa)
}

/// One row of a spectral sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: MapKind,
    pub kappa: f64,
    pub rho_numeric: f64,
    /// `NaN` where no closed form is available.
    pub rho_closed_form: f64,
    pub abs_err: f64,
}

pub const SWEEP_CSV_HEADER: &str = "kind,kappa,rho_numeric,rho_closed_form,abs_err";

/// Radii for both maps over `kappas` with `μ = 1`, `L = κ` and `η = θ/L`.
pub fn spectral_sweep(kappas: &[f64], n: usize, theta: f64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &kappa in kappas {
        for kind in [MapKind::Hdm, MapKind::Osgm] {
            let rho = orbit_product_spectrum(kind, kappa, 1.0, n, theta)?.radius();
            let closed = match kind {
                MapKind::Osgm if theta == 1.0 => osgm_orbit_radius(kappa),
                _ => f64::NAN,
            };
            rows.push(SweepRow { kind, kappa, rho_numeric: rho, rho_closed_form: closed, abs_err: (rho - closed).abs() });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    use crate::optimizers::fmt_num;
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.kind.name(),
            fmt_num(r.kappa),
            fmt_num(r.rho_numeric),
            fmt_num(r.rho_closed_form),
            fmt_num(r.abs_err)
        ));
    }
    out
}

/// Stepsizes `α₂, α₃, …` produced by iterating a map from `s`.
pub fn stepsize_path(kind: MapKind, s: &DynState, lambda: &Vector, eta: f64, iters: usize) -> Result<Vec<f64>> {
    check_spectrum(lambda)?;
    let mut cur = s.clone();
    let mut out = Vec::with_capacity(iters);
    for _ in 0..iters {
        cur = step_unchecked(kind, &cur, lambda, eta)?;
        out.push(cur.alpha);
    }
    Ok(out)
}

/// Number of times the path leaves the band `|α − c| ≤ rel·c`, counted from index `from`.
pub fn band_exits(path: &[f64], center: f64, rel: f64, from: usize) -> usize {
    let inside = |a: f64| (a - center).abs() <= rel * center;
    path.get(from..).unwrap_or(&[]).windows(2).filter(|w| inside(w[0]) && !inside(w[1])).count()
}

/// Whether every entry from `from` on lies in the band.
pub fn stays_in_band(path: &[f64], center: f64, rel: f64, from: usize) -> bool {
    path.get(from..).unwrap_or(&[]).iter().all(|a| (a - center).abs() <= rel * center)
}

/// `f(x) = ½x₁² + (κ/2)x₂²` as an objective.
pub fn spike_objective(kappa: f64) -> Result<crate::Objective> {
    Ok(QuadraticProblem::diagonal(&[1.0, kappa])?.objective().with_name(format!("spike-k{kappa:e}")))
}

/// Run configuration of the scenario: scalar stepsize from `α₁ = 0` at `(1, δ)`.
pub fn spike_config(algorithm: Algorithm, eta: f64, delta: f64, iters: usize) -> RunConfig {
    RunConfig::new(algorithm)
        .with_parametrization(Parametrization::Scalar)
        .with_p0(Stepsize::Scalar(0.0))
        .with_eta(eta)
        .with_x0(Vector::from_vec(vec![1.0, delta]))
        .with_tol(1e-300)
        .with_budget(iters as u64 + 1)
        .with_max_iters(iters)
}

/// A starting point whose vanilla run rises above `f(x¹)`.
#[derive(Clone, Debug)]
pub struct SpikeScenario {
    pub kappa: f64,
    pub eta: f64,
    pub delta: f64,
    /// First iteration with `f(x^k) > f(x¹)`.
    pub onset: usize,
    /// `max_k f(x^k)/f(x¹)`.
    pub max_ratio: f64,
    pub trace: RunTrace,
}

impl SpikeScenario {
    pub fn x1(&self) -> Vector {
        Vector::from_vec(vec![1.0, self.delta])
    }
}

fn spike_onset(obj: &crate::Objective, eta: f64, delta: f64, iters: usize) -> Result<(Option<usize>, RunTrace)> {
    let t = run(obj, &spike_config(Algorithm::OsgmH, eta, delta, iters))?;
    let f1 = t.records[0].f;
    let onset = t.records.iter().find(|r| r.f > f1).map(|r| r.k);
    Ok((onset, t))
}

/// Searches `δ ∈ [1e-300, 1e-2]` for a vanilla run that rises above `f(x¹)`
/// close to iteration `target_k`.
///
/// Small `δ` delays the divergence phase, so the onset grows roughly like
/// `log(1/δ)`.  A coarse scan over `δ = 10^{-e/4}` locates the spiking starts,
/// and a bisection in `log δ` between the scan points bracketing `target_k`
/// moves the onset towards it.
pub fn spike_scenario(kappa: f64, eta: f64, target_k: usize) -> Result<SpikeScenario> {
    if !(kappa >= 2.0) || !(eta > 0.0) || target_k == 0 {
        return Err(OsgmError::InvalidParameter(format!("need κ ≥ 2, η > 0 and target_K > 0, got {kappa}, {eta}, {target_k}")));
    }
    let obj = spike_objective(kappa)?;
    let iters = 4 * target_k + 100;
    let mut best: Option<(f64, usize)> = None;
    let mut scan: Vec<(f64, Option<usize>)> = Vec::new();
    let score = |onset: usize| (onset as f64 - target_k as f64).abs();
    for e in 8..=1200 {
        let delta = 10f64.powf(-(e as f64) / 4.0);
        let (onset, _) = spike_onset(&obj, eta, delta, iters)?;
        if let Some(k) = onset {
            if best.is_none_or(|(_, bk)| score(k) < score(bk)) {
                best = Some((delta, k));
            }
        }
        scan.push((delta, onset));
    }
    // refine between neighbours that straddle the target
    for w in scan.windows(2) {
        let (Some(k0), Some(k1)) = (w[0].1, w[1].1) else { continue };
        if !((k0 <= target_k && target_k <= k1) || (k1 <= target_k && target_k <= k0)) {
            continue;
        }
        let (mut lo, mut hi) = (w[0].0.ln(), w[1].0.ln());
        let lo_below = k0 <= target_k;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let delta = mid.exp();
            let (onset, _) = spike_onset(&obj, eta, delta, iters)?;
            let Some(k) = onset else { break };
            if best.is_none_or(|(_, bk)| score(k) < score(bk)) {
                best = Some((delta, k));
            }
            if k == target_k {
                break;
            }
            if (k < target_k) == lo_below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let (delta, _) = best.ok_or_else(|| OsgmError::ScenarioNotFound(format!("no spike for κ = {kappa:e}, η = {eta:e} with δ in [1e-300, 1e-2]")))?;
    let (onset, trace) = spike_onset(&obj, eta, delta, iters)?;
    let f1 = trace.records[0].f;
    let max_ratio = trace.records.iter().map(|r| r.f / f1).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpikeScenario { kappa, eta, delta, onset: onset.expect("replayed run spikes"), max_ratio, trace })
}

/// Monotone run on the scenario's inputs.
pub fn spike_monotone_replay(sc: &SpikeScenario) -> Result<RunTrace> {
    let obj = spike_objective(sc.kappa)?;
    run(&obj, &spike_config(Algorithm::OsgmHMonotone, sc.eta, sc.delta, sc.trace.records.len()))
}

/// Iterations `k` where `α_k ≤ 1/2` and `|x₁^k| ≥ √2·κ^{3/2}|x₂^k|` but
/// `α_{k+1} < α_k + η/4`.  Needs a trace with recorded iterates.
pub fn increase_phase_violations(trace: &RunTrace, kappa: f64, eta: f64) -> Vec<usize> {
    let c = 2f64.sqrt() * kappa.powf(1.5);
    trace
        .records
        .windows(2)
        .filter(|w| w[0].step_summary.is_finite() && w[1].step_summary.is_finite())
        .filter_map(|w| {
            let x = w[0].x.as_ref()?;
            let pre = w[0].step_summary <= 0.5 && x[0].abs() >= c * x[1].abs();
            (pre && w[1].step_summary < w[0].step_summary + eta / 4.0).then_some(w[0].k)
        })
        .collect()
}

/// True if the run ended because it spent its iteration allowance.
pub fn ran_to_completion(t: &RunTrace) -> bool {
    matches!(t.status, RunStatus::MaxIterations | RunStatus::BudgetExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_eigenvalue_fixed_point() {
        let lam = Vector::from_vec(vec![2.5]);
        let s = DynState::new(0.4, Vector::from_vec(vec![1.0])).unwrap();
        assert!((alpha_update(&s, &lam, 0.3) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn orbit_constants() {
        let (s1, s2) = orbit(4.0, 1.0, 2, 1.0).unwrap();
        assert_eq!(s1.alpha, 0.4);
        assert!((s1.zhat[0] - 1.0 / 17f64.sqrt()).abs() < 1e-15);
        assert!((s1.zhat[1] - 4.0 / 17f64.sqrt()).abs() < 1e-15);
        assert!((s1.zhat.norm() - 1.0).abs() < 1e-15);
        assert!((16.0 * s1.zhat[0].powi(2) - s1.zhat[1].powi(2)).abs() < 1e-15);
        assert_eq!(s2.zhat[0], -s1.zhat[0]);
        let lam = orbit_spectrum(4.0, 1.0, 2).unwrap();
        for kind in [MapKind::Hdm, MapKind::Osgm] {
            assert!(step(kind, &s1, &lam, 0.25).unwrap().distance(&s2) < 1e-12);
        }
    }

    #[test]
    fn radii_at_four() {
        let o = orbit_spectral_radius(MapKind::Osgm, 4.0, 1.0, 2).unwrap();
        assert!((o - 1.625).abs() < 1e-6);
        let h = orbit_spectral_radius(MapKind::Hdm, 4.0, 1.0, 2).unwrap();
        assert!(h < 1.0 - 1e-6);
    }

    #[test]
    fn interior_eigenvalues_are_scaled() {
        // Interior modes contract by (1 − α*λ_i)/(1 − α*μ) per step relative
        // to the orbit direction, i.e. ((κ+1)/(κ−1))²(1 − α*λ_i)² over two steps.
        for kappa in [2.0, 4.0, 10.0] {
            let lam = orbit_spectrum(kappa, 1.0, 4).unwrap();
            let a = 2.0 / (kappa + 1.0);
            for kind in [MapKind::Hdm, MapKind::Osgm] {
                let sp = orbit_product_spectrum(kind, kappa, 1.0, 4, 1.0).unwrap();
                for &li in &[lam[1], lam[2]] {
                    let scaled = ((kappa + 1.0) / (kappa - 1.0)).powi(2) * (1.0 - a * li).powi(2);
                    assert!(sp.distance_to(scaled) < 1e-6);
                    let plain = (1.0 - a * li).powi(2);
                    assert!(sp.distance_to(plain) > 1e-3);
                }
            }
        }
    }

    #[test]
    fn rejects_close_eigenvalues() {
        let lam = Vector::from_vec(vec![1.0, 1.0 + 1e-10]);
        let s = DynState::new(0.1, Vector::from_vec(vec![1.0, 1.0])).unwrap();
        assert!(step_hdm(&s, &lam, 0.1).is_err());
    }

    #[test]
    fn annihilated_direction_is_degenerate() {
        let lam = Vector::from_vec(vec![2.0, 4.0]);
        let s = DynState { alpha: 0.5, zhat: Vector::from_vec(vec![1.0, 0.0]) };
        assert!(matches!(step_osgm(&s, &lam, 0.1), Err(OsgmError::DegenerateDirection(_))));
    }
}
