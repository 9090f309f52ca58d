//! Branches of fixed points in `σ` and `λ`, and the multi-start uniqueness
//! probe.
//!
//! Each step warm-starts from the previous profile (zeroth-order predictor)
//! and solves on the policy grid of the new parameters. Steps are halved on
//! failure and doubled after three easy successes.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixedpoint::{ShootingParams, Solution, SolveOptions, Solver};
use crate::grid::{integrate, xalpha_norm, EvenProfile, HalfGrid, XAlphaNorm};

/// Smallest positive `σ` visited before jumping to `σ = 0`.
pub const SIGMA_MIN: f64 = 1e-4;
const EASY_ITERATIONS: usize = 40;
const MIN_STEP: f64 = 1.0 / 256.0;

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub sigma: f64,
    pub v: EvenProfile,
    pub xalpha: XAlphaNorm,
    pub mass: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl BranchPoint {
    fn from_solution(sol: &Solution) -> Self {
        Self {
            lambda: sol.params.lambda,
            sigma: sol.params.sigma,
            xalpha: xalpha_norm(&sol.v, &sol.params.order),
            mass: sol.mass,
            residual: sol.residual,
            iterations: sol.iterations + sol.newton_steps,
            v: sol.v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest `sup|v_{j+1} - v_j| / |Δ parameter|` along the path.
    pub continuity_modulus: f64,
}

#[derive(Debug, Clone)]
pub struct BranchPath {
    pub parameter: &'static str,
    pub points: Vec<BranchPoint>,
    pub stats: StepStats,
    /// Full solution at the last point.
    pub endpoint: Solution,
}

impl BranchPath {
    fn new(parameter: &'static str, first: &Solution) -> Self {
        Self {
            parameter,
            points: vec![BranchPoint::from_solution(first)],
            stats: StepStats { accepted: 1, ..StepStats::default() },
            endpoint: first.clone(),
        }
    }

    fn push(&mut self, sol: Solution) {
        let prev = self.points.last().expect("nonempty path");
        let next = BranchPoint::from_solution(&sol);
        let dp = match self.parameter {
            "sigma" => (next.sigma - prev.sigma).abs(),
            _ => (next.lambda - prev.lambda).abs(),
        };
        let dv = next.v.sup_distance(&prev.v.resample(next.v.grid_arc().clone())).unwrap_or(f64::NAN);
        if dp > 0.0 {
            self.stats.continuity_modulus = self.stats.continuity_modulus.max(dv / dp);
        }
        self.stats.accepted += 1;
        self.points.push(next);
        self.endpoint = sol;
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `lambda,sigma,mass,v0,xalpha_total`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "lambda,sigma,mass,v0,xalpha_total")?;
        for p in &self.points {
            writeln!(f, "{:e},{:e},{:e},{:e},{:e}", p.lambda, p.sigma, p.mass, p.v.samples()[0], p.xalpha.total)?;
        }
        Ok(f.flush()?)
    }

    /// Writes `v` of every point to `dir/point_<j>.csv`.
    pub fn write_profiles(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (j, p) in self.points.iter().enumerate() {
            p.v.write_csv(&dir.join(format!("point_{j:04}.csv")))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parameter": self.parameter,
            "stats": self.stats,
            "points": self.points.iter().map(|p| serde_json::json!({
                "lambda": p.lambda,
                "sigma": p.sigma,
                "mass": p.mass,
                "v0": p.v.samples()[0],
                "xalpha": p.xalpha,
                "residual": p.residual,
                "iterations": p.iterations,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Re-checks the fixed-point invariants of a solution independently of the
/// solver's own bookkeeping.
pub fn verify_point(sol: &Solution, tol: f64) -> Result<()> {
    let r = sol.fixed_point_residual();
    if !(r <= 10.0 * tol.max(1e-13)) {
        return Err(Error::NonConvergence { iterations: 0, last: r, history: vec![r] });
    }
    let anchor = sol.params.amplitude();
    if (sol.v.samples()[0] - anchor).abs() > 1e-12 * anchor {
        return Err(Error::InvalidParameter(format!("v(0) = {} but λ√K(0) = {anchor}", sol.v.samples()[0])));
    }
    if let Some(index) = sol.v.samples().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NonPositive { index });
    }
    Ok(())
}

/// Follows `σ_j = σ₀ / 2^j` down to [`SIGMA_MIN`], then (with `to_zero`)
/// solves at `σ = 0`.
pub fn continue_sigma(
    base: &ShootingParams,
    sigma_from: f64,
    to_zero: bool,
    o: &SolveOptions,
    solver: &Solver,
) -> Result<BranchPath> {
    if !(sigma_from > 0.0 && sigma_from.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma_from = {sigma_from} must be positive")));
    }
    let first = solver.solve(&base.with_sigma(sigma_from)?, o, None)?;
    verify_point(&first, o.tol)?;
    let mut path = BranchPath::new("sigma", &first);
    let mut sigma = sigma_from;
    // Step measured in halvings of σ.
    let mut step = 1.0f64;
    let mut easy = 0;
    while sigma > SIGMA_MIN {
        let next = (sigma * 0.5f64.powf(step)).max(SIGMA_MIN);
        match solver.solve(&base.with_sigma(next)?, o, Some(&path.endpoint.v)) {
            Ok(sol) => {
                verify_point(&sol, o.tol)?;
                easy = if sol.iterations <= EASY_ITERATIONS && sol.newton_steps == 0 { easy + 1 } else { 0 };
                if easy >= 3 {
                    step = (2.0 * step).min(1.0);
                    easy = 0;
                }
                sigma = next;
                path.push(sol);
            }
            Err(e) => {
                path.stats.rejected += 1;
                step *= 0.5;
                easy = 0;
                if step < MIN_STEP {
                    return Err(stalled("sigma", sigma, e));
                }
            }
        }
    }
    if to_zero && sigma > 0.0 {
        let sol = solver
            .solve(&base.with_sigma(0.0)?, o, Some(&path.endpoint.v))
            .map_err(|e| stalled("sigma", sigma, e))?;
        verify_point(&sol, o.tol)?;
        path.push(sol);
    }
    Ok(path)
}

/// Geometric path from `lambda_from` to `lambda_to` at the `σ` of `base`.
pub fn continue_lambda(
    base: &ShootingParams,
    lambda_from: f64,
    lambda_to: f64,
    o: &SolveOptions,
    solver: &Solver,
) -> Result<BranchPath> {
    for l in [lambda_from, lambda_to] {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {l} must be positive")));
        }
    }
    let first = solver.solve(&base.with_lambda(lambda_from)?, o, None)?;
    verify_point(&first, o.tol)?;
    let mut path = BranchPath::new("lambda", &first);
    let total = (lambda_to / lambda_from).ln();
    let max_step = 2f64.ln() * 2.0;
    let mut step = total.abs().min(2f64.ln());
    let mut done = 0.0f64;
    let mut easy = 0;
    while done < total.abs() {
        let trial = (done + step).min(total.abs());
        let lambda = if trial == total.abs() { lambda_to } else { lambda_from * (trial * total.signum()).exp() };
        match solver.solve(&base.with_lambda(lambda)?, o, Some(&path.endpoint.v)) {
            Ok(sol) => {
                verify_point(&sol, o.tol)?;
                easy = if sol.iterations <= EASY_ITERATIONS && sol.newton_steps == 0 { easy + 1 } else { 0 };
                if easy >= 3 {
                    step = (2.0 * step).min(max_step);
                    easy = 0;
                }
                done = trial;
                path.push(sol);
            }
            Err(e) => {
                path.stats.rejected += 1;
                step *= 0.5;
                easy = 0;
                if step < MIN_STEP * 1e-2 {
                    let at = lambda_from * (done * total.signum()).exp();
                    return Err(stalled("lambda", at, e));
                }
            }
        }
    }
    Ok(path)
}

fn stalled(parameter: &'static str, value: f64, cause: Error) -> Error {
    match cause {
        e @ Error::InvalidParameter(_) => e,
        _ => Error::ContinuationStalled { parameter, value },
    }
}

/// Random strictly positive even start: a few Gaussian bumps of random
/// amplitude and width on top of a small algebraic floor.
pub fn random_start(p: &ShootingParams, grid: Arc<HalfGrid>, rng: &mut ChaCha8Rng) -> EvenProfile {
    let ell = p.length_scale();
    let lambda = p.lambda;
    let bumps: Vec<(f64, f64)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0.2..2.0) * lambda, rng.random_range(0.3..3.0) * ell))
        .collect();
    let f = move |x: f64| {
        let floor = 1e-3 * lambda / (1.0 + (x / ell).powi(2));
        floor + bumps.iter().map(|(a, w)| a * (-0.5 * (x / w).powi(2)).exp()).sum::<f64>()
    };
    let v = EvenProfile::from_fn(grid, f).expect("finite start");
    let norm = integrate(&v.map(|_, s| s * s)).sqrt();
    if norm < 0.1 * lambda {
        let k = 0.1 * lambda / norm;
        v.map(|_, s| k * s)
    } else {
        v
    }
}

/// Outcome of the multi-start probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub starts: usize,
    pub seed: u64,
    pub max_distance: f64,
    pub residuals: Vec<f64>,
}

/// Solves from `k` random starts and returns the largest pairwise sup
/// distance between the fixed points found.
pub fn uniqueness_probe(p: &ShootingParams, k: usize, seed: u64, o: &SolveOptions, solver: &Solver) -> Result<ProbeReport> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("probe needs at least 2 starts, got {k}")));
    }
    let grid = Arc::new(o.grid.grid(p, o.tail_tol, 0)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<EvenProfile> = (0..k).map(|_| random_start(p, grid.clone(), &mut rng)).collect();
    solver.moments(&p.order, (*grid).clone());
    let sols: Vec<Result<Solution>> = starts.par_iter().map(|v0| solver.solve(p, o, Some(v0))).collect();
    let mut vs = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (start, sol) in sols.into_iter().enumerate() {
        match sol {
            Ok(s) => {
                residuals.push(s.residual);
                vs.push(s.v);
            }
            Err(e) => return Err(Error::ProbeInconclusive { start, reason: e.to_string() }),
        }
    }
    let reference = vs[0].grid_arc().clone();
    let vs: Vec<EvenProfile> =
        vs.into_iter().map(|v| if v.grid() == &*reference { v } else { v.resample(reference.clone()) }).collect();
    let mut max_distance = 0.0f64;
    for i in 0..k {
        for j in i + 1..k {
            max_distance = max_distance.max(vs[i].sup_distance(&vs[j])?);
        }
    }
    Ok(ProbeReport { starts: k, seed, max_distance, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{GridPolicy, Length};
    use crate::params::FractionalOrder;
    use crate::weight::Weight;

    fn params(s: f64, lambda: f64) -> ShootingParams {
        ShootingParams::new(FractionalOrder::new(s).unwrap(), lambda, 0.0, Weight::default()).unwrap()
    }

    fn small() -> SolveOptions {
        SolveOptions { grid: GridPolicy { cells: 256, ..GridPolicy::default() }, ..SolveOptions::default() }
    }

    #[test]
    fn sigma_path_reaches_oracle() {
        let solver = Solver::new();
        let mut o = small();
        o.grid.length = Length::Fixed(30.0);
        let path = continue_sigma(&params(1.0, 1.0), 1.0, true, &o, &solver).unwrap();
        assert_eq!(path.points.last().unwrap().sigma, 0.0);
        assert!(path.points.windows(2).all(|w| w[1].sigma < w[0].sigma));
        let v = &path.endpoint.v;
        let err = v
            .grid()
            .nodes()
            .iter()
            .zip(v.samples())
            .map(|(x, y)| (y - 1.0 / (x / 2f64.sqrt()).cosh()).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-4, "{err}");
    }

    #[test]
    fn short_sigma_path() {
        let solver = Solver::new();
        let path = continue_sigma(&params(0.75, 1.0), 5e-5, false, &small(), &solver).unwrap();
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn lambda_path_is_anchored() {
        let solver = Solver::new();
        let base = params(0.75, 1.0).with_sigma(1.0).unwrap();
        let path = continue_lambda(&base, 0.1, 1.0, &small(), &solver).unwrap();
        assert!(path.points.windows(2).all(|w| w[1].lambda > w[0].lambda));
        for p in &path.points {
            assert!((p.v.samples()[0] - p.lambda).abs() <= 1e-14 * p.lambda);
        }
        assert_eq!(path.points.last().unwrap().lambda, 1.0);
        let single = continue_lambda(&base, 0.5, 0.5, &small(), &solver).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn probe_is_deterministic_and_unique() {
        let solver = Solver::new();
        let p = params(0.75, 1.0);
        let r = uniqueness_probe(&p, 3, 7, &small(), &solver).unwrap();
        assert!(r.max_distance < 1e-8, "{}", r.max_distance);
        assert!(uniqueness_probe(&p, 1, 7, &small(), &solver).is_err());
    }

    #[test]
    fn random_starts_are_admissible() {
        let p = params(0.6, 0.5);
        let g = Arc::new(HalfGrid::graded(1e4, 128, 3.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v = random_start(&p, g.clone(), &mut rng);
            assert!(v.samples().iter().all(|&s| s > 0.0));
            assert!(integrate(&v.map(|_, s| s * s)).sqrt() >= 0.1 * p.lambda * (1.0 - 1e-12));
        }
    }
}
