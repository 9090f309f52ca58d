//! Command-line front end. Every run resolves a [`RunConfig`] from an
//! optional JSON file overlaid with flags, computes, and writes CSV data
//! plus a JSON sidecar carrying the resolved config and the crate version.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::continuation::{continue_lambda, continue_sigma, uniqueness_probe, BranchPath};
use crate::error::{Error, Result};
use crate::fixedpoint::{
    solution_from_profile, GridKind, Length, ShootingParams, Solution, SolveOptions, Solver,
};
use crate::grid::{EvenProfile, HalfGrid};
use crate::params::FractionalOrder;
use crate::spectral::{dilation_mode, morse_index, spectral_report, SpectralReport, DEFAULT_HALF_CELLS};
use crate::verify::{
    pohozaev_residual, symmetry_monotonicity_check, verify_solution, Thresholds, VerifyOptions,
};
use crate::weight::{validate_assumption_a, Weight};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 1;
    pub const NON_CONVERGENCE: i32 = 2;
    pub const ASSUMPTION: i32 = 3;
    pub const GRID_EXHAUSTED: i32 = 4;
    pub const CHECK_FAILED: i32 = 5;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. }
        | Error::ContinuationStalled { .. }
        | Error::ProbeInconclusive { .. }
        | Error::SingularSystem
        | Error::NotMonotone { .. }
        | Error::NonPositive { .. }
        | Error::Eigen(_)
        | Error::InsufficientDecay(_) => exit::NON_CONVERGENCE,
        Error::AssumptionViolation(_) => exit::ASSUMPTION,
        Error::GridPolicyExhausted { .. } => exit::GRID_EXHAUSTED,
        _ => exit::INVALID_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracgelfand", version, about = "Ground states of (-Δ)^s u = K e^u in one dimension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the symmetric-decreasing profile.
    Solve(Common),
    /// Follow the branch in sigma or lambda.
    Continue {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: Option<BranchParam>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        /// Also write every branch profile under OUT/profiles.
        #[arg(long)]
        profiles: bool,
    },
    /// Run the identity and spectral checks on a fresh or stored profile.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Profile CSV with header x,v,u,w; solved afresh when absent.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        no_spectral: bool,
        /// Also run the uniqueness probe with this many random starts.
        #[arg(long)]
        probe: Option<usize>,
    },
    /// Morse index, kernel checks and linearized spectrum.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Half-cells of the spectral discretization.
        #[arg(long)]
        half_cells: Option<usize>,
    },
    /// Solve over the product of parameter lists, concurrently.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        lambda_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        sigma_list: Option<Vec<f64>>,
        /// Reach sigma = 0 rows by continuation from sigma = 1.
        #[arg(long)]
        via_continuation: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Compare the s = 1 solve with the closed form λ sech(λx/√2).
    Oracle(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchParam {
    Sigma,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightKind {
    Const,
    Poly,
    #[value(name = "stretched_exp", alias = "stretched-exp")]
    StretchedExp,
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file, then to the defaults of [`RunConfig`].
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum)]
    pub weight: Option<WeightKind>,
    /// Constant weight value.
    #[arg(long)]
    pub c: Option<f64>,
    /// Polynomial weight exponent in (1 + x²)^{-a}.
    #[arg(long)]
    pub a: Option<f64>,
    /// Stretched-exponential weight e^{-β|x|^{2m}}.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    /// Grid cells on [0, L].
    #[arg(long)]
    pub n: Option<usize>,
    /// Half-length: a number or "auto".
    #[arg(long = "L")]
    pub length: Option<Length>,
    #[arg(long)]
    pub grid: Option<GridKind>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Anderson depth; 0 disables acceleration.
    #[arg(long)]
    pub anderson: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    pub param: BranchParam,
    pub from: f64,
    pub to: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self { param: BranchParam::Sigma, from: 1.0, to: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub spectral: bool,
    pub laplace_samples: usize,
    pub laplace_cells: usize,
    pub scaling_mu: f64,
    pub probe_starts: usize,
    pub thresholds: Thresholds,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let o = VerifyOptions::default();
        Self {
            spectral: true,
            laplace_samples: o.laplace_samples,
            laplace_cells: o.laplace_cells,
            scaling_mu: o.scaling_mu,
            probe_starts: 0,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub s: Vec<f64>,
    pub lambda: Vec<f64>,
    pub sigma: Vec<f64>,
    pub via_continuation: bool,
    /// Worker cap; 0 uses every core.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { s: vec![0.6, 0.75, 0.9], lambda: vec![1.0], sigma: vec![0.0], via_continuation: false, workers: 0 }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub s: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub weight: Weight,
    pub solve: SolveOptions,
    pub out: PathBuf,
    pub seed: u64,
    pub continuation: ContinuationConfig,
    pub verify: VerifyConfig,
    pub sweep: SweepConfig,
    pub spectral_half_cells: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            s: 0.75,
            lambda: 1.0,
            sigma: 0.0,
            weight: Weight::default(),
            solve: SolveOptions::default(),
            out: PathBuf::from("out"),
            seed: 0,
            continuation: ContinuationConfig::default(),
            verify: VerifyConfig::default(),
            sweep: SweepConfig::default(),
            spectral_half_cells: DEFAULT_HALF_CELLS,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Config file (if any) overlaid with the flags that were given.
    pub fn resolve(c: &Common) -> Result<Self> {
        let mut cfg = match &c.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(v) = c.s {
            cfg.s = v;
        }
        if let Some(v) = c.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = c.sigma {
            cfg.sigma = v;
        }
        cfg.weight = resolve_weight(cfg.weight, c)?;
        let o = &mut cfg.solve;
        if let Some(v) = c.n {
            o.grid.cells = v;
        }
        if let Some(v) = c.length {
            o.grid.length = v;
        }
        if let Some(v) = c.grid {
            o.grid.kind = v;
        }
        if let Some(v) = c.tol {
            o.tol = v;
        }
        if let Some(v) = c.max_iter {
            o.max_iter = v;
        }
        if let Some(v) = c.anderson {
            o.anderson_depth = v;
        }
        if let Some(v) = &c.out {
            cfg.out = v.clone();
        }
        if let Some(v) = c.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.solve.validate()?;
        if self.solve.grid.cells < 4 {
            return Err(Error::InvalidParameter(format!("n = {} is too small", self.solve.grid.cells)));
        }
        Ok(())
    }

    pub fn order(&self) -> Result<FractionalOrder> {
        FractionalOrder::new(self.s)
    }

    pub fn params(&self) -> Result<ShootingParams> {
        ShootingParams::new(self.order()?, self.lambda, self.sigma, self.weight)
    }
}

fn resolve_weight(base: Weight, c: &Common) -> Result<Weight> {
    let kind = match c.weight {
        Some(k) => k,
        None => match base {
            Weight::Constant { .. } => WeightKind::Const,
            Weight::Polynomial { .. } => WeightKind::Poly,
            Weight::StretchedExp { .. } => WeightKind::StretchedExp,
        },
    };
    let w = match (kind, base) {
        (WeightKind::Const, Weight::Constant { c: c0 }) => Weight::Constant { c: c.c.unwrap_or(c0) },
        (WeightKind::Const, _) => Weight::Constant { c: c.c.unwrap_or(1.0) },
        (WeightKind::Poly, Weight::Polynomial { a }) => Weight::Polynomial { a: c.a.unwrap_or(a) },
        (WeightKind::Poly, _) => Weight::Polynomial { a: c.a.unwrap_or(1.0) },
        (WeightKind::StretchedExp, Weight::StretchedExp { beta, m }) => {
            Weight::StretchedExp { beta: c.beta.unwrap_or(beta), m: c.m.unwrap_or(m) }
        }
        (WeightKind::StretchedExp, _) => Weight::StretchedExp { beta: c.beta.unwrap_or(1.0), m: c.m.unwrap_or(1.0) },
    };
    w.checked()
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INVALID_INPUT } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve(c) => cmd_solve(&RunConfig::resolve(&c)?),
        Command::Continue { common, param, from, to, profiles } => {
            let mut cfg = RunConfig::resolve(&common)?;
            let cc = &mut cfg.continuation;
            if let Some(p) = param {
                cc.param = p;
                if p == BranchParam::Lambda && from.is_none() && to.is_none() {
                    cc.from = cfg.lambda;
                    cc.to = 2.0 * cfg.lambda;
                }
            }
            if let Some(v) = from {
                cc.from = v;
            }
            if let Some(v) = to {
                cc.to = v;
            }
            cmd_continue(&cfg, profiles)
        }
        Command::Verify { common, profile, no_spectral, probe } => {
            let mut cfg = RunConfig::resolve(&common)?;
            if no_spectral {
                cfg.verify.spectral = false;
            }
            if let Some(k) = probe {
                cfg.verify.probe_starts = k;
            }
            cmd_verify(&cfg, profile.as_deref())
        }
        Command::Spectrum { common, half_cells } => {
            let mut cfg = RunConfig::resolve(&common)?;
            if let Some(m) = half_cells {
                cfg.spectral_half_cells = m;
            }
            cmd_spectrum(&cfg)
        }
        Command::Sweep { common, s_list, lambda_list, sigma_list, via_continuation, workers } => {
            let mut cfg = RunConfig::resolve(&common)?;
            let sw = &mut cfg.sweep;
            if let Some(v) = s_list {
                sw.s = v;
            }
            if let Some(v) = lambda_list {
                sw.lambda = v;
            }
            if let Some(v) = sigma_list {
                sw.sigma = v;
            }
            if via_continuation {
                sw.via_continuation = true;
            }
            if let Some(w) = workers {
                sw.workers = w;
            }
            cmd_sweep(&cfg)
        }
        Command::Oracle(mut c) => {
            c.s = Some(1.0);
            c.n = c.n.or(Some(2048));
            c.length = c.length.or(Some(Length::Fixed(30.0)));
            cmd_oracle(&RunConfig::resolve(&c)?)
        }
    }
}

fn write_json(cfg: &RunConfig, name: &str, body: serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    let doc = serde_json::json!({ "version": VERSION, "config": cfg, "result": body });
    std::fs::write(cfg.out.join(name), serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

fn solve_fresh(cfg: &RunConfig, solver: &Solver) -> Result<Solution> {
    solver.solve(&cfg.params()?, &cfg.solve, None)
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<i32> {
    let sol = solve_fresh(cfg, &Solver::new())?;
    std::fs::create_dir_all(&cfg.out)?;
    sol.write_csv(&cfg.out.join("solution.csv"))?;
    write_json(cfg, "solution.json", sol.to_json())?;
    println!(
        "mass {:.10} v(0) {:.6} residual {:.3e} L {:.4} iterations {}+{}",
        sol.mass,
        sol.v.samples()[0],
        sol.residual,
        sol.grid().length(),
        sol.iterations,
        sol.newton_steps
    );
    Ok(exit::OK)
}

pub fn cmd_continue(cfg: &RunConfig, profiles: bool) -> Result<i32> {
    let solver = Solver::new();
    let base = cfg.params()?;
    let cc = &cfg.continuation;
    let path: BranchPath = match cc.param {
        BranchParam::Sigma => {
            if cc.to != 0.0 {
                return Err(Error::Config("sigma continuation runs toward 0; set to = 0".into()));
            }
            continue_sigma(&base, cc.from, true, &cfg.solve, &solver)?
        }
        BranchParam::Lambda => continue_lambda(&base, cc.from, cc.to, &cfg.solve, &solver)?,
    };
    std::fs::create_dir_all(&cfg.out)?;
    path.write_csv(&cfg.out.join("branch.csv"))?;
    path.endpoint.write_csv(&cfg.out.join("endpoint.csv"))?;
    if profiles {
        path.write_profiles(&cfg.out.join("profiles"))?;
    }
    write_json(cfg, "branch.json", serde_json::json!({ "branch": path.to_json(), "endpoint": path.endpoint.to_json() }))?;
    println!("{} points, endpoint mass {:.10}", path.len(), path.endpoint.mass);
    Ok(exit::OK)
}

/// Reads a profile CSV (`x,v,u,w`, or `x,value` for `v` alone).
pub fn read_profile(path: &Path) -> Result<EvenProfile> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != "x,v,u,w" && header != "x,value" {
        return Err(Error::Config(format!("unexpected profile header {header:?}")));
    }
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut it = line.split(',').map(|f| f.trim().parse::<f64>());
        match (it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(v))) => {
                xs.push(x);
                vs.push(v);
            }
            _ => return Err(Error::Config(format!("bad profile row {}", k + 2))),
        }
    }
    EvenProfile::new(Arc::new(HalfGrid::from_nodes(xs)?), vs)
}

pub fn cmd_verify(cfg: &RunConfig, profile: Option<&Path>) -> Result<i32> {
    let solver = Solver::new();
    let p = cfg.params()?;
    let sol = match profile {
        None => solve_fresh(cfg, &solver)?,
        Some(path) => {
            let v = read_profile(path)?;
            validate_assumption_a(&p.weight, v.grid()).into_result()?;
            let flags = symmetry_monotonicity_check(&v);
            if !flags.strictly_decreasing || v.samples().iter().any(|&x| !(x > 0.0)) {
                let failed = vec!["symmetry_monotonicity"];
                write_json(
                    cfg,
                    "verification.json",
                    serde_json::json!({ "failed": failed, "first_violation": flags.first_violation }),
                )?;
                eprintln!("failed: symmetry_monotonicity (first violation at node {:?})", flags.first_violation);
                return Ok(exit::CHECK_FAILED);
            }
            let m = solver.moments(&p.order, v.grid().clone());
            solution_from_profile(&p, v, m)?
        }
    };
    let vo = VerifyOptions {
        laplace_samples: cfg.verify.laplace_samples,
        laplace_cells: cfg.verify.laplace_cells,
        seed: cfg.seed,
        scaling_mu: cfg.verify.scaling_mu,
    };
    let report = verify_solution(&sol, &vo)?;
    let mut failed: Vec<String> = report.failures(&cfg.verify.thresholds).into_iter().map(String::from).collect();
    for (name, value, ok) in report.table(&cfg.verify.thresholds) {
        println!("{:<24} {:<40} {}", name, value, if ok { "ok" } else { "FAILED" });
    }
    let spectral = if cfg.verify.spectral {
        let r = spectral_report(&sol)?;
        for f in spectral_failures(&r) {
            println!("{f:<24} FAILED");
            failed.push(f.into());
        }
        serde_json::to_value(&r)?
    } else {
        serde_json::json!("skipped")
    };
    let probe = if cfg.verify.probe_starts >= 2 {
        let r = uniqueness_probe(&p, cfg.verify.probe_starts, cfg.seed, &cfg.solve, &solver)?;
        if !(r.max_distance <= 1e-8) {
            failed.push("uniqueness_probe".into());
        }
        serde_json::to_value(&r)?
    } else {
        serde_json::json!("skipped")
    };
    write_json(
        cfg,
        "verification.json",
        serde_json::json!({ "verification": report, "spectral": spectral, "probe": probe, "failed": failed }),
    )?;
    if failed.is_empty() {
        Ok(exit::OK)
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Ok(exit::CHECK_FAILED)
    }
}

/// Spectral checks that fail their thresholds.
pub fn spectral_failures(r: &SpectralReport) -> Vec<&'static str> {
    let mut out = Vec::new();
    if r.morse_index() < 1 {
        out.push("morse_index");
    }
    if let Some(e) = r.kernel_residual_even {
        if !(e <= 1e-4) {
            out.push("kernel_even");
        }
    }
    if let Some(bs) = &r.bs {
        if !((bs.top - 1.0).abs() <= 1e-3 && bs.gap > 1e-3 && bs.eigvec_min > 0.0 && bs.known_residual <= 1e-3) {
            out.push("birman_schwinger");
        }
    }
    if !(r.linearized.distance > 1e-2) {
        out.push("linearized_spectrum");
    }
    out
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<i32> {
    let sol = solve_fresh(cfg, &Solver::new())?;
    let mut r = spectral_report(&sol)?;
    if cfg.spectral_half_cells != DEFAULT_HALF_CELLS {
        r.morse = morse_index(&sol, None, cfg.spectral_half_cells)?;
    }
    std::fs::create_dir_all(&cfg.out)?;
    dilation_mode(&sol).write_csv(&cfg.out.join("dilation_mode.csv"))?;
    write_json(cfg, "spectrum.json", serde_json::to_value(&r)?)?;
    println!("morse index {}", r.morse_index());
    for (e, sector) in &r.morse.lowest {
        println!("  {e:+.6} {sector:?}");
    }
    println!("linearized distance from 1: {:.6}", r.linearized.distance);
    Ok(exit::OK)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    s: f64,
    lambda: f64,
    sigma: f64,
    mass: f64,
    morse_index: Option<usize>,
    pohozaev: f64,
    decay_p: Option<f64>,
    route: &'static str,
    error: Option<String>,
}

fn sweep_point(cfg: &RunConfig, s: f64, lambda: f64, sigma: f64) -> Result<(Solution, &'static str)> {
    let solver = Solver::with_capacity(1);
    let p = ShootingParams::new(FractionalOrder::new(s)?, lambda, sigma, cfg.weight)?;
    if cfg.sweep.via_continuation && sigma == 0.0 {
        let path = continue_sigma(&p, 1.0, true, &cfg.solve, &solver)?;
        Ok((path.endpoint, "continuation"))
    } else {
        Ok((solver.solve(&p, &cfg.solve, None)?, "direct"))
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let sw = &cfg.sweep;
    let mut keys = Vec::new();
    for &s in &sw.s {
        for &l in &sw.lambda {
            for &g in &sw.sigma {
                keys.push((s, l, g));
            }
        }
    }
    if keys.is_empty() {
        return Err(Error::Config("empty sweep schedule".into()));
    }
    for &(s, l, g) in &keys {
        ShootingParams::new(FractionalOrder::new(s)?, l, g, cfg.weight)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sw.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        keys.par_iter()
            .map(|&(s, lambda, sigma)| match sweep_point(cfg, s, lambda, sigma) {
                Ok((sol, route)) => SweepRow {
                    s,
                    lambda,
                    sigma,
                    mass: sol.mass,
                    morse_index: morse_index(&sol, None, cfg.spectral_half_cells).ok().map(|r| r.morse_index),
                    pohozaev: pohozaev_residual(&sol).relative,
                    decay_p: sol.decay_fit.map(|d| d.exponent),
                    route,
                    error: None,
                },
                Err(e) => SweepRow {
                    s,
                    lambda,
                    sigma,
                    mass: f64::NAN,
                    morse_index: None,
                    pohozaev: f64::NAN,
                    decay_p: None,
                    route: "failed",
                    error: Some(e.to_string()),
                },
            })
            .collect()
    });
    rows.sort_by(|a, b| (a.s, a.lambda, a.sigma).partial_cmp(&(b.s, b.lambda, b.sigma)).expect("finite keys"));
    std::fs::create_dir_all(&cfg.out)?;
    let mut csv = String::from("s,lambda,sigma,mass,morse_index,pohozaev,decay_p\n");
    let opt = |v: Option<f64>| v.map_or("NaN".to_string(), |x| format!("{x:e}"));
    for r in &rows {
        csv += &format!(
            "{:e},{:e},{:e},{:e},{},{:e},{}\n",
            r.s,
            r.lambda,
            r.sigma,
            r.mass,
            r.morse_index.map_or("NaN".to_string(), |m| m.to_string()),
            r.pohozaev,
            opt(r.decay_p)
        );
    }
    std::fs::write(cfg.out.join("sweep.csv"), csv)?;
    write_json(cfg, "sweep.json", serde_json::to_value(&rows)?)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows, {} failed", rows.len(), failed);
    Ok(if failed == 0 { exit::OK } else { exit::NON_CONVERGENCE })
}

/// Agreement of an `s = 1` solution with `v = λ sech(λx/√2)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleComparison {
    pub sup_error: f64,
    pub u0_error: f64,
    pub mass_error: f64,
    pub passed: bool,
}

pub fn oracle_comparison(sol: &Solution) -> OracleComparison {
    let l = sol.params.lambda;
    let exact = |x: f64| l / (l * x / 2f64.sqrt()).cosh();
    let sup_error = sol
        .grid()
        .nodes()
        .iter()
        .zip(sol.v.samples())
        .map(|(&x, &v)| (v - exact(x)).abs())
        .fold(0.0, f64::max);
    let u0_error = (sol.u.samples()[0] - 2.0 * l.ln()).abs();
    let mass_error = (sol.mass - 8f64.sqrt() * l).abs();
    OracleComparison {
        sup_error,
        u0_error,
        mass_error,
        passed: sup_error <= 5e-5 && u0_error <= 1e-6 && mass_error <= 1e-5,
    }
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<i32> {
    if cfg.weight != (Weight::Constant { c: 1.0 }) || cfg.sigma != 0.0 {
        return Err(Error::Config("the oracle needs K = 1 and sigma = 0".into()));
    }
    let sol = solve_fresh(cfg, &Solver::new())?;
    let cmp = oracle_comparison(&sol);
    std::fs::create_dir_all(&cfg.out)?;
    sol.write_csv(&cfg.out.join("oracle.csv"))?;
    write_json(cfg, "oracle.json", serde_json::json!({ "comparison": cmp, "solution": sol.to_json() }))?;
    println!(
        "sup error {:.3e}, u(0) error {:.3e}, mass error {:.3e}: {}",
        cmp.sup_error,
        cmp.u0_error,
        cmp.mass_error,
        if cmp.passed { "ok" } else { "FAILED" }
    );
    Ok(if cmp.passed { exit::OK } else { exit::CHECK_FAILED })
}
