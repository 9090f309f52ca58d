//! The shooting map `T[v] = λ √K e^{-σ²x²/2} e^{½ w(v²)}` and its fixed points.
//!
//! A fixed point `v` gives the solution `u = log(v²/K)` of the fractional
//! Gelfand equation with `u(0) = 2 log λ` (for `K(0) = 1`). Iteration is damped
//! Picard with optional Anderson mixing, finished by Newton steps on the
//! dense Jacobian `diag(T) E diag(v)` when the contraction is slow.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::grid::{integrate, EvenProfile, GridInfo, HalfGrid, OddProfile};
use crate::params::FractionalOrder;
use crate::riesz::KernelMoments;
use crate::weight::{validate_assumption_a, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingParams {
    pub lambda: f64,
    pub sigma: f64,
    pub weight: Weight,
    pub order: FractionalOrder,
}

impl ShootingParams {
    pub fn new(order: FractionalOrder, lambda: f64, sigma: f64, weight: Weight) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
        }
        if !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be finite")));
        }
        Ok(Self { lambda, sigma: sigma.abs(), weight: weight.checked()?, order })
    }

    /// `v(0) = λ √K(0)`.
    pub fn amplitude(&self) -> f64 {
        self.lambda * self.weight.k0().sqrt()
    }

    /// Intrinsic length `(λ √K(0))^{-1/s}` of the scaling family.
    pub fn length_scale(&self) -> f64 {
        self.amplitude().powf(-1.0 / self.order.s)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.order, lambda, self.sigma, self.weight)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.order, self.lambda, sigma, self.weight)
    }

    fn log_envelope(&self, x: f64) -> f64 {
        self.lambda.ln() + 0.5 * self.weight.log_value(x) - 0.5 * self.sigma * self.sigma * x * x
    }
}

/// Half-length of the computational domain: a number, or chosen from the
/// tail tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Length {
    #[default]
    Auto,
    Fixed(f64),
}

impl FromStr for Length {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Length::Auto);
        }
        match s.parse::<f64>() {
            Ok(l) if l > 0.0 && l.is_finite() => Ok(Length::Fixed(l)),
            _ => Err(Error::InvalidParameter(format!("L must be a positive number or \"auto\", got {s:?}"))),
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Auto => f.write_str("auto"),
            Length::Fixed(l) => write!(f, "{l}"),
        }
    }
}

impl Serialize for Length {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Length::Auto => s.serialize_str("auto"),
            Length::Fixed(l) => s.serialize_f64(*l),
        }
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(l) => Length::from_str(&l.to_string()),
            Repr::Str(s) => Length::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Graded,
    Uniform,
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graded" => Ok(GridKind::Graded),
            "uniform" => Ok(GridKind::Uniform),
            _ => Err(Error::InvalidParameter(format!("grid kind {s:?}, expected graded or uniform"))),
        }
    }
}

/// How the grid is chosen and enlarged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridPolicy {
    pub cells: usize,
    pub length: Length,
    pub kind: GridKind,
    /// Graded grids cluster nodes within `core_factor` length scales.
    pub core_factor: f64,
    pub max_enlargements: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self { cells: 1024, length: Length::Auto, kind: GridKind::Graded, core_factor: 2.0, max_enlargements: 6 }
    }
}

/// Largest uniform grid the enlargement loop will build.
pub const MAX_UNIFORM_CELLS: usize = 8192;
const ENLARGE: f64 = 1.5;

impl GridPolicy {
    /// Grid for the `k`-th enlargement.
    ///
    /// Depends only on `s`, `λ √K(0)`, `σ`, the tail tolerance and the policy,
    /// so solves that share these share nodes exactly.
    pub fn grid(&self, p: &ShootingParams, tail_tol: f64, k: usize) -> Result<HalfGrid> {
        let ell = p.length_scale();
        let base = match self.length {
            Length::Fixed(l) => l,
            Length::Auto => auto_length(p, tail_tol),
        };
        let length = base * ENLARGE.powi(k as i32);
        match self.kind {
            GridKind::Graded => HalfGrid::graded(length, self.cells, self.core_factor * ell),
            GridKind::Uniform => {
                let cells = (self.cells as f64 * ENLARGE.powi(k as i32)).round() as usize;
                if cells > MAX_UNIFORM_CELLS {
                    return Err(Error::GridPolicyExhausted { length, tail: f64::NAN });
                }
                HalfGrid::uniform(length, cells)
            }
        }
    }
}

/// Initial half-length. The profile behaves like `exp(-c_α M |x|^{2α}/2)` in
/// the far field with `M` the mass of the `λ √K(0) = 1` profile; `M_ref`
/// slightly underestimates it, which errs on the long side.
fn auto_length(p: &ShootingParams, tail_tol: f64) -> f64 {
    let o = &p.order;
    let ell = p.length_scale();
    let m_ref = 2.4 + 3.5 * (1.0 - o.s);
    let tail = (2.0 * (1.0 / tail_tol).ln() / (o.c_alpha * m_ref)).powf(1.0 / o.p());
    let mut l = ell * tail.max(8.0);
    if p.sigma > 0.0 {
        l = l.min(ENLARGE * (2.0 * (1.0 / tail_tol).ln()).sqrt() / p.sigma);
    }
    if let Weight::StretchedExp { beta, m } = p.weight {
        if beta > 0.0 {
            // √K(x) = tail_tol
            l = l.min(ENLARGE * (2.0 * (1.0 / tail_tol).ln() / beta).powf(0.5 / m));
        }
    }
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Target for `sup|T[v] - v| / sup v`.
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub anderson_depth: usize,
    /// Required `v(L)/v(0)` when the length is automatic.
    pub tail_tol: f64,
    pub newton: bool,
    pub grid: GridPolicy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 2000,
            damping: 1.0,
            anderson_depth: 0,
            tail_tol: 1e-10,
            newton: true,
            grid: GridPolicy::default(),
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol = {} must be positive", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!("damping = {} must lie in (0, 1]", self.damping)));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tail_tol = {}", self.tail_tol)));
        }
        if !(self.grid.core_factor > 0.0) {
            return Err(Error::InvalidParameter("core_factor must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Far-field fit `-log v ≈ d |x|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub prefactor: f64,
    pub exponent: f64,
    /// Slope of `log(-log(v/v(0)))` against `log x`; biased by the
    /// subleading terms of `-log v`, kept for comparison.
    pub loglog_exponent: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: ShootingParams,
    pub v: EvenProfile,
    pub u: EvenProfile,
    /// Exponent integral of `v²`.
    pub w: EvenProfile,
    /// `∫ v² = ∫ K e^u`.
    pub mass: f64,
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub newton_steps: usize,
    pub residual: f64,
    pub decay_fit: Option<DecayFit>,
    pub tail_ratio: f64,
    pub enlargements: usize,
    moments: Arc<KernelMoments>,
}

/// JSON summary of a [`Solution`].
#[derive(Debug, Clone, Serialize)]
pub struct SolutionReport {
    pub s: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub weight: Weight,
    pub mass: f64,
    pub v0: f64,
    pub u0: f64,
    pub residual: f64,
    pub iterations: usize,
    pub newton_steps: usize,
    pub residual_history: Vec<f64>,
    pub decay_fit: Option<DecayFit>,
    pub tail_ratio: f64,
    pub enlargements: usize,
    pub grid: GridInfo,
}

impl Solution {
    pub fn moments(&self) -> &Arc<KernelMoments> {
        &self.moments
    }

    pub fn grid(&self) -> &Arc<HalfGrid> {
        self.v.grid_arc()
    }

    /// `ρ = v²`.
    pub fn density(&self) -> EvenProfile {
        self.v.map(|_, v| v * v)
    }

    /// `H_α(v²)` at the nodes.
    pub fn riesz_density(&self) -> OddProfile {
        self.moments.conj_riesz(&self.density()).expect("same grid")
    }

    /// `∂_x u = -H_α(v²) - 2σ² x` at the nodes.
    pub fn du(&self) -> OddProfile {
        let s2 = self.params.sigma * self.params.sigma;
        self.riesz_density().map(|x, h| -h - 2.0 * s2 * x)
    }

    /// `sup|T[v] - v| / sup v`, recomputed.
    pub fn fixed_point_residual(&self) -> f64 {
        let t = apply_t(&self.v, &self.params, &self.moments).expect("same grid");
        t.sup_distance(&self.v).expect("same grid") / self.v.sup_abs()
    }

    pub fn report(&self) -> SolutionReport {
        SolutionReport {
            s: self.params.order.s,
            lambda: self.params.lambda,
            sigma: self.params.sigma,
            weight: self.params.weight,
            mass: self.mass,
            v0: self.v.samples()[0],
            u0: self.u.samples()[0],
            residual: self.residual,
            iterations: self.iterations,
            newton_steps: self.newton_steps,
            residual_history: self.residual_history.clone(),
            decay_fit: self.decay_fit,
            tail_ratio: self.tail_ratio,
            enlargements: self.enlargements,
            grid: self.grid().info(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.report()).expect("plain data")
    }

    /// CSV with header `x,v,u,w`.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "x,v,u,w")?;
        for (i, x) in self.grid().nodes().iter().enumerate() {
            writeln!(f, "{x:e},{:e},{:e},{:e}", self.v.samples()[i], self.u.samples()[i], self.w.samples()[i])?;
        }
        Ok(f.flush()?)
    }
}

/// `T[v]` at the nodes, evaluated as a single exponential.
pub fn apply_t(v: &EvenProfile, p: &ShootingParams, m: &KernelMoments) -> Result<EvenProfile> {
    let rho = v.map(|_, s| s * s);
    let w = m.exponent_integral(&rho)?;
    // w(0) = 0, so the anchor is pinned without the exp/log round trip.
    let a = p.amplitude();
    Ok(w.map(|x, w| if x == 0.0 { a } else { (p.log_envelope(x) + 0.5 * w).exp() }))
}

/// `D_v T[v] h = T[v] · w(v h)`, where `w(·)` is the exponent integral.
pub fn frechet_apply(v: &EvenProfile, h: &EvenProfile, p: &ShootingParams, m: &KernelMoments) -> Result<EvenProfile> {
    let t = apply_t(v, p, m)?;
    let vh = v.zip_with(h, |_, a, b| a * b)?;
    let lin = m.exponent_integral_linear(&vh)?;
    t.zip_with(&lin, |_, a, b| a * b)
}

/// `u = 2 log v - log K`.
pub fn recover_u(v: &EvenProfile, k: &Weight) -> Result<EvenProfile> {
    if let Some(index) = v.samples().iter().position(|&s| !(s > 0.0)) {
        return Err(Error::NonPositive { index });
    }
    Ok(v.map(|x, s| 2.0 * s.ln() - k.log_value(x)))
}

/// Builds and caches kernel tables, then runs the solve loop with grid
/// enlargement.
#[derive(Debug)]
pub struct Solver {
    cache: Mutex<Vec<Arc<KernelMoments>>>,
    capacity: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::with_capacity(4)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self { cache: Mutex::new(Vec::new()), capacity: capacity.max(1) }
    }

    /// Kernel tables for `(order, grid)`, built on first use.
    pub fn moments(&self, order: &FractionalOrder, grid: HalfGrid) -> Arc<KernelMoments> {
        {
            let mut cache = self.cache.lock().expect("cache poisoned");
            if let Some(i) = cache.iter().position(|m| m.order().s == order.s && *m.grid() == grid) {
                let m = cache.remove(i);
                cache.push(m.clone());
                return m;
            }
        }
        let m = Arc::new(KernelMoments::new(*order, Arc::new(grid)));
        let mut cache = self.cache.lock().expect("cache poisoned");
        if cache.len() >= self.capacity {
            cache.remove(0);
        }
        cache.push(m.clone());
        m
    }

    /// Solves on the policy grid, enlarging it while the tail is too heavy.
    pub fn solve(&self, p: &ShootingParams, o: &SolveOptions, v0: Option<&EvenProfile>) -> Result<Solution> {
        o.validate()?;
        validate_assumption_a(&p.weight, &o.grid.grid(p, o.tail_tol, 0)?).into_result()?;
        let mut start = v0.cloned();
        let mut last_tail = f64::NAN;
        for k in 0..=o.grid.max_enlargements {
            let grid = match o.grid.grid(p, o.tail_tol, k) {
                Ok(g) => g,
                Err(Error::GridPolicyExhausted { length, .. }) => {
                    return Err(Error::GridPolicyExhausted { length, tail: last_tail });
                }
                Err(e) => return Err(e),
            };
            let m = self.moments(&p.order, grid);
            let mut sol = solve_on(p, o, m, start.as_ref())?;
            sol.enlargements = k;
            let fixed = matches!(o.grid.length, Length::Fixed(_));
            if fixed || sol.tail_ratio <= o.tail_tol {
                return Ok(sol);
            }
            last_tail = sol.tail_ratio;
            start = Some(sol.v);
        }
        let length = o.grid.grid(p, o.tail_tol, o.grid.max_enlargements).map(|g| g.length()).unwrap_or(f64::NAN);
        Err(Error::GridPolicyExhausted { length, tail: last_tail })
    }
}

/// [`Solver::solve`] with a private cache.
pub fn picard_solve(p: &ShootingParams, o: &SolveOptions, v0: Option<&EvenProfile>) -> Result<Solution> {
    Solver::with_capacity(1).solve(p, o, v0)
}

/// Default start `λ √K(x) e^{-x²/2}`.
pub fn default_start(p: &ShootingParams, grid: Arc<HalfGrid>) -> EvenProfile {
    EvenProfile::from_fn(grid, |x| p.lambda * p.weight.sqrt_value(x) * (-0.5 * x * x).exp()).expect("finite")
}

const NEWTON_SWITCH: f64 = 1e-3;
const SLOW_RATE: f64 = 0.9;
const MAX_NEWTON: usize = 8;
/// Residuals below this are at the rounding floor of the tables.
const FLOOR: f64 = 1e-14;

/// Fixed point on the grid of `m`.
pub fn solve_on(
    p: &ShootingParams,
    o: &SolveOptions,
    m: Arc<KernelMoments>,
    v0: Option<&EvenProfile>,
) -> Result<Solution> {
    o.validate()?;
    let grid = m.grid_arc().clone();
    let mut v = match v0 {
        Some(v0) if v0.grid() == &*grid => v0.clone(),
        Some(v0) => v0.resample(grid.clone()),
        None => default_start(p, grid.clone()),
    };
    if p.sigma == 0.0 && integrate(&v.map(|_, s| s * s)) == 0.0 {
        return Err(Error::ZeroInitialIterate);
    }

    let mut history = Vec::new();
    let mut theta = o.damping;
    let mut anderson = Anderson::new(o.anderson_depth);
    let mut t = apply_t(&v, p, &m)?;
    let mut r = relative_residual(&t, &v);
    history.push(r);
    let mut iterations = 0;
    let mut newton_steps = 0;
    let mut slow = 0;

    while r > o.tol && iterations < o.max_iter {
        if o.newton && r < NEWTON_SWITCH && slow >= 5 {
            break;
        }
        let next = if o.anderson_depth > 0 {
            anderson.step(v.samples(), t.samples(), theta)
        } else {
            v.samples().iter().zip(t.samples()).map(|(a, b)| (1.0 - theta) * a + theta * b).collect()
        };
        let cand = EvenProfile::new(grid.clone(), next)?;
        let t_cand = apply_t(&cand, p, &m)?;
        let r_cand = relative_residual(&t_cand, &cand);
        iterations += 1;
        if !(r_cand.is_finite()) || r_cand > 2.0 * r {
            theta *= 0.5;
            anderson.reset();
            if theta < 1e-4 {
                return Err(Error::NonConvergence { iterations, last: r, history });
            }
            continue;
        }
        slow = if r_cand > SLOW_RATE * r { slow + 1 } else { 0 };
        v = cand;
        t = t_cand;
        r = r_cand;
        history.push(r);
    }

    if r > o.tol && o.newton && r < 10.0 * NEWTON_SWITCH {
        while r > o.tol && newton_steps < MAX_NEWTON {
            let next = newton_step(&v, &t, &m)?;
            let t_next = apply_t(&next, p, &m)?;
            let r_next = relative_residual(&t_next, &next);
            newton_steps += 1;
            if !(r_next < r) {
                break;
            }
            v = next;
            t = t_next;
            r = r_next;
            history.push(r);
        }
    }
    if r > o.tol && r > FLOOR {
        return Err(Error::NonConvergence { iterations: iterations + newton_steps, last: r, history });
    }
    finish(p, t, m, history, iterations, newton_steps)
}

/// Newton iteration from `v` on the grid of `m`.
pub fn newton_refine(p: &ShootingParams, v: &EvenProfile, o: &SolveOptions, m: Arc<KernelMoments>) -> Result<Solution> {
    let mut v = if v.grid() == m.grid() { v.clone() } else { v.resample(m.grid_arc().clone()) };
    let mut t = apply_t(&v, p, &m)?;
    let mut r = relative_residual(&t, &v);
    let mut history = vec![r];
    let mut steps = 0;
    while r > FLOOR && steps < MAX_NEWTON {
        let next = newton_step(&v, &t, &m)?;
        let t_next = apply_t(&next, p, &m)?;
        let r_next = relative_residual(&t_next, &next);
        steps += 1;
        if !(r_next < r) {
            break;
        }
        v = next;
        t = t_next;
        r = r_next;
        history.push(r);
        if r <= o.tol * 1e-3 {
            break;
        }
    }
    if r > o.tol {
        return Err(Error::NonConvergence { iterations: steps, last: r, history });
    }
    finish(p, t, m, history, 0, steps)
}

/// `v + δ` with `(I - diag(T) E diag(v)) δ = T - v`.
fn newton_step(v: &EvenProfile, t: &EvenProfile, m: &KernelMoments) -> Result<EvenProfile> {
    let n = v.samples().len();
    let e = m.exponent_matrix();
    let (vs, ts) = (v.samples(), t.samples());
    let a = DMatrix::from_fn(n, n, |i, k| {
        let j = ts[i] * e[(i, k)] * vs[k];
        if i == k {
            1.0 - j
        } else {
            -j
        }
    });
    let rhs = DVector::from_iterator(n, ts.iter().zip(vs).map(|(a, b)| a - b));
    let delta = a.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    EvenProfile::new(m.grid_arc().clone(), vs.iter().zip(delta.iter()).map(|(a, d)| a + d).collect())
}

fn relative_residual(t: &EvenProfile, v: &EvenProfile) -> f64 {
    let d = t.samples().iter().zip(v.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    d / v.sup_abs().max(f64::MIN_POSITIVE)
}

/// Wraps a stored profile as a [`Solution`] without solving; the residual
/// is that of `v` itself. Monotonicity is not enforced, so that
/// verification can judge it.
pub fn solution_from_profile(p: &ShootingParams, v: EvenProfile, m: Arc<KernelMoments>) -> Result<Solution> {
    if v.grid() != m.grid() {
        return Err(Error::GridMismatch);
    }
    let r = relative_residual(&apply_t(&v, p, &m)?, &v);
    assemble(p, v, m, vec![r], 0, 0)
}

/// Assembles the solution from the last image `T[v]`, which satisfies
/// `v(0) = λ √K(0)` exactly.
fn finish(
    p: &ShootingParams,
    v: EvenProfile,
    m: Arc<KernelMoments>,
    residual_history: Vec<f64>,
    iterations: usize,
    newton_steps: usize,
) -> Result<Solution> {
    let sup = v.sup_abs();
    for (i, pair) in v.samples().windows(2).enumerate() {
        let excess = pair[1] - pair[0];
        if excess > 1e-12 * sup {
            return Err(Error::NotMonotone { index: i + 1, excess });
        }
    }
    assemble(p, v, m, residual_history, iterations, newton_steps)
}

fn assemble(
    p: &ShootingParams,
    v: EvenProfile,
    m: Arc<KernelMoments>,
    residual_history: Vec<f64>,
    iterations: usize,
    newton_steps: usize,
) -> Result<Solution> {
    let u = recover_u(&v, &p.weight)?;
    let rho = v.map(|_, s| s * s);
    let w = m.exponent_integral(&rho)?;
    let residual = *residual_history.last().unwrap_or(&f64::NAN);
    let mut sol = Solution {
        params: *p,
        mass: integrate(&rho),
        tail_ratio: v.tail_ratio(),
        v,
        u,
        w,
        residual_history,
        iterations,
        newton_steps,
        residual,
        decay_fit: None,
        enlargements: 0,
        moments: m,
    };
    if p.sigma == 0.0 {
        sol.decay_fit = fit_decay(&sol).ok();
    }
    Ok(sol)
}

/// Least-squares fit of `log(-∂_x log v)` against `log x` on `[L/4, 3L/4]`.
///
/// Uses `-∂_x log v = ½ H_α(v²) + σ² x - ½ ∂_x log K`, which is free of
/// cancellation in the tail.
pub fn fit_decay(sol: &Solution) -> Result<DecayFit> {
    let grid = sol.grid();
    let length = grid.length();
    let (lo, hi) = (0.25 * length, 0.75 * length);
    let (v_lo, v_hi) = (sol.v.interp(lo), sol.v.interp(hi));
    if !(v_lo > 100.0 * v_hi) {
        return Err(Error::InsufficientDecay(format!("v drops only by {:.3} across the window", v_lo / v_hi)));
    }
    let h = sol.riesz_density();
    let p = &sol.params;
    let v0 = sol.v.samples()[0];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, &x) in grid.nodes().iter().enumerate() {
        if x < lo || x > hi {
            continue;
        }
        let g = 0.5 * h.samples()[i] + p.sigma * p.sigma * x - p.weight.dlog_half(x);
        let lv = -(sol.v.samples()[i] / v0).ln();
        if g > 0.0 && lv > 0.0 {
            a.push((x.ln(), g.ln()));
            b.push((x.ln(), lv.ln()));
        }
    }
    if a.len() < 3 {
        return Err(Error::InsufficientDecay("fewer than three usable nodes".into()));
    }
    let (slope, intercept) = linear_fit(&a);
    let exponent = 1.0 + slope;
    Ok(DecayFit {
        prefactor: intercept.exp() / exponent,
        exponent,
        loglog_exponent: linear_fit(&b).0,
        window: (lo, hi),
    })
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `v_μ(x) = μ^s v(μx)` on the grid scaled by `1/μ`: the solution at
/// `λ' = μ^s λ` when `K` is constant.
pub fn rescale_solution(sol: &Solution, mu: f64) -> Result<Solution> {
    rescale_with(sol, mu, &Solver::with_capacity(1))
}

/// [`rescale_solution`] drawing kernel tables from `solver`.
pub fn rescale_with(sol: &Solution, mu: f64, solver: &Solver) -> Result<Solution> {
    if !sol.params.weight.is_constant() {
        return Err(Error::NonConstantWeight);
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be positive")));
    }
    if sol.params.sigma != 0.0 && mu != 1.0 {
        return Err(Error::InvalidParameter("rescaling requires sigma = 0".into()));
    }
    let s = sol.params.order.s;
    let factor = mu.powf(s);
    let grid = sol.grid().scaled(1.0 / mu)?;
    let m = solver.moments(&sol.params.order, grid);
    let g = m.grid_arc().clone();
    let v = EvenProfile::new(g.clone(), sol.v.samples().iter().map(|x| factor * x).collect())?;
    let u = EvenProfile::new(g.clone(), sol.u.samples().iter().map(|x| x + 2.0 * s * mu.ln()).collect())?;
    let w = EvenProfile::new(g, sol.w.samples().to_vec())?;
    let params = sol.params.with_lambda(factor * sol.params.lambda)?;
    let mut out = Solution {
        params,
        mass: integrate(&v.map(|_, x| x * x)),
        tail_ratio: v.tail_ratio(),
        v,
        u,
        w,
        residual_history: Vec::new(),
        iterations: 0,
        newton_steps: 0,
        residual: f64::NAN,
        decay_fit: None,
        enlargements: sol.enlargements,
        moments: m,
    };
    out.residual = out.fixed_point_residual();
    out.residual_history.push(out.residual);
    out.decay_fit = fit_decay(&out).ok();
    Ok(out)
}

/// Type-II Anderson mixing on the fixed-point map.
struct Anderson {
    depth: usize,
    dx: Vec<Vec<f64>>,
    df: Vec<Vec<f64>>,
    prev: Option<(Vec<f64>, Vec<f64>)>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Self { depth, dx: Vec::new(), df: Vec::new(), prev: None }
    }

    fn reset(&mut self) {
        self.dx.clear();
        self.df.clear();
        self.prev = None;
    }

    fn step(&mut self, x: &[f64], t: &[f64], theta: f64) -> Vec<f64> {
        let f: Vec<f64> = t.iter().zip(x).map(|(a, b)| a - b).collect();
        if let Some((px, pf)) = self.prev.take() {
            self.dx.push(x.iter().zip(&px).map(|(a, b)| a - b).collect());
            self.df.push(f.iter().zip(&pf).map(|(a, b)| a - b).collect());
            if self.dx.len() > self.depth {
                self.dx.remove(0);
                self.df.remove(0);
            }
        }
        self.prev = Some((x.to_vec(), f.clone()));
        let mut next: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a + theta * b).collect();
        let k = self.df.len();
        if k == 0 {
            return next;
        }
        let n = x.len();
        let a = DMatrix::from_fn(n, k, |i, j| self.df[j][i]);
        let gamma = match a.svd(true, true).solve(&DVector::from_column_slice(&f), 1e-12) {
            Ok(g) => g,
            Err(_) => {
                self.reset();
                return next;
            }
        };
        for j in 0..k {
            for i in 0..n {
                next[i] -= gamma[j] * (self.dx[j][i] + theta * self.df[j][i]);
            }
        }
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FractionalOrder;

    fn oracle(lambda: f64, sigma: f64) -> ShootingParams {
        ShootingParams::new(FractionalOrder::new(1.0).unwrap(), lambda, sigma, Weight::default()).unwrap()
    }

    fn fixed(l: f64, n: usize) -> SolveOptions {
        SolveOptions {
            grid: GridPolicy { cells: n, length: Length::Fixed(l), ..GridPolicy::default() },
            ..SolveOptions::default()
        }
    }

    #[test]
    fn zero_start_gives_gaussian() {
        let p = oracle(1.0, 1.0);
        let g = Arc::new(HalfGrid::uniform(6.0, 64).unwrap());
        let m = KernelMoments::new(p.order, g.clone());
        let t = apply_t(&EvenProfile::zeros(g), &p, &m).unwrap();
        for (x, y) in t.grid().nodes().iter().zip(t.samples()) {
            assert!((y - (-0.5 * x * x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn origin_value_is_exact() {
        let mut p = oracle(2.7, 0.3);
        p.order = FractionalOrder::new(0.7).unwrap();
        let g = Arc::new(HalfGrid::graded(40.0, 64, 1.0).unwrap());
        let m = KernelMoments::new(p.order, g.clone());
        let v = EvenProfile::from_fn(g, |x| 3.0 / (1.0 + x * x)).unwrap();
        assert_eq!(apply_t(&v, &p, &m).unwrap().samples()[0], 2.7);
    }

    #[test]
    fn sech_is_nearly_fixed_at_half() {
        let p = oracle(1.0, 0.0);
        let g = Arc::new(HalfGrid::uniform(30.0, 1024).unwrap());
        let m = KernelMoments::new(p.order, g.clone());
        let v = EvenProfile::from_fn(g, |x| 1.0 / (x / 2f64.sqrt()).cosh()).unwrap();
        let t = apply_t(&v, &p, &m).unwrap();
        assert!(t.sup_distance(&v).unwrap() < 1e-4);
    }

    #[test]
    fn oracle_solution() {
        let sol = picard_solve(&oracle(1.0, 0.0), &fixed(30.0, 512), None).unwrap();
        let err = sol
            .grid()
            .nodes()
            .iter()
            .zip(sol.v.samples())
            .map(|(x, v)| (v - 1.0 / (x / 2f64.sqrt()).cosh()).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-5, "sup error {err}");
        assert!(sol.u.samples()[0].abs() < 1e-12);
        assert!((sol.mass - 8f64.sqrt()).abs() < 1e-4);
        assert!(sol.residual <= 1e-11);
        let fit = sol.decay_fit.unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn zero_start_rejected_without_gaussian() {
        let p = oracle(1.0, 0.0);
        let g = Arc::new(HalfGrid::uniform(10.0, 32).unwrap());
        let z = EvenProfile::zeros(g);
        assert!(matches!(picard_solve(&p, &fixed(10.0, 32), Some(&z)), Err(Error::ZeroInitialIterate)));
    }

    #[test]
    fn frechet_matches_differences() {
        let mut p = oracle(1.0, 0.0);
        p.order = FractionalOrder::new(0.75).unwrap();
        let g = Arc::new(HalfGrid::graded(60.0, 128, 2.0).unwrap());
        let m = KernelMoments::new(p.order, g.clone());
        let v = EvenProfile::from_fn(g.clone(), |x| 1.0 / (1.0 + 0.3 * x * x)).unwrap();
        let h = EvenProfile::from_fn(g.clone(), |x| (0.4 * x).cos() * (-0.05 * x * x).exp()).unwrap();
        let d = frechet_apply(&v, &h, &p, &m).unwrap();
        assert_eq!(d.samples()[0], 0.0);
        let eps = 1e-5;
        let plus = apply_t(&v.zip_with(&h, |_, a, b| a + eps * b).unwrap(), &p, &m).unwrap();
        let minus = apply_t(&v.zip_with(&h, |_, a, b| a - eps * b).unwrap(), &p, &m).unwrap();
        let fd = plus.zip_with(&minus, |_, a, b| (a - b) / (2.0 * eps)).unwrap();
        assert!(fd.sup_distance(&d).unwrap() <= 1e-6 * d.sup_abs());
    }

    #[test]
    fn recover_u_checks_sign() {
        let g = Arc::new(HalfGrid::uniform(1.0, 16).unwrap());
        let k = Weight::Polynomial { a: 1.0 };
        let v = EvenProfile::from_fn(g.clone(), |x| k.sqrt_value(x)).unwrap();
        assert!(recover_u(&v, &k).unwrap().sup_abs() < 1e-15);
        let bad = EvenProfile::from_fn(g, |x| 0.5 - x).unwrap();
        assert!(matches!(recover_u(&bad, &k), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn length_parses() {
        assert_eq!("auto".parse::<Length>().unwrap(), Length::Auto);
        assert_eq!("30".parse::<Length>().unwrap(), Length::Fixed(30.0));
        assert!("-1".parse::<Length>().is_err());
        let l: Length = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(l, Length::Auto);
        let l: Length = serde_json::from_str("12.5").unwrap();
        assert_eq!(l, Length::Fixed(12.5));
    }

    #[test]
    fn policy_grids_are_scale_covariant() {
        let o = FractionalOrder::new(0.75).unwrap();
        let p1 = ShootingParams::new(o, 1.0, 0.0, Weight::default()).unwrap();
        let p2 = p1.with_lambda(2f64.powf(0.75)).unwrap();
        let pol = GridPolicy::default();
        let g1 = pol.grid(&p1, 1e-10, 0).unwrap();
        let g2 = pol.grid(&p2, 1e-10, 0).unwrap();
        for (a, b) in g1.nodes().iter().zip(g2.nodes()) {
            assert!((a - 2.0 * b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn anderson_reaches_same_fixed_point() {
        let p = oracle(1.0, 0.0);
        let plain = picard_solve(&p, &fixed(30.0, 256), None).unwrap();
        let mut o = fixed(30.0, 256);
        o.anderson_depth = 5;
        o.newton = false;
        let acc = picard_solve(&p, &o, None).unwrap();
        assert!(acc.v.sup_distance(&plain.v).unwrap() < 1e-9);
    }

    #[test]
    fn rescale_identity_and_oracle() {
        let sol = picard_solve(&oracle(1.0, 0.0), &fixed(30.0, 256), None).unwrap();
        let same = rescale_solution(&sol, 1.0).unwrap();
        assert_eq!(same.v.samples(), sol.v.samples());
        let r = rescale_solution(&sol, 2.0).unwrap();
        assert_eq!(r.params.lambda, 2.0);
        assert!((r.mass / sol.mass - 2.0).abs() < 1e-12);
        assert!(r.residual < 1e-10, "{}", r.residual);
    }
}
