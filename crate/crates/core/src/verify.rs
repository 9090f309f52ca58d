//! Numerical certificates for the identities and inequalities satisfied by
//! solutions: the Pohozaev identity, the double-integral identity, reverse
//! HLS, positivity of the `(x + y)` form, far-field decay, monotonicity and
//! scaling of the mass.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixedpoint::{rescale_solution, DecayFit, Solution};
use crate::grid::{integrate, CellProfile, EvenProfile, HalfGrid, PiecewiseLinear};
use crate::params::{gamma, FractionalOrder};
use crate::quad::{gauss_jacobi_unit, gl};
use crate::riesz::{cell_weights, KernelMoments};

/// The four terms of the Pohozaev identity
/// `∫v² + 2∫W x v² - 2σ²∫x²v² - ∫x v² H_α(v²) = 0`, `W = ½ ∂_x log K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pohozaev {
    pub mass: f64,
    pub weight_term: f64,
    pub gaussian_term: f64,
    pub riesz_term: f64,
    /// `|signed sum| / mass`, or 0 when the mass vanishes.
    pub relative: f64,
    /// `∫v² >= ∫x v² H_α(v²)`, the inequality left after dropping the
    /// nonpositive terms.
    pub inequality_holds: bool,
    pub degenerate: bool,
}

fn nodal(grid: &Arc<HalfGrid>, f: impl Fn(usize, f64) -> f64) -> EvenProfile {
    let samples = grid.nodes().iter().enumerate().map(|(i, &x)| f(i, x)).collect();
    EvenProfile::new(grid.clone(), samples).expect("finite integrand")
}

pub fn pohozaev_residual(sol: &Solution) -> Pohozaev {
    let g = sol.grid();
    let rho = sol.density();
    let h = sol.riesz_density();
    let p = &sol.params;
    let r = rho.samples();
    let mass = integrate(&rho);
    let weight_term = 2.0 * integrate(&nodal(g, |i, x| p.weight.dlog_half(x) * x * r[i]));
    let gaussian_term = -2.0 * p.sigma * p.sigma * integrate(&nodal(g, |i, x| x * x * r[i]));
    let riesz_term = -integrate(&nodal(g, |i, x| x * r[i] * h.samples()[i]));
    let signed = mass + weight_term + gaussian_term + riesz_term;
    let degenerate = mass == 0.0;
    Pohozaev {
        mass,
        weight_term,
        gaussian_term,
        riesz_term,
        relative: if degenerate { 0.0 } else { signed.abs() / mass },
        inequality_holds: mass + riesz_term >= -1e-12 * mass,
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleIntegral {
    /// `∫ x ρ H_α(ρ)`
    pub moment: f64,
    /// `(d_α/2) ∬ ρ(x) |x - y|^{2α} ρ(y)`
    pub energy: f64,
    pub relative_gap: f64,
}

/// Both sides of `∫ x ρ H_α(ρ) = (d_α/2) ∬ ρ |x-y|^{2α} ρ`, one through the
/// sign kernel and one through the power kernel. The potentials are exact
/// for the piecewise-linear `ρ`; the outer integrals use 6-point Gauss per
/// cell.
pub fn double_integral_gap(rho: &EvenProfile, m: &KernelMoments) -> Result<DoubleIntegral> {
    let g = rho.grid();
    let nodes = g.nodes();
    let rule = gl(6);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for j in 0..g.cells() {
        let (a, h) = (nodes[j], g.width(j));
        for &(t, w) in rule {
            xs.push(a + h * t);
            ws.push(w * h);
        }
    }
    let (h, pot) = m.potentials_at(rho, &xs)?;
    let (mut moment, mut energy) = (0.0, 0.0);
    for k in 0..xs.len() {
        let r = rho.interp(xs[k]);
        moment += 2.0 * ws[k] * xs[k] * r * h[k];
        energy += 2.0 * ws[k] * r * pot[k];
    }
    energy *= 0.5 * m.order().d_alpha;
    let scale = moment.abs().max(energy.abs());
    let relative_gap = if scale == 0.0 { 0.0 } else { (moment - energy).abs() / scale };
    Ok(DoubleIntegral { moment, energy, relative_gap })
}

/// `∬ ρ |x-y|^{2α} ρ / (∫ ρ^q)^{2/q}` with `q = 1/(1+α)`.
pub fn reverse_hls_ratio(rho: &EvenProfile, m: &KernelMoments) -> Result<f64> {
    let q = 1.0 / (1.0 + m.order().alpha);
    let r = rho.samples();
    if let Some(index) = r.iter().position(|&x| x < 0.0) {
        return Err(Error::NegativeDensity { index, value: r[index] });
    }
    let pot = m.pow_potential(rho)?;
    let g = rho.grid_arc();
    let num = integrate(&nodal(g, |i, _| r[i] * pot.samples()[i]));
    let den = integrate(&nodal(g, |i, _| r[i].powf(q)));
    if den == 0.0 {
        return Err(Error::InvalidParameter("reverse HLS ratio of the zero density".into()));
    }
    Ok(num / den.powf(2.0 / q))
}

/// `I[w] = d_α ∫_0^∞ ∫_0^∞ w(x) w(y) (x+y)^{2α-1}` computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePositivity {
    pub double: f64,
    pub laplace: f64,
    pub relative_gap: f64,
}

/// Galerkin matrix of the kernel `(x+y)^{2α-1}` on the cell-end basis:
/// entry `(2c + e, 2c' + e')` integrates the hat of end `e` on cell `c`
/// against the hat of end `e'` on cell `c'`.
#[derive(Debug, Clone)]
pub struct SumKernel {
    grid: Arc<HalfGrid>,
    order: FractionalOrder,
    matrix: DMatrix<f64>,
}

impl SumKernel {
    pub fn new(order: FractionalOrder, grid: Arc<HalfGrid>) -> Self {
        let n = grid.cells();
        let p = order.p();
        let nodes = grid.nodes();
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for c in 0..n {
            let (a, b) = (nodes[c], nodes[c + 1]);
            for (x, w) in outer_rule(a, b, c == 0) {
                let t = (x - a) / (b - a);
                let phi = [1.0 - t, t];
                for cp in 0..n {
                    let inner = cell_weights(x, nodes[cp], nodes[cp + 1], p, true).sgn;
                    for e in 0..2 {
                        for ep in 0..2 {
                            matrix[(2 * c + e, 2 * cp + ep)] += w * phi[e] * inner[ep];
                        }
                    }
                }
            }
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Self { grid, order, matrix: sym }
    }

    pub fn grid(&self) -> &HalfGrid {
        &self.grid
    }

    /// `d_α wᵀ G w` for cellwise-linear `w`.
    pub fn form(&self, w: &impl PiecewiseLinear) -> Result<f64> {
        if w.grid() != &*self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.cells();
        let coef = DVector::from_iterator(2 * n, (0..n).flat_map(|j| {
            let (l, r) = w.cell(j);
            [l, r]
        }));
        Ok(self.order.d_alpha * coef.dot(&(&self.matrix * &coef)))
    }
}

/// 16-point Gauss on `[a, b]`; the first cell is split geometrically toward
/// the corner singularity at the origin.
fn outer_rule(a: f64, b: f64, corner: bool) -> Vec<(f64, f64)> {
    let rule = gl(16);
    let mut pieces = vec![(a, b)];
    if corner {
        pieces.clear();
        let mut hi = b;
        for _ in 0..40 {
            pieces.push((0.5 * hi, hi));
            hi *= 0.5;
        }
        pieces.push((a, hi));
    }
    pieces
        .into_iter()
        .flat_map(|(lo, hi)| rule.iter().map(move |&(t, w)| (lo + (hi - lo) * t, w * (hi - lo))))
        .collect()
}

/// `∫_0^L e^{-tx} w(x) dx`, exact for cellwise-linear `w`.
pub fn laplace_transform(w: &impl PiecewiseLinear, t: f64) -> f64 {
    let g = w.grid();
    let nodes = g.nodes();
    (0..g.cells())
        .map(|j| {
            let (l, r) = w.cell(j);
            let h = g.width(j);
            let z = t * h;
            let (f1, f2) = phis(z);
            (-t * nodes[j]).exp() * h * (l * f1 + r * f2)
        })
        .sum()
}

/// `φ1(z) = ∫_0^1 e^{-zξ}(1-ξ) dξ` and `φ2(z) = ∫_0^1 e^{-zξ} ξ dξ`.
fn phis(z: f64) -> (f64, f64) {
    if z < 0.5 {
        let (mut f1, mut f2) = (0.0, 0.0);
        let mut pow = 1.0;
        let mut fact = 2.0;
        for k in 0..20 {
            f1 += pow / fact;
            f2 += pow * (k + 1) as f64 / fact;
            pow *= -z;
            fact *= (k + 3) as f64;
        }
        return (f1, f2);
    }
    let e = (-z).exp();
    ((z - 1.0 + e) / (z * z), (1.0 - e * (1.0 + z)) / (z * z))
}

/// Number of Gauss–Jacobi nodes in the transform route.
pub const LAPLACE_NODES: usize = 128;

/// `I[w] = (d_α / Γ(1-2α)) ∫_0^∞ t^{-2α} (Lw(t))² dt`, with `t = τ/(1-τ)`
/// and Gauss–Jacobi in `τ`. At `α = 1/2` the kernel is constant and
/// `I = d_α (∫_0^∞ w)²`.
pub fn laplace_route(w: &impl PiecewiseLinear, order: &FractionalOrder) -> f64 {
    let a = order.p();
    if order.oracle {
        let total: f64 = laplace_transform(w, 0.0);
        return order.d_alpha * total * total;
    }
    let rule = gauss_jacobi_unit(LAPLACE_NODES, a, -a);
    let sum: f64 = rule
        .iter()
        .map(|&(tau, wt)| {
            let t = tau / (1.0 - tau);
            let l = laplace_transform(w, t);
            wt * l * l / ((1.0 - tau) * (1.0 - tau))
        })
        .sum();
    order.d_alpha / gamma(1.0 - a) * sum
}

pub fn laplace_positivity(w: &impl PiecewiseLinear, kernel: &SumKernel) -> Result<LaplacePositivity> {
    let double = kernel.form(w)?;
    let laplace = laplace_route(w, &kernel.order);
    let scale = double.abs().max(laplace.abs());
    let relative_gap = if scale == 0.0 { 0.0 } else { (double - laplace).abs() / scale };
    Ok(LaplacePositivity { double, laplace, relative_gap })
}

/// `I` for the indicator of `[-1, 1]`: `d_α ∫_0^1∫_0^1 (x+y)^{2α-1}`.
pub fn box_form(order: &FractionalOrder) -> f64 {
    let p = order.p();
    // ∫∫ (x+y)^{p-1} = (2^{p+1} - 2) / (p (p+1))
    order.d_alpha * (2f64.powf(p + 1.0) - 2.0) / (p * (p + 1.0))
}

/// Random even, decaying, sign-changing profile.
pub fn random_sign_changing(grid: Arc<HalfGrid>, rng: &mut ChaCha8Rng) -> EvenProfile {
    let terms: Vec<(f64, f64, f64)> = (0..rng.random_range(2..=4))
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.3..2.0), rng.random_range(0.0..4.0)))
        .collect();
    let f = move |x: f64| terms.iter().map(|(a, b, c)| a * (-(x / b).powi(2)).exp() * (c * x).cos()).sum::<f64>();
    EvenProfile::from_fn(grid, f).expect("finite")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCorpus {
    pub samples: usize,
    pub min_value: f64,
    /// Largest route gap over samples with `|I| >= 1e-8`.
    pub max_gap: f64,
}

/// Both routes over `count` random profiles on a uniform grid of `[0, 12]`.
pub fn laplace_corpus(order: &FractionalOrder, count: usize, cells: usize, seed: u64) -> Result<LaplaceCorpus> {
    let grid = Arc::new(HalfGrid::uniform(12.0, cells)?);
    let kernel = SumKernel::new(*order, grid.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = LaplaceCorpus { samples: count, min_value: f64::INFINITY, max_gap: 0.0 };
    for _ in 0..count {
        let w = random_sign_changing(grid.clone(), &mut rng);
        let r = laplace_positivity(&w, &kernel)?;
        out.min_value = out.min_value.min(r.double).min(r.laplace);
        if r.double.abs() >= 1e-8 {
            out.max_gap = out.max_gap.max(r.relative_gap);
        }
    }
    Ok(out)
}

/// Fit of `-log(v/v(0)) ≈ d x^p` on `[L/4, 3L/4]` from the profile alone.
///
/// The exponent comes from `log(-∂_x log v)` against `log x`, the derivative
/// taken by centered differences; the slope of `log(-log(v/v(0)))` is
/// reported as `loglog_exponent`.
pub fn decay_exponent_fit(v: &EvenProfile) -> Result<DecayFit> {
    let g = v.grid();
    let nodes = g.nodes();
    let s = v.samples();
    let length = g.length();
    let (lo, hi) = (0.25 * length, 0.75 * length);
    let (v_lo, v_hi) = (v.interp(lo), v.interp(hi));
    if !(v_hi > 0.0 && v_lo > 100.0 * v_hi) {
        return Err(Error::InsufficientDecay(format!("v drops only by {:.3} across the window", v_lo / v_hi)));
    }
    let v0 = s[0];
    let (mut deriv, mut loglog) = (Vec::new(), Vec::new());
    for i in 1..g.cells() {
        let x = nodes[i];
        if x < lo || x > hi {
            continue;
        }
        let d = -(s[i + 1].ln() - s[i - 1].ln()) / (nodes[i + 1] - nodes[i - 1]);
        let l = -(s[i] / v0).ln();
        if d > 0.0 && l > 0.0 {
            deriv.push((x.ln(), d.ln()));
            loglog.push((x.ln(), l.ln()));
        }
    }
    if deriv.len() < 3 {
        return Err(Error::InsufficientDecay("fewer than three usable nodes".into()));
    }
    let (slope, intercept) = least_squares(&deriv);
    let exponent = 1.0 + slope;
    Ok(DecayFit {
        prefactor: intercept.exp() / exponent,
        exponent,
        loglog_exponent: least_squares(&loglog).0,
        window: (lo, hi),
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx, my - sxy / sxx * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryFlags {
    /// Structural: only `x >= 0` is stored and the extension is even.
    pub even: bool,
    pub strictly_decreasing: bool,
    pub first_violation: Option<usize>,
}

pub fn symmetry_monotonicity_check(u: &EvenProfile) -> SymmetryFlags {
    let first_violation = u.samples().windows(2).position(|w| !(w[1] < w[0])).map(|i| i + 1);
    SymmetryFlags { even: true, strictly_decreasing: first_violation.is_none(), first_violation }
}

/// `|mass(rescaled)/mass - μ^{2s-1}|`.
pub fn scaling_mass_check(sol: &Solution, mu: f64) -> Result<f64> {
    let r = rescale_solution(sol, mu)?;
    let s = sol.params.order.s;
    Ok((r.mass / sol.mass - mu.powf(2.0 * s - 1.0)).abs())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pohozaev: Pohozaev,
    pub pohozaev_residual_rel: f64,
    pub double_integral_gap_rel: f64,
    pub hls_ratio: f64,
    pub laplace_min: f64,
    pub laplace_route_gap: f64,
    pub decay_exponent: Option<f64>,
    pub decay_target: f64,
    pub monotone_ok: bool,
    pub even_ok: bool,
    pub scaling_mass_gap: Option<f64>,
    pub skipped: Vec<String>,
}

/// Tolerances applied by [`VerificationReport::failures`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub pohozaev: f64,
    pub double_integral: f64,
    pub laplace_gap: f64,
    pub decay: f64,
    pub scaling: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { pohozaev: 1e-6, double_integral: 1e-6, laplace_gap: 1e-4, decay: 0.05, scaling: 1e-5 }
    }
}

impl VerificationReport {
    /// Names of the checks that fail `t`.
    pub fn failures(&self, t: &Thresholds) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.pohozaev_residual_rel <= t.pohozaev) {
            out.push("pohozaev");
        }
        if !(self.double_integral_gap_rel <= t.double_integral) {
            out.push("double_integral");
        }
        if !(self.hls_ratio > 0.0) {
            out.push("reverse_hls");
        }
        if !(self.laplace_min >= -1e-10 && self.laplace_route_gap <= t.laplace_gap) {
            out.push("laplace_positivity");
        }
        if let Some(p) = self.decay_exponent {
            if !((p - self.decay_target).abs() <= t.decay) {
                out.push("decay");
            }
        }
        if !self.monotone_ok || !self.even_ok {
            out.push("symmetry_monotonicity");
        }
        if let Some(g) = self.scaling_mass_gap {
            if !(g <= t.scaling) {
                out.push("scaling");
            }
        }
        out
    }

    /// Rows of `(check, value, verdict)` for display.
    pub fn table(&self, t: &Thresholds) -> Vec<(String, String, bool)> {
        let failed = self.failures(t);
        let ok = |name: &str| !failed.contains(&name);
        let mut rows = vec![
            ("pohozaev".to_string(), format!("{:.3e}", self.pohozaev_residual_rel), ok("pohozaev")),
            ("double_integral".to_string(), format!("{:.3e}", self.double_integral_gap_rel), ok("double_integral")),
            ("reverse_hls".to_string(), format!("{:.6}", self.hls_ratio), ok("reverse_hls")),
            (
                "laplace_positivity".to_string(),
                format!("min {:.3e}, gap {:.3e}", self.laplace_min, self.laplace_route_gap),
                ok("laplace_positivity"),
            ),
            (
                "symmetry_monotonicity".to_string(),
                format!("even {}, decreasing {}", self.even_ok, self.monotone_ok),
                ok("symmetry_monotonicity"),
            ),
        ];
        if let Some(p) = self.decay_exponent {
            rows.push(("decay".to_string(), format!("{p:.4} (2α = {:.4})", self.decay_target), ok("decay")));
        }
        if let Some(g) = self.scaling_mass_gap {
            rows.push(("scaling".to_string(), format!("{g:.3e}"), ok("scaling")));
        }
        rows
    }
}

/// Options for [`verify_solution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub laplace_samples: usize,
    pub laplace_cells: usize,
    pub seed: u64,
    pub scaling_mu: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { laplace_samples: 100, laplace_cells: 192, seed: 0, scaling_mu: 2.0 }
    }
}

pub fn verify_solution(sol: &Solution, o: &VerifyOptions) -> Result<VerificationReport> {
    let m = sol.moments();
    let rho = sol.density();
    let pohozaev = pohozaev_residual(sol);
    let di = double_integral_gap(&rho, m)?;
    let hls = reverse_hls_ratio(&rho, m)?;
    let corpus = laplace_corpus(&sol.params.order, o.laplace_samples, o.laplace_cells, o.seed)?;
    let mut skipped = Vec::new();
    let decay_exponent = if sol.params.sigma == 0.0 {
        match decay_exponent_fit(&sol.v) {
            Ok(f) => Some(f.exponent),
            Err(e) => {
                skipped.push(format!("decay: {e}"));
                None
            }
        }
    } else {
        skipped.push("decay: Gaussian factor dominates the tail when sigma > 0".into());
        None
    };
    let scaling_mass_gap = if sol.params.weight.is_constant() && sol.params.sigma == 0.0 {
        Some(scaling_mass_check(sol, o.scaling_mu)?)
    } else {
        skipped.push("scaling: needs constant K and sigma = 0".into());
        None
    };
    let flags = symmetry_monotonicity_check(&sol.u);
    Ok(VerificationReport {
        pohozaev,
        pohozaev_residual_rel: pohozaev.relative,
        double_integral_gap_rel: di.relative_gap,
        hls_ratio: hls,
        laplace_min: corpus.min_value,
        laplace_route_gap: corpus.max_gap,
        decay_exponent,
        decay_target: sol.params.order.p(),
        monotone_ok: flags.strictly_decreasing,
        even_ok: flags.even,
        scaling_mass_gap,
        skipped,
    })
}

/// Box `[-1, 1]` as a cellwise profile on a uniform grid of `[0, L]`.
pub fn box_profile(length: f64, cells: usize) -> Result<CellProfile> {
    CellProfile::indicator(Arc::new(HalfGrid::uniform(length, cells)?), 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{picard_solve, GridPolicy, Length, ShootingParams, SolveOptions};
    use crate::weight::Weight;

    fn quarter() -> FractionalOrder {
        FractionalOrder::new(0.75).unwrap()
    }

    #[test]
    fn phis_are_continuous_at_switch() {
        let (a, b) = phis(0.5 - 1e-12);
        let (c, d) = phis(0.5 + 1e-12);
        assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
        assert_eq!(phis(0.0), (0.5, 0.5));
    }

    #[test]
    fn laplace_transform_of_exponential() {
        let g = Arc::new(HalfGrid::uniform(40.0, 4000).unwrap());
        let w = EvenProfile::from_fn(g, |x| (-x).exp()).unwrap();
        for t in [0.0, 0.5, 3.0] {
            assert!((laplace_transform(&w, t) - 1.0 / (1.0 + t)).abs() < 1e-5);
        }
    }

    #[test]
    fn box_value_both_routes() {
        let o = quarter();
        let exact = box_form(&o);
        // d_α (4/3)(2√2 - 2)
        let closed = o.d_alpha * 4.0 / 3.0 * (8f64.sqrt() - 2.0);
        assert!((exact - closed).abs() < 1e-15);
        assert!((exact - 0.440_659_5).abs() < 1e-7);
        let b = box_profile(3.0, 96).unwrap();
        let k = SumKernel::new(o, b.grid_arc().clone());
        let r = laplace_positivity(&b, &k).unwrap();
        assert!((r.double - exact).abs() < 1e-8, "{r:?}");
        assert!((r.laplace - exact).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn zero_profile_has_zero_form() {
        let g = Arc::new(HalfGrid::uniform(4.0, 32).unwrap());
        let k = SumKernel::new(quarter(), g.clone());
        let r = laplace_positivity(&EvenProfile::zeros(g), &k).unwrap();
        assert_eq!((r.double, r.laplace), (0.0, 0.0));
    }

    #[test]
    fn half_order_form_is_a_square() {
        let o = FractionalOrder::new(1.0).unwrap();
        let g = Arc::new(HalfGrid::uniform(10.0, 64).unwrap());
        let w = EvenProfile::from_fn(g.clone(), |x| (1.0 - 0.5 * x) * (-x).exp()).unwrap();
        let k = SumKernel::new(o, g);
        let r = laplace_positivity(&w, &k).unwrap();
        assert!(r.double > 0.1 && r.relative_gap < 1e-10, "{r:?}");
    }

    #[test]
    fn corpus_is_positive() {
        let c = laplace_corpus(&quarter(), 20, 96, 11).unwrap();
        assert!(c.min_value >= -1e-10);
        assert!(c.max_gap <= 1e-4, "{c:?}");
    }

    #[test]
    fn decay_fit_recovers_model() {
        let g = Arc::new(HalfGrid::graded(4000.0, 800, 1.0).unwrap());
        let v = EvenProfile::from_fn(g, |x| (-0.7 * x.sqrt()).exp()).unwrap();
        let f = decay_exponent_fit(&v).unwrap();
        assert!((f.exponent - 0.5).abs() < 0.01 && (f.prefactor - 0.7).abs() < 0.02, "{f:?}");
        let flat = EvenProfile::from_fn(Arc::new(HalfGrid::uniform(10.0, 40).unwrap()), |_| 1.0).unwrap();
        assert!(matches!(decay_exponent_fit(&flat), Err(Error::InsufficientDecay(_))));
    }

    #[test]
    fn monotonicity_flags() {
        let g = Arc::new(HalfGrid::uniform(5.0, 20).unwrap());
        let up = EvenProfile::from_fn(g.clone(), |x| x).unwrap();
        assert!(!symmetry_monotonicity_check(&up).strictly_decreasing);
        let flat = EvenProfile::from_fn(g.clone(), |_| 2.0).unwrap();
        assert!(!symmetry_monotonicity_check(&flat).strictly_decreasing);
        let down = EvenProfile::from_fn(g, |x| -x * x).unwrap();
        assert!(symmetry_monotonicity_check(&down).strictly_decreasing);
    }

    #[test]
    fn hls_is_scale_and_dilation_invariant() {
        let o = quarter();
        let g = Arc::new(HalfGrid::graded(30.0, 256, 1.0).unwrap());
        let m = KernelMoments::new(o, g.clone());
        let rho = EvenProfile::from_fn(g.clone(), |x| (-x * x).exp() + 0.5 / (x * 0.7).cosh().powi(2)).unwrap();
        let base = reverse_hls_ratio(&rho, &m).unwrap();
        assert!(base > 0.0);
        let triple = rho.map(|_, r| 3.0 * r);
        assert!((reverse_hls_ratio(&triple, &m).unwrap() / base - 1.0).abs() < 1e-10);
        let t = 2.5;
        let dg = Arc::new(g.scaled(1.0 / t).unwrap());
        let dm = KernelMoments::new(o, dg.clone());
        let dil = EvenProfile::new(dg, rho.samples().iter().map(|r| t * r).collect()).unwrap();
        assert!((reverse_hls_ratio(&dil, &dm).unwrap() / base - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_identities() {
        let p = ShootingParams::new(FractionalOrder::new(1.0).unwrap(), 1.0, 0.0, Weight::default()).unwrap();
        let o = SolveOptions {
            grid: GridPolicy { cells: 512, length: Length::Fixed(30.0), ..GridPolicy::default() },
            ..SolveOptions::default()
        };
        let sol = picard_solve(&p, &o, None).unwrap();
        let poh = pohozaev_residual(&sol);
        assert!(poh.relative < 1e-6 && poh.inequality_holds, "{poh:?}");
        assert!((poh.riesz_term + 8f64.sqrt()).abs() < 1e-4);
        let di = double_integral_gap(&sol.density(), sol.moments()).unwrap();
        assert!(di.relative_gap < 1e-6, "{di:?}");
        assert!((scaling_mass_check(&sol, 2.0).unwrap()).abs() < 1e-6);
        assert_eq!(scaling_mass_check(&sol, 1.0).unwrap(), 0.0);
        let flags = symmetry_monotonicity_check(&sol.u);
        assert!(flags.even && flags.strictly_decreasing);
    }

    #[test]
    fn weighted_pohozaev_with_gaussian() {
        let k = Weight::Polynomial { a: 1.0 };
        let p = ShootingParams::new(quarter(), 1.0, 0.5, k).unwrap();
        let o = SolveOptions { grid: GridPolicy { cells: 512, ..GridPolicy::default() }, ..SolveOptions::default() };
        let sol = picard_solve(&p, &o, None).unwrap();
        let poh = pohozaev_residual(&sol);
        assert!(poh.relative < 1e-5, "{poh:?}");
        assert!(poh.weight_term < 0.0 && poh.gaussian_term < 0.0 && poh.inequality_holds);
    }
}
