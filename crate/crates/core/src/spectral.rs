//! Spectral certificates for a computed profile: the Morse index of
//! `L_u = (-Δ)^s - K e^u`, the even and odd kernel equations, and the
//! spectrum of the linearized shooting map.
//!
//! The quadratic form of `(-Δ)^s` is discretized with P1 elements on a
//! uniform grid of `[-L, L]`. On such a grid the stiffness matrix is exactly
//! Toeplitz, with symbol
//! `a(m) = (1/2π) ∫ |ξ|^{2s} sinc⁴(ξ/2) e^{imξ} dξ`,
//! which has the closed form `-(C_s/D) δ⁴|t|^q (m)`, `q = 3 - 2s`,
//! `D = q(q-1)(q-2)(q-3)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixedpoint::{solve_on, Solution, SolveOptions};
use crate::grid::{EvenProfile, HalfGrid, Spacing};
use crate::params::FractionalOrder;
use crate::quad::gl;
use crate::riesz::KernelMoments;

/// Default number of cells on each half of `[-L, L]`.
pub const DEFAULT_HALF_CELLS: usize = 320;
/// The spectral domain ends where `V / V(0)` drops below this.
pub const POTENTIAL_CUTOFF: f64 = 1e-6;

/// P1 Gagliardo form on `h·{-m, ..., m}` with zero exterior values.
#[derive(Debug, Clone)]
pub struct GagliardoForm {
    pub order: FractionalOrder,
    pub half_cells: usize,
    pub h: f64,
    /// `S_ij = symbol[|i - j|]`.
    pub symbol: Vec<f64>,
}

/// `δ⁴|t|^q` at integer `m >= 0`.
fn fourth_difference(q: f64, m: usize) -> f64 {
    let f = |t: f64| t.abs().powf(q);
    let x = m as f64;
    if m < 8 {
        return f(x - 2.0) - 4.0 * f(x - 1.0) + 6.0 * f(x) - 4.0 * f(x + 1.0) + f(x + 2.0);
    }
    // 16 sinh⁴(D/2) = Σ_{k>=2} (2^{2k+1} - 8)/(2k)! D^{2k}
    let mut sum = 0.0;
    let mut deriv = 1.0;
    let mut fact = 1.0;
    for j in 0..48 {
        deriv *= q - j as f64;
        fact *= (j + 1) as f64;
        if j % 2 == 1 && j >= 3 {
            let k = (j + 1) / 2;
            let term = (2f64.powi(2 * k as i32 + 1) - 8.0) / fact * deriv * x.powf(q - (j + 1) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
    }
    sum
}

/// Toeplitz symbol `a(0..len)` for unit spacing.
pub fn stiffness_symbol(order: &FractionalOrder, len: usize) -> Vec<f64> {
    if order.oracle {
        let mut a = vec![0.0; len];
        a[0] = 2.0;
        if len > 1 {
            a[1] = -1.0;
        }
        return a;
    }
    let q = 3.0 - 2.0 * order.s;
    let d = q * (q - 1.0) * (q - 2.0) * (q - 3.0);
    (0..len).map(|m| -order.big_c_s / d * fourth_difference(q, m)).collect()
}

impl GagliardoForm {
    pub fn new(order: FractionalOrder, length: f64, half_cells: usize) -> Result<Self> {
        if !(length > 0.0) || half_cells < 4 {
            return Err(Error::InvalidGrid(format!("spectral grid L = {length}, m = {half_cells}")));
        }
        let h = length / half_cells as f64;
        let scale = h.powf(1.0 - 2.0 * order.s);
        let symbol = stiffness_symbol(&order, 2 * half_cells).into_iter().map(|a| a * scale).collect();
        Ok(Self { order, half_cells, h, symbol })
    }

    /// Interior node count `2m - 1`.
    pub fn dim(&self) -> usize {
        2 * self.half_cells - 1
    }

    pub fn length(&self) -> f64 {
        self.h * self.half_cells as f64
    }

    /// Dense stiffness on the interior nodes `-m+1, ..., m-1`.
    pub fn stiffness(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.symbol[i.abs_diff(j)])
    }

    pub fn mass(&self) -> DMatrix<f64> {
        let n = self.dim();
        let h = self.h;
        DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0 * h / 3.0,
            1 => h / 6.0,
            _ => 0.0,
        })
    }

    /// `∫ V φ_i φ_j` for even `V`, by 6-point Gauss on every cell.
    pub fn potential_mass(&self, v: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let m = self.half_cells;
        let h = self.h;
        let rule = gl(6);
        // Half-line cell c = [c h, (c+1) h]: (left², right², left·right).
        let cells: Vec<(f64, f64, f64)> = (0..m)
            .map(|c| {
                rule.iter().fold((0.0, 0.0, 0.0), |acc, &(t, w)| {
                    let val = w * h * v((c as f64 + t) * h);
                    (acc.0 + val * (1.0 - t).powi(2), acc.1 + val * t * t, acc.2 + val * t * (1.0 - t))
                })
            })
            .collect();
        let diag = |k: usize| -> f64 {
            match k {
                0 => 2.0 * cells[0].0,
                k if k < m => cells[k].0 + cells[k - 1].1,
                _ => 0.0,
            }
        };
        let n = self.dim();
        let off = m as i64 - 1;
        DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i as i64 - off, j as i64 - off);
            if a == b {
                diag(a.unsigned_abs() as usize)
            } else if (a - b).abs() == 1 {
                // The cell between the two nodes, mirrored to x >= 0.
                let lo = a.min(b);
                let c = if lo >= 0 { lo } else { -lo - 1 };
                cells[c as usize].2
            } else {
                0.0
            }
        })
    }
}

/// Even and odd blocks of a reflection-symmetric matrix on nodes
/// `-m+1..m-1`, in the orthonormal bases `e_0, (e_j ± e_{-j})/√2`.
pub fn parity_blocks(b: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = b.nrows();
    let m = (n + 1) / 2;
    let c = m - 1;
    let r2 = 2f64.sqrt();
    let even = DMatrix::from_fn(m, m, |i, j| match (i, j) {
        (0, 0) => b[(c, c)],
        (0, j) => r2 * b[(c, c + j)],
        (i, 0) => r2 * b[(c + i, c)],
        (i, j) => b[(c + i, c + j)] + b[(c + i, c - j)],
    });
    let odd = DMatrix::from_fn(m - 1, m - 1, |i, j| b[(c + i + 1, c + j + 1)] - b[(c + i + 1, c - j - 1)]);
    (even, odd)
}

/// Eigenvalues of the pencil `(A, M)` with `M` symmetric positive definite.
pub fn pencil_eigenvalues(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = m.clone().cholesky().ok_or_else(|| Error::Eigen("mass matrix not positive definite".into()))?;
    let l = chol.l();
    let x = l.solve_lower_triangular(a).ok_or(Error::SingularSystem)?;
    let y = l.solve_lower_triangular(&x.transpose()).ok_or(Error::SingularSystem)?;
    let c = (&y + y.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Even,
    Odd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorseReport {
    pub morse_index: usize,
    /// Lowest eigenvalues of `L_u` over both sectors, ascending.
    pub lowest: Vec<(f64, Sector)>,
    pub length: f64,
    pub half_cells: usize,
    /// `‖|x|^{2α} V‖_{L¹} + 1`; the eigenvalue count is bounded by a
    /// constant times this.
    pub bound_proxy: f64,
}

/// Negative eigenvalues of `(S - M_V, M)` with `V` given on `x >= 0`.
pub fn morse_index_with(order: FractionalOrder, potential: impl Fn(f64) -> f64, length: f64, half_cells: usize) -> Result<MorseReport> {
    let g = GagliardoForm::new(order, length, half_cells)?;
    let s = g.stiffness();
    let mv = g.potential_mass(&potential);
    let mass = g.mass();
    let a = s - &mv;
    let (ae, ao) = parity_blocks(&a);
    let (me, mo) = parity_blocks(&mass);
    let mut all: Vec<(f64, Sector)> = pencil_eigenvalues(&ae, &me)?
        .into_iter()
        .map(|e| (e, Sector::Even))
        .chain(pencil_eigenvalues(&ao, &mo)?.into_iter().map(|e| (e, Sector::Odd)))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    let morse_index = all.iter().filter(|e| e.0 < 0.0).count();
    let p = order.p();
    let rule = gl(6);
    let bound_proxy = 1.0
        + 2.0
            * (0..half_cells)
                .map(|c| {
                    rule.iter()
                        .map(|&(t, w)| {
                            let x = (c as f64 + t) * g.h;
                            w * g.h * x.powf(p) * potential(x)
                        })
                        .sum::<f64>()
                })
                .sum::<f64>();
    all.truncate(6);
    Ok(MorseReport { morse_index, lowest: all, length, half_cells, bound_proxy })
}

/// Where `V / V(0)` first drops below [`POTENTIAL_CUTOFF`].
pub fn spectral_length(sol: &Solution) -> f64 {
    let v0 = sol.v.samples()[0];
    let cut = POTENTIAL_CUTOFF.sqrt() * v0;
    let nodes = sol.grid().nodes();
    match sol.v.samples().iter().position(|&v| v <= cut) {
        Some(i) if i > 0 => {
            let (a, b) = (sol.v.samples()[i - 1], sol.v.samples()[i]);
            nodes[i - 1] + (a - cut) / (a - b) * (nodes[i] - nodes[i - 1])
        }
        _ => sol.grid().length(),
    }
}

/// Morse index of `L_u` with `V = K e^u = v²` interpolated from the solution.
pub fn morse_index(sol: &Solution, length: Option<f64>, half_cells: usize) -> Result<MorseReport> {
    let length = length.unwrap_or_else(|| spectral_length(sol)).min(sol.grid().length());
    let rho = sol.density();
    morse_index_with(sol.params.order, |x| rho.interp(x), length, half_cells)
}

fn require_symmetric_case(sol: &Solution) -> Result<()> {
    if !sol.params.weight.is_constant() {
        return Err(Error::NonConstantWeight);
    }
    if sol.params.sigma != 0.0 {
        return Err(Error::InvalidParameter("kernel equations need sigma = 0".into()));
    }
    Ok(())
}

/// `sup |ψ - ψ(0) - w(v² ψ)| / sup |ψ|` over nodes in `[0, L/2]`, where `w` is
/// the exponent integral. Vanishes when `ψ` solves the even kernel equation.
pub fn kernel_residual_profile(sol: &Solution, psi: &EvenProfile) -> Result<f64> {
    require_symmetric_case(sol)?;
    let m = sol.moments();
    let f = sol.v.zip_with(psi, |_, v, p| v * v * p)?;
    let w = m.exponent_integral_linear(&f)?;
    let psi0 = psi.samples()[0];
    let half = 0.5 * sol.grid().length();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (i, &x) in sol.grid().nodes().iter().enumerate() {
        if x > half {
            break;
        }
        let p = psi.samples()[i];
        num = num.max((p - psi0 - w.samples()[i]).abs());
        den = den.max(p.abs());
    }
    Ok(num / den)
}

/// The dilation mode `ψ = x ∂_x u + 2s`.
pub fn dilation_mode(sol: &Solution) -> EvenProfile {
    let du = sol.du();
    let two_s = 2.0 * sol.params.order.s;
    EvenProfile::new(sol.grid().clone(), du.map(|x, d| x * d + two_s).into_samples()).expect("finite")
}

/// Residual of the even kernel equation for the dilation mode.
pub fn kernel_residual_even(sol: &Solution) -> Result<f64> {
    kernel_residual_profile(sol, &dilation_mode(sol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirmanSchwinger {
    pub top: f64,
    pub second: f64,
    /// `(top - |second|) / top`.
    pub gap: f64,
    /// Smallest entry of the top eigenvector on interior nodes, scaled to
    /// unit maximum.
    pub eigvec_min: f64,
    /// `sup|A h - h| / sup|h|` for `h = v H_α(v²)`.
    pub known_residual: f64,
}

/// Top of the spectrum of `A = c_α diag(v) Q diag(v)` on nodes `1..n`, where
/// `Q` integrates `|x+y|^{2α} - |x-y|^{2α}` against hats. `A` is entrywise
/// positive, so its top eigenvector is computed by block power iteration from
/// a positive start.
pub fn birman_schwinger_odd(sol: &Solution) -> Result<BirmanSchwinger> {
    require_symmetric_case(sol)?;
    let m = sol.moments();
    let c = m.order().c_alpha;
    let q = m.odd_pow_matrix();
    let v = sol.v.samples();
    let n = v.len() - 1;
    let a = DMatrix::from_fn(n, n, |i, k| c * v[i + 1] * q[(i + 1, k + 1)] * v[k + 1]);

    let h_full: crate::grid::OddProfile = sol.riesz_density().zip_with(&sol.v, |_, h, v| h * v)?;
    let h = DVector::from_column_slice(&h_full.samples()[1..]);
    let ah = &a * &h;
    let hmax = h.amax();
    let known_residual = (&ah - &h).amax() / hmax.max(f64::MIN_POSITIVE);

    if a.amax() == 0.0 {
        return Ok(BirmanSchwinger { top: 0.0, second: 0.0, gap: 0.0, eigvec_min: 0.0, known_residual });
    }
    let (top, second, vec) = top_pair(&a)?;
    let vmax = vec.amax();
    let eigvec_min = vec.iter().take(n - 1).fold(f64::INFINITY, |m, &x| m.min(x)) / vmax;
    Ok(BirmanSchwinger { top, second, gap: (top - second.abs()) / top, eigvec_min, known_residual })
}

/// Largest eigenvalue with its positive eigenvector, and the next largest
/// eigenvalue in modulus, by orthogonal iteration with Ritz extraction.
fn top_pair(a: &DMatrix<f64>) -> Result<(f64, f64, DVector<f64>)> {
    let n = a.nrows();
    let k = 6.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DMatrix::from_fn(n, k, |_, j| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
    let mut prev = (f64::NAN, f64::NAN);
    for it in 0..20_000 {
        let y = a * &x;
        x = y.qr().q();
        if it % 10 != 9 {
            continue;
        }
        let b = x.transpose() * a * &x;
        let mut ritz: Vec<f64> = b.complex_eigenvalues().iter().map(|z| z.norm() * z.re.signum()).collect();
        ritz.sort_by(|p, q| q.abs().total_cmp(&p.abs()));
        let cur = (ritz[0], if k > 1 { ritz[1] } else { 0.0 });
        if (cur.0 - prev.0).abs() <= 1e-14 * cur.0.abs() && (cur.1 - prev.1).abs() <= 1e-10 * cur.0.abs() {
            let mut vec: DVector<f64> = x.column(0).into();
            // Refine the leading vector alone: one-dimensional power steps.
            for _ in 0..200 {
                let y = a * &vec;
                vec = &y / y.norm();
            }
            if vec.sum() < 0.0 {
                vec = -vec;
            }
            let top = vec.dot(&(a * &vec)) / vec.dot(&vec);
            return Ok((top, cur.1, vec));
        }
        prev = cur;
    }
    Err(Error::Eigen("orthogonal iteration did not settle".into()))
}

/// Cells of the coarse grid used for the dense nonsymmetric eigenproblem.
pub const LINEARIZED_CELLS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedSpectrum {
    pub cells: usize,
    /// `min |μ - 1|` over eigenvalues `μ` of `D_v T`.
    pub distance: f64,
    pub spectral_radius: f64,
}

/// Spectrum of the Jacobian `diag(T) E diag(v)` of the shooting map.
pub fn jacobian_spectrum(v: &EvenProfile, t: &EvenProfile, m: &KernelMoments) -> LinearizedSpectrum {
    let e = m.exponent_matrix();
    let (vs, ts) = (v.samples(), t.samples());
    let n = vs.len();
    let j = DMatrix::from_fn(n, n, |i, k| ts[i] * e[(i, k)] * vs[k]);
    let ev = j.complex_eigenvalues();
    let distance = ev.iter().map(|z| (z - nalgebra::Complex::new(1.0, 0.0)).norm()).fold(f64::INFINITY, f64::min);
    let spectral_radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    LinearizedSpectrum { cells: n - 1, distance, spectral_radius }
}

/// Re-solves on a coarse grid of the same family (same `L` and core) and
/// returns the spectrum of `D_v T` there.
pub fn linearized_fixedpoint_spectrum(sol: &Solution, cells: usize) -> Result<LinearizedSpectrum> {
    let grid = sol.grid();
    let coarse = match grid.spacing() {
        Spacing::Custom => HalfGrid::uniform(grid.length(), cells)?,
        _ => grid.resized(grid.length(), cells)?,
    };
    let m = Arc::new(KernelMoments::new(sol.params.order, Arc::new(coarse)));
    let o = SolveOptions { tol: 1e-12, ..SolveOptions::default() };
    let c = solve_on(&sol.params, &o, m.clone(), Some(&sol.v))?;
    Ok(jacobian_spectrum(&c.v, &c.v, &m))
}

/// Everything the spectral module certifies about one solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    pub morse: MorseReport,
    pub kernel_residual_even: Option<f64>,
    pub kernel_residual_odd: Option<f64>,
    pub bs: Option<BirmanSchwinger>,
    pub linearized: LinearizedSpectrum,
}

impl SpectralReport {
    pub fn morse_index(&self) -> usize {
        self.morse.morse_index
    }
}

/// Runs every check that applies; the kernel equations need `K` constant
/// and `σ = 0`.
pub fn spectral_report(sol: &Solution) -> Result<SpectralReport> {
    let morse = morse_index(sol, None, DEFAULT_HALF_CELLS)?;
    let symmetric = require_symmetric_case(sol).is_ok();
    let (even, bs) = if symmetric {
        (Some(kernel_residual_even(sol)?), Some(birman_schwinger_odd(sol)?))
    } else {
        (None, None)
    };
    Ok(SpectralReport {
        morse,
        kernel_residual_even: even,
        kernel_residual_odd: bs.map(|b| b.known_residual),
        bs,
        linearized: linearized_fixedpoint_spectrum(sol, LINEARIZED_CELLS)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{picard_solve, GridPolicy, Length, ShootingParams};
    use crate::quad::gauss_legendre;
    use crate::weight::Weight;
    use std::f64::consts::PI;

    /// `(1/π) ∫_0^Ξ ξ^{2s} sinc⁴(ξ/2) cos(mξ) dξ` plus the mean tail.
    fn fourier_symbol(s: f64, m: usize) -> f64 {
        let rule = gauss_legendre(24);
        let periods = 40_000;
        let mut sum = 0.0;
        for k in 0..periods {
            let (a, b) = (2.0 * PI * k as f64, 2.0 * PI * (k + 1) as f64);
            for &(t, w) in &rule {
                let xi = a + (b - a) * t;
                let sinc = if xi == 0.0 { 1.0 } else { (xi / 2.0).sin() / (xi / 2.0) };
                sum += w * (b - a) * xi.powf(2.0 * s) * sinc.powi(4) * (m as f64 * xi).cos();
            }
        }
        // Mean of 16 sin⁴ cos(mξ)/ξ^{4-2s} beyond Ξ: sin⁴ averages 3/8 for m = 0.
        let xi = 2.0 * PI * periods as f64;
        let tail = if m == 0 { 6.0 * xi.powf(2.0 * s - 3.0) / (3.0 - 2.0 * s) } else { 0.0 };
        (sum + tail) / PI
    }

    #[test]
    fn symbol_matches_fourier_integral() {
        let o = FractionalOrder::new(0.75).unwrap();
        let a = stiffness_symbol(&o, 80);
        for m in [0usize, 1, 2, 5, 9] {
            let f = fourier_symbol(0.75, m);
            assert!((a[m] - f).abs() < 2e-6 * a[0], "m = {m}: {} vs {f}", a[m]);
        }
    }

    #[test]
    fn series_continues_finite_differences() {
        for s in [0.55, 0.75, 0.95] {
            let q = 3.0 - 2.0 * s;
            let direct = |m: f64| {
                let f = |t: f64| t.powf(q);
                f(m - 2.0) - 4.0 * f(m - 1.0) + 6.0 * f(m) - 4.0 * f(m + 1.0) + f(m + 2.0)
            };
            let series = fourth_difference(q, 8);
            assert!((series - direct(8.0)).abs() < 1e-10 * series.abs(), "s = {s}: {series} vs {}", direct(8.0));
            assert!(fourth_difference(q, 7) > series);
            // Leading term D m^{q-4}.
            let d = q * (q - 1.0) * (q - 2.0) * (q - 3.0);
            let far = fourth_difference(q, 5000);
            assert!((far / (d * 5000f64.powf(q - 4.0)) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn stiffness_kills_constants_away_from_the_edge() {
        let g = GagliardoForm::new(FractionalOrder::new(1.0).unwrap(), 5.0, 50).unwrap();
        let ones = DVector::from_element(g.dim(), 1.0);
        let r = g.stiffness() * ones;
        for i in 1..g.dim() - 1 {
            assert!(r[i].abs() < 1e-12);
        }
        let g = GagliardoForm::new(FractionalOrder::new(0.75).unwrap(), 5.0, 400).unwrap();
        let r = g.stiffness() * DVector::from_element(g.dim(), 1.0);
        let mid = g.dim() / 2;
        assert!(r[mid].abs() < 1e-2 * r[0].abs());
    }

    #[test]
    fn quadratic_form_is_nonnegative() {
        let g = GagliardoForm::new(FractionalOrder::new(0.6).unwrap(), 4.0, 40).unwrap();
        let s = g.stiffness();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = DVector::from_fn(g.dim(), |_, _| rng.random_range(-1.0..1.0));
            assert!(x.dot(&(&s * &x)) >= 0.0);
        }
        assert!(s.transpose() == s);
    }

    #[test]
    fn zero_potential_has_no_negative_eigenvalues() {
        let r = morse_index_with(FractionalOrder::new(0.75).unwrap(), |_| 0.0, 10.0, 100).unwrap();
        assert_eq!(r.morse_index, 0);
        assert_eq!(r.bound_proxy, 1.0);
    }

    #[test]
    fn poschl_teller_bound_state() {
        // V = sech²(x/√2) has exactly one bound state at -1/2.
        let o = FractionalOrder::new(1.0).unwrap();
        let r = morse_index_with(o, |x| (x / 2f64.sqrt()).cosh().powi(-2), 12.0, 240).unwrap();
        assert_eq!(r.morse_index, 1);
        assert!((r.lowest[0].0 + 0.5).abs() < 2e-3, "{:?}", r.lowest);
        assert_eq!(r.lowest[0].1, Sector::Even);
    }

    #[test]
    fn parity_blocks_preserve_spectrum() {
        let g = GagliardoForm::new(FractionalOrder::new(0.8).unwrap(), 3.0, 12).unwrap();
        let a = g.stiffness() - g.potential_mass(|x| (-x * x).exp());
        let mut full: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
        let (e, o) = parity_blocks(&a);
        let mut split: Vec<f64> = SymmetricEigen::new(e)
            .eigenvalues
            .iter()
            .chain(SymmetricEigen::new(o).eigenvalues.iter())
            .copied()
            .collect();
        full.sort_by(f64::total_cmp);
        split.sort_by(f64::total_cmp);
        for (p, q) in full.iter().zip(&split) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    fn oracle_solution(n: usize) -> Solution {
        let p = ShootingParams::new(FractionalOrder::new(1.0).unwrap(), 1.0, 0.0, Weight::default()).unwrap();
        let o = SolveOptions {
            grid: GridPolicy { cells: n, length: Length::Fixed(30.0), ..GridPolicy::default() },
            ..SolveOptions::default()
        };
        picard_solve(&p, &o, None).unwrap()
    }

    #[test]
    fn oracle_kernel_checks() {
        let sol = oracle_solution(512);
        let r = kernel_residual_even(&sol).unwrap();
        assert!(r < 1e-3, "{r}");
        let control = EvenProfile::from_fn(sol.grid().clone(), |x| (-x * x).exp()).unwrap();
        assert!(kernel_residual_profile(&sol, &control).unwrap() > 0.1);
        let bs = birman_schwinger_odd(&sol).unwrap();
        assert!((bs.top - 1.0).abs() < 1e-3, "{bs:?}");
        assert!(bs.gap > 1e-3 && bs.eigvec_min > 0.0);
        assert!(bs.known_residual < 1e-3);
    }

    #[test]
    fn zero_map_is_far_from_one() {
        let g = Arc::new(HalfGrid::uniform(5.0, 32).unwrap());
        let m = KernelMoments::new(FractionalOrder::new(0.75).unwrap(), g.clone());
        let z = EvenProfile::zeros(g);
        let r = jacobian_spectrum(&z, &z, &m);
        assert_eq!(r.distance, 1.0);
        assert_eq!(r.spectral_radius, 0.0);
    }
}
