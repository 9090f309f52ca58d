//! Conjugate Riesz potential `H_α` and the exponent integral by product
//! integration.
//!
//! For even `f`, both operators reduce to half-line integrals against
//! `|x ∓ y|^{2α}` and `sgn(x ∓ y)|x ∓ y|^{2α-1}`. The kernels are integrated
//! against the two hat weights of every cell: in closed form when the cell is
//! within one width of the singularity, by Gauss–Legendre otherwise, with the
//! point count chosen from the distance-to-width ratio.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{CellProfile, EvenProfile, HalfGrid, OddProfile, PiecewiseLinear};
use crate::params::FractionalOrder;
use crate::quad::gl;

/// Integrals of both kernels against the left and right hat weights of a cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellWeights {
    /// `∫ |t|^{2α} φ_{L,R}`
    pub pow: [f64; 2],
    /// `∫ sgn(t)|t|^{2α-1} φ_{L,R}`
    pub sgn: [f64; 2],
}

/// Kernel weights of cell `[a, b]` seen from `x`, with `t = x - y`
/// (`reflect = false`) or `t = x + y` (`reflect = true`).
pub fn cell_weights(x: f64, a: f64, b: f64, p: f64, reflect: bool) -> CellWeights {
    let h = b - a;
    let dist = if reflect {
        x + a
    } else if x >= a && x <= b {
        0.0
    } else {
        (x - a).abs().min((x - b).abs())
    };
    let r = dist / h;
    if r < 1.0 {
        return closed_form(x, a, b, p, reflect);
    }
    let npts = if r < 2.0 {
        12
    } else if r < 8.0 {
        8
    } else if r < 64.0 {
        4
    } else if r < 512.0 {
        3
    } else {
        2
    };
    let mut out = CellWeights::default();
    for &(tau, w) in gl(npts) {
        let y = a + h * tau;
        let t = if reflect { x + y } else { x - y };
        let at = t.abs();
        let ks = at.powf(p - 1.0);
        let kp = at * ks;
        let ks = ks.copysign(t);
        let (wl, wr) = (w * (1.0 - tau), w * tau);
        out.pow[0] += kp * wl;
        out.pow[1] += kp * wr;
        out.sgn[0] += ks * wl;
        out.sgn[1] += ks * wr;
    }
    for v in out.pow.iter_mut().chain(out.sgn.iter_mut()) {
        *v *= h;
    }
    out
}

fn closed_form(x: f64, a: f64, b: f64, p: f64, reflect: bool) -> CellWeights {
    let h = b - a;
    // Hat weights written as (c0 + c1 t)/h over t ∈ [t0, t1].
    let (t0, t1, cl, cr) = if reflect {
        (x + a, x + b, (b + x, -1.0), (-x - a, 1.0))
    } else {
        (x - b, x - a, (b - x, 1.0), (x - a, -1.0))
    };
    let sp = |t: f64, e: f64| t.abs().powf(e).copysign(t);
    let ap = |t: f64, e: f64| t.abs().powf(e);
    let pow0 = (sp(t1, p + 1.0) - sp(t0, p + 1.0)) / (p + 1.0);
    let pow1 = (ap(t1, p + 2.0) - ap(t0, p + 2.0)) / (p + 2.0);
    let sgn0 = (ap(t1, p) - ap(t0, p)) / p;
    let sgn1 = (sp(t1, p + 1.0) - sp(t0, p + 1.0)) / (p + 1.0);
    CellWeights {
        pow: [(cl.0 * pow0 + cl.1 * pow1) / h, (cr.0 * pow0 + cr.1 * pow1) / h],
        sgn: [(cl.0 * sgn0 + cl.1 * sgn1) / h, (cr.0 * sgn0 + cr.1 * sgn1) / h],
    }
}

/// Precomputed product-integration operators for one `(grid, α)` pair.
///
/// `exponent` maps nodal `ρ` to `-c_α ∫ (|x-y|^{2α} - |y|^{2α}) ρ(y) dy` and
/// `riesz` maps nodal `f` to `H_α f`, both at the nodes. Row 0 of each is zero.
#[derive(Debug, Clone)]
pub struct KernelMoments {
    order: FractionalOrder,
    grid: Arc<HalfGrid>,
    exponent: DMatrix<f64>,
    riesz: DMatrix<f64>,
    /// `∫_0^L |y|^{2α} φ_k(y) dy`
    origin: DVector<f64>,
}

struct Rows {
    pow_direct: Vec<f64>,
    pow_reflect: Vec<f64>,
    sgn: Vec<f64>,
}

fn row(grid: &HalfGrid, p: f64, x: f64) -> Rows {
    let n = grid.cells();
    let nodes = grid.nodes();
    let mut r = Rows { pow_direct: vec![0.0; n + 1], pow_reflect: vec![0.0; n + 1], sgn: vec![0.0; n + 1] };
    for j in 0..n {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let d = cell_weights(x, a, b, p, false);
        let f = cell_weights(x, a, b, p, true);
        r.pow_direct[j] += d.pow[0];
        r.pow_direct[j + 1] += d.pow[1];
        r.pow_reflect[j] += f.pow[0];
        r.pow_reflect[j + 1] += f.pow[1];
        r.sgn[j] += d.sgn[0] + f.sgn[0];
        r.sgn[j + 1] += d.sgn[1] + f.sgn[1];
    }
    r
}

impl KernelMoments {
    pub fn new(order: FractionalOrder, grid: Arc<HalfGrid>) -> Self {
        let n = grid.cells();
        let p = order.p();
        let origin = row(&grid, p, 0.0).pow_direct;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = grid.nodes()[1..]
            .par_iter()
            .map(|&x| {
                let r = row(&grid, p, x);
                let e = (0..=n)
                    .map(|k| -order.c_alpha * (r.pow_direct[k] + r.pow_reflect[k] - 2.0 * origin[k]))
                    .collect();
                let h = r.sgn.iter().map(|v| order.d_alpha * v).collect();
                (e, h)
            })
            .collect();
        let mut exponent = DMatrix::zeros(n + 1, n + 1);
        let mut riesz = DMatrix::zeros(n + 1, n + 1);
        for (i, (e, h)) in rows.into_iter().enumerate() {
            for k in 0..=n {
                exponent[(i + 1, k)] = e[k];
                riesz[(i + 1, k)] = h[k];
            }
        }
        Self { order, grid, exponent, riesz, origin: DVector::from_vec(origin) }
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.order
    }

    pub fn grid(&self) -> &HalfGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<HalfGrid> {
        &self.grid
    }

    /// Matrix of the exponent integral on nodal values.
    pub fn exponent_matrix(&self) -> &DMatrix<f64> {
        &self.exponent
    }

    /// Matrix of `H_α` on nodal values of an even input.
    pub fn riesz_matrix(&self) -> &DMatrix<f64> {
        &self.riesz
    }

    fn check<P: PiecewiseLinear>(&self, f: &P) -> Result<()> {
        if f.grid() == &*self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn apply(&self, m: &DMatrix<f64>, f: &[f64]) -> Vec<f64> {
        let y = m * DVector::from_column_slice(f);
        let mut y: Vec<f64> = y.data.into();
        y[0] = 0.0;
        y
    }

    /// `H_α f` at the nodes.
    pub fn conj_riesz(&self, f: &EvenProfile) -> Result<OddProfile> {
        self.check(f)?;
        Ok(OddProfile::from_raw(self.grid.clone(), self.apply(&self.riesz, f.samples())))
    }

    /// `w(x) = -c_α ∫ (|x-y|^{2α} - |y|^{2α}) ρ(y) dy` for a density `ρ >= 0`.
    pub fn exponent_integral(&self, rho: &EvenProfile) -> Result<EvenProfile> {
        check_density(rho.samples())?;
        self.exponent_integral_linear(rho)
    }

    /// The same linear map without the sign check.
    pub fn exponent_integral_linear(&self, f: &EvenProfile) -> Result<EvenProfile> {
        self.check(f)?;
        Ok(EvenProfile::from_raw(self.grid.clone(), self.apply(&self.exponent, f.samples())))
    }

    /// `∫_ℝ |x - y|^{2α} f(y) dy` at the nodes.
    pub fn pow_potential(&self, f: &EvenProfile) -> Result<EvenProfile> {
        self.check(f)?;
        let fv = DVector::from_column_slice(f.samples());
        let base = 2.0 * self.origin.dot(&fv);
        let e = &self.exponent * &fv;
        let out = e.iter().map(|v| base - v / self.order.c_alpha).collect();
        Ok(EvenProfile::from_raw(self.grid.clone(), out))
    }

    /// `H_α f` and `∫_ℝ |x - y|^{2α} f(y) dy` at arbitrary points `xs >= 0`,
    /// exact for the piecewise-linear `f`.
    pub fn potentials_at(&self, f: &EvenProfile, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(f)?;
        let p = self.order.p();
        let fv = f.samples();
        Ok(xs
            .par_iter()
            .map(|&x| {
                let r = row(&self.grid, p, x);
                let dot = |w: &[f64]| w.iter().zip(fv).map(|(a, b)| a * b).sum::<f64>();
                let pow: f64 = r.pow_direct.iter().zip(&r.pow_reflect).zip(fv).map(|((a, b), c)| (a + b) * c).sum();
                (self.order.d_alpha * dot(&r.sgn), pow)
            })
            .unzip())
    }

    /// `H_α f` for cellwise-linear data, computed without the stored tables.
    pub fn conj_riesz_cells(&self, f: &CellProfile) -> Result<OddProfile> {
        self.check(f)?;
        let out = self.cellwise(|x, j, a, b, p| {
            let d = cell_weights(x, a, b, p, false);
            let r = cell_weights(x, a, b, p, true);
            let (l, rr) = f.cell(j);
            (d.sgn[0] + r.sgn[0]) * l + (d.sgn[1] + r.sgn[1]) * rr
        });
        let mut out: Vec<f64> = out.into_iter().map(|v| self.order.d_alpha * v).collect();
        out[0] = 0.0;
        Ok(OddProfile::from_raw(self.grid.clone(), out))
    }

    /// Exponent integral of a cellwise-linear density.
    pub fn exponent_integral_cells(&self, rho: &CellProfile) -> Result<EvenProfile> {
        self.check(rho)?;
        for j in 0..self.grid.cells() {
            let (l, r) = rho.cell(j);
            if l < 0.0 || r < 0.0 {
                return Err(Error::NegativeDensity { index: j, value: l.min(r) });
            }
        }
        let pot = self.cellwise(|x, j, a, b, p| {
            let d = cell_weights(x, a, b, p, false);
            let r = cell_weights(x, a, b, p, true);
            let o = cell_weights(0.0, a, b, p, false);
            let (l, rr) = rho.cell(j);
            (d.pow[0] + r.pow[0] - 2.0 * o.pow[0]) * l + (d.pow[1] + r.pow[1] - 2.0 * o.pow[1]) * rr
        });
        let mut out: Vec<f64> = pot.into_iter().map(|v| -self.order.c_alpha * v).collect();
        out[0] = 0.0;
        Ok(EvenProfile::from_raw(self.grid.clone(), out))
    }

    fn cellwise(&self, term: impl Fn(f64, usize, f64, f64, f64) -> f64 + Sync) -> Vec<f64> {
        let nodes = self.grid.nodes();
        let p = self.order.p();
        nodes
            .par_iter()
            .map(|&x| (0..self.grid.cells()).map(|j| term(x, j, nodes[j], nodes[j + 1], p)).sum())
            .collect()
    }

    /// Sup over nodes of `|w + ∫_0^x H_α ρ|`, the cumulative integral taken
    /// by the trapezoid rule.
    pub fn consistency_gap(&self, rho: &EvenProfile) -> Result<f64> {
        let w = self.exponent_integral(rho)?;
        let h = self.conj_riesz(rho)?;
        Ok(cumulative_gap(&self.grid, w.samples(), h.samples()))
    }

    pub fn consistency_gap_cells(&self, rho: &CellProfile) -> Result<f64> {
        let w = self.exponent_integral_cells(rho)?;
        let h = self.conj_riesz_cells(rho)?;
        Ok(cumulative_gap(&self.grid, w.samples(), h.samples()))
    }

    /// `A_ik = ∫_0^L (|x_i + y|^{2α} - |x_i - y|^{2α}) φ_k(y) dy`, rebuilt on
    /// demand since only the odd-sector spectral check needs it.
    pub fn odd_pow_matrix(&self) -> DMatrix<f64> {
        let n = self.grid.cells();
        let p = self.order.p();
        let rows: Vec<Vec<f64>> = self
            .grid
            .nodes()
            .par_iter()
            .map(|&x| {
                let r = row(&self.grid, p, x);
                r.pow_reflect.iter().zip(&r.pow_direct).map(|(a, b)| a - b).collect()
            })
            .collect();
        DMatrix::from_fn(n + 1, n + 1, |i, k| if i == 0 { 0.0 } else { rows[i][k] })
    }

    /// Row sums of both operator matrices, for audits.
    pub fn row_sums(&self) -> Vec<(f64, f64, f64)> {
        let nodes = self.grid.nodes();
        (0..nodes.len())
            .map(|i| (nodes[i], self.exponent.row(i).sum(), self.riesz.row(i).sum()))
            .collect()
    }
}

fn cumulative_gap(grid: &HalfGrid, w: &[f64], h: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut gap = w[0].abs();
    for j in 0..grid.cells() {
        acc += 0.5 * grid.width(j) * (h[j] + h[j + 1]);
        gap = gap.max((w[j + 1] + acc).abs());
    }
    gap
}

pub(crate) fn check_density(s: &[f64]) -> Result<()> {
    match s.iter().position(|&v| v < 0.0) {
        Some(index) => Err(Error::NegativeDensity { index, value: s[index] }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, HalfGrid};
    use crate::quad::{gauss_jacobi_unit, gauss_legendre};

    fn quarter() -> FractionalOrder {
        FractionalOrder::new(0.75).unwrap()
    }

    /// Brute-force weights: Gauss–Jacobi on pieces that end at the
    /// singularity, composite Gauss–Legendre elsewhere.
    fn brute(x: f64, a: f64, b: f64, p: f64, reflect: bool) -> CellWeights {
        let sing = if reflect { -x } else { x };
        let hat = |y: f64| [(b - y) / (b - a), (y - a) / (b - a)];
        let tval = |y: f64| if reflect { x + y } else { x - y };
        let mut out = CellWeights::default();
        let mut piece = |lo: f64, hi: f64| {
            let delta = hi - lo;
            if sing == lo || sing == hi {
                let (e, dir) = if sing == lo { (lo, 1.0) } else { (hi, -1.0) };
                for (slot, expo) in [(0usize, p), (1usize, p - 1.0)] {
                    for (tau, w) in gauss_jacobi_unit(30, 0.0, expo) {
                        let y = e + dir * delta * tau;
                        let sign = if slot == 1 { tval(y).signum() } else { 1.0 };
                        let scale = w * delta.powf(expo + 1.0) * sign;
                        let phi = hat(y);
                        let dst = if slot == 0 { &mut out.pow } else { &mut out.sgn };
                        dst[0] += scale * phi[0];
                        dst[1] += scale * phi[1];
                    }
                }
            } else {
                let rule = gauss_legendre(20);
                for k in 0..64 {
                    let (u, v) = (lo + delta * k as f64 / 64.0, lo + delta * (k + 1) as f64 / 64.0);
                    for &(tau, w) in &rule {
                        let y = u + (v - u) * tau;
                        let t = tval(y);
                        let phi = hat(y);
                        let ww = w * (v - u);
                        let kp = t.abs().powf(p);
                        let ks = t.abs().powf(p - 1.0).copysign(t);
                        out.pow[0] += ww * kp * phi[0];
                        out.pow[1] += ww * kp * phi[1];
                        out.sgn[0] += ww * ks * phi[0];
                        out.sgn[1] += ww * ks * phi[1];
                    }
                }
            }
        };
        if !reflect && x > a && x < b {
            piece(a, x);
            piece(x, b);
        } else {
            piece(a, b);
        }
        out
    }

    #[test]
    fn cell_weights_match_brute_force() {
        for p in [0.2, 0.5, 0.8, 1.0] {
            for &(x, a, b) in &[
                (0.0, 0.0, 0.1),
                (0.05, 0.0, 0.1),
                (0.1, 0.0, 0.1),
                (0.3, 0.1, 0.2),
                (0.35, 0.1, 0.2),
                (1.0, 0.1, 0.2),
                (7.0, 0.1, 0.2),
                (100.0, 0.1, 0.2),
                (0.0, 5.0, 5.5),
                (2.0, 3.0, 3.4),
            ] {
                for reflect in [false, true] {
                    let got = cell_weights(x, a, b, p, reflect);
                    let want = brute(x, a, b, p, reflect);
                    for (g, w) in got.pow.iter().chain(&got.sgn).zip(want.pow.iter().chain(&want.sgn)) {
                        assert!(
                            (g - w).abs() <= 1e-11 * w.abs().max(1e-3),
                            "p={p} x={x} [{a},{b}] reflect={reflect}: {g} vs {w}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_and_gauss_agree_at_switch() {
        // r = 1 is the switch; both routes must agree around it.
        let (a, b) = (1.0, 1.5);
        for p in [0.2, 0.5, 1.0] {
            let x = b + 0.5 * 1.0000001;
            let g = cell_weights(x, a, b, p, false);
            let c = closed_form(x, a, b, p, false);
            for (u, v) in g.pow.iter().chain(&g.sgn).zip(c.pow.iter().chain(&c.sgn)) {
                assert!((u - v).abs() < 1e-12 * v.abs(), "{u} vs {v}");
            }
        }
    }

    #[test]
    fn box_closed_forms() {
        let o = quarter();
        let g = Arc::new(make_grid(4.0, 1024).unwrap());
        let m = KernelMoments::new(o, g.clone());
        let f = CellProfile::indicator(g.clone(), 1.0).unwrap();
        let h = m.conj_riesz_cells(&f).unwrap();
        let w = m.exponent_integral_cells(&f).unwrap();
        let exact_h = |x: f64| o.c_alpha * ((x + 1.0).sqrt() - (1.0 - x).abs().sqrt());
        let exact_w = |x: f64| {
            // -c ∫_{-1}^{1} (|x-y|^{1/2} - |y|^{1/2}) dy
            let f = |t: f64| t.abs().powf(1.5).copysign(t) / 1.5;
            -o.c_alpha * ((f(x + 1.0) - f(x - 1.0)) - 4.0 / 3.0)
        };
        let (i1, i3) = (256, 768);
        assert!((h.samples()[i1] - 1.128_379_2).abs() < 1e-6);
        assert!((h.samples()[i3] - 0.467_390_0).abs() < 1e-6);
        assert!((w.samples()[i1] + 0.440_659_5).abs() < 1e-6);
        assert_eq!(w.samples()[0], 0.0);
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!((h.samples()[i] - exact_h(x)).abs() < 1e-12, "H at {x}");
            assert!((w.samples()[i] - exact_w(x)).abs() < 1e-12, "w at {x}");
        }
    }

    #[test]
    fn half_order_collapses_to_running_integral() {
        let o = FractionalOrder::new(1.0).unwrap();
        let g = Arc::new(make_grid(3.0, 96).unwrap());
        let m = KernelMoments::new(o, g.clone());
        let f = CellProfile::indicator(g.clone(), 1.0).unwrap();
        let h = m.conj_riesz_cells(&f).unwrap();
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!((h.samples()[i] - x.min(1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn sech_squared_at_half() {
        let o = FractionalOrder::new(1.0).unwrap();
        let g = Arc::new(make_grid(30.0, 2048).unwrap());
        let m = KernelMoments::new(o, g.clone());
        let mu = 0.5f64.sqrt();
        let rho = EvenProfile::from_fn(g.clone(), |x| (mu * x).cosh().powi(-2)).unwrap();
        let h = m.conj_riesz(&rho).unwrap();
        let w = m.exponent_integral(&rho).unwrap();
        for (i, &x) in g.nodes().iter().enumerate().filter(|(_, x)| **x < 20.0) {
            assert!((h.samples()[i] - 2f64.sqrt() * (mu * x).tanh()).abs() < 2e-5);
            assert!((w.samples()[i] + 2.0 * (mu * x).cosh().ln()).abs() < 1e-4);
        }
    }

    #[test]
    fn parity_and_origin() {
        let g = Arc::new(HalfGrid::graded(20.0, 128, 1.0).unwrap());
        let m = KernelMoments::new(quarter(), g.clone());
        let rho = EvenProfile::from_fn(g, |x| (-x * x).exp()).unwrap();
        assert_eq!(m.conj_riesz(&rho).unwrap().samples()[0], 0.0);
        assert_eq!(m.exponent_integral(&rho).unwrap().samples()[0], 0.0);
    }

    #[test]
    fn rejects_negative_density_and_mismatch() {
        let g = Arc::new(make_grid(5.0, 32).unwrap());
        let m = KernelMoments::new(quarter(), g.clone());
        let f = EvenProfile::from_fn(g, |x| x.cos()).unwrap();
        assert!(matches!(m.exponent_integral(&f), Err(Error::NegativeDensity { .. })));
        assert!(m.exponent_integral_linear(&f).is_ok());
        let other = Arc::new(make_grid(5.0, 33).unwrap());
        let q = EvenProfile::zeros(other);
        assert!(matches!(m.conj_riesz(&q), Err(Error::GridMismatch)));
    }

    #[test]
    fn zero_density_gap() {
        let g = Arc::new(make_grid(5.0, 32).unwrap());
        let m = KernelMoments::new(quarter(), g.clone());
        assert_eq!(m.consistency_gap(&EvenProfile::zeros(g)).unwrap(), 0.0);
    }

    #[test]
    fn gap_second_order_on_smooth_density() {
        let gap = |n: usize| {
            let g = Arc::new(make_grid(12.0, n).unwrap());
            let m = KernelMoments::new(quarter(), g.clone());
            let rho = EvenProfile::from_fn(g, |x| (-x * x).exp()).unwrap();
            m.consistency_gap(&rho).unwrap()
        };
        let (a, b) = (gap(256), gap(512));
        assert!(a / b >= 3.5, "ratio {}", a / b);
        assert!(b < 1e-4, "gaps {a} {b}");
    }

    #[test]
    fn box_gap_limited_by_cusp() {
        let g = Arc::new(make_grid(4.0, 1024).unwrap());
        let m = KernelMoments::new(quarter(), g.clone());
        let f = CellProfile::indicator(g, 1.0).unwrap();
        let gap = m.consistency_gap_cells(&f).unwrap();
        assert!(gap < 1e-4, "gap {gap}");
    }

    #[test]
    fn pow_potential_matches_cellwise() {
        let g = Arc::new(HalfGrid::graded(15.0, 96, 1.0).unwrap());
        let o = quarter();
        let m = KernelMoments::new(o, g.clone());
        let rho = EvenProfile::from_fn(g.clone(), |x| 1.0 / (1.0 + x * x * x * x)).unwrap();
        let pot = m.pow_potential(&rho).unwrap();
        let nodes = g.nodes();
        for (i, &x) in nodes.iter().enumerate().step_by(7) {
            let direct: f64 = (0..g.cells())
                .map(|j| {
                    let d = cell_weights(x, nodes[j], nodes[j + 1], o.p(), false);
                    let r = cell_weights(x, nodes[j], nodes[j + 1], o.p(), true);
                    (d.pow[0] + r.pow[0]) * rho.samples()[j] + (d.pow[1] + r.pow[1]) * rho.samples()[j + 1]
                })
                .sum();
            assert!((pot.samples()[i] - direct).abs() < 1e-11 * direct, "x = {x}");
        }
    }

    #[test]
    fn odd_pow_matrix_is_nonnegative() {
        let g = Arc::new(make_grid(6.0, 48).unwrap());
        let m = KernelMoments::new(quarter(), g);
        let a = m.odd_pow_matrix();
        assert!(a.iter().all(|&v| v >= -1e-15));
    }
}
