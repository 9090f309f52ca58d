//! Half-line grids and sampled profiles with a parity contract.
//!
//! Only `x >= 0` is stored. Profiles are piecewise linear between nodes,
//! extended to `x < 0` by parity and by zero beyond `|x| > L`.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::marker::PhantomData;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::FractionalOrder;
use crate::quad::gl;

pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// `x_i = a sinh(κ i / n)` with `a sinh(κ) = L`.
    Graded { core: f64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

/// Grid metadata written next to every profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub spacing: Spacing,
    pub length: f64,
    pub cells: usize,
    pub min_width: f64,
    pub max_width: f64,
}

impl HalfGrid {
    pub fn uniform(length: f64, cells: usize) -> Result<Self> {
        check_size(length, cells)?;
        let h = length / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        nodes[cells] = length;
        Ok(Self { nodes, spacing: Spacing::Uniform })
    }

    /// Nodes clustered in `|x| ≲ core`, geometric beyond.
    pub fn graded(length: f64, cells: usize, core: f64) -> Result<Self> {
        check_size(length, cells)?;
        if !(core > 0.0 && core.is_finite()) {
            return Err(Error::InvalidGrid(format!("core scale {core} must be positive")));
        }
        let kappa = (length / core).asinh();
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| core * (kappa * i as f64 / cells as f64).sinh())
            .collect();
        nodes[0] = 0.0;
        nodes[cells] = length;
        Ok(Self { nodes, spacing: Spacing::Graded { core } })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < MIN_CELLS + 1 {
            return Err(Error::InvalidGrid(format!("{} nodes, need at least {}", nodes.len(), MIN_CELLS + 1)));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid("first node must be 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid("nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes, spacing: Spacing::Custom })
    }

    /// The same grid with every node multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        let spacing = match self.spacing {
            Spacing::Graded { core } => Spacing::Graded { core: core * factor },
            other => other,
        };
        Ok(Self { nodes: self.nodes.iter().map(|x| x * factor).collect(), spacing })
    }

    /// Same spacing family with a different length and cell count.
    pub fn resized(&self, length: f64, cells: usize) -> Result<Self> {
        match self.spacing {
            Spacing::Uniform => Self::uniform(length, cells),
            Spacing::Graded { core } => Self::graded(length, cells, core),
            Spacing::Custom => Err(Error::InvalidGrid("cannot resize a custom grid".into())),
        }
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.cells()]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn width(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    /// Width of the first cell (the uniform `h` on uniform grids).
    pub fn h(&self) -> f64 {
        self.width(0)
    }

    /// Index of the cell containing `x ∈ [0, L]`.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.cells();
        if let Spacing::Uniform = self.spacing {
            return ((x / self.h()) as usize).min(n - 1);
        }
        self.nodes.partition_point(|&t| t <= x).saturating_sub(1).min(n - 1)
    }

    pub fn info(&self) -> GridInfo {
        let widths = (0..self.cells()).map(|j| self.width(j));
        GridInfo {
            spacing: self.spacing,
            length: self.length(),
            cells: self.cells(),
            min_width: widths.clone().fold(f64::INFINITY, f64::min),
            max_width: widths.fold(0.0, f64::max),
        }
    }
}

fn check_size(length: f64, cells: usize) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidGrid(format!("half-length {length} must be positive")));
    }
    if cells < MIN_CELLS {
        return Err(Error::InvalidGrid(format!("{cells} cells, need at least {MIN_CELLS}")));
    }
    Ok(())
}

/// Uniform grid on `[0, L]` with `n` cells.
pub fn make_grid(length: f64, cells: usize) -> Result<HalfGrid> {
    HalfGrid::uniform(length, cells)
}

pub trait Parity: Clone + std::fmt::Debug + Send + Sync + 'static {
    const SIGN: f64;
    const NAME: &'static str;
}

#[derive(Debug, Clone, Copy)]
pub struct Even;
#[derive(Debug, Clone, Copy)]
pub struct Odd;

impl Parity for Even {
    const SIGN: f64 = 1.0;
    const NAME: &'static str = "even";
}

impl Parity for Odd {
    const SIGN: f64 = -1.0;
    const NAME: &'static str = "odd";
}

/// Nodal samples on `x >= 0` with a parity extension.
#[derive(Debug, Clone)]
pub struct Profile<P: Parity> {
    grid: Arc<HalfGrid>,
    samples: Vec<f64>,
    parity: PhantomData<P>,
}

pub type EvenProfile = Profile<Even>;
pub type OddProfile = Profile<Odd>;

impl<P: Parity> Profile<P> {
    pub fn new(grid: Arc<HalfGrid>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.nodes.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for {} nodes",
                samples.len(),
                grid.nodes.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at node {i}")));
        }
        if P::SIGN < 0.0 && samples[0] != 0.0 {
            return Err(Error::InvalidParameter("odd profile must vanish at x = 0".into()));
        }
        Ok(Self { grid, samples, parity: PhantomData })
    }

    /// Samples `f` at the nodes. Odd profiles get `f(0)` replaced by 0.
    pub fn from_fn(grid: Arc<HalfGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut samples: Vec<f64> = grid.nodes.iter().map(|&x| f(x)).collect();
        if P::SIGN < 0.0 {
            samples[0] = 0.0;
        }
        Self::new(grid, samples)
    }

    pub fn zeros(grid: Arc<HalfGrid>) -> Self {
        let n = grid.nodes.len();
        Self { grid, samples: vec![0.0; n], parity: PhantomData }
    }

    pub(crate) fn from_raw(grid: Arc<HalfGrid>, samples: Vec<f64>) -> Self {
        debug_assert_eq!(grid.nodes.len(), samples.len());
        Self { grid, samples, parity: PhantomData }
    }

    pub fn grid(&self) -> &HalfGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<HalfGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn same_grid<Q: Parity>(&self, other: &Profile<Q>) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Piecewise-linear value with parity extension; 0 for `|x| > L`.
    pub fn interp(&self, x: f64) -> f64 {
        let sign = if x < 0.0 { P::SIGN } else { 1.0 };
        let ax = x.abs();
        if ax > self.grid.length() {
            return 0.0;
        }
        let j = self.grid.locate(ax);
        let (a, b) = (self.grid.nodes[j], self.grid.nodes[j + 1]);
        let t = (ax - a) / (b - a);
        sign * (self.samples[j] * (1.0 - t) + self.samples[j + 1] * t)
    }

    /// Linear interpolation onto another grid.
    pub fn resample(&self, grid: Arc<HalfGrid>) -> Self {
        let samples = grid.nodes.iter().map(|&x| self.interp(x)).collect();
        let mut p = Self::from_raw(grid, samples);
        if P::SIGN < 0.0 {
            p.samples[0] = 0.0;
        }
        p
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let samples = self.grid.nodes.iter().zip(&self.samples).map(|(&x, &v)| f(x, v)).collect();
        Self::from_raw(self.grid.clone(), samples)
    }

    /// Pointwise combination with a profile on the same grid.
    pub fn zip_with<Q: Parity, R: Parity>(
        &self,
        other: &Profile<Q>,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Profile<R>> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .grid
            .nodes
            .iter()
            .zip(self.samples.iter().zip(&other.samples))
            .map(|(&x, (&a, &b))| f(x, a, b))
            .collect();
        Ok(Profile::from_raw(self.grid.clone(), samples))
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(self.samples.iter().zip(&other.samples).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,value")?;
        for (x, v) in self.grid.nodes.iter().zip(&self.samples) {
            writeln!(out, "{x:.17e},{v:.17e}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parity": P::NAME,
            "grid": self.grid.info(),
            "x": self.grid.nodes,
            "value": self.samples,
        })
    }
}

impl EvenProfile {
    /// `samples[n] / max(samples)`.
    pub fn tail_ratio(&self) -> f64 {
        let m = self.sup_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.samples[self.grid.cells()].abs() / m
    }
}

/// Even profile that is linear on each cell but may jump at nodes.
///
/// Lets discontinuous data such as indicator functions be integrated exactly.
#[derive(Debug, Clone)]
pub struct CellProfile {
    grid: Arc<HalfGrid>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl CellProfile {
    pub fn new(grid: Arc<HalfGrid>, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        let n = grid.cells();
        if left.len() != n || right.len() != n {
            return Err(Error::InvalidGrid(format!("need {n} values per cell end")));
        }
        Ok(Self { grid, left, right })
    }

    /// Evaluates `f` just inside each cell end.
    pub fn from_fn(grid: Arc<HalfGrid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (left, right) = (0..grid.cells()).map(|j| f(grid.nodes[j], grid.nodes[j + 1])).unzip();
        Self { grid, left, right }
    }

    /// Indicator of `[-a, a]`; `a` must be a node.
    pub fn indicator(grid: Arc<HalfGrid>, a: f64) -> Result<Self> {
        if !grid.nodes.iter().any(|&x| x == a) {
            return Err(Error::InvalidParameter(format!("{a} is not a grid node")));
        }
        Ok(Self::from_fn(grid, |_, b| if b <= a { (1.0, 1.0) } else { (0.0, 0.0) }))
    }

    pub fn grid(&self) -> &HalfGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<HalfGrid> {
        &self.grid
    }
}

impl From<&EvenProfile> for CellProfile {
    fn from(p: &EvenProfile) -> Self {
        let n = p.grid.cells();
        Self {
            grid: p.grid.clone(),
            left: p.samples[..n].to_vec(),
            right: p.samples[1..].to_vec(),
        }
    }
}

/// Even data that is linear on every cell.
pub trait PiecewiseLinear {
    fn grid(&self) -> &HalfGrid;
    /// Values at the left and right end of cell `j`.
    fn cell(&self, j: usize) -> (f64, f64);
}

impl PiecewiseLinear for EvenProfile {
    fn grid(&self) -> &HalfGrid {
        &self.grid
    }
    fn cell(&self, j: usize) -> (f64, f64) {
        (self.samples[j], self.samples[j + 1])
    }
}

impl PiecewiseLinear for CellProfile {
    fn grid(&self) -> &HalfGrid {
        &self.grid
    }
    fn cell(&self, j: usize) -> (f64, f64) {
        (self.left[j], self.right[j])
    }
}

/// `∫_ℝ p` of the even extension; exact on piecewise-linear data.
pub fn integrate(p: &impl PiecewiseLinear) -> f64 {
    2.0 * integrate_half(p)
}

pub fn integrate_half(p: &impl PiecewiseLinear) -> f64 {
    let g = p.grid();
    (0..g.cells())
        .map(|j| {
            let (a, b) = p.cell(j);
            0.5 * g.width(j) * (a + b)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XAlphaNorm {
    pub l2: f64,
    pub weighted_l2: f64,
    pub sup: f64,
    pub total: f64,
}

/// `‖p‖_{L²} + ‖|x|^α p‖_{L²} + ‖p‖_{L∞}` of the even extension.
pub fn xalpha_norm(p: &impl PiecewiseLinear, order: &FractionalOrder) -> XAlphaNorm {
    let g = p.grid();
    let q = order.p();
    let rule = gl(8);
    let (mut l2, mut wl2, mut sup) = (0.0, 0.0, 0.0f64);
    for j in 0..g.cells() {
        let (a, b) = p.cell(j);
        let h = g.width(j);
        let x0 = g.nodes()[j];
        sup = sup.max(a.abs()).max(b.abs());
        l2 += h * (a * a + a * b + b * b) / 3.0;
        wl2 += if j == 0 {
            let d = b - a;
            h.powf(q + 1.0) * (a * a / (q + 1.0) + 2.0 * a * d / (q + 2.0) + d * d / (q + 3.0))
        } else {
            h * rule
                .iter()
                .map(|(t, w)| {
                    let v = a + (b - a) * t;
                    w * (x0 + h * t).powf(q) * v * v
                })
                .sum::<f64>()
        };
    }
    let l2 = (2.0 * l2).sqrt();
    let weighted_l2 = (2.0 * wl2).sqrt();
    XAlphaNorm { l2, weighted_l2, sup, total: l2 + weighted_l2 + sup }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_profile(g: &Arc<HalfGrid>) -> EvenProfile {
        EvenProfile::from_fn(g.clone(), |x| if x < 1.0 { 1.0 } else if x == 1.0 { 0.5 } else { 0.0 }).unwrap()
    }

    #[test]
    fn uniform_grid_sizes() {
        let g = make_grid(1.0, 16).unwrap();
        assert_eq!(g.h(), 0.0625);
        assert_eq!(g.nodes().len(), 17);
        let g = make_grid(30.0, 2048).unwrap();
        assert!((g.h() - 0.014_648_437_5).abs() < 1e-15);
        assert!(make_grid(0.0, 16).is_err());
        assert!(make_grid(1.0, 15).is_err());
    }

    #[test]
    fn graded_grid_endpoints() {
        let g = HalfGrid::graded(1e4, 512, 2.0).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.length(), 1e4);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.width(0) < g.width(511));
    }

    #[test]
    fn box_integral_and_norm() {
        let g = Arc::new(make_grid(3.0, 48).unwrap());
        assert_eq!(integrate(&box_profile(&g)), 2.0);
        let b = CellProfile::indicator(g.clone(), 1.0).unwrap();
        let o = FractionalOrder::new(0.75).unwrap();
        let n = xalpha_norm(&b, &o);
        assert!((n.l2 - 2f64.sqrt()).abs() < 1e-14);
        assert!((n.weighted_l2 - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
        assert_eq!(n.sup, 1.0);
        assert!((n.total - 3.568_914_1).abs() < 1e-7);
    }

    #[test]
    fn zero_profile() {
        let g = Arc::new(make_grid(2.0, 32).unwrap());
        let z = EvenProfile::zeros(g);
        let o = FractionalOrder::new(0.75).unwrap();
        assert_eq!(integrate(&z), 0.0);
        let n = xalpha_norm(&z, &o);
        assert_eq!((n.l2, n.weighted_l2, n.sup, n.total), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn sech_squared_mass() {
        let g = Arc::new(make_grid(30.0, 2048).unwrap());
        let rho = EvenProfile::from_fn(g, |x| (x / 2f64.sqrt()).cosh().powi(-2)).unwrap();
        assert!((integrate(&rho) - 2.0 * 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn interp_parity_and_nodes() {
        let g = Arc::new(HalfGrid::graded(10.0, 64, 1.0).unwrap());
        let e = EvenProfile::from_fn(g.clone(), |x| (-x).exp()).unwrap();
        let o = OddProfile::from_fn(g.clone(), |x| x.sin()).unwrap();
        for (i, &x) in g.nodes().iter().enumerate() {
            assert_eq!(e.interp(x), e.samples()[i]);
            assert_eq!(o.interp(x), o.samples()[i]);
        }
        for x in [0.3, 1.7, 9.99] {
            assert_eq!(e.interp(-x), e.interp(x));
            assert_eq!(o.interp(-x), -o.interp(x));
        }
        assert_eq!(e.interp(10.5), 0.0);
    }

    #[test]
    fn interp_second_order() {
        let f = |x: f64| (x / 2f64.sqrt()).cosh().powi(-2);
        let err = |n: usize| {
            let g = Arc::new(make_grid(10.0, n).unwrap());
            let p = EvenProfile::from_fn(g, f).unwrap();
            (0..997).map(|k| 0.01 * k as f64 + 0.0037).map(|x| (p.interp(x) - f(x)).abs()).fold(0.0, f64::max)
        };
        let order = (err(64) / err(128)).log2();
        assert!(order >= 1.9, "order {order}");
    }

    #[test]
    fn odd_profile_requires_zero_origin() {
        let g = Arc::new(make_grid(1.0, 16).unwrap());
        let mut s = vec![0.0; 17];
        s[0] = 1.0;
        assert!(OddProfile::new(g, s).is_err());
    }
}
