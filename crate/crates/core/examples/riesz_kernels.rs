//! Product-integration kernels at α = 1/4: the indicator of [-1, 1] against
//! closed forms, and the convergence order on a Gaussian density, whose
//! conjugate Riesz potential is evaluated independently by quadrature after
//! the substitution y = t².

use fracgelfand::grid::{CellProfile, EvenProfile, HalfGrid};
use fracgelfand::params::FractionalOrder;
use fracgelfand::quad::gauss_legendre;
use fracgelfand::riesz::KernelMoments;
use std::sync::Arc;

fn main() -> fracgelfand::Result<()> {
    let order = FractionalOrder::new(0.75)?;
    let (c, d) = (order.c_alpha, order.d_alpha);

    let g = Arc::new(HalfGrid::uniform(4.0, 1024)?);
    let m = KernelMoments::new(order, g.clone());
    let b = CellProfile::indicator(g, 1.0)?;
    let (h, w) = (m.conj_riesz_cells(&b)?, m.exponent_integral_cells(&b)?);
    println!("H(1) = {:.9}  closed form {:.9}", h.samples()[256], c * 2f64.sqrt());
    println!("w(1) = {:.9}  closed form {:.9}", w.samples()[256], -c * (4.0 * 2f64.sqrt() / 3.0 - 4.0 / 3.0));

    // H ρ(x) = d ∫_0^∞ y^{-1/2} (ρ(x-y) - ρ(x+y)) dy = 2d ∫_0^∞ (ρ(x-t²) - ρ(x+t²)) dt
    let rho = |x: f64| (-x * x).exp();
    let rule = gauss_legendre(24);
    let oracle = |x: f64| {
        (0..200)
            .map(|k| {
                let (a, b) = (0.05 * k as f64, 0.05 * (k + 1) as f64);
                rule.iter().map(|&(t, wt)| {
                    let t = a + (b - a) * t;
                    wt * (b - a) * (rho(x - t * t) - rho(x + t * t))
                }).sum::<f64>()
            })
            .sum::<f64>()
            * 2.0
            * d
    };
    let x0 = 1.0;
    let exact = oracle(x0);
    let mut prev = None;
    for n in [64, 128, 256, 512] {
        let g = Arc::new(HalfGrid::uniform(8.0, n)?);
        let m = KernelMoments::new(order, g.clone());
        let h = m.conj_riesz(&EvenProfile::from_fn(g, rho)?)?;
        let err = (h.interp(x0) - exact).abs();
        let rate = prev.map(|e: f64| (e / err).log2());
        println!("n = {n:>4}: |H ρ(1) - oracle| = {err:.3e}{}", rate.map_or(String::new(), |r| format!(", order {r:.2}")));
        prev = Some(err);
    }
    Ok(())
}
