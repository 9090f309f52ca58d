//! For constant K, v_μ(x) = μ^s v(μx) solves the problem at λ' = μ^s λ and
//! its mass scales by μ^{2s-1}. Compares the rescaled profile with a direct
//! solve.

use fracgelfand::fixedpoint::{rescale_with, ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::weight::Weight;

fn main() -> fracgelfand::Result<()> {
    let solver = Solver::new();
    let o = SolveOptions::default();
    let mu = 2.0;
    for s in [0.6, 0.75, 0.9] {
        let p = ShootingParams::new(FractionalOrder::new(s)?, 1.0, 0.0, Weight::default())?;
        let sol = solver.solve(&p, &o, None)?;
        let scaled = rescale_with(&sol, mu, &solver)?;
        let direct = solver.solve(&p.with_lambda(mu.powf(s))?, &o, None)?;
        let dv = scaled.v.sup_distance(&direct.v.resample(scaled.v.grid_arc().clone()))?;
        let ratio = direct.mass / sol.mass;
        println!(
            "s = {s}: sup |v_μ - v_direct| = {dv:.2e}, mass ratio {ratio:.8} vs μ^(2s-1) = {:.8}",
            mu.powf(2.0 * s - 1.0)
        );
    }
    Ok(())
}
