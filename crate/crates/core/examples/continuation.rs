//! Follows the Gaussian-damped branch from σ = 1 down to σ = 0 and compares
//! the endpoint with a direct σ = 0 solve; then walks λ from 1 to 8.

use fracgelfand::continuation::{continue_lambda, continue_sigma};
use fracgelfand::fixedpoint::{ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::weight::Weight;

fn main() -> fracgelfand::Result<()> {
    let solver = Solver::new();
    let o = SolveOptions::default();
    let base = ShootingParams::new(FractionalOrder::new(0.75)?, 1.0, 0.0, Weight::default())?;

    let path = continue_sigma(&base, 1.0, true, &o, &solver)?;
    println!("{:>12} {:>14} {:>12}", "sigma", "mass", "X_α norm");
    for pt in &path.points {
        println!("{:>12.3e} {:>14.10} {:>12.6}", pt.sigma, pt.mass, pt.xalpha.total);
    }
    let direct = solver.solve(&base, &o, None)?;
    let end = &path.endpoint.v;
    println!("endpoint vs direct solve: sup |Δv| = {:.3e}", end.sup_distance(&direct.v.resample(end.grid_arc().clone()))?);
    println!("{:?}", path.stats);

    let path = continue_lambda(&base, 1.0, 8.0, &o, &solver)?;
    for pt in &path.points {
        println!("lambda {:>6.3}: mass {:.8}", pt.lambda, pt.mass);
    }
    Ok(())
}
