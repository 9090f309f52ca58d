//! Runs the fixed-point iteration from randomized starts; uniqueness of the
//! symmetric-decreasing fixed point shows up as coinciding limits.

use fracgelfand::continuation::uniqueness_probe;
use fracgelfand::fixedpoint::{ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::weight::Weight;

fn main() -> fracgelfand::Result<()> {
    let solver = Solver::new();
    let o = SolveOptions::default();
    for (s, lambda, sigma) in [(0.75, 1.0, 0.0), (0.9, 3.0, 0.0), (0.6, 0.5, 1.0)] {
        let p = ShootingParams::new(FractionalOrder::new(s)?, lambda, sigma, Weight::default())?;
        let r = uniqueness_probe(&p, 5, 7, &o, &solver)?;
        let worst = r.residuals.iter().cloned().fold(0.0, f64::max);
        println!(
            "s = {s}, λ = {lambda}, σ = {sigma}: {} starts, max pairwise distance {:.2e}, worst residual {:.1e}",
            r.starts, r.max_distance, worst
        );
    }
    Ok(())
}
