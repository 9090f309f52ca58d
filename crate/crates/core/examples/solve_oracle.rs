//! At s = 1 the equation is -u'' = e^u and the ground state with v(0) = 1 is
//! v = sech(x/√2). Solves on n = 2048, L = 30 and compares.

use fracgelfand::cli::oracle_comparison;
use fracgelfand::fixedpoint::{GridPolicy, Length, ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::weight::Weight;
use std::time::Instant;

fn main() -> fracgelfand::Result<()> {
    let p = ShootingParams::new(FractionalOrder::new(1.0)?, 1.0, 0.0, Weight::default())?;
    let o = SolveOptions {
        grid: GridPolicy { cells: 2048, length: Length::Fixed(30.0), ..GridPolicy::default() },
        ..SolveOptions::default()
    };
    let t = Instant::now();
    let sol = Solver::new().solve(&p, &o, None)?;
    let cmp = oracle_comparison(&sol);
    println!("solved in {:.2?}: {} Picard + {} Newton steps", t.elapsed(), sol.iterations, sol.newton_steps);
    println!("sup |v - sech(x/√2)| = {:.3e}", cmp.sup_error);
    println!("|u(0)|               = {:.3e}", cmp.u0_error);
    println!("|mass - 2√2|         = {:.3e}", cmp.mass_error);
    println!("residual history: {:?}", sol.residual_history.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>());
    Ok(())
}
