//! Weights K and the hypotheses on them. Admissible weights are solved for;
//! a slowly decaying stretched exponential is rejected.

use fracgelfand::fixedpoint::{GridPolicy, ShootingParams, SolveOptions, Solver};
use fracgelfand::grid::HalfGrid;
use fracgelfand::params::FractionalOrder;
use fracgelfand::verify::pohozaev_residual;
use fracgelfand::weight::{slow_decay_class, validate_assumption_a, Weight};

fn main() -> fracgelfand::Result<()> {
    let grid = HalfGrid::graded(50.0, 400, 1.0)?;
    let weights = [
        Weight::Constant { c: 2.0 },
        Weight::Polynomial { a: 1.0 },
        Weight::StretchedExp { beta: 1.0, m: 1.0 },
        Weight::StretchedExp { beta: 1.0, m: 0.25 },
    ];
    let solver = Solver::new();
    let o = SolveOptions { grid: GridPolicy { cells: 512, ..GridPolicy::default() }, ..SolveOptions::default() };
    for k in weights {
        let a = validate_assumption_a(&k, &grid);
        println!("{k:?}: passes {}, sup|∂√K| = {:.4} at x = {:.3}, slow decay {}", a.passed(), a.dsqrt_sup, a.dsqrt_argmax, slow_decay_class(&k));
        let p = ShootingParams::new(FractionalOrder::new(0.75)?, 1.0, 0.0, k)?;
        match solver.solve(&p, &o, None) {
            Ok(sol) => println!("  mass {:.8}, Pohozaev residual {:.2e}", sol.mass, pohozaev_residual(&sol).relative),
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
