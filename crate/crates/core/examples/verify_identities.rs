//! Pohozaev identity, the double-integral identity and the reverse HLS ratio
//! on computed ground states, plus the sech² case in closed form.

use fracgelfand::fixedpoint::{ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::verify::{double_integral_gap, pohozaev_residual, reverse_hls_ratio, verify_solution, Thresholds, VerifyOptions};
use fracgelfand::weight::Weight;

fn main() -> fracgelfand::Result<()> {
    let solver = Solver::new();
    println!("{:>5} {:>12} {:>12} {:>12} {:>10}", "s", "pohozaev", "∫xρHρ", "gap", "HLS ratio");
    for s in [0.6, 0.75, 0.9, 1.0] {
        let p = ShootingParams::new(FractionalOrder::new(s)?, 1.0, 0.0, Weight::default())?;
        let sol = solver.solve(&p, &SolveOptions::default(), None)?;
        let rho = sol.density();
        let di = double_integral_gap(&rho, sol.moments())?;
        println!(
            "{s:>5} {:>12.3e} {:>12.8} {:>12.3e} {:>10.6}",
            pohozaev_residual(&sol).relative,
            di.moment,
            di.relative_gap,
            reverse_hls_ratio(&rho, sol.moments())?
        );
    }

    // A weighted, Gaussian-damped case: every Pohozaev term is active.
    let p = ShootingParams::new(FractionalOrder::new(0.8)?, 1.0, 0.3, Weight::Polynomial { a: 0.5 })?;
    let sol = solver.solve(&p, &SolveOptions::default(), None)?;
    println!("{:#?}", pohozaev_residual(&sol));

    let report = verify_solution(&sol, &VerifyOptions::default())?;
    for (name, value, ok) in report.table(&Thresholds::default()) {
        println!("{name:<24} {value:<40} {}", if ok { "ok" } else { "FAILED" });
    }
    Ok(())
}
