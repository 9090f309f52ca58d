//! Spectral side of the ground state: Morse index of (-Δ)^s - K e^u, the
//! dilation and translation kernel modes, the Birman–Schwinger operator of
//! the odd sector, and the spectrum of the linearized shooting map.

use fracgelfand::fixedpoint::{ShootingParams, SolveOptions, Solver};
use fracgelfand::params::FractionalOrder;
use fracgelfand::spectral::{morse_index_with, spectral_report};
use fracgelfand::weight::Weight;

fn main() -> fracgelfand::Result<()> {
    // Pöschl–Teller: -∂² - sech²(x/√2) has the single bound state -1/2.
    let pt = morse_index_with(FractionalOrder::new(1.0)?, |x| (x / 2f64.sqrt()).cosh().powi(-2), 30.0, 400)?;
    println!("Pöschl–Teller: index {}, lowest {:.5}", pt.morse_index, pt.lowest[0].0);

    let solver = Solver::new();
    for s in [0.6, 0.75, 0.9] {
        let p = ShootingParams::new(FractionalOrder::new(s)?, 1.0, 0.0, Weight::default())?;
        let sol = solver.solve(&p, &SolveOptions::default(), None)?;
        let r = spectral_report(&sol)?;
        println!("s = {s}");
        println!("  Morse index {} on [-{:.1}, {:.1}]", r.morse_index(), r.morse.length, r.morse.length);
        for (e, sector) in r.morse.lowest.iter().take(3) {
            println!("    {e:+.6} {sector:?}");
        }
        if let (Some(even), Some(bs)) = (r.kernel_residual_even, r.bs) {
            println!("  dilation mode residual {even:.2e}");
            println!(
                "  Birman–Schwinger: top {:.7}, gap {:.3}, eigenvector min {:.3e}, translation residual {:.2e}",
                bs.top, bs.gap, bs.eigvec_min, bs.known_residual
            );
        }
        println!("  spectrum of D_vT stays {:.4} away from 1", r.linearized.distance);
    }
    Ok(())
}
