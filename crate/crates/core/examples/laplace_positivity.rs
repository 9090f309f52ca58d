//! I[w] = d_α ∫∫_{x,y>0} w(x) w(y) (x+y)^{2α-1} is nonnegative for every w.
//! Evaluated directly and through |Lw(t)|², on the box and on random
//! sign-changing profiles.

use fracgelfand::params::FractionalOrder;
use fracgelfand::verify::{box_form, box_profile, laplace_corpus, laplace_positivity, SumKernel};

fn main() -> fracgelfand::Result<()> {
    let order = FractionalOrder::new(0.75)?;
    let b = box_profile(3.0, 192)?;
    let k = SumKernel::new(order, b.grid_arc().clone());
    let r = laplace_positivity(&b, &k)?;
    println!("box: direct {:.9}, Laplace {:.9}, closed form {:.9}", r.double, r.laplace, box_form(&order));

    for s in [0.6, 0.75, 0.9, 0.99] {
        let c = laplace_corpus(&FractionalOrder::new(s)?, 100, 192, 1)?;
        println!("s = {s}: {} profiles, min I = {:.3e}, max route gap {:.1e}", c.samples, c.min_value, c.max_gap);
    }
    Ok(())
}
