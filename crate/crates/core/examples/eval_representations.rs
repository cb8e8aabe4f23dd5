//! Evaluate R(s) with every representation valid at a point and compare.
use num_complex::Complex64;
use riemann_aux::repr::{eval, ReprId, ReprOptions};

fn main() -> riemann_aux::Result<()> {
    let points = [Complex64::new(0.5, 10.0), Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)];
    let opts = ReprOptions::default();
    for s in points {
        println!("s = {s}");
        for repr in ReprId::ALL {
            match eval(repr, s, &opts) {
                Ok(r) => println!("  {repr:?}: {:.15} (abs_err {:.1e}, {} evals)", r.value, r.abs_err, r.n_evals),
                Err(e) => println!("  {repr:?}: {e}"),
            }
        }
    }
    Ok(())
}
