//! Hermite function H_ν(z) for non-integer ν: series against the integral form.
use num_complex::Complex64;
use riemann_aux::special::{hermite_h, hermite_h_integral};

fn main() -> riemann_aux::Result<()> {
    for nu in [Complex64::new(-0.5, 0.0), Complex64::new(-1.5, 0.0), Complex64::new(-3.0, 2.0)] {
        for x in [0.0, 1.0, 2.5, 5.0, 12.0] {
            let z = Complex64::new(x, 0.0);
            let a = hermite_h(nu, z)?;
            let b = hermite_h_integral(nu, z, 1e-13)?;
            println!("H_{nu}({x}) = {a:.14}  rel diff {:.1e}", (a - b).norm() / b.norm());
        }
    }
    Ok(())
}
