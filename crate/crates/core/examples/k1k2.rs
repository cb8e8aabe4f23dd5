//! Split R(1/2+it) into K1 and K2 for several ρ and check against the main form.
use num_complex::Complex64;
use riemann_aux::repr::{r_k1k2, r_main};

fn main() -> riemann_aux::Result<()> {
    for t in [5.0, 10.0, 20.0] {
        let main = r_main(Complex64::new(0.5, t), 1e-10)?;
        for rho in [1.5, 2.0, 3.0] {
            let k = r_k1k2(t, rho, 1e-10)?;
            println!(
                "t={t:4} rho={rho}: K1={:.6} K2={:.6} R={:.12} |R-main|={:.1e}",
                k.k1,
                k.k2,
                k.value,
                (k.value - main.value).norm()
            );
        }
    }
    Ok(())
}
