//! Reconstruct ζ(s) from R(s) and compare with Euler-Maclaurin.
use num_complex::Complex64;
use riemann_aux::repr::zeta_from_r_eval;
use riemann_aux::zeta_ref::zeta_em;

fn main() -> riemann_aux::Result<()> {
    for (re, im) in [(2.0, 0.0), (3.0, 0.0), (0.5, 14.134725), (-0.5, 10.0), (1.5, 20.0)] {
        let s = Complex64::new(re, im);
        let r = zeta_from_r_eval(s, 1e-10)?;
        let z = zeta_em(s)?;
        println!("zeta({s}) = {:.12}  (EM {:.12}, diff {:.1e})", r.value, z, (r.value - z).norm());
    }
    Ok(())
}
