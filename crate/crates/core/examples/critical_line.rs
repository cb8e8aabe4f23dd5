//! Hardy's Z(t) from R on the critical line, and the first sign change.
use riemann_aux::repr::{r_critical, z_from_r};
use riemann_aux::zeta_ref::z_function;

fn main() -> riemann_aux::Result<()> {
    let z = |t: f64| r_critical(t, 1e-10).and_then(|r| z_from_r(t, r.value));
    for k in 0..=12 {
        let t = 13.0 + 0.25 * k as f64;
        println!("t = {t:6.2}  Z from R = {:+.12}  Z reference = {:+.12}", z(t)?, z_function(t)?);
    }
    let (mut a, mut b) = (14.0, 14.5);
    while b - a > 1e-9 {
        let m = 0.5 * (a + b);
        if z(a)? * z(m)? <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    println!("first zero of Z near t = {:.9}", 0.5 * (a + b));
    Ok(())
}
