//! Adaptive complex-line quadrature on a segment, a decaying ray and an oscillatory tail.
use num_complex::Complex64;
use riemann_aux::quad::{integrate_oscillatory_tail, integrate_ray, integrate_segment, TailEnvelope};
use std::f64::consts::PI;

fn main() -> riemann_aux::Result<()> {
    let seg = integrate_segment(|z| z.exp(), Complex64::new(0.0, 0.0), Complex64::new(1.0, PI), 1e-12)?;
    println!("int_0^(1+πi) e^z dz = {:.15} (exact {:.15})", seg.value, Complex64::new(1.0, PI).exp() - 1.0);
    let ray = integrate_ray(
        |z| (-z * z).exp(),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        TailEnvelope::Gaussian { rate: 1.0 },
        1e-12,
    )?;
    println!("int_0^inf e^(-x²) dx = {:.15} (exact {:.15})", ray.value.re, PI.sqrt() / 2.0);
    let tail = integrate_oscillatory_tail(|x| Complex64::new(x.sin() / x.sqrt(), 0.0), 1.0, PI, 1e-10)?;
    println!("int_1^inf sin(x)/sqrt(x) dx = {:.12} ± {:.1e}", tail.value.re, tail.abs_err);
    Ok(())
}
