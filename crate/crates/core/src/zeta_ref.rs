//! Reference ζ(s) by Euler–Maclaurin summation and the Hardy Z-function.
//! Entirely independent of the integral representations in [`crate::repr`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{chi, theta, ONE, ZERO};

/// Below this real part the functional equation is applied first.
pub const REFLECT_BELOW: f64 = 0.05;

/// Euler–Maclaurin parameters: `n_terms` direct terms, `n_bernoulli` correction terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EMConfig {
    pub n_terms: usize,
    pub n_bernoulli: usize,
}

impl EMConfig {
    /// `N = ceil(10 + 1.3|t|)`, 12 Bernoulli terms.
    pub fn for_s(s: Complex64) -> Self {
        EMConfig {
            n_terms: (10.0 + 1.3 * s.im.abs()).ceil() as usize,
            n_bernoulli: 12,
        }
    }

    pub fn validate(&self, s: Complex64) -> Result<()> {
        if (self.n_terms as f64) < 10.0 + s.im.abs() {
            return Err(Error::domain(
                "EMConfig",
                format!("n_terms = {} < 10 + |Im s| = {}", self.n_terms, 10.0 + s.im.abs()),
            ));
        }
        if !(4..=30).contains(&self.n_bernoulli) {
            return Err(Error::domain(
                "EMConfig",
                format!("n_bernoulli = {} outside [4, 30]", self.n_bernoulli),
            ));
        }
        Ok(())
    }
}

/// ζ(2k) for k ≥ 1.
fn zeta_even(k: usize) -> f64 {
    match k {
        1 => PI.powi(2) / 6.0,
        2 => PI.powi(4) / 90.0,
        3 => PI.powi(6) / 945.0,
        _ => (1..=100).rev().map(|n| (n as f64).powi(-2 * k as i32)).sum(),
    }
}

/// `B_{2k} / (2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}`
fn bernoulli_over_factorial(k: usize) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta_even(k) / (2.0 * PI).powi(2 * k as i32)
}

/// Euler–Maclaurin ζ(s) with the given configuration; `Re s` must be at
/// least [`REFLECT_BELOW`].
pub fn zeta_em_with(s: Complex64, cfg: EMConfig) -> Result<Complex64> {
    cfg.validate(s)?;
    if s == ONE {
        return Err(Error::Pole {
            function: "zeta",
            at: s,
        });
    }
    let n = cfg.n_terms;
    let mut sum = ZERO;
    for k in (1..n).rev() {
        sum += (-s * (k as f64).ln()).exp();
    }
    let big_n = n as f64;
    let ln_n = big_n.ln();
    let n_pow = (-s * ln_n).exp();
    sum += n_pow * big_n / (s - 1.0) + 0.5 * n_pow;
    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_pow / big_n;
    for k in 1..=cfg.n_bernoulli {
        sum += bernoulli_over_factorial(k) * rising * power;
        let m = 2.0 * k as f64;
        rising *= (s + m - 1.0) * (s + m);
        power /= big_n * big_n;
    }
    Ok(sum)
}

/// Reference ζ(s); reflects through `ζ(s) = χ(s)ζ(1-s)` when `Re s < 0.05`.
///
/// ```
/// use num_complex::Complex64;
/// let z = riemann_aux::zeta_ref::zeta_em(Complex64::new(-1.0, 0.0)).unwrap();
/// assert!((z.re + 1.0 / 12.0).abs() < 1e-12);
/// ```
pub fn zeta_em(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("zeta_em", format!("non-finite argument {s}")));
    }
    if s.re < REFLECT_BELOW {
        let r = ONE - s;
        return Ok(chi(s)? * zeta_em_with(r, EMConfig::for_s(r))?);
    }
    zeta_em_with(s, EMConfig::for_s(s))
}

/// Tolerance on the imaginary part of `e^{iθ(t)}ζ(1/2+it)`.
pub const REALNESS_TOL: f64 = 1e-9;

/// Hardy's `Z(t) = e^{iθ(t)} ζ(1/2 + it)`, which is real.
pub fn z_function(t: f64) -> Result<f64> {
    let v = Complex64::from_polar(1.0, theta(t)?) * zeta_em(Complex64::new(0.5, t))?;
    if v.im.abs() > REALNESS_TOL * v.re.abs().max(1.0) {
        return Err(Error::Consistency {
            op: "z_function",
            reason: format!("Im e^(i theta) zeta = {:e} at t = {t}", v.im),
        });
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        let z2 = zeta_em(c(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14 && z2.im == 0.0);
        let z3 = zeta_em(c(3.0, 0.0)).unwrap();
        assert!((z3.re - 1.202_056_903_159_594_3).abs() < 1e-14);
        let zm1 = zeta_em(c(-1.0, 0.0)).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-14);
        let zh = zeta_em(c(0.5, 0.0)).unwrap();
        assert!((zh.re + 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!(zeta_em(c(-2.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn pole_at_one() {
        assert!(matches!(zeta_em(ONE), Err(Error::Pole { .. })));
    }

    #[test]
    fn complex_reference_values() {
        assert!(zeta_em(c(0.5, 14.134_725)).unwrap().norm() < 1e-5);
        // mpmath zeta(2+5i)
        let want = c(0.850_962_943_624_262_96, 0.098_996_946_134_831_347);
        let got = zeta_em(c(2.0, 5.0)).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm(), "{got}");
    }

    #[test]
    fn first_zero_by_bisection_with_step_halving() {
        // bisect Z(t), then redo with a doubled Euler–Maclaurin length
        let root = |cfg_scale: usize| {
            let z = |t: f64| {
                let s = c(0.5, t);
                let mut cfg = EMConfig::for_s(s);
                cfg.n_terms *= cfg_scale;
                let v = Complex64::from_polar(1.0, theta(t).unwrap())
                    * zeta_em_with(s, cfg).unwrap();
                v.re
            };
            let (mut lo, mut hi) = (14.0, 14.3);
            assert!(z(lo) * z(hi) < 0.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if z(lo) * z(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let r1 = root(1);
        let r2 = root(2);
        assert!((r1 - r2).abs() < 1e-10);
        assert!((r1 - 14.134_725).abs() < 1e-6);
    }

    #[test]
    fn z_function_values() {
        assert!((z_function(0.0).unwrap() + 1.460_354_508_809_586_8).abs() < 1e-12);
        assert!(z_function(14.134_725).unwrap().abs() < 1e-4);
        let g = 17.845_599_5;
        let zeta = zeta_em(c(0.5, g)).unwrap();
        assert!((z_function(g).unwrap() - zeta.re).abs() < 1e-5);
    }

    #[test]
    fn realness_and_reflection() {
        let mut t = 0.0;
        while t <= 50.0 {
            z_function(t).unwrap();
            t += 0.5;
        }
        for sigma in [-0.5, 0.25] {
            for t in [3.0, 12.0] {
                let s = c(sigma, t);
                // Euler–Maclaurin converges for Re s < 0 as well; compare unreflected
                let direct = zeta_em_with(s, EMConfig::for_s(s)).unwrap();
                let refl = chi(s).unwrap() * zeta_em(ONE - s).unwrap();
                assert!((direct - refl).norm() < 1e-9 * direct.norm().max(1.0));
            }
        }
    }

    #[test]
    fn config_validation() {
        let s = c(0.5, 40.0);
        assert!(EMConfig { n_terms: 20, n_bernoulli: 12 }.validate(s).is_err());
        assert!(EMConfig { n_terms: 60, n_bernoulli: 3 }.validate(s).is_err());
        assert!(EMConfig::for_s(s).validate(s).is_ok());
    }
}
