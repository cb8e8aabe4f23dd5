//! Complex special functions: log-gamma, χ(s), the Riemann–Siegel theta
//! function and the Hermite function H_ν(z), plus a few elementary helpers
//! (overflow-safe exponentials, `expm1`, scaled trigonometric functions)
//! shared by the kernels.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{Quad, TailEnvelope};

/// ω = e^{iπ/4}
pub const OMEGA: Complex64 = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
/// ω̄ = e^{-iπ/4}
pub const OMEGA_BAR: Complex64 = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2PI: f64 = 1.837_877_066_409_345_5;
/// Exponents with real part below this evaluate to exactly zero.
pub const UNDERFLOW_EXPONENT: f64 = -700.0;
/// Above this `|Im α|` the Hermite integral is taken through its saddle point.
const SADDLE_PATH_MIN_IM: f64 = 4.0;

/// `e^w`, flushed to zero when `Re w < -700`.
#[inline]
pub fn cexp(w: Complex64) -> Complex64 {
    if w.re < UNDERFLOW_EXPONENT {
        ZERO
    } else {
        w.exp()
    }
}

/// `e^w - 1` without cancellation near `w = 0`.
pub fn expm1(w: Complex64) -> Complex64 {
    if w.norm() > 0.5 {
        return cexp(w) - ONE;
    }
    let s = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * s * s,
        w.re.exp() * w.im.sin(),
    )
}

/// `(e^w - 1)/w`, equal to 1 at `w = 0`.
pub fn exprel(w: Complex64) -> Complex64 {
    if w.norm() < 1e-5 {
        // 1 + w/2 + w²/6 + w³/24
        ONE + w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    } else {
        expm1(w) / w
    }
}

/// `1 - e^w`, accurate also where `e^w` is close to 1 with `w` near a
/// nonzero multiple of 2πi.
pub fn one_minus_exp(w: Complex64) -> Complex64 {
    let k = (w.im / (2.0 * PI)).round();
    let reduced = Complex64::new(w.re, w.im - 2.0 * PI * k);
    if reduced.norm() < 0.5 {
        -expm1(reduced)
    } else {
        ONE - cexp(w)
    }
}

/// `sin w = e^{|Im w|}·m`; returns `(m, |Im w|)` without overflow.
pub fn scaled_sin(w: Complex64) -> (Complex64, f64) {
    let y = w.im.abs();
    if y < 20.0 {
        return (w.sin(), 0.0);
    }
    let e = (-2.0 * y).exp();
    let (sx, cx) = w.re.sin_cos();
    let m = if w.im > 0.0 {
        // (e^{iRe w}e^{-2y} - e^{-iRe w}) / (2i)
        (Complex64::new(cx, sx) * e - Complex64::new(cx, -sx)) / (2.0 * I)
    } else {
        (Complex64::new(cx, sx) - Complex64::new(cx, -sx) * e) / (2.0 * I)
    };
    (m, y)
}

/// `cos w = e^{|Im w|}·m`; returns `(m, |Im w|)` without overflow.
pub fn scaled_cos(w: Complex64) -> (Complex64, f64) {
    let y = w.im.abs();
    if y < 20.0 {
        return (w.cos(), 0.0);
    }
    let e = (-2.0 * y).exp();
    let (sx, cx) = w.re.sin_cos();
    let m = if w.im > 0.0 {
        (Complex64::new(cx, sx) * e + Complex64::new(cx, -sx)) * 0.5
    } else {
        (Complex64::new(cx, sx) + Complex64::new(cx, -sx) * e) * 0.5
    };
    (m, y)
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

// B_{2k} / (2k(2k-1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Complex log-gamma on the principal branch (continuous off the negative
/// real axis; the imaginary part is *not* reduced modulo 2π).
///
/// Recurrence up to `Re z ≥ 15`, then the Stirling series.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("log_gamma", format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            function: "gamma",
            at: z,
        });
    }
    let mut w = z;
    let mut shift = ZERO;
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = ZERO;
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + 0.5 * LN_2PI + series - shift)
}

/// χ(s) = (2π)^s / (2Γ(s)cos(πs/2)), the factor in ζ(s) = χ(s)ζ(1-s).
///
/// Uses the equivalent `2^s π^{s-1} sin(πs/2) Γ(1-s)` for `Re s < 1/2`, which
/// stays finite at s = -1, -3, ... and vanishes at s = 0, -2, ...
pub fn chi(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("chi", format!("non-finite argument {s}")));
    }
    if s.re >= 0.5 {
        if s.im == 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 1 {
            return Err(Error::Pole { function: "chi", at: s });
        }
        let (m, scale) = scaled_cos(0.5 * PI * s);
        let log_mag = s * LN_2PI - log_gamma(s)? - LN_2 - scale;
        Ok(cexp(log_mag) / m)
    } else {
        let (m, scale) = scaled_sin(0.5 * PI * s);
        let log_mag = s * LN_2 + (s - 1.0) * LN_PI + scale + log_gamma(ONE - s)?;
        Ok(cexp(log_mag) * m)
    }
}

/// Riemann–Siegel theta: θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π.
///
/// Continuous, odd, θ(0) = 0, and e^{-2iθ(t)} = χ(1/2 + it).
pub fn theta(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain("theta", format!("non-finite argument {t}")));
    }
    Ok(log_gamma(Complex64::new(0.25, 0.5 * t))?.im - 0.5 * t * LN_PI)
}

fn check_hermite_order(nu: Complex64) -> Result<()> {
    if nu.im == 0.0 && nu.re >= 0.0 && nu.re == nu.re.round() {
        return Err(Error::Unsupported {
            op: "hermite_h",
            reason: format!("order {} is a nonnegative integer (Hermite polynomial)", nu.re),
        });
    }
    if !(nu.re.is_finite() && nu.im.is_finite()) {
        return Err(Error::domain("hermite_h", "non-finite order"));
    }
    Ok(())
}

/// Series evaluation of H_ν(z) together with the cancellation ratio
/// `Σ|terms| / |Σ terms|`.
pub fn hermite_h_series(nu: Complex64, z: Complex64) -> Result<(Complex64, f64)> {
    check_hermite_order(nu)?;
    // T_n = (-1)^n Γ((n-ν)/2) (2z)^n / n! / (2Γ(-ν)), split by parity:
    // T_{n+2} = T_n · ((n-ν)/2) · (2z)² / ((n+1)(n+2)).
    let lg_neg_nu = log_gamma(-nu)?;
    let two_z = 2.0 * z;
    let four_z2 = two_z * two_z;
    let mut even = cexp(log_gamma(-0.5 * nu)? - lg_neg_nu - LN_2);
    let mut odd = -cexp(log_gamma(0.5 * (ONE - nu))? - lg_neg_nu - LN_2) * two_z;
    let mut sum = even + odd;
    let mut abs_sum = even.norm() + odd.norm();
    let mut n = 0.0;
    // terms start shrinking once n exceeds about 2|z|²
    let n_turn = 2.0 * z.norm_sqr() + nu.norm() + 4.0;
    while n < 4000.0 {
        even *= (0.5 * (n - nu)) * four_z2 / ((n + 1.0) * (n + 2.0));
        odd *= (0.5 * (n + 1.0 - nu)) * four_z2 / ((n + 2.0) * (n + 3.0));
        let step = even + odd;
        sum += step;
        abs_sum += even.norm() + odd.norm();
        n += 2.0;
        if n > n_turn && even.norm() + odd.norm() < 1e-16 * sum.norm() {
            break;
        }
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            break;
        }
    }
    let ratio = if sum.norm() > 0.0 { abs_sum / sum.norm() } else { f64::INFINITY };
    Ok((sum, ratio))
}

/// Integral form H_ν(z) = (1/Γ(-ν)) ∫_0^∞ u^{-ν-1} e^{-u²-2zu} du, `Re ν < 0`.
pub fn hermite_h_integral(nu: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    check_hermite_order(nu)?;
    if nu.re >= 0.0 {
        return Err(Error::domain(
            "hermite_h_integral",
            format!("integral form needs Re ν < 0, got {nu}"),
        ));
    }
    let exponent = -nu - ONE;
    let r = scaled_hermite_integral(exponent, z, 0.0, tol)?;
    Ok(r * cexp(-log_gamma(-nu)?))
}

/// ∫_0^∞ u^{α} e^{-(u+z)² + shift} du, splitting at the Gaussian peak when it
/// lies on the positive axis.
pub(crate) fn scaled_hermite_integral(
    exponent: Complex64,
    z: Complex64,
    shift: f64,
    tol: f64,
) -> Result<Complex64> {
    // -u² - 2zu = -(u+z)² + z²; the caller's shift removes part of z².
    let log_pre = z * z - shift;
    let f = move |u: Complex64| {
        if u == ZERO {
            return ZERO;
        }
        cexp(exponent * u.ln() - (u + z) * (u + z) + log_pre)
    };
    let q = Quad::new(tol).singular_start(exponent);
    if exponent.im.abs() >= SADDLE_PATH_MIN_IM {
        // u^α oscillates too fast on the real axis; go through the saddle
        // u² + zu - α/2 = 0 of the integrand and leave along its steepest
        // descent direction, staying on the side of the axis where u^α is small.
        let mut u0 = 0.5 * (-z + (z * z + 2.0 * exponent).sqrt());
        if u0.im * exponent.im < 0.0 {
            u0 = 0.5 * (-z - (z * z + 2.0 * exponent).sqrt());
        }
        let h2 = -exponent / (u0 * u0) - 2.0;
        let mut d = (-ONE / h2).sqrt();
        if d.re < 0.0 {
            d = -d;
        }
        let max_arg = std::f64::consts::PI / 5.0;
        let theta = d.arg().clamp(-max_arg, max_arg);
        let theta = if exponent.im > 0.0 { theta.max(0.0) } else { theta.min(0.0) };
        let dir = Complex64::from_polar(1.0, theta);
        let head = q.segment(f, ZERO, u0)?;
        let env = TailEnvelope::Gaussian {
            rate: 0.5 * (2.0 * theta).cos(),
        };
        let tail = Quad::new(tol).ray(f, u0, dir, env)?;
        return Ok(head.value + tail.value);
    }
    let peak = -z.re;
    let env = TailEnvelope::Gaussian { rate: 0.5 };
    let r = if peak > 2.0 {
        let head = q.segment(f, ZERO, Complex64::new(peak, 0.0))?;
        let tail = Quad::new(tol).ray(f, Complex64::new(peak, 0.0), ONE, env)?;
        head.value + tail.value
    } else {
        q.ray(f, ZERO, ONE, env)?.value
    };
    Ok(r)
}

/// Hermite function H_ν(z) in Lebedev's normalisation.
///
/// The power series is used whenever it does not lose more than four digits
/// to cancellation; otherwise (large positive `Re z`) the integral form is
/// used, which needs `Re ν < 0`.
pub fn hermite_h(nu: Complex64, z: Complex64) -> Result<Complex64> {
    let (series, ratio) = hermite_h_series(nu, z)?;
    if ratio <= 1e4 || nu.re >= 0.0 {
        return Ok(series);
    }
    hermite_h_integral(nu, z, 1e-13)
}
