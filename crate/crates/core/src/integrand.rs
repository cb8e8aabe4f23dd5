//! Integrand kernels of the representations of R(s), each evaluated so that
//! removable singularities, exponential overflow and cancellation near the
//! lattice `z = nω` do not cost accuracy.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{
    cexp, expm1, exprel, hermite_h_series, log_gamma, one_minus_exp, scaled_hermite_integral,
    scaled_sin, I, OMEGA, OMEGA_BAR, ONE, ZERO,
};

/// Registered kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelId {
    /// `F(z) = (1 - e^{-πz² + πωz}) / (1 - e^{2πωz})`, see [`f_kernel`].
    FMain,
    /// `e^{-πy² + πω̄y} / (1 - e^{2πω̄y})`, see [`g_left_kernel`].
    GLeft,
    /// `e^{-πy²} / sin(πωy)`, see [`siegel_sin_kernel`].
    SiegelSin,
    /// `x^{-1/2+it} e^{-πi(x²+x)/2} sin(π(x²-x)/2) / sin(πx)`, see [`critical_kernel`].
    CriticalLine,
    /// `x^{-s} e^{πix²} / (e^{πix} - e^{-πix})`, see [`direct_siegel_kernel`].
    DirectSiegel,
    /// `e^{-πx²} H_{-s}(x√π) / (1 + e^{-2πωx})`, see [`gabcke_weight`].
    GabckeWeight,
}

impl KernelId {
    pub const ALL: [KernelId; 6] = [
        KernelId::FMain,
        KernelId::GLeft,
        KernelId::SiegelSin,
        KernelId::CriticalLine,
        KernelId::DirectSiegel,
        KernelId::GabckeWeight,
    ];

    pub fn formula(self) -> &'static str {
        match self {
            KernelId::FMain => "(1 - exp(-pi z^2 + pi w z)) / (1 - exp(2 pi w z))",
            KernelId::GLeft => "exp(-pi y^2 + pi conj(w) y) / (1 - exp(2 pi conj(w) y))",
            KernelId::SiegelSin => "exp(-pi y^2) / sin(pi w y)",
            KernelId::CriticalLine => {
                "x^(-1/2 + i t) exp(-i pi (x^2 + x)/2) sin(pi (x^2 - x)/2) / sin(pi x)"
            }
            KernelId::DirectSiegel => "x^(-s) exp(i pi x^2) / (exp(i pi x) - exp(-i pi x))",
            KernelId::GabckeWeight => "exp(-pi x^2) H_{-s}(x sqrt(pi)) / (1 + exp(-2 pi w x))",
        }
    }
}

/// Below this `|2πω(z - nω)|` the lattice-point expansion of `F` is used.
const LATTICE_RADIUS: f64 = 0.5;

/// The entire function `F(z) = (1 - e^{-πz² + πωz}) / (1 - e^{2πωz})`.
///
/// The denominator vanishes at `z = nω`; there the numerator vanishes too,
/// because `e^{-πz²+πωz} = e^{-πi n(n-1)} = 1`. Writing `z = nω + δ`,
///
/// ```text
/// F(z) = exprel(a) / exprel(b) · (1 - n - zω̄) / 2,
/// a = δπ(ω - z - nω),  b = 2πωδ,
/// ```
///
/// which is exact and loses nothing as `δ → 0`.
pub fn f_kernel(z: Complex64) -> Complex64 {
    let n = (z * OMEGA_BAR).re.round();
    let delta = z - n * OMEGA;
    let b = 2.0 * PI * OMEGA * delta;
    if b.norm() < LATTICE_RADIUS {
        let a = delta * PI * (OMEGA - z - n * OMEGA);
        if a.re < 700.0 {
            return exprel(a) / exprel(b) * (1.0 - n - z * OMEGA_BAR) * 0.5;
        }
    }
    let a = -PI * z * z + PI * OMEGA * z;
    let b = 2.0 * PI * OMEGA * z;
    if b.re > 0.0 {
        // multiply through by e^{-B}
        let e_mb = cexp(-b);
        let num = if a.re < 600.0 {
            e_mb * one_minus_exp(a)
        } else {
            e_mb - cexp(a - b)
        };
        num / -one_minus_exp(-b)
    } else {
        one_minus_exp(a) / one_minus_exp(b)
    }
}

/// Left-half-plane kernel `g(y) = e^{-πy² + πω̄y} / (1 - e^{2πω̄y})`, `y > 0`.
///
/// Evaluated as `-e^{-πy² - πω̄y} / (1 - e^{-2πω̄y})`, which has no growing
/// exponential. Simple pole at `y = 0` with residue `-ω/(2π)`.
pub fn g_left_kernel(y: f64) -> Result<Complex64> {
    if y.is_nan() || y <= 0.0 {
        return Err(Error::domain("g_left_kernel", format!("need y > 0, got {y}")));
    }
    Ok(g_left_complex(Complex64::new(y, 0.0)))
}

pub(crate) fn g_left_complex(y: Complex64) -> Complex64 {
    let b = -2.0 * PI * OMEGA_BAR * y;
    let num = cexp(-PI * y * y - PI * OMEGA_BAR * y);
    num / expm1(b)
}

/// `e^{-πy²} / sin(πωy)` for `y > 0`, using
/// `1/sin(w) = -2i e^{iw} / (1 - e^{2iw})` with `Im(πωy) > 0`.
pub fn siegel_sin_kernel(y: f64) -> Result<Complex64> {
    if y.is_nan() || y <= 0.0 {
        return Err(Error::domain("siegel_sin_kernel", format!("need y > 0, got {y}")));
    }
    Ok(siegel_sin_complex(Complex64::new(y, 0.0)))
}

pub(crate) fn siegel_sin_complex(y: Complex64) -> Complex64 {
    let w = PI * OMEGA * y;
    -2.0 * I * cexp(-PI * y * y + I * w) / -expm1(2.0 * I * w)
}

/// Critical-line kernel
/// `x^{-1/2+it} e^{-πi(x²+x)/2} sin(π(x²-x)/2) / sin(πx) = -x^{-1/2+it} F(ωx)`.
///
/// Removable at the integers; at `x = n` it equals `n^{-1/2+it}(2n-1)/2`.
pub fn critical_kernel(x: f64, t: f64) -> Result<Complex64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain("critical_kernel", format!("need x > 0, got {x}")));
    }
    Ok(critical_complex(Complex64::new(x, 0.0), t))
}

/// Same kernel at complex `x` in the right half-plane (used for tails along
/// a rotated ray).
pub(crate) fn critical_complex(x: Complex64, t: f64) -> Complex64 {
    let log_x = x.ln();
    -cexp(Complex64::new(-0.5, t) * log_x) * f_kernel(OMEGA * x)
}

/// `x^{-s} e^{πix²} / (e^{πix} - e^{-πix})` with principal `x^{-s}`.
pub fn direct_siegel_kernel(x: Complex64, s: Complex64) -> Result<Complex64> {
    if x.im == 0.0 && x.re == x.re.round() {
        return Err(Error::Pole {
            function: "direct_siegel_kernel",
            at: x,
        });
    }
    if x == ZERO {
        return Err(Error::Pole {
            function: "direct_siegel_kernel",
            at: x,
        });
    }
    let (m, scale) = scaled_sin(PI * x);
    let e = cexp(-s * x.ln() + I * PI * x * x - scale);
    Ok(e / (2.0 * I * m))
}

/// Below this `x` the Hermite factor of the Gabcke weight, which grows like
/// `e^{πx²}`, is taken from the scaled integral form.
pub const GABCKE_LEFT_SWITCH: f64 = -5.64;

/// `e^{-πx²} H_{-s}(x√π) / (1 + e^{-2πωx})` for real `x`.
pub fn gabcke_weight(x: f64, s: Complex64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::domain("gabcke_weight", format!("non-finite x = {x}")));
    }
    let z = Complex64::new(x * PI.sqrt(), 0.0);
    let nu = -s;
    let scaled_h = if s.re > 0.0 {
        let series = if x >= GABCKE_LEFT_SWITCH {
            let (h, ratio) = hermite_h_series(nu, z)?;
            (ratio <= 1e4).then_some(h * (-PI * x * x).exp())
        } else {
            None
        };
        match series {
            Some(v) => v,
            // e^{-πx²} H_{-s}(z) = (1/Γ(s)) ∫ u^{s-1} e^{-(u+z)²} du
            None => scaled_hermite_integral(s - ONE, z, PI * x * x, 1e-13)? * cexp(-log_gamma(s)?),
        }
    } else {
        let (h, _) = hermite_h_series(nu, z)?;
        if -PI * x * x < -700.0 && !h.is_finite() {
            return Err(Error::Unsupported {
                op: "gabcke_weight",
                reason: format!("Re s <= 0 with |x| = {} overflows the series", x.abs()),
            });
        }
        h * (-PI * x * x).exp()
    };
    let den = if x >= 0.0 {
        ONE + cexp(-2.0 * PI * OMEGA * x)
    } else {
        // 1/(1 + e^{-B}) = e^{B}/(1 + e^{B})
        let e = cexp(2.0 * PI * OMEGA * x);
        return Ok(scaled_h * e / (ONE + e));
    };
    Ok(scaled_h / den)
}

/// K1 kernel in the long variable: `-x^{-1/2+it} F(ωx/2π)` on `(0, ρt]`.
///
/// Equal to `x^{-1/2+it} e^{-ix}(1 - e^{-ix²/4π + ix/2}) / (1 - e^{-ix})`.
pub fn k1_kernel(x: f64, t: f64) -> Complex64 {
    if x <= 0.0 {
        return ZERO;
    }
    -cexp(Complex64::new(-0.5, t) * x.ln()) * f_kernel(OMEGA * (x / (2.0 * PI)))
}

/// K1 kernel in the short variable: `-x^{-1/2+it} F(tωx/2π)` on `(0, ρ]`.
pub fn k1_kernel_short(x: f64, t: f64) -> Complex64 {
    if x <= 0.0 {
        return ZERO;
    }
    -cexp(Complex64::new(-0.5, t) * x.ln()) * f_kernel(OMEGA * (t * x / (2.0 * PI)))
}

/// K2 kernel `e^{πt/4} (ω+x)^{-1/2+it} F(ρt(ω+x)/2π)` for `x ≥ 0`.
///
/// The factor `e^{πt/4}` is folded into the exponent so that the kernel has
/// modulus of order one at `x = 0`.
pub fn k2_kernel(x: f64, t: f64, rho: f64) -> Complex64 {
    let w = OMEGA + x;
    let e = cexp(Complex64::new(-0.5, t) * w.ln() + 0.25 * PI * t);
    e * f_kernel(w * (rho * t / (2.0 * PI)))
}

/// Literal form of the K2 integrand,
/// `e^{πt/4 + it log(ω+x) - tρωx} (ω+x)^{-1/2} (1 - e^{-ρ²t²(ω+x)²/4π + ρt(i+ωx)/2}) / (1 - e^{-ρt(i+ωx)})`.
///
/// Direct transcription, no stabilisation; used to cross-check [`k2_kernel`].
pub fn k2_kernel_literal(x: f64, t: f64, rho: f64) -> Complex64 {
    let w = OMEGA + x;
    let rt = rho * t;
    let head = cexp(0.25 * PI * t + I * t * w.ln() - rt * OMEGA * x) / w.sqrt();
    let num = ONE - cexp(-rt * rt / (4.0 * PI) * w * w + 0.5 * rt * (I + OMEGA * x));
    let den = ONE - cexp(-rt * (I + OMEGA * x));
    head * num / den
}
