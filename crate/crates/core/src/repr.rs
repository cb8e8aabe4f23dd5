//! Independent evaluators of the Riemann auxiliary function R(s).
//!
//! | repr        | domain            | integral                                             |
//! |-------------|-------------------|------------------------------------------------------|
//! | `Direct`    | all s             | Siegel line `1/2 + uω` of `x^{-s}e^{πix²}/(2i sin πx)` |
//! | `Main`      | `Re s > 0`        | `∫_0^∞ y^{s-1} F(y) dy`                              |
//! | `Left`      | `Re s < 0`        | `∫_0^∞ y^{-s} g(y) dy`                               |
//! | `SiegelSin` | `Re s < 0`        | `∫_0^∞ y^{-s} e^{-πy²}/sin(πωy) dy`                  |
//! | `Gabcke`    | `Re s > 0`        | `∫_ℝ e^{-πx²}H_{-s}(x√π)/(1+e^{-2πωx}) dx`           |
//! | `Contour`   | `Re s > 0`        | `∫_{Γ_a} z^{s-1} F(z) dz`                            |
//! | `Critical`  | `s = 1/2 + it`, `t > 0` | `∫_0^∞ x^{-1/2+it} e^{-πi(x²+x)/2} sin(π(x²-x)/2)/sin(πx) dx` |
//! | `K1K2`      | `s = 1/2 + it`, `t > 0` | split of `Contour` at `a = ρtω/2π`                  |
//!
//! [`zeta_from_r`] rebuilds ζ through `ζ(s) = R(s) + χ(s)·conj(R(1 - conj s))`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{
    critical_complex, direct_siegel_kernel, f_kernel, g_left_complex, gabcke_weight, k1_kernel,
    k1_kernel_short, k2_kernel, siegel_sin_complex,
};
use crate::quad::{ContourPath, EvalResult, Quad, TailEnvelope, DEFAULT_TOL};
use crate::special::{cexp, chi, log_gamma, one_minus_exp, scaled_sin, theta, I, OMEGA, ONE, ZERO};

/// Band `|Re s| < ROUTER_BAND` is routed to the Siegel-line integral.
pub const ROUTER_BAND: f64 = 0.05;
/// Default ρ of the K1/K2 split.
pub const DEFAULT_RHO: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReprId {
    Direct,
    Main,
    Left,
    SiegelSin,
    Gabcke,
    Contour,
    Critical,
    K1K2,
}

impl ReprId {
    pub const ALL: [ReprId; 8] = [
        ReprId::Direct,
        ReprId::Main,
        ReprId::Left,
        ReprId::SiegelSin,
        ReprId::Gabcke,
        ReprId::Contour,
        ReprId::Critical,
        ReprId::K1K2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReprId::Direct => "direct",
            ReprId::Main => "main",
            ReprId::Left => "left",
            ReprId::SiegelSin => "siegel-sin",
            ReprId::Gabcke => "gabcke",
            ReprId::Contour => "contour",
            ReprId::Critical => "critical",
            ReprId::K1K2 => "k1k2",
        }
    }

    /// Human-readable validity domain.
    pub fn domain(self) -> &'static str {
        match self {
            ReprId::Direct => "all s",
            ReprId::Main | ReprId::Gabcke | ReprId::Contour => "Re s > 0",
            ReprId::Left | ReprId::SiegelSin => "Re s < 0",
            ReprId::Critical | ReprId::K1K2 => "Re s = 1/2, Im s > 0",
        }
    }

    pub fn admits(self, s: Complex64) -> bool {
        match self {
            ReprId::Direct => true,
            ReprId::Main | ReprId::Gabcke | ReprId::Contour => s.re > 0.0,
            ReprId::Left | ReprId::SiegelSin => s.re < 0.0,
            ReprId::Critical | ReprId::K1K2 => s.re == 0.5 && s.im > 0.0,
        }
    }
}

impl fmt::Display for ReprId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReprId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ReprId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ReprId::ALL.iter().map(|r| r.name()).collect();
                format!("unknown representation `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Output of [`r_k1k2`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct K1K2Result {
    pub value: Complex64,
    pub abs_err: f64,
    pub n_evals: usize,
    pub k1: Complex64,
    pub k1_err: f64,
    pub k2: Complex64,
    pub k2_err: f64,
    pub rho: f64,
    pub t: f64,
}

impl K1K2Result {
    pub fn eval_result(&self) -> EvalResult {
        EvalResult {
            value: self.value,
            abs_err: self.abs_err,
            n_evals: self.n_evals,
            truncated_at: None,
        }
    }
}

/// Which line of the K1 formula to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K1Form {
    /// `-ω t^{1/2} ∫_0^ρ x^{-1/2+it} F(tωx/2π) dx`
    Short,
    /// `-ω e^{-it log t} ∫_0^{ρt} x^{-1/2+it} F(ωx/2π) dx`
    Long,
}

/// Extra parameters some representations take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReprOptions {
    pub tol: f64,
    pub rho: f64,
    /// Corner of the `Contour` path.
    pub a: Complex64,
}

impl Default for ReprOptions {
    fn default() -> Self {
        ReprOptions {
            tol: DEFAULT_TOL,
            rho: DEFAULT_RHO,
            a: Complex64::new(0.5, 0.5),
        }
    }
}

fn check_point(op: &'static str, s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("non-finite s = {s}")))
    }
}

/// Relative error of `exp(w)` when `w` is a sum of terms of the given sizes.
fn log_space_rel_err(terms: &[f64]) -> f64 {
    8.0 * f64::EPSILON * (1.0 + terms.iter().sum::<f64>())
}

/// `-(2π)^s e^{πis/4} / Γ(s)` with its relative error.
fn main_prefactor(s: Complex64) -> Result<(Complex64, f64)> {
    let lg = log_gamma(s)?;
    let a = s * (2.0 * PI).ln();
    let b = I * PI * s / 4.0;
    let f = -cexp(a + b - lg);
    Ok((f, log_space_rel_err(&[a.norm(), b.norm(), lg.norm()])))
}

fn power(z: Complex64, p: Complex64) -> Complex64 {
    if z == ZERO {
        ZERO
    } else {
        cexp(p * z.ln())
    }
}

/// R(s) on the Siegel line `x = 1/2 + uω`, traversed from `u = +∞` to `-∞`.
pub fn r_direct(s: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_direct", s)?;
    let k = |x: Complex64| direct_siegel_kernel(x, s).unwrap_or(ZERO);
    let half = Complex64::new(0.5, 0.0);
    let env = TailEnvelope::Gaussian { rate: PI };
    let q = Quad::new(tol);
    let down = q.ray(k, half, -OMEGA, env)?;
    let up = q.ray(k, half, OMEGA, env)?;
    Ok(down.combine(-up))
}

/// R(s) for `Re s > 0` from `-(2π)^s e^{πis/4}/Γ(s) ∫_0^∞ y^{s-1} F(y) dy`.
pub fn r_main(s: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_main", s)?;
    if s.re <= 0.0 {
        return Err(Error::domain("r_main", format!("needs Re s > 0, got s = {s}")));
    }
    let (pre, pre_err) = main_prefactor(s)?;
    let e = s - ONE;
    let integral = Quad::new(tol).singular_start(e).ray(
        |y| power(y, e) * f_kernel(y),
        ZERO,
        ONE,
        TailEnvelope::Exponential { rate: PI * SQRT_2 },
    )?;
    Ok(integral.scale(pre, pre_err))
}

/// R(s) for `Re s < 0` from `-ω e^{-πis/4}(1 - e^{πis}) ∫_0^∞ y^{-s} g(y) dy`.
pub fn r_left(s: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_left", s)?;
    if s.re >= 0.0 {
        return Err(Error::domain("r_left", format!("needs Re s < 0, got s = {s}")));
    }
    let w = I * PI * s;
    // keep both exponentials bounded: for t < 0 factor out e^{πis}
    let pre = if s.im >= 0.0 {
        -OMEGA * cexp(-w / 4.0) * one_minus_exp(w)
    } else {
        OMEGA * cexp(0.75 * w) * one_minus_exp(-w)
    };
    let pre_err = log_space_rel_err(&[w.norm()]);
    Ok(left_integral(s, tol)?.scale(pre, pre_err))
}

/// `∫_0^∞ y^{-s} g(y) dy`, `Re s < 0`.
fn left_integral(s: Complex64, tol: f64) -> Result<EvalResult> {
    let e = -s;
    Quad::new(tol).singular_start(e - ONE).ray(
        |y| power(y, e) * g_left_complex(y),
        ZERO,
        ONE,
        TailEnvelope::Gaussian { rate: PI },
    )
}

/// `L(w) = R(w) / (1 - e^{πiw}) = -ω e^{-πiw/4} ∫_0^∞ y^{-w} g(y) dy`, `Re w < 0`.
///
/// Unlike R(w) it does not vanish at the even negative integers.
pub fn r_left_reduced(w: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_left_reduced", w)?;
    if w.re >= 0.0 {
        return Err(Error::domain("r_left_reduced", format!("needs Re w < 0, got w = {w}")));
    }
    let b = -I * PI * w / 4.0;
    Ok(left_integral(w, tol)?.scale(-OMEGA * cexp(b), log_space_rel_err(&[b.norm()])))
}

/// R(s) for `Re s < 0` from `ω e^{πis/4} sin(πs/2) ∫_0^∞ y^{-s} e^{-πy²}/sin(πωy) dy`.
pub fn r_siegel_sin(s: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_siegel_sin", s)?;
    if s.re >= 0.0 {
        return Err(Error::domain("r_siegel_sin", format!("needs Re s < 0, got s = {s}")));
    }
    let (m, scale) = scaled_sin(0.5 * PI * s);
    let b = I * PI * s / 4.0;
    let pre = OMEGA * cexp(b + scale) * m;
    let pre_err = log_space_rel_err(&[b.norm(), scale]);
    let e = -s;
    let integral = Quad::new(tol).singular_start(e - ONE).ray(
        |y| power(y, e) * siegel_sin_complex(y),
        ZERO,
        ONE,
        TailEnvelope::Gaussian { rate: PI },
    )?;
    Ok(integral.scale(pre, pre_err))
}

/// R(s) for `Re s > 0` from
/// `-2^s π^{s/2} e^{πis/4} ∫_ℝ e^{-πx²} H_{-s}(x√π) / (1 + e^{-2πωx}) dx`.
pub fn r_gabcke(s: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_gabcke", s)?;
    if s.re <= 0.0 {
        return Err(Error::domain("r_gabcke", format!("needs Re s > 0, got s = {s}")));
    }
    let a = s * (2.0f64.ln() + 0.5 * PI.ln());
    let b = I * PI * s / 4.0;
    let pre = -cexp(a + b);
    let pre_err = log_space_rel_err(&[a.norm(), b.norm()]);
    let w = |x: Complex64| gabcke_weight(x.re, s).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let q = Quad::new(tol);
    let right = q.ray(w, ZERO, ONE, TailEnvelope::Gaussian { rate: PI })?;
    let left = q.ray(w, ZERO, -ONE, TailEnvelope::Exponential { rate: PI * SQRT_2 })?;
    Ok(right.combine(-left).scale(pre, pre_err))
}

/// R(s) for `Re s > 0` with the Mellin integral moved to `Γ_a`: the segment
/// `[0, a]` followed by the horizontal ray `a + [0, ∞)`.
pub fn r_contour(s: Complex64, a: Complex64, tol: f64) -> Result<EvalResult> {
    check_point("r_contour", s)?;
    if s.re <= 0.0 {
        return Err(Error::domain("r_contour", format!("needs Re s > 0, got s = {s}")));
    }
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::domain("r_contour", format!("non-finite corner a = {a}")));
    }
    if a.im == 0.0 && a.re < 0.0 {
        return Err(Error::domain(
            "r_contour",
            format!("corner a = {a} lies on the branch cut of z^(s-1)"),
        ));
    }
    let (pre, pre_err) = main_prefactor(s)?;
    let e = s - ONE;
    let path = ContourPath::gamma_a(a)?;
    let integral = Quad::new(tol).singular_start(e).path(
        |z| power(z, e) * f_kernel(z),
        &path,
        Some(TailEnvelope::Exponential { rate: PI * SQRT_2 }),
    )?;
    Ok(integral.scale(pre, pre_err))
}

/// `(1 + i e^{-πt}) e^{-2iθ(t)}`
pub fn critical_prefactor(t: f64) -> Result<Complex64> {
    Ok((ONE + I * (-PI * t).exp()) * Complex64::from_polar(1.0, -2.0 * theta(t)?))
}

/// `e^{iπ/4} (2π)^{1/2+it} e^{-πt/2} / Γ(1/2+it)`, the other spelling of
/// [`critical_prefactor`].
pub fn critical_prefactor_gamma(t: f64) -> Result<Complex64> {
    let s = Complex64::new(0.5, t);
    Ok(cexp(I * PI / 4.0 + s * (2.0 * PI).ln() - PI * t / 2.0 - log_gamma(s)?))
}

/// R(1/2 + it), `t > 0`, from the critical-line integral.
///
/// The real segment `[0, X0]`, `X0 = max(20, t)`, is integrated directly. The
/// conditionally convergent remainder `∫_{X0}^∞` is rotated onto the ray
/// `X0 + u e^{-iπ/4}`, along which the kernel decays like `e^{-π√2 u}`.
pub fn r_critical(t: f64, tol: f64) -> Result<EvalResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("r_critical", format!("needs t > 0, got {t}")));
    }
    let x0 = t.max(20.0);
    let k = |x: Complex64| if x == ZERO { ZERO } else { critical_complex(x, t) };
    let head = Quad::new(tol)
        .singular_start(Complex64::new(-0.5, t))
        .segment(k, ZERO, Complex64::new(x0, 0.0))?;
    let tail = Quad::new(tol).ray(
        k,
        Complex64::new(x0, 0.0),
        Complex64::from_polar(1.0, -PI / 4.0),
        TailEnvelope::Exponential { rate: PI * SQRT_2 },
    )?;
    let pre = critical_prefactor(t)?;
    Ok(head.combine(tail).scale(pre, 8.0 * f64::EPSILON * (1.0 + t)))
}

fn check_k1k2(t: f64, rho: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("r_k1k2", format!("needs t > 0, got {t}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain("r_k1k2", format!("needs rho > 0, got {rho}")));
    }
    Ok(())
}

/// K1 by either line of its definition.
pub fn k1(t: f64, rho: f64, form: K1Form, tol: f64) -> Result<EvalResult> {
    check_k1k2(t, rho)?;
    let q = Quad::new(tol).singular_start(Complex64::new(-0.5, t));
    match form {
        K1Form::Long => {
            let r = q.segment(|x| k1_kernel(x.re, t), ZERO, Complex64::new(rho * t, 0.0))?;
            Ok(r.scale(OMEGA * Complex64::from_polar(1.0, -t * t.ln()), 8.0 * f64::EPSILON * t))
        }
        K1Form::Short => {
            let r = q.segment(|x| k1_kernel_short(x.re, t), ZERO, Complex64::new(rho, 0.0))?;
            Ok(r.scale(OMEGA * t.sqrt(), 4.0 * f64::EPSILON))
        }
    }
}

/// K2 `= -(ωρt)^{1/2} e^{it log ρ} ∫_0^∞ e^{πt/4}(ω+x)^{-1/2+it} F(ρt(ω+x)/2π) dx`.
pub fn k2(t: f64, rho: f64, tol: f64) -> Result<EvalResult> {
    check_k1k2(t, rho)?;
    let r = Quad::new(tol).ray(
        |x| k2_kernel(x.re, t, rho),
        ZERO,
        ONE,
        TailEnvelope::Exponential {
            rate: rho * t / SQRT_2,
        },
    )?;
    let pre = -(OMEGA * rho * t).sqrt() * Complex64::from_polar(1.0, t * rho.ln());
    Ok(r.scale(pre, 8.0 * f64::EPSILON * (1.0 + t)))
}

/// `e^{-πt/2} / Γ(1/2+it) · e^{it log t}`
pub fn k1k2_prefactor(t: f64) -> Result<(Complex64, f64)> {
    let s = Complex64::new(0.5, t);
    let lg = log_gamma(s)?;
    let w = -PI * t / 2.0 - lg + I * t * t.ln();
    Ok((cexp(w), log_space_rel_err(&[PI * t / 2.0, lg.norm(), t * t.ln().abs()])))
}

/// R(1/2 + it) assembled from K1 and K2 (K1 by its long-variable line).
pub fn r_k1k2(t: f64, rho: f64, tol: f64) -> Result<K1K2Result> {
    r_k1k2_with(t, rho, K1Form::Long, tol)
}

pub fn r_k1k2_with(t: f64, rho: f64, form: K1Form, tol: f64) -> Result<K1K2Result> {
    check_k1k2(t, rho)?;
    let a = k1(t, rho, form, tol)?;
    let b = k2(t, rho, tol)?;
    let (pre, pre_err) = k1k2_prefactor(t)?;
    let sum = a.combine(b).scale(pre, pre_err);
    Ok(K1K2Result {
        value: sum.value,
        abs_err: sum.abs_err,
        n_evals: sum.n_evals,
        k1: a.value,
        k1_err: a.abs_err,
        k2: b.value,
        k2_err: b.abs_err,
        rho,
        t,
    })
}

/// Evaluate the chosen representation at `s`.
pub fn eval(repr: ReprId, s: Complex64, opts: &ReprOptions) -> Result<EvalResult> {
    let on_critical_line = |op: &'static str| -> Result<f64> {
        if s.re == 0.5 && s.im > 0.0 {
            Ok(s.im)
        } else {
            Err(Error::domain(op, format!("needs s = 1/2 + it with t > 0, got s = {s}")))
        }
    };
    match repr {
        ReprId::Direct => r_direct(s, opts.tol),
        ReprId::Main => r_main(s, opts.tol),
        ReprId::Left => r_left(s, opts.tol),
        ReprId::SiegelSin => r_siegel_sin(s, opts.tol),
        ReprId::Gabcke => r_gabcke(s, opts.tol),
        ReprId::Contour => r_contour(s, opts.a, opts.tol),
        ReprId::Critical => r_critical(on_critical_line("r_critical")?, opts.tol),
        ReprId::K1K2 => Ok(r_k1k2(on_critical_line("r_k1k2")?, opts.rho, opts.tol)?.eval_result()),
    }
}

/// Representation used for `R(s)` inside [`zeta_from_r`].
pub fn route(s: Complex64) -> Result<ReprId> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Router(s));
    }
    Ok(if s.re >= ROUTER_BAND {
        ReprId::Main
    } else if s.re <= -ROUTER_BAND {
        ReprId::Left
    } else {
        ReprId::Direct
    })
}

/// R(s) by the routed representation.
pub fn r_auto(s: Complex64, tol: f64) -> Result<EvalResult> {
    eval(
        route(s)?,
        s,
        &ReprOptions {
            tol,
            ..ReprOptions::default()
        },
    )
}

/// `ζ(s) = R(s) + χ(s)·conj(R(1 - conj s))` with an error estimate.
///
/// When the reflected point `w = 1 - conj s` falls to the left integral, the
/// product `χ(s)·conj(1 - e^{πiw})` is taken in the closed form
/// `(2π)^s e^{πis/2} / Γ(s)`; this stays finite at the odd integers `s ≥ 3`
/// where χ has poles and R(w) vanishes.
pub fn zeta_from_r_eval(s: Complex64, tol: f64) -> Result<EvalResult> {
    let r = r_auto(s, tol)?;
    let reflected = ONE - s.conj();
    let second = if route(reflected)? == ReprId::Left {
        let l = r_left_reduced(reflected, tol)?;
        let lg = log_gamma(s)?;
        let a = s * (2.0 * PI).ln();
        let b = 0.5 * I * PI * s;
        let factor = cexp(a + b - lg);
        EvalResult {
            value: l.value.conj(),
            ..l
        }
        .scale(factor, log_space_rel_err(&[a.norm(), b.norm(), lg.norm()]))
    } else {
        let rr = r_auto(reflected, tol)?;
        let x = chi(s)?;
        EvalResult {
            value: rr.value.conj(),
            ..rr
        }
        .scale(x, log_space_rel_err(&[s.norm() * 4.0]))
    };
    Ok(r.combine(second))
}

/// ζ(s) rebuilt from R; see [`zeta_from_r_eval`].
pub fn zeta_from_r(s: Complex64, tol: f64) -> Result<Complex64> {
    Ok(zeta_from_r_eval(s, tol)?.value)
}

/// `2 Re(e^{iθ(t)} R(1/2 + it))`, which equals Hardy's Z(t).
pub fn z_from_r(t: f64, r: Complex64) -> Result<f64> {
    Ok(2.0 * (Complex64::from_polar(1.0, theta(t)?) * r).re)
}
