//! Numerical checks of the identities and inequalities satisfied by the
//! kernel `F` and by R. Each scan produces a [`BoundScanReport`].

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::f_kernel;
use crate::quad::{EvalResult, Quad, TailEnvelope};
use crate::repr::k2;
use crate::special::{cexp, expm1, log_gamma, I, OMEGA, ONE, ZERO};
use crate::zeta_ref::zeta_em;

/// Quadrature tolerance used by the identity checks.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaId {
    SiegelIdentity,
    MellinZeta,
    LemmaDelta,
    LemmaR,
    LemmaMin,
    K2Bound,
    SegmentDecay,
    DecaySlope,
}

/// Outcome of one scan. `pass` is `worst_ratio <= bound_constant`.
///
/// For identities `worst_ratio` is the largest residual/tolerance ratio and
/// `bound_constant` is 1. For inequalities with an explicit constant it is
/// the largest value of the bounded quantity. For the existence-only bounds
/// on `F(R + ix)` it is the largest per-R empirical constant, and
/// `bound_constant` is twice the smallest one (stability within a factor 2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundScanReport {
    pub lemma_id: LemmaId,
    pub grid: BTreeMap<String, Vec<f64>>,
    pub worst_ratio: f64,
    pub bound_constant: f64,
    pub pass: bool,
    /// Coordinates of the worst sample.
    pub worst_at: BTreeMap<String, f64>,
    /// Per-parameter worst values, for scans grouped by a parameter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupWorst>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupWorst {
    pub param: f64,
    pub worst: f64,
}

impl BoundScanReport {
    fn new(
        lemma_id: LemmaId,
        grid: Vec<(&str, Vec<f64>)>,
        worst_ratio: f64,
        bound_constant: f64,
        worst_at: Vec<(&str, f64)>,
    ) -> Self {
        BoundScanReport {
            lemma_id,
            grid: grid.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            worst_ratio,
            bound_constant,
            pass: worst_ratio.is_finite() && worst_ratio <= bound_constant,
            worst_at: worst_at.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            groups: Vec::new(),
        }
    }
}

/// Index and value of the maximum, NaN counting as +∞.
fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .map(|v| if v.is_nan() { f64::INFINITY } else { *v })
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// `1 / (1 + e^{-2πωx})`, evaluated without overflow for `x < 0`.
fn fermi(x: f64) -> Complex64 {
    if x >= 0.0 {
        ONE / (ONE + cexp(-2.0 * PI * OMEGA * x))
    } else {
        let e = cexp(2.0 * PI * OMEGA * x);
        e / (ONE + e)
    }
}

/// Right-hand side `-e^{-πiy}(e^{πiy²} - e^{πiy}) / (e^{πiy} - e^{-πiy})`.
pub fn siegel_identity_rhs(y: f64) -> Complex64 {
    let e = |w: f64| Complex64::from_polar(1.0, PI * w);
    -e(-y) * (e(y * y) - e(y)) / (e(y) - e(-y))
}

/// `∫_ℝ e^{-πx² - 2πωxy} / (1 + e^{-2πωx}) dx` by two rays from 0.
pub fn siegel_identity_lhs(y: f64, tol: f64) -> Result<EvalResult> {
    let f = |z: Complex64| cexp(-PI * z.re * z.re - 2.0 * PI * OMEGA * z.re * y) * fermi(z.re);
    // the linear term e^{√2π(y-1)|x|} on the left slows the early decay
    let env = TailEnvelope::Gaussian { rate: PI / 2.0 };
    let q = Quad::new(tol);
    let right = q.ray(f, ZERO, ONE, env)?;
    let left = q.ray(f, ZERO, -ONE, env)?;
    Ok(right.combine(-left))
}

/// `|LHS - RHS|` of the kernel identity behind the Gabcke representation.
pub fn check_siegel_identity(y: f64) -> Result<f64> {
    if !y.is_finite() || y == y.round() {
        return Err(Error::domain(
            "check_siegel_identity",
            format!("y must be finite and not an integer, got {y}"),
        ));
    }
    Ok((siegel_identity_lhs(y, CHECK_TOL)?.value - siegel_identity_rhs(y)).norm())
}

/// `∫_0^∞ y^{s-1} / (1 - e^{2πωy}) dy` by quadrature.
pub fn mellin_zeta_lhs(s: Complex64, tol: f64) -> Result<EvalResult> {
    let e = s - ONE;
    let f = |y: Complex64| {
        if y == ZERO {
            return ZERO;
        }
        let b = -2.0 * PI * OMEGA * y;
        cexp(e * y.ln() + b) / expm1(b)
    };
    Quad::new(tol)
        .singular_start(s - 2.0)
        .ray(f, ZERO, ONE, TailEnvelope::Exponential { rate: PI * SQRT_2 })
}

/// `-e^{-πis/4} (2π)^{-s} Γ(s) ζ(s)`
pub fn mellin_zeta_rhs(s: Complex64) -> Result<Complex64> {
    Ok(-cexp(-I * PI * s / 4.0 - s * (2.0 * PI).ln() + log_gamma(s)?) * zeta_em(s)?)
}

/// `|LHS - RHS|` of the Mellin transform identity for `1/(1 - e^{2πωy})`.
pub fn check_mellin_zeta(s: Complex64) -> Result<f64> {
    if !(s.re > 1.0) {
        return Err(Error::domain("check_mellin_zeta", format!("needs Re s > 1, got {s}")));
    }
    Ok((mellin_zeta_lhs(s, CHECK_TOL)?.value - mellin_zeta_rhs(s)?).norm())
}

pub const SIEGEL_YS: [f64; 4] = [0.1, 0.5, 1.3, 2.7];
pub const SIEGEL_TOL: f64 = 1e-10;

pub fn siegel_identity_report(ys: &[f64], tol: f64) -> Result<BoundScanReport> {
    let residuals: Vec<f64> = ys
        .par_iter()
        .map(|&y| check_siegel_identity(y))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = residuals.iter().map(|r| r / tol).collect();
    let (i, worst) = argmax(&ratios);
    Ok(BoundScanReport::new(
        LemmaId::SiegelIdentity,
        vec![("y", ys.to_vec()), ("tol", vec![tol])],
        worst,
        1.0,
        vec![("y", ys[i]), ("residual", residuals[i])],
    ))
}

/// `(s, tolerance)` pairs of the default Mellin check.
pub fn mellin_default_points() -> Vec<(Complex64, f64)> {
    vec![
        (Complex64::new(2.0, 0.0), 1e-10),
        (Complex64::new(3.0, 0.0), 1e-10),
        (Complex64::new(2.0, 5.0), 1e-8),
    ]
}

pub fn mellin_zeta_report(points: &[(Complex64, f64)]) -> Result<BoundScanReport> {
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|&(s, _)| check_mellin_zeta(s))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = residuals.iter().zip(points).map(|(r, p)| r / p.1).collect();
    let (i, worst) = argmax(&ratios);
    Ok(BoundScanReport::new(
        LemmaId::MellinZeta,
        vec![
            ("sigma", points.iter().map(|p| p.0.re).collect()),
            ("t", points.iter().map(|p| p.0.im).collect()),
            ("tol", points.iter().map(|p| p.1).collect()),
        ],
        worst,
        1.0,
        vec![("sigma", points[i].0.re), ("t", points[i].0.im), ("residual", residuals[i])],
    ))
}

/// Constant of the `δ`-bound `|F(δ + ωx)| ≤ C/δ`.
pub const LEMMA_DELTA_CONSTANT: f64 = 2.0 / 3.0;

/// Largest `δ·|F(δ + ωx)|` over the grid; passes when `≤ 2/3`.
pub fn scan_lemma_delta(deltas: &[f64], xs: &[f64]) -> Result<BoundScanReport> {
    if deltas.iter().any(|d| !(*d > 0.0)) || xs.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::domain("scan_lemma_delta", "need deltas > 0 and xs >= 0"));
    }
    let samples: Vec<(f64, f64, f64)> = deltas
        .par_iter()
        .flat_map_iter(|&d| xs.iter().map(move |&x| (d, x, f_kernel(d + OMEGA * x).norm() * d)))
        .collect();
    let values: Vec<f64> = samples.iter().map(|s| s.2).collect();
    let (i, worst) = argmax(&values);
    let mut report = BoundScanReport::new(
        LemmaId::LemmaDelta,
        vec![("delta", deltas.to_vec()), ("x", xs.to_vec())],
        worst,
        LEMMA_DELTA_CONSTANT,
        vec![("delta", samples[i].0), ("x", samples[i].1)],
    );
    report.groups = deltas
        .iter()
        .map(|&d| GroupWorst {
            param: d,
            worst: samples.iter().filter(|s| s.0 == d).map(|s| s.2).fold(0.0, f64::max),
        })
        .collect();
    Ok(report)
}

/// Midpoint grid of `n` points in `(0, r)`.
fn open_grid(r: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| r * (j as f64 + 0.5) / n as f64).collect()
}

fn scan_vertical(
    lemma: LemmaId,
    rs: &[f64],
    n_x: usize,
    weight: impl Fn(f64, f64) -> f64 + Sync,
) -> Result<BoundScanReport> {
    if rs.iter().any(|r| !(*r >= 8.0)) || n_x == 0 {
        return Err(Error::domain("scan_lemma_r", "need every R >= 8 and n_x > 0"));
    }
    let per_r: Vec<(f64, f64)> = rs
        .par_iter()
        .map(|&r| {
            open_grid(r, n_x)
                .into_iter()
                .map(|x| (x, f_kernel(Complex64::new(r, x)).norm() / weight(r, x)))
                .fold((0.0, 0.0), |best, s| if s.1 > best.1 { s } else { best })
        })
        .collect();
    let worsts: Vec<f64> = per_r.iter().map(|p| p.1).collect();
    let (i, worst) = argmax(&worsts);
    let least = worsts.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = BoundScanReport::new(
        lemma,
        vec![("R", rs.to_vec()), ("n_x", vec![n_x as f64])],
        worst,
        2.0 * least,
        vec![("R", rs[i]), ("x", per_r[i].0)],
    );
    report.groups = rs
        .iter()
        .zip(&worsts)
        .map(|(&param, &worst)| GroupWorst { param, worst })
        .collect();
    Ok(report)
}

/// Empirical constant of `|F(R + ix)| ≤ C·R`, `0 < x < R`, per R.
pub fn scan_lemma_r(rs: &[f64], n_x: usize) -> Result<BoundScanReport> {
    scan_vertical(LemmaId::LemmaR, rs, n_x, |r, _| r)
}

/// Empirical constant of `|F(R + ix)| ≤ C·min(R, 1/(R - x))`, per R.
pub fn scan_lemma_min(rs: &[f64], n_x: usize) -> Result<BoundScanReport> {
    scan_vertical(LemmaId::LemmaMin, rs, n_x, |r, x| r.min(1.0 / (r - x)))
}

/// `2^{5/4} / |sin(ρt/2)| · (πρ/(ρ-1))^{1/2}`
pub fn k2_bound(t: f64, rho: f64) -> f64 {
    2f64.powf(1.25) / (0.5 * rho * t).sin().abs() * (PI * rho / (rho - 1.0)).sqrt()
}

/// Largest `|K2| / bound` over the grid; passes when `≤ 1`.
pub fn scan_k2_bound(ts: &[f64], rhos: &[f64], tol: f64) -> Result<BoundScanReport> {
    let pairs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| rhos.iter().map(move |&r| (t, r))).collect();
    if let Some(&(t, r)) = pairs.iter().find(|(t, r)| !(*r > 1.0 && r * t > PI && *t > 0.0)) {
        return Err(Error::domain(
            "scan_k2_bound",
            format!("need t > 0, rho > 1, rho t > pi; got t = {t}, rho = {r}"),
        ));
    }
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|&(t, r)| Ok(k2(t, r, tol)?.value.norm() / k2_bound(t, r)))
        .collect::<Result<_>>()?;
    let (i, worst) = argmax(&ratios);
    Ok(BoundScanReport::new(
        LemmaId::K2Bound,
        vec![("t", ts.to_vec()), ("rho", rhos.to_vec())],
        worst,
        1.0,
        vec![("t", pairs[i].0), ("rho", pairs[i].1)],
    ))
}

/// `|∫_R^{R+ia} z^{s-1} F(z) dz|` at `s = 1/2 + it`.
pub fn segment_integral(r: f64, a: Complex64, t: f64, tol: f64) -> Result<f64> {
    let e = Complex64::new(-0.5, t);
    let z0 = Complex64::new(r, 0.0);
    let v = Quad::new(tol)
        .abs_floor(0.0)
        .segment(|z| cexp(e * z.ln()) * f_kernel(z), z0, z0 + I * a)?;
    Ok(v.value.norm())
}

/// `2 R^{-1/2} e^{π|t|/2} e^{-πR} |a|`
pub fn segment_bound(r: f64, a: Complex64, t: f64) -> f64 {
    2.0 / r.sqrt() * (0.5 * PI * t.abs() - PI * r).exp() * a.norm()
}

/// Largest ratio of the vertical-segment integral to its bound.
///
/// `a` is the (real) height of the segment `[R, R + ia]`; complex values
/// are accepted and give the segment `[R, R + i·a]`.
pub fn scan_segment_decay(rs: &[f64], a: Complex64, t: f64, tol: f64) -> Result<BoundScanReport> {
    if rs.iter().any(|r| !(*r >= 8.0)) || a.norm() > 2.0 {
        return Err(Error::domain("scan_segment_decay", "need R >= 8 and |a| <= 2"));
    }
    let ratios: Vec<f64> = rs
        .par_iter()
        .map(|&r| {
            let b = segment_bound(r, a, t);
            if b == 0.0 {
                return Ok(0.0);
            }
            Ok(segment_integral(r, a, t, tol)? / b)
        })
        .collect::<Result<_>>()?;
    let (i, worst) = argmax(&ratios);
    let mut report = BoundScanReport::new(
        LemmaId::SegmentDecay,
        vec![("R", rs.to_vec()), ("a_re", vec![a.re]), ("a_im", vec![a.im]), ("t", vec![t])],
        worst.max(0.0),
        1.0,
        vec![("R", rs[i])],
    );
    report.groups = rs
        .iter()
        .zip(&ratios)
        .map(|(&param, &worst)| GroupWorst { param, worst })
        .collect();
    Ok(report)
}

/// Least-squares slope of `(x, y)` samples.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `log|F(y)|` on `[y0, y1]` against `-π√2`; passes within 1%.
pub fn decay_slope_window(y0: f64, y1: f64, n: usize) -> Result<BoundScanReport> {
    if !(y1 > y0) || n < 2 {
        return Err(Error::domain("decay_slope", "need y1 > y0 and n >= 2"));
    }
    let ys: Vec<f64> = (0..n).map(|j| y0 + (y1 - y0) * j as f64 / (n - 1) as f64).collect();
    let logs: Vec<f64> = ys.iter().map(|&y| f_kernel(Complex64::new(y, 0.0)).norm().ln()).collect();
    let slope = ls_slope(&ys, &logs);
    let target = -PI * SQRT_2;
    Ok(BoundScanReport::new(
        LemmaId::DecaySlope,
        vec![("y", vec![y0, y1]), ("n", vec![n as f64])],
        (slope / target - 1.0).abs(),
        0.01,
        vec![("slope", slope)],
    ))
}

/// [`decay_slope_window`] on `[5, 10]` with 101 samples.
pub fn decay_slope() -> Result<BoundScanReport> {
    decay_slope_window(5.0, 10.0, 101)
}

/// Which scans to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaSelector {
    All,
    Delta,
    /// Both bounds on `F(R + ix)`.
    R,
    K2,
    Segment,
    Siegel,
    Mellin,
    Decay,
}

impl LemmaSelector {
    pub const NAMES: [&'static str; 8] = ["all", "delta", "R", "k2", "segment", "siegel", "mellin", "decay"];
}

impl FromStr for LemmaSelector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "all" => LemmaSelector::All,
            "delta" => LemmaSelector::Delta,
            "R" | "r" => LemmaSelector::R,
            "k2" => LemmaSelector::K2,
            "segment" => LemmaSelector::Segment,
            "siegel" => LemmaSelector::Siegel,
            "mellin" => LemmaSelector::Mellin,
            "decay" => LemmaSelector::Decay,
            _ => {
                return Err(format!(
                    "unknown lemma `{s}` (expected one of {})",
                    Self::NAMES.join(", ")
                ))
            }
        })
    }
}

impl fmt::Display for LemmaSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            LemmaSelector::All => 0,
            LemmaSelector::Delta => 1,
            LemmaSelector::R => 2,
            LemmaSelector::K2 => 3,
            LemmaSelector::Segment => 4,
            LemmaSelector::Siegel => 5,
            LemmaSelector::Mellin => 6,
            LemmaSelector::Decay => 7,
        };
        f.write_str(Self::NAMES[i])
    }
}

pub const DEFAULT_DELTAS: [f64; 8] = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
pub const DEFAULT_RS: [f64; 3] = [10.0, 16.0, 24.0];
pub const DEFAULT_N_X: usize = 1000;
pub const DEFAULT_K2_TS: [f64; 3] = [5.0, 10.0, 20.0];
pub const DEFAULT_K2_RHOS: [f64; 3] = [1.5, 2.0, 3.0];
pub const DEFAULT_SEGMENT_RS: [f64; 4] = [8.0, 10.0, 12.0, 16.0];

/// `x ∈ [0, 20]`, step 0.1.
pub fn default_delta_xs() -> Vec<f64> {
    (0..=200).map(|j| j as f64 * 0.1).collect()
}

/// Run the selected scans on their default grids, in a fixed order.
pub fn run(selector: LemmaSelector, tol: f64) -> Result<Vec<BoundScanReport>> {
    use LemmaSelector as L;
    let wants = |l: L| selector == L::All || selector == l;
    let mut out = Vec::new();
    if wants(L::Siegel) {
        out.push(siegel_identity_report(&SIEGEL_YS, SIEGEL_TOL)?);
    }
    if wants(L::Mellin) {
        out.push(mellin_zeta_report(&mellin_default_points())?);
    }
    if wants(L::Delta) {
        out.push(scan_lemma_delta(&DEFAULT_DELTAS, &default_delta_xs())?);
    }
    if wants(L::R) {
        out.push(scan_lemma_r(&DEFAULT_RS, DEFAULT_N_X)?);
        out.push(scan_lemma_min(&DEFAULT_RS, DEFAULT_N_X)?);
    }
    if wants(L::K2) {
        out.push(scan_k2_bound(&DEFAULT_K2_TS, &DEFAULT_K2_RHOS, tol)?);
    }
    if wants(L::Segment) {
        out.push(scan_segment_decay(&DEFAULT_SEGMENT_RS, I, 5.0, tol)?);
    }
    if wants(L::Decay) {
        out.push(decay_slope()?);
    }
    Ok(out)
}
