//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). A criterion listed in
//! `KNOWN_RED` still prints FAIL when it fails, with its numbers, but does
//! not fail the process; any other failure does.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use riemann_aux::integrand::KernelId;
use riemann_aux::repr::{
    critical_prefactor, critical_prefactor_gamma, r_contour, r_critical, r_direct, r_gabcke, r_k1k2, r_left,
    r_main, r_siegel_sin, z_from_r, zeta_from_r, zeta_from_r_eval,
};
use riemann_aux::special::{chi, log_gamma, theta, OMEGA};
use riemann_aux::verify::{self, BoundScanReport};
use riemann_aux::xray::{self, GridSpec, RenderFormat, Target};
use riemann_aux::zeta_ref::{z_function, zeta_em};
use riemann_aux::{EvalResult, Result};

const QUAD_TOL: f64 = 1e-10;

const COHERENCE_TOL: f64 = 1e-7;
const COHERENCE_TOL_HIGH_T: f64 = 1e-5;
const COHERENCE_RUNTIME: Duration = Duration::from_secs(120);
const LEFT_TOL: f64 = 1e-8;
const ZETA_TOL: f64 = 1e-7;
const ZETA2_TOL: f64 = 1e-9;
const ZETA3_TOL: f64 = 1e-8;
const ZETA3: f64 = 1.202_056_903_2;
const CRITICAL_TOL: f64 = 1e-6;
const HARDY_TOL: f64 = 1e-6;
const FIRST_ZERO: f64 = 14.134_725;
const FIRST_ZERO_BRACKET: f64 = 1e-4;
const K1K2_TOL: f64 = 1e-6;
const SIEGEL_IDENTITY_TOL: f64 = 1e-10;
const MELLIN_TOL_REAL: f64 = 1e-10;
const MELLIN_TOL_COMPLEX: f64 = 1e-8;
const THETA_CHI_TOL: f64 = 1e-11;
const PREFACTOR_TOL: f64 = 1e-10;
const XRAY_ZERO_DIST: f64 = 0.1;
const XRAY_MAX_K: i64 = 30;
const HONESTY_FACTOR: f64 = 3.0;
const HONESTY_FRACTION: f64 = 0.95;

/// Criteria allowed to be red; see the project notes for the analysis.
const KNOWN_RED: &[u32] = &[7];

#[allow(clippy::excessive_precision, clippy::approx_constant)]
/// R(s) on the acceptance points, from an independent 40-digit quadrature
/// of the Siegel-line integral (mpmath).
const R_REF: &[(f64, f64, f64, f64)] = &[
    (0.25, 0.0, -0.617005609585185486, -0.0866456712805785758),
    (0.25, 1.0, -0.246470405113812231, -0.342796370006501803),
    (0.25, 5.0, 0.413388441007138117, -0.127046284584939989),
    (0.25, 10.0, 0.78288011514167742, 0.253088207524043387),
    (0.25, 20.0, 0.885439643380206948, -0.294198177068952921),
    (0.5, 0.0, -0.730177254404793406, -0.208465086452002429),
    (0.5, 1.0, -0.268456180164962222, -0.428906800616080703),
    (0.5, 5.0, 0.437267672054272348, -0.146816877332594617),
    (0.5, 10.0, 0.793999477371031999, 0.231012165037723659),
    (0.5, 20.0, 0.896947953085962875, -0.256659720660625715),
    (1.0, 0.0, -0.908395501242203012, -0.559900213294351561),
    (1.0, 1.0, -0.278268659883268399, -0.638096351668116102),
    (1.0, 5.0, 0.488375644041305408, -0.185050334700460677),
    (1.0, 10.0, 0.814574867924553013, 0.190446652211120276),
    (1.0, 20.0, 0.91754197718788617, -0.195282428021912986),
    (2.0, 0.0, -0.822467033424113218, -1.57079632679489662),
    (2.0, 1.0, -0.0784323835915163527, -1.13630235143101271),
    (2.0, 5.0, 0.603873292587325021, -0.249733892299569673),
    (2.0, 10.0, 0.850838857113097368, 0.123031657009068027),
    (2.0, 20.0, 0.949220938372813049, -0.112939242016357257),
    (0.5, 30.0, 0.940863753539179626, -0.498779056541094274),
    (-1.0, 0.0, -0.125, 0.0795774715459476679),
    (-2.0, 5.0, 0.23450199686610291, 0.037746492449406078),
    (-0.5, -3.0, 6.89791321613342061, 3.67865674281994724),
    (0.5, 14.134725, 1.17289210466064325, 0.18672297536837045),
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r_ref(s: Complex64) -> Complex64 {
    R_REF
        .iter()
        .find(|r| r.0 == s.re && r.1 == s.im)
        .map(|r| c(r.2, r.3))
        .unwrap_or_else(|| panic!("no reference value for {s}"))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

/// One `(deviation from oracle, reported abs_err)` pair.
struct Sample {
    label: String,
    deviation: f64,
    abs_err: f64,
}

#[derive(Default)]
struct Honesty(Vec<Sample>);

impl Honesty {
    fn push(&mut self, label: impl Into<String>, r: &EvalResult, oracle: Complex64) {
        self.0.push(Sample {
            label: label.into(),
            deviation: (r.value - oracle).norm(),
            abs_err: r.abs_err,
        });
    }
}

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn ok_or_fail<T>(r: Result<T>, what: &str, failures: &mut Vec<String>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            failures.push(format!("{what}: {e}"));
            None
        }
    }
}

fn coherence(h: &mut Honesty) -> Line {
    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    let mut worst_high = (0.0f64, String::new());
    let mut failures = Vec::new();
    let mut points: Vec<Complex64> = Vec::new();
    for sigma in [0.25, 0.5, 1.0, 2.0] {
        for t in [0.0, 1.0, 5.0, 10.0, 20.0] {
            points.push(c(sigma, t));
        }
    }
    points.push(c(0.5, 30.0));
    for s in points {
        let a = c(0.5, 0.5);
        let evals = [
            ("main", r_main(s, QUAD_TOL)),
            ("direct", r_direct(s, QUAD_TOL)),
            ("gabcke", r_gabcke(s, QUAD_TOL)),
            ("contour", r_contour(s, a, QUAD_TOL)),
        ];
        let mut values = Vec::new();
        for (name, r) in evals {
            if let Some(r) = ok_or_fail(r, &format!("{name}({s})"), &mut failures) {
                h.push(format!("{name}({s})"), &r, r_ref(s));
                values.push((name, r.value));
            }
        }
        let tol = if s.im >= 20.0 { COHERENCE_TOL_HIGH_T } else { COHERENCE_TOL };
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let d = rel(values[i].1, values[j].1);
                let tag = format!("{} vs {} at {s}: {d:.2e}", values[i].0, values[j].0);
                let slot = if s.im >= 20.0 { &mut worst_high } else { &mut worst };
                if d > slot.0 {
                    *slot = (d, tag.clone());
                }
                if d > tol {
                    failures.push(tag);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > COHERENCE_RUNTIME {
        failures.push(format!("runtime {elapsed:?} > {COHERENCE_RUNTIME:?}"));
    }
    Line {
        id: 1,
        name: "cross-representation coherence",
        pass: failures.is_empty(),
        detail: format!(
            "worst t<20 {} (tol {COHERENCE_TOL:e}); worst t>=20 {} (tol {COHERENCE_TOL_HIGH_T:e}); {:.1}s{}",
            worst.1,
            worst_high.1,
            elapsed.as_secs_f64(),
            fmt_failures(&failures)
        ),
    }
}

fn fmt_failures(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", f.join(" | "))
    }
}

fn left_half_plane(h: &mut Honesty) -> Line {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for s in [c(-1.0, 0.0), c(-2.0, 5.0), c(-0.5, -3.0)] {
        let l = ok_or_fail(r_left(s, QUAD_TOL), &format!("left({s})"), &mut failures);
        let g = ok_or_fail(r_siegel_sin(s, QUAD_TOL), &format!("siegel-sin({s})"), &mut failures);
        if let (Some(l), Some(g)) = (l, g) {
            h.push(format!("left({s})"), &l, r_ref(s));
            h.push(format!("siegel-sin({s})"), &g, r_ref(s));
            let d = rel(l.value, g.value);
            worst = worst.max(d);
            if d > LEFT_TOL {
                failures.push(format!("{s}: {d:.2e}"));
            }
        }
    }
    Line {
        id: 2,
        name: "left half-plane",
        pass: failures.is_empty(),
        detail: format!("worst relative difference {worst:.2e} (tol {LEFT_TOL:e}){}", fmt_failures(&failures)),
    }
}

fn functional_identity(h: &mut Honesty) -> Line {
    let mut failures = Vec::new();
    let mut worst = (0.0f64, c(0.0, 0.0));
    for sigma in [-1.0, -0.5, 0.3, 0.5, 1.5, 2.0] {
        for t in [0.0, 2.0, 10.0, 20.0] {
            let s = c(sigma, t);
            let a = ok_or_fail(zeta_from_r_eval(s, QUAD_TOL), &format!("zeta_from_r({s})"), &mut failures);
            let b = ok_or_fail(zeta_em(s), &format!("zeta_em({s})"), &mut failures);
            if let (Some(a), Some(b)) = (a, b) {
                h.push(format!("zeta_from_r({s})"), &a, b);
                let d = (a.value - b).norm();
                if d > worst.0 {
                    worst = (d, s);
                }
                if d > ZETA_TOL {
                    failures.push(format!("{s}: {d:.2e}"));
                }
            }
        }
    }
    let z2 = zeta_from_r(c(2.0, 0.0), QUAD_TOL).map(|z| (z - PI * PI / 6.0).norm());
    let z3 = zeta_from_r(c(3.0, 0.0), QUAD_TOL).map(|z| (z - ZETA3).norm());
    let (d2, d3) = match (z2, z3) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            failures.push(format!("zeta_from_r(2) = {a:?}, zeta_from_r(3) = {b:?}"));
            (f64::NAN, f64::NAN)
        }
    };
    if !(d2 <= ZETA2_TOL) {
        failures.push(format!("zeta(2): {d2:.2e}"));
    }
    if !(d3 <= ZETA3_TOL) {
        failures.push(format!("zeta(3): {d3:.2e}"));
    }
    Line {
        id: 3,
        name: "functional identity",
        pass: failures.is_empty(),
        detail: format!(
            "worst |zeta_from_r - zeta_em| {:.2e} at {} (tol {ZETA_TOL:e}); zeta(2) {d2:.2e}, zeta(3) {d3:.2e}{}",
            worst.0,
            worst.1,
            fmt_failures(&failures)
        ),
    }
}

fn critical_line(h: &mut Honesty) -> Line {
    let mut failures = Vec::new();
    let (mut worst_rel, mut worst_z) = (0.0f64, 0.0f64);
    for t in [1.0, 5.0, 10.0, FIRST_ZERO, 20.0] {
        let s = c(0.5, t);
        let crit = ok_or_fail(r_critical(t, QUAD_TOL), &format!("critical({t})"), &mut failures);
        let main = ok_or_fail(r_main(s, QUAD_TOL), &format!("main({s})"), &mut failures);
        let (Some(crit), Some(main)) = (crit, main) else { continue };
        h.push(format!("critical({t})"), &crit, r_ref(s));
        let d = rel(crit.value, main.value);
        worst_rel = worst_rel.max(d);
        if d > CRITICAL_TOL {
            failures.push(format!("critical vs main at t={t}: {d:.2e}"));
        }
        match (z_from_r(t, crit.value), z_function(t)) {
            (Ok(a), Ok(b)) => {
                let dz = (a - b).abs();
                worst_z = worst_z.max(dz);
                if dz > HARDY_TOL {
                    failures.push(format!("Z at t={t}: {dz:.2e}"));
                }
            }
            (a, b) => failures.push(format!("Z at t={t}: {a:?} {b:?}")),
        }
    }
    let z_at = |t: f64| r_critical(t, QUAD_TOL).and_then(|r| z_from_r(t, r.value));
    let bracket = match (z_at(FIRST_ZERO - FIRST_ZERO_BRACKET), z_at(FIRST_ZERO + FIRST_ZERO_BRACKET)) {
        (Ok(a), Ok(b)) => {
            if a * b >= 0.0 {
                failures.push(format!("no sign change of Z: {a:e}, {b:e}"));
            }
            format!("Z({FIRST_ZERO}∓{FIRST_ZERO_BRACKET:e}) = {a:.2e}, {b:.2e}")
        }
        (a, b) => {
            failures.push(format!("Z bracket: {a:?} {b:?}"));
            String::new()
        }
    };
    Line {
        id: 4,
        name: "critical line",
        pass: failures.is_empty(),
        detail: format!(
            "worst critical vs main {worst_rel:.2e} (tol {CRITICAL_TOL:e}); worst |2Re(e^(i theta)R) - Z| {worst_z:.2e} (tol {HARDY_TOL:e}); {bracket}{}",
            fmt_failures(&failures)
        ),
    }
}

fn k1k2_split(h: &mut Honesty) -> Line {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for t in verify::DEFAULT_K2_TS {
        let s = c(0.5, t);
        let Some(main) = ok_or_fail(r_main(s, QUAD_TOL), &format!("main({s})"), &mut failures) else { continue };
        for rho in verify::DEFAULT_K2_RHOS {
            let Some(k) = ok_or_fail(r_k1k2(t, rho, QUAD_TOL), &format!("k1k2({t}, {rho})"), &mut failures) else {
                continue;
            };
            h.push(format!("k1k2(t={t}, rho={rho})"), &k.eval_result(), r_ref(s));
            let d = rel(k.value, main.value);
            worst = worst.max(d);
            if d > K1K2_TOL {
                failures.push(format!("t={t} rho={rho}: {d:.2e}"));
            }
        }
    }
    let bound = verify::scan_k2_bound(&verify::DEFAULT_K2_TS, &verify::DEFAULT_K2_RHOS, QUAD_TOL);
    let bound_detail = match bound {
        Ok(r) => {
            if !r.pass {
                failures.push(format!("K2 bound ratio {:.3}", r.worst_ratio));
            }
            format!("worst |K2|/bound {:.3}", r.worst_ratio)
        }
        Err(e) => {
            failures.push(format!("K2 scan: {e}"));
            String::new()
        }
    };
    Line {
        id: 5,
        name: "K1/K2 split",
        pass: failures.is_empty(),
        detail: format!("worst vs main {worst:.2e} (tol {K1K2_TOL:e}); {bound_detail}{}", fmt_failures(&failures)),
    }
}

fn identity_residuals(h: &mut Honesty) -> Line {
    let mut failures = Vec::new();
    let mut worst_siegel = 0.0f64;
    for y in verify::SIEGEL_YS {
        match verify::siegel_identity_lhs(y, verify::CHECK_TOL) {
            Ok(lhs) => {
                let rhs = verify::siegel_identity_rhs(y);
                h.push(format!("siegel identity y={y}"), &lhs, rhs);
                let d = (lhs.value - rhs).norm();
                worst_siegel = worst_siegel.max(d);
                if d > SIEGEL_IDENTITY_TOL {
                    failures.push(format!("siegel y={y}: {d:.2e}"));
                }
            }
            Err(e) => failures.push(format!("siegel y={y}: {e}")),
        }
    }
    let mut mellin = Vec::new();
    for (s, tol) in [(c(2.0, 0.0), MELLIN_TOL_REAL), (c(2.0, 5.0), MELLIN_TOL_COMPLEX)] {
        match (verify::mellin_zeta_lhs(s, verify::CHECK_TOL), verify::mellin_zeta_rhs(s)) {
            (Ok(lhs), Ok(rhs)) => {
                h.push(format!("mellin identity s={s}"), &lhs, rhs);
                let d = (lhs.value - rhs).norm();
                mellin.push(format!("{s}: {d:.2e}"));
                if d > tol {
                    failures.push(format!("mellin {s}: {d:.2e} > {tol:e}"));
                }
            }
            (a, b) => failures.push(format!("mellin {s}: {:?} {:?}", a.err(), b.err())),
        }
    }
    let rhs2 = verify::mellin_zeta_rhs(c(2.0, 0.0)).map(|v| (v - c(0.0, 1.0 / 24.0)).norm());
    if !matches!(rhs2, Ok(d) if d < 1e-14) {
        failures.push(format!("mellin rhs(2) != i/24: {rhs2:?}"));
    }
    Line {
        id: 6,
        name: "identity residuals",
        pass: failures.is_empty(),
        detail: format!(
            "siegel worst {worst_siegel:.2e} (tol {SIEGEL_IDENTITY_TOL:e}); mellin {}{}",
            mellin.join(", "),
            fmt_failures(&failures)
        ),
    }
}

fn groups(r: &BoundScanReport) -> String {
    r.groups
        .iter()
        .map(|g| format!("R={}: {:.4}", g.param, g.worst))
        .collect::<Vec<_>>()
        .join(", ")
}

fn bound_lemmas() -> Line {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    match verify::scan_lemma_delta(&verify::DEFAULT_DELTAS, &verify::default_delta_xs()) {
        Ok(r) => {
            parts.push(format!("delta worst {:.4} <= 2/3", r.worst_ratio));
            if !r.pass || r.bound_constant != 2.0 / 3.0 {
                failures.push(format!("delta {:.4}", r.worst_ratio));
            }
        }
        Err(e) => failures.push(format!("delta: {e}")),
    }
    for (name, scan) in [
        ("|F|/R", verify::scan_lemma_r(&verify::DEFAULT_RS, verify::DEFAULT_N_X)),
        ("|F|/min(R,1/(R-x))", verify::scan_lemma_min(&verify::DEFAULT_RS, verify::DEFAULT_N_X)),
    ] {
        match scan {
            Ok(r) => {
                let lo = r.groups.iter().map(|g| g.worst).fold(f64::INFINITY, f64::min);
                let spread = r.worst_ratio / lo;
                parts.push(format!("{name} [{}] spread {spread:.2}", groups(&r)));
                if !r.worst_ratio.is_finite() {
                    failures.push(format!("{name} unbounded"));
                }
                if !r.pass {
                    failures.push(format!("{name} not stable within factor 2 (spread {spread:.2})"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    match verify::scan_segment_decay(&verify::DEFAULT_SEGMENT_RS, c(0.0, 1.0), 5.0, QUAD_TOL) {
        Ok(r) => {
            parts.push(format!("segment worst |integral|/bound {:.2e}", r.worst_ratio));
            if !r.pass {
                failures.push(format!("segment {:.3}", r.worst_ratio));
            }
        }
        Err(e) => failures.push(format!("segment: {e}")),
    }
    match verify::decay_slope() {
        Ok(r) => {
            let slope = r.worst_at.get("slope").copied().unwrap_or(f64::NAN);
            parts.push(format!("decay slope {slope:.5} vs {:.5}", -PI * SQRT_2));
            if !r.pass || !((slope / (-PI * SQRT_2) - 1.0).abs() <= 0.01) {
                failures.push(format!("slope {slope}"));
            }
        }
        Err(e) => failures.push(format!("decay: {e}")),
    }
    Line {
        id: 7,
        name: "bound lemmas",
        pass: failures.is_empty(),
        detail: format!("{}{}", parts.join("; "), fmt_failures(&failures)),
    }
}

fn prefactors() -> Line {
    let mut failures = Vec::new();
    let mut worst_chi = 0.0f64;
    for t in [0.5, 1.0, 5.0, 10.0, FIRST_ZERO, 20.0, 30.0, 50.0] {
        match (theta(t), chi(c(0.5, t))) {
            (Ok(th), Ok(x)) => worst_chi = worst_chi.max((Complex64::from_polar(1.0, -2.0 * th) - x).norm()),
            (a, b) => failures.push(format!("t={t}: {a:?} {b:?}")),
        }
    }
    if worst_chi > THETA_CHI_TOL {
        failures.push(format!("theta vs chi {worst_chi:.2e}"));
    }
    let mut worst_pre = 0.0f64;
    for k in 1..=200 {
        let t = 0.25 * k as f64;
        match (critical_prefactor(t), critical_prefactor_gamma(t)) {
            (Ok(a), Ok(b)) => worst_pre = worst_pre.max((a - b).norm()),
            (a, b) => failures.push(format!("prefactor t={t}: {a:?} {b:?}")),
        }
    }
    if worst_pre > PREFACTOR_TOL {
        failures.push(format!("prefactor identity {worst_pre:.2e}"));
    }
    let mut worst_stirling = 0.0f64;
    for k in 0..=80 {
        let t = 10.0 + 0.5 * k as f64;
        match log_gamma(c(0.5, t)) {
            Ok(lg) => {
                let ratio = (-PI * t / 2.0 - lg.re).exp() * (2.0 * PI).sqrt();
                let dev = (ratio - 1.0).abs() * t / 2.0;
                worst_stirling = worst_stirling.max(dev);
                if dev > 1.0 {
                    failures.push(format!("Stirling ratio {ratio} at t={t}"));
                }
            }
            Err(e) => failures.push(format!("log_gamma: {e}")),
        }
    }
    Line {
        id: 8,
        name: "prefactor identities",
        pass: failures.is_empty(),
        detail: format!(
            "theta vs chi {worst_chi:.2e} (tol {THETA_CHI_TOL:e}); prefactor forms {worst_pre:.2e} (tol {PREFACTOR_TOL:e}); Stirling |ratio-1|/(2/t) max {worst_stirling:.2e}{}",
            fmt_failures(&failures)
        ),
    }
}

/// Roots of `z² - ωz + 2ik = 0`.
fn family_roots(k: i64) -> [Complex64; 2] {
    let d = (OMEGA * OMEGA - 8.0 * c(0.0, k as f64)).sqrt();
    [(OMEGA + d) / 2.0, (OMEGA - d) / 2.0]
}

/// For `k = -m(m-1)/2` both roots are lattice points `mω`, where F is 1/2 - m.
fn lattice_family(k: i64) -> bool {
    (-40..=40).any(|m: i64| -m * (m - 1) / 2 == k)
}

/// Polyline count, zeros, SVG bytes, CSV bytes.
type XrayRun = (usize, Vec<Complex64>, Vec<u8>, Vec<u8>);

fn xray_figure() -> Line {
    let mut failures = Vec::new();
    let grid = GridSpec::standard();
    let start = Instant::now();
    let run = || -> Result<XrayRun> {
        let (_, curves) = xray::xray(Target::Kernel(KernelId::FMain), &grid, QUAD_TOL)?;
        let svg = xray::render(&curves, &grid, RenderFormat::Svg)?;
        let csv = xray::render(&curves, &grid, RenderFormat::Csv)?;
        Ok((curves.re_zero.len() + curves.im_zero.len(), curves.zeros, svg, csv))
    };
    let (first, second) = match (run(), run()) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            return Line {
                id: 9,
                name: "x-ray",
                pass: false,
                detail: format!("{:?} {:?}", a.err(), b.err()),
            }
        }
    };
    let elapsed = start.elapsed();
    if first.2 != second.2 || first.3 != second.3 {
        failures.push("output differs between runs".into());
    }
    let zeros = &first.1;
    let mut roots = Vec::new();
    for k in -400..=400i64 {
        if k != 0 {
            roots.extend(family_roots(k).map(|r| (k, r)));
        }
    }
    let mut worst = 0.0f64;
    for z in zeros {
        let d = roots.iter().map(|(_, r)| (r - z).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
        if d > XRAY_ZERO_DIST {
            failures.push(format!("zero {z} is {d:.3} from every family root"));
        }
    }
    let mut expected = 0;
    for (k, r) in &roots {
        if k.abs() > XRAY_MAX_K || lattice_family(*k) || !grid.contains(*r) {
            continue;
        }
        expected += 1;
        if !zeros.iter().any(|z| (z - r).norm() <= XRAY_ZERO_DIST) {
            failures.push(format!("root {r} (k={k}) not detected"));
        }
    }
    Line {
        id: 9,
        name: "x-ray",
        pass: failures.is_empty(),
        detail: format!(
            "{} zeros, {} polylines, worst distance to a family root {worst:.2e}; {expected} roots with |k| <= {XRAY_MAX_K} expected; two runs {:.1}s{}",
            zeros.len(),
            first.0,
            elapsed.as_secs_f64(),
            fmt_failures(&failures)
        ),
    }
}

fn error_honesty(h: &Honesty) -> Line {
    let honest = h
        .0
        .iter()
        .filter(|s| s.deviation <= HONESTY_FACTOR * s.abs_err)
        .count();
    let frac = honest as f64 / h.0.len().max(1) as f64;
    let offenders: Vec<String> = h
        .0
        .iter()
        .filter(|s| s.deviation > HONESTY_FACTOR * s.abs_err)
        .map(|s| format!("{} dev {:.1e} err {:.1e}", s.label, s.deviation, s.abs_err))
        .collect();
    Line {
        id: 10,
        name: "error honesty",
        pass: !h.0.is_empty() && frac >= HONESTY_FRACTION,
        detail: format!(
            "{honest}/{} within {HONESTY_FACTOR} x abs_err ({:.1}%, need {:.0}%){}",
            h.0.len(),
            100.0 * frac,
            100.0 * HONESTY_FRACTION,
            if offenders.is_empty() {
                String::new()
            } else {
                format!("; outside: {}", offenders.join(" | "))
            }
        ),
    }
}

fn main() {
    let start = Instant::now();
    let mut h = Honesty::default();
    let lines = vec![
        coherence(&mut h),
        left_half_plane(&mut h),
        functional_identity(&mut h),
        critical_line(&mut h),
        k1k2_split(&mut h),
        identity_residuals(&mut h),
        bound_lemmas(),
        prefactors(),
        xray_figure(),
    ];
    let mut lines = lines;
    lines.push(error_honesty(&h));
    let mut unexpected = 0;
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {}: {}", l.id, l.name, l.detail);
        if !l.pass && !KNOWN_RED.contains(&l.id) {
            unexpected += 1;
        }
    }
    let red: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!(
        "acceptance: {}/{} pass, red {:?} (known red {:?}), {:.1}s",
        lines.len() - red.len(),
        lines.len(),
        red,
        KNOWN_RED,
        start.elapsed().as_secs_f64()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
