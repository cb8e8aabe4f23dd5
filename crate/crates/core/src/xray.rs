//! X-rays of complex functions: the curves `Re f = 0` and `Im f = 0` over a
//! rectangle, whose crossings are the zeros of `f`.
//!
//! The pipeline is [`grid_eval`] (parallel over rows), [`extract_zero_curves`]
//! (marching squares plus winding-number refinement of the crossings) and
//! [`render`] to SVG, binary PPM or CSV.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{f_kernel, KernelId};
use crate::repr::{self, ReprId, ReprOptions};

/// Zero tolerance, relative to the largest corner value of the cell.
pub const ZERO_TOL: f64 = 1e-8;
/// Maximum quadrisection depth when refining a zero.
pub const MAX_BISECTIONS: usize = 60;
/// Longer side of rendered images, in pixels.
pub const IMAGE_SIZE: usize = 800;

/// Rectangular sampling grid with `nx × ny` nodes, corners included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        };
        g.validate()?;
        Ok(g)
    }

    /// 400 × 400 nodes over `(-10, 10)²`.
    pub fn standard() -> Self {
        GridSpec {
            x_min: -10.0,
            x_max: 10.0,
            y_min: -10.0,
            y_max: 10.0,
            nx: 400,
            ny: 400,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::domain(
                "GridSpec",
                format!(
                    "need finite x_min < x_max and y_min < y_max, got [{}, {}] x [{}, {}]",
                    self.x_min, self.x_max, self.y_min, self.y_max
                ),
            ));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::domain(
                "GridSpec",
                format!("need nx, ny >= 2, got {} x {}", self.nx, self.ny),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y_max
        } else {
            self.y_min + j as f64 * self.dy()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }
}

/// Functions that can be x-rayed by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Kernel(KernelId),
    Repr(ReprId),
    /// R(s) through the representation router.
    RAuto,
}

impl Target {
    /// Point evaluator; `None` marks missing data.
    pub fn evaluator(self, tol: f64) -> Result<Box<dyn Fn(Complex64) -> Option<Complex64> + Sync>> {
        match self {
            Target::Kernel(KernelId::FMain) => Ok(Box::new(|z| Some(f_kernel(z)))),
            Target::Kernel(k) => Err(Error::Unsupported {
                op: "xray",
                reason: format!("kernel {k:?} takes extra real parameters; only FMain is a function of z alone"),
            }),
            Target::Repr(id) => {
                let opts = ReprOptions {
                    tol,
                    ..ReprOptions::default()
                };
                Ok(Box::new(move |z| repr::eval(id, z, &opts).ok().map(|r| r.value)))
            }
            Target::RAuto => Ok(Box::new(move |z| repr::r_auto(z, tol).ok().map(|r| r.value))),
        }
    }
}

/// Row-major samples `values[j * nx + i] = f(x_i + i y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<Option<Complex64>>,
}

impl Field {
    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        self.values[j * self.grid.nx + i]
    }

    pub fn n_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Sample `f` on the grid. Non-finite values become missing data.
pub fn grid_eval_with<F>(f: &F, grid: &GridSpec) -> Result<Field>
where
    F: Fn(Complex64) -> Option<Complex64> + Sync + ?Sized,
{
    grid.validate()?;
    let rows: Vec<Vec<Option<Complex64>>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            (0..grid.nx)
                .map(|i| f(grid.point(i, j)).filter(|v| v.re.is_finite() && v.im.is_finite()))
                .collect()
        })
        .collect();
    Ok(Field {
        grid: *grid,
        values: rows.into_iter().flatten().collect(),
    })
}

/// Sample a registered function on the grid.
pub fn grid_eval(target: Target, grid: &GridSpec, tol: f64) -> Result<Field> {
    let f = target.evaluator(tol)?;
    grid_eval_with(f.as_ref(), grid)
}

/// Extracted zero curves and their refined crossings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct XRayCurves {
    pub re_zero: Vec<Vec<Complex64>>,
    pub im_zero: Vec<Vec<Complex64>>,
    pub zeros: Vec<Complex64>,
}

/// Grid edge: horizontal edges join `(i, j)` to `(i+1, j)`, vertical ones
/// `(i, j)` to `(i, j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

struct Segments {
    segs: Vec<(EdgeKey, EdgeKey)>,
    points: HashMap<EdgeKey, Complex64>,
    /// Cells (by index `j * (nx-1) + i`) crossed by the curve.
    cells: Vec<bool>,
}

fn marching_squares(field: &Field, part: fn(Complex64) -> f64) -> Segments {
    let g = &field.grid;
    let mut out = Segments {
        segs: Vec::new(),
        points: HashMap::new(),
        cells: vec![false; (g.nx - 1) * (g.ny - 1)],
    };
    let node = |i: usize, j: usize| field.get(i, j).map(part);
    let crossing = |key: EdgeKey, out: &mut Segments| {
        if out.points.contains_key(&key) {
            return;
        }
        let ((i0, j0), (i1, j1)) = match key {
            EdgeKey::H(i, j) => ((i, j), (i + 1, j)),
            EdgeKey::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (v0, v1) = (node(i0, j0).unwrap(), node(i1, j1).unwrap());
        let t = v0 / (v0 - v1);
        let (p0, p1) = (g.point(i0, j0), g.point(i1, j1));
        out.points.insert(key, p0 + (p1 - p0) * t);
    };
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let corners = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let v = corners.map(|c| c.unwrap());
            let pos = v.map(|x| x > 0.0);
            // bottom, right, top, left
            let edges = [EdgeKey::H(i, j), EdgeKey::V(i + 1, j), EdgeKey::H(i, j + 1), EdgeKey::V(i, j)];
            let cut = [pos[0] != pos[1], pos[1] != pos[2], pos[3] != pos[2], pos[0] != pos[3]];
            let n_cut = cut.iter().filter(|c| **c).count();
            if n_cut == 0 {
                continue;
            }
            for (k, e) in edges.iter().enumerate() {
                if cut[k] {
                    crossing(*e, &mut out);
                }
            }
            out.cells[j * (g.nx - 1) + i] = true;
            if n_cut == 2 {
                let mut it = (0..4).filter(|k| cut[*k]);
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                out.segs.push((edges[a], edges[b]));
            } else {
                // saddle: the mean of the corners decides which diagonal connects
                let centre_pos = v.iter().sum::<f64>() / 4.0 > 0.0;
                if centre_pos == pos[0] {
                    out.segs.push((edges[0], edges[1]));
                    out.segs.push((edges[2], edges[3]));
                } else {
                    out.segs.push((edges[0], edges[3]));
                    out.segs.push((edges[1], edges[2]));
                }
            }
        }
    }
    out
}

/// Join segments sharing an edge into polylines. Open chains come first, in
/// order of their first segment, then closed loops.
fn join(s: &Segments) -> Vec<Vec<Complex64>> {
    let mut by_key: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in s.segs.iter().enumerate() {
        by_key.entry(*a).or_default().push(k);
        by_key.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; s.segs.len()];
    let mut lines = Vec::new();
    let walk = |start: usize, from: EdgeKey, used: &mut Vec<bool>| {
        let mut keys = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = s.segs[seg];
            let next = if a == at { b } else { a };
            keys.push(next);
            at = next;
            match by_key[&at].iter().find(|k| !used[**k]) {
                Some(k) => seg = *k,
                None => break,
            }
        }
        keys.iter().map(|k| s.points[k]).collect::<Vec<_>>()
    };
    for k in 0..s.segs.len() {
        if used[k] {
            continue;
        }
        let (a, b) = s.segs[k];
        let end = if by_key[&a].len() == 1 {
            Some(a)
        } else if by_key[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(e) = end {
            lines.push(walk(k, e, &mut used));
        }
    }
    for k in 0..s.segs.len() {
        if !used[k] {
            let a = s.segs[k].0;
            lines.push(walk(k, a, &mut used));
        }
    }
    lines
}

fn arg_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

/// Winding number of `f` around the rectangle `[lo, hi]`, or `Err(z)` when a
/// boundary sample `z` already satisfies `|f(z)| <= tiny`.
fn winding<F>(f: &F, lo: Complex64, hi: Complex64, tiny: f64) -> std::result::Result<Option<i32>, Complex64>
where
    F: Fn(Complex64) -> Option<Complex64> + ?Sized,
{
    const PER_SIDE: usize = 8;
    const MAX_SPLIT: usize = 12;
    let corners = [
        lo,
        Complex64::new(hi.re, lo.im),
        hi,
        Complex64::new(lo.re, hi.im),
    ];
    let mut total = 0.0;
    for side in 0..4 {
        let (p, q) = (corners[side], corners[(side + 1) % 4]);
        let mut ts: Vec<f64> = (0..=PER_SIDE).map(|k| k as f64 / PER_SIDE as f64).collect();
        let mut vals = Vec::with_capacity(ts.len());
        for t in &ts {
            let z = p + (q - p) * *t;
            match f(z) {
                Some(v) if v.norm() <= tiny => return Err(z),
                Some(v) => vals.push(v),
                None => return Ok(None),
            }
        }
        // refine steps whose phase change is not clearly below π
        let mut k = 0;
        let mut splits = 0;
        while k + 1 < vals.len() {
            if arg_step(vals[k], vals[k + 1]).abs() > std::f64::consts::FRAC_PI_2 && splits < MAX_SPLIT * PER_SIDE {
                let t = 0.5 * (ts[k] + ts[k + 1]);
                let z = p + (q - p) * t;
                match f(z) {
                    Some(v) if v.norm() <= tiny => return Err(z),
                    Some(v) => {
                        ts.insert(k + 1, t);
                        vals.insert(k + 1, v);
                        splits += 1;
                    }
                    None => return Ok(None),
                }
            } else {
                total += arg_step(vals[k], vals[k + 1]);
                k += 1;
            }
        }
    }
    Ok(Some((total / std::f64::consts::TAU).round() as i32))
}

/// Quadrisection toward every zero inside `[lo, hi]`.
fn refine<F>(f: &F, lo: Complex64, hi: Complex64, tiny: f64, depth: usize, out: &mut Vec<Complex64>)
where
    F: Fn(Complex64) -> Option<Complex64> + ?Sized,
{
    let centre = 0.5 * (lo + hi);
    let scale = centre.norm().max(1.0);
    let size = (hi - lo).re.max((hi - lo).im);
    if depth >= MAX_BISECTIONS || size < 8.0 * f64::EPSILON * scale {
        if f(centre).is_some_and(|v| v.norm() <= tiny) {
            out.push(centre);
        }
        return;
    }
    let w = match winding(f, lo, hi, tiny) {
        Err(z) => {
            out.push(z);
            return;
        }
        Ok(Some(w)) => w,
        Ok(None) => return,
    };
    if w == 0 {
        return;
    }
    if let Some(v) = f(centre) {
        if v.norm() <= tiny {
            out.push(centre);
            return;
        }
    }
    let quads = [
        (lo, centre),
        (Complex64::new(centre.re, lo.im), Complex64::new(hi.re, centre.im)),
        (Complex64::new(lo.re, centre.im), Complex64::new(centre.re, hi.im)),
        (centre, hi),
    ];
    let before = out.len();
    for (a, b) in quads {
        refine(f, a, b, tiny, depth + 1, out);
        if out.len() - before >= w.unsigned_abs() as usize {
            break;
        }
    }
}

/// Marching-squares extraction of `Re f = 0` and `Im f = 0`; cells where
/// the two curves meet are refined to zeros of `f` with `|f| < ZERO_TOL` times
/// the largest corner modulus of the cell.
pub fn extract_zero_curves<F>(field: &Field, f: &F) -> XRayCurves
where
    F: Fn(Complex64) -> Option<Complex64> + ?Sized,
{
    let g = &field.grid;
    let re = marching_squares(field, |v| v.re);
    let im = marching_squares(field, |v| v.im);
    let mut zeros: Vec<Complex64> = Vec::new();
    // the same zero reached from two cells sharing an edge
    let merge = 1e-4 * g.dx().min(g.dy());
    let (cx, cy) = (g.nx - 1, g.ny - 1);
    // Both curves within one cell of each other: near the window edges the
    // phase can turn by more than π between corners, so a zero's own cell
    // may show only one of the two sign changes.
    let near = |cells: &[bool], i: usize, j: usize| {
        (j.saturating_sub(1)..=(j + 1).min(cy - 1))
            .any(|jj| (i.saturating_sub(1)..=(i + 1).min(cx - 1)).any(|ii| cells[jj * cx + ii]))
    };
    for j in 0..cy {
        for i in 0..cx {
            if !(near(&re.cells, i, j) && near(&im.cells, i, j)) {
                continue;
            }
            let corners = [field.get(i, j), field.get(i + 1, j), field.get(i + 1, j + 1), field.get(i, j + 1)];
            let scale = corners.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            let mut found = Vec::new();
            refine(f, g.point(i, j), g.point(i + 1, j + 1), ZERO_TOL * scale, 0, &mut found);
            for z in found {
                if g.contains(z) && !zeros.iter().any(|w| (w - z).norm() < merge) {
                    zeros.push(z);
                }
            }
        }
    }
    XRayCurves {
        re_zero: join(&re),
        im_zero: join(&im),
        zeros,
    }
}

/// Evaluate, extract and return both the field and the curves.
pub fn xray(target: Target, grid: &GridSpec, tol: f64) -> Result<(Field, XRayCurves)> {
    let f = target.evaluator(tol)?;
    let field = grid_eval_with(f.as_ref(), grid)?;
    let curves = extract_zero_curves(&field, f.as_ref());
    Ok((field, curves))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Svg,
    Ppm,
    Csv,
}

impl RenderFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RenderFormat::Svg => "svg",
            RenderFormat::Ppm => "ppm",
            RenderFormat::Csv => "csv",
        }
    }
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(RenderFormat::Svg),
            "ppm" => Ok(RenderFormat::Ppm),
            "csv" => Ok(RenderFormat::Csv),
            _ => Err(Error::Unsupported {
                op: "render",
                reason: format!("format `{s}` (expected svg, ppm or csv)"),
            }),
        }
    }
}

fn image_size(grid: &GridSpec) -> (usize, usize) {
    let (w, h) = (grid.x_max - grid.x_min, grid.y_max - grid.y_min);
    if w >= h {
        (IMAGE_SIZE, ((IMAGE_SIZE as f64 * h / w).round() as usize).max(1))
    } else {
        (((IMAGE_SIZE as f64 * w / h).round() as usize).max(1), IMAGE_SIZE)
    }
}

/// Image coordinates, y pointing down.
fn to_pixel(grid: &GridSpec, size: (usize, usize), z: Complex64) -> (f64, f64) {
    let u = (z.re - grid.x_min) / (grid.x_max - grid.x_min) * size.0 as f64;
    let v = (grid.y_max - z.im) / (grid.y_max - grid.y_min) * size.1 as f64;
    (u, v)
}

pub fn render(curves: &XRayCurves, grid: &GridSpec, format: RenderFormat) -> Result<Vec<u8>> {
    grid.validate()?;
    Ok(match format {
        RenderFormat::Svg => render_svg(curves, grid).into_bytes(),
        RenderFormat::Ppm => render_ppm(curves, grid),
        RenderFormat::Csv => render_csv(curves).into_bytes(),
    })
}

fn render_svg(curves: &XRayCurves, grid: &GridSpec) -> String {
    let size = image_size(grid);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = size.0,
        h = size.1
    );
    s.push_str(
        "<style>.re{fill:none;stroke:#c0392b;stroke-width:1}.im{fill:none;stroke:#1f5fa8;stroke-width:1}.zero{fill:#000}</style>\n",
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n");
    for (class, lines) in [("re", &curves.re_zero), ("im", &curves.im_zero)] {
        for line in lines {
            let pts: Vec<String> = line
                .iter()
                .map(|z| {
                    let (u, v) = to_pixel(grid, size, *z);
                    format!("{u:.2},{v:.2}")
                })
                .collect();
            let _ = writeln!(s, "<polyline class=\"{class}\" points=\"{}\"/>", pts.join(" "));
        }
    }
    for z in &curves.zeros {
        let (u, v) = to_pixel(grid, size, *z);
        let _ = writeln!(s, "<circle class=\"zero\" cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"2.5\"/>");
    }
    s.push_str("</svg>\n");
    s
}

const RE_RGB: [u8; 3] = [192, 57, 43];
const IM_RGB: [u8; 3] = [31, 95, 168];
const ZERO_RGB: [u8; 3] = [0, 0, 0];

fn render_ppm(curves: &XRayCurves, grid: &GridSpec) -> Vec<u8> {
    let (w, h) = image_size(grid);
    let mut px = vec![255u8; w * h * 3];
    let mut put = |x: i64, y: i64, rgb: [u8; 3]| {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            let k = 3 * (y as usize * w + x as usize);
            px[k..k + 3].copy_from_slice(&rgb);
        }
    };
    for (rgb, lines) in [(RE_RGB, &curves.re_zero), (IM_RGB, &curves.im_zero)] {
        for line in lines {
            for pair in line.windows(2) {
                let (u0, v0) = to_pixel(grid, (w, h), pair[0]);
                let (u1, v1) = to_pixel(grid, (w, h), pair[1]);
                let n = (u1 - u0).abs().max((v1 - v0).abs()).ceil().max(1.0) as usize;
                for k in 0..=n {
                    let t = k as f64 / n as f64;
                    put(
                        (u0 + (u1 - u0) * t).floor() as i64,
                        (v0 + (v1 - v0) * t).floor() as i64,
                        rgb,
                    );
                }
            }
        }
    }
    for z in &curves.zeros {
        let (u, v) = to_pixel(grid, (w, h), *z);
        let (x, y) = (u.floor() as i64, v.floor() as i64);
        for dy in -2..=2 {
            for dx in -2..=2 {
                put(x + dx, y + dy, ZERO_RGB);
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&px);
    out
}

fn render_csv(curves: &XRayCurves) -> String {
    let mut s = String::from("curve_id,kind,re,im\n");
    let mut id = 0;
    for (kind, lines) in [("re_zero", &curves.re_zero), ("im_zero", &curves.im_zero)] {
        for line in lines {
            for z in line {
                let _ = writeln!(s, "{id},{kind},{},{}", z.re, z.im);
            }
            id += 1;
        }
    }
    for z in &curves.zeros {
        let _ = writeln!(s, "{id},zero,{},{}", z.re, z.im);
        id += 1;
    }
    s
}
