//! Render the x-ray of F on (-10,10)²: Re F = 0 and Im F = 0 curves plus zeros.
//! Usage: cargo run --release --example xray_figure [output.svg]
use riemann_aux::integrand::KernelId;
use riemann_aux::xray::{render, xray, GridSpec, RenderFormat, Target};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "xray_f.svg".into());
    let grid = GridSpec::standard();
    let (field, curves) = xray(Target::Kernel(KernelId::FMain), &grid, 1e-10)?;
    let format = if out.ends_with(".ppm") {
        RenderFormat::Ppm
    } else if out.ends_with(".csv") {
        RenderFormat::Csv
    } else {
        RenderFormat::Svg
    };
    std::fs::write(&out, render(&curves, &grid, format)?)?;
    println!(
        "{out}: {} zeros, {} Re-curves, {} Im-curves, {} missing cells",
        curves.zeros.len(),
        curves.re_zero.len(),
        curves.im_zero.len(),
        field.n_missing()
    );
    Ok(())
}
