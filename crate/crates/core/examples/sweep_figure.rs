//! Sweeps `d2` and writes both critical curves as CSV and SVG: the classical
//! envelope and the lower curve of the problem with a sink.
//!
//! ```text
//! cargo run --release --example sweep_figure -- [OUT_DIR]
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use turing_unilateral::sweep::{
    emit_curves, emit_svg, sweep_curves, Spacing, SweepOptions, SweepWindow,
};
use turing_unilateral::{
    BoundarySpec, DomainSpec, Placement, ReactionMatrix, SourceSinkProfile, SpectralBasis,
};

fn main() -> turing_unilateral::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/sweep_figure".into()));
    std::fs::create_dir_all(&out)?;

    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let basis = SpectralBasis::new(DomainSpec::interval(PI, 512)?, BoundarySpec::neumann(1), 64)?;
    let sink = SourceSinkProfile::constant(0.0, 0.3, Placement::Interior, &basis)?;
    let window = SweepWindow::new(0.5, 10.0, 32, Spacing::Log)?;

    let result = sweep_curves(&window, &b, &basis, &sink, &SweepOptions::default())?;
    emit_curves(&result.samples, &out.join("curves.csv"))?;
    emit_svg(&result.samples, &out.join("curves.svg"))?;

    for s in result.samples.iter().step_by(4) {
        println!(
            "d2 = {:>7.4}  d1_max = {:.5}  d1_max_beta = {:.5}",
            s.d2,
            s.d1_max,
            s.d1_max_beta.unwrap_or(f64::NAN)
        );
    }
    println!("estimated strip width: {:.4e}", result.eps_est.unwrap_or(f64::NAN));
    println!("wrote {}", out.display());
    Ok(())
}
