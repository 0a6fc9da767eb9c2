//! Unilateral terms acting through the Neumann boundary condition instead
//! of the interior.
//!
//! ```text
//! cargo run --release --example boundary_sink
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::envelope_d1max;
use turing_unilateral::unilateral::{maximize_rayleigh, verify_eigenrelation};
use turing_unilateral::{
    BoundarySpec, DomainSpec, FaceCondition, MaximizerOptions, Placement, ReactionMatrix,
    SourceSinkProfile, SpectralBasis,
};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    use FaceCondition::*;
    for (name, faces) in [("Neumann", vec![Neumann, Neumann]), ("Dirichlet|Neumann", vec![Dirichlet, Neumann])] {
        let basis = SpectralBasis::new(DomainSpec::interval(PI, 512)?, BoundarySpec::new(faces), 64)?;
        let sink = SourceSinkProfile::constant(0.0, 0.2, Placement::Boundary, &basis)?;
        println!("{name}");
        for d2 in [1.0, 2.0, 5.0] {
            let env = envelope_d1max(d2, &b, &basis)?;
            let r = maximize_rayleigh(d2, &sink, &b, &basis, &MaximizerOptions::default())?;
            let res = verify_eigenrelation(&r, d2, &sink, &b, &basis)?;
            println!(
                "  d2 = {d2}: d1_max = {:.6}, with boundary sink {:.6}, residual {res:.1e}",
                env.d1max, r.value
            );
        }
    }
    Ok(())
}
