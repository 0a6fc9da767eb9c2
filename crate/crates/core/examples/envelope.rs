//! The classical picture: the envelope of the Turing hyperbolas, the crossing
//! of the first two hyperbolas, and region labels of a few points.
//!
//! ```text
//! cargo run --example envelope
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::{classify_kinetics, classify_point, envelope_d1max, hyperbola_d1};
use turing_unilateral::sweep::find_c1_c2_intersection;
use turing_unilateral::{BoundarySpec, DiffusionPoint, DomainSpec, ReactionMatrix, SpectralBasis};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let basis = SpectralBasis::new(DomainSpec::interval(PI, 512)?, BoundarySpec::dirichlet(1), 64)?;
    println!("kinetics: {:?}", classify_kinetics(&b));

    let d2i = find_c1_c2_intersection(&b, &basis)?.expect("C_1 and C_2 cross");
    println!(
        "C_1 and C_2 cross at d2 = {d2i:.10} (d1 = {:.10})",
        hyperbola_d1(1, d2i, &b, &basis)?
    );

    println!("\n{:>8} {:>10} {:>8}", "d2", "d1_max", "argmax");
    for d2 in [0.5, 1.0, 1.5, d2i, 2.0, 5.0, 10.0] {
        let env = envelope_d1max(d2, &b, &basis)?;
        println!("{d2:>8.4} {:>10.6} {:>8?}", env.d1max, env.argmax);
    }

    println!();
    for (d1, d2) in [(0.1, 2.0), (0.2, 2.0), (0.5, 2.0)] {
        let label = classify_point(DiffusionPoint::new(d1, d2)?, &b, &basis)?;
        println!("({d1}, {d2}) -> {label:?}");
    }
    Ok(())
}
