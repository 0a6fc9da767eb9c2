//! With a source acting only where `u < 0` and Dirichlet ends, the positive
//! first eigenfunction never feels the unilateral term: every point of `C_1`
//! stays critical. Below the crossing with `C_2` the envelope is carried by
//! the sign-changing second mode, and the critical curve drops.
//!
//! ```text
//! cargo run --release --example dirichlet_persistence
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::envelope_d1max;
use turing_unilateral::sweep::find_c1_c2_intersection;
use turing_unilateral::unilateral::maximize_rayleigh;
use turing_unilateral::{
    BoundarySpec, DomainSpec, MaximizerOptions, Placement, ReactionMatrix, SourceSinkProfile,
    SpectralBasis,
};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let basis = SpectralBasis::new(DomainSpec::interval(PI, 512)?, BoundarySpec::dirichlet(1), 64)?;
    let source = SourceSinkProfile::constant(1.0, 0.0, Placement::Interior, &basis)?;
    let d2i = find_c1_c2_intersection(&b, &basis)?.expect("C_1 and C_2 cross");
    println!("d2^I = {d2i:.6}\n");

    println!("{:>8} {:>8} {:>10} {:>10} {:>10}", "d2", "argmax", "d1_max", "d1_max_b", "gap");
    for d2 in [0.8, 1.2, 1.6, 0.99 * d2i, 1.01 * d2i, 2.0, 4.0, 10.0] {
        let env = envelope_d1max(d2, &b, &basis)?;
        let r = maximize_rayleigh(d2, &source, &b, &basis, &MaximizerOptions::default())?;
        println!(
            "{d2:>8.4} {:>8?} {:>10.6} {:>10.6} {:>10.2e}",
            env.argmax,
            env.d1max,
            r.value,
            env.d1max - r.value
        );
    }
    Ok(())
}
