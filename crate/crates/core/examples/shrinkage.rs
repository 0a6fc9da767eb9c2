//! A sink on a Neumann interval strictly lowers the largest critical `d1`:
//! the unilateral maximum sits below the classical envelope, and the
//! maximizer satisfies the nonsmooth eigenrelation.
//!
//! ```text
//! cargo run --release --example shrinkage
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::envelope_d1max;
use turing_unilateral::unilateral::{
    check_sign_condition_group, maximize_rayleigh, tau_bound, verify_eigenrelation,
    DEFAULT_GROUP_DIRECTIONS,
};
use turing_unilateral::{
    BoundarySpec, DomainSpec, MaximizerOptions, Placement, ReactionMatrix, SourceSinkProfile,
    SpectralBasis,
};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let basis = SpectralBasis::new(DomainSpec::interval(PI, 512)?, BoundarySpec::neumann(1), 64)?;
    let sink = SourceSinkProfile::constant(0.0, 0.1, Placement::Interior, &basis)?;
    let opts = MaximizerOptions::default();

    println!("{:>6} {:>10} {:>10} {:>10} {:>9} {:>6}", "d2", "d1_max", "d1_max_b", "gap", "residual", "sign");
    for d2 in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let env = envelope_d1max(d2, &b, &basis)?;
        let r = maximize_rayleigh(d2, &sink, &b, &basis, &opts)?;
        let residual = verify_eigenrelation(&r, d2, &sink, &b, &basis)?;
        let group = basis.group_of(env.argmax[0])?;
        let sign = check_sign_condition_group(&group, &sink, &basis, DEFAULT_GROUP_DIRECTIONS)?;
        println!(
            "{d2:>6.2} {:>10.6} {:>10.6} {:>10.3e} {residual:>9.1e} {:>6}",
            env.d1max,
            r.value,
            env.d1max - r.value,
            if sign.violated { "fails" } else { "holds" }
        );
    }

    let d2 = 2.0;
    println!("\ntau bound at d2 = {d2}: {:.6}", tau_bound(d2, &b, &basis)?);
    let r = maximize_rayleigh(d2, &sink, &b, &basis, &opts)?;
    let c = r.maximizer.coeffs();
    println!("leading maximizer coefficients at d2 = {d2}: {:.4?}", &c[..5]);
    Ok(())
}
