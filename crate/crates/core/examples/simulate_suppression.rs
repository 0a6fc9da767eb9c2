//! Time integration from a small perturbation at a point between the
//! unilateral critical curve and the envelope. Without unilateral terms the
//! pattern grows; with the sink it decays.
//!
//! ```text
//! cargo run --release --example simulate_suppression
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::envelope_d1max;
use turing_unilateral::simulator::{run_experiment, ExperimentConfig, Perturbation, ReactionKinetics};
use turing_unilateral::unilateral::maximize_rayleigh;
use turing_unilateral::{
    BoundarySpec, DomainSpec, MaximizerOptions, Placement, ReactionMatrix, SourceSinkProfile,
    SpectralBasis,
};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let basis = SpectralBasis::new(DomainSpec::interval(PI, 128)?, BoundarySpec::neumann(1), 16)?;
    let sink = SourceSinkProfile::constant(0.0, 0.5, Placement::Interior, &basis)?;
    let d2 = 2.0;

    let env = envelope_d1max(d2, &b, &basis)?;
    let uni = maximize_rayleigh(d2, &sink, &b, &basis, &MaximizerOptions::default())?;
    let d1 = 0.5 * (env.d1max + uni.value);
    println!("d1^MAX = {:.5}, d1^MAX,beta = {:.5}, simulating at d1 = {d1:.5}", env.d1max, uni.value);

    let cfg = ExperimentConfig {
        d1,
        d2,
        horizon: 400.0,
        perturbation: Perturbation::SingleMode { mode: env.argmax[0] },
        ..ExperimentConfig::default()
    };
    let kinetics = ReactionKinetics::with_defaults(&b);
    for (name, profile) in [("no unilateral terms", SourceSinkProfile::zero(&basis)), ("sink 0.5", sink)] {
        let (report, _) = run_experiment(&cfg, &basis, &kinetics, &profile)?;
        println!(
            "{name:>20}: {:?}, fitted rate {:+.4}",
            report.classification,
            report.fitted_rate.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
