//! The sign condition `s_- e⁻ - s_+ e⁺ ≢ 0` on eigenspaces and the fact that
//! every combination of higher modes changes sign.
//!
//! ```text
//! cargo run --example sign_condition
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use turing_unilateral::unilateral::{
    check_sign_condition, check_sign_condition_group, sign_change_lemma_check,
};
use turing_unilateral::{BoundarySpec, DomainSpec, Placement, SourceSinkProfile, SpectralBasis};

fn main() -> turing_unilateral::Result<()> {
    let line = DomainSpec::interval(PI, 512)?;
    let dir = SpectralBasis::new(line.clone(), BoundarySpec::dirichlet(1), 8)?;
    let neu = SpectralBasis::new(line, BoundarySpec::neumann(1), 8)?;

    let source = SourceSinkProfile::constant(1.0, 0.0, Placement::Interior, &dir)?;
    let mut e1 = vec![0.0; 8];
    e1[0] = 1.0;
    let c = check_sign_condition(&e1, &source, &dir)?;
    println!("Dirichlet e_1, source only: norm {:.2e}, violated {}", c.norm, c.violated);

    let source = SourceSinkProfile::constant(1.0, 0.0, Placement::Interior, &neu)?;
    let c = check_sign_condition_group(&neu.group_of(1)?, &source, &neu, 256)?;
    println!("Neumann cos(x), source only: norm {:.4}, violated {}", c.norm, c.violated);

    let square = SpectralBasis::new(DomainSpec::rectangle(PI, PI, 64)?, BoundarySpec::neumann(2), 6)?;
    let sink = SourceSinkProfile::constant(0.0, 1.0, Placement::Interior, &square)?;
    let group = square.group_of(1)?;
    let c = check_sign_condition_group(&group, &sink, &square, 256)?;
    println!("square, group {group:?}, sink only: min norm {:.4} at {:.3?}", c.norm, c.direction);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, basis) in [("Dirichlet", &dir), ("Neumann", &neu)] {
        // drop e_1 (Dirichlet) or the constant (Neumann): both sit at position 0
        let all = (0..500).all(|_| {
            let mut c: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            c[0] = 0.0;
            sign_change_lemma_check(&c, basis).unwrap_or(false)
        });
        println!("{name}: 500 random higher-mode combinations all change sign: {all}");
    }
    Ok(())
}
