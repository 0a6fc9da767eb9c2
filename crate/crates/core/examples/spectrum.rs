//! Laplace spectra under different boundary conditions, the hyperbola value
//! of every mode and the eigenvalues of the reduced operator.
//!
//! ```text
//! cargo run --example spectrum
//! ```

use std::f64::consts::PI;

use turing_unilateral::geometry::spectrum_s;
use turing_unilateral::{BoundarySpec, DomainSpec, FaceCondition, ReactionMatrix, SpectralBasis};

fn main() -> turing_unilateral::Result<()> {
    let b = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0)?;
    let d2 = 2.0;
    let line = DomainSpec::interval(PI, 512)?;
    use FaceCondition::*;
    let cases = [
        ("interval, Dirichlet", line.clone(), BoundarySpec::dirichlet(1)),
        ("interval, Neumann", line.clone(), BoundarySpec::neumann(1)),
        ("interval, Dirichlet|Neumann", line, BoundarySpec::new(vec![Dirichlet, Neumann])),
        ("square, Neumann", DomainSpec::rectangle(PI, PI, 128)?, BoundarySpec::neumann(2)),
    ];
    for (name, domain, boundary) in cases {
        let basis = SpectralBasis::new(domain, boundary, 8)?;
        println!("{name} ({:?} inner product)", basis.inner_product_mode);
        println!("  {:>3} {:>8} {:>8} {:>12} {:>12}", "j", "kappa", "mu", "d1^j", "lambda^j");
        for (e, mu) in spectrum_s(d2, &b, &basis)?.iter().zip(&basis.mass_diagonal) {
            let d1 = e.d1_eigenvalue.map_or("-".to_string(), |v| format!("{v:.6}"));
            println!(
                "  {:>3} {:>8.4} {:>8.4} {:>12} {:>12.6}",
                e.index, e.kappa, mu, d1, e.lambda_operator
            );
        }
        println!("  multiplicity groups: {:?}\n", basis.multiplicity_groups());
    }
    Ok(())
}
