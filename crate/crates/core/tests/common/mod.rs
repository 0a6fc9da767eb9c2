#![allow(dead_code)]

use std::f64::consts::PI;

use turing_unilateral::{BoundarySpec, DomainSpec, FaceCondition, ReactionMatrix, SpectralBasis};

pub fn matrix() -> ReactionMatrix {
    ReactionMatrix::new(1.0, -2.0, 2.0, -3.0).unwrap()
}

pub fn interval(faces: [FaceCondition; 2], res: usize, modes: usize) -> SpectralBasis {
    SpectralBasis::new(
        DomainSpec::interval(PI, res).unwrap(),
        BoundarySpec::new(faces.to_vec()),
        modes,
    )
    .unwrap()
}

pub fn dirichlet(res: usize, modes: usize) -> SpectralBasis {
    interval([FaceCondition::Dirichlet; 2], res, modes)
}

pub fn neumann(res: usize, modes: usize) -> SpectralBasis {
    interval([FaceCondition::Neumann; 2], res, modes)
}

pub fn square_neumann(res: usize, modes: usize) -> SpectralBasis {
    SpectralBasis::new(DomainSpec::rectangle(PI, PI, res).unwrap(), BoundarySpec::neumann(2), modes).unwrap()
}
