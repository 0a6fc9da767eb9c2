//! The unilateral eigenvalue problem.
//!
//! For fixed `d2` the homogenized stationary system reduces to
//! `d1 (I - L) u = S_{d2} u - β(u)`, where `β` collects the unilateral terms
//! `s_+ u⁺ - s_- u⁻` (in the interior or in the Neumann condition), `S_{d2}`
//! is diagonal in the Laplace eigenbasis and `L` is `0` when part of the
//! boundary is Dirichlet and the compact operator `A` otherwise. The largest
//! eigenvalue `d1^{MAX,β}` is the maximum of the generalized Rayleigh quotient
//! `((S u, u) - (β(u), u)) / ((I - L) u, u)`.
//!
//! All vectors are coefficient vectors in a [`SpectralBasis`](crate::SpectralBasis),
//! which is orthonormal in the active inner product.

mod conditions;
mod maximize;
mod operators;
mod profile;

pub use conditions::{
    check_sign_condition, check_sign_condition_group, sign_change_lemma_check, sphere_directions,
    SignCheck, DEFAULT_GROUP_DIRECTIONS, SIGN_CONDITION_RTOL,
};
pub use maximize::{maximize_rayleigh, verify_eigenrelation, MaximizerOptions, MaximizerResult};
pub use operators::{
    beta, beta_apply, beta_boundary_apply, beta_bound_ratio, directional_derivative_check,
    eigen_residual, rayleigh_quotient, s_apply, tau_bound, QuotientEval, ReducedProblem,
};
pub use profile::{GalerkinVector, Placement, SourceSinkProfile};
