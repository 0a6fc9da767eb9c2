use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};
use crate::geometry::{envelope_d1max, s_diagonal, ReactionMatrix};

use super::profile::{GalerkinVector, Placement, SourceSinkProfile};

/// Representer of `φ ↦ ∫ (s_+ u⁺ - s_- u⁻) φ dΩ`.
pub fn beta_apply(
    u: &GalerkinVector,
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
) -> Result<GalerkinVector> {
    if profile.placement() != Placement::Interior {
        return Err(Error::WrongPlacement { expected: "interior" });
    }
    beta(u, profile, basis)
}

/// Representer of `φ ↦ ∫_{Γ_N} (s_+ u⁺ - s_- u⁻) φ dΓ`.
pub fn beta_boundary_apply(
    u: &GalerkinVector,
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
) -> Result<GalerkinVector> {
    if profile.placement() != Placement::Boundary {
        return Err(Error::WrongPlacement { expected: "boundary" });
    }
    beta(u, profile, basis)
}

/// `β` or `β_N` according to the profile placement.
pub fn beta(u: &GalerkinVector, profile: &SourceSinkProfile, basis: &SpectralBasis) -> Result<GalerkinVector> {
    let r = beta_coeffs(u.values(), profile, basis)?;
    GalerkinVector::new(r, basis)
}

pub(crate) fn beta_coeffs(
    values: &[f64],
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
) -> Result<Vec<f64>> {
    let w = profile.density(values);
    match profile.placement() {
        Placement::Interior => Ok(basis.represent_density(&w)),
        Placement::Boundary => basis.represent_boundary_density(&w),
    }
}

/// `S_{d2} u`; diagonal in the eigenbasis.
pub fn s_apply(
    u: &GalerkinVector,
    d2: f64,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<GalerkinVector> {
    check_d2(d2)?;
    basis.check_len(u.coeffs().len())?;
    let diag = s_diagonal(d2, b, basis);
    GalerkinVector::new(
        u.coeffs().iter().zip(&diag).map(|(c, l)| c * l).collect(),
        basis,
    )
}

pub(crate) fn check_d2(d2: f64) -> Result<()> {
    if d2 > 0.0 && d2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("d2 must be positive, got {d2}")))
    }
}

/// Everything needed to evaluate the generalized Rayleigh quotient
/// `((S u, u) - (β(u), u)) / D(u)` at one `d2`, where `D(u) = ‖u‖²` with a
/// Dirichlet part and `D(u) = ((I - A) u, u)` otherwise.
#[derive(Debug, Clone)]
pub struct ReducedProblem<'a> {
    pub basis: &'a SpectralBasis,
    pub profile: &'a SourceSinkProfile,
    pub matrix: ReactionMatrix,
    pub d2: f64,
    pub(crate) s_diag: Vec<f64>,
    pub(crate) denom: Vec<f64>,
}

/// One evaluation of the quotient and its (exact) gradient.
#[derive(Debug, Clone)]
pub struct QuotientEval {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Coefficients of `β(u)`.
    pub beta: Vec<f64>,
    /// Euclidean gradient of the quotient with respect to the coefficients.
    pub gradient: Vec<f64>,
    /// `‖S u - β(u) - value (I - L) u‖ / ‖u‖`.
    pub residual: f64,
    pub values: Vec<f64>,
}

impl<'a> ReducedProblem<'a> {
    pub fn new(
        d2: f64,
        matrix: &ReactionMatrix,
        profile: &'a SourceSinkProfile,
        basis: &'a SpectralBasis,
    ) -> Result<Self> {
        check_d2(d2)?;
        basis.check_len_grid(profile.s_plus().len())?;
        Ok(Self {
            basis,
            profile,
            matrix: *matrix,
            d2,
            s_diag: s_diagonal(d2, matrix, basis),
            denom: basis.denominator_diagonal(),
        })
    }

    pub fn denominator(&self, c: &[f64]) -> f64 {
        c.iter().zip(&self.denom).map(|(a, m)| m * a * a).sum()
    }

    /// Rescales `c` to unit denominator; `None` when the denominator vanishes.
    pub fn normalize(&self, c: &mut [f64]) -> Option<()> {
        let d = self.denominator(c);
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let s = d.sqrt().recip();
        c.iter_mut().for_each(|a| *a *= s);
        Some(())
    }

    /// Quotient value at a linear mode; `None` for the constant Neumann mode.
    pub fn linear_value(&self, p: usize) -> Option<f64> {
        (self.denom[p] > 0.0).then(|| self.s_diag[p] / self.denom[p])
    }

    pub fn evaluate(&self, c: &[f64]) -> Result<QuotientEval> {
        self.basis.check_len(c.len())?;
        let den = self.denominator(c);
        let norm2: f64 = c.iter().map(|a| a * a).sum();
        if norm2 == 0.0 {
            return Err(Error::DegenerateVector("zero vector".into()));
        }
        if !(den > 1e-14 * norm2) {
            return Err(Error::DegenerateVector(
                "vector lies in Ker(I - A) (spatially constant)".into(),
            ));
        }
        let values = self.basis.evaluate(c);
        let beta = if self.profile.is_zero() {
            vec![0.0; c.len()]
        } else {
            beta_coeffs(&values, self.profile, self.basis)?
        };
        let s_quad: f64 = c.iter().zip(&self.s_diag).map(|(a, l)| l * a * a).sum();
        let beta_pair: f64 = c.iter().zip(&beta).map(|(a, r)| a * r).sum();
        let numerator = s_quad - beta_pair;
        let value = numerator / den;
        let mut res2 = 0.0;
        let gradient = c
            .iter()
            .zip(&self.s_diag)
            .zip(beta.iter().zip(&self.denom))
            .map(|((a, l), (r, m))| {
                let e = l * a - r - value * m * a;
                res2 += e * e;
                2.0 * e / den
            })
            .collect();
        Ok(QuotientEval {
            value,
            numerator,
            denominator: den,
            beta,
            gradient,
            residual: (res2 / norm2).sqrt(),
            values,
        })
    }
}

pub fn rayleigh_quotient(
    u: &GalerkinVector,
    d2: f64,
    profile: &SourceSinkProfile,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<f64> {
    Ok(ReducedProblem::new(d2, b, profile, basis)?
        .evaluate(u.coeffs())?
        .value)
}

/// `‖S u - β(u) - λ (I - L) u‖ / ‖u‖` with `L = 0` under a Dirichlet part and
/// `L = A` otherwise.
pub fn eigen_residual(
    u: &GalerkinVector,
    lambda: f64,
    d2: f64,
    profile: &SourceSinkProfile,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<f64> {
    let problem = ReducedProblem::new(d2, b, profile, basis)?;
    let c = u.coeffs();
    let beta = beta_coeffs(u.values(), profile, basis)?;
    let mut res2 = 0.0;
    for (((a, l), r), m) in c.iter().zip(&problem.s_diag).zip(&beta).zip(&problem.denom) {
        res2 += (l * a - r - lambda * m * a).powi(2);
    }
    let norm = u.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateVector("zero vector".into()));
    }
    Ok(res2.sqrt() / norm)
}

/// Largest admissible strength of the unilateral terms for which at least one
/// critical point with this `d2` is guaranteed:
/// `b11 + b12 b21 / (d2 κ_{j0} - b22)` with `j0` the envelope argmax.
pub fn tau_bound(d2: f64, b: &ReactionMatrix, basis: &SpectralBasis) -> Result<f64> {
    let env = envelope_d1max(d2, b, basis)?;
    let kappa = basis.pair(env.argmax[0])?.kappa;
    Ok(b.reduced_coefficient(d2, kappa))
}

/// Finite-difference check of `lim (1/t)(β(u0 + t h) - β(u0), u0) = (β(u0), h)`.
/// Returns the absolute deviation for each `t`.
pub fn directional_derivative_check(
    u0: &GalerkinVector,
    h: &GalerkinVector,
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
    t_sequence: &[f64],
) -> Result<Vec<f64>> {
    let beta0 = beta_coeffs(u0.values(), profile, basis)?;
    let target: f64 = beta0.iter().zip(h.coeffs()).map(|(a, b)| a * b).sum();
    let base: f64 = beta0.iter().zip(u0.coeffs()).map(|(a, b)| a * b).sum();
    t_sequence
        .iter()
        .map(|&t| {
            let shifted = u0.axpy(t, h);
            let bt = beta_coeffs(shifted.values(), profile, basis)?;
            let pair: f64 = bt.iter().zip(u0.coeffs()).map(|(a, b)| a * b).sum();
            Ok(((pair - base) / t - target).abs())
        })
        .collect()
}

/// `‖β(u)‖ / (‖s_-‖_∞ ‖u⁻‖ + ‖s_+‖_∞ ‖u⁺‖)` with the parts' norms taken on the
/// grid; bounded over all `u`.
pub fn beta_bound_ratio(
    u: &GalerkinVector,
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
) -> Result<Option<f64>> {
    let b = beta(u, profile, basis)?;
    let (sm, sp) = profile.sup_norms();
    let denom = sm * basis.grid_active_norm(&u.negative_part())
        + sp * basis.grid_active_norm(&u.positive_part());
    Ok((denom > 0.0).then(|| b.norm() / denom))
}
