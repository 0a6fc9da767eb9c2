use serde::{Deserialize, Serialize};

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};

/// Where the unilateral terms act: in the interior of the domain or in the
/// Neumann boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    #[default]
    Interior,
    Boundary,
}

/// Source strength `s_-` (active where `u < 0`) and sink strength `s_+`
/// (active where `u > 0`) sampled on the basis grid. For boundary placement
/// only the traces on `Γ_N` are used.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSinkProfile {
    s_minus: Vec<f64>,
    s_plus: Vec<f64>,
    placement: Placement,
}

impl SourceSinkProfile {
    pub fn new(
        s_minus: Vec<f64>,
        s_plus: Vec<f64>,
        placement: Placement,
        basis: &SpectralBasis,
    ) -> Result<Self> {
        for (name, s) in [("s_minus", &s_minus), ("s_plus", &s_plus)] {
            if s.len() != basis.grid_len() {
                return Err(Error::InvalidProfile(format!(
                    "{name} has {} samples, grid has {}",
                    s.len(),
                    basis.grid_len()
                )));
            }
            if let Some(v) = s.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidProfile(format!(
                    "{name} must be finite and non-negative, found {v}"
                )));
            }
        }
        if placement == Placement::Boundary && !basis.boundary.has_neumann() {
            return Err(Error::EmptyNeumannBoundary);
        }
        Ok(Self {
            s_minus,
            s_plus,
            placement,
        })
    }

    pub fn constant(s_minus: f64, s_plus: f64, placement: Placement, basis: &SpectralBasis) -> Result<Self> {
        let n = basis.grid_len();
        Self::new(vec![s_minus; n], vec![s_plus; n], placement, basis)
    }

    /// No unilateral terms at all.
    pub fn zero(basis: &SpectralBasis) -> Self {
        let n = basis.grid_len();
        Self {
            s_minus: vec![0.0; n],
            s_plus: vec![0.0; n],
            placement: Placement::Interior,
        }
    }

    pub fn from_fn(
        basis: &SpectralBasis,
        placement: Placement,
        s_minus: impl Fn(f64, f64) -> f64,
        s_plus: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        Self::new(
            basis.grid_function(s_minus),
            basis.grid_function(s_plus),
            placement,
            basis,
        )
    }

    pub fn s_minus(&self) -> &[f64] {
        &self.s_minus
    }

    pub fn s_plus(&self) -> &[f64] {
        &self.s_plus
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn is_zero(&self) -> bool {
        self.s_minus.iter().chain(&self.s_plus).all(|v| *v == 0.0)
    }

    /// `max(‖s_-‖_∞, ‖s_+‖_∞)`.
    pub fn sup_norm(&self) -> f64 {
        self.s_minus
            .iter()
            .chain(&self.s_plus)
            .fold(0.0, |a: f64, b| a.max(*b))
    }

    pub(crate) fn sup_norms(&self) -> (f64, f64) {
        let sup = |s: &[f64]| s.iter().fold(0.0, |a: f64, b| a.max(*b));
        (sup(&self.s_minus), sup(&self.s_plus))
    }

    /// Pointwise density `s_+ u⁺ - s_- u⁻`.
    pub fn density(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.s_plus.iter().zip(&self.s_minus))
            .map(|(&v, (&sp, &sm))| if v > 0.0 { sp * v } else { sm * v })
            .collect()
    }

    /// Strength active at each node for the sign pattern of `u`.
    pub(crate) fn active_strength(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.s_plus.iter().zip(&self.s_minus))
            .map(|(&v, (&sp, &sm))| if v > 0.0 { sp } else { sm })
            .collect()
    }
}

/// Coefficients in the truncated eigenbasis with their cached grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinVector {
    coeffs: Vec<f64>,
    values: Vec<f64>,
}

impl GalerkinVector {
    pub fn new(coeffs: Vec<f64>, basis: &SpectralBasis) -> Result<Self> {
        basis.check_len(coeffs.len())?;
        let values = basis.evaluate(&coeffs);
        Ok(Self { coeffs, values })
    }

    /// Unit vector on mode `j`.
    pub fn mode(j: usize, basis: &SpectralBasis) -> Result<Self> {
        let mut c = vec![0.0; basis.n_modes()];
        c[basis.position(j)?] = 1.0;
        Self::new(c, basis)
    }

    pub fn from_grid(f: &[f64], basis: &SpectralBasis) -> Result<Self> {
        basis.check_len_grid(f.len())?;
        Self::new(basis.project(f), basis)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| t * c).collect(),
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    /// `self + t h`.
    pub fn axpy(&self, t: f64, h: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&h.coeffs).map(|(a, b)| a + t * b).collect(),
            values: self.values.iter().zip(&h.values).map(|(a, b)| a + t * b).collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Grid values of the positive part `u⁺ = max(u, 0)`.
    pub fn positive_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0)).collect()
    }

    /// Grid values of the negative part `u⁻ = max(-u, 0)`.
    pub fn negative_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| (-v).max(0.0)).collect()
    }
}
