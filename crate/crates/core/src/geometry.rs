//! Classical Turing geometry: hyperbolas `C_j`, their envelope `C_E`, the
//! stability/instability regions and the spectrum of the reduced operator
//! `S_{d2}` obtained by eliminating the inhibitor.

use serde::{Deserialize, Serialize};

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};

/// Relative tolerance for argmax ties on the envelope and for envelope membership.
pub const ENVELOPE_RTOL: f64 = 1e-9;

/// Jacobian of the kinetics at the shifted equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ReactionMatrix {
    b11: f64,
    b12: f64,
    b21: f64,
    b22: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    b11: f64,
    b12: f64,
    b21: f64,
    b22: f64,
}

impl TryFrom<RawMatrix> for ReactionMatrix {
    type Error = Error;
    fn try_from(r: RawMatrix) -> Result<Self> {
        Self::new(r.b11, r.b12, r.b21, r.b22)
    }
}

impl From<ReactionMatrix> for RawMatrix {
    fn from(m: ReactionMatrix) -> Self {
        Self {
            b11: m.b11,
            b12: m.b12,
            b21: m.b21,
            b22: m.b22,
        }
    }
}

impl ReactionMatrix {
    /// Checks the conditions for diffusion-driven instability:
    /// `b11 > 0`, `b22 < 0`, `b12 b21 < 0`, `tr B < 0`, `det B > 0`.
    pub fn new(b11: f64, b12: f64, b21: f64, b22: f64) -> Result<Self> {
        let m = Self { b11, b12, b21, b22 };
        let checks = [
            (b11 > 0.0, "b11 > 0"),
            (b22 < 0.0, "b22 < 0"),
            (b12 * b21 < 0.0, "b12*b21 < 0"),
            (m.trace() < 0.0, "tr(B) < 0"),
            (m.det() > 0.0, "det(B) > 0"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::InvalidMatrix(format!(
                    "({b11}, {b12}, {b21}, {b22}) violates {what}"
                )));
            }
        }
        Ok(m)
    }

    pub fn b11(&self) -> f64 {
        self.b11
    }
    pub fn b12(&self) -> f64 {
        self.b12
    }
    pub fn b21(&self) -> f64 {
        self.b21
    }
    pub fn b22(&self) -> f64 {
        self.b22
    }

    pub fn trace(&self) -> f64 {
        self.b11 + self.b22
    }

    pub fn det(&self) -> f64 {
        self.b11 * self.b22 - self.b12 * self.b21
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.b11.powi(2) + self.b12.powi(2) + self.b21.powi(2) + self.b22.powi(2)).sqrt()
    }

    /// `c(d2, κ) = b11 + b12 b21 / (d2 κ - b22)`: the activator coefficient of the
    /// reduced single-species problem on mode `κ`.
    pub fn reduced_coefficient(&self, d2: f64, kappa: f64) -> f64 {
        self.b11 + self.b12 * self.b21 / (d2 * kappa - self.b22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticsKind {
    ActivatorInhibitor,
    SubstrateDepletion,
}

pub fn classify_kinetics(b: &ReactionMatrix) -> KineticsKind {
    if b.b12 < 0.0 {
        KineticsKind::ActivatorInhibitor
    } else {
        KineticsKind::SubstrateDepletion
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionPoint {
    pub d1: f64,
    pub d2: f64,
}

impl DiffusionPoint {
    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        if !(d1 > 0.0 && d2 > 0.0 && d1.is_finite() && d2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "diffusion coefficients must be positive, got ({d1}, {d2})"
            )));
        }
        Ok(Self { d1, d2 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RegionLabel {
    Instability,
    Stability,
    Envelope { on_curves: Vec<usize> },
}

fn check_d2(d2: f64) -> Result<()> {
    if d2 > 0.0 && d2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("d2 must be positive, got {d2}")))
    }
}

/// First coordinate of the hyperbola `C_j` at `d2`. The value may be
/// non-positive, in which case `C_j` has no point in the positive quadrant at
/// this `d2`.
pub fn hyperbola_d1(j: usize, d2: f64, b: &ReactionMatrix, basis: &SpectralBasis) -> Result<f64> {
    let kappa = basis.pair(j)?.kappa;
    if kappa == 0.0 {
        return Err(Error::ConstantMode(j));
    }
    Ok(b.reduced_coefficient(d2, kappa) / kappa)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub d1max: f64,
    pub argmax: Vec<usize>,
}

/// `max_j κ_j⁻¹ c(d2, κ_j)` over the retained modes, together with every
/// index attaining it within [`ENVELOPE_RTOL`]. Fails when the truncation
/// tail bound does not sit below the maximum.
pub fn envelope_d1max(d2: f64, b: &ReactionMatrix, basis: &SpectralBasis) -> Result<Envelope> {
    check_d2(d2)?;
    let values: Vec<(usize, f64)> = basis
        .pairs
        .iter()
        .filter(|p| p.kappa > 0.0)
        .map(|p| (p.index, b.reduced_coefficient(d2, p.kappa) / p.kappa))
        .collect();
    let d1max = values
        .iter()
        .map(|v| v.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let tail = tail_bound(b, basis);
    if tail >= d1max {
        return Err(Error::TruncationTooShort { tail, d1max });
    }
    let argmax = values
        .iter()
        .filter(|v| (v.1 - d1max).abs() <= ENVELOPE_RTOL * d1max.abs())
        .map(|v| v.0)
        .collect();
    Ok(Envelope { d1max, argmax })
}

/// Upper bound on every discarded hyperbola:
/// `max_{j>N} d1^j ≤ (b11 + |b12 b21| / (-b22)) / κ_{N+1}`.
pub fn tail_bound(b: &ReactionMatrix, basis: &SpectralBasis) -> f64 {
    (b.b11 + (b.b12 * b.b21).abs() / (-b.b22)) / basis.next_kappa()
}

pub fn classify_point(
    p: DiffusionPoint,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<RegionLabel> {
    let env = envelope_d1max(p.d2, b, basis)?;
    Ok(if (p.d1 - env.d1max).abs() <= ENVELOPE_RTOL * env.d1max.abs() {
        RegionLabel::Envelope {
            on_curves: env.argmax,
        }
    } else if p.d1 < env.d1max {
        RegionLabel::Instability
    } else {
        RegionLabel::Stability
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub kappa: f64,
    /// Generalized eigenvalue `d1^j` of the reduced problem; absent for the
    /// constant Neumann mode.
    pub d1_eigenvalue: Option<f64>,
    /// Eigenvalue of the operator `S_{d2}` itself on `e_j`.
    pub lambda_operator: f64,
}

/// Spectrum of `S_{d2}` in the eigenbasis. With a Dirichlet part the two
/// eigenvalues coincide; for pure Neumann boundaries
/// `λ^j = c(d2, κ_j)/(κ_j + 1)` while `d1^j = c(d2, κ_j)/κ_j`.
pub fn spectrum_s(d2: f64, b: &ReactionMatrix, basis: &SpectralBasis) -> Result<Vec<SpectrumEntry>> {
    check_d2(d2)?;
    let dirichlet = basis.has_dirichlet();
    Ok(basis
        .pairs
        .iter()
        .zip(&basis.mass_diagonal)
        .map(|(p, mu)| {
            let c = b.reduced_coefficient(d2, p.kappa);
            SpectrumEntry {
                index: p.index,
                kappa: p.kappa,
                d1_eigenvalue: (p.kappa > 0.0).then(|| c / p.kappa),
                lambda_operator: if dirichlet { c / p.kappa } else { c * mu },
            }
        })
        .collect())
}

/// Operator eigenvalues `λ^j` per coefficient position.
pub fn s_diagonal(d2: f64, b: &ReactionMatrix, basis: &SpectralBasis) -> Vec<f64> {
    basis
        .pairs
        .iter()
        .zip(&basis.mass_diagonal)
        .map(|(p, mu)| b.reduced_coefficient(d2, p.kappa) * mu)
        .collect()
}

/// `d2 > 0` at which `C_j` and `C_k` cross. Clearing denominators in
/// `d1^j = d1^k` gives the quadratic
/// `b11 (d2 κ_j - b22)(d2 κ_k - b22) + b12 b21 (d2 (κ_j + κ_k) - b22) = 0`.
pub fn hyperbola_intersection(
    j: usize,
    k: usize,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<Option<f64>> {
    let kj = basis.pair(j)?.kappa;
    let kk = basis.pair(k)?.kappa;
    if kj == 0.0 {
        return Err(Error::ConstantMode(j));
    }
    if kk == 0.0 {
        return Err(Error::ConstantMode(k));
    }
    if crate::eigenbasis::kappa_eq(kj, kk) {
        return Ok(None);
    }
    let p = b.b12 * b.b21;
    let qa = b.b11 * kj * kk;
    let qb = -b.b11 * b.b22 * (kj + kk) + p * (kj + kk);
    let qc = b.b11 * b.b22 * b.b22 - p * b.b22;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(None);
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let roots = [q / qa, if q != 0.0 { qc / q } else { f64::NAN }];
    Ok(roots
        .into_iter()
        .filter(|r| r.is_finite() && *r > 0.0)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r)))))
}
