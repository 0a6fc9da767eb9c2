//! The sign condition on eigenfunctions and the sign-change property of
//! higher modes.

use std::f64::consts::PI;

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};

use super::profile::{Placement, SourceSinkProfile};

/// Default number of sampled directions for a multiplicity group.
pub const DEFAULT_GROUP_DIRECTIONS: usize = 256;

/// Relative tolerance for declaring `s_- e⁻ - s_+ e⁺` identically zero.
pub const SIGN_CONDITION_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SignCheck {
    /// `s_- e⁻ - s_+ e⁺ ≡ 0` up to tolerance.
    pub violated: bool,
    /// L² norm of `s_- e⁻ - s_+ e⁺` over `Ω` (or `Γ_N` for boundary placement).
    pub norm: f64,
    /// Full coefficient vector of the combination attaining `norm`.
    pub direction: Vec<f64>,
}

/// Checks `s_- e⁻ - s_+ e⁺ ≢ 0` for the function with coefficients `coeffs`.
pub fn check_sign_condition(
    coeffs: &[f64],
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
) -> Result<SignCheck> {
    basis.check_len(coeffs.len())?;
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::DegenerateVector("zero combination".into()));
    }
    let values = basis.evaluate(coeffs);
    let density = profile.density(&values);
    let (norm, scale) = match profile.placement() {
        Placement::Interior => (basis.l2_norm(&density), basis.l2_norm(&values)),
        Placement::Boundary => (
            basis.boundary_l2_norm(&density),
            basis.boundary_l2_norm(&values).max(basis.l2_norm(&values)),
        ),
    };
    Ok(SignCheck {
        violated: norm <= SIGN_CONDITION_RTOL * scale,
        norm,
        direction: coeffs.to_vec(),
    })
}

/// Minimum of the sign-condition norm over unit combinations of the modes in
/// `group`, sampled on a deterministic set of directions. The minimum over the
/// sphere can only be smaller, so a non-violation here is a heuristic verdict.
pub fn check_sign_condition_group(
    group: &[usize],
    profile: &SourceSinkProfile,
    basis: &SpectralBasis,
    n_directions: usize,
) -> Result<SignCheck> {
    if group.is_empty() {
        return Err(Error::DegenerateVector("empty mode group".into()));
    }
    let positions: Vec<usize> = group.iter().map(|&j| basis.position(j)).collect::<Result<_>>()?;
    let mut best: Option<SignCheck> = None;
    for dir in sphere_directions(group.len(), n_directions) {
        let mut c = vec![0.0; basis.n_modes()];
        for (&p, a) in positions.iter().zip(&dir) {
            c[p] = *a;
        }
        let check = check_sign_condition(&c, profile, basis)?;
        if best.as_ref().is_none_or(|b| check.norm < b.norm) {
            best = Some(check);
        }
    }
    Ok(best.expect("at least two directions are sampled"))
}

/// Deterministic unit vectors in `R^k`: `±` coordinate vectors, then a
/// uniform circle for `k = 2` or Halton points mapped through Box–Muller.
pub fn sphere_directions(k: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n.max(2 * k));
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; k];
            v[i] = s;
            out.push(v);
        }
    }
    if k == 2 {
        let m = n.saturating_sub(out.len());
        for i in 0..m {
            let th = 2.0 * PI * (i as f64 + 0.5) / m as f64;
            out.push(vec![th.cos(), th.sin()]);
        }
    } else if k > 2 {
        let dims = 2 * k.div_ceil(2);
        let mut index = 1u64;
        while out.len() < n {
            let h: Vec<f64> = (0..dims).map(|d| radical_inverse(index, nth_prime(d))).collect();
            index += 1;
            let mut v = Vec::with_capacity(dims);
            for pair in h.chunks(2) {
                let r = (-2.0 * pair[0].max(1e-300).ln()).sqrt();
                let th = 2.0 * PI * pair[1];
                v.push(r * th.cos());
                v.push(r * th.sin());
            }
            v.truncate(k);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                out.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn nth_prime(n: usize) -> u64 {
    let mut count = 0;
    let mut p = 1u64;
    loop {
        p += 1;
        if (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            if count == n {
                return p;
            }
            count += 1;
        }
    }
}

/// True iff the combination attains values of both signs beyond the noise
/// floor `1e-12 · max |u|`. Modes below the first sign-changing index (the
/// first Dirichlet mode, or the Neumann constant) must carry zero weight.
pub fn sign_change_lemma_check(coeffs: &[f64], basis: &SpectralBasis) -> Result<bool> {
    basis.check_len(coeffs.len())?;
    let j0 = if basis.has_dirichlet() { 2 } else { 1 };
    for j in basis.first_index()..j0 {
        if coeffs[basis.position(j)?] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mode {j} is below the first sign-changing index {j0}"
            )));
        }
    }
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::DegenerateVector("zero combination".into()));
    }
    let u = basis.evaluate(coeffs);
    let sup = u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let floor = 1e-12 * sup;
    Ok(u.iter().any(|v| *v > floor) && u.iter().any(|v| *v < -floor))
}
