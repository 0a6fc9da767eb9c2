//! Multi-start maximization of the nonsmooth generalized Rayleigh quotient.
//!
//! Each iteration tries two candidate moves and keeps the better one if it
//! increases the quotient:
//!
//! 1. *frozen-sign step*: with the sign pattern of the current iterate fixed,
//!    `β` is linear and the quotient becomes a generalized Rayleigh quotient
//!    of a symmetric matrix; its top eigenvector is the candidate. A fixed
//!    point of this map satisfies the eigenrelation exactly.
//! 2. *projected ascent*: an Armijo-backtracked step along the exact gradient
//!    (the quotient is C¹ because `(u⁺)²` is), followed by rescaling to the
//!    unit sphere of the denominator form.
//!
//! Under pure Neumann conditions the constant mode lies in the kernel of the
//! denominator. It is kept as a free coordinate; the numerator is strictly
//! concave in it, so the frozen-sign step eliminates it exactly by a Schur
//! complement.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};
use crate::geometry::ReactionMatrix;

use super::operators::{eigen_residual, QuotientEval, ReducedProblem};
use super::profile::{GalerkinVector, Placement, SourceSinkProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximizerOptions {
    /// Number of top linear modes used as `±e_j` starts.
    pub top_k: usize,
    pub random_starts: usize,
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Iterations every start gets before only the best survive.
    pub screen_iter: usize,
    /// Distinct candidates carried to full convergence.
    pub refine: usize,
    pub value_rtol: f64,
    pub stall_window: usize,
    pub residual_tol: f64,
    pub seed: u64,
    pub parallel: bool,
    #[serde(skip)]
    pub warm_start: Option<Vec<f64>>,
}

impl Default for MaximizerOptions {
    fn default() -> Self {
        Self {
            top_k: 8,
            random_starts: 24,
            max_iter: 10_000,
            screen_iter: 25,
            refine: 4,
            value_rtol: 1e-10,
            stall_window: 5,
            residual_tol: 1e-6,
            seed: 0x75_7269_6e67,
            parallel: true,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximizerResult {
    /// Candidate `d1^{MAX,β}` (the best quotient found).
    pub value: f64,
    /// Maximizer normalized to unit denominator.
    pub maximizer: GalerkinVector,
    pub residual: f64,
    pub restarts_used: usize,
    /// Converged to a stationary point with a positive value.
    pub converged: bool,
    /// Whether any start reached a positive quotient; when false there is no
    /// positive eigenvalue to report.
    pub positive_found: bool,
    pub iterations: usize,
    /// Converged maximizers attaining `value` with pairwise cosine below 0.99.
    pub distinct_maximizers: Vec<GalerkinVector>,
}

struct Track {
    c: Vec<f64>,
    eval: QuotientEval,
    history: VecDeque<f64>,
    iterations: usize,
    converged: bool,
    stuck: bool,
    alpha: f64,
}

impl Track {
    fn done(&self) -> bool {
        self.converged || self.stuck
    }
}

pub fn maximize_rayleigh(
    d2: f64,
    profile: &SourceSinkProfile,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
    opts: &MaximizerOptions,
) -> Result<MaximizerResult> {
    let problem = ReducedProblem::new(d2, b, profile, basis)?;
    let starts = start_set(&problem, opts)?;
    let restarts_used = starts.len();

    let screen = |c: Vec<f64>| -> Option<Track> {
        let mut t = new_track(&problem, c)?;
        advance(&problem, &mut t, opts.screen_iter.min(opts.max_iter), opts);
        Some(t)
    };
    let mut tracks: Vec<Track> = if opts.parallel {
        starts.into_par_iter().filter_map(screen).collect()
    } else {
        starts.into_iter().filter_map(screen).collect()
    };
    if tracks.is_empty() {
        return Err(Error::DegenerateVector("no admissible start vector".into()));
    }
    tracks.sort_by(|a, b| b.eval.value.total_cmp(&a.eval.value));

    let mut chosen: Vec<Track> = Vec::new();
    for t in tracks {
        if chosen.len() >= opts.refine.max(1) {
            break;
        }
        if chosen.iter().all(|o| cosine(&o.c, &t.c) < 0.99) {
            chosen.push(t);
        }
    }
    let finish = |mut t: Track| {
        let remaining = opts.max_iter.saturating_sub(t.iterations);
        advance(&problem, &mut t, remaining, opts);
        t
    };
    let mut chosen: Vec<Track> = if opts.parallel {
        chosen.into_par_iter().map(finish).collect()
    } else {
        chosen.into_iter().map(finish).collect()
    };
    chosen.sort_by(|a, b| b.eval.value.total_cmp(&a.eval.value));

    let best = &chosen[0];
    let value = best.eval.value;
    let mut distinct: Vec<&Track> = Vec::new();
    for t in chosen.iter().filter(|t| {
        t.converged && (t.eval.value - value).abs() <= 1e-8 * value.abs().max(1e-300)
    }) {
        if distinct.iter().all(|o| cosine(&o.c, &t.c) < 0.99) {
            distinct.push(t);
        }
    }
    let positive_found = value > 0.0;
    Ok(MaximizerResult {
        value,
        maximizer: GalerkinVector::new(best.c.clone(), basis)?,
        residual: best.eval.residual,
        restarts_used,
        converged: best.converged && positive_found,
        positive_found,
        iterations: best.iterations,
        distinct_maximizers: distinct
            .into_iter()
            .map(|t| GalerkinVector::new(t.c.clone(), basis))
            .collect::<Result<_>>()?,
    })
}

/// Residual of the eigenrelation `S u - β(u) = λ (I - L) u` at the reported
/// maximizer and value.
pub fn verify_eigenrelation(
    result: &MaximizerResult,
    d2: f64,
    profile: &SourceSinkProfile,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
) -> Result<f64> {
    eigen_residual(&result.maximizer, result.value, d2, profile, b, basis)
}

fn start_set(problem: &ReducedProblem, opts: &MaximizerOptions) -> Result<Vec<Vec<f64>>> {
    let n = problem.basis.n_modes();
    let mut starts = Vec::new();
    if let Some(w) = &opts.warm_start {
        problem.basis.check_len(w.len())?;
        starts.push(w.clone());
    }
    let mut ranked: Vec<(usize, f64)> = (0..n)
        .filter_map(|p| problem.linear_value(p).map(|v| (p, v)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(p, _) in ranked.iter().take(opts.top_k) {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n];
            c[p] = sign;
            starts.push(c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    }
    Ok(starts)
}

fn new_track(problem: &ReducedProblem, mut c: Vec<f64>) -> Option<Track> {
    problem.normalize(&mut c)?;
    let eval = problem.evaluate(&c).ok()?;
    Some(Track {
        c,
        eval,
        history: VecDeque::new(),
        iterations: 0,
        converged: false,
        stuck: false,
        alpha: 0.0,
    })
}

fn advance(problem: &ReducedProblem, t: &mut Track, budget: usize, opts: &MaximizerOptions) {
    for _ in 0..budget {
        if t.done() {
            return;
        }
        t.iterations += 1;
        let current = t.eval.value;
        let tiny = 1e-15 * current.abs().max(1e-300);

        let mut moved = false;
        if let Some((c, e)) = frozen_sign_step(problem, &t.c, &t.eval.values) {
            if e.value > current + tiny {
                t.c = c;
                t.eval = e;
                moved = true;
            }
        }
        if !moved {
            if let Some((c, e, alpha)) = ascent_step(problem, &t.c, &t.eval, t.alpha) {
                t.c = c;
                t.eval = e;
                t.alpha = alpha;
                moved = true;
            }
        }

        t.history.push_back(t.eval.value);
        if t.history.len() > opts.stall_window + 1 {
            t.history.pop_front();
        }
        let stalled = t.history.len() > opts.stall_window && {
            let old = t.history[0];
            (t.eval.value - old).abs() <= opts.value_rtol * t.eval.value.abs()
        };
        if (stalled || !moved) && t.eval.residual <= opts.residual_tol {
            t.converged = true;
        } else if !moved {
            t.stuck = true;
        }
    }
}

fn ascent_step(
    problem: &ReducedProblem,
    c: &[f64],
    eval: &QuotientEval,
    prev_alpha: f64,
) -> Option<(Vec<f64>, QuotientEval, f64)> {
    let g = &eval.gradient;
    let g2: f64 = g.iter().map(|x| x * x).sum();
    if !(g2 > 0.0) {
        return None;
    }
    // first trial moves the iterate by ~0.1 on the unit sphere unless a
    // previous accepted step suggests a larger one
    let mut alpha = (0.1 / g2.sqrt()).max(2.0 * prev_alpha);
    for _ in 0..60 {
        let mut trial: Vec<f64> = c.iter().zip(g).map(|(a, d)| a + alpha * d).collect();
        if problem.normalize(&mut trial).is_some() {
            if let Ok(e) = problem.evaluate(&trial) {
                if e.value >= eval.value + 1e-4 * alpha * g2 {
                    return Some((trial, e, alpha));
                }
            }
        }
        alpha *= 0.5;
    }
    None
}

/// Top eigenvector of the quotient with the sign pattern of `values` frozen.
fn frozen_sign_step(
    problem: &ReducedProblem,
    c: &[f64],
    values: &[f64],
) -> Option<(Vec<f64>, QuotientEval)> {
    let n = c.len();
    let basis = problem.basis;
    let mut k = DMatrix::<f64>::zeros(n, n);
    for (p, l) in problem.s_diag.iter().enumerate() {
        k[(p, p)] = *l;
    }
    if !problem.profile.is_zero() {
        k -= frozen_beta_matrix(problem.profile, basis, values);
    }

    let mut v = if basis.has_dirichlet() {
        top_eigenvector(k)?
    } else {
        // the constant mode sits at position 0 with zero denominator weight
        let k00 = k[(0, 0)];
        if !(k00 < 0.0) {
            return None;
        }
        let kr = k.view((1, 0), (n - 1, 1)).into_owned();
        let mut reduced = k.view((1, 1), (n - 1, n - 1)).into_owned() - &kr * kr.transpose() / k00;
        let scale: Vec<f64> = problem.denom[1..].iter().map(|m| m.sqrt().recip()).collect();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                reduced[(i, j)] *= scale[i] * scale[j];
            }
        }
        let y = top_eigenvector(reduced)?;
        let rest: Vec<f64> = y.iter().zip(&scale).map(|(a, s)| a * s).collect();
        let c0 = -rest.iter().zip(kr.iter()).map(|(a, b)| a * b).sum::<f64>() / k00;
        std::iter::once(c0).chain(rest).collect()
    };
    let align: f64 = v
        .iter()
        .zip(c)
        .zip(&problem.denom)
        .map(|((a, b), m)| a * b * m.max(1e-3))
        .sum();
    if align < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    problem.normalize(&mut v)?;
    let e = problem.evaluate(&v).ok()?;
    Some((v, e))
}

fn top_eigenvector(m: DMatrix<f64>) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::new(m);
    let (imax, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    Some(eig.eigenvectors.column(imax).iter().copied().collect())
}

/// Matrix of `β` restricted to the sign pattern of `values`:
/// `∫ a(x) e_p e_q` with `a = s_+` where `u > 0` and `s_-` elsewhere.
fn frozen_beta_matrix(profile: &SourceSinkProfile, basis: &SpectralBasis, values: &[f64]) -> DMatrix<f64> {
    let strength = profile.active_strength(values);
    let nodes: Vec<(usize, f64)> = match profile.placement() {
        Placement::Interior => basis
            .weights()
            .iter()
            .enumerate()
            .map(|(g, w)| (g, w * strength[g]))
            .filter(|(_, w)| *w > 0.0)
            .collect(),
        Placement::Boundary => basis
            .neumann_nodes()
            .iter()
            .map(|&(g, w)| (g, w * strength[g]))
            .filter(|(_, w)| *w > 0.0)
            .collect(),
    };
    let n = basis.n_modes();
    let sqrt_w: Vec<f64> = nodes.iter().map(|(_, w)| w.sqrt()).collect();
    let f = DMatrix::from_fn(n, nodes.len(), |p, i| basis.pairs[p].values[nodes[i].0] * sqrt_w[i]);
    &f * f.transpose()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{BoundarySpec, DomainSpec};
    use crate::geometry::envelope_d1max;
    use std::f64::consts::PI;

    #[test]
    fn linear_case_hits_envelope() {
        let basis = SpectralBasis::new(
            DomainSpec::interval(PI, 512).unwrap(),
            BoundarySpec::dirichlet(1),
            32,
        )
        .unwrap();
        let m = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0).unwrap();
        let prof = SourceSinkProfile::zero(&basis);
        let r = maximize_rayleigh(2.0, &prof, &m, &basis, &MaximizerOptions::default()).unwrap();
        let env = envelope_d1max(2.0, &m, &basis).unwrap();
        assert!(r.converged);
        assert!((r.value - env.d1max).abs() <= 1e-12);
        assert!(r.residual < 1e-10);
        assert!(r.maximizer.coeffs()[0].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let basis = SpectralBasis::new(
            DomainSpec::interval(PI, 256).unwrap(),
            BoundarySpec::neumann(1),
            16,
        )
        .unwrap();
        let m = ReactionMatrix::new(1.0, -2.0, 2.0, -3.0).unwrap();
        let prof = SourceSinkProfile::constant(0.0, 0.1, Placement::Interior, &basis).unwrap();
        let opts = MaximizerOptions::default();
        let a = maximize_rayleigh(2.0, &prof, &m, &basis, &opts).unwrap();
        let b = maximize_rayleigh(2.0, &prof, &m, &basis, &opts).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.maximizer, b.maximizer);
    }
}
