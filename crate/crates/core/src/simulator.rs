//! Time integration of the evolution system
//!
//! ```text
//! u_t = d1 Δu + b11 u + b12 v + n1(u, v) + f̃_-(u⁻) - f̃_+(u⁺)
//! v_t = d2 Δv + b21 u + b22 v + n2(u, v)
//! ```
//!
//! with `f̃_∓(ξ) = s_∓ ξ / (1 + ε ξ)`, either in the interior or as the flux
//! on the Neumann boundary. Fields are expanded in the L²-orthonormal version
//! of the spectral basis. Each step is a Strang splitting: half a step of exact
//! diffusion, a Heun step for the reaction projected back onto the basis,
//! then another half step of diffusion.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};
use crate::geometry::{DiffusionPoint, ReactionMatrix};
use crate::sweep::format_float;
use crate::unilateral::{Placement, SourceSinkProfile};

/// Largest admissible `‖B‖_F · dt`.
pub const STABILITY_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    /// Power of `u`.
    pub pu: u32,
    /// Power of `v`.
    pub pv: u32,
}

/// Sum of monomials of total degree at least two.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        for m in &terms {
            if m.pu + m.pv < 2 {
                return Err(Error::InvalidParameter(format!(
                    "higher-order term u^{} v^{} has degree below two",
                    m.pu, m.pv
                )));
            }
            if !m.coeff.is_finite() {
                return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
            }
        }
        Ok(Self { terms })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c u³`.
    pub fn cubic_u(c: f64) -> Self {
        Self {
            terms: vec![Monomial { coeff: c, pu: 3, pv: 0 }],
        }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coeff * u.powi(m.pu as i32) * v.powi(m.pv as i32))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionKinetics {
    linear: [f64; 4],
    pub n1: Polynomial,
    pub n2: Polynomial,
    /// Smoothing in `s ξ / (1 + ε ξ)`; zero gives the homogenized terms.
    pub epsilon: f64,
}

impl ReactionKinetics {
    pub fn new(b: &ReactionMatrix, n1: Polynomial, n2: Polynomial, epsilon: f64) -> Result<Self> {
        Self::from_entries([b.b11(), b.b12(), b.b21(), b.b22()], n1, n2, epsilon)
    }

    /// Kinetics with an arbitrary (possibly zero) linear part.
    pub fn from_entries(linear: [f64; 4], n1: Polynomial, n2: Polynomial, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if linear.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite linear part".into()));
        }
        Ok(Self {
            linear,
            n1,
            n2,
            epsilon,
        })
    }

    /// Linear kinetics `B` with the default saturation `n1 = -u³`.
    pub fn with_defaults(b: &ReactionMatrix) -> Self {
        Self::new(b, Polynomial::cubic_u(-1.0), Polynomial::zero(), 1.0).expect("valid defaults")
    }

    pub fn linear(b: &ReactionMatrix) -> Self {
        Self::new(b, Polynomial::zero(), Polynomial::zero(), 0.0).expect("valid linear kinetics")
    }

    pub fn linear_part(&self) -> [f64; 4] {
        self.linear
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.linear.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `(f, g)` at `(u, v)` without unilateral terms.
    pub fn eval(&self, u: f64, v: f64) -> (f64, f64) {
        let [b11, b12, b21, b22] = self.linear;
        (
            b11 * u + b12 * v + self.n1.eval(u, v),
            b21 * u + b22 * v + self.n2.eval(u, v),
        )
    }

    /// Unilateral contribution `f̃_-(u⁻) - f̃_+(u⁺)`.
    pub fn unilateral(&self, u: f64, s_minus: f64, s_plus: f64) -> f64 {
        if u > 0.0 {
            -s_plus * u / (1.0 + self.epsilon * u)
        } else {
            let m = -u;
            s_minus * m / (1.0 + self.epsilon * m)
        }
    }
}

/// Fields on the grid together with their L²-orthonormal modal coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub dt: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub cu: Vec<f64>,
    pub cv: Vec<f64>,
}

impl SimState {
    pub fn amplitude(&self, p: usize) -> f64 {
        self.cu[p].hypot(self.cv[p])
    }

    pub fn total_amplitude(&self) -> f64 {
        self.cu.iter().chain(&self.cv).map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Cached L²-orthonormal basis and the operators needed for stepping.
pub struct Simulator<'a> {
    basis: &'a SpectralBasis,
    kinetics: &'a ReactionKinetics,
    profile: &'a SourceSinkProfile,
    point: DiffusionPoint,
    phi: Vec<Vec<f64>>,
    weighted_phi: Vec<Vec<f64>>,
}

impl<'a> Simulator<'a> {
    pub fn new(
        basis: &'a SpectralBasis,
        kinetics: &'a ReactionKinetics,
        profile: &'a SourceSinkProfile,
        point: DiffusionPoint,
    ) -> Result<Self> {
        basis.check_len_grid(profile.s_plus().len())?;
        let phi: Vec<Vec<f64>> = basis
            .pairs
            .iter()
            .zip(&basis.mass_diagonal)
            .map(|(p, mu)| {
                let s = mu.sqrt().recip();
                p.values.iter().map(|v| v * s).collect()
            })
            .collect();
        let weighted_phi = phi
            .iter()
            .map(|f| f.iter().zip(basis.weights()).map(|(a, w)| a * w).collect())
            .collect();
        Ok(Self {
            basis,
            kinetics,
            profile,
            point,
            phi,
            weighted_phi,
        })
    }

    pub fn basis(&self) -> &SpectralBasis {
        self.basis
    }

    pub fn evaluate(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.basis.grid_len()];
        for (a, f) in c.iter().zip(&self.phi) {
            if *a != 0.0 {
                out.iter_mut().zip(f).for_each(|(o, v)| *o += a * v);
            }
        }
        out
    }

    /// L² coefficients of a grid function.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        self.weighted_phi
            .iter()
            .map(|w| w.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn state(&self, cu: Vec<f64>, cv: Vec<f64>, dt: f64) -> Result<SimState> {
        self.basis.check_len(cu.len())?;
        self.basis.check_len(cv.len())?;
        self.check_dt(dt)?;
        Ok(SimState {
            t: 0.0,
            dt,
            u: self.evaluate(&cu),
            v: self.evaluate(&cv),
            cu,
            cv,
        })
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if self.kinetics.frobenius_norm() * dt > STABILITY_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} violates ‖B‖·dt ≤ {STABILITY_LIMIT}"
            )));
        }
        Ok(())
    }

    fn diffuse(&self, c: &mut [f64], d: f64, tau: f64) {
        for (a, p) in c.iter_mut().zip(&self.basis.pairs) {
            *a *= (-d * p.kappa * tau).exp();
        }
    }

    fn reaction(&self, cu: &[f64], cv: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let u = self.evaluate(cu);
        let v = self.evaluate(cv);
        let mut fu = Vec::with_capacity(u.len());
        let mut fv = Vec::with_capacity(u.len());
        let interior = self.profile.placement() == Placement::Interior;
        let (sm, sp) = (self.profile.s_minus(), self.profile.s_plus());
        for i in 0..u.len() {
            let (f, g) = self.kinetics.eval(u[i], v[i]);
            let uni = if interior {
                self.kinetics.unilateral(u[i], sm[i], sp[i])
            } else {
                0.0
            };
            fu.push(f + uni);
            fv.push(g);
        }
        let mut ru = self.project(&fu);
        let rv = self.project(&fv);
        if !interior {
            for &(i, w) in self.basis.neumann_nodes() {
                let flux = w * self.kinetics.unilateral(u[i], sm[i], sp[i]);
                if flux != 0.0 {
                    ru.iter_mut().zip(&self.phi).for_each(|(r, f)| *r += flux * f[i]);
                }
            }
        }
        (ru, rv)
    }

    pub fn step(&self, state: &mut SimState) -> Result<()> {
        self.check_dt(state.dt)?;
        let dt = state.dt;
        let (d1, d2) = (self.point.d1, self.point.d2);
        let mut cu = state.cu.clone();
        let mut cv = state.cv.clone();
        self.diffuse(&mut cu, d1, 0.5 * dt);
        self.diffuse(&mut cv, d2, 0.5 * dt);

        let (k1u, k1v) = self.reaction(&cu, &cv);
        let pu: Vec<f64> = cu.iter().zip(&k1u).map(|(a, k)| a + dt * k).collect();
        let pv: Vec<f64> = cv.iter().zip(&k1v).map(|(a, k)| a + dt * k).collect();
        let (k2u, k2v) = self.reaction(&pu, &pv);
        for i in 0..cu.len() {
            cu[i] += 0.5 * dt * (k1u[i] + k2u[i]);
            cv[i] += 0.5 * dt * (k1v[i] + k2v[i]);
        }

        self.diffuse(&mut cu, d1, 0.5 * dt);
        self.diffuse(&mut cv, d2, 0.5 * dt);
        let t = state.t + dt;
        for (what, c) in [("u", &cu), ("v", &cv)] {
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::NumericalBlowUp { t, what: what.into() });
            }
        }
        state.u = self.evaluate(&cu);
        state.v = self.evaluate(&cv);
        state.cu = cu;
        state.cv = cv;
        state.t = t;
        Ok(())
    }
}

/// One step without a cached [`Simulator`].
pub fn step(
    state: &SimState,
    kinetics: &ReactionKinetics,
    profile: &SourceSinkProfile,
    d: DiffusionPoint,
    basis: &SpectralBasis,
) -> Result<SimState> {
    let sim = Simulator::new(basis, kinetics, profile, d)?;
    let mut next = state.clone();
    sim.step(&mut next)?;
    Ok(next)
}

/// Dominant real part of the eigenvalues of
/// `[[-d1 κ + b11, b12], [b21, -d2 κ + b22]]`.
pub fn modal_growth_oracle(d: DiffusionPoint, linear: [f64; 4], kappa: f64) -> f64 {
    let [b11, b12, b21, b22] = linear;
    let a = -d.d1 * kappa + b11;
    let dd = -d.d2 * kappa + b22;
    let tr = a + dd;
    let det = a * dd - b12 * b21;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        tr / 2.0 + disc.sqrt()
    } else {
        tr / 2.0
    }
}

/// Amplitude window of the linear regime used for rate fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitWindow {
    pub min_amplitude: f64,
    pub max_amplitude: f64,
    /// Samples before this time are skipped (initial transient).
    pub t_min: f64,
    pub min_samples: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            min_amplitude: 1e-10,
            max_amplitude: 1e-4,
            t_min: 0.0,
            min_samples: 10,
        }
    }
}

/// Least-squares slope of `ln |a|` against `t` over samples inside `window`.
pub fn measure_growth_rate(times: &[f64], amplitudes: &[f64], window: &FitWindow) -> Result<f64> {
    if times.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: amplitudes.len(),
        });
    }
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(amplitudes)
        .filter(|(t, a)| {
            **t >= window.t_min && a.abs() >= window.min_amplitude && a.abs() <= window.max_amplitude
        })
        .map(|(t, a)| (*t, a.abs().ln()))
        .collect();
    if pts.len() < window.min_samples.max(2) {
        return Err(Error::EmptyFitWindow(format!(
            "{} samples inside [{:e}, {:e}] after t = {}, need {}",
            pts.len(),
            window.min_amplitude,
            window.max_amplitude,
            window.t_min,
            window.min_samples.max(2)
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::EmptyFitWindow("all samples at one time".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    /// `u = amplitude · φ_j`, `v = 0`.
    SingleMode { mode: usize },
    /// Gaussian coefficients on every mode of both fields, scaled to total
    /// amplitude.
    WhiteNoise { seed: u64 },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d1: f64,
    pub d2: f64,
    pub dt: f64,
    pub horizon: f64,
    pub amplitude: f64,
    pub perturbation: Perturbation,
    /// Mode whose amplitude is traced separately; defaults to the perturbed
    /// mode, or the first non-constant mode.
    pub observe_mode: Option<usize>,
    pub record_every: usize,
    pub fit: FitWindow,
    /// Rates within this band count as neutral.
    pub neutral_tol: f64,
    /// Stop once the total amplitude exceeds this value.
    pub stop_amplitude: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d1: 0.1,
            d2: 2.0,
            dt: 0.01,
            horizon: 200.0,
            amplitude: 1e-6,
            perturbation: Perturbation::SingleMode { mode: 1 },
            observe_mode: None,
            record_every: 10,
            fit: FitWindow {
                t_min: 2.0,
                ..FitWindow::default()
            },
            neutral_tol: 1e-3,
            stop_amplitude: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Grows,
    Decays,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    /// Mode index, or `total` for the norm of all coefficients.
    pub mode: String,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub classification: Outcome,
    /// Rate fitted to the total amplitude.
    pub fitted_rate: Option<f64>,
    /// Rate fitted to the observed mode.
    pub mode_rate: Option<f64>,
    pub observed_mode: usize,
    /// Dominant eigenvalue of the linear modal matrix of the observed mode.
    pub oracle_rate: f64,
    pub final_time: f64,
    pub final_amplitude: f64,
    pub steps: usize,
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    basis: &SpectralBasis,
    kinetics: &ReactionKinetics,
    profile: &SourceSinkProfile,
) -> Result<(ExperimentReport, Vec<TraceRow>)> {
    let point = DiffusionPoint::new(cfg.d1, cfg.d2)?;
    if !(cfg.horizon > 0.0) || cfg.record_every == 0 {
        return Err(Error::InvalidParameter("horizon and record_every must be positive".into()));
    }
    let sim = Simulator::new(basis, kinetics, profile, point)?;
    let n = basis.n_modes();
    let mut cu = vec![0.0; n];
    let mut cv = vec![0.0; n];
    let default_mode = basis
        .pairs
        .iter()
        .find(|p| p.kappa > 0.0)
        .map_or(basis.first_index(), |p| p.index);
    let perturbed = match &cfg.perturbation {
        Perturbation::SingleMode { mode } => {
            cu[basis.position(*mode)?] = cfg.amplitude;
            Some(*mode)
        }
        Perturbation::WhiteNoise { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for c in cu.iter_mut().chain(cv.iter_mut()) {
                *c = StandardNormal.sample(&mut rng);
            }
            let norm = cu.iter().chain(&cv).map(|c| c * c).sum::<f64>().sqrt();
            cu.iter_mut().chain(cv.iter_mut()).for_each(|c| *c *= cfg.amplitude / norm);
            None
        }
        Perturbation::Zero => None,
    };
    let observed_mode = cfg.observe_mode.or(perturbed).unwrap_or(default_mode);
    let obs = basis.position(observed_mode)?;
    let mut state = sim.state(cu, cv, cfg.dt)?;

    let mut trace = Vec::new();
    let mut times = Vec::new();
    let mut totals = Vec::new();
    let mut modal = Vec::new();
    let mut record = |s: &SimState, trace: &mut Vec<TraceRow>| {
        let a = s.amplitude(obs);
        let total = s.total_amplitude();
        trace.push(TraceRow {
            t: s.t,
            mode: observed_mode.to_string(),
            amplitude: a,
        });
        trace.push(TraceRow {
            t: s.t,
            mode: "total".into(),
            amplitude: total,
        });
        times.push(s.t);
        totals.push(total);
        modal.push(a);
    };
    record(&state, &mut trace);
    let n_steps = (cfg.horizon / cfg.dt).round() as usize;
    let mut steps = 0;
    while steps < n_steps {
        sim.step(&mut state)?;
        steps += 1;
        if steps % cfg.record_every == 0 || steps == n_steps {
            record(&state, &mut trace);
            if state.total_amplitude() > cfg.stop_amplitude {
                break;
            }
        }
    }

    let fitted_rate = measure_growth_rate(&times, &totals, &cfg.fit).ok();
    let mode_rate = measure_growth_rate(&times, &modal, &cfg.fit).ok();
    let classification = match fitted_rate {
        Some(r) if r > cfg.neutral_tol => Outcome::Grows,
        Some(r) if r < -cfg.neutral_tol => Outcome::Decays,
        _ => Outcome::Neutral,
    };
    let kappa = basis.pair(observed_mode)?.kappa;
    Ok((
        ExperimentReport {
            classification,
            fitted_rate,
            mode_rate,
            observed_mode,
            oracle_rate: modal_growth_oracle(point, kinetics.linear_part(), kappa),
            final_time: state.t,
            final_amplitude: state.total_amplitude(),
            steps,
        },
        trace,
    ))
}

pub fn write_trace(trace: &[TraceRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "mode", "amplitude"])?;
    for r in trace {
        w.write_record([format_float(r.t), r.mode.clone(), format_float(r.amplitude)])?;
    }
    w.flush()?;
    Ok(())
}
