//! Critical curves over a window of inhibitor diffusion `d2`.
//!
//! For each `d2` the classical envelope value `d1^MAX` and the unilateral
//! maximum `d1^{MAX,β}` are computed; their difference is the width of the
//! strip in which the unilateral terms exclude critical points. The minimum
//! gap over samples that satisfy the sign condition is reported as an
//! empirical lower bound on the exclusion width.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::SpectralBasis;
use crate::error::{Error, Result};
use crate::geometry::{envelope_d1max, hyperbola_intersection, ReactionMatrix};
use crate::unilateral::{
    check_sign_condition_group, maximize_rayleigh, MaximizerOptions, SourceSinkProfile,
    DEFAULT_GROUP_DIRECTIONS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepWindow {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

fn default_samples() -> usize {
    64
}

impl SweepWindow {
    pub fn new(r: f64, big_r: f64, n_samples: usize, spacing: Spacing) -> Result<Self> {
        let w = Self {
            r,
            big_r,
            n_samples,
            spacing,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < self.big_r && self.big_r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sweep window needs 0 < r < R, got [{}, {}]",
                self.r, self.big_r
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidParameter("sweep needs at least 2 samples".into()));
        }
        Ok(())
    }

    /// Sample points in increasing order, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let n = self.n_samples;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.big_r;
                }
                match self.spacing {
                    Spacing::Linear => self.r + t * (self.big_r - self.r),
                    Spacing::Log => (self.r.ln() + t * (self.big_r / self.r).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Samples in order, each warm-started from the previous maximizer.
    #[default]
    Sequential,
    /// Independent cold starts evaluated concurrently.
    ParallelCold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub mode: SweepMode,
    pub sign_directions: usize,
    /// Supplied separately in a run configuration.
    #[serde(skip)]
    pub maximizer: MaximizerOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: SweepMode::Sequential,
            sign_directions: DEFAULT_GROUP_DIRECTIONS,
            maximizer: MaximizerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalCurveSample {
    pub d2: f64,
    pub d1_max: f64,
    /// `None` when no start reaches a positive quotient.
    pub d1_max_beta: Option<f64>,
    pub gap: Option<f64>,
    pub argmax: Vec<usize>,
    pub residual: f64,
    /// The sign condition holds on the argmax eigenspace.
    pub sign_ok: bool,
    pub converged: bool,
    pub maximizer: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub samples: Vec<CriticalCurveSample>,
    /// Minimum gap over samples with the sign condition satisfied.
    pub eps_est: Option<f64>,
}

pub fn sweep_curves(
    window: &SweepWindow,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
    profile: &SourceSinkProfile,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    window.validate()?;
    let points = window.points();
    let samples: Vec<CriticalCurveSample> = match opts.mode {
        SweepMode::Sequential => {
            let mut out: Vec<CriticalCurveSample> = Vec::with_capacity(points.len());
            for &d2 in &points {
                let mut mopts = opts.maximizer.clone();
                if let Some(prev) = out.last().filter(|s| s.converged) {
                    mopts.warm_start = Some(prev.maximizer.clone());
                }
                out.push(sample(d2, b, basis, profile, &mopts, opts.sign_directions)?);
            }
            out
        }
        SweepMode::ParallelCold => points
            .par_iter()
            .map(|&d2| sample(d2, b, basis, profile, &opts.maximizer, opts.sign_directions))
            .collect::<Result<_>>()?,
    };
    let eps_est = samples
        .iter()
        .filter(|s| s.sign_ok)
        .filter_map(|s| s.gap)
        .reduce(f64::min);
    Ok(SweepResult { samples, eps_est })
}

fn sample(
    d2: f64,
    b: &ReactionMatrix,
    basis: &SpectralBasis,
    profile: &SourceSinkProfile,
    mopts: &MaximizerOptions,
    sign_directions: usize,
) -> Result<CriticalCurveSample> {
    let env = envelope_d1max(d2, b, basis)?;
    let r = maximize_rayleigh(d2, profile, b, basis, mopts)?;
    let mut group: Vec<usize> = Vec::new();
    for &j in &env.argmax {
        for k in basis.group_of(j)? {
            if !group.contains(&k) {
                group.push(k);
            }
        }
    }
    group.sort_unstable();
    let sign = check_sign_condition_group(&group, profile, basis, sign_directions)?;
    let beta = r.positive_found.then_some(r.value);
    Ok(CriticalCurveSample {
        d2,
        d1_max: env.d1max,
        d1_max_beta: beta,
        gap: beta.map(|v| env.d1max - v),
        argmax: env.argmax,
        residual: r.residual,
        sign_ok: !sign.violated,
        converged: r.converged,
        maximizer: r.maximizer.into_coeffs(),
    })
}

/// `d2` at which the first two distinct hyperbolas cross, if positive.
pub fn find_c1_c2_intersection(b: &ReactionMatrix, basis: &SpectralBasis) -> Result<Option<f64>> {
    let mut positive = basis.pairs.iter().filter(|p| p.kappa > 0.0);
    let first = positive
        .next()
        .ok_or_else(|| Error::InvalidParameter("basis has no non-constant mode".into()))?;
    let second = positive
        .find(|p| p.kappa > first.kappa * (1.0 + 1e-9))
        .ok_or_else(|| Error::InvalidParameter("basis has a single eigenvalue".into()))?;
    hyperbola_intersection(first.index, second.index, b, basis)
}

pub const CSV_HEADER: [&str; 7] = ["d2", "d1_max", "d1_max_beta", "gap", "argmax", "residual", "sign_ok"];

/// Shortest decimal that parses back to `x`, in exponent form for very
/// small or large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), format_float)
}

/// Writes the samples as CSV. Floats use the shortest decimal form that
/// parses back to the same value.
pub fn emit_curves(samples: &[CriticalCurveSample], path: &Path) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to write".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for s in samples {
        let argmax = s.argmax.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("|");
        w.write_record([
            format_float(s.d2),
            format_float(s.d1_max),
            opt(s.d1_max_beta),
            opt(s.gap),
            argmax,
            format_float(s.residual),
            s.sign_ok.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub d2: f64,
    pub d1_max: f64,
    pub d1_max_beta: Option<f64>,
    pub gap: Option<f64>,
    pub argmax: Vec<usize>,
    pub residual: f64,
    pub sign_ok: bool,
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let bad = |what: &str, v: &str| Error::InvalidParameter(format!("bad {what} field {v:?}"));
    let float = |v: &str, what: &str| v.parse::<f64>().map_err(|_| bad(what, v));
    let opt_float = |v: &str, what: &str| {
        if v == "none" {
            Ok(None)
        } else {
            float(v, what).map(Some)
        }
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::InvalidParameter(format!("expected 7 fields, got {}", rec.len())));
        }
        let argmax = if rec[4].is_empty() {
            Vec::new()
        } else {
            rec[4]
                .split('|')
                .map(|j| j.parse().map_err(|_| bad("argmax", j)))
                .collect::<Result<_>>()?
        };
        out.push(CurveRecord {
            d2: float(&rec[0], "d2")?,
            d1_max: float(&rec[1], "d1_max")?,
            d1_max_beta: opt_float(&rec[2], "d1_max_beta")?,
            gap: opt_float(&rec[3], "gap")?,
            argmax,
            residual: float(&rec[5], "residual")?,
            sign_ok: rec[6].parse().map_err(|_| bad("sign_ok", &rec[6]))?,
        });
    }
    Ok(out)
}

/// SVG plot of `d1^MAX` (red) and `d1^{MAX,β}` (blue) against `d2`.
pub fn render_svg(samples: &[CriticalCurveSample]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let x_min = samples.iter().map(|s| s.d2).fold(f64::INFINITY, f64::min);
    let x_max = samples.iter().map(|s| s.d2).fold(f64::NEG_INFINITY, f64::max);
    let y_max = samples.iter().map(|s| s.d1_max).fold(0.0, f64::max) * 1.05;
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let sx = |x: f64| M + (x - x_min) / (x_max - x_min).max(f64::MIN_POSITIVE) * (W - 2.0 * M);
    let sy = |y: f64| H - M - y / y_max * (H - 2.0 * M);
    let polyline = |pts: Vec<(f64, f64)>, color: &str| {
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" ")
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <path d=\"M{M},{M} L{M},{} L{},{}\" stroke=\"black\" fill=\"none\"/>",
        H - M,
        W - M,
        H - M
    );
    let _ = writeln!(svg, "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">d2</text>", W / 2.0, H - 15.0);
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">d1</text>",
        H / 2.0,
        H / 2.0
    );
    for (x, anchor) in [(x_min, "start"), (x_max, "end")] {
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"{anchor}\">{x:.3}</text>",
            sx(x),
            H - M + 16.0
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{y_max:.3}</text>",
        M - 4.0,
        sy(y_max)
    );
    svg.push_str(&polyline(samples.iter().map(|s| (s.d2, s.d1_max)).collect(), "red"));
    let beta: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| s.d1_max_beta.map(|v| (s.d2, v.max(0.0))))
        .collect();
    if !beta.is_empty() {
        svg.push_str(&polyline(beta, "blue"));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg(samples: &[CriticalCurveSample], path: &Path) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to plot".into()));
    }
    fs::write(path, render_svg(samples))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_points() {
        let w = SweepWindow::new(0.5, 8.0, 5, Spacing::Log).unwrap();
        let p = w.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[4], 8.0);
        assert!((p[2] - 2.0).abs() < 1e-12);
        let w = SweepWindow::new(1.0, 3.0, 3, Spacing::Linear).unwrap();
        assert_eq!(w.points(), vec![1.0, 2.0, 3.0]);
        assert!(SweepWindow::new(2.0, 1.0, 4, Spacing::Log).is_err());
        assert!(SweepWindow::new(1.0, 2.0, 1, Spacing::Log).is_err());
    }
}
