//! JSON run configuration.
//!
//! Every field has a default, so `{}` describes the reference problem:
//! the interval `(0, π)` with Dirichlet ends, `B = (1, -2, 2, -3)` and no
//! unilateral terms. Any leaf can be overridden with a dotted path
//! (`profile.s_plus=0.1`, `window.n_samples=16`).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::eigenbasis::{
    BoundarySpec, DomainKind, DomainSpec, FaceCondition, SpectralBasis, DEFAULT_MODES_1D,
    DEFAULT_MODES_2D, DEFAULT_RESOLUTION_1D, DEFAULT_RESOLUTION_2D,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{DiffusionPoint, ReactionMatrix};
use crate::simulator::{ExperimentConfig, Polynomial, ReactionKinetics};
use crate::sweep::{Spacing, SweepOptions, SweepWindow};
use crate::unilateral::{MaximizerOptions, Placement, SourceSinkProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    pub lengths: Vec<f64>,
    /// Points per axis; defaults to 512 in 1D and 128 in 2D.
    pub grid_resolution: Option<usize>,
    /// Defaults to 64 in 1D and 100 in 2D.
    pub n_modes: Option<usize>,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            kind: DomainKind::Interval,
            lengths: vec![PI],
            grid_resolution: None,
            n_modes: None,
        }
    }
}

/// One condition for every face, or one per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryConfig {
    Uniform(FaceCondition),
    Faces(Vec<FaceCondition>),
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self::Uniform(FaceCondition::Dirichlet)
    }
}

/// A constant or an expression in `x`, `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileValue {
    Constant(f64),
    Expression(String),
}

impl Default for ProfileValue {
    fn default() -> Self {
        Self::Constant(0.0)
    }
}

impl ProfileValue {
    fn sample(&self, basis: &SpectralBasis, name: &str) -> Result<Vec<f64>> {
        match self {
            Self::Constant(c) => Ok(vec![*c; basis.grid_len()]),
            Self::Expression(src) => {
                let e = Expr::parse(src)?;
                let v = basis.grid_function(|x, y| e.eval(x, y));
                if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                    let [x, y] = basis.coords()[bad];
                    return Err(Error::Expression(format!(
                        "{name} = {src:?} is not finite at ({x}, {y})"
                    )));
                }
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub s_minus: ProfileValue,
    pub s_plus: ProfileValue,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KineticsConfig {
    pub n1: Polynomial,
    pub n2: Polynomial,
    pub epsilon: f64,
}

impl Default for KineticsConfig {
    fn default() -> Self {
        Self {
            n1: Polynomial::cubic_u(-1.0),
            n2: Polynomial::zero(),
            epsilon: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub boundary: BoundaryConfig,
    pub matrix: ReactionMatrix,
    pub profile: ProfileConfig,
    /// Point for `analyze`.
    pub point: Option<DiffusionPoint>,
    /// `d2` used by `spectrum` and `check-condition`.
    pub d2: f64,
    pub window: SweepWindow,
    pub sweep: SweepOptions,
    pub maximizer: MaximizerOptions,
    pub kinetics: KineticsConfig,
    pub simulation: ExperimentConfig,
    /// Overrides every other seed when set.
    pub seed: Option<u64>,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: DomainConfig::default(),
            boundary: BoundaryConfig::default(),
            matrix: ReactionMatrix::new(1.0, -2.0, 2.0, -3.0).expect("reference matrix"),
            profile: ProfileConfig::default(),
            point: None,
            d2: 2.0,
            window: SweepWindow {
                r: 0.5,
                big_r: 10.0,
                n_samples: 64,
                spacing: Spacing::Log,
            },
            sweep: SweepOptions::default(),
            maximizer: MaximizerOptions::default(),
            kinetics: KineticsConfig::default(),
            simulation: ExperimentConfig::default(),
            seed: None,
            output: OutputConfig::default(),
        }
    }
}

/// Sets the leaf at a dotted path. The value is parsed as JSON and taken as
/// a string when that fails, so `profile.s_plus=sin(x)` works unquoted.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad key path {path:?}")));
    }
    let mut node = root;
    for key in &keys[..keys.len() - 1] {
        if !node.is_object() {
            return Err(Error::Config(format!("{path:?} descends into a non-object")));
        }
        node = node
            .as_object_mut()
            .expect("checked object")
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    match node.as_object_mut() {
        Some(obj) => {
            let leaf = keys[keys.len() - 1];
            // switching a tagged variant drops the old variant's fields
            if leaf == "kind" && obj.get("kind").is_some_and(|k| *k != value) {
                obj.clear();
            }
            obj.insert(leaf.to_string(), value);
            Ok(())
        }
        None => Err(Error::Config(format!("{path:?} descends into a non-object"))),
    }
}

/// Recursively overlays `top` on `base`. Objects tagged with different
/// `kind` values are replaced rather than merged.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) if b.get("kind") == t.get("kind") || !t.contains_key("kind") => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, t) => *slot = t,
    }
}

impl RunConfig {
    /// Overlays a JSON document and dotted overrides on the defaults, then
    /// validates. Returns the config with the effective JSON for echoing.
    pub fn from_value(value: Value, overrides: &[String]) -> Result<(Self, Value)> {
        if !value.is_object() {
            return Err(Error::Config("configuration must be a JSON object".into()));
        }
        let mut doc = serde_json::to_value(RunConfig::default())?;
        merge(&mut doc, value);
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(seed) = cfg.seed {
            cfg.maximizer.seed = seed;
            if let crate::simulator::Perturbation::WhiteNoise { seed: s } =
                &mut cfg.simulation.perturbation
            {
                *s = seed;
            }
        }
        cfg.validate()?;
        let echo = serde_json::to_value(&cfg)?;
        Ok((cfg, echo))
    }

    pub fn from_json_str(src: &str, overrides: &[String]) -> Result<(Self, Value)> {
        let value: Value = serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_value(value, overrides)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<(Self, Value)> {
        match path {
            Some(p) => {
                let src = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                Self::from_json_str(&src, overrides)
            }
            None => Self::from_value(Value::Object(Default::default()), overrides),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("maximizer.value_rtol", self.maximizer.value_rtol),
            ("maximizer.residual_tol", self.maximizer.residual_tol),
            ("simulation.dt", self.simulation.dt),
            ("simulation.horizon", self.simulation.horizon),
            ("simulation.amplitude", self.simulation.amplitude),
            ("simulation.neutral_tol", self.simulation.neutral_tol),
            ("d2", self.d2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        self.window.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.kinetics.epsilon >= 0.0) {
            return Err(Error::Config("kinetics.epsilon must be >= 0".into()));
        }
        if let Some(p) = self.point {
            DiffusionPoint::new(p.d1, p.d2).map_err(|e| Error::Config(e.to_string()))?;
        }
        for p in [&self.profile.s_minus, &self.profile.s_plus] {
            if let ProfileValue::Expression(src) = p {
                Expr::parse(src)?;
            }
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec> {
        let d = &self.domain;
        match d.kind {
            DomainKind::Interval => {
                let [l] = d.lengths[..] else {
                    return Err(Error::Config("an interval needs one length".into()));
                };
                DomainSpec::interval(l, d.grid_resolution.unwrap_or(DEFAULT_RESOLUTION_1D))
            }
            DomainKind::Rectangle => {
                let [lx, ly] = d.lengths[..] else {
                    return Err(Error::Config("a rectangle needs two lengths".into()));
                };
                DomainSpec::rectangle(lx, ly, d.grid_resolution.unwrap_or(DEFAULT_RESOLUTION_2D))
            }
        }
    }

    pub fn boundary_spec(&self, dim: usize) -> BoundarySpec {
        match &self.boundary {
            BoundaryConfig::Uniform(c) => BoundarySpec::uniform(*c, dim),
            BoundaryConfig::Faces(f) => BoundarySpec::new(f.clone()),
        }
    }

    pub fn basis(&self) -> Result<SpectralBasis> {
        let domain = self.domain_spec()?;
        let dim = domain.dim();
        let n = self
            .domain
            .n_modes
            .unwrap_or(if dim == 1 { DEFAULT_MODES_1D } else { DEFAULT_MODES_2D });
        SpectralBasis::new(domain, self.boundary_spec(dim), n)
    }

    /// Sweep options with the shared maximizer settings.
    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            maximizer: self.maximizer.clone(),
            ..self.sweep.clone()
        }
    }

    pub fn source_sink(&self, basis: &SpectralBasis) -> Result<SourceSinkProfile> {
        SourceSinkProfile::new(
            self.profile.s_minus.sample(basis, "s_minus")?,
            self.profile.s_plus.sample(basis, "s_plus")?,
            self.profile.placement,
            basis,
        )
    }

    pub fn kinetics(&self) -> Result<ReactionKinetics> {
        let k = &self.kinetics;
        ReactionKinetics::new(
            &self.matrix,
            Polynomial::new(k.n1.terms().to_vec())?,
            Polynomial::new(k.n2.terms().to_vec())?,
            k.epsilon,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference_problem() {
        let (cfg, echo) = RunConfig::from_json_str("{}", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(echo["matrix"]["b12"], -2.0);
        let basis = cfg.basis().unwrap();
        assert_eq!(basis.n_modes(), 64);
    }

    #[test]
    fn overrides_reach_nested_leaves() {
        let sets = [
            "profile.s_plus=0.1".to_string(),
            "profile.s_minus=max(x, 1)".to_string(),
            "boundary=neumann".to_string(),
            "window.n_samples=8".to_string(),
            "seed=7".to_string(),
        ];
        let (cfg, _) = RunConfig::from_json_str("{}", &sets).unwrap();
        assert_eq!(cfg.profile.s_plus, ProfileValue::Constant(0.1));
        assert_eq!(cfg.profile.s_minus, ProfileValue::Expression("max(x, 1)".into()));
        assert_eq!(cfg.boundary, BoundaryConfig::Uniform(FaceCondition::Neumann));
        assert_eq!(cfg.window.n_samples, 8);
        assert_eq!(cfg.maximizer.seed, 7);
    }

    #[test]
    fn schema_violations_are_config_errors() {
        for (doc, sets) in [
            (r#"{"nope": 1}"#, vec![]),
            (r#"{"matrix": {"b11": 1, "b12": -2, "b21": -2, "b22": -3}}"#, vec![]),
            ("{}", vec!["maximizer.residual_tol=-1".to_string()]),
            ("{}", vec!["profile.s_plus=sin(".to_string()]),
            ("{}", vec!["window.R=0.1".to_string()]),
        ] {
            assert!(RunConfig::from_json_str(doc, &sets).is_err(), "{doc} {sets:?}");
        }
    }
}
