//! Scenario files: a JSON document with a fixed set of keys.
//!
//! ```json
//! {
//!   "name": "negative_coherence",
//!   "n": 3,
//!   "temperatures": [1.0, 1.0, 1.0],
//!   "bath_temperature": 0.9,
//!   "coherence": [{ "p": 1, "q": 2, "lambda": 0.5, "alpha_pi": 1.0 }],
//!   "g": 20.0,
//!   "tau": 0.01,
//!   "collisions": 100
//! }
//! ```
//!
//! Spins are numbered from 1 in files and from 0 internally. Energies are in
//! units of `δ` (default 1), times in `1/δ`, temperatures in `δ`.

use std::f64::consts::PI;
use std::path::Path;

use heatflow_core::collision::{CollisionConfig, Generator, Variant};
use heatflow_core::model::{CoherenceSpec, CoherenceTerm, SpinChainSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Collision,
    Lindblad,
    Both,
}

impl Engine {
    pub fn runs_collision(self) -> bool {
        matches!(self, Engine::Collision | Engine::Both)
    }

    pub fn runs_lindblad(self) -> bool {
        matches!(self, Engine::Lindblad | Engine::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantName {
    #[default]
    Cascade,
    Simultaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    #[default]
    Full,
    InteractionOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceEntry {
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    /// Phase in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Phase in units of π.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_pi: Option<f64>,
}

impl CoherenceEntry {
    pub fn phase(&self) -> f64 {
        match (self.alpha, self.alpha_pi) {
            (Some(a), _) => a,
            (None, Some(a)) => a * PI,
            (None, None) => 0.0,
        }
    }
}

/// Observable groups that can be selected with `outputs`.
pub const OBSERVABLES: [&str; 8] = ["E", "Q_bath", "F", "I_SR", "C", "C_k", "AT_k", "AT_global"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: usize,
    #[serde(default = "one")]
    pub delta: f64,
    pub temperatures: Vec<f64>,
    pub bath_temperature: f64,
    #[serde(default)]
    pub coherence: Vec<CoherenceEntry>,
    pub g: f64,
    pub tau: f64,
    /// 1-based interaction order; natural order when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    #[serde(default)]
    pub variant: VariantName,
    #[serde(default)]
    pub generator: GeneratorName,
    pub collisions: usize,
    /// Observable groups written to CSV; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(default)]
    pub engine: Engine,
}

fn one() -> f64 {
    1.0
}

/// Everything the engines need, checked against the core invariants.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub spec: SpinChainSpec,
    pub coherence: CoherenceSpec,
    pub collision: CollisionConfig,
    pub outputs: Vec<String>,
    pub engine: Engine,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<Scenario, CliError> {
        let bad = |msg: String| CliError::Validation(msg);
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(bad(format!("name {:?} must be non-empty and file-name safe", self.name)));
        }
        if self.temperatures.len() != self.n {
            return Err(bad(format!("{} temperatures given for n = {}", self.temperatures.len(), self.n)));
        }
        if !(1..=5).contains(&self.n) {
            return Err(bad(format!("n = {} is outside the supported range 1..=5", self.n)));
        }
        let spec = SpinChainSpec::from_temperatures(self.delta, &self.temperatures, self.bath_temperature)
            .map_err(|e| bad(e.to_string()))?;

        let mut terms = Vec::with_capacity(self.coherence.len());
        for c in &self.coherence {
            if c.alpha.is_some() && c.alpha_pi.is_some() {
                return Err(bad(format!("coherence ({}, {}) sets both alpha and alpha_pi", c.p, c.q)));
            }
            if c.p == 0 || c.q == 0 || c.p > self.n || c.q > self.n || c.p == c.q {
                return Err(bad(format!(
                    "coherence pair ({}, {}) is not a pair of distinct spins 1..={}",
                    c.p, c.q, self.n
                )));
            }
            let (p, q) = (c.p.min(c.q) - 1, c.p.max(c.q) - 1);
            // (q, p) written in reverse is the conjugate term
            let alpha = if c.p < c.q { c.phase() } else { -c.phase() };
            terms.push(CoherenceTerm::new(p, q, c.lambda, alpha));
        }
        let coherence = CoherenceSpec::new(terms);
        coherence.validate(self.n).map_err(|e| bad(e.to_string()))?;

        let order = match &self.order {
            None => (0..self.n).collect(),
            Some(o) => {
                if o.contains(&0) {
                    return Err(bad("order is 1-based".into()));
                }
                o.iter().map(|k| k - 1).collect()
            }
        };
        let collision = CollisionConfig::cascade(self.n, self.g, self.tau, self.collisions)
            .with_order(order)
            .with_variant(match self.variant {
                VariantName::Cascade => Variant::Cascade,
                VariantName::Simultaneous => Variant::Simultaneous,
            })
            .with_generator(match self.generator {
                GeneratorName::Full => Generator::Full,
                GeneratorName::InteractionOnly => Generator::InteractionOnly,
            });
        collision.validate(self.n).map_err(|e| bad(e.to_string()))?;
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must be rejected too
        if !(self.tau > 0.0) {
            return Err(bad("tau must be positive".into()));
        }

        let outputs = match &self.outputs {
            None => OBSERVABLES.iter().map(|s| s.to_string()).collect(),
            Some(list) => {
                if let Some(unknown) = list.iter().find(|o| !OBSERVABLES.contains(&o.as_str())) {
                    return Err(bad(format!("unknown output {unknown:?}; expected one of {OBSERVABLES:?}")));
                }
                list.clone()
            }
        };
        if self.engine.runs_lindblad() && collision.variant == Variant::Simultaneous {
            return Err(bad("the master equation describes the cascade variant only".into()));
        }

        // surfaces positivity violations before any simulation starts
        heatflow_core::model::initial_state(&spec, &coherence).map_err(|e| bad(e.to_string()))?;

        Ok(Scenario { name: self.name.clone(), spec, coherence, collision, outputs, engine: self.engine })
    }
}

impl Scenario {
    pub fn wants(&self, group: &str) -> bool {
        self.outputs.iter().any(|o| o == group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t", "n": 2, "temperatures": [1.0, 1.0], "bath_temperature": 0.9,
        "g": 20.0, "tau": 0.01, "collisions": 3
    }"#;

    #[test]
    fn defaults() {
        let cfg = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.delta, 1.0);
        assert_eq!(cfg.engine, Engine::Collision);
        let s = cfg.validate().unwrap();
        assert_eq!(s.collision.order, vec![0, 1]);
        assert_eq!(s.outputs.len(), OBSERVABLES.len());
        assert!(s.coherence.is_empty());
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let text = MINIMAL.replace("\"g\"", "\"gee\": 1, \"g\"");
        assert!(matches!(ScenarioConfig::parse(&text), Err(CliError::Parse(_))));
        let text = MINIMAL.replace("\"g\"", "\"coherence\": [{\"p\":1,\"q\":2,\"lambda\":0.1,\"beta\":0}], \"g\"");
        assert!(matches!(ScenarioConfig::parse(&text), Err(CliError::Parse(_))));
    }

    #[test]
    fn phases_and_reversed_pairs() {
        let e = CoherenceEntry { p: 2, q: 1, lambda: 0.5, alpha: None, alpha_pi: Some(0.5) };
        assert!((e.phase() - PI / 2.0).abs() < 1e-15);
        let mut cfg = ScenarioConfig::parse(MINIMAL).unwrap();
        cfg.coherence = vec![e];
        let s = cfg.validate().unwrap();
        let t = &s.coherence.terms[0];
        assert_eq!((t.p, t.q), (0, 1));
        assert!((t.alpha + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let base = ScenarioConfig::parse(MINIMAL).unwrap();
        type Mutation = Box<dyn Fn(&mut ScenarioConfig)>;
        let cases: Vec<Mutation> = vec![
            Box::new(|c| c.temperatures.pop().map(drop).unwrap_or(())),
            Box::new(|c| c.order = Some(vec![1, 1])),
            Box::new(|c| c.order = Some(vec![0, 1])),
            Box::new(|c| c.collisions = 0),
            Box::new(|c| c.tau = 0.0),
            Box::new(|c| c.bath_temperature = -1.0),
            Box::new(|c| c.outputs = Some(vec!["entropy".into()])),
            Box::new(|c| c.coherence = vec![CoherenceEntry { p: 1, q: 3, lambda: 0.1, alpha: None, alpha_pi: None }]),
            Box::new(|c| {
                c.coherence = vec![CoherenceEntry { p: 1, q: 2, lambda: 0.1, alpha: Some(0.0), alpha_pi: Some(0.0) }]
            }),
            // far outside the positivity window
            Box::new(|c| c.coherence = vec![CoherenceEntry { p: 1, q: 2, lambda: 5.0, alpha: None, alpha_pi: None }]),
            Box::new(|c| {
                c.variant = VariantName::Simultaneous;
                c.engine = Engine::Both;
            }),
        ];
        for (i, mutate) in cases.iter().enumerate() {
            let mut cfg = base.clone();
            mutate(&mut cfg);
            assert!(matches!(cfg.validate(), Err(CliError::Validation(_))), "case {i}");
        }
    }
}
