//! Flat `key = value` experiment configuration files.
//!
//! Grammar: one `key = value` pair per line, `#` starts a comment, UTF-8.
//! Unknown and duplicate keys are hard errors so typos in experiment
//! definitions cannot silently change what runs.
//!
//! Keys:
//!   generator.kind   bernoulli | gaussian | poisson | gamma | pareto
//!   generator.p      Bernoulli success probability
//!   generator.mu     Gaussian / Poisson mean
//!   generator.sigma  Gaussian standard deviation
//!   generator.mean   Gamma mean
//!   generator.shape  Gamma / Pareto shape
//!   generator.xm     Pareto scale
//!   methods          comma list of pi1|pi1hat|pi1b|pi1h|hoeffding|bernstein|mpeb
//!   delta            miscoverage level in (0,1)
//!   mode             fixed_n | budget
//!   n                sample size (mode = fixed_n)
//!   budget.C         cost budget (mode = budget)
//!   cost.kind        unit | uniform | exponential (mode = budget)
//!   cost.a cost.b    uniform cost support
//!   cost.mean        exponential cost mean
//!   replications     Monte Carlo replications
//!   model.kind       bernoulli | gaussian | poisson | gamma, for pi1/pi1hat
//!                    (defaults to the generator's family where one exists)
//!   model.sigma      known sigma for a gaussian model (defaults to generator.sigma)
//!   model.shape      known shape for a gamma model (defaults to generator.shape)
//!   heavy.eps        heavy-family eps, required by pi1h
//!   heavy.gamma      heavy-family moment bound, required by pi1h
//!   bernstein.sigma  known standard deviation, required by bernstein

use klci_core::harness::{BudgetMode, CostModel, DataGenerator, ExperimentConfig, MethodSpec};
use klci_core::{ExpFamilyModel, HeavyFamilySpec};
use std::collections::BTreeMap;

const KNOWN_KEYS: &[&str] = &[
    "generator.kind",
    "generator.p",
    "generator.mu",
    "generator.sigma",
    "generator.mean",
    "generator.shape",
    "generator.xm",
    "methods",
    "delta",
    "mode",
    "n",
    "budget.C",
    "cost.kind",
    "cost.a",
    "cost.b",
    "cost.mean",
    "replications",
    "model.kind",
    "model.sigma",
    "model.shape",
    "heavy.eps",
    "heavy.gamma",
    "bernstein.sigma",
];

#[derive(Debug)]
pub struct ParsedConfig {
    values: BTreeMap<String, String>,
}

impl ParsedConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected 'key = value', got '{line}'", lineno + 1));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("unknown key '{key}'"));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(format!("duplicate key '{key}'"));
            }
        }
        Ok(ParsedConfig { values })
    }

    fn require(&self, key: &str) -> Result<&str, String> {
        self.values.get(key).map(|s| s.as_str()).ok_or_else(|| format!("missing key '{key}'"))
    }

    fn optional(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn require_f64(&self, key: &str) -> Result<f64, String> {
        self.require(key)?
            .parse::<f64>()
            .map_err(|_| format!("key '{key}': expected a number, got '{}'", self.values[key]))
    }

    fn optional_f64(&self, key: &str) -> Result<Option<f64>, String> {
        match self.optional(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("key '{key}': expected a number, got '{v}'")),
        }
    }

    fn require_u64(&self, key: &str) -> Result<u64, String> {
        self.require(key)?
            .parse::<u64>()
            .map_err(|_| format!("key '{key}': expected an integer, got '{}'", self.values[key]))
    }

    fn generator(&self) -> Result<DataGenerator, String> {
        let gen = match self.require("generator.kind")? {
            "bernoulli" => DataGenerator::BernoulliGen { p: self.require_f64("generator.p")? },
            "gaussian" => DataGenerator::GaussianGen {
                mu: self.require_f64("generator.mu")?,
                sigma: self.require_f64("generator.sigma")?,
            },
            "poisson" => DataGenerator::PoissonGen { mu: self.require_f64("generator.mu")? },
            "gamma" => DataGenerator::GammaGen {
                shape: self.require_f64("generator.shape")?,
                mean: self.require_f64("generator.mean")?,
            },
            "pareto" => DataGenerator::ParetoGen {
                x_m: self.require_f64("generator.xm")?,
                shape: self.require_f64("generator.shape")?,
            },
            other => return Err(format!("key 'generator.kind': unknown generator '{other}'")),
        };
        gen.validate().map_err(|e| format!("key 'generator.kind': {e}"))?;
        Ok(gen)
    }

    /// The exponential-family model used by pi1/pi1hat: explicit `model.*`
    /// keys win, otherwise the generator's own family where one exists.
    fn model(&self, generator: &DataGenerator) -> Result<ExpFamilyModel, String> {
        let kind = match self.optional("model.kind") {
            Some(k) => k.to_string(),
            None => match generator {
                DataGenerator::BernoulliGen { .. } => "bernoulli".into(),
                DataGenerator::GaussianGen { .. } => "gaussian".into(),
                DataGenerator::PoissonGen { .. } => "poisson".into(),
                DataGenerator::GammaGen { .. } => "gamma".into(),
                DataGenerator::ParetoGen { .. } => {
                    return Err("key 'model.kind': required for pi1/pi1hat with a pareto generator".into())
                }
            },
        };
        match kind.as_str() {
            "bernoulli" => Ok(ExpFamilyModel::Bernoulli),
            "poisson" => Ok(ExpFamilyModel::Poisson),
            "gaussian" => {
                let sigma = match self.optional_f64("model.sigma")? {
                    Some(s) => s,
                    None => match generator {
                        DataGenerator::GaussianGen { sigma, .. } => *sigma,
                        _ => return Err("key 'model.sigma': required for a gaussian model".into()),
                    },
                };
                ExpFamilyModel::gaussian(sigma).map_err(|e| format!("key 'model.sigma': {e}"))
            }
            "gamma" => {
                let shape = match self.optional_f64("model.shape")? {
                    Some(s) => s,
                    None => match generator {
                        DataGenerator::GammaGen { shape, .. } => *shape,
                        _ => return Err("key 'model.shape': required for a gamma model".into()),
                    },
                };
                ExpFamilyModel::gamma(shape).map_err(|e| format!("key 'model.shape': {e}"))
            }
            other => Err(format!("key 'model.kind': unknown model '{other}'")),
        }
    }

    pub fn experiment(&self, seed: u64) -> Result<ExperimentConfig, String> {
        let generator = self.generator()?;
        let mut methods = Vec::new();
        for name in self.require("methods")?.split(',') {
            let name = name.trim();
            let spec = match name {
                "pi1" => MethodSpec::Pi1(self.model(&generator)?),
                "pi1hat" => MethodSpec::Pi1Hat(self.model(&generator)?),
                "pi1b" => MethodSpec::Pi1B,
                "pi1h" => {
                    let eps = self.require_f64("heavy.eps")?;
                    let bound = self.require_f64("heavy.gamma")?;
                    let spec = HeavyFamilySpec::new(eps, bound).map_err(|e| format!("key 'heavy.eps': {e}"))?;
                    MethodSpec::Pi1H(spec)
                }
                "hoeffding" => MethodSpec::Hoeffding,
                "bernstein" => MethodSpec::Bernstein { sigma: self.require_f64("bernstein.sigma")? },
                "mpeb" => MethodSpec::MpEb,
                other => return Err(format!("key 'methods': unknown method '{other}'")),
            };
            methods.push(spec);
        }
        let delta = self.require_f64("delta")?;
        let budget = match self.require("mode")? {
            "fixed_n" => BudgetMode::FixedN(self.require_u64("n")?),
            "budget" => {
                let cost = match self.require("cost.kind")? {
                    "unit" => CostModel::UnitCost,
                    "uniform" => CostModel::UniformCost {
                        a: self.require_f64("cost.a")?,
                        b: self.require_f64("cost.b")?,
                    },
                    "exponential" => CostModel::ExponentialCost { mean: self.require_f64("cost.mean")? },
                    other => return Err(format!("key 'cost.kind': unknown cost model '{other}'")),
                };
                BudgetMode::CostBudget { budget: self.require_f64("budget.C")?, cost }
            }
            other => return Err(format!("key 'mode': expected fixed_n or budget, got '{other}'")),
        };
        Ok(ExperimentConfig {
            generator,
            methods,
            delta,
            budget,
            replications: self.require_u64("replications")?,
            seed,
        })
    }
}
