//! Data and cost generators with fixed sampling algorithms.
//!
//! All draws reduce to 53-bit uniforms from the caller's RNG so results are
//! reproducible for a fixed seed regardless of platform: Pareto and
//! exponential draws invert the CDF, Gaussians use Box-Muller, Poisson uses
//! sequential search (means here are small), Gamma uses Marsaglia-Tsang.

use crate::error::{Error, Result};
use rand_core::RngCore;

/// Uniform in [0, 1) from the top 53 bits of one u64 draw.
pub(crate) fn uniform53(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut impl RngCore) -> f64 {
    // Box-Muller, cosine branch; 1 - u keeps the log argument positive
    let u1 = 1.0 - uniform53(rng);
    let u2 = uniform53(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Source distribution for simulated observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataGenerator {
    BernoulliGen { p: f64 },
    GaussianGen { mu: f64, sigma: f64 },
    PoissonGen { mu: f64 },
    GammaGen { shape: f64, mean: f64 },
    /// Classical Pareto on [x_m, inf): density shape * x_m^shape / x^(shape+1).
    ParetoGen { x_m: f64, shape: f64 },
}

impl DataGenerator {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DataGenerator::BernoulliGen { p } => (0.0..=1.0).contains(p),
            DataGenerator::GaussianGen { mu, sigma } => mu.is_finite() && *sigma > 0.0 && sigma.is_finite(),
            DataGenerator::PoissonGen { mu } => *mu > 0.0 && mu.is_finite(),
            DataGenerator::GammaGen { shape, mean } => *shape > 0.0 && *mean > 0.0,
            // shape > 1 keeps the mean finite
            DataGenerator::ParetoGen { x_m, shape } => *x_m > 0.0 && *shape > 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid generator parameters: {self:?}")))
        }
    }

    pub fn true_mean(&self) -> f64 {
        match self {
            DataGenerator::BernoulliGen { p } => *p,
            DataGenerator::GaussianGen { mu, .. } => *mu,
            DataGenerator::PoissonGen { mu } => *mu,
            DataGenerator::GammaGen { mean, .. } => *mean,
            DataGenerator::ParetoGen { x_m, shape } => shape * x_m / (shape - 1.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DataGenerator::BernoulliGen { p } => format!("bernoulli({p})"),
            DataGenerator::GaussianGen { mu, sigma } => format!("gaussian({mu},{sigma})"),
            DataGenerator::PoissonGen { mu } => format!("poisson({mu})"),
            DataGenerator::GammaGen { shape, mean } => format!("gamma({shape},{mean})"),
            DataGenerator::ParetoGen { x_m, shape } => format!("pareto({x_m},{shape})"),
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> f64 {
        match self {
            DataGenerator::BernoulliGen { p } => {
                if uniform53(rng) < *p {
                    1.0
                } else {
                    0.0
                }
            }
            DataGenerator::GaussianGen { mu, sigma } => mu + sigma * standard_normal(rng),
            DataGenerator::PoissonGen { mu } => {
                let limit = (-mu).exp();
                let mut k = 0u64;
                let mut prod = uniform53(rng);
                while prod > limit {
                    k += 1;
                    prod *= uniform53(rng);
                }
                k as f64
            }
            DataGenerator::GammaGen { shape, mean } => {
                let scale = mean / shape;
                scale * standard_gamma(*shape, rng)
            }
            DataGenerator::ParetoGen { x_m, shape } => {
                let u = 1.0 - uniform53(rng); // in (0, 1]
                x_m * u.powf(-1.0 / shape)
            }
        }
    }

    pub fn sample_n(&self, n: usize, rng: &mut impl RngCore) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Marsaglia-Tsang squeeze for shape >= 1, with the boost
/// G(a) = G(a+1) * U^(1/a) below 1.
fn standard_gamma(shape: f64, rng: &mut impl RngCore) -> f64 {
    if shape < 1.0 {
        let boost = uniform53(rng).max(f64::MIN_POSITIVE).powf(1.0 / shape);
        return boost * standard_gamma(shape + 1.0, rng);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = standard_normal(rng);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = uniform53(rng).max(f64::MIN_POSITIVE);
        if u < 1.0 - 0.0331 * z * z * z * z {
            return d * v3;
        }
        if u.ln() < 0.5 * z * z + d * (1.0 - v3 + v3.ln()) {
            return d * v3;
        }
    }
}

/// Per-sample cost model. The unit-cost variant consumes no randomness, so a
/// unit-cost budget run replays exactly the draws of a fixed-n run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostModel {
    UnitCost,
    UniformCost { a: f64, b: f64 },
    ExponentialCost { mean: f64 },
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            CostModel::UnitCost => true,
            CostModel::UniformCost { a, b } => *a >= 0.0 && b > a && *a + *b > 0.0,
            CostModel::ExponentialCost { mean } => *mean > 0.0 && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid cost model: {self:?}")))
        }
    }

    pub fn mean_cost(&self) -> f64 {
        match self {
            CostModel::UnitCost => 1.0,
            CostModel::UniformCost { a, b } => 0.5 * (a + b),
            CostModel::ExponentialCost { mean } => *mean,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CostModel::UnitCost => "unit".into(),
            CostModel::UniformCost { a, b } => format!("uniform({a},{b})"),
            CostModel::ExponentialCost { mean } => format!("exponential({mean})"),
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> f64 {
        match self {
            CostModel::UnitCost => 1.0,
            CostModel::UniformCost { a, b } => a + (b - a) * uniform53(rng),
            CostModel::ExponentialCost { mean } => -mean * (1.0 - uniform53(rng)).ln(),
        }
    }
}
