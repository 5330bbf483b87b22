//! Shared scenario builders for the criterion benchmarks.

use klci_core::harness::DataGenerator;
use klci_core::EmpiricalDist;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// Deterministic Bernoulli draw as 0.0/1.0 samples.
pub fn bernoulli_samples(p: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DataGenerator::BernoulliGen { p }.sample_n(n, &mut rng)
}

/// Deterministic Pareto draw (scale 1, shape 3): heavy-tailed but inside the
/// (eps = 1, bound = 4) moment family with high probability.
pub fn pareto_samples(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DataGenerator::ParetoGen { x_m: 1.0, shape: 3.0 }.sample_n(n, &mut rng)
}

/// Empirical distribution over many distinct atoms in [0,1].
pub fn unit_interval_dist(n: usize, seed: u64) -> EmpiricalDist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = DataGenerator::GammaGen { shape: 2.0, mean: 0.3 }
        .sample_n(n, &mut rng)
        .into_iter()
        .map(|v| v.min(1.0))
        .collect::<Vec<_>>();
    EmpiricalDist::from_samples(&samples).unwrap()
}
