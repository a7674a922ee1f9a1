use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
    Qmc,
}

/// A value with its standard error.
///
/// Exact values (closed forms, exact geometry, deterministic quadrature)
/// carry a zero standard error; Monte Carlo values carry
/// `sample_std / sqrt(n_samples)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            n_samples: 0,
            method: Method::Exact,
        }
    }

    /// From a sample mean and population variance.
    pub fn from_moments(mean: f64, var: f64, n: u64) -> Self {
        Self {
            value: mean,
            std_error: (var.max(0.0) / n.max(1) as f64).sqrt(),
            n_samples: n,
            method: Method::Mc,
        }
    }

    /// Hit-or-miss estimate `scale * hits / n` with binomial error.
    pub fn from_hits(hits: u64, n: u64, scale: f64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: scale * p,
            std_error: scale * (p * (1.0 - p) / n as f64).sqrt(),
            n_samples: n,
            method: Method::Mc,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == Method::Exact
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
            ..*self
        }
    }

    /// Pools shard estimates into one; shards must be Monte Carlo
    /// estimates of the same quantity.
    pub fn pooled(shards: &[Estimate]) -> Self {
        if shards.len() == 1 {
            return shards[0];
        }
        let n: u64 = shards.iter().map(|s| s.n_samples).sum();
        let nf = n as f64;
        let mean = shards.iter().map(|s| s.value * s.n_samples as f64).sum::<f64>() / nf;
        let m2: f64 = shards
            .iter()
            .map(|s| {
                let ni = s.n_samples as f64;
                let var = s.std_error * s.std_error * ni;
                ni * var + ni * (s.value - mean).powi(2)
            })
            .sum();
        Self::from_moments(mean, m2 / nf, n)
    }

    /// `sqrt(se_a^2 + se_b^2)` treating the estimates as independent.
    pub fn combined_error(&self, other: &Estimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Sample budget of one Monte Carlo task and its random stream key.
#[derive(Clone, Debug, PartialEq)]
pub struct McBudget {
    pub seed: u64,
    pub key: Vec<u64>,
    pub n_samples: usize,
    pub shards: usize,
}

impl McBudget {
    pub fn new(seed: u64, n_samples: usize) -> Self {
        Self {
            seed,
            key: Vec::new(),
            n_samples,
            shards: 1,
        }
    }

    pub fn with_key(mut self, key: &[u64]) -> Self {
        self.key = key.to_vec();
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards.max(1);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    /// Generator for one shard.
    pub fn shard_rng(&self, shard: usize) -> ChaCha8Rng {
        let mut key = self.key.clone();
        key.push(shard as u64);
        rng::stream(self.seed, &key)
    }

    /// Sizes of the shards; they sum to `n_samples`.
    pub fn shard_sizes(&self) -> Vec<usize> {
        let s = self.shards.min(self.n_samples.max(1));
        (0..s)
            .map(|i| self.n_samples / s + usize::from(i < self.n_samples % s))
            .collect()
    }

    /// Averages `sample(rng)` over the budget, shard by shard.
    pub fn mean_of(&self, mut sample: impl FnMut(&mut ChaCha8Rng) -> f64) -> Estimate {
        let shards: Vec<Estimate> = self
            .shard_sizes()
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                let mut r = self.shard_rng(i);
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..n {
                    let x = sample(&mut r);
                    s += x;
                    s2 += x * x;
                }
                let nf = n.max(1) as f64;
                let mean = s / nf;
                Estimate::from_moments(mean, s2 / nf - mean * mean, n as u64)
            })
            .collect();
        Estimate::pooled(&shards)
    }
}
