//! Random fields and the seeded Monte Carlo engine.
//!
//! Every site draws from its own ChaCha stream keyed by `(seed, site)`, so the
//! value at a site never depends on which region it was sampled in. Samples of
//! a Monte Carlo run are keyed by `(base_seed, index)` and merged in index
//! order, which makes results independent of the worker count.

use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution as _};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config_space::Region;
use crate::error::{domain, Error, Result};

/// Single-site law of the couplings `ω_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Uniform01,
    /// Beta(a, b); only `a, b ≥ 1` has a bounded density.
    Beta { a: f64, b: f64 },
    /// Values supplied by hand rather than drawn.
    Explicit,
}

impl Distribution {
    pub fn beta(a: f64, b: f64) -> Result<Distribution> {
        if !(a >= 1.0 && b >= 1.0 && a.is_finite() && b.is_finite()) {
            return domain(format!(
                "beta({a}, {b}) has an unbounded density; need a, b >= 1"
            ));
        }
        Ok(Distribution::Beta { a, b })
    }

    pub fn mean(&self) -> Option<f64> {
        match *self {
            Distribution::Uniform01 => Some(0.5),
            Distribution::Beta { a, b } => Some(a / (a + b)),
            Distribution::Explicit => None,
        }
    }

    pub fn tag(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform01 => f.write_str("uniform01"),
            Distribution::Beta { a, b } => write!(f, "beta({a},{b})"),
            Distribution::Explicit => f.write_str("explicit"),
        }
    }
}

/// One realization of the random couplings on a set of sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    pub seed: u64,
    pub distribution: Distribution,
    sites: Vec<i64>,
    values: Vec<f64>,
}

fn site_rng(seed: u64, site: i64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(site as u64);
    rng
}

impl DisorderSample {
    /// Draw i.i.d. values on every site of `region`.
    pub fn sample(region: &Region, distribution: Distribution, seed: u64) -> Result<DisorderSample> {
        DisorderSample::sample_sites(region.sites(), distribution, seed)
    }

    pub fn sample_sites(
        sites: &[i64],
        distribution: Distribution,
        seed: u64,
    ) -> Result<DisorderSample> {
        let values = match distribution {
            Distribution::Uniform01 => sites
                .iter()
                .map(|&s| site_rng(seed, s).random::<f64>())
                .collect(),
            Distribution::Beta { a, b } => {
                Distribution::beta(a, b)?;
                let law = Beta::new(a, b).map_err(|e| Error::Domain(e.to_string()))?;
                sites
                    .iter()
                    .map(|&s| law.sample(&mut site_rng(seed, s)))
                    .collect()
            }
            Distribution::Explicit => return domain("explicit fields are not sampled"),
        };
        Ok(DisorderSample {
            seed,
            distribution,
            sites: sites.to_vec(),
            values,
        })
    }

    /// A hand-specified field; values must lie in `[0, 1]`.
    pub fn explicit(sites: Vec<i64>, values: Vec<f64>) -> Result<DisorderSample> {
        if sites.len() != values.len() {
            return domain("site and value lists differ in length");
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return domain("field sites must be strictly increasing");
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return domain(format!("coupling {v} outside [0, 1]"));
        }
        Ok(DisorderSample {
            seed: 0,
            distribution: Distribution::Explicit,
            sites,
            values,
        })
    }

    /// The all-zero field on a region.
    pub fn zeros(region: &Region) -> DisorderSample {
        DisorderSample {
            seed: 0,
            distribution: Distribution::Explicit,
            sites: region.sites().to_vec(),
            values: vec![0.0; region.len()],
        }
    }

    pub fn get(&self, site: i64) -> Option<f64> {
        self.sites.binary_search(&site).ok().map(|i| self.values[i])
    }

    pub fn value(&self, site: i64) -> Result<f64> {
        self.get(site)
            .ok_or_else(|| Error::Domain(format!("field has no value at site {site}")))
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The same values carried to sites shifted by `by`.
    pub fn translate(&self, by: i64) -> DisorderSample {
        DisorderSample {
            sites: self.sites.iter().map(|s| s + by).collect(),
            ..self.clone()
        }
    }
}

/// SplitMix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` in a run with `base_seed`.
pub fn sample_seed(base_seed: u64, index: u64) -> u64 {
    splitmix(base_seed ^ splitmix(index))
}

/// Summary of a scalar Monte Carlo estimate. The accepted values are kept in
/// sample-index order, so merging is exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
    pub stderr: f64,
    pub excluded: usize,
    pub base_seed: u64,
    pub index_range: Range<u64>,
    #[serde(skip)]
    values: Vec<f64>,
}

impl MCEstimate {
    /// Build from per-sample values in index order; non-finite values are
    /// excluded and counted.
    pub fn from_values(base_seed: u64, index_range: Range<u64>, raw: &[f64]) -> MCEstimate {
        let values: Vec<f64> = raw.iter().copied().filter(|v| v.is_finite()).collect();
        let excluded = raw.len() - values.len();
        MCEstimate::summarize(base_seed, index_range, values, excluded)
    }

    fn summarize(base_seed: u64, index_range: Range<u64>, values: Vec<f64>, excluded: usize) -> MCEstimate {
        let count = values.len();
        let mean = if count == 0 {
            f64::NAN
        } else {
            values.iter().sum::<f64>() / count as f64
        };
        let variance = if count < 2 {
            0.0
        } else {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64
        };
        let stderr = if count == 0 {
            f64::NAN
        } else {
            (variance / count as f64).sqrt()
        };
        MCEstimate {
            mean,
            variance,
            count,
            stderr,
            excluded,
            base_seed,
            index_range,
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pool two estimates over adjacent index ranges of the same base seed.
    pub fn merge(&self, later: &MCEstimate) -> Result<MCEstimate> {
        if self.base_seed != later.base_seed || self.index_range.end != later.index_range.start {
            return domain("only adjacent index ranges of one base seed can be merged");
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&later.values);
        Ok(MCEstimate::summarize(
            self.base_seed,
            self.index_range.start..later.index_range.end,
            values,
            self.excluded + later.excluded,
        ))
    }
}

/// A Monte Carlo run plan: sample indices `start..start + n_samples`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub n_samples: usize,
    pub base_seed: u64,
    pub workers: usize,
    pub start: u64,
}

impl MonteCarlo {
    pub fn new(n_samples: usize, base_seed: u64, workers: usize) -> MonteCarlo {
        MonteCarlo {
            n_samples,
            base_seed,
            workers: workers.max(1),
            start: 0,
        }
    }

    pub fn starting_at(mut self, start: u64) -> MonteCarlo {
        self.start = start;
        self
    }

    fn indices(&self) -> Range<u64> {
        self.start..self.start + self.n_samples as u64
    }

    /// Evaluate `f(index, sample_seed)` for every sample; results in index order.
    pub fn map<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, u64) -> Result<T> + Sync,
    {
        let base = self.base_seed;
        let run = || -> Result<Vec<T>> {
            self.indices()
                .into_par_iter()
                .map(|i| f(i, sample_seed(base, i)))
                .collect()
        };
        if self.workers == 1 {
            return self.indices().map(|i| f(i, sample_seed(base, i))).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Refused(format!("thread pool: {e}")))?;
        pool.install(run)
    }

    /// Scalar estimate of `E f`.
    pub fn estimate<F>(&self, f: F) -> Result<MCEstimate>
    where
        F: Fn(u64, u64) -> Result<f64> + Sync,
    {
        if self.n_samples < 2 {
            return domain("a Monte Carlo estimate needs at least 2 samples");
        }
        let raw = self.map(f)?;
        Ok(MCEstimate::from_values(self.base_seed, self.indices(), &raw))
    }

    /// Componentwise estimates of a fixed-length vector estimand.
    pub fn estimate_vec<F>(&self, width: usize, f: F) -> Result<Vec<MCEstimate>>
    where
        F: Fn(u64, u64) -> Result<Vec<f64>> + Sync,
    {
        if self.n_samples < 2 {
            return domain("a Monte Carlo estimate needs at least 2 samples");
        }
        let rows = self.map(f)?;
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return domain(format!("estimand returned {} values, expected {width}", r.len()));
        }
        Ok((0..width)
            .map(|k| {
                let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                MCEstimate::from_values(self.base_seed, self.indices(), &col)
            })
            .collect())
    }
}

/// Estimate `E f` over `n_samples` seeded samples.
pub fn monte_carlo<F>(f: F, n_samples: usize, base_seed: u64, workers: usize) -> Result<MCEstimate>
where
    F: Fn(u64, u64) -> Result<f64> + Sync,
{
    MonteCarlo::new(n_samples, base_seed, workers).estimate(f)
}

/// Worker count from `XXZ_WORKERS`, else the machine's parallelism.
pub fn default_workers() -> usize {
    std::env::var("XXZ_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_values_in_unit_interval_and_region_independent() {
        let small = Region::interval(0, 9).unwrap();
        let big = Region::interval(-20, 30).unwrap();
        let a = DisorderSample::sample(&small, Distribution::Uniform01, 42).unwrap();
        let b = DisorderSample::sample(&big, Distribution::Uniform01, 42).unwrap();
        for &s in small.sites() {
            assert_eq!(a.get(s), b.get(s));
        }
        assert!(b.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let again = DisorderSample::sample(&big, Distribution::Uniform01, 42).unwrap();
        assert_eq!(again, b);
        let other = DisorderSample::sample(&big, Distribution::Uniform01, 43).unwrap();
        assert_ne!(other.values(), b.values());
    }

    #[test]
    fn law_of_large_numbers() {
        let sites: Vec<i64> = (0..100_000).collect();
        let f = DisorderSample::sample_sites(&sites, Distribution::Uniform01, 1).unwrap();
        let mean = f.values().iter().sum::<f64>() / f.values().len() as f64;
        assert!((mean - 0.5).abs() < 0.005);
        let beta = Distribution::beta(2.0, 3.0).unwrap();
        let f = DisorderSample::sample_sites(&sites, beta, 1).unwrap();
        let mean = f.values().iter().sum::<f64>() / f.values().len() as f64;
        assert!((mean - 0.4).abs() < 0.005);
        assert!(f.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn beta_with_unbounded_density_rejected() {
        assert!(Distribution::beta(0.5, 2.0).is_err());
        assert!(Distribution::beta(1.0, 0.9).is_err());
        let r = Region::interval(0, 3).unwrap();
        assert!(DisorderSample::sample(&r, Distribution::Beta { a: 0.5, b: 1.0 }, 0).is_err());
    }

    #[test]
    fn constant_and_site_estimands() {
        let est = monte_carlo(|_, _| Ok(1.0), 50, 9, 1).unwrap();
        assert_eq!((est.mean, est.variance, est.count), (1.0, 0.0, 50));
        let r = Region::interval(0, 0).unwrap();
        let est = monte_carlo(
            |_, seed| DisorderSample::sample(&r, Distribution::Uniform01, seed)?.value(0),
            20_000,
            3,
            4,
        )
        .unwrap();
        assert!((est.mean - 0.5).abs() < 0.01);
        assert!((est.stderr - (est.variance / est.count as f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let f = |_: u64, seed: u64| {
            let r = Region::interval(0, 5).unwrap();
            let s = DisorderSample::sample(&r, Distribution::Uniform01, seed)?;
            Ok(s.values().iter().map(|v| v.sqrt()).sum::<f64>())
        };
        let one = monte_carlo(f, 1000, 77, 1).unwrap();
        for w in [4, 8] {
            let other = monte_carlo(f, 1000, 77, w).unwrap();
            assert_eq!(one, other);
            assert_eq!(one.mean.to_bits(), other.mean.to_bits());
        }
    }

    #[test]
    fn non_finite_values_are_excluded() {
        let est = monte_carlo(
            |i, _| Ok(if i % 10 == 0 { f64::INFINITY } else { 2.0 }),
            100,
            0,
            2,
        )
        .unwrap();
        assert_eq!((est.count, est.excluded, est.mean), (90, 10, 2.0));
    }

    #[test]
    fn merge_equals_pooled() {
        let f = |i: u64, seed: u64| Ok((seed % 1000) as f64 / 7.0 + i as f64);
        let all = MonteCarlo::new(300, 5, 3).estimate(f).unwrap();
        let a = MonteCarlo::new(120, 5, 2).estimate(f).unwrap();
        let b = MonteCarlo::new(180, 5, 1).starting_at(120).estimate(f).unwrap();
        assert_eq!(a.merge(&b).unwrap(), all);
        assert!(b.merge(&a).is_err());
    }
}
