//! Splitting-type statistics of random monic polynomials
//! `x^n + a_1 x^{n-1} + ... + a_n` with `a_i` drawn uniformly from `U_i`.
//!
//! Work is cut into fixed-size logical shards that do not depend on the
//! number of worker threads. Each shard produces a tally vector and tallies
//! are merged by addition, so counts are identical for any worker count.
//!
//! Monte Carlo shard `b` draws from ChaCha8 (`rand_chacha`) seeded with the
//! `b`-th output of a SplitMix64 stream started at the master seed. Indices
//! into a set of size `m` are taken as the high 64 bits of `u * m` for a
//! uniform 64-bit `u` (multiply-shift, no rejection; bias below `m / 2^64`).

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{quadratic_type, splitting_type_of};
use crate::sets::{ComplexSet, SetRecipe};
use crate::splitting::SplittingType;

pub const MAX_DEGREE: usize = 30;
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
/// Tuples per logical shard in exhaustive mode.
pub const EXHAUSTIVE_SHARD: u64 = 1 << 16;
/// Samples per logical shard in Monte Carlo mode.
pub const MONTE_CARLO_SHARD: u64 = 1 << 16;
pub const PRNG_NAME: &str = "chacha8/splitmix64-shard-seeds/multiply-shift-index";

/// All splitting types of degree `n` in descending lexicographic order of
/// `(s_1, ..., s_n)`; there are `p(n)` of them.
pub fn enumerate_splitting_types(n: usize) -> Result<Vec<SplittingType>> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n as u64));
    }
    fn go(rest: usize, part: usize, s: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if part == 0 {
            if rest == 0 {
                out.push(s.clone());
            }
            return;
        }
        for c in 0..=rest / part {
            s[part - 1] = c as u32;
            go(rest - c * part, part - 1, s, out);
        }
        s[part - 1] = 0;
    }
    let mut out = Vec::new();
    go(n, n, &mut vec![0; n], &mut out);
    out.sort_by(|a, b| b.cmp(a));
    Ok(out.into_iter().map(SplittingType::from_counts_unchecked).collect())
}

/// `prod_i i^{s_i} s_i!`, the centralizer order of the class.
pub fn centralizer_order(s: &SplittingType) -> u128 {
    let mut z: u128 = 1;
    for (i, &c) in s.counts().iter().enumerate() {
        for j in 1..=c as u128 {
            z *= (i as u128 + 1) * j;
        }
    }
    z
}

/// `(prod_i i^{s_i} s_i!)^{-1}`: the fraction of `S_n` with cycle type `s`.
pub fn cauchy_density(s: &SplittingType) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(centralizer_order(s)))
}

/// `n! / prod_i i^{s_i} s_i!`.
pub fn conjugacy_class_size(s: &SplittingType) -> u128 {
    let n = s.degree() as u128;
    let fact: u128 = (1..=n).product();
    fact / centralizer_order(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    #[serde(rename = "montecarlo")]
    MonteCarlo {
        #[serde(default = "default_samples")]
        samples: u64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_samples() -> u64 {
    DEFAULT_SAMPLES
}

/// A coefficient set together with the recipe that produced it.
#[derive(Debug, Clone)]
pub struct CoeffSet {
    pub recipe: SetRecipe,
    pub set: ComplexSet,
}

impl CoeffSet {
    pub fn build(recipe: &SetRecipe, field: &FieldSpec) -> Result<Self> {
        Ok(CoeffSet { recipe: recipe.clone(), set: recipe.build(field)? })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub field: FieldSpec,
    pub n: usize,
    /// `sets[i]` supplies the coefficient of `x^{n-1-i}`.
    pub sets: Vec<CoeffSet>,
    pub mode: Mode,
    /// Worker-count hint; 0 lets the pool decide. Never affects results.
    pub workers: usize,
    pub budget: u64,
    /// Disables the discriminant-character shortcut for quadratics.
    pub force_general_path: bool,
}

impl ExperimentConfig {
    /// Builds the sets from recipes; a single recipe is used for every coefficient.
    pub fn new(field: &FieldSpec, n: usize, recipes: &[SetRecipe], mode: Mode) -> Result<Self> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(n as u64));
        }
        let recipes: Vec<SetRecipe> = match recipes.len() {
            1 => vec![recipes[0].clone(); n],
            len if len == n => recipes.to_vec(),
            len => {
                return Err(Error::InvalidConfig(format!("expected 1 or {n} set recipes, got {len}")))
            }
        };
        let sets = recipes
            .iter()
            .map(|r| CoeffSet::build(r, field))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentConfig {
            field: field.clone(),
            n,
            sets,
            mode,
            workers: 0,
            budget: DEFAULT_BUDGET,
            force_general_path: false,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_general_path(mut self, force: bool) -> Self {
        self.force_general_path = force;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(self.n as u64));
        }
        if self.sets.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "expected {} coefficient sets, got {}",
                self.n,
                self.sets.len()
            )));
        }
        for s in &self.sets {
            if *s.set.field() != self.field {
                return Err(Error::FieldMismatch);
            }
            if s.set.is_empty() {
                return Err(Error::EmptySet);
            }
        }
        if let Mode::MonteCarlo { samples: 0, .. } = self.mode {
            return Err(Error::InvalidConfig("Monte Carlo sample count must be at least 1".into()));
        }
        Ok(())
    }

    /// `prod #U_i`.
    pub fn tuple_count(&self) -> u128 {
        self.sets
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.set.len() as u128))
            .unwrap_or(u128::MAX)
    }

    fn uses_quadratic_shortcut(&self) -> bool {
        self.n == 2 && self.field.is_odd() && !self.force_general_path
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierPath {
    General,
    QuadraticDiscriminant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub recipe: SetRecipe,
    pub size: u64,
    pub complexity_bound: u64,
}

/// Timing and worker information; excluded from result documents because
/// it differs between otherwise identical runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunInfo {
    pub workers: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub p: u32,
    pub k: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub n: usize,
    pub sets: Vec<SetSummary>,
    pub mode: Mode,
    pub path: ClassifierPath,
    pub types: Vec<SplittingType>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub logical_shards: u64,
    pub budget: u64,
    pub prng: Option<&'static str>,
    pub run: RunInfo,
}

impl ExperimentResult {
    pub fn empirical(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    pub fn empirical_exact(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[i]), BigInt::from(self.total))
    }

    /// Binomial standard error `sqrt(p(1-p)/N)` of the empirical frequency.
    pub fn std_error(&self, i: usize) -> f64 {
        let p = self.empirical(i);
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    pub fn index_of(&self, s: &SplittingType) -> Option<usize> {
        self.types.iter().position(|t| t == s)
    }

    /// `prod #U_i / q^{n - 1/2}`, the scale of the error term.
    pub fn error_scale(&self) -> f64 {
        let ln: f64 = self.sets.iter().map(|s| (s.size as f64).ln()).sum::<f64>()
            - (self.n as f64 - 0.5) * (self.q as f64).ln();
        ln.exp()
    }
}

/// Maps a coefficient vector to the index of its splitting type.
struct Classifier<'a> {
    field: &'a FieldSpec,
    index: HashMap<SplittingType, usize>,
    quadratic: bool,
    split2: usize,
    irred2: usize,
}

impl<'a> Classifier<'a> {
    fn new(field: &'a FieldSpec, types: &[SplittingType], quadratic: bool) -> Self {
        let index: HashMap<SplittingType, usize> =
            types.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let (split2, irred2) = if types[0].degree() == 2 {
            (index[&SplittingType::split(2)], index[&SplittingType::irreducible(2)])
        } else {
            (0, 0)
        };
        Classifier { field, index, quadratic, split2, irred2 }
    }

    /// `coeffs` is the full monic coefficient vector, low to high.
    #[inline]
    fn classify(&self, coeffs: &[FieldElement]) -> usize {
        if self.quadratic {
            return match quadratic_type(self.field, coeffs[1], coeffs[0]) {
                -1 => self.irred2,
                _ => self.split2,
            };
        }
        self.index[&splitting_type_of(self.field, coeffs)]
    }
}

fn add_tallies(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Runs `job` on a fresh pool; also returns the pool size.
fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<(T, usize)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok((pool.install(job), pool.current_num_threads()))
}

/// SplitMix64 output `index` of the stream seeded with `seed`.
pub fn shard_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn sample_index(rng: &mut ChaCha8Rng, len: usize) -> usize {
    ((rng.next_u64() as u128 * len as u128) >> 64) as usize
}

fn finish(
    config: &ExperimentConfig,
    types: Vec<SplittingType>,
    counts: Vec<u64>,
    total: u64,
    logical_shards: u64,
    workers: usize,
    started: Instant,
) -> ExperimentResult {
    let f = &config.field;
    ExperimentResult {
        p: f.p(),
        k: f.k(),
        q: f.q(),
        modulus: f.modulus().to_vec(),
        n: config.n,
        sets: config
            .sets
            .iter()
            .map(|s| SetSummary {
                recipe: s.recipe.clone(),
                size: s.set.len() as u64,
                complexity_bound: s.set.complexity_bound() as u64,
            })
            .collect(),
        mode: config.mode,
        path: if config.uses_quadratic_shortcut() {
            ClassifierPath::QuadraticDiscriminant
        } else {
            ClassifierPath::General
        },
        types,
        counts,
        total,
        logical_shards,
        budget: config.budget,
        prng: matches!(config.mode, Mode::MonteCarlo { .. }).then_some(PRNG_NAME),
        run: RunInfo {
            workers,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
    }
}

/// Tallies the splitting type of every polynomial with coefficients in `U_1 x ... x U_n`.
pub fn run_exhaustive(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    if config.mode != Mode::Exhaustive {
        return Err(Error::InvalidConfig("run_exhaustive needs exhaustive mode".into()));
    }
    let needed = config.tuple_count();
    if needed > config.budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget: config.budget });
    }
    let started = Instant::now();
    let total = needed as u64;
    let n = config.n;
    let types = enumerate_splitting_types(n)?;
    let classifier = Classifier::new(&config.field, &types, config.uses_quadratic_shortcut());
    let sets: Vec<&[FieldElement]> = config.sets.iter().map(|s| s.set.elements()).collect();
    let shards = total.div_ceil(EXHAUSTIVE_SHARD);

    let (counts, workers) = with_pool(config.workers, || {
        (0..shards)
            .into_par_iter()
            .map(|shard| {
                let start = shard * EXHAUSTIVE_SHARD;
                let end = (start + EXHAUSTIVE_SHARD).min(total);
                let mut tally = vec![0u64; types.len()];
                // Odometer over set indices; the last coefficient a_n moves fastest.
                let mut digits = vec![0usize; n];
                let mut rest = start;
                for i in (0..n).rev() {
                    let len = sets[i].len() as u64;
                    digits[i] = (rest % len) as usize;
                    rest /= len;
                }
                let mut coeffs = vec![FieldElement::ONE; n + 1];
                for i in 0..n {
                    coeffs[n - 1 - i] = sets[i][digits[i]];
                }
                for _ in start..end {
                    tally[classifier.classify(&coeffs)] += 1;
                    let mut i = n;
                    while i > 0 {
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < sets[i].len() {
                            coeffs[n - 1 - i] = sets[i][digits[i]];
                            break;
                        }
                        digits[i] = 0;
                        coeffs[n - 1 - i] = sets[i][0];
                    }
                }
                tally
            })
            .reduce(|| vec![0u64; types.len()], add_tallies)
    })?;
    Ok(finish(config, types, counts, total, shards, workers, started))
}

/// Draws `samples` independent coefficient tuples and tallies splitting types.
pub fn run_montecarlo(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let Mode::MonteCarlo { samples, seed } = config.mode else {
        return Err(Error::InvalidConfig("run_montecarlo needs Monte Carlo mode".into()));
    };
    let started = Instant::now();
    let n = config.n;
    let types = enumerate_splitting_types(n)?;
    let classifier = Classifier::new(&config.field, &types, config.uses_quadratic_shortcut());
    let sets: Vec<&[FieldElement]> = config.sets.iter().map(|s| s.set.elements()).collect();
    let shards = samples.div_ceil(MONTE_CARLO_SHARD);

    let (counts, workers) = with_pool(config.workers, || {
        (0..shards)
            .into_par_iter()
            .map(|shard| {
                let start = shard * MONTE_CARLO_SHARD;
                let end = (start + MONTE_CARLO_SHARD).min(samples);
                let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(seed, shard));
                let mut tally = vec![0u64; types.len()];
                let mut coeffs = vec![FieldElement::ONE; n + 1];
                for _ in start..end {
                    for (i, set) in sets.iter().enumerate() {
                        coeffs[n - 1 - i] = set[sample_index(&mut rng, set.len())];
                    }
                    tally[classifier.classify(&coeffs)] += 1;
                }
                tally
            })
            .reduce(|| vec![0u64; types.len()], add_tallies)
    })?;
    Ok(finish(config, types, counts, samples, shards, workers, started))
}

/// Dispatches on the configured mode.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    match config.mode {
        Mode::Exhaustive => run_exhaustive(config),
        Mode::MonteCarlo { .. } => run_montecarlo(config),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactComparison {
    pub empirical: BigRational,
    pub predicted: BigRational,
    pub delta: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub s: SplittingType,
    pub count: u64,
    pub empirical: f64,
    pub predicted: f64,
    /// `|empirical - predicted|`.
    pub delta: f64,
    pub sqrt_q_delta: f64,
    /// `delta * prod #U_i / q^{n - 1/2}`.
    pub scaled_delta: f64,
    /// Monte Carlo only.
    pub std_error: Option<f64>,
    /// Exhaustive only.
    pub exact: Option<ExactComparison>,
}

/// Per-type deviation from the Cauchy density, in enumeration order.
pub fn compare_to_prediction(result: &ExperimentResult) -> Vec<ComparisonRow> {
    let sqrt_q = (result.q as f64).sqrt();
    let scale = result.error_scale();
    result
        .types
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let predicted_exact = cauchy_density(s);
            let predicted = predicted_exact.to_f64().unwrap_or(0.0);
            let (delta, exact, std_error) = match result.mode {
                Mode::Exhaustive => {
                    let emp = result.empirical_exact(i);
                    let d = (&emp - &predicted_exact).abs();
                    let df = d.to_f64().unwrap_or(f64::NAN);
                    (df, Some(ExactComparison { empirical: emp, predicted: predicted_exact, delta: d }), None)
                }
                Mode::MonteCarlo { .. } => {
                    ((result.empirical(i) - predicted).abs(), None, Some(result.std_error(i)))
                }
            };
            ComparisonRow {
                s: s.clone(),
                count: result.counts[i],
                empirical: result.empirical(i),
                predicted,
                delta,
                sqrt_q_delta: sqrt_q * delta,
                scaled_delta: delta * scale,
                std_error,
                exact,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitPoint {
    pub q: u64,
    pub delta: f64,
    pub sqrt_q_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub points: Vec<FitPoint>,
    pub max_sqrt_q_delta: f64,
    pub median_sqrt_q_delta: f64,
    /// Least-squares slope of `ln delta` against `ln q` over nonzero deltas;
    /// `None` when fewer than two deltas are nonzero (the "exact" case).
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Grid points with `delta = 0`, left out of the log fit.
    pub exact_points: Vec<u64>,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Error-scaling summary for `(q, delta)` pairs.
pub fn fit_points(points: &[(u64, f64)]) -> Result<FitReport> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::GridTooSmall { min: MIN_FIT_POINTS, got: points.len() });
    }
    let pts: Vec<FitPoint> = points
        .iter()
        .map(|&(q, delta)| FitPoint { q, delta, sqrt_q_delta: (q as f64).sqrt() * delta })
        .collect();
    let mut scaled: Vec<f64> = pts.iter().map(|p| p.sqrt_q_delta).collect();
    scaled.sort_by(|a, b| a.total_cmp(b));
    let mid = scaled.len() / 2;
    let median = if scaled.len() % 2 == 1 { scaled[mid] } else { 0.5 * (scaled[mid - 1] + scaled[mid]) };
    let max = *scaled.last().expect("nonempty");

    let logs: Vec<(f64, f64)> = pts
        .iter()
        .filter(|p| p.delta > 0.0)
        .map(|p| ((p.q as f64).ln(), p.delta.ln()))
        .collect();
    let exact_points = pts.iter().filter(|p| p.delta == 0.0).map(|p| p.q).collect();
    let (slope, intercept) = if logs.len() >= 2 {
        let m = logs.len() as f64;
        let mx = logs.iter().map(|l| l.0).sum::<f64>() / m;
        let my = logs.iter().map(|l| l.1).sum::<f64>() / m;
        let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|l| (l.0 - mx) * (l.0 - mx)).sum();
        if sxx > 0.0 {
            let b = sxy / sxx;
            (Some(b), Some(my - b * mx))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    Ok(FitReport { points: pts, max_sqrt_q_delta: max, median_sqrt_q_delta: median, slope, intercept, exact_points })
}

/// Error-scaling summary for one splitting type across results on a q-grid.
/// All results must share `n` and the set recipes.
pub fn scaling_fit(results: &[ExperimentResult], s: &SplittingType) -> Result<FitReport> {
    if results.len() < MIN_FIT_POINTS {
        return Err(Error::GridTooSmall { min: MIN_FIT_POINTS, got: results.len() });
    }
    let first = &results[0];
    let recipes: Vec<&SetRecipe> = first.sets.iter().map(|s| &s.recipe).collect();
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        let same = r.n == first.n && r.sets.iter().map(|s| &s.recipe).eq(recipes.iter().copied());
        if !same {
            return Err(Error::InvalidConfig("scaling fit needs identical n and recipes".into()));
        }
        let i = r
            .index_of(s)
            .ok_or_else(|| Error::InvalidConfig(format!("splitting type {s} has wrong degree")))?;
        let row = &compare_to_prediction(r)[i];
        points.push((r.q as u64, row.delta));
    }
    fit_points(&points)
}

/// Exact sum of rationals, for class-equation checks.
pub fn rational_sum<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    xs.into_iter().fold(BigRational::zero(), |acc, x| acc + x)
}
