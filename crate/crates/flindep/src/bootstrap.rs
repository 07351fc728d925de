//! Calibration engines: naive paired bootstrap, wild multiplier bootstrap,
//! the Monte Carlo precursor, the N(0,2) asymptotic reference for T1, and
//! p-value assembly.
//!
//! Replicate `l` of every resampling method draws from its own counter-derived
//! substream `(seed, l)`, so replicate values are identical no matter how many
//! worker threads execute them or in what order. Samplers precompute what a
//! replicate needs (centered products, scores) once and are then shared
//! immutably across replicates.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpca::{decompose, FpcaDecomposition, DEFAULT_RANK_TOLERANCE};
use crate::hilbert::{norm_slice, FunctionalSample};
use crate::rng::substream;
use crate::stats::{sigma_hat_sq, t1, t2, t3, t3s, StatisticKind, StatisticValue};

/// Redraws allowed per replicate when a studentized resample degenerates.
const MAX_REDRAWS: u32 = 100;

/// How a statistic's null distribution is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationKind {
    /// N(0,2) limit; valid for T1 only.
    #[serde(rename = "asymptotic")]
    AsymptoticN02,
    /// Paired resampling of (Xᵢ, Yᵢ) with recentering; valid for T3/T3s.
    Naive,
    /// Multiplier resampling; valid for every statistic.
    Wild,
    /// Monte Carlo calibration of ‖√n·Tₙ‖/σ̂ by resampled curve means; T3s only.
    Precursor,
}

impl CalibrationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CalibrationKind::AsymptoticN02 => "asymptotic",
            CalibrationKind::Naive => "naive",
            CalibrationKind::Wild => "wild",
            CalibrationKind::Precursor => "precursor",
        }
    }
}

impl std::fmt::Display for CalibrationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Law of the wild-bootstrap multipliers; mean 0, variance 1 in every case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplier {
    Gaussian,
    Rademacher,
    Mammen,
}

impl Multiplier {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Multiplier::Gaussian => StandardNormal.sample(rng),
            Multiplier::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Multiplier::Mammen => {
                // Two-point law: −(√5−1)/2 with probability (√5+1)/(2√5),
                // (√5+1)/2 otherwise; matches the first three moments of a
                // centered unit-variance variable with E(ε³)=1.
                let root5 = 5.0f64.sqrt();
                if rng.gen::<f64>() < (root5 + 1.0) / (2.0 * root5) {
                    -(root5 - 1.0) / 2.0
                } else {
                    (root5 + 1.0) / 2.0
                }
            }
        }
    }
}

/// Whether studentized replicates recompute the variance from the resample
/// or reuse the observed σ̂².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    Bootstrapped,
    Fixed,
}

/// Tie handling for bootstrap p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PValueMode {
    /// (#{replicates ≥ observed}) / B.
    #[serde(rename = "proportion")]
    Proportion,
    /// (1 + #{replicates ≥ observed}) / (B + 1); never exactly zero.
    #[serde(rename = "add-one")]
    AddOne,
}

/// Fully specified calibration: kind plus the knobs the resampling kinds use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMethod {
    pub kind: CalibrationKind,
    pub multiplier: Multiplier,
    /// Replicate count B; ignored by the asymptotic kind.
    pub replicates: usize,
    pub seed: u64,
    pub variance_mode: VarianceMode,
    pub p_value_mode: PValueMode,
}

impl CalibrationMethod {
    pub fn asymptotic_n02() -> Self {
        CalibrationMethod {
            kind: CalibrationKind::AsymptoticN02,
            multiplier: Multiplier::Gaussian,
            replicates: 0,
            seed: 0,
            variance_mode: VarianceMode::Bootstrapped,
            p_value_mode: PValueMode::Proportion,
        }
    }

    pub fn naive(replicates: usize, seed: u64) -> Self {
        CalibrationMethod {
            kind: CalibrationKind::Naive,
            ..Self::resampling_defaults(replicates, seed)
        }
    }

    pub fn wild(replicates: usize, seed: u64) -> Self {
        CalibrationMethod {
            kind: CalibrationKind::Wild,
            ..Self::resampling_defaults(replicates, seed)
        }
    }

    pub fn precursor(replicates: usize, seed: u64) -> Self {
        CalibrationMethod {
            kind: CalibrationKind::Precursor,
            ..Self::resampling_defaults(replicates, seed)
        }
    }

    fn resampling_defaults(replicates: usize, seed: u64) -> Self {
        CalibrationMethod {
            kind: CalibrationKind::Wild,
            multiplier: Multiplier::Gaussian,
            replicates,
            seed,
            variance_mode: VarianceMode::Bootstrapped,
            p_value_mode: PValueMode::Proportion,
        }
    }

    pub fn with_multiplier(mut self, multiplier: Multiplier) -> Self {
        self.multiplier = multiplier;
        self
    }

    pub fn with_variance_mode(mut self, variance_mode: VarianceMode) -> Self {
        self.variance_mode = variance_mode;
        self
    }

    pub fn with_p_value_mode(mut self, p_value_mode: PValueMode) -> Self {
        self.p_value_mode = p_value_mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn is_resampling(&self) -> bool {
        !matches!(self.kind, CalibrationKind::AsymptoticN02)
    }
}

/// Counters accumulated while generating replicates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicateDiagnostics {
    /// Total degenerate resamples that were discarded and redrawn.
    pub redraws: u64,
}

/// Result of one calibrated test.
#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub statistic: StatisticValue,
    pub method: CalibrationMethod,
    pub p_value: f64,
    /// Replicate values in stream order; `None` for the asymptotic kind.
    pub replicate_values: Option<Vec<f64>>,
    pub diagnostics: ReplicateDiagnostics,
    pub elapsed: Duration,
}

/// p-value for an observed value against replicate values.
///
/// Ties count as exceedances, per the proportion-of-values-≥ definition.
pub fn p_value_from_replicates(observed: f64, replicates: &[f64], mode: PValueMode) -> f64 {
    let count = replicates.iter().filter(|r| **r >= observed).count();
    match mode {
        PValueMode::Proportion => count as f64 / replicates.len() as f64,
        PValueMode::AddOne => (1 + count) as f64 / (replicates.len() + 1) as f64,
    }
}

/// Two-sided p-value of T1 against its N(0,2) limit: 2·(1 − Φ(|t|/√2)).
pub fn asymptotic_p_value_t1(t1_value: f64) -> f64 {
    // 2(1 − Φ(x)) = erfc(x/√2) evaluated at x = |t|/√2.
    statrs::function::erf::erfc(t1_value.abs() / 2.0)
}

/// Precomputed state for naive paired-bootstrap T3/T3s replicates.
pub struct NaiveT3Sampler<'a> {
    sample: &'a FunctionalSample,
    /// Observed cross-covariance curve; the recentering term of every replicate.
    observed_curve: Vec<f64>,
    studentized: bool,
}

impl<'a> NaiveT3Sampler<'a> {
    pub fn new(sample: &'a FunctionalSample, studentized: bool) -> Self {
        let observed_curve = crate::stats::t_cross(sample).into_values();
        NaiveT3Sampler {
            sample,
            observed_curve,
            studentized,
        }
    }

    /// Replicate value for one substream; counts degenerate redraws.
    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u64)> {
        let n = self.sample.n();
        let mut indices = vec![0usize; n];
        let mut redraws = 0u64;
        loop {
            for slot in indices.iter_mut() {
                *slot = rng.gen_range(0..n);
            }
            match self.value_for_indices(&indices) {
                Some(value) => return Ok((value, redraws)),
                None => {
                    redraws += 1;
                    if redraws >= MAX_REDRAWS as u64 {
                        return Err(Error::RedrawBudgetExhausted {
                            attempts: MAX_REDRAWS,
                        });
                    }
                }
            }
        }
    }

    /// Deterministic replicate value for explicit resample indices; `None`
    /// when the studentized mode hits a zero-variance resample.
    ///
    /// Exposed so enumeration oracles can drive the production formula.
    pub fn value_for_indices(&self, indices: &[usize]) -> Option<f64> {
        let sample = self.sample;
        let n = indices.len();
        let p = sample.p();
        let inv_n = 1.0 / n as f64;

        let mut y_star_bar = 0.0;
        for &i in indices {
            y_star_bar += sample.responses()[i];
        }
        y_star_bar *= inv_n;

        let mut x_star_bar = vec![0.0; p];
        for &i in indices {
            let row = sample.curve(i);
            for k in 0..p {
                x_star_bar[k] += row[k];
            }
        }
        for v in &mut x_star_bar {
            *v *= inv_n;
        }

        let mut sigma_star_sq = 0.0;
        let mut curve = vec![0.0; p];
        for &i in indices {
            let y = sample.responses()[i] - y_star_bar;
            sigma_star_sq += y * y;
            let row = sample.curve(i);
            for k in 0..p {
                curve[k] += (row[k] - x_star_bar[k]) * y;
            }
        }
        sigma_star_sq *= inv_n;
        for (k, v) in curve.iter_mut().enumerate() {
            *v = *v * inv_n - self.observed_curve[k];
        }

        let value = norm_slice(sample.grid().weights(), &curve);
        if self.studentized {
            if sigma_star_sq <= 0.0 {
                return None;
            }
            Some(value / sigma_star_sq.sqrt())
        } else {
            Some(value)
        }
    }
}

/// Precomputed state for wild-bootstrap T3/T3s replicates.
pub struct WildT3Sampler<'a> {
    sample: &'a FunctionalSample,
    /// Centered products (Xᵢ−X̄)(Yᵢ−Ȳ), row-major n×p; multipliers act on these.
    products: Vec<f64>,
    /// `None` computes plain ‖T^W*‖ (T3); `Some` studentizes (T3s).
    variance: Option<VarianceMode>,
    multiplier: Multiplier,
    /// Observed σ̂, used by the FIXED studentization mode.
    sigma_hat: f64,
}

impl<'a> WildT3Sampler<'a> {
    /// # Errors
    /// Degenerate-variance error when FIXED studentization is requested on
    /// constant responses.
    pub fn new(
        sample: &'a FunctionalSample,
        multiplier: Multiplier,
        variance: Option<VarianceMode>,
    ) -> Result<Self> {
        let n = sample.n();
        let p = sample.p();
        let mean = sample.mean_curve();
        let mean = mean.values();
        let y_bar = sample.mean_response();
        let mut products = Vec::with_capacity(n * p);
        for i in 0..n {
            let y = sample.responses()[i] - y_bar;
            let row = sample.curve(i);
            for k in 0..p {
                products.push((row[k] - mean[k]) * y);
            }
        }
        let sigma_hat = sigma_hat_sq(sample.responses()).sqrt();
        if variance == Some(VarianceMode::Fixed) && sigma_hat <= 0.0 {
            return Err(Error::DegenerateVariance {
                what: "response variance",
            });
        }
        Ok(WildT3Sampler {
            sample,
            products,
            variance,
            multiplier,
            sigma_hat,
        })
    }

    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u64)> {
        let n = self.sample.n();
        let mut eps = vec![0.0; n];
        let mut redraws = 0u64;
        loop {
            for e in eps.iter_mut() {
                *e = self.multiplier.sample(rng);
            }
            match self.value_for_multipliers(&eps) {
                Some(value) => return Ok((value, redraws)),
                None => {
                    redraws += 1;
                    if redraws >= MAX_REDRAWS as u64 {
                        return Err(Error::RedrawBudgetExhausted {
                            attempts: MAX_REDRAWS,
                        });
                    }
                }
            }
        }
    }

    /// Deterministic replicate value for an explicit multiplier vector; `None`
    /// when BOOTSTRAPPED studentization hits a zero-variance pseudo-response.
    pub fn value_for_multipliers(&self, eps: &[f64]) -> Option<f64> {
        let sample = self.sample;
        let n = sample.n();
        let p = sample.p();
        let inv_n = 1.0 / n as f64;
        let mut curve = vec![0.0; p];
        for i in 0..n {
            let e = eps[i];
            let row = &self.products[i * p..(i + 1) * p];
            for k in 0..p {
                curve[k] += e * row[k];
            }
        }
        for v in &mut curve {
            *v *= inv_n;
        }
        let value = norm_slice(sample.grid().weights(), &curve);
        match self.variance {
            None => Some(value),
            Some(VarianceMode::Fixed) => Some(value / self.sigma_hat),
            Some(VarianceMode::Bootstrapped) => {
                // σ*² from the Y*ᵢ = Yᵢεᵢ* pseudo-responses.
                let sigma_star_sq = pseudo_response_variance(sample.responses(), eps);
                if sigma_star_sq <= 0.0 {
                    None
                } else {
                    Some(value / sigma_star_sq.sqrt())
                }
            }
        }
    }
}

fn pseudo_response_variance(responses: &[f64], eps: &[f64]) -> f64 {
    let n = responses.len();
    let inv_n = 1.0 / n as f64;
    let mut mean = 0.0;
    for i in 0..n {
        mean += responses[i] * eps[i];
    }
    mean *= inv_n;
    let mut var = 0.0;
    for i in 0..n {
        let d = responses[i] * eps[i] - mean;
        var += d * d;
    }
    var * inv_n
}

/// Precomputed state for wild-bootstrap T1/T2 replicates over one or more kₙ.
///
/// Eigenpairs are never recomputed; only the cross-projections change, driven
/// by the pseudo-responses Yᵢ* = Yᵢεᵢ*.
pub struct WildT1T2Sampler<'a> {
    dec: &'a FpcaDecomposition,
    responses: &'a [f64],
    /// Component counts to evaluate, ascending; replicates share one
    /// multiplier draw across all of them.
    kns: Vec<usize>,
    variance_mode: VarianceMode,
    multiplier: Multiplier,
    /// Observed σ̂², used by the FIXED mode.
    sigma_fixed_sq: f64,
}

/// Signed (T1*, T2*) pairs for each requested kₙ from one multiplier draw.
pub type SweepValues = Vec<(f64, f64)>;

impl<'a> WildT1T2Sampler<'a> {
    /// # Errors
    /// Rank error if any requested kₙ exceeds the decomposition rank;
    /// degenerate-variance error for FIXED mode on constant responses.
    pub fn new(
        dec: &'a FpcaDecomposition,
        responses: &'a [f64],
        kns: &[usize],
        multiplier: Multiplier,
        variance_mode: VarianceMode,
    ) -> Result<Self> {
        if responses.len() != dec.n() {
            return Err(Error::LengthMismatch {
                what: "responses vs decomposition",
                expected: dec.n(),
                found: responses.len(),
            });
        }
        let mut kns = kns.to_vec();
        kns.sort_unstable();
        kns.dedup();
        if kns.is_empty() {
            return Err(Error::config("at least one kn is required"));
        }
        for &kn in &kns {
            crate::fpca::validate_kn(kn, dec.rank())?;
        }
        let sigma_fixed_sq = sigma_hat_sq(responses);
        if variance_mode == VarianceMode::Fixed && sigma_fixed_sq <= 0.0 {
            return Err(Error::DegenerateVariance {
                what: "response variance",
            });
        }
        Ok(WildT1T2Sampler {
            dec,
            responses,
            kns,
            variance_mode,
            multiplier,
            sigma_fixed_sq,
        })
    }

    pub fn kns(&self) -> &[usize] {
        &self.kns
    }

    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(SweepValues, u64)> {
        let n = self.dec.n();
        let mut eps = vec![0.0; n];
        let mut redraws = 0u64;
        loop {
            for e in eps.iter_mut() {
                *e = self.multiplier.sample(rng);
            }
            match self.values_for_multipliers(&eps) {
                Some(values) => return Ok((values, redraws)),
                None => {
                    redraws += 1;
                    if redraws >= MAX_REDRAWS as u64 {
                        return Err(Error::RedrawBudgetExhausted {
                            attempts: MAX_REDRAWS,
                        });
                    }
                }
            }
        }
    }

    /// Signed (T1*, T2*) per kₙ for an explicit multiplier vector; `None` when
    /// BOOTSTRAPPED mode hits a zero-variance pseudo-response.
    pub fn values_for_multipliers(&self, eps: &[f64]) -> Option<SweepValues> {
        let dec = self.dec;
        let n = dec.n();
        let inv_n = 1.0 / n as f64;
        let k_max = *self.kns.last().expect("kns is non-empty");

        let sigma_sq = match self.variance_mode {
            VarianceMode::Fixed => self.sigma_fixed_sq,
            VarianceMode::Bootstrapped => {
                let v = pseudo_response_variance(self.responses, eps);
                if v <= 0.0 {
                    return None;
                }
                v
            }
        };

        // Δ*_j = (1/n) Σ_i score_ij (Y*_i − Ȳ*) for j ≤ max kₙ.
        let mut y_star_bar = 0.0;
        for i in 0..n {
            y_star_bar += self.responses[i] * eps[i];
        }
        y_star_bar *= inv_n;
        let mut proj = vec![0.0; k_max];
        for i in 0..n {
            let y = self.responses[i] * eps[i] - y_star_bar;
            let row = dec.scores(i);
            for j in 0..k_max {
                proj[j] += row[j] * y;
            }
        }
        for v in &mut proj {
            *v *= inv_n;
        }

        // Prefix sums turn the kₙ sweep into one pass.
        let mut values = Vec::with_capacity(self.kns.len());
        let mut t1_sum = 0.0;
        let mut t2_sum = 0.0;
        let mut j = 0;
        for &kn in &self.kns {
            while j < kn {
                let lambda = dec.eigenvalues()[j];
                t1_sum += proj[j] * proj[j] / lambda;
                let ratio = proj[j] / lambda;
                t2_sum += ratio * ratio;
                j += 1;
            }
            let kn_f = kn as f64;
            let t1_star = (n as f64 / sigma_sq * t1_sum - kn_f) / kn_f.sqrt();
            values.push((t1_star, t2_sum));
        }
        Some(values)
    }
}

/// Precomputed state for the bootstrap-precursor replicates.
pub struct PrecursorSampler<'a> {
    sample: &'a FunctionalSample,
    mean_curve: Vec<f64>,
    /// Curves drawn per replicate.
    m: usize,
}

impl<'a> PrecursorSampler<'a> {
    pub fn new(sample: &'a FunctionalSample, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("precursor draw count m must be positive"));
        }
        Ok(PrecursorSampler {
            sample,
            mean_curve: sample.mean_curve().into_values(),
            m,
        })
    }

    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n = self.sample.n();
        let mut indices = vec![0usize; self.m];
        for slot in indices.iter_mut() {
            *slot = rng.gen_range(0..n);
        }
        self.value_for_indices(&indices)
    }

    /// ‖(1/m)Σⱼ X_{iⱼ} − X̄‖ for explicit draw indices.
    pub fn value_for_indices(&self, indices: &[usize]) -> f64 {
        let p = self.sample.p();
        let inv_m = 1.0 / indices.len() as f64;
        let mut mean = vec![0.0; p];
        for &i in indices {
            let row = self.sample.curve(i);
            for k in 0..p {
                mean[k] += row[k];
            }
        }
        for (k, v) in mean.iter_mut().enumerate() {
            *v = *v * inv_m - self.mean_curve[k];
        }
        norm_slice(self.sample.grid().weights(), &mean)
    }
}

/// One naive paired-bootstrap T3 replicate (studentized version divides by
/// the resampled σ*); op-level convenience over [`NaiveT3Sampler`].
pub fn naive_t3_replicate<R: Rng + ?Sized>(
    sample: &FunctionalSample,
    studentized: bool,
    rng: &mut R,
) -> Result<f64> {
    NaiveT3Sampler::new(sample, studentized)
        .replicate(rng)
        .map(|(v, _)| v)
}

/// One wild-bootstrap T3 replicate; `variance = None` leaves it unstudentized.
pub fn wild_t3_replicate<R: Rng + ?Sized>(
    sample: &FunctionalSample,
    multiplier: Multiplier,
    variance: Option<VarianceMode>,
    rng: &mut R,
) -> Result<f64> {
    WildT3Sampler::new(sample, multiplier, variance)?
        .replicate(rng)
        .map(|(v, _)| v)
}

/// One wild-bootstrap draw of (|T1*|, |T2*|) at a single kₙ.
pub fn wild_t1_t2_replicate<R: Rng + ?Sized>(
    sample: &FunctionalSample,
    dec: &FpcaDecomposition,
    kn: usize,
    multiplier: Multiplier,
    variance_mode: VarianceMode,
    rng: &mut R,
) -> Result<(f64, f64)> {
    dec.check_sample(sample)?;
    let sampler =
        WildT1T2Sampler::new(dec, sample.responses(), &[kn], multiplier, variance_mode)?;
    let (values, _) = sampler.replicate(rng)?;
    let (t1_star, t2_star) = values[0];
    Ok((t1_star.abs(), t2_star.abs()))
}

/// One precursor replicate: norm of a resampled m-curve mean around X̄.
pub fn precursor_replicate<R: Rng + ?Sized>(
    sample: &FunctionalSample,
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(PrecursorSampler::new(sample, m)?.replicate(rng))
}

/// Run replicates 0..B in parallel, each on substream `(seed, l)`, and
/// assemble values in stream order plus the redraw total.
fn collect_replicates<F>(replicates: usize, seed: u64, f: F) -> Result<(Vec<f64>, u64)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<(f64, u64)> + Sync,
{
    let results: Vec<(f64, u64)> = (0..replicates)
        .into_par_iter()
        .map(|l| f(&mut substream(seed, l as u64)))
        .collect::<Result<_>>()?;
    let redraws = results.iter().map(|(_, r)| r).sum();
    Ok((results.into_iter().map(|(v, _)| v).collect(), redraws))
}

/// Whether a calibration kind is valid for a statistic: the asymptotic
/// reference fits T1 only, naive resampling fits T3/T3s, the precursor fits
/// T3s, and the wild bootstrap fits everything.
pub fn supports(calibration: CalibrationKind, statistic: StatisticKind) -> bool {
    match calibration {
        CalibrationKind::AsymptoticN02 => statistic == StatisticKind::T1,
        CalibrationKind::Naive => matches!(statistic, StatisticKind::T3 | StatisticKind::T3s),
        CalibrationKind::Wild => true,
        CalibrationKind::Precursor => statistic == StatisticKind::T3s,
    }
}

fn validate_combination(kind: StatisticKind, method: &CalibrationMethod) -> Result<()> {
    if !supports(method.kind, kind) {
        return Err(Error::config(format!(
            "calibration {} does not apply to statistic {kind}",
            method.kind
        )));
    }
    if method.is_resampling() && method.replicates == 0 {
        return Err(Error::config(
            "resampling calibrations need a positive replicate count",
        ));
    }
    Ok(())
}

/// Run one calibrated test, computing the FPCA decomposition on demand.
///
/// `kn` is required exactly when the statistic works on components (T1, T2).
/// Deterministic given the sample and `method.seed`, independent of the
/// worker-thread count.
///
/// # Errors
/// Configuration error for incompatible statistic/method pairs or a missing
/// `kn`; statistical errors (rank, degenerate variance) from the underlying
/// computations.
pub fn run_test(
    sample: &FunctionalSample,
    kind: StatisticKind,
    method: &CalibrationMethod,
    kn: Option<usize>,
) -> Result<TestOutcome> {
    let dec = if kind.needs_kn() {
        Some(decompose(sample, DEFAULT_RANK_TOLERANCE)?)
    } else {
        None
    };
    run_test_with_decomposition(sample, dec.as_ref(), kind, method, kn)
}

/// [`run_test`] against a decomposition the caller already has.
pub fn run_test_with_decomposition(
    sample: &FunctionalSample,
    dec: Option<&FpcaDecomposition>,
    kind: StatisticKind,
    method: &CalibrationMethod,
    kn: Option<usize>,
) -> Result<TestOutcome> {
    validate_combination(kind, method)?;
    let kn = match (kind.needs_kn(), kn) {
        (true, Some(kn)) => Some(kn),
        (true, None) => {
            return Err(Error::config(format!("statistic {kind} requires kn")));
        }
        (false, None) => None,
        (false, Some(_)) => {
            return Err(Error::config(format!("statistic {kind} does not take kn")));
        }
    };
    let start = Instant::now();

    let outcome = match kind {
        StatisticKind::T1 => {
            let dec = dec.ok_or_else(|| Error::config("t1 needs a decomposition"))?;
            dec.check_sample(sample)?;
            let kn = kn.expect("kn checked above");
            let sigma_sq = sigma_hat_sq(sample.responses());
            let observed = t1(sample, dec, kn, sigma_sq)?;
            match method.kind {
                CalibrationKind::AsymptoticN02 => {
                    let p_value = asymptotic_p_value_t1(observed.value);
                    (observed, p_value, None, ReplicateDiagnostics::default())
                }
                CalibrationKind::Wild => {
                    let sampler = WildT1T2Sampler::new(
                        dec,
                        sample.responses(),
                        &[kn],
                        method.multiplier,
                        method.variance_mode,
                    )?;
                    let (values, redraws) =
                        collect_replicates(method.replicates, method.seed, |rng| {
                            let (v, r) = sampler.replicate(rng)?;
                            Ok((v[0].0.abs(), r))
                        })?;
                    let p_value = p_value_from_replicates(
                        observed.value.abs(),
                        &values,
                        method.p_value_mode,
                    );
                    (observed, p_value, Some(values), ReplicateDiagnostics { redraws })
                }
                _ => unreachable!("combination validated"),
            }
        }
        StatisticKind::T2 => {
            let dec = dec.ok_or_else(|| Error::config("t2 needs a decomposition"))?;
            dec.check_sample(sample)?;
            let kn = kn.expect("kn checked above");
            let observed = t2(dec, kn)?;
            let sampler = WildT1T2Sampler::new(
                dec,
                sample.responses(),
                &[kn],
                method.multiplier,
                method.variance_mode,
            )?;
            let (values, redraws) = collect_replicates(method.replicates, method.seed, |rng| {
                let (v, r) = sampler.replicate(rng)?;
                Ok((v[0].1.abs(), r))
            })?;
            let p_value =
                p_value_from_replicates(observed.value, &values, method.p_value_mode);
            (observed, p_value, Some(values), ReplicateDiagnostics { redraws })
        }
        StatisticKind::T3 => {
            let observed = t3(sample);
            let (values, redraws) = match method.kind {
                CalibrationKind::Naive => {
                    let sampler = NaiveT3Sampler::new(sample, false);
                    collect_replicates(method.replicates, method.seed, |rng| {
                        sampler.replicate(rng)
                    })?
                }
                CalibrationKind::Wild => {
                    let sampler = WildT3Sampler::new(sample, method.multiplier, None)?;
                    collect_replicates(method.replicates, method.seed, |rng| {
                        sampler.replicate(rng)
                    })?
                }
                _ => unreachable!("combination validated"),
            };
            let p_value =
                p_value_from_replicates(observed.value, &values, method.p_value_mode);
            (observed, p_value, Some(values), ReplicateDiagnostics { redraws })
        }
        StatisticKind::T3s => {
            let observed = t3s(sample)?;
            match method.kind {
                CalibrationKind::Naive | CalibrationKind::Wild => {
                    let (values, redraws) = match method.kind {
                        CalibrationKind::Naive => {
                            let sampler = NaiveT3Sampler::new(sample, true);
                            collect_replicates(method.replicates, method.seed, |rng| {
                                sampler.replicate(rng)
                            })?
                        }
                        _ => {
                            let sampler = WildT3Sampler::new(
                                sample,
                                method.multiplier,
                                Some(method.variance_mode),
                            )?;
                            collect_replicates(method.replicates, method.seed, |rng| {
                                sampler.replicate(rng)
                            })?
                        }
                    };
                    let p_value =
                        p_value_from_replicates(observed.value, &values, method.p_value_mode);
                    (observed, p_value, Some(values), ReplicateDiagnostics { redraws })
                }
                CalibrationKind::Precursor => {
                    // Calibrates ‖√n·Tₙ‖/σ̂ against √m·‖(1/m)Σ(Xᵢ*−X̄)‖, the
                    // scale on which both sides approximate the same Gaussian
                    // norm; m is tied to the sample size.
                    let m = sample.n();
                    let sampler = PrecursorSampler::new(sample, m)?;
                    let scale = (m as f64).sqrt();
                    let (values, redraws) =
                        collect_replicates(method.replicates, method.seed, |rng| {
                            Ok((scale * sampler.replicate(rng), 0))
                        })?;
                    let scaled_observed = (sample.n() as f64).sqrt() * observed.value;
                    let p_value =
                        p_value_from_replicates(scaled_observed, &values, method.p_value_mode);
                    (observed, p_value, Some(values), ReplicateDiagnostics { redraws })
                }
                _ => unreachable!("combination validated"),
            }
        }
    };

    let (statistic, p_value, replicate_values, diagnostics) = outcome;
    Ok(TestOutcome {
        statistic,
        method: *method,
        p_value,
        replicate_values,
        diagnostics,
        elapsed: start.elapsed(),
    })
}
