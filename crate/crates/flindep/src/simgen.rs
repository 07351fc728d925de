//! Synthetic-data generation and the scenario runner that estimates
//! rejection rates over many simulated datasets.
//!
//! Datasets pair standard Brownian-motion curves on [0, 1] with responses
//! Yᵢ = ⟨Θ, Xᵢ⟩ + b + εᵢ, Gaussian errors. The slope is either zero (null),
//! a fixed curve with noise tied to the signal-to-noise ratio, or a local
//! alternative that shrinks with the sample size. Everything is driven by
//! counter-derived seeds, so a scenario yields identical numbers regardless
//! of thread count.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{
    supports, CalibrationKind, CalibrationMethod, Multiplier, PValueMode, VarianceMode,
    WildT1T2Sampler,
};
use crate::error::{Error, Result};
use crate::fpca::{decompose, FpcaDecomposition, DEFAULT_RANK_TOLERANCE};
use crate::hilbert::{inner_product, Curve, FunctionalSample, Grid};
use crate::rng::{child_seed, substream};
use crate::stats::{sigma_hat_sq, t1, t2, StatisticKind};

/// Stream label for dataset generation under a scenario seed.
const DATASET_STREAM: u64 = 1;
/// Stream label for per-dataset, per-method replicate seeds.
const METHOD_STREAM: u64 = 2;

/// Standard Brownian motion sampled at the grid points, starting at zero.
///
/// Increments are independent N(0, t_{k+1} − t_k); one normal draw per step.
pub fn brownian_path<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Curve {
    let points = grid.points();
    let mut values = Vec::with_capacity(points.len());
    let mut current = 0.0;
    values.push(current);
    for w in points.windows(2) {
        let dt = w[1] - w[0];
        let z: f64 = StandardNormal.sample(rng);
        current += dt.sqrt() * z;
        values.push(current);
    }
    Curve::new(values).expect("finite by construction")
}

/// The benchmark slope curve sin(2πt³)³ evaluated on the grid.
pub fn sin_cubed_curve(grid: &Grid) -> Result<Curve> {
    Curve::from_fn(grid, |t| {
        let s = (2.0 * std::f64::consts::PI * t.powi(3)).sin();
        s * s * s
    })
}

/// Second moment E⟨X, θ⟩² when X is standard Brownian motion:
/// the double quadrature of min(s, t) θ(s) θ(t) over the grid.
pub fn signal_second_moment(theta: &Curve, grid: &Grid) -> Result<f64> {
    if theta.values().len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "slope curve vs grid",
            expected: grid.len(),
            found: theta.values().len(),
        });
    }
    let points = grid.points();
    let weights = grid.weights();
    let v = theta.values();
    let mut total = 0.0;
    for j in 0..grid.len() {
        let mut inner = 0.0;
        for k in 0..grid.len() {
            inner += weights[k] * points[j].min(points[k]) * v[k];
        }
        total += weights[j] * v[j] * inner;
    }
    Ok(total)
}

/// Error standard deviation that fixes the noise-to-signal ratio at `r`:
/// σ = r · √(E⟨X, θ⟩²).
///
/// # Errors
/// Degenerate-signal error when the slope carries no signal energy.
pub fn sigma_for_snr(theta: &Curve, grid: &Grid, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::config(format!("ratio r must be positive, got {r}")));
    }
    let energy = signal_second_moment(theta, grid)?;
    if energy <= 1e-300 {
        return Err(Error::DegenerateSignal);
    }
    Ok(r * energy.sqrt())
}

/// Slope curve used by a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaSpec {
    /// Θ = 0; the no-effect case.
    Zero,
    /// Θ(t) = sin(2πt³)³.
    SinCubed,
    /// Explicit values on the scenario grid.
    Custom(Vec<f64>),
}

impl ThetaSpec {
    pub fn is_zero(&self) -> bool {
        matches!(self, ThetaSpec::Zero)
    }

    /// The slope curve on `grid`, or `None` for the zero slope.
    pub fn curve(&self, grid: &Grid) -> Result<Option<Curve>> {
        match self {
            ThetaSpec::Zero => Ok(None),
            ThetaSpec::SinCubed => sin_cubed_curve(grid).map(Some),
            ThetaSpec::Custom(values) => {
                if values.len() != grid.len() {
                    return Err(Error::LengthMismatch {
                        what: "custom slope vs grid",
                        expected: grid.len(),
                        found: values.len(),
                    });
                }
                Curve::new(values.clone()).map(Some)
            }
        }
    }
}

/// Shrinking alternative: the slope is multiplied by scale·n^exponent/√n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LocalAlternative {
    pub scale: f64,
    pub exponent: f64,
}

impl LocalAlternative {
    /// The multiplier applied to the slope at sample size `n`.
    pub fn slope_factor(&self, n: usize) -> f64 {
        self.scale * (n as f64).powf(self.exponent) / (n as f64).sqrt()
    }
}

/// One test configuration evaluated inside a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct MethodSpec {
    pub statistic: StatisticKind,
    pub calibration: CalibrationKind,
    #[serde(default = "default_multiplier")]
    pub multiplier: Multiplier,
    #[serde(default = "default_variance_mode")]
    pub variance_mode: VarianceMode,
    /// Overrides the generated label in reports and tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn default_multiplier() -> Multiplier {
    Multiplier::Gaussian
}

fn default_variance_mode() -> VarianceMode {
    VarianceMode::Bootstrapped
}

impl MethodSpec {
    /// Stable identifier: statistic and calibration, with the variance mode
    /// appended where it changes the replicates (wild T1/T3s) and the
    /// multiplier appended when it is not Gaussian.
    pub fn label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        let calibration = match self.calibration {
            CalibrationKind::AsymptoticN02 => "asymptotic",
            CalibrationKind::Naive => "naive",
            CalibrationKind::Wild => "wild",
            CalibrationKind::Precursor => "precursor",
        };
        let mut label = format!("{}-{}", self.statistic, calibration);
        if self.calibration == CalibrationKind::Wild
            && matches!(self.statistic, StatisticKind::T1 | StatisticKind::T3s)
        {
            label.push_str(match self.variance_mode {
                VarianceMode::Bootstrapped => "-boot",
                VarianceMode::Fixed => "-fixed",
            });
        }
        if self.calibration != CalibrationKind::AsymptoticN02
            && self.multiplier != Multiplier::Gaussian
        {
            label.push_str(match self.multiplier {
                Multiplier::Gaussian => unreachable!(),
                Multiplier::Rademacher => "-rademacher",
                Multiplier::Mammen => "-mammen",
            });
        }
        label
    }

    fn calibration_method(&self, spec: &ScenarioSpec, seed: u64) -> CalibrationMethod {
        CalibrationMethod {
            kind: self.calibration,
            multiplier: self.multiplier,
            replicates: spec.replicates,
            seed,
            variance_mode: self.variance_mode,
            p_value_mode: spec.p_value_mode,
        }
    }
}

/// Complete description of one simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    /// Curves per dataset.
    pub n: usize,
    /// Grid points per curve.
    pub p: usize,
    /// Independent datasets to simulate.
    pub datasets: usize,
    pub seed: u64,
    pub theta: ThetaSpec,
    /// Error standard deviation; required when the slope is zero or local.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    /// Noise-to-signal ratio; required for a fixed non-zero slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalAlternative>,
    #[serde(default)]
    pub intercept: f64,
    pub alphas: Vec<f64>,
    /// Component counts swept by T1/T2 methods.
    #[serde(default)]
    pub kn: Vec<usize>,
    /// Bootstrap replicates per test.
    #[serde(default)]
    pub replicates: usize,
    #[serde(default = "default_p_value_mode")]
    pub p_value_mode: PValueMode,
    pub methods: Vec<MethodSpec>,
}

fn default_p_value_mode() -> PValueMode {
    PValueMode::Proportion
}

impl ScenarioSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(0.0, 1.0, self.p)
    }

    /// Collects every configuration problem instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let ctx = &self.name;
        if self.name.trim().is_empty() {
            problems.push("scenario name must not be empty".to_string());
        }
        if self.n < 2 {
            problems.push(format!("{ctx}: n must be at least 2, got {}", self.n));
        }
        if self.p < 2 {
            problems.push(format!("{ctx}: p must be at least 2, got {}", self.p));
        }
        if self.datasets == 0 {
            problems.push(format!("{ctx}: datasets must be positive"));
        }
        if self.alphas.is_empty() {
            problems.push(format!("{ctx}: at least one alpha level is required"));
        }
        for &alpha in &self.alphas {
            if !(alpha > 0.0 && alpha < 1.0) {
                problems.push(format!("{ctx}: alpha {alpha} is outside (0, 1)"));
            }
        }
        if self.methods.is_empty() {
            problems.push(format!("{ctx}: at least one method is required"));
        }
        let mut needs_kn = false;
        let mut needs_replicates = false;
        for m in &self.methods {
            if !supports(m.calibration, m.statistic) {
                problems.push(format!(
                    "{ctx}: calibration {} does not apply to statistic {}",
                    m.calibration, m.statistic
                ));
            }
            needs_kn |= m.statistic.needs_kn();
            needs_replicates |= m.calibration != CalibrationKind::AsymptoticN02;
        }
        if needs_kn && self.kn.is_empty() {
            problems.push(format!(
                "{ctx}: methods on components need at least one kn"
            ));
        }
        for &kn in &self.kn {
            if kn == 0 {
                problems.push(format!("{ctx}: kn values must be positive"));
            } else if kn >= self.n {
                problems.push(format!(
                    "{ctx}: kn {kn} cannot reach the rank of {} centered curves",
                    self.n
                ));
            }
        }
        if needs_replicates && self.replicates == 0 {
            problems.push(format!(
                "{ctx}: resampling methods need a positive replicate count"
            ));
        }
        if !self.intercept.is_finite() {
            problems.push(format!("{ctx}: intercept must be finite"));
        }
        match (&self.theta, &self.local) {
            (ThetaSpec::Zero, Some(_)) => {
                problems.push(format!("{ctx}: a local alternative needs a non-zero slope"));
            }
            (ThetaSpec::Zero, None) => {
                if self.r.is_some() {
                    problems.push(format!("{ctx}: r has no effect when the slope is zero"));
                }
                if self.sigma0.is_none() {
                    problems.push(format!("{ctx}: sigma0 is required when the slope is zero"));
                }
            }
            (_, Some(local)) => {
                if self.r.is_some() {
                    problems.push(format!(
                        "{ctx}: r and a local alternative cannot be combined"
                    ));
                }
                if self.sigma0.is_none() {
                    problems.push(format!(
                        "{ctx}: sigma0 is required for a local alternative"
                    ));
                }
                if !(local.scale.is_finite() && local.scale >= 0.0) {
                    problems.push(format!("{ctx}: local scale must be non-negative"));
                }
                if !(local.exponent.is_finite() && local.exponent < 0.5) {
                    problems.push(format!(
                        "{ctx}: local exponent must be below 0.5 so the drift stays local"
                    ));
                }
            }
            (_, None) => {
                if self.sigma0.is_some() {
                    problems.push(format!(
                        "{ctx}: a fixed slope takes its noise from r, not sigma0"
                    ));
                }
                if self.r.is_none() {
                    problems.push(format!("{ctx}: r is required for a fixed non-zero slope"));
                }
            }
        }
        if let Some(sigma0) = self.sigma0 {
            if !(sigma0.is_finite() && sigma0 > 0.0) {
                problems.push(format!("{ctx}: sigma0 must be positive, got {sigma0}"));
            }
        }
        if let Some(r) = self.r {
            if !(r.is_finite() && r > 0.0) {
                problems.push(format!("{ctx}: r must be positive, got {r}"));
            }
        }
        if let ThetaSpec::Custom(values) = &self.theta {
            if values.len() != self.p {
                problems.push(format!(
                    "{ctx}: custom slope has {} values but the grid has {}",
                    values.len(),
                    self.p
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                problems.push(format!("{ctx}: custom slope values must be finite"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config { problems })
        }
    }

    /// The slope actually applied to the data, local shrinkage included.
    pub fn effective_theta(&self, grid: &Grid) -> Result<Option<Curve>> {
        let Some(base) = self.theta.curve(grid)? else {
            return Ok(None);
        };
        let factor = self.local.map_or(1.0, |l| l.slope_factor(self.n));
        let values = base.values().iter().map(|v| v * factor).collect();
        Curve::new(values).map(Some)
    }

    /// The error standard deviation the scenario dictates.
    pub fn sigma(&self, grid: &Grid) -> Result<f64> {
        match (&self.theta, &self.local, self.r, self.sigma0) {
            (ThetaSpec::Zero, _, _, Some(s)) => Ok(s),
            (_, Some(_), _, Some(s)) => Ok(s),
            (_, None, Some(r), _) => {
                let theta = self
                    .theta
                    .curve(grid)?
                    .ok_or(Error::DegenerateSignal)?;
                sigma_for_snr(&theta, grid, r)
            }
            _ => Err(Error::config(format!(
                "{}: noise level is underdetermined; run validate() first",
                self.name
            ))),
        }
    }
}

/// Simulate dataset `index` of a scenario: n Brownian paths and their
/// responses. Each dataset owns a seed derived from (scenario seed, index),
/// so datasets can be generated in any order or in parallel.
pub fn generate_dataset(spec: &ScenarioSpec, index: u64) -> Result<FunctionalSample> {
    let grid = spec.grid()?;
    let theta = spec.effective_theta(&grid)?;
    let sigma = spec.sigma(&grid)?;
    let mut rng = substream(child_seed(spec.seed, &[DATASET_STREAM, index]), 0);

    let n = spec.n;
    let p = spec.p;
    let mut values = Vec::with_capacity(n * p);
    let mut responses = Vec::with_capacity(n);
    for _ in 0..n {
        let path = brownian_path(&grid, &mut rng);
        let noise: f64 = StandardNormal.sample(&mut rng);
        let mut y = spec.intercept + sigma * noise;
        if let Some(theta) = &theta {
            y += inner_product(&path, theta, &grid)?;
        }
        responses.push(y);
        values.extend_from_slice(path.values());
    }
    FunctionalSample::from_flat(grid, values, n, responses)
}

/// Rejection rate of one method at one (kₙ, α) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCell {
    pub label: String,
    pub statistic: StatisticKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kn: Option<usize>,
    pub alpha: f64,
    pub rejections: usize,
    pub datasets: usize,
    /// Proportion of datasets with p ≤ α.
    pub rate: f64,
    /// Binomial standard error of the rate.
    pub monte_carlo_se: f64,
}

/// Aggregated outcome of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub spec: ScenarioSpec,
    pub cells: Vec<MethodCell>,
    #[serde(skip, default)]
    pub elapsed: Duration,
}

/// Column identity: a method at one kₙ (or none); p-values live per column.
struct ColumnKey {
    method_idx: usize,
    kn: Option<usize>,
}

fn column_layout(spec: &ScenarioSpec) -> Vec<ColumnKey> {
    let mut layout = Vec::new();
    for (method_idx, m) in spec.methods.iter().enumerate() {
        if m.statistic.needs_kn() {
            let mut kns = spec.kn.clone();
            kns.sort_unstable();
            kns.dedup();
            for kn in kns {
                layout.push(ColumnKey {
                    method_idx,
                    kn: Some(kn),
                });
            }
        } else {
            layout.push(ColumnKey {
                method_idx,
                kn: None,
            });
        }
    }
    layout
}

/// p-values for every column of `layout` on one dataset.
fn dataset_p_values(
    spec: &ScenarioSpec,
    layout: &[ColumnKey],
    dataset_index: u64,
) -> Result<Vec<f64>> {
    let sample = generate_dataset(spec, dataset_index)?;
    let needs_dec = spec.methods.iter().any(|m| m.statistic.needs_kn());
    let dec = if needs_dec {
        Some(decompose(&sample, DEFAULT_RANK_TOLERANCE)?)
    } else {
        None
    };

    let mut kns = spec.kn.clone();
    kns.sort_unstable();
    kns.dedup();

    // p-values per method, keyed like the layout.
    let mut per_method: Vec<Vec<(Option<usize>, f64)>> = Vec::with_capacity(spec.methods.len());
    for (method_idx, m) in spec.methods.iter().enumerate() {
        let seed = child_seed(spec.seed, &[METHOD_STREAM, dataset_index, method_idx as u64]);
        let entry = match m.statistic {
            StatisticKind::T1 | StatisticKind::T2 => component_p_values(
                &sample,
                dec.as_ref().expect("decomposition exists when needed"),
                m,
                spec,
                &kns,
                seed,
            )?,
            StatisticKind::T3 | StatisticKind::T3s => {
                let method = m.calibration_method(spec, seed);
                let outcome = crate::bootstrap::run_test_with_decomposition(
                    &sample,
                    None,
                    m.statistic,
                    &method,
                    None,
                )?;
                vec![(None, outcome.p_value)]
            }
        };
        per_method.push(entry);
    }

    let mut ps = Vec::with_capacity(layout.len());
    for key in layout {
        let entry = &per_method[key.method_idx];
        let p = entry
            .iter()
            .find(|(kn, _)| *kn == key.kn)
            .map(|(_, p)| *p)
            .expect("layout and per-method columns agree");
        ps.push(p);
    }
    Ok(ps)
}

/// T1/T2 p-values across the kₙ sweep for one method on one dataset.
///
/// Wild replicates draw one multiplier vector per replicate and reuse it for
/// every kₙ, so a sweep gives the same numbers as separate single-kₙ runs
/// with the same seed.
fn component_p_values(
    sample: &FunctionalSample,
    dec: &FpcaDecomposition,
    m: &MethodSpec,
    spec: &ScenarioSpec,
    kns: &[usize],
    seed: u64,
) -> Result<Vec<(Option<usize>, f64)>> {
    let sigma_sq = sigma_hat_sq(sample.responses());
    let observed: Vec<f64> = kns
        .iter()
        .map(|&kn| match m.statistic {
            StatisticKind::T1 => t1(sample, dec, kn, sigma_sq).map(|s| s.value),
            StatisticKind::T2 => t2(dec, kn).map(|s| s.value),
            _ => unreachable!("component statistics only"),
        })
        .collect::<Result<_>>()?;

    if m.calibration == CalibrationKind::AsymptoticN02 {
        return Ok(kns
            .iter()
            .zip(&observed)
            .map(|(&kn, &t)| (Some(kn), crate::bootstrap::asymptotic_p_value_t1(t)))
            .collect());
    }

    let sampler = WildT1T2Sampler::new(dec, sample.responses(), kns, m.multiplier, m.variance_mode)?;
    let mut exceed = vec![0usize; kns.len()];
    for l in 0..spec.replicates {
        let (values, _) = sampler.replicate(&mut substream(seed, l as u64))?;
        for (pos, (t1_star, t2_star)) in values.iter().enumerate() {
            let replicate = match m.statistic {
                StatisticKind::T1 => t1_star.abs(),
                StatisticKind::T2 => t2_star.abs(),
                _ => unreachable!(),
            };
            let target = match m.statistic {
                StatisticKind::T1 => observed[pos].abs(),
                StatisticKind::T2 => observed[pos],
                _ => unreachable!(),
            };
            if replicate >= target {
                exceed[pos] += 1;
            }
        }
    }
    let b = spec.replicates;
    Ok(kns
        .iter()
        .enumerate()
        .map(|(pos, &kn)| {
            let p = match spec.p_value_mode {
                PValueMode::Proportion => exceed[pos] as f64 / b as f64,
                PValueMode::AddOne => (1 + exceed[pos]) as f64 / (b + 1) as f64,
            };
            (Some(kn), p)
        })
        .collect())
}

/// Run a scenario: simulate every dataset, test it with every method, and
/// aggregate rejection rates per (method, kₙ, α).
///
/// Datasets run in parallel; results are deterministic for a given spec.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioReport> {
    spec.validate()?;
    let start = Instant::now();
    let layout = column_layout(spec);

    let per_dataset: Vec<Vec<f64>> = (0..spec.datasets as u64)
        .into_par_iter()
        .map(|d| dataset_p_values(spec, &layout, d))
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(layout.len() * spec.alphas.len());
    for (pos, key) in layout.iter().enumerate() {
        let m = &spec.methods[key.method_idx];
        for &alpha in &spec.alphas {
            let rejections = per_dataset.iter().filter(|ps| ps[pos] <= alpha).count();
            let datasets = spec.datasets;
            let rate = rejections as f64 / datasets as f64;
            let monte_carlo_se = (rate * (1.0 - rate) / datasets as f64).sqrt();
            cells.push(MethodCell {
                label: m.label(),
                statistic: m.statistic,
                kn: key.kn,
                alpha,
                rejections,
                datasets,
                rate,
                monte_carlo_se,
            });
        }
    }

    Ok(ScenarioReport {
        name: spec.name.clone(),
        spec: spec.clone(),
        cells,
        elapsed: start.elapsed(),
    })
}

/// Container for scenario files: one `[[scenario]]` block per scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub scenario: Vec<ScenarioSpec>,
}

/// Parse and validate a scenario file in TOML form.
///
/// # Errors
/// Configuration error carrying every problem found, not just the first.
pub fn load_scenarios(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::config(format!("scenario file: {e}")))?;
    if file.scenario.is_empty() {
        return Err(Error::config(
            "scenario file defines no [[scenario]] blocks",
        ));
    }
    let mut problems = Vec::new();
    for spec in &file.scenario {
        if let Err(Error::Config { problems: p }) = spec.validate() {
            problems.extend(p);
        }
    }
    if problems.is_empty() {
        Ok(file.scenario)
    } else {
        Err(Error::Config { problems })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// ‖sin(2πt³)³‖ on a 100-point grid, computed independently beforehand.
    const SIN_CUBED_NORM: f64 = 0.4466029353324201;
    /// E⟨X, Θ₁⟩², continuum value, computed independently on fine grids.
    const SIGNAL_SECOND_MOMENT: f64 = 0.0071693453564020265;
    /// E⟨X, Θ₁⟩² under 100-point trapezoid quadrature, computed independently.
    const SIGNAL_SECOND_MOMENT_P100: f64 = 0.0071709990816442243;

    fn grid100() -> Grid {
        Grid::uniform(0.0, 1.0, 100).unwrap()
    }

    #[test]
    fn brownian_paths_match_the_covariance_law() {
        let grid = Grid::uniform(0.0, 1.0, 5).unwrap();
        let n = 20_000;
        let mut sum_sq = vec![0.0; 5];
        let mut sum_cross = 0.0;
        for i in 0..n {
            let path = brownian_path(&grid, &mut substream(100, i));
            assert_eq!(path.values()[0], 0.0);
            for (k, v) in path.values().iter().enumerate() {
                sum_sq[k] += v * v;
            }
            // Cov(X(0.25), X(1.0)) should be min(0.25, 1.0).
            sum_cross += path.values()[1] * path.values()[4];
        }
        for (k, &t) in grid.points().iter().enumerate() {
            let var = sum_sq[k] / n as f64;
            // 3 standard errors of the variance estimate: t√(2/n).
            let tol = 3.0 * t * (2.0 / n as f64).sqrt() + 1e-12;
            assert!((var - t).abs() < tol, "Var(X({t})) = {var}");
        }
        let cov = sum_cross / n as f64;
        let tol = 3.0 * (2.0 * 0.25f64.powi(2) + 0.25 * 0.75).sqrt() / (n as f64).sqrt();
        assert!((cov - 0.25).abs() < tol, "cov {cov}");
    }

    #[test]
    fn benchmark_slope_has_the_frozen_norm() {
        let grid = grid100();
        let theta = sin_cubed_curve(&grid).unwrap();
        let norm = crate::hilbert::norm(&theta, &grid).unwrap();
        assert_abs_diff_eq!(norm, SIN_CUBED_NORM, epsilon = 1e-8);
    }

    #[test]
    fn signal_second_moment_matches_the_frozen_quadrature() {
        let grid = grid100();
        let theta = sin_cubed_curve(&grid).unwrap();
        let energy = signal_second_moment(&theta, &grid).unwrap();
        // Exact against an independent implementation of the same quadrature,
        // and within discretization distance of the continuum value.
        assert_abs_diff_eq!(energy, SIGNAL_SECOND_MOMENT_P100, epsilon = 1e-15);
        assert_abs_diff_eq!(energy, SIGNAL_SECOND_MOMENT, epsilon = 5e-6);
        let sigma = sigma_for_snr(&theta, &grid, 0.5).unwrap();
        assert_abs_diff_eq!(sigma, 0.5 * SIGNAL_SECOND_MOMENT_P100.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn signal_second_moment_agrees_with_monte_carlo() {
        let grid = grid100();
        let theta = sin_cubed_curve(&grid).unwrap();
        let n = 20_000;
        let mut sum = 0.0;
        for i in 0..n {
            let path = brownian_path(&grid, &mut substream(101, i));
            let ip = inner_product(&path, &theta, &grid).unwrap();
            sum += ip * ip;
        }
        let estimate = sum / n as f64;
        // Var(Z²) = 2V² for centered Gaussian Z with variance V.
        let tol = 3.0 * SIGNAL_SECOND_MOMENT * (2.0 / n as f64).sqrt();
        assert!(
            (estimate - SIGNAL_SECOND_MOMENT).abs() < tol,
            "estimate {estimate}"
        );
    }

    #[test]
    fn zero_slope_has_no_signal_energy() {
        let grid = grid100();
        let zero = Curve::zero(grid.len());
        assert!(matches!(
            sigma_for_snr(&zero, &grid, 0.5),
            Err(Error::DegenerateSignal)
        ));
        assert!(sigma_for_snr(&sin_cubed_curve(&grid).unwrap(), &grid, 0.0).is_err());
    }

    #[test]
    fn local_alternative_slope_factor_arithmetic() {
        let local = LocalAlternative {
            scale: 2.0,
            exponent: 0.25,
        };
        assert_abs_diff_eq!(
            local.slope_factor(100),
            2.0 * 100f64.powf(0.25) / 10.0,
            epsilon = 1e-15
        );
        let root_n = LocalAlternative {
            scale: 3.0,
            exponent: 0.0,
        };
        assert_abs_diff_eq!(root_n.slope_factor(25), 0.6, epsilon = 1e-15);
    }

    fn null_spec() -> ScenarioSpec {
        ScenarioSpec {
            name: "null".to_string(),
            n: 20,
            p: 16,
            datasets: 4,
            seed: 7,
            theta: ThetaSpec::Zero,
            sigma0: Some(1.0),
            r: None,
            local: None,
            intercept: 0.0,
            alphas: vec![0.05, 0.01],
            kn: vec![2, 3],
            replicates: 40,
            p_value_mode: PValueMode::Proportion,
            methods: vec![
                MethodSpec {
                    statistic: StatisticKind::T1,
                    calibration: CalibrationKind::AsymptoticN02,
                    multiplier: Multiplier::Gaussian,
                    variance_mode: VarianceMode::Bootstrapped,
                    label: None,
                },
                MethodSpec {
                    statistic: StatisticKind::T2,
                    calibration: CalibrationKind::Wild,
                    multiplier: Multiplier::Gaussian,
                    variance_mode: VarianceMode::Bootstrapped,
                    label: None,
                },
                MethodSpec {
                    statistic: StatisticKind::T3,
                    calibration: CalibrationKind::Wild,
                    multiplier: Multiplier::Gaussian,
                    variance_mode: VarianceMode::Bootstrapped,
                    label: None,
                },
            ],
        }
    }

    #[test]
    fn dataset_generation_is_deterministic_per_index() {
        let spec = null_spec();
        let a = generate_dataset(&spec, 3).unwrap();
        let b = generate_dataset(&spec, 3).unwrap();
        let c = generate_dataset(&spec, 4).unwrap();
        assert_eq!(a.curve(0), b.curve(0));
        assert_eq!(a.responses(), b.responses());
        assert_ne!(a.responses(), c.responses());
    }

    #[test]
    fn null_responses_follow_the_error_law() {
        let mut spec = null_spec();
        spec.n = 200;
        spec.sigma0 = Some(2.0);
        spec.intercept = 5.0;
        let mut pooled = Vec::new();
        for d in 0..50 {
            pooled.extend_from_slice(generate_dataset(&spec, d).unwrap().responses());
        }
        let n = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / n;
        let var = pooled.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
        assert!((mean - 5.0).abs() < 3.0 * 2.0 / n.sqrt(), "mean {mean}");
        assert!((var - 4.0).abs() < 3.0 * 4.0 * (2.0 / n).sqrt(), "var {var}");
    }

    #[test]
    fn fixed_slope_responses_carry_the_signal() {
        // With r = 0.5 the signal variance is 4x the noise variance.
        let spec = ScenarioSpec {
            name: "signal".to_string(),
            theta: ThetaSpec::SinCubed,
            sigma0: None,
            r: Some(0.5),
            n: 400,
            p: 100,
            ..null_spec()
        };
        let grid = spec.grid().unwrap();
        assert_abs_diff_eq!(
            spec.sigma(&grid).unwrap(),
            0.5 * SIGNAL_SECOND_MOMENT_P100.sqrt(),
            epsilon = 1e-12
        );
        let mut var_sum = 0.0;
        let datasets = 20;
        for d in 0..datasets {
            let sample = generate_dataset(&spec, d).unwrap();
            var_sum += sigma_hat_sq(sample.responses());
        }
        let var = var_sum / datasets as f64;
        let want = SIGNAL_SECOND_MOMENT_P100 * 1.25;
        assert!(
            (var - want).abs() < 0.1 * want,
            "pooled response variance {var} vs {want}"
        );
    }

    #[test]
    fn local_alternative_shrinks_the_applied_slope() {
        let spec = ScenarioSpec {
            name: "local".to_string(),
            theta: ThetaSpec::SinCubed,
            sigma0: Some(0.1),
            r: None,
            local: Some(LocalAlternative {
                scale: 1.0,
                exponent: 0.25,
            }),
            ..null_spec()
        };
        let grid = spec.grid().unwrap();
        let effective = spec.effective_theta(&grid).unwrap().unwrap();
        let base = sin_cubed_curve(&grid).unwrap();
        let factor = (spec.n as f64).powf(0.25) / (spec.n as f64).sqrt();
        for (e, b) in effective.values().iter().zip(base.values()) {
            assert_abs_diff_eq!(*e, b * factor, epsilon = 1e-15);
        }
    }

    #[test]
    fn validation_collects_every_problem() {
        let mut spec = null_spec();
        spec.n = 1;
        spec.alphas = vec![1.5];
        spec.r = Some(0.5); // conflicts with the zero slope
        spec.methods.push(MethodSpec {
            statistic: StatisticKind::T3,
            calibration: CalibrationKind::AsymptoticN02,
            multiplier: Multiplier::Gaussian,
            variance_mode: VarianceMode::Bootstrapped,
            label: None,
        });
        let err = spec.validate().unwrap_err();
        match err {
            Error::Config { problems } => {
                assert!(problems.len() >= 4, "problems: {problems:?}");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert_eq!(spec.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn scenario_runs_are_deterministic() {
        let spec = null_spec();
        let a = run_scenario(&spec).unwrap();
        let b = run_scenario(&spec).unwrap();
        assert_eq!(a.cells, b.cells);
        // 2 kn columns for t1, 2 for t2, 1 for t3, times 2 alphas.
        assert_eq!(a.cells.len(), 10);
        for cell in &a.cells {
            assert!(cell.rate >= 0.0 && cell.rate <= 1.0);
            assert_eq!(cell.datasets, spec.datasets);
            assert_eq!(
                cell.rejections as f64 / cell.datasets as f64,
                cell.rate
            );
        }
    }

    #[test]
    fn scenario_file_round_trip_and_errors() {
        let text = r#"
            [[scenario]]
            name = "size"
            n = 20
            p = 16
            datasets = 2
            seed = 9
            theta = "zero"
            sigma0 = 1.0
            alphas = [0.05]
            kn = [2]
            replicates = 20

            [[scenario.methods]]
            statistic = "t1"
            calibration = "wild"
            variance-mode = "fixed"

            [[scenario]]
            name = "power"
            n = 20
            p = 16
            datasets = 2
            seed = 10
            theta = "sin-cubed"
            r = 0.5
            alphas = [0.05]
            replicates = 20

            [[scenario.methods]]
            statistic = "t3s"
            calibration = "precursor"
        "#;
        let specs = load_scenarios(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].methods[0].variance_mode, VarianceMode::Fixed);
        assert_eq!(specs[0].methods[0].label(), "t1-wild-fixed");
        assert_eq!(specs[1].methods[0].label(), "t3s-precursor");
        assert!(specs[1].theta == ThetaSpec::SinCubed);

        let empty = load_scenarios("").unwrap_err();
        assert_eq!(empty.exit_code(), 2);

        let invalid = r#"
            [[scenario]]
            name = ""
            n = 1
            p = 16
            datasets = 0
            seed = 1
            theta = "zero"
            alphas = []
            methods = []
        "#;
        let err = load_scenarios(invalid).unwrap_err();
        match err {
            Error::Config { problems } => assert!(problems.len() >= 4, "{problems:?}"),
            other => panic!("unexpected error {other:?}"),
        }

        let typo = r#"
            [[scenario]]
            name = "x"
            sample-size = 20
        "#;
        assert!(load_scenarios(typo).is_err());
    }

    #[test]
    fn labels_identify_variance_mode_and_multiplier() {
        let mut m = MethodSpec {
            statistic: StatisticKind::T3s,
            calibration: CalibrationKind::Wild,
            multiplier: Multiplier::Rademacher,
            variance_mode: VarianceMode::Bootstrapped,
            label: None,
        };
        assert_eq!(m.label(), "t3s-wild-boot-rademacher");
        m.statistic = StatisticKind::T2;
        m.multiplier = Multiplier::Gaussian;
        assert_eq!(m.label(), "t2-wild");
        m.label = Some("custom".to_string());
        assert_eq!(m.label(), "custom");
    }
}
