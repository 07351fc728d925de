//! The four observed test statistics and the variance estimator they share.
//!
//! `T3` measures the empirical cross-covariance curve directly; `T3s` is its
//! studentized version. `T1` and `T2` work on the first kₙ functional
//! principal components and need an [`FpcaDecomposition`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpca::{estimate_theta, validate_kn, FpcaDecomposition};
use crate::hilbert::{norm_slice, Curve, FunctionalSample};

/// Which of the four statistics a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    T1,
    T2,
    T3,
    T3s,
}

impl StatisticKind {
    /// Statistics that operate on FPCA components and therefore take kₙ.
    pub fn needs_kn(self) -> bool {
        matches!(self, StatisticKind::T1 | StatisticKind::T2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StatisticKind::T1 => "t1",
            StatisticKind::T2 => "t2",
            StatisticKind::T3 => "t3",
            StatisticKind::T3s => "t3s",
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(StatisticKind::T1),
            "t2" => Ok(StatisticKind::T2),
            "t3" => Ok(StatisticKind::T3),
            "t3s" => Ok(StatisticKind::T3s),
            other => Err(Error::config(format!(
                "unknown statistic {other:?} (expected t1, t2, t3, or t3s)"
            ))),
        }
    }
}

/// One observed statistic value with the context it was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub kind: StatisticKind,
    pub value: f64,
    /// Component count; present iff the kind needs one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kn: Option<usize>,
    /// σ̂ recorded when the statistic used it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_hat: Option<f64>,
}

/// Empirical cross-covariance curve Tₙ = (1/n)Σᵢ(Xᵢ−X̄)(Yᵢ−Ȳ).
pub fn t_cross(sample: &FunctionalSample) -> Curve {
    let n = sample.n();
    let p = sample.p();
    let mean = sample.mean_curve();
    let mean = mean.values();
    let y_bar = sample.mean_response();
    let mut acc = vec![0.0; p];
    for i in 0..n {
        let y = sample.responses()[i] - y_bar;
        let row = sample.curve(i);
        for k in 0..p {
            acc[k] += (row[k] - mean[k]) * y;
        }
    }
    for v in &mut acc {
        *v /= n as f64;
    }
    Curve::new(acc).expect("cross-covariance values are finite")
}

/// Divide-by-n response variance σ̂² = (1/n)Σ(Yᵢ−Ȳ)².
pub fn sigma_hat_sq(responses: &[f64]) -> f64 {
    assert!(!responses.is_empty(), "responses must be non-empty");
    let n = responses.len() as f64;
    let mean = responses.iter().sum::<f64>() / n;
    responses.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n
}

/// Divide-by-n residual variance of the kₙ-component regression fit:
/// σ̂²_kₙ = (1/n)·Σᵢ(Yᵢ − Ȳ − Σⱼ≤kₙ β̂ⱼ⟨Xᵢ−X̄,v̂ⱼ⟩)² with β̂ⱼ = Δₙ(v̂ⱼ)/λ̂ⱼ.
///
/// An alternative plug-in for [`t1`]'s `sigma_sq`. Unlike [`sigma_hat_sq`]
/// it stays consistent when the response does depend on the curve, at the
/// price of a fatter right tail under the null in small samples.
///
/// # Errors
/// Rank error if `kn` exceeds the decomposition's rank; mismatch error if
/// `dec` was not built from `sample`.
pub fn residual_variance(
    sample: &FunctionalSample,
    dec: &FpcaDecomposition,
    kn: usize,
) -> Result<f64> {
    dec.check_sample(sample)?;
    validate_kn(kn, dec.rank())?;
    let n = sample.n();
    let y_bar = sample.mean_response();
    let betas: Vec<f64> = (0..kn)
        .map(|j| dec.cross_projections()[j] / dec.eigenvalues()[j])
        .collect();
    let rss: f64 = (0..n)
        .map(|i| {
            let fitted: f64 = betas
                .iter()
                .zip(dec.scores(i))
                .map(|(b, s)| b * s)
                .sum();
            (sample.responses()[i] - y_bar - fitted).powi(2)
        })
        .sum();
    Ok(rss / n as f64)
}

/// T3 = ‖Tₙ‖, the norm of the cross-covariance curve.
pub fn t3(sample: &FunctionalSample) -> StatisticValue {
    let curve = t_cross(sample);
    let value = norm_slice(sample.grid().weights(), curve.values());
    StatisticValue {
        kind: StatisticKind::T3,
        value,
        kn: None,
        sigma_hat: None,
    }
}

/// T3s = T3 / σ̂, the studentized cross-covariance norm.
///
/// # Errors
/// Degenerate-variance error when the responses are constant.
pub fn t3s(sample: &FunctionalSample) -> Result<StatisticValue> {
    let sigma_sq = sigma_hat_sq(sample.responses());
    if sigma_sq <= 0.0 {
        return Err(Error::DegenerateVariance {
            what: "response variance",
        });
    }
    let base = t3(sample);
    let sigma = sigma_sq.sqrt();
    Ok(StatisticValue {
        kind: StatisticKind::T3s,
        value: base.value / sigma,
        kn: None,
        sigma_hat: Some(sigma),
    })
}

/// T1 = kₙ^{−1/2}·((n/σ̂²)·Σⱼ≤kₙ Δₙ(v̂ⱼ)²/λ̂ⱼ − kₙ), asymptotically N(0,2)
/// under the null.
///
/// `sigma_sq` is the variance estimate to studentize with; pass
/// [`sigma_hat_sq`] of the responses for the default choice.
///
/// # Errors
/// Rank error if `kn` exceeds the decomposition's rank; degenerate-variance
/// error if `sigma_sq` is not positive; mismatch error if `dec` was not built
/// from `sample`.
pub fn t1(
    sample: &FunctionalSample,
    dec: &FpcaDecomposition,
    kn: usize,
    sigma_sq: f64,
) -> Result<StatisticValue> {
    dec.check_sample(sample)?;
    validate_kn(kn, dec.rank())?;
    if sigma_sq <= 0.0 {
        return Err(Error::DegenerateVariance {
            what: "sigma_sq for t1",
        });
    }
    let n = sample.n() as f64;
    let projected: f64 = (0..kn)
        .map(|j| dec.cross_projections()[j].powi(2) / dec.eigenvalues()[j])
        .sum();
    let kn_f = kn as f64;
    let value = (n / sigma_sq * projected - kn_f) / kn_f.sqrt();
    Ok(StatisticValue {
        kind: StatisticKind::T1,
        value,
        kn: Some(kn),
        sigma_hat: Some(sigma_sq.sqrt()),
    })
}

/// T2 = Σⱼ≤kₙ (Δₙ(v̂ⱼ)/λ̂ⱼ)², the squared norm of the kₙ-component slope
/// estimate.
///
/// # Errors
/// Rank error if `kn` exceeds the decomposition's rank.
pub fn t2(dec: &FpcaDecomposition, kn: usize) -> Result<StatisticValue> {
    validate_kn(kn, dec.rank())?;
    let value: f64 = (0..kn)
        .map(|j| (dec.cross_projections()[j] / dec.eigenvalues()[j]).powi(2))
        .sum();
    Ok(StatisticValue {
        kind: StatisticKind::T2,
        value,
        kn: Some(kn),
        sigma_hat: None,
    })
}

/// Check that T2 equals ‖Θ̂_kn‖² (Parseval identity over the retained basis).
///
/// Exposed for tests and diagnostics.
pub fn t2_matches_theta_norm(dec: &FpcaDecomposition, kn: usize) -> Result<f64> {
    let est = estimate_theta(dec, kn)?;
    Ok(norm_slice(dec.grid().weights(), est.curve.values()).powi(2))
}
