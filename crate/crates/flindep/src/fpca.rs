//! Functional principal component analysis: eigenpairs of the centered
//! empirical covariance operator, cross-covariance projections, and the
//! truncated slope estimator built from them.
//!
//! The eigenproblem is solved through the n×n weighted Gram matrix of the
//! centered curves rather than the p×p discretized operator. The nonzero
//! spectra of the two problems coincide, and with n in the tens-to-hundreds
//! the Gram route is the smaller and better-conditioned one. A direct p×p
//! solve exists in the test suite as an independent cross-check.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{dot_weighted, Curve, FunctionalSample, Grid};

/// Relative eigenvalue cutoff used when callers have no reason to override it.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

/// Eigenpairs of the centered empirical covariance operator plus the
/// derived per-curve scores and cross-covariance projections.
#[derive(Debug, Clone)]
pub struct FpcaDecomposition {
    grid: Grid,
    n: usize,
    /// λ̂₁ ≥ … ≥ λ̂_m, truncated at the numerical rank m.
    eigenvalues: Vec<f64>,
    /// v̂ⱼ, orthonormal in the grid inner product.
    eigenfunctions: Vec<Curve>,
    /// Row-major n×m matrix of scores ⟨Xᵢ−X̄, v̂ⱼ⟩.
    scores: Vec<f64>,
    /// Δₙ(v̂ⱼ) = (1/n)Σᵢ⟨Xᵢ−X̄,v̂ⱼ⟩(Yᵢ−Ȳ).
    cross_projections: Vec<f64>,
    rank_tolerance: f64,
}

impl FpcaDecomposition {
    /// Numerical rank m: number of retained components.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunctions(&self) -> &[Curve] {
        &self.eigenfunctions
    }

    /// Scores of curve i on all retained components.
    pub fn scores(&self, i: usize) -> &[f64] {
        let m = self.eigenvalues.len();
        &self.scores[i * m..(i + 1) * m]
    }

    pub fn cross_projections(&self) -> &[f64] {
        &self.cross_projections
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Copy of the decomposition with component `j` negated (eigenfunction,
    /// score column, and cross-projection together).
    ///
    /// Eigenfunction signs are arbitrary up to the fixed convention, so every
    /// downstream statistic must be invariant under this flip; the copy exists
    /// to let tests and diagnostics assert exactly that.
    ///
    /// # Panics
    /// If `j` is out of range.
    pub fn with_flipped_component(&self, j: usize) -> FpcaDecomposition {
        assert!(j < self.rank(), "component {j} out of range");
        let mut flipped = self.clone();
        let values = flipped.eigenfunctions[j]
            .values()
            .iter()
            .map(|v| -v)
            .collect();
        flipped.eigenfunctions[j] = Curve::new(values).expect("negation keeps values finite");
        let m = flipped.eigenvalues.len();
        for i in 0..flipped.n {
            flipped.scores[i * m + j] = -flipped.scores[i * m + j];
        }
        flipped.cross_projections[j] = -flipped.cross_projections[j];
        flipped
    }

    pub(crate) fn check_sample(&self, sample: &FunctionalSample) -> Result<()> {
        if sample.n() != self.n {
            return Err(Error::DecompositionMismatch {
                reason: format!("sample has n={}, decomposition has n={}", sample.n(), self.n),
            });
        }
        if sample.grid() != &self.grid {
            return Err(Error::DecompositionMismatch {
                reason: "sample grid differs from decomposition grid".into(),
            });
        }
        Ok(())
    }
}

/// Eigenpairs of the centered covariance operator of `sample`.
///
/// Components are kept while λ̂ⱼ > rank_tolerance·λ̂₁; a degenerate sample
/// (all curves equal) yields rank 0 rather than an error. Eigenfunction signs
/// follow one convention: the component with the largest absolute value is
/// made positive.
///
/// # Errors
/// Configuration error if `rank_tolerance` is outside (0, 1).
pub fn decompose(sample: &FunctionalSample, rank_tolerance: f64) -> Result<FpcaDecomposition> {
    if !(rank_tolerance > 0.0 && rank_tolerance < 1.0) {
        return Err(Error::config(format!(
            "rank_tolerance must lie in (0, 1), got {rank_tolerance}"
        )));
    }
    let n = sample.n();
    let p = sample.p();
    let weights = sample.grid().weights();
    let centered = sample.center();

    // C[i][l] = (1/n) <X̃_i, X̃_l>; same nonzero spectrum as the covariance operator.
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let xi = centered.curve(i);
        for l in 0..=i {
            let v = dot_weighted(weights, xi, centered.curve(l)) / n as f64;
            gram[(i, l)] = v;
            gram[(l, i)] = v;
        }
    }

    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let lambda1 = eig.eigenvalues[order[0]].max(0.0);
    let cutoff = rank_tolerance * lambda1;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&j| eig.eigenvalues[j] > cutoff && eig.eigenvalues[j] > 0.0)
        .collect();
    let m = kept.len();

    let mut eigenvalues = Vec::with_capacity(m);
    let mut eigenfunctions = Vec::with_capacity(m);
    let mut scores = vec![0.0; n * m];
    for (j, &idx) in kept.iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        let u = eig.eigenvectors.column(idx);
        // v̂_j = (nλ)^{-1/2} Σ_i u_i X̃_i, unit norm in the grid inner product.
        let scale = 1.0 / (n as f64 * lambda).sqrt();
        let mut v = vec![0.0; p];
        for i in 0..n {
            let xi = centered.curve(i);
            let ui = u[i];
            for k in 0..p {
                v[k] += ui * xi[k];
            }
        }
        for vk in &mut v {
            *vk *= scale;
        }
        // Sign convention: largest-|value| component positive.
        let peak = (0..p)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
            .unwrap();
        let sign = if v[peak] < 0.0 { -1.0 } else { 1.0 };
        if sign < 0.0 {
            for vk in &mut v {
                *vk = -*vk;
            }
        }
        // Scores follow from the Gram eigenvector: <X̃_i, v̂_j> = sign·√(nλ)·u_i.
        let score_scale = sign * (n as f64 * lambda).sqrt();
        for i in 0..n {
            scores[i * m + j] = score_scale * u[i];
        }
        eigenvalues.push(lambda);
        eigenfunctions.push(Curve::new(v).expect("eigenfunction values are finite"));
    }

    let mut dec = FpcaDecomposition {
        grid: sample.grid().clone(),
        n,
        eigenvalues,
        eigenfunctions,
        scores,
        cross_projections: Vec::new(),
        rank_tolerance,
    };
    dec.cross_projections = projections_from_scores(&dec, sample.responses());
    Ok(dec)
}

/// Cross-covariance projections Δₙ(v̂ⱼ) of `sample` onto the components of `dec`.
///
/// # Errors
/// Mismatch error if `dec` was not built from a sample of the same shape.
pub fn cross_projections(
    sample: &FunctionalSample,
    dec: &FpcaDecomposition,
) -> Result<Vec<f64>> {
    dec.check_sample(sample)?;
    Ok(projections_from_scores(dec, sample.responses()))
}

/// Δₙ projections recomputed for substitute responses (bootstrap resamples).
///
/// # Errors
/// Length mismatch if `responses` is not one value per curve.
pub fn cross_projections_for_responses(
    dec: &FpcaDecomposition,
    responses: &[f64],
) -> Result<Vec<f64>> {
    if responses.len() != dec.n {
        return Err(Error::LengthMismatch {
            what: "responses vs decomposition",
            expected: dec.n,
            found: responses.len(),
        });
    }
    Ok(projections_from_scores(dec, responses))
}

fn projections_from_scores(dec: &FpcaDecomposition, responses: &[f64]) -> Vec<f64> {
    let n = dec.n;
    let m = dec.eigenvalues.len();
    let y_bar = responses.iter().sum::<f64>() / n as f64;
    let mut proj = vec![0.0; m];
    for i in 0..n {
        let y = responses[i] - y_bar;
        let row = dec.scores(i);
        for j in 0..m {
            proj[j] += row[j] * y;
        }
    }
    for v in &mut proj {
        *v /= n as f64;
    }
    proj
}

/// Truncated FPCA slope estimate Θ̂ = Σⱼ≤kn Δₙ(v̂ⱼ)/λ̂ⱼ · v̂ⱼ.
#[derive(Debug, Clone)]
pub struct ThetaEstimate {
    pub curve: Curve,
    pub kn: usize,
}

/// Validate a component count against the available rank.
pub(crate) fn validate_kn(kn: usize, available: usize) -> Result<()> {
    if kn == 0 {
        return Err(Error::config("kn must be a positive integer"));
    }
    if kn > available {
        return Err(Error::RankExceeded {
            requested: kn,
            available,
        });
    }
    Ok(())
}

/// Slope estimate on the first `kn` components of `dec`.
///
/// # Errors
/// Rank error if `kn` exceeds the numerical rank (the error names the
/// available count); configuration error if `kn` is zero.
pub fn estimate_theta(dec: &FpcaDecomposition, kn: usize) -> Result<ThetaEstimate> {
    validate_kn(kn, dec.rank())?;
    let p = dec.grid.len();
    let mut values = vec![0.0; p];
    for j in 0..kn {
        let coeff = dec.cross_projections[j] / dec.eigenvalues[j];
        let v = dec.eigenfunctions[j].values();
        for k in 0..p {
            values[k] += coeff * v[k];
        }
    }
    Ok(ThetaEstimate {
        curve: Curve::new(values).expect("estimate values are finite"),
        kn,
    })
}
