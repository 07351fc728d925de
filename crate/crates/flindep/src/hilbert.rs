//! Discretized Hilbert-space numerics: grids, curves, inner products, norms,
//! and sample centering.
//!
//! Curves live on a common [`Grid`] over a compact interval; the inner product
//! is the quadrature sum Σₖ wₖ f(tₖ) g(tₖ). Everything here is a pure value:
//! operations return new data and never mutate their inputs, so samples and
//! curves can be shared freely across worker threads.

use crate::error::{Error, Result};

/// Shared discretization of the domain: strictly increasing points plus
/// nonnegative quadrature weights that sum to the domain length.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Grid with trapezoid-rule weights (the default rule everywhere).
    ///
    /// Exact for piecewise-linear integrands; accepts non-uniform spacing.
    pub fn trapezoid(points: Vec<f64>) -> Result<Self> {
        Self::check_points(&points)?;
        let p = points.len();
        let mut weights = vec![0.0; p];
        weights[0] = (points[1] - points[0]) / 2.0;
        weights[p - 1] = (points[p - 1] - points[p - 2]) / 2.0;
        for k in 1..p - 1 {
            weights[k] = (points[k + 1] - points[k - 1]) / 2.0;
        }
        Ok(Grid { points, weights })
    }

    /// Grid with left-endpoint Riemann weights: wₖ = tₖ₊₁ − tₖ and a zero
    /// final weight, so the weights still sum to the domain length.
    ///
    /// Offered for bit-compatibility experiments; trapezoid is the default.
    pub fn left_riemann(points: Vec<f64>) -> Result<Self> {
        Self::check_points(&points)?;
        let p = points.len();
        let mut weights = vec![0.0; p];
        for k in 0..p - 1 {
            weights[k] = points[k + 1] - points[k];
        }
        Ok(Grid { points, weights })
    }

    /// Grid with caller-supplied weights, validated against the invariants.
    pub fn with_weights(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::check_points(&points)?;
        if weights.len() != points.len() {
            return Err(Error::LengthMismatch {
                what: "quadrature weights",
                expected: points.len(),
                found: weights.len(),
            });
        }
        if let Some(k) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights {
                reason: format!("weight at index {k} is negative or non-finite"),
            });
        }
        let total: f64 = weights.iter().sum();
        let length = points[points.len() - 1] - points[0];
        if (total - length).abs() > 1e-12 * length.max(1.0) {
            return Err(Error::InvalidWeights {
                reason: format!("weights sum to {total}, domain length is {length}"),
            });
        }
        Ok(Grid { points, weights })
    }

    /// Uniform grid of `p` points on [a, b] with trapezoid weights.
    pub fn uniform(a: f64, b: f64, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::GridTooSmall { found: p });
        }
        let step = (b - a) / (p - 1) as f64;
        let points = (0..p).map(|k| a + step * k as f64).collect();
        Self::trapezoid(points)
    }

    fn check_points(points: &[f64]) -> Result<()> {
        if points.len() < 2 {
            return Err(Error::GridTooSmall {
                found: points.len(),
            });
        }
        if let Some(k) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite {
                what: "grid points",
                index: k,
            });
        }
        for k in 1..points.len() {
            if points[k] <= points[k - 1] {
                return Err(Error::NonIncreasingGrid { index: k });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain_length(&self) -> f64 {
        self.points[self.points.len() - 1] - self.points[0]
    }
}

/// One function sampled at the points of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    /// Curve from raw values; rejects NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "curve values",
                index: k,
            });
        }
        Ok(Curve { values })
    }

    /// Curve obtained by evaluating `f` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.points().iter().map(|&t| f(t)).collect())
    }

    pub fn zero(p: usize) -> Self {
        Curve {
            values: vec![0.0; p],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Quadrature inner product ⟨f,g⟩ = Σₖ wₖ f(tₖ) g(tₖ).
///
/// # Errors
/// Alignment error if either curve length differs from the grid's.
pub fn inner_product(f: &Curve, g: &Curve, grid: &Grid) -> Result<f64> {
    check_aligned(f, grid)?;
    check_aligned(g, grid)?;
    Ok(dot_weighted(grid.weights(), f.values(), g.values()))
}

/// Quadrature norm ‖f‖ = sqrt(⟨f,f⟩).
pub fn norm(f: &Curve, grid: &Grid) -> Result<f64> {
    check_aligned(f, grid)?;
    Ok(norm_slice(grid.weights(), f.values()))
}

fn check_aligned(f: &Curve, grid: &Grid) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "curve vs grid",
            expected: grid.len(),
            found: f.len(),
        });
    }
    Ok(())
}

/// Unchecked Σₖ wₖ fₖ gₖ over slices; hot-loop workhorse behind the public ops.
pub(crate) fn dot_weighted(weights: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..weights.len() {
        acc += weights[k] * f[k] * g[k];
    }
    acc
}

/// Unchecked weighted norm; every summand wₖfₖ² is nonnegative, so no clamping.
pub(crate) fn norm_slice(weights: &[f64], f: &[f64]) -> f64 {
    dot_weighted(weights, f, f).sqrt()
}

/// n discretized curves on a common grid plus the n scalar responses.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    /// Row-major n×p storage; row i is curve Xᵢ.
    values: Vec<f64>,
    n: usize,
    responses: Vec<f64>,
}

impl FunctionalSample {
    /// Sample from individual curve rows.
    pub fn from_rows(grid: Grid, rows: Vec<Vec<f64>>, responses: Vec<f64>) -> Result<Self> {
        let p = grid.len();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidSample {
                    reason: format!("curve {i} has {} values, grid has {p} points", row.len()),
                });
            }
            values.extend_from_slice(&row);
        }
        Self::from_flat(grid, values, n, responses)
    }

    /// Sample from row-major n×p storage.
    pub fn from_flat(grid: Grid, values: Vec<f64>, n: usize, responses: Vec<f64>) -> Result<Self> {
        let p = grid.len();
        if n < 2 {
            return Err(Error::InvalidSample {
                reason: format!("need at least 2 observations, got {n}"),
            });
        }
        if values.len() != n * p {
            return Err(Error::InvalidSample {
                reason: format!("curve matrix has {} values, expected {n}x{p}", values.len()),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "curve matrix",
                index: k,
            });
        }
        if responses.len() != n {
            return Err(Error::LengthMismatch {
                what: "responses",
                expected: n,
                found: responses.len(),
            });
        }
        if let Some(k) = responses.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "responses",
                index: k,
            });
        }
        Ok(FunctionalSample {
            grid,
            values,
            n,
            responses,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Curve i as a slice of length p.
    pub fn curve(&self, i: usize) -> &[f64] {
        let p = self.grid.len();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Pointwise mean curve X̄.
    pub fn mean_curve(&self) -> Curve {
        let p = self.grid.len();
        let mut mean = vec![0.0; p];
        for i in 0..self.n {
            let row = self.curve(i);
            for k in 0..p {
                mean[k] += row[k];
            }
        }
        for v in &mut mean {
            *v /= self.n as f64;
        }
        Curve { values: mean }
    }

    pub fn mean_response(&self) -> f64 {
        self.responses.iter().sum::<f64>() / self.n as f64
    }

    /// New sample with Xᵢ−X̄ and Yᵢ−Ȳ.
    pub fn center(&self) -> FunctionalSample {
        let p = self.grid.len();
        let mean = self.mean_curve();
        let mean = mean.values();
        let y_bar = self.mean_response();
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n {
            let row = self.curve(i);
            for k in 0..p {
                values.push(row[k] - mean[k]);
            }
        }
        let responses = self.responses.iter().map(|y| y - y_bar).collect();
        FunctionalSample {
            grid: self.grid.clone(),
            values,
            n: self.n,
            responses,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Fixed before the build by a p=1e5 trapezoid quadrature oracle for
    // the norm of sin(2*pi*t^3)^3 on [0,1].
    const SIN_CUBED_NORM: f64 = 0.4466029353324201;

    fn unit_grid(p: usize) -> Grid {
        Grid::uniform(0.0, 1.0, p).unwrap()
    }

    #[test]
    fn trapezoid_weights_sum_to_domain_length() {
        let grid = Grid::trapezoid(vec![0.0, 0.3, 0.35, 1.2]).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert_abs_diff_eq!(total, 1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(grid.domain_length(), 1.2, epsilon = 0.0);
    }

    #[test]
    fn riemann_weights_sum_to_domain_length() {
        let grid = Grid::left_riemann(vec![0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(grid.weights(), &[0.25, 0.25, 0.25, 0.25, 0.0]);
    }

    #[test]
    fn grid_rejects_non_increasing_points() {
        let err = Grid::trapezoid(vec![0.0, 1.0, 0.5]).unwrap_err();
        assert!(matches!(err, Error::NonIncreasingGrid { index: 2 }));
        assert!(Grid::trapezoid(vec![0.0, 0.0, 1.0]).is_err());
        assert!(matches!(
            Grid::trapezoid(vec![0.0]).unwrap_err(),
            Error::GridTooSmall { found: 1 }
        ));
    }

    #[test]
    fn custom_weights_validated() {
        let pts = vec![0.0, 0.5, 1.0];
        assert!(Grid::with_weights(pts.clone(), vec![0.25, 0.5, 0.25]).is_ok());
        assert!(Grid::with_weights(pts.clone(), vec![0.5, -0.25, 0.75]).is_err());
        assert!(Grid::with_weights(pts.clone(), vec![0.5, 0.5, 0.5]).is_err());
        assert!(Grid::with_weights(pts, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn curve_rejects_non_finite_values() {
        assert!(Curve::new(vec![0.0, f64::NAN]).is_err());
        assert!(Curve::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn inner_product_of_zero_curves_is_zero() {
        let grid = unit_grid(17);
        let z = Curve::zero(17);
        assert_eq!(inner_product(&z, &z, &grid).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_of_constant_one_is_one() {
        let grid = unit_grid(101);
        let one = Curve::from_fn(&grid, |_| 1.0).unwrap();
        assert_abs_diff_eq!(inner_product(&one, &one, &grid).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_product_of_t_with_t_matches_closed_form() {
        // Oracle: int_0^1 t^2 dt = 1/3.
        let grid = unit_grid(101);
        let t = Curve::from_fn(&grid, |t| t).unwrap();
        let val = inner_product(&t, &t, &grid).unwrap();
        assert!((val - 1.0 / 3.0).abs() < 1e-4, "got {val}");
    }

    #[test]
    fn norm_of_sin_cubed_matches_frozen_oracle() {
        let grid = unit_grid(100);
        let f = Curve::from_fn(&grid, |t| (2.0 * std::f64::consts::PI * t.powi(3)).sin().powi(3))
            .unwrap();
        let val = norm(&f, &grid).unwrap();
        assert!((val - SIN_CUBED_NORM).abs() < 1e-8, "got {val}");
    }

    #[test]
    fn misaligned_curve_is_rejected() {
        let grid = unit_grid(5);
        let f = Curve::zero(4);
        let g = Curve::zero(5);
        assert!(matches!(
            inner_product(&f, &g, &grid).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
        assert!(norm(&f, &grid).is_err());
    }

    #[test]
    fn sample_construction_validates_shapes() {
        let grid = unit_grid(3);
        let rows = vec![vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]];
        let sample = FunctionalSample::from_rows(grid.clone(), rows, vec![1.0, 2.0]).unwrap();
        assert_eq!(sample.n(), 2);
        assert_eq!(sample.p(), 3);
        assert_eq!(sample.curve(1), &[1.0, 1.0, 1.0]);

        let one_row = vec![vec![0.0, 1.0, 2.0]];
        assert!(FunctionalSample::from_rows(grid.clone(), one_row, vec![1.0]).is_err());
        let ragged = vec![vec![0.0, 1.0], vec![1.0, 1.0, 1.0]];
        assert!(FunctionalSample::from_rows(grid.clone(), ragged, vec![1.0, 2.0]).is_err());
        let rows = vec![vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]];
        assert!(FunctionalSample::from_rows(grid, rows, vec![1.0]).is_err());
    }

    #[test]
    fn centering_subtracts_means() {
        let grid = unit_grid(2);
        let rows = vec![vec![1.0, 0.0], vec![1.0, 2.0], vec![1.0, 4.0]];
        let sample = FunctionalSample::from_rows(grid, rows, vec![1.0, 2.0, 3.0]).unwrap();
        let centered = sample.center();
        assert_eq!(centered.responses(), &[-1.0, 0.0, 1.0]);
        assert_eq!(centered.curve(0), &[0.0, -2.0]);
        assert_eq!(centered.curve(2), &[0.0, 2.0]);
        assert_abs_diff_eq!(centered.mean_response(), 0.0, epsilon = 1e-12);
        for v in centered.mean_curve().values() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn centering_identical_curves_gives_zero_curves() {
        let grid = unit_grid(3);
        let rows = vec![vec![2.0, 3.0, 4.0]; 4];
        let sample = FunctionalSample::from_rows(grid, rows, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let centered = sample.center();
        for i in 0..4 {
            assert!(centered.curve(i).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn centering_is_idempotent() {
        let grid = unit_grid(4);
        let rows = vec![
            vec![0.1, -0.4, 2.0, 1.0],
            vec![1.3, 0.0, -1.0, 0.5],
            vec![-2.0, 4.0, 0.25, 0.125],
        ];
        let sample = FunctionalSample::from_rows(grid, rows, vec![5.0, -1.0, 2.5]).unwrap();
        let once = sample.center();
        let twice = once.center();
        for i in 0..3 {
            for (a, b) in once.curve(i).iter().zip(twice.curve(i)) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
            }
        }
        for (a, b) in once.responses().iter().zip(twice.responses()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    fn small_curve() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-100.0f64..100.0, 8)
    }

    proptest! {
        #[test]
        fn inner_product_is_bilinear_and_symmetric(
            f in small_curve(), g in small_curve(), h in small_curve(), a in -10.0f64..10.0
        ) {
            let grid = unit_grid(8);
            let fa: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + y).collect();
            let fa = Curve::new(fa).unwrap();
            let (f, g, h) = (Curve::new(f).unwrap(), Curve::new(g).unwrap(), Curve::new(h).unwrap());
            let lhs = inner_product(&fa, &h, &grid).unwrap();
            let rhs = a * inner_product(&f, &h, &grid).unwrap() + inner_product(&g, &h, &grid).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
            let fg = inner_product(&f, &g, &grid).unwrap();
            let gf = inner_product(&g, &f, &grid).unwrap();
            prop_assert!((fg - gf).abs() <= 1e-12 * fg.abs().max(1.0));
        }

        #[test]
        fn cauchy_schwarz_holds(f in small_curve(), g in small_curve()) {
            let grid = unit_grid(8);
            let (f, g) = (Curve::new(f).unwrap(), Curve::new(g).unwrap());
            let fg = inner_product(&f, &g, &grid).unwrap().abs();
            let bound = norm(&f, &grid).unwrap() * norm(&g, &grid).unwrap();
            prop_assert!(fg <= bound + 1e-12 + 1e-12 * bound);
        }

        #[test]
        fn trapezoid_integrates_affine_functions_exactly(
            a in -10.0f64..10.0, b in -10.0f64..10.0
        ) {
            // int_0^1 (a t + b) dt = a/2 + b, exact for the trapezoid rule.
            let grid = unit_grid(23);
            let f = Curve::from_fn(&grid, |t| a * t + b).unwrap();
            let one = Curve::from_fn(&grid, |_| 1.0).unwrap();
            let integral = inner_product(&f, &one, &grid).unwrap();
            let exact = a / 2.0 + b;
            prop_assert!((integral - exact).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }
}
