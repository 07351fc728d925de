//! Functional principal components from the n-by-n Gram matrix.
//!
//! Decomposes a sample of Brownian paths and compares the leading empirical
//! eigenvalues with the known spectrum of the Brownian covariance kernel
//! min(s, t): eigenvalues 1/((j - 1/2) pi)^2. Also checks orthonormality and
//! the trace identity numerically.
//!
//! Run with: cargo run --example fpca_decomposition

use flindep::fpca::{decompose, DEFAULT_RANK_TOLERANCE};
use flindep::hilbert::{inner_product, FunctionalSample, Grid};
use flindep::rng::substream;
use flindep::simgen::brownian_path;
use flindep::Result;

fn main() -> Result<()> {
    let n = 400;
    let p = 100;
    let grid = Grid::uniform(0.0, 1.0, p)?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(brownian_path(&grid, &mut substream(42, i as u64)).into_values());
    }
    let responses = vec![0.0; n];
    let sample = FunctionalSample::from_rows(grid.clone(), rows, responses)?;

    let dec = decompose(&sample, DEFAULT_RANK_TOLERANCE)?;
    println!("decomposed {} curves, numerical rank {}", n, dec.rank());

    println!("\n  j   eigenvalue   1/((j-1/2) pi)^2");
    for j in 0..6 {
        let theory = 1.0 / ((j as f64 + 0.5) * std::f64::consts::PI).powi(2);
        println!("  {}   {:.6}     {:.6}", j + 1, dec.eigenvalues()[j], theory);
    }

    // Eigenfunctions are orthonormal in the quadrature inner product.
    let mut max_dev: f64 = 0.0;
    for j in 0..5 {
        for k in 0..=j {
            let ip = inner_product(&dec.eigenfunctions()[j], &dec.eigenfunctions()[k], &grid)?;
            let want = if j == k { 1.0 } else { 0.0 };
            max_dev = max_dev.max((ip - want).abs());
        }
    }
    println!("\nmax orthonormality deviation over the first 5 components: {max_dev:.2e}");

    // Trace identity: the eigenvalues sum to the average squared norm of the
    // centered curves.
    let centered = sample.center();
    let mut avg_sq = 0.0;
    for i in 0..n {
        let c = flindep::hilbert::Curve::new(centered.curve(i).to_vec())?;
        avg_sq += inner_product(&c, &c, &grid)? / n as f64;
    }
    let trace: f64 = dec.eigenvalues().iter().sum();
    println!("sum of eigenvalues = {trace:.8}");
    println!("mean ||X - mean||^2 = {avg_sq:.8}");

    // Scores reproduce each curve's coordinates: their per-component variance
    // equals the eigenvalue.
    let var0 = (0..n).map(|i| dec.scores(i)[0].powi(2)).sum::<f64>() / n as f64;
    println!("variance of first scores = {var0:.6} vs eigenvalue {:.6}", dec.eigenvalues()[0]);
    Ok(())
}
