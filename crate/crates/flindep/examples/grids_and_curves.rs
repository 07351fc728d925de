//! Grids, curves, and quadrature: the building blocks everything else uses.
//!
//! Shows the three weight constructions (trapezoid, left-Riemann, explicit),
//! inner products and norms against closed forms, and what the validation
//! rejects.
//!
//! Run with: cargo run --example grids_and_curves

use flindep::hilbert::{inner_product, norm, Curve, Grid};
use flindep::Result;

fn main() -> Result<()> {
    // A uniform grid on [0, 1] carries trapezoid weights by default.
    let grid = Grid::uniform(0.0, 1.0, 101)?;
    println!(
        "uniform grid: {} points on [{}, {}], weights sum to {}",
        grid.len(),
        grid.points()[0],
        grid.points()[grid.len() - 1],
        grid.weights().iter().sum::<f64>()
    );

    // Quadrature against closed forms.
    let t2 = Curve::from_fn(&grid, |t| t * t)?;
    let one = Curve::from_fn(&grid, |_| 1.0)?;
    println!("integral of t^2 over [0,1]  = {:.6} (exactly 1/3 in the limit)", inner_product(&t2, &one, &grid)?);
    println!("norm of the constant 1      = {:.6}", norm(&one, &grid)?);

    let sine = Curve::from_fn(&grid, |t| (2.0 * std::f64::consts::PI * t).sin())?;
    println!("norm of sin(2 pi t)         = {:.6} (1/sqrt(2) = {:.6})", norm(&sine, &grid)?, 0.5f64.sqrt());

    // Non-uniform grids work the same way; weights follow the spacing.
    let grid = Grid::trapezoid(vec![0.0, 0.1, 0.3, 0.6, 1.0])?;
    println!("\nnon-uniform trapezoid weights: {:?}", grid.weights());
    let grid = Grid::left_riemann(vec![0.0, 0.1, 0.3, 0.6, 1.0])?;
    println!("non-uniform left-Riemann weights: {:?}", grid.weights());

    // Validation: decreasing points and negative weights are rejected.
    println!("\ndecreasing points  -> {}", Grid::trapezoid(vec![0.0, 1.0, 0.5]).unwrap_err());
    println!("negative weights   -> {}", Grid::with_weights(vec![0.0, 1.0], vec![2.0, -1.0]).unwrap_err());
    println!("mismatched lengths -> {}", {
        let g = Grid::uniform(0.0, 1.0, 4)?;
        let f = Curve::new(vec![1.0, 2.0])?;
        inner_product(&f, &f, &g).unwrap_err()
    });
    Ok(())
}
