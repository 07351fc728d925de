//! Tests for lack of linear dependence between a functional covariate X and a
//! scalar response Y under the model Y = ⟨Θ,X⟩ + b + ε.
//!
//! The null hypothesis is that the slope Θ contributes nothing, i.e. the
//! cross-covariance between X and Y vanishes. Four statistics are provided:
//!
//! * `T1`: normalized chi-square-like statistic on the first kₙ functional
//!   principal components, asymptotically N(0,2) under the null;
//! * `T2`: squared norm of the FPCA slope estimate on kₙ components;
//! * `T3`: norm of the empirical cross-covariance curve;
//! * `T3s`: the studentized version of `T3`.
//!
//! Calibration is by the N(0,2) limit (T1 only), a naive paired bootstrap, a
//! wild multiplier bootstrap, or a Monte Carlo precursor of the bootstrap.
//! The [`simgen`] module generates Brownian-motion datasets and tabulates
//! empirical size and power over a grid of levels and component counts; the
//! [`cli`] module wraps everything in a small command-line tool.
//!
//! All randomized routines are deterministic given a seed, independent of
//! thread count; see [`rng`].

pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod fpca;
pub mod hilbert;
pub mod rng;
pub mod simgen;
pub mod stats;

pub use error::{Error, Result};
pub use hilbert::{Curve, FunctionalSample, Grid};
