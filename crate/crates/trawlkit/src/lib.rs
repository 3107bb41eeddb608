//! # trawlkit
//!
//! Simulation of trawl processes, kernel-weighted and volatility-modulated
//! trawl processes, and ambit fields driven by homogeneous Levy bases.
//!
//! | Module          | Contents                                                              |
//! |-----------------|-----------------------------------------------------------------------|
//! | [`levy`]        | Levy seeds, cumulants, set-law samplers, Levy-Ito split, jump measures |
//! | [`trawl`]       | Trawl functions, areas, autocorrelation, slice plans                  |
//! | [`grid`]        | Sliding-window grid discretization simulator and its MSE predictor    |
//! | [`cpp`]         | Compound Poisson simulation of the jump part, truncation error        |
//! | [`convolution`] | Matrix convolution: definition oracle and the fast antidiagonal path  |
//! | [`slice`]       | Exact slice-partition simulation, Cholesky Gaussian cross-check       |
//! | [`kernel`]      | Kernel-weighted and volatility-modulated simulation                   |
//! | [`ambit`]       | Minimal-slice estimation and simple/general ambit field simulation    |
//! | [`invert`]      | CDF/quantile evaluation from transforms, envelope rejection sampling  |
//! | [`stats`]       | Empirical ACF, moment tests, GMM recovery, convergence experiments    |
//!
//! Numeric kernels are generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the CLI and
//! the statistics harness use.

pub mod ambit;
pub mod convolution;
pub mod cpp;
pub mod error;
pub mod grid;
pub mod invert;
pub mod kernel;
pub mod levy;
pub mod quad;
pub mod real;
pub mod rng;
pub mod slice;
pub mod stats;
pub mod trawl;

pub use error::{Error, Result};
pub use real::Real;
pub use rng::RngStream;

/// `f64` aliases for the generic core types.
pub type LevySeed64 = levy::LevySeed<f64>;
pub type LevyMeasure64 = levy::LevyMeasureSpec<f64>;
pub type TrawlFunction64 = trawl::TrawlFunction<f64>;
pub type SlicePlan64 = trawl::SlicePlan<f64>;
pub type GridConfig64 = grid::GridConfig<f64>;
pub type Kernel64 = kernel::Kernel<f64>;
pub type VolatilityPath64 = kernel::VolatilityPath<f64>;
pub type MinimalSliceTable64 = ambit::MinimalSliceTable<f64>;
