//! Mesh-free solver for linear PDEs built on a physics-informed extreme
//! learning machine with general Fourier features.
//!
//! The hidden layer is a bank of frozen cosine features, one frequency
//! coefficient per neuron drawn from a linearly spaced interval; output
//! weights come from a single truncated-SVD least-squares solve over
//! collocation points. The crate provides:
//!
//! - [`feature`]: the random feature layer and its analytic derivatives;
//! - [`pde`] / [`domain`]: linear operators, conditions, problem and domain
//!   descriptions, plus a finite-difference oracle;
//! - [`sampling`]: reproducible collocation point generation;
//! - [`assembly`]: dense system assembly including inverse-parameter
//!   augmentation;
//! - [`lstsq`]: the truncated-SVD minimum-norm solve;
//! - [`diagnostics`]: error metrics, the output-weight spectrum and the
//!   frequency-interval refinement loop, and the tanh baseline sweep;
//! - [`cases`]: the built-in benchmark registry;
//! - [`runner`]: end-to-end pipelines and CSV reports behind the CLI.

pub mod assembly;
pub mod cases;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod feature;
pub mod lstsq;
pub mod pde;
pub mod runner;
pub mod sampling;

pub use error::{Error, Result};
