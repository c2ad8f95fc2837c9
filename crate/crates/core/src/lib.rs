//! Enumeration of the integral points of the modular curve attached to
//! the normalizer of a non-split Cartan subgroup of GL2(F_p).
//!
//! The crate is organized along the pipeline:
//!
//! - [`precision`]: arbitrary-precision reals and complexes carrying
//!   rigorous absolute error bounds, continued fractions, root finding;
//! - [`geometry`]: the finite geometry mod p (orbits, cusp matrices,
//!   canonical lifts);
//! - [`cyclo`]: exact arithmetic in Q(zeta_p), circular units, heights;
//! - [`siegel`]: Siegel-function q-products, their expansions with
//!   explicit error constants, and the orbit units;
//! - [`relation`]: the unit-logarithm matrix and the per-cusp exponent
//!   formulas;
//! - [`bounds`]: the explicit Baker-type bound and its Baker-Davenport
//!   reduction;
//! - [`jinv`]: the j q-series with exact coefficients and a rigorous
//!   tail bound;
//! - [`enumeration`]: the quick and slow enumeration phases and the
//!   candidate classification;
//! - [`pipeline`]: orchestration, checkpointing and the JSON report.

pub mod bounds;
pub mod cyclo;
pub mod enumeration;
pub mod error;
pub mod geometry;
pub mod jinv;
pub mod pipeline;
pub mod precision;
pub mod relation;
pub mod siegel;

pub use error::{Error, Result};
pub use geometry::{GroupContext, HSpec};
pub use pipeline::{run_pipeline, RunConfig, RunReport};
pub use precision::{BigComplex, BigReal, Prec};
