//! Convolution products of finitely supported probability measures on ℤ,
//! the Fourier-side hypotheses that control their weighted ergodic averages,
//! and simulations of those averages on concrete measure-preserving systems.
//!
//! The crate is `no_std` (it needs `alloc`). Enable `std` for
//! `std::error::Error` integration and `parallel` to spread per-index work
//! over a rayon pool; results are identical either way.
//!
//! Module map:
//!
//! * [`measure`]: [`LatticeMeasure`] and its exact algebra (convolution,
//!   moments, shift distance, coset masses, aperiodicity).
//! * [`sequence`]: [`SequenceSpec`], the generator of `ν_1, ν_2, …`, and
//!   prefix convolutions `μ_n = ν_1 ∗ ⋯ ∗ ν_n`.
//! * [`spectral`]: Fourier transforms with certified bounds.
//! * [`quadrature`]: adaptive Simpson integration.
//! * [`hypothesis`]: finite-horizon reports on convergence and sweep-out
//!   conditions.
//! * [`dynamics`]: cyclic shifts and circle rotations, weighted averages,
//!   maximal functions and weak-(1,1) tables.
//! * [`sweepout`]: the three-atom counterexample family and its
//!   dissipativity / Fourier-floor / sweep-out experiments.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
mod error;
pub mod hypothesis;
mod math;
pub mod measure;
mod par;
pub mod quadrature;
pub mod sequence;
pub mod spectral;
pub mod sweepout;

pub use error::{Error, Result};
pub use measure::LatticeMeasure;
pub use sequence::{Decomposition, SequenceSpec, Term};
