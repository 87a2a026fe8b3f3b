//! Convolution-product expansions of space-varying integral operators.
//!
//! An operator `Hu(x) = ∫ K(x, y) u(y) dy` on the circle is stored through
//! its time-varying impulse response `T(x, y) = K(x + y, y)` and compressed
//! into `H_m u = Σ_k h_k ⋆ (w_k ⊙ u)`. Each constructor in [`approx`] picks
//! the filters `h_k` and windows `w_k` differently; [`Expansion::apply`]
//! evaluates the result with sectioned FFT convolutions.

pub mod approx;
pub mod bases;
pub mod conv;
pub mod error;
pub mod expansion;
pub mod gallery;
pub mod operator;
pub mod signal;

pub use error::{Error, Result};
pub use expansion::{Expansion, Term};
pub use operator::{apply_dense, apply_dense_adjoint, hs_distance, hs_norm, operator_spectrum, KernelMatrix, Tvir};
pub use signal::{Grid, Signal, Spectrum, Support};
