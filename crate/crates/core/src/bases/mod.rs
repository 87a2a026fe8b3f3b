//! Fixed approximation systems: Fourier row symbols, periodic cardinal
//! B-splines and periodized Daubechies wavelets.

pub mod bspline;
pub mod symbol;
pub mod wavelet;

pub use bspline::BSplineSpace;
pub use symbol::{kn_symbol, KnSymbol};
pub use wavelet::{WaveletCoeffs, WaveletSpec};
