//! Constructors turning a TVIR into a convolution-product expansion.

mod als;
mod fourier;
mod interp;
mod meyer;
mod spline;
mod svd;
mod wavelet;

use std::fmt;
use std::str::FromStr;

pub use als::{als_expand, als_run, AlsConfig, AlsInit, AlsReport};
pub use fourier::fourier_expand;
pub use interp::{interp_expand, InterpBasis};
pub use meyer::{meyer_apply, meyer_expand, MeyerRep};
pub use spline::spline_expand;
pub use svd::{svd_expand, svd_factors, SvdFactors};
pub use wavelet::wavelet_expand;

use crate::error::{Error, Result};
use crate::expansion::Expansion;
use crate::operator::Tvir;

/// Every constructor behind one switch, as used by the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fourier,
    Spline,
    Wavelet,
    Svd,
    Meyer,
    Als,
    InterpFourier,
    InterpSpline,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Fourier,
        Method::Spline,
        Method::Wavelet,
        Method::Svd,
        Method::Meyer,
        Method::Als,
        Method::InterpFourier,
        Method::InterpSpline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::Spline => "spline",
            Method::Wavelet => "wavelet",
            Method::Svd => "svd",
            Method::Meyer => "meyer",
            Method::Als => "als",
            Method::InterpFourier => "interp_fourier",
            Method::InterpSpline => "interp_spline",
        }
    }

    /// Default smoothness parameter for a kernel of smoothness `s`:
    /// B-splines of order `s`, wavelets with `s + 1` vanishing moments.
    pub fn default_alpha(&self, s: Option<u32>) -> usize {
        let s = s.unwrap_or(1).max(1) as usize;
        match self {
            Method::Wavelet | Method::Meyer => s + 1,
            _ => s,
        }
    }

    /// Largest order at which the method reproduces any TVIR on `n` points.
    pub fn complete_order(&self, n: usize) -> usize {
        match self {
            Method::Fourier => n / 2,
            _ => n,
        }
    }

    /// Builds the expansion of order `m`. For `meyer`, `m` is the side of
    /// the retained square coefficient block (`m1 = m2 = m`); for `fourier`
    /// it is the highest frequency, giving `2m + 1` terms.
    pub fn expand(&self, t: &Tvir, m: usize, alpha: usize) -> Result<Expansion> {
        match self {
            Method::Fourier => fourier_expand(t, m),
            Method::Spline => spline_expand(t, m, alpha),
            Method::Wavelet => wavelet_expand(t, m, alpha),
            Method::Svd => svd_expand(t, m).map(|(e, _)| e),
            Method::Meyer => meyer_expand(t, m, m, alpha)?.to_expansion(),
            Method::Als => als_expand(t, &AlsConfig::bspline(t.grid(), m, alpha)?),
            Method::InterpFourier => interp_expand(t, m, InterpBasis::Fourier),
            Method::InterpSpline => interp_expand(t, m, InterpBasis::Spline { alpha }),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('_', "-") == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}

/// Rows of `t` that may carry nonzeros, in support order.
pub(crate) fn active_rows(t: &Tvir) -> Vec<usize> {
    t.support_rows().indices(t.n()).collect()
}
