use crate::bases::wavelet::atom_at;
use crate::bases::WaveletSpec;
use crate::error::{Error, Result};
use crate::expansion::{Expansion, Term};
use crate::operator::Tvir;
use crate::signal::Signal;

use super::active_rows;

/// Linear wavelet approximation of every row in `y`: keeps the `m`
/// coarsest coefficients of a full-depth periodized Daubechies transform
/// with `alpha` vanishing moments.
pub fn wavelet_expand(t: &Tvir, m: usize, alpha: usize) -> Result<Expansion> {
    let grid = t.grid();
    let n = grid.n();
    if !m.is_power_of_two() || m > n {
        return Err(Error::invalid(format!(
            "wavelet term count {m} must be a power of two at most {n}"
        )));
    }
    let spec = WaveletSpec::full(alpha, grid)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut h = vec![vec![0.0; n]; m];
    for i in active_rows(t) {
        let c = spec.forward(t.row(i).values())?;
        for (hk, ck) in h.iter_mut().zip(c) {
            hk[i] = ck * scale;
        }
    }
    let terms = h
        .into_iter()
        .enumerate()
        .map(|(k, hk)| Term::new(Signal::new(grid, hk)?, atom_at(&spec, grid, k)?))
        .collect::<Result<Vec<_>>>()?;
    Expansion::new(grid, terms, format!("wavelet(m={m},alpha={alpha})"))
}
