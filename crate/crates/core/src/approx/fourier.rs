use std::f64::consts::PI;

use crate::conv::dft;
use crate::error::{Error, Result};
use crate::expansion::{Expansion, Term};
use crate::operator::Tvir;
use crate::signal::Signal;

use super::active_rows;

/// Truncated Fourier series of every row in `y`:
/// `T_m(x, y) = Σ_{|k|<=m} N(x, k) exp(2iπky)`.
///
/// The complex pairs are folded into real cosine and sine terms, so the
/// expansion holds `2m + 1` terms. `m = n/2` adds the Nyquist cosine and
/// reproduces `T` exactly (`n` terms).
pub fn fourier_expand(t: &Tvir, m: usize) -> Result<Expansion> {
    let grid = t.grid();
    let n = grid.n();
    let half = grid.half();
    if m > half {
        return Err(Error::invalid(format!("fourier order {m} exceeds n/2 = {half}")));
    }
    let rows = active_rows(t);
    let spectra: Vec<_> = rows.iter().map(|&i| dft(&t.row(i))).collect();

    let filter = |f: &dyn Fn(&crate::signal::Spectrum) -> f64| {
        let mut h = vec![0.0; n];
        for (&i, spec) in rows.iter().zip(&spectra) {
            h[i] = f(spec);
        }
        Signal::new(grid, h)
    };

    let mut terms = Vec::with_capacity(2 * m + 1);
    terms.push(Term::new(filter(&|s| s.get(0).re)?, Signal::constant(grid, 1.0))?);
    for k in 1..=m.min(half - 1) {
        let kk = k as i64;
        let freq = 2.0 * PI * k as f64;
        let h_cos = filter(&|s| 2.0 * s.get(kk).re)?;
        let h_sin = filter(&|s| -2.0 * s.get(kk).im)?;
        terms.push(Term::new(h_cos, Signal::from_fn(grid, |y| (freq * y).cos()))?);
        terms.push(Term::new(h_sin, Signal::from_fn(grid, |y| (freq * y).sin()))?);
    }
    if m == half {
        let h = filter(&|s| s.get(-(half as i64)).re)?;
        // exp(-iπn t_j) = (-1)^(j - n/2), exactly
        let w: Vec<f64> = (0..n)
            .map(|j| if (j + half).is_multiple_of(2) { 1.0 } else { -1.0 })
            .collect();
        terms.push(Term::new(h, Signal::new(grid, w)?)?);
    }
    Expansion::new(grid, terms, format!("fourier(m={m})"))
}
