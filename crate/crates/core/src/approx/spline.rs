use crate::bases::BSplineSpace;
use crate::error::Result;
use crate::expansion::{Expansion, Term};
use crate::operator::Tvir;
use crate::signal::Signal;

use super::active_rows;

/// Projects every row of `t` in `y` onto the periodic B-splines of order
/// `alpha` with `m` knots. Term `k` pairs the coefficient profile `c_k(x)`
/// with `b_k(y)`, so each `w_k` is supported on roughly `(alpha + 1) n / m`
/// samples.
pub fn spline_expand(t: &Tvir, m: usize, alpha: usize) -> Result<Expansion> {
    let grid = t.grid();
    let n = grid.n();
    let space = BSplineSpace::new(alpha, m, grid)?;
    let mut h = vec![vec![0.0; n]; m];
    for i in active_rows(t) {
        let c = space.project(&t.row(i))?;
        for (hk, ck) in h.iter_mut().zip(c) {
            hk[i] = ck;
        }
    }
    let terms = h
        .into_iter()
        .enumerate()
        .map(|(k, hk)| {
            let hk = Signal::new(grid, hk)?;
            let hs = hk.support();
            Term::with_supports(hk, hs, space.basis(k), space.support(k))
        })
        .collect::<Result<Vec<_>>>()?;
    Expansion::new(grid, terms, format!("spline(m={m},alpha={alpha})"))
}
