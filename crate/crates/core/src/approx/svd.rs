use crate::error::{Error, Result};
use crate::expansion::{Expansion, Term};
use crate::operator::{support_block, thin_svd, Tvir};
use crate::signal::Signal;

/// Leading singular triplets of the sample matrix `T`.
///
/// `f_k` (in `x`) and `e_k` (in `y`) are orthonormal for the plain
/// Euclidean product and `T ≈ Σ_k sigma_k f_k e_kᵀ`. Each `e_k` has its
/// first non-negligible entry positive.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub sigma: Vec<f64>,
    pub f: Vec<Signal>,
    pub e: Vec<Signal>,
}

/// Rank-`m` truncated SVD, capped at the number of support rows.
pub fn svd_factors(t: &Tvir, m: usize) -> Result<SvdFactors> {
    let grid = t.grid();
    let n = grid.n();
    if m > n {
        return Err(Error::invalid(format!("rank {m} exceeds n = {n}")));
    }
    let rows: Vec<usize> = t.support_rows().indices(n).collect();
    let (u, sigma, v) = thin_svd(support_block(t));

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    order.truncate(m.min(rows.len()));

    let mut out = SvdFactors {
        sigma: Vec::with_capacity(order.len()),
        f: Vec::with_capacity(order.len()),
        e: Vec::with_capacity(order.len()),
    };
    for k in order {
        let mut e: Vec<f64> = v.column(k).iter().copied().collect();
        let mut f = vec![0.0; n];
        for (r, &i) in rows.iter().enumerate() {
            f[i] = u[(r, k)];
        }
        if e.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0) {
            e.iter_mut().for_each(|x| *x = -*x);
            f.iter_mut().for_each(|x| *x = -*x);
        }
        out.sigma.push(sigma[k]);
        out.f.push(Signal::new(grid, f)?);
        out.e.push(Signal::new(grid, e)?);
    }
    Ok(out)
}

/// Best approximation of `t` by `m` separable terms in Hilbert-Schmidt
/// norm, with `h_k = sigma_k f_k` and `w_k = e_k`.
pub fn svd_expand(t: &Tvir, m: usize) -> Result<(Expansion, SvdFactors)> {
    let factors = svd_factors(t, m)?;
    let terms = factors
        .sigma
        .iter()
        .zip(factors.f.iter().zip(&factors.e))
        .map(|(s, (f, e))| Term::new(f.scaled(*s), e.clone()))
        .collect::<Result<Vec<_>>>()?;
    let e = Expansion::new(t.grid(), terms, format!("svd(m={m})"))?;
    Ok((e, factors))
}
