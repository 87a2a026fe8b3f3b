use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::bases::BSplineSpace;
use crate::error::{Error, Result};
use crate::expansion::{Expansion, Term};
use crate::operator::{support_block, Tvir};
use crate::signal::{Grid, Signal, Support};

/// Functions of `y` the interpolant is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpBasis {
    /// `1, cos 2πky, sin 2πky, …`, plus `cos πmy` when `m` is even.
    Fourier,
    /// Periodic B-splines of order `alpha` on `m` knots.
    Spline { alpha: usize },
}

/// Collocation in `y`: `T_m(x, y_l) = T(x, y_l)` at the `m` grid points
/// nearest to `l/m`. One `m × m` factorization serves every row.
pub fn interp_expand(t: &Tvir, m: usize, basis: InterpBasis) -> Result<Expansion> {
    let grid = t.grid();
    let n = grid.n();
    if m == 0 || m > n {
        return Err(Error::invalid(format!("interpolation order {m} not in 1..={n}")));
    }
    let (funcs, supports) = basis_functions(grid, m, basis)?;
    let nodes: Vec<usize> = (0..m)
        .map(|l| grid.nearest_index(wrap(l as f64 / m as f64)))
        .collect();
    let mut sorted = nodes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let singular = || Error::SingularCollocation {
        basis: basis_name(basis),
        m,
    };
    if sorted.len() != m {
        return Err(singular());
    }

    let a = DMatrix::from_fn(m, m, |l, k| funcs[k][nodes[l]]);
    let lu = a.lu();
    // sample block: one row per support row, one column per node
    let tb = support_block(t);
    let samples = DMatrix::from_fn(m, tb.nrows(), |l, r| tb[(r, nodes[l])]);
    let coeffs = lu.solve(&samples).ok_or_else(singular)?;
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }

    let rows: Vec<usize> = t.support_rows().indices(n).collect();
    let terms = funcs
        .into_iter()
        .zip(supports)
        .enumerate()
        .map(|(k, (w, ws))| {
            let mut h = vec![0.0; n];
            for (r, &i) in rows.iter().enumerate() {
                h[i] = coeffs[(k, r)];
            }
            let h = Signal::new(grid, h)?;
            let hs = h.support();
            Term::with_supports(h, hs, Signal::new(grid, w)?, ws)
        })
        .collect::<Result<Vec<_>>>()?;
    Expansion::new(grid, terms, format!("interp_{}(m={m})", basis_name(basis)))
}

fn basis_name(basis: InterpBasis) -> String {
    match basis {
        InterpBasis::Fourier => "fourier".into(),
        InterpBasis::Spline { alpha } => format!("spline{alpha}"),
    }
}

fn wrap(t: f64) -> f64 {
    if t >= 0.5 {
        t - 1.0
    } else {
        t
    }
}

fn basis_functions(grid: Grid, m: usize, basis: InterpBasis) -> Result<(Vec<Vec<f64>>, Vec<Support>)> {
    let n = grid.n();
    match basis {
        InterpBasis::Fourier => {
            let mut funcs: Vec<Vec<f64>> = vec![vec![1.0; n]];
            let mut k = 1;
            while funcs.len() < m {
                let freq = 2.0 * PI * k as f64;
                funcs.push(grid.coords().map(|y| (freq * y).cos()).collect());
                if funcs.len() < m {
                    funcs.push(grid.coords().map(|y| (freq * y).sin()).collect());
                }
                k += 1;
            }
            Ok((funcs, vec![Support::full(n); m]))
        }
        InterpBasis::Spline { alpha } => {
            let space = BSplineSpace::new(alpha, m, grid)?;
            Ok((
                (0..m).map(|k| space.basis(k).into_values()).collect(),
                (0..m).map(|k| space.support(k)).collect(),
            ))
        }
    }
}
