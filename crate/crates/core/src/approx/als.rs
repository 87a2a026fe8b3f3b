use nalgebra::{Cholesky, DMatrix, SVD};

use crate::bases::BSplineSpace;
use crate::error::{Error, Result};
use crate::expansion::{Expansion, Term};
use crate::operator::{support_block, Tvir};
use crate::signal::{Grid, Signal, Support};

/// Starting windows functions for the alternating fit.
#[derive(Debug, Clone, PartialEq)]
pub enum AlsInit {
    /// B-splines of the given order, one per window.
    BSpline { alpha: usize },
    /// Indicator of each window.
    Windows,
    /// Caller-supplied `w_k`, each vanishing outside its window.
    Given(Vec<Signal>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlsConfig {
    /// Support of `w_k`; its length is the number of terms.
    pub windows: Vec<Support>,
    pub max_iter: usize,
    /// Stop once a sweep lowers the objective by less than `tol` relative.
    pub tol: f64,
    pub init: AlsInit,
}

impl AlsConfig {
    /// `m` windows on the supports of the order-`alpha` B-splines, started
    /// from the B-splines themselves.
    pub fn bspline(grid: Grid, m: usize, alpha: usize) -> Result<Self> {
        let space = BSplineSpace::new(alpha, m, grid)?;
        Ok(AlsConfig {
            windows: (0..m).map(|k| space.support(k)).collect(),
            max_iter: 200,
            tol: 1e-8,
            init: AlsInit::BSpline { alpha },
        })
    }
}

#[derive(Debug, Clone)]
pub struct AlsReport {
    pub expansion: Expansion,
    /// Squared Hilbert-Schmidt error after the initial `h` fit and after
    /// every sweep.
    pub objective: Vec<f64>,
    pub converged: bool,
}

impl AlsReport {
    pub fn iterations(&self) -> usize {
        self.objective.len() - 1
    }
}

pub fn als_expand(t: &Tvir, cfg: &AlsConfig) -> Result<Expansion> {
    als_run(t, cfg).map(|r| r.expansion)
}

/// Alternating least squares for `min ‖T - Σ_k h_k w_kᵀ‖` with every `w_k`
/// confined to its window. Each half step solves its block exactly, so the
/// objective never increases.
pub fn als_run(t: &Tvir, cfg: &AlsConfig) -> Result<AlsReport> {
    let grid = t.grid();
    let n = grid.n();
    let m = cfg.windows.len();
    if m == 0 {
        return Err(Error::invalid("at least one window is required"));
    }
    for w in &cfg.windows {
        Support::new(w.start, w.len, n)?;
        if w.is_empty() {
            return Err(Error::invalid("windows must be nonempty"));
        }
    }
    if let Some(j) = (0..n).find(|&j| !cfg.windows.iter().any(|w| w.contains(j, n))) {
        return Err(Error::invalid(format!("sample {j} lies in no window")));
    }
    if cfg.tol.is_nan() || cfg.tol < 0.0 {
        return Err(Error::invalid(format!("tolerance {} must be non-negative", cfg.tol)));
    }

    let rows: Vec<usize> = t.support_rows().indices(n).collect();
    let tb = support_block(t);
    let mut w = initial_windows(grid, cfg)?;
    let scale = 1.0 / (n * n) as f64;

    let mut h = fit_h(&tb, &w);
    let mut objective = vec![residual_sq(&tb, &h, &w) * scale];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        fit_w(&tb, &h, &cfg.windows, &mut w);
        h = fit_h(&tb, &w);
        let prev = *objective.last().expect("seeded");
        let cur = residual_sq(&tb, &h, &w) * scale;
        objective.push(cur);
        if prev - cur <= cfg.tol * prev {
            converged = true;
            break;
        }
    }

    let terms = (0..m)
        .map(|k| {
            let mut hk = vec![0.0; n];
            for (r, &i) in rows.iter().enumerate() {
                hk[i] = h[(r, k)];
            }
            let hk = Signal::new(grid, hk)?;
            let wk = Signal::new(grid, w.row(k).iter().copied().collect())?;
            let hs = hk.support();
            Term::with_supports(hk, hs, wk, cfg.windows[k])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlsReport {
        expansion: Expansion::new(grid, terms, format!("als(m={m})"))?,
        objective,
        converged,
    })
}

/// `W` as an `m × n` matrix, zero outside each window.
fn initial_windows(grid: Grid, cfg: &AlsConfig) -> Result<DMatrix<f64>> {
    let n = grid.n();
    let m = cfg.windows.len();
    let mut w = DMatrix::zeros(m, n);
    match &cfg.init {
        AlsInit::Windows => {
            for (k, win) in cfg.windows.iter().enumerate() {
                for j in win.indices(n) {
                    w[(k, j)] = 1.0;
                }
            }
        }
        AlsInit::BSpline { alpha } => {
            let space = BSplineSpace::new(*alpha, m, grid)?;
            for (k, win) in cfg.windows.iter().enumerate() {
                let b = space.basis(k);
                for j in win.indices(n) {
                    w[(k, j)] = b[j];
                }
            }
        }
        AlsInit::Given(ws) => {
            if ws.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: ws.len(),
                });
            }
            for (k, (wk, win)) in ws.iter().zip(&cfg.windows).enumerate() {
                grid.ensure_same(&wk.grid())?;
                win.check_contains(wk.values())?;
                for j in 0..n {
                    w[(k, j)] = wk[j];
                }
            }
        }
    }
    Ok(w)
}

/// `H = T Wᵀ (W Wᵀ)⁻¹`.
fn fit_h(tb: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = w * w.transpose();
    let rhs = w * tb.transpose();
    solve_normal(gram, rhs).transpose()
}

/// Column by column, the least-squares window values given `H`.
fn fit_w(tb: &DMatrix<f64>, h: &DMatrix<f64>, windows: &[Support], w: &mut DMatrix<f64>) {
    let n = tb.ncols();
    let hth = h.transpose() * h;
    let htt = h.transpose() * tb;
    for j in 0..n {
        let active: Vec<usize> = (0..windows.len())
            .filter(|&k| windows[k].contains(j, n))
            .collect();
        if active.is_empty() {
            continue;
        }
        let a = DMatrix::from_fn(active.len(), active.len(), |r, c| hth[(active[r], active[c])]);
        let b = DMatrix::from_fn(active.len(), 1, |r, _| htt[(active[r], j)]);
        let x = solve_normal(a, b);
        for (r, &k) in active.iter().enumerate() {
            w[(k, j)] = x[(r, 0)];
        }
    }
}

/// Solves the symmetric positive semidefinite system `a x = b`: Cholesky
/// when it succeeds, else the minimum-norm solution.
fn solve_normal(a: DMatrix<f64>, b: DMatrix<f64>) -> DMatrix<f64> {
    let eps = 1e-14 * a.trace().abs();
    if let Some(ch) = Cholesky::new(a.clone()) {
        let x = ch.solve(&b);
        if x.iter().all(|v| v.is_finite()) {
            return x;
        }
    }
    SVD::new(a, true, true)
        .solve(&b, eps)
        .expect("both factors computed")
}

fn residual_sq(tb: &DMatrix<f64>, h: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    (tb - h * w).norm_squared()
}
