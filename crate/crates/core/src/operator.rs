//! The operator through its time-varying impulse response (TVIR), the dense
//! reference application and Hilbert–Schmidt metrics.
//!
//! A TVIR is stored as an `n × n` matrix of samples `T(t_i, t_j)`: the row
//! index is the offset `x`, the column index the source position `y`. The
//! kernel is recovered through `K(x, y) = T(x - y, y)`, which on the grid
//! reads `K[a][j] = T[(a - j + n/2) mod n][j]`.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::signal::{Grid, Signal, Support};

/// Tolerance on rows that must vanish outside the declared support.
pub const SUPPORT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Tvir {
    grid: Grid,
    values: DMatrix<f64>,
    kappa: f64,
    s_hint: Option<u32>,
}

impl Tvir {
    /// Validates finiteness and that every row with `|t_i| > kappa/2` is
    /// exactly zero.
    pub fn new(grid: Grid, values: DMatrix<f64>, kappa: f64) -> Result<Self> {
        check_shape(grid, &values)?;
        check_kappa(kappa)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        for i in 0..grid.n() {
            if !in_support(grid, i, kappa) && values.row(i).iter().any(|&v| v != 0.0) {
                return Err(Error::contract(format!(
                    "row {i} (offset {}) is nonzero outside kappa = {kappa}",
                    grid.coord(i)
                )));
            }
        }
        Ok(Tvir {
            grid,
            values,
            kappa,
            s_hint: None,
        })
    }

    /// Like [`Tvir::new`], but zeroes the rows outside the support first.
    pub fn truncated(grid: Grid, mut values: DMatrix<f64>, kappa: f64) -> Result<Self> {
        check_shape(grid, &values)?;
        check_kappa(kappa)?;
        for i in 0..grid.n() {
            if !in_support(grid, i, kappa) {
                values.row_mut(i).fill(0.0);
            }
        }
        Tvir::new(grid, values, kappa)
    }

    /// Wraps `values` with the smallest `kappa` covering its nonzero rows.
    pub fn with_tight_kappa(grid: Grid, values: DMatrix<f64>) -> Result<Self> {
        check_shape(grid, &values)?;
        let reach = (0..grid.n())
            .filter(|&i| values.row(i).iter().any(|&v| v != 0.0))
            .map(|i| grid.coord(i).abs())
            .fold(0.0, f64::max);
        let kappa = (2.0 * reach).max(1.0 / grid.n() as f64).min(1.0);
        Tvir::new(grid, values, kappa)
    }

    pub fn zeros(grid: Grid) -> Self {
        Tvir {
            grid,
            values: DMatrix::zeros(grid.n(), grid.n()),
            kappa: 1.0,
            s_hint: None,
        }
    }

    /// Builds `T[i][j] = f(t_i, t_j)` and truncates to `kappa`.
    pub fn from_fn(grid: Grid, kappa: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n();
        let values = DMatrix::from_fn(n, n, |i, j| {
            if in_support(grid, i, kappa) {
                f(grid.coord(i), grid.coord(j))
            } else {
                0.0
            }
        });
        Tvir::new(grid, values, kappa)
    }

    pub fn with_smoothness(mut self, s: u32) -> Self {
        self.s_hint = Some(s);
        self
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn s_hint(&self) -> Option<u32> {
        self.s_hint
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Row `i` (fixed offset) as a function of position.
    pub fn row(&self, i: usize) -> Signal {
        Signal::from_vec_unchecked(self.grid, self.values.row(i).iter().copied().collect())
    }

    /// Column `j`: the impulse response at position `t_j`.
    pub fn column(&self, j: usize) -> Signal {
        Signal::from_vec_unchecked(self.grid, self.values.column(j).iter().copied().collect())
    }

    /// Contiguous rows allowed to be nonzero: `|t_i| <= kappa/2`.
    pub fn support_rows(&self) -> Support {
        support_rows(self.grid, self.kappa)
    }
}

fn check_shape(grid: Grid, values: &DMatrix<f64>) -> Result<()> {
    let n = grid.n();
    for d in [values.nrows(), values.ncols()] {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::invalid(format!("kappa = {kappa} outside (0, 1]")));
    }
    Ok(())
}

#[inline]
pub(crate) fn in_support(grid: Grid, i: usize, kappa: f64) -> bool {
    grid.coord(i).abs() <= kappa / 2.0
}

pub(crate) fn support_rows(grid: Grid, kappa: f64) -> Support {
    let c = grid.half();
    let below = (1..=c).take_while(|&d| in_support(grid, c - d, kappa)).count();
    let above = (1..c).take_while(|&d| in_support(grid, c + d, kappa)).count();
    Support {
        start: c - below,
        len: below + 1 + above,
    }
}

/// Kernel samples `K[a][j] = K(t_a, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    grid: Grid,
    values: DMatrix<f64>,
}

impl KernelMatrix {
    pub fn new(grid: Grid, values: DMatrix<f64>) -> Result<Self> {
        check_shape(grid, &values)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(KernelMatrix { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

#[inline]
fn tvir_row(a: usize, j: usize, n: usize) -> usize {
    (a + n - j + n / 2) % n
}

pub fn tvir_to_kernel(t: &Tvir) -> KernelMatrix {
    let n = t.n();
    let values = DMatrix::from_fn(n, n, |a, j| t.values[(tvir_row(a, j, n), j)]);
    KernelMatrix {
        grid: t.grid,
        values,
    }
}

/// Inverse of [`tvir_to_kernel`]. Entries that land outside the `kappa`
/// support must be below [`SUPPORT_TOL`] in magnitude; they are then zeroed.
pub fn kernel_to_tvir(k: &KernelMatrix, kappa: f64) -> Result<Tvir> {
    check_kappa(kappa)?;
    let n = k.grid.n();
    let grid = k.grid;
    let mut values = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let a = (i + j + n - n / 2) % n;
            let v = k.values[(a, j)];
            if in_support(grid, i, kappa) {
                values[(i, j)] = v;
            } else if v.abs() > SUPPORT_TOL {
                return Err(Error::contract(format!(
                    "kernel entry ({a}, {j}) = {v:e} lies at offset {} outside kappa = {kappa}",
                    grid.coord(i)
                )));
            }
        }
    }
    Tvir::new(grid, values, kappa)
}

/// Reference application `(Hu)[a] = (1/n) Σ_j K[a][j] u[j]`, read straight
/// from the TVIR. Always `O(n²)`.
pub fn apply_dense(t: &Tvir, u: &Signal) -> Result<Signal> {
    t.grid.ensure_same(&u.grid())?;
    let n = t.n();
    let c = n / 2;
    let mut out = vec![0.0; n];
    for (j, &uj) in u.values().iter().enumerate() {
        let col = t.values.column(j);
        for (i, &tij) in col.iter().enumerate() {
            out[(i + j + n - c) % n] += tij * uj;
        }
    }
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(Signal::from_vec_unchecked(t.grid, out))
}

/// Adjoint of [`apply_dense`].
pub fn apply_dense_adjoint(t: &Tvir, v: &Signal) -> Result<Signal> {
    t.grid.ensure_same(&v.grid())?;
    let n = t.n();
    let c = n / 2;
    let vals = v.values();
    let out = (0..n)
        .map(|j| {
            t.values
                .column(j)
                .iter()
                .enumerate()
                .map(|(i, &tij)| tij * vals[(i + j + n - c) % n])
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Ok(Signal::from_vec_unchecked(t.grid, out))
}

/// `‖H‖_HS = ‖T‖_F / n`.
pub fn hs_norm(t: &Tvir) -> f64 {
    t.values.norm() / t.n() as f64
}

pub fn hs_distance(a: &Tvir, b: &Tvir) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok((&a.values - &b.values).norm() / a.n() as f64)
}

/// Singular values of `T / n` in nonincreasing order: the spectrum of the
/// integral operator with kernel `T`.
pub fn operator_spectrum(t: &Tvir) -> Vec<f64> {
    let n = t.n() as f64;
    let (_, sigma, _) = thin_svd(support_block(t));
    let mut sv: Vec<f64> = sigma.iter().map(|s| s / n).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(t.n(), 0.0);
    sv
}

/// The rows of `T` that may be nonzero, stacked in support order.
pub(crate) fn support_block(t: &Tvir) -> DMatrix<f64> {
    let n = t.n();
    let rows = t.support_rows();
    let mut block = DMatrix::zeros(rows.len, n);
    for (r, i) in rows.indices(n).enumerate() {
        block.row_mut(r).copy_from(&t.values.row(i));
    }
    block
}

/// `a = u diag(sigma) vᵀ` with orthonormal columns in `u` and `v`.
///
/// Always factors the tall orientation: the bidiagonal SVD in nalgebra can
/// return inaccurate vectors for matrices with more columns than rows.
pub(crate) fn thin_svd(a: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    if a.nrows() < a.ncols() {
        let (v, s, u) = thin_svd(a.transpose());
        return (u, s, v);
    }
    let svd = SVD::new(a, true, true);
    let u = svd.u.expect("left vectors requested");
    let v = svd.v_t.expect("right vectors requested").transpose();
    (u, svd.singular_values, v)
}
