//! Periodic grid on the unit circle and the sampled signals that live on it.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling of the circle `[-1/2, 1/2)` with `n` points,
/// `t_i = (i - n/2) / n`. Index `n/2` is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn log2(&self) -> u32 {
        self.n.trailing_zeros()
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.half() as f64) / self.n as f64
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.coord(i))
    }

    /// Grid index nearest to `t`, after wrapping `t` onto the circle.
    /// Halfway cases round up.
    pub fn nearest_index(&self, t: f64) -> usize {
        let n = self.n as f64;
        let pos = (t * n + self.half() as f64).round();
        pos.rem_euclid(n) as usize % self.n
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

/// Circular index interval `{start, start+1, ..., start+len-1} mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub start: usize,
    pub len: usize,
}

impl Support {
    pub fn new(start: usize, len: usize, n: usize) -> Result<Self> {
        if start >= n || len > n {
            return Err(Error::invalid(format!(
                "support [{start}, +{len}) does not fit a grid of {n}"
            )));
        }
        Ok(Support { start, len })
    }

    pub fn full(n: usize) -> Self {
        Support { start: 0, len: n }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize, n: usize) -> bool {
        (i + n - self.start) % n < self.len
    }

    pub fn indices(&self, n: usize) -> impl Iterator<Item = usize> {
        let start = self.start;
        (0..self.len).map(move |k| (start + k) % n)
    }

    /// Smallest circular interval holding every nonzero of `values`.
    /// Among equally short intervals the one with the smallest start wins.
    pub fn minimal(values: &[f64]) -> Self {
        let n = values.len();
        let nz: Vec<usize> = (0..n).filter(|&i| values[i] != 0.0).collect();
        match nz.len() {
            0 => return Support { start: 0, len: 0 },
            k if k == n => return Support { start: 0, len: n },
            _ => {}
        }
        let r = nz.len();
        let mut best: Option<(usize, usize)> = None; // (gap, start)
        for i in 0..r {
            let here = nz[i];
            let next = nz[(i + 1) % r];
            let gap = (next + n - here - 1) % n;
            let gap = if r == 1 { n - 1 } else { gap };
            let candidate = (gap, next);
            best = Some(match best {
                None => candidate,
                Some(b) if gap > b.0 || (gap == b.0 && next < b.1) => candidate,
                Some(b) => b,
            });
        }
        let (gap, start) = best.unwrap();
        Support { start, len: n - gap }
    }

    /// Errors if `values` has a nonzero outside this interval.
    pub fn check_contains(&self, values: &[f64]) -> Result<()> {
        let n = values.len();
        if let Some(i) = (0..n).find(|&i| values[i] != 0.0 && !self.contains(i, n)) {
            return Err(Error::contract(format!(
                "nonzero at index {i} outside declared support [{}, +{})",
                self.start, self.len
            )));
        }
        Ok(())
    }
}

/// Real samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch {
                expected: grid.n(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Signal { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Signal { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Signal {
            grid,
            values: vec![c; grid.n()],
        }
    }

    pub fn impulse(grid: Grid, index: usize) -> Self {
        let mut s = Signal::zeros(grid);
        s.values[index % grid.n()] = 1.0;
        s
    }

    /// Samples `f(t_i)` on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Signal {
            grid,
            values: grid.coords().map(f).collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> Support {
        Support::minimal(&self.values)
    }

    pub fn dot(&self, other: &Signal) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    /// Quadrature inner product `(1/n) sum_i a_i b_i`.
    pub fn quad_dot(&self, other: &Signal) -> Result<f64> {
        Ok(self.dot(other)? / self.grid.n() as f64)
    }

    pub fn quad_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.grid.n() as f64).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn hadamard(&self, other: &Signal) -> Result<Signal> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Signal::from_vec_unchecked(self.grid, values))
    }

    pub fn scaled(&self, c: f64) -> Signal {
        Signal::from_vec_unchecked(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Signal::from_vec_unchecked(self.grid, values))
    }

    /// Circular shift: `out[i] = self[i - k]`.
    pub fn shifted(&self, k: isize) -> Signal {
        let n = self.grid.n() as isize;
        let mut out = vec![0.0; self.grid.n()];
        for (i, v) in self.values.iter().enumerate() {
            out[(i as isize + k).rem_euclid(n) as usize] = *v;
        }
        Signal::from_vec_unchecked(self.grid, out)
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Fourier coefficients `u_hat[k]` for `k = -n/2 .. n/2 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    // coeffs[k + n/2]
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::DimensionMismatch {
                expected: grid.n(),
                found: coeffs.len(),
            });
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn k_min(&self) -> i64 {
        -(self.grid.half() as i64)
    }

    pub fn k_max(&self) -> i64 {
        self.grid.half() as i64 - 1
    }

    /// Coefficient at frequency `k`; `k` outside the stored band is zero.
    pub fn get(&self, k: i64) -> Complex64 {
        if k < self.k_min() || k > self.k_max() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k - self.k_min()) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k0 = self.k_min();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (k0 + i as i64, *c))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}
