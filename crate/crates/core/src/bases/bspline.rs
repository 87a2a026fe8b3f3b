//! Periodic cardinal B-splines on `m` equispaced knots.
//!
//! `b_0` is the sampled box `1_{[-1/(2m), 1/(2m))}` convolved with itself
//! `alpha` times, each step scaled by `m/n` so the discrete recursion mirrors
//! `B_{α,m} = m B_{0,m} ⋆ B_{α-1,m}`. The remaining basis functions are the
//! circular translates `b_k = b_0(· - k/m)`.
//!
//! Since the knots are equispaced on the circle, the Gram matrix is
//! circulant and projections reduce to a length-`m` FFT division.

use rustfft::num_complex::Complex64;

use crate::conv::{fft_forward, fft_inverse};
use crate::error::{Error, Result};
use crate::signal::{Grid, Signal, Support};

#[derive(Debug, Clone)]
pub struct BSplineSpace {
    grid: Grid,
    alpha: usize,
    m: usize,
    /// Samples of `b_0` on its support, starting at `b0_support.start`.
    b0: Vec<f64>,
    b0_support: Support,
    /// Eigenvalues of the circulant Gram matrix.
    gram_eigs: Vec<f64>,
}

impl BSplineSpace {
    pub fn new(alpha: usize, m: usize, grid: Grid) -> Result<Self> {
        let n = grid.n();
        if m == 0 || m > n || !n.is_multiple_of(m) {
            return Err(Error::invalid(format!("knot count {m} must divide n = {n}")));
        }
        if m < alpha + 2 {
            return Err(Error::invalid(format!(
                "knot count {m} must be at least alpha + 2 = {}",
                alpha + 2
            )));
        }
        let step = n / m;

        // Offsets relative to the origin sample; the box covers
        // [-step/2, step/2 - 1] (or just 0 when step = 1).
        let box_lo: isize = -((step / 2) as isize);
        let unit = vec![1.0; step];
        let mut lo = box_lo;
        let mut vals = unit.clone();
        let scale = 1.0 / step as f64;
        for _ in 0..alpha {
            let mut next = vec![0.0; vals.len() + step - 1];
            for (i, a) in vals.iter().enumerate() {
                for (j, b) in unit.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            next.iter_mut().for_each(|v| *v *= scale);
            vals = next;
            lo += box_lo;
        }
        // Each box has its centroid half a sample left of the origin; undo
        // the accumulated drift to whole samples.
        if step > 1 {
            lo += alpha.div_ceil(2) as isize;
        }
        let c = grid.half() as isize;
        let start = (c + lo).rem_euclid(n as isize) as usize;
        let b0_support = Support {
            start,
            len: vals.len(),
        };

        // Gram entries g[d] = <b_0, b_d> under the quadrature dot product.
        let mut full = vec![0.0; n];
        for (k, i) in b0_support.indices(n).enumerate() {
            full[i] = vals[k];
        }
        let mut gram = vec![Complex64::new(0.0, 0.0); m];
        for (d, g) in gram.iter_mut().enumerate() {
            let shift = d * step;
            let acc: f64 = b0_support
                .indices(n)
                .zip(&vals)
                .map(|(i, v)| v * full[(i + n - shift) % n])
                .sum();
            g.re = acc / n as f64;
        }
        fft_forward(&mut gram);
        let gram_eigs: Vec<f64> = gram.iter().map(|c| c.re).collect();
        let max = gram_eigs.iter().cloned().fold(0.0, f64::max);
        assert!(
            gram_eigs.iter().all(|&e| e > 1e-13 * max),
            "B-spline Gram matrix is singular (alpha = {alpha}, m = {m})"
        );

        Ok(BSplineSpace {
            grid,
            alpha,
            m,
            b0: vals,
            b0_support,
            gram_eigs,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Samples between consecutive knots.
    pub fn step(&self) -> usize {
        self.grid.n() / self.m
    }

    pub fn support(&self, k: usize) -> Support {
        let n = self.grid.n();
        Support {
            start: (self.b0_support.start + k * self.step()) % n,
            len: self.b0_support.len,
        }
    }

    /// `b_k` sampled on the grid.
    pub fn basis(&self, k: usize) -> Signal {
        let n = self.grid.n();
        let mut v = vec![0.0; n];
        for (i, b) in self.support(k).indices(n).zip(&self.b0) {
            v[i] = *b;
        }
        Signal::from_vec_unchecked(self.grid, v)
    }

    /// Quadrature inner products `<row, b_k>` for every `k`.
    pub fn moments(&self, row: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        (0..self.m)
            .map(|k| {
                self.support(k)
                    .indices(n)
                    .zip(&self.b0)
                    .map(|(i, b)| row[i] * b)
                    .sum::<f64>()
                    / n as f64
            })
            .collect()
    }

    /// Applies the inverse Gram matrix to `rhs` in place.
    pub fn solve_gram(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.m);
        let mut buf: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        for (b, e) in buf.iter_mut().zip(&self.gram_eigs) {
            *b /= e;
        }
        fft_inverse(&mut buf);
        let scale = 1.0 / self.m as f64;
        for (r, b) in rhs.iter_mut().zip(&buf) {
            *r = b.re * scale;
        }
    }

    /// Coefficients of the quadrature-orthogonal projection of `row`.
    pub fn project(&self, row: &Signal) -> Result<Vec<f64>> {
        self.grid.ensure_same(&row.grid())?;
        let mut c = self.moments(row.values());
        self.solve_gram(&mut c);
        Ok(c)
    }

    /// `Σ_k c_k b_k`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Signal {
        let n = self.grid.n();
        let mut v = vec![0.0; n];
        for (k, c) in coeffs.iter().enumerate() {
            for (i, b) in self.support(k).indices(n).zip(&self.b0) {
                v[i] += c * b;
            }
        }
        Signal::from_vec_unchecked(self.grid, v)
    }
}

/// Free-function form of [`BSplineSpace::project`].
pub fn bspline_project(row: &Signal, space: &BSplineSpace) -> Result<Vec<f64>> {
    space.project(row)
}
