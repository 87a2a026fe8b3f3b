//! Reference kernels: Gaussian blur with varying width, hat impulse responses
//! with varying width, a rank-two discontinuous TVIR, the slowly-decaying
//! "worst case" family and plain convolutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{in_support, Tvir};
use crate::signal::{Grid, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    Gaussian,
    Hat,
    Piecewise,
    WorstCase,
    PureConv,
}

impl KernelId {
    pub const ALL: [KernelId; 5] = [
        KernelId::Gaussian,
        KernelId::Hat,
        KernelId::Piecewise,
        KernelId::WorstCase,
        KernelId::PureConv,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelId::Gaussian => "gaussian",
            KernelId::Hat => "hat",
            KernelId::Piecewise => "piecewise",
            KernelId::WorstCase => "worst_case",
            KernelId::PureConv => "pure_conv",
        }
    }

    /// Builds the kernel with its default parameters.
    pub fn build(&self, grid: Grid) -> Result<Tvir> {
        let p = GalleryParams::default();
        match self {
            KernelId::Gaussian => gaussian(grid),
            KernelId::Hat => hat(grid),
            KernelId::Piecewise => piecewise(grid),
            KernelId::WorstCase => worst_case(grid, p.s, p.eps, p.kappa),
            KernelId::PureConv => {
                let kappa = 0.3;
                let h = Signal::from_fn(grid, |x| {
                    if x.abs() <= kappa / 2.0 {
                        (-(x * x) / (2.0 * 0.05 * 0.05)).exp() / ((2.0 * PI).sqrt() * 0.05)
                    } else {
                        0.0
                    }
                });
                pure_conv(&h, kappa)
            }
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('_', "-") == s)
            .ok_or_else(|| Error::invalid(format!("unknown kernel '{s}'")))
    }
}

/// Parameters of the worst-case family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalleryParams {
    pub s: u32,
    pub eps: f64,
    pub kappa: f64,
}

impl Default for GalleryParams {
    fn default() -> Self {
        GalleryParams {
            s: 1,
            eps: 0.1,
            kappa: 1.0,
        }
    }
}

fn gaussian_width(y: f64) -> f64 {
    0.08 + 0.02 * (2.0 * PI * y).cos()
}

/// Gaussian impulse responses `T(x, y) = exp(-x²/2σ(y)²) / (√(2π) σ(y))`
/// with `σ(y) = 0.08 + 0.02 cos(2πy)`, cut off three standard deviations
/// from the origin (`kappa = 6 sup σ = 0.6`).
pub fn gaussian(grid: Grid) -> Result<Tvir> {
    gaussian_truncated(grid, 0.6)
}

/// [`gaussian`] with an explicit support bound.
pub fn gaussian_truncated(grid: Grid, kappa: f64) -> Result<Tvir> {
    Tvir::from_fn(grid, kappa, |x, y| {
        let s = gaussian_width(y);
        (-(x * x) / (2.0 * s * s)).exp() / ((2.0 * PI).sqrt() * s)
    })
}

fn hat_width(y: f64) -> f64 {
    0.1 + 0.3 * (1.0 - y.abs())
}

/// Unit-area hats of width `σ(y) = 0.1 + 0.3 (1 - |y|)`:
/// `T(x, y) = (2/σ) max(1 - 2|x|/σ, 0)`, so `kappa = sup σ = 0.4`.
pub fn hat(grid: Grid) -> Result<Tvir> {
    Ok(Tvir::from_fn(grid, 0.4, |x, y| {
        let s = hat_width(y);
        (2.0 / s) * (1.0 - 2.0 * x.abs() / s).max(0.0)
    })?
    .with_smoothness(1))
}

/// `g_σ(x) = exp(-x²/σ²) / √(2π)`.
fn bump(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (sigma * sigma)).exp() / (2.0 * PI).sqrt()
}

/// `g_{0.05}(x)` on `|y| <= 1/4` and `g_{0.1}(x)` elsewhere: a sum of two
/// tensor products, hence rank two.
pub fn piecewise(grid: Grid) -> Result<Tvir> {
    Ok(Tvir::from_fn(grid, 1.0, |x, y| {
        if y.abs() <= 0.25 {
            bump(x, 0.05)
        } else {
            bump(x, 0.1)
        }
    })?
    .with_smoothness(0))
}

/// Kernel whose singular values decay as slowly as `H^s` regularity allows.
///
/// With `kappa = 1`: `T(x, y) = Σ_{k>=1} 2 σ_k cos(2πk(x + y))`,
/// `σ_k = k^-(s + 1/2 + eps/2)`. Otherwise the offsets are compressed into
/// `|x| <= kappa/2`: `T(x, y) = Σ_{k>=1} (2 σ̃_k / kappa) cos(2πk(x/kappa + y))`
/// with `σ̃_k = kappa / ((1 + k²)^s k^(1+eps))`. Modes stop at `n/2 - 1`.
pub fn worst_case(grid: Grid, s: u32, eps: f64, kappa: f64) -> Result<Tvir> {
    if s < 1 {
        return Err(Error::invalid("worst case kernel needs s >= 1"));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid(format!("eps = {eps} must be positive")));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::invalid(format!("kappa = {kappa} outside (0, 1]")));
    }
    let n = grid.n();
    let modes = grid.half() - 1;
    if kappa == 1.0 {
        let weights = worst_case_weights(s, eps, modes);
        // x + y = (i + j - n)/n, so T only depends on (i + j) mod n
        let profile: Vec<f64> = (0..n)
            .map(|r| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| {
                        let k = (k + 1) as f64;
                        2.0 * w * (2.0 * PI * k * r as f64 / n as f64).cos()
                    })
                    .sum()
            })
            .collect();
        let values = DMatrix::from_fn(n, n, |i, j| profile[(i + j) % n]);
        return Ok(Tvir::new(grid, values, 1.0)?.with_smoothness(s));
    }
    let weights: Vec<f64> = (1..=modes)
        .map(|k| {
            let k = k as f64;
            kappa / ((1.0 + k * k).powi(s as i32) * k.powf(1.0 + eps))
        })
        .collect();
    let values = DMatrix::from_fn(n, n, |i, j| {
        if !in_support(grid, i, kappa) {
            return 0.0;
        }
        let phase = grid.coord(i) / kappa + grid.coord(j);
        weights
            .iter()
            .enumerate()
            .map(|(k, w)| 2.0 * w / kappa * (2.0 * PI * (k + 1) as f64 * phase).cos())
            .sum()
    });
    Ok(Tvir::new(grid, values, kappa)?.with_smoothness(s))
}

/// `σ_k = k^-(s + 1/2 + eps/2)` for `k = 1..=modes`.
pub fn worst_case_weights(s: u32, eps: f64, modes: usize) -> Vec<f64> {
    let p = s as f64 + 0.5 + eps / 2.0;
    (1..=modes).map(|k| (k as f64).powf(-p)).collect()
}

/// Space-invariant operator: every column equals `h`.
pub fn pure_conv(h: &Signal, kappa: f64) -> Result<Tvir> {
    let grid = h.grid();
    let n = grid.n();
    let values = DMatrix::from_fn(n, n, |i, _| h[i]);
    Tvir::new(grid, values, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{centered_cconv, sobolev_norm_sq};
    use crate::operator::{apply_dense, operator_spectrum};

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn kernel_ids_parse() {
        for id in KernelId::ALL {
            assert_eq!(id.name().parse::<KernelId>().unwrap(), id);
        }
        assert_eq!("worst-case".parse::<KernelId>().unwrap(), KernelId::WorstCase);
        assert!("blur".parse::<KernelId>().is_err());
    }

    #[test]
    fn gaussian_peak_and_symmetry() {
        let g = grid(256);
        let t = gaussian(g).unwrap();
        assert_eq!(t.kappa(), 0.6);
        // y = 0: sigma = 0.10
        let peak = t.get(128, 128);
        assert!((peak - 1.0 / ((2.0 * PI).sqrt() * 0.10)).abs() < 1e-12);
        assert!((peak - 3.98942).abs() < 1e-5);
        for i in 1..256 {
            for j in (0..256).step_by(17) {
                assert_eq!(t.get(i, j), t.get(256 - i, j));
            }
        }
        // offsets beyond three standard deviations are exact zeros
        assert_eq!(t.get(128 + 77, 128), 0.0);
        assert!(t.get(128 + 76, 128) > 0.0);
    }

    #[test]
    fn gaussian_rows_have_stable_sobolev_norm() {
        let sup = |n: usize| {
            let t = gaussian(grid(n)).unwrap();
            (0..n)
                .map(|i| sobolev_norm_sq(&t.row(i), 3))
                .fold(0.0_f64, f64::max)
        };
        let a = sup(256);
        let b = sup(512);
        assert!(a.is_finite() && b.is_finite());
        assert!((b / a - 1.0).abs() < 0.05, "{a} vs {b}");
    }

    #[test]
    fn hat_values_and_support() {
        let g = grid(256);
        let t = hat(g).unwrap();
        assert_eq!(t.kappa(), 0.4);
        assert!((t.get(128, 128) - 5.0).abs() < 1e-12);
        for j in 0..256 {
            let area: f64 = t.column(j).values().iter().sum::<f64>() / 256.0;
            assert!((area - 1.0).abs() <= 2.0 / 256.0, "column {j}: {area}");
            let sigma = hat_width(g.coord(j));
            for i in 0..256 {
                let inside = g.coord(i).abs() <= sigma / 2.0;
                // the endpoints of the hat are zeros of the formula itself
                if g.coord(i).abs() < sigma / 2.0 {
                    assert!(t.get(i, j) > 0.0);
                }
                if !inside {
                    assert_eq!(t.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn piecewise_is_rank_two() {
        let g = grid(256);
        let t = piecewise(g).unwrap();
        assert!((t.get(128, 128) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((t.get(128, 128) - 0.39894).abs() < 1e-5);
        let sv = operator_spectrum(&t);
        assert_eq!(sv.iter().filter(|s| **s > 1e-10 * sv[0]).count(), 2);
        // y = -0.3 and y = 0.3 fall in the same branch
        let a = t.column(g.nearest_index(-0.3));
        let b = t.column(g.nearest_index(0.3));
        assert_eq!(a, b);
    }

    #[test]
    fn worst_case_full_support_spectrum_is_analytic() {
        let g = grid(128);
        let t = worst_case(g, 1, 0.1, 1.0).unwrap();
        let sv = operator_spectrum(&t);
        let w = worst_case_weights(1, 0.1, 63);
        for k in 0..(128 / 8) {
            for s in [sv[2 * k], sv[2 * k + 1]] {
                assert!((s - w[k]).abs() <= 1e-6 * w[k], "k={} {} vs {}", k + 1, s, w[k]);
            }
        }
    }

    #[test]
    fn worst_case_full_support_kernel_is_rank_one() {
        use crate::operator::tvir_to_kernel;
        let g = grid(64);
        let t = worst_case(g, 1, 0.1, 1.0).unwrap();
        let k = tvir_to_kernel(&t);
        let sv = (k.values() / 64.0).singular_values();
        let max = sv.max();
        assert_eq!(sv.iter().filter(|s| **s > 1e-10 * max).count(), 1);
    }

    #[test]
    fn worst_case_compact_support() {
        let g = grid(64);
        let t = worst_case(g, 2, 0.5, 0.25).unwrap();
        for i in 0..64 {
            if g.coord(i).abs() > 0.125 {
                assert!(t.row(i).values().iter().all(|v| *v == 0.0));
            }
        }
        assert!(t.get(32, 0) != 0.0);
        assert!(worst_case(g, 0, 0.1, 1.0).is_err());
        assert!(worst_case(g, 1, 0.0, 1.0).is_err());
        assert!(worst_case(g, 1, 0.1, 1.5).is_err());
    }

    #[test]
    fn pure_conv_applies_as_a_convolution() {
        let g = grid(64);
        let t = KernelId::PureConv.build(g).unwrap();
        let h = t.column(0);
        for j in 0..64 {
            assert_eq!(t.column(j), h);
        }
        let u = Signal::from_fn(g, |x| (6.0 * x).sin() + x * x);
        let dense = apply_dense(&t, &u).unwrap();
        let conv = centered_cconv(&h, &u).unwrap().scaled(1.0 / 64.0);
        for i in 0..64 {
            assert!((dense[i] - conv[i]).abs() < 1e-13);
        }
        let wide = Signal::constant(g, 1.0);
        assert!(pure_conv(&wide, 0.3).is_err());
    }

    #[test]
    fn gallery_spectra_sorted() {
        for id in KernelId::ALL {
            let t = id.build(grid(64)).unwrap();
            let sv = operator_spectrum(&t);
            assert!(sv.windows(2).all(|w| w[0] >= w[1]), "{id}");
        }
    }
}
