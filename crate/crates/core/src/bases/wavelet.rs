//! Periodized Daubechies wavelets: filter bank transform in 1D and its
//! separable 2D extension.
//!
//! Coefficients are laid out coarse to fine: the scaling block of length
//! `n / 2^J` comes first, followed by the wavelet blocks of lengths
//! `n / 2^J, ..., n/4, n/2`. With the full depth `J = log2 n` the first `m`
//! coefficients (for `m` a power of two) span exactly the scaling space of
//! resolution `m`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signal::{Grid, Signal};

/// Daubechies low-pass filters with `alpha = 1..=8` vanishing moments,
/// normalized so that `Σ h = √2`.
#[allow(clippy::excessive_precision, clippy::approx_constant)]
const DAUBECHIES: [&[f64]; 8] = [
    &[0.70710678118654752440, 0.70710678118654752440],
    &[
        0.48296291314453414337,
        0.83651630373780790558,
        0.22414386804201338103,
        -0.12940952255126038117,
    ],
    &[
        0.33267055295008261600,
        0.80689150931109257649,
        0.45987750211849157010,
        -0.13501102001025458870,
        -0.085441273882026661693,
        0.035226291885709536603,
    ],
    &[
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.027983769416859854211,
        -0.18703481171909308408,
        0.030841381835560763627,
        0.032883011666885199735,
        -0.010597401785069032105,
    ],
    &[
        0.16010239797419291448,
        0.60382926979718967054,
        0.72430852843777292773,
        0.13842814590132073151,
        -0.24229488706638203186,
        -0.032244869584638374648,
        0.077571493840045713523,
        -0.0062414902127982742742,
        -0.012580751999081999469,
        0.0033357252854737712780,
    ],
    &[
        0.11154074335010946362,
        0.49462389039845308568,
        0.75113390802109535068,
        0.31525035170919762909,
        -0.22626469396543982008,
        -0.12976686756726193556,
        0.097501605587323049102,
        0.027522865530305728626,
        -0.031582039317486029565,
        0.00055384220116149613925,
        0.0047772575109455106396,
        -0.0010773010853084795649,
    ],
    &[
        0.077852054085009179020,
        0.39653931948191730654,
        0.72913209084623511992,
        0.46978228740519312247,
        -0.14390600392856497541,
        -0.22403618499387498264,
        0.071309219266830264751,
        0.080612609151083071913,
        -0.038029936935014413580,
        -0.016574541630666880654,
        0.012550998556099840613,
        0.00042957797292136652113,
        -0.0018016407040474909153,
        0.00035371379997452024845,
    ],
    &[
        0.054415842243104009955,
        0.31287159091429997066,
        0.67563073629728980681,
        0.58535468365420671277,
        -0.015829105256349305667,
        -0.28401554296154692652,
        0.00047248457391328277036,
        0.12874742662047845886,
        -0.017369301001807546170,
        -0.044088253930794751507,
        0.013981027917398281649,
        0.0087460940474057767164,
        -0.0048703529934515743104,
        -0.00039174037337694704630,
        0.00067544940645056936637,
        -0.00011747678412476953373,
    ],
];

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    alpha: usize,
    levels: u32,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletSpec {
    /// Daubechies wavelet with `alpha` vanishing moments (filter length
    /// `2 alpha`) and `levels` decomposition steps.
    pub fn new(alpha: usize, levels: u32) -> Result<Self> {
        if !(1..=DAUBECHIES.len()).contains(&alpha) {
            return Err(Error::invalid(format!(
                "alpha = {alpha}: Daubechies filters available for 1..=8"
            )));
        }
        let lowpass = DAUBECHIES[alpha - 1].to_vec();
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        Ok(WaveletSpec {
            alpha,
            levels,
            lowpass,
            highpass,
        })
    }

    /// Full-depth decomposition on `grid`.
    pub fn full(alpha: usize, grid: Grid) -> Result<Self> {
        WaveletSpec::new(alpha, grid.log2())
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    fn check(&self, n: usize) -> Result<()> {
        let max = n.trailing_zeros();
        if self.levels > max {
            return Err(Error::invalid(format!(
                "{} levels requested, at most {max} fit n = {n}",
                self.levels
            )));
        }
        Ok(())
    }

    /// One analysis step on `a` (even length): writes approximation then
    /// detail coefficients into `out`.
    fn analyze(&self, a: &[f64], out: &mut [f64]) {
        let len = a.len();
        let half = len / 2;
        for l in 0..half {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for (k, (h, g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                let x = a[(2 * l + k) % len];
                lo += h * x;
                hi += g * x;
            }
            out[l] = lo;
            out[half + l] = hi;
        }
    }

    /// Inverse of [`Self::analyze`].
    fn synthesize(&self, coeffs: &[f64], out: &mut [f64]) {
        let len = coeffs.len();
        let half = len / 2;
        out.iter_mut().for_each(|v| *v = 0.0);
        for l in 0..half {
            let lo = coeffs[l];
            let hi = coeffs[half + l];
            for (k, (h, g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                out[(2 * l + k) % len] += h * lo + g * hi;
            }
        }
    }

    /// Forward transform of a raw slice (length a power of two).
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        self.check(n)?;
        let mut data = x.to_vec();
        let mut scratch = vec![0.0; n];
        let mut len = n;
        for _ in 0..self.levels {
            self.analyze(&data[..len], &mut scratch[..len]);
            data[..len].copy_from_slice(&scratch[..len]);
            len /= 2;
        }
        Ok(data)
    }

    /// Inverse transform of a raw slice.
    pub fn inverse(&self, c: &[f64]) -> Result<Vec<f64>> {
        let n = c.len();
        self.check(n)?;
        let mut data = c.to_vec();
        let mut scratch = vec![0.0; n];
        let mut len = n >> self.levels;
        for _ in 0..self.levels {
            len *= 2;
            self.synthesize(&data[..len], &mut scratch[..len]);
            data[..len].copy_from_slice(&scratch[..len]);
        }
        Ok(data)
    }
}

/// Which atom a coefficient index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomIndex {
    /// Scaling function at the coarsest level, `shift < n / 2^J`.
    Scaling { shift: usize },
    /// Wavelet of resolution `2^level` (block size), `shift < 2^level`.
    Wavelet { level: u32, shift: usize },
}

impl AtomIndex {
    pub fn position(&self, spec: &WaveletSpec, grid: Grid) -> Result<usize> {
        let coarse = grid.log2().checked_sub(spec.levels).ok_or_else(|| {
            Error::invalid(format!("{} levels exceed grid depth", spec.levels))
        })?;
        let scaling_len = 1usize << coarse;
        match *self {
            AtomIndex::Scaling { shift } if shift < scaling_len => Ok(shift),
            AtomIndex::Wavelet { level, shift }
                if level >= coarse && level < grid.log2() && shift < (1 << level) =>
            {
                Ok((1 << level) + shift)
            }
            other => Err(Error::invalid(format!("no atom {other:?} on this grid"))),
        }
    }

    pub fn from_position(pos: usize, spec: &WaveletSpec, grid: Grid) -> AtomIndex {
        let coarse = grid.log2() - spec.levels;
        if pos < (1 << coarse) {
            AtomIndex::Scaling { shift: pos }
        } else {
            let level = usize::BITS - 1 - pos.leading_zeros();
            AtomIndex::Wavelet {
                level,
                shift: pos - (1 << level),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoeffs {
    grid: Grid,
    values: Vec<f64>,
}

impl WaveletCoeffs {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch {
                expected: grid.n(),
                found: values.len(),
            });
        }
        Ok(WaveletCoeffs { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Index range of the wavelet block with `2^level` coefficients.
    pub fn band(level: u32) -> std::ops::Range<usize> {
        (1 << level)..(2 << level)
    }
}

pub fn dwt(u: &Signal, spec: &WaveletSpec) -> Result<WaveletCoeffs> {
    Ok(WaveletCoeffs {
        grid: u.grid(),
        values: spec.forward(u.values())?,
    })
}

pub fn idwt(c: &WaveletCoeffs, spec: &WaveletSpec) -> Result<Signal> {
    Ok(Signal::from_vec_unchecked(c.grid, spec.inverse(&c.values)?))
}

/// Atom at coefficient position `pos`, scaled by `√n` so that atoms are
/// orthonormal under the quadrature dot product.
pub fn atom_at(spec: &WaveletSpec, grid: Grid, pos: usize) -> Result<Signal> {
    let n = grid.n();
    if pos >= n {
        return Err(Error::invalid(format!("atom position {pos} >= n = {n}")));
    }
    let mut e = vec![0.0; n];
    e[pos] = (n as f64).sqrt();
    Ok(Signal::from_vec_unchecked(grid, spec.inverse(&e)?))
}

pub fn wavelet_atom(spec: &WaveletSpec, index: AtomIndex, grid: Grid) -> Result<Signal> {
    atom_at(spec, grid, index.position(spec, grid)?)
}

/// Separable transform: every row, then every column.
pub fn dwt2(values: &DMatrix<f64>, spec: &WaveletSpec) -> Result<DMatrix<f64>> {
    transform2(values, |x| spec.forward(x))
}

pub fn idwt2(coeffs: &DMatrix<f64>, spec: &WaveletSpec) -> Result<DMatrix<f64>> {
    transform2(coeffs, |x| spec.inverse(x))
}

fn transform2(
    values: &DMatrix<f64>,
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<DMatrix<f64>> {
    let (r, c) = values.shape();
    let mut out = values.clone();
    for i in 0..r {
        let row: Vec<f64> = out.row(i).iter().copied().collect();
        let t = f(&row)?;
        for (j, v) in t.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    for j in 0..c {
        let t = f(out.column(j).as_slice())?;
        out.column_mut(j).copy_from_slice(&t);
    }
    Ok(out)
}
