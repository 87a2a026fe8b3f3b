use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bases::wavelet::{atom_at, dwt2, idwt2};
use crate::bases::WaveletSpec;
use crate::error::{Error, Result};
use crate::expansion::{check_version, serialize_sig17, Expansion, Term, MANIFEST_VERSION};
use crate::operator::Tvir;
use crate::signal::{Grid, Signal};

/// Tensor-product wavelet representation
/// `T ≈ Σ_{λ<m1, μ<m2} c[λ][μ] ψ_λ(x) ψ_μ(y)`,
/// with atoms orthonormal under the quadrature product.
#[derive(Debug, Clone, PartialEq)]
pub struct MeyerRep {
    grid: Grid,
    alpha: usize,
    coeffs: DMatrix<f64>,
}

/// Keeps the coarsest `m1 × m2` block of the 2D wavelet coefficients.
pub fn meyer_expand(t: &Tvir, m1: usize, m2: usize, alpha: usize) -> Result<MeyerRep> {
    let grid = t.grid();
    let n = grid.n();
    for m in [m1, m2] {
        if !m.is_power_of_two() || m > n {
            return Err(Error::invalid(format!(
                "coefficient block side {m} must be a power of two at most {n}"
            )));
        }
    }
    let spec = WaveletSpec::full(alpha, grid)?;
    let d = dwt2(t.values(), &spec)?;
    let coeffs = d.view((0, 0), (m1, m2)) / n as f64;
    Ok(MeyerRep { grid, alpha, coeffs })
}

impl MeyerRep {
    pub fn new(grid: Grid, alpha: usize, coeffs: DMatrix<f64>) -> Result<Self> {
        let n = grid.n();
        let (m1, m2) = coeffs.shape();
        if !m1.is_power_of_two() || !m2.is_power_of_two() || m1 > n || m2 > n {
            return Err(Error::invalid(format!("coefficient block {m1}x{m2} does not fit n = {n}")));
        }
        if let Some(i) = coeffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        WaveletSpec::new(alpha, grid.log2())?;
        Ok(MeyerRep { grid, alpha, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn m1(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn m2(&self) -> usize {
        self.coeffs.ncols()
    }

    /// `c[λ][μ]`, row `λ` indexing atoms in `x`.
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn storage_count(&self) -> usize {
        self.coeffs.len()
    }

    fn spec(&self) -> WaveletSpec {
        WaveletSpec::full(self.alpha, self.grid).expect("alpha validated at construction")
    }

    pub fn materialize(&self) -> Tvir {
        let n = self.grid.n();
        let mut d = DMatrix::zeros(n, n);
        d.view_mut((0, 0), self.coeffs.shape())
            .copy_from(&(&self.coeffs * n as f64));
        let values = idwt2(&d, &self.spec()).expect("full-size block");
        Tvir::with_tight_kappa(self.grid, values).expect("finite coefficients")
    }

    /// Folds the `x` atoms into one filter per `y` atom:
    /// `h_μ = Σ_λ c[λ][μ] ψ_λ`, `w_μ = ψ_μ`.
    pub fn to_expansion(&self) -> Result<Expansion> {
        let n = self.grid.n();
        let spec = self.spec();
        let root_n = (n as f64).sqrt();
        let terms = (0..self.m2())
            .map(|mu| {
                let mut col = vec![0.0; n];
                for (l, c) in self.coeffs.column(mu).iter().enumerate() {
                    col[l] = c * root_n;
                }
                let h = Signal::new(self.grid, spec.inverse(&col)?)?;
                Term::new(h, atom_at(&spec, self.grid, mu)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Expansion::new(
            self.grid,
            terms,
            format!("meyer(m1={},m2={},alpha={})", self.m1(), self.m2(), self.alpha),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let manifest = MeyerManifest {
            version: MANIFEST_VERSION,
            n: self.grid.n(),
            alpha: self.alpha,
            m1: self.m1(),
            m2: self.m2(),
            coeffs: self.coeffs.transpose().as_slice().to_vec(),
        };
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::MalformedManifest(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let malformed = |e: &dyn std::fmt::Display| Error::MalformedManifest(e.to_string());
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| malformed(&e))?;
        check_version(&raw)?;
        let m: MeyerManifest = serde_json::from_value(raw).map_err(|e| malformed(&e))?;
        let grid = Grid::new(m.n).map_err(|e| malformed(&e))?;
        if m.coeffs.len() != m.m1 * m.m2 {
            return Err(Error::MalformedManifest(format!(
                "{}x{} block but {} coefficients",
                m.m1,
                m.m2,
                m.coeffs.len()
            )));
        }
        let coeffs = DMatrix::from_row_slice(m.m1, m.m2, &m.coeffs);
        MeyerRep::new(grid, m.alpha, coeffs).map_err(|e| malformed(&e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        MeyerRep::from_json(&fs::read_to_string(path)?)
    }
}

/// Applies the operator represented by `rep` to `u`.
pub fn meyer_apply(rep: &MeyerRep, u: &Signal) -> Result<Signal> {
    rep.to_expansion()?.apply(u)
}

#[derive(Serialize, Deserialize)]
struct MeyerManifest {
    version: u64,
    n: usize,
    alpha: usize,
    m1: usize,
    m2: usize,
    /// Row-major, `m1` rows of `m2`.
    #[serde(serialize_with = "serialize_sig17")]
    coeffs: Vec<f64>,
}
