//! The compressed operator `H_m u = (1/n) Σ_k h_k ⊛ (w_k ⊙ u)`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::conv::{sectioned_ccorr, sectioned_cconv};
use crate::error::{Error, Result};
use crate::operator::Tvir;
use crate::signal::{Grid, Signal, Support};

pub const MANIFEST_VERSION: u64 = 1;

/// One filter/window pair. The declared supports always contain every
/// nonzero sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    h: Signal,
    h_support: Support,
    w: Signal,
    w_support: Support,
}

impl Term {
    /// Builds a term with the tightest supports.
    pub fn new(h: Signal, w: Signal) -> Result<Self> {
        h.grid().ensure_same(&w.grid())?;
        let h_support = h.support();
        let w_support = w.support();
        Ok(Term {
            h,
            h_support,
            w,
            w_support,
        })
    }

    pub fn with_supports(h: Signal, h_support: Support, w: Signal, w_support: Support) -> Result<Self> {
        h.grid().ensure_same(&w.grid())?;
        let n = h.len();
        for s in [h_support, w_support] {
            Support::new(s.start, s.len, n)?;
        }
        h_support.check_contains(h.values())?;
        w_support.check_contains(w.values())?;
        Ok(Term {
            h,
            h_support,
            w,
            w_support,
        })
    }

    pub fn h(&self) -> &Signal {
        &self.h
    }

    pub fn w(&self) -> &Signal {
        &self.w
    }

    pub fn h_support(&self) -> Support {
        self.h_support
    }

    pub fn w_support(&self) -> Support {
        self.w_support
    }

    /// Filter support length `q`.
    pub fn q(&self) -> usize {
        self.h_support.len
    }

    /// Window support length `p`.
    pub fn p(&self) -> usize {
        self.w_support.len
    }

    /// `h ⊛ (w ⊙ u)`, without the `1/n` weight.
    fn convolve(&self, u: &Signal) -> Result<Signal> {
        let windowed = self.w.hadamard(u)?;
        sectioned_cconv(&self.h, self.h_support, &windowed, self.w_support)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    grid: Grid,
    terms: Vec<Term>,
    provenance: String,
}

impl Expansion {
    pub fn new(grid: Grid, terms: Vec<Term>, provenance: impl Into<String>) -> Result<Self> {
        for t in &terms {
            grid.ensure_same(&t.h.grid())?;
        }
        Ok(Expansion {
            grid,
            terms,
            provenance: provenance.into(),
        })
    }

    pub fn empty(grid: Grid) -> Self {
        Expansion {
            grid,
            terms: Vec::new(),
            provenance: "empty".into(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms `m`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// `(1/n) Σ_k h_k ⊛ (w_k ⊙ u)`, summed in term order.
    pub fn apply(&self, u: &Signal) -> Result<Signal> {
        self.grid.ensure_same(&u.grid())?;
        let n = self.grid.n();
        let mut acc = vec![0.0; n];
        for term in &self.terms {
            let part = term.convolve(u)?;
            for (a, v) in acc.iter_mut().zip(part.values()) {
                *a += v;
            }
        }
        let scale = 1.0 / n as f64;
        acc.iter_mut().for_each(|v| *v *= scale);
        Ok(Signal::from_vec_unchecked(self.grid, acc))
    }

    /// `(1/n) Σ_k w_k ⊙ corr(h_k, v)`.
    pub fn apply_adjoint(&self, v: &Signal) -> Result<Signal> {
        self.grid.ensure_same(&v.grid())?;
        let n = self.grid.n();
        let full = Support::full(n);
        let mut acc = vec![0.0; n];
        for term in &self.terms {
            let corr = sectioned_ccorr(&term.h, term.h_support, v, full)?;
            for i in term.w_support.indices(n) {
                acc[i] += term.w[i] * corr[i];
            }
        }
        let scale = 1.0 / n as f64;
        acc.iter_mut().for_each(|v| *v *= scale);
        Ok(Signal::from_vec_unchecked(self.grid, acc))
    }

    /// The TVIR `T_m(x, y) = Σ_k h_k(x) w_k(y)`.
    pub fn materialize(&self) -> Tvir {
        let n = self.grid.n();
        let mut values = DMatrix::zeros(n, n);
        for term in &self.terms {
            let rows: Vec<usize> = term.h_support.indices(n).collect();
            for j in term.w_support.indices(n) {
                let wj = term.w[j];
                if wj == 0.0 {
                    continue;
                }
                for &i in &rows {
                    values[(i, j)] += term.h[i] * wj;
                }
            }
        }
        Tvir::with_tight_kappa(self.grid, values).expect("finite products of finite samples")
    }

    /// Operation count model `Σ_k (p_k + q_k) log2(min(p_k, q_k) + 1)`.
    pub fn flop_estimate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (p, q) = (t.p() as f64, t.q() as f64);
                (p + q) * (p.min(q) + 1.0).log2()
            })
            .sum()
    }

    /// Stored reals: `Σ_k (p_k + q_k)`.
    pub fn storage_count(&self) -> usize {
        self.terms.iter().map(|t| t.p() + t.q()).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let manifest = Manifest {
            version: MANIFEST_VERSION,
            n: self.grid.n(),
            m: self.terms.len(),
            provenance: self.provenance.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermManifest {
                    h_support: [t.h_support.start, t.h_support.len],
                    h_values: t.h_support.indices(self.grid.n()).map(|i| t.h[i]).collect(),
                    w_support: [t.w_support.start, t.w_support.len],
                    w_values: t.w_support.indices(self.grid.n()).map(|i| t.w[i]).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::MalformedManifest(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedManifest(e.to_string()))?;
        check_version(&raw)?;
        let manifest: Manifest =
            serde_json::from_value(raw).map_err(|e| Error::MalformedManifest(e.to_string()))?;
        let grid = Grid::new(manifest.n).map_err(|e| Error::MalformedManifest(e.to_string()))?;
        if manifest.m != manifest.terms.len() {
            return Err(Error::MalformedManifest(format!(
                "m = {} but {} terms listed",
                manifest.m,
                manifest.terms.len()
            )));
        }
        let n = grid.n();
        let terms = manifest
            .terms
            .into_iter()
            .map(|t| {
                let (h, hs) = unpack(grid, t.h_support, &t.h_values)?;
                let (w, ws) = unpack(grid, t.w_support, &t.w_values)?;
                Term::with_supports(h, hs, w, ws)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::MalformedManifest(_) => e,
                other => Error::MalformedManifest(format!("{other} (n = {n})")),
            })?;
        Expansion::new(grid, terms, manifest.provenance)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Expansion::from_json(&fs::read_to_string(path)?)
    }
}

pub(crate) fn check_version(raw: &serde_json::Value) -> Result<()> {
    match raw.get("version").and_then(|v| v.as_u64()) {
        Some(MANIFEST_VERSION) => Ok(()),
        Some(found) => Err(Error::VersionMismatch {
            found,
            expected: MANIFEST_VERSION,
        }),
        None => Err(Error::MalformedManifest("missing integer 'version'".into())),
    }
}

fn unpack(grid: Grid, support: [usize; 2], values: &[f64]) -> Result<(Signal, Support)> {
    let n = grid.n();
    let sup = Support::new(support[0], support[1], n)
        .map_err(|e| Error::MalformedManifest(e.to_string()))?;
    if values.len() != sup.len {
        return Err(Error::MalformedManifest(format!(
            "support length {} but {} values",
            sup.len,
            values.len()
        )));
    }
    let mut full = vec![0.0; n];
    for (i, v) in sup.indices(n).zip(values) {
        full[i] = *v;
    }
    let sig = Signal::new(grid, full).map_err(|e| Error::MalformedManifest(e.to_string()))?;
    Ok((sig, sup))
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: u64,
    n: usize,
    m: usize,
    provenance: String,
    terms: Vec<TermManifest>,
}

#[derive(Serialize, Deserialize)]
struct TermManifest {
    h_support: [usize; 2],
    #[serde(serialize_with = "serialize_sig17")]
    h_values: Vec<f64>,
    w_support: [usize; 2],
    #[serde(serialize_with = "serialize_sig17")]
    w_values: Vec<f64>,
}

/// Formats a float with 17 significant digits.
pub(crate) fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a float array with 17 significant digits per entry.
pub(crate) fn serialize_sig17<S: serde::Serializer>(
    values: &[f64],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let body: Vec<String> = values.iter().map(|v| sig17(*v)).collect();
    let raw = RawValue::from_string(format!("[{}]", body.join(", "))).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}
