use rustfft::num_complex::Complex64;

use crate::conv::dft;
use crate::error::{Error, Result};
use crate::operator::Tvir;
use crate::signal::Grid;

/// Kohn–Nirenberg symbol `N(x, k) = ∫ T(x, y) exp(-2iπky) dy`, one row per
/// offset, frequencies `-k_max..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnSymbol {
    grid: Grid,
    k_max: usize,
    // rows[i][k + k_max]
    rows: Vec<Vec<Complex64>>,
}

impl KnSymbol {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, i: usize, k: i64) -> Complex64 {
        let km = self.k_max as i64;
        if k.abs() > km {
            return Complex64::new(0.0, 0.0);
        }
        self.rows[i][(k + km) as usize]
    }
}

/// Up to `n/2` frequencies are accepted; `k = n/2` reuses the (real) Nyquist
/// coefficient of the grid.
pub fn kn_symbol(t: &Tvir, k_max: usize) -> Result<KnSymbol> {
    let grid = t.grid();
    if k_max > grid.half() {
        return Err(Error::invalid(format!(
            "k_max = {k_max} exceeds n/2 = {}",
            grid.half()
        )));
    }
    let km = k_max as i64;
    let zero = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
    let rows = (0..grid.n())
        .map(|i| {
            if t.values().row(i).iter().all(|v| *v == 0.0) {
                return zero.clone();
            }
            let spec = dft(&t.row(i));
            (-km..=km)
                .map(|k| {
                    if k.unsigned_abs() as usize == grid.half() {
                        spec.get(-(grid.half() as i64))
                    } else {
                        spec.get(k)
                    }
                })
                .collect()
        })
        .collect();
    Ok(KnSymbol { grid, k_max, rows })
}
