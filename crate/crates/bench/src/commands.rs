use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use convprod::approx::Method;
use convprod::gallery::KernelId;
use convprod::{apply_dense, hs_distance, operator_spectrum, Expansion, Grid, Signal, Tvir};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};
use crate::fmt17;
use crate::slope::fit_slope;

/// An expansion plus the number of reals its method actually stores.
#[derive(Debug, Clone)]
pub struct Built {
    pub expansion: Expansion,
    /// Equals `expansion.storage_count()` except for `meyer`, which keeps
    /// only its `m × m` coefficient block.
    pub storage: usize,
    pub alpha: usize,
}

/// Runs `method` at order `m`; `alpha` defaults to the method's choice for
/// the smoothness recorded on `t`.
pub fn build(t: &Tvir, method: Method, m: usize, alpha: Option<usize>) -> Result<Built> {
    let alpha = alpha.unwrap_or_else(|| method.default_alpha(t.s_hint()));
    let expansion = method.expand(t, m, alpha)?;
    let storage = match method {
        Method::Meyer => m * m,
        _ => expansion.storage_count(),
    };
    Ok(Built {
        expansion,
        storage,
        alpha,
    })
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of ascii fields"))
}

fn kernel_on(kernel: KernelId, n: usize) -> Result<Tvir> {
    Ok(kernel.build(Grid::new(n)?)?)
}

/// `index,sigma`: the operator spectrum, nonincreasing, `n` rows.
pub fn spectrum(kernel: KernelId, n: usize) -> Result<String> {
    let sigma = operator_spectrum(&kernel_on(kernel, n)?);
    table(
        &["index", "sigma"],
        sigma.iter().enumerate().map(|(i, s)| vec![i.to_string(), fmt17(*s)]),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub m: usize,
    pub error: f64,
    pub flops: f64,
    pub storage: usize,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub kernel: KernelId,
    pub method: Method,
    pub alpha: usize,
    pub rows: Vec<RateRow>,
    /// `None` when fewer than two rows have error above `1e-12`.
    pub slope: Option<f64>,
}

impl RateReport {
    pub fn to_csv(&self) -> Result<String> {
        table(
            &["m", "error", "flops", "storage", "time_ms"],
            self.rows.iter().map(|r| {
                vec![
                    r.m.to_string(),
                    fmt17(r.error),
                    fmt17(r.flops),
                    r.storage.to_string(),
                    fmt17(r.time_ms),
                ]
            }),
        )
    }
}

fn check_increasing(ms: &[usize]) -> Result<()> {
    if ms.is_empty() {
        return Err(BenchError::precondition("empty m list"));
    }
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::precondition(format!(
            "m list {ms:?} must be strictly increasing"
        )));
    }
    Ok(())
}

/// Approximation error, cost and construction time of `method` for each
/// order in `ms`.
pub fn rate(
    kernel: KernelId,
    method: Method,
    ms: &[usize],
    n: usize,
    alpha: Option<usize>,
) -> Result<RateReport> {
    check_increasing(ms)?;
    let t = kernel_on(kernel, n)?;
    let mut rows = Vec::with_capacity(ms.len());
    let mut used_alpha = 0;
    for &m in ms {
        let start = Instant::now();
        let built = build(&t, method, m, alpha)?;
        let time_ms = start.elapsed().as_secs_f64() * 1e3;
        used_alpha = built.alpha;
        rows.push(RateRow {
            m,
            error: hs_distance(&built.expansion.materialize(), &t)?,
            flops: built.expansion.flop_estimate(),
            storage: built.storage,
            time_ms,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.error)).collect();
    Ok(RateReport {
        kernel,
        method,
        alpha: used_alpha,
        rows,
        slope: fit_slope(&pts).ok(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub m: usize,
    pub method: Method,
    pub terms: usize,
    pub error: f64,
    pub flops: f64,
    pub storage: usize,
}

/// Every method at every order. The `terms` column gives the number of
/// terms, which differs from `m` for `fourier`. Methods whose
/// preconditions reject an order are left out of that row group.
pub fn compare(kernel: KernelId, ms: &[usize], n: usize) -> Result<Vec<CompareRow>> {
    check_increasing(ms)?;
    let t = kernel_on(kernel, n)?;
    let mut out = Vec::new();
    for &m in ms {
        for method in Method::ALL {
            let Ok(built) = build(&t, method, m, None) else {
                continue;
            };
            out.push(CompareRow {
                m,
                method,
                terms: built.expansion.len(),
                error: hs_distance(&built.expansion.materialize(), &t)?,
                flops: built.expansion.flop_estimate(),
                storage: built.storage,
            });
        }
    }
    Ok(out)
}

pub fn compare_csv(rows: &[CompareRow]) -> Result<String> {
    table(
        &["m", "method", "terms", "error", "flops", "storage"],
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.method.to_string(),
                r.terms.to_string(),
                fmt17(r.error),
                fmt17(r.flops),
                r.storage.to_string(),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    pub dense_ms: f64,
    pub fast_ms: f64,
    pub flop_estimate: f64,
}

/// Best-of-several wall time of `f` in milliseconds.
fn time_ms(mut f: impl FnMut()) -> f64 {
    f();
    let mut best = f64::INFINITY;
    let budget = Instant::now();
    let mut reps = 0;
    while reps < 3 || (reps < 50 && budget.elapsed().as_secs_f64() < 0.2) {
        let start = Instant::now();
        f();
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        reps += 1;
    }
    best
}

fn rel_l2(a: &Signal, b: &Signal) -> f64 {
    let d = a.sub(b).expect("same grid").l2_norm();
    let scale = b.l2_norm();
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

/// Dense versus expansion apply on a random input for each grid size.
/// Fails before timing anything if the two disagree beyond `1e-10`.
pub fn timing(
    kernel: KernelId,
    method: Method,
    m: usize,
    ns: &[usize],
    alpha: Option<usize>,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let t = kernel_on(kernel, n)?;
        let e = build(&t, method, m, alpha)?.expansion;
        let dense = e.materialize();
        let grid = t.grid();
        let u = Signal::new(grid, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let fast_out = e.apply(&u)?;
        let dense_out = apply_dense(&dense, &u)?;
        let err = rel_l2(&fast_out, &dense_out);
        if err.is_nan() || err > 1e-10 {
            return Err(BenchError::precondition(format!(
                "fast and dense apply disagree at n = {n}: relative error {err:e}"
            )));
        }
        let fast_ms = time_ms(|| {
            black_box(e.apply(black_box(&u)).expect("checked above"));
        });
        let dense_ms = time_ms(|| {
            black_box(apply_dense(black_box(&dense), black_box(&u)).expect("checked above"));
        });
        rows.push(TimingRow {
            n,
            dense_ms,
            fast_ms,
            flop_estimate: e.flop_estimate(),
        });
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> Result<String> {
    table(
        &["n", "dense_ms", "fast_ms", "flop_estimate"],
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt17(r.dense_ms),
                fmt17(r.fast_ms),
                fmt17(r.flop_estimate),
            ]
        }),
    )
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_rows_sorted() {
        let csv = spectrum(KernelId::Hat, 64).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,sigma");
        assert_eq!(lines.len(), 65);
        let sig: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(sig.windows(2).all(|w| w[0] >= w[1]));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn meyer_storage_is_block() {
        let t = KernelId::Gaussian.build(Grid::new(64).unwrap()).unwrap();
        let b = build(&t, Method::Meyer, 8, None).unwrap();
        assert_eq!(b.storage, 64);
        assert_eq!(b.alpha, 2);
        assert_eq!(build(&t, Method::Spline, 8, None).unwrap().alpha, 1);
    }

    #[test]
    fn rate_rejects_unsorted_orders() {
        assert!(rate(KernelId::Hat, Method::Svd, &[8, 4], 64, None).is_err());
        assert!(rate(KernelId::Hat, Method::Svd, &[], 64, None).is_err());
        assert!(rate(KernelId::Hat, Method::Svd, &[4, 4], 64, None).is_err());
    }

    #[test]
    fn complete_order_has_no_slope() {
        let r = rate(KernelId::Gaussian, Method::Svd, &[128], 128, None).unwrap();
        assert!(r.rows[0].error <= 1e-9);
        assert_eq!(r.slope, None);
    }

    #[test]
    fn timing_flops_match_formula() {
        let rows = timing(KernelId::Hat, Method::Spline, 8, &[256], None, 1).unwrap();
        let t = KernelId::Hat.build(Grid::new(256).unwrap()).unwrap();
        let e = build(&t, Method::Spline, 8, None).unwrap().expansion;
        assert_eq!(rows[0].flop_estimate, e.flop_estimate());
        assert!(rows[0].fast_ms > 0.0 && rows[0].dense_ms > 0.0);
    }

    #[test]
    fn flops_roughly_double_with_n() {
        let ns = [512, 1024, 2048, 4096];
        let flops: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let t = KernelId::Hat.build(Grid::new(n).unwrap()).unwrap();
                build(&t, Method::Spline, 16, None).unwrap().expansion.flop_estimate()
            })
            .collect();
        for w in flops.windows(2) {
            let r = w[1] / w[0];
            assert!((1.8..=2.4).contains(&r), "{r}");
        }
    }
}
