//! Centered circular convolution, its adjoint, overlap-add sectioning and
//! the Fourier-series transforms on the grid.
//!
//! Index convention: `(f ⊛ g)[a] = Σ_j f[(a - j + n/2) mod n] g[j]`, so the
//! sample of `f` at the origin (index `n/2`) acts as the identity tap.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::{Signal, Spectrum, Support};

/// Below this length the short factor is convolved directly.
const DIRECT_MAX: usize = 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Plain circular convolution `out[a] = Σ_j x[(a - j) mod n] y[j]` via FFT.
fn circular_conv(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let fwd = plan_forward(n);
    let inv = plan_inverse(n);
    let mut xs = to_complex(x);
    let mut ys = to_complex(y);
    fwd.process(&mut xs);
    fwd.process(&mut ys);
    for (a, b) in xs.iter_mut().zip(&ys) {
        *a *= b;
    }
    inv.process(&mut xs);
    let scale = 1.0 / n as f64;
    xs.iter().map(|c| c.re * scale).collect()
}

fn direct_linear_conv(x: &[f64], y: &[f64], out: &mut [f64]) {
    for (i, &a) in x.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
}

/// Linear convolution of `short` against `long`, sectioning `long` into
/// blocks so every FFT has length about `2 * short.len()`.
fn overlap_add_linear(short: &[f64], long: &[f64]) -> Vec<f64> {
    let q = short.len();
    let p = long.len();
    let mut out = vec![0.0; p + q - 1];
    if q <= DIRECT_MAX {
        direct_linear_conv(short, long, &mut out);
        return out;
    }
    let size = (2 * q).next_power_of_two();
    let block = size - q + 1;
    let fwd = plan_forward(size);
    let inv = plan_inverse(size);

    let mut kernel = vec![Complex64::new(0.0, 0.0); size];
    for (k, &v) in kernel.iter_mut().zip(short) {
        k.re = v;
    }
    fwd.process(&mut kernel);

    let scale = 1.0 / size as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    let mut offset = 0;
    while offset < p {
        let take = block.min(p - offset);
        for (i, b) in buf.iter_mut().enumerate() {
            *b = if i < take {
                Complex64::new(long[offset + i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&kernel) {
            *b *= k;
        }
        inv.process(&mut buf);
        let valid = (take + q - 1).min(out.len() - offset);
        for i in 0..valid {
            out[offset + i] += buf[i].re * scale;
        }
        offset += take;
    }
    out
}

fn gather(values: &[f64], sup: Support) -> Vec<f64> {
    let n = values.len();
    sup.indices(n).map(|i| values[i]).collect()
}

/// Plain circular convolution of `x` and `y` whose nonzeros lie in the given
/// circular intervals. Work scales with `(p + q) log(min(p, q))`.
fn supported_circular_conv(x: &[f64], xs: Support, y: &[f64], ys: Support) -> Vec<f64> {
    let n = x.len();
    if xs.is_empty() || ys.is_empty() {
        return vec![0.0; n];
    }
    let short_len = xs.len.min(ys.len);
    if short_len > DIRECT_MAX && 2 * short_len >= n {
        return circular_conv(x, y);
    }
    let xv = gather(x, xs);
    let yv = gather(y, ys);
    let lin = if xv.len() <= yv.len() {
        overlap_add_linear(&xv, &yv)
    } else {
        overlap_add_linear(&yv, &xv)
    };
    let mut out = vec![0.0; n];
    let start = (xs.start + ys.start) % n;
    for (k, v) in lin.into_iter().enumerate() {
        out[(start + k) % n] += v;
    }
    out
}

/// `f'[i] = f[(i + n/2) mod n]`, turning the centered product into a plain
/// circular one.
fn recentre(f: &[f64], sup: Support) -> (Vec<f64>, Support) {
    let n = f.len();
    let c = n / 2;
    let rotated = (0..n).map(|i| f[(i + c) % n]).collect();
    let start = (sup.start + n - c) % n;
    (rotated, Support { start, len: sup.len })
}

/// `out[i] = f[(n - i) mod n]`. Turns ⊛ into its adjoint.
fn reflect(f: &[f64], sup: Support) -> (Vec<f64>, Support) {
    let n = f.len();
    let reflected = (0..n).map(|i| f[(n - i) % n]).collect();
    let start = if sup.is_empty() {
        0
    } else {
        (2 * n - sup.start - sup.len + 1) % n
    };
    (reflected, Support { start, len: sup.len })
}

/// Centered circular convolution `f ⊛ g`.
pub fn centered_cconv(f: &Signal, g: &Signal) -> Result<Signal> {
    f.grid().ensure_same(&g.grid())?;
    let n = f.len();
    sectioned_cconv(f, Support::full(n), g, Support::full(n))
}

/// Adjoint of `g ↦ f ⊛ g` under the plain dot product:
/// `out[j] = Σ_a f[(a - j + n/2) mod n] v[a]`.
pub fn centered_ccorr(f: &Signal, v: &Signal) -> Result<Signal> {
    f.grid().ensure_same(&v.grid())?;
    let n = f.len();
    sectioned_ccorr(f, Support::full(n), v, Support::full(n))
}

/// Overlap-add evaluation of `f ⊛ g` for `f` supported on `q` samples and
/// `g` on `p` samples. The supports are located by scanning; a nonzero
/// spread wider than the declared length is a contract error.
pub fn overlap_add_cconv(f: &Signal, g: &Signal, q: usize, p: usize) -> Result<Signal> {
    f.grid().ensure_same(&g.grid())?;
    let fs = f.support();
    let gs = g.support();
    if fs.len > q {
        return Err(Error::contract(format!(
            "filter spans {} samples, declared support {q}",
            fs.len
        )));
    }
    if gs.len > p {
        return Err(Error::contract(format!(
            "signal spans {} samples, declared support {p}",
            gs.len
        )));
    }
    sectioned_cconv(f, fs, g, gs)
}

/// `f ⊛ g` with caller-supplied supports (trusted; checked in debug builds).
pub fn sectioned_cconv(f: &Signal, fs: Support, g: &Signal, gs: Support) -> Result<Signal> {
    f.grid().ensure_same(&g.grid())?;
    debug_assert!(fs.check_contains(f.values()).is_ok());
    debug_assert!(gs.check_contains(g.values()).is_ok());
    let (fr, frs) = recentre(f.values(), fs);
    let out = supported_circular_conv(&fr, frs, g.values(), gs);
    Ok(Signal::from_vec_unchecked(f.grid(), out))
}

/// Adjoint counterpart of [`sectioned_cconv`].
pub fn sectioned_ccorr(f: &Signal, fs: Support, v: &Signal, vs: Support) -> Result<Signal> {
    f.grid().ensure_same(&v.grid())?;
    let (fl, fls) = reflect(f.values(), fs);
    let (fr, frs) = recentre(&fl, fls);
    let out = supported_circular_conv(&fr, frs, v.values(), vs);
    Ok(Signal::from_vec_unchecked(f.grid(), out))
}

/// Fourier-series coefficients `û[k] = (1/n) Σ_j u[j] exp(-2iπ k t_j)`.
pub fn dft(u: &Signal) -> Spectrum {
    let grid = u.grid();
    let n = grid.n();
    let mut buf = to_complex(u.values());
    plan_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let half = grid.half() as i64;
    let coeffs = (-half..half)
        .map(|k| {
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[k.rem_euclid(n as i64) as usize] * (sign * scale)
        })
        .collect();
    Spectrum::new(grid, coeffs).expect("length matches grid")
}

/// Inverse of [`dft`]; the imaginary part of the synthesis is dropped.
pub fn idft(spec: &Spectrum) -> Signal {
    let grid = spec.grid();
    let n = grid.n();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in spec.iter() {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[k.rem_euclid(n as i64) as usize] = c * sign;
    }
    plan_inverse(n).process(&mut buf);
    Signal::from_vec_unchecked(grid, buf.iter().map(|c| c.re).collect())
}

/// `Σ_k |û[k]|² (1 + k²)^s`.
pub fn sobolev_norm_sq(u: &Signal, s: u32) -> f64 {
    dft(u)
        .iter()
        .map(|(k, c)| c.norm_sqr() * (1.0 + (k * k) as f64).powi(s as i32))
        .sum()
}

/// Unnormalized forward FFT of any length.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

/// Unnormalized inverse FFT of any length.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
}

#[cfg(test)]
/// Direct evaluation of the transform, `O(n)` per frequency.
pub(crate) fn dft_at(values: &[f64], grid: crate::signal::Grid, k: i64) -> Complex64 {
    let n = grid.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &v) in values.iter().enumerate() {
        let phase = -2.0 * std::f64::consts::PI * (k as f64) * grid.coord(j);
        acc += Complex64::from_polar(v, phase);
    }
    acc / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_cconv(f: &[f64], g: &[f64]) -> Vec<f64> {
        let n = f.len();
        (0..n)
            .map(|a| (0..n).map(|j| f[(a + n - j + n / 2) % n] * g[j]).sum())
            .collect()
    }

    fn brute_ccorr(f: &[f64], v: &[f64]) -> Vec<f64> {
        let n = f.len();
        (0..n)
            .map(|j| (0..n).map(|a| f[(a + n - j + n / 2) % n] * v[a]).sum())
            .collect()
    }

    fn random_signal(grid: Grid, rng: &mut ChaCha8Rng) -> Signal {
        Signal::new(grid, (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn random_supported(grid: Grid, len: usize, rng: &mut ChaCha8Rng) -> Signal {
        let n = grid.n();
        let start = rng.gen_range(0..n);
        let mut v = vec![0.0; n];
        for k in 0..len {
            v[(start + k) % n] = rng.gen_range(-1.0..1.0);
        }
        Signal::new(grid, v).unwrap()
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    #[test]
    fn cconv_small_worked_example() {
        let g4 = Grid::new(4).unwrap();
        let f = Signal::new(g4, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let g = Signal::new(g4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = brute_cconv(f.values(), g.values());
        assert_eq!(expected, vec![3.0, 4.0, 1.0, 2.0]);
        let out = centered_cconv(&f, &g).unwrap();
        assert!(rel_err(out.values(), &expected) < 1e-12);
    }

    #[test]
    fn cconv_identity_and_zero() {
        let grid = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_signal(grid, &mut rng);
        let delta = Signal::impulse(grid, 16);
        assert!(rel_err(centered_cconv(&delta, &g).unwrap().values(), g.values()) < 1e-12);
        let zero = Signal::zeros(grid);
        assert!(centered_cconv(&zero, &g).unwrap().values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn cconv_matches_brute_force_for_all_small_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [4, 8, 16, 32, 64] {
            let grid = Grid::new(n).unwrap();
            for _ in 0..100 {
                let f = random_signal(grid, &mut rng);
                let g = random_signal(grid, &mut rng);
                let out = centered_cconv(&f, &g).unwrap();
                assert!(rel_err(out.values(), &brute_cconv(f.values(), g.values())) < 1e-12);
            }
        }
    }

    #[test]
    fn ccorr_small_worked_example() {
        let g4 = Grid::new(4).unwrap();
        let f = Signal::new(g4, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = Signal::new(g4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = brute_ccorr(f.values(), v.values());
        assert_eq!(expected, vec![3.0, 4.0, 1.0, 2.0]);
        let out = centered_ccorr(&f, &v).unwrap();
        assert!(rel_err(out.values(), &expected) < 1e-12);
        let delta = Signal::impulse(g4, 2);
        assert!(rel_err(centered_ccorr(&delta, &v).unwrap().values(), v.values()) < 1e-12);
    }

    #[test]
    fn ccorr_is_adjoint_of_cconv() {
        let grid = Grid::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = random_signal(grid, &mut rng);
            let g = random_signal(grid, &mut rng);
            let v = random_signal(grid, &mut rng);
            let lhs = centered_cconv(&f, &g).unwrap().dot(&v).unwrap();
            let rhs = g.dot(&centered_ccorr(&f, &v).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            let brute = brute_ccorr(f.values(), v.values());
            assert!(rel_err(centered_ccorr(&f, &v).unwrap().values(), &brute) < 1e-12);
        }
    }

    #[test]
    fn overlap_add_full_support_matches() {
        let grid = Grid::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_signal(grid, &mut rng);
        let g = random_signal(grid, &mut rng);
        let a = overlap_add_cconv(&f, &g, 128, 128).unwrap();
        let b = centered_cconv(&f, &g).unwrap();
        assert!(rel_err(a.values(), b.values()) < 1e-12);
    }

    #[test]
    fn overlap_add_impulse_filter() {
        let grid = Grid::new(256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_supported(grid, 8, &mut rng);
        let delta = Signal::impulse(grid, 128);
        let out = overlap_add_cconv(&delta, &g, 1, 8).unwrap();
        assert!(rel_err(out.values(), g.values()) < 1e-12);
    }

    #[test]
    fn overlap_add_short_supports_match_oracle() {
        let grid = Grid::new(1024).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let f = random_supported(grid, 16, &mut rng);
            let g = random_supported(grid, 64, &mut rng);
            let a = overlap_add_cconv(&f, &g, 16, 64).unwrap();
            let b = brute_cconv(f.values(), g.values());
            assert!(rel_err(a.values(), &b) < 1e-12);
        }
    }

    #[test]
    fn overlap_add_rejects_undeclared_spread() {
        let grid = Grid::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_supported(grid, 10, &mut rng);
        let g = random_supported(grid, 10, &mut rng);
        assert!(matches!(overlap_add_cconv(&f, &g, 9, 10), Err(Error::Contract(_))));
        assert!(matches!(overlap_add_cconv(&f, &g, 10, 4), Err(Error::Contract(_))));
    }

    #[test]
    fn dft_constant_and_cosine() {
        let grid = Grid::new(16).unwrap();
        let spec = dft(&Signal::constant(grid, 2.5));
        for (k, c) in spec.iter() {
            let want = if k == 0 { 2.5 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14 && c.im.abs() < 1e-14);
        }
        let cos = Signal::from_fn(grid, |t| (2.0 * std::f64::consts::PI * t).cos());
        for (k, c) in dft(&cos).iter() {
            let want = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14 && c.im.abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn dft_matches_direct_sum_and_inverts() {
        let grid = Grid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_signal(grid, &mut rng);
        let spec = dft(&u);
        for (k, c) in spec.iter() {
            assert!((c - dft_at(u.values(), grid, k)).norm() < 1e-12);
        }
        assert!(rel_err(idft(&spec).values(), u.values()) < 1e-12);
        let parseval: f64 = spec.iter().map(|(_, c)| c.norm_sqr()).sum();
        assert!((parseval - u.quad_norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn real_signal_spectrum_is_conjugate_symmetric() {
        let grid = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = dft(&random_signal(grid, &mut rng));
        for k in 1..16 {
            assert!((spec.get(-k) - spec.get(k).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn sobolev_examples() {
        let grid = Grid::new(64).unwrap();
        assert!((sobolev_norm_sq(&Signal::constant(grid, 3.0), 2) - 9.0).abs() < 1e-12);
        let cos = Signal::from_fn(grid, |t| (2.0 * std::f64::consts::PI * t).cos());
        assert!((sobolev_norm_sq(&cos, 1) - 1.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = random_signal(grid, &mut rng);
        let direct: f64 = (-32..32)
            .map(|k: i64| dft_at(u.values(), grid, k).norm_sqr() * (1.0 + (k * k) as f64).powi(2))
            .sum();
        let got = sobolev_norm_sq(&u, 2);
        assert!((got - direct).abs() <= 1e-12 * direct);
        assert!((sobolev_norm_sq(&u, 0) - u.quad_norm().powi(2)).abs() < 1e-12);
    }
}
