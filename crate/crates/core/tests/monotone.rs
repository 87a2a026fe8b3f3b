//! Approximation error never grows with the order, for any kernel.

use convprod::approx::{spline_expand, Method};
use convprod::gallery::KernelId;
use convprod::{hs_distance, Grid, Tvir};

const ORDERS: [usize; 5] = [4, 8, 16, 32, 64];

fn errors(t: &Tvir, method: Method) -> Vec<f64> {
    let alpha = method.default_alpha(t.s_hint());
    ORDERS
        .iter()
        .map(|&m| hs_distance(&method.expand(t, m, alpha).unwrap().materialize(), t).unwrap())
        .collect()
}

#[test]
fn error_nonincreasing_in_order() {
    let g = Grid::new(128).unwrap();
    let mut failures = Vec::new();
    for kernel in KernelId::ALL {
        let t = kernel.build(g).unwrap();
        for method in Method::ALL.into_iter().filter(|m| *m != Method::Als) {
            let errs = errors(&t, method);
            if errs.windows(2).any(|w| w[1] > w[0] + 1e-12) {
                failures.push(format!("{kernel} {method}: {errs:?}"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

/// ALS is a local method: a larger order can settle in a worse stationary
/// point than a smaller one. What holds at every order is dominance over
/// the B-spline start.
#[test]
fn als_dominates_its_start_at_every_order() {
    let g = Grid::new(128).unwrap();
    for kernel in KernelId::ALL {
        let t = kernel.build(g).unwrap();
        let als = errors(&t, Method::Als);
        for (m, e) in ORDERS.iter().zip(als) {
            let spline = hs_distance(&spline_expand(&t, *m, 1).unwrap().materialize(), &t).unwrap();
            assert!(e <= spline + 1e-12, "{kernel} m={m}: {e} > {spline}");
        }
    }
}
