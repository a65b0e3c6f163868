//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddle_core::weier::{dh_eval, sym_funcs, w_eval, w_squared, CurvePoint, SurfaceParams, C64};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random moduli with 0 < x < a ≤ X < 1 < y < b and comfortable gaps.
pub fn random_params(r: &mut impl Rng) -> SurfaceParams {
    let a: f64 = r.random_range(0.5..0.93);
    let x = a - r.random_range(0.01..0.15);
    let big_x = a + r.random_range(0.0..(0.98 - a).min(0.05));
    let y = r.random_range(1.02..1.5);
    let b = y + r.random_range(0.05..1.0);
    SurfaceParams::new(a, b, x, big_x, y).unwrap()
}

/// A random point of the open first quadrant, kept away from the real
/// branch points by a small imaginary part floor.
pub fn random_quadrant_point(r: &mut impl Rng) -> C64 {
    let radius = 10f64.powf(r.random_range(-1.5..1.5));
    let theta = r.random_range(0.02..(PI / 2.0 - 0.02));
    C64::from_polar(radius, theta)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1], by
/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 16-point Gauss–Legendre rule on `panels` equal panels. The
/// endpoints themselves are never evaluated.
pub fn gauss_composite<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(16);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = lo + h * (k as f64 + 0.5);
            rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// ∮ dh counterclockwise on a small circle around `center`, continuing w
/// node by node from a value reached by path continuation from z = 0.
pub fn dh_contour(p: &SurfaceParams, center: f64, radius: f64, nodes: usize) -> C64 {
    let s = sym_funcs(p);
    let start = C64::new(center + radius, 0.0);
    // Reach the start point from above so that no branch point is crossed.
    let via = [C64::new(0.5 * (center + radius), 0.5)];
    let mut w = w_eval(p, start, &via, None).unwrap().w;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let e = C64::from_polar(1.0, th);
        let z = C64::new(center, 0.0) + radius * e;
        let root = w_squared(p, z).sqrt();
        w = if (root - w).norm() <= (root + w).norm() { root } else { -root };
        let dh = dh_eval(p, &s, &CurvePoint { z, w }).unwrap();
        acc += dh * C64::i() * radius * e;
    }
    acc * (2.0 * PI / nodes as f64)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// (a, b, x, X, y) at a solved member of the family, recomputed in tests
/// from the solver.
pub fn solved_params() -> SurfaceParams {
    use saddle_core::periods::{solve_periods, SeedBox, SolverOptions};
    solve_periods(0.02, 0.0, &SeedBox::SEED_WINDOW, &SolverOptions::default())
        .unwrap()
        .params()
        .unwrap()
}
