use super::{CheckResult, VerificationReport};
use crate::weier::{g_eval, CurvePoint, SurfaceParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

pub const DEFAULT_SEED: u64 = 7_051_999;

/// Chordal distances below this count as collisions.
const COLLISION_TOL: f64 = 1e-10;
/// Pairs closer than this fraction of their modulus are not compared.
const MIN_REL_SEPARATION: f64 = 1e-3;
/// Cell size of the hashed neighbour scan on the sphere.
const HASH_CELL: f64 = 3e-3;
const SCAN_POINTS: usize = 20_000;

/// A point of the open first quadrant with |z| log-uniform in [1e-2, 1e2].
fn draw(rng: &mut ChaCha8Rng) -> C64 {
    let r = (rng.random_range(-2.0f64..2.0) * std::f64::consts::LN_10).exp();
    let mut th: f64 = rng.random_range(0.0..FRAC_PI_2);
    if th == 0.0 {
        th = f64::EPSILON;
    }
    C64::from_polar(r, th)
}

/// Image on the unit sphere under inverse stereographic projection.
fn sphere(g: C64) -> [f64; 3] {
    if !g.is_finite() {
        return [0.0, 0.0, 1.0];
    }
    let n2 = g.norm_sqr();
    let d = 1.0 + n2;
    [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
}

fn chordal(a: [f64; 3], b: [f64; 3]) -> f64 {
    0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn separated(z: C64, w: C64) -> bool {
    (z - w).norm() >= MIN_REL_SEPARATION * 0.5 * (z.norm() + w.norm())
}

/// Newton iteration on f(w) = f(z) from `w`, staying in the open quadrant.
fn refine_preimage<F>(f: &F, z: C64, mut w: C64) -> Option<C64>
where
    F: Fn(C64) -> Option<C64>,
{
    let gz = f(z)?;
    let target = sphere(gz);
    for _ in 0..40 {
        let gw = f(w)?;
        if chordal(sphere(gw), target) < 1e-14 {
            return Some(w);
        }
        let h = 1e-7 * w.norm().max(1e-3);
        let (Some(gp), Some(gm)) = (f(w + h), f(w - h)) else {
            return None;
        };
        let d = (gp - gm) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        w -= (gw - gz) / d;
        if !(w.re > 0.0 && w.im > 0.0) {
            return None;
        }
    }
    None
}

/// Sampled injectivity test of an arbitrary map on the open first quadrant.
/// `f` returns `None` where it is undefined (such samples are skipped).
pub fn check_injectivity_of<F>(f: F, n_pairs: usize, seed: u64) -> VerificationReport
where
    F: Fn(C64) -> Option<C64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerificationReport::new("injectivity");
    let mut min_pair = f64::INFINITY;
    let mut collisions = 0usize;
    let mut used = 0usize;
    for _ in 0..n_pairs {
        let (z, w) = (draw(&mut rng), draw(&mut rng));
        if !separated(z, w) {
            continue;
        }
        let (Some(gz), Some(gw)) = (f(z), f(w)) else {
            continue;
        };
        let d = chordal(sphere(gz), sphere(gw));
        min_pair = min_pair.min(d);
        if d < COLLISION_TOL {
            collisions += 1;
        }
        used += 1;
    }
    rep.push(CheckResult {
        check: "random pairs".into(),
        pass: collisions == 0,
        worst_residual: min_pair,
        tolerance: COLLISION_TOL,
        samples: used,
        hard: true,
    });

    // Points whose images share a sphere cell, compared pairwise: this finds
    // near-collisions that independent pairs would almost never hit.
    let m = SCAN_POINTS.min(n_pairs.max(2));
    let pts: Vec<(C64, [f64; 3])> = (0..m)
        .filter_map(|_| {
            let z = draw(&mut rng);
            f(z).map(|g| (z, sphere(g)))
        })
        .collect();
    let key = |v: &[f64; 3]| v.map(|c| (c / HASH_CELL).floor() as i64);
    let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (k, (_, v)) in pts.iter().enumerate() {
        cells.entry(key(v)).or_default().push(k);
    }
    let mut min_scan = HASH_CELL;
    let mut compared = 0usize;
    // Nearest separated partner of every point.
    let mut nearest: Vec<Option<(usize, f64)>> = vec![None; pts.len()];
    for (k, (z, v)) in pts.iter().enumerate() {
        let c = key(v);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(list) = cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    for &j in list.iter().filter(|&&j| j > k) {
                        let (w, u) = pts[j];
                        if !separated(*z, w) {
                            continue;
                        }
                        compared += 1;
                        let d = chordal(*v, u);
                        for (a, b) in [(k, j), (j, k)] {
                            if nearest[a].is_none_or(|(_, best)| d < best) {
                                nearest[a] = Some((b, d));
                            }
                        }
                    }
                }
            }
        }
    }
    // Polish each nearest partner into an exact preimage of f(z); a
    // converged point still apart from z is a collision.
    let mut scan_collisions = 0usize;
    for (k, near) in nearest.iter().enumerate() {
        let Some((j, d)) = *near else { continue };
        let z = pts[k].0;
        let d = match refine_preimage(&f, z, pts[j].0) {
            Some(w2) if separated(z, w2) => 0.0,
            _ => d,
        };
        min_scan = min_scan.min(d);
        if d < COLLISION_TOL {
            scan_collisions += 1;
        }
    }
    rep.push(CheckResult {
        check: "hashed neighbour scan".into(),
        pass: scan_collisions == 0,
        worst_residual: min_scan,
        tolerance: COLLISION_TOL,
        samples: compared,
        hard: true,
    });
    rep.note("collisions", (collisions + scan_collisions).to_string());
    rep.note("seed", seed.to_string());
    rep
}

/// Sampled injectivity of the Gauss map on the open first quadrant.
pub fn check_injectivity(p: &SurfaceParams, n_pairs: usize, seed: u64) -> VerificationReport {
    check_injectivity_of(
        |z| g_eval(p, &CurvePoint::upper(p, z)).ok(),
        n_pairs,
        seed,
    )
}
