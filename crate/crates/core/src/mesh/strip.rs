//! The immersion forms pulled back to the strip and integrated along edges.
//!
//! Near a boundary corner the coordinates are rebuilt from q = ω − ω_corner
//! with expm1, so the differences z − c that enter the forms keep full
//! relative accuracy. Edges close to a corner are integrated in
//! ζ = √(ω − ω_corner), which removes the square-root behaviour of the
//! pulled-back forms there.

use super::grid::Corner;
use crate::weier::{phi_from_parts, sym_funcs, upper_sqrt, SurfaceParams, SymFuncs, ZParts, C64};

/// Gauss–Legendre nodes on [−1, 1] (positive half) and weights.
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Within this ω-distance of a corner, points are formed relative to it.
const ANCHOR_RADIUS: f64 = 1.0;
/// Edges closer than this many edge lengths to a corner use ζ-substitution.
const NEAR_CORNER: f64 = 2.0;

/// e^q − 1 without cancellation for small |q|.
pub fn expm1_c(q: C64) -> C64 {
    let (s, c) = q.im.sin_cos();
    let half = (0.5 * q.im).sin();
    C64::new(
        q.re.exp_m1() * c - 2.0 * half * half,
        q.re.exp() * s,
    )
}

/// The branch of √q used for q = ω − ω_corner with Im ω ≤ π; the cut points
/// straight up, out of the strip.
fn corner_sqrt(q: C64) -> C64 {
    let rot = C64::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2);
    rot * (q * C64::i()).sqrt()
}

/// Evaluator of Φ = φ(z(ω))·dz/dω on the strip.
#[derive(Debug, Clone)]
pub struct StripMap {
    p: SurfaceParams,
    s: SymFuncs,
    corners: [(Corner, C64, f64); 5],
}

impl StripMap {
    pub fn new(p: &SurfaceParams) -> Self {
        let corners = Corner::ALL.map(|c| (c, c.omega(p), c.exp_omega(p)));
        Self {
            p: *p,
            s: sym_funcs(p),
            corners,
        }
    }

    pub fn params(&self) -> &SurfaceParams {
        &self.p
    }

    fn nearest_corner(&self, omega: C64) -> (usize, f64) {
        self.corners
            .iter()
            .enumerate()
            .map(|(k, (_, s, _))| (k, (omega - s).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("five corners")
    }

    /// Φ at ω, anchored at the nearest corner when one is close.
    pub fn phi(&self, omega: C64) -> [C64; 3] {
        let (k, d) = self.nearest_corner(omega);
        if d < ANCHOR_RADIUS {
            self.phi_anchored(k, omega - self.corners[k].1)
        } else {
            self.eval(omega.exp(), None)
        }
    }

    /// Φ at ω = ω_k + q for corner index k (in [`Corner::ALL`] order).
    pub fn phi_anchored(&self, k: usize, q: C64) -> [C64; 3] {
        let (_, _, e_c) = self.corners[k];
        let e = e_c * q.exp();
        self.eval(e, Some((k, expm1_c(q))))
    }

    /// z at ω, formed the same way as in [`StripMap::phi`].
    pub fn z(&self, omega: C64) -> C64 {
        let (k, d) = self.nearest_corner(omega);
        let parts = if d < ANCHOR_RADIUS {
            let q = omega - self.corners[k].1;
            self.parts(self.corners[k].2 * q.exp(), Some((k, expm1_c(q))))
        } else {
            self.parts(omega.exp(), None)
        };
        parts.0.z
    }

    fn parts(&self, e: C64, anchor: Option<(usize, C64)>) -> (ZParts, C64) {
        let p = &self.p;
        let a2 = p.a * p.a;
        let corner = anchor.map(|(k, m1)| (self.corners[k].0, m1));
        let one_plus_e = match corner {
            Some((Corner::A, m1)) => -m1,
            _ => 1.0 + e,
        };
        // ξ − c² = ((a² − c²) + e(1 − c²)) / (1 + e); at the anchoring
        // corner the numerator is (c² − a²)·expm1(q) exactly.
        let numer = |c: f64| -> C64 {
            if let Some((k, m1)) = corner {
                if k.abscissa(p) == Some(c) {
                    return (c * c - a2) * m1;
                }
            }
            (a2 - c * c) + e * (1.0 - c * c)
        };
        let xi = numer(0.0) / one_plus_e;
        let xi = C64::new(xi.re, xi.im.max(0.0));
        let z = upper_sqrt(xi);
        let z = C64::new(z.re.max(0.0), z.im.max(0.0));
        let diff = |c: f64| numer(c) / one_plus_e / (z + c);
        let zp = ZParts::from_parts(
            z,
            xi,
            diff(p.x),
            diff(p.y),
            diff(p.b),
            C64::new(a2 - 1.0, 0.0) / one_plus_e,
            e * (1.0 - a2) / one_plus_e,
            ((a2 - p.big_x * p.big_x) + e * (1.0 - p.big_x * p.big_x)) / one_plus_e,
        );
        let dz = e * (1.0 - a2) / (one_plus_e * one_plus_e) / (2.0 * z);
        (zp, dz)
    }

    fn eval(&self, e: C64, anchor: Option<(usize, C64)>) -> [C64; 3] {
        let (zp, dz) = self.parts(e, anchor);
        phi_from_parts(&self.p, &self.s, &zp).map(|f| f * dz)
    }

    /// Re ∫ Φ dω along the straight segment from `w0` to `w1`.
    pub fn edge_increment(&self, w0: C64, w1: C64) -> [f64; 3] {
        let len = (w1 - w0).norm();
        let (k, dist) = self
            .corners
            .iter()
            .enumerate()
            .map(|(k, (_, s, _))| (k, segment_distance(w0, w1, *s)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("five corners");
        let mut acc = [C64::new(0.0, 0.0); 3];
        if dist < NEAR_CORNER * len {
            let s = self.corners[k].1;
            let (z0, z1) = (corner_sqrt(w0 - s), corner_sqrt(w1 - s));
            let (mid, half) = (0.5 * (z0 + z1), 0.5 * (z1 - z0));
            for (x, wt) in GL8_X.iter().zip(GL8_W) {
                for zeta in [mid + half * *x, mid - half * *x] {
                    let f = self.phi_anchored(k, zeta * zeta);
                    for (a, v) in acc.iter_mut().zip(f) {
                        *a += v * (2.0 * zeta * half * wt);
                    }
                }
            }
        } else {
            let (mid, half) = (0.5 * (w0 + w1), 0.5 * (w1 - w0));
            for (x, wt) in GL8_X.iter().zip(GL8_W) {
                for t in [*x, -*x] {
                    let f = self.phi(mid + half * t);
                    for (a, v) in acc.iter_mut().zip(f) {
                        *a += v * (half * wt);
                    }
                }
            }
        }
        acc.map(|v| v.re)
    }
}

fn segment_distance(a: C64, b: C64, q: C64) -> f64 {
    let d = b - a;
    let t = ((q - a) * d.conj()).re / d.norm_sqr();
    (a + d * t.clamp(0.0, 1.0) - q).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SurfaceParams {
        SurfaceParams::new(0.7282819947832397, 1.2089150944499703, 0.7082819947832397, 0.7282819947832397, 1.0008417025475569).unwrap()
    }

    #[test]
    fn expm1_small_and_large() {
        let q = C64::new(1e-12, -2e-12);
        let m = expm1_c(q);
        assert!((m - q).norm() < 1e-23);
        let q = C64::new(0.3, -1.1);
        assert!((expm1_c(q) - (q.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn anchored_z_matches_direct() {
        let p = params();
        let m = StripMap::new(&p);
        for c in Corner::ALL {
            let w = c.omega(&p) + C64::new(0.3, -0.4);
            let z = m.z(w);
            let direct = super::super::grid::z_of_omega(&p, w);
            assert!((z - direct).norm() < 1e-12 * (1.0 + z.norm()), "{c:?}");
        }
    }

    #[test]
    fn edge_increment_matches_fine_quadrature() {
        let p = params();
        let m = StripMap::new(&p);
        let (w0, w1) = (C64::new(-0.2, 1.0), C64::new(0.35, 1.6));
        let inc = m.edge_increment(w0, w1);
        let n = 4000;
        let mut acc = [0.0; 3];
        for k in 0..n {
            let t = (k as f64 + 0.5) / n as f64;
            let f = m.phi(w0 + (w1 - w0) * t);
            for (a, v) in acc.iter_mut().zip(f) {
                *a += (v * (w1 - w0)).re / n as f64;
            }
        }
        for (a, b) in inc.iter().zip(acc) {
            assert!((a - b).abs() < 1e-7, "{a} {b}");
        }
    }
}
