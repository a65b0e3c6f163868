use super::{CheckResult, VerificationReport, VerifyError};
use crate::mesh::{tau_limits, z_of_omega, CutRadii};
use crate::weier::{w_upper, SurfaceParams, C64};
use std::f64::consts::PI;

/// deg g = k + r − 1 with genus k = 2 and r = 4 pairs of ends.
pub const EXPECTED_DEGREE: i64 = 5;

/// Regular values used when none are given: off the axes and off S¹.
pub const DEFAULT_C_VALUES: [(f64, f64); 5] = [
    (0.3, 0.4),
    (-0.6, 0.2),
    (0.1, -0.7),
    (1.7, 0.9),
    (-2.5, -1.1),
];

/// Inset of the contour from the strip edges, in σ.
const SIGMA_INSET: f64 = 1e-4;
/// Cut radii around the ends, relative to the neighbouring gaps.
const END_INSET: f64 = 1e-6;
/// Minimal chordal distance between c and g on the contour.
const CONTOUR_CLEARANCE: f64 = 1e-4;
/// Values this close to S¹ or to the axes are boundary values of g.
const BOUNDARY_MARGIN: f64 = 1e-3;

fn chordal(a: C64, b: C64) -> f64 {
    (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
}

struct Contour<'a> {
    p: &'a SurfaceParams,
    c: C64,
    min_dist: f64,
}

impl Contour<'_> {
    /// (i + c) + (i − c)u vanishes exactly where g = c.
    fn h(&mut self, omega: C64) -> C64 {
        let p = self.p;
        let z = z_of_omega(p, omega);
        let w = w_upper(p, z);
        let u = (p.big_x + z) / (w * (p.big_x - z));
        let g = C64::i() * (1.0 + u) / (u - 1.0);
        self.min_dist = self.min_dist.min(chordal(g, self.c));
        (C64::i() + self.c) + (C64::i() - self.c) * u
    }

    fn wind(&mut self, w0: C64, w1: C64, h0: C64, h1: C64, depth: u32) -> f64 {
        let d = (h1 / h0).arg();
        if d.abs() < 0.25 || depth >= 40 {
            return d;
        }
        let wm = 0.5 * (w0 + w1);
        let hm = self.h(wm);
        self.wind(w0, wm, h0, hm, depth + 1) + self.wind(wm, w1, hm, h1, depth + 1)
    }
}

/// Number of solutions of g(z) = c in the open first quadrant, counted by
/// the argument principle along a slightly inset contour, together with the
/// closest chordal approach of g to c on that contour.
pub fn preimage_count(p: &SurfaceParams, c: C64) -> Result<(i64, f64), VerifyError> {
    let cuts = CutRadii {
        e: END_INSET * (p.a - p.x).min(1.0 - p.a),
        d: END_INSET * (p.y - 1.0).min(1.0 - p.a),
    };
    let (t0, t1) = tau_limits(p, &cuts);
    let (s0, s1) = (SIGMA_INSET, PI - SIGMA_INSET);
    let corners = [
        C64::new(t0, s0),
        C64::new(t1, s0),
        C64::new(t1, s1),
        C64::new(t0, s1),
    ];
    let mut ct = Contour {
        p,
        c,
        min_dist: f64::INFINITY,
    };
    let n = 400;
    let mut total = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let mut prev_w = a;
        let mut prev_h = ct.h(a);
        for j in 1..=n {
            let w = a + (b - a) * (j as f64 / n as f64);
            let h = ct.h(w);
            total += ct.wind(prev_w, w, prev_h, h, 0);
            prev_w = w;
            prev_h = h;
        }
    }
    if ct.min_dist < CONTOUR_CLEARANCE {
        return Err(VerifyError::ContourTooClose {
            c: format!("{c}"),
            distance: ct.min_dist,
        });
    }
    Ok(((total / (2.0 * PI)).round() as i64, ct.min_dist))
}

/// The eight values that g takes on the symmetric copies of the quadrant
/// where it takes c on the quadrant itself.
fn orbit(c: C64) -> [C64; 8] {
    let inv = 1.0 / c;
    [c, -c, c.conj(), -c.conj(), inv, -inv, inv.conj(), -inv.conj()]
}

/// Total preimage count of each c over the eight quadrant copies, compared
/// with the degree of g.
pub fn degree_diagnostic(
    p: &SurfaceParams,
    c_values: &[C64],
) -> Result<VerificationReport, VerifyError> {
    let mut rep = VerificationReport::new("degree");
    for &c in c_values {
        if !c.is_finite()
            || (c.norm() - 1.0).abs() < BOUNDARY_MARGIN
            || c.re.abs() < BOUNDARY_MARGIN * c.norm()
            || c.im.abs() < BOUNDARY_MARGIN * c.norm()
        {
            return Err(VerifyError::InvalidInput(format!(
                "c = {c} lies on a boundary value set of g (S¹ or an axis)"
            )));
        }
        let mut counts = Vec::with_capacity(8);
        let mut clearance = f64::INFINITY;
        for v in orbit(c) {
            let (n, d) = preimage_count(p, v)?;
            counts.push(n);
            clearance = clearance.min(d);
        }
        let total: i64 = counts.iter().sum();
        let label = format!("c={:.3}{:+.3}i", c.re, c.im);
        rep.push(CheckResult {
            check: format!("{label} total"),
            pass: total == EXPECTED_DEGREE,
            worst_residual: (total - EXPECTED_DEGREE).abs() as f64,
            tolerance: 0.0,
            samples: 8,
            hard: true,
        });
        rep.note(
            format!("{label} per copy"),
            counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
        );
        rep.note(format!("{label} clearance"), format!("{clearance:.3e}"));
    }
    Ok(rep)
}
