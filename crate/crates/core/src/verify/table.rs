use super::{CheckResult, VerificationReport};
use crate::weier::{
    dh_eval, g_eval, sym_funcs, vertical_normal_points, CurvePoint, Stretch, SurfaceParams, C64,
};
use std::f64::consts::FRAC_PI_4;

/// Tolerance of the membership checks along the boundary stretches.
pub const TABLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy)]
enum Set {
    PosReal,
    NegReal,
    PosImag,
    NegImag,
    Imag,
    Circle,
}

impl Set {
    fn label(self) -> &'static str {
        match self {
            Set::PosReal => "R+",
            Set::NegReal => "R-",
            Set::PosImag => "iR+",
            Set::NegImag => "iR-",
            Set::Imag => "iR",
            Set::Circle => "S1",
        }
    }

    /// Distance-like residual of `v` from the set; a sign violation adds 1.
    fn residual(self, v: C64) -> f64 {
        let scale = v.norm().max(1.0);
        let (off, sign_ok) = match self {
            Set::PosReal => (v.im.abs() / scale, v.re > 0.0),
            Set::NegReal => (v.im.abs() / scale, v.re < 0.0),
            Set::PosImag => (v.re.abs() / scale, v.im > 0.0),
            Set::NegImag => (v.re.abs() / scale, v.im < 0.0),
            Set::Imag => (v.re.abs() / scale, true),
            Set::Circle => ((v.norm() - 1.0).abs(), true),
        };
        if sign_ok {
            off
        } else {
            1.0 + off
        }
    }
}

fn expected(s: Stretch) -> (Set, Set) {
    match s {
        Stretch::AL => (Set::PosReal, Set::PosReal),
        Stretch::LF => (Set::PosImag, Set::PosReal),
        Stretch::CB => (Set::NegImag, Set::NegReal),
        _ => (Set::Circle, Set::Imag),
    }
}

/// `n` interior abscissae of a stretch; infinite stretches are sampled
/// through t = lo + scale·s/(1−s).
pub(crate) fn stretch_samples(p: &SurfaceParams, s: Stretch, n: usize) -> Vec<f64> {
    let (lo, hi) = s.interval(p);
    (0..n)
        .map(|k| {
            let u = (k as f64 + 0.5) / n as f64;
            if hi.is_finite() {
                lo + (hi - lo) * u
            } else {
                lo + p.b * u / (1.0 - u)
            }
        })
        .collect()
}

/// Sample the Gauss map and dh along every boundary stretch and test their
/// membership in the tabulated sets. dh is taken against the stretch
/// direction (AL runs from A to L).
pub fn check_symmetry_table(p: &SurfaceParams, n_samples: usize) -> VerificationReport {
    let s = sym_funcs(p);
    let mut rep = VerificationReport::new("symmetry");
    for st in Stretch::ALL {
        let (gs, ds) = expected(st);
        let mut worst_g: f64 = 0.0;
        let mut worst_d: f64 = 0.0;
        let mut n_g = 0;
        let mut n_d = 0;
        for t in stretch_samples(p, st, n_samples) {
            let cp = CurvePoint::upper(p, st.point(t));
            if let Ok(g) = g_eval(p, &cp) {
                worst_g = worst_g.max(gs.residual(g));
                n_g += 1;
            }
            if let Ok(d) = dh_eval(p, &s, &cp) {
                worst_d = worst_d.max(ds.residual(d * st.direction()));
                n_d += 1;
            }
        }
        rep.push(CheckResult::bound(
            format!("{}.g in {}", st.name(), gs.label()),
            worst_g,
            TABLE_TOL,
            n_g,
        ));
        rep.push(CheckResult::bound(
            format!("{}.dh in {}", st.name(), ds.label()),
            worst_d,
            TABLE_TOL,
            n_d,
        ));
    }
    rep
}

/// Informational checks of the three exceptional configurations: vertical
/// normals inside CB or AL, and the range of θ = arg g on BA.
pub fn case_diagnostics(p: &SurfaceParams, n_samples: usize) -> VerificationReport {
    let s = sym_funcs(p);
    let mut rep = VerificationReport::new("cases");
    let g_along = |st: Stretch| -> Vec<C64> {
        stretch_samples(p, st, n_samples)
            .into_iter()
            .filter_map(|t| g_eval(p, &CurvePoint::upper(p, st.point(t))).ok())
            .collect()
    };
    // A vertical normal means g reaches 0 or ∞; the residual is how close
    // the samples come, on the sphere.
    let vertical = |gs: &[C64]| {
        gs.iter()
            .map(|g| g.norm().min(1.0 / g.norm()))
            .fold(f64::INFINITY, f64::min)
    };
    let cb = g_along(Stretch::CB);
    let closest = vertical(&cb);
    rep.push(CheckResult {
        check: "CB no vertical normal".into(),
        pass: closest > 1e-6,
        worst_residual: closest,
        tolerance: 1e-6,
        samples: cb.len(),
        hard: false,
    });
    // On AL, g has its pole at L itself; only zeros are exceptional.
    let al = g_along(Stretch::AL);
    let min_abs = al.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);
    rep.push(CheckResult {
        check: "AL no zero of g".into(),
        pass: min_abs > 1e-6,
        worst_residual: min_abs,
        tolerance: 1e-6,
        samples: al.len(),
        hard: false,
    });
    let ba = g_along(Stretch::BA);
    let thetas: Vec<f64> = ba.iter().map(|g| g.arg()).collect();
    let lo = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rep.push(CheckResult {
        check: "BA theta negative".into(),
        pass: hi < 0.0,
        worst_residual: hi,
        tolerance: 0.0,
        samples: thetas.len(),
        hard: false,
    });
    let inside = lo > -FRAC_PI_4 && hi < 0.0;
    rep.push(CheckResult {
        check: "BA theta in (-pi/4, 0)".into(),
        pass: inside,
        worst_residual: (lo + FRAC_PI_4).min(-hi),
        tolerance: 0.0,
        samples: thetas.len(),
        hard: false,
    });
    rep.note("theta_range_BA", format!("[{lo:.6}, {hi:.6}]"));
    let vn = vertical_normal_points(&s);
    rep.note("S2^2<4S4", vn.off_axis.to_string());
    rep.note(
        "vertical_normal_roots",
        vn.roots
            .iter()
            .map(|r| format!("{:.6}{:+.6}i", r.re, r.im))
            .collect::<Vec<_>>()
            .join(" "),
    );
    rep
}
