//! Residue and period problems.
//!
//! The residue problem r = R is solved exactly by choosing y as the root of
//! the polynomial F(y) nearest to 1. The two remaining periods
//! π₁ = I − J and π₂ = K − R/2 are then driven to zero in (a, b) by a damped
//! Newton iteration, for fixed t = a − x and X_offset = X − a.
//!
//! Orientation conventions: I is ½∫(1/g−g)dh along the stretch from B to A
//! (z from b to ∞), J the same integral from L to A (z = it), K = ∫dh from B
//! to C. With these, π₁ is the offset in x₁ between the vertical mirror
//! planes through LF and CB, and π₂ measures the mismatch of the horizontal
//! mirror levels.

use crate::quad::{
    integrate_singular_offsets, integrate_to_infinity_offsets, QuadError, QuadratureSpec,
};
use crate::weier::{g_eval, sym_funcs, CurvePoint, SurfaceParams, SymFuncs, WeierError, C64};
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodError {
    #[error(transparent)]
    Domain(#[from] WeierError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("no root of F in (1, b) for a={a}, b={b}, x={x}, X={big_x}")]
    NoRoot { a: f64, b: f64, x: f64, big_x: f64 },
    #[error("residues disagree after solving for y: r={r}, R={big_r}")]
    ResidueMismatch { r: f64, big_r: f64 },
    #[error("period solve did not converge: |pi1|={pi1:e}, |pi2|={pi2:e} at a={a}, b={b}")]
    NoConvergence { a: f64, b: f64, pi1: f64, pi2: f64 },
    #[error("no start point in the seed box led to convergence")]
    SeedBoxExhausted,
    #[error("invalid family coordinates: {0}")]
    InvalidInput(String),
}

/// Everything computed for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodReport {
    pub r: f64,
    pub big_r: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    /// I − J
    pub pi1: f64,
    /// K − R/2
    pub pi2: f64,
    pub f_residual: f64,
}

/// One solved member of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySolution {
    pub t: f64,
    pub x_offset: f64,
    pub a: f64,
    pub b: f64,
    pub y: f64,
    pub y_minus_1: f64,
    pub report: PeriodReport,
    pub converged: bool,
    pub iterations: usize,
}

impl FamilySolution {
    pub fn params(&self) -> Result<SurfaceParams, WeierError> {
        let (a, t, xo) = (self.a, self.t, self.x_offset);
        SurfaceParams::with_y_offset(a, self.b, a - t, a + xo, self.y_minus_1)
    }
}

fn domain_check(p: &SurfaceParams) -> Result<(), PeriodError> {
    p.validate().map_err(PeriodError::from)
}

/// r = 2πi·Res(dh, D) in closed form.
pub fn residue_r(p: &SurfaceParams, s: &SymFuncs) -> Result<f64, PeriodError> {
    domain_check(p)?;
    let (a, b, x, e) = (p.a, p.b, p.x, p.y_minus_1);
    let rad = (1.0 - b * b) * (1.0 - x * x) * (-e * (2.0 + e));
    Ok(PI * (1.0 + s.s2 + s.s4) / ((1.0 - a * a) * rad.sqrt()))
}

/// R = 2πi·Res(dh, E) in closed form.
pub fn residue_big_r(p: &SurfaceParams, s: &SymFuncs) -> Result<f64, PeriodError> {
    domain_check(p)?;
    let (a, b, x, y) = (p.a, p.b, p.x, p.y);
    let a2 = a * a;
    let rad = (a2 - b * b) * (a2 - x * x) * (a2 - y * y);
    Ok(PI * (a2 * a2 + s.s2 * a2 + s.s4) / ((1.0 - a2) * rad.sqrt()))
}

/// I = ½∫_{B→A}(1/g−g)dh, evaluated as a real integral over (b, ∞).
///
/// On that ray ½(1/g−g)dh reduces to
/// −(S₁t⁴+S₃t²+S₅)/((t²−1)(t²−a²)√((t²−b²)(t²−x²)(t²−y²))) dt.
pub fn i_integral(
    p: &SurfaceParams,
    s: &SymFuncs,
    spec: &QuadratureSpec,
) -> Result<f64, PeriodError> {
    domain_check(p)?;
    let (a, b, x, y) = (p.a, p.b, p.x, p.y);
    let f = |t: f64, d: f64| {
        let t2 = t * t;
        let num = s.s1 * t2 * t2 + s.s3 * t2 + s.s5;
        let rad = d * (t + b) * (t2 - x * x) * (t2 - y * y);
        num / ((t2 - 1.0) * (t2 - a * a) * rad.sqrt())
    };
    let spec = spec.with_exponents(-0.5, 0.0);
    let r = integrate_to_infinity_offsets(f, b, &spec, true)?;
    Ok(-r.value)
}

/// Gauss map on the positive imaginary axis, which is real there.
fn g_on_axis(p: &SurfaceParams, t: f64) -> Option<f64> {
    let cp = CurvePoint::upper(p, C64::new(0.0, t));
    g_eval(p, &cp).ok().map(|g| g.re)
}

/// J = ½∫_{L→A}(1/g−g)dh along z = it, with g taken from the divisor
/// relation on the quadrant branch.
pub fn j_integral(
    p: &SurfaceParams,
    s: &SymFuncs,
    spec: &QuadratureSpec,
) -> Result<f64, PeriodError> {
    domain_check(p)?;
    let (a, b, x, y) = (p.a, p.b, p.x, p.y);
    let f = |t: f64, _d: f64| {
        let t2 = t * t;
        let q4 = t2 * t2 - s.s2 * t2 + s.s4;
        let den = (t2 + 1.0)
            * (t2 + a * a)
            * ((t2 + b * b) * (t2 + x * x) * (t2 + y * y)).sqrt();
        // t(g − 1/g) stays finite at the pole of g at L.
        let t_g = match g_on_axis(p, t) {
            Some(g) if g.is_finite() => t * (g - 1.0 / g),
            _ => 2.0 * (s.s1 * t2 * t2 - s.s3 * t2 + s.s5) / q4,
        };
        0.5 * q4 * t_g / den
    };
    let spec = spec.with_exponents(0.0, 0.0);
    let r = integrate_to_infinity_offsets(f, 0.0, &spec, false)?;
    Ok(r.value)
}

/// K = ∫_{B→C} dh as the real integral over (y, b).
pub fn k_integral(
    p: &SurfaceParams,
    s: &SymFuncs,
    spec: &QuadratureSpec,
) -> Result<f64, PeriodError> {
    domain_check(p)?;
    let (a, b, x, y) = (p.a, p.b, p.x, p.y);
    let y_minus_1 = p.y_minus_1;
    let f = |t: f64, d_lo: f64, d_hi: f64| {
        let t2 = t * t;
        let q4 = t2 * t2 + s.s2 * t2 + s.s4;
        let one_minus_t2 = -(y_minus_1 + d_lo) * (t + 1.0);
        let rad = d_hi * (b + t) * (t2 - x * x) * d_lo * (t + y);
        q4 * t / (one_minus_t2 * (a * a - t2) * rad.sqrt())
    };
    let spec = spec.with_exponents(-0.5, -0.5);
    let r = integrate_singular_offsets(f, y, b, &spec)?;
    Ok(r.value)
}

/// F(a,b,x,X,y); its zero set is where the residues r and R agree up to sign.
pub fn f_eval(a: f64, b: f64, x: f64, big_x: f64, y: f64) -> f64 {
    f_eval_offset(a, b, x, big_x, y - 1.0)
}

/// F with y given through e = y − 1, so that the factor 1 − y² = −e(2 + e)
/// keeps full relative precision near y = 1.
pub fn f_eval_offset(a: f64, b: f64, x: f64, big_x: f64, e: f64) -> f64 {
    let y = 1.0 + e;
    let s = SymFuncs::from_moduli(b, x, big_x, y);
    let a2 = a * a;
    let c1 = 1.0 + s.s2 + s.s4;
    let c2 = a2 * a2 + s.s2 * a2 + s.s4;
    c1 * c1 * (a2 - x * x) * (a2 - b * b) * (a2 - y * y)
        + c2 * c2 * e * (2.0 + e) * (1.0 - b * b) * (1.0 - x * x)
}

/// ∂F/∂y, differentiating the polynomial form directly.
pub fn df_dy(a: f64, b: f64, x: f64, big_x: f64, y: f64) -> f64 {
    let s = SymFuncs::from_moduli(b, x, big_x, y);
    let a2 = a * a;
    let ds2 = b - x - 2.0 * big_x;
    let ds4 = 2.0 * b * x * big_x + (b - x) * big_x * big_x;
    let c1 = 1.0 + s.s2 + s.s4;
    let c2 = a2 * a2 + s.s2 * a2 + s.s4;
    let dc1 = ds2 + ds4;
    let dc2 = a2 * ds2 + ds4;
    let u = (a2 - x * x) * (a2 - b * b);
    let v = (1.0 - b * b) * (1.0 - x * x);
    2.0 * c1 * dc1 * u * (a2 - y * y) - 2.0 * y * c1 * c1 * u - 2.0 * c2 * dc2 * v * (1.0 - y * y)
        + 2.0 * y * c2 * c2 * v
}

/// Root of F in (1, b) closest to 1, the implicit function y(a, b, x, X).
///
/// See [`solve_y_offset`]; this returns 1 + (y − 1) rounded to f64.
pub fn solve_y(a: f64, b: f64, x: f64, big_x: f64, tol: f64) -> Result<f64, PeriodError> {
    solve_y_offset(a, b, x, big_x, tol).map(|e| 1.0 + e)
}

/// The root of [`solve_y`] as e = y − 1, to full relative precision.
///
/// A logarithmic scan in e, starting at e = 0 itself, brackets the first
/// sign change; a safeguarded Newton iteration on the bracket then polishes
/// it to the rounding floor of e. The result is accepted when |F| < `tol`.
/// Working in e matters when X is close to 1: the root can then sit within
/// 1e-10 of y = 1, where one ulp of y moves r/R by more than 1e-6.
pub fn solve_y_offset(a: f64, b: f64, x: f64, big_x: f64, tol: f64) -> Result<f64, PeriodError> {
    let bad = || PeriodError::NoRoot { a, b, x, big_x };
    if !(0.0 < x && x < a && a < 1.0 && 1.0 < b && a <= big_x && big_x < 1.0) {
        return Err(PeriodError::InvalidInput(format!(
            "solve_y needs 0 < x < a <= X < 1 < b, got a={a}, b={b}, x={x}, X={big_x}"
        )));
    }
    let f = |e: f64| f_eval_offset(a, b, x, big_x, e);
    let df = |e: f64| df_dy(a, b, x, big_x, 1.0 + e);
    let delta = 1e-9;
    let first = 1e-15;
    let span = b - 1.0 - delta;
    if span <= first {
        return Err(bad());
    }
    let n = 800;
    let (lo_exp, hi_exp) = (first.ln(), span.ln());
    let node = |k: usize| (lo_exp + (hi_exp - lo_exp) * k as f64 / n as f64).exp();
    let mut bracket = None;
    let mut prev_e = 0.0;
    let mut prev_f = f(prev_e);
    if prev_f == 0.0 {
        prev_e = node(0);
        prev_f = f(prev_e);
    }
    for k in 0..=n {
        let ek = node(k).min(span);
        let fk = f(ek);
        if fk == 0.0 {
            return Ok(ek);
        }
        if prev_f.signum() != fk.signum() {
            bracket = Some((prev_e, ek, prev_f));
            break;
        }
        prev_e = ek;
        prev_f = fk;
    }
    let (mut lo, mut hi, f_lo) = match bracket {
        Some(br) => br,
        None => return newton_unbracketed(a, b, x, big_x, tol).ok_or_else(bad),
    };
    // Iterate to the rounding floor of e: near y = 1 the residues are so
    // sensitive to y that stopping on |F| alone leaves r − R visible.
    let accept = |e: f64| if f(e).abs() < tol && e > 0.0 { Ok(e) } else { Err(bad()) };
    let mut ek = 0.5 * (lo + hi);
    for _ in 0..300 {
        let fe = f(ek);
        if fe == 0.0 {
            return accept(ek);
        }
        if fe.signum() == f_lo.signum() {
            lo = ek;
        } else {
            hi = ek;
        }
        let d = df(ek);
        let cand = ek - fe / d;
        let newton_ok = d != 0.0 && cand > lo && cand < hi;
        if newton_ok && (cand - ek).abs() <= 2.0 * f64::EPSILON * ek {
            return accept(cand);
        }
        ek = if newton_ok { cand } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return accept(ek);
        }
    }
    accept(ek)
}

/// Newton from near y = 1 for roots the scan cannot bracket (double roots).
/// Convergence is judged on the step, since F may be tiny everywhere.
fn newton_unbracketed(a: f64, b: f64, x: f64, big_x: f64, tol: f64) -> Option<f64> {
    let mut ek = 1e-3 * (b - 1.0);
    for _ in 0..200 {
        let fe = f_eval_offset(a, b, x, big_x, ek);
        let d = df_dy(a, b, x, big_x, 1.0 + ek);
        if fe == 0.0 {
            return Some(ek);
        }
        if d == 0.0 {
            return None;
        }
        let step = fe / d;
        ek -= step;
        if !(ek > 0.0 && ek < b - 1.0) {
            return None;
        }
        if step.abs() <= 1e-14 * ek {
            return (f_eval_offset(a, b, x, big_x, ek).abs() < tol).then_some(ek);
        }
    }
    None
}

/// Tolerance on |F| used when solving for y inside the period solver.
pub const F_TOL: f64 = 1e-13;

/// Full report for explicit parameters (y is taken as given).
pub fn period_report_for(
    p: &SurfaceParams,
    spec: &QuadratureSpec,
) -> Result<PeriodReport, PeriodError> {
    domain_check(p)?;
    let s = sym_funcs(p);
    let r = residue_r(p, &s)?;
    let big_r = residue_big_r(p, &s)?;
    let i = i_integral(p, &s, spec)?;
    let j = j_integral(p, &s, spec)?;
    let k = k_integral(p, &s, spec)?;
    Ok(PeriodReport {
        r,
        big_r,
        i,
        j,
        k,
        pi1: i - j,
        pi2: k - 0.5 * big_r,
        f_residual: f_eval_offset(p.a, p.b, p.x, p.big_x, p.y_minus_1),
    })
}

/// Solve for y, check the residues, and evaluate all periods.
pub fn period_report(
    t: f64,
    x_offset: f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(SurfaceParams, PeriodReport), PeriodError> {
    let x = a - t;
    let big_x = a + x_offset;
    let e = solve_y_offset(a, b, x, big_x, F_TOL)?;
    let p = SurfaceParams::with_y_offset(a, b, x, big_x, e)?;
    let rep = period_report_for(&p, spec)?;
    if (rep.r - rep.big_r).abs() > 1e-8 * rep.big_r.abs() {
        return Err(PeriodError::ResidueMismatch {
            r: rep.r,
            big_r: rep.big_r,
        });
    }
    Ok((p, rep))
}

/// Axis-aligned box in the (a, b) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedBox {
    pub a_lo: f64,
    pub a_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
}

impl SeedBox {
    /// The window in which the period graphs cross zero near (1, 1).
    pub const SEED_WINDOW: SeedBox = SeedBox {
        a_lo: 0.82,
        a_hi: 0.98,
        b_lo: 1.01,
        b_hi: 1.51,
    };

    /// Region that Newton iterates may explore.
    pub const SEARCH: SeedBox = SeedBox {
        a_lo: 0.5,
        a_hi: 0.999,
        b_lo: 1.0005,
        b_hi: 2.5,
    };

    pub fn new(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> Result<Self, PeriodError> {
        let ok = a_lo < a_hi && b_lo < b_hi && a_lo > 0.0 && a_hi < 1.0 && b_lo > 1.0;
        if !ok {
            return Err(PeriodError::InvalidInput(format!(
                "bad box [{a_lo},{a_hi}]x[{b_lo},{b_hi}]"
            )));
        }
        Ok(Self { a_lo, a_hi, b_lo, b_hi })
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.a_lo + self.a_hi), 0.5 * (self.b_lo + self.b_hi))
    }

    pub fn contains(&self, a: f64, b: f64) -> bool {
        a >= self.a_lo && a <= self.a_hi && b >= self.b_lo && b <= self.b_hi
    }
}

/// Knobs of the 2-D period solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target for max(|π₁|, |π₂|).
    pub tol: f64,
    pub max_iter: usize,
    /// Forward-difference step for the Jacobian.
    pub fd_step: f64,
    pub search_box: SeedBox,
    /// Grid points per side for the fallback scan of the seed box.
    pub scan_points: usize,
    pub quad: QuadratureSpec,
    /// Sweep bound ε on t and X_offset.
    pub epsilon: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 60,
            fd_step: 1e-6,
            search_box: SeedBox::SEARCH,
            scan_points: 7,
            quad: QuadratureSpec::default(),
            epsilon: 0.05,
        }
    }
}

fn residual(
    t: f64,
    xo: f64,
    a: f64,
    b: f64,
    opts: &SolverOptions,
) -> Option<(SurfaceParams, PeriodReport)> {
    if !opts.search_box.contains(a, b) {
        return None;
    }
    period_report(t, xo, a, b, &opts.quad).ok()
}

fn norm(r: &PeriodReport) -> f64 {
    r.pi1.abs().max(r.pi2.abs())
}

struct NewtonOutcome {
    a: f64,
    b: f64,
    y: f64,
    y_minus_1: f64,
    report: PeriodReport,
    converged: bool,
    iterations: usize,
}

fn damped_newton(
    t: f64,
    xo: f64,
    start: (f64, f64),
    opts: &SolverOptions,
) -> Option<NewtonOutcome> {
    let (mut a, mut b) = start;
    let (mut p, mut rep) = residual(t, xo, a, b, opts)?;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if norm(&rep) < opts.tol {
            break;
        }
        iterations += 1;
        let h = opts.fd_step;
        // Step inward if the forward point would leave the box.
        let ha = if a + h <= opts.search_box.a_hi { h } else { -h };
        let hb = if b + h <= opts.search_box.b_hi { h } else { -h };
        let (_, ra) = residual(t, xo, a + ha, b, opts)?;
        let (_, rb) = residual(t, xo, a, b + hb, opts)?;
        let j11 = (ra.pi1 - rep.pi1) / ha;
        let j21 = (ra.pi2 - rep.pi2) / ha;
        let j12 = (rb.pi1 - rep.pi1) / hb;
        let j22 = (rb.pi2 - rep.pi2) / hb;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let da = -(j22 * rep.pi1 - j12 * rep.pi2) / det;
        let db = -(-j21 * rep.pi1 + j11 * rep.pi2) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let (an, bn) = (a + lambda * da, b + lambda * db);
            if let Some((pn, rn)) = residual(t, xo, an, bn, opts) {
                if norm(&rn) < norm(&rep) {
                    a = an;
                    b = bn;
                    p = pn;
                    rep = rn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some(NewtonOutcome {
        a,
        b,
        y: p.y,
        y_minus_1: p.y_minus_1,
        converged: norm(&rep) < opts.tol,
        report: rep,
        iterations,
    })
}

fn check_family_coords(t: f64, xo: f64, opts: &SolverOptions) -> Result<(), PeriodError> {
    if !(t > 0.0 && t < opts.epsilon && xo >= 0.0 && xo < opts.epsilon) {
        return Err(PeriodError::InvalidInput(format!(
            "need 0 < t < {eps} and 0 <= X_offset < {eps}, got t={t}, X_offset={xo}",
            eps = opts.epsilon
        )));
    }
    Ok(())
}

fn into_solution(t: f64, xo: f64, o: NewtonOutcome) -> FamilySolution {
    FamilySolution {
        t,
        x_offset: xo,
        a: o.a,
        b: o.b,
        y: o.y,
        y_minus_1: o.y_minus_1,
        report: o.report,
        converged: o.converged,
        iterations: o.iterations,
    }
}

/// Newton from an explicit start point, without the fallback scan.
pub fn solve_periods_from(
    t: f64,
    x_offset: f64,
    start: (f64, f64),
    opts: &SolverOptions,
) -> Result<FamilySolution, PeriodError> {
    check_family_coords(t, x_offset, opts)?;
    match damped_newton(t, x_offset, start, opts) {
        Some(o) if o.converged => Ok(into_solution(t, x_offset, o)),
        Some(o) => Err(PeriodError::NoConvergence {
            a: o.a,
            b: o.b,
            pi1: o.report.pi1.abs(),
            pi2: o.report.pi2.abs(),
        }),
        None => Err(PeriodError::NoConvergence {
            a: start.0,
            b: start.1,
            pi1: f64::NAN,
            pi2: f64::NAN,
        }),
    }
}

/// Solve π₁ = π₂ = 0 starting in `seed_box`.
///
/// Newton starts at the box center. If that fails, the box is scanned on a
/// coarse grid and Newton is restarted from the best grid points in order.
pub fn solve_periods(
    t: f64,
    x_offset: f64,
    seed_box: &SeedBox,
    opts: &SolverOptions,
) -> Result<FamilySolution, PeriodError> {
    check_family_coords(t, x_offset, opts)?;
    if let Some(o) = damped_newton(t, x_offset, seed_box.center(), opts) {
        if o.converged {
            return Ok(into_solution(t, x_offset, o));
        }
    }
    let n = opts.scan_points.max(2);
    let mut candidates = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let a = seed_box.a_lo + (seed_box.a_hi - seed_box.a_lo) * i as f64 / (n - 1) as f64;
            let b = seed_box.b_lo + (seed_box.b_hi - seed_box.b_lo) * k as f64 / (n - 1) as f64;
            if let Some((_, rep)) = residual(t, x_offset, a, b, opts) {
                candidates.push((norm(&rep), a, b));
            }
        }
    }
    candidates.sort_by(|l, r| l.0.total_cmp(&r.0));
    for &(_, a, b) in candidates.iter().take(4) {
        if let Some(o) = damped_newton(t, x_offset, (a, b), opts) {
            if o.converged {
                return Ok(into_solution(t, x_offset, o));
            }
        }
    }
    Err(PeriodError::SeedBoxExhausted)
}

/// Solve on the product grid, warm-starting each point from its neighbour.
///
/// Rows are ordered by X_offset, then t. Points with t = 0 are the
/// degenerate limit and are skipped. Unsolvable points yield a row with
/// `converged = false` rather than an error.
pub fn sweep_family(
    t_grid: &[f64],
    x_grid: &[f64],
    seed_box: &SeedBox,
    opts: &SolverOptions,
) -> Vec<FamilySolution> {
    sweep_family_with(t_grid, x_grid, seed_box, opts, true)
}

/// [`sweep_family`] with warm starts optionally switched off, in which case
/// every point is solved from the seed box.
pub fn sweep_family_with(
    t_grid: &[f64],
    x_grid: &[f64],
    seed_box: &SeedBox,
    opts: &SolverOptions,
    warm_start: bool,
) -> Vec<FamilySolution> {
    let mut rows = Vec::new();
    let mut row_start: Option<(f64, f64)> = None;
    for &xo in x_grid {
        let mut warm = row_start;
        let mut first_in_row = true;
        for &t in t_grid {
            if t <= 0.0 {
                continue;
            }
            let attempt = match warm.filter(|_| warm_start) {
                Some(start) => solve_periods_from(t, xo, start, opts)
                    .or_else(|_| solve_periods(t, xo, seed_box, opts)),
                None => solve_periods(t, xo, seed_box, opts),
            };
            match attempt {
                Ok(sol) => {
                    warm = Some((sol.a, sol.b));
                    if first_in_row {
                        row_start = warm;
                    }
                    rows.push(sol);
                }
                Err(_) => rows.push(failed_row(t, xo, warm)),
            }
            first_in_row = false;
        }
    }
    rows
}

fn failed_row(t: f64, xo: f64, at: Option<(f64, f64)>) -> FamilySolution {
    let (a, b) = at.unwrap_or((f64::NAN, f64::NAN));
    let nan = f64::NAN;
    FamilySolution {
        t,
        x_offset: xo,
        a,
        b,
        y: nan,
        y_minus_1: nan,
        report: PeriodReport {
            r: nan,
            big_r: nan,
            i: nan,
            j: nan,
            k: nan,
            pi1: nan,
            pi2: nan,
            f_residual: nan,
        },
        converged: false,
        iterations: 0,
    }
}

pub const SWEEP_HEADER: &str = "t,X_offset,a,b,y,r,R,I,J,K,pi1,pi2,converged";

/// Write sweep rows as CSV with 17 significant digits.
pub fn write_sweep_csv<W: Write>(rows: &[FamilySolution], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for s in rows {
        let r = &s.report;
        let vals = [
            s.t, s.x_offset, s.a, s.b, s.y, r.r, r.big_r, r.i, r.j, r.k, r.pi1, r.pi2,
        ];
        let cells: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{},{}", cells.join(","), s.converged)?;
    }
    Ok(())
}

/// One cell of the (a, b) grid of period values at fixed (t, X_offset).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodGridPoint {
    pub a: f64,
    pub b: f64,
    pub y: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub ok: bool,
}

/// π₁ and π₂ on a regular grid over a box, for plotting the zero sets.
pub fn period_grid(
    t: f64,
    x_offset: f64,
    bx: &SeedBox,
    n_a: usize,
    n_b: usize,
    spec: &QuadratureSpec,
) -> Vec<PeriodGridPoint> {
    let mut out = Vec::with_capacity(n_a * n_b);
    let step = |lo: f64, hi: f64, n: usize, i: usize| {
        if n <= 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    for i in 0..n_a {
        for k in 0..n_b {
            let a = step(bx.a_lo, bx.a_hi, n_a, i);
            let b = step(bx.b_lo, bx.b_hi, n_b, k);
            let pt = match period_report(t, x_offset, a, b, spec) {
                Ok((p, r)) => PeriodGridPoint { a, b, y: p.y, pi1: r.pi1, pi2: r.pi2, ok: true },
                Err(_) => PeriodGridPoint {
                    a,
                    b,
                    y: f64::NAN,
                    pi1: f64::NAN,
                    pi2: f64::NAN,
                    ok: false,
                },
            };
            out.push(pt);
        }
    }
    out
}

pub const GRID_HEADER: &str = "a,b,y,pi1,pi2,ok";

pub fn write_period_grid_csv<W: Write>(
    points: &[PeriodGridPoint],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{GRID_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            p.a, p.b, p.y, p.pi1, p.pi2, p.ok
        )?;
    }
    Ok(())
}
