//! Double-exponential quadrature for improper integrals.
//!
//! Finite intervals use the tanh-sinh map, semi-infinite ones the exp-sinh
//! map. Both refine by halving the step in the transformed variable and
//! reuse all previous nodes, so the error estimate is the change between the
//! last two levels. Integrands with algebraic endpoint singularities should
//! use the `*_offsets` variants: they receive the distance to each endpoint
//! computed without cancellation, which keeps factors such as `t - b` exact
//! when `t` sits a few ulps away from `b`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Tolerances and refinement budget for a single integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinement_levels: u32,
    /// Declared algebraic exponents at (lo, hi); `0.0` means bounded.
    pub endpoint_exponents: (f64, f64),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_refinement_levels: 12,
            endpoint_exponents: (-0.5, -0.5),
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadError> {
        let (e0, e1) = self.endpoint_exponents;
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(QuadError::InvalidSpec("tolerances must be positive".into()));
        }
        if !(e0 > -1.0 && e0 <= 0.0 && e1 > -1.0 && e1 <= 0.0) {
            return Err(QuadError::InvalidSpec(
                "endpoint exponents must lie in (-1, 0]".into(),
            ));
        }
        if self.max_refinement_levels < 2 || self.max_refinement_levels > 20 {
            return Err(QuadError::InvalidSpec(
                "max_refinement_levels must be in 2..=20".into(),
            ));
        }
        Ok(())
    }

    /// Same spec with both tolerances halved.
    pub fn halved(&self) -> Self {
        Self {
            rel_tol: 0.5 * self.rel_tol,
            abs_tol: 0.5 * self.abs_tol,
            ..*self
        }
    }

    pub fn with_exponents(self, lo: f64, hi: f64) -> Self {
        Self {
            endpoint_exponents: (lo, hi),
            ..self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub levels: u32,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("no convergence after {} levels: value {} (estimate {})", .best.levels, .best.value, .best.err_estimate)]
    NoConvergence { best: QuadResult },
    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
}

impl QuadError {
    /// Best available value, if the failure still produced one.
    pub fn best_value(&self) -> Option<f64> {
        match self {
            QuadError::NoConvergence { best } => Some(best.value),
            _ => None,
        }
    }
}

/// Largest |u| used by the maps; keeps offsets and abscissae finite.
const U_CAP: f64 = 340.0;

/// Transformed-variable half range needed so that the neglected endpoint
/// tail of a `d^alpha` singularity stays below about 1e-18.
fn endpoint_u(alpha: f64) -> f64 {
    (21.0 / (1.0 + alpha)).min(U_CAP)
}

fn finish(
    spec: &QuadratureSpec,
    levels: &[f64],
    evaluations: usize,
) -> Result<QuadResult, QuadError> {
    let n = levels.len();
    let value = levels[n - 1];
    let err = (levels[n - 1] - levels[n - 2]).abs();
    let res = QuadResult {
        value,
        err_estimate: err,
        levels: n as u32 - 1,
        evaluations,
    };
    if err <= spec.target(value) {
        Ok(res)
    } else {
        Err(QuadError::NoConvergence { best: res })
    }
}

/// Generic refinement driver. `term(s)` returns the weighted integrand at
/// transformed abscissa `s` (already multiplied by the Jacobian).
fn refine<T>(
    spec: &QuadratureSpec,
    s_lo: f64,
    s_hi: f64,
    mut term: T,
) -> Result<QuadResult, QuadError>
where
    T: FnMut(f64) -> Result<f64, QuadError>,
{
    spec.validate()?;
    // Level 0 uses unit spacing in s, aligned on s = 0.
    let mut h = 1.0_f64;
    let k_lo = (s_lo / h).ceil() as i64;
    let k_hi = (s_hi / h).floor() as i64;
    let mut sum = 0.0;
    let mut evaluations = 0usize;
    for k in k_lo..=k_hi {
        sum += term(k as f64 * h)?;
        evaluations += 1;
    }
    let mut estimates = vec![sum * h];
    for level in 1..=spec.max_refinement_levels {
        h *= 0.5;
        let k_lo = (s_lo / h).ceil() as i64;
        let k_hi = (s_hi / h).floor() as i64;
        // Only odd multiples of the new step are new nodes.
        let first = if k_lo % 2 == 0 { k_lo + 1 } else { k_lo };
        let mut k = first;
        while k <= k_hi {
            sum += term(k as f64 * h)?;
            evaluations += 1;
            k += 2;
        }
        estimates.push(sum * h);
        if level >= 3 {
            let n = estimates.len();
            let v = estimates[n - 1];
            if (v - estimates[n - 2]).abs() <= spec.target(v) {
                return finish(spec, &estimates, evaluations);
            }
        }
    }
    finish(spec, &estimates, evaluations)
}

/// Integrate `f(t, t - lo, hi - t)` over `[lo, hi]` with tanh-sinh nodes.
pub fn integrate_singular_offsets<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QuadError::InvalidInterval { lo, hi });
    }
    let half = 0.5 * (hi - lo);
    let u_lo = endpoint_u(spec.endpoint_exponents.0);
    let u_hi = endpoint_u(spec.endpoint_exponents.1);
    let s_lo = -(u_lo / FRAC_PI_2).asinh();
    let s_hi = (u_hi / FRAC_PI_2).asinh();
    refine(spec, s_lo, s_hi, |s| {
        let u = FRAC_PI_2 * s.sinh();
        // 1 + tanh u and 1 - tanh u without cancellation.
        let d_lo = 2.0 * half / (1.0 + (-2.0 * u).exp());
        let d_hi = 2.0 * half / (1.0 + (2.0 * u).exp());
        if d_lo == 0.0 || d_hi == 0.0 {
            return Ok(0.0);
        }
        let t = if u < 0.0 { lo + d_lo } else { hi - d_hi };
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * s.cosh() / (cu * cu);
        let v = f(t, d_lo, d_hi);
        if !v.is_finite() {
            return Err(QuadError::NonFinite { t });
        }
        Ok(w * v)
    })
}

/// Integrate `f` over `[lo, hi]`; endpoint singularities are allowed.
pub fn integrate_singular<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_singular_offsets(|t, _, _| f(t), lo, hi, spec)
}

/// Integrate `f(t, t - lo)` over `[lo, ∞)` with exp-sinh nodes.
///
/// The integrand must decay at least like `t^-2`. When `singular_at_lo` is
/// false the lower endpoint is treated as bounded regardless of the declared
/// exponent.
pub fn integrate_to_infinity_offsets<F>(
    f: F,
    lo: f64,
    spec: &QuadratureSpec,
    singular_at_lo: bool,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64) -> f64,
{
    if !lo.is_finite() {
        return Err(QuadError::InvalidInterval { lo, hi: f64::INFINITY });
    }
    let alpha = if singular_at_lo {
        spec.endpoint_exponents.0
    } else {
        0.0
    };
    // Offsets here decay like exp(-v) rather than exp(-2u).
    let v_lo = (2.0 * endpoint_u(alpha)).min(690.0);
    // Tail of a t^-2 integrand behaves like exp(-v).
    let v_hi = 45.0;
    let s_lo = -(v_lo / FRAC_PI_2).asinh();
    let s_hi = (v_hi / FRAC_PI_2).asinh();
    refine(spec, s_lo, s_hi, |s| {
        let v = FRAC_PI_2 * s.sinh();
        let d = v.exp();
        if d == 0.0 {
            return Ok(0.0);
        }
        let t = lo + d;
        let w = FRAC_PI_2 * s.cosh() * d;
        let val = f(t, d);
        if !val.is_finite() {
            return Err(QuadError::NonFinite { t });
        }
        Ok(w * val)
    })
}

/// Integrate `f` over `[lo, ∞)`.
pub fn integrate_to_infinity<F>(
    f: F,
    lo: f64,
    spec: &QuadratureSpec,
    singular_at_lo: bool,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_to_infinity_offsets(|t, _| f(t), lo, spec, singular_at_lo)
}

/// Trapezoid rule on the circle `center + radius·e^{iθ}`, counterclockwise.
///
/// Nodes are visited in order of increasing θ starting at θ = 0, so a
/// stateful `f` may continue a branch from one node to the next.
pub fn contour_integral<F>(mut f: F, center: Complex64, radius: f64, n_nodes: usize) -> Complex64
where
    F: FnMut(Complex64) -> Complex64,
{
    let n = n_nodes.max(1);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let e = Complex64::from_polar(1.0, theta);
        let z = center + radius * e;
        // dz = i·r·e^{iθ} dθ
        acc += f(z) * Complex64::i() * radius * e;
    }
    acc * (2.0 * PI / n as f64)
}
