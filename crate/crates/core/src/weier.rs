//! The curve w² = ((b+z)/(b−z))·((x−z)/(x+z))·((y+z)/(y−z)) and the
//! Weierstrass data (g, dh) of the saddle towers.
//!
//! The branch of w used throughout is the one continued from w(0) = +1.
//! On the closed upper half plane it has the closed form
//! √((b+z)/(b−z))·√((x−z)/(x+z))·√((y+z)/(y−z)) with principal roots, where
//! the second factor maps the upper half plane to the lower one and so takes
//! its real-axis values from below. With this anchor g(A) = g(∞) = 1 and g has
//! a pole at the origin L.

use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

pub type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierError {
    #[error("parameter domain violated: {0}")]
    DomainViolation(String),
    #[error("path passes within {clearance:e} of branch point {branch_point}")]
    PathThroughBranchPoint { branch_point: f64, clearance: f64 },
    #[error("branch continuation step underflow near z = {z}")]
    StepUnderflow { z: C64 },
    #[error("Gauss map has a pole at z = {z}")]
    GaussMapPole { z: C64 },
    #[error("z = {z} is a Scherk end puncture")]
    PoleAtEnd { z: C64 },
    #[error("rotated data undefined at z = {z} (g in {{0, ±i, ∞}})")]
    DegeneratePoint { z: C64 },
}

/// The five real moduli, with `big_x` standing for X.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceParams {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub big_x: f64,
    pub y: f64,
    /// y − 1 to full relative precision. Roots of the residue equation can
    /// lie within 1e-10 of 1, where `y` alone no longer resolves them.
    pub y_minus_1: f64,
}

impl SurfaceParams {
    /// Checked constructor: 0 < x < a < 1 < y < b and a ≤ X < 1.
    pub fn new(a: f64, b: f64, x: f64, big_x: f64, y: f64) -> Result<Self, WeierError> {
        let p = Self { a, b, x, big_x, y, y_minus_1: y - 1.0 };
        p.validate()?;
        Ok(p)
    }

    /// Like [`SurfaceParams::new`], with y given through y − 1.
    pub fn with_y_offset(
        a: f64,
        b: f64,
        x: f64,
        big_x: f64,
        y_minus_1: f64,
    ) -> Result<Self, WeierError> {
        let p = Self { a, b, x, big_x, y: 1.0 + y_minus_1, y_minus_1 };
        p.validate()?;
        Ok(p)
    }

    /// Build from the family coordinates t = a − x and X = a + X_offset.
    pub fn from_family(t: f64, x_offset: f64, a: f64, b: f64, y: f64) -> Result<Self, WeierError> {
        Self::new(a, b, a - t, a + x_offset, y)
    }

    pub fn validate(&self) -> Result<(), WeierError> {
        let Self { a, b, x, big_x, y, y_minus_1 } = *self;
        let all_finite = [a, b, x, big_x, y, y_minus_1].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(WeierError::DomainViolation("non-finite modulus".into()));
        }
        if !(0.0 < x && x < a && a < 1.0 && 1.0 < y && y < b) {
            return Err(WeierError::DomainViolation(format!(
                "need 0 < x < a < 1 < y < b, got x={x}, a={a}, y={y}, b={b}"
            )));
        }
        if !(a <= big_x && big_x < 1.0) {
            return Err(WeierError::DomainViolation(format!(
                "need a <= X < 1, got a={a}, X={big_x}"
            )));
        }
        if !(y_minus_1 > 0.0 && ((y - 1.0) - y_minus_1).abs() <= 2.0 * f64::EPSILON * y) {
            return Err(WeierError::DomainViolation(format!(
                "y - 1 = {y_minus_1:e} is inconsistent with y = {y}"
            )));
        }
        Ok(())
    }

    /// Family parameter t = a − x.
    pub fn t(&self) -> f64 {
        self.a - self.x
    }

    pub fn x_offset(&self) -> f64 {
        self.big_x - self.a
    }

    /// Branch points of w in the closed right half line, ascending.
    pub fn branch_points(&self) -> [f64; 3] {
        [self.x, self.y, self.b]
    }

    /// Smallest gap between distinct branch points ±x, ±y, ±b.
    pub fn min_branch_gap(&self) -> f64 {
        (2.0 * self.x).min(self.y - self.x).min(self.b - self.y)
    }
}

impl fmt::Display for SurfaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={:.17e} b={:.17e} x={:.17e} X={:.17e} y={:.17e}",
            self.a, self.b, self.x, self.big_x, self.y
        )
    }
}

/// Polynomial coefficients S₁…S₅ of the quartic identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymFuncs {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub s5: f64,
}

impl SymFuncs {
    /// Coefficients from raw moduli; `a` does not enter.
    pub fn from_moduli(b: f64, x: f64, big_x: f64, y: f64) -> Self {
        let e2 = b * y - b * x - x * y;
        let e1 = x - b - y;
        let xx = big_x * big_x;
        Self {
            s1: x + 2.0 * big_x - b - y,
            s2: e2 + 2.0 * e1 * big_x + xx,
            s3: b * x * y + 2.0 * e2 * big_x + e1 * xx,
            s4: 2.0 * b * x * y * big_x + e2 * xx,
            s5: b * x * y * xx,
        }
    }

    /// z⁴ + S₂z² + S₄ as a function of ξ = z².
    pub fn quartic(&self, xi: C64) -> C64 {
        xi * xi + self.s2 * xi + self.s4
    }

    /// S₁z⁴ + S₃z² + S₅ as a function of ξ = z².
    pub fn even_part(&self, xi: C64) -> C64 {
        self.s1 * xi * xi + self.s3 * xi + self.s5
    }
}

pub fn sym_funcs(p: &SurfaceParams) -> SymFuncs {
    SymFuncs::from_moduli(p.b, p.x, p.big_x, p.y)
}

/// Roots of z⁴ + S₂z² + S₄, the candidates for vertical normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalNormals {
    /// Two ± pairs: `[r, −r, s, −s]`.
    pub roots: [C64; 4],
    /// True when S₂² < 4S₄, i.e. the roots form a conjugate quadruple off the axes.
    pub off_axis: bool,
}

pub fn vertical_normal_points(s: &SymFuncs) -> VerticalNormals {
    let disc = C64::new(s.s2 * s.s2 - 4.0 * s.s4, 0.0).sqrt();
    let u1 = 0.5 * (-s.s2 + disc);
    let u2 = 0.5 * (-s.s2 - disc);
    let r = u1.sqrt();
    let q = u2.sqrt();
    VerticalNormals {
        roots: [r, -r, q, -q],
        off_axis: s.s2 * s.s2 < 4.0 * s.s4,
    }
}

/// Principal square root, except that on the negative real axis the value
/// is the limit from the upper (`side = 1`) or lower (`side = -1`) half plane.
fn side_sqrt(q: C64, side: f64) -> C64 {
    if q.im == 0.0 && q.re < 0.0 {
        C64::new(0.0, side * (-q.re).sqrt())
    } else {
        q.sqrt()
    }
}

/// Square root with the cut approached from above: −r ↦ i√r.
pub fn upper_sqrt(q: C64) -> C64 {
    side_sqrt(q, 1.0)
}

/// Right-hand side of the curve equation.
pub fn w_squared(p: &SurfaceParams, z: C64) -> C64 {
    (p.b + z) / (p.b - z) * ((p.x - z) / (p.x + z)) * ((p.y + z) / (p.y - z))
}

/// z with its differences to the special abscissae, formed without
/// cancellation where the caller can do so.
///
/// All points of interest lie in the closed first quadrant, so rounding
/// noise that pushes them across an axis is removed before any branch is
/// taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZParts {
    pub z: C64,
    /// ξ = z².
    pub xi: C64,
    pub z_minus_x: C64,
    pub z_minus_y: C64,
    pub z_minus_b: C64,
    pub xi_minus_1: C64,
    pub xi_minus_a2: C64,
    pub xi_minus_bigx2: C64,
}

fn clamp_im(v: C64) -> C64 {
    C64::new(v.re, v.im.max(0.0))
}

impl ZParts {
    pub fn new(p: &SurfaceParams, z: C64) -> Self {
        let xi = z * z;
        Self {
            z,
            xi,
            z_minus_x: z - p.x,
            z_minus_y: z - p.y,
            z_minus_b: z - p.b,
            xi_minus_1: xi - 1.0,
            xi_minus_a2: xi - p.a * p.a,
            xi_minus_bigx2: xi - p.big_x * p.big_x,
        }
    }

    /// Assemble from accurately computed pieces and snap into the closed
    /// first quadrant.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        z: C64,
        xi: C64,
        z_minus_x: C64,
        z_minus_y: C64,
        z_minus_b: C64,
        xi_minus_1: C64,
        xi_minus_a2: C64,
        xi_minus_bigx2: C64,
    ) -> Self {
        let z = C64::new(z.re.max(0.0), z.im.max(0.0));
        Self {
            z,
            xi,
            z_minus_x: clamp_im(z_minus_x),
            z_minus_y: clamp_im(z_minus_y),
            z_minus_b: clamp_im(z_minus_b),
            xi_minus_1,
            xi_minus_a2,
            xi_minus_bigx2,
        }
    }

    /// (z − b)(z − y)(z + x)
    fn p_factor(&self, p: &SurfaceParams) -> C64 {
        self.z_minus_b * self.z_minus_y * (self.z + p.x)
    }
}

/// The quadrant branch of w (continued from w(0) = 1 inside the closed
/// upper half plane).
pub fn w_upper(p: &SurfaceParams, z: C64) -> C64 {
    w_from_parts(p, &ZParts::new(p, z))
}

/// Quadrant branch of w from accurately formed differences.
pub fn w_from_parts(p: &SurfaceParams, zp: &ZParts) -> C64 {
    let z = zp.z;
    let f1 = (p.b + z) / (-zp.z_minus_b);
    let f2 = (-zp.z_minus_x) / (p.x + z);
    let f3 = (p.y + z) / (-zp.z_minus_y);
    side_sqrt(f1, 1.0) * side_sqrt(f2, -1.0) * side_sqrt(f3, 1.0)
}

/// A point of the curve with a chosen value of w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub z: C64,
    pub w: C64,
}

impl CurvePoint {
    /// Point on the quadrant sheet (closed upper half plane).
    pub fn upper(p: &SurfaceParams, z: C64) -> Self {
        Self {
            z,
            w: w_upper(p, z),
        }
    }

    /// Relative residual of the curve equation.
    pub fn residual(&self, p: &SurfaceParams) -> f64 {
        let rhs = w_squared(p, self.z);
        (self.w * self.w - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE)
    }
}

/// Continue w from w(0) = 1 along the polyline 0 → `via`… → `z`.
///
/// Each straight piece is walked in steps that are halved until |Δw| stays
/// below a tenth of |w|. `clearance` defaults to 1e-6 times the smallest gap
/// between branch points.
pub fn w_eval(
    p: &SurfaceParams,
    z: C64,
    via: &[C64],
    clearance: Option<f64>,
) -> Result<CurvePoint, WeierError> {
    let clearance = clearance.unwrap_or(1e-6 * p.min_branch_gap());
    let mut verts = Vec::with_capacity(via.len() + 2);
    verts.push(C64::new(0.0, 0.0));
    verts.extend_from_slice(via);
    verts.push(z);
    let branch = [p.x, -p.x, p.y, -p.y, p.b, -p.b];
    let mut cur = verts[0];
    let mut w = C64::new(1.0, 0.0);
    for target in verts.iter().skip(1) {
        for &bp in &branch {
            if segment_distance(cur, *target, C64::new(bp, 0.0)) < clearance {
                return Err(WeierError::PathThroughBranchPoint {
                    branch_point: bp,
                    clearance,
                });
            }
        }
        let mut step = 1.0_f64;
        let mut done = 0.0_f64;
        let seg = *target - cur;
        let start = cur;
        while done < 1.0 {
            let frac = (done + step).min(1.0);
            let zn = if frac == 1.0 { *target } else { start + seg * frac };
            let root = w_squared(p, zn).sqrt();
            let cand = if (root - w).norm() <= (root + w).norm() {
                root
            } else {
                -root
            };
            if (cand - w).norm() < 0.1 * w.norm() {
                w = cand;
                done = frac;
                step *= 2.0;
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    return Err(WeierError::StepUnderflow { z: zn });
                }
            }
        }
        cur = *target;
    }
    Ok(CurvePoint { z, w })
}

fn segment_distance(a: C64, b: C64, q: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = (((q - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - q).norm()
}

/// Value of the Gauss map, allowing the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussValue {
    Finite(C64),
    Infinite,
}

impl GaussValue {
    pub fn finite(self) -> Option<C64> {
        match self {
            GaussValue::Finite(g) => Some(g),
            GaussValue::Infinite => None,
        }
    }
}

/// u = (X+z)/(w(X−z)), returned as (u, 1/u) with the tiny one exact.
fn divisor_ratio(p: &SurfaceParams, cp: &CurvePoint) -> (C64, C64) {
    let num = p.big_x + cp.z;
    let den = cp.w * (p.big_x - cp.z);
    (num / den, den / num)
}

fn gauss_value(p: &SurfaceParams, cp: &CurvePoint) -> GaussValue {
    let (u, v) = divisor_ratio(p, cp);
    if u.norm() <= 1.0 {
        let d = u - 1.0;
        if d.norm() <= 1e-14 {
            return GaussValue::Infinite;
        }
        GaussValue::Finite(I * (1.0 + u) / d)
    } else {
        // g = i(1+1/u)/(1−1/u); stays finite at z = X and at w = 0.
        let d = 1.0 - v;
        if d.norm() <= 1e-14 {
            return GaussValue::Infinite;
        }
        GaussValue::Finite(I * (1.0 + v) / d)
    }
}

/// Gauss map from the divisor relation w(g+i)/(g−i) = (X+z)/(X−z).
pub fn g_eval(p: &SurfaceParams, cp: &CurvePoint) -> Result<C64, WeierError> {
    gauss_value(p, cp)
        .finite()
        .ok_or(WeierError::GaussMapPole { z: cp.z })
}

fn end_puncture(p: &SurfaceParams, z: C64) -> bool {
    [1.0, -1.0, p.a, -p.a]
        .iter()
        .any(|&e| (z - e).norm() <= 1e-14 * (1.0 + e.abs()))
}

/// Density of dh against dz.
pub fn dh_eval(p: &SurfaceParams, s: &SymFuncs, cp: &CurvePoint) -> Result<C64, WeierError> {
    if end_puncture(p, cp.z) {
        return Err(WeierError::PoleAtEnd { z: cp.z });
    }
    let zp = ZParts::new(p, cp.z);
    Ok(dh_density(p, s, &zp, cp.w))
}

fn dh_density(p: &SurfaceParams, s: &SymFuncs, zp: &ZParts, w: C64) -> C64 {
    let den = zp.p_factor(p) * w * zp.xi_minus_1 * zp.xi_minus_a2;
    zp.z * s.quartic(zp.xi) / den
}

/// Densities (φ₁, φ₂, φ₃) against dz on the quadrant sheet, in the reduced
/// forms that stay finite where g has a zero or pole:
/// φ₁ = −i(S₁z⁴+S₃z²+S₅)/D, φ₃ = z(z⁴+S₂z²+S₄)/D with
/// D = (z−b)(z−y)(z+x)·w·(z²−1)(z²−a²), and φ₂ = (z²−X²)/((a²−z²)(1−z²)).
pub fn phi_from_parts(p: &SurfaceParams, s: &SymFuncs, zp: &ZParts) -> [C64; 3] {
    let w = w_from_parts(p, zp);
    phi_with_w(p, s, zp, w)
}

fn phi_with_w(p: &SurfaceParams, s: &SymFuncs, zp: &ZParts, w: C64) -> [C64; 3] {
    let d_p = zp.z_minus_b * zp.z_minus_y * (zp.z + p.x);
    let den = d_p * w * zp.xi_minus_1 * zp.xi_minus_a2;
    let phi1 = -I * s.even_part(zp.xi) / den;
    let phi3 = zp.z * s.quartic(zp.xi) / den;
    let phi2 = zp.xi_minus_bigx2 / (zp.xi_minus_a2 * zp.xi_minus_1);
    [phi1, phi2, phi3]
}

/// All Weierstrass densities at one curve point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassValue {
    pub g: GaussValue,
    pub dh: C64,
    pub phi1: C64,
    pub phi2: C64,
    pub phi3: C64,
}

impl WeierstrassValue {
    pub fn phi(&self) -> [C64; 3] {
        [self.phi1, self.phi2, self.phi3]
    }
}

pub fn phi_eval(
    p: &SurfaceParams,
    s: &SymFuncs,
    cp: &CurvePoint,
) -> Result<WeierstrassValue, WeierError> {
    if end_puncture(p, cp.z) {
        return Err(WeierError::PoleAtEnd { z: cp.z });
    }
    let zp = ZParts::new(p, cp.z);
    let [phi1, phi2, phi3] = phi_with_w(p, s, &zp, cp.w);
    Ok(WeierstrassValue {
        g: gauss_value(p, cp),
        dh: phi3,
        phi1,
        phi2,
        phi3,
    })
}

/// Weierstrass data rotated by 90° about Ox₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedData {
    /// G = −i(g+i)/(g−i).
    pub big_g: C64,
    /// dH = (i/2)(1/g+g)dh.
    pub dh_big: C64,
    /// The reduced closed form (z²−X²)/((a²−z²)(1−z²)).
    pub dh_big_closed: C64,
}

impl RotatedData {
    pub fn closed_form_rel_err(&self) -> f64 {
        (self.dh_big - self.dh_big_closed).norm() / self.dh_big_closed.norm().max(1e-300)
    }
}

/// Closed form of dH; the numerator vanishes at z = ±X.
pub fn dh_big_closed(p: &SurfaceParams, z: C64) -> C64 {
    let xi = z * z;
    (xi - p.big_x * p.big_x) / ((p.a * p.a - xi) * (1.0 - xi))
}

pub fn rotated_data(
    p: &SurfaceParams,
    s: &SymFuncs,
    cp: &CurvePoint,
) -> Result<RotatedData, WeierError> {
    let g = g_eval(p, cp)?;
    let scale = 1.0 + g.norm();
    if g.norm() <= 1e-14 || (g - I).norm() <= 1e-12 * scale || (g + I).norm() <= 1e-12 * scale {
        return Err(WeierError::DegeneratePoint { z: cp.z });
    }
    let dh = dh_eval(p, s, cp)?;
    Ok(RotatedData {
        big_g: -I * (g + I) / (g - I),
        dh_big: 0.5 * I * (1.0 / g + g) * dh,
        dh_big_closed: dh_big_closed(p, cp.z),
    })
}

/// The seven boundary stretches of the quadrant, named by their end points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stretch {
    AL,
    LF,
    FE,
    ED,
    DC,
    CB,
    BA,
}

impl Stretch {
    pub const ALL: [Stretch; 7] = [
        Stretch::AL,
        Stretch::LF,
        Stretch::FE,
        Stretch::ED,
        Stretch::DC,
        Stretch::CB,
        Stretch::BA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stretch::AL => "AL",
            Stretch::LF => "LF",
            Stretch::FE => "FE",
            Stretch::ED => "ED",
            Stretch::DC => "DC",
            Stretch::CB => "CB",
            Stretch::BA => "BA",
        }
    }

    /// Parameter interval of the stretch: z = i·t on AL, z = t elsewhere.
    pub fn interval(self, p: &SurfaceParams) -> (f64, f64) {
        match self {
            Stretch::AL => (0.0, f64::INFINITY),
            Stretch::LF => (0.0, p.x),
            Stretch::FE => (p.x, p.a),
            Stretch::ED => (p.a, 1.0),
            Stretch::DC => (1.0, p.y),
            Stretch::CB => (p.y, p.b),
            Stretch::BA => (p.b, f64::INFINITY),
        }
    }

    /// Classify a real abscissa t ≥ 0 lying strictly inside a real stretch.
    pub fn of_real(p: &SurfaceParams, t: f64) -> Option<Stretch> {
        Stretch::ALL[1..]
            .iter()
            .copied()
            .find(|s| {
                let (lo, hi) = s.interval(p);
                t > lo && t < hi
            })
    }

    /// Where the stretch sits as z-values: i·t for AL, t otherwise.
    pub fn point(self, t: f64) -> C64 {
        match self {
            Stretch::AL => C64::new(0.0, t),
            _ => C64::new(t, 0.0),
        }
    }

    /// dz/dt for the orientation used in the symmetry table (AL runs A→L).
    pub fn direction(self) -> C64 {
        match self {
            Stretch::AL => -I,
            _ => C64::new(1.0, 0.0),
        }
    }
}

impl fmt::Display for Stretch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
