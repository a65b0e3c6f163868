//! The parameter domain of the half piece as a rectangle in strip coordinates.
//!
//! The closed first quadrant of the z-plane is mapped conformally onto the
//! strip 0 ≤ σ ≤ π by ω = τ + iσ = log((z²−a²)/(1−z²)). The segment ED
//! (a < z < 1) becomes σ = 0. Every other stretch lies on σ = π, ordered by τ:
//! FE, LF, AL, BA, CB, DC, with corners F, L, A, B, C between them. The ends
//! E and D sit at τ = −∞ and τ = +∞ and are cut off at finite τ. The point
//! A (z = ∞) is an ordinary grid node.

use super::MeshError;
use crate::weier::{Stretch, SurfaceParams, C64};
use std::f64::consts::PI;

/// Boundary corners on σ = π, in increasing τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    F,
    L,
    A,
    B,
    C,
}

impl Corner {
    pub const ALL: [Corner; 5] = [Corner::F, Corner::L, Corner::A, Corner::B, Corner::C];

    /// The real abscissa |z| of the corner; `None` for A at infinity.
    pub fn abscissa(self, p: &SurfaceParams) -> Option<f64> {
        match self {
            Corner::F => Some(p.x),
            Corner::L => Some(0.0),
            Corner::A => None,
            Corner::B => Some(p.b),
            Corner::C => Some(p.y),
        }
    }

    /// The z-value of the corner (A is reported as i·∞).
    pub fn z(self, p: &SurfaceParams) -> C64 {
        match self.abscissa(p) {
            Some(c) => C64::new(c, 0.0),
            None => C64::new(0.0, f64::INFINITY),
        }
    }

    /// e^ω at the corner, i.e. (c²−a²)/(1−c²).
    pub fn exp_omega(self, p: &SurfaceParams) -> f64 {
        match self.abscissa(p) {
            Some(c) => (c * c - p.a * p.a) / (1.0 - c * c),
            None => -1.0,
        }
    }

    pub fn tau(self, p: &SurfaceParams) -> f64 {
        self.exp_omega(p).abs().ln()
    }

    pub fn omega(self, p: &SurfaceParams) -> C64 {
        C64::new(self.tau(p), PI)
    }

    pub fn name(self) -> &'static str {
        match self {
            Corner::F => "F",
            Corner::L => "L",
            Corner::A => "A",
            Corner::B => "B",
            Corner::C => "C",
        }
    }
}

/// The two Scherk ends of the half piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    E,
    D,
}

/// Classification of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeTag {
    Interior,
    Boundary(Stretch),
    Corner(Corner),
    /// On the truncation line of an end but not on a stretch.
    Cut(End),
}

/// Radii of the discs removed around the punctures z = a and z = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutRadii {
    pub e: f64,
    pub d: f64,
}

impl CutRadii {
    /// A quarter of the distance from each puncture to its nearest neighbour.
    pub fn default_for(p: &SurfaceParams) -> Self {
        Self {
            e: 0.25 * (p.a - p.x).min(1.0 - p.a),
            d: 0.25 * (p.y - 1.0).min(1.0 - p.a),
        }
    }

    fn validate(&self, p: &SurfaceParams) -> Result<(), MeshError> {
        let ok_e = self.e > 0.0 && self.e < (p.a - p.x).min(1.0 - p.a);
        let ok_d = self.d > 0.0 && self.d < (p.y - 1.0).min(1.0 - p.a);
        if ok_e && ok_d && self.e + self.d < 1.0 - p.a {
            Ok(())
        } else {
            Err(MeshError::InvalidCut(format!(
                "cut radii (E {}, D {}) must be positive and keep the discs disjoint inside (x, y)",
                self.e, self.d
            )))
        }
    }
}

/// Structured triangulated grid on the strip rectangle.
#[derive(Debug, Clone)]
pub struct DomainGrid {
    pub params: SurfaceParams,
    pub resolution: usize,
    pub cuts: CutRadii,
    /// Cells along τ and along σ.
    pub n_tau: usize,
    pub n_sigma: usize,
    pub tau: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Node ω-values, index `i * (n_sigma + 1) + j`.
    pub omega: Vec<C64>,
    /// Node z-values; the node at A holds i·∞.
    pub z: Vec<C64>,
    pub tags: Vec<NodeTag>,
    /// Horizontal edges, then vertical, then diagonal.
    pub edges: Vec<[usize; 2]>,
    pub corner_nodes: [(Corner, usize); 5],
}

/// Monotone piecewise cubic Hermite interpolation (Fritsch–Carlson slopes).
struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Pchip {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        let h: Vec<f64> = (0..n - 1).map(|k| xs[k + 1] - xs[k]).collect();
        let del: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut ds = vec![0.0; n];
        for k in 1..n - 1 {
            if del[k - 1] * del[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                ds[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if d.signum() != d0.signum() {
                0.0
            } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                d
            }
        };
        if n > 2 {
            ds[0] = end(h[0], h[1], del[0], del[1]);
            ds[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        } else {
            ds[0] = del[0];
            ds[1] = del[0];
        }
        Self { xs, ys, ds }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let k = match self.xs.iter().position(|&v| v > x) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => n - 2,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.ds[k] + h01 * self.ys[k + 1] + h11 * h * self.ds[k + 1]
    }
}

/// Number of τ-slots shared between the knot intervals; corners land on
/// nodes whenever 2·resolution is a multiple of it.
pub const TAU_SLOTS: usize = 16;

fn slot_allocation(lengths: &[f64]) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    let mut slots: Vec<usize> = lengths
        .iter()
        .map(|l| ((TAU_SLOTS as f64 * l / total).round() as usize).max(1))
        .collect();
    // Fix the sum by adjusting the intervals with the largest rounding slack.
    loop {
        let sum: usize = slots.iter().sum();
        if sum == TAU_SLOTS {
            break;
        }
        let excess = |k: usize| slots[k] as f64 - TAU_SLOTS as f64 * lengths[k] / total;
        if sum > TAU_SLOTS {
            let k = (0..slots.len())
                .filter(|&k| slots[k] > 1)
                .max_by(|&i, &j| excess(i).total_cmp(&excess(j)))
                .expect("at least one interval can shrink");
            slots[k] -= 1;
        } else {
            let k = (0..slots.len())
                .min_by(|&i, &j| excess(i).total_cmp(&excess(j)))
                .expect("non-empty");
            slots[k] += 1;
        }
    }
    slots
}

/// τ of the truncation lines for the given cut radii.
pub fn tau_limits(p: &SurfaceParams, cuts: &CutRadii) -> (f64, f64) {
    let a2 = p.a * p.a;
    let tau_of = |z: f64| {
        let xi = z * z;
        ((xi - a2) / (1.0 - xi)).abs().ln()
    };
    // The level curves of τ are Apollonius circles; taking the larger
    // (resp. smaller) τ of the two real crossings keeps every node outside
    // the removed disc.
    let lo = tau_of(p.a + cuts.e).max(tau_of(p.a - cuts.e));
    let hi = tau_of(1.0 - cuts.d).min(tau_of(1.0 + cuts.d));
    (lo, hi)
}

/// z from ω on the quadrant (A is returned as i·∞).
pub fn z_of_omega(p: &SurfaceParams, omega: C64) -> C64 {
    let e = omega.exp();
    let one_plus_e = 1.0 + e;
    if one_plus_e.norm() == 0.0 {
        return C64::new(0.0, f64::INFINITY);
    }
    let xi = (p.a * p.a + e) / one_plus_e;
    let xi = C64::new(xi.re, xi.im.max(0.0));
    let z = crate::weier::upper_sqrt(xi);
    C64::new(z.re.max(0.0), z.im.max(0.0))
}

/// Build the grid at `resolution` (a multiple of 8, at least 16): 2·resolution
/// cells along τ and resolution/2 along σ.
pub fn build_grid(
    p: &SurfaceParams,
    resolution: usize,
    cuts: CutRadii,
) -> Result<DomainGrid, MeshError> {
    p.validate().map_err(|e| MeshError::InvalidParams(e.to_string()))?;
    if resolution < 16 || !resolution.is_multiple_of(8) || resolution > 8192 {
        return Err(MeshError::InvalidResolution(resolution));
    }
    cuts.validate(p)?;
    let (tau_min, tau_max) = tau_limits(p, &cuts);
    let knots_tau = [
        tau_min,
        Corner::F.tau(p),
        Corner::L.tau(p),
        Corner::A.tau(p),
        Corner::B.tau(p),
        Corner::C.tau(p),
        tau_max,
    ];
    if knots_tau.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MeshError::InvalidCut(
            "cut lines must lie beyond the boundary corners".into(),
        ));
    }
    let lengths: Vec<f64> = knots_tau.windows(2).map(|w| w[1] - w[0]).collect();
    let slots = slot_allocation(&lengths);
    let mut knots_u = vec![0usize];
    for s in &slots {
        knots_u.push(knots_u.last().unwrap() + s);
    }
    let map = Pchip::new(
        knots_u.iter().map(|&k| k as f64 / TAU_SLOTS as f64).collect(),
        knots_tau.to_vec(),
    );
    let n_tau = 2 * resolution;
    let n_sigma = resolution / 2;
    let per_slot = n_tau / TAU_SLOTS;
    let tau: Vec<f64> = (0..=n_tau)
        .map(|i| {
            if i % per_slot == 0 {
                // Knots exactly, so the corners are reproduced bit for bit.
                let k = i / per_slot;
                match knots_u.iter().position(|&u| u == k) {
                    Some(m) => knots_tau[m],
                    None => map.eval(i as f64 / n_tau as f64),
                }
            } else {
                map.eval(i as f64 / n_tau as f64)
            }
        })
        .collect();
    let sigma: Vec<f64> = (0..=n_sigma)
        .map(|j| {
            if j == n_sigma {
                PI
            } else {
                PI * j as f64 / n_sigma as f64
            }
        })
        .collect();
    let ns1 = n_sigma + 1;
    let idx = |i: usize, j: usize| i * ns1 + j;
    let corner_index: Vec<(Corner, usize)> = Corner::ALL
        .iter()
        .zip(&knots_u[1..6])
        .map(|(&c, &k)| (c, k * per_slot))
        .collect();
    let mut omega = Vec::with_capacity((n_tau + 1) * ns1);
    let mut z = Vec::with_capacity(omega.capacity());
    let mut tags = Vec::with_capacity(omega.capacity());
    for (i, &ti) in tau.iter().enumerate() {
        for (j, &sj) in sigma.iter().enumerate() {
            let w = C64::new(ti, sj);
            omega.push(w);
            let corner = corner_index
                .iter()
                .find(|(_, ci)| *ci == i && j == n_sigma)
                .map(|(c, _)| *c);
            let zi = match corner {
                Some(c) => c.z(p),
                None => z_of_omega(p, w),
            };
            z.push(zi);
            tags.push(classify(i, j, n_tau, n_sigma, corner, &corner_index));
        }
    }
    let mut edges = Vec::new();
    for i in 0..n_tau {
        for j in 0..=n_sigma {
            edges.push([idx(i, j), idx(i + 1, j)]);
        }
    }
    for i in 0..=n_tau {
        for j in 0..n_sigma {
            edges.push([idx(i, j), idx(i, j + 1)]);
        }
    }
    for i in 0..n_tau {
        for j in 0..n_sigma {
            edges.push([idx(i, j), idx(i + 1, j + 1)]);
        }
    }
    let corner_nodes = [0, 1, 2, 3, 4].map(|k| {
        let (c, i) = corner_index[k];
        (c, idx(i, n_sigma))
    });
    Ok(DomainGrid {
        params: *p,
        resolution,
        cuts,
        n_tau,
        n_sigma,
        tau,
        sigma,
        omega,
        z,
        tags,
        edges,
        corner_nodes,
    })
}

fn classify(
    i: usize,
    j: usize,
    n_tau: usize,
    n_sigma: usize,
    corner: Option<Corner>,
    corners: &[(Corner, usize)],
) -> NodeTag {
    if let Some(c) = corner {
        return NodeTag::Corner(c);
    }
    if j == 0 {
        return NodeTag::Boundary(Stretch::ED);
    }
    if j == n_sigma {
        let pos = |c: Corner| corners.iter().find(|(k, _)| *k == c).unwrap().1;
        let st = if i < pos(Corner::F) {
            Stretch::FE
        } else if i < pos(Corner::L) {
            Stretch::LF
        } else if i < pos(Corner::A) {
            Stretch::AL
        } else if i < pos(Corner::B) {
            Stretch::BA
        } else if i < pos(Corner::C) {
            Stretch::CB
        } else {
            Stretch::DC
        };
        return NodeTag::Boundary(st);
    }
    if i == 0 {
        return NodeTag::Cut(End::E);
    }
    if i == n_tau {
        return NodeTag::Cut(End::D);
    }
    NodeTag::Interior
}

impl DomainGrid {
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.n_sigma + 1) + j
    }

    pub fn node_count(&self) -> usize {
        self.omega.len()
    }

    pub fn corner_node(&self, c: Corner) -> usize {
        self.corner_nodes.iter().find(|(k, _)| *k == c).unwrap().1
    }

    /// Node indices along a stretch, corners included, in increasing τ
    /// (ED runs from E to D).
    pub fn stretch_nodes(&self, s: Stretch) -> Vec<usize> {
        let top = self.n_sigma;
        let ci = |c: Corner| self.corner_node(c) / (self.n_sigma + 1);
        let row = |lo: usize, hi: usize| (lo..=hi).map(|i| self.node(i, top)).collect();
        match s {
            Stretch::ED => (0..=self.n_tau).map(|i| self.node(i, 0)).collect(),
            Stretch::FE => row(0, ci(Corner::F)),
            Stretch::LF => row(ci(Corner::F), ci(Corner::L)),
            Stretch::AL => row(ci(Corner::L), ci(Corner::A)),
            Stretch::BA => row(ci(Corner::A), ci(Corner::B)),
            Stretch::CB => row(ci(Corner::B), ci(Corner::C)),
            Stretch::DC => row(ci(Corner::C), self.n_tau),
        }
    }

    /// Triangles: two per cell, split along the (i,j)–(i+1,j+1) diagonal.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(2 * self.n_tau * self.n_sigma);
        for i in 0..self.n_tau {
            for j in 0..self.n_sigma {
                let (a, b, c, d) = (
                    self.node(i, j),
                    self.node(i + 1, j),
                    self.node(i + 1, j + 1),
                    self.node(i, j + 1),
                );
                out.push([a, b, c]);
                out.push([a, c, d]);
            }
        }
        out
    }

    /// Distance in ω from a node to the nearest strip edge, cut line or corner.
    pub fn interior_distance(&self, n: usize) -> f64 {
        let w = self.omega[n];
        let p = &self.params;
        let mut d = w.im.min(PI - w.im);
        d = d.min(w.re - self.tau[0]).min(self.tau[self.n_tau] - w.re);
        for c in Corner::ALL {
            d = d.min((w - c.omega(p)).norm());
        }
        d
    }
}
