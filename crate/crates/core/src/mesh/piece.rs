//! Integration of the immersion over the grid of one fundamental piece.

use super::grid::{Corner, DomainGrid, NodeTag};
use super::strip::StripMap;
use super::{MeshError, TriMesh};
use crate::weier::{Stretch, SurfaceParams};
use rayon::prelude::*;
use std::collections::VecDeque;

/// A triangle whose loop residual exceeds this fraction of its size signals
/// that the sheet of w changed inside it.
pub const BRANCH_RESIDUAL_RATIO: f64 = 1e-3;

/// The integrated half piece, normalized so that L sits on the x₃-axis and
/// the lower mirror level is x₃ = 0.
#[derive(Debug, Clone)]
pub struct PieceMesh {
    pub params: SurfaceParams,
    pub resolution: usize,
    pub mesh: TriMesh,
    /// ω-distance of each vertex to the nearest strip edge, cut or corner.
    pub interior_distance: Vec<f64>,
    pub tags: Vec<NodeTag>,
    pub boundary: Vec<(Stretch, Vec<usize>)>,
    pub corners: [(Corner, usize); 5],
    /// Vertical period, twice the gap between the two mirror levels.
    pub period: f64,
    /// Mean x₃ of ED and of FE after normalization.
    pub level_ed: f64,
    pub level_fe: f64,
    /// Largest |Σ increments| around a triangle.
    pub loop_residual_max: f64,
    /// Largest loop residual divided by the triangle's longest edge.
    pub loop_residual_ratio: f64,
}

/// Deviation of one boundary stretch from its mirror plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneCheck {
    pub stretch: Stretch,
    /// Coordinate held constant (0-based).
    pub axis: usize,
    pub target: f64,
    /// max − min of the coordinate along the stretch.
    pub span: f64,
    /// Largest distance from the target plane.
    pub offset: f64,
}

/// Integrate the immersion over `grid`.
pub fn integrate_piece(p: &SurfaceParams, grid: &DomainGrid) -> Result<PieceMesh, MeshError> {
    let map = StripMap::new(p);
    let inc: Vec<[f64; 3]> = grid
        .edges
        .par_iter()
        .map(|&[u, v]| map.edge_increment(grid.omega[u], grid.omega[v]))
        .collect();
    if let Some(e) = inc.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
        return Err(MeshError::NonFinite { edge: e });
    }

    let (nt, ns) = (grid.n_tau, grid.n_sigma);
    let nh = nt * (ns + 1);
    let nv = (nt + 1) * ns;
    let h = |i: usize, j: usize| i * (ns + 1) + j;
    let v = |i: usize, j: usize| nh + i * ns + j;
    let d = |i: usize, j: usize| nh + nv + i * ns + j;

    let mut loop_max: f64 = 0.0;
    let mut ratio_max: f64 = 0.0;
    for i in 0..nt {
        for j in 0..ns {
            let tris = [
                (h(i, j), v(i + 1, j), d(i, j)),
                (v(i, j), h(i, j + 1), d(i, j)),
            ];
            for (e1, e2, e3) in tris {
                let mut size = 0.0f64;
                let res: f64 = (0..3)
                    .map(|c| (inc[e1][c] + inc[e2][c] - inc[e3][c]).powi(2))
                    .sum();
                for e in [e1, e2, e3] {
                    size = size.max(norm3(inc[e]));
                }
                let res = res.sqrt();
                let ratio = res / size.max(f64::MIN_POSITIVE);
                if ratio > BRANCH_RESIDUAL_RATIO {
                    return Err(MeshError::BranchInconsistency {
                        cell: (i, j),
                        residual: res,
                        size,
                    });
                }
                loop_max = loop_max.max(res);
                ratio_max = ratio_max.max(ratio);
            }
        }
    }

    // Breadth-first spanning tree from L.
    let n = grid.node_count();
    let mut adj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for (k, &[a, b]) in grid.edges.iter().enumerate() {
        adj[a].push((b, k, 1.0));
        adj[b].push((a, k, -1.0));
    }
    let root = grid.corner_node(Corner::L);
    let mut pos = vec![[f64::NAN; 3]; n];
    pos[root] = [0.0; 3];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(w, k, sgn) in &adj[u] {
            if pos[w][0].is_nan() {
                pos[w] = [
                    pos[u][0] + sgn * inc[k][0],
                    pos[u][1] + sgn * inc[k][1],
                    pos[u][2] + sgn * inc[k][2],
                ];
                queue.push_back(w);
            }
        }
    }

    let boundary: Vec<(Stretch, Vec<usize>)> = Stretch::ALL
        .iter()
        .map(|&s| (s, grid.stretch_nodes(s)))
        .collect();
    let mean_x3 = |s: Stretch| {
        let nodes = &boundary.iter().find(|(t, _)| *t == s).unwrap().1;
        nodes.iter().map(|&k| pos[k][2]).sum::<f64>() / nodes.len() as f64
    };
    let (ed, fe) = (mean_x3(Stretch::ED), mean_x3(Stretch::FE));
    let shift = ed.min(fe);
    for q in pos.iter_mut() {
        q[2] -= shift;
    }
    let interior_distance = (0..n).map(|k| grid.interior_distance(k)).collect();
    Ok(PieceMesh {
        params: *p,
        resolution: grid.resolution,
        mesh: TriMesh {
            vertices: pos,
            faces: grid.triangles(),
        },
        interior_distance,
        tags: grid.tags.clone(),
        boundary,
        corners: grid.corner_nodes,
        period: 2.0 * (fe - ed).abs(),
        level_ed: ed - shift,
        level_fe: fe - shift,
        loop_residual_max: loop_max,
        loop_residual_ratio: ratio_max,
    })
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl PieceMesh {
    pub fn stretch_vertices(&self, s: Stretch) -> &[usize] {
        &self.boundary.iter().find(|(t, _)| *t == s).unwrap().1
    }

    pub fn corner_vertex(&self, c: Corner) -> usize {
        self.corners.iter().find(|(k, _)| *k == c).unwrap().1
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.mesh.bbox_diagonal()
    }

    /// The mirror plane of each stretch: x₁ = 0 for LF and CB, x₂ = 0 for AL,
    /// the ED level for ED and BA, and the FE level for FE and DC.
    pub fn plane_of(&self, s: Stretch) -> (usize, f64) {
        match s {
            Stretch::LF | Stretch::CB => (0, 0.0),
            Stretch::AL => (1, 0.0),
            Stretch::ED | Stretch::BA => (2, self.level_ed),
            Stretch::FE | Stretch::DC => (2, self.level_fe),
        }
    }

    pub fn planarity(&self) -> Vec<PlaneCheck> {
        Stretch::ALL
            .iter()
            .map(|&s| {
                let (axis, target) = self.plane_of(s);
                let vals: Vec<f64> = self
                    .stretch_vertices(s)
                    .iter()
                    .map(|&k| self.mesh.vertices[k][axis])
                    .collect();
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let offset = vals.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
                PlaneCheck {
                    stretch: s,
                    axis,
                    target,
                    span: hi - lo,
                    offset,
                }
            })
            .collect()
    }

    /// Area-weighted RMS of the discrete mean curvature over vertices whose
    /// ω lies at least `margin` from the strip edges, cuts and corners.
    pub fn interior_mean_curvature(&self, margin: f64) -> f64 {
        let (h, area) = self.mesh.mean_curvature();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..h.len() {
            if self.interior_distance[k] >= margin {
                num += area[k] * h[k] * h[k];
                den += area[k];
            }
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            f64::NAN
        }
    }
}
