//! Triangle meshes of the fundamental piece and of the assembled tower.

mod assemble;
mod export;
mod grid;
mod piece;
mod strip;

pub use assemble::{assemble, place_copies, weld, AssembledMesh, WELD_REL_TOL};
pub use export::{export_obj, export_ply, format_e12, write_obj, write_ply};
pub use grid::{build_grid, tau_limits, z_of_omega, Corner, CutRadii, DomainGrid, End, NodeTag};
pub use piece::{integrate_piece, PieceMesh, PlaneCheck, BRANCH_RESIDUAL_RATIO};
pub use strip::{expm1_c, StripMap};

use crate::weier::Stretch;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("resolution {0} must be a multiple of 8 between 16 and 8192")]
    InvalidResolution(usize),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("cell count {0} must be positive")]
    InvalidCells(usize),
    #[error("non-finite increment on edge {edge}")]
    NonFinite { edge: usize },
    #[error(
        "branch inconsistency in cell {cell:?}: loop residual {residual:e} against size {size:e}"
    )]
    BranchInconsistency {
        cell: (usize, usize),
        residual: f64,
        size: f64,
    },
    #[error("stretch {stretch} is {deviation:e} off its mirror plane (weld tolerance {tolerance:e})")]
    WeldMismatch {
        stretch: Stretch,
        deviation: f64,
        tolerance: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Vertices and consistently oriented triangles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl TriMesh {
    pub fn bbox(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for c in 0..3 {
                lo[c] = lo[c].min(v[c]);
                hi[c] = hi[c].max(v[c]);
            }
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        dot(sub(hi, lo), sub(hi, lo)).sqrt()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|k| self.vertices[k]);
        let n = cross(sub(b, a), sub(c, a));
        0.5 * dot(n, n).sqrt()
    }

    /// Cotangent-Laplacian mean curvature |H| per vertex, with the
    /// barycentric vertex areas used to normalize it.
    pub fn mean_curvature(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.vertices.len();
        let mut lap = vec![[0.0f64; 3]; n];
        let mut area = vec![0.0f64; n];
        for f in &self.faces {
            let p = f.map(|k| self.vertices[k]);
            let nrm = cross(sub(p[1], p[0]), sub(p[2], p[0]));
            let twice = dot(nrm, nrm).sqrt();
            if twice == 0.0 {
                continue;
            }
            for k in 0..3 {
                area[f[k]] += twice / 6.0;
            }
            for k in 0..3 {
                // Angle at corner k weights the opposite edge (i, j).
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let cot = dot(sub(p[i], p[k]), sub(p[j], p[k])) / twice;
                let e = sub(p[i], p[j]);
                for c in 0..3 {
                    lap[f[i]][c] += cot * e[c];
                    lap[f[j]][c] -= cot * e[c];
                }
            }
        }
        let h = (0..n)
            .map(|k| {
                if area[k] > 0.0 {
                    dot(lap[k], lap[k]).sqrt() / (4.0 * area[k])
                } else {
                    0.0
                }
            })
            .collect();
        (h, area)
    }
}
