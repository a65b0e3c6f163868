//! Assembly of the periodic surface from the half piece by mirror
//! reflections and vertical translations.

use super::piece::PieceMesh;
use super::{MeshError, TriMesh};
use crate::weier::Stretch;
use std::collections::HashMap;

/// Relative weld tolerance (times the piece's bounding-box diagonal).
pub const WELD_REL_TOL: f64 = 1e-9;

/// The welded surface.
#[derive(Debug, Clone)]
pub struct AssembledMesh {
    pub mesh: TriMesh,
    pub period: f64,
    /// Translational cells stacked along x₃.
    pub cells: usize,
    /// Piece copies placed before welding.
    pub copies: usize,
    /// Vertices merged by the weld.
    pub welded: usize,
}

/// The eight images of the piece under x₁ ↦ −x₁, x₂ ↦ −x₂ and
/// x₃ ↦ −x₃, stacked `cells` times with offsets kT.
pub fn assemble(piece: &PieceMesh, cells: usize) -> Result<AssembledMesh, MeshError> {
    if cells == 0 {
        return Err(MeshError::InvalidCells(cells));
    }
    let tol = WELD_REL_TOL * piece.bbox_diagonal();
    for s in Stretch::ALL {
        let (axis, target) = piece.plane_of(s);
        let dev = piece
            .stretch_vertices(s)
            .iter()
            .map(|&k| (piece.mesh.vertices[k][axis] - target).abs())
            .fold(0.0, f64::max);
        if dev > tol {
            return Err(MeshError::WeldMismatch {
                stretch: s,
                deviation: dev,
                tolerance: tol,
            });
        }
    }
    Ok(place_copies(piece, cells, 0.0))
}

/// Place and weld the reflected copies without checking the mirror planes.
/// `mirrored_shift` moves every x₃-reflected copy up by that amount; any
/// nonzero value breaks the surface, which the embeddedness check uses as a
/// negative control.
pub fn place_copies(piece: &PieceMesh, cells: usize, mirrored_shift: f64) -> AssembledMesh {
    let tol = WELD_REL_TOL * piece.bbox_diagonal();
    let lower = piece.level_ed.min(piece.level_fe);
    let t = piece.period;
    let nv = piece.mesh.vertices.len();
    let mut raw = Vec::with_capacity(8 * cells * nv);
    let mut faces = Vec::with_capacity(8 * cells * piece.mesh.faces.len());
    let mut copies = 0;
    for k in 0..cells {
        for s3 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                for s1 in [1.0, -1.0] {
                    let base = raw.len();
                    let shift = if s3 < 0.0 { mirrored_shift } else { 0.0 };
                    for v in &piece.mesh.vertices {
                        raw.push([
                            s1 * v[0],
                            s2 * v[1],
                            lower + s3 * (v[2] - lower) + k as f64 * t + shift,
                        ]);
                    }
                    let flip = s1 * s2 * s3 < 0.0;
                    for f in &piece.mesh.faces {
                        let g = [f[0] + base, f[1] + base, f[2] + base];
                        faces.push(if flip { [g[0], g[2], g[1]] } else { g });
                    }
                    copies += 1;
                }
            }
        }
    }
    let (vertices, remap) = weld(&raw, tol);
    let faces = faces
        .into_iter()
        .map(|f| f.map(|k| remap[k]))
        .collect();
    AssembledMesh {
        welded: raw.len() - vertices.len(),
        mesh: TriMesh { vertices, faces },
        period: t,
        cells,
        copies,
    }
}

/// Merge vertices closer than `tol`, keeping the first of each cluster.
pub fn weld(points: &[[f64; 3]], tol: f64) -> (Vec<[f64; 3]>, Vec<usize>) {
    let h = 2.0 * tol.max(f64::MIN_POSITIVE);
    let key = |p: &[f64; 3]| p.map(|c| (c / h).floor() as i64);
    let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut out: Vec<[f64; 3]> = Vec::new();
    let mut remap = Vec::with_capacity(points.len());
    for p in points {
        let k = key(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &q in list {
                            let o = out[q];
                            let d2 = (0..3).map(|c| (o[c] - p[c]).powi(2)).sum::<f64>();
                            if d2 <= tol * tol {
                                found = Some(q);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            out.push(*p);
            cells.entry(k).or_default().push(out.len() - 1);
            out.len() - 1
        });
        remap.push(id);
    }
    (out, remap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weld_merges_close_points_only() {
        let pts = [[0.0, 0.0, 0.0], [1e-12, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 3e-9, 0.0]];
        let (out, map) = weld(&pts, 1e-9);
        assert_eq!(out.len(), 3);
        assert_eq!(map, vec![0, 0, 1, 2]);
    }
}
