use super::{CheckResult, VerificationReport};
use crate::mesh::{place_copies, PieceMesh, TriMesh};
use rayon::prelude::*;
use std::collections::HashMap;

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Barycentric margin: contacts this close to a triangle's rim are not
/// counted, so grazing touches at shared seams do not register.
const RIM: f64 = 1e-9;

/// Does the open segment p→q pierce the interior of triangle t?
fn segment_hits(p: P3, q: P3, t: &[P3; 3]) -> bool {
    let d = sub(q, p);
    let e1 = sub(t[1], t[0]);
    let e2 = sub(t[2], t[0]);
    let h = cross(d, e2);
    let det = dot(e1, h);
    let scale = dot(d, d).sqrt() * dot(e1, e1).sqrt() * dot(e2, e2).sqrt();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = sub(p, t[0]);
    let u = dot(s, h) * inv;
    if u <= RIM || u >= 1.0 - RIM {
        return false;
    }
    let qv = cross(s, e1);
    let v = dot(d, qv) * inv;
    if v <= RIM || u + v >= 1.0 - RIM {
        return false;
    }
    let r = dot(e2, qv) * inv;
    r > RIM && r < 1.0 - RIM
}

/// Transversal intersection of two triangles: some edge of one pierces the
/// other. Coplanar contact is not reported.
pub fn tri_tri_intersect(a: &[P3; 3], b: &[P3; 3]) -> bool {
    (0..3).any(|k| segment_hits(a[k], a[(k + 1) % 3], b))
        || (0..3).any(|k| segment_hits(b[k], b[(k + 1) % 3], a))
}

/// Number of intersecting pairs of faces that share no vertex, and the
/// number of candidate pairs tested, using a uniform spatial hash.
pub fn count_intersections(mesh: &TriMesh) -> (usize, usize) {
    let nf = mesh.faces.len();
    if nf < 2 {
        return (0, 0);
    }
    let tri = |f: usize| mesh.faces[f].map(|k| mesh.vertices[k]);
    let mut edge_sum = 0.0;
    for f in 0..nf {
        let t = tri(f);
        for k in 0..3 {
            let e = sub(t[(k + 1) % 3], t[k]);
            edge_sum += dot(e, e).sqrt();
        }
    }
    let h = 2.0 * edge_sum / (3 * nf) as f64;
    let boxes: Vec<(P3, P3)> = (0..nf)
        .map(|f| {
            let t = tri(f);
            let mut lo = t[0];
            let mut hi = t[0];
            for p in &t[1..] {
                for c in 0..3 {
                    lo[c] = lo[c].min(p[c]);
                    hi[c] = hi[c].max(p[c]);
                }
            }
            (lo, hi)
        })
        .collect();
    let cell = |p: P3| p.map(|c| (c / h).floor() as i64);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (f, (lo, hi)) in boxes.iter().enumerate() {
        let (a, b) = (cell(*lo), cell(*hi));
        for i in a[0]..=b[0] {
            for j in a[1]..=b[1] {
                for k in a[2]..=b[2] {
                    grid.entry([i, j, k]).or_default().push(f);
                }
            }
        }
    }
    let mut buckets: Vec<(&[i64; 3], &Vec<usize>)> =
        grid.iter().filter(|(_, v)| v.len() > 1).collect();
    buckets.sort_by_key(|(k, _)| **k);
    buckets
        .par_iter()
        .map(|(key, list)| {
            let mut hits = 0;
            let mut tested = 0;
            for (x, &f) in list.iter().enumerate() {
                for &g in &list[x + 1..] {
                    let (fa, fb) = (&boxes[f], &boxes[g]);
                    if (0..3).any(|c| fa.0[c] > fb.1[c] || fb.0[c] > fa.1[c]) {
                        continue;
                    }
                    // Test each pair only in the first cell the two boxes share.
                    let first = [0, 1, 2].map(|c| cell(fa.0)[c].max(cell(fb.0)[c]));
                    if first != **key {
                        continue;
                    }
                    let (vf, vg) = (mesh.faces[f], mesh.faces[g]);
                    if vf.iter().any(|v| vg.contains(v)) {
                        continue;
                    }
                    tested += 1;
                    if tri_tri_intersect(&tri(f), &tri(g)) {
                        hits += 1;
                    }
                }
            }
            (hits, tested)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Embeddedness surrogate: no two non-adjacent faces intersect.
pub fn check_embedded(mesh: &TriMesh) -> VerificationReport {
    let (hits, tested) = count_intersections(mesh);
    let mut rep = VerificationReport::new("embedded");
    rep.push(CheckResult {
        check: "face intersections".into(),
        pass: hits == 0,
        worst_residual: hits as f64,
        tolerance: 0.0,
        samples: tested,
        hard: true,
    });
    rep.note("faces", mesh.faces.len().to_string());
    rep
}

/// Two translational cells in which every x₃-mirrored copy is lifted by an
/// extra half period: a deliberately broken surface for self-testing
/// [`check_embedded`].
pub fn offset_copies(piece: &PieceMesh) -> TriMesh {
    place_copies(piece, 2, 0.5 * piece.period).mesh
}
