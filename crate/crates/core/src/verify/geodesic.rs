use super::{CheckResult, VerificationReport, VerifyError};
use crate::mesh::{assemble, weld, PieceMesh, WELD_REL_TOL};
use crate::weier::Stretch;

/// Out-of-plane tolerance relative to the bounding-box diagonal.
pub const PLANAR_REL_TOL: f64 = 1e-6;

/// The horizontal geodesic through F, as x₂ = f(x₁) on x₁ ≥ 0, normalized
/// so that f(0) = −1 and f → 0 along the end.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicProfile {
    pub x1: Vec<f64>,
    pub f: Vec<f64>,
    /// x₂ of the end E in closed form: x₂(F) − (artanh a − artanh x).
    pub x2_limit: f64,
}

/// Properties of the FE image when X = a: a planar, even, monotone graph
/// with values in [−1, 0).
pub fn check_gaussian_geodesic(
    piece: &PieceMesh,
) -> Result<(VerificationReport, GeodesicProfile), VerifyError> {
    let p = &piece.params;
    if p.big_x != p.a {
        return Err(VerifyError::NotApplicable(format!(
            "the geodesic profile needs X = a (X − a = {:e})",
            p.big_x - p.a
        )));
    }
    let bbox = piece.bbox_diagonal();
    let mut nodes = piece.stretch_vertices(Stretch::FE).to_vec();
    nodes.reverse(); // from F toward the end E
    let pts: Vec<[f64; 3]> = nodes.iter().map(|&k| piece.mesh.vertices[k]).collect();
    let mut rep = VerificationReport::new("geodesic");

    let planar = pts
        .iter()
        .map(|v| (v[2] - piece.level_fe).abs())
        .fold(0.0, f64::max);
    rep.push(CheckResult::bound(
        "planarity",
        planar / bbox,
        PLANAR_REL_TOL,
        pts.len(),
    ));

    // Evenness: the mirror image of every profile point is a vertex of the
    // assembled surface.
    let asm = assemble(piece, 1)?;
    let tol = WELD_REL_TOL * bbox;
    let mut probe = asm.mesh.vertices.clone();
    let first_probe = probe.len();
    probe.extend(pts.iter().map(|v| [-v[0], v[1], v[2]]));
    let (_, remap) = weld(&probe, tol);
    let unmatched = (first_probe..probe.len())
        .filter(|&k| remap[k] >= asm.mesh.vertices.len())
        .count();
    rep.push(CheckResult {
        check: "evenness".into(),
        pass: unmatched == 0,
        worst_residual: unmatched as f64,
        tolerance: 0.0,
        samples: pts.len(),
        hard: true,
    });

    let x2_f = pts[0][1];
    let x2_limit = x2_f - (p.a.atanh() - p.x.atanh());
    let depth = x2_f - x2_limit;
    let x1: Vec<f64> = pts.iter().map(|v| v[0] - pts[0][0]).collect();
    let f: Vec<f64> = pts.iter().map(|v| -(v[1] - x2_limit) / depth).collect();

    let min_dx = x1.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let min_df = f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    rep.push(CheckResult {
        check: "x1 strictly increasing".into(),
        pass: min_dx > 0.0,
        worst_residual: min_dx,
        tolerance: 0.0,
        samples: x1.len() - 1,
        hard: true,
    });
    rep.push(CheckResult {
        check: "flank strictly monotone".into(),
        pass: min_df > 0.0,
        worst_residual: min_df,
        tolerance: 0.0,
        samples: f.len() - 1,
        hard: true,
    });
    let f_max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f_min = f.iter().copied().fold(f64::INFINITY, f64::min);
    rep.push(CheckResult {
        check: "range in [-1, 0)".into(),
        pass: f_max < 0.0 && f_min >= -1.0 - 1e-12,
        worst_residual: f_max,
        tolerance: 0.0,
        samples: f.len(),
        hard: true,
    });
    rep.note("f_at_cut", format!("{:.6e}", f.last().copied().unwrap_or(f64::NAN)));
    rep.note("x1_at_cut", format!("{:.6e}", x1.last().copied().unwrap_or(f64::NAN)));
    Ok((rep, GeodesicProfile { x1, f, x2_limit }))
}
