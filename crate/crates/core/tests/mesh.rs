mod common;

use common::{rel_err, solved_params};
use proptest::prelude::*;
use saddle_core::mesh::*;
use saddle_core::periods::{i_integral, j_integral, k_integral};
use saddle_core::quad::QuadratureSpec;
use saddle_core::weier::{sym_funcs, Stretch, SurfaceParams};
use std::sync::OnceLock;

fn solved_piece(resolution: usize) -> PieceMesh {
    let p = solved_params();
    let grid = build_grid(&p, resolution, CutRadii::default_for(&p)).unwrap();
    integrate_piece(&p, &grid).unwrap()
}

fn piece64() -> &'static PieceMesh {
    static P: OnceLock<PieceMesh> = OnceLock::new();
    P.get_or_init(|| solved_piece(64))
}

fn unsolved() -> SurfaceParams {
    SurfaceParams::new(0.75, 1.25, 0.73, 0.75, 1.02).unwrap()
}

#[test]
fn resolution_must_be_a_multiple_of_eight_in_range() {
    let p = unsolved();
    let cuts = CutRadii::default_for(&p);
    for bad in [0, 8, 20, 100, 8200] {
        assert!(matches!(
            build_grid(&p, bad, cuts),
            Err(MeshError::InvalidResolution(r)) if r == bad
        ));
    }
    let g = build_grid(&p, 16, cuts).unwrap();
    assert_eq!((g.n_tau, g.n_sigma), (32, 8));
    assert_eq!(g.node_count(), 33 * 9);
    assert_eq!(g.triangles().len(), 2 * 32 * 8);
}

#[test]
fn cut_radii_are_validated() {
    let p = unsolved();
    let mut cuts = CutRadii::default_for(&p);
    cuts.d = p.y - 1.0;
    assert!(matches!(build_grid(&p, 16, cuts), Err(MeshError::InvalidCut(_))));
    cuts = CutRadii::default_for(&p);
    cuts.e = -0.01;
    assert!(matches!(build_grid(&p, 16, cuts), Err(MeshError::InvalidCut(_))));
}

#[test]
fn corners_and_stretches_sit_on_grid_nodes() {
    let p = unsolved();
    for res in [16, 24, 64] {
        let g = build_grid(&p, res, CutRadii::default_for(&p)).unwrap();
        for c in Corner::ALL {
            let n = g.corner_node(c);
            assert!((g.omega[n] - c.omega(&p)).norm() < 1e-12, "{} at {res}", c.name());
            if let Some(x) = c.abscissa(&p) {
                assert!((g.z[n].re - x).abs() < 1e-12 && g.z[n].im.abs() < 1e-12);
            }
        }
        // Every node of a stretch maps to the matching piece of the quadrant's boundary.
        for &n in &g.stretch_nodes(Stretch::LF) {
            assert!(g.z[n].im.abs() < 1e-12 && g.z[n].re > -1e-12 && g.z[n].re <= p.x + 1e-12);
        }
        for &n in &g.stretch_nodes(Stretch::AL)[..g.stretch_nodes(Stretch::AL).len() - 1] {
            assert!(g.z[n].re.abs() < 1e-12 && g.z[n].im >= 0.0);
        }
        for &n in &g.stretch_nodes(Stretch::ED) {
            let z = g.z[n];
            assert!(z.im.abs() < 1e-12 && z.re >= p.a && z.re <= 1.0);
        }
    }
}

#[test]
fn z_of_omega_inverts_the_strip_coordinate() {
    let p = unsolved();
    for (tau, sigma) in [(-3.0, 0.4), (0.0, 1.5), (2.0, 2.9), (-0.5, 3.1)] {
        let omega = saddle_core::weier::C64::new(tau, sigma);
        let z = z_of_omega(&p, omega);
        let back = ((z * z - p.a * p.a) / (1.0 - z * z)).ln();
        assert!((back - omega).norm() < 1e-11, "{omega} -> {z} -> {back}");
        assert!(z.re >= 0.0 && z.im >= 0.0);
    }
}

#[test]
fn corner_differences_reproduce_the_period_integrals() {
    // The piece is Re ∫φ, so coordinate differences between corners are the
    // real-axis integrals computed independently by the period module.
    let p = unsolved();
    let grid = build_grid(&p, 32, CutRadii::default_for(&p)).unwrap();
    let piece = integrate_piece(&p, &grid).unwrap();
    let s = sym_funcs(&p);
    let spec = QuadratureSpec::default();
    let at = |c: Corner| piece.mesh.vertices[piece.corner_vertex(c)];
    let (l, a, b, c) = (at(Corner::L), at(Corner::A), at(Corner::B), at(Corner::C));
    let i = i_integral(&p, &s, &spec).unwrap();
    let j = j_integral(&p, &s, &spec).unwrap();
    let k = k_integral(&p, &s, &spec).unwrap();
    assert!(rel_err(a[0] - b[0], i) < 1e-9, "{} vs I {i}", a[0] - b[0]);
    assert!(rel_err(a[0] - l[0], j) < 1e-9, "{} vs J {j}", a[0] - l[0]);
    assert!(rel_err(c[2] - b[2], k) < 1e-9, "{} vs K {k}", c[2] - b[2]);
}

#[test]
fn solved_piece_has_closed_loops_and_planar_boundary() {
    let piece = piece64();
    let bbox = piece.bbox_diagonal();
    assert!(piece.loop_residual_max < 1e-10 * bbox, "{}", piece.loop_residual_max);
    assert!(piece.loop_residual_ratio < BRANCH_RESIDUAL_RATIO);
    for c in piece.planarity() {
        assert!(c.offset < 1e-6 * bbox, "{:?}", c);
    }
    assert!(piece.period > 0.0);
    assert!((piece.period - 2.0 * (piece.level_fe - piece.level_ed).abs()).abs() < 1e-9 * bbox);
    let l = piece.mesh.vertices[piece.corner_vertex(Corner::L)];
    assert!(l[0].abs() < 1e-12 && l[1].abs() < 1e-12);
}

#[test]
fn unsolved_piece_leaves_a_mirror_plane() {
    let p = unsolved();
    let grid = build_grid(&p, 16, CutRadii::default_for(&p)).unwrap();
    let piece = integrate_piece(&p, &grid).unwrap();
    let bbox = piece.bbox_diagonal();
    let cb = piece.planarity().into_iter().find(|c| c.stretch == Stretch::CB).unwrap();
    assert!(cb.offset > 1e-3 * bbox);
    assert!(matches!(assemble(&piece, 1), Err(MeshError::WeldMismatch { .. })));
}

#[test]
fn assembly_counts() {
    let piece = piece64();
    assert!(matches!(assemble(piece, 0), Err(MeshError::InvalidCells(0))));
    for cells in [1, 2] {
        let asm = assemble(piece, cells).unwrap();
        assert_eq!(asm.copies, 8 * cells);
        assert_eq!(asm.mesh.faces.len(), 8 * cells * piece.mesh.faces.len());
        assert_eq!(asm.mesh.vertices.len() + asm.welded, 8 * cells * piece.mesh.vertices.len());
        assert!(asm.welded > 0);
        for f in &asm.mesh.faces {
            assert!(f.iter().all(|&k| k < asm.mesh.vertices.len()));
            assert!(f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
        }
    }
}

#[test]
fn assembled_surface_is_invariant_under_its_mirrors() {
    let asm = assemble(piece64(), 1).unwrap();
    let tol = 10.0 * WELD_REL_TOL * asm.mesh.bbox_diagonal();
    let n = asm.mesh.vertices.len();
    let mut probe = asm.mesh.vertices.clone();
    probe.extend(asm.mesh.vertices.iter().map(|v| [-v[0], v[1], v[2]]));
    probe.extend(asm.mesh.vertices.iter().map(|v| [v[0], -v[1], v[2]]));
    let (merged, _) = weld(&probe, tol);
    assert_eq!(merged.len(), n);
}

#[test]
fn obj_round_trip() {
    let piece = piece64();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("piece.obj");
    let header = vec!["test header".to_string()];
    export_obj(&piece.mesh, &header, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# test header\n"));
    let verts: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let c: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    let faces: Vec<[usize; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("f "))
        .map(|l| {
            let c: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [c[0] - 1, c[1] - 1, c[2] - 1]
        })
        .collect();
    assert_eq!(faces, piece.mesh.faces);
    let scale = piece.bbox_diagonal();
    for (u, v) in verts.iter().zip(&piece.mesh.vertices) {
        for k in 0..3 {
            assert!((u[k] - v[k]).abs() <= 1e-12 * scale.max(v[k].abs()));
        }
    }
    // Identical input gives identical bytes.
    let again = dir.path().join("again.obj");
    export_obj(&piece.mesh, &header, &again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn ply_has_declared_sizes() {
    let piece = piece64();
    let mut buf = Vec::new();
    write_ply(&piece.mesh, &[], &mut buf).unwrap();
    let text_end = buf.windows(11).position(|w| w == b"end_header\n").unwrap() + 11;
    let nv = piece.mesh.vertices.len();
    let nf = piece.mesh.faces.len();
    assert_eq!(buf.len() - text_end, nv * 3 * 8 + nf * (1 + 3 * 4));
}

#[test]
fn mean_curvature_shrinks_under_refinement() {
    let coarse = piece64().interior_mean_curvature(0.5);
    let fine = solved_piece(128).interior_mean_curvature(0.5);
    assert!(coarse.is_finite() && fine.is_finite());
    assert!(coarse / fine >= 3.5, "{coarse:e} -> {fine:e}");
}

#[test]
fn export_to_missing_directory_is_an_io_error() {
    let piece = piece64();
    let r = export_obj(&piece.mesh, &[], std::path::Path::new("/nonexistent-dir/x.obj"));
    assert!(matches!(r, Err(MeshError::Io(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weld_merges_exactly_the_near_duplicates(
        pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0), 1..60),
        jitter in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 60),
    ) {
        let tol = 1e-6;
        // Well separated base points: drop any closer than 4·tol to an earlier one.
        let mut base: Vec<[f64; 3]> = Vec::new();
        for (x, y, z) in pts {
            let q = [x, y, z];
            if base.iter().all(|b| (0..3).map(|k| (b[k] - q[k]).powi(2)).sum::<f64>().sqrt() > 4.0 * tol) {
                base.push(q);
            }
        }
        let mut all = base.clone();
        for (k, (dx, dy, dz)) in jitter.iter().enumerate() {
            let b = base[k % base.len()];
            let s = 0.5 * tol / 3f64.sqrt();
            all.push([b[0] + s * dx, b[1] + s * dy, b[2] + s * dz]);
        }
        let (out, remap) = weld(&all, tol);
        prop_assert_eq!(out.len(), base.len());
        for (k, &r) in remap.iter().enumerate() {
            let want = if k < base.len() { k } else { (k - base.len()) % base.len() };
            prop_assert_eq!(r, want);
        }
    }
}
