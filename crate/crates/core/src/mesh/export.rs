//! Wavefront OBJ and binary PLY output.

use super::{MeshError, TriMesh};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// A float in C `%.12e` style: `-1.234567890123e+00`.
pub fn format_e12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

/// OBJ text: `#` header lines, `v` lines, then 1-based `f` lines.
pub fn write_obj<W: Write>(mesh: &TriMesh, header: &[String], out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for v in &mesh.vertices {
        writeln!(
            out,
            "v {} {} {}",
            format_e12(v[0]),
            format_e12(v[1]),
            format_e12(v[2])
        )?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    out.flush()
}

pub fn export_obj(mesh: &TriMesh, header: &[String], path: &Path) -> Result<(), MeshError> {
    write_obj(mesh, header, File::create(path)?)?;
    Ok(())
}

/// Binary little-endian PLY with double-precision vertices.
pub fn write_ply<W: Write>(mesh: &TriMesh, header: &[String], out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "ply")?;
    writeln!(out, "format binary_little_endian 1.0")?;
    for line in header {
        writeln!(out, "comment {line}")?;
    }
    writeln!(out, "element vertex {}", mesh.vertices.len())?;
    for c in ["x", "y", "z"] {
        writeln!(out, "property double {c}")?;
    }
    writeln!(out, "element face {}", mesh.faces.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    for v in &mesh.vertices {
        for c in v {
            out.write_all(&c.to_le_bytes())?;
        }
    }
    for f in &mesh.faces {
        out.write_all(&[3u8])?;
        for &k in f {
            let k = i32::try_from(k).map_err(|_| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, "vertex index exceeds i32")
            })?;
            out.write_all(&k.to_le_bytes())?;
        }
    }
    out.flush()
}

pub fn export_ply(mesh: &TriMesh, header: &[String], path: &Path) -> Result<(), MeshError> {
    write_ply(mesh, header, File::create(path)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_e12(1.0), "1.000000000000e+00");
        assert_eq!(format_e12(-0.00123), "-1.230000000000e-03");
        assert_eq!(format_e12(6.02e123), "6.020000000000e+123");
        assert_eq!(format_e12(0.0), "0.000000000000e+00");
    }

    #[test]
    fn obj_layout() {
        let m = TriMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            faces: vec![[0, 1, 2]],
        };
        let mut buf = Vec::new();
        write_obj(&m, &["pi1=0".to_string()], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# pi1=0");
        assert_eq!(lines[2], "v 1.000000000000e+00 0.000000000000e+00 0.000000000000e+00");
        assert_eq!(lines[4], "f 1 2 3");
    }

    #[test]
    fn ply_size() {
        let m = TriMesh {
            vertices: vec![[0.0; 3]; 3],
            faces: vec![[0, 1, 2]],
        };
        let mut buf = Vec::new();
        write_ply(&m, &[], &mut buf).unwrap();
        let body = buf.len() - (buf.windows(11).position(|w| w == b"end_header\n").unwrap() + 11);
        assert_eq!(body, 3 * 24 + 1 + 12);
    }
}
