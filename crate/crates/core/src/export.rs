//! Visualization exports: legacy ASCII VTK and SVG sketches of planar charts.
//!
//! VTK output duplicates every vertex per triangle corner, so sign-gauged
//! fields that jump across a cut and triangles straddling a periodic seam
//! both display correctly.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, SurfaceTag, Vec3};
use crate::homology::Cut;
use crate::spectral::{CornerField, Partition};

fn vtk_name(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "field".into()
    } else {
        s
    }
}

/// Scalar data attached to a VTK export.
#[derive(Clone, Copy, Debug)]
pub enum VtkData<'a> {
    /// One value per triangle corner.
    Corner(&'a str, &'a CornerField),
    /// One value per triangle.
    Cell(&'a str, &'a [f64]),
}

/// Write the mesh as an unstructured grid with per-corner points.
pub fn write_vtk(
    mesh: &SurfaceMesh,
    title: &str,
    data: &[VtkData<'_>],
    mut w: impl Write,
) -> Result<()> {
    let nt = mesh.num_triangles();
    for d in data {
        match *d {
            VtkData::Corner(name, f) if !f.belongs_to(mesh) => {
                return Err(Error::InvalidParameter(format!(
                    "field `{name}` belongs to another mesh"
                )))
            }
            VtkData::Cell(name, v) if v.len() != nt => {
                return Err(Error::InvalidParameter(format!(
                    "cell data `{name}` has {} values for {nt} triangles",
                    v.len()
                )))
            }
            _ => {}
        }
    }
    let title: String = title.chars().filter(|&c| c != '\n').take(255).collect();
    writeln!(
        w,
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID"
    )?;
    writeln!(w, "POINTS {} double", 3 * nt)?;
    for t in 0..nt {
        for p in mesh.corner_positions(t) {
            writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
        }
    }
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in 0..nt {
        writeln!(w, "3 {} {} {}", 3 * t, 3 * t + 1, 3 * t + 2)?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    let corner: Vec<_> = data
        .iter()
        .filter_map(|d| {
            if let VtkData::Corner(n, f) = d {
                Some((n, f))
            } else {
                None
            }
        })
        .collect();
    let cell: Vec<_> = data
        .iter()
        .filter_map(|d| {
            if let VtkData::Cell(n, v) = d {
                Some((n, v))
            } else {
                None
            }
        })
        .collect();
    if !cell.is_empty() {
        writeln!(w, "CELL_DATA {nt}")?;
        for (name, v) in cell {
            writeln!(
                w,
                "SCALARS {} double 1\nLOOKUP_TABLE default",
                vtk_name(name)
            )?;
            for x in v.iter() {
                writeln!(w, "{x}")?;
            }
        }
    }
    if !corner.is_empty() {
        writeln!(w, "POINT_DATA {}", 3 * nt)?;
        for (name, f) in corner {
            writeln!(
                w,
                "SCALARS {} double 1\nLOOKUP_TABLE default",
                vtk_name(name)
            )?;
            for c in &f.values {
                writeln!(w, "{} {} {}", c[0], c[1], c[2])?;
            }
        }
    }
    Ok(())
}

/// Write a set of mesh edges (for instance a cut) as VTK line cells.
pub fn write_vtk_edges(
    mesh: &SurfaceMesh,
    title: &str,
    edges: impl IntoIterator<Item = usize>,
    mut w: impl Write,
) -> Result<()> {
    let edges: Vec<usize> = edges.into_iter().collect();
    if let Some(&e) = edges.iter().find(|&&e| e >= mesh.num_edges()) {
        return Err(Error::OutOfRange(format!("edge id {e}")));
    }
    let title: String = title.chars().filter(|&c| c != '\n').take(255).collect();
    writeln!(
        w,
        "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID"
    )?;
    writeln!(w, "POINTS {} double", 2 * edges.len())?;
    for &e in &edges {
        let [a, b] = edge_segment(mesh, e);
        writeln!(w, "{} {} {}\n{} {} {}", a[0], a[1], a[2], b[0], b[1], b[2])?;
    }
    writeln!(w, "CELLS {} {}", edges.len(), 3 * edges.len())?;
    for i in 0..edges.len() {
        writeln!(w, "2 {} {}", 2 * i, 2 * i + 1)?;
    }
    writeln!(w, "CELL_TYPES {}", edges.len())?;
    for _ in 0..edges.len() {
        writeln!(w, "3")?;
    }
    Ok(())
}

fn edge_segment(mesh: &SurfaceMesh, e: usize) -> [Vec3; 2] {
    let [a, b] = mesh.edge(e);
    let pa = mesh.vertex(a);
    let d = mesh.displacement(pa, mesh.vertex(b));
    [pa, [pa[0] + d[0], pa[1] + d[1], pa[2] + d[2]]]
}

const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#bc80bd", "#ccebc5",
];

/// Layers of an SVG sketch, drawn bottom to top: fill, mesh, nodal lines, cut.
#[derive(Clone, Copy, Debug, Default)]
pub struct SvgScene<'a> {
    /// Fill triangles by sign of this field and draw its zero level set.
    pub field: Option<&'a CornerField>,
    /// Fill triangles by part label (takes precedence over the field sign).
    pub partition: Option<&'a Partition>,
    pub cut: Option<&'a Cut>,
    /// Draw thin mesh edges.
    pub wireframe: bool,
}

/// Render a planar chart (disk, annulus, rectangle, cylinder or torus chart) to SVG.
pub fn write_svg(mesh: &SurfaceMesh, scene: &SvgScene<'_>, mut w: impl Write) -> Result<()> {
    if mesh.tag() == SurfaceTag::Sphere || mesh.vertices().iter().any(|p| p[2] != 0.0) {
        return Err(Error::InvalidParameter(
            "SVG export needs a planar chart".into(),
        ));
    }
    if scene.field.is_some_and(|f| !f.belongs_to(mesh))
        || scene.partition.is_some_and(|p| !p.belongs_to(mesh))
        || scene.cut.is_some_and(|c| !c.belongs_to(mesh))
    {
        return Err(Error::MismatchedMesh);
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in mesh.vertices() {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let period = mesh.period();
    if let Some(px) = period.x {
        hi[0] = lo[0] + px;
    }
    if let Some(py) = period.y {
        hi[1] = lo[1] + py;
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    const SIZE: f64 = 800.0;
    const PAD: f64 = 10.0;
    let s = SIZE / span;
    let (wpx, hpx) = (
        (hi[0] - lo[0]) * s + 2.0 * PAD,
        (hi[1] - lo[1]) * s + 2.0 * PAD,
    );
    let xy = |p: Vec3| (PAD + (p[0] - lo[0]) * s, PAD + (hi[1] - p[1]) * s);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{wpx:.1}" height="{hpx:.1}" viewBox="0 0 {wpx:.1} {hpx:.1}">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="chart"><rect x="{PAD}" y="{PAD}" width="{:.3}" height="{:.3}"/></clipPath></defs>"#,
        wpx - 2.0 * PAD,
        hpx - 2.0 * PAD
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<g clip-path="url(#chart)">"#);

    let stroke = if scene.wireframe {
        r##"stroke="#999" stroke-width="0.3""##
    } else {
        r#"stroke="none""#
    };
    let labels = scene.partition.map(Partition::labels);
    for t in 0..mesh.num_triangles() {
        let fill = match (labels, scene.field) {
            (Some(l), _) if l[t] == 0 => "#dddddd",
            (Some(l), _) => PALETTE[(l[t] - 1) % PALETTE.len()],
            (None, Some(f)) => {
                let m: f64 = f.values[t].iter().sum();
                if m > 0.0 {
                    "#f4a582"
                } else if m < 0.0 {
                    "#92c5de"
                } else {
                    "#f7f7f7"
                }
            }
            (None, None) => "#f7f7f7",
        };
        let [a, b, c] = mesh.corner_positions(t).map(xy);
        for shift in chart_copies(mesh, t, lo, hi) {
            let _ = writeln!(
                out,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" {stroke}/>"#,
                a.0 + shift.0 * s,
                a.1 - shift.1 * s,
                b.0 + shift.0 * s,
                b.1 - shift.1 * s,
                c.0 + shift.0 * s,
                c.1 - shift.1 * s
            );
        }
    }

    if let Some(f) = scene.field {
        let _ = writeln!(out, r#"<g stroke="black" stroke-width="1.5" fill="none">"#);
        for t in 0..mesh.num_triangles() {
            let p = mesh.corner_positions(t);
            let v = f.values[t];
            let mut pts = Vec::with_capacity(2);
            for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                if (v[i] > 0.0) != (v[j] > 0.0) && v[i] != v[j] {
                    let r = v[i] / (v[i] - v[j]);
                    pts.push(xy([
                        p[i][0] + r * (p[j][0] - p[i][0]),
                        p[i][1] + r * (p[j][1] - p[i][1]),
                        0.0,
                    ]));
                }
            }
            if let [a, b] = pts[..] {
                for shift in chart_copies(mesh, t, lo, hi) {
                    let _ = writeln!(
                        out,
                        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                        a.0 + shift.0 * s,
                        a.1 - shift.1 * s,
                        b.0 + shift.0 * s,
                        b.1 - shift.1 * s
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if let Some(cut) = scene.cut {
        let _ = writeln!(
            out,
            r##"<g stroke="#b2182b" stroke-width="3" stroke-linecap="round">"##
        );
        for &e in cut.edges() {
            let [pa, pb] = edge_segment(mesh, e);
            let (a, b) = (xy(pa), xy(pb));
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                a.0, a.1, b.0, b.1
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>\n</svg>");
    w.write_all(out.as_bytes())?;
    Ok(())
}

/// Translations (chart units) under which an unwrapped triangle meets the chart `[lo, hi]`.
fn chart_copies(mesh: &SurfaceMesh, t: usize, lo: [f64; 2], hi: [f64; 2]) -> Vec<(f64, f64)> {
    let period = mesh.period();
    let p = mesh.corner_positions(t);
    let shifts = |d: usize, per: Option<f64>| -> Vec<f64> {
        let mut v = vec![0.0];
        if let Some(per) = per {
            if p.iter().any(|q| q[d] > hi[d]) {
                v.push(-per);
            }
            if p.iter().any(|q| q[d] < lo[d]) {
                v.push(per);
            }
        }
        v
    };
    let ys = shifts(1, period.y);
    shifts(0, period.x)
        .into_iter()
        .flat_map(|dx| ys.iter().map(move |&dy| (dx, dy)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_disk, build_rectangle, build_sphere, Identify};
    use crate::operator::build_dof_map;

    fn field(mesh: &SurfaceMesh, f: impl Fn(Vec3) -> f64) -> CornerField {
        let dofs = build_dof_map(mesh, &Cut::empty(mesh)).unwrap();
        let x: Vec<f64> = (0..dofs.n_dofs())
            .map(|d| f(mesh.vertex(dofs.dof_vertex(d))))
            .collect();
        CornerField::from_dofs(mesh, &dofs, &x, None).unwrap()
    }

    #[test]
    fn vtk_counts() {
        let mesh = build_rectangle(1.0, 1.0, 3, 3, Identify::Both).unwrap();
        let f = field(&mesh, |p| p[0]);
        let labels = vec![1.0; mesh.num_triangles()];
        let mut buf = Vec::new();
        write_vtk(
            &mesh,
            "t",
            &[VtkData::Corner("u x", &f), VtkData::Cell("label", &labels)],
            &mut buf,
        )
        .unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("POINTS 54 double"));
        assert!(s.contains("CELLS 18 72"));
        assert!(s.contains("CELL_DATA 18"));
        assert!(s.contains("POINT_DATA 54"));
        assert!(s.contains("SCALARS u_x double 1"));
        assert_eq!(
            s.lines().count(),
            4 + 1 + 54 + 1 + 18 + 1 + 18 + 1 + 2 + 18 + 1 + 2 + 18
        );
    }

    #[test]
    fn vtk_rejects_short_cell_data() {
        let mesh = build_disk(0).unwrap();
        let v = vec![0.0; 2];
        assert!(write_vtk(&mesh, "t", &[VtkData::Cell("x", &v)], std::io::sink()).is_err());
    }

    #[test]
    fn svg_draws_layers_and_rejects_sphere() {
        let mesh = build_disk(2).unwrap();
        let f = field(&mesh, |p| p[0]);
        let cut = Cut::new(
            &mesh,
            [mesh.edge_between(0, 1).unwrap_or(0)]
                .into_iter()
                .filter(|&e| !mesh.is_boundary_edge(e)),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_svg(
            &mesh,
            &SvgScene {
                field: Some(&f),
                cut: Some(&cut),
                ..Default::default()
            },
            &mut buf,
        )
        .unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polygon").count(), mesh.num_triangles());
        assert!(s.contains("<line"));
        let sphere = build_sphere(0).unwrap();
        assert!(write_svg(&sphere, &SvgScene::default(), std::io::sink()).is_err());
    }
}
