use std::io::{BufRead, BufReader, Read, Write};

use super::{Period, SurfaceMesh, SurfaceTag};
use crate::error::{Error, Result};

const HEADER: &str = "cutlap-mesh v1";

/// Write the text mesh format. Periodic charts carry an extra `P px py`
/// line after the header (0 for a non-identified direction).
pub fn write_mesh(mesh: &SurfaceMesh, mut w: impl Write) -> Result<()> {
    writeln!(w, "{HEADER} {}", mesh.tag())?;
    let p = mesh.period();
    if p.is_periodic() {
        writeln!(w, "P {} {}", p.x.unwrap_or(0.0), p.y.unwrap_or(0.0))?;
    }
    writeln!(w, "V {}", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{} {} {}", v[0], v[1], v[2])?;
    }
    writeln!(w, "F {}", mesh.num_triangles())?;
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<BufReader<R>>,
    line: usize,
}

impl<R: Read> Lines<R> {
    fn next(&mut self) -> Result<Option<String>> {
        loop {
            match self.inner.next() {
                None => return Ok(None),
                Some(l) => {
                    self.line += 1;
                    let l = l?;
                    let t = l.trim();
                    if !t.is_empty() && !t.starts_with('#') {
                        return Ok(Some(t.to_string()));
                    }
                }
            }
        }
    }

    fn expect(&mut self, what: &str) -> Result<String> {
        self.next()?.ok_or_else(|| {
            Error::parse(
                self.line + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })
    }

    fn numbers<T: std::str::FromStr, const N: usize>(&mut self, what: &str) -> Result<[T; N]> {
        let l = self.expect(what)?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != N {
            return Err(Error::parse(
                self.line,
                format!("expected {N} values for {what}"),
            ));
        }
        let mut out = Vec::with_capacity(N);
        for p in parts {
            out.push(
                p.parse::<T>()
                    .map_err(|_| Error::parse(self.line, format!("bad number `{p}` in {what}")))?,
            );
        }
        Ok(out.try_into().ok().unwrap())
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let l = self.expect(key)?;
        let mut it = l.split_whitespace();
        match (it.next(), it.next().and_then(|n| n.parse().ok()), it.next()) {
            (Some(k), Some(n), None) if k == key => Ok(n),
            _ => Err(Error::parse(self.line, format!("expected `{key} <count>`"))),
        }
    }
}

/// Parse the text mesh format; the result is fully validated.
pub fn read_mesh(r: impl Read) -> Result<SurfaceMesh> {
    let mut lines = Lines {
        inner: BufReader::new(r).lines(),
        line: 0,
    };
    let head = lines.expect("header")?;
    let tag = head
        .strip_prefix(HEADER)
        .map(str::trim)
        .ok_or_else(|| Error::parse(lines.line, format!("expected `{HEADER} <surface_tag>`")))?;
    let tag: SurfaceTag = tag
        .parse()
        .map_err(|_| Error::parse(lines.line, format!("unknown surface tag `{tag}`")))?;

    let mut period = Period::default();
    let mut next = lines.expect("V line")?;
    if let Some(rest) = next.strip_prefix("P ") {
        let vals: Vec<f64> = rest
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(lines.line, "bad period line"))?;
        if vals.len() != 2 || vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::parse(
                lines.line,
                "period line needs two non-negative values",
            ));
        }
        let pick = |v: f64| if v > 0.0 { Some(v) } else { None };
        period = Period {
            x: pick(vals[0]),
            y: pick(vals[1]),
        };
        next = lines.expect("V line")?;
    }
    let nv = match next.split_whitespace().collect::<Vec<_>>()[..] {
        ["V", n] => n
            .parse()
            .map_err(|_| Error::parse(lines.line, "bad vertex count"))?,
        _ => return Err(Error::parse(lines.line, "expected `V <count>`")),
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let v: [f64; 3] = lines.numbers("vertex")?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::parse(lines.line, "non-finite coordinate"));
        }
        vertices.push(v);
    }
    let nt = lines.count("F")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        triangles.push(lines.numbers::<usize, 3>("triangle")?);
    }
    if lines.next()?.is_some() {
        return Err(Error::parse(lines.line, "trailing content after triangles"));
    }
    SurfaceMesh::new(vertices, triangles, tag, period)
}

#[cfg(test)]
mod tests {
    use super::super::{build_rectangle, build_sphere, Identify};
    use super::*;

    fn roundtrip(m: &SurfaceMesh) -> SurfaceMesh {
        let mut buf = Vec::new();
        write_mesh(m, &mut buf).unwrap();
        read_mesh(&buf[..]).unwrap()
    }

    #[test]
    fn roundtrip_preserves_mesh() {
        for m in [
            build_sphere(1).unwrap(),
            build_rectangle(1.0, 0.65, 6, 4, Identify::Both).unwrap(),
        ] {
            let r = roundtrip(&m);
            assert_eq!(r.fingerprint(), m.fingerprint());
            assert_eq!(r.vertices(), m.vertices());
            assert_eq!(r.period(), m.period());
            assert_eq!(r.tag(), m.tag());
        }
    }

    #[test]
    fn rejects_non_manifold_input() {
        let text = "cutlap-mesh v1 custom\nV 5\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\nF 3\n0 1 2\n1 0 3\n0 1 4\n";
        assert!(matches!(
            read_mesh(text.as_bytes()),
            Err(Error::NonManifold(_))
        ));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            read_mesh("hello".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let short = "cutlap-mesh v1 custom\nV 3\n0 0 0\n1 0 0\n";
        assert!(matches!(
            read_mesh(short.as_bytes()),
            Err(Error::Parse { .. })
        ));
        let bad = "cutlap-mesh v1 custom\nV 3\n0 0 0\n1 0 x\n0 1 0\nF 1\n0 1 2\n";
        assert!(matches!(
            read_mesh(bad.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
