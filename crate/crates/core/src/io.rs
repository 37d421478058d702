//! CSV files for sampled curves and polygons, and curve specifications.

use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::curve::{ClosedCurve, CurveFamily, CurveSource, OpenCurve};
use crate::error::{Error, Result};
use crate::polygon::Polygon;
use crate::scalar::Real;

/// Where a closed curve comes from and how it is prepared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// Label used in output rows.
    pub id: String,
    /// Analytic family; exclusive with `samples`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<CurveFamily>,
    /// CSV sample file with columns `t,x1,..,xd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
    /// Sample count for families; resampling target for files.
    pub n: usize,
    /// Reparametrize to unit length and unit speed after loading.
    #[serde(default)]
    pub arclength: bool,
}

impl CurveSpec {
    pub fn family(id: &str, family: CurveFamily, n: usize, arclength: bool) -> Self {
        Self {
            id: id.into(),
            family: Some(family),
            samples: None,
            n,
            arclength,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.family, &self.samples) {
            (Some(f), None) => f.validate(self.n),
            (None, Some(_)) => Ok(()),
            _ => Err(Error::InvalidArgument(format!(
                "curve '{}': give exactly one of family or samples",
                self.id
            ))),
        }
    }

    pub fn load<T: Real>(&self) -> Result<ClosedCurve<T>> {
        self.validate()?;
        let curve = match (&self.family, &self.samples) {
            (Some(f), _) => f.sample::<T>(self.n)?,
            (_, Some(path)) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                let c = read_curve_csv::<T, _>(file)?;
                if c.len() == self.n {
                    c
                } else {
                    c.resample(self.n)?
                }
            }
            _ => unreachable!(),
        };
        if self.arclength {
            curve.reparametrize_by_arclength()
        } else {
            Ok(curve)
        }
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r)
}

fn coord_headers(first: &str, dim: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((1..=dim).map(|k| format!("x{k}")))
        .collect()
}

fn fmt<T: Real>(v: T) -> String {
    format!("{:.17e}", v.as_f64())
}

/// Rows `t, x1..xd` at the sample nodes.
pub fn write_curve_csv<T: Real, W: Write>(curve: &ClosedCurve<T>, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(coord_headers("t", curve.dim())).map_err(csv_err)?;
    for j in 0..curve.len() {
        let t = T::from_count(j) / T::from_count(curve.len());
        let row: Vec<String> = std::iter::once(fmt(t)).chain(curve.node(j).iter().map(|&v| fmt(v))).collect();
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

fn parse_rows<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rd = reader(r);
    let headers: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("csv row {}: {e}", line + 1)))?;
        if vals.len() != headers.len() {
            return Err(Error::InvalidArgument(format!("csv row {}: wrong field count", line + 1)));
        }
        rows.push(vals);
    }
    Ok((headers, rows))
}

/// Reads a `t, x1..xd` file. Rows must sit at `t_j = j / N` in order.
pub fn read_curve_csv<T: Real, R: Read>(r: R) -> Result<ClosedCurve<T>> {
    let (headers, rows) = parse_rows(r)?;
    let dim = headers.len().saturating_sub(1);
    if headers.first().map(String::as_str) != Some("t") || dim < 2 {
        return Err(Error::InvalidArgument("curve csv needs columns t,x1,..,xd".into()));
    }
    let n = rows.len();
    for (j, row) in rows.iter().enumerate() {
        if (row[0] - j as f64 / n as f64).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("curve csv row {}: t must be {j}/{n}", j + 1)));
        }
    }
    let samples = rows.iter().flat_map(|r| r[1..].iter().map(|&v| T::lit(v))).collect();
    ClosedCurve::from_samples(samples, dim, CurveSource::Samples)
}

/// Rows `s, x1..xd, tx1..txd, kappa_sq` on the arc-length grid.
pub fn write_open_curve_csv<T: Real, W: Write>(curve: &OpenCurve<T>, w: W) -> Result<()> {
    let d = curve.dim();
    let mut out = writer(w);
    let mut head = coord_headers("s", d);
    head.extend((1..=d).map(|k| format!("tx{k}")));
    head.push("kappa_sq".into());
    out.write_record(&head).map_err(csv_err)?;
    for i in 0..curve.len() {
        let row: Vec<String> = std::iter::once(fmt(curve.param(i)))
            .chain(curve.point(i).iter().map(|&v| fmt(v)))
            .chain(curve.tangent(i).iter().map(|&v| fmt(v)))
            .chain(std::iter::once(fmt(curve.curvature_sq(i))))
            .collect();
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

/// Rows `a, x1..xd`: curve parameter and vertex.
pub fn write_polygon_csv<T: Real, W: Write>(p: &Polygon<T>, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(coord_headers("a", p.dim())).map_err(csv_err)?;
    for i in 0..p.len() {
        let row: Vec<String> = std::iter::once(fmt(p.params()[i]))
            .chain(p.vertex(i).iter().map(|&v| fmt(v)))
            .collect();
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(csv_err)
}

pub fn read_polygon_csv<T: Real, R: Read>(r: R) -> Result<Polygon<T>> {
    let (headers, rows) = parse_rows(r)?;
    let dim = headers.len().saturating_sub(1);
    if headers.first().map(String::as_str) != Some("a") || dim < 2 {
        return Err(Error::InvalidArgument("polygon csv needs columns a,x1,..,xd".into()));
    }
    let params = rows.iter().map(|r| T::lit(r[0])).collect();
    let vertices = rows.iter().flat_map(|r| r[1..].iter().map(|&v| T::lit(v))).collect();
    Polygon::new(vertices, params, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_round_trip() {
        let c = CurveFamily::TorusKnot {
            p: 2,
            q: 3,
            major: 2.0,
            minor: 0.8,
        }
        .sample::<f64>(64)
        .unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        let mut with_comment = b"# produced elsewhere\n".to_vec();
        with_comment.extend_from_slice(&buf);
        let back: ClosedCurve<f64> = read_curve_csv(&with_comment[..]).unwrap();
        assert_eq!(back.samples(), c.samples());
    }

    #[test]
    fn polygon_round_trip() {
        let p = Polygon::<f64>::regular(5).unwrap();
        let mut buf = Vec::new();
        write_polygon_csv(&p, &mut buf).unwrap();
        let back: Polygon<f64> = read_polygon_csv(&buf[..]).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn bad_files() {
        assert!(read_curve_csv::<f64, _>(&b"t,x1\n0,1\n"[..]).is_err());
        assert!(read_curve_csv::<f64, _>(&b"t,x1,x2\n0,1,0\n0.7,0,1\n"[..]).is_err());
        assert!(read_curve_csv::<f64, _>(&b"t,x1,x2\n0,1,zero\n"[..]).is_err());
    }

    #[test]
    fn spec_needs_one_source() {
        let mut s = CurveSpec::family("c", CurveFamily::unit_circle(), 64, false);
        assert!(s.validate().is_ok());
        s.samples = Some("x.csv".into());
        assert!(s.validate().is_err());
    }
}
