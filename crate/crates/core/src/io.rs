//! File formats: plain attribute-value text for point sets and
//! certificates.
//!
//! Exact-lattice coordinates travel as decimal integers and floating
//! values with 17 significant digits, so a write-then-read reproduces
//! the in-memory object bit for bit. The format is deliberately dumb:
//! one `key value` pair per line, points and coefficients as repeated
//! lines, a versioned header, and a terminating `end`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::certificates::TrigCertificate;
use crate::error::{Error, Result};
use crate::geometry::{ArithMode, NormSpec, Point, PointSet};
use crate::rational::{format_rational, Delta};

const POINT_SET_HEADER: &str = "intgap pointset v1";
const CERTIFICATE_HEADER: &str = "intgap certificate v1";

/// A point set plus the serialization-level context it travels with.
#[derive(Debug, Clone)]
pub struct PointSetFile {
    pub set: PointSet,
    /// Gap parameter the set is claimed valid at, if any.
    pub delta: Option<Delta>,
    pub norm: NormSpec,
    /// Free-form provenance entries (construction name, parameters,
    /// seed); written as `meta.<key> <value>` lines in file order.
    pub meta: Vec<(String, String)>,
}

/// A certificate plus provenance entries.
#[derive(Debug, Clone)]
pub struct CertificateFile {
    pub certificate: TrigCertificate,
    pub meta: Vec<(String, String)>,
}

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64> {
    let v = f64::from_str(token).map_err(|_| parse_err(line, format!("bad {what}: {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} must be finite, got {token:?}")));
    }
    Ok(v)
}

fn meta_key(key: &str) -> Option<&str> {
    key.strip_prefix("meta.").filter(|k| !k.is_empty())
}

fn render_meta(out: &mut String, meta: &[(String, String)]) {
    for (k, v) in meta {
        debug_assert!(!k.contains(char::is_whitespace), "meta keys are single tokens");
        let _ = writeln!(out, "meta.{k} {v}");
    }
}

fn render_norm(norm: &NormSpec) -> String {
    match norm {
        NormSpec::Euclidean => "l2".to_string(),
        NormSpec::Lp(p) => format!("lp:{}", fmt_f64(*p)),
    }
}

fn parse_norm(token: &str, line: usize) -> Result<NormSpec> {
    if token == "l2" {
        return Ok(NormSpec::Euclidean);
    }
    if let Some(p) = token.strip_prefix("lp:") {
        return NormSpec::lp(parse_f64(p, line, "norm exponent")?);
    }
    Err(parse_err(line, format!("unknown norm {token:?}")))
}

/// Serializes a point set file to its text form.
pub fn render_point_set(file: &PointSetFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{POINT_SET_HEADER}");
    let dim = file.set.dim().unwrap_or(0);
    let _ = writeln!(out, "dim {dim}");
    let _ = writeln!(out, "mode {}", file.set.mode());
    let _ = writeln!(out, "radius_bound {}", fmt_f64(file.set.radius_bound()));
    let _ = writeln!(out, "norm {}", render_norm(&file.norm));
    if let Some(d) = &file.delta {
        let _ = writeln!(out, "delta {}", format_rational(d.rational()));
    }
    let _ = writeln!(out, "count {}", file.set.len());
    render_meta(&mut out, &file.meta);
    for p in file.set.points() {
        match p {
            Point::Lattice(c) => {
                let row: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "point {}", row.join(" "));
            }
            Point::Float(c) => {
                let row: Vec<String> = c.iter().map(|&x| fmt_f64(x)).collect();
                let _ = writeln!(out, "point {}", row.join(" "));
            }
        }
    }
    out.push_str("end\n");
    out
}

/// Parses the text form of a point set file.
pub fn parse_point_set(text: &str) -> Result<PointSetFile> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == POINT_SET_HEADER => {}
        Some((_, l)) => return Err(parse_err(1, format!("expected {POINT_SET_HEADER:?}, got {l:?}"))),
        None => return Err(parse_err(1, "empty file")),
    }

    let mut dim: Option<usize> = None;
    let mut mode: Option<ArithMode> = None;
    let mut radius: Option<f64> = None;
    let mut norm: Option<NormSpec> = None;
    let mut delta: Option<Delta> = None;
    let mut count: Option<usize> = None;
    let mut meta: Vec<(String, String)> = Vec::new();
    let mut points: Vec<Point> = Vec::new();
    let mut ended = false;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(parse_err(line_no, "content after end"));
        }
        if line == "end" {
            ended = true;
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(line_no, format!("expected `key value`, got {line:?}")))?;
        let value = value.trim();
        let dup = |what: &str| parse_err(line_no, format!("duplicate {what}"));
        match key {
            "dim" => {
                if dim.is_some() {
                    return Err(dup("dim"));
                }
                dim = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad dim {value:?}")))?,
                );
            }
            "mode" => {
                if mode.is_some() {
                    return Err(dup("mode"));
                }
                mode = Some(match value {
                    "exact-lattice" => ArithMode::ExactLattice,
                    "certified-float" => ArithMode::CertifiedFloat,
                    other => return Err(parse_err(line_no, format!("unknown mode {other:?}"))),
                });
            }
            "radius_bound" => {
                if radius.is_some() {
                    return Err(dup("radius_bound"));
                }
                radius = Some(parse_f64(value, line_no, "radius_bound")?);
            }
            "norm" => {
                if norm.is_some() {
                    return Err(dup("norm"));
                }
                norm = Some(parse_norm(value, line_no)?);
            }
            "delta" => {
                if delta.is_some() {
                    return Err(dup("delta"));
                }
                delta = Some(Delta::parse(value).map_err(|e| parse_err(line_no, e.to_string()))?);
            }
            "count" => {
                if count.is_some() {
                    return Err(dup("count"));
                }
                count = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad count {value:?}")))?,
                );
            }
            "point" => {
                let d = dim.ok_or_else(|| parse_err(line_no, "point before dim"))?;
                let m = mode.ok_or_else(|| parse_err(line_no, "point before mode"))?;
                let tokens: Vec<&str> = value.split_whitespace().collect();
                if tokens.len() != d {
                    return Err(parse_err(
                        line_no,
                        format!("point has {} coordinates, dim is {d}", tokens.len()),
                    ));
                }
                let point = match m {
                    ArithMode::ExactLattice => {
                        let mut coords = Vec::with_capacity(d);
                        for t in &tokens {
                            coords.push(i64::from_str(t).map_err(|_| {
                                parse_err(line_no, format!("bad integer coordinate {t:?}"))
                            })?);
                        }
                        Point::lattice(coords)
                    }
                    ArithMode::CertifiedFloat => {
                        let mut coords = Vec::with_capacity(d);
                        for t in &tokens {
                            coords.push(parse_f64(t, line_no, "coordinate")?);
                        }
                        Point::float(coords)
                    }
                }
                .map_err(|e| parse_err(line_no, e.to_string()))?;
                points.push(point);
            }
            other => match meta_key(other) {
                Some(k) => meta.push((k.to_string(), value.to_string())),
                None => return Err(parse_err(line_no, format!("unknown key {other:?}"))),
            },
        }
    }
    if !ended {
        return Err(parse_err(text.lines().count(), "missing end line"));
    }

    let last = text.lines().count();
    let mode = mode.ok_or_else(|| parse_err(last, "missing mode"))?;
    let radius = radius.ok_or_else(|| parse_err(last, "missing radius_bound"))?;
    let norm = norm.unwrap_or(NormSpec::Euclidean);
    if let Some(c) = count {
        if c != points.len() {
            return Err(parse_err(
                last,
                format!("count says {c} but {} point lines present", points.len()),
            ));
        }
    }
    if let (Some(d), Some(p)) = (dim, points.first()) {
        if p.dim() != d {
            return Err(parse_err(last, "dim disagrees with point lines"));
        }
    }
    let set = PointSet::new(points, mode, radius).map_err(|e| parse_err(last, e.to_string()))?;
    Ok(PointSetFile { set, delta, norm, meta })
}

/// Serializes a certificate file to its text form.
pub fn render_certificate(file: &CertificateFile) -> String {
    let c = &file.certificate;
    let mut out = String::new();
    let _ = writeln!(out, "{CERTIFICATE_HEADER}");
    let _ = writeln!(out, "delta {}", format_rational(c.delta.rational()));
    let _ = writeln!(out, "ell {}", c.ell);
    let _ = writeln!(out, "degree {}", c.degree);
    let _ = writeln!(out, "margin {}", fmt_f64(c.margin));
    let _ = writeln!(out, "grid_step {}", fmt_f64(c.grid_step));
    let _ = writeln!(out, "derivative_bound {}", fmt_f64(c.derivative_bound));
    render_meta(&mut out, &file.meta);
    for &ck in &c.coeffs {
        let _ = writeln!(out, "coeff {}", fmt_f64(ck));
    }
    out.push_str("end\n");
    out
}

/// Parses the text form of a certificate file.
pub fn parse_certificate(text: &str) -> Result<CertificateFile> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == CERTIFICATE_HEADER => {}
        Some((_, l)) => {
            return Err(parse_err(1, format!("expected {CERTIFICATE_HEADER:?}, got {l:?}")))
        }
        None => return Err(parse_err(1, "empty file")),
    }

    let mut delta: Option<Delta> = None;
    let mut ell: Option<u32> = None;
    let mut degree: Option<usize> = None;
    let mut margin: Option<f64> = None;
    let mut grid_step: Option<f64> = None;
    let mut derivative_bound: Option<f64> = None;
    let mut coeffs: Vec<f64> = Vec::new();
    let mut meta: Vec<(String, String)> = Vec::new();
    let mut ended = false;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(parse_err(line_no, "content after end"));
        }
        if line == "end" {
            ended = true;
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(line_no, format!("expected `key value`, got {line:?}")))?;
        let value = value.trim();
        match key {
            "delta" => {
                delta = Some(Delta::parse(value).map_err(|e| parse_err(line_no, e.to_string()))?)
            }
            "ell" => {
                ell = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad ell {value:?}")))?,
                )
            }
            "degree" => {
                degree = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad degree {value:?}")))?,
                )
            }
            "margin" => margin = Some(parse_f64(value, line_no, "margin")?),
            "grid_step" => grid_step = Some(parse_f64(value, line_no, "grid_step")?),
            "derivative_bound" => {
                derivative_bound = Some(parse_f64(value, line_no, "derivative_bound")?)
            }
            "coeff" => coeffs.push(parse_f64(value, line_no, "coefficient")?),
            other => match meta_key(other) {
                Some(k) => meta.push((k.to_string(), value.to_string())),
                None => return Err(parse_err(line_no, format!("unknown key {other:?}"))),
            },
        }
    }
    let last = text.lines().count();
    if !ended {
        return Err(parse_err(last, "missing end line"));
    }
    let missing = |what: &str| parse_err(last, format!("missing {what}"));
    let degree = degree.ok_or_else(|| missing("degree"))?;
    if coeffs.len() != degree {
        return Err(parse_err(
            last,
            format!("degree says {degree} but {} coeff lines present", coeffs.len()),
        ));
    }
    Ok(CertificateFile {
        certificate: TrigCertificate {
            delta: delta.ok_or_else(|| missing("delta"))?,
            ell: ell.ok_or_else(|| missing("ell"))?,
            degree,
            coeffs,
            margin: margin.ok_or_else(|| missing("margin"))?,
            grid_step: grid_step.ok_or_else(|| missing("grid_step"))?,
            derivative_bound: derivative_bound.ok_or_else(|| missing("derivative_bound"))?,
        },
        meta,
    })
}

/// Writes a point set file to disk.
pub fn write_point_set(path: &Path, file: &PointSetFile) -> Result<()> {
    std::fs::write(path, render_point_set(file))?;
    Ok(())
}

/// Reads a point set file from disk.
pub fn read_point_set(path: &Path) -> Result<PointSetFile> {
    parse_point_set(&std::fs::read_to_string(path)?)
}

/// Writes a certificate file to disk.
pub fn write_certificate(path: &Path, file: &CertificateFile) -> Result<()> {
    std::fs::write(path, render_certificate(file))?;
    Ok(())
}

/// Reads a certificate file from disk.
pub fn read_certificate(path: &Path) -> Result<CertificateFile> {
    parse_certificate(&std::fs::read_to_string(path)?)
}
