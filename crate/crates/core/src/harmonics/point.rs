use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special_fn::{sin_cos_exact, ManifoldSpec};

/// Unit-norm tolerance for Cartesian inputs.
pub const UNIT_TOL: f64 = 1e-9;
/// Two points closer than this (geodesically) are treated as equal.
pub const POINT_EQ_TOL: f64 = 1e-9;

/// Point of `S^{d-1}` in polar coordinates `(θ_1, …, θ_{d-1})`,
/// `θ_1 ∈ [0, 2π)`, `θ_j ∈ [0, π]` for `j ≥ 2`.
///
/// `ξ_1 = cos θ_{d-1}`, `ξ_2 = sin θ_{d-1} cos θ_{d-2}`, …,
/// `ξ_{d-1} = sin θ_{d-1} ⋯ sin θ_2 cos θ_1`, `ξ_d = sin θ_{d-1} ⋯ sin θ_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    theta: Vec<f64>,
}

impl PolarPoint {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.len() < 2 {
            return domain(format!("need at least 2 angles (d >= 3), got {}", theta.len()));
        }
        if !(0.0..2.0 * PI).contains(&theta[0]) {
            return domain(format!("theta_1 must lie in [0, 2pi), got {}", theta[0]));
        }
        for (i, t) in theta.iter().enumerate().skip(1) {
            if !(0.0..=PI).contains(t) {
                return domain(format!("theta_{} must lie in [0, pi], got {t}", i + 1));
            }
        }
        Ok(Self { theta })
    }

    /// The north pole `(1, 0, …, 0)`: all angles zero.
    pub fn pole(d: usize) -> Self {
        Self { theta: vec![0.0; d - 1] }
    }

    pub fn d(&self) -> usize {
        self.theta.len() + 1
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// `θ_j`, 1-based.
    pub fn theta(&self, j: usize) -> f64 {
        self.theta[j - 1]
    }

    /// The point `(θ_1, …, θ_j)` of `S^j`.
    pub fn prefix(&self, j: usize) -> Result<Self> {
        if j < 2 || j > self.theta.len() {
            return domain(format!("prefix length {j} out of range for d = {}", self.d()));
        }
        Ok(Self { theta: self.theta[..j].to_vec() })
    }

    pub fn to_cartesian(&self) -> Vec<f64> {
        let d = self.d();
        let mut out = vec![0.0; d];
        let mut sines = 1.0;
        for i in 0..d - 2 {
            let (s, c) = sin_cos_exact(self.theta[d - 2 - i]);
            out[i] = sines * c;
            sines *= s;
        }
        let (s1, c1) = self.theta[0].sin_cos();
        out[d - 2] = sines * c1;
        out[d - 1] = sines * s1;
        out
    }

    /// Inverse of [`PolarPoint::to_cartesian`] for a unit vector.
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        let d = x.len();
        if d < 3 {
            return domain(format!("need d >= 3 coordinates, got {d}"));
        }
        check_unit(x)?;
        let mut theta = vec![0.0; d - 1];
        // tail[i] = |(x_i, …, x_d)|
        let mut tail = vec![0.0_f64; d + 1];
        for i in (0..d).rev() {
            tail[i] = tail[i + 1].hypot(x[i]);
        }
        for i in 0..d - 2 {
            theta[d - 2 - i] = tail[i + 1].atan2(x[i]);
        }
        let mut t1 = x[d - 1].atan2(x[d - 2]);
        if t1 < 0.0 {
            t1 += 2.0 * PI;
        }
        if t1 >= 2.0 * PI {
            t1 = 0.0;
        }
        theta[0] = t1;
        Ok(Self { theta })
    }

    /// `-ξ`: `θ_1 ↦ θ_1 + π (mod 2π)`, `θ_j ↦ π - θ_j`.
    pub fn antipode(&self) -> Self {
        let mut theta = self.theta.clone();
        theta[0] = if theta[0] < PI { theta[0] + PI } else { theta[0] - PI };
        for t in theta.iter_mut().skip(1) {
            *t = PI - *t;
        }
        Self { theta }
    }
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return domain(format!("vector is not unit norm (|x| = {norm})"));
    }
    Ok(())
}

/// Geodesic distance on a two-point homogeneous space: `arccos⟨x, y⟩` on the
/// sphere, `2 arccos|⟨x, y⟩|` on the projective spaces.
pub fn geodesic_distance(x: &[f64], y: &[f64], m: &ManifoldSpec) -> Result<f64> {
    if x.len() != y.len() {
        return domain(format!("dimension mismatch: {} vs {}", x.len(), y.len()));
    }
    check_unit(x)?;
    check_unit(y)?;
    let dot = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0);
    Ok(if m.is_sphere() { dot.acos() } else { 2.0 * dot.abs().acos() })
}

/// Spherical distance between two polar points.
pub fn polar_distance(p: &PolarPoint, q: &PolarPoint) -> f64 {
    let (x, y) = (p.to_cartesian(), q.to_cartesian());
    x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0).acos()
}

/// `n` points uniformly distributed on `S^{d-1}`.
///
/// Point `i` is drawn from its own ChaCha stream of `seed`, so the set is a
/// pure function of `(d, n, seed)` and prefixes agree across `n`.
pub fn random_points(d: usize, n: usize, seed: u64) -> Vec<PolarPoint> {
    assert!(d >= 3, "random points need d >= 3");
    (0..n)
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            loop {
                let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    let unit: Vec<f64> = v.iter().map(|a| a / norm).collect();
                    return PolarPoint::from_cartesian(&unit).expect("normalized vector");
                }
            }
        })
        .collect()
}

/// Representation used by a point file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointRepr {
    Polar,
    Cart,
}

/// Contents of a point CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub d: usize,
    pub repr: PointRepr,
    pub points: Vec<PolarPoint>,
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, PointRepr)> {
    let body = line.trim_start_matches('#').trim();
    let mut d = None;
    let mut repr = None;
    for part in body.split(',') {
        let Some((key, value)) = part.split_once('=') else {
            return parse_err(lineno, format!("header field `{}` is not key=value", part.trim()));
        };
        match key.trim() {
            "d" => {
                d = Some(value.trim().parse::<usize>().or_else(|_| parse_err(lineno, format!("bad d `{}`", value.trim())))?)
            }
            "repr" => {
                repr = Some(match value.trim() {
                    "polar" => PointRepr::Polar,
                    "cart" => PointRepr::Cart,
                    other => return parse_err(lineno, format!("unknown repr `{other}`")),
                })
            }
            other => return parse_err(lineno, format!("unknown header field `{other}`")),
        }
    }
    match (d, repr) {
        (Some(d), Some(r)) if d >= 3 => Ok((d, r)),
        (Some(d), Some(_)) => parse_err(lineno, format!("d must be >= 3, got {d}")),
        _ => parse_err(lineno, "header must define both d and repr"),
    }
}

/// Parses a point row `polar,θ_1,…` or `cart,x_1,…` for dimension `d`.
pub fn parse_point_row(row: &str, d: usize) -> std::result::Result<PolarPoint, String> {
    let mut fields = row.split(',').map(str::trim);
    let tag = fields.next().unwrap_or_default();
    let values = fields
        .enumerate()
        .map(|(i, f)| f.parse::<f64>().map_err(|_| format!("field {} (`{f}`) is not a number", i + 2)))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    match tag {
        "polar" => {
            if values.len() != d - 1 {
                return Err(format!("polar row needs {} angles, got {}", d - 1, values.len()));
            }
            PolarPoint::new(values).map_err(|e| e.to_string())
        }
        "cart" => {
            if values.len() != d {
                return Err(format!("cart row needs {d} coordinates, got {}", values.len()));
            }
            PolarPoint::from_cartesian(&values).map_err(|e| e.to_string())
        }
        other => Err(format!("row tag must be `polar` or `cart`, got `{other}`")),
    }
}

/// Reads the point CSV format: a `# d=<int>, repr=<polar|cart>` header and
/// one `polar,θ_1,…,θ_{d-1}` or `cart,x_1,…,x_d` row per point.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut header = None;
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if header.is_none() {
                header = Some(parse_header(line, lineno)?);
            }
            continue;
        }
        let Some((d, _)) = header else {
            return parse_err(lineno, "point row before the `# d=..., repr=...` header");
        };
        match parse_point_row(line, d) {
            Ok(p) => points.push(p),
            Err(msg) => return parse_err(lineno, msg),
        }
    }
    let Some((d, repr)) = header else {
        return parse_err(1, "missing `# d=..., repr=...` header");
    };
    Ok(PointSet { d, repr, points })
}

/// Serializes points in the CSV format, in the requested representation.
pub fn format_points(points: &[PolarPoint], repr: PointRepr) -> String {
    let d = points.first().map_or(3, PolarPoint::d);
    let mut out = String::new();
    let tag = match repr {
        PointRepr::Polar => "polar",
        PointRepr::Cart => "cart",
    };
    writeln!(out, "# d={d}, repr={tag}").unwrap();
    for p in points {
        out.push_str(tag);
        let values = match repr {
            PointRepr::Polar => p.angles().to_vec(),
            PointRepr::Cart => p.to_cartesian(),
        };
        for v in values {
            write!(out, ",{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}
