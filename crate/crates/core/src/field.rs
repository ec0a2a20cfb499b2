//! Classical field profiles φ(x) on a finite support [A, B] and their integral.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of Simpson panels for smooth profiles.
pub const DEFAULT_PANELS: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// Composite Simpson panel count; rounded up to even.
    pub panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            panels: DEFAULT_PANELS,
        }
    }
}

impl Quadrature {
    pub fn with_panels(panels: usize) -> Self {
        Self { panels }
    }

    pub fn simpson<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let n = (self.panels.max(2) + 1) & !1;
        let h = (b - a) / n as f64;
        let mut odd = 0.0;
        let mut even = 0.0;
        for i in 1..n {
            let x = a + h * i as f64;
            if i % 2 == 1 {
                odd += f(x);
            } else {
                even += f(x);
            }
        }
        h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldProfile {
    Constant {
        value: f64,
        a: f64,
        b: f64,
    },
    Gaussian {
        amplitude: f64,
        center: f64,
        sigma: f64,
        a: f64,
        b: f64,
    },
    /// Linear interpolation between knots; the support is first..last knot.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Sampled field, linearly interpolated between samples.
    Tabulated { samples: Vec<(f64, f64)> },
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidField(format!(
            "support must satisfy A < B, got [{a}, {b}]"
        )));
    }
    Ok(())
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidField(
            "need at least two (x, phi) points".into(),
        ));
    }
    for w in points.windows(2) {
        if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidField(format!(
                "x must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
    }
    for &(x, phi) in points {
        if !x.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidField("non-finite sample".into()));
        }
        if phi < 0.0 {
            return Err(Error::InvalidField(format!(
                "negative field value {phi} at x = {x}"
            )));
        }
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let (a, b) = (points[0].0, points[points.len() - 1].0);
    if x < a || x > b {
        return 0.0;
    }
    let i = points.partition_point(|p| p.0 <= x);
    if i == 0 {
        return points[0].1;
    }
    if i == points.len() {
        return points[i - 1].1;
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl FieldProfile {
    pub fn constant(value: f64, a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidField(format!(
                "field value must be nonnegative, got {value}"
            )));
        }
        Ok(Self::Constant { value, a, b })
    }

    pub fn gaussian(amplitude: f64, center: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidField(format!(
                "gaussian amplitude must be nonnegative, got {amplitude}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) || !center.is_finite() {
            return Err(Error::InvalidField(format!(
                "gaussian needs finite center and positive sigma, got ({center}, {sigma})"
            )));
        }
        Ok(Self::Gaussian {
            amplitude,
            center,
            sigma,
            a,
            b,
        })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        check_points(&knots)?;
        Ok(Self::PiecewiseLinear { knots })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        check_points(&samples)?;
        Ok(Self::Tabulated { samples })
    }

    /// Two-column `x,phi` CSV; a non-numeric first row is treated as a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidField(format!(
                    "row {}: expected 2 columns, got {}",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(phi)) => samples.push((x, phi)),
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidField(format!(
                        "row {}: cannot parse {:?}",
                        row + 1,
                        record
                    )))
                }
            }
        }
        Self::tabulated(samples)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(file)
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Constant { a, b, .. } | Self::Gaussian { a, b, .. } => (*a, *b),
            Self::PiecewiseLinear { knots: pts } | Self::Tabulated { samples: pts } => {
                (pts[0].0, pts[pts.len() - 1].0)
            }
        }
    }

    /// φ(x); zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x < a || x > b {
            return 0.0;
        }
        match self {
            Self::Constant { value, .. } => *value,
            Self::Gaussian {
                amplitude,
                center,
                sigma,
                ..
            } => {
                let z = (x - center) / sigma;
                amplitude * (-0.5 * z * z).exp()
            }
            Self::PiecewiseLinear { knots: pts } | Self::Tabulated { samples: pts } => {
                interpolate(pts, x)
            }
        }
    }

    /// Upper bound of φ on the support (exact for every built-in kind).
    pub fn max_value(&self) -> f64 {
        match self {
            Self::Constant { value, .. } => *value,
            Self::Gaussian { amplitude, .. } => *amplitude,
            Self::PiecewiseLinear { knots: pts } | Self::Tabulated { samples: pts } => {
                pts.iter().map(|p| p.1).fold(0.0, f64::max)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_value() == 0.0
    }

    /// The same profile with φ multiplied by `factor` ≥ 0.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::InvalidField(format!(
                "scale factor must be nonnegative, got {factor}"
            )));
        }
        let scale_pts =
            |pts: &[(f64, f64)]| pts.iter().map(|&(x, y)| (x, y * factor)).collect();
        Ok(match self {
            Self::Constant { value, a, b } => Self::Constant {
                value: value * factor,
                a: *a,
                b: *b,
            },
            Self::Gaussian {
                amplitude,
                center,
                sigma,
                a,
                b,
            } => Self::Gaussian {
                amplitude: amplitude * factor,
                center: *center,
                sigma: *sigma,
                a: *a,
                b: *b,
            },
            Self::PiecewiseLinear { knots } => Self::PiecewiseLinear {
                knots: scale_pts(knots),
            },
            Self::Tabulated { samples } => Self::Tabulated {
                samples: scale_pts(samples),
            },
        })
    }

    /// ∫_A^B φ(x) dx. Constant and piecewise-linear profiles are integrated
    /// exactly; the rest use composite Simpson.
    pub fn integrate(&self, quad: &Quadrature) -> f64 {
        match self {
            Self::Constant { value, a, b } => value * (b - a),
            Self::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum(),
            Self::Gaussian { a, b, .. } => quad.simpson(|x| self.eval(x), *a, *b),
            Self::Tabulated { samples } => {
                // Simpson per sample interval keeps the interpolant's kinks on panel edges.
                let per = (quad.panels / (samples.len() - 1)).max(2);
                let q = Quadrature::with_panels(per);
                samples
                    .windows(2)
                    .map(|w| q.simpson(|x| interpolate(samples, x), w[0].0, w[1].0))
                    .sum()
            }
        }
    }
}

pub fn integrate_field(field: &FieldProfile) -> f64 {
    field.integrate(&Quadrature::default())
}

/// Parses the command-line field grammar:
/// `constant:<value>:<A>:<B>`, `gaussian:<amp>:<mu>:<sigma>:<A>:<B>`, `table:<path>`.
pub fn parse_field_spec(spec: &str) -> Result<FieldProfile> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("field spec {spec:?} has no kind prefix")))?;
    if kind == "table" {
        return FieldProfile::from_csv_path(Path::new(rest));
    }
    let nums: Vec<f64> = rest
        .split(':')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in field spec {spec:?}")))
        })
        .collect::<Result<_>>()?;
    match (kind, nums.as_slice()) {
        ("constant", &[v, a, b]) => FieldProfile::constant(v, a, b),
        ("gaussian", &[amp, mu, sigma, a, b]) => FieldProfile::gaussian(amp, mu, sigma, a, b),
        ("constant", _) => Err(Error::Parse(
            "expected constant:<value>:<A>:<B>".into(),
        )),
        ("gaussian", _) => Err(Error::Parse(
            "expected gaussian:<amp>:<mu>:<sigma>:<A>:<B>".into(),
        )),
        _ => Err(Error::Parse(format!("unknown field kind {kind:?}"))),
    }
}
