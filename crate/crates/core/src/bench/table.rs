use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use crate::error::Result;

/// Reals are written with 17 significant digits so rows round-trip exactly.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV cell: a number or one of the sentinel strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    /// The bound diverges.
    Unbounded,
    /// The formula does not apply, e.g. `ε ≥ 1/2`.
    Inapplicable,
    /// The parameter combination is invalid, e.g. `Δ ≥ ε/3`.
    Skipped,
}

impl Cell {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            _ => None,
        }
    }

    /// Inverse of `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unbounded" => Some(Cell::Unbounded),
            "inapplicable" => Some(Cell::Inapplicable),
            "skipped" => Some(Cell::Skipped),
            _ if s.contains(['e', '.']) => s.parse().ok().map(Cell::Real),
            _ => s.parse().ok().map(Cell::Int),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => f.write_str(&fmt_real(*v)),
            Cell::Unbounded => f.write_str("unbounded"),
            Cell::Inapplicable => f.write_str("inapplicable"),
            Cell::Skipped => f.write_str("skipped"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: Cell,
    pub series: String,
    pub y: Cell,
}

/// Rows of one figure plus any warnings raised while computing them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

impl Curve {
    pub fn push(&mut self, x: Cell, series: &str, y: Cell) {
        self.points.push(CurvePoint { x, series: series.to_string(), y });
    }

    pub fn warn(&mut self, msg: String) {
        self.warnings.push(msg);
    }

    /// Orders rows by `(series, x)`.
    pub fn sort(&mut self) {
        self.points.sort_by(|a, b| {
            a.series.cmp(&b.series).then_with(|| {
                let (xa, xb) = (a.x.as_f64().unwrap_or(f64::NAN), b.x.as_f64().unwrap_or(f64::NAN));
                xa.partial_cmp(&xb).unwrap_or(Ordering::Equal)
            })
        });
    }

    /// Points of one series, in row order.
    pub fn series(&self, label: &str) -> Vec<&CurvePoint> {
        self.points.iter().filter(|p| p.series == label).collect()
    }

    /// Distinct series labels in row order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.points {
            if out.last() != Some(&p.series.as_str()) {
                out.push(&p.series);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"x,series,y\n")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.x, p.series, p.y)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }
}
