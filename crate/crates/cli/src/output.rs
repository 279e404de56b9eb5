//! CSV and SVG writers.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

/// Seventeen significant digits, so every `f64` reads back exactly.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn csv_writer(path: Option<&Path>) -> io::Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new().from_writer(sink(path)?))
}

pub struct Plot {
    pub lo: f64,
    pub hi: f64,
    /// `(α, Υ)`, plotted in the given order.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;

impl Plot {
    pub fn y_range() -> (f64, f64) {
        (-0.2, std::f64::consts::TAU.ln() + 0.2)
    }

    fn x(&self, a: f64) -> f64 {
        MARGIN + (a - self.lo) / (self.hi - self.lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let (y0, y1) = Self::y_range();
        HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn render(&self) -> String {
        let (y0, y1) = Self::y_range();
        let log_tau = std::f64::consts::TAU.ln();
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            self.x(self.lo),
            self.y(y1),
            self.x(self.hi) - self.x(self.lo),
            self.y(y0) - self.y(y1)
        );
        for (level, label) in [(0.0, "0"), (log_tau, "log 2π")] {
            let y = self.y(level);
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
                self.x(self.lo),
                self.x(self.hi)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"#,
                MARGIN - 6.0,
                y + 4.0
            );
        }
        for a in [self.lo, self.hi] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                self.x(a),
                HEIGHT - MARGIN + 18.0,
                trim(a)
            );
        }
        let coords: Vec<String> = self
            .points
            .iter()
            .map(|&(a, v)| format!("{:.2},{:.2}", self.x(a), self.y(v)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{}"/>"##,
            coords.join(" ")
        );
        s.push_str("</svg>\n");
        s
    }
}

fn trim(x: f64) -> String {
    let t = format!("{x:.4}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}
