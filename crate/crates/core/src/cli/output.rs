//! CSV trajectories, fixed-precision report numbers and SVG plots.

use std::fmt::Write as _;

/// One CSV line `k,T,C,I,G`; blanks are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub k: i64,
    pub t: f64,
    pub c: Option<f64>,
    pub i: Option<f64>,
    pub g: Option<f64>,
}

pub const CSV_HEADER: &str = "k,T,C,I,G";

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_shortest(x: f64) -> String {
    if x == 0.0 {
        // no "-0" in output
        "0".to_string()
    } else if x.abs() < 1e-5 || x.abs() >= 1e16 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_shortest).unwrap_or_default()
}

pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.k,
            fmt_shortest(r.t),
            cell(r.c),
            cell(r.i),
            cell(r.g)
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let opt = |s: &str| -> Result<Option<f64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("bad number `{s}`"))
        }
    };
    lines
        .enumerate()
        .map(|(n, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 5 {
                return Err(format!(
                    "row {}: expected 5 cells, got {}",
                    n + 1,
                    cells.len()
                ));
            }
            Ok(CsvRow {
                k: cells[0]
                    .parse()
                    .map_err(|_| format!("bad index `{}`", cells[0]))?,
                t: cells[1]
                    .parse()
                    .map_err(|_| format!("bad number `{}`", cells[1]))?,
                c: opt(cells[2])?,
                i: opt(cells[3])?,
                g: opt(cells[4])?,
            })
        })
        .collect()
}

/// Twelve significant digits, fixed notation for moderate magnitudes.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// A plotted series.
pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

/// Mapping between data coordinates `(k, value)` and the 800x500 canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotFrame {
    pub k_min: f64,
    pub k_max: f64,
    pub lo: f64,
    pub hi: f64,
}

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 460.0;

impl PlotFrame {
    /// Value range always includes zero; a flat range is widened upwards so a
    /// zero series sits on the baseline.
    pub fn new(k_min: i64, k_max: i64, series: &[Series<'_>]) -> Self {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for s in series {
            for &v in s.values {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if hi - lo == 0.0 {
            hi = lo + 1.0;
        }
        let k_max = if k_max > k_min { k_max } else { k_min + 1 };
        Self {
            k_min: k_min as f64,
            k_max: k_max as f64,
            lo,
            hi,
        }
    }

    pub fn to_px(&self, k: f64, v: f64) -> (f64, f64) {
        let x = LEFT + (k - self.k_min) / (self.k_max - self.k_min) * (RIGHT - LEFT);
        let y = BOTTOM - (v - self.lo) / (self.hi - self.lo) * (BOTTOM - TOP);
        (x, y)
    }

    pub fn to_data(&self, x: f64, y: f64) -> (f64, f64) {
        let k = self.k_min + (x - LEFT) / (RIGHT - LEFT) * (self.k_max - self.k_min);
        let v = self.lo + (BOTTOM - y) / (BOTTOM - TOP) * (self.hi - self.lo);
        (k, v)
    }
}

/// Standalone SVG 1.1 document with one polyline per series.
pub fn render_svg(title: &str, k_start: i64, series: &[Series<'_>]) -> (String, PlotFrame) {
    let len = series.iter().map(|s| s.values.len()).max().unwrap_or(0);
    let frame = PlotFrame::new(k_start, k_start + len as i64 - 1, series);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    // axes: k along the bottom, value zero as a dashed reference
    let _ = writeln!(
        out,
        "<polyline id=\"axes\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{LEFT},{TOP} {LEFT},{BOTTOM} {RIGHT},{BOTTOM}\"/>"
    );
    let (_, y0) = frame.to_px(frame.k_min, 0.0);
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT}\" y1=\"{y0:.4}\" x2=\"{RIGHT}\" y2=\"{y0:.4}\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>"
    );
    for (label, v) in [("lo", frame.lo), ("hi", frame.hi)] {
        let (_, y) = frame.to_px(frame.k_min, v);
        let _ = writeln!(
            out,
            "<text id=\"{label}\" x=\"{}\" y=\"{y:.4}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            LEFT - 4.0,
            fmt_shortest(v)
        );
    }
    for (label, k) in [("kmin", frame.k_min), ("kmax", frame.k_max)] {
        let (x, _) = frame.to_px(k, frame.lo);
        let _ = writeln!(
            out,
            "<text id=\"{label}\" x=\"{x:.4}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{k}</text>",
            BOTTOM + 16.0
        );
    }
    for (n, s) in series.iter().enumerate() {
        let points: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let (x, y) = frame.to_px((k_start + j as i64) as f64, v);
                format!("{x:.4},{y:.4}")
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            s.name,
            s.color,
            points.join(" ")
        );
        let ly = TOP + 14.0 * n as f64 + 6.0;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>",
            RIGHT - 30.0,
            s.color,
            s.name
        );
    }
    out.push_str("</svg>\n");
    (out, frame)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Extracts the `(x, y)` canvas points of the polyline with the given id.
pub fn polyline_points(svg: &str, id: &str) -> Option<Vec<(f64, f64)>> {
    let marker = format!("<polyline id=\"{id}\"");
    let start = svg.find(&marker)?;
    let rest = &svg[start..];
    let p = rest.find("points=\"")? + "points=\"".len();
    let end = rest[p..].find('"')?;
    rest[p..p + end]
        .split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',')?;
            Some((x.parse().ok()?, y.parse().ok()?))
        })
        .collect()
}
