//! Line plots of metrics CSVs as standalone SVG.
//!
//! The first CSV column is the x axis. Output depends only on the input
//! bytes: coordinates are printed with fixed precision and series are drawn
//! in argument order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::AppError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads `columns` from every input. Every column must exist in every file.
pub fn load_series(inputs: &[PathBuf], columns: &[String]) -> Result<(String, Vec<Series>), AppError> {
    let mut x_label = String::new();
    let mut series = Vec::new();
    for path in inputs {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| AppError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?
            .clone();
        if headers.is_empty() {
            return Err(AppError::Validation(format!("{}: no header row", path.display())));
        }
        if x_label.is_empty() {
            x_label = headers[0].to_string();
        }
        let mut indices = Vec::new();
        for col in columns {
            let j = headers.iter().position(|h| h == col).ok_or_else(|| {
                AppError::Validation(format!("unknown column `{col}` in {}", path.display()))
            })?;
            indices.push(j);
        }
        let mut points: Vec<Vec<(f64, f64)>> = vec![Vec::new(); indices.len()];
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
            let number = |j: usize| -> Result<f64, AppError> {
                record[j].trim().parse::<f64>().map_err(|_| {
                    AppError::Validation(format!(
                        "{} line {}: `{}` in column `{}` is not a number",
                        path.display(),
                        line + 2,
                        &record[j],
                        &headers[j]
                    ))
                })
            };
            let x = number(0)?;
            for (k, &j) in indices.iter().enumerate() {
                points[k].push((x, number(j)?));
            }
        }
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let parent = path
            .parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().into_owned());
        let source = match parent {
            Some(p) if inputs.len() > 1 => format!("{p}/{stem}"),
            _ => stem,
        };
        for (col, pts) in columns.iter().zip(points) {
            series.push(Series {
                label: format!("{source}:{col}"),
                points: pts,
            });
        }
    }
    Ok((x_label, series))
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the series as an SVG document.
pub fn render_svg(x_label: &str, series: &[Series]) -> String {
    let (x0, x1) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (left, bottom) = (MARGIN_LEFT, MARGIN_TOP + plot_h);
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.2} {MARGIN_TOP:.2} L{left:.2} {bottom:.2} L{:.2} {bottom:.2}" fill="none" stroke="black"/>"#,
        left + plot_w
    );
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 20.0,
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if !s.points.is_empty() {
            let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN_TOP + 10.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Loads, renders and writes the plot.
pub fn plot(inputs: &[PathBuf], columns: &[String], svg: &Path) -> Result<(), AppError> {
    if inputs.is_empty() {
        return Err(AppError::Validation("plot: at least one --in file is required".into()));
    }
    if columns.is_empty() {
        return Err(AppError::Validation("plot: --columns must name at least one column".into()));
    }
    let (x_label, series) = load_series(inputs, columns)?;
    std::fs::write(svg, render_svg(&x_label, &series))
        .map_err(|e| AppError::Runtime(anyhow::anyhow!("writing {}: {e}", svg.display())))
}
