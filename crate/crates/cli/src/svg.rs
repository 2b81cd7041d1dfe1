//! Minimal hand-written SVG line/scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const PLOT_HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const LINE_HEIGHT: f64 = 16.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Markers }
    }

    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Line }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Shown in the upper right corner of the axes.
    pub notes: Vec<String>,
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter_map(|v| transform(v, log)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = (hi - lo) * 0.04;
        Self { log, lo: lo - pad, hi: hi + pad, from, to }
    }

    fn map(&self, v: f64) -> Option<f64> {
        transform(v, self.log).map(|t| self.from + (t - self.lo) / (self.hi - self.lo) * (self.to - self.from))
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 6 + 1).max(1);
            (a..=b).step_by(step as usize).map(|e| 10f64.powi(e)).collect()
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last).map(|i| i as f64 * step).collect()
        }
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    match (log, v.is_finite()) {
        (_, false) => None,
        (true, _) if v <= 0.0 => None,
        (true, _) => Some(v.log10()),
        (false, _) => Some(v),
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-3 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        self.render_with_text(&[])
    }

    /// The plot followed by a block of text lines.
    pub fn render_with_text(&self, lines: &[String]) -> String {
        let height = PLOT_HEIGHT + if lines.is_empty() { 0.0 } else { 20.0 + LINE_HEIGHT * lines.len() as f64 };
        let x_axis =
            Axis::new(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.log_x, LEFT, WIDTH - RIGHT);
        let y_axis = Axis::new(
            self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
            self.log_y,
            PLOT_HEIGHT - BOTTOM,
            TOP,
        );

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        self.axes(&mut out, &x_axis, &y_axis);

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mapped: Vec<(f64, f64)> =
                s.points.iter().filter_map(|&(x, y)| Some((x_axis.map(x)?, y_axis.map(y)?))).collect();
            match s.style {
                Style::Line => {
                    let pts: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
                Style::Markers => {
                    let _ = writeln!(out, r#"<g class="series" fill="{color}">"#);
                    for (x, y) in &mapped {
                        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3"/>"#);
                    }
                    let _ = writeln!(out, "</g>");
                }
            }
            let ly = TOP + 14.0 + i as f64 * LINE_HEIGHT;
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                LEFT + 10.0,
                ly - 9.0,
                LEFT + 25.0,
                ly,
                escape(&s.label)
            );
        }

        for (i, note) in self.notes.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text class="note" x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                WIDTH - RIGHT - 10.0,
                TOP + 14.0 + i as f64 * LINE_HEIGHT,
                escape(note)
            );
        }

        for (i, line) in lines.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{LEFT:.1}" y="{:.1}" font-family="monospace">{}</text>"#,
                PLOT_HEIGHT + 20.0 + i as f64 * LINE_HEIGHT,
                escape(line)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    fn axes(&self, out: &mut String, x: &Axis, y: &Axis) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, PLOT_HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#
        );
        for t in x.ticks() {
            if let Some(px) = x.map(t) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.1}" stroke="black"/><text x="{px:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
                    y0 + 5.0,
                    y0 + 18.0,
                    tick_label(t)
                );
            }
        }
        for t in y.ticks() {
            if let Some(py) = y.map(t) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.1}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
                    x0 - 5.0,
                    x0 - 8.0,
                    py + 4.0,
                    tick_label(t)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            PLOT_HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
    }
}
