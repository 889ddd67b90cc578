//! Log-log error charts written as plain SVG.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 52.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// One operator's curve on a chart.
pub struct Series {
    pub label: String,
    /// `(n, error)`; non-positive errors are not drawn.
    pub points: Vec<(usize, f64)>,
    /// `(slope, intercept, first n, last n)` of the fitted line in log-log space.
    pub fit: Option<(f64, f64, usize, usize)>,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, lx: f64) -> f64 {
        LEFT + (lx - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, ly: f64) -> f64 {
        HEIGHT - BOTTOM - (ly - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn frame(series: &[Series]) -> Frame {
    let logs: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(_, d)| *d > 0.0 && d.is_finite())
        .map(|&(n, d)| ((n as f64).ln(), d.ln()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = logs.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if logs.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let (px, py) = (0.04 * (x1 - x0), 0.06 * (y1 - y0));
    Frame {
        x: (x0 - px, x1 + px),
        y: (y0 - py, y1 + py),
    }
}

/// Renders a log-log chart of error against n for every series.
pub fn render_chart(title: &str, series: &[Series]) -> String {
    let f = frame(series);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let (xa, xb) = (LEFT, WIDTH - RIGHT);
    let (ya, yb) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{xa:.1} {yb:.1} V{ya:.1} H{xb:.1}" fill="none" stroke="black"/>"#
    );

    // n ticks
    for n in [1usize, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100] {
        let lx = (n as f64).ln();
        if lx < f.x.0 || lx > f.x.1 {
            continue;
        }
        let x = f.px(lx);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{ya:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            ya + 5.0,
            ya + 19.0
        );
    }
    // decade ticks on the error axis
    let lo = (f.y.0 / std::f64::consts::LN_10).ceil() as i32;
    let hi = (f.y.1 / std::f64::consts::LN_10).floor() as i32;
    for e in lo..=hi {
        let y = f.py(e as f64 * std::f64::consts::LN_10);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{xb:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"##,
            xa,
            xa - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text>"#,
        (xa + xb) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">sup-norm error</text>"#,
        (ya + yb) / 2.0,
        (ya + yb) / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &(n, d) in &s.points {
            if !(d > 0.0 && d.is_finite()) {
                continue;
            }
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                f.px((n as f64).ln()),
                f.py(d.ln())
            );
        }
        let mut legend = escape(&s.label);
        if let Some((slope, intercept, first, last)) = s.fit {
            let (x0, x1) = ((first as f64).ln(), (last as f64).ln());
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 3"/>"#,
                f.px(x0),
                f.py(slope * x0 + intercept),
                f.px(x1),
                f.py(slope * x1 + intercept)
            );
            let sign = if intercept < 0.0 { '-' } else { '+' };
            legend = format!(
                "{legend}: ln d = {slope:.4} ln n {sign} {:.4}",
                intercept.abs()
            );
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{color}"/><text x="{:.1}" y="{:.1}">{legend}</text>"#,
            xb - 270.0,
            ly - 4.0,
            xb - 262.0,
            ly
        );
    }
    out.push_str("</svg>\n");
    out
}
