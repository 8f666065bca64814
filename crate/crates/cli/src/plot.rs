//! Minimal SVG charts: lines, grouped bars and scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>, include_zero: bool) -> Frame {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            f = Frame {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        if include_zero {
            f.y0 = f.y0.min(0.0);
            f.y1 = f.y1.max(0.0);
        }
        if f.x1 - f.x0 < 1e-12 {
            f.x0 -= 1.0;
            f.x1 += 1.0;
        }
        if f.y1 - f.y0 < 1e-12 {
            f.y0 -= 1.0;
            f.y1 += 1.0;
        }
        let pad = (f.y1 - f.y0) * 0.05;
        f.y0 -= pad;
        f.y1 += pad;
        f
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    s
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

fn axes(s: &mut String, f: &Frame, x_ticks: bool) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{:.1}" height="{:.1}" fill="none" stroke="grey"/>"#,
        r - l,
        b - t
    );
    for y in ticks(f.y0, f.y1, 5) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            l - 6.0,
            f.py(y) + 4.0,
            y
        );
    }
    if x_ticks {
        for x in ticks(f.x0, f.x1, 6) {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
                f.px(x),
                b + 16.0,
                x
            );
        }
    }
}

fn baseline(s: &mut String, f: &Frame) {
    let y = f.py(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="red" stroke-width="1.5"/>"#,
        WIDTH - RIGHT
    );
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{:.1}" width="12" height="12" fill="{color}"/>"#,
            y - 10.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}">{}</text>"#,
            x + 18.0,
            escape(name)
        );
    }
}

/// Line chart; `zero_line` draws the red reference line at 0.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    zero_line: bool,
) -> String {
    let f = Frame::fit(
        series.iter().flat_map(|s| s.points.iter().copied()),
        zero_line,
    );
    let mut s = open(title, x_label, y_label);
    axes(&mut s, &f, true);
    if zero_line {
        baseline(&mut s, &f);
    }
    for line in series {
        let pts: Vec<String> = line
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            line.color,
            pts.join(" ")
        );
        for &(x, y) in &line.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{}"/>"#,
                f.px(x),
                f.py(y),
                line.color
            );
        }
    }
    let entries: Vec<(&str, &str)> = series
        .iter()
        .map(|l| (l.name.as_str(), l.color.as_str()))
        .collect();
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Grouped bar chart; `groups[g].2[c]` is the value of group `g` in category `c`.
pub fn bar_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    categories: &[String],
    groups: &[(String, String, Vec<f64>)],
) -> String {
    let values = groups.iter().flat_map(|g| g.2.iter().map(|&v| (0.0, v)));
    let mut f = Frame::fit(values, true);
    f.x0 = 0.0;
    f.x1 = categories.len().max(1) as f64;
    let mut s = open(title, x_label, y_label);
    axes(&mut s, &f, false);
    let slot = (WIDTH - LEFT - RIGHT) / categories.len().max(1) as f64;
    let bar = slot * 0.8 / groups.len().max(1) as f64;
    let zero = f.py(0.0);
    for (c, name) in categories.iter().enumerate() {
        let x = LEFT + slot * c as f64;
        if categories.len() <= 24 || c % (categories.len() / 12).max(1) == 0 {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
                x + slot / 2.0,
                HEIGHT - BOTTOM + 14.0,
                escape(name)
            );
        }
        for (g, (_, color, vals)) in groups.iter().enumerate() {
            let v = vals.get(c).copied().unwrap_or(0.0);
            let y = f.py(v);
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}"/>"#,
                x + slot * 0.1 + bar * g as f64,
                y.min(zero),
                bar,
                (zero - y).abs()
            );
        }
    }
    let entries: Vec<(&str, &str)> = groups
        .iter()
        .map(|g| (g.0.as_str(), g.1.as_str()))
        .collect();
    if entries.len() > 1 {
        legend(&mut s, &entries);
    }
    s.push_str("</svg>\n");
    s
}

/// Labeled scatter plot with red reference lines through the origin.
pub fn scatter_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(String, f64, f64)],
) -> String {
    let mut f = Frame::fit(points.iter().map(|p| (p.1, p.2)).chain([(0.0, 0.0)]), true);
    let pad = (f.x1 - f.x0) * 0.05;
    f.x0 -= pad;
    f.x1 += pad;
    let mut s = open(title, x_label, y_label);
    axes(&mut s, &f, false);
    for x in ticks(f.x0, f.x1, 6) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            f.px(x),
            HEIGHT - BOTTOM + 16.0,
            x
        );
    }
    baseline(&mut s, &f);
    let x = f.px(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="red" stroke-width="1.5"/>"#,
        HEIGHT - BOTTOM
    );
    for (label, px, py) in points {
        let (cx, cy) = (f.px(*px), f.py(*py));
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.1}" cy="{cy:.1}" r="4" fill="{}"/>"#,
            PALETTE[0]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
            cx + 6.0,
            cy - 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
