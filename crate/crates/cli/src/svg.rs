//! Minimal self-contained SVG line charts, log-scale y by default.

use std::fmt::Write as _;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub values: Vec<f64>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_y: bool,
) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let max_len = series.iter().map(|s| s.values.len()).max().unwrap_or(1);

    // y domain across all finite (and, for log, positive) values
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &v in &s.values {
            if !v.is_finite() || (log_y && v <= 0.0) {
                continue;
            }
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = if log_y { 1e-3 } else { 0.0 };
        y_max = 1.0;
    }
    if y_min == y_max {
        y_max = y_min + 1.0;
    }
    let (dom_lo, dom_hi) = if log_y {
        (y_min.log10().floor(), y_max.log10().ceil().max(y_min.log10().floor() + 1.0))
    } else {
        (y_min, y_max)
    };

    let x_of = |i: usize| LEFT + plot_w * i as f64 / (max_len.max(2) - 1) as f64;
    let y_of = |v: f64| {
        let t = if log_y {
            (v.log10() - dom_lo) / (dom_hi - dom_lo)
        } else {
            (v - dom_lo) / (dom_hi - dom_lo)
        };
        TOP + plot_h * (1.0 - t)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        LEFT + plot_w / 2.0
    );

    // frame
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333" stroke-width="1"/>"##
    );

    // y ticks: decades for log scale, five even divisions otherwise
    if log_y {
        let mut decade = dom_lo as i64;
        while decade <= dom_hi as i64 {
            let v = f64_pow(decade);
            let y = y_of(v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">1e{decade}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
            decade += 1;
        }
    } else {
        for tick in 0..=5 {
            let v = dom_lo + (dom_hi - dom_lo) * tick as f64 / 5.0;
            let y = y_of(v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.2}</text>"#,
                LEFT - 6.0,
                y + 4.0
            );
        }
    }
    // x ticks at quarters
    for tick in 0..=4 {
        let i = (max_len.saturating_sub(1)) * tick / 4;
        let x = x_of(i);
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 16.0,
            i + 1
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{x_label}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // series
    for s in series {
        let mut points = String::new();
        for (i, &v) in s.values.iter().enumerate() {
            if !v.is_finite() || (log_y && v <= 0.0) {
                continue;
            }
            let _ = write!(points, "{:.1},{:.1} ", x_of(i), y_of(v.min(y_max).max(y_min)));
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            points.trim_end(),
            s.color
        );
    }

    // legend
    for (idx, s) in series.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * idx as f64;
        let x = LEFT + plot_w - 80.0;
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            x + 24.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            x + 30.0,
            y + 4.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

fn f64_pow(decade: i64) -> f64 {
    10f64.powi(decade as i32)
}
