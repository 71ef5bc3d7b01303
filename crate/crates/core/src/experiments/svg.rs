//! Minimal SVG plots: scatter and heatmap.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const M: f64 = 50.0;

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame(svg: &mut String, title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = write!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        svg,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = write!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = write!(svg, r#"<text x="{M}" y="{}">{:.3}</text>"#, H - M + 14.0, x.0);
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#,
        W - M,
        H - M + 14.0,
        x.1
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#,
        M - 4.0,
        H - M,
        y.0
    );
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#,
        M - 4.0,
        M + 8.0,
        y.1
    );
}

fn px(v: f64, (lo, hi): (f64, f64)) -> f64 {
    M + (v - lo) / (hi - lo) * (W - 2.0 * M)
}

fn py(v: f64, (lo, hi): (f64, f64)) -> f64 {
    H - M - (v - lo) / (hi - lo) * (H - 2.0 * M)
}

/// Scatter plot with a dashed `y = 0` line when zero is in range.
pub fn scatter(title: &str, xlabel: &str, ylabel: &str, points: &[(f64, f64)]) -> String {
    let xr = bounds(points.iter().map(|p| p.0));
    let yr = bounds(points.iter().map(|p| p.1));
    let mut svg = String::new();
    frame(&mut svg, title, xlabel, ylabel, xr, yr);
    if yr.0 < 0.0 && yr.1 > 0.0 {
        let y0 = py(0.0, yr);
        let _ = write!(
            svg,
            r#"<line x1="{M}" y1="{y0:.2}" x2="{}" y2="{y0:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            W - M
        );
    }
    for &(x, y) in points {
        let _ = write!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2" fill="#1f5fbf" fill-opacity="0.6"/>"##,
            px(x, xr),
            py(y, yr)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn color(t: f64) -> String {
    // white → dark blue
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - 0.7 * t)) as u8;
    format!("rgb({r},{g},255)")
}

/// Heatmap of `values[i][j]` over `xs[i] × ys[j]`; `None` cells are grey.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], values: &[Vec<Option<f64>>]) -> String {
    let xr = bounds(xs.iter().copied());
    let yr = bounds(ys.iter().copied());
    let vr = bounds(values.iter().flatten().flatten().copied());
    let mut svg = String::new();
    frame(&mut svg, title, xlabel, ylabel, xr, yr);
    let cw = (W - 2.0 * M) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * M) / ys.len().max(1) as f64;
    for (i, col) in values.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            let fill = match v {
                Some(v) => color((v - vr.0) / (vr.1 - vr.0)),
                None => "rgb(200,200,200)".to_string(),
            };
            let _ = write!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                M + i as f64 * cw,
                H - M - (j + 1) as f64 * ch,
                cw + 0.2,
                ch + 0.2
            );
        }
    }
    let _ = write!(
        svg,
        r#"<text x="{}" y="36" text-anchor="end">range [{:.4}, {:.4}]</text>"#,
        W - M,
        vr.0,
        vr.1
    );
    svg.push_str("</svg>\n");
    svg
}

/// Two heatmaps side by side in one document.
pub fn side_by_side(left: &str, right: &str) -> String {
    let strip = |s: &str| {
        s.trim_end()
            .trim_end_matches("</svg>")
            .split_once('>')
            .map_or("", |x| x.1)
            .to_string()
    };
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{H}"><g>{}</g><g transform="translate({W} 0)">{}</g></svg>
"#,
        2.0 * W,
        strip(left),
        strip(right)
    )
}
