//! Log-log line charts as hand-written SVG.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;

/// Least-squares slope of `ys` against `xs`, NaN if the `xs` are all equal.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

fn padded_range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `(x, y)` pairs (all positive) as a log-log polyline sorted by `x`.
///
/// The root element carries the plotted decade ranges as `data-log-x` and
/// `data-log-y` (`"lo hi"` in log₁₀ units) and the fitted slope as
/// `data-slope`, so the pixel coordinates can be mapped back to data.
pub fn loglog_chart(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log10(), y.log10())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let lx: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let slope = fit_slope(&lx, &ly);
    let (x0, x1) = padded_range(&lx);
    let (y0, y1) = padded_range(&ly);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
    let py = |v: f64| TOP + ph - (v - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-x-column="{}" data-y-column="{}" data-log-x="{x0} {x1}" data-log-y="{y0} {y1}" data-slope="{slope}">"#,
        escape(x_label),
        escape(y_label)
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/></g>"#,
        TOP + ph,
        LEFT + pw,
        TOP + ph,
        TOP + ph
    );

    // decade ticks, falling back to the range ends when no decade is inside
    let ticks = |lo: f64, hi: f64| -> Vec<f64> {
        let t: Vec<f64> = (lo.ceil() as i32..=hi.floor() as i32).map(f64::from).collect();
        if t.is_empty() { vec![lo, hi] } else { t }
    };
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11" fill="black">"#);
    for t in ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            format_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            format_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle">log-log fit slope {:.4}</text>"#,
        LEFT + pw / 2.0,
        slope
    );
    s.push_str("</g>\n");

    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.4},{:.4}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        r#"<polyline class="series" fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.4}" cy="{:.4}" r="3" fill="steelblue"/>"#, px(x), py(y));
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(log_value: f64) -> String {
    if log_value.fract() == 0.0 {
        format!("1e{}", log_value as i32)
    } else {
        format!("{:.3}", 10f64.powf(log_value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0f64, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 - 0.5 * x).collect();
        assert!((fit_slope(&xs, &ys) + 0.5).abs() < 1e-12);
        assert!(fit_slope(&[1.0, 1.0], &[0.0, 1.0]).is_nan());
    }

    #[test]
    fn chart_contains_one_polyline() {
        let svg = loglog_chart(&[(4.0, 0.35), (16.0, 0.17), (64.0, 0.08)], "N", "winf<");
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("data-y-column=\"winf&lt;\""));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
