//! Deterministic text, CSV and SVG output.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::domains::Frame;
use crate::topology::{complement_components, Raster};

/// `%.9g`: nine significant digits, trailing zeros trimmed, exponent form
/// outside `[1e−4, 1e9)`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_point(z: Complex64) -> String {
    format!("{},{}", fmt_g(z.re), fmt_g(z.im))
}

/// CSV with a header row; every float in `%.9g` form.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_g(v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

const COMPLEMENT_COLORS: [&str; 6] = [
    "#d9d9d9", "#fdae61", "#abd9e9", "#f46d43", "#74add1", "#a6d96a",
];

/// SVG 1.1 picture of a ball raster: one unit square per cell, row 0 at the
/// bottom. Ball cells are dark, other domain cells light, and complement
/// cells of the ball are colored by complement-component index.
pub fn ball_svg(frame: &Frame, domain: &Raster, ball: &Raster) -> String {
    let (w, h) = (frame.width, frame.height);
    let comps = complement_components(ball);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    for j in 0..h {
        for i in 0..w {
            let color = if ball.get(i, j) {
                "#2b5797"
            } else if domain.get(i, j) {
                "#e8eef7"
            } else {
                let label = comps.labels.label(i, j);
                let slot = if comps.unbounded.contains(&label) {
                    0
                } else {
                    1 + comps.bounded.iter().position(|&b| b == label).unwrap_or(0)
                        % (COMPLEMENT_COLORS.len() - 1)
                };
                COMPLEMENT_COLORS[slot]
            };
            let _ = writeln!(
                s,
                r#"<rect x="{i}" y="{}" width="1" height="1" fill="{color}"/>"#,
                h - 1 - j
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g(0.5f64.atanh()), "0.549306144");
        assert_eq!(fmt_g(2.0), "2");
        assert_eq!(fmt_g(-1.25), "-1.25");
        assert_eq!(fmt_g(1234567891.0), "1.23456789e+09");
        assert_eq!(fmt_g(0.0000123456789123), "1.23456789e-05");
        assert_eq!(fmt_g(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_g(9.9999999999), "10");
        assert_eq!(fmt_g(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], &[vec![1.0, 0.1], vec![1.0 / 3.0, -2.0]]);
        assert_eq!(s, "a,b\n1,0.1\n0.333333333,-2\n");
    }

    #[test]
    fn svg_is_deterministic() {
        let frame = Frame::unit(0.5).unwrap();
        let domain = frame.rasterize(|z| z.norm() < 1.0);
        let ball = frame.rasterize(|z| z.norm() < 0.6);
        let a = ball_svg(&frame, &domain, &ball);
        assert_eq!(a, ball_svg(&frame, &domain, &ball));
        assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<rect").count(), frame.cell_count());
    }
}
