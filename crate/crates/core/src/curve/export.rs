//! CSV and SVG renderings of curves.

use super::Curve;
use crate::{Error, Result};

/// Decimal rendering with exactly `digits` significant digits.
///
/// Non-finite values become `inf`, `-inf` or `nan`. Magnitudes in
/// `[1e-7, 1e21)` are written positionally, others in exponent form.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let mantissa_digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if value == 0.0 || !(-7..21).contains(&exponent) {
        return if value == 0.0 {
            format!("{sign}0.{}", "0".repeat(digits - 1))
        } else {
            format!("{sign}{mantissa}e{exponent}")
        };
    }
    let len = mantissa_digits.len() as i32;
    if exponent < 0 {
        let zeros = "0".repeat((-exponent - 1) as usize);
        format!("{sign}0.{zeros}{mantissa_digits}")
    } else if exponent + 1 >= len {
        let zeros = "0".repeat((exponent + 1 - len) as usize);
        format!("{sign}{mantissa_digits}{zeros}.0")
    } else {
        let (int, frac) = mantissa_digits.split_at((exponent + 1) as usize);
        format!("{sign}{int}.{frac}")
    }
}

/// `x,y` header followed by one row per breakpoint, 17 significant digits.
pub fn curve_to_csv(curve: &Curve) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in curve.points() {
        out.push_str(&format_significant(x, 17));
        out.push(',');
        out.push_str(&format_significant(y, 17));
        out.push('\n');
    }
    out
}

/// Parses the output of [`curve_to_csv`].
pub fn curve_from_csv(text: &str) -> Result<Curve> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,y" => {}
        _ => return Err(Error::InvalidSystem("missing `x,y` header".into())),
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| Error::InvalidSystem(format!("malformed row `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSystem(format!("bad number `{s}`")))
        };
        xs.push(parse(x)?);
        ys.push(parse(y)?);
    }
    Curve::from_points(xs, ys)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Single polyline in a 640x480 view box with light axes.
pub fn curve_to_svg(curve: &Curve) -> String {
    let z = curve.z();
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let f = |v: f64| format_significant(v, 6);
    let points: Vec<String> = curve
        .points()
        .map(|(x, y)| {
            let px = MARGIN + x / z * plot_w;
            let py = HEIGHT - MARGIN - y * plot_h;
            format!("{},{}", f(px), f(py))
        })
        .collect();
    let x0 = f(MARGIN);
    let y0 = f(HEIGHT - MARGIN);
    let x1 = f(WIDTH - MARGIN);
    let y1 = f(MARGIN);
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" width=\"640\" height=\"480\">\n",
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{points}\"/>\n",
            "</svg>\n"
        ),
        x0 = x0,
        y0 = y0,
        x1 = x1,
        y1 = y1,
        points = points.join(" ")
    )
}
