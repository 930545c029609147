//! Static SVG rendering of BER waterfall curves: linear dB on x,
//! log-scale BER on y, one polyline per curve plus a legend.

use linklab::harness::BerCurve;
use std::fmt::Write as _;
use std::io::{self, Write};

/// Smallest plottable BER; points at or below it (including exact zeros)
/// are clipped to this floor and drawn with open markers.
pub const BER_FLOOR: f64 = 1e-7;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 220.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Frame {
    snr_min: f64,
    snr_max: f64,
}

impl Frame {
    fn x(&self, snr: f64) -> f64 {
        let span = (self.snr_max - self.snr_min).max(1e-12);
        MARGIN_LEFT + (snr - self.snr_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, ber: f64) -> f64 {
        // log10 scale from BER_FLOOR (bottom) to 1.0 (top).
        let decades = -BER_FLOOR.log10();
        let t = (-ber.max(BER_FLOOR).log10()) / decades;
        MARGIN_TOP + t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn fmt_coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Render the curves into an SVG document.
pub fn render_svg(curves: &[BerCurve], w: &mut impl Write) -> io::Result<()> {
    assert!(!curves.is_empty(), "need at least one curve");
    assert!(
        curves.iter().all(|c| c.points.len() >= 2),
        "curves need at least two points"
    );
    let snr_min = curves
        .iter()
        .flat_map(|c| c.points.first())
        .map(|p| p.snr_db)
        .fold(f64::INFINITY, f64::min);
    let snr_max = curves
        .iter()
        .flat_map(|c| c.points.last())
        .map(|p| p.snr_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame { snr_min, snr_max };

    let mut body = String::new();
    let _ = writeln!(
        body,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        body,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // Decade grid lines and y labels.
    let decades = -BER_FLOOR.log10() as i32;
    for d in 0..=decades {
        let ber = 10f64.powi(-d);
        let y = frame.y(ber);
        let _ = writeln!(
            body,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#dddddd" stroke-width="1"/>"##,
            fmt_coord(MARGIN_LEFT),
            fmt_coord(y),
            fmt_coord(WIDTH - MARGIN_RIGHT),
            fmt_coord(y)
        );
        let _ = writeln!(
            body,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="end">1e-{d}</text>"#,
            fmt_coord(MARGIN_LEFT - 8.0),
            fmt_coord(y + 4.0)
        );
    }

    // X ticks at each distinct SNR in the first curve's grid.
    for p in &curves[0].points {
        let x = frame.x(p.snr_db);
        let _ = writeln!(
            body,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#dddddd" stroke-width="1"/>"##,
            fmt_coord(x),
            fmt_coord(MARGIN_TOP),
            fmt_coord(x),
            fmt_coord(HEIGHT - MARGIN_BOTTOM)
        );
        let _ = writeln!(
            body,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
            fmt_coord(x),
            fmt_coord(HEIGHT - MARGIN_BOTTOM + 18.0),
            crate::csvio::format_float(p.snr_db)
        );
    }

    // Axis labels.
    let _ = writeln!(
        body,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">SNR (dB)</text>"#,
        fmt_coord((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0),
        fmt_coord(HEIGHT - 12.0)
    );
    let _ = writeln!(
        body,
        r#"<text x="16" y="{}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">BER</text>"#,
        fmt_coord(HEIGHT / 2.0),
        fmt_coord(HEIGHT / 2.0)
    );

    // Plot frame.
    let _ = writeln!(
        body,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(MARGIN_TOP),
        fmt_coord(WIDTH - MARGIN_LEFT - MARGIN_RIGHT),
        fmt_coord(HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    );

    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{},{}", fmt_coord(frame.x(p.snr_db)), fmt_coord(frame.y(p.ber))))
            .collect();
        let _ = writeln!(
            body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for p in &curve.points {
            let (x, y) = (frame.x(p.snr_db), frame.y(p.ber));
            if p.ber <= BER_FLOOR {
                // Clipped to the floor: open marker.
                let _ = writeln!(
                    body,
                    r#"<circle cx="{}" cy="{}" r="4" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    fmt_coord(x),
                    fmt_coord(y)
                );
            } else {
                let _ = writeln!(
                    body,
                    r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                    fmt_coord(x),
                    fmt_coord(y)
                );
            }
        }
        // Legend entry.
        let ly = MARGIN_TOP + 14.0 + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 16.0;
        let _ = writeln!(
            body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            fmt_coord(lx),
            fmt_coord(ly - 4.0),
            fmt_coord(lx + 26.0),
            fmt_coord(ly - 4.0)
        );
        let _ = writeln!(
            body,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12">{}</text>"#,
            fmt_coord(lx + 32.0),
            fmt_coord(ly),
            curve.label()
        );
    }

    body.push_str("</svg>\n");
    w.write_all(body.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use linklab::harness::{BerPoint, DetectorLabel, Scheme};

    fn point(snr: f64, ber: f64) -> BerPoint {
        let errors = (ber * 10000.0) as u64;
        BerPoint {
            scheme: Scheme::MimoSfbc,
            detector: DetectorLabel::Ls,
            csi_error_variance: 0.0,
            snr_db: snr,
            bits_simulated: 10000,
            bit_errors: errors,
            ber,
            ci_low: (ber - 0.01).max(0.0),
            ci_high: (ber + 0.01).min(1.0),
            master_seed: 1,
        }
    }

    fn curve(bers: &[f64]) -> BerCurve {
        BerCurve {
            scheme: Scheme::MimoSfbc,
            detector: DetectorLabel::Ls,
            csi_error_variance: 0.0,
            points: bers
                .iter()
                .enumerate()
                .map(|(i, &b)| point(2.0 * i as f64, b))
                .collect(),
        }
    }

    fn render_to_string(curves: &[BerCurve]) -> String {
        let mut buf = Vec::new();
        render_svg(curves, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn one_polyline_per_curve() {
        let curves = vec![curve(&[0.3, 0.1, 0.03]), curve(&[0.2, 0.05, 0.01])];
        let svg = render_to_string(&curves);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn x_coordinates_increase_along_a_curve() {
        let svg = render_to_string(&[curve(&[0.4, 0.2, 0.1, 0.05, 0.02])]);
        let points_attr = svg
            .split("<polyline points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let xs: Vec<f64> = points_attr
            .split(' ')
            .map(|pair| pair.split(',').next().unwrap().parse().unwrap())
            .collect();
        for w in xs.windows(2) {
            assert!(w[1] > w[0], "x did not increase: {xs:?}");
        }
    }

    #[test]
    fn zero_ber_points_are_floored_with_open_markers() {
        let svg = render_to_string(&[curve(&[0.01, 1e-4, 0.0])]);
        // The zero point must not break the polyline: still 3 coordinate
        // pairs, and an open (unfilled) marker appears.
        let points_attr = svg
            .split("<polyline points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(points_attr.split(' ').count(), 3);
        assert!(svg.contains(r##"fill="none" stroke="#1f77b4""##));
        // The floored y equals the bottom decade's y coordinate.
        let frame = Frame {
            snr_min: 0.0,
            snr_max: 4.0,
        };
        let floor_y = fmt_coord(frame.y(BER_FLOOR));
        assert!(points_attr.ends_with(&format!(",{floor_y}")));
    }
}
