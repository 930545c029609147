//! CSV emission and parsing for BER curves.
//!
//! The byte layout is a contract: a fixed column order, floats printed
//! with 10 significant digits (zero as `0.0`), and a `#`-prefixed manifest
//! preamble. Reading an emitted file back and re-serializing it must
//! reproduce the bytes exactly.

use crate::config::RunManifest;
use linklab::harness::{BerCurve, BerPoint, DetectorLabel, Scheme};
use std::io::{self, BufRead, Write};

pub const CSV_HEADER: &str =
    "scheme,detector,csi_error_var,snr_db,bits,bit_errors,ber,ci_low,ci_high,seed";

/// Format a float with 10 significant digits. Zero prints as `0.0`;
/// magnitudes outside [1e-4, 1e12) use scientific notation; trailing
/// zeros are trimmed but at least one fractional digit is kept.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let abs = v.abs();
    if (1e-4..1e12).contains(&abs) {
        let exponent = abs.log10().floor() as i32;
        let frac = (9 - exponent).max(0) as usize;
        trim_fraction(format!("{v:.frac$}"))
    } else {
        let s = format!("{v:.9e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponential format");
        format!("{}e{}", trim_fraction(mantissa.to_string()), exponent)
    }
}

fn trim_fraction(mut s: String) -> String {
    if !s.contains('.') {
        s.push_str(".0");
        return s;
    }
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.push('0');
    }
    s
}

fn point_row(p: &BerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        p.scheme,
        p.detector,
        format_float(p.csi_error_variance),
        format_float(p.snr_db),
        p.bits_simulated,
        p.bit_errors,
        format_float(p.ber),
        format_float(p.ci_low),
        format_float(p.ci_high),
        p.master_seed,
    )
}

/// Write the manifest preamble, header, and one row per point, curves in
/// the order given.
pub fn write_csv(curves: &[BerCurve], manifest: &RunManifest, w: &mut impl Write) -> io::Result<()> {
    for line in manifest.preamble() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    for curve in curves {
        for point in &curve.points {
            writeln!(w, "{}", point_row(point))?;
        }
    }
    Ok(())
}

/// A parsed CSV: the raw preamble lines and the data rows as points.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub preamble: Vec<String>,
    pub points: Vec<BerPoint>,
}

impl ParsedCsv {
    /// Group consecutive rows that share (scheme, detector, CSI variance)
    /// back into curves.
    pub fn curves(&self) -> Vec<BerCurve> {
        let mut curves: Vec<BerCurve> = Vec::new();
        for p in &self.points {
            let matches_last = curves.last().is_some_and(|c: &BerCurve| {
                c.scheme == p.scheme
                    && c.detector == p.detector
                    && c.csi_error_variance == p.csi_error_variance
            });
            if !matches_last {
                curves.push(BerCurve {
                    scheme: p.scheme,
                    detector: p.detector,
                    csi_error_variance: p.csi_error_variance,
                    points: Vec::new(),
                });
            }
            curves.last_mut().expect("just pushed").points.push(p.clone());
        }
        curves
    }

    /// Re-serialize the rows exactly as [`write_csv`] would.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&point_row(p));
            out.push('\n');
        }
        out.into_bytes()
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    match s {
        "siso-ofdm" => Ok(Scheme::SisoOfdm),
        "mimo-sfbc" => Ok(Scheme::MimoSfbc),
        "awgn-qpsk" => Ok(Scheme::AwgnQpsk),
        "flat-rayleigh-qpsk" => Ok(Scheme::FlatRayleighQpsk),
        other => Err(format!("unknown scheme {other:?}")),
    }
}

fn parse_detector(s: &str) -> Result<DetectorLabel, String> {
    match s {
        "onetap" => Ok(DetectorLabel::OneTap),
        "ls" => Ok(DetectorLabel::Ls),
        "mmse" => Ok(DetectorLabel::Mmse),
        other => Err(format!("unknown detector {other:?}")),
    }
}

/// Parse a CSV produced by [`write_csv`].
pub fn parse_csv(r: impl BufRead) -> Result<ParsedCsv, String> {
    let mut preamble = Vec::new();
    let mut points = Vec::new();
    let mut seen_header = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| format!("line {}: {e}", lineno + 1))?;
        let context = |what: &str| format!("line {}: {what}: {line:?}", lineno + 1);
        if line.starts_with('#') {
            preamble.push(line);
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(context("expected header"));
            }
            seen_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(context("expected 10 fields"));
        }
        let float = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| context("bad float field"))
        };
        let int = |i: usize| -> Result<u64, String> {
            fields[i]
                .parse::<u64>()
                .map_err(|_| context("bad integer field"))
        };
        points.push(BerPoint {
            scheme: parse_scheme(fields[0]).map_err(|e| context(&e))?,
            detector: parse_detector(fields[1]).map_err(|e| context(&e))?,
            csi_error_variance: float(2)?,
            snr_db: float(3)?,
            bits_simulated: int(4)?,
            bit_errors: int(5)?,
            ber: float(6)?,
            ci_low: float(7)?,
            ci_high: float(8)?,
            master_seed: int(9)?,
        });
    }
    if !seen_header {
        return Err("missing header row".to_string());
    }
    Ok(ParsedCsv { preamble, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_rules() {
        assert_eq!(format_float(0.0), "0.0");
        assert_eq!(format_float(-0.0), "0.0");
        assert_eq!(format_float(4.0), "4.0");
        assert_eq!(format_float(0.05), "0.05");
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(0.0001), "0.0001");
        assert_eq!(format_float(1.25e-5), "1.25e-5");
        assert_eq!(format_float(9.765625e-6), "9.765625e-6");
        assert_eq!(format_float(1e15), "1.0e15");
        // 10 significant digits, rounded.
        assert_eq!(format_float(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_float(2.0 / 3.0), "0.6666666667");
        assert_eq!(format_float(1.0 / 3.0e7), "3.333333333e-8");
        // A realistic error ratio: 7985/51200 = 0.15595703125 exactly, and
        // the trailing 5 rounds to even at the 10th significant digit.
        assert_eq!(format_float(7985.0 / 51200.0), "0.1559570312");
    }

    #[test]
    fn formatting_is_stable_under_reparse() {
        let samples = [
            0.0,
            1.0,
            0.05,
            1.0 / 3.0,
            7985.0 / 51200.0,
            1.25e-5,
            3.0e-9,
            12.5,
            20.0,
            0.1744,
            1.959964,
        ];
        for &v in &samples {
            let s = format_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(format_float(back), s, "unstable formatting for {v}");
            if v != 0.0 {
                assert!((back - v).abs() / v.abs() < 1e-9, "lossy beyond quantization: {v}");
            }
        }
    }
}
