//! The `selftest` subcommand: numerical invariants that must hold on any
//! build/platform before simulation output is trusted. Each check prints
//! one `ok`/`FAIL` line; any failure makes the run exit nonzero.

use linklab::harness::{
    run_awgn_qpsk, theoretical_ber, wilson_interval, TheoreticalModel,
};
use linklab::modem::{generate_bits, qpsk_modulate, Seed};
use linklab::numerics::{fft, naive_dft, Cx, Matrix2x2};
use linklab::ofdm::{channel_frequency_response, ofdm_demodulate, ofdm_modulate, OfdmConfig};
use linklab::spacecode::{
    alamouti_combine, alamouti_receive, build_effective_channel, AlamoutiBlock,
};
use linklab::detect::{detect_alamouti, DetectorKind};
use rand::prelude::*;

struct Check {
    name: &'static str,
    run: fn() -> Result<(), String>,
}

const CHECKS: &[Check] = &[
    Check {
        name: "fft-matches-naive-dft",
        run: check_fft_oracle,
    },
    Check {
        name: "cyclic-prefix-circularizes-channel",
        run: check_cp_theorem,
    },
    Check {
        name: "alamouti-orthogonality-and-recovery",
        run: check_alamouti,
    },
    Check {
        name: "ls-mmse-coincide-at-zero-noise",
        run: check_detector_coincidence,
    },
    Check {
        name: "awgn-ber-matches-closed-form",
        run: check_awgn_calibration,
    },
];

/// Run every check, printing one line each; returns true when all pass.
pub fn run_selftest(w: &mut impl std::io::Write) -> std::io::Result<bool> {
    let mut all_ok = true;
    for check in CHECKS {
        match (check.run)() {
            Ok(()) => writeln!(w, "ok   {}", check.name)?,
            Err(detail) => {
                all_ok = false;
                writeln!(w, "FAIL {} ({detail})", check.name)?;
            }
        }
    }
    Ok(all_ok)
}

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Cx> {
    (0..n)
        .map(|_| Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn check_fft_oracle() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(101);
    let mut n = 2;
    while n <= 512 {
        let x = random_vec(&mut rng, n);
        let fast = fft(&x).map_err(|e| e.to_string())?;
        let slow = naive_dft(&x, false);
        let worst = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if worst >= 1e-9 {
            return Err(format!("size {n}: max error {worst:.3e}"));
        }
        n *= 2;
    }
    Ok(())
}

fn check_cp_theorem() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(102);
    let cfg = OfdmConfig::new(512, 10, 1).map_err(|e| e.to_string())?;
    for frame in 0..20 {
        let x = random_vec(&mut rng, 512);
        let taps = random_vec(&mut rng, 6);
        let tx = ofdm_modulate(&x, &cfg).map_err(|e| e.to_string())?;
        let mut rx = linklab::numerics::linear_convolve(&tx, &taps);
        rx.truncate(tx.len());
        let freq = ofdm_demodulate(&rx, &cfg).map_err(|e| e.to_string())?;
        let h = channel_frequency_response(&taps, 512);
        let worst = freq
            .iter()
            .zip(x.iter().zip(&h))
            .map(|(&got, (&xk, &hk))| (got - xk * hk).norm())
            .fold(0.0, f64::max);
        if worst >= 1e-9 {
            return Err(format!("frame {frame}: max deviation {worst:.3e}"));
        }
    }
    Ok(())
}

fn check_alamouti() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(103);
    let zero = [Cx::new(0.0, 0.0); 4];
    for i in 0..2000 {
        let block = AlamoutiBlock::new(
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        );
        let h = Matrix2x2::new(
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        );
        let rx = alamouti_receive(&block, &h, &zero);
        let (x1, x2) = alamouti_combine(&rx, &h).map_err(|e| e.to_string())?;
        if (x1 - block.x1).norm() >= 1e-12 || (x2 - block.x2).norm() >= 1e-12 {
            return Err(format!("draw {i}: combining not exact"));
        }

        let eff = build_effective_channel(&h, &rx);
        let mut g12 = Cx::new(0.0, 0.0);
        let mut g11 = 0.0;
        for row in &eff.rows {
            g12 += row[0].conj() * row[1];
            g11 += row[0].norm_sqr();
        }
        if g12.norm() >= 1e-12 || (g11 - h.frobenius_sqr()).abs() >= 1e-12 {
            return Err(format!("draw {i}: effective columns not orthogonal"));
        }
    }
    Ok(())
}

fn check_detector_coincidence() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(104);
    for i in 0..1000 {
        let bits = generate_bits(&Seed::new(104 + i), 4);
        let syms = qpsk_modulate(&bits).map_err(|e| e.to_string())?;
        let block = AlamoutiBlock::new(syms[0], syms[1]);
        let h = Matrix2x2::new(
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        );
        let noise = [
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Cx::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let rx = alamouti_receive(&block, &h, &noise);
        let (l1, l2) = detect_alamouti(&rx, &h, 0.0, DetectorKind::Ls).map_err(|e| e.to_string())?;
        let (m1, m2) =
            detect_alamouti(&rx, &h, 0.0, DetectorKind::Mmse).map_err(|e| e.to_string())?;
        if (l1 - m1).norm() >= 1e-12 || (l2 - m2).norm() >= 1e-12 {
            return Err(format!("draw {i}: detectors disagree at zero noise"));
        }
    }
    Ok(())
}

fn check_awgn_calibration() -> Result<(), String> {
    let offset = 10.0 * 2f64.log10(); // Es/N0 = Eb/N0 + 3.01 dB for QPSK
    for &eb_no_db in &[0.0, 4.0, 8.0] {
        let curve = run_awgn_qpsk(&[eb_no_db + offset], 200_000, 0, 2026)
            .map_err(|e| e.to_string())?;
        let p = &curve.points[0];
        let expect = theoretical_ber(TheoreticalModel::QpskAwgn, 10f64.powf(eb_no_db / 10.0));
        let (lo, hi) = wilson_interval(p.bit_errors, p.bits_simulated);
        let slack = 3.0 * (hi - lo) / 2.0;
        if (p.ber - expect).abs() >= slack {
            return Err(format!(
                "Eb/N0 {eb_no_db} dB: ber {:.4e} vs theory {expect:.4e} (slack {slack:.2e})",
                p.ber
            ));
        }
    }
    Ok(())
}
