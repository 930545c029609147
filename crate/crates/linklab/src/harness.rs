//! Monte Carlo BER experiments: configuration, trial scheduling, error
//! counting, confidence intervals, and closed-form reference curves.
//!
//! # Reproducibility
//!
//! Every random draw comes from a [`Seed`] substream labeled by
//! (master seed, experiment id, SNR index, trial index, lane), so a trial's
//! realization is a pure function of those labels. Trials run in waves
//! whose sizes depend only on accumulated error counts, and wave results
//! are reduced in trial order; the output is therefore byte-identical
//! regardless of how many threads execute the waves.
//!
//! # Stopping rule
//!
//! Each SNR point simulates whole trials of `bits_per_point` bits until
//! every emitted detector has seen at least `min_error_events` bit errors,
//! capped at 100 trials. `min_error_events == 0` runs exactly one trial
//! per point (the classical fixed-iteration setup).

use crate::channel::{
    add_awgn, apply_fir_channel, draw_mimo_flat_channel, draw_rayleigh_taps,
    snr_to_noise_variance,
};
use crate::detect::{detect_alamouti, DetectorKind};
use crate::modem::{count_bit_errors, generate_bits, qpsk_demodulate, qpsk_modulate, Lane, Seed};
use crate::numerics::Cx;
use crate::ofdm::{
    channel_frequency_response, equalize_onetap, ofdm_demodulate, ofdm_modulate, OfdmConfig,
};
use crate::spacecode::{alamouti_receive, sfbc_pair_map};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Hard cap on trials per SNR point (so a point never exceeds
/// `100 * bits_per_point` simulated bits).
pub const MAX_TRIALS_PER_POINT: u32 = 100;

/// Two-sided 95% normal quantile used for Wilson score intervals.
pub const Z_95: f64 = 1.959964;

const EXPERIMENT_SISO: u32 = 1;
const EXPERIMENT_MIMO: u32 = 2;
const EXPERIMENT_AWGN: u32 = 3;
const EXPERIMENT_FLAT_RAYLEIGH: u32 = 4;

/// Which link the experiment simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Single-antenna OFDM over a frequency-selective Rayleigh channel,
    /// one-tap equalized with perfect channel knowledge.
    SisoOfdm,
    /// 2x2 Alamouti space-frequency coding over per-codeword flat Rayleigh
    /// channels.
    MimoSfbc,
    /// Calibration mode: uncoded QPSK over AWGN only (identity channel).
    AwgnQpsk,
    /// Calibration mode: uncoded QPSK with an independent flat Rayleigh
    /// gain per symbol, one-tap equalized.
    FlatRayleighQpsk,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::SisoOfdm => "siso-ofdm",
            Scheme::MimoSfbc => "mimo-sfbc",
            Scheme::AwgnQpsk => "awgn-qpsk",
            Scheme::FlatRayleighQpsk => "flat-rayleigh-qpsk",
        };
        f.write_str(s)
    }
}

/// Detector identity attached to a curve and its CSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorLabel {
    /// Per-subcarrier division by the known channel gain.
    OneTap,
    Ls,
    Mmse,
}

impl std::fmt::Display for DetectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DetectorLabel::OneTap => "onetap",
            DetectorLabel::Ls => "ls",
            DetectorLabel::Mmse => "mmse",
        };
        f.write_str(s)
    }
}

/// One measured BER point with its Wilson 95% interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub scheme: Scheme,
    pub detector: DetectorLabel,
    pub csi_error_variance: f64,
    pub snr_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
}

impl BerPoint {
    fn from_counts(
        scheme: Scheme,
        detector: DetectorLabel,
        csi_error_variance: f64,
        snr_db: f64,
        bits_simulated: u64,
        bit_errors: u64,
        master_seed: u64,
    ) -> Self {
        let ber = bit_errors as f64 / bits_simulated as f64;
        let (ci_low, ci_high) = wilson_interval(bit_errors, bits_simulated);
        Self {
            scheme,
            detector,
            csi_error_variance,
            snr_db,
            bits_simulated,
            bit_errors,
            ber,
            ci_low,
            ci_high,
            master_seed,
        }
    }
}

/// A BER-vs-SNR curve for one (scheme, detector, CSI error) combination,
/// points in SNR grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub detector: DetectorLabel,
    pub csi_error_variance: f64,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    /// Human-readable curve name used for plot legends.
    pub fn label(&self) -> String {
        if self.csi_error_variance > 0.0 {
            format!(
                "{} {} (csi var {})",
                self.scheme, self.detector, self.csi_error_variance
            )
        } else {
            format!("{} {}", self.scheme, self.detector)
        }
    }
}

/// Experiment parameters. Defaults mirror the reference setup: 51200 bits
/// per trial, 512 subcarriers, cyclic prefix 10, 6-tap channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    /// SNR grid in dB (average symbol energy over noise variance per
    /// receive antenna), strictly increasing.
    pub snr_grid_db: Vec<f64>,
    /// Bits simulated per trial; frames are padded up to whole OFDM blocks
    /// (SISO) or codewords (MIMO), so a trial may carry slightly more.
    pub bits_per_point: usize,
    /// Keep running trials (up to the cap) until every detector has at
    /// least this many bit errors. Zero means exactly one trial.
    pub min_error_events: u64,
    pub master_seed: u64,
    pub nfft: usize,
    pub cp_len: usize,
    /// Channel taps for the SISO frequency-selective channel.
    pub channel_taps: usize,
    /// CSI error variances: `[0.0]` for perfect-CSI runs, or the sweep
    /// grid (nondecreasing) for `run_csi_sweep`.
    pub csi_error_grid: Vec<f64>,
}

impl ExperimentConfig {
    /// The reference configuration for a given scheme: SNR 0..20 dB in
    /// 2 dB steps, 51200 bits per trial, nfft 512, cyclic prefix 10,
    /// 6 channel taps, perfect CSI, at least 100 error events per point.
    pub fn reference(scheme: Scheme) -> Self {
        Self {
            scheme,
            snr_grid_db: (0..=10).map(|i| 2.0 * i as f64).collect(),
            bits_per_point: 51200,
            min_error_events: 100,
            master_seed: 1,
            nfft: 512,
            cp_len: 10,
            channel_taps: 6,
            csi_error_grid: vec![0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidConfig("empty SNR grid".into()));
        }
        if self.snr_grid_db.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidConfig("SNR grid contains NaN".into()));
        }
        for w in self.snr_grid_db.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig(format!(
                    "SNR grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.bits_per_point < 4 {
            return Err(Error::InvalidConfig(format!(
                "bits_per_point must be at least 4, got {}",
                self.bits_per_point
            )));
        }
        if self.channel_taps == 0 {
            return Err(Error::InvalidConfig("channel needs at least 1 tap".into()));
        }
        // Validate OFDM framing even for MIMO (the fields travel together).
        let cfg = OfdmConfig::new(self.nfft, self.cp_len, 1)?;
        if self.scheme == Scheme::SisoOfdm && !cfg.supports_channel(self.channel_taps) {
            return Err(Error::InvalidConfig(format!(
                "cyclic prefix {} cannot absorb a {}-tap channel",
                self.cp_len, self.channel_taps
            )));
        }
        if self.csi_error_grid.is_empty() {
            return Err(Error::InvalidConfig("empty CSI error grid".into()));
        }
        for &v in &self.csi_error_grid {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "CSI error variance must be finite and nonnegative, got {v}"
                )));
            }
        }
        for w in self.csi_error_grid.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidConfig(
                    "CSI error grid must be nondecreasing".into(),
                ));
            }
        }
        Ok(())
    }

    /// OFDM framing for one SISO trial: blocks to cover `bits_per_point`.
    fn siso_framing(&self) -> Result<(OfdmConfig, usize)> {
        let symbols = self.bits_per_point.div_ceil(2);
        let n_blocks = symbols.div_ceil(self.nfft);
        let cfg = OfdmConfig::new(self.nfft, self.cp_len, n_blocks)?;
        Ok((cfg, cfg.frame_symbols() * 2))
    }

    /// Codewords per MIMO trial covering `bits_per_point` (4 bits each).
    fn mimo_pairs(&self) -> usize {
        self.bits_per_point.div_ceil(4)
    }
}

/// Accumulated counts for one SNR point.
struct PointCounts {
    bits: u64,
    errors: Vec<u64>,
    trials: u32,
}

/// Run trials in waves until the stopping rule fires. Wave sizes double
/// the cumulative trial count (1, 1, 2, 4, ...), so the schedule is a pure
/// function of the per-wave error totals and never of thread timing.
fn run_point<F>(n_slots: usize, min_error_events: u64, trial: F) -> Result<PointCounts>
where
    F: Fn(u32) -> Result<(u64, Vec<u64>)> + Sync,
{
    let mut counts = PointCounts {
        bits: 0,
        errors: vec![0; n_slots],
        trials: 0,
    };
    while counts.trials < MAX_TRIALS_PER_POINT {
        let wave = counts.trials.max(1).min(MAX_TRIALS_PER_POINT - counts.trials);
        let results: Vec<(u64, Vec<u64>)> = (counts.trials..counts.trials + wave)
            .into_par_iter()
            .map(&trial)
            .collect::<Result<_>>()?;
        for (bits, errors) in results {
            counts.bits += bits;
            for (acc, e) in counts.errors.iter_mut().zip(errors) {
                *acc += e;
            }
        }
        counts.trials += wave;
        let slowest = counts.errors.iter().copied().min().unwrap_or(0);
        if slowest >= min_error_events {
            break;
        }
    }
    Ok(counts)
}

/// Simulate the single-antenna OFDM link: QPSK over `nfft` subcarriers,
/// cyclic prefix, block-fading frequency-selective Rayleigh channel, AWGN,
/// perfect-CSI one-tap equalization.
pub fn run_siso_ofdm(cfg: &ExperimentConfig) -> Result<BerCurve> {
    cfg.validate()?;
    if cfg.scheme != Scheme::SisoOfdm {
        return Err(Error::InvalidConfig(format!(
            "run_siso_ofdm called with scheme {}",
            cfg.scheme
        )));
    }
    if cfg.csi_error_grid != [0.0] {
        return Err(Error::InvalidConfig(
            "the SISO chain equalizes with perfect CSI; csi_error_grid must be [0.0]".into(),
        ));
    }
    let (ofdm, padded_bits) = cfg.siso_framing()?;
    let mut points = Vec::with_capacity(cfg.snr_grid_db.len());
    for (snr_idx, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let sigma2 = snr_to_noise_variance(snr_db, 1.0);
        let counts = run_point(1, cfg.min_error_events, |trial| {
            siso_trial(cfg, &ofdm, padded_bits, snr_idx as u32, trial, sigma2)
        })?;
        points.push(BerPoint::from_counts(
            Scheme::SisoOfdm,
            DetectorLabel::OneTap,
            0.0,
            snr_db,
            counts.bits,
            counts.errors[0],
            cfg.master_seed,
        ));
    }
    Ok(BerCurve {
        scheme: Scheme::SisoOfdm,
        detector: DetectorLabel::OneTap,
        csi_error_variance: 0.0,
        points,
    })
}

fn siso_trial(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    padded_bits: usize,
    snr_idx: u32,
    trial: u32,
    sigma2: f64,
) -> Result<(u64, Vec<u64>)> {
    let cell = Seed::new(cfg.master_seed).with_labels(EXPERIMENT_SISO, snr_idx, trial);
    let bits = generate_bits(&cell.lane(Lane::Bits), padded_bits);
    let symbols = qpsk_modulate(&bits)?;
    let tx = ofdm_modulate(&symbols, ofdm)?;
    let taps = draw_rayleigh_taps(&cell.lane(Lane::Channel), cfg.channel_taps);
    let rx = add_awgn(
        &apply_fir_channel(&tx, &taps),
        sigma2,
        &cell.lane(Lane::Noise),
    )?;
    let freq = ofdm_demodulate(&rx, ofdm)?;
    let h = channel_frequency_response(taps.taps(), ofdm.nfft());
    let mut estimates = Vec::with_capacity(freq.len());
    for block in freq.chunks_exact(ofdm.nfft()) {
        estimates.extend(equalize_onetap(block, &h)?.symbols);
    }
    let errors = count_bit_errors(&bits, &qpsk_demodulate(&estimates))?;
    Ok((padded_bits as u64, vec![errors]))
}

/// Both curves of one 2x2 run over the same channel, noise, and CSI error
/// realizations, so LS-vs-MMSE comparisons are exactly paired.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoCurves {
    pub ls: BerCurve,
    pub mmse: BerCurve,
}

/// Simulate the 2x2 Alamouti link at a single CSI error variance
/// (`cfg.csi_error_grid` must hold exactly one value), detecting every
/// codeword with both LS and MMSE.
pub fn run_mimo_sfbc(cfg: &ExperimentConfig) -> Result<MimoCurves> {
    cfg.validate()?;
    if cfg.scheme != Scheme::MimoSfbc {
        return Err(Error::InvalidConfig(format!(
            "run_mimo_sfbc called with scheme {}",
            cfg.scheme
        )));
    }
    if cfg.csi_error_grid.len() != 1 {
        return Err(Error::InvalidConfig(
            "run_mimo_sfbc takes a single CSI error variance; use run_csi_sweep for a grid"
                .into(),
        ));
    }
    let detectors = [DetectorKind::Ls, DetectorKind::Mmse];
    let mut curves = run_mimo_family(cfg, &cfg.csi_error_grid, &detectors)?;
    let mmse = curves.pop().expect("two detector curves");
    let ls = curves.pop().expect("two detector curves");
    Ok(MimoCurves { ls, mmse })
}

/// Simulate the 2x2 Alamouti link once per CSI error variance in
/// `cfg.csi_error_grid`, MMSE detection, with bits, channels, noise, and
/// the direction of the CSI error shared across the whole grid: entry `v`
/// sees the estimate `H + sqrt(v) * E` for one common draw of `E` per
/// codeword.
pub fn run_csi_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerCurve>> {
    cfg.validate()?;
    if cfg.scheme != Scheme::MimoSfbc {
        return Err(Error::InvalidConfig(format!(
            "run_csi_sweep called with scheme {}",
            cfg.scheme
        )));
    }
    run_mimo_family(cfg, &cfg.csi_error_grid, &[DetectorKind::Mmse])
}

/// Shared 2x2 engine: one pass simulates every (CSI variance, detector)
/// slot from the same realizations. Curves come back ordered by CSI entry,
/// then detector.
fn run_mimo_family(
    cfg: &ExperimentConfig,
    csi_grid: &[f64],
    detectors: &[DetectorKind],
) -> Result<Vec<BerCurve>> {
    let n_pairs = cfg.mimo_pairs();
    let n_slots = csi_grid.len() * detectors.len();
    let mut slot_points: Vec<Vec<BerPoint>> = vec![Vec::new(); n_slots];
    for (snr_idx, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let sigma2 = snr_to_noise_variance(snr_db, 2.0);
        let counts = run_point(n_slots, cfg.min_error_events, |trial| {
            mimo_trial(
                cfg, n_pairs, csi_grid, detectors, snr_idx as u32, trial, sigma2,
            )
        })?;
        for (slot, &errors) in counts.errors.iter().enumerate() {
            let (ci, di) = (slot / detectors.len(), slot % detectors.len());
            slot_points[slot].push(BerPoint::from_counts(
                Scheme::MimoSfbc,
                detector_label(detectors[di]),
                csi_grid[ci],
                snr_db,
                counts.bits,
                errors,
                cfg.master_seed,
            ));
        }
    }
    Ok(slot_points
        .into_iter()
        .enumerate()
        .map(|(slot, points)| {
            let (ci, di) = (slot / detectors.len(), slot % detectors.len());
            BerCurve {
                scheme: Scheme::MimoSfbc,
                detector: detector_label(detectors[di]),
                csi_error_variance: csi_grid[ci],
                points,
            }
        })
        .collect())
}

fn detector_label(kind: DetectorKind) -> DetectorLabel {
    match kind {
        DetectorKind::Ls => DetectorLabel::Ls,
        DetectorKind::Mmse => DetectorLabel::Mmse,
    }
}

fn mimo_trial(
    cfg: &ExperimentConfig,
    n_pairs: usize,
    csi_grid: &[f64],
    detectors: &[DetectorKind],
    snr_idx: u32,
    trial: u32,
    sigma2: f64,
) -> Result<(u64, Vec<u64>)> {
    let cell = Seed::new(cfg.master_seed).with_labels(EXPERIMENT_MIMO, snr_idx, trial);
    let n_bits = 4 * n_pairs;
    let bits = generate_bits(&cell.lane(Lane::Bits), n_bits);
    let symbols = qpsk_modulate(&bits)?;
    let blocks = sfbc_pair_map(&symbols)?;
    let channel = draw_mimo_flat_channel(&cell.lane(Lane::Channel), n_pairs);
    let unit_error = draw_mimo_flat_channel(&cell.lane(Lane::CsiError), n_pairs);
    let estimates = csi_grid
        .iter()
        .map(|&v| channel.add_scaled(&unit_error, v.sqrt()))
        .collect::<Result<Vec<_>>>()?;

    let mut noise_rng = cell.lane(Lane::Noise).rng();
    let noise_scale = (sigma2 / 2.0).sqrt();
    let mut draw_noise = || {
        let re: f64 = noise_rng.sample(StandardNormal);
        let im: f64 = noise_rng.sample(StandardNormal);
        Cx::new(noise_scale * re, noise_scale * im)
    };

    let mut errors = vec![0u64; csi_grid.len() * detectors.len()];
    for (p, block) in blocks.iter().enumerate() {
        let noise = [draw_noise(), draw_noise(), draw_noise(), draw_noise()];
        let rx = alamouti_receive(block, channel.unit(p), &noise);
        let sent = &bits[4 * p..4 * p + 4];
        for (ci, estimate) in estimates.iter().enumerate() {
            for (di, &kind) in detectors.iter().enumerate() {
                let (x1, x2) = detect_alamouti(&rx, estimate.unit(p), sigma2, kind)?;
                let decided = qpsk_demodulate(&[x1, x2]);
                errors[ci * detectors.len() + di] += count_bit_errors(sent, &decided)?;
            }
        }
    }
    Ok((n_bits as u64, errors))
}

/// Calibration run: uncoded QPSK over AWGN with an identity channel. The
/// grid is average symbol SNR (Es/N0) in dB; for QPSK, Eb/N0 is 10log10(2)
/// below Es/N0.
pub fn run_awgn_qpsk(
    snr_grid_db: &[f64],
    bits_per_point: usize,
    min_error_events: u64,
    master_seed: u64,
) -> Result<BerCurve> {
    run_calibration(
        Scheme::AwgnQpsk,
        EXPERIMENT_AWGN,
        snr_grid_db,
        bits_per_point,
        min_error_events,
        master_seed,
    )
}

/// Calibration run: uncoded QPSK where each symbol sees an independent
/// CN(0, 1) gain, equalized by dividing the known gain back out.
pub fn run_flat_rayleigh_qpsk(
    snr_grid_db: &[f64],
    bits_per_point: usize,
    min_error_events: u64,
    master_seed: u64,
) -> Result<BerCurve> {
    run_calibration(
        Scheme::FlatRayleighQpsk,
        EXPERIMENT_FLAT_RAYLEIGH,
        snr_grid_db,
        bits_per_point,
        min_error_events,
        master_seed,
    )
}

fn run_calibration(
    scheme: Scheme,
    experiment: u32,
    snr_grid_db: &[f64],
    bits_per_point: usize,
    min_error_events: u64,
    master_seed: u64,
) -> Result<BerCurve> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("empty SNR grid".into()));
    }
    if bits_per_point < 2 {
        return Err(Error::InvalidConfig(
            "calibration needs at least 2 bits per point".into(),
        ));
    }
    let padded_bits = bits_per_point + bits_per_point % 2;
    let mut points = Vec::with_capacity(snr_grid_db.len());
    for (snr_idx, &snr_db) in snr_grid_db.iter().enumerate() {
        let sigma2 = snr_to_noise_variance(snr_db, 1.0);
        let counts = run_point(1, min_error_events, |trial| {
            calibration_trial(
                scheme, experiment, master_seed, padded_bits, snr_idx as u32, trial, sigma2,
            )
        })?;
        points.push(BerPoint::from_counts(
            scheme,
            DetectorLabel::OneTap,
            0.0,
            snr_db,
            counts.bits,
            counts.errors[0],
            master_seed,
        ));
    }
    Ok(BerCurve {
        scheme,
        detector: DetectorLabel::OneTap,
        csi_error_variance: 0.0,
        points,
    })
}

fn calibration_trial(
    scheme: Scheme,
    experiment: u32,
    master_seed: u64,
    padded_bits: usize,
    snr_idx: u32,
    trial: u32,
    sigma2: f64,
) -> Result<(u64, Vec<u64>)> {
    let cell = Seed::new(master_seed).with_labels(experiment, snr_idx, trial);
    let bits = generate_bits(&cell.lane(Lane::Bits), padded_bits);
    let symbols = qpsk_modulate(&bits)?;
    let received = match scheme {
        Scheme::AwgnQpsk => add_awgn(&symbols, sigma2, &cell.lane(Lane::Noise))?,
        Scheme::FlatRayleighQpsk => {
            let mut gain_rng = cell.lane(Lane::Channel).rng();
            let gains: Vec<Cx> = (0..symbols.len())
                .map(|_| {
                    let re: f64 = gain_rng.sample(StandardNormal);
                    let im: f64 = gain_rng.sample(StandardNormal);
                    Cx::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
                })
                .collect();
            let faded: Vec<Cx> = symbols.iter().zip(&gains).map(|(&s, &g)| s * g).collect();
            let noisy = add_awgn(&faded, sigma2, &cell.lane(Lane::Noise))?;
            equalize_onetap(&noisy, &gains)?.symbols
        }
        _ => unreachable!("calibration schemes only"),
    };
    let errors = count_bit_errors(&bits, &qpsk_demodulate(&received))?;
    Ok((padded_bits as u64, vec![errors]))
}

/// Wilson score interval at 95% confidence for `errors` successes out of
/// `n` Bernoulli trials. Always contains the point estimate `errors / n`
/// and stays inside [0, 1]; at `errors == 0` the lower edge is exactly 0.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    assert!(n >= 1, "Wilson interval needs at least one trial");
    assert!(errors <= n, "more errors than trials");
    let p = errors as f64 / n as f64;
    let z2 = Z_95 * Z_95;
    let nf = n as f64;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // The edges are analytically exact at the boundary counts; pin them so
    // rounding in center/half cannot leave a ~1e-19 residue.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Closed-form reference BER curves, as functions of per-bit SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoreticalModel {
    /// Gray-coded QPSK over AWGN: `Q(sqrt(2 * snr_bit))`.
    QpskAwgn,
    /// Gray-coded QPSK with per-symbol flat Rayleigh fading:
    /// `0.5 * (1 - sqrt(g / (1 + g)))` at mean per-bit SNR `g`.
    QpskRayleigh,
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Reference BER at linear (not dB) per-bit SNR.
pub fn theoretical_ber(model: TheoreticalModel, snr_per_bit: f64) -> f64 {
    match model {
        TheoreticalModel::QpskAwgn => q_function((2.0 * snr_per_bit).sqrt()),
        TheoreticalModel::QpskRayleigh => {
            0.5 * (1.0 - (snr_per_bit / (1.0 + snr_per_bit)).sqrt())
        }
    }
}
