//! Stochastic channel models and noise.
//!
//! All randomness flows through [`Seed`](crate::modem::Seed) substreams so a
//! given (master seed, experiment, SNR index, trial, lane) tuple always
//! reproduces the same draw, independent of thread count or call order
//! elsewhere in the program.
//!
//! Complex circularly-symmetric Gaussians CN(0, v) are drawn as independent
//! real and imaginary parts with variance v/2 each, real part first.

use crate::modem::Seed;
use crate::numerics::{linear_convolve, Cx, Matrix2x2};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// One CN(0, variance) sample: re then im, each N(0, variance/2).
fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Cx {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cx::new(s * re, s * im)
}

/// A frequency-selective block-fading channel realization: `taps.len()`
/// complex coefficients held fixed for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTaps {
    taps: Vec<Cx>,
}

impl ChannelTaps {
    pub fn new(taps: Vec<Cx>) -> Self {
        Self { taps }
    }

    pub fn taps(&self) -> &[Cx] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Total tap energy `sum |h_l|^2`; 1.0 on average for a unit profile.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Uniform power-delay profile: `l` taps of power 1/l each, summing to one
/// so the channel neither amplifies nor attenuates on average.
pub fn uniform_profile(l: usize) -> Vec<f64> {
    vec![1.0 / l as f64; l]
}

/// Draw `l` independent Rayleigh-fading taps with the uniform profile:
/// tap `i` is CN(0, 1/l), drawn in index order.
pub fn draw_rayleigh_taps(seed: &Seed, l: usize) -> ChannelTaps {
    draw_rayleigh_taps_with_profile(seed, &uniform_profile(l))
}

/// Draw taps with an explicit power-delay profile (one variance per tap).
pub fn draw_rayleigh_taps_with_profile(seed: &Seed, profile: &[f64]) -> ChannelTaps {
    let mut rng = seed.rng();
    ChannelTaps::new(
        profile
            .iter()
            .map(|&p| complex_gaussian(&mut rng, p))
            .collect(),
    )
}

/// A sequence of 2x2 flat-fading channel matrices, one per space-frequency
/// code block, entries iid CN(0, 1). Entry order within a unit is
/// (h11, h12, h21, h22).
#[derive(Debug, Clone, PartialEq)]
pub struct MimoFlatChannel {
    units: Vec<Matrix2x2>,
}

impl MimoFlatChannel {
    pub fn new(units: Vec<Matrix2x2>) -> Self {
        Self { units }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn unit(&self, i: usize) -> &Matrix2x2 {
        &self.units[i]
    }

    pub fn units(&self) -> &[Matrix2x2] {
        &self.units
    }

    /// `self + scale * other`, element-wise over all units. With
    /// `scale == 0.0` the result is bit-identical to `self`.
    pub fn add_scaled(&self, other: &MimoFlatChannel, scale: f64) -> Result<MimoFlatChannel> {
        if self.units.len() != other.units.len() {
            return Err(Error::LengthMismatch {
                expected: self.units.len(),
                got: other.units.len(),
            });
        }
        Ok(MimoFlatChannel::new(
            self.units
                .iter()
                .zip(&other.units)
                .map(|(h, e)| h.add(&e.scale(scale)))
                .collect(),
        ))
    }
}

/// Draw `n_units` channel matrices with iid CN(0, 1) entries.
pub fn draw_mimo_flat_channel(seed: &Seed, n_units: usize) -> MimoFlatChannel {
    let mut rng = seed.rng();
    MimoFlatChannel::new(
        (0..n_units)
            .map(|_| {
                Matrix2x2::new(
                    complex_gaussian(&mut rng, 1.0),
                    complex_gaussian(&mut rng, 1.0),
                    complex_gaussian(&mut rng, 1.0),
                    complex_gaussian(&mut rng, 1.0),
                )
            })
            .collect(),
    )
}

/// Convolve the frame with the channel taps and truncate to the frame
/// length (the receiver observes exactly as many samples as were sent).
pub fn apply_fir_channel(x: &[Cx], channel: &ChannelTaps) -> Vec<Cx> {
    let mut y = linear_convolve(x, channel.taps());
    y.truncate(x.len());
    y
}

/// Add white CN(0, sigma2) noise to each sample. `sigma2 == 0.0` returns
/// the input unchanged (up to +0.0 addition, which is exact).
pub fn add_awgn(x: &[Cx], sigma2: f64, seed: &Seed) -> Result<Vec<Cx>> {
    if sigma2 < 0.0 || !sigma2.is_finite() {
        return Err(Error::NegativeVariance(sigma2));
    }
    let mut rng = seed.rng();
    Ok(x.iter()
        .map(|&v| v + complex_gaussian(&mut rng, sigma2))
        .collect())
}

/// Noise variance for a target SNR in dB: `sigma2 = es * 10^(-snr/10)`,
/// where `es` is the average received symbol energy per receive antenna
/// (1.0 for the single-antenna chain, 2.0 for the 2x2 scheme, whose two
/// unit-energy transmit streams superpose at each receive antenna).
pub fn snr_to_noise_variance(snr_db: f64, es: f64) -> f64 {
    es * 10f64.powf(-snr_db / 10.0)
}

/// Receiver channel knowledge: exact, or corrupted by additive complex
/// Gaussian estimation error of the given per-entry variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsiModel {
    Perfect,
    Noisy { error_variance: f64 },
}

impl CsiModel {
    pub fn error_variance(&self) -> f64 {
        match self {
            CsiModel::Perfect => 0.0,
            CsiModel::Noisy { error_variance } => *error_variance,
        }
    }
}

/// Corrupt a MIMO channel estimate: `H_hat = H + sqrt(v) * E` with `E`
/// entries iid CN(0, 1) drawn from `seed`. The error is drawn at unit
/// variance and scaled, so sweeping `v` with a fixed seed perturbs every
/// matrix along the same direction and `v = 0` reproduces `h` exactly.
pub fn corrupt_csi(h: &MimoFlatChannel, model: &CsiModel, seed: &Seed) -> Result<MimoFlatChannel> {
    let v = model.error_variance();
    if v < 0.0 || !v.is_finite() {
        return Err(Error::NegativeVariance(v));
    }
    let unit = draw_mimo_flat_channel(seed, h.len());
    h.add_scaled(&unit, v.sqrt())
}

/// Corrupt a per-subcarrier (or per-tap) channel vector the same way.
pub fn corrupt_csi_vector(h: &[Cx], model: &CsiModel, seed: &Seed) -> Result<Vec<Cx>> {
    let v = model.error_variance();
    if v < 0.0 || !v.is_finite() {
        return Err(Error::NegativeVariance(v));
    }
    let mut rng = seed.rng();
    let s = v.sqrt();
    Ok(h.iter()
        .map(|&hk| hk + complex_gaussian(&mut rng, 1.0) * s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::Lane;

    #[test]
    fn taps_are_deterministic_per_seed() {
        let seed = Seed::new(7).with_labels(1, 0, 3).lane(Lane::Channel);
        let a = draw_rayleigh_taps(&seed, 6);
        let b = draw_rayleigh_taps(&seed, 6);
        assert_eq!(a, b);
        let c = draw_rayleigh_taps(&Seed::new(7).with_labels(1, 0, 4).lane(Lane::Channel), 6);
        assert_ne!(a, c);
    }

    #[test]
    fn tap_energy_is_normalized_on_average() {
        let n = 10_000;
        let mut total = 0.0;
        let mut per_tap = [0.0f64; 6];
        for t in 0..n {
            let seed = Seed::new(11).with_labels(1, 0, t).lane(Lane::Channel);
            let taps = draw_rayleigh_taps(&seed, 6);
            total += taps.energy();
            for (acc, tap) in per_tap.iter_mut().zip(taps.taps()) {
                *acc += tap.norm_sqr();
            }
        }
        let mean = total / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean tap energy {mean}");
        for (l, acc) in per_tap.iter().enumerate() {
            let m = acc / n as f64;
            assert!((m - 1.0 / 6.0).abs() < 0.05 / 6.0, "tap {l} power {m}");
        }
    }

    #[test]
    fn tap_components_have_zero_mean() {
        let n = 10_000;
        let mut mean = Cx::new(0.0, 0.0);
        for t in 0..n {
            let seed = Seed::new(13).with_labels(1, 0, t).lane(Lane::Channel);
            mean += draw_rayleigh_taps(&seed, 4).taps()[0];
        }
        mean /= n as f64;
        // Component std is sqrt(1/8); the mean of n draws has std ~3.5e-3.
        assert!(mean.re.abs() < 0.012 && mean.im.abs() < 0.012, "mean {mean}");
    }

    #[test]
    fn mimo_entries_unit_variance_and_uncorrelated() {
        let n = 4000;
        let ch = draw_mimo_flat_channel(&Seed::new(17).lane(Lane::Channel), n);
        let mut pow = [0.0f64; 4];
        let mut cross = Cx::new(0.0, 0.0);
        let mut lag1 = Cx::new(0.0, 0.0);
        for (i, m) in ch.units().iter().enumerate() {
            pow[0] += m.h11.norm_sqr();
            pow[1] += m.h12.norm_sqr();
            pow[2] += m.h21.norm_sqr();
            pow[3] += m.h22.norm_sqr();
            cross += m.h11 * m.h12.conj();
            if i + 1 < n {
                lag1 += m.h11 * ch.unit(i + 1).h11.conj();
            }
        }
        for (k, p) in pow.iter().enumerate() {
            let m = p / n as f64;
            assert!((m - 1.0).abs() < 0.05, "entry {k} power {m}");
        }
        assert!((cross / n as f64).norm() < 0.05);
        assert!((lag1 / n as f64).norm() < 0.05);
    }

    #[test]
    fn fir_application_matches_direct_sum() {
        let taps = ChannelTaps::new(vec![Cx::new(0.5, 0.0), Cx::new(0.0, -0.5)]);
        let x = vec![Cx::new(1.0, 0.0), Cx::new(2.0, 0.0), Cx::new(3.0, 0.0)];
        let y = apply_fir_channel(&x, &taps);
        assert_eq!(y.len(), 3);
        assert!((y[0] - Cx::new(0.5, 0.0)).norm() < 1e-15);
        assert!((y[1] - Cx::new(1.0, -0.5)).norm() < 1e-15);
        assert!((y[2] - Cx::new(1.5, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn awgn_moments() {
        let n = 100_000;
        let x = vec![Cx::new(0.0, 0.0); n];
        let sigma2 = 0.25;
        let y = add_awgn(&x, sigma2, &Seed::new(19).lane(Lane::Noise)).unwrap();
        let mean = y.iter().sum::<Cx>() / n as f64;
        let var = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        // Mean of n CN(0, sigma2) draws: component std sqrt(sigma2/2n).
        let mean_tol = 3.0 * (sigma2 / 2.0 / n as f64).sqrt();
        assert!(mean.re.abs() < mean_tol && mean.im.abs() < mean_tol);
        assert!((var - sigma2).abs() < 0.05 * sigma2, "variance {var}");
    }

    #[test]
    fn awgn_is_white() {
        let n = 100_000;
        let x = vec![Cx::new(0.0, 0.0); n];
        let y = add_awgn(&x, 1.0, &Seed::new(23).lane(Lane::Noise)).unwrap();
        for lag in 1..=10 {
            let mut acc = Cx::new(0.0, 0.0);
            for i in 0..n - lag {
                acc += y[i] * y[i + lag].conj();
            }
            assert!((acc / (n - lag) as f64).norm() < 0.05, "lag {lag}");
        }
    }

    #[test]
    fn awgn_zero_variance_and_guards() {
        let x = vec![Cx::new(1.0, -2.0), Cx::new(0.25, 0.125)];
        let y = add_awgn(&x, 0.0, &Seed::new(29).lane(Lane::Noise)).unwrap();
        assert_eq!(x, y);
        assert!(add_awgn(&x, -1.0, &Seed::new(29)).is_err());
        assert!(add_awgn(&x, f64::NAN, &Seed::new(29)).is_err());
    }

    #[test]
    fn snr_conversion_examples() {
        assert!((snr_to_noise_variance(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((snr_to_noise_variance(10.0, 1.0) - 0.1).abs() < 1e-15);
        assert!((snr_to_noise_variance(3.0, 2.0) - 2.0 * 10f64.powf(-0.3)).abs() < 1e-15);
        assert_eq!(snr_to_noise_variance(f64::INFINITY, 2.0), 0.0);
    }

    #[test]
    fn csi_perfect_is_identity_and_zero_variance_matches() {
        let h = draw_mimo_flat_channel(&Seed::new(31).lane(Lane::Channel), 8);
        let seed = Seed::new(31).lane(Lane::CsiError);
        let p = corrupt_csi(&h, &CsiModel::Perfect, &seed).unwrap();
        assert_eq!(h, p);
        let z = corrupt_csi(&h, &CsiModel::Noisy { error_variance: 0.0 }, &seed).unwrap();
        assert_eq!(h, z);
    }

    #[test]
    fn csi_error_statistics() {
        let n = 4000;
        let h = draw_mimo_flat_channel(&Seed::new(37).lane(Lane::Channel), n);
        let v = 0.05;
        let seed = Seed::new(37).lane(Lane::CsiError);
        let hh = corrupt_csi(&h, &CsiModel::Noisy { error_variance: v }, &seed).unwrap();
        let mut err_pow = 0.0;
        let mut corr = Cx::new(0.0, 0.0);
        for (a, b) in h.units().iter().zip(hh.units()) {
            let e = b.add(&a.scale(-1.0));
            err_pow += e.frobenius_sqr();
            corr += e.h11 * a.h11.conj();
        }
        let mean_err = err_pow / (4 * n) as f64;
        assert!((mean_err - v).abs() < 0.05 * v, "error variance {mean_err}");
        // Error draws are independent of the channel draws.
        assert!((corr / n as f64).norm() < 0.05 * v.sqrt() * 3.0 + 0.01);
    }

    #[test]
    fn csi_sweep_scales_a_common_direction() {
        let h = draw_mimo_flat_channel(&Seed::new(41).lane(Lane::Channel), 4);
        let seed = Seed::new(41).lane(Lane::CsiError);
        let a = corrupt_csi(&h, &CsiModel::Noisy { error_variance: 0.25 }, &seed).unwrap();
        let b = corrupt_csi(&h, &CsiModel::Noisy { error_variance: 1.0 }, &seed).unwrap();
        for ((hu, au), bu) in h.units().iter().zip(a.units()).zip(b.units()) {
            let ea = au.add(&hu.scale(-1.0));
            let eb = bu.add(&hu.scale(-1.0));
            // Same unit draw scaled by sqrt(0.25) vs sqrt(1.0): factor 2.
            assert!((eb.h11 - ea.h11 * 2.0).norm() < 1e-12);
            assert!((eb.h22 - ea.h22 * 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn csi_vector_corruption() {
        let h = vec![Cx::new(1.0, 0.0); 64];
        let seed = Seed::new(43).lane(Lane::CsiError);
        let same = corrupt_csi_vector(&h, &CsiModel::Perfect, &seed).unwrap();
        assert_eq!(h, same);
        let noisy = corrupt_csi_vector(
            &h,
            &CsiModel::Noisy { error_variance: 0.1 },
            &seed,
        )
        .unwrap();
        assert_ne!(h, noisy);
        let mean_err = noisy
            .iter()
            .zip(&h)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / h.len() as f64;
        assert!(mean_err > 0.02 && mean_err < 0.3, "error power {mean_err}");
    }
}
