//! OFDM modulation and demodulation with cyclic prefix, plus one-tap
//! frequency-domain equalization.
//!
//! Every subcarrier carries data: no guard bands, no pilots. The cyclic
//! prefix copies the tail of each time-domain block in front of it, so a
//! channel shorter than `cp_len + 1` taps acts circularly on each block and
//! `Y[k] = H[k] * X[k]` holds per subcarrier.

use crate::numerics::{fft, ifft, Cx};
use crate::{Error, Result};

/// Block framing parameters for the OFDM chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfdmConfig {
    nfft: usize,
    cp_len: usize,
    n_blocks: usize,
}

impl OfdmConfig {
    /// Validates `nfft` is a power of two (>= 2), `0 <= cp_len < nfft`, and
    /// `n_blocks >= 1`.
    pub fn new(nfft: usize, cp_len: usize, n_blocks: usize) -> Result<Self> {
        if nfft < 2 || !nfft.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "nfft must be a power of two >= 2, got {nfft}"
            )));
        }
        if cp_len >= nfft {
            return Err(Error::InvalidConfig(format!(
                "cyclic prefix {cp_len} must be shorter than nfft {nfft}"
            )));
        }
        if n_blocks == 0 {
            return Err(Error::InvalidConfig("n_blocks must be >= 1".into()));
        }
        Ok(Self {
            nfft,
            cp_len,
            n_blocks,
        })
    }

    pub fn nfft(&self) -> usize {
        self.nfft
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    /// Data symbols carried by one frame.
    pub fn frame_symbols(&self) -> usize {
        self.nfft * self.n_blocks
    }

    /// Time-domain samples emitted for one frame.
    pub fn frame_samples(&self) -> usize {
        (self.nfft + self.cp_len) * self.n_blocks
    }

    /// The cyclic prefix absorbs a channel of `taps` coefficients only when
    /// `cp_len >= taps - 1`. Simulation assembly refuses configurations that
    /// would silently produce inter-symbol interference.
    pub fn supports_channel(&self, taps: usize) -> bool {
        taps >= 1 && self.cp_len >= taps - 1
    }
}

/// IFFT each `nfft` block of symbols and prepend its last `cp_len` time
/// samples; blocks are concatenated in order.
pub fn ofdm_modulate(symbols: &[Cx], cfg: &OfdmConfig) -> Result<Vec<Cx>> {
    if symbols.len() != cfg.frame_symbols() {
        return Err(Error::LengthMismatch {
            expected: cfg.frame_symbols(),
            got: symbols.len(),
        });
    }
    let mut out = Vec::with_capacity(cfg.frame_samples());
    for block in symbols.chunks_exact(cfg.nfft) {
        let time = ifft(block)?;
        out.extend_from_slice(&time[cfg.nfft - cfg.cp_len..]);
        out.extend_from_slice(&time);
    }
    Ok(out)
}

/// Drop each block's cyclic prefix and FFT the remainder; inverse of
/// [`ofdm_modulate`] over an identity channel.
pub fn ofdm_demodulate(samples: &[Cx], cfg: &OfdmConfig) -> Result<Vec<Cx>> {
    if samples.len() != cfg.frame_samples() {
        return Err(Error::LengthMismatch {
            expected: cfg.frame_samples(),
            got: samples.len(),
        });
    }
    let per_block = cfg.nfft + cfg.cp_len;
    let mut out = Vec::with_capacity(cfg.frame_symbols());
    for block in samples.chunks_exact(per_block) {
        out.extend(fft(&block[cfg.cp_len..])?);
    }
    Ok(out)
}

/// Non-unitary DFT of the zero-padded channel taps:
/// `H[k] = sum_l taps[l] * exp(-j 2 pi k l / nfft)`.
///
/// With the unitary transform pair used by this crate, this is exactly the
/// per-subcarrier gain, i.e. `Y[k] = H[k] * X[k]` after demodulation.
pub fn channel_frequency_response(taps: &[Cx], nfft: usize) -> Vec<Cx> {
    debug_assert!(taps.len() <= nfft);
    (0..nfft)
        .map(|k| {
            let mut acc = Cx::new(0.0, 0.0);
            for (l, &t) in taps.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * ((k * l) % nfft) as f64 / nfft as f64;
                acc += t * Cx::from_polar(1.0, phase);
            }
            acc
        })
        .collect()
}

/// Result of one-tap equalization. Subcarriers whose channel gain magnitude
/// is at or below the deep-fade guard (1e-12) are flagged with a zero
/// estimate instead of dividing toward infinity; the zero demaps to bits 00.
#[derive(Debug, Clone, PartialEq)]
pub struct OneTapEqualized {
    pub symbols: Vec<Cx>,
    pub deep_fades: usize,
}

const DEEP_FADE_GUARD: f64 = 1e-12;

/// Per-subcarrier division `X_hat[k] = Y[k] / H[k]` with deep-fade guard.
pub fn equalize_onetap(y: &[Cx], h: &[Cx]) -> Result<OneTapEqualized> {
    if y.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: h.len(),
            got: y.len(),
        });
    }
    let mut deep_fades = 0;
    let symbols = y
        .iter()
        .zip(h)
        .map(|(&yk, &hk)| {
            if hk.norm() <= DEEP_FADE_GUARD {
                deep_fades += 1;
                Cx::new(0.0, 0.0)
            } else {
                yk / hk
            }
        })
        .collect();
    Ok(OneTapEqualized {
        symbols,
        deep_fades,
    })
}
