//! Bit sources, QPSK mapping, and bit-error counting.
//!
//! All randomness in the simulator flows through [`Seed`]: a 64-bit master
//! seed plus substream labels (experiment, SNR index, trial, lane). The
//! label tuple is absorbed into the master with the SplitMix64 finalizer and
//! the result keys a ChaCha8 stream cipher, so any two distinct label tuples
//! yield independent, reproducible streams. Nothing depends on thread
//! scheduling or call order.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::Cx;
use crate::{Error, Result};

/// Stream of hard bits, one byte per bit, each value 0 or 1.
pub type BitStream = Vec<u8>;

/// Purpose tag separating the random draws consumed by one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    Bits = 0,
    Channel = 1,
    Noise = 2,
    CsiError = 3,
}

/// Master seed plus substream labels. Identical `(master, labels)` always
/// produce the identical stream, independent of host or thread schedule.
///
/// The CSI grid index is deliberately not a label: a CSI sweep must consume
/// the same bit/channel/noise realizations at every error-variance entry so
/// the curves are paired (the error draw is scaled, not redrawn).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed {
    master: u64,
    experiment: u32,
    snr_index: u32,
    trial: u32,
    lane: u32,
}

/// SplitMix64 finalizer; the mixing primitive for label absorption.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

impl Seed {
    /// Root seed with all labels zero.
    pub fn new(master: u64) -> Self {
        Self {
            master,
            experiment: 0,
            snr_index: 0,
            trial: 0,
            lane: 0,
        }
    }

    /// Master value, as recorded in experiment output.
    pub fn master(&self) -> u64 {
        self.master
    }

    /// Substream for one (experiment, SNR point, trial) cell.
    pub fn with_labels(self, experiment: u32, snr_index: u32, trial: u32) -> Self {
        Self {
            experiment,
            snr_index,
            trial,
            ..self
        }
    }

    /// Substream for one purpose within a cell.
    pub fn lane(self, lane: Lane) -> Self {
        Self {
            lane: lane as u32,
            ..self
        }
    }

    /// The ChaCha8 generator keyed by this seed.
    ///
    /// Absorb-then-squeeze: each label is folded into the running state with
    /// the SplitMix64 finalizer, then four squeezed words form the 32-byte
    /// ChaCha key.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.master;
        for v in [
            self.experiment as u64,
            self.snr_index as u64,
            self.trial as u64,
            self.lane as u64,
        ] {
            state = mix(state.wrapping_add(GOLDEN) ^ v);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN);
            chunk.copy_from_slice(&mix(state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// Draw `n` equiprobable bits from the seed's substream.
///
/// Bits are peeled LSB-first from successive ChaCha8 64-bit words, so the
/// output depends only on the cipher stream, not on distribution adapters.
pub fn generate_bits(seed: &Seed, n: usize) -> BitStream {
    let mut rng = seed.rng();
    let mut bits = Vec::with_capacity(n);
    while bits.len() < n {
        let mut word = rand::RngCore::next_u64(&mut rng);
        for _ in 0..64 {
            if bits.len() == n {
                break;
            }
            bits.push((word & 1) as u8);
            word >>= 1;
        }
    }
    bits
}

/// Gray-coded QPSK: per pair `(b0, b1)`, symbol = `((1-2*b0) + j(1-2*b1)) / sqrt(2)`.
///
/// The first bit selects the in-phase sign, the second the quadrature sign;
/// every constellation point has unit energy.
pub fn qpsk_modulate(bits: &[u8]) -> Result<Vec<Cx>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    let a = std::f64::consts::FRAC_1_SQRT_2;
    Ok(bits
        .chunks_exact(2)
        .map(|pair| {
            Complex64::new(
                if pair[0] == 0 { a } else { -a },
                if pair[1] == 0 { a } else { -a },
            )
        })
        .collect())
}

/// Hard-decision QPSK demapper: `b0 = (Re < 0)`, `b1 = (Im < 0)`.
///
/// An exact zero on either axis resolves to bit 0 (positive half-plane).
pub fn qpsk_demodulate(symbols: &[Cx]) -> BitStream {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in symbols {
        bits.push(u8::from(s.re < 0.0));
        bits.push(u8::from(s.im < 0.0));
    }
    bits
}

/// Hamming distance between two equal-length bit streams.
pub fn count_bit_errors(a: &[u8], b: &[u8]) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count() as u64)
}
