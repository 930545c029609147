//! Deterministic link-level simulator for SISO-OFDM and 2x2 MIMO-SFBC
//! wireless links.
//!
//! The crate is organized as a pipeline of small, pure modules:
//!
//! - [`numerics`] — complex FFT/IFFT, convolution oracles, 2x2 matrix algebra
//! - [`modem`] — seeded bit generation, QPSK mapping, bit-error counting
//! - [`ofdm`] — cyclic-prefix OFDM modulation and one-tap equalization
//! - [`channel`] — Rayleigh multipath / flat MIMO fading, AWGN, CSI corruption
//! - [`spacecode`] — Alamouti space-frequency block coding and combining
//! - [`detect`] — LS and MMSE linear detection on stacked linear systems
//! - [`harness`] — Monte Carlo BER experiments with Wilson confidence intervals
//!
//! Everything downstream of a [`modem::Seed`] is reproducible: the same seed
//! and configuration produce the same bits, channels, noise, and therefore the
//! same error counts, regardless of thread count.

pub mod channel;
pub mod detect;
pub mod harness;
pub mod modem;
pub mod numerics;
pub mod ofdm;
pub mod spacecode;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
