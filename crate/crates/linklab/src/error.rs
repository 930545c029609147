use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// FFT/IFFT input length is not a power of two (or is below 2).
    #[error("transform length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    /// Two sequences that must agree in length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// QPSK consumes bit pairs; an odd-length stream cannot be mapped.
    #[error("bit stream length {0} is odd; QPSK consumes bit pairs")]
    OddBitCount(usize),

    /// Space-frequency pairing consumes symbol pairs; an odd-length stream
    /// cannot be grouped.
    #[error("symbol stream length {0} is odd; codewords carry symbol pairs")]
    OddSymbolCount(usize),

    /// A convolution kernel is longer than the signal it is applied to.
    #[error("kernel of length {kernel} exceeds signal length {signal}")]
    KernelTooLong { kernel: usize, signal: usize },

    /// 2x2 matrix inversion failed the relative determinant test.
    #[error("matrix is singular to working precision")]
    SingularMatrix,

    /// Least-squares detection rejected a rank-deficient system.
    #[error("channel matrix is rank deficient (singular value ratio below guard)")]
    RankDeficient,

    /// Combining requires a nonzero channel estimate.
    #[error("channel estimate has zero Frobenius norm")]
    ZeroChannel,

    /// A variance parameter was negative.
    #[error("variance must be nonnegative, got {0}")]
    NegativeVariance(f64),

    /// Experiment or OFDM configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
