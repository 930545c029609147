//! Alamouti space-frequency block coding for two transmit and two receive
//! antennas.
//!
//! A pair of symbols (x1, x2) occupies two adjacent subcarriers. On the
//! first subcarrier the antennas send (x1, x2); on the second they send
//! (-conj(x2), conj(x1)). The channel is assumed flat across the pair, so
//! each receive antenna sees two linear combinations of the pair through
//! the same 2x2 matrix. `h_ij` denotes the gain from transmit antenna j to
//! receive antenna i.
//!
//! Conjugating the second-subcarrier observations turns the four received
//! samples into a tall linear system `y = H_eff x + n` whose 4x2 effective
//! matrix has exactly orthogonal columns for every channel realization:
//! `H_eff^H H_eff = ||H||_F^2 I`. Matched-filter combining therefore
//! separates the pair perfectly in the noise-free case, and least-squares
//! detection on the stacked system coincides with classical Alamouti
//! combining.

use crate::numerics::{Cx, Matrix2x2};
use crate::{Error, Result};

/// One space-frequency codeword: the symbol pair it carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlamoutiBlock {
    pub x1: Cx,
    pub x2: Cx,
}

impl AlamoutiBlock {
    pub fn new(x1: Cx, x2: Cx) -> Self {
        Self { x1, x2 }
    }

    /// Antenna symbols (tx1, tx2) on the first subcarrier of the pair.
    pub fn slot_a(&self) -> [Cx; 2] {
        [self.x1, self.x2]
    }

    /// Antenna symbols (tx1, tx2) on the second subcarrier of the pair.
    pub fn slot_b(&self) -> [Cx; 2] {
        [-self.x2.conj(), self.x1.conj()]
    }

    /// Total transmit energy of the codeword across both antennas and both
    /// subcarriers: `2 (|x1|^2 + |x2|^2)`.
    pub fn energy(&self) -> f64 {
        2.0 * (self.x1.norm_sqr() + self.x2.norm_sqr())
    }
}

/// The four physical received samples for one codeword: receive antenna
/// 1 and 2, on the pair's first (a) and second (b) subcarrier. Stored
/// unconjugated, exactly as observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedBlock {
    pub y1a: Cx,
    pub y1b: Cx,
    pub y2a: Cx,
    pub y2b: Cx,
}

/// Pass one codeword through a flat 2x2 channel and add the given noise
/// samples, ordered (n1a, n1b, n2a, n2b) to match [`ReceivedBlock`].
pub fn alamouti_receive(block: &AlamoutiBlock, h: &Matrix2x2, noise: &[Cx; 4]) -> ReceivedBlock {
    let [a1, a2] = block.slot_a();
    let [b1, b2] = block.slot_b();
    ReceivedBlock {
        y1a: h.h11 * a1 + h.h12 * a2 + noise[0],
        y1b: h.h11 * b1 + h.h12 * b2 + noise[1],
        y2a: h.h21 * a1 + h.h22 * a2 + noise[2],
        y2b: h.h21 * b1 + h.h22 * b2 + noise[3],
    }
}

/// Classical Alamouti maximum-ratio combining with channel knowledge
/// `h_hat`, normalized by the squared Frobenius norm so a noise-free block
/// over `h_hat == h` returns (x1, x2) exactly.
pub fn alamouti_combine(rx: &ReceivedBlock, h_hat: &Matrix2x2) -> Result<(Cx, Cx)> {
    let g = h_hat.frobenius_sqr();
    if g == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let x1 = h_hat.h11.conj() * rx.y1a
        + h_hat.h12 * rx.y1b.conj()
        + h_hat.h21.conj() * rx.y2a
        + h_hat.h22 * rx.y2b.conj();
    let x2 = h_hat.h12.conj() * rx.y1a - h_hat.h11 * rx.y1b.conj()
        + h_hat.h22.conj() * rx.y2a
        - h_hat.h21 * rx.y2b.conj();
    Ok((x1 / g, x2 / g))
}

/// The stacked tall system equivalent to one received codeword:
/// `observation = rows * [x1, x2]^T + noise`, where the second and fourth
/// observations are the conjugated second-subcarrier samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel {
    pub rows: [[Cx; 2]; 4],
    pub observation: [Cx; 4],
}

/// Build the 4x2 effective system for one received codeword under channel
/// knowledge `h_hat`. Its columns are orthogonal with squared norm
/// `||h_hat||_F^2` for every `h_hat`, by construction of the code.
pub fn build_effective_channel(h_hat: &Matrix2x2, rx: &ReceivedBlock) -> EffectiveChannel {
    EffectiveChannel {
        rows: [
            [h_hat.h11, h_hat.h12],
            [h_hat.h12.conj(), -h_hat.h11.conj()],
            [h_hat.h21, h_hat.h22],
            [h_hat.h22.conj(), -h_hat.h21.conj()],
        ],
        observation: [rx.y1a, rx.y1b.conj(), rx.y2a, rx.y2b.conj()],
    }
}

/// Group an even-length symbol stream into codewords in order:
/// (s[0], s[1]), (s[2], s[3]), ...
pub fn sfbc_pair_map(symbols: &[Cx]) -> Result<Vec<AlamoutiBlock>> {
    if !symbols.len().is_multiple_of(2) {
        return Err(Error::OddSymbolCount(symbols.len()));
    }
    Ok(symbols
        .chunks_exact(2)
        .map(|p| AlamoutiBlock::new(p[0], p[1]))
        .collect())
}

/// Flatten codewords back into the symbol stream; inverse of
/// [`sfbc_pair_map`].
pub fn sfbc_pair_unmap(blocks: &[AlamoutiBlock]) -> Vec<Cx> {
    blocks.iter().flat_map(|b| [b.x1, b.x2]).collect()
}
