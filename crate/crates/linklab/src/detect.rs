//! Linear detection for two-column tall systems.
//!
//! Both detectors work on the normal equations of `y = H x + n` with
//! `x` of dimension two (the symbol pair of one space-frequency codeword):
//!
//! * least squares: `x_hat = (H^H H)^-1 H^H y`
//! * linear MMSE:   `x_hat = (H^H H + sigma2 I)^-1 H^H y`
//!
//! For the effective Alamouti system the Gram matrix is `||H||_F^2 I`, so
//! both reduce to scaled matched filtering and return identical hard
//! decisions; they differ only when column orthogonality is broken.

use crate::numerics::{hermitian2_eigenvalues, Cx, Matrix2x2};
use crate::spacecode::{build_effective_channel, EffectiveChannel, ReceivedBlock};
use crate::{Error, Result};

/// Relative singular-value floor for least squares: the system is treated
/// as rank deficient when `sigma_min <= 1e-10 * sigma_max`.
const SV_RATIO_GUARD: f64 = 1e-10;

/// Which linear detector to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Ls,
    Mmse,
}

/// A tall linear system with two unknowns: any number of rows `>= 2`, each
/// pairing one observation with its two channel coefficients, plus the
/// noise variance seen by every observation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    rows: Vec<[Cx; 2]>,
    y: Vec<Cx>,
    sigma2: f64,
}

impl LinearSystem {
    pub fn new(rows: Vec<[Cx; 2]>, y: Vec<Cx>, sigma2: f64) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                got: y.len(),
            });
        }
        if rows.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "a two-unknown system needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        if sigma2 < 0.0 || !sigma2.is_finite() {
            return Err(Error::NegativeVariance(sigma2));
        }
        Ok(Self { rows, y, sigma2 })
    }

    pub fn from_effective(eff: &EffectiveChannel, sigma2: f64) -> Result<Self> {
        Self::new(eff.rows.to_vec(), eff.observation.to_vec(), sigma2)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Gram matrix `H^H H` (2x2 Hermitian, positive semidefinite).
    fn gram(&self) -> Matrix2x2 {
        let mut g11 = 0.0;
        let mut g22 = 0.0;
        let mut g12 = Cx::new(0.0, 0.0);
        for row in &self.rows {
            g11 += row[0].norm_sqr();
            g22 += row[1].norm_sqr();
            g12 += row[0].conj() * row[1];
        }
        Matrix2x2::new(Cx::new(g11, 0.0), g12, g12.conj(), Cx::new(g22, 0.0))
    }

    /// Matched-filter output `H^H y`.
    fn matched(&self) -> [Cx; 2] {
        let mut b1 = Cx::new(0.0, 0.0);
        let mut b2 = Cx::new(0.0, 0.0);
        for (row, &yk) in self.rows.iter().zip(&self.y) {
            b1 += row[0].conj() * yk;
            b2 += row[1].conj() * yk;
        }
        [b1, b2]
    }
}

/// Least-squares (zero-forcing) detection. Rejects systems whose singular
/// value ratio falls below the guard instead of amplifying one direction
/// of the observation by ~1e10 or more.
pub fn ls_detect(sys: &LinearSystem) -> Result<[Cx; 2]> {
    let g = sys.gram();
    let (lo, hi) = hermitian2_eigenvalues(&g);
    // Eigenvalues of H^H H are squared singular values of H.
    if hi <= 0.0 || lo <= SV_RATIO_GUARD * SV_RATIO_GUARD * hi {
        return Err(Error::RankDeficient);
    }
    solve(&g, sys.matched())
}

/// Linear MMSE detection; `sigma2 > 0` regularizes the normal equations,
/// and `sigma2 == 0` coincides with least squares.
pub fn mmse_detect(sys: &LinearSystem) -> Result<[Cx; 2]> {
    if sys.sigma2 == 0.0 {
        return ls_detect(sys);
    }
    let g = sys.gram();
    let a = g.add(&Matrix2x2::identity().scale(sys.sigma2));
    solve(&a, sys.matched())
}

fn solve(a: &Matrix2x2, b: [Cx; 2]) -> Result<[Cx; 2]> {
    let inv = a.inverse().map_err(|_| Error::RankDeficient)?;
    Ok(inv.mul_vec(b))
}

/// Detect one Alamouti codeword from its received samples under channel
/// knowledge `h_hat`: stack the effective system and apply the detector.
pub fn detect_alamouti(
    rx: &ReceivedBlock,
    h_hat: &Matrix2x2,
    sigma2: f64,
    kind: DetectorKind,
) -> Result<(Cx, Cx)> {
    let eff = build_effective_channel(h_hat, rx);
    let sys = LinearSystem::from_effective(&eff, sigma2)?;
    let est = match kind {
        DetectorKind::Ls => ls_detect(&sys)?,
        DetectorKind::Mmse => mmse_detect(&sys)?,
    };
    Ok((est[0], est[1]))
}
