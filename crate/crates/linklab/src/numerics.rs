//! Complex-valued numerics shared by every stage of the chain: a unitary
//! radix-2 FFT/IFFT pair, naive DFT and convolution oracles, and small
//! complex matrix algebra.
//!
//! Both transform directions carry a `1/sqrt(N)` scale, so `fft` preserves
//! the l2 norm (Parseval) and `ifft(fft(x)) == x` without any extra factor.

use num_complex::Complex64;

use crate::{Error, Result};

/// Baseband I/Q sample. Re-exported alias so downstream modules spell one name.
pub type Cx = Complex64;

/// `true` when `n` is a power of two no smaller than 2.
fn is_pow2(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

/// Unitary forward FFT (scale `1/sqrt(N)`).
///
/// The input length must be a power of two, at least 2.
pub fn fft(x: &[Cx]) -> Result<Vec<Cx>> {
    transform(x, false)
}

/// Unitary inverse FFT (scale `1/sqrt(N)`); exact inverse of [`fft`].
pub fn ifft(x: &[Cx]) -> Result<Vec<Cx>> {
    transform(x, true)
}

fn transform(x: &[Cx], inverse: bool) -> Result<Vec<Cx>> {
    let n = x.len();
    if !is_pow2(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut buf = x.to_vec();

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    // One twiddle table serves all stages; stage `len` strides it by `n/len`.
    let sign = if inverse { 1.0 } else { -1.0 };
    let table: Vec<Cx> = (0..n / 2)
        .map(|k| Cx::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let w = table[j * step];
                let a = buf[start + j];
                let b = buf[start + j + half] * w;
                buf[start + j] = a + b;
                buf[start + j + half] = a - b;
            }
        }
        len *= 2;
    }

    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}

/// Direct O(N^2) evaluation of the same unitary DFT, any length >= 1.
///
/// This is the independent oracle the radix-2 path is tested against; it is
/// kept deliberately literal. The twiddle argument is reduced mod N before
/// the trig call so the oracle stays accurate at large N.
pub fn naive_dft(x: &[Cx], inverse: bool) -> Vec<Cx> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            let mut acc = Cx::new(0.0, 0.0);
            for (m, &xm) in x.iter().enumerate() {
                let phase = sign * 2.0 * std::f64::consts::PI * ((k * m) % n) as f64 / n as f64;
                acc += xm * Cx::from_polar(1.0, phase);
            }
            acc * scale
        })
        .collect()
}

/// Circular convolution `y[n] = sum_l h[l] * x[(n - l) mod N]`.
///
/// `h` may be shorter than `x`; it is zero-padded internally. Rejects a
/// kernel longer than the signal.
pub fn circular_convolve(x: &[Cx], h: &[Cx]) -> Result<Vec<Cx>> {
    let n = x.len();
    if h.len() > n {
        return Err(Error::KernelTooLong {
            kernel: h.len(),
            signal: n,
        });
    }
    let mut y = vec![Cx::new(0.0, 0.0); n];
    for (l, &hl) in h.iter().enumerate() {
        for (idx, out) in y.iter_mut().enumerate() {
            *out += hl * x[(idx + n - l) % n];
        }
    }
    Ok(y)
}

/// Full linear convolution; output length `len(x) + len(h) - 1`.
pub fn linear_convolve(x: &[Cx], h: &[Cx]) -> Vec<Cx> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut y = vec![Cx::new(0.0, 0.0); x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        for (l, &hl) in h.iter().enumerate() {
            y[i + l] += xi * hl;
        }
    }
    y
}

/// Complex 2x2 matrix; row index is the receive antenna, column index the
/// transmit antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2x2 {
    pub h11: Cx,
    pub h12: Cx,
    pub h21: Cx,
    pub h22: Cx,
}

impl Matrix2x2 {
    pub fn new(h11: Cx, h12: Cx, h21: Cx, h22: Cx) -> Self {
        Self { h11, h12, h21, h22 }
    }

    pub fn identity() -> Self {
        Self::new(
            Cx::new(1.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0),
            Cx::new(1.0, 0.0),
        )
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix2x2) -> Matrix2x2 {
        Matrix2x2::new(
            self.h11 * rhs.h11 + self.h12 * rhs.h21,
            self.h11 * rhs.h12 + self.h12 * rhs.h22,
            self.h21 * rhs.h11 + self.h22 * rhs.h21,
            self.h21 * rhs.h12 + self.h22 * rhs.h22,
        )
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Matrix2x2 {
        Matrix2x2::new(
            self.h11.conj(),
            self.h21.conj(),
            self.h12.conj(),
            self.h22.conj(),
        )
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: [Cx; 2]) -> [Cx; 2] {
        [
            self.h11 * v[0] + self.h12 * v[1],
            self.h21 * v[0] + self.h22 * v[1],
        ]
    }

    pub fn det(&self) -> Cx {
        self.h11 * self.h22 - self.h12 * self.h21
    }

    /// Squared Frobenius norm (sum of squared entry magnitudes).
    pub fn frobenius_sqr(&self) -> f64 {
        self.h11.norm_sqr() + self.h12.norm_sqr() + self.h21.norm_sqr() + self.h22.norm_sqr()
    }

    /// Inverse, guarded by a relative determinant test:
    /// `|det| > 1e-12 * ||A||_F^2` must hold.
    pub fn inverse(&self) -> Result<Matrix2x2> {
        let det = self.det();
        if det.norm() <= 1e-12 * self.frobenius_sqr() {
            return Err(Error::SingularMatrix);
        }
        let inv = Cx::new(1.0, 0.0) / det;
        Ok(Matrix2x2::new(
            self.h22 * inv,
            -self.h12 * inv,
            -self.h21 * inv,
            self.h11 * inv,
        ))
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Matrix2x2) -> Matrix2x2 {
        Matrix2x2::new(
            self.h11 + rhs.h11,
            self.h12 + rhs.h12,
            self.h21 + rhs.h21,
            self.h22 + rhs.h22,
        )
    }

    /// Scale every entry by a real factor.
    pub fn scale(&self, s: f64) -> Matrix2x2 {
        Matrix2x2::new(self.h11 * s, self.h12 * s, self.h21 * s, self.h22 * s)
    }
}

/// Eigenvalues of a Hermitian 2x2 matrix, returned as `(min, max)`.
///
/// Only the Hermitian part is consulted (`h11`/`h22` real parts, `h12`
/// magnitude); callers pass Gram matrices `H^H H`, which are Hermitian PSD.
pub fn hermitian2_eigenvalues(g: &Matrix2x2) -> (f64, f64) {
    let a = g.h11.re;
    let d = g.h22.re;
    let off = g.h12.norm_sqr();
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * off).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// l2 norm of a complex vector.
pub fn l2_norm(x: &[Cx]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;

    fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Cx> {
        (0..n)
            .map(|_| cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    fn max_err(a: &[Cx], b: &[Cx]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn fft_of_delta_is_constant() {
        let x = vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)];
        let y = fft(&x).unwrap();
        for v in y {
            assert!((v - cx(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_of_constant_matches_naive_oracle() {
        let x = vec![cx(1.0, 0.0); 4];
        let y = fft(&x).unwrap();
        // Frozen from the naive O(N^2) DFT: all energy lands in bin 0.
        assert!((y[0] - cx(2.0, 0.0)).norm() < 1e-12);
        for v in &y[1..] {
            assert!(v.norm() < 1e-12);
        }
        assert!(max_err(&y, &naive_dft(&x, false)) < 1e-12);
    }

    #[test]
    fn fft_rejects_bad_sizes() {
        for n in [0usize, 1, 3, 6, 500] {
            let x = vec![cx(0.0, 0.0); n];
            assert_eq!(fft(&x), Err(Error::NotPowerOfTwo(n)));
            assert_eq!(ifft(&x), Err(Error::NotPowerOfTwo(n)));
        }
    }

    #[test]
    fn fft_is_unitary_at_512() {
        let mut rng = StdRng::seed_from_u64(7);
        let x = random_vec(&mut rng, 512);
        let y = fft(&x).unwrap();
        assert!((l2_norm(&y) - l2_norm(&x)).abs() < 1e-10);
    }

    #[test]
    fn ifft_inverts_fft() {
        let mut rng = StdRng::seed_from_u64(8);
        let x = random_vec(&mut rng, 512);
        let back = ifft(&fft(&x).unwrap()).unwrap();
        assert!(max_err(&back, &x) < 1e-10);
    }

    #[test]
    fn ifft_examples() {
        let y = ifft(&[cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)]).unwrap();
        for v in &y {
            assert!((v - cx(1.0, 0.0)).norm() < 1e-12);
        }
        // Delta -> constant 1/sqrt(N).
        let n = 8;
        let mut delta = vec![cx(0.0, 0.0); n];
        delta[0] = cx(1.0, 0.0);
        let t = ifft(&delta).unwrap();
        for v in t {
            assert!((v - cx(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_agrees_with_naive_dft_all_sizes() {
        let mut rng = StdRng::seed_from_u64(9);
        let mut n = 2;
        while n <= 512 {
            let x = random_vec(&mut rng, n);
            let err = max_err(&fft(&x).unwrap(), &naive_dft(&x, false));
            assert!(err < 1e-9, "N={n}: max err {err}");
            n *= 2;
        }
    }

    #[test]
    fn naive_dft_basics() {
        let x = vec![cx(0.3, -0.7)];
        assert_eq!(naive_dft(&x, false), x);

        let mut rng = StdRng::seed_from_u64(10);
        let x = random_vec(&mut rng, 13); // non-power-of-two on purpose
        let back = naive_dft(&naive_dft(&x, false), true);
        assert!(max_err(&back, &x) < 1e-10);
    }

    #[test]
    fn fft_linearity() {
        let mut rng = StdRng::seed_from_u64(11);
        let x = random_vec(&mut rng, 64);
        let y = random_vec(&mut rng, 64);
        let (a, b) = (cx(0.8, -1.3), cx(-0.2, 0.4));
        let lhs: Vec<Cx> = x.iter().zip(&y).map(|(&u, &v)| a * u + b * v).collect();
        let lhs = fft(&lhs).unwrap();
        let fx = fft(&x).unwrap();
        let fy = fft(&y).unwrap();
        let rhs: Vec<Cx> = fx.iter().zip(&fy).map(|(&u, &v)| a * u + b * v).collect();
        assert!(max_err(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn circular_convolve_identity_and_shift() {
        let x = vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0), cx(4.0, 0.0)];
        let y = circular_convolve(&x, &[cx(1.0, 0.0)]).unwrap();
        assert!(max_err(&y, &x) < 1e-15);

        let shifted = circular_convolve(&x, &[cx(0.0, 0.0), cx(1.0, 0.0)]).unwrap();
        let expect = vec![cx(4.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)];
        assert!(max_err(&shifted, &expect) < 1e-15);
    }

    #[test]
    fn circular_convolve_rejects_long_kernel() {
        let x = vec![cx(1.0, 0.0); 3];
        let h = vec![cx(1.0, 0.0); 4];
        assert!(matches!(
            circular_convolve(&x, &h),
            Err(Error::KernelTooLong { kernel: 4, signal: 3 })
        ));
    }

    #[test]
    fn circular_convolution_theorem() {
        let mut rng = StdRng::seed_from_u64(12);
        let n = 64;
        let x = random_vec(&mut rng, n);
        let h = random_vec(&mut rng, 6);
        let lhs = fft(&circular_convolve(&x, &h).unwrap()).unwrap();
        let mut hp = h.clone();
        hp.resize(n, cx(0.0, 0.0));
        let fx = fft(&x).unwrap();
        let fh = fft(&hp).unwrap();
        let scale = (n as f64).sqrt();
        let rhs: Vec<Cx> = fx.iter().zip(&fh).map(|(&a, &b)| a * b * scale).collect();
        assert!(max_err(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn linear_convolve_examples() {
        let x = vec![cx(1.0, 0.0), cx(1.0, 0.0)];
        let y = linear_convolve(&x, &x);
        let expect = vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(1.0, 0.0)];
        assert!(max_err(&y, &expect) < 1e-15);

        let z = linear_convolve(&x, &[cx(1.0, 0.0)]);
        assert!(max_err(&z, &x) < 1e-15);
        assert_eq!(linear_convolve(&[], &x), Vec::new());
    }

    #[test]
    fn linear_matches_circular_with_cyclic_prefix() {
        // With a prefix of length >= len(h)-1 prepended, the linear
        // convolution past the prefix equals the circular convolution of the
        // un-prefixed block. This is the property the cyclic prefix buys.
        let mut rng = StdRng::seed_from_u64(13);
        let n = 32;
        let cp = 5;
        let x = random_vec(&mut rng, n);
        let h = random_vec(&mut rng, 6);

        let mut with_cp = x[n - cp..].to_vec();
        with_cp.extend_from_slice(&x);
        let lin = linear_convolve(&with_cp, &h);
        let circ = circular_convolve(&x, &h).unwrap();
        assert!(max_err(&lin[cp..cp + n], &circ) < 1e-12);
    }

    #[test]
    fn mat2_identity_and_diagonal_inverse() {
        let m = Matrix2x2::new(cx(1.0, 2.0), cx(-0.5, 0.1), cx(0.3, 0.3), cx(2.0, -1.0));
        let i = Matrix2x2::identity();
        assert_eq!(i.mul(&m), m);

        let d = Matrix2x2::new(cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(4.0, 0.0));
        let inv = d.inverse().unwrap();
        assert!((inv.h11 - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((inv.h22 - cx(0.25, 0.0)).norm() < 1e-15);
        assert!(inv.h12.norm() < 1e-15 && inv.h21.norm() < 1e-15);
    }

    #[test]
    fn mat2_inverse_residual() {
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..100 {
            let m = Matrix2x2::new(
                cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            );
            let Ok(inv) = m.inverse() else { continue };
            let p = m.mul(&inv);
            let i = Matrix2x2::identity();
            let err = (p.h11 - i.h11).norm()
                + (p.h12 - i.h12).norm()
                + (p.h21 - i.h21).norm()
                + (p.h22 - i.h22).norm();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn mat2_singular_rejected() {
        let m = Matrix2x2::new(cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0), cx(4.0, 0.0));
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn hermitian_eigenvalues_of_gram_matrix() {
        // diag(3, 7) has eigenvalues 3 and 7.
        let g = Matrix2x2::new(cx(3.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(7.0, 0.0));
        let (lo, hi) = hermitian2_eigenvalues(&g);
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 7.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn hermitian_is_involution(re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let m = Matrix2x2::new(cx(re, im), cx(im, re), cx(re + 1.0, -im), cx(-re, 2.0 * im));
            prop_assert_eq!(m.hermitian().hermitian(), m);
        }

        #[test]
        fn hermitian_reverses_products(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let m = Matrix2x2::new(cx(a, b), cx(b, -a), cx(1.0, a), cx(b, 1.0));
            let n = Matrix2x2::new(cx(-b, a), cx(a, a), cx(0.5, -b), cx(a, -1.0));
            let lhs = m.mul(&n).hermitian();
            let rhs = n.hermitian().mul(&m.hermitian());
            for (x, y) in [
                (lhs.h11, rhs.h11),
                (lhs.h12, rhs.h12),
                (lhs.h21, rhs.h21),
                (lhs.h22, rhs.h22),
            ] {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn parseval_holds_for_random_inputs(seed in 0u64..64) {
            let mut rng = StdRng::seed_from_u64(seed);
            let n = 1usize << (1 + (seed % 8) as usize);
            let x = random_vec(&mut rng, n);
            let y = fft(&x).unwrap();
            prop_assert!((l2_norm(&y) - l2_norm(&x)).abs() < 1e-10);
        }
    }
}
