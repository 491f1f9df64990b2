//! Dithered modulo-lattice arithmetic on the scaled integer lattice `s Z^n`.
//!
//! The fundamental cell is the half-open cube `[-s/2, s/2)^n`, the nearest
//! point is found coordinate-wise with round-half-to-even, and a dither drawn
//! uniformly from the cell makes `(x + U) mod L` uniform and independent of `x`.

use rand::Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("dimension mismatch: lattice has dimension {expected}, vector has length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid lattice: {0}")]
    Invalid(String),
}

/// The lattice `scale * Z^dimension`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    dimension: usize,
    scale: f64,
}

impl Lattice {
    pub fn new(dimension: usize, scale: f64) -> Result<Self, LatticeError> {
        if dimension == 0 {
            return Err(LatticeError::Invalid("dimension must be >= 1".into()));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(LatticeError::Invalid(format!(
                "scale must be finite and > 0 (got {scale})"
            )));
        }
        Ok(Self { dimension, scale })
    }

    /// Lattice whose per-dimension second moment equals `p_prime`, i.e.
    /// `scale = sqrt(12 p_prime)`.
    pub fn scale_for_power(dimension: usize, p_prime: f64) -> Result<Self, LatticeError> {
        if !(p_prime.is_finite() && p_prime > 0.0) {
            return Err(LatticeError::Invalid(format!(
                "second moment must be finite and > 0 (got {p_prime})"
            )));
        }
        Self::new(dimension, (12.0 * p_prime).sqrt())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Per-dimension second moment of the fundamental cell, `scale^2 / 12`.
    pub fn second_moment(&self) -> f64 {
        self.scale * self.scale / 12.0
    }

    fn check(&self, x: &[f64]) -> Result<(), LatticeError> {
        if x.len() != self.dimension {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Nearest lattice coordinate for a scalar. Exposed so block-level code
    /// can work coordinate-wise without allocating.
    #[inline]
    pub fn quantize_scalar(&self, x: f64) -> f64 {
        let q = self.scale * (x / self.scale).round_ties_even();
        // Rounding of x/scale can push a value just below -s/2 into the cell
        // of the wrong neighbour; keep x - q inside [-s/2, s/2).
        let r = x - q;
        let half = 0.5 * self.scale;
        if r < -half {
            q - self.scale
        } else if r >= half {
            q + self.scale
        } else {
            q
        }
    }

    /// `x mod L` for a scalar, in `[-s/2, s/2)`.
    #[inline]
    pub fn mod_scalar(&self, x: f64) -> f64 {
        x - self.quantize_scalar(x)
    }

    pub fn quantize(&self, x: &[f64]) -> Result<Vec<f64>, LatticeError> {
        self.check(x)?;
        Ok(x.iter().map(|&v| self.quantize_scalar(v)).collect())
    }

    pub fn mod_lattice(&self, x: &[f64]) -> Result<Vec<f64>, LatticeError> {
        self.check(x)?;
        Ok(x.iter().map(|&v| self.mod_scalar(v)).collect())
    }

    /// Draws a dither uniform on the fundamental cell.
    pub fn sample_dither<R: Rng + ?Sized>(&self, rng: &mut R) -> Dither {
        let half = 0.5 * self.scale;
        Dither(
            (0..self.dimension)
                .map(|_| rng.gen_range(-half..half))
                .collect(),
        )
    }
}

/// A dither vector, uniform over the lattice's fundamental cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Dither(Vec<f64>);

impl Dither {
    pub fn zeros(dimension: usize) -> Self {
        Dither(vec![0.0; dimension])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for Dither {
    fn from(v: Vec<f64>) -> Self {
        Dither(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn quantize_examples() {
        let l = Lattice::new(2, 1.0).unwrap();
        assert_eq!(l.quantize(&[0.4, -0.6]).unwrap(), vec![0.0, -1.0]);
        assert_eq!(l.quantize(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let l = Lattice::new(1, 2.0).unwrap();
        // 1.0 / 2 = 0.5 rounds to even (0), but the cell is half-open so the
        // point s/2 belongs to the neighbour at 2.
        assert_eq!(l.quantize(&[1.0]).unwrap(), vec![2.0]);
        assert_eq!(l.quantize(&[-1.0]).unwrap(), vec![0.0]);
        assert_eq!(l.quantize(&[3.0]).unwrap(), vec![4.0]);
    }

    #[test]
    fn mod_examples() {
        let l = Lattice::new(1, 1.0).unwrap();
        let r = l.mod_lattice(&[0.7]).unwrap()[0];
        assert!((r + 0.3).abs() < 1e-15);
        assert_eq!(l.mod_lattice(&[0.25]).unwrap(), vec![0.25]);
        let r = l.mod_lattice(&[-1.5 - 1e-12]).unwrap()[0];
        assert!((r - (0.5 - 1e-12)).abs() < 1e-15, "{r}");
        assert!(r < 0.5);
        assert_eq!(l.mod_lattice(&[0.5]).unwrap(), vec![-0.5]);
        assert_eq!(l.mod_lattice(&[-0.5]).unwrap(), vec![-0.5]);
    }

    #[test]
    fn dimension_mismatch() {
        let l = Lattice::new(3, 1.0).unwrap();
        assert_eq!(
            l.quantize(&[1.0]),
            Err(LatticeError::DimensionMismatch {
                expected: 3,
                got: 1
            })
        );
        assert!(l.mod_lattice(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn scale_for_power_examples() {
        let l = Lattice::scale_for_power(1, 3.0).unwrap();
        assert_eq!(l.scale(), 6.0);
        assert_eq!(l.second_moment(), 3.0);
        let l = Lattice::scale_for_power(8, 1.0 / 12.0).unwrap();
        assert!((l.scale() - 1.0).abs() < 1e-15);
        assert!(Lattice::scale_for_power(1, 0.0).is_err());
        assert!(Lattice::scale_for_power(1, -1.0).is_err());
        assert!(Lattice::new(0, 1.0).is_err());
    }

    #[test]
    fn dither_range_and_reproducibility() {
        let l = Lattice::new(1000, 1.0).unwrap();
        let a = l.sample_dither(&mut ChaCha20Rng::seed_from_u64(3));
        let b = l.sample_dither(&mut ChaCha20Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.as_slice().iter().all(|&u| (-0.5..0.5).contains(&u)));

        let l = Lattice::new(1000, 0.1).unwrap();
        let d = l.sample_dither(&mut ChaCha20Rng::seed_from_u64(4));
        assert!(d.as_slice().iter().all(|&u| (-0.05..0.05).contains(&u)));
    }

    #[test]
    fn dither_second_moment() {
        let l = Lattice::new(1_000_000, 2.0).unwrap();
        let d = l.sample_dither(&mut ChaCha20Rng::seed_from_u64(11));
        let n = d.len() as f64;
        let mean = d.as_slice().iter().sum::<f64>() / n;
        let var = d.as_slice().iter().map(|u| (u - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let target = l.second_moment();
        assert!((var - target).abs() < 0.01 * target, "{var} vs {target}");
    }
}
