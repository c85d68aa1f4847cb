//! Seeded random draws used by the numerical oracles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{frobenius, ComplexMatrix, ComplexVector};

pub type OracleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> OracleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes extra integers into a seed so that independent work items get distinct streams.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    // splitmix64 finalizer over each part
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng))
}

/// Ginibre draw projected onto traceless matrices and normalized in Frobenius norm.
pub fn traceless_unit<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut x = ginibre(rng, d);
    let shift = x.trace() / Complex64::new(d as f64, 0.0);
    for k in 0..d {
        x[(k, k)] -= shift;
    }
    let n = frobenius(&x);
    x / Complex64::new(n, 0.0)
}

/// Haar-random unit vector.
pub fn unit_vector<R: Rng>(rng: &mut R, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian_complex(rng));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Random orthonormal pair `(x, y)` by Gram-Schmidt on two Gaussian vectors.
pub fn orthonormal_pair<R: Rng>(rng: &mut R, d: usize) -> (ComplexVector, ComplexVector) {
    let x = unit_vector(rng, d);
    loop {
        let g = ComplexVector::from_fn(d, |_, _| gaussian_complex(rng));
        let y = &g - &x * x.dotc(&g);
        let n = y.norm();
        if n > 1e-8 {
            return (x, y / Complex64::new(n, 0.0));
        }
    }
}

/// Random orthonormal pair supported on two randomly chosen coordinates.
pub fn two_level_pair<R: Rng>(rng: &mut R, d: usize) -> (ComplexVector, ComplexVector) {
    let i = rng.random_range(0..d);
    let mut j = rng.random_range(0..d - 1);
    if j >= i {
        j += 1;
    }
    let (x2, y2) = orthonormal_pair(rng, 2);
    let mut x = ComplexVector::zeros(d);
    let mut y = ComplexVector::zeros(d);
    x[i] = x2[0];
    x[j] = x2[1];
    y[i] = y2[0];
    y[j] = y2[1];
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_orthonormal() {
        let mut r = rng(7);
        for d in 2..6 {
            for _ in 0..20 {
                for (x, y) in [orthonormal_pair(&mut r, d), two_level_pair(&mut r, d)] {
                    assert!((x.norm() - 1.0).abs() < 1e-12);
                    assert!((y.norm() - 1.0).abs() < 1e-12);
                    assert!(x.dotc(&y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn traceless_unit_is_traceless_and_normalized() {
        let mut r = rng(1);
        let x = traceless_unit(&mut r, 4);
        assert!(x.trace().norm() < 1e-12);
        assert!((frobenius(&x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_stream() {
        let a = ginibre(&mut rng(3), 3);
        let b = ginibre(&mut rng(3), 3);
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
    }
}
