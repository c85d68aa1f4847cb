//! Dense complex linear algebra on `nalgebra` matrices.
//!
//! Vectorization is column-stacking everywhere in this crate: `vec(A)[i + j*d] = A[i][j]`,
//! so the transfer matrix of `X -> A X B` is `B^T ⊗ A`. Bipartite `d² × d²` matrices use
//! the row index `a*d + b` for `|a⟩ ⊗ |b⟩`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Largest supported qudit dimension.
pub const MAX_DIM: usize = 16;

/// Default PSD tolerance, scaled by `max(1, ‖A‖_F)` in [`psd_tolerance`].
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Relative tolerance used when deciding whether a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn check_dim(d: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Matrix unit `E_ij = |i⟩⟨j|` (0-indexed).
pub fn basis_matrix(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { ZERO })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max_ij |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &ComplexMatrix) -> bool {
    hermiticity_defect(a) <= HERMITIAN_TOL * (1.0 + frobenius(a))
}

fn require_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    let defect = hermiticity_defect(a);
    if defect > HERMITIAN_TOL * (1.0 + frobenius(a)) {
        return Err(Error::NonHermitianInput { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the normalized eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    require_hermitian(a)?;
    let sym = (a + a.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let sym = (a + a.adjoint()) * c(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eig(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(a)?[0])
}

/// `min_eig(a) >= -tol`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_eig(a)? >= -tol)
}

/// The default absolute PSD tolerance for `a`.
pub fn psd_tolerance(a: &ComplexMatrix) -> f64 {
    DEFAULT_PSD_TOL * frobenius(a).max(1.0)
}

/// Eigenvalues of a general square matrix via complex Schur form.
pub fn eigvals_general(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if let Some(schur) = a.clone().try_schur(SCHUR_EPS, SCHUR_MAX_ITER) {
        return Ok(schur.unpack().1.diagonal().iter().copied().collect());
    }
    // shifted QR can stall on exactly structured input; a fixed unitary
    // similarity breaks the structure and leaves the spectrum unchanged
    let n = a.nrows();
    let q = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(1.0, 0.7 * (i * j) as f64 + 0.3 * (i + 2 * j) as f64)
    })
    .qr()
    .q();
    let rotated = q.adjoint() * a * &q;
    rotated
        .try_schur(SCHUR_EPS, 100 * SCHUR_MAX_ITER)
        .map(|s| s.unpack().1.diagonal().iter().copied().collect())
        .ok_or(Error::NoConvergence("complex Schur"))
}

const SCHUR_MAX_ITER: usize = 10_000;
const SCHUR_EPS: f64 = 1e-14;

/// Which tensor factor of a `d² × d²` operator to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

pub fn partial_transpose(m: &ComplexMatrix, d: usize, subsystem: Subsystem) -> Result<ComplexMatrix> {
    let n = d * d;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            for c_ in 0..d {
                for e in 0..d {
                    let (r, col) = match subsystem {
                        Subsystem::Second => (a * d + e, c_ * d + b),
                        Subsystem::First => (c_ * d + b, a * d + e),
                    };
                    out[(a * d + b, c_ * d + e)] = m[(r, col)];
                }
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vec(a: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &ComplexVector, d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: format!("vector of length {}", d * d),
            found: format!("length {}", v.len()),
        });
    }
    Ok(ComplexMatrix::from_column_slice(d, d, v.as_slice()))
}

/// `|Ω⟩ = Σ_i |ii⟩ / √d`.
pub fn maximally_entangled_vector(d: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    let amp = c(1.0 / (d as f64).sqrt());
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

/// `P⁺ = |Ω⟩⟨Ω|`.
pub fn maximally_entangled_projector(d: usize) -> ComplexMatrix {
    let v = maximally_entangled_vector(d);
    &v * v.adjoint()
}

fn one_norm(a: &ComplexMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a fixed [13/13] Padé approximant.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = a * c(0.5f64.powi(squarings as i32));
    let b = |k: usize| c(PADE13[k]);
    let id = identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);

    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&v + &u))
        .expect("Padé denominator is singular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Solve `A X = B`; `None` if `A` is singular.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<ComplexMatrix> {
    a.clone().lu().solve(b)
}

/// Ratio of largest to smallest singular value.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn z2() -> ComplexMatrix {
        diag_real(&[1.0, -1.0])
    }

    #[test]
    fn kron_identity_and_units() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        // E_11 ⊗ E_22 (1-indexed) has its single 1 at (1, 1)
        let k = kron(&basis_matrix(2, 0, 0), &basis_matrix(2, 1, 1));
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(1, 1)] = ONE;
        assert_eq!(k, expected);
        assert_eq!(kron(&z2(), &z2()), diag_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn eig_small_cases() {
        let e = eig_hermitian(&diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let x = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let v = eigvals_hermitian(&x).unwrap();
        assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_of_dissipativity_witness_block() {
        // d = 3, a = 1.8, c = d / (d + 2 - 2a)
        let (d, a) = (3.0, 1.8);
        let cc = d / (d + 2.0 - 2.0 * a);
        let diag = d + 2.0 + (d + 2.0 - 2.0 * a) * cc * cc;
        let off = -2.0 * d * cc;
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(diag), c(off), c(off), c(diag)]);
        let expected = d + 2.0 - d * d / (d + 2.0 - 2.0 * a);
        assert_abs_diff_eq!(min_eig(&m).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, -1.428571428571, epsilon = 1e-11);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonHermitianInput { .. })));
        assert!(matches!(min_eig(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&identity(3), 1e-10).unwrap());
        assert!(!is_psd(&diag_real(&[1.0, -1e-3]), 1e-10).unwrap());
    }

    #[test]
    fn partial_transpose_cases() {
        let id4 = identity(4);
        assert_eq!(partial_transpose(&id4, 2, Subsystem::Second).unwrap(), id4);

        let pt = partial_transpose(&(maximally_entangled_projector(2) * c(2.0)), 2, Subsystem::Second)
            .unwrap();
        let mut swap = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                swap[(a * 2 + b, b * 2 + a)] = ONE;
            }
        }
        assert!(frobenius(&(&pt - &swap)) < 1e-14);
        let ev = eigvals_hermitian(&pt).unwrap();
        for (got, want) in ev.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let d = 3;
        let mut dd = ComplexMatrix::zeros(9, 9);
        for k in 0..d {
            dd += kron(&basis_matrix(d, k, k), &basis_matrix(d, k, k));
        }
        assert_eq!(partial_transpose(&dd, d, Subsystem::First).unwrap(), dd);
        assert_eq!(partial_transpose(&dd, d, Subsystem::Second).unwrap(), dd);

        assert!(partial_transpose(&identity(5), 2, Subsystem::First).is_err());
    }

    #[test]
    fn vec_convention_and_projector() {
        // E_12 (1-indexed) = E(0,1): column 2, row 1 -> slot 0 + 1*2 = 2
        let v = vec(&basis_matrix(2, 0, 1));
        for (k, z) in v.iter().enumerate() {
            assert_eq!(*z, if k == 2 { ONE } else { ZERO });
        }
        assert_abs_diff_eq!(trace(&maximally_entangled_projector(3)).re, 1.0, epsilon = 1e-15);
        let p = maximally_entangled_projector(2);
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(p[(r, col)].re, 0.5, epsilon = 1e-15);
        }
        assert_eq!(p.iter().filter(|z| z.norm() > 0.0).count(), 4);
        assert!(unvec(&v, 3).is_err());
    }

    #[test]
    fn transfer_of_sandwich_is_bt_kron_a() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64, 1.0 + i as f64));
        let x = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(j as f64, -(i as f64)));
        let lhs = vec(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn expm_matches_diagonal_and_rotation() {
        let d = diag_real(&[0.3, -2.0, 10.0]);
        let e = expm(&d);
        for (k, x) in [0.3f64, -2.0, 10.0].iter().enumerate() {
            assert!((e[(k, k)].re - x.exp()).abs() <= 1e-12 * x.exp());
        }
        // exp(-i θ σ_y) is a real rotation
        let theta = 0.7;
        let sy = ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let r = expm(&(sy * Complex64::new(0.0, -theta)));
        let expected = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(theta.cos()), c(-theta.sin()), c(theta.sin()), c(theta.cos())],
        );
        assert!(frobenius(&(r - expected)) < 1e-13);
    }

    #[test]
    fn expm_of_large_norm_nilpotent() {
        let mut n = ComplexMatrix::zeros(2, 2);
        n[(0, 1)] = c(100.0);
        let e = expm(&n);
        assert_abs_diff_eq!(e[(0, 1)].re, 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn general_eigenvalues_of_triangular() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(5.0), ZERO, Complex64::new(-2.0, 1.0)]);
        let mut ev = eigvals_general(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - Complex64::new(-2.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(1.0)).norm() < 1e-12);
    }
}
