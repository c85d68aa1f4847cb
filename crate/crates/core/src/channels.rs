//! Linear maps on `M_d`, the `Φ_{α,β}` family and its named members.
//!
//! A [`SuperMap`] stores the `d² × d²` transfer matrix together with the (unnormalized)
//! Choi matrix `C = Σ_ij E_ij ⊗ Φ(E_ij)`, so a trace-preserving map has `Tr C = d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, basis_matrix, c, check_dim, frobenius, identity, kron, max_abs, min_eig, unvec, vec,
    ComplexMatrix, ONE, ZERO,
};

/// A point `(d, α, β)` of the family `Φ_{α,β} = (1-α-β) id + α τ₀ + β Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl MapParams {
    pub fn new(d: usize, alpha: f64, beta: f64) -> Result<Self> {
        check_dim(d)?;
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha });
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter { name: "beta", value: beta });
        }
        Ok(MapParams { d, alpha, beta })
    }

    /// Coefficient of the identity map, `1 - α - β`.
    pub fn identity_weight(&self) -> f64 {
        1.0 - self.alpha - self.beta
    }
}

/// A linear map on `d × d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMap {
    d: usize,
    transfer: ComplexMatrix,
    choi: ComplexMatrix,
}

/// Rearranges a transfer matrix into the Choi matrix.
fn transfer_to_choi(d: usize, t: &ComplexMatrix) -> ComplexMatrix {
    let n = d * d;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + k, j * d + l)] = t[(k + l * d, i + j * d)];
                }
            }
        }
    }
    out
}

fn choi_to_transfer(d: usize, ch: &ComplexMatrix) -> ComplexMatrix {
    let n = d * d;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[(k + l * d, i + j * d)] = ch[(i * d + k, j * d + l)];
                }
            }
        }
    }
    out
}

fn check_square(m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

impl SuperMap {
    pub fn from_transfer(d: usize, transfer: ComplexMatrix) -> Result<Self> {
        check_dim(d)?;
        check_square(&transfer, d * d)?;
        let choi = transfer_to_choi(d, &transfer);
        Ok(SuperMap { d, transfer, choi })
    }

    pub fn from_choi(d: usize, choi: ComplexMatrix) -> Result<Self> {
        check_dim(d)?;
        check_square(&choi, d * d)?;
        let transfer = choi_to_transfer(d, &choi);
        Ok(SuperMap { d, transfer, choi })
    }

    /// Builds the map by evaluating `f` on every matrix unit.
    pub fn from_fn(d: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        check_dim(d)?;
        let n = d * d;
        let mut t = ComplexMatrix::zeros(n, n);
        for j in 0..d {
            for i in 0..d {
                let image = vec(&f(&basis_matrix(d, i, j)));
                t.set_column(i + j * d, &image);
            }
        }
        SuperMap::from_transfer(d, t)
    }

    /// Transfer matrix of `X -> A X B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let d = a.nrows();
        check_square(a, d)?;
        check_square(b, d)?;
        SuperMap::from_transfer(d, kron(&b.transpose(), a))
    }

    pub fn identity(d: usize) -> Result<Self> {
        SuperMap::from_transfer(d, identity(d * d))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_square(x, self.d)?;
        unvec(&(&self.transfer * vec(x)), self.d)
    }

    /// `‖Tr_out C - I‖_max`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: num_complex::Complex64 = (0..d).map(|k| self.choi[(i * d + k, j * d + k)]).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// `‖T vec(I) - vec(I)‖_max`.
    pub fn unitality_defect(&self) -> f64 {
        let id = vec(&identity(self.d));
        (&self.transfer * &id - &id).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_defect() <= tol
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_defect() <= tol
    }

    /// Smallest eigenvalue of the Choi matrix.
    pub fn min_choi_eig(&self) -> Result<f64> {
        min_eig(&self.choi)
    }

    /// Largest entrywise difference of the transfer matrices.
    pub fn distance(&self, other: &SuperMap) -> f64 {
        if self.d != other.d {
            return f64::INFINITY;
        }
        max_abs(&(&self.transfer - &other.transfer))
    }
}

/// Serialized form: `{d, transfer: [[re, im], ...]}` with the transfer matrix row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperMapJson {
    pub d: usize,
    pub transfer: Vec<[f64; 2]>,
}

fn row_major_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn from_row_major_pairs(n: usize, pairs: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if pairs.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: format!("{} entries", n * n),
            found: format!("{} entries", pairs.len()),
        });
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, col| {
        let [re, im] = pairs[r * n + col];
        num_complex::Complex64::new(re, im)
    }))
}

impl From<&SuperMap> for SuperMapJson {
    fn from(m: &SuperMap) -> Self {
        SuperMapJson { d: m.d, transfer: row_major_pairs(&m.transfer) }
    }
}

impl TryFrom<SuperMapJson> for SuperMap {
    type Error = Error;

    fn try_from(j: SuperMapJson) -> Result<Self> {
        check_dim(j.d)?;
        let t = from_row_major_pairs(j.d * j.d, &j.transfer)?;
        SuperMap::from_transfer(j.d, t)
    }
}

impl Serialize for SuperMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SuperMapJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = SuperMapJson::deserialize(de)?;
        SuperMap::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// A density matrix. Construction only checks shape; call [`QuantumState::validate`]
/// to check Hermiticity, trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    d: usize,
    rho: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantumStateJson {
    pub d: usize,
    pub rho: Vec<[f64; 2]>,
}

impl QuantumState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        let d = rho.nrows();
        check_dim(d)?;
        check_square(&rho, d)?;
        Ok(QuantumState { d, rho })
    }

    pub fn pure(psi: &linalg::ComplexVector) -> Result<Self> {
        let n = psi.norm();
        let psi = psi / c(n);
        QuantumState::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        QuantumState::new(identity(d) / c(d as f64))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Hermitian, unit trace and `min_eig >= -tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = linalg::hermiticity_defect(&self.rho);
        if defect > tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = linalg::trace(&self.rho);
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let m = min_eig(&self.rho)?;
        if m < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {m:.3e}")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> QuantumStateJson {
        QuantumStateJson { d: self.d, rho: row_major_pairs(&self.rho) }
    }

    pub fn from_json(j: &QuantumStateJson) -> Result<Self> {
        check_dim(j.d)?;
        QuantumState::new(from_row_major_pairs(j.d, &j.rho)?)
    }
}

/// Diagonal pinching `Δ(X) = Σ_k E_kk X E_kk`.
pub fn dephase(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.nrows();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { x[(i, i)] } else { ZERO })
}

/// `τ₀(X) = I Tr X / d`.
pub fn depolarize(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.nrows();
    identity(d) * (linalg::trace(x) / c(d as f64))
}

fn transfer_dephasing(d: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        t[(k + k * d, k + k * d)] = ONE;
    }
    t
}

fn transfer_depolarizing(d: usize) -> ComplexMatrix {
    let id = vec(&identity(d));
    &id * id.transpose() / c(d as f64)
}

pub fn dephasing_map(d: usize) -> Result<SuperMap> {
    SuperMap::from_transfer(d, transfer_dephasing(d))
}

pub fn depolarizing_map(d: usize) -> Result<SuperMap> {
    SuperMap::from_transfer(d, transfer_depolarizing(d))
}

/// The transposition `X -> X^T` (positive and unital, not Schwarz).
pub fn transposition(d: usize) -> Result<SuperMap> {
    SuperMap::from_fn(d, |x| x.transpose())
}

pub fn build_phi_family(p: &MapParams) -> Result<SuperMap> {
    let d = p.d;
    check_dim(d)?;
    let t = identity(d * d) * c(p.identity_weight())
        + transfer_depolarizing(d) * c(p.alpha)
        + transfer_dephasing(d) * c(p.beta);
    SuperMap::from_transfer(d, t)
}

/// Distinguished members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedMap {
    /// `R(X) = (I Tr X - X)/(d-1)`.
    Reduction,
    /// `P(X) = (I Tr X + X - 2Δ(X))/(d-1)`.
    Pinch2,
    /// `Φ(X) = (dΔ(X) - X)/(d-1)`.
    PhiCp,
    E1,
    E2,
    E3,
    E4,
}

impl NamedMap {
    pub const ALL: [NamedMap; 7] = [
        NamedMap::Reduction,
        NamedMap::Pinch2,
        NamedMap::PhiCp,
        NamedMap::E1,
        NamedMap::E2,
        NamedMap::E3,
        NamedMap::E4,
    ];

    /// `(α, β)` coordinates of the map.
    pub fn coordinates(self, d: usize) -> (f64, f64) {
        let df = d as f64;
        let r = df / (df - 1.0);
        match self {
            NamedMap::Reduction => (r, 0.0),
            NamedMap::Pinch2 => (r, -2.0 / (df - 1.0)),
            NamedMap::PhiCp => (0.0, r),
            NamedMap::E1 => (0.0, 1.0),
            NamedMap::E2 => (r / 2.0, 0.5),
            NamedMap::E3 => (r, -1.0 / (df - 1.0)),
            NamedMap::E4 => (1.0, -1.0 / df),
        }
    }

    /// Evaluates the defining formula of the map directly.
    fn evaluate(self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = x.nrows();
        let df = d as f64;
        let inv = c(1.0 / (df - 1.0));
        let itr = identity(d) * linalg::trace(x);
        let delta = dephase(x);
        match self {
            NamedMap::Reduction => (itr - x) * inv,
            NamedMap::Pinch2 => (itr + x - delta * c(2.0)) * inv,
            NamedMap::PhiCp => (delta * c(df) - x) * inv,
            NamedMap::E1 => delta,
            NamedMap::E2 => (itr * inv + delta - x * inv) * c(0.5),
            NamedMap::E3 => (itr - delta) * inv,
            NamedMap::E4 => (x + itr - delta) / c(df),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedMap::Reduction => "reduction",
            NamedMap::Pinch2 => "pinch2",
            NamedMap::PhiCp => "phicp",
            NamedMap::E1 => "e1",
            NamedMap::E2 => "e2",
            NamedMap::E3 => "e3",
            NamedMap::E4 => "e4",
        }
    }
}

impl fmt::Display for NamedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reduction" | "r" => Ok(NamedMap::Reduction),
            "pinch2" | "p" => Ok(NamedMap::Pinch2),
            "phicp" | "phi" => Ok(NamedMap::PhiCp),
            "e1" => Ok(NamedMap::E1),
            "e2" => Ok(NamedMap::E2),
            "e3" => Ok(NamedMap::E3),
            "e4" => Ok(NamedMap::E4),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Builds a named map from its own formula and returns it with its family coordinates.
pub fn named_map(name: NamedMap, d: usize) -> Result<(SuperMap, MapParams)> {
    let (alpha, beta) = name.coordinates(d);
    let params = MapParams::new(d, alpha, beta)?;
    let map = SuperMap::from_fn(d, |x| name.evaluate(x))?;
    Ok((map, params))
}

pub fn named_map_by_str(name: &str, d: usize) -> Result<(SuperMap, MapParams)> {
    named_map(name.parse()?, d)
}

pub fn choi_of(m: &SuperMap) -> ComplexMatrix {
    m.choi.clone()
}

/// Hilbert-Schmidt adjoint: `(Φ‡(X), Y) = (X, Φ(Y))`.
pub fn hs_adjoint(m: &SuperMap) -> SuperMap {
    SuperMap::from_transfer(m.d, m.transfer.adjoint()).expect("dimension already checked")
}

/// Applies the map; no renormalization is performed.
pub fn apply(m: &SuperMap, s: &QuantumState) -> Result<QuantumState> {
    if m.d != s.d {
        return Err(Error::DimensionMismatch {
            expected: format!("d = {}", m.d),
            found: format!("d = {}", s.d),
        });
    }
    QuantumState::new(m.apply_matrix(&s.rho)?)
}

/// `first ∘ second`: apply `second`, then `first`.
pub fn compose(first: &SuperMap, second: &SuperMap) -> Result<SuperMap> {
    if first.d != second.d {
        return Err(Error::DimensionMismatch {
            expected: format!("d = {}", first.d),
            found: format!("d = {}", second.d),
        });
    }
    SuperMap::from_transfer(first.d, &first.transfer * &second.transfer)
}

/// Convex combination `Σ w_k Φ_k`.
pub fn mix(weights: &[f64], maps: &[SuperMap]) -> Result<SuperMap> {
    if weights.len() != maps.len() || maps.is_empty() {
        return Err(Error::BadWeights(format!(
            "{} weights for {} maps",
            weights.len(),
            maps.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadWeights(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let d = maps[0].d;
    let mut t = ComplexMatrix::zeros(d * d, d * d);
    for (w, m) in weights.iter().zip(maps) {
        if m.d != d {
            return Err(Error::DimensionMismatch {
                expected: format!("d = {d}"),
                found: format!("d = {}", m.d),
            });
        }
        t += &m.transfer * c(*w);
    }
    SuperMap::from_transfer(d, t)
}

/// Frobenius distance between Choi matrices, convenient for comparing maps.
pub fn choi_distance(a: &SuperMap, b: &SuperMap) -> f64 {
    frobenius(&(&a.choi - &b.choi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{maximally_entangled_projector, ComplexVector};
    use crate::sampling::{ginibre, rng};
    use num_complex::Complex64;

    fn mat(rows: &[&[f64]]) -> ComplexMatrix {
        let n = rows.len();
        ComplexMatrix::from_fn(n, n, |i, j| c(rows[i][j]))
    }

    #[test]
    fn dephase_examples() {
        assert_eq!(dephase(&identity(4)), identity(4));
        assert_eq!(dephase(&mat(&[&[1.0, 5.0], &[7.0, 2.0]])), mat(&[&[1.0, 0.0], &[0.0, 2.0]]));
        let mut r = rng(11);
        for _ in 0..100 {
            let x = ginibre(&mut r, 3);
            assert_eq!(dephase(&dephase(&x)), dephase(&x));
        }
    }

    #[test]
    fn family_corner_points() {
        for d in 2..=5 {
            let id = build_phi_family(&MapParams::new(d, 0.0, 0.0).unwrap()).unwrap();
            assert!(id.distance(&SuperMap::identity(d).unwrap()) < 1e-15);
            let tau = build_phi_family(&MapParams::new(d, 1.0, 0.0).unwrap()).unwrap();
            let x = ginibre(&mut rng(d as u64), d);
            let got = tau.apply_matrix(&x).unwrap();
            assert!(frobenius(&(got - depolarize(&x))) < 1e-13);
        }
    }

    #[test]
    fn e4_point_scales_off_diagonals_by_one_over_d() {
        let m = build_phi_family(&MapParams::new(3, 1.0, -1.0 / 3.0).unwrap()).unwrap();
        let out = m.apply_matrix(&basis_matrix(3, 0, 1)).unwrap();
        assert!(frobenius(&(out - basis_matrix(3, 0, 1) / c(3.0))) < 1e-15);
    }

    #[test]
    fn named_maps_match_family_coordinates() {
        for d in 2..=6 {
            for name in NamedMap::ALL {
                let (m, p) = named_map(name, d).unwrap();
                let fam = build_phi_family(&p).unwrap();
                assert!(m.distance(&fam) < 1e-12, "{name} d={d}");
            }
        }
        let (e1, _) = named_map(NamedMap::E1, 4).unwrap();
        assert!(e1.distance(&dephasing_map(4).unwrap()) < 1e-15);
        assert_eq!(NamedMap::E4.coordinates(5), (1.0, -0.2));
        assert!(matches!("bogus".parse::<NamedMap>(), Err(Error::UnknownName(_))));
    }

    #[test]
    fn reduction_on_basis_state() {
        let (r, _) = named_map(NamedMap::Reduction, 3).unwrap();
        let out = r.apply_matrix(&basis_matrix(3, 0, 0)).unwrap();
        let expected = crate::linalg::diag_real(&[0.0, 0.5, 0.5]);
        assert!(frobenius(&(out - expected)) < 1e-15);
    }

    #[test]
    fn choi_of_basic_maps() {
        for d in 2..=4 {
            let dd = d as f64;
            let id = SuperMap::identity(d).unwrap();
            let want = maximally_entangled_projector(d) * c(dd);
            assert!(frobenius(&(choi_of(&id) - want)) < 1e-14);

            let tau = depolarizing_map(d).unwrap();
            assert!(frobenius(&(choi_of(&tau) - identity(d * d) / c(dd))) < 1e-14);

            let delta = dephasing_map(d).unwrap();
            let mut dmat = ComplexMatrix::zeros(d * d, d * d);
            for k in 0..d {
                dmat += kron(&basis_matrix(d, k, k), &basis_matrix(d, k, k));
            }
            assert!(frobenius(&(choi_of(&delta) - dmat)) < 1e-15);
        }
    }

    #[test]
    fn choi_matches_definition_for_random_map() {
        let d = 3;
        let a = ginibre(&mut rng(5), d);
        let b = ginibre(&mut rng(6), d);
        let m = SuperMap::sandwich(&a, &b).unwrap();
        let mut direct = ComplexMatrix::zeros(9, 9);
        for i in 0..d {
            for j in 0..d {
                let e = basis_matrix(d, i, j);
                direct += kron(&e, &(&a * &e * &b));
            }
        }
        assert!(frobenius(&(choi_of(&m) - direct)) < 1e-12);
        let back = SuperMap::from_choi(d, choi_of(&m)).unwrap();
        assert!(back.distance(&m) < 1e-15);
    }

    #[test]
    fn adjoint_cases() {
        let id = SuperMap::identity(3).unwrap();
        assert!(hs_adjoint(&id).distance(&id) < 1e-15);
        for (alpha, beta) in [(0.3, -0.2), (1.4, 0.7), (-2.0, 3.0)] {
            let m = build_phi_family(&MapParams::new(4, alpha, beta).unwrap()).unwrap();
            assert!(hs_adjoint(&m).distance(&m) < 1e-15);
        }
        let a = ginibre(&mut rng(9), 3);
        let left = SuperMap::sandwich(&a, &identity(3)).unwrap();
        let expected = kron(&identity(3), &a).adjoint();
        assert!(max_abs(&(hs_adjoint(&left).transfer() - expected)) < 1e-15);
        // (Φ‡(X), Y) = (X, Φ(Y))
        let m = SuperMap::sandwich(&a, &ginibre(&mut rng(10), 3)).unwrap();
        let x = ginibre(&mut rng(12), 3);
        let y = ginibre(&mut rng(13), 3);
        let lhs = (hs_adjoint(&m).apply_matrix(&x).unwrap().adjoint() * &y).trace();
        let rhs = (x.adjoint() * m.apply_matrix(&y).unwrap()).trace();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn apply_compose_mix() {
        let d = 3;
        let tau = depolarizing_map(d).unwrap();
        let psi = ComplexVector::from_vec(vec![c(1.0), Complex64::new(0.0, 1.0), c(0.5)]);
        let out = apply(&tau, &QuantumState::pure(&psi).unwrap()).unwrap();
        assert!(frobenius(&(out.rho() - identity(d) / c(3.0))) < 1e-15);

        let delta = dephasing_map(d).unwrap();
        assert!(compose(&delta, &delta).unwrap().distance(&delta) < 1e-15);

        let id = SuperMap::identity(d).unwrap();
        let m = mix(&[0.5, 0.5], &[id.clone(), delta.clone()]).unwrap();
        let fam = build_phi_family(&MapParams::new(d, 0.0, 0.5).unwrap()).unwrap();
        assert!(m.distance(&fam) < 1e-15);

        assert!(matches!(mix(&[0.7, 0.7], &[id.clone(), delta.clone()]), Err(Error::BadWeights(_))));
        assert!(matches!(mix(&[1.5, -0.5], &[id.clone(), delta]), Err(Error::BadWeights(_))));
        let other = SuperMap::identity(2).unwrap();
        assert!(matches!(compose(&id, &other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn flags_for_family() {
        for d in 2..=6 {
            for (alpha, beta) in [(0.2, 0.1), (-1.0, 2.5), (1.3, -0.9)] {
                let m = build_phi_family(&MapParams::new(d, alpha, beta).unwrap()).unwrap();
                assert!(m.is_trace_preserving(1e-10));
                assert!(m.is_unital(1e-10));
            }
        }
        let a = crate::linalg::diag_real(&[1.0, 2.0]);
        let m = SuperMap::sandwich(&a, &a).unwrap();
        assert!(!m.is_trace_preserving(1e-10));
        assert!(!m.is_unital(1e-10));
    }

    #[test]
    fn state_validation_accepts_pure_and_rejects_bad() {
        let psi = ComplexVector::from_vec(vec![c(1.0), c(1.0)]);
        QuantumState::pure(&psi).unwrap().validate(1e-10).unwrap();
        let bad = QuantumState::new(crate::linalg::diag_real(&[1.5, -0.5])).unwrap();
        assert!(bad.validate(1e-10).is_err());
    }

    #[test]
    fn json_shape() {
        let m = dephasing_map(2).unwrap();
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["transfer"].as_array().unwrap().len(), 16);
        assert_eq!(v["transfer"][0], serde_json::json!([1.0, 0.0]));
        let back: SuperMap = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let s = QuantumState::maximally_mixed(2).unwrap();
        let js = serde_json::to_string(&s.to_json()).unwrap();
        let parsed: QuantumStateJson = serde_json::from_str(&js).unwrap();
        assert_eq!(QuantumState::from_json(&parsed).unwrap(), s);
    }
}
