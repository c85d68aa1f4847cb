//! The qudit generator
//!
//! `L(ρ) = -i[H,ρ] + κ[(Σ_{i≠j} E_ij ρ E_ji - (d-1)ρ) + (ν/d)(Σ_{k=1}^{d-1} Z^k ρ Z^{*k} - (d-1)ρ)]`
//!
//! with diagonal `H = Σ h_k E_kk` and `Z = Σ_ℓ e^{2πiℓ/d} E_ℓℓ`, together with its relaxation
//! rates and three generator-level tests:
//!
//! | test                              | semigroup is        | closed form        |
//! |-----------------------------------|---------------------|--------------------|
//! | conditional positivity            | positive            | `ν ≥ -1`           |
//! | dissipativity (of the adjoint)    | Schwarz             | `ν ≥ -d/(d+2)`     |
//! | conditional complete positivity   | completely positive | `ν ≥ 0`            |
//!
//! Each closed form is paired with a numerical oracle that only sees the generator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{build_phi_family, compose, dephase, MapParams, SuperMap};
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, check_dim, eig_hermitian, eigvals_general, eigvals_hermitian, expm, frobenius,
    identity, kron, maximally_entangled_projector, vec, ComplexMatrix, ComplexVector, I,
};
use crate::numerics::bisect_predicate;
use crate::sampling::{self, orthonormal_pair, traceless_unit, two_level_pair};

/// Tolerance for the sign of a sampled or projected eigenvalue.
pub const ORACLE_TOL: f64 = 1e-9;

/// Generator data `(d, κ, ν, h_1..h_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub d: usize,
    pub kappa: f64,
    pub nu: f64,
    pub h: Vec<f64>,
}

impl GenParams {
    /// Generator with `H = 0`.
    pub fn new(d: usize, kappa: f64, nu: f64) -> Result<Self> {
        check_dim(d)?;
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter { name: "kappa", value: kappa });
        }
        if !nu.is_finite() {
            return Err(Error::InvalidParameter { name: "nu", value: nu });
        }
        Ok(GenParams { d, kappa, nu, h: vec![0.0; d] })
    }

    pub fn with_energies(mut self, h: Vec<f64>) -> Result<Self> {
        if h.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: format!("{} energies", self.d),
                found: format!("{} energies", h.len()),
            });
        }
        if let Some(&bad) = h.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter { name: "h", value: bad });
        }
        self.h = h;
        Ok(self)
    }

    /// `a = 1 - ν`.
    pub fn a(&self) -> f64 {
        1.0 - self.nu
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        linalg::diag_real(&self.h)
    }
}

/// `Z = Σ_{ℓ=1}^{d} e^{2πiℓ/d} E_ℓℓ`.
pub fn clock_matrix(d: usize) -> ComplexMatrix {
    let df = d as f64;
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * PI * (i + 1) as f64 / df)
        } else {
            linalg::ZERO
        }
    })
}

/// Transfer matrix of `ρ -> Σ_{i≠j} E_ij ρ E_ji - (d-1)ρ`.
fn transfer_population_part(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut t = identity(n) * c(-(d as f64 - 1.0));
    for i in 0..d {
        for j in 0..d {
            if i != j {
                // E_ij ρ E_ji has transfer E_ji^T ⊗ E_ij = E_ij ⊗ E_ij
                t[(i + i * d, j + j * d)] += linalg::ONE;
            }
        }
    }
    t
}

/// Transfer matrix of `ρ -> (1/d)(Σ_{k=1}^{d-1} Z^k ρ Z^{*k} - (d-1)ρ)`.
fn transfer_phase_part(d: usize) -> ComplexMatrix {
    let n = d * d;
    let z = clock_matrix(d);
    let mut t = identity(n) * c(-(d as f64 - 1.0));
    let mut zk = identity(d);
    for _ in 1..d {
        zk = &zk * &z;
        t += kron(&zk.map(|v| v.conj()), &zk);
    }
    t / c(d as f64)
}

fn transfer_hamiltonian_part(h: &ComplexMatrix) -> ComplexMatrix {
    let d = h.nrows();
    let id = identity(d);
    (kron(&id, h) - kron(&h.transpose(), &id)) * (-I)
}

pub fn build_generator(p: &GenParams) -> Result<SuperMap> {
    let d = p.d;
    check_dim(d)?;
    let t = transfer_hamiltonian_part(&p.hamiltonian())
        + (transfer_population_part(d) + transfer_phase_part(d) * c(p.nu)) * c(p.kappa);
    SuperMap::from_transfer(d, t)
}

/// The two dissipative directions with `κ = 1`: `(L_pop, L_phase)` so that
/// `L = κ L_pop + κν L_phase` when `H = 0`.
pub fn generator_basis(d: usize) -> Result<(SuperMap, SuperMap)> {
    Ok((
        SuperMap::from_transfer(d, transfer_population_part(d))?,
        SuperMap::from_transfer(d, transfer_phase_part(d))?,
    ))
}

/// `e^{tL}` from the transfer-matrix exponential.
pub fn semigroup_numeric(p: &GenParams, t: f64) -> Result<SuperMap> {
    let l = build_generator(p)?;
    SuperMap::from_transfer(p.d, expm(&(l.transfer() * c(t))))
}

/// `(α(t), β(t))` of the semigroup: `α = 1 - e^{-κdt}`, `β = e^{-κdt} - e^{-κ(d-1+ν)t}`.
pub fn semigroup_alpha_beta(d: usize, kappa: f64, nu: f64, t: f64) -> (f64, f64) {
    let df = d as f64;
    let pop = (-kappa * df * t).exp();
    let coh = (-kappa * (df - 1.0 + nu) * t).exp();
    (1.0 - pop, pop - coh)
}

/// `e^{tL} = U_t ∘ Φ_{α(t),β(t)}` with `U_t(ρ) = e^{-iHt} ρ e^{iHt}`.
pub fn semigroup_closed_form(p: &GenParams, t: f64) -> Result<SuperMap> {
    let (alpha, beta) = semigroup_alpha_beta(p.d, p.kappa, p.nu, t);
    let phi = build_phi_family(&MapParams::new(p.d, alpha, beta)?)?;
    if p.h.iter().all(|&h| h == 0.0) {
        return Ok(phi);
    }
    let phases: Vec<Complex64> = p.h.iter().map(|&h| Complex64::from_polar(1.0, -h * t)).collect();
    let u = ComplexMatrix::from_fn(p.d, p.d, |i, j| if i == j { phases[i] } else { linalg::ZERO });
    let unitary = SuperMap::sandwich(&u, &u.adjoint())?;
    compose(&unitary, &phi)
}

/// Which semigroup class a rate bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositivityClass {
    Positive,
    Schwarz,
    /// `k`-positive with `k ≥ 2` (includes completely positive).
    KPositive,
}

impl PositivityClass {
    /// The constant `c_d` in `Γ_max ≤ c_d Γ`.
    pub fn rate_constant(self, d: usize) -> f64 {
        let df = d as f64;
        match self {
            PositivityClass::Positive => 1.0,
            PositivityClass::Schwarz => 2.0 / (df + 1.0),
            PositivityClass::KPositive => 1.0 / df,
        }
    }

    /// Smallest `ν` for which the semigroup belongs to the class.
    pub fn nu_threshold(self, d: usize) -> f64 {
        match self {
            PositivityClass::Positive => conditional_positivity_threshold(),
            PositivityClass::Schwarz => dissipativity_threshold(d),
            PositivityClass::KPositive => ccp_threshold(),
        }
    }
}

impl fmt::Display for PositivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PositivityClass::Positive => "positive",
            PositivityClass::Schwarz => "schwarz",
            PositivityClass::KPositive => "kpos",
        })
    }
}

impl FromStr for PositivityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "positive" | "p" | "pos" => Ok(PositivityClass::Positive),
            "schwarz" | "s" => Ok(PositivityClass::Schwarz),
            "kpos" | "kpositive" | "cp" => Ok(PositivityClass::KPositive),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

pub fn conditional_positivity_threshold() -> f64 {
    -1.0
}

pub fn dissipativity_threshold(d: usize) -> f64 {
    let df = d as f64;
    -df / (df + 2.0)
}

pub fn ccp_threshold() -> f64 {
    0.0
}

/// Relaxation rates and the `Γ_max ≤ c_d Γ` bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub class: PositivityClass,
    /// `Γ_ℓ = κd`, multiplicity `d - 1`.
    pub gamma_diag: f64,
    /// `Γ_ij = κ(d - 1 + ν)`, multiplicity `d(d - 1)`.
    pub gamma_offdiag: f64,
    pub gamma_total: f64,
    pub gamma_max: f64,
    pub c_d: f64,
    pub bound_satisfied: bool,
    pub bound_saturated: bool,
    /// Largest deviation between the closed-form rates and `-Re λ` of the transfer matrix.
    pub numeric_mismatch: f64,
}

/// Closed-form eigenvalues of `L`: `{-i(h_k - h_ℓ) - κ(d-1+ν)}_{k≠ℓ} ∪ {0} ∪ {-κd}^{d-1}`.
pub fn closed_form_spectrum(p: &GenParams) -> Vec<Complex64> {
    let d = p.d;
    let df = d as f64;
    let mut out = vec![linalg::ZERO];
    out.extend(std::iter::repeat_n(c(-p.kappa * df), d - 1));
    for k in 0..d {
        for l in 0..d {
            if k != l {
                out.push(Complex64::new(-p.kappa * (df - 1.0 + p.nu), -(p.h[k] - p.h[l])));
            }
        }
    }
    out
}

/// Greedy matching distance between two eigenvalue multisets of equal size.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .expect("equal lengths");
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}

pub fn spectrum_rates(p: &GenParams, class: PositivityClass) -> Result<RateReport> {
    let d = p.d;
    let df = d as f64;
    let offdiag = df - 1.0 + p.nu;
    if p.kappa < 0.0 || offdiag < 0.0 {
        return Err(Error::NegativeRate { kappa: p.kappa, offdiag });
    }
    let gamma_diag = p.kappa * df;
    let gamma_offdiag = p.kappa * offdiag;
    let gamma_total = (df - 1.0) * gamma_diag + df * (df - 1.0) * gamma_offdiag;
    let gamma_max = gamma_diag.max(gamma_offdiag);
    let c_d = class.rate_constant(d);
    let slack = c_d * gamma_total - gamma_max;
    let scale = 1e-12 * gamma_total.abs().max(1.0);

    let mut numeric: Vec<f64> = eigvals_general(build_generator(p)?.transfer())?
        .iter()
        .map(|z| -z.re)
        .collect();
    numeric.sort_by(f64::total_cmp);
    let mut expected = vec![0.0];
    expected.extend(std::iter::repeat_n(gamma_diag, d - 1));
    expected.extend(std::iter::repeat_n(gamma_offdiag, d * (d - 1)));
    expected.sort_by(f64::total_cmp);
    let numeric_mismatch = numeric
        .iter()
        .zip(&expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    Ok(RateReport {
        class,
        gamma_diag,
        gamma_offdiag,
        gamma_total,
        gamma_max,
        c_d,
        bound_satisfied: slack >= -scale,
        bound_saturated: slack.abs() <= scale,
        numeric_mismatch,
    })
}

/// `⟨y|L(|x⟩⟨x|)|y⟩` evaluated through the transfer matrix of `L`.
pub fn pair_value(generator: &SuperMap, x: &ComplexVector, y: &ComplexVector) -> f64 {
    let px = vec(&(x * x.adjoint()));
    let py = vec(&(y * y.adjoint()));
    py.dotc(&(generator.transfer() * px)).re
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPositivityReport {
    pub closed_form: bool,
    /// Minimum of `⟨y|L(|x⟩⟨x|)|y⟩` over the sampled orthonormal pairs.
    pub sampled_min: f64,
    pub seed: u64,
    pub budget: usize,
}

/// Half of the budget draws Haar pairs in `C^d`, the other half pairs supported on two
/// random coordinates (where `Σ|x_k|²|y_k|²` can approach 1/2).
pub fn is_conditionally_positive(p: &GenParams, budget: usize, seed: u64) -> Result<ConditionalPositivityReport> {
    let l = build_generator(p)?;
    let mut rng = sampling::rng(seed);
    let mut sampled_min = f64::INFINITY;
    for k in 0..budget {
        let (x, y) = if k % 2 == 0 {
            orthonormal_pair(&mut rng, p.d)
        } else {
            two_level_pair(&mut rng, p.d)
        };
        sampled_min = sampled_min.min(pair_value(&l, &x, &y));
    }
    Ok(ConditionalPositivityReport {
        closed_form: p.nu >= conditional_positivity_threshold(),
        sampled_min,
        seed,
        budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpReport {
    pub closed_form: bool,
    /// Smallest eigenvalue of `P⁺_⊥ C_L P⁺_⊥` on the range of `P⁺_⊥`.
    pub min_eig_projected: f64,
}

pub fn is_ccp(p: &GenParams) -> Result<CcpReport> {
    let d = p.d;
    let n = d * d;
    let l = build_generator(p)?;
    let perp = identity(n) - maximally_entangled_projector(d);
    // eigenvalues of a projector are {0, 1, ..., 1}: drop the first column
    let basis = eig_hermitian(&perp)?.vectors.columns(1, n - 1).into_owned();
    let restricted = basis.adjoint() * l.choi() * &basis;
    let restricted = (&restricted + restricted.adjoint()) * c(0.5);
    Ok(CcpReport {
        closed_form: p.nu >= ccp_threshold(),
        min_eig_projected: eigvals_hermitian(&restricted)?[0],
    })
}

/// `M(a, X) = Tr(X†X) I + (d-a) X†X - a Δ(X†X) + a(Δ(X†)X + X†Δ(X))` for traceless `X`.
pub fn dissipativity_matrix(d: usize, a: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", x.nrows(), x.ncols()),
        });
    }
    let tr = linalg::trace(x).norm();
    if tr > 1e-10 * frobenius(x) {
        return Err(Error::NotTraceless { trace: tr });
    }
    let xd = x.adjoint();
    let xdx = &xd * x;
    let norm2 = linalg::trace(&xdx);
    Ok(identity(d) * norm2 + &xdx * c(d as f64 - a) - dephase(&xdx) * c(a)
        + (dephase(&xd) * x + &xd * dephase(x)) * c(a))
}

/// Witness `X(c) = [[1, -c], [c, -1]] ⊕ 0`.
pub fn dissipativity_witness(d: usize, cval: f64) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    x[(0, 0)] = c(1.0);
    x[(0, 1)] = c(-cval);
    x[(1, 0)] = c(cval);
    x[(1, 1)] = c(-1.0);
    x
}

/// The minimizing `c★ = d/(d+2-2a)` when `d + 2 - 2a > 0`.
pub fn witness_optimal_c(d: usize, a: f64) -> Option<f64> {
    let df = d as f64;
    let denom = df + 2.0 - 2.0 * a;
    (denom > 0.0).then(|| df / denom)
}

/// Smallest eigenvalue of `M(a, X(c))` over the witness family: at `c★` when it exists,
/// otherwise over the fixed probes `c ∈ {10, 100}`.
pub fn witness_min_eig(d: usize, a: f64) -> Result<(f64, f64)> {
    let candidates: Vec<f64> = match witness_optimal_c(d, a) {
        Some(cs) => vec![cs],
        None => vec![10.0, 100.0],
    };
    let mut best = (f64::INFINITY, f64::NAN);
    for cval in candidates {
        let m = dissipativity_matrix(d, a, &dissipativity_witness(d, cval))?;
        let e = eigvals_hermitian(&m)?[0];
        if e < best.0 {
            best = (e, cval);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipativityReport {
    pub closed_form: bool,
    pub min_witness_eig: f64,
    pub witness_c: f64,
    pub min_sampled_eig: f64,
    pub seed: u64,
    pub budget: usize,
}

pub fn is_dissipative(p: &GenParams, budget: usize, seed: u64) -> Result<DissipativityReport> {
    let d = p.d;
    let a = p.a();
    let (min_witness_eig, witness_c) = witness_min_eig(d, a)?;
    let mut rng = sampling::rng(seed);
    let mut min_sampled_eig = f64::INFINITY;
    for _ in 0..budget {
        let x = traceless_unit(&mut rng, d);
        let m = dissipativity_matrix(d, a, &x)?;
        min_sampled_eig = min_sampled_eig.min(eigvals_hermitian(&m)?[0]);
    }
    Ok(DissipativityReport {
        closed_form: p.nu >= dissipativity_threshold(d),
        min_witness_eig,
        witness_c,
        min_sampled_eig,
        seed,
        budget,
    })
}

/// `L‡(X†X) - L‡(X†)X - X†L‡(X)`, computed from the generator's adjoint transfer matrix.
pub fn dissipation_function(generator: &SuperMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let adj = crate::channels::hs_adjoint(generator);
    let xd = x.adjoint();
    Ok(adj.apply_matrix(&(&xd * x))? - adj.apply_matrix(&xd)? * x - &xd * adj.apply_matrix(x)?)
}

/// `Σ_i |x_i|²|y_i|²` for orthonormal `x, y`; never exceeds 1/2.
pub fn pair_overlap(x: &ComplexVector, y: &ComplexVector) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("length {}", x.len()),
            found: format!("length {}", y.len()),
        });
    }
    let defect = (x.norm() - 1.0)
        .abs()
        .max((y.norm() - 1.0).abs())
        .max(x.dotc(y).norm());
    if defect > 1e-10 {
        return Err(Error::NotOrthonormal { defect });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum())
}

/// Recovers the `ν` threshold of a class by bisection using only the numerical oracles
/// (`κ = 1`, `h = 0`): orthogonal-pair sampling for positivity, witness plus sampling for
/// the Schwarz property, the projected Choi spectrum for complete positivity.
pub fn oracle_threshold(d: usize, class: PositivityClass, budget: usize, seed: u64, tol: f64) -> Result<f64> {
    check_dim(d)?;
    let holds = |nu: f64| -> bool {
        let p = GenParams::new(d, 1.0, nu).expect("validated dimension");
        match class {
            PositivityClass::Positive => is_conditionally_positive(&p, budget, seed)
                .map(|r| r.sampled_min >= -ORACLE_TOL)
                .unwrap_or(false),
            PositivityClass::Schwarz => is_dissipative(&p, budget, seed)
                .map(|r| r.min_witness_eig >= -ORACLE_TOL && r.min_sampled_eig >= -ORACLE_TOL)
                .unwrap_or(false),
            PositivityClass::KPositive => is_ccp(&p)
                .map(|r| r.min_eig_projected >= -ORACLE_TOL)
                .unwrap_or(false),
        }
    };
    Ok(bisect_predicate(&holds, -3.0, 1.0, tol))
}
