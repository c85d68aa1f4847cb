//! Time-dependent evolutions inside the `Φ_{α,β}` family.
//!
//! A schedule fixes `κ(t)` and `ν(t)`; with `A(t) = exp(-d∫κ)` and `B(t) = exp(-∫κ(d-1+ν))` the
//! evolved map is `Φ_{1-A, A-B}`. Closed forms are used wherever they exist, quadrature otherwise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{build_phi_family, mix, named_map, MapParams, NamedMap, SuperMap};
use crate::error::{Error, Result};
use crate::generators::{dissipativity_threshold, generator_basis, semigroup_alpha_beta};
use crate::linalg::{c, check_dim, condition_number, expm, identity, kron, solve, ComplexMatrix};
use crate::numerics::{bisect, format_sig, integrate_piecewise};
use crate::regions::{classify_point, Margins, Region, RegionVerdict, MEMBERSHIP_TOL};

/// Absolute tolerance for `∫κ` and `∫κν`.
pub const QUADRATURE_TOL: f64 = 1e-11;
/// Horizon of the crossing-time scan.
pub const CROSSING_HORIZON: f64 = 50.0;
/// Maps whose transfer condition number exceeds this are treated as non-invertible.
pub const SINGULAR_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    ConstantNu { d: usize, kappa: f64, nu: f64 },
    /// `κ = 1` with the boundary-riding `ν(t)` of [`nu_enm`].
    OptimalEnm { d: usize },
    /// [`nu_enm`] until it reaches `-1`, then constant.
    PDivisible { d: usize },
    /// [`nu_enm`] until it reaches `-d/(d+2)`, then constant.
    SchwarzDivisible { d: usize },
    /// `κ(t) = d/(d - e^{dt})`, `ν(t) = 1 - e^{dt}`; singular `κ` at `t₁ = ln d / d`.
    Enm2 { d: usize },
    /// Uniform average of the Weyl semigroups `e^{tL_kℓ}`, `ℓ > 0`.
    WeylMixture { d: usize },
}

impl Schedule {
    pub fn d(&self) -> usize {
        match *self {
            Schedule::ConstantNu { d, .. }
            | Schedule::OptimalEnm { d }
            | Schedule::PDivisible { d }
            | Schedule::SchwarzDivisible { d }
            | Schedule::Enm2 { d }
            | Schedule::WeylMixture { d } => d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.d())?;
        if let Schedule::ConstantNu { kappa, nu, .. } = *self {
            if !kappa.is_finite() {
                return Err(Error::InvalidParameter { name: "kappa", value: kappa });
            }
            if !nu.is_finite() {
                return Err(Error::InvalidParameter { name: "nu", value: nu });
            }
        }
        Ok(())
    }

    /// `(κ(t), ν(t))` for schedules defined by a generator; `None` for the Weyl mixture.
    pub fn rates(&self, t: f64) -> Option<(f64, f64)> {
        let d = self.d();
        let df = d as f64;
        match *self {
            Schedule::ConstantNu { kappa, nu, .. } => Some((kappa, nu)),
            Schedule::OptimalEnm { .. } => Some((1.0, nu_enm(d, t))),
            Schedule::PDivisible { .. } => {
                let ts = switch_times(d).t_star;
                Some((1.0, if t <= ts { nu_enm(d, t) } else { -1.0 }))
            }
            Schedule::SchwarzDivisible { .. } => {
                let ts = switch_times(d).t_s;
                Some((1.0, if t <= ts { nu_enm(d, t) } else { dissipativity_threshold(d) }))
            }
            Schedule::Enm2 { .. } => {
                let g = (df * t).exp();
                Some((df / (df - g), 1.0 - g))
            }
            Schedule::WeylMixture { .. } => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let s = switch_times(self.d());
        match self {
            Schedule::PDivisible { .. } if s.t_star.is_finite() => vec![s.t_star],
            Schedule::SchwarzDivisible { .. } => vec![s.t_s],
            _ => Vec::new(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::ConstantNu { .. } => "const",
            Schedule::OptimalEnm { .. } => "enm",
            Schedule::PDivisible { .. } => "pdiv",
            Schedule::SchwarzDivisible { .. } => "sdiv",
            Schedule::Enm2 { .. } => "enm2",
            Schedule::WeylMixture { .. } => "weyl",
        }
    }

    /// Builds a schedule from its short name; `kappa` and `nu` are used by `const` only.
    pub fn from_name(name: &str, d: usize, kappa: f64, nu: f64) -> Result<Self> {
        let s = match name.to_ascii_lowercase().as_str() {
            "const" | "constant" => Schedule::ConstantNu { d, kappa, nu },
            "enm" => Schedule::OptimalEnm { d },
            "pdiv" => Schedule::PDivisible { d },
            "sdiv" => Schedule::SchwarzDivisible { d },
            "enm2" => Schedule::Enm2 { d },
            "weyl" => Schedule::WeylMixture { d },
            _ => return Err(Error::UnknownName(name.to_string())),
        };
        s.validate()?;
        Ok(s)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::ConstantNu { d, kappa, nu } => write!(f, "const(d={d}, kappa={kappa}, nu={nu})"),
            other => write!(f, "{}(d={})", other.name(), other.d()),
        }
    }
}

/// `ν(t) = -(d-1)(e^{dt} - 1)/(e^{dt} + d - 1)`.
pub fn nu_enm(d: usize, t: f64) -> f64 {
    let df = d as f64;
    // divide through by e^{dt} so large t does not overflow
    let x = (-df * t).exp();
    -(df - 1.0) * (1.0 - x) / (1.0 + (df - 1.0) * x)
}

/// `N(t) = ∫₀ᵗ ν_enm = t - ln((e^{dt} + d - 1)/d)`.
pub fn n_enm(d: usize, t: f64) -> f64 {
    let df = d as f64;
    let x = (-df * t).exp();
    t - df * t - ((1.0 + (df - 1.0) * x) / df).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchTimes {
    /// Time at which [`nu_enm`] reaches `-1`; infinite for `d = 2`.
    pub t_star: f64,
    /// Time at which [`nu_enm`] reaches `-d/(d+2)`.
    pub t_s: f64,
}

pub fn switch_times(d: usize) -> SwitchTimes {
    let df = d as f64;
    let t_star = if d <= 2 {
        f64::INFINITY
    } else {
        (2.0 * (df - 1.0) / (df - 2.0)).ln() / df
    };
    let t_s = (2.0 * (df * df - 1.0) / (df * df - 2.0)).ln() / df;
    SwitchTimes { t_star, t_s }
}

/// ENM2 singularity `t₁ = ln d / d`.
pub fn enm2_singular_time(d: usize) -> f64 {
    (d as f64).ln() / d as f64
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// `A(t) = exp(-d∫κ)` and `B(t) = exp(-∫κ(d-1+ν))` in closed form.
fn a_b_closed(s: &Schedule, t: f64) -> Option<(f64, f64)> {
    let d = s.d();
    let df = d as f64;
    let enm_b = |t: f64| (1.0 + (df - 1.0) * (-df * t).exp()) / df;
    let a = (-df * t).exp();
    match *s {
        Schedule::ConstantNu { kappa, nu, .. } => {
            let (alpha, beta) = semigroup_alpha_beta(d, kappa, nu, t);
            Some((1.0 - alpha, 1.0 - alpha - beta))
        }
        Schedule::OptimalEnm { .. } => Some((a, enm_b(t))),
        Schedule::PDivisible { .. } => {
            let ts = switch_times(d).t_star;
            if t <= ts {
                Some((a, enm_b(t)))
            } else {
                Some((a, 0.5 * (-(df - 2.0) * (t - ts)).exp()))
            }
        }
        Schedule::SchwarzDivisible { .. } => {
            let ts = switch_times(d).t_s;
            if t <= ts {
                Some((a, enm_b(t)))
            } else {
                let rate = (df * df - 2.0) / (df + 2.0);
                Some((a, (df + 2.0) / (2.0 * (df + 1.0)) * (-rate * (t - ts)).exp()))
            }
        }
        Schedule::Enm2 { .. } => {
            let alpha = df * (1.0 - a) / (df - 1.0);
            let beta = (a - 1.0) / (df - 1.0);
            Some((1.0 - alpha, 1.0 - alpha - beta))
        }
        Schedule::WeylMixture { .. } => None,
    }
}

/// `(α(t), β(t))` of the evolved map. The Weyl mixture is projected onto the family by
/// least squares; see [`project_onto_family`] for the residual.
pub fn alpha_beta_at(s: &Schedule, t: f64) -> Result<(f64, f64)> {
    s.validate()?;
    check_time(t)?;
    if let Some((a, b)) = a_b_closed(s, t) {
        return Ok((1.0 - a, a - b));
    }
    let (p, _) = project_onto_family(&weyl_mixture_map(s.d(), t)?)?;
    Ok((p.alpha, p.beta))
}

/// `(α(t), β(t))` from adaptive quadrature of `∫κ` and `∫κν`, without closed forms.
/// Fails for the Weyl mixture and for ENM2 at or beyond its singular time.
pub fn alpha_beta_by_quadrature(s: &Schedule, t: f64) -> Result<(f64, f64)> {
    s.validate()?;
    check_time(t)?;
    let d = s.d();
    if matches!(s, Schedule::WeylMixture { .. }) {
        return Err(Error::UnknownName("weyl schedule has no rate description".into()));
    }
    if matches!(s, Schedule::Enm2 { .. }) && t >= enm2_singular_time(d) {
        return Err(Error::SingularMap { t, condition: f64::INFINITY });
    }
    let kappa = |u: f64| s.rates(u).expect("rate schedule").0;
    let kappa_nu = |u: f64| {
        let (k, n) = s.rates(u).expect("rate schedule");
        k * n
    };
    let bp = s.breakpoints();
    let int_kappa = integrate_piecewise(&kappa, 0.0, t, &bp, QUADRATURE_TOL);
    let int_kappa_nu = integrate_piecewise(&kappa_nu, 0.0, t, &bp, QUADRATURE_TOL);
    let df = d as f64;
    let a = (-df * int_kappa).exp();
    let b = (-(df - 1.0) * int_kappa - int_kappa_nu).exp();
    Ok((1.0 - a, a - b))
}

pub fn map_at(s: &Schedule, t: f64) -> Result<SuperMap> {
    s.validate()?;
    check_time(t)?;
    if let Schedule::WeylMixture { d } = *s {
        return weyl_mixture_map(d, t);
    }
    let (alpha, beta) = alpha_beta_at(s, t)?;
    build_phi_family(&MapParams::new(s.d(), alpha, beta)?)
}

/// The `t → ∞` limit of [`map_at`].
pub fn asymptotic_map(s: &Schedule) -> Result<SuperMap> {
    s.validate()?;
    let d = s.d();
    let depolarizing = || build_phi_family(&MapParams::new(d, 1.0, 0.0)?);
    match *s {
        Schedule::OptimalEnm { .. } => Ok(named_map(NamedMap::E4, d)?.0),
        // for d = 2 the switch never happens and the schedule stays on the boundary-riding branch
        Schedule::PDivisible { .. } if d == 2 => Ok(named_map(NamedMap::E4, d)?.0),
        Schedule::PDivisible { .. } | Schedule::SchwarzDivisible { .. } => depolarizing(),
        Schedule::ConstantNu { kappa, nu, .. } if kappa > 0.0 && nu > -(d as f64 - 1.0) => depolarizing(),
        Schedule::ConstantNu { .. } => Err(Error::NoLimit),
        Schedule::Enm2 { .. } => Ok(named_map(NamedMap::E3, d)?.0),
        Schedule::WeylMixture { .. } => weyl_asymptotic_map(d),
    }
}

/// Least-squares `(α, β)` with `Φ_{α,β}` closest to `m` in transfer Frobenius norm, and the
/// remaining distance.
pub fn project_onto_family(m: &SuperMap) -> Result<(MapParams, f64)> {
    let d = m.d();
    let id = build_phi_family(&MapParams::new(d, 0.0, 0.0)?)?;
    let tau = build_phi_family(&MapParams::new(d, 1.0, 0.0)?)?;
    let delta = build_phi_family(&MapParams::new(d, 0.0, 1.0)?)?;
    let u = tau.transfer() - id.transfer();
    let v = delta.transfer() - id.transfer();
    let r = m.transfer() - id.transfer();
    let (alpha, beta, residual) = least_squares_2(&u, &v, &r);
    Ok((MapParams::new(d, alpha, beta)?, residual))
}

/// Real coefficients `(x, y)` minimizing `‖r - x u - y v‖_F`, and that minimum.
fn least_squares_2(u: &ComplexMatrix, v: &ComplexMatrix, r: &ComplexMatrix) -> (f64, f64, f64) {
    let ip = |a: &ComplexMatrix, b: &ComplexMatrix| a.zip_map(b, |x, y| (x.conj() * y).re).sum();
    let (uu, uv, vv) = (ip(u, u), ip(u, v), ip(v, v));
    let (ur, vr) = (ip(u, r), ip(v, r));
    let det = uu * vv - uv * uv;
    let x = (vv * ur - uv * vr) / det;
    let y = (uu * vr - uv * ur) / det;
    let rest = r - u * c(x) - v * c(y);
    (x, y, rest.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchwarzFlag {
    In,
    Out,
    Unknown,
}

impl fmt::Display for SchwarzFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchwarzFlag::In => "in",
            SchwarzFlag::Out => "out",
            SchwarzFlag::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub verdict: RegionVerdict,
    /// `In` when completely positive, `Out` when not even positive.
    pub schwarz_flag: SchwarzFlag,
    pub min_choi_eig: f64,
}

/// `steps + 1` equally spaced points on `[0, t_max]`, evaluated in parallel.
pub fn trajectory(s: &Schedule, t_max: f64, steps: usize) -> Result<Vec<TrajectoryPoint>> {
    s.validate()?;
    check_time(t_max)?;
    (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = if steps == 0 { 0.0 } else { t_max * k as f64 / steps as f64 };
            let m = map_at(s, t)?;
            let (alpha, beta) = alpha_beta_at(s, t)?;
            let verdict = classify_point(&MapParams::new(s.d(), alpha, beta)?);
            let schwarz_flag = if verdict.completely_positive {
                SchwarzFlag::In
            } else if !verdict.positive {
                SchwarzFlag::Out
            } else {
                SchwarzFlag::Unknown
            };
            Ok(TrajectoryPoint { t, alpha, beta, verdict, schwarz_flag, min_choi_eig: m.min_choi_eig()? })
        })
        .collect()
}

/// `t,alpha,beta,positive,cp,eb,min_choi_eig`.
pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from("t,alpha,beta,positive,cp,eb,min_choi_eig\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_sig(p.t),
            format_sig(p.alpha),
            format_sig(p.beta),
            u8::from(p.verdict.positive),
            u8::from(p.verdict.completely_positive),
            u8::from(p.verdict.entanglement_breaking),
            format_sig(p.min_choi_eig)
        ));
    }
    out
}

/// Times after which a constant-`ν` trajectory stays inside each region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub t_p: Option<f64>,
    pub t_cp: Option<f64>,
    pub t_eb: Option<f64>,
    /// Region margins at the end of the scan.
    pub margins: Margins,
}

impl CrossingReport {
    pub fn is_ordered(&self) -> bool {
        let seq: Vec<f64> = [self.t_p, self.t_cp, self.t_eb].into_iter().flatten().collect();
        seq.windows(2).all(|w| w[0] <= w[1] + 1e-10)
    }
}

const CROSSING_SCAN_STEPS: usize = 50_000;

pub fn crossing_times(d: usize, kappa: f64, nu: f64) -> Result<CrossingReport> {
    check_dim(d)?;
    if kappa <= 0.0 || !kappa.is_finite() {
        return Err(Error::InvalidParameter { name: "kappa", value: kappa });
    }
    let margin = |which: Region, t: f64| -> f64 {
        let (alpha, beta) = semigroup_alpha_beta(d, kappa, nu, t);
        which.margin(&MapParams { d, alpha, beta })
    };
    let h = CROSSING_HORIZON / CROSSING_SCAN_STEPS as f64;
    let entry = |which: Region| -> Option<f64> {
        let g = |t: f64| margin(which, t);
        if g(CROSSING_HORIZON) < -MEMBERSHIP_TOL {
            return None;
        }
        let last_out = (0..=CROSSING_SCAN_STEPS).rev().find(|&k| g(k as f64 * h) < -MEMBERSHIP_TOL);
        match last_out {
            None => Some(0.0),
            Some(k) => bisect(&|t| g(t) + MEMBERSHIP_TOL, k as f64 * h, (k + 1) as f64 * h, 1e-10),
        }
    };
    let t_p = entry(Region::P);
    let (alpha, beta) = semigroup_alpha_beta(d, kappa, nu, CROSSING_HORIZON);
    let margins = classify_point(&MapParams { d, alpha, beta }).margins;
    if t_p.is_none() {
        return Err(Error::NoCrossing {
            region: "P".into(),
            t_max: CROSSING_HORIZON,
            final_margin: margins.positive,
        });
    }
    Ok(CrossingReport { t_p, t_cp: entry(Region::CP), t_eb: entry(Region::EB), margins })
}

/// Boundary functionals `β + sα` whose slope at `t = 0` decides tangency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    P,
    CP,
    Schwarz,
}

impl Boundary {
    fn weight(self, d: usize) -> f64 {
        let df = d as f64;
        match self {
            Boundary::P => 2.0 / df,
            Boundary::CP => 1.0 / df,
            Boundary::Schwarz => 2.0 * (df + 1.0) / (df * (df + 2.0)),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" | "positive" => Ok(Boundary::P),
            "cp" => Ok(Boundary::CP),
            "schwarz" | "s" => Ok(Boundary::Schwarz),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencySlope {
    pub analytic: f64,
    pub finite_difference: f64,
}

impl TangencySlope {
    pub fn agrees(&self, rel: f64) -> bool {
        (self.analytic - self.finite_difference).abs() <= rel * self.analytic.abs().max(1.0)
    }
}

pub fn tangency_slope(d: usize, kappa: f64, nu: f64, boundary: Boundary) -> TangencySlope {
    let df = d as f64;
    let analytic = match boundary {
        Boundary::CP => kappa * nu,
        Boundary::P => kappa * (nu + 1.0),
        Boundary::Schwarz => kappa * (nu + df / (df + 2.0)),
    };
    let s = boundary.weight(d);
    let g = |t: f64| {
        let (alpha, beta) = semigroup_alpha_beta(d, kappa, nu, t);
        beta + s * alpha
    };
    let h = 1e-6;
    let finite_difference = (-3.0 * g(0.0) + 4.0 * g(h) - g(2.0 * h)) / (2.0 * h);
    TangencySlope { analytic, finite_difference }
}

/// `X|k⟩ = |k+1 mod d⟩`.
pub fn shift_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { c(1.0) } else { c(0.0) })
}

/// `Z = Σ_k ω^k E_kk` with `ω = e^{2πi/d}`.
pub fn weyl_clock(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * PI * i as f64 / d as f64)
        } else {
            c(0.0)
        }
    })
}

/// `W_kℓ = Z^k X^ℓ`.
pub fn weyl_op(d: usize, k: usize, l: usize) -> ComplexMatrix {
    weyl_clock(d).pow(k as u32) * shift_matrix(d).pow(l as u32)
}

/// All `d²` Weyl operators, `W_kℓ` at index `ℓ·d + k`.
pub fn weyl_ops(d: usize) -> Vec<ComplexMatrix> {
    (0..d).flat_map(|l| (0..d).map(move |k| weyl_op(d, k, l))).collect()
}

/// `f(t) = (1/d) Σ_r exp(t(ω^r - 1))`.
pub fn weyl_f(d: usize, t: f64) -> Complex64 {
    let df = d as f64;
    (0..d)
        .map(|r| (Complex64::from_polar(1.0, 2.0 * PI * r as f64 / df) - 1.0).scale(t).exp())
        .sum::<Complex64>()
        / df
}

fn weyl_generator_transfer(w: &ComplexMatrix) -> ComplexMatrix {
    let n = w.nrows();
    kron(&w.map(|z| z.conj()), w) - identity(n * n)
}

/// `(1/(d(d-1))) Σ_k Σ_{ℓ>0} e^{tL_kℓ}` with `L_kℓ(X) = W_kℓ X W_kℓ† - X`.
pub fn weyl_mixture_map(d: usize, t: f64) -> Result<SuperMap> {
    check_dim(d)?;
    check_time(t)?;
    let n = d * d;
    let mut acc = ComplexMatrix::zeros(n, n);
    for l in 1..d {
        for k in 0..d {
            acc += expm(&(weyl_generator_transfer(&weyl_op(d, k, l)) * c(t)));
        }
    }
    SuperMap::from_transfer(d, acc / c((d * (d - 1)) as f64))
}

/// Limit of [`weyl_mixture_map`]: each semigroup tends to the uniform twirl over the powers of
/// its Weyl operator.
pub fn weyl_asymptotic_map(d: usize) -> Result<SuperMap> {
    check_dim(d)?;
    let mut maps = Vec::new();
    for l in 1..d {
        for k in 0..d {
            let w = weyl_op(d, k, l);
            let twirl: Vec<SuperMap> = (0..d)
                .map(|r| {
                    let wr = w.pow(r as u32);
                    SuperMap::sandwich(&wr, &wr.adjoint())
                })
                .collect::<Result<_>>()?;
            maps.push(mix(&vec![1.0 / d as f64; d], &twirl)?);
        }
    }
    let m = maps.len();
    mix(&vec![1.0 / m as f64; m], &maps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    Central,
    FivePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorFit {
    pub generator: SuperMap,
    pub kappa_fit: f64,
    pub nu_fit: f64,
    /// Frobenius distance between the extracted generator and the fitted one.
    pub residual: f64,
    pub condition: f64,
}

/// `L_t = Φ̇_t Φ_t^{-1}` by finite differences, fitted to `κ L_pop + κν L_phase`.
/// Near `t = 0` the derivative switches to a one-sided second-order stencil.
pub fn extract_time_local_generator(
    map_fn: &dyn Fn(f64) -> Result<SuperMap>,
    t: f64,
    dt: f64,
    stencil: Stencil,
) -> Result<GeneratorFit> {
    check_time(t)?;
    let phi = map_fn(t)?;
    let d = phi.d();
    let condition = condition_number(phi.transfer());
    if condition.is_nan() || condition > SINGULAR_CONDITION {
        return Err(Error::SingularMap { t, condition });
    }
    let at = |s: f64| map_fn(s).map(|m| m.transfer().clone());
    let derivative = match stencil {
        Stencil::FivePoint if t >= 2.0 * dt => {
            (at(t - 2.0 * dt)? - at(t - dt)? * c(8.0) + at(t + dt)? * c(8.0) - at(t + 2.0 * dt)?) / c(12.0 * dt)
        }
        Stencil::Central if t >= dt => (at(t + dt)? - at(t - dt)?) / c(2.0 * dt),
        _ => (at(t)? * c(-3.0) + at(t + dt)? * c(4.0) - at(t + 2.0 * dt)?) / c(2.0 * dt),
    };
    // L Φ = Φ̇  ⇔  Φᵀ Lᵀ = Φ̇ᵀ
    let l = solve(&phi.transfer().transpose(), &derivative.transpose())
        .ok_or(Error::SingularMap { t, condition })?
        .transpose();
    let (pop, phase) = generator_basis(d)?;
    let (kappa_fit, kappa_nu, residual) = least_squares_2(pop.transfer(), phase.transfer(), &l);
    Ok(GeneratorFit {
        generator: SuperMap::from_transfer(d, l)?,
        kappa_fit,
        nu_fit: kappa_nu / kappa_fit,
        residual,
        condition,
    })
}
