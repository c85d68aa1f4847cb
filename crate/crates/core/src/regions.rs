//! Membership and geometry of the positive, completely positive and entanglement-breaking
//! regions of `Φ_{α,β}` in the `(α, β)` plane.
//!
//! Every region is an intersection of half-planes `a·α + b·β + c ≥ 0`. The closed-form verdicts
//! come from those inequalities; [`classify_numeric`] reaches the same verdicts from the map
//! itself (Choi spectrum, partial transpose, pure-state probes).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{build_phi_family, MapParams, SuperMap};
use crate::error::{Error, Result};
use crate::generators::dissipativity_witness;
use crate::linalg::{
    basis_matrix, c, check_dim, eigvals_hermitian, min_eig, partial_transpose, ComplexMatrix,
    ComplexVector, Subsystem,
};
use crate::numerics::{bisect_predicate, format_sig};
use crate::sampling::{self, derive_seed, ginibre, unit_vector};

/// Closed-form membership accepts slacks down to this value.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Numerical oracles accept eigenvalues down to this value.
pub const ORACLE_TOL: f64 = 1e-9;
/// Schwarz violations must be more negative than this to count as a witness.
pub const SCHWARZ_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    P,
    CP,
    EB,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::P, Region::CP, Region::EB];

    pub fn half_planes(self, d: usize) -> Vec<HalfPlane> {
        let df = d as f64;
        let amax = df / (df - 1.0);
        let mut out = vec![
            HalfPlane::new(1.0, 0.0, 0.0, "alpha >= 0"),
            HalfPlane::new(-1.0, 0.0, amax, "alpha <= d/(d-1)"),
        ];
        match self {
            Region::P => {
                out.push(HalfPlane::new(2.0 / df, 1.0, 0.0, "beta >= -2 alpha/d"));
                out.push(HalfPlane::new(-1.0, -1.0, amax, "beta <= d/(d-1) - alpha"));
            }
            Region::CP | Region::EB => {
                out.push(HalfPlane::new(1.0 / df, 1.0, 0.0, "beta >= -alpha/d"));
                out.push(HalfPlane::new(
                    -(df + 1.0) / df,
                    -1.0,
                    amax,
                    "beta <= d/(d-1) - (d+1) alpha/d",
                ));
                if self == Region::EB {
                    out.push(HalfPlane::new(1.0 + 1.0 / df, 1.0, -1.0, "beta >= 1 - alpha - alpha/d"));
                    out.push(HalfPlane::new(1.0 / df - 1.0, -1.0, 1.0, "beta <= 1 - alpha + alpha/d"));
                }
            }
        }
        out
    }

    /// Signed slack of every defining inequality, in the order of [`Region::half_planes`].
    pub fn slacks(self, p: &MapParams) -> Vec<f64> {
        self.half_planes(p.d).iter().map(|h| h.slack(p.alpha, p.beta)).collect()
    }

    /// Smallest slack; nonnegative inside the region.
    pub fn margin(self, p: &MapParams) -> f64 {
        self.slacks(p).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn contains(self, p: &MapParams) -> bool {
        self.margin(p) >= -MEMBERSHIP_TOL
    }

    /// Published closed-form area.
    pub fn closed_form_area(self, d: usize) -> f64 {
        let df = d as f64;
        match self {
            Region::P => df * (df + 2.0) / (2.0 * (df - 1.0).powi(2)),
            Region::CP => df * df / (2.0 * (df - 1.0).powi(2)),
            Region::EB => (3.0 * df - 2.0) / (2.0 * df * (df - 1.0)),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::P => "P",
            Region::CP => "CP",
            Region::EB => "EB",
        })
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" | "positive" => Ok(Region::P),
            "cp" => Ok(Region::CP),
            "eb" => Ok(Region::EB),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// `a·α + b·β + c ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub label: &'static str,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64, label: &'static str) -> Self {
        HalfPlane { a, b, c, label }
    }

    pub fn slack(&self, alpha: f64, beta: f64) -> f64 {
        self.a * alpha + self.b * beta + self.c
    }

    /// Intersection point of the two boundary lines, if they are not parallel.
    pub fn meet(&self, other: &HalfPlane) -> Option<(f64, f64)> {
        let det = self.a * other.b - self.b * other.a;
        if det.abs() < 1e-14 {
            return None;
        }
        let alpha = (-self.c * other.b + self.b * other.c) / det;
        let beta = (-self.a * other.c + self.c * other.a) / det;
        Some((alpha, beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub positive: f64,
    pub completely_positive: f64,
    pub entanglement_breaking: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub positive: bool,
    pub completely_positive: bool,
    pub entanglement_breaking: bool,
    pub margins: Margins,
}

impl RegionVerdict {
    pub fn is_nested(&self) -> bool {
        (!self.entanglement_breaking || self.completely_positive)
            && (!self.completely_positive || self.positive)
    }

    pub fn get(&self, which: Region) -> bool {
        match which {
            Region::P => self.positive,
            Region::CP => self.completely_positive,
            Region::EB => self.entanglement_breaking,
        }
    }

    pub fn margin(&self, which: Region) -> f64 {
        match which {
            Region::P => self.margins.positive,
            Region::CP => self.margins.completely_positive,
            Region::EB => self.margins.entanglement_breaking,
        }
    }
}

pub fn classify_point(p: &MapParams) -> RegionVerdict {
    let margins = Margins {
        positive: Region::P.margin(p),
        completely_positive: Region::CP.margin(p),
        entanglement_breaking: Region::EB.margin(p),
    };
    RegionVerdict {
        positive: margins.positive >= -MEMBERSHIP_TOL,
        completely_positive: margins.completely_positive >= -MEMBERSHIP_TOL,
        entanglement_breaking: margins.entanglement_breaking >= -MEMBERSHIP_TOL,
        margins,
    }
}

/// Smallest output eigenvalue over pure inputs: a basis state, the uniform superposition, an
/// equal two-level superposition, then `budget` Haar-random states.
pub fn positivity_probe_min(m: &SuperMap, budget: usize, seed: u64) -> Result<f64> {
    let d = m.d();
    let s = 1.0 / (d as f64).sqrt();
    let h = 1.0 / 2f64.sqrt();
    let mut probes = vec![
        ComplexVector::from_fn(d, |i, _| c(if i == 0 { 1.0 } else { 0.0 })),
        ComplexVector::from_element(d, c(s)),
        ComplexVector::from_fn(d, |i, _| c(if i < 2 { h } else { 0.0 })),
    ];
    let mut rng = sampling::rng(seed);
    probes.extend((0..budget).map(|_| unit_vector(&mut rng, d)));
    let mut worst = f64::INFINITY;
    for psi in probes {
        let out = m.apply_matrix(&(&psi * psi.adjoint()))?;
        worst = worst.min(min_eig(&out)?);
    }
    Ok(worst)
}

/// Verdict from the map alone. Entanglement breaking is decided by the PPT test, which is
/// exact for this family only: in general PPT does not imply separability for `d ≥ 3`.
pub fn classify_numeric(p: &MapParams, sample_budget: usize, seed: u64) -> Result<RegionVerdict> {
    let m = build_phi_family(p)?;
    let choi_min = eigvals_hermitian(m.choi())?[0];
    let pt_min = eigvals_hermitian(&partial_transpose(m.choi(), p.d, Subsystem::Second)?)?[0];
    let pos_min = positivity_probe_min(&m, sample_budget, seed)?;
    let cp = choi_min >= -ORACLE_TOL;
    Ok(RegionVerdict {
        positive: pos_min >= -ORACLE_TOL,
        completely_positive: cp,
        entanglement_breaking: cp && pt_min >= -ORACLE_TOL,
        margins: Margins {
            positive: pos_min,
            completely_positive: choi_min,
            entanglement_breaking: choi_min.min(pt_min),
        },
    })
}

/// Convex polygon with counterclockwise vertices; the closing vertex is not repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    pub which: Region,
    pub d: usize,
    pub vertices: Vec<(f64, f64)>,
}

impl RegionPolygon {
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|k| {
            let (x0, y0) = self.vertices[k];
            let (x1, y1) = self.vertices[(k + 1) % n];
            let (x2, y2) = self.vertices[(k + 2) % n];
            (x1 - x0) * (y2 - y1) - (y1 - y0) * (x2 - x1) > -1e-12
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta\n");
        for (a, b) in &self.vertices {
            out.push_str(&format!("{},{}\n", format_sig(*a), format_sig(*b)));
        }
        out
    }
}

/// Signed shoelace area, positive for counterclockwise order.
pub fn shoelace(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|k| {
            let (x0, y0) = vertices[k];
            let (x1, y1) = vertices[(k + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
}

pub fn region_polygon(which: Region, d: usize) -> Result<RegionPolygon> {
    check_dim(d)?;
    let planes = which.half_planes(d);
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    for (k, hk) in planes.iter().enumerate() {
        for hl in &planes[k + 1..] {
            let Some(v) = hk.meet(hl) else { continue };
            if planes.iter().all(|h| h.slack(v.0, v.1) >= -MEMBERSHIP_TOL)
                && !vertices.iter().any(|w| (w.0 - v.0).abs() < 1e-12 && (w.1 - v.1).abs() < 1e-12)
            {
                vertices.push(v);
            }
        }
    }
    if vertices.len() < 3 {
        return Err(Error::DegenerateRegion { which: which.to_string(), d });
    }
    let n = vertices.len() as f64;
    let cx = vertices.iter().map(|v| v.0).sum::<f64>() / n;
    let cy = vertices.iter().map(|v| v.1).sum::<f64>() / n;
    vertices.sort_by(|u, v| (u.1 - cy).atan2(u.0 - cx).total_cmp(&(v.1 - cy).atan2(v.0 - cx)));
    Ok(RegionPolygon { which, d, vertices })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaReport {
    pub closed_form: f64,
    pub shoelace: f64,
}

impl AreaReport {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.closed_form - self.shoelace).abs() <= tol
    }
}

pub fn region_area(which: Region, d: usize) -> Result<AreaReport> {
    let polygon = region_polygon(which, d)?;
    Ok(AreaReport { closed_form: which.closed_form_area(d), shoelace: polygon.area() })
}

/// Searches for `X` with `m(X†X) - m(X)†m(X)` having an eigenvalue below `-1e-8`.
///
/// Candidates are the matrix units `E_ij`, the witness family `[[1, -c], [c, -1]] ⊕ 0` for
/// `c ∈ [-5, 5]`, then `sample_budget` Ginibre draws. `None` only means no witness was found.
pub fn schwarz_falsify(m: &SuperMap, sample_budget: usize, seed: u64) -> Result<Option<ComplexMatrix>> {
    let defect = m.unitality_defect();
    if defect > 1e-9 {
        return Err(Error::NotUnital { defect });
    }
    let d = m.d();
    let violation = |x: &ComplexMatrix| -> Result<f64> {
        let mx = m.apply_matrix(x)?;
        let gap = m.apply_matrix(&(x.adjoint() * x))? - mx.adjoint() * &mx;
        min_eig(&gap)
    };
    for i in 0..d {
        for j in 0..d {
            let x = basis_matrix(d, i, j);
            if violation(&x)? < -SCHWARZ_TOL {
                return Ok(Some(x));
            }
        }
    }
    for k in 0..=200 {
        let x = dissipativity_witness(d, -5.0 + 0.05 * k as f64);
        if violation(&x)? < -SCHWARZ_TOL {
            return Ok(Some(x));
        }
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..sample_budget {
        let x = ginibre(&mut rng, d);
        if violation(&x)? < -SCHWARZ_TOL {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// One column of the empirical Schwarz boundary: at fixed `α`, the smallest and largest `β`
/// for which [`schwarz_falsify`] finds no witness. Empirical only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzBoundaryPoint {
    pub alpha: f64,
    pub beta_lower: f64,
    pub beta_upper: f64,
}

/// Scans `steps + 1` values of `α` in `[0, d/(d-1)]`. For each, the lower edge is bisected between
/// the positivity and CP lower boundaries, the upper edge between the CP and positivity upper
/// boundaries (Schwarz maps sit between the two sets).
pub fn schwarz_boundary_scan(
    d: usize,
    steps: usize,
    sample_budget: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<SchwarzBoundaryPoint>> {
    check_dim(d)?;
    let df = d as f64;
    let amax = df / (df - 1.0);
    (0..=steps)
        .into_par_iter()
        .map(|k| {
            let alpha = amax * k as f64 / steps.max(1) as f64;
            let point_seed = derive_seed(seed, &[d as u64, k as u64]);
            let schwarz = |beta: f64| -> bool {
                MapParams::new(d, alpha, beta)
                    .and_then(|p| build_phi_family(&p))
                    .and_then(|m| schwarz_falsify(&m, sample_budget, point_seed))
                    .map(|w| w.is_none())
                    .unwrap_or(false)
            };
            let p_lower = -2.0 * alpha / df;
            let cp_lower = -alpha / df;
            let cp_upper = amax - (df + 1.0) * alpha / df;
            let p_upper = amax - alpha;
            let beta_lower = bisect_predicate(&schwarz, p_lower, cp_lower, tol);
            let beta_upper = -bisect_predicate(&|nb: f64| schwarz(-nb), -p_upper, -cp_upper, tol);
            Ok(SchwarzBoundaryPoint { alpha, beta_lower, beta_upper })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub beta: f64,
    pub closed_form: RegionVerdict,
    pub oracle: RegionVerdict,
}

impl GridPoint {
    /// Regions on which the two verdicts differ, ignoring points within `filter` of a boundary.
    pub fn disagreements(&self, filter: f64) -> Vec<Region> {
        Region::ALL
            .into_iter()
            .filter(|&r| {
                self.closed_form.margin(r).abs() > filter && self.closed_form.get(r) != self.oracle.get(r)
            })
            .collect()
    }
}

/// Classifies an `n × n` grid over `[lo, hi]²` with both routes. Rows are processed in
/// parallel; each point's sampling seed is derived from its grid indices.
pub fn classify_grid(
    d: usize,
    n: usize,
    lo: f64,
    hi: f64,
    sample_budget: usize,
    seed: u64,
) -> Result<Vec<GridPoint>> {
    check_dim(d)?;
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    let rows: Vec<Vec<GridPoint>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let alpha = lo + step * i as f64;
                    let beta = lo + step * j as f64;
                    let p = MapParams::new(d, alpha, beta)?;
                    Ok(GridPoint {
                        alpha,
                        beta,
                        closed_form: classify_point(&p),
                        oracle: classify_numeric(&p, sample_budget, derive_seed(seed, &[i as u64, j as u64]))?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// `alpha,beta,positive,cp,eb` with closed-form booleans as 0/1.
pub fn grid_csv(points: &[GridPoint]) -> String {
    let mut out = String::from("alpha,beta,positive,cp,eb\n");
    for g in points {
        let v = &g.closed_form;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_sig(g.alpha),
            format_sig(g.beta),
            u8::from(v.positive),
            u8::from(v.completely_positive),
            u8::from(v.entanglement_breaking)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{hs_adjoint, named_map, transposition, NamedMap};
    use crate::generators::{semigroup_numeric, GenParams};
    use approx::assert_abs_diff_eq;

    fn params(d: usize, a: f64, b: f64) -> MapParams {
        MapParams::new(d, a, b).unwrap()
    }

    #[test]
    fn named_points() {
        for d in 2..=6 {
            let v = classify_point(&params(d, 0.0, 0.0));
            assert!(v.positive && v.completely_positive && !v.entanglement_breaking);
        }
        let v = classify_point(&params(3, 1.5, 0.0));
        assert!(v.positive && !v.completely_positive);

        let e4 = params(3, 1.0, -1.0 / 3.0);
        assert!(classify_point(&e4).entanglement_breaking);
        let s = Region::EB.slacks(&e4);
        assert_abs_diff_eq!(s[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s[4], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn numeric_named_points() {
        let (_, e3) = named_map(NamedMap::E3, 3).unwrap();
        let v = classify_numeric(&e3, 200, 1).unwrap();
        assert!(v.completely_positive && v.entanglement_breaking);

        let v = classify_numeric(&params(3, 0.0, 1.5), 200, 1).unwrap();
        assert!(v.completely_positive && !v.entanglement_breaking);
        assert!(v.margins.entanglement_breaking < -0.1);

        let boundary = params(3, 1.5, -1.0);
        assert_abs_diff_eq!(classify_point(&boundary).margins.positive, 0.0, epsilon = 1e-15);
        let v = classify_numeric(&boundary, 10_000, 1).unwrap();
        assert!(v.positive);
        assert_abs_diff_eq!(v.margins.positive, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn polygons() {
        let eb = region_polygon(Region::EB, 3).unwrap();
        let expected = [(0.0, 1.0), (0.75, 0.5), (1.5, -0.5), (1.0, -1.0 / 3.0)];
        assert_eq!(eb.vertices.len(), 4);
        for e in expected {
            assert!(eb.vertices.iter().any(|v| (v.0 - e.0).abs() < 1e-12 && (v.1 - e.1).abs() < 1e-12));
        }
        for v in &eb.vertices {
            let p = params(3, v.0, v.1);
            let s = Region::EB.slacks(&p);
            assert!(s.iter().all(|&x| x >= -1e-12));
            assert!(s.iter().filter(|x| x.abs() < 1e-12).count() >= 2);
        }
        for d in 2..=6 {
            let df = d as f64;
            let poly = region_polygon(Region::P, d).unwrap();
            assert_eq!(poly.vertices.len(), 4);
            for e in [(0.0, 0.0), (0.0, df / (df - 1.0))] {
                assert!(poly.vertices.iter().any(|v| (v.0 - e.0).abs() < 1e-12 && (v.1 - e.1).abs() < 1e-12));
            }
            let cp = region_polygon(Region::CP, d).unwrap();
            assert_eq!(cp.vertices.len(), 3);
            for r in Region::ALL {
                let poly = region_polygon(r, d).unwrap();
                assert!(poly.is_convex() && poly.area() > 0.0);
            }
        }
    }

    #[test]
    fn qubit_eb_region_is_a_parallelogram() {
        let eb = region_polygon(Region::EB, 2).unwrap();
        assert_eq!(eb.vertices.len(), 4);
        assert_abs_diff_eq!(eb.area(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn areas_of_p_and_cp() {
        let p = region_area(Region::P, 3).unwrap();
        assert_abs_diff_eq!(p.closed_form, 15.0 / 8.0, epsilon = 1e-15);
        assert!(p.agrees(1e-12));
        let cp = region_area(Region::CP, 3).unwrap();
        assert_abs_diff_eq!(cp.closed_form, 9.0 / 8.0, epsilon = 1e-15);
        assert!(cp.agrees(1e-12));
        assert_abs_diff_eq!(region_area(Region::P, 2).unwrap().shoelace, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(region_area(Region::CP, 2).unwrap().shoelace, 2.0, epsilon = 1e-12);
    }

    /// Area by counting midpoints of a fine grid, independent of the vertex construction.
    fn grid_area(which: Region, d: usize, n: usize) -> f64 {
        let (lo, hi) = (-2.5, 3.0);
        let h = (hi - lo) / n as f64;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let a = lo + (i as f64 + 0.5) * h;
                let b = lo + (j as f64 + 0.5) * h;
                if which.half_planes(d).iter().all(|p| p.slack(a, b) >= 0.0) {
                    count += 1;
                }
            }
        }
        count as f64 * h * h
    }

    #[test]
    fn shoelace_matches_grid_count() {
        for d in [2, 3, 5] {
            for r in Region::ALL {
                let exact = region_area(r, d).unwrap().shoelace;
                assert!((grid_area(r, d, 2000) - exact).abs() < 5e-3, "{r} d={d}");
            }
        }
        // frozen from the grid count: EB area at d = 3 is 7/16
        assert_abs_diff_eq!(region_area(Region::EB, 3).unwrap().shoelace, 7.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_export() {
        let csv = region_polygon(Region::CP, 3).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,beta");
        assert_eq!(lines.len(), 4);
        assert_ne!(lines[1], lines[3]);
    }

    #[test]
    fn transposition_is_not_schwarz() {
        let t = transposition(2).unwrap();
        let w = schwarz_falsify(&t, 0, 1).unwrap().expect("witness");
        let gap = t.apply_matrix(&(w.adjoint() * &w)).unwrap()
            - t.apply_matrix(&w).unwrap().adjoint() * t.apply_matrix(&w).unwrap();
        assert!(min_eig(&gap).unwrap() < -0.5);
    }

    #[test]
    fn cp_unital_maps_have_no_witness() {
        for name in [NamedMap::E1, NamedMap::E4, NamedMap::PhiCp] {
            let (m, _) = named_map(name, 3).unwrap();
            assert!(schwarz_falsify(&m, 500, 9).unwrap().is_none());
        }
        assert!(matches!(
            schwarz_falsify(&SuperMap::sandwich(&(crate::linalg::identity(2) * c(2.0)), &crate::linalg::identity(2)).unwrap(), 10, 1),
            Err(Error::NotUnital { .. })
        ));
    }

    #[test]
    fn semigroup_below_dissipative_threshold_is_falsified() {
        for d in [2, 3, 4] {
            let df = d as f64;
            let nu = -df / (df + 2.0) - 0.1;
            let m = semigroup_numeric(&GenParams::new(d, 1.0, nu).unwrap(), 1e-3).unwrap();
            assert!(schwarz_falsify(&hs_adjoint(&m), 0, 3).unwrap().is_some());
            let nu = -df / (df + 2.0) + 0.1;
            let m = semigroup_numeric(&GenParams::new(d, 1.0, nu).unwrap(), 1e-3).unwrap();
            assert!(schwarz_falsify(&hs_adjoint(&m), 200, 3).unwrap().is_none());
        }
    }

    #[test]
    fn schwarz_scan_lies_between_cp_and_p() {
        let pts = schwarz_boundary_scan(3, 4, 50, 7, 1e-4).unwrap();
        assert_eq!(pts.len(), 5);
        for p in pts {
            assert!(p.beta_lower <= -p.alpha / 3.0 + 1e-4);
            assert!(p.beta_lower >= -2.0 * p.alpha / 3.0 - 1e-4);
            assert!(p.beta_upper >= 1.5 - 4.0 * p.alpha / 3.0 - 1e-4);
        }
    }

    #[test]
    fn small_grid_agrees() {
        let pts = classify_grid(3, 21, -0.2, 1.7, 20, 42).unwrap();
        assert_eq!(pts.len(), 441);
        for g in &pts {
            assert!(g.disagreements(1e-6).is_empty(), "{g:?}");
            assert!(g.closed_form.is_nested() && g.oracle.is_nested());
        }
        let csv = grid_csv(&pts);
        assert!(csv.starts_with("alpha,beta,positive,cp,eb\n"));
        assert_eq!(csv.lines().count(), 442);
    }
}
