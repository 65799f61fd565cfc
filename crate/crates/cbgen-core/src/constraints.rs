//! Feasibility mathematics: pairwise marginal/correlation bounds, positive
//! definiteness, per-algorithm applicability conditions, and
//! maximal-correlation solvers.
//!
//! A multivariate binary distribution with marginals `p` and correlation
//! matrix `R` can only exist if `R` is positive definite and every pairwise
//! correlation respects the bound tied to its two marginals (the pairwise
//! admissibility constraints checked by [`check_prentice`]). Those are
//! necessary conditions; the per-algorithm checks in [`check_applicability`]
//! are the operative ones, obtained by running the algorithm's parameter
//! derivation and testing that every intermediate probability lands in
//! `[0, 1]`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use libm::{sin, sqrt};

use crate::generators;
use crate::types::{AlgorithmId, CorrelationSpec, Error, MarginalVector, SquareMatrix};
use crate::EPS_CLAMP;

/// Pivot threshold for the positive-definiteness factorization: pivots at or
/// below this are treated as numerically zero and the matrix is rejected,
/// since strict definiteness is required.
const PD_PIVOT_TOL: f64 = 1e-10;

/// Outcome of a feasibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Feasible,
    PrenticeViolated,
    NotPositiveDefinite,
    AlgorithmInapplicable,
}

/// Where a violation occurred: a correlation entry for a coordinate pair, or
/// a derived algorithm parameter. Indices are 1-based, matching the usual
/// mathematical notation in diagnostics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ViolationSite {
    Pair { i: usize, j: usize },
    Param { name: &'static str, index: usize },
}

/// One constraint violation: the offending value and the interval it was
/// required to lie in.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Violation {
    pub site: ViolationSite,
    pub supplied: f64,
    pub admissible: (f64, f64),
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.site {
            ViolationSite::Pair { i, j } => write!(
                f,
                "r[{},{}] = {} outside [{}, {}]",
                i, j, self.supplied, self.admissible.0, self.admissible.1
            ),
            ViolationSite::Param { name, index } => write!(
                f,
                "{}[{}] = {} outside [{}, {}]",
                name, index, self.supplied, self.admissible.0, self.admissible.1
            ),
        }
    }
}

/// Verdict plus the exact admissible bounds for everything that failed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub checked_algorithm: Option<AlgorithmId>,
    pub notes: String,
}

impl FeasibilityReport {
    pub fn feasible(alg: Option<AlgorithmId>) -> Self {
        FeasibilityReport {
            verdict: Verdict::Feasible,
            violations: Vec::new(),
            checked_algorithm: alg,
            notes: String::new(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

impl core::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.verdict {
            Verdict::Feasible => write!(f, "feasible"),
            Verdict::PrenticeViolated => write!(f, "pairwise marginal/correlation bounds violated"),
            Verdict::NotPositiveDefinite => write!(f, "correlation matrix not positive definite"),
            Verdict::AlgorithmInapplicable => write!(f, "algorithm inapplicable to these inputs"),
        }?;
        if let Some(alg) = self.checked_algorithm {
            write!(f, " (checked {alg})")?;
        }
        for v in self.violations.iter().take(4) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 4 {
            write!(f, "; … {} more", self.violations.len() - 4)?;
        }
        if !self.notes.is_empty() {
            write!(f, "; {}", self.notes)?;
        }
        Ok(())
    }
}

/// Coefficients of the coupled applicability inequality
/// `a·ρ_{i-1}·ρ_i + b1·ρ_{i-1} + b2·ρ_i <= c` that governs the 1-dependent
/// product construction at interior index `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBoundCoeffs {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
}

/// Upper bound on the correlation of a binary pair with marginals
/// `(p_i, p_j)`:
/// `min{ sqrt(p_i(1-p_j)/(p_j(1-p_i))), sqrt(p_j(1-p_i)/(p_i(1-p_j))) }`.
///
/// Symmetric in its arguments, in (0, 1], and equal to 1 exactly when the
/// marginals are equal.
pub fn prentice_upper(p_i: f64, p_j: f64) -> Result<f64, Error> {
    for (index, v) in [p_i, p_j].into_iter().enumerate() {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidMarginal { index, value: v });
        }
    }
    let a = p_i * (1.0 - p_j);
    let b = p_j * (1.0 - p_i);
    Ok(sqrt(a.min(b) / a.max(b)))
}

fn pair_violation(i: usize, j: usize, supplied: f64, upper: f64) -> Violation {
    Violation {
        site: ViolationSite::Pair { i, j },
        supplied,
        admissible: (0.0, upper),
    }
}

/// Checks every specified nonzero correlation against its pairwise bound.
///
/// Violations are data, not errors: the report lists each offending entry
/// with its exact admissible interval. Boundary equality is accepted.
///
/// The check runs in time linear in the number of specified entries. For
/// the exchangeable structure the extremal marginal pair dominates every
/// other pair, so only that one is tested; for the decaying-product
/// structure the adjacent pairs are tested, which is sufficient because a
/// feasible adjacent chain yields a valid distribution whose implied
/// products then satisfy their own pairwise bounds automatically.
pub fn check_prentice(p: &MarginalVector, spec: &CorrelationSpec) -> FeasibilityReport {
    debug_assert!(spec.validate_dims(p.len()).is_ok());
    let mut violations = Vec::new();
    let mut check_pair = |i: usize, j: usize, r: f64| {
        if r == 0.0 {
            return;
        }
        let upper = prentice_upper(p.get(i - 1), p.get(j - 1)).unwrap_or(0.0);
        if r > upper + EPS_CLAMP {
            violations.push(pair_violation(i, j, r, upper));
        }
    };
    match spec {
        CorrelationSpec::Exchangeable { rho } => {
            if p.len() >= 2 && *rho > 0.0 {
                let (mut imin, mut imax) = (0usize, 0usize);
                for (idx, &v) in p.values().iter().enumerate() {
                    if v < p.get(imin) {
                        imin = idx;
                    }
                    if v > p.get(imax) {
                        imax = idx;
                    }
                }
                check_pair(imin.min(imax) + 1, imin.max(imax) + 1, *rho);
            }
        }
        CorrelationSpec::DecayingProduct { rho } | CorrelationSpec::OneDependent { rho } => {
            for (l, &r) in rho.iter().enumerate() {
                check_pair(l + 1, l + 2, r);
            }
        }
        CorrelationSpec::KDependent { bands, .. } => {
            for (bi, band) in bands.iter().enumerate() {
                for (l, &r) in band.iter().enumerate() {
                    check_pair(l + 1, l + 2 + bi, r);
                }
            }
        }
        CorrelationSpec::General { r } => {
            for i in 0..r.dim() {
                for j in (i + 1)..r.dim() {
                    check_pair(i + 1, j + 1, r.get(i, j));
                }
            }
        }
    }
    if violations.is_empty() {
        FeasibilityReport::feasible(None)
    } else {
        FeasibilityReport {
            verdict: Verdict::PrenticeViolated,
            notes: format!("{} correlation entries exceed their pairwise bounds", violations.len()),
            violations,
            checked_algorithm: None,
        }
    }
}

/// The four joint cell probabilities `(P11, P10, P01, P00)` of a binary pair
/// with marginals `(p_i, p_j)` and correlation `r`.
///
/// `P11 = p_i p_j + r sqrt(p_i p_j (1-p_i)(1-p_j))`, the others follow from
/// the marginals. Negative cells are returned as-is; a negative cell is the
/// diagnostic that the pair is not realizable.
pub fn joint_cell_probabilities(p_i: f64, p_j: f64, r: f64) -> (f64, f64, f64, f64) {
    let p11 = p_i * p_j + r * sqrt(p_i * p_j * (1.0 - p_i) * (1.0 - p_j));
    let p10 = p_i - p11;
    let p01 = p_j - p11;
    let p00 = 1.0 - p11 - p10 - p01;
    (p11, p10, p01, p00)
}

/// Tests strict positive definiteness of a symmetric unit-diagonal matrix
/// via an LDLᵀ factorization. Pivots at or below `1e-10` count as zero and
/// fail the test, so semidefinite boundary cases are rejected.
pub fn is_positive_definite(r: &SquareMatrix) -> bool {
    let n = r.dim();
    // l holds the strictly-lower factor, d the pivots.
    let mut l = alloc::vec![0.0f64; n * n];
    let mut d = alloc::vec![0.0f64; n];
    for j in 0..n {
        let mut dj = r.get(j, j);
        for k in 0..j {
            dj -= l[j * n + k] * l[j * n + k] * d[k];
        }
        if dj <= PD_PIVOT_TOL {
            return false;
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut v = r.get(i, j);
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k] * d[k];
            }
            l[i * n + j] = v / dj;
        }
    }
    true
}

/// The open interval of minor-diagonal correlations for which the
/// equal-entry 1-dependent matrix of dimension `m` stays positive definite:
/// `(-1/c_m, 1/c_m)` with `c_m = 2 sin(pi (m-1) / (2 (m+1)))`, capped at the
/// correlation domain (±1). The interval shrinks towards (-0.5, 0.5) as `m`
/// grows.
pub fn pd_bound_1dep_equal(m: usize) -> (f64, f64) {
    debug_assert!(m >= 2);
    let c_m = 2.0 * sin(core::f64::consts::PI * (m as f64 - 1.0) / (2.0 * (m as f64 + 1.0)));
    let bound = (1.0 / c_m).min(1.0);
    (-bound, bound)
}

/// Coefficients of the interior applicability inequality of the 1-dependent
/// product construction at 1-based index `i` in `2..=m-1`.
pub fn alg3_bound_coeffs(p: &MarginalVector, i: usize) -> Result<QuadraticBoundCoeffs, Error> {
    let m = p.len();
    if i < 2 || i + 1 > m {
        return Err(Error::DimensionMismatch { expected: m, actual: i });
    }
    let (pprev, pi, pnext) = (p.get(i - 2), p.get(i - 1), p.get(i));
    Ok(QuadraticBoundCoeffs {
        a: sqrt((1.0 - pprev) * (1.0 - pi) * (1.0 - pnext)),
        b1: sqrt((1.0 - pprev) * pi * pnext),
        b2: sqrt(pprev * pi * (1.0 - pnext)),
        c: sqrt(pprev * (1.0 - pi) * pnext),
    })
}

/// Largest common minor-diagonal correlation the 1-dependent product
/// construction admits under the equal-correlation regime.
///
/// For `m = 2` this is the pairwise bound. For larger `m` it is the minimum
/// over the interior indices of the positive root of
/// `A x^2 + (B1 + B2) x - C = 0`, further capped by the adjacent pairwise
/// bounds so the returned value is always usable end to end. With all
/// marginals equal to `p` it reduces to `sqrt(p) / (1 + sqrt(p))`.
pub fn rho_max_alg3_equal(p: &MarginalVector) -> f64 {
    let m = p.len();
    if m < 2 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..(m - 1) {
        if let Ok(u) = prentice_upper(p.get(i), p.get(i + 1)) {
            best = best.min(u);
        }
    }
    for i in 2..m {
        let q = alg3_bound_coeffs(p, i).expect("interior index");
        let b = q.b1 + q.b2;
        // stable form of (-b + sqrt(b^2 + 4ac)) / (2a)
        let root = 2.0 * q.c / (b + sqrt(b * b + 4.0 * q.a * q.c));
        best = best.min(root);
    }
    best
}

/// The mixing-probability recursion of the thinned moving-average
/// construction: `r_1 = 0` and
/// `r_i = rho_{i-1}/(1 - r_{i-1}) * sqrt((1-p_{i-1})(1-p_i)/(p_{i-1} p_i)) * p_max/(1 - p_max)`.
///
/// Returns the sequence and whether every entry stayed in `[0, 1]`. When an
/// entry escapes (or a predecessor hits 1 exactly, making the next step
/// divide by zero), the offending value is the last one computed and the
/// flag is false.
pub fn alg4_r_sequence(p: &MarginalVector, rho: &[f64]) -> (Vec<f64>, bool) {
    let m = p.len();
    debug_assert_eq!(rho.len(), m.saturating_sub(1));
    let p_max = p.p_max();
    let scale = p_max / (1.0 - p_max);
    let mut r = Vec::with_capacity(m);
    r.push(0.0);
    for i in 2..=m {
        let denom = 1.0 - r[i - 2];
        if denom <= 0.0 {
            r.push(f64::INFINITY);
            return (r, false);
        }
        let (pa, pb) = (p.get(i - 2), p.get(i - 1));
        let ri = rho[i - 2] / denom * sqrt((1.0 - pa) * (1.0 - pb) / (pa * pb)) * scale;
        r.push(ri);
        if ri > 1.0 + EPS_CLAMP {
            return (r, false);
        }
    }
    (r, true)
}

/// Largest common minor-diagonal correlation the thinned moving-average
/// construction admits at dimension `m` under equal marginals and equal
/// correlations, where the recursion is `r_i = rho / (1 - r_{i-1})`.
///
/// Solved by bisection on `[0.25, 0.5]`: below 0.25 the recursion converges
/// for every `m`, and 0.5 is the `m = 3` bound that dominates all larger
/// dimensions. Nonincreasing in `m` and tending to 0.25.
pub fn rho_max_alg4_equal(m: usize) -> f64 {
    debug_assert!(m >= 2);
    let feasible = |rho: f64| -> bool {
        let mut r = 0.0f64;
        for _ in 2..=m {
            let denom = 1.0 - r;
            if denom <= 0.0 {
                return false;
            }
            r = rho / denom;
            if r > 1.0 {
                return false;
            }
        }
        true
    };
    if feasible(0.5) {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.25f64, 0.5f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs the derivation step of the named algorithm and reports whether every
/// derived parameter lies in `[0, 1]` after rounding-noise clamping. The
/// pairwise bound check runs first; its failure yields a
/// `PrenticeViolated` verdict.
///
/// Errors only on structural problems (an algorithm that cannot serve the
/// given structure, dimension mismatches); feasibility outcomes of either
/// kind are reported in the returned value.
pub fn check_applicability(
    p: &MarginalVector,
    spec: &CorrelationSpec,
    alg: AlgorithmId,
) -> Result<FeasibilityReport, Error> {
    spec.validate_dims(p.len())?;
    match generators::derive(p, spec, alg) {
        Ok(_) => Ok(FeasibilityReport::feasible(Some(alg))),
        Err(Error::Infeasible(report)) => Ok(report),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mv(p: &[f64]) -> MarginalVector {
        MarginalVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn prentice_upper_examples() {
        // sqrt(0.06 / 0.36)
        let u = prentice_upper(0.1, 0.4).unwrap();
        assert!((u - 0.408248290463863).abs() < 1e-15);
        assert_eq!(prentice_upper(0.3, 0.3).unwrap(), 1.0);
        assert!((prentice_upper(0.5, 0.8).unwrap() - 0.5).abs() < 1e-15);
        // symmetry
        assert_eq!(
            prentice_upper(0.1, 0.4).unwrap(),
            prentice_upper(0.4, 0.1).unwrap()
        );
        assert!(prentice_upper(0.0, 0.4).is_err());
    }

    #[test]
    fn check_prentice_examples() {
        let p = mv(&[0.1, 0.4]);
        let mut r = SquareMatrix::identity(2);
        r.set(0, 1, 0.9);
        r.set(1, 0, 0.9);
        let spec = CorrelationSpec::general(r).unwrap();
        let rep = check_prentice(&p, &spec);
        assert_eq!(rep.verdict, Verdict::PrenticeViolated);
        assert_eq!(rep.violations.len(), 1);
        let v = &rep.violations[0];
        assert_eq!(v.site, ViolationSite::Pair { i: 1, j: 2 });
        assert!((v.admissible.1 - 0.408248290463863).abs() < 1e-12);

        // all-zero correlations: always feasible
        let spec0 = CorrelationSpec::general(SquareMatrix::identity(2)).unwrap();
        assert!(check_prentice(&p, &spec0).is_feasible());

        let p3 = mv(&[0.1, 0.2, 0.3]);
        let ex = CorrelationSpec::exchangeable(0.3).unwrap();
        assert!(check_prentice(&p3, &ex).is_feasible());
    }

    #[test]
    fn prentice_boundary_equality_accepted() {
        let p = mv(&[0.5, 0.8]);
        let spec = CorrelationSpec::one_dependent(vec![0.5]).unwrap();
        assert!(check_prentice(&p, &spec).is_feasible());
    }

    #[test]
    fn joint_cells_examples() {
        let (p11, p10, p01, p00) = joint_cell_probabilities(0.1, 0.4, 0.9);
        assert!((p11 - 0.1722724461102916).abs() < 1e-15);
        assert!((p10 - (0.1 - 0.1722724461102916)).abs() < 1e-15);
        assert!(p10 < 0.0);
        assert!((p11 + p10 + p01 + p00 - 1.0).abs() < 1e-15);

        let cells = joint_cell_probabilities(0.5, 0.5, 0.0);
        assert_eq!(cells, (0.25, 0.25, 0.25, 0.25));

        let eps = 1e-9;
        let (p11, p10, _, _) = joint_cell_probabilities(0.3, 0.3, 1.0 - eps);
        assert!((p11 - 0.3).abs() < 1e-9);
        assert!(p10.abs() < 1e-9);
    }

    #[test]
    fn pd_identity_and_singular() {
        assert!(is_positive_definite(&SquareMatrix::identity(5)));
        let mut r = SquareMatrix::identity(2);
        r.set(0, 1, 1.0);
        r.set(1, 0, 1.0);
        assert!(!is_positive_definite(&r));
    }

    fn one_dep_equal_matrix(m: usize, rho: f64) -> SquareMatrix {
        let mut r = SquareMatrix::identity(m);
        for i in 0..(m - 1) {
            r.set(i, i + 1, rho);
            r.set(i + 1, i, rho);
        }
        r
    }

    #[test]
    fn pd_one_dep_threshold() {
        // c_5 = 2 sin(pi/3) = sqrt(3)
        let c5 = 3.0f64.sqrt();
        assert!(is_positive_definite(&one_dep_equal_matrix(5, 0.99 / c5)));
        assert!(!is_positive_definite(&one_dep_equal_matrix(5, 1.01 / c5)));
    }

    #[test]
    fn pd_bound_examples() {
        let (lo, hi) = pd_bound_1dep_equal(3);
        assert!((hi - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(lo, -hi);
        // large m: approaches 0.5
        let (_, hi) = pd_bound_1dep_equal(1_000_000);
        assert!((hi - 0.5).abs() < 1e-5);
        // m = 2: 1/c_2 = 1, already the whole correlation domain
        let (_, hi) = pd_bound_1dep_equal(2);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alg3_coeffs_examples() {
        let q = alg3_bound_coeffs(&mv(&[0.5, 0.5, 0.5]), 2).unwrap();
        let v = 0.5f64.powi(3).sqrt();
        for x in [q.a, q.b1, q.b2, q.c] {
            assert!((x - v).abs() < 1e-15);
            assert!(x > 0.0);
        }
        let q = alg3_bound_coeffs(&mv(&[0.8, 0.82, 0.83]), 2).unwrap();
        assert!((q.a - (0.2f64 * 0.18 * 0.17).sqrt()).abs() < 1e-15);
        assert!(alg3_bound_coeffs(&mv(&[0.5, 0.5, 0.5]), 1).is_err());
        assert!(alg3_bound_coeffs(&mv(&[0.5, 0.5, 0.5]), 3).is_err());
    }

    #[test]
    fn rho_max_alg3_special_cases() {
        // all p equal: sqrt(p)/(1+sqrt(p))
        for m in [3usize, 4, 7] {
            let p = mv(&vec![0.25; m]);
            assert!((rho_max_alg3_equal(&p) - 1.0 / 3.0).abs() < 1e-12, "m={m}");
        }
        let p = mv(&[0.01; 5]);
        assert!((rho_max_alg3_equal(&p) - 0.1 / 1.1).abs() < 1e-12);
        // m = 2 falls back to the pairwise bound
        let p = mv(&[0.1, 0.4]);
        assert!((rho_max_alg3_equal(&p) - 0.408248290463863).abs() < 1e-12);
        // monotone in p, approaching 0.5
        let mut last = 0.0;
        for &pv in &[0.1, 0.3, 0.5, 0.7, 0.9, 0.999] {
            let b = rho_max_alg3_equal(&mv(&[pv; 4]));
            assert!(b > last);
            last = b;
        }
        assert!((last - 0.5).abs() < 1e-3);
    }

    #[test]
    fn alg4_r_sequence_examples() {
        // equal p, rho = 0.2: 0, 0.2, 0.25, 0.26667, ... -> (1 - sqrt(0.2))/2
        let m = 40;
        let p = mv(&vec![0.3; m]);
        let (r, ok) = alg4_r_sequence(&p, &vec![0.2; m - 1]);
        assert!(ok);
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 0.2).abs() < 1e-15);
        assert!((r[2] - 0.25).abs() < 1e-15);
        assert!((r[3] - 0.2 / 0.75).abs() < 1e-15);
        assert!((r[m - 1] - 0.276393202250021).abs() < 1e-9);

        // zero correlations: identically zero for any m
        let (r, ok) = alg4_r_sequence(&p, &vec![0.0; m - 1]);
        assert!(ok);
        assert!(r.iter().all(|&v| v == 0.0));

        // rho = 0.5: boundary-feasible at m = 3, infeasible at m = 4
        let p3 = mv(&[0.4; 3]);
        let (r, ok) = alg4_r_sequence(&p3, &[0.5, 0.5]);
        assert!(ok);
        assert_eq!(r[2], 1.0);
        let p4 = mv(&[0.4; 4]);
        let (_, ok) = alg4_r_sequence(&p4, &[0.5, 0.5, 0.5]);
        assert!(!ok);
    }

    #[test]
    fn rho_max_alg4_examples() {
        assert_eq!(rho_max_alg4_equal(3), 0.5);
        assert!((rho_max_alg4_equal(4) - 0.38196601125010515).abs() < 1e-9);
        assert!((rho_max_alg4_equal(10_000) - 0.25).abs() < 1e-6);
        let mut last = 1.0;
        for m in [2usize, 3, 4, 5, 8, 16, 100, 1000] {
            let b = rho_max_alg4_equal(m);
            assert!(b <= last + 1e-15);
            assert!(b >= 0.25);
            last = b;
        }
    }

    #[test]
    fn applicability_routes() {
        let p = mv(&[0.1, 0.2, 0.3]);
        let ex = CorrelationSpec::exchangeable(0.3).unwrap();
        let rep = check_applicability(&p, &ex, AlgorithmId::Alg1).unwrap();
        assert!(rep.is_feasible());

        // equal p = 0.25, rho = 0.4 > 1/3: method-I 1-dependent inapplicable
        let p = mv(&[0.25; 5]);
        let od = CorrelationSpec::one_dependent(vec![0.4; 4]).unwrap();
        let rep = check_applicability(&p, &od, AlgorithmId::Alg3).unwrap();
        assert_eq!(rep.verdict, Verdict::AlgorithmInapplicable);
        assert!(!rep.violations.is_empty());

        // prentice failure dominates
        let p = mv(&[0.1, 0.4]);
        let od = CorrelationSpec::one_dependent(vec![0.9]).unwrap();
        let rep = check_applicability(&p, &od, AlgorithmId::Alg3).unwrap();
        assert_eq!(rep.verdict, Verdict::PrenticeViolated);

        // structure/algorithm mismatch is an error, not a verdict
        let ex = CorrelationSpec::exchangeable(0.3).unwrap();
        assert!(matches!(
            check_applicability(&mv(&[0.2, 0.2]), &ex, AlgorithmId::Alg3),
            Err(Error::AlgorithmMismatch { .. })
        ));
    }
}
