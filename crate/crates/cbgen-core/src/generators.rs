//! The five generation algorithms, each split into a pure parameter
//! derivation (run once per spec, auditable) and a sampling step that
//! consumes a [`RandomStream`] (run once per row).
//!
//! Constructions, with all auxiliary variables independent Bernoulli draws:
//!
//! * `alg1` (exchangeable): `X_i = (1-U_i) Y_i + U_i Z` — one shared
//!   coordinate `Z ~ Bern(gamma)` mixed into every position.
//! * `alg2` (decaying-product): `X_i = (1-U_i) Y_i + U_i X_{i-1}` — a
//!   Markov copy chain.
//! * `alg3` (1-dependent, method I): `X_i = U_i Y_i Y_{i-1}` — adjacent
//!   coordinates share one factor.
//! * `alg4` (1-dependent, method II): `W_i = (1-U_i) Y_i + U_i Y_{i-1}`,
//!   `X_i = A_i W_i` — a moving average over an equal-rate chain, thinned
//!   per coordinate to hit unequal marginals.
//! * `alg5` (K-dependent / general): `X_i = U_i * prod_l Y_{l,i} * prod_l
//!   Y_{l,i-l}` — banded products; with `K = m-1` it serves any
//!   non-negative correlation matrix.
//!
//! Draw counts per row are fixed by construction: `2m+1`, `2m-1`, `2m`,
//! `3m-1`, and `(K+1)m` respectively, independent of outcomes.

use alloc::format;
use alloc::vec::Vec;
use libm::sqrt;

use crate::constraints::{
    check_prentice, rho_max_alg3_equal, rho_max_alg4_equal, FeasibilityReport, Verdict, Violation,
    ViolationSite,
};
use crate::stream::RandomStream;
use crate::types::{
    spec_digest, AlgorithmId, CorrelationSpec, DecayingParams, DerivedParams, Error,
    ExchangeableParams, KDepParams, MarginalVector, OneDepM1Params, OneDepM2Params, SampleMatrix,
};
use crate::EPS_CLAMP;

/// One derivation bound to its inputs; `n` rows sampled from the same plan
/// share the derivation work.
#[derive(Debug, Clone)]
pub struct GenerationPlan {
    algorithm: AlgorithmId,
    params: DerivedParams,
    p: MarginalVector,
    spec: CorrelationSpec,
}

impl GenerationPlan {
    /// Derives parameters for `spec`, using `algorithm` when forced or the
    /// structure's natural algorithm otherwise (1-dependent specs go through
    /// [`dispatch_one_dep`]). Fails before any sampling if the inputs are
    /// infeasible.
    pub fn new(
        p: &MarginalVector,
        spec: &CorrelationSpec,
        algorithm: Option<AlgorithmId>,
    ) -> Result<Self, Error> {
        spec.validate_dims(p.len())?;
        let alg = match algorithm {
            Some(a) => a,
            None => match spec {
                CorrelationSpec::Exchangeable { .. } => AlgorithmId::Alg1,
                CorrelationSpec::DecayingProduct { .. } => AlgorithmId::Alg2,
                CorrelationSpec::OneDependent { rho } => {
                    return dispatch_one_dep(p, rho);
                }
                CorrelationSpec::KDependent { .. } | CorrelationSpec::General { .. } => {
                    AlgorithmId::Alg5
                }
            },
        };
        let params = derive(p, spec, alg)?;
        Ok(GenerationPlan {
            algorithm: alg,
            params,
            p: p.clone(),
            spec: spec.clone(),
        })
    }

    pub fn algorithm(&self) -> AlgorithmId {
        self.algorithm
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn marginals(&self) -> &MarginalVector {
        &self.p
    }

    pub fn spec(&self) -> &CorrelationSpec {
        &self.spec
    }

    /// Test-support constructor for assembling a plan from raw parts.
    /// Skips derivation; the caller owns parameter validity.
    pub fn from_raw_parts(
        params: DerivedParams,
        p: MarginalVector,
        spec: CorrelationSpec,
    ) -> Self {
        GenerationPlan {
            algorithm: params.algorithm(),
            params,
            p,
            spec,
        }
    }

    /// Exact number of Bernoulli draws one row consumes.
    pub fn draws_per_row(&self) -> u64 {
        let m = self.p.len() as u64;
        match &self.params {
            DerivedParams::Exchangeable(_) => 2 * m + 1,
            DerivedParams::Decaying(_) => 2 * m - 1,
            DerivedParams::OneDepM1(_) => 2 * m,
            DerivedParams::OneDepM2(_) => 3 * m - 1,
            DerivedParams::KDep(kd) => (kd.k as u64 + 1) * m,
        }
    }

    /// Samples one row into `out` (length `m`), consuming exactly
    /// [`draws_per_row`](Self::draws_per_row) draws from `stream`.
    pub fn sample_row_into(&self, stream: &mut RandomStream, out: &mut [u8]) {
        assert_eq!(out.len(), self.p.len());
        match &self.params {
            DerivedParams::Exchangeable(params) => sample_exchangeable_into(params, stream, out),
            DerivedParams::Decaying(params) => {
                sample_decaying_into(params, self.p.get(0), stream, out)
            }
            DerivedParams::OneDepM1(params) => sample_one_dep_m1_into(params, stream, out),
            DerivedParams::OneDepM2(params) => sample_one_dep_m2_into(params, stream, out),
            DerivedParams::KDep(params) => sample_k_dep_into(params, stream, out),
        }
    }
}

/// Clamps a derived probability to `[0, 1]`, treating up to `EPS_CLAMP`
/// of overshoot as rounding noise. Beyond that the value is a genuine
/// feasibility failure.
fn clamp_param(value: f64, name: &'static str, index: usize) -> Result<f64, Violation> {
    if (-EPS_CLAMP..=1.0 + EPS_CLAMP).contains(&value) {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Violation {
            site: ViolationSite::Param { name, index },
            supplied: value,
            admissible: (0.0, 1.0),
        })
    }
}

fn inapplicable(alg: AlgorithmId, violation: Violation) -> Error {
    Error::Infeasible(FeasibilityReport {
        verdict: Verdict::AlgorithmInapplicable,
        notes: format!("derived parameter escaped [0, 1]: {violation}"),
        violations: alloc::vec![violation],
        checked_algorithm: Some(alg),
    })
}

fn require_prentice(
    p: &MarginalVector,
    spec: &CorrelationSpec,
    alg: AlgorithmId,
) -> Result<(), Error> {
    let mut report = check_prentice(p, spec);
    if report.is_feasible() {
        Ok(())
    } else {
        report.checked_algorithm = Some(alg);
        Err(Error::Infeasible(report))
    }
}

/// Runs the derivation step of `alg` against `spec`. Structures and
/// algorithms must match: the banded construction (`alg5`) additionally
/// accepts 1-dependent and general specs.
pub fn derive(
    p: &MarginalVector,
    spec: &CorrelationSpec,
    alg: AlgorithmId,
) -> Result<DerivedParams, Error> {
    spec.validate_dims(p.len())?;
    match (alg, spec) {
        (AlgorithmId::Alg1, CorrelationSpec::Exchangeable { rho }) => {
            derive_exchangeable(p, *rho).map(DerivedParams::Exchangeable)
        }
        (AlgorithmId::Alg2, CorrelationSpec::DecayingProduct { rho }) => {
            derive_decaying(p, rho).map(DerivedParams::Decaying)
        }
        (AlgorithmId::Alg3, CorrelationSpec::OneDependent { rho }) => {
            derive_one_dep_m1(p, rho).map(DerivedParams::OneDepM1)
        }
        (AlgorithmId::Alg4, CorrelationSpec::OneDependent { rho }) => {
            derive_one_dep_m2(p, rho).map(DerivedParams::OneDepM2)
        }
        (
            AlgorithmId::Alg5,
            CorrelationSpec::KDependent { .. }
            | CorrelationSpec::General { .. }
            | CorrelationSpec::OneDependent { .. },
        ) => derive_k_dep(p, spec).map(DerivedParams::KDep),
        _ => Err(Error::AlgorithmMismatch { algorithm: alg }),
    }
}

/// Derivation for the exchangeable structure:
/// `gamma = sqrt(p_min p_max) / (sqrt(p_min p_max) + sqrt((1-p_min)(1-p_max)))`,
/// `alpha_i = sqrt(rho p_i (1-p_i) / (gamma (1-gamma)))`,
/// `beta_i = (p_i - alpha_i gamma) / (1 - alpha_i)`.
///
/// When the pairwise bounds hold, every output lies in `[0, 1]`. The
/// `alpha_i = 1` boundary makes the mixand irrelevant; `beta_i` is set to 0
/// there, the pointwise limit of the construction.
pub fn derive_exchangeable(p: &MarginalVector, rho: f64) -> Result<ExchangeableParams, Error> {
    let spec = CorrelationSpec::Exchangeable { rho };
    require_prentice(p, &spec, AlgorithmId::Alg1)?;
    let (p_min, p_max) = (p.p_min(), p.p_max());
    let s = sqrt(p_min * p_max);
    let gamma = s / (s + sqrt((1.0 - p_min) * (1.0 - p_max)));
    let gv = gamma * (1.0 - gamma);
    let m = p.len();
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    for i in 0..m {
        let pi = p.get(i);
        let a = sqrt(rho * pi * (1.0 - pi) / gv);
        let a = clamp_param(a, "alpha", i + 1).map_err(|v| inapplicable(AlgorithmId::Alg1, v))?;
        let b = if (1.0 - a).abs() <= EPS_CLAMP {
            0.0
        } else {
            (pi - a * gamma) / (1.0 - a)
        };
        let b = clamp_param(b, "beta", i + 1).map_err(|v| inapplicable(AlgorithmId::Alg1, v))?;
        alpha.push(a);
        beta.push(b);
    }
    Ok(ExchangeableParams { gamma, alpha, beta })
}

fn sample_exchangeable_into(params: &ExchangeableParams, stream: &mut RandomStream, out: &mut [u8]) {
    let z = stream.bernoulli(params.gamma);
    for (i, slot) in out.iter_mut().enumerate() {
        let u = stream.bernoulli(params.alpha[i]);
        let y = stream.bernoulli(params.beta[i]);
        *slot = if u == 1 { z } else { y };
    }
}

/// Derivation for the decaying-product structure:
/// `alpha_i = rho_{i-1} sqrt(p_i (1-p_i) / (p_{i-1} (1-p_{i-1})))`,
/// `beta_i = (p_i - alpha_i p_{i-1}) / (1 - alpha_i)`, for `i = 2..=m`.
pub fn derive_decaying(p: &MarginalVector, rho: &[f64]) -> Result<DecayingParams, Error> {
    let spec = CorrelationSpec::DecayingProduct { rho: rho.to_vec() };
    require_prentice(p, &spec, AlgorithmId::Alg2)?;
    let m = p.len();
    let mut alpha = Vec::with_capacity(m - 1);
    let mut beta = Vec::with_capacity(m - 1);
    for i in 1..m {
        let (prev, pi) = (p.get(i - 1), p.get(i));
        let a = rho[i - 1] * sqrt(pi * (1.0 - pi) / (prev * (1.0 - prev)));
        let a = clamp_param(a, "alpha", i + 1).map_err(|v| inapplicable(AlgorithmId::Alg2, v))?;
        let b = if (1.0 - a).abs() <= EPS_CLAMP {
            0.0
        } else {
            (pi - a * prev) / (1.0 - a)
        };
        let b = clamp_param(b, "beta", i + 1).map_err(|v| inapplicable(AlgorithmId::Alg2, v))?;
        alpha.push(a);
        beta.push(b);
    }
    Ok(DecayingParams { alpha, beta })
}

fn sample_decaying_into(
    params: &DecayingParams,
    p1: f64,
    stream: &mut RandomStream,
    out: &mut [u8],
) {
    let mut prev = stream.bernoulli(p1);
    out[0] = prev;
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let u = stream.bernoulli(params.alpha[i - 1]);
        let y = stream.bernoulli(params.beta[i - 1]);
        let x = if u == 1 { prev } else { y };
        *slot = x;
        prev = x;
    }
}

/// Derivation for the 1-dependent product construction (method I):
/// `beta_i = sqrt(p_i p_{i+1}) / (sqrt(p_i p_{i+1}) + rho_i sqrt((1-p_i)(1-p_{i+1})))`
/// for `i = 1..=m-1` with `beta_0 = 1`, `alpha_i = p_i / (beta_i beta_{i-1})`,
/// and the tail `alpha_m = beta_m = sqrt(p_m / beta_{m-1})`.
///
/// Inapplicable as soon as any `alpha_i` (or the tail root) exceeds 1.
pub fn derive_one_dep_m1(p: &MarginalVector, rho: &[f64]) -> Result<OneDepM1Params, Error> {
    let spec = CorrelationSpec::OneDependent { rho: rho.to_vec() };
    require_prentice(p, &spec, AlgorithmId::Alg3)?;
    let m = p.len();
    let mut beta = Vec::with_capacity(m + 1);
    beta.push(1.0);
    let mut alpha = Vec::with_capacity(m);
    if m == 1 {
        // no pairs: the single coordinate splits as U Y with equal rates
        let root = sqrt(p.get(0));
        alpha.push(root);
        beta.push(root);
        return Ok(OneDepM1Params { alpha, beta });
    }
    for i in 1..m {
        let (pi, pn) = (p.get(i - 1), p.get(i));
        let s = sqrt(pi * pn);
        let b = s / (s + rho[i - 1] * sqrt((1.0 - pi) * (1.0 - pn)));
        beta.push(b);
        let a = pi / (b * beta[i - 1]);
        let a = clamp_param(a, "alpha", i).map_err(|v| inapplicable(AlgorithmId::Alg3, v))?;
        alpha.push(a);
    }
    let tail = sqrt(p.get(m - 1) / beta[m - 1]);
    let tail = clamp_param(tail, "alpha", m).map_err(|v| inapplicable(AlgorithmId::Alg3, v))?;
    alpha.push(tail);
    beta.push(tail);
    Ok(OneDepM1Params { alpha, beta })
}

fn sample_one_dep_m1_into(params: &OneDepM1Params, stream: &mut RandomStream, out: &mut [u8]) {
    let mut y_prev = 1u8;
    for (i, slot) in out.iter_mut().enumerate() {
        let u = stream.bernoulli(params.alpha[i]);
        let y = stream.bernoulli(params.beta[i + 1]);
        *slot = u & y & y_prev;
        y_prev = y;
    }
}

/// Derivation for the thinned moving-average construction (method II):
/// `alpha_i = p_i / p_max`,
/// `rho'_i = rho_i sqrt((1-p_i)(1-p_{i+1})) / (sqrt(alpha_i alpha_{i+1}) (1-p_max))`,
/// and the mixing recursion `r_1 = 0`, `r_i = rho'_{i-1} / (1 - r_{i-1})`.
///
/// Inapplicable as soon as some `r_i` exceeds 1, or a predecessor hits 1
/// exactly with entries still to compute.
pub fn derive_one_dep_m2(p: &MarginalVector, rho: &[f64]) -> Result<OneDepM2Params, Error> {
    let spec = CorrelationSpec::OneDependent { rho: rho.to_vec() };
    require_prentice(p, &spec, AlgorithmId::Alg4)?;
    let m = p.len();
    let p_max = p.p_max();
    let alpha: Vec<f64> = p.values().iter().map(|&pi| pi / p_max).collect();
    let mut rho_prime = Vec::with_capacity(m.saturating_sub(1));
    for i in 0..m.saturating_sub(1) {
        let (pi, pn) = (p.get(i), p.get(i + 1));
        rho_prime.push(
            rho[i] * sqrt((1.0 - pi) * (1.0 - pn)) / (sqrt(alpha[i] * alpha[i + 1]) * (1.0 - p_max)),
        );
    }
    let mut r = Vec::with_capacity(m);
    r.push(0.0);
    for i in 2..=m {
        let denom = 1.0 - r[i - 2];
        if denom <= 0.0 {
            return Err(inapplicable(
                AlgorithmId::Alg4,
                Violation {
                    site: ViolationSite::Param { name: "r", index: i },
                    supplied: f64::INFINITY,
                    admissible: (0.0, 1.0),
                },
            ));
        }
        let ri = rho_prime[i - 2] / denom;
        let ri = clamp_param(ri, "r", i).map_err(|v| inapplicable(AlgorithmId::Alg4, v))?;
        r.push(ri);
    }
    Ok(OneDepM2Params { alpha, rho_prime, r, p_max })
}

fn sample_one_dep_m2_into(params: &OneDepM2Params, stream: &mut RandomStream, out: &mut [u8]) {
    let m = out.len();
    let mut y_prev = stream.bernoulli(params.p_max);
    out[0] = y_prev;
    for (i, slot) in out.iter_mut().enumerate().take(m).skip(1) {
        let u = stream.bernoulli(params.r[i]);
        let y = stream.bernoulli(params.p_max);
        *slot = if u == 1 { y_prev } else { y };
        y_prev = y;
    }
    for (i, slot) in out.iter_mut().enumerate() {
        let a = stream.bernoulli(params.alpha[i]);
        *slot &= a;
    }
}

/// Picks the 1-dependent algorithm the way the batch front door does: the
/// moving-average recursion is derived first, and only if some `r_i` escapes
/// `[0, 1]` does the product construction get its turn.
///
/// When both fail, the error carries both offending indices plus the
/// maximal equal-correlation hints for the two algorithms.
pub fn dispatch_one_dep(p: &MarginalVector, rho: &[f64]) -> Result<GenerationPlan, Error> {
    let spec = CorrelationSpec::OneDependent { rho: rho.to_vec() };
    spec.validate_dims(p.len())?;
    let m2_err = match derive_one_dep_m2(p, rho) {
        Ok(params) => {
            return Ok(GenerationPlan {
                algorithm: AlgorithmId::Alg4,
                params: DerivedParams::OneDepM2(params),
                p: p.clone(),
                spec,
            })
        }
        Err(Error::Infeasible(rep)) if rep.verdict == Verdict::AlgorithmInapplicable => rep,
        Err(e) => return Err(e),
    };
    let m1_err = match derive_one_dep_m1(p, rho) {
        Ok(params) => {
            return Ok(GenerationPlan {
                algorithm: AlgorithmId::Alg3,
                params: DerivedParams::OneDepM1(params),
                p: p.clone(),
                spec,
            })
        }
        Err(Error::Infeasible(rep)) => rep,
        Err(e) => return Err(e),
    };
    let mut violations = m2_err.violations;
    violations.extend(m1_err.violations);
    Err(Error::Infeasible(FeasibilityReport {
        verdict: Verdict::AlgorithmInapplicable,
        violations,
        checked_algorithm: None,
        notes: format!(
            "both 1-dependent constructions fail; max equal rho: {} (alg3), {} (alg4 at m={})",
            rho_max_alg3_equal(p),
            rho_max_alg4_equal(p.len().max(2)),
            p.len()
        ),
    }))
}

/// Derivation for the banded product construction. A general matrix is read
/// as `K = m - 1` bands; a 1-dependent vector as `K = 1`. Marginals beyond
/// `m` pad with `p_m` and correlations beyond each band's real entries pad
/// with zero, so the padded factors are exactly 1 and drop out of every
/// observable moment.
///
/// `beta_{ij} = p_j p_{i+j} / (p_j p_{i+j} + rho_{ij} sqrt(p_j p_{i+j} (1-p_j)(1-p_{i+j})))`,
/// `alpha_i = p_i / (prod_{l<=K} beta_{li} * prod_{l<=K'_i} beta_{l,i-l})`
/// with `K'_i = min(i-1, K)`.
pub fn derive_k_dep(p: &MarginalVector, spec: &CorrelationSpec) -> Result<KDepParams, Error> {
    require_prentice(p, spec, AlgorithmId::Alg5)?;
    let m = p.len();
    // padded band matrix, row-major: rho_band[(l-1)*m + (j-1)] for band l,
    // start coordinate j; entries past each band's real length are zero
    let (k, rho_band): (usize, Vec<f64>) = match spec {
        CorrelationSpec::KDependent { k, bands } => {
            let mut out = alloc::vec![0.0; k * m];
            for (l, band) in bands.iter().enumerate() {
                out[l * m..l * m + band.len()].copy_from_slice(band);
            }
            (*k, out)
        }
        CorrelationSpec::General { r } => {
            let k = m - 1;
            let mut out = alloc::vec![0.0; k * m];
            for l in 1..=k {
                for j in 1..=(m - l) {
                    out[(l - 1) * m + (j - 1)] = r.get(j - 1, l + j - 1);
                }
            }
            (k, out)
        }
        CorrelationSpec::OneDependent { rho } => {
            let mut out = alloc::vec![0.0; m];
            out[..rho.len()].copy_from_slice(rho);
            (1, out)
        }
        _ => return Err(Error::AlgorithmMismatch { algorithm: AlgorithmId::Alg5 }),
    };
    let pad = |j: usize| -> f64 {
        if j <= m {
            p.get(j - 1)
        } else {
            p.get(m - 1)
        }
    };

    let mut beta = Vec::with_capacity(k * m);
    for l in 1..=k {
        for j in 1..=m {
            let (pj, pij) = (pad(j), pad(l + j));
            let rho_lj = rho_band[(l - 1) * m + (j - 1)];
            let prod = pj * pij;
            beta.push(prod / (prod + rho_lj * sqrt(prod * (1.0 - pj) * (1.0 - pij))));
        }
    }
    let beta_at = |l: usize, j: usize| beta[(l - 1) * m + (j - 1)];

    let mut alpha = Vec::with_capacity(m);
    let mut k_prime = Vec::with_capacity(m);
    for i in 1..=m {
        let kp = (i - 1).min(k);
        k_prime.push(kp);
        let mut denom = 1.0;
        for l in 1..=k {
            denom *= beta_at(l, i);
        }
        for l in 1..=kp {
            denom *= beta_at(l, i - l);
        }
        let a =
            clamp_param(p.get(i - 1) / denom, "alpha", i).map_err(|v| inapplicable(AlgorithmId::Alg5, v))?;
        alpha.push(a);
    }
    Ok(KDepParams { k, alpha, beta, k_prime })
}

fn sample_k_dep_into(params: &KDepParams, stream: &mut RandomStream, out: &mut [u8]) {
    let m = out.len();
    let k = params.k;
    // col[i]  accumulates prod_{l<=K} Y_{l,i+1};
    // diag[i] accumulates prod_{l<=K'} Y_{l,i+1-l}.
    let mut col = alloc::vec![1u8; m];
    let mut diag = alloc::vec![1u8; m];
    for l in 1..=k {
        for j in 1..=m {
            let y = stream.bernoulli(params.beta[(l - 1) * m + (j - 1)]);
            col[j - 1] &= y;
            if j + l <= m {
                diag[j + l - 1] &= y;
            }
        }
    }
    for i in 0..m {
        let u = stream.bernoulli(params.alpha[i]);
        out[i] = u & col[i] & diag[i];
    }
}

/// Samples one row from an exchangeable plan. Panics if the plan holds a
/// different construction.
pub fn sample_exchangeable(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    assert_eq!(plan.algorithm(), AlgorithmId::Alg1);
    sample_row(plan, stream)
}

/// Samples one row from a decaying-product plan.
pub fn sample_decaying(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    assert_eq!(plan.algorithm(), AlgorithmId::Alg2);
    sample_row(plan, stream)
}

/// Samples one row from a method-I 1-dependent plan.
pub fn sample_one_dep_m1(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    assert_eq!(plan.algorithm(), AlgorithmId::Alg3);
    sample_row(plan, stream)
}

/// Samples one row from a method-II 1-dependent plan.
pub fn sample_one_dep_m2(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    assert_eq!(plan.algorithm(), AlgorithmId::Alg4);
    sample_row(plan, stream)
}

/// Samples one row from a banded plan.
pub fn sample_k_dep(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    assert_eq!(plan.algorithm(), AlgorithmId::Alg5);
    sample_row(plan, stream)
}

/// Samples one row from any plan.
pub fn sample_row(plan: &GenerationPlan, stream: &mut RandomStream) -> Vec<u8> {
    let mut out = alloc::vec![0u8; plan.marginals().len()];
    plan.sample_row_into(stream, &mut out);
    out
}

/// Batch generation: one derivation, then `n` independent rows, row `r`
/// drawn from the child stream `stream.child(r)`. Output depends only on
/// the stream's seed, so rows may be produced in any order (or in parallel)
/// with byte-identical results.
pub fn generate(
    p: &MarginalVector,
    spec: &CorrelationSpec,
    algorithm: Option<AlgorithmId>,
    n: usize,
    stream: &RandomStream,
) -> Result<SampleMatrix, Error> {
    if n == 0 {
        return Err(Error::NotEnoughSamples { n });
    }
    let plan = GenerationPlan::new(p, spec, algorithm)?;
    let m = p.len();
    let mut data = alloc::vec![0u8; n * m];
    for (row, chunk) in data.chunks_exact_mut(m).enumerate() {
        let mut child = stream.child(row as u64);
        plan.sample_row_into(&mut child, chunk);
    }
    let digest = spec_digest(p, spec, plan.algorithm());
    Ok(SampleMatrix::from_parts(
        data,
        n,
        m,
        stream.seed(),
        digest,
        plan.algorithm(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::new_stream;
    use crate::types::SquareMatrix;
    use alloc::vec;

    fn mv(p: &[f64]) -> MarginalVector {
        MarginalVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn exchangeable_worked_example() {
        // p = (0.1, 0.2, 0.3), rho = 0.3
        let params = derive_exchangeable(&mv(&[0.1, 0.2, 0.3]), 0.3).unwrap();
        assert!((params.gamma - 0.179128784747792).abs() < 1e-15);
        assert!((params.alpha[0] - 0.4285107079177596).abs() < 1e-15);
        assert!((params.alpha[1] - 0.5713476105570128).abs() < 1e-15);
        assert!((params.beta[0] - 0.040668124427309674).abs() < 1e-15);
        assert!((params.beta[2] - 0.5290348077850693).abs() < 1e-15);
    }

    #[test]
    fn exchangeable_independence_and_symmetry() {
        let params = derive_exchangeable(&mv(&[0.1, 0.2, 0.3]), 0.0).unwrap();
        assert!(params.alpha.iter().all(|&a| a == 0.0));
        assert_eq!(params.beta, vec![0.1, 0.2, 0.3]);

        let params = derive_exchangeable(&mv(&[0.5, 0.5]), 0.49).unwrap();
        assert!((params.gamma - 0.5).abs() < 1e-15);
        for a in &params.alpha {
            assert!((a - 0.7).abs() < 1e-12);
        }
        for b in &params.beta {
            assert!((b - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn decaying_worked_example() {
        let params = derive_decaying(&mv(&[0.1, 0.2, 0.3]), &[0.2, 0.5]).unwrap();
        assert!((params.alpha[0] - 4.0 / 15.0).abs() < 1e-15);
        assert!((params.beta[0] - 0.23636363636363636).abs() < 1e-15);
        assert!((params.alpha[1] - 0.57282196186948).abs() < 1e-15);
        assert!((params.beta[1] - 0.43409443153406213).abs() < 1e-15);

        // equal marginals, equal rho: alpha = rho, beta = p
        let params = derive_decaying(&mv(&[0.4; 5]), &[0.3; 4]).unwrap();
        for (a, b) in params.alpha.iter().zip(&params.beta) {
            assert!((a - 0.3).abs() < 1e-15);
            assert!((b - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn one_dep_m1_worked_example() {
        let params = derive_one_dep_m1(&mv(&[0.80, 0.82, 0.83]), &[0.3, 0.5]).unwrap();
        assert_eq!(params.beta[0], 1.0);
        assert!((params.beta[1] - 0.934336518001231).abs() < 1e-15);
        assert!((params.beta[2] - 0.9041433918267308).abs() < 1e-15);
        assert!((params.alpha[0] - 0.8562225542798981).abs() < 1e-15);
        assert!((params.alpha[1] - 0.9706735967662566).abs() < 1e-15);
        assert!((params.alpha[2] - 0.9581210680604103).abs() < 1e-15);
        assert_eq!(params.alpha[2], params.beta[3]);
    }

    #[test]
    fn one_dep_m1_zero_rho_and_bound() {
        let params = derive_one_dep_m1(&mv(&[0.3, 0.5, 0.7]), &[0.0, 0.0]).unwrap();
        assert_eq!(&params.beta[..3], &[1.0, 1.0, 1.0]);
        assert_eq!(&params.alpha[..2], &[0.3, 0.5]);
        assert!((params.alpha[2] - sqrt(0.7)).abs() < 1e-15);

        // rho = 0.4 > sqrt(0.25)/(1+sqrt(0.25)) = 1/3
        let err = derive_one_dep_m1(&mv(&[0.25; 4]), &[0.4; 3]);
        assert!(matches!(err, Err(Error::Infeasible(ref r)) if r.verdict == Verdict::AlgorithmInapplicable));
    }

    #[test]
    fn one_dep_m2_worked_example() {
        let params = derive_one_dep_m2(&mv(&[0.80, 0.82, 0.83]), &[0.3, 0.5]).unwrap();
        assert_eq!(params.p_max, 0.83);
        assert!((params.alpha[0] - 0.963855421686747).abs() < 1e-15);
        assert!((params.alpha[1] - 0.9879518072289156).abs() < 1e-15);
        assert_eq!(params.alpha[2], 1.0);
        assert!((params.rho_prime[0] - 0.3431229415611433).abs() < 1e-15);
        assert!((params.rho_prime[1] - 0.5176234180071845).abs() < 1e-15);
        assert_eq!(params.r[0], 0.0);
        assert!((params.r[1] - 0.3431229415611433).abs() < 1e-15);
        assert!((params.r[2] - 0.7880065399716891).abs() < 1e-13);
    }

    #[test]
    fn one_dep_m2_equal_marginals_skip_thinning() {
        // equal marginals make every thinning rate exactly 1
        let params = derive_one_dep_m2(&mv(&[0.4; 5]), &[0.2; 4]).unwrap();
        assert!(params.alpha.iter().all(|&a| a == 1.0));
        assert_eq!(params.p_max, 0.4);
    }

    #[test]
    fn one_dep_m2_matches_r_sequence() {
        // derivation recursion agrees with the closed-form recursion in
        // `constraints`, which is written in terms of p and rho directly
        let p = mv(&[0.6, 0.7, 0.65, 0.72, 0.68]);
        let rho = [0.15, 0.1, 0.12, 0.08];
        let params = derive_one_dep_m2(&p, &rho).unwrap();
        let (r, ok) = crate::constraints::alg4_r_sequence(&p, &rho);
        assert!(ok);
        for (a, b) in params.r.iter().zip(&r) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dispatch_examples() {
        // high dimension, small rho: moving-average wins
        let plan = dispatch_one_dep(&mv(&[0.9; 1000]), &[0.2; 999]).unwrap();
        assert_eq!(plan.algorithm(), AlgorithmId::Alg4);

        // rho = 0.45 > alg4 bound at m = 100 but under sqrt(0.9)/(1+sqrt(0.9))
        let plan = dispatch_one_dep(&mv(&[0.9; 100]), &[0.45; 99]).unwrap();
        assert_eq!(plan.algorithm(), AlgorithmId::Alg3);

        // p = 0.04, rho = 0.24 < (3-sqrt(5))/2: alg4 works where alg3 cannot
        let plan = dispatch_one_dep(&mv(&[0.04; 4]), &[0.24; 3]).unwrap();
        assert_eq!(plan.algorithm(), AlgorithmId::Alg4);
        assert!(derive_one_dep_m1(&mv(&[0.04; 4]), &[0.24; 3]).is_err());

        // both fail: combined report with hints
        let err = dispatch_one_dep(&mv(&[0.25; 6]), &[0.4; 5]);
        match err {
            Err(Error::Infeasible(rep)) => {
                assert_eq!(rep.verdict, Verdict::AlgorithmInapplicable);
                assert!(rep.violations.len() >= 2);
                assert!(rep.notes.contains("alg3"));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn k_dep_worked_example() {
        let mut r = SquareMatrix::identity(3);
        for (i, j, v) in [(0usize, 1usize, 0.3), (1, 2, 0.2), (0, 2, 0.1)] {
            r.set(i, j, v);
            r.set(j, i, v);
        }
        let spec = CorrelationSpec::general(r).unwrap();
        let params = derive_k_dep(&mv(&[0.6, 0.7, 0.8]), &spec).unwrap();
        assert_eq!(params.k, 2);
        assert!((params.beta(1, 1) - 0.8618039272680085).abs() < 1e-15);
        assert!((params.beta(1, 2) - 0.9385570201584528).abs() < 1e-15);
        assert_eq!(params.beta(1, 3), 1.0); // padded
        assert!((params.beta(2, 1) - 0.9607764650620505).abs() < 1e-15);
        assert_eq!(params.beta(2, 2), 1.0);
        assert!((params.alpha[0] - 0.7246368665405524).abs() < 1e-15);
        assert!((params.alpha[1] - 0.8654239477811262).abs() < 1e-15);
        assert!((params.alpha[2] - 0.8871702468290467).abs() < 1e-15);
        assert_eq!(params.k_prime, vec![0, 1, 2]);
    }

    #[test]
    fn k_dep_zero_correlation() {
        let spec = CorrelationSpec::k_dependent(2, vec![vec![0.0, 0.0], vec![0.0]]).unwrap();
        let p = mv(&[0.2, 0.5, 0.8]);
        let params = derive_k_dep(&p, &spec).unwrap();
        assert!(params.beta.iter().all(|&b| b == 1.0));
        assert_eq!(params.alpha, vec![0.2, 0.5, 0.8]);
    }

    #[test]
    fn k_dep_reduces_to_one_dep_betas() {
        // K = 1 band: beta_{1j} equals the method-I bridge beta_j
        let p = mv(&[0.6, 0.65, 0.7, 0.62]);
        let rho = [0.2, 0.25, 0.15];
        let m1 = derive_one_dep_m1(&p, &rho).unwrap();
        let spec = CorrelationSpec::one_dependent(rho.to_vec()).unwrap();
        let kd = derive_k_dep(&p, &spec).unwrap();
        for j in 1..=3 {
            assert!((kd.beta(1, j) - m1.beta[j]).abs() < 1e-12);
        }
        assert_eq!(kd.beta(1, 4), 1.0);
    }

    #[test]
    fn draw_counts_are_exact() {
        let p = mv(&[0.3, 0.4, 0.5, 0.6]);
        let m = p.len() as u64;
        let cases: Vec<(GenerationPlan, u64)> = vec![
            (
                GenerationPlan::new(&p, &CorrelationSpec::exchangeable(0.2).unwrap(), None).unwrap(),
                2 * m + 1,
            ),
            (
                GenerationPlan::new(
                    &p,
                    &CorrelationSpec::decaying_product(vec![0.2; 3]).unwrap(),
                    None,
                )
                .unwrap(),
                2 * m - 1,
            ),
            (
                GenerationPlan::new(
                    &p,
                    &CorrelationSpec::one_dependent(vec![0.05; 3]).unwrap(),
                    Some(AlgorithmId::Alg3),
                )
                .unwrap(),
                2 * m,
            ),
            (
                GenerationPlan::new(
                    &p,
                    &CorrelationSpec::one_dependent(vec![0.05; 3]).unwrap(),
                    Some(AlgorithmId::Alg4),
                )
                .unwrap(),
                3 * m - 1,
            ),
            (
                GenerationPlan::new(
                    &p,
                    &CorrelationSpec::k_dependent(2, vec![vec![0.1; 3], vec![0.05; 2]]).unwrap(),
                    None,
                )
                .unwrap(),
                3 * m,
            ),
        ];
        for (plan, expected) in cases {
            assert_eq!(plan.draws_per_row(), expected, "{}", plan.algorithm());
            let mut stream = new_stream(5);
            let before = stream.draw_count();
            let _ = sample_row(&plan, &mut stream);
            assert_eq!(stream.draw_count() - before, expected, "{}", plan.algorithm());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = mv(&[0.1, 0.2, 0.3]);
        let plan = GenerationPlan::new(&p, &CorrelationSpec::exchangeable(0.3).unwrap(), None).unwrap();
        let a = sample_row(&plan, &mut new_stream(7));
        let b = sample_row(&plan, &mut new_stream(7));
        assert_eq!(a, b);
    }

    #[test]
    fn generate_single_row_equals_child_zero() {
        let p = mv(&[0.1, 0.2, 0.3]);
        let spec = CorrelationSpec::exchangeable(0.3).unwrap();
        let stream = new_stream(42);
        let mat = generate(&p, &spec, None, 1, &stream).unwrap();
        let plan = GenerationPlan::new(&p, &spec, None).unwrap();
        let mut child = stream.child(0);
        assert_eq!(mat.row(0), &sample_row(&plan, &mut child)[..]);
        assert_eq!(mat.algorithm(), AlgorithmId::Alg1);
        assert_eq!(mat.seed(), 42);
    }

    #[test]
    fn generate_rejects_bad_input_before_drawing() {
        let p = mv(&[0.25; 4]);
        let spec = CorrelationSpec::one_dependent(vec![0.4; 3]).unwrap();
        let stream = new_stream(1);
        assert!(matches!(
            generate(&p, &spec, Some(AlgorithmId::Alg3), 10, &stream),
            Err(Error::Infeasible(_))
        ));
        let ex = CorrelationSpec::exchangeable(0.1).unwrap();
        assert!(matches!(
            generate(&p, &ex, None, 0, &stream),
            Err(Error::NotEnoughSamples { n: 0 })
        ));
    }

    #[test]
    fn forced_alg4_does_not_silently_switch() {
        // feasible only under alg3: a forced alg4 request must fail
        let p = mv(&[0.9; 100]);
        let rho = vec![0.45; 99];
        let spec = CorrelationSpec::one_dependent(rho).unwrap();
        assert!(GenerationPlan::new(&p, &spec, Some(AlgorithmId::Alg4)).is_err());
        assert!(GenerationPlan::new(&p, &spec, Some(AlgorithmId::Alg3)).is_ok());
    }
}
