//! Input-sampling helpers for verification runs.
//!
//! The verification protocol draws marginals uniformly from an interval and
//! correlation parameters uniformly below structure-specific caps, then (for
//! the banded generator, whose feasible region has no closed form) shrinks
//! until the derivation accepts. Everything is driven by a [`RandomStream`],
//! so a run is reproducible from its seed.

use cbgen_core::constraints::prentice_upper;
use cbgen_core::generators::derive_k_dep;
use cbgen_core::types::{CorrelationSpec, Error, MarginalVector, SquareMatrix};
use cbgen_core::RandomStream;

/// Marginals drawn i.i.d. from `U(lo, hi)`; the standard protocol uses
/// `U(0.5, 0.8)`, under which every pairwise correlation bound is at least
/// 0.5.
pub fn uniform_marginals(
    lo: f64,
    hi: f64,
    m: usize,
    stream: &mut RandomStream,
) -> Result<MarginalVector, Error> {
    if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
        return Err(Error::InvalidMarginal { index: 0, value: lo });
    }
    MarginalVector::new((0..m).map(|_| lo + (hi - lo) * stream.uniform()).collect())
}

fn min_adjacent_upper(p: &MarginalVector) -> f64 {
    (0..p.len() - 1)
        .map(|l| prentice_upper(p.get(l), p.get(l + 1)).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// Exchangeable correlation drawn from `U(0, min(0.5, pairwise bound))`.
pub fn protocol_exchangeable(p: &MarginalVector, stream: &mut RandomStream) -> CorrelationSpec {
    let cap = if p.len() >= 2 {
        prentice_upper(p.p_min(), p.p_max()).unwrap().min(0.5)
    } else {
        0.5
    };
    CorrelationSpec::Exchangeable { rho: cap * stream.uniform() }
}

/// First-order autoregressive correlations: one coefficient from
/// `U(0, min(0.5, adjacent bounds))` repeated along the minor diagonal.
pub fn protocol_ar1(p: &MarginalVector, stream: &mut RandomStream) -> CorrelationSpec {
    let cap = min_adjacent_upper(p).min(0.5);
    let rho = cap * stream.uniform();
    CorrelationSpec::DecayingProduct { rho: vec![rho; p.len() - 1] }
}

/// 1-dependent correlations from `U(0, min(0.2, adjacent bounds))`; staying
/// below 0.25 keeps the moving-average construction applicable at every
/// dimension.
pub fn protocol_one_dep(p: &MarginalVector, stream: &mut RandomStream) -> CorrelationSpec {
    let cap = min_adjacent_upper(p).min(0.2);
    let rho = cap * stream.uniform();
    CorrelationSpec::OneDependent { rho: vec![rho; p.len() - 1] }
}

/// K-dependent bands: a base coefficient from `U(0, 0.15)` halved per band,
/// shrunk geometrically until the banded derivation accepts.
pub fn protocol_k_dep(p: &MarginalVector, k: usize, stream: &mut RandomStream) -> CorrelationSpec {
    let m = p.len();
    let k = k.min(m - 1).max(1);
    let mut base = (min_adjacent_upper(p).min(0.15)) * stream.uniform();
    loop {
        let bands: Vec<Vec<f64>> = (0..k)
            .map(|l| vec![base * 0.5f64.powi(l as i32); m - 1 - l])
            .collect();
        let spec = CorrelationSpec::k_dependent(k, bands).unwrap();
        if derive_k_dep(p, &spec).is_ok() {
            return spec;
        }
        base *= 0.7;
    }
}

/// General matrix with an autoregressive fill, `r_{ij} = rho^{|i-j|}`; the
/// coefficient starts in `U(0, min(0.5, adjacent bounds))` and shrinks until
/// the banded derivation accepts.
pub fn protocol_general_ar1(p: &MarginalVector, stream: &mut RandomStream) -> CorrelationSpec {
    let m = p.len();
    let mut rho = min_adjacent_upper(p).min(0.5) * stream.uniform();
    loop {
        let mut r = SquareMatrix::identity(m);
        for i in 0..m {
            let mut prod = 1.0;
            for j in (i + 1)..m {
                prod *= rho;
                r.set(i, j, prod);
                r.set(j, i, prod);
            }
        }
        let spec = CorrelationSpec::General { r };
        if derive_k_dep(p, &spec).is_ok() {
            return spec;
        }
        rho *= 0.8;
    }
}
