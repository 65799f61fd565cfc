//! Ground truth for the samplers: an exact small-dimension distribution
//! oracle that enumerates every assignment of the intermediate Bernoulli
//! variables, and empirical moment checks for large-sample runs.
//!
//! The oracle deliberately re-expresses each construction from its derived
//! parameters instead of calling the samplers, so the two routes stay
//! independent: a bug in either surfaces as a mismatch.

use alloc::vec::Vec;
use libm::sqrt;

use crate::generators::GenerationPlan;
use crate::types::{CorrelationSpec, DerivedParams, Error, MarginalVector, SampleMatrix, SquareMatrix};

/// Enumerations stop above 2^24 lattice points to keep the oracle's runtime
/// in seconds; every formula branch of every construction is already covered
/// well below the cap.
pub const ORACLE_DRAW_CAP: u32 = 24;

/// The exact distribution of a plan's output: per-coordinate means, the full
/// correlation matrix, and the joint pmf.
#[derive(Debug, Clone)]
pub struct ExactMoments {
    pub mean: Vec<f64>,
    pub corr: SquareMatrix,
    /// Joint pmf over outcomes, indexed by the packed outcome with
    /// coordinate `i` (0-based) at bit `i`.
    pub pmf: Vec<f64>,
}

impl ExactMoments {
    /// Probability of one outcome, given as 0/1 coordinates.
    pub fn pmf_of(&self, outcome: &[u8]) -> f64 {
        let mut idx = 0usize;
        for (i, &b) in outcome.iter().enumerate() {
            idx |= (b as usize) << i;
        }
        self.pmf[idx]
    }
}

/// Sample-vs-target moment errors: the Euclidean norm of the mean residual
/// and the Frobenius norm of the correlation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentErrors {
    pub mean_l2: f64,
    pub corr_frobenius: f64,
    pub n: usize,
}

/// Replays the bits of one enumeration mask as Bernoulli outcomes while
/// accumulating the assignment's probability.
struct BitCursor {
    mask: u64,
    pos: u32,
    weight: f64,
}

impl BitCursor {
    fn new(mask: u64) -> Self {
        BitCursor { mask, pos: 0, weight: 1.0 }
    }

    #[inline]
    fn draw(&mut self, q: f64) -> u8 {
        let bit = ((self.mask >> self.pos) & 1) as u8;
        self.pos += 1;
        self.weight *= if bit == 1 { q } else { 1.0 - q };
        bit
    }
}

// The eval_* functions mirror the construction definitions, walking draws in
// the same canonical order as the samplers but through independent code.

fn eval_exchangeable(params: &crate::types::ExchangeableParams, cur: &mut BitCursor, m: usize) -> usize {
    let z = cur.draw(params.gamma);
    let mut out = 0usize;
    for i in 0..m {
        let u = cur.draw(params.alpha[i]);
        let y = cur.draw(params.beta[i]);
        let x = (1 - u) * y + u * z;
        out |= (x as usize) << i;
    }
    out
}

fn eval_decaying(params: &crate::types::DecayingParams, p1: f64, cur: &mut BitCursor, m: usize) -> usize {
    let mut prev = cur.draw(p1);
    let mut out = prev as usize;
    for i in 1..m {
        let u = cur.draw(params.alpha[i - 1]);
        let y = cur.draw(params.beta[i - 1]);
        let x = (1 - u) * y + u * prev;
        out |= (x as usize) << i;
        prev = x;
    }
    out
}

fn eval_one_dep_m1(params: &crate::types::OneDepM1Params, cur: &mut BitCursor, m: usize) -> usize {
    let mut y_prev = 1u8;
    let mut out = 0usize;
    for i in 0..m {
        let u = cur.draw(params.alpha[i]);
        let y = cur.draw(params.beta[i + 1]);
        out |= ((u * y * y_prev) as usize) << i;
        y_prev = y;
    }
    out
}

fn eval_one_dep_m2(params: &crate::types::OneDepM2Params, cur: &mut BitCursor, m: usize) -> usize {
    let mut w = [0u8; 64];
    let mut y_prev = cur.draw(params.p_max);
    w[0] = y_prev;
    for (i, wi) in w.iter_mut().enumerate().take(m).skip(1) {
        let u = cur.draw(params.r[i]);
        let y = cur.draw(params.p_max);
        *wi = (1 - u) * y + u * y_prev;
        y_prev = y;
    }
    let mut out = 0usize;
    for (i, &wi) in w.iter().enumerate().take(m) {
        let a = cur.draw(params.alpha[i]);
        out |= ((a * wi) as usize) << i;
    }
    out
}

fn eval_k_dep(params: &crate::types::KDepParams, cur: &mut BitCursor, m: usize) -> usize {
    let k = params.k;
    let mut y = [0u8; 64];
    for l in 1..=k {
        for j in 1..=m {
            y[(l - 1) * m + (j - 1)] = cur.draw(params.beta(l, j));
        }
    }
    let mut out = 0usize;
    for i in 0..m {
        let u = cur.draw(params.alpha[i]);
        let mut x = u;
        for l in 1..=k {
            x &= y[(l - 1) * m + i];
        }
        for l in 1..=params.k_prime[i] {
            x &= y[(l - 1) * m + (i - l)];
        }
        out |= (x as usize) << i;
    }
    out
}

/// Computes a plan's exact output distribution by enumerating every
/// assignment of its intermediate Bernoulli variables. Deterministic and
/// randomness-free; fails with [`Error::SizeTooLarge`] when the lattice
/// exceeds 2^24 points.
pub fn exact_oracle(plan: &GenerationPlan) -> Result<ExactMoments, Error> {
    let draws = plan.draws_per_row() as u32;
    if draws > ORACLE_DRAW_CAP {
        return Err(Error::SizeTooLarge { draws, cap: ORACLE_DRAW_CAP });
    }
    let m = plan.marginals().len();
    let mut pmf = alloc::vec![0.0f64; 1usize << m];
    let p1 = plan.marginals().get(0);
    for mask in 0..(1u64 << draws) {
        let mut cur = BitCursor::new(mask);
        let outcome = match plan.params() {
            DerivedParams::Exchangeable(params) => eval_exchangeable(params, &mut cur, m),
            DerivedParams::Decaying(params) => eval_decaying(params, p1, &mut cur, m),
            DerivedParams::OneDepM1(params) => eval_one_dep_m1(params, &mut cur, m),
            DerivedParams::OneDepM2(params) => eval_one_dep_m2(params, &mut cur, m),
            DerivedParams::KDep(params) => eval_k_dep(params, &mut cur, m),
        };
        debug_assert_eq!(cur.pos, draws);
        pmf[outcome] += cur.weight;
    }

    let mut mean = alloc::vec![0.0f64; m];
    let mut raw11 = SquareMatrix::zeros(m);
    for (outcome, &prob) in pmf.iter().enumerate() {
        if prob == 0.0 {
            continue;
        }
        for (i, mi) in mean.iter_mut().enumerate() {
            if outcome >> i & 1 == 1 {
                *mi += prob;
                for j in (i + 1)..m {
                    if outcome >> j & 1 == 1 {
                        raw11.set(i, j, raw11.get(i, j) + prob);
                    }
                }
            }
        }
    }
    let mut corr = SquareMatrix::identity(m);
    for i in 0..m {
        for j in (i + 1)..m {
            let cov = raw11.get(i, j) - mean[i] * mean[j];
            let denom = sqrt(mean[i] * (1.0 - mean[i]) * mean[j] * (1.0 - mean[j]));
            let r = cov / denom;
            corr.set(i, j, r);
            corr.set(j, i, r);
        }
    }
    Ok(ExactMoments { mean, corr, pmf })
}

/// Sample mean and Pearson correlation of a 0/1 sample matrix.
///
/// Columns are bit-packed so pair counts reduce to word AND + popcount,
/// which keeps the quadratic pair pass fast at n = 10^6. Constant columns
/// have no defined correlation and are reported as an error rather than
/// silently zeroed.
pub fn empirical_moments(samples: &SampleMatrix) -> Result<(Vec<f64>, SquareMatrix), Error> {
    let (n, m) = (samples.n(), samples.m());
    if n < 2 {
        return Err(Error::NotEnoughSamples { n });
    }
    let words = n.div_ceil(64);
    let mut cols = alloc::vec![0u64; m * words];
    for (row, chunk) in samples.data().chunks_exact(m).enumerate() {
        let (w, b) = (row >> 6, row & 63);
        for (j, &v) in chunk.iter().enumerate() {
            cols[j * words + w] |= (v as u64) << b;
        }
    }
    let count = |j: usize| -> u64 {
        cols[j * words..(j + 1) * words]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum()
    };
    let counts: Vec<u64> = (0..m).map(count).collect();
    let degenerate: Vec<usize> = (0..m)
        .filter(|&j| counts[j] == 0 || counts[j] == n as u64)
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::DegenerateColumn { columns: degenerate });
    }

    let nf = n as f64;
    let mean: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let mut corr = SquareMatrix::identity(m);
    for i in 0..m {
        let a = &cols[i * words..(i + 1) * words];
        for j in (i + 1)..m {
            let b = &cols[j * words..(j + 1) * words];
            let c11: u64 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum();
            // Pearson correlation from the 2x2 counts
            let (ci, cj) = (counts[i] as f64, counts[j] as f64);
            let cov = c11 as f64 - ci * cj / nf;
            let denom = sqrt((ci - ci * ci / nf) * (cj - cj * cj / nf));
            let r = cov / denom;
            corr.set(i, j, r);
            corr.set(j, i, r);
        }
    }
    Ok((mean, corr))
}

/// Materializes the target correlation matrix a spec describes at dimension
/// `m`: constant off-diagonal for exchangeable, interval products for
/// decaying-product, bands (zero outside) for the dependent structures, and
/// the matrix itself for general.
pub fn materialize_correlation(spec: &CorrelationSpec, m: usize) -> Result<SquareMatrix, Error> {
    spec.validate_dims(m)?;
    let mut out = SquareMatrix::identity(m);
    match spec {
        CorrelationSpec::Exchangeable { rho } => {
            for i in 0..m {
                for j in (i + 1)..m {
                    out.set(i, j, *rho);
                    out.set(j, i, *rho);
                }
            }
        }
        CorrelationSpec::DecayingProduct { rho } => {
            for i in 0..m {
                let mut prod = 1.0;
                for j in (i + 1)..m {
                    prod *= rho[j - 1];
                    out.set(i, j, prod);
                    out.set(j, i, prod);
                }
            }
        }
        CorrelationSpec::OneDependent { rho } => {
            for (l, &r) in rho.iter().enumerate() {
                out.set(l, l + 1, r);
                out.set(l + 1, l, r);
            }
        }
        CorrelationSpec::KDependent { bands, .. } => {
            for (bi, band) in bands.iter().enumerate() {
                for (l, &r) in band.iter().enumerate() {
                    out.set(l, l + bi + 1, r);
                    out.set(l + bi + 1, l, r);
                }
            }
        }
        CorrelationSpec::General { r } => out = r.clone(),
    }
    Ok(out)
}

/// Residuals of a sample against its target spec: `mean_l2` is the Euclidean
/// distance between the sample mean and `p`; `corr_frobenius` the Frobenius
/// distance between the sample and target correlation matrices.
pub fn moment_errors(
    samples: &SampleMatrix,
    p: &MarginalVector,
    spec: &CorrelationSpec,
) -> Result<MomentErrors, Error> {
    if p.len() != samples.m() {
        return Err(Error::DimensionMismatch { expected: samples.m(), actual: p.len() });
    }
    let (mean, corr) = empirical_moments(samples)?;
    let target = materialize_correlation(spec, samples.m())?;
    let mean_l2 = sqrt(
        mean.iter()
            .zip(p.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum(),
    );
    let corr_frobenius = sqrt(
        corr.as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum(),
    );
    Ok(MomentErrors { mean_l2, corr_frobenius, n: samples.n() })
}
