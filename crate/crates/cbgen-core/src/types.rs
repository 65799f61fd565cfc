//! Domain types shared across the crate: marginals, correlation structures,
//! derived Bernoulli parameters, and sample matrices.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use sha2::{Digest, Sha256};

use crate::constraints::FeasibilityReport;

/// Which of the five generation algorithms a derivation or sample refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AlgorithmId {
    /// Shared-mixand construction for the exchangeable structure.
    Alg1,
    /// Markov mixture for the decaying-product structure.
    Alg2,
    /// Product construction for the 1-dependent structure (method I).
    Alg3,
    /// Thinned moving-average construction for the 1-dependent structure
    /// (method II).
    Alg4,
    /// Product construction for K-dependent bands and general matrices.
    Alg5,
}

impl AlgorithmId {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Alg1 => "alg1",
            AlgorithmId::Alg2 => "alg2",
            AlgorithmId::Alg3 => "alg3",
            AlgorithmId::Alg4 => "alg4",
            AlgorithmId::Alg5 => "alg5",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors from validation, feasibility, and verification.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A marginal probability outside the open interval (0, 1). Degenerate
    /// coordinates are trivially simulable by the caller and poison the
    /// correlation definitions, so they are rejected outright.
    InvalidMarginal { index: usize, value: f64 },
    /// Empty marginal vector.
    EmptyMarginals,
    /// A correlation entry outside [0, 1). Only the diagonal may be 1.
    InvalidCorrelation { value: f64 },
    /// Matrix input that is not symmetric within 1e-12.
    AsymmetricMatrix { i: usize, j: usize },
    /// A structure whose implied dimension disagrees with the marginals.
    DimensionMismatch { expected: usize, actual: usize },
    /// Structurally invalid K-dependent band list.
    InvalidBands { band: usize, expected_len: usize, actual_len: usize },
    /// The requested algorithm cannot serve the given structure.
    AlgorithmMismatch { algorithm: AlgorithmId },
    /// The inputs fail a feasibility check; the report says where and why.
    Infeasible(FeasibilityReport),
    /// The exact oracle's intermediate-variable lattice exceeds its cap.
    SizeTooLarge { draws: u32, cap: u32 },
    /// Sample columns with zero variance make correlations undefined.
    DegenerateColumn { columns: Vec<usize> },
    /// Fewer than two samples.
    NotEnoughSamples { n: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMarginal { index, value } => write!(
                f,
                "marginal p[{index}] = {value} must lie strictly inside (0, 1)"
            ),
            Error::EmptyMarginals => write!(f, "marginal vector must have length >= 1"),
            Error::InvalidCorrelation { value } => {
                write!(f, "correlation {value} must lie in [0, 1)")
            }
            Error::AsymmetricMatrix { i, j } => {
                write!(f, "correlation matrix not symmetric at ({i}, {j})")
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidBands { band, expected_len, actual_len } => write!(
                f,
                "band {band} must have length {expected_len}, got {actual_len}"
            ),
            Error::AlgorithmMismatch { algorithm } => write!(
                f,
                "algorithm {algorithm} does not apply to the given correlation structure"
            ),
            Error::Infeasible(report) => write!(f, "{report}"),
            Error::SizeTooLarge { draws, cap } => write!(
                f,
                "exact enumeration needs 2^{draws} lattice points, cap is 2^{cap}"
            ),
            Error::DegenerateColumn { columns } => {
                write!(f, "constant sample columns {columns:?} have undefined correlations")
            }
            Error::NotEnoughSamples { n } => {
                write!(f, "need at least 2 samples, got {n}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// The marginal probabilities `p_1..p_m` of the target binary coordinates.
///
/// Every entry lies strictly inside (0, 1) and the vector is non-empty;
/// construction enforces both.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector {
    p: Vec<f64>,
}

impl MarginalVector {
    pub fn new(p: Vec<f64>) -> Result<Self, Error> {
        if p.is_empty() {
            return Err(Error::EmptyMarginals);
        }
        for (index, &value) in p.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidMarginal { index, value });
            }
        }
        Ok(MarginalVector { p })
    }

    /// Dimension `m`.
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// `p_i` with 0-based index.
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn p_min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn p_max(&self) -> f64 {
        self.p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A dense square matrix of `f64`, row-major. Small helper for correlation
/// matrices; nothing here is tuned for large dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: alloc::vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major data; `data.len()` must be a perfect square
    /// matching `n * n`.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self, Error> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: data.len() });
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// The target correlation structure.
///
/// All off-diagonal correlations are non-negative and strictly below 1;
/// entries exactly 0 are permitted everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationSpec {
    /// Every pair has the same correlation `rho`.
    Exchangeable { rho: f64 },
    /// Minor-diagonal correlations `rho_1..rho_{m-1}`; the correlation of a
    /// pair is the product of the minor-diagonal entries between them.
    DecayingProduct { rho: Vec<f64> },
    /// Minor-diagonal correlations `rho_1..rho_{m-1}`, zero beyond the first
    /// off-diagonal.
    OneDependent { rho: Vec<f64> },
    /// `k` stationary bands; band `i` (1-based) holds the `m - i`
    /// correlations on the `i`-th off-diagonal, zero beyond band `k`.
    KDependent { k: usize, bands: Vec<Vec<f64>> },
    /// An explicit symmetric correlation matrix.
    General { r: SquareMatrix },
}

fn check_corr_entry(value: f64) -> Result<(), Error> {
    if !(0.0..1.0).contains(&value) {
        return Err(Error::InvalidCorrelation { value });
    }
    Ok(())
}

impl CorrelationSpec {
    pub fn exchangeable(rho: f64) -> Result<Self, Error> {
        check_corr_entry(rho)?;
        Ok(CorrelationSpec::Exchangeable { rho })
    }

    pub fn decaying_product(rho: Vec<f64>) -> Result<Self, Error> {
        for &v in &rho {
            check_corr_entry(v)?;
        }
        Ok(CorrelationSpec::DecayingProduct { rho })
    }

    pub fn one_dependent(rho: Vec<f64>) -> Result<Self, Error> {
        for &v in &rho {
            check_corr_entry(v)?;
        }
        Ok(CorrelationSpec::OneDependent { rho })
    }

    /// Band `i` (0-based here) must have length `bands[0].len() - i`, so the
    /// implied dimension is `bands[0].len() + 1` and `k <= m - 1`.
    pub fn k_dependent(k: usize, bands: Vec<Vec<f64>>) -> Result<Self, Error> {
        if k == 0 || bands.len() != k {
            return Err(Error::InvalidBands {
                band: 0,
                expected_len: k.max(1),
                actual_len: bands.len(),
            });
        }
        let m = bands[0].len() + 1;
        for (idx, band) in bands.iter().enumerate() {
            let expected = m - 1 - idx;
            if band.len() != expected {
                return Err(Error::InvalidBands {
                    band: idx + 1,
                    expected_len: expected,
                    actual_len: band.len(),
                });
            }
            for &v in band {
                check_corr_entry(v)?;
            }
        }
        Ok(CorrelationSpec::KDependent { k, bands })
    }

    /// Validates symmetry within 1e-12 and a unit diagonal, symmetrizes,
    /// and checks off-diagonal entries are in [0, 1).
    pub fn general(mut r: SquareMatrix) -> Result<Self, Error> {
        let n = r.dim();
        for i in 0..n {
            if (r.get(i, i) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCorrelation { value: r.get(i, i) });
            }
            r.set(i, i, 1.0);
            for j in (i + 1)..n {
                let a = r.get(i, j);
                let b = r.get(j, i);
                if (a - b).abs() > 1e-12 {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
                let v = 0.5 * (a + b);
                check_corr_entry(v)?;
                r.set(i, j, v);
                r.set(j, i, v);
            }
        }
        Ok(CorrelationSpec::General { r })
    }

    /// The dimension this structure prescribes, if it prescribes one.
    /// Exchangeable specs fit any dimension.
    pub fn implied_dim(&self) -> Option<usize> {
        match self {
            CorrelationSpec::Exchangeable { .. } => None,
            CorrelationSpec::DecayingProduct { rho } | CorrelationSpec::OneDependent { rho } => {
                Some(rho.len() + 1)
            }
            CorrelationSpec::KDependent { bands, .. } => Some(bands[0].len() + 1),
            CorrelationSpec::General { r } => Some(r.dim()),
        }
    }

    /// Checks compatibility with an `m`-dimensional marginal vector.
    pub fn validate_dims(&self, m: usize) -> Result<(), Error> {
        match self.implied_dim() {
            Some(d) if d != m => Err(Error::DimensionMismatch { expected: m, actual: d }),
            _ => Ok(()),
        }
    }

    pub fn structure_name(&self) -> &'static str {
        match self {
            CorrelationSpec::Exchangeable { .. } => "exchangeable",
            CorrelationSpec::DecayingProduct { .. } => "decaying-product",
            CorrelationSpec::OneDependent { .. } => "1-dependent",
            CorrelationSpec::KDependent { .. } => "k-dependent",
            CorrelationSpec::General { .. } => "general",
        }
    }
}

/// Intermediate Bernoulli parameters produced by the pure derivation step of
/// each algorithm. Every stored probability lies in [0, 1]; that containment
/// is exactly the feasibility verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivedParams {
    Exchangeable(ExchangeableParams),
    Decaying(DecayingParams),
    OneDepM1(OneDepM1Params),
    OneDepM2(OneDepM2Params),
    KDep(KDepParams),
}

impl DerivedParams {
    pub fn algorithm(&self) -> AlgorithmId {
        match self {
            DerivedParams::Exchangeable(_) => AlgorithmId::Alg1,
            DerivedParams::Decaying(_) => AlgorithmId::Alg2,
            DerivedParams::OneDepM1(_) => AlgorithmId::Alg3,
            DerivedParams::OneDepM2(_) => AlgorithmId::Alg4,
            DerivedParams::KDep(_) => AlgorithmId::Alg5,
        }
    }
}

/// Parameters of the shared-mixand construction: one latent `Bern(gamma)`
/// coordinate mixed into every position.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeableParams {
    pub gamma: f64,
    /// Mixing weights, one per coordinate.
    pub alpha: Vec<f64>,
    /// Fresh-coordinate probabilities, one per coordinate.
    pub beta: Vec<f64>,
}

/// Parameters of the Markov mixture; `alpha[0]` and `beta[0]` belong to
/// coordinate 2 (coordinate 1 is a plain `Bern(p_1)` draw).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayingParams {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Parameters of the 1-dependent product construction. `beta` has length
/// `m + 1` with `beta[0] = 1` as the phantom left neighbour; `alpha[i-1]`
/// and `beta[i]` belong to coordinate `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDepM1Params {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Parameters of the thinned moving-average construction. `r` has length
/// `m` with `r[0] = 0`; `rho_prime` holds the rescaled minor-diagonal
/// correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDepM2Params {
    pub alpha: Vec<f64>,
    pub rho_prime: Vec<f64>,
    pub r: Vec<f64>,
    pub p_max: f64,
}

/// Parameters of the banded product construction. `beta` is the K×m matrix
/// stored row-major (band-major); `k_prime[i] = min(i, k)` for 0-based `i`
/// counts the backward factors of coordinate `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KDepParams {
    pub k: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub k_prime: Vec<usize>,
}

impl KDepParams {
    /// `beta_{lj}` with 1-based band `l` and coordinate `j`.
    #[inline]
    pub fn beta(&self, l: usize, j: usize) -> f64 {
        self.beta[(l - 1) * self.alpha.len() + (j - 1)]
    }
}

/// An n×m matrix of sampled 0/1 outcomes with its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: Vec<u8>,
    n: usize,
    m: usize,
    seed: u64,
    spec_digest: String,
    algorithm: AlgorithmId,
}

impl SampleMatrix {
    /// Assembles a matrix from raw parts. `data` is row-major with `n * m`
    /// entries; the caller guarantees every entry is 0 or 1.
    pub fn from_parts(
        data: Vec<u8>,
        n: usize,
        m: usize,
        seed: u64,
        spec_digest: String,
        algorithm: AlgorithmId,
    ) -> Self {
        assert_eq!(data.len(), n * m);
        SampleMatrix { data, n, m, seed, spec_digest, algorithm }
    }

    /// Sample count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec_digest(&self) -> &str {
        &self.spec_digest
    }

    pub fn algorithm(&self) -> AlgorithmId {
        self.algorithm
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.m + j]
    }

    /// Row-major flat view of all entries.
    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

fn hash_f64s(hasher: &mut Sha256, values: &[f64]) {
    for &v in values {
        hasher.update(v.to_bits().to_le_bytes());
    }
}

/// A stable hex digest of `(marginals, structure, algorithm)`.
///
/// Exact-value semantics: any bit-level difference in an input changes the
/// digest, so two sample files with equal digests came from identical specs.
pub fn spec_digest(p: &MarginalVector, spec: &CorrelationSpec, alg: AlgorithmId) -> String {
    let mut h = Sha256::new();
    h.update([1u8]); // digest schema version
    h.update((p.len() as u64).to_le_bytes());
    hash_f64s(&mut h, p.values());
    match spec {
        CorrelationSpec::Exchangeable { rho } => {
            h.update([1u8]);
            hash_f64s(&mut h, &[*rho]);
        }
        CorrelationSpec::DecayingProduct { rho } => {
            h.update([2u8]);
            h.update((rho.len() as u64).to_le_bytes());
            hash_f64s(&mut h, rho);
        }
        CorrelationSpec::OneDependent { rho } => {
            h.update([3u8]);
            h.update((rho.len() as u64).to_le_bytes());
            hash_f64s(&mut h, rho);
        }
        CorrelationSpec::KDependent { k, bands } => {
            h.update([4u8]);
            h.update((*k as u64).to_le_bytes());
            for band in bands {
                h.update((band.len() as u64).to_le_bytes());
                hash_f64s(&mut h, band);
            }
        }
        CorrelationSpec::General { r } => {
            h.update([5u8]);
            h.update((r.dim() as u64).to_le_bytes());
            hash_f64s(&mut h, r.as_slice());
        }
    }
    h.update([match alg {
        AlgorithmId::Alg1 => 1u8,
        AlgorithmId::Alg2 => 2,
        AlgorithmId::Alg3 => 3,
        AlgorithmId::Alg4 => 4,
        AlgorithmId::Alg5 => 5,
    }]);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        use core::fmt::Write;
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn marginal_validation() {
        assert!(MarginalVector::new(vec![0.1, 0.5, 0.9]).is_ok());
        assert!(matches!(
            MarginalVector::new(vec![]),
            Err(Error::EmptyMarginals)
        ));
        assert!(matches!(
            MarginalVector::new(vec![0.1, 0.0]),
            Err(Error::InvalidMarginal { index: 1, .. })
        ));
        assert!(matches!(
            MarginalVector::new(vec![1.0]),
            Err(Error::InvalidMarginal { index: 0, .. })
        ));
        assert!(MarginalVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn marginal_extremes() {
        let p = MarginalVector::new(vec![0.3, 0.1, 0.4]).unwrap();
        assert_eq!(p.p_min(), 0.1);
        assert_eq!(p.p_max(), 0.4);
    }

    #[test]
    fn correlation_domain() {
        assert!(CorrelationSpec::exchangeable(0.0).is_ok());
        assert!(CorrelationSpec::exchangeable(1.0).is_err());
        assert!(CorrelationSpec::exchangeable(-0.1).is_err());
        assert!(CorrelationSpec::one_dependent(vec![0.2, 0.999]).is_ok());
    }

    #[test]
    fn band_shape_validation() {
        // m = 4: band 1 has 3 entries, band 2 has 2.
        assert!(CorrelationSpec::k_dependent(2, vec![vec![0.1, 0.1, 0.1], vec![0.05, 0.05]]).is_ok());
        assert!(CorrelationSpec::k_dependent(2, vec![vec![0.1, 0.1], vec![0.05, 0.05]]).is_err());
        assert!(CorrelationSpec::k_dependent(0, vec![]).is_err());
    }

    #[test]
    fn general_symmetrizes() {
        let r = SquareMatrix::from_rows(2, vec![1.0, 0.3, 0.3 + 5e-13, 1.0]).unwrap();
        let spec = CorrelationSpec::general(r).unwrap();
        if let CorrelationSpec::General { r } = &spec {
            assert_eq!(r.get(0, 1), r.get(1, 0));
        } else {
            unreachable!();
        }
        let bad = SquareMatrix::from_rows(2, vec![1.0, 0.3, 0.4, 1.0]).unwrap();
        assert!(matches!(
            CorrelationSpec::general(bad),
            Err(Error::AsymmetricMatrix { i: 0, j: 1 })
        ));
    }

    #[test]
    fn digest_deterministic_and_sensitive() {
        let p1 = MarginalVector::new(vec![0.1, 0.2]).unwrap();
        let p2 = MarginalVector::new(vec![0.2, 0.1]).unwrap();
        let s1 = CorrelationSpec::exchangeable(0.3).unwrap();
        let s2 = CorrelationSpec::exchangeable(0.30000001).unwrap();

        let d1 = spec_digest(&p1, &s1, AlgorithmId::Alg1);
        assert_eq!(d1, spec_digest(&p1, &s1, AlgorithmId::Alg1));
        assert_eq!(d1.len(), 64);
        assert_ne!(d1, spec_digest(&p2, &s1, AlgorithmId::Alg1));
        assert_ne!(d1, spec_digest(&p1, &s2, AlgorithmId::Alg1));
        assert_ne!(d1, spec_digest(&p1, &s1, AlgorithmId::Alg2));
    }
}
