//! Timing harness for the scaling claims: per-row sampling cost against
//! dimension, summarized as a fitted log-log slope.
//!
//! Derivation cost is amortized out of the per-row numbers and reported
//! separately, since one derivation serves arbitrarily many rows. Each
//! measurement repetition samples enough rows to make timer noise
//! irrelevant; the median over repetitions is the headline number, with the
//! mean alongside.

use std::io::Write;
use std::time::Instant;

use cbgen_core::generators::GenerationPlan;
use cbgen_core::types::{AlgorithmId, CorrelationSpec, Error, MarginalVector};
use cbgen_core::RandomStream;

use crate::AppError;

/// Draws per repetition; at ~1 ns per draw one repetition runs a few
/// milliseconds, far above timer resolution.
const TARGET_DRAWS_PER_REP: u64 = 4_000_000;

/// Measurements across dimensions for one algorithm, plus the fitted
/// log(time)–log(m) line.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingResult {
    pub algorithm: AlgorithmId,
    pub dims: Vec<usize>,
    /// Median seconds per sampled row at each dimension.
    pub times: Vec<f64>,
    /// Mean seconds per sampled row at each dimension.
    pub mean_times: Vec<f64>,
    /// One-off derivation seconds at each dimension.
    pub derive_times: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    pub reps: usize,
}

/// Least-squares line through `(ln m, ln t)`; returns `(slope, r^2)`.
pub fn fit_loglog(dims: &[usize], times: &[f64]) -> (f64, f64) {
    assert_eq!(dims.len(), times.len());
    assert!(dims.len() >= 2);
    let n = dims.len() as f64;
    let xs: Vec<f64> = dims.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|&t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, r2)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Times per-row generation at each dimension in `dims` and fits the
/// log-log slope. `p_profile` materializes marginals for a dimension,
/// `spec_profile` the correlation structure for those marginals; every
/// instantiation must be feasible. Two warmup repetitions are discarded
/// before `reps` measured ones.
pub fn run_scaling<P, S>(
    algorithm: Option<AlgorithmId>,
    p_profile: P,
    spec_profile: S,
    dims: &[usize],
    reps: usize,
) -> Result<ScalingResult, Error>
where
    P: Fn(usize) -> MarginalVector,
    S: Fn(&MarginalVector) -> CorrelationSpec,
{
    assert!(!dims.is_empty() && reps >= 1);
    let mut times = Vec::with_capacity(dims.len());
    let mut mean_times = Vec::with_capacity(dims.len());
    let mut derive_times = Vec::with_capacity(dims.len());
    let mut algorithm_used = None;
    let stream = RandomStream::new(0x5ca1ab1e);

    for (di, &m) in dims.iter().enumerate() {
        let p = p_profile(m);
        let spec = spec_profile(&p);

        let t0 = Instant::now();
        let plan = GenerationPlan::new(&p, &spec, algorithm)?;
        derive_times.push(t0.elapsed().as_secs_f64());
        algorithm_used = Some(plan.algorithm());

        let rows_per_rep = (TARGET_DRAWS_PER_REP / plan.draws_per_row()).max(1) as usize;
        let mut row = vec![0u8; m];
        let mut rep_times = Vec::with_capacity(reps);
        let mut sink = 0u64; // keep sampled bytes observable
        for rep in 0..(reps + 2) {
            let t0 = Instant::now();
            for k in 0..rows_per_rep {
                let mut child = stream.child(((di * 64 + rep) as u64) << 32 | k as u64);
                plan.sample_row_into(&mut child, &mut row);
                sink = sink.wrapping_add(row[0] as u64);
            }
            let dt = t0.elapsed().as_secs_f64() / rows_per_rep as f64;
            if rep >= 2 {
                rep_times.push(dt);
            }
        }
        std::hint::black_box(sink);
        mean_times.push(rep_times.iter().sum::<f64>() / rep_times.len() as f64);
        times.push(median(&mut rep_times));
    }

    let (slope, r2) = fit_loglog(dims, &times);
    Ok(ScalingResult {
        algorithm: algorithm_used.expect("at least one dim"),
        dims: dims.to_vec(),
        times,
        mean_times,
        derive_times,
        slope,
        r2,
        reps,
    })
}

/// Writes one scaling run as plot-ready CSV: a header plus one row per
/// dimension. Empty results are an error, never an empty file.
pub fn emit_scaling_csv(result: &ScalingResult, path: &std::path::Path) -> Result<(), AppError> {
    if result.dims.is_empty() {
        return Err(AppError::Usage("scaling result has no dimensions".into()));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "algorithm,m,median_seconds,mean_seconds,derive_seconds,reps")?;
    for (i, &m) in result.dims.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            result.algorithm, m, result.times[i], result.mean_times[i], result.derive_times[i],
            result.reps
        )?;
    }
    Ok(())
}

/// The stock workloads timed by the `bench` subcommand, one per algorithm.
/// All use equal marginals 0.5 with correlations inside every construction's
/// feasible region at any dimension.
pub fn stock_profiles(
    alg: AlgorithmId,
    general: bool,
    k: usize,
) -> (
    impl Fn(usize) -> MarginalVector,
    impl Fn(&MarginalVector) -> CorrelationSpec,
) {
    let p_profile = |m: usize| MarginalVector::new(vec![0.5; m]).unwrap();
    let spec_profile = move |p: &MarginalVector| -> CorrelationSpec {
        let m = p.len();
        match alg {
            AlgorithmId::Alg1 => CorrelationSpec::Exchangeable { rho: 0.5 },
            AlgorithmId::Alg2 => CorrelationSpec::DecayingProduct { rho: vec![0.4; m - 1] },
            AlgorithmId::Alg3 => CorrelationSpec::OneDependent { rho: vec![0.2; m - 1] },
            AlgorithmId::Alg4 => CorrelationSpec::OneDependent { rho: vec![0.2; m - 1] },
            AlgorithmId::Alg5 if general => {
                let mut r = cbgen_core::types::SquareMatrix::identity(m);
                for i in 0..m {
                    let mut prod = 1.0;
                    for j in (i + 1)..m {
                        prod *= 0.2;
                        r.set(i, j, prod);
                        r.set(j, i, prod);
                    }
                }
                CorrelationSpec::General { r }
            }
            AlgorithmId::Alg5 => {
                let k = k.min(m - 1).max(1);
                let bands: Vec<Vec<f64>> = (0..k)
                    .map(|l| vec![0.1 * 0.5f64.powi(l as i32); m - 1 - l])
                    .collect();
                CorrelationSpec::KDependent { k, bands }
            }
        }
    };
    (p_profile, spec_profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_powers() {
        let dims = [100usize, 1000, 10_000, 100_000];
        let linear: Vec<f64> = dims.iter().map(|&m| 3e-9 * m as f64).collect();
        let (slope, r2) = fit_loglog(&dims, &linear);
        assert!((slope - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);

        let quad: Vec<f64> = dims.iter().map(|&m| 1e-12 * (m as f64).powi(2)).collect();
        let (slope, r2) = fit_loglog(&dims, &quad);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!(r2 > 0.999999);
    }

    #[test]
    fn csv_emission_has_header_and_rows() {
        let result = ScalingResult {
            algorithm: AlgorithmId::Alg1,
            dims: vec![10, 100, 1000, 10_000],
            times: vec![1e-8, 1e-7, 1e-6, 1e-5],
            mean_times: vec![1e-8, 1e-7, 1e-6, 1e-5],
            derive_times: vec![1e-9; 4],
            slope: 1.0,
            r2: 1.0,
            reps: 10,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scaling.csv");
        emit_scaling_csv(&result, &path).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("algorithm,m,median_seconds"));
        assert!(lines[1].starts_with("alg1,10,"));

        let empty = ScalingResult { dims: vec![], times: vec![], mean_times: vec![], derive_times: vec![], ..result };
        assert!(emit_scaling_csv(&empty, &path).is_err());
    }

    #[test]
    fn stock_profiles_are_feasible() {
        for (alg, general) in [
            (AlgorithmId::Alg1, false),
            (AlgorithmId::Alg2, false),
            (AlgorithmId::Alg3, false),
            (AlgorithmId::Alg4, false),
            (AlgorithmId::Alg5, false),
            (AlgorithmId::Alg5, true),
        ] {
            let (pp, sp) = stock_profiles(alg, general, 5);
            let p = pp(50);
            let spec = sp(&p);
            assert!(
                GenerationPlan::new(&p, &spec, Some(alg)).is_ok(),
                "{alg} general={general}"
            );
        }
    }
}
