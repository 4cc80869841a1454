//! Data generators and the Monte Carlo harness for the robust-vs-standard
//! comparisons.
//!
//! Every generator is a pure function of its parameters and a seed; the
//! generator family is ChaCha12 and is recorded in run metadata so a
//! sweep is reproducible from its outputs alone. Replication seeds derive
//! as `base_seed + replication_index`.

pub mod presets;

use crate::dataset::TraceDataset;
use crate::error::{Error, Result};
use crate::estimators::{estimate, LambdaRule, ProblemKind, ProblemSpec, ShrinkRules};
use crate::moments::shrinkage_covariance;
use crate::shrinkage::RateContext;
use crate::solvers::SolverConfig;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Cauchy, LogNormal, Normal, StandardNormal, StudentT};
use rayon::prelude::*;
use std::time::Instant;

/// Name of the pseudo-random generator family, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha12";

/// The three noise families of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// `(Z - E Z) / divisor` with `ln Z ~ N(0, sigma2)`; centered by
    /// subtracting the exact mean `exp(sigma2 / 2)`.
    LogNormal { sigma2: f64, divisor: f64 },
    /// `min(Z, cap) / divisor` with standard Cauchy `Z`. The cap is
    /// one-sided, so this family is not centered.
    TruncCauchy { cap: f64, divisor: f64 },
    Gaussian { sigma2: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::LogNormal { sigma2, divisor } => {
                crate::error::require_positive(*sigma2, "log-normal sigma2")?;
                crate::error::require_positive(*divisor, "log-normal divisor")?;
            }
            NoiseModel::TruncCauchy { divisor, .. } => {
                crate::error::require_positive(*divisor, "truncated Cauchy divisor")?;
            }
            NoiseModel::Gaussian { sigma2 } => {
                crate::error::require_non_negative(*sigma2, "gaussian sigma2")?;
            }
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha12Rng) -> f64 {
        match *self {
            NoiseModel::LogNormal { sigma2, divisor } => {
                let dist = LogNormal::new(0.0, sigma2.sqrt()).expect("valid log-normal");
                (rng.sample(dist) - (sigma2 / 2.0).exp()) / divisor
            }
            NoiseModel::TruncCauchy { cap, divisor } => {
                let dist = Cauchy::new(0.0, 1.0).expect("valid cauchy");
                let z: f64 = rng.sample(dist);
                z.min(cap) / divisor
            }
            NoiseModel::Gaussian { sigma2 } => {
                let dist = Normal::new(0.0, sigma2.sqrt()).expect("valid normal");
                rng.sample(dist)
            }
        }
    }
}

/// Draws `count` noise values from the model.
pub fn sample_noise(model: &NoiseModel, count: usize, seed: u64) -> Result<DVector<f64>> {
    if count == 0 {
        return Err(Error::invalid("noise sample count must be at least 1"));
    }
    model.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(DVector::from_fn(count, |_, _| model.draw(&mut rng)))
}

/// Scaling of the rank-`r` projector target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetNormalization {
    /// `sum_i v_i v_i^T`: unit nonzero eigenvalues, Frobenius norm `sqrt(r)`.
    UnitEigenvalues,
    /// Divided by `sqrt(r)`: unit Frobenius norm.
    InvSqrtRank,
}

/// Builds the simulation target: the sum of outer products of the top `r`
/// eigenvectors of the sample covariance of 100 standard Gaussian vectors.
/// The result is symmetric PSD with rank exactly `r`.
pub fn make_low_rank_target(
    d: usize,
    r: usize,
    normalization: TargetNormalization,
    seed: u64,
) -> Result<DMatrix<f64>> {
    if d < r || r == 0 {
        return Err(Error::invalid(format!("target needs d >= r >= 1, got d={d}, r={r}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draws = DMatrix::<f64>::zeros(100, d);
    for i in 0..100 {
        for j in 0..d {
            draws[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let cov = draws.tr_mul(&draws) / 100.0;
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).unwrap());
    let mut target = DMatrix::<f64>::zeros(d, d);
    for &idx in order.iter().take(r) {
        let v = eigen.eigenvectors.column(idx);
        target += v * v.transpose();
    }
    if normalization == TargetNormalization::InvSqrtRank {
        target /= (r as f64).sqrt();
    }
    Ok(target)
}

/// Generates a dataset `Y_i = <X_i, Theta*> + eps_i` with the design law
/// of the problem kind: i.i.d. standard Gaussian entries for compressed
/// sensing, uniform singletons for completion, standard Gaussian rows for
/// the linear and multi-task models. Per sample, design coordinates are
/// drawn before the noise.
pub fn generate_dataset(
    spec: &ProblemSpec,
    target: &DMatrix<f64>,
    noise: &NoiseModel,
    samples: usize,
    seed: u64,
) -> Result<TraceDataset> {
    noise.validate()?;
    if samples == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match spec.kind {
        ProblemKind::Linear => {
            let d = spec.d1;
            if target.nrows() != d || target.ncols() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "linear target must be {d}x1, got {}x{}",
                    target.nrows(),
                    target.ncols()
                )));
            }
            let mut xs = DMatrix::<f64>::zeros(samples, d);
            let mut ys = DVector::<f64>::zeros(samples);
            for i in 0..samples {
                let mut dot = 0.0;
                for j in 0..d {
                    let v: f64 = rng.sample(StandardNormal);
                    xs[(i, j)] = v;
                    dot += v * target[(j, 0)];
                }
                ys[i] = dot + noise.draw(&mut rng);
            }
            TraceDataset::diagonal(xs, ys)
        }
        ProblemKind::CompressedSensing => {
            let (d1, d2) = (spec.d1, spec.d2);
            check_target_dims(target, d1, d2)?;
            let p = d1 * d2;
            let target_vec = DVector::from_column_slice(target.as_slice());
            let mut design = DMatrix::<f64>::zeros(samples, p);
            let mut ys = DVector::<f64>::zeros(samples);
            for i in 0..samples {
                let mut dot = 0.0;
                for j in 0..p {
                    let v: f64 = rng.sample(StandardNormal);
                    design[(i, j)] = v;
                    dot += v * target_vec[j];
                }
                ys[i] = dot + noise.draw(&mut rng);
            }
            TraceDataset::dense(design, ys, d1, d2)
        }
        ProblemKind::MatrixCompletion => {
            let (d1, d2) = (spec.d1, spec.d2);
            check_target_dims(target, d1, d2)?;
            let mut rows = Vec::with_capacity(samples);
            let mut cols = Vec::with_capacity(samples);
            let mut ys = DVector::<f64>::zeros(samples);
            for i in 0..samples {
                let j = rng.random_range(0..d1);
                let k = rng.random_range(0..d2);
                rows.push(j);
                cols.push(k);
                ys[i] = target[(j, k)] + noise.draw(&mut rng);
            }
            TraceDataset::singleton(rows, cols, ys, d1, d2)
        }
        ProblemKind::MultiTask => {
            let (d1, d2) = (spec.d1, spec.d2);
            check_target_dims(target, d1, d2)?;
            let mut xs = DMatrix::<f64>::zeros(samples, d1);
            let mut ys = DMatrix::<f64>::zeros(samples, d2);
            for i in 0..samples {
                for j in 0..d1 {
                    xs[(i, j)] = rng.sample(StandardNormal);
                }
                for k in 0..d2 {
                    let mut dot = 0.0;
                    for j in 0..d1 {
                        dot += xs[(i, j)] * target[(j, k)];
                    }
                    ys[(i, k)] = dot + noise.draw(&mut rng);
                }
            }
            TraceDataset::multi_response(xs, ys)
        }
    }
}

fn check_target_dims(target: &DMatrix<f64>, d1: usize, d2: usize) -> Result<()> {
    if target.nrows() != d1 || target.ncols() != d2 {
        return Err(Error::DimensionMismatch(format!(
            "target is {}x{}, expected {d1}x{d2}",
            target.nrows(),
            target.ncols()
        )));
    }
    Ok(())
}

/// One point of a `(d, samples)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub d: usize,
    pub samples: usize,
}

/// One estimation method of a comparison: shrinkage rules plus the
/// penalty rule. The standard method is the identity-rule instance.
#[derive(Debug, Clone, Copy)]
pub struct MethodConfig {
    pub rules: ShrinkRules,
    pub lambda: LambdaRule,
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ProblemKind,
    pub regime: crate::moments::Regime,
    pub grid: Vec<GridPoint>,
    pub noise: NoiseModel,
    pub replications: u32,
    pub base_seed: u64,
    pub target_rank: usize,
    pub target_normalization: TargetNormalization,
    /// Spikiness bound for completion; ignored by the other kinds.
    pub spikiness: f64,
    pub robust: MethodConfig,
    pub standard: MethodConfig,
    pub solver: SolverConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if self.grid.is_empty() {
            return Err(Error::invalid("grid must contain at least one point"));
        }
        self.noise.validate()?;
        if self.kind == ProblemKind::MatrixCompletion {
            crate::error::require_positive(self.spikiness, "completion spikiness bound")?;
        }
        Ok(())
    }

    fn problem_spec(&self, d: usize) -> ProblemSpec {
        let mut spec = ProblemSpec::new(self.kind, d, d)
            .with_regime(self.regime)
            .with_schatten(0.0, self.target_rank as f64);
        if self.kind == ProblemKind::MatrixCompletion {
            spec = spec.with_spikiness(self.spikiness);
        }
        spec
    }
}

/// Which estimator produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MethodLabel {
    Robust,
    Standard,
}

impl MethodLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodLabel::Robust => "robust",
            MethodLabel::Standard => "standard",
        }
    }
}

/// One replication-level result row.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub d: usize,
    pub samples: usize,
    pub replication: u32,
    pub method: MethodLabel,
    pub error: f64,
    pub runtime_ms: f64,
    pub converged: bool,
}

/// Replication-level error records, canonically sorted by grid point,
/// replication and method so output is independent of scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRecord>,
    /// Name of the error column: `frobenius_error` for estimation sweeps,
    /// `spectral_error` for the covariance benchmark.
    pub error_label: &'static str,
}

impl ErrorTable {
    fn canonicalize(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.d, a.samples, a.replication, a.method).cmp(&(b.d, b.samples, b.replication, b.method))
        });
    }

    /// The full CSV, including the measured wall-clock runtime column.
    /// All columns except `runtime_ms` are deterministic given the seed.
    pub fn to_csv(&self) -> String {
        let mut out = format!("d,n,replication,method,{},runtime_ms,converged\r\n", self.error_label);
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:.3},{}\r\n",
                row.d, row.samples, row.replication, row.method.as_str(), row.error,
                row.runtime_ms, row.converged
            ));
        }
        out
    }

    /// The CSV with the volatile runtime column dropped; byte-identical
    /// across reruns with the same seed.
    pub fn deterministic_csv(&self) -> String {
        let mut out = format!("d,n,replication,method,{},converged\r\n", self.error_label);
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\r\n",
                row.d, row.samples, row.replication, row.method.as_str(), row.error, row.converged
            ));
        }
        out
    }

    /// Per-(grid point, method) medians and quartiles. Non-finite errors
    /// from failed fits are excluded from the quantiles but kept in the
    /// convergence tally.
    pub fn summary(&self) -> Vec<SummaryRow> {
        type Key = (usize, usize, MethodLabel);
        let mut groups: Vec<(Key, Vec<&ErrorRecord>)> = Vec::new();
        for row in &self.rows {
            let key = (row.d, row.samples, row.method);
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, list)) => list.push(row),
                None => groups.push((key, vec![row])),
            }
        }
        groups
            .into_iter()
            .map(|((d, samples, method), list)| {
                let mut errors: Vec<f64> =
                    list.iter().map(|r| r.error).filter(|e| e.is_finite()).collect();
                errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
                SummaryRow {
                    d,
                    samples,
                    method,
                    median_error: quantile(&errors, 0.5),
                    q1_error: quantile(&errors, 0.25),
                    q3_error: quantile(&errors, 0.75),
                    replications: list.len(),
                    converged: list.iter().filter(|r| r.converged).count(),
                }
            })
            .collect()
    }

    /// Summary CSV: one row per grid point and method.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("d,n,method,median_error,q1_error,q3_error,replications,converged\r\n");
        for row in self.summary() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\r\n",
                row.d, row.samples, row.method.as_str(), row.median_error, row.q1_error,
                row.q3_error, row.replications, row.converged
            ));
        }
        out
    }

    /// Median error for one grid point and method.
    pub fn median_error(&self, d: usize, samples: usize, method: MethodLabel) -> Option<f64> {
        self.summary()
            .into_iter()
            .find(|r| r.d == d && r.samples == samples && r.method == method)
            .map(|r| r.median_error)
    }
}

/// Aggregated statistics for one grid point and method.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub d: usize,
    pub samples: usize,
    pub method: MethodLabel,
    pub median_error: f64,
    pub q1_error: f64,
    pub q3_error: f64,
    pub replications: usize,
    pub converged: usize,
}

/// Type-7 linear interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

// Offset separating the target-construction stream from replication
// streams, which start at base_seed + 0.
const TARGET_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Builds the simulation target for an experiment at dimension `d`.
pub fn experiment_target(exp: &ExperimentSpec, d: usize) -> Result<DMatrix<f64>> {
    match exp.kind {
        ProblemKind::Linear => {
            // sparse unit-norm vector on the first `rank` coordinates
            let r = exp.target_rank.min(d).max(1);
            let mut t = DMatrix::<f64>::zeros(d, 1);
            for i in 0..r {
                t[(i, 0)] = 1.0 / (r as f64).sqrt();
            }
            Ok(t)
        }
        _ => make_low_rank_target(
            d,
            exp.target_rank,
            exp.target_normalization,
            exp.base_seed ^ TARGET_SEED_SALT,
        ),
    }
}

/// Runs the full sweep: for every grid point and replication, generates a
/// dataset and fits both methods on it. Fit failures are recorded as
/// non-converged rows with a NaN error; they never abort the sweep.
/// Replications run in parallel; the result ordering is canonical.
pub fn run_monte_carlo(exp: &ExperimentSpec) -> Result<ErrorTable> {
    exp.validate()?;
    let mut tasks = Vec::new();
    for point in &exp.grid {
        let target = experiment_target(exp, point.d)?;
        for rep in 0..exp.replications {
            tasks.push((point.d, point.samples, rep, target.clone()));
        }
    }
    let rows: Vec<ErrorRecord> = tasks
        .par_iter()
        .map(|(d, samples, rep, target)| {
            let spec = exp.problem_spec(*d);
            let seed = exp.base_seed.wrapping_add(*rep as u64);
            let mut out = Vec::with_capacity(2);
            match generate_dataset(&spec, target, &exp.noise, *samples, seed) {
                Ok(data) => {
                    for (label, method) in [
                        (MethodLabel::Robust, &exp.robust),
                        (MethodLabel::Standard, &exp.standard),
                    ] {
                        let started = Instant::now();
                        let fit =
                            estimate(&spec, &data, &method.rules, &method.lambda, &exp.solver);
                        let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
                        let (error, converged) = match fit {
                            Ok(fit) => ((&fit.estimate - target).norm(), fit.converged),
                            Err(_) => (f64::NAN, false),
                        };
                        out.push(ErrorRecord {
                            d: *d,
                            samples: *samples,
                            replication: *rep,
                            method: label,
                            error,
                            runtime_ms,
                            converged,
                        });
                    }
                }
                Err(_) => {
                    for label in [MethodLabel::Robust, MethodLabel::Standard] {
                        out.push(ErrorRecord {
                            d: *d,
                            samples: *samples,
                            replication: *rep,
                            method: label,
                            error: f64::NAN,
                            runtime_ms: 0.0,
                            converged: false,
                        });
                    }
                }
            }
            out
        })
        .flatten()
        .collect();
    let mut table = ErrorTable { rows, error_label: "frobenius_error" };
    table.canonicalize();
    Ok(table)
}

/// Sample law for the covariance benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLaw {
    Gaussian,
    /// Student's t with 3 degrees of freedom, scaled by `1/sqrt(3)` so the
    /// population covariance matches the target.
    StudentT3,
}

/// Covariance benchmark description: `Sigma = diag(4, 1, ..., 1)` with
/// `d = round(d_over_n * n)` per grid point.
#[derive(Debug, Clone)]
pub struct CovarianceBenchSpec {
    pub d_over_n: f64,
    pub n_grid: Vec<usize>,
    pub law: SampleLaw,
    pub replications: u32,
    pub base_seed: u64,
    /// Constant in front of the `(n R / (delta log d))^(1/4)` threshold.
    pub shrink_constant: f64,
    pub delta: f64,
    pub bound_r: f64,
}

impl CovarianceBenchSpec {
    pub fn validate(&self) -> Result<()> {
        crate::error::require_positive(self.d_over_n, "d/n ratio")?;
        if self.n_grid.is_empty() || self.replications == 0 {
            return Err(Error::invalid("covariance benchmark needs a grid and replications"));
        }
        crate::error::require_positive(self.shrink_constant, "shrinkage constant")?;
        crate::error::require_positive(self.delta, "delta")?;
        crate::error::require_positive(self.bound_r, "moment bound R")?;
        Ok(())
    }
}

/// Draws the benchmark samples: independent coordinates with the first
/// coordinate's standard deviation doubled (`Sigma = diag(4, 1, ..., 1)`).
pub fn covariance_samples(
    law: SampleLaw,
    n: usize,
    d: usize,
    seed: u64,
) -> DMatrix<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let t3 = StudentT::new(3.0).expect("valid student t");
    let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();
    let mut xs = DMatrix::<f64>::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            let v: f64 = match law {
                SampleLaw::Gaussian => rng.sample(StandardNormal),
                SampleLaw::StudentT3 => rng.sample(t3) * inv_sqrt3,
            };
            xs[(i, j)] = if j == 0 { 2.0 * v } else { v };
        }
    }
    xs
}

/// Runs the covariance benchmark: per replication, draws `n` samples,
/// forms the classical and the l4-shrinkage covariance, and records the
/// spectral-norm estimation errors.
pub fn covariance_benchmark(spec: &CovarianceBenchSpec) -> Result<ErrorTable> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &n in &spec.n_grid {
        let d = ((spec.d_over_n * n as f64).round() as usize).max(1);
        for rep in 0..spec.replications {
            tasks.push((d, n, rep));
        }
    }
    let rows: Vec<ErrorRecord> = tasks
        .par_iter()
        .map(|&(d, n, rep)| {
            let seed = spec.base_seed.wrapping_add(rep as u64);
            let xs = covariance_samples(spec.law, n, d, seed);
            let mut sigma = DMatrix::<f64>::identity(d, d);
            sigma[(0, 0)] = 4.0;

            let started = Instant::now();
            let classical = xs.tr_mul(&xs) / n as f64;
            let classical_ms = started.elapsed().as_secs_f64() * 1e3;
            let classical_err = symmetric_operator_norm(&(&classical - &sigma));

            let ctx = RateContext::new(d, d, n).with_delta(spec.delta).with_bound(spec.bound_r);
            let started = Instant::now();
            // d = 1 has no log rate; fall back to the identity regime there
            let tau = match crate::shrinkage::RateFormula::QuarterNROverDeltaLogD.evaluate(&ctx) {
                Ok(rate) => spec.shrink_constant * rate,
                Err(_) => f64::INFINITY,
            };
            let shrunk = shrinkage_covariance(&xs, tau).expect("non-empty samples");
            let shrunk_ms = started.elapsed().as_secs_f64() * 1e3;
            let shrunk_err = symmetric_operator_norm(&(&shrunk - &sigma));

            vec![
                ErrorRecord {
                    d,
                    samples: n,
                    replication: rep,
                    method: MethodLabel::Robust,
                    error: shrunk_err,
                    runtime_ms: shrunk_ms,
                    converged: true,
                },
                ErrorRecord {
                    d,
                    samples: n,
                    replication: rep,
                    method: MethodLabel::Standard,
                    error: classical_err,
                    runtime_ms: classical_ms,
                    converged: true,
                },
            ]
        })
        .flatten()
        .collect();
    let mut table = ErrorTable { rows, error_label: "spectral_error" };
    table.canonicalize();
    Ok(table)
}

/// Operator norm of a symmetric matrix: the largest absolute eigenvalue.
pub fn symmetric_operator_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
