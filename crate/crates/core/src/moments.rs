//! Robust estimators of the cross moment `Sigma_YX` and second moment
//! `Sigma_XX`, plus the stand-alone covariance estimators.
//!
//! The quadratic risk depends on the data only through these two moments,
//! so robustification amounts to forming them from truncated or shrunk
//! observations. `Sigma_XX` is never materialized at `d1*d2 x d1*d2`; each
//! problem family carries the factored representation its solver consumes.

use crate::dataset::TraceDataset;
use crate::error::{Error, Result};
use crate::shrinkage::{lp_norm, shrink_norm, truncate_elementwise, truncate_scalar};
use nalgebra::{DMatrix, DVector};

/// Which variables get robustified.
///
/// With a sub-Gaussian design only the response needs shrinkage; when the
/// design itself has merely bounded moments, both sides are shrunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SubGaussianDesign,
    BoundedMomentDesign,
}

/// Resolved shrinkage thresholds for one estimation call.
///
/// `f64::INFINITY` in either slot means the identity (no shrinkage); this
/// is how the classical estimator is expressed.
#[derive(Debug, Clone, Copy)]
pub struct ShrinkThresholds {
    pub response: f64,
    pub design: f64,
}

impl ShrinkThresholds {
    pub fn new(response: f64, design: f64) -> Self {
        ShrinkThresholds { response, design }
    }

    /// No shrinkage on either side.
    pub fn identity() -> Self {
        ShrinkThresholds { response: f64::INFINITY, design: f64::INFINITY }
    }
}

/// Design scaling for matrix completion moments.
///
/// The theory rescales singletons to `sqrt(d1*d2) * e_j e_k^T` so the
/// coefficient matrix has unit Frobenius norm; the simulations sample raw
/// `e_j e_k^T`. Raw is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingletonScaling {
    #[default]
    RawSingleton,
    TheorySqrtD1D2,
}

/// Problem-specific factored representation of `Sigma_XX`.
#[derive(Debug, Clone, PartialEq)]
pub enum GramMatrix {
    /// Linear model: the `d x d` matrix `(1/N) sum x~_i x~_i^T`.
    DenseGram(DMatrix<f64>),
    /// Compressed sensing: the robustified design rows themselves, with an
    /// implicit `1/N` weight; `Sigma_XX = rows^T rows / N`.
    DataFactored { rows: DMatrix<f64> },
    /// Matrix completion: the per-entry observation counts `Theta^n` and
    /// truncated-response sums `Theta^s`, both `d1 x d2`.
    SingletonCounts { counts: DMatrix<f64>, sums: DMatrix<f64>, scaling: SingletonScaling },
    /// Multi-task: `Sigma_{x~x~}` (`d1 x d1`) replicated block-diagonally
    /// over `tasks` response coordinates with a `1/tasks` factor.
    SharedGram { gram: DMatrix<f64>, tasks: usize },
}

impl GramMatrix {
    /// Applies `Sigma_XX` to `vec(Theta)` without expanding the operator,
    /// returning the result in matrix shape (`d1 x d2`; `d x 1` for the
    /// linear model).
    pub fn apply(&self, theta: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            GramMatrix::DenseGram(g) => g * theta,
            GramMatrix::DataFactored { rows } => {
                let (d1, d2) = (theta.nrows(), theta.ncols());
                let n = rows.nrows() as f64;
                let vec_theta = DVector::from_column_slice(theta.as_slice());
                let projected = rows * &vec_theta;
                let back = rows.tr_mul(&projected) / n;
                DMatrix::from_column_slice(d1, d2, back.as_slice())
            }
            GramMatrix::SingletonCounts { counts, scaling, .. } => {
                let n: f64 = counts.sum();
                let scale = match scaling {
                    SingletonScaling::RawSingleton => 1.0,
                    SingletonScaling::TheorySqrtD1D2 => (counts.len()) as f64,
                };
                let mut out = theta.component_mul(counts);
                out *= scale / n;
                out
            }
            GramMatrix::SharedGram { gram, tasks } => (gram * theta) / (*tasks as f64),
        }
    }

    /// Expands the factored form into the dense `d1*d2 x d1*d2` operator.
    /// Intended for tests and tiny problems only.
    pub fn expand(&self, d1: usize, d2: usize) -> DMatrix<f64> {
        let p = d1 * d2;
        let mut out = DMatrix::zeros(p, p);
        for j in 0..p {
            let mut basis = DMatrix::zeros(d1, d2);
            basis[(j % d1, j / d1)] = 1.0;
            let col = self.apply(&basis);
            out.set_column(j, &DVector::from_column_slice(col.as_slice()));
        }
        out
    }
}

/// The pair `(Sigma_YX, Sigma_XX)` in factored representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustMoments {
    /// `d1 x d2` cross moment (`d x 1` for the linear model).
    pub cross: DMatrix<f64>,
    pub gram: GramMatrix,
}

/// Robust moments for the linear model (diagonal designs).
///
/// The response is always truncated at `taus.response`; the design rows are
/// truncated elementwise at `taus.design` only under the bounded-moment
/// regime.
pub fn moments_linear(
    data: &TraceDataset,
    regime: Regime,
    taus: ShrinkThresholds,
) -> Result<RobustMoments> {
    let TraceDataset::Diagonal { xs, ys } = data else {
        return Err(Error::EncodingMismatch("moments_linear needs a diagonal encoding".into()));
    };
    if ys.is_empty() {
        return Err(Error::EmptyDataset("moments_linear".into()));
    }
    let n = ys.len();
    let d = xs.ncols();
    let mut design = xs.clone();
    if regime == Regime::BoundedMomentDesign {
        for i in 0..n {
            let row = truncate_elementwise(&DVector::from_row_slice(xs.row(i).transpose().as_slice()), taus.design)?;
            design.row_mut(i).copy_from(&row.transpose());
        }
    }
    let mut cross = DVector::<f64>::zeros(d);
    for i in 0..n {
        let y = truncate_scalar(ys[i], taus.response)?;
        cross.axpy(y, &design.row(i).transpose(), 1.0);
    }
    cross /= n as f64;
    let gram = design.tr_mul(&design) / n as f64;
    Ok(RobustMoments {
        cross: DMatrix::from_column_slice(d, 1, cross.as_slice()),
        gram: GramMatrix::DenseGram(gram),
    })
}

/// Robust moments for compressed sensing (dense designs).
///
/// Responses are truncated; the Gaussian design is kept as is and carried
/// in factored form.
pub fn moments_cs(data: &TraceDataset, tau: f64) -> Result<RobustMoments> {
    let TraceDataset::Dense { design, ys, d1, d2 } = data else {
        return Err(Error::EncodingMismatch("moments_cs needs a dense encoding".into()));
    };
    if ys.is_empty() {
        return Err(Error::EmptyDataset("moments_cs".into()));
    }
    let truncated = truncate_responses(ys, tau)?;
    let n = ys.len() as f64;
    let cross_vec = design.tr_mul(&truncated) / n;
    let cross = DMatrix::from_column_slice(*d1, *d2, cross_vec.as_slice());
    Ok(RobustMoments { cross, gram: GramMatrix::DataFactored { rows: design.clone() } })
}

/// Robust moments for matrix completion (singleton designs).
///
/// `Theta^n` tallies how often each entry was observed; `Theta^s` sums the
/// truncated responses per entry. The cross moment is derived from
/// `Theta^s` and the chosen design scaling.
pub fn moments_mc(
    data: &TraceDataset,
    tau: f64,
    scaling: SingletonScaling,
) -> Result<RobustMoments> {
    let TraceDataset::Singleton { rows, cols, ys, d1, d2 } = data else {
        return Err(Error::EncodingMismatch("moments_mc needs a singleton encoding".into()));
    };
    if ys.is_empty() {
        return Err(Error::EmptyDataset("moments_mc".into()));
    }
    let mut counts = DMatrix::<f64>::zeros(*d1, *d2);
    let mut sums = DMatrix::<f64>::zeros(*d1, *d2);
    for i in 0..ys.len() {
        let (j, k) = (rows[i], cols[i]);
        counts[(j, k)] += 1.0;
        sums[(j, k)] += truncate_scalar(ys[i], tau)?;
    }
    let n = ys.len() as f64;
    let design_scale = match scaling {
        SingletonScaling::RawSingleton => 1.0,
        SingletonScaling::TheorySqrtD1D2 => ((d1 * d2) as f64).sqrt(),
    };
    let cross = &sums * (design_scale / n);
    Ok(RobustMoments { cross, gram: GramMatrix::SingletonCounts { counts, sums, scaling } })
}

/// Robust moments for multi-task regression (row samples).
///
/// Sub-Gaussian designs keep `x` and shrink each response row in l2;
/// bounded-moment designs shrink both rows in l4. The `1/d2` factor from
/// treating `n` row samples as `n*d2` scalar observations is carried in
/// the factored representation.
pub fn moments_multitask(
    data: &TraceDataset,
    regime: Regime,
    taus: ShrinkThresholds,
) -> Result<RobustMoments> {
    let (xt, yt) = shrink_multitask_rows(data, regime, taus)?;
    let n = xt.nrows() as f64;
    let d2 = yt.ncols();
    let sigma_xy = xt.tr_mul(&yt) / n;
    let sigma_xx = xt.tr_mul(&xt) / n;
    Ok(RobustMoments {
        cross: sigma_xy / d2 as f64,
        gram: GramMatrix::SharedGram { gram: sigma_xx, tasks: d2 },
    })
}

/// Applies the regime's row shrinkage for multi-task data and returns the
/// transformed `(X, Y)` matrices. Solvers consume these directly.
pub fn shrink_multitask_rows(
    data: &TraceDataset,
    regime: Regime,
    taus: ShrinkThresholds,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let TraceDataset::MultiResponse { xs, ys } = data else {
        return Err(Error::EncodingMismatch(
            "moments_multitask needs a multi-response encoding".into(),
        ));
    };
    if xs.nrows() == 0 {
        return Err(Error::EmptyDataset("moments_multitask".into()));
    }
    let mut xt = xs.clone();
    let mut yt = ys.clone();
    for i in 0..xs.nrows() {
        let y_row = DVector::from_row_slice(ys.row(i).transpose().as_slice());
        let y_shrunk = match regime {
            Regime::SubGaussianDesign => shrink_norm(&y_row, taus.response, 2)?,
            Regime::BoundedMomentDesign => shrink_norm(&y_row, taus.response, 4)?,
        };
        yt.row_mut(i).copy_from(&y_shrunk.transpose());
        if regime == Regime::BoundedMomentDesign {
            let x_row = DVector::from_row_slice(xs.row(i).transpose().as_slice());
            let x_shrunk = shrink_norm(&x_row, taus.design, 4)?;
            xt.row_mut(i).copy_from(&x_shrunk.transpose());
        }
    }
    Ok((xt, yt))
}

/// Shrinkage sample covariance: `(1/n) sum x~_i x~_i^T` with every sample
/// shrunk to l4 norm at most `tau`. Samples are assumed centered.
pub fn shrinkage_covariance(samples: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    covariance_with(samples, |row| shrink_norm(row, tau, 4))
}

/// Elementwise-truncated sample covariance: `(1/n) sum x'_i x'_i^T` with
/// coordinates clipped at `tau`; every entry lies in `[-tau^2, tau^2]`.
pub fn truncated_covariance_elementwise(samples: &DMatrix<f64>, tau: f64) -> Result<DMatrix<f64>> {
    covariance_with(samples, |row| truncate_elementwise(row, tau))
}

fn covariance_with(
    samples: &DMatrix<f64>,
    transform: impl Fn(&DVector<f64>) -> Result<DVector<f64>>,
) -> Result<DMatrix<f64>> {
    let n = samples.nrows();
    if n == 0 {
        return Err(Error::EmptyDataset("covariance estimator".into()));
    }
    let d = samples.ncols();
    let mut transformed = DMatrix::<f64>::zeros(n, d);
    for i in 0..n {
        let row = DVector::from_row_slice(samples.row(i).transpose().as_slice());
        transformed.row_mut(i).copy_from(&transform(&row)?.transpose());
    }
    Ok(transformed.tr_mul(&transformed) / n as f64)
}

/// l4 norms of the rows of a sample matrix; used by threshold diagnostics.
pub fn row_l4_norms(samples: &DMatrix<f64>) -> Result<Vec<f64>> {
    (0..samples.nrows())
        .map(|i| lp_norm(&DVector::from_row_slice(samples.row(i).transpose().as_slice()), 4))
        .collect()
}

fn truncate_responses(ys: &DVector<f64>, tau: f64) -> Result<DVector<f64>> {
    let mut out = ys.clone();
    for v in out.iter_mut() {
        *v = truncate_scalar(*v, tau)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn linear_single_sample_algebra() {
        let data = TraceDataset::diagonal(
            mat(1, 2, &[1.0, 0.0]),
            DVector::from_column_slice(&[2.0]),
        )
        .unwrap();
        let m = moments_linear(&data, Regime::SubGaussianDesign, ShrinkThresholds::identity())
            .unwrap();
        assert_eq!(m.cross.as_slice(), &[2.0, 0.0]);
        let GramMatrix::DenseGram(g) = &m.gram else { panic!() };
        assert_eq!(g, &mat(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn linear_truncates_response_only_in_subgaussian_regime() {
        let data = TraceDataset::diagonal(
            mat(1, 2, &[1.0, 0.0]),
            DVector::from_column_slice(&[5.0]),
        )
        .unwrap();
        let m = moments_linear(
            &data,
            Regime::SubGaussianDesign,
            ShrinkThresholds::new(3.0, f64::INFINITY),
        )
        .unwrap();
        assert_eq!(m.cross.as_slice(), &[3.0, 0.0]);
        let GramMatrix::DenseGram(g) = &m.gram else { panic!() };
        assert_eq!(g[(0, 0)], 1.0);
    }

    #[test]
    fn linear_matches_naive_loop_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let n = 6;
        let d = 3;
        let xs = DMatrix::from_fn(n, d, |_, _| rng.random_range(-2.0..2.0));
        let ys = DVector::from_fn(n, |_, _| rng.random_range(-4.0..4.0));
        let (t1, t2) = (1.5, 1.0);
        let data = TraceDataset::diagonal(xs.clone(), ys.clone()).unwrap();
        let m = moments_linear(
            &data,
            Regime::BoundedMomentDesign,
            ShrinkThresholds::new(t1, t2),
        )
        .unwrap();

        // independent naive oracle: explicit loops over samples and coordinates
        let mut cross = vec![0.0; d];
        let mut gram = vec![0.0; d * d];
        for i in 0..n {
            let yt = ys[i].signum() * ys[i].abs().min(t1);
            let xt: Vec<f64> =
                (0..d).map(|j| xs[(i, j)].signum() * xs[(i, j)].abs().min(t2)).collect();
            for j in 0..d {
                cross[j] += yt * xt[j] / n as f64;
                for k in 0..d {
                    gram[j * d + k] += xt[j] * xt[k] / n as f64;
                }
            }
        }
        for (j, expected) in cross.iter().enumerate() {
            assert_relative_eq!(m.cross[(j, 0)], expected, epsilon = 1e-12);
        }
        let GramMatrix::DenseGram(g) = &m.gram else { panic!() };
        for j in 0..d {
            for k in 0..d {
                assert_relative_eq!(g[(j, k)], gram[j * d + k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cs_truncation_and_identity() {
        // single sample, X = e1 e1^T in 2x2, Y = 4, tau = 2
        let design = mat(1, 4, &[1.0, 0.0, 0.0, 0.0]);
        let ys = DVector::from_column_slice(&[4.0]);
        let data = TraceDataset::dense(design.clone(), ys.clone(), 2, 2).unwrap();
        let m = moments_cs(&data, 2.0).unwrap();
        assert_eq!(m.cross[(0, 0)], 2.0);
        assert_eq!(m.cross[(1, 1)], 0.0);

        // identity regime reproduces the ordinary cross moment
        let m_inf = moments_cs(&data, f64::INFINITY).unwrap();
        assert_eq!(m_inf.cross[(0, 0)], 4.0);
    }

    #[test]
    fn cs_matches_naive_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        let (n, d1, d2) = (5, 3, 3);
        let design = DMatrix::from_fn(n, d1 * d2, |_, _| rng.random_range(-1.0..1.0));
        let ys = DVector::from_fn(n, |_, _| rng.random_range(-6.0..6.0));
        let tau = 2.0;
        let data = TraceDataset::dense(design.clone(), ys.clone(), d1, d2).unwrap();
        let m = moments_cs(&data, tau).unwrap();
        for r in 0..d1 {
            for c in 0..d2 {
                let mut acc = 0.0;
                for i in 0..n {
                    let yt = ys[i].signum() * ys[i].abs().min(tau);
                    acc += yt * design[(i, c * d1 + r)] / n as f64;
                }
                assert_relative_eq!(m.cross[(r, c)], acc, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mc_tally_examples() {
        let data = TraceDataset::singleton(
            vec![1, 1],
            vec![1, 1],
            DVector::from_column_slice(&[1.0, 3.0]),
            3,
            3,
        )
        .unwrap();
        let m = moments_mc(&data, 2.0, SingletonScaling::RawSingleton).unwrap();
        let GramMatrix::SingletonCounts { counts, sums, .. } = &m.gram else { panic!() };
        assert_eq!(counts[(1, 1)], 2.0);
        assert_eq!(sums[(1, 1)], 3.0); // 1 + min(3, 2)

        let data = TraceDataset::singleton(
            vec![2],
            vec![3],
            DVector::from_column_slice(&[-1.0]),
            4,
            4,
        )
        .unwrap();
        let m = moments_mc(&data, f64::INFINITY, SingletonScaling::RawSingleton).unwrap();
        let GramMatrix::SingletonCounts { counts, sums, .. } = &m.gram else { panic!() };
        assert_eq!(sums[(2, 3)], -1.0);
        assert_eq!(sums.sum(), -1.0);
        assert_eq!(counts.sum(), 1.0);
    }

    #[test]
    fn mc_matches_tally_oracle_exactly() {
        let mut rng = StdRng::seed_from_u64(3);
        let (n, d) = (20, 4);
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..d)).collect();
        let cols: Vec<usize> = (0..n).map(|_| rng.random_range(0..d)).collect();
        let ys = DVector::from_fn(n, |_, _| rng.random_range(-5.0..5.0));
        let tau = 1.75;
        let data = TraceDataset::singleton(rows.clone(), cols.clone(), ys.clone(), d, d).unwrap();
        let m = moments_mc(&data, tau, SingletonScaling::RawSingleton).unwrap();
        let GramMatrix::SingletonCounts { counts, sums, .. } = &m.gram else { panic!() };

        let mut count_oracle = vec![0.0; d * d];
        let mut sum_oracle = vec![0.0; d * d];
        for i in 0..n {
            count_oracle[rows[i] * d + cols[i]] += 1.0;
            sum_oracle[rows[i] * d + cols[i]] += ys[i].signum() * ys[i].abs().min(tau);
        }
        for j in 0..d {
            for k in 0..d {
                assert_eq!(counts[(j, k)], count_oracle[j * d + k]);
                assert_relative_eq!(sums[(j, k)], sum_oracle[j * d + k], epsilon = 1e-14);
            }
        }
        assert_eq!(counts.sum(), n as f64);
    }

    #[test]
    fn multitask_single_sample() {
        let data = TraceDataset::multi_response(mat(1, 2, &[1.0, 0.0]), mat(1, 2, &[2.0, 0.0]))
            .unwrap();
        let m = moments_multitask(&data, Regime::SubGaussianDesign, ShrinkThresholds::identity())
            .unwrap();
        // cross = Sigma_xy / d2 with Sigma_xy = [[2,0],[0,0]]
        assert_eq!(m.cross[(0, 0)], 1.0);
        // with tau = 1 on the response, ||y||_2 = 2 halves the row
        let m = moments_multitask(
            &data,
            Regime::SubGaussianDesign,
            ShrinkThresholds::new(1.0, f64::INFINITY),
        )
        .unwrap();
        assert_relative_eq!(m.cross[(0, 0)] * 2.0, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn multitask_matches_naive_oracle() {
        let mut rng = StdRng::seed_from_u64(19);
        let (n, d1, d2) = (5, 3, 2);
        let xs = DMatrix::from_fn(n, d1, |_, _| rng.random_range(-2.0..2.0));
        let ys = DMatrix::from_fn(n, d2, |_, _| rng.random_range(-2.0..2.0));
        let taus = ShrinkThresholds::new(1.2, 1.1);
        let data = TraceDataset::multi_response(xs.clone(), ys.clone()).unwrap();
        let m = moments_multitask(&data, Regime::BoundedMomentDesign, taus).unwrap();

        // l4-shrink both rows by hand, then form the averaged outer products
        let l4 = |v: &[f64]| v.iter().map(|a| a.powi(4)).sum::<f64>().powf(0.25);
        let mut cross = vec![0.0; d1 * d2];
        let mut gram = vec![0.0; d1 * d1];
        for i in 0..n {
            let xr: Vec<f64> = (0..d1).map(|j| xs[(i, j)]).collect();
            let yr: Vec<f64> = (0..d2).map(|j| ys[(i, j)]).collect();
            let sx = (taus.design / l4(&xr)).min(1.0);
            let sy = (taus.response / l4(&yr)).min(1.0);
            for j in 0..d1 {
                for k in 0..d2 {
                    cross[j * d2 + k] += sx * xr[j] * sy * yr[k] / n as f64;
                }
                for k in 0..d1 {
                    gram[j * d1 + k] += sx * xr[j] * sx * xr[k] / n as f64;
                }
            }
        }
        let GramMatrix::SharedGram { gram: g, tasks } = &m.gram else { panic!() };
        assert_eq!(*tasks, d2);
        for j in 0..d1 {
            for k in 0..d2 {
                assert_relative_eq!(
                    m.cross[(j, k)],
                    cross[j * d2 + k] / d2 as f64,
                    epsilon = 1e-12
                );
            }
            for k in 0..d1 {
                assert_relative_eq!(g[(j, k)], gram[j * d1 + k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shared_gram_block_identity() {
        // gram * vec(Theta) must equal (1/(n*d2)) sum_i vec(x~_i x~_i^T Theta)
        let mut rng = StdRng::seed_from_u64(23);
        let (n, d1, d2) = (4, 3, 2);
        let xs = DMatrix::from_fn(n, d1, |_, _| rng.random_range(-1.0..1.0));
        let ys = DMatrix::from_fn(n, d2, |_, _| rng.random_range(-1.0..1.0));
        let data = TraceDataset::multi_response(xs.clone(), ys).unwrap();
        let m = moments_multitask(&data, Regime::SubGaussianDesign, ShrinkThresholds::identity())
            .unwrap();
        let theta = DMatrix::from_fn(d1, d2, |_, _| rng.random_range(-1.0..1.0));
        let applied = m.gram.apply(&theta);
        let mut oracle = DMatrix::<f64>::zeros(d1, d2);
        for i in 0..n {
            let xi = DVector::from_row_slice(xs.row(i).transpose().as_slice());
            oracle += &xi * (xi.transpose() * &theta);
        }
        oracle /= (n * d2) as f64;
        assert_relative_eq!((applied - oracle).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn shrinkage_covariance_examples() {
        // single sample below threshold: plain outer product
        let samples = mat(1, 2, &[1.0, 0.5]);
        let cov = shrinkage_covariance(&samples, 3.0).unwrap();
        assert_relative_eq!(cov[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(cov[(0, 1)], 0.5, epsilon = 1e-15);
        // x = (2, 0), tau = 1: shrunk to (1, 0)
        let samples = mat(1, 2, &[2.0, 0.0]);
        let cov = shrinkage_covariance(&samples, 1.0).unwrap();
        assert_relative_eq!(cov[(0, 0)], 1.0, epsilon = 1e-12);
        assert_eq!(cov[(1, 1)], 0.0);
    }

    #[test]
    fn shrinkage_covariance_matches_shrink_then_outer_oracle() {
        let mut rng = StdRng::seed_from_u64(31);
        let (n, d) = (10, 3);
        let samples = DMatrix::from_fn(n, d, |_, _| rng.random_range(-3.0..3.0));
        let tau = 1.4;
        let cov = shrinkage_covariance(&samples, tau).unwrap();
        let mut oracle = DMatrix::<f64>::zeros(d, d);
        for i in 0..n {
            let row = DVector::from_row_slice(samples.row(i).transpose().as_slice());
            let shrunk = shrink_norm(&row, tau, 4).unwrap();
            oracle += &shrunk * shrunk.transpose();
        }
        oracle /= n as f64;
        assert_relative_eq!((cov - oracle).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn truncated_covariance_examples_and_oracle() {
        let samples = mat(1, 2, &[3.0, 0.0]);
        let cov = truncated_covariance_elementwise(&samples, 2.0).unwrap();
        assert_eq!(cov[(0, 0)], 4.0);

        let mut rng = StdRng::seed_from_u64(37);
        let (n, d) = (10, 4);
        let samples = DMatrix::from_fn(n, d, |_, _| rng.random_range(-3.0..3.0));
        // infinite threshold reproduces the ordinary second moment matrix
        let cov_inf = truncated_covariance_elementwise(&samples, f64::INFINITY).unwrap();
        let classical = samples.tr_mul(&samples) / n as f64;
        assert_eq!(cov_inf, classical);

        let tau = 1.25;
        let cov = truncated_covariance_elementwise(&samples, tau).unwrap();
        let mut oracle = DMatrix::<f64>::zeros(d, d);
        for i in 0..n {
            let row: Vec<f64> =
                (0..d).map(|j| samples[(i, j)].clamp(-tau, tau)).collect();
            for a in 0..d {
                for b in 0..d {
                    oracle[(a, b)] += row[a] * row[b] / n as f64;
                }
            }
        }
        assert_relative_eq!((&cov - &oracle).norm(), 0.0, epsilon = 1e-12);
        assert!(cov.iter().all(|&v| v.abs() <= tau * tau + 1e-12));
    }

    #[test]
    fn data_factored_apply_matches_expansion() {
        let mut rng = StdRng::seed_from_u64(41);
        let (n, d1, d2) = (6, 2, 3);
        let rows = DMatrix::from_fn(n, d1 * d2, |_, _| rng.random_range(-1.0..1.0));
        let gram = GramMatrix::DataFactored { rows: rows.clone() };
        let theta = DMatrix::from_fn(d1, d2, |_, _| rng.random_range(-1.0..1.0));
        let applied = gram.apply(&theta);
        let dense = gram.expand(d1, d2);
        let vec_theta = DVector::from_column_slice(theta.as_slice());
        let expect = &dense * vec_theta;
        for (i, &v) in expect.iter().enumerate() {
            assert_relative_eq!(applied.as_slice()[i], v, epsilon = 1e-12);
        }
        // the expansion is (rows^T rows) / n, symmetric PSD by construction
        let direct = rows.tr_mul(&rows) / n as f64;
        assert_relative_eq!((dense - direct).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_datasets_are_rejected() {
        let data = TraceDataset::diagonal(DMatrix::zeros(0, 3), DVector::zeros(0)).unwrap();
        assert!(matches!(
            moments_linear(&data, Regime::SubGaussianDesign, ShrinkThresholds::identity()),
            Err(Error::EmptyDataset(_))
        ));
        let empty = DMatrix::<f64>::zeros(0, 2);
        assert!(matches!(
            shrinkage_covariance(&empty, 1.0),
            Err(Error::EmptyDataset(_))
        ));
    }
}
