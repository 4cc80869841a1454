//! Output writing: `errors.csv`, `summary.csv` and `meta.txt`.
//!
//! All statistical columns are deterministic functions of the
//! configuration and seed; `runtime_ms` is measured wall time. `meta.txt`
//! lists every constant that influenced the run, so a sweep can be
//! reproduced from its outputs alone.

use crate::config::{lambda_rule_meta, RunConfig, RunPayload};
use anyhow::{Context, Result};
use shrinkreg::shrinkage::{RateFormula, ShrinkKind, ShrinkageRule};
use shrinkreg::simulation::{ErrorTable, SampleLaw, NoiseModel, RNG_ALGORITHM};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn write_outputs(config: &RunConfig, table: &ErrorTable, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    fs::write(out_dir.join("errors.csv"), table.to_csv()).context("writing errors.csv")?;
    fs::write(out_dir.join("summary.csv"), table.summary_csv()).context("writing summary.csv")?;
    fs::write(out_dir.join("meta.txt"), render_meta(config, table)).context("writing meta.txt")?;
    Ok(())
}

fn render_meta(config: &RunConfig, table: &ErrorTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "shrinkreg {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "command = {}", config.command.as_str());
    if let Some(name) = &config.preset_name {
        let _ = writeln!(out, "preset = {name}");
    }
    let _ = writeln!(out, "rng = {RNG_ALGORITHM}");
    let _ = writeln!(out, "jobs = {}", config.jobs);
    let _ = writeln!(out, "rows = {}", table.rows.len());
    let _ = writeln!(out, "error_column = {}", table.error_label);
    match &config.payload {
        RunPayload::Estimation(exp) => {
            let _ = writeln!(out, "problem = {:?}", exp.kind);
            let _ = writeln!(out, "regime = {:?}", exp.regime);
            let grid: Vec<String> =
                exp.grid.iter().map(|p| format!("(d={}, n={})", p.d, p.samples)).collect();
            let _ = writeln!(out, "grid = {}", grid.join(" "));
            let _ = writeln!(out, "replications = {}", exp.replications);
            let _ = writeln!(out, "seed = {}", exp.base_seed);
            let _ = writeln!(out, "noise = {}", noise_meta(&exp.noise));
            let _ = writeln!(
                out,
                "target = rank {} normalization {:?}",
                exp.target_rank, exp.target_normalization
            );
            if exp.spikiness > 0.0 {
                let _ = writeln!(out, "spikiness = {}", exp.spikiness);
            }
            let _ = writeln!(
                out,
                "robust.shrink.response = {}",
                shrink_rule_meta(&exp.robust.rules.response)
            );
            let _ = writeln!(
                out,
                "robust.shrink.design = {}",
                shrink_rule_meta(&exp.robust.rules.design)
            );
            let _ = writeln!(out, "robust.lambda = {}", lambda_rule_meta(&exp.robust.lambda));
            let _ = writeln!(out, "standard.shrink = identity");
            let _ =
                writeln!(out, "standard.lambda = {}", lambda_rule_meta(&exp.standard.lambda));
            let _ = writeln!(
                out,
                "solver = tol {:e} max_iter {} prsm_alpha {} prsm_beta {} admm_rho {} admm_gamma {}",
                exp.solver.tol,
                exp.solver.max_iter,
                exp.solver.prsm_alpha,
                exp.solver.prsm_beta,
                exp.solver.admm_rho,
                exp.solver.admm_gamma
            );
        }
        RunPayload::Covariance(specs) => {
            for (i, spec) in specs.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "bench[{i}] = d/n {} n_grid {:?} law {} replications {} seed {} \
                     tau_const {} delta {} bound_r {}",
                    spec.d_over_n,
                    spec.n_grid,
                    match spec.law {
                        SampleLaw::Gaussian => "gaussian",
                        SampleLaw::StudentT3 => "t3",
                    },
                    spec.replications,
                    spec.base_seed,
                    spec.shrink_constant,
                    spec.delta,
                    spec.bound_r
                );
            }
            let _ = writeln!(out, "sigma = diag(4, 1, ..., 1)");
        }
    }
    out
}

fn noise_meta(noise: &NoiseModel) -> String {
    match noise {
        NoiseModel::LogNormal { sigma2, divisor } => {
            format!("log-normal sigma2={sigma2} divisor={divisor} (centered by exp(sigma2/2))")
        }
        NoiseModel::TruncCauchy { cap, divisor } => {
            format!("trunc-cauchy cap={cap} divisor={divisor} (one-sided cap)")
        }
        NoiseModel::Gaussian { sigma2 } => format!("gaussian sigma2={sigma2}"),
    }
}

fn shrink_rule_meta(rule: &ShrinkageRule) -> String {
    if rule.kind == ShrinkKind::Identity {
        return "identity".into();
    }
    let kind = match rule.kind {
        ShrinkKind::ScalarTruncate => "scalar-truncate",
        ShrinkKind::ElementwiseTruncate => "elementwise-truncate",
        ShrinkKind::NormShrink { order } => {
            return format!("l{order}-shrink constant={} rate={}", rule.constant, rate_name(rule.rate))
        }
        ShrinkKind::Identity => unreachable!(),
    };
    format!("{kind} constant={} rate={}", rule.constant, rate_name(rule.rate))
}

fn rate_name(rate: RateFormula) -> &'static str {
    match rate {
        RateFormula::SqrtNOverLogD => "sqrt(N / log d)",
        RateFormula::QuarterNOverLogD => "(N / log d)^(1/4)",
        RateFormula::SqrtNOverDSum => "sqrt(N / (d1+d2))",
        RateFormula::SqrtNOverDMaxLogDSum => "sqrt(N / (max(d1,d2) log(d1+d2)))",
        RateFormula::QuarterNOverDSumLogDSum => "(n / ((d1+d2) log(d1+d2)))^(1/4)",
        RateFormula::QuarterNROverDeltaLogD => "(n R / (delta log d))^(1/4)",
    }
}
