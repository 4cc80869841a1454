//! Configuration resolution: preset, config file, then command-line
//! overrides, in increasing precedence.
//!
//! The config file is TOML with fixed sections; unknown keys are rejected
//! at parse time and every validation failure names the offending key.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use shrinkreg::estimators::{LambdaForm, LambdaRule, ProblemKind, ShrinkRules};
use shrinkreg::moments::Regime;
use shrinkreg::simulation::presets::{self, Preset};
use shrinkreg::simulation::{
    CovarianceBenchSpec, ExperimentSpec, GridPoint, NoiseModel, SampleLaw, TargetNormalization,
};
use std::path::{Path, PathBuf};

/// Which action the runner performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Fit,
    Simulate,
    CovarianceBench,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Fit => "fit",
            CommandKind::Simulate => "simulate",
            CommandKind::CovarianceBench => "covariance-bench",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "fit" => Ok(CommandKind::Fit),
            "simulate" => Ok(CommandKind::Simulate),
            "covariance-bench" => Ok(CommandKind::CovarianceBench),
            other => bail!("invalid value for key `command`: {other}"),
        }
    }
}

/// Flag-level overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub reps: Option<u32>,
    pub jobs: Option<usize>,
    pub tau_const: Option<f64>,
    pub lambda_const: Option<f64>,
    pub delta: Option<f64>,
}

/// A fully resolved run: what to execute and where to write.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub preset_name: Option<String>,
    pub payload: RunPayload,
}

#[derive(Debug, Clone)]
pub enum RunPayload {
    Estimation(Box<ExperimentSpec>),
    Covariance(Vec<CovarianceBenchSpec>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    preset: Option<String>,
    problem: Option<ProblemSection>,
    noise: Option<NoiseSection>,
    sweep: Option<SweepSection>,
    robust: Option<MethodSection>,
    standard: Option<MethodSection>,
    solver: Option<SolverSection>,
    target: Option<TargetSection>,
    covariance: Option<CovarianceSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    kind: Option<String>,
    d: Option<usize>,
    regime: Option<String>,
    spikiness: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    family: Option<String>,
    sigma2: Option<f64>,
    divisor: Option<f64>,
    cap: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    n_grid: Option<Vec<usize>>,
    replications: Option<i64>,
    seed: Option<u64>,
    jobs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MethodSection {
    tau_const: Option<f64>,
    lambda_const: Option<f64>,
    delta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    tol: Option<f64>,
    max_iter: Option<usize>,
    prsm_alpha: Option<f64>,
    prsm_beta: Option<f64>,
    admm_rho: Option<f64>,
    admm_gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetSection {
    rank: Option<usize>,
    normalization: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovarianceSection {
    ratios: Option<Vec<f64>>,
    law: Option<String>,
    tau_const: Option<f64>,
    delta: Option<f64>,
    bound_r: Option<f64>,
}

/// Parses and resolves one run: preset defaults, then file sections, then
/// command-line flags.
pub fn resolve(
    command: CommandKind,
    config_path: Option<&Path>,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<RunConfig> {
    let file: ConfigFile = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            toml::from_str(&text)
                .map_err(|e| anyhow!("config parse error in {}: {e}", path.display()))?
        }
        None => ConfigFile::default(),
    };
    if let Some(cmd) = &file.command {
        // fit and simulate share the estimation payload; only a
        // covariance-bench config is incompatible with them (and vice versa)
        let file_cmd = CommandKind::parse(cmd)?;
        let file_is_cov = file_cmd == CommandKind::CovarianceBench;
        let run_is_cov = command == CommandKind::CovarianceBench;
        if file_is_cov != run_is_cov {
            bail!(
                "config key `command` is {} but the {} subcommand was invoked",
                file_cmd.as_str(),
                command.as_str()
            );
        }
    }
    let preset_name = overrides.preset.clone().or(file.preset.clone());
    let jobs = overrides.jobs.or(file.sweep.as_ref().and_then(|s| s.jobs)).unwrap_or(0);

    let payload = match command {
        CommandKind::CovarianceBench => {
            RunPayload::Covariance(resolve_covariance(&file, preset_name.as_deref(), overrides)?)
        }
        _ => RunPayload::Estimation(Box::new(resolve_estimation(
            &file,
            preset_name.as_deref(),
            overrides,
            command,
        )?)),
    };

    Ok(RunConfig {
        command,
        out_dir: out_dir.to_path_buf(),
        jobs,
        preset_name,
        payload,
    })
}

fn resolve_estimation(
    file: &ConfigFile,
    preset_name: Option<&str>,
    overrides: &Overrides,
    command: CommandKind,
) -> Result<ExperimentSpec> {
    let mut exp = match preset_name {
        Some(name) => match presets::preset(name) {
            Some(Preset::Estimation(exp)) => *exp,
            Some(Preset::Covariance(_)) => {
                bail!("preset {name} is a covariance benchmark; use the covariance-bench command")
            }
            None => bail!("unknown preset {name}"),
        },
        None => experiment_from_sections(file)?,
    };

    // file sections override preset values
    if let Some(problem) = &file.problem {
        if preset_name.is_some() && problem.kind.is_some() {
            bail!("key `problem.kind` cannot override a preset's problem kind");
        }
        if let Some(d) = problem.d {
            validate_positive(d as f64, "problem.d")?;
            for point in &mut exp.grid {
                point.d = d;
            }
        }
        if let Some(regime) = &problem.regime {
            exp.regime = parse_regime(regime)?;
            let tau = exp.robust.rules.response.constant;
            exp.robust.rules = ShrinkRules::default_for(exp.kind, exp.regime, tau)
                .map_err(|e| anyhow!("problem.regime: {e}"))?;
        }
        if let Some(r) = problem.spikiness {
            validate_positive(r, "problem.spikiness")?;
            exp.spikiness = r;
        }
    }
    if let Some(noise) = &file.noise {
        exp.noise = merge_noise(&exp.noise, noise)?;
    }
    if let Some(sweep) = &file.sweep {
        if let Some(grid) = &sweep.n_grid {
            if grid.is_empty() {
                bail!("key `sweep.n_grid` must not be empty");
            }
            let d = exp.grid.first().map(|p| p.d).unwrap_or(presets::DEFAULT_DIMENSION);
            exp.grid = grid.iter().map(|&samples| GridPoint { d, samples }).collect();
        }
        if let Some(reps) = sweep.replications {
            if reps < 1 {
                bail!("key `sweep.replications` must be at least 1, got {reps}");
            }
            exp.replications = reps as u32;
        }
        if let Some(seed) = sweep.seed {
            exp.base_seed = seed;
        }
    }
    if let Some(method) = &file.robust {
        if let Some(tau) = method.tau_const {
            validate_positive(tau, "robust.tau_const")?;
            exp.robust.rules = ShrinkRules::default_for(exp.kind, exp.regime, tau)
                .map_err(|e| anyhow!("robust.tau_const: {e}"))?;
        }
        if let Some(c) = method.lambda_const {
            validate_positive(c, "robust.lambda_const")?;
            exp.robust.lambda.constant = c;
        }
        if let Some(delta) = method.delta {
            validate_positive(delta, "robust.delta")?;
            exp.robust.lambda.delta = delta;
        }
    }
    if let Some(method) = &file.standard {
        if method.tau_const.is_some() {
            bail!("key `standard.tau_const` is invalid: the standard method applies no shrinkage");
        }
        if let Some(c) = method.lambda_const {
            validate_positive(c, "standard.lambda_const")?;
            exp.standard.lambda.constant = c;
        }
        if let Some(delta) = method.delta {
            validate_positive(delta, "standard.delta")?;
            exp.standard.lambda.delta = delta;
        }
    }
    if let Some(solver) = &file.solver {
        if let Some(tol) = solver.tol {
            validate_positive(tol, "solver.tol")?;
            exp.solver.tol = tol;
        }
        if let Some(iters) = solver.max_iter {
            validate_positive(iters as f64, "solver.max_iter")?;
            exp.solver.max_iter = iters;
        }
        if let Some(v) = solver.prsm_alpha {
            exp.solver.prsm_alpha = v;
        }
        if let Some(v) = solver.prsm_beta {
            exp.solver.prsm_beta = v;
        }
        if let Some(v) = solver.admm_rho {
            exp.solver.admm_rho = v;
        }
        if let Some(v) = solver.admm_gamma {
            exp.solver.admm_gamma = v;
        }
    }
    if let Some(target) = &file.target {
        if let Some(rank) = target.rank {
            validate_positive(rank as f64, "target.rank")?;
            exp.target_rank = rank;
        }
        if let Some(norm) = &target.normalization {
            exp.target_normalization = match norm.as_str() {
                "unit" => TargetNormalization::UnitEigenvalues,
                "inv-sqrt-rank" => TargetNormalization::InvSqrtRank,
                other => bail!("invalid value for key `target.normalization`: {other}"),
            };
        }
    }

    // command-line flags take final precedence
    if let Some(seed) = overrides.seed {
        exp.base_seed = seed;
    }
    if let Some(reps) = overrides.reps {
        if reps < 1 {
            bail!("--reps must be at least 1");
        }
        exp.replications = reps;
    }
    if let Some(tau) = overrides.tau_const {
        validate_positive(tau, "--tau-const")?;
        exp.robust.rules = ShrinkRules::default_for(exp.kind, exp.regime, tau)
            .map_err(|e| anyhow!("--tau-const: {e}"))?;
    }
    if let Some(c) = overrides.lambda_const {
        validate_positive(c, "--lambda-const")?;
        exp.robust.lambda.constant = c;
        exp.standard.lambda.constant = c;
    }
    if let Some(delta) = overrides.delta {
        validate_positive(delta, "--delta")?;
        exp.robust.lambda.delta = delta;
        exp.standard.lambda.delta = delta;
    }
    if command == CommandKind::Fit {
        exp.grid.truncate(1);
        exp.replications = 1;
    }
    exp.validate().map_err(|e| anyhow!("invalid experiment: {e}"))?;
    Ok(exp)
}

fn experiment_from_sections(file: &ConfigFile) -> Result<ExperimentSpec> {
    let problem = file
        .problem
        .as_ref()
        .ok_or_else(|| anyhow!("either a preset or a [problem] section is required"))?;
    let kind = match problem.kind.as_deref() {
        Some("linear") => ProblemKind::Linear,
        Some("compressed-sensing") => ProblemKind::CompressedSensing,
        Some("matrix-completion") => ProblemKind::MatrixCompletion,
        Some("multi-task") => ProblemKind::MultiTask,
        Some(other) => bail!("invalid value for key `problem.kind`: {other}"),
        None => bail!("key `problem.kind` is required without a preset"),
    };
    let d = problem.d.unwrap_or(presets::DEFAULT_DIMENSION);
    let n_grid = file
        .sweep
        .as_ref()
        .and_then(|s| s.n_grid.clone())
        .ok_or_else(|| anyhow!("key `sweep.n_grid` is required without a preset"))?;
    let noise_section = file
        .noise
        .as_ref()
        .ok_or_else(|| anyhow!("a [noise] section is required without a preset"))?;
    let noise = noise_from_section(noise_section)?;
    Ok(match kind {
        ProblemKind::Linear => presets::linear_experiment(d, n_grid, noise),
        ProblemKind::CompressedSensing => {
            presets::compressed_sensing_experiment(d, n_grid, noise)
        }
        ProblemKind::MatrixCompletion => presets::matrix_completion_experiment(d, n_grid, noise),
        ProblemKind::MultiTask => presets::multitask_experiment(d, n_grid, noise),
    })
}

fn resolve_covariance(
    file: &ConfigFile,
    preset_name: Option<&str>,
    overrides: &Overrides,
) -> Result<Vec<CovarianceBenchSpec>> {
    let mut specs = match preset_name {
        Some(name) => match presets::preset(name) {
            Some(Preset::Covariance(specs)) => specs,
            Some(Preset::Estimation(_)) => {
                bail!("preset {name} is an estimation sweep; use the simulate command")
            }
            None => bail!("unknown preset {name}"),
        },
        None => {
            let section = file.covariance.as_ref().ok_or_else(|| {
                anyhow!("either a preset or a [covariance] section is required")
            })?;
            let law = parse_law(section.law.as_deref().unwrap_or("gaussian"))?;
            let ratios = section.ratios.clone().unwrap_or_else(|| vec![0.2, 0.5, 1.0]);
            ratios
                .into_iter()
                .map(|ratio| presets::covariance_experiment(ratio, law))
                .collect()
        }
    };
    if let Some(section) = &file.covariance {
        for spec in &mut specs {
            if let Some(law) = &section.law {
                spec.law = parse_law(law)?;
            }
            if let Some(c) = section.tau_const {
                validate_positive(c, "covariance.tau_const")?;
                spec.shrink_constant = c;
            }
            if let Some(delta) = section.delta {
                validate_positive(delta, "covariance.delta")?;
                spec.delta = delta;
            }
            if let Some(r) = section.bound_r {
                validate_positive(r, "covariance.bound_r")?;
                spec.bound_r = r;
            }
        }
        if section.ratios.is_some() && preset_name.is_some() {
            bail!("key `covariance.ratios` cannot override a preset's ratio grid");
        }
    }
    if let Some(sweep) = &file.sweep {
        for spec in &mut specs {
            if let Some(grid) = &sweep.n_grid {
                if grid.is_empty() {
                    bail!("key `sweep.n_grid` must not be empty");
                }
                spec.n_grid = grid.clone();
            }
            if let Some(reps) = sweep.replications {
                if reps < 1 {
                    bail!("key `sweep.replications` must be at least 1, got {reps}");
                }
                spec.replications = reps as u32;
            }
            if let Some(seed) = sweep.seed {
                spec.base_seed = seed;
            }
        }
    }
    for spec in &mut specs {
        if let Some(seed) = overrides.seed {
            spec.base_seed = seed;
        }
        if let Some(reps) = overrides.reps {
            if reps < 1 {
                bail!("--reps must be at least 1");
            }
            spec.replications = reps;
        }
        if let Some(c) = overrides.tau_const {
            validate_positive(c, "--tau-const")?;
            spec.shrink_constant = c;
        }
        if let Some(delta) = overrides.delta {
            validate_positive(delta, "--delta")?;
            spec.delta = delta;
        }
        spec.validate().map_err(|e| anyhow!("invalid benchmark: {e}"))?;
    }
    Ok(specs)
}

fn merge_noise(base: &NoiseModel, section: &NoiseSection) -> Result<NoiseModel> {
    let model = match &section.family {
        Some(name) => noise_from_section(&NoiseSection {
            family: Some(name.clone()),
            sigma2: section.sigma2,
            divisor: section.divisor,
            cap: section.cap,
        })?,
        None => {
            let mut model = *base;
            match &mut model {
                NoiseModel::LogNormal { sigma2, divisor } => {
                    if let Some(v) = section.sigma2 {
                        *sigma2 = v;
                    }
                    if let Some(v) = section.divisor {
                        *divisor = v;
                    }
                }
                NoiseModel::TruncCauchy { cap, divisor } => {
                    if let Some(v) = section.cap {
                        *cap = v;
                    }
                    if let Some(v) = section.divisor {
                        *divisor = v;
                    }
                }
                NoiseModel::Gaussian { sigma2 } => {
                    if let Some(v) = section.sigma2 {
                        *sigma2 = v;
                    }
                }
            }
            model
        }
    };
    model.validate().map_err(|e| anyhow!("[noise]: {e}"))?;
    Ok(model)
}

fn noise_from_section(section: &NoiseSection) -> Result<NoiseModel> {
    match section.family.as_deref() {
        Some("log-normal") => Ok(NoiseModel::LogNormal {
            sigma2: section.sigma2.unwrap_or(1.0),
            divisor: section.divisor.unwrap_or(1.0),
        }),
        Some("trunc-cauchy") => Ok(NoiseModel::TruncCauchy {
            cap: section.cap.unwrap_or(1e3),
            divisor: section.divisor.unwrap_or(1.0),
        }),
        Some("gaussian") => Ok(NoiseModel::Gaussian { sigma2: section.sigma2.unwrap_or(1.0) }),
        Some(other) => bail!("invalid value for key `noise.family`: {other}"),
        None => bail!("key `noise.family` is required"),
    }
}

fn parse_regime(name: &str) -> Result<Regime> {
    match name {
        "sub-gaussian" => Ok(Regime::SubGaussianDesign),
        "bounded-moment" => Ok(Regime::BoundedMomentDesign),
        other => bail!("invalid value for key `problem.regime`: {other}"),
    }
}

fn parse_law(name: &str) -> Result<SampleLaw> {
    match name {
        "gaussian" => Ok(SampleLaw::Gaussian),
        "t3" => Ok(SampleLaw::StudentT3),
        other => bail!("invalid value for key `covariance.law`: {other}"),
    }
}

fn validate_positive(value: f64, key: &str) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        bail!("key `{key}` must be positive, got {value}")
    }
}

/// Description of the lambda rule for metadata output.
pub fn lambda_form_name(form: LambdaForm) -> &'static str {
    match form {
        LambdaForm::LinearLogD => "sqrt(delta log d / N)",
        LambdaForm::CsDimSum => "sqrt((d1+d2) / N)",
        LambdaForm::McDimMaxLog => "sqrt(delta max(d1,d2) log(d1+d2) / N)",
        LambdaForm::MtDimSumLog => "(1/d2) sqrt(delta (d1+d2) log(d1+d2) / n)",
    }
}

/// Description of a lambda rule instance for metadata output.
pub fn lambda_rule_meta(rule: &LambdaRule) -> String {
    format!(
        "constant={} delta={} form={}",
        rule.constant,
        rule.delta,
        lambda_form_name(rule.form)
    )
}
