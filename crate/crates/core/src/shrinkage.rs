//! Data robustification operators and the threshold rate rules that
//! parameterize them.
//!
//! A scalar response is truncated to `sgn(y) * min(|y|, tau)`; a vector is
//! either truncated coordinate-wise or rescaled so that its l2 or l4 norm
//! does not exceed `tau`. The threshold itself is never a free guess: each
//! rule couples a rate formula in the sample size and dimensions with a
//! single tunable constant, and an infinite threshold recovers the
//! classical (non-robust) pipeline exactly.

use crate::error::{require_positive, Error, Result};
use nalgebra::DVector;

/// Symbolic threshold rates, evaluated against the problem size.
///
/// Each variant is one of the forms the tuning theory prescribes; the names
/// spell out the algebra, e.g. `SqrtNOverLogD` is `sqrt(N / log d)` with
/// `d = max(d1, d2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFormula {
    /// `sqrt(N / log d)` — scalar response truncation, sub-Gaussian design.
    SqrtNOverLogD,
    /// `(N / log d)^(1/4)` — response and design truncation under bounded
    /// moment designs.
    QuarterNOverLogD,
    /// `sqrt(N / (d1 + d2))` — compressed-sensing response truncation.
    SqrtNOverDSum,
    /// `sqrt(N / (max(d1,d2) * log(d1 + d2)))` — matrix completion and
    /// multi-task l2 response shrinkage.
    SqrtNOverDMaxLogDSum,
    /// `(n / ((d1 + d2) * log(d1 + d2)))^(1/4)` — multi-task l4 shrinkage
    /// under bounded moment designs.
    QuarterNOverDSumLogDSum,
    /// `(n * R / (delta * log d))^(1/4)` — l4 shrinkage for covariance
    /// estimation under a bounded fourth moment `R`.
    QuarterNROverDeltaLogD,
}

/// Inputs a [`RateFormula`] is evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct RateContext {
    pub d1: usize,
    pub d2: usize,
    /// Sample count (`N` in the vectorized model, `n` for row samples).
    pub samples: usize,
    /// Confidence parameter; 1.0 when the rate does not reference it.
    pub delta: f64,
    /// Fourth-moment bound; 1.0 when the rate does not reference it.
    pub bound_r: f64,
}

impl RateContext {
    pub fn new(d1: usize, d2: usize, samples: usize) -> Self {
        RateContext { d1, d2, samples, delta: 1.0, bound_r: 1.0 }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_bound(mut self, bound_r: f64) -> Self {
        self.bound_r = bound_r;
        self
    }
}

impl RateFormula {
    /// Evaluates the rate. Strictly positive for all valid inputs.
    pub fn evaluate(&self, ctx: &RateContext) -> Result<f64> {
        if ctx.d1 == 0 || ctx.d2 == 0 {
            return Err(Error::invalid("dimensions must be at least 1"));
        }
        if ctx.samples == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let n = ctx.samples as f64;
        let d_max = ctx.d1.max(ctx.d2) as f64;
        let d_sum = (ctx.d1 + ctx.d2) as f64;
        let rate = match self {
            RateFormula::SqrtNOverLogD => (n / positive_log(d_max)?).sqrt(),
            RateFormula::QuarterNOverLogD => (n / positive_log(d_max)?).powf(0.25),
            RateFormula::SqrtNOverDSum => (n / d_sum).sqrt(),
            RateFormula::SqrtNOverDMaxLogDSum => (n / (d_max * positive_log(d_sum)?)).sqrt(),
            RateFormula::QuarterNOverDSumLogDSum => {
                (n / (d_sum * positive_log(d_sum)?)).powf(0.25)
            }
            RateFormula::QuarterNROverDeltaLogD => {
                require_positive(ctx.delta, "rate delta")?;
                require_positive(ctx.bound_r, "moment bound R")?;
                (n * ctx.bound_r / (ctx.delta * positive_log(d_max)?)).powf(0.25)
            }
        };
        debug_assert!(rate > 0.0);
        Ok(rate)
    }
}

fn positive_log(d: f64) -> Result<f64> {
    let log = d.ln();
    if log <= 0.0 {
        return Err(Error::invalid(format!(
            "rate requires log of a dimension argument > 1, got {d}"
        )));
    }
    Ok(log)
}

/// Which operator a rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkKind {
    /// `sgn(y) * min(|y|, tau)` on scalars.
    ScalarTruncate,
    /// Coordinate-wise scalar truncation on vectors.
    ElementwiseTruncate,
    /// Rescale a vector so its l_order norm is at most `tau`.
    NormShrink { order: u8 },
    /// No-op; threshold treated as infinite.
    Identity,
}

/// A robustification recipe: operator kind, rate formula and the tuned
/// multiplier the theory leaves free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageRule {
    pub kind: ShrinkKind,
    pub rate: RateFormula,
    pub constant: f64,
}

impl ShrinkageRule {
    pub fn new(kind: ShrinkKind, rate: RateFormula, constant: f64) -> Result<Self> {
        require_positive(constant, "shrinkage constant")?;
        if let ShrinkKind::NormShrink { order } = kind {
            if order != 2 && order != 4 {
                return Err(Error::invalid("norm shrink order must be 2 or 4"));
            }
        }
        Ok(ShrinkageRule { kind, rate, constant })
    }

    /// The identity rule: no shrinkage, irrespective of rate and constant.
    pub fn identity() -> Self {
        ShrinkageRule { kind: ShrinkKind::Identity, rate: RateFormula::SqrtNOverLogD, constant: 1.0 }
    }

    /// Evaluates `constant * rate` for this rule; infinite for identity.
    pub fn threshold(&self, ctx: &RateContext) -> Result<f64> {
        if self.kind == ShrinkKind::Identity {
            return Ok(f64::INFINITY);
        }
        Ok(self.constant * self.rate.evaluate(ctx)?)
    }

    /// Applies this rule to a scalar, with `tau` already resolved.
    pub fn apply_scalar(&self, y: f64, tau: f64) -> Result<f64> {
        match self.kind {
            ShrinkKind::Identity => Ok(y),
            ShrinkKind::ScalarTruncate => truncate_scalar(y, tau),
            _ => Err(Error::invalid("rule kind does not apply to scalars")),
        }
    }

    /// Applies this rule to a vector, with `tau` already resolved.
    pub fn apply_vector(&self, x: &DVector<f64>, tau: f64) -> Result<DVector<f64>> {
        match self.kind {
            ShrinkKind::Identity => Ok(x.clone()),
            ShrinkKind::ElementwiseTruncate => truncate_elementwise(x, tau),
            ShrinkKind::NormShrink { order } => shrink_norm(x, tau, order),
            ShrinkKind::ScalarTruncate => Err(Error::invalid("scalar rule applied to a vector")),
        }
    }
}

/// Truncates a scalar: `sgn(y) * min(|y|, tau)`.
///
/// `tau` may be `+inf`, in which case the input is returned unchanged.
pub fn truncate_scalar(y: f64, tau: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::invalid(format!("non-finite input {y}")));
    }
    check_tau(tau)?;
    Ok(y.clamp(-tau, tau))
}

/// Coordinate-wise truncation; the result has max-norm at most `tau`.
pub fn truncate_elementwise(x: &DVector<f64>, tau: f64) -> Result<DVector<f64>> {
    check_tau(tau)?;
    let mut out = x.clone();
    for v in out.iter_mut() {
        if !v.is_finite() {
            return Err(Error::invalid(format!("non-finite coordinate {v}")));
        }
        *v = v.clamp(-tau, tau);
    }
    Ok(out)
}

/// Rescales `x` so its l_order norm is at most `tau`, preserving direction.
///
/// Returns `x` unchanged when the norm is already within the threshold or
/// when `x = 0` (the scaling singularity is removable).
pub fn shrink_norm(x: &DVector<f64>, tau: f64, order: u8) -> Result<DVector<f64>> {
    check_tau(tau)?;
    if order != 2 && order != 4 {
        return Err(Error::invalid("norm shrink order must be 2 or 4"));
    }
    let norm = lp_norm(x, order)?;
    if norm <= tau {
        return Ok(x.clone());
    }
    Ok(x * (tau / norm))
}

/// The l2 or l4 norm of a vector.
pub fn lp_norm(x: &DVector<f64>, order: u8) -> Result<f64> {
    let mut acc = 0.0;
    for &v in x.iter() {
        if !v.is_finite() {
            return Err(Error::invalid(format!("non-finite coordinate {v}")));
        }
        let sq = v * v;
        acc += if order == 2 { sq } else { sq * sq };
    }
    Ok(if order == 2 { acc.sqrt() } else { acc.powf(0.25) })
}

fn check_tau(tau: f64) -> Result<()> {
    require_positive(tau, "threshold")
}
