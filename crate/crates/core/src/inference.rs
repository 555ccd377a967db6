//! Sampling uncertainty for estimated bounds.
//!
//! `tau_hat` and `gamma_hat` are treated as independent normal estimates with
//! binomial standard errors. Endpoint standard errors come from the delta
//! method with central finite differences, and confidence intervals for the
//! identified set either intersect two one-sided intervals or use the
//! Imbens-Manski critical value.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::bounds::{self, AssumptionSet, BoundMethod, BoundsError, PrevalenceBounds, TestingSnapshot};
use crate::interval::Interval;

/// Relative finite-difference step.
pub const FD_RELATIVE_STEP: f64 = 1e-6;
/// Absolute floor on the finite-difference step.
pub const FD_ABSOLUTE_STEP: f64 = 1e-9;
/// Bisection tolerance for the Imbens-Manski critical value.
pub const CRITICAL_VALUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("snapshot carries no raw counts; standard errors need population and tested counts")]
    MissingCounts,
    #[error("no tests were administered; the yield has no sampling distribution")]
    ZeroTested,
    #[error("endpoint is not differentiable at tau={tau}, gamma={gamma}: {source}")]
    NonDifferentiablePoint {
        tau: f64,
        gamma: f64,
        #[source]
        source: BoundsError,
    },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithSe {
    pub value: f64,
    pub se: f64,
}

impl EstimateWithSe {
    /// Zero standard error: the estimate sits on the boundary of [0, 1] and
    /// the normal approximation says nothing.
    pub fn is_degenerate(&self) -> bool {
        self.se == 0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CiMethod {
    #[default]
    IntersectOneSided,
    ImbensManski,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiConfig {
    pub alpha: f64,
    pub method: CiMethod,
}

impl CiConfig {
    pub fn new(alpha: f64, method: CiMethod) -> Result<Self, InferenceError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(InferenceError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, method })
    }
}

impl Default for CiConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            method: CiMethod::IntersectOneSided,
        }
    }
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Upper `p` quantile of the standard normal, `z_p`.
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

/// Binomial standard errors for `tau_hat` (over the population) and
/// `gamma_hat` (over the tested).
pub fn standard_errors(
    snapshot: &TestingSnapshot,
) -> Result<(EstimateWithSe, EstimateWithSe), InferenceError> {
    let (Some(n_population), Some(n_tested)) = (snapshot.n_population, snapshot.n_tested) else {
        return Err(InferenceError::MissingCounts);
    };
    if n_tested == 0 {
        return Err(InferenceError::ZeroTested);
    }
    let se = |p: f64, n: u64| (p * (1.0 - p) / n as f64).sqrt();
    Ok((
        EstimateWithSe {
            value: snapshot.tau,
            se: se(snapshot.tau, n_population),
        },
        EstimateWithSe {
            value: snapshot.gamma,
            se: se(snapshot.gamma, n_tested),
        },
    ))
}

fn fd_step(x: f64) -> f64 {
    (FD_RELATIVE_STEP * x.abs()).max(FD_ABSOLUTE_STEP)
}

/// Central finite-difference gradient `(df/dtau, df/dgamma)` of an endpoint
/// evaluator.
pub fn gradient<F>(f: F, tau: f64, gamma: f64) -> Result<(f64, f64), InferenceError>
where
    F: Fn(f64, f64) -> Result<f64, BoundsError>,
{
    let eval = |t: f64, g: f64| {
        f(t, g).map_err(|source| InferenceError::NonDifferentiablePoint { tau, gamma, source })
    };
    let ht = fd_step(tau);
    let hg = fd_step(gamma);
    let d_tau = (eval(tau + ht, gamma)? - eval(tau - ht, gamma)?) / (2.0 * ht);
    let d_gamma = (eval(tau, gamma + hg)? - eval(tau, gamma - hg)?) / (2.0 * hg);
    Ok((d_tau, d_gamma))
}

/// Delta-method standard error of an endpoint `f(tau, gamma)`:
/// `sqrt((df/dtau)^2 se_tau^2 + (df/dgamma)^2 se_gamma^2)`.
pub fn endpoint_se<F>(
    f: F,
    snapshot: &TestingSnapshot,
    ses: (&EstimateWithSe, &EstimateWithSe),
) -> Result<f64, InferenceError>
where
    F: Fn(f64, f64) -> Result<f64, BoundsError>,
{
    let (d_tau, d_gamma) = gradient(f, snapshot.tau, snapshot.gamma)?;
    let (tau, gamma) = ses;
    Ok(((d_tau * tau.se).powi(2) + (d_gamma * gamma.se).powi(2)).sqrt())
}

/// Critical value `c` solving `Phi(c + width / sigma_max) - Phi(-c) = 1 - alpha`.
/// Lies between `z_{1-alpha}` (infinitely long interval) and `z_{1-alpha/2}`
/// (point identification).
pub fn imbens_manski_critical_value(width: f64, sigma_max: f64, alpha: f64) -> f64 {
    let normal = standard_normal();
    let ratio = if sigma_max > 0.0 {
        width.max(0.0) / sigma_max
    } else if width > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let coverage = |c: f64| normal.cdf(c + ratio) - normal.cdf(-c) - (1.0 - alpha);
    let mut lo = normal.inverse_cdf(1.0 - alpha);
    let mut hi = normal.inverse_cdf(1.0 - alpha / 2.0);
    while hi - lo > CRITICAL_VALUE_TOL {
        let mid = 0.5 * (lo + hi);
        if coverage(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Confidence interval for prevalence given estimated bounds and the standard
/// errors of their endpoints, clipped to `[0, 1]`.
pub fn confidence_interval(estimate: &Interval, endpoint_ses: (f64, f64), config: &CiConfig) -> Interval {
    let (se_lo, se_hi) = endpoint_ses;
    let c = match config.method {
        CiMethod::IntersectOneSided => normal_quantile(1.0 - config.alpha),
        CiMethod::ImbensManski => {
            imbens_manski_critical_value(estimate.width(), se_lo.max(se_hi), config.alpha)
        }
    };
    Interval {
        lo: estimate.lo - c * se_lo,
        hi: estimate.hi + c * se_hi,
    }
    .clip_unit()
}

/// Estimated bounds with endpoint standard errors and a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceCi {
    pub estimate: PrevalenceBounds,
    pub endpoint_se: (f64, f64),
    pub ci: Interval,
}

/// Bounds of one family at `snapshot` together with their confidence interval.
pub fn prevalence_ci(
    method: BoundMethod,
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
    config: &CiConfig,
) -> Result<PrevalenceCi, InferenceError> {
    let estimate = bounds::evaluate(method, snapshot, assumptions)?;
    let (tau_se, gamma_se) = standard_errors(snapshot)?;
    let endpoint = |upper: bool| {
        move |tau: f64, gamma: f64| {
            let s = TestingSnapshot::new(tau, gamma)?;
            let b = bounds::evaluate(method, &s, assumptions)?;
            Ok(if upper { b.interval.hi } else { b.interval.lo })
        }
    };
    let se_lo = endpoint_se(endpoint(false), snapshot, (&tau_se, &gamma_se))?;
    let se_hi = endpoint_se(endpoint(true), snapshot, (&tau_se, &gamma_se))?;
    let ci = confidence_interval(&estimate.interval, (se_lo, se_hi), config);
    Ok(PrevalenceCi {
        estimate,
        endpoint_se: (se_lo, se_hi),
        ci,
    })
}
