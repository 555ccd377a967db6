//! Closed-form prevalence bounds.
//!
//! Everything here is a pure function of an observed [`TestingSnapshot`]
//! (testing rate `tau` and test yield `gamma`) and an [`AssumptionSet`]
//! (interval bounds on sensitivity `pi`, selectivity `kappa` and, for the
//! NPV-based comparison bounds, negative predictive value `eta`).
//!
//! Specificity is fixed at one throughout: a positive result is always a true
//! positive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalError};

/// Tolerance for checking that `tau` agrees with `n_tested / n_population`.
const COUNT_CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{name} = {value} is not a probability")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error(transparent)]
    InvalidInterval(#[from] IntervalError),
    #[error("invalid assumption: {0}")]
    InvalidAssumption(String),
    #[error("assumptions refuted by data: test yield {gamma} exceeds sensitivity {pi}")]
    AssumptionInfeasible { gamma: f64, pi: f64 },
    #[error("test yield of 1 leaves no negative results; NPV is undefined")]
    DegenerateYield,
    #[error("NPV bounds imply a nonpositive denominator (1 - gamma) * eta = {0}")]
    DegenerateDenominator(f64),
    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),
    #[error("IFR undefined: {deaths} deaths but prevalence bounded at zero")]
    Undefined { deaths: u64 },
}

fn check_probability(name: &'static str, value: f64) -> Result<f64, BoundsError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(BoundsError::InvalidProbability { name, value })
    }
}

/// Observed testing rate and test yield for one population at one date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestingSnapshot {
    /// Share of the population tested, `Pr(T=1)`.
    pub tau: f64,
    /// Share of tests returning positive, `Pr(R=1 | T=1)`.
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_population: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_tested: Option<u64>,
}

impl TestingSnapshot {
    pub fn new(tau: f64, gamma: f64) -> Result<Self, BoundsError> {
        Ok(Self {
            tau: check_probability("tau", tau)?,
            gamma: check_probability("gamma", gamma)?,
            n_population: None,
            n_tested: None,
        })
    }

    /// Builds a snapshot from raw counts. With no tests the yield is defined
    /// as zero; see [`TestingSnapshot::has_tests`].
    pub fn from_counts(
        n_population: u64,
        n_tested: u64,
        n_positive: u64,
    ) -> Result<Self, BoundsError> {
        if n_population == 0 {
            return Err(BoundsError::InconsistentCounts(
                "population must be positive".into(),
            ));
        }
        if n_tested > n_population {
            return Err(BoundsError::InconsistentCounts(format!(
                "{n_tested} tested exceeds population {n_population}"
            )));
        }
        if n_positive > n_tested {
            return Err(BoundsError::InconsistentCounts(format!(
                "{n_positive} positives exceeds {n_tested} tests"
            )));
        }
        let tau = n_tested as f64 / n_population as f64;
        let gamma = if n_tested == 0 {
            0.0
        } else {
            n_positive as f64 / n_tested as f64
        };
        Ok(Self {
            tau,
            gamma,
            n_population: Some(n_population),
            n_tested: Some(n_tested),
        })
    }

    /// Attaches raw counts to a snapshot built from rates.
    pub fn with_counts(mut self, n_population: u64, n_tested: u64) -> Result<Self, BoundsError> {
        if n_population == 0 || n_tested > n_population {
            return Err(BoundsError::InconsistentCounts(format!(
                "{n_tested} tested out of population {n_population}"
            )));
        }
        let implied = n_tested as f64 / n_population as f64;
        if (implied - self.tau).abs() > COUNT_CONSISTENCY_TOL {
            return Err(BoundsError::InconsistentCounts(format!(
                "tau = {} but counts imply {implied}",
                self.tau
            )));
        }
        self.n_population = Some(n_population);
        self.n_tested = Some(n_tested);
        Ok(self)
    }

    /// False when nobody was tested, in which case `gamma` is a placeholder.
    pub fn has_tests(&self) -> bool {
        match self.n_tested {
            Some(n) => n > 0,
            None => self.tau > 0.0,
        }
    }
}

/// Maintained assumptions on sensitivity, selectivity and (optionally) NPV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionSet {
    /// Sensitivity `Pr(R=1 | C=1, T=1)`.
    pub pi: Interval,
    /// Odds-ratio factor of being tested, infected vs. uninfected.
    pub kappa: Interval,
    /// Negative predictive value, used only by the NPV-based bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Interval>,
}

impl AssumptionSet {
    pub fn new(pi: Interval, kappa: Interval, eta: Option<Interval>) -> Result<Self, BoundsError> {
        if !(pi.lo > 0.0 && pi.hi <= 1.0 && pi.lo <= pi.hi) {
            return Err(BoundsError::InvalidAssumption(format!(
                "sensitivity interval {pi} must satisfy 0 < lo <= hi <= 1"
            )));
        }
        Interval::selectivity(kappa.lo, kappa.hi)?;
        if let Some(eta) = eta {
            Interval::probability(eta.lo, eta.hi)?;
        }
        Ok(Self { pi, kappa, eta })
    }

    /// Sensitivity in [0.7, 0.95] and nonnegative selection into testing.
    pub fn headline() -> Self {
        Self {
            pi: Interval { lo: 0.7, hi: 0.95 },
            kappa: Interval { lo: 1.0, hi: f64::INFINITY },
            eta: None,
        }
    }

    /// No restriction at all. `pi.lo = 0` stands for the open limit `pi -> 0`.
    pub fn unrestricted() -> Self {
        Self {
            pi: Interval::unit(),
            kappa: Interval { lo: 0.0, hi: f64::INFINITY },
            eta: None,
        }
    }

    pub fn with_kappa(mut self, kappa: Interval) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_eta(mut self, eta: Interval) -> Self {
        self.eta = Some(eta);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundMethod {
    WorstCase,
    Sensitivity,
    SensitivitySelectivity,
    NpvBased,
}

impl BoundMethod {
    pub fn label(&self) -> &'static str {
        match self {
            BoundMethod::WorstCase => "worst-case",
            BoundMethod::Sensitivity => "sensitivity",
            BoundMethod::SensitivitySelectivity => "sensitivity+selectivity",
            BoundMethod::NpvBased => "npv-based",
        }
    }
}

/// Bounds on prevalence `Pr(C=1)` together with what produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceBounds {
    pub interval: Interval,
    pub method: BoundMethod,
    pub snapshot: TestingSnapshot,
    pub assumptions: AssumptionSet,
    /// Set when the yield equals a sensitivity endpoint, where the bounds are
    /// limits of the closed form rather than direct evaluations.
    pub degenerate: bool,
}

/// `[gamma * tau, 1]`: the only restriction is perfect specificity.
pub fn worst_case(snapshot: &TestingSnapshot) -> Interval {
    Interval {
        lo: snapshot.gamma * snapshot.tau,
        hi: 1.0,
    }
}

fn check_sensitivity(pi: f64) -> Result<f64, BoundsError> {
    if pi > 0.0 && pi <= 1.0 {
        Ok(pi)
    } else {
        Err(BoundsError::InvalidAssumption(format!(
            "sensitivity {pi} must lie in (0, 1]"
        )))
    }
}

/// Prevalence among the tested, `Pr(C=1 | T=1) = gamma / pi`.
pub fn tested_prevalence(gamma: f64, pi: f64) -> Result<f64, BoundsError> {
    check_probability("gamma", gamma)?;
    check_sensitivity(pi)?;
    if gamma > pi {
        return Err(BoundsError::AssumptionInfeasible { gamma, pi });
    }
    Ok(gamma / pi)
}

fn worst_case_bounds(snapshot: &TestingSnapshot) -> PrevalenceBounds {
    PrevalenceBounds {
        interval: worst_case(snapshot),
        method: BoundMethod::WorstCase,
        snapshot: *snapshot,
        assumptions: AssumptionSet::unrestricted(),
        degenerate: false,
    }
}

// Both endpoints of the sensitivity-only bounds, shared with the kappa = 0
// and kappa = inf limits of `prevalence_given` so that the two routes agree
// bit for bit.
#[inline]
fn perfect_targeting(snapshot: &TestingSnapshot, pi: f64) -> f64 {
    snapshot.gamma * snapshot.tau / pi
}

#[inline]
fn perverse_targeting(snapshot: &TestingSnapshot, pi: f64) -> f64 {
    (snapshot.gamma * snapshot.tau / pi + 1.0 - snapshot.tau).min(1.0)
}

fn check_pi_interval(pi: &Interval) -> Result<(), BoundsError> {
    check_sensitivity(pi.lo)?;
    check_sensitivity(pi.hi)?;
    if pi.lo > pi.hi {
        return Err(IntervalError::Reversed { lo: pi.lo, hi: pi.hi }.into());
    }
    Ok(())
}

/// Bounds under a sensitivity interval alone:
/// `[gamma tau / pi_hi, gamma tau / pi_lo + 1 - tau]`.
pub fn sensitivity_bounds(
    snapshot: &TestingSnapshot,
    pi: Interval,
) -> Result<PrevalenceBounds, BoundsError> {
    check_pi_interval(&pi)?;
    if snapshot.gamma > pi.lo {
        return Err(BoundsError::AssumptionInfeasible {
            gamma: snapshot.gamma,
            pi: pi.lo,
        });
    }
    Ok(PrevalenceBounds {
        interval: Interval {
            lo: perfect_targeting(snapshot, pi.hi),
            hi: perverse_targeting(snapshot, pi.lo),
        },
        method: BoundMethod::Sensitivity,
        snapshot: *snapshot,
        assumptions: AssumptionSet {
            pi,
            kappa: Interval { lo: 0.0, hi: f64::INFINITY },
            eta: None,
        },
        degenerate: snapshot.gamma == pi.lo,
    })
}

/// Prevalence implied by a given sensitivity `pi` and selectivity `kappa`:
///
/// `rho = (gamma/pi) * (pi + (kappa-1) tau (pi-gamma)) / (kappa (pi-gamma) + gamma)`
///
/// `kappa = f64::INFINITY` evaluates the limit `tau gamma / pi`, and
/// `kappa = 0` the limit `1 - tau + tau gamma / pi`. When `gamma == pi` every
/// tested person is infected and the expression degenerates to 1 for finite
/// `kappa`; the `kappa -> inf` limit is still `tau`.
pub fn prevalence_given(
    pi: f64,
    kappa: f64,
    snapshot: &TestingSnapshot,
) -> Result<f64, BoundsError> {
    check_sensitivity(pi)?;
    if kappa.is_nan() || kappa < 0.0 {
        return Err(BoundsError::InvalidAssumption(format!(
            "selectivity {kappa} must be nonnegative"
        )));
    }
    let gamma = snapshot.gamma;
    let tau = snapshot.tau;
    if gamma > pi {
        return Err(BoundsError::AssumptionInfeasible { gamma, pi });
    }
    if kappa == f64::INFINITY {
        return Ok(perfect_targeting(snapshot, pi));
    }
    if kappa == 0.0 {
        return Ok(perverse_targeting(snapshot, pi));
    }
    if kappa == 1.0 {
        return Ok(gamma / pi);
    }
    if gamma == pi {
        return Ok(1.0);
    }
    let miss = pi - gamma;
    let rho = (gamma / pi) * (pi + (kappa - 1.0) * tau * miss) / (kappa * miss + gamma);
    Ok(rho.clamp(0.0, 1.0))
}

/// Sharp bounds under both sensitivity and selectivity intervals. The closed
/// form decreases in both `pi` and `kappa`, so the lower endpoint is taken at
/// `(pi_hi, kappa_hi)` and the upper at `(pi_lo, kappa_lo)`.
pub fn selectivity_bounds(
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
) -> Result<PrevalenceBounds, BoundsError> {
    let AssumptionSet { pi, kappa, .. } = *assumptions;
    check_pi_interval(&pi)?;
    Interval::selectivity(kappa.lo, kappa.hi)?;
    if snapshot.gamma > pi.lo {
        return Err(BoundsError::AssumptionInfeasible {
            gamma: snapshot.gamma,
            pi: pi.lo,
        });
    }
    let lo = prevalence_given(pi.hi, kappa.hi, snapshot)?;
    let hi = prevalence_given(pi.lo, kappa.lo, snapshot)?;
    Ok(PrevalenceBounds {
        interval: Interval { lo, hi },
        method: BoundMethod::SensitivitySelectivity,
        snapshot: *snapshot,
        assumptions: *assumptions,
        degenerate: snapshot.gamma == pi.lo || snapshot.gamma == pi.hi,
    })
}

fn npv_at(gamma: f64, pi: f64) -> f64 {
    (1.0 - gamma / pi) / (1.0 - gamma)
}

/// Sharp bounds on the negative predictive value implied by a sensitivity
/// interval. NPV `(1 - gamma/pi) / (1 - gamma)` increases in `pi`.
pub fn npv_from_sensitivity(gamma: f64, pi: Interval) -> Result<Interval, BoundsError> {
    check_probability("gamma", gamma)?;
    check_pi_interval(&pi)?;
    if gamma > pi.lo {
        return Err(BoundsError::AssumptionInfeasible { gamma, pi: pi.lo });
    }
    if gamma == 1.0 {
        return Err(BoundsError::DegenerateYield);
    }
    Ok(Interval {
        lo: npv_at(gamma, pi.lo),
        hi: npv_at(gamma, pi.hi),
    })
}

/// Prevalence among the tested implied by an NPV value:
/// `gamma + (1 - gamma)(1 - eta)`.
pub fn tested_prevalence_from_npv(gamma: f64, eta: f64) -> f64 {
    gamma + (1.0 - gamma) * (1.0 - eta)
}

/// Comparison bounds that start from an NPV interval instead of sensitivity:
/// `[tau (gamma + (1-gamma)(1-eta_hi)), gamma + (1-gamma)(1-eta_lo)]`.
/// Selection into testing is assumed nonnegative, which is why the tested
/// prevalence caps overall prevalence.
pub fn prevalence_from_npv(
    snapshot: &TestingSnapshot,
    eta: Interval,
) -> Result<PrevalenceBounds, BoundsError> {
    let eta = Interval::probability(eta.lo, eta.hi)?;
    let gamma = snapshot.gamma;
    Ok(PrevalenceBounds {
        interval: Interval {
            lo: snapshot.tau * tested_prevalence_from_npv(gamma, eta.hi),
            hi: tested_prevalence_from_npv(gamma, eta.lo),
        },
        method: BoundMethod::NpvBased,
        snapshot: *snapshot,
        assumptions: AssumptionSet {
            pi: Interval::unit(),
            kappa: Interval { lo: 1.0, hi: f64::INFINITY },
            eta: Some(eta),
        },
        degenerate: false,
    })
}

/// Sensitivity implied by an NPV interval and the observed yield:
/// `[gamma / (1 - (1-gamma) eta_lo), gamma / (1 - (1-gamma) eta_hi)]`.
pub fn sensitivity_from_npv(gamma: f64, eta: Interval) -> Result<Interval, BoundsError> {
    check_probability("gamma", gamma)?;
    let eta = Interval::probability(eta.lo, eta.hi)?;
    let denom_hi = 1.0 - (1.0 - gamma) * eta.hi;
    if denom_hi <= 0.0 {
        return Err(BoundsError::DegenerateDenominator((1.0 - gamma) * eta.hi));
    }
    let denom_lo = 1.0 - (1.0 - gamma) * eta.lo;
    Ok(Interval {
        lo: gamma / denom_lo,
        hi: gamma / denom_hi,
    })
}

/// Infection fatality rate bounds, `deaths / (population * prevalence)`.
///
/// The upper endpoint is infinite when the prevalence bound reaches zero and
/// deaths are positive. Zero deaths give `[0, 0]`.
pub fn ifr_bounds(
    deaths: u64,
    population: u64,
    prevalence: Interval,
) -> Result<Interval, BoundsError> {
    if population == 0 {
        return Err(BoundsError::InconsistentCounts(
            "population must be positive".into(),
        ));
    }
    let prevalence = Interval::probability(prevalence.lo, prevalence.hi)?;
    if deaths == 0 {
        return Ok(Interval::point(0.0));
    }
    if prevalence.hi == 0.0 {
        return Err(BoundsError::Undefined { deaths });
    }
    let d = deaths as f64;
    let n = population as f64;
    let hi = if prevalence.lo == 0.0 {
        f64::INFINITY
    } else {
        d / (n * prevalence.lo)
    };
    Ok(Interval {
        lo: d / (n * prevalence.hi),
        hi,
    })
}

/// Evaluates one bound family. `WorstCase` ignores the assumptions,
/// `Sensitivity` uses only `pi`, and `NpvBased` requires `eta`.
pub fn evaluate(
    method: BoundMethod,
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
) -> Result<PrevalenceBounds, BoundsError> {
    match method {
        BoundMethod::WorstCase => Ok(worst_case_bounds(snapshot)),
        BoundMethod::Sensitivity => sensitivity_bounds(snapshot, assumptions.pi),
        BoundMethod::SensitivitySelectivity => selectivity_bounds(snapshot, assumptions),
        BoundMethod::NpvBased => {
            let eta = assumptions.eta.ok_or_else(|| {
                BoundsError::InvalidAssumption("NPV-based bounds need an eta interval".into())
            })?;
            prevalence_from_npv(snapshot, eta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn snap(tau: f64, gamma: f64) -> TestingSnapshot {
        TestingSnapshot::new(tau, gamma).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn worst_case_examples() {
        assert_eq!(worst_case(&snap(0.0, 0.37)), iv(0.0, 1.0));
        assert_eq!(worst_case(&snap(1.0, 1.0)), iv(1.0, 1.0));
        assert_relative_eq!(worst_case(&snap(0.05, 0.2)).lo, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn tested_prevalence_examples() {
        assert_eq!(tested_prevalence(0.1, 1.0).unwrap(), 0.1);
        assert_relative_eq!(tested_prevalence(0.1, 0.7).unwrap(), 0.142_857_142_857_142_85);
        assert!(matches!(
            tested_prevalence(0.8, 0.7),
            Err(BoundsError::AssumptionInfeasible { .. })
        ));
    }

    #[test]
    fn sensitivity_bounds_examples() {
        let b = sensitivity_bounds(&snap(1.0, 0.1), iv(1.0, 1.0)).unwrap();
        assert_relative_eq!(b.interval.lo, 0.1);
        assert_relative_eq!(b.interval.hi, 0.1);

        let b = sensitivity_bounds(&snap(0.05, 0.2), iv(0.7, 0.95)).unwrap();
        assert_relative_eq!(b.interval.lo, 0.010_526_315_789_473_686, epsilon = 1e-15);
        assert_relative_eq!(b.interval.hi, 0.964_285_714_285_714_2, epsilon = 1e-15);

        let b = sensitivity_bounds(&snap(0.0, 0.0), iv(0.7, 0.95)).unwrap();
        assert_eq!(b.interval, iv(0.0, 1.0));

        assert!(matches!(
            sensitivity_bounds(&snap(0.5, 0.8), iv(0.7, 0.95)),
            Err(BoundsError::AssumptionInfeasible { .. })
        ));
    }

    #[test]
    fn sensitivity_upper_cap_binds_only_at_gamma_equal_pi_lo() {
        let b = sensitivity_bounds(&snap(0.3, 0.7), iv(0.7, 0.95)).unwrap();
        assert_eq!(b.interval.hi, 1.0);
        assert!(b.degenerate);
    }

    #[test]
    fn prevalence_given_examples() {
        let s = snap(0.3, 0.2);
        assert_relative_eq!(prevalence_given(0.8, 1.0, &s).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(prevalence_given(0.8, INF, &s).unwrap(), 0.075, epsilon = 1e-15);
        // (0.15/0.7) * 0.711 / 1.25
        let s = snap(0.02, 0.15);
        assert_relative_eq!(
            prevalence_given(0.7, 2.0, &s).unwrap(),
            0.121_885_714_285_714_3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn prevalence_given_limits() {
        let s = snap(0.04, 0.12);
        let pi = 0.83;
        assert_relative_eq!(prevalence_given(pi, 1.0, &s).unwrap(), 0.12 / pi, epsilon = 1e-12);
        assert_relative_eq!(
            prevalence_given(pi, INF, &s).unwrap(),
            0.04 * 0.12 / pi,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            prevalence_given(pi, 0.0, &s).unwrap(),
            1.0 - 0.04 + 0.04 * 0.12 / pi,
            epsilon = 1e-12
        );
        // finite kappa approaches the limits
        assert_relative_eq!(
            prevalence_given(pi, 1e12, &s).unwrap(),
            0.04 * 0.12 / pi,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            prevalence_given(pi, 1e-12, &s).unwrap(),
            1.0 - 0.04 + 0.04 * 0.12 / pi,
            epsilon = 1e-9
        );
    }

    #[test]
    fn prevalence_given_degenerate_yield() {
        let s = snap(0.25, 0.8);
        assert_eq!(prevalence_given(0.8, 3.0, &s).unwrap(), 1.0);
        assert_relative_eq!(prevalence_given(0.8, INF, &s).unwrap(), 0.25);
        assert!(prevalence_given(0.79, 3.0, &s).is_err());
        assert!(prevalence_given(0.8, -1.0, &s).is_err());
        assert!(prevalence_given(0.0, 1.0, &s).is_err());
    }

    #[test]
    fn selectivity_bounds_examples() {
        let a = AssumptionSet::headline();
        let b = selectivity_bounds(&snap(0.05, 0.2), &a).unwrap();
        assert_relative_eq!(b.interval.lo, 0.010_526_315_789_473_686, epsilon = 1e-15);
        assert_relative_eq!(b.interval.hi, 0.285_714_285_714_285_7, epsilon = 1e-15);

        let a0 = a.with_kappa(iv(0.0, INF));
        let s = snap(0.05, 0.2);
        assert_eq!(
            selectivity_bounds(&s, &a0).unwrap().interval,
            sensitivity_bounds(&s, a.pi).unwrap().interval
        );

        let a2 = a.with_kappa(iv(2.0, INF));
        let b = selectivity_bounds(&snap(0.02, 0.15), &a2).unwrap();
        assert_relative_eq!(b.interval.lo, 0.003_157_894_736_842_105_6, epsilon = 1e-15);
        assert_relative_eq!(b.interval.hi, 0.121_885_714_285_714_3, epsilon = 1e-15);
    }

    #[test]
    fn npv_from_sensitivity_examples() {
        assert_eq!(npv_from_sensitivity(0.0, iv(0.7, 0.95)).unwrap(), iv(1.0, 1.0));
        let n = npv_from_sensitivity(0.1, iv(0.7, 0.95)).unwrap();
        assert_relative_eq!(n.lo, 0.952_380_952_380_952_3, epsilon = 1e-15);
        assert_relative_eq!(n.hi, 0.994_152_046_783_625_7, epsilon = 1e-15);
        assert!(matches!(
            npv_from_sensitivity(0.8, iv(0.7, 0.95)),
            Err(BoundsError::AssumptionInfeasible { .. })
        ));
        assert_eq!(
            npv_from_sensitivity(1.0, iv(1.0, 1.0)),
            Err(BoundsError::DegenerateYield)
        );
    }

    #[test]
    fn prevalence_from_npv_examples() {
        let b = prevalence_from_npv(&snap(1.0, 0.1), iv(1.0, 1.0)).unwrap();
        assert_relative_eq!(b.interval.lo, 0.1);
        assert_relative_eq!(b.interval.hi, 0.1);

        let eta = iv(0.6, 0.9);
        assert_relative_eq!(tested_prevalence_from_npv(0.1, 0.9), 0.19, epsilon = 1e-12);
        assert_relative_eq!(tested_prevalence_from_npv(0.1, 0.6), 0.46, epsilon = 1e-12);
        let b = prevalence_from_npv(&snap(0.01, 0.1), eta).unwrap();
        assert_relative_eq!(b.interval.lo, 0.0019, epsilon = 1e-12);
        assert_relative_eq!(b.interval.hi, 0.46, epsilon = 1e-12);
        // no data moves the upper bound below 1 - eta_lo
        let b = prevalence_from_npv(&snap(0.9, 0.0), eta).unwrap();
        assert!(b.interval.hi >= 0.4 - 1e-12);
    }

    #[test]
    fn sensitivity_from_npv_examples() {
        let s = sensitivity_from_npv(0.1, iv(0.6, 0.9)).unwrap();
        assert_relative_eq!(s.lo, 0.217_391_304_347_826_1, epsilon = 1e-15);
        assert_relative_eq!(s.hi, 0.526_315_789_473_684_4, epsilon = 1e-14);
        let s = sensitivity_from_npv(0.1, iv(0.0, 0.0)).unwrap();
        assert_eq!(s, iv(0.1, 0.1));
        assert!(matches!(
            sensitivity_from_npv(0.0, iv(0.5, 1.0)),
            Err(BoundsError::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn ifr_examples() {
        assert_eq!(ifr_bounds(0, 1_000_000, iv(0.1, 0.5)).unwrap(), iv(0.0, 0.0));
        let r = ifr_bounds(1000, 1_000_000, iv(0.1, 0.5)).unwrap();
        assert_relative_eq!(r.lo, 0.002, epsilon = 1e-15);
        assert_relative_eq!(r.hi, 0.01, epsilon = 1e-15);
        let r = ifr_bounds(1000, 1_000_000, iv(0.0, 0.5)).unwrap();
        assert_relative_eq!(r.lo, 0.002, epsilon = 1e-15);
        assert_eq!(r.hi, INF);
        assert_eq!(
            ifr_bounds(5, 100, iv(0.0, 0.0)),
            Err(BoundsError::Undefined { deaths: 5 })
        );
    }

    #[test]
    fn snapshot_counts() {
        let s = TestingSnapshot::from_counts(100, 10, 2).unwrap();
        assert_eq!((s.tau, s.gamma), (0.1, 0.2));
        let s = TestingSnapshot::from_counts(100, 0, 0).unwrap();
        assert_eq!((s.tau, s.gamma), (0.0, 0.0));
        assert!(!s.has_tests());
        assert!(TestingSnapshot::from_counts(100, 101, 0).is_err());
        assert!(TestingSnapshot::from_counts(100, 10, 11).is_err());
        assert!(snap(0.1, 0.2).with_counts(100, 10).is_ok());
        assert!(snap(0.1, 0.2).with_counts(100, 11).is_err());
        assert!(TestingSnapshot::new(1.2, 0.1).is_err());
    }

    #[test]
    fn assumption_validation() {
        assert!(AssumptionSet::new(iv(0.0, 0.9), iv(1.0, INF), None).is_err());
        assert!(AssumptionSet::new(iv(0.7, 0.95), iv(1.0, INF), Some(iv(0.6, 0.9))).is_ok());
        assert!(AssumptionSet::new(iv(0.7, 0.95), Interval { lo: -1.0, hi: 1.0 }, None).is_err());
    }

    #[test]
    fn worst_case_equals_unrestricted_sensitivity_limit() {
        let s = snap(0.3, 0.2);
        let b = evaluate(BoundMethod::WorstCase, &s, &AssumptionSet::headline()).unwrap();
        assert_eq!(b.interval, worst_case(&s));
        // the widest sensitivity interval the data allow recovers it
        let widest = sensitivity_bounds(&s, iv(0.2, 1.0)).unwrap();
        assert_eq!(widest.interval.lo, b.interval.lo);
        assert_eq!(widest.interval.hi, 1.0);
    }
}
