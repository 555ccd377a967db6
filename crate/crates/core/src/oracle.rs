//! Brute-force feasibility oracle and population simulator.
//!
//! The oracle never evaluates the closed-form prevalence bounds. For a
//! candidate prevalence `rho` and sensitivity `pi` the latent testing
//! probabilities are pinned down by the accounting identities
//!
//! ```text
//! gamma * tau = rho * tau1 * pi          (positives come only from the infected)
//! tau         = rho * tau1 + (1 - rho) * tau0
//! ```
//!
//! so the only remaining check is whether `tau1`, `tau0` are probabilities and
//! their odds ratio lies in the selectivity interval. Scanning `rho` and `pi`
//! over grids recovers the identified set independently of the algebra that
//! produced the closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{AssumptionSet, BoundsError, TestingSnapshot};
use crate::interval::Interval;

/// Sensitivity grid step used by [`feasible`].
pub const DEFAULT_PI_STEP: f64 = 1e-4;
/// Prevalence grid step used when none is given.
pub const DEFAULT_RHO_STEP: f64 = 1e-4;
/// Constraint tolerance used by [`feasible_set`].
pub const DEFAULT_TOL: f64 = 1e-9;

const BISECTION_ITERS: usize = 80;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid step must lie in (0, 1], got {0}")]
    InvalidGridStep(f64),
    #[error(transparent)]
    Input(#[from] BoundsError),
    #[error("invalid population model: {0}")]
    InvalidModel(String),
    #[error("no prevalence on the grid is consistent with the data and assumptions")]
    NoFeasiblePoint,
    #[error("feasible prevalences are not contiguous: gap at rho = {gap_at}")]
    NonConvexFeasibleSet { gap_at: f64 },
}

/// Latent parameters of the testing model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    /// Prevalence `Pr(C=1)`.
    pub rho: f64,
    /// `Pr(T=1 | C=1)`.
    pub tau1: f64,
    /// `Pr(T=1 | C=0)`.
    pub tau0: f64,
    /// Sensitivity.
    pub pi: f64,
}

/// Odds ratio of being tested, infected vs. uninfected, with the limiting
/// values at the edges. `None` when both probabilities are 0 or both are 1.
pub fn odds_ratio(tau1: f64, tau0: f64) -> Option<f64> {
    let interior = |p: f64| p > 0.0 && p < 1.0;
    if interior(tau1) && interior(tau0) {
        return Some((tau1 / (1.0 - tau1)) / (tau0 / (1.0 - tau0)));
    }
    match (tau1, tau0) {
        (a, b) if a == b => None,
        (a, b) if a == 1.0 || b == 0.0 => Some(f64::INFINITY),
        _ => Some(0.0),
    }
}

impl PopulationModel {
    pub fn new(rho: f64, tau1: f64, tau0: f64, pi: f64) -> Result<Self, OracleError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(rho) && unit(tau1) && unit(tau0) && pi > 0.0 && pi <= 1.0) {
            return Err(OracleError::InvalidModel(format!(
                "rho={rho}, tau1={tau1}, tau0={tau0}, pi={pi}"
            )));
        }
        Ok(Self { rho, tau1, tau0, pi })
    }

    /// Builds a model from the testing rate of the infected and a selectivity
    /// factor: `tau0 = tau1 / (tau1 + kappa (1 - tau1))`.
    pub fn from_selectivity(rho: f64, tau1: f64, kappa: f64, pi: f64) -> Result<Self, OracleError> {
        if !(kappa > 0.0) || kappa.is_infinite() {
            return Err(OracleError::InvalidModel(format!(
                "selectivity {kappa} must be positive and finite"
            )));
        }
        let tau0 = tau1 / (tau1 + kappa * (1.0 - tau1));
        Self::new(rho, tau1, tau0, pi)
    }

    /// Implied testing rate.
    pub fn tau(&self) -> f64 {
        self.rho * self.tau1 + (1.0 - self.rho) * self.tau0
    }

    /// Implied test yield (zero when nobody is tested).
    pub fn gamma(&self) -> f64 {
        let tau = self.tau();
        if tau == 0.0 {
            0.0
        } else {
            self.rho * self.tau1 * self.pi / tau
        }
    }

    /// Implied selectivity. Undefined when no uninfected exist.
    pub fn kappa(&self) -> Option<f64> {
        if self.rho == 1.0 {
            return None;
        }
        odds_ratio(self.tau1, self.tau0)
    }

    /// Whether the model reproduces the snapshot within `tol` and satisfies the
    /// assumptions (selectivity checked with relative tolerance `tol`).
    pub fn is_witness_for(
        &self,
        snapshot: &TestingSnapshot,
        assumptions: &AssumptionSet,
        tol: f64,
    ) -> bool {
        let reproduces = (self.tau() - snapshot.tau).abs() <= tol
            && (self.rho * self.tau1 * self.pi - snapshot.gamma * snapshot.tau).abs() <= tol;
        let pi_ok = assumptions.pi.lo - tol <= self.pi && self.pi <= assumptions.pi.hi + tol;
        let kappa_ok = match self.kappa() {
            None => true,
            Some(k) => kappa_admissible(k, &assumptions.kappa, tol),
        };
        reproduces && pi_ok && kappa_ok
    }
}

fn kappa_admissible(k: f64, kappa: &Interval, tol: f64) -> bool {
    let lo_ok = k >= kappa.lo - tol * kappa.lo.max(1.0);
    let hi_ok = kappa.hi == f64::INFINITY || k <= kappa.hi + tol * kappa.hi.max(1.0);
    lo_ok && hi_ok
}

/// Latent testing probabilities at `(rho, pi)`, when they are probabilities.
fn latent_at(rho: f64, pi: f64, snapshot: &TestingSnapshot, tol: f64) -> Option<(f64, f64)> {
    let tau = snapshot.tau;
    let tau1 = snapshot.gamma * tau / (rho * pi);
    let tau0 = (tau - rho * tau1) / (1.0 - rho);
    let box_ok = tau1 <= 1.0 + tol && tau0 >= -tol && tau0 <= 1.0 + tol;
    box_ok.then(|| (tau1.clamp(0.0, 1.0), tau0.clamp(0.0, 1.0)))
}

/// Sensitivities outside this range put `tau1` or `tau0` outside [0, 1].
fn box_range(rho: f64, snapshot: &TestingSnapshot, tol: f64) -> (f64, f64) {
    let (tau, gamma) = (snapshot.tau, snapshot.gamma);
    let lo = gamma.max(gamma * tau / rho) * (1.0 - 1e3 * tol);
    let excess = tau - (1.0 - rho);
    let hi = if excess > 0.0 {
        gamma * tau / excess * (1.0 + 1e3 * tol)
    } else {
        f64::INFINITY
    };
    (lo, hi)
}

fn pi_grid(pi: &Interval, step: f64) -> impl Iterator<Item = f64> + '_ {
    let n = ((pi.hi - pi.lo) / step).ceil() as usize;
    (0..=n).map(move |i| {
        if i == n {
            pi.hi
        } else {
            pi.lo + i as f64 * step
        }
    })
}

/// Searches the sensitivity grid for a population model with prevalence `rho`
/// that reproduces `snapshot` and satisfies `assumptions`.
pub fn feasible(
    rho: f64,
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
    tol: f64,
) -> Option<PopulationModel> {
    feasible_with_step(rho, snapshot, assumptions, tol, DEFAULT_PI_STEP)
}

/// [`feasible`] with an explicit sensitivity grid step.
///
/// Besides testing each grid point, adjacent grid points whose implied
/// selectivity straddles an endpoint of the selectivity interval are refined by
/// bisection, so point-valued selectivity assumptions are found too.
pub fn feasible_with_step(
    rho: f64,
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
    tol: f64,
    pi_step: f64,
) -> Option<PopulationModel> {
    if !(rho > 0.0 && rho <= 1.0) {
        return None;
    }
    let pi_iv = assumptions.pi;
    if rho == 1.0 {
        // Nobody is uninfected: tau1 = tau and selectivity is unrestricted.
        if snapshot.tau == 0.0 {
            return Some(PopulationModel { rho, tau1: 0.0, tau0: 0.0, pi: pi_iv.hi });
        }
        return pi_iv.contains(snapshot.gamma).then_some(PopulationModel {
            rho,
            tau1: snapshot.tau,
            tau0: snapshot.tau,
            pi: snapshot.gamma,
        });
    }

    let kappa = assumptions.kappa;
    let model = |pi: f64, (tau1, tau0): (f64, f64)| PopulationModel { rho, tau1, tau0, pi };
    let (lo, hi) = box_range(rho, snapshot, tol);
    let mut prev: Option<(f64, f64)> = None;
    for pi in pi_grid(&pi_iv, pi_step).skip_while(|&p| p + pi_step < lo) {
        if pi - pi_step > hi {
            break;
        }
        let Some(latent) = latent_at(rho, pi, snapshot, tol) else {
            prev = None;
            continue;
        };
        let k = odds_ratio(latent.0, latent.1);
        match k {
            None => return Some(model(pi, latent)),
            Some(k) if kappa_admissible(k, &kappa, tol) => return Some(model(pi, latent)),
            Some(k) => {
                if let Some((prev_pi, prev_k)) = prev {
                    for target in [kappa.lo, kappa.hi] {
                        if target.is_finite() && (prev_k - target) * (k - target) < 0.0 {
                            if let Some(w) =
                                bisect_selectivity(rho, prev_pi, pi, target, snapshot, tol)
                            {
                                if kappa_admissible(w.kappa().unwrap_or(target), &kappa, tol) {
                                    return Some(w);
                                }
                            }
                        }
                    }
                }
                // Selectivity decreases in pi at fixed rho.
                if k < kappa.lo {
                    break;
                }
                prev = Some((pi, k));
            }
        }
    }
    None
}

fn bisect_selectivity(
    rho: f64,
    mut a: f64,
    mut b: f64,
    target: f64,
    snapshot: &TestingSnapshot,
    tol: f64,
) -> Option<PopulationModel> {
    let excess = |pi: f64| {
        latent_at(rho, pi, snapshot, tol)
            .and_then(|(t1, t0)| odds_ratio(t1, t0))
            .map(|k| k - target)
    };
    let mut fa = excess(a)?;
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (a + b);
        let fm = excess(mid)?;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let pi = 0.5 * (a + b);
    let (tau1, tau0) = latent_at(rho, pi, snapshot, tol)?;
    Some(PopulationModel { rho, tau1, tau0, pi })
}

/// Grid approximation of the identified set for prevalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible_interval: Interval,
    pub grid_step: f64,
    /// Witness models at the lower and upper feasible grid points.
    pub witnesses: (PopulationModel, PopulationModel),
    pub n_feasible: usize,
}

fn rho_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step + 1e-9).floor() as usize;
    (1..=n).map(|k| (k as f64 * step).min(1.0)).collect()
}

/// Scans prevalence over `{step, 2 step, ..., 1}` and returns the smallest and
/// largest feasible grid values with witnesses. The sensitivity grid uses the
/// same step. The result does not depend on how the scan is partitioned
/// across threads.
pub fn feasible_set(
    snapshot: &TestingSnapshot,
    assumptions: &AssumptionSet,
    grid_step: f64,
) -> Result<FeasibilityResult, OracleError> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(OracleError::InvalidGridStep(grid_step));
    }
    AssumptionSet::new(assumptions.pi, assumptions.kappa, assumptions.eta)?;
    let grid = rho_grid(grid_step);
    let hits: Vec<Option<PopulationModel>> = grid
        .par_iter()
        .map(|&rho| feasible_with_step(rho, snapshot, assumptions, DEFAULT_TOL, grid_step))
        .collect();

    let first = hits.iter().position(Option::is_some);
    let last = hits.iter().rposition(Option::is_some);
    let (Some(first), Some(last)) = (first, last) else {
        return Err(OracleError::NoFeasiblePoint);
    };
    if let Some(gap) = (first..=last).find(|&i| hits[i].is_none()) {
        return Err(OracleError::NonConvexFeasibleSet { gap_at: grid[gap] });
    }
    Ok(FeasibilityResult {
        feasible_interval: Interval {
            lo: grid[first],
            hi: grid[last],
        },
        grid_step,
        witnesses: (hits[first].unwrap(), hits[last].unwrap()),
        n_feasible: last - first + 1,
    })
}

/// Aggregate counts from one simulated population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulatedCounts {
    pub n_population: u64,
    pub n_infected: u64,
    pub n_tested: u64,
    pub n_positive: u64,
}

impl SimulatedCounts {
    pub fn snapshot(&self) -> Result<TestingSnapshot, BoundsError> {
        TestingSnapshot::from_counts(self.n_population, self.n_tested, self.n_positive)
    }
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    // p is a probability by construction of PopulationModel
    Binomial::new(n, p).expect("probability in [0, 1]").sample(rng)
}

/// Simulates `n` individuals: infection with probability `rho`, testing with
/// probability `tau1` or `tau0` by infection status, and a positive result
/// with probability `pi` for tested infected only. Individuals are exchangeable,
/// so the per-stage totals are drawn as binomials. Bit-stable given
/// `(model, n, seed)`.
pub fn simulate(model: &PopulationModel, n: u64, seed: u64) -> SimulatedCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_infected = binomial(&mut rng, n, model.rho);
    let tested_infected = binomial(&mut rng, n_infected, model.tau1);
    let tested_uninfected = binomial(&mut rng, n - n_infected, model.tau0);
    let n_positive = binomial(&mut rng, tested_infected, model.pi);
    SimulatedCounts {
        n_population: n,
        n_infected,
        n_tested: tested_infected + tested_uninfected,
        n_positive,
    }
}

/// Seed for replication `index`, derived from `base` with a SplitMix64 step.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `reps` independent replications in parallel with derived seeds.
pub fn simulate_many(model: &PopulationModel, n: u64, base_seed: u64, reps: u64) -> Vec<SimulatedCounts> {
    (0..reps)
        .into_par_iter()
        .map(|i| simulate(model, n, derive_seed(base_seed, i)))
        .collect()
}
