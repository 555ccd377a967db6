//! Recovering the identified set by brute force over latent population models
//! and comparing with the closed form.

use prevalence_bounds::bounds;
use prevalence_bounds::oracle;
use prevalence_bounds::{AssumptionSet, Interval, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let step = 1e-4;
    let cases = [
        (0.05, 0.2, AssumptionSet::headline()),
        (0.3, 0.1, AssumptionSet::new(Interval::probability(0.5, 0.99)?, Interval::selectivity(0.5, 8.0)?, None)?),
        (0.9, 0.1, AssumptionSet::new(Interval::probability(0.2, 1.0)?, Interval::selectivity(0.0, f64::INFINITY)?, None)?),
    ];
    for (tau, gamma, a) in cases {
        let snap = TestingSnapshot::new(tau, gamma)?;
        let closed = bounds::selectivity_bounds(&snap, &a)?.interval;
        let grid = oracle::feasible_set(&snap, &a, step)?;
        let (lo_w, hi_w) = grid.witnesses;
        println!(
            "tau {tau} gamma {gamma}: closed {closed:.4}  oracle {:.4}  gap {:.1e}",
            grid.feasible_interval,
            closed.max_endpoint_distance(&grid.feasible_interval)
        );
        println!(
            "  witnesses rho={:.4} (pi {:.3}, kappa {:?})  rho={:.4} (pi {:.3}, kappa {:?})",
            lo_w.rho, lo_w.pi, lo_w.kappa(), hi_w.rho, hi_w.pi, hi_w.kappa()
        );
    }
    Ok(())
}
