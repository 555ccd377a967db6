//! Infection fatality rate bounds from a prevalence interval.

use prevalence_bounds::bounds::{self, ifr_bounds};
use prevalence_bounds::{AssumptionSet, Interval, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let population = 12_671_821;
    let deaths = 1_500;
    let snap = TestingSnapshot::from_counts(population, 300_000, 45_000)?;
    let prevalence = bounds::selectivity_bounds(&snap, &AssumptionSet::headline())?.interval;
    println!("prevalence {prevalence:.4}");
    println!("IFR        {:.5}", ifr_bounds(deaths, population, prevalence)?);

    // Without a positive lower prevalence bound the IFR has no finite upper bound.
    println!("IFR, prevalence in [0, 0.1]: {:.5}", ifr_bounds(deaths, population, Interval::probability(0.0, 0.1)?)?);
    Ok(())
}
