//! Simulating populations that satisfy the assumptions and checking how often
//! the estimated bounds and their confidence intervals cover true prevalence.

use prevalence_bounds::inference::prevalence_ci;
use prevalence_bounds::oracle::{simulate_many, PopulationModel};
use prevalence_bounds::{bounds, AssumptionSet, BoundMethod, CiConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = PopulationModel::from_selectivity(0.08, 0.2, 3.0, 0.85)?;
    let a = AssumptionSet::headline();
    let cfg = CiConfig::default();
    let reps = 200;
    let draws = simulate_many(&model, 1_000_000, 2020, reps);

    let (mut in_bounds, mut in_ci) = (0, 0);
    for counts in &draws {
        let snap = counts.snapshot()?;
        in_bounds += bounds::selectivity_bounds(&snap, &a)?.interval.contains(model.rho) as u32;
        let r = prevalence_ci(BoundMethod::SensitivitySelectivity, &snap, &a, &cfg)?;
        in_ci += r.ci.contains(model.rho) as u32;
    }
    println!("true rho {}, tau {:.4}, gamma {:.4}", model.rho, model.tau(), model.gamma());
    println!("bounds cover rho in {in_bounds}/{reps} draws");
    println!("95% CI covers rho in {in_ci}/{reps} draws");
    Ok(())
}
