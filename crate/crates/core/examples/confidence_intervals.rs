//! Sampling uncertainty: delta-method standard errors on the bound endpoints
//! and two ways of turning them into a confidence interval.

use prevalence_bounds::inference::{self, prevalence_ci};
use prevalence_bounds::{AssumptionSet, BoundMethod, CiConfig, CiMethod, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let snap = TestingSnapshot::from_counts(1_000_000, 20_000, 3_000)?;
    let (tau, gamma) = inference::standard_errors(&snap)?;
    println!("tau   {:.4} (se {:.2e})", tau.value, tau.se);
    println!("gamma {:.4} (se {:.2e})", gamma.value, gamma.se);

    let a = AssumptionSet::headline();
    for method in [CiMethod::IntersectOneSided, CiMethod::ImbensManski] {
        let cfg = CiConfig::new(0.05, method)?;
        let r = prevalence_ci(BoundMethod::SensitivitySelectivity, &snap, &a, &cfg)?;
        println!(
            "{method:?}: bounds {:.5}, endpoint se ({:.2e}, {:.2e}), 95% CI {:.5}",
            r.estimate.interval, r.endpoint_se.0, r.endpoint_se.1, r.ci
        );
    }
    Ok(())
}
