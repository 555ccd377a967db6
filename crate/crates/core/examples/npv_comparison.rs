//! Translating between sensitivity and negative predictive value, and the
//! prevalence bounds an NPV interval implies.

use prevalence_bounds::bounds;
use prevalence_bounds::{AssumptionSet, BoundMethod, Interval, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eta = Interval::probability(0.6, 0.9)?;
    let gamma = 0.1;
    println!("gamma = {gamma}, eta in {eta}");
    println!(
        "  tested prevalence  [{:.2}, {:.2}]",
        bounds::tested_prevalence_from_npv(gamma, eta.hi),
        bounds::tested_prevalence_from_npv(gamma, eta.lo)
    );
    println!("  implied pi         {:.5}", bounds::sensitivity_from_npv(gamma, eta)?);

    let pi = Interval::probability(0.7, 0.95)?;
    println!("  NPV from pi {pi:.2}  {:.4}", bounds::npv_from_sensitivity(gamma, pi)?);

    let snap = TestingSnapshot::new(0.03, gamma)?;
    let a = AssumptionSet::headline().with_eta(eta);
    for method in [BoundMethod::SensitivitySelectivity, BoundMethod::NpvBased] {
        let b = bounds::evaluate(method, &snap, &a)?;
        println!("{:<26}{:.4}", method.label(), b.interval);
    }
    Ok(())
}
