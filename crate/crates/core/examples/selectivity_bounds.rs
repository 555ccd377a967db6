//! Adding a selectivity assumption: the infected are at least as likely to be
//! tested as the uninfected (kappa >= 1).

use prevalence_bounds::bounds::{self, prevalence_given};
use prevalence_bounds::{AssumptionSet, Interval, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let snap = TestingSnapshot::new(0.02, 0.15)?;
    let headline = AssumptionSet::headline();
    let b = bounds::selectivity_bounds(&snap, &headline)?;
    println!("pi {:.2}, kappa {}: {:.5}", headline.pi, headline.kappa, b.interval);

    // Prevalence at a single (pi, kappa) pair.
    for kappa in [1.0, 2.0, 5.0, f64::INFINITY] {
        println!("  pi = 0.7, kappa = {kappa:>4}: {:.6}", prevalence_given(0.7, kappa, &snap)?);
    }

    // Raising the lower selectivity bound pulls the upper prevalence bound down.
    for k in [1.0, 1.5, 2.0, 3.0, 5.0] {
        let a = headline.with_kappa(Interval::selectivity(k, f64::INFINITY)?);
        println!("kappa >= {k}: {:.4}", bounds::selectivity_bounds(&snap, &a)?.interval);
    }
    Ok(())
}
