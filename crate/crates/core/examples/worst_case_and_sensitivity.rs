//! Bounds that need only perfect specificity, then a sensitivity interval.
//!
//! Run with `cargo run --example worst_case_and_sensitivity`.

use prevalence_bounds::bounds;
use prevalence_bounds::{Interval, TestingSnapshot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 2% of the population tested, 15% of tests positive.
    let snap = TestingSnapshot::new(0.02, 0.15)?;

    let worst = bounds::worst_case(&snap);
    println!("worst case            {worst:.4}");

    for (lo, hi) in [(1.0, 1.0), (0.8, 1.0), (0.7, 0.95)] {
        let pi = Interval::probability(lo, hi)?;
        let b = bounds::sensitivity_bounds(&snap, pi)?;
        println!("pi in {pi:.2}  ->  {:.4}", b.interval);
    }
    Ok(())
}
