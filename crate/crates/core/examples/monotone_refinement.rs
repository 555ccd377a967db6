//! Tightening a bound series with the fact that cumulative prevalence never
//! falls, and what happens when the data contradict it.

use chrono::NaiveDate;
use prevalence_bounds::timeseries::{self, SeriesError};
use prevalence_bounds::{BoundSeries, Interval, MonotoneRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = NaiveDate::from_ymd_opt(2020, 4, 1).unwrap();
    let dates: Vec<_> = (0..3).map(|d| start + chrono::Days::new(d)).collect();
    let raw = BoundSeries::new(
        dates.clone(),
        vec![
            Interval::probability(0.10, 0.90)?,
            Interval::probability(0.05, 0.80)?,
            Interval::probability(0.20, 0.85)?,
        ],
    )?;
    for rule in [MonotoneRule::Sharp, MonotoneRule::ForwardOnly] {
        let refined = timeseries::monotone_refine(&raw, rule)?;
        println!("{rule:?}");
        for (d, (before, after)) in dates.iter().zip(raw.intervals.iter().zip(&refined.intervals)) {
            println!("  {d}  {before:.2} -> {after:.2}");
        }
    }

    let crossing = BoundSeries::new(
        dates[..2].to_vec(),
        vec![Interval::probability(0.3, 0.4)?, Interval::probability(0.1, 0.2)?],
    )?;
    match timeseries::monotone_refine(&crossing, MonotoneRule::Sharp) {
        Err(e @ SeriesError::CrossingBounds { .. }) => println!("refuted: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
