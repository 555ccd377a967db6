//! Loading cumulative surveillance counts and computing per-date bounds.
//!
//! Run with `cargo run --example load_surveillance_csv [data.csv regions.csv]`.

use std::path::PathBuf;

use prevalence_bounds::ingestion::{self, DatasetFormat, DatasetSpec};
use prevalence_bounds::timeseries;
use prevalence_bounds::{AssumptionSet, BoundMethod, MonotoneRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut args = std::env::args().skip(1);
    let data = args.next().map(PathBuf::from).unwrap_or(here.join("sample_generic.csv"));
    let regions = args.next().map(PathBuf::from).unwrap_or(here.join("regions.csv"));

    let regions = ingestion::load_regions(&regions)?;
    let dataset = ingestion::load(&DatasetSpec::new(data, DatasetFormat::GenericCsv), &regions)?;
    for w in &dataset.warnings {
        eprintln!("warning: {w}");
    }
    let a = AssumptionSet::headline();
    for series in &dataset.series {
        let raw = timeseries::bound_series(series, BoundMethod::SensitivitySelectivity, &a)?;
        let refined = timeseries::monotone_refine(&raw, MonotoneRule::Sharp)?;
        let ifr = timeseries::ifr_series(series, &refined)?;
        println!("{} (population {})", series.region, series.population);
        for ((d, p), f) in refined.dates.iter().zip(&refined.intervals).zip(&ifr) {
            println!("  {d}  prevalence {p:.4}  ifr {f:.4}");
        }
    }
    Ok(())
}
