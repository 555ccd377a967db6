//! Sharp bounds on infection prevalence from the testing rate and test yield.
//!
//! Surveillance data reveal the share of the population tested (`tau`) and the
//! share of tests that come back positive (`gamma`). With perfect specificity
//! and assumptions on test sensitivity (`pi`) and on how much more likely the
//! infected are to be tested (`kappa`), prevalence is partially identified.
//!
//! ```
//! use prevalence_bounds::{bounds, AssumptionSet, TestingSnapshot};
//!
//! let snap = TestingSnapshot::new(0.02, 0.15).unwrap();
//! let b = bounds::selectivity_bounds(&snap, &AssumptionSet::headline()).unwrap();
//! assert!((b.interval.lo - 0.0031578947368421056).abs() < 1e-12);
//! assert!((b.interval.hi - 0.21428571428571427).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod cli;
pub mod inference;
pub mod ingestion;
pub mod interval;
pub mod oracle;
pub mod report;
pub mod timeseries;

pub use bounds::{AssumptionSet, BoundMethod, BoundsError, PrevalenceBounds, TestingSnapshot};
pub use inference::{CiConfig, CiMethod};
pub use interval::Interval;
pub use timeseries::{BoundSeries, DailyRecord, MonotoneRule, RegionSeries};
