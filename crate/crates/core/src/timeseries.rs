//! Per-date snapshots from cumulative surveillance counts, and the
//! time-monotonicity refinement of bound series.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, AssumptionSet, BoundMethod, BoundsError, TestingSnapshot};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series has no records")]
    EmptySeries,
    #[error("invalid series: {0}")]
    Invalid(String),
    #[error("refined bounds cross at {date}: lower {lo} exceeds upper {hi}")]
    CrossingBounds { date: NaiveDate, lo: f64, hi: f64 },
    #[error("bound series and region series are not aligned at index {index}")]
    Misaligned { index: usize },
    #[error("{date}: {source}")]
    Bounds {
        date: NaiveDate,
        #[source]
        source: BoundsError,
    },
}

/// Cumulative counts reported for one date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub date: NaiveDate,
    pub cum_tests: u64,
    pub cum_positives: u64,
    pub cum_deaths: u64,
}

/// Date-ordered cumulative counts for one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSeries {
    pub region: String,
    pub population: u64,
    pub records: Vec<DailyRecord>,
}

impl RegionSeries {
    /// Validates the series: strictly increasing dates, nondecreasing
    /// cumulative counts, positives within tests, tests within population.
    pub fn new(
        region: impl Into<String>,
        population: u64,
        records: Vec<DailyRecord>,
    ) -> Result<Self, SeriesError> {
        let series = Self {
            region: region.into(),
            population,
            records,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<(), SeriesError> {
        if self.population == 0 {
            return Err(SeriesError::Invalid(format!(
                "{}: population must be positive",
                self.region
            )));
        }
        for r in &self.records {
            if r.cum_positives > r.cum_tests {
                return Err(SeriesError::Invalid(format!(
                    "{} {}: {} positives exceed {} tests",
                    self.region, r.date, r.cum_positives, r.cum_tests
                )));
            }
            if r.cum_tests > self.population {
                return Err(SeriesError::Invalid(format!(
                    "{} {}: {} tests exceed population {}",
                    self.region, r.date, r.cum_tests, self.population
                )));
            }
        }
        for w in self.records.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.date >= b.date {
                return Err(SeriesError::Invalid(format!(
                    "{}: dates not strictly increasing at {}",
                    self.region, b.date
                )));
            }
            if b.cum_tests < a.cum_tests
                || b.cum_positives < a.cum_positives
                || b.cum_deaths < a.cum_deaths
            {
                return Err(SeriesError::Invalid(format!(
                    "{}: cumulative count decreases at {}",
                    self.region, b.date
                )));
            }
        }
        Ok(())
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.records.iter().map(|r| r.date).collect()
    }
}

/// One snapshot per record: `tau = tests / population`,
/// `gamma = positives / tests` (zero, with `has_tests() == false`, when no
/// tests were reported yet). Counts are carried along for inference.
pub fn snapshots(series: &RegionSeries) -> Result<Vec<TestingSnapshot>, SeriesError> {
    if series.records.is_empty() {
        return Err(SeriesError::EmptySeries);
    }
    series
        .records
        .iter()
        .map(|r| {
            TestingSnapshot::from_counts(series.population, r.cum_tests, r.cum_positives)
                .map_err(|source| SeriesError::Bounds { date: r.date, source })
        })
        .collect()
}

/// A dated series of bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSeries {
    pub dates: Vec<NaiveDate>,
    pub intervals: Vec<Interval>,
    pub refined: bool,
}

impl BoundSeries {
    pub fn new(dates: Vec<NaiveDate>, intervals: Vec<Interval>) -> Result<Self, SeriesError> {
        if dates.len() != intervals.len() {
            return Err(SeriesError::Invalid(format!(
                "{} dates but {} intervals",
                dates.len(),
                intervals.len()
            )));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SeriesError::Invalid("dates not strictly increasing".into()));
        }
        Ok(Self {
            dates,
            intervals,
            refined: false,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.lo).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.hi).collect()
    }
}

/// Evaluates one bound family at every date of a region series.
pub fn bound_series(
    series: &RegionSeries,
    method: BoundMethod,
    assumptions: &AssumptionSet,
) -> Result<BoundSeries, SeriesError> {
    let snaps = snapshots(series)?;
    let intervals = series
        .records
        .iter()
        .zip(&snaps)
        .map(|(r, s)| {
            bounds::evaluate(method, s, assumptions)
                .map(|b| b.interval)
                .map_err(|source| SeriesError::Bounds { date: r.date, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    BoundSeries::new(series.dates(), intervals)
}

/// How bounds are propagated under nondecreasing cumulative prevalence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneRule {
    /// Lower bounds carried forward (running maximum), upper bounds carried
    /// backward (running minimum from the right).
    #[default]
    Sharp,
    /// Both endpoints carried forward by a running maximum.
    ForwardOnly,
}

/// Tightens a bound series using that cumulative prevalence cannot decrease.
///
/// Under [`MonotoneRule::Sharp`], `lo'_t = max_{s<=t} lo_s` and
/// `hi'_t = min_{s>=t} hi_s`. Fails with `CrossingBounds` when the refined
/// lower bound exceeds the refined upper bound, i.e. the data together with
/// the maintained assumptions refute monotone prevalence.
pub fn monotone_refine(series: &BoundSeries, rule: MonotoneRule) -> Result<BoundSeries, SeriesError> {
    let n = series.len();
    let mut lo = series.lower();
    let mut hi = series.upper();
    for t in 1..n {
        lo[t] = lo[t].max(lo[t - 1]);
    }
    match rule {
        MonotoneRule::Sharp => {
            for t in (0..n.saturating_sub(1)).rev() {
                hi[t] = hi[t].min(hi[t + 1]);
            }
        }
        MonotoneRule::ForwardOnly => {
            for t in 1..n {
                hi[t] = hi[t].max(hi[t - 1]);
            }
        }
    }
    let mut intervals = Vec::with_capacity(n);
    for t in 0..n {
        if lo[t] > hi[t] {
            return Err(SeriesError::CrossingBounds {
                date: series.dates[t],
                lo: lo[t],
                hi: hi[t],
            });
        }
        intervals.push(Interval { lo: lo[t], hi: hi[t] });
    }
    Ok(BoundSeries {
        dates: series.dates.clone(),
        intervals,
        refined: true,
    })
}

/// IFR bounds at each date from cumulative deaths and a prevalence series.
pub fn ifr_series(series: &RegionSeries, bounds: &BoundSeries) -> Result<Vec<Interval>, SeriesError> {
    if series.records.len() != bounds.len() {
        return Err(SeriesError::Misaligned {
            index: series.records.len().min(bounds.len()),
        });
    }
    series
        .records
        .iter()
        .zip(bounds.dates.iter().zip(&bounds.intervals))
        .enumerate()
        .map(|(index, (r, (date, prevalence)))| {
            if r.date != *date {
                return Err(SeriesError::Misaligned { index });
            }
            bounds::ifr_bounds(r.cum_deaths, series.population, *prevalence)
                .map_err(|source| SeriesError::Bounds { date: r.date, source })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 3, d).unwrap()
    }

    fn record(d: u32, tests: u64, pos: u64, deaths: u64) -> DailyRecord {
        DailyRecord {
            date: day(d),
            cum_tests: tests,
            cum_positives: pos,
            cum_deaths: deaths,
        }
    }

    fn bound_series_of(lo: &[f64], hi: &[f64]) -> BoundSeries {
        let dates = (1..=lo.len() as u32).map(day).collect();
        let intervals = lo
            .iter()
            .zip(hi)
            .map(|(&l, &h)| Interval::new(l, h).unwrap())
            .collect();
        BoundSeries::new(dates, intervals).unwrap()
    }

    #[test]
    fn snapshots_from_counts() {
        let s = RegionSeries::new("r", 100, vec![record(1, 0, 0, 0), record(2, 10, 2, 0)]).unwrap();
        let snaps = snapshots(&s).unwrap();
        assert_eq!((snaps[0].tau, snaps[0].gamma), (0.0, 0.0));
        assert!(!snaps[0].has_tests());
        assert_eq!((snaps[1].tau, snaps[1].gamma), (0.1, 0.2));
        assert_eq!(snaps[1].n_population, Some(100));
        assert_eq!(snaps[1].n_tested, Some(10));

        let empty = RegionSeries::new("r", 100, vec![]).unwrap();
        assert_eq!(snapshots(&empty), Err(SeriesError::EmptySeries));
    }

    #[test]
    fn region_series_invariants() {
        assert!(RegionSeries::new("r", 100, vec![record(2, 5, 1, 0), record(1, 6, 1, 0)]).is_err());
        assert!(RegionSeries::new("r", 100, vec![record(1, 5, 1, 0), record(2, 4, 1, 0)]).is_err());
        assert!(RegionSeries::new("r", 100, vec![record(1, 5, 6, 0)]).is_err());
        assert!(RegionSeries::new("r", 4, vec![record(1, 5, 1, 0)]).is_err());
        assert!(RegionSeries::new("r", 0, vec![]).is_err());
    }

    #[test]
    fn refine_hand_trace() {
        let s = bound_series_of(&[0.1, 0.05, 0.2], &[0.9, 0.8, 0.85]);
        let r = monotone_refine(&s, MonotoneRule::Sharp).unwrap();
        assert_eq!(r.lower(), vec![0.1, 0.1, 0.2]);
        assert_eq!(r.upper(), vec![0.8, 0.8, 0.85]);
        assert!(r.refined);
    }

    #[test]
    fn refine_forward_only() {
        let s = bound_series_of(&[0.1, 0.05, 0.2], &[0.9, 0.8, 0.85]);
        let r = monotone_refine(&s, MonotoneRule::ForwardOnly).unwrap();
        assert_eq!(r.lower(), vec![0.1, 0.1, 0.2]);
        assert_eq!(r.upper(), vec![0.9, 0.9, 0.9]);
    }

    #[test]
    fn refine_constant_is_unchanged() {
        let s = bound_series_of(&[0.2; 4], &[0.6; 4]);
        let r = monotone_refine(&s, MonotoneRule::Sharp).unwrap();
        assert_eq!(r.intervals, s.intervals);
    }

    #[test]
    fn refine_detects_crossing() {
        let s = bound_series_of(&[0.5, 0.1], &[0.9, 0.4]);
        assert!(matches!(
            monotone_refine(&s, MonotoneRule::Sharp),
            Err(SeriesError::CrossingBounds { .. })
        ));
    }

    #[test]
    fn bound_series_and_ifr() {
        let s = RegionSeries::new(
            "r",
            1_000_000,
            vec![record(1, 0, 0, 0), record(2, 10_000, 1_000, 10)],
        )
        .unwrap();
        let b = bound_series(&s, BoundMethod::SensitivitySelectivity, &AssumptionSet::headline())
            .unwrap();
        // no tests: gamma = 0 gives [0, 0] under kappa >= 1
        assert_eq!(b.intervals[0], Interval::point(0.0));
        let ifr = ifr_series(&s, &b).unwrap();
        assert_eq!(ifr[0], Interval::point(0.0));
        let hi = 0.1 / 0.7;
        assert!((ifr[1].lo - 10.0 / (1e6 * hi)).abs() < 1e-15);

        let short = BoundSeries::new(vec![day(1)], vec![Interval::unit()]).unwrap();
        assert!(matches!(ifr_series(&s, &short), Err(SeriesError::Misaligned { .. })));
    }
}
