//! Reading surveillance datasets into [`RegionSeries`].
//!
//! Two layouts are understood:
//!
//! * `GenericCsv`: header `date,region,cum_tests,cum_positives,cum_deaths`
//!   exactly, ISO-8601 dates, integer counts.
//! * `TrackingProjectCsv`: the historic COVID Tracking Project daily export.
//!   Only `date` (`YYYYMMDD`), `state`, `totalTestResults`, `positive` and
//!   `death` are read; blank counts are taken as zero.
//!
//! Populations are never inferred; they come from a `region,population` file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timeseries::{DailyRecord, RegionSeries, SeriesError};

pub const GENERIC_HEADER: [&str; 5] = ["date", "region", "cum_tests", "cum_positives", "cum_deaths"];
const TRACKING_FIELDS: [&str; 5] = ["date", "state", "totalTestResults", "positive", "death"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("{region}: cumulative {field} decreases on {date}")]
    MonotonicityViolation {
        region: String,
        date: NaiveDate,
        field: &'static str,
    },
    #[error("{region}: {tests} cumulative tests on {date} exceed population {population}")]
    PopulationExceeded {
        region: String,
        date: NaiveDate,
        tests: u64,
        population: u64,
    },
    #[error("{region}: duplicate records for {date}")]
    DuplicateDate { region: String, date: NaiveDate },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetFormat {
    #[default]
    GenericCsv,
    TrackingProjectCsv,
}

/// What to do when a cumulative count decreases from one date to the next.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CleaningPolicy {
    #[default]
    Reject,
    /// Replace the decreased value by the running maximum.
    ClampRunningMax,
    /// Drop any record that would decrease a cumulative count.
    DropRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: DatasetFormat,
    pub region_filter: Option<String>,
    pub cleaning: CleaningPolicy,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>, format: DatasetFormat) -> Self {
        Self {
            path: path.into(),
            format,
            region_filter: None,
            cleaning: CleaningPolicy::Reject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub region: String,
    pub population: u64,
}

/// Loaded series plus the cleaning warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub series: Vec<RegionSeries>,
    pub warnings: Vec<String>,
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads one series per requested region, in the order of `regions`.
pub fn load(spec: &DatasetSpec, regions: &[RegionConfig]) -> Result<Dataset, IngestError> {
    if spec.path.as_os_str().is_empty() {
        return Err(IngestError::Io {
            path: spec.path.clone(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty path"),
        });
    }
    let file = open(&spec.path)?;
    load_reader(file, spec, regions)
}

/// [`load`] from any reader; `spec.path` is ignored.
pub fn load_reader<R: Read>(
    reader: R,
    spec: &DatasetSpec,
    regions: &[RegionConfig],
) -> Result<Dataset, IngestError> {
    let wanted: Vec<&RegionConfig> = match &spec.region_filter {
        Some(name) => vec![regions
            .iter()
            .find(|r| &r.region == name)
            .ok_or_else(|| IngestError::UnknownRegion(name.clone()))?],
        None => regions.iter().collect(),
    };
    if let Some(bad) = wanted.iter().find(|r| r.population == 0) {
        return Err(IngestError::Series(SeriesError::Invalid(format!(
            "{}: population must be positive",
            bad.region
        ))));
    }

    let rows = read_rows(reader, spec.format)?;
    let mut by_region: BTreeMap<&str, Vec<(u64, DailyRecord)>> = BTreeMap::new();
    for (line, region, record) in &rows {
        if wanted.iter().any(|r| &r.region == region) {
            by_region
                .entry(region.as_str())
                .or_default()
                .push((*line, *record));
        }
    }

    let mut warnings = Vec::new();
    let mut series = Vec::with_capacity(wanted.len());
    for cfg in wanted {
        let mut recs = by_region
            .remove(cfg.region.as_str())
            .ok_or_else(|| IngestError::UnknownRegion(cfg.region.clone()))?;
        recs.sort_by_key(|(_, r)| r.date);
        if let Some(w) = recs.windows(2).find(|w| w[0].1.date == w[1].1.date) {
            return Err(IngestError::DuplicateDate {
                region: cfg.region.clone(),
                date: w[1].1.date,
            });
        }
        let cleaned = clean(&cfg.region, recs.into_iter().map(|(_, r)| r), spec.cleaning, &mut warnings)?;
        if let Some(r) = cleaned.iter().find(|r| r.cum_tests > cfg.population) {
            return Err(IngestError::PopulationExceeded {
                region: cfg.region.clone(),
                date: r.date,
                tests: r.cum_tests,
                population: cfg.population,
            });
        }
        series.push(RegionSeries::new(cfg.region.clone(), cfg.population, cleaned)?);
    }
    Ok(Dataset { series, warnings })
}

type Row = (u64, String, DailyRecord);

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_count(field: &str, name: &str, line: u64, blank_is_zero: bool) -> Result<u64, IngestError> {
    let field = field.trim();
    if field.is_empty() && blank_is_zero {
        return Ok(0);
    }
    field.parse::<u64>().map_err(|_| IngestError::ParseError {
        line,
        message: format!("{name}: expected a nonnegative integer, got {field:?}"),
    })
}

fn read_rows<R: Read>(reader: R, format: DatasetFormat) -> Result<Vec<Row>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let columns: Vec<usize> = match format {
        DatasetFormat::GenericCsv => {
            if headers.iter().ne(GENERIC_HEADER.iter().copied()) {
                return Err(IngestError::ParseError {
                    line: 1,
                    message: format!(
                        "expected header `{}`, got `{}`",
                        GENERIC_HEADER.join(","),
                        headers.iter().collect::<Vec<_>>().join(",")
                    ),
                });
            }
            (0..5).collect()
        }
        DatasetFormat::TrackingProjectCsv => TRACKING_FIELDS
            .iter()
            .map(|name| {
                headers.iter().position(|h| h == *name).ok_or_else(|| IngestError::ParseError {
                    line: 1,
                    message: format!("missing column {name:?}"),
                })
            })
            .collect::<Result<_, _>>()?,
    };
    let blank_is_zero = format == DatasetFormat::TrackingProjectCsv;

    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| IngestError::ParseError {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = line_of(&record);
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let date = match format {
            DatasetFormat::GenericCsv => NaiveDate::parse_from_str(field(0), "%Y-%m-%d"),
            DatasetFormat::TrackingProjectCsv => NaiveDate::parse_from_str(field(0), "%Y%m%d"),
        }
        .map_err(|e| IngestError::ParseError {
            line,
            message: format!("date {:?}: {e}", field(0)),
        })?;
        let region = field(1).to_string();
        if region.is_empty() {
            return Err(IngestError::ParseError {
                line,
                message: "empty region".into(),
            });
        }
        let cum_tests = parse_count(field(2), TRACKING_FIELDS[2], line, blank_is_zero)?;
        let cum_positives = parse_count(field(3), TRACKING_FIELDS[3], line, blank_is_zero)?;
        let cum_deaths = parse_count(field(4), TRACKING_FIELDS[4], line, blank_is_zero)?;
        if cum_positives > cum_tests {
            return Err(IngestError::ParseError {
                line,
                message: format!("{cum_positives} positives exceed {cum_tests} tests"),
            });
        }
        rows.push((
            line,
            region,
            DailyRecord {
                date,
                cum_tests,
                cum_positives,
                cum_deaths,
            },
        ));
    }
    Ok(rows)
}

fn clean(
    region: &str,
    records: impl Iterator<Item = DailyRecord>,
    policy: CleaningPolicy,
    warnings: &mut Vec<String>,
) -> Result<Vec<DailyRecord>, IngestError> {
    let mut out: Vec<DailyRecord> = Vec::new();
    let mut warn = |msg: String| {
        log::warn!("{msg}");
        warnings.push(msg);
    };
    for mut r in records {
        let Some(prev) = out.last().copied() else {
            out.push(r);
            continue;
        };
        let decreases = [
            ("tests", r.cum_tests < prev.cum_tests),
            ("positives", r.cum_positives < prev.cum_positives),
            ("deaths", r.cum_deaths < prev.cum_deaths),
        ];
        let Some((field, _)) = decreases.iter().find(|(_, d)| *d) else {
            out.push(r);
            continue;
        };
        match policy {
            CleaningPolicy::Reject => {
                return Err(IngestError::MonotonicityViolation {
                    region: region.to_string(),
                    date: r.date,
                    field,
                })
            }
            CleaningPolicy::ClampRunningMax => {
                for (name, decreased) in decreases {
                    if decreased {
                        warn(format!("{region} {}: cumulative {name} clamped to running maximum", r.date));
                    }
                }
                r.cum_tests = r.cum_tests.max(prev.cum_tests);
                r.cum_positives = r.cum_positives.max(prev.cum_positives);
                r.cum_deaths = r.cum_deaths.max(prev.cum_deaths);
                out.push(r);
            }
            CleaningPolicy::DropRecord => {
                warn(format!("{region} {}: record dropped, cumulative {field} decreases", r.date));
            }
        }
    }
    Ok(out)
}

/// Reads a `region,population` file.
pub fn load_regions(path: &Path) -> Result<Vec<RegionConfig>, IngestError> {
    read_regions(open(path)?)
}

pub fn read_regions<R: Read>(reader: R) -> Result<Vec<RegionConfig>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(["region", "population"]) {
        return Err(IngestError::ParseError {
            line: 1,
            message: "expected header `region,population`".into(),
        });
    }
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result?;
        let line = line_of(&record);
        let region = record.get(0).unwrap_or("").to_string();
        let population = parse_count(record.get(1).unwrap_or(""), "population", line, false)?;
        if region.is_empty() || population == 0 {
            return Err(IngestError::ParseError {
                line,
                message: "region must be named and population positive".into(),
            });
        }
        out.push(RegionConfig { region, population });
    }
    Ok(out)
}

/// Writes series in the generic layout, regions in the given order.
pub fn write_generic_csv<W: Write>(series: &[RegionSeries], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(GENERIC_HEADER)?;
    for s in series {
        for r in &s.records {
            wtr.write_record([
                r.date.format("%Y-%m-%d").to_string(),
                s.region.clone(),
                r.cum_tests.to_string(),
                r.cum_positives.to_string(),
                r.cum_deaths.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(|source| IngestError::Io {
        path: PathBuf::new(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regions() -> Vec<RegionConfig> {
        vec![
            RegionConfig { region: "A".into(), population: 1000 },
            RegionConfig { region: "B".into(), population: 500 },
        ]
    }

    fn spec(cleaning: CleaningPolicy) -> DatasetSpec {
        DatasetSpec {
            path: "inline.csv".into(),
            format: DatasetFormat::GenericCsv,
            region_filter: None,
            cleaning,
        }
    }

    const CLEAN: &str = "date,region,cum_tests,cum_positives,cum_deaths
2020-03-02,A,20,4,0
2020-03-01,A,10,2,0
2020-03-03,A,30,5,1
2020-03-01,B,5,1,0
";

    #[test]
    fn loads_generic_sorted() {
        let d = load_reader(CLEAN.as_bytes(), &spec(CleaningPolicy::Reject), &regions()).unwrap();
        assert_eq!(d.series.len(), 2);
        let a = &d.series[0];
        assert_eq!(a.region, "A");
        assert_eq!(a.records.len(), 3);
        assert_eq!(a.records[0].cum_tests, 10);
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn region_filter_and_unknown_region() {
        let mut s = spec(CleaningPolicy::Reject);
        s.region_filter = Some("B".into());
        let d = load_reader(CLEAN.as_bytes(), &s, &regions()).unwrap();
        assert_eq!(d.series.len(), 1);
        assert_eq!(d.series[0].region, "B");

        s.region_filter = Some("Z".into());
        assert!(matches!(
            load_reader(CLEAN.as_bytes(), &s, &regions()),
            Err(IngestError::UnknownRegion(_))
        ));
        let mut cfg = regions();
        cfg.push(RegionConfig { region: "C".into(), population: 10 });
        assert!(matches!(
            load_reader(CLEAN.as_bytes(), &spec(CleaningPolicy::Reject), &cfg),
            Err(IngestError::UnknownRegion(r)) if r == "C"
        ));
    }

    const DIP: &str = "date,region,cum_tests,cum_positives,cum_deaths
2020-03-01,A,100,10,0
2020-03-02,A,50,12,0
2020-03-03,A,120,14,1
";

    #[test]
    fn cleaning_policies() {
        let only_a = &regions()[..1];
        assert!(matches!(
            load_reader(DIP.as_bytes(), &spec(CleaningPolicy::Reject), only_a),
            Err(IngestError::MonotonicityViolation { field: "tests", .. })
        ));

        let d = load_reader(DIP.as_bytes(), &spec(CleaningPolicy::ClampRunningMax), only_a).unwrap();
        assert_eq!(d.series[0].records[1].cum_tests, 100);
        assert_eq!(d.series[0].records[1].cum_positives, 12);
        assert_eq!(d.warnings.len(), 1);

        let d = load_reader(DIP.as_bytes(), &spec(CleaningPolicy::DropRecord), only_a).unwrap();
        assert_eq!(d.series[0].records.len(), 2);
        assert_eq!(d.warnings.len(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "date,region,cum_tests,cum_positives,cum_deaths\n2020-03-01,A,10,2,0\n2020-03-02,A,x,2,0\n";
        match load_reader(bad.as_bytes(), &spec(CleaningPolicy::Reject), &regions()[..1]) {
            Err(IngestError::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad_header = "date,state,cum_tests,cum_positives,cum_deaths\n";
        assert!(matches!(
            load_reader(bad_header.as_bytes(), &spec(CleaningPolicy::Reject), &regions()),
            Err(IngestError::ParseError { line: 1, .. })
        ));
        let dup = "date,region,cum_tests,cum_positives,cum_deaths\n2020-03-01,A,10,2,0\n2020-03-01,A,11,2,0\n";
        assert!(matches!(
            load_reader(dup.as_bytes(), &spec(CleaningPolicy::Reject), &regions()[..1]),
            Err(IngestError::DuplicateDate { .. })
        ));
    }

    #[test]
    fn population_exceeded() {
        let big = "date,region,cum_tests,cum_positives,cum_deaths\n2020-03-01,B,501,2,0\n";
        let mut s = spec(CleaningPolicy::Reject);
        s.region_filter = Some("B".into());
        assert!(matches!(
            load_reader(big.as_bytes(), &s, &regions()),
            Err(IngestError::PopulationExceeded { .. })
        ));
    }

    #[test]
    fn tracking_project_layout() {
        // columns in tracking-project order with extras; checked by hand
        let text = "date,state,positive,negative,pending,death,totalTestResults
20200318,IL,288,2000,,1,2288
20200316,IL,93,1000,,,1093
20200317,IL,105,1500,,0,1605
20200316,NY,950,4000,,7,4950
";
        let mut s = spec(CleaningPolicy::Reject);
        s.format = DatasetFormat::TrackingProjectCsv;
        let cfg = vec![RegionConfig { region: "IL".into(), population: 12_671_821 }];
        let d = load_reader(text.as_bytes(), &s, &cfg).unwrap();
        let il = &d.series[0];
        assert_eq!(il.records.len(), 3);
        assert_eq!(
            il.records[0],
            DailyRecord {
                date: NaiveDate::from_ymd_opt(2020, 3, 16).unwrap(),
                cum_tests: 1093,
                cum_positives: 93,
                cum_deaths: 0,
            }
        );
        assert_eq!(il.records[2].cum_tests, 2288);
        assert_eq!(il.records[2].cum_deaths, 1);
    }

    #[test]
    fn regions_file() {
        let cfg = read_regions("region,population\nA,1000\nB,500\n".as_bytes()).unwrap();
        assert_eq!(cfg, regions());
        assert!(read_regions("region,population\nA,0\n".as_bytes()).is_err());
        assert!(read_regions("name,pop\nA,1\n".as_bytes()).is_err());
    }

    #[test]
    fn export_reload_round_trip() {
        let d = load_reader(CLEAN.as_bytes(), &spec(CleaningPolicy::Reject), &regions()).unwrap();
        let mut buf = Vec::new();
        write_generic_csv(&d.series, &mut buf).unwrap();
        let again = load_reader(buf.as_slice(), &spec(CleaningPolicy::Reject), &regions()).unwrap();
        assert_eq!(again.series, d.series);
    }
}
