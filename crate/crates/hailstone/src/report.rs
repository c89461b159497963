//! CSV and JSON renderings of scan reports, plus the text listings the CLI
//! prints.
//!
//! Data files are deterministic: stable field order, no timestamps, and
//! every integer written as a decimal string so arbitrary-precision values
//! survive tools that choke on wide JSON numbers.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::catalog::{parse_biguint, parse_u64, CycleCatalog, MapFile, ProvenanceFile};
use crate::error::{Error, Result};
use crate::orbit::{Bounds, Orbit};
use crate::scan::{CycleCount, ScanReport, ScanSummary, SeedRecord};

pub const CSV_HEADER: &str = "seed,classification,cycle_min,cycle_len,entry_steps,steps,peak";

/// Scan records as CSV, one row per seed, columns per [`CSV_HEADER`].
pub fn records_to_csv(records: &[SeedRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 32 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.seed.to_string());
        out.push(',');
        out.push_str(r.classification.as_str());
        out.push(',');
        if let Some(min) = &r.cycle_min {
            out.push_str(&min.to_string());
        }
        out.push(',');
        if let Some(len) = r.cycle_len {
            out.push_str(&len.to_string());
        }
        out.push(',');
        if let Some(entry) = r.entry_steps {
            out.push_str(&entry.to_string());
        }
        out.push(',');
        out.push_str(&r.steps.to_string());
        out.push(',');
        out.push_str(&r.peak.to_string());
        out.push('\n');
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<SeedRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(Error::Format(format!(
                "bad CSV header: expected {CSV_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Format(format!(
                "CSV row {}: expected 7 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        records.push(SeedRecord {
            seed: parse_u64("seed", fields[0])?,
            classification: fields[1].parse()?,
            cycle_min: opt(fields[2]).map(|s| parse_biguint("cycle_min", s)).transpose()?,
            cycle_len: opt(fields[3]).map(|s| parse_u64("cycle_len", s)).transpose()?,
            entry_steps: opt(fields[4]).map(|s| parse_u64("entry_steps", s)).transpose()?,
            steps: parse_u64("steps", fields[5])?,
            peak: parse_biguint("peak", fields[6])?,
        });
    }
    Ok(records)
}

fn opt(field: &str) -> Option<&str> {
    if field.is_empty() {
        None
    } else {
        Some(field)
    }
}

#[derive(Serialize, Deserialize)]
struct RangeFile {
    lo: String,
    hi: String,
}

#[derive(Serialize, Deserialize)]
struct BoundsFile {
    max_steps: String,
    max_value_bits: String,
    stop_at_one: bool,
}

#[derive(Serialize, Deserialize)]
struct RecordFile {
    seed: String,
    classification: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cycle_min: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cycle_len: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    entry_steps: Option<String>,
    steps: String,
    peak: String,
}

#[derive(Serialize, Deserialize)]
struct CycleCountFile {
    cycle_min: String,
    count: String,
}

#[derive(Serialize, Deserialize)]
struct SummaryFile {
    reaches_one: String,
    enters_cycle: String,
    undetermined: String,
    cycle_counts: Vec<CycleCountFile>,
    undetermined_seeds: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct DeltaFile {
    cycle: Vec<String>,
    provenance: ProvenanceFile,
}

#[derive(Serialize, Deserialize)]
struct ScanReportFile {
    map: MapFile,
    range: RangeFile,
    bounds: BoundsFile,
    records: Vec<RecordFile>,
    summary: SummaryFile,
    catalog_delta: Vec<DeltaFile>,
}

/// The whole scan report as deterministic pretty JSON.
pub fn report_to_json(report: &ScanReport) -> String {
    let file = ScanReportFile {
        map: MapFile::from_map(&report.map),
        range: RangeFile {
            lo: report.lo.to_string(),
            hi: report.hi.to_string(),
        },
        bounds: BoundsFile {
            max_steps: report.bounds.max_steps.to_string(),
            max_value_bits: report.bounds.max_value_bits.to_string(),
            stop_at_one: report.bounds.stop_at_one,
        },
        records: report
            .records
            .iter()
            .map(|r| RecordFile {
                seed: r.seed.to_string(),
                classification: r.classification.as_str().to_string(),
                cycle_min: r.cycle_min.as_ref().map(|v| v.to_string()),
                cycle_len: r.cycle_len.map(|v| v.to_string()),
                entry_steps: r.entry_steps.map(|v| v.to_string()),
                steps: r.steps.to_string(),
                peak: r.peak.to_string(),
            })
            .collect(),
        summary: SummaryFile {
            reaches_one: report.summary.reaches_one.to_string(),
            enters_cycle: report.summary.enters_cycle.to_string(),
            undetermined: report.summary.undetermined.to_string(),
            cycle_counts: report
                .summary
                .cycle_counts
                .iter()
                .map(|c| CycleCountFile {
                    cycle_min: c.cycle_min.to_string(),
                    count: c.count.to_string(),
                })
                .collect(),
            undetermined_seeds: report
                .summary
                .undetermined_seeds
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
        catalog_delta: report
            .catalog_delta
            .iter()
            .map(|entry| DeltaFile {
                cycle: entry.cycle.elements().iter().map(|v| v.to_string()).collect(),
                provenance: ProvenanceFile::from_provenance(&entry.provenance),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("report serializes");
    out.push('\n');
    out
}

pub fn report_from_json(text: &str) -> Result<ScanReport> {
    let file: ScanReportFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("report JSON: {e}")))?;
    let map = file.map.into_map()?;
    let mut records = Vec::with_capacity(file.records.len());
    for r in file.records {
        records.push(SeedRecord {
            seed: parse_u64("seed", &r.seed)?,
            classification: r.classification.parse()?,
            cycle_min: r
                .cycle_min
                .as_deref()
                .map(|s| parse_biguint("cycle_min", s))
                .transpose()?,
            cycle_len: r
                .cycle_len
                .as_deref()
                .map(|s| parse_u64("cycle_len", s))
                .transpose()?,
            entry_steps: r
                .entry_steps
                .as_deref()
                .map(|s| parse_u64("entry_steps", s))
                .transpose()?,
            steps: parse_u64("steps", &r.steps)?,
            peak: parse_biguint("peak", &r.peak)?,
        });
    }
    let mut cycle_counts = Vec::with_capacity(file.summary.cycle_counts.len());
    for c in file.summary.cycle_counts {
        cycle_counts.push(CycleCount {
            cycle_min: parse_biguint("cycle_min", &c.cycle_min)?,
            count: parse_u64("count", &c.count)?,
        });
    }
    let mut undetermined_seeds = Vec::with_capacity(file.summary.undetermined_seeds.len());
    for s in file.summary.undetermined_seeds {
        undetermined_seeds.push(parse_u64("undetermined seed", &s)?);
    }
    let mut catalog_delta = Vec::with_capacity(file.catalog_delta.len());
    for d in file.catalog_delta {
        let elements = d
            .cycle
            .iter()
            .map(|s| parse_biguint("cycle element", s))
            .collect::<Result<Vec<BigUint>>>()?;
        let cycle = crate::catalog::Cycle::canonicalize(&map, &elements)?;
        catalog_delta.push(crate::catalog::CatalogEntry {
            cycle,
            provenance: d.provenance.into_provenance()?,
        });
    }
    Ok(ScanReport {
        map,
        lo: parse_u64("lo", &file.range.lo)?,
        hi: parse_u64("hi", &file.range.hi)?,
        bounds: Bounds {
            max_steps: parse_u64("max_steps", &file.bounds.max_steps)?,
            max_value_bits: parse_u64("max_value_bits", &file.bounds.max_value_bits)?,
            stop_at_one: file.bounds.stop_at_one,
        },
        records,
        summary: ScanSummary {
            reaches_one: parse_u64("reaches_one", &file.summary.reaches_one)?,
            enters_cycle: parse_u64("enters_cycle", &file.summary.enters_cycle)?,
            undetermined: parse_u64("undetermined", &file.summary.undetermined)?,
            cycle_counts,
            undetermined_seeds,
        },
        catalog_delta,
    })
}

/// Human-oriented scan summary for standard error.
pub fn render_scan_summary(report: &ScanReport) -> String {
    let mut out = format!(
        "map={} range={}..={} reaches_one={} enters_cycle={} undetermined={} new_cycles={}\n",
        report.map,
        report.lo,
        report.hi,
        report.summary.reaches_one,
        report.summary.enters_cycle,
        report.summary.undetermined,
        report.catalog_delta.len()
    );
    for c in &report.summary.cycle_counts {
        out.push_str(&format!("cycle min={} seeds={}\n", c.cycle_min, c.count));
    }
    if !report.summary.undetermined_seeds.is_empty() {
        let listed: Vec<String> = report
            .summary
            .undetermined_seeds
            .iter()
            .map(|s| s.to_string())
            .collect();
        out.push_str(&format!("undetermined_seeds={}\n", listed.join(",")));
    }
    out
}

/// Catalog listing: one line per cycle, ascending by minimum element.
pub fn render_catalog_listing(catalog: &CycleCatalog) -> String {
    let mut out = format!("map={} cycles={}\n", catalog.map(), catalog.len());
    for entry in catalog.entries() {
        let elements: Vec<String> = entry
            .cycle
            .elements()
            .iter()
            .map(|v| v.to_string())
            .collect();
        let provenance = match &entry.provenance {
            crate::catalog::Provenance::Fixture => "fixture".to_string(),
            crate::catalog::Provenance::Discovered { seed } => format!("discovered_by={seed}"),
        };
        out.push_str(&format!(
            "min={} len={} provenance={} elements={}\n",
            entry.cycle.min_element(),
            entry.cycle.len(),
            provenance,
            elements.join(",")
        ));
    }
    out
}

/// Orbit rendering for the CLI: key fields, then optionally the trajectory
/// one value per line.
pub fn render_orbit(orbit: &Orbit, with_trajectory: bool) -> String {
    let mut out = format!(
        "seed={} classification={} steps={} peak={}",
        orbit.seed,
        orbit.classification.as_str(),
        orbit.steps_to_termination,
        orbit.peak
    );
    if let Some(entry) = orbit.entry_steps {
        out.push_str(&format!(" entry_steps={entry}"));
    }
    if let Some(cycle) = &orbit.cycle_ref {
        out.push_str(&format!(
            " cycle_min={} cycle_len={}",
            cycle.min_element, cycle.len
        ));
    }
    if let Some(trigger) = orbit.trigger {
        out.push_str(&format!(" trigger={}", trigger.as_str()));
    }
    out.push('\n');
    if with_trajectory {
        for value in &orbit.prefix {
            out.push_str(&value.to_string());
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::MapSpec;
    use crate::scan::scan_range;

    fn sample_report(stop_at_one: bool) -> ScanReport {
        let map = MapSpec::preset("3n+5").unwrap();
        let catalog = CycleCatalog::new(map.clone());
        let bounds = Bounds {
            stop_at_one,
            ..Bounds::default()
        };
        scan_range(&map, 1, 40, &bounds, &catalog, 2).unwrap().0
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let report = sample_report(false);
        let text = records_to_csv(&report.records);
        assert!(text.starts_with(CSV_HEADER));
        let back = records_from_csv(&text).unwrap();
        assert_eq!(back, report.records);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(matches!(
            records_from_csv("nonsense\n"),
            Err(Error::Format(_))
        ));
        let short = format!("{CSV_HEADER}\n1,reaches_one\n");
        assert!(matches!(records_from_csv(&short), Err(Error::Format(_))));
    }

    #[test]
    fn json_round_trip_preserves_the_whole_report() {
        for stop in [true, false] {
            let report = sample_report(stop);
            let text = report_to_json(&report);
            assert_eq!(text, report_to_json(&report));
            let back = report_from_json(&text).unwrap();
            assert_eq!(back, report);
        }
    }

    #[test]
    fn csv_and_json_encode_the_same_records() {
        let report = sample_report(false);
        let from_csv = records_from_csv(&records_to_csv(&report.records)).unwrap();
        let from_json = report_from_json(&report_to_json(&report)).unwrap().records;
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn catalog_listing_is_sorted_and_labeled() {
        let catalog = CycleCatalog::fixtures("3n+5").unwrap();
        let listing = render_catalog_listing(&catalog);
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "map=3n+5 cycles=4");
        assert!(lines[1].starts_with("min=1 len=4 provenance=fixture"));
        assert!(lines[2].starts_with("min=5 len=3"));
        assert!(lines[3].starts_with("min=19 len=8"));
        assert!(lines[4].starts_with("min=23 len=8"));
    }

    #[test]
    fn orbit_rendering_includes_trajectory_on_request() {
        let map = MapSpec::preset("3n+1").unwrap();
        let orbit =
            crate::orbit::classify_orbit(&map, &BigUint::from(7u32), &Bounds::default()).unwrap();
        let text = render_orbit(&orbit, true);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "seed=7 classification=reaches_one steps=16 peak=52"
        );
        let trajectory: Vec<&str> = lines.collect();
        assert_eq!(trajectory.len(), 17);
        assert_eq!(trajectory[0], "7");
        assert_eq!(trajectory[16], "1");
    }
}
