//! Range scanning: classify every seed in `[lo, hi]` under one map, growing
//! a cycle catalog along the way.
//!
//! Work is sharded into contiguous seed blocks, one per worker, and merged
//! in block order afterwards; workers share nothing while classifying. Each
//! worker short-circuits through its own memo of already-classified seeds
//! and through the cycle catalog. Every short-circuit is vetted to produce
//! exactly the record a plain [`classify_orbit`] walk would produce, which
//! is what makes scan output identical for any worker count.
//!
//! [`classify_orbit`]: crate::orbit::classify_orbit

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::catalog::{CatalogEntry, Cycle, CycleCatalog, Provenance};
use crate::error::{Error, Result};
use crate::map::MapSpec;
use crate::orbit::{
    probe, BoundHit, Bounds, Classification, CycleRef, Orbit, PrefixRetention, ProbeOutcome,
    ShortCircuit,
};

/// Per-seed result of a scan, in report column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRecord {
    pub seed: u64,
    pub classification: Classification,
    pub cycle_min: Option<BigUint>,
    pub cycle_len: Option<u64>,
    pub entry_steps: Option<u64>,
    pub steps: u64,
    pub peak: BigUint,
}

/// How many scanned seeds landed in one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCount {
    pub cycle_min: BigUint,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSummary {
    pub reaches_one: u64,
    pub enters_cycle: u64,
    pub undetermined: u64,
    /// Seed counts per cycle, ascending by cycle key.
    pub cycle_counts: Vec<CycleCount>,
    /// Every undetermined seed, so escape candidates stay auditable.
    pub undetermined_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub map: MapSpec,
    pub lo: u64,
    pub hi: u64,
    pub bounds: Bounds,
    pub records: Vec<SeedRecord>,
    pub summary: ScanSummary,
    /// Cycles first proven during this scan, ascending by cycle key.
    pub catalog_delta: Vec<CatalogEntry>,
}

/// Cached classification of one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoEntry {
    pub classification: Classification,
    pub cycle_min: Option<BigUint>,
    pub cycle_len: Option<u64>,
    pub entry_steps: Option<u64>,
    pub steps: u64,
    pub peak: BigUint,
    pub trigger: Option<BoundHit>,
}

impl From<&Orbit> for MemoEntry {
    fn from(orbit: &Orbit) -> Self {
        Self {
            classification: orbit.classification,
            cycle_min: orbit.cycle_ref.as_ref().map(|c| c.min_element.clone()),
            cycle_len: orbit.cycle_ref.as_ref().map(|c| c.len),
            entry_steps: orbit.entry_steps,
            steps: orbit.steps_to_termination,
            peak: orbit.peak.clone(),
            trigger: orbit.trigger,
        }
    }
}

/// Seed-to-classification cache, tied to the map and bounds it was built
/// under.
#[derive(Debug, Clone)]
pub struct Memo {
    map: MapSpec,
    bounds: Bounds,
    entries: HashMap<u64, MemoEntry>,
}

impl Memo {
    pub fn new(map: MapSpec, bounds: Bounds) -> Self {
        Self {
            map,
            bounds,
            entries: HashMap::new(),
        }
    }

    pub fn map(&self) -> &MapSpec {
        &self.map
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn insert(&mut self, seed: u64, entry: MemoEntry) {
        self.entries.insert(seed, entry);
    }

    pub fn get(&self, seed: u64) -> Option<&MemoEntry> {
        self.entries.get(&seed)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Usable for a query under `map`/`bounds` only if built for the same
    /// map and stop convention, under equal-or-larger caps. A memo built
    /// under smaller caps could serve stale `Undetermined` answers.
    fn check_compatible(&self, map: &MapSpec, bounds: &Bounds) -> Result<()> {
        if self.map != *map {
            return Err(Error::MemoMismatch(format!(
                "memo built for {}, queried under {}",
                self.map, map
            )));
        }
        if self.bounds.stop_at_one != bounds.stop_at_one {
            return Err(Error::MemoMismatch(
                "memo and query disagree on stop_at_one".into(),
            ));
        }
        if self.bounds.max_steps < bounds.max_steps
            || self.bounds.max_value_bits < bounds.max_value_bits
        {
            return Err(Error::MemoMismatch(format!(
                "memo built under bounds ({}, {}) smaller than queried ({}, {})",
                self.bounds.max_steps,
                self.bounds.max_value_bits,
                bounds.max_steps,
                bounds.max_value_bits
            )));
        }
        Ok(())
    }
}

/// A classification that may have been served through caches. The
/// classification and cycle identity always equal [`classify_orbit`]'s
/// answer; `steps_exact` is false when step counts were composed through a
/// cache entry whose cycle is not cataloged, in which case
/// `steps_to_termination` and `entry_steps` may overshoot.
///
/// [`classify_orbit`]: crate::orbit::classify_orbit
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Memoized {
    pub orbit: Orbit,
    pub steps_exact: bool,
}

/// Classifies `seed`, short-circuiting through `memo` and `catalog` when the
/// trajectory touches something already known.
pub fn memoized_classify(
    map: &MapSpec,
    seed: u64,
    bounds: &Bounds,
    memo: &Memo,
    catalog: &CycleCatalog,
) -> Result<Memoized> {
    if seed == 0 {
        return Err(Error::InvalidSeed);
    }
    bounds.validate()?;
    memo.check_compatible(map, bounds)?;
    if catalog.map() != map {
        return Err(Error::MapMismatch {
            expected: map.name().to_string(),
            found: catalog.map().name().to_string(),
        });
    }

    if let Some(entry) = memo.get(seed) {
        if let Some(m) = verbatim_from_memo(seed, entry, bounds) {
            return Ok(m);
        }
    }

    let (outcome, _discovered) = classify_shortcut(map, seed, bounds, memo, catalog);
    let steps_exact = outcome.steps_exact;
    Ok(Memoized {
        orbit: outcome.into_orbit(BigUint::from(seed)),
        steps_exact,
    })
}

/// Serve a direct cache hit, adjusted to the queried bounds. Returns `None`
/// when the entry cannot be translated exactly (the walk runs instead).
fn verbatim_from_memo(seed: u64, entry: &MemoEntry, bounds: &Bounds) -> Option<Memoized> {
    if entry.peak.bits() > bounds.max_value_bits {
        // Some visited value exceeds the queried cap and the entry does not
        // say when it was reached.
        return None;
    }
    let orbit = match entry.classification {
        Classification::Undetermined => {
            // Unresolved under equal-or-larger caps, so unresolved here too;
            // clamp the bound bookkeeping to the queried step cap.
            let (steps, trigger) = if entry.steps <= bounds.max_steps {
                (entry.steps, entry.trigger)
            } else {
                (bounds.max_steps, Some(BoundHit::StepLimit))
            };
            Orbit {
                seed: BigUint::from(seed),
                classification: Classification::Undetermined,
                steps_to_termination: steps,
                entry_steps: None,
                cycle_ref: None,
                trigger,
                peak: entry.peak.clone(),
                prefix: Vec::new(),
            }
        }
        _ if entry.steps <= bounds.max_steps => Orbit {
            seed: BigUint::from(seed),
            classification: entry.classification,
            steps_to_termination: entry.steps,
            entry_steps: entry.entry_steps,
            cycle_ref: entry.cycle_min.clone().map(|min_element| CycleRef {
                min_element,
                len: entry.cycle_len.expect("cycle length cached with cycle key"),
            }),
            trigger: None,
            peak: entry.peak.clone(),
            prefix: Vec::new(),
        },
        // Resolution lies past the queried step cap; reclassify.
        _ => return None,
    };
    Some(Memoized {
        orbit,
        steps_exact: true,
    })
}

/// The scan classifier: a plain bounded walk plus catalog/memo
/// short-circuits. Every accepted short-circuit reproduces the plain walk's
/// record bit for bit; anything that cannot be vetted is ignored and the
/// walk continues.
fn classify_shortcut(
    map: &MapSpec,
    seed: u64,
    bounds: &Bounds,
    memo: &Memo,
    catalog: &CycleCatalog,
) -> (ProbeOutcome, Option<Vec<BigUint>>) {
    let seed_big = BigUint::from(seed);
    let mut outcome = probe(
        map,
        &seed_big,
        bounds,
        PrefixRetention::None,
        |value, steps_so_far| hook(value, steps_so_far, bounds, memo, catalog),
    );
    let discovered = outcome.cycle_elements.take();
    (outcome, discovered)
}

fn hook(
    value: &BigUint,
    steps_so_far: u64,
    bounds: &Bounds,
    memo: &Memo,
    catalog: &CycleCatalog,
) -> Option<ShortCircuit> {
    let small = if value.bits() <= 64 {
        value.to_u64()
    } else {
        None
    };

    let catalog_entry = match small {
        Some(v) => catalog.lookup_small(v),
        None if catalog.has_big_elements() => catalog.lookup(value),
        None => None,
    };
    if let Some(entry) = catalog_entry {
        let cycle = &entry.cycle;
        let one_cycle = cycle.min_element().to_u64() == Some(1);
        // Under stop-at-one the cycle through 1 never plays: the walk
        // terminates at 1 instead of looping.
        if !(bounds.stop_at_one && one_cycle) {
            let lam = cycle.len() as u64;
            if let Some(steps) = steps_so_far.checked_add(lam) {
                if steps <= bounds.max_steps
                    && cycle.max_element().bits() <= bounds.max_value_bits
                {
                    return Some(ShortCircuit {
                        classification: Classification::EntersCycle,
                        cycle_min: Some(cycle.min_element().clone()),
                        cycle_len: Some(lam),
                        entry_steps: Some(steps_so_far),
                        steps,
                        tail_peak: cycle.max_element().clone(),
                        steps_exact: true,
                    });
                }
            }
        }
    }

    let cached = memo.get(small?)?;
    match cached.classification {
        // An undetermined tail says nothing exact about this seed.
        Classification::Undetermined => None,
        classification => {
            let steps = steps_so_far.checked_add(cached.steps)?;
            if steps > bounds.max_steps || cached.peak.bits() > bounds.max_value_bits {
                return None;
            }
            let steps_exact = match classification {
                Classification::ReachesOne => true,
                // Composed entry counts are exact only when the cached
                // seed's cycle is cataloged: the catalog check above then
                // catches the true entry point first.
                Classification::EntersCycle => cached
                    .cycle_min
                    .as_ref()
                    .is_some_and(|min| catalog.get(min).is_some()),
                Classification::Undetermined => unreachable!(),
            };
            Some(ShortCircuit {
                classification,
                cycle_min: cached.cycle_min.clone(),
                cycle_len: cached.cycle_len,
                entry_steps: cached.entry_steps.map(|e| e + steps_so_far),
                steps,
                tail_peak: cached.peak.clone(),
                steps_exact,
            })
        }
    }
}

/// Classifies every seed in `[lo, hi]` under `map`, returning the report
/// and the input catalog grown by whatever cycles the scan proved.
///
/// Output is identical for every worker count.
pub fn scan_range(
    map: &MapSpec,
    lo: u64,
    hi: u64,
    bounds: &Bounds,
    catalog: &CycleCatalog,
    workers: usize,
) -> Result<(ScanReport, CycleCatalog)> {
    if lo < 1 || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if workers == 0 {
        return Err(Error::InvalidWorkers);
    }
    bounds.validate()?;
    if catalog.map() != map {
        return Err(Error::MapMismatch {
            expected: map.name().to_string(),
            found: catalog.map().name().to_string(),
        });
    }

    let blocks = partition(lo, hi, workers);
    let block_results: Vec<BlockResult> = if blocks.len() == 1 {
        vec![scan_block(map, blocks[0].0, blocks[0].1, bounds, catalog)?]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .iter()
                .map(|&(block_lo, block_hi)| {
                    scope.spawn(move || scan_block(map, block_lo, block_hi, bounds, catalog))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scan worker panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let mut merged = catalog.clone();
    let mut records = Vec::with_capacity((hi - lo + 1) as usize);
    for block in block_results {
        for (cycle, seed) in block.discoveries {
            merged.register(
                cycle,
                Provenance::Discovered {
                    seed: BigUint::from(seed),
                },
            )?;
        }
        records.extend(block.records);
    }

    let catalog_delta: Vec<CatalogEntry> = merged
        .entries()
        .filter(|entry| catalog.get(entry.cycle.min_element()).is_none())
        .cloned()
        .collect();
    let summary = summarize(&records);
    let report = ScanReport {
        map: map.clone(),
        lo,
        hi,
        bounds: bounds.clone(),
        records,
        summary,
        catalog_delta,
    };
    Ok((report, merged))
}

/// Contiguous, balanced blocks covering `[lo, hi]`.
fn partition(lo: u64, hi: u64, workers: usize) -> Vec<(u64, u64)> {
    let total = hi - lo + 1;
    let workers = (workers as u64).min(total).max(1);
    let base = total / workers;
    let extra = total % workers;
    let mut blocks = Vec::with_capacity(workers as usize);
    let mut start = lo;
    for i in 0..workers {
        let size = base + u64::from(i < extra);
        blocks.push((start, start + size - 1));
        start += size;
    }
    blocks
}

struct BlockResult {
    records: Vec<SeedRecord>,
    /// Cycles first proven in this block with their discovering seed, in
    /// ascending seed order.
    discoveries: Vec<(Cycle, u64)>,
}

fn scan_block(
    map: &MapSpec,
    lo: u64,
    hi: u64,
    bounds: &Bounds,
    base_catalog: &CycleCatalog,
) -> Result<BlockResult> {
    let mut catalog = base_catalog.clone();
    let mut memo = Memo::new(map.clone(), bounds.clone());
    let mut records = Vec::with_capacity((hi - lo + 1) as usize);
    let mut discoveries = Vec::new();

    for seed in lo..=hi {
        let (outcome, discovered) = classify_shortcut(map, seed, bounds, &memo, &catalog);
        debug_assert!(outcome.steps_exact, "scan short-circuits must stay exact");

        if let Some(elements) = discovered {
            let cycle = Cycle::canonicalize(map, &elements)?;
            let was_new = catalog.register(
                cycle.clone(),
                Provenance::Discovered {
                    seed: BigUint::from(seed),
                },
            )?;
            if was_new {
                discoveries.push((cycle, seed));
            }
        }

        let record = SeedRecord {
            seed,
            classification: outcome.classification,
            cycle_min: outcome.cycle_min.clone(),
            cycle_len: outcome.cycle_len,
            entry_steps: outcome.entry_steps,
            steps: outcome.steps,
            peak: outcome.peak.clone(),
        };
        if record.classification != Classification::Undetermined {
            memo.insert(
                seed,
                MemoEntry {
                    classification: record.classification,
                    cycle_min: record.cycle_min.clone(),
                    cycle_len: record.cycle_len,
                    entry_steps: record.entry_steps,
                    steps: record.steps,
                    peak: record.peak.clone(),
                    trigger: None,
                },
            );
        }
        records.push(record);
    }

    Ok(BlockResult {
        records,
        discoveries,
    })
}

fn summarize(records: &[SeedRecord]) -> ScanSummary {
    let mut reaches_one = 0;
    let mut enters_cycle = 0;
    let mut undetermined = 0;
    let mut cycle_counts: BTreeMap<BigUint, u64> = BTreeMap::new();
    let mut undetermined_seeds = Vec::new();
    for record in records {
        match record.classification {
            Classification::ReachesOne => reaches_one += 1,
            Classification::EntersCycle => {
                enters_cycle += 1;
                let key = record
                    .cycle_min
                    .clone()
                    .expect("cycle key on EntersCycle record");
                *cycle_counts.entry(key).or_insert(0) += 1;
            }
            Classification::Undetermined => {
                undetermined += 1;
                undetermined_seeds.push(record.seed);
            }
        }
    }
    ScanSummary {
        reaches_one,
        enters_cycle,
        undetermined,
        cycle_counts: cycle_counts
            .into_iter()
            .map(|(cycle_min, count)| CycleCount { cycle_min, count })
            .collect(),
        undetermined_seeds,
    }
}
