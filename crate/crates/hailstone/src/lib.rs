//! Generalized hailstone maps: `n/2` when even, `a*n + b` when odd, with
//! `a` and `b` odd. Classic Collatz is `(a, b) = (3, 1)`; the built-in
//! presets also cover `5n+1` (which mixes convergent, cyclic, and
//! apparently escaping seeds) and `3n+5` (which appears to be all cycles).
//!
//! The crate classifies orbits over arbitrary-precision integers, discovers
//! and catalogs repeating cycles in canonical form, scans seed ranges in
//! parallel with deterministic output, and ships executable checkers for
//! the structural facts these families exhibit (power-of-two cycle
//! invariance, the entry-step offset of `10 * 2^r`, terminal digits of odd
//! cycle members, multiples of five, and the five-fold correspondence
//! between `3n+5` and `3n+1`).
//!
//! ## Quick start
//!
//! ```
//! use hailstone::{classify_orbit, Bounds, Classification, MapSpec};
//! use num_bigint::BigUint;
//!
//! let map = MapSpec::preset("5n+1")?;
//! let orbit = classify_orbit(&map, &BigUint::from(5u32), &Bounds::default())?;
//! assert_eq!(orbit.classification, Classification::EntersCycle);
//! assert_eq!(orbit.cycle_ref.unwrap().min_element, BigUint::from(13u32));
//! # Ok::<(), hailstone::Error>(())
//! ```
//!
//! ## Runnable examples
//!
//! Each major capability has one example under `examples/`:
//!
//! - `orbit_basics` — steps, trajectories, and orbit classification
//! - `cycle_hunting` — cycle detection, canonical rotation, deduplication
//! - `range_scan` — parallel seed-range scans with reports
//! - `catalog_files` — persisting and reloading cycle catalogs
//! - `verify_claims` — the five structural checkers
//! - `correspondence` — the `3n+5` / `3n+1` five-fold identity
//! - `custom_map` — exploring a map outside the presets
//!
//! Run one with `cargo run -p hailstone --example orbit_basics`.

pub mod catalog;
pub mod error;
pub mod map;
pub mod orbit;
pub mod report;
pub mod scan;
pub mod verify;

pub use catalog::{CatalogEntry, Cycle, CycleCatalog, Provenance};
pub use error::{Error, Result};
pub use map::MapSpec;
pub use orbit::{
    classify_orbit, classify_orbit_with, detect_cycle, BoundHit, Bounds, Classification,
    CycleRef, Orbit, PrefixRetention,
};
pub use scan::{
    memoized_classify, scan_range, Memo, MemoEntry, Memoized, ScanReport, ScanSummary, SeedRecord,
};
pub use verify::{
    verify_10_pow2_entry, verify_correspondence, verify_multiples_of_5, verify_odd_digit_pattern,
    verify_pow2_same_cycle, ClaimResult, Failure,
};
