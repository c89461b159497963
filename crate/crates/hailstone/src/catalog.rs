//! Canonical cycles and per-map cycle catalogs.
//!
//! A cycle is stored as its trajectory order rotated to begin at the
//! minimum element, which gives every cycle a unique key without losing the
//! order values actually appear in. Catalogs are keyed per map; cycles of
//! one map are meaningless under another.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::MapSpec;

/// A repeating loop in canonical form: trajectory order starting from the
/// minimum element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    elements: Vec<BigUint>,
}

impl Cycle {
    /// Validates `loop_elements` as a genuine loop under `map` (distinct
    /// elements, step-closure) and rotates it to start at the minimum.
    /// Idempotent: canonical input comes back unchanged.
    pub fn canonicalize(map: &MapSpec, loop_elements: &[BigUint]) -> Result<Self> {
        if loop_elements.is_empty() {
            return Err(Error::InvalidCycle("empty element list".into()));
        }
        let mut min_idx = 0;
        for (i, v) in loop_elements.iter().enumerate() {
            if *v < loop_elements[min_idx] {
                min_idx = i;
            }
            for w in &loop_elements[i + 1..] {
                if w == v {
                    return Err(Error::InvalidCycle(format!("duplicate element {v}")));
                }
            }
        }
        for (i, v) in loop_elements.iter().enumerate() {
            let next = &loop_elements[(i + 1) % loop_elements.len()];
            let stepped = map.step(v)?;
            if stepped != *next {
                return Err(Error::InvalidCycle(format!(
                    "not closed under {map}: step({v}) = {stepped}, list says {next}"
                )));
            }
        }
        let mut elements = Vec::with_capacity(loop_elements.len());
        elements.extend_from_slice(&loop_elements[min_idx..]);
        elements.extend_from_slice(&loop_elements[..min_idx]);
        Ok(Self { elements })
    }

    /// Canonical trajectory order, beginning at the minimum element.
    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn min_element(&self) -> &BigUint {
        &self.elements[0]
    }

    pub fn max_element(&self) -> &BigUint {
        self.elements.iter().max().expect("cycle is nonempty")
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        self.elements.contains(value)
    }

    /// Test-only escape hatch for building deliberately broken cycles.
    #[doc(hidden)]
    pub fn from_raw_unchecked(elements: Vec<BigUint>) -> Self {
        Self { elements }
    }
}

impl std::fmt::Display for Cycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Where a cataloged cycle came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// One of the built-in known cycles for a preset map.
    Fixture,
    /// Found by classifying `seed` during a scan or by hand.
    Discovered { seed: BigUint },
}

impl Provenance {
    /// Merge preference: fixtures win; among discoveries the smallest seed
    /// wins. Keeps catalog merges associative and commutative.
    fn prefer(self, other: Provenance) -> Provenance {
        match (self, other) {
            (Provenance::Fixture, _) | (_, Provenance::Fixture) => Provenance::Fixture,
            (Provenance::Discovered { seed: a }, Provenance::Discovered { seed: b }) => {
                Provenance::Discovered { seed: a.min(b) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub cycle: Cycle,
    pub provenance: Provenance,
}

/// Deduplicated set of known cycles for one map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCatalog {
    map: MapSpec,
    entries: BTreeMap<BigUint, CatalogEntry>,
    // Element -> owning cycle key. Values small enough for u64 get the fast
    // index so hot scan loops never hash a wide integer.
    small_index: HashMap<u64, BigUint>,
    big_index: HashMap<BigUint, BigUint>,
}

impl CycleCatalog {
    pub fn new(map: MapSpec) -> Self {
        Self {
            map,
            entries: BTreeMap::new(),
            small_index: HashMap::new(),
            big_index: HashMap::new(),
        }
    }

    /// The known cycles of the preset maps, validated at construction.
    ///
    /// `"5n+1"` carries its two ten-element cycles, `"3n+5"` its four
    /// cycles, `"3n+1"` the trivial `[1, 4, 2]` loop.
    pub fn fixtures(map_name: &str) -> Result<Self> {
        let map = MapSpec::preset(map_name)?;
        let tables: &[&[u64]] = match map_name {
            "3n+1" => &[&[1, 4, 2]],
            "5n+1" => &[
                &[13, 66, 33, 166, 83, 416, 208, 104, 52, 26],
                &[17, 86, 43, 216, 108, 54, 27, 136, 68, 34],
            ],
            "3n+5" => &[
                &[1, 8, 4, 2],
                &[5, 20, 10],
                &[19, 62, 31, 98, 49, 152, 76, 38],
                &[23, 74, 37, 116, 58, 29, 92, 46],
            ],
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        let mut catalog = Self::new(map);
        for table in tables {
            let elements: Vec<BigUint> = table.iter().copied().map(BigUint::from).collect();
            let cycle = Cycle::canonicalize(catalog.map(), &elements)?;
            catalog.register(cycle, Provenance::Fixture)?;
        }
        Ok(catalog)
    }

    pub fn map(&self) -> &MapSpec {
        &self.map
    }

    /// Number of distinct cycles.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending order of minimum element.
    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn get(&self, min_element: &BigUint) -> Option<&CatalogEntry> {
        self.entries.get(min_element)
    }

    /// Inserts a cycle if its key is new. Returns whether it was new.
    /// A cycle sharing some but not all elements with an existing entry is
    /// rejected: deterministic orbits make real cycles disjoint, so overlap
    /// means corruption.
    pub fn register(&mut self, cycle: Cycle, provenance: Provenance) -> Result<bool> {
        if let Some(existing) = self.entries.get_mut(cycle.min_element()) {
            if existing.cycle == cycle {
                existing.provenance = existing.provenance.clone().prefer(provenance);
                return Ok(false);
            }
            return Err(Error::CatalogCorruption(format!(
                "cycle {cycle} collides with cataloged cycle {} on key {}",
                existing.cycle,
                cycle.min_element()
            )));
        }
        for v in cycle.elements() {
            if let Some(owner) = self.lookup_key(v) {
                return Err(Error::CatalogCorruption(format!(
                    "cycle {cycle} shares element {v} with the cycle keyed by {owner}"
                )));
            }
        }
        // Closure under this catalog's map; also rejects cycles canonical
        // under some other map.
        let cycle = Cycle::canonicalize(&self.map, cycle.elements())?;
        let key = cycle.min_element().clone();
        for v in cycle.elements() {
            match v.to_u64() {
                Some(small) => {
                    self.small_index.insert(small, key.clone());
                }
                None => {
                    self.big_index.insert(v.clone(), key.clone());
                }
            }
        }
        self.entries.insert(
            key,
            CatalogEntry {
                cycle,
                provenance,
            },
        );
        Ok(true)
    }

    /// Test-only insertion that bypasses validation.
    #[doc(hidden)]
    pub fn register_unchecked(&mut self, cycle: Cycle, provenance: Provenance) {
        let key = cycle.min_element().clone();
        for v in cycle.elements() {
            match v.to_u64() {
                Some(small) => {
                    self.small_index.insert(small, key.clone());
                }
                None => {
                    self.big_index.insert(v.clone(), key.clone());
                }
            }
        }
        self.entries.insert(key, CatalogEntry { cycle, provenance });
    }

    /// The unique cataloged cycle containing `value`, if any.
    pub fn lookup(&self, value: &BigUint) -> Option<&CatalogEntry> {
        let key = self.lookup_key(value)?;
        self.entries.get(key)
    }

    fn lookup_key(&self, value: &BigUint) -> Option<&BigUint> {
        match value.to_u64() {
            Some(small) => self.small_index.get(&small),
            None => self.big_index.get(value),
        }
    }

    /// Fast path for scan loops: values already known to fit in u64.
    pub(crate) fn lookup_small(&self, value: u64) -> Option<&CatalogEntry> {
        let key = self.small_index.get(&value)?;
        self.entries.get(key)
    }

    pub(crate) fn has_big_elements(&self) -> bool {
        !self.big_index.is_empty()
    }

    /// Set union with another catalog for the same map. Commutative and
    /// associative up to provenance preference, which is itself a lattice
    /// (fixture over discovery, then smallest discovering seed).
    pub fn merge(&mut self, other: CycleCatalog) -> Result<()> {
        if other.map != self.map {
            return Err(Error::MapMismatch {
                expected: self.map.name().to_string(),
                found: other.map.name().to_string(),
            });
        }
        for (_, entry) in other.entries {
            self.register(entry.cycle, entry.provenance)?;
        }
        Ok(())
    }

    /// Deterministic JSON document: cycles sorted by minimum element,
    /// elements as decimal strings.
    pub fn to_json(&self) -> String {
        let file = CatalogFile::from_catalog(self);
        let mut out = serde_json::to_string_pretty(&file).expect("catalog serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("catalog JSON: {e}")))?;
        file.into_catalog()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MapFile {
    a: String,
    b: String,
    name: String,
}

impl MapFile {
    pub(crate) fn from_map(map: &MapSpec) -> Self {
        Self {
            a: map.a().to_string(),
            b: map.b().to_string(),
            name: map.name().to_string(),
        }
    }

    pub(crate) fn into_map(self) -> Result<MapSpec> {
        let a = parse_u64("map.a", &self.a)?;
        let b = parse_u64("map.b", &self.b)?;
        MapSpec::new(a, b, self.name)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub(crate) enum ProvenanceFile {
    Fixture,
    Discovered { seed: String },
}

impl ProvenanceFile {
    pub(crate) fn from_provenance(provenance: &Provenance) -> Self {
        match provenance {
            Provenance::Fixture => ProvenanceFile::Fixture,
            Provenance::Discovered { seed } => ProvenanceFile::Discovered {
                seed: seed.to_string(),
            },
        }
    }

    pub(crate) fn into_provenance(self) -> Result<Provenance> {
        Ok(match self {
            ProvenanceFile::Fixture => Provenance::Fixture,
            ProvenanceFile::Discovered { seed } => Provenance::Discovered {
                seed: parse_biguint("provenance seed", &seed)?,
            },
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    map: MapFile,
    cycles: Vec<Vec<String>>,
    provenance: Vec<ProvenanceFile>,
}

impl CatalogFile {
    fn from_catalog(catalog: &CycleCatalog) -> Self {
        let mut cycles = Vec::with_capacity(catalog.len());
        let mut provenance = Vec::with_capacity(catalog.len());
        for entry in catalog.entries() {
            cycles.push(entry.cycle.elements().iter().map(|v| v.to_string()).collect());
            provenance.push(ProvenanceFile::from_provenance(&entry.provenance));
        }
        Self {
            map: MapFile::from_map(catalog.map()),
            cycles,
            provenance,
        }
    }

    fn into_catalog(self) -> Result<CycleCatalog> {
        if self.cycles.len() != self.provenance.len() {
            return Err(Error::Format(format!(
                "catalog lists {} cycles but {} provenance entries",
                self.cycles.len(),
                self.provenance.len()
            )));
        }
        let map = self.map.into_map()?;
        let mut catalog = CycleCatalog::new(map);
        for (raw, prov) in self.cycles.into_iter().zip(self.provenance) {
            let elements = raw
                .iter()
                .map(|s| parse_biguint("cycle element", s))
                .collect::<Result<Vec<_>>>()?;
            let cycle = Cycle::canonicalize(catalog.map(), &elements).map_err(|e| {
                Error::CatalogCorruption(format!("cycle {raw:?} failed validation: {e}"))
            })?;
            if cycle.elements() != elements.as_slice() {
                return Err(Error::CatalogCorruption(format!(
                    "cycle {raw:?} is not in canonical rotation (must start at its minimum)"
                )));
            }
            let provenance = prov.into_provenance()?;
            catalog.register(cycle, provenance).map_err(|e| {
                Error::CatalogCorruption(format!("cycle {raw:?} rejected: {e}"))
            })?;
        }
        Ok(catalog)
    }
}

pub(crate) fn parse_u64(what: &str, s: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::Format(format!("{what}: expected an unsigned integer, got {s:?}")))
}

pub(crate) fn parse_biguint(what: &str, s: &str) -> Result<BigUint> {
    s.parse::<BigUint>()
        .map_err(|_| Error::Format(format!("{what}: expected a decimal integer, got {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bigs(ns: &[u64]) -> Vec<BigUint> {
        ns.iter().copied().map(BigUint::from).collect()
    }

    fn five_map() -> MapSpec {
        MapSpec::preset("5n+1").unwrap()
    }

    #[test]
    fn canonicalize_rotates_to_minimum() {
        let cycle = Cycle::canonicalize(
            &five_map(),
            &bigs(&[26, 13, 66, 33, 166, 83, 416, 208, 104, 52]),
        )
        .unwrap();
        assert_eq!(
            cycle.elements(),
            bigs(&[13, 66, 33, 166, 83, 416, 208, 104, 52, 26]).as_slice()
        );

        let map35 = MapSpec::preset("3n+5").unwrap();
        let cycle = Cycle::canonicalize(&map35, &bigs(&[8, 4, 2, 1])).unwrap();
        assert_eq!(cycle.elements(), bigs(&[1, 8, 4, 2]).as_slice());
        let cycle =
            Cycle::canonicalize(&map35, &bigs(&[37, 116, 58, 29, 92, 46, 23, 74])).unwrap();
        assert_eq!(
            cycle.elements(),
            bigs(&[23, 74, 37, 116, 58, 29, 92, 46]).as_slice()
        );
    }

    #[test]
    fn canonicalize_rejects_broken_lists() {
        let map = five_map();
        assert!(matches!(
            Cycle::canonicalize(&map, &bigs(&[13, 66, 34])),
            Err(Error::InvalidCycle(_))
        ));
        assert!(matches!(
            Cycle::canonicalize(&map, &bigs(&[13, 13])),
            Err(Error::InvalidCycle(_))
        ));
        assert!(matches!(
            Cycle::canonicalize(&map, &[]),
            Err(Error::InvalidCycle(_))
        ));
    }

    #[test]
    fn register_is_idempotent_and_counts_distinct_cycles() {
        let mut catalog = CycleCatalog::new(five_map());
        let thirteen = Cycle::canonicalize(
            catalog.map(),
            &bigs(&[13, 66, 33, 166, 83, 416, 208, 104, 52, 26]),
        )
        .unwrap();
        assert!(catalog.register(thirteen.clone(), Provenance::Fixture).unwrap());
        assert!(!catalog.register(thirteen, Provenance::Fixture).unwrap());
        assert_eq!(catalog.len(), 1);

        let seventeen = Cycle::canonicalize(
            catalog.map(),
            &bigs(&[17, 86, 43, 216, 108, 54, 27, 136, 68, 34]),
        )
        .unwrap();
        assert!(catalog.register(seventeen, Provenance::Fixture).unwrap());
        assert_eq!(catalog.len(), 2);
    }

    #[test]
    fn register_rejects_partial_overlap_as_corruption() {
        let mut catalog = CycleCatalog::fixtures("5n+1").unwrap();
        let fake = Cycle::from_raw_unchecked(bigs(&[13, 999]));
        assert!(matches!(
            catalog.register(fake, Provenance::Fixture),
            Err(Error::CatalogCorruption(_))
        ));
    }

    #[test]
    fn register_rejects_cycles_from_another_map() {
        let mut catalog = CycleCatalog::new(five_map());
        let map35 = MapSpec::preset("3n+5").unwrap();
        let foreign = Cycle::canonicalize(&map35, &bigs(&[5, 20, 10])).unwrap();
        assert!(matches!(
            catalog.register(foreign, Provenance::Fixture),
            Err(Error::InvalidCycle(_))
        ));
    }

    #[test]
    fn lookup_finds_the_owning_cycle() {
        let catalog = CycleCatalog::fixtures("5n+1").unwrap();
        let hit = catalog.lookup(&BigUint::from(416u64)).unwrap();
        assert_eq!(hit.cycle.min_element(), &BigUint::from(13u64));
        assert!(catalog.lookup(&BigUint::from(100u64)).is_none());
        let empty = CycleCatalog::new(five_map());
        assert!(empty.lookup(&BigUint::from(13u64)).is_none());
    }

    #[test]
    fn fixtures_match_known_shapes() {
        let c35 = CycleCatalog::fixtures("3n+5").unwrap();
        let lens: Vec<usize> = c35.entries().map(|e| e.cycle.len()).collect();
        assert_eq!(lens, vec![4, 3, 8, 8]); // keyed by min: 1, 5, 19, 23

        let c51 = CycleCatalog::fixtures("5n+1").unwrap();
        let lens: Vec<usize> = c51.entries().map(|e| e.cycle.len()).collect();
        assert_eq!(lens, vec![10, 10]);

        let c31 = CycleCatalog::fixtures("3n+1").unwrap();
        assert_eq!(c31.len(), 1);
        assert_eq!(
            c31.entries().next().unwrap().cycle.elements(),
            bigs(&[1, 4, 2]).as_slice()
        );

        assert!(CycleCatalog::fixtures("7n+1").is_err());
    }

    #[test]
    fn disjoint_union_of_catalog_cycles() {
        for name in ["3n+1", "5n+1", "3n+5"] {
            let catalog = CycleCatalog::fixtures(name).unwrap();
            let total: usize = catalog.entries().map(|e| e.cycle.len()).sum();
            let mut all: Vec<BigUint> = catalog
                .entries()
                .flat_map(|e| e.cycle.elements().to_vec())
                .collect();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), total, "{name}");
        }
    }

    #[test]
    fn merge_prefers_fixture_then_smallest_seed() {
        let map = five_map();
        let cycle = Cycle::canonicalize(
            &map,
            &bigs(&[13, 66, 33, 166, 83, 416, 208, 104, 52, 26]),
        )
        .unwrap();

        let mut a = CycleCatalog::new(map.clone());
        a.register(
            cycle.clone(),
            Provenance::Discovered {
                seed: BigUint::from(40u64),
            },
        )
        .unwrap();
        let mut b = CycleCatalog::new(map.clone());
        b.register(
            cycle.clone(),
            Provenance::Discovered {
                seed: BigUint::from(5u64),
            },
        )
        .unwrap();
        a.merge(b).unwrap();
        assert_eq!(
            a.get(cycle.min_element()).unwrap().provenance,
            Provenance::Discovered {
                seed: BigUint::from(5u64)
            }
        );

        let mismatched = CycleCatalog::new(MapSpec::preset("3n+5").unwrap());
        assert!(matches!(a.merge(mismatched), Err(Error::MapMismatch { .. })));
    }

    #[test]
    fn json_round_trip_is_identity_and_deterministic() {
        let catalog = CycleCatalog::fixtures("3n+5").unwrap();
        let text = catalog.to_json();
        assert_eq!(text, catalog.to_json());
        let back = CycleCatalog::from_json(&text).unwrap();
        assert_eq!(back, catalog);
    }

    #[test]
    fn load_rejects_non_canonical_or_unclosed_cycles() {
        let good = CycleCatalog::fixtures("3n+5").unwrap().to_json();
        let rotated = good.replace("\"5\",\n      \"20\",\n      \"10\"", "\"20\",\n      \"10\",\n      \"5\"");
        assert_ne!(good, rotated);
        assert!(matches!(
            CycleCatalog::from_json(&rotated),
            Err(Error::CatalogCorruption(_))
        ));

        let broken = good.replace("\"74\"", "\"75\"");
        assert_ne!(good, broken);
        match CycleCatalog::from_json(&broken) {
            Err(Error::CatalogCorruption(msg)) => {
                assert!(msg.contains("75"), "error should name the cycle: {msg}")
            }
            other => panic!("expected corruption error, got {other:?}"),
        }
    }

    proptest! {
        // Any rotation of a genuine cycle canonicalizes to the same thing.
        #[test]
        fn rotation_invariance(rot in 0usize..10) {
            let raw = [13u64, 66, 33, 166, 83, 416, 208, 104, 52, 26];
            let mut rotated = bigs(&raw);
            rotated.rotate_left(rot);
            let cycle = Cycle::canonicalize(&five_map(), &rotated).unwrap();
            let canonical = bigs(&[13, 66, 33, 166, 83, 416, 208, 104, 52, 26]);
            prop_assert_eq!(cycle.elements(), canonical.as_slice());
            // Idempotent.
            let again = Cycle::canonicalize(&five_map(), cycle.elements()).unwrap();
            prop_assert_eq!(again, cycle);
        }
    }
}
