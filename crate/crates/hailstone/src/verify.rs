//! Executable checkers for the structural facts the preset maps exhibit.
//!
//! Each checker runs a bounded search for counterexamples and reports what
//! it saw; an empty failure list is evidence, not proof. Failures carry the
//! offending input with expected versus observed values.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::catalog::CycleCatalog;
use crate::error::{Error, Result};
use crate::map::MapSpec;
use crate::orbit::{classify_orbit_with, Bounds, Classification, PrefixRetention};

/// One counterexample: what was fed in, what the claim predicts, what
/// actually happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub observed: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "input={} expected={} observed={}",
            self.input, self.expected, self.observed
        )
    }
}

/// Outcome of running one claim checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimResult {
    pub claim_id: String,
    pub tested_instances: u64,
    pub failures: Vec<Failure>,
    /// Constants the checker measured rather than assumed, like the
    /// entry-step offset of the doubled-seed family.
    pub measured_constants: BTreeMap<String, i64>,
}

impl ClaimResult {
    fn new(claim_id: &str) -> Self {
        Self {
            claim_id: claim_id.to_string(),
            tested_instances: 0,
            failures: Vec::new(),
            measured_constants: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One machine-parseable line per failure, prefixed with the claim id.
    pub fn failure_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.failures
            .iter()
            .map(|f| format!("claim={} {}", self.claim_id, f))
    }

    fn fail(&mut self, input: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>) {
        self.failures.push(Failure {
            input: input.into(),
            expected: expected.into(),
            observed: observed.into(),
        });
    }
}

impl std::fmt::Display for ClaimResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "claim={} status={} tested={} failures={}",
            self.claim_id,
            if self.passed() { "pass" } else { "fail" },
            self.tested_instances,
            self.failures.len()
        )?;
        for (name, value) in &self.measured_constants {
            write!(f, " {name}={value}")?;
        }
        Ok(())
    }
}

/// Doubling invariance: for a cataloged cycle member `m`, every `m * 2^r`
/// falls into the same cycle, and its trajectory begins with exactly `r`
/// halvings back down to `m`.
pub fn verify_pow2_same_cycle(
    catalog: &CycleCatalog,
    m: &BigUint,
    r_max: u32,
) -> Result<ClaimResult> {
    let home = catalog.lookup(m).ok_or_else(|| {
        Error::ClaimPrecondition(format!(
            "{m} does not belong to any cataloged cycle of {}",
            catalog.map()
        ))
    })?;
    let home_min = home.cycle.min_element().clone();
    let home_len = home.cycle.len() as u64;
    let map = catalog.map();
    // The claim is about cycle structure, so run the honest dynamics even
    // for cycles passing through 1.
    let bounds = Bounds::exploratory();

    let mut result = ClaimResult::new("pow2_same_cycle");
    for r in 0..=r_max {
        result.tested_instances += 1;
        let n = m << r;
        let input = format!("m={m} r={r} n={n}");

        let mut v = n.clone();
        let mut halvings_ok = true;
        for _ in 0..r {
            if v.bit(0) {
                halvings_ok = false;
                break;
            }
            v >>= 1u32;
        }
        if !halvings_ok || v != *m {
            result.fail(
                input.clone(),
                format!("{r} halvings reaching {m}"),
                format!("prefix does not halve down to {m}"),
            );
            continue;
        }

        let orbit = classify_orbit_with(map, &n, &bounds, PrefixRetention::None)?;
        match (&orbit.classification, &orbit.cycle_ref) {
            (Classification::EntersCycle, Some(cycle))
                if cycle.min_element == home_min && cycle.len == home_len => {}
            (Classification::EntersCycle, Some(cycle)) => {
                result.fail(
                    input,
                    format!("cycle min={home_min} len={home_len}"),
                    format!("cycle min={} len={}", cycle.min_element, cycle.len),
                );
            }
            (other, _) => {
                result.fail(
                    input,
                    format!("cycle min={home_min} len={home_len}"),
                    format!("classification {other:?}"),
                );
            }
        }
    }
    Ok(result)
}

/// [`verify_pow2_same_cycle`] across every member of every cataloged cycle,
/// folded into one result.
pub fn verify_pow2_all_members(catalog: &CycleCatalog, r_max: u32) -> Result<ClaimResult> {
    let mut result = ClaimResult::new("pow2_same_cycle");
    let members: Vec<BigUint> = catalog
        .entries()
        .flat_map(|entry| entry.cycle.elements().to_vec())
        .collect();
    for m in members {
        let sub = verify_pow2_same_cycle(catalog, &m, r_max)?;
        result.tested_instances += sub.tested_instances;
        result.failures.extend(sub.failures);
    }
    Ok(result)
}

/// Entry offset of the `10 * 2^r` family under `5n+1`: each seed lands in
/// the cycle with minimum 13, and `entry_steps - r` is one constant, which
/// is measured and reported rather than assumed.
pub fn verify_10_pow2_entry(r_max: u32) -> Result<ClaimResult> {
    let map = MapSpec::preset("5n+1")?;
    let bounds = Bounds::default();
    let thirteen = BigUint::from(13u64);

    let mut result = ClaimResult::new("pow2_entry_offset");
    let mut offsets: Vec<(u32, i64)> = Vec::new();
    for r in 0..=r_max {
        result.tested_instances += 1;
        let n = BigUint::from(10u64) << r;
        let input = format!("r={r} n={n}");
        let orbit = classify_orbit_with(&map, &n, &bounds, PrefixRetention::None)?;
        match (&orbit.classification, &orbit.cycle_ref) {
            (Classification::EntersCycle, Some(cycle))
                if cycle.min_element == thirteen && cycle.len == 10 =>
            {
                let entry = orbit.entry_steps.expect("entry steps on EntersCycle") as i64;
                offsets.push((r, entry - i64::from(r)));
            }
            (other, cycle) => {
                result.fail(
                    input,
                    "cycle min=13 len=10".to_string(),
                    format!("classification {other:?} cycle {cycle:?}"),
                );
            }
        }
    }
    if let Some(&(_, first)) = offsets.first() {
        result
            .measured_constants
            .insert("entry_step_offset".to_string(), first);
        for &(r, offset) in &offsets[1..] {
            if offset != first {
                result.fail(
                    format!("r={r}"),
                    format!("entry_steps - r = {first} (constant)"),
                    format!("entry_steps - r = {offset}"),
                );
            }
        }
    }
    Ok(result)
}

/// Every odd member of every cataloged `5n+1` cycle ends in 3 or 7.
pub fn verify_odd_digit_pattern(catalog: &CycleCatalog) -> Result<ClaimResult> {
    if (catalog.map().a(), catalog.map().b()) != (5, 1) {
        return Err(Error::ClaimPrecondition(format!(
            "odd-digit pattern is a 5n+1 claim; catalog is for {}",
            catalog.map()
        )));
    }
    let mut result = ClaimResult::new("odd_digit_pattern");
    let ten = BigUint::from(10u64);
    for entry in catalog.entries() {
        for element in entry.cycle.elements() {
            if !element.bit(0) {
                continue;
            }
            result.tested_instances += 1;
            let digit = (element % &ten).to_u64().expect("residue fits");
            if digit != 3 && digit != 7 {
                result.fail(
                    format!("cycle_min={} element={element}", entry.cycle.min_element()),
                    "terminal digit 3 or 7".to_string(),
                    format!("terminal digit {digit}"),
                );
            }
        }
    }
    Ok(result)
}

/// Multiples of 5 under `3n+5` all fall into the cycle `[5, 20, 10]`:
/// checked for every multiple up to `limit` plus each extra seed.
pub fn verify_multiples_of_5(limit: u64, extras: &[BigUint]) -> Result<ClaimResult> {
    if limit < 5 {
        return Err(Error::ClaimPrecondition("limit must be >= 5".into()));
    }
    let map = MapSpec::preset("3n+5")?;
    let bounds = Bounds::default();
    let five = BigUint::from(5u64);

    let mut result = ClaimResult::new("multiples_of_five");
    let seeds = (5..=limit)
        .step_by(5)
        .map(BigUint::from)
        .chain(extras.iter().cloned());
    for seed in seeds {
        result.tested_instances += 1;
        let orbit = classify_orbit_with(&map, &seed, &bounds, PrefixRetention::None)?;
        match (&orbit.classification, &orbit.cycle_ref) {
            (Classification::EntersCycle, Some(cycle))
                if cycle.min_element == five && cycle.len == 3 => {}
            (other, cycle) => {
                result.fail(
                    format!("seed={seed}"),
                    "cycle min=5 len=3".to_string(),
                    format!("classification {other:?} cycle {cycle:?}"),
                );
            }
        }
    }
    Ok(result)
}

/// Five-fold correspondence: the `3n+5` trajectory of `5k` equals five times
/// the `3n+1` trajectory of `k`, pointwise, for `steps` steps per seed.
/// Exact integer equality; runs with stop-at-one off so trajectories are
/// total.
pub fn verify_correspondence(k_max: u64, steps: u64) -> Result<ClaimResult> {
    if k_max < 1 || steps < 1 {
        return Err(Error::ClaimPrecondition(
            "k_max and steps must be >= 1".into(),
        ));
    }
    let collatz = MapSpec::preset("3n+1")?;
    let shifted = MapSpec::preset("3n+5")?;

    let mut result = ClaimResult::new("times_five_correspondence");
    let mut scaled = BigUint::default();
    for k in 1..=k_max {
        result.tested_instances += 1;
        let mut x = BigUint::from(k);
        let mut y = BigUint::from(5 * k);
        for i in 0..=steps {
            scaled.clone_from(&x);
            scaled *= 5u32;
            if scaled != y {
                result.fail(
                    format!("k={k} i={i}"),
                    format!("{scaled}"),
                    format!("{y}"),
                );
                break;
            }
            if i < steps {
                collatz.step_in_place(&mut x);
                shifted.step_in_place(&mut y);
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Cycle, Provenance};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn pow2_same_cycle_passes_for_both_known_cycles() {
        let catalog = CycleCatalog::fixtures("5n+1").unwrap();
        for m in [13u64, 17] {
            let result = verify_pow2_same_cycle(&catalog, &big(m), 10).unwrap();
            assert!(result.passed(), "m={m}: {:?}", result.failures);
            assert_eq!(result.tested_instances, 11);
        }
    }

    #[test]
    fn pow2_same_cycle_requires_cataloged_member() {
        let catalog = CycleCatalog::fixtures("5n+1").unwrap();
        assert!(matches!(
            verify_pow2_same_cycle(&catalog, &big(100), 5),
            Err(Error::ClaimPrecondition(_))
        ));
    }

    #[test]
    fn entry_offset_is_measured_as_two() {
        let result = verify_10_pow2_entry(6).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        assert_eq!(result.tested_instances, 7);
        assert_eq!(result.measured_constants.get("entry_step_offset"), Some(&2));
    }

    #[test]
    fn odd_digit_pattern_holds_on_fixtures() {
        let catalog = CycleCatalog::fixtures("5n+1").unwrap();
        let result = verify_odd_digit_pattern(&catalog).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        // Odd members: 13, 33, 83 and 17, 43, 27.
        assert_eq!(result.tested_instances, 6);
    }

    #[test]
    fn odd_digit_pattern_flags_planted_counterexample() {
        let mut catalog = CycleCatalog::fixtures("5n+1").unwrap();
        // No valid 5n+1 cycle contains 15, so plant a doctored one past
        // validation.
        let fake = Cycle::from_raw_unchecked(vec![big(15), big(76)]);
        catalog.register_unchecked(fake, Provenance::Fixture);
        let result = verify_odd_digit_pattern(&catalog).unwrap();
        assert!(!result.passed());
        assert!(result.failures[0].input.contains("15"));
    }

    #[test]
    fn odd_digit_pattern_rejects_wrong_map() {
        let catalog = CycleCatalog::fixtures("3n+5").unwrap();
        assert!(matches!(
            verify_odd_digit_pattern(&catalog),
            Err(Error::ClaimPrecondition(_))
        ));
    }

    #[test]
    fn multiples_of_five_small_sweep() {
        let extras = [big(225), big(17585), big(3_698_450)];
        let result = verify_multiples_of_5(100, &extras).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        assert_eq!(result.tested_instances, 20 + 3);
    }

    #[test]
    fn multiples_of_five_flags_non_multiples() {
        let result = verify_multiples_of_5(5, &[big(7)]).unwrap();
        assert!(!result.passed());
        assert_eq!(result.failures.len(), 1);
        assert!(result.failures[0].input.contains("seed=7"));
    }

    #[test]
    fn correspondence_spot_checks() {
        let result = verify_correspondence(100, 50).unwrap();
        assert!(result.passed(), "{:?}", result.failures);
        assert_eq!(result.tested_instances, 100);
    }

    #[test]
    fn correspondence_first_steps_for_small_k() {
        // k=7: 3n+1 walks 7, 22, 11, 34, 17; 3n+5 from 35 walks the same
        // values scaled by five.
        let collatz = MapSpec::preset("3n+1").unwrap();
        let shifted = MapSpec::preset("3n+5").unwrap();
        let mut x = big(7);
        let mut y = big(35);
        let expected_x = [22u64, 11, 34, 17];
        let expected_y = [110u64, 55, 170, 85];
        for i in 0..4 {
            collatz.step_in_place(&mut x);
            shifted.step_in_place(&mut y);
            assert_eq!(x, big(expected_x[i]));
            assert_eq!(y, big(expected_y[i]));
        }
    }

    #[test]
    fn claim_rendering_is_line_oriented() {
        let result = verify_multiples_of_5(5, &[big(7)]).unwrap();
        let line = result.to_string();
        assert!(line.contains("claim=multiples_of_five"));
        assert!(line.contains("status=fail"));
        let failures: Vec<String> = result.failure_lines().collect();
        assert_eq!(failures.len(), 1);
        assert!(failures[0].starts_with("claim=multiples_of_five input=seed=7"));
    }
}
