//! Orbit iteration: walks a seed under a map until it reaches 1, provably
//! enters a cycle, or exhausts configurable bounds.
//!
//! Cycle detection is Brent's algorithm fused into the bounded walk, so a
//! trajectory is traversed once instead of being stored wholesale. The
//! classification contract matches a full-history iterator exactly: a seed
//! is `EntersCycle` precisely when a repeated value occurs within
//! `max_steps` steps and every value before the repetition fits in
//! `max_value_bits` bits. Brent's detection can lag behind the first actual
//! repetition, so after `max_steps` the walk keeps comparing (never
//! classifying) long enough to find any repetition that occurred within the
//! step budget, then rejects it if the repetition itself landed past the
//! budget.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::map::MapSpec;

/// Iteration limits for an orbit walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum number of map applications before giving up.
    pub max_steps: u64,
    /// Maximum bit length a visited value may have.
    pub max_value_bits: u64,
    /// Treat reaching 1 as terminal. With `false`, the walk runs through 1
    /// and reports the genuine cycle containing it.
    pub stop_at_one: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            max_steps: 100_000,
            max_value_bits: 4096,
            stop_at_one: true,
        }
    }
}

impl Bounds {
    /// Default caps with `stop_at_one` disabled, for exploring true cycles.
    pub fn exploratory() -> Self {
        Self {
            stop_at_one: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps < 1 {
            return Err(Error::InvalidBounds("max_steps must be >= 1".into()));
        }
        if self.max_value_bits < 8 {
            return Err(Error::InvalidBounds("max_value_bits must be >= 8".into()));
        }
        Ok(())
    }
}

/// What a bounded walk concluded about a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// The trajectory hit 1 (with `stop_at_one` enabled).
    ReachesOne,
    /// A repeated value was proven within bounds.
    EntersCycle,
    /// A bound was exhausted first; nothing is claimed about the tail.
    Undetermined,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ReachesOne => "reaches_one",
            Classification::EntersCycle => "enters_cycle",
            Classification::Undetermined => "undetermined",
        }
    }
}

impl std::str::FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reaches_one" => Ok(Classification::ReachesOne),
            "enters_cycle" => Ok(Classification::EntersCycle),
            "undetermined" => Ok(Classification::Undetermined),
            other => Err(Error::Format(format!("unknown classification {other:?}"))),
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which bound ended an undetermined walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundHit {
    StepLimit,
    ValueBits,
}

impl BoundHit {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundHit::StepLimit => "step_limit",
            BoundHit::ValueBits => "value_bits",
        }
    }
}

/// How much of the visited trajectory to keep on the [`Orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixRetention {
    None,
    FirstK(usize),
    Full,
}

/// Identifier of a canonical cycle: its minimum element plus length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRef {
    pub min_element: BigUint,
    pub len: u64,
}

/// The record produced by classifying one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub seed: BigUint,
    pub classification: Classification,
    /// Steps to reach 1, to reach the first repeated value, or to hit a
    /// bound.
    pub steps_to_termination: u64,
    /// Steps from the seed to the first value belonging to the cycle; the
    /// seed itself counts as step 0. Present iff `EntersCycle`.
    pub entry_steps: Option<u64>,
    /// Present iff `EntersCycle`.
    pub cycle_ref: Option<CycleRef>,
    /// Present iff `Undetermined`: the bound that ended the walk.
    pub trigger: Option<BoundHit>,
    /// Maximum value visited up to termination.
    pub peak: BigUint,
    /// Visited values `seed, f(seed), ...` up to termination, as retained.
    pub prefix: Vec<BigUint>,
}

/// A short-circuit answer supplied by a per-step hook (catalog or memo
/// lookups during scans). Values are absolute for the probed seed; the
/// probe merges `tail_peak` with the peak of the walked prefix.
pub(crate) struct ShortCircuit {
    pub classification: Classification,
    pub cycle_min: Option<BigUint>,
    pub cycle_len: Option<u64>,
    pub entry_steps: Option<u64>,
    pub steps: u64,
    pub tail_peak: BigUint,
    pub steps_exact: bool,
}

pub(crate) struct ProbeOutcome {
    pub classification: Classification,
    pub steps: u64,
    pub entry_steps: Option<u64>,
    pub cycle_min: Option<BigUint>,
    pub cycle_len: Option<u64>,
    /// Cycle elements in trajectory order from the first in-cycle value.
    /// Populated only when this walk proved the cycle itself.
    pub cycle_elements: Option<Vec<BigUint>>,
    pub trigger: Option<BoundHit>,
    pub peak: BigUint,
    pub prefix: Vec<BigUint>,
    pub steps_exact: bool,
}

impl ProbeOutcome {
    pub fn into_orbit(mut self, seed: BigUint) -> Orbit {
        let cycle_ref = match self.classification {
            Classification::EntersCycle => Some(CycleRef {
                min_element: self.cycle_min.take().expect("cycle id on EntersCycle"),
                len: self.cycle_len.expect("cycle length on EntersCycle"),
            }),
            _ => None,
        };
        Orbit {
            seed,
            classification: self.classification,
            steps_to_termination: self.steps,
            entry_steps: self.entry_steps,
            cycle_ref,
            trigger: self.trigger,
            peak: self.peak,
            prefix: self.prefix,
        }
    }
}

/// Classifies `seed` under `map` within `bounds`, retaining the full
/// trajectory prefix.
pub fn classify_orbit(map: &MapSpec, seed: &BigUint, bounds: &Bounds) -> Result<Orbit> {
    classify_orbit_with(map, seed, bounds, PrefixRetention::Full)
}

/// [`classify_orbit`] with explicit prefix retention.
pub fn classify_orbit_with(
    map: &MapSpec,
    seed: &BigUint,
    bounds: &Bounds,
    retention: PrefixRetention,
) -> Result<Orbit> {
    check_walk_inputs(seed, bounds)?;
    let outcome = probe(map, seed, bounds, retention, |_, _| None);
    Ok(outcome.into_orbit(seed.clone()))
}

/// If the trajectory from `start` provably loops within bounds, returns the
/// loop's elements in trajectory order (beginning at the first in-cycle
/// value) plus the number of steps from `start` to that value.
///
/// Agrees exactly with a stored-history detector on every input where both
/// find the loop.
pub fn detect_cycle(
    map: &MapSpec,
    start: &BigUint,
    bounds: &Bounds,
) -> Result<Option<(Vec<BigUint>, u64)>> {
    check_walk_inputs(start, bounds)?;
    let outcome = probe(map, start, bounds, PrefixRetention::None, |_, _| None);
    match outcome.classification {
        Classification::EntersCycle => {
            let elements = outcome.cycle_elements.expect("own detection yields elements");
            let entry = outcome.entry_steps.expect("entry steps on EntersCycle");
            Ok(Some((elements, entry)))
        }
        _ => Ok(None),
    }
}

fn check_walk_inputs(seed: &BigUint, bounds: &Bounds) -> Result<()> {
    if seed.is_zero() {
        return Err(Error::InvalidSeed);
    }
    bounds.validate()
}

/// Bounded walk with fused Brent cycle detection and an optional per-step
/// short-circuit hook.
///
/// The hook sees every visited value (the seed included, at step 0) while
/// the step budget lasts, and may resolve the walk early. Hook answers must
/// equal what the plain walk would conclude; scan determinism across worker
/// counts relies on that.
pub(crate) fn probe<F>(
    map: &MapSpec,
    seed: &BigUint,
    bounds: &Bounds,
    retention: PrefixRetention,
    mut hook: F,
) -> ProbeOutcome
where
    F: FnMut(&BigUint, u64) -> Option<ShortCircuit>,
{
    let max_steps = bounds.max_steps;
    // Brent needs headroom past max_steps to notice a repetition whose
    // second visit falls late; 3*S + 8 covers the worst tortoise schedule
    // for any mu + lambda <= S.
    let overtime_budget = max_steps.saturating_mul(3).saturating_add(8);

    let one = BigUint::one();
    let mut current = seed.clone();
    let mut steps: u64 = 0;
    let mut peak = seed.clone();
    let mut prefix: Vec<BigUint> = Vec::new();
    retain(&mut prefix, &current, retention);

    // Brent state: tortoise pinned at a power-of-two step index.
    let mut tortoise = seed.clone();
    let mut power: u64 = 1;
    let mut lam: u64 = 0;

    loop {
        let within_budget = steps <= max_steps;

        if within_budget {
            if bounds.stop_at_one && current == one {
                return finish_walk(
                    Classification::ReachesOne,
                    steps,
                    None,
                    None,
                    peak,
                    prefix,
                );
            }
            if let Some(sc) = hook(&current, steps) {
                let mut peak = peak;
                if sc.tail_peak > peak {
                    peak = sc.tail_peak;
                }
                return ProbeOutcome {
                    classification: sc.classification,
                    steps: sc.steps,
                    entry_steps: sc.entry_steps,
                    cycle_min: sc.cycle_min,
                    cycle_len: sc.cycle_len,
                    cycle_elements: None,
                    trigger: None,
                    peak,
                    prefix,
                    steps_exact: sc.steps_exact,
                };
            }
            if current.bits() > bounds.max_value_bits {
                return finish_walk(
                    Classification::Undetermined,
                    steps,
                    Some(BoundHit::ValueBits),
                    None,
                    peak,
                    prefix,
                );
            }
        } else {
            // Overtime: the classification is already either EntersCycle
            // (repetition within max_steps, detection pending) or
            // Undetermined(StepLimit). Reaching 1 or blowing the value cap
            // out here rules out any pending repetition.
            if (bounds.stop_at_one && current == one)
                || current.bits() > bounds.max_value_bits
                || steps >= overtime_budget
            {
                return finish_walk(
                    Classification::Undetermined,
                    max_steps,
                    Some(BoundHit::StepLimit),
                    None,
                    peak,
                    prefix,
                );
            }
        }

        if steps > 0 && current == tortoise {
            // Repetition proven with cycle length `lam`; locate the entry.
            return resolve_cycle(map, seed, bounds, lam, peak, prefix);
        }
        if lam == power {
            tortoise.clone_from(&current);
            power = power.saturating_mul(2);
            lam = 0;
        }

        map.step_in_place(&mut current);
        steps += 1;
        lam += 1;
        if steps <= max_steps {
            if current > peak {
                peak.clone_from(&current);
            }
            retain(&mut prefix, &current, retention);
        }
    }
}

fn retain(prefix: &mut Vec<BigUint>, value: &BigUint, retention: PrefixRetention) {
    match retention {
        PrefixRetention::None => {}
        PrefixRetention::FirstK(k) => {
            if prefix.len() < k {
                prefix.push(value.clone());
            }
        }
        PrefixRetention::Full => prefix.push(value.clone()),
    }
}

fn finish_walk(
    classification: Classification,
    steps: u64,
    trigger: Option<BoundHit>,
    cycle: Option<(Vec<BigUint>, u64)>,
    peak: BigUint,
    mut prefix: Vec<BigUint>,
) -> ProbeOutcome {
    prefix.truncate(steps as usize + 1);
    let (cycle_elements, entry_steps) = match cycle {
        Some((elements, entry)) => (Some(elements), Some(entry)),
        None => (None, None),
    };
    let (cycle_min, cycle_len) = match &cycle_elements {
        Some(elements) => (
            Some(elements.iter().min().expect("nonempty cycle").clone()),
            Some(elements.len() as u64),
        ),
        None => (None, None),
    };
    ProbeOutcome {
        classification,
        steps,
        entry_steps,
        cycle_min,
        cycle_len,
        cycle_elements,
        trigger,
        peak,
        prefix,
        steps_exact: true,
    }
}

/// Knowing the cycle length, re-walk to find the entry point and collect the
/// cycle, then accept only if the first repetition fell within the step cap.
fn resolve_cycle(
    map: &MapSpec,
    seed: &BigUint,
    bounds: &Bounds,
    lam: u64,
    peak: BigUint,
    prefix: Vec<BigUint>,
) -> ProbeOutcome {
    let mut ahead = seed.clone();
    for _ in 0..lam {
        map.step_in_place(&mut ahead);
    }
    let mut behind = seed.clone();
    let mut entry: u64 = 0;
    while behind != ahead {
        map.step_in_place(&mut behind);
        map.step_in_place(&mut ahead);
        entry += 1;
    }
    let steps = entry + lam;
    if steps > bounds.max_steps {
        // The repetition itself lies past the step budget: the bounded walk
        // may not claim it.
        return finish_walk(
            Classification::Undetermined,
            bounds.max_steps,
            Some(BoundHit::StepLimit),
            None,
            peak,
            prefix,
        );
    }
    let mut elements = Vec::with_capacity(lam as usize);
    let mut v = behind;
    for _ in 0..lam {
        elements.push(v.clone());
        map.step_in_place(&mut v);
    }
    finish_walk(
        Classification::EntersCycle,
        steps,
        None,
        Some((elements, entry)),
        peak,
        prefix,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn bigs(ns: &[u64]) -> Vec<BigUint> {
        ns.iter().copied().map(BigUint::from).collect()
    }

    #[test]
    fn collatz_seed_7_reaches_one_in_16_steps() {
        let map = MapSpec::preset("3n+1").unwrap();
        let orbit = classify_orbit(&map, &big(7), &Bounds::default()).unwrap();
        assert_eq!(orbit.classification, Classification::ReachesOne);
        assert_eq!(orbit.steps_to_termination, 16);
        assert_eq!(orbit.peak, big(52));
        assert_eq!(
            orbit.prefix,
            bigs(&[7, 22, 11, 34, 17, 52, 26, 13, 40, 20, 10, 5, 16, 8, 4, 2, 1])
        );
        assert!(orbit.entry_steps.is_none());
        assert!(orbit.cycle_ref.is_none());
        assert!(orbit.trigger.is_none());
    }

    #[test]
    fn seed_one_terminates_immediately() {
        let map = MapSpec::preset("3n+1").unwrap();
        let orbit = classify_orbit(&map, &big(1), &Bounds::default()).unwrap();
        assert_eq!(orbit.classification, Classification::ReachesOne);
        assert_eq!(orbit.steps_to_termination, 0);
        assert_eq!(orbit.prefix, bigs(&[1]));
    }

    #[test]
    fn five_map_seed_5_enters_the_13_cycle() {
        let map = MapSpec::preset("5n+1").unwrap();
        let orbit = classify_orbit(&map, &big(5), &Bounds::default()).unwrap();
        assert_eq!(orbit.classification, Classification::EntersCycle);
        assert_eq!(orbit.entry_steps, Some(1));
        let cycle = orbit.cycle_ref.unwrap();
        assert_eq!(cycle.min_element, big(13));
        assert_eq!(cycle.len, 10);
        assert_eq!(orbit.steps_to_termination, 11);
        assert_eq!(orbit.peak, big(416));
    }

    #[test]
    fn three_n_five_seed_23_is_in_its_own_cycle() {
        let map = MapSpec::preset("3n+5").unwrap();
        let orbit = classify_orbit(&map, &big(23), &Bounds::default()).unwrap();
        assert_eq!(orbit.classification, Classification::EntersCycle);
        assert_eq!(orbit.entry_steps, Some(0));
        let cycle = orbit.cycle_ref.unwrap();
        assert_eq!(cycle.min_element, big(23));
        assert_eq!(cycle.len, 8);
    }

    #[test]
    fn detect_cycle_reports_trajectory_order_from_first_in_cycle_value() {
        let map = MapSpec::preset("5n+1").unwrap();
        let (elements, entry) = detect_cycle(&map, &big(17), &Bounds::default())
            .unwrap()
            .unwrap();
        assert_eq!(entry, 0);
        assert_eq!(
            elements,
            bigs(&[17, 86, 43, 216, 108, 54, 27, 136, 68, 34])
        );
    }

    #[test]
    fn detect_cycle_through_one_needs_stop_at_one_off() {
        let map = MapSpec::preset("3n+5").unwrap();
        assert_eq!(detect_cycle(&map, &big(1), &Bounds::default()).unwrap(), None);
        let (elements, entry) = detect_cycle(&map, &big(1), &Bounds::exploratory())
            .unwrap()
            .unwrap();
        assert_eq!(entry, 0);
        assert_eq!(elements, bigs(&[1, 8, 4, 2]));
    }

    // Stored-history detector on 3 under 3n+1 (stop_at_one off) sees
    // 3,10,5,16,8,4,2,1 and then 4 again: loop [4,2,1] entered at step 5.
    #[test]
    fn detect_cycle_matches_history_semantics_for_collatz_tail() {
        let map = MapSpec::preset("3n+1").unwrap();
        let (elements, entry) = detect_cycle(&map, &big(3), &Bounds::exploratory())
            .unwrap()
            .unwrap();
        assert_eq!(entry, 5);
        assert_eq!(elements, bigs(&[4, 2, 1]));
    }

    #[test]
    fn five_map_trivial_cycle_through_one() {
        let map = MapSpec::preset("5n+1").unwrap();
        let (elements, entry) = detect_cycle(&map, &big(1), &Bounds::exploratory())
            .unwrap()
            .unwrap();
        assert_eq!(entry, 0);
        assert_eq!(elements, bigs(&[1, 6, 3, 16, 8, 4, 2]));
    }

    #[test]
    fn undetermined_records_the_triggering_bound() {
        let map = MapSpec::preset("5n+1").unwrap();
        let bounds = Bounds {
            max_steps: 50,
            max_value_bits: 4096,
            stop_at_one: true,
        };
        let orbit = classify_orbit(&map, &big(7), &bounds).unwrap();
        assert_eq!(orbit.classification, Classification::Undetermined);
        assert_eq!(orbit.trigger, Some(BoundHit::StepLimit));
        assert_eq!(orbit.steps_to_termination, 50);

        let bounds = Bounds {
            max_steps: 100_000,
            max_value_bits: 8,
            stop_at_one: true,
        };
        let orbit = classify_orbit(&map, &big(7), &bounds).unwrap();
        assert_eq!(orbit.classification, Classification::Undetermined);
        assert_eq!(orbit.trigger, Some(BoundHit::ValueBits));
        // 7 -> 36 -> ... -> 73 -> 366, the first value over 8 bits.
        assert_eq!(orbit.peak, big(366));
        assert_eq!(orbit.steps_to_termination, 11);
    }

    #[test]
    fn rejects_zero_seed_and_bad_bounds() {
        let map = MapSpec::preset("3n+1").unwrap();
        assert!(matches!(
            classify_orbit(&map, &BigUint::zero(), &Bounds::default()),
            Err(Error::InvalidSeed)
        ));
        let bad = Bounds {
            max_steps: 0,
            ..Bounds::default()
        };
        assert!(matches!(
            classify_orbit(&map, &big(1), &bad),
            Err(Error::InvalidBounds(_))
        ));
        let bad = Bounds {
            max_value_bits: 4,
            ..Bounds::default()
        };
        assert!(matches!(
            classify_orbit(&map, &big(1), &bad),
            Err(Error::InvalidBounds(_))
        ));
    }

    #[test]
    fn prefix_retention_modes() {
        let map = MapSpec::preset("3n+1").unwrap();
        let bounds = Bounds::default();
        let full = classify_orbit_with(&map, &big(7), &bounds, PrefixRetention::Full).unwrap();
        assert_eq!(full.prefix.len(), 17);
        let first3 =
            classify_orbit_with(&map, &big(7), &bounds, PrefixRetention::FirstK(3)).unwrap();
        assert_eq!(first3.prefix, bigs(&[7, 22, 11]));
        let none = classify_orbit_with(&map, &big(7), &bounds, PrefixRetention::None).unwrap();
        assert!(none.prefix.is_empty());
    }

    #[test]
    fn prefix_recomputes_under_step() {
        let map = MapSpec::preset("3n+5").unwrap();
        let orbit = classify_orbit(&map, &big(45), &Bounds::exploratory()).unwrap();
        assert_eq!(orbit.prefix[0], big(45));
        for pair in orbit.prefix.windows(2) {
            assert_eq!(map.step(&pair[0]).unwrap(), pair[1]);
        }
        assert!(orbit.prefix.iter().all(|v| *v <= orbit.peak));
    }

    // Enlarging bounds may resolve Undetermined but never flips a resolved
    // classification.
    #[test]
    fn bound_monotonicity_spot_checks() {
        let map = MapSpec::preset("5n+1").unwrap();
        let small = Bounds {
            max_steps: 30,
            max_value_bits: 64,
            stop_at_one: true,
        };
        let large = Bounds::default();
        for seed in 1u64..=400 {
            let a = classify_orbit_with(&map, &big(seed), &small, PrefixRetention::None).unwrap();
            let b = classify_orbit_with(&map, &big(seed), &large, PrefixRetention::None).unwrap();
            if a.classification != Classification::Undetermined {
                assert_eq!(a.classification, b.classification, "seed {seed}");
                assert_eq!(a.entry_steps, b.entry_steps, "seed {seed}");
                assert_eq!(a.cycle_ref, b.cycle_ref, "seed {seed}");
            }
        }
    }

    // With stop_at_one off, previously ReachesOne seeds land in the map's
    // trivial cycle through 1.
    #[test]
    fn stop_at_one_consistency() {
        let cases = [
            ("3n+1", vec![1u64, 4, 2]),
            ("3n+5", vec![1, 8, 4, 2]),
            ("5n+1", vec![1, 6, 3, 16, 8, 4, 2]),
        ];
        for (name, trivial) in cases {
            let map = MapSpec::preset(name).unwrap();
            let trivial_min = big(*trivial.iter().min().unwrap());
            let trivial_len = trivial.len() as u64;
            for seed in 1u64..=200 {
                let stopping =
                    classify_orbit_with(&map, &big(seed), &Bounds::default(), PrefixRetention::None)
                        .unwrap();
                if stopping.classification != Classification::ReachesOne {
                    continue;
                }
                let through = classify_orbit_with(
                    &map,
                    &big(seed),
                    &Bounds::exploratory(),
                    PrefixRetention::None,
                )
                .unwrap();
                assert_eq!(
                    through.classification,
                    Classification::EntersCycle,
                    "{name} seed {seed}"
                );
                let cycle = through.cycle_ref.unwrap();
                assert_eq!(cycle.min_element, trivial_min, "{name} seed {seed}");
                assert_eq!(cycle.len, trivial_len, "{name} seed {seed}");
            }
        }
    }
}
