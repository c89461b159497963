//! Map definitions and the single-step transition shared by every module.
//!
//! A map sends even `n` to `n/2` and odd `n` to `a*n + b`. Both `a` and `b`
//! are required to be odd, so the image of every odd value is even and each
//! odd step is followed by at least one halving.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Preset names accepted by [`MapSpec::preset`], in display order.
pub const PRESET_NAMES: [&str; 3] = ["3n+1", "5n+1", "3n+5"];

/// A "halve if even, `a*n + b` if odd" map.
///
/// Immutable and cheap to clone; safe to share across worker threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MapSpec {
    a: u64,
    b: u64,
    name: String,
}

impl MapSpec {
    /// Builds a validated map. `a` and `b` must both be positive and odd.
    pub fn new(a: u64, b: u64, name: impl Into<String>) -> Result<Self> {
        if a == 0 || a % 2 == 0 {
            return Err(Error::InvalidMapField { field: "a", value: a });
        }
        if b == 0 || b % 2 == 0 {
            return Err(Error::InvalidMapField { field: "b", value: b });
        }
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyMapName);
        }
        Ok(Self { a, b, name })
    }

    /// Returns one of the built-in maps: `"3n+1"`, `"5n+1"`, or `"3n+5"`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "3n+1" => Self::new(3, 1, "3n+1"),
            "5n+1" => Self::new(5, 1, "5n+1"),
            "3n+5" => Self::new(3, 5, "3n+5"),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// Odd-branch multiplier.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Odd-branch addend.
    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Applies one step: `n/2` if even, `a*n + b` if odd. Rejects `n = 0`.
    pub fn step(&self, n: &BigUint) -> Result<BigUint> {
        if n.is_zero() {
            return Err(Error::InvalidSeed);
        }
        let mut out = n.clone();
        self.step_in_place(&mut out);
        Ok(out)
    }

    /// In-place step for hot loops. Caller guarantees `n >= 1`.
    pub fn step_in_place(&self, n: &mut BigUint) {
        debug_assert!(!n.is_zero());
        if n.bit(0) {
            *n *= self.a;
            *n += self.b;
        } else {
            *n >>= 1u32;
        }
    }
}

impl std::fmt::Display for MapSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}
