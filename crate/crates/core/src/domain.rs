//! Variable domains and events (subsets of a domain).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported domain cardinality; events are 64-bit masks.
pub const MAX_STATES: usize = 64;

/// A named variable together with its ordered, distinct state labels.
///
/// State `i` of the domain is `states()[i]`; that index is what every
/// distribution, event and table uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDomain {
    name: String,
    states: Vec<String>,
}

impl StateDomain {
    pub fn new<N, I, S>(name: N, states: I) -> Result<Self>
    where
        N: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(Error::InvalidDomain(format!("variable {name} has no states")));
        }
        if states.len() > MAX_STATES {
            return Err(Error::InvalidDomain(format!(
                "variable {name} has {} states, at most {MAX_STATES} are supported",
                states.len()
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidDomain(format!(
                    "variable {name} repeats state label {s:?}"
                )));
            }
        }
        Ok(Self { name, states })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.states[index]
    }

    /// The event containing every state.
    pub fn full_event(&self) -> Event {
        Event::full(self.cardinality())
    }
}

/// A subset of a domain's states, stored as a bitset over state indices.
///
/// Two events compare equal only if they belong to domains of the same
/// cardinality and have the same members. Ordering is by mask, which gives
/// a canonical order for focal sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    mask: u64,
    cardinality: u8,
}

fn full_mask(cardinality: usize) -> u64 {
    if cardinality >= 64 {
        u64::MAX
    } else {
        (1u64 << cardinality) - 1
    }
}

impl Event {
    pub fn empty(cardinality: usize) -> Self {
        assert!(cardinality <= MAX_STATES);
        Self { mask: 0, cardinality: cardinality as u8 }
    }

    pub fn full(cardinality: usize) -> Self {
        assert!(cardinality <= MAX_STATES);
        Self { mask: full_mask(cardinality), cardinality: cardinality as u8 }
    }

    pub fn singleton(cardinality: usize, state: usize) -> Self {
        assert!(state < cardinality && cardinality <= MAX_STATES);
        Self { mask: 1 << state, cardinality: cardinality as u8 }
    }

    pub fn from_mask(cardinality: usize, mask: u64) -> Result<Self> {
        if cardinality > MAX_STATES {
            return Err(Error::InvalidDomain(format!("cardinality {cardinality} too large")));
        }
        if mask & !full_mask(cardinality) != 0 {
            return Err(Error::DomainMismatch {
                expected: cardinality,
                found: 64 - mask.leading_zeros() as usize,
            });
        }
        Ok(Self { mask, cardinality: cardinality as u8 })
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(cardinality: usize, states: I) -> Result<Self> {
        let mut mask = 0u64;
        for s in states {
            if s >= cardinality {
                return Err(Error::DomainMismatch { expected: cardinality, found: s + 1 });
            }
            mask |= 1 << s;
        }
        Self::from_mask(cardinality, mask)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Cardinality of the domain this event lives in.
    pub fn cardinality(&self) -> usize {
        self.cardinality as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, state: usize) -> bool {
        state < 64 && self.mask & (1 << state) != 0
    }

    pub fn complement(&self) -> Self {
        Self { mask: !self.mask & full_mask(self.cardinality()), cardinality: self.cardinality }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cardinality, other.cardinality);
        Self { mask: self.mask | other.mask, cardinality: self.cardinality }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cardinality, other.cardinality);
        Self { mask: self.mask & other.mask, cardinality: self.cardinality }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn with(&self, state: usize) -> Self {
        assert!(state < self.cardinality());
        Self { mask: self.mask | (1 << state), cardinality: self.cardinality }
    }

    /// Lowest member index.
    pub fn first(&self) -> Option<usize> {
        (self.mask != 0).then(|| self.mask.trailing_zeros() as usize)
    }

    /// The `n`-th member in ascending index order.
    pub fn nth(&self, n: usize) -> Option<usize> {
        self.iter().nth(n)
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> Members {
        Members { rest: self.mask }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for Event {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

pub struct Members {
    rest: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let i = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.rest.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}
