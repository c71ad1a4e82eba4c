//! Possibility distributions over a single finite domain.

use alloc::vec::Vec;

use crate::domain::Event;
use crate::error::{Error, Result};
use crate::TOLERANCE;

/// Combination operator of a possibilistic network (and of conditioning).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    Min,
    Product,
}

impl Semantics {
    /// The ⊗ operator.
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            Semantics::Min => a.min(b),
            Semantics::Product => a * b,
        }
    }

    /// Neutral element of ⊗.
    pub fn identity(self) -> f64 {
        1.0
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::Min => "min",
            Semantics::Product => "product",
        }
    }
}

/// A mapping from the states of one domain to [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct PossibilityDistribution {
    degrees: Vec<f64>,
}

pub(crate) fn check_degree(d: f64) -> Result<()> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange(d))
    }
}

impl PossibilityDistribution {
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidDomain("distribution over an empty domain".into()));
        }
        if degrees.len() > crate::domain::MAX_STATES {
            return Err(Error::InvalidDomain("distribution over more than 64 states".into()));
        }
        for &d in &degrees {
            check_degree(d)?;
        }
        Ok(Self { degrees })
    }

    /// Every state fully possible.
    pub fn total_ignorance(cardinality: usize) -> Self {
        Self { degrees: alloc::vec![1.0; cardinality] }
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn into_degrees(self) -> Vec<f64> {
        self.degrees
    }

    pub fn degree(&self, state: usize) -> f64 {
        self.degrees[state]
    }

    pub fn cardinality(&self) -> usize {
        self.degrees.len()
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        (self.max_degree() - 1.0).abs() <= TOLERANCE
    }

    /// Lowest-index state of maximal degree.
    pub fn best_state(&self) -> usize {
        let max = self.max_degree();
        self.degrees.iter().position(|&d| d == max).unwrap_or(0)
    }

    fn check_event(&self, event: &Event) -> Result<()> {
        if event.cardinality() != self.cardinality() {
            return Err(Error::DomainMismatch {
                expected: self.cardinality(),
                found: event.cardinality(),
            });
        }
        Ok(())
    }

    /// Π(A): the largest degree among the members of `event`, 0 for ∅.
    pub fn possibility(&self, event: &Event) -> Result<f64> {
        self.check_event(event)?;
        Ok(event.iter().map(|s| self.degrees[s]).fold(0.0, f64::max))
    }

    /// N(A) = 1 − Π(Ā).
    pub fn necessity(&self, event: &Event) -> Result<f64> {
        Ok(1.0 - self.possibility(&event.complement())?)
    }

    /// Revises the distribution by the certain evidence `event`.
    ///
    /// Product-based conditioning rescales the members of the event by
    /// Π(A); min-based conditioning lifts the most possible members to 1 and
    /// leaves the others untouched. States outside the event drop to 0.
    pub fn condition(&self, event: &Event, semantics: Semantics) -> Result<Self> {
        let pa = self.possibility(event)?;
        if pa <= 0.0 {
            return Err(Error::ImpossibleEvidence);
        }
        let degrees = self
            .degrees
            .iter()
            .enumerate()
            .map(|(s, &d)| {
                if !event.contains(s) {
                    0.0
                } else {
                    match semantics {
                        Semantics::Product => d / pa,
                        Semantics::Min if (d - pa).abs() <= TOLERANCE => 1.0,
                        Semantics::Min => d,
                    }
                }
            })
            .collect();
        Ok(Self { degrees })
    }

    /// States whose degree is at least `alpha`.
    pub fn alpha_cut(&self, alpha: f64) -> Result<Event> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(self.cut_unchecked(alpha))
    }

    pub(crate) fn cut_unchecked(&self, alpha: f64) -> Event {
        let mask = self
            .degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d >= alpha)
            .fold(0u64, |m, (s, _)| m | (1 << s));
        Event::from_mask(self.cardinality(), mask).expect("mask within domain")
    }

    /// Divides every degree by the maximum degree.
    pub fn normalize(&self) -> Result<Self> {
        let max = self.max_degree();
        if max <= 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        Ok(Self { degrees: self.degrees.iter().map(|&d| d / max).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pi(d: &[f64]) -> PossibilityDistribution {
        PossibilityDistribution::new(d.to_vec()).unwrap()
    }

    fn ev(card: usize, s: &[usize]) -> Event {
        Event::from_indices(card, s.iter().copied()).unwrap()
    }

    #[test]
    fn possibility_measure_examples() {
        let p = pi(&[1.0, 0.4, 0.2]);
        assert_eq!(p.possibility(&ev(3, &[1, 2])).unwrap(), 0.4);
        assert_eq!(p.possibility(&ev(3, &[0, 1, 2])).unwrap(), 1.0);
        assert_eq!(p.possibility(&Event::empty(3)).unwrap(), 0.0);
        assert!(matches!(
            p.possibility(&ev(2, &[0])),
            Err(Error::DomainMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn necessity_measure_examples() {
        let p = pi(&[1.0, 0.4, 0.2]);
        assert!((p.necessity(&ev(3, &[0])).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(p.necessity(&ev(3, &[0, 1, 2])).unwrap(), 1.0);
        assert_eq!(pi(&[1.0, 1.0, 0.2]).necessity(&ev(3, &[0])).unwrap(), 0.0);
        assert!(p.necessity(&ev(4, &[0])).is_err());
    }

    #[test]
    fn conditioning_examples() {
        let p = pi(&[1.0, 0.6, 0.3]);
        let bc = ev(3, &[1, 2]);
        let prod = p.condition(&bc, Semantics::Product).unwrap();
        assert_eq!(prod.degrees()[0], 0.0);
        assert!((prod.degrees()[1] - 1.0).abs() < 1e-12);
        assert!((prod.degrees()[2] - 0.5).abs() < 1e-12);
        assert_eq!(p.condition(&bc, Semantics::Min).unwrap().degrees(), &[0.0, 1.0, 0.3]);
        for sem in [Semantics::Min, Semantics::Product] {
            assert_eq!(p.condition(&Event::full(3), sem).unwrap().degrees(), &[1.0, 0.6, 0.3]);
        }
    }

    #[test]
    fn conditioning_on_impossible_evidence_fails() {
        let p = pi(&[1.0, 0.0, 0.0]);
        for sem in [Semantics::Min, Semantics::Product] {
            assert_eq!(p.condition(&ev(3, &[1, 2]), sem), Err(Error::ImpossibleEvidence));
            assert_eq!(p.condition(&Event::empty(3), sem), Err(Error::ImpossibleEvidence));
        }
    }

    #[test]
    fn alpha_cut_examples() {
        let p = pi(&[1.0, 0.4, 0.2]);
        assert_eq!(p.alpha_cut(0.3).unwrap(), ev(3, &[0, 1]));
        assert_eq!(p.alpha_cut(0.0).unwrap(), ev(3, &[0, 1, 2]));
        assert_eq!(p.alpha_cut(1.0).unwrap(), ev(3, &[0]));
        assert_eq!(p.alpha_cut(1.5), Err(Error::AlphaOutOfRange(1.5)));
        assert!(p.alpha_cut(-0.1).is_err());
        assert!(p.alpha_cut(f64::NAN).is_err());
    }

    #[test]
    fn normalize_examples() {
        let n = pi(&[0.75, 0.25]).normalize().unwrap();
        assert_eq!(n.degrees()[0], 1.0);
        assert!((n.degrees()[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(pi(&[1.0, 0.4]).normalize().unwrap().degrees(), &[1.0, 0.4]);
        assert_eq!(pi(&[0.0, 0.0]).normalize(), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn rejects_out_of_range_degrees() {
        assert_eq!(
            PossibilityDistribution::new(vec![1.0, 1.2]),
            Err(Error::DegreeOutOfRange(1.2))
        );
        assert!(PossibilityDistribution::new(vec![f64::NAN]).is_err());
        assert!(PossibilityDistribution::new(vec![]).is_err());
    }

    #[test]
    fn best_state_breaks_ties_low() {
        assert_eq!(pi(&[0.3, 1.0, 1.0]).best_state(), 1);
        assert_eq!(pi(&[0.0, 0.0]).best_state(), 0);
    }
}
