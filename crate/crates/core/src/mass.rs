//! Mass functions (random sets) and the possibility distributions they induce.

use alloc::format;
use alloc::vec::Vec;

use crate::distribution::PossibilityDistribution;
use crate::domain::Event;
use crate::error::{Error, Result};
use crate::TOLERANCE;

/// A probability assignment over nonempty subsets (focal sets) of a domain.
///
/// Focal sets are kept sorted by their canonical mask order. Subsets that
/// are not listed carry mass 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    cardinality: usize,
    focal: Vec<(Event, f64)>,
}

impl MassFunction {
    pub fn new<I>(cardinality: usize, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Event, f64)>,
    {
        let mut focal: Vec<(Event, f64)> = assignments.into_iter().collect();
        focal.sort_by_key(|f| f.0);
        for (i, (set, mass)) in focal.iter().enumerate() {
            if set.cardinality() != cardinality {
                return Err(Error::DomainMismatch { expected: cardinality, found: set.cardinality() });
            }
            if set.is_empty() {
                return Err(Error::InvalidMass("the empty set cannot carry mass".into()));
            }
            if !(*mass > 0.0 && *mass <= 1.0) {
                return Err(Error::InvalidMass(format!("mass {mass} of {set:?} not in (0,1]")));
            }
            if i > 0 && focal[i - 1].0 == *set {
                return Err(Error::InvalidMass(format!("focal set {set:?} listed twice")));
            }
        }
        let total: f64 = focal.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { cardinality, focal })
    }

    /// All mass on the whole domain.
    pub fn vacuous(cardinality: usize) -> Self {
        Self { cardinality, focal: alloc::vec![(Event::full(cardinality), 1.0)] }
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn focal_sets(&self) -> &[(Event, f64)] {
        &self.focal
    }

    pub fn mass_of(&self, set: &Event) -> f64 {
        self.focal
            .binary_search_by(|(s, _)| s.cmp(set))
            .map(|i| self.focal[i].1)
            .unwrap_or(0.0)
    }

    /// Counter function: π(x) = Σ m(A) over focal sets A containing x.
    pub fn to_possibility(&self) -> PossibilityDistribution {
        let mut degrees = alloc::vec![0.0; self.cardinality];
        for (set, mass) in &self.focal {
            for s in set.iter() {
                degrees[s] += mass;
            }
        }
        // Summation can overshoot 1 by an ulp or two.
        for d in &mut degrees {
            *d = d.min(1.0);
        }
        PossibilityDistribution::new(degrees).expect("counter function degrees lie in [0,1]")
    }

    /// True iff some state belongs to every focal set.
    pub fn is_consistent(&self) -> bool {
        let common = self
            .focal
            .iter()
            .fold(Event::full(self.cardinality), |acc, (s, _)| acc.intersection(s));
        !common.is_empty()
    }
}

/// Free-function form of [`MassFunction::to_possibility`].
pub fn mass_to_possibility(m: &MassFunction) -> PossibilityDistribution {
    m.to_possibility()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &[usize]) -> Event {
        Event::from_indices(3, s.iter().copied()).unwrap()
    }

    #[test]
    fn counter_function_examples() {
        let m = MassFunction::new(3, [(ev(&[0]), 0.5), (ev(&[0, 1]), 0.3), (ev(&[0, 1, 2]), 0.2)])
            .unwrap();
        let pi = m.to_possibility();
        assert!((pi.degrees()[0] - 1.0).abs() < 1e-12);
        assert!((pi.degrees()[1] - 0.5).abs() < 1e-12);
        assert!((pi.degrees()[2] - 0.2).abs() < 1e-12);
        assert!(pi.is_normalized());

        let m = MassFunction::new(3, [(ev(&[0]), 1.0)]).unwrap();
        assert_eq!(m.to_possibility().degrees(), &[1.0, 0.0, 0.0]);

        let m = MassFunction::new(3, [(ev(&[0]), 0.5), (ev(&[1]), 0.5)]).unwrap();
        assert_eq!(m.to_possibility().degrees(), &[0.5, 0.5, 0.0]);
        assert!(!m.to_possibility().is_normalized());
    }

    #[test]
    fn consistency_examples() {
        let m = MassFunction::new(3, [(ev(&[0]), 0.5), (ev(&[0, 1]), 0.5)]).unwrap();
        assert!(m.is_consistent());
        let m = MassFunction::new(3, [(ev(&[0]), 0.5), (ev(&[1]), 0.5)]).unwrap();
        assert!(!m.is_consistent());
        assert!(MassFunction::new(3, [(ev(&[0, 1, 2]), 1.0)]).unwrap().is_consistent());
    }

    #[test]
    fn validation() {
        assert!(MassFunction::new(3, [(ev(&[0]), 0.5)]).is_err());
        assert!(MassFunction::new(3, [(Event::empty(3), 1.0)]).is_err());
        assert!(MassFunction::new(3, [(ev(&[0]), 0.5), (ev(&[0]), 0.5)]).is_err());
        assert!(MassFunction::new(3, [(ev(&[0]), 1.0), (ev(&[1]), 0.0)]).is_err());
        assert!(MassFunction::new(2, [(ev(&[0]), 1.0)]).is_err());
        let m = MassFunction::new(3, [(ev(&[1]), 0.25), (ev(&[0]), 0.75)]).unwrap();
        assert_eq!(m.mass_of(&ev(&[0])), 0.75);
        assert_eq!(m.mass_of(&ev(&[2])), 0.0);
        assert_eq!(m.focal_sets()[0].0, ev(&[0]));
    }
}
