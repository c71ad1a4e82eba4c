//! DAG structures, conditional possibility tables and chain-rule evaluation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::distribution::{PossibilityDistribution, Semantics};
use crate::domain::StateDomain;
use crate::error::{Error, Result};

/// Variables plus the parent lists of a DAG over them.
///
/// Parent lists keep the order in which edges were declared. That order
/// fixes the row layout of every conditional table: row index is the
/// mixed-radix number formed by the parent state indices, first parent
/// most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkStructure {
    variables: Vec<StateDomain>,
    parents: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl NetworkStructure {
    /// Builds a structure from `(parent, child)` index pairs.
    pub fn new(variables: Vec<StateDomain>, edges: &[(usize, usize)]) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].iter().any(|w| w.name() == v.name()) {
                return Err(Error::Structure(format!("variable {} declared twice", v.name())));
            }
        }
        let n = variables.len();
        let mut parents = vec![Vec::new(); n];
        for &(p, c) in edges {
            if p >= n || c >= n {
                return Err(Error::Structure(format!("edge ({p}, {c}) references an unknown variable")));
            }
            if parents[c].contains(&p) {
                return Err(Error::Structure(format!(
                    "edge {} -> {} declared twice",
                    variables[p].name(),
                    variables[c].name()
                )));
            }
            parents[c].push(p);
        }
        let order = topological_sort(&variables, &parents)?;
        let structure = Self { variables, parents, order };
        for v in 0..n {
            structure.checked_config_count(v)?;
        }
        Ok(structure)
    }

    /// Builds a structure from `(parent, child)` name pairs.
    pub fn from_named_edges<S: AsRef<str>>(variables: Vec<StateDomain>, edges: &[(S, S)]) -> Result<Self> {
        let lookup = |name: &str| {
            variables
                .iter()
                .position(|v| v.name() == name)
                .ok_or_else(|| Error::Structure(format!("edge references unknown variable {name}")))
        };
        let idx = edges
            .iter()
            .map(|(p, c)| Ok((lookup(p.as_ref())?, lookup(c.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(variables, &idx)
    }

    pub fn variables(&self) -> &[StateDomain] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &StateDomain {
        &self.variables[index]
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }

    pub fn parents(&self, variable: usize) -> &[usize] {
        &self.parents[variable]
    }

    /// `(parent, child)` pairs, grouped by child in declaration order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    /// Variables ordered so that every parent precedes its children. Ties
    /// are broken by declaration order.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    fn checked_config_count(&self, variable: usize) -> Result<usize> {
        self.parents[variable].iter().try_fold(1usize, |acc, &p| {
            acc.checked_mul(self.variables[p].cardinality()).ok_or_else(|| {
                Error::Structure(format!(
                    "too many parent configurations for {}",
                    self.variables[variable].name()
                ))
            })
        })
    }

    /// Number of parent configurations (table rows) of `variable`.
    pub fn config_count(&self, variable: usize) -> usize {
        self.parents[variable]
            .iter()
            .map(|&p| self.variables[p].cardinality())
            .product()
    }

    /// Row index of a parent configuration, given one state per parent in
    /// declared parent order.
    pub fn config_index(&self, variable: usize, parent_states: &[usize]) -> usize {
        debug_assert_eq!(parent_states.len(), self.parents[variable].len());
        self.parents[variable]
            .iter()
            .zip(parent_states)
            .fold(0, |acc, (&p, &s)| acc * self.variables[p].cardinality() + s)
    }

    /// Inverse of [`config_index`](Self::config_index).
    pub fn config_states(&self, variable: usize, mut index: usize) -> Vec<usize> {
        let ps = &self.parents[variable];
        let mut states = vec![0; ps.len()];
        for (slot, &p) in states.iter_mut().zip(ps).rev() {
            let card = self.variables[p].cardinality();
            *slot = index % card;
            index /= card;
        }
        states
    }

    /// |Ω|, saturating at `u128::MAX`.
    pub fn omega_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.cardinality() as u128))
    }

    /// Enumerates Ω in row-major order over declaration order, refusing when
    /// |Ω| exceeds `cap`.
    pub fn assignments(&self, cap: usize) -> Result<Assignments> {
        let size = self.omega_size();
        if size > cap as u128 {
            return Err(Error::OmegaCapExceeded { size, cap });
        }
        Ok(Assignments::new(self.variables.iter().map(StateDomain::cardinality).collect()))
    }

    /// True when both structures have the same variables, domains and parent lists.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.variables == other.variables && self.parents == other.parents
    }
}

fn topological_sort(variables: &[StateDomain], parents: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = variables.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&v| !placed[v] && parents[v].iter().all(|&p| placed[p]));
        match next {
            Some(v) => {
                placed[v] = true;
                order.push(v);
            }
            None => return Err(cycle_error(variables, parents, &placed)),
        }
    }
    Ok(order)
}

/// Walks unplaced parents backwards until a node repeats; the closing edge
/// lies on a cycle.
fn cycle_error(variables: &[StateDomain], parents: &[Vec<usize>], placed: &[bool]) -> Error {
    let mut seen = vec![false; variables.len()];
    let mut current = placed.iter().position(|p| !p).expect("an unplaced node remains");
    loop {
        seen[current] = true;
        let parent = *parents[current]
            .iter()
            .find(|&&p| !placed[p])
            .expect("unplaced nodes have an unplaced parent");
        if seen[parent] {
            return Error::Cycle {
                parent: String::from(variables[parent].name()),
                child: String::from(variables[current].name()),
            };
        }
        current = parent;
    }
}

/// Odometer over a mixed-radix space, last position fastest.
pub struct Assignments {
    radices: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(radices: Vec<usize>) -> Self {
        let current = radices.iter().all(|&r| r > 0).then(|| vec![0; radices.len()]);
        Self { radices, current }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut i = self.radices.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.radices[i] {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// π(X | Pa(X)): one distribution per parent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPossibilityTable {
    child: usize,
    parents: Vec<usize>,
    rows: Vec<PossibilityDistribution>,
}

impl ConditionalPossibilityTable {
    pub fn child(&self) -> usize {
        self.child
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn rows(&self) -> &[PossibilityDistribution] {
        &self.rows
    }

    pub fn row(&self, config: usize) -> &PossibilityDistribution {
        &self.rows[config]
    }

    pub fn is_normalized(&self) -> bool {
        self.rows.iter().all(PossibilityDistribution::is_normalized)
    }
}

/// A DAG with one conditional possibility table per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibilisticNetwork {
    structure: NetworkStructure,
    tables: Vec<ConditionalPossibilityTable>,
    semantics: Semantics,
}

impl PossibilisticNetwork {
    /// `rows[v]` holds the table rows of variable `v`, in configuration order.
    pub fn new(
        structure: NetworkStructure,
        rows: Vec<Vec<PossibilityDistribution>>,
        semantics: Semantics,
    ) -> Result<Self> {
        if rows.len() != structure.len() {
            return Err(Error::Structure(format!(
                "{} tables given for {} variables",
                rows.len(),
                structure.len()
            )));
        }
        let mut tables = Vec::with_capacity(rows.len());
        for (v, table) in rows.into_iter().enumerate() {
            let dom = structure.variable(v);
            let expected = structure.config_count(v);
            if table.len() != expected {
                return Err(Error::Structure(format!(
                    "table of {} has {} rows, expected {expected}",
                    dom.name(),
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|r| r.cardinality() != dom.cardinality()) {
                return Err(Error::Structure(format!(
                    "a row of {} has {} degrees, expected {}",
                    dom.name(),
                    bad.cardinality(),
                    dom.cardinality()
                )));
            }
            tables.push(ConditionalPossibilityTable {
                child: v,
                parents: structure.parents(v).to_vec(),
                rows: table,
            });
        }
        Ok(Self { structure, tables, semantics })
    }

    /// Convenience constructor from raw degree arrays.
    pub fn from_degrees(
        structure: NetworkStructure,
        rows: Vec<Vec<Vec<f64>>>,
        semantics: Semantics,
    ) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|t| t.into_iter().map(PossibilityDistribution::new).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(structure, rows, semantics)
    }

    pub fn structure(&self) -> &NetworkStructure {
        &self.structure
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn variables(&self) -> &[StateDomain] {
        self.structure.variables()
    }

    pub fn table(&self, variable: usize) -> &ConditionalPossibilityTable {
        &self.tables[variable]
    }

    pub fn tables(&self) -> &[ConditionalPossibilityTable] {
        &self.tables
    }

    pub fn topological_order(&self) -> &[usize] {
        self.structure.topological_order()
    }

    pub fn is_normalized(&self) -> bool {
        self.tables.iter().all(ConditionalPossibilityTable::is_normalized)
    }

    /// Max-normalizes every row; all-zero rows stay as they are.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.tables {
            for r in &mut t.rows {
                if let Ok(n) = r.normalize() {
                    *r = n;
                }
            }
        }
        out
    }

    /// Chain rule: ⊗ over variables of π(x_i | pa(x_i)).
    pub fn joint_possibility(&self, assignment: &[usize]) -> Result<f64> {
        let s = &self.structure;
        if assignment.len() != s.len() {
            return Err(Error::Structure(format!(
                "assignment has {} entries for {} variables",
                assignment.len(),
                s.len()
            )));
        }
        for (v, &x) in assignment.iter().enumerate() {
            if x >= s.variable(v).cardinality() {
                return Err(Error::Structure(format!(
                    "state {x} out of range for {}",
                    s.variable(v).name()
                )));
            }
        }
        let mut acc = self.semantics.identity();
        let mut parent_states = Vec::new();
        for (v, &x) in assignment.iter().enumerate() {
            parent_states.clear();
            parent_states.extend(s.parents(v).iter().map(|&p| assignment[p]));
            let j = s.config_index(v, &parent_states);
            let row = self.tables[v].rows.get(j).ok_or_else(|| {
                Error::Structure(format!("missing row {j} in table of {}", s.variable(v).name()))
            })?;
            acc = self.semantics.combine(acc, row.degree(x));
        }
        Ok(acc)
    }

    /// The full joint distribution over Ω, row-major in declaration order.
    pub fn joint_table(&self, cap: usize) -> Result<Vec<f64>> {
        self.structure.assignments(cap)?.map(|a| self.joint_possibility(&a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(name: &str) -> StateDomain {
        let l = name.to_lowercase();
        StateDomain::new(name, [format!("{l}1"), format!("{l}2")]).unwrap()
    }

    fn xy(semantics: Semantics) -> PossibilisticNetwork {
        let s = NetworkStructure::from_named_edges(vec![binary("X"), binary("Y")], &[("X", "Y")]).unwrap();
        PossibilisticNetwork::from_degrees(
            s,
            vec![vec![vec![1.0, 0.5]], vec![vec![1.0, 0.2], vec![0.7, 1.0]]],
            semantics,
        )
        .unwrap()
    }

    #[test]
    fn chain_rule_examples() {
        assert_eq!(xy(Semantics::Min).joint_possibility(&[1, 1]).unwrap(), 0.5);
        assert_eq!(xy(Semantics::Product).joint_possibility(&[1, 1]).unwrap(), 0.5);
        let s = NetworkStructure::from_named_edges(vec![binary("X"), binary("Y")], &[("X", "Y")]).unwrap();
        for sem in [Semantics::Min, Semantics::Product] {
            let net = PossibilisticNetwork::from_degrees(
                s.clone(),
                vec![vec![vec![1.0, 0.5]], vec![vec![1.0, 0.0], vec![0.7, 1.0]]],
                sem,
            )
            .unwrap();
            assert_eq!(net.joint_possibility(&[0, 1]).unwrap(), 0.0);
        }
        assert!(xy(Semantics::Min).joint_possibility(&[0]).is_err());
        assert!(xy(Semantics::Min).joint_possibility(&[0, 2]).is_err());
    }

    #[test]
    fn topological_order_examples() {
        let chain = NetworkStructure::from_named_edges(
            vec![binary("X"), binary("Y"), binary("Z")],
            &[("X", "Y"), ("Y", "Z")],
        )
        .unwrap();
        assert_eq!(chain.topological_order(), &[0, 1, 2]);
        let reversed = NetworkStructure::from_named_edges(
            vec![binary("Z"), binary("Y"), binary("X")],
            &[("X", "Y"), ("Y", "Z")],
        )
        .unwrap();
        assert_eq!(reversed.topological_order(), &[2, 1, 0]);
        let free = NetworkStructure::new(vec![binary("X"), binary("Y")], &[]).unwrap();
        assert_eq!(free.topological_order(), &[0, 1]);
    }

    #[test]
    fn cycles_are_rejected_with_an_edge_on_the_cycle() {
        let err = NetworkStructure::from_named_edges(vec![binary("X"), binary("Y")], &[("X", "Y"), ("Y", "X")])
            .unwrap_err();
        match err {
            Error::Cycle { parent, child } => {
                assert!(matches!((parent.as_str(), child.as_str()), ("X", "Y") | ("Y", "X")))
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = NetworkStructure::from_named_edges(
            vec![binary("A"), binary("B"), binary("C"), binary("D")],
            &[("A", "B"), ("B", "C"), ("C", "D"), ("D", "B")],
        )
        .unwrap_err();
        match err {
            Error::Cycle { parent, child } => assert!(matches!(
                (parent.as_str(), child.as_str()),
                ("B", "C") | ("C", "D") | ("D", "B")
            )),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            NetworkStructure::new(vec![binary("X")], &[(0, 0)]),
            Err(Error::Cycle { .. })
        ));
    }

    #[test]
    fn config_index_is_row_major() {
        let s = NetworkStructure::new(
            vec![
                binary("A"),
                StateDomain::new("B", ["b1", "b2", "b3"]).unwrap(),
                binary("C"),
            ],
            &[(0, 2), (1, 2)],
        )
        .unwrap();
        assert_eq!(s.config_count(2), 6);
        assert_eq!(s.config_index(2, &[1, 2]), 5);
        assert_eq!(s.config_index(2, &[0, 1]), 1);
        for j in 0..6 {
            assert_eq!(s.config_index(2, &s.config_states(2, j)), j);
        }
    }

    #[test]
    fn table_shape_is_validated() {
        let s = NetworkStructure::from_named_edges(vec![binary("X"), binary("Y")], &[("X", "Y")]).unwrap();
        assert!(PossibilisticNetwork::from_degrees(
            s.clone(),
            vec![vec![vec![1.0, 0.5]], vec![vec![1.0, 0.2]]],
            Semantics::Min
        )
        .is_err());
        assert!(PossibilisticNetwork::from_degrees(
            s,
            vec![vec![vec![1.0, 0.5, 0.1]], vec![vec![1.0, 0.2], vec![1.0, 0.2]]],
            Semantics::Min
        )
        .is_err());
    }

    #[test]
    fn joint_enumeration_respects_cap() {
        let net = xy(Semantics::Product);
        let joint = net.joint_table(4).unwrap();
        assert_eq!(joint, vec![1.0, 0.2, 0.35, 0.5]);
        assert_eq!(
            net.joint_table(3),
            Err(Error::OmegaCapExceeded { size: 4, cap: 3 })
        );
    }
}
