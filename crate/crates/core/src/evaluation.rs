//! Gold-network evaluation: sample from a known network, learn its
//! parameters back on the known structure and measure the gap.
//!
//! Networks are aligned by variable name and state label, so two networks
//! that list states or parents in different orders still compare
//! correctly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::distribution::PossibilityDistribution;
use crate::error::{Error, Result};
use crate::estimator::{
    count_possibilistic, learn_parameters, possibilistic_loglik, possibilistic_loglik_counts,
    possibilistic_mle_raw, Estimator, ImprecisionBudget,
};
use crate::network::{NetworkStructure, PossibilisticNetwork};
use crate::sampler::{sample_dataset, SamplerConfig};
use crate::DEFAULT_OMEGA_CAP;

/// Index maps from one structure into another.
struct Alignment {
    /// `vars[i]` = index in `other` of variable `i`.
    vars: Vec<usize>,
    /// `states[i][x]` = index in `other` of state `x` of variable `i`.
    states: Vec<Vec<usize>>,
}

fn align(a: &NetworkStructure, b: &NetworkStructure) -> Result<Alignment> {
    if a.len() != b.len() {
        return Err(Error::Structure(format!("{} variables vs {}", a.len(), b.len())));
    }
    let mut vars = Vec::with_capacity(a.len());
    let mut states = Vec::with_capacity(a.len());
    for dom in a.variables() {
        let j = b
            .index_of(dom.name())
            .ok_or_else(|| Error::Structure(format!("variable {} missing", dom.name())))?;
        let other = b.variable(j);
        if other.cardinality() != dom.cardinality() {
            return Err(Error::Structure(format!("domains of {} differ", dom.name())));
        }
        let map = dom
            .states()
            .iter()
            .map(|s| {
                other
                    .index_of(s)
                    .ok_or_else(|| Error::Structure(format!("state {s} of {} missing", dom.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        vars.push(j);
        states.push(map);
    }
    for v in 0..a.len() {
        let mut pa: Vec<usize> = a.parents(v).iter().map(|&p| vars[p]).collect();
        let mut pb: Vec<usize> = b.parents(vars[v]).to_vec();
        pa.sort_unstable();
        pb.sort_unstable();
        if pa != pb {
            return Err(Error::Structure(format!(
                "parents of {} differ",
                a.variable(v).name()
            )));
        }
    }
    Ok(Alignment { vars, states })
}

fn normalized_row(row: &PossibilityDistribution) -> PossibilityDistribution {
    row.normalize().unwrap_or_else(|_| row.clone())
}

/// Mean absolute degree difference per variable, over every
/// `(parent configuration, state)` pair of max-normalized tables. Results
/// follow the variable order of `gold`.
pub fn cpt_distance(gold: &PossibilisticNetwork, learned: &PossibilisticNetwork) -> Result<Vec<f64>> {
    let (gs, ls) = (gold.structure(), learned.structure());
    let al = align(gs, ls)?;
    let mut out = Vec::with_capacity(gs.len());
    for v in 0..gs.len() {
        let lv = al.vars[v];
        let gold_parents = gs.parents(v);
        // For each learned parent, its position in the gold parent list.
        let positions: Vec<usize> = ls
            .parents(lv)
            .iter()
            .map(|lp| gold_parents.iter().position(|&gp| al.vars[gp] == *lp).expect("aligned parents"))
            .collect();
        let mut total = 0.0;
        let mut cells = 0usize;
        let mut learned_states = Vec::with_capacity(positions.len());
        for j in 0..gs.config_count(v) {
            let gold_states = gs.config_states(v, j);
            learned_states.clear();
            learned_states.extend(
                positions.iter().map(|&k| al.states[gold_parents[k]][gold_states[k]]),
            );
            let g = normalized_row(gold.table(v).row(j));
            let l = normalized_row(learned.table(lv).row(ls.config_index(lv, &learned_states)));
            for (x, &gd) in g.degrees().iter().enumerate() {
                total += (gd - l.degree(al.states[v][x])).abs();
                cells += 1;
            }
        }
        out.push(total / cells as f64);
    }
    Ok(out)
}

/// Mean absolute difference of chain-rule joint degrees over Ω.
pub fn joint_distance(gold: &PossibilisticNetwork, learned: &PossibilisticNetwork, cap: usize) -> Result<f64> {
    if gold.semantics() != learned.semantics() {
        return Err(Error::SemanticsMismatch(gold.semantics().as_str(), learned.semantics().as_str()));
    }
    let al = align(gold.structure(), learned.structure())?;
    let mut mapped = alloc::vec![0; al.vars.len()];
    let mut total = 0.0;
    let mut n = 0usize;
    for a in gold.structure().assignments(cap)? {
        for (v, &x) in a.iter().enumerate() {
            mapped[al.vars[v]] = al.states[v][x];
        }
        total += (gold.joint_possibility(&a)? - learned.joint_possibility(&mapped)?).abs();
        n += 1;
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BudgetChoice {
    /// `S_i = 1`.
    Unit,
    /// `S_i` = mean cell cardinality of `X_i` in the training split.
    MeanCardinality,
    Fixed(ImprecisionBudget),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sampler: SamplerConfig,
    pub estimator: Estimator,
    pub budget: BudgetChoice,
    /// Fraction of the sampled records held out for scoring, in [0, 1).
    pub holdout_fraction: f64,
    pub omega_cap: usize,
}

impl ExperimentConfig {
    pub fn new(sampler: SamplerConfig, estimator: Estimator) -> Self {
        Self {
            sampler,
            estimator,
            budget: BudgetChoice::Unit,
            holdout_fraction: 0.0,
            omega_cap: DEFAULT_OMEGA_CAP,
        }
    }

    pub fn with_holdout(mut self, fraction: f64) -> Self {
        self.holdout_fraction = fraction;
        self
    }

    pub fn with_budget(mut self, budget: BudgetChoice) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_omega_cap(mut self, cap: usize) -> Self {
        self.omega_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(Error::InvalidConfig(format!(
                "holdout fraction {} outside [0,1)",
                self.holdout_fraction
            )));
        }
        Ok(())
    }

    /// `(train, holdout)` record counts.
    pub fn split_sizes(&self) -> (usize, usize) {
        let n = self.sampler.record_count();
        let holdout = libm::ceil(n as f64 * self.holdout_fraction - 1e-9).max(0.0) as usize;
        let holdout = holdout.min(n);
        (n - holdout, holdout)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub variables: Vec<String>,
    pub cpt_distance: Vec<f64>,
    pub mean_cpt_distance: f64,
    /// `None` when |Ω| exceeds the configured cap.
    pub joint_distance: Option<f64>,
    pub holdout_loglik_gold: f64,
    pub holdout_loglik_learned: f64,
    /// Holdout score of the un-normalized maximizer (possibilistic MLE only).
    pub holdout_loglik_learned_raw: Option<f64>,
    pub train_records: usize,
    pub holdout_records: usize,
    pub budget: Vec<f64>,
    pub config: ExperimentConfig,
    pub learned: PossibilisticNetwork,
}

/// Sample → split → learn on the known structure → compare and score.
pub fn run_experiment(gold: &PossibilisticNetwork, config: &ExperimentConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let structure = gold.structure();
    let data = sample_dataset(gold, &config.sampler)?;
    let (train_len, holdout_len) = config.split_sizes();
    let (train, holdout) = data.split_at(train_len);

    let budget = match &config.budget {
        BudgetChoice::Unit => ImprecisionBudget::unit(structure.len()),
        BudgetChoice::MeanCardinality => ImprecisionBudget::mean_cardinality(&train),
        BudgetChoice::Fixed(b) => b.clone(),
    };
    let learned = learn_parameters(&train, structure, &budget, config.estimator)?
        .into_network(gold.semantics())?;

    let cpt = cpt_distance(gold, &learned)?;
    let mean_cpt = cpt.iter().sum::<f64>() / cpt.len().max(1) as f64;
    let joint = match joint_distance(gold, &learned, config.omega_cap) {
        Ok(d) => Some(d),
        Err(Error::OmegaCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };

    let holdout_loglik_gold = possibilistic_loglik(gold, &holdout)?;
    let holdout_loglik_learned = possibilistic_loglik(&learned, &holdout)?;
    let holdout_loglik_learned_raw = match config.estimator {
        Estimator::PossibilisticMle => {
            let raw = possibilistic_mle_raw(&count_possibilistic(&train, structure)?, &budget)?;
            Some(possibilistic_loglik_counts(&raw, &count_possibilistic(&holdout, structure)?)?)
        }
        _ => None,
    };

    Ok(EvaluationReport {
        variables: structure.variables().iter().map(|v| v.name().into()).collect(),
        cpt_distance: cpt,
        mean_cpt_distance: mean_cpt,
        joint_distance: joint,
        holdout_loglik_gold,
        holdout_loglik_learned,
        holdout_loglik_learned_raw,
        train_records: train_len,
        holdout_records: holdout_len,
        budget: budget.values().to_vec(),
        config: config.clone(),
        learned,
    })
}
