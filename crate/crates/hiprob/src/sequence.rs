//! I.i.d. outcome sequences under competing loading hypotheses.
//!
//! Each hypothesis is a full distribution over the outcome space (for a die,
//! a sextuple of face probabilities); the model pairs the hypothesis set
//! with a prior over it. Observing outcomes updates the prior by Bayes'
//! rule, and the updated hierarchy prices the next trial through its
//! predictive distribution — the direct-inference step from a loading to a
//! degree of belief about one specific toss.

use crate::decision::{Belief, DecisionProblem, UtilityMatrix};
use crate::error::{Error, Result};
use crate::hierarchy::{CandidateSet, SecondOrderDistribution};
use crate::prob::{Distribution, OutcomeSpace};

/// A hypothesis set with a prior over it, under the assumption that
/// successive outcomes are independent and identically distributed.
#[derive(Debug, Clone, PartialEq)]
pub struct IIDModel {
    prior: SecondOrderDistribution,
}

impl IIDModel {
    pub fn new(prior: SecondOrderDistribution) -> Self {
        Self { prior }
    }

    pub fn prior(&self) -> &SecondOrderDistribution {
        &self.prior
    }

    pub fn hypotheses(&self) -> &CandidateSet {
        self.prior.candidates()
    }

    pub fn outcome_space(&self) -> &OutcomeSpace {
        self.prior.world_space()
    }

    /// Bayes update over the hypotheses given observed outcome indices.
    ///
    /// Because the trials are i.i.d., only the per-outcome counts matter:
    /// each hypothesis accumulates `count(w) · ln hypothesis(w)` in log
    /// space and is exponentiated and normalized once at the end, so long
    /// sequences cannot underflow and reordering the observations cannot
    /// change the answer. An empty observation list returns the prior
    /// unchanged.
    pub fn posterior(&self, observations: &[usize]) -> Result<SecondOrderDistribution> {
        let n = self.outcome_space().size();
        let mut counts = vec![0usize; n];
        for &observation in observations {
            if observation >= n {
                return Err(Error::OutcomeOutOfRange {
                    index: observation,
                    size: n,
                });
            }
            counts[observation] += 1;
        }
        if observations.is_empty() {
            return Ok(self.prior.clone());
        }

        let log_posterior: Vec<f64> = self
            .hypotheses()
            .candidates()
            .iter()
            .enumerate()
            .map(|(i, hypothesis)| {
                let mut log_weight = self.prior.weight(i).ln();
                for (w, &count) in counts.iter().enumerate() {
                    if count > 0 {
                        // Skipped when count is 0: 0 · ln(0) must not poison
                        // hypotheses that merely exclude unobserved faces.
                        log_weight += count as f64 * hypothesis.weight(w).ln();
                    }
                }
                log_weight
            })
            .collect();

        let peak = log_posterior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::ImpossibleObservation);
        }
        let unnormalized: Vec<f64> = log_posterior.iter().map(|&l| (l - peak).exp()).collect();
        let total: f64 = unnormalized.iter().sum();
        let weights = unnormalized.into_iter().map(|u| u / total).collect();
        Ok(SecondOrderDistribution::from_validated(
            self.hypotheses().clone(),
            weights,
        ))
    }

    /// Predictive distribution for the next trial after the observations:
    /// the posterior-weighted expectation of the hypotheses. Under the
    /// i.i.d. assumption the same distribution prices every future trial.
    pub fn predictive_next(&self, observations: &[usize]) -> Result<Distribution> {
        Ok(self.posterior(observations)?.predictive())
    }

    /// The even-money bet on `target` as a decision problem: betting pays
    /// `stake` when the target comes up and costs `stake` otherwise;
    /// abstaining pays nothing. The belief is the posterior hierarchy after
    /// the observations.
    pub fn bet_problem(
        &self,
        observations: &[usize],
        target: usize,
        stake: f64,
    ) -> Result<DecisionProblem> {
        let n = self.outcome_space().size();
        if target >= n {
            return Err(Error::OutcomeOutOfRange {
                index: target,
                size: n,
            });
        }
        if !(stake > 0.0 && stake.is_finite()) {
            return Err(Error::InvalidStake { stake });
        }
        let posterior = self.posterior(observations)?;
        let mut bet_row = vec![-stake; n];
        bet_row[target] = stake;
        let utilities = UtilityMatrix::new(
            vec![
                format!("bet-on-{}", self.outcome_space().label(target)),
                "abstain".to_string(),
            ],
            self.outcome_space().clone(),
            vec![bet_row, vec![0.0; n]],
        )?;
        DecisionProblem::new(utilities, Belief::Hierarchical(posterior))
    }
}
