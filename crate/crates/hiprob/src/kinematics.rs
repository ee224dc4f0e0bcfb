//! Belief change: Jeffrey's rule with its rigidity precondition, and the
//! C3 constraint measured on joint distributions.
//!
//! Jeffrey's rule moves the probability of one event to a new value while
//! holding the conditionals inside and outside the event fixed. C3 asks a
//! different question of a hierarchy: once you know the target event
//! happened, does also learning *what probability a candidate assigned it*
//! change your belief in anything else? [`c3_deviation`] reports how far a
//! given joint is from answering "no"; it measures, it does not enforce.

use crate::error::{Error, Result};
use crate::hierarchy::{CandidateSet, JointDistribution};
use crate::prob::{Distribution, Event, ZERO_MASS_TOLERANCE};

/// Candidates whose probability for the target event sits within this
/// absolute slack of `x` belong to the row event "P(target) = x".
/// Model files carry decimal literals, so exact float equality would make
/// the event capriciously empty.
pub const CANDIDATE_MATCH_TOLERANCE: f64 = 1e-9;

/// A requested change of belief: move the probability of `target` to
/// `new_probability`.
///
/// The new probability must lie strictly inside (0, 1) and the target must
/// be a proper event — Jeffrey's formula needs live conditionals on both
/// sides. Shifting to certainty is plain conditioning, not a shift.
#[derive(Debug, Clone, PartialEq)]
pub struct JeffreyShift {
    target: Event,
    new_probability: f64,
}

impl JeffreyShift {
    pub fn new(target: Event, new_probability: f64) -> Result<Self> {
        if !(new_probability > 0.0 && new_probability < 1.0) {
            return Err(Error::InvalidShiftProbability {
                value: new_probability,
            });
        }
        if target.is_empty() || target.is_full() {
            return Err(Error::InvalidShiftTarget {
                detail: "target event must be neither empty nor the full space".into(),
            });
        }
        Ok(Self {
            target,
            new_probability,
        })
    }

    pub fn target(&self) -> &Event {
        &self.target
    }

    pub fn new_probability(&self) -> f64 {
        self.new_probability
    }
}

/// Jeffrey's rule: mix the conditional inside the target (weighted by the
/// new probability) with the conditional outside it (weighted by the
/// complement), so that the target ends up at exactly the requested
/// probability while all conditionals given the target and its complement
/// stay put.
pub fn jeffrey_update(p: &Distribution, shift: &JeffreyShift) -> Result<Distribution> {
    let target = shift.target();
    let mass = p.event_probability(target)?;
    if mass <= ZERO_MASS_TOLERANCE || mass >= 1.0 - ZERO_MASS_TOLERANCE {
        return Err(Error::InvalidShiftTarget {
            detail: format!("target event has probability {mass}; both sides must be live"),
        });
    }
    let inside = p.condition(target)?;
    let outside = p.condition(&target.complement())?;
    let x = shift.new_probability();
    let weights = inside
        .weights()
        .iter()
        .zip(outside.weights())
        .map(|(&a, &b)| a * x + b * (1.0 - x))
        .collect();
    Ok(Distribution::from_validated(p.space().clone(), weights))
}

/// True when `before` and `after` share their conditionals both given the
/// target and given its complement, elementwise within `tolerance`. On a
/// finite space this is equivalent to agreement for every event — the
/// precondition Jeffrey's rule assumes and its output guarantees.
pub fn verify_rigidity(
    before: &Distribution,
    after: &Distribution,
    target: &Event,
    tolerance: f64,
) -> Result<bool> {
    let complement = target.complement();
    let pairs = [
        (before.condition(target)?, after.condition(target)?),
        (before.condition(&complement)?, after.condition(&complement)?),
    ];
    Ok(pairs.iter().all(|(b, a)| {
        b.weights()
            .iter()
            .zip(a.weights())
            .all(|(&x, &y)| (x - y).abs() <= tolerance)
    }))
}

/// A subset of a joint distribution's rows — a proposition about which
/// candidate is in force, such as "the candidate assigns the target
/// probability x".
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEvent {
    members: Vec<bool>,
}

impl ModelEvent {
    /// Rows whose candidate gives `target` a probability within
    /// `tolerance` of `x`. May be empty; callers decide whether that is an
    /// error.
    pub fn matching_probability(
        candidates: &CandidateSet,
        target: &Event,
        x: f64,
        tolerance: f64,
    ) -> Result<ModelEvent> {
        let mut members = Vec::with_capacity(candidates.candidate_count());
        for candidate in candidates.candidates() {
            let p = candidate.event_probability(target)?;
            members.push((p - x).abs() <= tolerance);
        }
        Ok(ModelEvent { members })
    }

    pub fn full(count: usize) -> ModelEvent {
        ModelEvent {
            members: vec![true; count],
        }
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }
}

/// Both sides of the C3 comparison for one `(a, b, x)` triple.
#[derive(Debug, Clone)]
pub struct C3Report {
    /// Candidate indices i with |P_i(a) − x| within the match tolerance.
    pub matching_candidates: Vec<usize>,
    /// Pr(b | a ∧ "P(a) = x") under the joint.
    pub conditional_given_match: f64,
    /// Pr(b | a) under the joint.
    pub conditional_given_target: f64,
    /// Absolute difference of the two; 0 means C3 holds at this triple.
    pub deviation: f64,
}

/// Measure C3 on a joint: how much does conditioning on the row event
/// "P(a) = x" change the probability of `b` beyond conditioning on `a`
/// alone? Both conditionals run through the same cell walk, so when every
/// row matches `x` the two sides are computed identically and the
/// deviation is exactly zero.
pub fn c3_report(
    joint: &JointDistribution,
    candidates: &CandidateSet,
    a: &Event,
    b: &Event,
    x: f64,
) -> Result<C3Report> {
    if candidates.candidate_count() != joint.row_count() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "candidate set has {} members, joint has {} rows",
                candidates.candidate_count(),
                joint.row_count()
            ),
        });
    }
    if candidates.space() != joint.world_space() {
        return Err(Error::DimensionMismatch {
            detail: "candidate set and joint live on different outcome spaces".into(),
        });
    }
    let matched = ModelEvent::matching_probability(candidates, a, x, CANDIDATE_MATCH_TOLERANCE)?;
    if matched.is_empty() {
        return Err(Error::EmptyConditioningEvent {
            detail: format!("no candidate assigns the target event probability {x}"),
        });
    }
    let conditional_given_match = conditional_over_rows(joint, matched.members(), b, a)?;
    let full = ModelEvent::full(joint.row_count());
    let conditional_given_target = conditional_over_rows(joint, full.members(), b, a)?;
    Ok(C3Report {
        matching_candidates: matched.indices().collect(),
        conditional_given_match,
        conditional_given_target,
        deviation: (conditional_given_match - conditional_given_target).abs(),
    })
}

/// The C3 deviation alone.
pub fn c3_deviation(
    joint: &JointDistribution,
    candidates: &CandidateSet,
    a: &Event,
    b: &Event,
    x: f64,
) -> Result<f64> {
    c3_report(joint, candidates, a, b, x).map(|report| report.deviation)
}

/// Pr(b | a restricted to the kept rows) by direct cell summation.
fn conditional_over_rows(
    joint: &JointDistribution,
    keep: &[bool],
    b: &Event,
    a: &Event,
) -> Result<f64> {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for (i, row) in joint.rows().iter().enumerate() {
        if !keep[i] {
            continue;
        }
        for (w, &cell) in row.iter().enumerate() {
            if a.contains(w) {
                denominator += cell;
                if b.contains(w) {
                    numerator += cell;
                }
            }
        }
    }
    if denominator <= ZERO_MASS_TOLERANCE {
        return Err(Error::EmptyConditioningEvent {
            detail: "conditioning event carries no mass in the joint".into(),
        });
    }
    Ok(numerator / denominator)
}
