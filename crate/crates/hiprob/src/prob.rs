//! Finite discrete distributions, events, and conditioning.
//!
//! Everything else in the crate is built on three values: an ordered finite
//! [`OutcomeSpace`], a [`Distribution`] of nonnegative weights over it, and
//! an [`Event`] (a subset of outcomes). All values are immutable after
//! construction and all operations are pure.

use crate::error::{Error, Result};

/// Slack allowed on `|Σ weights − 1|` when a distribution is constructed.
/// Weights are stored exactly as given; nothing is silently renormalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Event mass at or below this bound counts as zero for conditioning.
pub const ZERO_MASS_TOLERANCE: f64 = 1e-12;

/// An ordered set of distinct outcome labels.
///
/// The ordering is fixed at construction and defines the index ↔ label
/// mapping used by every distribution and event over the space. Two spaces
/// are equal exactly when their label sequences are equal, so models
/// re-parsed from disk compare equal to freshly built ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Self { labels })
    }

    /// Number of outcomes (always ≥ 1).
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Reject weight vectors holding anything other than finite, nonnegative
/// entries of the expected length. Shared by every weighted type.
pub(crate) fn check_weights(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::DimensionMismatch {
            detail: format!("expected {} weights, got {}", expected, weights.len()),
        });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteWeight { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeWeight { index, value });
        }
    }
    Ok(())
}

/// Reject weight sums outside [`NORMALIZATION_TOLERANCE`] of 1.
/// Written so that a NaN sum also lands in the error arm.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn check_normalized(sum: f64) -> Result<()> {
    if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized {
            sum,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }
    Ok(())
}

/// A probability distribution over a finite outcome space.
///
/// Weights are validated at construction (nonnegative, summing to 1 within
/// [`NORMALIZATION_TOLERANCE`]) and stored exactly as given.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    space: OutcomeSpace,
    weights: Vec<f64>,
}

impl Distribution {
    /// Validate `weights` against `space` and store them unchanged.
    pub fn new(space: OutcomeSpace, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, space.size())?;
        check_normalized(weights.iter().sum())?;
        Ok(Self { space, weights })
    }

    /// Divide the weights by their sum, then validate. The explicit opt-in
    /// form of renormalization; [`Distribution::new`] never rescales.
    pub fn new_renormalized(space: OutcomeSpace, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, space.size())?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized {
                sum,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Self::new(space, weights)
    }

    pub fn uniform(space: OutcomeSpace) -> Self {
        let n = space.size();
        Self {
            space,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Constructor for weights already known to satisfy the invariants
    /// (outputs of conditioning, mixing, marginalization).
    pub(crate) fn from_validated(space: OutcomeSpace, weights: Vec<f64>) -> Self {
        debug_assert!(check_weights(&weights, space.size()).is_ok());
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        Self { space, weights }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Total mass the distribution puts on `event`: Σ_{w ∈ event} p(w).
    pub fn event_probability(&self, event: &Event) -> Result<f64> {
        self.check_same_space(event)?;
        Ok(event.indices().map(|w| self.weights[w]).sum())
    }

    /// Conditional distribution given `event`: weights inside the event are
    /// divided by its probability, weights outside become zero.
    pub fn condition(&self, event: &Event) -> Result<Distribution> {
        self.check_same_space(event)?;
        let mass = self.event_probability(event)?;
        if mass <= ZERO_MASS_TOLERANCE {
            return Err(Error::ZeroProbabilityEvent);
        }
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(w, &p)| if event.contains(w) { p / mass } else { 0.0 })
            .collect();
        Ok(Distribution::from_validated(self.space.clone(), weights))
    }

    /// P(of | given) = P(of ∩ given) / P(given).
    pub fn conditional_probability(&self, of: &Event, given: &Event) -> Result<f64> {
        self.check_same_space(of)?;
        self.check_same_space(given)?;
        let given_mass = self.event_probability(given)?;
        if given_mass <= ZERO_MASS_TOLERANCE {
            return Err(Error::ZeroProbabilityEvent);
        }
        let joint_mass: f64 = given
            .indices()
            .filter(|&w| of.contains(w))
            .map(|w| self.weights[w])
            .sum();
        Ok(joint_mass / given_mass)
    }

    fn check_same_space(&self, event: &Event) -> Result<()> {
        if self.space != *event.space() {
            return Err(Error::DimensionMismatch {
                detail: "distribution and event live on different outcome spaces".into(),
            });
        }
        Ok(())
    }
}

/// A subset of an outcome space, stored as a membership mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    space: OutcomeSpace,
    members: Vec<bool>,
}

impl Event {
    pub fn new<I>(space: OutcomeSpace, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut members = vec![false; space.size()];
        for index in indices {
            if index >= space.size() {
                return Err(Error::OutcomeOutOfRange {
                    index,
                    size: space.size(),
                });
            }
            members[index] = true;
        }
        Ok(Self { space, members })
    }

    pub fn from_labels<S: AsRef<str>>(space: OutcomeSpace, labels: &[S]) -> Result<Self> {
        let mut indices = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            match space.index_of(label) {
                Some(index) => indices.push(index),
                None => {
                    return Err(Error::UnknownLabel {
                        label: label.to_string(),
                    })
                }
            }
        }
        Event::new(space, indices)
    }

    pub fn full(space: OutcomeSpace) -> Self {
        let members = vec![true; space.size()];
        Self { space, members }
    }

    pub fn empty(space: OutcomeSpace) -> Self {
        let members = vec![false; space.size()];
        Self { space, members }
    }

    pub fn complement(&self) -> Event {
        Event {
            space: self.space.clone(),
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }

    pub fn intersection(&self, other: &Event) -> Result<Event> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                detail: "events live on different outcome spaces".into(),
            });
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(&a, &b)| a && b)
            .collect();
        Ok(Event {
            space: self.space.clone(),
            members,
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(w, &m)| m.then_some(w))
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.space.size()
    }
}
