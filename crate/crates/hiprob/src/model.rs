//! The on-disk model format and its resolution into engine types.
//!
//! A model file is TOML: a `worlds` list, an ordered `[[candidates]]`
//! array of named weight vectors, a `[second_order]` table keyed by
//! candidate name, and optional `claimed`, `[utilities]`, `[events]`, and
//! `observations` sections. Resolution validates every vector, resolves
//! every name, and reports failures with the offending field.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::decision::UtilityMatrix;
use crate::error::Error as EngineError;
use crate::hierarchy::{CandidateSet, SecondOrderDistribution};
use crate::prob::{Distribution, Event, OutcomeSpace};

/// Raw deserialized form of a model file, names not yet resolved.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    pub candidates: Vec<CandidateEntry>,
    pub second_order: BTreeMap<String, f64>,
    #[serde(default)]
    pub claimed: Option<Vec<f64>>,
    #[serde(default)]
    pub utilities: Option<UtilitySection>,
    #[serde(default)]
    pub events: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub observations: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub name: String,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySection {
    pub acts: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Why a model file could not be turned into a [`Model`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// The text is not a well-formed model file.
    #[error("parse error: {0}")]
    Parse(String),
    /// The file parsed but its contents violate an invariant.
    #[error("validation error: {0}")]
    Validation(String),
}

fn invalid(location: &str, err: EngineError) -> ModelError {
    ModelError::Validation(format!("{location}: {err}"))
}

/// A fully resolved model: every vector validated, every name resolved.
#[derive(Debug, Clone)]
pub struct Model {
    pub space: OutcomeSpace,
    pub candidate_names: Vec<String>,
    pub hierarchy: SecondOrderDistribution,
    pub claimed: Option<Distribution>,
    pub utilities: Option<UtilityMatrix>,
    pub events: BTreeMap<String, Event>,
    pub observations: Vec<usize>,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelError> {
        toml::from_str(text).map_err(|err| ModelError::Parse(err.to_string()))
    }

    pub fn resolve(&self) -> Result<Model, ModelError> {
        let space = OutcomeSpace::new(self.worlds.iter().cloned())
            .map_err(|err| invalid("worlds", err))?;

        if self.candidates.is_empty() {
            return Err(ModelError::Validation(
                "candidates: at least one candidate is required".into(),
            ));
        }
        let mut candidate_names = Vec::with_capacity(self.candidates.len());
        let mut candidates = Vec::with_capacity(self.candidates.len());
        for entry in &self.candidates {
            if candidate_names.contains(&entry.name) {
                return Err(ModelError::Validation(format!(
                    "candidates: duplicate candidate name `{}`",
                    entry.name
                )));
            }
            let location = format!("candidate `{}`", entry.name);
            let candidate = Distribution::new(space.clone(), entry.weights.clone())
                .map_err(|err| invalid(&location, err))?;
            candidate_names.push(entry.name.clone());
            candidates.push(candidate);
        }
        let candidate_set = CandidateSet::new(candidates)
            .map_err(|err| invalid("candidates", err))?;

        for name in self.second_order.keys() {
            if !candidate_names.contains(name) {
                return Err(ModelError::Validation(format!(
                    "second_order: unknown candidate `{name}`"
                )));
            }
        }
        let mut second_order_weights = Vec::with_capacity(candidate_names.len());
        for name in &candidate_names {
            match self.second_order.get(name) {
                Some(&weight) => second_order_weights.push(weight),
                None => {
                    return Err(ModelError::Validation(format!(
                        "second_order: missing weight for candidate `{name}`"
                    )))
                }
            }
        }
        let hierarchy = SecondOrderDistribution::new(candidate_set, second_order_weights)
            .map_err(|err| invalid("second_order", err))?;

        let claimed = match &self.claimed {
            Some(weights) => Some(
                Distribution::new(space.clone(), weights.clone())
                    .map_err(|err| invalid("claimed", err))?,
            ),
            None => None,
        };

        let utilities = match &self.utilities {
            Some(section) => Some(
                UtilityMatrix::new(
                    section.acts.clone(),
                    space.clone(),
                    section.values.clone(),
                )
                .map_err(|err| invalid("utilities", err))?,
            ),
            None => None,
        };

        let mut events = BTreeMap::new();
        for (name, members) in &self.events {
            let location = format!("event `{name}`");
            let event = Event::from_labels(space.clone(), members)
                .map_err(|err| invalid(&location, err))?;
            events.insert(name.clone(), event);
        }

        let mut observations = Vec::with_capacity(self.observations.len());
        for (index, label) in self.observations.iter().enumerate() {
            match space.index_of(label) {
                Some(world) => observations.push(world),
                None => {
                    return Err(ModelError::Validation(format!(
                        "observations[{index}]: unknown world `{label}`"
                    )))
                }
            }
        }

        Ok(Model {
            space,
            candidate_names,
            hierarchy,
            claimed,
            utilities,
            events,
            observations,
        })
    }
}

impl Model {
    pub fn from_toml(text: &str) -> Result<Model, ModelError> {
        ModelFile::parse(text)?.resolve()
    }

    /// Look up a named event, erroring with the unknown name.
    pub fn event(&self, name: &str) -> Result<&Event, ModelError> {
        self.events.get(name).ok_or_else(|| {
            ModelError::Validation(format!("unknown event `{name}`"))
        })
    }
}
