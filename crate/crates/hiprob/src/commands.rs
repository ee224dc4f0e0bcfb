//! Command implementations and their reports.
//!
//! Each command returns a typed report that serializes to the
//! machine-readable JSON document (field names are stable, floats carry
//! full round-trip precision) and renders to a human table with
//! probabilities at six decimal places. Errors carry one of four classes,
//! each with its own documented exit code.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::decision::{self, ActChoice, Belief, DecisionProblem};
use crate::error::Error as EngineError;
use crate::kinematics::{self, JeffreyShift};
use crate::model::{Model, ModelError};
use crate::selftest::{self, SuiteOutcome};
use crate::sequence::IIDModel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Tolerance the `decide --mode all` agreement assertion enforces.
pub const MODE_AGREEMENT_TOLERANCE: f64 = 1e-10;

/// Tolerance for the flatten command's internal witness re-check and its
/// product-form verdict.
pub const REPORT_TOLERANCE: f64 = 1e-12;

/// Command failures, one variant per documented exit class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("internal equivalence failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Precondition(_) => "precondition",
            CliError::Internal(_) => "internal",
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::Parse(message) => CliError::Parse(message),
            ModelError::Validation(message) => CliError::Validation(message),
        }
    }
}

/// Sort engine errors into the validation and precondition classes.
/// Construction failures are validation; operations refusing to run on a
/// valid model are preconditions.
pub fn classify(err: EngineError) -> CliError {
    match err {
        EngineError::ZeroProbabilityEvent
        | EngineError::InvalidShiftProbability { .. }
        | EngineError::InvalidShiftTarget { .. }
        | EngineError::EmptyConditioningEvent { .. }
        | EngineError::ImpossibleObservation
        | EngineError::InvalidStake { .. }
        | EngineError::ActOutOfRange { .. }
        | EngineError::OutcomeOutOfRange { .. } => CliError::Precondition(err.to_string()),
        _ => CliError::Validation(err.to_string()),
    }
}

/// The machine-readable error document (single JSON object, like every
/// other report).
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub command: String,
    pub status: &'static str,
    pub exit_code: i32,
    pub class: &'static str,
    pub message: String,
}

impl ErrorReport {
    pub fn new(command: &str, err: &CliError) -> Self {
        Self {
            command: command.to_string(),
            status: "error",
            exit_code: err.exit_code(),
            class: err.class(),
            message: err.to_string(),
        }
    }
}

fn fmt_prob(value: f64) -> String {
    format!("{value:.6}")
}

fn fmt_labeled(labels: &[String], values: &[f64]) -> String {
    labels
        .iter()
        .zip(values)
        .map(|(label, &value)| format!("{label}={}", fmt_prob(value)))
        .collect::<Vec<_>>()
        .join("  ")
}

fn fmt_grid(row_labels: &[String], rows: &[Vec<f64>]) -> String {
    let width = row_labels.iter().map(|l| l.len()).max().unwrap_or(0);
    row_labels
        .iter()
        .zip(rows)
        .map(|(label, row)| {
            let cells = row
                .iter()
                .map(|&c| fmt_prob(c))
                .collect::<Vec<_>>()
                .join("  ");
            format!("  {label:width$}  {cells}")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub worlds: Vec<String>,
    pub candidates: Vec<CandidateReport>,
    pub second_order: Vec<f64>,
    pub predictive: Vec<f64>,
    pub coherence: Option<CoherenceSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateReport {
    pub name: String,
    pub weights: Vec<f64>,
    pub sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceSection {
    pub claimed: Vec<f64>,
    pub gap: f64,
    pub worst_world: String,
    pub witness: Option<WitnessSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessSection {
    pub world: String,
    pub claimed_price: f64,
    pub fair_price: f64,
    pub buy_price: f64,
    pub sell_price: f64,
    pub expected_profit: f64,
}

pub fn cmd_validate(model: &Model) -> Result<ValidateReport, CliError> {
    let mut warnings = Vec::new();
    let candidates = model
        .candidate_names
        .iter()
        .zip(model.hierarchy.candidates().candidates())
        .map(|(name, candidate)| CandidateReport {
            name: name.clone(),
            weights: candidate.weights().to_vec(),
            sum: candidate.weights().iter().sum(),
        })
        .collect();
    let predictive = model.hierarchy.predictive();

    let coherence = match &model.claimed {
        Some(claimed) => {
            let report = model
                .hierarchy
                .coherence_check(claimed)
                .map_err(|err| CliError::Internal(err.to_string()))?;
            if let Some(witness) = &report.witness {
                warnings.push(format!(
                    "claimed distribution is incoherent: gap {} at world `{}`",
                    fmt_prob(report.gap),
                    model.space.label(witness.world)
                ));
            }
            Some(CoherenceSection {
                claimed: claimed.weights().to_vec(),
                gap: report.gap,
                worst_world: model.space.label(report.worst_world).to_string(),
                witness: report.witness.map(|witness| WitnessSection {
                    world: model.space.label(witness.world).to_string(),
                    claimed_price: witness.claimed_price,
                    fair_price: witness.fair_price,
                    buy_price: witness.buy_price,
                    sell_price: witness.sell_price,
                    expected_profit: witness.expected_profit,
                }),
            })
        }
        None => None,
    };

    Ok(ValidateReport {
        command: "validate",
        status: "ok",
        exit_code: EXIT_OK,
        warnings,
        worlds: model.space.labels().to_vec(),
        candidates,
        second_order: model.hierarchy.weights().to_vec(),
        predictive: predictive.weights().to_vec(),
        coherence,
    })
}

impl ValidateReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "model: {} worlds, {} candidates — all distributions valid\n",
            self.worlds.len(),
            self.candidates.len()
        ));
        for candidate in &self.candidates {
            out.push_str(&format!(
                "  candidate {:10} sum {}  [{}]\n",
                candidate.name,
                fmt_prob(candidate.sum),
                fmt_labeled(&self.worlds, &candidate.weights)
            ));
        }
        out.push_str(&format!(
            "predictive: {}\n",
            fmt_labeled(&self.worlds, &self.predictive)
        ));
        if let Some(coherence) = &self.coherence {
            out.push_str(&format!(
                "claimed:    {}\n",
                fmt_labeled(&self.worlds, &coherence.claimed)
            ));
            out.push_str(&format!(
                "coherence gap: {} (worst world `{}`)\n",
                fmt_prob(coherence.gap),
                coherence.worst_world
            ));
            if let Some(witness) = &coherence.witness {
                out.push_str(&format!(
                    "dutch book: unit bet on `{}` — buy at {}, sell at {}, expected profit {} per unit stake\n",
                    witness.world,
                    fmt_prob(witness.buy_price),
                    fmt_prob(witness.sell_price),
                    fmt_prob(witness.expected_profit)
                ));
            }
        }
        for warning in &self.warnings {
            out.push_str(&format!("warning: {warning}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecideMode {
    First,
    Second,
    Joint,
    All,
}

impl DecideMode {
    pub fn name(&self) -> &'static str {
        match self {
            DecideMode::First => "first",
            DecideMode::Second => "second",
            DecideMode::Joint => "joint",
            DecideMode::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecideReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub mode: &'static str,
    pub acts: Vec<String>,
    pub evaluations: Vec<EvaluationColumn>,
    /// Present only for `--mode all`; true once the three columns agreed.
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationColumn {
    pub mode: &'static str,
    pub values: Vec<f64>,
    pub tied: Vec<usize>,
    pub chosen: usize,
    pub chosen_act: String,
}

fn evaluate(model: &Model, mode: DecideMode) -> Result<EvaluationColumn, CliError> {
    let utilities = model.utilities.as_ref().expect("checked by cmd_decide");
    let belief = match mode {
        DecideMode::First => Belief::FirstOrder(model.hierarchy.predictive()),
        DecideMode::Second => Belief::Hierarchical(model.hierarchy.clone()),
        DecideMode::Joint => Belief::Joint(model.hierarchy.flatten()),
        DecideMode::All => unreachable!("expanded by cmd_decide"),
    };
    let problem = DecisionProblem::new(utilities.clone(), belief).map_err(classify)?;
    let choice: ActChoice = decision::optimal_acts(&problem).map_err(classify)?;
    Ok(EvaluationColumn {
        mode: mode.name(),
        chosen_act: utilities.acts()[choice.chosen].clone(),
        values: choice.values,
        tied: choice.tied,
        chosen: choice.chosen,
    })
}

pub fn cmd_decide(model: &Model, mode: DecideMode) -> Result<DecideReport, CliError> {
    let utilities = model.utilities.as_ref().ok_or_else(|| {
        CliError::Validation("missing section: `utilities` is required by decide".into())
    })?;

    let (evaluations, agreement) = match mode {
        DecideMode::All => {
            let columns = vec![
                evaluate(model, DecideMode::First)?,
                evaluate(model, DecideMode::Second)?,
                evaluate(model, DecideMode::Joint)?,
            ];
            // The agreement assertion must run before anything is printed.
            for later in &columns[1..] {
                for (act, (&a, &b)) in columns[0].values.iter().zip(&later.values).enumerate() {
                    if (a - b).abs() > MODE_AGREEMENT_TOLERANCE {
                        return Err(CliError::Internal(format!(
                            "expected utilities disagree at act {act}: {} vs {} under mode {}",
                            a, b, later.mode
                        )));
                    }
                }
                if later.tied != columns[0].tied {
                    return Err(CliError::Internal(format!(
                        "tied sets disagree: {:?} vs {:?} under mode {}",
                        columns[0].tied, later.tied, later.mode
                    )));
                }
            }
            (columns, Some(true))
        }
        single => (vec![evaluate(model, single)?], None),
    };

    Ok(DecideReport {
        command: "decide",
        status: "ok",
        exit_code: EXIT_OK,
        warnings: Vec::new(),
        mode: mode.name(),
        acts: utilities.acts().to_vec(),
        evaluations,
        agreement,
    })
}

impl DecideReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        let width = self.acts.iter().map(|a| a.len()).max().unwrap_or(0).max(3);
        let header = self
            .evaluations
            .iter()
            .map(|e| format!("{:>12}", e.mode))
            .collect::<Vec<_>>()
            .join("");
        out.push_str(&format!("  {:width$}{header}\n", "act"));
        for (j, act) in self.acts.iter().enumerate() {
            let row = self
                .evaluations
                .iter()
                .map(|e| format!("{:>12}", fmt_prob(e.values[j])))
                .collect::<Vec<_>>()
                .join("");
            out.push_str(&format!("  {act:width$}{row}\n"));
        }
        let first = &self.evaluations[0];
        let tied_names = first
            .tied
            .iter()
            .map(|&j| self.acts[j].as_str())
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("tied: {{{tied_names}}}\n"));
        out.push_str(&format!("chosen: {}\n", first.chosen_act));
        if self.agreement == Some(true) {
            out.push_str("all three evaluations agree\n");
        }
        out
    }
}

// ---------------------------------------------------------------------------
// flatten
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct FlattenReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub candidates: Vec<String>,
    pub worlds: Vec<String>,
    pub grid: Vec<Vec<f64>>,
    pub marginal_world: Vec<f64>,
    pub marginal_model: Vec<f64>,
    pub product_form: bool,
    pub witness: Option<WitnessGrid>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessGrid {
    pub grid: Vec<Vec<f64>>,
    pub marginal_world: Vec<f64>,
    pub marginal_model: Vec<f64>,
    pub product_form: bool,
}

pub fn cmd_flatten(model: &Model) -> Result<FlattenReport, CliError> {
    let joint = model.hierarchy.flatten();
    let marginal_world = joint.marginal_world();
    let marginal_model = joint.marginal_model();

    let witness = match joint.same_marginals_witness() {
        Some(witness) => {
            let world = witness.marginal_world();
            let model_marginal = witness.marginal_model();
            let worlds_match = world
                .weights()
                .iter()
                .zip(marginal_world.weights())
                .all(|(a, b)| (a - b).abs() <= REPORT_TOLERANCE);
            let models_match = model_marginal
                .iter()
                .zip(&marginal_model)
                .all(|(a, b)| (a - b).abs() <= REPORT_TOLERANCE);
            if !worlds_match || !models_match {
                return Err(CliError::Internal(
                    "same-marginals witness failed its marginal re-check".into(),
                ));
            }
            Some(WitnessGrid {
                product_form: witness.is_product_form(REPORT_TOLERANCE),
                marginal_world: world.weights().to_vec(),
                marginal_model: model_marginal,
                grid: witness.rows().to_vec(),
            })
        }
        None => None,
    };

    Ok(FlattenReport {
        command: "flatten",
        status: "ok",
        exit_code: EXIT_OK,
        warnings: Vec::new(),
        candidates: model.candidate_names.clone(),
        worlds: model.space.labels().to_vec(),
        product_form: joint.is_product_form(REPORT_TOLERANCE),
        grid: joint.rows().to_vec(),
        marginal_world: marginal_world.weights().to_vec(),
        marginal_model,
        witness,
    })
}

impl FlattenReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str("joint grid (rows = candidates, columns = worlds):\n");
        out.push_str(&fmt_grid(&self.candidates, &self.grid));
        out.push('\n');
        out.push_str(&format!(
            "marginal over worlds:     {}\n",
            fmt_labeled(&self.worlds, &self.marginal_world)
        ));
        out.push_str(&format!(
            "marginal over candidates: {}\n",
            fmt_labeled(&self.candidates, &self.marginal_model)
        ));
        out.push_str(&format!("product form: {}\n", self.product_form));
        match &self.witness {
            Some(witness) => {
                out.push_str("a different joint with the same marginals:\n");
                out.push_str(&fmt_grid(&self.candidates, &witness.grid));
                out.push('\n');
                out.push_str(&format!(
                    "witness product form: {}\n",
                    witness.product_form
                ));
            }
            None => out.push_str("no same-marginals witness: the marginals pin down the grid\n"),
        }
        out
    }
}

// ---------------------------------------------------------------------------
// jeffrey
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct JeffreyReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub event: String,
    pub initial_probability: f64,
    pub target_probability: f64,
    pub worlds: Vec<String>,
    pub initial: Vec<f64>,
    pub updated: Vec<f64>,
    pub rigidity: bool,
    pub event_probabilities: BTreeMap<String, f64>,
}

pub fn cmd_jeffrey(model: &Model, event_name: &str, to: f64) -> Result<JeffreyReport, CliError> {
    let target = model.event(event_name)?.clone();
    let initial = model.hierarchy.predictive();
    let initial_probability = initial.event_probability(&target).map_err(classify)?;

    let shift = JeffreyShift::new(target.clone(), to).map_err(classify)?;
    let updated = kinematics::jeffrey_update(&initial, &shift).map_err(classify)?;

    let rigidity =
        kinematics::verify_rigidity(&initial, &updated, &target, REPORT_TOLERANCE)
            .map_err(classify)?;
    if !rigidity {
        return Err(CliError::Internal(
            "jeffrey update violated rigidity against its input".into(),
        ));
    }

    let mut event_probabilities = BTreeMap::new();
    for (name, event) in &model.events {
        let p = updated.event_probability(event).map_err(classify)?;
        event_probabilities.insert(name.clone(), p);
    }

    Ok(JeffreyReport {
        command: "jeffrey",
        status: "ok",
        exit_code: EXIT_OK,
        warnings: Vec::new(),
        event: event_name.to_string(),
        initial_probability,
        target_probability: to,
        worlds: model.space.labels().to_vec(),
        initial: initial.weights().to_vec(),
        updated: updated.weights().to_vec(),
        rigidity,
        event_probabilities,
    })
}

impl JeffreyReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "shift `{}` from {} to {}\n",
            self.event,
            fmt_prob(self.initial_probability),
            fmt_prob(self.target_probability)
        ));
        out.push_str(&format!(
            "initial: {}\n",
            fmt_labeled(&self.worlds, &self.initial)
        ));
        out.push_str(&format!(
            "updated: {}\n",
            fmt_labeled(&self.worlds, &self.updated)
        ));
        out.push_str(&format!("rigidity holds: {}\n", self.rigidity));
        for (name, p) in &self.event_probabilities {
            out.push_str(&format!("P_f({name}) = {}\n", fmt_prob(*p)));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// check-c3
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CheckC3Report {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub a: String,
    pub b: String,
    pub x: f64,
    pub matching_candidates: Vec<String>,
    pub conditional_given_match: f64,
    pub conditional_given_target: f64,
    pub deviation: f64,
}

pub fn cmd_check_c3(model: &Model, a: &str, b: &str, x: f64) -> Result<CheckC3Report, CliError> {
    let event_a = model.event(a)?.clone();
    let event_b = model.event(b)?.clone();
    let joint = model.hierarchy.flatten();
    let report = kinematics::c3_report(
        &joint,
        model.hierarchy.candidates(),
        &event_a,
        &event_b,
        x,
    )
    .map_err(classify)?;

    Ok(CheckC3Report {
        command: "check-c3",
        status: "ok",
        exit_code: EXIT_OK,
        warnings: Vec::new(),
        a: a.to_string(),
        b: b.to_string(),
        x,
        matching_candidates: report
            .matching_candidates
            .iter()
            .map(|&i| model.candidate_names[i].clone())
            .collect(),
        conditional_given_match: report.conditional_given_match,
        conditional_given_target: report.conditional_given_target,
        deviation: report.deviation,
    })
}

impl CheckC3Report {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "candidates with P({}) = {}: {}\n",
            self.a,
            self.x,
            self.matching_candidates.join(", ")
        ));
        out.push_str(&format!(
            "P({} | {} and P({}) = {}) = {}\n",
            self.b,
            self.a,
            self.a,
            self.x,
            fmt_prob(self.conditional_given_match)
        ));
        out.push_str(&format!(
            "P({} | {})              = {}\n",
            self.b,
            self.a,
            fmt_prob(self.conditional_given_target)
        ));
        out.push_str(&format!("deviation: {}\n", fmt_prob(self.deviation)));
        out
    }
}

// ---------------------------------------------------------------------------
// sequence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub hypotheses: Vec<String>,
    pub worlds: Vec<String>,
    pub observations: Vec<String>,
    pub trajectory: Vec<TrajectoryStep>,
    pub posterior: Vec<f64>,
    pub next_toss: usize,
    pub predictive: Vec<f64>,
    pub bet: Option<BetSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryStep {
    pub observed: String,
    pub posterior: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetSection {
    pub target: String,
    pub stake: f64,
    pub acts: Vec<String>,
    pub values: Vec<f64>,
    pub tied: Vec<usize>,
    pub chosen: usize,
    pub chosen_act: String,
}

pub fn cmd_sequence(
    model: &Model,
    observe: Option<&[String]>,
    bet: Option<(&str, f64)>,
) -> Result<SequenceReport, CliError> {
    let iid = IIDModel::new(model.hierarchy.clone());

    let observations: Vec<usize> = match observe {
        Some(labels) => {
            let mut indices = Vec::with_capacity(labels.len());
            for label in labels {
                match model.space.index_of(label) {
                    Some(index) => indices.push(index),
                    None => {
                        return Err(CliError::Validation(format!(
                            "unknown world `{label}` in --observe"
                        )))
                    }
                }
            }
            indices
        }
        None => model.observations.clone(),
    };

    let mut trajectory = Vec::with_capacity(observations.len());
    for step in 1..=observations.len() {
        let posterior = iid.posterior(&observations[..step]).map_err(classify)?;
        trajectory.push(TrajectoryStep {
            observed: model.space.label(observations[step - 1]).to_string(),
            posterior: posterior.weights().to_vec(),
        });
    }
    let posterior = iid.posterior(&observations).map_err(classify)?;
    let predictive = posterior.predictive();

    let bet = match bet {
        Some((target_label, stake)) => {
            let target = model.space.index_of(target_label).ok_or_else(|| {
                CliError::Validation(format!("unknown world `{target_label}` in --bet"))
            })?;
            let problem = iid
                .bet_problem(&observations, target, stake)
                .map_err(classify)?;
            let choice = decision::optimal_acts(&problem).map_err(classify)?;
            Some(BetSection {
                target: target_label.to_string(),
                stake,
                acts: problem.utilities().acts().to_vec(),
                chosen_act: problem.utilities().acts()[choice.chosen].clone(),
                values: choice.values,
                tied: choice.tied,
                chosen: choice.chosen,
            })
        }
        None => None,
    };

    Ok(SequenceReport {
        command: "sequence",
        status: "ok",
        exit_code: EXIT_OK,
        warnings: Vec::new(),
        hypotheses: model.candidate_names.clone(),
        worlds: model.space.labels().to_vec(),
        observations: observations
            .iter()
            .map(|&w| model.space.label(w).to_string())
            .collect(),
        trajectory,
        posterior: posterior.weights().to_vec(),
        next_toss: observations.len() + 1,
        predictive: predictive.weights().to_vec(),
        bet,
    })
}

impl SequenceReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "prior over hypotheses updated on {} observation(s)\n",
            self.observations.len()
        ));
        for (step, entry) in self.trajectory.iter().enumerate() {
            out.push_str(&format!(
                "  after toss {} (`{}`): {}\n",
                step + 1,
                entry.observed,
                fmt_labeled(&self.hypotheses, &entry.posterior)
            ));
        }
        out.push_str(&format!(
            "posterior:  {}\n",
            fmt_labeled(&self.hypotheses, &self.posterior)
        ));
        out.push_str(&format!(
            "predictive for toss {}: {}\n",
            self.next_toss,
            fmt_labeled(&self.worlds, &self.predictive)
        ));
        if let Some(bet) = &self.bet {
            out.push_str(&format!(
                "even-money bet on `{}` at stake {}:\n",
                bet.target,
                fmt_prob(bet.stake)
            ));
            for (act, value) in bet.acts.iter().zip(&bet.values) {
                out.push_str(&format!("  {act:12} EU {}\n", fmt_prob(*value)));
            }
            out.push_str(&format!("decision: {}\n", bet.chosen_act));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub command: &'static str,
    pub status: &'static str,
    pub exit_code: i32,
    pub warnings: Vec<String>,
    pub seed: u64,
    pub cases: usize,
    pub suites: Vec<SuiteOutcome>,
    pub passed: bool,
}

pub fn cmd_selftest(seed: u64, cases: usize) -> SelftestReport {
    let suites = selftest::run_all(seed, cases);
    let passed = suites.iter().all(SuiteOutcome::passed);
    SelftestReport {
        command: "selftest",
        status: if passed { "ok" } else { "error" },
        exit_code: if passed { EXIT_OK } else { EXIT_INTERNAL },
        warnings: Vec::new(),
        seed,
        cases,
        suites,
        passed,
    }
}

impl SelftestReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "selftest seed {} with {} cases per suite\n",
            self.seed, self.cases
        ));
        for suite in &self.suites {
            out.push_str(&format!(
                "  {:12} {}  cases {:5}  failures {}  max deviation {:.3e} (tolerance {:.0e})\n",
                suite.name,
                if suite.passed() { "pass" } else { "FAIL" },
                suite.cases,
                suite.failures,
                suite.max_deviation,
                suite.tolerance
            ));
        }
        out.push_str(if self.passed {
            "all suites passed\n"
        } else {
            "SELFTEST FAILED\n"
        });
        out
    }
}
