//! Seeded randomized self-checks, shared by the `selftest` subcommand and
//! the acceptance tests.
//!
//! Every suite draws its instances from its own [`SplitMix64`] stream, so a
//! seed pins the entire run; the default seed is fixed for reproducible
//! reports.

use serde::Serialize;

use crate::decision::{self, Belief, DecisionProblem, UtilityMatrix};
use crate::hierarchy::{CandidateSet, JointDistribution, SecondOrderDistribution};
use crate::kinematics::{self, JeffreyShift};
use crate::prob::{Distribution, Event, OutcomeSpace};
use crate::sequence::IIDModel;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0xD1CE;

/// Small deterministic generator (SplitMix64). Not cryptographic; its
/// stream is fixed by the seed alone, on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

/// Outcome space labelled `w0 .. w{n-1}`.
pub fn indexed_space(n: usize) -> OutcomeSpace {
    OutcomeSpace::new((0..n).map(|i| format!("w{i}"))).unwrap()
}

/// Normalized weights bounded away from zero.
pub fn random_weights(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.uniform(0.05, 1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

pub fn random_distribution(rng: &mut SplitMix64, space: &OutcomeSpace) -> Distribution {
    Distribution::new(space.clone(), random_weights(rng, space.size())).unwrap()
}

/// Hierarchy with 1..=max_m candidates over 1..=max_n worlds.
pub fn random_hierarchy(
    rng: &mut SplitMix64,
    max_m: usize,
    max_n: usize,
) -> SecondOrderDistribution {
    let n = rng.int_in(1, max_n);
    let m = rng.int_in(1, max_m);
    let space = indexed_space(n);
    let candidates = (0..m).map(|_| random_distribution(rng, &space)).collect();
    SecondOrderDistribution::new(
        CandidateSet::new(candidates).unwrap(),
        random_weights(rng, m),
    )
    .unwrap()
}

/// Utility table with 1..=max_k acts and payoffs in [-100, 100].
pub fn random_utilities(rng: &mut SplitMix64, space: &OutcomeSpace, max_k: usize) -> UtilityMatrix {
    let k = rng.int_in(1, max_k);
    let values = (0..k)
        .map(|_| (0..space.size()).map(|_| rng.uniform(-100.0, 100.0)).collect())
        .collect();
    let acts = (0..k).map(|j| format!("act{j}")).collect();
    UtilityMatrix::new(acts, space.clone(), values).unwrap()
}

/// Result of one randomized suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    /// Worst-case tolerance the suite enforces per comparison.
    pub tolerance: f64,
    pub cases: usize,
    pub failures: usize,
    /// Largest deviation observed across all comparisons in the suite.
    pub max_deviation: f64,
}

impl SuiteOutcome {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            failures: 0,
            max_deviation: 0.0,
        }
    }

    // A NaN deviation must count as a failure, hence the negated compare.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn record(&mut self, deviation: f64) {
        if deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
        if !(deviation <= self.tolerance) {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The three expected-utility routes agree act by act, and the tied sets
/// they induce are identical.
pub fn equivalence_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("equivalence", 1e-10);
    for _ in 0..cases {
        outcome.cases += 1;
        let pp = random_hierarchy(&mut rng, 10, 10);
        let utilities = random_utilities(&mut rng, pp.world_space(), 5);
        let joint = pp.flatten();
        let predictive = pp.predictive();
        for act in 0..utilities.act_count() {
            let second = decision::eu_second_order(&pp, &utilities, act).unwrap();
            let via_joint = decision::eu_joint(&joint, &utilities, act).unwrap();
            let via_predictive =
                decision::eu_first_order(&predictive, &utilities, act).unwrap();
            outcome.record((second - via_joint).abs());
            outcome.record((second - via_predictive).abs());
        }

        let tied = |belief: Belief| {
            let problem = DecisionProblem::new(utilities.clone(), belief).unwrap();
            decision::optimal_acts(&problem).unwrap().tied
        };
        let tied_second = tied(Belief::Hierarchical(pp.clone()));
        if tied_second != tied(Belief::Joint(joint)) || tied_second != tied(Belief::FirstOrder(predictive))
        {
            outcome.failures += 1;
        }
    }
    outcome
}

/// Flattening and marginalizing recovers both inputs.
pub fn roundtrip_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("roundtrip", 1e-12);
    for _ in 0..cases {
        outcome.cases += 1;
        let pp = random_hierarchy(&mut rng, 10, 10);
        let joint = pp.flatten();
        for (got, want) in joint.marginal_model().iter().zip(pp.weights()) {
            outcome.record((got - want).abs());
        }
        for (got, want) in joint
            .marginal_world()
            .weights()
            .iter()
            .zip(pp.predictive().weights())
        {
            outcome.record((got - want).abs());
        }
    }
    outcome
}

/// Product-form joints admit a same-marginals witness that matches both
/// marginals, fails the product-form test, and leaves every act's expected
/// utility unchanged.
pub fn witness_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("witness", 1e-12);
    for _ in 0..cases {
        outcome.cases += 1;
        let m = rng.int_in(2, 8);
        let n = rng.int_in(2, 8);
        let space = indexed_space(n);
        let row_marginal = random_weights(&mut rng, m);
        let col_marginal = random_weights(&mut rng, n);
        let grid: Vec<Vec<f64>> = row_marginal
            .iter()
            .map(|&r| col_marginal.iter().map(|&c| r * c).collect())
            .collect();
        let joint = JointDistribution::new(space.clone(), grid).unwrap();
        if !joint.is_product_form(1e-12) {
            outcome.failures += 1;
            continue;
        }
        let witness = match joint.same_marginals_witness() {
            Some(witness) => witness,
            None => {
                // Strictly positive cells always admit one.
                outcome.failures += 1;
                continue;
            }
        };
        for (got, want) in witness.marginal_model().iter().zip(joint.marginal_model()) {
            outcome.record((got - want).abs());
        }
        for (got, want) in witness
            .marginal_world()
            .weights()
            .iter()
            .zip(joint.marginal_world().weights())
        {
            outcome.record((got - want).abs());
        }
        if witness.is_product_form(1e-12) || witness == joint {
            outcome.failures += 1;
        }
        let utilities = random_utilities(&mut rng, &space, 5);
        for act in 0..utilities.act_count() {
            let before = decision::eu_joint(&joint, &utilities, act).unwrap();
            let after = decision::eu_joint(&witness, &utilities, act).unwrap();
            outcome.record((before - after).abs());
        }
    }
    outcome
}

/// Jeffrey updates are rigid against their input and land the target event
/// on the requested probability.
pub fn jeffrey_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("jeffrey", 1e-12);
    for _ in 0..cases {
        outcome.cases += 1;
        let n = rng.int_in(2, 10);
        let space = indexed_space(n);
        let p = random_distribution(&mut rng, &space);
        let split = rng.int_in(1, n - 1);
        let target = Event::new(space, 0..split).unwrap();
        let x = rng.uniform(0.01, 0.99);
        let shift = JeffreyShift::new(target.clone(), x).unwrap();
        let updated = kinematics::jeffrey_update(&p, &shift).unwrap();

        if !kinematics::verify_rigidity(&p, &updated, &target, 1e-12).unwrap() {
            outcome.failures += 1;
        }
        outcome.record((updated.event_probability(&target).unwrap() - x).abs());
    }
    outcome
}

/// The predictive is coherent with its own hierarchy (gap exactly zero),
/// and a claimed distribution perturbed by δ at one world yields gap δ and
/// a witness whose stated profit equals the gap.
pub fn coherence_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("coherence", 1e-12);
    let delta = 0.05;
    for _ in 0..cases {
        outcome.cases += 1;
        let pp = random_hierarchy(&mut rng, 10, 10);
        let predictive = pp.predictive();
        let report = pp.coherence_check(&predictive).unwrap();
        outcome.record(report.gap);
        if report.witness.is_some() {
            outcome.failures += 1;
        }

        if predictive.size() < 2 {
            continue;
        }
        // Move δ of mass from the heaviest world onto another.
        let from = (0..predictive.size())
            .max_by(|&a, &b| {
                predictive
                    .weight(a)
                    .partial_cmp(&predictive.weight(b))
                    .unwrap()
            })
            .unwrap();
        let to = if from == 0 { 1 } else { 0 };
        if predictive.weight(from) - delta <= 0.0 {
            continue;
        }
        let mut weights = predictive.weights().to_vec();
        weights[from] -= delta;
        weights[to] += delta;
        let claimed = Distribution::new(predictive.space().clone(), weights).unwrap();
        let perturbed = pp.coherence_check(&claimed).unwrap();
        outcome.record((perturbed.gap - delta).abs());
        match perturbed.witness {
            Some(witness) => {
                if witness.expected_profit != perturbed.gap {
                    outcome.failures += 1;
                }
            }
            None => outcome.failures += 1,
        }
    }
    outcome
}

/// Posterior updating is order-free and sequentially consistent, and a
/// one-observation posterior equals conditioning the flattened prior on
/// that outcome's column.
pub fn sequence_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = SplitMix64::new(seed);
    let mut outcome = SuiteOutcome::new("sequence", 1e-12);
    for _ in 0..cases {
        outcome.cases += 1;
        let pp = random_hierarchy(&mut rng, 6, 6);
        let model = IIDModel::new(pp);
        let n = model.outcome_space().size();
        let length = rng.int_in(0, 50);
        let observations: Vec<usize> = (0..length).map(|_| rng.int_in(0, n - 1)).collect();

        let forward = model.posterior(&observations).unwrap();
        let mut shuffled = observations.clone();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.int_in(0, i));
        }
        let permuted = model.posterior(&shuffled).unwrap();
        for (a, b) in forward.weights().iter().zip(permuted.weights()) {
            outcome.record((a - b).abs());
        }

        let split = rng.int_in(0, observations.len());
        let (head, tail) = observations.split_at(split);
        let chained = IIDModel::new(model.posterior(head).unwrap())
            .posterior(tail)
            .unwrap();
        for (a, b) in forward.weights().iter().zip(chained.weights()) {
            outcome.record((a - b).abs());
        }

        let single = rng.int_in(0, n - 1);
        let posterior = model.posterior(&[single]).unwrap();
        let column = Event::new(model.outcome_space().clone(), [single]).unwrap();
        let via_joint = model
            .prior()
            .flatten()
            .condition_on_worlds(&column)
            .unwrap()
            .marginal_model();
        for (a, b) in posterior.weights().iter().zip(via_joint) {
            outcome.record((a - b).abs());
        }
    }
    outcome
}

/// Run every suite with per-suite derived seeds.
pub fn run_all(seed: u64, cases: usize) -> Vec<SuiteOutcome> {
    let mut seeder = SplitMix64::new(seed);
    let mut seeds = [0u64; 6];
    for slot in &mut seeds {
        *slot = seeder.next_u64();
    }
    vec![
        equivalence_suite(seeds[0], cases),
        roundtrip_suite(seeds[1], cases),
        witness_suite(seeds[2], cases),
        jeffrey_suite(seeds[3], cases),
        coherence_suite(seeds[4], cases),
        sequence_suite(seeds[5], cases.min(500)),
    ]
}
