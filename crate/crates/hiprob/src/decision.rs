//! Expected-utility evaluation and act selection.
//!
//! The same decision problem can carry its uncertainty as a plain
//! first-order distribution, as a second-order distribution over candidate
//! distributions, or as a joint grid. The three evaluators
//! ([`eu_first_order`], [`eu_second_order`], [`eu_joint`]) differ only in
//! how the sums are grouped, so for a flattened hierarchy they must agree
//! to rounding — which is the point: nothing about the ranking of acts
//! survives the choice of representation.

use crate::error::{Error, Result};
use crate::hierarchy::{JointDistribution, SecondOrderDistribution};
use crate::prob::{Distribution, OutcomeSpace};

/// Acts whose expected utilities sit within this absolute slack of the
/// maximum count as tied; the lowest index among them is chosen.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Utility table: one row of world-indexed payoffs per act.
///
/// Utility depends on the world only, never on a candidate index — a table
/// keyed on candidates would break the agreement between the second-order
/// and joint evaluations for non-product joints.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityMatrix {
    acts: Vec<String>,
    space: OutcomeSpace,
    values: Vec<Vec<f64>>,
}

impl UtilityMatrix {
    pub fn new(acts: Vec<String>, space: OutcomeSpace, values: Vec<Vec<f64>>) -> Result<Self> {
        if acts.is_empty() {
            return Err(Error::NoActs);
        }
        if values.len() != acts.len() {
            return Err(Error::DimensionMismatch {
                detail: format!("{} acts but {} utility rows", acts.len(), values.len()),
            });
        }
        for (act, row) in values.iter().enumerate() {
            if row.len() != space.size() {
                return Err(Error::DimensionMismatch {
                    detail: format!(
                        "utility row for act {} has {} entries, space has {} worlds",
                        act,
                        row.len(),
                        space.size()
                    ),
                });
            }
            for (world, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteUtility { act, world });
                }
            }
        }
        Ok(Self {
            acts,
            space,
            values,
        })
    }

    pub fn acts(&self) -> &[String] {
        &self.acts
    }

    pub fn act_count(&self) -> usize {
        self.acts.len()
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, act: usize, world: usize) -> f64 {
        self.values[act][world]
    }

    fn check_act(&self, act: usize) -> Result<()> {
        if act >= self.act_count() {
            return Err(Error::ActOutOfRange {
                act,
                count: self.act_count(),
            });
        }
        Ok(())
    }
}

/// The uncertainty side of a decision problem, in any of its three forms.
#[derive(Debug, Clone)]
pub enum Belief {
    FirstOrder(Distribution),
    Hierarchical(SecondOrderDistribution),
    Joint(JointDistribution),
}

impl Belief {
    pub fn world_space(&self) -> &OutcomeSpace {
        match self {
            Belief::FirstOrder(p) => p.space(),
            Belief::Hierarchical(pp) => pp.world_space(),
            Belief::Joint(j) => j.world_space(),
        }
    }
}

/// A utility table paired with one belief representation.
#[derive(Debug, Clone)]
pub struct DecisionProblem {
    utilities: UtilityMatrix,
    belief: Belief,
}

impl DecisionProblem {
    pub fn new(utilities: UtilityMatrix, belief: Belief) -> Result<Self> {
        if belief.world_space() != utilities.space() {
            return Err(Error::DimensionMismatch {
                detail: "belief and utilities live on different outcome spaces".into(),
            });
        }
        Ok(Self { utilities, belief })
    }

    pub fn utilities(&self) -> &UtilityMatrix {
        &self.utilities
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }
}

/// `Σ_w p(w) · U(act, w)` — expected utility under a known first-order
/// distribution.
pub fn eu_first_order(p: &Distribution, utilities: &UtilityMatrix, act: usize) -> Result<f64> {
    utilities.check_act(act)?;
    if p.space() != utilities.space() {
        return Err(Error::DimensionMismatch {
            detail: "distribution and utilities live on different outcome spaces".into(),
        });
    }
    Ok(p.weights()
        .iter()
        .zip(&utilities.values()[act])
        .map(|(&pw, &u)| pw * u)
        .sum())
}

/// `Σ_i pp(i) · [Σ_w candidate_i(w) · U(act, w)]` — the candidate-wise
/// expected utilities averaged under the second-order weights.
pub fn eu_second_order(
    pp: &SecondOrderDistribution,
    utilities: &UtilityMatrix,
    act: usize,
) -> Result<f64> {
    utilities.check_act(act)?;
    let mut total = 0.0;
    for (i, candidate) in pp.candidates().candidates().iter().enumerate() {
        total += pp.weight(i) * eu_first_order(candidate, utilities, act)?;
    }
    Ok(total)
}

/// `Σ_{i,w} cell(i, w) · U(act, w)` — expected utility straight off the
/// joint grid. Accepts any valid joint, product-form or not; with
/// world-only utilities the answer depends on the world marginal alone.
pub fn eu_joint(joint: &JointDistribution, utilities: &UtilityMatrix, act: usize) -> Result<f64> {
    utilities.check_act(act)?;
    if joint.world_space() != utilities.space() {
        return Err(Error::DimensionMismatch {
            detail: "joint and utilities live on different outcome spaces".into(),
        });
    }
    let mut total = 0.0;
    for row in joint.rows() {
        for (w, &cell) in row.iter().enumerate() {
            total += cell * utilities.value(act, w);
        }
    }
    Ok(total)
}

/// Result of evaluating every act: the chosen index, the tied set, and the
/// full value column.
#[derive(Debug, Clone, PartialEq)]
pub struct ActChoice {
    /// Lowest index among the tied acts.
    pub chosen: usize,
    /// All acts within [`TIE_TOLERANCE`] of the maximum, ascending.
    pub tied: Vec<usize>,
    /// Expected utility per act, in act order.
    pub values: Vec<f64>,
}

impl ActChoice {
    /// Apply the tie rule to a precomputed value column.
    pub fn from_values(values: Vec<f64>) -> ActChoice {
        debug_assert!(!values.is_empty());
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = values
            .iter()
            .enumerate()
            .filter_map(|(j, &v)| (v >= max - TIE_TOLERANCE).then_some(j))
            .collect();
        ActChoice {
            chosen: tied[0],
            tied,
            values,
        }
    }
}

/// Evaluate every act under the problem's belief representation and pick
/// the best, breaking ties toward the lowest act index.
pub fn optimal_acts(problem: &DecisionProblem) -> Result<ActChoice> {
    let utilities = problem.utilities();
    let mut values = Vec::with_capacity(utilities.act_count());
    for act in 0..utilities.act_count() {
        let value = match problem.belief() {
            Belief::FirstOrder(p) => eu_first_order(p, utilities, act)?,
            Belief::Hierarchical(pp) => eu_second_order(pp, utilities, act)?,
            Belief::Joint(j) => eu_joint(j, utilities, act)?,
        };
        values.push(value);
    }
    Ok(ActChoice::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::CandidateSet;
    use proptest::prelude::*;

    fn space(labels: &[&str]) -> OutcomeSpace {
        OutcomeSpace::new(labels.iter().copied()).unwrap()
    }

    fn die_space() -> OutcomeSpace {
        space(&["one", "two", "three", "four", "five", "six"])
    }

    fn fair_die() -> Distribution {
        Distribution::new(die_space(), vec![1.0 / 6.0; 6]).unwrap()
    }

    fn loaded_die() -> Distribution {
        Distribution::new(die_space(), vec![0.1, 0.5, 0.1, 0.1, 0.1, 0.1]).unwrap()
    }

    /// Even-money bet on `two` plus abstention.
    fn bet_utilities() -> UtilityMatrix {
        UtilityMatrix::new(
            vec!["bet-on-two".into(), "abstain".into()],
            die_space(),
            vec![vec![-1.0, 1.0, -1.0, -1.0, -1.0, -1.0], vec![0.0; 6]],
        )
        .unwrap()
    }

    #[test]
    fn zero_utilities_give_zero_eu() {
        let u = UtilityMatrix::new(
            vec!["a".into(), "b".into()],
            die_space(),
            vec![vec![0.0; 6], vec![0.0; 6]],
        )
        .unwrap();
        for act in 0..2 {
            assert_eq!(eu_first_order(&fair_die(), &u, act).unwrap(), 0.0);
        }
    }

    #[test]
    fn fair_die_even_money_bet() {
        // Oracle: (1/6)(+1) + (5/6)(−1) = −2/3.
        let expected = 1.0 / 6.0 - 5.0 / 6.0;
        let eu = eu_first_order(&fair_die(), &bet_utilities(), 0).unwrap();
        assert!((eu - expected).abs() <= 1e-12);
        assert!((eu + 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn point_mass_eu_reads_off_the_utility() {
        let mut w = vec![0.0; 6];
        w[3] = 1.0;
        let point = Distribution::new(die_space(), w).unwrap();
        let eu = eu_first_order(&point, &bet_utilities(), 0).unwrap();
        assert_eq!(eu, -1.0);
    }

    #[test]
    fn single_candidate_second_order_matches_first_order() {
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![fair_die()]).unwrap(),
            vec![1.0],
        )
        .unwrap();
        let u = bet_utilities();
        let second = eu_second_order(&pp, &u, 0).unwrap();
        let first = eu_first_order(&fair_die(), &u, 0).unwrap();
        assert!((second - first).abs() <= 1e-15);
    }

    #[test]
    fn fair_loaded_mixture_eu() {
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![fair_die(), loaded_die()]).unwrap(),
            vec![0.25, 0.75],
        )
        .unwrap();
        // Oracle: full double sum collapses to 2·(0.25·(1/6) + 0.75·0.5) − 1 = −1/6.
        let mut oracle = 0.0;
        for (i, candidate) in [fair_die(), loaded_die()].iter().enumerate() {
            let mut inner = 0.0;
            for w in 0..6 {
                inner += candidate.weight(w) * if w == 1 { 1.0 } else { -1.0 };
            }
            oracle += pp.weight(i) * inner;
        }
        let eu = eu_second_order(&pp, &bet_utilities(), 0).unwrap();
        assert!((eu - oracle).abs() <= 1e-15);
        assert!((eu + 1.0 / 6.0).abs() <= 1e-12);
    }

    #[test]
    fn second_order_matches_first_order_of_predictive() {
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![fair_die(), loaded_die()]).unwrap(),
            vec![0.25, 0.75],
        )
        .unwrap();
        let u = bet_utilities();
        for act in 0..2 {
            let second = eu_second_order(&pp, &u, act).unwrap();
            let first = eu_first_order(&pp.predictive(), &u, act).unwrap();
            assert!((second - first).abs() <= 1e-10);
        }
    }

    #[test]
    fn joint_of_flatten_matches_second_order() {
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![fair_die(), loaded_die()]).unwrap(),
            vec![0.25, 0.75],
        )
        .unwrap();
        let joint = pp.flatten();
        let u = bet_utilities();
        for act in 0..2 {
            let via_joint = eu_joint(&joint, &u, act).unwrap();
            let via_second = eu_second_order(&pp, &u, act).unwrap();
            assert!((via_joint - via_second).abs() <= 1e-12);
        }
    }

    #[test]
    fn joint_eu_worked_example() {
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.25, 0.25], vec![0.4, 0.1]],
        )
        .unwrap();
        let u = UtilityMatrix::new(
            vec!["call-heads".into()],
            space(&["heads", "tails"]),
            vec![vec![1.0, 0.0]],
        )
        .unwrap();
        // Oracle: 0.25·1 + 0.25·0 + 0.4·1 + 0.1·0 = 0.65.
        let eu = eu_joint(&joint, &u, 0).unwrap();
        assert!((eu - 0.65).abs() <= 1e-12);
    }

    #[test]
    fn constant_utility_row_returns_the_constant() {
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.25, 0.25], vec![0.4, 0.1]],
        )
        .unwrap();
        let u = UtilityMatrix::new(
            vec!["flat".into()],
            space(&["heads", "tails"]),
            vec![vec![7.5, 7.5]],
        )
        .unwrap();
        assert!((eu_joint(&joint, &u, 0).unwrap() - 7.5).abs() <= 1e-12);
    }

    #[test]
    fn act_out_of_range_is_rejected() {
        let err = eu_first_order(&fair_die(), &bet_utilities(), 2).unwrap_err();
        assert_eq!(err, Error::ActOutOfRange { act: 2, count: 2 });
    }

    #[test]
    fn space_mismatch_is_rejected() {
        let p = Distribution::new(space(&["x", "y"]), vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            eu_first_order(&p, &bet_utilities(), 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_utility_is_rejected() {
        let err = UtilityMatrix::new(
            vec!["a".into()],
            space(&["x", "y"]),
            vec![vec![1.0, f64::INFINITY]],
        )
        .unwrap_err();
        assert_eq!(err, Error::NonFiniteUtility { act: 0, world: 1 });
    }

    #[test]
    fn single_act_is_always_chosen() {
        let u = UtilityMatrix::new(vec!["only".into()], die_space(), vec![vec![-5.0; 6]])
            .unwrap();
        let problem = DecisionProblem::new(u, Belief::FirstOrder(fair_die())).unwrap();
        let choice = optimal_acts(&problem).unwrap();
        assert_eq!(choice.chosen, 0);
        assert_eq!(choice.tied, vec![0]);
    }

    #[test]
    fn fair_only_die_prefers_abstaining() {
        let problem =
            DecisionProblem::new(bet_utilities(), Belief::FirstOrder(fair_die())).unwrap();
        let choice = optimal_acts(&problem).unwrap();
        // Oracle: compare −2/3 against 0.
        assert!((choice.values[0] + 2.0 / 3.0).abs() <= 1e-12);
        assert_eq!(choice.values[1], 0.0);
        assert_eq!(choice.chosen, 1);
        assert_eq!(choice.tied, vec![1]);
    }

    #[test]
    fn identical_utility_rows_tie_and_break_low() {
        let u = UtilityMatrix::new(
            vec!["a".into(), "b".into()],
            die_space(),
            vec![vec![2.0; 6], vec![2.0; 6]],
        )
        .unwrap();
        let problem = DecisionProblem::new(u, Belief::FirstOrder(fair_die())).unwrap();
        let choice = optimal_acts(&problem).unwrap();
        assert_eq!(choice.tied, vec![0, 1]);
        assert_eq!(choice.chosen, 0);
    }

    fn arb_instance() -> impl Strategy<
        Value = (SecondOrderDistribution, UtilityMatrix),
    > {
        (1usize..=10, 1usize..=10, 1usize..=5).prop_flat_map(|(m, n, k)| {
            let candidates =
                proptest::collection::vec(proptest::collection::vec(0.01..1.0f64, n), m);
            let pp = proptest::collection::vec(0.01..1.0f64, m);
            let utilities =
                proptest::collection::vec(proptest::collection::vec(-100.0..100.0f64, n), k);
            (candidates, pp, utilities).prop_map(move |(cands, pp, utils)| {
                let labels: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
                let space = OutcomeSpace::new(labels).unwrap();
                let candidates: Vec<Distribution> = cands
                    .into_iter()
                    .map(|raw| {
                        let sum: f64 = raw.iter().sum();
                        Distribution::new(
                            space.clone(),
                            raw.into_iter().map(|w| w / sum).collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let sum: f64 = pp.iter().sum();
                let pp = SecondOrderDistribution::new(
                    CandidateSet::new(candidates).unwrap(),
                    pp.into_iter().map(|w| w / sum).collect(),
                )
                .unwrap();
                let acts = (0..utils.len()).map(|j| format!("act{j}")).collect();
                let u = UtilityMatrix::new(acts, space, utils).unwrap();
                (pp, u)
            })
        })
    }

    proptest! {
        #[test]
        fn three_evaluations_agree((pp, u) in arb_instance()) {
            let joint = pp.flatten();
            let predictive = pp.predictive();
            for act in 0..u.act_count() {
                let second = eu_second_order(&pp, &u, act).unwrap();
                let via_joint = eu_joint(&joint, &u, act).unwrap();
                let via_predictive = eu_first_order(&predictive, &u, act).unwrap();
                prop_assert!((second - via_joint).abs() <= 1e-10);
                prop_assert!((second - via_predictive).abs() <= 1e-10);
            }
        }

        #[test]
        fn tied_sets_agree_across_representations((pp, u) in arb_instance()) {
            let first = DecisionProblem::new(
                u.clone(),
                Belief::FirstOrder(pp.predictive()),
            ).unwrap();
            let second = DecisionProblem::new(
                u.clone(),
                Belief::Hierarchical(pp.clone()),
            ).unwrap();
            let joint = DecisionProblem::new(u, Belief::Joint(pp.flatten())).unwrap();

            let tied_first = optimal_acts(&first).unwrap().tied;
            let tied_second = optimal_acts(&second).unwrap().tied;
            let tied_joint = optimal_acts(&joint).unwrap().tied;
            prop_assert_eq!(&tied_first, &tied_second);
            prop_assert_eq!(&tied_second, &tied_joint);
        }

        #[test]
        fn positive_affine_transform_keeps_the_tied_set(
            (pp, u) in arb_instance(),
            alpha in 0.1..10.0f64,
            beta in -50.0..50.0f64,
        ) {
            let scaled_values: Vec<Vec<f64>> = u
                .values()
                .iter()
                .map(|row| row.iter().map(|&v| alpha * v + beta).collect())
                .collect();
            let scaled = UtilityMatrix::new(
                u.acts().to_vec(),
                u.space().clone(),
                scaled_values,
            ).unwrap();

            let before = optimal_acts(
                &DecisionProblem::new(u, Belief::Hierarchical(pp.clone())).unwrap(),
            ).unwrap();
            let after = optimal_acts(
                &DecisionProblem::new(scaled, Belief::Hierarchical(pp)).unwrap(),
            ).unwrap();
            prop_assert_eq!(before.tied, after.tied);
        }

        #[test]
        fn chosen_act_dominates((pp, u) in arb_instance()) {
            let problem = DecisionProblem::new(u, Belief::Hierarchical(pp)).unwrap();
            let choice = optimal_acts(&problem).unwrap();
            for &value in &choice.values {
                prop_assert!(choice.values[choice.chosen] >= value - TIE_TOLERANCE);
            }
        }
    }
}
