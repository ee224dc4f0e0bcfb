//! Second-order structure: a finite set of candidate first-order
//! distributions, a distribution over the candidates, and the joint view.
//!
//! A [`SecondOrderDistribution`] can always be flattened into a
//! [`JointDistribution`] over candidate-index × world whose marginals
//! recover the second-order weights and the predictive distribution, so
//! nothing the hierarchy can say is lost by working in the joint — though
//! distinct joints can share those marginals (see
//! [`JointDistribution::same_marginals_witness`]).

use crate::error::{Error, Result};
use crate::prob::{check_normalized, check_weights, Distribution, Event, OutcomeSpace};
use crate::prob::ZERO_MASS_TOLERANCE;

/// A quoted first-order distribution whose max-world deviation from the
/// predictive exceeds this bound gets a Dutch-book witness attached.
pub const COHERENCE_TOLERANCE: f64 = 1e-9;

/// An ordered, nonempty collection of candidate distributions sharing one
/// outcome space. Duplicates are allowed and never merged; indexing is by
/// position.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    space: OutcomeSpace,
    candidates: Vec<Distribution>,
}

impl CandidateSet {
    pub fn new(candidates: Vec<Distribution>) -> Result<Self> {
        let first = candidates.first().ok_or(Error::EmptyCandidateSet)?;
        let space = first.space().clone();
        for (i, candidate) in candidates.iter().enumerate() {
            if *candidate.space() != space {
                return Err(Error::DimensionMismatch {
                    detail: format!("candidate {i} lives on a different outcome space"),
                });
            }
        }
        Ok(Self { space, candidates })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidates(&self) -> &[Distribution] {
        &self.candidates
    }

    pub fn candidate(&self, index: usize) -> &Distribution {
        &self.candidates[index]
    }
}

/// A probability distribution over the candidates of a [`CandidateSet`],
/// indexed by candidate position. Weight vectors obey the same invariants
/// as first-order distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderDistribution {
    candidates: CandidateSet,
    weights: Vec<f64>,
}

impl SecondOrderDistribution {
    pub fn new(candidates: CandidateSet, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, candidates.candidate_count())?;
        check_normalized(weights.iter().sum())?;
        Ok(Self {
            candidates,
            weights,
        })
    }

    pub fn uniform(candidates: CandidateSet) -> Self {
        let m = candidates.candidate_count();
        Self {
            candidates,
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub(crate) fn from_validated(candidates: CandidateSet, weights: Vec<f64>) -> Self {
        debug_assert!(check_weights(&weights, candidates.candidate_count()).is_ok());
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        Self {
            candidates,
            weights,
        }
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn world_space(&self) -> &OutcomeSpace {
        self.candidates.space()
    }

    pub fn candidate_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// The expectation of the candidates under the second-order weights:
    /// `predictive(w) = Σ_i weight(i) · candidate_i(w)`.
    ///
    /// This is the unique first-order distribution a coherent agent can
    /// quote, and it equals `flatten().marginal_world()` term for term —
    /// the summation here runs over candidates in index order, exactly as
    /// the column sums of the flattened grid do.
    pub fn predictive(&self) -> Distribution {
        let n = self.world_space().size();
        let mut out = vec![0.0; n];
        for (i, candidate) in self.candidates.candidates().iter().enumerate() {
            let pi = self.weights[i];
            for (w, slot) in out.iter_mut().enumerate() {
                *slot += pi * candidate.weight(w);
            }
        }
        Distribution::from_validated(self.world_space().clone(), out)
    }

    /// Lay the hierarchy out as a joint grid:
    /// `cell(i, w) = weight(i) · candidate_i(w)`.
    pub fn flatten(&self) -> JointDistribution {
        let rows = self
            .candidates
            .candidates()
            .iter()
            .enumerate()
            .map(|(i, candidate)| {
                let pi = self.weights[i];
                candidate.weights().iter().map(|&cw| pi * cw).collect()
            })
            .collect();
        JointDistribution::from_validated(self.world_space().clone(), rows)
    }

    /// Compare a quoted first-order distribution against the predictive.
    ///
    /// The gap is the largest per-world price difference. When it exceeds
    /// [`COHERENCE_TOLERANCE`] the report carries a witness: a unit bet on
    /// the worst world, bought at the cheaper of the two prices and sold at
    /// the dearer, for a guaranteed expected profit of `gap` per unit stake
    /// under this hierarchy's own evaluation.
    pub fn coherence_check(&self, claimed: &Distribution) -> Result<CoherenceReport> {
        if claimed.space() != self.world_space() {
            return Err(Error::DimensionMismatch {
                detail: "claimed distribution lives on a different outcome space".into(),
            });
        }
        let predictive = self.predictive();
        let mut gap = 0.0;
        let mut worst_world = 0;
        for w in 0..claimed.size() {
            let diff = (claimed.weight(w) - predictive.weight(w)).abs();
            if diff > gap {
                gap = diff;
                worst_world = w;
            }
        }
        let witness = (gap > COHERENCE_TOLERANCE).then(|| {
            let claimed_price = claimed.weight(worst_world);
            let fair_price = predictive.weight(worst_world);
            DutchBookWitness {
                world: worst_world,
                claimed_price,
                fair_price,
                buy_price: claimed_price.min(fair_price),
                sell_price: claimed_price.max(fair_price),
                expected_profit: (claimed_price - fair_price).abs(),
            }
        });
        Ok(CoherenceReport {
            predictive,
            gap,
            worst_world,
            witness,
        })
    }
}

/// Outcome of checking a quoted distribution against the predictive.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub predictive: Distribution,
    /// max over worlds of |claimed(w) − predictive(w)|.
    pub gap: f64,
    /// World attaining the gap (lowest index on ties).
    pub worst_world: usize,
    /// Present exactly when the gap exceeds [`COHERENCE_TOLERANCE`].
    pub witness: Option<DutchBookWitness>,
}

/// A single side bet that turns an incoherent quote into sure expected
/// profit: buy the unit bet on `world` at `buy_price`, sell it at
/// `sell_price`. One of the two prices is the agent's quote, the other is
/// the hierarchy's fair price.
#[derive(Debug, Clone)]
pub struct DutchBookWitness {
    pub world: usize,
    pub claimed_price: f64,
    pub fair_price: f64,
    pub buy_price: f64,
    pub sell_price: f64,
    /// Equals the coherence gap: sell price minus buy price per unit stake.
    pub expected_profit: f64,
}

/// A joint distribution over candidate-index × world, stored as an m×n
/// grid. Row `i` belongs to candidate index `i`, column `w` to the world
/// labelled by the space.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    worlds: OutcomeSpace,
    rows: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(worlds: OutcomeSpace, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        let n = worlds.size();
        let mut total = 0.0;
        for row in &rows {
            check_weights(row, n)?;
            total += row.iter().sum::<f64>();
        }
        check_normalized(total)?;
        Ok(Self { worlds, rows })
    }

    pub(crate) fn from_validated(worlds: OutcomeSpace, rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(!rows.is_empty());
        debug_assert!(rows.iter().all(|r| check_weights(r, worlds.size()).is_ok()));
        debug_assert!(
            (rows.iter().flatten().sum::<f64>() - 1.0).abs() <= 1e-6,
            "joint mass drifted from 1"
        );
        Self { worlds, rows }
    }

    pub fn world_space(&self) -> &OutcomeSpace {
        &self.worlds
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.worlds.size()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, column: usize) -> f64 {
        self.rows[row][column]
    }

    /// Column sums: the first-order marginal over worlds.
    pub fn marginal_world(&self) -> Distribution {
        let mut out = vec![0.0; self.column_count()];
        for row in &self.rows {
            for (w, slot) in out.iter_mut().enumerate() {
                *slot += row[w];
            }
        }
        Distribution::from_validated(self.worlds.clone(), out)
    }

    /// Row sums: the marginal over candidate indices.
    pub fn marginal_model(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().sum()).collect()
    }

    /// True when every cell equals the product of its row and column sums
    /// within `tolerance` — i.e. the two marginals are independent and the
    /// grid carries no information beyond them.
    pub fn is_product_form(&self, tolerance: f64) -> bool {
        let row_sums = self.marginal_model();
        let col_sums = self.marginal_world();
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(w, &cell)| (cell - row_sums[i] * col_sums.weight(w)).abs() <= tolerance)
        })
    }

    /// A different joint with identical row and column sums, when one
    /// exists: the lexicographically first 2×2 rectangle of strictly
    /// positive cells is shifted by ε = half its smallest cell — added on
    /// the main diagonal, removed on the anti-diagonal. Returns `None` when
    /// every 2×2 rectangle touches a zero cell (in particular for single
    /// rows or columns, where the marginals pin down the grid).
    pub fn same_marginals_witness(&self) -> Option<JointDistribution> {
        let (m, n) = (self.row_count(), self.column_count());
        for i1 in 0..m {
            for i2 in (i1 + 1)..m {
                for w1 in 0..n {
                    for w2 in (w1 + 1)..n {
                        let cells = [
                            self.rows[i1][w1],
                            self.rows[i1][w2],
                            self.rows[i2][w1],
                            self.rows[i2][w2],
                        ];
                        if cells.iter().all(|&c| c > 0.0) {
                            let epsilon = 0.5 * cells.iter().cloned().fold(f64::INFINITY, f64::min);
                            let mut rows = self.rows.clone();
                            rows[i1][w1] += epsilon;
                            rows[i1][w2] -= epsilon;
                            rows[i2][w1] -= epsilon;
                            rows[i2][w2] += epsilon;
                            return Some(JointDistribution::from_validated(
                                self.worlds.clone(),
                                rows,
                            ));
                        }
                    }
                }
            }
        }
        None
    }

    /// Condition on a world event: columns outside the event are zeroed and
    /// the remaining mass is rescaled to 1.
    pub fn condition_on_worlds(&self, event: &Event) -> Result<JointDistribution> {
        if event.space() != &self.worlds {
            return Err(Error::DimensionMismatch {
                detail: "event lives on a different outcome space than the joint".into(),
            });
        }
        let mass: f64 = self
            .rows
            .iter()
            .map(|row| event.indices().map(|w| row[w]).sum::<f64>())
            .sum();
        if mass <= ZERO_MASS_TOLERANCE {
            return Err(Error::ZeroProbabilityEvent);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(w, &c)| if event.contains(w) { c / mass } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(JointDistribution::from_validated(self.worlds.clone(), rows))
    }

    /// Condition on a set of rows (`keep[i]` marks row `i` as retained).
    pub fn condition_on_rows(&self, keep: &[bool]) -> Result<JointDistribution> {
        if keep.len() != self.row_count() {
            return Err(Error::DimensionMismatch {
                detail: format!(
                    "row mask has length {}, joint has {} rows",
                    keep.len(),
                    self.row_count()
                ),
            });
        }
        let mass: f64 = self
            .rows
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(row, _)| row.iter().sum::<f64>())
            .sum();
        if mass <= ZERO_MASS_TOLERANCE {
            return Err(Error::ZeroProbabilityEvent);
        }
        let rows = self
            .rows
            .iter()
            .zip(keep)
            .map(|(row, &k)| {
                if k {
                    row.iter().map(|&c| c / mass).collect()
                } else {
                    vec![0.0; self.column_count()]
                }
            })
            .collect();
        Ok(JointDistribution::from_validated(self.worlds.clone(), rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(labels: &[&str]) -> OutcomeSpace {
        OutcomeSpace::new(labels.iter().copied()).unwrap()
    }

    fn dist(s: &OutcomeSpace, weights: &[f64]) -> Distribution {
        Distribution::new(s.clone(), weights.to_vec()).unwrap()
    }

    /// The two-candidate coin model used across the crate's fixtures.
    fn coin_hierarchy() -> SecondOrderDistribution {
        let s = space(&["heads", "tails"]);
        let candidates =
            CandidateSet::new(vec![dist(&s, &[0.5, 0.5]), dist(&s, &[0.8, 0.2])]).unwrap();
        SecondOrderDistribution::new(candidates, vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn empty_candidate_set_is_rejected() {
        assert_eq!(
            CandidateSet::new(vec![]).unwrap_err(),
            Error::EmptyCandidateSet
        );
    }

    #[test]
    fn mixed_space_candidates_are_rejected() {
        let a = dist(&space(&["x", "y"]), &[0.5, 0.5]);
        let b = dist(&space(&["u", "v"]), &[0.5, 0.5]);
        assert!(matches!(
            CandidateSet::new(vec![a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_candidate_flatten_is_one_row() {
        let s = space(&["a", "b", "c"]);
        let c = dist(&s, &[0.2, 0.3, 0.5]);
        let candidates = CandidateSet::new(vec![c.clone()]).unwrap();
        let pp = SecondOrderDistribution::new(candidates, vec![1.0]).unwrap();
        let joint = pp.flatten();
        assert_eq!(joint.row_count(), 1);
        assert_eq!(joint.rows()[0], c.weights());
    }

    #[test]
    fn coin_flatten_grid() {
        // Oracle: elementwise products 0.5·[0.5,0.5] and 0.5·[0.8,0.2].
        let joint = coin_hierarchy().flatten();
        let expected = [[0.25, 0.25], [0.4, 0.1]];
        for (i, row) in expected.iter().enumerate() {
            for (w, want) in row.iter().enumerate() {
                assert!((joint.cell(i, w) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_weight_candidate_gives_zero_row() {
        let s = space(&["a", "b"]);
        let candidates =
            CandidateSet::new(vec![dist(&s, &[0.5, 0.5]), dist(&s, &[0.9, 0.1])]).unwrap();
        let pp = SecondOrderDistribution::new(candidates, vec![1.0, 0.0]).unwrap();
        let joint = pp.flatten();
        assert_eq!(joint.rows()[1], vec![0.0, 0.0]);
    }

    #[test]
    fn predictive_of_single_candidate_is_the_candidate() {
        let s = space(&["a", "b", "c"]);
        let c = dist(&s, &[0.2, 0.3, 0.5]);
        let pp =
            SecondOrderDistribution::new(CandidateSet::new(vec![c.clone()]).unwrap(), vec![1.0])
                .unwrap();
        assert_eq!(pp.predictive().weights(), c.weights());
    }

    #[test]
    fn coin_predictive() {
        // Oracle: 0.5·0.5 + 0.5·0.8 = 0.65 and 0.5·0.5 + 0.5·0.2 = 0.35.
        let p = coin_hierarchy().predictive();
        assert!((p.weight(0) - 0.65).abs() <= 1e-12);
        assert!((p.weight(1) - 0.35).abs() <= 1e-12);
    }

    #[test]
    fn predictive_of_mirrored_pair_is_uniform() {
        let s = space(&["a", "b"]);
        let candidates =
            CandidateSet::new(vec![dist(&s, &[0.3, 0.7]), dist(&s, &[0.7, 0.3])]).unwrap();
        let pp = SecondOrderDistribution::new(candidates, vec![0.5, 0.5]).unwrap();
        let p = pp.predictive();
        assert!((p.weight(0) - 0.5).abs() <= 1e-12);
        assert!((p.weight(1) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn marginal_world_of_flatten_is_predictive_bit_for_bit() {
        let pp = coin_hierarchy();
        assert_eq!(
            pp.flatten().marginal_world().weights(),
            pp.predictive().weights()
        );
    }

    #[test]
    fn marginal_world_is_column_sums() {
        // Oracle: column sums of the grid.
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.25, 0.25], vec![0.4, 0.1]],
        )
        .unwrap();
        let mw = joint.marginal_world();
        assert!((mw.weight(0) - 0.65).abs() <= 1e-12);
        assert!((mw.weight(1) - 0.35).abs() <= 1e-12);
    }

    #[test]
    fn marginal_model_is_row_sums() {
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.25, 0.25], vec![0.4, 0.1]],
        )
        .unwrap();
        let mm = joint.marginal_model();
        assert!((mm[0] - 0.5).abs() <= 1e-12);
        assert!((mm[1] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn marginal_model_recovers_second_order_weights() {
        let pp = coin_hierarchy();
        let mm = pp.flatten().marginal_model();
        for (got, want) in mm.iter().zip(pp.weights()) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_candidate_marginal_model_is_unit() {
        let s = space(&["a", "b"]);
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![dist(&s, &[0.4, 0.6])]).unwrap(),
            vec![1.0],
        )
        .unwrap();
        let mm = pp.flatten().marginal_model();
        assert!((mm[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn outer_product_grid_is_product_form() {
        // rows ∝ [0.5, 0.5], columns ∝ [0.65, 0.35].
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.325, 0.175], vec![0.325, 0.175]],
        )
        .unwrap();
        assert!(joint.is_product_form(1e-12));
    }

    #[test]
    fn perturbed_grid_is_not_product_form() {
        // Oracle: 0.30 ≠ 0.5 × 0.65 = 0.325 (and likewise the other cells).
        let joint = JointDistribution::new(
            space(&["heads", "tails"]),
            vec![vec![0.30, 0.20], vec![0.35, 0.15]],
        )
        .unwrap();
        assert!(!joint.is_product_form(1e-12));
    }

    #[test]
    fn coin_flatten_is_not_product_form() {
        // The flattened coin grid couples candidate and world: cell (0,0)
        // is 0.25 while the marginals multiply to 0.5 × 0.65 = 0.325.
        let joint = coin_hierarchy().flatten();
        assert!(!joint.is_product_form(1e-12));
        assert!(joint.is_product_form(0.1));
    }

    #[test]
    fn single_row_and_single_column_joints_are_product_form() {
        let row = JointDistribution::new(space(&["a", "b", "c"]), vec![vec![0.2, 0.3, 0.5]])
            .unwrap();
        assert!(row.is_product_form(1e-12));

        let column = JointDistribution::new(
            space(&["only"]),
            vec![vec![0.25], vec![0.5], vec![0.25]],
        )
        .unwrap();
        assert!(column.is_product_form(1e-12));
    }

    #[test]
    fn witness_shifts_the_first_positive_rectangle() {
        let joint = coin_hierarchy().flatten();
        let witness = joint.same_marginals_witness().unwrap();
        // Oracle: ε = 0.1/2 = 0.05 moved along the diagonal.
        let expected = [[0.30, 0.20], [0.35, 0.15]];
        for (i, row) in expected.iter().enumerate() {
            for (w, want) in row.iter().enumerate() {
                assert!((witness.cell(i, w) - want).abs() <= 1e-12);
            }
        }
        // Oracle: recomputed row and column sums are unchanged.
        let mm = witness.marginal_model();
        assert!((mm[0] - 0.5).abs() <= 1e-12 && (mm[1] - 0.5).abs() <= 1e-12);
        let mw = witness.marginal_world();
        assert!((mw.weight(0) - 0.65).abs() <= 1e-12);
        assert!((mw.weight(1) - 0.35).abs() <= 1e-12);
    }

    #[test]
    fn single_row_joint_has_no_witness() {
        let joint =
            JointDistribution::new(space(&["a", "b", "c"]), vec![vec![0.2, 0.3, 0.5]]).unwrap();
        assert!(joint.same_marginals_witness().is_none());
    }

    #[test]
    fn single_column_joint_has_no_witness() {
        let joint =
            JointDistribution::new(space(&["only"]), vec![vec![0.5], vec![0.5]]).unwrap();
        assert!(joint.same_marginals_witness().is_none());
    }

    #[test]
    fn diagonal_support_has_no_witness() {
        // Every 2×2 rectangle touches a zero cell.
        let joint = JointDistribution::new(
            space(&["a", "b"]),
            vec![vec![0.5, 0.0], vec![0.0, 0.5]],
        )
        .unwrap();
        assert!(joint.same_marginals_witness().is_none());
    }

    #[test]
    fn coherent_claim_has_zero_gap_and_no_witness() {
        let pp = coin_hierarchy();
        let report = pp.coherence_check(&pp.predictive()).unwrap();
        assert_eq!(report.gap, 0.0);
        assert!(report.witness.is_none());
    }

    #[test]
    fn incoherent_claim_gets_a_dutch_book_witness() {
        let pp = coin_hierarchy();
        let claimed = dist(&space(&["heads", "tails"]), &[0.7, 0.3]);
        let report = pp.coherence_check(&claimed).unwrap();
        // Oracle: |0.7 − 0.65| = |0.3 − 0.35| = 0.05. The two deviations
        // differ only in rounding; the float argmax lands on world 1.
        assert!((report.gap - 0.05).abs() <= 1e-12);
        assert_eq!(report.worst_world, 1);
        let witness = report.witness.unwrap();
        assert_eq!(witness.world, report.worst_world);
        assert_eq!(witness.expected_profit, report.gap);
        assert!((witness.buy_price - 0.3).abs() <= 1e-12);
        assert!((witness.sell_price - 0.35).abs() <= 1e-12);
        assert_eq!(witness.claimed_price, witness.buy_price);
        assert_eq!(witness.fair_price, witness.sell_price);
    }

    #[test]
    fn single_candidate_claiming_itself_is_coherent() {
        let s = space(&["a", "b"]);
        let c = dist(&s, &[0.4, 0.6]);
        let pp = SecondOrderDistribution::new(
            CandidateSet::new(vec![c.clone()]).unwrap(),
            vec![1.0],
        )
        .unwrap();
        let report = pp.coherence_check(&c).unwrap();
        assert_eq!(report.gap, 0.0);
    }

    #[test]
    fn coherence_check_rejects_foreign_space() {
        let pp = coin_hierarchy();
        let claimed = dist(&space(&["x", "y"]), &[0.5, 0.5]);
        assert!(matches!(
            pp.coherence_check(&claimed),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn joint_constructor_validates_mass() {
        let err = JointDistribution::new(
            space(&["a", "b"]),
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn condition_on_worlds_keeps_only_the_event_columns() {
        let joint = coin_hierarchy().flatten();
        let heads = Event::new(joint.world_space().clone(), [0]).unwrap();
        let conditioned = joint.condition_on_worlds(&heads).unwrap();
        // Mass inside the column was 0.65; rows rescale to 0.25/0.65 and 0.4/0.65.
        assert!((conditioned.cell(0, 0) - 0.25 / 0.65).abs() <= 1e-12);
        assert!((conditioned.cell(1, 0) - 0.4 / 0.65).abs() <= 1e-12);
        assert_eq!(conditioned.cell(0, 1), 0.0);
        assert_eq!(conditioned.cell(1, 1), 0.0);
    }

    #[test]
    fn condition_on_rows_rescales_kept_rows() {
        let joint = coin_hierarchy().flatten();
        let conditioned = joint.condition_on_rows(&[false, true]).unwrap();
        assert_eq!(conditioned.rows()[0], vec![0.0, 0.0]);
        assert!((conditioned.cell(1, 0) - 0.8).abs() <= 1e-12);
        assert!((conditioned.cell(1, 1) - 0.2).abs() <= 1e-12);
    }

    #[test]
    fn condition_on_empty_mass_fails() {
        let joint = coin_hierarchy().flatten();
        assert_eq!(
            joint.condition_on_rows(&[false, false]).unwrap_err(),
            Error::ZeroProbabilityEvent
        );
    }

    fn arb_hierarchy(max_m: usize, max_n: usize) -> impl Strategy<Value = SecondOrderDistribution> {
        (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
            let candidate_weights =
                proptest::collection::vec(proptest::collection::vec(0.01..1.0f64, n), m);
            let second_order = proptest::collection::vec(0.01..1.0f64, m);
            (candidate_weights, second_order).prop_map(move |(cands, pp)| {
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
                SecondOrderDistribution::new(
                    CandidateSet::new(candidates).unwrap(),
                    pp.into_iter().map(|w| w / sum).collect(),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn flatten_roundtrip_recovers_both_marginals(pp in arb_hierarchy(10, 10)) {
            let joint = pp.flatten();
            let model = joint.marginal_model();
            for (got, want) in model.iter().zip(pp.weights()) {
                prop_assert!((got - want).abs() <= 1e-12);
            }
            let world = joint.marginal_world();
            let predictive = pp.predictive();
            for (got, want) in world.weights().iter().zip(predictive.weights()) {
                prop_assert!((got - want).abs() <= 1e-12);
            }
        }

        #[test]
        fn witness_preserves_marginals_and_differs(pp in arb_hierarchy(6, 6)) {
            let joint = pp.flatten();
            if let Some(witness) = joint.same_marginals_witness() {
                let wm = witness.marginal_model();
                for (got, want) in wm.iter().zip(joint.marginal_model()) {
                    prop_assert!((got - want).abs() <= 1e-12);
                }
                for (got, want) in witness
                    .marginal_world()
                    .weights()
                    .iter()
                    .zip(joint.marginal_world().weights())
                {
                    prop_assert!((got - want).abs() <= 1e-12);
                }
                // The generator keeps every cell positive, so the chosen
                // rectangle is the upper-left one; its half-min-cell shift
                // must show up at least at half strength.
                let epsilon = 0.5
                    * [
                        joint.cell(0, 0),
                        joint.cell(0, 1),
                        joint.cell(1, 0),
                        joint.cell(1, 1),
                    ]
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                let max_cell_diff = witness
                    .rows()
                    .iter()
                    .flatten()
                    .zip(joint.rows().iter().flatten())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                prop_assert!(max_cell_diff >= epsilon / 2.0);
            }
        }

        #[test]
        fn outer_products_pass_product_form_and_their_witnesses_fail(
            rows in proptest::collection::vec(0.05..1.0f64, 2..6),
            cols in proptest::collection::vec(0.05..1.0f64, 2..6),
        ) {
            let row_total: f64 = rows.iter().sum();
            let col_total: f64 = cols.iter().sum();
            let labels: Vec<String> = (0..cols.len()).map(|i| format!("w{i}")).collect();
            let space = OutcomeSpace::new(labels).unwrap();
            let grid: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| cols.iter().map(|c| (r / row_total) * (c / col_total)).collect())
                .collect();
            let joint = JointDistribution::new(space, grid).unwrap();
            prop_assert!(joint.is_product_form(1e-12));

            let witness = joint.same_marginals_witness().unwrap();
            prop_assert!(!witness.is_product_form(1e-12));
        }

        #[test]
        fn coherence_gap_is_exactly_zero_on_the_predictive(pp in arb_hierarchy(8, 8)) {
            let report = pp.coherence_check(&pp.predictive()).unwrap();
            prop_assert_eq!(report.gap, 0.0);
            prop_assert!(report.witness.is_none());
        }
    }
}
