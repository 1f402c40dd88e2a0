//! Minimum-cost resilient actuator and sensor placement.
//!
//! Dedicated actuators complement the pivot rows of a normalized stair form
//! of the pencil pattern A - lambda*E; dedicated sensors complement the pivot
//! columns. A k-resilient design is the union of k+1 base solutions. Among
//! pivot alternatives, picking the collection with the largest summed weight
//! minimizes the placement cost of the complement; candidates of distinct
//! step differences never share rows or columns, so the per-difference
//! maximum is exact.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cost::CostSpec;
use crate::scalar::{s, to_f64, Scalar};
use crate::pattern::{lambda_pattern, PencilPattern, SelectivePattern};
use crate::stair::{
    enumerate_pivot_choices, is_ramp, normalize_with_choice, pivot_candidates, stair_decompose,
    Pivot, RampWitness, StairForm, StairMode,
};
use crate::SolveError;

/// Outcome of the structural ramp certificate. The certificate is
/// sufficient: absence of a ramp never refutes the semantic property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertStatus {
    Certified,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    Actuation,
    Sensing,
}

/// A dedicated placement: state labels receiving one dedicated device each.
///
/// `indices` lists 1-based state labels, the base solution repeated k+1
/// times in copy order; for `Actuation` the device is an identity column of
/// B at that state's row, for `Sensing` an identity row of C at that state's
/// column.
#[derive(Clone, Debug, PartialEq)]
pub struct DedicatedSolution<S: Scalar> {
    pub kind: SolutionKind,
    pub indices: Vec<usize>,
    pub base: Vec<usize>,
    pub pivots: Vec<Pivot>,
    pub cost: S,
    pub k: usize,
    pub n: usize,
    /// True when every pivot choice yields the same index set.
    pub unique: bool,
}

impl<S: Scalar> Serialize for DedicatedSolution<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut st = serializer.serialize_struct("DedicatedSolution", 6)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("indices", &self.indices)?;
        let pivot_rows: Vec<usize> = match self.kind {
            SolutionKind::Actuation => self.pivots.iter().map(|p| p.orig_row + 1).collect(),
            SolutionKind::Sensing => self.pivots.iter().map(|p| p.orig_col + 1).collect(),
        };
        st.serialize_field("pivot_rows", &pivot_rows)?;
        let cost = to_f64(self.cost);
        st.serialize_field("cost", &cost)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("unique", &self.unique)?;
        st.end()
    }
}

impl<S: Scalar> DedicatedSolution<S> {
    /// Number of effective (placed) devices.
    pub fn effective_count(&self) -> usize {
        self.indices.len()
    }

    /// Materializes the placement as a selective pattern in the padded
    /// (k+1)n frame: identity columns (rows) at the listed states, trailing
    /// zero columns (rows).
    pub fn materialize(&self) -> SelectivePattern {
        let n = self.n;
        let frame = (self.k + 1) * n;
        match self.kind {
            SolutionKind::Actuation => SelectivePattern::from_fn(n, frame, |r, c| {
                if c < self.indices.len() && self.indices[c] - 1 == r {
                    crate::pattern::PatternEntry::Nonzero
                } else {
                    crate::pattern::PatternEntry::Zero
                }
            }),
            SolutionKind::Sensing => SelectivePattern::from_fn(frame, n, |r, c| {
                if r < self.indices.len() && self.indices[r] - 1 == c {
                    crate::pattern::PatternEntry::Nonzero
                } else {
                    crate::pattern::PatternEntry::Zero
                }
            }),
        }
    }

    /// Materializes only the effective columns (rows): an n x p identity
    /// selection without zero padding.
    pub fn materialize_effective(&self) -> SelectivePattern {
        let n = self.n;
        let p = self.indices.len().max(1);
        match self.kind {
            SolutionKind::Actuation => SelectivePattern::from_fn(n, p, |r, c| {
                if c < self.indices.len() && self.indices[c] - 1 == r {
                    crate::pattern::PatternEntry::Nonzero
                } else {
                    crate::pattern::PatternEntry::Zero
                }
            }),
            SolutionKind::Sensing => SelectivePattern::from_fn(p, n, |r, c| {
                if r < self.indices.len() && self.indices[r] - 1 == c {
                    crate::pattern::PatternEntry::Nonzero
                } else {
                    crate::pattern::PatternEntry::Zero
                }
            }),
        }
    }
}

/// Shared stair analysis of a pencil pattern.
#[derive(Clone, Debug)]
pub struct PlacementContext {
    pub lambda: SelectivePattern,
    pub stair: StairForm,
    pub candidates: Vec<Vec<(usize, usize)>>,
}

impl PlacementContext {
    pub fn new(pencil: &PencilPattern, mode: StairMode) -> Result<Self, SolveError> {
        if pencil.n() == 0 {
            return Err(SolveError::EmptyProblem);
        }
        let lambda = lambda_pattern(pencil);
        let stair = stair_decompose(&lambda, mode);
        let candidates = pivot_candidates(&stair);
        Ok(PlacementContext { lambda, stair, candidates })
    }

    /// Number of pivoted step differences under any maximal assignment.
    pub fn pivot_count(&self) -> usize {
        self.candidates.iter().filter(|c| !c.is_empty()).count()
    }

    /// Per-difference choice maximizing `score`, ties to the candidate with
    /// the smallest (orig_row, orig_col).
    pub fn best_choice<S: Scalar>(
        &self,
        score: impl Fn(usize, (usize, usize)) -> S,
    ) -> Vec<Option<(usize, usize)>> {
        self.candidates
            .iter()
            .enumerate()
            .map(|(d, cands)| {
                let mut best: Option<((usize, usize), S)> = None;
                for &cell in cands {
                    let sc = score(d, cell);
                    match &best {
                        Some((_, bs)) if sc <= *bs => {}
                        _ => best = Some((cell, sc)),
                    }
                }
                best.map(|(cell, _)| cell)
            })
            .collect()
    }

    /// True when the actuated (sensed) set is independent of the pivot
    /// choice: every step difference's candidates agree on the relevant axis.
    fn unique_on(&self, rows: bool) -> bool {
        self.candidates.iter().all(|cands| {
            cands
                .iter()
                .map(|&(r, c)| if rows { r } else { c })
                .collect::<std::collections::BTreeSet<_>>()
                .len()
                <= 1
        })
    }
}

fn complement(n: usize, taken: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut placed = vec![false; n];
    for t in taken {
        placed[t] = true;
    }
    (0..n).filter(|&i| !placed[i]).map(|i| i + 1).collect()
}

pub(crate) fn solution_from_choice<S: Scalar>(
    ctx: &PlacementContext,
    choice: &[Option<(usize, usize)>],
    kind: SolutionKind,
    cost: &CostSpec<S>,
    k: usize,
) -> Result<DedicatedSolution<S>, SolveError> {
    let n = ctx.stair.base.rows();
    let (_, pivots) = normalize_with_choice(&ctx.stair, choice);
    let base = match kind {
        SolutionKind::Actuation => complement(n, pivots.iter().map(|p| p.orig_row)),
        SolutionKind::Sensing => complement(n, pivots.iter().map(|p| p.orig_col)),
    };
    let mut indices = Vec::with_capacity(base.len() * (k + 1));
    for _ in 0..=k {
        indices.extend_from_slice(&base);
    }
    match kind {
        SolutionKind::Actuation => cost.check_dims(n, (k + 1) * n)?,
        SolutionKind::Sensing => cost.check_dims((k + 1) * n, n)?,
    }
    let mut total = S::zero();
    for (slot, &state) in indices.iter().enumerate() {
        total += match kind {
            SolutionKind::Actuation => cost.entry(state - 1, slot),
            SolutionKind::Sensing => cost.entry(slot, state - 1),
        };
    }
    let unique = ctx.unique_on(matches!(kind, SolutionKind::Actuation));
    Ok(DedicatedSolution { kind, indices, base, pivots, cost: total, k, n, unique })
}

/// Recomputes a solution's cost from its placed cells under `cost`.
pub fn solution_cost_recompute<S: Scalar>(
    sol: &DedicatedSolution<S>,
    cost: &CostSpec<S>,
) -> S {
    let mut total = S::zero();
    for (slot, &state) in sol.indices.iter().enumerate() {
        total += match sol.kind {
            SolutionKind::Actuation => cost.entry(state - 1, slot),
            SolutionKind::Sensing => cost.entry(slot, state - 1),
        };
    }
    total
}

/// Dedicated solution for a fixed pivot choice (uniform unit cost, k = 0).
pub fn dedicated_actuators<S: Scalar>(
    pencil: &PencilPattern,
    choice: &[Option<(usize, usize)>],
) -> Result<DedicatedSolution<S>, SolveError> {
    let ctx = PlacementContext::new(pencil, StairMode::Auto)?;
    solution_from_choice(&ctx, choice, SolutionKind::Actuation, &CostSpec::default(), 0)
}

/// Minimum-cost k-resilient actuator placement.
pub fn resilient_actuators<S: Scalar>(
    pencil: &PencilPattern,
    k: usize,
    cost: &CostSpec<S>,
) -> Result<DedicatedSolution<S>, SolveError> {
    let ctx = PlacementContext::new(pencil, StairMode::Auto)?;
    let choice = ctx.best_choice(|_, (r, _)| cost.state_row_weight(r));
    solution_from_choice(&ctx, &choice, SolutionKind::Actuation, cost, k)
}

/// Minimum-cost k-resilient sensor placement: pivot-column complements of
/// the same stair analysis, weights read column-wise.
pub fn resilient_sensors<S: Scalar>(
    pencil: &PencilPattern,
    k: usize,
    cost: &CostSpec<S>,
) -> Result<DedicatedSolution<S>, SolveError> {
    let ctx = PlacementContext::new(pencil, StairMode::Auto)?;
    let choice = ctx.best_choice(|_, (_, c)| cost.state_col_weight(c));
    solution_from_choice(&ctx, &choice, SolutionKind::Sensing, cost, k)
}

/// Every distinct optimal base index set reachable through pivot choices.
///
/// Enumerates the full pivot-choice product, so it is intended for reporting
/// and cross-checks; the product is capped to keep enumeration bounded.
pub fn optimal_alternatives<S: Scalar>(
    pencil: &PencilPattern,
    kind: SolutionKind,
    cost: &CostSpec<S>,
) -> Result<Vec<Vec<usize>>, SolveError> {
    const CAP: u128 = 1_000_000;
    let ctx = PlacementContext::new(pencil, StairMode::Auto)?;
    let iter = enumerate_pivot_choices(&ctx.stair);
    if iter.cardinality() > CAP {
        return Err(SolveError::Infeasible {
            reason: format!("pivot choice space exceeds {CAP}; alternatives not enumerable"),
        });
    }
    let mut best: Option<S> = None;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for choice in iter {
        let sol = solution_from_choice(&ctx, &choice, kind, cost, 0)?;
        let better = match best {
            None => true,
            Some(b) => sol.cost < b - S::default_epsilon(),
        };
        if better {
            best = Some(sol.cost);
            sets = vec![sol.base.clone()];
        } else if let Some(b) = best {
            if (sol.cost - b).abs() <= S::default_epsilon() * s::<S>(16.0)
                && !sets.contains(&sol.base)
            {
                sets.push(sol.base.clone());
            }
        }
    }
    sets.sort();
    Ok(sets)
}

/// Structural controllability certificate: a ramp in [A^lambda | B].
pub fn sssc_check(pencil: &PencilPattern, b_pattern: &SelectivePattern) -> Result<CertStatus, SolveError> {
    let lambda = lambda_pattern(pencil);
    if b_pattern.rows() != lambda.rows() {
        return Err(SolveError::Pattern(crate::PatternError::DimensionMismatch {
            context: "sssc_check [A^lambda | B]",
            left: (lambda.rows(), lambda.cols()),
            right: (b_pattern.rows(), b_pattern.cols()),
        }));
    }
    let stacked = lambda.hstack(b_pattern)?;
    Ok(match is_ramp(&stacked) {
        Some(_) => CertStatus::Certified,
        None => CertStatus::Inconclusive,
    })
}

/// Structural observability certificate: a ramp in the stacked
/// [A^lambda; C]. Runs on the tall orientation directly rather than through
/// the transposed controllability check, so the duality law is testable.
pub fn ssso_check(pencil: &PencilPattern, c_pattern: &SelectivePattern) -> Result<CertStatus, SolveError> {
    let lambda = lambda_pattern(pencil);
    if c_pattern.cols() != lambda.cols() {
        return Err(SolveError::Pattern(crate::PatternError::DimensionMismatch {
            context: "ssso_check [A^lambda; C]",
            left: (lambda.rows(), lambda.cols()),
            right: (c_pattern.rows(), c_pattern.cols()),
        }));
    }
    let stacked = lambda.vstack(c_pattern)?;
    Ok(match is_ramp(&stacked) {
        Some(_) => CertStatus::Certified,
        None => CertStatus::Inconclusive,
    })
}

/// Ramp witness for a certified [A^lambda | B], when one exists.
pub fn sssc_witness(pencil: &PencilPattern, b_pattern: &SelectivePattern) -> Option<RampWitness> {
    let lambda = lambda_pattern(pencil);
    let stacked = lambda.hstack(b_pattern).ok()?;
    is_ramp(&stacked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternEntry;

    fn pencil(e: &str, a: &str) -> PencilPattern {
        PencilPattern::new(SelectivePattern::parse(e).unwrap(), SelectivePattern::parse(a).unwrap()).unwrap()
    }

    fn diag_pencil(n: usize) -> PencilPattern {
        PencilPattern::new(SelectivePattern::zeros(n, n), SelectivePattern::identity(n)).unwrap()
    }

    #[test]
    fn diagonal_needs_no_actuators() {
        let p = diag_pencil(4);
        let sol = resilient_actuators::<f64>(&p, 0, &CostSpec::default()).unwrap();
        assert!(sol.indices.is_empty());
        assert_eq!(sol.pivots.len(), 4);
        assert_eq!(sol.cost, 0.0);
        assert!(sol.unique);
    }

    #[test]
    fn appendix_free_block_needs_rows_two_three() {
        // A^lambda = [[x,*,*],[*,*,*],[*,*,*]] via E = 0 on row 1 only.
        let p = pencil("0 0 0\n* * *\n* * *", "x * *\n* * *\n* * *");
        let sol = resilient_actuators::<f64>(&p, 0, &CostSpec::default()).unwrap();
        assert_eq!(sol.base, vec![2, 3]);
        let b = sol.materialize();
        assert_eq!(sssc_check(&p, &b).unwrap(), CertStatus::Certified);
    }

    #[test]
    fn appendix_counterexample_inconclusive() {
        let p = pencil("* 0 0\n0 * 0\n0 0 *", "* 0 x\nx * 0\nx x *");
        let b = SelectivePattern::parse("x\n0\n0").unwrap();
        assert_eq!(sssc_check(&p, &b).unwrap(), CertStatus::Inconclusive);
    }

    #[test]
    fn identity_b_always_certified() {
        let p = pencil("* * \n* *", "* *\n* *");
        let b = SelectivePattern::identity(2);
        assert_eq!(sssc_check(&p, &b).unwrap(), CertStatus::Certified);
    }

    #[test]
    fn resilient_duplicates_base() {
        let p = pencil("0 0\n0 0", "x 0\nx 0");
        // Column 2 is empty: its step difference has no pivot; state 2's row
        // is uncovered... stair: supports r0={0}, r1={0}: one pivot.
        let sol = resilient_actuators::<f64>(&p, 1, &CostSpec::default()).unwrap();
        assert_eq!(sol.base.len(), 1);
        assert_eq!(sol.indices.len(), 2);
        assert_eq!(sol.indices[0], sol.indices[1]);
        assert_eq!(sol.cost, 2.0);
    }

    #[test]
    fn resilient_k2_on_diagonal_is_empty() {
        let p = diag_pencil(3);
        let sol = resilient_actuators::<f64>(&p, 2, &CostSpec::default()).unwrap();
        assert!(sol.indices.is_empty());
    }

    #[test]
    fn sensors_dual_to_actuators_on_diagonal() {
        let p = diag_pencil(3);
        let sol = resilient_sensors::<f64>(&p, 0, &CostSpec::default()).unwrap();
        assert!(sol.indices.is_empty());
    }

    #[test]
    fn cost_steers_pivot_choice() {
        // Two candidate pivot rows {1, 2}; actuating the other one. Cheap
        // state 1 means the pivot sits at the expensive row 2.
        let p = pencil("0 0\n0 0", "x 0\nx 0");
        let w = crate::cost::CostMatrix::new(nalgebra::DMatrix::from_row_slice(2, 4, &[
            1.0, 1.0, 1.0, 1.0,
            5.0, 5.0, 5.0, 5.0,
        ]))
        .unwrap();
        let sol = resilient_actuators::<f64>(&p, 1, &CostSpec::Matrix(w)).unwrap();
        assert_eq!(sol.base, vec![1]);
        assert_eq!(sol.indices, vec![1, 1]);
        assert_eq!(sol.cost, 2.0);
    }

    #[test]
    fn materialized_width_matches_frame() {
        let p = pencil("0 0\n0 0", "x 0\nx 0");
        let sol = resilient_actuators::<f64>(&p, 1, &CostSpec::default()).unwrap();
        let b = sol.materialize();
        assert_eq!((b.rows(), b.cols()), (2, 4));
        let placed = b.iter().filter(|&(_, _, e)| e == PatternEntry::Nonzero).count();
        assert_eq!(placed, 2);
    }

    #[test]
    fn cost_dimension_mismatch_detected() {
        let p = diag_pencil(2);
        let w = crate::cost::CostMatrix::new(nalgebra::DMatrix::from_element(2, 2, 1.0)).unwrap();
        // k = 1 expects a 2 x 4 actuation frame.
        let err = resilient_actuators::<f64>(&p, 1, &CostSpec::Matrix(w)).unwrap_err();
        assert!(matches!(err, SolveError::CostDimensionMismatch { .. }));
    }
}
