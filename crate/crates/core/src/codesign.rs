//! Actuation-sensing-communication co-design.
//!
//! Dedicated actuators and sensors built from one pivot choice pair up into
//! index-mates; each mate carries exactly one communication channel, and a
//! k-resilient design repeats the construction across k+1 copies. Pivot
//! alternatives are scored by the full design cost, so the returned triple
//! is the cheapest one reachable through the stair analysis.

use serde::{Deserialize, Serialize};

use crate::cost::CostSpec;
use crate::pattern::{PencilPattern, SelectivePattern};
use crate::scalar::{s, to_f64, Scalar};
use crate::placement::{
    solution_cost_recompute, sssc_check, ssso_check, CertStatus, DedicatedSolution,
    PlacementContext, SolutionKind,
};
use crate::stair::{enumerate_pivot_choices, normalize_with_choice, step_differences, Pivot, StairMode};
use crate::SolveError;

/// Pivot-choice products up to this size are scored exhaustively by full
/// design cost; larger spaces fall back to per-difference greedy weights.
const EXHAUSTIVE_CHOICE_CAP: u128 = 10_000;

/// One actuator/sensor pairing plus its communication channel.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexMate<S: Scalar> {
    /// 1-based label into the effective actuator columns.
    pub actuator_index: usize,
    /// 1-based label into the effective sensor rows.
    pub sensor_index: usize,
    /// 1-based state labels behind the pair.
    pub actuator_state: usize,
    pub sensor_state: usize,
    pub channel_cost: S,
}

/// Sensor-to-actuator channel layout of a design.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationPattern<S: Scalar> {
    /// Padded frame dimensions: (k+1) * n on both axes.
    pub p: usize,
    pub m: usize,
    pub effective_actuators: usize,
    pub effective_sensors: usize,
    /// (actuator label, sensor label) pairs, 1-based.
    pub channels: Vec<(usize, usize)>,
    pub mates: Vec<IndexMate<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodesignResult<S: Scalar> {
    pub actuation: DedicatedSolution<S>,
    pub sensing: DedicatedSolution<S>,
    pub info: InformationPattern<S>,
    pub total_cost: S,
}

/// Lemma-style feasibility gates: both certificates must hold for a design
/// to be free of structural fixed modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NecessaryConditions {
    pub sssc: CertStatus,
    pub ssso: CertStatus,
}

impl NecessaryConditions {
    pub fn both_certified(&self) -> bool {
        self.sssc == CertStatus::Certified && self.ssso == CertStatus::Certified
    }
}

/// Runs the ramp certificates on a candidate (B, C) pair.
pub fn necessary_conditions(
    pencil: &PencilPattern,
    b_pattern: &SelectivePattern,
    c_pattern: &SelectivePattern,
) -> Result<NecessaryConditions, SolveError> {
    Ok(NecessaryConditions {
        sssc: sssc_check(pencil, b_pattern)?,
        ssso: ssso_check(pencil, c_pattern)?,
    })
}

/// Pairs uncovered rows and columns of a normalized stair form at the base
/// (single copy) level.
///
/// Rows and columns left uncovered inside the same step difference pair up
/// along its diagonal; the remaining rows and columns pair cyclically, the
/// i-th uncovered row (by state label) with the (i+1)-th uncovered column.
/// Any perfect pairing yields a feasible information pattern; this one is
/// the canonical deterministic choice.
fn base_mates(
    stair: &crate::stair::StairForm,
    pivots: &[Pivot],
) -> Vec<(usize, usize)> {
    let pivot_rows: Vec<usize> = pivots.iter().map(|p| p.orig_row).collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.orig_col).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut leftover_rows: Vec<usize> = Vec::new();
    let mut leftover_cols: Vec<usize> = Vec::new();
    for d in step_differences(stair) {
        let mut rows: Vec<usize> = (d.row_start..d.row_start + d.height)
            .map(|r| stair.row_perm[r])
            .filter(|r| !pivot_rows.contains(r))
            .collect();
        let mut cols: Vec<usize> = (d.col_start..d.col_start + d.width)
            .map(|c| stair.col_perm[c])
            .filter(|c| !pivot_cols.contains(c))
            .collect();
        rows.sort_unstable();
        cols.sort_unstable();
        let shared = rows.len().min(cols.len());
        for i in 0..shared {
            pairs.push((rows[i], cols[i]));
        }
        leftover_rows.extend_from_slice(&rows[shared..]);
        leftover_cols.extend_from_slice(&cols[shared..]);
    }
    leftover_rows.sort_unstable();
    leftover_cols.sort_unstable();
    debug_assert_eq!(leftover_rows.len(), leftover_cols.len());
    let q = leftover_rows.len();
    for (i, &r) in leftover_rows.iter().enumerate() {
        pairs.push((r, leftover_cols[(i + 1) % q]));
    }
    pairs
}

/// Exact min-cost assignment of actuator copies to sensor copies, smallest
/// sensor indices preferred on cost ties.
fn min_cost_assignment<S: Scalar>(cost: &[Vec<S>]) -> Vec<usize> {
    let m = cost.len();
    assert!(m <= 20, "assignment groups stay small (k+1 copies)");
    let full = (1usize << m) - 1;
    // suffix[i][used] = cheapest completion assigning copies i.. given used sensors.
    let mut suffix = vec![vec![S::zero(); full + 1]; m + 1];
    for i in (0..m).rev() {
        for used in 0..=full {
            let mut best: Option<S> = None;
            for t in 0..m {
                if used & (1 << t) != 0 {
                    continue;
                }
                let v = cost[i][t] + suffix[i + 1][used | (1 << t)];
                if best.map_or(true, |b| v < b) {
                    best = Some(v);
                }
            }
            suffix[i][used] = best.unwrap_or_else(S::zero);
        }
    }
    let mut used = 0usize;
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let target = suffix[i][used];
        let tol = S::default_epsilon() * s::<S>(64.0) * (S::one() + target.abs());
        for t in 0..m {
            if used & (1 << t) != 0 {
                continue;
            }
            if (cost[i][t] + suffix[i + 1][used | (1 << t)] - target).abs() <= tol {
                used |= 1 << t;
                out.push(t);
                break;
            }
        }
    }
    assert_eq!(out.len(), m, "assignment reconstruction incomplete");
    out
}

/// Builds the mate list for actuator and sensor solutions sharing one pivot
/// choice. Returns exactly one mate per effective actuator; for k >= 1 the
/// k+1 redundant copies of each base mate get their own channels, assigned
/// to minimize the summed channel cost within the copy group.
pub fn index_mates<S: Scalar>(
    stair: &crate::stair::StairForm,
    pivots: &[Pivot],
    actuators: &DedicatedSolution<S>,
    sensors: &DedicatedSolution<S>,
    wk: &CostSpec<S>,
) -> Result<Vec<IndexMate<S>>, SolveError> {
    if actuators.pivots != sensors.pivots || actuators.k != sensors.k {
        return Err(SolveError::MismatchedPivotChoice);
    }
    let k = actuators.k;
    let n = actuators.n;
    wk.check_dims((k + 1) * n, (k + 1) * n)?;
    let q = actuators.base.len();
    debug_assert_eq!(q, sensors.base.len());
    let mut mates = Vec::with_capacity((k + 1) * q);
    for (row0, col0) in base_mates(stair, pivots) {
        let a_pos = actuators
            .base
            .iter()
            .position(|&s| s == row0 + 1)
            .expect("uncovered row missing from actuator base");
        let s_pos = sensors
            .base
            .iter()
            .position(|&s| s == col0 + 1)
            .expect("uncovered col missing from sensor base");
        // Copy labels of this mate group in the effective index space.
        let a_labels: Vec<usize> = (0..=k).map(|c| c * q + a_pos + 1).collect();
        let s_labels: Vec<usize> = (0..=k).map(|c| c * q + s_pos + 1).collect();
        let cost: Vec<Vec<S>> = a_labels
            .iter()
            .map(|&al| s_labels.iter().map(|&sl| wk.entry(al - 1, sl - 1)).collect())
            .collect();
        let assign = min_cost_assignment(&cost);
        for (ci, &si) in assign.iter().enumerate() {
            mates.push(IndexMate {
                actuator_index: a_labels[ci],
                sensor_index: s_labels[si],
                actuator_state: row0 + 1,
                sensor_state: col0 + 1,
                channel_cost: cost[ci][si],
            });
        }
    }
    Ok(mates)
}

fn build_design<S: Scalar>(
    ctx: &PlacementContext,
    choice: &[Option<(usize, usize)>],
    k: usize,
    wb: &CostSpec<S>,
    wc: &CostSpec<S>,
    wk: &CostSpec<S>,
) -> Result<CodesignResult<S>, SolveError> {
    let actuation = crate::placement::solution_from_choice(ctx, choice, SolutionKind::Actuation, wb, k)?;
    let sensing = crate::placement::solution_from_choice(ctx, choice, SolutionKind::Sensing, wc, k)?;
    let (nstair, pivots) = normalize_with_choice(&ctx.stair, choice);
    let mates = index_mates(&nstair, &pivots, &actuation, &sensing, wk)?;
    let channels: Vec<(usize, usize)> = mates.iter().map(|m| (m.actuator_index, m.sensor_index)).collect();
    let channel_cost = mates.iter().fold(S::zero(), |acc, m| acc + m.channel_cost);
    let n = ctx.stair.base.rows();
    let total_cost = actuation.cost + sensing.cost + channel_cost;
    let info = InformationPattern {
        p: (k + 1) * n,
        m: (k + 1) * n,
        effective_actuators: actuation.indices.len(),
        effective_sensors: sensing.indices.len(),
        channels,
        mates,
    };
    Ok(CodesignResult { actuation, sensing, info, total_cost })
}

/// Solves the co-design problem: minimum-cost k-resilient (B, C, K) with no
/// structural fixed modes reachable through the stair construction.
pub fn codesign<S: Scalar>(
    pencil: &PencilPattern,
    k: usize,
    wb: &CostSpec<S>,
    wc: &CostSpec<S>,
    wk: &CostSpec<S>,
) -> Result<CodesignResult<S>, SolveError> {
    let ctx = PlacementContext::new(pencil, StairMode::Auto)?;
    let iter = enumerate_pivot_choices(&ctx.stair);
    let mut best: Option<CodesignResult<S>> = None;
    if iter.cardinality() <= EXHAUSTIVE_CHOICE_CAP {
        for choice in iter {
            let cand = build_design(&ctx, &choice, k, wb, wc, wk)?;
            if best.as_ref().map_or(true, |b| cand.total_cost < b.total_cost) {
                best = Some(cand);
            }
        }
    } else {
        // Channel costs are not separable per pivot, so the large-space path
        // scores pivots by placement weights alone.
        let choice = ctx.best_choice(|_, (r, c)| wb.state_row_weight(r) + wc.state_col_weight(c));
        best = Some(build_design(&ctx, &choice, k, wb, wc, wk)?);
    }
    best.ok_or(SolveError::EmptyProblem)
}

/// Recomputed total from the materialized solutions; must equal the
/// solver-reported cost exactly.
pub fn recompute_total_cost<S: Scalar>(
    result: &CodesignResult<S>,
    wb: &CostSpec<S>,
    wc: &CostSpec<S>,
    wk: &CostSpec<S>,
) -> S {
    let act = solution_cost_recompute(&result.actuation, wb);
    let sens = solution_cost_recompute(&result.sensing, wc);
    let chan = result
        .info
        .channels
        .iter()
        .fold(S::zero(), |acc, &(a, s)| acc + wk.entry(a - 1, s - 1));
    act + sens + chan
}

/// DOT rendering of the information pattern: sensors on the left, actuators
/// on the right, one labeled edge per channel.
pub fn info_to_dot<S: Scalar>(result: &CodesignResult<S>) -> String {
    let mut out = String::from("digraph information_pattern {\n  rankdir=LR;\n");
    let mut sensors: Vec<usize> = result.info.channels.iter().map(|&(_, s)| s).collect();
    sensors.sort_unstable();
    sensors.dedup();
    for &s in &sensors {
        let state = result.sensing.indices[s - 1];
        out.push_str(&format!("  s{s} [shape=ellipse, label=\"sensor {s}\\nstate {state}\"];\n"));
    }
    let mut actuators: Vec<usize> = result.info.channels.iter().map(|&(a, _)| a).collect();
    actuators.sort_unstable();
    actuators.dedup();
    for &a in &actuators {
        let state = result.actuation.indices[a - 1];
        out.push_str(&format!("  a{a} [shape=box, label=\"actuator {a}\\nstate {state}\"];\n"));
    }
    for m in &result.info.mates {
        let cost = to_f64(m.channel_cost);
        out.push_str(&format!(
            "  s{} -> a{} [label=\"{}\"];\n",
            m.sensor_index, m.actuator_index, cost
        ));
    }
    out.push_str("}\n");
    out
}

/// Plain JSON mirror of a co-design result (all costs in f64).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DesignJson {
    pub n: usize,
    pub k: usize,
    pub actuated: Vec<usize>,
    pub sensed: Vec<usize>,
    pub channels: Vec<(usize, usize)>,
    pub mates: Vec<MateJson>,
    pub actuation_cost: f64,
    pub sensing_cost: f64,
    pub total_cost: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MateJson {
    pub actuator: usize,
    pub sensor: usize,
    pub actuator_state: usize,
    pub sensor_state: usize,
    pub channel_cost: f64,
}

impl<S: Scalar> CodesignResult<S> {
    pub fn to_json(&self) -> DesignJson {
        DesignJson {
            n: self.actuation.n,
            k: self.actuation.k,
            actuated: self.actuation.indices.clone(),
            sensed: self.sensing.indices.clone(),
            channels: self.info.channels.clone(),
            mates: self
                .info
                .mates
                .iter()
                .map(|m| MateJson {
                    actuator: m.actuator_index,
                    sensor: m.sensor_index,
                    actuator_state: m.actuator_state,
                    sensor_state: m.sensor_state,
                    channel_cost: to_f64(m.channel_cost),
                })
                .collect(),
            actuation_cost: to_f64(self.actuation.cost),
            sensing_cost: to_f64(self.sensing.cost),
            total_cost: to_f64(self.total_cost),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternEntry;

    fn pencil(e: &str, a: &str) -> PencilPattern {
        PencilPattern::new(SelectivePattern::parse(e).unwrap(), SelectivePattern::parse(a).unwrap()).unwrap()
    }

    fn uniform() -> CostSpec<f64> {
        CostSpec::Uniform(1.0)
    }

    #[test]
    fn fully_pivoted_yields_empty_design() {
        let p = PencilPattern::new(SelectivePattern::zeros(3, 3), SelectivePattern::identity(3)).unwrap();
        let r = codesign(&p, 0, &uniform(), &uniform(), &uniform()).unwrap();
        assert!(r.info.channels.is_empty());
        assert_eq!(r.total_cost, 0.0);
    }

    #[test]
    fn all_free_two_by_two_pairs_on_diagonal() {
        // No pivots: both states actuated and sensed, mates pair inside the
        // single step difference along its diagonal.
        let p = pencil("* *\n* *", "* *\n* *");
        let r = codesign(&p, 0, &uniform(), &uniform(), &uniform()).unwrap();
        assert_eq!(r.actuation.indices, vec![1, 2]);
        assert_eq!(r.sensing.indices, vec![1, 2]);
        assert_eq!(r.info.channels, vec![(1, 1), (2, 2)]);
        assert_eq!(r.total_cost, 2.0 + 2.0 + 2.0);
        for m in &r.info.mates {
            assert_eq!(m.actuator_state, m.sensor_state);
        }
    }

    #[test]
    fn channel_count_equals_effective_actuators() {
        let p = pencil("* 0\n0 *", "* x\n0 *");
        for k in 0..3 {
            let r = codesign(&p, k, &uniform(), &uniform(), &uniform()).unwrap();
            assert_eq!(r.info.channels.len(), r.info.effective_actuators);
            assert_eq!(r.info.effective_actuators, r.info.effective_sensors);
            // Every effective device appears in some channel.
            for label in 1..=r.info.effective_actuators {
                assert!(r.info.channels.iter().any(|&(a, _)| a == label));
                assert!(r.info.channels.iter().any(|&(_, s)| s == label));
            }
        }
    }

    #[test]
    fn cost_recompute_matches_exactly() {
        let p = pencil("* *\n* *", "* *\n* *");
        let wb = uniform();
        let wc = CostSpec::Uniform(2.0);
        let wk = CostSpec::Uniform(0.5);
        let r = codesign(&p, 1, &wb, &wc, &wk).unwrap();
        assert_eq!(recompute_total_cost(&r, &wb, &wc, &wk), r.total_cost);
    }

    #[test]
    fn mismatched_pivot_choice_rejected() {
        let p = pencil("0 0\n0 0", "x 0\nx 0");
        let ctx = PlacementContext::new(&p, StairMode::Auto).unwrap();
        let choices: Vec<_> = enumerate_pivot_choices(&ctx.stair).collect();
        assert_eq!(choices.len(), 2);
        let a = crate::placement::solution_from_choice::<f64>(
            &ctx, &choices[0], SolutionKind::Actuation, &uniform(), 0).unwrap();
        let s = crate::placement::solution_from_choice::<f64>(
            &ctx, &choices[1], SolutionKind::Sensing, &uniform(), 0).unwrap();
        let (nstair, pivots) = normalize_with_choice(&ctx.stair, &choices[0]);
        let err = index_mates(&nstair, &pivots, &a, &s, &uniform()).unwrap_err();
        assert_eq!(err, SolveError::MismatchedPivotChoice);
    }

    #[test]
    fn necessary_conditions_for_identity_pair() {
        let p = pencil("* *\n* *", "* *\n* *");
        let b = SelectivePattern::identity(2);
        let c = SelectivePattern::identity(2);
        let nc = necessary_conditions(&p, &b, &c).unwrap();
        assert!(nc.both_certified());
        let zero_b = SelectivePattern::zeros(2, 2);
        let nc2 = necessary_conditions(&p, &zero_b, &c).unwrap();
        assert_eq!(nc2.sssc, CertStatus::Inconclusive);
    }

    #[test]
    fn dot_export_lists_every_channel() {
        let p = pencil("* *\n* *", "* *\n* *");
        let r = codesign(&p, 0, &uniform(), &uniform(), &uniform()).unwrap();
        let dot = info_to_dot(&r);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), r.info.channels.len());
    }

    #[test]
    fn design_json_round_trip() {
        let p = pencil("* *\n* *", "* *\n* *");
        let r = codesign(&p, 1, &uniform(), &uniform(), &uniform()).unwrap();
        let json = serde_json::to_string(&r.to_json()).unwrap();
        let back: DesignJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r.to_json());
    }

    #[test]
    fn min_cost_assignment_prefers_cheap_and_lex() {
        let cost = vec![vec![1.0, 5.0], vec![5.0, 1.0]];
        assert_eq!(min_cost_assignment(&cost), vec![0, 1]);
        let flat = vec![vec![2.0, 2.0], vec![2.0, 2.0]];
        assert_eq!(min_cost_assignment(&flat), vec![0, 1]);
        let cross = vec![vec![5.0, 1.0], vec![1.0, 5.0]];
        assert_eq!(min_cost_assignment(&cross), vec![1, 0]);
    }

    #[test]
    fn unpivoted_wide_difference_mixes_within_and_cross() {
        // A^lambda rows: r1 spans cols {1,2} free, r2 adds col 3 with x.
        let p = pencil("0 0 0\n0 0 0\n0 0 0", "* * 0\n* * 0\n* * x");
        let r = codesign(&p, 0, &uniform(), &uniform(), &uniform()).unwrap();
        // One pivot at (3,3); states 1 and 2 actuated and sensed.
        assert_eq!(r.actuation.base, vec![1, 2]);
        assert_eq!(r.sensing.base, vec![1, 2]);
        assert_eq!(r.info.channels.len(), 2);
        let states: Vec<(usize, usize)> =
            r.info.mates.iter().map(|m| (m.actuator_state, m.sensor_state)).collect();
        assert_eq!(states, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn materialize_patterns_pass_certificates() {
        let p = pencil("* 0 0\n0 * 0\n0 0 *", "* x 0\n0 * x\n0 0 *");
        let r = codesign(&p, 1, &uniform(), &uniform(), &uniform()).unwrap();
        let b = r.actuation.materialize();
        let c = r.sensing.materialize();
        assert_eq!((b.rows(), b.cols()), (3, 6));
        assert_eq!((c.rows(), c.cols()), (6, 3));
        let nc = necessary_conditions(&p, &b, &c).unwrap();
        assert!(nc.both_certified());
        // Effective-only versions as well.
        let be = r.actuation.materialize_effective();
        assert!(be.iter().filter(|&(_, _, e)| e == PatternEntry::Nonzero).count() == r.actuation.indices.len());
    }
}
