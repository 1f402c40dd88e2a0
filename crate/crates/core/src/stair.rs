//! Stair decomposition of selective patterns.
//!
//! A stair form permutes rows and columns so that row blocks (steps) have
//! strictly increasing column support with forced-zero blocks to the right.
//! Step differences are the new-column slices each step adds; a pivot is a
//! forced-nonzero cell permutable to the left-top of its step difference.
//! A ramp is a pattern containing n pivoted step differences, equivalently a
//! permutable lower-triangular submatrix with forced-nonzero diagonal, which
//! certifies full rank for every realization and every lambda.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::pattern::{PatternEntry, SelectivePattern};

/// Decomposition strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StairMode {
    /// Exact branch-and-bound over actuation choices.
    Exhaustive,
    /// Heuristic unlock-driven actuation, flagged non-certified.
    Greedy,
    /// Exact search that degrades to greedy past the state cap.
    Auto,
}

/// One step of a stair form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    /// Number of rows in the step.
    pub height: usize,
    /// Column support length n_l of the step.
    pub length: usize,
}

/// A stair decomposition: permutations plus the step layout.
///
/// `row_perm[i]` / `col_perm[j]` give the original row / column sitting at
/// stair position `i` / `j` (0-based internally).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StairForm {
    pub base: SelectivePattern,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub steps: Vec<Step>,
    /// False when produced by the greedy heuristic.
    pub maximality_certified: bool,
}

/// Column slice a step adds beyond its predecessor's support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepDifference {
    pub step_index: usize,
    /// Stair row positions (start, height).
    pub row_start: usize,
    pub height: usize,
    /// Stair column positions [col_start, col_start + width).
    pub col_start: usize,
    pub width: usize,
}

/// A chosen pivot: forced-nonzero cell at the left-top of its step
/// difference after normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pivot {
    /// Stair row position after normalization.
    pub row: usize,
    /// Stair column position after normalization.
    pub col: usize,
    pub orig_row: usize,
    pub orig_col: usize,
    pub step_index: usize,
}

impl Serialize for StairForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("StairForm", 4)?;
        // 1-based indices in serialized output, matching report conventions.
        let rows: Vec<usize> = self.row_perm.iter().map(|r| r + 1).collect();
        let cols: Vec<usize> = self.col_perm.iter().map(|c| c + 1).collect();
        let steps: Vec<(usize, usize)> = self.steps.iter().map(|s| (s.height, s.length)).collect();
        st.serialize_field("row_perm", &rows)?;
        st.serialize_field("col_perm", &cols)?;
        st.serialize_field("steps", &steps)?;
        st.serialize_field("maximality_certified", &self.maximality_certified)?;
        st.end()
    }
}

impl StairForm {
    /// Cell at stair coordinates.
    pub fn at(&self, r: usize, c: usize) -> PatternEntry {
        self.base.get(self.row_perm[r], self.col_perm[c])
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    /// Stair position of an original row.
    pub fn row_pos(&self, orig_row: usize) -> usize {
        self.row_perm.iter().position(|&r| r == orig_row).expect("row not in permutation")
    }

    pub fn col_pos(&self, orig_col: usize) -> usize {
        self.col_perm.iter().position(|&c| c == orig_col).expect("col not in permutation")
    }

    /// The pattern with the stair permutations applied.
    pub fn permuted(&self) -> SelectivePattern {
        SelectivePattern::from_fn(self.base.rows(), self.base.cols(), |r, c| self.at(r, c))
    }

    /// Checks the stair property: every cell of step i beyond its length is Zero.
    pub fn is_valid(&self) -> bool {
        let mut row = 0;
        let mut prev_len = None;
        for step in &self.steps {
            if let Some(p) = prev_len {
                if step.length <= p {
                    return false;
                }
            }
            prev_len = Some(step.length);
            for r in row..row + step.height {
                for c in step.length..self.base.cols() {
                    if self.at(r, c) != PatternEntry::Zero {
                        return false;
                    }
                }
            }
            row += step.height;
        }
        row == self.base.rows()
    }
}

/// Upper bound on explored search states before the decomposition falls
/// back to greedy completion and drops the certification flag.
pub const SEARCH_STATE_CAP: usize = 500_000;

/// A triangular partial transversal: pairs (row, col) ordered top-down with a
/// forced-nonzero diagonal and forced zeros above-right: p(r_i, c_j) = Zero
/// for j > i. Rows outside the transversal are the dedicated (actuated) set.
#[derive(Clone, Debug, PartialEq)]
pub struct Transversal {
    /// Top-down pairs in original coordinates.
    pub pairs: Vec<(usize, usize)>,
    pub actuated: Vec<usize>,
    pub cost: f64,
    pub certified: bool,
}

impl Transversal {
    /// Checks the triangular property and cell symbols against a pattern.
    pub fn is_valid_for(&self, p: &SelectivePattern) -> bool {
        for (i, &(r, c)) in self.pairs.iter().enumerate() {
            if p.get(r, c) != PatternEntry::Nonzero {
                return false;
            }
            for &(_, cj) in &self.pairs[i + 1..] {
                if p.get(r, cj) != PatternEntry::Zero {
                    return false;
                }
            }
        }
        true
    }
}

struct Searcher<'a> {
    p: &'a SelectivePattern,
    weights: Vec<f64>,
    /// Non-Zero rows per column, as bitmasks.
    col_support: Vec<u64>,
    /// Forced-nonzero rows per column.
    col_x: Vec<u64>,
    /// Rows holding at least one forced-nonzero cell.
    row_has_x: Vec<bool>,
    memo: std::collections::HashMap<u64, SearchOutcome>,
    states: usize,
    capped: bool,
    branch: bool,
}

#[derive(Clone, Debug)]
struct SearchOutcome {
    cost: f64,
    /// Peels in peel order (bottom slot first).
    peels: Vec<(usize, usize)>,
    actuated: Vec<usize>,
}

impl SearchOutcome {
    fn better_than(&self, other: &SearchOutcome) -> bool {
        if (self.cost - other.cost).abs() > 1e-12 {
            return self.cost < other.cost;
        }
        if self.actuated.len() != other.actuated.len() {
            return self.actuated.len() < other.actuated.len();
        }
        // Equal cost and count: prefer actuating later rows, which keeps
        // pivots as high in the staircase as possible.
        self.actuated > other.actuated
    }
}

impl<'a> Searcher<'a> {
    fn new(p: &'a SelectivePattern, weights: Vec<f64>, branch: bool) -> Self {
        assert!(p.rows() <= 64, "stair decomposition supports up to 64 rows");
        let mut col_support = vec![0u64; p.cols()];
        let mut col_x = vec![0u64; p.cols()];
        let mut row_has_x = vec![false; p.rows()];
        for (r, c, e) in p.iter() {
            if e.can_be_nonzero() {
                col_support[c] |= 1 << r;
            }
            if e == PatternEntry::Nonzero {
                col_x[c] |= 1 << r;
                row_has_x[r] = true;
            }
        }
        Searcher {
            p,
            weights,
            col_support,
            col_x,
            row_has_x,
            memo: std::collections::HashMap::new(),
            states: 0,
            capped: false,
            branch,
        }
    }

    /// Peels every available candidate: a column whose live support is a
    /// single row carrying a forced nonzero. Any such peel is cost-safe (an
    /// optimal completion can always be rearranged to start with it, since
    /// the peeled column is forced zero on every other live row), so no
    /// branching happens here. Rows without any forced-nonzero cell can
    /// never pivot and are actuated outright. Returns the remaining live
    /// set; candidates are taken largest-first so earlier peels land at
    /// lower ramp slots.
    fn closure(&self, mut live: u64, peels: &mut Vec<(usize, usize)>, actuated: &mut Vec<usize>, cost: &mut f64) -> u64 {
        loop {
            let mut progressed = false;
            for r in 0..self.p.rows() {
                if live & (1 << r) != 0 && !self.row_has_x[r] {
                    live &= !(1 << r);
                    actuated.push(r);
                    *cost += self.weights[r];
                    progressed = true;
                }
            }
            let mut pick: Option<(usize, usize)> = None;
            for c in 0..self.p.cols() {
                let supp = self.col_support[c] & live;
                if supp.count_ones() == 1 && self.col_x[c] & supp != 0 {
                    let r = supp.trailing_zeros() as usize;
                    if pick.map_or(true, |(pr, pc)| (r, c) > (pr, pc)) {
                        pick = Some((r, c));
                    }
                }
            }
            if let Some((r, c)) = pick {
                live &= !(1 << r);
                peels.push((r, c));
                progressed = true;
            }
            if !progressed {
                return live;
            }
        }
    }

    fn search(&mut self, live0: u64) -> SearchOutcome {
        let mut peels = Vec::new();
        let mut actuated = Vec::new();
        let mut closure_cost = 0.0;
        let live = self.closure(live0, &mut peels, &mut actuated, &mut closure_cost);
        let tail = if live == 0 {
            SearchOutcome { cost: 0.0, peels: Vec::new(), actuated: Vec::new() }
        } else if let Some(hit) = self.memo.get(&live) {
            hit.clone()
        } else {
            self.states += 1;
            if self.states > SEARCH_STATE_CAP {
                self.capped = true;
            }
            let mut rows: Vec<usize> = (0..self.p.rows()).filter(|&r| live & (1 << r) != 0).collect();
            rows.sort_by(|&a, &b| {
                self.weights[a]
                    .partial_cmp(&self.weights[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            let explore: Vec<usize> = if self.branch && !self.capped {
                rows
            } else {
                // Greedy: actuate the cheapest row unlocking the most candidates.
                let pick = *rows
                    .iter()
                    .max_by_key(|&&r| {
                        let after = live & !(1 << r);
                        (0..self.p.cols())
                            .filter(|&c| {
                                let supp = self.col_support[c] & after;
                                supp.count_ones() == 1 && self.col_x[c] & supp != 0
                            })
                            .count()
                    })
                    .unwrap();
                vec![pick]
            };
            let mut best: Option<SearchOutcome> = None;
            for r in explore {
                let mut cand = self.search(live & !(1 << r));
                cand.cost += self.weights[r];
                cand.actuated.push(r);
                cand.actuated.sort_unstable();
                if best.as_ref().map_or(true, |b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
            let out = best.expect("live state has actuation candidates");
            if self.branch && !self.capped {
                self.memo.insert(live, out.clone());
            }
            out
        };
        let mut peels_all = peels;
        peels_all.extend(tail.peels);
        let mut actuated_all = actuated;
        actuated_all.extend(tail.actuated);
        actuated_all.sort_unstable();
        SearchOutcome { cost: closure_cost + tail.cost, peels: peels_all, actuated: actuated_all }
    }
}

/// Finds a cost-minimal triangular partial transversal: pivot rows maximize
/// total weight, equivalently the actuated complement minimizes it; with
/// uniform weights this maximizes the pivot count.
pub fn solve_transversal(p: &SelectivePattern, weights: &[f64], branch: bool) -> Transversal {
    let full: u64 = if p.rows() == 64 { u64::MAX } else { (1u64 << p.rows()) - 1 };
    let mut searcher = Searcher::new(p, weights.to_vec(), branch);
    let out = searcher.search(full);
    // Canonical slot order: re-run the peel cascade with the chosen
    // actuations applied up front, so peel chronology (not the search
    // path's interleaving) fixes the staircase layout.
    let mut live = full;
    for &r in &out.actuated {
        live &= !(1 << r);
    }
    let mut pairs = Vec::new();
    let mut forced = Vec::new();
    let mut cost_unused = 0.0;
    let rest = searcher.closure(live, &mut pairs, &mut forced, &mut cost_unused);
    debug_assert_eq!(rest, 0, "cascade from the solved actuation set must complete");
    debug_assert!(forced.is_empty());
    pairs.reverse(); // peel order is bottom-up; pairs are stored top-down
    let trans = Transversal {
        pairs,
        actuated: out.actuated,
        cost: out.cost,
        certified: branch && !searcher.capped,
    };
    debug_assert!(trans.is_valid_for(p));
    trans
}

/// Builds a stair form realizing a transversal: transversal columns appear
/// in slot order, every other column drops in just before the first
/// transversal row that touches it (untouched columns trail at the end),
/// and rows sort by the position of their last non-Zero cell.
fn assemble(p: &SelectivePattern, trans: &Transversal) -> StairForm {
    let t = trans.pairs.len();
    let mut slot_of_col: Vec<Option<usize>> = vec![None; p.cols()];
    for (i, &(_, c)) in trans.pairs.iter().enumerate() {
        slot_of_col[c] = Some(i);
    }
    let mut col_order: Vec<usize> = Vec::with_capacity(p.cols());
    let slot_req = |c: usize| -> usize {
        (0..t)
            .find(|&i| p.get(trans.pairs[i].0, c).can_be_nonzero())
            .unwrap_or(t)
    };
    for i in 0..=t {
        for c in 0..p.cols() {
            if slot_of_col[c].is_none() && slot_req(c) == i {
                col_order.push(c);
            }
        }
        if i < t {
            col_order.push(trans.pairs[i].1);
        }
    }
    debug_assert_eq!(col_order.len(), p.cols());
    let mut pos_of_col = vec![0usize; p.cols()];
    for (pos, &c) in col_order.iter().enumerate() {
        pos_of_col[c] = pos;
    }
    let mut rows: Vec<(usize, usize)> = (0..p.rows())
        .map(|r| {
            let end = p.row_support(r).iter().map(|&c| pos_of_col[c] + 1).max().unwrap_or(0);
            (end, r)
        })
        .collect();
    rows.sort();
    let row_perm: Vec<usize> = rows.iter().map(|&(_, r)| r).collect();
    let mut steps: Vec<Step> = Vec::new();
    for &(end, _) in &rows {
        match steps.last_mut() {
            Some(step) if step.length == end => step.height += 1,
            _ => steps.push(Step { height: 1, length: end }),
        }
    }
    StairForm {
        base: p.clone(),
        row_perm,
        col_perm: col_order,
        steps,
        maximality_certified: trans.certified,
    }
}

/// Decomposes a pattern into a stair form with as many pivoted step
/// differences as possible; `row_weights` bias the search toward keeping
/// expensive rows pivoted (their complement is the dedicated set).
///
/// Step-count maximality in the narrow sense is deliberately not the
/// objective: forms with more steps but fewer pivots exist and are useless
/// for placement. A single step covering the whole matrix is always a valid
/// stair, so decomposition never fails on nonempty patterns.
pub fn stair_decompose_weighted(
    p: &SelectivePattern,
    mode: StairMode,
    row_weights: Option<&[f64]>,
) -> StairForm {
    let weights: Vec<f64> = match row_weights {
        Some(w) => {
            assert_eq!(w.len(), p.rows(), "one weight per row");
            w.to_vec()
        }
        None => vec![1.0; p.rows()],
    };
    let branch = !matches!(mode, StairMode::Greedy);
    let trans = solve_transversal(p, &weights, branch);
    let form = assemble(p, &trans);
    debug_assert!(form.is_valid());
    form
}

/// Uniform-weight decomposition: maximizes the number of pivots.
pub fn stair_decompose(p: &SelectivePattern, mode: StairMode) -> StairForm {
    stair_decompose_weighted(p, mode, None)
}

/// Step differences of a stair form, in step order.
pub fn step_differences(s: &StairForm) -> Vec<StepDifference> {
    let mut out = Vec::with_capacity(s.steps.len());
    let mut row = 0;
    let mut prev_len = 0;
    for (i, step) in s.steps.iter().enumerate() {
        out.push(StepDifference {
            step_index: i,
            row_start: row,
            height: step.height,
            col_start: prev_len,
            width: step.length - prev_len,
        });
        row += step.height;
        prev_len = step.length;
    }
    out
}

/// All pivot candidates of each step difference: forced-nonzero cells, in
/// original coordinates, sorted by (orig_row, orig_col).
pub fn pivot_candidates(s: &StairForm) -> Vec<Vec<(usize, usize)>> {
    step_differences(s)
        .iter()
        .map(|d| {
            let mut cells: Vec<(usize, usize)> = Vec::new();
            for r in d.row_start..d.row_start + d.height {
                for c in d.col_start..d.col_start + d.width {
                    if s.at(r, c) == PatternEntry::Nonzero {
                        cells.push((s.row_perm[r], s.col_perm[c]));
                    }
                }
            }
            cells.sort();
            cells
        })
        .collect()
}

/// Applies within-step row and within-difference column permutations so the
/// chosen candidate of every step difference sits at its left-top.
///
/// `choice[i]` is the candidate cell (orig coordinates) for step difference
/// `i`, or `None` to leave it unpivoted. Swapping inside a step's row block
/// or a difference's column block never disturbs the step layout.
pub fn normalize_with_choice(s: &StairForm, choice: &[Option<(usize, usize)>]) -> (StairForm, Vec<Pivot>) {
    let mut form = s.clone();
    let mut pivots = Vec::new();
    for d in step_differences(s) {
        let Some(Some((orig_row, orig_col))) = choice.get(d.step_index).copied() else {
            continue;
        };
        let rpos = form.row_pos(orig_row);
        let cpos = form.col_pos(orig_col);
        assert!(
            rpos >= d.row_start && rpos < d.row_start + d.height,
            "pivot row outside its step"
        );
        assert!(
            cpos >= d.col_start && cpos < d.col_start + d.width,
            "pivot column outside its step difference"
        );
        form.row_perm.swap(d.row_start, rpos);
        form.col_perm.swap(d.col_start, cpos);
        pivots.push(Pivot {
            row: d.row_start,
            col: d.col_start,
            orig_row,
            orig_col,
            step_index: d.step_index,
        });
    }
    debug_assert!(form.is_valid());
    (form, pivots)
}

/// Normalizes every step difference that has a pivot candidate, choosing the
/// lexicographically smallest candidate per difference.
pub fn normalize_steps(s: &StairForm) -> (StairForm, Vec<Pivot>) {
    let choice: Vec<Option<(usize, usize)>> =
        pivot_candidates(s).iter().map(|c| c.first().copied()).collect();
    normalize_with_choice(s, &choice)
}

/// Iterator over every maximal pivot assignment (one candidate per step
/// difference that has any), in lexicographic order.
pub struct PivotChoiceIter {
    candidates: Vec<Vec<(usize, usize)>>,
    odometer: Vec<usize>,
    done: bool,
}

impl PivotChoiceIter {
    /// Total number of assignments: product of per-difference candidate
    /// counts (empty differences contribute a factor of one).
    pub fn cardinality(&self) -> u128 {
        self.candidates.iter().map(|c| c.len().max(1) as u128).product()
    }
}

impl Iterator for PivotChoiceIter {
    type Item = Vec<Option<(usize, usize)>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item: Vec<Option<(usize, usize)>> = self
            .candidates
            .iter()
            .zip(&self.odometer)
            .map(|(cands, &i)| cands.get(i).copied())
            .collect();
        // Advance the odometer, least-significant position last.
        let mut pos = self.candidates.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.candidates[pos].len() <= 1 {
                continue;
            }
            if self.odometer[pos] + 1 < self.candidates[pos].len() {
                self.odometer[pos] += 1;
                for later in self.odometer[pos + 1..].iter_mut() {
                    *later = 0;
                }
                break;
            }
            self.odometer[pos] = 0;
        }
        Some(item)
    }
}

/// Enumerates pivot choices of a stair form.
pub fn enumerate_pivot_choices(s: &StairForm) -> PivotChoiceIter {
    let candidates = pivot_candidates(s);
    let odometer = vec![0; candidates.len()];
    PivotChoiceIter { candidates, odometer, done: false }
}

/// Witness of a ramp: the triangular diagonal, top to bottom, as original
/// (row, col) cells. Entries above the diagonal are forced zeros and every
/// diagonal cell is forced nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RampWitness {
    pub diag: Vec<(usize, usize)>,
}

/// Tests whether permutations exist making `p` a ramp: an n x n submatrix
/// (n = min(rows, cols)) permutable to lower-triangular form with a
/// forced-nonzero diagonal.
///
/// Wide patterns are solved by peeling the bottom of the triangle: a column
/// whose remaining support is exactly one forced-nonzero row can always sit
/// last. Tall patterns peel the top row symmetrically. Any valid peel keeps
/// all other peels valid, so the greedy search is complete.
pub fn is_ramp(p: &SelectivePattern) -> Option<RampWitness> {
    if p.rows() <= p.cols() {
        is_ramp_wide(p)
    } else {
        let t = p.transpose();
        let w = is_ramp_wide(&t)?;
        Some(RampWitness {
            diag: w.diag.iter().rev().map(|&(r, c)| (c, r)).collect(),
        })
    }
}

fn is_ramp_wide(p: &SelectivePattern) -> Option<RampWitness> {
    let n = p.rows();
    let mut row_alive = vec![true; p.rows()];
    let mut col_alive = vec![true; p.cols()];
    let mut diag_rev = Vec::with_capacity(n);
    for _ in 0..n {
        let mut found = None;
        'cols: for c in 0..p.cols() {
            if !col_alive[c] {
                continue;
            }
            let mut pivot_row = None;
            for r in 0..p.rows() {
                if !row_alive[r] || p.get(r, c) == PatternEntry::Zero {
                    continue;
                }
                if pivot_row.is_some() {
                    continue 'cols; // two live non-Zero cells: cannot sit last
                }
                pivot_row = Some(r);
            }
            if let Some(r) = pivot_row {
                if p.get(r, c) == PatternEntry::Nonzero {
                    found = Some((r, c));
                    break;
                }
            }
        }
        let (r, c) = found?;
        row_alive[r] = false;
        col_alive[c] = false;
        diag_rev.push((r, c));
    }
    diag_rev.reverse();
    Some(RampWitness { diag: diag_rev })
}

/// Structural verdict for one step difference under the proportionality
/// assumption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum A1Verdict {
    /// Some column's forced structure dominates every other column.
    HoldsStructurally,
    /// Every candidate column has a provably non-proportional partner.
    Violated,
    /// Neither certificate applies; the semantic property is undecided.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaVerdict {
    pub step_index: usize,
    pub verdict: A1Verdict,
    /// Original column index of the witness, present when the verdict is
    /// `HoldsStructurally` and the difference has more than one column.
    pub witness_col: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assumption1Report {
    pub verdicts: Vec<DeltaVerdict>,
}

impl Assumption1Report {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict == A1Verdict::HoldsStructurally)
    }
}

fn column_cells(s: &StairForm, d: &StepDifference, c: usize) -> Vec<PatternEntry> {
    (d.row_start..d.row_start + d.height).map(|r| s.at(r, c)).collect()
}

/// `j` can be zeroed outright, or its forced cells can track `c`'s.
fn compatible(c: &[PatternEntry], j: &[PatternEntry]) -> bool {
    use PatternEntry::*;
    let zeroable = j.iter().all(|&e| e != Nonzero);
    if zeroable {
        return true;
    }
    c.iter().zip(j).all(|(&ce, &je)| match ce {
        Zero | Free => je != Nonzero,
        Nonzero => je != Zero,
    })
}

/// Proof that `j` can never be proportional to `c`, using only forced cells:
/// a forced nonzero of `j` against a forced zero of `c`, or a forced zero of
/// `j` against a forced nonzero of `c` while `j` cannot vanish entirely.
fn provably_incompatible(c: &[PatternEntry], j: &[PatternEntry]) -> bool {
    use PatternEntry::*;
    if j.iter().all(|&e| e != Nonzero) {
        return false;
    }
    c.iter()
        .zip(j)
        .any(|(&ce, &je)| (ce == Zero && je == Nonzero) || (ce == Nonzero && je == Zero))
}

/// Structural proxy for the per-step-difference proportionality assumption.
///
/// The semantic property quantifies over real parameterizations, so this
/// reports `Inconclusive` whenever the only obstructions go through Free
/// cells that a regular realization might not be able to zero.
pub fn check_assumption1(s: &StairForm) -> Assumption1Report {
    let mut verdicts = Vec::new();
    for d in step_differences(s) {
        if d.width <= 1 {
            verdicts.push(DeltaVerdict {
                step_index: d.step_index,
                verdict: A1Verdict::HoldsStructurally,
                witness_col: None,
            });
            continue;
        }
        let cols: Vec<Vec<PatternEntry>> =
            (d.col_start..d.col_start + d.width).map(|c| column_cells(s, &d, c)).collect();
        let mut witness = None;
        let mut all_refuted = true;
        for (ci, c) in cols.iter().enumerate() {
            let ok = cols.iter().enumerate().all(|(ji, j)| ji == ci || compatible(c, j));
            if ok {
                witness = Some(s.col_perm[d.col_start + ci]);
                break;
            }
            let refuted = cols
                .iter()
                .enumerate()
                .any(|(ji, j)| ji != ci && provably_incompatible(c, j));
            if !refuted {
                all_refuted = false;
            }
        }
        let (verdict, witness_col) = match witness {
            Some(w) => (A1Verdict::HoldsStructurally, Some(w)),
            None if all_refuted => (A1Verdict::Violated, None),
            None => (A1Verdict::Inconclusive, None),
        };
        verdicts.push(DeltaVerdict { step_index: d.step_index, verdict, witness_col });
    }
    Assumption1Report { verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> SelectivePattern {
        SelectivePattern::parse(s).unwrap()
    }

    #[test]
    fn diagonal_is_full_staircase() {
        let p = SelectivePattern::identity(3);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        assert!(s.is_valid());
        assert_eq!(s.steps.len(), 3);
        let lengths: Vec<usize> = s.steps.iter().map(|st| st.length).collect();
        assert_eq!(lengths, vec![1, 2, 3]);
        assert!(s.steps.iter().all(|st| st.height == 1));
    }

    #[test]
    fn all_free_is_single_step() {
        let p = SelectivePattern::filled(3, 3, PatternEntry::Free);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        assert_eq!(s.steps.len(), 1);
        assert_eq!(s.steps[0], Step { height: 3, length: 3 });
    }

    #[test]
    fn zero_rows_form_a_length_zero_step() {
        let p = parse("0 0\nx 0\nx x");
        let s = stair_decompose(&p, StairMode::Exhaustive);
        assert!(s.is_valid());
        assert_eq!(s.steps.len(), 3);
        assert_eq!(s.steps[0], Step { height: 1, length: 0 });
    }

    #[test]
    fn step_differences_partition_columns() {
        let p = parse("x 0 0\n* x 0\n0 x x");
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let ds = step_differences(&s);
        let total: usize = ds.iter().map(|d| d.width).sum();
        assert_eq!(total, s.steps.last().unwrap().length);
        for w in ds.windows(2) {
            assert_eq!(w[0].col_start + w[0].width, w[1].col_start);
        }
    }

    #[test]
    fn greedy_never_beats_exhaustive() {
        // Property over a few deterministic small patterns.
        let samples = [
            "x 0 *\n* x 0\n0 * x",
            "* * *\nx 0 0\n0 x 0",
            "x x x\nx x x\nx x x",
            "0 x 0 0\nx 0 x 0\n* * 0 x\nx 0 0 0",
        ];
        for text in samples {
            let p = parse(text);
            let ex = stair_decompose(&p, StairMode::Exhaustive);
            let gr = stair_decompose(&p, StairMode::Greedy);
            assert!(gr.is_valid());
            assert!(ex.steps.len() >= gr.steps.len(), "pattern:\n{text}");
        }
    }

    #[test]
    fn normalize_exposes_pivot_after_column_swap() {
        // Step difference [[Free, Nonzero], [Nonzero, Free]]: a swap exposes
        // a pivot at the left-top.
        let p = parse("* x\nx *");
        let s = stair_decompose(&p, StairMode::Exhaustive);
        assert_eq!(s.steps.len(), 1);
        let (ns, pivots) = normalize_steps(&s);
        assert_eq!(pivots.len(), 1);
        let piv = pivots[0];
        assert_eq!((piv.row, piv.col), (0, 0));
        assert_eq!(ns.at(0, 0), PatternEntry::Nonzero);
    }

    #[test]
    fn all_free_has_no_pivot() {
        let p = SelectivePattern::filled(2, 2, PatternEntry::Free);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let (_, pivots) = normalize_steps(&s);
        assert!(pivots.is_empty());
    }

    #[test]
    fn pivot_choice_counts_multiply() {
        // One difference with two Nonzero candidate rows, one with a single
        // candidate: two collections.
        let p = parse("x 0\nx 0\n* x");
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let it = enumerate_pivot_choices(&s);
        assert_eq!(it.cardinality(), 2);
        let all: Vec<_> = it.collect();
        assert_eq!(all.len(), 2);
        assert_ne!(all[0], all[1]);
    }

    #[test]
    fn diagonal_choice_unique() {
        let p = SelectivePattern::identity(4);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let it = enumerate_pivot_choices(&s);
        assert_eq!(it.cardinality(), 1);
        assert_eq!(it.count(), 1);
    }

    #[test]
    fn lower_triangular_is_ramp() {
        let p = parse("x 0 0\n* x 0\n* * x");
        let w = is_ramp(&p).expect("triangular pattern is a ramp");
        assert_eq!(w.diag.len(), 3);
        for (i, &(r, c)) in w.diag.iter().enumerate() {
            assert_eq!(p.get(r, c), PatternEntry::Nonzero, "diag {i}");
        }
    }

    #[test]
    fn appendix_ramp_and_counterexample() {
        // [A^lambda B] with two dedicated columns: a ramp.
        let ramp = parse("x * * 0 0\n* * * x 0\n* * * 0 x");
        assert!(is_ramp(&ramp).is_some());
        // Single actuator on the cyclic pattern: no ramp exists.
        let no_ramp = parse("* 0 x x\nx * 0 0\nx x * 0");
        assert!(is_ramp(&no_ramp).is_none());
    }

    #[test]
    fn tall_ramp_via_transpose() {
        let p = parse("x * *\n0 x *\n0 0 x\nx x x");
        let w = is_ramp(&p).expect("tall pattern contains a ramp");
        assert_eq!(w.diag.len(), 3);
    }

    #[test]
    fn assumption1_all_free_holds() {
        let p = SelectivePattern::filled(3, 3, PatternEntry::Free);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let (ns, _) = normalize_steps(&s);
        let report = check_assumption1(&ns);
        assert_eq!(report.verdicts.len(), 1);
        assert_eq!(report.verdicts[0].verdict, A1Verdict::HoldsStructurally);
        assert!(report.verdicts[0].witness_col.is_some());
    }

    #[test]
    fn assumption1_single_column_vacuous() {
        let p = SelectivePattern::identity(3);
        let s = stair_decompose(&p, StairMode::Exhaustive);
        let (ns, _) = normalize_steps(&s);
        let report = check_assumption1(&ns);
        assert!(report.all_hold());
    }

    #[test]
    fn assumption1_violated_pair() {
        // Columns [Free, Nonzero] and [Nonzero, Zero]: each candidate has a
        // provably non-proportional partner through forced cells. The block
        // is framed as a single-step stair directly, since a maximal
        // decomposition would split it.
        let p = parse("* x\nx 0");
        let single = StairForm {
            base: p,
            row_perm: vec![0, 1],
            col_perm: vec![0, 1],
            steps: vec![Step { height: 2, length: 2 }],
            maximality_certified: false,
        };
        assert!(single.is_valid());
        let report = check_assumption1(&single);
        assert_eq!(report.verdicts.len(), 1);
        assert_eq!(report.verdicts[0].verdict, A1Verdict::Violated);
    }

    #[test]
    fn assumption1_inconclusive_pair() {
        // Columns [Free, Nonzero] and [Nonzero, Free]: the only obstructions
        // run through Free cells, so neither certificate fires.
        let p = parse("* x\nx *");
        let s = stair_decompose(&p, StairMode::Exhaustive);
        // Leave unnormalized deliberately; verdicts only read the layout.
        let report = check_assumption1(&s);
        assert_eq!(report.verdicts[0].verdict, A1Verdict::Inconclusive);
    }
}
