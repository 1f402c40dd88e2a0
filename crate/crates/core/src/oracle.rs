//! Numeric ground truth for structural certificates.
//!
//! Generalized eigenvalues of regular pencils, R-controllability and
//! R-observability rank tests, the bordered-matrix fixed-mode condition over
//! sensor-availability subsets, and randomized/exhaustive falsification of
//! the structural certificates. Verdicts never prove a selective strong
//! structural property; they either exhibit a re-verifiable counterexample
//! or report an exhausted budget.

use nalgebra::{Complex, ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codesign::CodesignResult;
use crate::pattern::{lambda_pattern, PatternEntry, PencilPattern, SelectivePattern};
use crate::sample::{conforms, is_regular_pencil, sample_matrix, SampleConfig};
use crate::scalar::{s, to_f64, Scalar};
use crate::stair::{stair_decompose, step_differences, StairMode};
use crate::OracleError;

/// Actuator subsets are enumerated exactly up to this many effective
/// actuators.
pub const SUBSET_BUDGET: usize = 16;

/// Exhaustive value grids are capped at this many points.
pub const GRID_CAP: u128 = 1_000_000;

/// Strike scenarios are enumerated exactly up to this count, sampled beyond.
pub const STRIKE_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig<S: Scalar> {
    pub trials: usize,
    /// Relative singular-value threshold for numeric rank.
    pub rank_rel_tol: S,
    /// Eigenvalues closer than this collapse to one candidate.
    pub cluster_tol: S,
    /// Grid values for forced-nonzero cells (must exclude 0).
    pub nonzero_grid: Vec<S>,
    /// Grid values for free cells (should include 0).
    pub free_grid: Vec<S>,
    pub seed: u64,
    pub sample: SampleConfig<S>,
}

impl<S: Scalar> Default for OracleConfig<S> {
    fn default() -> Self {
        OracleConfig {
            trials: 200,
            rank_rel_tol: s(1e-10),
            cluster_tol: s(1e-6),
            nonzero_grid: vec![s(-2.0), s(-1.0), s(1.0), s(2.0)],
            free_grid: vec![s(-1.0), s(0.0), s(1.0)],
            seed: 0,
            sample: SampleConfig::default(),
        }
    }
}

impl<S: Scalar> OracleConfig<S> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials.max(1);
        self
    }
}

/// A concrete realization refuting a structural claim, replayable on its own.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<S: Scalar> {
    pub e_mat: DMatrix<S>,
    pub a_mat: DMatrix<S>,
    pub b_mat: Option<DMatrix<S>>,
    pub c_mat: Option<DMatrix<S>>,
    /// Channels in effect when the failure surfaced (1-based labels).
    pub channels: Option<Vec<(usize, usize)>>,
    pub lambda: Complex<S>,
    /// Rank deficit of the failing test matrix.
    pub deficiency: usize,
    /// Human-readable description of the failed check.
    pub context: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome<S: Scalar> {
    AllPassed,
    CounterexampleFound(Box<Counterexample<S>>),
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVerdict<S: Scalar> {
    pub outcome: OracleOutcome<S>,
    pub trials_run: usize,
}

impl<S: Scalar> OracleVerdict<S> {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, OracleOutcome::AllPassed)
    }

    pub fn found_counterexample(&self) -> bool {
        matches!(self.outcome, OracleOutcome::CounterexampleFound(_))
    }
}

fn to_complex<S: Scalar>(m: &DMatrix<S>) -> DMatrix<Complex<S>> {
    m.map(|x| Complex::new(x, S::zero()))
}

/// Numeric rank via singular values against `rel_tol * sigma_max`.
pub fn numeric_rank<S: Scalar>(m: &DMatrix<Complex<S>>, rel_tol: S) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(S::zero(), |acc, &v| acc.max(v));
    if smax == S::zero() {
        return 0;
    }
    sv.iter().filter(|&&v| v > rel_tol * smax).count()
}

fn hadamard_scale<S: Scalar>(m: &DMatrix<S>) -> S {
    let mut scale = S::one();
    for r in 0..m.nrows() {
        let row_norm = m.row(r).iter().map(|v| v.abs()).fold(S::zero(), |acc, v| acc + v);
        scale *= row_norm.max(s(1e-30));
    }
    scale
}

/// Finite generalized eigenvalues of a regular pencil (E, A): the roots of
/// det(A - lambda E).
///
/// Solved through a shift: with M = A - mu E invertible, the finite roots
/// are mu + 1/theta over the nonzero eigenvalues theta of M^{-1} E. This
/// stays within a standard dense eigensolver and handles singular E.
pub fn pencil_eigenvalues<S: Scalar>(
    e: &DMatrix<S>,
    a: &DMatrix<S>,
) -> Result<Vec<Complex<S>>, OracleError> {
    if e.nrows() != e.ncols() || a.nrows() != a.ncols() || e.nrows() != a.nrows() {
        return Err(OracleError::Dimension { context: "pencil_eigenvalues" });
    }
    let n = a.nrows();
    if n == 0 {
        return Err(OracleError::Dimension { context: "pencil_eigenvalues" });
    }
    let shifts = [0.0, 1.0, -1.0, 2.0, -2.0, 0.7390851, -3.1415927];
    for &mu in &shifts {
        let m = a - e * s::<S>(mu);
        let det = m.clone().lu().determinant();
        if det.abs() <= s::<S>(1e-12) * hadamard_scale(&m) {
            continue;
        }
        let lu = m.lu();
        let Some(x) = lu.solve(e) else { continue };
        let thetas = x.complex_eigenvalues();
        let theta_max = thetas.iter().map(|t| t.modulus()).fold(S::zero(), |a, b| a.max(b));
        let cutoff = s::<S>(1e-8) * theta_max.max(S::one());
        let mut eigs: Vec<Complex<S>> = thetas
            .iter()
            .filter(|t| t.modulus() > cutoff)
            .map(|t| Complex::new(s::<S>(mu), S::zero()) + Complex::new(S::one(), S::zero()) / t)
            .collect();
        eigs.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        return Ok(eigs);
    }
    Err(OracleError::SingularPencil)
}

/// Collapses eigenvalues within `tol` of an already-kept candidate.
pub fn cluster_eigenvalues<S: Scalar>(eigs: &[Complex<S>], tol: S) -> Vec<Complex<S>> {
    let mut kept: Vec<Complex<S>> = Vec::new();
    for &ev in eigs {
        if !kept.iter().any(|k| (*k - ev).modulus() <= tol) {
            kept.push(ev);
        }
    }
    kept
}

/// Deficiency witness of the R-controllability test, if any: the first
/// eigenvalue where rank [A - lambda E | B] drops below n.
pub fn controllability_deficiency<S: Scalar>(
    e: &DMatrix<S>,
    a: &DMatrix<S>,
    b: &DMatrix<S>,
    cfg: &OracleConfig<S>,
) -> Result<Option<(Complex<S>, usize)>, OracleError> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(OracleError::Dimension { context: "controllability" });
    }
    let eigs = cluster_eigenvalues(&pencil_eigenvalues(e, a)?, cfg.cluster_tol);
    let ec = to_complex(e);
    let ac = to_complex(a);
    let bc = to_complex(b);
    for lambda in eigs {
        let mut m = DMatrix::zeros(n, n + b.ncols());
        // Scaling the pencil columns by 1/max(1, |lambda|) preserves rank and
        // keeps sigma_max comparable to the B block at large eigenvalues.
        let scale = Complex::new(S::one() / lambda.modulus().max(S::one()), S::zero());
        let pencil = (&ac - &ec * lambda) * scale;
        m.view_mut((0, 0), (n, n)).copy_from(&pencil);
        m.view_mut((0, n), (n, b.ncols())).copy_from(&bc);
        let rank = numeric_rank(&m, cfg.rank_rel_tol);
        if rank < n {
            return Ok(Some((lambda, n - rank)));
        }
    }
    Ok(None)
}

/// R-controllability: rank [A - lambda E | B] = n at every finite
/// generalized eigenvalue (full rank holds automatically elsewhere).
pub fn r_controllable<S: Scalar>(
    e: &DMatrix<S>,
    a: &DMatrix<S>,
    b: &DMatrix<S>,
    cfg: &OracleConfig<S>,
) -> Result<bool, OracleError> {
    Ok(controllability_deficiency(e, a, b, cfg)?.is_none())
}

/// R-observability through the transposed controllability test.
pub fn r_observable<S: Scalar>(
    e: &DMatrix<S>,
    a: &DMatrix<S>,
    c: &DMatrix<S>,
    cfg: &OracleConfig<S>,
) -> Result<bool, OracleError> {
    if c.ncols() != a.nrows() {
        return Err(OracleError::Dimension { context: "observability" });
    }
    r_controllable(&e.transpose(), &a.transpose(), &c.transpose(), cfg)
}

/// One falsification attempt: realize the pattern triple with free cells
/// optionally zeroed, then look for a rank deficiency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TrialStyle {
    Random,
    /// Zero every free cell.
    ZeroFree,
    /// Zero free cells with high probability (structured near-degenerate).
    MostlyZeroFree,
}

fn realize_sssc_trial<S: Scalar>(
    pencil: &PencilPattern,
    b_pattern: &SelectivePattern,
    seed: u64,
    style: TrialStyle,
    cfg: &OracleConfig<S>,
) -> Option<(DMatrix<S>, DMatrix<S>, DMatrix<S>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_cfg = cfg.sample.clone();
    if style == TrialStyle::ZeroFree {
        sample_cfg.free_zero_prob = 1.0;
    } else if style == TrialStyle::MostlyZeroFree {
        sample_cfg.free_zero_prob = 0.85;
    }
    for _ in 0..cfg.sample.regularity_retries.max(1) {
        let e = sample_matrix(pencil.e_pattern(), &mut rng, &sample_cfg);
        let a = sample_matrix(pencil.a_pattern(), &mut rng, &sample_cfg);
        let b = sample_matrix(b_pattern, &mut rng, &sample_cfg);
        if is_regular_pencil(&e, &a, &mut rng) {
            return Some((e, a, b));
        }
    }
    None
}

fn check_sssc_trial<S: Scalar>(
    pencil: &PencilPattern,
    b_pattern: &SelectivePattern,
    e: DMatrix<S>,
    a: DMatrix<S>,
    b: DMatrix<S>,
    cfg: &OracleConfig<S>,
    context: &str,
) -> Option<Counterexample<S>> {
    let (lambda, deficiency) = controllability_deficiency(&e, &a, &b, cfg).ok()??;
    // Soundness gate: the counterexample must re-verify independently.
    if !conforms(&e, pencil.e_pattern(), &cfg.sample)
        || !conforms(&a, pencil.a_pattern(), &cfg.sample)
    {
        return None;
    }
    Some(Counterexample {
        e_mat: e,
        a_mat: a,
        b_mat: Some(b),
        c_mat: None,
        channels: None,
        lambda,
        deficiency,
        context: context.to_string(),
    })
}

/// Grid assignments over the non-Zero cells of (E, A, B). When the full
/// product exceeds the cap, only a prefix of the free cells varies and the
/// rest stay zero; forced-nonzero cells beyond the budget stick to the first
/// grid value.
struct GridSpec<S: Scalar> {
    cells: Vec<(usize, Vec<S>)>, // flat cell index into (E | A | B), values
    fixed: Vec<(usize, S)>,
    total: u128,
}

fn grid_spec<S: Scalar>(
    pencil: &PencilPattern,
    b_pattern: &SelectivePattern,
    cfg: &OracleConfig<S>,
) -> GridSpec<S> {
    let n = pencil.n();
    let mut varying: Vec<(usize, Vec<S>)> = Vec::new();
    let mut fixed: Vec<(usize, S)> = Vec::new();
    let mut offset = 0;
    let mut total: u128 = 1;
    for (pat, rows, cols) in [
        (pencil.e_pattern(), n, n),
        (pencil.a_pattern(), n, n),
        (b_pattern, b_pattern.rows(), b_pattern.cols()),
    ] {
        for r in 0..rows {
            for c in 0..cols {
                let flat = offset + r * cols + c;
                match pat.get(r, c) {
                    PatternEntry::Zero => {}
                    PatternEntry::Nonzero => {
                        let vals = cfg.nonzero_grid.clone();
                        if total.saturating_mul(vals.len() as u128) <= GRID_CAP {
                            total *= vals.len() as u128;
                            varying.push((flat, vals));
                        } else {
                            fixed.push((flat, cfg.nonzero_grid[0]));
                        }
                    }
                    PatternEntry::Free => {
                        let vals = cfg.free_grid.clone();
                        if total.saturating_mul(vals.len() as u128) <= GRID_CAP {
                            total *= vals.len() as u128;
                            varying.push((flat, vals));
                        } else {
                            // Free cells beyond the budget stay zero.
                        }
                    }
                }
            }
        }
        offset += rows * cols;
    }
    GridSpec { cells: varying, fixed, total }
}

fn grid_point<S: Scalar>(
    spec: &GridSpec<S>,
    mut index: u128,
    n: usize,
    b_shape: (usize, usize),
) -> (DMatrix<S>, DMatrix<S>, DMatrix<S>) {
    let mut flat = vec![S::zero(); n * n * 2 + b_shape.0 * b_shape.1];
    for &(cell, v) in &spec.fixed {
        flat[cell] = v;
    }
    for (cell, vals) in &spec.cells {
        let k = (index % vals.len() as u128) as usize;
        index /= vals.len() as u128;
        flat[*cell] = vals[k];
    }
    let e = DMatrix::from_fn(n, n, |r, c| flat[r * n + c]);
    let a = DMatrix::from_fn(n, n, |r, c| flat[n * n + r * n + c]);
    let b = DMatrix::from_fn(b_shape.0, b_shape.1, |r, c| flat[2 * n * n + r * b_shape.1 + c]);
    (e, a, b)
}

/// Searches for a conforming regular realization that fails the
/// R-controllability test. Phase 1 samples randomly, phase 2 replays
/// free-cell-zeroing adversarial variants, phase 3 sweeps an exhaustive
/// value grid on small instances (n <= 4). Never proves the property.
pub fn falsify_sssc<S: Scalar + Send + Sync>(
    pencil: &PencilPattern,
    b_pattern: &SelectivePattern,
    cfg: &OracleConfig<S>,
) -> Result<OracleVerdict<S>, OracleError> {
    if b_pattern.rows() != pencil.n() {
        return Err(OracleError::Dimension { context: "falsify_sssc" });
    }
    let mut trials_run = 0usize;

    // Phases 1 and 2: randomized plus structured sampling, parallel with
    // per-trial seeding so verdicts are order-independent.
    let styles = [TrialStyle::Random, TrialStyle::MostlyZeroFree];
    for (phase, style) in styles.iter().enumerate() {
        let t = if *style == TrialStyle::Random { cfg.trials } else { cfg.trials / 4 + 1 };
        let found = (0..t)
            .into_par_iter()
            .filter_map(|i| {
                let seed = cfg.seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(i as u64 + 1 + phase as u64 * 0x10001));
                let (e, a, b) = realize_sssc_trial(pencil, b_pattern, seed, *style, cfg)?;
                check_sssc_trial(pencil, b_pattern, e, a, b, cfg, "r_controllable failed (sampled realization)")
                    .map(|ce| (i, ce))
            })
            .min_by_key(|(i, _)| *i);
        trials_run += t;
        if let Some((_, ce)) = found {
            return Ok(OracleVerdict { outcome: OracleOutcome::CounterexampleFound(Box::new(ce)), trials_run });
        }
    }
    // Deterministic all-free-zero probe.
    if let Some((e, a, b)) = realize_sssc_trial(pencil, b_pattern, cfg.seed, TrialStyle::ZeroFree, cfg) {
        trials_run += 1;
        if let Some(ce) =
            check_sssc_trial(pencil, b_pattern, e, a, b, cfg, "r_controllable failed (free cells zeroed)")
        {
            return Ok(OracleVerdict { outcome: OracleOutcome::CounterexampleFound(Box::new(ce)), trials_run });
        }
    }

    // Phase 3: exhaustive grid on small instances.
    if pencil.n() <= 4 {
        let spec = grid_spec(pencil, b_pattern, cfg);
        let total = spec.total.min(GRID_CAP) as u64;
        let n = pencil.n();
        let b_shape = (b_pattern.rows(), b_pattern.cols());
        let found = (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                let (e, a, b) = grid_point(&spec, idx as u128, n, b_shape);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ idx);
                if !is_regular_pencil(&e, &a, &mut rng) {
                    return None;
                }
                let (lambda, deficiency) = controllability_deficiency(&e, &a, &b, cfg).ok()??;
                Some((
                    idx,
                    Counterexample {
                        e_mat: e,
                        a_mat: a,
                        b_mat: Some(b),
                        c_mat: None,
                        channels: None,
                        lambda,
                        deficiency,
                        context: "r_controllable failed (grid point)".to_string(),
                    },
                ))
            })
            .min_by_key(|(i, _)| *i);
        trials_run += total as usize;
        if let Some((_, ce)) = found {
            return Ok(OracleVerdict { outcome: OracleOutcome::CounterexampleFound(Box::new(ce)), trials_run });
        }
    }
    Ok(OracleVerdict { outcome: OracleOutcome::BudgetExhausted, trials_run })
}

/// Retained sensors for an actuator subset: sensors feeding at least one
/// actuator outside the subset. Channels are (actuator, sensor), 1-based.
pub fn retained_sensors(channels: &[(usize, usize)], p: usize, subset: &[bool]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &(a, sdx) in channels {
        debug_assert!(a >= 1 && a <= p);
        if !subset[a - 1] && !out.contains(&(sdx - 1)) {
            out.push(sdx - 1);
        }
    }
    out.sort_unstable();
    out
}

fn bordered_rank<S: Scalar>(
    ec: &DMatrix<Complex<S>>,
    ac: &DMatrix<Complex<S>>,
    bc: &DMatrix<Complex<S>>,
    cc: &DMatrix<Complex<S>>,
    lambda: Complex<S>,
    cols_b: &[usize],
    rows_c: &[usize],
    rel_tol: S,
) -> usize {
    let n = ac.nrows();
    let mut m = DMatrix::zeros(n + rows_c.len(), n + cols_b.len());
    let scale = Complex::new(S::one() / lambda.modulus().max(S::one()), S::zero());
    let pencil = (ac - ec * lambda) * scale;
    m.view_mut((0, 0), (n, n)).copy_from(&pencil);
    for (j, &col) in cols_b.iter().enumerate() {
        m.view_mut((0, n + j), (n, 1)).copy_from(&bc.column(col));
    }
    for (i, &row) in rows_c.iter().enumerate() {
        m.view_mut((n + i, 0), (1, n)).copy_from(&cc.row(row));
    }
    numeric_rank(&m, rel_tol)
}

/// Fixed modes of a realization under an information pattern.
///
/// Enumerates every actuator subset, forms the retained-sensor set, and
/// reports each finite generalized eigenvalue where the bordered matrix
/// loses rank below n. Channels use 1-based (actuator, sensor) labels into
/// the columns of `b` and rows of `c`.
pub fn fixed_modes<S: Scalar>(
    e: &DMatrix<S>,
    a: &DMatrix<S>,
    b: &DMatrix<S>,
    c: &DMatrix<S>,
    channels: &[(usize, usize)],
    cfg: &OracleConfig<S>,
) -> Result<Vec<Complex<S>>, OracleError> {
    let n = a.nrows();
    if b.nrows() != n || c.ncols() != n {
        return Err(OracleError::Dimension { context: "fixed_modes" });
    }
    let p = b.ncols();
    if p > SUBSET_BUDGET {
        return Err(OracleError::SubsetBudgetExceeded { actuators: p, budget: SUBSET_BUDGET });
    }
    let eigs = cluster_eigenvalues(&pencil_eigenvalues(e, a)?, cfg.cluster_tol);
    let ec = to_complex(e);
    let ac = to_complex(a);
    let bc = to_complex(b);
    let cc = to_complex(c);
    let mut modes: Vec<Complex<S>> = Vec::new();
    for lambda in eigs {
        let mut subset = vec![false; p];
        let mut found = false;
        for mask in 0..(1u32 << p) {
            for (i, flag) in subset.iter_mut().enumerate() {
                *flag = mask & (1 << i) != 0;
            }
            let cols_b: Vec<usize> = (0..p).filter(|&i| subset[i]).collect();
            let rows_c = retained_sensors(channels, p, &subset);
            let rank = bordered_rank(&ec, &ac, &bc, &cc, lambda, &cols_b, &rows_c, cfg.rank_rel_tol);
            if rank < n {
                found = true;
                break;
            }
        }
        if found {
            modes.push(lambda);
        }
    }
    Ok(modes)
}

/// A failure scenario: which effective actuators, sensors, and channels are
/// struck out (0-based positions into the design's effective lists).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strike {
    pub actuators: Vec<usize>,
    pub sensors: Vec<usize>,
    pub channels: Vec<usize>,
}

impl Strike {
    pub fn size(&self) -> usize {
        self.actuators.len() + self.sensors.len() + self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }
}

/// Enumerates all strike scenarios with at most `k` total failures across
/// `p` actuators, `m` sensors, and `ch` channels (including the empty one).
pub fn enumerate_strikes(p: usize, m: usize, ch: usize, k: usize) -> Vec<Strike> {
    let total = p + m + ch;
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn emit(total: usize, p: usize, m: usize, start: usize, left: usize, stack: &mut Vec<usize>, out: &mut Vec<Strike>) {
        let mut strike = Strike::default();
        for &item in stack.iter() {
            if item < p {
                strike.actuators.push(item);
            } else if item < p + m {
                strike.sensors.push(item - p);
            } else {
                strike.channels.push(item - p - m);
            }
        }
        out.push(strike);
        if left == 0 {
            return;
        }
        for next in start..total {
            stack.push(next);
            emit(total, p, m, next + 1, left - 1, stack, out);
            stack.pop();
        }
    }
    emit(total, p, m, 0, k, &mut stack, &mut out);
    out
}

/// Applies a strike to the materialized design: struck actuator columns and
/// sensor rows disappear, channels referencing them (or struck directly)
/// drop, and surviving channels re-index into the compacted frames.
fn apply_strike<S: Scalar>(
    b: &DMatrix<S>,
    c: &DMatrix<S>,
    channels: &[(usize, usize)],
    strike: &Strike,
) -> (DMatrix<S>, DMatrix<S>, Vec<(usize, usize)>) {
    let keep_cols: Vec<usize> = (0..b.ncols()).filter(|i| !strike.actuators.contains(i)).collect();
    let keep_rows: Vec<usize> = (0..c.nrows()).filter(|i| !strike.sensors.contains(i)).collect();
    let b2 = b.select_columns(&keep_cols);
    let c2 = c.select_rows(&keep_rows);
    let col_map: Vec<Option<usize>> = (0..b.ncols())
        .map(|i| keep_cols.iter().position(|&x| x == i))
        .collect();
    let row_map: Vec<Option<usize>> = (0..c.nrows())
        .map(|i| keep_rows.iter().position(|&x| x == i))
        .collect();
    let ch2: Vec<(usize, usize)> = channels
        .iter()
        .enumerate()
        .filter(|(idx, _)| !strike.channels.contains(idx))
        .filter_map(|(_, &(a, sdx))| {
            let na = col_map[a - 1]?;
            let ns = row_map[sdx - 1]?;
            Some((na + 1, ns + 1))
        })
        .collect();
    (b2, c2, ch2)
}

/// Verifies a co-design result numerically: over sampled regular
/// realizations, the unstruck design and every failure scenario within the
/// strike budget must be free of fixed modes.
///
/// `max_strikes` defaults to the design's k; scenario spaces beyond
/// [`STRIKE_CAP`] are sampled deterministically.
pub fn verify_design<S: Scalar + Send + Sync>(
    result: &CodesignResult<S>,
    pencil: &PencilPattern,
    cfg: &OracleConfig<S>,
    max_strikes: Option<usize>,
) -> Result<OracleVerdict<S>, OracleError> {
    let n = pencil.n();
    let k = max_strikes.unwrap_or(result.actuation.k);
    let p_eff = result.actuation.indices.len();
    let m_eff = result.sensing.indices.len();
    let channels = &result.info.channels;
    let mut scenarios = enumerate_strikes(p_eff, m_eff, channels.len(), k);
    if scenarios.len() > STRIKE_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5742_5f53);
        let mut sampled: Vec<Strike> = vec![Strike::default()];
        while sampled.len() < STRIKE_CAP {
            let pick = rng.gen_range(0..scenarios.len());
            sampled.push(scenarios[pick].clone());
        }
        scenarios = sampled;
    }
    let b_pat = result.actuation.materialize_effective();
    let c_pat = result.sensing.materialize_effective();
    let b_full = DMatrix::from_fn(n, p_eff, |r, cdx| {
        if cdx < p_eff && result.actuation.indices[cdx] - 1 == r {
            S::one()
        } else {
            S::zero()
        }
    });
    let c_full = DMatrix::from_fn(m_eff, n, |rdx, cdx| {
        if rdx < m_eff && result.sensing.indices[rdx] - 1 == cdx {
            S::one()
        } else {
            S::zero()
        }
    });
    let _ = (b_pat, c_pat);

    let outcomes: Vec<(usize, Counterexample<S>)> = (0..cfg.trials)
        .into_par_iter()
        .filter_map(|trial| {
            let seed = cfg.seed ^ (0xa076_1d64_78bd_642fu64.wrapping_mul(trial as u64 + 1));
            let real = crate::sample::sample_pencil_realization(pencil, seed, &cfg.sample).ok()?;
            for strike in &scenarios {
                let (b2, c2, ch2) = apply_strike(&b_full, &c_full, channels, strike);
                match fixed_modes(&real.e_mat, &real.a_mat, &b2, &c2, &ch2, cfg) {
                    Ok(modes) if modes.is_empty() => {}
                    Ok(modes) => {
                        return Some((
                            trial,
                            Counterexample {
                                e_mat: real.e_mat.clone(),
                                a_mat: real.a_mat.clone(),
                                b_mat: Some(b2),
                                c_mat: Some(c2),
                                channels: Some(ch2),
                                lambda: modes[0],
                                deficiency: 1,
                                context: format!(
                                    "fixed mode under strike (actuators {:?}, sensors {:?}, channels {:?})",
                                    strike.actuators, strike.sensors, strike.channels
                                ),
                            },
                        ));
                    }
                    Err(_) => return None,
                }
            }
            None
        })
        .collect();
    let trials_run = cfg.trials;
    if let Some((_, ce)) = outcomes.into_iter().min_by_key(|(i, _)| *i) {
        return Ok(OracleVerdict { outcome: OracleOutcome::CounterexampleFound(Box::new(ce)), trials_run });
    }
    Ok(OracleVerdict { outcome: OracleOutcome::AllPassed, trials_run })
}

/// Re-verifies a stored counterexample: the reported matrix must genuinely
/// lose rank at the reported lambda.
pub fn replay_counterexample<S: Scalar>(ce: &Counterexample<S>, cfg: &OracleConfig<S>) -> bool {
    let n = ce.a_mat.nrows();
    match (&ce.b_mat, &ce.c_mat) {
        (Some(b), None) => {
            let ec = to_complex(&ce.e_mat);
            let ac = to_complex(&ce.a_mat);
            let bc = to_complex(b);
            let mut m = DMatrix::zeros(n, n + b.ncols());
            let pencil = &ac - &ec * ce.lambda;
            m.view_mut((0, 0), (n, n)).copy_from(&pencil);
            m.view_mut((0, n), (n, b.ncols())).copy_from(&bc);
            numeric_rank(&m, cfg.rank_rel_tol) < n
        }
        (Some(b), Some(c)) => {
            let channels = ce.channels.clone().unwrap_or_default();
            matches!(
                fixed_modes(&ce.e_mat, &ce.a_mat, b, c, &channels, cfg),
                Ok(modes) if !modes.is_empty()
            )
        }
        _ => false,
    }
}

/// Stair-aware summary used by reporting: how many step differences the
/// falsifier would target. Exposed for diagnostics.
pub fn adversarial_targets(pencil: &PencilPattern) -> usize {
    let lambda = lambda_pattern(pencil);
    let stair = stair_decompose(&lambda, StairMode::Auto);
    step_differences(&stair).iter().filter(|d| d.width >= 2).count()
}

/// JSON mirror of a counterexample for replay files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleJson {
    pub e_mat: Vec<Vec<f64>>,
    pub a_mat: Vec<Vec<f64>>,
    pub b_mat: Option<Vec<Vec<f64>>>,
    pub c_mat: Option<Vec<Vec<f64>>>,
    pub channels: Option<Vec<(usize, usize)>>,
    pub lambda: (f64, f64),
    pub deficiency: usize,
    pub context: String,
}

fn matrix_to_rows<S: Scalar>(m: &DMatrix<S>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| to_f64(m[(r, c)])).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(nr, nc, |r, c| rows[r][c])
}

impl<S: Scalar> Counterexample<S> {
    pub fn to_json(&self) -> CounterexampleJson {
        CounterexampleJson {
            e_mat: matrix_to_rows(&self.e_mat),
            a_mat: matrix_to_rows(&self.a_mat),
            b_mat: self.b_mat.as_ref().map(matrix_to_rows),
            c_mat: self.c_mat.as_ref().map(matrix_to_rows),
            channels: self.channels.clone(),
            lambda: (to_f64(self.lambda.re), to_f64(self.lambda.im)),
            deficiency: self.deficiency,
            context: self.context.clone(),
        }
    }
}

impl CounterexampleJson {
    pub fn to_counterexample(&self) -> Counterexample<f64> {
        Counterexample {
            e_mat: rows_to_matrix(&self.e_mat),
            a_mat: rows_to_matrix(&self.a_mat),
            b_mat: self.b_mat.as_deref().map(rows_to_matrix),
            c_mat: self.c_mat.as_deref().map(rows_to_matrix),
            channels: self.channels.clone(),
            lambda: Complex::new(self.lambda.0, self.lambda.1),
            deficiency: self.deficiency,
            context: self.context.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dm(rows: usize, cols: usize, vals: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, vals)
    }

    fn cfg() -> OracleConfig<f64> {
        OracleConfig::default()
    }

    #[test]
    fn eigenvalues_of_diagonal_pencil() {
        let e = DMatrix::identity(2, 2);
        let a = dm(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let mut eigs = pencil_eigenvalues(&e, &a).unwrap();
        eigs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert_eq!(eigs.len(), 2);
        assert_relative_eq!(eigs[0].re, 1.0, epsilon = 1e-9);
        assert_relative_eq!(eigs[1].re, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_e_invertible_a_has_no_finite_eigenvalues() {
        let e = DMatrix::<f64>::zeros(2, 2);
        let a = dm(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let eigs = pencil_eigenvalues(&e, &a).unwrap();
        assert!(eigs.is_empty());
    }

    #[test]
    fn singular_e_degree_one_pencil() {
        // det(A - lambda E) = (2 - lambda) for E = diag(1,0), A = diag(2,1).
        let e = dm(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let a = dm(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let eigs = pencil_eigenvalues(&e, &a).unwrap();
        assert_eq!(eigs.len(), 1);
        assert_relative_eq!(eigs[0].re, 2.0, epsilon = 1e-9);
        assert_relative_eq!(eigs[0].im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn singular_pencil_detected() {
        let e = DMatrix::<f64>::zeros(2, 2);
        let a = DMatrix::<f64>::zeros(2, 2);
        assert_eq!(pencil_eigenvalues(&e, &a).unwrap_err(), OracleError::SingularPencil);
    }

    #[test]
    fn controllable_diagonal_with_shared_input() {
        let e = DMatrix::identity(2, 2);
        let a = dm(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let b = dm(2, 1, &[1.0, 1.0]);
        assert!(r_controllable(&e, &a, &b, &cfg()).unwrap());
    }

    #[test]
    fn repeated_eigenvalue_single_input_uncontrollable() {
        let e = DMatrix::identity(2, 2);
        let a = DMatrix::identity(2, 2);
        let b = dm(2, 1, &[1.0, 0.0]);
        let witness = controllability_deficiency(&e, &a, &b, &cfg()).unwrap();
        let (lambda, deficiency) = witness.expect("deficiency at lambda = 1");
        assert_relative_eq!(lambda.re, 1.0, epsilon = 1e-9);
        assert_eq!(deficiency, 1);
    }

    #[test]
    fn observability_via_transpose() {
        let e = DMatrix::identity(2, 2);
        let a = dm(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let c_good = dm(1, 2, &[1.0, 0.0]);
        let c_bad = dm(1, 2, &[0.0, 1.0]);
        assert!(r_observable(&e, &a, &c_good, &cfg()).unwrap());
        assert!(!r_observable(&e, &a, &c_bad, &cfg()).unwrap());
    }

    #[test]
    fn rank_full_away_from_eigenvalues() {
        // Sanity cross-check: at random non-eigenvalue lambdas the pencil
        // has full rank for regular pairs.
        let e = DMatrix::identity(3, 3);
        let a = dm(3, 3, &[1.0, 2.0, 0.0, 0.0, 3.0, 1.0, 0.0, 0.0, -1.0]);
        let eigs = pencil_eigenvalues(&e, &a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let lam = Complex::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            if eigs.iter().any(|ev| (ev - lam).modulus() < 1e-3) {
                continue;
            }
            let m = to_complex(&a) - to_complex(&e) * lam;
            assert_eq!(numeric_rank(&m, 1e-8), 3);
        }
    }

    #[test]
    fn falsify_finds_free_cell_counterexample() {
        // A^lambda all-free on a 2x2 with a single actuator on state 1:
        // zeroing the right free cells leaves state 2 untouchable.
        let e = SelectivePattern::parse("* 0\n0 *").unwrap();
        let a = SelectivePattern::parse("* *\n* *").unwrap();
        let pencil = PencilPattern::new(e, a).unwrap();
        let b = SelectivePattern::parse("x\n0").unwrap();
        let verdict = falsify_sssc(&pencil, &b, &cfg().with_trials(20)).unwrap();
        let OracleOutcome::CounterexampleFound(ce) = &verdict.outcome else {
            panic!("expected counterexample, got {:?}", verdict.outcome);
        };
        assert!(replay_counterexample(ce, &cfg()));
    }

    #[test]
    fn falsify_certified_pattern_exhausts_budget() {
        // Identity B certifies any pencil; no counterexample can exist.
        let e = SelectivePattern::parse("* 0\n0 *").unwrap();
        let a = SelectivePattern::parse("* *\n* *").unwrap();
        let pencil = PencilPattern::new(e, a).unwrap();
        let b = SelectivePattern::identity(2);
        let verdict = falsify_sssc(&pencil, &b, &cfg().with_trials(50)).unwrap();
        assert!(matches!(verdict.outcome, OracleOutcome::BudgetExhausted));
    }

    #[test]
    fn fixed_modes_diagonal_channels_none() {
        // Decoupled scalar loops: diagonal K leaves no fixed modes even at
        // the repeated eigenvalue (checked by brute force over all four
        // actuator subsets).
        let e = DMatrix::identity(2, 2);
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::identity(2, 2);
        let c = DMatrix::identity(2, 2);
        let channels = vec![(1, 1), (2, 2)];
        let modes = fixed_modes(&e, &a, &b, &c, &channels, &cfg()).unwrap();
        assert!(modes.is_empty(), "diagonal information pattern decouples the loops");
    }

    #[test]
    fn fixed_mode_appears_when_sensor_unconnected() {
        // Same system with only one channel: sensor 2 feeds nobody, and the
        // empty-actuator subset exhibits the mode at lambda = 1.
        let e = DMatrix::identity(2, 2);
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::identity(2, 2);
        let c = DMatrix::identity(2, 2);
        let channels = vec![(1, 1)];
        let modes = fixed_modes(&e, &a, &b, &c, &channels, &cfg()).unwrap();
        assert_eq!(modes.len(), 1);
        assert_relative_eq!(modes[0].re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn enumerate_strikes_counts() {
        let strikes = enumerate_strikes(2, 2, 2, 1);
        // Empty + 6 singletons.
        assert_eq!(strikes.len(), 7);
        let strikes2 = enumerate_strikes(2, 2, 2, 2);
        assert_eq!(strikes2.len(), 1 + 6 + 15);
    }

    #[test]
    fn counterexample_json_round_trip() {
        let ce = Counterexample {
            e_mat: DMatrix::identity(2, 2),
            a_mat: dm(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            b_mat: Some(dm(2, 1, &[1.0, 0.0])),
            c_mat: None,
            channels: None,
            lambda: Complex::new(1.0, 0.0),
            deficiency: 1,
            context: "test".into(),
        };
        let json = serde_json::to_string(&ce.to_json()).unwrap();
        let back: CounterexampleJson = serde_json::from_str(&json).unwrap();
        let ce2 = back.to_counterexample();
        assert_eq!(ce2.a_mat, ce.a_mat);
        assert!(replay_counterexample(&ce2, &cfg()));
    }
}
