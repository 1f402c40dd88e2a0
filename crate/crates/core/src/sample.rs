//! Sampling numeric realizations from pattern equivalence classes.
//!
//! Generic over the real scalar type; `f64` is the default used by the CLI,
//! `f32` works for quick sweeps. Sampling is deterministic per seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pattern::{PatternEntry, PencilPattern, SelectivePattern};
use crate::scalar::{s, to_f64, Scalar};
use crate::SampleError;

/// Controls how pattern cells are realized numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig<S: Scalar> {
    /// Lower bound on |value| for `Nonzero` cells.
    pub min_magnitude: S,
    /// Values are drawn uniformly from [-range, range].
    pub range: S,
    /// Probability that a `Free` cell is set to exactly zero.
    pub free_zero_prob: f64,
    /// Resampling budget when a regular pencil is required.
    pub regularity_retries: u32,
}

impl<S: Scalar> Default for SampleConfig<S> {
    fn default() -> Self {
        SampleConfig {
            min_magnitude: s(0.1),
            range: s(10.0),
            free_zero_prob: 0.3,
            regularity_retries: 64,
        }
    }
}

impl<S: Scalar> SampleConfig<S> {
    fn validate(&self) -> Result<(), SampleError> {
        if self.min_magnitude <= S::zero() || self.range < self.min_magnitude {
            return Err(SampleError::InvalidConfig {
                reason: "need 0 < min_magnitude <= range".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.free_zero_prob) {
            return Err(SampleError::InvalidConfig {
                reason: "free_zero_prob must lie in [0, 1]".into(),
            });
        }
        Ok(())
    }
}

/// Numeric matrices drawn from a pattern class, with a regularity certificate
/// for pencil pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization<S: Scalar> {
    pub e_mat: DMatrix<S>,
    pub a_mat: DMatrix<S>,
    pub b_mat: Option<DMatrix<S>>,
    pub c_mat: Option<DMatrix<S>>,
    /// True only if det(A - lambda E) was verified nonzero at some probe point.
    pub regular: bool,
}

fn sample_cell<S: Scalar>(entry: PatternEntry, rng: &mut ChaCha8Rng, config: &SampleConfig<S>) -> S {
    match entry {
        PatternEntry::Zero => S::zero(),
        PatternEntry::Nonzero => {
            let lo = to_f64(config.min_magnitude);
            let hi = to_f64(config.range);
            let mag = rng.gen_range(lo..=hi);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            s(sign * mag)
        }
        PatternEntry::Free => {
            if rng.gen_bool(config.free_zero_prob) {
                S::zero()
            } else {
                let hi = to_f64(config.range);
                s(rng.gen_range(-hi..=hi))
            }
        }
    }
}

/// Samples one matrix conforming to `pattern`.
pub fn sample_matrix<S: Scalar>(
    pattern: &SelectivePattern,
    rng: &mut ChaCha8Rng,
    config: &SampleConfig<S>,
) -> DMatrix<S> {
    DMatrix::from_fn(pattern.rows(), pattern.cols(), |r, c| {
        sample_cell(pattern.get(r, c), rng, config)
    })
}

/// Checks whether every entry of `m` conforms to `pattern` under the config's
/// magnitude floor.
pub fn conforms<S: Scalar>(
    m: &DMatrix<S>,
    pattern: &SelectivePattern,
    config: &SampleConfig<S>,
) -> bool {
    if m.nrows() != pattern.rows() || m.ncols() != pattern.cols() {
        return false;
    }
    pattern.iter().all(|(r, c, entry)| match entry {
        PatternEntry::Zero => m[(r, c)] == S::zero(),
        PatternEntry::Nonzero => m[(r, c)].abs() >= config.min_magnitude,
        PatternEntry::Free => true,
    })
}

/// Evaluates whether det(A - lambda E) is nonzero at some probe lambda.
///
/// A degree <= n polynomial vanishing at n+1 distinct points is identically
/// zero, so n+1 probes decide regularity up to numeric tolerance. Each
/// determinant is compared against a Hadamard-style row-norm bound so the
/// test scales with the pencil's magnitude.
pub fn is_regular_pencil<S: Scalar>(e: &DMatrix<S>, a: &DMatrix<S>, rng: &mut ChaCha8Rng) -> bool {
    let n = a.nrows();
    if n == 0 {
        return false;
    }
    for _ in 0..=n {
        let lambda: S = s(rng.gen_range(-2.0..=2.0));
        let m = a - e * lambda;
        let mut scale = S::one();
        for r in 0..n {
            let row_norm = m.row(r).iter().map(|v| v.abs()).fold(S::zero(), |acc, v| acc + v);
            scale *= row_norm.max(s(1e-30));
        }
        let det = m.lu().determinant();
        if det.abs() > s::<S>(1e-9) * scale {
            return true;
        }
    }
    false
}

/// Samples a matrix for a single pattern (no regularity involved).
pub fn sample_realization<S: Scalar>(
    pattern: &SelectivePattern,
    seed: u64,
    config: &SampleConfig<S>,
) -> Result<DMatrix<S>, SampleError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_matrix(pattern, &mut rng, config))
}

/// Samples a regular (E, A) pair from a pencil pattern, resampling until the
/// regularity certificate holds or the retry budget runs out.
pub fn sample_pencil_realization<S: Scalar>(
    pencil: &PencilPattern,
    seed: u64,
    config: &SampleConfig<S>,
) -> Result<Realization<S>, SampleError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.regularity_retries.max(1) {
        let e = sample_matrix(pencil.e_pattern(), &mut rng, config);
        let a = sample_matrix(pencil.a_pattern(), &mut rng, config);
        if is_regular_pencil(&e, &a, &mut rng) {
            return Ok(Realization { e_mat: e, a_mat: a, b_mat: None, c_mat: None, regular: true });
        }
    }
    Err(SampleError::RegularityUnreachable { retries: config.regularity_retries })
}
