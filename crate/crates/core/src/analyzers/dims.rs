//! Per-timestep interestingness formulas.
//!
//! Each function maps already-extracted model outputs to a scalar in
//! `[-1, 1]`. None of them look at neighbouring timesteps except through
//! explicit arguments; the history bookkeeping lives in
//! [`super::analyze`].

use alloc::vec::Vec;

use crate::math::{atan, clamp, exp, fabs, log, sin, sqrt, LN_2PI_E};
use crate::trace::{AtomDistribution, DiscreteDistribution, EnsembleMember, EnsemblePrediction, GaussianSpec};

use super::NormalizationState;

/// Default slope amplification for Goal Conduciveness.
pub const DEFAULT_RHO: f64 = 100.0;

/// Min-max scaled value in `[0, 1]`; `0.5` when the range is degenerate.
pub fn normalized_value(v: f64, norm: &NormalizationState) -> f64 {
    let width = norm.v_max - norm.v_min;
    if width <= 0.0 {
        return 0.5;
    }
    clamp((v - norm.v_min) / width, 0.0, 1.0)
}

/// Value: `2 V01(s_t) - 1`, zero for a constant value function.
pub fn value(v: f64, norm: &NormalizationState) -> f64 {
    2.0 * normalized_value(v, norm) - 1.0
}

/// Pielou's evenness `J = H / log n` with `0 log 0 = 0`. Defined as 0 for `n = 1`.
pub fn pielou_evenness(probs: &[f64]) -> f64 {
    let n = probs.len();
    if n < 2 {
        return 0.0;
    }
    let h: f64 = probs.iter().filter(|p| **p > 0.0).map(|p| -p * log(*p)).sum();
    clamp(h / log(n as f64), 0.0, 1.0)
}

/// Confidence for a discrete policy factor: `1 - 2 J(pi)`.
///
/// A single-action factor is forced, hence maximally confident (`+1`).
pub fn confidence_discrete(pi: &DiscreteDistribution) -> f64 {
    if pi.len() < 2 {
        return 1.0;
    }
    1.0 - 2.0 * pielou_evenness(&pi.probs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DispersionError {
    #[error("standard deviation must be positive")]
    NonPositiveStddev,
    #[error("bounds must be finite with lower < upper and match the Gaussian's dimension")]
    BadBounds,
    #[error("reference scale must be finite and positive")]
    BadScale,
}

/// Dispersion of a diagonal Gaussian relative to the uniform distribution
/// on the action box: `min(1, exp(h(pi)) / exp(h(U)))`, where `h` is
/// differential entropy.
///
/// `exp(h)` of a Gaussian is `prod sqrt(2 pi e) sigma_i`, and of the
/// uniform box `prod (upper_i - lower_i)`, so the ratio is evaluated in log
/// space. Zero for a point mass, one at (or beyond) the uniform's spread.
/// This is a stand-in for a relative-entropy dispersion coefficient.
pub fn gaussian_dispersion(pi: &GaussianSpec, lower: &[f64], upper: &[f64]) -> Result<f64, DispersionError> {
    if pi.stddev.iter().any(|s| !(*s > 0.0)) {
        return Err(DispersionError::NonPositiveStddev);
    }
    if lower.len() != pi.dim() || upper.len() != pi.dim() {
        return Err(DispersionError::BadBounds);
    }
    let mut log_ratio = 0.0;
    for ((s, l), u) in pi.stddev.iter().zip(lower).zip(upper) {
        let width = u - l;
        if !(width.is_finite() && width > 0.0) {
            return Err(DispersionError::BadBounds);
        }
        log_ratio += 0.5 * LN_2PI_E + log(*s) - log(width);
    }
    Ok(exp(log_ratio.min(0.0)))
}

/// Confidence for a continuous (Gaussian) policy factor: `1 - 2 J_c`.
pub fn confidence_continuous(pi: &GaussianSpec, lower: &[f64], upper: &[f64]) -> Result<f64, DispersionError> {
    Ok(1.0 - 2.0 * gaussian_dispersion(pi, lower, upper)?)
}

/// Backward finite-difference slope of the normalized value with unit
/// spacing: second-order accurate when `v_prev2` is known, first-order
/// otherwise.
pub fn value_slope(v_t: f64, v_prev: f64, v_prev2: Option<f64>) -> f64 {
    match v_prev2 {
        Some(v2) => 1.5 * v_t - 2.0 * v_prev + 0.5 * v2,
        None => v_t - v_prev,
    }
}

/// Goal Conduciveness: `sin(atan(rho * dV/dt))`, i.e. `x / sqrt(1 + x^2)`.
pub fn goal_conduciveness(v_t: f64, v_prev: f64, v_prev2: Option<f64>, rho: f64) -> f64 {
    sin(atan(rho * value_slope(v_t, v_prev, v_prev2)))
}

/// Incongruity: TD error `r + gamma V_t - V_{t-1}` divided by the reward
/// range width and clamped to `[-1, 1]`. Zero for a degenerate range.
pub fn incongruity(reward: f64, v_t: f64, v_prev: f64, gamma: f64, reward_width: f64) -> f64 {
    if !(reward_width > 0.0) {
        return 0.0;
    }
    clamp((reward + gamma * v_t - v_prev) / reward_width, -1.0, 1.0)
}

/// Riskiness from a discrete policy: `2 (p_(1) - p_(2)) - 1` with the two
/// largest probabilities (ties give `p_(1) = p_(2)`). `None` for `n < 2`.
pub fn riskiness_policy(pi: &DiscreteDistribution) -> Option<f64> {
    if pi.len() < 2 {
        return None;
    }
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &p in &pi.probs {
        if p > first {
            second = first;
            first = p;
        } else if p > second {
            second = p;
        }
    }
    Some(clamp(2.0 * (first - second) - 1.0, -1.0, 1.0))
}

/// Riskiness from action values: best-minus-worst spread over the
/// dataset-wide Q range, mapped with `2x - 1`. A zero range gives `-1`.
pub fn riskiness_value(q: &[f64], q_range_width: f64) -> Option<f64> {
    if q.len() < 2 {
        return None;
    }
    if !(q_range_width > 0.0) {
        return Some(-1.0);
    }
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = q.iter().copied().fold(f64::INFINITY, f64::min);
    Some(clamp(2.0 * (max - min) / q_range_width - 1.0, -1.0, 1.0))
}

/// Leik's ordinal dispersion `D = 2 sum_k d_k / (K - 1)` where
/// `d_k = min(c_k, 1 - c_k)` over cumulative probabilities `c_k`. The sum
/// runs over every atom; the last term is zero since `c_K = 1`.
pub fn leik_dispersion(probs: &[f64]) -> f64 {
    let k = probs.len();
    if k < 2 {
        return 0.0;
    }
    let mut c = 0.0;
    let mut total = 0.0;
    for &p in probs {
        c += p;
        let c_clamped = clamp(c, 0.0, 1.0);
        total += c_clamped.min(1.0 - c_clamped);
    }
    clamp(2.0 * total / (k - 1) as f64, 0.0, 1.0)
}

/// Peaks at `x = 0.5`, `-1` at both ends of `[0, 1]`.
#[inline]
pub fn dispersion_shape(x: f64) -> f64 {
    1.0 - 4.0 * fabs(x - 0.5)
}

/// Stochasticity from per-action return distributions: the mean over
/// actions of `1 - 4 |D - 0.5|`.
pub fn stochasticity_discrete(q: &[AtomDistribution]) -> Option<f64> {
    if q.is_empty() {
        return None;
    }
    let sum: f64 = q.iter().map(|d| dispersion_shape(leik_dispersion(&d.probs))).sum();
    Some(clamp(sum / q.len() as f64, -1.0, 1.0))
}

/// Bounded coefficient of variation `sigma / (sigma + |mu| + s0)` with
/// `s0 = scale / 10`. Lies in `[0, 1)`; zero spread maps to zero.
pub fn bounded_cv(mean: f64, stddev: f64, scale: f64) -> Result<f64, DispersionError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(DispersionError::BadScale);
    }
    if !(stddev >= 0.0) {
        return Err(DispersionError::NonPositiveStddev);
    }
    let s0 = scale / 10.0;
    Ok(stddev / (stddev + fabs(mean) + s0))
}

/// Stochasticity from Gaussian predictions: the bounded coefficient of
/// variation of every component of every prediction, shaped with
/// `1 - 4 |x - 0.5|` and averaged.
pub fn stochasticity_continuous(preds: &[&GaussianSpec], scale: f64) -> Result<Option<f64>, DispersionError> {
    let mut total = 0.0;
    let mut n = 0usize;
    for g in preds {
        for (m, s) in g.mean.iter().zip(&g.stddev) {
            total += dispersion_shape(bounded_cv(*m, *s, scale)?);
            n += 1;
        }
    }
    if n == 0 {
        return Ok(None);
    }
    Ok(Some(clamp(total / n as f64, -1.0, 1.0)))
}

/// `1 - cos(a, b)` clamped to `[0, 1]`. Two zero vectors are at distance 0;
/// a zero vector is at distance 1 from any nonzero vector.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let nb = sqrt(b.iter().map(|x| x * x).sum::<f64>());
    match (na > 0.0, nb > 0.0) {
        (false, false) => 0.0,
        (true, false) | (false, true) => 1.0,
        (true, true) => clamp(1.0 - dot / (na * nb), 0.0, 1.0),
    }
}

/// Squared Hellinger distance between diagonal Gaussians, in `[0, 1]`.
pub fn hellinger_sq(p: &GaussianSpec, q: &GaussianSpec) -> f64 {
    let mut log_bc = 0.0;
    for i in 0..p.dim().min(q.dim()) {
        let (m1, s1) = (p.mean[i], p.stddev[i]);
        let (m2, s2) = (q.mean[i], q.stddev[i]);
        let var_sum = s1 * s1 + s2 * s2;
        log_bc += 0.5 * log(2.0 * s1 * s2 / var_sum) - (m1 - m2) * (m1 - m2) / (4.0 * var_sum);
    }
    clamp(1.0 - exp(log_bc), 0.0, 1.0)
}

fn member_distance(a: &EnsembleMember, b: &EnsembleMember) -> f64 {
    match (a, b) {
        (EnsembleMember::Point(x), EnsembleMember::Point(y)) => cosine_distance(x, y),
        (EnsembleMember::Gaussian(x), EnsembleMember::Gaussian(y)) => hellinger_sq(x, y),
        _ => 1.0,
    }
}

/// Familiarity: `1 - (2 / K^2) sum_{i,j} d(i, j)` over all ordered member
/// pairs, including the zero diagonal.
pub fn familiarity(ens: &EnsemblePrediction) -> Option<f64> {
    let k = ens.members.len();
    if k < 2 {
        return None;
    }
    let mut total = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            total += 2.0 * member_distance(&ens.members[i], &ens.members[j]);
        }
    }
    Some(clamp(1.0 - 2.0 * total / (k * k) as f64, -1.0, 1.0))
}

/// Arithmetic mean of per-factor values.
pub fn aggregate_factors(values: &[f64]) -> Option<f64> {
    crate::stats::mean(values)
}

pub(crate) fn gaussians(ens: &EnsemblePrediction) -> Vec<&GaussianSpec> {
    ens.members
        .iter()
        .filter_map(|m| match m {
            EnsembleMember::Gaussian(g) => Some(g),
            EnsembleMember::Point(_) => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::ValueMode;
    use alloc::vec;

    fn norm(lo: f64, hi: f64) -> NormalizationState {
        NormalizationState {
            v_min: lo,
            v_max: hi,
            mode: ValueMode::Offline,
        }
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn value_min_max_examples() {
        let n = norm(2.0, 6.0);
        close(value(2.0, &n), -1.0);
        close(value(4.0, &n), 0.0);
        close(value(6.0, &n), 1.0);
        close(value(3.0, &norm(3.0, 3.0)), 0.0);
    }

    #[test]
    fn confidence_discrete_examples() {
        close(confidence_discrete(&DiscreteDistribution::uniform(4)), -1.0);
        close(confidence_discrete(&DiscreteDistribution { probs: vec![0.0, 1.0, 0.0] }), 1.0);
        close(confidence_discrete(&DiscreteDistribution { probs: vec![0.5, 0.5, 0.0, 0.0] }), 0.0);
        close(confidence_discrete(&DiscreteDistribution { probs: vec![1.0] }), 1.0);
    }

    #[test]
    fn confidence_continuous_anchors() {
        let width = 2.0;
        let reference = width / exp(0.5 * LN_2PI_E);
        let at = |s: f64| confidence_continuous(&GaussianSpec { mean: vec![0.0], stddev: vec![s] }, &[-1.0], &[1.0]).unwrap();
        close(at(reference), -1.0);
        close(at(reference * 3.0), -1.0);
        close(at(reference / 2.0), 0.0);
        assert!(at(1e-12) > 1.0 - 1e-10);
        assert_eq!(
            confidence_continuous(&GaussianSpec { mean: vec![0.0], stddev: vec![0.0] }, &[-1.0], &[1.0]),
            Err(DispersionError::NonPositiveStddev)
        );
    }

    #[test]
    fn goal_conduciveness_examples() {
        close(goal_conduciveness(0.2, 0.1, Some(0.0), DEFAULT_RHO), 10.0 / sqrt(101.0));
        close(goal_conduciveness(0.4, 0.4, Some(0.4), DEFAULT_RHO), 0.0);
        close(goal_conduciveness(0.3, 0.2, None, 1.0), 0.1 / sqrt(1.01));
    }

    #[test]
    fn incongruity_examples() {
        close(incongruity(1.0, 2.0, 2.0, 0.9, 10.0), 0.08);
        close(incongruity(2.0 - 0.9 * 3.0, 3.0, 2.0, 0.9, 5.0), 0.0);
        close(incongruity(1.0, 0.0, 0.0, 0.9, 0.0), 0.0);
        close(incongruity(100.0, 0.0, 0.0, 0.9, 1.0), 1.0);
    }

    #[test]
    fn riskiness_examples() {
        close(riskiness_policy(&DiscreteDistribution { probs: vec![0.0, 1.0] }).unwrap(), 1.0);
        close(riskiness_policy(&DiscreteDistribution::uniform(5)).unwrap(), -1.0);
        close(riskiness_policy(&DiscreteDistribution { probs: vec![0.6, 0.3, 0.1] }).unwrap(), -0.4);
        close(riskiness_policy(&DiscreteDistribution { probs: vec![0.4, 0.4, 0.2] }).unwrap(), -1.0);
        assert_eq!(riskiness_policy(&DiscreteDistribution { probs: vec![1.0] }), None);
        close(riskiness_value(&[2.0, 2.0, 2.0], 4.0).unwrap(), -1.0);
        close(riskiness_value(&[1.0, 5.0], 4.0).unwrap(), 1.0);
        close(riskiness_value(&[1.0, 3.0], 4.0).unwrap(), 0.0);
        close(riskiness_value(&[1.0, 3.0], 0.0).unwrap(), -1.0);
    }

    #[test]
    fn leik_examples() {
        close(leik_dispersion(&[0.0, 1.0, 0.0]), 0.0);
        close(leik_dispersion(&[0.5, 0.0, 0.5]), 1.0);
        close(dispersion_shape(leik_dispersion(&[0.25, 0.5, 0.25])), 1.0);
    }

    #[test]
    fn cosine_conventions() {
        close(cosine_distance(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        close(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]), 1.0);
        close(cosine_distance(&[1.0, 0.0], &[0.0, 3.0]), 1.0);
        close(cosine_distance(&[1.0, 0.0], &[-1.0, 0.0]), 1.0);
        close(cosine_distance(&[1.0, 1.0], &[2.0, 2.0]), 0.0);
    }

    #[test]
    fn hellinger_identity_and_bounds() {
        let g = GaussianSpec { mean: vec![0.0, 1.0], stddev: vec![1.0, 2.0] };
        close(hellinger_sq(&g, &g), 0.0);
        let far = GaussianSpec { mean: vec![1e6, 1.0], stddev: vec![1.0, 2.0] };
        close(hellinger_sq(&g, &far), 1.0);
    }

    #[test]
    fn familiarity_examples() {
        let same = EnsemblePrediction { members: vec![EnsembleMember::Point(vec![1.0, 2.0]); 5] };
        close(familiarity(&same).unwrap(), 1.0);
        let ortho = EnsemblePrediction {
            members: vec![EnsembleMember::Point(vec![1.0, 0.0]), EnsembleMember::Point(vec![0.0, 1.0])],
        };
        close(familiarity(&ortho).unwrap(), 0.0);
    }

    #[test]
    fn aggregate_examples() {
        close(aggregate_factors(&[0.7]).unwrap(), 0.7);
        close(aggregate_factors(&[-1.0, 1.0]).unwrap(), 0.0);
        close(aggregate_factors(&[0.2, 0.4, 0.6]).unwrap(), 0.4);
    }
}
