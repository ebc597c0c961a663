//! Probability primitives on finite alphabets.
//!
//! All quantities are in nats. Sums run left to right over the index so that
//! repeated evaluation is bit-identical. The conventions `0 ln(0/0) = 0` and
//! `0 ln(0/q) = 0` are applied by skipping zero-mass terms before looking at
//! the reference weight.

use crate::error::{Error, Result};

/// Deviation from unit mass that is silently renormalized.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

/// Below this deviation the weights are kept bit-for-bit.
const EXACT_SLACK: f64 = 1e-12;

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}

/// `ln Σ exp(v_i)`, shifted by the maximum. Returns `-inf` for an empty slice
/// or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for &v in values {
        acc += (v - max).exp();
    }
    max + acc.ln()
}

fn validated_sum(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    let mut sum = 0.0;
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeWeight { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::NotNormalized { sum });
    }
    Ok(sum)
}

fn renormalize(weights: &mut [f64], sum: f64) {
    if (sum - 1.0).abs() > EXACT_SLACK {
        for w in weights.iter_mut() {
            *w /= sum;
        }
    }
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates and, when the mass is off by at most 1e-9, renormalizes.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        let sum = validated_sum(&weights)?;
        renormalize(&mut weights, sum);
        Ok(Self { weights })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            weights: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: index + 1,
            });
        }
        let mut weights = vec![0.0; size];
        weights[index] = 1.0;
        Ok(Self { weights })
    }

    /// Normalized `exp(log_weights)` (a softmax). Entries may underflow to 0.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::Empty);
        }
        let lse = log_sum_exp(log_weights);
        if !lse.is_finite() {
            return Err(Error::NonFinite {
                index: 0,
                value: lse,
            });
        }
        let mut weights: Vec<f64> = log_weights.iter().map(|&l| (l - lse).exp()).collect();
        let sum: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= sum;
        }
        Ok(Self { weights })
    }

    /// Caller guarantees non-negative entries summing to one.
    pub(crate) fn from_vec_unchecked(weights: Vec<f64>) -> Self {
        debug_assert!(!weights.is_empty());
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// All weights strictly positive.
    pub fn is_interior(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    pub(crate) fn require_interior(&self) -> Result<()> {
        match self.weights.iter().position(|&w| w <= 0.0) {
            Some(index) => Err(Error::NonInteriorInput { index }),
            None => Ok(()),
        }
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A probability distribution on `Ω₁ × Ω₂`, stored row-major with rows
/// indexed by the input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, mut weights: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if weights.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: weights.len(),
            });
        }
        let sum = validated_sum(&weights)?;
        renormalize(&mut weights, sum);
        Ok(Self {
            rows,
            cols,
            weights,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        let mut weights = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            weights.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, weights)
    }

    /// The independent joint `q(x)·r(y)`.
    pub fn product(q: &Distribution, r: &Distribution) -> Self {
        let mut weights = Vec::with_capacity(q.len() * r.len());
        for &qx in q.weights() {
            for &ry in r.weights() {
                weights.push(qx * ry);
            }
        }
        Self {
            rows: q.len(),
            cols: r.len(),
            weights,
        }
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), rows * cols);
        Self {
            rows,
            cols,
            weights,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.weights[x * self.cols + y]
    }

    /// Row-major view of all entries.
    pub fn flatten(&self) -> &[f64] {
        &self.weights
    }

    /// `(Σ_y p(x,y), Σ_x p(x,y))`.
    pub fn marginals(&self) -> (Distribution, Distribution) {
        let mut q = vec![0.0; self.rows];
        let mut r = vec![0.0; self.cols];
        for x in 0..self.rows {
            for y in 0..self.cols {
                let p = self.weights[x * self.cols + y];
                q[x] += p;
                r[y] += p;
            }
        }
        (
            Distribution::from_vec_unchecked(q),
            Distribution::from_vec_unchecked(r),
        )
    }
}

/// `Σ p_i ln(p_i / q_i)` over raw slices.
pub fn kl_divergence_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut acc = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::AbsoluteContinuityViolation { index });
        }
        acc += pi * (pi.ln() - qi.ln());
    }
    // rounding can leave a tiny negative residue when p == q
    Ok(acc.max(0.0))
}

/// Kullback-Leibler divergence `D(p || q)` in nats.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    kl_divergence_slices(p.weights(), q.weights())
}

/// `D(p || q⊗r)` where `q`, `r` are the marginals of `p`.
pub fn mutual_information(p: &JointDistribution) -> f64 {
    let (q, r) = p.marginals();
    let (lq, lr): (Vec<f64>, Vec<f64>) = (
        q.weights().iter().map(|v| v.ln()).collect(),
        r.weights().iter().map(|v| v.ln()).collect(),
    );
    // ln q + ln r instead of ln(q·r): the product underflows when an input
    // weight is subnormal, even though each marginal dominates the joint
    let mut acc = 0.0;
    for x in 0..p.rows() {
        for y in 0..p.cols() {
            let pxy = p.get(x, y);
            if pxy > 0.0 {
                acc += pxy * (pxy.ln() - lq[x] - lr[y]);
            }
        }
    }
    acc.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(w: &[f64]) -> Distribution {
        Distribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn mutual_information_with_subnormal_input() {
        // q(1)·r(2) = 1e-400 underflows while p(1, 2) = 1e-300 does not
        let p = JointDistribution::from_rows(&[vec![0.5, 0.5, 1e-100], vec![0.0, 0.0, 1e-300]]).unwrap();
        let mi = mutual_information(&p);
        assert!(mi.is_finite() && mi > 0.0);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&dist(&[0.5, 0.5]), &dist(&[0.5, 0.5])).unwrap(), 0.0);
        let d = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
        let d = kl_divergence(&dist(&[0.25, 0.75]), &dist(&[0.75, 0.25])).unwrap();
        let expected = 0.25 * (1.0f64 / 3.0).ln() + 0.75 * 3.0f64.ln();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.549_306_144_334_054_9).abs() < 1e-12);
    }

    #[test]
    fn kl_zero_conventions() {
        // 0 ln(0/0) = 0
        let d = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[1.0, 0.0])).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn kl_errors() {
        let err = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::AbsoluteContinuityViolation { index: 1 });
        let err = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[0.2, 0.3, 0.5])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn mutual_information_examples() {
        let q = dist(&[0.3, 0.7]);
        let r = dist(&[0.6, 0.1, 0.3]);
        assert!(mutual_information(&JointDistribution::product(&q, &r)) < 1e-15);

        let p = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!((mutual_information(&p) - std::f64::consts::LN_2).abs() < 1e-15);

        // brute-force double sum
        let rows: [[f64; 2]; 2] = [[0.4, 0.1], [0.1, 0.4]];
        let mut oracle = 0.0f64;
        for x in 0..2 {
            for y in 0..2 {
                let qx = rows[x][0] + rows[x][1];
                let ry = rows[0][y] + rows[1][y];
                oracle += rows[x][y] * (rows[x][y] / (qx * ry)).ln();
            }
        }
        assert!((oracle - 0.192_744_757_021_757_53).abs() < 1e-15);
        let p = JointDistribution::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap();
        assert!((mutual_information(&p) - oracle).abs() < 1e-15);
    }

    #[test]
    fn marginal_examples() {
        let p = JointDistribution::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let (q, r) = p.marginals();
        assert_eq!(q.weights(), &[0.5, 0.5]);
        assert_eq!(r.weights(), &[0.5, 0.5]);

        let p = JointDistribution::from_rows(&[vec![0.2, 0.3], vec![0.1, 0.4]]).unwrap();
        let (q, r) = p.marginals();
        assert!(q.max_abs_diff(&dist(&[0.5, 0.5])) < 1e-15);
        assert!(r.max_abs_diff(&dist(&[0.3, 0.7])) < 1e-15);

        let p = JointDistribution::product(&dist(&[0.3, 0.7]), &dist(&[0.6, 0.4]));
        let (q, r) = p.marginals();
        assert!(q.max_abs_diff(&dist(&[0.3, 0.7])) < 1e-15);
        assert!(r.max_abs_diff(&dist(&[0.6, 0.4])) < 1e-15);
    }

    #[test]
    fn construction_normalizes_small_deviation_only() {
        let d = Distribution::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        let s: f64 = d.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(matches!(
            Distribution::new(vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Distribution::new(vec![1.5, -0.5]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(Distribution::new(vec![]), Err(Error::Empty)));
        assert!(matches!(
            Distribution::new(vec![f64::NAN, 1.0]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        let d = Distribution::from_log_weights(&[-1000.0, -1000.0]).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let p = JointDistribution::from_rows(&[vec![0.13, 0.21, 0.07], vec![0.19, 0.11, 0.29]]).unwrap();
        let a = mutual_information(&p);
        for _ in 0..10 {
            assert_eq!(a.to_bits(), mutual_information(&p).to_bits());
        }
    }
}
