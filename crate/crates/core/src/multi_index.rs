//! Multi-indices labelling mixed partial derivatives, and binomial helpers.

use std::fmt;
use std::ops::{Add, Index};

use serde::{Deserialize, Serialize};

use crate::scalar::GaussianRational;

/// An N-tuple of non-negative integers `(m_0, .., m_{N-1})`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// Unit vector in direction `mu`.
    pub fn unit(n: usize, mu: usize) -> Self {
        let mut v = vec![0; n];
        v[mu] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|m| = Σ m_μ`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn is_le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self - other`, defined only when non-negative componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.is_le(self) {
            Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn plus_unit(&self, mu: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[mu] += 1;
        MultiIndex(v)
    }

    pub fn minus_unit(&self, mu: usize) -> Option<MultiIndex> {
        if self.0[mu] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[mu] -= 1;
        Some(MultiIndex(v))
    }

    /// `m! = Π m_μ!` as an integer.
    pub fn factorial(&self) -> u128 {
        self.0.iter().map(|&k| (1..=k as u128).product::<u128>()).product()
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// All multi-indices of length `n` with `|m| <= p`, in graded-lexicographic order.
///
/// Within one order, tuples are listed so that larger leading components come
/// first: for `n = 2, p = 1` this gives `(0,0), (1,0), (0,1)`.
pub fn enumerate_multi_indices(n: usize, p: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for ell in 0..=p {
        out.extend(multi_indices_of_order(n, ell));
    }
    out
}

/// All multi-indices of length `n` with `|m| == ell`, leading component descending.
pub fn multi_indices_of_order(n: usize, ell: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == n {
            cur.push(rest);
            out.push(MultiIndex(cur.clone()));
            cur.pop();
            return;
        }
        for k in (0..=rest).rev() {
            cur.push(k);
            rec(n, rest - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if ell == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(n, ell, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Ordinary binomial coefficient; zero when `k < 0` or `k > n` (for `n >= 0`).
pub fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Product of componentwise binomials `Π binom(n_μ, m_μ)`.
pub fn multi_binomial_int(n: &MultiIndex, m: &MultiIndex) -> i128 {
    n.0.iter().zip(&m.0).map(|(&a, &b)| binom(a as i64, b as i64)).product()
}

/// Signed variant used where `m` may be shifted out of range (`m - μ̄`).
pub fn multi_binomial_signed(n: &MultiIndex, m: &[i64]) -> i128 {
    n.0.iter().zip(m).map(|(&a, &b)| binom(a as i64, b)).product()
}

pub fn multi_binomial(n: &MultiIndex, m: &MultiIndex) -> GaussianRational {
    GaussianRational::from_int(multi_binomial_int(n, m) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(n: usize, p: u32) -> usize {
        // odometer over [0, p]^n
        let mut count = 0;
        let total = (p as usize + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut s = 0;
            for _ in 0..n {
                s += c % (p as usize + 1);
                c /= p as usize + 1;
            }
            if s <= p as usize {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_multi_indices(2, 1);
        assert_eq!(e, vec![MultiIndex(vec![0, 0]), MultiIndex(vec![1, 0]), MultiIndex(vec![0, 1])]);
        assert_eq!(enumerate_multi_indices(1, 0), vec![MultiIndex(vec![0])]);
        assert_eq!(enumerate_multi_indices(3, 2).len(), 10);
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        for n in 1..=4 {
            for p in 0..=4 {
                let e = enumerate_multi_indices(n, p);
                assert_eq!(e.len(), brute_count(n, p));
                assert_eq!(e.len() as i128, binom((n as u32 + p) as i64, p as i64));
                let mut sorted = e.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), e.len());
            }
        }
    }

    #[test]
    fn multi_binomial_examples() {
        let n = MultiIndex(vec![2, 1]);
        assert_eq!(multi_binomial(&n, &MultiIndex(vec![1, 0])), GaussianRational::from_int(2));
        assert_eq!(multi_binomial(&n, &n), GaussianRational::from_int(1));
        assert_eq!(
            multi_binomial(&MultiIndex(vec![1, 0]), &MultiIndex(vec![0, 2])),
            GaussianRational::from_int(0)
        );
    }

    #[test]
    fn factorial_oracle() {
        // n!/(m!(n-m)!) computed from factorials
        for n in enumerate_multi_indices(2, 4) {
            for m in enumerate_multi_indices(2, 4) {
                let expect = match n.checked_sub(&m) {
                    Some(d) => (n.factorial() / (m.factorial() * d.factorial())) as i128,
                    None => 0,
                };
                assert_eq!(multi_binomial_int(&n, &m), expect);
            }
        }
    }

    #[test]
    fn binomial_row_sums() {
        for k in 0..=6u32 {
            let n = MultiIndex(vec![k]);
            let s: i128 = (0..=k).map(|j| multi_binomial_int(&n, &MultiIndex(vec![j]))).sum();
            assert_eq!(s, 1 << k);
        }
        // the N > 1 product also sums to 2^{|n|}
        for n in enumerate_multi_indices(3, 4) {
            let s: i128 = enumerate_multi_indices(3, 4)
                .iter()
                .filter(|m| m.is_le(&n))
                .map(|m| multi_binomial_int(&n, m))
                .sum();
            assert_eq!(s, 1 << n.order());
        }
    }
}
