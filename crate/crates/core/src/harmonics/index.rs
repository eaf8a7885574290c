use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Spherical-harmonic label `α = (α_1, …, α_{d-1})` with
/// `|α_1| ≤ α_2 ≤ … ≤ α_{d-1}`; the degree is `α_{d-1}`.
///
/// Ordering is lexicographic on the entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct MultiIndex {
    entries: Box<[i64]>,
}

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.len() < 2 {
            return domain(format!("a multi-index needs at least 2 entries (d >= 3), got {}", entries.len()));
        }
        if entries[0].abs() > entries[1] {
            return domain(format!("|alpha_1| <= alpha_2 violated in {entries:?}"));
        }
        if entries.windows(2).skip(1).any(|w| w[0] > w[1]) {
            return domain(format!("entries must be non-decreasing after alpha_1 in {entries:?}"));
        }
        Ok(Self { entries: entries.into_boxed_slice() })
    }

    /// The index `(0, …, 0)` of length `d - 1`.
    pub fn zero(d: usize) -> Self {
        Self { entries: vec![0; d - 1].into_boxed_slice() }
    }

    /// Ambient dimension `d` of the sphere `S^{d-1}` the index labels.
    pub fn d(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn degree(&self) -> usize {
        self.entries[self.entries.len() - 1] as usize
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `α_j` with the 1-based numbering of the polar coordinates.
    pub fn get(&self, j: usize) -> i64 {
        self.entries[j - 1]
    }

    /// Truncation `(α_1, …, α_j)`, a harmonic on `S^j`.
    pub fn prefix(&self, j: usize) -> Result<Self> {
        if j < 2 || j > self.entries.len() {
            return domain(format!("prefix length {j} out of range for {self}"));
        }
        Ok(Self { entries: self.entries[..j].to_vec().into_boxed_slice() })
    }
}

impl TryFrom<Vec<i64>> for MultiIndex {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MultiIndex> for Vec<i64> {
    fn from(m: MultiIndex) -> Self {
        m.entries.into_vec()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Lexicographic enumeration of `τ_k^{d-1}`, optionally restricted to
/// `α_1 = … = α_z = 0` (which is exactly `_zτ_k^{d-1}`).
#[derive(Debug, Clone)]
pub struct TauIter {
    k: i64,
    zero_prefix: usize,
    state: Vec<i64>,
    done: bool,
}

impl TauIter {
    fn new(d: usize, k: usize, zero_prefix: usize) -> Self {
        assert!(d >= 3, "spherical harmonic indices need d >= 3");
        let mut it = Self { k: k as i64, zero_prefix, state: vec![0; d - 1], done: false };
        let last = it.state.len() - 1;
        it.state[last] = it.k;
        it.reset_from(0);
        it
    }

    fn lower(&self, i: usize) -> i64 {
        if i < self.zero_prefix {
            0
        } else if i == 0 {
            -self.k
        } else if i == 1 {
            self.state[0].abs()
        } else {
            self.state[i - 1]
        }
    }

    fn upper(&self, i: usize) -> i64 {
        if i < self.zero_prefix {
            0
        } else {
            self.k
        }
    }

    fn reset_from(&mut self, start: usize) {
        for i in start..self.state.len() - 1 {
            self.state[i] = self.lower(i);
        }
    }

    fn advance(&mut self) {
        let free = self.state.len() - 1;
        for i in (0..free).rev() {
            if self.state[i] < self.upper(i) {
                self.state[i] += 1;
                self.reset_from(i + 1);
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for TauIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        if self.done {
            return None;
        }
        let out = MultiIndex { entries: self.state.clone().into_boxed_slice() };
        self.advance();
        Some(out)
    }
}

/// Lazy lexicographic iterator over `τ_k^{d-1}`.
pub fn tau_iter(d: usize, k: usize) -> TauIter {
    TauIter::new(d, k, 0)
}

/// Lazy iterator over `_jτ_k^{d-1} = {α ∈ τ_k^{d-1} : α_j = 0}`, `1 ≤ j ≤ d-2`.
pub fn tau_jzero_iter(d: usize, k: usize, j: usize) -> Result<TauIter> {
    if d < 3 || j == 0 || j > d - 2 {
        return domain(format!("j must lie in [1, d-2] for d = {d}, got {j}"));
    }
    // α_j = 0 forces α_1 = … = α_j = 0 by the ordering constraint.
    Ok(TauIter::new(d, k, j))
}

/// `τ_k^{d-1}` in lexicographic order.
pub fn enumerate_tau(d: usize, k: usize) -> Vec<MultiIndex> {
    tau_iter(d, k).collect()
}

/// `_jτ_k^{d-1}` in lexicographic order.
pub fn enumerate_tau_jzero(d: usize, k: usize, j: usize) -> Result<Vec<MultiIndex>> {
    Ok(tau_jzero_iter(d, k, j)?.collect())
}

fn binomial(n: u128, r: u128) -> Option<u128> {
    let r = r.min(n - r.min(n));
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc · (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `N_{k,d} = (2k+d-2)(k+d-3)! / (k!(d-2)!)`, exact.
pub fn dim_harmonic(d: usize, k: usize) -> Result<u128> {
    if d < 3 {
        return domain(format!("dim_harmonic needs d >= 3, got {d}"));
    }
    if k == 0 {
        return Ok(1);
    }
    let (d, k) = (d as u128, k as u128);
    let overflow = || Error::Overflow(format!("N_(k={k}, d={d}) exceeds u128"));
    let b = binomial(k + d - 3, k).ok_or_else(overflow)?;
    let n = b.checked_mul(2 * k + d - 2).ok_or_else(overflow)?;
    Ok(n / (d - 2))
}

/// `|_jτ_k^{d-1}| = C(k + d-2-j, d-2-j)`, exact.
pub fn jzero_count(d: usize, k: usize, j: usize) -> Result<u128> {
    if d < 3 || j == 0 || j > d - 2 {
        return domain(format!("j must lie in [1, d-2] for d = {d}, got {j}"));
    }
    let free = (d - 2 - j) as u128;
    binomial(k as u128 + free, free).ok_or_else(|| Error::Overflow(format!("|_{j}tau_{k}| exceeds u128")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    /// Brute force: all integer vectors in a box satisfying the ordering.
    fn brute_force_tau(d: usize, k: usize) -> Vec<Vec<i64>> {
        let k = k as i64;
        let n = d - 1;
        let mut out = Vec::new();
        let mut v = vec![-k; n];
        loop {
            let ok = v[n - 1] == k && v[0].abs() <= v[1] && v.windows(2).skip(1).all(|w| w[0] <= w[1]);
            if ok {
                out.push(v.clone());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if v[i] < k {
                    v[i] += 1;
                    break;
                }
                v[i] = -k;
            }
        }
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_tau(3, 0), vec![idx(&[0, 0])]);
        assert_eq!(enumerate_tau(3, 1), vec![idx(&[-1, 1]), idx(&[0, 1]), idx(&[1, 1])]);
        assert_eq!(
            enumerate_tau(4, 1),
            vec![idx(&[-1, 1, 1]), idx(&[0, 0, 1]), idx(&[0, 1, 1]), idx(&[1, 1, 1])]
        );
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for d in 3..=6 {
            for k in 0..=4 {
                let got: Vec<Vec<i64>> = tau_iter(d, k).map(Vec::from).collect();
                assert_eq!(got, brute_force_tau(d, k), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn dimension_values() {
        for d in 3..10 {
            assert_eq!(dim_harmonic(d, 0).unwrap(), 1);
        }
        assert_eq!(dim_harmonic(3, 2).unwrap(), 5);
        assert_eq!(dim_harmonic(4, 1).unwrap(), 4);
        assert_eq!(dim_harmonic(3, 7).unwrap(), 15);
        assert!(dim_harmonic(2, 3).is_err());
        assert!(matches!(dim_harmonic(60, 1_000_000), Err(Error::Overflow(_))));
    }

    #[test]
    fn jzero_sets() {
        let d = 5;
        for k in 0..6 {
            let all = enumerate_tau(d, k);
            for j in 1..=d - 2 {
                let filtered: Vec<_> = all.iter().filter(|a| a.get(j) == 0).cloned().collect();
                assert_eq!(enumerate_tau_jzero(d, k, j).unwrap(), filtered);
                assert_eq!(jzero_count(d, k, j).unwrap(), filtered.len() as u128);
            }
        }
        assert!(enumerate_tau_jzero(5, 2, 0).is_err());
        assert!(enumerate_tau_jzero(5, 2, 4).is_err());
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(vec![2, 1]).is_err());
        assert!(MultiIndex::new(vec![0, 2, 1]).is_err());
        assert!(MultiIndex::new(vec![3]).is_err());
        let a = idx(&[-1, 2, 4]);
        assert_eq!(a.degree(), 4);
        assert_eq!(a.d(), 4);
        assert_eq!(a.to_string(), "(-1,2,4)");
        assert_eq!(a.prefix(2).unwrap(), idx(&[-1, 2]));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[-1,2,4]");
        assert!(serde_json::from_str::<MultiIndex>("[3,1]").is_err());
    }
}
