use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::{dim_harmonic, jzero_count, tau_iter, tau_jzero_iter, MultiIndex};

/// Degree parity filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    #[default]
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, k: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => k % 2 == 0,
            Parity::Odd => k % 2 == 1,
        }
    }
}

/// Base rule for the active index set before exclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Every `α ∈ τ_k`.
    Full,
    /// `_jτ_k`: indices with `α_j = 0`.
    JZero(usize),
    /// All of `τ_k` for even `k` only.
    EvenOnly,
    /// All of `τ_k` for odd `k` only.
    OddOnly,
    /// An explicit set of indices.
    Custom(BTreeSet<MultiIndex>),
}

/// Positive weights `d_α`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Unit,
    /// `d_α = ratio^k` for `α` of degree `k`.
    Geometric(f64),
    /// Explicit per-index values; indices not listed get weight 1.
    Explicit(BTreeMap<MultiIndex, f64>),
}

/// The coefficient set `F` of a kernel `Σ d_α Y_α(ξ) conj(Y_α(ζ))`,
/// truncated at degree `k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientScheme {
    d: usize,
    k_max: usize,
    rule: Rule,
    parity: Parity,
    exclude: BTreeMap<usize, BTreeSet<MultiIndex>>,
    weights: Weights,
}

impl CoefficientScheme {
    pub fn new(d: usize, k_max: usize, rule: Rule) -> Result<Self> {
        if d < 3 {
            return domain(format!("coefficient schemes need d >= 3, got {d}"));
        }
        match &rule {
            Rule::JZero(j) if *j == 0 || *j > d - 2 => {
                return domain(format!("JZero rule needs 1 <= j <= d-2 = {}, got {j}", d - 2));
            }
            Rule::Custom(set) => {
                for a in set {
                    check_index(a, d, k_max)?;
                }
            }
            _ => {}
        }
        Ok(Self { d, k_max, rule, parity: Parity::All, exclude: BTreeMap::new(), weights: Weights::Unit })
    }

    pub fn full(d: usize, k_max: usize) -> Result<Self> {
        Self::new(d, k_max, Rule::Full)
    }

    pub fn even_only(d: usize, k_max: usize) -> Result<Self> {
        Self::new(d, k_max, Rule::EvenOnly)
    }

    pub fn odd_only(d: usize, k_max: usize) -> Result<Self> {
        Self::new(d, k_max, Rule::OddOnly)
    }

    pub fn jzero(d: usize, k_max: usize, j: usize) -> Result<Self> {
        Self::new(d, k_max, Rule::JZero(j))
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn with_weights(mut self, weights: Weights) -> Result<Self> {
        match &weights {
            Weights::Unit => {}
            Weights::Geometric(r) => {
                if !(*r > 0.0) || !r.is_finite() {
                    return domain(format!("geometric weight ratio must be finite and > 0, got {r}"));
                }
            }
            Weights::Explicit(map) => {
                for (a, w) in map {
                    check_index(a, self.d, self.k_max)?;
                    if !(*w > 0.0) || !w.is_finite() {
                        return domain(format!("weight of {a} must be finite and > 0, got {w}"));
                    }
                }
            }
        }
        self.weights = weights;
        Ok(self)
    }

    /// Removes `indices` from the active set at degree `k`.
    pub fn exclude<I: IntoIterator<Item = MultiIndex>>(mut self, k: usize, indices: I) -> Result<Self> {
        let entry = self.exclude.entry(k).or_default();
        for a in indices {
            if a.d() != self.d || a.degree() != k {
                return domain(format!("excluded index {a} is not in tau_{k} for d = {}", self.d));
            }
            entry.insert(a);
        }
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn exclusions(&self) -> &BTreeMap<usize, BTreeSet<MultiIndex>> {
        &self.exclude
    }

    fn rule_contains(&self, a: &MultiIndex) -> bool {
        let k = a.degree();
        if k > self.k_max || !self.parity.admits(k) {
            return false;
        }
        match &self.rule {
            Rule::Full => true,
            Rule::JZero(j) => a.get(*j) == 0,
            Rule::EvenOnly => k % 2 == 0,
            Rule::OddOnly => k % 2 == 1,
            Rule::Custom(set) => set.contains(a),
        }
    }

    /// `α ∈ A_{deg α}`.
    pub fn is_active(&self, a: &MultiIndex) -> bool {
        a.d() == self.d
            && self.rule_contains(a)
            && !self.exclude.get(&a.degree()).is_some_and(|s| s.contains(a))
    }

    /// `d_α` for an active index.
    pub fn weight(&self, a: &MultiIndex) -> f64 {
        match &self.weights {
            Weights::Unit => 1.0,
            Weights::Geometric(r) => r.powi(a.degree() as i32),
            Weights::Explicit(map) => map.get(a).copied().unwrap_or(1.0),
        }
    }

    /// `A_k` in lexicographic order.
    pub fn active_at(&self, k: usize) -> Vec<MultiIndex> {
        if k > self.k_max || !self.parity.admits(k) {
            return Vec::new();
        }
        match &self.rule {
            Rule::Custom(set) => set.iter().filter(|a| a.degree() == k && self.is_active(a)).cloned().collect(),
            Rule::JZero(j) => tau_jzero_iter(self.d, k, *j)
                .expect("validated j")
                .filter(|a| self.is_active(a))
                .collect(),
            _ => tau_iter(self.d, k).filter(|a| self.is_active(a)).collect(),
        }
    }

    /// `A_k^c = τ_k \ A_k` in lexicographic order.
    pub fn complement_at(&self, k: usize) -> Vec<MultiIndex> {
        if matches!(self.rule, Rule::Full) && k <= self.k_max && self.parity.admits(k) {
            return self.exclude.get(&k).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        }
        tau_iter(self.d, k).filter(|a| !self.is_active(a)).collect()
    }

    /// `|A_k^c|`, computed by counting where possible so that large degrees
    /// do not require enumerating `τ_k`.
    pub fn complement_count(&self, k: usize) -> Result<u128> {
        let total = dim_harmonic(self.d, k)?;
        if k > self.k_max || !self.parity.admits(k) {
            return Ok(total);
        }
        let excluded_active = |base: &dyn Fn(&MultiIndex) -> bool| -> u128 {
            self.exclude.get(&k).map_or(0, |s| s.iter().filter(|a| base(a)).count() as u128)
        };
        Ok(match &self.rule {
            Rule::Full => excluded_active(&|_| true),
            Rule::EvenOnly | Rule::OddOnly => {
                if self.rule_contains(&MultiIndex::zero_with_degree(self.d, k)) {
                    excluded_active(&|_| true)
                } else {
                    total
                }
            }
            Rule::JZero(j) => {
                let base = jzero_count(self.d, k, *j)?;
                total - base + excluded_active(&|a| a.get(*j) == 0)
            }
            Rule::Custom(_) => total - self.active_at(k).len() as u128,
        })
    }

    /// The active degree set `N = {k ≤ k_max : A_k ≠ ∅}`.
    pub fn active_degrees(&self) -> Vec<usize> {
        (0..=self.k_max).filter(|&k| self.has_active(k)).collect()
    }

    fn has_active(&self, k: usize) -> bool {
        if !self.parity.admits(k) {
            return false;
        }
        match &self.rule {
            Rule::Custom(_) => !self.active_at(k).is_empty(),
            _ => match (self.complement_count(k), dim_harmonic(self.d, k)) {
                (Ok(c), Ok(n)) => c < n,
                _ => !self.active_at(k).is_empty(),
            },
        }
    }

    /// Degrees whose active set is all of `τ_k`.
    pub fn full_degrees(&self) -> Vec<usize> {
        (0..=self.k_max).filter(|&k| self.complement_count(k).is_ok_and(|c| c == 0)).collect()
    }

    /// All `(α, d_α)` with `α` active, ordered by degree then index.
    pub fn active_set(&self) -> Vec<(MultiIndex, f64)> {
        (0..=self.k_max)
            .flat_map(|k| self.active_at(k))
            .map(|a| {
                let w = self.weight(&a);
                (a, w)
            })
            .collect()
    }

    /// True iff both schemes have the same `d`, truncation and active set `F`.
    pub fn same_active_set(&self, other: &Self) -> bool {
        self.d == other.d
            && self.k_max == other.k_max
            && (0..=self.k_max).all(|k| self.active_at(k) == other.active_at(k))
    }
}

impl MultiIndex {
    /// `(0, …, 0, k)`, the zonal index of degree `k`.
    pub fn zero_with_degree(d: usize, k: usize) -> Self {
        let mut v = vec![0; d - 1];
        v[d - 2] = k as i64;
        MultiIndex::new(v).expect("zonal index is valid")
    }
}

fn check_index(a: &MultiIndex, d: usize, k_max: usize) -> Result<()> {
    if a.d() != d {
        return Err(Error::Domain(format!("index {a} does not belong to d = {d}")));
    }
    if a.degree() > k_max {
        return Err(Error::Domain(format!("index {a} has degree above k_max = {k_max}")));
    }
    Ok(())
}
