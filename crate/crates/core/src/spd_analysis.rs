//! Finite-level checks of the asymptotic sufficiency conditions for strict
//! positive definiteness, and certificates for the inequality chain behind
//! them.
//!
//! Limits cannot be observed, so "tends to zero" is replaced by a trend
//! proxy (windowed maxima over the second half of a sequence must not grow,
//! and the last value must drop below a fraction of the first). Every
//! verdict carries the window it was computed with.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::{
    dim_harmonic, eval_harmonic, log_dim_harmonic, tau_iter, tau_jzero_iter, zonal_at_one, MultiIndex, PointFactors,
    PolarPoint,
};
use crate::kernels::{CoefficientScheme, Parity, Rule};
use crate::special_fn::{
    jacobi_at_one, jacobi_sequence, legendre_neg_order, lgamma, ptilde, ptilde_leading_constant, JacobiParams,
    ManifoldSpec,
};

/// Relative slack allowed before a bound counts as violated.
const BOUND_SLACK: f64 = 1e-12;
/// Number of violating grid points kept verbatim in a certificate.
const MAX_SAMPLES: usize = 20;

// ---------------------------------------------------------------------------
// Rate sequences and the trend proxy

/// Values indexed by strictly increasing degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSequence {
    pub degrees: Vec<usize>,
    pub values: Vec<f64>,
    pub parity: Parity,
}

impl RateSequence {
    pub fn new(degrees: Vec<usize>, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if degrees.len() != values.len() {
            return domain("degrees and values differ in length");
        }
        if degrees.windows(2).any(|w| w[0] >= w[1]) {
            return domain("degrees must be strictly increasing");
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return domain(format!("rate values must be finite and >= 0, got {v}"));
        }
        Ok(Self { degrees, values, parity })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `degree,value` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,value\n");
        for (k, v) in self.degrees.iter().zip(&self.values) {
            let _ = writeln!(out, "{k},{v:e}");
        }
        out
    }
}

/// Parameters of the "tends to zero" proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendOptions {
    /// Window length; `None` picks `max(2, ⌈len/10⌉)`.
    pub window: Option<usize>,
    /// The last value must be below `ratio` times the first.
    pub ratio: f64,
}

impl Default for TrendOptions {
    fn default() -> Self {
        Self { window: None, ratio: 0.1 }
    }
}

/// Outcome of the trend proxy on one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub window: usize,
    pub ratio: f64,
    /// Maxima of consecutive windows over the second half.
    pub window_maxima: Vec<f64>,
    pub maxima_non_increasing: bool,
    pub first: f64,
    pub last: f64,
    pub tends_to_zero: bool,
}

/// Applies the trend proxy. An all-zero sequence tends to zero; a sequence
/// with fewer than two values does not.
pub fn trend_to_zero(values: &[f64], opts: TrendOptions) -> Trend {
    let n = values.len();
    let window = opts.window.unwrap_or_else(|| n.div_ceil(10).max(2)).max(1);
    let tail = &values[n / 2..];
    let window_maxima: Vec<f64> = tail.chunks(window).map(|c| c.iter().copied().fold(0.0, f64::max)).collect();
    let maxima_non_increasing = window_maxima.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let first = values.first().copied().unwrap_or(0.0);
    let last = values.last().copied().unwrap_or(0.0);
    let all_zero = n > 0 && values.iter().all(|v| *v == 0.0);
    let tends_to_zero = all_zero || (n >= 2 && maxima_non_increasing && last < opts.ratio * first);
    Trend { window, ratio: opts.ratio, window_maxima, maxima_non_increasing, first, last, tends_to_zero }
}

// ---------------------------------------------------------------------------
// Parity split

/// Even and odd parts of the active degree set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParitySplit {
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
    /// Both parts pass the finite stand-in for "infinite".
    pub both_growing: bool,
}

/// At least three degrees, one of them in the top quartile of `[0, k_max]`.
fn looks_infinite(set: &[usize], k_max: usize) -> bool {
    set.len() >= 3 && set.iter().any(|&k| 4 * k >= 3 * k_max)
}

pub fn parity_split(s: &CoefficientScheme) -> ParitySplit {
    let (even, odd): (Vec<usize>, Vec<usize>) = s.active_degrees().into_iter().partition(|k| k % 2 == 0);
    let both_growing = looks_infinite(&even, s.k_max()) && looks_infinite(&odd, s.k_max());
    ParitySplit { even, odd, both_growing }
}

// ---------------------------------------------------------------------------
// Complement quotients and rates

/// `|Σ_{α∈A_k^c} Y_α(p) conj(Y_α(q))| / (c_k P_k(1))` for every active
/// degree `k`. Only spheres have the explicit basis this needs.
pub fn asympt_ratio_sequence(
    s: &CoefficientScheme,
    m: &ManifoldSpec,
    p: &PolarPoint,
    q: &PolarPoint,
) -> Result<RateSequence> {
    if !m.is_sphere() {
        return Err(Error::Unsupported(format!(
            "{:?} has no explicit eigenbasis here; only spheres are supported",
            m.family
        )));
    }
    if m.d != s.d() || p.d() != s.d() || q.d() != s.d() {
        return domain(format!("scheme, manifold and points must share d = {}", s.d()));
    }
    let fp = PointFactors::new(p, s.k_max());
    let fq = PointFactors::new(q, s.k_max());
    let degrees = s.active_degrees();
    let values = degrees
        .iter()
        .map(|&k| {
            let sum: num_complex::Complex64 =
                s.complement_at(k).iter().map(|a| fp.value(a) * fq.value(a).conj()).sum();
            sum.norm() / zonal_at_one(m, k)
        })
        .collect();
    RateSequence::new(degrees, values, Parity::All)
}

/// Rate sequences for the even and odd active degrees plus the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    pub d: usize,
    pub j: usize,
    pub exponent: f64,
    pub split: ParitySplit,
    pub even: RateSequence,
    pub odd: RateSequence,
    pub even_trend: Trend,
    pub odd_trend: Trend,
    /// Both parities populated and both rate sequences pass the trend proxy.
    pub consistent_with_sufficiency: bool,
}

fn check_j(s: &CoefficientScheme, j: usize) -> Result<()> {
    if j == 0 || j + 2 > s.d() {
        return domain(format!("j must lie in [1, d-2] = [1, {}], got {j}", s.d() - 2));
    }
    Ok(())
}

/// Verifies `_jτ_k ⊆ A_k` for every active degree.
fn check_containment(s: &CoefficientScheme, j: usize) -> Result<()> {
    let mut missing: Vec<MultiIndex> = Vec::new();
    let mut total = 0usize;
    let base_covers_jzero = |k: usize| match s.rule() {
        Rule::Full => true,
        Rule::EvenOnly => k % 2 == 0,
        Rule::OddOnly => k % 2 == 1,
        // α_j = 0 forces α_{j'} = 0 for every j' ≤ j.
        Rule::JZero(jj) => *jj <= j,
        Rule::Custom(_) => false,
    };
    for k in s.active_degrees() {
        if base_covers_jzero(k) {
            // Only explicit exclusions can remove members of _jτ_k.
            for a in s.exclusions().get(&k).into_iter().flatten().filter(|a| a.get(j) == 0) {
                total += 1;
                if missing.len() < 10 {
                    missing.push(a.clone());
                }
            }
        } else {
            for a in tau_jzero_iter(s.d(), k, j)?.filter(|a| !s.is_active(a)) {
                total += 1;
                if missing.len() < 10 {
                    missing.push(a);
                }
            }
        }
    }
    if total > 0 {
        let list: Vec<String> = missing.iter().map(|a| a.to_string()).collect();
        let more = if total > missing.len() { format!(" and {} more", total - missing.len()) } else { String::new() };
        return Err(Error::Precondition(format!(
            "_{j}tau_k is not contained in A_k; missing {}{more}",
            list.join(", ")
        )));
    }
    Ok(())
}

fn split_sequences(
    s: &CoefficientScheme,
    mut value: impl FnMut(usize) -> Result<f64>,
) -> Result<(RateSequence, RateSequence)> {
    let split = parity_split(s);
    let build = |set: &[usize], parity, value: &mut dyn FnMut(usize) -> Result<f64>| -> Result<RateSequence> {
        let degrees: Vec<usize> = set.iter().copied().filter(|&k| k >= 1).collect();
        let values = degrees.iter().map(|&k| value(k)).collect::<Result<Vec<_>>>()?;
        RateSequence::new(degrees, values, parity)
    };
    let even = build(&split.even, Parity::Even, &mut value)?;
    let odd = build(&split.odd, Parity::Odd, &mut value)?;
    Ok((even, odd))
}

/// `|A_k^c| / k^{(d-j-1)/2}` over the even and odd active degrees `k ≥ 1`,
/// with the trend proxy at ratio 1/2.
pub fn corollary_rate_check(s: &CoefficientScheme, j: usize) -> Result<RateCheck> {
    corollary_rate_check_with(s, j, TrendOptions { window: None, ratio: 0.5 })
}

pub fn corollary_rate_check_with(s: &CoefficientScheme, j: usize, opts: TrendOptions) -> Result<RateCheck> {
    check_j(s, j)?;
    check_containment(s, j)?;
    let exponent = (s.d() - j - 1) as f64 / 2.0;
    let (even, odd) = split_sequences(s, |k| Ok(s.complement_count(k)? as f64 / (k as f64).powf(exponent)))?;
    let split = parity_split(s);
    let even_trend = trend_to_zero(&even.values, opts);
    let odd_trend = trend_to_zero(&odd.values, opts);
    let consistent_with_sufficiency = split.both_growing && even_trend.tends_to_zero && odd_trend.tends_to_zero;
    Ok(RateCheck { d: s.d(), j, exponent, split, even, odd, even_trend, odd_trend, consistent_with_sufficiency })
}

/// Exact weighted complement sums and their coarse upper bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedComplement {
    pub even: RateSequence,
    pub odd: RateSequence,
    /// `|A_k^c| · ∏_ℓ (2k+ℓ-1)^{-1/2}` on the same degrees.
    pub even_bound: RateSequence,
    pub odd_bound: RateSequence,
}

/// `Σ_{α∈A_k^c} ∏_{ℓ=j+1}^{d-1} (2α_ℓ+ℓ-1)^{1/2} / (2k+ℓ-1)` over the even
/// and odd active degrees `k ≥ 1`. The coarse bound is checked degree by
/// degree and a violation is an error.
pub fn weighted_complement_sum(s: &CoefficientScheme, j: usize) -> Result<WeightedComplement> {
    check_j(s, j)?;
    check_containment(s, j)?;
    let d = s.d();
    let term = |a: &MultiIndex, k: usize| -> f64 {
        (j + 1..d)
            .map(|l| (2.0 * a.get(l) as f64 + l as f64 - 1.0).sqrt() / (2.0 * k as f64 + l as f64 - 1.0))
            .product()
    };
    let coarse = |k: usize| -> Result<f64> {
        let factor: f64 = (j + 1..d).map(|l| (2.0 * k as f64 + l as f64 - 1.0).powf(-0.5)).product();
        Ok(s.complement_count(k)? as f64 * factor)
    };
    let (even, odd) = split_sequences(s, |k| Ok(s.complement_at(k).iter().map(|a| term(a, k)).sum()))?;
    let (even_bound, odd_bound) = split_sequences(s, coarse)?;
    for (seq, bound) in [(&even, &even_bound), (&odd, &odd_bound)] {
        for ((k, v), b) in seq.degrees.iter().zip(&seq.values).zip(&bound.values) {
            if *v > b * (1.0 + BOUND_SLACK) {
                return Err(Error::Certificate(format!("weighted sum {v} exceeds coarse bound {b} at k = {k}")));
            }
        }
    }
    Ok(WeightedComplement { even, odd, even_bound, odd_bound })
}

/// Both sides of the dimension-ratio estimate at one `(d, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioChain {
    /// `N_{k,j+1} / (c_k P_k(1))` from the dimension and zonal constants.
    pub lhs: f64,
    /// `Γ(d-1)(2k+j-1)Γ(k+j-1) / (Γ(j)(2k+d-2)Γ(k+d-2))`.
    pub closed_form: f64,
    /// `3^{d-j-1} Γ(d-1)/Γ(j) · ∏_{ℓ=j+1}^{d-1} (2k+ℓ-1)^{-1}`.
    pub rhs: f64,
}

/// Evaluates the chain `N_{k,j+1}/(c_k P_k(1)) ≤ 3^{d-j-1}Γ(d-1)/Γ(j) ∏(2k+ℓ-1)^{-1}`
/// and fails with a certificate error if it does not hold.
pub fn ratio_chain_bound(d: usize, j: usize, k: usize) -> Result<RatioChain> {
    if d < 3 || j == 0 || j + 2 > d {
        return domain(format!("need d >= 3 and 1 <= j <= d-2, got d = {d}, j = {j}"));
    }
    if k == 0 {
        return domain("ratio chain needs k >= 1");
    }
    let m = ManifoldSpec::sphere(d)?;
    let (df, jf, kf) = (d as f64, j as f64, k as f64);
    let lhs = (log_dim_harmonic(j + 1, k) - zonal_at_one(&m, k).ln()).exp();
    let closed_form = (lgamma(df - 1.0) + (2.0 * kf + jf - 1.0).ln() + lgamma(kf + jf - 1.0)
        - lgamma(jf)
        - (2.0 * kf + df - 2.0).ln()
        - lgamma(kf + df - 2.0))
    .exp();
    let log_prod: f64 = (j + 1..d).map(|l| (2.0 * kf + l as f64 - 1.0).ln()).sum();
    let rhs = ((df - jf - 1.0) * 3f64.ln() + lgamma(df - 1.0) - lgamma(jf) - log_prod).exp();
    if lhs > rhs * (1.0 + BOUND_SLACK) {
        return Err(Error::Certificate(format!("ratio chain fails at d = {d}, j = {j}, k = {k}: {lhs} > {rhs}")));
    }
    Ok(RatioChain { lhs, closed_form, rhs })
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Lohofer,
    HaagerupJacobi,
    PtildeQuarterPower,
    HarmonicProduct,
}

/// One grid point where the left side exceeded the right side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub at: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of checking an inequality over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub bound_name: BoundName,
    pub grid: String,
    pub checked: usize,
    pub skipped: usize,
    /// Largest `lhs / rhs` seen.
    pub max_ratio: f64,
    pub violations: usize,
    pub violation_samples: Vec<Violation>,
    /// The explicit constant the right side was evaluated with.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_used: Option<f64>,
    /// Smallest constant that would still have covered the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_constant: Option<f64>,
    /// Pairs for plotting; meaning depends on the bound.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub profile: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl BoundCertificate {
    fn new(bound_name: BoundName, grid: String) -> Self {
        Self {
            bound_name,
            grid,
            checked: 0,
            skipped: 0,
            max_ratio: 0.0,
            violations: 0,
            violation_samples: Vec::new(),
            constant_used: None,
            empirical_constant: None,
            profile: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Records one comparison given as logarithms (`-∞` for a zero side).
    fn record_log(&mut self, at: &[f64], ln_lhs: f64, ln_rhs: f64) {
        self.checked += 1;
        let ln_ratio = ln_lhs - ln_rhs;
        let ratio = ln_ratio.exp();
        if ratio > self.max_ratio || ratio.is_nan() {
            self.max_ratio = ratio;
        }
        if !(ln_ratio <= BOUND_SLACK) {
            self.violations += 1;
            if self.violation_samples.len() < MAX_SAMPLES {
                self.violation_samples.push(Violation { at: at.to_vec(), lhs: ln_lhs.exp(), rhs: ln_rhs.exp() });
            }
        }
    }

    fn record(&mut self, at: &[f64], lhs: f64, rhs: f64) {
        self.record_log(at, lhs.abs().ln(), rhs.ln());
    }
}

/// `θ = kπ/n` for `k = 1, …, n-1`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..n).map(|k| k as f64 * PI / n as f64).collect()
}

fn describe_thetas(t: &[f64]) -> String {
    match (t.first(), t.last()) {
        (Some(a), Some(b)) => format!("{} angles in [{a:.4}, {b:.4}]", t.len()),
        _ => "no angles".into(),
    }
}

/// Grid `1 ≤ m ≤ m_max`, `|n| ≤ m`, `θ` as given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LohoferGrid {
    pub m_max: usize,
    pub thetas: Vec<f64>,
}

impl Default for LohoferGrid {
    fn default() -> Self {
        Self { m_max: 60, thetas: theta_grid(40) }
    }
}

/// `ln |P_m^n(x)|` for the Ferrers function of integer degree `m` and order
/// `|n| ≤ m`, from the negative-order form.
fn ln_abs_ferrers(m: usize, n: i64, x: f64) -> Result<f64> {
    let a = n.unsigned_abs() as usize;
    let base = legendre_neg_order(m as f64, a as f64, x)?.abs().ln();
    Ok(if n > 0 { base + lgamma((m + a) as f64 + 1.0) - lgamma((m - a) as f64 + 1.0) } else { base })
}

/// `|P_m^n(cos θ)| ≤ Γ(1/4)/π · (sin θ)^{-1/4} · √(Γ(m+n+1)/Γ(m-n+1)) · m^{-1/4}`
/// for degree `m ≥ 1` and order `|n| ≤ m`. The profile holds, per degree,
/// the smallest constant covering every order and angle.
///
/// The Γ-ratio is evaluated with degree minus order in the denominator; the
/// variant with order minus degree there puts its argument on a pole of Γ
/// whenever `|n| < m`, and the notes record how many grid points that is.
pub fn certify_lohofer(grid: &LohoferGrid) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new(
        BoundName::Lohofer,
        format!("1 <= m <= {}, |n| <= m, {}", grid.m_max, describe_thetas(&grid.thetas)),
    );
    let ln_c = lgamma(0.25) - PI.ln();
    cert.constant_used = Some(ln_c.exp());
    let mut pole_points = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut per_degree = vec![f64::NEG_INFINITY; grid.m_max + 1];
    for &theta in &grid.thetas {
        let s = theta.sin();
        if !(theta > 0.0 && theta < PI) {
            cert.skipped += 1;
            continue;
        }
        let x = theta.cos();
        for m in 1..=grid.m_max {
            for n in -(m as i64)..=(m as i64) {
                let ln_lhs = ln_abs_ferrers(m, n, x)?;
                let mf = m as f64;
                let nf = n as f64;
                let ln_shape = -0.25 * s.ln() + 0.5 * (lgamma(mf + nf + 1.0) - lgamma(mf - nf + 1.0)) - 0.25 * mf.ln();
                if nf - mf + 1.0 <= 0.0 {
                    pole_points += 1;
                }
                per_degree[m] = per_degree[m].max(ln_lhs - ln_shape);
                cert.record_log(&[m as f64, nf, theta], ln_lhs, ln_c + ln_shape);
            }
        }
    }
    for (m, ln_c_m) in per_degree.iter().enumerate().skip(1) {
        if ln_c_m.is_finite() {
            worst = worst.max(*ln_c_m);
            cert.profile.push((m as f64, ln_c_m.exp()));
        }
    }
    if worst.is_finite() {
        cert.empirical_constant = Some(worst.exp());
    }
    cert.notes.push("Gamma ratio evaluated as Gamma(m+n+1)/Gamma(m-n+1) (degree m, order n)".into());
    cert.notes.push(format!(
        "{pole_points} of {} grid points put Gamma(n-m+1) on a pole; that form is undefined there",
        cert.checked
    ));
    Ok(cert)
}

/// Grid of degrees `0 ≤ n ≤ n_max`, symmetric parameters and abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaagerupGrid {
    pub n_max: usize,
    pub alphas: Vec<f64>,
    pub xs: Vec<f64>,
    pub constant: f64,
}

impl Default for HaagerupGrid {
    fn default() -> Self {
        Self {
            n_max: 100,
            alphas: vec![0.0, 0.5, 1.0, 3.0],
            xs: (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect(),
            constant: 12.0,
        }
    }
}

/// `(1-x²)^{α/2+1/4} |P_n^{(α,α)}(x)| ≤ C 2^α Γ(n+α+1) / (Γ(n+1)Γ(n+2α+1))^{1/2} (2n+2α+1)^{-1/4}`.
///
/// The profile holds the per-degree empirical constant.
pub fn certify_haagerup(grid: &HaagerupGrid) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new(
        BoundName::HaagerupJacobi,
        format!("0 <= n <= {}, alpha in {:?}, {} abscissae in [-1, 1]", grid.n_max, grid.alphas, grid.xs.len()),
    );
    if !(grid.constant > 0.0) {
        return domain("Haagerup constant must be positive");
    }
    cert.constant_used = Some(grid.constant);
    let mut worst = f64::NEG_INFINITY;
    let mut per_degree = vec![f64::NEG_INFINITY; grid.n_max + 1];
    for &a in &grid.alphas {
        JacobiParams::symmetric(a)?;
        for &x in &grid.xs {
            if !(-1.0..=1.0).contains(&x) {
                cert.skipped += grid.n_max + 1;
                continue;
            }
            let envelope = (1.0 - x * x).powf(a / 2.0 + 0.25);
            let values = jacobi_sequence(grid.n_max, a, a, x);
            for (n, p) in values.iter().enumerate() {
                let nf = n as f64;
                let ln_shape = a * LN_2 + lgamma(nf + a + 1.0)
                    - 0.5 * (lgamma(nf + 1.0) + lgamma(nf + 2.0 * a + 1.0))
                    - 0.25 * (2.0 * nf + 2.0 * a + 1.0).ln();
                let ln_lhs = (envelope * p.abs()).ln();
                per_degree[n] = per_degree[n].max(ln_lhs - ln_shape);
                cert.record_log(&[nf, a, x], ln_lhs, grid.constant.ln() + ln_shape);
            }
        }
    }
    for (n, ln_c_n) in per_degree.iter().enumerate() {
        if ln_c_n.is_finite() {
            worst = worst.max(*ln_c_n);
            cert.profile.push((n as f64, ln_c_n.exp()));
        }
    }
    if worst.is_finite() {
        cert.empirical_constant = Some(worst.exp());
    }
    Ok(cert)
}

/// `C_j(θ) = K_j · C · (sin θ)^{-(j-1)/2} / √2`, with `K_j` the leading
/// constant of the normalized Ferrers factor.
pub fn ptilde_envelope(j: usize, theta: f64, c: f64) -> f64 {
    ptilde_leading_constant(j) * c * theta.sin().powf(-(j as f64 - 1.0) / 2.0) / std::f64::consts::SQRT_2
}

/// Grid `0 ≤ ℓ ≤ L ≤ l_max` over the given angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtildeGrid {
    pub l_max: usize,
    pub thetas: Vec<f64>,
    pub constant: f64,
}

impl Default for PtildeGrid {
    fn default() -> Self {
        Self { l_max: 40, thetas: theta_grid(40), constant: 12.0 }
    }
}

/// `|_jP̃_L^ℓ(θ)| ≤ C_j(θ) (2L+j-1)^{1/4}` for `0 ≤ ℓ ≤ L`.
///
/// At `θ ∈ {0, π}` the envelope is infinite: points with `ℓ > 0` vanish
/// there and are checked trivially, `ℓ = 0` points are skipped. The profile
/// holds `(θ, max_{L,ℓ} |_jP̃_L^ℓ(θ)| (2L+j-1)^{-1/4})`, an empirical `C_j(θ)`.
pub fn certify_ptilde(j: usize, grid: &PtildeGrid) -> Result<BoundCertificate> {
    if j < 2 {
        return domain(format!("ptilde certificate needs j >= 2, got {j}"));
    }
    let mut cert = BoundCertificate::new(
        BoundName::PtildeQuarterPower,
        format!("j = {j}, 0 <= l <= L <= {}, {}", grid.l_max, describe_thetas(&grid.thetas)),
    );
    cert.constant_used = Some(grid.constant);
    let kj = ptilde_leading_constant(j);
    let mut worst_c: f64 = 0.0;
    for &theta in &grid.thetas {
        let endpoint = theta == 0.0 || theta == PI;
        let mut profile_max: f64 = 0.0;
        for l in 0..=grid.l_max {
            let growth = (2.0 * l as f64 + j as f64 - 1.0).powf(0.25);
            for ell in 0..=l {
                let v = ptilde(j, l, ell as i64, theta)?;
                let at = [l as f64, ell as f64, theta];
                if endpoint {
                    if ell == 0 {
                        cert.skipped += 1;
                    } else {
                        cert.record_log(&at, v.abs().ln(), f64::INFINITY);
                    }
                    continue;
                }
                profile_max = profile_max.max(v.abs() / growth);
                cert.record(&at, v, ptilde_envelope(j, theta, grid.constant) * growth);
            }
        }
        if !endpoint {
            cert.profile.push((theta, profile_max));
            let scale = theta.sin().powf((j as f64 - 1.0) / 2.0) * std::f64::consts::SQRT_2 / kj;
            worst_c = worst_c.max(profile_max * scale);
        }
    }
    cert.empirical_constant = Some(worst_c);
    Ok(cert)
}

/// Points and degrees for the harmonic-product certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicProductGrid {
    pub k_max: usize,
    pub points: Vec<PolarPoint>,
    pub constant: f64,
}

impl HarmonicProductGrid {
    /// A tensor grid: three values of `θ_1`, four of each `θ_ℓ` with
    /// `2 ≤ ℓ ≤ j` (poles included), and `kπ/12`, `1 ≤ k ≤ 11`, for `ℓ > j`.
    pub fn default_for(d: usize, j: usize, k_max: usize) -> Self {
        let mut axes: Vec<Vec<f64>> = vec![vec![0.3, 2.1, 4.4]];
        for l in 2..d {
            axes.push(if l <= j { vec![0.0, PI / 3.0, PI / 2.0, 2.5] } else { theta_grid(12) });
        }
        let mut points = vec![Vec::new()];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|prefix: Vec<f64>| {
                    axis.iter().map(move |&t| {
                        let mut v = prefix.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        let points = points.into_iter().map(|t| PolarPoint::new(t).expect("grid angles are in range")).collect();
        Self { k_max, points, constant: 12.0 }
    }
}

/// `D(ξ) = ∏_{ℓ=j+1}^{d-1} C_ℓ(θ_ℓ)`.
pub fn harmonic_product_envelope(p: &PolarPoint, j: usize, c: f64) -> f64 {
    (j + 1..p.d()).map(|l| ptilde_envelope(l, p.theta(l), c)).product()
}

/// `|Y_α(ξ)| ≤ D(ξ) √N_{α_j,j+1} ∏_{ℓ=j+1}^{d-1} (2α_ℓ+ℓ-1)^{1/4}` for
/// `α ∈ τ_k \ _jτ_k`, `k ≤ k_max`, together with the prefix estimate
/// `|Y_{(α_1,…,α_j)}(ξ')| ≤ √N_{α_j,j+1}`.
///
/// Points with `θ_ℓ ∈ {0, π}` for some `ℓ > j` are skipped. The profile
/// holds `(D(ξ), max_α |Y_α(ξ)| / (√N ∏(2α_ℓ+ℓ-1)^{1/4}))` per point.
pub fn certify_harmonic_product(j: usize, d: usize, grid: &HarmonicProductGrid) -> Result<BoundCertificate> {
    if d < 3 || j == 0 || j + 2 > d {
        return domain(format!("need 1 <= j <= d-2, got d = {d}, j = {j}"));
    }
    let mut cert = BoundCertificate::new(
        BoundName::HarmonicProduct,
        format!("d = {d}, j = {j}, k <= {}, {} points", grid.k_max, grid.points.len()),
    );
    cert.constant_used = Some(grid.constant);
    let mut prefix_checked = 0usize;
    let mut prefix_failures = 0usize;
    let mut worst_scale: f64 = 0.0;
    for p in &grid.points {
        if p.d() != d {
            return domain(format!("grid point has d = {}, expected {d}", p.d()));
        }
        if (j + 1..d).any(|l| p.theta(l) == 0.0 || p.theta(l) == PI) {
            cert.skipped += 1;
            continue;
        }
        let env = harmonic_product_envelope(p, j, grid.constant);
        let factors = PointFactors::new(p, grid.k_max);
        let prefix_point = if j >= 2 { Some(p.prefix(j)?) } else { None };
        let mut point_max: f64 = 0.0;
        for k in 0..=grid.k_max {
            for a in tau_iter(d, k).filter(|a| a.get(j) != 0) {
                let aj = a.get(j).unsigned_abs() as usize;
                let ln_n = if j == 1 { log_dim_harmonic(2, aj) } else { (dim_harmonic(j + 1, aj)? as f64).ln() };
                let growth: f64 = (j + 1..d).map(|l| (2.0 * a.get(l) as f64 + l as f64 - 1.0).powf(0.25)).product();
                let lhs = factors.value(&a).norm();
                let shape = (0.5 * ln_n).exp() * growth;
                point_max = point_max.max(lhs / shape);
                let mut at = vec![k as f64];
                at.extend(a.entries().iter().map(|&e| e as f64));
                at.extend_from_slice(p.angles());
                cert.record(&at, lhs, env * shape);

                let prefix_value = match &prefix_point {
                    Some(q) => eval_harmonic(&a.prefix(j)?, q)?.norm(),
                    None => 1.0,
                };
                prefix_checked += 1;
                if prefix_value > (0.5 * ln_n).exp() * (1.0 + 1e-10) {
                    prefix_failures += 1;
                }
            }
        }
        cert.profile.push((env, point_max));
        worst_scale = worst_scale.max(point_max / env);
    }
    cert.empirical_constant = Some(worst_scale);
    cert.notes.push(format!("prefix estimate checked at {prefix_checked} index/point pairs, {prefix_failures} failures"));
    cert.violations += prefix_failures;
    Ok(cert)
}

/// `j_ξ = max({2} ∪ {j ≥ 2 : θ_j ∈ {0, π}})`.
pub fn jxi_of_point(p: &PolarPoint) -> usize {
    (2..p.d()).filter(|&j| p.theta(j) == 0.0 || p.theta(j) == PI).fold(2, usize::max)
}

/// `P_k^{(β,α)}(1) / P_k^{(α,β)}(1)` for `0 ≤ k ≤ k_max`.
pub fn jacobi_ratio_sequence(params: JacobiParams, k_max: usize) -> Result<RateSequence> {
    if !(params.alpha > params.beta) {
        return domain(format!("need alpha > beta, got ({}, {})", params.alpha, params.beta));
    }
    if !(params.beta > -1.0) {
        return domain("need beta > -1 so that P_k^(beta,alpha)(1) is defined");
    }
    let swapped = params.swapped();
    let values = (0..=k_max).map(|k| (jacobi_at_one(k, swapped) - jacobi_at_one(k, params)).exp()).collect();
    RateSequence::new((0..=k_max).collect(), values, Parity::All)
}

/// Degree sets of an isotropic kernel `Σ_k d_{·,k} P_k`: `n_set` where some
/// coefficient is positive, `l_set` where all are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSets {
    pub l_set: Vec<usize>,
    pub n_set: Vec<usize>,
    pub k_max: usize,
}

impl DegreeSets {
    pub fn from_scheme(s: &CoefficientScheme) -> Self {
        Self { l_set: s.full_degrees(), n_set: s.active_degrees(), k_max: s.k_max() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SufficiencyVerdict {
    NecessaryConditionFailed,
    SufficientConditionMet,
    Indeterminate,
}

/// Sufficient condition (`L` infinite) and necessary condition (`N`
/// infinite) on a manifold whose Jacobi parameters satisfy `α > β`.
/// Spheres have `α = β` and go through [`parity_split`] instead.
pub fn isotropic_sufficiency(sets: &DegreeSets, m: &ManifoldSpec) -> Result<SufficiencyVerdict> {
    if m.is_sphere() {
        return Err(Error::Unsupported("spheres need the parity-aware check (parity_split)".into()));
    }
    let p = m.jacobi_params();
    if !(p.alpha > p.beta) {
        return domain(format!("need alpha > beta, got ({}, {}) for d = {}", p.alpha, p.beta, m.d));
    }
    Ok(if !looks_infinite(&sets.n_set, sets.k_max) {
        SufficiencyVerdict::NecessaryConditionFailed
    } else if looks_infinite(&sets.l_set, sets.k_max) {
        SufficiencyVerdict::SufficientConditionMet
    } else {
        SufficiencyVerdict::Indeterminate
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::random_points;
    use crate::special_fn::ManifoldFamily;
    use approx::assert_relative_eq;

    #[test]
    fn parity_split_examples() {
        assert!(parity_split(&CoefficientScheme::full(3, 10).unwrap()).both_growing);
        let even = parity_split(&CoefficientScheme::even_only(3, 10).unwrap());
        assert!(even.odd.is_empty() && !even.both_growing);
        let small = (0..=2).map(|k| MultiIndex::zero_with_degree(3, k)).collect();
        let s = CoefficientScheme::new(3, 100, Rule::Custom(small)).unwrap();
        let split = parity_split(&s);
        assert_eq!(split.even, vec![0, 2]);
        assert!(!split.both_growing);
    }

    #[test]
    fn trend_proxy() {
        let decaying: Vec<f64> = (1..100).map(|k| 1.0 / k as f64).collect();
        assert!(trend_to_zero(&decaying, TrendOptions::default()).tends_to_zero);
        let flat = vec![1.0; 50];
        assert!(!trend_to_zero(&flat, TrendOptions::default()).tends_to_zero);
        assert!(trend_to_zero(&[0.0; 5], TrendOptions::default()).tends_to_zero);
        assert!(!trend_to_zero(&[1.0], TrendOptions::default()).tends_to_zero);
    }

    #[test]
    fn full_scheme_rates_are_zero() {
        let s = CoefficientScheme::full(5, 20).unwrap();
        let r = corollary_rate_check(&s, 2).unwrap();
        assert!(r.even.values.iter().chain(&r.odd.values).all(|v| *v == 0.0));
        assert!(r.consistent_with_sufficiency);
        let w = weighted_complement_sum(&s, 2).unwrap();
        assert!(w.even.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn containment_violation_lists_indices() {
        let s = CoefficientScheme::full(4, 3)
            .unwrap()
            .exclude(2, [MultiIndex::new(vec![0, 0, 2]).unwrap()])
            .unwrap();
        let e = corollary_rate_check(&s, 1).unwrap_err();
        assert!(e.to_string().contains("(0,0,2)"), "{e}");
        let s = CoefficientScheme::jzero(5, 4, 2).unwrap();
        assert!(corollary_rate_check(&s, 1).is_err());
        assert!(corollary_rate_check(&s, 2).is_ok());
        assert!(corollary_rate_check(&s, 3).is_ok());
    }

    #[test]
    fn weighted_sum_single_top_index() {
        // Excluding (1, k, k, k) leaves one term with every α_ℓ = k.
        let (d, j, k) = (5, 1, 4);
        let a = MultiIndex::new(vec![1, 4, 4, 4]).unwrap();
        let s = CoefficientScheme::full(d, 6).unwrap().exclude(k, [a]).unwrap();
        let w = weighted_complement_sum(&s, j).unwrap();
        let want: f64 = (j + 1..d).map(|l| (2.0 * k as f64 + l as f64 - 1.0).powf(-0.5)).product();
        let pos = w.even.degrees.iter().position(|&x| x == k).unwrap();
        assert_relative_eq!(w.even.values[pos], want, max_relative = 1e-14);
    }

    #[test]
    fn weighted_sum_matches_enumeration() {
        let (d, j) = (4, 2);
        let s = CoefficientScheme::jzero(d, 6, j).unwrap();
        let w = weighted_complement_sum(&s, j).unwrap();
        for (seq, bound) in [(&w.even, &w.even_bound), (&w.odd, &w.odd_bound)] {
            for (i, &k) in seq.degrees.iter().enumerate() {
                // α = (α_1, α_2, k) with α_2 ≥ 1: 2α_2 + 1 choices of α_1 each.
                let count: usize = (1..=k).map(|a2| 2 * a2 + 1).sum();
                let want = count as f64 / (2.0 * k as f64 + 2.0).sqrt();
                assert_relative_eq!(seq.values[i], want, max_relative = 1e-12);
                assert!(seq.values[i] <= bound.values[i] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn ratio_chain_examples() {
        for d in 3..=8 {
            for j in 1..=d - 2 {
                for k in [1, 2, 7, 50] {
                    let r = ratio_chain_bound(d, j, k).unwrap();
                    assert_relative_eq!(r.lhs, r.closed_form, max_relative = 1e-12);
                }
            }
        }
        // Single factor: d = j + 2.
        let (d, j, k) = (6, 4, 9);
        let r = ratio_chain_bound(d, j, k).unwrap();
        let g = (lgamma(5.0) - lgamma(4.0)).exp();
        assert_relative_eq!(r.rhs, 3.0 * g / (2.0 * k as f64 + d as f64 - 2.0), max_relative = 1e-12);
        assert!(ratio_chain_bound(3, 2, 1).is_err());
        assert!(ratio_chain_bound(4, 1, 0).is_err());
    }

    #[test]
    fn lohofer_small_grid() {
        let cert = certify_lohofer(&LohoferGrid { m_max: 10, thetas: theta_grid(8) }).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert!(cert.max_ratio <= 1.0);
        assert_eq!(cert.checked, 7 * (1..=10).map(|m| 2 * m + 1).sum::<usize>());
        // |P_1(0)| = 0.
        let c = certify_lohofer(&LohoferGrid { m_max: 1, thetas: vec![PI / 2.0] }).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn haagerup_degree_zero() {
        let grid = HaagerupGrid { n_max: 0, alphas: vec![0.0, 1.0], xs: vec![-0.5, 0.0, 0.7], constant: 12.0 };
        let cert = certify_haagerup(&grid).unwrap();
        assert!(cert.passed());
        assert!(cert.empirical_constant.unwrap() <= 1.0);
    }

    #[test]
    fn ptilde_small_grid() {
        for j in 2..=4 {
            let cert = certify_ptilde(j, &PtildeGrid { l_max: 12, thetas: theta_grid(10), constant: 12.0 }).unwrap();
            assert!(cert.passed(), "j={j}: {:?}", cert.violation_samples);
            assert_eq!(cert.profile.len(), 9);
        }
        let with_poles = PtildeGrid { l_max: 3, thetas: vec![0.0, 1.0, PI], constant: 12.0 };
        let cert = certify_ptilde(3, &with_poles).unwrap();
        assert_eq!(cert.skipped, 2 * 4);
        assert!(cert.passed());
    }

    #[test]
    fn harmonic_product_small_grid() {
        let grid = HarmonicProductGrid::default_for(4, 2, 5);
        let cert = certify_harmonic_product(2, 4, &grid).unwrap();
        assert!(cert.passed(), "{:?}", cert.violation_samples);
        let grid = HarmonicProductGrid::default_for(4, 1, 5);
        assert!(certify_harmonic_product(1, 4, &grid).unwrap().passed());
        let singular = HarmonicProductGrid { k_max: 2, points: vec![PolarPoint::pole(4)], constant: 12.0 };
        assert_eq!(certify_harmonic_product(2, 4, &singular).unwrap().skipped, 1);
    }

    #[test]
    fn jxi_examples() {
        assert_eq!(jxi_of_point(&PolarPoint::new(vec![0.1, 1.0, 2.0, 0.5]).unwrap()), 2);
        assert_eq!(jxi_of_point(&PolarPoint::new(vec![0.1, 1.0, 2.0, 0.0]).unwrap()), 4);
        assert_eq!(jxi_of_point(&PolarPoint::new(vec![0.1, 1.0, PI, 0.5]).unwrap()), 3);
    }

    #[test]
    fn jacobi_ratio_examples() {
        let r = jacobi_ratio_sequence(JacobiParams::new(1.0, 0.0).unwrap(), 30).unwrap();
        for (k, v) in r.degrees.iter().zip(&r.values) {
            assert_relative_eq!(*v, 1.0 / (*k as f64 + 1.0), max_relative = 1e-11);
        }
        // α = 3, β = 0, k = 10: Γ(k+1)Γ(4)/Γ(k+4) = 3!·10!/13!
        let r = jacobi_ratio_sequence(JacobiParams::new(3.0, 0.0).unwrap(), 10).unwrap();
        assert_relative_eq!(r.values[10], 6.0 / (11.0 * 12.0 * 13.0), max_relative = 1e-11);
        assert!(jacobi_ratio_sequence(JacobiParams::new(1.0, 1.0).unwrap(), 5).is_err());
    }

    #[test]
    fn isotropic_sufficiency_examples() {
        let m = ManifoldSpec::new(ManifoldFamily::ComplexProjective, 6).unwrap();
        let all: Vec<usize> = (0..=20).collect();
        let sets = DegreeSets { l_set: all.clone(), n_set: all.clone(), k_max: 20 };
        assert_eq!(isotropic_sufficiency(&sets, &m).unwrap(), SufficiencyVerdict::SufficientConditionMet);
        let sets = DegreeSets { l_set: vec![], n_set: vec![0, 1], k_max: 20 };
        assert_eq!(isotropic_sufficiency(&sets, &m).unwrap(), SufficiencyVerdict::NecessaryConditionFailed);
        let sets = DegreeSets { l_set: vec![], n_set: all, k_max: 20 };
        assert_eq!(isotropic_sufficiency(&sets, &m).unwrap(), SufficiencyVerdict::Indeterminate);
        assert!(matches!(isotropic_sufficiency(&sets, &ManifoldSpec::sphere(4).unwrap()), Err(Error::Unsupported(_))));
        let low = ManifoldSpec::new(ManifoldFamily::QuaternionProjective, 5).unwrap();
        assert!(isotropic_sufficiency(&sets, &low).is_err());
    }

    #[test]
    fn asympt_ratio_examples() {
        let d = 4;
        let m = ManifoldSpec::sphere(d).unwrap();
        let pts = random_points(d, 2, 7);
        let full = CoefficientScheme::full(d, 8).unwrap();
        let r = asympt_ratio_sequence(&full, &m, &pts[0], &pts[1]).unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0));

        // JZero(d-2) at p = q against brute-force summation over τ_k.
        let s = CoefficientScheme::jzero(d, 8, d - 2).unwrap();
        let r = asympt_ratio_sequence(&s, &m, &pts[0], &pts[0]).unwrap();
        for (k, v) in r.degrees.iter().zip(&r.values) {
            let want: f64 = tau_iter(d, *k)
                .filter(|a| a.get(d - 2) != 0)
                .map(|a| eval_harmonic(&a, &pts[0]).unwrap().norm().powi(2))
                .sum::<f64>()
                / zonal_at_one(&m, *k);
            assert!((v - want).abs() <= 1e-10 * want.max(1.0), "k={k}: {v} vs {want}");
        }
        let rp = ManifoldSpec::new(ManifoldFamily::RealProjective, d).unwrap();
        assert!(matches!(asympt_ratio_sequence(&s, &rp, &pts[0], &pts[1]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn csv_output() {
        let r = RateSequence::new(vec![1, 3], vec![0.5, 0.25], Parity::Odd).unwrap();
        assert_eq!(r.to_csv(), "degree,value\n1,5e-1\n3,2.5e-1\n");
        assert!(RateSequence::new(vec![2, 1], vec![0.0, 0.0], Parity::All).is_err());
        assert!(RateSequence::new(vec![1], vec![-1.0], Parity::All).is_err());
    }
}
