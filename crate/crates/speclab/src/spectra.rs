//! exact spectrum sequences and the arithmetic diagnostics built on them:
//! gap profiles, summability of Σ 1/(|λ_k|^ℓ δ_k^n), Diophantine
//! approximation constants, gap lower bounds for two-frequency torus
//! spectra, growth-exponent fits, and perturbation brackets.
//!
//! the three named families are the Laplace–Beltrami spectrum of the round
//! N-sphere, the N-dimensional harmonic oscillator, and the flat rectangular
//! torus. each model stores its raw eigenvalues plus a `shift` chosen so the
//! shifted spectrum avoids zero — the standing convention everywhere else in
//! the crate is that operators are invertible, and a uniform shift costs
//! nothing (gaps are translation invariant).

use serde::Serialize;
use thiserror::Error;

use crate::numerics::log_log_fit_top_decade;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectraError {
    #[error("dimension {dimension} below the minimum {minimum} for this family")]
    InvalidDimension { dimension: usize, minimum: usize },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: &'static str },

    #[error("lattice enumeration would visit {lattice_points} points, budget is {budget}")]
    BudgetExceeded { lattice_points: u128, budget: u128 },

    #[error("alpha is rational within working precision: {p}/{q}")]
    RationalAlpha { p: i64, q: i64 },

    #[error("need at least {need} eigenvalues, model has {have}")]
    TooFewEigenvalues { have: usize, need: usize },

    #[error("custom spectra must be strictly increasing with multiplicities >= 1")]
    MalformedCustomSpectrum,

    #[error("multiplicity overflow at level {level}")]
    MultiplicityOverflow { level: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    /// Laplacian on the round N-sphere, eigenvalues k(k+N-1).
    Sphere { dimension: usize },
    /// N-dimensional harmonic oscillator, eigenvalues 2k+N.
    Oscillator { dimension: usize },
    /// flat torus with side lengths a, b: values (2π/a)²m² + (2π/b)²n².
    Torus { a: f64, b: f64 },
    /// caller-supplied list.
    Custom,
}

/// a purely discrete spectrum: strictly increasing distinct eigenvalues with
/// multiplicities, plus the zero-avoiding shift.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    kind: SpectrumKind,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u64>,
    shift: f64,
}

impl SpectrumModel {
    fn assemble(kind: SpectrumKind, eigenvalues: Vec<f64>, multiplicities: Vec<u64>) -> Self {
        // smallest unit shift that moves every eigenvalue off zero.
        let mut shift = 0.0;
        while eigenvalues.iter().any(|&l| (l + shift).abs() < 1e-12) {
            shift += 1.0;
        }
        Self { kind, eigenvalues, multiplicities, shift }
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    /// number of distinct eigenvalues.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// eigenvalues exactly as the family formula produces them (may contain 0).
    pub fn raw_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// the uniform translation applied before anything divides by λ.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// k-th eigenvalue after the shift; never zero.
    pub fn shifted(&self, k: usize) -> f64 {
        self.eigenvalues[k] + self.shift
    }

    pub fn shifted_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&l| l + self.shift).collect()
    }

    /// shifted eigenvalues repeated according to multiplicity, truncated to
    /// at most `limit` entries.
    pub fn expanded_with_multiplicity(&self, limit: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(limit.min(4096));
        'outer: for (idx, &m) in self.multiplicities.iter().enumerate() {
            for _ in 0..m {
                if out.len() >= limit {
                    break 'outer;
                }
                out.push(self.shifted(idx));
            }
        }
        out
    }
}

/// half-gap profile δ_k = min of the two adjacent half-gaps; endpoints use
/// their single available gap halved.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SummabilityVerdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for SummabilityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SummabilityVerdict::Converging => write!(f, "converging"),
            SummabilityVerdict::Diverging => write!(f, "diverging"),
            SummabilityVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// diagnostic for Σ 1/(|λ_k|^ℓ δ_k^n): terms, running sums, and a fitted
/// tail exponent. the verdict is a heuristic — a finite sample cannot decide
/// summability — with a ±0.1 dead zone around the harmonic exponent −1.
#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    pub ell: u32,
    pub n: u32,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub fitted_tail_exponent: f64,
    pub verdict: SummabilityVerdict,
}

/// best observed constant in |α − p/q| ≥ C/q^d over denominators up to qmax.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineEstimate {
    pub alpha: f64,
    pub degree: u32,
    pub qmax: u64,
    pub c_est: f64,
    pub p: i64,
    pub q: i64,
}

/// eigenvalue enclosures μ_k ± ‖V‖∞ under a bounded perturbation, with
/// flags marking adjacent enclosures that overlap (possible gap collapse).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationBracket {
    pub v_inf: f64,
    pub brackets: Vec<(f64, f64)>,
    /// overlaps[k] == true when bracket k and bracket k+1 intersect.
    pub overlaps: Vec<bool>,
}

const LATTICE_BUDGET: u128 = 100_000_000;

/// binomial coefficient with exact integer arithmetic; errors on overflow.
fn binomial(n: u128, k: u128, level: usize) -> Result<u128, SpectraError> {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result
            .checked_mul(n - k + i)
            .ok_or(SpectraError::MultiplicityOverflow { level })?
            / i;
    }
    Ok(result)
}

/// sphere Laplacian spectrum: eigenvalues k(k+N−1) for k = 0..=k_max with
/// harmonic-polynomial multiplicities (N+2k−1)(N+k−2)! / (k!(N−1)!).
pub fn sphere_spectrum(dimension: usize, k_max: usize) -> Result<SpectrumModel, SpectraError> {
    if dimension < 2 {
        return Err(SpectraError::InvalidDimension { dimension, minimum: 2 });
    }
    let n = dimension as u128;
    let mut eigenvalues = Vec::with_capacity(k_max + 1);
    let mut multiplicities = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let kk = k as u128;
        eigenvalues.push((k * (k + dimension - 1)) as f64);
        // (N+2k−1) · C(N+k−2, k) / (N−1); the division is exact because the
        // whole expression is the dimension of the degree-k harmonics.
        let m = binomial(n + kk - 2, kk, k)?
            .checked_mul(n + 2 * kk - 1)
            .ok_or(SpectraError::MultiplicityOverflow { level: k })?
            / (n - 1);
        multiplicities.push(u64::try_from(m).map_err(|_| SpectraError::MultiplicityOverflow { level: k })?);
    }
    Ok(SpectrumModel::assemble(
        SpectrumKind::Sphere { dimension },
        eigenvalues,
        multiplicities,
    ))
}

/// harmonic oscillator spectrum: 2k+N for k = 0..=k_max, level multiplicity
/// C(k+N−1, N−1).
pub fn oscillator_spectrum(dimension: usize, k_max: usize) -> Result<SpectrumModel, SpectraError> {
    if dimension < 1 {
        return Err(SpectraError::InvalidDimension { dimension, minimum: 1 });
    }
    let n = dimension as u128;
    let mut eigenvalues = Vec::with_capacity(k_max + 1);
    let mut multiplicities = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        eigenvalues.push((2 * k + dimension) as f64);
        let m = binomial(k as u128 + n - 1, n - 1, k)?;
        multiplicities.push(u64::try_from(m).map_err(|_| SpectraError::MultiplicityOverflow { level: k })?);
    }
    Ok(SpectrumModel::assemble(
        SpectrumKind::Oscillator { dimension },
        eigenvalues,
        multiplicities,
    ))
}

/// flat-torus spectrum: all values (2π/a)²m² + (2π/b)²n² up to lambda_max
/// over the integer lattice, deduplicated at 1e−9 relative tolerance, with
/// lattice-point counts as multiplicities.
pub fn torus_spectrum(a: f64, b: f64, lambda_max: f64) -> Result<SpectrumModel, SpectraError> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(SpectraError::InvalidParameter { what: "torus sides must be positive" });
    }
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(SpectraError::InvalidParameter { what: "lambda_max must be positive and finite" });
    }
    let a_prime = (2.0 * std::f64::consts::PI / a).powi(2);
    let b_prime = (2.0 * std::f64::consts::PI / b).powi(2);
    let m_max = (lambda_max / a_prime).sqrt().floor() as u128;
    let n_max = (lambda_max / b_prime).sqrt().floor() as u128;
    let lattice_points = (2 * m_max + 1) * (2 * n_max + 1);
    if lattice_points > LATTICE_BUDGET {
        return Err(SpectraError::BudgetExceeded { lattice_points, budget: LATTICE_BUDGET });
    }

    // enumerate the quarter lattice and weight by the sign symmetries.
    let cutoff = lambda_max * (1.0 + 1e-12);
    let mut values: Vec<(f64, u64)> = Vec::new();
    for m in 0..=(m_max as u64) {
        let am = a_prime * (m as f64) * (m as f64);
        if am > cutoff {
            break;
        }
        for n in 0..=(n_max as u64) {
            let v = am + b_prime * (n as f64) * (n as f64);
            if v > cutoff {
                break;
            }
            let weight = if m > 0 { 2 } else { 1 } * if n > 0 { 2 } else { 1 };
            values.push((v, weight));
        }
    }
    values.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite values"));

    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<u64> = Vec::new();
    for (v, w) in values {
        match eigenvalues.last() {
            Some(&last) if v - last <= 1e-9 * v.abs().max(1.0) => {
                *multiplicities.last_mut().expect("parallel vectors") += w;
            }
            _ => {
                eigenvalues.push(v);
                multiplicities.push(w);
            }
        }
    }
    Ok(SpectrumModel::assemble(SpectrumKind::Torus { a, b }, eigenvalues, multiplicities))
}

/// caller-supplied spectrum; must be strictly increasing with positive
/// multiplicities.
pub fn custom_spectrum(entries: &[(f64, u64)]) -> Result<SpectrumModel, SpectraError> {
    if entries.is_empty() {
        return Err(SpectraError::MalformedCustomSpectrum);
    }
    for pair in entries.windows(2) {
        if !(pair[0].0 < pair[1].0) {
            return Err(SpectraError::MalformedCustomSpectrum);
        }
    }
    if entries.iter().any(|&(l, m)| !l.is_finite() || m == 0) {
        return Err(SpectraError::MalformedCustomSpectrum);
    }
    let (eigenvalues, multiplicities) = entries.iter().copied().unzip();
    Ok(SpectrumModel::assemble(SpectrumKind::Custom, eigenvalues, multiplicities))
}

/// δ_k = min(|λ_{k+1}−λ_k|, |λ_k−λ_{k−1}|)/2; endpoints take their single
/// adjacent gap halved.
pub fn gap_profile(model: &SpectrumModel) -> Result<GapProfile, SpectraError> {
    let lambda = model.raw_eigenvalues();
    if lambda.len() < 2 {
        return Err(SpectraError::TooFewEigenvalues { have: lambda.len(), need: 2 });
    }
    let count = lambda.len();
    let mut deltas = Vec::with_capacity(count);
    for k in 0..count {
        let left = (k > 0).then(|| lambda[k] - lambda[k - 1]);
        let right = (k + 1 < count).then(|| lambda[k + 1] - lambda[k]);
        let gap = match (left, right) {
            (Some(l), Some(r)) => l.min(r),
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("count >= 2"),
        };
        deltas.push(gap / 2.0);
    }
    Ok(GapProfile { deltas })
}

/// partial sums and tail-exponent fit for Σ 1/(|λ_k|^ℓ δ_k^n) over the
/// first `k_count` distinct eigenvalues.
pub fn summability(
    model: &SpectrumModel,
    ell: u32,
    n: u32,
    k_count: usize,
) -> Result<SummabilityReport, SpectraError> {
    if model.len() < k_count {
        return Err(SpectraError::TooFewEigenvalues { have: model.len(), need: k_count });
    }
    if k_count < 2 {
        return Err(SpectraError::TooFewEigenvalues { have: k_count, need: 2 });
    }
    let profile = gap_profile(model)?;
    let mut terms = Vec::with_capacity(k_count);
    let mut partial_sums = Vec::with_capacity(k_count);
    let mut running = 0.0;
    for k in 0..k_count {
        let lambda = model.shifted(k).abs();
        let term = 1.0 / (lambda.powi(ell as i32) * profile.deltas[k].powi(n as i32));
        running += term;
        terms.push(term);
        partial_sums.push(running);
    }
    let points: Vec<(f64, f64)> = terms
        .iter()
        .enumerate()
        .map(|(i, &t)| ((i + 1) as f64, t))
        .collect();
    let fit = log_log_fit_top_decade(&points);
    let verdict = if fit.slope < -1.1 {
        SummabilityVerdict::Converging
    } else if fit.slope > -0.9 {
        SummabilityVerdict::Diverging
    } else {
        SummabilityVerdict::Inconclusive
    };
    Ok(SummabilityReport {
        ell,
        n,
        terms,
        partial_sums,
        fitted_tail_exponent: fit.slope,
        verdict,
    })
}

/// continued-fraction convergents p/q of alpha with q ≤ q_limit. float
/// precision caps the useful depth; the expansion stops once the recurrence
/// leaves the reliable range.
pub fn continued_fraction_convergents(alpha: f64, q_limit: u64) -> Vec<(i64, i64)> {
    let mut convergents = Vec::new();
    let mut x = alpha;
    // p_{-1}/q_{-1} = 1/0, p_0/q_0 = a_0/1
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let mut a0 = x.floor();
    let (mut p_cur, mut q_cur): (i128, i128) = (a0 as i128, 1);
    convergents.push((p_cur as i64, 1));
    for _ in 0..64 {
        let frac = x - a0;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        if !x.is_finite() || x.abs() > 1e15 {
            break;
        }
        a0 = x.floor();
        let a = a0 as i128;
        let p_next = a * p_cur + p_prev;
        let q_next = a * q_cur + q_prev;
        if q_next > q_limit as i128 || q_next <= 0 {
            break;
        }
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        convergents.push((p_cur as i64, q_cur as i64));
    }
    convergents
}

const RATIONAL_GUARD_Q: i64 = 100;
const RATIONAL_GUARD_TOL: f64 = 1e-14;

fn rational_within_guard(alpha: f64) -> Option<(i64, i64)> {
    for q in 1..=RATIONAL_GUARD_Q {
        let p = (alpha * q as f64).round();
        if (alpha - p / q as f64).abs() <= RATIONAL_GUARD_TOL {
            return Some((p as i64, q));
        }
    }
    None
}

const EXHAUSTIVE_Q: u64 = 10_000;

/// best observed Diophantine constant: min over q ≤ qmax of q^d·|αq − p|/q
/// with p the nearest integer. denominators come from an exhaustive sweep of
/// q ≤ 10⁴ joined with the continued-fraction convergents up to qmax (which
/// is where the minimum can hide for larger q).
pub fn diophantine_constant(alpha: f64, degree: u32, qmax: u64) -> Result<DiophantineEstimate, SpectraError> {
    if degree < 2 {
        return Err(SpectraError::InvalidParameter { what: "degree must be >= 2" });
    }
    if qmax < 10 {
        return Err(SpectraError::InvalidParameter { what: "qmax must be >= 10" });
    }
    if let Some((p, q)) = rational_within_guard(alpha) {
        return Err(SpectraError::RationalAlpha { p, q });
    }

    let mut best: Option<(f64, i64, i64)> = None;
    let mut consider = |q: i64| {
        let p = (alpha * q as f64).round() as i64;
        let value = (q as f64).powi(degree as i32) * (alpha - p as f64 / q as f64).abs();
        if best.map_or(true, |(b, _, _)| value < b) {
            best = Some((value, p, q));
        }
    };
    for q in 1..=(EXHAUSTIVE_Q.min(qmax) as i64) {
        consider(q);
    }
    for (_, q) in continued_fraction_convergents(alpha, qmax) {
        consider(q);
    }
    let (c_est, p, q) = best.expect("qmax >= 10 guarantees candidates");
    Ok(DiophantineEstimate { alpha, degree, qmax, c_est, p, q })
}

/// gap lower-bound scan for the two-frequency torus: over successive
/// distinct eigenvalue pairs up to lambda_max, the minimum of λ^{d−1}·δ with
/// λ the larger eigenvalue of the pair and δ the half-gap. `violations`
/// counts pairs where the product is numerically zero (< 1e−12).
pub fn torus_gap_bound_check(
    a: f64,
    b: f64,
    degree: u32,
    lambda_max: f64,
) -> Result<(f64, u64), SpectraError> {
    let alpha = (b / a).powi(2);
    if let Some((p, q)) = rational_within_guard(alpha) {
        return Err(SpectraError::RationalAlpha { p, q });
    }
    let model = torus_spectrum(a, b, lambda_max)?;
    let lambda = model.raw_eigenvalues();
    if lambda.len() < 2 {
        return Err(SpectraError::TooFewEigenvalues { have: lambda.len(), need: 2 });
    }
    let mut c_min = f64::INFINITY;
    let mut violations = 0;
    for pair in lambda.windows(2) {
        let delta = (pair[1] - pair[0]) / 2.0;
        let scale = pair[1].abs().max(pair[0].abs());
        let product = scale.powi(degree as i32 - 1) * delta;
        if product < 1e-12 {
            violations += 1;
        }
        c_min = c_min.min(product);
    }
    Ok((c_min, violations))
}

/// power-law fit μ_j ≈ C·j^e over the multiplicity-expanded spectrum,
/// restricted to the top decade of indices. returns (C, e).
pub fn weyl_fit(model: &SpectrumModel, k_count: usize) -> Result<(f64, f64), SpectraError> {
    let expanded = model.expanded_with_multiplicity(k_count);
    if expanded.len() < 10 {
        return Err(SpectraError::TooFewEigenvalues { have: expanded.len(), need: 10 });
    }
    let points: Vec<(f64, f64)> = expanded
        .iter()
        .enumerate()
        .map(|(j, &mu)| ((j + 1) as f64, mu.abs()))
        .collect();
    let fit = log_log_fit_top_decade(&points);
    Ok((fit.intercept.exp(), fit.slope))
}

/// brackets [μ_k − v, μ_k + v] around the raw eigenvalues under a
/// perturbation of sup-norm v, with adjacent-overlap flags.
pub fn perturbation_bracket(model: &SpectrumModel, v_inf: f64) -> Result<PerturbationBracket, SpectraError> {
    if !(v_inf >= 0.0) {
        return Err(SpectraError::InvalidParameter { what: "perturbation bound must be >= 0" });
    }
    let brackets: Vec<(f64, f64)> = model
        .raw_eigenvalues()
        .iter()
        .map(|&l| (l - v_inf, l + v_inf))
        .collect();
    let overlaps = brackets
        .windows(2)
        .map(|w| w[0].1 >= w[1].0)
        .collect();
    Ok(PerturbationBracket { v_inf, brackets, overlaps })
}
