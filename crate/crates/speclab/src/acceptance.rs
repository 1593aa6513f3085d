//! end-to-end verification battery.
//!
//! nine numbered criteria exercise the whole stack — contour projectors
//! against an eigendecomposition oracle, the projector algebra, the weighted
//! bound on skew-Hermitian draws, weighted partial sums and decomposition
//! convergence, the half-plane separation operator, integrated groups, the
//! sampled resolvent bound, the spectrum families, and finally determinism:
//! criterion 9 re-runs the others and demands a byte-identical report.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contours::SeparationPath;
use crate::groups::{
    fit_polynomial_bound, integrated_group, integrated_group_closed_form, laplace_check,
    sample_integrated_group, symmetric_time_grid,
};
use crate::models::{
    build_model, bundled_models, random_skew_hermitian, seeded_unit_vector, smooth_vector,
    OperatorModel,
};
use crate::numerics::{op_norm, ComplexMatrix, ComplexVector, LuFactorization};
use crate::projectors::{
    decomposition_experiment, gelfand_nilpotency_check, local_part, partial_sum_weighted,
    plan_contours, projector_set, resolvent_bound_check, resolvent_real_part_bound,
    riesz_projector, weighted_projector_bounded,
};
use crate::spectra::{
    custom_spectrum, diophantine_constant, gap_profile, oscillator_spectrum, sphere_spectrum,
    summability, torus_gap_bound_check, torus_spectrum, weyl_fit, SummabilityVerdict,
};

type DynError = Box<dyn std::error::Error>;

/// outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

/// full battery outcome with the rendered text report.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub text: String,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        !self.criteria.is_empty() && self.criteria.iter().all(|c| c.passed)
    }
}

/// comparison tolerances for the battery's defect norms. the looser
/// structural bands (growth-fit windows, the ratio cap, runtime limits) are
/// part of the criteria themselves and are not configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// 1e-8-class operator identities (oracle match, algebra, partial sums).
    pub tight: f64,
    /// trace-integrality defect.
    pub trace: f64,
    /// vector-level spectral synthesis defect.
    pub vector: f64,
    /// half-plane separation mapping defects.
    pub separation: f64,
    /// block-exponential vs closed-form agreement.
    pub group: f64,
    /// Laplace-transform defect.
    pub laplace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tight: 1e-8,
            trace: 1e-6,
            vector: 1e-7,
            separation: 1e-5,
            group: 1e-9,
            laplace: 1e-6,
        }
    }
}

impl Tolerances {
    /// one value for every defect class; 1e-16 forces controlled failures.
    pub fn uniform(value: f64) -> Self {
        Self {
            tight: value,
            trace: value,
            vector: value,
            separation: value,
            group: value,
            laplace: value,
        }
    }
}

const NAMES: [&str; 9] = [
    "contour projectors match the eigendecomposition oracle",
    "projector algebra on the bundled models",
    "weighted projector bound and spectral synthesis on skew-hermitian draws",
    "nilpotent local parts, weighted partial sums, decomposition convergence",
    "half-plane separation on the mixed-sign model",
    "integrated groups: closed-form agreement, transform defect, growth fit",
    "resolvent bound sampling on the bundled models",
    "spectrum families: multiplicities, gaps, approximation constants, growth, summability",
    "repeated runs produce byte-identical reports",
];

/// names of the nine criteria, in order, for listing and filtering.
pub fn criterion_names() -> &'static [&'static str] {
    &NAMES
}

type Criterion = fn(u64, &Tolerances) -> CriterionReport;

/// run every criterion.
pub fn run_all(seed: u64, tol: &Tolerances) -> AcceptanceReport {
    run_filtered(seed, tol, None)
}

/// run the criteria whose name (or 1-based index) matches the filter; the
/// determinism criterion, when selected, re-runs the same subset and
/// compares the two reports byte for byte.
pub fn run_filtered(seed: u64, tol: &Tolerances, filter: Option<&str>) -> AcceptanceReport {
    let battery: [Criterion; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let selected: Vec<usize> = (0..battery.len())
        .filter(|&i| matches_filter(NAMES[i], i + 1, filter))
        .collect();
    let mut criteria: Vec<CriterionReport> =
        selected.iter().map(|&i| battery[i](seed, tol)).collect();
    if matches_filter(NAMES[8], 9, filter) {
        let first = criteria_lines(&criteria);
        let rerun: Vec<CriterionReport> =
            selected.iter().map(|&i| battery[i](seed, tol)).collect();
        let second = criteria_lines(&rerun);
        let passed = first == second;
        let details = if passed {
            format!(
                "re-running {} criteria reproduced the {}-byte report exactly",
                selected.len(),
                first.len()
            )
        } else {
            "the repeated run produced a different report".to_string()
        };
        criteria.push(CriterionReport {
            index: 9,
            name: NAMES[8],
            passed,
            details,
        });
    }
    let text = report_text(seed, &criteria);
    AcceptanceReport {
        seed,
        criteria,
        text,
    }
}

/// true when the criterion should run under the given filter; filters match
/// a 1-based index or a case-insensitive name substring (a trailing plural
/// 's' is forgiven).
fn matches_filter(name: &str, index: usize, filter: Option<&str>) -> bool {
    let Some(raw) = filter else { return true };
    let needle = raw.trim().to_lowercase();
    if needle.is_empty() {
        return true;
    }
    if let Ok(number) = needle.parse::<usize>() {
        return number == index;
    }
    name.contains(&needle) || name.contains(needle.trim_end_matches('s'))
}

/// the rendered report: a header line, one line per criterion, a summary.
pub fn report_text(seed: u64, criteria: &[CriterionReport]) -> String {
    let passed = criteria.iter().filter(|c| c.passed).count();
    let mut text = format!("verification battery (seed {seed})\n");
    text.push_str(&criteria_lines(criteria));
    text.push_str(&format!("passed {passed} of {} criteria\n", criteria.len()));
    text
}

fn criteria_lines(criteria: &[CriterionReport]) -> String {
    let mut out = String::new();
    for criterion in criteria {
        let flag = if criterion.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "[{}] {} {}: {}\n",
            criterion.index, flag, criterion.name, criterion.details
        ));
    }
    out
}

fn guard(index: usize, result: Result<CriterionReport, DynError>) -> CriterionReport {
    result.unwrap_or_else(|error| CriterionReport {
        index,
        name: NAMES[index - 1],
        passed: false,
        details: format!("evaluation aborted: {error}"),
    })
}

fn bundled(name: &str) -> Result<OperatorModel, DynError> {
    bundled_models()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, model)| model)
        .ok_or_else(|| format!("bundled model {name} is missing").into())
}

/// draw a skew-Hermitian model whose spectrum respects the guards, advancing
/// the seed deterministically until one qualifies.
fn drawn_skew_model(
    start: u64,
    dim: usize,
    min_modulus: f64,
    max_modulus: f64,
    min_gap: f64,
) -> Result<OperatorModel, DynError> {
    let mut draw = start;
    for _ in 0..64 {
        let model = random_skew_hermitian(dim, draw)?;
        let lambdas: Vec<f64> = model.spectrum.iter().map(|p| p.lambda).collect();
        let smallest = lambdas.iter().fold(f64::INFINITY, |m, &l| m.min(l.abs()));
        let largest = lambdas.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let gap = lambdas
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if smallest >= min_modulus && largest <= max_modulus && gap >= min_gap {
            return Ok(model);
        }
        draw = draw.wrapping_add(0x9E37_79B9_7F4A_7C15);
    }
    Err("no skew-hermitian draw satisfied the spectrum guards in 64 attempts".into())
}

// ---------------------------------------------------------------------------
// criterion 1: contour projectors vs an independent eigendecomposition oracle
// ---------------------------------------------------------------------------

/// exact spectral projector of a simple spectrum via the Lagrange product
/// Π_{j≠k} (A − μ_j)/(μ_k − μ_j). factors are applied farthest-from-μ_k
/// first: every intermediate diagonal entry in the eigenbasis then grows by
/// at most a factor of two per step before its own factor annihilates it,
/// which keeps rounding far below the comparison tolerance.
fn lagrange_projector(a: &ComplexMatrix, labels: &[Complex64], k: usize) -> ComplexMatrix {
    let dim = a.rows();
    let mu_k = labels[k];
    let mut others: Vec<Complex64> = labels
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, &mu)| mu)
        .collect();
    others.sort_by(|x, y| {
        (y - mu_k)
            .norm()
            .partial_cmp(&(x - mu_k).norm())
            .expect("finite eigenvalue labels")
    });
    let mut product = ComplexMatrix::identity(dim);
    for &mu_j in &others {
        let factor = a
            .sub(&ComplexMatrix::identity(dim).scale(mu_j))
            .scale((mu_k - mu_j).inv());
        product = product.matmul(&factor);
    }
    product
}

fn criterion_1(seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(1, c1_projector_oracle(seed, tol))
}

fn c1_projector_oracle(seed: u64, tol: &Tolerances) -> Result<CriterionReport, DynError> {
    let kappas = [1.0, 10.0, 50.0, 100.0];
    let model_count = 20;
    let mut worst = 0.0_f64;
    for i in 0..model_count {
        let model_seed = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(model_seed);
        // magnitudes at least 0.25 apart with alternating signs: the signed
        // values stay at least 1.0 apart, so every contour is comfortably
        // separated.
        let mut lambdas: Vec<f64> = (0..8)
            .map(|k| {
                let magnitude = 1.0 + 0.75 * k as f64 + 0.5 * rng.gen::<f64>();
                if k % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect();
        lambdas.sort_by(|x, y| x.partial_cmp(y).expect("finite spectrum"));
        let spectrum: Vec<(f64, Vec<usize>)> = lambdas.iter().map(|&l| (l, vec![1])).collect();
        let model = build_model(&spectrum, kappas[i % kappas.len()], model_seed)?;
        let labels = model.eigenvalue_labels();
        let plans = plan_contours(&labels);
        if plans.len() != labels.len() {
            return Err("expected one contour per eigenvalue of a simple spectrum".into());
        }
        for plan in &plans {
            let projector = riesz_projector(&model.matrix, &plan.path()?)?;
            let k = labels
                .iter()
                .position(|&mu| mu == plan.members[0])
                .ok_or("plan member missing from the label list")?;
            let oracle = lagrange_projector(&model.matrix, &labels, k);
            worst = worst.max(op_norm(&projector.matrix.sub(&oracle)));
        }
    }
    Ok(CriterionReport {
        index: 1,
        name: NAMES[0],
        passed: worst <= tol.tight,
        details: format!(
            "{model_count} random diagonalizable 8x8 models (condition numbers up to 100), \
             64-node contours, worst deviation {worst:.3e} (tolerance {:.1e})",
            tol.tight
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 2: projector algebra on every bundled model
// ---------------------------------------------------------------------------

fn criterion_2(_seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(2, c2_projector_algebra(tol))
}

fn c2_projector_algebra(tol: &Tolerances) -> Result<CriterionReport, DynError> {
    let mut worst_idempotence = 0.0_f64;
    let mut worst_pairwise = 0.0_f64;
    let mut worst_completeness = 0.0_f64;
    let mut worst_trace = 0.0_f64;
    let models = bundled_models();
    let model_count = models.len();
    for (_, model) in models {
        let labels = model.eigenvalue_labels();
        let projectors = projector_set(&model.matrix, &labels)?;
        let dim = model.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for p in &projectors {
            worst_idempotence = worst_idempotence.max(p.idempotence_defect);
            worst_trace = worst_trace.max(p.trace_integrality_defect());
            sum = sum.add(&p.matrix);
        }
        for i in 0..projectors.len() {
            for j in 0..projectors.len() {
                if i != j {
                    let product = projectors[i].matrix.matmul(&projectors[j].matrix);
                    worst_pairwise = worst_pairwise.max(op_norm(&product));
                }
            }
        }
        worst_completeness =
            worst_completeness.max(op_norm(&sum.sub(&ComplexMatrix::identity(dim))));
    }
    let passed = worst_idempotence <= tol.tight
        && worst_pairwise <= tol.tight
        && worst_completeness <= tol.tight
        && worst_trace <= tol.trace;
    Ok(CriterionReport {
        index: 2,
        name: NAMES[1],
        passed,
        details: format!(
            "{model_count} bundled models: idempotence {worst_idempotence:.3e}, \
             pairwise products {worst_pairwise:.3e}, completeness {worst_completeness:.3e} \
             (tolerance {:.1e}); trace integrality {worst_trace:.3e} (tolerance {:.1e})",
            tol.tight, tol.trace
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 3: weighted projector bound and spectral synthesis
// ---------------------------------------------------------------------------

fn criterion_3(seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(3, c3_weighted_bound(seed, tol))
}

fn c3_weighted_bound(seed: u64, tol: &Tolerances) -> Result<CriterionReport, DynError> {
    let model_count = 10;
    let mut worst_ratio = 0.0_f64;
    let mut worst_synthesis = 0.0_f64;
    for i in 0..model_count {
        let start = seed ^ (0xC3_0000 + (i as u64) * 0x9973);
        let model = drawn_skew_model(start, 6, 0.25, f64::INFINITY, 0.25)?;
        let a = &model.matrix;
        let labels = model.eigenvalue_labels();
        let plans = plan_contours(&labels);
        let y = seeded_unit_vector(model.dim(), model.seed ^ 0x0bad_cafe);
        let x = smooth_vector(&model, 2, &y)?;
        let mut synthesized = ComplexVector::zeros(model.dim());
        for plan in &plans {
            if plan.cluster {
                return Err("the gap guard should rule out clustered draws".into());
            }
            let path = plan.path()?;
            let c = resolvent_real_part_bound(a, &path)?;
            let weighted = weighted_projector_bounded(a, &path)?;
            worst_ratio = worst_ratio.max(op_norm(&weighted.matrix) / (2.0 * c));
            let plain = riesz_projector(a, &path)?;
            synthesized = synthesized.add(&plain.matrix.scale(plan.members[0]).matvec(&x));
        }
        worst_synthesis = worst_synthesis.max(synthesized.sub(&a.matvec(&x)).norm2());
    }
    let passed = worst_ratio <= 1.0 + 1e-9 && worst_synthesis <= tol.vector;
    Ok(CriterionReport {
        index: 3,
        name: NAMES[2],
        passed,
        details: format!(
            "{model_count} skew-hermitian 6x6 draws: worst weighted-norm over twice the \
             measured resolvent bound {worst_ratio:.6}, worst synthesis defect on smoothed \
             vectors {worst_synthesis:.3e} (tolerance {:.1e})",
            tol.vector
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 4: local nilpotency, weighted partial sums, decomposition decay
// ---------------------------------------------------------------------------

fn criterion_4(_seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(4, c4_weighted_machinery(tol))
}

fn c4_weighted_machinery(tol: &Tolerances) -> Result<CriterionReport, DynError> {
    let cases: [(&str, usize); 2] = [("jordan-two", 1), ("jordan-three-mixed", 2)];
    let mut worst_nilpotency = 0.0_f64;
    let mut worst_match = 0.0_f64;
    for (name, order_n) in cases {
        let model = bundled(name)?;
        let a = &model.matrix;
        let labels = model.eigenvalue_labels();
        let plans = plan_contours(&labels);
        let projectors = projector_set(a, &labels)?;
        for projector in &projectors {
            let part = local_part(a, projector)?;
            worst_nilpotency =
                worst_nilpotency.max(op_norm(&part.matrix.pow(order_n + 1)));
        }
        // plain sums accumulate in the plan order, which is the same
        // eigenvalue ordering the weighted sum applies to the exact labels;
        // re-deriving the order from computed labels could flip a tie.
        let centers: Vec<Complex64> = plans.iter().map(|p| p.center).collect();
        let gaps: Vec<f64> = plans.iter().map(|p| p.half_gap()).collect();
        let dim = model.dim();
        let mut plain = ComplexMatrix::zeros(dim, dim);
        for count in 0..=plans.len() {
            if count > 0 {
                plain = plain.add(&projectors[count - 1].matrix);
            }
            let weighted = partial_sum_weighted(a, &centers, &gaps, order_n, count)?;
            worst_match = worst_match.max(op_norm(&weighted.sub(&plain)));
        }
    }

    // recorded regression fixture: this conditioned diagonal model's error
    // curve decreases at every step and lands at rounding level.
    let fixture = build_model(
        &[
            (1.0, vec![1]),
            (4.0, vec![1]),
            (9.0, vec![1]),
            (16.0, vec![1]),
            (25.0, vec![1]),
        ],
        100.0,
        777,
    )?;
    let rows = decomposition_experiment(&fixture, 2, 0, 5)?;
    let decreasing = rows
        .windows(2)
        .all(|pair| pair[1].error <= pair[0].error * (1.0 + 1e-9) + 1e-14);
    let final_error = rows[rows.len() - 1].error;
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
    ratios.sort_by(|x, y| x.partial_cmp(y).expect("finite ratios"));
    let median = ratios[ratios.len() / 2];
    let ratio_spread = ratios[ratios.len() - 1] / median;

    let passed = worst_nilpotency <= tol.tight
        && worst_match <= tol.tight
        && decreasing
        && final_error <= tol.tight
        && ratio_spread <= 50.0;
    Ok(CriterionReport {
        index: 4,
        name: NAMES[3],
        passed,
        details: format!(
            "local parts vanish at their block order within {worst_nilpotency:.3e}; weighted \
             and plain partial sums agree within {worst_match:.3e} at every length (tolerance \
             {:.1e}); fixture error decreasing={decreasing}, final {final_error:.3e}, \
             error/tail ratio max-to-median {ratio_spread:.2} (cap 50)",
            tol.tight
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 5: half-plane separation on the mixed-sign model
// ---------------------------------------------------------------------------

fn criterion_5(_seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(5, c5_separation(tol))
}

fn c5_separation(tol: &Tolerances) -> Result<CriterionReport, DynError> {
    let model = bundled("mixed-sign-six")?;
    let a = &model.matrix;
    let labels = model.eigenvalue_labels();
    let plans = plan_contours(&labels);
    let projectors = projector_set(a, &labels)?;
    let dim = model.dim();
    let mut upper = ComplexMatrix::zeros(dim, dim);
    let mut lower = ComplexMatrix::zeros(dim, dim);
    for (plan, projector) in plans.iter().zip(&projectors) {
        if plan.center.im > 0.0 {
            upper = upper.add(&projector.matrix);
        } else {
            lower = lower.add(&projector.matrix);
        }
    }
    let path = SeparationPath::new(1e-7, 1e4, 768, 64)?;
    let first = crate::projectors::separation_operator(a, 0, &path)?;
    let second = crate::projectors::separation_operator(a, 1, &path)?;
    let inverse = LuFactorization::new(a)?.inverse()?;
    let kills_lower = op_norm(&first.matrix.matmul(&lower));
    let fixes_upper = op_norm(&first.matrix.matmul(&upper).sub(&inverse.matmul(&upper)));
    let squares = op_norm(&first.matrix.matmul(&first.matrix).sub(&second.matrix));
    let passed =
        kills_lower <= tol.separation && fixes_upper <= tol.separation && squares <= tol.separation;
    Ok(CriterionReport {
        index: 5,
        name: NAMES[4],
        passed,
        details: format!(
            "truncation radius 1e4: lower-half-plane part mapped to {kills_lower:.3e}, \
             upper-half-plane inverse images reproduced within {fixes_upper:.3e}, \
             composition identity within {squares:.3e} (tolerance {:.1e})",
            tol.separation
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 6: integrated groups
// ---------------------------------------------------------------------------

fn criterion_6(seed: u64, tol: &Tolerances) -> CriterionReport {
    guard(6, c6_integrated_groups(seed, tol))
}

fn c6_integrated_groups(seed: u64, tol: &Tolerances) -> Result<CriterionReport, DynError> {
    // (a) block-exponential vs closed form on three invertible fixtures of
    // operator norm at most 10, across orders 1..=3 and |t| <= 20.
    let diagonal = bundled("diagonal-simple")?;
    let jordan = build_model(&[(1.0, vec![2]), (-2.0, vec![1])], 2.0, seed ^ 0x6a6a)?;
    let skew = drawn_skew_model(seed ^ 0x5e11, 4, 0.25, 8.0, 0.25)?;
    let fixtures = [diagonal.matrix, jordan.matrix, skew.matrix];
    let norm_cap = fixtures.iter().map(op_norm).fold(0.0_f64, f64::max);
    let times = symmetric_time_grid(20.0, 40);
    let mut worst_agreement = 0.0_f64;
    for a in &fixtures {
        for order in [1usize, 2, 3] {
            for &t in &times {
                let direct = integrated_group(a, order, t)?;
                let closed = integrated_group_closed_form(a, order, t)?;
                worst_agreement = worst_agreement.max(op_norm(&direct.sub(&closed)));
            }
        }
    }

    // (b) the once-integrated family transforms back to the resolvent.
    let defect_diagonal =
        laplace_check(&fixtures[0], 1, Complex64::new(2.0, 0.0), 15.0)?;
    let defect_jordan = laplace_check(&fixtures[1], 1, Complex64::new(1.0, 0.0), 25.0)?;
    let worst_laplace = defect_diagonal.max(defect_jordan);

    // (c) growth-fit chain on the 5x5 nilpotent shift: the group grows like
    // t^4, and the fitted degree feeds the norm-of-powers vanishing check.
    let shift5 = ComplexMatrix::from_fn(5, 5, |r, c| {
        if c == r + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let sample = sample_integrated_group(&shift5, 0, &symmetric_time_grid(200.0, 140))?;
    let fit = fit_polynomial_bound(&sample)?;
    let degree_ok = (fit.degree - 4.0).abs() <= 0.2 && fit.degree_rounded == 4;
    let residual = gelfand_nilpotency_check(&shift5, fit.degree_rounded as usize, 0)?;

    let passed = norm_cap <= 10.0
        && worst_agreement <= tol.group
        && worst_laplace <= tol.laplace
        && degree_ok
        && residual == 0.0;
    Ok(CriterionReport {
        index: 6,
        name: NAMES[5],
        passed,
        details: format!(
            "3 fixtures with operator norm up to {norm_cap:.3}: block-exponential vs \
             closed form within {worst_agreement:.3e} for |t| <= 20 (tolerance {:.1e}); \
             transform defect {worst_laplace:.3e} (tolerance {:.1e}); nilpotent-shift fitted \
             degree {:.4} (target 4 +- 0.2) with vanishing power norm {residual:.1e}",
            tol.group, tol.laplace, fit.degree
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 7: sampled resolvent bound
// ---------------------------------------------------------------------------

fn criterion_7(_seed: u64, _tol: &Tolerances) -> CriterionReport {
    guard(7, c7_resolvent_bound())
}

fn c7_resolvent_bound() -> Result<CriterionReport, DynError> {
    let mut total_samples = 0_usize;
    let mut total_violations = 0_usize;
    let models = bundled_models();
    let model_count = models.len();
    for (_, model) in models {
        let labels = model.eigenvalue_labels();
        let plans = plan_contours(&labels);
        for plan in &plans {
            let projector = riesz_projector(&model.matrix, &plan.path()?)?;
            let report = resolvent_bound_check(&model.matrix, &projector, 200)?;
            total_samples += report.sample_points.len();
            total_violations += report.violations;
        }
    }
    Ok(CriterionReport {
        index: 7,
        name: NAMES[6],
        passed: total_violations == 0,
        details: format!(
            "{model_count} bundled models, 200 requested samples per projector: \
             {total_samples} exterior points evaluated, {total_violations} violations"
        ),
    })
}

// ---------------------------------------------------------------------------
// criterion 8: spectrum families
// ---------------------------------------------------------------------------

fn criterion_8(_seed: u64, _tol: &Tolerances) -> CriterionReport {
    guard(8, c8_spectrum_families())
}

fn c8_spectrum_families() -> Result<CriterionReport, DynError> {
    // sphere surface: eigenvalues k(k+1) with multiplicity 2k+1, exactly.
    let sphere = sphere_spectrum(2, 48)?;
    let sphere_exact = sphere
        .multiplicities()
        .iter()
        .enumerate()
        .all(|(k, &m)| m == 2 * k as u64 + 1)
        && sphere
            .raw_eigenvalues()
            .iter()
            .enumerate()
            .all(|(k, &l)| l == (k * (k + 1)) as f64);

    // oscillator line: consecutive gaps are exactly 2, half-gaps exactly 1.
    let oscillator = oscillator_spectrum(1, 400)?;
    let oscillator_exact = gap_profile(&oscillator)?.deltas.iter().all(|&d| d == 1.0);

    // quadratic-irrational approximation constant for sqrt(2).
    let estimate = diophantine_constant(std::f64::consts::SQRT_2, 2, 100_000)?;
    let diophantine_ok = estimate.c_est >= 0.34 && estimate.c_est <= 0.36;

    // torus gap lower bound with frequency ratio alpha = sqrt(2).
    let torus_start = Instant::now();
    let (c_min, torus_violations) =
        torus_gap_bound_check(1.0, std::f64::consts::SQRT_2.sqrt(), 2, 1e3)?;
    let torus_elapsed = torus_start.elapsed().as_secs_f64();
    let torus_ok = torus_violations == 0 && c_min > 1e-6 && torus_elapsed <= 60.0;

    // growth exponents of the eigenvalue sequences, counted with
    // multiplicity: all three families grow linearly in the expanded index
    // (the oscillator spectrum 2k+1 with simple multiplicities included).
    let (_, sphere_exponent) = weyl_fit(&sphere_spectrum(2, 64)?, 2000)?;
    let (_, oscillator_exponent) = weyl_fit(&oscillator_spectrum(1, 2000)?, 2000)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let (_, torus_exponent) = weyl_fit(&torus_spectrum(two_pi, two_pi, 4000.0)?, 2500)?;
    let weyl_ok = (sphere_exponent - 1.0).abs() <= 0.1
        && (oscillator_exponent - 1.0).abs() <= 0.1
        && (torus_exponent - 1.0).abs() <= 0.15;

    // tail-sum verdicts: two convergent configurations and the constructed
    // harmonic boundary, which must stay inconclusive.
    let sphere_sum = summability(&sphere_spectrum(2, 400)?, 1, 1, 400)?;
    let oscillator_sum = summability(&oscillator_spectrum(1, 2000)?, 2, 1, 2000)?;
    let harmonic_entries: Vec<(f64, u64)> = (1..=2000).map(|k| (k as f64, 1)).collect();
    let harmonic_sum = summability(&custom_spectrum(&harmonic_entries)?, 1, 0, 2000)?;
    let verdicts_ok = sphere_sum.verdict == SummabilityVerdict::Converging
        && oscillator_sum.verdict == SummabilityVerdict::Converging
        && harmonic_sum.verdict == SummabilityVerdict::Inconclusive;

    let passed =
        sphere_exact && oscillator_exact && diophantine_ok && torus_ok && weyl_ok && verdicts_ok;
    Ok(CriterionReport {
        index: 8,
        name: NAMES[7],
        passed,
        details: format!(
            "sphere multiplicities/eigenvalues exact={sphere_exact}; oscillator half-gaps \
             exactly one={oscillator_exact}; c_est(sqrt 2, degree 2, q <= 1e5) = \
             {:.6} in [0.34, 0.36]; torus bound: {torus_violations} violations, \
             c_min {c_min:.3e} (> 1e-6, within 60 s: {torus_ok}); growth exponents \
             sphere {sphere_exponent:.3}, oscillator {oscillator_exponent:.3}, torus \
             {torus_exponent:.3} (linear index bands 1 +- 0.1, 1 +- 0.1, 1 +- 0.15); \
             verdicts {}/{}/{} (want converging/converging/inconclusive)",
            estimate.c_est, sphere_sum.verdict, oscillator_sum.verdict, harmonic_sum.verdict
        ),
    })
}
