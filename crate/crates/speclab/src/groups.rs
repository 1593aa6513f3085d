//! n-times integrated groups S(t) of a matrix generator, their Laplace
//! characterization, and polynomial growth fits.
//!
//! S(t) is the n-fold iterated time integral of e^{tA}. the workhorse
//! evaluation is exact up to the matrix exponential: embed A in the
//! (n+1)×(n+1) block upper-bidiagonal generator
//!
//! ```text
//!     B = [ A  I        ]
//!         [    0  I     ]
//!         [       …  I  ]
//!         [          0  ]
//! ```
//!
//! and read S(t) off the top-right block of exp(tB) — the same trick used
//! for φ-functions in exponential integrators. for invertible A the closed
//! form A^{−n}(e^{tA} − Σ_{j<n} t^jA^j/j!) provides an independent oracle.
//! t may be negative: the block identity holds verbatim, giving the
//! two-sided group.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::contours::gauss_legendre;
use crate::numerics::{log_log_fit_top_decade, mat_exp, op_norm, ComplexMatrix, LuFactorization, NumericsError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GroupsError {
    #[error("truncation tail estimate {estimated_tail:.3e} exceeds the tolerance {tolerance:.1e}")]
    TruncationInsufficient { estimated_tail: f64, tolerance: f64 },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: &'static str },

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// S(t) evaluated over a time grid, with spectral norms alongside.
#[derive(Debug, Clone)]
pub struct IntegratedGroupSample {
    pub order: usize,
    pub times: Vec<f64>,
    pub values: Vec<ComplexMatrix>,
    pub norms: Vec<f64>,
}

/// fitted polynomial growth bound ‖S(t)‖ ≤ M·(1 + |t|^m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundFit {
    /// prefactor, set to sup ‖S(t)‖/(1+|t|^m) over the sample, so the bound
    /// holds on every sampled point by construction.
    pub m_constant: f64,
    /// fitted degree (real).
    pub degree: f64,
    /// nearest integer to the fitted degree.
    pub degree_rounded: i64,
    /// worst log-log fit residual over the fitted decade.
    pub residual: f64,
}

/// S(t) via the block-exponential: top-right dim×dim block of exp(tB).
pub fn integrated_group(a: &ComplexMatrix, order: usize, t: f64) -> Result<ComplexMatrix, GroupsError> {
    if !a.is_square() {
        return Err(GroupsError::Numerics(NumericsError::NotSquare { rows: a.rows(), cols: a.cols() }));
    }
    if !t.is_finite() {
        return Err(GroupsError::InvalidParameter { what: "time must be finite" });
    }
    let dim = a.rows();
    if order == 0 {
        return Ok(mat_exp(&a.scale(Complex64::new(t, 0.0)))?);
    }
    if t == 0.0 {
        return Ok(ComplexMatrix::zeros(dim, dim));
    }
    let blocks = order + 1;
    let mut generator = ComplexMatrix::zeros(blocks * dim, blocks * dim);
    generator.set_block(0, 0, a);
    let eye = ComplexMatrix::identity(dim);
    for b in 0..order {
        generator.set_block(b * dim, (b + 1) * dim, &eye);
    }
    let exponential = mat_exp(&generator.scale(Complex64::new(t, 0.0)))?;
    Ok(exponential.block(0, order * dim, dim, dim))
}

/// closed-form oracle for invertible A:
/// S(t) = A^{−n}·(e^{tA} − Σ_{j=0}^{n−1} t^j A^j / j!).
pub fn integrated_group_closed_form(a: &ComplexMatrix, order: usize, t: f64) -> Result<ComplexMatrix, GroupsError> {
    let dim = a.rows();
    let mut residue = mat_exp(&a.scale(Complex64::new(t, 0.0)))?;
    let mut term = ComplexMatrix::identity(dim);
    for j in 0..order {
        if j > 0 {
            term = term.matmul(a).scale(Complex64::new(t / j as f64, 0.0));
        }
        residue = residue.sub(&term);
    }
    let factorization = LuFactorization::new(a)?;
    for _ in 0..order {
        residue = factorization.solve_matrix(&residue)?;
    }
    Ok(residue)
}

/// evaluate S(t) over a whole grid (parallel over t, order-preserving).
pub fn sample_integrated_group(
    a: &ComplexMatrix,
    order: usize,
    times: &[f64],
) -> Result<IntegratedGroupSample, GroupsError> {
    let values: Vec<ComplexMatrix> = times
        .par_iter()
        .map(|&t| integrated_group(a, order, t))
        .collect::<Result<_, _>>()?;
    let norms = values.iter().map(op_norm).collect();
    Ok(IntegratedGroupSample {
        order,
        times: times.to_vec(),
        values,
        norms,
    })
}

/// symmetric time grid with `points_per_side` samples on each sign of
/// [−t_max, t_max], t = 0 included.
pub fn symmetric_time_grid(t_max: f64, points_per_side: usize) -> Vec<f64> {
    let mut times = Vec::with_capacity(2 * points_per_side + 1);
    for i in (1..=points_per_side).rev() {
        times.push(-t_max * i as f64 / points_per_side as f64);
    }
    times.push(0.0);
    for i in 1..=points_per_side {
        times.push(t_max * i as f64 / points_per_side as f64);
    }
    times
}

const LAPLACE_TAIL_TOLERANCE: f64 = 1e-9;

/// defect ‖λ^n ∫_0^T e^{−λt} S(t) dt − (λ−A)^{−1}‖.
///
/// the quadrature is composite Gauss–Legendre with 32 points per unit
/// interval, doubled on the first unit where S has its order-n zero. the
/// truncation tail is gated by the e^{−Re λ·T}(1+T^n) ≤ 1e−9 rule before
/// any work happens.
pub fn laplace_check(
    a: &ComplexMatrix,
    order: usize,
    lambda: Complex64,
    t_max: f64,
) -> Result<f64, GroupsError> {
    if lambda.re <= 0.0 {
        return Err(GroupsError::InvalidParameter { what: "Re(lambda) must be positive" });
    }
    if !(t_max > 0.0) {
        return Err(GroupsError::InvalidParameter { what: "truncation time must be positive" });
    }
    let tail = (-lambda.re * t_max).exp() * (1.0 + t_max.powi(order as i32));
    if tail > LAPLACE_TAIL_TOLERANCE {
        return Err(GroupsError::TruncationInsufficient {
            estimated_tail: tail,
            tolerance: LAPLACE_TAIL_TOLERANCE,
        });
    }

    let dim = a.rows();
    // panel boundaries at the integers, fractional last panel.
    let mut boundaries = vec![0.0];
    let mut edge = 1.0;
    while edge < t_max {
        boundaries.push(edge);
        edge += 1.0;
    }
    boundaries.push(t_max);

    let mut integral = ComplexMatrix::zeros(dim, dim);
    for (panel_index, window) in boundaries.windows(2).enumerate() {
        let (lo, hi) = (window[0], window[1]);
        let points = if panel_index == 0 { 64 } else { 32 };
        let (nodes, weights) = gauss_legendre(points);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        // evaluate the panel's S(t) values in parallel, reduce in order.
        let evaluations: Vec<(Complex64, ComplexMatrix)> = nodes
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&x, &w)| {
                let t = mid + half * x;
                let weight = (-lambda * t).exp() * Complex64::new(half * w, 0.0);
                integrated_group(a, order, t).map(|s| (weight, s))
            })
            .collect::<Result<_, _>>()?;
        for (weight, s) in &evaluations {
            integral.add_scaled_assign(*weight, s);
        }
    }

    let lambda_n = lambda.powu(order as u32);
    let scaled = integral.scale(lambda_n);
    let shifted = ComplexMatrix::identity(dim).scale(lambda).sub(a);
    let resolvent = LuFactorization::new(&shifted)?.inverse()?;
    Ok(op_norm(&scaled.sub(&resolvent)))
}

/// least-squares fit of log ‖S(t)‖ against log(1+|t|) over the top decade
/// of |t|; M is then set to the sup of ‖S(t)‖/(1+|t|^m) over the whole
/// sample so the bound is sharp and valid at every sampled point.
pub fn fit_polynomial_bound(sample: &IntegratedGroupSample) -> Result<BoundFit, GroupsError> {
    let t_max = sample.times.iter().fold(0.0_f64, |m, &t| m.max(t.abs()));
    if t_max < 100.0 {
        return Err(GroupsError::InvalidParameter { what: "fit needs samples out to |t| >= 100" });
    }
    if sample.times.len() < 200 {
        return Err(GroupsError::InvalidParameter { what: "fit needs at least 200 samples" });
    }
    let points: Vec<(f64, f64)> = sample
        .times
        .iter()
        .zip(&sample.norms)
        .map(|(&t, &norm)| (1.0 + t.abs(), norm))
        .collect();
    let fit = log_log_fit_top_decade(&points);
    let degree = fit.slope;
    let m_constant = points
        .iter()
        .map(|&(one_plus_t, norm)| {
            // x = 1+|t| ≥ 1, so 1 + |t|^m is recovered as 1 + (x−1)^m.
            norm / (1.0 + (one_plus_t - 1.0).abs().powf(degree))
        })
        .fold(0.0, f64::max);
    Ok(BoundFit {
        m_constant,
        degree,
        degree_rounded: degree.round() as i64,
        residual: fit.max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, random_skew_hermitian};

    fn scalar(z: Complex64) -> ComplexMatrix {
        ComplexMatrix::diagonal(&[z])
    }

    #[test]
    fn order_zero_is_the_exponential() {
        let a = ComplexMatrix::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(0.3, -0.2)]);
        let s = integrated_group(&a, 0, 1.3).unwrap();
        let direct = mat_exp(&a.scale(Complex64::new(1.3, 0.0))).unwrap();
        assert!(op_norm(&s.sub(&direct)) < 1e-14);
        // S(0) = I at order zero.
        let s0 = integrated_group(&a, 0, 0.0).unwrap();
        assert!(op_norm(&s0.sub(&ComplexMatrix::identity(2))) < 1e-15);
    }

    #[test]
    fn once_integrated_rotation_scalar() {
        let a = scalar(Complex64::new(0.0, 1.0));
        for &t in &[0.7, 3.0, 19.5, -4.2] {
            let s = integrated_group(&a, 1, t).unwrap();
            let expected = ((Complex64::new(0.0, t)).exp() - 1.0) / Complex64::new(0.0, 1.0);
            assert!((s.get(0, 0) - expected).norm() < 1e-12, "t = {t}");
            assert!(s.get(0, 0).norm() <= 2.0 + 1e-12);
        }
        // S(0) = 0 for n >= 1.
        let s0 = integrated_group(&a, 1, 0.0).unwrap();
        assert_eq!(s0.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn block_formula_matches_closed_form() {
        let model = build_model(
            &[(1.0, vec![1]), (-2.0, vec![2]), (3.5, vec![1]), (0.5, vec![1])],
            5.0,
            31,
        )
        .unwrap();
        let a = &model.matrix;
        for &(n, t) in &[(1usize, 1.7), (2, 1.7), (2, -2.4), (3, 0.9), (1, 15.0)] {
            let block = integrated_group(a, n, t).unwrap();
            let closed = integrated_group_closed_form(a, n, t).unwrap();
            assert!(
                op_norm(&block.sub(&closed)) < 1e-9,
                "n = {n}, t = {t}: {}",
                op_norm(&block.sub(&closed))
            );
        }
    }

    #[test]
    fn group_property_with_negative_times() {
        let model = build_model(&[(1.0, vec![1]), (2.0, vec![1]), (-1.5, vec![1])], 3.0, 8).unwrap();
        let forward = integrated_group(&model.matrix, 0, 2.5).unwrap();
        let backward = integrated_group(&model.matrix, 0, -2.5).unwrap();
        let product = forward.matmul(&backward);
        assert!(op_norm(&product.sub(&ComplexMatrix::identity(model.dim()))) < 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let a = scalar(Complex64::new(50.0, 0.0));
        match integrated_group(&a, 0, 20.0) {
            Err(GroupsError::Numerics(NumericsError::Overflow)) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn laplace_scalar_rotation() {
        // ∫_0^∞ e^{-t} e^{it} dt = 1/(1−i).
        let a = scalar(Complex64::new(0.0, 1.0));
        let defect = laplace_check(&a, 0, Complex64::new(1.0, 0.0), 25.0).unwrap();
        assert!(defect < 1e-8, "defect {defect}");
    }

    #[test]
    fn laplace_diagonal_and_jordan() {
        let a = ComplexMatrix::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)]);
        let defect = laplace_check(&a, 1, Complex64::new(2.0, 0.0), 15.0).unwrap();
        assert!(defect < 1e-6, "diagonal defect {defect}");

        let j2 = ComplexMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                Complex64::new(0.0, 1.0)
            } else if c == r + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let defect = laplace_check(&j2, 1, Complex64::new(1.0, 0.0), 25.0).unwrap();
        assert!(defect < 1e-6, "jordan defect {defect}");
    }

    #[test]
    fn laplace_defect_improves_with_longer_truncation() {
        let a = ComplexMatrix::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)]);
        let short = laplace_check(&a, 1, Complex64::new(2.0, 0.0), 12.0).unwrap();
        let long = laplace_check(&a, 1, Complex64::new(2.0, 0.0), 24.0).unwrap();
        assert!(long <= short + 1e-12, "short {short}, long {long}");
    }

    #[test]
    fn laplace_rejects_insufficient_truncation() {
        let a = scalar(Complex64::new(0.0, 1.0));
        match laplace_check(&a, 1, Complex64::new(0.1, 0.0), 10.0) {
            Err(GroupsError::TruncationInsufficient { estimated_tail, .. }) => {
                assert!(estimated_tail > 1e-9);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
        assert!(matches!(
            laplace_check(&a, 0, Complex64::new(-1.0, 0.0), 10.0),
            Err(GroupsError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn unitary_group_fits_flat() {
        let model = random_skew_hermitian(4, 2024).unwrap();
        let times = symmetric_time_grid(120.0, 150);
        let sample = sample_integrated_group(&model.matrix, 0, &times).unwrap();
        // skew-Hermitian generator: all norms are exactly 1.
        for &n in &sample.norms {
            assert!((n - 1.0).abs() < 1e-10);
        }
        let fit = fit_polynomial_bound(&sample).unwrap();
        assert!(fit.degree.abs() <= 0.1, "degree {}", fit.degree);
        assert!((fit.m_constant - 1.0).abs() < 0.1, "constant {}", fit.m_constant);
        assert_eq!(fit.degree_rounded, 0);
    }

    #[test]
    fn nilpotent_block_fits_linear_growth() {
        let j2 = ComplexMatrix::from_fn(2, 2, |r, c| {
            if c == r + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let times = symmetric_time_grid(150.0, 120);
        let sample = sample_integrated_group(&j2, 0, &times).unwrap();
        let fit = fit_polynomial_bound(&sample).unwrap();
        assert!((fit.degree - 1.0).abs() <= 0.1, "degree {}", fit.degree);
        // the fitted envelope really is an envelope.
        for (&t, &norm) in sample.times.iter().zip(&sample.norms) {
            assert!(norm <= fit.m_constant * (1.0 + t.abs().powf(fit.degree)) * (1.0 + 1e-6));
        }
    }

    #[test]
    fn mixed_jordan_growth_against_closed_form() {
        let model = build_model(&[(1.0, vec![2]), (2.0, vec![2])], 1.0, 77).unwrap();
        let times = symmetric_time_grid(110.0, 140);
        let sample = sample_integrated_group(&model.matrix, 1, &times).unwrap();
        let fit = fit_polynomial_bound(&sample).unwrap();

        // oracle: same grid through the closed form.
        let oracle_values: Vec<ComplexMatrix> = times
            .iter()
            .map(|&t| integrated_group_closed_form(&model.matrix, 1, t).unwrap())
            .collect();
        let oracle = IntegratedGroupSample {
            order: 1,
            times: times.clone(),
            norms: oracle_values.iter().map(op_norm).collect(),
            values: oracle_values,
        };
        let oracle_fit = fit_polynomial_bound(&oracle).unwrap();
        assert!(
            (fit.degree - oracle_fit.degree).abs() < 0.2,
            "block {} vs closed form {}",
            fit.degree,
            oracle_fit.degree
        );
    }

    #[test]
    fn temperate_bound_for_skew_hermitian_integrated() {
        let model = random_skew_hermitian(3, 555).unwrap();
        let times = symmetric_time_grid(130.0, 130);
        let sample = sample_integrated_group(&model.matrix, 1, &times).unwrap();
        let fit = fit_polynomial_bound(&sample).unwrap();
        assert!(fit.degree <= 1.0 + 0.2, "degree {}", fit.degree);
    }

    #[test]
    fn fit_preconditions() {
        let a = scalar(Complex64::new(0.0, 1.0));
        let times = symmetric_time_grid(50.0, 150);
        let sample = sample_integrated_group(&a, 0, &times).unwrap();
        assert!(matches!(
            fit_polynomial_bound(&sample),
            Err(GroupsError::InvalidParameter { .. })
        ));
        let times = symmetric_time_grid(120.0, 50);
        let sample = sample_integrated_group(&a, 0, &times).unwrap();
        assert!(matches!(
            fit_polynomial_bound(&sample),
            Err(GroupsError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn quintic_nilpotent_block_fits_quartic_growth() {
        let j5 = ComplexMatrix::from_fn(5, 5, |r, c| {
            if c == r + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let times = symmetric_time_grid(200.0, 140);
        let sample = sample_integrated_group(&j5, 0, &times).unwrap();
        let fit = fit_polynomial_bound(&sample).unwrap();
        assert!((fit.degree - 4.0).abs() <= 0.2, "degree {}", fit.degree);
    }
}
