//! contour quadrature for resolvent integrals.
//!
//! two path families cover everything the lab does:
//!
//! * circles around a single spectral point — trapezoid rule on equispaced
//!   nodes, which converges exponentially for integrands analytic in an
//!   annulus around the circle (the classical periodic-trapezoid result);
//! * the separation path along the real axis with a small semicircular detour
//!   at the origin — composite Gauss–Legendre on dyadically split segments
//!   (panels refine toward the cut radius, where the integrand varies
//!   fastest), Gauss–Legendre in the angle on the semicircle.
//!
//! every integral here is normalized by 1/(2πi): `integrate_circle` of the
//! resolvent is directly a Riesz projector, no caller-side scaling.
//!
//! the semicircle is traversed in the positive (counterclockwise) sense, from
//! +δ over the top to −δ. for integrands analytic at the origin — every
//! resolvent composite the lab integrates — the arc orientation is
//! immaterial; for test integrands with a pole at 0 it pins the winding
//! contribution to +1/2, which is the anchor value the separation operator
//! construction expects.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{ComplexMatrix, ComplexVector, NumericsError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ContourError {
    #[error("circle radius must be positive and finite, got {radius}")]
    InvalidRadius { radius: f64 },

    #[error("{nodes} quadrature nodes requested, need at least {minimum}")]
    TooFewNodes { nodes: usize, minimum: usize },

    #[error("separation path needs 0 < cut radius < outer radius, got cut {cut_radius}, outer {outer_radius}")]
    InvalidSeparation { cut_radius: f64, outer_radius: f64 },

    /// the integrand failed at a quadrature node; the whole integral aborts
    /// rather than skipping nodes, because a silently dropped node is a
    /// silently wrong projector.
    #[error("integrand failed at node {node}: {source}")]
    NodeEvaluationFailure { node: Complex64, source: NumericsError },
}

/// positively oriented circle `center + radius·e^{iθ}` sampled at `nodes`
/// equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePath {
    center: Complex64,
    radius: f64,
    nodes: usize,
}

pub const DEFAULT_CIRCLE_NODES: usize = 64;

impl CirclePath {
    pub fn new(center: Complex64, radius: f64, nodes: usize) -> Result<Self, ContourError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(ContourError::InvalidRadius { radius });
        }
        if nodes < 4 {
            return Err(ContourError::TooFewNodes { nodes, minimum: 4 });
        }
        Ok(Self { center, radius, nodes })
    }

    /// default 64-node circle.
    pub fn around(center: Complex64, radius: f64) -> Result<Self, ContourError> {
        Self::new(center, radius, DEFAULT_CIRCLE_NODES)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn with_nodes(&self, nodes: usize) -> Result<Self, ContourError> {
        Self::new(self.center, self.radius, nodes)
    }

    /// the quadrature nodes on the circle, in traversal order.
    pub fn node_points(&self) -> Vec<Complex64> {
        (0..self.nodes).map(|j| self.point_at(j)).collect()
    }

    fn point_at(&self, j: usize) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (self.nodes as f64);
        self.center + Complex64::from_polar(self.radius, theta)
    }

    /// signed distance context: |dist(z, circle)| = | |z - center| - radius |.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// the spectral separation path: [−R, −δ] ∪ C⁺(0, δ) ∪ [δ, R] with the
/// semicircle detour over the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationPath {
    cut_radius: f64,
    outer_radius: f64,
    segment_nodes: usize,
    arc_nodes: usize,
}

pub const DEFAULT_SEGMENT_NODES: usize = 128;
pub const DEFAULT_ARC_NODES: usize = 32;

impl SeparationPath {
    pub fn new(cut_radius: f64, outer_radius: f64, segment_nodes: usize, arc_nodes: usize) -> Result<Self, ContourError> {
        if !(cut_radius > 0.0) || !(outer_radius > cut_radius) || !outer_radius.is_finite() {
            return Err(ContourError::InvalidSeparation { cut_radius, outer_radius });
        }
        if segment_nodes < 8 {
            return Err(ContourError::TooFewNodes { nodes: segment_nodes, minimum: 8 });
        }
        if arc_nodes < 4 {
            return Err(ContourError::TooFewNodes { nodes: arc_nodes, minimum: 4 });
        }
        Ok(Self {
            cut_radius,
            outer_radius,
            segment_nodes,
            arc_nodes,
        })
    }

    /// default node budget: 128 per straight segment, 32 on the semicircle.
    pub fn with_radii(cut_radius: f64, outer_radius: f64) -> Result<Self, ContourError> {
        Self::new(cut_radius, outer_radius, DEFAULT_SEGMENT_NODES, DEFAULT_ARC_NODES)
    }

    pub fn cut_radius(&self) -> f64 {
        self.cut_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn segment_nodes(&self) -> usize {
        self.segment_nodes
    }

    pub fn arc_nodes(&self) -> usize {
        self.arc_nodes
    }

    /// same path with every node budget multiplied; the self-convergence
    /// reference used by tests and reports.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            cut_radius: self.cut_radius,
            outer_radius: self.outer_radius,
            segment_nodes: self.segment_nodes * factor,
            arc_nodes: self.arc_nodes * factor,
        }
    }

    /// distance from a point to the path (segments and semicircle).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let seg = |a: f64, b: f64| -> f64 {
            // distance from z to the real interval [a, b]
            let x = z.re.clamp(a, b);
            (z - Complex64::new(x, 0.0)).norm()
        };
        let d_neg = seg(-self.outer_radius, -self.cut_radius);
        let d_pos = seg(self.cut_radius, self.outer_radius);
        // upper semicircle of radius δ
        let d_arc = if z.im >= 0.0 {
            (z.norm() - self.cut_radius).abs()
        } else {
            (z - Complex64::new(z.re.signum() * self.cut_radius, 0.0)).norm()
        };
        d_neg.min(d_pos).min(d_arc)
    }
}

/// anything a contour integral can accumulate: scalars, vectors, matrices.
pub trait QuadratureOperand: Clone {
    fn scaled(&self, w: Complex64) -> Self;
    fn add_scaled(&mut self, w: Complex64, value: &Self);
}

impl QuadratureOperand for Complex64 {
    fn scaled(&self, w: Complex64) -> Self {
        self * w
    }
    fn add_scaled(&mut self, w: Complex64, value: &Self) {
        *self += w * value;
    }
}

impl QuadratureOperand for ComplexVector {
    fn scaled(&self, w: Complex64) -> Self {
        self.scale(w)
    }
    fn add_scaled(&mut self, w: Complex64, value: &Self) {
        self.add_scaled_assign(w, value);
    }
}

impl QuadratureOperand for ComplexMatrix {
    fn scaled(&self, w: Complex64) -> Self {
        self.scale(w)
    }
    fn add_scaled(&mut self, w: Complex64, value: &Self) {
        self.add_scaled_assign(w, value);
    }
}

fn accumulate<T: QuadratureOperand>(acc: &mut Option<T>, w: Complex64, value: &T) {
    match acc {
        Some(a) => a.add_scaled(w, value),
        None => *acc = Some(value.scaled(w)),
    }
}

/// (1/2πi) ∮ f(λ) dλ over the circle, by the trapezoid rule.
///
/// with λ_j = center + r e^{iθ_j} the normalized integral collapses to
/// (r/M) Σ_j f(λ_j) e^{iθ_j}; exponentially accurate while the integrand is
/// analytic in a neighbourhood of the circle.
pub fn integrate_circle<T, F>(path: &CirclePath, mut f: F) -> Result<T, ContourError>
where
    T: QuadratureOperand,
    F: FnMut(Complex64) -> Result<T, NumericsError>,
{
    let m = path.nodes as f64;
    let mut acc: Option<T> = None;
    for j in 0..path.nodes {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / m;
        let node = path.center + Complex64::from_polar(path.radius, theta);
        let value = f(node).map_err(|source| ContourError::NodeEvaluationFailure { node, source })?;
        let w = Complex64::from_polar(path.radius / m, theta);
        accumulate(&mut acc, w, &value);
    }
    Ok(acc.expect("circle paths have at least 4 nodes"))
}

/// (1/2πi) ∫_Γ f(λ) dλ over the separation path.
///
/// straight segments use composite Gauss–Legendre on dyadic panels (so the
/// node density follows the 1/|λ| variation of resolvent tails); the
/// semicircle uses Gauss–Legendre in the angle. the negative segment's nodes
/// are the exact mirror images of the positive segment's, so odd integrands
/// cancel to rounding.
pub fn integrate_separation<T, F>(path: &SeparationPath, mut f: F) -> Result<T, ContourError>
where
    T: QuadratureOperand,
    F: FnMut(Complex64) -> Result<T, NumericsError>,
{
    let panels = dyadic_panels(path.cut_radius, path.outer_radius);
    let per_panel = ((path.segment_nodes as f64 / panels.len() as f64).round() as usize).clamp(6, 512);
    let (gl_nodes, gl_weights) = gauss_legendre(per_panel);

    let inv_2pi_i = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI)); // 1/(2πi)
    let mut acc: Option<T> = None;

    // [−R, −δ] then the arc then [δ, R]; within segments the order is
    // ascending |λ|-agnostic but fixed, keeping runs bit-reproducible.
    for &(a, b) in &panels {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&x, &w) in gl_nodes.iter().zip(&gl_weights) {
            let t = mid + half * x;
            let weight = inv_2pi_i * Complex64::new(half * w, 0.0);
            // mirrored node on [−R, −δ]
            let node_neg = Complex64::new(-t, 0.0);
            let v = f(node_neg).map_err(|source| ContourError::NodeEvaluationFailure { node: node_neg, source })?;
            accumulate(&mut acc, weight, &v);
            let node_pos = Complex64::new(t, 0.0);
            let v = f(node_pos).map_err(|source| ContourError::NodeEvaluationFailure { node: node_pos, source })?;
            accumulate(&mut acc, weight, &v);
        }
    }

    // semicircle, positively oriented: λ = δ e^{iθ}, θ from 0 to π,
    // dλ = iδ e^{iθ} dθ.
    let (arc_nodes, arc_weights) = gauss_legendre(path.arc_nodes);
    let half = 0.5 * std::f64::consts::PI;
    for (&x, &w) in arc_nodes.iter().zip(&arc_weights) {
        let theta = half + half * x;
        let node = Complex64::from_polar(path.cut_radius, theta);
        let dlambda = Complex64::new(0.0, 1.0) * node; // iδe^{iθ}
        let weight = inv_2pi_i * dlambda * Complex64::new(half * w, 0.0);
        let v = f(node).map_err(|source| ContourError::NodeEvaluationFailure { node, source })?;
        accumulate(&mut acc, weight, &v);
    }

    Ok(acc.expect("separation paths have nodes"))
}

/// [cut, outer] split at powers of two of the cut radius.
fn dyadic_panels(cut: f64, outer: f64) -> Vec<(f64, f64)> {
    let mut panels = Vec::new();
    let mut lo = cut;
    while lo < outer {
        let hi = (lo * 2.0).min(outer);
        panels.push((lo, hi));
        lo = hi;
    }
    panels
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on the
/// Legendre recurrence; plenty accurate and fast for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // root i counted from the right; classical asymptotic initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            derivative = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // odd orders: the middle node is exactly zero.
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 1 {
        return (x, 1.0);
    }
    for k in 2..=n {
        let p2 = (((2 * k - 1) as f64) * x * p1 - ((k - 1) as f64) * p0) / (k as f64);
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(z: Complex64) -> Result<Complex64, NumericsError> {
        Ok(z)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1.
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_handles_small_orders() {
        for n in 1..=8 {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "order {n}");
            for pair in x.windows(2) {
                assert!(pair[0] < pair[1], "nodes out of order at n={n}");
            }
        }
    }

    #[test]
    fn residue_of_inverse_lambda_is_one() {
        let path = CirclePath::new(Complex64::new(0.0, 0.0), 1.0, 16).unwrap();
        let value: Complex64 = integrate_circle(&path, |z| ok(1.0 / z)).unwrap();
        assert!((value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn entire_integrand_integrates_to_zero() {
        let path = CirclePath::new(Complex64::new(0.5, -0.5), 2.0, 32).unwrap();
        let value: Complex64 = integrate_circle(&path, |z| ok(z * z)).unwrap();
        assert!(value.norm() < 1e-13);
    }

    #[test]
    fn pole_outside_contributes_nothing() {
        let path = CirclePath::new(Complex64::new(0.0, 0.0), 1.0, 64).unwrap();
        let value: Complex64 = integrate_circle(&path, |z| ok(1.0 / (z - Complex64::new(3.0, 0.0)))).unwrap();
        assert!(value.norm() < 1e-10);
    }

    #[test]
    fn node_failure_aborts_with_location() {
        let path = CirclePath::new(Complex64::new(0.0, 0.0), 1.0, 8).unwrap();
        let result: Result<Complex64, _> = integrate_circle(&path, |z| {
            if z.re > 0.9 {
                Err(NumericsError::Overflow)
            } else {
                Ok(z)
            }
        });
        match result {
            Err(ContourError::NodeEvaluationFailure { node, source }) => {
                assert!(node.re > 0.9);
                assert_eq!(source, NumericsError::Overflow);
            }
            other => panic!("expected node failure, got {other:?}"),
        }
    }

    #[test]
    fn exponential_convergence_of_circle_rule() {
        // exact geometric-series error law for a simple pole: (ratio)^M.
        let check = |pole: Complex64, nodes: usize| -> f64 {
            let path = CirclePath::new(Complex64::new(0.0, 0.0), 1.0, nodes).unwrap();
            let value: Complex64 = integrate_circle(&path, |z| ok(1.0 / (z - pole))).unwrap();
            let exact = if pole.norm() < 1.0 { 1.0 } else { 0.0 };
            (value - Complex64::new(exact, 0.0)).norm()
        };
        // inside at half the radius and outside at 1.5x: both ≤ 1e-10 at 64 nodes.
        assert!(check(Complex64::new(0.3, 0.4), 64) <= 1e-10);
        assert!(check(Complex64::new(0.9, 1.2), 64) <= 1e-10);
        // at relative distance 0.25 the true error floor is ~1e-8 inside
        // and ~6e-7 outside; assert the honest bound.
        assert!(check(Complex64::new(0.75, 0.0), 64) <= 1e-6);
        assert!(check(Complex64::new(-1.25, 0.0), 64) <= 1e-6);
        // node doubling squares the error (up to rounding floor).
        let e64 = check(Complex64::new(0.0, 0.75), 64);
        let e128 = check(Complex64::new(0.0, 0.75), 128);
        assert!(e128 <= e64 * e64 * 10.0 + 1e-15, "e64={e64:e}, e128={e128:e}");
    }

    #[test]
    fn deformation_invariance_for_enclosed_pole() {
        let pole = Complex64::new(0.1, -0.2);
        let f = |z: Complex64| ok(1.0 / (z - pole) + z * Complex64::new(0.0, 2.0));
        let small = CirclePath::new(pole, 0.5, 64).unwrap();
        let large = CirclePath::new(Complex64::new(0.0, 0.0), 2.0, 64).unwrap();
        let a: Complex64 = integrate_circle(&small, f).unwrap();
        let b: Complex64 = integrate_circle(&large, f).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn separation_winds_half_around_the_origin() {
        // segments cancel by oddness; the CCW semicircle contributes iπ, so
        // the normalized integral of 1/λ is exactly +1/2.
        let path = SeparationPath::with_radii(1e-3, 1e6).unwrap();
        let value: Complex64 = integrate_separation(&path, |z| ok(1.0 / z)).unwrap();
        assert!(
            (value - Complex64::new(0.5, 0.0)).norm() < 1e-5,
            "got {value} instead of 1/2"
        );
    }

    #[test]
    fn separation_self_convergence_for_upper_pole() {
        let path = SeparationPath::new(0.1, 1e3, 128, 32).unwrap();
        let reference = path.refined(10);
        let f = |z: Complex64| ok(1.0 / (z - Complex64::new(0.0, 1.0)));
        let coarse: Complex64 = integrate_separation(&path, f).unwrap();
        let fine: Complex64 = integrate_separation(&reference, f).unwrap();
        assert!((coarse - fine).norm() < 1e-8, "coarse {coarse}, fine {fine}");
        // the value itself sits near +1/2 (pole in the upper half-plane);
        // the detour at cut radius δ deflects it by 2δ/π ≈ 0.064.
        let deflection = 2.0 * 0.1 / std::f64::consts::PI;
        assert!(((coarse - Complex64::new(0.5, 0.0)).norm() - deflection).abs() < 5e-3);
    }

    #[test]
    fn separation_handles_entire_odd_integrands() {
        let path = SeparationPath::new(0.5, 100.0, 64, 16).unwrap();
        let value: Complex64 = integrate_separation(&path, |z| ok(z)).unwrap();
        let fine: Complex64 = integrate_separation(&path.refined(10), |z| ok(z)).unwrap();
        assert!(value.norm() < 1e-10, "odd integrand should cancel, got {value}");
        assert!((value - fine).norm() < 1e-10);
    }

    #[test]
    fn path_validation_rejects_bad_geometry() {
        assert!(matches!(
            CirclePath::new(Complex64::new(0.0, 0.0), -1.0, 16),
            Err(ContourError::InvalidRadius { .. })
        ));
        assert!(matches!(
            CirclePath::new(Complex64::new(0.0, 0.0), 1.0, 3),
            Err(ContourError::TooFewNodes { minimum: 4, .. })
        ));
        assert!(matches!(
            SeparationPath::with_radii(2.0, 1.0),
            Err(ContourError::InvalidSeparation { .. })
        ));
        assert!(matches!(
            SeparationPath::with_radii(0.0, 1.0),
            Err(ContourError::InvalidSeparation { .. })
        ));
    }

    #[test]
    fn distance_to_separation_path() {
        let path = SeparationPath::with_radii(0.5, 10.0).unwrap();
        // point on the positive segment
        assert!(path.distance_to(Complex64::new(3.0, 0.0)) < 1e-12);
        // point above the origin at the cut radius sits on the arc
        assert!(path.distance_to(Complex64::new(0.0, 0.5)) < 1e-12);
        // far point in the upper half plane
        let d = path.distance_to(Complex64::new(0.0, 4.0));
        assert!((d - 3.5).abs() < 1e-12);
    }

    #[test]
    fn circle_linearity() {
        let path = CirclePath::new(Complex64::new(0.0, 0.0), 1.0, 32).unwrap();
        let f = |z: Complex64| ok(1.0 / (z - Complex64::new(0.2, 0.1)));
        let g = |z: Complex64| ok(z * z + 1.0 / z);
        let alpha = Complex64::new(2.0, -1.0);
        let beta = Complex64::new(-0.5, 3.0);
        let combined: Complex64 =
            integrate_circle(&path, |z| Ok(alpha * f(z).unwrap() + beta * g(z).unwrap())).unwrap();
        let fa: Complex64 = integrate_circle(&path, f).unwrap();
        let gb: Complex64 = integrate_circle(&path, g).unwrap();
        assert!((combined - (alpha * fa + beta * gb)).norm() < 1e-12);
    }
}
