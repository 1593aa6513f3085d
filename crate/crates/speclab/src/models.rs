//! finite-dimensional operator models with prescribed purely imaginary
//! spectra and Jordan structure.
//!
//! a model is A = T·J·T⁻¹ where J is the direct sum of Jordan blocks
//! J_b(iλ_k) and T is a random similarity with *controlled* condition
//! number κ — built as U·Σ·Vᴴ from two Haar unitaries and a geometric
//! singular-value ramp from 1 down to 1/κ, so cond(T) = κ exactly and T⁻¹
//! is available in factored form (no solve, no extra rounding). κ is the
//! knob separating the bounded-projector world (κ ≈ 1, normal-ish A) from
//! models whose spectral projectors grow in norm.
//!
//! zero eigenvalues are rejected at construction: everything downstream
//! (smoothed vectors A^{−p}y, separation operators) assumes invertibility.
//! the one deliberate exception is the Fourier differentiation matrix, which
//! carries its natural eigenvalue 0 and simply cannot be fed to the
//! inverse-power helpers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{eigenvalues, qr_unitary, ComplexMatrix, ComplexVector, LuFactorization, NumericsError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("eigenvalues {first} and {second} coincide within tolerance")]
    DegenerateSpectrum { first: f64, second: f64 },

    #[error("zero eigenvalues are forbidden in constructed models")]
    ZeroEigenvalue,

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: &'static str },

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// one distinct spectrum point iλ with its Jordan block sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub lambda: f64,
    pub blocks: Vec<usize>,
}

impl SpectrumPoint {
    /// algebraic multiplicity: total size of all blocks at this eigenvalue.
    pub fn algebraic_multiplicity(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }
}

/// a concrete matrix realizing a declared spectrum, together with the
/// construction parameters that make it reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorModel {
    pub spectrum: Vec<SpectrumPoint>,
    pub kappa: f64,
    pub seed: u64,
    pub matrix: ComplexMatrix,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl OperatorModel {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// the spectrum points as complex numbers iλ_k.
    pub fn eigenvalue_labels(&self) -> Vec<Complex64> {
        self.spectrum.iter().map(|p| Complex64::new(0.0, p.lambda)).collect()
    }

    /// integration order the model is built for: max block size − 1, so that
    /// every local part satisfies A_k^{n+1} = 0.
    pub fn n_declared(&self) -> usize {
        self.spectrum.iter().map(|p| p.max_block()).max().unwrap_or(1) - 1
    }

    pub fn has_zero_eigenvalue(&self) -> bool {
        self.spectrum.iter().any(|p| p.lambda.abs() < 1e-12)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn jordan_block(size: usize, eigenvalue: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_fn(size, size, |r, c| {
        if r == c {
            eigenvalue
        } else if c == r + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub(crate) fn standard_gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller; the clamp keeps ln() off zero.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_gaussian(rng), standard_gaussian(rng))
    })
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    qr_unitary(&gaussian_matrix(n, rng))
}

/// similarity T = U·Σ·Vᴴ with singular values ramping geometrically from 1
/// to 1/κ, returned together with its factored inverse V·Σ⁻¹·Uᴴ.
fn conditioned_similarity(n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
    let u = haar_unitary(n, rng);
    let v = haar_unitary(n, rng);
    let sigma: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                kappa.powf(-(i as f64) / ((n - 1) as f64))
            }
        })
        .collect();
    let scale_cols = |m: &ComplexMatrix, s: &dyn Fn(usize) -> f64| {
        ComplexMatrix::from_fn(n, n, |r, c| m.get(r, c) * s(c))
    };
    let t = scale_cols(&u, &|c| sigma[c]).matmul(&v.adjoint());
    let t_inv = scale_cols(&v, &|c| 1.0 / sigma[c]).matmul(&u.adjoint());
    (t, t_inv)
}

/// build A = T·(⊕ J_b(iλ_k))·T⁻¹ with cond(T) = κ, reproducible from the
/// seed.
pub fn build_model(spectrum: &[(f64, Vec<usize>)], kappa: f64, seed: u64) -> Result<OperatorModel, ModelError> {
    if spectrum.is_empty() {
        return Err(ModelError::InvalidParameter { what: "spectrum must be nonempty" });
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(ModelError::InvalidParameter { what: "kappa must be >= 1" });
    }
    for (lambda, blocks) in spectrum {
        if !lambda.is_finite() {
            return Err(ModelError::InvalidParameter { what: "eigenvalues must be finite" });
        }
        if lambda.abs() < 1e-12 {
            return Err(ModelError::ZeroEigenvalue);
        }
        if blocks.is_empty() || blocks.iter().any(|&b| b == 0) {
            return Err(ModelError::InvalidParameter { what: "every eigenvalue needs at least one nonzero block" });
        }
    }
    for (i, (li, _)) in spectrum.iter().enumerate() {
        for (lj, _) in spectrum.iter().skip(i + 1) {
            if (li - lj).abs() <= 1e-12 * li.abs().max(1.0) {
                return Err(ModelError::DegenerateSpectrum { first: *li, second: *lj });
            }
        }
    }

    let dim: usize = spectrum.iter().map(|(_, blocks)| blocks.iter().sum::<usize>()).sum();
    let mut jordan = ComplexMatrix::zeros(dim, dim);
    let mut offset = 0;
    for (lambda, blocks) in spectrum {
        for &b in blocks {
            jordan.set_block(offset, offset, &jordan_block(b, Complex64::new(0.0, *lambda)));
            offset += b;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t, t_inv) = conditioned_similarity(dim, kappa, &mut rng);
    let matrix = t.matmul(&jordan).matmul(&t_inv);

    Ok(OperatorModel {
        spectrum: spectrum
            .iter()
            .map(|(lambda, blocks)| SpectrumPoint { lambda: *lambda, blocks: blocks.clone() })
            .collect(),
        kappa,
        seed,
        matrix,
        notes: String::new(),
    })
}

/// the M×M periodic spectral differentiation matrix (M odd): entries
/// (−1)^{j−l}/(2 sin(π(j−l)/M)) off the diagonal. its eigenvalues are
/// exactly {ik : |k| ≤ (M−1)/2} with Fourier modes as eigenvectors; note it
/// carries the eigenvalue 0, so inverse-power helpers reject it.
pub fn fourier_derivative_model(grid_size: usize) -> Result<OperatorModel, ModelError> {
    if grid_size < 3 || grid_size % 2 == 0 {
        return Err(ModelError::InvalidParameter { what: "grid size must be odd and >= 3" });
    }
    let m = grid_size as i64;
    let matrix = ComplexMatrix::from_fn(grid_size, grid_size, |j, l| {
        if j == l {
            Complex64::new(0.0, 0.0)
        } else {
            let diff = j as i64 - l as i64;
            let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let angle = std::f64::consts::PI * (diff as f64) / (m as f64);
            Complex64::new(sign / (2.0 * angle.sin()), 0.0)
        }
    });
    let half = (grid_size - 1) / 2;
    let spectrum = (-(half as i64)..=half as i64)
        .map(|k| SpectrumPoint { lambda: k as f64, blocks: vec![1] })
        .collect();
    Ok(OperatorModel {
        spectrum,
        kappa: 1.0,
        seed: 0,
        matrix,
        notes: "periodic spectral differentiation matrix".to_string(),
    })
}

/// random skew-Hermitian model: A = i·(G+Gᴴ)/2 with Gaussian G. the
/// spectrum list is filled from the computed eigenvalues (simple blocks —
/// normal matrices are semisimple).
pub fn random_skew_hermitian(dim: usize, seed: u64) -> Result<OperatorModel, ModelError> {
    if dim == 0 {
        return Err(ModelError::InvalidParameter { what: "dimension must be positive" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(dim, &mut rng);
    let herm = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
    let matrix = herm.scale(Complex64::new(0.0, 1.0));
    let mut lambdas: Vec<f64> = eigenvalues(&matrix)?.iter().map(|z| z.im).collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let spectrum = lambdas
        .iter()
        .map(|&lambda| SpectrumPoint { lambda, blocks: vec![1] })
        .collect();
    Ok(OperatorModel {
        spectrum,
        kappa: 1.0,
        seed,
        matrix,
        notes: "random skew-Hermitian".to_string(),
    })
}

/// seeded complex gaussian direction of unit euclidean norm, the standard
/// probe vector for decomposition and synthesis experiments.
pub fn seeded_unit_vector(dim: usize, seed: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coordinates = Vec::with_capacity(dim);
    for _ in 0..dim {
        let re = standard_gaussian(&mut rng);
        let im = standard_gaussian(&mut rng);
        coordinates.push(Complex64::new(re, im));
    }
    let norm = coordinates.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ComplexVector::new(coordinates.into_iter().map(|z| z / norm).collect())
        .expect("a gaussian unit vector is finite and nonempty")
}

/// x = A^{−p}·y by p successive linear solves with a single factorization.
pub fn smooth_vector(model: &OperatorModel, power: usize, y: &ComplexVector) -> Result<ComplexVector, ModelError> {
    if y.len() != model.dim() {
        return Err(ModelError::Numerics(NumericsError::DimensionMismatch {
            op: "smooth_vector",
            lhs_rows: model.dim(),
            lhs_cols: model.dim(),
            rhs_rows: y.len(),
            rhs_cols: 1,
        }));
    }
    if power == 0 {
        return Ok(y.clone());
    }
    if model.has_zero_eigenvalue() {
        return Err(ModelError::ZeroEigenvalue);
    }
    let factorization = LuFactorization::new(&model.matrix)?;
    let mut x = y.clone();
    for _ in 0..power {
        x = factorization.solve_vector(&x)?;
    }
    Ok(x)
}

/// worst deviation between each declared iλ_k and the centroid of its
/// algebraic-multiplicity-many nearest computed eigenvalues. centroids are
/// the right fidelity measure: rounding smears a defective eigenvalue of
/// block size b by ε^{1/b} around the true value, but the cluster mean stays
/// at solver accuracy.
pub fn spectrum_fidelity_defect(model: &OperatorModel) -> Result<f64, ModelError> {
    let mut pool = eigenvalues(&model.matrix)?;
    let mut worst: f64 = 0.0;
    // claim clusters for the best-separated labels first so a wide smear
    // cannot steal a neighbor's eigenvalues.
    let mut order: Vec<usize> = (0..model.spectrum.len()).collect();
    order.sort_by(|&a, &b| {
        let sep = |idx: usize| {
            let li = model.spectrum[idx].lambda;
            model
                .spectrum
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, p)| (p.lambda - li).abs())
                .fold(f64::INFINITY, f64::min)
        };
        sep(b).partial_cmp(&sep(a)).expect("finite gaps")
    });
    for idx in order {
        let point = &model.spectrum[idx];
        let label = Complex64::new(0.0, point.lambda);
        let mult = point.algebraic_multiplicity();
        let mut centroid = Complex64::new(0.0, 0.0);
        for _ in 0..mult {
            let (pos, _) = pool
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1 - label)
                        .norm()
                        .partial_cmp(&(b.1 - label).norm())
                        .expect("finite eigenvalues")
                })
                .expect("declared multiplicity exceeds matrix dimension");
            centroid += pool.swap_remove(pos);
        }
        centroid /= mult as f64;
        worst = worst.max((centroid - label).norm());
    }
    Ok(worst)
}

/// relative norm of the minimal polynomial Π_k (A − iλ_k)^{max block}
/// evaluated at A; zero in exact arithmetic for a faithfully built model.
pub fn minimal_polynomial_defect(model: &OperatorModel) -> f64 {
    let dim = model.dim();
    let mut product = ComplexMatrix::identity(dim);
    let mut scale = 1.0;
    let a_norm = crate::numerics::op_norm(&model.matrix);
    for point in &model.spectrum {
        let factor = model
            .matrix
            .sub(&ComplexMatrix::identity(dim).scale(Complex64::new(0.0, point.lambda)));
        for _ in 0..point.max_block() {
            product = product.matmul(&factor);
            scale *= a_norm + point.lambda.abs();
        }
    }
    crate::numerics::op_norm(&product) / scale
}

/// fixture models used across the verification suite: a plain diagonal
/// model, Jordan structures of index 2 and 3, a badly conditioned
/// similarity, the Fourier differentiation matrix, and a mixed-sign
/// spectrum for separation experiments.
pub fn bundled_models() -> Vec<(&'static str, OperatorModel)> {
    vec![
        (
            "diagonal-simple",
            build_model(
                &[(1.0, vec![1]), (2.0, vec![1]), (3.0, vec![1]), (4.0, vec![1])],
                1.0,
                1001,
            )
            .expect("fixture"),
        ),
        (
            "jordan-two",
            build_model(&[(1.0, vec![2]), (-2.0, vec![1])], 10.0, 1002).expect("fixture"),
        ),
        (
            "jordan-three-mixed",
            build_model(&[(1.0, vec![3]), (2.5, vec![1, 1]), (-1.0, vec![2])], 20.0, 1003).expect("fixture"),
        ),
        (
            "nonnormal-100",
            build_model(
                &[(0.5, vec![1]), (1.0, vec![1]), (1.5, vec![1]), (3.0, vec![1]), (-2.0, vec![1])],
                100.0,
                1004,
            )
            .expect("fixture"),
        ),
        ("fourier-7", fourier_derivative_model(7).expect("fixture")),
        (
            "oscillator-six",
            build_model(
                &[
                    (1.0, vec![1]),
                    (3.0, vec![1]),
                    (5.0, vec![1]),
                    (7.0, vec![1]),
                    (9.0, vec![1]),
                    (11.0, vec![1]),
                ],
                2.0,
                1005,
            )
            .expect("fixture"),
        ),
        (
            "mixed-sign-six",
            build_model(
                &[
                    (-3.0, vec![1]),
                    (-2.0, vec![1]),
                    (-1.0, vec![1]),
                    (1.0, vec![1]),
                    (2.0, vec![1]),
                    (4.0, vec![1]),
                ],
                5.0,
                1006,
            )
            .expect("fixture"),
        ),
    ]
}
