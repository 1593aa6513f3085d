//! matrix exponential by Padé(13) with scaling and squaring.
//!
//! the [13/13] diagonal Padé approximant is accurate to machine precision for
//! ||A/2^s|| below ~5.37 (the classical theta_13 threshold), so we always
//! scale to that regime and square back up. overflow is detected rather than
//! propagated: integrated-group norms grow like exp(t Re lambda) and the
//! caller needs a clean error when a time horizon leaves f64 range.

use num_complex::Complex64;

use super::{ComplexMatrix, LuFactorization, NumericsError};

/// ||A||_1 threshold for the degree-13 approximant.
const THETA_13: f64 = 5.371_920_351_148_152;

const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn mat_exp(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }

    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(NumericsError::Overflow);
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new((0.5f64).powi(squarings as i32), 0.0));

    let mut result = pade_13(&scaled)?;
    for _ in 0..squarings {
        result = result.matmul(&result);
        if !result.all_finite() {
            return Err(NumericsError::Overflow);
        }
    }
    Ok(result)
}

fn pade_13(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let re = |x: f64| Complex64::new(x, 0.0);

    // U = A [ A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I ]
    let mut inner = a6.scale(re(B13[13]));
    inner.add_scaled_assign(re(B13[11]), &a4);
    inner.add_scaled_assign(re(B13[9]), &a2);
    let mut u = a6.matmul(&inner);
    u.add_scaled_assign(re(B13[7]), &a6);
    u.add_scaled_assign(re(B13[5]), &a4);
    u.add_scaled_assign(re(B13[3]), &a2);
    u.add_scaled_assign(re(B13[1]), &id);
    let u = a.matmul(&u);

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut inner = a6.scale(re(B13[12]));
    inner.add_scaled_assign(re(B13[10]), &a4);
    inner.add_scaled_assign(re(B13[8]), &a2);
    let mut v = a6.matmul(&inner);
    v.add_scaled_assign(re(B13[6]), &a6);
    v.add_scaled_assign(re(B13[4]), &a4);
    v.add_scaled_assign(re(B13[2]), &a2);
    v.add_scaled_assign(re(B13[0]), &id);

    // (V - U) X = (V + U)
    let p = v.add(&u);
    let q = v.sub(&u);
    let x = LuFactorization::new(&q)?.solve_matrix(&p)?;
    if !x.all_finite() {
        return Err(NumericsError::Overflow);
    }
    Ok(x)
}
