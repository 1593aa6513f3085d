//! row-major dense storage for complex matrices and vectors, plus the shared
//! JSON wire format: `{"rows": r, "cols": c, "data": [[re, im], ...]}` with
//! `data` in row-major order. vectors are serialized as matrices with one
//! column.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NumericsError;

/// dense complex matrix. entries are checked to be finite at construction,
/// so a value of this type never carries NaN or infinity.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// build from row-major data; fails on shape/finiteness violations.
    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, NumericsError> {
        assert_eq!(
            data.len(),
            rows * cols,
            "row-major data length {} does not match {}x{}",
            data.len(),
            rows,
            cols
        );
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(NumericsError::NonFinite {
                    row: idx / cols.max(1),
                    col: idx % cols.max(1),
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// build from a closure over (row, col); the closure must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_data(rows, cols, data).expect("from_fn closure produced a non-finite entry")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// store an entry. finite values only; this is a programming contract,
    /// not a recoverable condition, hence the assert.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(v.re.is_finite() && v.im.is_finite(), "set({i}, {j}) with non-finite value");
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// true if every entry is finite; used after algorithms that can overflow.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, "sub", |a, b| a - b)
    }

    fn zip(&self, rhs: &Self, op: &'static str, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "{op}: shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// self += c * rhs, the accumulation step of every quadrature loop.
    pub fn add_scaled_assign(&mut self, c: Complex64, rhs: &Self) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "add_scaled_assign shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = k * rhs.cols;
                let out_row = i * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[out_row + j] += a * rhs.data[row + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, x.len(), "matvec: {}x{} times len {}", self.rows, self.cols, x.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = i * self.cols;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[row + j] * x.as_slice()[j];
            }
            out[i] = acc;
        }
        ComplexVector::from_raw(out)
    }

    /// conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a rectangular matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// integer matrix power by repeated multiplication; exponents here are
    /// never larger than dimension + 1 (nilpotency checks).
    pub fn pow(&self, e: usize) -> Self {
        assert!(self.is_square(), "pow of a rectangular matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = out.matmul(self);
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max column sum; diagnostic and exponential-scaling use only.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// max row sum; diagnostic use only.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// paste `block` with its (0,0) entry at (i, j).
    pub fn set_block(&mut self, i: usize, j: usize, block: &Self) {
        assert!(i + block.rows <= self.rows && j + block.cols <= self.cols, "set_block out of range");
        for bi in 0..block.rows {
            for bj in 0..block.cols {
                self.data[(i + bi) * self.cols + (j + bj)] = block.data[bi * block.cols + bj];
            }
        }
    }

    /// copy of the sub-matrix with corners (i, j) and (i+rows-1, j+cols-1).
    pub fn block(&self, i: usize, j: usize, rows: usize, cols: usize) -> Self {
        assert!(i + rows <= self.rows && j + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |bi, bj| self.get(i + bi, j + bj))
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_raw((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// interpret a one-column matrix as a vector.
    pub fn into_vector(self) -> ComplexVector {
        assert_eq!(self.cols, 1, "into_vector on a {}x{} matrix", self.rows, self.cols);
        ComplexVector::from_raw(self.data)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:>12.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// shared wire format, kept as a plain mirror struct so serde derives do the
/// field bookkeeping and we only validate semantics.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.data.len() != repr.rows * repr.cols {
            return Err(D::Error::custom(format!(
                "matrix data length {} does not match {}x{}",
                repr.data.len(),
                repr.rows,
                repr.cols
            )));
        }
        ComplexMatrix::from_data(
            repr.rows,
            repr.cols,
            repr.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
        .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// dense complex vector with the same finiteness contract as the matrix type.
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self, NumericsError> {
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(NumericsError::NonFinite { row: idx, col: 0 });
            }
        }
        Ok(Self { data })
    }

    pub(crate) fn from_raw(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// k-th standard basis vector of dimension n.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index {k} out of range {n}");
        let mut v = Self::zeros(n);
        v.data[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: Complex64) {
        debug_assert!(v.re.is_finite() && v.im.is_finite());
        self.data[i] = v;
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// hermitian inner product, conjugating self.
    pub fn dot(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.len(), rhs.len(), "dot length mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len(), "add length mismatch");
        Self::from_raw(self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len(), "sub length mismatch");
        Self::from_raw(self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.data.iter().map(|&z| z * c).collect())
    }

    pub fn add_scaled_assign(&mut self, c: Complex64, rhs: &Self) {
        assert_eq!(self.len(), rhs.len(), "add_scaled_assign length mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    /// n x 1 matrix with the same entries.
    pub fn to_column_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_data(self.len(), 1, self.data.clone()).expect("vector entries are finite")
    }
}

impl std::fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ComplexVector{:?}", self.data)
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_column_matrix().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        if m.cols() != 1 {
            return Err(D::Error::custom(format!("vector JSON must have cols = 1, got {}", m.cols())));
        }
        Ok(m.into_vector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_finite_entries() {
        let bad = ComplexMatrix::from_data(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]);
        assert_eq!(bad.unwrap_err(), NumericsError::NonFinite { row: 0, col: 1 });
        let bad = ComplexVector::new(vec![c(f64::INFINITY, 0.0)]);
        assert!(matches!(bad, Err(NumericsError::NonFinite { .. })));
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = ComplexMatrix::from_data(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = ComplexMatrix::from_data(2, 2, vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]).unwrap();
        let p = a.matmul(&b);
        // row 0: [i + i, 1 + (-i)(i)... ] worked out by hand:
        // (1)(i) + (i)(1) = 2i ; (1)(1) + (i)(-i) = 2
        assert_eq!(p.get(0, 0), c(0.0, 2.0));
        assert_eq!(p.get(0, 1), c(2.0, 0.0));
        assert_eq!(p.get(1, 0), c(0.0, 2.0));
        assert_eq!(p.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_data(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let at = a.adjoint();
        assert_eq!(at.rows(), 2);
        assert_eq!(at.get(0, 0), c(1.0, -2.0));
        assert_eq!(at.get(1, 0), c(3.0, 4.0));
    }

    #[test]
    fn json_round_trip_preserves_layout() {
        let a = ComplexMatrix::from_data(2, 2, vec![c(1.0, 0.0), c(0.5, -0.25), c(0.0, 3.0), c(-1.0, 0.0)]).unwrap();
        let s = a.to_json_string();
        // row-major [re, im] pairs is the on-disk contract other tools parse.
        assert!(s.starts_with(r#"{"rows":2,"cols":2,"data":[[1.0,0.0],[0.5,-0.25]"#), "layout drifted: {s}");
        let back = ComplexMatrix::from_json_str(&s).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn json_rejects_bad_lengths_and_nan() {
        assert!(ComplexMatrix::from_json_str(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(ComplexMatrix::from_json_str(r#"{"rows":1,"cols":1,"data":[[null,0]]}"#).is_err());
    }

    #[test]
    fn vector_json_is_a_single_column_matrix() {
        let v = ComplexVector::new(vec![c(1.0, 1.0), c(0.0, -2.0)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":1,"data":[[1.0,1.0],[0.0,-2.0]]}"#);
        let w: ComplexVector = serde_json::from_str(&s).unwrap();
        assert_eq!(v, w);
    }
}
