//! LU factorization with partial pivoting.
//!
//! this is the workhorse behind every resolvent evaluation: each quadrature
//! node costs one factorization of (lambda I - A) and one (block) solve. the
//! pivot floor of 1e-300 matches the crate contract: anything smaller is
//! treated as an exactly singular matrix rather than allowed to poison the
//! downstream quadrature with infinities.



use super::{ComplexMatrix, ComplexVector, NumericsError};

const PIVOT_FLOOR: f64 = 1e-300;

/// PA = LU factors of a square matrix, reusable across many right-hand sides.
pub struct LuFactorization {
    /// packed L (unit lower, below diagonal) and U (upper, including diagonal).
    lu: ComplexMatrix,
    /// row permutation: solve uses b[perm[i]].
    perm: Vec<usize>,
}

impl LuFactorization {
    pub fn new(a: &ComplexMatrix) -> Result<Self, NumericsError> {
        if !a.is_square() {
            return Err(NumericsError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let m = lu.data_mut();

        for k in 0..n {
            // partial pivoting: largest magnitude in column k at or below the diagonal.
            let mut best = k;
            let mut best_mag = m[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = m[i * n + k].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag < PIVOT_FLOOR {
                return Err(NumericsError::SingularMatrix { pivot_index: k });
            }
            if best != k {
                perm.swap(k, best);
                for j in 0..n {
                    m.swap(k * n + j, best * n + j);
                }
            }
            let pivot = m[k * n + k];
            for i in (k + 1)..n {
                let factor = m[i * n + k] / pivot;
                m[i * n + k] = factor;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = m[k * n + j];
                    m[i * n + j] -= factor * u;
                }
            }
        }

        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// solve A X = B for a block of right-hand sides.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(NumericsError::DimensionMismatch {
                op: "lu_solve",
                lhs_rows: n,
                lhs_cols: n,
                rhs_rows: b.rows(),
                rhs_cols: b.cols(),
            });
        }
        let nrhs = b.cols();
        let mut x = ComplexMatrix::zeros(n, nrhs);
        // apply the row permutation while loading the right-hand side.
        for i in 0..n {
            for j in 0..nrhs {
                x.set(i, j, b.get(self.perm[i], j));
            }
        }
        let lu = self.lu.data();
        let xd = x.data_mut();
        // forward substitution with unit lower factor.
        for i in 1..n {
            for k in 0..i {
                let l = lu[i * n + k];
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for j in 0..nrhs {
                    let prev = xd[k * nrhs + j];
                    xd[i * nrhs + j] -= l * prev;
                }
            }
        }
        // back substitution.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = lu[i * n + k];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                for j in 0..nrhs {
                    let prev = xd[k * nrhs + j];
                    xd[i * nrhs + j] -= u * prev;
                }
            }
            let d = lu[i * n + i];
            for j in 0..nrhs {
                xd[i * nrhs + j] /= d;
            }
        }
        if !x.all_finite() {
            return Err(NumericsError::Overflow);
        }
        Ok(x)
    }

    pub fn solve_vector(&self, b: &ComplexVector) -> Result<ComplexVector, NumericsError> {
        Ok(self.solve_matrix(&b.to_column_matrix())?.into_vector())
    }

    /// inverse by solving against the identity; fine at desk scale.
    pub fn inverse(&self) -> Result<ComplexMatrix, NumericsError> {
        self.solve_matrix(&ComplexMatrix::identity(self.dim()))
    }

    /// cheap order-of-magnitude condition estimate from the spread of the U
    /// diagonal. it can only underestimate the true condition number, but
    /// catches the "this resolvent node is garbage" cases the reports flag.
    pub fn condition_proxy(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut max = 0.0f64;
        let mut min = f64::INFINITY;
        for i in 0..n {
            let d = self.lu.get(i, i).norm();
            max = max.max(d);
            min = min.min(d);
        }
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// one-shot convenience: factor A and solve A X = B.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    LuFactorization::new(a)?.solve_matrix(b)
}
