//! Householder QR, used where an exactly unitary matrix is needed: random
//! orthogonal factors for similarity transforms and unitary-invariance test
//! harnesses.

use num_complex::Complex64;

use super::ComplexMatrix;

/// unitary Q from the QR factorization of `a` (square), with the phase
/// convention that makes R's diagonal real nonnegative — applied to a matrix
/// of iid complex Gaussians this gives a Haar-distributed unitary.
pub fn qr_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "qr_unitary expects a square matrix");
    let n = a.rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);

    for k in 0..n {
        let mut v: Vec<Complex64> = (k..n).map(|i| r.get(i, k)).collect();
        let norm_x = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { Complex64::new(1.0, 0.0) };
        v[0] += phase * norm_x;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // r <- H r ; q <- q H (accumulating Q = H_0 H_1 ... on the right
        // because each H is hermitian).
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, i) in (k..n).enumerate() {
                dot += v[idx].conj() * r.get(i, j);
            }
            dot *= beta;
            for (idx, i) in (k..n).enumerate() {
                let cur = r.get(i, j);
                r.set(i, j, cur - v[idx] * dot);
            }
        }
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, j) in (k..n).enumerate() {
                dot += q.get(i, j) * v[idx];
            }
            dot *= beta;
            for (idx, j) in (k..n).enumerate() {
                let cur = q.get(i, j);
                q.set(i, j, cur - dot * v[idx].conj());
            }
        }
    }

    // fix phases so the implied R diagonal is real nonnegative.
    for k in 0..n {
        let d = r.get(k, k);
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                let cur = q.get(i, k);
                q.set(i, k, cur * phase);
            }
        }
    }
    q
}
