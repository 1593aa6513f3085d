//! eigenvalues of a general complex matrix: balance, reduce to Hessenberg
//! form, then explicit single-shift QR with Wilkinson shifts.
//!
//! this routine exists for diagnostics and safety rails — "is any eigenvalue
//! near this contour", "does the computed spectrum match the model" — not as
//! a primary deliverable, so it returns eigenvalues only. accuracy for
//! defective eigenvalues is limited by conditioning (a size-b Jordan block
//! smears into a cluster of radius ~eps^(1/b)); callers that validate models
//! against requested spectra compare cluster centroids, which are stable.

use num_complex::Complex64;

use super::{ComplexMatrix, NumericsError};

/// eigenvalues in deterministic order (sorted by real part, then imaginary).
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut eigs = qr_iterate(&mut h)?;
    eigs.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).expect("finite eigenvalues"));
    Ok(eigs)
}

/// Parlett-Reinsch balancing with radix-2 scaling; similarity by a diagonal
/// matrix, so eigenvalues are untouched while row/column norms equalize.
fn balance(a: &mut ComplexMatrix) {
    let n = a.rows();
    let radix: f64 = 2.0;
    let mut done = false;
    let mut guard = 0;
    while !done && guard < 100 {
        done = true;
        guard += 1;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).norm();
                    r += a.get(i, j).norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            let mut c_scaled = c;
            let mut r_scaled = r;
            while c_scaled < r_scaled / radix {
                c_scaled *= radix;
                r_scaled /= radix;
                f *= radix;
            }
            while c_scaled >= r_scaled * radix {
                c_scaled /= radix;
                r_scaled *= radix;
                f /= radix;
            }
            if (c_scaled + r_scaled) < 0.95 * s && f != 1.0 {
                done = false;
                let inv = Complex64::new(1.0 / f, 0.0);
                let fwd = Complex64::new(f, 0.0);
                for j in 0..n {
                    let v = a.get(i, j);
                    a.set(i, j, v * inv);
                }
                for j in 0..n {
                    let v = a.get(j, i);
                    a.set(j, i, v * fwd);
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // build the reflector that zeroes column k below the subdiagonal.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a.get(i, k)).collect();
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

        // left: rows k+1..n of columns k..n
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * a.get(i, j);
            }
            dot *= beta;
            for (idx, i) in (k + 1..n).enumerate() {
                let cur = a.get(i, j);
                a.set(i, j, cur - v[idx] * dot);
            }
        }
        // right: columns k+1..n of all rows
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += a.get(i, j) * v[idx];
            }
            dot *= beta;
            for (idx, j) in (k + 1..n).enumerate() {
                let cur = a.get(i, j);
                a.set(i, j, cur - dot * v[idx].conj());
            }
        }
        // enforce exact zeros below the subdiagonal in this column.
        for i in k + 2..n {
            a.set(i, k, Complex64::new(0.0, 0.0));
        }
    }
}

fn qr_iterate(h: &mut ComplexMatrix) -> Result<Vec<Complex64>, NumericsError> {
    let n = h.rows();
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut stalls = 0usize;
    let mut total: usize = 0;
    let budget = 80 * n + 200;

    'outer: loop {
        // deflate negligible subdiagonals.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.get(lo, lo - 1).norm();
            let local = h.get(lo, lo).norm() + h.get(lo - 1, lo - 1).norm();
            if sub <= f64::EPSILON * local || sub < 1e-300 {
                h.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            // 1x1 block converged.
            eigs.push(h.get(hi, hi));
            if hi == 0 {
                break 'outer;
            }
            hi -= 1;
            stalls = 0;
            continue;
        }
        if lo + 1 == hi {
            // 2x2 block: closed form.
            let (l1, l2) = two_by_two_eigs(h.get(lo, lo), h.get(lo, hi), h.get(hi, lo), h.get(hi, hi));
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break 'outer;
            }
            hi = lo - 1;
            stalls = 0;
            continue;
        }

        total += 1;
        stalls += 1;
        if total > budget {
            return Err(NumericsError::NoConvergence {
                what: "QR eigenvalue iteration",
            });
        }

        // Wilkinson shift from the trailing 2x2, with an occasional
        // exceptional shift to break symmetric stalls.
        let shift = if stalls % 12 == 0 {
            let kick = h.get(hi, hi - 1).norm() + if hi >= 2 { h.get(hi - 1, hi - 2).norm() } else { 0.0 };
            h.get(hi, hi) + Complex64::new(1.5 * kick, 0.5 * kick)
        } else {
            let (l1, l2) = two_by_two_eigs(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        qr_step(h, lo, hi, shift);
    }

    Ok(eigs)
}

/// one explicit shifted QR sweep on the active window [lo, hi].
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.cols();
    for i in lo..=hi {
        let d = h.get(i, i);
        h.set(i, i, d - shift);
    }

    // QR by Givens rotations on the subdiagonal, saved for the RQ pass.
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let f = h.get(k, k);
        let g = h.get(k + 1, k);
        let (c, s) = givens(f, g);
        rotations.push((c, s));
        for j in k..n {
            let top = h.get(k, j);
            let bot = h.get(k + 1, j);
            h.set(k, j, top * c + bot * s);
            h.set(k + 1, j, -s.conj() * top + bot * c);
        }
    }
    // RQ: apply adjoint rotations on the right.
    for (k, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + k;
        let top_row = hi.min(k + 2);
        for i in 0..=top_row {
            let left = h.get(i, k);
            let right = h.get(i, k + 1);
            h.set(i, k, left * c + right * s.conj());
            h.set(i, k + 1, -left * s + right * c);
        }
    }

    for i in lo..=hi {
        let d = h.get(i, i);
        h.set(i, i, d + shift);
    }
}

/// unitary rotation [[c, s], [-conj(s), c]] with real c zeroing g against f.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fg = (f.norm_sqr() + g.norm_sqr()).sqrt();
    if fg == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let c = f.norm() / fg;
    let s = (f / f.norm()) * g.conj() / fg;
    (c, s)
}

fn two_by_two_eigs(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    (mean + disc, mean - disc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_spectrum_close(actual: &[Complex64], expected: &[Complex64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        let mut remaining: Vec<Complex64> = actual.to_vec();
        for &e in expected {
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, &z)| (i, (z - e).norm()))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .expect("nonempty");
            assert!(dist < tol, "no eigenvalue near {e} (closest at distance {dist})");
            remaining.swap_remove(idx);
        }
    }

    #[test]
    fn diagonal_spectrum_is_recovered() {
        let d = [c64(1.0, 2.0), c64(-3.0, 0.5), c64(0.0, -1.0), c64(4.0, 4.0)];
        let eigs = eigenvalues(&ComplexMatrix::diagonal(&d)).unwrap();
        assert_spectrum_close(&eigs, &d, 1e-12);
    }

    #[test]
    fn similarity_preserves_spectrum() {
        // T J T^{-1} with a known diagonal J and unit lower-triangular T.
        let d = [c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, 3.0)];
        let j = ComplexMatrix::diagonal(&d);
        let mut t = ComplexMatrix::identity(3);
        t.set(1, 0, c64(2.0, -1.0));
        t.set(2, 0, c64(-0.5, 0.25));
        t.set(2, 1, c64(1.0, 1.0));
        let mut t_inv = ComplexMatrix::identity(3);
        // inverse of unit lower triangular by forward substitution, hand-checked.
        t_inv.set(1, 0, -t.get(1, 0));
        t_inv.set(2, 1, -t.get(2, 1));
        t_inv.set(2, 0, t.get(2, 1) * t.get(1, 0) - t.get(2, 0));
        let a = t.matmul(&j).matmul(&t_inv);
        let eigs = eigenvalues(&a).unwrap();
        assert_spectrum_close(&eigs, &d, 1e-10);
    }

    #[test]
    fn rotation_matrix_has_conjugate_pair() {
        // [[0, -1], [1, 0]] has eigenvalues +-i.
        let a = ComplexMatrix::from_data(
            2,
            2,
            vec![c64(0.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
        )
        .unwrap();
        let eigs = eigenvalues(&a).unwrap();
        assert_spectrum_close(&eigs, &[c64(0.0, 1.0), c64(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn jordan_block_centroid_is_stable() {
        // J_3(2i): individual eigenvalues smear ~eps^(1/3) but the mean is solid.
        let lam = c64(0.0, 2.0);
        let mut a = ComplexMatrix::diagonal(&[lam, lam, lam]);
        a.set(0, 1, c64(1.0, 0.0));
        a.set(1, 2, c64(1.0, 0.0));
        let eigs = eigenvalues(&a).unwrap();
        let centroid = eigs.iter().sum::<Complex64>() / 3.0;
        assert!((centroid - lam).norm() < 1e-10);
        for e in &eigs {
            assert!((e - lam).norm() < 1e-4, "cluster radius blew past eps^(1/3) scale: {e}");
        }
    }

    #[test]
    fn larger_dense_matrix_spectrum_via_trace_checks() {
        // no closed form needed: sum and sum-of-squares of eigenvalues must
        // match tr(A) and tr(A^2).
        let a = ComplexMatrix::from_fn(9, 9, |i, j| {
            c64(
                ((i * 31 + j * 17 + 5) % 23) as f64 / 23.0 - 0.5,
                ((i * 13 + j * 29 + 11) % 19) as f64 / 19.0 - 0.5,
            )
        });
        let eigs = eigenvalues(&a).unwrap();
        let s1: Complex64 = eigs.iter().sum();
        let s2: Complex64 = eigs.iter().map(|z| z * z).sum();
        assert!((s1 - a.trace()).norm() < 1e-9);
        assert!((s2 - a.matmul(&a).trace()).norm() < 1e-9);
    }
}
