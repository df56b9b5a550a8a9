//! Small dense linear algebra for the matrix sizes used here (n <= ~10).
//!
//! Matrices are row-major `Vec<f64>` with an explicit dimension.

/// LU factorization with partial pivoting, in place.
///
/// Returns the permutation sign, or `None` when a pivot is exactly zero.
fn lu_in_place(a: &mut [f64], n: usize, perm: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            perm.swap(col, pivot);
            sign = -sign;
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            a[row * n + col] = f;
            if f != 0.0 {
                for k in col + 1..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    Some(sign)
}

/// Determinant of an `n x n` matrix.
pub(crate) fn det(a: &[f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return 1.0;
    }
    let mut m = a.to_vec();
    let mut perm = vec![0; n];
    match lu_in_place(&mut m, n, &mut perm) {
        None => 0.0,
        Some(sign) => (0..n).fold(sign, |acc, i| acc * m[i * n + i]),
    }
}

/// Solves `a x = b` with partial pivoting. `None` if `a` is singular.
pub(crate) fn solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut perm = vec![0; n];
    lu_in_place(&mut m, n, &mut perm)?;
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            x[i] -= m[i * n + k] * x[k];
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= m[i * n + k] * x[k];
        }
        x[i] /= m[i * n + i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt.
///
/// Returns `(q, r)` where `q[j]` is the j-th basis vector and `r` is the
/// `k x k` upper triangular factor (row-major) with `vectors[j] = sum_i r[i][j] q[i]`.
/// A zero column leaves a zero basis vector and a zero diagonal entry.
pub(crate) fn gram_schmidt(vectors: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = vectors.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![0.0; k * k];
    for (j, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (i, qi) in q.iter().enumerate() {
            let proj = dot(qi, &w);
            r[i * k + j] = proj;
            for (wc, qc) in w.iter_mut().zip(qi) {
                *wc -= proj * qc;
            }
        }
        let norm = dot(&w, &w).sqrt();
        r[j * k + j] = norm;
        if norm > 0.0 {
            for wc in &mut w {
                *wc /= norm;
            }
        } else {
            w.iter_mut().for_each(|c| *c = 0.0);
        }
        q.push(w);
    }
    (q, r)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_permutation_and_diagonal() {
        assert_eq!(det(&[0.0, 1.0, 1.0, 0.0], 2), -1.0);
        assert_eq!(det(&[2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 4.0], 3), 24.0);
        assert_eq!(det(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }

    #[test]
    fn solve_small_system() {
        let x = solve(&[2.0, 1.0, 1.0, 3.0], &[3.0, 5.0], 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0], 2).is_none());
    }

    #[test]
    fn gram_schmidt_reconstructs_columns() {
        let vs = vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]];
        let (q, r) = gram_schmidt(&vs);
        for (j, v) in vs.iter().enumerate() {
            for c in 0..3 {
                let rec: f64 = (0..2).map(|i| r[i * 2 + j] * q[i][c]).sum();
                assert!((rec - v[c]).abs() < 1e-14);
            }
        }
        assert!(dot(&q[0], &q[1]).abs() < 1e-15);
    }
}
