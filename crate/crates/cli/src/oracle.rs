//! Reference singular values that do not go through nalgebra's SVD.
//!
//! One-sided Jacobi rotations orthogonalize the columns of `A`, which
//! diagonalizes the Gram matrix `AᴴA` without forming it. The result is
//! cross-checked against `trace(AᴴA)` and `det(AᴴA)`.

use num_complex::Complex;

type C = Complex<f64>;

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sq(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Singular values of a row-major `rows x cols` matrix, nonincreasing.
pub fn jacobi_singular_values(rows: usize, cols: usize, data: &[C]) -> Vec<f64> {
    assert_eq!(data.len(), rows * cols);
    let mut columns: Vec<Vec<C>> = (0..cols).map(|j| (0..rows).map(|i| data[i * cols + j]).collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = norm_sq(&columns[p]);
                let beta = norm_sq(&columns[q]);
                let gamma = dot(&columns[p], &columns[q]);
                let g = gamma.norm();
                if g <= 1e-17 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = (xp * s + yq * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = columns.iter().map(|col| norm_sq(col).sqrt()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.truncate(rows.min(cols));
    sigma
}

/// Determinant of a Hermitian positive semidefinite matrix by Gaussian
/// elimination with partial pivoting.
fn det(n: usize, mut m: Vec<C>) -> f64 {
    let mut d = C::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n).max_by(|&a, &b| m[a * n + k].norm().total_cmp(&m[b * n + k].norm())).unwrap_or(k);
        if m[piv * n + k].norm() == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            d = -d;
        }
        let pk = m[k * n + k];
        d *= pk;
        for i in k + 1..n {
            let f = m[i * n + k] / pk;
            for j in k..n {
                let v = m[k * n + j];
                m[i * n + j] -= f * v;
            }
        }
    }
    d.re
}

/// Checks a singular-value list against the trace and determinant of the
/// Gram matrix. Returns the two relative discrepancies.
pub fn gram_cross_check(rows: usize, cols: usize, data: &[C], sigma: &[f64]) -> (f64, f64) {
    let mut gram = vec![C::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            gram[i * cols + j] = (0..rows).map(|r| data[r * cols + i].conj() * data[r * cols + j]).sum();
        }
    }
    let trace: f64 = (0..cols).map(|i| gram[i * cols + i].re).sum();
    let s2: f64 = sigma.iter().map(|s| s * s).sum();
    let trace_gap = if trace == 0.0 { s2 } else { (s2 - trace).abs() / trace };
    let s1 = sigma.first().copied().unwrap_or(0.0);
    let det_gap = if rows < cols || s1 == 0.0 {
        0.0
    } else {
        let prod: f64 = sigma.iter().map(|s| (s / s1).powi(2)).product();
        let d = det(cols, gram) / s1.powi(2 * cols as i32);
        (prod - d).abs()
    };
    (trace_gap, det_gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_nilpotent() {
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        let d = [C::new(3.0, 0.0), z, z, z, one, z, z, z, C::new(2.0, 0.0)];
        assert_eq!(jacobi_singular_values(3, 3, &d), vec![3.0, 2.0, 1.0]);
        let s = jacobi_singular_values(2, 2, &[z, one, z, z]);
        assert_eq!(s, vec![1.0, 0.0]);
    }

    #[test]
    fn rotation_invariance() {
        // [[1, i], [1, -i]] / sqrt(2) is unitary
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = [C::new(h, 0.0), C::new(0.0, h), C::new(h, 0.0), C::new(0.0, -h)];
        let s = jacobi_singular_values(2, 2, &u);
        assert!((s[0] - 1.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
        let (t, dgap) = gram_cross_check(2, 2, &u, &s);
        assert!(t < 1e-15 && dgap < 1e-15);
    }
}
