//! Submodule and model-space projections for finite Blaschke products.
//!
//! On the graded space `P_N = span{1, ..., z^(N-1)}` the projection onto
//! `θH² ∩ P_N` is computed exactly: that subspace is `p·P_(N-d)` where `p` is
//! the numerator polynomial of `θ`, so it is the column span of a rectangular
//! Toeplitz matrix of `p`. The compression of `T_θ T_θ*` to `P_N` differs from
//! it only by terms of size `max|a|^(2N)`; [`compression_gap`] reports that.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::{identity_matrix, max_abs, toeplitz_rect, CMatrix, TruncatedOperator};
use crate::blaschke::BlaschkeProduct;
use crate::error::{HplError, Result};
use crate::fourier::taylor_coeffs;
use crate::scalar::{cis, cone, conj, czero, lit, Real};

/// Coefficients (ascending) of `Π (z - a_k)`, origin zeros included.
pub fn numerator_polynomial<T: Real>(b: &BlaschkeProduct<T>) -> Vec<Complex<T>> {
    let mut p = vec![cone::<T>()];
    for a in b.factor_zeros() {
        let a = a.to_complex();
        let mut next = vec![czero(); p.len() + 1];
        for (k, &v) in p.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= a * v;
        }
        p = next;
    }
    p
}

fn check_dim<T: Real>(b: &BlaschkeProduct<T>, n: usize) -> Result<usize> {
    let d = b.degree();
    if n == 0 {
        return Err(HplError::Truncation("dimension must be positive".into()));
    }
    if n < d {
        return Err(HplError::Truncation(format!("dimension {n} is below the Blaschke degree {d}")));
    }
    Ok(d)
}

fn hermitian_part<T: Real>(m: CMatrix<T>) -> CMatrix<T> {
    let half = lit::<T>(0.5);
    (&m + m.adjoint()).map(|v| v * half)
}

/// Orthogonal projection of `P_N` onto `θH² ∩ P_N`.
pub fn submodule_projection<T: Real>(b: &BlaschkeProduct<T>, n: usize) -> Result<TruncatedOperator<T>> {
    let d = check_dim(b, n)?;
    let tag = format!("P_theta[{n}]");
    if d == 0 {
        return Ok(TruncatedOperator::exact(identity_matrix(n), tag));
    }
    if d == n {
        return Ok(TruncatedOperator::exact(CMatrix::zeros(n, n), tag));
    }
    if b.is_monomial() {
        let m = CMatrix::from_fn(n, n, |i, j| if i == j && i >= d { cone() } else { czero() });
        return Ok(TruncatedOperator::exact(m, tag));
    }
    let p = numerator_polynomial(b);
    let gen = DMatrix::from_fn(n, n - d, |j, k| if j >= k && j - k < p.len() { p[j - k] } else { czero() });
    let q = gen.qr().q();
    let proj = hermitian_part(&q * q.adjoint());
    Ok(TruncatedOperator::exact(proj, tag))
}

/// `I - submodule_projection`, the projection onto the truncated model space.
pub fn model_projection<T: Real>(b: &BlaschkeProduct<T>, n: usize) -> Result<TruncatedOperator<T>> {
    let sub = submodule_projection(b, n)?;
    let m = identity_matrix::<T>(n) - sub.matrix();
    Ok(TruncatedOperator::exact(m, format!("P_Q_theta[{n}]")))
}

/// `max |P² - P|`.
pub fn idempotency_defect<T: Real>(p: &TruncatedOperator<T>) -> T {
    let m = p.matrix();
    max_abs(&(m * m - m))
}

/// `max |P - Pᴴ|`.
pub fn self_adjointness_defect<T: Real>(p: &TruncatedOperator<T>) -> T {
    let m = p.matrix();
    max_abs(&(m - m.adjoint()))
}

/// Distance between [`submodule_projection`] and the `N x N` compression of
/// `T_θ T_θ*` built from `window` Taylor coefficients.
pub fn compression_gap<T: Real>(b: &BlaschkeProduct<T>, n: usize, window: usize) -> Result<T> {
    let exact = submodule_projection(b, n)?;
    let theta = taylor_coeffs(b, window.max(n))?;
    let t = toeplitz_rect(&theta, n, window.max(n));
    let comp = t.matrix() * t.matrix().adjoint();
    Ok(max_abs(&(exact.matrix() - comp)))
}

/// Takenaka–Malmquist–Walsh basis of the model space, truncated to `N`
/// Taylor coefficients.
#[derive(Debug, Clone)]
pub struct ModelSpaceBasis<T: Real> {
    basis_matrix: CMatrix<T>,
    degree: usize,
    orthonormality_defect: T,
}

impl<T: Real> ModelSpaceBasis<T> {
    pub fn basis_matrix(&self) -> &CMatrix<T> {
        &self.basis_matrix
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `max |VᴴV - I|`; nonzero only through truncation and rounding.
    pub fn orthonormality_defect(&self) -> T {
        self.orthonormality_defect
    }

    /// `V Vᴴ`.
    pub fn projection(&self) -> TruncatedOperator<T> {
        let v = &self.basis_matrix;
        TruncatedOperator::new(v * v.adjoint(), self.orthonormality_defect, "TMW projection")
    }
}

/// Column `k` is `sqrt(1-|a_k|²)/(1 - conj(a_k) z) · Π_{j<k} b_{a_j}(z)`.
pub fn model_space_basis<T: Real>(b: &BlaschkeProduct<T>, n: usize) -> Result<ModelSpaceBasis<T>> {
    let d = check_dim(b, n)?;
    let mut basis = CMatrix::zeros(n, d);
    let mut running = vec![czero::<T>(); n];
    running[0] = cone();
    for (col, a) in b.factor_zeros().iter().enumerate() {
        if a.is_origin() {
            for k in 0..n {
                basis[(k, col)] = running[k];
            }
            running.rotate_right(1);
            running[0] = czero();
            continue;
        }
        let abar = conj(a.to_complex());
        let norm = a.one_minus_abs_sq().sqrt();
        let mut prev = czero::<T>();
        for k in 0..n {
            let u = running[k] * norm + abar * prev;
            basis[(k, col)] = u;
            prev = u;
        }
        let r = a.modulus();
        let rot = cis(-a.angle());
        let mut prev_in = czero::<T>();
        let mut prev_out = czero::<T>();
        for slot in running.iter_mut() {
            let t = *slot * r - rot * prev_in;
            let u = t + abar * prev_out;
            prev_in = *slot;
            *slot = u;
            prev_out = u;
        }
    }
    let gram = basis.adjoint() * &basis;
    let defect = max_abs(&(gram - identity_matrix::<T>(d)));
    Ok(ModelSpaceBasis { basis_matrix: basis, degree: d, orthonormality_defect: defect })
}
