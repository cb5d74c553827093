//! Truncated one-variable operators in the graded basis `{1, z, z^2, ...}`.

mod identity;
mod projection;

pub use identity::{
    hankel_toeplitz_probe, verify_thma_chain, verify_toeplitz_identity, ChainOptions, ChainReport,
    IdentityReport,
};
pub use projection::{
    compression_gap, idempotency_defect, model_projection, model_space_basis, numerator_polynomial, self_adjointness_defect,
    submodule_projection, ModelSpaceBasis,
};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{HplError, Result};
use crate::fourier::FourierSymbol;
use crate::scalar::{cabs, cone, czero, from_usize, max_of, to_f64, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Dense complex matrix with an entrywise error envelope.
///
/// Rows index the codomain and columns the domain; both use the graded basis.
/// The envelope is 0 exactly when every ingredient was an exact polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator<T: Real> {
    matrix: CMatrix<T>,
    error_envelope: T,
    tag: String,
}

impl<T: Real> TruncatedOperator<T> {
    pub fn new(matrix: CMatrix<T>, error_envelope: T, tag: impl Into<String>) -> Self {
        Self { matrix, error_envelope, tag: tag.into() }
    }

    pub fn exact(matrix: CMatrix<T>, tag: impl Into<String>) -> Self {
        Self::new(matrix, T::zero(), tag)
    }

    pub fn identity(n: usize) -> Self {
        Self::exact(CMatrix::identity(n, n), format!("I[{n}]"))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::exact(CMatrix::zeros(rows, cols), format!("0[{rows}x{cols}]"))
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn domain_dim(&self) -> usize {
        self.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.rows()
    }

    pub fn error_envelope(&self) -> T {
        self.error_envelope
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[(i, j)]
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.matrix)
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// Top-left `rows x cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows > self.rows() || cols > self.cols() {
            return Err(HplError::Dimension(format!(
                "block {rows}x{cols} exceeds {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        Ok(Self::new(
            self.matrix.view((0, 0), (rows, cols)).into_owned(),
            self.error_envelope,
            format!("{}[..{rows},..{cols}]", self.tag),
        ))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(&self.matrix * s, self.error_envelope * cabs(s), self.tag.clone())
    }
}

pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| max_of(acc, cabs(v)))
}

fn same_shape<T: Real>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>, what: &str) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(HplError::Dimension(format!(
            "{what}: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Matrix product `A B`. The envelope grows as
/// `k (|A| e_B + e_A |B| + e_A e_B)` with `k` the inner dimension.
pub fn compose<T: Real>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>) -> Result<TruncatedOperator<T>> {
    if a.cols() != b.rows() {
        return Err(HplError::Dimension(format!(
            "compose: {}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (ea, eb) = (a.error_envelope, b.error_envelope);
    let envelope = if ea == T::zero() && eb == T::zero() {
        T::zero()
    } else {
        from_usize::<T>(a.cols()) * (a.max_abs() * eb + ea * b.max_abs() + ea * eb)
    };
    Ok(TruncatedOperator::new(&a.matrix * &b.matrix, envelope, format!("({})({})", a.tag, b.tag)))
}

pub fn adjoint<T: Real>(a: &TruncatedOperator<T>) -> TruncatedOperator<T> {
    TruncatedOperator::new(a.matrix.adjoint(), a.error_envelope, format!("({})^H", a.tag))
}

pub fn add<T: Real>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>) -> Result<TruncatedOperator<T>> {
    same_shape(a, b, "add")?;
    Ok(TruncatedOperator::new(
        &a.matrix + &b.matrix,
        a.error_envelope + b.error_envelope,
        format!("{} + {}", a.tag, b.tag),
    ))
}

pub fn sub<T: Real>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>) -> Result<TruncatedOperator<T>> {
    same_shape(a, b, "sub")?;
    Ok(TruncatedOperator::new(
        &a.matrix - &b.matrix,
        a.error_envelope + b.error_envelope,
        format!("{} - {}", a.tag, b.tag),
    ))
}

/// `A B - B A`.
pub fn commutator<T: Real>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>) -> Result<TruncatedOperator<T>> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() {
        return Err(HplError::Dimension(format!(
            "commutator needs equal square operators, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let ab = compose(a, b)?;
    let ba = compose(b, a)?;
    Ok(sub(&ab, &ba)?.with_tag(format!("[{}, {}]", a.tag, b.tag)))
}

/// `rows x cols` section of `T_f`: entry `(j, k) = f(j - k)`.
pub fn toeplitz_rect<T: Real>(f: &FourierSymbol<T>, rows: usize, cols: usize) -> TruncatedOperator<T> {
    let m = CMatrix::from_fn(rows, cols, |j, k| f.coeff(j as i64 - k as i64));
    TruncatedOperator::new(m, f.tail_bound(), format!("T[{rows}x{cols}]"))
}

pub fn toeplitz<T: Real>(f: &FourierSymbol<T>, n: usize) -> TruncatedOperator<T> {
    toeplitz_rect(f, n, n)
}

/// `rows x cols` section of `H_f`: entry `(j, k) = f(-(j + k + 1))`, the
/// matrix of `P U (f h)` with `U h(z) = conj(z) h(conj z)` on the circle.
pub fn hankel_rect<T: Real>(f: &FourierSymbol<T>, rows: usize, cols: usize) -> TruncatedOperator<T> {
    let m = CMatrix::from_fn(rows, cols, |j, k| f.coeff(-((j + k + 1) as i64)));
    TruncatedOperator::new(m, f.tail_bound(), format!("H[{rows}x{cols}]"))
}

pub fn hankel<T: Real>(f: &FourierSymbol<T>, n: usize) -> TruncatedOperator<T> {
    hankel_rect(f, n, n)
}

/// Maximum modulus of `a - b` over the top-left `core x core` block.
pub fn core_residual<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, core: usize) -> T {
    let mut worst = T::zero();
    for j in 0..core {
        for k in 0..core {
            worst = max_of(worst, cabs(a[(j, k)] - b[(j, k)]));
        }
    }
    worst
}

/// Rows of `row,col,re,im` for every entry that is not exactly zero.
pub fn matrix_to_csv<T: Real>(m: &CMatrix<T>) -> String {
    let mut out = String::from("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v != czero() {
                out.push_str(&format!("{},{},{:.16e},{:.16e}\n", i, j, to_f64(v.re), to_f64(v.im)));
            }
        }
    }
    out
}

/// Little-endian binary layout: `u64` rows, `u64` cols, then row-major
/// interleaved `(re, im)` as `f64`.
pub fn matrix_to_bytes<T: Real>(m: &CMatrix<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * m.len());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            out.extend_from_slice(&to_f64(v.re).to_le_bytes());
            out.extend_from_slice(&to_f64(v.im).to_le_bytes());
        }
    }
    out
}

/// Inverse of [`matrix_to_bytes`] for `f64`.
pub fn matrix_from_bytes(bytes: &[u8]) -> Result<CMatrix<f64>> {
    let word = |k: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * k..8 * k + 8)
            .and_then(|s| s.try_into().ok())
            .ok_or_else(|| HplError::Dimension("truncated matrix byte stream".into()))
    };
    let rows = u64::from_le_bytes(word(0)?) as usize;
    let cols = u64::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 16 + 16 * rows * cols {
        return Err(HplError::Dimension(format!(
            "expected {} bytes for {rows}x{cols}, found {}",
            16 + 16 * rows * cols,
            bytes.len()
        )));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let base = 2 + 2 * (i * cols + j);
            m[(i, j)] = Complex::new(f64::from_le_bytes(word(base)?), f64::from_le_bytes(word(base + 1)?));
        }
    }
    Ok(m)
}

pub(crate) fn identity_matrix<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::from_fn(n, n, |i, j| if i == j { cone() } else { czero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn cc(re: f64, im: f64) -> Complex<f64> {
        c(re, im)
    }

    fn sym(entries: &[(i64, f64)]) -> FourierSymbol<f64> {
        let e: Vec<_> = entries.iter().map(|&(n, v)| (n, cc(v, 0.0))).collect();
        FourierSymbol::from_entries(&e)
    }

    #[test]
    fn toeplitz_examples() {
        let t = toeplitz(&FourierSymbol::<f64>::monomial(1), 3);
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[cc(0.0, 0.0), cc(0.0, 0.0), cc(0.0, 0.0), cc(1.0, 0.0), cc(0.0, 0.0), cc(0.0, 0.0), cc(0.0, 0.0), cc(1.0, 0.0), cc(0.0, 0.0)],
        );
        assert_eq!(t.matrix(), &expect);
        assert_eq!(toeplitz(&sym(&[(0, 1.0)]), 4).into_matrix(), identity_matrix(4));

        let f = sym(&[(-1, 1.0), (2, 1.0)]);
        let t = toeplitz(&f, 4);
        for j in 0..4i64 {
            for k in 0..4i64 {
                let e = if j - k == -1 || j - k == 2 { 1.0 } else { 0.0 };
                assert_eq!(t.entry(j as usize, k as usize), cc(e, 0.0));
            }
        }
        assert_eq!(t.error_envelope(), 0.0);
    }

    #[test]
    fn hankel_examples() {
        let h = hankel(&FourierSymbol::<f64>::monomial(-1), 2);
        assert_eq!(h.entry(0, 0), cc(1.0, 0.0));
        assert_eq!(h.entry(0, 1), cc(0.0, 0.0));
        assert_eq!(h.entry(1, 1), cc(0.0, 0.0));
        assert_eq!(hankel(&sym(&[(0, 2.0), (3, 1.0)]), 5).max_abs(), 0.0);
        let h = hankel(&FourierSymbol::<f64>::monomial(-3), 4);
        for j in 0..4 {
            for k in 0..4 {
                let e = if j + k == 2 { 1.0 } else { 0.0 };
                assert_eq!(h.entry(j, k), cc(e, 0.0));
            }
        }
    }

    #[test]
    fn commutator_of_shift_and_backward_shift() {
        let n = 5;
        let tz = toeplitz(&FourierSymbol::<f64>::monomial(1), n);
        let tzb = toeplitz(&FourierSymbol::<f64>::monomial(-1), n);
        let k = commutator(&tzb, &tz).unwrap();
        for i in 0..n {
            for j in 0..n {
                let e = match (i, j) {
                    (0, 0) => 1.0,
                    (4, 4) => -1.0,
                    _ => 0.0,
                };
                assert_eq!(k.entry(i, j), cc(e, 0.0), "({i},{j})");
            }
        }
        assert_eq!(commutator(&tz, &tz).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dimension_errors() {
        let a = TruncatedOperator::<f64>::zeros(2, 3);
        let b = TruncatedOperator::<f64>::zeros(2, 3);
        assert!(matches!(compose(&a, &b), Err(HplError::Dimension(_))));
        assert!(commutator(&a, &b).is_err());
        assert!(add(&a, &TruncatedOperator::zeros(3, 2)).is_err());
        assert!(a.block(3, 1).is_err());
    }

    #[test]
    fn envelope_propagation() {
        let mut f = sym(&[(0, 1.0)]);
        f = FourierSymbol::from_dense(f.lo(), vec![cc(1.0, 0.0)], 1e-6, crate::fourier::Provenance::TruncatedAnalytic);
        let a = toeplitz(&f, 3);
        assert_eq!(a.error_envelope(), 1e-6);
        let i = TruncatedOperator::<f64>::identity(3);
        let p = compose(&a, &i).unwrap();
        assert!(p.error_envelope() >= 1e-6);
        assert_eq!(compose(&i, &i).unwrap().error_envelope(), 0.0);
    }

    #[test]
    fn binary_layout_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| cc(i as f64 + 0.25, -(j as f64)));
        let bytes = matrix_to_bytes(&m);
        assert_eq!(bytes.len(), 16 + 16 * 6);
        assert_eq!(&bytes[0..8], &2u64.to_le_bytes());
        assert_eq!(matrix_from_bytes(&bytes).unwrap(), m);
        assert!(matrix_from_bytes(&bytes[..20]).is_err());
    }

    #[test]
    fn csv_lists_nonzero_entries() {
        let t = toeplitz(&FourierSymbol::<f64>::monomial(1), 4);
        let csv = matrix_to_csv(t.matrix());
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().nth(1), Some("1,0,1.0000000000000000e0,0.0000000000000000e0"));
    }
}
