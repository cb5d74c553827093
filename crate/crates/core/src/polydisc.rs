//! Box-truncated `H²` of the bidisc and tridisc with variable-separated
//! inner symbols.
//!
//! Multi-indices are ordered lexicographically with the first variable most
//! significant, which is the order produced by `kronecker`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{HplError, Result};
use crate::operators::{
    compose, identity_matrix, max_abs, model_projection, numerator_polynomial, submodule_projection, CMatrix,
    IdentityReport, TruncatedOperator,
};
use crate::scalar::{czero, lit, to_f64, Real};
use crate::spectral::{compactness_verdict, CompactnessVerdict, SpectralThresholds};

/// Tolerance on singular values of the stacked complement used to read off
/// the intersection of two submodules.
const NULL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiBasis {
    dims: Vec<usize>,
}

impl MultiBasis {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(HplError::Dimension(format!("{} variables requested; only 2 or 3 are supported", dims.len())));
        }
        if dims.contains(&0) {
            return Err(HplError::Dimension("per-variable dims must be positive".into()));
        }
        Ok(Self { dims })
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn per_variable_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Position of a multi-index in the lexicographic order.
    pub fn flat_index(&self, alpha: &[usize]) -> Result<usize> {
        if alpha.len() != self.n() || alpha.iter().zip(&self.dims).any(|(a, d)| a >= d) {
            return Err(HplError::Dimension(format!("multi-index {alpha:?} outside box {:?}", self.dims)));
        }
        Ok(alpha.iter().zip(&self.dims).fold(0, |acc, (a, d)| acc * d + a))
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut alpha = vec![0; self.n()];
        for (slot, d) in alpha.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Separability {
    Separable,
    SameVariable,
    NotApplicable,
}

impl fmt::Display for Separability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Separable => "separable",
            Self::SameVariable => "same-variable",
            Self::NotApplicable => "not-applicable",
        })
    }
}

/// Sign of the product term in the defect operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectSign {
    /// `I - P_φ - P_ψ + P_φ P_ψ`.
    #[default]
    Proof,
    /// `I - P_φ - P_ψ - P_φ P_ψ`, as printed in the defect definition.
    Paper,
}

/// Two one-variable inner symbols placed in variables of the polydisc
/// (0-based indices).
#[derive(Debug, Clone)]
pub struct SeparatedSymbolPair<T: Real> {
    pub phi: BlaschkeProduct<T>,
    pub phi_var: usize,
    pub psi: BlaschkeProduct<T>,
    pub psi_var: usize,
}

impl<T: Real> SeparatedSymbolPair<T> {
    pub fn new(phi: BlaschkeProduct<T>, phi_var: usize, psi: BlaschkeProduct<T>, psi_var: usize) -> Self {
        Self { phi, phi_var, psi, psi_var }
    }

    pub fn is_separable(&self) -> bool {
        self.phi_var != self.psi_var
    }
}

/// Classifies a pair by its declared variables; `not-applicable` when a
/// variable lies outside `0..n`.
pub fn separability_check<T: Real>(pair: &SeparatedSymbolPair<T>, n: usize) -> Separability {
    if pair.phi_var >= n || pair.psi_var >= n {
        Separability::NotApplicable
    } else if pair.phi_var == pair.psi_var {
        Separability::SameVariable
    } else {
        Separability::Separable
    }
}

/// `I ⊗ ... ⊗ P1 ⊗ ... ⊗ I` with `P1` in slot `variable`.
pub fn lift_projection<T: Real>(
    p1: &TruncatedOperator<T>,
    variable: usize,
    basis: &MultiBasis,
) -> Result<TruncatedOperator<T>> {
    let dims = basis.per_variable_dims();
    if variable >= dims.len() {
        return Err(HplError::Dimension(format!("variable {variable} outside 0..{}", dims.len())));
    }
    if p1.rows() != p1.cols() || p1.rows() != dims[variable] {
        return Err(HplError::Dimension(format!(
            "operator is {}x{} but variable {variable} has dim {}",
            p1.rows(),
            p1.cols(),
            dims[variable]
        )));
    }
    let mut m: CMatrix<T> = identity_matrix(1);
    for (k, &d) in dims.iter().enumerate() {
        m = if k == variable { m.kronecker(p1.matrix()) } else { m.kronecker(&identity_matrix::<T>(d)) };
    }
    Ok(TruncatedOperator::new(m, p1.error_envelope(), format!("lift_z{}({})", variable + 1, p1.tag())))
}

fn check_pair<T: Real>(pair: &SeparatedSymbolPair<T>, basis: &MultiBasis) -> Result<Separability> {
    let sep = separability_check(pair, basis.n());
    if sep == Separability::NotApplicable {
        return Err(HplError::Hypothesis(format!(
            "variables ({}, {}) do not fit {} variables",
            pair.phi_var,
            pair.psi_var,
            basis.n()
        )));
    }
    Ok(sep)
}

fn lifted<T: Real>(
    f: fn(&BlaschkeProduct<T>, usize) -> Result<TruncatedOperator<T>>,
    b: &BlaschkeProduct<T>,
    var: usize,
    basis: &MultiBasis,
) -> Result<TruncatedOperator<T>> {
    lift_projection(&f(b, basis.per_variable_dims()[var])?, var, basis)
}

/// `P_(Q_φ) P_(Q_ψ)` from lifted model projections.
pub fn product_of_inner_projections<T: Real>(
    pair: &SeparatedSymbolPair<T>,
    basis: &MultiBasis,
) -> Result<TruncatedOperator<T>> {
    check_pair(pair, basis)?;
    let a = lifted(model_projection, &pair.phi, pair.phi_var, basis)?;
    let b = lifted(model_projection, &pair.psi, pair.psi_var, basis)?;
    Ok(compose(&a, &b)?.with_tag("P_Q_phi P_Q_psi"))
}

/// Defect operator built from the lifted submodule projections.
pub fn defect_operator<T: Real>(
    pair: &SeparatedSymbolPair<T>,
    basis: &MultiBasis,
    sign: DefectSign,
) -> Result<TruncatedOperator<T>> {
    check_pair(pair, basis)?;
    let a = lifted(submodule_projection, &pair.phi, pair.phi_var, basis)?;
    let b = lifted(submodule_projection, &pair.psi, pair.psi_var, basis)?;
    let ab = a.matrix() * b.matrix();
    let eye = identity_matrix::<T>(basis.total_dim());
    let base = eye - a.matrix() - b.matrix();
    let m = match sign {
        DefectSign::Proof => base + ab,
        DefectSign::Paper => base - ab,
    };
    Ok(TruncatedOperator::exact(m, format!("Delta({sign:?})")))
}

/// Sparse multivariate polynomial keyed by exponent multi-index.
type Poly<T> = BTreeMap<Vec<usize>, Complex<T>>;

fn poly_in_variable<T: Real>(b: &BlaschkeProduct<T>, var: usize, n: usize) -> Poly<T> {
    numerator_polynomial(b)
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let mut alpha = vec![0; n];
            alpha[var] = k;
            (alpha, v)
        })
        .collect()
}

fn poly_mul<T: Real>(p: &Poly<T>, q: &Poly<T>) -> Poly<T> {
    let mut out = Poly::new();
    for (a, &x) in p {
        for (b, &y) in q {
            let key: Vec<usize> = a.iter().zip(b).map(|(i, j)| i + j).collect();
            *out.entry(key).or_insert_with(czero) += x * y;
        }
    }
    out
}

/// Projection onto `p · P_box` inside `P_box`, where `p` is a polynomial and
/// `P_box` the box-truncated polynomials. Built from the convolution matrix
/// of `p` and orthonormalized by QR.
fn polynomial_submodule_projection<T: Real>(p: &Poly<T>, basis: &MultiBasis) -> Result<CMatrix<T>> {
    let dims = basis.per_variable_dims();
    let n = dims.len();
    let mut degree = vec![0; n];
    for alpha in p.keys() {
        for (d, a) in degree.iter_mut().zip(alpha) {
            *d = (*d).max(*a);
        }
    }
    if degree.iter().zip(dims).any(|(d, dim)| d > dim) {
        return Err(HplError::Truncation(format!("box {dims:?} is smaller than the symbol degrees {degree:?}")));
    }
    let reduced: Vec<usize> = dims.iter().zip(&degree).map(|(a, b)| a - b).collect();
    let total = basis.total_dim();
    let cols: usize = reduced.iter().product();
    if cols == 0 {
        return Ok(CMatrix::zeros(total, total));
    }
    let domain = MultiBasis { dims: reduced };
    let mut gen = DMatrix::from_element(total, cols, czero::<T>());
    for col in 0..cols {
        let beta = domain.multi_index(col);
        for (alpha, &v) in p {
            let target: Vec<usize> = alpha.iter().zip(&beta).map(|(a, b)| a + b).collect();
            gen[(basis.flat_index(&target)?, col)] += v;
        }
    }
    let q = gen.qr().q();
    let proj = &q * q.adjoint();
    let half = lit::<T>(0.5);
    Ok((&proj + proj.adjoint()).map(|v| v * half))
}

/// Orthogonal projection onto the intersection of the ranges of two
/// orthogonal projections, read off the null space of `[I - A; I - B]`.
fn intersection_projection<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let t = a.nrows();
    let eye = identity_matrix::<T>(t);
    let mut stacked = CMatrix::zeros(2 * t, t);
    stacked.view_mut((0, 0), (t, t)).copy_from(&(&eye - a));
    stacked.view_mut((t, 0), (t, t)).copy_from(&(&eye - b));
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut proj = CMatrix::zeros(t, t);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if to_f64(s) < NULL_TOL {
            let row = v_t.row(k);
            let col = row.adjoint();
            proj += &col * row;
        }
    }
    proj
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSubspaceReport {
    pub separability: Separability,
    /// `P_(Q_φψ) - P_(Q_φ) - P_(Q_ψ) = -Δ` with the proof sign.
    pub quotient_identity: IdentityReport,
    /// Projection onto `φH² ∩ ψH²` against the projection onto `φψH²`.
    pub intersection_identity: IdentityReport,
    /// `max |Δ_paper - Δ_proof|`, which is `2 max |P_φ P_ψ|`.
    pub sign_difference: f64,
    /// Same identity evaluated with the printed sign.
    pub paper_sign_residual: f64,
}

impl TwoSubspaceReport {
    pub fn passed(&self) -> bool {
        self.quotient_identity.passed() && self.intersection_identity.passed()
    }
}

/// Checks the quotient-projection identity and the intersection identity at
/// truncation. Non-separable inputs are reported as out of hypothesis.
pub fn verify_two_subspace_identity<T: Real>(
    pair: &SeparatedSymbolPair<T>,
    basis: &MultiBasis,
) -> Result<TwoSubspaceReport> {
    let sep = check_pair(pair, basis)?;
    let n = basis.n();
    let total = basis.total_dim();
    let pp = poly_mul(&poly_in_variable(&pair.phi, pair.phi_var, n), &poly_in_variable(&pair.psi, pair.psi_var, n));
    let sub_prod = polynomial_submodule_projection(&pp, basis)?;
    let q_prod = identity_matrix::<T>(total) - &sub_prod;
    let q_phi = lifted(model_projection, &pair.phi, pair.phi_var, basis)?;
    let q_psi = lifted(model_projection, &pair.psi, pair.psi_var, basis)?;
    let proof = defect_operator(pair, basis, DefectSign::Proof)?;
    let paper = defect_operator(pair, basis, DefectSign::Paper)?;

    let lhs = &q_prod - q_phi.matrix() - q_psi.matrix();
    let residual = to_f64(max_abs(&(&lhs + proof.matrix())));
    let paper_residual = to_f64(max_abs(&(&lhs + paper.matrix())));
    let sign_difference = to_f64(max_abs(&(paper.matrix() - proof.matrix())));

    let rounding = 64.0 * total as f64 * to_f64(T::unit_roundoff());
    let mut quotient =
        IdentityReport::assemble("P_Q_phipsi - P_Q_phi - P_Q_psi = -Delta", total, total, residual, 0.0, rounding);

    let sub_phi = lifted(submodule_projection, &pair.phi, pair.phi_var, basis)?;
    let sub_psi = lifted(submodule_projection, &pair.psi, pair.psi_var, basis)?;
    let inter = intersection_projection(sub_phi.matrix(), sub_psi.matrix());
    let inter_residual = to_f64(max_abs(&(&inter - &sub_prod)));
    let mut intersection =
        IdentityReport::assemble("phi H2 cap psi H2 = phi psi H2", total, total, inter_residual, 0.0, rounding);
    intersection.extra.insert("intersection_rank".into(), to_f64(inter.trace().re));
    intersection.extra.insert("product_submodule_rank".into(), to_f64(sub_prod.trace().re));

    if sep != Separability::Separable {
        let note = format!("{sep} pair: the identities assume symbols in distinct variables");
        quotient.out_of_hypothesis = Some(note.clone());
        intersection.out_of_hypothesis = Some(note);
    }
    quotient.extra.insert("paper_sign_residual".into(), paper_residual);
    Ok(TwoSubspaceReport {
        separability: sep,
        quotient_identity: quotient,
        intersection_identity: intersection,
        sign_difference,
        paper_sign_residual: paper_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub dims: Vec<usize>,
    pub counts: Vec<usize>,
    pub expected: Vec<usize>,
    pub verdict: CompactnessVerdict,
    pub matches_expected: bool,
}

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,count,expected\n");
        for ((d, c), e) in self.dims.iter().zip(&self.counts).zip(&self.expected) {
            out.push_str(&format!("{d},{c},{e}\n"));
        }
        out
    }
}

/// Count of singular values `≥ 1/2` of the product projection on the cube
/// `(N, N, N)` for each listed `N`, against `deg φ · deg ψ · N`.
pub fn tridisc_growth<T: Real>(pair: &SeparatedSymbolPair<T>, dims: &[usize]) -> Result<GrowthReport> {
    match separability_check(pair, 3) {
        Separability::Separable => {}
        other => return Err(HplError::Hypothesis(format!("tridisc growth needs a separable pair, got {other}"))),
    }
    let (p, q) = (pair.phi.degree(), pair.psi.degree());
    if p == 0 || q == 0 {
        return Err(HplError::Hypothesis("both symbols must be nonconstant".into()));
    }
    let thresholds = SpectralThresholds::default();
    let family = dims
        .iter()
        .map(|&n| Ok((n, product_of_inner_projections(pair, &MultiBasis::new(vec![n; 3])?)?)))
        .collect::<Result<Vec<_>>>()?;
    let spectral = compactness_verdict(&family, &thresholds)?;
    let expected: Vec<usize> = dims.iter().map(|&n| p * q * n).collect();
    Ok(GrowthReport {
        dims: dims.to_vec(),
        matches_expected: spectral.large_counts == expected,
        counts: spectral.large_counts,
        expected,
        verdict: spectral.verdict,
    })
}
