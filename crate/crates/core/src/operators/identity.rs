//! Residual checks for the Toeplitz–Hankel product identity and the
//! reduction chain for two inner symbols.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{compose, core_residual, hankel, identity_matrix, sub, toeplitz, TruncatedOperator};
use crate::blaschke::BlaschkeProduct;
use crate::error::{HplError, Result};
use crate::fourier::{product_symbol, taylor_coeffs, transform, FourierSymbol, TransformKind};
use crate::scalar::{from_usize, to_f64, Real};
use crate::spectral::{compactness_verdict, SpectralReport, SpectralThresholds};

/// Residual allowed on top of the tail budget for exact inputs.
pub const EXACT_FLOOR: f64 = 1e-12;
/// Multiple of the tail budget tolerated before a residual counts as a failure.
pub const TAIL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    /// Size of the sections that were multiplied.
    pub dim: usize,
    /// Size of the top-left block where the residual is measured.
    pub core_dim: usize,
    pub residual: f64,
    /// Contribution of symbol truncation and section truncation.
    pub tail_budget: f64,
    /// Forward error bound for the floating-point products.
    pub rounding_budget: f64,
    /// `TAIL_FACTOR · tail_budget + rounding_budget + EXACT_FLOOR`.
    pub allowed: f64,
    pub within_budget: bool,
    /// Set when the inputs fall outside the identity's hypotheses.
    pub out_of_hypothesis: Option<String>,
    pub extra: BTreeMap<String, f64>,
}

impl IdentityReport {
    pub(crate) fn assemble(
        identity: impl Into<String>,
        dim: usize,
        core_dim: usize,
        residual: f64,
        tail_budget: f64,
        rounding_budget: f64,
    ) -> Self {
        let allowed = TAIL_FACTOR * tail_budget + rounding_budget + EXACT_FLOOR;
        Self {
            identity: identity.into(),
            dim,
            core_dim,
            residual,
            tail_budget,
            rounding_budget,
            allowed,
            within_budget: residual <= allowed,
            out_of_hypothesis: None,
            extra: BTreeMap::new(),
        }
    }

    /// Passes when within budget and inside the hypotheses.
    pub fn passed(&self) -> bool {
        self.within_budget && self.out_of_hypothesis.is_none()
    }
}

/// Budget for a product of `m` sections of size `section`, compared with the
/// infinite product on the top-left `core` block.
///
/// Each infinite product differs from the section product only through paths
/// that leave the section; one of the `m` factors then contributes a
/// coefficient of index at least `s = ceil((section - core + 1) / m)`.
fn chain_budget<T: Real>(factors: &[&FourierSymbol<T>], core: usize, section: usize) -> (f64, f64) {
    let m = factors.len();
    let norms: Vec<f64> = factors.iter().map(|f| to_f64(f.l1_bound())).collect();
    let prod_except = |i: usize| norms.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v).product::<f64>();
    if m == 1 {
        return (to_f64(factors[0].tail_bound()), 0.0);
    }
    let s = (section - core + 1).div_ceil(m) as u64;
    let tail: f64 = factors
        .iter()
        .enumerate()
        .map(|(i, f)| to_f64(f.l1_tail_from(s)) * prod_except(i))
        .sum();
    let u = to_f64(T::unit_roundoff());
    let rounding = 4.0 * m as f64 * section as f64 * u * norms.iter().product::<f64>();
    (tail, rounding)
}

fn sum_budgets(parts: &[(f64, f64)]) -> (f64, f64) {
    parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

/// Checks `T_(fg) = T_f T_g + H_(f~) H_g` on the `(N - d_f - d_g)` core block,
/// where `d_f`, `d_g` are the coefficient windows of the symbols.
pub fn verify_toeplitz_identity<T: Real>(f: &FourierSymbol<T>, g: &FourierSymbol<T>, n: usize) -> Result<IdentityReport> {
    let (df, dg) = (f.window() as usize, g.window() as usize);
    if n <= df + dg {
        return Err(HplError::Truncation(format!(
            "N = {n} leaves no core block for symbol windows {df} and {dg}"
        )));
    }
    let core = n - df - dg;
    let fg = product_symbol(f, g);
    let ft = transform(f, TransformKind::Tilde);
    let lhs = toeplitz(&fg, n);
    let tt = compose(&toeplitz(f, n), &toeplitz(g, n))?;
    let hh = compose(&hankel(&ft, n), &hankel(g, n))?;
    let rhs = tt.matrix() + hh.matrix();
    let residual = to_f64(core_residual(lhs.matrix(), &rhs, core));
    let (tail, rounding) =
        sum_budgets(&[chain_budget(&[&fg], core, n), chain_budget(&[f, g], core, n), chain_budget(&[&ft, g], core, n)]);
    Ok(IdentityReport::assemble("T_fg = T_f T_g + H_f~ H_g", n, core, residual, tail, rounding))
}

/// Controls section size for [`verify_thma_chain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainOptions {
    /// Extra rows beyond the core used in the first section tried.
    pub guard: usize,
    /// Upper limit on the section size.
    pub max_section: usize,
    /// Stop enlarging the section once the combined tail budget is below this.
    pub target_budget: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self { guard: 8, max_section: 480, target_budget: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub phi_degree: usize,
    pub psi_degree: usize,
    pub core_dim: usize,
    pub section: usize,
    pub reduction: IdentityReport,
    pub defect: IdentityReport,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.reduction.passed() && self.defect.passed()
    }
}

struct ChainSymbols<T: Real> {
    phi: FourierSymbol<T>,
    phi_bar: FourierSymbol<T>,
    psi: FourierSymbol<T>,
    psi_bar: FourierSymbol<T>,
    mix: FourierSymbol<T>,
    mix_bar: FourierSymbol<T>,
    mix_star: FourierSymbol<T>,
}

impl<T: Real> ChainSymbols<T> {
    fn new(phi_b: &BlaschkeProduct<T>, psi_b: &BlaschkeProduct<T>, window: usize) -> Result<Self> {
        let phi = taylor_coeffs(phi_b, window)?;
        let psi = taylor_coeffs(psi_b, window)?;
        let phi_bar = transform(&phi, TransformKind::Conjugate);
        let psi_bar = transform(&psi, TransformKind::Conjugate);
        let mix = product_symbol(&phi_bar, &psi);
        let mix_bar = transform(&mix, TransformKind::Conjugate);
        let mix_star = transform(&mix, TransformKind::Star);
        Ok(Self { phi, phi_bar, psi, psi_bar, mix, mix_bar, mix_star })
    }

    fn reduction_budget(&self, core: usize, m: usize) -> (f64, f64) {
        let s = self;
        sum_budgets(&[
            chain_budget(&[&s.phi_bar, &s.psi, &s.psi_bar, &s.psi], core, m),
            chain_budget(&[&s.phi_bar, &s.psi, &s.psi_bar, &s.phi, &s.phi_bar, &s.psi], core, m),
            chain_budget(&[&s.mix], core, m),
            chain_budget(&[&s.mix, &s.mix_bar, &s.mix], core, m),
        ])
    }

    fn defect_budget(&self, core: usize, m: usize) -> (f64, f64) {
        let s = self;
        sum_budgets(&[
            chain_budget(&[&s.mix], core, m),
            chain_budget(&[&s.mix, &s.mix_bar, &s.mix], core, m),
            chain_budget(&[&s.mix, &s.mix_star, &s.mix], core, m),
        ])
    }
}

/// Checks, on the `N x N` core of larger sections,
///
/// (i) `A* T_ψ = T_ϕ - T_ϕ T_(ϕ̄) T_ϕ` with `A = (I - T_φT_φ*)(T_ψT_ψ*)T_φ`,
/// (ii) `T_ϕ (I - T_ϕ* T_ϕ) = T_ϕ H_ϕ* H_ϕ`,
///
/// where `ϕ = φ̄ψ`. The section grows from `N + guard` until the propagated
/// tail budget drops below the target or the section cap is hit.
pub fn verify_thma_chain<T: Real>(
    phi: &BlaschkeProduct<T>,
    psi: &BlaschkeProduct<T>,
    n: usize,
    opts: &ChainOptions,
) -> Result<ChainReport> {
    let (p, q) = (phi.degree(), psi.degree());
    if n <= p + q {
        return Err(HplError::Truncation(format!("N = {n} must exceed the combined degree {}", p + q)));
    }
    if opts.max_section < n {
        return Err(HplError::Truncation(format!("max_section {} is below N = {n}", opts.max_section)));
    }
    let mut m = (n + opts.guard).min(opts.max_section);
    let step = n.max(8);
    let symbols = loop {
        let syms = ChainSymbols::new(phi, psi, m)?;
        let tail = syms.reduction_budget(n, m).0 + syms.defect_budget(n, m).0;
        if tail <= opts.target_budget || m >= opts.max_section {
            break syms;
        }
        m = (m + step).min(opts.max_section);
    };
    let s = &symbols;

    let t_phi = toeplitz(&s.phi, m);
    let t_psi = toeplitz(&s.psi, m);
    let t_phi_h = toeplitz(&s.phi_bar, m);
    let t_psi_h = toeplitz(&s.psi_bar, m);
    let eye = TruncatedOperator::exact(identity_matrix::<T>(m), "I");
    let p_phi = compose(&t_phi, &t_phi_h)?;
    let p_psi = compose(&t_psi, &t_psi_h)?;
    let a = compose(&compose(&sub(&eye, &p_phi)?, &p_psi)?, &t_phi)?;
    let lhs1 = compose(&super::adjoint(&a), &t_psi)?;
    let t_mix = toeplitz(&s.mix, m);
    let t_mix_bar = toeplitz(&s.mix_bar, m);
    let tmt = compose(&compose(&t_mix, &t_mix_bar)?, &t_mix)?;
    let rhs1 = sub(&t_mix, &tmt)?;
    let r1 = to_f64(core_residual(lhs1.matrix(), rhs1.matrix(), n));
    let (tail1, round1) = s.reduction_budget(n, m);
    let mut reduction = IdentityReport::assemble("A* T_psi = T_mix - T_mix T_mix~bar T_mix", m, n, r1, tail1, round1);

    let h_mix = hankel(&s.mix, m);
    let h_mix_star = hankel(&s.mix_star, m);
    let rhs2 = compose(&t_mix, &compose(&h_mix_star, &h_mix)?)?;
    let r2 = to_f64(core_residual(rhs1.matrix(), rhs2.matrix(), n));
    let (tail2, round2) = s.defect_budget(n, m);
    let mut defect = IdentityReport::assemble("T_mix (I - T_mix* T_mix) = T_mix H_mix* H_mix", m, n, r2, tail2, round2);

    let hankel_herm = to_f64(super::max_abs(&(h_mix.matrix().adjoint() - h_mix_star.matrix())));
    defect.extra.insert("hankel_adjoint_gap".into(), hankel_herm);
    for rep in [&mut reduction, &mut defect] {
        rep.extra.insert("phi_tail".into(), to_f64(s.phi.tail_bound()));
        rep.extra.insert("psi_tail".into(), to_f64(s.psi.tail_bound()));
        rep.extra.insert("window".into(), from_usize::<f64>(m));
    }
    Ok(ChainReport { phi_degree: p, psi_degree: q, core_dim: n, section: m, reduction, defect })
}

/// Singular-value profile of `H_f T_g` over the listed sections.
pub fn hankel_toeplitz_probe<T: Real>(
    f: &FourierSymbol<T>,
    g: &FourierSymbol<T>,
    dims: &[usize],
    thresholds: &SpectralThresholds,
) -> Result<SpectralReport> {
    let family = dims
        .iter()
        .map(|&n| Ok((n, compose(&hankel(f, n), &toeplitz(g, n))?)))
        .collect::<Result<Vec<_>>>()?;
    compactness_verdict(&family, thresholds)
}
