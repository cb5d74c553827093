//! Function theory on the unit disk: disk points, Blaschke products,
//! pseudo-hyperbolic geometry, interpolation diagnostics and the boundary
//! probes for the (S), (C) and (WC) conditions.
//!
//! Points of the disk are stored as a boundary gap `1 - |z|` together with an
//! argument. Zero sequences such as `1 - 2^-n` accumulate at the circle, where
//! a plain floating-point `z` keeps only a handful of significant bits of
//! `1 - |z|`; every formula below is written in terms of the gaps so that
//! distances between such points keep full relative precision.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{HplError, Result};
use crate::scalar::{abs, c, cabs, cis, from_usize, lit, min_of, to_f64, Real};

/// A point of the open unit disk, `z = (1 - gap) * exp(i * angle)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T: Real> {
    gap: T,
    angle: T,
}

impl<T: Real> DiskPoint<T> {
    pub fn origin() -> Self {
        Self { gap: T::one(), angle: T::zero() }
    }

    /// Builds a point from its boundary gap `1 - |z|` and argument.
    pub fn from_gap_angle(gap: T, angle: T) -> Result<Self> {
        if !(gap > T::zero()) || gap > T::one() {
            return Err(HplError::Domain(format!(
                "boundary gap {gap} is outside (0, 1]; the point is not in the open disk"
            )));
        }
        let angle = if gap == T::one() { T::zero() } else { angle };
        Ok(Self { gap, angle })
    }

    /// Point on the positive real axis at distance `gap` from 1.
    pub fn real_from_gap(gap: T) -> Result<Self> {
        Self::from_gap_angle(gap, T::zero())
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        let r = cabs(z);
        if !(r < T::one()) {
            return Err(HplError::Domain(format!("|z| = {r} is not < 1")));
        }
        if r == T::zero() {
            return Ok(Self::origin());
        }
        let (p, q) = if abs(z.re) >= abs(z.im) {
            (abs(z.re), abs(z.im))
        } else {
            (abs(z.im), abs(z.re))
        };
        // 1 - |z|^2 with the dominant coordinate handled exactly
        let one_minus_sq = (T::one() - p) * (T::one() + p) - q * q;
        let gap = if q == T::zero() {
            T::one() - p
        } else {
            one_minus_sq / (T::one() + r)
        };
        if !(gap > T::zero()) {
            return Err(HplError::Domain(format!("|z| = {r} rounds onto the unit circle")));
        }
        Self::from_gap_angle(gap, z.im.atan2(z.re))
    }

    /// `1 - |z|`.
    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn angle(&self) -> T {
        self.angle
    }

    pub fn modulus(&self) -> T {
        T::one() - self.gap
    }

    /// `1 - |z|^2`, computed from the gap.
    pub fn one_minus_abs_sq(&self) -> T {
        self.gap * (lit::<T>(2.0) - self.gap)
    }

    pub fn is_origin(&self) -> bool {
        self.gap == T::one()
    }

    pub fn to_complex(&self) -> Complex<T> {
        cis(self.angle) * self.modulus()
    }
}

/// Pseudo-hyperbolic distance between two disk points.
///
/// Uses `|1 - conj(z) w|^2 = |z - w|^2 + (1 - |z|^2)(1 - |w|^2)`.
pub fn rho<T: Real>(z: &DiskPoint<T>, w: &DiskPoint<T>) -> T {
    let rz = z.modulus();
    let rw = w.modulus();
    let dr = z.gap - w.gap;
    let s = ((z.angle - w.angle) / lit::<T>(2.0)).sin();
    let dist_sq = dr * dr + lit::<T>(4.0) * rz * rw * s * s;
    if dist_sq == T::zero() {
        return T::zero();
    }
    let prod = z.one_minus_abs_sq() * w.one_minus_abs_sq();
    (dist_sq / (dist_sq + prod)).sqrt()
}

/// `|z - w| / |1 - conj(z) w|` for complex arguments in the open disk.
pub fn pseudo_hyperbolic<T: Real>(z: Complex<T>, w: Complex<T>) -> Result<T> {
    let z = DiskPoint::from_complex(z)?;
    let w = DiskPoint::from_complex(w)?;
    Ok(rho(&z, &w))
}

/// Normalized factor `(|a|/a)(a - z)/(1 - conj(a) z)`, or `z` when `a = 0`.
pub fn blaschke_factor<T: Real>(a: &DiskPoint<T>, z: &DiskPoint<T>) -> Complex<T> {
    if a.is_origin() {
        return z.to_complex();
    }
    let two = lit::<T>(2.0);
    let ra = a.modulus();
    let rz = z.modulus();
    let delta = z.angle - a.angle;
    let s = (delta / two).sin();
    let sin_d = delta.sin();
    let num = c(z.gap - a.gap + two * rz * s * s, -rz * sin_d);
    let den = c(
        a.gap + z.gap - a.gap * z.gap + two * ra * rz * s * s,
        -ra * rz * sin_d,
    );
    num / den
}

/// Finite ordered list of disk points with a short label.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSequence<T: Real> {
    label: String,
    points: Vec<DiskPoint<T>>,
}

impl<T: Real> ZeroSequence<T> {
    pub fn new(label: impl Into<String>, points: Vec<DiskPoint<T>>) -> Self {
        Self { label: label.into(), points }
    }

    pub fn from_complex(label: impl Into<String>, zeros: &[Complex<T>]) -> Result<Self> {
        let points = zeros
            .iter()
            .map(|&z| DiskPoint::from_complex(z))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(label, points))
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::new(label, Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[DiskPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_complex(&self) -> Vec<Complex<T>> {
        self.points.iter().map(DiskPoint::to_complex).collect()
    }

    /// First `len` points (or all of them if the sequence is shorter).
    pub fn prefix(&self, len: usize) -> Self {
        Self::new(self.label.clone(), self.points[..len.min(self.len())].to_vec())
    }

    /// Blaschke sums `sum_{n <= M} (1 - |z_n|)` for every prefix length `M`.
    pub fn blaschke_partial_sums(&self) -> Vec<T> {
        self.points
            .iter()
            .scan(T::zero(), |acc, p| {
                *acc += p.gap;
                Some(*acc)
            })
            .collect()
    }
}

/// Finite Blaschke product `c * z^m * prod_k b_{a_k}(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct<T: Real> {
    zeros: ZeroSequence<T>,
    constant: Complex<T>,
    origin_multiplicity: usize,
}

impl<T: Real> BlaschkeProduct<T> {
    pub fn new(zeros: ZeroSequence<T>, constant: Complex<T>, origin_multiplicity: usize) -> Result<Self> {
        let modulus = cabs(constant);
        let tol = lit::<T>(1e3) * T::unit_roundoff();
        if abs(modulus - T::one()) > tol {
            return Err(HplError::Domain(format!("constant has modulus {modulus}, expected 1")));
        }
        Ok(Self { zeros, constant, origin_multiplicity })
    }

    /// Blaschke product with constant 1 over the given zeros.
    pub fn from_zeros(zeros: ZeroSequence<T>) -> Self {
        Self { zeros, constant: Complex::new(T::one(), T::zero()), origin_multiplicity: 0 }
    }

    pub fn from_complex_zeros(label: &str, zeros: &[Complex<T>]) -> Result<Self> {
        Ok(Self::from_zeros(ZeroSequence::from_complex(label, zeros)?))
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        Self {
            zeros: ZeroSequence::empty(format!("z^{m}")),
            constant: Complex::new(T::one(), T::zero()),
            origin_multiplicity: m,
        }
    }

    pub fn zeros(&self) -> &ZeroSequence<T> {
        &self.zeros
    }

    pub fn constant(&self) -> Complex<T> {
        self.constant
    }

    pub fn origin_multiplicity(&self) -> usize {
        self.origin_multiplicity
    }

    /// Number of zeros counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.origin_multiplicity + self.zeros.len()
    }

    /// All zeros with multiplicity, the `z^m` factor first.
    pub fn factor_zeros(&self) -> Vec<DiskPoint<T>> {
        std::iter::repeat_n(DiskPoint::origin(), self.origin_multiplicity)
            .chain(self.zeros.points().iter().copied())
            .collect()
    }

    /// True when every zero sits at the origin, i.e. the product is `c z^d`.
    pub fn is_monomial(&self) -> bool {
        self.zeros.points().iter().all(DiskPoint::is_origin)
    }

    pub fn eval_point(&self, z: &DiskPoint<T>) -> Complex<T> {
        let mut value = self.constant;
        let zc = z.to_complex();
        for _ in 0..self.origin_multiplicity {
            value *= zc;
        }
        for a in self.zeros.points() {
            value *= blaschke_factor(a, z);
        }
        value
    }

    /// `|B(z)|` as a product of pseudo-hyperbolic distances.
    pub fn modulus_at(&self, z: &DiskPoint<T>) -> T {
        let mut m = z.modulus().powi(self.origin_multiplicity as i32);
        for a in self.zeros.points() {
            m *= rho(a, z);
        }
        m
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval_point(&DiskPoint::from_complex(z)?))
    }
}

pub fn blaschke_eval<T: Real>(b: &BlaschkeProduct<T>, z: Complex<T>) -> Result<Complex<T>> {
    b.eval(z)
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(HplError::TooShort { needed: 1, got: 0 });
    }
    Ok(())
}

/// `a_n = 1 - 2^-n` and `b_n = 1 - 2^-n (1 + 1/n)` for `n = 1..=count`.
pub fn exm1_sequences<T: Real>(count: usize) -> Result<(ZeroSequence<T>, ZeroSequence<T>)> {
    check_count(count)?;
    let half = lit::<T>(0.5);
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for n in 1..=count {
        let g = half.powi(n as i32);
        a.push(DiskPoint::real_from_gap(g)?);
        let nf = from_usize::<T>(n);
        b.push(DiskPoint::real_from_gap(g * (T::one() + T::one() / nf))?);
    }
    Ok((ZeroSequence::new("exm1_a", a), ZeroSequence::new("exm1_b", b)))
}

/// `a_n = 1 - 4^-n` and `b_n = 1 - 2 * 4^-n` for `n = 1..=count`.
pub fn prop1_sequences<T: Real>(count: usize) -> Result<(ZeroSequence<T>, ZeroSequence<T>)> {
    check_count(count)?;
    let quarter = lit::<T>(0.25);
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for n in 1..=count {
        let g = quarter.powi(n as i32);
        a.push(DiskPoint::real_from_gap(g)?);
        b.push(DiskPoint::real_from_gap(lit::<T>(2.0) * g)?);
    }
    Ok((ZeroSequence::new("prop1_a", a), ZeroSequence::new("prop1_b", b)))
}

/// `rho(alpha_n, beta_n)` index by index.
pub fn matched_zero_gap<T: Real>(z1: &ZeroSequence<T>, z2: &ZeroSequence<T>) -> Result<Vec<T>> {
    if z1.len() != z2.len() {
        return Err(HplError::LengthMismatch { left: z1.len(), right: z2.len() });
    }
    Ok(z1.points().iter().zip(z2.points()).map(|(a, b)| rho(a, b)).collect())
}

/// `inf_{i != j} rho(z_i, z_j)` over the stored points.
pub fn uniform_separation<T: Real>(z: &ZeroSequence<T>) -> Result<T> {
    if z.len() < 2 {
        return Err(HplError::TooShort { needed: 2, got: z.len() });
    }
    let pts = z.points();
    let mut best = T::one();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = min_of(best, rho(&pts[i], &pts[j]));
        }
    }
    Ok(best)
}

/// `min_n prod_{k != n} rho(z_n, z_k)` over the stored points.
pub fn carleson_product_bound<T: Real>(z: &ZeroSequence<T>) -> Result<T> {
    if z.len() < 2 {
        return Err(HplError::TooShort { needed: 2, got: z.len() });
    }
    let pts = z.points();
    let mut best = T::one();
    for (n, zn) in pts.iter().enumerate() {
        let mut prod = T::one();
        for (k, zk) in pts.iter().enumerate() {
            if k != n {
                prod *= rho(zn, zk);
            }
        }
        best = min_of(best, prod);
    }
    Ok(best)
}

/// Upper-envelope estimate of the Carleson constant of
/// `mu = sum (1 - |z_n|^2) delta_{z_n}`.
///
/// Maximizes `mu(S(I)) / |I|` over dyadic arcs `I` of normalized length
/// `2^-l`, `l = 1..=window_levels`, aligned to the dyadic grid starting at
/// angle 0.
pub fn carleson_window_bound<T: Real>(z: &ZeroSequence<T>, window_levels: u32) -> T {
    let levels = window_levels.min(62);
    let two_pi = T::two_pi();
    let mut best = T::zero();
    for level in 1..=levels {
        let arcs = 1u64 << level;
        let len = lit::<T>(0.5).powi(level as i32);
        let mut mass: BTreeMap<u64, T> = BTreeMap::new();
        for p in z.points() {
            if p.gap() > len {
                continue;
            }
            let mut turn = p.angle() / two_pi;
            turn -= turn.floor();
            let idx = (to_f64(turn) * arcs as f64).floor() as u64;
            *mass.entry(idx.min(arcs - 1)).or_insert_with(T::zero) += p.one_minus_abs_sq();
        }
        for m in mass.values() {
            let ratio = *m / len;
            if ratio > best {
                best = ratio;
            }
        }
    }
    best
}

/// Infimum that may range over an empty set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infimum<T> {
    Empty,
    Value(T),
}

impl<T: Copy> Infimum<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Infimum::Empty => None,
            Infimum::Value(v) => Some(*v),
        }
    }
}

/// `inf { rho(alpha, beta) : alpha in Z1, beta in Z2, |alpha|, |beta| > r }`.
pub fn zero_separation_condition<T: Real>(z1: &ZeroSequence<T>, z2: &ZeroSequence<T>, r: T) -> Infimum<T> {
    let cut = T::one() - r;
    let outer = |z: &ZeroSequence<T>| -> Vec<DiskPoint<T>> {
        z.points().iter().copied().filter(|p| p.gap() < cut).collect()
    };
    let (o1, o2) = (outer(z1), outer(z2));
    if o1.is_empty() || o2.is_empty() {
        return Infimum::Empty;
    }
    let mut best = T::one();
    for a in &o1 {
        for b in &o2 {
            best = min_of(best, rho(a, b));
        }
    }
    Infimum::Value(best)
}

/// Radii of a probe, held as boundary gaps `1 - r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid<T: Real> {
    gaps: Vec<T>,
}

impl<T: Real> ProbeGrid<T> {
    pub fn from_gaps(gaps: Vec<T>) -> Result<Self> {
        if gaps.is_empty() {
            return Err(HplError::Grid("radius list is empty".into()));
        }
        for g in &gaps {
            if !(*g > T::zero() && *g < T::one()) {
                return Err(HplError::Grid(format!("radius with gap {g} is not in (0, 1)")));
            }
        }
        if gaps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(HplError::Grid("radii must be strictly increasing".into()));
        }
        Ok(Self { gaps })
    }

    pub fn from_radii(radii: &[T]) -> Result<Self> {
        Self::from_gaps(radii.iter().map(|&r| T::one() - r).collect())
    }

    /// Radii `1 - base^-j` for `j = 1..=levels`.
    pub fn geometric(base: T, levels: u32) -> Result<Self> {
        let inv = T::one() / base;
        Self::from_gaps((1..=levels).map(|j| inv.powi(j as i32)).collect())
    }

    pub fn gaps(&self) -> &[T] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Three-valued verdict of a sampled boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    ViolatedAtSamples,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeTolerances {
    pub tol_s: f64,
    pub tol_c: f64,
    pub tol_wc: f64,
    /// Fraction of movement across the outer window that still counts as
    /// "leveled off" (or as "no upward trend" for S).
    pub trend_slack: f64,
    /// S is only declared violated when the outermost statistic is below this.
    pub s_floor: f64,
}

impl Default for ProbeTolerances {
    fn default() -> Self {
        Self { tol_s: 1e-2, tol_c: 1e-2, tol_wc: 1e-2, trend_slack: 0.1, s_floor: 0.9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixLengths {
    pub phi: usize,
    pub psi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    /// `min over angle of max(|phi|, |psi|)` at the outermost radius.
    pub s_statistic: f64,
    /// Global minimum of `|phi| + |psi|`, origin included.
    pub c_statistic: f64,
    /// Minimum of `|phi| + |psi|` over the outer quartile of radii.
    pub wc_statistic: f64,
    /// Number of outermost radii the S and WC rules look at.
    pub outer_window: usize,
}

/// Grid-sampled statistics for a pair of Blaschke products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub radii: Vec<f64>,
    pub gaps: Vec<f64>,
    pub min_sum: Vec<f64>,
    pub max_of_max: Vec<f64>,
    pub min_of_max: Vec<f64>,
    /// `|phi(0)| + |psi(0)|`; the centre sample used by the C rule.
    pub origin_sum: f64,
    pub angular_sample_count: usize,
    pub prefix_lengths: PrefixLengths,
    pub tolerances: ProbeTolerances,
    pub summary: ProbeSummary,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl ProbeReport {
    pub fn verdict(&self, condition: &str) -> Option<Verdict> {
        self.verdicts.get(condition).copied()
    }
}

fn outer_window_len(n: usize) -> usize {
    if n < 2 {
        n
    } else {
        n.div_ceil(4).max(2)
    }
}

fn leveled_off(window: &[f64], slack: f64) -> bool {
    let last = *window.last().unwrap();
    let peak = window.iter().cloned().fold(f64::MIN, f64::max);
    last >= (1.0 - slack) * peak
}

fn s_verdict(min_of_max: &[f64], window: usize, tol: &ProbeTolerances) -> Verdict {
    let w = &min_of_max[min_of_max.len() - window..];
    let low = w.iter().cloned().fold(f64::MAX, f64::min);
    if low >= 1.0 - tol.tol_s {
        return Verdict::Consistent;
    }
    let first = w[0];
    let last = *w.last().unwrap();
    let climbing = last - first > tol.trend_slack * (1.0 - first);
    if last < tol.s_floor && !climbing {
        Verdict::ViolatedAtSamples
    } else {
        Verdict::Inconclusive
    }
}

fn floor_verdict(values: &[f64], trend_window: &[f64], tol: f64, slack: f64) -> Verdict {
    let low = values.iter().cloned().fold(f64::MAX, f64::min);
    if low < tol {
        Verdict::ViolatedAtSamples
    } else if leveled_off(trend_window, slack) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Samples `phi` and `psi` on circles of the grid at `angular_samples`
/// equispaced angles (starting at angle 0) and derives the S, C and WC
/// verdicts.
///
/// * S is consistent when `min over angle of max(|phi|,|psi|)` is at least
///   `1 - tol_s` on every outer radius; violated when the outermost value is
///   below `s_floor` and has not closed a `trend_slack` fraction of its
///   distance to 1 across the outer window.
/// * C takes the minimum of `|phi| + |psi|` over every sample, the origin
///   included; WC takes it over the outer window only. Either is violated
///   below its tolerance and consistent when, in addition, the outer window
///   has leveled off (last value within `trend_slack` of the window peak).
///
/// Anything else is inconclusive.
pub fn probe_conditions<T: Real>(
    phi: &BlaschkeProduct<T>,
    psi: &BlaschkeProduct<T>,
    grid: &ProbeGrid<T>,
    angular_samples: usize,
    tol: &ProbeTolerances,
) -> Result<ProbeReport> {
    if angular_samples < 8 {
        return Err(HplError::Grid(format!("need at least 8 angular samples, got {angular_samples}")));
    }
    let two_pi = T::two_pi();
    let k = from_usize::<T>(angular_samples);
    let mut min_sum = Vec::with_capacity(grid.len());
    let mut max_of_max = Vec::with_capacity(grid.len());
    let mut min_of_max = Vec::with_capacity(grid.len());
    for &gap in grid.gaps() {
        let mut lo_sum = lit::<T>(2.0);
        let mut hi_max = T::zero();
        let mut lo_max = T::one();
        for j in 0..angular_samples {
            let theta = two_pi * from_usize::<T>(j) / k;
            let z = DiskPoint::from_gap_angle(gap, theta)?;
            let a = phi.modulus_at(&z);
            let b = psi.modulus_at(&z);
            let m = if a >= b { a } else { b };
            lo_sum = min_of(lo_sum, a + b);
            if m > hi_max {
                hi_max = m;
            }
            lo_max = min_of(lo_max, m);
        }
        min_sum.push(to_f64(lo_sum));
        max_of_max.push(to_f64(hi_max));
        min_of_max.push(to_f64(lo_max));
    }
    let origin = DiskPoint::origin();
    let origin_sum = to_f64(phi.modulus_at(&origin) + psi.modulus_at(&origin));

    let window = outer_window_len(grid.len());
    let outer_sum = &min_sum[min_sum.len() - window..];
    let mut all_sums = min_sum.clone();
    all_sums.push(origin_sum);

    let mut verdicts = BTreeMap::new();
    verdicts.insert("S".to_string(), s_verdict(&min_of_max, window, tol));
    verdicts.insert("C".to_string(), floor_verdict(&all_sums, outer_sum, tol.tol_c, tol.trend_slack));
    verdicts.insert("WC".to_string(), floor_verdict(outer_sum, outer_sum, tol.tol_wc, tol.trend_slack));

    let summary = ProbeSummary {
        s_statistic: *min_of_max.last().unwrap(),
        c_statistic: all_sums.iter().cloned().fold(f64::MAX, f64::min),
        wc_statistic: outer_sum.iter().cloned().fold(f64::MAX, f64::min),
        outer_window: window,
    };
    Ok(ProbeReport {
        radii: grid.gaps().iter().map(|&g| to_f64(T::one() - g)).collect(),
        gaps: grid.gaps().iter().map(|&g| to_f64(g)).collect(),
        min_sum,
        max_of_max,
        min_of_max,
        origin_sum,
        angular_sample_count: angular_samples,
        prefix_lengths: PrefixLengths { phi: phi.degree(), psi: psi.degree() },
        tolerances: *tol,
        summary,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn p(x: f64, y: f64) -> Complex<f64> {
        c(x, y)
    }

    #[test]
    fn rho_trivial_cases() {
        assert_eq!(pseudo_hyperbolic(p(0.3, 0.2), p(0.3, 0.2)).unwrap(), 0.0);
        let w = p(0.3, -0.4);
        assert!((pseudo_hyperbolic(p(0.0, 0.0), w).unwrap() - 0.5).abs() < 1e-15);
        assert!((pseudo_hyperbolic(p(0.75, 0.0), p(0.5, 0.0)).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rho_rejects_boundary_points() {
        assert!(matches!(pseudo_hyperbolic(p(1.0, 0.0), p(0.0, 0.0)), Err(HplError::Domain(_))));
        assert!(pseudo_hyperbolic(p(0.0, 0.0), p(0.8, 0.6)).is_err());
    }

    #[test]
    fn single_factor_values() {
        let b = BlaschkeProduct::from_complex_zeros("a", &[p(0.5, 0.0)]).unwrap();
        assert_eq!(b.eval(p(0.5, 0.0)).unwrap(), p(0.0, 0.0));
        let v = b.eval(p(0.0, 0.0)).unwrap();
        assert!((v - p(0.5, 0.0)).norm() < 1e-15);
        // the origin factor is plain z
        let z = BlaschkeProduct::<f64>::from_complex_zeros("o", &[p(0.0, 0.0)]).unwrap();
        let v = z.eval(p(0.1, 0.7)).unwrap();
        assert!((v - p(0.1, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn factor_matches_naive_formula_away_from_boundary() {
        let a = p(0.3, -0.45);
        let z = p(-0.2, 0.6);
        let naive = (a.norm() / a) * (a - z) / (p(1.0, 0.0) - a.conj() * z);
        let b = BlaschkeProduct::from_complex_zeros("a", &[a]).unwrap();
        assert!((b.eval(z).unwrap() - naive).norm() < 1e-14);
    }

    #[test]
    fn sequences_first_terms() {
        let (a, b) = exm1_sequences::<f64>(2).unwrap();
        let (a, b) = (a.to_complex(), b.to_complex());
        assert_eq!(a[0], p(0.5, 0.0));
        assert_eq!(b[0], p(0.0, 0.0));
        assert_eq!(a[1], p(0.75, 0.0));
        assert_eq!(b[1], p(0.625, 0.0));
        let (a, b) = prop1_sequences::<f64>(1).unwrap();
        assert_eq!(a.to_complex()[0], p(0.75, 0.0));
        assert_eq!(b.to_complex()[0], p(0.5, 0.0));
        assert!(exm1_sequences::<f64>(0).is_err());
    }

    #[test]
    fn exm1_second_gap_is_four_seventeenths() {
        let (a, b) = exm1_sequences::<f64>(2).unwrap();
        let g = matched_zero_gap(&a, &b).unwrap();
        assert!((g[1] - 4.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn matched_gap_errors_and_identity() {
        let (a, _) = exm1_sequences::<f64>(5).unwrap();
        let (b, _) = exm1_sequences::<f64>(4).unwrap();
        assert!(matches!(matched_zero_gap(&a, &b), Err(HplError::LengthMismatch { .. })));
        assert!(matched_zero_gap(&a, &a).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn separation_small_cases() {
        let z = ZeroSequence::from_complex("z", &[p(0.0, 0.0), p(0.5, 0.0)]).unwrap();
        assert!((uniform_separation(&z).unwrap() - 0.5).abs() < 1e-15);
        assert!((carleson_product_bound(&z).unwrap() - 0.5).abs() < 1e-15);
        let rep = ZeroSequence::from_complex("r", &[p(0.2, 0.1), p(0.5, 0.0), p(0.2, 0.1)]).unwrap();
        assert_eq!(uniform_separation(&rep).unwrap(), 0.0);
        assert_eq!(carleson_product_bound(&rep).unwrap(), 0.0);
        let one = ZeroSequence::from_complex("1", &[p(0.2, 0.0)]).unwrap();
        assert!(matches!(uniform_separation(&one), Err(HplError::TooShort { .. })));
        assert!(carleson_product_bound(&one).is_err());
    }

    #[test]
    fn window_bound_small_cases() {
        assert_eq!(carleson_window_bound(&ZeroSequence::<f64>::empty("e"), 5), 0.0);
        let z = ZeroSequence::from_complex("h", &[p(0.5, 0.0)]).unwrap();
        // only the level-1 arc admits the point: 0.75 / 0.5
        assert!((carleson_window_bound(&z, 6) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_separation_cases() {
        let (a, b) = exm1_sequences::<f64>(30).unwrap();
        assert_eq!(zero_separation_condition(&a, &a, 0.9), Infimum::Value(0.0));
        assert!(zero_separation_condition(&a, &b, 0.9).value().unwrap() < 0.05);
        assert_eq!(zero_separation_condition(&a, &b, 1.0 - 1e-12), Infimum::Empty);
        let (a, b) = prop1_sequences::<f64>(30).unwrap();
        let v = zero_separation_condition(&a, &b, 0.9).value().unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn partial_sums_accumulate_gaps() {
        let (a, _) = exm1_sequences::<f64>(4).unwrap();
        assert_eq!(a.blaschke_partial_sums(), vec![0.5, 0.75, 0.875, 0.9375]);
    }

    #[test]
    fn probe_rejects_malformed_grids() {
        let b = BlaschkeProduct::<f64>::monomial(1);
        let tol = ProbeTolerances::default();
        assert!(ProbeGrid::<f64>::from_radii(&[]).is_err());
        assert!(ProbeGrid::from_radii(&[0.5, 0.4]).is_err());
        assert!(ProbeGrid::from_radii(&[0.5, 1.0]).is_err());
        let g = ProbeGrid::from_radii(&[0.5, 0.9]).unwrap();
        assert!(probe_conditions(&b, &b, &g, 4, &tol).is_err());
    }

    #[test]
    fn probe_common_zero_at_origin_violates_c() {
        let b = BlaschkeProduct::<f64>::monomial(1);
        let g = ProbeGrid::from_radii(&[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        let r = probe_conditions(&b, &b, &g, 16, &ProbeTolerances::default()).unwrap();
        for (i, radius) in r.radii.iter().enumerate() {
            assert!((r.min_sum[i] - 2.0 * radius).abs() < 1e-12);
        }
        assert_eq!(r.origin_sum, 0.0);
        assert_eq!(r.verdict("C"), Some(Verdict::ViolatedAtSamples));
    }

    #[test]
    fn f32_instantiation() {
        let d = pseudo_hyperbolic::<f32>(c(0.75, 0.0), c(0.5, 0.0)).unwrap();
        assert!((d - 0.4).abs() < 1e-6);
        let (a, b) = prop1_sequences::<f32>(10).unwrap();
        let g = matched_zero_gap(&a, &b).unwrap();
        assert!((g[9] - 1.0 / 3.0).abs() < 1e-5);
    }
}
