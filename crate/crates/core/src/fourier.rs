//! Fourier coefficient machinery for symbols on the circle.
//!
//! A [`FourierSymbol`] is a finite window of Laurent coefficients together
//! with an l1 bound `tail_bound` on everything outside the window. Exact
//! trigonometric polynomials carry a zero tail; truncated expansions of
//! Blaschke products carry a rigorous majorant bound.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{HplError, Result};
use crate::scalar::{c, cabs, cis, conj, czero, from_usize, lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactPolynomial,
    TruncatedAnalytic,
    Transformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    /// Pointwise complex conjugate on the circle: `n -> conj(f(-n))`.
    Conjugate,
    /// `f(conj z)` on the circle: `n -> f(-n)`.
    Tilde,
    /// `conj(f)(conj z)`: `n -> conj(f(n))`.
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol<T: Real> {
    /// Index of `coeffs[0]`.
    lo: i64,
    coeffs: Vec<Complex<T>>,
    tail_bound: T,
    provenance: Provenance,
}

impl<T: Real> FourierSymbol<T> {
    fn build(lo: i64, coeffs: Vec<Complex<T>>, tail_bound: T, provenance: Provenance) -> Self {
        let mut s = Self { lo, coeffs, tail_bound, provenance };
        s.trim();
        s
    }

    pub fn zero() -> Self {
        Self::build(0, Vec::new(), T::zero(), Provenance::ExactPolynomial)
    }

    /// Exact trigonometric polynomial from `(index, value)` pairs.
    /// Repeated indices are summed.
    pub fn from_entries(entries: &[(i64, Complex<T>)]) -> Self {
        if entries.is_empty() {
            return Self::zero();
        }
        let lo = entries.iter().map(|e| e.0).min().unwrap();
        let hi = entries.iter().map(|e| e.0).max().unwrap();
        let mut coeffs = vec![czero(); (hi - lo + 1) as usize];
        for &(n, v) in entries {
            coeffs[(n - lo) as usize] += v;
        }
        Self::build(lo, coeffs, T::zero(), Provenance::ExactPolynomial)
    }

    /// `z^n` on the circle (negative `n` gives powers of `conj z`).
    pub fn monomial(n: i64) -> Self {
        Self::from_entries(&[(n, c(T::one(), T::zero()))])
    }

    pub fn constant(v: Complex<T>) -> Self {
        Self::from_entries(&[(0, v)])
    }

    /// Contiguous coefficients starting at index `lo`, with an explicit tail.
    pub fn from_dense(lo: i64, coeffs: Vec<Complex<T>>, tail_bound: T, provenance: Provenance) -> Self {
        Self::build(lo, coeffs, tail_bound, provenance)
    }

    fn trim(&mut self) {
        let zero = czero::<T>();
        while self.coeffs.last() == Some(&zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&v| v == zero).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.lo = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
    }

    pub fn coeff(&self, n: i64) -> Complex<T> {
        let k = n - self.lo;
        if k < 0 || k >= self.coeffs.len() as i64 {
            czero()
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Lowest stored index (0 for the zero symbol).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored index (`lo - 1` for the zero symbol).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Smallest `W` with every stored index in `[-W, W]`.
    pub fn window(&self) -> u64 {
        if self.coeffs.is_empty() {
            0
        } else {
            self.lo.unsigned_abs().max(self.hi().unsigned_abs())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.tail_bound == T::zero()
    }

    /// No stored negative coefficients.
    pub fn is_analytic(&self) -> bool {
        self.coeffs.is_empty() || self.lo >= 0
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Nonzero-window entries in increasing index order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.coeffs.iter().enumerate().map(move |(k, &v)| (self.lo + k as i64, v))
    }

    /// l1 norm of the stored coefficients.
    pub fn l1_stored(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &v| acc + cabs(v))
    }

    /// Upper bound on the l1 norm of the full coefficient sequence.
    pub fn l1_bound(&self) -> T {
        self.l1_stored() + self.tail_bound
    }

    /// Upper bound on `sum_{|n| >= s} |f(n)|`.
    pub fn l1_tail_from(&self, s: u64) -> T {
        self.entries()
            .filter(|(n, _)| n.unsigned_abs() >= s)
            .fold(self.tail_bound, |acc, (_, v)| acc + cabs(v))
    }

    pub fn sum_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &v| acc + v.norm_sqr())
    }

    pub fn to_record(&self) -> FourierSymbolRecord {
        FourierSymbolRecord {
            window: self.window(),
            entries: self
                .entries()
                .map(|(n, v)| (n, to_f64(v.re), to_f64(v.im)))
                .collect(),
            tail_bound: to_f64(self.tail_bound),
            provenance: self.provenance,
        }
    }

    pub fn from_record(rec: &FourierSymbolRecord) -> Self {
        let entries: Vec<(i64, Complex<T>)> = rec
            .entries
            .iter()
            .map(|&(n, re, im)| (n, c(lit(re), lit(im))))
            .collect();
        let mut s = Self::from_entries(&entries);
        s.tail_bound = lit(rec.tail_bound);
        s.provenance = rec.provenance;
        s
    }

    /// `n,re,im` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im\n");
        for (n, v) in self.entries() {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", n, to_f64(v.re), to_f64(v.im)));
        }
        out
    }
}

/// Serialized form of a [`FourierSymbol`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSymbolRecord {
    pub window: u64,
    pub entries: Vec<(i64, f64, f64)>,
    pub tail_bound: f64,
    pub provenance: Provenance,
}

/// Taylor coefficients `0..n` of a finite Blaschke product.
///
/// Each normalized factor is applied to the running series as
/// multiplication by `|a| - e^{-i arg a} z` followed by division by
/// `1 - conj(a) z`. The tail bound comes from the majorant
/// `prod (|a| + (1 - |a|^2) z / (1 - |a| z))`, whose value at 1 is
/// `prod (1 + 2|a|)`.
pub fn taylor_coeffs<T: Real>(b: &BlaschkeProduct<T>, n: usize) -> Result<FourierSymbol<T>> {
    if n == 0 {
        return Err(HplError::Truncation("need at least one Taylor coefficient".into()));
    }
    let mut series = vec![czero::<T>(); n];
    series[0] = b.constant();
    let mut majorant = vec![T::zero(); n];
    majorant[0] = T::one();
    let mut majorant_at_one = T::one();
    let zeros = b.factor_zeros();
    for a in &zeros {
        if a.is_origin() {
            series.rotate_right(1);
            series[0] = czero();
            majorant.rotate_right(1);
            majorant[0] = T::zero();
            continue;
        }
        let r = a.modulus();
        let phase = cis(-a.angle());
        let abar = phase * r;
        let mut prev_s = czero::<T>();
        let mut prev_u = czero::<T>();
        let mut prev_m = T::zero();
        let mut prev_mu = T::zero();
        let slope = T::one() - lit::<T>(2.0) * r * r;
        for k in 0..n {
            let t = series[k] * r - phase * prev_s;
            prev_s = series[k];
            let u = t + abar * prev_u;
            series[k] = u;
            prev_u = u;

            let tm = majorant[k] * r + slope * prev_m;
            prev_m = majorant[k];
            let mu = tm + r * prev_mu;
            majorant[k] = mu;
            prev_mu = mu;
        }
        majorant_at_one *= T::one() + lit::<T>(2.0) * r;
    }

    let (tail, provenance) = if b.is_monomial() {
        let tail = if n > b.degree() { T::zero() } else { T::one() };
        (tail, Provenance::ExactPolynomial)
    } else {
        let head = majorant.iter().fold(T::zero(), |acc, &m| acc + m);
        let gap = majorant_at_one - head;
        let gap = if gap > T::zero() { gap } else { T::zero() };
        let slack = lit::<T>(4.0) * from_usize::<T>(n + zeros.len()) * T::unit_roundoff() * majorant_at_one;
        (gap + slack, Provenance::TruncatedAnalytic)
    };
    Ok(FourierSymbol::build(0, series, tail, provenance))
}

pub fn transform<T: Real>(f: &FourierSymbol<T>, kind: TransformKind) -> FourierSymbol<T> {
    let provenance = match f.provenance {
        Provenance::ExactPolynomial => Provenance::ExactPolynomial,
        _ => Provenance::Transformed,
    };
    let coeffs: Vec<Complex<T>> = match kind {
        TransformKind::Conjugate => f.coeffs.iter().rev().map(|&v| conj(v)).collect(),
        TransformKind::Tilde => f.coeffs.iter().rev().copied().collect(),
        TransformKind::Star => f.coeffs.iter().map(|&v| conj(v)).collect(),
    };
    let lo = match kind {
        TransformKind::Star => f.lo,
        _ => -f.hi(),
    };
    if f.coeffs.is_empty() {
        return FourierSymbol::build(0, Vec::new(), f.tail_bound, provenance);
    }
    FourierSymbol::build(lo, coeffs, f.tail_bound, provenance)
}

/// Windowed convolution of two symbols; tails combine as
/// `|f|_1 tau_g + |g|_1 tau_f + tau_f tau_g`.
pub fn product_symbol<T: Real>(f: &FourierSymbol<T>, g: &FourierSymbol<T>) -> FourierSymbol<T> {
    let tail = f.l1_stored() * g.tail_bound + g.l1_stored() * f.tail_bound + f.tail_bound * g.tail_bound;
    let provenance = if f.provenance == Provenance::ExactPolynomial && g.provenance == Provenance::ExactPolynomial {
        Provenance::ExactPolynomial
    } else {
        Provenance::Transformed
    };
    if f.coeffs.is_empty() || g.coeffs.is_empty() {
        return FourierSymbol::build(0, Vec::new(), tail, provenance);
    }
    let mut out = vec![czero::<T>(); f.coeffs.len() + g.coeffs.len() - 1];
    for (i, &a) in f.coeffs.iter().enumerate() {
        for (j, &b) in g.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    FourierSymbol::build(f.lo + g.lo, out, tail, provenance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples<T: Real> {
    pub values: Vec<Complex<T>>,
    /// Set when fewer than `2W + 1` points were requested.
    pub aliased: bool,
}

/// `sum_n f(n) e^{i n theta_j}` at `theta_j = 2 pi j / k`.
pub fn boundary_samples<T: Real>(f: &FourierSymbol<T>, k: usize) -> Result<BoundarySamples<T>> {
    if k == 0 {
        return Err(HplError::Grid("need at least one boundary sample".into()));
    }
    let kf = from_usize::<T>(k);
    let twiddle: Vec<Complex<T>> = (0..k)
        .map(|m| cis(T::two_pi() * from_usize::<T>(m) / kf))
        .collect();
    let kk = k as i64;
    let values = (0..kk)
        .map(|j| {
            f.entries().fold(czero::<T>(), |acc, (n, v)| {
                acc + v * twiddle[(n * j).rem_euclid(kk) as usize]
            })
        })
        .collect();
    let aliased = (k as u64) < 2 * f.window() + 1;
    Ok(BoundarySamples { values, aliased })
}
