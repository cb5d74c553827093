//! Singular values, rank estimates and the heuristic compactness verdict.
//!
//! Compactness cannot be decided from finitely many sections. The verdict is
//! a label over a table of singular values, and the table is always reported.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HplError, Result};
use crate::operators::TruncatedOperator;
use crate::scalar::{lit, max_of, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactnessVerdict {
    CompactConsistent,
    NoncompactConsistent,
    FiniteRankStable,
    Inconclusive,
}

impl fmt::Display for CompactnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CompactConsistent => "compact-consistent",
            Self::NoncompactConsistent => "noncompact-consistent",
            Self::FiniteRankStable => "finite-rank-stable",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds used by [`compactness_verdict`]; copied into every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralThresholds {
    /// Absolute bound on `|σ_k(N_i) - σ_k(N_(i-1))|` for `σ_k` to count as stable.
    pub stability_tol: f64,
    pub rank_rel_tol: f64,
    pub rank_abs_floor: f64,
    /// Singular values at or above this are counted as "large".
    pub large_sigma: f64,
    /// Decay target relative to `σ_1` for the compact-consistent label.
    pub decay_rel: f64,
    /// Number of leading singular values kept in the table.
    pub top_k: usize,
}

impl Default for SpectralThresholds {
    fn default() -> Self {
        Self { stability_tol: 1e-6, rank_rel_tol: 1e-8, rank_abs_floor: 1e-12, large_sigma: 0.5, decay_rel: 1e-3, top_k: 16 }
    }
}

/// Value of `σ_k` at the largest dim, or a marker when it moved too much.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecayEntry {
    Stable(f64),
    Marker(String),
}

impl DecayEntry {
    pub fn unstable() -> Self {
        Self::Marker("unstable".into())
    }

    pub fn stable_value(&self) -> Option<f64> {
        match self {
            Self::Stable(v) => Some(*v),
            Self::Marker(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub dims: Vec<usize>,
    pub singular_value_table: Vec<Vec<f64>>,
    pub rank_estimates: Vec<usize>,
    pub rank_tolerances: Vec<f64>,
    pub large_counts: Vec<usize>,
    pub decay_summary: Vec<DecayEntry>,
    pub stable_rank: Option<usize>,
    pub verdict: CompactnessVerdict,
    pub heuristic: bool,
    pub thresholds: SpectralThresholds,
}

impl SpectralReport {
    /// `dim,k,sigma` rows with `k` starting at 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,k,sigma\n");
        for (dim, row) in self.dims.iter().zip(&self.singular_value_table) {
            for (k, s) in row.iter().enumerate() {
                out.push_str(&format!("{},{},{:.16e}\n", dim, k + 1, s));
            }
        }
        out
    }
}

/// All singular values, nonincreasing.
pub fn all_singular_values<T: Real>(a: &TruncatedOperator<T>) -> Vec<T> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let svd = a.matrix().clone().svd(false, false);
    let mut s: Vec<T> = svd.singular_values.iter().map(|&v| max_of(v, T::zero())).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// The `top_k` largest singular values, nonincreasing.
pub fn singular_values<T: Real>(a: &TruncatedOperator<T>, top_k: usize) -> Result<Vec<T>> {
    let cap = a.rows().min(a.cols());
    if top_k == 0 || top_k > cap {
        return Err(HplError::Dimension(format!("top_k = {top_k} outside 1..={cap}")));
    }
    let mut s = all_singular_values(a);
    s.truncate(top_k);
    Ok(s)
}

/// Default rank tolerance: `1e-8 σ_1` with absolute floor `1e-12`.
pub fn default_rank_tol<T: Real>(sigma: &[T]) -> T {
    let s1 = sigma.first().copied().unwrap_or_else(T::zero);
    max_of(s1 * lit(1e-8), lit(1e-12))
}

/// Count of singular values above `tol`, or above the default tolerance.
pub fn rank_estimate<T: Real>(a: &TruncatedOperator<T>, tol: Option<T>) -> Result<usize> {
    if let Some(t) = tol {
        if !(t > T::zero()) {
            return Err(HplError::Domain("rank tolerance must be positive".into()));
        }
    }
    let s = all_singular_values(a);
    let tol = tol.unwrap_or_else(|| default_rank_tol(&s));
    Ok(s.iter().filter(|&&v| v > tol).count())
}

/// Singular-value table and verdict for a family of sections.
///
/// Checked in order: finite-rank-stable (equal ranks over the last three dims
/// and `σ_(r+1)` below the rank tolerance at the last two), noncompact
/// (count of `σ ≥ large_sigma` strictly increasing), compact (some `σ_k`
/// below `decay_rel · σ_1` with every earlier index stable). Else inconclusive.
pub fn compactness_verdict<T: Real>(
    family: &[(usize, TruncatedOperator<T>)],
    thresholds: &SpectralThresholds,
) -> Result<SpectralReport> {
    if family.len() < 3 {
        return Err(HplError::InsufficientFamily(format!("need at least 3 dims, got {}", family.len())));
    }
    if family.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(HplError::InsufficientFamily("dims must be strictly increasing".into()));
    }
    let spectra: Vec<Vec<f64>> =
        family.iter().map(|(_, op)| all_singular_values(op).into_iter().map(to_f64).collect()).collect();
    let rank_tolerances: Vec<f64> = spectra
        .iter()
        .map(|s| (s.first().copied().unwrap_or(0.0) * thresholds.rank_rel_tol).max(thresholds.rank_abs_floor))
        .collect();
    let rank_estimates: Vec<usize> =
        spectra.iter().zip(&rank_tolerances).map(|(s, &t)| s.iter().filter(|&&v| v > t).count()).collect();
    let large_counts: Vec<usize> =
        spectra.iter().map(|s| s.iter().filter(|&&v| v >= thresholds.large_sigma).count()).collect();

    let sigma = |i: usize, k: usize| spectra[i].get(k).copied().unwrap_or(0.0);
    let (last, prev) = (spectra.len() - 1, spectra.len() - 2);
    let top_k = thresholds.top_k.max(1);
    let decay_summary: Vec<DecayEntry> = (0..top_k)
        .map(|k| {
            if (sigma(last, k) - sigma(prev, k)).abs() < thresholds.stability_tol {
                DecayEntry::Stable(sigma(last, k))
            } else {
                DecayEntry::unstable()
            }
        })
        .collect();

    let r = rank_estimates[last];
    let ranks_flat = rank_estimates[last - 2..].iter().all(|&x| x == r);
    let tail_small = sigma(last, r) <= rank_tolerances[last] && sigma(prev, r) <= rank_tolerances[prev];
    let stable_rank = (ranks_flat && tail_small).then_some(r);

    let verdict = if stable_rank.is_some() {
        CompactnessVerdict::FiniteRankStable
    } else if large_counts.windows(2).all(|w| w[1] > w[0]) {
        CompactnessVerdict::NoncompactConsistent
    } else {
        let s1 = sigma(last, 0);
        let cut = (0..spectra[last].len()).find(|&k| sigma(last, k) < thresholds.decay_rel * s1);
        let stable_upto = |k: usize| (0..=k).all(|j| (sigma(last, j) - sigma(prev, j)).abs() < thresholds.stability_tol);
        match cut {
            Some(k) if s1 > 0.0 && stable_upto(k) => CompactnessVerdict::CompactConsistent,
            _ => CompactnessVerdict::Inconclusive,
        }
    };

    Ok(SpectralReport {
        dims: family.iter().map(|(d, _)| *d).collect(),
        singular_value_table: spectra.iter().map(|s| s.iter().copied().take(top_k).collect()).collect(),
        rank_estimates,
        rank_tolerances,
        large_counts,
        decay_summary,
        stable_rank,
        verdict,
        heuristic: true,
        thresholds: *thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::CMatrix;
    use crate::scalar::c;

    fn op(rows: usize, cols: usize, data: &[f64]) -> TruncatedOperator<f64> {
        let v: Vec<_> = data.iter().map(|&x| c(x, 0.0)).collect();
        TruncatedOperator::exact(CMatrix::from_row_slice(rows, cols, &v), "t")
    }

    #[test]
    fn small_examples() {
        assert_eq!(singular_values(&op(2, 2, &[0.0; 4]), 2).unwrap(), vec![0.0, 0.0]);
        let s = singular_values(&op(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]), 3).unwrap();
        for (a, b) in s.iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = singular_values(&op(2, 2, &[0.0, 1.0, 0.0, 0.0]), 2).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1].abs() < 1e-15);
        assert!(singular_values(&op(2, 2, &[0.0; 4]), 3).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_estimate(&TruncatedOperator::<f64>::identity(5), None).unwrap(), 5);
        assert_eq!(rank_estimate(&TruncatedOperator::<f64>::zeros(4, 4), None).unwrap(), 0);
        assert!(rank_estimate(&TruncatedOperator::<f64>::zeros(4, 4), Some(0.0)).is_err());
    }

    #[test]
    fn verdicts() {
        let th = SpectralThresholds::default();
        let zeros: Vec<_> = [3, 4, 5].iter().map(|&n| (n, TruncatedOperator::<f64>::zeros(n, n))).collect();
        let rep = compactness_verdict(&zeros, &th).unwrap();
        assert_eq!(rep.verdict, CompactnessVerdict::FiniteRankStable);
        assert_eq!(rep.stable_rank, Some(0));

        let ids: Vec<_> = [3, 4, 5].iter().map(|&n| (n, TruncatedOperator::<f64>::identity(n))).collect();
        assert_eq!(compactness_verdict(&ids, &th).unwrap().verdict, CompactnessVerdict::NoncompactConsistent);

        let diag = |n: usize| {
            let m = CMatrix::from_fn(n, n, |i, j| if i == j { c(0.5f64.powi(2 * i as i32), 0.0) } else { c(0.0, 0.0) });
            (n, TruncatedOperator::exact(m, "d"))
        };
        let fam: Vec<_> = [8, 10, 12].iter().map(|&n| diag(n)).collect();
        let rep = compactness_verdict(&fam, &th).unwrap();
        assert_eq!(rep.verdict, CompactnessVerdict::CompactConsistent, "{rep:?}");

        assert!(compactness_verdict(&ids[..2], &th).is_err());
        let unordered = vec![ids[1].clone(), ids[0].clone(), ids[2].clone()];
        assert!(compactness_verdict(&unordered, &th).is_err());
    }

    #[test]
    fn csv_and_json_shape() {
        let th = SpectralThresholds { top_k: 2, ..Default::default() };
        let ids: Vec<_> = [2, 3, 4].iter().map(|&n| (n, TruncatedOperator::<f64>::identity(n))).collect();
        let rep = compactness_verdict(&ids, &th).unwrap();
        assert_eq!(rep.to_csv().lines().count(), 7);
        let js = serde_json::to_value(&rep).unwrap();
        assert_eq!(js["verdict"], "noncompact-consistent");
        assert_eq!(js["heuristic"], true);
    }
}
