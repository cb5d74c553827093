//! Seeded test corpora shared by `verify`, `rank` and the acceptance suite.

use std::f64::consts::TAU;

use hpl_core::blaschke::BlaschkeProduct;
use hpl_core::fourier::FourierSymbol;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Laurent polynomial with coefficients on `[-band, band]`, real and
/// imaginary parts uniform in `[-1, 1]`.
pub fn random_band_symbol(rng: &mut ChaCha8Rng, band: i64) -> FourierSymbol<f64> {
    let entries: Vec<(i64, Complex<f64>)> = (-band..=band)
        .map(|n| (n, Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    FourierSymbol::from_entries(&entries)
}

/// Pairs of symbols with independent bands drawn from `0..=max_band`.
pub fn toeplitz_pairs(seed: u64, count: usize, max_band: i64) -> Vec<(FourierSymbol<f64>, FourierSymbol<f64>)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let bf = r.random_range(0..=max_band);
            let bg = r.random_range(0..=max_band);
            (random_band_symbol(&mut r, bf), random_band_symbol(&mut r, bg))
        })
        .collect()
}

/// Finite Blaschke product with `degree` zeros of modulus in `[0.05, max_modulus]`.
pub fn random_blaschke(rng: &mut ChaCha8Rng, degree: usize, max_modulus: f64) -> BlaschkeProduct<f64> {
    let zeros: Vec<Complex<f64>> = (0..degree)
        .map(|_| Complex::from_polar(rng.random_range(0.05..max_modulus), rng.random_range(0.0..TAU)))
        .collect();
    BlaschkeProduct::from_complex_zeros("random", &zeros).expect("moduli are below 1")
}

/// Pairs of degree 1 or 2 with zeros of modulus at most `max_modulus`.
pub fn blaschke_pairs(seed: u64, count: usize, max_modulus: f64) -> Vec<(BlaschkeProduct<f64>, BlaschkeProduct<f64>)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = r.random_range(1..=2);
            let q = r.random_range(1..=2);
            (random_blaschke(&mut r, p, max_modulus), random_blaschke(&mut r, q, max_modulus))
        })
        .collect()
}

/// Fixed, RNG-free zeros for `rank`: moduli cycle through 0.25, 0.4, 0.55
/// and angles are spread around the circle, shifted by the variable index.
pub fn generated_blaschke(degree: usize, variable: usize) -> BlaschkeProduct<f64> {
    let zeros: Vec<Complex<f64>> = (0..degree)
        .map(|k| {
            let r = 0.25 + 0.15 * (k % 3) as f64;
            let theta = TAU * k as f64 / degree as f64 + 0.6 * variable as f64 + 0.3;
            Complex::from_polar(r, theta)
        })
        .collect();
    BlaschkeProduct::from_complex_zeros(&format!("gen{degree}v{variable}"), &zeros).expect("moduli are below 1")
}
