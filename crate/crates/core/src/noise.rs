//! Seeded random sources for payloads and complex AWGN.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic generator for a seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random bits.
pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

/// One circularly-symmetric complex Gaussian sample with variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Adds complex AWGN of the given per-sample variance in place.
pub fn add_awgn<R: Rng + ?Sized>(rng: &mut R, samples: &mut [Complex64], variance: f64) {
    if variance <= 0.0 {
        return;
    }
    for z in samples {
        *z += complex_gaussian(rng, variance);
    }
}

/// Per-sample noise variance for a signal of mean power `power` at `snr_db`.
pub fn noise_variance(power: f64, snr_db: f64) -> f64 {
    power / 10f64.powf(snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_noise() {
        let mut a = vec![Complex64::new(0.0, 0.0); 64];
        let mut b = a.clone();
        add_awgn(&mut seeded(9), &mut a, 0.5);
        add_awgn(&mut seeded(9), &mut b, 0.5);
        assert_eq!(a, b);
    }

    #[test]
    fn noise_power_matches_variance() {
        let mut v = vec![Complex64::new(0.0, 0.0); 200_000];
        add_awgn(&mut seeded(1), &mut v, 0.25);
        let p = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
        assert!((p / 0.25 - 1.0).abs() < 0.01);
        let re = v.iter().map(|z| z.re * z.re).sum::<f64>() / v.len() as f64;
        assert!((re / 0.125 - 1.0).abs() < 0.02);
    }

    #[test]
    fn snr_conversion() {
        assert!((noise_variance(2.0, 10.0) - 0.2).abs() < 1e-15);
        assert_eq!(noise_variance(1.0, 0.0), 1.0);
    }
}
