//! Discrete Fresnel transform pair, its FFT factorization, phase-folding
//! correction and the Dirichlet kernel.
//!
//! The scaling convention is `Y_k = e^{-iπ/4} Σ_n x_n e^{iπ(n-k)²/N}` for the
//! forward transform and `x_n = (1/N) e^{iπ/4} Σ_k X_k e^{-iπ(n-k)²/N}` for the
//! inverse, so the forward transform scales energy by `N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Distance below which `a mod N` is treated as zero by [`dirichlet_kernel`].
pub const DIRICHLET_SINGULARITY: f64 = 1e-9;

pub(crate) fn check_len(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(
            "N",
            format!("transform length must be even and positive, got {n}"),
        ));
    }
    Ok(())
}

/// Quadratic phase vector `Γ_k = e^{-iπk²/N}` used by the fast transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaVector {
    values: Vec<Complex64>,
}

impl GammaVector {
    pub fn new(n: usize) -> Result<Self> {
        check_len(n)?;
        let table = chirp_table(n);
        let values = (0..n).map(|k| table[(k * k) % (2 * n)].conj()).collect();
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }
}

/// `e^{iπm/N}` for `m` in `0..2N`; indexing by `d² mod 2N` keeps the phase exact.
fn chirp_table(n: usize) -> Vec<Complex64> {
    (0..2 * n).map(|m| Complex64::cis(PI * m as f64 / n as f64)).collect()
}

fn sq_mod(d: usize, modulus: usize) -> usize {
    (d * d) % modulus
}

/// Reference O(N²) forward transform.
pub fn dfnt_direct(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    check_len(n)?;
    let table = chirp_table(n);
    let front = Complex64::cis(-PI / 4.0);
    Ok((0..n)
        .map(|k| {
            let acc: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, &xi)| xi * table[sq_mod(i.abs_diff(k), 2 * n)])
                .sum();
            front * acc
        })
        .collect())
}

/// Reference O(N²) inverse transform.
pub fn idfnt_direct(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    check_len(n)?;
    let table = chirp_table(n);
    let front = Complex64::cis(PI / 4.0) / n as f64;
    Ok((0..n)
        .map(|i| {
            let acc: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, &xk)| xk * table[sq_mod(i.abs_diff(k), 2 * n)].conj())
                .sum();
            front * acc
        })
        .collect())
}

/// Planned fast transform of a fixed even length.
///
/// The forward transform is computed as `N^{-1/2} · IDFT(DFT(x) · Γ)` and the
/// inverse as `N^{-3/2} · IDFT(DFT(X) · Γ*)` with unnormalized DFTs.
#[derive(Clone)]
pub struct FresnelTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    gamma: GammaVector,
}

impl std::fmt::Debug for FresnelTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FresnelTransform").field("n", &self.n).finish()
    }
}

impl FresnelTransform {
    pub fn new(n: usize) -> Result<Self> {
        let gamma = GammaVector::new(n)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            gamma,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn gamma(&self) -> &GammaVector {
        &self.gamma
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                field: "transform input",
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf.len())?;
        self.fft.process(buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        for (z, g) in buf.iter_mut().zip(self.gamma.as_slice()) {
            *z *= g * scale;
        }
        self.ifft.process(buf);
        Ok(())
    }

    /// In-place inverse transform.
    pub fn inverse(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf.len())?;
        self.fft.process(buf);
        let scale = (self.n as f64).powf(-1.5);
        for (z, g) in buf.iter_mut().zip(self.gamma.as_slice()) {
            *z *= g.conj() * scale;
        }
        self.ifft.process(buf);
        Ok(())
    }

    /// Forward transform of every column, columns processed in parallel.
    pub fn forward_frame(&self, frame: &mut ComplexMatrix) -> Result<()> {
        self.check(frame.rows())?;
        let n = self.n;
        frame
            .as_mut_slice()
            .par_chunks_mut(n)
            .try_for_each(|col| self.forward(col))
    }

    /// Inverse transform of every column, columns processed in parallel.
    pub fn inverse_frame(&self, frame: &mut ComplexMatrix) -> Result<()> {
        self.check(frame.rows())?;
        let n = self.n;
        frame
            .as_mut_slice()
            .par_chunks_mut(n)
            .try_for_each(|col| self.inverse(col))
    }
}

/// Fast forward transform of a single vector.
pub fn dfnt_fast(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = FresnelTransform::new(x.len())?;
    let mut out = x.to_vec();
    plan.forward(&mut out)?;
    Ok(out)
}

/// Fast inverse transform of a single vector.
pub fn idfnt_fast(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = FresnelTransform::new(x.len())?;
    let mut out = x.to_vec();
    plan.inverse(&mut out)?;
    Ok(out)
}

/// Multiplies row `k` by `e^{iπk}`, undoing the `N/2` discrete-frequency fold.
pub fn phase_fold_correct(y: &ComplexMatrix) -> ComplexMatrix {
    let mut out = y.clone();
    phase_fold_correct_in_place(&mut out);
    out
}

/// In-place variant of [`phase_fold_correct`].
pub fn phase_fold_correct_in_place(y: &mut ComplexMatrix) {
    for col in y.columns_mut() {
        for z in col.iter_mut().skip(1).step_by(2) {
            *z = -*z;
        }
    }
}

/// Finite geometric series `Σ_{n=0}^{N-1} e^{i2πan/N}`.
pub fn dirichlet_kernel(a: f64, n: usize) -> Complex64 {
    let nf = n as f64;
    let r = a.rem_euclid(nf);
    if r.min(nf - r) < DIRICHLET_SINGULARITY {
        return Complex64::new(nf, 0.0);
    }
    Complex64::cis(PI * a * (nf - 1.0) / nf) * ((PI * a).sin() / (PI * a / nf).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn delta(n: usize, at: usize) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); n];
        v[at] = c(1.0, 0.0);
        v
    }

    // Independent definition-level evaluation with plain trig on (n-k)².
    fn dfnt_naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len() as f64;
        (0..x.len())
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, xi)| {
                        let d = i as f64 - k as f64;
                        xi * Complex64::cis(PI * d * d / n)
                    })
                    .sum::<Complex64>()
                    * Complex64::cis(-PI / 4.0)
            })
            .collect()
    }

    #[test]
    fn delta_at_origin_n4() {
        let y = dfnt_direct(&delta(4, 0)).unwrap();
        let expected = [
            Complex64::cis(-PI / 4.0),
            c(1.0, 0.0),
            Complex64::cis(3.0 * PI / 4.0),
            c(1.0, 0.0),
        ];
        assert!(max_err(&y, &expected) < 1e-12);
        assert!(max_err(&dfnt_fast(&delta(4, 0)).unwrap(), &expected) < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let y = dfnt_direct(&[c(0.0, 0.0); 4]).unwrap();
        assert!(y.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn odd_and_zero_lengths_rejected() {
        assert!(dfnt_direct(&[c(1.0, 0.0); 3]).is_err());
        assert!(idfnt_direct(&[]).is_err());
        assert!(dfnt_fast(&[c(1.0, 0.0); 5]).is_err());
        assert!(idfnt_fast(&[c(1.0, 0.0); 7]).is_err());
        assert!(FresnelTransform::new(0).is_err());
    }

    #[test]
    fn direct_matches_naive_definition() {
        let x = random_vec(32, 3);
        assert!(max_err(&dfnt_direct(&x).unwrap(), &dfnt_naive(&x)) < 1e-11);
    }

    #[test]
    fn inverse_of_delta_is_constant_envelope_chirp() {
        let n = 16;
        let x = idfnt_direct(&delta(n, 0)).unwrap();
        for (i, z) in x.iter().enumerate() {
            let expected = Complex64::cis(PI / 4.0 - PI * (i * i) as f64 / n as f64) / n as f64;
            assert!((z - expected).norm() < 1e-14);
            assert!((z.norm() - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn direct_round_trip() {
        let x = random_vec(64, 1);
        let back = dfnt_direct(&idfnt_direct(&x).unwrap()).unwrap();
        assert!(max_err(&back, &x) < 1e-10);
    }

    #[test]
    fn fast_matches_direct_n8_and_n256() {
        for (n, seed) in [(8, 5), (16, 6), (256, 7)] {
            let x = random_vec(n, seed);
            assert!(max_err(&dfnt_fast(&x).unwrap(), &dfnt_direct(&x).unwrap()) < 1e-9);
            assert!(max_err(&idfnt_fast(&x).unwrap(), &idfnt_direct(&x).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn non_power_of_two_length() {
        let x = random_vec(90, 11);
        assert!(max_err(&dfnt_fast(&x).unwrap(), &dfnt_direct(&x).unwrap()) < 1e-9);
    }

    #[test]
    fn inverse_via_conjugate_symmetry() {
        // IDFnT(X) = conj(DFnT(conj(X))) / N
        let n = 16;
        let x = random_vec(n, 9);
        let conj_in: Vec<_> = x.iter().map(|z| z.conj()).collect();
        let via: Vec<_> = dfnt_fast(&conj_in)
            .unwrap()
            .iter()
            .map(|z| z.conj() / n as f64)
            .collect();
        assert!(max_err(&idfnt_direct(&x).unwrap(), &via) < 1e-10);
    }

    #[test]
    fn gamma_vector_properties() {
        let g = GammaVector::new(64).unwrap();
        assert_eq!(g.as_slice()[0], c(1.0, 0.0));
        assert!(g.as_slice().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let expected = Complex64::cis(-PI * 9.0 / 64.0);
        assert!((g.as_slice()[3] - expected).norm() < 1e-15);
    }

    #[test]
    fn fold_correct_rows() {
        let y = ComplexMatrix::from_fn(4, 2, |r, _| c(r as f64 + 1.0, 0.5));
        let z = phase_fold_correct(&y);
        assert_eq!(z.get(0, 0), y.get(0, 0));
        assert_eq!(z.get(1, 1), -y.get(1, 1));
        assert_eq!(z.get(2, 0), y.get(2, 0));
        assert_eq!(phase_fold_correct(&z), y);
    }

    #[test]
    fn fold_shift_route_matches_row_multiply() {
        // Receiver variant: shift the Γ-weighted spectrum by N/2 before the IDFT.
        let n = 32;
        let x = random_vec(n, 4);
        let mut planner = FftPlanner::new();
        let mut spec = x.clone();
        planner.plan_fft_forward(n).process(&mut spec);
        let g = GammaVector::new(n).unwrap();
        let weighted: Vec<_> = spec.iter().zip(g.as_slice()).map(|(a, b)| a * b).collect();
        let mut shifted: Vec<_> = (0..n).map(|i| weighted[(i + n / 2) % n]).collect();
        planner.plan_fft_inverse(n).process(&mut shifted);
        for z in shifted.iter_mut() {
            *z /= (n as f64).sqrt();
        }
        let y = ComplexMatrix::from_col_major(n, 1, dfnt_fast(&x).unwrap()).unwrap();
        let corrected = phase_fold_correct(&y);
        assert!(max_err(corrected.column(0), &shifted) < 1e-10);
    }

    #[test]
    fn dirichlet_examples() {
        assert!((dirichlet_kernel(0.0, 8) - c(8.0, 0.0)).norm() < 1e-15);
        assert!(dirichlet_kernel(4.0, 8).norm() < 1e-12);
        let sum: Complex64 = (0..8).map(|n| Complex64::cis(2.0 * PI * 0.5 * n as f64 / 8.0)).sum();
        assert!((dirichlet_kernel(0.5, 8) - sum).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_at_multiples_matches_sum() {
        for a in [8.0, -8.0, 16.0, 1e-10, 8.0 + 1e-7] {
            let sum: Complex64 = (0..8).map(|n| Complex64::cis(2.0 * PI * a * n as f64 / 8.0)).sum();
            assert!((dirichlet_kernel(a, 8) - sum).norm() < 1e-6, "a = {a}");
        }
    }

    #[test]
    fn frame_transforms_match_vector_transforms() {
        let n = 16;
        let plan = FresnelTransform::new(n).unwrap();
        let cols: Vec<_> = (0..3).map(|s| random_vec(n, 20 + s)).collect();
        let mut frame = ComplexMatrix::from_columns(&cols).unwrap();
        plan.forward_frame(&mut frame).unwrap();
        for (j, col) in cols.iter().enumerate() {
            assert!(max_err(frame.column(j), &dfnt_direct(col).unwrap()) < 1e-10);
        }
        plan.inverse_frame(&mut frame).unwrap();
        for (j, col) in cols.iter().enumerate() {
            assert!(max_err(frame.column(j), col) < 1e-12);
        }
    }

    #[test]
    fn fast_path_beats_direct_at_2048() {
        use std::time::Instant;
        let n = 2048;
        let mut pilot = vec![c(0.0, 0.0); n];
        pilot[0] = c(1.0, 0.0);
        let x = idfnt_fast(&pilot).unwrap();
        let plan = FresnelTransform::new(n).unwrap();
        let t0 = Instant::now();
        let direct = dfnt_direct(&x).unwrap();
        let t_direct = t0.elapsed();
        let reps = 200;
        let t1 = Instant::now();
        let mut buf = x.clone();
        for _ in 0..reps {
            buf.copy_from_slice(&x);
            plan.forward(&mut buf).unwrap();
        }
        let t_fast = t1.elapsed() / reps;
        assert!(max_err(&buf, &direct) < 1e-9);
        assert!(t_direct > t_fast * 100, "direct {t_direct:?} vs fast {t_fast:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip_any_even_length(half in 1usize..=2048, seed in any::<u64>()) {
            let n = 2 * half;
            let x = random_vec(n, seed);
            let plan = FresnelTransform::new(n).unwrap();
            let mut buf = x.clone();
            plan.inverse(&mut buf).unwrap();
            plan.forward(&mut buf).unwrap();
            prop_assert!(max_err(&buf, &x) < 1e-9);
        }

        #[test]
        fn fast_equals_direct(n in prop::sample::select(vec![4usize, 8, 64, 256]), seed in any::<u64>()) {
            let x = random_vec(n, seed);
            prop_assert!(max_err(&dfnt_fast(&x).unwrap(), &dfnt_direct(&x).unwrap()) < 1e-9);
            prop_assert!(max_err(&idfnt_fast(&x).unwrap(), &idfnt_direct(&x).unwrap()) < 1e-9);
        }

        #[test]
        fn forward_energy_scales_by_n(half in 1usize..=512, seed in any::<u64>()) {
            let n = 2 * half;
            let x = random_vec(n, seed);
            let e_in: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            let e_out: f64 = dfnt_fast(&x).unwrap().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((e_out - n as f64 * e_in).abs() <= 1e-9 * e_out.max(1.0));
        }

        #[test]
        fn fold_correct_is_involution(rows in 1usize..16, cols in 1usize..4, seed in any::<u64>()) {
            let v = random_vec(rows * cols, seed);
            let m = ComplexMatrix::from_col_major(rows, cols, v).unwrap();
            prop_assert_eq!(phase_fold_correct(&phase_fold_correct(&m)), m);
        }

        #[test]
        fn dirichlet_matches_term_sum(a in -20.0f64..20.0, n in 1usize..64) {
            let sum: Complex64 = (0..n)
                .map(|i| Complex64::cis(2.0 * PI * a * i as f64 / n as f64))
                .sum();
            prop_assert!((dirichlet_kernel(a, n) - sum).norm() < 1e-8);
        }
    }
}
