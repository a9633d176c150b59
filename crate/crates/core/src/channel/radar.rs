use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::RadarChannelConfig;
use crate::dft::Dft;
use crate::error::Result;
use crate::framing::{deserialize, remove_cp, SampleStream, WaveformParams};
use crate::noise::{add_awgn, noise_variance, seeded};

/// Frequency response of a delay of `n_delta` samples, indexed by DFT bin.
///
/// Bin `g` is rotated by `e^{i2π n_Δ ⟨N/2 - g⟩_N / N}`. In time this is a
/// circular convolution with `(1/N) D(n_Δ - κ) e^{-iπκ}`, which leaves the
/// received pilot CIR folded by `e^{-iπn}` until the receiver corrects it.
pub fn delay_response(n_delta: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|g| {
            let q = (n / 2 + n - g) % n;
            Complex64::cis(2.0 * PI * n_delta * q as f64 / n as f64)
        })
        .collect()
}

/// Doppler rotation `e^{i2π k_Δ s / N}` of stream sample `s`.
pub fn doppler_phase(k_delta: f64, sample: usize, n: usize) -> Complex64 {
    // Reduce the integer part of k_Δ·s mod N before scaling to keep the angle small.
    let k_int = k_delta.round();
    let k_frac = k_delta - k_int;
    let int_part = ((k_int as i64).rem_euclid(n as i64) as u128 * sample as u128 % n as u128) as f64;
    let frac_part = (k_frac * sample as f64).rem_euclid(n as f64);
    Complex64::cis(2.0 * PI * (int_part + frac_part) / n as f64)
}

/// Passes a serialized frame through the point-target radar channel.
///
/// Each symbol is delayed circularly, rotated per sample by the target's
/// Doppler shift, scaled by its amplitude and summed over targets. With
/// `snr_db` set, AWGN is added relative to the noise-free received power, or
/// relative to the transmit power when no target returns any energy.
pub fn apply_radar_channel(
    stream: &SampleStream,
    cfg: &RadarChannelConfig,
    params: &WaveformParams,
) -> Result<SampleStream> {
    stream.check_len(params)?;
    cfg.validate(params)?;
    let n = params.n;
    let len = params.symbol_len();
    let n_cp = params.n_cp;

    let core = remove_cp(&deserialize(stream, params)?, n_cp)?;
    let dft = Dft::new(n);
    let mut spectra = core.into_vec();
    spectra.par_chunks_mut(n).for_each(|col| dft.forward(col));

    let mut out = vec![Complex64::new(0.0, 0.0); stream.len()];
    for s in &cfg.scatterers {
        let h = delay_response(s.n_delta, n);
        out.par_chunks_mut(len)
            .zip(spectra.par_chunks(n))
            .enumerate()
            .for_each(|(m, (dst, spec))| {
                let mut buf: Vec<Complex64> = spec.iter().zip(&h).map(|(a, b)| a * b).collect();
                dft.inverse(&mut buf);
                for (j, d) in dst.iter_mut().enumerate() {
                    let src = (j + n - n_cp) % n;
                    *d += s.amplitude * doppler_phase(s.k_delta, m * len + j, n) * buf[src];
                }
            });
    }

    if let Some(snr_db) = cfg.snr_db {
        let rx = SampleStream::new(out, stream.sample_rate_hz);
        let mut power = rx.mean_power();
        if power == 0.0 {
            power = stream.mean_power();
        }
        let mut samples = rx.samples;
        add_awgn(&mut seeded(cfg.rng_seed), &mut samples, noise_variance(power, snr_db));
        return Ok(SampleStream::new(samples, stream.sample_rate_hz));
    }
    Ok(SampleStream::new(out, stream.sample_rate_hz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{direct_channel_reference, Scatterer};
    use crate::framing::{build_pilot_frame, transmit_stream};
    use crate::matrix::ComplexMatrix;
    use crate::noise::complex_gaussian;
    use proptest::prelude::*;

    fn params(n: usize, m: usize, n_cp: usize) -> WaveformParams {
        WaveformParams::new(n, m, n_cp, 1e9, 79e9).unwrap()
    }

    fn random_stream(p: &WaveformParams, seed: u64) -> SampleStream {
        let mut rng = seeded(seed);
        SampleStream::new(
            (0..p.stream_len()).map(|_| complex_gaussian(&mut rng, 1.0)).collect(),
            1e9,
        )
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn circular_shift_with_cp(stream: &SampleStream, p: &WaveformParams, shift: usize) -> Vec<Complex64> {
        let n = p.n;
        let mut out = Vec::new();
        for col in stream.samples.chunks(p.symbol_len()) {
            let core = &col[p.n_cp..];
            let shifted: Vec<_> = (0..n).map(|i| core[(i + n - shift) % n]).collect();
            out.extend_from_slice(&shifted[n - p.n_cp..]);
            out.extend_from_slice(&shifted);
        }
        out
    }

    #[test]
    fn zero_targets_give_zero_output() {
        let p = params(16, 3, 4);
        let out = apply_radar_channel(&random_stream(&p, 1), &RadarChannelConfig::noiseless(vec![]), &p).unwrap();
        assert!(out.samples.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn integer_delay_is_circular_shift() {
        let p = params(32, 3, 8);
        let stream = random_stream(&p, 2);
        for shift in [0usize, 4, 7, 8] {
            let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(shift as f64, 0.0)]);
            let out = apply_radar_channel(&stream, &cfg, &p).unwrap();
            // The modeled delay carries the constant phase e^{iπ n_Δ}.
            let sign = if shift % 2 == 0 { 1.0 } else { -1.0 };
            let expected: Vec<_> = circular_shift_with_cp(&stream, &p, shift)
                .iter()
                .map(|z| z * sign)
                .collect();
            assert!(max_err(&out.samples, &expected) < 1e-10, "shift {shift}");
        }
    }

    #[test]
    fn delayed_pilot_is_shifted_pilot() {
        let p = params(64, 2, 0);
        let stream = transmit_stream(&build_pilot_frame(&p), &p).unwrap();
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(10.0, 0.0)]);
        let out = apply_radar_channel(&stream, &cfg, &p).unwrap();
        assert!(max_err(&out.samples, &circular_shift_with_cp(&stream, &p, 10)) < 1e-12);
    }

    #[test]
    fn matches_term_by_term_reference() {
        let p = params(256, 3, 16);
        let stream = random_stream(&p, 3);
        let s = Scatterer::new(50.0, 0.25).with_amplitude(Complex64::new(0.3, -0.8));
        let out = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![s]), &p).unwrap();
        let reference = direct_channel_reference(&stream, &s, &p).unwrap();
        assert!(max_err(&out.samples, &reference.samples) < 1e-9);

        let s = Scatterer::new(17.3, -0.4);
        let out = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![s]), &p).unwrap();
        let reference = direct_channel_reference(&stream, &s, &p).unwrap();
        assert!(max_err(&out.samples, &reference.samples) < 1e-9);
    }

    #[test]
    fn doppler_only_frame_obeys_frequency_shift() {
        // Integer k_Δ with zero delay: Y_k = X_{k-k_Δ} e^{iπ(2k k_Δ - k_Δ²)/N} e^{iφ_m}.
        let p = params(64, 2, 8);
        let mut rng = seeded(4);
        let x = ComplexMatrix::from_fn(64, 2, |_, _| complex_gaussian(&mut rng, 1.0));
        let stream = transmit_stream(&x, &p).unwrap();
        for kd in [-3i64, 1, 5] {
            let sc = Scatterer::new(0.0, kd as f64);
            let out = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![sc]), &p).unwrap();
            let y = crate::framing::to_fresnel_frame(&remove_cp(&deserialize(&out, &p).unwrap(), 8).unwrap()).unwrap();
            for m in 0..2 {
                let phi = Complex64::cis(sc.symbol_phase(m, &p));
                for k in 0..64i64 {
                    let src = (k - kd).rem_euclid(64) as usize;
                    let ph = Complex64::cis(PI * (2 * k * kd - kd * kd) as f64 / 64.0);
                    let expected = x.get(src, m) * ph * phi;
                    assert!((y.get(k as usize, m) - expected).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let p = params(64, 40, 0);
        let stream = transmit_stream(&build_pilot_frame(&p), &p).unwrap();
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(3.0, 0.0)]);
        let clean = apply_radar_channel(&stream, &cfg, &p).unwrap();
        let a = apply_radar_channel(&stream, &cfg.clone().with_noise(0.0, 11), &p).unwrap();
        let b = apply_radar_channel(&stream, &cfg.clone().with_noise(0.0, 11), &p).unwrap();
        let c = apply_radar_channel(&stream, &cfg.clone().with_noise(0.0, 12), &p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let noise_power = a
            .samples
            .iter()
            .zip(&clean.samples)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            / a.len() as f64;
        assert!((noise_power / clean.mean_power() - 1.0).abs() < 0.05);

        let empty = RadarChannelConfig::noiseless(vec![]).with_noise(10.0, 1);
        let noise_only = apply_radar_channel(&stream, &empty, &p).unwrap();
        assert!((noise_only.mean_power() / (stream.mean_power() / 10.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn doppler_phase_reduction_matches_plain_angle() {
        for (k, s) in [(0.25, 1000usize), (-0.5, 77), (1.0, 513), (-3.3, 12_345)] {
            let plain = Complex64::cis(2.0 * PI * k * s as f64 / 256.0);
            assert!((doppler_phase(k, s, 256) - plain).norm() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn output_is_linear_in_targets(
            n1 in 0.0f64..31.0, k1 in -0.5f64..0.5,
            n2 in 0.0f64..31.0, k2 in -0.5f64..0.5,
            seed in any::<u64>(),
        ) {
            let p = params(32, 2, 4);
            let stream = random_stream(&p, seed);
            let a = Scatterer::new(n1, k1);
            let b = Scatterer::new(n2, k2).with_amplitude(Complex64::new(0.0, 0.7));
            let both = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![a, b]), &p).unwrap();
            let ya = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![a]), &p).unwrap();
            let yb = apply_radar_channel(&stream, &RadarChannelConfig::noiseless(vec![b]), &p).unwrap();
            let sum: Vec<_> = ya.samples.iter().zip(&yb.samples).map(|(x, y)| x + y).collect();
            prop_assert!(max_err(&both.samples, &sum) < 1e-10);
        }
    }
}
