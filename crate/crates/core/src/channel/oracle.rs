use std::f64::consts::PI;

use num_complex::Complex64;

use super::{RadarChannelConfig, Scatterer};
use crate::error::Result;
use crate::framing::{deserialize, SampleStream, WaveformParams};
use crate::fresnel::dirichlet_kernel;
use crate::matrix::ComplexMatrix;
use crate::rxproc::{CirMatrix, CirMode};

const INTEGER_TOLERANCE: f64 = 1e-12;

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < INTEGER_TOLERANCE).then_some(r as i64)
}

/// Folded delay kernel `(1/N) D(n_Δ - κ) e^{-iπκ}`.
fn delay_kernel(n_delta: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let fold = if k % 2 == 0 { 1.0 } else { -1.0 };
            dirichlet_kernel(n_delta - k as f64, n) * (fold / n as f64)
        })
        .collect()
}

fn quad_phase(a: usize, b: usize, n: usize) -> Complex64 {
    // e^{iπ(a² - b²)/N} with the squares reduced mod 2N.
    let m = 2 * n;
    let d = ((a * a) % m + m - (b * b) % m) % m;
    Complex64::cis(PI * d as f64 / n as f64)
}

/// Term-by-term evaluation of the delayed, Doppler-shifted received stream for
/// one scatterer, used as an independent reference for the channel model.
pub fn direct_channel_reference(stream: &SampleStream, s: &Scatterer, params: &WaveformParams) -> Result<SampleStream> {
    let frame = deserialize(stream, params)?;
    let n = params.n;
    let n_cp = params.n_cp;
    let len = params.symbol_len();
    let kernel = delay_kernel(s.n_delta, n);
    let mut out = Vec::with_capacity(stream.len());
    for m in 0..params.m {
        let x = &frame.column(m)[n_cp..];
        let core: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|v| x[v] * kernel[(i + n - v) % n]).sum())
            .collect();
        for j in 0..len {
            let angle = 2.0 * PI * s.k_delta * (m * len + j) as f64 / n as f64;
            out.push(s.amplitude * Complex64::cis(angle) * core[(j + n - n_cp) % n]);
        }
    }
    Ok(SampleStream::new(out, stream.sample_rate_hz))
}

/// Ideal radar CIR `Σ_η a_η (1/N) D(n_Δ - n) e^{i2πk_Δ n/N} e^{iφ_m}`.
///
/// For an integer delay the column is `δ[n - n_Δ]` scaled by the Doppler terms.
pub fn ideal_cir_oracle(cfg: &RadarChannelConfig, params: &WaveformParams) -> CirMatrix {
    let n = params.n;
    let mut out = ComplexMatrix::zeros(n, params.m);
    for s in &cfg.scatterers {
        let profile: Vec<Complex64> = (0..n)
            .map(|i| {
                dirichlet_kernel(s.n_delta - i as f64, n) / n as f64
                    * Complex64::cis(2.0 * PI * s.k_delta * i as f64 / n as f64)
            })
            .collect();
        accumulate(&mut out, &profile, s, params);
    }
    CirMatrix::new(out, CirMode::Siso)
}

/// Phase-corrected CIR a pilot frame produces through the channel, including
/// delay-Doppler coupling.
///
/// Fractional shifts use the double sum
/// `e^{iπn} (e^{iφ_m}/N) Σ_κ h_κ e^{iπ(n²-κ²)/N} D(k_Δ - n + κ)` with the folded
/// kernel `h_κ`. Integer shifts reduce to
/// `δ[⟨n - (n_Δ + k_Δ)⟩_N] e^{iφ_m} e^{iπ(2n k_Δ - k_Δ² + N k_Δ)/N}`.
pub fn biased_cir_oracle(cfg: &RadarChannelConfig, params: &WaveformParams) -> CirMatrix {
    let n = params.n;
    let mut out = ComplexMatrix::zeros(n, params.m);
    for s in &cfg.scatterers {
        let profile = match (near_integer(s.n_delta), near_integer(s.k_delta)) {
            (Some(nd), Some(kd)) => integer_profile(nd, kd, n),
            _ => coupled_profile(s, n),
        };
        accumulate(&mut out, &profile, s, params);
    }
    CirMatrix::new(out, CirMode::Siso)
}

fn integer_profile(nd: i64, kd: i64, n: usize) -> Vec<Complex64> {
    let ni = n as i64;
    let peak = (nd + kd).rem_euclid(ni) as usize;
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let exponent = (2 * peak as i64 * kd - kd * kd + ni * kd).rem_euclid(2 * ni);
    v[peak] = Complex64::cis(PI * exponent as f64 / n as f64);
    v
}

fn coupled_profile(s: &Scatterer, n: usize) -> Vec<Complex64> {
    let kernel = delay_kernel(s.n_delta, n);
    (0..n)
        .map(|i| {
            let acc: Complex64 = kernel
                .iter()
                .enumerate()
                .map(|(k, h)| h * quad_phase(i, k, n) * dirichlet_kernel(s.k_delta - i as f64 + k as f64, n))
                .sum();
            let fold = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc * (fold / n as f64)
        })
        .collect()
}

fn accumulate(out: &mut ComplexMatrix, profile: &[Complex64], s: &Scatterer, params: &WaveformParams) {
    for m in 0..params.m {
        let ph = s.amplitude * Complex64::cis(s.symbol_phase(m, params));
        for (dst, p) in out.column_mut(m).iter_mut().zip(profile) {
            *dst += p * ph;
        }
    }
}
