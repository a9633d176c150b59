//! Radar and communication channel models and closed-form CIR oracles.

mod comm;
mod oracle;
mod radar;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::WaveformParams;
use crate::SPEED_OF_LIGHT;

pub use comm::{
    apply_comm_channel, cfr_from_csv, cfr_to_csv, cir_from_cfr, tilted_cfr, CommChannelConfig, DELAY_SPREAD_TOLERANCE,
};
pub use oracle::{biased_cir_oracle, direct_channel_reference, ideal_cir_oracle};
pub use radar::{apply_radar_channel, delay_response, doppler_phase};

/// Mapping between radial velocity and the sign of the normalized Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopplerSign {
    /// Positive velocity gives a negative `k_Δ` (92.71 m/s at 79 GHz pairs with `k_Δ = -0.1`).
    #[default]
    Inverted,
    /// Positive velocity gives a positive `k_Δ`.
    Direct,
}

impl DopplerSign {
    pub fn factor(self) -> f64 {
        match self {
            DopplerSign::Inverted => -1.0,
            DopplerSign::Direct => 1.0,
        }
    }
}

/// Point target in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub range_m: f64,
    pub velocity_mps: f64,
    /// Complex reflection gain as `[re, im]`.
    #[serde(default = "unit_amplitude")]
    pub amplitude: Complex64,
}

fn unit_amplitude() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl Target {
    pub fn new(range_m: f64, velocity_mps: f64, amplitude: Complex64) -> Self {
        Self {
            range_m,
            velocity_mps,
            amplitude,
        }
    }
}

/// Point target in normalized units: delay `n_Δ` in samples, Doppler `k_Δ` in
/// subcarrier spacings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scatterer {
    pub n_delta: f64,
    pub k_delta: f64,
    pub amplitude: Complex64,
}

impl Scatterer {
    pub fn new(n_delta: f64, k_delta: f64) -> Self {
        Self {
            n_delta,
            k_delta,
            amplitude: unit_amplitude(),
        }
    }

    pub fn with_amplitude(self, amplitude: Complex64) -> Self {
        Self { amplitude, ..self }
    }

    /// Symbol phase `φ_m = 2π k_Δ [m(N + N_CP) + N_CP] / N`.
    pub fn symbol_phase(&self, m: usize, params: &WaveformParams) -> f64 {
        let n = params.n as f64;
        2.0 * std::f64::consts::PI * self.k_delta * (m as f64 * params.symbol_len() as f64 + params.n_cp as f64) / n
    }
}

/// `(n_Δ, k_Δ)` of a target with the default sign convention.
pub fn normalize_target(t: &Target, params: &WaveformParams) -> (f64, f64) {
    normalize_target_with(t, params, DopplerSign::default())
}

/// `n_Δ = 2RB/c₀` and `k_Δ = ±(2 v f_c / c₀) / (B/N)`.
pub fn normalize_target_with(t: &Target, params: &WaveformParams, sign: DopplerSign) -> (f64, f64) {
    let n_delta = 2.0 * t.range_m * params.bandwidth_hz / SPEED_OF_LIGHT;
    let doppler_hz = 2.0 * t.velocity_mps * params.carrier_hz / SPEED_OF_LIGHT;
    (n_delta, sign.factor() * doppler_hz / params.subchirp_spacing_hz())
}

/// Radial velocity corresponding to a normalized Doppler shift.
pub fn velocity_from_k_delta(k_delta: f64, params: &WaveformParams, sign: DopplerSign) -> f64 {
    sign.factor() * k_delta * params.subchirp_spacing_hz() * SPEED_OF_LIGHT / (2.0 * params.carrier_hz)
}

/// Range corresponding to a normalized delay.
pub fn range_from_n_delta(n_delta: f64, params: &WaveformParams) -> f64 {
    n_delta * SPEED_OF_LIGHT / (2.0 * params.bandwidth_hz)
}

/// Radar scene: scatterers, optional receiver SNR and noise seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarChannelConfig {
    pub scatterers: Vec<Scatterer>,
    /// Per-sample SNR at the receiver input; `None` disables noise.
    pub snr_db: Option<f64>,
    pub rng_seed: u64,
}

impl RadarChannelConfig {
    /// Noise-free channel.
    pub fn noiseless(scatterers: Vec<Scatterer>) -> Self {
        Self {
            scatterers,
            snr_db: None,
            rng_seed: 0,
        }
    }

    pub fn with_noise(self, snr_db: f64, rng_seed: u64) -> Self {
        Self {
            snr_db: Some(snr_db),
            rng_seed,
            ..self
        }
    }

    /// Normalizes physical targets.
    pub fn from_targets(targets: &[Target], params: &WaveformParams, sign: DopplerSign) -> Self {
        let scatterers = targets
            .iter()
            .map(|t| {
                let (n_delta, k_delta) = normalize_target_with(t, params, sign);
                Scatterer {
                    n_delta,
                    k_delta,
                    amplitude: t.amplitude,
                }
            })
            .collect();
        Self::noiseless(scatterers)
    }

    /// Checks every scatterer lies in the unambiguous delay window `[0, N)`.
    pub fn validate(&self, params: &WaveformParams) -> Result<()> {
        for (index, s) in self.scatterers.iter().enumerate() {
            if !(s.n_delta.is_finite() && s.n_delta >= 0.0 && s.n_delta < params.n as f64) {
                return Err(Error::RangeAmbiguity {
                    index,
                    n_delta: s.n_delta,
                    limit: params.n,
                });
            }
            if !s.k_delta.is_finite() {
                return Err(Error::invalid(
                    "targets.velocity_mps",
                    format!("target {index} has a non-finite Doppler shift"),
                ));
            }
            if !(s.amplitude.re.is_finite() && s.amplitude.im.is_finite()) {
                return Err(Error::invalid(
                    "targets.amplitude",
                    format!("target {index} amplitude is not finite"),
                ));
            }
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::invalid("snr_db", "must be finite"));
            }
        }
        Ok(())
    }
}
