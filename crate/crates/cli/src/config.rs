use ocdm_core::comms::OfdmPilotLayout;
use ocdm_core::{DopplerSign, MimoConfig, RadComFrameSpec, RadarChannelConfig, Target, WaveformParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Waveform used by the default desk-scale runs.
pub fn desk_waveform() -> WaveformParams {
    WaveformParams::new(256, 32, 0, 1e9, 79e9).expect("valid desk numerology")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Radar,
    Mimo,
    Radcom,
    OfdmBaseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadComSettings {
    /// Pilot and guard sector length; defaults to `N/4`.
    #[serde(default)]
    pub n_cp: Option<usize>,
    #[serde(default = "one")]
    pub e_rad: f64,
    #[serde(default = "one")]
    pub e_com: f64,
    /// Symbols averaged by the channel estimator; defaults to all of them.
    #[serde(default)]
    pub avg_symbols: Option<usize>,
    /// Edge-to-edge magnitude tilt of the parametric channel.
    #[serde(default = "default_tilt")]
    pub tilt_db: f64,
    /// Longest tap of the parametric channel; defaults to `n_cp / 4`.
    #[serde(default)]
    pub max_delay: Option<usize>,
    /// CSV with columns `bin,re,im` overriding the parametric channel.
    #[serde(default)]
    pub cfr_csv: Option<String>,
    #[serde(default = "default_comm_snr")]
    pub comm_snr_db: Option<f64>,
    #[serde(default)]
    pub ofdm: OfdmPilotLayout,
}

impl Default for RadComSettings {
    fn default() -> Self {
        Self {
            n_cp: None,
            e_rad: 1.0,
            e_com: 1.0,
            avg_symbols: None,
            tilt_db: default_tilt(),
            max_delay: None,
            cfr_csv: None,
            comm_snr_db: default_comm_snr(),
            ofdm: OfdmPilotLayout::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    /// Delay grid; defaults to 9 evenly spaced integer delays.
    #[serde(default)]
    pub n_grid: Option<Vec<f64>>,
    /// Doppler grid; defaults to -0.5..=0.5 in steps of 0.1.
    #[serde(default)]
    pub k_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaprSettings {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

impl Default for PaprSettings {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            oversample: default_oversample(),
        }
    }
}

/// Scenario description read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub waveform: Option<WaveformParams>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub mimo: Option<MimoConfig>,
    #[serde(default)]
    pub targets: Vec<Target>,
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub doppler_sign: DopplerSign,
    #[serde(default)]
    pub radcom: RadComSettings,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub papr: PaprSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

fn one() -> f64 {
    1.0
}

fn default_tilt() -> f64 {
    10.0
}

fn default_comm_snr() -> Option<f64> {
    Some(30.0)
}

fn default_trials() -> usize {
    1000
}

fn default_oversample() -> usize {
    20
}

/// Either a plain scenario or a manifest embedding one.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigSource {
    Manifest { resolved_config: serde_json::Value },
    Plain(serde_json::Value),
}

impl ScenarioConfig {
    /// Parses a scenario, accepting a previously written manifest as well.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value = match serde_json::from_str::<ConfigSource>(text).map_err(|e| CliError::Schema(e.to_string()))? {
            ConfigSource::Manifest { resolved_config } => resolved_config,
            ConfigSource::Plain(v) => v,
        };
        serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))
    }

    /// Fills every defaulted field so the manifest records the exact run.
    pub fn resolve(mut self, full_scale: bool, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        let waveform = self.waveform.get_or_insert_with(|| {
            if full_scale {
                WaveformParams::automotive()
            } else {
                desk_waveform()
            }
        });
        let n = waveform.n;
        let min_m = waveform.m;
        if self.mimo.is_none() && self.mode == Mode::Mimo {
            self.mimo = Some(MimoConfig::new(4, 1));
        }
        let rc = &mut self.radcom;
        let n_cp = *rc.n_cp.get_or_insert(n / 4);
        rc.max_delay.get_or_insert((n_cp / 4).max(1));
        rc.avg_symbols.get_or_insert(min_m);
        if self.sweep.n_grid.is_none() {
            self.sweep.n_grid = Some((0..9).map(|i| (i as f64 * n as f64 / 9.0).round()).collect());
        }
        if self.sweep.k_grid.is_none() {
            self.sweep.k_grid = Some((-5..=5).map(|i| i as f64 / 10.0).collect());
        }
        if full_scale && self.papr == PaprSettings::default() {
            self.papr.trials = 10_000;
        }
        self
    }

    pub fn waveform(&self) -> &WaveformParams {
        self.waveform.as_ref().expect("resolved config")
    }

    /// Waveform with the RadCom guard length as cyclic prefix.
    pub fn radcom_waveform(&self) -> WaveformParams {
        self.waveform().with_cp(self.radcom_spec().n_cp)
    }

    pub fn radcom_spec(&self) -> RadComFrameSpec {
        RadComFrameSpec::new(
            self.radcom.n_cp.expect("resolved config"),
            self.radcom.e_rad,
            self.radcom.e_com,
        )
    }

    pub fn mimo(&self) -> MimoConfig {
        self.mimo.unwrap_or(MimoConfig::new(1, 1))
    }

    pub fn radar_channel(&self, params: &WaveformParams) -> RadarChannelConfig {
        let cfg = RadarChannelConfig::from_targets(&self.targets, params, self.doppler_sign);
        match self.snr_db {
            Some(snr) => cfg.with_noise(snr, self.seed),
            None => cfg,
        }
    }

    /// Checks every precondition a command depends on; RadCom settings only
    /// when `radcom` is set.
    pub fn validate(&self, radcom: bool) -> Result<(), CliError> {
        let w = self.waveform();
        w.validate()?;
        self.radar_channel(w).validate(w)?;
        if let Some(m) = &self.mimo {
            m.validate(w.n)?;
        }
        if radcom {
            let rw = self.radcom_waveform();
            rw.validate()?;
            self.radcom_spec().validate(w.n)?;
            self.radar_channel(&rw).validate(&rw)?;
            let avg = self.radcom.avg_symbols.expect("resolved config");
            if avg == 0 || avg > w.m {
                return Err(CliError::Precondition(format!(
                    "radcom.avg_symbols: must lie in [1, {}]",
                    w.m
                )));
            }
            if self.mode == Mode::OfdmBaseline {
                self.radcom.ofdm.validate(w.n)?;
            }
        }
        if self.papr.trials == 0 {
            return Err(CliError::Precondition("papr.trials: must be at least 1".into()));
        }
        if self.papr.oversample == 0 {
            return Err(CliError::Precondition("papr.oversample: must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_desk_scale() {
        let c = ScenarioConfig::from_json("{}").unwrap().resolve(false, None);
        assert_eq!(c.waveform().n, 256);
        assert_eq!(c.radcom.n_cp, Some(64));
        assert_eq!(c.sweep.n_grid.as_ref().unwrap().len(), 9);
        assert_eq!(c.sweep.k_grid.as_ref().unwrap().len(), 11);
        c.validate(true).unwrap();
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let err = ScenarioConfig::from_json(
            r#"{"waveform": {"n": 8, "m": 2, "n_cp": 0, "bandwidth_hz": 1e9, "carrier_hz": 79e9, "extra": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Schema(ref m) if m.contains("extra")), "{err}");
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"snr": 3}"#),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn manifest_is_accepted_as_config() {
        let c = ScenarioConfig::from_json(r#"{"seed": 5}"#)
            .unwrap()
            .resolve(false, None);
        let manifest = serde_json::json!({"files": [], "resolved_config": c});
        let back = ScenarioConfig::from_json(&manifest.to_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn seed_override_and_full_scale() {
        let c = ScenarioConfig::default().resolve(true, Some(9));
        assert_eq!(c.seed, 9);
        assert_eq!(c.waveform().m, 5120);
        assert_eq!(c.papr.trials, 10_000);
    }

    #[test]
    fn out_of_window_target_is_a_precondition_error() {
        let c = ScenarioConfig::from_json(r#"{"targets": [{"range_m": 100.0, "velocity_mps": 0.0}]}"#)
            .unwrap()
            .resolve(false, None);
        assert!(matches!(c.validate(false), Err(CliError::Core(e)) if e.is_precondition()));
    }
}
