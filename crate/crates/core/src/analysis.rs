//! Range-cut quality metrics, Doppler-tolerance sweeps and PAPR statistics.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_radar_channel, DopplerSign, RadarChannelConfig, Scatterer};
use crate::comms::{OfdmFrame, OfdmPilotLayout};
use crate::dft::{signed_bin, Dft};
use crate::error::{Error, Result};
use crate::framing::{build_pilot_frame, qpsk_map, transmit_stream, MimoConfig, RadComFrameSpec, WaveformParams};
use crate::fresnel::FresnelTransform;
use crate::noise::{random_bits, seeded};
use crate::rxproc::{doppler_process, receive_frame, siso_cir, RangeVelocityImage};

/// Lowest value reported by the dB metrics.
pub const METRIC_FLOOR_DB: f64 = -300.0;

/// Default mainlobe half-width in range bins.
pub const MAINLOBE_HALF_WIDTH: usize = 1;

fn db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * ratio.log10()).max(METRIC_FLOOR_DB)
    } else {
        METRIC_FLOOR_DB
    }
}

/// Peak power loss, peak and integrated sidelobe ratios of one range cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeCutMetrics {
    #[serde(rename = "pplr_dB")]
    pub pplr_db: f64,
    #[serde(rename = "pslr_dB")]
    pub pslr_db: f64,
    #[serde(rename = "islr_dB")]
    pub islr_db: f64,
    pub mainlobe: Vec<usize>,
    pub peak_bin: usize,
    pub velocity_bin: usize,
}

/// Metrics with the default mainlobe of peak ± 1 bin.
pub fn range_cut_metrics(img: &RangeVelocityImage, reference_peak_power: f64) -> Result<RangeCutMetrics> {
    range_cut_metrics_with(img, reference_peak_power, MAINLOBE_HALF_WIDTH)
}

/// Metrics of the range cut through the global peak; the mainlobe spans
/// `half_width` bins on each side of the peak, wrapping circularly.
pub fn range_cut_metrics_with(
    img: &RangeVelocityImage,
    reference_peak_power: f64,
    half_width: usize,
) -> Result<RangeCutMetrics> {
    if !(reference_peak_power > 0.0) {
        return Err(Error::ZeroReference);
    }
    if img.rows() == 0 || img.cols() == 0 {
        return Err(Error::Empty("image"));
    }
    let peak = img.peak().ok_or(Error::ZeroImage)?;
    let cut: Vec<f64> = img.range_cut(peak.velocity_bin).iter().map(|a| a * a).collect();
    let rows = cut.len();
    let hw = half_width.min((rows - 1) / 2);
    let mut mainlobe: Vec<usize> = (0..=2 * hw).map(|i| (peak.range_bin + rows + i - hw) % rows).collect();
    mainlobe.sort_unstable();
    mainlobe.dedup();
    let peak_power = cut[peak.range_bin];
    let main_sum: f64 = mainlobe.iter().map(|&i| cut[i]).sum();
    let (side_max, side_sum) = cut
        .iter()
        .enumerate()
        .filter(|(i, _)| mainlobe.binary_search(i).is_err())
        .fold((0.0f64, 0.0), |(mx, s), (_, &v)| (mx.max(v), s + v));
    Ok(RangeCutMetrics {
        pplr_db: db(peak_power / reference_peak_power),
        pslr_db: db(side_max / peak_power),
        islr_db: db(side_sum / main_sum),
        mainlobe,
        peak_bin: peak.range_bin,
        velocity_bin: peak.velocity_bin,
    })
}

/// Peak cell power over the mean power of all other cells, in dB.
pub fn peak_to_noise_floor_db(img: &RangeVelocityImage) -> Result<f64> {
    let peak = img.peak().ok_or(Error::ZeroImage)?;
    let cells = img.rows() * img.cols();
    if cells < 2 {
        return Err(Error::Empty("image needs at least two cells"));
    }
    let total: f64 = img.magnitudes().iter().map(|a| a * a).sum();
    let peak_power = img.power(peak.range_bin, peak.velocity_bin);
    let floor = (total - peak_power) / (cells - 1) as f64;
    Ok(db(peak_power / floor))
}

/// Image of a radar pilot frame sent through `cfg`.
pub fn simulate_pilot_image(
    params: &WaveformParams,
    cfg: &RadarChannelConfig,
    sign: DopplerSign,
) -> Result<RangeVelocityImage> {
    let tx = transmit_stream(&build_pilot_frame(params), params)?;
    let rx = apply_radar_channel(&tx, cfg, params)?;
    doppler_process(&siso_cir(receive_frame(&rx, params)?), params, sign)
}

/// PPLR, PSLR and ISLR over an `(n_Δ, k_Δ)` grid; surfaces are indexed
/// `[n index][k index]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopplerSweep {
    pub n_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub pplr_db: Vec<Vec<f64>>,
    pub pslr_db: Vec<Vec<f64>>,
    pub islr_db: Vec<Vec<f64>>,
}

/// Extremes of one surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub min: f64,
    pub max: f64,
    pub argmin_n_delta: f64,
    pub argmin_k_delta: f64,
    pub argmax_n_delta: f64,
    pub argmax_k_delta: f64,
}

impl DopplerSweep {
    pub fn summarize(&self, surface: &[Vec<f64>]) -> SurfaceSummary {
        let mut s = SurfaceSummary {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin_n_delta: 0.0,
            argmin_k_delta: 0.0,
            argmax_n_delta: 0.0,
            argmax_k_delta: 0.0,
        };
        for (i, row) in surface.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < s.min {
                    s.min = v;
                    s.argmin_n_delta = self.n_grid[i];
                    s.argmin_k_delta = self.k_grid[j];
                }
                if v > s.max {
                    s.max = v;
                    s.argmax_n_delta = self.n_grid[i];
                    s.argmax_k_delta = self.k_grid[j];
                }
            }
        }
        s
    }

    /// Writes one surface as CSV rows `n_delta,k_delta,value`.
    pub fn surface_to_csv<W: Write>(&self, surface: &[Vec<f64>], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n_delta", "k_delta", "value"])?;
        for (i, row) in surface.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                w.write_record([self.n_grid[i].to_string(), self.k_grid[j].to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Noise-free single-target sweep. The PPLR reference at each `n_Δ` is the
/// zero-Doppler peak power for the same delay.
pub fn doppler_tolerance_sweep(params: &WaveformParams, n_grid: &[f64], k_grid: &[f64]) -> Result<DopplerSweep> {
    params.validate()?;
    if n_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::Empty("sweep grid"));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| !(n >= 0.0 && n < params.n as f64)) {
        return Err(Error::invalid(
            "sweep.n_grid",
            format!("value {n} outside [0, {})", params.n),
        ));
    }
    if let Some(&k) = k_grid.iter().find(|&&k| !(-0.5..=0.5).contains(&k)) {
        return Err(Error::invalid("sweep.k_grid", format!("value {k} outside [-0.5, 0.5]")));
    }
    let sign = DopplerSign::Direct;
    let image =
        |n: f64, k: f64| simulate_pilot_image(params, &RadarChannelConfig::noiseless(vec![Scatterer::new(n, k)]), sign);
    let refs: Vec<f64> = n_grid
        .par_iter()
        .map(|&n| {
            let img = image(n, 0.0)?;
            let pk = img.peak().ok_or(Error::ZeroImage)?;
            Ok(img.power(pk.range_bin, pk.velocity_bin))
        })
        .collect::<Result<_>>()?;
    let points: Vec<(usize, usize)> = (0..n_grid.len())
        .flat_map(|i| (0..k_grid.len()).map(move |j| (i, j)))
        .collect();
    let metrics: Vec<RangeCutMetrics> = points
        .par_iter()
        .map(|&(i, j)| range_cut_metrics(&image(n_grid[i], k_grid[j])?, refs[i]))
        .collect::<Result<_>>()?;
    let surface = |f: fn(&RangeCutMetrics) -> f64| -> Vec<Vec<f64>> {
        metrics
            .chunks(k_grid.len())
            .map(|row| row.iter().map(f).collect())
            .collect()
    };
    Ok(DopplerSweep {
        n_grid: n_grid.to_vec(),
        k_grid: k_grid.to_vec(),
        pplr_db: surface(|m| m.pplr_db),
        pslr_db: surface(|m| m.pslr_db),
        islr_db: surface(|m| m.islr_db),
    })
}

/// Transmit symbol kinds compared in the PAPR study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaprSymbol {
    /// Radar pilot, subchirp 0 only.
    Pilot,
    /// All FrDM pilots superposed as seen by a single antenna.
    MimoPilot { transmitters: usize },
    /// Sector-modulated RadCom symbol with random QPSK data.
    SectorModulated(RadComFrameSpec),
    /// OFDM symbol with random QPSK data on a pilot comb.
    Ofdm(OfdmPilotLayout),
}

/// Builds one time-domain symbol of `kind` from a per-trial seed.
pub fn papr_symbol(n: usize, kind: PaprSymbol, seed: u64) -> Result<Vec<Complex64>> {
    let mut rng = seeded(seed);
    let qpsk = |count: usize, rng: &mut rand_chacha::ChaCha8Rng| qpsk_map(&random_bits(rng, 2 * count));
    match kind {
        PaprSymbol::Pilot => {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[0] = Complex64::new(1.0, 0.0);
            FresnelTransform::new(n)?.inverse(&mut x)?;
            Ok(x)
        }
        PaprSymbol::MimoPilot { transmitters } => {
            let mimo = MimoConfig::new(transmitters, 1);
            mimo.validate(n)?;
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for p in 0..transmitters {
                x[p * mimo.slice_len(n)] = Complex64::new(1.0, 0.0);
            }
            FresnelTransform::new(n)?.inverse(&mut x)?;
            Ok(x)
        }
        PaprSymbol::SectorModulated(spec) => {
            spec.validate(n)?;
            let data = qpsk(spec.data_subchirps(n), &mut rng)?;
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[0] = Complex64::new(spec.e_rad.sqrt(), 0.0);
            let scale = spec.e_com.sqrt();
            for (i, d) in data.into_iter().enumerate() {
                x[spec.data_start() + i] = d * scale;
            }
            FresnelTransform::new(n)?.inverse(&mut x)?;
            Ok(x)
        }
        PaprSymbol::Ofdm(layout) => {
            layout.validate(n)?;
            let bins = layout.data_bins(n);
            let data = qpsk(bins.len(), &mut rng)?;
            let mut x: Vec<Complex64> = (0..n).map(|g| OfdmFrame::pilot_symbol(g, 1.0)).collect();
            for (&g, d) in bins.iter().zip(data) {
                x[g] = d;
            }
            Dft::new(n).inverse(&mut x);
            Ok(x)
        }
    }
}

/// Zero-padded spectral interpolation by `factor`, keeping baseband bins
/// `[-N/2, N/2)` in place.
pub fn oversample(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = x.len();
    let total = n * factor;
    let mut spec = x.to_vec();
    Dft::new(n).forward(&mut spec);
    let mut padded = vec![Complex64::new(0.0, 0.0); total];
    for (g, v) in spec.iter().enumerate() {
        padded[signed_bin(g, n).rem_euclid(total as i64) as usize] = *v;
    }
    Dft::new(total).inverse(&mut padded);
    let scale = factor as f64;
    padded.iter_mut().for_each(|z| *z *= scale);
    padded
}

/// `10 log₁₀(max|x|² / mean|x|²)` after oversampling.
pub fn papr_db(x: &[Complex64], factor: usize) -> f64 {
    let y = oversample(x, factor);
    let (mx, sum) = y
        .iter()
        .map(|z| z.norm_sqr())
        .fold((0.0f64, 0.0), |(m, s), p| (m.max(p), s + p));
    10.0 * (mx / (sum / y.len() as f64)).log10()
}

/// Empirical PAPR distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaprCcdf {
    pub thresholds_db: Vec<f64>,
    /// `P(PAPR > x)` for every threshold.
    pub exceedance: Vec<f64>,
    pub oversample: usize,
    pub trials: usize,
    /// Mean of the per-symbol PAPR in dB.
    #[serde(rename = "mean_dB")]
    pub mean_db: f64,
    /// Per-trial PAPR values in dB, sorted ascending.
    pub samples_db: Vec<f64>,
}

impl PaprCcdf {
    /// Threshold exceeded with probability `p`, interpolated between samples.
    pub fn level_at(&self, p: f64) -> f64 {
        let n = self.samples_db.len();
        let pos = ((1.0 - p) * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let t = pos - lo as f64;
        self.samples_db[lo] * (1.0 - t) + self.samples_db[hi] * t
    }

    pub fn max_db(&self) -> f64 {
        *self.samples_db.last().unwrap_or(&f64::NAN)
    }
}

/// Default CCDF threshold grid: 0 to 16 dB in 0.05 dB steps.
pub fn default_thresholds() -> Vec<f64> {
    (0..=320).map(|i| i as f64 * 0.05).collect()
}

/// CCDF of the PAPR of `trials` symbols produced by `builder(trial_seed)`.
///
/// Trial `t` uses seed `seed + t`, so results do not depend on scheduling.
pub fn papr_ccdf<F>(builder: F, trials: usize, oversample_factor: usize, seed: u64) -> Result<PaprCcdf>
where
    F: Fn(u64) -> Result<Vec<Complex64>> + Sync,
{
    if trials == 0 {
        return Err(Error::invalid("papr.trials", "must be at least 1"));
    }
    if oversample_factor == 0 {
        return Err(Error::invalid("papr.oversample", "must be at least 1"));
    }
    let mut samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| builder(seed.wrapping_add(t)).map(|x| papr_db(&x, oversample_factor)))
        .collect::<Result<_>>()?;
    let mean_db = samples.iter().sum::<f64>() / trials as f64;
    samples.sort_by(f64::total_cmp);
    let thresholds_db = default_thresholds();
    let exceedance = thresholds_db
        .iter()
        .map(|&x| {
            let below = samples.partition_point(|&s| s <= x);
            (trials - below) as f64 / trials as f64
        })
        .collect();
    Ok(PaprCcdf {
        thresholds_db,
        exceedance,
        oversample: oversample_factor,
        trials,
        mean_db,
        samples_db: samples,
    })
}

/// Writes CCDF curves sharing one threshold grid as `threshold_dB,<name>...`.
pub fn ccdf_to_csv<W: Write>(curves: &[(&str, &PaprCcdf)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["threshold_dB".to_string()];
    header.extend(curves.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    if let Some((_, first)) = curves.first() {
        for (i, x) in first.thresholds_db.iter().enumerate() {
            let mut rec = vec![x.to_string()];
            rec.extend(curves.iter().map(|(_, c)| c.exceedance[i].to_string()));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Draws a random QPSK payload of `count` symbols.
pub fn random_qpsk<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Complex64> {
    qpsk_map(&random_bits(rng, 2 * count)).expect("even bit count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::biased_cir_oracle;
    use crate::rxproc::CirMatrix;
    use proptest::prelude::*;

    fn params(n: usize, m: usize) -> WaveformParams {
        WaveformParams::new(n, m, 0, 1e9, 79e9).unwrap()
    }

    fn metrics_for(p: &WaveformParams, n: f64, k: f64) -> RangeCutMetrics {
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(n, 0.0)]);
        let r = simulate_pilot_image(p, &cfg, DopplerSign::Direct).unwrap();
        let pk = r.peak().unwrap();
        let reference = r.power(pk.range_bin, pk.velocity_bin);
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(n, k)]);
        range_cut_metrics(&simulate_pilot_image(p, &cfg, DopplerSign::Direct).unwrap(), reference).unwrap()
    }

    #[test]
    fn zero_doppler_reference_case() {
        let m = metrics_for(&params(64, 8), 20.0, 0.0);
        assert_eq!(m.pplr_db, 0.0);
        assert_eq!(m.mainlobe, vec![19, 20, 21]);
        assert!(m.pslr_db < -250.0);
        assert!(m.islr_db < -250.0);
    }

    #[test]
    fn mainlobe_wraps_at_edges() {
        let m = metrics_for(&params(32, 4), 0.0, 0.0);
        assert_eq!(m.mainlobe, vec![0, 1, 31]);
    }

    #[test]
    fn zero_reference_rejected() {
        let p = params(16, 2);
        let img = simulate_pilot_image(
            &p,
            &RadarChannelConfig::noiseless(vec![Scatterer::new(2.0, 0.0)]),
            DopplerSign::Direct,
        )
        .unwrap();
        assert!(matches!(range_cut_metrics(&img, 0.0), Err(Error::ZeroReference)));
    }

    #[test]
    fn half_bin_doppler_degrades_peak() {
        let m = metrics_for(&params(256, 40), 57.0, -0.5);
        assert!(m.pplr_db < -3.0 && m.pplr_db > -5.0, "{}", m.pplr_db);
        assert!(m.islr_db > -20.0);
        let small = metrics_for(&params(256, 40), 57.0, 0.1);
        assert!(small.pplr_db > -0.2);
    }

    #[test]
    fn sweep_zero_row_and_symmetry() {
        let p = params(64, 20);
        let n_grid = [0.0, 8.0, 21.0, 56.0];
        let k_grid = [-0.5, -0.25, 0.0, 0.25, 0.5];
        let s = doppler_tolerance_sweep(&p, &n_grid, &k_grid).unwrap();
        for row in &s.pplr_db {
            assert_eq!(row[2], 0.0);
        }
        // Mirror symmetry (n, k) ↔ (N - n, -k). At k = 0 the sidelobes sit at the numerical floor.
        for j in 0..5 {
            assert!((s.pplr_db[1][j] - s.pplr_db[3][4 - j]).abs() < 1e-9);
            if j != 2 {
                assert!((s.islr_db[1][j] - s.islr_db[3][4 - j]).abs() < 1e-6);
                assert!((s.pslr_db[1][j] - s.pslr_db[3][4 - j]).abs() < 1e-6);
            }
        }
        let summary = s.summarize(&s.pplr_db);
        assert_eq!(summary.max, 0.0);
        assert_eq!(summary.argmin_k_delta.abs(), 0.5);
        let again = doppler_tolerance_sweep(&p, &n_grid, &k_grid).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn sweep_rejects_out_of_range_grid() {
        let p = params(16, 4);
        assert!(doppler_tolerance_sweep(&p, &[16.0], &[0.0]).is_err());
        assert!(doppler_tolerance_sweep(&p, &[1.0], &[0.6]).is_err());
        assert!(doppler_tolerance_sweep(&p, &[], &[0.0]).is_err());
    }

    #[test]
    fn oracle_metrics_match_pipeline() {
        let p = params(128, 16);
        for (n, k) in [(30.0, 0.3), (31.5, -0.45), (100.0, 0.1)] {
            let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(n, k)]);
            let oracle = biased_cir_oracle(&cfg, &p);
            let img_o = doppler_process(
                &CirMatrix::new(oracle.into_data(), crate::rxproc::CirMode::Siso),
                &p,
                DopplerSign::Direct,
            )
            .unwrap();
            let img_p = simulate_pilot_image(&p, &cfg, DopplerSign::Direct).unwrap();
            let mo = range_cut_metrics(&img_o, 1.0).unwrap();
            let mp = range_cut_metrics(&img_p, 1.0).unwrap();
            assert!((mo.pplr_db - mp.pplr_db).abs() < 0.01);
            assert!((mo.pslr_db - mp.pslr_db).abs() < 0.01);
            assert!((mo.islr_db - mp.islr_db).abs() < 0.01);
        }
    }

    #[test]
    fn pilot_papr_is_small_and_ofdm_is_larger() {
        let pilot = papr_db(&papr_symbol(256, PaprSymbol::Pilot, 0).unwrap(), 20);
        assert!(pilot < 3.0);
        assert!(papr_db(&papr_symbol(256, PaprSymbol::Pilot, 0).unwrap(), 1) < 1e-9);
        let ofdm = papr_ccdf(
            |s| papr_symbol(256, PaprSymbol::Ofdm(OfdmPilotLayout::default()), s),
            200,
            4,
            1,
        )
        .unwrap();
        assert!(ofdm.mean_db > pilot + 4.0);
    }

    #[test]
    fn oversampling_preserves_samples() {
        let x = papr_symbol(64, PaprSymbol::SectorModulated(RadComFrameSpec::new(16, 1.0, 1.0)), 3).unwrap();
        let y = oversample(&x, 5);
        for (i, v) in x.iter().enumerate() {
            // Only the Nyquist bin is not symmetric, so the match is approximate.
            assert!((y[5 * i] - v).norm() < 0.2 * v.norm().max(0.05));
        }
        let e_x: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / 64.0;
        let e_y: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / 320.0;
        assert!((e_x / e_y - 1.0).abs() < 0.05);
    }

    #[test]
    fn ccdf_shape() {
        let c = papr_ccdf(
            |s| papr_symbol(64, PaprSymbol::SectorModulated(RadComFrameSpec::new(16, 1.0, 1.0)), s),
            300,
            4,
            9,
        )
        .unwrap();
        assert!(c.exceedance.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.exceedance.iter().all(|&p| (0.0..=1.0).contains(&p)));
        assert_eq!(c.exceedance[0], 1.0);
        assert!(c.level_at(0.01) <= c.max_db());
        let again = papr_ccdf(
            |s| papr_symbol(64, PaprSymbol::SectorModulated(RadComFrameSpec::new(16, 1.0, 1.0)), s),
            300,
            4,
            9,
        )
        .unwrap();
        assert_eq!(c, again);
        assert!(papr_ccdf(|s| papr_symbol(64, PaprSymbol::Pilot, s), 0, 4, 0).is_err());
    }

    #[test]
    fn processing_gain_single_trial() {
        let p = params(64, 16);
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(5.0, 0.0)]).with_noise(0.0, 4);
        let g = peak_to_noise_floor_db(&simulate_pilot_image(&p, &cfg, DopplerSign::Direct).unwrap()).unwrap();
        assert!((g - 10.0 * 1024f64.log10()).abs() < 1.5, "{g}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn ccdf_monotone(seed in any::<u64>(), ncp in 2usize..16) {
            let kind = PaprSymbol::SectorModulated(RadComFrameSpec::new(ncp, 1.0, 1.0));
            let c = papr_ccdf(|s| papr_symbol(32, kind, s), 40, 2, seed).unwrap();
            prop_assert!(c.exceedance.windows(2).all(|w| w[1] <= w[0]));
        }

        #[test]
        fn pslr_non_positive(n in 0.0f64..63.0, k in -0.5f64..0.5) {
            let m = metrics_for(&params(64, 4), n, k);
            prop_assert!(m.pslr_db <= 0.0);
            prop_assert!(!m.mainlobe.is_empty());
        }
    }
}
