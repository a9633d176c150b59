use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ocdm_core::analysis::{
    ccdf_to_csv, doppler_tolerance_sweep, papr_ccdf, papr_symbol, peak_to_noise_floor_db, simulate_pilot_image,
    PaprSymbol, SurfaceSummary,
};
use ocdm_core::channel::{
    apply_comm_channel, apply_radar_channel, biased_cir_oracle, cfr_from_csv, cfr_to_csv, tilted_cfr, CommChannelConfig,
};
use ocdm_core::comms::{
    analytic_radcom_evm_db, constellation_to_csv, equalize_and_extract, estimate_comm_cfr, evm_and_snr,
    ofdm_build_frame, ofdm_demodulate, ofdm_equalize, ofdm_estimate_cfr, ofdm_modulate, ofdm_radar_process, CommReport,
};
use ocdm_core::export::{axis_to_csv, image_to_csv};
use ocdm_core::framing::{build_mimo_pilot_frame, build_pilot_frame, build_radcom_frame, qpsk_map, transmit_stream};
use ocdm_core::fresnel::{dfnt_direct, dirichlet_kernel, idfnt_direct, phase_fold_correct, FresnelTransform};
use ocdm_core::noise::{add_awgn, noise_variance, random_bits, seeded};
use ocdm_core::rxproc::{
    compute_radar_params, demodulate_frame, doppler_process, mimo_demux, radcom_extract_cir, receive_frame,
};
use ocdm_core::{
    Complex64, ComplexMatrix, Peak, RadarChannelConfig, RadarMode, RadarParams, RangeVelocityImage, SampleStream,
    Scatterer, WaveformParams,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Mode, ScenarioConfig};
use crate::error::{file_error, CliError};

/// Peaks closer than this to the mean non-peak power are reported as no detection.
pub const DETECTION_THRESHOLD_DB: f64 = 13.0;

/// Output directory that remembers every file written to it.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(file_error(&dir))?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn write<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(file_error(&path))?);
        body(&mut w)?;
        w.flush().map_err(file_error(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n").map_err(|e| CliError::File {
                path: name.into(),
                source: e,
            })
        })
    }

    fn image(&mut self, stem: &str, img: &RangeVelocityImage) -> Result<(), CliError> {
        self.write(&format!("{stem}.csv"), |w| Ok(image_to_csv(img, w)?))?;
        self.write(&format!("{stem}_range_axis.csv"), |w| {
            Ok(axis_to_csv("range_m", img.range_axis_m(), w)?)
        })?;
        self.write(&format!("{stem}_velocity_axis.csv"), |w| {
            Ok(axis_to_csv("velocity_mps", img.velocity_axis_mps(), w)?)
        })
    }

    /// Writes `manifest.json` and returns its path.
    pub fn finish(mut self, command: &str, config: &ScenarioConfig) -> Result<PathBuf, CliError> {
        let resolved = serde_json::to_value(config)?;
        let hash = Sha256::digest(serde_json::to_vec(&resolved)?);
        self.files.sort();
        let manifest = Manifest {
            command,
            files: self.files.clone(),
            config_sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
            seed: config.seed,
            resolved_config: resolved,
        };
        self.json("manifest.json", &manifest)?;
        Ok(self.dir.join("manifest.json"))
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    files: Vec<String>,
    config_sha256: String,
    seed: u64,
    resolved_config: serde_json::Value,
}

#[derive(Serialize)]
struct PeakReport {
    #[serde(flatten)]
    peak: Option<Peak>,
    #[serde(rename = "peak_to_floor_dB")]
    peak_to_floor_db: Option<f64>,
    detected: bool,
}

/// Peak and detection flag; an image without energy has no peak.
fn peak_report(img: &RangeVelocityImage) -> Result<PeakReport, CliError> {
    let Some(peak) = img.peak() else {
        return Ok(PeakReport {
            peak: None,
            peak_to_floor_db: None,
            detected: false,
        });
    };
    let ratio = peak_to_noise_floor_db(img)?;
    Ok(PeakReport {
        peak: Some(peak),
        peak_to_floor_db: Some(ratio),
        detected: ratio >= DETECTION_THRESHOLD_DB,
    })
}

fn add_noise(stream: &mut SampleStream, snr_db: Option<f64>, fallback_power: f64, seed: u64) {
    if let Some(snr) = snr_db {
        let p = stream.mean_power();
        let power = if p > 0.0 { p } else { fallback_power };
        add_awgn(&mut seeded(seed), &mut stream.samples, noise_variance(power, snr));
    }
}

pub fn radar(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.waveform();
    let img = simulate_pilot_image(p, &cfg.radar_channel(p), cfg.doppler_sign)?;
    out.image("image", &img)?;
    out.json("peak.json", &peak_report(&img)?)
}

pub fn mimo(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.waveform();
    let mimo = cfg.mimo();
    let noiseless = RadarChannelConfig {
        snr_db: None,
        ..cfg.radar_channel(p)
    };
    let mut tx_power = 0.0;
    let mut echo: Option<SampleStream> = None;
    for tx in 0..mimo.transmitters {
        let s = transmit_stream(&build_mimo_pilot_frame(p, &mimo, tx)?, p)?;
        tx_power += s.mean_power();
        let rx = apply_radar_channel(&s, &noiseless, p)?;
        match echo.as_mut() {
            None => echo = Some(rx),
            Some(acc) => acc.samples.iter_mut().zip(&rx.samples).for_each(|(a, b)| *a += b),
        }
    }
    let echo = echo.expect("at least one transmitter");
    let mut peaks = Vec::new();
    for q in 0..mimo.receivers {
        let mut rx = echo.clone();
        add_noise(&mut rx, cfg.snr_db, tx_power, cfg.seed.wrapping_add(q as u64));
        let y = receive_frame(&rx, p)?;
        for tx in 0..mimo.transmitters {
            let img = doppler_process(&mimo_demux(&y, &mimo, tx, q)?, p, cfg.doppler_sign)?;
            out.image(&format!("image_p{tx}_q{q}"), &img)?;
            peaks.push(serde_json::json!({ "p": tx, "q": q, "peak": peak_report(&img)? }));
        }
    }
    out.json("peaks.json", &peaks)
}

#[derive(Serialize)]
struct RadComReport {
    waveform: &'static str,
    comm: CommReport,
    #[serde(rename = "analytic_evm_dB", skip_serializing_if = "Option::is_none")]
    analytic_evm_db: Option<f64>,
    radar_peak: PeakReport,
}

fn comm_channel(cfg: &ScenarioConfig, n: usize) -> Result<CommChannelConfig, CliError> {
    let rc = &cfg.radcom;
    let cfr = match &rc.cfr_csv {
        Some(path) => {
            let path = Path::new(path);
            cfr_from_csv(File::open(path).map_err(file_error(path))?)?
        }
        None => tilted_cfr(n, rc.tilt_db, rc.max_delay.expect("resolved config"))?,
    };
    let ch = CommChannelConfig::new(cfr);
    Ok(match rc.comm_snr_db {
        Some(snr) => ch.with_noise(snr, cfg.seed.wrapping_add(1)),
        None => ch,
    })
}

pub fn radcom(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.radcom_waveform();
    let spec = cfg.radcom_spec();
    let avg = cfg.radcom.avg_symbols.expect("resolved config");
    let channel = comm_channel(cfg, p.n)?;
    channel.validate(p.n)?;
    let radar_cfg = cfg.radar_channel(&p);
    let mut bits_rng = seeded(cfg.seed.wrapping_add(2));

    let (report, img, analytic, est) = if cfg.mode == Mode::OfdmBaseline {
        let layout = cfg.radcom.ofdm;
        let rows = layout.data_bins(p.n).len();
        let bits = random_bits(&mut bits_rng, 2 * rows * p.m);
        let scale = spec.e_com.sqrt();
        let data = ComplexMatrix::from_col_major(rows, p.m, qpsk_map(&bits)?.into_iter().map(|z| z * scale).collect())?;
        let frame = ofdm_build_frame(&p, layout, &data, spec.e_com)?;
        let tx = ofdm_modulate(&frame, &p)?;
        let img = ofdm_radar_process(
            &frame.symbols,
            &ofdm_demodulate(&apply_radar_channel(&tx, &radar_cfg, &p)?, &p)?,
            &p,
            cfg.doppler_sign,
        )?;
        let y = ofdm_demodulate(&apply_comm_channel(&tx, &channel, &p)?, &p)?;
        let est = ofdm_estimate_cfr(&y, &frame, avg)?;
        let eq = ofdm_equalize(&y, &est, &layout)?;
        out.write("constellation.csv", |w| Ok(constellation_to_csv(&eq, 0, w)?))?;
        let report = evm_and_snr(&eq, &data)?.with_data_rate(layout.data_rate_bps(&p));
        (report, img, None, est)
    } else {
        let bits = random_bits(&mut bits_rng, spec.bits_per_frame(&p));
        let data = spec.symbols_from_bits(&p, &bits)?;
        let tx = transmit_stream(&build_radcom_frame(&p, &spec, &data)?, &p)?;
        let y_radar = receive_frame(&apply_radar_channel(&tx, &radar_cfg, &p)?, &p)?;
        let img = doppler_process(&radcom_extract_cir(&y_radar, spec.n_cp)?, &p, cfg.doppler_sign)?;
        let y = demodulate_frame(&apply_comm_channel(&tx, &channel, &p)?, &p)?;
        let est = estimate_comm_cfr(&y, &spec, avg)?;
        let eq = equalize_and_extract(&y, &est, &spec)?;
        out.write("constellation.csv", |w| {
            Ok(constellation_to_csv(&eq, spec.data_start(), w)?)
        })?;
        let report = evm_and_snr(&eq, &data)?.with_data_rate(spec.data_rate_bps(&p));
        let analytic = cfg
            .radcom
            .comm_snr_db
            .map(|snr| analytic_radcom_evm_db(&channel.cfr, &spec, &p, snr, avg));
        (report, img, analytic, est)
    };
    out.write("cfr_estimate.csv", |w| Ok(cfr_to_csv(&est, w)?))?;
    out.image("image", &img)?;
    let summary = RadComReport {
        waveform: if cfg.mode == Mode::OfdmBaseline { "ofdm" } else { "ocdm" },
        comm: report,
        analytic_evm_db: analytic,
        radar_peak: peak_report(&img)?,
    };
    out.json("radcom_report.json", &summary)
}

pub fn sweep(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let n_grid = cfg.sweep.n_grid.as_deref().expect("resolved config");
    let k_grid = cfg.sweep.k_grid.as_deref().expect("resolved config");
    let s = doppler_tolerance_sweep(cfg.waveform(), n_grid, k_grid)?;
    out.write("pplr.csv", |w| Ok(s.surface_to_csv(&s.pplr_db, w)?))?;
    out.write("pslr.csv", |w| Ok(s.surface_to_csv(&s.pslr_db, w)?))?;
    out.write("islr.csv", |w| Ok(s.surface_to_csv(&s.islr_db, w)?))?;
    #[derive(Serialize)]
    struct Summary {
        pplr: SurfaceSummary,
        pslr: SurfaceSummary,
        islr: SurfaceSummary,
    }
    out.json(
        "sweep_summary.json",
        &Summary {
            pplr: s.summarize(&s.pplr_db),
            pslr: s.summarize(&s.pslr_db),
            islr: s.summarize(&s.islr_db),
        },
    )
}

pub fn papr(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let n = cfg.waveform().n;
    let (trials, os) = (cfg.papr.trials, cfg.papr.oversample);
    let mut kinds = vec![
        ("pilot", PaprSymbol::Pilot),
        ("sector_modulated", PaprSymbol::SectorModulated(cfg.radcom_spec())),
        ("ofdm", PaprSymbol::Ofdm(cfg.radcom.ofdm)),
    ];
    if let Some(m) = cfg.mimo.filter(|m| m.transmitters > 1) {
        kinds.push((
            "mimo_pilot",
            PaprSymbol::MimoPilot {
                transmitters: m.transmitters,
            },
        ));
    }
    let mut curves = Vec::new();
    for (i, (name, kind)) in kinds.iter().enumerate() {
        let seed = cfg.seed.wrapping_add((i as u64) << 32);
        curves.push((*name, papr_ccdf(|s| papr_symbol(n, *kind, s), trials, os, seed)?));
    }
    let refs: Vec<_> = curves.iter().map(|(name, c)| (*name, c)).collect();
    out.write("ccdf.csv", |w| Ok(ccdf_to_csv(&refs, w)?))?;
    let summary: serde_json::Map<String, serde_json::Value> = curves
        .iter()
        .map(|(name, c)| {
            (
                name.to_string(),
                serde_json::json!({
                    "mean_dB": c.mean_db,
                    "level_at_1e-2_dB": c.level_at(1e-2),
                    "max_dB": c.max_db(),
                    "trials": c.trials,
                    "oversample": c.oversample,
                }),
            )
        })
        .collect();
    out.json("papr_summary.json", &summary)
}

#[derive(Serialize)]
struct ParamsReport {
    siso: RadarParams,
    radcom: RadarParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    mimo: Option<RadarParams>,
    sector_data_rate_bps: f64,
    ofdm_data_rate_bps: f64,
}

pub fn params(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.waveform();
    let rw = cfg.radcom_waveform();
    let report = ParamsReport {
        siso: compute_radar_params(p, RadarMode::Siso)?,
        radcom: compute_radar_params(&rw, RadarMode::RadCom)?,
        mimo: cfg
            .mimo
            .map(|m| {
                compute_radar_params(
                    p,
                    RadarMode::Mimo {
                        transmitters: m.transmitters,
                    },
                )
            })
            .transpose()?,
        sector_data_rate_bps: cfg.radcom_spec().data_rate_bps(&rw),
        ofdm_data_rate_bps: cfg.radcom.ofdm.data_rate_bps(&rw),
    };
    out.json("params.json", &report)
}

#[derive(Serialize)]
struct Check {
    name: String,
    max_error: f64,
    tolerance: f64,
    pass: bool,
}

fn check(name: impl Into<String>, max_error: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        max_error,
        tolerance,
        pass: max_error <= tolerance,
    }
}

fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let bits = random_bits(&mut seeded(seed), 2 * n);
    let mut rng = seeded(seed ^ 0xA5A5);
    qpsk_map(&bits)
        .expect("even bit count")
        .into_iter()
        .map(|z| z + ocdm_core::noise::complex_gaussian(&mut rng, 0.5))
        .collect()
}

fn selftest_checks(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for n in [4usize, 8, 64, 256, 2048] {
        let x = random_vector(n, seed.wrapping_add(n as u64));
        let t = FresnelTransform::new(n)?;
        let mut fast = x.clone();
        t.forward(&mut fast)?;
        checks.push(check(
            format!("dfnt fast vs direct, N={n}"),
            max_err(&fast, &dfnt_direct(&x)?),
            1e-9,
        ));
        let mut back = fast;
        t.inverse(&mut back)?;
        checks.push(check(format!("round trip, N={n}"), max_err(&back, &x), 1e-9));
        checks.push(check(
            format!("idfnt fast vs direct, N={n}"),
            {
                let mut inv = x.clone();
                t.inverse(&mut inv)?;
                max_err(&inv, &idfnt_direct(&x)?)
            },
            1e-9,
        ));
    }

    let n = 64;
    let t = FresnelTransform::new(n)?;
    let mut worst: f64 = 0.0;
    for kd in -32i64..32 {
        let sym = random_vector(n, seed.wrapping_add((1032 + kd) as u64));
        let mut x = sym.clone();
        t.inverse(&mut x)?;
        for (i, z) in x.iter_mut().enumerate() {
            *z *= Complex64::cis(2.0 * std::f64::consts::PI * (kd * i as i64) as f64 / n as f64);
        }
        t.forward(&mut x)?;
        let expected: Vec<Complex64> = (0..n)
            .map(|k| {
                let ph = std::f64::consts::PI * (2 * k as i64 * kd - kd * kd) as f64 / n as f64;
                sym[(k as i64 - kd).rem_euclid(n as i64) as usize] * Complex64::cis(ph)
            })
            .collect();
        worst = worst.max(max_err(&x, &expected));
    }
    checks.push(check("frequency-shift theorem, N=64", worst, 1e-9));

    let frame = ComplexMatrix::from_col_major(16, 2, random_vector(32, seed))?;
    checks.push(check(
        "phase fold involution",
        phase_fold_correct(&phase_fold_correct(&frame)).max_abs_diff(&frame),
        0.0,
    ));

    let sum: Complex64 = (0..8)
        .map(|i| Complex64::cis(2.0 * std::f64::consts::PI * 0.5 * i as f64 / 8.0))
        .sum();
    checks.push(check(
        "dirichlet kernel, a=0.5, N=8",
        (dirichlet_kernel(0.5, 8) - sum).norm(),
        1e-12,
    ));
    checks.push(check(
        "dirichlet kernel, a=0, N=8",
        (dirichlet_kernel(0.0, 8) - Complex64::new(8.0, 0.0)).norm(),
        1e-12,
    ));

    let p = WaveformParams::new(64, 8, 0, 1e9, 79e9)?;
    let tx = transmit_stream(&build_pilot_frame(&p), &p)?;
    let mut worst: f64 = 0.0;
    for n_delta in [0.0, 0.5, 20.0, 20.5] {
        for k_delta in [0.0, 0.25, -0.5, 1.0] {
            let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(n_delta, k_delta)]);
            let y = receive_frame(&apply_radar_channel(&tx, &cfg, &p)?, &p)?;
            worst = worst.max(y.max_abs_diff(biased_cir_oracle(&cfg, &p).data()));
        }
    }
    checks.push(check("pipeline vs closed-form CIR", worst, 1e-8));
    Ok(checks)
}

pub fn selftest(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let checks = selftest_checks(cfg.seed)?;
    out.json("selftest.json", &checks)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    for c in &checks {
        eprintln!(
            "{} {} ({:.1e})",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.max_error
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelfTest(failed.join(", ")))
    }
}
