use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dft::{signed_bin, Dft};
use crate::error::{Error, Result};
use crate::framing::{deserialize, SampleStream, WaveformParams};
use crate::noise::{add_awgn, noise_variance, seeded};

/// Largest fraction of CIR energy allowed beyond the cyclic prefix.
pub const DELAY_SPREAD_TOLERANCE: f64 = 1e-3;

/// Static frequency-selective communication channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommChannelConfig {
    /// Frequency response indexed by DFT bin (bin `g ≥ N/2` is frequency `g - N`).
    pub cfr: Vec<Complex64>,
    pub snr_db: Option<f64>,
    pub rng_seed: u64,
}

impl CommChannelConfig {
    pub fn new(cfr: Vec<Complex64>) -> Self {
        Self {
            cfr,
            snr_db: None,
            rng_seed: 0,
        }
    }

    /// All-pass channel.
    pub fn flat(n: usize) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0); n])
    }

    /// Channel whose response is the DFT of a CIR zero-padded to `n`.
    pub fn from_cir(cir: &[Complex64], n: usize) -> Result<Self> {
        if cir.len() > n {
            return Err(Error::DimensionMismatch {
                field: "cir",
                expected: n,
                actual: cir.len(),
            });
        }
        let mut buf = cir.to_vec();
        buf.resize(n, Complex64::new(0.0, 0.0));
        Dft::new(n).forward(&mut buf);
        Ok(Self::new(buf))
    }

    pub fn with_noise(self, snr_db: f64, rng_seed: u64) -> Self {
        Self {
            snr_db: Some(snr_db),
            rng_seed,
            ..self
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.cfr.len() != n {
            return Err(Error::DimensionMismatch {
                field: "cfr",
                expected: n,
                actual: self.cfr.len(),
            });
        }
        if !self.cfr.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::invalid("cfr", "entries must be finite"));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::invalid("comm_snr_db", "must be finite"));
            }
        }
        Ok(())
    }

    /// Fraction of CIR energy at taps beyond `n_cp`.
    pub fn delay_spread_fraction(&self, n_cp: usize) -> f64 {
        let cir = cir_from_cfr(&self.cfr);
        let total: f64 = cir.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        cir.iter().skip(n_cp + 1).map(|z| z.norm_sqr()).sum::<f64>() / total
    }
}

/// Inverse DFT of a frequency response.
pub fn cir_from_cfr(cfr: &[Complex64]) -> Vec<Complex64> {
    let mut buf = cfr.to_vec();
    Dft::new(cfr.len()).inverse(&mut buf);
    buf
}

fn windowed_tilt(n: usize, slope_db: f64, max_delay: usize) -> Vec<Complex64> {
    let dft = Dft::new(n);
    let mut desired: Vec<Complex64> = (0..n)
        .map(|g| {
            let f = signed_bin(g, n) as f64 + n as f64 / 2.0;
            Complex64::new(10f64.powf(-slope_db * f / (n as f64 - 1.0) / 20.0), 0.0)
        })
        .collect();
    dft.inverse(&mut desired);
    let half = max_delay / 2;
    let mut taps = vec![Complex64::new(0.0, 0.0); n];
    for s in -(half as i64)..=(half as i64) {
        let w = 0.5 * (1.0 + (std::f64::consts::PI * s as f64 / (half as f64 + 1.0)).cos());
        taps[(s + half as i64) as usize] = desired[s.rem_euclid(n as i64) as usize] * w;
    }
    dft.forward(&mut taps);
    let mean_power = taps.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    let scale = 1.0 / mean_power.sqrt();
    taps.iter().map(|z| z * scale).collect()
}

fn spread_db(cfr: &[Complex64]) -> f64 {
    let (lo, hi) = cfr
        .iter()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), a| (lo.min(a), hi.max(a)));
    20.0 * (hi / lo).log10()
}

/// Compact-support channel whose gain falls from the lower to the upper band
/// edge, with a peak-to-trough magnitude spread of `tilt_db`.
///
/// The response is a Hann-windowed FIR approximation of a linear-in-dB slope
/// with taps at delays `0..=max_delay`, normalized to unit mean power.
pub fn tilted_cfr(n: usize, tilt_db: f64, max_delay: usize) -> Result<Vec<Complex64>> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::invalid(
            "waveform.n",
            "tilted channel needs an even length of at least 4",
        ));
    }
    if !(tilt_db >= 0.0 && tilt_db.is_finite()) {
        return Err(Error::invalid("radcom.tilt_db", "must be finite and non-negative"));
    }
    if max_delay < 2 || max_delay >= n {
        return Err(Error::invalid(
            "radcom.max_delay",
            format!("must lie in [2, {n}), got {max_delay}"),
        ));
    }
    if tilt_db == 0.0 {
        return Ok(vec![Complex64::new(1.0, 0.0); n]);
    }
    let mut hi = tilt_db;
    while spread_db(&windowed_tilt(n, hi, max_delay)) < tilt_db {
        hi *= 2.0;
        if hi > 400.0 {
            return Err(Error::invalid(
                "radcom.tilt_db",
                "not reachable with the requested channel length",
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if spread_db(&windowed_tilt(n, mid, max_delay)) < tilt_db {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(windowed_tilt(n, hi, max_delay))
}

#[derive(Debug, Serialize, Deserialize)]
struct CfrRow {
    bin: usize,
    re: f64,
    im: f64,
}

/// Reads a CFR from CSV rows `bin,re,im` (header required, each bin once).
pub fn cfr_from_csv<R: Read>(reader: R) -> Result<Vec<Complex64>> {
    let mut rows: Vec<CfrRow> = csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|r| r.bin);
    for (i, r) in rows.iter().enumerate() {
        if r.bin != i {
            return Err(Error::invalid(
                "cfr",
                format!("bins must cover 0..{} exactly once", rows.len()),
            ));
        }
    }
    if rows.is_empty() {
        return Err(Error::Empty("cfr"));
    }
    Ok(rows.into_iter().map(|r| Complex64::new(r.re, r.im)).collect())
}

/// Writes a CFR as CSV rows `bin,re,im`.
pub fn cfr_to_csv<W: Write>(cfr: &[Complex64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (bin, z) in cfr.iter().enumerate() {
        w.serialize(CfrRow {
            bin,
            re: z.re,
            im: z.im,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Passes a serialized frame through the communication channel.
///
/// Every symbol is circularly convolved with the CIR implied by `cfg.cfr`, the
/// cyclic prefix is rebuilt, and AWGN is added relative to the noise-free
/// output power.
pub fn apply_comm_channel(
    stream: &SampleStream,
    cfg: &CommChannelConfig,
    params: &WaveformParams,
) -> Result<SampleStream> {
    stream.check_len(params)?;
    cfg.validate(params.n)?;
    let fraction = cfg.delay_spread_fraction(params.n_cp);
    if fraction > DELAY_SPREAD_TOLERANCE {
        return Err(Error::DelaySpread {
            fraction,
            n_cp: params.n_cp,
        });
    }
    let n = params.n;
    let n_cp = params.n_cp;
    let dft = Dft::new(n);
    let mut out = deserialize(stream, params)?.into_vec();
    out.par_chunks_mut(params.symbol_len()).for_each(|col| {
        let mut core = col[n_cp..].to_vec();
        dft.forward(&mut core);
        for (z, h) in core.iter_mut().zip(&cfg.cfr) {
            *z *= h;
        }
        dft.inverse(&mut core);
        col[..n_cp].copy_from_slice(&core[n - n_cp..]);
        col[n_cp..].copy_from_slice(&core);
    });
    let mut rx = SampleStream::new(out, stream.sample_rate_hz);
    if let Some(snr_db) = cfg.snr_db {
        let variance = noise_variance(rx.mean_power(), snr_db);
        add_awgn(&mut seeded(cfg.rng_seed), &mut rx.samples, variance);
    }
    Ok(rx)
}
