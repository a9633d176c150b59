//! Radar receiver: CP removal, Fresnel demodulation, phase-folding correction,
//! CIR extraction per mode, Doppler processing and range-velocity images.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{velocity_from_k_delta, DopplerSign};
use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::framing::{deserialize, remove_cp, MimoConfig, SampleStream, WaveformParams};
use crate::fresnel::{phase_fold_correct_in_place, FresnelTransform};
use crate::matrix::{ComplexMatrix, FresnelFrame};
use crate::SPEED_OF_LIGHT;

/// Which receiver produced a CIR matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CirMode {
    Siso,
    Mimo { p: usize, q: usize },
    RadCom,
}

/// Consecutive radar CIR estimates, one per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CirMatrix {
    data: ComplexMatrix,
    mode: CirMode,
}

impl CirMatrix {
    pub fn new(data: ComplexMatrix, mode: CirMode) -> Self {
        Self { data, mode }
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn mode(&self) -> CirMode {
        self.mode
    }

    pub fn into_data(self) -> ComplexMatrix {
        self.data
    }

    /// CIR taps per symbol.
    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    pub fn symbols(&self) -> usize {
        self.data.cols()
    }
}

/// Radar configuration variant for [`compute_radar_params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadarMode {
    Siso,
    Mimo { transmitters: usize },
    RadCom,
}

/// Range and velocity performance figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarParams {
    pub processing_gain_db: f64,
    pub range_resolution_m: f64,
    pub max_range_m: f64,
    pub velocity_resolution_mps: f64,
    pub max_velocity_mps: f64,
    /// Largest range whose echo stays inside the RadCom pilot sector.
    pub max_range_cp_m: Option<f64>,
    /// Unambiguous range of one FrDM slice.
    pub max_range_mimo_m: Option<f64>,
}

/// Resolution and ambiguity limits for a numerology.
pub fn compute_radar_params(params: &WaveformParams, mode: RadarMode) -> Result<RadarParams> {
    params.validate()?;
    let b = params.bandwidth_hz;
    let fc = params.carrier_hz;
    let n = params.n as f64;
    let len = params.symbol_len() as f64;
    let m = params.m as f64;
    let dr = SPEED_OF_LIGHT / (2.0 * b);
    let mut out = RadarParams {
        processing_gain_db: 10.0 * (n * m).log10(),
        range_resolution_m: dr,
        max_range_m: n * dr,
        velocity_resolution_mps: b * SPEED_OF_LIGHT / (2.0 * fc * len * m),
        max_velocity_mps: b * SPEED_OF_LIGHT / (4.0 * fc * len),
        max_range_cp_m: None,
        max_range_mimo_m: None,
    };
    match mode {
        RadarMode::Siso => {}
        RadarMode::Mimo { transmitters } => {
            MimoConfig::new(transmitters, 1).validate(params.n)?;
            out.max_range_mimo_m = Some((params.n / transmitters) as f64 * dr);
        }
        RadarMode::RadCom => out.max_range_cp_m = Some(params.n_cp as f64 * dr),
    }
    Ok(out)
}

/// Deserializes, strips the CP and Fresnel-demodulates every symbol, without
/// the phase-folding correction.
pub fn demodulate_frame(stream: &SampleStream, params: &WaveformParams) -> Result<FresnelFrame> {
    let mut core = remove_cp(&deserialize(stream, params)?, params.n_cp)?;
    FresnelTransform::new(params.n)?.forward_frame(&mut core)?;
    Ok(core)
}

/// [`demodulate_frame`] followed by the `e^{iπk}` phase-folding correction.
///
/// For a transmitted pilot frame the result is the corrected radar CIR matrix.
pub fn receive_frame(stream: &SampleStream, params: &WaveformParams) -> Result<FresnelFrame> {
    let mut y = demodulate_frame(stream, params)?;
    phase_fold_correct_in_place(&mut y);
    Ok(y)
}

/// Wraps a corrected pilot frame as a SISO CIR matrix.
pub fn siso_cir(y: FresnelFrame) -> CirMatrix {
    CirMatrix::new(y, CirMode::Siso)
}

/// Slice of transmitter `p` as seen by receiver `q`: rows `pN/P .. (p+1)N/P`.
pub fn mimo_demux(y: &FresnelFrame, mimo: &MimoConfig, p: usize, q: usize) -> Result<CirMatrix> {
    mimo.validate(y.rows())?;
    if p >= mimo.transmitters {
        return Err(Error::invalid("mimo.p", format!("transmitter {p} out of range")));
    }
    if q >= mimo.receivers {
        return Err(Error::invalid("mimo.q", format!("receiver {q} out of range")));
    }
    let len = mimo.slice_len(y.rows());
    Ok(CirMatrix::new(y.row_slice(p * len, len)?, CirMode::Mimo { p, q }))
}

/// Pilot sector rows `0..N_CP` of a corrected RadCom frame.
pub fn radcom_extract_cir(y: &FresnelFrame, n_cp: usize) -> Result<CirMatrix> {
    if n_cp == 0 {
        return Err(Error::invalid("radcom.n_cp", "must be positive"));
    }
    Ok(CirMatrix::new(y.row_slice(0, n_cp)?, CirMode::RadCom))
}

/// Taper applied across symbols before the Doppler DFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopplerWindow {
    #[default]
    Rectangular,
    Hann,
}

impl DopplerWindow {
    fn coefficients(self, m: usize) -> Vec<f64> {
        match self {
            DopplerWindow::Rectangular => vec![1.0; m],
            DopplerWindow::Hann => (0..m)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / m as f64).cos())
                .collect(),
        }
    }
}

/// Strongest image cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub range_m: f64,
    pub velocity_mps: f64,
    #[serde(rename = "power_dB")]
    pub power_db: f64,
    pub range_bin: usize,
    pub velocity_bin: usize,
}

/// `|I|` over range bins (rows) and velocity bins (columns).
///
/// Column `j` holds velocity `(j - ⌊M/2⌋)·Δv`, so the axis runs upward from
/// `-v_max` and zero velocity sits at column `⌊M/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeVelocityImage {
    rows: usize,
    cols: usize,
    magnitude: Vec<f64>,
    range_axis_m: Vec<f64>,
    velocity_axis_mps: Vec<f64>,
    peak: Option<Peak>,
}

impl RangeVelocityImage {
    /// Builds an image from row-major magnitudes and axes.
    pub fn new(magnitude: Vec<f64>, range_axis_m: Vec<f64>, velocity_axis_mps: Vec<f64>) -> Result<Self> {
        let rows = range_axis_m.len();
        let cols = velocity_axis_mps.len();
        if magnitude.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                field: "magnitude",
                expected: rows * cols,
                actual: magnitude.len(),
            });
        }
        let mut img = Self {
            rows,
            cols,
            magnitude,
            range_axis_m,
            velocity_axis_mps,
            peak: None,
        };
        img.peak = img.find_peak();
        Ok(img)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn magnitude(&self, row: usize, col: usize) -> f64 {
        self.magnitude[row * self.cols + col]
    }

    pub fn power(&self, row: usize, col: usize) -> f64 {
        self.magnitude(row, col).powi(2)
    }

    /// Row-major magnitudes.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn range_axis_m(&self) -> &[f64] {
        &self.range_axis_m
    }

    pub fn velocity_axis_mps(&self) -> &[f64] {
        &self.velocity_axis_mps
    }

    /// Column holding zero velocity.
    pub fn zero_velocity_col(&self) -> usize {
        self.cols / 2
    }

    /// Magnitudes along one velocity column.
    pub fn range_cut(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.magnitude(r, col)).collect()
    }

    pub fn peak(&self) -> Option<Peak> {
        self.peak
    }

    fn find_peak(&self) -> Option<Peak> {
        let mut best: Option<(usize, usize, f64)> = None;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.magnitude(r, c);
                let better = match best {
                    None => v > 0.0,
                    Some((br, bc, bv)) => {
                        v > bv
                            || (v == bv
                                && r == br
                                && self.velocity_axis_mps[c].abs() < self.velocity_axis_mps[bc].abs())
                    }
                };
                if better {
                    best = Some((r, c, v));
                }
            }
        }
        best.map(|(r, c, v)| Peak {
            range_m: self.range_axis_m[r],
            velocity_mps: self.velocity_axis_mps[c],
            power_db: 20.0 * v.log10(),
            range_bin: r,
            velocity_bin: c,
        })
    }
}

/// Velocity-bin index `u ∈ [-⌊M/2⌋, ⌈M/2⌉)` of image column `j`.
fn velocity_index(j: usize, m: usize) -> i64 {
    j as i64 - (m / 2) as i64
}

/// Row-wise DFT over symbols with the default rectangular window.
pub fn doppler_process(cir: &CirMatrix, params: &WaveformParams, sign: DopplerSign) -> Result<RangeVelocityImage> {
    doppler_process_windowed(cir, params, sign, DopplerWindow::Rectangular)
}

/// Row-wise DFT over symbols, rearranged into ascending velocity columns.
pub fn doppler_process_windowed(
    cir: &CirMatrix,
    params: &WaveformParams,
    sign: DopplerSign,
    window: DopplerWindow,
) -> Result<RangeVelocityImage> {
    let m = cir.symbols();
    if m < 2 {
        return Err(Error::invalid(
            "waveform.m",
            "Doppler processing needs at least 2 symbols",
        ));
    }
    if m != params.m {
        return Err(Error::DimensionMismatch {
            field: "cir.cols",
            expected: params.m,
            actual: m,
        });
    }
    let rows = cir.len();
    let w = window.coefficients(m);
    let dft = Dft::new(m);
    // DFT bin for each column: d = sign·u mod M, with u the velocity index.
    let bins: Vec<usize> = (0..m)
        .map(|j| {
            let d = sign.factor() as i64 * velocity_index(j, m);
            d.rem_euclid(m as i64) as usize
        })
        .collect();
    let data = cir.data();
    let mut magnitude = vec![0.0; rows * m];
    magnitude.par_chunks_mut(m).enumerate().for_each(|(r, out)| {
        let mut buf: Vec<Complex64> = (0..m).map(|c| data.get(r, c) * w[c]).collect();
        dft.forward(&mut buf);
        for (o, &b) in out.iter_mut().zip(&bins) {
            *o = buf[b].norm();
        }
    });
    let rp = compute_radar_params(params, RadarMode::Siso)?;
    let range_axis = (0..rows).map(|r| r as f64 * rp.range_resolution_m).collect();
    let velocity_axis = (0..m)
        .map(|j| {
            let d = sign.factor() * velocity_index(j, m) as f64;
            let k_delta = d * params.n as f64 / (m as f64 * params.symbol_len() as f64);
            velocity_from_k_delta(k_delta, params, sign)
        })
        .collect();
    RangeVelocityImage::new(magnitude, range_axis, velocity_axis)
}

/// Global image maximum; ties go to the lowest range, then lowest |velocity|.
pub fn estimate_peak(img: &RangeVelocityImage) -> Result<Peak> {
    if img.rows() == 0 || img.cols() == 0 {
        return Err(Error::Empty("image"));
    }
    img.peak().ok_or(Error::ZeroImage)
}
