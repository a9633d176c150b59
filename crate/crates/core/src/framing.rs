//! Transmit frame construction: radar pilot, FrDM MIMO pilots, sector-modulated
//! RadCom symbols, QPSK mapping, cyclic prefix and serialization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fresnel::FresnelTransform;
use crate::matrix::{ComplexMatrix, FresnelFrame, TimeFrame};

/// OCDM numerology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformParams {
    /// Subchirps per symbol.
    pub n: usize,
    /// Symbols per frame.
    pub m: usize,
    /// Cyclic prefix length in samples.
    pub n_cp: usize,
    /// Bandwidth, equal to the sample rate.
    pub bandwidth_hz: f64,
    /// Carrier frequency.
    pub carrier_hz: f64,
}

impl WaveformParams {
    pub fn new(n: usize, m: usize, n_cp: usize, bandwidth_hz: f64, carrier_hz: f64) -> Result<Self> {
        let p = Self {
            n,
            m,
            n_cp,
            bandwidth_hz,
            carrier_hz,
        };
        p.validate()?;
        Ok(p)
    }

    /// 2048 subchirps, 5120 symbols, no CP, 1 GHz at 79 GHz.
    pub fn automotive() -> Self {
        Self {
            n: 2048,
            m: 5120,
            n_cp: 0,
            bandwidth_hz: 1e9,
            carrier_hz: 79e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 {
            return Err(Error::invalid(
                "waveform.n",
                format!("must be even and positive, got {}", self.n),
            ));
        }
        if self.m == 0 {
            return Err(Error::invalid("waveform.m", "must be positive"));
        }
        if self.n_cp >= self.n {
            return Err(Error::invalid(
                "waveform.n_cp",
                format!("must be smaller than n = {}, got {}", self.n, self.n_cp),
            ));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("waveform.bandwidth_hz", "must be positive and finite"));
        }
        if !(self.carrier_hz > self.bandwidth_hz && self.carrier_hz.is_finite()) {
            return Err(Error::invalid(
                "waveform.carrier_hz",
                "must be finite and exceed the bandwidth",
            ));
        }
        Ok(())
    }

    /// Samples per symbol including the cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.n + self.n_cp
    }

    /// Samples per frame.
    pub fn stream_len(&self) -> usize {
        self.m * self.symbol_len()
    }

    /// Subchirp (and subcarrier) spacing `B/N`.
    pub fn subchirp_spacing_hz(&self) -> f64 {
        self.bandwidth_hz / self.n as f64
    }

    pub fn symbol_duration_s(&self) -> f64 {
        self.symbol_len() as f64 / self.bandwidth_hz
    }

    pub fn with_cp(self, n_cp: usize) -> Self {
        Self { n_cp, ..self }
    }

    pub fn with_symbols(self, m: usize) -> Self {
        Self { m, ..self }
    }
}

/// FrDM multiplexing layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MimoConfig {
    /// Number of transmitters `P`.
    pub transmitters: usize,
    /// Number of receivers `Q`.
    pub receivers: usize,
}

impl MimoConfig {
    pub fn new(transmitters: usize, receivers: usize) -> Self {
        Self {
            transmitters,
            receivers,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.transmitters == 0 {
            return Err(Error::invalid("mimo.transmitters", "must be at least 1"));
        }
        if self.receivers == 0 {
            return Err(Error::invalid("mimo.receivers", "must be at least 1"));
        }
        if n % self.transmitters != 0 {
            return Err(Error::invalid(
                "mimo.transmitters",
                format!("n = {n} is not divisible by {}", self.transmitters),
            ));
        }
        Ok(())
    }

    /// Rows per transmitter slice, `N/P`.
    pub fn slice_len(&self, n: usize) -> usize {
        n / self.transmitters
    }

    fn check_tx(&self, p: usize) -> Result<()> {
        if p >= self.transmitters {
            return Err(Error::invalid(
                "mimo.p",
                format!("transmitter index {p} out of range for P = {}", self.transmitters),
            ));
        }
        Ok(())
    }
}

/// Layout of a sector-modulated RadCom symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadComFrameSpec {
    /// Pilot and guard sector length.
    pub n_cp: usize,
    /// Pilot subchirp energy.
    pub e_rad: f64,
    /// Mean constellation energy of the data subchirps.
    pub e_com: f64,
}

impl Default for RadComFrameSpec {
    fn default() -> Self {
        Self {
            n_cp: 0,
            e_rad: 1.0,
            e_com: 1.0,
        }
    }
}

impl RadComFrameSpec {
    pub fn new(n_cp: usize, e_rad: f64, e_com: f64) -> Self {
        Self { n_cp, e_rad, e_com }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_cp == 0 || 2 * self.n_cp > n {
            return Err(Error::invalid(
                "radcom.n_cp",
                format!("need 1 <= n_cp and 2*n_cp - 1 < n = {n}, got {}", self.n_cp),
            ));
        }
        if !(self.e_rad > 0.0 && self.e_rad.is_finite()) {
            return Err(Error::invalid("radcom.e_rad", "must be positive and finite"));
        }
        if !(self.e_com > 0.0 && self.e_com.is_finite()) {
            return Err(Error::invalid("radcom.e_com", "must be positive and finite"));
        }
        Ok(())
    }

    /// Number of modulated subchirps `N - 2N_CP + 1`.
    pub fn data_subchirps(&self, n: usize) -> usize {
        n + 1 - 2 * self.n_cp
    }

    /// First modulated row; data occupies `n_cp..=n - n_cp`.
    pub fn data_start(&self) -> usize {
        self.n_cp
    }

    /// QPSK payload bits per frame.
    pub fn bits_per_frame(&self, params: &WaveformParams) -> usize {
        2 * self.data_subchirps(params.n) * params.m
    }

    /// QPSK throughput in bit/s.
    pub fn data_rate_bps(&self, params: &WaveformParams) -> f64 {
        2.0 * self.data_subchirps(params.n) as f64 / params.symbol_duration_s()
    }

    /// Maps payload bits to the `(N - 2N_CP + 1) × M` data matrix scaled to `E_com`.
    pub fn symbols_from_bits(&self, params: &WaveformParams, bits: &[bool]) -> Result<ComplexMatrix> {
        let rows = self.data_subchirps(params.n);
        let expected = self.bits_per_frame(params);
        if bits.len() != expected {
            return Err(Error::DimensionMismatch {
                field: "data_bits",
                expected,
                actual: bits.len(),
            });
        }
        let scale = self.e_com.sqrt();
        let symbols: Vec<_> = qpsk_map(bits)?.into_iter().map(|s| s * scale).collect();
        ComplexMatrix::from_col_major(rows, params.m, symbols)
    }
}

/// Serialized transmit or receive samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl SampleStream {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean power per complex sample.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn check_len(&self, params: &WaveformParams) -> Result<()> {
        if self.samples.len() != params.stream_len() {
            return Err(Error::DimensionMismatch {
                field: "stream",
                expected: params.stream_len(),
                actual: self.samples.len(),
            });
        }
        Ok(())
    }
}

fn unit(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Radar pilot: only subchirp 0 active in every symbol.
pub fn build_pilot_frame(params: &WaveformParams) -> FresnelFrame {
    ComplexMatrix::from_fn(params.n, params.m, |k, _| unit(if k == 0 { 1.0 } else { 0.0 }))
}

/// FrDM pilot of transmitter `p`: subchirp `p·N/P` active in every symbol.
pub fn build_mimo_pilot_frame(params: &WaveformParams, mimo: &MimoConfig, p: usize) -> Result<FresnelFrame> {
    mimo.validate(params.n)?;
    mimo.check_tx(p)?;
    let active = p * mimo.slice_len(params.n);
    Ok(ComplexMatrix::from_fn(params.n, params.m, |k, _| {
        unit(if k == active { 1.0 } else { 0.0 })
    }))
}

/// Sector-modulated RadCom frame: pilot at row 0, data at rows `N_CP..=N-N_CP`,
/// nulls elsewhere.
pub fn build_radcom_frame(
    params: &WaveformParams,
    spec: &RadComFrameSpec,
    symbols: &ComplexMatrix,
) -> Result<FresnelFrame> {
    spec.validate(params.n)?;
    let rows = spec.data_subchirps(params.n);
    if symbols.rows() != rows {
        return Err(Error::DimensionMismatch {
            field: "symbols.rows",
            expected: rows,
            actual: symbols.rows(),
        });
    }
    if symbols.cols() != params.m {
        return Err(Error::DimensionMismatch {
            field: "symbols.cols",
            expected: params.m,
            actual: symbols.cols(),
        });
    }
    let pilot = unit(spec.e_rad.sqrt());
    let start = spec.data_start();
    Ok(ComplexMatrix::from_fn(params.n, params.m, |k, m| {
        if k == 0 {
            pilot
        } else if (start..start + rows).contains(&k) {
            symbols.get(k - start, m)
        } else {
            unit(0.0)
        }
    }))
}

/// Gray-coded unit-energy QPSK: bit pair `(b0, b1)` maps to
/// `((1 - 2b0) + i(1 - 2b1)) / √2`, so `00` maps to `(1 + i)/√2`.
pub fn qpsk_map(bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::invalid(
            "bits",
            format!("length must be even, got {}", bits.len()),
        ));
    }
    let a = std::f64::consts::FRAC_1_SQRT_2;
    Ok(bits
        .chunks_exact(2)
        .map(|b| Complex64::new(if b[0] { -a } else { a }, if b[1] { -a } else { a }))
        .collect())
}

/// Minimum-distance hard decision for [`qpsk_map`].
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<bool> {
    symbols.iter().flat_map(|s| [s.re < 0.0, s.im < 0.0]).collect()
}

/// Column-wise inverse Fresnel transform.
pub fn to_time_frame(x: &FresnelFrame) -> Result<TimeFrame> {
    let plan = FresnelTransform::new(x.rows())?;
    let mut out = x.clone();
    plan.inverse_frame(&mut out)?;
    Ok(out)
}

/// Column-wise forward Fresnel transform.
pub fn to_fresnel_frame(x: &TimeFrame) -> Result<FresnelFrame> {
    let plan = FresnelTransform::new(x.rows())?;
    let mut out = x.clone();
    plan.forward_frame(&mut out)?;
    Ok(out)
}

/// Prepends the last `n_cp` samples of each column.
pub fn add_cp(x: &TimeFrame, n_cp: usize) -> Result<ComplexMatrix> {
    let n = x.rows();
    if n_cp >= n.max(1) {
        return Err(Error::invalid(
            "n_cp",
            format!("must be smaller than the symbol length {n}"),
        ));
    }
    Ok(ComplexMatrix::from_fn(n + n_cp, x.cols(), |r, c| {
        if r < n_cp {
            x.get(n - n_cp + r, c)
        } else {
            x.get(r - n_cp, c)
        }
    }))
}

/// Drops the first `n_cp` samples of each column.
pub fn remove_cp(x: &ComplexMatrix, n_cp: usize) -> Result<TimeFrame> {
    if n_cp >= x.rows().max(1) {
        return Err(Error::invalid(
            "n_cp",
            format!("must be smaller than the column length {}", x.rows()),
        ));
    }
    x.row_slice(n_cp, x.rows() - n_cp)
}

/// Concatenates columns in symbol order.
pub fn serialize(x: &ComplexMatrix, sample_rate_hz: f64) -> SampleStream {
    SampleStream::new(x.as_slice().to_vec(), sample_rate_hz)
}

/// Splits a stream into `M` columns of `N + N_CP` samples.
pub fn deserialize(stream: &SampleStream, params: &WaveformParams) -> Result<ComplexMatrix> {
    stream.check_len(params)?;
    ComplexMatrix::from_col_major(params.symbol_len(), params.m, stream.samples.clone())
}

/// IDFnT, CP insertion and serialization in one step.
pub fn transmit_stream(x: &FresnelFrame, params: &WaveformParams) -> Result<SampleStream> {
    if x.rows() != params.n || x.cols() != params.m {
        return Err(Error::DimensionMismatch {
            field: "frame",
            expected: params.n * params.m,
            actual: x.rows() * x.cols(),
        });
    }
    let time = to_time_frame(x)?;
    Ok(serialize(&add_cp(&time, params.n_cp)?, params.bandwidth_hz))
}
