use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evm::slice_rows;
use crate::channel::DopplerSign;
use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::framing::{add_cp, deserialize, remove_cp, serialize, SampleStream, WaveformParams};
use crate::fresnel::phase_fold_correct_in_place;
use crate::matrix::ComplexMatrix;
use crate::rxproc::{doppler_process, CirMatrix, CirMode, RangeVelocityImage};

/// Uniform comb of pilot subcarriers at DFT bins `0, spacing, 2·spacing, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmPilotLayout {
    /// Pilot spacing in subcarriers; 0 disables pilots.
    pub spacing: usize,
}

impl Default for OfdmPilotLayout {
    fn default() -> Self {
        Self { spacing: 8 }
    }
}

impl OfdmPilotLayout {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.spacing == 1 || (self.spacing > 0 && n % self.spacing != 0) {
            return Err(Error::invalid(
                "ofdm.pilot_spacing",
                format!("must be 0 or a divisor of n = {n} greater than 1, got {}", self.spacing),
            ));
        }
        Ok(())
    }

    pub fn is_pilot(&self, g: usize) -> bool {
        self.spacing > 0 && g % self.spacing == 0
    }

    pub fn pilot_bins(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&g| self.is_pilot(g)).collect()
    }

    pub fn data_bins(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&g| !self.is_pilot(g)).collect()
    }

    /// QPSK throughput in bit/s.
    pub fn data_rate_bps(&self, params: &WaveformParams) -> f64 {
        2.0 * self.data_bins(params.n).len() as f64 / params.symbol_duration_s()
    }
}

/// Subcarrier-domain OFDM frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    pub symbols: ComplexMatrix,
    pub n_cp: usize,
    pub layout: OfdmPilotLayout,
}

impl OfdmFrame {
    /// Known pilot on subcarrier `g`: a fixed pseudo-random QPSK sequence
    /// scaled to the data energy.
    pub fn pilot_symbol(g: usize, e_com: f64) -> Complex64 {
        let mut h = (g as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
        let a = (e_com / 2.0).sqrt();
        Complex64::new(if h & 1 == 0 { a } else { -a }, if h & 2 == 0 { a } else { -a })
    }
}

/// Places data on the non-pilot subcarriers and pilots on the comb.
pub fn ofdm_build_frame(
    params: &WaveformParams,
    layout: OfdmPilotLayout,
    data: &ComplexMatrix,
    e_com: f64,
) -> Result<OfdmFrame> {
    layout.validate(params.n)?;
    let bins = layout.data_bins(params.n);
    if data.rows() != bins.len() || data.cols() != params.m {
        return Err(Error::DimensionMismatch {
            field: "data",
            expected: bins.len() * params.m,
            actual: data.rows() * data.cols(),
        });
    }
    let mut symbols = ComplexMatrix::from_fn(params.n, params.m, |g, _| OfdmFrame::pilot_symbol(g, e_com));
    for m in 0..params.m {
        for (r, &g) in bins.iter().enumerate() {
            symbols.set(g, m, data.get(r, m));
        }
    }
    Ok(OfdmFrame {
        symbols,
        n_cp: params.n_cp,
        layout,
    })
}

/// Column-wise inverse DFT with `1/N` scaling, CP insertion and serialization.
pub fn ofdm_modulate(frame: &OfdmFrame, params: &WaveformParams) -> Result<SampleStream> {
    if frame.symbols.rows() != params.n || frame.symbols.cols() != params.m {
        return Err(Error::DimensionMismatch {
            field: "ofdm.symbols",
            expected: params.n * params.m,
            actual: frame.symbols.rows() * frame.symbols.cols(),
        });
    }
    let dft = Dft::new(params.n);
    let mut time = frame.symbols.clone();
    time.as_mut_slice()
        .par_chunks_mut(params.n)
        .for_each(|c| dft.inverse(c));
    Ok(serialize(&add_cp(&time, params.n_cp)?, params.bandwidth_hz))
}

/// CP removal and column-wise forward DFT.
pub fn ofdm_demodulate(stream: &SampleStream, params: &WaveformParams) -> Result<ComplexMatrix> {
    let mut core = remove_cp(&deserialize(stream, params)?, params.n_cp)?;
    let dft = Dft::new(params.n);
    core.as_mut_slice()
        .par_chunks_mut(params.n)
        .for_each(|c| dft.forward(c));
    Ok(core)
}

/// Least-squares pilot estimates averaged over `avg_symbols`, interpolated to
/// every subcarrier through the `N/spacing`-tap time-domain response.
pub fn ofdm_estimate_cfr(y: &ComplexMatrix, frame: &OfdmFrame, avg_symbols: usize) -> Result<Vec<Complex64>> {
    let n = y.rows();
    let spacing = frame.layout.spacing;
    if spacing == 0 {
        return Err(Error::invalid("ofdm.pilot_spacing", "channel estimation needs pilots"));
    }
    if avg_symbols == 0 || avg_symbols > y.cols() {
        return Err(Error::invalid(
            "radcom.avg_symbols",
            format!("must lie in [1, {}]", y.cols()),
        ));
    }
    let pilots = frame.layout.pilot_bins(n);
    let mut ls: Vec<Complex64> = pilots
        .iter()
        .map(|&g| {
            (0..avg_symbols)
                .map(|m| y.get(g, m) / frame.symbols.get(g, m))
                .sum::<Complex64>()
                / avg_symbols as f64
        })
        .collect();
    Dft::new(pilots.len()).inverse(&mut ls);
    let mut cir = vec![Complex64::new(0.0, 0.0); n];
    cir[..ls.len()].copy_from_slice(&ls);
    Dft::new(n).forward(&mut cir);
    Ok(cir)
}

/// Zero-forcing division on the data subcarriers.
pub fn ofdm_equalize(y: &ComplexMatrix, cfr: &[Complex64], layout: &OfdmPilotLayout) -> Result<ComplexMatrix> {
    if cfr.len() != y.rows() {
        return Err(Error::DimensionMismatch {
            field: "cfr",
            expected: y.rows(),
            actual: cfr.len(),
        });
    }
    if let Some(bin) = cfr.iter().position(|h| !(h.norm_sqr() > 0.0)) {
        return Err(Error::SingularEqualizer { bin });
    }
    let bins = layout.data_bins(y.rows());
    let eq = ComplexMatrix::from_fn(y.rows(), y.cols(), |g, m| y.get(g, m) / cfr[g]);
    Ok(slice_rows(&eq, &bins))
}

/// Spectral-division radar processing: `Y/X` per subcarrier, inverse DFT per
/// symbol for range, then the same Doppler processing as the OCDM receiver.
pub fn ofdm_radar_process(
    tx: &ComplexMatrix,
    rx: &ComplexMatrix,
    params: &WaveformParams,
    sign: DopplerSign,
) -> Result<RangeVelocityImage> {
    if tx.rows() != rx.rows() || tx.cols() != rx.cols() {
        return Err(Error::DimensionMismatch {
            field: "rx",
            expected: tx.rows() * tx.cols(),
            actual: rx.rows() * rx.cols(),
        });
    }
    let n = tx.rows();
    let mut ratio = ComplexMatrix::zeros(n, tx.cols());
    for m in 0..tx.cols() {
        for g in 0..n {
            let x = tx.get(g, m);
            if !(x.norm_sqr() > 0.0) {
                return Err(Error::ZeroTransmitSymbol {
                    subcarrier: g,
                    symbol: m,
                });
            }
            ratio.set(g, m, rx.get(g, m) / x);
        }
    }
    let dft = Dft::new(n);
    ratio.as_mut_slice().par_chunks_mut(n).for_each(|c| dft.inverse(c));
    // Same baseband bin ordering as the delay model, hence the same fold.
    phase_fold_correct_in_place(&mut ratio);
    doppler_process(&CirMatrix::new(ratio, CirMode::Siso), params, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        apply_comm_channel, apply_radar_channel, tilted_cfr, CommChannelConfig, RadarChannelConfig, Scatterer,
    };
    use crate::comms::evm_and_snr;
    use crate::framing::qpsk_map;
    use crate::noise::{random_bits, seeded};
    use crate::rxproc::estimate_peak;

    fn params(n: usize, m: usize, n_cp: usize) -> WaveformParams {
        WaveformParams::new(n, m, n_cp, 1e9, 79e9).unwrap()
    }

    fn random_frame(p: &WaveformParams, layout: OfdmPilotLayout, seed: u64) -> (ComplexMatrix, OfdmFrame) {
        let rows = layout.data_bins(p.n).len();
        let bits = random_bits(&mut seeded(seed), 2 * rows * p.m);
        let data = ComplexMatrix::from_col_major(rows, p.m, qpsk_map(&bits).unwrap()).unwrap();
        let frame = ofdm_build_frame(p, layout, &data, 1.0).unwrap();
        (data, frame)
    }

    #[test]
    fn reference_data_rate() {
        let p = WaveformParams::automotive().with_cp(512);
        let rate = OfdmPilotLayout::default().data_rate_bps(&p);
        assert_eq!((rate / 1e7).round() / 100.0, 1.40);
    }

    #[test]
    fn layout_checks() {
        assert!(OfdmPilotLayout { spacing: 1 }.validate(64).is_err());
        assert!(OfdmPilotLayout { spacing: 6 }.validate(64).is_err());
        assert!(OfdmPilotLayout { spacing: 0 }.validate(64).is_ok());
        assert_eq!(OfdmPilotLayout { spacing: 8 }.pilot_bins(32), vec![0, 8, 16, 24]);
    }

    #[test]
    fn loopback_is_exact() {
        let p = params(64, 3, 16);
        let layout = OfdmPilotLayout::default();
        let (data, frame) = random_frame(&p, layout, 1);
        let y = ofdm_demodulate(&ofdm_modulate(&frame, &p).unwrap(), &p).unwrap();
        assert!(y.max_abs_diff(&frame.symbols) < 1e-12);
        let cfr = ofdm_estimate_cfr(&y, &frame, 3).unwrap();
        let rx = ofdm_equalize(&y, &cfr, &layout).unwrap();
        assert!(rx.max_abs_diff(&data) < 1e-12);
        assert_eq!(evm_and_snr(&rx, &data).unwrap().bit_errors, 0);
    }

    #[test]
    fn comb_interpolation_recovers_short_channel() {
        let p = params(128, 2, 32);
        let layout = OfdmPilotLayout::default();
        let (data, frame) = random_frame(&p, layout, 2);
        let cfg = CommChannelConfig::new(tilted_cfr(128, 10.0, 12).unwrap());
        let rx = apply_comm_channel(&ofdm_modulate(&frame, &p).unwrap(), &cfg, &p).unwrap();
        let y = ofdm_demodulate(&rx, &p).unwrap();
        let cfr = ofdm_estimate_cfr(&y, &frame, 2).unwrap();
        let err = cfr
            .iter()
            .zip(&cfg.cfr)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
        assert!(ofdm_equalize(&y, &cfr, &layout).unwrap().max_abs_diff(&data) < 1e-9);
    }

    #[test]
    fn radar_peak_matches_ocdm_bin() {
        let p = params(64, 8, 16);
        let layout = OfdmPilotLayout::default();
        let (_, frame) = random_frame(&p, layout, 3);
        let cfg = RadarChannelConfig::noiseless(vec![Scatterer::new(9.0, 0.0)]);
        let rx = apply_radar_channel(&ofdm_modulate(&frame, &p).unwrap(), &cfg, &p).unwrap();
        let y = ofdm_demodulate(&rx, &p).unwrap();
        let img = ofdm_radar_process(&frame.symbols, &y, &p, DopplerSign::default()).unwrap();
        let pk = estimate_peak(&img).unwrap();
        assert_eq!((pk.range_bin, pk.velocity_bin), (9, 4));
        assert!((img.magnitude(9, 4) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn zero_transmit_symbol_rejected() {
        let p = params(8, 2, 0);
        let tx = ComplexMatrix::zeros(8, 2);
        assert!(matches!(
            ofdm_radar_process(&tx, &tx, &p, DopplerSign::default()),
            Err(Error::ZeroTransmitSymbol {
                subcarrier: 0,
                symbol: 0
            })
        ));
    }
}
