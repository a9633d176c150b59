//! Communication receivers for the sector-modulated RadCom frame and the OFDM
//! baseline, plus EVM and SNR statistics.

mod evm;
mod ofdm;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::framing::{RadComFrameSpec, WaveformParams};
use crate::fresnel::FresnelTransform;
use crate::matrix::{ComplexMatrix, FresnelFrame};

pub use evm::{constellation_to_csv, evm_and_snr, CommReport, EVM_FLOOR_DB};
pub use ofdm::{
    ofdm_build_frame, ofdm_demodulate, ofdm_equalize, ofdm_estimate_cfr, ofdm_modulate, ofdm_radar_process, OfdmFrame,
    OfdmPilotLayout,
};

/// Channel frequency response from the pilot sector of a received RadCom frame.
///
/// `y` is the demodulated frame before phase-folding correction. Rows
/// `0..N_CP` of the first `avg_symbols` columns are averaged, divided by the
/// pilot amplitude `√E_rad`, zero-padded to `N` and transformed by a DFT.
pub fn estimate_comm_cfr(y: &FresnelFrame, spec: &RadComFrameSpec, avg_symbols: usize) -> Result<Vec<Complex64>> {
    if avg_symbols == 0 {
        return Err(Error::invalid("radcom.avg_symbols", "must be at least 1"));
    }
    if avg_symbols > y.cols() {
        return Err(Error::invalid(
            "radcom.avg_symbols",
            format!("cannot exceed the {} received symbols", y.cols()),
        ));
    }
    spec.validate(y.rows())?;
    let n = y.rows();
    let scale = 1.0 / (avg_symbols as f64 * spec.e_rad.sqrt());
    let mut cir = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..avg_symbols {
        for (acc, v) in cir.iter_mut().zip(&y.column(m)[..spec.n_cp]) {
            *acc += v * scale;
        }
    }
    Dft::new(n).forward(&mut cir);
    Ok(cir)
}

/// Zero-forcing equalization per symbol in the frequency domain, returning the
/// data sector rows `N_CP..=N-N_CP` of the equalized Fresnel frame.
///
/// `y` is the demodulated frame before phase-folding correction.
pub fn equalize_and_extract(y: &FresnelFrame, cfr: &[Complex64], spec: &RadComFrameSpec) -> Result<ComplexMatrix> {
    let n = y.rows();
    spec.validate(n)?;
    if cfr.len() != n {
        return Err(Error::DimensionMismatch {
            field: "cfr",
            expected: n,
            actual: cfr.len(),
        });
    }
    if let Some(bin) = cfr
        .iter()
        .position(|h| !(h.norm_sqr() > 0.0) || !h.norm_sqr().is_finite())
    {
        return Err(Error::SingularEqualizer { bin });
    }
    let inv: Vec<Complex64> = cfr.iter().map(|h| h.inv()).collect();
    let fresnel = FresnelTransform::new(n)?;
    let dft = Dft::new(n);
    let mut eq = y.clone();
    eq.as_mut_slice().par_chunks_mut(n).try_for_each(|col| -> Result<()> {
        fresnel.inverse(col)?;
        dft.forward(col);
        for (z, g) in col.iter_mut().zip(&inv) {
            *z *= g;
        }
        dft.inverse(col);
        fresnel.forward(col)
    })?;
    eq.row_slice(spec.data_start(), spec.data_subchirps(n))
}

/// Analytic RMS EVM in dB of zero-forcing RadCom reception with a
/// pilot-sector channel estimate averaged over `avg_symbols` symbols.
///
/// AWGN is defined per sample relative to the received power. The thermal
/// term is the Fresnel-domain noise scaled by the mean of `1/|H|²`. The CIR
/// estimate error lives on the first `N_CP` taps; after zero forcing it acts
/// as the error response `ẽ ⊛ IDFT(1/H)` convolved with the transmitted
/// Fresnel symbol, so it is weighted by the symbol's sector power profile.
pub fn analytic_radcom_evm_db(
    cfr: &[Complex64],
    spec: &RadComFrameSpec,
    params: &WaveformParams,
    snr_db: f64,
    avg_symbols: usize,
) -> f64 {
    let n = params.n;
    let nf = n as f64;
    let data = spec.data_subchirps(n);
    let e_x = spec.e_rad + data as f64 * spec.e_com;
    let mean_gain = cfr.iter().map(|h| h.norm_sqr()).sum::<f64>() / nf;
    let mean_inv = cfr.iter().map(|h| 1.0 / h.norm_sqr()).sum::<f64>() / nf;
    let snr = 10f64.powf(snr_db / 10.0);
    let fresnel_noise = e_x * mean_gain / (nf * snr);
    let thermal = fresnel_noise * mean_inv / spec.e_com;

    let mut inv: Vec<Complex64> = cfr.iter().map(|h| 1.0 / h).collect();
    Dft::new(n).inverse(&mut inv);
    let inv_power: Vec<f64> = inv.iter().map(|z| z.norm_sqr()).collect();
    let tap_var = fresnel_noise / (avg_symbols as f64 * spec.e_rad);
    let mut profile = vec![0.0; n];
    profile[0] = spec.e_rad;
    profile[spec.data_start()..spec.data_start() + data].fill(spec.e_com);
    let estimate: f64 = (0..n)
        .map(|j| {
            let v: f64 = (0..spec.n_cp).map(|i| inv_power[(j + n - i) % n]).sum::<f64>() * tap_var;
            let hits: f64 = (spec.data_start()..spec.data_start() + data)
                .map(|k| profile[(k + n - j) % n])
                .sum();
            v * hits
        })
        .sum::<f64>()
        / (data as f64 * spec.e_com);
    10.0 * (thermal + estimate).log10()
}
