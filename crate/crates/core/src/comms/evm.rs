use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::qpsk_demap;
use crate::matrix::ComplexMatrix;

/// EVM reported for an error-free cell or row.
pub const EVM_FLOOR_DB: f64 = -120.0;

/// Link quality summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommReport {
    /// Mean over subchirps (rows) of the per-subchirp RMS EVM in dB.
    #[serde(rename = "evm_mean_dB")]
    pub evm_mean_db: f64,
    /// Standard deviation over subchirps of the per-subchirp RMS EVM in dB.
    #[serde(rename = "evm_std_dB")]
    pub evm_std_db: f64,
    /// Mean of the per-symbol EVM in dB over all received symbols.
    #[serde(rename = "symbol_evm_mean_dB")]
    pub symbol_evm_mean_db: f64,
    /// Standard deviation of the per-symbol EVM in dB.
    #[serde(rename = "symbol_evm_std_dB")]
    pub symbol_evm_std_db: f64,
    /// Reference power over error power.
    #[serde(rename = "est_snr_dB")]
    pub est_snr_db: f64,
    pub bit_errors: usize,
    pub total_bits: usize,
    pub data_rate_bps: f64,
    /// RMS EVM of every subchirp or subcarrier row, in dB.
    #[serde(rename = "per_subchirp_evm_dB")]
    pub per_subchirp_evm_db: Vec<f64>,
}

impl CommReport {
    pub fn with_data_rate(self, data_rate_bps: f64) -> Self {
        Self { data_rate_bps, ..self }
    }
}

fn db_or_floor(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * ratio.log10()).max(EVM_FLOOR_DB)
    } else {
        EVM_FLOOR_DB
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// EVM statistics and hard-decision bit errors of received QPSK symbols
/// against the transmitted ones (rows = subchirps, columns = symbols).
pub fn evm_and_snr(rx: &ComplexMatrix, reference: &ComplexMatrix) -> Result<CommReport> {
    if rx.rows() != reference.rows() || rx.cols() != reference.cols() {
        return Err(Error::DimensionMismatch {
            field: "rx_symbols",
            expected: reference.rows() * reference.cols(),
            actual: rx.rows() * rx.cols(),
        });
    }
    if reference.as_slice().is_empty() {
        return Err(Error::Empty("symbols"));
    }
    let ref_power = reference.energy() / reference.as_slice().len() as f64;
    if ref_power == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err: Vec<f64> = rx
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(a, b)| (a - b).norm_sqr())
        .collect();
    let rows = rx.rows();
    let cols = rx.cols();
    let per_row: Vec<f64> = (0..rows)
        .map(|r| {
            let e = (0..cols).map(|c| err[c * rows + r]).sum::<f64>() / cols as f64;
            db_or_floor(e / ref_power)
        })
        .collect();
    let per_symbol: Vec<f64> = err.iter().map(|e| db_or_floor(e / ref_power)).collect();
    let (evm_mean_db, evm_std_db) = mean_std(&per_row);
    let (symbol_evm_mean_db, symbol_evm_std_db) = mean_std(&per_symbol);
    let total_err: f64 = err.iter().sum();
    let est_snr_db = -db_or_floor(total_err / reference.energy());
    let rx_bits = qpsk_demap(rx.as_slice());
    let ref_bits = qpsk_demap(reference.as_slice());
    let bit_errors = rx_bits.iter().zip(&ref_bits).filter(|(a, b)| a != b).count();
    Ok(CommReport {
        evm_mean_db,
        evm_std_db,
        symbol_evm_mean_db,
        symbol_evm_std_db,
        est_snr_db,
        bit_errors,
        total_bits: ref_bits.len(),
        data_rate_bps: 0.0,
        per_subchirp_evm_db: per_row,
    })
}

/// Writes a constellation dump with columns `re,im,subchirp`.
pub fn constellation_to_csv<W: std::io::Write>(symbols: &ComplexMatrix, first_index: usize, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["re", "im", "subchirp"])?;
    for c in 0..symbols.cols() {
        for (r, z) in symbols.column(c).iter().enumerate() {
            w.write_record([z.re.to_string(), z.im.to_string(), (first_index + r).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn slice_rows(frame: &ComplexMatrix, rows: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), frame.cols(), |r, c| frame.get(rows[r], c))
}
