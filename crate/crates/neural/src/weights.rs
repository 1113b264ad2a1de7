//! Binary weight files.
//!
//! Layout (little-endian): magic `NNPR`, `u32` format version, `u32` layer
//! count, then per layer `u32` input width, `u32` output width, `u8`
//! activation code, `f32` dropout rate, `in * out` weights (row-major by
//! input) and `out` biases as `f32`.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::layer::{Activation, DenseLayer};
use crate::model::MlpModel;
use crate::NeuralError;

const MAGIC: &[u8; 4] = b"NNPR";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum WeightFileError {
    #[error("not a weight file (bad magic bytes)")]
    BadMagic,
    #[error("weight file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("weight file ends early")]
    TruncatedFile,
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("unknown activation code {0}")]
    BadActivation(u8),
    #[error("layer dimensions do not chain")]
    DimChainBroken,
    #[error("invalid model: {0}")]
    Model(NeuralError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

pub fn encode_weights(model: &MlpModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * model.parameter_count() + 13 * model.layers().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(model.layers().len() as u32).to_le_bytes());
    for layer in model.layers() {
        out.extend_from_slice(&(layer.in_dim as u32).to_le_bytes());
        out.extend_from_slice(&(layer.out_dim as u32).to_le_bytes());
        out.push(layer.activation.code());
        out.extend_from_slice(&layer.dropout.to_le_bytes());
        for v in layer.weights.iter().chain(&layer.biases) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WeightFileError> {
        if self.bytes.len() < n {
            return Err(WeightFileError::TruncatedFile);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, WeightFileError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, WeightFileError> {
        let len = n.checked_mul(4).ok_or(WeightFileError::TruncatedFile)?;
        Ok(self.take(len)?.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("four bytes"))).collect())
    }
}

pub fn decode_weights(bytes: &[u8]) -> Result<MlpModel, WeightFileError> {
    let mut r = Reader { bytes };
    if r.take(4).map_err(|_| WeightFileError::BadMagic)? != MAGIC {
        return Err(WeightFileError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(WeightFileError::VersionMismatch { found: version, expected: VERSION });
    }
    let count = r.u32()? as usize;
    let mut layers: Vec<DenseLayer> = Vec::new();
    for _ in 0..count {
        let in_dim = r.u32()? as usize;
        let out_dim = r.u32()? as usize;
        if let Some(prev) = layers.last() {
            if prev.out_dim != in_dim {
                return Err(WeightFileError::DimChainBroken);
            }
        }
        let code = r.take(1)?[0];
        let activation = Activation::from_code(code).ok_or(WeightFileError::BadActivation(code))?;
        let dropout = f32::from_le_bytes(r.take(4)?.try_into().expect("four bytes"));
        let weights = r.f32s(in_dim.checked_mul(out_dim).ok_or(WeightFileError::TruncatedFile)?)?;
        let biases = r.f32s(out_dim)?;
        layers.push(DenseLayer { in_dim, out_dim, weights, biases, activation, dropout });
    }
    if !r.bytes.is_empty() {
        return Err(WeightFileError::TrailingBytes(r.bytes.len()));
    }
    MlpModel::new(layers).map_err(WeightFileError::Model)
}

pub fn save_weights(model: &MlpModel, path: &Path) -> Result<(), WeightFileError> {
    fs::write(path, encode_weights(model))?;
    Ok(())
}

pub fn load_weights(path: &Path) -> Result<MlpModel, WeightFileError> {
    decode_weights(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MlpModel {
        MlpModel::glorot(&[5, 3, 1], 0.2, 8).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let model = small();
        let bytes = encode_weights(&model);
        assert_eq!(bytes.len(), 12 + 2 * 13 + 4 * model.parameter_count());
        assert_eq!(decode_weights(&bytes).unwrap(), model);
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("nnpr-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.bin");
        save_weights(&small(), &path).unwrap();
        assert_eq!(load_weights(&path).unwrap(), small());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn damaged_files_are_rejected() {
        let bytes = encode_weights(&small());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(decode_weights(&magic), Err(WeightFileError::BadMagic)));
        let mut version = bytes.clone();
        version[4] = 2;
        assert!(matches!(decode_weights(&version), Err(WeightFileError::VersionMismatch { found: 2, .. })));
        assert!(matches!(decode_weights(&bytes[..bytes.len() - 1]), Err(WeightFileError::TruncatedFile)));
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(matches!(decode_weights(&longer), Err(WeightFileError::TrailingBytes(1))));
        let mut act = bytes.clone();
        act[20] = 9;
        assert!(matches!(decode_weights(&act), Err(WeightFileError::BadActivation(9))));
        assert!(matches!(decode_weights(b"NN"), Err(WeightFileError::BadMagic)));
    }

    #[test]
    fn broken_chain_is_detected() {
        let mut bytes = encode_weights(&small());
        // second layer's input width follows the first layer's 5*3+3 floats
        let second = 12 + 13 + 4 * 18;
        bytes[second] = 4;
        assert!(matches!(decode_weights(&bytes), Err(WeightFileError::DimChainBroken)));
    }
}
