//! Domain profiles: the offline-trained quantization table and codebook.

use crate::bitstream::{read_model, read_preamble, write_model, Cursor};
use crate::entropy::{Codebook, SymbolHistogram, DEFAULT_MAX_CODE_LEN};
use crate::error::{Error, ParseError, Result};
use crate::quantization::{table_from_pools, CodecParams, QuantTable};
use crate::transform::{window_count, DctPlan};

pub const PROFILE_MAGIC: [u8; 4] = *b"FPTP";
pub const PROFILE_VERSION: u8 = 1;

/// Serialized profile size in bytes.
pub const PROFILE_LEN: usize = 4 + 1 + 4 + 5 * 4 + 1 + 256;

/// A quantization table and codebook deployed together for one signal domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainProfile {
    pub table: QuantTable,
    pub codebook: Codebook,
}

impl DomainProfile {
    pub fn params(&self) -> &CodecParams {
        self.table.params()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(PROFILE_LEN);
        out.extend_from_slice(&PROFILE_MAGIC);
        out.push(PROFILE_VERSION);
        write_model(&mut out, &self.table, &self.codebook);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        let mut cur = Cursor::new(bytes);
        read_preamble(&mut cur, PROFILE_MAGIC, PROFILE_VERSION)?;
        let (table, codebook) = read_model(&mut cur)?;
        if cur.remaining() != 0 {
            return Err(ParseError::LengthMismatch {
                expected: PROFILE_LEN,
                actual: bytes.len(),
            });
        }
        Ok(DomainProfile { table, codebook })
    }
}

/// Forward transform of a strip, `E` coefficients per zero-padded window.
pub fn analyze_strip(samples: &[f32], plan: &DctPlan, retained: usize) -> Vec<f32> {
    let n = plan.window_len();
    let windows = window_count(samples.len(), n);
    let mut coeffs = vec![0f32; windows * retained];
    let mut padded = vec![0f32; n];
    for (chunk, out) in samples.chunks(n).zip(coeffs.chunks_exact_mut(retained)) {
        let window = if chunk.len() == n {
            chunk
        } else {
            padded[..chunk.len()].copy_from_slice(chunk);
            padded[chunk.len()..].fill(0.0);
            &padded
        };
        plan.forward_into(window, out);
    }
    coeffs
}

/// Quantizes a flat coefficient array window by window.
pub fn quantize_coeffs(coeffs: &[f32], table: &QuantTable) -> Vec<u8> {
    let e = table.params().retained;
    let mut levels = vec![0u8; coeffs.len()];
    for (c, l) in coeffs.chunks_exact(e).zip(levels.chunks_exact_mut(e)) {
        table.quantize_into(c, l);
    }
    levels
}

/// Trains a profile on representative strips.
pub fn train_profile<S: AsRef<[f32]>>(
    strips: &[S],
    params: CodecParams,
    max_code_len: u8,
) -> Result<DomainProfile> {
    params.validate()?;
    let plan = DctPlan::new(params.window_len)?;
    let e = params.retained;
    let per_strip: Vec<Vec<f32>> = strips
        .iter()
        .map(|s| s.as_ref())
        .filter(|s| !s.is_empty())
        .map(|s| analyze_strip(s, &plan, e))
        .collect();
    if per_strip.is_empty() {
        return Err(Error::Training("no samples to train on".into()));
    }

    let (b1, b2) = (params.linear_start, params.zeroed_start);
    let mut zone0 = Vec::new();
    let mut zone1 = Vec::new();
    for coeffs in &per_strip {
        for w in coeffs.chunks_exact(e) {
            zone0.extend_from_slice(&w[..b1]);
            zone1.extend_from_slice(&w[b1..b2]);
        }
    }
    let table = table_from_pools(params, zone0, zone1)?;

    let mut hist = SymbolHistogram::default();
    for coeffs in &per_strip {
        hist.add(&quantize_coeffs(coeffs, &table));
    }
    let codebook = Codebook::from_histogram(&hist, max_code_len)?;
    Ok(DomainProfile { table, codebook })
}

/// [`train_profile`] with the default maximum code length.
pub fn train_default<S: AsRef<[f32]>>(strips: &[S], params: CodecParams) -> Result<DomainProfile> {
    train_profile(strips, params, DEFAULT_MAX_CODE_LEN)
}
