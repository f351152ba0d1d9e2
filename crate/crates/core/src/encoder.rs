//! Single-pass encoder: forward DCT, table quantization, SymLen packing.

use crate::bitstream::{encode_symlen, CompressedBlob};
use crate::error::{Error, Result};
use crate::profile::{analyze_strip, quantize_coeffs, DomainProfile};
use crate::transform::DctPlan;

/// Quantized levels of a strip, `E` per window, before entropy coding.
pub fn quantize_strip(samples: &[f32], profile: &DomainProfile) -> Result<Vec<u8>> {
    let params = profile.params();
    let plan = DctPlan::new(params.window_len)?;
    let coeffs = analyze_strip(samples, &plan, params.retained);
    Ok(quantize_coeffs(&coeffs, &profile.table))
}

pub fn compress(samples: &[f32], profile: &DomainProfile) -> Result<CompressedBlob> {
    if samples.is_empty() {
        return Err(Error::Input("cannot compress an empty signal".into()));
    }
    let levels = quantize_strip(samples, profile)?;
    let stream = encode_symlen(&levels, &profile.codebook)?;
    CompressedBlob::new(
        profile.table,
        profile.codebook.clone(),
        samples.len() as u64,
        stream,
    )
}

pub fn compress_to_bytes(samples: &[f32], profile: &DomainProfile) -> Result<Vec<u8>> {
    Ok(compress(samples, profile)?.to_bytes())
}
