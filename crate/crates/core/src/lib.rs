//! A lossy codec for sampled signals with a cheap sequential encoder and a
//! data-parallel decoder.
//!
//! Encoding runs a windowed DCT-II (keeping the first `E` of `N` bins), maps
//! the coefficients to byte levels with a three-zone quantizer, and packs
//! length-limited canonical Huffman codes into self-contained 64-bit words.
//! Each word records how many symbols it holds, so decoding splits across any
//! number of workers with an exclusive scan deciding where each word's output
//! goes.
//!
//! ```
//! use fptc::{compress, decompress, prd, smooth_corpus, train_default, CodecParams};
//!
//! let signal = smooth_corpus(8192, 1);
//! let profile = train_default(&[&signal], CodecParams::default()).unwrap();
//! let bytes = compress(&signal, &profile).unwrap().to_bytes();
//! let restored = decompress(&bytes).unwrap();
//! assert_eq!(restored.len(), signal.len());
//! assert!(prd(&signal, &restored).unwrap() < 5.0);
//! ```

pub mod bitstream;
pub mod cli;
pub mod decoder;
pub mod encoder;
pub mod entropy;
pub mod error;
pub mod metrics;
pub mod profile;
pub mod quantization;
pub mod signal_io;
pub mod synth;
pub mod transform;

pub use bitstream::{
    decode_word, encode_symlen, read_blob, write_blob, CompressedBlob, SymLenStream,
};
pub use decoder::{
    decompress, decompress_blob, decompress_with, default_workers, offsets_from_symlens,
    parallel_decode, reconstruct, Decoded, StageTimings,
};
pub use encoder::{compress, compress_to_bytes, quantize_strip};
pub use entropy::{
    build_histogram, build_lut, canonize, package_merge, Codebook, DecodeLut, SymbolHistogram,
};
pub use error::{Error, ParseError, Result};
pub use metrics::{
    compression_ratio, measure_throughput, pareto_front, prd, RdPoint, ThroughputReport,
};
pub use profile::{train_default, train_profile, DomainProfile};
pub use quantization::{
    dequantize_window, quantize_window, train_quant_table, CodecParams, QuantTable,
    QuantizedWindow, Zone,
};
pub use synth::{smooth_corpus, SineMix};
pub use transform::{forward_dct, inverse_dct, partition_strip, DctPlan, SpectralWindow, Window};
