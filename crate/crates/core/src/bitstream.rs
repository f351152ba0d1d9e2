//! SymLen word packing and the compressed container format.
//!
//! Codewords are packed MSB-first into 64-bit words and never straddle a word
//! boundary. Each word carries a separate 8-bit count of the symbols it holds,
//! so any word can be decoded from `(word, symlen, codebook)` alone.
//!
//! Container layout, all multi-byte integers little-endian:
//!
//! | field            | size              |
//! |------------------|-------------------|
//! | magic `"FPTC"`   | 4                 |
//! | version (1)      | 1                 |
//! | N, E, B1, B2     | 4 x u8            |
//! | mu, alpha1       | 2 x f32           |
//! | zone percentile  | f32               |
//! | A0, A1           | 2 x f32           |
//! | Lmax             | u8                |
//! | code lengths     | 256 x u8          |
//! | sample count     | u64               |
//! | word count W     | u64               |
//! | symlens          | W x u8            |
//! | words            | W x u64           |

use crate::entropy::{Codebook, DecodeLut, ALPHABET_SIZE};
use crate::error::{Error, ParseError, Result};
use crate::quantization::{CodecParams, QuantTable};
use crate::transform::window_count;

pub const WORD_BITS: u32 = 64;

pub const MAGIC: [u8; 4] = *b"FPTC";
pub const VERSION: u8 = 1;

/// Bytes before the symlen array.
pub const HEADER_LEN: usize = 4 + 1 + 4 + 5 * 4 + 1 + ALPHABET_SIZE + 8 + 8;

/// Packed code words with their per-word symbol counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymLenStream {
    pub words: Vec<u64>,
    pub symlens: Vec<u8>,
}

impl SymLenStream {
    pub fn symbol_count(&self) -> usize {
        self.symlens.iter().map(|&s| usize::from(s)).sum()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Greedy single-pass packing: a codeword goes into the current word if it
/// fits, otherwise the word is flushed and the codeword starts a fresh one.
pub fn encode_symlen(symbols: &[u8], codebook: &Codebook) -> Result<SymLenStream> {
    let mut table = [(0u64, 0u32); ALPHABET_SIZE];
    for (s, slot) in table.iter_mut().enumerate() {
        if let Some((code, len)) = codebook.code(s as u8) {
            *slot = (u64::from(code), u32::from(len));
        }
    }

    // Average codes are a few bits, so this rarely reallocates.
    let mut stream = SymLenStream {
        words: Vec::with_capacity(symbols.len() / 8 + 1),
        symlens: Vec::with_capacity(symbols.len() / 8 + 1),
    };
    let mut buffer = 0u64;
    let mut bit_size = 0u32;
    let mut count = 0u8;
    for &sym in symbols {
        let (code, len) = table[usize::from(sym)];
        if len == 0 {
            return Err(Error::param(format!("symbol {sym} has no codeword")));
        }
        if bit_size + len > WORD_BITS {
            stream.words.push(buffer);
            stream.symlens.push(count);
            buffer = 0;
            bit_size = 0;
            count = 0;
        }
        buffer |= code << (WORD_BITS - bit_size - len);
        bit_size += len;
        count += 1;
    }
    if count > 0 {
        stream.words.push(buffer);
        stream.symlens.push(count);
    }
    Ok(stream)
}

/// Why a single word failed to decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WordFault {
    Overrun { decoded: usize },
    NoCodeword { bit: u32 },
}

impl std::fmt::Display for WordFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WordFault::Overrun { decoded } => {
                write!(f, "codewords overrun 64 bits after {decoded} symbols")
            }
            WordFault::NoCodeword { bit } => write!(f, "no codeword matches at bit {bit}"),
        }
    }
}

/// Decodes `out.len()` symbols from `word`.
#[inline]
pub(crate) fn decode_word_into(word: u64, lut: &DecodeLut, out: &mut [u8]) -> Result<(), WordFault> {
    let max_len = u32::from(lut.max_len());
    let mut pos = 0u32;
    for (i, o) in out.iter_mut().enumerate() {
        if pos >= WORD_BITS {
            return Err(WordFault::Overrun { decoded: i });
        }
        // Bits past the end of the word read as zero.
        let prefix = (word << pos) >> (WORD_BITS - max_len);
        let entry = lut.lookup(prefix);
        if entry.len == 0 {
            return Err(WordFault::NoCodeword { bit: pos });
        }
        pos += u32::from(entry.len);
        if pos > WORD_BITS {
            return Err(WordFault::Overrun { decoded: i });
        }
        *o = entry.symbol;
    }
    Ok(())
}

/// Decodes exactly `symlen` symbols from one packed word.
pub fn decode_word(word: u64, symlen: u8, lut: &DecodeLut) -> Result<Vec<u8>> {
    let mut out = vec![0u8; usize::from(symlen)];
    decode_word_into(word, lut, &mut out).map_err(|f| Error::Corrupt(f.to_string()))?;
    Ok(out)
}

/// A parsed container: everything needed to reconstruct the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedBlob {
    table: QuantTable,
    codebook: Codebook,
    sample_count: u64,
    stream: SymLenStream,
}

impl CompressedBlob {
    pub fn new(
        table: QuantTable,
        codebook: Codebook,
        sample_count: u64,
        stream: SymLenStream,
    ) -> Result<Self> {
        if codebook.lengths().len() != ALPHABET_SIZE {
            return Err(Error::param("container codebooks must cover all 256 symbols"));
        }
        check_stream(table.params(), sample_count, &stream).map_err(Error::param)?;
        Ok(CompressedBlob {
            table,
            codebook,
            sample_count,
            stream,
        })
    }

    pub fn params(&self) -> &CodecParams {
        self.table.params()
    }

    pub fn table(&self) -> &QuantTable {
        &self.table
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn stream(&self) -> &SymLenStream {
        &self.stream
    }

    pub fn into_stream(self) -> SymLenStream {
        self.stream
    }

    /// Serialized size in bytes.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.stream.len() * 9
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        write_blob(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        read_blob(bytes)
    }
}

fn check_stream(params: &CodecParams, sample_count: u64, stream: &SymLenStream) -> Result<(), String> {
    if stream.words.len() != stream.symlens.len() {
        return Err(format!(
            "{} words but {} symlens",
            stream.words.len(),
            stream.symlens.len()
        ));
    }
    if let Some(w) = stream.symlens.iter().position(|&s| s == 0 || u32::from(s) > WORD_BITS) {
        return Err(format!("word {w} has symlen {}", stream.symlens[w]));
    }
    let windows = usize::try_from(sample_count)
        .map(|s| window_count(s, params.window_len))
        .map_err(|_| format!("sample count {sample_count} too large"))?;
    let expected = windows
        .checked_mul(params.retained)
        .ok_or_else(|| format!("sample count {sample_count} too large"))?;
    let actual = stream.symbol_count();
    if actual != expected {
        return Err(format!(
            "{sample_count} samples need {expected} symbols, stream holds {actual}"
        ));
    }
    Ok(())
}

pub fn write_blob(blob: &CompressedBlob) -> Vec<u8> {
    let mut out = Vec::with_capacity(blob.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    write_model(&mut out, &blob.table, &blob.codebook);
    out.extend_from_slice(&blob.sample_count.to_le_bytes());
    out.extend_from_slice(&(blob.stream.len() as u64).to_le_bytes());
    out.extend_from_slice(&blob.stream.symlens);
    for w in &blob.stream.words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    debug_assert_eq!(out.len(), blob.encoded_len());
    out
}

/// Bounds-checked little-endian reader.
pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], ParseError> {
        let available = self.bytes.len() - self.pos;
        if n > available {
            return Err(ParseError::Truncated {
                offset: self.pos,
                needed: n,
                available,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn f32(&mut self) -> Result<f32, ParseError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, ParseError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Reads the parameter, table and codebook block shared with profiles.
pub(crate) fn read_model(cur: &mut Cursor<'_>) -> Result<(QuantTable, Codebook), ParseError> {
    let window_len = usize::from(cur.u8()?);
    let retained = usize::from(cur.u8()?);
    let linear_start = usize::from(cur.u8()?);
    let zeroed_start = usize::from(cur.u8()?);
    let mu = cur.f32()?;
    let dead_ratio = cur.f32()?;
    let zone_percentile = cur.f32()?;
    let a0 = cur.f32()?;
    let a1 = cur.f32()?;
    let max_len = cur.u8()?;
    let lengths = cur.take(ALPHABET_SIZE)?.to_vec();
    let params = CodecParams {
        window_len,
        retained,
        linear_start,
        zeroed_start,
        mu,
        dead_ratio,
        zone_percentile,
    };
    let table = QuantTable::new(params, a0, a1)
        .map_err(|e| ParseError::Inconsistent(e.to_string()))?;
    let codebook = Codebook::from_lengths(lengths, max_len)
        .map_err(|e| ParseError::Inconsistent(e.to_string()))?;
    Ok((table, codebook))
}

pub(crate) fn write_model(out: &mut Vec<u8>, table: &QuantTable, codebook: &Codebook) {
    let p = table.params();
    for v in [p.window_len, p.retained, p.linear_start, p.zeroed_start] {
        out.push(v as u8);
    }
    for v in [p.mu, p.dead_ratio, p.zone_percentile, table.a0(), table.a1()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(codebook.max_len());
    out.extend_from_slice(codebook.lengths());
}

pub(crate) fn read_preamble(cur: &mut Cursor<'_>, magic: [u8; 4], version: u8) -> Result<(), ParseError> {
    let found: [u8; 4] = cur.take(4)?.try_into().unwrap();
    if found != magic {
        return Err(ParseError::BadMagic { found });
    }
    let v = cur.u8()?;
    if v != version {
        return Err(ParseError::UnsupportedVersion {
            found: v,
            expected: version,
        });
    }
    Ok(())
}

pub fn read_blob(bytes: &[u8]) -> Result<CompressedBlob, ParseError> {
    let mut cur = Cursor::new(bytes);
    read_preamble(&mut cur, MAGIC, VERSION)?;
    let (table, codebook) = read_model(&mut cur)?;
    let sample_count = cur.u64()?;
    let word_count = cur.u64()?;

    let body = usize::try_from(word_count)
        .ok()
        .and_then(|w| w.checked_mul(9))
        .ok_or_else(|| ParseError::Inconsistent(format!("word count {word_count} too large")))?;
    if cur.remaining() != body {
        return Err(ParseError::LengthMismatch {
            expected: HEADER_LEN.saturating_add(body),
            actual: bytes.len(),
        });
    }
    let w = body / 9;
    let symlens = cur.take(w)?.to_vec();
    let words = cur
        .take(w * 8)?
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let stream = SymLenStream { words, symlens };
    check_stream(table.params(), sample_count, &stream).map_err(ParseError::Inconsistent)?;
    Ok(CompressedBlob {
        table,
        codebook,
        sample_count,
        stream,
    })
}
