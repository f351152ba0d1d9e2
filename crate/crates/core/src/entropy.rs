//! Length-limited canonical Huffman codes.
//!
//! Code lengths come from the package-merge algorithm; codewords are then
//! assigned canonically (ascending length, then ascending symbol), so a
//! codebook is fully described by its length array and `Lmax`. Decoding uses
//! a flat table of `2^Lmax` entries indexed by the next `Lmax` stream bits.

use crate::error::{Error, Result};

/// Number of byte symbols.
pub const ALPHABET_SIZE: usize = 256;

pub const DEFAULT_MAX_CODE_LEN: u8 = 12;

/// Largest `Lmax` a codebook accepts; bounds the LUT at 64Ki entries.
pub const MAX_CODE_LEN: u8 = 16;

/// Occurrence counts of each byte symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolHistogram {
    counts: [u64; ALPHABET_SIZE],
}

impl Default for SymbolHistogram {
    fn default() -> Self {
        SymbolHistogram {
            counts: [0; ALPHABET_SIZE],
        }
    }
}

impl SymbolHistogram {
    pub fn add(&mut self, symbols: &[u8]) {
        for &s in symbols {
            self.counts[usize::from(s)] += 1;
        }
    }

    pub fn counts(&self) -> &[u64; ALPHABET_SIZE] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Every count raised to at least one, so unseen symbols keep a codeword.
    pub fn smoothed(&self) -> [u64; ALPHABET_SIZE] {
        self.counts.map(|c| c.max(1))
    }

    /// Shannon entropy in bits per symbol.
    pub fn entropy_bits(&self) -> f64 {
        let total = self.total() as f64;
        if total == 0.0 {
            return 0.0;
        }
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum()
    }
}

pub fn build_histogram(symbols: &[u8]) -> Result<SymbolHistogram> {
    if symbols.is_empty() {
        return Err(Error::Training("cannot build a histogram from no symbols".into()));
    }
    let mut hist = SymbolHistogram::default();
    hist.add(symbols);
    Ok(hist)
}

#[derive(Clone, Copy)]
struct Item {
    weight: u64,
    // Index into the sorted leaf order, or None for a package.
    leaf: Option<u32>,
}

/// Minimum-redundancy code lengths, each at most `max_len`, for `weights`.
///
/// Every entry is coded, including zero weights. A single symbol gets length 1.
pub fn package_merge(weights: &[u64], max_len: u8) -> Result<Vec<u8>> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::param("package-merge needs at least one symbol"));
    }
    if !(1..=32).contains(&max_len) {
        return Err(Error::param(format!("maximum code length {max_len} outside [1, 32]")));
    }
    if n == 1 {
        return Ok(vec![1]);
    }
    if n as u64 > 1u64 << max_len {
        return Err(Error::param(format!(
            "{n} symbols cannot be coded with lengths of at most {max_len}"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (weights[i], i));
    let leaves: Vec<Item> = order
        .iter()
        .enumerate()
        .map(|(rank, &i)| Item {
            weight: weights[i],
            leaf: Some(rank as u32),
        })
        .collect();

    let mut levels: Vec<Vec<Item>> = Vec::with_capacity(usize::from(max_len));
    levels.push(leaves.clone());
    for _ in 1..max_len {
        let prev = levels.last().expect("at least one level");
        let mut packages = prev.chunks_exact(2).map(|p| Item {
            weight: p[0].weight + p[1].weight,
            leaf: None,
        });
        let mut merged = Vec::with_capacity(n + prev.len() / 2);
        let mut next_pkg = packages.next();
        let mut leaf_iter = leaves.iter().copied().peekable();
        loop {
            match (leaf_iter.peek(), next_pkg) {
                (Some(l), Some(p)) if l.weight <= p.weight => merged.push(leaf_iter.next().unwrap()),
                (Some(_), None) => merged.push(leaf_iter.next().unwrap()),
                (_, Some(p)) => {
                    merged.push(p);
                    next_pkg = packages.next();
                }
                (None, None) => break,
            }
        }
        levels.push(merged);
    }

    // The selected items at each level form a prefix; packages chosen at one
    // level expand to twice as many items at the level below.
    let mut sorted_lens = vec![0u8; n];
    let mut take = 2 * n - 2;
    for level in levels.iter().rev() {
        let mut packages = 0;
        for item in &level[..take] {
            match item.leaf {
                Some(rank) => sorted_lens[rank as usize] += 1,
                None => packages += 1,
            }
        }
        take = 2 * packages;
    }
    debug_assert_eq!(take, 0);

    let mut lens = vec![0u8; n];
    for (rank, &sym) in order.iter().enumerate() {
        lens[sym] = sorted_lens[rank];
    }
    Ok(lens)
}

/// Kraft sum scaled by `2^max_len`; lengths of zero are uncoded.
fn kraft_units(lengths: &[u8], max_len: u8) -> u64 {
    lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| 1u64 << (max_len - l))
        .sum()
}

/// Canonical codewords for `lengths` (zero means the symbol has no code).
pub fn canonize(lengths: &[u8]) -> Result<Vec<u32>> {
    let max_len = lengths.iter().copied().max().unwrap_or(0);
    if max_len > 32 {
        return Err(Error::Internal(format!("code length {max_len} exceeds 32 bits")));
    }
    if max_len > 0 && kraft_units(lengths, max_len) > 1u64 << max_len {
        return Err(Error::Internal("code lengths violate the Kraft inequality".into()));
    }
    let mut per_len = vec![0u64; usize::from(max_len) + 1];
    for &l in lengths.iter().filter(|&&l| l > 0) {
        per_len[usize::from(l)] += 1;
    }
    let mut next = vec![0u64; usize::from(max_len) + 1];
    let mut code = 0u64;
    for len in 1..=usize::from(max_len) {
        code = (code + per_len[len - 1]) << 1;
        next[len] = code;
    }
    let mut codes = vec![0u32; lengths.len()];
    for (sym, &l) in lengths.iter().enumerate() {
        if l > 0 {
            codes[sym] = next[usize::from(l)] as u32;
            next[usize::from(l)] += 1;
        }
    }
    Ok(codes)
}

/// A canonical prefix code over byte symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    lengths: Vec<u8>,
    codes: Vec<u32>,
    max_len: u8,
}

impl Codebook {
    /// Validates `lengths` against `max_len` and assigns canonical codes.
    pub fn from_lengths(lengths: Vec<u8>, max_len: u8) -> Result<Self> {
        if !(1..=MAX_CODE_LEN).contains(&max_len) {
            return Err(Error::param(format!(
                "maximum code length {max_len} outside [1, {MAX_CODE_LEN}]"
            )));
        }
        if lengths.is_empty() || lengths.len() > ALPHABET_SIZE {
            return Err(Error::param(format!("alphabet of {} symbols", lengths.len())));
        }
        if let Some(&l) = lengths.iter().find(|&&l| l > max_len) {
            return Err(Error::param(format!("code length {l} exceeds maximum {max_len}")));
        }
        if lengths.iter().all(|&l| l == 0) {
            return Err(Error::param("codebook has no codewords"));
        }
        if kraft_units(&lengths, max_len) > 1u64 << max_len {
            return Err(Error::param("code lengths violate the Kraft inequality"));
        }
        let codes = canonize(&lengths)?;
        Ok(Codebook {
            lengths,
            codes,
            max_len,
        })
    }

    /// Builds a 256-symbol codebook from a histogram, smoothing zero counts.
    pub fn from_histogram(hist: &SymbolHistogram, max_len: u8) -> Result<Self> {
        if max_len < 8 {
            return Err(Error::param(format!(
                "maximum code length {max_len} cannot cover 256 symbols"
            )));
        }
        let lengths = package_merge(&hist.smoothed(), max_len)?;
        Codebook::from_lengths(lengths, max_len)
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn max_len(&self) -> u8 {
        self.max_len
    }

    /// `(codeword, length)` for `symbol`, if it is coded.
    pub fn code(&self, symbol: u8) -> Option<(u32, u8)> {
        let i = usize::from(symbol);
        match self.lengths.get(i) {
            Some(&l) if l > 0 => Some((self.codes[i], l)),
            _ => None,
        }
    }

    pub fn kraft_sum(&self) -> f64 {
        kraft_units(&self.lengths, self.max_len) as f64 / (1u64 << self.max_len) as f64
    }

    /// Total coded length in bits of a symbol histogram under this code.
    pub fn weighted_length(&self, counts: &[u64]) -> u64 {
        counts
            .iter()
            .zip(&self.lengths)
            .map(|(&c, &l)| c * u64::from(l))
            .sum()
    }

    pub fn lut(&self) -> DecodeLut {
        build_lut(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LutEntry {
    pub symbol: u8,
    /// Matched code length; zero marks a prefix no codeword covers.
    pub len: u8,
}

/// `2^Lmax`-entry table mapping an `Lmax`-bit prefix to its codeword.
#[derive(Debug, Clone)]
pub struct DecodeLut {
    entries: Vec<LutEntry>,
    max_len: u8,
}

impl DecodeLut {
    pub fn max_len(&self) -> u8 {
        self.max_len
    }

    pub fn entries(&self) -> &[LutEntry] {
        &self.entries
    }

    #[inline]
    pub fn lookup(&self, prefix: u64) -> LutEntry {
        self.entries[prefix as usize]
    }
}

pub fn build_lut(codebook: &Codebook) -> DecodeLut {
    let max_len = codebook.max_len;
    let mut entries = vec![LutEntry::default(); 1usize << max_len];
    for (sym, (&code, &len)) in codebook.codes.iter().zip(&codebook.lengths).enumerate() {
        if len == 0 {
            continue;
        }
        let span = 1usize << (max_len - len);
        let start = (code as usize) << (max_len - len);
        entries[start..start + span].fill(LutEntry {
            symbol: sym as u8,
            len,
        });
    }
    DecodeLut { entries, max_len }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(code: u32, len: u8) -> String {
        (0..len).rev().map(|b| if code >> b & 1 == 1 { '1' } else { '0' }).collect()
    }

    #[test]
    fn histogram_counts() {
        let h = build_histogram(&[128, 128, 5]).unwrap();
        assert_eq!(h.counts()[128], 2);
        assert_eq!(h.counts()[5], 1);
        assert_eq!(h.total(), 3);
        let h = build_histogram(&[9; 40]).unwrap();
        assert_eq!(h.counts()[9], 40);
        assert_eq!(h.counts().iter().filter(|&&c| c > 0).count(), 1);
        let all: Vec<u8> = (0..=255).chain(0..=255).collect();
        let h = build_histogram(&all).unwrap();
        assert!(h.counts().iter().all(|&c| c == 2));
        assert!((h.entropy_bits() - 8.0).abs() < 1e-12);
        assert!(matches!(build_histogram(&[]), Err(Error::Training(_))));
    }

    #[test]
    fn package_merge_small_cases() {
        assert_eq!(package_merge(&[1, 1, 2, 4], 8).unwrap(), vec![3, 3, 2, 1]);
        assert_eq!(package_merge(&[1, 1, 2, 4], 2).unwrap(), vec![2, 2, 2, 2]);
        assert_eq!(package_merge(&[5, 1000], 4).unwrap(), vec![1, 1]);
        assert_eq!(package_merge(&[0, 0], 1).unwrap(), vec![1, 1]);
        assert_eq!(package_merge(&[7], 3).unwrap(), vec![1]);
    }

    #[test]
    fn package_merge_known_vectors() {
        assert_eq!(package_merge(&[1, 32, 16, 4, 8, 2, 1], 8).unwrap(), vec![6, 1, 2, 4, 3, 5, 6]);
        assert_eq!(package_merge(&[1, 32, 16, 4, 8, 2, 1], 5).unwrap(), vec![5, 1, 2, 5, 3, 5, 5]);
    }

    #[test]
    fn package_merge_rejects_tight_limit() {
        assert!(matches!(package_merge(&[1; 5], 2), Err(Error::Param(_))));
        assert!(matches!(package_merge(&[], 8), Err(Error::Param(_))));
        assert!(matches!(package_merge(&[1, 1], 0), Err(Error::Param(_))));
        assert!(package_merge(&[1; 4], 2).is_ok());
    }

    #[test]
    fn canonical_assignment() {
        let codes = canonize(&[1, 2, 2]).unwrap();
        let s: Vec<_> = codes.iter().zip([1, 2, 2]).map(|(&c, l)| bits(c, l)).collect();
        assert_eq!(s, ["0", "10", "11"]);

        let codes = canonize(&[3; 8]).unwrap();
        assert_eq!(codes, (0..8).collect::<Vec<u32>>());

        // a, b, c, d with lengths 3, 3, 2, 1
        let codes = canonize(&[3, 3, 2, 1]).unwrap();
        let s: Vec<_> = codes.iter().zip([3, 3, 2, 1]).map(|(&c, l)| bits(c, l)).collect();
        assert_eq!(s, ["110", "111", "10", "0"]);

        assert!(matches!(canonize(&[1, 1, 1]), Err(Error::Internal(_))));
    }

    #[test]
    fn lut_enumeration() {
        let cb = Codebook::from_lengths(vec![1, 2, 2], 2).unwrap();
        let lut = cb.lut();
        let got: Vec<_> = lut.entries().iter().map(|e| (e.symbol, e.len)).collect();
        assert_eq!(got, vec![(0, 1), (0, 1), (1, 2), (2, 2)]);

        let cb = Codebook::from_lengths(vec![4; 16], 4).unwrap();
        for (i, e) in cb.lut().entries().iter().enumerate() {
            assert_eq!((usize::from(e.symbol), e.len), (i, 4));
        }
    }

    #[test]
    fn lut_marks_uncovered_prefixes() {
        let cb = Codebook::from_lengths(vec![1, 2], 3).unwrap();
        let lut = cb.lut();
        assert_eq!(lut.entries().len(), 8);
        assert_eq!(lut.lookup(0b110).len, 0);
        assert_eq!(lut.lookup(0b111).len, 0);
        assert_eq!(lut.lookup(0b101), LutEntry { symbol: 1, len: 2 });
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::from_lengths(vec![1, 1, 1], 4).is_err());
        assert!(Codebook::from_lengths(vec![5, 1], 4).is_err());
        assert!(Codebook::from_lengths(vec![0, 0], 4).is_err());
        assert!(Codebook::from_lengths(vec![1, 1], 17).is_err());
        assert!(Codebook::from_lengths(vec![1; 257], 16).is_err());
    }

    #[test]
    fn smoothed_codebook_covers_everything() {
        let h = build_histogram(&[128; 10_000]).unwrap();
        let cb = Codebook::from_histogram(&h, DEFAULT_MAX_CODE_LEN).unwrap();
        assert_eq!(cb.lengths().len(), ALPHABET_SIZE);
        assert!(cb.lengths().iter().all(|&l| (1..=12).contains(&l)));
        assert_eq!(cb.code(128).unwrap().1, 1);
        assert_eq!(cb.kraft_sum(), 1.0);
        assert!(Codebook::from_histogram(&h, 7).is_err());
    }
}
