//! Data-parallel decompression.
//!
//! Decoding runs in two data-parallel stages separated by a barrier. First an
//! exclusive scan over the symlen array gives every word a disjoint output
//! range, and workers decode contiguous word ranges straight into the
//! compacted level array. Then workers dequantize and inverse-transform
//! contiguous window ranges. No stage shares mutable state, so output bytes do
//! not depend on the worker count.

use std::fmt::Write as _;
use std::thread;
use std::time::{Duration, Instant};

use crate::bitstream::{decode_word_into, read_blob, CompressedBlob, SymLenStream};
use crate::entropy::{Codebook, DecodeLut};
use crate::error::{Error, Result};
use crate::quantization::QuantTable;
use crate::transform::{window_count, DctPlan, MAX_WINDOW_LEN};

/// Exclusive prefix sum of the symlen array, plus the grand total.
pub fn offsets_from_symlens(symlens: &[u8]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(symlens.len());
    let mut total = 0usize;
    for &s in symlens {
        offsets.push(total);
        total += usize::from(s);
    }
    (offsets, total)
}

/// Worker count from the environment, at least one.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Splits `0..len` into at most `workers` contiguous, nearly equal ranges.
fn ranges(len: usize, workers: usize) -> Vec<(usize, usize)> {
    let workers = workers.clamp(1, len.max(1));
    (0..workers)
        .map(|i| (i * len / workers, (i + 1) * len / workers))
        .collect()
}

/// Runs `job` over every range, the last one on the calling thread.
fn run_parallel<T, F>(jobs: Vec<T>, job: F) -> Vec<Result<()>>
where
    T: Send,
    F: Fn(T) -> Result<()> + Sync,
{
    thread::scope(|scope| {
        let mut jobs = jobs;
        let last = jobs.pop();
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|j| {
                let job = &job;
                scope.spawn(move || job(j))
            })
            .collect();
        let tail = last.map(&job);
        let mut results: Vec<Result<()>> = handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("decode worker panicked".into()))))
            .collect();
        results.extend(tail);
        results
    })
}

fn decode_with_offsets(
    stream: &SymLenStream,
    lut: &DecodeLut,
    offsets: &[usize],
    total: usize,
    workers: usize,
) -> Result<Vec<u8>> {
    let mut out = vec![0u8; total];
    let mut jobs = Vec::new();
    let mut rest: &mut [u8] = &mut out;
    for (start, end) in ranges(stream.len(), workers) {
        let span_end = if end == stream.len() { total } else { offsets[end] };
        let (head, tail) = rest.split_at_mut(span_end - offsets.get(start).copied().unwrap_or(total));
        rest = tail;
        jobs.push((start, end, head));
    }

    let results = run_parallel(jobs, |(start, end, dst)| {
        let base = offsets.get(start).copied().unwrap_or(0);
        for w in start..end {
            let lo = offsets[w] - base;
            let hi = lo + usize::from(stream.symlens[w]);
            decode_word_into(stream.words[w], lut, &mut dst[lo..hi]).map_err(|f| {
                Error::CorruptWord {
                    word: w,
                    reason: f.to_string(),
                }
            })?;
        }
        Ok(())
    });
    first_error(results)?;
    Ok(out)
}

// Ranges are in order, so the first failing range holds the lowest bad index.
fn first_error(results: Vec<Result<()>>) -> Result<()> {
    results.into_iter().collect()
}

/// Decodes every word into one compacted level array.
pub fn parallel_decode(stream: &SymLenStream, codebook: &Codebook, workers: usize) -> Result<Vec<u8>> {
    if stream.words.len() != stream.symlens.len() {
        return Err(Error::Corrupt(format!(
            "{} words but {} symlens",
            stream.words.len(),
            stream.symlens.len()
        )));
    }
    let lut = codebook.lut();
    let (offsets, total) = offsets_from_symlens(&stream.symlens);
    decode_with_offsets(stream, &lut, &offsets, total, workers)
}

fn reconstruct_with_plan(
    levels: &[u8],
    table: &QuantTable,
    plan: &DctPlan,
    sample_count: usize,
    workers: usize,
) -> Result<Vec<f32>> {
    let p = table.params();
    let (n, e) = (p.window_len, p.retained);
    let windows = window_count(sample_count, n);
    if levels.len() != windows * e {
        return Err(Error::Corrupt(format!(
            "{} levels cannot rebuild {sample_count} samples ({windows} windows of {e})",
            levels.len()
        )));
    }
    let mut out = vec![0f32; windows * n];
    let mut jobs = Vec::new();
    let mut rest: &mut [f32] = &mut out;
    for (start, end) in ranges(windows, workers) {
        let (head, tail) = rest.split_at_mut((end - start) * n);
        rest = tail;
        jobs.push((start, head));
    }
    let results = run_parallel(jobs, |(start, dst)| {
        let mut coeffs = [0f32; MAX_WINDOW_LEN];
        let coeffs = &mut coeffs[..e];
        for (i, samples) in dst.chunks_exact_mut(n).enumerate() {
            let w = start + i;
            table.dequantize_into(&levels[w * e..(w + 1) * e], coeffs);
            plan.inverse_into(coeffs, samples);
        }
        Ok(())
    });
    first_error(results)?;
    out.truncate(sample_count);
    Ok(out)
}

/// Dequantizes and inverse-transforms every window, trimming to `sample_count`.
pub fn reconstruct(
    levels: &[u8],
    table: &QuantTable,
    sample_count: usize,
    workers: usize,
) -> Result<Vec<f32>> {
    let plan = DctPlan::new(table.params().window_len)?;
    reconstruct_with_plan(levels, table, &plan, sample_count, workers)
}

/// Wall-clock time spent in each decode stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub parse: Duration,
    pub scan: Duration,
    pub entropy: Duration,
    pub reconstruct: Duration,
    pub total: Duration,
}

impl StageTimings {
    pub fn stages(&self) -> [(&'static str, Duration); 4] {
        [
            ("parse", self.parse),
            ("scan", self.scan),
            ("entropy_decode", self.entropy),
            ("reconstruct", self.reconstruct),
        ]
    }

    pub fn stage_sum(&self) -> Duration {
        self.stages().iter().map(|(_, d)| *d).sum()
    }

    /// `stage,nanoseconds,fraction` rows, fractions relative to the total.
    pub fn to_csv(&self) -> String {
        let total = self.total.as_nanos().max(1) as f64;
        let mut s = String::from("stage,nanoseconds,fraction\n");
        for (name, d) in self.stages() {
            let _ = writeln!(s, "{name},{},{:.6}", d.as_nanos(), d.as_nanos() as f64 / total);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub samples: Vec<f32>,
    pub timings: StageTimings,
}

/// Entropy-decodes and reconstructs an already parsed container.
pub fn decompress_blob(blob: &CompressedBlob, workers: usize) -> Result<Vec<f32>> {
    let levels = parallel_decode(blob.stream(), blob.codebook(), workers)?;
    let sample_count = usize::try_from(blob.sample_count())
        .map_err(|_| Error::Corrupt("sample count exceeds address space".into()))?;
    reconstruct(&levels, blob.table(), sample_count, workers)
}

/// Full decode of container bytes with per-stage timings.
pub fn decompress_with(bytes: &[u8], workers: usize) -> Result<Decoded> {
    let t0 = Instant::now();
    let blob = read_blob(bytes)?;
    let t1 = Instant::now();
    let (offsets, total) = offsets_from_symlens(&blob.stream().symlens);
    let t2 = Instant::now();
    let lut = blob.codebook().lut();
    let levels = decode_with_offsets(blob.stream(), &lut, &offsets, total, workers)?;
    let t3 = Instant::now();
    let sample_count = usize::try_from(blob.sample_count())
        .map_err(|_| Error::Corrupt("sample count exceeds address space".into()))?;
    let plan = DctPlan::new(blob.params().window_len)?;
    let samples = reconstruct_with_plan(&levels, blob.table(), &plan, sample_count, workers)?;
    let t4 = Instant::now();
    Ok(Decoded {
        samples,
        timings: StageTimings {
            parse: t1 - t0,
            scan: t2 - t1,
            entropy: t3 - t2,
            reconstruct: t4 - t3,
            total: t4 - t0,
        },
    })
}

pub fn decompress(bytes: &[u8]) -> Result<Vec<f32>> {
    Ok(decompress_with(bytes, default_workers())?.samples)
}
