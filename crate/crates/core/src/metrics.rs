//! Rate, distortion and throughput metrics, plus Pareto-front extraction.

use std::fmt::Write as _;
use std::time::Instant;

use crate::decoder::decompress_with;
use crate::error::{Error, Result};
use crate::quantization::CodecParams;

/// `orig / comp`.
pub fn compression_ratio(orig_bytes: u64, comp_bytes: u64) -> Result<f64> {
    if comp_bytes == 0 {
        return Err(Error::Domain("compressed size is zero".into()));
    }
    Ok(orig_bytes as f64 / comp_bytes as f64)
}

/// Percentage root-mean-square difference between a signal and its reconstruction.
pub fn prd(x: &[f32], x_hat: &[f32]) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::Domain(format!(
            "signal lengths differ ({} vs {})",
            x.len(),
            x_hat.len()
        )));
    }
    let (mut err, mut energy) = (0f64, 0f64);
    for (&a, &b) in x.iter().zip(x_hat) {
        let (a, b) = (f64::from(a), f64::from(b));
        err += (a - b) * (a - b);
        energy += a * a;
    }
    if energy == 0.0 {
        return Err(Error::Domain("reference signal has zero energy".into()));
    }
    Ok(100.0 * (err / energy).sqrt())
}

/// One evaluated configuration of a rate-distortion sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RdPoint {
    pub prd: f64,
    pub cr: f64,
    pub params: CodecParams,
    pub max_code_len: u8,
    pub throughput_gbps: Option<f64>,
}

impl RdPoint {
    pub fn new(prd: f64, cr: f64, params: CodecParams) -> Self {
        RdPoint {
            prd,
            cr,
            params,
            max_code_len: crate::entropy::DEFAULT_MAX_CODE_LEN,
            throughput_gbps: None,
        }
    }
}

/// Indices of the non-dominated points (lower PRD and higher CR are better),
/// ordered by ascending PRD. Points with identical `(prd, cr)` keep only the
/// first occurrence.
pub fn pareto_indices(points: &[RdPoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.prd
            .total_cmp(&pb.prd)
            .then(pb.cr.total_cmp(&pa.cr))
            .then(a.cmp(&b))
    });
    let mut front = Vec::new();
    let mut best_cr = f64::NEG_INFINITY;
    for i in order {
        if points[i].cr > best_cr {
            best_cr = points[i].cr;
            front.push(i);
        }
    }
    front
}

pub fn pareto_front(points: &[RdPoint]) -> Vec<RdPoint> {
    pareto_indices(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// Per-trial decode throughput.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    /// Decompressed bytes per second, one entry per trial.
    pub trials: Vec<f64>,
    pub output_bytes: u64,
    pub workers: usize,
}

impl ThroughputReport {
    pub fn mean(&self) -> f64 {
        self.trials.iter().sum::<f64>() / self.trials.len() as f64
    }

    pub fn trials_gbps(&self) -> impl Iterator<Item = f64> + '_ {
        self.trials.iter().map(|t| t / 1e9)
    }

    pub fn mean_gbps(&self) -> f64 {
        self.mean() / 1e9
    }

    /// `trial,gbps` rows followed by a `mean` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,gbps\n");
        for (i, g) in self.trials_gbps().enumerate() {
            let _ = writeln!(s, "{},{g:.6}", i + 1);
        }
        let _ = writeln!(s, "mean,{:.6}", self.mean_gbps());
        s
    }
}

/// Times `repetitions` in-memory decodes of container bytes.
///
/// Each trial covers parsing through reconstruction; file I/O is excluded.
pub fn measure_throughput(bytes: &[u8], repetitions: usize, workers: usize) -> Result<ThroughputReport> {
    if repetitions == 0 {
        return Err(Error::param("at least one repetition is required"));
    }
    let mut trials = Vec::with_capacity(repetitions);
    let mut output_bytes = 0u64;
    for _ in 0..repetitions {
        let start = Instant::now();
        let decoded = decompress_with(bytes, workers)?;
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        output_bytes = (decoded.samples.len() * 4) as u64;
        trials.push(output_bytes as f64 / secs);
    }
    Ok(ThroughputReport {
        trials,
        output_bytes,
        workers,
    })
}

pub const RD_CSV_HEADER: &str =
    "window_len,retained,linear_start,zeroed_start,mu,dead_ratio,zone_percentile,max_code_len,prd,cr,throughput_gbps,pareto";

/// CSV table of sweep points with a `pareto` flag column.
pub fn rd_csv(points: &[RdPoint]) -> String {
    let mut on_front = vec![false; points.len()];
    for i in pareto_indices(points) {
        on_front[i] = true;
    }
    let mut s = String::from(RD_CSV_HEADER);
    s.push('\n');
    for (pt, front) in points.iter().zip(on_front) {
        let p = &pt.params;
        let tp = pt.throughput_gbps.map(|t| format!("{t:.6}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.6},{:.6},{tp},{}",
            p.window_len,
            p.retained,
            p.linear_start,
            p.zeroed_start,
            p.mu,
            p.dead_ratio,
            p.zone_percentile,
            pt.max_code_len,
            pt.prd,
            pt.cr,
            u8::from(front)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(prd: f64, cr: f64) -> RdPoint {
        RdPoint::new(prd, cr, CodecParams::default())
    }

    #[test]
    fn ratio() {
        assert_eq!(compression_ratio(1000, 100).unwrap(), 10.0);
        assert_eq!(compression_ratio(77, 77).unwrap(), 1.0);
        assert!(matches!(compression_ratio(5, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn prd_values() {
        let x = [1.0f32, -2.0, 3.0];
        assert_eq!(prd(&x, &x).unwrap(), 0.0);
        assert_eq!(prd(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 100.0);
        let y = [0.9f32, -2.2, 3.1];
        let scaled = |v: &[f32]| v.iter().map(|a| a * -4.0).collect::<Vec<_>>();
        let base = prd(&x, &y).unwrap();
        assert!((prd(&scaled(&x), &scaled(&y)).unwrap() - base).abs() < 1e-9);
        assert!(matches!(prd(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(prd(&[1.0], &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn front_examples() {
        let f = pareto_front(&[pt(1.0, 5.0), pt(2.0, 10.0)]);
        assert_eq!(f.len(), 2);
        // Lower PRD and higher CR at once: the second point is dominated.
        let f = pareto_front(&[pt(1.0, 10.0), pt(2.0, 5.0)]);
        assert_eq!(f.len(), 1);

        let f = pareto_front(&[pt(1.0, 10.0), pt(2.0, 8.0), pt(1.5, 12.0)]);
        let got: Vec<_> = f.iter().map(|p| (p.prd, p.cr)).collect();
        assert_eq!(got, vec![(1.0, 10.0), (1.5, 12.0)]);

        assert_eq!(pareto_front(&[pt(3.0, 3.0)]).len(), 1);
    }

    #[test]
    fn front_ties() {
        let f = pareto_indices(&[pt(1.0, 5.0), pt(1.0, 5.0), pt(1.0, 4.0), pt(2.0, 5.0)]);
        assert_eq!(f, vec![0]);
    }

    #[test]
    fn csv_flags_front() {
        let csv = rd_csv(&[pt(1.0, 10.0), pt(2.0, 8.0)]);
        let rows: Vec<_> = csv.lines().collect();
        assert_eq!(rows[0], RD_CSV_HEADER);
        assert!(rows[1].ends_with(",1"));
        assert!(rows[2].ends_with(",0"));
    }

    #[test]
    fn throughput_csv() {
        let r = ThroughputReport {
            trials: vec![2e9, 4e9],
            output_bytes: 10,
            workers: 1,
        };
        assert_eq!(r.mean_gbps(), 3.0);
        assert_eq!(r.to_csv(), "trial,gbps\n1,2.000000\n2,4.000000\nmean,3.000000\n");
    }
}
