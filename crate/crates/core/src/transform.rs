//! Windowed DCT-II with high-frequency truncation.
//!
//! The forward transform uses the `2/N` scaling
//! `C[k] = 2/N * sum_n x[n] cos(pi/N (n + 1/2) k)`, paired with the DCT-III
//! inverse `x[n] = C[0]/2 + sum_{k>=1} C[k] cos(pi/N (n + 1/2) k)`. Bins at
//! or beyond the retained count are treated as zero on the way back.
//!
//! Arithmetic runs in `f64`; samples and coefficients cross the API as `f32`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_WINDOW_LEN: usize = 4;
pub const MAX_WINDOW_LEN: usize = 128;

/// One window of `N` time-domain samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    samples: Vec<f32>,
}

impl Window {
    pub fn new(samples: Vec<f32>) -> Result<Self> {
        check_window_len(samples.len())?;
        Ok(Window { samples })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }
}

/// The first `E` DCT coefficients of a window of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWindow {
    coeffs: Vec<f32>,
    window_len: usize,
}

impl SpectralWindow {
    pub fn new(coeffs: Vec<f32>, window_len: usize) -> Result<Self> {
        check_window_len(window_len)?;
        check_retained(coeffs.len(), window_len)?;
        Ok(SpectralWindow { coeffs, window_len })
    }

    pub fn coeffs(&self) -> &[f32] {
        &self.coeffs
    }

    /// Number of retained coefficients (`E`).
    pub fn retained(&self) -> usize {
        self.coeffs.len()
    }

    /// Length of the originating window (`N`).
    pub fn window_len(&self) -> usize {
        self.window_len
    }
}

pub(crate) fn check_window_len(n: usize) -> Result<()> {
    if !(MIN_WINDOW_LEN..=MAX_WINDOW_LEN).contains(&n) {
        return Err(Error::param(format!(
            "window length {n} outside [{MIN_WINDOW_LEN}, {MAX_WINDOW_LEN}]"
        )));
    }
    Ok(())
}

pub(crate) fn check_retained(e: usize, n: usize) -> Result<()> {
    if e == 0 || e > n {
        return Err(Error::param(format!(
            "retained coefficient count {e} outside [1, {n}]"
        )));
    }
    Ok(())
}

/// Precomputed `N x N` cosine basis, shared read-only by every worker.
#[derive(Debug, Clone)]
pub struct DctPlan {
    n: usize,
    // basis[k * n + i] = cos(pi / n * (i + 0.5) * k)
    basis: Vec<f64>,
}

impl DctPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_window_len(n)?;
        let mut basis = Vec::with_capacity(n * n);
        for k in 0..n {
            for i in 0..n {
                basis.push((PI / n as f64 * (i as f64 + 0.5) * k as f64).cos());
            }
        }
        Ok(DctPlan { n, basis })
    }

    pub fn window_len(&self) -> usize {
        self.n
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.basis[k * self.n..(k + 1) * self.n]
    }

    /// Forward transform of `x` (length `N`), writing the first `out.len()` bins.
    pub fn forward_into(&self, x: &[f32], out: &mut [f32]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert!(out.len() <= self.n);
        let scale = 2.0 / self.n as f64;
        for (k, c) in out.iter_mut().enumerate() {
            let acc: f64 = self
                .row(k)
                .iter()
                .zip(x)
                .map(|(&b, &s)| b * f64::from(s))
                .sum();
            *c = (acc * scale) as f32;
        }
    }

    /// Inverse transform from the leading coefficients; missing bins are zero.
    pub fn inverse_into(&self, coeffs: &[f32], out: &mut [f32]) {
        debug_assert_eq!(out.len(), self.n);
        debug_assert!(coeffs.len() <= self.n);
        let Some((&dc, rest)) = coeffs.split_first() else {
            out.fill(0.0);
            return;
        };
        let mut acc = [0f64; MAX_WINDOW_LEN];
        let acc = &mut acc[..self.n];
        acc.fill(f64::from(dc) * 0.5);
        for (k, &c) in rest.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let c = f64::from(c);
            for (a, &b) in acc.iter_mut().zip(self.row(k + 1)) {
                *a += c * b;
            }
        }
        for (o, &a) in out.iter_mut().zip(acc.iter()) {
            *o = a as f32;
        }
    }
}

/// DCT-II of `window`, keeping the first `retained` bins.
pub fn forward_dct(window: &Window, retained: usize) -> Result<SpectralWindow> {
    let n = window.len();
    check_retained(retained, n)?;
    let plan = DctPlan::new(n)?;
    let mut coeffs = vec![0f32; retained];
    plan.forward_into(window.samples(), &mut coeffs);
    Ok(SpectralWindow {
        coeffs,
        window_len: n,
    })
}

pub fn inverse_dct(spectral: &SpectralWindow) -> Window {
    let plan = DctPlan::new(spectral.window_len).expect("validated on construction");
    let mut samples = vec![0f32; spectral.window_len];
    plan.inverse_into(&spectral.coeffs, &mut samples);
    Window { samples }
}

/// Number of windows a strip of `samples` splits into.
pub fn window_count(samples: usize, n: usize) -> usize {
    samples.div_ceil(n)
}

/// Splits a strip into consecutive length-`n` windows, zero-padding the tail.
pub fn partition_strip(strip: &[f32], n: usize) -> Result<Vec<Window>> {
    check_window_len(n)?;
    if strip.is_empty() {
        return Err(Error::Input("cannot partition an empty strip".into()));
    }
    Ok(strip
        .chunks(n)
        .map(|chunk| {
            let mut samples = chunk.to_vec();
            samples.resize(n, 0.0);
            Window { samples }
        })
        .collect())
}
