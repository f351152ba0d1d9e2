//! Hybrid three-zone quantizer mapping DCT coefficients to `u8` levels.
//!
//! Bins `[0, B1)` are mu-law companded against `A0`, bins `[B1, B2)` use a
//! linear map with a deadzone of width `d1 = alpha1 * A1`, and bins
//! `[B2, E)` always land on the zero level. Level 128 is the zero bin;
//! positive values occupy 129..=255 (126 steps) and negative values 0..=127
//! (127 steps).

use crate::error::{Error, Result};
use crate::transform::{check_retained, check_window_len, SpectralWindow};

/// The reserved level for an exact zero.
pub const ZERO_LEVEL: u8 = 128;

const POS_STEPS: f64 = 126.0;
const NEG_STEPS: f64 = 127.0;

/// Lossy-stage parameters of a signal domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecParams {
    /// Transform block size `N`.
    pub window_len: usize,
    /// Retained low-frequency coefficients `E`.
    pub retained: usize,
    /// First bin of the linear zone (`B1`); bins below it are companded.
    pub linear_start: usize,
    /// First unconditionally zeroed bin (`B2`).
    pub zeroed_start: usize,
    /// Companding strength.
    pub mu: f32,
    /// Zone-1 deadzone as a fraction of `A1`.
    pub dead_ratio: f32,
    /// Percentile of pooled `|c|` used as each zone's amplitude maximum.
    pub zone_percentile: f32,
}

impl Default for CodecParams {
    fn default() -> Self {
        CodecParams {
            window_len: 32,
            retained: 16,
            linear_start: 2,
            zeroed_start: 16,
            mu: 50.0,
            dead_ratio: 0.004,
            zone_percentile: 99.9,
        }
    }
}

impl CodecParams {
    pub fn validate(&self) -> Result<()> {
        check_window_len(self.window_len)?;
        check_retained(self.retained, self.window_len)?;
        if self.linear_start > self.zeroed_start || self.zeroed_start > self.retained {
            return Err(Error::param(format!(
                "zone boundaries must satisfy 0 <= B1 <= B2 <= E (got B1={}, B2={}, E={})",
                self.linear_start, self.zeroed_start, self.retained
            )));
        }
        if !(1.0..=500.0).contains(&self.mu) {
            return Err(Error::param(format!("mu {} outside [1, 500]", self.mu)));
        }
        if !(0.0..=1.0).contains(&self.dead_ratio) {
            return Err(Error::param(format!(
                "dead ratio {} outside [0, 1]",
                self.dead_ratio
            )));
        }
        if !(90.0..=100.0).contains(&self.zone_percentile) {
            return Err(Error::param(format!(
                "zone percentile {} outside [90, 100]",
                self.zone_percentile
            )));
        }
        Ok(())
    }

    pub fn zone(&self, bin: usize) -> Zone {
        if bin < self.linear_start {
            Zone::Companded
        } else if bin < self.zeroed_start {
            Zone::Linear
        } else {
            Zone::Zeroed
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Companded,
    Linear,
    Zeroed,
}

/// Trained per-zone amplitude maxima plus the parameters they belong to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantTable {
    params: CodecParams,
    a0: f32,
    a1: f32,
}

impl QuantTable {
    pub fn new(params: CodecParams, a0: f32, a1: f32) -> Result<Self> {
        params.validate()?;
        for (name, a) in [("A0", a0), ("A1", a1)] {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::param(format!("{name} must be positive and finite, got {a}")));
            }
        }
        Ok(QuantTable { params, a0, a1 })
    }

    pub fn params(&self) -> &CodecParams {
        &self.params
    }

    /// Zone-0 amplitude maximum.
    pub fn a0(&self) -> f32 {
        self.a0
    }

    /// Zone-1 amplitude maximum.
    pub fn a1(&self) -> f32 {
        self.a1
    }

    /// Zone-1 deadzone width.
    pub fn deadzone(&self) -> f64 {
        f64::from(self.params.dead_ratio) * f64::from(self.a1)
    }

    fn companded_level(&self, c: f32) -> u8 {
        if c == 0.0 || c.is_nan() {
            return ZERO_LEVEL;
        }
        let a = f64::from(self.a0);
        let mu = f64::from(self.params.mu);
        let mag = f64::from(c.abs()).min(a);
        let q = (mu * mag / a).ln_1p() / mu.ln_1p();
        if c > 0.0 {
            129 + (q * POS_STEPS + 0.5).floor().min(POS_STEPS) as u8
        } else {
            127 - (q * NEG_STEPS + 0.5).floor().min(NEG_STEPS) as u8
        }
    }

    fn linear_level(&self, c: f32) -> u8 {
        if c.is_nan() {
            return ZERO_LEVEL;
        }
        let a = f64::from(self.a1);
        let d = self.deadzone();
        let span = a - d;
        let c = f64::from(c).clamp(-a, a);
        if span <= 0.0 || c.abs() <= d {
            return ZERO_LEVEL;
        }
        let t = (c.abs() - d) / span;
        if c > 0.0 {
            129 + (t * POS_STEPS + 0.5).floor().min(POS_STEPS) as u8
        } else {
            127 - (t * NEG_STEPS + 0.5).floor().min(NEG_STEPS) as u8
        }
    }

    /// Level for coefficient `c` sitting in bin `bin`.
    pub fn quantize_coeff(&self, bin: usize, c: f32) -> u8 {
        match self.params.zone(bin) {
            Zone::Companded => self.companded_level(c),
            Zone::Linear => self.linear_level(c),
            Zone::Zeroed => ZERO_LEVEL,
        }
    }

    /// Reconstructed coefficient for `level` in bin `bin`.
    pub fn dequantize_level(&self, bin: usize, level: u8) -> f32 {
        if level == ZERO_LEVEL {
            return 0.0;
        }
        match self.params.zone(bin) {
            Zone::Companded => {
                let (q, sign) = if level > ZERO_LEVEL {
                    (f64::from(level - 129) / POS_STEPS, 1.0)
                } else {
                    (f64::from(127 - level) / NEG_STEPS, -1.0)
                };
                let mu = f64::from(self.params.mu);
                let mag = f64::from(self.a0) * (q * mu.ln_1p()).exp_m1() / mu;
                (sign * mag) as f32
            }
            Zone::Linear => {
                let d = self.deadzone();
                let span = f64::from(self.a1) - d;
                if span <= 0.0 {
                    return 0.0;
                }
                let (k, steps, sign) = if level > ZERO_LEVEL {
                    (f64::from(level - 129), POS_STEPS, 1.0)
                } else {
                    (f64::from(127 - level), NEG_STEPS, -1.0)
                };
                // Midpoint of the rounding cell [k - 1/2, k + 1/2] clipped to [0, steps].
                let mid = ((k - 0.5).max(0.0) + (k + 0.5).min(steps)) * 0.5;
                (sign * (d + mid / steps * span)) as f32
            }
            Zone::Zeroed => 0.0,
        }
    }

    /// Quantizes the `E` coefficients of one window into `out`.
    pub fn quantize_into(&self, coeffs: &[f32], out: &mut [u8]) {
        debug_assert_eq!(coeffs.len(), out.len());
        let p = &self.params;
        let (b1, b2) = (p.linear_start, p.zeroed_start);
        for (o, &c) in out[..b1].iter_mut().zip(&coeffs[..b1]) {
            *o = self.companded_level(c);
        }
        for (o, &c) in out[b1..b2].iter_mut().zip(&coeffs[b1..b2]) {
            *o = self.linear_level(c);
        }
        out[b2..].fill(ZERO_LEVEL);
    }

    pub fn dequantize_into(&self, levels: &[u8], out: &mut [f32]) {
        debug_assert_eq!(levels.len(), out.len());
        for (bin, (o, &l)) in out.iter_mut().zip(levels).enumerate() {
            *o = self.dequantize_level(bin, l);
        }
    }
}

/// Levels for the `E` retained bins of one window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedWindow {
    pub levels: Vec<u8>,
}

fn check_matches(spectral_len: usize, window_len: usize, params: &CodecParams) -> Result<()> {
    if spectral_len != params.retained || window_len != params.window_len {
        return Err(Error::param(format!(
            "window has {spectral_len} of {window_len} coefficients, table expects {} of {}",
            params.retained, params.window_len
        )));
    }
    Ok(())
}

pub fn quantize_window(spectral: &SpectralWindow, table: &QuantTable) -> Result<QuantizedWindow> {
    check_matches(spectral.retained(), spectral.window_len(), table.params())?;
    let mut levels = vec![ZERO_LEVEL; spectral.retained()];
    table.quantize_into(spectral.coeffs(), &mut levels);
    Ok(QuantizedWindow { levels })
}

pub fn dequantize_window(q: &QuantizedWindow, table: &QuantTable) -> Result<SpectralWindow> {
    let p = table.params();
    check_matches(q.levels.len(), p.window_len, p)?;
    let mut coeffs = vec![0f32; q.levels.len()];
    table.dequantize_into(&q.levels, &mut coeffs);
    SpectralWindow::new(coeffs, p.window_len)
}

/// Nearest-rank percentile of the absolute values in `pool` (reordered in place).
pub fn nearest_rank_percentile(pool: &mut [f32], percentile: f32) -> Option<f32> {
    if pool.is_empty() {
        return None;
    }
    // Go through the decimal form so 99.9f32 means 99.9, not 99.90000152.
    let p: f64 = percentile.to_string().parse().unwrap_or(f64::from(percentile));
    let n = pool.len();
    let exact = p / 100.0 * n as f64;
    let rank = ((exact - 1e-9 * exact.max(1.0)).ceil() as usize).clamp(1, n);
    for v in pool.iter_mut() {
        *v = v.abs();
    }
    let (_, v, _) = pool.select_nth_unstable_by(rank - 1, f32::total_cmp);
    Some(*v)
}

/// Builds a table from the pooled zone-0 and zone-1 coefficients.
///
/// Inactive zones get the sentinel maximum 1.0, as do pools whose clipped
/// percentile is zero, which makes every level collapse to the zero bin.
pub fn table_from_pools(
    params: CodecParams,
    mut zone0: Vec<f32>,
    mut zone1: Vec<f32>,
) -> Result<QuantTable> {
    params.validate()?;
    let max_for = |pool: &mut Vec<f32>, active: bool, name: &str| -> Result<f32> {
        if !active {
            return Ok(1.0);
        }
        let a = nearest_rank_percentile(pool, params.zone_percentile)
            .ok_or_else(|| Error::Training(format!("no coefficients pooled for active {name}")))?;
        if !a.is_finite() {
            return Err(Error::Training(format!("{name} maximum is not finite")));
        }
        Ok(if a > 0.0 { a } else { 1.0 })
    };
    let a0 = max_for(&mut zone0, params.linear_start > 0, "zone 0")?;
    let a1 = max_for(&mut zone1, params.zeroed_start > params.linear_start, "zone 1")?;
    QuantTable::new(params, a0, a1)
}

/// Trains zone maxima from representative spectral windows.
pub fn train_quant_table(windows: &[SpectralWindow], params: CodecParams) -> Result<QuantTable> {
    params.validate()?;
    if windows.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    let (b1, b2) = (params.linear_start, params.zeroed_start);
    let mut zone0 = Vec::with_capacity(windows.len() * b1);
    let mut zone1 = Vec::with_capacity(windows.len() * (b2 - b1));
    for w in windows {
        check_matches(w.retained(), w.window_len(), &params)?;
        zone0.extend_from_slice(&w.coeffs()[..b1]);
        zone1.extend_from_slice(&w.coeffs()[b1..b2]);
    }
    table_from_pools(params, zone0, zone1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b1: usize, b2: usize, mu: f32, alpha: f32) -> CodecParams {
        CodecParams {
            window_len: 8,
            retained: 8,
            linear_start: b1,
            zeroed_start: b2,
            mu,
            dead_ratio: alpha,
            zone_percentile: 99.9,
        }
    }

    fn table(b1: usize, b2: usize, mu: f32, alpha: f32, a0: f32, a1: f32) -> QuantTable {
        QuantTable::new(params(b1, b2, mu, alpha), a0, a1).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CodecParams::default().validate().is_ok());
        let bad = [
            CodecParams { window_len: 3, ..Default::default() },
            CodecParams { retained: 33, ..Default::default() },
            CodecParams { linear_start: 17, ..Default::default() },
            CodecParams { zeroed_start: 1, ..Default::default() },
            CodecParams { mu: 0.5, ..Default::default() },
            CodecParams { mu: 501.0, ..Default::default() },
            CodecParams { dead_ratio: 1.5, ..Default::default() },
            CodecParams { zone_percentile: 89.0, ..Default::default() },
            CodecParams { mu: f32::NAN, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Param(_))), "{p:?}");
        }
    }

    #[test]
    fn zero_maps_to_zero_bin_everywhere() {
        let t = table(2, 5, 50.0, 0.004, 3.0, 2.0);
        for bin in 0..8 {
            assert_eq!(t.quantize_coeff(bin, 0.0), ZERO_LEVEL);
            assert_eq!(t.quantize_coeff(bin, -0.0), ZERO_LEVEL);
            assert_eq!(t.dequantize_level(bin, ZERO_LEVEL), 0.0);
        }
    }

    #[test]
    fn companded_endpoints_and_midpoint() {
        let t = table(2, 5, 50.0, 0.004, 4.0, 1.0);
        assert_eq!(t.quantize_coeff(0, 4.0), 255);
        assert_eq!(t.quantize_coeff(0, -4.0), 0);
        assert_eq!(t.quantize_coeff(1, 400.0), 255);
        // q = ln(26)/ln(51) = 0.82865..., 129 + floor(104.41 + 0.5) = 233
        let q = 26f64.ln() / 51f64.ln();
        assert!((q - 0.8286).abs() < 1e-4);
        assert_eq!(129 + (q * 126.0 + 0.5).floor() as u32, 233);
        assert_eq!(t.quantize_coeff(0, 2.0), 233);
        assert_eq!(t.dequantize_level(0, 255), 4.0);
        assert_eq!(t.dequantize_level(0, 0), -4.0);
    }

    #[test]
    fn linear_zone_boundaries() {
        let t = table(2, 5, 50.0, 0.25, 1.0, 2.0);
        assert_eq!(t.deadzone(), 0.5);
        assert_eq!(t.quantize_coeff(3, 2.0), 255);
        assert_eq!(t.quantize_coeff(3, -2.0), 0);
        assert_eq!(t.quantize_coeff(3, 0.5), ZERO_LEVEL);
        assert_eq!(t.quantize_coeff(3, -0.5), ZERO_LEVEL);
        assert_eq!(t.quantize_coeff(3, 0.3), ZERO_LEVEL);
        assert_eq!(t.quantize_coeff(3, 0.5001), 129);
        assert_eq!(t.quantize_coeff(3, 9.0), 255);
    }

    #[test]
    fn zeroed_zone_ignores_magnitude() {
        let t = table(2, 5, 50.0, 0.004, 1.0, 1.0);
        assert_eq!(t.quantize_coeff(5, 1e9), ZERO_LEVEL);
        assert_eq!(t.quantize_coeff(7, -1e9), ZERO_LEVEL);
        assert_eq!(t.dequantize_level(6, 200), 0.0);
    }

    #[test]
    fn no_deadzone_is_plain_linear() {
        let t = table(0, 8, 50.0, 0.0, 1.0, 126.0);
        assert_eq!(t.deadzone(), 0.0);
        for k in 1..=126u8 {
            assert_eq!(t.quantize_coeff(0, f32::from(k)), 129 + k);
        }
    }

    #[test]
    fn full_deadzone_collapses_zone() {
        let t = table(0, 8, 50.0, 1.0, 1.0, 2.0);
        for c in [-5.0, -2.0, 0.1, 2.0, 7.0] {
            assert_eq!(t.quantize_coeff(1, c), ZERO_LEVEL);
        }
        assert_eq!(t.dequantize_level(1, 255), 0.0);
    }

    #[test]
    fn nearest_rank_percentile_oracle() {
        let mut pool: Vec<f32> = (1..=1000).map(|v| v as f32).collect();
        assert_eq!(nearest_rank_percentile(&mut pool, 99.9), Some(999.0));
        let mut pool: Vec<f32> = (1..=1000).map(|v| -(v as f32)).collect();
        assert_eq!(nearest_rank_percentile(&mut pool, 100.0), Some(1000.0));
        let mut pool = vec![5.0f32];
        assert_eq!(nearest_rank_percentile(&mut pool, 90.0), Some(5.0));
        let mut pool: Vec<f32> = (1..=10).map(|v| v as f32).collect();
        assert_eq!(nearest_rank_percentile(&mut pool, 90.0), Some(9.0));
        assert_eq!(nearest_rank_percentile(&mut [], 90.0), None);
    }

    #[test]
    fn training_pools_each_zone() {
        let p = CodecParams {
            window_len: 4,
            retained: 4,
            linear_start: 1,
            zeroed_start: 3,
            zone_percentile: 100.0,
            ..Default::default()
        };
        let windows: Vec<_> = (1..=10)
            .map(|i| {
                let i = i as f32;
                SpectralWindow::new(vec![i, -2.0 * i, 0.5, 1e6], 4).unwrap()
            })
            .collect();
        let t = train_quant_table(&windows, p).unwrap();
        assert_eq!(t.a0(), 10.0);
        assert_eq!(t.a1(), 20.0);
        assert!((t.deadzone() - 0.004 * 20.0).abs() < 1e-6);
    }

    #[test]
    fn training_edge_cases() {
        let p = CodecParams { window_len: 4, retained: 4, linear_start: 0, zeroed_start: 2, ..Default::default() };
        let w = vec![SpectralWindow::new(vec![0.0; 4], 4).unwrap()];
        let t = train_quant_table(&w, p).unwrap();
        assert_eq!((t.a0(), t.a1()), (1.0, 1.0));
        assert!(matches!(train_quant_table(&[], p), Err(Error::Training(_))));
        let wrong = vec![SpectralWindow::new(vec![0.0; 3], 4).unwrap()];
        assert!(matches!(train_quant_table(&wrong, p), Err(Error::Param(_))));
    }

    #[test]
    fn window_level_api() {
        let t = table(2, 5, 50.0, 0.004, 4.0, 1.0);
        let s = SpectralWindow::new(vec![4.0, -4.0, 1.0, -1.0, 0.0, 3.0, 3.0, 3.0], 8).unwrap();
        let q = quantize_window(&s, &t).unwrap();
        assert_eq!(q.levels, vec![255, 0, 255, 0, 128, 128, 128, 128]);
        let back = dequantize_window(&q, &t).unwrap();
        assert_eq!(&back.coeffs()[..2], &[4.0, -4.0]);
        assert_eq!(&back.coeffs()[5..], &[0.0; 3]);
        let short = SpectralWindow::new(vec![0.0; 4], 8).unwrap();
        assert!(matches!(quantize_window(&short, &t), Err(Error::Param(_))));
    }
}
