//! Physical-layer simulation.
//!
//! Real-valued messages are quantized to 8 or 16 bits per value, mapped onto
//! Gray-coded 256-QAM symbols and sent through `N` independent Rayleigh
//! branches combined with maximal-ratio combining. The receiver has perfect
//! channel knowledge and normalizes each combined symbol by `sum(h_i^2)`.
//! Fading is drawn independently for every symbol.

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Bits carried by one 256-QAM symbol.
pub const BITS_PER_SYMBOL: usize = 8;

/// Average energy of the unscaled 16x16 grid with levels `+-1, +-3, .., +-15`.
const GRID_ENERGY: f64 = 170.0;

/// Scale factor for MAD to estimate a normal standard deviation.
const MAD_SCALE: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Number of receive branches combined by MRC.
    pub n_channels: usize,
    /// Mean-square fading amplitude `E[h^2]`.
    pub omega: f64,
    /// Symbol energy over per-branch noise variance, in dB, before
    /// combining. `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Fraction of transmitted values erased.
    pub loss_ratio: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            n_channels: 4,
            omega: 1.0,
            snr_db: 40.0,
            loss_ratio: 0.0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::InvalidChannel("need at least one channel".into()));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidChannel(format!(
                "invalid snr_db {}",
                self.snr_db
            )));
        }
        if !(0.0..1.0).contains(&self.loss_ratio) {
            return Err(Error::InvalidChannel(format!(
                "loss ratio must be in [0, 1), got {}",
                self.loss_ratio
            )));
        }
        Ok(())
    }

    /// Complex noise variance per branch for unit symbol energy.
    pub fn noise_variance(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }
}

/// Uniform mid-rise quantizer over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    bits: u32,
    lo: f64,
    hi: f64,
}

impl QuantizerSpec {
    pub fn new(bits: u32, lo: f64, hi: f64) -> Result<Self> {
        if bits != 8 && bits != 16 {
            return Err(Error::InvalidQuantizer(format!(
                "bits must be 8 or 16, got {bits}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidQuantizer(format!(
                "degenerate range [{lo}, {hi}]"
            )));
        }
        Ok(QuantizerSpec { bits, lo, hi })
    }

    /// Range covering `values`; a constant input gets a unit-wide range.
    pub fn covering(bits: u32, values: &[f64]) -> Result<Self> {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidQuantizer(
                "values must be finite and non-empty".into(),
            ));
        }
        if hi > lo {
            QuantizerSpec::new(bits, lo, hi)
        } else {
            QuantizerSpec::new(bits, lo - 0.5, lo + 0.5)
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn levels(&self) -> u32 {
        1 << self.bits
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / f64::from(self.levels())
    }

    pub fn code(&self, v: f64) -> u32 {
        let max = self.levels() - 1;
        let c = ((v - self.lo) / self.step()).floor();
        if c <= 0.0 {
            0
        } else if c >= f64::from(max) {
            max
        } else {
            c as u32
        }
    }

    pub fn value(&self, code: u32) -> f64 {
        self.lo + (f64::from(code) + 0.5) * self.step()
    }
}

/// Quantized bit stream, most significant bit of each value first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantized {
    pub bits: Vec<u8>,
    /// Values that fell outside the quantizer range and were clipped.
    pub saturated: usize,
}

pub fn quantize(values: &[f64], spec: &QuantizerSpec) -> Quantized {
    let width = spec.bits as usize;
    let mut bits = Vec::with_capacity(values.len() * width);
    let mut saturated = 0;
    for &v in values {
        if v < spec.lo || v > spec.hi {
            saturated += 1;
        }
        let code = spec.code(v);
        bits.extend((0..width).rev().map(|b| ((code >> b) & 1) as u8));
    }
    Quantized { bits, saturated }
}

pub fn dequantize(bits: &[u8], spec: &QuantizerSpec) -> Result<Vec<f64>> {
    let width = spec.bits as usize;
    if !bits.len().is_multiple_of(width) {
        return Err(Error::InvalidQuantizer(format!(
            "bit count {} is not a multiple of {width}",
            bits.len()
        )));
    }
    Ok(bits
        .chunks(width)
        .map(|chunk| spec.value(chunk.iter().fold(0u32, |c, &b| (c << 1) | u32::from(b & 1))))
        .collect())
}

fn gray_to_binary(g: u8) -> u8 {
    g ^ (g >> 1) ^ (g >> 2) ^ (g >> 3)
}

fn binary_to_gray(b: u8) -> u8 {
    b ^ (b >> 1)
}

/// Axis amplitude for a 4-bit Gray label.
fn axis_level(label: u8) -> f64 {
    (2.0 * f64::from(gray_to_binary(label)) - 15.0) / GRID_ENERGY.sqrt()
}

/// Nearest Gray label on one axis.
fn axis_label(amplitude: f64) -> u8 {
    let idx = ((amplitude * GRID_ENERGY.sqrt() + 15.0) / 2.0).round();
    binary_to_gray(idx.clamp(0.0, 15.0) as u8)
}

/// Symbol for an 8-bit label: the high nibble selects the in-phase level,
/// the low nibble the quadrature level, each Gray coded.
pub fn qam256_point(label: u8) -> Complex64 {
    Complex64::new(axis_level(label >> 4), axis_level(label & 0x0f))
}

/// Maps bits (8 per symbol, first bit most significant) onto unit-energy
/// Gray-coded 256-QAM.
pub fn qam256_modulate(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(BITS_PER_SYMBOL) {
        return Err(Error::RaggedBits(bits.len()));
    }
    Ok(bits
        .chunks(BITS_PER_SYMBOL)
        .map(|c| qam256_point(c.iter().fold(0u8, |l, &b| (l << 1) | (b & 1))))
        .collect())
}

/// Minimum-distance hard decision.
pub fn qam256_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for s in symbols {
        let label = (axis_label(s.re) << 4) | axis_label(s.im);
        bits.extend((0..BITS_PER_SYMBOL).rev().map(|b| (label >> b) & 1));
    }
    bits
}

/// Draws Rayleigh amplitudes with `E[h^2] = omega`.
pub fn rayleigh_sample<R: Rng + ?Sized>(omega: f64, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidChannel(format!(
            "omega must be positive, got {omega}"
        )));
    }
    Ok((0..count)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            (omega * e).sqrt()
        })
        .collect())
}

/// Symbols after combining and gain normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct MrcReception {
    pub symbols: Vec<Complex64>,
    /// `sum(h_i^2)` for each symbol.
    pub combined_gains: Vec<f64>,
}

/// Sends each symbol over `N` fading branches and combines them:
/// `y = x * sum(h_i^2) + sum(h_i * w_i)`, then returns `y / sum(h_i^2)`.
pub fn transmit_mrc<R: Rng + ?Sized>(
    symbols: &[Complex64],
    cfg: &ChannelConfig,
    rng: &mut R,
) -> Result<MrcReception> {
    cfg.validate()?;
    let noise_std = (cfg.noise_variance() / 2.0).sqrt();
    let mut out = Vec::with_capacity(symbols.len());
    let mut gains = Vec::with_capacity(symbols.len());
    for &x in symbols {
        let h = rayleigh_sample(cfg.omega, cfg.n_channels, rng)?;
        let mut combined = 0.0;
        let mut noise = Complex64::new(0.0, 0.0);
        for &hi in &h {
            combined += hi * hi;
            if noise_std > 0.0 {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                noise += Complex64::new(re, im) * (hi * noise_std);
            }
        }
        // A zero combined gain has probability zero; keep the symbol finite.
        let combined = combined.max(f64::MIN_POSITIVE);
        out.push((x * combined + noise) / combined);
        gains.push(combined);
    }
    Ok(MrcReception {
        symbols: out,
        combined_gains: gains,
    })
}

/// Present mask with exactly `round(loss_ratio * count)` erased positions
/// chosen uniformly without replacement.
pub fn apply_erasures<R: Rng + ?Sized>(
    count: usize,
    loss_ratio: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if !(0.0..1.0).contains(&loss_ratio) {
        return Err(Error::InvalidChannel(format!(
            "loss ratio must be in [0, 1), got {loss_ratio}"
        )));
    }
    let lost = ((loss_ratio * count as f64).round() as usize).min(count);
    let mut present = vec![true; count];
    for i in index::sample(rng, count, lost) {
        present[i] = false;
    }
    Ok(present)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Drops present values further than `c` normalized MADs from the median.
///
/// With fewer than three present values, or zero spread, the mask is
/// returned unchanged.
pub fn outlier_filter(values: &[f64], present: &[bool], c: f64) -> Vec<bool> {
    let mut kept: Vec<f64> = values
        .iter()
        .zip(present)
        .filter_map(|(v, p)| p.then_some(*v))
        .collect();
    if kept.len() < 3 {
        return present.to_vec();
    }
    kept.sort_by(f64::total_cmp);
    let med = median(&kept);
    let mut dev: Vec<f64> = kept.iter().map(|v| (v - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let mad = MAD_SCALE * median(&dev);
    if mad == 0.0 {
        return present.to_vec();
    }
    values
        .iter()
        .zip(present)
        .map(|(v, &p)| p && (v - med).abs() <= c * mad)
        .collect()
}

/// What one message looked like on arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Dequantized received values (erased positions hold the decoded
    /// value too, but must not be read).
    pub values: Vec<f64>,
    /// `false` for erased positions.
    pub present: Vec<bool>,
    /// `sum(h_i^2)` for every QAM symbol.
    pub combined_gains: Vec<f64>,
    /// QAM symbols decoded to a different label.
    pub symbol_errors: usize,
    /// Values clipped by the quantizer.
    pub saturated: usize,
}

/// Quantizes, modulates and transmits `values`, then erases a
/// `loss_ratio` share of them. The quantizer range is taken from the
/// message itself and assumed known to the receiver.
pub fn transmit_values<R: Rng + ?Sized>(
    values: &[f64],
    cfg: &ChannelConfig,
    quant_bits: u32,
    rng: &mut R,
) -> Result<ChannelRealization> {
    cfg.validate()?;
    let spec = QuantizerSpec::covering(quant_bits, values)?;
    let q = quantize(values, &spec);
    let symbols = qam256_modulate(&q.bits)?;
    let rx = transmit_mrc(&symbols, cfg, rng)?;
    let bits = qam256_demodulate(&rx.symbols);
    let symbol_errors = q
        .bits
        .chunks(BITS_PER_SYMBOL)
        .zip(bits.chunks(BITS_PER_SYMBOL))
        .filter(|(a, b)| a != b)
        .count();
    let received = dequantize(&bits, &spec)?;
    let present = apply_erasures(values.len(), cfg.loss_ratio, rng)?;
    Ok(ChannelRealization {
        values: received,
        present,
        combined_gains: rx.combined_gains,
        symbol_errors,
        saturated: q.saturated,
    })
}
