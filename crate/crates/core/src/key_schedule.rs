//! Measurement-matrix key derivation from channel gains.
//!
//! The two ends of a link estimate the same short vector of channel gains.
//! From it they each derive, without any further exchange:
//!
//! 1. a binary seed, by thresholding the gains at their mean;
//! 2. a maximal-length sequence (m-sequence) from an LFSR whose feedback
//!    polynomial is taken from a fixed table of primitive polynomials, padded
//!    with one trailing zero so it holds exactly as many ones as zeros;
//! 3. a schedule of cyclic shifts computed from the cumulative gain profile;
//! 4. the elementwise sum of all shifted copies, min-max normalized to
//!    `[0, 1]` and reshaped row-major into an `m x n` matrix.
//!
//! The LFSR order is `r = log2(m * n)`, so the padded sequence fills the
//! matrix exactly. Every step is a pure function of its inputs, so equal
//! gains give bit-identical matrices on both ends.

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Lowest LFSR order in the polynomial table.
pub const MIN_ORDER: u32 = 2;
/// Highest LFSR order in the polynomial table.
pub const MAX_ORDER: u32 = 24;

/// Primitive polynomials over GF(2), one per order. Each entry lists the
/// exponents strictly between 0 and the order; the `x^r` and `1` terms are
/// implicit. Both ends must use this exact table.
const PRIMITIVE_TABLE: [&[u32]; (MAX_ORDER - MIN_ORDER + 1) as usize] = [
    &[1],        // x^2 + x + 1
    &[1],        // x^3 + x + 1
    &[1],        // x^4 + x + 1
    &[2],        // x^5 + x^2 + 1
    &[1],        // x^6 + x + 1
    &[1],        // x^7 + x + 1
    &[4, 3, 2],  // x^8 + x^4 + x^3 + x^2 + 1
    &[4],        // x^9 + x^4 + 1
    &[3],        // x^10 + x^3 + 1
    &[2],        // x^11 + x^2 + 1
    &[6, 4, 1],  // x^12 + x^6 + x^4 + x + 1
    &[4, 3, 1],  // x^13 + x^4 + x^3 + x + 1
    &[10, 6, 1], // x^14 + x^10 + x^6 + x + 1
    &[1],        // x^15 + x + 1
    &[12, 3, 1], // x^16 + x^12 + x^3 + x + 1
    &[3],        // x^17 + x^3 + 1
    &[7],        // x^18 + x^7 + 1
    &[5, 2, 1],  // x^19 + x^5 + x^2 + x + 1
    &[3],        // x^20 + x^3 + 1
    &[2],        // x^21 + x^2 + 1
    &[1],        // x^22 + x + 1
    &[5],        // x^23 + x^5 + 1
    &[7, 2, 1],  // x^24 + x^7 + x^2 + x + 1
];

/// Estimated channel amplitude gains shared by both ends of a link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains(Vec<f64>);

impl ChannelGains {
    /// Validates the gains: at least two values, all finite and non-negative.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidGains(format!(
                "need at least 2 gains, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidGains(format!(
                "gains must be finite and non-negative, found {bad}"
            )));
        }
        Ok(ChannelGains(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An ordered sequence of bits, one `u8` (0 or 1) per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|b| *b > 1) {
            return Err(Error::InvalidSeed("bits must be 0 or 1".into()));
        }
        Ok(BitSequence(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|b| **b == 1).count()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

/// Feedback polynomial of an LFSR of the given order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialTaps {
    order: u32,
    taps: Vec<u32>,
}

impl PolynomialTaps {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Exponents strictly between 0 and the order.
    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    /// Feedback mask over the state word where bit `j` holds `a[t + j]`.
    fn feedback_mask(&self) -> u32 {
        self.taps.iter().fold(1u32, |mask, &t| mask | (1 << t))
    }

    /// Human-readable polynomial, e.g. `x^3 + x + 1`.
    pub fn to_polynomial_string(&self) -> String {
        let mut terms = vec![format!("x^{}", self.order)];
        for &t in &self.taps {
            terms.push(if t == 1 {
                "x".to_string()
            } else {
                format!("x^{t}")
            });
        }
        terms.push("1".into());
        terms.join(" + ")
    }
}

/// Cyclic shifts applied to the padded m-sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSchedule {
    shifts: Vec<u64>,
    rounds: usize,
}

impl ShiftSchedule {
    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }
}

/// How the gain vector is transformed for shift rounds after the first.
///
/// Round `k` (1-based) feeds a transformed copy of the gains through the
/// cumulative shift map:
///
/// * `Rotate`: gains rotated left by `k - 1` positions.
/// * `Flip`: odd rounds use the gains rotated left by `(k - 1) / 2`, even
///   rounds the reversed gains rotated left by `(k - 2) / 2`.
/// * `FlipSum`: the elementwise sum of the gains and their reversal, rotated
///   left by `k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftStrategy {
    #[default]
    Rotate,
    Flip,
    FlipSum,
}

impl ShiftStrategy {
    fn round_input(self, h: &[f64], round: usize) -> Vec<f64> {
        let len = h.len();
        let rotate = |v: &[f64], by: usize| -> Vec<f64> {
            let mut out = v.to_vec();
            out.rotate_left(by % len);
            out
        };
        let reversed = || h.iter().rev().copied().collect::<Vec<_>>();
        match self {
            ShiftStrategy::Rotate => rotate(h, round - 1),
            ShiftStrategy::Flip if round % 2 == 1 => rotate(h, (round - 1) / 2),
            ShiftStrategy::Flip => rotate(&reversed(), (round - 2) / 2),
            ShiftStrategy::FlipSum => {
                let sum: Vec<f64> = h.iter().zip(reversed()).map(|(a, b)| a + b).collect();
                rotate(&sum, round - 1)
            }
        }
    }
}

/// The shared key: an `m x n` measurement matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    data: DMatrix<f64>,
}

impl MeasurementMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "dimensions must be positive",
            });
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        // Row-major entries are the column-major layout of the transpose.
        Ok(MeasurementMatrix {
            data: DMatrix::from_column_slice(cols, rows, entries).transpose(),
        })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.data.transpose().as_slice().to_vec()
    }

    /// Submatrix made of the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> DMatrix<f64> {
        self.data.select_rows(rows)
    }
}

/// Thresholds the gains at their mean: `1` where `h >= mean`, else `0`.
///
/// The unit step is right-continuous (a gain equal to the mean maps to `1`).
/// An all-zero result gets its first bit forced to `1`, since an all-zero
/// LFSR state never leaves zero.
pub fn derive_seed(h: &ChannelGains) -> BitSequence {
    let values = h.values();
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    // Clamping keeps the rounded mean inside the data range, so equal gains
    // compare equal to it.
    let mean = (values.iter().sum::<f64>() / values.len() as f64).clamp(min, max);
    let mut bits: Vec<u8> = values.iter().map(|&v| u8::from(v >= mean)).collect();
    repair_zero_seed(&mut bits);
    BitSequence(bits)
}

fn repair_zero_seed(bits: &mut [u8]) {
    if bits.iter().all(|b| *b == 0) {
        if let Some(first) = bits.first_mut() {
            *first = 1;
        }
    }
}

/// Looks up the table's primitive polynomial for `order`.
pub fn primitive_polynomial(order: u32) -> Result<PolynomialTaps> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(PolynomialTaps {
        order,
        taps: PRIMITIVE_TABLE[(order - MIN_ORDER) as usize].to_vec(),
    })
}

/// Runs the Fibonacci LFSR from `seed` for one full period and appends a
/// single zero, giving `2^order` bits with exactly `2^(order-1)` ones.
///
/// The sequence obeys `a[t + r] = a[t] ^ XOR_{i in taps} a[t + i]` with
/// `a[0..r] = seed`.
pub fn lfsr_msequence(seed: &BitSequence, taps: &PolynomialTaps) -> Result<BitSequence> {
    let order = taps.order;
    if seed.len() != order as usize {
        return Err(Error::InvalidSeed(format!(
            "seed length {} does not match order {order}",
            seed.len()
        )));
    }
    if seed.ones() == 0 {
        return Err(Error::InvalidSeed("all-zero seed".into()));
    }
    let mut state = seed
        .bits()
        .iter()
        .enumerate()
        .fold(0u32, |s, (j, &b)| s | (u32::from(b) << j));
    let mask = taps.feedback_mask();
    let period = (1usize << order) - 1;
    let mut bits = Vec::with_capacity(period + 1);
    for _ in 0..period {
        bits.push((state & 1) as u8);
        let feedback = (state & mask).count_ones() & 1;
        state = (state >> 1) | (feedback << (order - 1));
    }
    bits.push(0);
    Ok(BitSequence(bits))
}

/// Cumulative shift map: `round(2^order * cumsum(h)_j / sum(h)) mod 2^order`.
pub fn cumulative_shifts(h: &[f64], order: u32) -> Result<Vec<u64>> {
    let total: f64 = h.iter().sum();
    if h.is_empty() || total <= 0.0 || !total.is_finite() {
        return Err(Error::InvalidGains("gain sum must be positive".into()));
    }
    let modulus = 1u64 << order;
    let scale = modulus as f64;
    let mut acc = 0.0;
    Ok(h.iter()
        .map(|&v| {
            acc += v;
            // The last cumulative value is the sum itself, so it maps to 0.
            let frac = if acc >= total { 1.0 } else { acc / total };
            ((scale * frac).round() as u64) % modulus
        })
        .collect())
}

/// Builds `rounds * L` shifts using the default [`ShiftStrategy::Rotate`].
pub fn shift_schedule(h: &ChannelGains, order: u32, rounds: usize) -> Result<ShiftSchedule> {
    shift_schedule_with(h, order, rounds, ShiftStrategy::Rotate)
}

pub fn shift_schedule_with(
    h: &ChannelGains,
    order: u32,
    rounds: usize,
    strategy: ShiftStrategy,
) -> Result<ShiftSchedule> {
    if rounds == 0 {
        return Err(Error::InvalidGains("rounds must be at least 1".into()));
    }
    let mut shifts = Vec::with_capacity(rounds * h.len());
    for round in 1..=rounds {
        shifts.extend(cumulative_shifts(
            &strategy.round_input(h.values(), round),
            order,
        )?);
    }
    Ok(ShiftSchedule { shifts, rounds })
}

/// Sums every cyclically shifted copy of `sequence`; copy `s` reads
/// `sequence[(p + s) mod len]` at position `p`.
pub fn accumulate_shifts(sequence: &BitSequence, schedule: &ShiftSchedule) -> Vec<u32> {
    let bits = sequence.bits();
    let len = bits.len();
    let mut sums = vec![0u32; len];
    for &shift in schedule.shifts() {
        let s = (shift % len as u64) as usize;
        let (head, tail) = sums.split_at_mut(len - s);
        for (acc, &b) in head.iter_mut().zip(&bits[s..]) {
            *acc += u32::from(b);
        }
        for (acc, &b) in tail.iter_mut().zip(&bits[..s]) {
            *acc += u32::from(b);
        }
    }
    sums
}

/// LFSR order implied by an `m x n` matrix, checking `m < n` and that
/// `m * n` is a supported power of two.
pub fn order_for_shape(rows: usize, cols: usize) -> Result<u32> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidShape {
            rows,
            cols,
            reason: "dimensions must be positive",
        });
    }
    if rows >= cols {
        return Err(Error::InvalidShape {
            rows,
            cols,
            reason: "rows must be fewer than columns",
        });
    }
    let total = rows.checked_mul(cols).ok_or(Error::InvalidShape {
        rows,
        cols,
        reason: "size overflows",
    })?;
    if !total.is_power_of_two() {
        return Err(Error::InvalidShape {
            rows,
            cols,
            reason: "rows * cols must be a power of two",
        });
    }
    let order = total.trailing_zeros();
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(order)
}

/// Derives the `m x n` measurement matrix from channel gains with the
/// default rotation schedule.
pub fn synthesize_matrix(
    h: &ChannelGains,
    rows: usize,
    cols: usize,
    rounds: usize,
) -> Result<MeasurementMatrix> {
    synthesize_matrix_with(h, rows, cols, rounds, ShiftStrategy::Rotate)
}

pub fn synthesize_matrix_with(
    h: &ChannelGains,
    rows: usize,
    cols: usize,
    rounds: usize,
    strategy: ShiftStrategy,
) -> Result<MeasurementMatrix> {
    let sums = pre_normalization_sums(h, rows, cols, rounds, strategy)?;
    let (min, max) = sums
        .iter()
        .fold((u32::MAX, 0u32), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if max == min {
        return Err(Error::InvalidGains(
            "shift schedule produced a constant sequence".into(),
        ));
    }
    let span = f64::from(max - min);
    Ok(MeasurementMatrix {
        data: DMatrix::from_fn(rows, cols, |r, c| {
            f64::from(sums[r * cols + c] - min) / span
        }),
    })
}

/// Runs the key schedule up to (not including) normalization.
pub fn pre_normalization_sums(
    h: &ChannelGains,
    rows: usize,
    cols: usize,
    rounds: usize,
    strategy: ShiftStrategy,
) -> Result<Vec<u32>> {
    let order = order_for_shape(rows, cols)?;
    let seed = fit_seed(&derive_seed(h), order);
    let taps = primitive_polynomial(order)?;
    let sequence = lfsr_msequence(&seed, &taps)?;
    let schedule = shift_schedule_with(h, order, rounds, strategy)?;
    Ok(accumulate_shifts(&sequence, &schedule))
}

/// Cycles or truncates the seed to `order` bits, repairing an all-zero
/// result.
fn fit_seed(seed: &BitSequence, order: u32) -> BitSequence {
    let src = seed.bits();
    let mut bits: Vec<u8> = (0..order as usize).map(|i| src[i % src.len()]).collect();
    repair_zero_seed(&mut bits);
    BitSequence(bits)
}

/// Per-sample chi-square distance between the histogram of `values` and a
/// normal distribution fitted by sample mean and deviation.
///
/// The histogram spans `[min, max]` with `bins` equal-width bins; bins with
/// an expected count below 5 are skipped. The statistic is divided by the
/// sample count so different sizes compare.
pub fn gaussian_chi_square(values: &[f64], bins: usize) -> f64 {
    let count = values.len();
    if count < 2 || bins == 0 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if var <= 0.0 || hi <= lo {
        return f64::INFINITY;
    }
    let normal = Normal::new(mean, var.sqrt()).expect("positive deviation");
    let width = (hi - lo) / bins as f64;
    let mut observed = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        observed[b] += 1;
    }
    let mut stat = 0.0;
    for (b, &obs) in observed.iter().enumerate() {
        let left = if b == 0 {
            f64::NEG_INFINITY
        } else {
            lo + b as f64 * width
        };
        let right = if b + 1 == bins {
            f64::INFINITY
        } else {
            lo + (b + 1) as f64 * width
        };
        let expected = count as f64 * (normal.cdf(right) - normal.cdf(left));
        if expected >= 5.0 {
            stat += (obs as f64 - expected).powi(2) / expected;
        }
    }
    stat / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(v: &[f64]) -> ChannelGains {
        ChannelGains::new(v.to_vec()).unwrap()
    }

    /// Period of the LFSR from the state `1`, found by brute-force stepping.
    fn brute_force_period(taps: &PolynomialTaps) -> u64 {
        let mask = taps.feedback_mask();
        let order = taps.order();
        let start = 1u32;
        let mut state = start;
        let mut steps = 0u64;
        loop {
            let fb = (state & mask).count_ones() & 1;
            state = (state >> 1) | (fb << (order - 1));
            steps += 1;
            if state == start || steps > (1u64 << order) {
                return steps;
            }
        }
    }

    #[test]
    fn seed_examples() {
        assert_eq!(derive_seed(&gains(&[0.2, 0.8])).bits(), &[0, 1]);
        assert_eq!(derive_seed(&gains(&[0.1, 0.1, 0.1])).bits(), &[1, 1, 1]);
        assert_eq!(
            derive_seed(&gains(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).bits(),
            &[0, 0, 0, 1, 1, 1]
        );
    }

    #[test]
    fn gains_validation() {
        assert!(ChannelGains::new(vec![]).is_err());
        assert!(ChannelGains::new(vec![1.0]).is_err());
        assert!(ChannelGains::new(vec![1.0, -0.1]).is_err());
        assert!(ChannelGains::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn small_polynomials_are_the_documented_ones() {
        assert_eq!(
            primitive_polynomial(3).unwrap().to_polynomial_string(),
            "x^3 + x + 1"
        );
        assert_eq!(
            primitive_polynomial(4).unwrap().to_polynomial_string(),
            "x^4 + x + 1"
        );
        assert_eq!(brute_force_period(&primitive_polynomial(3).unwrap()), 7);
        assert_eq!(brute_force_period(&primitive_polynomial(4).unwrap()), 15);
        assert_eq!(
            brute_force_period(&primitive_polynomial(18).unwrap()),
            (1 << 18) - 1
        );
    }

    #[test]
    fn every_table_entry_is_maximal_length() {
        for order in MIN_ORDER..=MAX_ORDER {
            let taps = primitive_polynomial(order).unwrap();
            assert_eq!(
                brute_force_period(&taps),
                (1u64 << order) - 1,
                "order {order}"
            );
        }
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(
            primitive_polynomial(1),
            Err(Error::UnsupportedOrder(1))
        ));
        assert!(matches!(
            primitive_polynomial(25),
            Err(Error::UnsupportedOrder(25))
        ));
    }

    #[test]
    fn msequence_order_three() {
        let seed = BitSequence::new(vec![0, 0, 1]).unwrap();
        let seq = lfsr_msequence(&seed, &primitive_polynomial(3).unwrap()).unwrap();
        assert_eq!(seq.bits(), &[0, 0, 1, 0, 1, 1, 1, 0]);
        assert_eq!(seq.ones(), 4);
    }

    #[test]
    fn msequence_rejects_bad_seeds() {
        let taps = primitive_polynomial(3).unwrap();
        assert!(lfsr_msequence(&BitSequence::new(vec![0, 0, 0]).unwrap(), &taps).is_err());
        assert!(lfsr_msequence(&BitSequence::new(vec![1, 0]).unwrap(), &taps).is_err());
    }

    #[test]
    fn distinct_seeds_give_rotations() {
        for order in 3..=5u32 {
            let taps = primitive_polynomial(order).unwrap();
            let period = (1usize << order) - 1;
            let seq_for = |s: u32| {
                let bits = (0..order).map(|j| ((s >> j) & 1) as u8).collect();
                let mut v = lfsr_msequence(&BitSequence::new(bits).unwrap(), &taps)
                    .unwrap()
                    .into_bits();
                v.pop();
                v
            };
            let reference = seq_for(1);
            for s in 2..(1u32 << order) {
                let other = seq_for(s);
                let is_rotation = (0..period)
                    .any(|k| (0..period).all(|p| other[p] == reference[(p + k) % period]));
                assert!(is_rotation, "order {order} seed {s}");
            }
        }
    }

    #[test]
    fn shift_examples() {
        let s = shift_schedule(&gains(&[1.0, 1.0, 1.0, 1.0]), 4, 1).unwrap();
        assert_eq!(s.shifts(), &[4, 8, 12, 0]);
        assert_eq!(cumulative_shifts(&[1.0], 3).unwrap(), vec![0]);
        let h: Vec<f64> = (1..=18).map(f64::from).collect();
        let s = shift_schedule(&gains(&h), 18, 6).unwrap();
        assert_eq!(s.len(), 108);
        assert_eq!(s.rounds(), 6);
        assert!(s.shifts().iter().all(|&v| v < 1 << 18));
    }

    #[test]
    fn shift_schedule_errors() {
        assert!(shift_schedule(&gains(&[0.0, 0.0]), 4, 1).is_err());
        assert!(shift_schedule(&gains(&[1.0, 2.0]), 4, 0).is_err());
    }

    #[test]
    fn strategies_differ_after_first_round() {
        let h = gains(&[0.3, 1.1, 0.7, 2.0, 0.2]);
        let rot = shift_schedule_with(&h, 10, 3, ShiftStrategy::Rotate).unwrap();
        let flip = shift_schedule_with(&h, 10, 3, ShiftStrategy::Flip).unwrap();
        let sum = shift_schedule_with(&h, 10, 3, ShiftStrategy::FlipSum).unwrap();
        assert_eq!(rot.shifts()[..5], flip.shifts()[..5]);
        assert_ne!(rot.shifts()[5..10], flip.shifts()[5..10]);
        assert_eq!(sum.len(), 15);
    }

    #[test]
    fn shape_checks() {
        assert_eq!(order_for_shape(256, 1024).unwrap(), 18);
        assert!(order_for_shape(1024, 256).is_err());
        assert!(order_for_shape(3, 5).is_err());
        assert!(matches!(
            order_for_shape(1, 2),
            Err(Error::UnsupportedOrder(1))
        ));
        assert!(matches!(
            order_for_shape(1 << 12, 1 << 13),
            Err(Error::UnsupportedOrder(25))
        ));
    }

    #[test]
    fn matrix_is_normalized_and_deterministic() {
        let h = gains(&[0.4, 1.2, 0.9, 0.1, 1.7, 0.6, 1.0, 0.8, 0.3, 1.4]);
        let a = synthesize_matrix(&h, 16, 64, 3).unwrap();
        let b = synthesize_matrix(&h, 16, 64, 3).unwrap();
        assert_eq!(a.rows(), 16);
        assert_eq!(a.cols(), 64);
        let bits_a: Vec<u64> = a.to_row_major().iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = b.to_row_major().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
        let entries = a.to_row_major();
        assert!(entries.contains(&1.0));
        assert!(entries.contains(&0.0));
        assert!(entries.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn pre_normalization_mean_is_half_the_copy_count() {
        let h = gains(&[0.4, 1.2, 0.9, 0.1, 1.7, 0.6]);
        for rounds in [1, 2, 5] {
            let sums = pre_normalization_sums(&h, 32, 128, rounds, ShiftStrategy::Rotate).unwrap();
            let total: u64 = sums.iter().map(|&v| u64::from(v)).sum();
            // Each copy holds exactly len/2 ones.
            assert_eq!(total * 2, (rounds * h.len() * sums.len()) as u64);
        }
    }

    #[test]
    fn row_major_layout() {
        let m = MeasurementMatrix::from_row_major(2, 3, &[0.0, 0.1, 0.2, 0.3, 0.4, 1.0]).unwrap();
        assert_eq!(m.get(0, 2), 0.2);
        assert_eq!(m.get(1, 0), 0.3);
        assert_eq!(m.to_row_major(), vec![0.0, 0.1, 0.2, 0.3, 0.4, 1.0]);
        assert!(MeasurementMatrix::from_row_major(2, 3, &[0.0; 5]).is_err());
    }

    #[test]
    fn chi_square_prefers_gaussian_samples() {
        // Quantiles of a normal are as Gaussian as a sample gets; a two-point
        // sample is as far away as it gets.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let smooth: Vec<f64> = (1..2000)
            .map(|i| normal.inverse_cdf(i as f64 / 2000.0))
            .collect();
        let coarse: Vec<f64> = (0..2000).map(|i| (i % 2) as f64).collect();
        assert!(gaussian_chi_square(&smooth, 32) < 0.01);
        assert!(gaussian_chi_square(&coarse, 32) > gaussian_chi_square(&smooth, 32));
    }
}
