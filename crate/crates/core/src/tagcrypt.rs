//! Authentication tags hidden inside the measurement vector.
//!
//! Rows of the key matrix that hold a maximal entry (exactly `1.0` after
//! normalization) become tag positions. The tag value for row `i` is the
//! diagonal entry `Phi[i][i]`. The transmitter replaces the measurement at
//! each tag position with its tag plus the mean of the remaining
//! measurements, so tags sit at the same amplitude as the data. A receiver
//! holding the same matrix recomputes the positions and values, subtracts
//! its own estimate of the data mean and counts how many tags agree.

use crate::error::{Error, Result};
use crate::key_schedule::MeasurementMatrix;

/// Marks the measurement rows that carry a tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagIndex(Vec<bool>);

impl TagIndex {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        TagIndex(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_tag(&self, row: usize) -> bool {
        self.0[row]
    }

    /// Number of tag rows.
    pub fn tag_count(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn tag_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
    }
}

/// Tag values keyed by row, in increasing row order.
#[derive(Debug, Clone, PartialEq)]
pub struct TagValues(Vec<(usize, f64)>);

impl TagValues {
    pub fn new(entries: Vec<(usize, f64)>) -> Self {
        TagValues(entries)
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value_at(&self, row: usize) -> Option<f64> {
        self.0
            .binary_search_by_key(&row, |(r, _)| *r)
            .ok()
            .map(|i| self.0[i].1)
    }
}

/// Tags recovered by a receiver; `None` marks a tag position that did not
/// arrive.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedTags(Vec<(usize, Option<f64>)>);

impl ExtractedTags {
    pub fn entries(&self) -> &[(usize, Option<f64>)] {
        &self.0
    }

    pub fn present_count(&self) -> usize {
        self.0.iter().filter(|(_, v)| v.is_some()).count()
    }

    pub fn value_at(&self, row: usize) -> Option<f64> {
        self.0
            .binary_search_by_key(&row, |(r, _)| *r)
            .ok()
            .and_then(|i| self.0[i].1)
    }
}

/// Transmit vector with tags embedded.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedMessage {
    pub values: Vec<f64>,
    /// Tag positions used by the transmitter.
    pub index: TagIndex,
}

/// A message as seen by the receiver after erasures and filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedMessage {
    values: Vec<f64>,
    present: Vec<bool>,
}

impl ReceivedMessage {
    pub fn new(values: Vec<f64>, present: Vec<bool>) -> Result<Self> {
        if values.len() != present.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                actual: present.len(),
            });
        }
        Ok(ReceivedMessage { values, present })
    }

    /// Every position present.
    pub fn complete(values: Vec<f64>) -> Self {
        let present = vec![true; values.len()];
        ReceivedMessage { values, present }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn present(&self) -> &[bool] {
        &self.present
    }

    /// Value at `row`, or `None` when absent.
    pub fn get(&self, row: usize) -> Option<f64> {
        self.present[row].then(|| self.values[row])
    }
}

/// Present positions partitioned by the tag index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplitMessage {
    pub data_rows: Vec<usize>,
    pub data_values: Vec<f64>,
    pub tag_rows: Vec<usize>,
    pub tag_values: Vec<f64>,
}

/// Acceptance thresholds: per-tag tolerance and required match fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuthThresholds {
    pub tau1: f64,
    pub tau2: f64,
}

impl Default for AuthThresholds {
    fn default() -> Self {
        AuthThresholds {
            tau1: 0.05,
            tau2: 0.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuthDecision {
    pub accepted: bool,
    /// Present tags within `tau1` of the expected value.
    pub matched: usize,
    /// Transmitter-side tag count `N_t`.
    pub compared: usize,
    pub thresholds: AuthThresholds,
}

/// Marks rows holding an entry exactly equal to `1.0`.
pub fn tag_index(phi: &MeasurementMatrix) -> Result<TagIndex> {
    let m = phi.as_matrix();
    let max = m.max();
    if max != 1.0 {
        return Err(Error::NotNormalized(max));
    }
    Ok(TagIndex(
        m.row_iter()
            .map(|row| row.iter().any(|&v| v == 1.0))
            .collect(),
    ))
}

/// Tag value `Phi[i][i]` for every tag row `i`.
pub fn tag_sequence(phi: &MeasurementMatrix, k: &TagIndex) -> TagValues {
    TagValues(k.tag_rows().map(|i| (i, phi.get(i, i))).collect())
}

/// Mean of the values at non-tag positions, summed in row order.
fn data_mean<'a>(values: impl Iterator<Item = &'a f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Replaces tag positions of `y` with `t_i + mean(non-tag y)`.
pub fn embed(y: &[f64], k: &TagIndex, t: &TagValues) -> Result<TaggedMessage> {
    if y.len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            actual: y.len(),
        });
    }
    let mean = data_mean(
        y.iter()
            .zip(k.bits())
            .filter(|(_, tag)| !**tag)
            .map(|(v, _)| v),
    )
    .ok_or(Error::NoDataPositions)?;
    let mut values = y.to_vec();
    for &(row, tag) in t.entries() {
        if row >= values.len() || !k.is_tag(row) {
            return Err(Error::DimensionMismatch {
                expected: k.len(),
                actual: row,
            });
        }
        values[row] = tag + mean;
    }
    Ok(TaggedMessage {
        values,
        index: k.clone(),
    })
}

/// Partitions the present positions into data and tag parts.
pub fn split(received: &ReceivedMessage, k: &TagIndex) -> Result<SplitMessage> {
    if received.len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            actual: received.len(),
        });
    }
    let mut out = SplitMessage::default();
    for (row, &tag) in k.bits().iter().enumerate() {
        if let Some(v) = received.get(row) {
            if tag {
                out.tag_rows.push(row);
                out.tag_values.push(v);
            } else {
                out.data_rows.push(row);
                out.data_values.push(v);
            }
        }
    }
    Ok(out)
}

/// Recovers tags as `s_i - mean(present non-tag values)`.
pub fn extract_tag(received: &ReceivedMessage, k: &TagIndex) -> Result<ExtractedTags> {
    let parts = split(received, k)?;
    let mean = data_mean(parts.data_values.iter()).ok_or(Error::NoDataPositions)?;
    Ok(ExtractedTags(
        k.tag_rows()
            .map(|row| (row, received.get(row).map(|v| v - mean)))
            .collect(),
    ))
}

/// Accepts when more than `tau2 * N_t` tags lie within `tau1` of the
/// receiver's own tags. Missing tags count as mismatches.
pub fn authenticate(
    t_hat: &ExtractedTags,
    t: &TagValues,
    thresholds: AuthThresholds,
) -> AuthDecision {
    let matched = t
        .entries()
        .iter()
        .filter(|(row, expected)| {
            t_hat
                .value_at(*row)
                .is_some_and(|got| (got - expected).abs() < thresholds.tau1)
        })
        .count();
    let compared = t.len();
    AuthDecision {
        accepted: matched as f64 > thresholds.tau2 * compared as f64,
        matched,
        compared,
        thresholds,
    }
}
