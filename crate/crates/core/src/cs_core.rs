//! Compressed-sensing measurement and sparse recovery.
//!
//! [`omp_recover`] is the production recovery path. [`exhaustive_l0`] solves
//! the same problem by brute-force support enumeration and exists to check
//! it on small instances; the two share no least-squares code.

use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};

/// Largest `C(n, k)` that [`exhaustive_l0`] will enumerate.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

/// A signal with few nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(values: Vec<f64>) -> Self {
        SparseSignal { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of entries that are exactly nonzero.
    pub fn sparsity_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| (*v != 0.0).then_some(i))
            .collect()
    }

    /// Largest absolute entry.
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Output of `Phi x + noise`, one value per matrix row.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector(pub Vec<f64>);

impl MeasurementVector {
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

/// Basis in which the signal is sparse: `x = Psi * x'`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SparseBasis {
    #[default]
    Identity,
    Matrix(DMatrix<f64>),
}

impl SparseBasis {
    /// Wraps an explicit basis, checking it is square and full rank.
    pub fn from_matrix(psi: DMatrix<f64>) -> Result<Self> {
        if psi.nrows() != psi.ncols() || psi.nrows() == 0 {
            return Err(Error::InvalidShape {
                rows: psi.nrows(),
                cols: psi.ncols(),
                reason: "sparse basis must be square",
            });
        }
        let svd = psi.clone().svd(false, false);
        let max_sv = svd.singular_values.max();
        if svd.rank(max_sv * psi.nrows() as f64 * f64::EPSILON) < psi.nrows() {
            return Err(Error::InvalidShape {
                rows: psi.nrows(),
                cols: psi.ncols(),
                reason: "sparse basis must be full rank",
            });
        }
        Ok(SparseBasis::Matrix(psi))
    }
}

/// Result of a sparse recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    /// Recovered signal in the original domain (`Psi * coefficients`).
    pub signal: Vec<f64>,
    /// Final residual l2 norm.
    pub residual_norm: f64,
    /// Number of atoms added.
    pub iterations: usize,
    /// Selected column indices, in selection order.
    pub support: Vec<usize>,
    /// Residual norm before the first and after every iteration.
    pub residual_history: Vec<f64>,
}

/// Computes `Phi x + xi` with `xi` i.i.d. zero-mean Gaussian of deviation
/// `noise_sigma`.
pub fn measure<R: Rng + ?Sized>(
    phi: &DMatrix<f64>,
    x: &SparseSignal,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<MeasurementVector> {
    if phi.ncols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.ncols(),
            actual: x.len(),
        });
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidRecoveryParameter(
            "noise sigma must be finite and >= 0",
        ));
    }
    let mut y = phi * DVector::from_column_slice(x.values());
    if noise_sigma > 0.0 {
        let noise = Normal::new(0.0, noise_sigma).expect("valid sigma");
        for v in y.iter_mut() {
            *v += noise.sample(rng);
        }
    }
    Ok(MeasurementVector(y.as_slice().to_vec()))
}

/// Largest absolute inner product between distinct l2-normalized columns.
pub fn mutual_incoherence(a: &DMatrix<f64>) -> Result<f64> {
    if a.ncols() < 2 {
        return Err(Error::InvalidShape {
            rows: a.nrows(),
            cols: a.ncols(),
            reason: "need at least two columns",
        });
    }
    let mut normalized = a.clone();
    for (j, mut col) in normalized.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        col /= norm;
    }
    let gram = normalized.tr_mul(&normalized);
    let mut mu: f64 = 0.0;
    for j in 0..gram.ncols() {
        for i in 0..j {
            mu = mu.max(gram[(i, j)].abs());
        }
    }
    // Rounding can push a perfectly coherent pair a hair above 1.
    Ok(mu.min(1.0))
}

/// Checks `alpha * mu^2 * k * ln(n) <= m <= n`.
pub fn measurement_bound_ok(mu: f64, k: usize, n: usize, m: usize, alpha: f64) -> bool {
    alpha * mu * mu * k as f64 * (n as f64).ln() <= m as f64 && m <= n
}

/// Orthogonal matching pursuit over `A = phi_rows * psi`.
///
/// Each iteration adds the column with the largest normalized correlation
/// to the residual and re-solves least squares on the accumulated support
/// through an incrementally grown QR factorization (modified Gram-Schmidt
/// with one reorthogonalization pass). Iteration stops once the residual
/// norm is at most `tol` or the support holds `max_support` columns.
/// Columns numerically dependent on the current support are skipped.
pub fn omp_recover(
    y_hat: &[f64],
    phi_rows: &DMatrix<f64>,
    psi: &SparseBasis,
    max_support: usize,
    tol: f64,
) -> Result<RecoveryReport> {
    if y_hat.is_empty() {
        return Err(Error::InvalidRecoveryParameter("empty measurement vector"));
    }
    if max_support == 0 {
        return Err(Error::InvalidRecoveryParameter(
            "max_support must be positive",
        ));
    }
    if phi_rows.nrows() != y_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: phi_rows.nrows(),
            actual: y_hat.len(),
        });
    }
    if max_support > phi_rows.nrows() {
        return Err(Error::InvalidRecoveryParameter(
            "max_support exceeds the number of measurements",
        ));
    }
    let a: Cow<DMatrix<f64>> = match psi {
        SparseBasis::Identity => Cow::Borrowed(phi_rows),
        SparseBasis::Matrix(basis) => {
            if basis.nrows() != phi_rows.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: phi_rows.ncols(),
                    actual: basis.nrows(),
                });
            }
            Cow::Owned(phi_rows * basis)
        }
    };
    let (rows, cols) = a.shape();
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut excluded: Vec<bool> = norms.iter().map(|&n| n == 0.0).collect();

    let y = DVector::from_column_slice(y_hat);
    let mut residual = y.clone();
    let mut q_cols: Vec<DVector<f64>> = Vec::with_capacity(max_support);
    // Column k of R holds the projections of the k-th selected atom.
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(max_support);
    let mut qty: Vec<f64> = Vec::with_capacity(max_support);
    let mut support: Vec<usize> = Vec::with_capacity(max_support);
    let mut history = vec![residual.norm()];

    while support.len() < max_support && *history.last().unwrap() > tol {
        let corr = a.tr_mul(&residual);
        let best = (0..cols)
            .filter(|&j| !excluded[j])
            .map(|j| (j, corr[j].abs() / norms[j]))
            .fold(None, |best: Option<(usize, f64)>, (j, s)| match best {
                Some((_, bs)) if bs >= s => best,
                _ => Some((j, s)),
            });
        let Some((j, score)) = best else { break };
        if score == 0.0 {
            break;
        }
        excluded[j] = true;

        let mut v = a.column(j).into_owned();
        let mut proj = vec![0.0; q_cols.len() + 1];
        for _ in 0..2 {
            for (k, q) in q_cols.iter().enumerate() {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
                proj[k] += c;
            }
        }
        let norm = v.norm();
        if norm <= 1e-10 * norms[j] {
            continue;
        }
        v /= norm;
        proj[q_cols.len()] = norm;
        let z = v.dot(&residual);
        residual.axpy(-z, &v, 1.0);
        q_cols.push(v);
        r_cols.push(proj);
        qty.push(z);
        support.push(j);
        history.push(residual.norm());
    }

    // Back-substitution on the upper-triangular R.
    let k = support.len();
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = qty[i];
        for (c, r_col) in coef.iter().zip(&r_cols).skip(i + 1) {
            acc -= r_col[i] * c;
        }
        coef[i] = acc / r_cols[i][i];
    }
    let mut sparse = DVector::zeros(cols);
    for (&j, &c) in support.iter().zip(&coef) {
        sparse[j] = c;
    }
    let signal = match psi {
        SparseBasis::Identity => sparse,
        SparseBasis::Matrix(basis) => basis * sparse,
    };
    debug_assert_eq!(residual.len(), rows);
    Ok(RecoveryReport {
        signal: signal.as_slice().to_vec(),
        residual_norm: *history.last().unwrap(),
        iterations: k,
        support,
        residual_history: history,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic
/// order. Returns false once exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum-support least-squares solution with residual at most `tol`.
///
/// Enumerates every support of size `0..=k_max` in increasing size. The
/// first size with a feasible support wins; within it, the lowest residual
/// wins. Least squares uses an SVD pseudo-inverse.
pub fn exhaustive_l0(
    y: &[f64],
    a: &DMatrix<f64>,
    k_max: usize,
    tol: f64,
) -> Result<RecoveryReport> {
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: y.len(),
        });
    }
    let n = a.ncols();
    if k_max == 0 || k_max > n {
        return Err(Error::InvalidRecoveryParameter(
            "k_max must be in 1..=columns",
        ));
    }
    if binomial(n, k_max) > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge { n, k: k_max });
    }
    let yv = DVector::from_column_slice(y);
    let y_norm = yv.norm();
    let mut history = vec![y_norm];
    if y_norm <= tol {
        return Ok(RecoveryReport {
            signal: vec![0.0; n],
            residual_norm: y_norm,
            iterations: 0,
            support: Vec::new(),
            residual_history: history,
        });
    }
    for k in 1..=k_max {
        let mut idx: Vec<usize> = (0..k).collect();
        let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
        loop {
            let sub = a.select_columns(idx.iter());
            let coef = sub
                .clone()
                .svd(true, true)
                .solve(&yv, 1e-12)
                .expect("svd computed with both factors");
            let res = (&yv - &sub * &coef).norm();
            if res <= tol && best.as_ref().is_none_or(|(b, _, _)| res < *b) {
                best = Some((res, idx.clone(), coef));
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        if let Some((res, support, coef)) = best {
            let mut signal = vec![0.0; n];
            for (&j, &c) in support.iter().zip(coef.iter()) {
                signal[j] = c;
            }
            history.push(res);
            return Ok(RecoveryReport {
                signal,
                residual_norm: res,
                iterations: k,
                support,
                residual_history: history,
            });
        }
    }
    Err(Error::NoFeasibleSupport { k_max })
}

/// Draws a signal of length `n` with `round(ratio * n)` standard-normal
/// nonzeros at uniformly chosen positions.
pub fn generate_sparse_signal<R: Rng + ?Sized>(
    n: usize,
    sparsity_ratio: f64,
    rng: &mut R,
) -> Result<SparseSignal> {
    if !(sparsity_ratio > 0.0 && sparsity_ratio <= 1.0) {
        return Err(Error::InvalidRecoveryParameter(
            "sparsity ratio must be in (0, 1]",
        ));
    }
    let k = (sparsity_ratio * n as f64).round() as usize;
    if k == 0 {
        return Err(Error::InvalidRecoveryParameter(
            "sparsity ratio selects no entries",
        ));
    }
    let mut values = vec![0.0; n];
    for pos in index::sample(rng, n, k) {
        values[pos] = loop {
            let v: f64 = StandardNormal.sample(rng);
            if v != 0.0 {
                break v;
            }
        };
    }
    Ok(SparseSignal { values })
}

/// Root-mean-square error `sqrt(||x_hat - x||^2 / n)`.
pub fn rmse(x_hat: &[f64], x: &[f64]) -> Result<f64> {
    if x_hat.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: x_hat.len(),
        });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let sq: f64 = x_hat.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
    Ok((sq / x.len() as f64).sqrt())
}

/// True when the recovery RMSE is strictly below `tau3`.
pub fn perfect_recovery(x_hat: &[f64], x: &[f64], tau3: f64) -> Result<bool> {
    Ok(rmse(x_hat, x)? < tau3)
}
