//! Monte Carlo harness for the full encrypt, tag, transmit, authenticate and
//! recover chain.
//!
//! # Seeds
//!
//! Every trial is driven by a 64-bit trial seed derived from
//! `(master seed, sweep axis, trial index)` with SplitMix64:
//!
//! ```text
//! trial_seed = splitmix64(splitmix64(master ^ axis_id) + trial_index)
//! ```
//!
//! The grid point is not part of the derivation, so trial `i` sees the same
//! gains, signal and noise stream at every grid point (common random
//! numbers). Within a trial, each random quantity has its own ChaCha8
//! stream of the trial seed (see [`Stream`]). Results therefore do not
//! depend on execution order or thread count.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cs_core::{generate_sparse_signal, measure, omp_recover, rmse, SparseBasis};
use crate::error::{Error, Result};
use crate::key_schedule::{synthesize_matrix, ChannelGains, MeasurementMatrix};
use crate::phy_channel::{outlier_filter, rayleigh_sample, transmit_values, ChannelConfig};
use crate::tagcrypt::{
    authenticate, embed, extract_tag, split, tag_index, tag_sequence, AuthThresholds,
    ReceivedMessage,
};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    #[default]
    None,
    Snr,
    Sparsity,
    Loss,
}

impl SweepAxis {
    fn id(self) -> u64 {
        match self {
            SweepAxis::None => 0,
            SweepAxis::Snr => 1,
            SweepAxis::Sparsity => 2,
            SweepAxis::Loss => 3,
        }
    }

    /// CSV column name for the axis value. The SNR column name records the
    /// reference plane: per-branch symbol SNR before combining.
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::None => "point",
            SweepAxis::Snr => "snr_db_per_branch_pre_mrc",
            SweepAxis::Sparsity => "sparsity_ratio",
            SweepAxis::Loss => "loss_ratio",
        }
    }
}

/// Everything a sweep needs. Deserializes from a flat TOML table; missing
/// keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Signal length.
    pub n: usize,
    /// Measurements per message.
    pub m: usize,
    pub sparsity_ratio: f64,
    /// Shift rounds in the key schedule.
    pub rounds: usize,
    /// Number of channel gains feeding the key schedule.
    pub gains_len: usize,
    pub n_channels: usize,
    pub omega: f64,
    pub snr_db: f64,
    pub loss_ratio: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// Perfect-recovery RMSE threshold relative to the signal's peak.
    pub tau3: f64,
    /// Constant of the measurement-count bound.
    pub alpha: f64,
    /// Outlier filter width in normalized MADs.
    pub filter_c: f64,
    pub quant_bits: u32,
    /// Deviation of additive Gaussian noise on the measurements.
    pub measurement_noise: f64,
    /// OMP stops once the residual is below this fraction of `||y||`.
    pub omp_rel_tol: f64,
    pub trials: usize,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub seed: u64,
    /// Transmitter and receiver derive their keys from different gains.
    pub eavesdropper: bool,
    /// When set, the eavesdropper's gains are the legitimate gains plus
    /// Gaussian noise of this deviation instead of an independent draw.
    pub eve_gain_perturbation: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 1024,
            m: 256,
            sparsity_ratio: 0.02,
            rounds: 6,
            gains_len: 18,
            n_channels: 4,
            omega: 1.0,
            snr_db: 40.0,
            loss_ratio: 0.0,
            tau1: 0.05,
            tau2: 0.6,
            tau3: 1e-3,
            alpha: 1.0,
            filter_c: 5.0,
            quant_bits: 16,
            measurement_noise: 0.0,
            omp_rel_tol: 1e-9,
            trials: 200,
            axis: SweepAxis::None,
            grid: vec![0.0],
            seed: 0x5eed,
            eavesdropper: false,
            eve_gain_perturbation: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        crate::key_schedule::order_for_shape(self.m, self.n)?;
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.grid.is_empty() {
            return fail("grid must not be empty".into());
        }
        if self
            .grid
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
        {
            return fail("grid must be strictly increasing".into());
        }
        if self.gains_len < 2 || self.rounds == 0 {
            return fail("need gains_len >= 2 and rounds >= 1".into());
        }
        for (name, v) in [
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("tau3", self.tau3),
            ("alpha", self.alpha),
            ("filter_c", self.filter_c),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if self.tau2 >= 1.0 {
            return fail("tau2 must be below 1".into());
        }
        if !(self.measurement_noise >= 0.0 && self.omp_rel_tol >= 0.0) {
            return fail("noise and tolerance must be non-negative".into());
        }
        if let Some(p) = self.eve_gain_perturbation {
            if !(p >= 0.0 && p.is_finite()) {
                return fail("eve_gain_perturbation must be non-negative".into());
            }
        }
        for &v in &self.grid {
            self.at(v).check_point()?;
        }
        self.check_point()
    }

    fn check_point(&self) -> Result<()> {
        if !(self.sparsity_ratio > 0.0 && self.sparsity_ratio <= 1.0)
            || (self.sparsity_ratio * self.n as f64).round() < 1.0
        {
            return Err(Error::InvalidConfig(format!(
                "sparsity ratio {} selects no entries",
                self.sparsity_ratio
            )));
        }
        if self.quant_bits != 8 && self.quant_bits != 16 {
            return Err(Error::InvalidConfig("quant_bits must be 8 or 16".into()));
        }
        self.channel().validate()
    }

    pub fn channel(&self) -> ChannelConfig {
        ChannelConfig {
            n_channels: self.n_channels,
            omega: self.omega,
            snr_db: self.snr_db,
            loss_ratio: self.loss_ratio,
        }
    }

    pub fn thresholds(&self) -> AuthThresholds {
        AuthThresholds {
            tau1: self.tau1,
            tau2: self.tau2,
        }
    }

    /// Nonzero count of generated signals.
    pub fn sparsity_count(&self) -> usize {
        (self.sparsity_ratio * self.n as f64).round() as usize
    }

    /// The config with the sweep axis set to `value`.
    pub fn at(&self, value: f64) -> ExperimentConfig {
        let mut cfg = self.clone();
        match self.axis {
            SweepAxis::None => {}
            SweepAxis::Snr => cfg.snr_db = value,
            SweepAxis::Sparsity => cfg.sparsity_ratio = value,
            SweepAxis::Loss => cfg.loss_ratio = value,
        }
        cfg
    }

    /// Lower end of the measurement-count bound, `alpha * mu^2 * K * ln n`.
    pub fn sampling_bound(&self, mu: f64) -> f64 {
        self.alpha * mu * mu * self.sparsity_count() as f64 * (self.n as f64).ln()
    }
}

/// Independent random streams within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    LegitGains = 0,
    EveGains = 1,
    Signal = 2,
    MeasurementNoise = 3,
    Channel = 4,
}

pub fn stream_rng(trial_seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    rng.set_stream(stream as u64);
    rng
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, axis: SweepAxis, trial: u64) -> u64 {
    splitmix64(splitmix64(master ^ axis.id()).wrapping_add(trial))
}

/// Outcome of one pass through the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub recovered: bool,
    pub authenticated: bool,
    /// Data rows that reached OMP after erasures and filtering.
    pub surviving_rows: usize,
    /// Receiver-side tag count `N_t`.
    pub tag_count: usize,
    pub matched_tags: usize,
    pub rmse: f64,
    pub symbol_errors: usize,
    /// Set when a module error aborted the trial.
    pub failure: Option<String>,
}

impl TrialOutcome {
    fn failed(reason: String) -> Self {
        TrialOutcome {
            recovered: false,
            authenticated: false,
            surviving_rows: 0,
            tag_count: 0,
            matched_tags: 0,
            rmse: f64::NAN,
            symbol_errors: 0,
            failure: Some(reason),
        }
    }
}

/// Runs the whole chain once. Errors become failed trials.
pub fn run_trial(cfg: &ExperimentConfig, seed: u64) -> TrialOutcome {
    try_run_trial(cfg, seed).unwrap_or_else(|e| TrialOutcome::failed(e.to_string()))
}

fn eve_gains(cfg: &ExperimentConfig, legit: &ChannelGains, seed: u64) -> Result<ChannelGains> {
    let mut rng = stream_rng(seed, Stream::EveGains);
    match cfg.eve_gain_perturbation {
        Some(sigma) if sigma > 0.0 => {
            let noise = Normal::new(0.0, sigma).expect("valid sigma");
            ChannelGains::new(
                legit
                    .values()
                    .iter()
                    .map(|&h| (h + noise.sample(&mut rng)).max(0.0))
                    .collect(),
            )
        }
        Some(_) => Ok(legit.clone()),
        None => ChannelGains::new(rayleigh_sample(cfg.omega, cfg.gains_len, &mut rng)?),
    }
}

fn try_run_trial(cfg: &ExperimentConfig, seed: u64) -> Result<TrialOutcome> {
    let legit = ChannelGains::new(rayleigh_sample(
        cfg.omega,
        cfg.gains_len,
        &mut stream_rng(seed, Stream::LegitGains),
    )?)?;
    let rx_phi = synthesize_matrix(&legit, cfg.m, cfg.n, cfg.rounds)?;
    let eve_phi: Option<MeasurementMatrix> = if cfg.eavesdropper {
        Some(synthesize_matrix(
            &eve_gains(cfg, &legit, seed)?,
            cfg.m,
            cfg.n,
            cfg.rounds,
        )?)
    } else {
        None
    };
    let tx_phi = eve_phi.as_ref().unwrap_or(&rx_phi);

    // Transmitter.
    let x = generate_sparse_signal(
        cfg.n,
        cfg.sparsity_ratio,
        &mut stream_rng(seed, Stream::Signal),
    )?;
    let y = measure(
        tx_phi.as_matrix(),
        &x,
        cfg.measurement_noise,
        &mut stream_rng(seed, Stream::MeasurementNoise),
    )?;
    let tx_index = tag_index(tx_phi)?;
    let message = embed(y.values(), &tx_index, &tag_sequence(tx_phi, &tx_index))?;

    // Link.
    let link = transmit_values(
        &message.values,
        &cfg.channel(),
        cfg.quant_bits,
        &mut stream_rng(seed, Stream::Channel),
    )?;
    let present = outlier_filter(&link.values, &link.present, cfg.filter_c);
    let received = ReceivedMessage::new(link.values, present)?;

    // Receiver.
    let index = tag_index(&rx_phi)?;
    let tags = tag_sequence(&rx_phi, &index);
    let (authenticated, matched_tags) = match extract_tag(&received, &index) {
        Ok(t_hat) => {
            let d = authenticate(&t_hat, &tags, cfg.thresholds());
            (d.accepted, d.matched)
        }
        Err(Error::NoDataPositions) => (false, 0),
        Err(e) => return Err(e),
    };
    let parts = split(&received, &index)?;
    let rows = parts.data_rows.len();
    let estimate = if rows == 0 {
        vec![0.0; cfg.n]
    } else {
        let phi_rows = rx_phi.select_rows(&parts.data_rows);
        let max_support = (2 * x.sparsity_count()).min(rows);
        let y_norm = parts.data_values.iter().map(|v| v * v).sum::<f64>().sqrt();
        omp_recover(
            &parts.data_values,
            &phi_rows,
            &SparseBasis::Identity,
            max_support,
            cfg.omp_rel_tol * y_norm,
        )?
        .signal
    };
    let err = rmse(&estimate, x.values())?;
    Ok(TrialOutcome {
        recovered: err < cfg.tau3 * x.peak(),
        authenticated,
        surviving_rows: rows,
        tag_count: index.tag_count(),
        matched_tags,
        rmse: err,
        symbol_errors: link.symbol_errors,
        failure: None,
    })
}

/// Half-width of the 95% Wilson score interval.
pub fn wilson_half_width(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Aggregated results at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub trials: usize,
    pub recovered: usize,
    pub authenticated: usize,
    pub failures: usize,
    pub recovery_p: f64,
    pub auth_p: f64,
    pub recovery_half_width: f64,
    pub auth_half_width: f64,
}

impl SweepPoint {
    pub fn from_counts(value: f64, trials: usize, recovered: usize, authenticated: usize) -> Self {
        let frac = |k: usize| {
            if trials == 0 {
                f64::NAN
            } else {
                k as f64 / trials as f64
            }
        };
        SweepPoint {
            value,
            trials,
            recovered,
            authenticated,
            failures: 0,
            recovery_p: frac(recovered),
            auth_p: frac(authenticated),
            recovery_half_width: wilson_half_width(recovered, trials),
            auth_half_width: wilson_half_width(authenticated, trials),
        }
    }

    /// The wider of the two Wilson half-widths.
    pub fn ci_half_width(&self) -> f64 {
        self.recovery_half_width.max(self.auth_half_width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

/// Runs `cfg.trials` trials at every grid point, in parallel.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let point_cfgs: Vec<ExperimentConfig> = cfg.grid.iter().map(|&v| cfg.at(v)).collect();
    let trials = cfg.trials;
    let outcomes: Vec<TrialOutcome> = (0..point_cfgs.len() * trials)
        .into_par_iter()
        .map(|job| {
            let (point, trial) = (job / trials, job % trials);
            run_trial(
                &point_cfgs[point],
                trial_seed(cfg.seed, cfg.axis, trial as u64),
            )
        })
        .collect();
    let points = cfg
        .grid
        .iter()
        .zip(outcomes.chunks(trials))
        .map(|(&value, chunk)| {
            let rec = chunk.iter().filter(|o| o.recovered).count();
            let auth = chunk.iter().filter(|o| o.authenticated).count();
            let mut p = SweepPoint::from_counts(value, trials, rec, auth);
            p.failures = chunk.iter().filter(|o| o.failure.is_some()).count();
            p
        })
        .collect();
    Ok(SweepResult {
        axis: cfg.axis,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominancePoint {
    pub value: f64,
    pub auth_p: f64,
    pub recovery_p: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub points: Vec<DominancePoint>,
}

impl DominanceReport {
    pub fn all_hold(&self) -> bool {
        self.points.iter().all(|p| p.holds)
    }
}

/// Checks `auth_p >= recovery_p - slack` at every point, with
/// `slack = slack_factor * ci_half_width`.
pub fn auth_vs_recovery_dominance(result: &SweepResult, slack_factor: f64) -> DominanceReport {
    DominanceReport {
        points: result
            .points
            .iter()
            .map(|p| {
                let slack = slack_factor * p.ci_half_width();
                DominancePoint {
                    value: p.value,
                    auth_p: p.auth_p,
                    recovery_p: p.recovery_p,
                    slack,
                    holds: p.auth_p >= p.recovery_p - slack,
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Recovery,
    Auth,
}

impl Metric {
    fn of(self, p: &SweepPoint) -> (f64, f64) {
        match self {
            Metric::Recovery => (p.recovery_p, p.recovery_half_width),
            Metric::Auth => (p.auth_p, p.auth_half_width),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NonDecreasing,
    NonIncreasing,
}

/// A pair of grid points breaking a monotone trend by more than the slack.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendViolation {
    pub metric: Metric,
    pub from: f64,
    pub to: f64,
    pub from_p: f64,
    pub to_p: f64,
}

/// Checks a monotone trend over every ordered pair of grid points, allowing
/// `slack_factor` times the larger Wilson half-width of the pair.
pub fn check_trend(
    result: &SweepResult,
    metric: Metric,
    trend: Trend,
    slack_factor: f64,
) -> Vec<TrendViolation> {
    let mut out = Vec::new();
    for (i, a) in result.points.iter().enumerate() {
        for b in &result.points[i + 1..] {
            let ((pa, ha), (pb, hb)) = (metric.of(a), metric.of(b));
            let slack = slack_factor * ha.max(hb);
            let broken = match trend {
                Trend::NonDecreasing => pb < pa - slack,
                Trend::NonIncreasing => pb > pa + slack,
            };
            if broken {
                out.push(TrendViolation {
                    metric,
                    from: a.value,
                    to: b.value,
                    from_p: pa,
                    to_p: pb,
                });
            }
        }
    }
    out
}

/// Pointwise `better >= worse - slack` for two curves on the same grid.
pub fn check_ordering(
    worse: &SweepResult,
    better: &SweepResult,
    metric: Metric,
    slack_factor: f64,
) -> Vec<TrendViolation> {
    worse
        .points
        .iter()
        .zip(&better.points)
        .filter_map(|(w, b)| {
            let ((pw, hw), (pb, hb)) = (metric.of(w), metric.of(b));
            (pb < pw - slack_factor * hw.max(hb)).then_some(TrendViolation {
                metric,
                from: w.value,
                to: b.value,
                from_p: pw,
                to_p: pb,
            })
        })
        .collect()
}

/// Expected trends along each axis.
pub fn expected_trends(axis: SweepAxis) -> Vec<(Metric, Trend)> {
    match axis {
        SweepAxis::None => vec![],
        SweepAxis::Snr => vec![
            (Metric::Recovery, Trend::NonDecreasing),
            (Metric::Auth, Trend::NonDecreasing),
        ],
        SweepAxis::Sparsity => vec![(Metric::Recovery, Trend::NonIncreasing)],
        SweepAxis::Loss => vec![(Metric::Recovery, Trend::NonIncreasing)],
    }
}

/// First grid value whose recovery probability drops below `level`.
pub fn knee(result: &SweepResult, level: f64) -> Option<f64> {
    result
        .points
        .iter()
        .find(|p| p.recovery_p < level)
        .map(|p| p.value)
}

/// Shape properties a preset's series must satisfy, as failure messages.
/// Series are expected in [`preset`] order. Slacks are `slack_factor`
/// Wilson half-widths.
pub fn preset_property_failures(
    name: &str,
    series: &[(String, SweepResult)],
    slack_factor: f64,
) -> Vec<String> {
    let mut failures = Vec::new();
    let mut report = |label: &str, what: &str, v: &TrendViolation| {
        failures.push(format!(
            "{label}: {what} {:?} {} ({:.4}) vs {} ({:.4})",
            v.metric, v.from, v.from_p, v.to, v.to_p
        ))
    };
    for (label, result) in series {
        for (metric, trend) in expected_trends(result.axis) {
            for v in check_trend(result, metric, trend, slack_factor) {
                report(label, "trend", &v);
            }
        }
    }
    let ordered = |metrics: &[Metric], report: &mut dyn FnMut(&str, &str, &TrendViolation)| {
        for pair in series.windows(2) {
            for &metric in metrics {
                for v in check_ordering(&pair[0].1, &pair[1].1, metric, slack_factor) {
                    report(&pair[1].0, "ordering", &v);
                }
            }
        }
    };
    match name {
        "fig8" | "fig10" => {
            ordered(&[Metric::Recovery, Metric::Auth], &mut report);
            for (label, result) in series {
                for p in auth_vs_recovery_dominance(result, slack_factor).points {
                    if !p.holds {
                        failures.push(format!(
                            "{label}: auth {:.4} below recovery {:.4} at {}",
                            p.auth_p, p.recovery_p, p.value
                        ));
                    }
                }
            }
        }
        "fig11" => ordered(&[Metric::Recovery], &mut report),
        "fig12" => {
            let knees: Vec<f64> = series
                .iter()
                .map(|(_, r)| knee(r, 0.5).unwrap_or(f64::INFINITY))
                .collect();
            if knees.windows(2).any(|w| w[1] >= w[0]) {
                failures.push(format!("knees not strictly decreasing: {knees:?}"));
            }
        }
        _ => {}
    }
    failures
}

/// CSV text: a header and one line per grid point, six decimals, LF.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = format!(
        "{},recovery_p,auth_p,trials,ci_halfwidth\n",
        result.axis.column_name()
    );
    for p in &result.points {
        writeln!(
            out,
            "{:.6},{:.6},{:.6},{},{:.6}",
            p.value,
            p.recovery_p,
            p.auth_p,
            p.trials,
            p.ci_half_width()
        )
        .expect("writing to a String");
    }
    out
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(result)).map_err(|e| Error::io(path, e))
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["fig8", "fig9", "fig10", "fig11", "fig12"];

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step).round() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

/// Labelled sweep configurations for a named preset.
///
/// * `fig8`, `fig10`: SNR 0..=70 dB, 2% sparsity, no loss, N = 1, 2, 4.
///   The two share configurations; fig8 reads `recovery_p`, fig10 `auth_p`.
/// * `fig9`: sparsity 1%..=15%, noiseless lossless link, N = 4.
/// * `fig11`: loss 0..=0.9, SNR 40 dB, 2% sparsity, N = 1, 2, 4.
/// * `fig12`: loss 0..=0.9, SNR 40 dB, N = 4, sparsity 2%, 5%, 8%.
pub fn preset(name: &str) -> Result<Vec<(String, ExperimentConfig)>> {
    let base = ExperimentConfig::default();
    let snr = ExperimentConfig {
        axis: SweepAxis::Snr,
        grid: grid(0.0, 70.0, 5.0),
        ..base.clone()
    };
    let loss = ExperimentConfig {
        axis: SweepAxis::Loss,
        grid: grid(0.0, 0.9, 0.05),
        snr_db: 40.0,
        ..base.clone()
    };
    let per_channel = |cfg: &ExperimentConfig| {
        [1usize, 2, 4]
            .iter()
            .map(|&n| {
                (
                    format!("n{n}"),
                    ExperimentConfig {
                        n_channels: n,
                        ..cfg.clone()
                    },
                )
            })
            .collect::<Vec<_>>()
    };
    match name {
        "fig8" | "fig10" => Ok(per_channel(&snr)),
        "fig9" => Ok(vec![(
            "n4".into(),
            ExperimentConfig {
                axis: SweepAxis::Sparsity,
                grid: grid(0.01, 0.15, 0.01),
                snr_db: f64::INFINITY,
                ..base
            },
        )]),
        "fig11" => Ok(per_channel(&loss)),
        "fig12" => Ok([0.02, 0.05, 0.08]
            .iter()
            .map(|&s| {
                (
                    format!("s{:02}", (s * 100.0f64).round() as u32),
                    ExperimentConfig {
                        sparsity_ratio: s,
                        ..loss.clone()
                    },
                )
            })
            .collect()),
        other => Err(Error::InvalidConfig(format!(
            "unknown preset {other:?}; expected one of {PRESETS:?}"
        ))),
    }
}
