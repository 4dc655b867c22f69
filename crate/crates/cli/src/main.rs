use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use csauth_core::cs_core::{measure, omp_recover, SparseBasis, SparseSignal};
use csauth_core::experiments::{
    self, preset_property_failures, stream_rng, sweep, Stream, SweepResult,
};
use csauth_core::format::{self, MatrixFormat};
use csauth_core::key_schedule::{order_for_shape, primitive_polynomial, synthesize_matrix_with};
use csauth_core::phy_channel::{outlier_filter, transmit_values};
use csauth_core::tagcrypt::{
    authenticate, embed, extract_tag, split, tag_index, tag_sequence, ReceivedMessage,
};
use csauth_core::{
    AuthThresholds, ChannelConfig, ChannelGains, ExperimentConfig, MeasurementMatrix, ShiftStrategy,
};

const EXIT_REJECTED: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "csauth",
    version,
    about = "Compressed-sensing encryption with embedded authentication tags"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the measurement matrix from channel gains.
    Keygen {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Binary)]
        format: Format,
    },
    /// Compress a signal and embed the tags.
    Encode {
        #[command(flatten)]
        key: KeyArgs,
        /// Signal values, one per line.
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Binary)]
        format: Format,
    },
    /// Send a message through the simulated fading link.
    Transmit {
        #[arg(long)]
        message: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Presence mask output, one 0/1 per line.
        #[arg(long)]
        mask_out: PathBuf,
        #[arg(long, default_value_t = 4)]
        channels: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
        snr_db: f64,
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        #[arg(long, default_value_t = 16)]
        quant_bits: u32,
        #[arg(long, default_value_t = 5.0)]
        filter_c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Authenticate a received message and recover the signal. Exits with 2
    /// when authentication fails.
    Decode {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long)]
        message: PathBuf,
        /// Presence mask, one 0/1 per line. Everything is present if omitted.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Write the recovered signal here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Known sparsity; OMP then selects up to twice this many columns.
        #[arg(long)]
        sparsity: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        tau1: f64,
        #[arg(long, default_value_t = 0.6)]
        tau2: f64,
    },
    /// Run a Monte Carlo sweep and write CSV. With --check, exits with 3 when
    /// a shape property fails.
    Simulate {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(experiments::PRESETS))]
        preset: Option<String>,
        /// Output CSV. Presets with several series write `<stem>-<series>.csv`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args)]
struct KeyArgs {
    /// Channel gains, one per line.
    #[arg(long)]
    gains: PathBuf,
    #[arg(long, default_value_t = 256)]
    rows: usize,
    #[arg(long, default_value_t = 1024)]
    cols: usize,
    #[arg(long, default_value_t = 6)]
    rounds: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Rotate)]
    strategy: Strategy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Rotate,
    Flip,
    FlipSum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Binary,
    Text,
}

impl From<Format> for MatrixFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Binary => MatrixFormat::Binary,
            Format::Text => MatrixFormat::Text,
        }
    }
}

impl KeyArgs {
    fn matrix(&self) -> anyhow::Result<MeasurementMatrix> {
        let gains = ChannelGains::new(format::read_values(&self.gains)?)
            .with_context(|| format!("reading gains from {}", self.gains.display()))?;
        let strategy = match self.strategy {
            Strategy::Rotate => ShiftStrategy::Rotate,
            Strategy::Flip => ShiftStrategy::Flip,
            Strategy::FlipSum => ShiftStrategy::FlipSum,
        };
        Ok(synthesize_matrix_with(
            &gains,
            self.rows,
            self.cols,
            self.rounds,
            strategy,
        )?)
    }
}

fn keygen(key: &KeyArgs, out: &Path, fmt: Format) -> anyhow::Result<()> {
    let phi = key.matrix()?;
    format::write_matrix(out, &phi, fmt.into())?;
    let order = order_for_shape(key.rows, key.cols)?;
    println!(
        "matrix {}x{} order {} polynomial {} tags {}",
        phi.rows(),
        phi.cols(),
        order,
        primitive_polynomial(order)?.to_polynomial_string(),
        tag_index(&phi)?.tag_count()
    );
    Ok(())
}

fn encode(key: &KeyArgs, signal: &Path, out: &Path, fmt: Format) -> anyhow::Result<()> {
    let phi = key.matrix()?;
    let x = SparseSignal::new(format::read_values(signal)?);
    // Noise-free measurement; the generator is never drawn from.
    let y = measure(
        phi.as_matrix(),
        &x,
        0.0,
        &mut stream_rng(0, Stream::MeasurementNoise),
    )?;
    let k = tag_index(&phi)?;
    let message = embed(y.values(), &k, &tag_sequence(&phi, &k))?;
    format::write_vector(out, &message.values, fmt.into())?;
    println!(
        "message {} values, {} tags, m/n {:.3}, {} bits on air at 16-bit quantization",
        message.values.len(),
        k.tag_count(),
        phi.rows() as f64 / phi.cols() as f64,
        16 * message.values.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn transmit(
    message: &Path,
    out: &Path,
    mask_out: &Path,
    cfg: &ChannelConfig,
    quant_bits: u32,
    filter_c: f64,
    seed: u64,
) -> anyhow::Result<()> {
    let values = format::read_vector(message)?;
    let link = transmit_values(
        &values,
        cfg,
        quant_bits,
        &mut stream_rng(seed, Stream::Channel),
    )?;
    let present = outlier_filter(&link.values, &link.present, filter_c);
    format::write_vector(out, &link.values, MatrixFormat::Binary)?;
    format::write_mask(mask_out, &present)?;
    println!(
        "symbol errors {} erased {} filtered {}",
        link.symbol_errors,
        link.present.iter().filter(|&&p| !p).count(),
        link.present
            .iter()
            .zip(&present)
            .filter(|(a, b)| **a && !**b)
            .count()
    );
    Ok(())
}

fn decode(
    key: &KeyArgs,
    message: &Path,
    mask: Option<&Path>,
    out: Option<&Path>,
    sparsity: Option<usize>,
    thresholds: AuthThresholds,
) -> anyhow::Result<bool> {
    let phi = key.matrix()?;
    let values = format::read_vector(message)?;
    let present = match mask {
        Some(path) => format::read_mask(path)?,
        None => vec![true; values.len()],
    };
    let received = ReceivedMessage::new(values, present)?;
    let k = tag_index(&phi)?;
    let decision = authenticate(
        &extract_tag(&received, &k)?,
        &tag_sequence(&phi, &k),
        thresholds,
    );
    let parts = split(&received, &k)?;
    let rows = parts.data_rows.len();
    if rows == 0 {
        bail!("no data values survived");
    }
    let cap = sparsity.map_or(phi.rows() / 4, |s| 2 * s).clamp(1, rows);
    let y_norm = parts.data_values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let report = omp_recover(
        &parts.data_values,
        &phi.select_rows(&parts.data_rows),
        &SparseBasis::Identity,
        cap,
        1e-9 * y_norm,
    )?;
    println!(
        "{} matched {}/{} tau1 {} tau2 {} residual {:.3e}",
        if decision.accepted {
            "accept"
        } else {
            "reject"
        },
        decision.matched,
        decision.compared,
        thresholds.tau1,
        thresholds.tau2,
        report.residual_norm
    );
    match out {
        Some(path) => format::write_values(path, &report.signal)?,
        None => {
            for v in &report.signal {
                println!("{v}");
            }
        }
    }
    Ok(decision.accepted)
}

fn series_path(out: &Path, label: &str, count: usize) -> PathBuf {
    if count == 1 {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}-{label}.{ext}"))
}

fn simulate(
    config: Option<&Path>,
    preset: Option<&str>,
    out: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    check: bool,
) -> anyhow::Result<bool> {
    let (name, mut configs) = match (config, preset) {
        (Some(path), _) => (
            "config",
            vec![("sweep".to_string(), ExperimentConfig::from_file(path)?)],
        ),
        (None, Some(name)) => (name, experiments::preset(name)?),
        (None, None) => bail!("either --config or --preset is required"),
    };
    let mut results: Vec<(String, SweepResult)> = Vec::new();
    let count = configs.len();
    for (label, cfg) in &mut configs {
        if let Some(t) = trials {
            cfg.trials = t;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        let result = sweep(cfg)?;
        let path = series_path(out, label, count);
        experiments::write_csv(&result, &path)?;
        let failed: usize = result.points.iter().map(|p| p.failures).sum();
        println!(
            "wrote {} ({} points, {} failed trials)",
            path.display(),
            result.points.len(),
            failed
        );
        results.push((label.clone(), result));
    }
    if !check {
        return Ok(true);
    }
    let failures = preset_property_failures(name, &results, 2.0);
    for f in &failures {
        eprintln!("check failed: {f}");
    }
    if failures.is_empty() {
        println!("all properties hold");
    }
    Ok(failures.is_empty())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Keygen { key, out, format } => keygen(&key, &out, format)?,
        Command::Encode {
            key,
            signal,
            out,
            format,
        } => encode(&key, &signal, &out, format)?,
        Command::Transmit {
            message,
            out,
            mask_out,
            channels,
            omega,
            snr_db,
            loss,
            quant_bits,
            filter_c,
            seed,
        } => {
            let cfg = ChannelConfig {
                n_channels: channels,
                omega,
                snr_db,
                loss_ratio: loss,
            };
            transmit(&message, &out, &mask_out, &cfg, quant_bits, filter_c, seed)?
        }
        Command::Decode {
            key,
            message,
            mask,
            out,
            sparsity,
            tau1,
            tau2,
        } => {
            let accepted = decode(
                &key,
                &message,
                mask.as_deref(),
                out.as_deref(),
                sparsity,
                AuthThresholds { tau1, tau2 },
            )?;
            if !accepted {
                return Ok(ExitCode::from(EXIT_REJECTED));
            }
        }
        Command::Simulate {
            config,
            preset,
            out,
            trials,
            seed,
            check,
        } => {
            if !simulate(
                config.as_deref(),
                preset.as_deref(),
                &out,
                trials,
                seed,
                check,
            )? {
                return Ok(ExitCode::from(EXIT_CHECK_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
