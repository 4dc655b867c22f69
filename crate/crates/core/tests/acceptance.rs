//! End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use csauth_core::cs_core::{
    exhaustive_l0, generate_sparse_signal, measure, omp_recover, rmse, SparseBasis,
};
use csauth_core::experiments::{
    knee, preset, preset_property_failures, sweep, wilson_half_width, ExperimentConfig, SweepResult,
};
use csauth_core::key_schedule::{gaussian_chi_square, synthesize_matrix, ChannelGains};
use csauth_core::phy_channel::rayleigh_sample;
use csauth_core::tagcrypt::{
    authenticate, embed, extract_tag, split, tag_index, tag_sequence, AuthThresholds,
    ReceivedMessage,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Trials per grid point for the curve-shape criteria.
const CURVE_TRIALS: usize = 100;
/// Curve comparisons allow this many Wilson half-widths.
const SLACK: f64 = 2.0;

type Check = fn() -> Verdict;

struct Verdict {
    pass: bool,
    detail: String,
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed < limit
}

fn single_point(cfg: ExperimentConfig) -> csauth_core::experiments::SweepPoint {
    sweep(&cfg).expect("valid config").points.remove(0)
}

fn lossless_identity() -> Verdict {
    let start = Instant::now();
    let p = single_point(ExperimentConfig {
        snr_db: f64::INFINITY,
        loss_ratio: 0.0,
        measurement_noise: 0.0,
        trials: 100,
        ..ExperimentConfig::default()
    });
    let elapsed = start.elapsed();
    Verdict {
        pass: p.recovered == 100
            && p.authenticated == 100
            && within(Duration::from_secs(60), elapsed),
        detail: format!(
            "lossless chain: {}/100 recovered, {}/100 authenticated in {:.1?} (limit 60 s)",
            p.recovered, p.authenticated, elapsed
        ),
    }
}

fn loss_robustness() -> Verdict {
    let start = Instant::now();
    let p = single_point(ExperimentConfig {
        sparsity_ratio: 0.02,
        n_channels: 4,
        snr_db: 40.0,
        loss_ratio: 0.4,
        trials: 200,
        ..ExperimentConfig::default()
    });
    let elapsed = start.elapsed();
    let hw = wilson_half_width(p.recovered, p.trials);
    Verdict {
        pass: p.recovery_p + hw >= 0.95 && within(Duration::from_secs(600), elapsed),
        detail: format!(
            "40% loss, 2% sparsity, N=4, 40 dB: recovery {:.3} +/- {:.3} over 200 trials (need >= 0.95) in {:.1?}",
            p.recovery_p, hw, elapsed
        ),
    }
}

fn run_preset(name: &str) -> Vec<(String, SweepResult)> {
    preset(name)
        .expect("known preset")
        .into_iter()
        .map(|(label, cfg)| {
            let cfg = ExperimentConfig {
                trials: CURVE_TRIALS,
                ..cfg
            };
            (label, sweep(&cfg).expect("valid preset"))
        })
        .collect()
}

fn knee_ordering() -> Verdict {
    let series = run_preset("fig12");
    let knees: Vec<Option<f64>> = series.iter().map(|(_, r)| knee(r, 0.5)).collect();
    let strict = knees.windows(2).all(|w| {
        matches!((w[0], w[1]), (Some(a), Some(b)) if b < a)
            || matches!((w[0], w[1]), (None, Some(_)))
    });
    Verdict {
        pass: strict,
        detail: format!(
            "loss-ratio knees (recovery < 0.5) for sparsity 2%, 5%, 8%: [{}], {CURVE_TRIALS} trials per point",
            knees
                .iter()
                .map(|k| k.map_or("none".to_string(), |v| format!("{v:.2}")))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn snr_curves() -> Verdict {
    let series = run_preset("fig8");
    let failures = preset_property_failures("fig8", &series, SLACK);
    let knees: Vec<String> = series
        .iter()
        .map(|(label, r)| {
            let first = r
                .points
                .iter()
                .find(|p| p.recovery_p >= 0.5)
                .map(|p| p.value);
            format!("{label}: {first:?} dB")
        })
        .collect();
    Verdict {
        pass: failures.is_empty(),
        detail: format!(
            "SNR curves N=1,2,4 monotone, ordered, auth >= recovery within {SLACK}x Wilson: {} violations; recovery reaches 0.5 at [{}]{}",
            failures.len(),
            knees.join(", "),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    }
}

fn omp_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e1);
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for _ in 0..500 {
        let k = rng.random_range(1..=2usize);
        let m = rng.random_range(2 * k + 2..=11);
        let n = rng.random_range(m + 1..=12);
        let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = generate_sparse_signal(n, k as f64 / n as f64, &mut rng).expect("valid ratio");
        let y = measure(&a, &x, 0.0, &mut rng).expect("shapes agree");
        let tol = 1e-10 * y.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        let omp = omp_recover(y.values(), &a, &SparseBasis::Identity, 2 * k, tol)
            .expect("valid instance");
        let l0 = exhaustive_l0(y.values(), &a, k, tol).expect("true support is feasible");
        let d = rmse(&omp.signal, &l0.signal).expect("same length");
        let covers = x.support().iter().all(|i| omp.support.contains(i));
        worst = worst.max(d);
        if !(d <= 1e-9 && covers) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: mismatches == 0 && within(Duration::from_secs(30), elapsed),
        detail: format!(
            "500 instances n<=12, K<=2, m>=2K+2: {mismatches} mismatches, worst RMSE {worst:.2e} (limit 1e-9) in {elapsed:.1?}"
        ),
    }
}

fn key_distribution() -> Verdict {
    let start = Instant::now();
    let mut deterministic = true;
    let mut closer = 0;
    for seed in 0..20u64 {
        let h = rayleigh_sample(1.0, 18, &mut ChaCha8Rng::seed_from_u64(6000 + seed))
            .expect("valid omega");
        let gains = ChannelGains::new(h).expect("valid gains");
        let six = synthesize_matrix(&gains, 256, 1024, 6).expect("valid shape");
        let again = synthesize_matrix(&gains, 256, 1024, 6).expect("valid shape");
        deterministic &= six
            .to_row_major()
            .iter()
            .zip(again.to_row_major())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        let one = synthesize_matrix(&gains, 256, 1024, 1).expect("valid shape");
        if gaussian_chi_square(&six.to_row_major(), 64)
            < gaussian_chi_square(&one.to_row_major(), 64)
        {
            closer += 1;
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: deterministic && closer >= 18 && within(Duration::from_secs(120), elapsed),
        detail: format!(
            "r=18: bit-deterministic {deterministic}; rounds=6 closer to Gaussian than rounds=1 for {closer}/20 seeds (need 18) in {elapsed:.1?}"
        ),
    }
}

fn eavesdropper() -> Verdict {
    let p = single_point(ExperimentConfig {
        eavesdropper: true,
        trials: 1000,
        ..ExperimentConfig::default()
    });
    Verdict {
        pass: p.auth_p <= 0.01 && p.recovery_p <= 0.01,
        detail: format!(
            "independent gains, default thresholds, 1000 trials: acceptance {:.3} ({}), perfect recovery {:.3} ({}), limit 0.010 each",
            p.auth_p, p.authenticated, p.recovery_p, p.recovered
        ),
    }
}

fn round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a9);
    let mut worst = 0.0f64;
    let mut broken = 0;
    for _ in 0..1000 {
        let h = rayleigh_sample(1.0, 18, &mut rng).expect("valid omega");
        let phi = synthesize_matrix(&ChannelGains::new(h).expect("valid gains"), 256, 1024, 6)
            .expect("valid shape");
        let x = generate_sparse_signal(1024, 0.02, &mut rng).expect("valid ratio");
        let y = measure(phi.as_matrix(), &x, 0.0, &mut rng).expect("shapes agree");
        let k = tag_index(&phi).expect("normalized");
        let t = tag_sequence(&phi, &k);
        let s = embed(y.values(), &k, &t).expect("data rows exist");
        let received = ReceivedMessage::complete(s.values.clone());
        let t_hat = extract_tag(&received, &k).expect("data rows exist");
        let parts = split(&received, &k).expect("lengths agree");
        // The mean removed at extraction is the mean added at embedding.
        let data_mean = |v: &[f64]| {
            (0..v.len())
                .filter(|&i| !k.is_tag(i))
                .map(|i| v[i])
                .sum::<f64>()
        };
        let same_mean = data_mean(&s.values).to_bits() == data_mean(y.values()).to_bits();
        let transparent = parts
            .data_rows
            .iter()
            .zip(&parts.data_values)
            .all(|(&i, v)| v.to_bits() == y.values()[i].to_bits());
        let mut ok = same_mean && transparent && t_hat.entries().len() == t.len();
        for &(row, value) in t.entries() {
            let d = (t_hat.value_at(row).unwrap_or(f64::NAN) - value).abs();
            worst = worst.max(d);
            ok &= d <= 1e-12;
        }
        ok &= authenticate(&t_hat, &t, AuthThresholds::default()).accepted;
        if !ok {
            broken += 1;
        }
    }
    Verdict {
        pass: broken == 0,
        detail: format!(
            "1000 lossless instances: {broken} broken; data bit-exact, worst |t_hat - t| {worst:.1e} (limit 1e-12)"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("lossless end-to-end identity", lossless_identity),
        ("data-loss robustness", loss_robustness),
        ("knee location ordering", knee_ordering),
        ("SNR threshold behavior", snr_curves),
        ("OMP oracle equivalence", omp_oracle),
        ("key determinism and distribution", key_distribution),
        ("eavesdropper rejection", eavesdropper),
        ("exact round-trip algebra", round_trip),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {status} {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
