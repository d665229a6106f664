//! Acceptance suite. Every criterion runs at its pinned tolerance with a fixed
//! seed and prints one PASS/FAIL line; the process exits non-zero if any
//! criterion fails.

use std::f64::consts::FRAC_PI_8;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbc_core::adversary::{breidbart_claim, Strategy};
use qbc_core::protocol::{RejectReason, Verdict};
use qbc_core::qstate::{overlap_prob, state_of, MeasBasis, StateLabel};
use qbc_core::session::ProtocolMode;
use qbc_sim::fig2::fig2;
use qbc_sim::hiding::hiding_test;
use qbc_sim::runner::run_batch;
use qbc_sim::sweep::sweep;
use qbc_sim::transcript_io::transcript_bytes;
use qbc_sim::{run_monte_carlo, SimConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sin2() -> f64 {
    FRAC_PI_8.sin().powi(2)
}

/// Breidbart-only cheat on an ideal channel, for each opened bit.
fn breidbart_error_floor() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for bit in [0u8, 1] {
        let mut config = SimConfig::default();
        config.seed = 0xb1d;
        config.source.session_duration = 120_000.0;
        config.trials = 24;
        config.adversary.strategy = Strategy::Breidbart;
        config.commit_bit = Some(bit);
        let stats = run_monte_carlo(&config).map_err(|e| e.to_string())?;
        let n = stats.counts.n_matching_basis;
        let q = stats.matching_qber;
        ok &= n >= 100_000 && (0.1415..=0.1515).contains(&q);
        details.push(format!("bit {bit}: QBER {q:.5} over {n} matching pulses"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30);
    details.push(format!("{:.1}s", elapsed.as_secs_f64()));
    check(ok, details.join("; "))
}

/// Least-squares line through (p2, QBER) for forced pair fractions.
fn pair_fraction_line() -> Outcome {
    let start = Instant::now();
    let mut config = SimConfig::default();
    config.seed = 0xa12;
    // A brighter source supplies enough pairs to compose every forced p2.
    config.source.mean_photons_mu = 1.0;
    config.source.session_duration = 100_000.0;
    config.trials = 10;
    config.adversary.strategy = Strategy::Combined;
    config.commit_bit = Some(0);
    let p2s = [0.0, 0.25, 0.5, 0.75, 1.0];
    let results = sweep(&config, "adversary.forced_p2", &p2s).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = results.iter().map(|(_, s)| s.realized_p2).collect();
    let ys: Vec<f64> = results.iter().map(|(_, s)| s.matching_qber).collect();
    let min_n = results.iter().map(|(_, s)| s.counts.n_matching_basis).min().unwrap_or(0);
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let elapsed = start.elapsed();
    let ok = (slope + 0.1464).abs() <= 0.010
        && (intercept - 0.1464).abs() <= 0.005
        && min_n >= 100_000
        && elapsed < Duration::from_secs(180);
    let points: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("({x:.3}, {y:.4})")).collect();
    check(
        ok,
        format!(
            "slope {slope:.4}, intercept {intercept:.4}, points {}, min matching {min_n}, {:.1}s",
            points.join(" "),
            elapsed.as_secs_f64()
        ),
    )
}

fn honest_soundness() -> Outcome {
    let mut config = SimConfig::default();
    config.seed = 0x50d;
    config.source.session_duration = 100_000.0;
    config.trials = 12;
    config.channel.qubit_error_e = 0.01;
    let stats = run_monte_carlo(&config).map_err(|e| e.to_string())?;
    let c = stats.counts;
    let ok = c.n_announced >= 100_000
        && (stats.matching_qber - 0.010).abs() <= 0.003
        && (stats.out_of_basis_agreement - 0.5).abs() <= 0.01
        && stats.reports.iter().all(|r| r.verdict == Verdict::Accept);
    check(
        ok,
        format!(
            "{} announced, QBER {:.5}, out-of-basis {:.4}, accepted {}/{}",
            c.n_announced, stats.matching_qber, stats.out_of_basis_agreement, c.accepted, c.sessions
        ),
    )
}

fn exactness() -> Outcome {
    let mut worst_mub: f64 = 0.0;
    for s in [StateLabel::X, StateLabel::Y] {
        for t in [StateLabel::L, StateLabel::R] {
            let p = overlap_prob(&state_of(s), &state_of(t)).map_err(|e| e.to_string())?;
            worst_mub = worst_mub.max((p - 0.5).abs());
        }
    }
    let (s2, c2) = (sin2(), FRAC_PI_8.cos().powi(2));
    let mut worst_breidbart: f64 = 0.0;
    let mut combos = 0;
    for v in StateLabel::BREIDBART {
        for t in StateLabel::BB84 {
            let p = overlap_prob(&state_of(v), &state_of(t)).map_err(|e| e.to_string())?;
            worst_breidbart = worst_breidbart.max((p - s2).abs().min((p - c2).abs()));
            combos += 1;
        }
    }
    let ok = worst_mub < 1e-12 && worst_breidbart < 1e-12 && combos == 16;
    check(ok, format!("max MUB deviation {worst_mub:.1e}, max Breidbart deviation {worst_breidbart:.1e} over {combos} pairs"))
}

fn conditional_security() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for bit in [0u8, 1] {
        let mut config = SimConfig::default();
        config.seed = 0xde1a;
        config.source.session_duration = 20_000.0;
        config.trials = 4;
        config.adversary.strategy = Strategy::Delayed;
        config.adversary.qnd_success_q = 1.0;
        config.adversary.storage_fidelity_f = 1.0;
        config.commit_bit = Some(bit);
        let stats = run_monte_carlo(&config).map_err(|e| e.to_string())?;
        let all_accept = stats.reports.iter().all(|r| r.verdict == Verdict::Accept);
        ok &= stats.counts.n_matching_errors == 0 && stats.counts.n_matching_basis > 0 && all_accept;
        details.push(format!(
            "q=1,f=1 bit {bit}: {} errors / {} matching, accept {}",
            stats.counts.n_matching_errors, stats.counts.n_matching_basis, all_accept
        ));
    }
    let mut config = SimConfig::default();
    config.seed = 0xde1b;
    config.source.session_duration = 20_000.0;
    config.trials = 4;
    config.adversary.strategy = Strategy::Delayed;
    let stats = run_monte_carlo(&config).map_err(|e| e.to_string())?;
    let rate_rejects = stats.reports.iter().all(|r| r.verdict == Verdict::Reject(RejectReason::RateTooLow));
    ok &= stats.counts.n_announced == 0 && rate_rejects;
    details.push(format!("q=0: {} announced, all rejected on rate {}", stats.counts.n_announced, rate_rejects));
    check(ok, details.join("; "))
}

fn hiding() -> Outcome {
    let mut config = SimConfig::default();
    config.source.session_duration = 1_000.0;
    let mut passing = 0;
    for rep in 0..100u64 {
        config.seed = 0x41d0 + rep;
        let result = hiding_test(&config, 100).map_err(|e| e.to_string())?;
        passing += usize::from(result.p_value() > 0.01);
    }
    config.channel.basis_efficiency = [1.0, 0.5];
    let mut worst_leak_p: f64 = 0.0;
    for rep in 0..20u64 {
        config.seed = 0x41d0 + rep;
        let result = hiding_test(&config, 100).map_err(|e| e.to_string())?;
        worst_leak_p = worst_leak_p.max(result.p_value());
    }
    let ok = passing >= 95 && worst_leak_p < 0.001;
    check(
        ok,
        format!("equal efficiencies: p > 0.01 in {passing}/100; efficiencies (1.0, 0.5): max p {worst_leak_p:.2e} over 20 runs"),
    )
}

fn fig2_shape() -> Outcome {
    let mut config = SimConfig::fig2_preset();
    config.seed = 0xf162;
    let (_, summary) = fig2(&config).map_err(|e| e.to_string())?;
    let rows: Vec<String> = summary
        .rows
        .iter()
        .map(|r| format!("{:.2}/{:.2}", r.in_basis_rate, r.out_of_basis_rate))
        .collect();
    let ok = summary.rows.len() == 5
        && summary.in_basis_always_higher
        && (summary.pooled_out_of_basis_rate - 0.5).abs() <= 0.1;
    check(
        ok,
        format!(
            "in/out per session [{}], pooled out-of-basis {:.3}",
            rows.join(", "),
            summary.pooled_out_of_basis_rate
        ),
    )
}

fn determinism() -> Outcome {
    let mut configs = Vec::new();
    let base = {
        let mut c = SimConfig::default();
        c.seed = 0xd37;
        c.source.session_duration = 5_000.0;
        c.trials = 4;
        c
    };
    configs.push(base.clone());
    for strategy in [Strategy::Breidbart, Strategy::Combined, Strategy::Delayed, Strategy::PairSplit] {
        let mut c = base.clone();
        c.adversary.strategy = strategy;
        c.adversary.qnd_success_q = 0.7;
        configs.push(c);
    }
    let mut legacy = base.clone();
    legacy.protocol_mode = ProtocolMode::Legacy;
    legacy.bob_cheats = true;
    legacy.adversary.qnd_success_q = 0.5;
    configs.push(legacy);
    let mut fig = SimConfig::fig2_preset();
    fig.seed = 0xf162;
    configs.push(fig);

    for config in &configs {
        let (a, sa) = run_batch(config).map_err(|e| e.to_string())?;
        let (b, sb) = run_batch(config).map_err(|e| e.to_string())?;
        let same_bytes = a.iter().zip(&b).all(|(x, y)| transcript_bytes(&x.transcript) == transcript_bytes(&y.transcript));
        if !(same_bytes && a.len() == b.len() && sa.counts == sb.counts && sa.reports == sb.reports) {
            return Err(format!("divergence for {:?} / {:?}", config.protocol_mode, config.adversary.strategy));
        }
    }
    Ok(format!("{} configurations replayed byte-identically", configs.len()))
}

/// Exhaustive search over deterministic outcome→label maps, scored from
/// overlaps alone.
fn claim_mapping() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for basis in MeasBasis::COMMITMENT {
        let score = |map: &dyn Fn(StateLabel) -> StateLabel| -> f64 {
            let mut err = 0.0;
            for sent in basis.labels() {
                for meas in MeasBasis::BREIDBART {
                    for outcome in meas.labels() {
                        let p = overlap_prob(&state_of(sent), &state_of(outcome)).unwrap();
                        if map(outcome) != sent {
                            err += 0.25 * p;
                        }
                    }
                }
            }
            err
        };
        let mut best = f64::INFINITY;
        for code in 0u32..16 {
            let map = |o: StateLabel| {
                let idx = StateLabel::BREIDBART.iter().position(|&b| b == o).unwrap();
                basis.labels()[((code >> idx) & 1) as usize]
            };
            best = best.min(score(&map));
        }
        let implemented = score(&|o| breidbart_claim(o, basis));
        ok &= (implemented - best).abs() < 1e-12 && (best - sin2()).abs() < 1e-12;
        details.push(format!("{basis:?}: implemented {implemented:.15}, best {best:.15}"));
    }
    check(ok, details.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 Breidbart QBER in [0.1415, 0.1515]", breidbart_error_floor),
        ("2 pair-fraction line slope/intercept", pair_fraction_line),
        ("3 honest soundness at e = 0.01", honest_soundness),
        ("4 overlap exactness", exactness),
        ("5 delayed-measurement cheat", conditional_security),
        ("6 hiding chi-square", hiding),
        ("7 toy-experiment ordering", fig2_shape),
        ("8 determinism", determinism),
        ("9 claim-mapping brute force", claim_mapping),
    ];
    let mut failures = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] criterion {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
