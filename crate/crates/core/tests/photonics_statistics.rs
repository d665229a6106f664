use std::f64::consts::{FRAC_PI_2, PI};

use qbc_core::photonics::{
    apply_channel_error, detect, receive_time_bin, sample_photon_number, transmit, umzi_detect,
    ChannelModel, UmziOutcome,
};
use qbc_core::qstate::{overlap_prob, state_of, MeasBasis, StateLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 100_000;

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Poisson pmf by direct summation; independent of the sampler.
fn poisson_pmf(mu: f64, k: u32) -> f64 {
    let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (-mu + k as f64 * mu.ln() - log_fact).exp()
}

#[test]
fn weak_pulse_photon_statistics() {
    let mu = 0.2;
    let p0 = poisson_pmf(mu, 0);
    let p1 = poisson_pmf(mu, 1);
    let p_nonempty = 1.0 - p0;
    let p_pair_given_nonempty = (1.0 - p0 - p1) / p_nonempty;
    assert!((p_nonempty - 0.18127).abs() < 1e-5);
    assert!((p_pair_given_nonempty - 0.09667).abs() < 1e-5);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let counts: Vec<u32> = (0..N).map(|_| sample_photon_number(mu, &mut rng)).collect();
    let nonempty = counts.iter().filter(|&&n| n >= 1).count();
    let pairs = counts.iter().filter(|&&n| n >= 2).count();
    let f1 = nonempty as f64 / N as f64;
    assert!((f1 - p_nonempty).abs() < 4.0 * sigma(p_nonempty, N), "{f1}");
    let f2 = pairs as f64 / nonempty as f64;
    assert!((f2 - p_pair_given_nonempty).abs() < 4.0 * sigma(p_pair_given_nonempty, nonempty), "{f2}");
    let mean = counts.iter().map(|&n| n as f64).sum::<f64>() / N as f64;
    assert!((mean - mu).abs() < 4.0 * (mu / N as f64).sqrt());
}

#[test]
fn thinning_preserves_poisson() {
    let (mu, eta) = (1.5, 0.4);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let thinned: Vec<f64> =
        (0..N).map(|_| transmit(sample_photon_number(mu, &mut rng), eta, &mut rng) as f64).collect();
    let mean = thinned.iter().sum::<f64>() / N as f64;
    let var = thinned.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (N - 1) as f64;
    let lambda = eta * mu;
    // mean ± 4σ; sample variance of a Poisson has sd ≈ sqrt((λ + 2λ²)/N)
    assert!((mean - lambda).abs() < 4.0 * (lambda / N as f64).sqrt(), "mean {mean}");
    assert!((var - lambda).abs() < 4.0 * ((lambda + 2.0 * lambda * lambda) / N as f64).sqrt(), "var {var}");
    let p0 = thinned.iter().filter(|&&x| x == 0.0).count() as f64 / N as f64;
    assert!((p0 - (-lambda).exp()).abs() < 4.0 * sigma((-lambda).exp(), N));
}

#[test]
fn channel_error_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let flips = (0..N)
        .filter(|_| apply_channel_error(StateLabel::L, 0.1, &mut rng).unwrap() == StateLabel::R)
        .count();
    assert!((flips as f64 / N as f64 - 0.1).abs() < 0.004);
}

fn umzi_freqs(phase_bob: f64, phase_alice: f64, v: f64, seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0usize; 3];
    for _ in 0..N {
        let idx = match umzi_detect(phase_bob, phase_alice, v, &mut rng) {
            UmziOutcome::Detector0 => 0,
            UmziOutcome::Detector1 => 1,
            UmziOutcome::SidePeak => 2,
        };
        counts[idx] += 1;
    }
    counts.map(|c| c as f64 / N as f64)
}

#[test]
fn umzi_examples() {
    let [d0, d1, side] = umzi_freqs(0.0, 0.0, 1.0, 24);
    assert_eq!(d1, 0.0);
    assert!((d0 - 0.5).abs() < 4.0 * sigma(0.5, N));
    assert!((side - 0.5).abs() < 4.0 * sigma(0.5, N));

    let [d0, d1, side] = umzi_freqs(FRAC_PI_2, 0.0, 1.0, 25);
    assert!((d0 - 0.25).abs() < 4.0 * sigma(0.25, N));
    assert!((d1 - 0.25).abs() < 4.0 * sigma(0.25, N));
    assert!((side - 0.5).abs() < 4.0 * sigma(0.5, N));

    let [d0, d1, _] = umzi_freqs(0.0, 0.0, 0.0, 26);
    assert!((d0 - 0.25).abs() < 4.0 * sigma(0.25, N));
    assert!((d1 - 0.25).abs() < 4.0 * sigma(0.25, N));
}

#[test]
fn side_peak_independent_of_phase_and_visibility() {
    let mut seed = 30;
    for (pb, pa) in [(0.0, 0.0), (PI, FRAC_PI_2), (3.0 * FRAC_PI_2, 0.0), (1.234, 2.5)] {
        for v in [0.0, 0.3, 1.0] {
            let [_, _, side] = umzi_freqs(pb, pa, v, seed);
            seed += 1;
            assert!((side - 0.5).abs() < 4.0 * sigma(0.5, N), "{pb} {pa} {v}: {side}");
        }
    }
}

#[test]
fn central_window_reproduces_born_rule() {
    let channel = ChannelModel::ideal();
    let mut seed = 50;
    for label in StateLabel::BB84 {
        for basis in MeasBasis::COMMITMENT {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            seed += 1;
            let photons = [state_of(label)];
            let first = basis.labels()[0];
            let mut central = 0usize;
            let mut hits = 0usize;
            for _ in 0..N {
                if let Some(outcome) = receive_time_bin(&photons, basis, &channel, &mut rng) {
                    central += 1;
                    hits += usize::from(outcome == first);
                }
            }
            let p = overlap_prob(&state_of(label), &state_of(first)).unwrap();
            let freq = hits as f64 / central as f64;
            assert!((freq - p).abs() <= 4.0 * sigma(p, central) + 1e-12, "{label:?} {basis:?}: {freq} vs {p}");
            assert!((central as f64 / N as f64 - 0.5).abs() < 4.0 * sigma(0.5, N));
        }
    }
}

#[test]
fn detector_efficiency_frequency() {
    const M: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let clicks = (0..M).filter(|_| detect(1, 0.5, 0.0, &mut rng)).count();
    assert!((clicks as f64 / M as f64 - 0.5).abs() < 0.02);
}

#[test]
fn dark_counts_click_empty_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let channel = ChannelModel { dark_count_prob: 0.3, ..ChannelModel::ideal() };
    let clicks = (0..N)
        .filter(|_| receive_time_bin(&[], MeasBasis::XY, &channel, &mut rng).is_some())
        .count();
    assert!((clicks as f64 / N as f64 - 0.3).abs() < 4.0 * sigma(0.3, N));
}
