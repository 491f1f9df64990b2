//! Acceptance suite. Run with `--nocapture` to see one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use hbcast::cli;
use hbcast::model::{derive_scheme_params, ChannelSpec, PowerSplit, SourceSpec};
use hbcast::regions::{self, compare_distortions, Verdict};
use hbcast::simulate::{
    cross_identity_residual, measure_effective_noise, run_hybrid, run_uncoded, SimConfig, SimMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 10_000;
const EXACT_REL: f64 = 1e-12;
const NEUTRAL_BAND: f64 = 1e-9;
const SIGMAS: f64 = 4.0;
const NOISE_REL: f64 = 0.01;
const NEAR_DEGENERATE: f64 = 1e-6;
const B_GAP: f64 = 1e-5;
// Desk-scale Monte Carlo: 1000 trials of blocklength 1000.
const TRIALS: usize = 1000;
const BLOCK: usize = 1000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let elapsed = t.elapsed();
    let in_time = elapsed <= budget;
    let ok = o.ok && in_time;
    println!(
        "{} [{id:>2}] {name}: {} ({:.2?}, budget {:?}{})",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        elapsed,
        budget,
        if in_time { "" } else { ", over budget" }
    );
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

struct Draw {
    source: SourceSpec,
    channel: ChannelSpec,
    split: PowerSplit,
}

fn draws(seed: u64, rho: impl Fn(&mut ChaCha8Rng) -> f64, alpha1: (f64, f64)) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DRAWS)
        .map(|_| {
            let sigma2 = rng.gen_range(0.05..20.0);
            let r = rho(&mut rng);
            let power = 10f64.powf(rng.gen_range(-2.0..2.0));
            let n1 = 10f64.powf(rng.gen_range(-2.0..1.0));
            let n2 = n1 * (1.0 + 10f64.powf(rng.gen_range(-3.0..1.0)));
            let a = rng.gen_range(alpha1.0..alpha1.1);
            Draw {
                source: SourceSpec::new(sigma2, r).unwrap(),
                channel: ChannelSpec::new(power, n1, n2).unwrap(),
                split: PowerSplit::new(a).unwrap(),
            }
        })
        .collect()
}

fn independent(rng: &mut ChaCha8Rng) -> f64 {
    let _ = rng;
    0.0
}

fn correlated(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(1e-3..0.999)
}

fn desk(rho: f64) -> (SourceSpec, ChannelSpec) {
    (
        SourceSpec::new(1.0, rho).unwrap(),
        ChannelSpec::new(1.0, 1.0, 2.0).unwrap(),
    )
}

fn half() -> PowerSplit {
    PowerSplit::new(0.5).unwrap()
}

fn hybrid_optimality() -> Outcome {
    let mut worst = 0.0f64;
    for d in draws(1, independent, (0.0, 1.0)) {
        let h = regions::hybrid_independent_point(&d.source, &d.channel, d.split).unwrap();
        let o = regions::outer_bound_point(&d.source, &d.channel, d.split);
        worst = worst.max(rel(h.d1, o.d1)).max(rel(h.d2, o.d2));
    }
    Outcome {
        ok: worst <= EXACT_REL,
        detail: format!(
            "max relative deviation {worst:.2e} over {DRAWS} draws (tol {EXACT_REL:.0e})"
        ),
    }
}

fn uncoded_suboptimal() -> Outcome {
    let mut violations = 0;
    for d in draws(2, independent, (0.01, 0.99)) {
        let u = regions::uncoded_point(&d.source, &d.channel, d.split).unwrap();
        let o = regions::outer_bound_point(&d.source, &d.channel, d.split);
        if u.d1 <= o.d1 {
            violations += 1;
        }
    }
    let mut endpoint = 0.0f64;
    for d in draws(3, independent, (0.0, 1.0)).iter().take(1000) {
        for a in [0.0, 1.0] {
            let split = PowerSplit::new(a).unwrap();
            let u = regions::uncoded_point(&d.source, &d.channel, split).unwrap();
            let o = regions::outer_bound_point(&d.source, &d.channel, split);
            endpoint = endpoint.max(rel(u.d1, o.d1)).max(rel(u.d2, o.d2));
        }
    }
    Outcome {
        ok: violations == 0 && endpoint <= EXACT_REL,
        detail: format!(
            "{violations} interior draws without strict excess; endpoint deviation {endpoint:.2e}"
        ),
    }
}

fn threshold_predicts_winner() -> Outcome {
    let mut mismatches = 0;
    let mut excluded = 0;
    for d in draws(4, correlated, (1e-3, 1.0)) {
        let thr = regions::snr_threshold(d.split);
        let snr = d.channel.snr1();
        let a = regions::separation_a_point(&d.source, &d.channel, d.split).d1;
        let h = regions::hybrid_correlated_point(&d.source, &d.channel, d.split).d1;
        if rel(thr, snr) <= NEUTRAL_BAND || compare_distortions(a, h) == Verdict::Tie {
            excluded += 1;
            continue;
        }
        // Hybrid wins (A worse) exactly when the SNR sits below the threshold.
        if (a > h) != (snr < thr) {
            mismatches += 1;
        }
    }
    Outcome {
        ok: mismatches == 0,
        detail: format!("{mismatches} sign mismatches, {excluded} draws in the neutral band"),
    }
}

fn scheme_b_dominance() -> Outcome {
    let mut violations = 0;
    let mut worst_gap = 0.0f64;
    for d in draws(5, correlated, (0.0, 1.0)) {
        let h = regions::hybrid_correlated_point(&d.source, &d.channel, d.split).d1;
        let b = regions::separation_b_point(&d.source, &d.channel, d.split).d1;
        // Allow one rounding step on equal values.
        if b < h * (1.0 - f64::EPSILON) {
            violations += 1;
        }
        let near = ChannelSpec::new(
            d.channel.power(),
            d.channel.n1(),
            d.channel.n1() * (1.0 + NEAR_DEGENERATE),
        )
        .unwrap();
        let h = regions::hybrid_correlated_point(&d.source, &near, d.split).d1;
        let b = regions::separation_b_point(&d.source, &near, d.split).d1;
        worst_gap = worst_gap.max((b - h) / d.source.sigma2());
    }
    Outcome {
        ok: violations == 0 && worst_gap < B_GAP,
        detail: format!(
            "{violations} dominance violations; max gap/sigma2 at N2 = N1(1+1e-6): {worst_gap:.2e}"
        ),
    }
}

fn band(name: &str, est: &hbcast::simulate::Estimate, target: f64) -> (bool, String) {
    (
        est.within(target, SIGMAS),
        format!(
            "{name} {:.5} vs {target:.5} (z = {:+.2})",
            est.mean,
            est.z_score(target)
        ),
    )
}

fn mc_uncoded() -> Outcome {
    let (s, c) = desk(0.0);
    let r = run_uncoded(
        &s,
        &c,
        half(),
        &SimConfig::new(BLOCK, TRIALS, 5, SimMode::Uncoded),
    )
    .unwrap();
    let (ok1, t1) = band("D1", &r.empirical_d1, 0.75);
    let (ok2, t2) = band("D2", &r.empirical_d2, 5.0 / 6.0);
    Outcome {
        ok: ok1 && ok2 && r.samples == 1_000_000,
        detail: format!("{t1}; {t2}"),
    }
}

fn mc_hybrid_independent() -> Outcome {
    let (s, c) = desk(0.0);
    let r = run_hybrid(
        &s,
        &c,
        half(),
        &SimConfig::new(BLOCK, TRIALS, 6, SimMode::Hybrid),
    )
    .unwrap();
    let (ok1, t1) = band("D1", &r.empirical_d1, 2.0 / 3.0);
    let (ok2, t2) = band("D2", &r.empirical_d2, 5.0 / 6.0);
    let (ok3, t3) = band("E[X^2]", &r.empirical_power, 1.0);
    Outcome {
        ok: ok1 && ok2 && ok3,
        detail: format!("{t1}; {t2}; {t3}"),
    }
}

fn mc_hybrid_correlated() -> Outcome {
    let (s, c) = desk(0.5);
    let split = PowerSplit::new(0.2).unwrap();
    let r = run_hybrid(
        &s,
        &c,
        split,
        &SimConfig::new(BLOCK, TRIALS, 7, SimMode::Hybrid),
    )
    .unwrap();
    let (ok1, t1) = band("D1", &r.empirical_d1, 0.775);
    let (ok2, t2) = band("D2", &r.empirical_d2, 11.0 / 15.0);
    Outcome {
        ok: ok1 && ok2,
        detail: format!("{t1}; {t2}"),
    }
}

fn effective_noise() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (rho, a) in [(0.0, 0.5), (0.5, 0.2)] {
        let (s, c) = desk(rho);
        let split = PowerSplit::new(a).unwrap();
        let cfg = SimConfig::new(BLOCK, TRIALS, 8, SimMode::Hybrid);
        let st = measure_effective_noise(&s, &c, split, &cfg).unwrap();
        let target = s.sigma2() * (1.0 - rho * rho) * c.n1() / (a * c.power());
        let dev = rel(st.w11_variance.mean, target);
        let cross_ok = st.cross_correlation.within(0.0, SIGMAS);
        ok &= dev <= NOISE_REL && cross_ok;
        parts.push(format!(
            "rho={rho}: Var W11 {:.4} vs {target:.4} ({:.2}%), E[W11 W12] z = {:+.2}",
            st.w11_variance.mean,
            100.0 * dev,
            st.cross_correlation.z_score(0.0)
        ));
    }
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in draws(9, correlated, (1e-3, 1.0)) {
        let p = derive_scheme_params(&d.source, &d.channel, d.split, rng.gen()).unwrap();
        let scale = p.alpha * p.p_prime;
        worst = worst.max(cross_identity_residual(&p, &d.channel).abs() / scale);
    }
    ok &= worst <= EXACT_REL;
    parts.push(format!("identity residual {worst:.2e} relative"));
    Outcome {
        ok,
        detail: parts.join("; "),
    }
}

fn physical_lattice() -> Outcome {
    let (s, c) = desk(0.0);
    let analytic = 2.0 / 3.0;
    let mut rates = Vec::new();
    let mut gaps = Vec::new();
    for kappa in [1.0, 2.0, 4.0] {
        let cfg = SimConfig::new(BLOCK, TRIALS, 7, SimMode::Hybrid).physical(kappa);
        let r = run_hybrid(&s, &c, half(), &cfg).unwrap();
        rates.push(r.overload_rate);
        gaps.push((r.empirical_d1.mean - analytic).abs());
    }
    let ok = rates[2] < rates[0] && gaps[1] < gaps[0] && gaps[2] < gaps[1];
    Outcome {
        ok,
        detail: format!(
            "overload {:.4}/{:.4}/{:.4}, |D1 gap| {:.4}/{:.4}/{:.4} at kappa 1/2/4",
            rates[0], rates[1], rates[2], gaps[0], gaps[1], gaps[2]
        ),
    }
}

fn invoke(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let base = [
        "hbcast",
        "simulate",
        "--alpha1",
        "0.3",
        "--rho",
        "0.4",
        "--lattice",
        "physical",
        "--inflation",
        "2",
        "--trials",
        "64",
        "--blocklength",
        "500",
        "--seed",
        "11",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "2", "5", "0"] {
        for format in ["json", "csv"] {
            let mut args = base.to_vec();
            args.extend_from_slice(&["--threads", threads, "--format", format]);
            outputs.push((format, invoke(&args)));
        }
    }
    let mut ok = outputs
        .iter()
        .all(|(_, (code, out))| *code == 0 && !out.is_empty());
    for format in ["json", "csv"] {
        let runs: Vec<_> = outputs.iter().filter(|(f, _)| *f == format).collect();
        ok &= runs.windows(2).all(|w| w[0].1 .1 == w[1].1 .1);
    }
    let uncoded = [
        "hbcast", "simulate", "--mode", "uncoded", "--alpha1", "0.6", "--trials", "50",
    ];
    ok &= invoke(&uncoded) == invoke(&[&uncoded[..], &["--threads", "3"]].concat());
    Outcome {
        ok,
        detail: format!(
            "{} runs across 1/2/5/auto threads byte-identical",
            outputs.len() + 2
        ),
    }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        check(
            1,
            "hybrid meets the outer bound at rho = 0",
            s(1),
            hybrid_optimality,
        ),
        check(
            2,
            "uncoded is strictly sub-optimal in the interior",
            s(1),
            uncoded_suboptimal,
        ),
        check(
            3,
            "SNR threshold predicts hybrid vs separation A",
            s(1),
            threshold_predicts_winner,
        ),
        check(
            4,
            "separation B never beats hybrid",
            s(1),
            scheme_b_dominance,
        ),
        check(
            5,
            "Monte Carlo uncoded matches closed form",
            s(5),
            mc_uncoded,
        ),
        check(
            6,
            "Monte Carlo hybrid (independent) matches closed form",
            s(10),
            mc_hybrid_independent,
        ),
        check(
            7,
            "Monte Carlo hybrid (correlated) matches closed form",
            s(10),
            mc_hybrid_correlated,
        ),
        check(8, "effective-noise identities", s(5), effective_noise),
        check(
            9,
            "physical lattice improves with inflation",
            s(30),
            physical_lattice,
        ),
        check(10, "simulation output is deterministic", s(30), determinism),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}
