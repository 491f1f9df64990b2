//! Monte Carlo simulation of the hybrid and uncoded transceivers.
//!
//! Each trial is one block of `blocklength` channel uses with a fresh dither.
//! Trial `i` draws from its own ChaCha stream `(seed, i)`, trials run on the
//! rayon pool, and per-trial moments are merged in trial order, so results
//! do not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{Dither, Lattice, LatticeError};
use crate::model::{
    derive_scheme_params, effective_noise_variance, ChannelSpec, DistortionPair, ModelError,
    PowerSplit, SchemeParams, SourceSpec,
};
use crate::regions::{self, RegionError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("uncoded branch has zero gain (gamma = 0); the S2 observation is undefined")]
    ZeroGamma,
    #[error("{0} simulation requires independent sources")]
    RequiresIndependent(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    Hybrid,
    Uncoded,
}

/// How Receiver 1 resolves the modulo reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeMode {
    /// Alias-free: the encoder's lattice offset is undone exactly, as if the
    /// lattice were good enough that `[S + W] mod L = S + W` always.
    Ideal,
    /// The true `mod L` chain on `s Z^n`, including overload errors.
    Physical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub blocklength: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: SimMode,
    pub lattice_mode: LatticeMode,
    /// Lattice second-moment inflation `kappa >= 1`; used in Physical mode
    /// only. Branch gains stay nominal, so transmit power grows with `kappa`.
    pub inflation: f64,
}

impl SimConfig {
    pub fn new(blocklength: usize, trials: usize, seed: u64, mode: SimMode) -> Self {
        Self {
            blocklength,
            trials,
            seed,
            mode,
            lattice_mode: LatticeMode::Ideal,
            inflation: 1.0,
        }
    }

    pub fn physical(mut self, inflation: f64) -> Self {
        self.lattice_mode = LatticeMode::Physical;
        self.inflation = inflation;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.blocklength == 0 {
            return Err(SimError::Config("blocklength must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(SimError::Config("trials must be >= 1".into()));
        }
        if !(self.inflation.is_finite() && self.inflation >= 1.0) {
            return Err(SimError::Config(format!(
                "inflation must be finite and >= 1 (got {})",
                self.inflation
            )));
        }
        Ok(())
    }

    /// Inflation actually applied to the lattice.
    pub fn effective_inflation(&self) -> f64 {
        match self.lattice_mode {
            LatticeMode::Ideal => 1.0,
            LatticeMode::Physical => self.inflation,
        }
    }

    pub fn samples(&self) -> u64 {
        self.blocklength as u64 * self.trials as u64
    }

    fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Streaming mean/variance (Welford) with an order-sensitive but
/// deterministic merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.count as f64 * w;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.count < 2 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        };
        Estimate {
            mean: self.mean,
            std_error: se,
        }
    }
}

/// A sample mean and its 1-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Infinite (serialized as `null`) when fewer than two samples exist.
    #[serde(with = "inf_as_null")]
    pub std_error: f64,
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl Estimate {
    /// Distance from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.std_error
    }
}

/// One block of source samples: `s1 = rho * s2 + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBlock {
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub v: Vec<f64>,
}

pub fn gen_sources<R: Rng + ?Sized>(source: &SourceSpec, n: usize, rng: &mut R) -> SourceBlock {
    let sd2 = source.sigma2().sqrt();
    let sdv = source.innovation_variance().sqrt();
    let rho = source.rho();
    let mut s1 = Vec::with_capacity(n);
    let mut s2 = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let s2i = sd2 * a;
        let vi = sdv * b;
        s2.push(s2i);
        v.push(vi);
        s1.push(rho * s2i + vi);
    }
    SourceBlock { s1, s2, v }
}

fn noise<R: Rng + ?Sized>(variance: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let sd = variance.sqrt();
    (0..n)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn check_len(lattice: &Lattice, v: &[f64]) -> Result<(), SimError> {
    if v.len() != lattice.dimension() {
        return Err(LatticeError::DimensionMismatch {
            expected: lattice.dimension(),
            got: v.len(),
        }
        .into());
    }
    Ok(())
}

/// Output of the hybrid encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    /// Lattice-coded branch `[payload + beta gamma s2 + u] mod L`.
    pub x1: Vec<f64>,
    /// Channel input `alpha x1 + gamma s2`.
    pub x: Vec<f64>,
    /// Lattice points removed by the encoder's modulo step. Only an ideal
    /// (genie) decoder looks at these.
    pub lattice_offset: Vec<f64>,
}

pub fn encode_hybrid(
    params: &SchemeParams,
    lattice: &Lattice,
    dither: &Dither,
    payload: &[f64],
    s2: &[f64],
) -> Result<Encoded, SimError> {
    check_len(lattice, payload)?;
    check_len(lattice, s2)?;
    check_len(lattice, dither.as_slice())?;
    let bg = params.beta * params.gamma;
    let n = payload.len();
    let mut x1 = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut lattice_offset = Vec::with_capacity(n);
    for ((&p, &s), &u) in payload.iter().zip(s2).zip(dither.as_slice()) {
        let pre = p + bg * s + u;
        let q = lattice.quantize_scalar(pre);
        let c = pre - q;
        x1.push(c);
        x.push(params.alpha * c + params.gamma * s);
        lattice_offset.push(q);
    }
    Ok(Encoded {
        x1,
        x,
        lattice_offset,
    })
}

/// How Receiver 1 resolves the modulo step.
#[derive(Debug, Clone, Copy)]
pub enum Decoding<'a> {
    Physical,
    /// Alias-free decoding given the encoder's lattice offsets.
    Ideal(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Receiver1Output {
    /// Noisy observation of the lattice payload, `payload + W11` when no overload occurs.
    pub r11: Vec<f64>,
    /// `y1 / gamma`, a noisy observation of `s2`; absent when `gamma = 0`.
    pub r12: Option<Vec<f64>>,
    pub shat1: Vec<f64>,
}

/// The hybrid transceiver for one parameter point.
#[derive(Debug, Clone)]
pub struct HybridLink {
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub params: SchemeParams,
    pub lattice: Lattice,
    /// Send the innovation `V` (correlated mode) instead of `S1`.
    pub correlated: bool,
}

impl HybridLink {
    /// Builds the link with the lattice second moment inflated by `kappa`
    /// (use 1 for the nominal design).
    pub fn new(
        source: SourceSpec,
        channel: ChannelSpec,
        split: PowerSplit,
        blocklength: usize,
        kappa: f64,
    ) -> Result<Self, SimError> {
        let correlated = !source.is_independent();
        let params = derive_scheme_params(&source, &channel, split, correlated)?
            .inflated(&channel, kappa)?;
        let lattice = Lattice::scale_for_power(blocklength, params.p_prime)?;
        Ok(Self {
            source,
            channel,
            params,
            lattice,
            correlated,
        })
    }

    pub fn payload<'a>(&self, block: &'a SourceBlock) -> &'a [f64] {
        if self.correlated {
            &block.v
        } else {
            &block.s1
        }
    }

    pub fn encode(&self, dither: &Dither, block: &SourceBlock) -> Result<Encoded, SimError> {
        encode_hybrid(
            &self.params,
            &self.lattice,
            dither,
            self.payload(block),
            &block.s2,
        )
    }

    /// MMSE weight on `r11`: `target / (target + Var W11)`.
    pub fn r11_weight(&self) -> f64 {
        let t = self.params.target_variance;
        t / (t + effective_noise_variance(&self.params, &self.channel))
    }

    /// Variance of `W12 = (alpha x1 + z1) / gamma`.
    pub fn w12_variance(&self) -> f64 {
        let p = &self.params;
        (p.alpha * p.alpha * p.p_prime + self.channel.n1()) / (p.gamma * p.gamma)
    }

    /// Weight on `r12` in the correlated estimator, zero when `gamma = 0`.
    pub fn r12_weight(&self) -> f64 {
        if !self.correlated || self.params.gamma == 0.0 {
            return 0.0;
        }
        let s = self.source.sigma2();
        self.source.rho() * s / (s + self.w12_variance())
    }

    pub fn decode_receiver1(
        &self,
        dither: &Dither,
        y1: &[f64],
        decoding: Decoding<'_>,
    ) -> Result<Receiver1Output, SimError> {
        let lattice = &self.lattice;
        check_len(lattice, y1)?;
        check_len(lattice, dither.as_slice())?;
        let delta = self.params.delta;
        let r11: Vec<f64> = match decoding {
            Decoding::Physical => y1
                .iter()
                .zip(dither.as_slice())
                .map(|(&y, &u)| lattice.mod_scalar(delta * y - u))
                .collect(),
            Decoding::Ideal(offset) => {
                check_len(lattice, offset)?;
                y1.iter()
                    .zip(dither.as_slice())
                    .zip(offset)
                    .map(|((&y, &u), &q)| delta * y - u + q)
                    .collect()
            }
        };
        let gamma = self.params.gamma;
        let r12 = (gamma > 0.0).then(|| y1.iter().map(|&y| y / gamma).collect::<Vec<_>>());
        let c11 = self.r11_weight();
        let shat1 = match (&r12, self.correlated) {
            (Some(r12), true) => {
                let c12 = self.r12_weight();
                r11.iter()
                    .zip(r12)
                    .map(|(&a, &b)| c11 * a + c12 * b)
                    .collect()
            }
            _ => r11.iter().map(|&a| c11 * a).collect(),
        };
        Ok(Receiver1Output { r11, r12, shat1 })
    }

    pub fn decode_receiver2(&self, y2: &[f64]) -> Vec<f64> {
        decode_receiver2(&self.params, &self.source, &self.channel, y2)
    }
}

/// Linear estimate `gamma sigma2 / (P + N2) * y2` of `s2`.
pub fn decode_receiver2(
    params: &SchemeParams,
    source: &SourceSpec,
    channel: &ChannelSpec,
    y2: &[f64],
) -> Vec<f64> {
    let c = params.gamma * source.sigma2() / (channel.power() + channel.n2());
    y2.iter().map(|&y| c * y).collect()
}

/// Effective noise terms at Receiver 1, computed without any modulo.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveNoise {
    /// `gamma (delta + beta) s2 + (delta alpha - 1) x1 + delta z1`
    pub w11: Vec<f64>,
    /// `(alpha x1 + z1) / gamma`
    pub w12: Vec<f64>,
}

pub fn effective_noise_terms(
    params: &SchemeParams,
    x1: &[f64],
    s2: &[f64],
    z1: &[f64],
) -> Result<EffectiveNoise, SimError> {
    if params.gamma == 0.0 {
        return Err(SimError::ZeroGamma);
    }
    let p = params;
    let interference = p.gamma * (p.delta + p.beta);
    let self_noise = p.delta * p.alpha - 1.0;
    let mut w11 = Vec::with_capacity(x1.len());
    let mut w12 = Vec::with_capacity(x1.len());
    for ((&a, &s), &z) in x1.iter().zip(s2).zip(z1) {
        w11.push(interference * s + self_noise * a + p.delta * z);
        w12.push((p.alpha * a + z) / p.gamma);
    }
    Ok(EffectiveNoise { w11, w12 })
}

/// Monte Carlo outcome for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mode: SimMode,
    pub lattice_mode: LatticeMode,
    pub inflation: f64,
    pub blocklength: usize,
    pub trials: usize,
    pub seed: u64,
    pub samples: u64,
    pub empirical_d1: Estimate,
    pub empirical_d2: Estimate,
    pub empirical_power: Estimate,
    /// `E[W11^2]`; hybrid only.
    pub w_variance: Option<Estimate>,
    /// `E[W12^2]`; hybrid only.
    pub w12_variance: Option<Estimate>,
    /// `E[W11 W12]`; hybrid only.
    pub w_cross_correlation: Option<Estimate>,
    /// `E[x1 s2]`; hybrid only.
    pub x1_s2_cross: Option<Estimate>,
    /// Fraction of coordinates where Receiver 1's modulo step aliased.
    pub overload_rate: f64,
    pub analytic: DistortionPair,
    /// Expected `E[X^2]`: `P`, or `kappa alpha1 P + (1 - alpha1) P` on an
    /// inflated physical lattice.
    pub analytic_power: f64,
}

impl SimResult {
    /// Whether the distortion estimates sit within `sigmas` standard errors
    /// of the closed forms.
    pub fn consistent(&self, sigmas: f64) -> bool {
        self.empirical_d1.within(self.analytic.d1, sigmas)
            && self.empirical_d2.within(self.analytic.d2, sigmas)
    }

    /// Whether the run is expected to match the closed forms exactly in the
    /// large-sample limit (no finite-lattice aliasing).
    pub fn is_formula_check(&self) -> bool {
        self.mode == SimMode::Uncoded || self.lattice_mode == LatticeMode::Ideal
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    e1: Moments,
    e2: Moments,
    power: Moments,
    w11: Moments,
    w12: Moments,
    w_cross: Moments,
    x1_s2: Moments,
    overloads: u64,
}

impl TrialStats {
    fn merge(&mut self, o: &TrialStats) {
        self.e1.merge(&o.e1);
        self.e2.merge(&o.e2);
        self.power.merge(&o.power);
        self.w11.merge(&o.w11);
        self.w12.merge(&o.w12);
        self.w_cross.merge(&o.w_cross);
        self.x1_s2.merge(&o.x1_s2);
        self.overloads += o.overloads;
    }
}

fn run_trials<F>(config: &SimConfig, trial: F) -> Result<TrialStats, SimError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<TrialStats, SimError> + Sync,
{
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|i| trial(&mut config.trial_rng(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = TrialStats::default();
    for t in &per_trial {
        total.merge(t);
    }
    Ok(total)
}

fn hybrid_trial(
    link: &HybridLink,
    lattice_mode: LatticeMode,
    rng: &mut ChaCha8Rng,
) -> Result<TrialStats, SimError> {
    let n = link.lattice.dimension();
    let block = gen_sources(&link.source, n, rng);
    let dither = link.lattice.sample_dither(rng);
    let z1 = noise(link.channel.n1(), n, rng);
    let z2 = noise(link.channel.n2(), n, rng);

    let enc = link.encode(&dither, &block)?;
    let y1: Vec<f64> = enc.x.iter().zip(&z1).map(|(x, z)| x + z).collect();
    let y2: Vec<f64> = enc.x.iter().zip(&z2).map(|(x, z)| x + z).collect();

    let ideal = link.decode_receiver1(&dither, &y1, Decoding::Ideal(&enc.lattice_offset))?;
    let (rx1, overloads) = match lattice_mode {
        LatticeMode::Ideal => (ideal, 0),
        LatticeMode::Physical => {
            let phys = link.decode_receiver1(&dither, &y1, Decoding::Physical)?;
            let half = 0.5 * link.lattice.scale();
            let aliased = phys
                .r11
                .iter()
                .zip(&ideal.r11)
                .filter(|(a, b)| (*a - *b).abs() > half)
                .count() as u64;
            (phys, aliased)
        }
    };
    let shat2 = link.decode_receiver2(&y2);
    let noise_terms = effective_noise_terms(&link.params, &enc.x1, &block.s2, &z1)?;

    let mut st = TrialStats {
        overloads,
        ..Default::default()
    };
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        st.e1.push((block.s1[i] - rx1.shat1[i]).powi(2));
        st.e2.push((block.s2[i] - shat2[i]).powi(2));
        st.power.push(enc.x[i] * enc.x[i]);
        let (w11, w12) = (noise_terms.w11[i], noise_terms.w12[i]);
        st.w11.push(w11 * w11);
        st.w12.push(w12 * w12);
        st.w_cross.push(w11 * w12);
        st.x1_s2.push(enc.x1[i] * block.s2[i]);
    }
    Ok(st)
}

fn accumulate_hybrid(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    config: &SimConfig,
) -> Result<(HybridLink, TrialStats), SimError> {
    config.validate()?;
    let a = split.alpha1();
    if a == 0.0 || a == 1.0 {
        return Err(ModelError::DegeneratePowerSplit(a).into());
    }
    let link = HybridLink::new(
        *source,
        *channel,
        split,
        config.blocklength,
        config.effective_inflation(),
    )?;
    let stats = run_trials(config, |rng| hybrid_trial(&link, config.lattice_mode, rng))?;
    Ok((link, stats))
}

/// Runs the hybrid transceiver. Independent sources use the single-observation
/// estimator; correlated sources code the innovation and combine both
/// Receiver 1 observables.
pub fn run_hybrid(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    let (link, st) = accumulate_hybrid(source, channel, split, config)?;
    let analytic = if link.correlated {
        regions::hybrid_correlated_point(source, channel, split)
    } else {
        regions::hybrid_independent_point(source, channel, split)?
    };
    Ok(SimResult {
        mode: SimMode::Hybrid,
        lattice_mode: config.lattice_mode,
        inflation: config.effective_inflation(),
        blocklength: config.blocklength,
        trials: config.trials,
        seed: config.seed,
        samples: st.e1.count(),
        empirical_d1: st.e1.estimate(),
        empirical_d2: st.e2.estimate(),
        empirical_power: st.power.estimate(),
        w_variance: Some(st.w11.estimate()),
        w12_variance: Some(st.w12.estimate()),
        w_cross_correlation: Some(st.w_cross.estimate()),
        x1_s2_cross: Some(st.x1_s2.estimate()),
        overload_rate: st.overloads as f64 / st.e1.count() as f64,
        analytic,
        analytic_power: link.params.transmit_power(source),
    })
}

/// Runs uncoded transmission with scalar MMSE receivers.
pub fn run_uncoded(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    config.validate()?;
    if !source.is_independent() {
        return Err(SimError::RequiresIndependent("uncoded"));
    }
    let s = source.sigma2();
    let p = channel.power();
    let a = split.alpha1();
    let g1 = (a * p / s).sqrt();
    let g2 = ((1.0 - a) * p / s).sqrt();
    let c1 = (a * p * s).sqrt() / (p + channel.n1());
    let c2 = ((1.0 - a) * p * s).sqrt() / (p + channel.n2());
    let n = config.blocklength;

    let st = run_trials(config, |rng| {
        let block = gen_sources(source, n, rng);
        let z1 = noise(channel.n1(), n, rng);
        let z2 = noise(channel.n2(), n, rng);
        let mut st = TrialStats::default();
        for i in 0..n {
            let x = g1 * block.s1[i] + g2 * block.s2[i];
            let shat1 = c1 * (x + z1[i]);
            let shat2 = c2 * (x + z2[i]);
            st.e1.push((block.s1[i] - shat1).powi(2));
            st.e2.push((block.s2[i] - shat2).powi(2));
            st.power.push(x * x);
        }
        Ok(st)
    })?;

    Ok(SimResult {
        mode: SimMode::Uncoded,
        lattice_mode: config.lattice_mode,
        inflation: config.effective_inflation(),
        blocklength: config.blocklength,
        trials: config.trials,
        seed: config.seed,
        samples: st.e1.count(),
        empirical_d1: st.e1.estimate(),
        empirical_d2: st.e2.estimate(),
        empirical_power: st.power.estimate(),
        w_variance: None,
        w12_variance: None,
        w_cross_correlation: None,
        x1_s2_cross: None,
        overload_rate: 0.0,
        analytic: regions::uncoded_point(source, channel, split)?,
        analytic_power: p,
    })
}

/// Dispatches on `config.mode`.
pub fn run(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    match config.mode {
        SimMode::Hybrid => run_hybrid(source, channel, split, config),
        SimMode::Uncoded => run_uncoded(source, channel, split, config),
    }
}

/// Empirical effective-noise statistics next to their closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveNoiseStats {
    pub w11_variance: Estimate,
    pub w12_variance: Estimate,
    pub cross_correlation: Estimate,
    /// `target_variance * N1 / (alpha1 P)`
    pub analytic_w11_variance: f64,
    /// `(alpha1 P + N1) sigma2 / ((1 - alpha1) P)`
    pub analytic_w12_variance: f64,
    /// `delta (alpha^2 P' + N1) - alpha P'`, zero for the chosen delta.
    pub cross_identity_residual: f64,
}

/// Measures `W11` and `W12` on the nominal (uninflated) hybrid design.
pub fn measure_effective_noise(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    config: &SimConfig,
) -> Result<EffectiveNoiseStats, SimError> {
    let mut cfg = config.clone();
    cfg.lattice_mode = LatticeMode::Ideal;
    cfg.inflation = 1.0;
    let (link, st) = accumulate_hybrid(source, channel, split, &cfg)?;
    let p = &link.params;
    let coded_power = split.alpha1() * channel.power();
    Ok(EffectiveNoiseStats {
        w11_variance: st.w11.estimate(),
        w12_variance: st.w12.estimate(),
        cross_correlation: st.w_cross.estimate(),
        analytic_w11_variance: p.target_variance * channel.n1() / coded_power,
        analytic_w12_variance: (coded_power + channel.n1()) * source.sigma2()
            / ((1.0 - split.alpha1()) * channel.power()),
        cross_identity_residual: cross_identity_residual(p, channel),
    })
}

/// `(delta alpha - 1) alpha P' + delta N1`: proportional to `E[W11 W12]`.
pub fn cross_identity_residual(params: &SchemeParams, channel: &ChannelSpec) -> f64 {
    let p = params;
    // Expanded as delta (alpha^2 P' + N1) - alpha P' so that delta alpha near
    // one does not cancel before the sum is formed.
    p.delta * (p.alpha * p.alpha * p.p_prime + channel.n1()) - p.alpha * p.p_prime
}
