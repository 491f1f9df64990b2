//! Closed-form distortion regions.
//!
//! Every region here is the union over `alpha1 in [0, 1]` of the quadrant
//! dominated by one `(D1, D2)` point; we represent a region by that point as
//! a function of `alpha1`. All schemes share the Receiver 2 distortion
//!
//! ```text
//! D2 = sigma2 / (1 + (1 - alpha1) P / (alpha1 P + N2))
//! ```
//!
//! so comparisons at equal `alpha1` are comparisons at equal `D2`.

use serde::{Deserialize, Serialize};

use crate::model::{
    derive_scheme_params, effective_noise_variance, ChannelSpec, DistortionPair, ModelError,
    PowerSplit, SourceSpec,
};

/// Relative difference below which two distortions are reported as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Number of points in the default `alpha1` grid.
pub const DEFAULT_GRID_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{scheme} is only defined for independent sources (got rho = {rho})")]
    RequiresIndependent { scheme: Scheme, rho: f64 },
    #[error("alpha1 grid must be non-empty, strictly increasing and inside [0, 1]")]
    BadGrid,
    #[error("shared D2 mismatch at alpha1 = {alpha1}: {scheme} gives {got}, expected {expected}")]
    SharedD2Mismatch {
        alpha1: f64,
        scheme: Scheme,
        got: f64,
        expected: f64,
    },
}

/// The transmission schemes whose regions are tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Outer bound on the (conditional) distortion region.
    OuterBound,
    /// Lattice hybrid scheme for independent sources.
    HybridIndependent,
    /// Uncoded linear superposition of the two sources.
    Uncoded,
    /// Lattice hybrid scheme sending the innovation `V` and `S2`.
    HybridCorrelated,
    /// Separate compression of `S1` and `S2`, then broadcast coding.
    SeparationA,
    /// Compression of `V` and `S2`; Receiver 1 also decodes the `S2` message.
    SeparationB,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::OuterBound,
        Scheme::HybridIndependent,
        Scheme::Uncoded,
        Scheme::HybridCorrelated,
        Scheme::SeparationA,
        Scheme::SeparationB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OuterBound => "OuterBound",
            Scheme::HybridIndependent => "HybridIndependent",
            Scheme::Uncoded => "Uncoded",
            Scheme::HybridCorrelated => "HybridCorrelated",
            Scheme::SeparationA => "SeparationA",
            Scheme::SeparationB => "SeparationB",
        }
    }

    /// Whether the scheme's formula is defined for this source.
    pub fn applies_to(self, source: &SourceSpec) -> bool {
        match self {
            Scheme::HybridIndependent | Scheme::Uncoded => source.is_independent(),
            _ => true,
        }
    }

    /// Schemes that are actual coding strategies (everything but the bound).
    pub fn is_achievable(self) -> bool {
        self != Scheme::OuterBound
    }

    /// Schemes whose `D1` is guaranteed non-increasing in `alpha1` for every
    /// parameter choice. The correlated hybrid and Scheme B contain a term
    /// `rho^2 sigma2 (alpha1 P + N) / (P + N)` that grows with `alpha1`, so
    /// their frontiers can bend back at high correlation.
    pub fn has_monotone_frontier(self) -> bool {
        !matches!(self, Scheme::HybridCorrelated | Scheme::SeparationB)
    }

    pub fn point(
        self,
        source: &SourceSpec,
        channel: &ChannelSpec,
        split: PowerSplit,
    ) -> Result<DistortionPair, RegionError> {
        match self {
            Scheme::OuterBound => Ok(outer_bound_point(source, channel, split)),
            Scheme::HybridIndependent => hybrid_independent_point(source, channel, split),
            Scheme::Uncoded => uncoded_point(source, channel, split),
            Scheme::HybridCorrelated => Ok(hybrid_correlated_point(source, channel, split)),
            Scheme::SeparationA => Ok(separation_a_point(source, channel, split)),
            Scheme::SeparationB => Ok(separation_b_point(source, channel, split)),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "outer" | "outerbound" => Ok(Scheme::OuterBound),
            "hybridindependent" => Ok(Scheme::HybridIndependent),
            "uncoded" => Ok(Scheme::Uncoded),
            "hybridcorrelated" => Ok(Scheme::HybridCorrelated),
            "a" | "sepa" | "separationa" => Ok(Scheme::SeparationA),
            "b" | "sepb" | "separationb" => Ok(Scheme::SeparationB),
            _ => Err(format!("unknown scheme '{s}'")),
        }
    }
}

/// Shared Receiver 2 distortion `sigma2 / (1 + (1 - alpha1) P / (alpha1 P + N2))`.
pub fn shared_d2(source: &SourceSpec, channel: &ChannelSpec, split: PowerSplit) -> f64 {
    let a = split.alpha1();
    let p = channel.power();
    source.sigma2() / (1.0 + (1.0 - a) * p / (a * p + channel.n2()))
}

/// `sigma2 / (1 + a P / N1)`: point-to-point optimum for a source of
/// variance `var` sent with power `a P` to Receiver 1.
fn strong_user_term(var: f64, channel: &ChannelSpec, a: f64) -> f64 {
    var / (1.0 + a * channel.power() / channel.n1())
}

/// `var / (1 + (1 - a) P / (a P + N))`: estimate of `S2` from an
/// observation where the coded branch acts as noise at noise level `N`.
fn uncoded_branch_term(var: f64, channel: &ChannelSpec, a: f64, noise: f64) -> f64 {
    let p = channel.power();
    var / (1.0 + (1.0 - a) * p / (a * p + noise))
}

/// Outer bound. `d1` is the conditional distortion `D1|2` whenever `rho > 0`;
/// for independent sources it bounds the plain `D1`.
pub fn outer_bound_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> DistortionPair {
    let a = split.alpha1();
    DistortionPair {
        d1: strong_user_term(source.innovation_variance(), channel, a),
        d2: shared_d2(source, channel, split),
        conditional: !source.is_independent(),
    }
}

/// Hybrid scheme for independent sources.
///
/// Computed from the transceiver rather than the bound: `D1` is the MMSE of
/// `S1` from `R1 = S1 + W1` with the effective noise variance of the chosen
/// lattice constants, and `D2` is the MSE of the linear estimator
/// `gamma sigma2 / (P + N2) * Y2`.
pub fn hybrid_independent_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> Result<DistortionPair, RegionError> {
    if !source.is_independent() {
        return Err(RegionError::RequiresIndependent {
            scheme: Scheme::HybridIndependent,
            rho: source.rho(),
        });
    }
    let s = source.sigma2();
    let p = channel.power();
    let a = split.alpha1();
    let d2 = s * (a * p + channel.n2()) / (p + channel.n2());
    if a == 0.0 {
        return Ok(DistortionPair::new(s, d2));
    }
    let params = derive_scheme_params(source, channel, split, false)?;
    let w = effective_noise_variance(&params, channel);
    Ok(DistortionPair::new(s * w / (s + w), d2))
}

/// Uncoded transmission `X = sqrt(a P / s) S1 + sqrt((1 - a) P / s) S2`
/// with scalar MMSE estimation at both receivers.
pub fn uncoded_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> Result<DistortionPair, RegionError> {
    if !source.is_independent() {
        return Err(RegionError::RequiresIndependent {
            scheme: Scheme::Uncoded,
            rho: source.rho(),
        });
    }
    let a = split.alpha1();
    let p = channel.power();
    let d1 = source.sigma2() / (1.0 + a * p / ((1.0 - a) * p + channel.n1()));
    Ok(DistortionPair::new(d1, shared_d2(source, channel, split)))
}

/// Hybrid scheme for correlated sources: the innovation `V` rides the
/// lattice branch and Receiver 1 combines its estimate with a noisy
/// observation of `S2` taken from the same channel output.
pub fn hybrid_correlated_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> DistortionPair {
    let a = split.alpha1();
    let rho2 = source.rho() * source.rho();
    let d1 = strong_user_term(source.innovation_variance(), channel, a)
        + rho2 * uncoded_branch_term(source.sigma2(), channel, a, channel.n1());
    DistortionPair::new(d1, shared_d2(source, channel, split))
}

/// Separation Scheme A: `S1` and `S2` compressed independently.
pub fn separation_a_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> DistortionPair {
    DistortionPair::new(
        strong_user_term(source.sigma2(), channel, split.alpha1()),
        shared_d2(source, channel, split),
    )
}

/// Separation Scheme B: `V` and `S2` compressed; Receiver 1 recovers the
/// `S2` description at the weak receiver's quality.
pub fn separation_b_point(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> DistortionPair {
    let a = split.alpha1();
    let rho2 = source.rho() * source.rho();
    let d1 = strong_user_term(source.innovation_variance(), channel, a)
        + rho2 * uncoded_branch_term(source.sigma2(), channel, a, channel.n2());
    DistortionPair::new(d1, shared_d2(source, channel, split))
}

/// SNR below which the hybrid scheme beats Scheme A at this split:
/// `(1 - 2 alpha1) / alpha1^2`. Returns `+inf` at `alpha1 = 0`.
pub fn snr_threshold(split: PowerSplit) -> f64 {
    let a = split.alpha1();
    if a == 0.0 {
        return f64::INFINITY;
    }
    (1.0 - 2.0 * a) / (a * a)
}

/// A scheme's frontier sampled on an `alpha1` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    pub scheme: Scheme,
    pub points: Vec<(f64, DistortionPair)>,
}

impl RegionCurve {
    /// `true` when `d1` is non-increasing and `d2` non-decreasing along the curve.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            let (a, b) = (&w[0].1, &w[1].1);
            b.d1 <= a.d1 && b.d2 >= a.d2
        })
    }
}

/// `n` uniformly spaced points on `[0, 1]`, endpoints included.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = (n - 1) as f64;
            (0..n).map(|i| i as f64 / last).collect()
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<(), RegionError> {
    let inside = grid.iter().all(|a| (0.0..=1.0).contains(a));
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    if grid.is_empty() || !inside || !increasing {
        return Err(RegionError::BadGrid);
    }
    Ok(())
}

pub fn sweep_frontier(
    scheme: Scheme,
    source: &SourceSpec,
    channel: &ChannelSpec,
    grid: &[f64],
) -> Result<RegionCurve, RegionError> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&a| {
            let split = PowerSplit::new(a)?;
            Ok((a, scheme.point(source, channel, split)?))
        })
        .collect::<Result<Vec<_>, RegionError>>()?;
    Ok(RegionCurve { scheme, points })
}

/// Outcome of comparing two distortions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The first operand is strictly smaller.
    First,
    /// The second operand is strictly smaller.
    Second,
    Tie,
}

/// Compares with the [`TIE_TOLERANCE`] relative neutral zone.
pub fn compare_distortions(a: f64, b: f64) -> Verdict {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= TIE_TOLERANCE * scale {
        Verdict::Tie
    } else if a < b {
        Verdict::First
    } else {
        Verdict::Second
    }
}

/// What the SNR threshold predicts for hybrid versus Scheme A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    HybridWins,
    NoWin,
    /// `P/N1` sits on the threshold within the tie tolerance.
    Boundary,
}

impl Prediction {
    pub fn agrees_with(self, observed: Verdict) -> bool {
        match self {
            Prediction::HybridWins => observed == Verdict::First,
            Prediction::NoWin => observed != Verdict::First,
            Prediction::Boundary => observed == Verdict::Tie,
        }
    }
}

/// Threshold prediction for hybrid (correlated) versus Scheme A. With
/// independent sources the two coincide, so nothing is predicted to win.
pub fn predict_hybrid_vs_a(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
) -> Prediction {
    if source.is_independent() {
        return Prediction::NoWin;
    }
    let threshold = snr_threshold(split);
    let snr = channel.snr1();
    if threshold.is_finite() && (threshold - snr).abs() <= TIE_TOLERANCE * threshold.abs().max(snr)
    {
        Prediction::Boundary
    } else if snr < threshold {
        Prediction::HybridWins
    } else {
        Prediction::NoWin
    }
}

/// All schemes at one `alpha1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub alpha1: f64,
    pub points: Vec<(Scheme, DistortionPair)>,
    /// Achievable scheme with the smallest `d1`; `None` when the best two tie.
    pub d1_winner: Option<Scheme>,
    /// `First` means the hybrid scheme has the smaller `d1`.
    pub hybrid_vs_a: Verdict,
    /// `(1 - 2 alpha1) / alpha1^2`, absent at `alpha1 = 0`.
    pub threshold: Option<f64>,
    pub prediction: Prediction,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub source: SourceSpec,
    pub channel: ChannelSpec,
    pub p_over_n1: f64,
    pub alpha1_grid: Vec<f64>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.agrees)
    }
}

/// Bound on the per-scheme spread of `d2` at one `alpha1`, in ulps.
const SHARED_D2_ULPS: f64 = 4.0;

pub fn compare_schemes(
    source: &SourceSpec,
    channel: &ChannelSpec,
    grid: &[f64],
) -> Result<ComparisonReport, RegionError> {
    check_grid(grid)?;
    let schemes: Vec<Scheme> = Scheme::ALL
        .into_iter()
        .filter(|s| s.applies_to(source))
        .collect();
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha1 in grid {
        let split = PowerSplit::new(alpha1)?;
        let expected = shared_d2(source, channel, split);
        let mut points = Vec::with_capacity(schemes.len());
        for &scheme in &schemes {
            let pair = scheme.point(source, channel, split)?;
            if (pair.d2 - expected).abs() > SHARED_D2_ULPS * f64::EPSILON * expected {
                return Err(RegionError::SharedD2Mismatch {
                    alpha1,
                    scheme,
                    got: pair.d2,
                    expected,
                });
            }
            points.push((scheme, pair));
        }

        let d1_of = |wanted: Scheme| {
            points
                .iter()
                .find(|(s, _)| *s == wanted)
                .map(|(_, p)| p.d1)
                .expect("hybrid and Scheme A apply to every source")
        };
        let hybrid_vs_a =
            compare_distortions(d1_of(Scheme::HybridCorrelated), d1_of(Scheme::SeparationA));

        let mut ranked: Vec<&(Scheme, DistortionPair)> =
            points.iter().filter(|(s, _)| s.is_achievable()).collect();
        ranked.sort_by(|a, b| a.1.d1.total_cmp(&b.1.d1));
        let d1_winner = match ranked.as_slice() {
            [only] => Some(only.0),
            [best, second, ..] => match compare_distortions(best.1.d1, second.1.d1) {
                Verdict::Tie => None,
                _ => Some(best.0),
            },
            [] => None,
        };

        let threshold = snr_threshold(split);
        let prediction = predict_hybrid_vs_a(source, channel, split);
        rows.push(ComparisonRow {
            alpha1,
            points,
            d1_winner,
            hybrid_vs_a,
            threshold: threshold.is_finite().then_some(threshold),
            prediction,
            agrees: prediction.agrees_with(hybrid_vs_a),
        });
    }
    Ok(ComparisonReport {
        source: *source,
        channel: *channel,
        p_over_n1: channel.snr1(),
        alpha1_grid: grid.to_vec(),
        rows,
    })
}
