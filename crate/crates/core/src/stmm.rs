//! Surface configuration, phase profiles, the coupled multiplicative
//! reflection response, array factor, drift angle and coupling-loss
//! estimation.
//!
//! The monostatic response of the modulated surface is
//!
//! ```text
//! h_u(t) = alpha * sum_{q,v} exp(-j * [ geo(q,v) - phi(q,v) - gamma(t - dtau(q,v)) ])
//! ```
//!
//! where `geo(q,v)` is the two-way carrier phase of the element's excess
//! path (`4*pi*f*dtau`; for quarter-wavelength spacing this is
//! `pi*(q*cos(theta)cos(phi) + v*cos(theta)sin(phi))`), `phi` the static
//! profile and `gamma` the temporal phase, seen by the receiver with the
//! element's one-way excess delay. Elements sharing the same delay are
//! grouped so large surfaces at zero elevation cost `M_ux` rather than
//! `M_ux * M_uy` evaluations per sample.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decoupling::{ClusterMap, DelayConvention};
use crate::error::{Error, Result};
use crate::geometry::{build_delay_map, DelayMap, IncidenceGeometry, SPEED_OF_LIGHT};
use crate::waveform::{PhaseSignal, PhaseSource};

/// Reflecting-array configuration: element grid, pitch, cluster split and
/// element-pattern exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StmmConfig {
    m_ux: usize,
    m_uy: usize,
    spacing: f64,
    clusters_per_axis: usize,
    q_exponent: f64,
}

impl StmmConfig {
    /// Validates and builds a configuration. The cluster count per axis is
    /// capped at the element count of that axis (a 4x1 array with K = 2
    /// forms two clusters along x), and each axis must split evenly.
    pub fn new(
        m_ux: usize,
        m_uy: usize,
        spacing: f64,
        clusters_per_axis: usize,
        q_exponent: f64,
    ) -> Result<Self> {
        if m_ux == 0 || m_uy == 0 {
            return Err(Error::domain("element counts must be positive".to_string()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::domain(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if clusters_per_axis == 0 {
            return Err(Error::domain(
                "cluster count must be at least 1".to_string(),
            ));
        }
        if clusters_per_axis * clusters_per_axis > m_ux * m_uy {
            return Err(Error::domain(format!(
                "K^2 = {} exceeds the element count {}",
                clusters_per_axis * clusters_per_axis,
                m_ux * m_uy
            )));
        }
        if q_exponent < 0.0 || q_exponent.is_nan() {
            return Err(Error::domain(format!(
                "q_exponent must be non-negative, got {q_exponent}"
            )));
        }
        let cfg = Self {
            m_ux,
            m_uy,
            spacing,
            clusters_per_axis,
            q_exponent,
        };
        if !m_ux.is_multiple_of(cfg.clusters_x()) || !m_uy.is_multiple_of(cfg.clusters_y()) {
            return Err(Error::domain(format!(
                "array {m_ux}x{m_uy} does not split into {clusters_per_axis} clusters per axis"
            )));
        }
        Ok(cfg)
    }

    /// Configuration with the reference quarter-wavelength pitch.
    pub fn quarter_wave(
        m_ux: usize,
        m_uy: usize,
        clusters_per_axis: usize,
        q_exponent: f64,
        wavelength: f64,
    ) -> Result<Self> {
        Self::new(m_ux, m_uy, wavelength / 4.0, clusters_per_axis, q_exponent)
    }

    pub fn m_ux(&self) -> usize {
        self.m_ux
    }

    pub fn m_uy(&self) -> usize {
        self.m_uy
    }

    /// Total element count.
    pub fn m_u(&self) -> usize {
        self.m_ux * self.m_uy
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn clusters_per_axis(&self) -> usize {
        self.clusters_per_axis
    }

    pub fn q_exponent(&self) -> f64 {
        self.q_exponent
    }

    /// Effective cluster count along x, capped at the axis element count.
    pub fn clusters_x(&self) -> usize {
        self.clusters_per_axis.min(self.m_ux)
    }

    pub fn clusters_y(&self) -> usize {
        self.clusters_per_axis.min(self.m_uy)
    }

    /// Cluster tile size along x.
    pub fn tile_x(&self) -> usize {
        self.m_ux / self.clusters_x()
    }

    pub fn tile_y(&self) -> usize {
        self.m_uy / self.clusters_y()
    }

    /// Number of clusters actually formed.
    pub fn cluster_count(&self) -> usize {
        self.clusters_x() * self.clusters_y()
    }
}

/// Static per-element phase profile, stored wrapped to `[0, 2*pi)`.
#[derive(Debug, Clone)]
pub struct PhaseProfile {
    m_x: usize,
    m_y: usize,
    values: Vec<f64>,
}

impl PhaseProfile {
    /// Builds a profile from a per-element function; values are wrapped.
    pub fn from_fn(m_x: usize, m_y: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(m_x * m_y);
        for q in 0..m_x {
            for v in 0..m_y {
                values.push(wrap_phase(f(q, v)));
            }
        }
        Self { m_x, m_y, values }
    }

    /// All-zero profile.
    pub fn zero(m_x: usize, m_y: usize) -> Self {
        Self {
            m_x,
            m_y,
            values: vec![0.0; m_x * m_y],
        }
    }

    pub fn at(&self, q: usize, v: usize) -> f64 {
        self.values[q * self.m_y + v]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_x, self.m_y)
    }
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Spatial phase that adds the two-way excess path phase back at every
/// element, so a constant temporal phase reflects coherently toward the
/// source: `phi(q,v) = pi*(q*cos(theta)cos(phi) + v*cos(theta)sin(phi))`,
/// wrapped to `[0, 2*pi)`.
pub fn backreflection_profile(geom: &IncidenceGeometry, config: &StmmConfig) -> PhaseProfile {
    // per-element phase step equals the two-way carrier phase of one pitch
    let step = 2.0 * TAU * geom.carrier_freq() * config.spacing() / SPEED_OF_LIGHT;
    let (cx, cy) = (geom.cos_x(), geom.cos_y());
    PhaseProfile::from_fn(config.m_ux(), config.m_uy(), |q, v| {
        step * (q as f64 * cx + v as f64 * cy)
    })
}

/// How the element amplitude responds to the arrival direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementPattern {
    /// Cosine-power pattern in the angle from the surface normal:
    /// `alpha = 2*(2q+1) * sin(theta)^(2q)`. Smooth in elevation and azimuth
    /// and maximal at boresight.
    #[default]
    NormalCosine,
    /// Literal form `2*(2q+1) * (cos(theta)sin(phi))^(2q)`, which vanishes
    /// at zero elevation for q > 0; kept for comparison.
    Literal,
}

/// Reflection-coefficient amplitude for the element pattern exponent
/// `q_exponent`, using the boresight-maximal pattern.
pub fn reflection_amplitude(geom: &IncidenceGeometry, q_exponent: f64) -> f64 {
    reflection_amplitude_with(geom, q_exponent, ElementPattern::NormalCosine)
}

/// Reflection-coefficient amplitude under an explicit pattern choice.
pub fn reflection_amplitude_with(
    geom: &IncidenceGeometry,
    q_exponent: f64,
    pattern: ElementPattern,
) -> f64 {
    let boresight = 2.0 * (2.0 * q_exponent + 1.0);
    if q_exponent == 0.0 {
        return boresight;
    }
    let base = match pattern {
        // angle from the normal has cosine sin(theta) for any phi
        ElementPattern::NormalCosine => geom.theta().sin().abs(),
        ElementPattern::Literal => (geom.theta().cos() * geom.phi().sin()).abs(),
    };
    boresight * base.powf(2.0 * q_exponent)
}

/// Element gain normalized by its boresight value, in `[0, 1]`.
pub fn normalized_element_gain(geom: &IncidenceGeometry, q_exponent: f64) -> f64 {
    reflection_amplitude(geom, q_exponent) / (2.0 * (2.0 * q_exponent + 1.0))
}

/// Diagonal reflection-coefficient matrix at one time instant.
#[derive(Debug, Clone)]
pub struct ReflectionMatrix {
    diagonal: Vec<Complex64>,
}

impl ReflectionMatrix {
    /// Size of the (square) matrix.
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Entry `(i, j)`; zero off the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            self.diagonal[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Diagonal entries in row-major element order.
    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }
}

/// Builds the diagonal reflection matrix `alpha * exp(j*beta(q,v))` in
/// row-major element order from the per-element phases at one instant.
pub fn reflection_matrix(
    config: &StmmConfig,
    geom: &IncidenceGeometry,
    beta_at_t: &[f64],
) -> Result<ReflectionMatrix> {
    if beta_at_t.len() != config.m_u() {
        return Err(Error::domain(format!(
            "phase matrix has {} entries, expected {}",
            beta_at_t.len(),
            config.m_u()
        )));
    }
    let alpha = reflection_amplitude(geom, config.q_exponent());
    Ok(ReflectionMatrix {
        diagonal: beta_at_t
            .iter()
            .map(|&b| Complex64::from_polar(alpha, b))
            .collect(),
    })
}

/// Sampled multiplicative channel together with its coherence summary.
#[derive(Debug, Clone)]
pub struct CoupledResponse {
    /// Complex response samples, including the element amplitude.
    pub h_u: Vec<Complex64>,
    /// Sample rate of the response.
    pub sample_rate: f64,
    /// Time of the first response sample.
    pub t0: f64,
    /// Index of the first response sample on the temporal-phase grid.
    pub start_index: usize,
    /// Time-averaged `|h_u| / (M_u * alpha)`, in `[0, 1]`.
    pub af_mag: f64,
}

// ---------------------------------------------------------------------------
// delay-grouped response engine
// ---------------------------------------------------------------------------

/// Elements folded by identical (delay, cluster delay): the weight carries
/// the summed static phasors `exp(-j*(geo - profile))` of the members.
#[derive(Debug, Clone)]
pub(crate) struct DelayGroup {
    pub delay: f64,
    pub cluster_delay: f64,
    pub weight: Complex64,
}

pub(crate) fn element_groups<F>(
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    profile: &PhaseProfile,
    delays: &DelayMap,
    cluster_delay_of: F,
) -> Vec<DelayGroup>
where
    F: Fn(usize, usize) -> f64,
{
    let two_way = 2.0 * TAU * geom.carrier_freq();
    let mut acc: HashMap<(u64, u64), Complex64> = HashMap::new();
    for q in 0..config.m_ux() {
        for v in 0..config.m_uy() {
            let d = delays.at(q, v);
            let cd = cluster_delay_of(q, v);
            let residual = two_way * d - profile.at(q, v);
            let e = acc
                .entry((d.to_bits(), cd.to_bits()))
                .or_insert(Complex64::new(0.0, 0.0));
            *e += Complex64::from_polar(1.0, -residual);
        }
    }
    let mut groups: Vec<DelayGroup> = acc
        .into_iter()
        .map(|((d, cd), weight)| DelayGroup {
            delay: f64::from_bits(d),
            cluster_delay: f64::from_bits(cd),
            weight,
        })
        .collect();
    groups.sort_by(|a, b| {
        a.delay
            .partial_cmp(&b.delay)
            .unwrap()
            .then(a.cluster_delay.partial_cmp(&b.cluster_delay).unwrap())
    });
    groups
}

/// Temporal command applied per group during evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) enum TemporalMode {
    /// Common waveform at every element: receiver sees `gamma(t - delay)`.
    Direct,
    /// Cluster-decoupled commands under the given offset convention.
    Decoupled(DelayConvention),
}

#[inline]
fn group_phase(g: &DelayGroup, gamma: &PhaseSignal, t: f64, mode: TemporalMode) -> f64 {
    match mode {
        TemporalMode::Direct => gamma.phase_at_clamped(t - g.delay),
        TemporalMode::Decoupled(conv) => {
            let u = t - g.delay + g.cluster_delay;
            let base = gamma.phase_at_clamped(u);
            let rate = gamma.rate_at_clamped(u);
            match conv {
                DelayConvention::ClusterCentered => base + rate * (g.delay - g.cluster_delay),
                DelayConvention::OffsetSum => base - rate * (g.delay + g.cluster_delay),
            }
        }
    }
}

/// Guard in samples so every evaluation stays inside the sampled support.
fn guard_samples(groups: &[DelayGroup], gamma: &PhaseSignal, mode: TemporalMode) -> usize {
    let mut span = 0.0f64;
    for g in groups {
        let reach = match mode {
            TemporalMode::Direct => g.delay.abs(),
            TemporalMode::Decoupled(_) => g.delay.abs() + g.cluster_delay.abs(),
        };
        span = span.max(reach);
    }
    (span * gamma.sample_rate).ceil() as usize + 2
}

/// Evaluates the coherent sum `sum_g weight_g * exp(j*phase_g(t))` on the
/// trimmed sample grid of `gamma`. Returns the samples and the start index.
pub(crate) fn response_sum(
    groups: &[DelayGroup],
    gamma: &PhaseSignal,
    mode: TemporalMode,
) -> Result<(Vec<Complex64>, usize)> {
    let guard = guard_samples(groups, gamma, mode);
    let n = gamma.len();
    if n < 2 * guard + 8 {
        return Err(Error::config(format!(
            "phase record of {n} samples too short for a guard of {guard} samples per side"
        )));
    }
    let fs = gamma.sample_rate;
    let out: Vec<Complex64> = (guard..n - guard)
        .map(|i| {
            let t = gamma.t0 + i as f64 / fs;
            let mut acc = Complex64::new(0.0, 0.0);
            for g in groups {
                acc += g.weight * Complex64::from_polar(1.0, group_phase(g, gamma, t, mode));
            }
            acc
        })
        .collect();
    Ok((out, guard))
}

/// Time-average of `|response|^2`; the coherent bound is `M_u^2`.
pub(crate) fn mean_square_response(
    groups: &[DelayGroup],
    gamma: &PhaseSignal,
    mode: TemporalMode,
) -> Result<f64> {
    let (samples, _) = response_sum(groups, gamma, mode)?;
    Ok(samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Monte-Carlo mean and standard error of the time-averaged `|response|^2`
/// over independent phase realizations. Trials run concurrently; trial `i`
/// always uses realization `i`, so results do not depend on scheduling.
pub(crate) fn monte_carlo_gain(
    groups: &[DelayGroup],
    source: &dyn PhaseSource,
    n_trials: usize,
    mode: TemporalMode,
) -> Result<(f64, f64)> {
    if n_trials == 0 {
        return Err(Error::domain("n_trials must be at least 1".to_string()));
    }
    let values: Result<Vec<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| mean_square_response(groups, &source.realize(trial), mode))
        .collect();
    let values = values?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let se = if values.len() > 1 {
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64;
        (var / values.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, se))
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Evaluates the multiplicative channel `h_u(t)` on the trimmed sample grid
/// of `gamma`, with the temporal phase common to all elements and seen
/// through each element's excess delay. The bulk link delay and scaling are
/// applied by the channel and link-budget layers, not here.
pub fn multiplicative_channel(
    gamma: &PhaseSignal,
    profile: &PhaseProfile,
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    delays: &DelayMap,
) -> Result<CoupledResponse> {
    if profile.dims() != (config.m_ux(), config.m_uy()) {
        return Err(Error::domain(
            "profile does not match the array size".to_string(),
        ));
    }
    if delays.dims() != (config.m_ux(), config.m_uy()) {
        return Err(Error::domain(
            "delay map does not match the array size".to_string(),
        ));
    }
    if let Some(b) = gamma.nominal_bandwidth {
        if b > 0.0 && gamma.sample_rate < 4.0 * b * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "sample rate {} below 4x the signal bandwidth {b}",
                gamma.sample_rate
            )));
        }
    }
    let groups = element_groups(geom, config, profile, delays, |_, _| 0.0);
    let (sum, start) = response_sum(&groups, gamma, TemporalMode::Direct)?;
    let alpha = reflection_amplitude(geom, config.q_exponent());
    let m_u = config.m_u() as f64;
    let af_mag = sum.iter().map(|c| c.norm()).sum::<f64>() / (sum.len() as f64 * m_u);
    Ok(CoupledResponse {
        h_u: sum.iter().map(|c| c * alpha).collect(),
        sample_rate: gamma.sample_rate,
        t0: gamma.t0 + start as f64 / gamma.sample_rate,
        start_index: start,
        af_mag,
    })
}

/// Magnitude of the normalized array factor for a tone of frequency-shift
/// ratio `kappa`: `|sum exp(-j*2*pi*f*kappa*dtau(q,v))| / M_u`, in `[0, 1]`.
pub fn array_factor(
    geom: &IncidenceGeometry,
    kappa: f64,
    config: &StmmConfig,
    delays: &DelayMap,
) -> f64 {
    let w = TAU * geom.carrier_freq() * kappa;
    // separable over axes because dtau is linear in (q, v)
    let axis_sum = |n: usize, step: f64| -> Complex64 {
        (0..n)
            .map(|i| Complex64::from_polar(1.0, -w * i as f64 * step))
            .sum()
    };
    let sx = axis_sum(config.m_ux(), delays.delta_tau_x);
    let sy = axis_sum(config.m_uy(), delays.delta_tau_y);
    (sx.norm() * sy.norm() / config.m_u() as f64).min(1.0)
}

/// Direction of the reflection maximum after a frequency-shifting temporal
/// phase, or the evanescent outcome when no propagating direction exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftAngle {
    Propagating(f64),
    Evanescent,
}

/// Tilted angle of maximum reflection for a tone of frequency-shift ratio
/// `kappa`: `arccos((1 + kappa) * cos(theta))`, evanescent when the argument
/// leaves `[-1, 1]`.
pub fn drift_angle(theta: f64, kappa: f64) -> DriftAngle {
    let c = (1.0 + kappa) * theta.cos();
    if c.abs() > 1.0 {
        DriftAngle::Evanescent
    } else {
        DriftAngle::Propagating(c.acos())
    }
}

/// Reflected-pattern magnitude at a candidate observation angle, for a
/// surface commanded to back-reflect an arrival from `geom` while a tone of
/// ratio `kappa` shifts the temporal phase. The per-element phase is the
/// commanded gradient scaled by `(1 + kappa)` minus the steering phase of
/// the observation direction at the carrier.
pub fn reflected_pattern(
    geom: &IncidenceGeometry,
    kappa: f64,
    config: &StmmConfig,
    theta_candidate: f64,
) -> f64 {
    let w = TAU * geom.carrier_freq() * config.spacing() / SPEED_OF_LIGHT;
    let phi = geom.phi();
    let ax = w * ((1.0 + kappa) * geom.cos_x() - theta_candidate.cos() * phi.cos());
    let ay = w * ((1.0 + kappa) * geom.cos_y() - theta_candidate.cos() * phi.sin());
    let axis_sum = |n: usize, a: f64| -> f64 {
        (0..n)
            .map(|i| Complex64::from_polar(1.0, a * i as f64))
            .sum::<Complex64>()
            .norm()
    };
    axis_sum(config.m_ux(), ax) * axis_sum(config.m_uy(), ay) / config.m_u() as f64
}

/// Grid argmax of [`reflected_pattern`] over candidate angles in
/// `(0, pi)` with the given step. Returns the interior maximum in radians.
///
/// A propagating maximum aligns all element phasors, so the pattern reaches
/// one there. When the commanded in-plane gradient exceeds the carrier
/// wavenumber, no candidate angle aligns the phasors: the sweep either
/// rides up against a grid boundary or never leaves the sidelobe level, and
/// `None` marks the absence of a propagating maximum.
pub fn reflected_pattern_argmax(
    geom: &IncidenceGeometry,
    kappa: f64,
    config: &StmmConfig,
    step_deg: f64,
) -> Option<f64> {
    let step = step_deg.to_radians();
    let n = (PI / step).floor() as usize;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0usize;
    for i in 0..n {
        let theta_c = (i as f64 + 0.5) * step;
        let p = reflected_pattern(geom, kappa, config, theta_c);
        if p > best {
            best = p;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == n - 1 || best < 0.5 {
        None
    } else {
        Some((best_i as f64 + 0.5) * step)
    }
}

/// Monte-Carlo estimate of the time-averaged `|h_u|^2` over realizations of
/// the temporal phase, normalized by `alpha^2` so the coherent bound is
/// `M_u^2`. Returns the mean and its standard error.
pub fn coupling_gain_mc(
    source: &dyn PhaseSource,
    profile: &PhaseProfile,
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    n_trials: usize,
) -> Result<(f64, f64)> {
    let delays = build_delay_map(geom, config);
    let groups = element_groups(geom, config, profile, &delays, |_, _| 0.0);
    monte_carlo_gain(&groups, source, n_trials, TemporalMode::Direct)
}

/// Normalized reflection loss versus uplink bandwidth: for each bandwidth,
/// `10*log10(E[|h_u|^2] / M_u^2)` with the back-reflection profile and the
/// phase source built for that bandwidth (symbol period `2 / B_u`).
pub fn reflection_loss_curve<S, F>(
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    bandwidths: &[f64],
    source_for: F,
    n_trials: usize,
) -> Result<Vec<(f64, f64)>>
where
    S: PhaseSource,
    F: Fn(f64) -> S,
{
    if bandwidths.is_empty() {
        return Err(Error::domain("bandwidth list is empty".to_string()));
    }
    if bandwidths.windows(2).any(|w| w[0] >= w[1]) || bandwidths[0] <= 0.0 {
        return Err(Error::domain(
            "bandwidths must be positive and ascending".to_string(),
        ));
    }
    let profile = backreflection_profile(geom, config);
    let m2 = (config.m_u() as f64).powi(2);
    bandwidths
        .iter()
        .map(|&b| {
            let source = source_for(b);
            let (mean, _) = coupling_gain_mc(&source, &profile, geom, config, n_trials)?;
            Ok((b, 10.0 * (mean / m2).log10()))
        })
        .collect()
}

/// Convenience: a cluster map's center delay lookup for the grouped engine.
pub(crate) fn cluster_delay_lookup<'a>(map: &'a ClusterMap) -> impl Fn(usize, usize) -> f64 + 'a {
    move |q, v| map.center_delays()[map.cluster_of(q, v)]
}

/// Perpendicular-incidence geometry helper used by tests and sweeps.
pub fn boresight(carrier_freq: f64) -> IncidenceGeometry {
    IncidenceGeometry::new(FRAC_PI_2, 0.0, carrier_freq).expect("valid boresight geometry")
}
