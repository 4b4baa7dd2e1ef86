//! Cluster-based channel realizations, the two path-loss laws, and the
//! brute-force time-domain synthesis used as the oracle for the closed-form
//! reflection response.
//!
//! Beamforming is abstracted: with precoders and combiners perfectly
//! aligned the array gains enter as scalars, and the round-trip scaling of
//! the reflected link is `rho = N^2 * xi_fwd * xi_bwd / sqrt(rho_u)`.
//! Synthesized outputs are receiver-aligned: the bulk propagation delay and
//! its carrier phase are removed, per-element excess effects are kept.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_delay_map, IncidenceGeometry, SPEED_OF_LIGHT};
use crate::stmm::{reflection_amplitude, PhaseProfile, StmmConfig};
use crate::waveform::PhaseSignal;

/// One propagation path: complex scattering amplitude, absolute delay and
/// the mean power it was drawn from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathGain {
    pub amplitude: Complex64,
    pub delay: f64,
    pub power: f64,
}

/// A drawn multipath realization with per-path, per-element excess delays
/// at the transmit and receive arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub paths: Vec<PathGain>,
    /// `tx_excess[p][n]`: excess delay of transmit element `n` on path `p`.
    pub tx_excess: Vec<Vec<f64>>,
    /// `rx_excess[p][m]`: excess delay of receive element `m` on path `p`.
    pub rx_excess: Vec<Vec<f64>>,
}

impl ChannelRealization {
    /// Sum of the squared path-amplitude magnitudes; its expectation is 1.
    pub fn path_energy(&self) -> f64 {
        self.paths.iter().map(|p| p.amplitude.norm_sqr()).sum()
    }
}

/// End-to-end link geometry between the two terminals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub distance: f64,
    pub tx_elements: usize,
    pub rx_elements: usize,
    /// Bulk propagation delay `distance / c`.
    pub tau: f64,
}

impl LinkGeometry {
    pub fn new(distance: f64, tx_elements: usize, rx_elements: usize) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::domain(format!(
                "distance must be positive, got {distance}"
            )));
        }
        if tx_elements == 0 || rx_elements == 0 {
            return Err(Error::domain("element counts must be positive".to_string()));
        }
        Ok(Self {
            distance,
            tx_elements,
            rx_elements,
            tau: distance / SPEED_OF_LIGHT,
        })
    }
}

/// Serializable regression fixture: seed, geometry and the drawn paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFixture {
    pub seed: u64,
    pub link: LinkGeometry,
    pub realization: ChannelRealization,
}

/// One-way power path loss of the direct link: `2^4 * pi * D^2 / lambda^2`.
pub fn path_loss_downlink(distance: f64, wavelength: f64) -> f64 {
    debug_assert!(distance > 0.0 && wavelength > 0.0);
    16.0 * std::f64::consts::PI * distance * distance / (wavelength * wavelength)
}

/// Round-trip power path loss of the reflected link:
/// `2^12 * pi * D^4 / lambda^4`.
pub fn path_loss_uplink(distance: f64, wavelength: f64) -> f64 {
    debug_assert!(distance > 0.0 && wavelength > 0.0);
    4096.0 * std::f64::consts::PI * distance.powi(4) / wavelength.powi(4)
}

/// Draws a multipath realization: complex Gaussian path amplitudes with the
/// given power profile, the first path at the bulk delay and later paths
/// spread uniformly over `delay_spread` beyond it, and per-element excess
/// delays from half-wavelength linear arrays at random path angles.
pub fn sample_channel(
    link: &LinkGeometry,
    power_profile: &[f64],
    wavelength: f64,
    delay_spread: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    if power_profile.is_empty() {
        return Err(Error::domain("power profile is empty".to_string()));
    }
    if power_profile.iter().any(|&p| p < 0.0) {
        return Err(Error::domain(
            "path powers must be non-negative".to_string(),
        ));
    }
    let total: f64 = power_profile.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "path powers must sum to 1, got {total}"
        )));
    }
    if delay_spread < 0.0 {
        return Err(Error::domain(
            "delay spread must be non-negative".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = Uniform::new(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
        .expect("valid range");
    let half_wave = wavelength / 2.0;
    let mut paths = Vec::with_capacity(power_profile.len());
    let mut tx_excess = Vec::with_capacity(power_profile.len());
    let mut rx_excess = Vec::with_capacity(power_profile.len());
    for (p, &power) in power_profile.iter().enumerate() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let amplitude = Complex64::new(re, im) * (power / 2.0).sqrt();
        let extra = if p == 0 {
            0.0
        } else {
            angle.sample(&mut rng).abs() / std::f64::consts::FRAC_PI_2 * delay_spread
        };
        let tx_angle = angle.sample(&mut rng);
        let rx_angle = angle.sample(&mut rng);
        tx_excess.push(
            (0..link.tx_elements)
                .map(|n| n as f64 * half_wave * tx_angle.sin() / SPEED_OF_LIGHT)
                .collect(),
        );
        rx_excess.push(
            (0..link.rx_elements)
                .map(|m| m as f64 * half_wave * rx_angle.sin() / SPEED_OF_LIGHT)
                .collect(),
        );
        paths.push(PathGain {
            amplitude,
            delay: link.tau + extra,
            power,
        });
    }
    Ok(ChannelRealization {
        paths,
        tx_excess,
        rx_excess,
    })
}

/// Band-limited fractional delay (windowed-sinc, 16 taps). Integer delays
/// reproduce exact shifts; samples beyond the record are treated as zero.
pub fn fractional_delay(x: &[Complex64], delay_samples: f64) -> Vec<Complex64> {
    const HALF: i64 = 8;
    let whole = delay_samples.floor();
    let frac = delay_samples - whole;
    let whole = whole as i64;
    if frac == 0.0 {
        // pure integer shift
        return (0..x.len() as i64)
            .map(|n| {
                let i = n - whole;
                if i >= 0 && (i as usize) < x.len() {
                    x[i as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
    }
    // taps of an ideal delay by `frac`, Hann-windowed over 2*HALF points
    let mut taps = [0.0f64; (2 * HALF) as usize];
    let mut norm = 0.0;
    for (j, tap) in taps.iter_mut().enumerate() {
        let k = j as i64 - (HALF - 1);
        let arg = k as f64 - frac;
        let sinc = if arg == 0.0 {
            1.0
        } else {
            (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
        };
        let win = 0.5
            * (1.0
                + (std::f64::consts::PI * (j as f64 - (HALF as f64 - 1.0 + frac)) / HALF as f64)
                    .cos());
        *tap = sinc * win.max(0.0);
        norm += *tap;
    }
    for tap in taps.iter_mut() {
        *tap /= norm;
    }
    (0..x.len() as i64)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &tap) in taps.iter().enumerate() {
                let k = j as i64 - (HALF - 1);
                let i = n - whole - k;
                if i >= 0 && (i as usize) < x.len() {
                    acc += x[i as usize] * tap;
                }
            }
            acc
        })
        .collect()
}

/// Receiver-aligned direct-link synthesis:
/// `y[n] = sqrt(N*M) / sqrt(rho_d) * sum_p xi_p * s(t_n - (tau_p - tau))`.
/// Path delays are applied relative to the bulk delay; noise is added by
/// the caller.
pub fn synthesize_downlink(
    s_d: &[Complex64],
    realization: &ChannelRealization,
    link: &LinkGeometry,
    wavelength: f64,
    sample_rate: f64,
) -> Vec<Complex64> {
    let gain = ((link.tx_elements * link.rx_elements) as f64).sqrt()
        / path_loss_downlink(link.distance, wavelength).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); s_d.len()];
    for path in &realization.paths {
        let rel = (path.delay - link.tau) * sample_rate;
        let shifted = fractional_delay(s_d, rel);
        for (o, s) in out.iter_mut().zip(shifted.iter()) {
            *o += path.amplitude * s;
        }
    }
    for o in out.iter_mut() {
        *o *= gain;
    }
    out
}

/// Adds circular complex Gaussian noise of variance `noise_psd * bandwidth`
/// per sample. A zero power spectral density returns the input unchanged.
pub fn add_awgn(
    samples: &[Complex64],
    noise_psd: f64,
    bandwidth: f64,
    seed: u64,
) -> Vec<Complex64> {
    debug_assert!(bandwidth > 0.0);
    let variance = noise_psd * bandwidth;
    if variance == 0.0 {
        return samples.to_vec();
    }
    let sigma = (variance / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    samples
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            s + Complex64::new(re * sigma, im * sigma)
        })
        .collect()
}

/// Options for the brute-force reflected-link synthesis.
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Drop the per-element delays of the information signal (they are far
    /// below its inverse bandwidth); the temporal phase keeps its exact
    /// per-element delays either way.
    pub zero_sd_element_delays: bool,
    /// Bandwidth of the information signal, for the oversampling check.
    pub sd_bandwidth: f64,
    /// Scattering amplitude of the forward hop (unit magnitude by default).
    pub xi_forward: Complex64,
    /// Scattering amplitude of the backward hop.
    pub xi_backward: Complex64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            zero_sd_element_delays: false,
            sd_bandwidth: 0.0,
            xi_forward: Complex64::new(1.0, 0.0),
            xi_backward: Complex64::new(1.0, 0.0),
        }
    }
}

/// Brute-force synthesis of the back-reflected signal by explicit
/// per-element summation: every element applies its profile phase and the
/// temporal phase at its own arrival time, the two-way carrier phase of its
/// excess path, and (unless disabled) a band-limited fractional delay of
/// the information signal.
///
/// Output sample `n` is aligned with input sample `n` (bulk delay removed);
/// edge samples use clamped phase evaluation and zero-padded signal
/// history, so comparisons should trim a guard window.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_uplink_oracle(
    s_d: &[Complex64],
    sample_rate: f64,
    gamma: &PhaseSignal,
    profile: &PhaseProfile,
    geom: &IncidenceGeometry,
    link: &LinkGeometry,
    config: &StmmConfig,
    opts: &OracleOptions,
) -> Result<Vec<Complex64>> {
    if ((sample_rate - gamma.sample_rate) / sample_rate).abs() > 1e-9 {
        return Err(Error::config(format!(
            "signal rate {sample_rate} and phase rate {} must match",
            gamma.sample_rate
        )));
    }
    let b_tot = gamma.nominal_bandwidth.unwrap_or(0.0) + opts.sd_bandwidth;
    if sample_rate < 8.0 * b_tot * (1.0 - 1e-12) {
        return Err(Error::config(format!(
            "sample rate {sample_rate} below 8x the total bandwidth {b_tot}"
        )));
    }
    if profile.dims() != (config.m_ux(), config.m_uy()) {
        return Err(Error::domain(
            "profile does not match the array size".to_string(),
        ));
    }
    let rho = opts.xi_forward * opts.xi_backward * (link.tx_elements as f64).powi(2)
        / path_loss_uplink(link.distance, geom.wavelength()).sqrt();
    let alpha = reflection_amplitude(geom, config.q_exponent());
    let delays = build_delay_map(geom, config);
    let two_way = 2.0 * std::f64::consts::TAU * geom.carrier_freq();
    let mut out = vec![Complex64::new(0.0, 0.0); s_d.len()];
    for q in 0..config.m_ux() {
        for v in 0..config.m_uy() {
            let d = delays.at(q, v);
            let static_phase = profile.at(q, v) - two_way * d;
            let element_gain = Complex64::from_polar(1.0, static_phase);
            let delayed;
            let sd_e: &[Complex64] = if opts.zero_sd_element_delays {
                s_d
            } else {
                delayed = fractional_delay(s_d, 2.0 * d * sample_rate);
                &delayed
            };
            for (n, o) in out.iter_mut().enumerate() {
                let t = gamma.t0 + n as f64 / sample_rate;
                let g = gamma.phase_at_clamped(t - d);
                *o += element_gain * Complex64::from_polar(1.0, g) * sd_e[n];
            }
        }
    }
    let scale = rho * alpha;
    for o in out.iter_mut() {
        *o *= scale;
    }
    Ok(out)
}
