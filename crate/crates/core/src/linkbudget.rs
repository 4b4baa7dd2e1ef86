//! SNR bounds, bandwidth split and total unconstrained spectral efficiency
//! of the two-way link.
//!
//! The noise variance at either receiver is taken over the total system
//! bandwidth, `sigma_z^2 = N_0 * B_tot`, matching matched filtering over
//! the full band.

use crate::channel::{path_loss_downlink, path_loss_uplink};
use crate::error::{Error, Result};
use crate::geometry::SPEED_OF_LIGHT;

/// System-level parameters of the two-way link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    /// Elements per terminal array on the transceiver side.
    pub n_mu: usize,
    /// Receive elements at the reflected-side terminal.
    pub m_d: usize,
    /// Transmit signal power in watts.
    pub tx_power: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_psd: f64,
    /// Terminal separation in meters.
    pub distance: f64,
    /// Total system bandwidth in Hz.
    pub total_bandwidth: f64,
    /// Bandwidth assigned to the reflected (uplink) direction, in Hz.
    pub uplink_bandwidth: f64,
    /// Carrier frequency in Hz.
    pub carrier_freq: f64,
}

impl LinkBudgetParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_mu: usize,
        m_d: usize,
        tx_power: f64,
        noise_psd: f64,
        distance: f64,
        total_bandwidth: f64,
        uplink_bandwidth: f64,
        carrier_freq: f64,
    ) -> Result<Self> {
        if n_mu == 0 || m_d == 0 {
            return Err(Error::domain("antenna counts must be positive".to_string()));
        }
        for (name, v) in [
            ("tx_power", tx_power),
            ("noise_psd", noise_psd),
            ("distance", distance),
            ("total_bandwidth", total_bandwidth),
            ("carrier_freq", carrier_freq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=total_bandwidth).contains(&uplink_bandwidth) {
            return Err(Error::domain(format!(
                "uplink bandwidth {uplink_bandwidth} outside [0, {total_bandwidth}]"
            )));
        }
        Ok(Self {
            n_mu,
            m_d,
            tx_power,
            noise_psd,
            distance,
            total_bandwidth,
            uplink_bandwidth,
            carrier_freq,
        })
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Noise variance over the total bandwidth.
    pub fn noise_variance(&self) -> f64 {
        self.noise_psd * self.total_bandwidth
    }

    /// Fraction of the band assigned to the reflected direction.
    pub fn mu_u(&self) -> f64 {
        self.uplink_bandwidth / self.total_bandwidth
    }

    /// Bandwidth left for the direct direction.
    pub fn downlink_bandwidth(&self) -> f64 {
        self.total_bandwidth - self.uplink_bandwidth
    }

    /// Copy with a different uplink bandwidth.
    pub fn with_uplink_bandwidth(&self, uplink_bandwidth: f64) -> Result<Self> {
        Self::new(
            self.n_mu,
            self.m_d,
            self.tx_power,
            self.noise_psd,
            self.distance,
            self.total_bandwidth,
            uplink_bandwidth,
            self.carrier_freq,
        )
    }
}

/// Summary of both link directions at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub snr_down: f64,
    pub snr_up: f64,
    /// Total unconstrained spectral efficiency in bits/s/Hz.
    pub eta: f64,
    pub mu_u: f64,
}

/// Direct-link SNR upper bound: `P * N * M_d / (rho_d * sigma_z^2)`.
pub fn snr_downlink(params: &LinkBudgetParams) -> f64 {
    params.tx_power * (params.n_mu * params.m_d) as f64
        / (path_loss_downlink(params.distance, params.wavelength()) * params.noise_variance())
}

/// Reflected-link SNR upper bound:
/// `P * N^2 * M_u^2 * af^2 * T_u * B_tot / (rho_u * sigma_z^2)`,
/// with the matched-filter gain `T_u * B_tot`.
pub fn snr_uplink(params: &LinkBudgetParams, af_mag: f64, m_u: usize, symbol_period: f64) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&af_mag));
    let n2 = (params.n_mu as f64).powi(2);
    let m2 = (m_u as f64).powi(2);
    params.tx_power * n2 * m2 * af_mag * af_mag * symbol_period * params.total_bandwidth
        / (path_loss_uplink(params.distance, params.wavelength()) * params.noise_variance())
}

/// Total unconstrained spectral efficiency:
/// `mu_u * log2(1 + SNR_u) + (1 - mu_u) * log2(1 + SNR_d)`.
pub fn spectral_efficiency(params: &LinkBudgetParams, snr_up: f64, snr_down: f64) -> f64 {
    let mu = params.mu_u();
    mu * (1.0 + snr_up).log2() + (1.0 - mu) * (1.0 + snr_down).log2()
}

/// Evaluates both bounds and the spectral efficiency at one operating
/// point. `af_mag` carries the combined element-gain and coupling factor.
pub fn evaluate(
    params: &LinkBudgetParams,
    af_mag: f64,
    m_u: usize,
    symbol_period: f64,
) -> LinkMetrics {
    let snr_down = snr_downlink(params);
    let snr_up = snr_uplink(params, af_mag, m_u, symbol_period);
    LinkMetrics {
        snr_down,
        snr_up,
        eta: spectral_efficiency(params, snr_up, snr_down),
        mu_u: params.mu_u(),
    }
}

/// Power ratio to decibels.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decibels to power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
