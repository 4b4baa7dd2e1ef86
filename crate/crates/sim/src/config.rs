//! Sweep configuration: JSON schema, defaults and validation.
//!
//! The JSON file is strict (unknown keys are rejected) and every field is
//! optional; omitted fields take the reference parameter set below, with a
//! few scenario-dependent grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stmm_core::geometry::{IncidenceGeometry, SPEED_OF_LIGHT};
use stmm_core::linkbudget::{from_db, LinkBudgetParams};
use stmm_core::stmm::StmmConfig;
use stmm_core::waveform::ModulationConfig;

use crate::SimError;

// Reference parameter set.
pub const CARRIER_HZ: f64 = 30e9;
pub const DISTANCE_M: f64 = 100.0;
pub const TX_POWER_DBM: f64 = 20.0;
pub const NOISE_PSD_DBM_HZ: f64 = -173.0;
pub const TOTAL_BANDWIDTH_HZ: f64 = 5e9;
pub const ELEMENTS_PER_AXIS: usize = 100;
pub const N_MU: usize = 16;
pub const M_D: usize = 16;
pub const Q_EXPONENT: f64 = 0.285;
pub const MOD_INDEX: f64 = 1.0;
pub const OVERSAMPLING: f64 = 4.0;
pub const SYMBOLS_PER_TRIAL: usize = 64;
pub const MC_TRIALS: usize = 200;
pub const THETA_DEG: f64 = 30.0;
pub const PHI_DEG: f64 = 0.0;

pub const BU_GRID_HZ: [f64; 9] = [0.1e9, 0.25e9, 0.5e9, 1e9, 1.5e9, 2e9, 3e9, 4e9, 4.5e9];
pub const K_LIST: [usize; 5] = [1, 2, 5, 10, 100];
pub const KAPPA_GRID: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.5, 1.5];
pub const THETA_LIST_DEG: [f64; 5] = [30.0, 45.0, 60.0, 75.0, 90.0];
/// Angle-sweep grid: 10 to 90 degrees in 5 degree steps.
pub fn theta_sweep_deg() -> Vec<f64> {
    (0..17).map(|i| 10.0 + 5.0 * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    ReflectionLoss,
    SeVsBandwidth,
    SeVsAngle,
    Drift,
    OracleCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::ReflectionLoss,
        Scenario::SeVsBandwidth,
        Scenario::SeVsAngle,
        Scenario::Drift,
        Scenario::OracleCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ReflectionLoss => "reflection_loss",
            Scenario::SeVsBandwidth => "se_vs_bandwidth",
            Scenario::SeVsAngle => "se_vs_angle",
            Scenario::Drift => "drift",
            Scenario::OracleCheck => "oracle_check",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                SimError::Config(format!(
                    "unknown scenario `{s}`; expected one of: reflection_loss, \
                     se_vs_bandwidth, se_vs_angle, drift, oracle_check"
                ))
            })
    }
}

/// Raw JSON schema; every field optional, unknown keys rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_list_deg: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_k_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseConfig>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stmm: Option<StmmSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<ModulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StmmSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_ux: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_uy: Option<usize>,
    /// Element pitch in meters; omitted means a quarter wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_exponent: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_mu: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_psd_dbm_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_bandwidth_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplink_bandwidth_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_freq_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mod_index: Option<f64>,
    /// Sample rate as a multiple of the occupied bandwidth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oversampling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols_per_trial: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<f64>,
}

/// Fully materialized configuration with every default applied.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub sweep_values: Vec<f64>,
    pub theta_list_deg: Vec<f64>,
    pub cluster_k_list: Vec<usize>,
    pub mc_trials: usize,
    pub seed: u64,
    pub output_path: Option<String>,
    pub m_ux: usize,
    pub m_uy: usize,
    pub spacing_m: Option<f64>,
    pub q_exponent: f64,
    pub n_mu: usize,
    pub m_d: usize,
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub distance_m: f64,
    pub total_bandwidth_hz: f64,
    pub uplink_bandwidth_hz: f64,
    pub carrier_freq_hz: f64,
    pub mod_index: f64,
    pub oversampling: f64,
    pub symbols_per_trial: usize,
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl SweepConfig {
    /// Applies defaults and validates, with the scenario coming from the
    /// command line; a scenario in the file must agree with it.
    pub fn resolve(&self, scenario: Scenario) -> Result<Resolved, SimError> {
        if let Some(s) = self.scenario {
            if s != scenario {
                return Err(SimError::Config(format!(
                    "scenario: config file says `{s}` but the command line asked for `{scenario}`"
                )));
            }
        }
        let base = self.base.clone().unwrap_or_default();
        let stmm = base.stmm.unwrap_or_default();
        let link = base.link.unwrap_or_default();
        let modulation = base.modulation.unwrap_or_default();
        let geometry = base.geometry.unwrap_or_default();

        let default_elements = match scenario {
            Scenario::OracleCheck => 8,
            _ => ELEMENTS_PER_AXIS,
        };
        let default_uplink = match scenario {
            Scenario::SeVsAngle => 4e9,
            _ => 2e9,
        };
        let sweep_values = self.sweep_values.clone().unwrap_or_else(|| match scenario {
            Scenario::ReflectionLoss | Scenario::SeVsBandwidth => BU_GRID_HZ.to_vec(),
            Scenario::SeVsAngle => theta_sweep_deg(),
            Scenario::Drift => KAPPA_GRID.to_vec(),
            Scenario::OracleCheck => vec![30.0, 60.0, 90.0],
        });
        let resolved = Resolved {
            scenario,
            sweep_values,
            theta_list_deg: self
                .theta_list_deg
                .clone()
                .unwrap_or_else(|| THETA_LIST_DEG.to_vec()),
            cluster_k_list: self
                .cluster_k_list
                .clone()
                .unwrap_or_else(|| K_LIST.to_vec()),
            mc_trials: self.mc_trials.unwrap_or(MC_TRIALS),
            seed: self.seed.unwrap_or(1),
            output_path: self.output_path.clone(),
            m_ux: stmm.m_ux.unwrap_or(default_elements),
            m_uy: stmm.m_uy.unwrap_or(default_elements),
            spacing_m: stmm.spacing_m,
            q_exponent: stmm.q_exponent.unwrap_or(Q_EXPONENT),
            n_mu: link.n_mu.unwrap_or(N_MU),
            m_d: link.m_d.unwrap_or(M_D),
            tx_power_dbm: link.tx_power_dbm.unwrap_or(TX_POWER_DBM),
            noise_psd_dbm_hz: link.noise_psd_dbm_hz.unwrap_or(NOISE_PSD_DBM_HZ),
            distance_m: link.distance_m.unwrap_or(DISTANCE_M),
            total_bandwidth_hz: link.total_bandwidth_hz.unwrap_or(TOTAL_BANDWIDTH_HZ),
            uplink_bandwidth_hz: link.uplink_bandwidth_hz.unwrap_or(default_uplink),
            carrier_freq_hz: link.carrier_freq_hz.unwrap_or(CARRIER_HZ),
            mod_index: modulation.mod_index.unwrap_or(MOD_INDEX),
            oversampling: modulation.oversampling.unwrap_or(OVERSAMPLING),
            symbols_per_trial: modulation.symbols_per_trial.unwrap_or(SYMBOLS_PER_TRIAL),
            theta_deg: geometry.theta_deg.unwrap_or(THETA_DEG),
            phi_deg: geometry.phi_deg.unwrap_or(PHI_DEG),
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

impl Resolved {
    fn validate(&self) -> Result<(), SimError> {
        if self.sweep_values.is_empty() {
            return Err(SimError::Config("sweep_values: must not be empty".into()));
        }
        if self.sweep_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::Config(
                "sweep_values: must be strictly increasing".into(),
            ));
        }
        if self.mc_trials == 0 {
            return Err(SimError::Config("mc_trials: must be at least 1".into()));
        }
        if self.theta_list_deg.is_empty() {
            return Err(SimError::Config("theta_list_deg: must not be empty".into()));
        }
        if self.cluster_k_list.is_empty() {
            return Err(SimError::Config("cluster_k_list: must not be empty".into()));
        }
        if self.scenario == Scenario::OracleCheck && (self.m_ux > 16 || self.m_uy > 16) {
            return Err(SimError::Config(format!(
                "base.stmm: oracle_check is limited to 16x16 elements, got {}x{}",
                self.m_ux, self.m_uy
            )));
        }
        // surface construction at the default cluster split
        self.stmm_config(1)?;
        self.link_params(self.uplink_bandwidth_hz)?;
        self.geom(self.theta_deg)?;
        if matches!(
            self.scenario,
            Scenario::ReflectionLoss | Scenario::SeVsBandwidth
        ) && self.sweep_values[0] <= 0.0
        {
            return Err(SimError::Config(
                "sweep_values: bandwidths must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    pub fn spacing(&self) -> f64 {
        self.spacing_m.unwrap_or(self.wavelength() / 4.0)
    }

    pub fn stmm_config(&self, clusters_per_axis: usize) -> Result<StmmConfig, SimError> {
        StmmConfig::new(
            self.m_ux,
            self.m_uy,
            self.spacing(),
            clusters_per_axis,
            self.q_exponent,
        )
        .map_err(|e| SimError::Config(format!("base.stmm: {e}")))
    }

    pub fn geom(&self, theta_deg: f64) -> Result<IncidenceGeometry, SimError> {
        IncidenceGeometry::from_degrees(theta_deg, self.phi_deg, self.carrier_freq_hz)
            .map_err(|e| SimError::Config(format!("base.geometry: {e}")))
    }

    pub fn link_params(&self, uplink_bandwidth_hz: f64) -> Result<LinkBudgetParams, SimError> {
        LinkBudgetParams::new(
            self.n_mu,
            self.m_d,
            from_db(self.tx_power_dbm) * 1e-3,
            from_db(self.noise_psd_dbm_hz) * 1e-3,
            self.distance_m,
            self.total_bandwidth_hz,
            uplink_bandwidth_hz,
            self.carrier_freq_hz,
        )
        .map_err(|e| SimError::Config(format!("base.link: {e}")))
    }

    pub fn mod_config(&self, bandwidth_hz: f64) -> Result<ModulationConfig, SimError> {
        ModulationConfig::from_bandwidth(self.mod_index, bandwidth_hz, self.oversampling)
            .map_err(|e| SimError::Config(format!("base.modulation: {e}")))
    }
}

/// Parses a config file's JSON text.
pub fn parse_config(text: &str) -> Result<SweepConfig, SimError> {
    serde_json::from_str(text).map_err(|e| SimError::Config(format!("config file: {e}")))
}
