//! Sweep harness for the back-reflection link simulator: strict JSON
//! configuration, seeded parallel scenario runners and deterministic CSV
//! emission.

pub mod config;
pub mod output;
pub mod scenarios;

use thiserror::Error;

/// Harness-level errors, mapped to the process exit codes by the CLI.
#[derive(Debug, Error)]
pub enum SimError {
    /// Invalid or inconsistent configuration (exit code 2).
    #[error("config error: {0}")]
    Config(String),
    /// The closed-form response failed its brute-force check (exit code 3).
    #[error("oracle check failed: max relative L2 error {0}")]
    OracleFailed(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<stmm_core::Error> for SimError {
    fn from(e: stmm_core::Error) -> Self {
        SimError::Config(e.to_string())
    }
}

impl SimError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::OracleFailed(_) => 3,
            SimError::Io(_) | SimError::Csv(_) => 1,
        }
    }
}

/// Runs a scenario and renders its CSV bytes. The oracle scenario returns
/// its rows even when failing; the caller decides the exit path.
pub fn run_to_csv(cfg: &config::Resolved) -> Result<(Vec<u8>, Option<SimError>), SimError> {
    use config::Scenario;
    match cfg.scenario {
        Scenario::ReflectionLoss => {
            let rows = scenarios::run_reflection_loss(cfg)?;
            let bytes = output::csv_bytes(
                &scenarios::ReflectionLossRow::HEADER,
                rows.iter().map(|r| r.fields()),
            )?;
            Ok((bytes, None))
        }
        Scenario::SeVsBandwidth => {
            let rows = scenarios::run_se_vs_bandwidth(cfg)?;
            let bytes = output::csv_bytes(
                &scenarios::SpectralEfficiencyRow::BANDWIDTH_HEADER,
                rows.iter().map(|r| r.fields()),
            )?;
            Ok((bytes, None))
        }
        Scenario::SeVsAngle => {
            let rows = scenarios::run_se_vs_angle(cfg)?;
            let bytes = output::csv_bytes(
                &scenarios::SpectralEfficiencyRow::ANGLE_HEADER,
                rows.iter().map(|r| r.fields()),
            )?;
            Ok((bytes, None))
        }
        Scenario::Drift => {
            let rows = scenarios::run_drift(cfg)?;
            let bytes = output::csv_bytes(
                &scenarios::DriftRow::HEADER,
                rows.iter().map(|r| r.fields()),
            )?;
            Ok((bytes, None))
        }
        Scenario::OracleCheck => {
            let report = scenarios::run_oracle_check(cfg)?;
            let bytes = output::csv_bytes(
                &scenarios::OracleCaseRow::HEADER,
                report.cases.iter().map(|r| r.fields()),
            )?;
            let failure = (!report.pass).then_some(SimError::OracleFailed(report.max_rel_l2_error));
            Ok((bytes, failure))
        }
    }
}
