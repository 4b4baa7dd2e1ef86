//! Scenario runners. Every sweep point is an independent job whose random
//! stream derives from (seed, job index), so results are identical for any
//! worker count; rows are assembled in sweep order after the parallel map.

use rayon::prelude::*;
use stmm_core::decoupling::{cluster_partition, residual_coupling_gain_with, DelayConvention};
use stmm_core::geometry::IncidenceGeometry;
use stmm_core::linkbudget::evaluate;
use stmm_core::stmm::{
    backreflection_profile, coupling_gain_mc, drift_angle, normalized_element_gain,
    reflected_pattern_argmax, DriftAngle, StmmConfig,
};
use stmm_core::waveform::CpfskSource;

use crate::config::{Resolved, Scenario};
use crate::SimError;

/// Grid step of the drift-angle pattern search, in degrees.
pub const DRIFT_GRID_STEP_DEG: f64 = 0.02;

/// Mixes the run seed with a job index into an independent stream base.
pub fn job_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn expect_scenario(cfg: &Resolved, want: Scenario) -> Result<(), SimError> {
    if cfg.scenario != want {
        return Err(SimError::Config(format!(
            "scenario: runner for `{want}` got a `{}` configuration",
            cfg.scenario
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// reflection loss
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionLossRow {
    pub b_u_hz: f64,
    pub theta_deg: f64,
    pub loss_db: f64,
}

impl ReflectionLossRow {
    pub const HEADER: [&'static str; 3] = ["B_u_Hz", "theta_deg", "loss_dB"];

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.b_u_hz.to_string(),
            self.theta_deg.to_string(),
            self.loss_db.to_string(),
        ]
    }
}

/// Normalized coupling gain `E[|h_u|^2] / M_u^2` for one (theta, B_u) job.
fn coupling_gain_job(
    cfg: &Resolved,
    theta_deg: f64,
    b_u: f64,
    seed: u64,
) -> Result<(f64, f64), SimError> {
    let geom = cfg.geom(theta_deg)?;
    let config = cfg.stmm_config(1)?;
    let profile = backreflection_profile(&geom, &config);
    let source = CpfskSource::new(cfg.mod_config(b_u)?, cfg.symbols_per_trial, seed);
    let (mean, se) = coupling_gain_mc(&source, &profile, &geom, &config, cfg.mc_trials)?;
    let m2 = (config.m_u() as f64).powi(2);
    Ok((mean / m2, se / m2))
}

/// One row per (B_u, theta) pair: normalized reflection loss in dB.
pub fn run_reflection_loss(cfg: &Resolved) -> Result<Vec<ReflectionLossRow>, SimError> {
    expect_scenario(cfg, Scenario::ReflectionLoss)?;
    let jobs: Vec<(f64, f64)> = cfg
        .sweep_values
        .iter()
        .flat_map(|&b| cfg.theta_list_deg.iter().map(move |&t| (b, t)))
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(idx, &(b_u, theta_deg))| {
            let (gain, _) = coupling_gain_job(cfg, theta_deg, b_u, job_seed(cfg.seed, idx as u64))?;
            Ok(ReflectionLossRow {
                b_u_hz: b_u,
                theta_deg,
                loss_db: 10.0 * gain.log10(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// spectral efficiency sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Ideal,
    Uncompensated,
    Compensated,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Ideal => "ideal",
            Variant::Uncompensated => "uncompensated",
            Variant::Compensated => "compensated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEfficiencyRow {
    /// Sweep coordinate: B_u in Hz or theta in degrees.
    pub sweep: f64,
    /// Cluster count per axis; 0 for the ideal and uncompensated variants.
    pub k: usize,
    pub eta_bits_s_hz: f64,
    pub variant: Variant,
}

impl SpectralEfficiencyRow {
    pub const BANDWIDTH_HEADER: [&'static str; 4] = ["B_u_Hz", "K", "eta_bits_s_Hz", "variant"];
    pub const ANGLE_HEADER: [&'static str; 4] = ["theta_deg", "K", "eta_bits_s_Hz", "variant"];

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.sweep.to_string(),
            self.k.to_string(),
            self.eta_bits_s_hz.to_string(),
            self.variant.name().to_string(),
        ]
    }
}

/// Total spectral efficiency from the normalized coupling gain at one
/// operating point; the element gain enters through the combined
/// reflection factor.
fn eta_from_gain(
    cfg: &Resolved,
    b_u: f64,
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    coupling_gain: f64,
) -> Result<f64, SimError> {
    let params = cfg.link_params(b_u)?;
    let alpha_n = normalized_element_gain(geom, cfg.q_exponent);
    let af = (alpha_n * coupling_gain.max(0.0).sqrt()).min(1.0);
    let symbol_period = 2.0 / b_u;
    Ok(evaluate(&params, af, config.m_u(), symbol_period).eta)
}

/// Monte-Carlo jobs behind the spectral-efficiency sweeps: one uncompensated
/// and one per cluster count, per sweep point. Returns normalized gains.
fn se_gains(
    cfg: &Resolved,
    points: &[(f64, f64)], // (theta_deg, b_u) per sweep point
) -> Result<Vec<(f64, Vec<f64>)>, SimError> {
    let k_list = &cfg.cluster_k_list;
    let per_point = 1 + k_list.len();
    let jobs: Vec<(usize, Option<usize>)> = (0..points.len())
        .flat_map(|p| {
            std::iter::once((p, None)).chain((0..k_list.len()).map(move |ki| (p, Some(ki))))
        })
        .collect();
    let gains: Result<Vec<f64>, SimError> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(p, ki))| {
            let (theta_deg, b_u) = points[p];
            let seed = job_seed(cfg.seed, idx as u64);
            let geom = cfg.geom(theta_deg)?;
            match ki {
                None => {
                    let (gain, _) = coupling_gain_job(cfg, theta_deg, b_u, seed)?;
                    Ok(gain)
                }
                Some(ki) => {
                    let config = cfg.stmm_config(k_list[ki])?;
                    let profile = backreflection_profile(&geom, &config);
                    let map = cluster_partition(&config, &geom);
                    let source =
                        CpfskSource::new(cfg.mod_config(b_u)?, cfg.symbols_per_trial, seed);
                    let (mean, _) = residual_coupling_gain_with(
                        &source,
                        &profile,
                        &geom,
                        &config,
                        &map,
                        cfg.mc_trials,
                        DelayConvention::ClusterCentered,
                    )?;
                    Ok(mean / (config.m_u() as f64).powi(2))
                }
            }
        })
        .collect();
    let gains = gains?;
    Ok((0..points.len())
        .map(|p| {
            let base = p * per_point;
            (gains[base], gains[base + 1..base + per_point].to_vec())
        })
        .collect())
}

fn se_rows(
    cfg: &Resolved,
    points: &[(f64, f64)],
    sweep_of: impl Fn(usize) -> f64,
) -> Result<Vec<SpectralEfficiencyRow>, SimError> {
    let config = cfg.stmm_config(1)?;
    let gains = se_gains(cfg, points)?;
    let mut rows = Vec::with_capacity(points.len() * (2 + cfg.cluster_k_list.len()));
    for (p, &(theta_deg, b_u)) in points.iter().enumerate() {
        let geom = cfg.geom(theta_deg)?;
        let sweep = sweep_of(p);
        rows.push(SpectralEfficiencyRow {
            sweep,
            k: 0,
            eta_bits_s_hz: eta_from_gain(cfg, b_u, &geom, &config, 1.0)?,
            variant: Variant::Ideal,
        });
        rows.push(SpectralEfficiencyRow {
            sweep,
            k: 0,
            eta_bits_s_hz: eta_from_gain(cfg, b_u, &geom, &config, gains[p].0)?,
            variant: Variant::Uncompensated,
        });
        for (ki, &k) in cfg.cluster_k_list.iter().enumerate() {
            rows.push(SpectralEfficiencyRow {
                sweep,
                k,
                eta_bits_s_hz: eta_from_gain(cfg, b_u, &geom, &config, gains[p].1[ki])?,
                variant: Variant::Compensated,
            });
        }
    }
    Ok(rows)
}

/// Spectral efficiency versus uplink bandwidth at the base incidence angle.
pub fn run_se_vs_bandwidth(cfg: &Resolved) -> Result<Vec<SpectralEfficiencyRow>, SimError> {
    expect_scenario(cfg, Scenario::SeVsBandwidth)?;
    let points: Vec<(f64, f64)> = cfg
        .sweep_values
        .iter()
        .map(|&b| (cfg.theta_deg, b))
        .collect();
    se_rows(cfg, &points, |p| points[p].1)
}

/// Spectral efficiency versus incidence angle at the base uplink bandwidth.
pub fn run_se_vs_angle(cfg: &Resolved) -> Result<Vec<SpectralEfficiencyRow>, SimError> {
    expect_scenario(cfg, Scenario::SeVsAngle)?;
    let points: Vec<(f64, f64)> = cfg
        .sweep_values
        .iter()
        .map(|&t| (t, cfg.uplink_bandwidth_hz))
        .collect();
    se_rows(cfg, &points, |p| points[p].0)
}

// ---------------------------------------------------------------------------
// drift
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DriftRow {
    pub theta_deg: f64,
    pub kappa: f64,
    /// Analytic drift angle in degrees, or the `evanescent` marker.
    pub theta_bar: DriftAngle,
    /// Pattern-sweep argmax in degrees; absent for evanescent rows.
    pub argmax_deg: Option<f64>,
}

impl DriftRow {
    pub const HEADER: [&'static str; 4] = [
        "theta_deg",
        "kappa",
        "theta_bar_deg",
        "brute_force_argmax_deg",
    ];

    pub fn fields(&self) -> Vec<String> {
        let theta_bar = match self.theta_bar {
            DriftAngle::Propagating(t) => t.to_degrees().to_string(),
            DriftAngle::Evanescent => "evanescent".to_string(),
        };
        vec![
            self.theta_deg.to_string(),
            self.kappa.to_string(),
            theta_bar,
            self.argmax_deg.map(|a| a.to_string()).unwrap_or_default(),
        ]
    }
}

/// Analytic drift angle next to the pattern-sweep argmax for every
/// (theta, kappa) pair; evanescent pairs carry the marker and no argmax.
pub fn run_drift(cfg: &Resolved) -> Result<Vec<DriftRow>, SimError> {
    expect_scenario(cfg, Scenario::Drift)?;
    let config = cfg.stmm_config(1)?;
    let pairs: Vec<(f64, f64)> = cfg
        .theta_list_deg
        .iter()
        .flat_map(|&t| cfg.sweep_values.iter().map(move |&k| (t, k)))
        .collect();
    pairs
        .par_iter()
        .map(|&(theta_deg, kappa)| {
            let geom = cfg.geom(theta_deg)?;
            let argmax = reflected_pattern_argmax(&geom, kappa, &config, DRIFT_GRID_STEP_DEG)
                .map(|a| a.to_degrees());
            Ok(DriftRow {
                theta_deg,
                kappa,
                theta_bar: drift_angle(geom.theta(), kappa),
                argmax_deg: argmax,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// oracle check
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCaseRow {
    pub theta_deg: f64,
    pub case_seed: u64,
    pub rel_l2_error: f64,
}

impl OracleCaseRow {
    pub const HEADER: [&'static str; 3] = ["theta_deg", "case_seed", "rel_l2_error"];

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.theta_deg.to_string(),
            self.case_seed.to_string(),
            self.rel_l2_error.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub cases: Vec<OracleCaseRow>,
    pub max_rel_l2_error: f64,
    pub pass: bool,
}

/// Tolerance of the closed-form versus brute-force comparison.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
const ORACLE_CASES_PER_ANGLE: usize = 3;

/// Compares the factorized response against the per-element synthesis over
/// a seeded batch; passes when every case stays under [`ORACLE_TOLERANCE`].
pub fn run_oracle_check(cfg: &Resolved) -> Result<OracleReport, SimError> {
    expect_scenario(cfg, Scenario::OracleCheck)?;
    let config = cfg.stmm_config(1)?;
    let jobs: Vec<(f64, u64)> = cfg
        .sweep_values
        .iter()
        .flat_map(|&t| (0..ORACLE_CASES_PER_ANGLE as u64).map(move |c| (t, c)))
        .collect();
    let cases: Result<Vec<OracleCaseRow>, SimError> = jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(theta_deg, _case))| {
            let seed = job_seed(cfg.seed, idx as u64);
            let geom = cfg.geom(theta_deg)?;
            let err = oracle_case_error(cfg, &geom, &config, seed)?;
            Ok(OracleCaseRow {
                theta_deg,
                case_seed: seed,
                rel_l2_error: err,
            })
        })
        .collect();
    let cases = cases?;
    let max = cases.iter().map(|c| c.rel_l2_error).fold(0.0f64, f64::max);
    Ok(OracleReport {
        cases,
        max_rel_l2_error: max,
        pass: max < ORACLE_TOLERANCE,
    })
}

fn oracle_case_error(
    cfg: &Resolved,
    geom: &IncidenceGeometry,
    config: &StmmConfig,
    seed: u64,
) -> Result<f64, SimError> {
    use num_complex::Complex64;
    use stmm_core::channel::{
        path_loss_uplink, synthesize_uplink_oracle, LinkGeometry, OracleOptions,
    };
    use stmm_core::stmm::multiplicative_channel;
    use stmm_core::waveform::PhaseSource;

    let b_u = cfg.uplink_bandwidth_hz;
    // the per-element synthesis needs 8x the total bandwidth
    let mc = stmm_core::waveform::ModulationConfig::from_bandwidth(
        cfg.mod_index,
        b_u,
        cfg.oversampling.max(10.0),
    )
    .map_err(|e| SimError::Config(format!("base.modulation: {e}")))?;
    let gamma = CpfskSource::new(mc, cfg.symbols_per_trial, seed).realize(0);
    let fs = gamma.sample_rate;
    let f_d = b_u / 200.0;
    let s_d: Vec<Complex64> = (0..gamma.len())
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * f_d * i as f64 / fs))
        .collect();
    let link = LinkGeometry::new(cfg.distance_m, cfg.n_mu, cfg.n_mu)
        .map_err(|e| SimError::Config(format!("base.link: {e}")))?;
    let profile = backreflection_profile(geom, config);
    let delays = stmm_core::geometry::build_delay_map(geom, config);
    let oracle = synthesize_uplink_oracle(
        &s_d,
        fs,
        &gamma,
        &profile,
        geom,
        &link,
        config,
        &OracleOptions {
            zero_sd_element_delays: true,
            sd_bandwidth: f_d,
            ..Default::default()
        },
    )?;
    let resp = multiplicative_channel(&gamma, &profile, geom, config, &delays)?;
    let rho = (link.tx_elements as f64).powi(2)
        / path_loss_uplink(link.distance, geom.wavelength()).sqrt();
    let start = resp.start_index;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, h) in resp.h_u.iter().enumerate() {
        let closed = h * rho * s_d[start + i];
        num += (oracle[start + i] - closed).norm_sqr();
        den += closed.norm_sqr();
    }
    Ok((num / den).sqrt())
}
