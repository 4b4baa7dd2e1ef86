//! Temporal phase signals applied at the reflecting surface: CP-FSK bursts,
//! pure tones, delayed evaluation, Taylor residuals and occupied bandwidth.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{Error, Result};

/// CP-FSK modulation parameters. The occupied bandwidth convention is
/// `bandwidth = 2 / symbol_period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationConfig {
    /// Modulation index h.
    pub mod_index: f64,
    /// Symbol period T_u in seconds.
    pub symbol_period: f64,
    /// Occupied bandwidth B_u = 2 / T_u in Hz.
    pub bandwidth: f64,
    /// Sample rate in Hz, at least 4x the bandwidth.
    pub sample_rate: f64,
}

impl ModulationConfig {
    pub fn new(mod_index: f64, symbol_period: f64, sample_rate: f64) -> Result<Self> {
        if !(symbol_period > 0.0 && symbol_period.is_finite()) {
            return Err(Error::config(format!(
                "symbol_period must be positive, got {symbol_period}"
            )));
        }
        let bandwidth = 2.0 / symbol_period;
        Self::validated(mod_index, symbol_period, bandwidth, sample_rate)
    }

    /// Builds the configuration from the occupied bandwidth, with the sample
    /// rate expressed as a multiple of it.
    pub fn from_bandwidth(mod_index: f64, bandwidth: f64, oversampling: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::config(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Self::validated(
            mod_index,
            2.0 / bandwidth,
            bandwidth,
            oversampling * bandwidth,
        )
    }

    fn validated(
        mod_index: f64,
        symbol_period: f64,
        bandwidth: f64,
        sample_rate: f64,
    ) -> Result<Self> {
        if !(mod_index > 0.0 && mod_index.is_finite()) {
            return Err(Error::config(format!(
                "mod_index must be positive, got {mod_index}"
            )));
        }
        if (bandwidth * symbol_period - 2.0).abs() > 1e-12 {
            return Err(Error::config(
                "bandwidth and symbol_period must satisfy B*T = 2".to_string(),
            ));
        }
        if sample_rate < 4.0 * bandwidth * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "sample_rate {sample_rate} is below 4x bandwidth {bandwidth}"
            )));
        }
        Ok(Self {
            mod_index,
            symbol_period,
            bandwidth,
            sample_rate,
        })
    }
}

/// A sampled temporal phase together with its time derivative.
///
/// Evaluation between samples uses linear interpolation, which is exact for
/// the piecewise-linear CP-FSK phase away from symbol boundaries.
#[derive(Debug, Clone)]
pub struct PhaseSignal {
    /// Phase samples in radians.
    pub samples: Vec<f64>,
    /// Derivative samples in rad/s.
    pub derivative: Vec<f64>,
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Time of the first sample in seconds.
    pub t0: f64,
    /// Symbol period when the signal is symbol-structured.
    pub symbol_period: Option<f64>,
    /// Nominal occupied bandwidth, when known, used for rate checks.
    pub nominal_bandwidth: Option<f64>,
}

impl PhaseSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.t0 + (self.samples.len().saturating_sub(1)) as f64 / self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.t0
    }

    fn check_support(&self, t: f64) -> Result<()> {
        let slack = 1e-9 / self.sample_rate;
        if t < self.t0 - slack || t > self.end_time() + slack {
            return Err(Error::domain(format!(
                "t = {t} outside signal support [{}, {}]",
                self.t0,
                self.end_time()
            )));
        }
        Ok(())
    }

    #[inline]
    fn sample_lin(xs: &[f64], pos: f64) -> f64 {
        let max = (xs.len() - 1) as f64;
        let p = pos.clamp(0.0, max);
        let i = p as usize;
        let i2 = (i + 1).min(xs.len() - 1);
        let frac = p - i as f64;
        xs[i] * (1.0 - frac) + xs[i2] * frac
    }

    /// Phase at time `t`; errors outside the sampled support.
    pub fn phase_at(&self, t: f64) -> Result<f64> {
        self.check_support(t)?;
        Ok(self.phase_at_clamped(t))
    }

    /// Derivative at time `t`; errors outside the sampled support.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        self.check_support(t)?;
        Ok(self.rate_at_clamped(t))
    }

    /// Phase at `t`, clamping to the boundary samples outside the support.
    /// Hot-loop variant for callers that pre-trim their evaluation window.
    #[inline]
    pub fn phase_at_clamped(&self, t: f64) -> f64 {
        Self::sample_lin(&self.samples, (t - self.t0) * self.sample_rate)
    }

    /// Derivative counterpart of [`PhaseSignal::phase_at_clamped`].
    #[inline]
    pub fn rate_at_clamped(&self, t: f64) -> f64 {
        Self::sample_lin(&self.derivative, (t - self.t0) * self.sample_rate)
    }

    /// Writes the signal as `time_s,phase_rad` CSV rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "time_s,phase_rad")?;
        for (i, s) in self.samples.iter().enumerate() {
            let t = self.t0 + i as f64 / self.sample_rate;
            writeln!(w, "{t},{s}")?;
        }
        Ok(())
    }
}

/// CP-FSK phase for a binary symbol sequence: a continuous piecewise-linear
/// ramp with slope `±pi*h/T` driven by the symbols, starting at phase 0.
pub fn cpfsk_phase(symbols: &[i8], config: &ModulationConfig) -> Result<PhaseSignal> {
    if symbols.is_empty() {
        return Err(Error::domain("symbol sequence is empty".to_string()));
    }
    if let Some(bad) = symbols.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::domain(format!(
            "symbols must be +1 or -1, got {bad}"
        )));
    }
    let h = config.mod_index;
    let t_sym = config.symbol_period;
    let fs = config.sample_rate;
    // cumulative symbol sums: phase at the k-th boundary is pi*h*prefix[k]
    let mut prefix = Vec::with_capacity(symbols.len() + 1);
    prefix.push(0.0f64);
    for &s in symbols {
        prefix.push(prefix.last().unwrap() + s as f64);
    }
    let duration = symbols.len() as f64 * t_sym;
    let n = (duration * fs).round() as usize + 1;
    let mut samples = Vec::with_capacity(n);
    let mut derivative = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / fs;
        let k = ((t / t_sym) as usize).min(symbols.len() - 1);
        let frac = (t - k as f64 * t_sym) / t_sym;
        let a = symbols[k] as f64;
        samples.push(std::f64::consts::PI * h * (prefix[k] + a * frac.min(1.0)));
        derivative.push(std::f64::consts::PI * h * a / t_sym);
    }
    Ok(PhaseSignal {
        samples,
        derivative,
        sample_rate: fs,
        t0: 0.0,
        symbol_period: Some(t_sym),
        nominal_bandwidth: Some(config.bandwidth),
    })
}

/// Linear phase `2*pi*f_s*t` over `[0, duration]`.
pub fn tone_phase(f_s: f64, duration: f64, sample_rate: f64) -> Result<PhaseSignal> {
    if f_s != 0.0 && sample_rate < 4.0 * f_s.abs() {
        return Err(Error::config(format!(
            "sample_rate {sample_rate} below 4x tone frequency {f_s}"
        )));
    }
    if !(duration > 0.0 && sample_rate > 0.0) {
        return Err(Error::domain(
            "duration and sample_rate must be positive".to_string(),
        ));
    }
    let n = (duration * sample_rate).ceil() as usize + 1;
    let rate = std::f64::consts::TAU * f_s;
    let samples = (0..n).map(|i| rate * i as f64 / sample_rate).collect();
    let derivative = vec![rate; n];
    Ok(PhaseSignal {
        samples,
        derivative,
        sample_rate,
        t0: 0.0,
        symbol_period: None,
        nominal_bandwidth: Some(f_s.abs()),
    })
}

/// First-order expansion residual
/// `gamma(t0 - dt) - [gamma(t0) - gamma'(t0)*dt]`, quantifying how far the
/// phase is from its linearization around `t0`.
pub fn taylor_residual(gamma: &PhaseSignal, t0: f64, delta_tau: f64) -> Result<f64> {
    let delayed = gamma.phase_at(t0 - delta_tau)?;
    let value = gamma.phase_at(t0)?;
    let rate = gamma.rate_at(t0)?;
    Ok(delayed - (value - rate * delta_tau))
}

/// Occupied-bandwidth measurement result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupiedBandwidth {
    /// Smallest symmetric bandwidth around the spectral centroid holding the
    /// requested energy fraction, in Hz.
    pub bandwidth: f64,
    /// Set when the record is shorter than 16 symbols and the estimate is
    /// therefore coarse.
    pub short_record: bool,
}

/// Measures the bandwidth of `exp(j*gamma)` holding `fraction` of the signal
/// energy, symmetric around the power-spectrum centroid. A rectangular
/// window over the full record is used; `fraction = 1` returns the full
/// sampled band.
pub fn occupied_bandwidth(gamma: &PhaseSignal, fraction: f64) -> Result<OccupiedBandwidth> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::domain(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    let short_record = match gamma.symbol_period {
        Some(t) => gamma.duration() < 16.0 * t,
        None => false,
    };
    if fraction == 1.0 {
        return Ok(OccupiedBandwidth {
            bandwidth: gamma.sample_rate,
            short_record,
        });
    }
    let n = gamma.samples.len();
    let mut buf: Vec<Complex64> = gamma
        .samples
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();
    let freq = |i: usize| -> f64 {
        // FFT bin frequency with the upper half mapped to negative values
        let k = if i <= n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        };
        k * gamma.sample_rate / n as f64
    };
    let total: f64 = power.iter().sum();
    let centroid = power
        .iter()
        .enumerate()
        .map(|(i, p)| freq(i) * p)
        .sum::<f64>()
        / total;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let da = (freq(a) - centroid).abs();
        let db = (freq(b) - centroid).abs();
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });
    let mut acc = 0.0;
    let mut half_width = 0.0f64;
    for &i in &order {
        acc += power[i];
        half_width = half_width.max((freq(i) - centroid).abs());
        if acc >= fraction * total {
            break;
        }
    }
    Ok(OccupiedBandwidth {
        bandwidth: 2.0 * half_width,
        short_record,
    })
}

/// A reproducible source of phase-signal realizations for Monte-Carlo runs.
/// Realizations are indexed by trial so schedules cannot change results.
pub trait PhaseSource: Sync {
    fn realize(&self, trial: u64) -> PhaseSignal;
}

/// Equiprobable i.i.d. binary CP-FSK bursts, seeded per trial.
#[derive(Debug, Clone)]
pub struct CpfskSource {
    pub config: ModulationConfig,
    pub n_symbols: usize,
    pub base_seed: u64,
}

impl CpfskSource {
    pub fn new(config: ModulationConfig, n_symbols: usize, base_seed: u64) -> Self {
        Self {
            config,
            n_symbols,
            base_seed,
        }
    }
}

impl PhaseSource for CpfskSource {
    fn realize(&self, trial: u64) -> PhaseSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed.wrapping_add(trial));
        let symbols: Vec<i8> = (0..self.n_symbols)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        cpfsk_phase(&symbols, &self.config).expect("valid symbols by construction")
    }
}

/// Degenerate source holding the phase constant; its response is the
/// coherent reference in coupling measurements.
#[derive(Debug, Clone)]
pub struct ConstSource {
    pub value: f64,
    pub duration: f64,
    pub sample_rate: f64,
}

impl PhaseSource for ConstSource {
    fn realize(&self, _trial: u64) -> PhaseSignal {
        let n = (self.duration * self.sample_rate).ceil() as usize + 1;
        PhaseSignal {
            samples: vec![self.value; n],
            derivative: vec![0.0; n],
            sample_rate: self.sample_rate,
            t0: 0.0,
            symbol_period: None,
            nominal_bandwidth: Some(0.0),
        }
    }
}
