//! Angle conventions, wavevectors, and excess propagation delays across a
//! planar reflecting array.
//!
//! Angles follow the surface-plane convention: `theta` is measured from the
//! array plane, so `theta = pi/2` is perpendicular (boresight) incidence and
//! grazing arrivals have small `theta`. The direction cosines along the array
//! axes are `cos(theta)*cos(phi)` along x and `cos(theta)*sin(phi)` along y.
//! Element (0,0) is the array phase center; every excess delay is measured
//! against it, and elements with larger indices see the wavefront later.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::stmm::StmmConfig;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Plane-wave arrival description for the monostatic full-duplex setting,
/// where the reflection of interest returns along the arrival direction and
/// the incidence and reflection angles coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceGeometry {
    theta: f64,
    phi: f64,
    carrier_freq: f64,
    wavelength: f64,
}

impl IncidenceGeometry {
    /// Builds a geometry from angles in radians and the carrier frequency.
    ///
    /// `theta` must lie in (0, pi], `phi` in (-pi/2, pi/2].
    pub fn new(theta: f64, phi: f64, carrier_freq: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::domain(format!(
                "theta must be in (0, pi], got {theta}"
            )));
        }
        if !(phi > -FRAC_PI_2 && phi <= FRAC_PI_2) {
            return Err(Error::domain(format!(
                "phi must be in (-pi/2, pi/2], got {phi}"
            )));
        }
        if !(carrier_freq > 0.0 && carrier_freq.is_finite()) {
            return Err(Error::domain(format!(
                "carrier frequency must be positive, got {carrier_freq}"
            )));
        }
        Ok(Self {
            theta,
            phi,
            carrier_freq,
            wavelength: SPEED_OF_LIGHT / carrier_freq,
        })
    }

    /// Same as [`IncidenceGeometry::new`] with angles in degrees.
    pub fn from_degrees(theta_deg: f64, phi_deg: f64, carrier_freq: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians(), carrier_freq)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Direction cosine along the array x-axis: `cos(theta)*cos(phi)`.
    pub fn cos_x(&self) -> f64 {
        self.theta.cos() * self.phi.cos()
    }

    /// Direction cosine along the array y-axis: `cos(theta)*sin(phi)`.
    pub fn cos_y(&self) -> f64 {
        self.theta.cos() * self.phi.sin()
    }

    /// Quarter-wavelength element spacing, the reference pitch of the
    /// reflecting array.
    pub fn quarter_wave_spacing(&self) -> f64 {
        self.wavelength / 4.0
    }
}

/// Cartesian wavevector in rad/m. The array lies in the z = 0 plane;
/// incoming waves have negative z-component, outgoing waves positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevector {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl Wavevector {
    pub fn magnitude(&self) -> f64 {
        (self.kx * self.kx + self.ky * self.ky + self.kz * self.kz).sqrt()
    }

    /// The wavevector of the wave travelling exactly back along this one.
    pub fn reversed(&self) -> Self {
        Self {
            kx: -self.kx,
            ky: -self.ky,
            kz: -self.kz,
        }
    }
}

/// Wavevector of magnitude `2*pi*f/c` for a wave at frequency `f` associated
/// with the direction `(theta, phi)`.
///
/// With `incoming = true` the wave propagates toward the array (negative z);
/// `incoming = false` gives its specular partner leaving the array with the
/// same in-plane components and positive z.
pub fn wavevector(f: f64, theta: f64, phi: f64, incoming: bool) -> Wavevector {
    let k = TAU * f / SPEED_OF_LIGHT;
    let kx = k * theta.cos() * phi.cos();
    let ky = k * theta.cos() * phi.sin();
    let kz = k * theta.sin();
    Wavevector {
        kx,
        ky,
        kz: if incoming { -kz } else { kz },
    }
}

/// Residual of the spatial reflection relation: `(k_o - k_i)` minus the
/// applied surface phase gradient, per in-plane axis. A zero residual means
/// the reflection direction is the one the phase gradient commands.
pub fn snell_residual(
    k_i: &Wavevector,
    k_o: &Wavevector,
    spatial_gradient: (f64, f64),
) -> (f64, f64) {
    (
        (k_o.kx - k_i.kx) - spatial_gradient.0,
        (k_o.ky - k_i.ky) - spatial_gradient.1,
    )
}

/// Surface phase gradient (rad/m per axis) that steers the reflection of a
/// wave arriving from `geom` straight back toward its source, expressed in
/// the sign convention of [`snell_residual`], i.e. it equals `k_o - k_i` for
/// `k_o = -k_i`.
///
/// The per-element back-reflection phase profile increases by
/// `pi*cos(theta)cos(phi)` per quarter-wavelength step; because the profile
/// is applied as a phase advance on a wave whose spatial phase decreases
/// along propagation, the gradient entering the wavevector relation carries
/// the opposite sign.
pub fn backreflection_gradient(geom: &IncidenceGeometry) -> (f64, f64) {
    let k = TAU * geom.carrier_freq() / SPEED_OF_LIGHT;
    (-2.0 * k * geom.cos_x(), -2.0 * k * geom.cos_y())
}

/// Frequency shift commanded by a temporal phase gradient:
/// `f_o - f_i = phase_rate / (2*pi)`.
pub fn frequency_shift(phase_rate: f64) -> f64 {
    phase_rate / TAU
}

/// Excess propagation delay of element `(q, v)` relative to element (0,0):
/// `q*spacing*cos(theta)cos(phi)/c + v*spacing*cos(theta)sin(phi)/c`.
pub fn excess_delay(q: i64, v: i64, geom: &IncidenceGeometry, spacing: f64) -> Result<f64> {
    if q < 0 || v < 0 {
        return Err(Error::domain(format!(
            "element indices must be non-negative, got ({q}, {v})"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::domain(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let dtx = spacing * geom.cos_x() / SPEED_OF_LIGHT;
    let dty = spacing * geom.cos_y() / SPEED_OF_LIGHT;
    Ok(q as f64 * dtx + v as f64 * dty)
}

/// Per-element and per-cluster excess delays for one array/incidence pair.
#[derive(Debug, Clone)]
pub struct DelayMap {
    m_x: usize,
    m_y: usize,
    per_element: Vec<f64>,
    /// Delay step per element index along x.
    pub delta_tau_x: f64,
    /// Delay step per element index along y.
    pub delta_tau_y: f64,
    per_cluster: Vec<f64>,
}

impl DelayMap {
    /// Excess delay of element `(q, v)`.
    pub fn at(&self, q: usize, v: usize) -> f64 {
        self.per_element[q * self.m_y + v]
    }

    /// Excess delays of the geometric cluster centers, in cluster order
    /// (row-major over the cluster grid).
    pub fn per_cluster(&self) -> &[f64] {
        &self.per_cluster
    }

    pub fn per_element(&self) -> &[f64] {
        &self.per_element
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_x, self.m_y)
    }

    /// Largest per-element delay magnitude.
    pub fn max_abs(&self) -> f64 {
        self.per_element.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// Arithmetic-mean element index `(q, v)` of every cluster tile, row-major
/// over the cluster grid.
pub fn cluster_centers(config: &StmmConfig) -> Vec<(f64, f64)> {
    let (kx, ky) = (config.clusters_x(), config.clusters_y());
    let (tx, ty) = (config.tile_x(), config.tile_y());
    let mut centers = Vec::with_capacity(kx * ky);
    for cx in 0..kx {
        for cy in 0..ky {
            let q0 = (cx * tx) as f64;
            let v0 = (cy * ty) as f64;
            centers.push((q0 + (tx as f64 - 1.0) / 2.0, v0 + (ty as f64 - 1.0) / 2.0));
        }
    }
    centers
}

/// Builds all per-element delays for the array together with the delays of
/// the cluster centers relative to the array phase center.
pub fn build_delay_map(geom: &IncidenceGeometry, config: &StmmConfig) -> DelayMap {
    let dtx = config.spacing() * geom.cos_x() / SPEED_OF_LIGHT;
    let dty = config.spacing() * geom.cos_y() / SPEED_OF_LIGHT;
    let (m_x, m_y) = (config.m_ux(), config.m_uy());
    let mut per_element = Vec::with_capacity(m_x * m_y);
    for q in 0..m_x {
        for v in 0..m_y {
            per_element.push(q as f64 * dtx + v as f64 * dty);
        }
    }
    let per_cluster = cluster_centers(config)
        .into_iter()
        .map(|(cq, cv)| cq * dtx + cv * dty)
        .collect();
    DelayMap {
        m_x,
        m_y,
        per_element,
        delta_tau_x: dtx,
        delta_tau_y: dty,
        per_cluster,
    }
}
