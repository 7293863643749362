//! Problem parameterization, relativistic dispersion and energy zones.

use crate::error::{Result, TunnelError};

/// Relative width (in units of `m`) of the band around `E = V₀ ± m`
/// classified as [`Zone::Edge`].
pub const EDGE_TOLERANCE: f64 = 1e-9;

/// A rectangular barrier of height `V₀` and width `L` seen by a particle of
/// mass `m`. Natural units, `c = ħ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConfig {
    mass: f64,
    height: f64,
    width: f64,
}

impl BarrierConfig {
    pub fn new(mass: f64, height: f64, width: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(TunnelError::Domain(format!("mass must be > 0, got {mass}")));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(TunnelError::Domain(format!(
                "barrier height must be > 0, got {height}"
            )));
        }
        if !(width.is_finite() && width >= 0.0) {
            return Err(TunnelError::Domain(format!(
                "barrier width must be >= 0, got {width}"
            )));
        }
        Ok(Self {
            mass,
            height,
            width,
        })
    }

    /// Builds the barrier from `υ = V₀/m` and `wL`, with `m = 1` so that
    /// absolute times come out in units of `1/m`.
    pub fn from_dimensionless(upsilon: f64, wl: f64) -> Result<Self> {
        if !(upsilon.is_finite() && upsilon > 0.0) {
            return Err(TunnelError::Domain(format!(
                "upsilon must be > 0, got {upsilon}"
            )));
        }
        if !(wl.is_finite() && wl >= 0.0) {
            return Err(TunnelError::Domain(format!("wL must be >= 0, got {wl}")));
        }
        let w = (2.0 * upsilon).sqrt();
        Self::new(1.0, upsilon, wl / w)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// `w = √(2 m V₀)`.
    pub fn w(&self) -> f64 {
        (2.0 * self.mass * self.height).sqrt()
    }

    /// `υ = V₀/m`.
    pub fn upsilon(&self) -> f64 {
        self.height / self.mass
    }

    pub fn wl(&self) -> f64 {
        self.w() * self.width
    }

    /// Same barrier, different width.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.mass, self.height, width)
    }

    /// Open tunneling zone in `n²`: `(max(0, υ/2 − 1), υ/2 + 1)`.
    pub fn tunneling_nsq_range(&self) -> (f64, f64) {
        let half = 0.5 * self.upsilon();
        ((half - 1.0).max(0.0), half + 1.0)
    }

    /// `n²` at which `E = V₀`; `None` when `V₀ ≤ m` (the incident particle
    /// always has `E > m ≥ V₀`).
    pub fn nsq_at_barrier_energy(&self) -> Option<f64> {
        let u = self.upsilon();
        (u > 1.0).then(|| (u * u - 1.0) / (2.0 * u))
    }

    /// Total energy `E = m √(1 + 2 n² υ)`.
    pub fn energy(&self, nsq: f64) -> f64 {
        self.mass * (1.0 + 2.0 * nsq * self.upsilon()).sqrt()
    }
}

/// Energy zones of the Klein-Gordon barrier problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    /// `E < V₀ − m`: oscillatory interior (particle/antiparticle).
    Klein,
    /// `V₀ − m < E < V₀ + m`: evanescent interior.
    Tunneling,
    /// `E > V₀ + m`: oscillatory interior, ordinary over-barrier scattering.
    AboveBarrier,
    /// `|E − V₀| = m` within [`EDGE_TOLERANCE`].
    Edge,
}

/// One incident energy and the wavenumbers it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    pub nsq: f64,
    /// `k = w n`
    pub k: f64,
    pub energy: f64,
    /// Dimensionless `ρ(n)² = ρ(k)²/w²`. Negative outside the tunneling
    /// zone, where the interior wavenumber is real; clamped to 0 on an edge.
    pub rho_sq: f64,
    pub zone: Zone,
}

impl EnergyPoint {
    pub fn n(&self) -> f64 {
        self.nsq.sqrt()
    }

    /// Dimensionless evanescent wavenumber `ρ(n)`; 0 outside the zone.
    pub fn rho(&self) -> f64 {
        self.rho_sq.max(0.0).sqrt()
    }

    /// `√(1 + 2 n² υ) = E/m`.
    pub fn energy_ratio(&self, cfg: &BarrierConfig) -> f64 {
        self.energy / cfg.mass()
    }

    pub fn is_evanescent(&self) -> bool {
        matches!(self.zone, Zone::Tunneling | Zone::Edge)
    }
}

pub fn derive_point(cfg: &BarrierConfig, nsq: f64) -> Result<EnergyPoint> {
    if !(nsq.is_finite() && nsq > 0.0) {
        return Err(TunnelError::Domain(format!("nsq must be > 0, got {nsq}")));
    }
    let u = cfg.upsilon();
    let s = (1.0 + 2.0 * nsq * u).sqrt();
    let energy = cfg.mass() * s;
    let k = cfg.w() * nsq.sqrt();
    // ρ(k)² = m² − (E − V₀)² = (m − E + V₀)(m + E − V₀), divided by w².
    // m − E + V₀ = m υ (1 − 2n²/(s + 1)) avoids the s − 1 cancellation.
    let rho_sq = 0.5 * (1.0 - 2.0 * nsq / (s + 1.0)) * (1.0 + s - u);
    let zone = zone_of(cfg, energy);
    let rho_sq = if zone == Zone::Edge {
        rho_sq.max(0.0)
    } else {
        rho_sq
    };
    Ok(EnergyPoint {
        nsq,
        k,
        energy,
        rho_sq,
        zone,
    })
}

pub fn classify_zone(cfg: &BarrierConfig, energy: f64) -> Result<Zone> {
    if !(energy.is_finite() && energy > cfg.mass()) {
        return Err(TunnelError::Domain(format!(
            "E = {energy} must exceed the rest mass m = {}",
            cfg.mass()
        )));
    }
    Ok(zone_of(cfg, energy))
}

fn zone_of(cfg: &BarrierConfig, energy: f64) -> Zone {
    let m = cfg.mass();
    let v0 = cfg.height();
    let tol = EDGE_TOLERANCE * m;
    if (energy - v0 - m).abs() < tol || (energy - v0 + m).abs() < tol {
        Zone::Edge
    } else if energy > v0 + m {
        Zone::AboveBarrier
    } else if energy < v0 - m {
        Zone::Klein
    } else {
        Zone::Tunneling
    }
}

/// Classical traversal time `τ = L/v = L E/k`.
pub fn classical_traversal(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    if !(pt.k > 0.0) {
        return Err(TunnelError::Domain(format!("k must be > 0, got {}", pt.k)));
    }
    Ok(cfg.width() * pt.energy / pt.k)
}
