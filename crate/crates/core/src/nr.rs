//! Schrödinger reference for the same barrier, used to check the
//! non-relativistic limit (`υ n ≪ 1`, `υ/n ≪ 1`).
//!
//! Lengths are measured in units of `1/w` so that `k = n`, `ρ = √(1 − n²)`
//! and the barrier width is `wL`. The amplitudes come from the same
//! matching solver as the relativistic path; only the dispersion differs.

use crate::error::{Result, TunnelError};
use crate::scattering::{solve_stationary, ScatteringSolution};
use crate::times::phase_derivative;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrPoint {
    /// `E_NR/V₀`
    pub nsq: f64,
    /// `√(1 − n²)`
    pub rho_nr: f64,
    pub wl: f64,
}

impl NrPoint {
    pub fn new(nsq: f64, wl: f64) -> Result<Self> {
        if !(nsq > 0.0 && nsq < 1.0) {
            return Err(TunnelError::Domain(format!(
                "NR tunneling needs 0 < nsq < 1, got {nsq}"
            )));
        }
        if !(wl.is_finite() && wl >= 0.0) {
            return Err(TunnelError::Domain(format!("wL must be >= 0, got {wl}")));
        }
        Ok(Self {
            nsq,
            rho_nr: (1.0 - nsq).sqrt(),
            wl,
        })
    }

    pub fn n(&self) -> f64 {
        self.nsq.sqrt()
    }
}

pub fn solve(p: &NrPoint) -> Result<ScatteringSolution> {
    solve_stationary(p.n(), p.rho_nr, p.wl)
}

pub fn transmission_schrodinger(p: &NrPoint) -> Result<f64> {
    Ok(solve(p)?.t.norm())
}

/// NR group delay over `τ_NR = L m/k`: `(1/wL) dφ/dn`, with `φ = arg T`
/// from the matching solve.
pub fn phase_time_schrodinger(p: &NrPoint) -> Result<f64> {
    if p.wl == 0.0 {
        return Ok(0.0);
    }
    let n = p.n();
    let h = crate::diff::default_step(n);
    if n - 10.0 * h <= 0.0 || n + 10.0 * h >= 1.0 {
        return Err(TunnelError::Edge {
            nsq: p.nsq,
            detail: "finite-difference stencil leaves 0 < n < 1".into(),
        });
    }
    let wl = p.wl;
    let dphi = phase_derivative(|m| Ok(solve(&NrPoint::new(m * m, wl)?)?.phase), n)?;
    Ok(dphi / wl)
}

/// NR dwell time over `τ_NR`: `(1/wL) ∫₀^{wL} |φ₂|² dx`.
pub fn dwell_time_schrodinger(p: &NrPoint) -> Result<f64> {
    if p.wl == 0.0 {
        return Ok(0.0);
    }
    Ok(solve(p)?.interior_norm() / p.wl)
}

/// NR self-interference delay over `τ_NR`: `−(m/k²) Im R / τ_NR = −Im R/(n wL)`.
pub fn self_interference_schrodinger(p: &NrPoint) -> Result<f64> {
    if p.wl == 0.0 {
        return Ok(0.0);
    }
    Ok(-solve(p)?.r.im / (p.n() * p.wl))
}

/// `t_φ − t_D − t_int`, normalized; vanishes by the Smith relation.
pub fn smith_residual(p: &NrPoint) -> Result<f64> {
    Ok(phase_time_schrodinger(p)? - dwell_time_schrodinger(p)? - self_interference_schrodinger(p)?)
}
