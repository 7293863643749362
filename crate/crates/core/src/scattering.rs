//! Stationary scattering off the barrier: the 4x4 matching solve and the
//! closed-form transmission magnitude and phase used to cross-check it.
//!
//! Amplitude conventions, with `ρ` the physical evanescent wavenumber:
//!
//! ```text
//! x < 0      e^{ikx} + R e^{-ikx}
//! 0 < x < L  α e^{-ρx} + β e^{ρx}
//! x > L      T e^{ik(x-L)}
//! ```
//!
//! `R` is referenced to the entry face and `T` to the exit face.

use num_complex::Complex64;

use crate::error::{Result, TunnelError};
use crate::kinematics::{BarrierConfig, EnergyPoint, Zone};
use crate::special::{ln_sinh, sinhc, softplus, tanhc};

/// Above this value of `ρ·L` the linear solve is skipped and the amplitudes
/// come from the closed forms evaluated in scaled arithmetic.
pub const OPAQUE_THRESHOLD: f64 = 50.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Gaussian elimination with partial pivoting.
    Elimination,
    /// Closed-form amplitudes, used when `ρL > OPAQUE_THRESHOLD`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub r: Complex64,
    pub t: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Principal value of `arg T`.
    pub phase: f64,
    /// Incident wavenumber used for the solve.
    pub k: f64,
    /// Interior decay constant used for the solve.
    pub rho: f64,
    pub width: f64,
    pub method: SolveMethod,
    /// `β e^{ρL}`, the coefficient of `e^{ρ(x−L)}`; finite even when `β`
    /// underflows.
    beta_scaled: Complex64,
}

impl ScatteringSolution {
    /// Stationary wave function at `x`.
    pub fn psi(&self, x: f64) -> Complex64 {
        if x < 0.0 {
            (I * self.k * x).exp() + self.r * (-I * self.k * x).exp()
        } else if x <= self.width {
            self.interior(x)
        } else {
            self.t * (I * self.k * (x - self.width)).exp()
        }
    }

    /// `φ₂(x) = α e^{−ρx} + β e^{ρx}`, valid for `0 ≤ x ≤ L`.
    pub fn interior(&self, x: f64) -> Complex64 {
        self.alpha * (-self.rho * x).exp() + self.beta_scaled * (self.rho * (x - self.width)).exp()
    }

    /// `∂ₓφ₂(x)`.
    pub fn interior_derivative(&self, x: f64) -> Complex64 {
        self.rho
            * (self.beta_scaled * (self.rho * (x - self.width)).exp()
                - self.alpha * (-self.rho * x).exp())
    }

    /// `∫₀ᴸ |φ₂|² dx`, from the closed antiderivatives of `e^{±2ρx}` and the
    /// constant cross term.
    pub fn interior_norm(&self) -> f64 {
        let l = self.width;
        if l == 0.0 {
            return 0.0;
        }
        let x = self.rho * l;
        // (1 − e^{−2x})/(2ρ), → L as ρ → 0
        let decay = if x < 1e-12 {
            l
        } else {
            l * (-(-2.0 * x).exp_m1()) / (2.0 * x)
        };
        let cross = 2.0 * (self.alpha * self.beta_scaled.conj()).re * (-x).exp() * l;
        self.alpha.norm_sqr() * decay + self.beta_scaled.norm_sqr() * decay + cross
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.r.norm_sqr() + self.t.norm_sqr() - 1.0
    }
}

/// Solves the matching problem for wavenumber `k`, interior decay constant
/// `rho` and width `width`. The dispersion that produced `(k, rho)` is the
/// caller's business; both the Klein-Gordon and Schrödinger paths use this.
pub fn solve_stationary(k: f64, rho: f64, width: f64) -> Result<ScatteringSolution> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(TunnelError::Domain(format!("k must be > 0, got {k}")));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(TunnelError::Domain(format!("rho must be >= 0, got {rho}")));
    }
    if !(width >= 0.0 && width.is_finite()) {
        return Err(TunnelError::Domain(format!(
            "width must be >= 0, got {width}"
        )));
    }
    let x = rho * width;
    if x > OPAQUE_THRESHOLD {
        return Ok(asymptotic_solution(k, rho, width));
    }
    // Unknowns (R, α, β', T) with β' = β e^{ρL}, so every entry is O(1).
    let e = Complex64::new((-x).exp(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let ik = I * k;
    let rc = Complex64::new(rho, 0.0);
    let a = [
        [-one, one, e, zero],
        [ik, -rc, rc * e, zero],
        [zero, e, one, -one],
        [zero, -rc * e, rc, -ik],
    ];
    let b = [one, ik, zero, zero];
    let [r, alpha, beta_scaled, t] =
        solve4(a, b).ok_or(TunnelError::SingularSystem { rho_l: x })?;
    Ok(ScatteringSolution {
        r,
        t,
        alpha,
        beta: beta_scaled * (-x).exp(),
        phase: t.arg(),
        k,
        rho,
        width,
        method: SolveMethod::Elimination,
        beta_scaled,
    })
}

fn asymptotic_solution(k: f64, rho: f64, width: f64) -> ScatteringSolution {
    let x = rho * width;
    let q = (-2.0 * x).exp();
    let a_minus = (rho * rho - k * k) / (2.0 * k * rho);
    let a_plus = (rho * rho + k * k) / (2.0 * k * rho);
    // T e^{x} = 2 / ((1 + q) + i A₋ (1 − q))
    let t_scaled = 2.0 / Complex64::new(1.0 + q, a_minus * (1.0 - q));
    let t = t_scaled * (-x).exp();
    let r = -I * a_plus * 0.5 * (1.0 - q) * t_scaled;
    let ratio = I * (k / rho);
    let alpha = t_scaled * (1.0 - ratio) * 0.5;
    let beta_scaled = t_scaled * (-x).exp() * (1.0 + ratio) * 0.5;
    ScatteringSolution {
        r,
        t,
        alpha,
        beta: beta_scaled * (-x).exp(),
        phase: t_scaled.arg(),
        k,
        rho,
        width,
        method: SolveMethod::Asymptotic,
        beta_scaled,
    }
}

/// Gaussian elimination with partial pivoting on a 4x4 complex system.
/// `None` when a pivot falls below `64 ε ‖A‖∞`.
fn solve4(mut a: [[Complex64; 4]; 4], mut b: [Complex64; 4]) -> Option<[Complex64; 4]> {
    let scale = a
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let tiny = 64.0 * f64::EPSILON * scale;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("non-empty range");
        if a[piv][col].norm() <= tiny {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, &p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * p;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for c in row + 1..4 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn require_evanescent(pt: &EnergyPoint) -> Result<()> {
    if pt.is_evanescent() {
        Ok(())
    } else {
        Err(TunnelError::NotSupported {
            zone: pt.zone,
            nsq: pt.nsq,
        })
    }
}

/// Matching solve for one Klein-Gordon energy. Exact zone edges (`ρ = 0`)
/// make the exponential basis degenerate and return
/// [`TunnelError::SingularSystem`].
pub fn solve_matching(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<ScatteringSolution> {
    require_evanescent(pt)?;
    if pt.zone == Zone::Edge {
        return Err(TunnelError::SingularSystem { rho_l: 0.0 });
    }
    solve_stationary(pt.k, cfg.w() * pt.rho(), cfg.width())
}

/// `|T|` for dimensionless `n`, `ρ²`, `u = wL` and `S = n² + ρ²`:
///
/// ```text
/// |T|⁻² = 1 + S² sinh²(ρu) / (4 n² ρ²)
/// ```
///
/// Finite at `ρ = 0`, log-domain for `ρu > 20`.
pub fn transmission_magnitude_parts(n: f64, rho_sq: f64, u: f64, s: f64) -> f64 {
    let rho = rho_sq.max(0.0).sqrt();
    let x = rho * u;
    if x > 20.0 {
        let ln_q = 2.0 * (s / (2.0 * n * rho)).ln() + 2.0 * ln_sinh(x);
        (-0.5 * softplus(ln_q)).exp()
    } else {
        let c = s * u * sinhc(x) / (2.0 * n);
        1.0 / (1.0 + c * c).sqrt()
    }
}

/// `φ = arctan[(n² − ρ²)/(2nρ) · tanh(ρu)]`, written with `tanh(x)/x` so
/// that it stays finite at `ρ = 0`.
pub fn phase_parts(n: f64, rho_sq: f64, u: f64) -> f64 {
    let rho = rho_sq.max(0.0).sqrt();
    ((n * n - rho_sq) / (2.0 * n) * u * tanhc(rho * u)).atan()
}

/// `n² + ρ²` for the relativistic dispersion, `E/m − υ/2`.
pub fn spectral_sum(pt: &EnergyPoint) -> f64 {
    pt.nsq + pt.rho_sq.max(0.0)
}

/// Closed-form `|T|` for the Klein-Gordon barrier, including the
/// `(n² + ρ²)²` factor that reduces to 1 only in the non-relativistic
/// limit. Matches the matching solver to rounding.
pub fn closed_form_t_magnitude(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    Ok(transmission_magnitude_parts(
        pt.n(),
        pt.rho_sq,
        cfg.wl(),
        spectral_sum(pt),
    ))
}

/// `{1 + sinh²(ρwL)/(4n²ρ²)}^{−1/2}` exactly as commonly quoted with the
/// relativistic `ρ(n)` substituted into the Schrödinger result. Not equal
/// to the Klein-Gordon transmission unless `υ → 0`.
pub fn transmission_magnitude_as_printed(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    Ok(transmission_magnitude_parts(
        pt.n(),
        pt.rho_sq,
        cfg.wl(),
        1.0,
    ))
}

/// Closed-form transmission phase. Always inside `(−π/2, π/2)` because
/// `cosh(ρwL) > 0`, so it is continuous across the whole zone.
pub fn closed_form_phase(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    Ok(phase_parts(pt.n(), pt.rho_sq, cfg.wl()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneEdge {
    /// `n² → υ/2 − 1`, `E → V₀ − m`
    Lower,
    /// `n² → υ/2 + 1`, `E → V₀ + m`
    Upper,
}

impl ZoneEdge {
    pub fn nsq(self, cfg: &BarrierConfig) -> f64 {
        match self {
            ZoneEdge::Lower => 0.5 * cfg.upsilon() - 1.0,
            ZoneEdge::Upper => 0.5 * cfg.upsilon() + 1.0,
        }
    }
}

fn check_edge(cfg: &BarrierConfig, edge: ZoneEdge) -> Result<()> {
    if edge == ZoneEdge::Lower && cfg.upsilon() <= 2.0 {
        return Err(TunnelError::Domain(format!(
            "lower edge needs upsilon > 2, got {}",
            cfg.upsilon()
        )));
    }
    Ok(())
}

/// Edge limit `[1 + (wL)²/(2υ ∓ 4)]^{−1/2}` of the quoted formula
/// ([`transmission_magnitude_as_printed`]). For `υ ≫ 1` it tends to
/// `[1 + (mL)²]^{−1/2}`.
pub fn transmission_limit(cfg: &BarrierConfig, edge: ZoneEdge) -> Result<f64> {
    check_edge(cfg, edge)?;
    let u = cfg.upsilon();
    let denom = match edge {
        ZoneEdge::Lower => 2.0 * u - 4.0,
        ZoneEdge::Upper => 2.0 * u + 4.0,
    };
    Ok((1.0 + cfg.wl().powi(2) / denom).powf(-0.5))
}

/// Edge limit of the actual Klein-Gordon transmission:
/// `[1 + n_e² (wL)²/4]^{−1/2}` with `n_e² = υ/2 ∓ 1` (at `ρ = 0` the
/// interior solution is linear in `x`).
pub fn transmission_limit_exact(cfg: &BarrierConfig, edge: ZoneEdge) -> Result<f64> {
    check_edge(cfg, edge)?;
    let nsq = edge.nsq(cfg);
    Ok((1.0 + nsq * cfg.wl().powi(2) / 4.0).powf(-0.5))
}

/// Removes jumps larger than `period/2` between consecutive samples by
/// adding multiples of `period` (nearest-branch continuation).
pub fn unwrap_phases(raw: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in raw {
        if let Some(q) = prev {
            let jump = p + offset - q;
            offset -= period * (jump / period).round();
        }
        let v = p + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}
