//! Phase time, dwell time, re-scaled dwell time and self-interference
//! delay, and the identity that links them:
//!
//! ```text
//! t_φ = t_D_R + t_int,   t_D_R = (E − V₀)/m · t_D,   t_int = −(E/k²) Im R
//! ```
//!
//! Normalized values are ratios to the classical traversal time
//! `τ = L E/k`; absolute values are in units of `1/m`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diff::{default_step, richardson_central};
use crate::error::{Result, TunnelError};
use crate::kinematics::{classical_traversal, derive_point, BarrierConfig, EnergyPoint, Zone};
use crate::quadrature::composite_gauss;
use crate::scattering::{
    closed_form_phase, closed_form_t_magnitude, phase_parts, solve_matching, spectral_sum,
    ScatteringSolution,
};
use crate::special::{sech2, sinh_cosh_c, sinh_cosh_excess, sinhc};

/// Beyond this `ρwL` the rational forms are evaluated divided by `cosh²`.
const SCALED_FORM_THRESHOLD: f64 = 300.0;

/// Below this `ρ²` the printed phase-time numerator loses too many digits
/// to cancellation and the reduced form is used instead.
const EDGE_SERIES_RHO_SQ: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhasePath {
    /// Closed rational form `f/g`.
    Analytic,
    /// Richardson-extrapolated derivative of the closed-form phase.
    Numeric,
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

struct Shape {
    nsq: f64,
    upsilon: f64,
    rho_sq: f64,
    u: f64,
    /// E/m
    s: f64,
    /// n² + ρ²
    sum: f64,
}

impl Shape {
    fn new(cfg: &BarrierConfig, pt: &EnergyPoint) -> Self {
        Self {
            nsq: pt.nsq,
            upsilon: cfg.upsilon(),
            rho_sq: pt.rho_sq.max(0.0),
            u: cfg.wl(),
            s: pt.energy_ratio(cfg),
            sum: spectral_sum(pt),
        }
    }

    fn x(&self) -> f64 {
        self.rho_sq.sqrt() * self.u
    }
}

/// `f(n,L)/g(n,L)` in the long printed form.
fn phase_ratio_printed(sh: &Shape) -> f64 {
    let (n2, v, s) = (sh.nsq, sh.upsilon, sh.s);
    let x = sh.x();
    let p = (2.0 + 8.0 * n2 * v + v * v) - (4.0 * n2 + 3.0 * v) * s;
    let q = (4.0 + 4.0 * n2 * v + v * v) * s - 2.0 * v * (2.0 + 3.0 * n2 * v);
    let g1 = 2.0 * (1.0 + 2.0 * n2 * v) - s * (2.0 * n2 + v);
    let g2 = (4.0 + 8.0 * n2 * v + v * v) * s - 4.0 * v * (1.0 + 2.0 * n2 * v);
    let sh_x = x.sinh();
    let f = 8.0 * n2 * p + 4.0 * q * sinh_cosh_c(x);
    let g = 16.0 * n2 * g1 + 2.0 * g2 * sh_x * sh_x;
    f / g
}

/// The same ratio with `ρ²` divided out of numerator and denominator:
///
/// ```text
/// f/ρ² = 8[2 + s(4n² − υ)] + 8 S (s² − sυ + 1) u² h(ρu)
/// g/ρ² = 32 n² s + 8 s S² u² sinhc²(ρu)
/// ```
///
/// with `h(x) = (sinh 2x/2x − 1)/x²`, `S = n² + ρ²`, `s = E/m`. Finite at
/// the zone edges.
fn phase_ratio_reduced(sh: &Shape) -> f64 {
    let (n2, v, s, u, sum) = (sh.nsq, sh.upsilon, sh.s, sh.u, sh.sum);
    let x = sh.x();
    let q = 2.0 * sum * (s * s - s * v + 1.0);
    let f0 = 8.0 * (2.0 + s * (4.0 * n2 - v));
    let g0 = 32.0 * n2 * s;
    if x > SCALED_FORM_THRESHOLD {
        let c2 = sech2(x);
        let t = x.tanh();
        let h_scaled = (t / x - c2) / (x * x);
        let f = f0 * c2 + 4.0 * q * u * u * h_scaled;
        let g = g0 * c2 + 8.0 * s * sum * sum * u * u * t * t / (x * x);
        f / g
    } else {
        let sc = sinhc(x);
        let f = f0 + 4.0 * q * u * u * sinh_cosh_excess(x);
        let g = g0 + 8.0 * s * sum * sum * u * u * sc * sc;
        f / g
    }
}

/// `t_φ/τ` from the closed rational form.
pub fn phase_time_analytic(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    let sh = Shape::new(cfg, pt);
    if sh.rho_sq > EDGE_SERIES_RHO_SQ && sh.x() <= SCALED_FORM_THRESHOLD {
        Ok(phase_ratio_printed(&sh))
    } else {
        Ok(phase_ratio_reduced(&sh))
    }
}

fn nsq_edge_guard(cfg: &BarrierConfig, pt: &EnergyPoint, h: f64) -> Result<()> {
    let (lo, hi) = cfg.tunneling_nsq_range();
    let n = pt.n();
    let n_lo = lo.sqrt();
    let n_hi = hi.sqrt();
    if n - 10.0 * h <= n_lo || n + 10.0 * h >= n_hi {
        return Err(TunnelError::Edge {
            nsq: pt.nsq,
            detail: format!("finite-difference stencil (h = {h:e}) reaches the zone boundary"),
        });
    }
    Ok(())
}

/// Derivative of `phase(n)` with respect to `n`, Richardson-extrapolated.
/// Shared by the relativistic and Schrödinger paths.
pub(crate) fn phase_derivative<F>(phase: F, n: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    richardson_central(phase, n, default_step(n))
}

/// `t_φ/τ = (1/wL) dφ/dn`, with the derivative taken numerically.
pub fn phase_time_numeric(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    if pt.zone != Zone::Tunneling {
        return match pt.zone {
            Zone::Edge => Err(TunnelError::Edge {
                nsq: pt.nsq,
                detail: "rho = 0".into(),
            }),
            zone => Err(TunnelError::NotSupported { zone, nsq: pt.nsq }),
        };
    }
    let u = cfg.wl();
    if u == 0.0 {
        return Ok(0.0);
    }
    let n = pt.n();
    nsq_edge_guard(cfg, pt, default_step(n))?;
    let dphi = phase_derivative(
        |m| {
            let p = derive_point(cfg, m * m)?;
            Ok(phase_parts(m, p.rho_sq, u))
        },
        n,
    )?;
    Ok(dphi / u)
}

fn dwell_ratio(sh: &Shape, sum: f64) -> f64 {
    let (n2, s, u) = (sh.nsq, sh.s, sh.u);
    let x = sh.x();
    if x > SCALED_FORM_THRESHOLD {
        let c2 = sech2(x);
        let t = x.tanh();
        let r = n2 / sh.rho_sq;
        let fd = (1.0 - r) * c2 + (1.0 + r) * t / x;
        let gd = 2.0 * s * (c2 + sum * sum * t * t / (4.0 * n2 * sh.rho_sq));
        fd / gd
    } else {
        // (1 − n²/ρ²) + (1 + n²/ρ²) sinh·cosh/x, regrouped to survive ρ → 0
        let fd = 1.0 + sinh_cosh_c(x) + n2 * u * u * sinh_cosh_excess(x);
        let c = sum * u * sinhc(x);
        let gd = 2.0 * s * (1.0 + c * c / (4.0 * n2));
        fd / gd
    }
}

/// `t_D/τ = f_D/g_D` with `g_D = 2 (E/m) |T|⁻²` and the exact Klein-Gordon
/// `|T|`. Agrees with [`dwell_time_integral`] to rounding.
pub fn dwell_time_analytic(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    let sh = Shape::new(cfg, pt);
    Ok(dwell_ratio(&sh, sh.sum))
}

/// The commonly quoted `f_D/g_D`, whose `g_D` carries the Schrödinger
/// `|T|⁻² = 1 + sinh²/(4n²ρ²)`. Kept to document the difference; not used
/// for any reported quantity.
pub fn dwell_time_as_printed(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<f64> {
    require_evanescent(pt)?;
    let sh = Shape::new(cfg, pt);
    Ok(dwell_ratio(&sh, 1.0))
}

/// Absolute dwell time `t_D = (m/k) ∫₀ᴸ |φ₂|² dx`.
pub fn dwell_time(cfg: &BarrierConfig, pt: &EnergyPoint, sol: &ScatteringSolution) -> f64 {
    cfg.mass() / pt.k * sol.interior_norm()
}

/// `t_D/τ` by integrating the interior density of the matching solution.
/// Zero for a zero-width barrier.
pub fn dwell_time_integral(
    cfg: &BarrierConfig,
    pt: &EnergyPoint,
    sol: &ScatteringSolution,
) -> Result<f64> {
    require_evanescent(pt)?;
    if cfg.width() == 0.0 {
        return Ok(0.0);
    }
    Ok(cfg.mass() * sol.interior_norm() / (cfg.width() * pt.energy))
}

/// `(E − V₀)/m`.
pub fn rescaling_factor(cfg: &BarrierConfig, pt: &EnergyPoint) -> f64 {
    (pt.energy - cfg.height()) / cfg.mass()
}

/// `t_D_R = (E − V₀)/m · t_D`. Works on absolute or normalized input.
pub fn rescaled_dwell(cfg: &BarrierConfig, pt: &EnergyPoint, t_dwell: f64) -> f64 {
    rescaling_factor(cfg, pt) * t_dwell
}

/// `t_D_R = j₀/k` from the Klein-Gordon density integral
///
/// ```text
/// j₀ = (i/2) ∫₀ᴸ [φ₂* (D₀φ₂) − (D₀φ₂)* φ₂] dx,   D₀ = ∂₀ + iV₀
/// ```
///
/// for the stationary state `φ₂ e^{−iEt}`. The integral is done by
/// Gauss-Legendre panels, independently of the closed antiderivative used
/// by [`dwell_time`]. Absolute time.
pub fn rescaled_dwell_current(
    cfg: &BarrierConfig,
    pt: &EnergyPoint,
    sol: &ScatteringSolution,
) -> Result<f64> {
    require_evanescent(pt)?;
    let l = cfg.width();
    if l == 0.0 {
        return Ok(0.0);
    }
    let omega = pt.energy - cfg.height();
    let panels = ((sol.rho * l).ceil() as usize).clamp(4, 4096);
    let rule = composite_gauss(16, panels, 0.0, l);
    let half_i = Complex64::new(0.0, 0.5);
    let mut j0 = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let phi = sol.interior(x);
        let d0 = Complex64::new(0.0, -omega) * phi;
        j0 += w * half_i * (phi.conj() * d0 - d0.conj() * phi);
    }
    Ok(j0.re / pt.k)
}

/// Self-interference delay `t_int = −(E/k²) Im R`, the term that closes
/// `t_φ = t_D_R + t_int`. Absolute time.
pub fn self_interference(_cfg: &BarrierConfig, pt: &EnergyPoint, sol: &ScatteringSolution) -> f64 {
    -pt.energy / (pt.k * pt.k) * sol.r.im
}

/// `−Im R / E`, the commonly quoted relativistic self-interference term.
/// It differs from [`self_interference`] by `k²/E²` and does not close
/// the identity.
pub fn self_interference_as_printed(pt: &EnergyPoint, sol: &ScatteringSolution) -> f64 {
    -sol.r.im / pt.energy
}

/// All delays at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeReport {
    pub nsq: f64,
    /// E/m
    pub energy_ratio: f64,
    pub rho: f64,
    pub t_magnitude: f64,
    pub phase: f64,
    pub tau: f64,
    pub t_phase: f64,
    pub t_dwell: f64,
    pub t_dwell_rescaled: f64,
    pub t_self_interference: f64,
    /// `t_φ − (t_D_R + t_int)`, normalized by τ.
    pub identity_residual: f64,
    /// Same residual with `t_int = −Im R/E`.
    pub identity_residual_as_printed: f64,
    pub normalized: NormalizedTimes,
}

/// Delays divided by τ. All zero when `L = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedTimes {
    pub phase: f64,
    pub dwell: f64,
    pub dwell_rescaled: f64,
    pub self_interference: f64,
}

pub fn time_report(cfg: &BarrierConfig, pt: &EnergyPoint) -> Result<TimeReport> {
    time_report_with(cfg, pt, PhasePath::Analytic)
}

pub fn time_report_with(
    cfg: &BarrierConfig,
    pt: &EnergyPoint,
    path: PhasePath,
) -> Result<TimeReport> {
    let sol = solve_matching(cfg, pt)?;
    let tau = classical_traversal(cfg, pt)?;
    let t_magnitude = closed_form_t_magnitude(cfg, pt)?;
    let phase = closed_form_phase(cfg, pt)?;
    let (normalized, residual, residual_printed) = if tau == 0.0 {
        let z = NormalizedTimes {
            phase: 0.0,
            dwell: 0.0,
            dwell_rescaled: 0.0,
            self_interference: 0.0,
        };
        (z, 0.0, 0.0)
    } else {
        let tp = match path {
            PhasePath::Analytic => phase_time_analytic(cfg, pt)?,
            PhasePath::Numeric => phase_time_numeric(cfg, pt)?,
        };
        let td = dwell_time_integral(cfg, pt, &sol)?;
        let tdr = rescaled_dwell(cfg, pt, td);
        let ti = self_interference(cfg, pt, &sol) / tau;
        let ti_printed = self_interference_as_printed(pt, &sol) / tau;
        let n = NormalizedTimes {
            phase: tp,
            dwell: td,
            dwell_rescaled: tdr,
            self_interference: ti,
        };
        (n, tp - tdr - ti, tp - tdr - ti_printed)
    };
    Ok(TimeReport {
        nsq: pt.nsq,
        energy_ratio: pt.energy_ratio(cfg),
        rho: pt.rho(),
        t_magnitude,
        phase,
        tau,
        t_phase: normalized.phase * tau,
        t_dwell: dwell_time(cfg, pt, &sol),
        t_dwell_rescaled: rescaled_dwell(cfg, pt, dwell_time(cfg, pt, &sol)),
        t_self_interference: self_interference(cfg, pt, &sol),
        identity_residual: residual,
        identity_residual_as_printed: residual_printed,
        normalized,
    })
}

/// One grid point of an [`identity_report`].
#[derive(Debug, Clone, PartialEq)]
pub enum ReportEntry {
    Point(TimeReport),
    Skipped { nsq: f64, reason: String },
}

impl ReportEntry {
    pub fn report(&self) -> Option<&TimeReport> {
        match self {
            ReportEntry::Point(r) => Some(r),
            ReportEntry::Skipped { .. } => None,
        }
    }
}

/// Time reports over a grid of `n²`, evaluated in parallel and returned in
/// grid order. Points outside the open tunneling zone are skipped with a
/// reason instead of failing the whole run.
pub fn identity_report(cfg: &BarrierConfig, nsq_grid: &[f64], path: PhasePath) -> Vec<ReportEntry> {
    nsq_grid
        .par_iter()
        .map(|&nsq| {
            let entry = derive_point(cfg, nsq).and_then(|pt| {
                if pt.zone != Zone::Tunneling {
                    return Err(TunnelError::NotSupported { zone: pt.zone, nsq });
                }
                time_report_with(cfg, &pt, path)
            });
            match entry {
                Ok(r) => ReportEntry::Point(r),
                Err(e) => ReportEntry::Skipped {
                    nsq,
                    reason: e.to_string(),
                },
            }
        })
        .collect()
}

/// `steps` equally spaced points spanning `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ZoneEdge;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fig2() -> BarrierConfig {
        BarrierConfig::from_dimensionless(5.0, 2.0 * PI).unwrap()
    }

    fn pt(cfg: &BarrierConfig, nsq: f64) -> EnergyPoint {
        derive_point(cfg, nsq).unwrap()
    }

    // Frozen values: 40-digit mpmath, phase time by differentiating arg T of
    // an independent 4x4 solve with respect to E, dwell by adaptive quadrature
    // of |φ₂|².
    const FROZEN: [(f64, f64, f64); 3] = [
        (2.5, 0.056_270_977_581_925_819, 0.168_530_916_962_958_96),
        (1.8, -0.101_378_665_659_437_64, 0.227_620_144_593_828_67),
        (3.2, 0.161_863_298_638_276_26, 0.185_918_478_695_073_11),
    ];

    #[test]
    fn frozen_high_precision_values() {
        let cfg = fig2();
        for (nsq, tphi, tdwell) in FROZEN {
            let p = pt(&cfg, nsq);
            let sol = solve_matching(&cfg, &p).unwrap();
            assert_relative_eq!(
                phase_time_analytic(&cfg, &p).unwrap(),
                tphi,
                max_relative = 1e-11
            );
            assert_relative_eq!(
                phase_time_numeric(&cfg, &p).unwrap(),
                tphi,
                max_relative = 1e-7
            );
            assert_relative_eq!(
                dwell_time_analytic(&cfg, &p).unwrap(),
                tdwell,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                dwell_time_integral(&cfg, &p, &sol).unwrap(),
                tdwell,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn printed_dwell_form_disagrees_with_integral() {
        let cfg = fig2();
        let p = pt(&cfg, 2.5);
        // 40-digit value of the quoted f_D/g_D at this point.
        assert_relative_eq!(
            dwell_time_as_printed(&cfg, &p).unwrap(),
            1.067_454_629_314_586_8,
            max_relative = 1e-12
        );
        let sol = solve_matching(&cfg, &p).unwrap();
        let exact = dwell_time_integral(&cfg, &p, &sol).unwrap();
        assert!((dwell_time_as_printed(&cfg, &p).unwrap() / exact - 1.0).abs() > 1.0);
    }

    #[test]
    fn printed_and_reduced_phase_forms_agree() {
        for (u, wl) in [(3.0, PI), (5.0, 2.0 * PI), (10.0, 4.0 * PI), (0.3, 9.0)] {
            let cfg = BarrierConfig::from_dimensionless(u, wl).unwrap();
            let (lo, hi) = cfg.tunneling_nsq_range();
            for nsq in linspace(lo + 0.05, hi - 0.05, 40) {
                let p = pt(&cfg, nsq);
                let sh = Shape::new(&cfg, &p);
                let a = phase_ratio_printed(&sh);
                let b = phase_ratio_reduced(&sh);
                assert!(
                    (a - b).abs() <= 1e-11 * a.abs().max(1.0),
                    "u={u} nsq={nsq}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn scaled_forms_match_unscaled_near_threshold() {
        // ρu just below and just above the switch, same point shifted in wL.
        let base = BarrierConfig::from_dimensionless(0.02, 1.0).unwrap();
        let p = pt(&base, 0.4);
        let rho = p.rho();
        let below = Shape::new(
            &BarrierConfig::from_dimensionless(0.02, (SCALED_FORM_THRESHOLD - 1e-9) / rho).unwrap(),
            &p,
        );
        let above = Shape::new(
            &BarrierConfig::from_dimensionless(0.02, (SCALED_FORM_THRESHOLD + 1e-9) / rho).unwrap(),
            &p,
        );
        assert_relative_eq!(
            phase_ratio_reduced(&below),
            phase_ratio_reduced(&above),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            dwell_ratio(&below, below.sum),
            dwell_ratio(&above, above.sum),
            max_relative = 1e-9
        );
    }

    #[test]
    fn edge_phase_times_depend_on_wl() {
        // Exact edge limit [(1 − D/n)/2 − n u² D/6]/(1 + n²u²/4), D = dρ²/dn.
        let u = 5.0;
        for wl in [PI, 2.0 * PI, 4.0 * PI] {
            let cfg = BarrierConfig::from_dimensionless(u, wl).unwrap();
            for (edge, d_over_n) in [
                (ZoneEdge::Lower, 2.0 / (u - 1.0)),
                (ZoneEdge::Upper, -2.0 / (u + 1.0)),
            ] {
                let nsq = edge.nsq(&cfg);
                let n = nsq.sqrt();
                let d = d_over_n * n;
                let want =
                    ((1.0 - d / n) / 2.0 - n * wl * wl * d / 6.0) / (1.0 + nsq * wl * wl / 4.0);
                let got = phase_time_analytic(&cfg, &pt(&cfg, nsq)).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-12);
            }
        }
        // Large wL recovers −4/(3(υ−1)) and 4/(3(υ+1)).
        let cfg = BarrierConfig::from_dimensionless(u, 1e4).unwrap();
        let lo = phase_time_analytic(&cfg, &pt(&cfg, 1.5)).unwrap();
        let hi = phase_time_analytic(&cfg, &pt(&cfg, 3.5)).unwrap();
        assert_relative_eq!(lo, -1.0 / 3.0, max_relative = 1e-6);
        assert_relative_eq!(hi, 2.0 / 9.0, max_relative = 1e-6);
    }

    #[test]
    fn analytic_phase_time_is_continuous_into_the_edge() {
        let cfg = fig2();
        for (e, s) in [(1.5, 1.0), (3.5, -1.0)] {
            let at = phase_time_analytic(&cfg, &pt(&cfg, e)).unwrap();
            let near = phase_time_analytic(&cfg, &pt(&cfg, e + s * 1e-10)).unwrap();
            assert_relative_eq!(at, near, max_relative = 1e-8);
            // switch between printed and reduced forms
            let a = phase_time_analytic(&cfg, &pt(&cfg, e + s * 2e-4)).unwrap();
            let p = pt(&cfg, e + s * 2e-4);
            assert!(p.rho_sq > EDGE_SERIES_RHO_SQ * 0.1);
            assert_relative_eq!(
                a,
                phase_ratio_reduced(&Shape::new(&cfg, &p)),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn numeric_phase_time_edges_and_zero_width() {
        let cfg = fig2();
        assert!(matches!(
            phase_time_numeric(&cfg, &pt(&cfg, 1.5 + 1e-9)),
            Err(TunnelError::Edge { .. })
        ));
        assert!(matches!(
            phase_time_numeric(&cfg, &pt(&cfg, 3.5)),
            Err(TunnelError::Edge { .. })
        ));
        let thin = cfg.with_width(0.0).unwrap();
        assert_eq!(phase_time_numeric(&thin, &pt(&thin, 2.5)).unwrap(), 0.0);
    }

    #[test]
    fn zero_width_delays() {
        let thin = fig2().with_width(0.0).unwrap();
        let p = pt(&thin, 2.2);
        let sol = solve_matching(&thin, &p).unwrap();
        assert_eq!(dwell_time_integral(&thin, &p, &sol).unwrap(), 0.0);
        assert_eq!(dwell_time(&thin, &p, &sol), 0.0);
        // ratio stays finite: f_D → 2, g_D → 2E/m
        assert_relative_eq!(
            dwell_time_analytic(&thin, &p).unwrap(),
            1.0 / p.energy_ratio(&thin),
            max_relative = 1e-15
        );
        assert!(self_interference(&thin, &p, &sol).abs() < 1e-15);
        let r = time_report(&thin, &p).unwrap();
        assert_eq!(r.tau, 0.0);
        assert_eq!(r.t_phase, 0.0);
        assert_eq!(r.normalized.dwell, 0.0);
    }

    #[test]
    fn rescaled_dwell_sign_and_zero() {
        let cfg = fig2();
        let nsq0 = cfg.nsq_at_barrier_energy().unwrap();
        let p0 = pt(&cfg, nsq0);
        assert!(rescaling_factor(&cfg, &p0).abs() < 1e-15);
        assert!(rescaled_dwell(&cfg, &p0, 1.0).abs() < 1e-15);
        let p = pt(&cfg, 1.6);
        let sol = solve_matching(&cfg, &p).unwrap();
        assert!(rescaled_dwell(&cfg, &p, dwell_time(&cfg, &p, &sol)) < 0.0);
        let p = pt(&cfg, 3.0);
        let sol = solve_matching(&cfg, &p).unwrap();
        assert!(rescaled_dwell(&cfg, &p, dwell_time(&cfg, &p, &sol)) > 0.0);
        // NR: (E − V₀)/m → 1
        let nr = BarrierConfig::from_dimensionless(1e-7, 2.0 * PI).unwrap();
        let q = pt(&nr, 0.5);
        assert_relative_eq!(rescaling_factor(&nr, &q), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn density_current_matches_rescaled_dwell() {
        let cfg = fig2();
        for nsq in [1.6, 2.4, 2.5, 3.3] {
            let p = pt(&cfg, nsq);
            let sol = solve_matching(&cfg, &p).unwrap();
            let a = rescaled_dwell_current(&cfg, &p, &sol).unwrap();
            let b = rescaled_dwell(&cfg, &p, dwell_time(&cfg, &p, &sol));
            assert!(
                (a - b).abs() <= 1e-10 * b.abs().max(1e-3),
                "nsq={nsq}: {a} vs {b}"
            );
        }
        let p0 = pt(&cfg, cfg.nsq_at_barrier_energy().unwrap());
        let sol = solve_matching(&cfg, &p0).unwrap();
        assert!(rescaled_dwell_current(&cfg, &p0, &sol).unwrap().abs() < 1e-14);
    }

    #[test]
    fn identity_at_the_figure2_centre() {
        let cfg = fig2();
        let p = pt(&cfg, 2.5);
        let sol = solve_matching(&cfg, &p).unwrap();
        let tau = classical_traversal(&cfg, &p).unwrap();
        let tphi = phase_time_analytic(&cfg, &p).unwrap() * tau;
        let tdr = rescaled_dwell(&cfg, &p, dwell_time(&cfg, &p, &sol));
        assert!((tphi - tdr - self_interference(&cfg, &p, &sol)).abs() <= 1e-8 * tau);
        // the −Im R/E variant misses by ~1.5e-3 τ here
        let miss = (tphi - tdr - self_interference_as_printed(&p, &sol)) / tau;
        assert_relative_eq!(miss, 0.001_522_428_006_111_831_3, max_relative = 1e-8);
    }

    #[test]
    fn interference_equals_phase_time_where_e_equals_v0() {
        let cfg = fig2();
        let p = pt(&cfg, cfg.nsq_at_barrier_energy().unwrap());
        let r = time_report(&cfg, &p).unwrap();
        assert!(r.t_dwell_rescaled.abs() < 1e-14);
        assert_relative_eq!(r.t_phase, r.t_self_interference, max_relative = 1e-10);
    }

    #[test]
    fn report_over_figure2_zone() {
        let cfg = fig2();
        let grid = linspace(1.5 + 1e-6, 3.5 - 1e-6, 512);
        let entries = identity_report(&cfg, &grid, PhasePath::Analytic);
        assert_eq!(entries.len(), 512);
        let reports: Vec<_> = entries.iter().filter_map(ReportEntry::report).collect();
        assert_eq!(reports.len(), 512);
        assert!(reports.windows(2).all(|w| w[0].nsq < w[1].nsq));
        let max_res = reports
            .iter()
            .map(|r| r.identity_residual.abs())
            .fold(0.0, f64::max);
        assert!(max_res <= 1e-8, "max residual {max_res}");
        assert!(reports.iter().all(|r| r.t_dwell > 0.0));
        let changes: Vec<_> = reports
            .windows(2)
            .filter(|w| w[0].t_dwell_rescaled.signum() != w[1].t_dwell_rescaled.signum())
            .collect();
        assert_eq!(changes.len(), 1);
        let step = grid[1] - grid[0];
        assert!((changes[0][0].nsq - 2.4).abs() <= step);
    }

    #[test]
    fn report_skips_points_outside_zone() {
        let cfg = fig2();
        let entries = identity_report(&cfg, &[1.0, 1.5, 2.5, 4.0, -1.0], PhasePath::Analytic);
        assert!(matches!(entries[0], ReportEntry::Skipped { .. }));
        assert!(matches!(entries[1], ReportEntry::Skipped { .. }));
        assert!(matches!(entries[2], ReportEntry::Point(_)));
        assert!(matches!(entries[3], ReportEntry::Skipped { .. }));
        assert!(matches!(entries[4], ReportEntry::Skipped { .. }));
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(1.0, 2.0, 5);
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    proptest! {
        #[test]
        fn dwell_positive_and_paths_agree(u in 0.05f64..20.0, wl in 0.01f64..30.0, t in 0.0f64..1.0) {
            let cfg = BarrierConfig::from_dimensionless(u, wl).unwrap();
            let (lo, hi) = cfg.tunneling_nsq_range();
            let nsq = lo + (hi - lo) * (1e-3 + 0.998 * t);
            let p = pt(&cfg, nsq);
            let sol = solve_matching(&cfg, &p).unwrap();
            let integral = dwell_time_integral(&cfg, &p, &sol).unwrap();
            let analytic = dwell_time_analytic(&cfg, &p).unwrap();
            prop_assert!(integral > 0.0);
            prop_assert!((integral - analytic).abs() <= 1e-8 * analytic);
            let r = time_report(&cfg, &p).unwrap();
            prop_assert!(r.identity_residual.abs() <= 1e-8 * (1.0 + r.normalized.phase.abs()));
            prop_assert_eq!(r.t_dwell_rescaled.signum(), (p.energy - cfg.height()).signum());
        }
    }
}
