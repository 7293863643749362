//! Wave-packet oracle for the phase time.
//!
//! A narrow packet `∫ g(k − k₀) T(k) e^{i k (x − L) − i E(k) t} dk` is
//! synthesized by quadrature over a window inside the tunneling zone, and
//! the time at which `|ψ(L, t)|²` peaks is compared with `t_φ(k₀)`. The
//! incident packet is centred on `x = 0` at `t = 0`.

use num_complex::Complex64;

use crate::error::{Result, TunnelError};
use crate::kinematics::{classical_traversal, derive_point, BarrierConfig, Zone};
use crate::quadrature::{rule, QuadratureKind};
use crate::scattering::solve_matching;
use crate::times::phase_time_analytic;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const COARSE_SCAN_POINTS: usize = 401;

/// Momentum distribution shape, as a function of `(k − k₀)/σ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// Unit-normalized Gaussian with standard deviation `σ`.
    Gaussian,
    /// Even profile tabulated at non-negative offsets (in units of `σ`),
    /// linearly interpolated and zero past the last entry.
    Tabulated { offsets: Vec<f64>, values: Vec<f64> },
}

impl Window {
    fn eval(&self, z: f64) -> f64 {
        match self {
            Window::Gaussian => (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            Window::Tabulated { offsets, values } => {
                let a = z.abs();
                match offsets.iter().position(|&o| o >= a) {
                    None => 0.0,
                    Some(0) => values[0],
                    Some(i) => {
                        let f = (a - offsets[i - 1]) / (offsets[i] - offsets[i - 1]);
                        values[i - 1] + f * (values[i] - values[i - 1])
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    /// Central wavenumber.
    pub k0: f64,
    /// Momentum-space standard deviation.
    pub sigma: f64,
    pub n_quad: usize,
    /// Half-width of the integration window in units of `σ`.
    pub k_window: f64,
    /// Peak-search bracket; `None` means `[−10τ, 10τ]`.
    pub t_search: Option<(f64, f64)>,
    pub quadrature: QuadratureKind,
    pub window: Window,
    /// Overall factor on `g`.
    pub amplitude: f64,
}

impl PacketSpec {
    pub fn new(k0: f64, sigma: f64) -> Self {
        Self {
            k0,
            sigma,
            n_quad: 2048,
            k_window: 5.0,
            t_search: None,
            quadrature: QuadratureKind::GaussLegendre,
            window: Window::Gaussian,
            amplitude: 1.0,
        }
    }

    /// Packet centred on `n² = nsq` with `σ = sigma_over_w · w`.
    pub fn at_nsq(cfg: &BarrierConfig, nsq: f64, sigma_over_w: f64) -> Self {
        Self::new(cfg.w() * nsq.sqrt(), sigma_over_w * cfg.w())
    }

    pub fn validate(&self, cfg: &BarrierConfig) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(TunnelError::Spec(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if self.n_quad < 128 {
            return Err(TunnelError::Spec(format!(
                "n_quad must be >= 128, got {}",
                self.n_quad
            )));
        }
        if !(self.k_window > 0.0) {
            return Err(TunnelError::Spec("k_window must be > 0".into()));
        }
        if let Window::Tabulated { offsets, values } = &self.window {
            if offsets.is_empty()
                || offsets.len() != values.len()
                || offsets[0] < 0.0
                || offsets.windows(2).any(|p| p[0] >= p[1])
            {
                return Err(TunnelError::Spec(
                    "tabulated window needs increasing, non-negative offsets".into(),
                ));
            }
        }
        let (lo, hi) = cfg.tunneling_nsq_range();
        let (k_lo, k_hi) = (cfg.w() * lo.sqrt(), cfg.w() * hi.sqrt());
        let half = self.k_window * self.sigma;
        if !(self.k0 - half > k_lo && self.k0 + half < k_hi) {
            return Err(TunnelError::Spec(format!(
                "window [{}, {}] is not inside the tunneling zone ({k_lo}, {k_hi})",
                self.k0 - half,
                self.k0 + half
            )));
        }
        Ok(())
    }
}

/// What multiplies the transmitted plane waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transmission {
    /// `T(k)` from the matching solver.
    Barrier,
    /// `T ≡ 1`: the packet propagates freely (self-test).
    Free,
}

/// Precomputed quadrature data for repeated `ψ(x, t)` evaluations.
#[derive(Debug, Clone)]
pub struct Packet {
    width: f64,
    k: Vec<f64>,
    energy: Vec<f64>,
    /// `w_j g(k_j − k₀) T(k_j)`
    coeff: Vec<Complex64>,
}

impl Packet {
    pub fn new(cfg: &BarrierConfig, spec: &PacketSpec, transmission: Transmission) -> Result<Self> {
        spec.validate(cfg)?;
        let half = spec.k_window * spec.sigma;
        let r = rule(spec.quadrature, spec.n_quad, spec.k0 - half, spec.k0 + half);
        let w = cfg.w();
        let mut k = Vec::with_capacity(r.nodes.len());
        let mut energy = Vec::with_capacity(r.nodes.len());
        let mut coeff = Vec::with_capacity(r.nodes.len());
        for (&kj, &wj) in r.nodes.iter().zip(&r.weights) {
            let pt = derive_point(cfg, (kj / w).powi(2))?;
            if pt.zone != Zone::Tunneling {
                return Err(TunnelError::Spec(format!(
                    "node k = {kj} is outside the tunneling zone"
                )));
            }
            let t = match transmission {
                Transmission::Barrier => solve_matching(cfg, &pt)?.t,
                Transmission::Free => Complex64::new(1.0, 0.0),
            };
            let g = spec.amplitude * spec.window.eval((kj - spec.k0) / spec.sigma) / spec.sigma;
            k.push(kj);
            energy.push(pt.energy);
            coeff.push(t * (wj * g));
        }
        Ok(Self {
            width: cfg.width(),
            k,
            energy,
            coeff,
        })
    }

    /// Transmitted wave at `x ≥ L`.
    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let dx = x - self.width;
        self.k
            .iter()
            .zip(&self.energy)
            .zip(&self.coeff)
            .map(|((&k, &e), &c)| c * Complex64::from_polar(1.0, k * dx - e * t))
            .sum()
    }

    /// `∂|ψ(L, t)|²/∂t = 2 Re(ψ* ∂ₜψ)`.
    fn density_slope(&self, t: f64) -> f64 {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (&e, &c) in self.energy.iter().zip(&self.coeff) {
            let v = c * Complex64::from_polar(1.0, -e * t);
            psi += v;
            dpsi += Complex64::new(0.0, -e) * v;
        }
        2.0 * (psi.conj() * dpsi).re
    }

    fn density(&self, t: f64) -> f64 {
        self.psi(self.width, t).norm_sqr()
    }

    /// `∫ |g| dk` over the window, an upper bound on `|ψ|`.
    pub fn envelope_bound(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm()).sum()
    }
}

pub fn synthesize_transmitted(
    cfg: &BarrierConfig,
    spec: &PacketSpec,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    if x < cfg.width() {
        return Err(TunnelError::Domain(format!(
            "x = {x} lies before the exit face L = {}",
            cfg.width()
        )));
    }
    Ok(Packet::new(cfg, spec, Transmission::Barrier)?.psi(x, t))
}

pub fn peak_arrival_time(cfg: &BarrierConfig, spec: &PacketSpec) -> Result<f64> {
    peak_arrival_time_with(cfg, spec, Transmission::Barrier)
}

pub fn peak_arrival_time_with(
    cfg: &BarrierConfig,
    spec: &PacketSpec,
    transmission: Transmission,
) -> Result<f64> {
    let packet = Packet::new(cfg, spec, transmission)?;
    let (lo, hi) = match spec.t_search {
        Some(b) => b,
        None => {
            let pt = derive_point(cfg, (spec.k0 / cfg.w()).powi(2))?;
            let tau = classical_traversal(cfg, &pt)?;
            let span = if tau > 0.0 {
                10.0 * tau
            } else {
                10.0 * pt.energy / (pt.k * spec.sigma)
            };
            (-span, span)
        }
    };
    find_peak(&packet, lo, hi, 1e-6 / cfg.mass())
}

fn find_peak(packet: &Packet, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let n = COARSE_SCAN_POINTS;
    let ts: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let ds: Vec<f64> = ts.iter().map(|&t| packet.density(t)).collect();
    let imax = ds
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("scan is non-empty");
    if imax == 0 || imax == n - 1 {
        let scan = ts
            .iter()
            .zip(&ds)
            .step_by(20)
            .map(|(t, d)| format!("  t = {t:+.6e}  |psi|^2 = {d:.6e}"))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(TunnelError::Bracket { lo, hi, scan });
    }
    let (mut a, mut b) = (ts[imax - 1], ts[imax + 1]);

    // golden-section on |ψ|²
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (packet.density(c), packet.density(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = packet.density(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = packet.density(d);
        }
    }
    let golden = 0.5 * (a + b);

    // |ψ|² is nearly flat at the top, so finish on the sign change of its slope.
    let (bl, br) = (ts[imax - 1], ts[imax + 1]);
    let mut span = tol;
    let (mut a, mut b) = loop {
        let (a, b) = ((golden - span).max(bl), (golden + span).min(br));
        if packet.density_slope(a) >= 0.0 && packet.density_slope(b) <= 0.0 {
            break (a, b);
        }
        if a <= bl && b >= br {
            return Ok(golden);
        }
        span *= 4.0;
    };
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if packet.density_slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// One row of the `σ` convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub sigma: f64,
    pub arrival: f64,
    /// `|arrival − t_φ| / |t_φ|`
    pub discrepancy: f64,
}

/// Packet arrival compared with the stationary-phase prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketCheck {
    pub nsq: f64,
    pub k0: f64,
    pub sigma: f64,
    /// `t_φ(k₀)` in units of `1/m`.
    pub t_phase: f64,
    pub arrival: f64,
    pub discrepancy: f64,
    /// Rows at `4σ`, `2σ`, `σ`.
    pub trend: Vec<TrendRow>,
}

impl PacketCheck {
    pub fn trend_is_monotone(&self) -> bool {
        self.trend
            .windows(2)
            .all(|w| w[1].discrepancy < w[0].discrepancy)
    }
}

pub fn packet_check(cfg: &BarrierConfig, nsq: f64, sigma_over_w: f64) -> Result<PacketCheck> {
    let pt = derive_point(cfg, nsq)?;
    let t_phase = phase_time_analytic(cfg, &pt)? * classical_traversal(cfg, &pt)?;
    let row = |s: f64| -> Result<TrendRow> {
        let spec = PacketSpec::at_nsq(cfg, nsq, s);
        let arrival = peak_arrival_time(cfg, &spec)?;
        Ok(TrendRow {
            sigma: spec.sigma,
            arrival,
            discrepancy: ((arrival - t_phase) / t_phase).abs(),
        })
    };
    let trend = [4.0, 2.0, 1.0]
        .iter()
        .map(|f| row(f * sigma_over_w))
        .collect::<Result<Vec<_>>>()?;
    let last = trend[2];
    Ok(PacketCheck {
        nsq,
        k0: pt.k,
        sigma: last.sigma,
        t_phase,
        arrival: last.arrival,
        discrepancy: last.discrepancy,
        trend,
    })
}
