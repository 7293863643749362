//! Sweeps, CSV emission, plot scripts and the packet-check report used by
//! the `kgtunnel` binary.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, TunnelError};
use crate::kinematics::BarrierConfig;
use crate::scattering::unwrap_phases;
use crate::times::{identity_report, linspace, PhasePath, ReportEntry};
use crate::wavepacket::{packet_check, peak_arrival_time_with, PacketSpec, Transmission};

pub const CSV_HEADER: &str = "nsq,E_over_m,rho,T_mag,phase_unwrapped,t_phase_norm,t_dwell_norm,\
t_dwell_rescaled_norm,t_interference_norm,identity_residual";

/// Distance kept from each zone edge when the range is left to default.
pub const EDGE_SHAVE: f64 = 1e-6;

pub const DEFAULT_STEPS: usize = 512;

pub const THREADS_ENV: &str = "KG_TUNNEL_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub upsilon: f64,
    pub wl: f64,
    pub nsq_min: Option<f64>,
    pub nsq_max: Option<f64>,
    pub steps: usize,
}

impl SweepConfig {
    pub fn new(upsilon: f64, wl: f64) -> Self {
        Self {
            upsilon,
            wl,
            nsq_min: None,
            nsq_max: None,
            steps: DEFAULT_STEPS,
        }
    }

    /// `υ = 5`, `wL = 2π`.
    pub fn figure2() -> Self {
        Self::new(5.0, 2.0 * PI)
    }

    pub fn barrier(&self) -> Result<BarrierConfig> {
        BarrierConfig::from_dimensionless(self.upsilon, self.wl)
    }

    /// Grid bounds, validated against the open tunneling zone.
    pub fn range(&self) -> Result<(f64, f64)> {
        let (lo_edge, hi_edge) = self.barrier()?.tunneling_nsq_range();
        let lo = self.nsq_min.unwrap_or(lo_edge + EDGE_SHAVE);
        let hi = self.nsq_max.unwrap_or(hi_edge - EDGE_SHAVE);
        if !(lo > lo_edge && hi < hi_edge) {
            return Err(TunnelError::Domain(format!(
                "nsq range [{lo}, {hi}] must lie inside the open zone ({lo_edge}, {hi_edge})"
            )));
        }
        if !(lo < hi) {
            return Err(TunnelError::Domain(format!(
                "nsq_min = {lo} must be below nsq_max = {hi}"
            )));
        }
        Ok((lo, hi))
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(TunnelError::Domain(format!(
                "steps must be >= 2, got {}",
                self.steps
            )));
        }
        self.range().map(|_| ())
    }

    /// Provenance line written under the CSV header.
    pub fn comment(&self) -> Result<String> {
        let (lo, hi) = self.range()?;
        Ok(format!(
            "# upsilon={} wl={} nsq_min={} nsq_max={} steps={}",
            self.upsilon, self.wl, lo, hi, self.steps
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub csv: String,
    /// One message per row that fell back to the NaN sentinel.
    pub warnings: Vec<String>,
}

/// Worker pool sized by `KG_TUNNEL_THREADS` (unset or 0 = rayon default).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            TunnelError::Domain(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| TunnelError::Io(e.to_string()))
}

fn field(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Sweep> {
    cfg.validate()?;
    let barrier = cfg.barrier()?;
    let (lo, hi) = cfg.range()?;
    let grid = linspace(lo, hi, cfg.steps);
    let entries = thread_pool()?.install(|| identity_report(&barrier, &grid, PhasePath::Analytic));

    let good: Vec<f64> = entries
        .iter()
        .filter_map(|e| e.report().map(|r| r.phase))
        .collect();
    let mut unwrapped = unwrap_phases(&good, 2.0 * PI).into_iter();

    let mut csv = String::with_capacity(200 * (grid.len() + 2));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    csv.push_str(&cfg.comment()?);
    csv.push('\n');
    let mut warnings = Vec::new();
    for entry in &entries {
        match entry {
            ReportEntry::Point(r) => {
                let phase = unwrapped.next().expect("one unwrapped phase per good row");
                let n = &r.normalized;
                let row = [
                    r.nsq,
                    r.energy_ratio,
                    r.rho,
                    r.t_magnitude,
                    phase,
                    n.phase,
                    n.dwell,
                    n.dwell_rescaled,
                    n.self_interference,
                    r.identity_residual,
                ];
                csv.push_str(&row.map(field).join(","));
            }
            ReportEntry::Skipped { nsq, reason } => {
                warnings.push(format!("nsq = {nsq}: {reason}"));
                csv.push_str(&field(*nsq));
                csv.push_str(&",NaN".repeat(9));
            }
        }
        csv.push('\n');
    }
    Ok(Sweep { csv, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotStyle {
    /// Dash-dotted phase time, dashed black dwell time, solid
    /// self-interference, dashed red re-scaled dwell time.
    #[default]
    Figure2,
    /// Default gnuplot line styles.
    Plain,
}

impl std::str::FromStr for PlotStyle {
    type Err = TunnelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure2" => Ok(PlotStyle::Figure2),
            "plain" => Ok(PlotStyle::Plain),
            _ => Err(TunnelError::Domain(format!(
                "unknown plot style {s:?} (figure2|plain)"
            ))),
        }
    }
}

const CURVES: [(&str, &str, &str); 4] = [
    ("t_phase_norm", "Phase time", "dt '-.' lc rgb 'black'"),
    ("t_dwell_norm", "Dwell time", "dt '-' lc rgb 'black'"),
    (
        "t_interference_norm",
        "Self-interference",
        "dt 1 lc rgb 'black'",
    ),
    (
        "t_dwell_rescaled_norm",
        "Re-scaled dwell time",
        "dt '-' lc rgb 'red'",
    ),
];

/// gnuplot script drawing the four delay curves of a sweep CSV against `n²`.
/// `csv_text` only needs to contain the header line.
pub fn plot_script(csv_text: &str, data_path: &str, style: PlotStyle) -> Result<String> {
    let header = csv_text
        .lines()
        .next()
        .ok_or_else(|| TunnelError::Schema("empty CSV".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let index = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .map(|i| i + 1)
            .ok_or_else(|| TunnelError::Schema(format!("missing column {name}")))
    };
    let x = index("nsq")?;
    let mut plots = Vec::with_capacity(CURVES.len());
    for (column, title, dashes) in CURVES {
        let y = index(column)?;
        let styling = match style {
            PlotStyle::Figure2 => format!("with lines lw 2 {dashes}"),
            PlotStyle::Plain => "with lines".to_string(),
        };
        plots.push(format!(
            "datafile skip 1 using {x}:{y} {styling} title '{title}'"
        ));
    }
    let mut s = String::new();
    s.push_str("# gnuplot script; run with: gnuplot -p <this file>\n");
    let _ = writeln!(s, "datafile = '{}'", data_path.replace('\'', "''"));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key top left\n");
    s.push_str("set xlabel 'n^2 = k^2/w^2'\n");
    s.push_str("set ylabel 't / tau'\n");
    s.push_str("set xzeroaxis\n");
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    Ok(s)
}

pub fn emit_plot_script(csv_path: &Path, style: PlotStyle) -> Result<String> {
    let text = std::fs::read_to_string(csv_path)
        .map_err(|e| TunnelError::Io(format!("{}: {e}", csv_path.display())))?;
    plot_script(&text, &csv_path.display().to_string(), style)
}

/// Packet oracle at `n² = nsq` with `σ = sigma_over_w · w`. With `free`
/// the barrier is replaced by `T ≡ 1` and the arrival must be zero.
pub fn run_packet_check(
    cfg: &SweepConfig,
    nsq: f64,
    sigma_over_w: f64,
    free: bool,
) -> Result<String> {
    let barrier = cfg.barrier()?;
    let spec = PacketSpec::at_nsq(&barrier, nsq, sigma_over_w);
    spec.validate(&barrier)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# upsilon={} wl={} nsq={} sigma_over_w={}",
        cfg.upsilon, cfg.wl, nsq, sigma_over_w
    );
    let _ = writeln!(s, "k0 = {}", field(spec.k0));
    let _ = writeln!(s, "sigma = {}", field(spec.sigma));
    if free {
        let arrival = peak_arrival_time_with(&barrier, &spec, Transmission::Free)?;
        let _ = writeln!(s, "mode = free");
        let _ = writeln!(s, "expected = {}", field(0.0));
        let _ = writeln!(s, "arrival = {}", field(arrival));
        let _ = writeln!(s, "pass = {}", arrival.abs() <= 1e-6);
        return Ok(s);
    }
    let check = packet_check(&barrier, nsq, sigma_over_w)?;
    let _ = writeln!(s, "mode = barrier");
    let _ = writeln!(s, "t_phase = {}", field(check.t_phase));
    let _ = writeln!(s, "arrival = {}", field(check.arrival));
    let _ = writeln!(s, "discrepancy = {}", field(check.discrepancy));
    let _ = writeln!(
        s,
        "pass = {}",
        check.discrepancy <= 0.03 && check.trend_is_monotone()
    );
    s.push_str("\nsigma_over_w,arrival,discrepancy\n");
    for row in &check.trend {
        let _ = writeln!(
            s,
            "{},{},{}",
            field(row.sigma / barrier.w()),
            field(row.arrival),
            field(row.discrepancy)
        );
    }
    Ok(s)
}

/// `key=value` settings file. Blank lines and lines starting with `#` are
/// ignored; keys are the long flag names without the leading dashes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, known: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                TunnelError::Domain(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let k = k.trim();
            if !known.contains(&k) {
                return Err(TunnelError::Domain(format!(
                    "config line {}: unknown key {k:?}",
                    lineno + 1
                )));
            }
            entries.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path, known: &[&str]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TunnelError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, known)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>().map_err(|_| {
                    TunnelError::Domain(format!("config key {key}: cannot parse {v:?}"))
                })
            })
            .transpose()
    }
}
