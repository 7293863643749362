use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use kgtunnel::output::{
    emit_plot_script, run_packet_check, run_sweep, ConfigFile, PlotStyle, SweepConfig,
};
use kgtunnel::TunnelError;

const CONFIG_KEYS: &[&str] = &[
    "upsilon",
    "wl",
    "nsq-min",
    "nsq-max",
    "steps",
    "out",
    "figure2",
    "packet-k0-nsq",
    "packet-sigma",
    "packet-free",
    "plot-script",
    "style",
];

/// Klein-Gordon barrier tunneling times: sweeps, identity checks and the
/// wave-packet oracle.
///
/// Without packet options the tool sweeps n² over the tunneling zone and
/// writes CSV. With --packet-k0-nsq (or --packet-sigma / --packet-free) it
/// runs the wave-packet check instead. Exit codes: 0 success, 2 usage
/// error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "kgtunnel", version)]
struct Args {
    /// Barrier height over rest mass, V0/m.
    #[arg(long)]
    upsilon: Option<f64>,
    /// Barrier strength w*L with w = sqrt(2 m V0).
    #[arg(long)]
    wl: Option<f64>,
    #[arg(long)]
    nsq_min: Option<f64>,
    #[arg(long)]
    nsq_max: Option<f64>,
    /// Grid points, endpoints included [default: 512].
    #[arg(long)]
    steps: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Preset upsilon = 5, wL = 2*pi.
    #[arg(long)]
    figure2: bool,
    /// Packet centre as n^2 [default: upsilon/2].
    #[arg(long)]
    packet_k0_nsq: Option<f64>,
    /// Packet width sigma in units of w [default: 0.005].
    #[arg(long)]
    packet_sigma: Option<f64>,
    /// Replace the barrier by T = 1 (peak must arrive at t = 0).
    #[arg(long)]
    packet_free: bool,
    /// Write a gnuplot script for the CSV written to --out.
    #[arg(long)]
    plot_script: Option<PathBuf>,
    /// figure2 or plain [default: figure2].
    #[arg(long)]
    style: Option<PlotStyle>,
    /// key=value file with any of the options above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn merge(mut self, file: &ConfigFile) -> Result<Self, TunnelError> {
        fn fill<T: std::str::FromStr>(
            slot: &mut Option<T>,
            file: &ConfigFile,
            key: &str,
        ) -> Result<(), TunnelError> {
            if slot.is_none() {
                *slot = file.get(key)?;
            }
            Ok(())
        }
        fill(&mut self.upsilon, file, "upsilon")?;
        fill(&mut self.wl, file, "wl")?;
        fill(&mut self.nsq_min, file, "nsq-min")?;
        fill(&mut self.nsq_max, file, "nsq-max")?;
        fill(&mut self.steps, file, "steps")?;
        fill(&mut self.out, file, "out")?;
        fill(&mut self.packet_k0_nsq, file, "packet-k0-nsq")?;
        fill(&mut self.packet_sigma, file, "packet-sigma")?;
        fill(&mut self.plot_script, file, "plot-script")?;
        fill(&mut self.style, file, "style")?;
        self.figure2 |= file.get::<bool>("figure2")?.unwrap_or(false);
        self.packet_free |= file.get::<bool>("packet-free")?.unwrap_or(false);
        Ok(self)
    }

    fn sweep_config(&self) -> Result<SweepConfig, TunnelError> {
        let preset = SweepConfig::figure2();
        let pick = |v: Option<f64>, fallback: f64, name: &str| match (v, self.figure2) {
            (Some(x), _) => Ok(x),
            (None, true) => Ok(fallback),
            (None, false) => Err(TunnelError::Domain(format!(
                "--{name} is required (or use --figure2)"
            ))),
        };
        Ok(SweepConfig {
            upsilon: pick(self.upsilon, preset.upsilon, "upsilon")?,
            wl: pick(self.wl, preset.wl, "wl")?,
            nsq_min: self.nsq_min,
            nsq_max: self.nsq_max,
            steps: self.steps.unwrap_or(preset.steps),
        })
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), TunnelError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| TunnelError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: Args) -> Result<(), TunnelError> {
    let args = match &args.config {
        Some(path) => {
            let file = ConfigFile::load(path, CONFIG_KEYS)?;
            args.merge(&file)?
        }
        None => args,
    };
    let cfg = args.sweep_config()?;

    if args.packet_k0_nsq.is_some() || args.packet_sigma.is_some() || args.packet_free {
        let nsq = args.packet_k0_nsq.unwrap_or(0.5 * cfg.upsilon);
        let sigma = args.packet_sigma.unwrap_or(0.005);
        let report = run_packet_check(&cfg, nsq, sigma, args.packet_free)?;
        return write_output(args.out.as_ref(), &report);
    }

    if args.plot_script.is_some() && args.out.is_none() {
        return Err(TunnelError::Domain(
            "--plot-script needs --out for the CSV it plots".into(),
        ));
    }
    let sweep = run_sweep(&cfg)?;
    for w in &sweep.warnings {
        eprintln!("warning: {w}");
    }
    write_output(args.out.as_ref(), &sweep.csv)?;
    if let (Some(script_path), Some(csv_path)) = (&args.plot_script, &args.out) {
        let script = emit_plot_script(csv_path, args.style.unwrap_or_default())?;
        write_output(Some(script_path), &script)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
