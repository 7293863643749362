use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use kgtunnel::kinematics::derive_point;
use kgtunnel::output::{run_sweep, SweepConfig};
use kgtunnel::scattering::solve_matching;
use kgtunnel::times::{identity_report, linspace, time_report, PhasePath, ReportEntry};
use kgtunnel::wavepacket::{peak_arrival_time, PacketSpec};
use kgtunnel::BarrierConfig;

fn fig2() -> BarrierConfig {
    BarrierConfig::from_dimensionless(5.0, 2.0 * PI).unwrap()
}

#[test]
fn report_skips_points_outside_the_zone() {
    let cfg = fig2();
    let entries = identity_report(&cfg, &[1.0, 2.0, 1.5, 3.0, 4.0], PhasePath::Analytic);
    let kinds: Vec<bool> = entries.iter().map(|e| e.report().is_some()).collect();
    assert_eq!(kinds, [false, true, false, true, false]);
    match &entries[0] {
        ReportEntry::Skipped { nsq, reason } => {
            assert_eq!(*nsq, 1.0);
            assert!(!reason.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sweep_matches_direct_reports() {
    let cfg = SweepConfig {
        steps: 9,
        ..SweepConfig::figure2()
    };
    let sweep = run_sweep(&cfg).unwrap();
    let barrier = cfg.barrier().unwrap();
    for line in sweep.csv.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let r = time_report(&barrier, &derive_point(&barrier, f[0]).unwrap()).unwrap();
        assert_eq!(f[3], r.t_magnitude);
        assert_eq!(f[5], r.normalized.phase);
        assert_eq!(f[6], r.normalized.dwell);
        assert_eq!(f[7], r.normalized.dwell_rescaled);
        assert_eq!(f[8], r.normalized.self_interference);
    }
}

#[test]
fn packet_arrival_agrees_with_phase_time_off_centre() {
    let cfg = fig2();
    for nsq in [2.0, 3.0] {
        let pt = derive_point(&cfg, nsq).unwrap();
        let r = time_report(&cfg, &pt).unwrap();
        let t = peak_arrival_time(&cfg, &PacketSpec::at_nsq(&cfg, nsq, 0.005)).unwrap();
        assert!(
            ((t - r.t_phase) / r.t_phase).abs() < 0.03,
            "nsq {nsq}: {t} vs {}",
            r.t_phase
        );
    }
}

#[test]
fn dwell_rescaled_vanishes_at_barrier_energy() {
    let cfg = fig2();
    let nsq = cfg.nsq_at_barrier_energy().unwrap();
    assert_relative_eq!(nsq, 2.4, epsilon = 1e-15);
    let r = time_report(&cfg, &derive_point(&cfg, nsq).unwrap()).unwrap();
    assert!(r.normalized.dwell_rescaled.abs() < 1e-14);
    assert_relative_eq!(
        r.normalized.phase,
        r.normalized.self_interference,
        epsilon = 1e-12
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_holds_across_parameters(u in 0.5f64..20.0, wl in 0.1f64..15.0, frac in 0.001f64..0.999) {
        let cfg = BarrierConfig::from_dimensionless(u, wl).unwrap();
        let (lo, hi) = cfg.tunneling_nsq_range();
        let pt = derive_point(&cfg, lo + frac * (hi - lo)).unwrap();
        let r = time_report(&cfg, &pt).unwrap();
        prop_assert!(r.identity_residual.abs() < 1e-8, "{}", r.identity_residual);
        prop_assert!(r.normalized.dwell > 0.0);
        prop_assert!(solve_matching(&cfg, &pt).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn grid_order_is_preserved(steps in 2usize..40) {
        let cfg = fig2();
        let grid = linspace(1.6, 3.4, steps);
        let got: Vec<f64> = identity_report(&cfg, &grid, PhasePath::Analytic)
            .iter()
            .map(|e| e.report().unwrap().nsq)
            .collect();
        prop_assert_eq!(got, grid);
    }
}
