use pilotwave::analysis::walking_speed;
use pilotwave::error::Error;
use pilotwave::params::{FluidParams, ForcingParams};
use pilotwave::simulation::{
    calibrate_threshold, run_ensemble, run_single, sweep_memory, CalibrationSettings, EnsembleSpec, Prepared,
    SimConfig, Termination,
};
use pilotwave::topography::Variant;

fn open_bath(side: f64, n: usize, periods: f64) -> SimConfig {
    let mut c = SimConfig::default();
    c.geometry.variant = Variant::OpenBath;
    c.geometry.layout.walls = false;
    c.geometry.layout.domain = [side, side];
    c.numerics.nx = n;
    c.numerics.ny = n;
    c.numerics.periods = periods;
    c.numerics.snapshot_every = 0.0;
    c.launch.y = Some(0.0);
    c
}

#[test]
fn identical_configs_give_identical_records() {
    let mut c = open_bath(8.0, 64, 20.0);
    c.numerics.noise = 1e-9;
    c.numerics.snapshot_every = 5.0;
    let a = run_single(&c).unwrap();
    let b = run_single(&c).unwrap();
    assert_eq!(a, b);
    c.seed += 1;
    assert_ne!(run_single(&c).unwrap().samples, a.samples);
}

#[test]
fn low_memory_bouncer_stays_put() {
    let mut c = open_bath(8.0, 64, 100.0);
    c.forcing = c.forcing.with_gamma_ratio(0.5);
    c.launch.speed = 0.0;
    let r = run_single(&c).unwrap();
    assert_eq!(r.meta.termination, Termination::Completed);
    let lambda = r.meta.lambda_f;
    let drift = r.samples.iter().map(|s| s.x.hypot(s.y)).fold(0.0, f64::max);
    assert!(drift < 0.1 * lambda, "drifted {:.3} λ", drift / lambda);
}

#[test]
fn walker_settles_to_a_steady_speed() {
    let mut c = open_bath(20.0, 160, 250.0);
    let p = Prepared::new(&c).unwrap();
    c.launch.impact_parameter = -7.5 * p.lambda_f;
    c.launch.direction_deg = 0.0;
    c.launch.speed = 5e-3;
    let r = run_single(&c).unwrap();
    assert_eq!(r.meta.termination, Termination::Completed);
    let window = 100.0 * r.meta.faraday_period;
    let stats = walking_speed(&r.samples, window).unwrap();
    assert!(stats.rel_std < 0.02, "{stats:?}");
    assert!(stats.mean > 4e-3 && stats.mean < 15e-3, "{stats:?}");
    let last = r.samples.last().unwrap();
    assert!(last.y.abs() < 0.5 * p.lambda_f, "veered to y = {}", last.y);
}

#[test]
fn ensemble_does_not_depend_on_the_thread_count() {
    let mut base = open_bath(8.0, 64, 10.0);
    base.numerics.noise = 1e-9;
    base.numerics.snapshot_every = 5.0;
    let spec = EnsembleSpec {
        base,
        impact_parameters: vec![-2e-3, 0.0, 1e-3, 3e-3],
    };
    let one = run_ensemble(&spec, 1).unwrap();
    let four = run_ensemble(&spec, 4).unwrap();
    assert_eq!(one, four);
    assert_eq!(one[2].meta.impact_parameter, 1e-3);
    assert!(run_ensemble(&EnsembleSpec { impact_parameters: vec![], ..spec.clone() }, 2).unwrap().is_empty());
    let bad = EnsembleSpec { impact_parameters: vec![f64::NAN], ..spec };
    assert!(run_ensemble(&bad, 1).is_err());
}

#[test]
fn memory_sweep_is_guarded_near_threshold() {
    let spec = EnsembleSpec {
        base: open_bath(8.0, 64, 2.0),
        impact_parameters: vec![0.0],
    };
    for bad in [0.93, 0.95, 1.0, 0.0, f64::NAN] {
        assert!(matches!(sweep_memory(&spec, &[0.5, bad], 1), Err(Error::Validation(_))), "{bad}");
    }
    let ok = sweep_memory(&spec, &[0.5, 0.92], 1).unwrap();
    assert_eq!(ok.len(), 2);
    assert!((ok[1].records[0].meta.gamma_ratio - 0.92).abs() < 1e-12);
}

fn quick_settings() -> CalibrationSettings {
    CalibrationSettings {
        n: 64,
        tolerance: 0.02,
        ..CalibrationSettings::default()
    }
}

#[test]
fn threshold_rises_with_damping() {
    let fluid = FluidParams::default();
    let forcing = ForcingParams::default();
    let s = quick_settings();
    let base = calibrate_threshold(&fluid, &forcing, &s).unwrap();
    assert!(base.upper - base.lower <= s.tolerance);
    let mut heavy = fluid;
    heavy.nu_eff = heavy.nu;
    let wide = CalibrationSettings {
        bracket: [1.0, 12.0],
        ..s
    };
    let raised = calibrate_threshold(&heavy, &forcing, &wide).unwrap();
    assert!(raised.gamma_f > base.gamma_f + 0.4, "{} vs {}", raised.gamma_f, base.gamma_f);
}

#[test]
fn calibration_rejects_a_bad_bracket() {
    let s = CalibrationSettings {
        bracket: [1.0, 1.2],
        ..quick_settings()
    };
    let r = calibrate_threshold(&FluidParams::default(), &ForcingParams::default(), &s);
    assert!(matches!(r, Err(Error::Calibration(_))), "{r:?}");
    let s = CalibrationSettings {
        bracket: [2.0, 1.0],
        ..quick_settings()
    };
    assert!(calibrate_threshold(&FluidParams::default(), &ForcingParams::default(), &s).is_err());
}
