use proptest::prelude::*;

use gaitforge::admittance::AdmittanceParams;
use gaitforge::cli::{
    apply_overrides, config_to_toml, export, parse_and_validate, parse_config_str, run_sweep, steady_state_gain,
    ExportKind, ScenarioArgs, ScenarioConfig, SweepGrid, TerrainKind, EXPORT_RATE,
};
use gaitforge::runtime::run_scenario;

fn args() -> impl Strategy<Value = ScenarioArgs> {
    (
        prop_oneof![Just(TerrainKind::Flat), Just(TerrainKind::Stair), Just(TerrainKind::Uneven)],
        -0.4f64..0.4,
        prop::collection::vec(-0.1f64..0.1, 1..5),
        prop::option::of(0.1f64..0.5),
        0.5f64..20.0,
        0.5f64..20.0,
        any::<u64>(),
        (200.0f64..2000.0, 1usize..6, 40.0f64..90.0),
    )
        .prop_map(|(terrain, slope, step_heights, speed, m, c, seed, (rate, delay, user))| ScenarioArgs {
            terrain: Some(terrain),
            slope: Some(slope),
            step_heights: Some(step_heights),
            dynamic: speed.is_none(),
            speed,
            virtual_mass: Some(m),
            virtual_damping: Some(c),
            rate: Some(rate.round()),
            seed: Some(seed),
            delay_cycles: Some(delay),
            user_mass: Some(user),
            ..ScenarioArgs::default()
        })
}

fn short_base() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.loop_config.duration = 3.0;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_toml_round_trips(a in args()) {
        let cfg = parse_and_validate(&a).unwrap();
        let text = config_to_toml(&cfg).unwrap();
        prop_assert_eq!(parse_config_str(&text).unwrap(), cfg);
    }

    #[test]
    fn overrides_are_idempotent(a in args()) {
        let once = apply_overrides(ScenarioConfig::default(), &a);
        prop_assert_eq!(apply_overrides(once.clone(), &a), once);
    }

    #[test]
    fn more_damping_lowers_the_gain(m in 0.5f64..50.0, c in 0.5f64..20.0, extra in 0.1f64..20.0) {
        let g = |c| steady_state_gain(&AdmittanceParams::new(m, c).unwrap(), 0.001).unwrap();
        let (soft, stiff) = (g(c), g(c + extra));
        prop_assert!(stiff < soft);
        prop_assert!((soft * c - 1.0).abs() < 1e-6);
    }
}

#[test]
fn sweep_cells_do_not_depend_on_grid_order() {
    let base = short_base();
    let forward = SweepGrid {
        virtual_mass: vec![4.0, 8.0],
        virtual_damping: vec![2.0, 4.0],
    };
    let backward = SweepGrid {
        virtual_mass: vec![8.0, 4.0],
        virtual_damping: vec![4.0, 2.0],
    };
    let a = run_sweep(&base, &forward).unwrap();
    let b = run_sweep(&base, &backward).unwrap();
    assert_eq!(a, run_sweep(&base, &forward).unwrap());
    let cells: Vec<(f64, f64)> = a.iter().map(|r| (r.virtual_mass, r.virtual_damping)).collect();
    assert_eq!(cells, forward.cells());
    for r in &a {
        let twin = b
            .iter()
            .find(|x| x.virtual_mass == r.virtual_mass && x.virtual_damping == r.virtual_damping)
            .unwrap();
        assert_eq!(r, twin);
    }
}

#[test]
fn sweep_cell_matches_a_single_run() {
    let base = short_base();
    let grid = SweepGrid {
        virtual_mass: vec![8.0],
        virtual_damping: vec![4.0],
    };
    let report = &run_sweep(&base, &grid).unwrap()[0];
    let log = run_scenario(&base).unwrap();
    let env = gaitforge::runtime::swing_force_envelope(&log, 40.0);
    assert_eq!(report.metrics().unwrap().peak_swing_force, env.peak);
}

#[test]
fn export_writes_every_kind_with_its_columns() {
    let log = run_scenario(&short_base()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let expected: [(ExportKind, &[&str]); 3] = [
        (ExportKind::TrajectoryForce, &["t", "foot", "phase", "x", "z", "f_x", "f_z"]),
        (
            ExportKind::VelocityTracking,
            &["t", "foot", "phase", "vd_x", "v_x", "e_x", "vd_z", "v_z", "e_z"],
        ),
        (
            ExportKind::Travel,
            &["t", "walk_velocity", "d_x", "d_z", "avatar_x", "avatar_z", "slope", "step_height"],
        ),
    ];
    for (kind, columns) in expected {
        let files = export(&log, kind, dir.path(), kind.as_str()).unwrap();
        let mut reader = csv::Reader::from_path(&files.csv).unwrap();
        let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
        assert_eq!(header, columns);
        let rows = reader.records().count();
        let per_tick = if kind == ExportKind::Travel { 1 } else { 2 };
        let expected_rows = per_tick * (log.frames.len() as f64 * EXPORT_RATE / log.rate).round() as usize;
        assert!(rows.abs_diff(expected_rows) <= per_tick, "{kind}: {rows} rows");
        let svg = std::fs::read_to_string(&files.plot).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    }
}
