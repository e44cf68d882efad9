use approx::assert_relative_eq;
use proptest::prelude::*;

use gaitforge::planar::{FootId, Planar};
use gaitforge::terrain::{
    estimate_walk_velocity, integrate_travel, stance_platform_command, update_slope, FootstepRecord, SwingGround,
    TerrainProfile, WalkMode, WalkState,
};

const DT: f64 = 0.001;

fn dynamic(mass: f64, limit: f64, reverse: bool) -> WalkState {
    WalkState {
        reverse,
        ..WalkState::new(mass, limit, WalkMode::Dynamic).unwrap()
    }
}

proptest! {
    #[test]
    fn stance_travel_follows_the_slope(
        slope in -1.0f64..1.0,
        speeds in prop::collection::vec(0.0f64..1.5, 1..500),
    ) {
        let mut s = WalkState::new(80.0, 2.0, WalkMode::Dynamic).unwrap();
        s.current_slope = slope;
        for v in speeds {
            s.walk_velocity = v;
            s = integrate_travel(s, stance_platform_command(&s), DT);
        }
        prop_assert!((s.travel.z - slope * s.travel.x).abs() <= 1e-12 * (1.0 + s.travel.x.abs()));
        prop_assert!(s.travel.x <= 0.0);
    }

    #[test]
    fn estimator_integrates_force_over_mass(
        mass in 20.0f64..150.0,
        forces in prop::collection::vec(-200.0f64..200.0, 1..500),
    ) {
        let mut s = dynamic(mass, f64::MAX, true);
        for &f in &forces {
            s = estimate_walk_velocity(s, f, DT);
        }
        let expected: f64 = forces.iter().sum::<f64>() * DT / mass;
        assert_relative_eq!(s.walk_velocity, expected, epsilon = 1e-9);
    }

    #[test]
    fn estimator_is_linear_in_force(
        mass in 20.0f64..150.0,
        forces in prop::collection::vec(-200.0f64..200.0, 1..300),
        k in -4.0f64..4.0,
    ) {
        let run = |scale: f64| forces.iter().fold(dynamic(mass, f64::MAX, true), |s, &f| estimate_walk_velocity(s, scale * f, DT)).walk_velocity;
        assert_relative_eq!(run(k), k * run(1.0), epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn estimate_stays_within_limits(
        limit in 0.1f64..2.0,
        reverse in any::<bool>(),
        forces in prop::collection::vec(-2000.0f64..2000.0, 1..500),
    ) {
        let mut s = dynamic(70.0, limit, reverse);
        let floor = if reverse { -limit } else { 0.0 };
        for f in forces {
            s = estimate_walk_velocity(s, f, DT);
            prop_assert!(s.walk_velocity >= floor && s.walk_velocity <= limit);
        }
    }

    #[test]
    fn fixed_speed_ignores_force(speed in 0.0f64..1.0, f in -500.0f64..500.0) {
        let s = WalkState::new(80.0, 1.0, WalkMode::Fixed { speed }).unwrap();
        prop_assert_eq!(estimate_walk_velocity(s, f, DT).walk_velocity, speed);
    }

    #[test]
    fn slope_is_recovered_from_stair_footholds(slope in -1.0f64..1.0, xr in -0.5f64..0.5, run in 0.05f64..0.8) {
        let stair = TerrainProfile::Stair { slope };
        let at = |x: f64| Planar::new(x, stair.ground_height(FootId::RIGHT, x, 0).z);
        let rec = FootstepRecord { forefoot: at(xr + run), rearfoot: at(xr), step_index: 1 };
        assert_relative_eq!(update_slope(&rec).unwrap(), slope, epsilon = 1e-9);
    }

    #[test]
    fn coincident_footholds_are_degenerate(x in -0.5f64..0.5, z in -0.2f64..0.2) {
        let p = Planar::new(x, z);
        let rec = FootstepRecord { forefoot: p, rearfoot: p, step_index: 0 };
        prop_assert!(update_slope(&rec).is_err());
    }

    #[test]
    fn external_heights_render_the_same_stair(slope in -0.5f64..0.5, x in -0.5f64..0.5, right in any::<bool>(), step in 0usize..50) {
        let foot = if right { FootId::RIGHT } else { FootId::LEFT };
        let stair = TerrainProfile::Stair { slope };
        let mut external = TerrainProfile::external();
        prop_assert!(external.ground_height(foot, x, step).fallback);
        external.external_heights_mut().unwrap().set(foot, slope * x);
        prop_assert_eq!(external.ground_height(foot, x, step), stair.ground_height(foot, x, step));
    }

    #[test]
    fn swing_ground_switches_once_clear(
        heights in prop::collection::vec(-0.2f64..0.2, 2..6),
        own in 0usize..10,
        zs in prop::collection::vec(-0.25f64..0.35, 1..100),
    ) {
        let profile = TerrainProfile::Uneven { step_heights: heights.clone() };
        let h = |i: usize| heights[i % heights.len()];
        let next = own + 1;
        let mut ground = SwingGround::default();
        ground.lift();
        let mut cleared = false;
        for z in zs {
            let g = ground.height(&profile, FootId::LEFT, Planar::new(0.0, z), own, next, 0.002).z;
            cleared |= z > h(own).max(h(next)) + 0.002;
            prop_assert_eq!(ground.cleared(), cleared);
            prop_assert_eq!(g, if cleared { h(next) } else { h(own) });
        }
    }
}
