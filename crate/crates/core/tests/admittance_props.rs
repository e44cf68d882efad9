use approx::assert_relative_eq;
use proptest::prelude::*;

use gaitforge::admittance::{step_admittance, AdmittanceParams, AxisAdmittanceState};

const DT: f64 = 0.001;

fn trace(params: &AdmittanceParams, forces: &[f64], limit: Option<f64>) -> Vec<f64> {
    let mut state = AxisAdmittanceState::new(limit);
    forces
        .iter()
        .map(|&f| {
            state = step_admittance(params, state, f, DT).unwrap();
            state.desired_velocity
        })
        .collect()
}

fn params() -> impl Strategy<Value = AdmittanceParams> {
    (0.5f64..50.0, 0.5f64..50.0).prop_map(|(m, c)| AdmittanceParams::new(m, c).unwrap())
}

proptest! {
    #[test]
    fn constant_force_converges_to_force_over_damping(p in params(), f in -200.0f64..200.0) {
        let ticks = (12.0 * p.time_constant() / DT).ceil() as usize;
        let v = *trace(&p, &vec![f; ticks], None).last().unwrap();
        prop_assert!((v - f / p.virtual_damping).abs() <= 1e-4 * (1.0 + (f / p.virtual_damping).abs()));
    }

    #[test]
    fn step_response_is_monotone_without_overshoot(p in params(), f in -200.0f64..200.0) {
        let v = trace(&p, &[f; 2000], None);
        let target = f / p.virtual_damping;
        let mut prev = 0.0f64;
        for x in v {
            prop_assert!((x - prev) * f.signum() >= -1e-12);
            prop_assert!(x.abs() <= target.abs() + 1e-12);
            prev = x;
        }
    }

    #[test]
    fn response_is_linear_in_force(
        p in params(),
        a in prop::collection::vec(-100.0f64..100.0, 200),
        b in prop::collection::vec(-100.0f64..100.0, 200),
        ka in -3.0f64..3.0,
        kb in -3.0f64..3.0,
    ) {
        let mixed: Vec<f64> = a.iter().zip(&b).map(|(x, y)| ka * x + kb * y).collect();
        let (va, vb, vm) = (trace(&p, &a, None), trace(&p, &b, None), trace(&p, &mixed, None));
        for i in 0..mixed.len() {
            assert_relative_eq!(vm[i], ka * va[i] + kb * vb[i], epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn more_damping_gives_lower_steady_speed(m in 0.5f64..50.0, c in 0.5f64..20.0, extra in 0.1f64..20.0, f in 1.0f64..200.0) {
        let soft = AdmittanceParams::new(m, c).unwrap();
        let stiff = AdmittanceParams::new(m, c + extra).unwrap();
        let vs = trace(&soft, &[f; 3000], None);
        let vh = trace(&stiff, &[f; 3000], None);
        for (s, h) in vs.iter().zip(&vh) {
            prop_assert!(h <= s);
        }
    }

    #[test]
    fn unforced_motion_dissipates(m in 0.5f64..50.0, c in 0.5f64..50.0, v0 in -2.0f64..2.0, frac in 0.05f64..0.95) {
        let p = AdmittanceParams::new(m, c).unwrap();
        // Any step inside the stability bound, including ones that ring.
        let dt = frac * 2.0 * m / c;
        prop_assert!(p.check_step(dt).is_ok());
        let mut state = AxisAdmittanceState { desired_velocity: v0, saturation_limit: None };
        for _ in 0..50 {
            let next = step_admittance(&p, state, 0.0, dt).unwrap();
            prop_assert!(next.desired_velocity.abs() < state.desired_velocity.abs() || state.desired_velocity == 0.0);
            state = next;
        }
    }

    #[test]
    fn saturation_bounds_every_sample(p in params(), limit in 0.01f64..2.0, forces in prop::collection::vec(-500.0f64..500.0, 1..400)) {
        for v in trace(&p, &forces, Some(limit)) {
            prop_assert!(v.abs() <= limit);
        }
    }

    #[test]
    fn reset_zeroes_and_keeps_limit(p in params(), limit in 0.01f64..2.0, f in -100.0f64..100.0) {
        let state = step_admittance(&p, AxisAdmittanceState::new(Some(limit)), f, DT).unwrap().reset();
        prop_assert_eq!(state, AxisAdmittanceState::new(Some(limit)));
    }

    #[test]
    fn non_finite_input_is_refused(p in params(), v in -1.0f64..1.0) {
        let state = AxisAdmittanceState { desired_velocity: v, saturation_limit: None };
        prop_assert!(step_admittance(&p, state, f64::NAN, DT).is_err());
        prop_assert!(step_admittance(&p, state, 1.0, f64::INFINITY).is_err());
        prop_assert!(step_admittance(&p, state, 1.0, 0.0).is_err());
    }
}

#[test]
fn stability_bound_is_enforced() {
    let p = AdmittanceParams::new(8.0, 4.0).unwrap();
    assert!(p.check_step(DT).is_ok());
    assert!(p.check_step(4.0).is_err());
}
