//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaitforge::admittance::{analytic_step_response, step_admittance, AdmittanceParams, AxisAdmittanceState};
use gaitforge::bridge::{decode_outbound, encode, FootPose, OutboundMessage};
use gaitforge::gait::{ContactKind, GaitPhase, PhaseThresholds, PhaseTracker};
use gaitforge::gaitgen::{check_spec, generate_gait, required_actuation, GaitParams, MotorCatalog, DEFAULT_CARRIED_MASS};
use gaitforge::planar::{FootId, Planar};
use gaitforge::plant::PlantParams;
use gaitforge::runtime::{
    axis_step_response, measure_loop_delay, run_scenario, swing_force_envelope, swing_tracking, LoopConfig,
    ScenarioConfig, TelemetryLog,
};
use gaitforge::terrain::{estimate_walk_velocity, TerrainProfile, WalkMode, WalkState};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn admittance_oracle() -> Outcome {
    let start = Instant::now();
    let params = AdmittanceParams::new(8.0, 4.0).unwrap();
    let dt = 0.001;
    let ticks = (5.0 * params.time_constant() / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for force in [1.0, 4.0, 40.0] {
        let mut state = AxisAdmittanceState::new(None);
        for k in 1..=ticks {
            state = step_admittance(&params, state, force, dt).unwrap();
            let exact = analytic_step_response(&params, force, k as f64 * dt);
            worst = worst.max((state.desired_velocity - exact).abs() / exact.abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-3 && elapsed < 1.0,
        format!("max rel err {worst:.2e} (<= 1e-3), {elapsed:.3} s (< 1 s)"),
    )
}

fn steady_state_magnitude() -> Outcome {
    let params = AdmittanceParams::new(8.0, 4.0).unwrap();
    let mut state = AxisAdmittanceState::new(None);
    for _ in 0..200_000 {
        state = step_admittance(&params, state, 4.0, 0.001).unwrap();
    }
    let err = (state.desired_velocity - 1.0).abs();
    outcome(err <= 1e-6, format!("v = {:.9} m/s (1 +- 1e-6)", state.desired_velocity))
}

/// Rule-level phase oracle replaying `trace[..=end]` from scratch.
fn oracle_phase(trace: &[(f64, f64)], end: usize, th: &PhaseThresholds, dt: f64) -> GaitPhase {
    let mut phase = GaitPhase::Stance;
    let mut since: Option<usize> = None;
    for (k, &(z, fz)) in trace.iter().enumerate().take(end + 1) {
        let dwell_ok = since.is_none_or(|s| (k - s) as f64 * dt + 1e-9 >= th.min_phase_dwell);
        let next = match phase {
            GaitPhase::Swing if dwell_ok && z <= th.contact_epsilon => GaitPhase::Stance,
            GaitPhase::Stance if dwell_ok && fz >= th.liftoff_force => GaitPhase::Swing,
            p => p,
        };
        if next != phase {
            phase = next;
            since = Some(k);
        }
    }
    phase
}

fn gait_state_machine() -> Outcome {
    let start = Instant::now();
    let th = PhaseThresholds::default();
    let dt = 0.001;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut mismatches, mut alternation, mut dwell) = (0usize, 0usize, 0usize);
    for _ in 0..10_000 {
        let len = rng.random_range(20..150);
        let mut z: f64 = rng.random_range(-0.01..0.05);
        let trace: Vec<(f64, f64)> = (0..len)
            .map(|_| {
                z = (z + rng.random_range(-0.004..0.004)).clamp(-0.02, 0.08);
                (z, rng.random_range(-40.0..40.0))
            })
            .collect();
        let mut tracker = PhaseTracker::new(FootId::RIGHT, GaitPhase::Stance);
        let mut events = Vec::new();
        for (k, &(z, fz)) in trace.iter().enumerate() {
            let t = k as f64 * dt;
            if let Some(e) = tracker.update(Planar::new(0.0, z), Planar::ZERO, Planar::new(0.0, fz), 0.0, &th, dt, t) {
                events.push(e);
            }
            if tracker.phase() != oracle_phase(&trace, k, &th, dt) {
                mismatches += 1;
            }
        }
        alternation += events.windows(2).filter(|w| w[0].kind == w[1].kind).count();
        dwell += events
            .windows(2)
            .filter(|w| w[1].time - w[0].time + 1e-9 < th.min_phase_dwell)
            .count();
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && alternation == 0 && dwell == 0 && elapsed < 10.0,
        format!("10000 traces: {mismatches} oracle mismatches, {alternation} repeats, {dwell} dwell breaches, {elapsed:.2} s"),
    )
}

fn heel_strike_ticks(log: &TelemetryLog) -> Vec<usize> {
    log.events
        .iter()
        .filter(|e| e.kind == ContactKind::HeelStrike)
        .map(|e| (e.time * log.rate).round() as usize)
        .collect()
}

fn slope_conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut segments = 0;
    for s in [-0.4, 0.0, 0.4] {
        let log = run_scenario(&ScenarioConfig::incline(s)).unwrap();
        let strikes = heel_strike_ticks(&log);
        for w in strikes.windows(2) {
            let (a, b) = (&log.frames[w[0]].walk, &log.frames[w[1] - 1].walk);
            let (dx, dz) = (b.d_x - a.d_x, b.d_z - a.d_z);
            worst = worst.max((dz - s * dx).abs() / dx.abs());
            segments += 1;
        }
    }
    outcome(
        worst <= 1e-6 && segments >= 12,
        format!("{segments} stance segments, max |dz/dx - s| {worst:.2e} (<= 1e-6)"),
    )
}

fn velocity_estimator() -> Outcome {
    let mut free = WalkState::new(80.0, f64::MAX, WalkMode::Dynamic).unwrap();
    let mut clamped = WalkState::new(80.0, 0.5, WalkMode::Dynamic).unwrap();
    for _ in 0..1000 {
        free = estimate_walk_velocity(free, 80.0, 0.001);
        clamped = estimate_walk_velocity(clamped, 80.0, 0.001);
    }
    let pre = free.walk_velocity;
    outcome(
        (pre - 1.0).abs() <= 1e-12 && clamped.walk_velocity == 0.5,
        format!("pre-clamp {pre:.15} m/s, clamped {} m/s", clamped.walk_velocity),
    )
}

fn flat_walk_tracking() -> Outcome {
    let log = run_scenario(&ScenarioConfig::default()).unwrap();
    let t = swing_tracking(&log, 0.1, 0.1);
    outcome(
        t.within >= 0.9 && t.samples > 1000,
        format!("{:.1}% of {} swing samples within 0.1 m/s (>= 90%), rms {:.4}", 100.0 * t.within, t.samples, t.rms),
    )
}

fn delay_reproduction() -> Outcome {
    let cfg = ScenarioConfig::default();
    let log = run_scenario(&cfg).unwrap();
    let d = measure_loop_delay(&log).unwrap();
    let nominal = cfg.loop_config.delay_cycles as f64 / cfg.loop_config.rate;
    let exact = d.min == nominal && d.max == nominal;
    let rise = axis_step_response(&PlantParams::default(), &LoopConfig::default(), 0.5).unwrap();
    outcome(
        exact && (0.003..=0.008).contains(&rise.t10),
        format!(
            "loop delay {:.3}..{:.3} ms (= {:.3}), axis 10% rise {:.1} ms (3..8)",
            d.min * 1e3,
            d.max * 1e3,
            nominal * 1e3,
            rise.t10 * 1e3
        ),
    )
}

fn force_envelope() -> Outcome {
    let log = run_scenario(&ScenarioConfig::default()).unwrap();
    let e = swing_force_envelope(&log, 40.0);
    outcome(
        e.peak <= 60.0 && e.fraction_typical >= 0.8,
        format!("peak {:.1} N (<= 60), {:.1}% <= 40 N (>= 80%)", e.peak, 100.0 * e.fraction_typical),
    )
}

fn sizing_orderings() -> Outcome {
    let params = GaitParams {
        step_length: 0.67,
        walk_speed: 1.2,
        ..GaitParams::default()
    };
    let catalog = MotorCatalog::default();
    let traj = generate_gait(&params, 3.0 * params.cycle_time(), 0.001).unwrap();
    let req = required_actuation(&traj, 90.0, DEFAULT_CARRIED_MASS, &catalog).unwrap();
    let report = check_spec(&req, &catalog);
    let torque = req.z.peak_motor_torque > req.x.peak_motor_torque;
    let speed = req.x.peak_motor_speed > req.z.peak_motor_speed;
    outcome(
        torque && speed && report.pass(),
        format!(
            "torque z {:.1} > x {:.1} N·m, speed x {:.0} > z {:.0} RPM, spec {}",
            req.z.peak_motor_torque,
            req.x.peak_motor_torque,
            req.x.peak_motor_speed,
            req.z.peak_motor_speed,
            if report.pass() { "pass" } else { "fail" }
        ),
    )
}

fn random_message(rng: &mut ChaCha8Rng) -> OutboundMessage {
    let mut num = |scale: f64| rng.random_range(-scale..scale);
    let mut m = OutboundMessage {
        t: num(1e7).abs(),
        feet: [FootId::RIGHT, FootId::LEFT].map(|id| FootPose {
            id,
            x: 0.0,
            z: 0.0,
            phase: GaitPhase::Swing,
        }),
        avatar_forward: num(1e3),
        avatar_height: num(1e2),
        walk_velocity: num(1.0),
    };
    for f in &mut m.feet {
        f.x = rng.random_range(-0.5..0.5);
        f.z = rng.random_range(-0.2..0.3);
        f.phase = if rng.random_bool(0.5) { GaitPhase::Swing } else { GaitPhase::Stance };
    }
    m.quantized()
}

fn bridge_equivalence() -> Outcome {
    let slope = 0.4;
    let mut builtin = ScenarioConfig::incline(slope);
    builtin.bridge.decimation = 1;
    let mut external = builtin.clone();
    external.terrain = TerrainProfile::external();
    external.bridge.loopback = Some(TerrainProfile::Stair { slope });
    let a = run_scenario(&builtin).unwrap();
    let b = run_scenario(&external).unwrap();

    let mut worst: f64 = 0.0;
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        for (x, y) in fa.feet.iter().zip(&fb.feet) {
            worst = worst.max((x.desired_velocity - y.desired_velocity).norm());
        }
    }
    let same_events = a.events.len() == b.events.len()
        && a.events.iter().zip(&b.events).all(|(x, y)| {
            x.kind == y.kind && x.foot == y.foot && (x.time - y.time).abs() <= 1.0 / a.rate + 1e-9
        });

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut round_trip_failures = 0;
    for _ in 0..10_000 {
        let m = random_message(&mut rng);
        let decoded = encode(&m).and_then(|line| decode_outbound(&line));
        if decoded.ok() != Some(m) {
            round_trip_failures += 1;
        }
    }
    outcome(
        same_events && worst <= 1e-6 && round_trip_failures == 0,
        format!(
            "{} events matched within one tick: {same_events}, max command diff {worst:.1e} m/s, {round_trip_failures}/10000 round-trip failures",
            a.events.len()
        ),
    )
}

fn determinism_and_throughput() -> Outcome {
    let cfg = ScenarioConfig {
        seed: 42,
        ..ScenarioConfig::default()
    };
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    let (mut csv_a, mut csv_b) = (Vec::new(), Vec::new());
    a.write_csv(&mut csv_a).unwrap();
    b.write_csv(&mut csv_b).unwrap();
    let identical = a.frames == b.frames && csv_a == csv_b;

    let mut long = cfg.clone();
    long.loop_config.duration = 60.0;
    let start = Instant::now();
    let log = run_scenario(&long).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        identical && log.frames.len() == 60_000 && elapsed <= 0.6,
        format!("bit-identical replay: {identical}, 60 s simulated in {elapsed:.3} s (<= 0.6)"),
    )
}

fn vr_trial_shapes() -> Outcome {
    let dynamic = run_scenario(&ScenarioConfig::dynamic_walk()).unwrap();
    let avatar: Vec<f64> = dynamic.frames.iter().map(|f| -f.walk.d_x).collect();
    let decreases = avatar.windows(2).filter(|w| w[1] < w[0]).count();
    let v: Vec<f64> = dynamic.frames.iter().map(|f| f.walk.walk_velocity).collect();
    let peak = v.iter().cloned().fold(0.0, f64::max);
    let started = v[0] == 0.0 && peak >= 0.3;
    let stopped = v.last().is_some_and(|&end| end <= 0.02);

    let slope = 0.4;
    let uphill = run_scenario(&ScenarioConfig::incline(slope)).unwrap();
    let mut heights = Vec::new();
    let mut worst: f64 = 0.0;
    for e in uphill.events.iter().filter(|e| e.kind == ContactKind::HeelStrike) {
        let f = &uphill.frames[(e.time * uphill.rate).round() as usize];
        let estimated = -f.walk.d_z + e.position.z;
        let terrain = slope * (-f.walk.d_x + e.position.x);
        worst = worst.max((estimated - terrain).abs());
        heights.push(estimated);
    }
    let stepwise = heights.len() >= 5 && heights.windows(2).all(|w| w[1] > w[0]);
    outcome(
        decreases == 0 && started && stopped && stepwise && worst <= 0.005,
        format!(
            "dynamic: peak v {peak:.3}, final v {:.4}, {decreases} travel decreases; uphill: {} steps increasing {stepwise}, max height error {:.2} mm (<= 5)",
            v.last().unwrap_or(&f64::NAN),
            heights.len(),
            worst * 1e3
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("admittance oracle", admittance_oracle),
        ("steady-state magnitude", steady_state_magnitude),
        ("gait state machine", gait_state_machine),
        ("slope conservation", slope_conservation),
        ("velocity estimator", velocity_estimator),
        ("flat-ground tracking", flat_walk_tracking),
        ("delay reproduction", delay_reproduction),
        ("force envelope", force_envelope),
        ("sizing orderings", sizing_orderings),
        ("bridge equivalence", bridge_equivalence),
        ("determinism and throughput", determinism_and_throughput),
        ("walk trial shapes", vr_trial_shapes),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} AC{:02} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
