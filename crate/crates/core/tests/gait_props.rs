use proptest::prelude::*;

use gaitforge::gait::{ContactEvent, ContactKind, GaitPhase, PhaseThresholds, PhaseTracker};
use gaitforge::planar::{FootId, Planar};

const DT: f64 = 0.001;

/// Per-tick height above ground and vertical force.
fn traces() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.01f64..0.03, -40.0f64..40.0), 1..300)
}

fn run(trace: &[(f64, f64)], foot: FootId, initial: GaitPhase, th: &PhaseThresholds) -> (Vec<GaitPhase>, Vec<ContactEvent>) {
    let mut tracker = PhaseTracker::new(foot, initial);
    let mut phases = Vec::new();
    let mut events = Vec::new();
    for (k, &(z, fz)) in trace.iter().enumerate() {
        events.extend(tracker.update(Planar::new(0.0, z), Planar::ZERO, Planar::new(0.0, fz), 0.0, th, DT, k as f64 * DT));
        phases.push(tracker.phase());
    }
    (phases, events)
}

proptest! {
    #[test]
    fn events_alternate_and_match_phase_changes(trace in traces(), start_swing in any::<bool>()) {
        let th = PhaseThresholds::default();
        let initial = if start_swing { GaitPhase::Swing } else { GaitPhase::Stance };
        let (phases, events) = run(&trace, FootId::LEFT, initial, &th);
        let changes = std::iter::once(initial).chain(phases.iter().copied()).collect::<Vec<_>>()
            .windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert_eq!(changes, events.len());
        for w in events.windows(2) {
            prop_assert_ne!(w[0].kind, w[1].kind);
            prop_assert!(w[1].time - w[0].time + 1e-9 >= th.min_phase_dwell);
        }
        if let Some(first) = events.first() {
            let expected = if start_swing { ContactKind::HeelStrike } else { ContactKind::ToeOff };
            prop_assert_eq!(first.kind, expected);
        }
        prop_assert!(events.iter().all(|e| e.foot == FootId::LEFT));
    }

    #[test]
    fn heel_strikes_happen_at_contact_and_toe_offs_under_load(trace in traces()) {
        let th = PhaseThresholds::default();
        let (_, events) = run(&trace, FootId::RIGHT, GaitPhase::Swing, &th);
        for e in events {
            let (z, fz) = trace[(e.time / DT).round() as usize];
            match e.kind {
                ContactKind::HeelStrike => prop_assert!(z <= th.contact_epsilon),
                ContactKind::ToeOff => prop_assert!(fz >= th.liftoff_force),
            }
            prop_assert_eq!(e.position.z, z);
        }
    }

    #[test]
    fn feet_are_classified_independently(a in traces(), b in traces()) {
        let th = PhaseThresholds::default();
        let alone = run(&a, FootId::RIGHT, GaitPhase::Stance, &th);
        let mut right = PhaseTracker::new(FootId::RIGHT, GaitPhase::Stance);
        let mut left = PhaseTracker::new(FootId::LEFT, GaitPhase::Stance);
        let mut phases = Vec::new();
        for (k, &(z, fz)) in a.iter().enumerate() {
            let t = k as f64 * DT;
            right.update(Planar::new(0.0, z), Planar::ZERO, Planar::new(0.0, fz), 0.0, &th, DT, t);
            let (zl, fl) = b[k % b.len()];
            left.update(Planar::new(0.0, zl), Planar::ZERO, Planar::new(0.0, fl), 0.0, &th, DT, t);
            phases.push(right.phase());
        }
        prop_assert_eq!(phases, alone.0);
    }

    #[test]
    fn ground_offset_shifts_contact(trace in traces(), ground in -0.5f64..0.5) {
        let th = PhaseThresholds::default();
        let mut tracker = PhaseTracker::new(FootId::RIGHT, GaitPhase::Swing);
        let shifted: Vec<GaitPhase> = trace.iter().enumerate().map(|(k, &(z, fz))| {
            // Heights are chosen so the shifted comparison is exact in binary.
            let z = (z * 1024.0).round() / 1024.0;
            let g = (ground * 1024.0).round() / 1024.0;
            tracker.update(Planar::new(0.0, z + g), Planar::ZERO, Planar::new(0.0, fz), g, &th, DT, k as f64 * DT);
            tracker.phase()
        }).collect();
        let rounded: Vec<(f64, f64)> = trace.iter().map(|&(z, fz)| ((z * 1024.0).round() / 1024.0, fz)).collect();
        let reference = run(&rounded, FootId::RIGHT, GaitPhase::Swing, &th).0;
        prop_assert_eq!(shifted, reference);
    }
}
