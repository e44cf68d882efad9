use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::sync::mpsc::{SyncSender, TrySendError};

use serde::Serialize;

use crate::error::TelemetryError;
use crate::gait::{ContactEvent, GaitPhase};
use crate::planar::Planar;

/// First line of every telemetry CSV.
pub const CSV_SCHEMA: &str = "gaitforge-telemetry-v1";

/// Column order of the telemetry CSV; `f0_`/`f1_` prefix the per-foot block.
pub const FOOT_COLUMNS: [&str; 12] = [
    "phase", "fx", "fz", "vdx", "vdz", "vx", "vz", "x", "z", "ground", "limit", "fallback",
];
pub const HEAD_COLUMNS: [&str; 5] = ["tick", "t_start", "t_end", "jitter", "overrun"];
pub const WALK_COLUMNS: [&str; 4] = ["walk_vx", "d_x", "d_z", "slope"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootTelemetry {
    pub phase: GaitPhase,
    pub measured_force: Planar,
    pub desired_velocity: Planar,
    pub velocity: Planar,
    pub position: Planar,
    /// Virtual ground height used for classification this tick, m.
    pub ground_z: f64,
    /// A limit switch was hit on either axis.
    pub limit: bool,
    /// The ground height came from the external fallback.
    pub ground_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkTelemetry {
    pub walk_velocity: f64,
    pub d_x: f64,
    pub d_z: f64,
    pub slope: f64,
}

/// One control tick. Times are nanoseconds since the start of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryFrame {
    pub tick: u64,
    /// When the force sample that drove this tick's motion was read.
    pub t_start_ns: Option<u64>,
    /// When this tick's motion was recorded.
    pub t_end_ns: u64,
    /// Lateness of the tick start against its schedule.
    pub jitter_ns: i64,
    pub overrun: bool,
    pub feet: [FootTelemetry; 2],
    pub walk: WalkTelemetry,
}

impl TelemetryFrame {
    pub fn t(&self) -> f64 {
        self.t_end_ns as f64 * 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunStats {
    pub admittance_faults: u64,
    pub walk_faults: u64,
    pub degenerate_slopes: u64,
    pub terrain_fallbacks: u64,
    pub bridge_errors: u64,
    pub tap_dropped: u64,
    pub overruns: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TelemetryLog {
    pub rate: f64,
    pub frames: Vec<TelemetryFrame>,
    pub events: Vec<ContactEvent>,
    pub stats: RunStats,
}

fn secs(ns: u64) -> String {
    format!("{}.{:09}", ns / 1_000_000_000, ns % 1_000_000_000)
}

fn parse_secs(s: &str) -> Option<u64> {
    let (whole, frac) = s.split_once('.').unwrap_or((s, "0"));
    let whole: u64 = whole.parse().ok()?;
    let mut frac = frac.to_string();
    if frac.len() > 9 {
        return None;
    }
    while frac.len() < 9 {
        frac.push('0');
    }
    Some(whole * 1_000_000_000 + frac.parse::<u64>().ok()?)
}

pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = HEAD_COLUMNS.iter().map(|c| c.to_string()).collect();
    for foot in 0..2 {
        cols.extend(FOOT_COLUMNS.iter().map(|c| format!("f{foot}_{c}")));
    }
    cols.extend(WALK_COLUMNS.iter().map(|c| c.to_string()));
    cols
}

/// Streams frames to CSV. The schema line and column header are written on creation.
pub struct CsvTelemetryWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvTelemetryWriter<W> {
    pub fn new(mut out: W) -> Result<Self, TelemetryError> {
        writeln!(out, "{CSV_SCHEMA}")?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(csv_header()).map_err(|e| TelemetryError::Format(e.to_string()))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, f: &TelemetryFrame) -> Result<(), TelemetryError> {
        let mut row: Vec<String> = vec![
            f.tick.to_string(),
            f.t_start_ns.map(secs).unwrap_or_default(),
            secs(f.t_end_ns),
            f.jitter_ns.to_string(),
            u8::from(f.overrun).to_string(),
        ];
        for foot in &f.feet {
            row.extend([
                foot.phase.as_str().to_string(),
                foot.measured_force.x.to_string(),
                foot.measured_force.z.to_string(),
                foot.desired_velocity.x.to_string(),
                foot.desired_velocity.z.to_string(),
                foot.velocity.x.to_string(),
                foot.velocity.z.to_string(),
                foot.position.x.to_string(),
                foot.position.z.to_string(),
                foot.ground_z.to_string(),
                u8::from(foot.limit).to_string(),
                u8::from(foot.ground_fallback).to_string(),
            ]);
        }
        row.extend([
            f.walk.walk_velocity.to_string(),
            f.walk.d_x.to_string(),
            f.walk.d_z.to_string(),
            f.walk.slope.to_string(),
        ]);
        self.inner.write_record(&row).map_err(|e| TelemetryError::Format(e.to_string()))
    }

    pub fn finish(mut self) -> Result<W, TelemetryError> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| TelemetryError::Io(e.into_error()))
    }
}

impl TelemetryLog {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TelemetryError> {
        let mut w = CsvTelemetryWriter::new(out)?;
        for f in &self.frames {
            w.write(f)?;
        }
        w.finish()?;
        Ok(())
    }

    /// Parses a telemetry CSV. Contact events are rebuilt from phase changes
    /// and the rate from the tick spacing.
    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self, TelemetryError> {
        let mut schema = String::new();
        input.read_line(&mut schema)?;
        if schema.trim_end() != CSV_SCHEMA {
            return Err(TelemetryError::Format(format!(
                "expected schema line `{CSV_SCHEMA}`, found `{}`",
                schema.trim_end()
            )));
        }
        let mut reader = csv::Reader::from_reader(input);
        let header = reader.headers().map_err(|e| TelemetryError::Format(e.to_string()))?.clone();
        let expected = csv_header();
        if header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(TelemetryError::Format("column header does not match the v1 schema".into()));
        }
        let mut frames = Vec::new();
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| TelemetryError::Format(e.to_string()))?;
            let line = row + 3;
            let bad = |col: usize| TelemetryError::Format(format!("line {line}: bad value in column `{}`", expected[col]));
            let num = |col: usize| -> Result<f64, TelemetryError> {
                rec.get(col).and_then(|v| v.parse().ok()).ok_or_else(|| bad(col))
            };
            let flag = |col: usize| -> Result<bool, TelemetryError> {
                match rec.get(col) {
                    Some("0") => Ok(false),
                    Some("1") => Ok(true),
                    _ => Err(bad(col)),
                }
            };
            let t_start_ns = match rec.get(1) {
                Some("") => None,
                Some(s) => Some(parse_secs(s).ok_or_else(|| bad(1))?),
                None => return Err(bad(1)),
            };
            let mut feet = [FootTelemetry {
                phase: GaitPhase::Stance,
                measured_force: Planar::ZERO,
                desired_velocity: Planar::ZERO,
                velocity: Planar::ZERO,
                position: Planar::ZERO,
                ground_z: 0.0,
                limit: false,
                ground_fallback: false,
            }; 2];
            for (i, foot) in feet.iter_mut().enumerate() {
                let b = HEAD_COLUMNS.len() + i * FOOT_COLUMNS.len();
                *foot = FootTelemetry {
                    phase: rec.get(b).and_then(|p| p.parse().ok()).ok_or_else(|| bad(b))?,
                    measured_force: Planar::new(num(b + 1)?, num(b + 2)?),
                    desired_velocity: Planar::new(num(b + 3)?, num(b + 4)?),
                    velocity: Planar::new(num(b + 5)?, num(b + 6)?),
                    position: Planar::new(num(b + 7)?, num(b + 8)?),
                    ground_z: num(b + 9)?,
                    limit: flag(b + 10)?,
                    ground_fallback: flag(b + 11)?,
                };
            }
            let w = HEAD_COLUMNS.len() + 2 * FOOT_COLUMNS.len();
            frames.push(TelemetryFrame {
                tick: rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(|| bad(0))?,
                t_start_ns,
                t_end_ns: rec.get(2).and_then(parse_secs).ok_or_else(|| bad(2))?,
                jitter_ns: rec.get(3).and_then(|v| v.parse().ok()).ok_or_else(|| bad(3))?,
                overrun: flag(4)?,
                feet,
                walk: WalkTelemetry {
                    walk_velocity: num(w)?,
                    d_x: num(w + 1)?,
                    d_z: num(w + 2)?,
                    slope: num(w + 3)?,
                },
            });
        }
        let rate = match frames.as_slice() {
            [first, .., last] if last.tick > first.tick && last.t_end_ns > first.t_end_ns => {
                (last.tick - first.tick) as f64 * 1e9 / (last.t_end_ns - first.t_end_ns) as f64
            }
            _ => 0.0,
        };
        let events = contact_events(&frames);
        Ok(Self {
            rate,
            frames,
            events,
            stats: RunStats::default(),
        })
    }
}

/// Rebuilds heel-strike and toe-off events from the per-foot phase columns.
pub fn contact_events(frames: &[TelemetryFrame]) -> Vec<ContactEvent> {
    use crate::gait::detect_event;
    use crate::planar::FootId;
    let mut events = Vec::new();
    for pair in frames.windows(2) {
        for foot in FootId::BOTH {
            let prev = pair[0].feet[foot.index()];
            let next = pair[1].feet[foot.index()];
            let state = crate::gait::FootState {
                position: next.position,
                velocity: next.velocity,
                measured_force: next.measured_force,
                phase: prev.phase,
            };
            if let Some(ev) = detect_event(prev.phase, next.phase, foot, &state, pair[1].t()) {
                events.push(ev);
            }
        }
    }
    events
}

/// Non-blocking hand-off of frames to a consumer thread over a bounded queue.
#[derive(Debug)]
pub struct TelemetryTap {
    tx: SyncSender<TelemetryFrame>,
    dropped: u64,
}

impl TelemetryTap {
    pub fn new(tx: SyncSender<TelemetryFrame>) -> Self {
        Self { tx, dropped: 0 }
    }

    /// Offers a frame; when the queue is full or closed it is dropped and counted.
    pub fn offer(&mut self, frame: &TelemetryFrame) {
        match self.tx.try_send(*frame) {
            Ok(()) => {}
            Err(TrySendError::Full(_)) | Err(TrySendError::Disconnected(_)) => self.dropped += 1,
        }
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }
}

/// Fixed-capacity in-memory history of the most recent frames.
#[derive(Debug, Clone)]
pub struct FrameRing {
    frames: VecDeque<TelemetryFrame>,
    capacity: usize,
}

impl FrameRing {
    pub fn new(capacity: usize) -> Self {
        Self {
            frames: VecDeque::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    pub fn push(&mut self, frame: TelemetryFrame) {
        if self.frames.len() == self.capacity {
            self.frames.pop_front();
        }
        self.frames.push_back(frame);
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TelemetryFrame> {
        self.frames.iter()
    }
}
