use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use plotters::prelude::*;

use crate::error::TelemetryError;
use crate::gait::ContactKind;
use crate::runtime::TelemetryLog;

/// Sample rate of exported series, Hz.
pub const EXPORT_RATE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    /// Foot path with interaction-force vectors.
    TrajectoryForce,
    /// Desired versus actual platform velocity and the error.
    VelocityTracking,
    /// Platform travel, avatar height and footstep heights.
    Travel,
}

impl ExportKind {
    pub const ALL: [ExportKind; 3] = [ExportKind::TrajectoryForce, ExportKind::VelocityTracking, ExportKind::Travel];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportKind::TrajectoryForce => "trajectory-force",
            ExportKind::VelocityTracking => "velocity-tracking",
            ExportKind::Travel => "travel",
        }
    }
}

impl fmt::Display for ExportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExportKind {
    type Err = TelemetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| TelemetryError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedFiles {
    pub csv: PathBuf,
    pub plot: PathBuf,
}

/// Frames kept at [`EXPORT_RATE`]; every frame when the log is slower.
fn decimated(log: &TelemetryLog) -> impl Iterator<Item = &crate::runtime::TelemetryFrame> {
    let step = ((log.rate / EXPORT_RATE).round() as usize).max(1);
    log.frames.iter().step_by(step)
}

fn csv_err(e: csv::Error) -> TelemetryError {
    TelemetryError::Format(e.to_string())
}

fn plot_err<E: std::fmt::Display>(e: E) -> TelemetryError {
    TelemetryError::Plot(e.to_string())
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad, hi + pad)
}

/// Writes `<stem>.csv` and `<stem>.svg` for `kind` into `dir`.
pub fn export(log: &TelemetryLog, kind: ExportKind, dir: &Path, stem: &str) -> Result<ExportedFiles, TelemetryError> {
    if log.frames.is_empty() {
        return Err(TelemetryError::Empty);
    }
    std::fs::create_dir_all(dir)?;
    let files = ExportedFiles {
        csv: dir.join(format!("{stem}.csv")),
        plot: dir.join(format!("{stem}.svg")),
    };
    match kind {
        ExportKind::TrajectoryForce => trajectory_force(log, &files)?,
        ExportKind::VelocityTracking => velocity_tracking(log, &files)?,
        ExportKind::Travel => travel(log, &files)?,
    }
    Ok(files)
}

fn trajectory_force(log: &TelemetryLog, files: &ExportedFiles) -> Result<(), TelemetryError> {
    let mut w = csv::Writer::from_path(&files.csv).map_err(csv_err)?;
    w.write_record(["t", "foot", "phase", "x", "z", "f_x", "f_z"]).map_err(csv_err)?;
    for f in decimated(log) {
        for (i, ft) in f.feet.iter().enumerate() {
            w.serialize((f.t(), i, ft.phase.as_str(), ft.position.x, ft.position.z, ft.measured_force.x, ft.measured_force.z))
                .map_err(csv_err)?;
        }
    }
    w.flush()?;

    // Force arrows are drawn at this many metres per newton.
    let scale = 0.002;
    let root = SVGBackend::new(&files.plot, (900, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let swing = |ft: &crate::runtime::FootTelemetry| ft.phase == crate::gait::GaitPhase::Swing;
    let xs = range(log.frames.iter().flat_map(|f| f.feet.iter().map(|ft| ft.position.x)));
    let zs = range(log.frames.iter().flat_map(|f| {
        f.feet
            .iter()
            .map(move |ft| ft.position.z + if swing(ft) { ft.measured_force.z * scale } else { 0.0 })
    }));
    let mut chart = ChartBuilder::on(&root)
        .caption("Foot trajectory and swing interaction force", ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(xs.0..xs.1, zs.0..zs.1)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("x (m)").y_desc("z (m)").draw().map_err(plot_err)?;
    let colors = [BLUE, RED];
    for foot in 0..2 {
        let color = colors[foot];
        chart
            .draw_series(LineSeries::new(
                log.frames.iter().map(|f| (f.feet[foot].position.x, f.feet[foot].position.z)),
                color.mix(0.6),
            ))
            .map_err(plot_err)?
            .label(format!("foot {foot}"))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        let arrows = decimated(log).filter(|f| swing(&f.feet[foot])).step_by(5).map(|f| {
            let ft = &f.feet[foot];
            let base = (ft.position.x, ft.position.z);
            let tip = (base.0 + ft.measured_force.x * scale, base.1 + ft.measured_force.z * scale);
            PathElement::new(vec![base, tip], BLACK.mix(0.7))
        });
        chart.draw_series(arrows).map_err(plot_err)?;
    }
    chart.configure_series_labels().border_style(BLACK).draw().map_err(plot_err)?;
    root.present().map_err(plot_err)
}

fn velocity_tracking(log: &TelemetryLog, files: &ExportedFiles) -> Result<(), TelemetryError> {
    let mut w = csv::Writer::from_path(&files.csv).map_err(csv_err)?;
    w.write_record(["t", "foot", "phase", "vd_x", "v_x", "e_x", "vd_z", "v_z", "e_z"]).map_err(csv_err)?;
    for f in decimated(log) {
        for (i, ft) in f.feet.iter().enumerate() {
            let e = ft.desired_velocity - ft.velocity;
            w.serialize((
                f.t(),
                i,
                ft.phase.as_str(),
                ft.desired_velocity.x,
                ft.velocity.x,
                e.x,
                ft.desired_velocity.z,
                ft.velocity.z,
                e.z,
            ))
            .map_err(csv_err)?;
        }
    }
    w.flush()?;

    let root = SVGBackend::new(&files.plot, (900, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let t_end = log.frames.last().map_or(1.0, |f| f.t());
    let vs = range(log.frames.iter().flat_map(|f| {
        let ft = &f.feet[0];
        [ft.desired_velocity.x, ft.velocity.x, ft.desired_velocity.x - ft.velocity.x]
    }));
    let mut chart = ChartBuilder::on(&root)
        .caption("Foot 0 x velocity: target, actual and error", ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..t_end, vs.0..vs.1)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("t (s)").y_desc("m/s").draw().map_err(plot_err)?;
    type Pick = fn(&crate::runtime::FootTelemetry) -> f64;
    let series: [(&str, RGBColor, Pick); 3] = [
        ("target", BLUE, |ft| ft.desired_velocity.x),
        ("actual", RED, |ft| ft.velocity.x),
        ("error", BLACK, |ft| ft.desired_velocity.x - ft.velocity.x),
    ];
    for (name, color, pick) in series {
        chart
            .draw_series(LineSeries::new(log.frames.iter().map(|f| (f.t(), pick(&f.feet[0]))), color))
            .map_err(plot_err)?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart.configure_series_labels().border_style(BLACK).draw().map_err(plot_err)?;
    root.present().map_err(plot_err)
}

fn travel(log: &TelemetryLog, files: &ExportedFiles) -> Result<(), TelemetryError> {
    // Terrain height at each heel strike, carried forward until the next one.
    let strikes: Vec<(f64, f64)> = log
        .events
        .iter()
        .filter(|e| e.kind == ContactKind::HeelStrike)
        .filter_map(|e| {
            let tick = (e.time * log.rate).round() as usize;
            let frame = log.frames.get(tick)?;
            Some((e.time, frame.feet[e.foot.index()].ground_z))
        })
        .collect();
    let step_height_at = |t: f64| strikes.iter().take_while(|(ts, _)| *ts <= t).last().map(|(_, h)| *h);

    let mut w = csv::Writer::from_path(&files.csv).map_err(csv_err)?;
    w.write_record(["t", "walk_velocity", "d_x", "d_z", "avatar_x", "avatar_z", "slope", "step_height"])
        .map_err(csv_err)?;
    for f in decimated(log) {
        let wk = &f.walk;
        let step = step_height_at(f.t()).map_or(String::new(), |h| h.to_string());
        w.write_record([
            f.t().to_string(),
            wk.walk_velocity.to_string(),
            wk.d_x.to_string(),
            wk.d_z.to_string(),
            (-wk.d_x).to_string(),
            (-wk.d_z).to_string(),
            wk.slope.to_string(),
            step,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let root = SVGBackend::new(&files.plot, (900, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let (upper, lower) = root.split_vertically(300);
    let t_end = log.frames.last().map_or(1.0, |f| f.t());

    let xs = range(log.frames.iter().map(|f| -f.walk.d_x));
    let mut top = ChartBuilder::on(&upper)
        .caption("Avatar forward travel", ("sans-serif", 18))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..t_end, xs.0..xs.1)
        .map_err(plot_err)?;
    top.configure_mesh().y_desc("-d_x (m)").draw().map_err(plot_err)?;
    top.draw_series(LineSeries::new(log.frames.iter().map(|f| (f.t(), -f.walk.d_x)), BLUE))
        .map_err(plot_err)?;

    let zs = range(log.frames.iter().map(|f| -f.walk.d_z).chain(strikes.iter().map(|s| s.1)));
    let mut bottom = ChartBuilder::on(&lower)
        .caption("Avatar height and footstep terrain heights", ("sans-serif", 18))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..t_end, zs.0..zs.1)
        .map_err(plot_err)?;
    bottom.configure_mesh().x_desc("t (s)").y_desc("m").draw().map_err(plot_err)?;
    bottom
        .draw_series(LineSeries::new(log.frames.iter().map(|f| (f.t(), -f.walk.d_z)), RED))
        .map_err(plot_err)?
        .label("-d_z")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], RED));
    bottom
        .draw_series(strikes.iter().map(|&(t, h)| Circle::new((t, h), 4, BLACK.filled())))
        .map_err(plot_err)?
        .label("footstep height")
        .legend(|(x, y)| Circle::new((x + 10, y), 4, BLACK.filled()));
    bottom.configure_series_labels().border_style(BLACK).draw().map_err(plot_err)?;
    root.present().map_err(plot_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_kind_lists_valid_kinds() {
        let err = "forces".parse::<ExportKind>().unwrap_err().to_string();
        for k in ExportKind::ALL {
            assert!(err.contains(k.as_str()), "{err}");
        }
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in ExportKind::ALL {
            assert_eq!(k.as_str().parse::<ExportKind>().unwrap(), k);
        }
    }

    #[test]
    fn empty_log_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = export(&TelemetryLog::default(), ExportKind::Travel, dir.path(), "x").unwrap_err();
        assert!(matches!(err, TelemetryError::Empty));
    }
}
