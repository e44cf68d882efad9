use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gaitforge::bridge::BridgeEndpoint;
use gaitforge::cli::{self, ExportKind, ScenarioArgs, SweepGrid};
use gaitforge::gaitgen::{check_spec, generate_gait, required_actuation, GaitParams, MotorCatalog, DEFAULT_CARRIED_MASS};
use gaitforge::runtime::{LoopMode, Simulation, TelemetryLog};
use gaitforge::terrain::TerrainProfile;

#[derive(Parser)]
#[command(name = "gaitforge", version, about = "Foot-platform locomotion interface simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop scenario.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Write the full telemetry CSV here.
        #[arg(long)]
        telemetry: Option<PathBuf>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
        /// Print the effective configuration as TOML and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Run the scenario over a virtual mass by virtual damping grid.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        masses: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        dampings: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Size the actuators for a synthetic gait and check the motor catalog.
    Size {
        #[arg(long, default_value_t = 0.67)]
        step_length: f64,
        #[arg(long, default_value_t = 1.2)]
        walk_speed: f64,
        #[arg(long, default_value_t = 0.14)]
        clearance: f64,
        #[arg(long, default_value_t = 90.0)]
        user_mass: f64,
        #[arg(long, default_value_t = DEFAULT_CARRIED_MASS)]
        carried_mass: f64,
        /// Motor catalog as TOML with `[x]` and `[z]` tables.
        #[arg(long)]
        motors: Option<PathBuf>,
        /// Write the generated trajectory CSV here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write figure CSVs and plots from a telemetry log or a fresh run.
    Export {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Telemetry CSV to export instead of running the scenario.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Export kinds; all when omitted.
        #[arg(long, value_delimiter = ',')]
        kind: Vec<String>,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Run the scenario in real time against the TCP terrain bridge.
    Serve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Listen address; overrides `bridge.address`.
        #[arg(long)]
        address: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type BoxError = Box<dyn std::error::Error>;

fn run(command: Command) -> Result<ExitCode, BoxError> {
    match command {
        Command::Simulate {
            scenario,
            telemetry,
            json,
            print_config,
        } => {
            let cfg = cli::parse_and_validate(&scenario)?;
            if print_config {
                print!("{}", cli::config_to_toml(&cfg)?);
                return Ok(ExitCode::SUCCESS);
            }
            let log = Simulation::new(cfg)?.run();
            if let Some(path) = telemetry {
                log.write_csv(BufWriter::new(File::create(path)?))?;
            }
            let summary = cli::summarize(&log);
            if json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                println!("{summary}");
            }
        }
        Command::Sweep {
            scenario,
            masses,
            dampings,
            json,
        } => {
            let base = cli::apply_overrides(
                match &scenario.config {
                    Some(p) => cli::load_config(p)?,
                    None => Default::default(),
                },
                &scenario,
            );
            let grid = SweepGrid {
                virtual_mass: masses,
                virtual_damping: dampings,
            };
            let reports = cli::run_sweep(&base, &grid)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                println!("{:>7} {:>7} {:>10} {:>10} {:>10} {:>8}  status", "m_v", "c_v", "peak N", "rms m/s", "osc ratio", "gain");
                for r in &reports {
                    match r.metrics() {
                        Some(m) => println!(
                            "{:>7.2} {:>7.2} {:>10.1} {:>10.4} {:>10.2} {:>8.4}  {}",
                            r.virtual_mass,
                            r.virtual_damping,
                            m.peak_swing_force,
                            m.tracking_rms,
                            m.oscillation.ratio,
                            m.steady_state_gain,
                            if m.oscillation.oscillatory { "oscillatory" } else { "ok" }
                        ),
                        None => {
                            if let cli::CellOutcome::Skipped { reason } = &r.outcome {
                                println!("{:>7.2} {:>7.2}  skipped: {reason}", r.virtual_mass, r.virtual_damping);
                            }
                        }
                    }
                }
            }
        }
        Command::Size {
            step_length,
            walk_speed,
            clearance,
            user_mass,
            carried_mass,
            motors,
            trajectory,
            json,
        } => {
            let params = GaitParams {
                step_length,
                walk_speed,
                foot_clearance: clearance,
                ..GaitParams::default()
            };
            let catalog: MotorCatalog = match motors {
                Some(p) => toml::from_str(&std::fs::read_to_string(p)?)?,
                None => MotorCatalog::default(),
            };
            let traj = generate_gait(&params, 3.0 * params.cycle_time(), 0.001)?;
            if let Some(path) = trajectory {
                traj.write_csv(BufWriter::new(File::create(path)?))?;
            }
            let req = required_actuation(&traj, user_mass, carried_mass, &catalog)?;
            let report = check_spec(&req, &catalog);
            if json {
                let out = serde_json::json!({ "requirement": req, "margins": report, "pass": report.pass() });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                for (name, r, m) in [("x", req.x, report.x), ("z", req.z, report.z)] {
                    println!(
                        "{name}: peak force {:.1} N, torque {:.2}/{:.2} N·m, speed {:.0}/{:.0} RPM  {}",
                        r.peak_force,
                        m.torque_required,
                        m.torque_available,
                        m.speed_required,
                        m.speed_available,
                        if m.pass() { "PASS" } else { "FAIL" }
                    );
                }
            }
            if !report.pass() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Export {
            scenario,
            log,
            kind,
            out_dir,
        } => {
            let kinds = if kind.is_empty() {
                ExportKind::ALL.to_vec()
            } else {
                kind.iter().map(|k| k.parse()).collect::<Result<Vec<ExportKind>, _>>()?
            };
            let log = match log {
                Some(path) => TelemetryLog::read_csv(BufReader::new(File::open(path)?))?,
                None => Simulation::new(cli::parse_and_validate(&scenario)?)?.run(),
            };
            for k in kinds {
                let files = cli::export(&log, k, &out_dir, k.as_str())?;
                println!("{k}: {} {}", files.csv.display(), files.plot.display());
            }
        }
        Command::Serve { scenario, address } => {
            let mut cfg = cli::parse_and_validate(&scenario)?;
            if let Some(a) = address {
                cfg.bridge.address = a;
            }
            cfg.loop_config.mode = LoopMode::WallClock;
            if cfg.bridge.loopback.is_none() && !matches!(cfg.terrain, TerrainProfile::External { .. }) {
                eprintln!("note: terrain is built in; the bridge only receives poses");
            }
            let endpoint = BridgeEndpoint::bind(&cfg.bridge.address)?;
            println!("bridge listening on {}", endpoint.local_addr());
            let log = Simulation::new(cfg)?.with_link(Box::new(endpoint)).run();
            println!("{}", cli::summarize(&log));
        }
    }
    Ok(ExitCode::SUCCESS)
}
