//! External terrain over the TCP bridge, served by a client thread.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::thread;

use gaitforge::bridge::{BridgeEndpoint, LoopbackService};
use gaitforge::cli::summarize;
use gaitforge::runtime::{LoopMode, ScenarioConfig, Simulation};
use gaitforge::terrain::TerrainProfile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let served = TerrainProfile::Stair { slope: 0.2 };
    let mut cfg = ScenarioConfig::default();
    cfg.terrain = TerrainProfile::external();
    cfg.human.perceived_terrain = Some(served.clone());
    cfg.loop_config.mode = LoopMode::WallClock;
    cfg.loop_config.duration = 5.0;

    let endpoint = BridgeEndpoint::bind("127.0.0.1:0")?;
    let addr = endpoint.local_addr();
    println!("bridge on {addr}");

    let client = thread::spawn(move || -> Result<usize, Box<dyn std::error::Error + Send + Sync>> {
        let mut service = LoopbackService::new(served)?;
        let stream = TcpStream::connect(addr)?;
        let mut writer = stream.try_clone()?;
        let mut served_lines = 0;
        for line in BufReader::new(stream).lines() {
            for reply in service.handle_line(&line?)? {
                writer.write_all(reply.as_bytes())?;
                served_lines += 1;
            }
        }
        Ok(served_lines)
    });

    let sim = Simulation::new(cfg)?.with_link(Box::new(endpoint));
    let log = sim.run();
    println!("{}", summarize(&log));
    match client.join() {
        Ok(Ok(n)) => println!("client answered with {n} lines"),
        Ok(Err(e)) => println!("client stopped: {e}"),
        Err(_) => println!("client panicked"),
    }
    Ok(())
}
