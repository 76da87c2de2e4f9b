//! Runs the reference speed-limit sweep and prints one row per limit.
//!
//! `cargo run --release --example sweep -- [cells]`

use ibvp_core::traffic::{sweep_speed_limits, TrafficScenario, REFERENCE_SPEEDS_KMH};
use ibvp_core::Execution;

fn main() -> Result<(), ibvp_core::Error> {
    let cells = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let start = std::time::Instant::now();
    let rows = sweep_speed_limits(
        &TrafficScenario::reference(40.0),
        &REFERENCE_SPEEDS_KMH,
        cells,
        0.9,
        Execution::Parallel,
    )?;
    println!("V_kmh,J,total_discharge,emptying_time");
    for r in rows {
        let empty = r.emptying_time.map_or(String::from("NA"), |t| t.to_string());
        println!("{},{},{},{}", r.v_red_kmh, r.j, r.total_discharge, empty);
    }
    eprintln!("elapsed {:?}", start.elapsed());
    Ok(())
}
