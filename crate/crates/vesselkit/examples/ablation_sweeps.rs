//! Reproduce the threshold-ratio and node-count ablations as CSV tables.
//!
//! ```bash
//! cargo run --release --example ablation_sweeps
//! ```

use std::error::Error;
use std::fs;
use std::path::Path;

use vesselkit::bench::{main_vessel_truth, sweep_nodes, sweep_rmin, RenderSettings};
use vesselkit::io::write_csv;
use vesselkit::synthesis::{synthesize, RadiusParams, ScaParams};

fn main() -> Result<(), Box<dyn Error>> {
    let out_dir = Path::new("target/example-output/ablation_sweeps");
    fs::create_dir_all(out_dir)?;

    let sca = ScaParams {
        target_nodes: 5000,
        seed: 17,
        ..Default::default()
    };
    let rp = RadiusParams::default();

    // ratio sweep: truth fixed at ratio 0.2, extraction swept over the grid
    let g = synthesize(&sca, &rp)?;
    let truth = main_vessel_truth(&g, 0.2)?;
    let settings = RenderSettings::for_graph(&g, 256);
    let grid = [0.0, 0.1, 0.2, 0.3, 0.5, 1.0];
    let rows = sweep_rmin(&g, &truth, &grid, &settings)?;
    println!("ratio   iou      dice     kept    time");
    for r in &rows {
        println!(
            "{:<7} {:.5}  {:.5}  {:>5.1}%  {:>5} us",
            r.parameter,
            r.iou,
            r.dice,
            100.0 * r.kept_node_fraction,
            r.runtime_us
        );
    }
    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.parameter, r.iou, r.dice, r.kept_node_fraction, r.runtime_us
            )
        })
        .collect();
    write_csv(
        &out_dir.join("rmin_sweep.csv"),
        "rmin,iou,dice,kept_fraction,runtime_us",
        &lines,
    )?;

    // node-count sweep at the fixed default ratio
    let rows = sweep_nodes(&sca, &rp, &[100, 1000, 10_000], 0.2, 0.2, 256)?;
    println!("\nnodes   iou      dice     kept");
    for r in &rows {
        println!(
            "{:<7} {:.5}  {:.5}  {:>5.1}%",
            r.parameter,
            r.iou,
            r.dice,
            100.0 * r.kept_node_fraction
        );
    }
    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.parameter, r.iou, r.dice, r.kept_node_fraction, r.runtime_us
            )
        })
        .collect();
    write_csv(
        &out_dir.join("node_sweep.csv"),
        "n,iou,dice,kept_fraction,runtime_us",
        &lines,
    )?;
    println!("\ncsv tables -> {}", out_dir.display());
    Ok(())
}
