//! Time main-vessel extraction at two scales. The extraction step is
//! training-free and parameter-free; the only knob is the threshold ratio.
//!
//! ```bash
//! cargo run --release --example benchmark_extraction
//! ```

use std::error::Error;

use vesselkit::bench::{random_connected_graph, time_segmentation};
use vesselkit::segment::SegmentorParams;
use vesselkit::synthesis::{synthesize, RadiusParams, ScaParams};

fn main() -> Result<(), Box<dyn Error>> {
    let params = SegmentorParams::default();

    println!("synthesized vessel trees:");
    let mut medians = Vec::new();
    for (n, reps) in [(10_000usize, 100usize), (100_000, 30)] {
        let sca = ScaParams::scaled_to_density(n, 7);
        let g = synthesize(&sca, &RadiusParams::default())?;
        let stats = time_segmentation(&g, &params, reps)?;
        medians.push(stats.median_us);
        println!(
            "  {:>6} nodes / {:>6} edges: min {:>6} us, median {:>6} us, p95 {:>6} us ({} reps)",
            stats.nodes, stats.edges, stats.min_us, stats.median_us, stats.p95_us, stats.reps
        );
    }
    println!(
        "  10x nodes -> {:.1}x median time (trainable parameters: 0, visit cost: O(1))",
        medians[1] as f64 / medians[0] as f64
    );

    println!("random graphs with cross edges:");
    for n in [10_000usize, 100_000] {
        let g = random_connected_graph(n, 0.5, 7);
        let stats = time_segmentation(&g, &params, 30)?;
        println!(
            "  {:>6} nodes / {:>6} edges: min {:>6} us, median {:>6} us, p95 {:>6} us",
            stats.nodes, stats.edges, stats.min_us, stats.median_us, stats.p95_us
        );
    }
    Ok(())
}
