//! Score an extraction against synthesis-time truth with the full metric
//! suite (IoU, Dice, SSIM, MSE).
//!
//! ```bash
//! cargo run --release --example evaluate_masks
//! ```

use std::error::Error;

use vesselkit::bench::main_vessel_truth;
use vesselkit::metrics::MetricsReport;
use vesselkit::raster::{apply_octa_style, render_enface, render_mask, StyleParams};
use vesselkit::segment::{extract_main, SegmentorParams};
use vesselkit::synthesis::{synthesize, RadiusParams, ScaParams};

fn main() -> Result<(), Box<dyn Error>> {
    let sca = ScaParams {
        target_nodes: 5000,
        seed: 3,
        ..Default::default()
    };
    let g = synthesize(&sca, &RadiusParams::default())?;
    let side = 512;
    let ps = g.fov_mm() / side as f64;

    // truth from the generator, prediction from the segmentor
    let truth = main_vessel_truth(&g, 0.2)?;
    let truth_mask = render_mask(&truth, side, side, ps, 0.5)?;
    let result = extract_main(&g, &SegmentorParams::default())?;
    let main_mask = render_mask(&result.g_main, side, side, ps, 0.5)?;

    // image pair for SSIM/MSE: clean render vs its styled version
    let clean = render_enface(&g, side, side, ps)?;
    let styled = apply_octa_style(&clean, &StyleParams::default())?;

    let report = MetricsReport::compute(&main_mask, &truth_mask, Some((&styled, &clean)))?;
    println!("iou  = {:.6}", report.iou);
    println!("dice = {:.6}", report.dice);
    println!("ssim = {:.6}  (styled vs clean render)", report.ssim);
    println!("mse  = {:.6}", report.mse);
    println!(
        "pixels: intersection {}, union {}, pred-only {}, truth-only {}",
        report.pixel_counts.intersection,
        report.pixel_counts.union,
        report.pixel_counts.a_only,
        report.pixel_counts.b_only
    );
    Ok(())
}
