//! Render a synthesized tree as an en-face image, apply the OCTA style,
//! and write a small 3D volume.
//!
//! ```bash
//! cargo run --release --example render_octa_image
//! ```

use std::error::Error;
use std::fs;
use std::path::Path;

use vesselkit::io::{image_stats, write_pgm, write_volume_raw, BitDepth};
use vesselkit::raster::{apply_octa_style, render_enface, render_volume, StyleParams};
use vesselkit::synthesis::{synthesize, RadiusParams, ScaParams};

fn main() -> Result<(), Box<dyn Error>> {
    let out_dir = Path::new("target/example-output/render_octa_image");
    fs::create_dir_all(out_dir)?;

    let sca = ScaParams {
        target_nodes: 6000,
        seed: 7,
        ..Default::default()
    };
    let g = synthesize(&sca, &RadiusParams::default())?;
    let side = 512;
    let ps = g.fov_mm() / side as f64;

    let clean = render_enface(&g, side, side, ps)?;
    write_pgm(&clean, &out_dir.join("enface.pgm"), BitDepth::Sixteen)?;

    let styled = apply_octa_style(&clean, &StyleParams::default())?;
    write_pgm(&styled, &out_dir.join("styled.pgm"), BitDepth::Eight)?;

    let s = image_stats(&styled);
    println!(
        "styled image: mean {:.3}, std {:.3}, range [{:.3}, {:.3}]",
        s.mean, s.std, s.min, s.max
    );

    // a coarse volume spanning the 0.3 mm slab
    let vol = render_volume(&g, (128, 128, 16), [g.fov_mm() / 128.0; 3])?;
    write_volume_raw(&vol, &out_dir.join("volume.raw"))?;
    let mip = vol.max_intensity_projection_z();
    write_pgm(&mip, &out_dir.join("volume_mip.pgm"), BitDepth::Eight)?;

    println!("outputs -> {}", out_dir.display());
    Ok(())
}
