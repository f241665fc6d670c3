//! The refinement loss terms as plain numbers: critic-score gap, gradient
//! penalty, segmentation consistency, and a toy critic fit.
//!
//! ```bash
//! cargo run --release --example adversarial_losses
//! ```

use std::error::Error;

use vesselkit::losses::{
    gradient_penalty, seg_consistency_masks, toy_adversarial_fit, total_loss, wasserstein_loss,
    AffineCritic, LossWeights,
};
use vesselkit::raster::{render_mask, Mask};
use vesselkit::synthesis::{synthesize, RadiusParams, ScaParams};

fn main() -> Result<(), Box<dyn Error>> {
    // score gap between two critic output batches
    let l_gan = wasserstein_loss(&[0.9, 1.1, 1.0], &[0.1, 0.2, 0.0])?;
    println!("wasserstein gap: {l_gan:.4}");

    // gradient penalty for a deliberately non-1-Lipschitz affine critic
    let critic = AffineCritic::new(vec![3.0, 4.0], 0.0);
    let x_hat = vec![vec![0.5, 0.5], vec![0.25, 0.75]];
    let l_gp = gradient_penalty(&critic, &x_hat, 10.0, 1e-4)?;
    println!("gradient penalty (|w| = 5, lambda = 10): {l_gp:.4}");

    // consistency between masks extracted from two renders of the same tree
    let g = synthesize(
        &ScaParams {
            target_nodes: 2000,
            seed: 5,
            ..Default::default()
        },
        &RadiusParams::default(),
    )?;
    let ps = g.fov_mm() / 256.0;
    let mask_a = render_mask(&g, 256, 256, ps, 0.5)?;
    let mask_b: Mask = render_mask(&g, 256, 256, ps, 0.6)?;
    let l_seg = seg_consistency_masks(&mask_a, &mask_b)?;
    println!("segmentation consistency (threshold 0.5 vs 0.6): {l_seg:.6}");

    let weights = LossWeights::default();
    let breakdown = total_loss(l_gan, l_gp, l_seg, &weights);
    println!(
        "total = {:.4} (gan {:.4} + {} * gp {:.4} + {} * seg {:.6})",
        breakdown.l_total, breakdown.l_gan, weights.lambda_gp, breakdown.l_gp,
        weights.lambda_seg, breakdown.l_seg
    );

    // toy fit: the critic learns to separate two feature clouds while the
    // penalty pulls its gradient norm toward 1
    let real: Vec<Vec<f64>> = (0..16).map(|i| vec![0.8 + 0.005 * i as f64, 0.55]).collect();
    let fake: Vec<Vec<f64>> = (0..16).map(|i| vec![0.2 + 0.005 * i as f64, 0.15]).collect();
    let trace = toy_adversarial_fit(&real, &fake, 200, 0.01)?;
    for step in [0usize, 10, 50, 100, 200] {
        let b = &trace[step];
        println!(
            "step {step:>3}: l_gan {:+.5}  l_gp {:8.5}  l_total {:+.5}",
            b.l_gan, b.l_gp, b.l_total
        );
    }
    Ok(())
}
