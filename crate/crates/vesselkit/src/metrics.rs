//! Segmentation and image-similarity metrics: IoU, Dice, SSIM, MSE.
//!
//! Masks are compared by pixel counts; images are compared in normalized
//! [0, 1] intensity. For a pair of empty masks both IoU and Dice are
//! defined as 1 (perfect agreement on emptiness), which also keeps the
//! identity `dice = 2*iou / (1 + iou)` intact everywhere.
//!
//! SSIM uses a sliding uniform (box) window over all fully interior
//! positions, population moments, and constants `C1 = (k1*L)^2`,
//! `C2 = (k2*L)^2` with dynamic range `L = 1`.

use serde::Serialize;
use thiserror::Error;

use crate::raster::{Mask, RasterImage2D};

pub const DEFAULT_SSIM_WINDOW: usize = 7;
pub const DEFAULT_SSIM_K1: f64 = 0.01;
pub const DEFAULT_SSIM_K2: f64 = 0.03;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("shape mismatch: {a_w}x{a_h} vs {b_w}x{b_h}")]
    ShapeMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
    #[error("window size {window} invalid for {w}x{h} image (must be odd, >= 1, <= min dim)")]
    BadWindow { window: usize, w: usize, h: usize },
}

/// Raw overlap counts between two masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PixelCounts {
    pub intersection: u64,
    pub union: u64,
    pub a_only: u64,
    pub b_only: u64,
}

/// All four metrics plus the raw counts they derive from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub iou: f64,
    pub dice: f64,
    pub ssim: f64,
    pub mse: f64,
    pub pixel_counts: PixelCounts,
}

impl MetricsReport {
    /// Score `pred` against `gt`. When `images` is given, SSIM and MSE are
    /// computed on that pair; otherwise on the masks viewed as images.
    pub fn compute(
        pred: &Mask,
        gt: &Mask,
        images: Option<(&RasterImage2D, &RasterImage2D)>,
    ) -> Result<Self, MetricError> {
        let pixel_counts = pixel_counts(pred, gt)?;
        let iou = iou_from_counts(&pixel_counts);
        let dice = dice_from_counts(&pixel_counts);
        let (ssim_v, mse_v) = match images {
            Some((a, b)) => (
                ssim(a, b, DEFAULT_SSIM_WINDOW, DEFAULT_SSIM_K1, DEFAULT_SSIM_K2)?,
                mse(a, b)?,
            ),
            None => {
                let a = pred.to_image(1.0);
                let b = gt.to_image(1.0);
                let win = DEFAULT_SSIM_WINDOW.min(pred.width().min(pred.height()));
                let win = if win % 2 == 0 { win.saturating_sub(1).max(1) } else { win };
                (
                    ssim(&a, &b, win, DEFAULT_SSIM_K1, DEFAULT_SSIM_K2)?,
                    mse(&a, &b)?,
                )
            }
        };
        Ok(Self {
            iou,
            dice,
            ssim: ssim_v,
            mse: mse_v,
            pixel_counts,
        })
    }
}

fn check_mask_shapes(a: &Mask, b: &Mask) -> Result<(), MetricError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::ShapeMismatch {
            a_w: a.width(),
            a_h: a.height(),
            b_w: b.width(),
            b_h: b.height(),
        });
    }
    Ok(())
}

fn check_image_shapes(a: &RasterImage2D, b: &RasterImage2D) -> Result<(), MetricError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::ShapeMismatch {
            a_w: a.width(),
            a_h: a.height(),
            b_w: b.width(),
            b_h: b.height(),
        });
    }
    Ok(())
}

/// Overlap counts for two equally sized masks.
pub fn pixel_counts(a: &Mask, b: &Mask) -> Result<PixelCounts, MetricError> {
    check_mask_shapes(a, b)?;
    let mut c = PixelCounts {
        intersection: 0,
        union: 0,
        a_only: 0,
        b_only: 0,
    };
    for (&pa, &pb) in a.data().iter().zip(b.data()) {
        match (pa, pb) {
            (1, 1) => c.intersection += 1,
            (1, 0) => c.a_only += 1,
            (0, 1) => c.b_only += 1,
            _ => {}
        }
    }
    c.union = c.intersection + c.a_only + c.b_only;
    Ok(c)
}

fn iou_from_counts(c: &PixelCounts) -> f64 {
    if c.union == 0 {
        1.0
    } else {
        c.intersection as f64 / c.union as f64
    }
}

fn dice_from_counts(c: &PixelCounts) -> f64 {
    let total = 2 * c.intersection + c.a_only + c.b_only;
    if total == 0 {
        1.0
    } else {
        2.0 * c.intersection as f64 / total as f64
    }
}

/// Intersection over union; 1.0 when both masks are empty.
pub fn iou(a: &Mask, b: &Mask) -> Result<f64, MetricError> {
    Ok(iou_from_counts(&pixel_counts(a, b)?))
}

/// Dice coefficient `2|A∩B| / (|A| + |B|)`; 1.0 when both are empty.
pub fn dice(a: &Mask, b: &Mask) -> Result<f64, MetricError> {
    Ok(dice_from_counts(&pixel_counts(a, b)?))
}

/// Mean squared per-pixel difference.
pub fn mse(a: &RasterImage2D, b: &RasterImage2D) -> Result<f64, MetricError> {
    check_image_shapes(a, b)?;
    if a.data().is_empty() {
        return Ok(0.0);
    }
    let sq: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x - y) * (x - y))
        .collect();
    Ok(pairwise_sum(&sq) / sq.len() as f64)
}

/// Pairwise (cascade) summation: deterministic and more accurate than a
/// running sum for long pixel vectors.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Mean local SSIM over all sliding uniform windows.
pub fn ssim(
    a: &RasterImage2D,
    b: &RasterImage2D,
    window: usize,
    k1: f64,
    k2: f64,
) -> Result<f64, MetricError> {
    check_image_shapes(a, b)?;
    let (w, h) = (a.width(), a.height());
    if window == 0 || window % 2 == 0 || window > w || window > h {
        return Err(MetricError::BadWindow { window, w, h });
    }
    let c1 = (k1 * 1.0f64).powi(2);
    let c2 = (k2 * 1.0f64).powi(2);

    // summed-area tables over a, b, a^2, b^2, ab
    let sat = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        let mut s = vec![0.0f64; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += f(y * w + x);
                s[(y + 1) * (w + 1) + (x + 1)] = s[y * (w + 1) + (x + 1)] + row;
            }
        }
        s
    };
    let da = a.data();
    let db = b.data();
    let sa = sat(&|i| da[i]);
    let sb = sat(&|i| db[i]);
    let saa = sat(&|i| da[i] * da[i]);
    let sbb = sat(&|i| db[i] * db[i]);
    let sab = sat(&|i| da[i] * db[i]);
    let window_sum = |s: &[f64], x0: usize, y0: usize| -> f64 {
        let (x1, y1) = (x0 + window, y0 + window);
        s[y1 * (w + 1) + x1] - s[y0 * (w + 1) + x1] - s[y1 * (w + 1) + x0]
            + s[y0 * (w + 1) + x0]
    };

    let n = (window * window) as f64;
    let mut locals = Vec::with_capacity((w - window + 1) * (h - window + 1));
    for y0 in 0..=(h - window) {
        for x0 in 0..=(w - window) {
            let mu_a = window_sum(&sa, x0, y0) / n;
            let mu_b = window_sum(&sb, x0, y0) / n;
            let var_a = (window_sum(&saa, x0, y0) / n - mu_a * mu_a).max(0.0);
            let var_b = (window_sum(&sbb, x0, y0) / n - mu_b * mu_b).max(0.0);
            let cov_raw = window_sum(&sab, x0, y0) / n - mu_a * mu_b;
            // |cov| <= sqrt(var_a var_b) holds mathematically; clamp the
            // floating-point residue so the score stays within [-1, 1]
            let bound = (var_a * var_b).sqrt();
            let cov = cov_raw.clamp(-bound, bound);
            let luminance = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
            let structure = (2.0 * cov + c2) / (var_a + var_b + c2);
            locals.push(luminance * structure);
        }
    }
    Ok(pairwise_sum(&locals) / locals.len() as f64)
}
