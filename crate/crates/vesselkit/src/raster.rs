//! Rendering vessel graphs to images, volumes, and masks, plus the
//! procedural OCTA style transform.
//!
//! Edges render as capsules: a segment whose radius interpolates linearly
//! between the endpoint radii. Pixel intensity is 1 inside the capsule and
//! falls off linearly to 0 across a one-pixel anti-alias band outside the
//! surface. Overlapping structures compose with `max`, mirroring the
//! maximum-projection character of en-face angiography.
//!
//! All per-pixel computations are pure functions of the pixel coordinate
//! and an explicit seed, so outputs are bit-identical regardless of
//! evaluation order.

use thiserror::Error;

use crate::graph::VesselGraph;
use crate::rng::{clipped_gaussian, hash2, hash3, unit_f64};

/// Grayscale en-face image with intensities in [0, 1], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage2D {
    width: usize,
    height: usize,
    pixel_size: f64,
    data: Vec<f64>,
}

impl RasterImage2D {
    pub fn zeros(width: usize, height: usize, pixel_size: f64) -> Self {
        Self {
            width,
            height,
            pixel_size,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_data(
        width: usize,
        height: usize,
        pixel_size: f64,
        data: Vec<f64>,
    ) -> Result<Self, RasterError> {
        if data.len() != width * height {
            return Err(RasterError::InvalidData(format!(
                "expected {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(RasterError::InvalidData(
                "intensities must be finite and within [0, 1]".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            pixel_size,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    fn set_max(&mut self, x: usize, y: usize, v: f64) {
        let px = &mut self.data[y * self.width + x];
        if v > *px {
            *px = v;
        }
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            crate::metrics::pairwise_sum(&self.data) / self.data.len() as f64
        }
    }
}

/// Grayscale volume with intensities in [0, 1]; x varies fastest, then y,
/// then z.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume3D {
    width: usize,
    height: usize,
    depth: usize,
    voxel_size: [f64; 3],
    data: Vec<f64>,
}

impl Volume3D {
    pub fn zeros(width: usize, height: usize, depth: usize, voxel_size: [f64; 3]) -> Self {
        Self {
            width,
            height,
            depth,
            voxel_size,
            data: vec![0.0; width * height * depth],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.depth)
    }

    pub fn voxel_size(&self) -> [f64; 3] {
        self.voxel_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[(z * self.height + y) * self.width + x]
    }

    #[inline]
    fn set_max(&mut self, x: usize, y: usize, z: usize, v: f64) {
        let px = &mut self.data[(z * self.height + y) * self.width + x];
        if v > *px {
            *px = v;
        }
    }

    /// Maximum-intensity projection along z. The result reuses the x-axis
    /// voxel size as its pixel size.
    pub fn max_intensity_projection_z(&self) -> RasterImage2D {
        let mut img = RasterImage2D::zeros(self.width, self.height, self.voxel_size[0]);
        for z in 0..self.depth {
            for y in 0..self.height {
                for x in 0..self.width {
                    img.set_max(x, y, self.get(x, y, z));
                }
            }
        }
        img
    }
}

/// Binary segmentation raster; data holds 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Mask {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if data.len() != width * height {
            return Err(RasterError::InvalidData(format!(
                "expected {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(RasterError::InvalidData("mask values must be 0 or 1".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Threshold an image: pixels with intensity >= `threshold` become 1.
    pub fn from_image(img: &RasterImage2D, threshold: f64) -> Result<Self, RasterError> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(RasterError::InvalidThreshold(threshold));
        }
        Ok(Self {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| u8::from(v >= threshold)).collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// View as a float image (0.0 / 1.0) for image metrics.
    pub fn to_image(&self, pixel_size: f64) -> RasterImage2D {
        RasterImage2D {
            width: self.width,
            height: self.height,
            pixel_size,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Procedural OCTA style: capillary background texture, vessel gain,
/// gamma contrast, and speckle noise.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleParams {
    /// Multiplier on the rendered vessel signal.
    pub vessel_gain: f64,
    /// Strength of the capillary background texture, in [0, 1].
    pub background_capillary_density: f64,
    /// Standard deviation of the additive speckle noise.
    pub speckle_sigma: f64,
    /// Contrast exponent; 1.0 is identity.
    pub contrast_gamma: f64,
    pub seed: u64,
}

impl Default for StyleParams {
    fn default() -> Self {
        Self {
            vessel_gain: 1.0,
            background_capillary_density: 0.25,
            speckle_sigma: 0.03,
            contrast_gamma: 0.9,
            seed: 7,
        }
    }
}

impl StyleParams {
    pub fn validate(&self) -> Result<(), RasterError> {
        if !(self.speckle_sigma >= 0.0 && self.speckle_sigma.is_finite()) {
            return Err(RasterError::InvalidData(format!(
                "speckle_sigma must be >= 0, got {}",
                self.speckle_sigma
            )));
        }
        if !(self.contrast_gamma > 0.0 && self.contrast_gamma.is_finite()) {
            return Err(RasterError::InvalidData(format!(
                "contrast_gamma must be > 0, got {}",
                self.contrast_gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("threshold must be in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("invalid raster data: {0}")]
    InvalidData(String),
}

/// Linear falloff from 1 inside the surface to 0 across the anti-alias
/// band of width `aa`.
#[inline]
fn coverage(dist: f64, radius: f64, aa: f64) -> f64 {
    if dist <= radius {
        1.0
    } else if dist < radius + aa {
        1.0 - (dist - radius) / aa
    } else {
        0.0
    }
}

/// Deduplicated undirected segments of a graph, as node-index pairs.
/// Isolated nodes render as plain discs through the node pass.
fn unique_segments(g: &VesselGraph) -> Vec<(usize, usize)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(g.edges().len());
    for e in g.edges() {
        let (Some(a), Some(b)) = (g.node_index(e.from), g.node_index(e.to)) else {
            continue;
        };
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            out.push(key);
        }
    }
    out
}

/// Render the graph's en-face (x, y) projection. `pixel_size` is mm per
/// pixel; pixel centers sit at `(i + 0.5) * pixel_size`. The z coordinate
/// is ignored.
pub fn render_enface(
    g: &VesselGraph,
    width: usize,
    height: usize,
    pixel_size: f64,
) -> Result<RasterImage2D, RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimensions(format!(
            "{width}x{height}"
        )));
    }
    if !(pixel_size > 0.0 && pixel_size.is_finite()) {
        return Err(RasterError::InvalidDimensions(format!(
            "pixel_size {pixel_size}"
        )));
    }
    let mut img = RasterImage2D::zeros(width, height, pixel_size);
    let aa = pixel_size;

    // splat a disc for every node so isolated nodes stay visible
    for n in g.nodes() {
        splat_disc(&mut img, [n.x, n.y], n.r, aa);
    }
    for (a, b) in unique_segments(g) {
        let na = &g.nodes()[a];
        let nb = &g.nodes()[b];
        splat_capsule(&mut img, [na.x, na.y], na.r, [nb.x, nb.y], nb.r, aa);
    }
    debug_assert!(img.data.iter().all(|v| v.is_finite()));
    assert!(
        img.data.iter().all(|v| (0.0..=1.0).contains(v)),
        "render produced out-of-range intensity"
    );
    Ok(img)
}

fn pixel_range(lo: f64, hi: f64, pixel_size: f64, limit: usize) -> std::ops::Range<usize> {
    let a = ((lo / pixel_size) - 0.5).floor().max(0.0) as usize;
    let b = (((hi / pixel_size) - 0.5).ceil() + 1.0).max(0.0) as usize;
    a.min(limit)..b.min(limit)
}

fn splat_disc(img: &mut RasterImage2D, c: [f64; 2], r: f64, aa: f64) {
    let reach = r + aa;
    let xs = pixel_range(c[0] - reach, c[0] + reach, img.pixel_size, img.width);
    let ys = pixel_range(c[1] - reach, c[1] + reach, img.pixel_size, img.height);
    for y in ys {
        let py = (y as f64 + 0.5) * img.pixel_size;
        for x in xs.clone() {
            let px = (x as f64 + 0.5) * img.pixel_size;
            let d = ((px - c[0]).powi(2) + (py - c[1]).powi(2)).sqrt();
            let v = coverage(d, r, aa);
            if v > 0.0 {
                img.set_max(x, y, v);
            }
        }
    }
}

fn splat_capsule(
    img: &mut RasterImage2D,
    a: [f64; 2],
    ra: f64,
    b: [f64; 2],
    rb: f64,
    aa: f64,
) {
    let reach = ra.max(rb) + aa;
    let xs = pixel_range(
        a[0].min(b[0]) - reach,
        a[0].max(b[0]) + reach,
        img.pixel_size,
        img.width,
    );
    let ys = pixel_range(
        a[1].min(b[1]) - reach,
        a[1].max(b[1]) + reach,
        img.pixel_size,
        img.height,
    );
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    for y in ys {
        let py = (y as f64 + 0.5) * img.pixel_size;
        for x in xs.clone() {
            let px = (x as f64 + 0.5) * img.pixel_size;
            let ap = [px - a[0], py - a[1]];
            let t = if len2 > 0.0 {
                ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let cx = a[0] + t * ab[0];
            let cy = a[1] + t * ab[1];
            let r = ra + t * (rb - ra);
            let d = ((px - cx).powi(2) + (py - cy).powi(2)).sqrt();
            let v = coverage(d, r, aa);
            if v > 0.0 {
                img.set_max(x, y, v);
            }
        }
    }
}

/// 3D analogue of [`render_enface`] with spherical capsules. The
/// anti-alias band width equals the x-axis voxel size.
pub fn render_volume(
    g: &VesselGraph,
    dims: (usize, usize, usize),
    voxel_size: [f64; 3],
) -> Result<Volume3D, RasterError> {
    let (w, h, d) = dims;
    if w == 0 || h == 0 || d == 0 {
        return Err(RasterError::InvalidDimensions(format!("{w}x{h}x{d}")));
    }
    if voxel_size.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(RasterError::InvalidDimensions(format!(
            "voxel_size {voxel_size:?}"
        )));
    }
    let mut vol = Volume3D::zeros(w, h, d, voxel_size);
    let aa = voxel_size[0];

    let voxel_span = |lo: f64, hi: f64, vs: f64, limit: usize| {
        let a = ((lo / vs) - 0.5).floor().max(0.0) as usize;
        let b = (((hi / vs) - 0.5).ceil() + 1.0).max(0.0) as usize;
        (a.min(limit), b.min(limit))
    };

    let splat = |a: [f64; 3], ra: f64, b: [f64; 3], rb: f64, vol: &mut Volume3D| {
        let reach = ra.max(rb) + aa;
        let (x0, x1) = voxel_span(a[0].min(b[0]) - reach, a[0].max(b[0]) + reach, voxel_size[0], w);
        let (y0, y1) = voxel_span(a[1].min(b[1]) - reach, a[1].max(b[1]) + reach, voxel_size[1], h);
        let (z0, z1) = voxel_span(a[2].min(b[2]) - reach, a[2].max(b[2]) + reach, voxel_size[2], d);
        let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
        for z in z0..z1 {
            let pz = (z as f64 + 0.5) * voxel_size[2];
            for y in y0..y1 {
                let py = (y as f64 + 0.5) * voxel_size[1];
                for x in x0..x1 {
                    let px = (x as f64 + 0.5) * voxel_size[0];
                    let ap = [px - a[0], py - a[1], pz - a[2]];
                    let t = if len2 > 0.0 {
                        ((ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    let c = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
                    let r = ra + t * (rb - ra);
                    let dist = ((px - c[0]).powi(2) + (py - c[1]).powi(2) + (pz - c[2]).powi(2))
                        .sqrt();
                    let v = coverage(dist, r, aa);
                    if v > 0.0 {
                        vol.set_max(x, y, z, v);
                    }
                }
            }
        }
    };

    for n in g.nodes() {
        let p = n.position();
        splat(p, n.r, p, n.r, &mut vol);
    }
    for (a, b) in unique_segments(g) {
        let na = &g.nodes()[a];
        let nb = &g.nodes()[b];
        splat(na.position(), na.r, nb.position(), nb.r, &mut vol);
    }
    assert!(
        vol.data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)),
        "render produced out-of-range intensity"
    );
    Ok(vol)
}

/// Binarized [`render_enface`] at `threshold`.
pub fn render_mask(
    g: &VesselGraph,
    width: usize,
    height: usize,
    pixel_size: f64,
    threshold: f64,
) -> Result<Mask, RasterError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(RasterError::InvalidThreshold(threshold));
    }
    let img = render_enface(g, width, height, pixel_size)?;
    Mask::from_image(&img, threshold)
}

/// Two-octave value noise in [0, 1] at capillary scale, evaluated per
/// pixel from hashed lattice corners.
fn capillary_noise(seed: u64, x: usize, y: usize) -> f64 {
    fn octave(seed: u64, x: usize, y: usize, cell: f64) -> f64 {
        let fx = x as f64 / cell;
        let fy = y as f64 / cell;
        let gx = fx.floor();
        let gy = fy.floor();
        let tx = smooth(fx - gx);
        let ty = smooth(fy - gy);
        let (gx, gy) = (gx as i64, gy as i64);
        let c00 = unit_f64(hash2(seed, gx, gy));
        let c10 = unit_f64(hash2(seed, gx + 1, gy));
        let c01 = unit_f64(hash2(seed, gx, gy + 1));
        let c11 = unit_f64(hash2(seed, gx + 1, gy + 1));
        let a = c00 + (c10 - c00) * tx;
        let b = c01 + (c11 - c01) * tx;
        a + (b - a) * ty
    }
    fn smooth(t: f64) -> f64 {
        t * t * (3.0 - 2.0 * t)
    }
    0.65 * octave(seed, x, y, 8.0) + 0.35 * octave(seed ^ 0xA5A5_A5A5, x, y, 4.0)
}

/// Apply the procedural OCTA style. With gain 1, density 0, sigma 0, and
/// gamma 1 the output equals the input bit-for-bit.
pub fn apply_octa_style(img: &RasterImage2D, sp: &StyleParams) -> Result<RasterImage2D, RasterError> {
    sp.validate()?;
    let mut out = img.clone();
    let speckle_seed = sp.seed ^ 0x5EED_5EED_5EED_5EED;
    for y in 0..img.height {
        for x in 0..img.width {
            let mut v = img.get(x, y) * sp.vessel_gain;
            if sp.background_capillary_density > 0.0 {
                v += sp.background_capillary_density * capillary_noise(sp.seed, x, y);
            }
            v = v.clamp(0.0, 1.0);
            if sp.contrast_gamma != 1.0 {
                v = v.powf(sp.contrast_gamma);
            }
            if sp.speckle_sigma > 0.0 {
                let g = clipped_gaussian(
                    hash3(speckle_seed, x as i64, y as i64, 0),
                    hash3(speckle_seed, x as i64, y as i64, 1),
                );
                v += sp.speckle_sigma * g;
            }
            out.data[y * img.width + x] = v.clamp(0.0, 1.0);
        }
    }
    assert!(out.data.iter().all(|v| v.is_finite()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{VesselGraph, VesselNode};

    fn segment_graph(ra: f64, rb: f64) -> VesselGraph {
        let mut g = VesselGraph::new(3.0);
        g.add_node(VesselNode::new(0, 1.0, 0.4, 0.0, ra));
        g.add_node(VesselNode::new(1, 1.0, 1.6, 0.0, rb));
        g.link(0, 1).unwrap();
        g
    }

    #[test]
    fn empty_graph_renders_all_zero() {
        let g = VesselGraph::new(3.0);
        let img = render_enface(&g, 32, 32, 0.1).unwrap();
        assert!(img.data().iter().all(|&v| v == 0.0));
        let vol = render_volume(&g, (8, 8, 8), [0.1; 3]).unwrap();
        assert!(vol.data().iter().all(|&v| v == 0.0));
        let mask = render_mask(&g, 16, 16, 0.1, 0.5).unwrap();
        assert_eq!(mask.count_ones(), 0);
    }

    /// Point-to-segment distance oracle, independent of the splat path.
    fn oracle_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
        (((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt(), t)
    }

    #[test]
    fn vertical_segment_interior_pixels_are_one() {
        // radius 2 px at 0.1 mm/px: r = 0.2 mm
        let pixel = 0.1;
        let g = segment_graph(0.2, 0.2);
        let img = render_enface(&g, 20, 20, pixel).unwrap();
        let a = [1.0, 0.4];
        let b = [1.0, 1.6];
        for y in 0..20 {
            for x in 0..20 {
                let p = [(x as f64 + 0.5) * pixel, (y as f64 + 0.5) * pixel];
                let (d, _) = oracle_segment_distance(p, a, b);
                if d < 0.2 {
                    assert_eq!(img.get(x, y), 1.0, "pixel ({x},{y}) dist {d}");
                }
                if d > 0.2 + pixel {
                    assert_eq!(img.get(x, y), 0.0, "pixel ({x},{y}) dist {d}");
                }
            }
        }
    }

    #[test]
    fn tapered_capsule_matches_distance_oracle() {
        let pixel = 0.05;
        let (ra, rb) = (0.3, 0.1);
        let g = segment_graph(ra, rb);
        let img = render_enface(&g, 60, 60, pixel).unwrap();
        let a = [1.0, 0.4];
        let b = [1.0, 1.6];
        for y in 0..60 {
            for x in 0..60 {
                let p = [(x as f64 + 0.5) * pixel, (y as f64 + 0.5) * pixel];
                let (d, t) = oracle_segment_distance(p, a, b);
                let r = ra + t * (rb - ra);
                // endpoint discs can only add coverage; skip the cap zones
                let near_caps = (p[1] - a[1]).abs() < ra + 2.0 * pixel
                    || (p[1] - b[1]).abs() < rb + 2.0 * pixel;
                if near_caps {
                    continue;
                }
                if d < r {
                    assert_eq!(img.get(x, y), 1.0);
                } else if d > r + pixel {
                    assert_eq!(img.get(x, y), 0.0);
                }
            }
        }
    }

    #[test]
    fn crossing_segments_compose_with_max() {
        let mut g1 = VesselGraph::new(3.0);
        g1.add_node(VesselNode::new(0, 0.4, 1.0, 0.0, 0.15));
        g1.add_node(VesselNode::new(1, 1.6, 1.0, 0.0, 0.15));
        g1.link(0, 1).unwrap();

        let g2 = segment_graph(0.2, 0.2);

        let mut both = VesselGraph::new(3.0);
        both.add_node(VesselNode::new(0, 0.4, 1.0, 0.0, 0.15));
        both.add_node(VesselNode::new(1, 1.6, 1.0, 0.0, 0.15));
        both.add_node(VesselNode::new(2, 1.0, 0.4, 0.0, 0.2));
        both.add_node(VesselNode::new(3, 1.0, 1.6, 0.0, 0.2));
        both.link(0, 1).unwrap();
        both.link(2, 3).unwrap();

        let i1 = render_enface(&g1, 20, 20, 0.1).unwrap();
        let i2 = render_enface(&g2, 20, 20, 0.1).unwrap();
        let ib = render_enface(&both, 20, 20, 0.1).unwrap();
        for i in 0..ib.data().len() {
            assert_eq!(ib.data()[i], i1.data()[i].max(i2.data()[i]));
        }
    }

    #[test]
    fn single_node_volume_is_discretized_ball() {
        let mut g = VesselGraph::new(3.0);
        let r = 0.25;
        g.add_node(VesselNode::new(0, 0.5, 0.5, 0.5, r));
        let vs = 0.05;
        let vol = render_volume(&g, (20, 20, 20), [vs; 3]).unwrap();
        for z in 0..20 {
            for y in 0..20 {
                for x in 0..20 {
                    let p = [
                        (x as f64 + 0.5) * vs,
                        (y as f64 + 0.5) * vs,
                        (z as f64 + 0.5) * vs,
                    ];
                    let d = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2) + (p[2] - 0.5).powi(2))
                        .sqrt();
                    let v = vol.get(x, y, z);
                    if d <= r {
                        assert_eq!(v, 1.0);
                    } else if d > r + vs {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn volume_projection_matches_enface_for_flat_graph() {
        // graph in the z = 0.225 plane, exactly the center of voxel slice 4
        let mut g = VesselGraph::new(3.0);
        g.add_node(VesselNode::new(0, 0.5, 0.5, 0.225, 0.2));
        g.add_node(VesselNode::new(1, 2.5, 1.7, 0.225, 0.1));
        g.link(0, 1).unwrap();
        let ps = 0.05;
        let vol = render_volume(&g, (60, 60, 10), [ps, ps, ps]).unwrap();
        let mip = vol.max_intensity_projection_z();

        let mut flat = g.clone();
        // same graph with z flattened to the slice plane
        let mut flat2 = VesselGraph::new(3.0);
        for n in flat.nodes() {
            flat2.add_node(VesselNode { z: 0.0, ..*n });
        }
        for e in flat.edges() {
            flat2.add_edge_raw(*e);
        }
        std::mem::swap(&mut flat, &mut flat2);
        let enface = render_enface(&flat, 60, 60, ps).unwrap();

        for i in 0..enface.data().len() {
            assert!(
                (mip.data()[i] - enface.data()[i]).abs() < 1e-9,
                "pixel {i}: mip {} vs enface {}",
                mip.data()[i],
                enface.data()[i]
            );
        }
    }

    #[test]
    fn volume_projection_close_to_enface_for_tilted_graph() {
        // constant radius, z varies: sampled-z error bounded by vz/2 / aa
        let mut g = VesselGraph::new(3.0);
        g.add_node(VesselNode::new(0, 0.5, 0.5, 0.1, 0.15));
        g.add_node(VesselNode::new(1, 2.4, 2.0, 0.45, 0.15));
        g.link(0, 1).unwrap();
        let ps = 0.05;
        let vol = render_volume(&g, (60, 60, 12), [ps, ps, ps]).unwrap();
        let mip = vol.max_intensity_projection_z();
        let mut flat = VesselGraph::new(3.0);
        for n in g.nodes() {
            flat.add_node(VesselNode { z: 0.0, ..*n });
        }
        for e in g.edges() {
            flat.add_edge_raw(*e);
        }
        let enface = render_enface(&flat, 60, 60, ps).unwrap();
        let bound = 0.5 + 1e-9; // (vz/2)/aa with vz == aa
        for i in 0..enface.data().len() {
            assert!((mip.data()[i] - enface.data()[i]).abs() <= bound);
        }
    }

    #[test]
    fn mask_thresholds_distance_field() {
        let pixel = 0.1;
        let g = segment_graph(0.2, 0.2);
        let mask = render_mask(&g, 20, 20, pixel, 0.5).unwrap();
        let a = [1.0, 0.4];
        let b = [1.0, 1.6];
        for y in 0..20 {
            for x in 0..20 {
                let p = [(x as f64 + 0.5) * pixel, (y as f64 + 0.5) * pixel];
                let (d, _) = oracle_segment_distance(p, a, b);
                if d < 0.2 {
                    assert_eq!(mask.get(x, y), 1);
                }
                if d > 0.2 + 0.5 * pixel {
                    assert_eq!(mask.get(x, y), 0);
                }
            }
        }
    }

    #[test]
    fn mask_rejects_bad_threshold() {
        let g = segment_graph(0.2, 0.2);
        assert!(render_mask(&g, 8, 8, 0.1, 0.0).is_err());
        assert!(render_mask(&g, 8, 8, 0.1, 1.5).is_err());
    }

    #[test]
    fn subgraph_mask_is_subset_of_full_mask() {
        let sca = crate::synthesis::ScaParams {
            target_nodes: 300,
            seed: 17,
            ..Default::default()
        };
        let g = crate::synthesis::synthesize(&sca, &Default::default()).unwrap();
        let r_max = g.max_radius().unwrap();
        let sub = g.induced_subgraph(|id| g.node(id).unwrap().r >= 0.3 * r_max);
        let full = render_mask(&g, 128, 128, 3.0 / 128.0, 0.5).unwrap();
        let part = render_mask(&sub, 128, 128, 3.0 / 128.0, 0.5).unwrap();
        for i in 0..full.data().len() {
            assert!(part.data()[i] <= full.data()[i]);
        }
    }

    #[test]
    fn style_identity_parameters_are_exact() {
        let g = segment_graph(0.2, 0.1);
        let img = render_enface(&g, 32, 32, 0.1).unwrap();
        let sp = StyleParams {
            vessel_gain: 1.0,
            background_capillary_density: 0.0,
            speckle_sigma: 0.0,
            contrast_gamma: 1.0,
            seed: 1,
        };
        let out = apply_octa_style(&img, &sp).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn style_is_deterministic_per_seed() {
        let g = segment_graph(0.2, 0.1);
        let img = render_enface(&g, 32, 32, 0.1).unwrap();
        let sp = StyleParams::default();
        let a = apply_octa_style(&img, &sp).unwrap();
        let b = apply_octa_style(&img, &sp).unwrap();
        assert_eq!(a, b);
        let other = apply_octa_style(
            &img,
            &StyleParams {
                seed: sp.seed + 1,
                ..sp
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn styled_image_keeps_vessels_brighter_than_background() {
        let sca = crate::synthesis::ScaParams {
            target_nodes: 1500,
            seed: 23,
            ..Default::default()
        };
        let g = crate::synthesis::synthesize(&sca, &Default::default()).unwrap();
        let img = render_enface(&g, 256, 256, 3.0 / 256.0).unwrap();
        let mask = render_mask(&g, 256, 256, 3.0 / 256.0, 0.5).unwrap();
        let styled = apply_octa_style(&img, &StyleParams::default()).unwrap();
        let mut inside = (0.0, 0usize);
        let mut outside = (0.0, 0usize);
        for y in 0..256 {
            for x in 0..256 {
                if mask.get(x, y) == 1 {
                    inside.0 += styled.get(x, y);
                    inside.1 += 1;
                } else {
                    outside.0 += styled.get(x, y);
                    outside.1 += 1;
                }
            }
        }
        let margin = inside.0 / inside.1 as f64 - outside.0 / outside.1 as f64;
        assert!(margin >= 0.2, "margin {margin}");
    }

    #[test]
    fn styled_mask_preserves_main_vessels() {
        let sca = crate::synthesis::ScaParams {
            target_nodes: 2000,
            seed: 29,
            ..Default::default()
        };
        let g = crate::synthesis::synthesize(&sca, &Default::default()).unwrap();
        let r_max = g.max_radius().unwrap();
        let main = g.induced_subgraph(|id| g.node(id).unwrap().r >= 0.2 * r_max);
        let ps = 3.0 / 512.0;
        let main_mask = render_mask(&main, 512, 512, ps, 0.5).unwrap();
        let styled = apply_octa_style(
            &render_enface(&g, 512, 512, ps).unwrap(),
            &StyleParams::default(),
        )
        .unwrap();
        let styled_mask = Mask::from_image(&styled, 0.5).unwrap();
        let mut agree = 0usize;
        let mut total = 0usize;
        for i in 0..main_mask.data().len() {
            if main_mask.data()[i] == 1 {
                total += 1;
                if styled_mask.data()[i] == 1 {
                    agree += 1;
                }
            }
        }
        assert!(total > 0);
        let frac = agree as f64 / total as f64;
        assert!(frac >= 0.99, "agreement {frac}");
    }

    #[test]
    fn render_is_translation_equivariant_for_integer_shifts() {
        let pixel = 0.1;
        let g = segment_graph(0.2, 0.15);
        let img = render_enface(&g, 30, 30, pixel).unwrap();
        // shift by 3 px in x, 2 px in y
        let mut shifted = VesselGraph::new(3.0);
        for n in g.nodes() {
            shifted.add_node(VesselNode {
                x: n.x + 3.0 * pixel,
                y: n.y + 2.0 * pixel,
                ..*n
            });
        }
        for e in g.edges() {
            shifted.add_edge_raw(*e);
        }
        let img2 = render_enface(&shifted, 30, 30, pixel).unwrap();
        for y in 0..28 {
            for x in 0..27 {
                assert!(
                    (img.get(x, y) - img2.get(x + 3, y + 2)).abs() < 1e-12,
                    "mismatch at ({x},{y})"
                );
            }
        }
    }
}
