//! Parameter sweeps and the segmentation timing harness.
//!
//! Ground truth for the sweeps is synthesis-derived: the generator knows
//! which nodes belong to main vessels (those at or above a radius fraction
//! of the maximum, reachable from the root), so no manual labels are
//! involved. Sweep scores compare extraction masks against truth masks
//! rendered with identical settings.
//!
//! Timing wraps `extract_main` alone: the graph is already in memory and
//! no I/O or rasterization is included. The traversal itself is
//! parameter-free (its per-node cost is constant-time bookkeeping), which
//! the bench output echoes alongside the wall-clock numbers.

use std::time::Instant;

use thiserror::Error;

use crate::graph::{GraphError, NodeId, VesselGraph, VesselNode};
use crate::metrics::{dice, iou, MetricError};
use crate::raster::{render_mask, RasterError};
use crate::rng::{hash2, SplitMix64};
use crate::segment::{extract_main, SegmentError, SegmentorParams};
use crate::synthesis::{synthesize, RadiusParams, ScaParams, SynthesisError};

/// One row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// The swept value: a radius ratio for ratio sweeps, a node count for
    /// size sweeps.
    pub parameter: f64,
    pub iou: f64,
    pub dice: f64,
    pub kept_node_fraction: f64,
    pub runtime_us: u64,
}

/// Order statistics of repeated extraction timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingStats {
    pub reps: usize,
    pub min_us: u64,
    pub median_us: u64,
    pub p95_us: u64,
    pub nodes: usize,
    pub edges: usize,
}

/// Rendering settings shared by both sides of a sweep comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSettings {
    pub width: usize,
    pub height: usize,
    pub pixel_size: f64,
    pub threshold: f64,
}

impl RenderSettings {
    /// Square raster covering the graph's field of view.
    pub fn for_graph(g: &VesselGraph, side: usize) -> Self {
        Self {
            width: side,
            height: side,
            pixel_size: g.fov_mm() / side as f64,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("node-count sweep values must be ascending")]
    UnsortedValues,
}

/// Synthesis-time main-vessel truth: nodes at or above `ratio * r_max`
/// that the root can reach through qualifying nodes.
pub fn main_vessel_truth(g: &VesselGraph, ratio: f64) -> Result<VesselGraph, BenchError> {
    if g.is_empty() {
        return Err(GraphError::EmptyGraph.into());
    }
    let r_max = g.max_radius()?;
    let threshold = ratio * r_max;
    let qualifies: std::collections::HashSet<NodeId> = g
        .nodes()
        .iter()
        .filter(|n| n.r >= threshold)
        .map(|n| n.id)
        .collect();
    let restricted = g.induced_subgraph(|id| qualifies.contains(&id));
    let start = match g.root().filter(|id| qualifies.contains(id)) {
        Some(root) => root,
        // root below threshold: fall back to the largest surviving radius
        None => {
            let mut best = (f64::NEG_INFINITY, NodeId::MAX);
            for n in restricted.nodes() {
                if n.r > best.0 || (n.r == best.0 && n.id < best.1) {
                    best = (n.r, n.id);
                }
            }
            best.1
        }
    };
    let adj = restricted_adjacency(&restricted);
    let start_idx = restricted.node_index(start).expect("start survives filter");
    let mut seen = vec![false; restricted.node_count()];
    let mut stack = vec![start_idx];
    seen[start_idx] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    let reached: std::collections::HashSet<NodeId> = restricted
        .nodes()
        .iter()
        .enumerate()
        .filter(|(i, _)| seen[*i])
        .map(|(_, n)| n.id)
        .collect();
    let mut truth = restricted.induced_subgraph(|id| reached.contains(&id));
    truth.set_root(Some(start));
    Ok(truth)
}

fn restricted_adjacency(g: &VesselGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for e in g.edges() {
        if let (Some(a), Some(b)) = (g.node_index(e.from), g.node_index(e.to)) {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

/// Sweep the radius-ratio threshold over `values`, scoring each extraction
/// against a fixed truth graph.
pub fn sweep_rmin(
    g: &VesselGraph,
    gt_main: &VesselGraph,
    values: &[f64],
    settings: &RenderSettings,
) -> Result<Vec<SweepRow>, BenchError> {
    let gt_mask = render_mask(
        gt_main,
        settings.width,
        settings.height,
        settings.pixel_size,
        settings.threshold,
    )?;
    let mut rows = Vec::with_capacity(values.len());
    for &ratio in values {
        let params = SegmentorParams {
            r_min_ratio: ratio,
            ..Default::default()
        };
        let started = Instant::now();
        let result = extract_main(g, &params)?;
        let runtime_us = started.elapsed().as_micros() as u64;
        let mask = render_mask(
            &result.g_main,
            settings.width,
            settings.height,
            settings.pixel_size,
            settings.threshold,
        )?;
        rows.push(SweepRow {
            parameter: ratio,
            iou: iou(&mask, &gt_mask)?,
            dice: dice(&mask, &gt_mask)?,
            kept_node_fraction: result.kept_nodes as f64 / g.node_count() as f64,
            runtime_us,
        });
    }
    Ok(rows)
}

/// Synthesize at each node count (seeds derived from the base seed and the
/// count), segment at `r_min`, and score against per-count truth.
pub fn sweep_nodes(
    sca: &ScaParams,
    rp: &RadiusParams,
    n_values: &[usize],
    r_min: f64,
    truth_ratio: f64,
    raster_side: usize,
) -> Result<Vec<SweepRow>, BenchError> {
    if n_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(BenchError::UnsortedValues);
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let per_n = ScaParams {
            target_nodes: n,
            seed: hash2(sca.seed, n as i64, 0),
            ..sca.clone()
        };
        let g = synthesize(&per_n, rp)?;
        let truth = main_vessel_truth(&g, truth_ratio)?;
        let settings = RenderSettings::for_graph(&g, raster_side);
        let gt_mask = render_mask(
            &truth,
            settings.width,
            settings.height,
            settings.pixel_size,
            settings.threshold,
        )?;
        let params = SegmentorParams {
            r_min_ratio: r_min,
            ..Default::default()
        };
        let started = Instant::now();
        let result = extract_main(&g, &params)?;
        let runtime_us = started.elapsed().as_micros() as u64;
        let mask = render_mask(
            &result.g_main,
            settings.width,
            settings.height,
            settings.pixel_size,
            settings.threshold,
        )?;
        rows.push(SweepRow {
            parameter: n as f64,
            iou: iou(&mask, &gt_mask)?,
            dice: dice(&mask, &gt_mask)?,
            kept_node_fraction: result.kept_nodes as f64 / g.node_count() as f64,
            runtime_us,
        });
    }
    Ok(rows)
}

/// Time `extract_main` alone over `reps` repetitions (plus a short
/// untimed warm-up), single-threaded.
pub fn time_segmentation(
    g: &VesselGraph,
    params: &SegmentorParams,
    reps: usize,
) -> Result<TimingStats, BenchError> {
    let reps = reps.max(1);
    for _ in 0..3 {
        std::hint::black_box(extract_main(g, params)?);
    }
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let started = Instant::now();
        std::hint::black_box(extract_main(g, params)?);
        times.push(started.elapsed().as_micros() as u64);
    }
    times.sort_unstable();
    Ok(TimingStats {
        reps,
        min_us: times[0],
        median_us: times[reps / 2],
        p95_us: times[(reps * 95 / 100).min(reps - 1)],
        nodes: g.node_count(),
        edges: g.edges().len(),
    })
}

/// Random connected graph for scaling experiments: a random attachment
/// tree plus a fraction of extra cross edges, random radii in
/// [0.01, 1.01).
pub fn random_connected_graph(nodes: usize, extra_edge_fraction: f64, seed: u64) -> VesselGraph {
    let mut rng = SplitMix64::new(seed);
    let mut g = VesselGraph::new(3.0);
    for id in 0..nodes {
        g.add_node(VesselNode::new(
            id as NodeId,
            rng.next_f64() * 3.0,
            rng.next_f64() * 3.0,
            rng.next_f64() * 0.3,
            0.01 + rng.next_f64(),
        ));
    }
    for id in 1..nodes {
        let parent = rng.next_below(id as u64) as NodeId;
        g.link(parent, id as NodeId).expect("nodes exist");
    }
    let extras = (nodes as f64 * extra_edge_fraction) as usize;
    for _ in 0..extras {
        let a = rng.next_below(nodes as u64) as NodeId;
        let b = rng.next_below(nodes as u64) as NodeId;
        if a != b {
            g.link(a, b).expect("nodes exist");
        }
    }
    g
}

/// Random graph with arbitrary connectivity (possibly disconnected),
/// for oracle fuzzing.
pub fn random_graph(nodes: usize, edges: usize, seed: u64) -> VesselGraph {
    let mut rng = SplitMix64::new(seed);
    let mut g = VesselGraph::new(3.0);
    for id in 0..nodes {
        g.add_node(VesselNode::new(
            id as NodeId,
            rng.next_f64() * 3.0,
            rng.next_f64() * 3.0,
            rng.next_f64() * 0.3,
            0.01 + rng.next_f64(),
        ));
    }
    for _ in 0..edges {
        let a = rng.next_below(nodes as u64) as NodeId;
        let b = rng.next_below(nodes as u64) as NodeId;
        if a != b {
            g.link(a, b).expect("nodes exist");
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_corpus_graph(seed: u64) -> VesselGraph {
        let sca = ScaParams {
            target_nodes: 800,
            seed,
            ..Default::default()
        };
        synthesize(&sca, &RadiusParams::default()).unwrap()
    }

    #[test]
    fn truth_equals_extraction_at_matching_ratio() {
        let g = small_corpus_graph(5);
        let truth = main_vessel_truth(&g, 0.2).unwrap();
        let result = extract_main(&g, &SegmentorParams::default()).unwrap();
        let mut a: Vec<NodeId> = truth.nodes().iter().map(|n| n.id).collect();
        let mut b: Vec<NodeId> = result.g_main.nodes().iter().map(|n| n.id).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_rmin_no_filter_includes_capillaries() {
        let g = small_corpus_graph(6);
        let truth = main_vessel_truth(&g, 0.2).unwrap();
        let settings = RenderSettings::for_graph(&g, 128);
        let rows = sweep_rmin(&g, &truth, &[0.0, 0.2, 1.0], &settings).unwrap();
        assert!(rows[0].iou < 1.0, "no filtering keeps capillaries");
        assert!((rows[1].iou - 1.0).abs() < 1e-12, "matching ratio is exact");
        assert!(rows[2].iou < rows[1].iou, "max ratio keeps almost nothing");
        assert!(rows[2].kept_node_fraction <= rows[0].kept_node_fraction);
    }

    #[test]
    fn sweep_nodes_trend_and_shape() {
        let sca = ScaParams {
            seed: 77,
            ..Default::default()
        };
        let rows = sweep_nodes(&sca, &RadiusParams::default(), &[100, 400], 0.2, 0.2, 96)
            .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].parameter, 100.0);
        assert!(rows[1].iou >= rows[0].iou - 0.01);

        let single = sweep_nodes(&sca, &RadiusParams::default(), &[50], 0.2, 0.2, 64).unwrap();
        assert_eq!(single.len(), 1);

        assert!(matches!(
            sweep_nodes(&sca, &RadiusParams::default(), &[100, 50], 0.2, 0.2, 64),
            Err(BenchError::UnsortedValues)
        ));
    }

    #[test]
    fn sweep_is_deterministic_apart_from_runtime() {
        let g = small_corpus_graph(8);
        let truth = main_vessel_truth(&g, 0.2).unwrap();
        let settings = RenderSettings::for_graph(&g, 64);
        let a = sweep_rmin(&g, &truth, &[0.0, 0.2], &settings).unwrap();
        let b = sweep_rmin(&g, &truth, &[0.0, 0.2], &settings).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.parameter, rb.parameter);
            assert_eq!(ra.iou, rb.iou);
            assert_eq!(ra.dice, rb.dice);
            assert_eq!(ra.kept_node_fraction, rb.kept_node_fraction);
        }
    }

    #[test]
    fn timing_order_statistics_hold() {
        let g = random_connected_graph(2000, 0.3, 99);
        let stats = time_segmentation(&g, &SegmentorParams::default(), 10).unwrap();
        assert!(stats.min_us <= stats.median_us);
        assert!(stats.median_us <= stats.p95_us);
        assert_eq!(stats.nodes, 2000);
    }

    #[test]
    fn degenerate_single_node_sweep() {
        let sca = ScaParams {
            seed: 3,
            ..Default::default()
        };
        let rows = sweep_nodes(&sca, &RadiusParams::default(), &[1], 0.2, 0.2, 32).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].iou - 1.0).abs() < 1e-12, "one disc vs itself");
    }
}
