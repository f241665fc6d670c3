//! Synthesize vascular trees as structured graphs, render them as
//! OCTA-like images, extract main vessels by radius-thresholded graph
//! traversal, and evaluate segmentations.
//!
//! The crate is organized around a small pipeline:
//!
//! 1. [`synthesis`] grows a vessel tree with space colonization and
//!    assigns branch radii by a conservation law.
//! 2. [`raster`] renders graphs to en-face images, volumes, and binary
//!    masks, and applies a procedural OCTA style.
//! 3. [`segment`] extracts the main-vessel subgraph directly from the
//!    `(coordinates | radius)` representation: radius thresholding plus
//!    depth-first traversal from a root node.
//! 4. [`metrics`] scores masks and images (IoU, Dice, SSIM, MSE), and
//!    [`losses`] provides the adversarial-refinement loss terms as plain
//!    numerical functions.
//! 5. [`bench`] runs the parameter sweeps and timing harness; [`pipeline`]
//!    ties everything together behind a reproducible manifest.
//!
//! Each major capability has a runnable example under `examples/`; the
//! `vesselkit` binary exposes the same operations as subcommands.

pub mod bench;
pub mod config;
pub mod graph;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod rng;
pub mod segment;
pub mod synthesis;

mod spatial;

pub use graph::{NodeId, ValidationReport, VesselEdge, VesselGraph, VesselNode};
pub use raster::{Mask, RasterImage2D, StyleParams, Volume3D};
pub use segment::{MainVesselResult, RootPolicy, SegmentorParams};
pub use synthesis::{AttractorCloud, Box3, RadiusParams, ScaParams};
