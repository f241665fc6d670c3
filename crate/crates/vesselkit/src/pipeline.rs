//! End-to-end pipeline: synthesize, render, style, segment, mask,
//! evaluate, and write everything behind a hashed manifest.
//!
//! Stage failures abort with a stage-tagged error and remove any files
//! already written, so an output directory never holds a partial run.
//! With a fixed configuration the manifest hashes are identical across
//! runs (nothing time- or machine-dependent lands in the artifacts).

use std::fmt;
use std::fs;
use std::path::PathBuf;

use crate::bench::main_vessel_truth;
use crate::config::PipelineConfig;
use crate::io::{self, BitDepth, IoError};
use crate::metrics::MetricsReport;
use crate::raster::{apply_octa_style, render_enface, render_mask};
use crate::segment::extract_main;
use crate::synthesis::synthesize;

/// A pipeline failure, tagged with the stage that produced it.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(self.source.as_ref() as &(dyn std::error::Error + 'static))
    }
}

fn stage<E: std::error::Error + Send + Sync + 'static>(
    name: &'static str,
) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage: name,
        source: Box::new(e),
    }
}

/// One artifact the pipeline wrote: relative file name and content hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub fnv1a64: u64,
}

/// The run record: artifact hashes plus the configuration echo.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub config_echo: String,
    pub report: MetricsReport,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# artifact manifest\n");
        for e in &self.entries {
            s.push_str(&format!("{:016x}  {}\n", e.fnv1a64, e.file));
        }
        s.push_str("# config\n");
        s.push_str(&self.config_echo);
        s
    }
}

/// Tracks files written so far; deletes them if the run fails.
struct OutputTracker {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputTracker {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }
}

impl Drop for OutputTracker {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// Run the full pipeline into `config.out_dir`.
///
/// Artifacts: `graph.json`, `enface.pgm`, `styled.pgm`, `truth_mask.pgm`,
/// `main_mask.pgm`, `report.csv`, plus `manifest.txt` listing the six.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest, PipelineError> {
    fs::create_dir_all(&config.out_dir)
        .map_err(|e| io::IoError::File {
            path: config.out_dir.clone(),
            source: e,
        })
        .map_err(stage("setup"))?;
    let mut out = OutputTracker {
        dir: config.out_dir.clone(),
        written: Vec::new(),
        committed: false,
    };

    let graph = synthesize(&config.synthesis, &config.radius).map_err(stage("synthesis"))?;

    let (w, h) = (config.render.width, config.render.height);
    let ps = config.pixel_size();
    let threshold = config.render.mask_threshold;
    let enface = render_enface(&graph, w, h, ps).map_err(stage("render"))?;
    let styled = apply_octa_style(&enface, &config.style).map_err(stage("style"))?;

    let truth = main_vessel_truth(&graph, config.truth_ratio).map_err(stage("truth"))?;
    let truth_mask = render_mask(&truth, w, h, ps, threshold).map_err(stage("truth"))?;

    let result = extract_main(&graph, &config.segmentor).map_err(stage("segment"))?;
    let main_mask = render_mask(&result.g_main, w, h, ps, threshold).map_err(stage("mask"))?;

    let report = MetricsReport::compute(&main_mask, &truth_mask, Some((&styled, &enface)))
        .map_err(stage("eval"))?;

    // write artifacts
    let depth = if config.render.bits == 16 {
        BitDepth::Sixteen
    } else {
        BitDepth::Eight
    };
    let write = |r: Result<(), IoError>| r.map_err(stage("write"));
    let graph_path = out.path("graph.json");
    write(io::export_graph(&graph, &graph_path))?;
    let enface_path = out.path("enface.pgm");
    write(io::write_pgm(&enface, &enface_path, depth))?;
    let styled_path = out.path("styled.pgm");
    write(io::write_pgm(&styled, &styled_path, depth))?;
    let truth_path = out.path("truth_mask.pgm");
    write(io::write_mask_pgm(&truth_mask, &truth_path))?;
    let main_path = out.path("main_mask.pgm");
    write(io::write_mask_pgm(&main_mask, &main_path))?;
    let report_path = out.path("report.csv");
    write(io::write_csv(
        &report_path,
        "iou,dice,ssim,mse,intersection,union,a_only,b_only,kept_nodes,threshold_abs",
        &[format!(
            "{},{},{},{},{},{},{},{},{},{}",
            report.iou,
            report.dice,
            report.ssim,
            report.mse,
            report.pixel_counts.intersection,
            report.pixel_counts.union,
            report.pixel_counts.a_only,
            report.pixel_counts.b_only,
            result.kept_nodes,
            result.threshold_abs
        )],
    ))?;

    let files = [
        "graph.json",
        "enface.pgm",
        "styled.pgm",
        "truth_mask.pgm",
        "main_mask.pgm",
        "report.csv",
    ];
    let mut entries = Vec::with_capacity(files.len());
    for name in files {
        let hash = io::hash_file(&config.out_dir.join(name)).map_err(stage("manifest"))?;
        entries.push(ManifestEntry {
            file: name.to_string(),
            fnv1a64: hash,
        });
    }
    let manifest = Manifest {
        entries,
        config_echo: config.echo(),
        report,
    };
    let manifest_path = out.path("manifest.txt");
    io::write_text(&manifest_path, &manifest.to_text()).map_err(stage("manifest"))?;
    out.committed = true;
    Ok(manifest)
}

/// Convenience for `manifest.txt` consumers.
pub fn manifest_path(config: &PipelineConfig) -> PathBuf {
    config.out_dir.join("manifest.txt")
}
