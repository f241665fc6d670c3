//! Thin command-line front end; all logic lives in the library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vesselkit::bench::{
    main_vessel_truth, random_connected_graph, sweep_nodes, sweep_rmin, time_segmentation,
    RenderSettings, SweepRow,
};
use vesselkit::config::{parse_config, parse_root_policy, PipelineConfig};
use vesselkit::io::{self, BitDepth};
use vesselkit::losses::toy_adversarial_fit;
use vesselkit::metrics::{self, MetricsReport};
use vesselkit::pipeline::run_pipeline;
use vesselkit::raster::{apply_octa_style, render_enface, render_mask, render_volume, Mask};
use vesselkit::segment::{extract_main, main_vessel_mask};
use vesselkit::synthesis::synthesize;

#[derive(Parser)]
#[command(
    name = "vesselkit",
    version,
    about = "Synthesize vascular graphs, render OCTA-like images, segment main vessels, evaluate"
)]
struct Cli {
    /// Emit failures as a single JSON line on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Config file (flat `[section]` / `key = value` text).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<PipelineConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::new("io", format!("{}: {e}", path.display()))
                })?;
                parse_config(&text)
                    .map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))?
            }
            None => PipelineConfig::default(),
        };
        if let Ok(dir) = std::env::var("VESSELKIT_OUT_DIR") {
            cfg.out_dir = PathBuf::from(dir);
        }
        if let Some(seed) = self.seed {
            cfg.set_master_seed(seed);
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a vascular tree and write the graph document.
    Synth {
        #[command(flatten)]
        config: ConfigArgs,
        /// Override the node target.
        #[arg(long)]
        target_nodes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a graph to a PGM image (optionally a mask and/or a volume).
    Render {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        /// mm per pixel; defaults to fov / width.
        #[arg(long)]
        pixel_size: Option<f64>,
        #[arg(long, default_value_t = 8)]
        bits: u8,
        #[arg(long)]
        mask_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Also write a raw u16 volume with this many z slices.
        #[arg(long)]
        volume_out: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        /// Write per-image statistics to this CSV.
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Apply the procedural OCTA style to an image.
    Style {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
        #[arg(long, default_value_t = 0.25)]
        density: f64,
        #[arg(long, default_value_t = 0.03)]
        speckle: f64,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        bits: u8,
    },
    /// Extract main vessels from a graph by radius threshold plus
    /// depth-first traversal.
    Segment {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        rmin: f64,
        /// Root policy: max-radius, id:<n>, or region:cx,cy,r.
        #[arg(long, default_value = "max-radius")]
        root: String,
        /// Edge construction distance for unlinked point sets, mm.
        #[arg(long, default_value_t = 0.05)]
        connectivity: f64,
        #[arg(long)]
        mask_out: Option<PathBuf>,
        #[arg(long)]
        graph_out: Option<PathBuf>,
        /// Visit-order CSV: step, node id, radius.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long)]
        pixel_size: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Score a predicted mask against ground truth (IoU, Dice, SSIM, MSE).
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Optional image pair for SSIM/MSE (defaults to the masks).
        #[arg(long)]
        img_a: Option<PathBuf>,
        #[arg(long)]
        img_b: Option<PathBuf>,
        /// Report path; .json gets JSON, anything else CSV.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = metrics::DEFAULT_SSIM_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = metrics::DEFAULT_SSIM_K1)]
        k1: f64,
        #[arg(long, default_value_t = metrics::DEFAULT_SSIM_K2)]
        k2: f64,
    },
    /// Sweep the radius-ratio threshold against synthesis-time truth.
    SweepRmin {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.5,1.0")]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Raster side length for scoring masks.
        #[arg(long, default_value_t = 256)]
        side: usize,
        /// Emit long-format rows (sweep,parameter,metric,value) instead.
        #[arg(long)]
        plot_data: bool,
    },
    /// Sweep the synthesized node count at a fixed threshold ratio.
    SweepN {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        values: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        rmin: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 256)]
        side: usize,
        #[arg(long)]
        plot_data: bool,
    },
    /// Time main-vessel extraction on an in-memory graph.
    Bench {
        #[arg(long, default_value_t = 10_000)]
        nodes: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Graph family: a synthesized vessel tree or a random graph.
        #[arg(long, default_value = "tree")]
        source: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a toy affine critic and trace the loss components.
    LossesDemo {
        /// CSV of real feature rows.
        #[arg(long)]
        real: PathBuf,
        /// CSV of generated feature rows.
        #[arg(long)]
        fake: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: synthesize, render, style, segment, evaluate.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Machine-parsable failure: category plus human-readable message.
struct CliError {
    category: String,
    message: String,
}

impl CliError {
    fn new(category: &str, message: impl Into<String>) -> Self {
        Self {
            category: category.to_string(),
            message: message.into(),
        }
    }
}

macro_rules! cli_from {
    ($ty:ty, $cat:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($cat(&e), e.to_string())
            }
        }
    };
}

cli_from!(vesselkit::synthesis::SynthesisError, |e: &vesselkit::synthesis::SynthesisError| {
    use vesselkit::synthesis::SynthesisError::*;
    match e {
        InvalidParams(_) => "invalid-params",
        DegenerateDomain => "degenerate-domain",
        NoAttractors => "no-attractors",
        EmptyCount => "empty-count",
        Graph(_) => "graph",
    }
});
cli_from!(vesselkit::segment::SegmentError, |e: &vesselkit::segment::SegmentError| {
    use vesselkit::segment::SegmentError::*;
    match e {
        EmptyGraph => "empty-graph",
        InvalidRatio(_) => "invalid-ratio",
        InvalidConnectivity(_) => "invalid-connectivity",
        RootNotFound(_) => "root-not-found",
        EmptyRegion => "empty-region",
        EmptySelection => "empty-selection",
        Graph(_) => "graph",
    }
});
cli_from!(vesselkit::raster::RasterError, |e: &vesselkit::raster::RasterError| {
    use vesselkit::raster::RasterError::*;
    match e {
        InvalidDimensions(_) => "invalid-dimensions",
        InvalidThreshold(_) => "invalid-threshold",
        InvalidData(_) => "invalid-data",
    }
});
cli_from!(vesselkit::metrics::MetricError, |e: &vesselkit::metrics::MetricError| {
    use vesselkit::metrics::MetricError::*;
    match e {
        ShapeMismatch { .. } => "shape-mismatch",
        BadWindow { .. } => "bad-window",
    }
});
cli_from!(vesselkit::losses::LossError, |e: &vesselkit::losses::LossError| {
    use vesselkit::losses::LossError::*;
    match e {
        EmptyBatch => "empty-batch",
        NonFiniteCritic => "non-finite-critic",
        ShapeMismatch(..) => "shape-mismatch",
        BadStep => "bad-step",
        NegativeWeight => "negative-weight",
    }
});
cli_from!(vesselkit::io::IoError, |e: &vesselkit::io::IoError| {
    use vesselkit::io::IoError::*;
    match e {
        File { .. } => "io",
        Parse { .. } => "parse",
        InvalidGraph { .. } => "invalid-graph",
        ShapeMismatch { .. } => "shape-mismatch",
        NonGrayscale { .. } => "non-grayscale",
        UnsupportedFormat { .. } => "unsupported-format",
    }
});
cli_from!(vesselkit::bench::BenchError, |e: &vesselkit::bench::BenchError| {
    use vesselkit::bench::BenchError::*;
    match e {
        Graph(_) => "graph",
        Synthesis(_) => "synthesis",
        Segment(_) => "segment",
        Raster(_) => "raster",
        Metric(_) => "metric",
        UnsortedValues => "unsorted-values",
    }
});

impl From<vesselkit::pipeline::PipelineError> for CliError {
    fn from(e: vesselkit::pipeline::PipelineError) -> Self {
        CliError::new(&format!("pipeline-{}", e.stage), e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json_errors {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": {"category": e.category, "message": e.message}})
                );
            } else {
                eprintln!("error: category={} message={:?}", e.category, e.message);
            }
            ExitCode::FAILURE
        }
    }
}

fn bit_depth(bits: u8) -> Result<BitDepth, CliError> {
    match bits {
        8 => Ok(BitDepth::Eight),
        16 => Ok(BitDepth::Sixteen),
        other => Err(CliError::new(
            "invalid-bits",
            format!("bits must be 8 or 16, got {other}"),
        )),
    }
}

fn read_mask(path: &Path) -> Result<Mask, CliError> {
    let img = io::read_image(path)?;
    Ok(Mask::from_image(&img, 0.5).expect("0.5 threshold is valid"))
}

fn sweep_csv(rows: &[SweepRow], label: &str, plot_data: bool) -> (String, Vec<String>) {
    if plot_data {
        let mut out = Vec::new();
        for r in rows {
            out.push(format!("{label},{},iou,{}", r.parameter, r.iou));
            out.push(format!("{label},{},dice,{}", r.parameter, r.dice));
            out.push(format!(
                "{label},{},kept_fraction,{}",
                r.parameter, r.kept_node_fraction
            ));
            out.push(format!("{label},{},runtime_us,{}", r.parameter, r.runtime_us));
        }
        ("sweep,parameter,metric,value".to_string(), out)
    } else {
        let header = format!("{label},iou,dice,kept_fraction,runtime_us");
        let out = rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.parameter, r.iou, r.dice, r.kept_node_fraction, r.runtime_us
                )
            })
            .collect();
        (header, out)
    }
}

fn parse_feature_csv(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // skip a non-numeric header row
        if i == 0 && line.split(',').any(|f| f.trim().parse::<f64>().is_err()) {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| {
            CliError::new("parse", format!("{}:{}: {e}", path.display(), i + 1))
        })?);
    }
    if rows.is_empty() {
        return Err(CliError::new(
            "empty-batch",
            format!("{}: no feature rows", path.display()),
        ));
    }
    Ok(rows)
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Synth {
            config,
            target_nodes,
            out,
        } => {
            let mut cfg = config.load()?;
            if let Some(n) = target_nodes {
                cfg.synthesis.target_nodes = *n;
            }
            let g = synthesize(&cfg.synthesis, &cfg.radius)?;
            io::export_graph(&g, out)?;
            println!(
                "synthesized {} nodes, {} edges -> {}",
                g.node_count(),
                g.edges().len(),
                out.display()
            );
            Ok(())
        }
        Command::Render {
            graph,
            out,
            width,
            height,
            pixel_size,
            bits,
            mask_out,
            threshold,
            volume_out,
            depth,
            stats_out,
        } => {
            let g = io::import_graph(graph)?;
            let ps = pixel_size.unwrap_or(g.fov_mm() / *width as f64);
            let img = render_enface(&g, *width, *height, ps)?;
            io::write_pgm(&img, out, bit_depth(*bits)?)?;
            println!("rendered {}x{} -> {}", width, height, out.display());
            if let Some(mask_path) = mask_out {
                let mask = render_mask(&g, *width, *height, ps, *threshold)?;
                io::write_mask_pgm(&mask, mask_path)?;
                println!("mask ({} px set) -> {}", mask.count_ones(), mask_path.display());
            }
            if let Some(vol_path) = volume_out {
                let vol = render_volume(&g, (*width, *height, *depth), [ps, ps, ps])?;
                io::write_volume_raw(&vol, vol_path)?;
                println!("volume {}x{}x{} -> {}", width, height, depth, vol_path.display());
            }
            if let Some(stats_path) = stats_out {
                let s = io::image_stats(&img);
                io::write_csv(
                    stats_path,
                    "min,max,mean,std",
                    &[format!("{},{},{},{}", s.min, s.max, s.mean, s.std)],
                )?;
            }
            Ok(())
        }
        Command::Style {
            image,
            out,
            seed,
            gain,
            density,
            speckle,
            gamma,
            bits,
        } => {
            let img = io::read_image(image)?;
            let sp = vesselkit::raster::StyleParams {
                vessel_gain: *gain,
                background_capillary_density: *density,
                speckle_sigma: *speckle,
                contrast_gamma: *gamma,
                seed: *seed,
            };
            let styled = apply_octa_style(&img, &sp)?;
            io::write_pgm(&styled, out, bit_depth(*bits)?)?;
            println!("styled -> {}", out.display());
            Ok(())
        }
        Command::Segment {
            graph,
            rmin,
            root,
            connectivity,
            mask_out,
            graph_out,
            trace,
            width,
            height,
            pixel_size,
            threshold,
        } => {
            let g = io::import_graph(graph)?;
            let params = vesselkit::segment::SegmentorParams {
                r_min_ratio: *rmin,
                connectivity_radius: *connectivity,
                root_policy: parse_root_policy(root)
                    .map_err(|m| CliError::new("invalid-root-policy", m))?,
            };
            let result = extract_main(&g, &params)?;
            println!(
                "kept {} of {} nodes (threshold {:.6} mm, root {})",
                result.kept_nodes,
                g.node_count(),
                result.threshold_abs,
                result.root_id
            );
            if let Some(path) = graph_out {
                io::export_graph(&result.g_main, path)?;
            }
            if let Some(path) = mask_out {
                let ps = pixel_size.unwrap_or(g.fov_mm() / *width as f64);
                let mask = main_vessel_mask(&result, *width, *height, ps, *threshold)?;
                io::write_mask_pgm(&mask, path)?;
            }
            if let Some(path) = trace {
                let rows: Vec<String> = result
                    .trace
                    .iter()
                    .map(|s| format!("{},{},{}", s.step, s.node, s.r))
                    .collect();
                io::write_csv(path, "step,node_id,r", &rows)?;
            }
            Ok(())
        }
        Command::Eval {
            pred,
            gt,
            img_a,
            img_b,
            report,
            window,
            k1,
            k2,
        } => {
            let pred_mask = read_mask(pred)?;
            let gt_mask = read_mask(gt)?;
            let images = match (img_a, img_b) {
                (Some(a), Some(b)) => Some((io::read_image(a)?, io::read_image(b)?)),
                (None, None) => None,
                _ => {
                    return Err(CliError::new(
                        "invalid-arguments",
                        "--img-a and --img-b must be given together",
                    ))
                }
            };
            let counts = metrics::pixel_counts(&pred_mask, &gt_mask)?;
            let iou = metrics::iou(&pred_mask, &gt_mask)?;
            let dice = metrics::dice(&pred_mask, &gt_mask)?;
            let (ssim, mse) = match &images {
                Some((a, b)) => (metrics::ssim(a, b, *window, *k1, *k2)?, metrics::mse(a, b)?),
                None => {
                    let a = pred_mask.to_image(1.0);
                    let b = gt_mask.to_image(1.0);
                    (metrics::ssim(&a, &b, *window, *k1, *k2)?, metrics::mse(&a, &b)?)
                }
            };
            let full = MetricsReport {
                iou,
                dice,
                ssim,
                mse,
                pixel_counts: counts,
            };
            let is_json = report.extension().and_then(|e| e.to_str()) == Some("json");
            if is_json {
                let text = serde_json::to_string_pretty(&full).expect("report serializes");
                io::write_text(report, &text)?;
            } else {
                io::write_csv(
                    report,
                    "iou,dice,ssim,mse,intersection,union,a_only,b_only",
                    &[format!(
                        "{iou},{dice},{ssim},{mse},{},{},{},{}",
                        counts.intersection, counts.union, counts.a_only, counts.b_only
                    )],
                )?;
            }
            println!("iou={iou:.6} dice={dice:.6} ssim={ssim:.6} mse={mse:.6}");
            Ok(())
        }
        Command::SweepRmin {
            config,
            values,
            out,
            side,
            plot_data,
        } => {
            let cfg = config.load()?;
            let g = synthesize(&cfg.synthesis, &cfg.radius)?;
            let truth = main_vessel_truth(&g, cfg.truth_ratio)?;
            let settings = RenderSettings::for_graph(&g, *side);
            let rows = sweep_rmin(&g, &truth, values, &settings)?;
            let (header, lines) = sweep_csv(&rows, "rmin", *plot_data);
            io::write_csv(out, &header, &lines)?;
            println!("{} rows -> {}", rows.len(), out.display());
            Ok(())
        }
        Command::SweepN {
            config,
            values,
            rmin,
            out,
            side,
            plot_data,
        } => {
            let cfg = config.load()?;
            let rows = sweep_nodes(
                &cfg.synthesis,
                &cfg.radius,
                values,
                *rmin,
                cfg.truth_ratio,
                *side,
            )?;
            let (header, lines) = sweep_csv(&rows, "n", *plot_data);
            io::write_csv(out, &header, &lines)?;
            println!("{} rows -> {}", rows.len(), out.display());
            Ok(())
        }
        Command::Bench {
            nodes,
            reps,
            seed,
            source,
            out,
        } => {
            let g = match source.as_str() {
                "tree" => {
                    let sca = vesselkit::synthesis::ScaParams::scaled_to_density(*nodes, *seed);
                    synthesize(&sca, &Default::default())?
                }
                "random" => random_connected_graph(*nodes, 0.5, *seed),
                other => {
                    return Err(CliError::new(
                        "invalid-source",
                        format!("unknown graph source '{other}' (use tree or random)"),
                    ))
                }
            };
            let stats = time_segmentation(&g, &Default::default(), *reps)?;
            io::write_csv(
                out,
                "nodes,edges,reps,min_us,median_us,p95_us,parameters,ops_per_visit",
                &[format!(
                    "{},{},{},{},{},{},0,O(1)",
                    stats.nodes, stats.edges, stats.reps, stats.min_us, stats.median_us, stats.p95_us
                )],
            )?;
            println!(
                "extraction on {} nodes: min {} us, median {} us, p95 {} us (trainable parameters: 0)",
                stats.nodes, stats.min_us, stats.median_us, stats.p95_us
            );
            Ok(())
        }
        Command::LossesDemo {
            real,
            fake,
            steps,
            lr,
            out,
        } => {
            let real_rows = parse_feature_csv(real)?;
            let fake_rows = parse_feature_csv(fake)?;
            let trace = toy_adversarial_fit(&real_rows, &fake_rows, *steps, *lr)?;
            let rows: Vec<String> = trace
                .iter()
                .enumerate()
                .map(|(i, b)| format!("{i},{},{},{},{}", b.l_gan, b.l_gp, b.l_seg, b.l_total))
                .collect();
            io::write_csv(out, "step,l_gan,l_gp,l_seg,l_total", &rows)?;
            let last = trace.last().expect("trace never empty");
            println!(
                "{} steps: l_gan {:.6} -> {:.6}",
                trace.len() - 1,
                trace[0].l_gan,
                last.l_gan
            );
            Ok(())
        }
        Command::Run { config, out_dir } => {
            let mut cfg = config.load()?;
            if let Some(dir) = out_dir {
                cfg.out_dir = dir.clone();
            }
            let manifest = run_pipeline(&cfg)?;
            println!(
                "pipeline complete: iou={:.6} dice={:.6} ssim={:.6} mse={:.6}",
                manifest.report.iou, manifest.report.dice, manifest.report.ssim, manifest.report.mse
            );
            for e in &manifest.entries {
                println!("{:016x}  {}", e.fnv1a64, e.file);
            }
            println!("manifest -> {}", cfg.out_dir.join("manifest.txt").display());
            Ok(())
        }
    }
}
