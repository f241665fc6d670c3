//! File formats: graph documents (JSON), PGM/PNG images, raw volumes,
//! CSV tables, and external dataset ingestion.
//!
//! The graph document is a JSON object
//! `{"fov_mm", "root", "nodes": [{"id","x","y","z","r","parent"}], "edges"}`.
//! Edges are implied by `parent` links; graphs that cannot be expressed as
//! parent links (any node with two incoming edges) carry an explicit
//! `"edges"` array instead. Both forms may be combined on input. Numbers
//! round-trip bit-exactly through the shortest-representation float
//! encoding.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, VesselEdge, VesselGraph, VesselNode};
use crate::raster::{Mask, RasterImage2D, Volume3D};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Parse { path: PathBuf, detail: String },
    #[error("{path}: graph failed validation: {report}")]
    InvalidGraph { path: PathBuf, report: String },
    #[error("image {a_w}x{a_h} and mask {b_w}x{b_h} dimensions differ")]
    ShapeMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
    #[error("{path}: expected a grayscale image")]
    NonGrayscale { path: PathBuf },
    #[error("{path}: unsupported image format (use .pgm or .png)")]
    UnsupportedFormat { path: PathBuf },
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

// ---------------------------------------------------------------------------
// graph documents
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    fov_mm: f64,
    root: Option<NodeId>,
    nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: NodeId,
    x: f64,
    y: f64,
    z: f64,
    r: f64,
    parent: Option<NodeId>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    from: NodeId,
    to: NodeId,
}

/// Serialize a graph to the shared JSON document format.
pub fn graph_to_json(g: &VesselGraph) -> String {
    // parent representation is possible iff no node has two incoming edges
    let mut parent: std::collections::HashMap<NodeId, NodeId> = Default::default();
    let mut representable = true;
    for e in g.edges() {
        if g.node(e.from).is_none() || g.node(e.to).is_none() || e.from == e.to {
            representable = false;
            break;
        }
        if parent.insert(e.to, e.from).is_some() {
            representable = false;
            break;
        }
    }
    let doc = if representable {
        GraphDoc {
            fov_mm: g.fov_mm(),
            root: g.root(),
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id,
                    x: n.x,
                    y: n.y,
                    z: n.z,
                    r: n.r,
                    parent: parent.get(&n.id).copied(),
                })
                .collect(),
            edges: None,
        }
    } else {
        GraphDoc {
            fov_mm: g.fov_mm(),
            root: g.root(),
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id,
                    x: n.x,
                    y: n.y,
                    z: n.z,
                    r: n.r,
                    parent: None,
                })
                .collect(),
            edges: Some(
                g.edges()
                    .iter()
                    .map(|e| EdgeDoc {
                        from: e.from,
                        to: e.to,
                    })
                    .collect(),
            ),
        }
    };
    serde_json::to_string_pretty(&doc).expect("graph document serializes")
}

/// Parse a graph document. The graph is validated; violations are errors.
pub fn graph_from_json(text: &str, origin: &Path) -> Result<VesselGraph, IoError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: origin.to_path_buf(),
        detail: e.to_string(),
    })?;
    let mut g = VesselGraph::new(doc.fov_mm);
    for n in &doc.nodes {
        g.add_node(VesselNode::new(n.id, n.x, n.y, n.z, n.r));
    }
    for n in &doc.nodes {
        if let Some(p) = n.parent {
            let weight = g.node(p).map(|pn| pn.r).unwrap_or(f64::NAN);
            g.add_edge_raw(VesselEdge {
                from: p,
                to: n.id,
                weight,
            });
        }
    }
    if let Some(edges) = &doc.edges {
        for e in edges {
            let weight = g.node(e.from).map(|n| n.r).unwrap_or(f64::NAN);
            g.add_edge_raw(VesselEdge {
                from: e.from,
                to: e.to,
                weight,
            });
        }
    }
    g.set_root(doc.root);
    let report = g.validate();
    if !report.is_valid() {
        return Err(IoError::InvalidGraph {
            path: origin.to_path_buf(),
            report: report.to_string().replace('\n', "; "),
        });
    }
    Ok(g)
}

pub fn export_graph(g: &VesselGraph, path: &Path) -> Result<(), IoError> {
    fs::write(path, graph_to_json(g)).map_err(|e| file_err(path, e))
}

pub fn import_graph(path: &Path) -> Result<VesselGraph, IoError> {
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    graph_from_json(&text, path)
}

// ---------------------------------------------------------------------------
// PGM images
// ---------------------------------------------------------------------------

/// Output sample depth for PGM files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// Write a binary PGM (P5). Sixteen-bit samples are big-endian, following
/// the format specification.
pub fn write_pgm(img: &RasterImage2D, path: &Path, depth: BitDepth) -> Result<(), IoError> {
    let maxval = depth.max_value();
    let mut bytes = Vec::with_capacity(img.data().len() * 2 + 32);
    bytes.extend_from_slice(format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).as_bytes());
    for &v in img.data() {
        let q = (v * maxval as f64).round().clamp(0.0, maxval as f64) as u32;
        match depth {
            BitDepth::Eight => bytes.push(q as u8),
            BitDepth::Sixteen => bytes.extend_from_slice(&(q as u16).to_be_bytes()),
        }
    }
    fs::write(path, bytes).map_err(|e| file_err(path, e))
}

/// Write a mask as an 8-bit PGM with values {0, 255}.
pub fn write_mask_pgm(mask: &Mask, path: &Path) -> Result<(), IoError> {
    let mut bytes = Vec::with_capacity(mask.data().len() + 32);
    bytes.extend_from_slice(format!("P5\n{} {}\n255\n", mask.width(), mask.height()).as_bytes());
    bytes.extend(mask.data().iter().map(|&v| if v == 1 { 255u8 } else { 0 }));
    fs::write(path, bytes).map_err(|e| file_err(path, e))
}

/// Read a binary PGM (P5), normalizing samples to [0, 1]. The returned
/// image carries a pixel size of 1.0 (PGM stores no physical scale).
pub fn read_pgm(path: &Path) -> Result<RasterImage2D, IoError> {
    let bytes = fs::read(path).map_err(|e| file_err(path, e))?;
    let parse = |detail: &str| IoError::Parse {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    if !bytes.starts_with(b"P5") {
        return Err(parse("not a binary PGM (missing P5 magic)"));
    }
    // header tokens: width, height, maxval; '#' starts a comment
    let mut pos = 2usize;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(parse("truncated PGM header"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text.parse().map_err(|_| parse("bad PGM header number"))?;
    }
    if pos >= bytes.len() {
        return Err(parse("missing PGM sample data"));
    }
    pos += 1; // single whitespace byte after maxval
    let (w, h, maxval) = (fields[0] as usize, fields[1] as usize, fields[2]);
    if maxval == 0 || maxval > 65535 {
        return Err(parse("PGM maxval out of range"));
    }
    let two_byte = maxval > 255;
    let expected = w * h * if two_byte { 2 } else { 1 };
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(parse(&format!(
            "expected {expected} sample bytes, found {}",
            data.len()
        )));
    }
    let scale = 1.0 / maxval as f64;
    let samples: Vec<f64> = if two_byte {
        data[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    } else {
        data[..expected].iter().map(|&b| b as f64 * scale).collect()
    };
    let clamped: Vec<f64> = samples.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    RasterImage2D::from_data(w, h, 1.0, clamped).map_err(|e| parse(&e.to_string()))
}

/// Read an 8- or 16-bit grayscale PNG, normalizing to [0, 1].
pub fn read_png_gray(path: &Path) -> Result<RasterImage2D, IoError> {
    let file = fs::File::open(path).map_err(|e| file_err(path, e))?;
    let decoder = png::Decoder::new(std::io::BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let buf_size = reader.output_buffer_size().ok_or_else(|| IoError::Parse {
        path: path.to_path_buf(),
        detail: "PNG dimensions overflow".into(),
    })?;
    let mut buf = vec![0u8; buf_size];
    let info = reader.next_frame(&mut buf).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    if info.color_type != png::ColorType::Grayscale {
        return Err(IoError::NonGrayscale {
            path: path.to_path_buf(),
        });
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data: Vec<f64> = match info.bit_depth {
        png::BitDepth::Eight => buf[..w * h].iter().map(|&b| b as f64 / 255.0).collect(),
        png::BitDepth::Sixteen => buf[..w * h * 2]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
            .collect(),
        _ => {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                detail: format!("unsupported PNG bit depth {:?}", info.bit_depth),
            })
        }
    };
    RasterImage2D::from_data(w, h, 1.0, data).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// Read a grayscale image by extension (.pgm or .png).
pub fn read_image(path: &Path) -> Result<RasterImage2D, IoError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => read_pgm(path),
        Some("png") => read_png_gray(path),
        _ => Err(IoError::UnsupportedFormat {
            path: path.to_path_buf(),
        }),
    }
}

// ---------------------------------------------------------------------------
// volumes
// ---------------------------------------------------------------------------

/// Write a volume as raw little-endian u16 samples plus a text sidecar
/// header `<path>.hdr` recording dims and voxel size.
pub fn write_volume_raw(vol: &Volume3D, path: &Path) -> Result<(), IoError> {
    let (w, h, d) = vol.dims();
    let mut bytes = Vec::with_capacity(vol.data().len() * 2);
    for &v in vol.data() {
        let q = (v * 65535.0).round().clamp(0.0, 65535.0) as u16;
        bytes.extend_from_slice(&q.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| file_err(path, e))?;
    let vs = vol.voxel_size();
    let header = format!(
        "width={w}\nheight={h}\ndepth={d}\nvoxel_size_mm={} {} {}\nsample=u16le\norder=x-fastest\n",
        vs[0], vs[1], vs[2]
    );
    let hdr_path = sidecar_header_path(path);
    fs::write(&hdr_path, header).map_err(|e| file_err(&hdr_path, e))
}

pub fn sidecar_header_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".hdr");
    PathBuf::from(os)
}

// ---------------------------------------------------------------------------
// CSV + stats
// ---------------------------------------------------------------------------

/// Write a CSV file from a header line and preformatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), IoError> {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| file_err(path, e))
}

/// Simple per-image statistics for CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn image_stats(img: &RasterImage2D) -> ImageStats {
    let data = img.data();
    if data.is_empty() {
        return ImageStats {
            min: 0.0,
            max: 0.0,
            mean: 0.0,
            std: 0.0,
        };
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in data {
        min = min.min(v);
        max = max.max(v);
    }
    let mean = crate::metrics::pairwise_sum(data) / data.len() as f64;
    let sq: Vec<f64> = data.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = crate::metrics::pairwise_sum(&sq) / data.len() as f64;
    ImageStats {
        min,
        max,
        mean,
        std: var.sqrt(),
    }
}

// ---------------------------------------------------------------------------
// external dataset ingestion
// ---------------------------------------------------------------------------

/// An externally supplied image / ground-truth mask pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPair {
    pub image_path: PathBuf,
    pub mask_path: PathBuf,
    pub fov_mm: f64,
    pub source_tag: String,
}

/// Load and normalize an external pair: the image lands in [0, 1], the
/// mask is binarized at half its maximum value, and dimensions must match.
pub fn ingest_external(pair: &DatasetPair) -> Result<(RasterImage2D, Mask), IoError> {
    let image = read_image(&pair.image_path)?;
    let mask_img = read_image(&pair.mask_path)?;
    if image.width() != mask_img.width() || image.height() != mask_img.height() {
        return Err(IoError::ShapeMismatch {
            a_w: image.width(),
            a_h: image.height(),
            b_w: mask_img.width(),
            b_h: mask_img.height(),
        });
    }
    let mask = Mask::from_image(&mask_img, 0.5).expect("0.5 is a valid threshold");
    Ok((image, mask))
}

// ---------------------------------------------------------------------------
// hashing
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit hash, used for manifest entries.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

pub fn hash_file(path: &Path) -> Result<u64, IoError> {
    let mut file = fs::File::open(path).map_err(|e| file_err(path, e))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(|e| file_err(path, e))?;
    Ok(fnv1a64(&buf))
}

/// Write text through a buffered writer (small helper for trace files).
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut f = fs::File::create(path).map_err(|e| file_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| file_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synthesize, RadiusParams, ScaParams};

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn graph_round_trips_bit_exactly() {
        let sca = ScaParams {
            target_nodes: 300,
            seed: 9,
            ..Default::default()
        };
        let g = synthesize(&sca, &RadiusParams::default()).unwrap();
        let dir = tmp();
        let path = dir.path().join("graph.json");
        export_graph(&g, &path).unwrap();
        let back = import_graph(&path).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn extracted_subgraph_round_trips() {
        let sca = ScaParams {
            target_nodes: 300,
            seed: 10,
            ..Default::default()
        };
        let g = synthesize(&sca, &RadiusParams::default()).unwrap();
        let result = crate::segment::extract_main(&g, &Default::default()).unwrap();
        let dir = tmp();
        let path = dir.path().join("main.json");
        export_graph(&result.g_main, &path).unwrap();
        assert_eq!(import_graph(&path).unwrap(), result.g_main);
    }

    #[test]
    fn paired_edge_graph_round_trips_by_edge_list() {
        let mut g = VesselGraph::new(3.0);
        g.add_node(VesselNode::new(0, 0.0, 0.0, 0.0, 1.0));
        g.add_node(VesselNode::new(1, 0.5, 0.0, 0.0, 0.5));
        g.add_node(VesselNode::new(2, 1.0, 0.0, 0.0, 0.25));
        for (a, b) in [(0u32, 1u32), (1, 0), (1, 2), (2, 1)] {
            g.link(a, b).unwrap();
        }
        let json = graph_to_json(&g);
        assert!(json.contains("\"edges\""));
        let back = graph_from_json(&json, Path::new("inline")).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn missing_nodes_field_is_a_parse_error() {
        let err = graph_from_json(r#"{"fov_mm": 3.0, "root": null}"#, Path::new("x.json"))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nodes"), "error should name the field: {msg}");
    }

    #[test]
    fn negative_radius_fails_validation_on_import() {
        let doc = r#"{
            "fov_mm": 3.0,
            "root": null,
            "nodes": [{"id": 0, "x": 0.0, "y": 0.0, "z": 0.0, "r": -1.0, "parent": null}]
        }"#;
        let err = graph_from_json(doc, Path::new("bad.json")).unwrap_err();
        assert!(err.to_string().contains("non-positive-radius"));
    }

    #[test]
    fn pgm_round_trip_8_and_16_bit() {
        let mut rng = crate::rng::SplitMix64::new(3);
        let data: Vec<f64> = (0..64).map(|_| rng.next_f64()).collect();
        let img = RasterImage2D::from_data(8, 8, 1.0, data).unwrap();
        let dir = tmp();
        for (depth, tol) in [(BitDepth::Eight, 1.0 / 255.0), (BitDepth::Sixteen, 1.0 / 65535.0)] {
            let path = dir.path().join(match depth {
                BitDepth::Eight => "a8.pgm",
                BitDepth::Sixteen => "a16.pgm",
            });
            write_pgm(&img, &path, depth).unwrap();
            let back = read_pgm(&path).unwrap();
            assert_eq!(back.width(), 8);
            for (a, b) in img.data().iter().zip(back.data()) {
                assert!((a - b).abs() <= 0.5 * tol + 1e-12);
            }
        }
    }

    #[test]
    fn mask_pgm_uses_0_and_255() {
        let mask = Mask::from_data(2, 2, vec![0, 1, 1, 0]).unwrap();
        let dir = tmp();
        let path = dir.path().join("m.pgm");
        write_mask_pgm(&mask, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        let tail = &bytes[bytes.len() - 4..];
        assert_eq!(tail, &[0, 255, 255, 0]);
        // reading back and binarizing recovers the mask
        let img = read_pgm(&path).unwrap();
        let back = Mask::from_image(&img, 0.5).unwrap();
        assert_eq!(back, mask);
    }

    #[test]
    fn pgm_reader_rejects_garbage() {
        let dir = tmp();
        let path = dir.path().join("bad.pgm");
        fs::write(&path, b"P6\n2 2\n255\n0000").unwrap();
        assert!(read_pgm(&path).is_err());
        fs::write(&path, b"P5\n2 2\n255\n\x00").unwrap();
        let err = read_pgm(&path).unwrap_err();
        assert!(err.to_string().contains("sample bytes"));
    }

    #[test]
    fn png_gray_round_trip() {
        let dir = tmp();
        let path = dir.path().join("g.png");
        let file = fs::File::create(&path).unwrap();
        let mut enc = png::Encoder::new(std::io::BufWriter::new(file), 4, 2);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().unwrap();
        writer.write_image_data(&[0, 64, 128, 255, 10, 20, 30, 40]).unwrap();
        writer.finish().unwrap();

        let img = read_png_gray(&path).unwrap();
        assert_eq!((img.width(), img.height()), (4, 2));
        assert!((img.data()[3] - 1.0).abs() < 1e-12);
        assert!((img.data()[0]).abs() < 1e-12);
    }

    #[test]
    fn ingest_external_binarizes_and_checks_dims() {
        let dir = tmp();
        let img_path = dir.path().join("img.pgm");
        let mask_path = dir.path().join("mask.pgm");
        let img = RasterImage2D::from_data(3, 2, 1.0, vec![0.1, 0.5, 0.9, 0.2, 0.4, 0.6]).unwrap();
        write_pgm(&img, &img_path, BitDepth::Eight).unwrap();
        let mask = Mask::from_data(3, 2, vec![0, 1, 1, 0, 0, 1]).unwrap();
        write_mask_pgm(&mask, &mask_path).unwrap();

        let pair = DatasetPair {
            image_path: img_path.clone(),
            mask_path: mask_path.clone(),
            fov_mm: 3.0,
            source_tag: "external-octa".into(),
        };
        let (image, got_mask) = ingest_external(&pair).unwrap();
        assert_eq!((image.width(), image.height()), (3, 2));
        assert_eq!(got_mask, mask);

        // mismatched dims
        let small = RasterImage2D::from_data(2, 2, 1.0, vec![0.0; 4]).unwrap();
        let small_path = dir.path().join("small.pgm");
        write_pgm(&small, &small_path, BitDepth::Eight).unwrap();
        let bad = DatasetPair {
            image_path: small_path,
            mask_path,
            fov_mm: 3.0,
            source_tag: "external-octa".into(),
        };
        assert!(matches!(
            ingest_external(&bad),
            Err(IoError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn volume_writer_emits_sidecar() {
        let vol = crate::raster::render_volume(
            &{
                let mut g = VesselGraph::new(3.0);
                g.add_node(VesselNode::new(0, 0.2, 0.2, 0.2, 0.1));
                g
            },
            (4, 4, 4),
            [0.1; 3],
        )
        .unwrap();
        let dir = tmp();
        let path = dir.path().join("v.raw");
        write_volume_raw(&vol, &path).unwrap();
        assert_eq!(fs::read(&path).unwrap().len(), 4 * 4 * 4 * 2);
        let hdr = fs::read_to_string(sidecar_header_path(&path)).unwrap();
        assert!(hdr.contains("width=4"));
        assert!(hdr.contains("voxel_size_mm=0.1 0.1 0.1"));
    }

    #[test]
    fn fnv_hash_is_stable() {
        assert_eq!(fnv1a64(b""), 0xCBF2_9CE4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xAF63_DC4C_8601_EC8C);
        assert_ne!(fnv1a64(b"ab"), fnv1a64(b"ba"));
    }
}
