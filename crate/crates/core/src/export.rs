//! Graph and barcode exports: JSON (canonical), Graphviz DOT, and SVG.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapper::{MapperGraph, MapperNode};
use crate::persistence::{Barcode, Interval};
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExportFormat {
    Json,
    Dot,
    Svg,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            "svg" => Ok(ExportFormat::Svg),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(Error::InvalidParameter(format!("unknown export format {other:?}"))),
        }
    }
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::Dot => "dot",
            ExportFormat::Svg => "svg",
            ExportFormat::Csv => "csv",
        }
    }
}

fn graph_as_f64<T: Scalar>(graph: &MapperGraph<T>) -> MapperGraph<f64> {
    MapperGraph {
        nodes: graph
            .nodes
            .iter()
            .map(|n| MapperNode {
                id: n.id,
                size: n.size,
                members: n.members.clone(),
                mean: n.mean.iter().map(|x| x.as_f64()).collect(),
            })
            .collect(),
        edges: graph.edges.clone(),
    }
}

/// Renders a Mapper graph. CSV is not a graph format and yields an error.
pub fn export_graph<T: Scalar>(graph: &MapperGraph<T>, format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => Ok(serde_json::to_vec(&graph_as_f64(graph))?),
        ExportFormat::Dot => Ok(graph_dot(graph).into_bytes()),
        ExportFormat::Svg => Ok(graph_svg(graph).into_bytes()),
        ExportFormat::Csv => Err(Error::InvalidParameter("graphs export as json, dot or svg".into())),
    }
}

pub fn parse_graph_json(bytes: &[u8]) -> Result<MapperGraph<f64>> {
    let graph: MapperGraph<f64> = serde_json::from_slice(bytes)?;
    for (i, node) in graph.nodes.iter().enumerate() {
        if node.id != i || node.size != node.members.len() {
            return Err(Error::ParseError {
                location: format!("node {i}"),
                reason: "ids must be 0..V-1 and size must equal the member count".into(),
            });
        }
    }
    if let Some(&[a, b]) = graph.edges.iter().find(|&&[a, b]| a >= b || b >= graph.nodes.len()) {
        return Err(Error::ParseError {
            location: format!("edge [{a}, {b}]"),
            reason: "edges must be [a, b] with a < b < V".into(),
        });
    }
    Ok(graph)
}

/// Blue for the smallest node, red for the largest.
fn size_color(size: usize, min: usize, max: usize) -> String {
    let t = if max > min { (size - min) as f64 / (max - min) as f64 } else { 1.0 };
    let r = (255.0 * t).round() as u8;
    let b = (255.0 * (1.0 - t)).round() as u8;
    format!("#{r:02x}00{b:02x}")
}

fn size_range<T>(graph: &MapperGraph<T>) -> (usize, usize) {
    let min = graph.nodes.iter().map(|n| n.size).min().unwrap_or(0);
    let max = graph.nodes.iter().map(|n| n.size).max().unwrap_or(0);
    (min, max)
}

fn graph_dot<T: Scalar>(graph: &MapperGraph<T>) -> String {
    let (min, max) = size_range(graph);
    let mut out = String::from("graph mapper {\n  node [shape=circle, style=filled, fontcolor=white];\n");
    for node in &graph.nodes {
        let _ = writeln!(
            out,
            "  {} [label=\"{}\", fillcolor=\"{}\"];",
            node.id,
            node.size,
            size_color(node.size, min, max)
        );
    }
    for &[a, b] in &graph.edges {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
    out
}

fn gray(v: f64, scale: f64) -> String {
    let level = (127.5 + 127.5 * (v / scale).clamp(-1.0, 1.0)).round() as u8;
    format!("#{level:02x}{level:02x}{level:02x}")
}

/// Nodes evenly spaced on a circle in id order, each with its 3×3 mean
/// filter drawn beside it when points are 9-dimensional.
fn graph_svg<T: Scalar>(graph: &MapperGraph<T>) -> String {
    const SIZE: f64 = 900.0;
    const RADIUS: f64 = 360.0;
    let center = SIZE / 2.0;
    let (min, max) = size_range(graph);
    let v = graph.nodes.len().max(1) as f64;
    let pos = |id: usize| {
        let a = 2.0 * std::f64::consts::PI * id as f64 / v - std::f64::consts::FRAC_PI_2;
        (center + RADIUS * a.cos(), center + RADIUS * a.sin())
    };
    let node_radius = |size: usize| 3.0 + 9.0 * (size as f64 / max.max(1) as f64).sqrt();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for &[a, b] in &graph.edges {
        let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#888888\" stroke-width=\"1\"/>"
        );
    }
    for node in &graph.nodes {
        let (x, y) = pos(node.id);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" fill=\"{}\"><title>node {} size {}</title></circle>",
            node_radius(node.size),
            size_color(node.size, min, max),
            node.id,
            node.size
        );
        if node.mean.len() == 9 {
            let scale = node.mean.iter().fold(0.0f64, |m, x| m.max(x.as_f64().abs())).max(1e-12);
            let (gx, gy) = (x + node_radius(node.size) + 2.0, y - 6.0);
            for (k, value) in node.mean.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"4\" height=\"4\" fill=\"{}\"/>",
                    gx + 4.0 * (k % 3) as f64,
                    gy + 4.0 * (k / 3) as f64,
                    gray(value.as_f64(), scale)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Serialize, Deserialize)]
struct BarcodeJson {
    dim0: Vec<(f64, Option<f64>)>,
    dim1: Vec<(f64, Option<f64>)>,
}

fn bars_to_json<T: Scalar>(bars: &[Interval<T>]) -> Vec<(f64, Option<f64>)> {
    bars.iter()
        .map(|i| (i.birth.as_f64(), i.is_finite().then(|| i.death.as_f64())))
        .collect()
}

fn bars_from_json(bars: Vec<(f64, Option<f64>)>) -> Vec<Interval<f64>> {
    bars.into_iter()
        .map(|(b, d)| Interval::new(b, d.unwrap_or(f64::INFINITY)))
        .collect()
}

/// Renders a barcode. JSON encodes an infinite death as `null`.
pub fn export_barcode<T: Scalar>(barcode: &Barcode<T>, format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => Ok(serde_json::to_vec(&BarcodeJson {
            dim0: bars_to_json(&barcode.dim0),
            dim1: bars_to_json(&barcode.dim1),
        })?),
        ExportFormat::Svg => Ok(barcode_svg(barcode).into_bytes()),
        ExportFormat::Csv => {
            let mut out = String::from("dim,birth,death\n");
            for (dim, bars) in [(0, &barcode.dim0), (1, &barcode.dim1)] {
                for i in bars {
                    let death = if i.is_finite() { format!("{:?}", i.death.as_f64()) } else { "inf".into() };
                    let _ = writeln!(out, "{dim},{:?},{death}", i.birth.as_f64());
                }
            }
            Ok(out.into_bytes())
        }
        ExportFormat::Dot => Err(Error::InvalidParameter("barcodes export as json, svg or csv".into())),
    }
}

pub fn parse_barcode_json(bytes: &[u8]) -> Result<Barcode<f64>> {
    let raw: BarcodeJson = serde_json::from_slice(bytes)?;
    Ok(Barcode { dim0: bars_from_json(raw.dim0), dim1: bars_from_json(raw.dim1) })
}

/// Horizontal bars per dimension, longest first; infinite bars run to the
/// right edge and end in an arrow. Endpoints are labeled to 8 decimals.
fn barcode_svg<T: Scalar>(barcode: &Barcode<T>) -> String {
    const WIDTH: f64 = 800.0;
    const LEFT: f64 = 60.0;
    const PLOT: f64 = 560.0;
    const ROW: f64 = 12.0;
    let span = barcode
        .dim0
        .iter()
        .chain(&barcode.dim1)
        .flat_map(|i| [i.birth.as_f64(), if i.is_finite() { i.death.as_f64() } else { 0.0 }])
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let x_of = |v: f64| LEFT + PLOT * (v / span);

    let mut body = String::new();
    let mut y = 30.0;
    for (dim, bars) in [(0, &barcode.dim0), (1, &barcode.dim1)] {
        let _ = writeln!(body, "<text x=\"10\" y=\"{y:.1}\" font-size=\"14\">H{dim}</text>");
        y += 8.0;
        let mut sorted: Vec<&Interval<T>> = bars.iter().collect();
        sorted.sort_by(|a, b| cmp_scalar(b.lifetime(), a.lifetime()).then(cmp_scalar(a.birth, b.birth)));
        for bar in sorted {
            let x1 = x_of(bar.birth.as_f64());
            let (x2, label) = if bar.is_finite() {
                (x_of(bar.death.as_f64()), format!("[{:.8}, {:.8}]", bar.birth.as_f64(), bar.death.as_f64()))
            } else {
                (LEFT + PLOT + 10.0, format!("[{:.8}, inf)", bar.birth.as_f64()))
            };
            let color = if dim == 0 { "#1f77b4" } else { "#d62728" };
            let _ = writeln!(
                body,
                "<line x1=\"{x1:.2}\" y1=\"{y:.1}\" x2=\"{x2:.2}\" y2=\"{y:.1}\" stroke=\"{color}\" stroke-width=\"6\"/>"
            );
            if !bar.is_finite() {
                let _ = writeln!(
                    body,
                    "<polygon points=\"{:.2},{:.1} {:.2},{:.1} {:.2},{:.1}\" fill=\"{color}\"/>",
                    x2,
                    y - 6.0,
                    x2 + 8.0,
                    y,
                    x2,
                    y + 6.0
                );
            }
            let _ = writeln!(
                body,
                "<text x=\"{:.2}\" y=\"{:.1}\" font-size=\"9\">{label}</text>",
                LEFT + PLOT + 24.0,
                y + 3.0
            );
            y += ROW;
        }
        y += 20.0;
    }
    let _ = writeln!(
        body,
        "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"black\"/><text x=\"{LEFT}\" y=\"{:.1}\" font-size=\"10\">0</text><text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:.8}</text>",
        LEFT + PLOT,
        y + 14.0,
        LEFT + PLOT - 40.0,
        y + 14.0,
        span
    );
    let height = y + 30.0;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}
