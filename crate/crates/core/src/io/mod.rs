//! Net files, SVG rendering, report export and the command-line interface.
//! Everything here works on `f64` nets.

pub mod cli;
mod report;
mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::net::{EmbeddedNet, NetError, NetTopology, VertexKind};

pub use report::{export_report, render_report, ReportFormat, ReportRef};
pub use svg::{export_svg, render_svg, render_svg_in, write_frames, Bounds, SvgStyle};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}{}: {message}", field.as_ref().map(|f| format!(" (field `{f}`)")).unwrap_or_default())]
    ParseError {
        line: usize,
        column: usize,
        field: Option<String>,
        message: String,
    },
    #[error("invariant violation: {0}")]
    InvariantViolation(#[from] NetError),
    #[error("invalid style: {0}")]
    InvalidStyle(&'static str),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    pub pos: [f64; 2],
    pub boundary: bool,
}

/// On-disk representation of an embedded net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub format_version: u32,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[String; 2]>,
}

impl NetFile {
    pub fn from_net(net: &EmbeddedNet<f64>) -> Self {
        let topo = net.topology();
        NetFile {
            format_version: FORMAT_VERSION,
            vertices: topo
                .vertices()
                .iter()
                .zip(net.positions())
                .map(|(v, p)| VertexRecord {
                    id: v.id.clone(),
                    pos: [p.x, p.y],
                    boundary: v.kind == VertexKind::Boundary,
                })
                .collect(),
            edges: topo.edge_ids().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        }
    }

    pub fn to_net(&self) -> Result<EmbeddedNet<f64>, IoError> {
        let kinds = self.vertices.iter().map(|v| {
            let kind = if v.boundary {
                VertexKind::Boundary
            } else {
                VertexKind::Interior
            };
            (v.id.clone(), kind)
        });
        let edges = self.edges.iter().map(|[a, b]| (a.clone(), b.clone()));
        let topo = NetTopology::new(kinds, edges)?;
        let pos: BTreeMap<String, Point<f64>> = self
            .vertices
            .iter()
            .map(|v| (v.id.clone(), Point::new(v.pos[0], v.pos[1])))
            .collect();
        Ok(EmbeddedNet::new(topo, &pos)?)
    }
}

/// Serializes a net as pretty-printed JSON with shortest round-trip decimals.
pub fn net_to_json(net: &EmbeddedNet<f64>) -> String {
    let mut s = serde_json::to_string_pretty(&NetFile::from_net(net)).expect("net file serializes");
    s.push('\n');
    s
}

pub fn net_from_json(text: &str) -> Result<EmbeddedNet<f64>, IoError> {
    let file: NetFile = serde_json::from_str(text).map_err(|e| IoError::ParseError {
        line: e.line(),
        column: e.column(),
        field: None,
        message: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        let (line, column) = locate(text, "\"format_version\"");
        return Err(IoError::ParseError {
            line,
            column,
            field: Some("format_version".into()),
            message: format!("unsupported version {} (expected {FORMAT_VERSION})", file.format_version),
        });
    }
    file.to_net()
}

/// 1-based line and column of the first occurrence of `needle`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    let Some(offset) = text.find(needle) else {
        return (0, 0);
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, column)
}

pub fn save_net(net: &EmbeddedNet<f64>, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, net_to_json(net)).map_err(io_err(path))
}

pub fn load_net(path: impl AsRef<Path>) -> Result<EmbeddedNet<f64>, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    net_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEGMENT: &str = r#"{
  "format_version": 1,
  "vertices": [
    {"id": "a", "pos": [0.1, 0.2], "boundary": true},
    {"id": "b", "pos": [1.0, -3e-7], "boundary": true}
  ],
  "edges": [["a", "b"]]
}"#;

    #[test]
    fn parses_minimal_file() {
        let net = net_from_json(SEGMENT).unwrap();
        assert_eq!(net.position("a").unwrap(), Point::new(0.1, 0.2));
        assert_eq!(net_from_json(&net_to_json(&net)).unwrap().positions(), net.positions());
    }

    #[test]
    fn rejects_unknown_version_with_location() {
        let text = SEGMENT.replace("\"format_version\": 1", "\"format_version\": 7");
        match net_from_json(&text) {
            Err(IoError::ParseError { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field.as_deref(), Some("format_version"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = SEGMENT.replace("[0.1, 0.2]", "[0.1 0.2]");
        assert!(matches!(net_from_json(&text), Err(IoError::ParseError { line: 4, .. })));
    }

    #[test]
    fn duplicate_edge_is_invariant_violation() {
        let text = SEGMENT.replace(r#"[["a", "b"]]"#, r#"[["a", "b"], ["b", "a"]]"#);
        assert!(matches!(
            net_from_json(&text),
            Err(IoError::InvariantViolation(NetError::DuplicateEdge(..)))
        ));
    }
}
