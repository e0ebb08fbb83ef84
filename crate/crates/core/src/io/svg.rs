use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{io_err, IoError};
use crate::net::{EmbeddedNet, VertexKind};

/// Drawing parameters in net coordinates; the margin is a fraction of the
/// larger bounding-box side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub stroke_width: f64,
    pub balanced_radius: f64,
    pub boundary_radius: f64,
    pub margin_fraction: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            stroke_width: 0.01,
            balanced_radius: 0.025,
            boundary_radius: 0.06,
            margin_fraction: 0.05,
        }
    }
}

impl SvgStyle {
    pub fn validate(&self) -> Result<(), IoError> {
        let all = [
            self.stroke_width,
            self.balanced_radius,
            self.boundary_radius,
            self.margin_fraction,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(IoError::InvalidStyle("all style values must be positive"))
        }
    }
}

/// Axis-aligned bounds `(min_x, min_y, max_x, max_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn of(net: &EmbeddedNet<f64>) -> Self {
        let mut b = Bounds {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for p in net.positions() {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        b
    }

    pub fn union(self, o: Bounds) -> Bounds {
        Bounds {
            min_x: self.min_x.min(o.min_x),
            min_y: self.min_y.min(o.min_y),
            max_x: self.max_x.max(o.max_x),
            max_y: self.max_y.max(o.max_y),
        }
    }
}

/// SVG document for a net, framed by its own bounding box.
pub fn render_svg(net: &EmbeddedNet<f64>, style: &SvgStyle) -> Result<String, IoError> {
    render_svg_in(net, style, Bounds::of(net))
}

/// SVG document for a net inside the given bounds. The y axis is flipped so
/// the picture has the usual mathematical orientation.
pub fn render_svg_in(net: &EmbeddedNet<f64>, style: &SvgStyle, bounds: Bounds) -> Result<String, IoError> {
    style.validate()?;
    let w = bounds.max_x - bounds.min_x;
    let h = bounds.max_y - bounds.min_y;
    let span = w.max(h);
    let margin = if span > 0.0 { span * style.margin_fraction } else { 1.0 };
    let (vx, vy) = (bounds.min_x - margin, -bounds.max_y - margin);
    let (vw, vh) = (w + 2.0 * margin, h + 2.0 * margin);
    let px_w = 800.0_f64;
    let px_h = (px_w * vh / vw).round();

    let topo = net.topology();
    let pos = net.positions();
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{px_w}\" height=\"{px_h}\" viewBox=\"{vx} {vy} {vw} {vh}\">"
    );
    let _ = writeln!(
        s,
        "<g stroke=\"#000000\" stroke-width=\"{}\" stroke-linecap=\"round\">",
        style.stroke_width
    );
    for &(a, b) in topo.edges() {
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            pos[a].x, -pos[a].y, pos[b].x, -pos[b].y
        );
    }
    s.push_str("</g>\n<g stroke=\"none\">\n");
    for (v, p) in pos.iter().enumerate() {
        let (r, fill) = match topo.kind(v) {
            VertexKind::Boundary => (style.boundary_radius, "#c0392b"),
            VertexKind::Interior => (style.balanced_radius, "#000000"),
        };
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{fill}\"/>", p.x, -p.y);
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn export_svg(net: &EmbeddedNet<f64>, style: &SvgStyle, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, render_svg(net, style)?).map_err(io_err(path))
}

/// Writes `frame_00000.svg`, `frame_00001.svg`, … into `dir`, all framed by
/// the union of the frames' bounding boxes. Returns the number written.
pub fn write_frames(frames: &[EmbeddedNet<f64>], style: &SvgStyle, dir: impl AsRef<Path>) -> Result<usize, IoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let Some(first) = frames.first() else {
        return Ok(0);
    };
    let bounds = frames.iter().fold(Bounds::of(first), |b, f| b.union(Bounds::of(f)));
    for (i, frame) in frames.iter().enumerate() {
        let path = dir.join(format!("frame_{i:05}.svg"));
        fs::write(&path, render_svg_in(frame, style, bounds)?).map_err(io_err(&path))?;
    }
    Ok(frames.len())
}
