//! Straight-line SVG rendering of a laid-out graph.
//!
//! Output is a pure function of the inputs: identical graph, layout, and
//! options produce byte-identical documents.

use std::fmt::Write;

use crate::graph::{Graph, Layout};

#[derive(Debug, Clone)]
pub struct SvgOptions {
    /// Draw a disc per node in addition to the edge segments.
    pub node_discs: bool,
    /// Rendered width in pixels; height follows the aspect ratio.
    pub width_px: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            node_discs: false,
            width_px: 1000.0,
        }
    }
}

/// Render the layout with a 2% viewport margin. Edge stroke width scales
/// with the drawing extent and opacity falls with the edge count so dense
/// graphs stay legible.
pub fn render_svg(g: &Graph, x: &Layout, opts: &SvgOptions) -> String {
    assert_eq!(x.len(), g.node_count(), "layout length mismatch");

    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for c in x.coords() {
        for k in 0..2 {
            min[k] = min[k].min(c[k]);
            max[k] = max[k].max(c[k]);
        }
    }
    if x.is_empty() {
        min = [0.0, 0.0];
        max = [1.0, 1.0];
    }
    let span = [max[0] - min[0], max[1] - min[1]];
    let extent = span[0].max(span[1]);
    let margin = if extent > 0.0 { 0.02 * extent } else { 1.0 };
    let view = [
        min[0] - margin,
        min[1] - margin,
        span[0] + 2.0 * margin,
        span[1] + 2.0 * margin,
    ];

    let m = g.edge_count().max(1) as f64;
    let stroke_width = if extent > 0.0 { extent / 1000.0 } else { 0.002 };
    let opacity = (2000.0 / m).clamp(0.05, 1.0);
    let height_px = opts.width_px * view[3] / view[2];

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="{:?} {:?} {:?} {:?}">"#,
        opts.width_px, height_px, view[0], view[1], view[2], view[3]
    );
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="{stroke_width:?}" stroke-opacity="{opacity:?}" stroke-linecap="round">"#
    );
    for &(u, v) in g.edges() {
        let a = x[u as usize];
        let b = x[v as usize];
        let _ = writeln!(
            out,
            r#"<line x1="{:?}" y1="{:?}" x2="{:?}" y2="{:?}"/>"#,
            a[0], a[1], b[0], b[1]
        );
    }
    let _ = writeln!(out, "</g>");
    if opts.node_discs {
        let r = if extent > 0.0 { extent / 400.0 } else { 0.005 };
        let _ = writeln!(out, r#"<g fill="black">"#);
        for c in x.coords() {
            let _ = writeln!(out, r#"<circle cx="{:?}" cy="{:?}" r="{r:?}"/>"#, c[0], c[1]);
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
