//! Scatter plots of section datasets.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bohm_vortex::sections::{Label, SectionDataset};
use bohm_vortex::VelocityField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotStyle {
    /// Width of the plotting area in pixels; the height follows from the
    /// data at equal aspect.
    pub width: f64,
    pub margin: f64,
    pub point_size: f64,
    /// Points closer than this many pixels to an earlier point of the same
    /// label are drawn once.
    pub resolution: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self { width: 800.0, margin: 40.0, point_size: 1.2, resolution: 0.25 }
    }
}

const UNLABELED: &str = "#000000";

fn color(label: Label) -> &'static str {
    match label {
        Label::Regular => "#1f77b4",
        Label::IslandChain => "#2ca02c",
        Label::Chaotic => "#d62728",
        Label::Periodic => "#9467bd",
        Label::Unresolved => "#7f7f7f",
        Label::Aborted => "#ff7f0e",
    }
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    margin: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [self.margin + (p[0] - self.x0) * self.scale, self.margin + (self.y1 - p[1]) * self.scale]
    }
}

/// Writes the section points coloured by label, at equal aspect, with the
/// vortex locus over one period overlaid.
pub fn emit_svg_scatter(dataset: &SectionDataset, path: &Path, style: &PlotStyle) -> Result<()> {
    let points = dataset.orbits.iter().flat_map(|o| o.orbit.points.iter());
    if dataset.orbits.iter().all(|o| o.orbit.points.is_empty()) {
        bail!("nothing to plot: the dataset has no section points");
    }
    let field = dataset.request.model.field()?;
    let locus: Vec<[f64; 2]> =
        (0..256).filter_map(|k| field.vortex(k as f64 * std::f64::consts::TAU / 256.0)).collect();

    let finite = |p: &&[f64; 2]| p[0].is_finite() && p[1].is_finite();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points.chain(locus.iter()).filter(finite) {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let pad = 0.02 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let (x0, x1, y0, y1) = (lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad);
    let scale = style.width / (x1 - x0);
    let height = (y1 - y0) * scale;
    let frame = Frame { x0, y1, scale, margin: style.margin };
    let (total_w, total_h) = (style.width + 2.0 * style.margin, height + 2.0 * style.margin + 20.0);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.2} {total_h:.2}">"#
    )?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        svg,
        r##"<rect x="{m:.2}" y="{m:.2}" width="{w:.2}" height="{height:.2}" fill="none" stroke="#444" stroke-width="0.8"/>"##,
        m = style.margin,
        w = style.width
    )?;
    // Coordinate axes through the origin, when it is in view.
    if x0 < 0.0 && x1 > 0.0 {
        let [top, bottom] = [frame.map([0.0, y1]), frame.map([0.0, y0])];
        writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ccc" stroke-width="0.6"/>"##,
            top[0], top[1], bottom[0], bottom[1]
        )?;
    }
    if y0 < 0.0 && y1 > 0.0 {
        let [left, right] = [frame.map([x0, 0.0]), frame.map([x1, 0.0])];
        writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ccc" stroke-width="0.6"/>"##,
            left[0], left[1], right[0], right[1]
        )?;
    }
    let font = r#"font-family="sans-serif" font-size="11""#;
    let bottom = style.margin + height + 14.0;
    writeln!(svg, r#"<text x="{:.2}" y="{bottom:.2}" {font}>x = {x0:.3}</text>"#, style.margin)?;
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{bottom:.2}" {font} text-anchor="end">x = {x1:.3}</text>"#,
        style.margin + style.width
    )?;
    writeln!(svg, r#"<text x="4" y="{:.2}" {font}>y = {y1:.3}</text>"#, style.margin - 6.0)?;
    writeln!(svg, r#"<text x="4" y="{:.2}" {font}>y = {y0:.3}</text>"#, style.margin + height + 28.0)?;

    // One path per colour; each point is a zero-length round-capped segment.
    let mut groups: Vec<(Option<Label>, String, usize)> = Vec::new();
    let mut seen: HashSet<(Option<Label>, i64, i64)> = HashSet::new();
    for record in &dataset.orbits {
        let label = record.label();
        let index = match groups.iter().position(|g| g.0 == label) {
            Some(i) => i,
            None => {
                groups.push((label, String::new(), 0));
                groups.len() - 1
            }
        };
        for p in record.orbit.points.iter().filter(finite) {
            let q = frame.map(*p);
            let key = (label, (q[0] / style.resolution).round() as i64, (q[1] / style.resolution).round() as i64);
            if seen.insert(key) {
                write!(groups[index].1, "M{:.2} {:.2}h0", q[0], q[1])?;
            }
        }
        groups[index].2 += 1;
    }
    groups.sort_by_key(|g| g.0.map_or(usize::MAX, |l| Label::ALL.iter().position(|m| *m == l).unwrap_or(0)));
    for (label, d, _) in &groups {
        let stroke = label.map_or(UNLABELED, color);
        writeln!(
            svg,
            r#"<path d="{d}" stroke="{stroke}" stroke-width="{:.2}" stroke-linecap="round" fill="none"/>"#,
            style.point_size
        )?;
    }

    if !locus.is_empty() {
        let pts: Vec<String> = locus
            .iter()
            .map(|p| {
                let q = frame.map(*p);
                format!("{:.2},{:.2}", q[0], q[1])
            })
            .collect();
        writeln!(
            svg,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.2" stroke-dasharray="4 3"/>"#,
            pts.join(" ")
        )?;
    }

    // Legend with orbit counts.
    let mut x = style.margin;
    for (label, _, orbits) in &groups {
        let name = label.map_or("unlabeled", Label::as_str);
        let fill = label.map_or(UNLABELED, color);
        writeln!(svg, r#"<rect x="{x:.2}" y="{:.2}" width="9" height="9" fill="{fill}"/>"#, style.margin - 26.0)?;
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" {font}>{name} ({orbits})</text>"#, x + 12.0, style.margin - 18.0)?;
        x += 24.0 + 7.0 * (name.len() as f64 + 5.0);
    }
    writeln!(svg, "</svg>")?;
    fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bohm_vortex::sections::{IcSet, SectionRequest};
    use bohm_vortex::Model;

    #[test]
    fn empty_dataset_writes_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.svg");
        let dataset = SectionDataset {
            request: SectionRequest::new(Model::SemiAxes { a: 0.4, b: 0.4 }, IcSet::List { points: vec![] }),
            version: String::new(),
            centers: bohm_vortex::sections::MainCenters { vortex: None, elliptic: None },
            orbits: vec![],
        };
        assert!(emit_svg_scatter(&dataset, &path, &PlotStyle::default()).is_err());
        assert!(!path.exists());
    }
}
