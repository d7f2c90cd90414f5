//! CSV tables and SVG renderings. Everything is built in memory and written once.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use umbilic_core::scan::{ContourSet, Grid};

use crate::CliError;

/// A CSV document: `#` comment lines, a header row, then data rows.
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(comment: impl Into<String>, header: &[&str]) -> Self {
        Table { comments: vec![comment.into()], header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        for c in &self.comments {
            writeln!(buf, "# {c}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    /// Writes to `path`, or to standard output when `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render()?;
        match path {
            Some(p) => fs::write(p, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

/// Shortest representation that round-trips; scientific notation outside
/// `[1e-4, 1e16)` so tiny residuals stay readable.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

const SVG_SIZE: f64 = 512.0;

/// Diverging palette: blue below zero, white at zero, red above.
fn diverging(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    if t >= 0.0 {
        (255, fade(t), fade(t))
    } else {
        (fade(t), fade(t), 255)
    }
}

/// Heatmap of the grid samples, scaled symmetrically by the largest magnitude
/// so the colour at zero is fixed, with optional contour polylines on top.
pub fn grid_svg(grid: &Grid, contours: Option<&ContourSet>) -> String {
    let (lo, hi) = grid.min_max();
    let scale = lo.abs().max(hi.abs());
    let (cw, ch) = (SVG_SIZE / grid.nx as f64, SVG_SIZE / grid.ny as f64);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    );
    let _ = writeln!(s, "<desc>min {lo} max {hi}</desc>");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = grid.value(i, j);
            let (r, g, b) = diverging(if scale > 0.0 { v / scale } else { 0.0 });
            // SVG y grows downward; row 0 is the bottom of the region
            let y = SVG_SIZE - (j + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                i as f64 * cw,
                y,
                cw + 0.01,
                ch + 0.01
            );
        }
    }
    if let Some(c) = contours {
        let reg = grid.region;
        let to_px = |x: f64, y: f64| {
            let px = (x - reg.x0) / (reg.x1 - reg.x0) * (SVG_SIZE - cw) + 0.5 * cw;
            let py = SVG_SIZE - ((y - reg.y0) / (reg.y1 - reg.y0) * (SVG_SIZE - ch) + 0.5 * ch);
            (px, py)
        };
        for line in &c.lines {
            let mut d = String::new();
            for (k, p) in line.points.iter().enumerate() {
                let (x, y) = to_px(p.x, p.y);
                let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
            }
            if line.closed {
                d.push('Z');
            }
            let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, d.trim_end());
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use umbilic_core::scan::{contours, Region};

    #[test]
    fn table_has_comment_then_header() {
        let mut t = Table::new("quantity: test; units: none", &["a", "b"]);
        t.row(vec![num(0.1), num(1e-300)]);
        let text = String::from_utf8(t.render().unwrap()).unwrap();
        assert_eq!(text, "# quantity: test; units: none\na,b\n0.1,1e-300\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, -0.0, 1.0, 0.1, 1e-4, 9.99e-5, -4.1693642765748594e-5, 1e16, 123.456, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(num(2.5e-7), "2.5e-7");
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn palette_is_white_at_zero() {
        assert_eq!(diverging(0.0), (255, 255, 255));
        assert_eq!(diverging(1.0), (255, 0, 0));
        assert_eq!(diverging(-1.0), (0, 0, 255));
    }

    #[test]
    fn svg_contains_paths() {
        let g = Grid::from_fn(Region::square(1.0).unwrap(), 9, 9, |p| p.x).unwrap();
        let c = contours(&g, 0.0);
        let svg = grid_svg(&g, Some(&c));
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<rect").count(), 81);
    }
}
