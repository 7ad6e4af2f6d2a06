//! SVG 1.1 plots of a sampled field, its level components and data points.

use std::fmt::Write;

use levelset_core::levelsets::{Classification, LevelComponent, ScalarField};

const SIZE: f64 = 600.0;
const BOUNDED: &str = "#d62728";
const TOUCHING: &str = "#1f77b4";
const ABOVE: &str = "#fde3c8";
const BELOW: &str = "#e3ebf4";

pub struct Plot<'a> {
    pub field: &'a ScalarField,
    pub level: f64,
    pub components: &'a [LevelComponent],
    pub points: Option<(&'a [Vec<f64>], &'a [u8])>,
    /// Written into the header; pass 0 for reproducible output.
    pub timestamp: u64,
}

impl Plot<'_> {
    /// Cells whose center mean is at or above the level are shaded as one
    /// region, the rest as the other; each row of cells is drawn as runs.
    pub fn render(&self) -> String {
        let w = self.field.window();
        let (x0, y1) = (w.lo()[0], w.hi()[1]);
        let sx = SIZE / w.extent(0);
        let sy = SIZE / w.extent(1);
        let px = |x: f64, y: f64| ((x - x0) * sx, (y1 - y) * sy);

        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<!-- level {} ; pixel = ((x - {x0}) * {sx}, ({y1} - y) * {sy}) ; window x [{}, {}] y [{}, {}] ; generated {} -->",
            self.level,
            w.lo()[0],
            w.hi()[0],
            w.lo()[1],
            w.hi()[1],
            self.timestamp
        );
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
        );

        let (nx, ny) = self.field.resolution();
        let (cw, ch) = (SIZE / (nx - 1) as f64, SIZE / (ny - 1) as f64);
        s.push_str("<g shape-rendering=\"crispEdges\" stroke=\"none\">\n");
        for j in 0..ny - 1 {
            let mut i = 0;
            while i < nx - 1 {
                let above = self.cell_above(i, j);
                let start = i;
                while i < nx - 1 && self.cell_above(i, j) == above {
                    i += 1;
                }
                let _ = writeln!(
                    s,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                    start as f64 * cw,
                    SIZE - (j + 1) as f64 * ch,
                    (i - start) as f64 * cw,
                    ch,
                    if above { ABOVE } else { BELOW }
                );
            }
        }
        s.push_str("</g>\n");

        if let Some((points, labels)) = self.points {
            s.push_str("<g stroke=\"none\">\n");
            for (p, l) in points.iter().zip(labels) {
                let (x, y) = px(p[0], p[1]);
                let fill = if *l == 1 { "#2ca02c" } else { "#333333" };
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"1.5\" fill=\"{fill}\"/>");
            }
            s.push_str("</g>\n");
        }

        s.push_str("<g fill=\"none\" stroke-width=\"2\">\n");
        for c in self.components {
            let color = match c.classification {
                Classification::Bounded => BOUNDED,
                Classification::BoundaryTouching => TOUCHING,
            };
            for chain in &c.polylines {
                let tag = if chain.closed { "polygon" } else { "polyline" };
                let _ = write!(s, "<{tag} stroke=\"{color}\" points=\"");
                for (k, p) in chain.points.iter().enumerate() {
                    let (x, y) = px(p[0], p[1]);
                    let sep = if k == 0 { "" } else { " " };
                    let _ = write!(s, "{sep}{x:.2},{y:.2}");
                }
                s.push_str("\"/>\n");
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }

    fn cell_above(&self, i: usize, j: usize) -> bool {
        let f = self.field;
        let mean = (f.value(i, j) + f.value(i + 1, j) + f.value(i, j + 1) + f.value(i + 1, j + 1)) / 4.0;
        mean >= self.level
    }
}
