//! Minimal self-contained SVG writer for the (λ1, λ2) plane.

use std::fmt::Write;

const MARGIN: f64 = 48.0;

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Data window mapped onto the drawing area.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x[0]) / (self.x[1] - self.x[0]) * (self.width - 2.0 * MARGIN)
    }

    pub fn py(&self, y: f64) -> f64 {
        self.height - MARGIN - (y - self.y[0]) / (self.y[1] - self.y[0]) * (self.height - 2.0 * MARGIN)
    }
}

pub struct Plot {
    pub frame: Frame,
    clipped: String,
    overlay: String,
}

impl Plot {
    pub fn new(frame: Frame) -> Plot {
        Plot { frame, clipped: String::new(), overlay: String::new() }
    }

    /// Filled data-space rectangle.
    pub fn cell(&mut self, x: [f64; 2], y: [f64; 2], fill: &str) {
        let f = &self.frame;
        let (a, b) = (f.px(x[0]), f.px(x[1]));
        let (c, d) = (f.py(y[1]), f.py(y[0]));
        let _ = writeln!(self.clipped, r#"<rect x="{a:.2}" y="{c:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#, b - a, d - c);
    }

    pub fn polyline(&mut self, pts: &[[f64; 2]], stroke: &str, width: f64, dash: Option<&str>) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", self.frame.px(p[0]), self.frame.py(p[1]))).collect();
        let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            self.clipped,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            coords.join(" ")
        );
    }

    pub fn marker(&mut self, p: [f64; 2], fill: &str, label: &str) {
        let (x, y) = (self.frame.px(p[0]), self.frame.py(p[1]));
        let _ = writeln!(self.clipped, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}" stroke="black" stroke-width="0.8"/>"#);
        let _ = writeln!(self.clipped, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, x + 6.0, y - 6.0, escape(label));
    }

    /// Text placed in pixel coordinates, outside the clip region.
    pub fn label(&mut self, x: f64, y: f64, anchor: &str, text: &str) {
        let _ = writeln!(self.overlay, r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}">{}</text>"#, escape(text));
    }

    pub fn finish(self, title: &str) -> String {
        let f = self.frame;
        let (l, r, t, b) = (MARGIN, f.width - MARGIN, MARGIN, f.height - MARGIN);
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            f.width, f.height, f.width, f.height
        );
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
        let _ = writeln!(s, r#"<defs><clipPath id="plot"><rect x="{l}" y="{t}" width="{}" height="{}"/></clipPath></defs>"#, r - l, b - t);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        s.push_str(&self.clipped);
        // axes through the origin when visible
        if f.x[0] < 0.0 && 0.0 < f.x[1] {
            let x = f.px(0.0);
            let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{t}" x2="{x:.2}" y2="{b}" stroke="#555" stroke-width="0.8"/>"##);
        }
        if f.y[0] < 0.0 && 0.0 < f.y[1] {
            let y = f.py(0.0);
            let _ = writeln!(s, r##"<line x1="{l}" y1="{y:.2}" x2="{r}" y2="{y:.2}" stroke="#555" stroke-width="0.8"/>"##);
        }
        s.push_str("</g>\n");
        let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        let tick = |v: f64| format!("{v:.3}");
        let _ = writeln!(s, r#"<text x="{l}" y="{}" font-size="11" text-anchor="middle">{}</text>"#, b + 16.0, tick(f.x[0]));
        let _ = writeln!(s, r#"<text x="{r}" y="{}" font-size="11" text-anchor="middle">{}</text>"#, b + 16.0, tick(f.x[1]));
        let _ = writeln!(s, r#"<text x="{}" y="{b}" font-size="11" text-anchor="end">{}</text>"#, l - 4.0, tick(f.y[0]));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#, l - 4.0, t + 4.0, tick(f.y[1]));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">λ1</text>"#, 0.5 * (l + r), f.height - 10.0);
        let _ = writeln!(s, r#"<text x="14" y="{}" font-size="13" text-anchor="middle">λ2</text>"#, 0.5 * (t + b));
        s.push_str(&self.overlay);
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_maps_corners() {
        let f = Frame { x: [-1.0, 1.0], y: [0.0, 10.0], width: 200.0, height: 100.0 };
        assert_eq!(f.px(-1.0), MARGIN);
        assert_eq!(f.px(1.0), 200.0 - MARGIN);
        assert_eq!(f.py(0.0), 100.0 - MARGIN);
        assert_eq!(f.py(10.0), MARGIN);
    }

    #[test]
    fn output_is_self_contained() {
        let mut p = Plot::new(Frame { x: [-1.0, 1.0], y: [-1.0, 1.0], width: 300.0, height: 200.0 });
        p.cell([-1.0, 0.0], [-1.0, 0.0], "#abc");
        p.polyline(&[[0.0, 0.0], [0.5, -0.5]], "black", 1.5, None);
        p.marker([0.2, 0.2], "red", "a < b & c");
        let s = p.finish("t");
        assert!(s.contains("a &lt; b &amp; c"));
        assert!(!s.contains("href"));
        assert_eq!(s.matches("<svg").count(), 1);
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
