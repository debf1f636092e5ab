//! Static SVG rendering of spectrum clouds.

use std::fmt::Write;

use num_complex::Complex64;
use pcsio_core::calculus::{SpectrumPoint, SweepConfig};
use pcsio_core::geometry::{spiral_sample, SpiralSet};
use pcsio_core::spaces::Space;
use pcsio_core::symbols::PCSymbol;

const SIZE: f64 = 640.0;
const PAD: f64 = 32.0;
const SPIRAL_SAMPLES: usize = 800;

struct Frame {
    lo: Complex64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Complex64]) -> Frame {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        if !lo.re.is_finite() {
            lo = Complex64::new(-1.0, -1.0);
            hi = Complex64::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-6);
        let centre = (lo + hi) * 0.5;
        Frame { lo: centre - Complex64::new(span, span) * 0.5, scale: (SIZE - 2.0 * PAD) / span }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        (PAD + (z.re - self.lo.re) * self.scale, SIZE - PAD - (z.im - self.lo.im) * self.scale)
    }
}

fn polyline(out: &mut String, frame: &Frame, pts: &[Complex64], class: &str) {
    if pts.len() < 2 {
        return;
    }
    let _ = write!(out, r#"<polyline class="{class}" points=""#);
    for (i, z) in pts.iter().enumerate() {
        let (x, y) = frame.map(*z);
        let sep = if i == 0 { "" } else { " " };
        let _ = write!(out, "{sep}{x:.3},{y:.3}");
    }
    out.push_str("\"/>\n");
}

/// Arc range of `a`, affine spirals at its jumps, and the spectrum cloud.
pub fn spectrum_svg(cloud: &[SpectrumPoint], a: Option<&PCSymbol>, space: &Space, sweep: &SweepConfig) -> String {
    let mut arcs: Vec<Vec<Complex64>> = Vec::new();
    let mut spirals: Vec<Vec<Complex64>> = Vec::new();
    if let Some(a) = a {
        for arc in a.arcs() {
            arcs.push(arc.iter().map(|k| k.value[(0, 0)]).collect());
        }
        for j in a.jumps() {
            let (l, r) = (j.left[(0, 0)], j.right[(0, 0)]);
            let Ok(sp) = SpiralSet::new(l, r, space.delta_at(j.t), space.r_at(j.t)) else { continue };
            if let Ok(s) = spiral_sample(&sp, -sweep.s_range, sweep.s_range, SPIRAL_SAMPLES) {
                spirals.push(s.points.iter().map(|p| p.z).collect());
            }
        }
    }
    let mut all: Vec<Complex64> = cloud.iter().map(|p| p.lambda).collect();
    all.extend(arcs.iter().flatten());
    all.extend(spirals.iter().flatten());
    let frame = Frame::fit(&all);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    out.push_str("<style>.axis{stroke:#bbb;stroke-width:1}.range{fill:none;stroke:#1f77b4;stroke-width:1.5}.spiral{fill:none;stroke:#d62728;stroke-width:1}.cloud{fill:#222}</style>\n");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let (x0, y0) = frame.map(Complex64::new(0.0, 0.0));
    if (0.0..=SIZE).contains(&x0) {
        let _ = writeln!(out, r#"<line class="axis" x1="{x0:.3}" y1="0" x2="{x0:.3}" y2="{SIZE}"/>"#);
    }
    if (0.0..=SIZE).contains(&y0) {
        let _ = writeln!(out, r#"<line class="axis" x1="0" y1="{y0:.3}" x2="{SIZE}" y2="{y0:.3}"/>"#);
    }
    for arc in &arcs {
        polyline(&mut out, &frame, arc, "range");
    }
    for sp in &spirals {
        polyline(&mut out, &frame, sp, "spiral");
    }
    for p in cloud {
        let (x, y) = frame.map(p.lambda);
        let _ = writeln!(out, r#"<circle class="cloud" cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
    }
    out.push_str("</svg>\n");
    out
}
