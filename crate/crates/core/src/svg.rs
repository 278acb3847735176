//! Deterministic SVG 1.1 plots: scatter plots of point sets and marginal
//! histogram bar charts. Coordinates are printed with fixed precision and no
//! timestamps are embedded, so equal inputs give byte-identical files.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::metrics::{marginal_histogram, Histogram};
use crate::mixture::DiracMixture;

const ORIGINAL_COLOR: &str = "#4c72b0";
const REDUCED_COLORS: [&str; 4] = ["#c44e52", "#55a868", "#8172b2", "#ccb974"];
const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

fn color(i: usize) -> &'static str {
    REDUCED_COLORS[i % REDUCED_COLORS.len()]
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">
<rect width="100%" height="100%" fill="white"/>"#
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn legend(out: &mut String, entries: &[(String, &str)], x: f64, y: f64) {
    for (i, (label, fill)) in entries.iter().enumerate() {
        let ty = y + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{fill}"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            ty - 9.0,
            x + 14.0,
            ty,
            escape(label)
        );
    }
}

/// Scatter plot of the first two axes with equal scaling on both. One-
/// dimensional sets are drawn on a horizontal line. The original is drawn
/// first in one color, each reduction on top in its own color.
pub fn scatter_svg(original: &DiracMixture, reduced: &[(String, DiracMixture)]) -> Result<String> {
    let dim = original.dim();
    if let Some((_, r)) = reduced.iter().find(|(_, r)| r.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: r.dim(),
        });
    }
    let coords = |p: &[f64]| (p[0], if dim > 1 { p[1] } else { 0.0 });
    let all = std::iter::once(original).chain(reduced.iter().map(|(_, r)| r));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for m in all {
        for p in m.points() {
            let (x, y) = coords(p);
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    // Equal scale on both axes: fit the larger extent, center the other.
    let span = (x1 - x0).max(y1 - y0).max(1e-12) * 1.05;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let px = |x: f64| SIZE / 2.0 + (x - cx) * scale;
    let py = |y: f64| SIZE / 2.0 - (y - cy) * scale;

    let mut out = String::new();
    header(&mut out, SIZE, SIZE);
    let _ = writeln!(
        out,
        r##"<rect x="{m:.0}" y="{m:.0}" width="{w:.0}" height="{w:.0}" fill="none" stroke="#999999"/>"##,
        m = MARGIN,
        w = SIZE - 2.0 * MARGIN
    );
    let mut draw = |m: &DiracMixture, fill: &str, r: f64, opacity: f64| {
        let _ = writeln!(out, r#"<g fill="{fill}" fill-opacity="{opacity}">"#);
        for p in m.points() {
            let (x, y) = coords(p);
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}"/>"#, px(x), py(y));
        }
        out.push_str("</g>\n");
    };
    draw(original, ORIGINAL_COLOR, 1.5, 0.5);
    for (i, (_, r)) in reduced.iter().enumerate() {
        draw(r, color(i), 4.0, 0.9);
    }
    let mut entries = vec![(format!("original ({})", original.len()), ORIGINAL_COLOR)];
    for (i, (name, r)) in reduced.iter().enumerate() {
        entries.push((format!("{name} ({})", r.len()), color(i)));
    }
    legend(&mut out, &entries, MARGIN + 6.0, MARGIN + 16.0);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Marginal histograms, one panel per axis. The original is drawn as filled
/// bars, each reduction as an outlined step curve.
pub fn histogram_svg(
    original: &DiracMixture,
    reduced: &[(String, DiracMixture)],
    bins: usize,
    range: (f64, f64),
) -> Result<String> {
    let dim = original.dim();
    let mut panels: Vec<(Histogram, Vec<Option<Histogram>>)> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let base = marginal_histogram(original, axis, bins, range)?;
        let mut others = Vec::with_capacity(reduced.len());
        for (_, r) in reduced {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
            others.push(match marginal_histogram(r, axis, bins, range) {
                Ok(h) => Some(h),
                Err(Error::EmptyHistogram) => None,
                Err(e) => return Err(e),
            });
        }
        panels.push((base, others));
    }

    let panel_h = 220.0;
    let height = MARGIN + panel_h * dim as f64 + MARGIN / 2.0;
    let plot_w = SIZE - 2.0 * MARGIN;
    let mut out = String::new();
    header(&mut out, SIZE, height);
    for (axis, (base, others)) in panels.iter().enumerate() {
        let top = MARGIN + panel_h * axis as f64;
        let bottom = top + panel_h - 40.0;
        let peak = std::iter::once(base)
            .chain(others.iter().flatten())
            .flat_map(|h| h.masses.iter().copied())
            .fold(0.0, f64::max)
            .max(1e-12);
        let px = |v: f64| MARGIN + (v - range.0) / (range.1 - range.0) * plot_w;
        let py = |mass: f64| bottom - mass / peak * (bottom - top);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="#333333"/>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">axis {}</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
            px(range.0),
            px(range.1),
            MARGIN,
            top - 6.0,
            axis + 1,
            px(range.0),
            bottom + 14.0,
            range.0,
            px(range.1),
            bottom + 14.0,
            range.1
        );
        let _ = writeln!(out, r#"<g fill="{ORIGINAL_COLOR}" fill-opacity="0.5">"#);
        for (i, &m) in base.masses.iter().enumerate() {
            let (l, r) = (px(base.edges[i]), px(base.edges[i + 1]));
            let _ = writeln!(
                out,
                r#"<rect x="{l:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                py(m),
                r - l,
                bottom - py(m)
            );
        }
        out.push_str("</g>\n");
        for (k, h) in others.iter().enumerate() {
            let Some(h) = h else { continue };
            let mut d = format!("M {:.2} {bottom:.2}", px(h.edges[0]));
            for (i, &m) in h.masses.iter().enumerate() {
                let _ = write!(
                    d,
                    " L {:.2} {:.2} L {:.2} {:.2}",
                    px(h.edges[i]),
                    py(m),
                    px(h.edges[i + 1]),
                    py(m)
                );
            }
            let _ = write!(d, " L {:.2} {bottom:.2}", px(h.edges[h.edges.len() - 1]));
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="2"/>"#,
                color(k)
            );
        }
    }
    let mut entries = vec![("original".to_string(), ORIGINAL_COLOR)];
    for (i, (name, _)) in reduced.iter().enumerate() {
        entries.push((name.clone(), color(i)));
    }
    legend(&mut out, &entries, SIZE - MARGIN - 120.0, MARGIN + 6.0);
    out.push_str("</svg>\n");
    Ok(out)
}
