//! Minimal SVG rendering of sweep tables. Plots are a convenience; the CSVs
//! are the normative output.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: &[&str] = &["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>
<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{x_label}</text>
<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>
<text x="{MARGIN}" y="{}" text-anchor="middle">{:.3}</text>
<text x="{}" y="{}" text-anchor="middle">{:.3}</text>
<text x="{}" y="{}" text-anchor="end">{:.3}</text>
<text x="{}" y="{MARGIN}" text-anchor="end">{:.3}</text>
"#,
        W / 2.0,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN,
        W / 2.0,
        H - 15.0,
        H / 2.0,
        H / 2.0,
        H - MARGIN + 15.0,
        x.0,
        W - MARGIN,
        H - MARGIN + 15.0,
        x.1,
        MARGIN - 5.0,
        H - MARGIN,
        y.0,
        MARGIN - 5.0,
        y.1,
    );
}

fn sx(v: f64, x: (f64, f64)) -> f64 {
    MARGIN + (v - x.0) / (x.1 - x.0) * (W - 2.0 * MARGIN)
}

fn sy(v: f64, y: (f64, f64)) -> f64 {
    H - MARGIN - (v - y.0) / (y.1 - y.0) * (H - 2.0 * MARGIN)
}

/// One polyline per labelled series.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let x = bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let y = bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let mut out = String::new();
    header(&mut out, title, x_label, y_label, x, y);
    for (k, (label, pts)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(a, b)| format!("{:.2},{:.2}", sx(a, x), sy(b, y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{colour}">{label}</text>"#,
            W - MARGIN + 5.0 - 120.0,
            MARGIN + 15.0 * (k as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Grey-scale map of `z` over a rectangular grid given as `(x, y, z)` rows.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64, f64)]) -> String {
    let x = bounds(points.iter().map(|p| p.0));
    let y = bounds(points.iter().map(|p| p.1));
    let z = bounds(points.iter().map(|p| p.2));
    let nx = {
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.len().max(2)
    };
    let ny = (points.len() / nx).max(2);
    let cw = (W - 2.0 * MARGIN) / (nx - 1) as f64;
    let ch = (H - 2.0 * MARGIN) / (ny - 1) as f64;
    let mut out = String::new();
    header(&mut out, title, x_label, y_label, x, y);
    for &(a, b, c) in points {
        let shade = (255.0 * (1.0 - (c - z.0) / (z.1 - z.0))).round() as u8;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},{shade})"/>"#,
            sx(a, x) - cw / 2.0,
            sy(b, y) - ch / 2.0,
            cw,
            ch
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">z: {:.3} (white) to {:.3} (black)</text>"#,
        W - MARGIN,
        MARGIN - 8.0,
        z.0,
        z.1
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_documents() {
        let s = line_plot("t", "x", "y", &[("a".into(), vec![(0.0, 0.0), (1.0, 1.0)])]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 1);
        let h = heatmap("t", "x", "y", &[(0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (1.0, 0.0, 0.5), (1.0, 1.0, 1.0)]);
        assert_eq!(h.matches("<rect").count(), 2 + 4);
    }
}
