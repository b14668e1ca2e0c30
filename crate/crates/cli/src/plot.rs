//! Decay plot as a plain SVG document.
//!
//! Two panels share the vertical axis `log ‖f̂(j)‖_HS`: against
//! `λ^{1/ν}` (straight for exponential decay) and against `log λ`
//! (straight for polynomial decay). Levels with zero norm are skipped.

use std::fmt::Write as _;

use eigenreg::transform::SpectralVector;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

struct Panel<'a> {
    title: &'a str,
    xlabel: &'a str,
    points: Vec<(f64, f64)>,
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn draw(svg: &mut String, p: &Panel, left: f64, y_range: (f64, f64)) {
    let top = MARGIN / 2.0;
    let (x0, x1) = range(p.points.iter().map(|q| q.0));
    let (y0, y1) = y_range;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * PANEL_W;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * PANEL_H;
    let _ = writeln!(
        svg,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        left + PANEL_W / 2.0,
        top - 8.0,
        p.title
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
        left + PANEL_W / 2.0,
        top + PANEL_H + 34.0,
        p.xlabel
    );
    for (v, anchor, x) in [(x0, "start", left), (x1, "end", left + PANEL_W)] {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="{anchor}" font-size="10">{v:.3}</text>"#,
            top + PANEL_H + 14.0
        );
    }
    for (v, y) in [(y1, top + 10.0), (y0, top + PANEL_H)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="10">{v:.1}</text>"#,
            left - 4.0
        );
    }
    let mut path = String::new();
    for (i, &(x, y)) in p.points.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(x), sy(y));
    }
    let _ = writeln!(svg, r##"<path d="{path}" fill="none" stroke="#1f5fa8" stroke-width="1.2"/>"##);
}

/// Two-panel decay plot of the level norms of `v`.
pub fn decay_svg(v: &SpectralVector) -> String {
    let nu = v.op().nu() as f64;
    let logs = v.log_hs_norms();
    let data: Vec<(f64, f64)> = v
        .levels()
        .iter()
        .zip(&logs)
        .filter(|(_, l)| l.is_finite())
        .map(|(lv, &l)| (lv.lambda, l))
        .collect();
    let against_root = Panel {
        title: "log |f(j)| against lambda^(1/nu)",
        xlabel: "lambda^(1/nu)",
        points: data.iter().filter(|(lam, _)| *lam >= 0.0).map(|&(lam, l)| (lam.powf(1.0 / nu), l)).collect(),
    };
    let against_log = Panel {
        title: "log |f(j)| against log lambda",
        xlabel: "log lambda",
        points: data.iter().filter(|(lam, _)| *lam > 0.0).map(|&(lam, l)| (lam.ln(), l)).collect(),
    };
    let y_range = range(data.iter().map(|d| d.1));
    let width = 2.0 * PANEL_W + 3.0 * MARGIN;
    let height = PANEL_H + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    draw(&mut svg, &against_root, MARGIN, y_range);
    draw(&mut svg, &against_log, 2.0 * MARGIN + PANEL_W, y_range);
    svg.push_str("</svg>\n");
    svg
}
