//! Text renderings of `(θ, R)` samples.

use std::f64::consts::PI;
use std::fmt::Write;

use magic_rom::robustness::h_robustness_reference;

pub fn csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("theta,R\n");
    for (t, r) in points {
        writeln!(out, "{t:.10},{r:.10}").expect("writing to a String");
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 30.0;

/// Upper half-plane polar plot with reference arcs at `R(|H⟩^⊗t)`.
pub fn svg(m: usize, points: &[(f64, f64)]) -> String {
    let rings: Vec<(usize, f64)> = (0..=m + 1).filter_map(|t| h_robustness_reference(t).map(|r| (t, r))).collect();
    let r_max = points.iter().map(|p| p.1).chain(rings.iter().map(|r| r.1)).fold(1.0, f64::max);
    let scale = (WIDTH / 2.0 - MARGIN).min(HEIGHT - 2.0 * MARGIN) / r_max;
    let (cx, cy) = (WIDTH / 2.0, HEIGHT - MARGIN);
    let at = |theta: f64, r: f64| (cx + scale * r * theta.cos(), cy - scale * r * theta.sin());

    let mut s = String::new();
    let w = &mut s;
    writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="gray" stroke-width="0.5"/>"#,
        cx - scale * r_max,
        cx + scale * r_max
    )
    .unwrap();
    for (t, r) in &rings {
        let rad = scale * r;
        writeln!(
            w,
            r#"<path d="M {:.2} {cy:.2} A {rad:.2} {rad:.2} 0 0 1 {:.2} {cy:.2}" fill="none" stroke="gray" stroke-dasharray="4 3" stroke-width="0.8"/>"#,
            cx - rad,
            cx + rad
        )
        .unwrap();
        writeln!(w, r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="gray">t={t}</text>"#, cx + rad + 2.0, cy + 12.0).unwrap();
    }
    let path: Vec<String> = points
        .iter()
        .map(|&(t, r)| {
            let (x, y) = at(t, r);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(w, r#"<polyline points="{}" fill="none" stroke="navy" stroke-width="1.6"/>"#, path.join(" ")).unwrap();
    // Diagonal Clifford hierarchy gates in the family: T, CS, CCZ.
    let (label, theta) = match m {
        1 => ("T", PI / 4.0),
        2 => ("CS", PI / 2.0),
        _ => ("CCZ", PI),
    };
    if let Some(&(_, r)) = points.iter().min_by(|a, b| (a.0 - theta).abs().total_cmp(&(b.0 - theta).abs())) {
        let (x, y) = at(theta, r);
        writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="crimson"/>"#).unwrap();
        writeln!(w, r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="crimson">{label}</text>"#, x + 6.0, y - 6.0).unwrap();
    }
    writeln!(w, r#"<text x="{MARGIN}" y="{:.2}" font-size="13">R(θ), m = {m}</text>"#, MARGIN - 10.0).unwrap();
    w.push_str("</svg>\n");
    s
}
