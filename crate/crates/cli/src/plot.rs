//! Self-contained SVG of displacement against step on a log scale.

use std::fmt::Write;

use asreg_core::rates::RateIndex;

pub struct Marker {
    pub eps: f64,
    pub sigma: RateIndex,
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 56.0;

pub fn render_svg(rows: &[(u64, f64)], markers: &[Marker]) -> String {
    let n_max = rows.iter().map(|r| r.0).max().unwrap_or(0).max(1);
    let positive = rows.iter().map(|r| r.1).filter(|d| *d > 0.0);
    let lo = positive.clone().fold(f64::INFINITY, f64::min);
    let hi = positive.fold(0.0, f64::max);
    let (lo, hi) = if hi > 0.0 { (lo, hi) } else { (1.0, 1.0) };
    // zeros cannot sit on a log axis; draw them one decade below the smallest value
    let floor = lo / 10.0;
    let has_zero = rows.iter().any(|r| r.1 == 0.0);
    let y_lo = if has_zero { floor } else { lo }.log10().floor();
    let mut y_hi = hi.log10().ceil();
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }

    let px = |n: f64| LEFT + (W - LEFT - RIGHT) * n / n_max as f64;
    let py = |d: f64| {
        let l = d.max(floor).log10();
        TOP + (H - TOP - BOTTOM) * (y_hi - l) / (y_hi - y_lo)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#);

    let mut e = y_lo;
    while e <= y_hi {
        let y = TOP + (H - TOP - BOTTOM) * (y_hi - e) / (y_hi - y_lo);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#, x0 - 6.0, y + 4.0, e as i64);
        e += 1.0;
    }
    for k in 0..=5 {
        let n = n_max as f64 * k as f64 / 5.0;
        let x = px(n);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 18.0, n.round() as u64);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#, (x0 + x1) / 2.0, H - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">displacement</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let points: Vec<String> = rows.iter().map(|(n, d)| format!("{:.2},{:.2}", px(*n as f64), py(*d))).collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##,
        points.join(" ")
    );

    let mut note_y = TOP + 14.0;
    for m in markers {
        match m.sigma.value().to_u64().filter(|v| *v <= n_max) {
            Some(v) => {
                let x = px(v as f64);
                let _ = writeln!(
                    s,
                    r##"<line class="sigma-marker" x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#b33" stroke-dasharray="4 3"/>"##
                );
                let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" fill="#b33">Σ({}) = {v}</text>"##, x + 4.0, note_y, m.eps);
            }
            None => {
                let _ = writeln!(
                    s,
                    r##"<text class="sigma-note" x="{:.2}" y="{note_y:.2}" fill="#b33">Σ({}) = {} exceeds the plotted range 0..{n_max}</text>"##,
                    x1 - 4.0,
                    m.eps,
                    m.sigma.sci_preview()
                );
            }
        }
        note_y += 16.0;
    }
    if has_zero {
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" fill="#666">zero displacements drawn at 1e{}</text>"##,
            x0 + 6.0,
            y1 - 6.0,
            y_lo as i64
        );
    }
    s.push_str("</svg>\n");
    s
}
