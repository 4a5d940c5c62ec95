//! Self-contained SVG scatter of a feature cloud with its expansion envelope.

use std::fmt::Write as _;

use crate::expansion::{ExpansionEstimate, FeatureCloud};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 96.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 56.0;

/// Informativeness ramp stops (low → high): dark blue, teal, yellow.
const RAMP: [(f64, [u8; 3]); 3] = [(0.0, [45, 32, 120]), (0.5, [33, 145, 140]), (1.0, [253, 231, 37])];

fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (RAMP[0], RAMP[RAMP.len() - 1]);
    for w in RAMP.windows(2) {
        if t >= w[0].0 && t <= w[1].0 {
            (lo, hi) = (w[0], w[1]);
            break;
        }
    }
    let u = if hi.0 > lo.0 { (t - lo.0) / (hi.0 - lo.0) } else { 0.0 };
    let c: Vec<u8> = (0..3)
        .map(|i| (f64::from(lo.1[i]) + u * (f64::from(hi.1[i]) - f64::from(lo.1[i]))).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn nice_max(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&v| v >= x)
        .unwrap_or(10.0 * mag)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + v / self.x_max * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - v / self.y_max * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

/// `v_avail` on x, `v_all` on y, points colored by informativeness, the
/// envelope as a red step line and the identity line dashed.
pub fn expansion_svg(cloud: &FeatureCloud, envelope: Option<&ExpansionEstimate>, title: &str) -> String {
    let pts = cloud.points();
    let mut x_max = pts.iter().map(|p| p.v_avail).fold(0.0, f64::max);
    let mut y_max = pts.iter().map(|p| p.v_all).fold(0.0, f64::max);
    if let Some(e) = envelope {
        x_max = x_max.max(e.bin_edges.last().copied().unwrap_or(0.0));
        y_max = y_max.max(e.envelope.iter().copied().fold(0.0, f64::max));
    }
    let f = Frame {
        x_max: nice_max(x_max),
        y_max: nice_max(y_max.max(x_max)),
    };
    let i_max = pts.iter().map(|p| p.informativeness).fold(0.0, f64::max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));

    // axes and ticks
    let (x0, y0, x1, y1) = (f.x(0.0), f.y(0.0), f.x(f.x_max), f.y(f.y_max));
    let _ = writeln!(s, r#"<path d="M{x0:.2},{y1:.2} V{y0:.2} H{x1:.2}" fill="none" stroke="black"/>"#);
    for i in 0..=5 {
        let vx = f.x_max * f64::from(i) / 5.0;
        let vy = f.y_max * f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{y0:.2}" x2="{0:.2}" y2="{1:.2}" stroke="black"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{vx:.3}</text>"#,
            f.x(vx),
            y0 + 5.0,
            y0 + 19.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/><text x="{2:.2}" y="{3:.2}" text-anchor="end">{vy:.3}</text>"#,
            f.y(vy),
            x0 - 5.0,
            x0 - 8.0,
            f.y(vy) + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">V on available domains</text>"#, (x0 + x1) / 2.0, HEIGHT - 14.0);
    let _ = writeln!(
        s,
        r#"<text transform="translate(16,{:.2}) rotate(-90)" text-anchor="middle">V on all domains</text>"#,
        (y0 + y1) / 2.0
    );

    // identity line, clipped to the frame
    let diag = f.x_max.min(f.y_max);
    let _ = writeln!(
        s,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6,4"/>"#,
        f.x(diag),
        f.y(diag)
    );

    s.push_str("<g stroke=\"none\" fill-opacity=\"0.8\">\n");
    for p in pts {
        let t = if i_max > 0.0 { p.informativeness / i_max } else { 0.0 };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"><title>{}</title></circle>"#,
            f.x(p.v_avail),
            f.y(p.v_all),
            ramp(t),
            escape(&p.feature_tag)
        );
    }
    s.push_str("</g>\n");

    if let Some(e) = envelope {
        let mut d = format!("M{:.2},{:.2}", f.x(e.bin_edges[0]), f.y(e.envelope[0]));
        for (b, v) in e.envelope.iter().enumerate() {
            let _ = write!(d, " V{:.2} H{:.2}", f.y(*v), f.x(e.bin_edges[b + 1]));
        }
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="red" stroke-width="2"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="red">δ = {}</text>"#, x0 + 8.0, y1 + 14.0, e.delta);
    }

    // colorbar
    let (bx, by, bh) = (WIDTH - MARGIN_RIGHT + 28.0, MARGIN_TOP + 10.0, 200.0);
    for i in 0..50 {
        let t = 1.0 - f64::from(i) / 49.0;
        let _ = writeln!(
            s,
            r#"<rect x="{bx:.2}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            by + f64::from(i) * bh / 50.0,
            bh / 50.0 + 0.5,
            ramp(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{i_max:.3}</text>"#, bx + 18.0, by + 8.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">0</text>"#, bx + 18.0, by + bh);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">I</text>"#, bx + 7.0, by - 6.0);
    s.push_str("</svg>\n");
    s
}
