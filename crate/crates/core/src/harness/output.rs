use std::fmt::Write as _;

use super::sweep::{SweepCell, SweepResult, ZetaCell};

pub const SWEEP_HEADER: &str =
    "c,p,lambda1,mu,alpha_minus,p_critical,cert_analytic,cert_numeric,zeta0_verdict,max_residual";

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut s = format!("# config_sha256={}\n{SWEEP_HEADER}\n", result.config_sha256);
    for cell in &result.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(cell.c),
            fmt_f64(cell.p),
            fmt_opt(cell.lambda1),
            fmt_opt(cell.mu),
            fmt_opt(cell.alpha_minus),
            fmt_opt(cell.p_critical),
            cell.cert_analytic,
            cell.cert_numeric,
            cell.zeta0,
            fmt_opt(cell.max_residual),
        );
    }
    s
}

/// `x,y` CSV with a header line.
pub fn xy_csv(header: (&str, &str), rows: &[(f64, f64)]) -> String {
    let mut s = format!("{},{}\n", header.0, header.1);
    for &(x, y) in rows {
        let _ = writeln!(s, "{},{}", fmt_f64(x), fmt_f64(y));
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, b + 0.5) };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str) {
        let (x0, x1, y0, y1) = (PAD, W - PAD, H - PAD, PAD);
        let _ = writeln!(
            s,
            r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = self.x.0 + t * (self.x.1 - self.x.0);
            let yv = self.y.0 + t * (self.y.1 - self.y.0);
            let (xp, yp) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                s,
                r#"<text x="{xp:.1}" y="{:.1}" font-size="11" text-anchor="middle">{xv:.4}</text>"#,
                y0 + 16.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{yp:.1}" font-size="11" text-anchor="end">{yv:.4}</text>"#,
                x0 - 6.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            0.5 * W,
            H - 15.0,
            escape(xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
            0.5 * H,
            0.5 * H,
            escape(ylabel)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open_svg() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    )
}

fn cell_color(cell: &SweepCell) -> &'static str {
    if cell.certified() {
        "#4caf50"
    } else if cell.cert_analytic.is_pass() {
        "#ffc107"
    } else if matches!(cell.cert_analytic, super::sweep::StageVerdict::Fail) {
        "#e53935"
    } else {
        "#bdbdbd"
    }
}

fn distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn half_steps(v: &[f64]) -> f64 {
    if v.len() > 1 {
        0.5 * (v[1] - v[0])
    } else {
        0.5
    }
}

/// Dichotomy map: one rectangle per cell, colored by certifier outcome, a
/// dot on cells where `ζ₀^{p+1}` diverges, and the `p_critical(c)` curve.
pub fn sweep_svg(result: &SweepResult) -> String {
    let cs = distinct(result.cells.iter().map(|c| c.c).collect());
    let ps = distinct(result.cells.iter().map(|c| c.p).collect());
    let mut s = open_svg();
    if cs.is_empty() || ps.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (dc, dp) = (half_steps(&cs), half_steps(&ps));
    let frame = Frame::new(
        (cs[0] - dc, cs[cs.len() - 1] + dc),
        (ps[0] - dp, ps[ps.len() - 1] + dp),
    );
    for cell in &result.cells {
        let (x0, x1) = (frame.px(cell.c - dc), frame.px(cell.c + dc));
        let (y0, y1) = (frame.py(cell.p + dp), frame.py(cell.p - dp));
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white" stroke-width="0.5"/>"#,
            x1 - x0,
            y1 - y0,
            cell_color(cell)
        );
        if matches!(cell.zeta0, ZetaCell::Divergent { .. }) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="black"/>"#,
                frame.px(cell.c),
                frame.py(cell.p)
            );
        }
    }
    let mut curve: Vec<(f64, f64)> = Vec::new();
    for &c in &cs {
        if let Some(pc) = result.cells.iter().find(|x| x.c == c).and_then(|x| x.p_critical) {
            curve.push((c, pc.min(frame.y.1).max(frame.y.0)));
        }
    }
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .map(|&(c, p)| format!("{:.2},{:.2}", frame.px(c), frame.py(p)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1e88e5" stroke-width="2"/>"##,
            pts.join(" ")
        );
    }
    frame.axes(&mut s, "c", "p");
    s.push_str("</svg>\n");
    s
}

/// `λ₁` against the cap angle, with the point nearest the hemisphere marked.
pub fn eigen_curve_svg(rows: &[(f64, f64)]) -> String {
    let mut s = open_svg();
    if rows.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in rows {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let frame = Frame::new((xmin, xmax), (ymin, ymax));
    let pts: Vec<String> = rows
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1e88e5" stroke-width="2"/>"##,
        pts.join(" ")
    );
    let half_pi = std::f64::consts::FRAC_PI_2;
    if xmin <= half_pi && half_pi <= xmax {
        let &(x, y) = rows
            .iter()
            .min_by(|a, b| (a.0 - half_pi).abs().total_cmp(&(b.0 - half_pi).abs()))
            .expect("nonempty");
        let (cx, cy) = (frame.px(x), frame.py(y));
        let _ = writeln!(s, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="#e53935"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">hemisphere λ₁ = {y:.6}</text>"#,
            cx + 8.0,
            cy - 8.0
        );
    }
    frame.axes(&mut s, "θ₀", "λ₁");
    s.push_str("</svg>\n");
    s
}
