//! Minimal self-contained SVG line plots for profiles and phase series.
//! Output is deterministic: identical input yields identical bytes.

use crate::bloch::PulseSequence;
use crate::io::fmt_sig;
use crate::profile::Profile;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 54.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn push_header(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(title)
    ));
}

fn push_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, y_ticks: &[f64]) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (MARGIN_T, HEIGHT - MARGIN_B);
    out.push_str(&format!(
        "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>\n",
        x1 - x0,
        y1 - y0
    ));
    for &ty in y_ticks {
        let sy = frame.sy(ty);
        out.push_str(&format!(
            "<line x1=\"{x0:.2}\" y1=\"{sy:.2}\" x2=\"{x1:.2}\" y2=\"{sy:.2}\" stroke=\"#cccccc\" stroke-dasharray=\"3,4\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            x0 - 6.0,
            sy + 4.0,
            fmt_sig(ty, 4)
        ));
    }
    let n_xticks = 8usize;
    for k in 0..=n_xticks {
        let tx = frame.x_min + (frame.x_max - frame.x_min) * k as f64 / n_xticks as f64;
        let sx = frame.sx(tx);
        out.push_str(&format!(
            "<line x1=\"{sx:.2}\" y1=\"{y1:.2}\" x2=\"{sx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y1 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{sx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            y1 + 20.0,
            fmt_sig(tx, 4)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        xml_escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    ));
}

fn push_polyline(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], color: &str) {
    if xs.is_empty() {
        return;
    }
    let mut points = String::new();
    for (x, y) in xs.iter().zip(ys) {
        points.push_str(&format!("{:.2},{:.2} ", frame.sx(*x), frame.sy(*y)));
    }
    out.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        points.trim_end()
    ));
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Plot mx, my, mz against offset (kHz). An empty profile yields a valid SVG
/// with axes only.
pub fn profile_svg(profile: &Profile, title: &str) -> String {
    let (x_min, x_max) = if profile.is_empty() {
        (-1.0, 1.0)
    } else {
        (
            profile.offsets_hz[0] / 1e3,
            profile.offsets_hz[profile.len() - 1] / 1e3,
        )
    };
    let frame = Frame {
        x_min,
        x_max,
        y_min: -1.05,
        y_max: 1.05,
    };
    let mut out = String::new();
    push_header(&mut out, title);
    push_axes(
        &mut out,
        &frame,
        "offset (kHz)",
        "magnetization component",
        &[-1.0, -0.5, 0.0, 0.5, 1.0],
    );
    let xs_khz: Vec<f64> = profile.offsets_hz.iter().map(|&v| v / 1e3).collect();
    let series: [(&[f64], &str, &str); 3] = [
        (&profile.mx, "#1f77b4", "mx"),
        (&profile.my, "#2ca02c", "my"),
        (&profile.mz, "#d62728", "mz"),
    ];
    for (i, (ys, color, label)) in series.iter().enumerate() {
        push_polyline(&mut out, &frame, &xs_khz, ys, color);
        let lx = WIDTH - MARGIN_R - 150.0 + i as f64 * 50.0;
        out.push_str(&format!(
            "<line x1=\"{lx:.2}\" y1=\"36\" x2=\"{:.2}\" y2=\"36\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            lx + 16.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"40\">{label}</text>\n",
            lx + 20.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Plot the per-step RF phase (degrees) against time (ms). Wraps show up as
/// vertical jumps, as usual for phase ramps.
pub fn phase_series_svg(seq: &PulseSequence, title: &str) -> String {
    let duration_ms = seq.duration_s() * 1e3;
    let frame = Frame {
        x_min: 0.0,
        x_max: if duration_ms > 0.0 { duration_ms } else { 1.0 },
        y_min: 0.0,
        y_max: 360.0,
    };
    let mut out = String::new();
    push_header(&mut out, title);
    push_axes(
        &mut out,
        &frame,
        "time (ms)",
        "rf phase (deg)",
        &[0.0, 90.0, 180.0, 270.0, 360.0],
    );
    let dwell_ms = seq.params().dwell_s() * 1e3;
    let xs: Vec<f64> = (0..seq.len()).map(|i| i as f64 * dwell_ms).collect();
    let ys: Vec<f64> = seq.phases_rad().iter().map(|t| t.to_degrees()).collect();
    push_polyline(&mut out, &frame, &xs, &ys, "#1f77b4");
    out.push_str("</svg>\n");
    out
}
