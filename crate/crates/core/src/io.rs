//! Text formats: pulse JSON (lossless), JCAMP-DX-style shape files, profile
//! and pulse CSV. All writers are deterministic; no timestamps enter the byte
//! stream.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bloch::{PulseParameters, PulseSequence};
use crate::designer::{DesignMode, DesignReport};
use crate::error::{Error, Result};
use crate::profile::{Profile, ProfileMetrics};

pub const PULSE_FORMAT_VERSION: u32 = 1;

/// A pulse file's contents: the sequence plus its design provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseRecord {
    pub sequence: PulseSequence,
    pub mode: DesignMode,
    pub band_hz: Option<f64>,
    pub pass_hz: Option<f64>,
    pub converged: bool,
    pub duration_s: f64,
}

impl PulseRecord {
    pub fn from_report(report: &DesignReport) -> Self {
        PulseRecord {
            sequence: report.sequence.clone(),
            mode: report.task.mode,
            band_hz: Some(report.task.band_hz),
            pass_hz: report.task.pass_hz,
            converged: report.converged,
            duration_s: report.duration_s,
        }
    }

    /// Same record with the sequence swapped out (used by the reverse
    /// command; duration is preserved since reversal keeps the length).
    pub fn with_sequence(&self, sequence: PulseSequence) -> Self {
        PulseRecord {
            sequence,
            ..self.clone()
        }
    }
}

/// On-disk schema. Phases are stored in radians as plain JSON numbers, which
/// serde prints in shortest round-trip form, so parsing recovers the exact
/// f64 bits.
#[derive(Serialize, Deserialize)]
struct PulseFileV1 {
    format_version: u32,
    mode: String,
    amplitude_hz: f64,
    flip_per_step_deg: f64,
    dwell_s: f64,
    band_hz: Option<f64>,
    pass_hz: Option<f64>,
    steps: usize,
    duration_s: f64,
    converged: bool,
    metadata: BTreeMap<String, String>,
    phases_rad: Vec<f64>,
}

pub fn write_pulse_json(record: &PulseRecord) -> String {
    let seq = &record.sequence;
    let file = PulseFileV1 {
        format_version: PULSE_FORMAT_VERSION,
        mode: record.mode.as_str().to_string(),
        amplitude_hz: seq.params().amplitude_hz(),
        flip_per_step_deg: seq.params().flip_per_step_deg(),
        dwell_s: seq.params().dwell_s(),
        band_hz: record.band_hz,
        pass_hz: record.pass_hz,
        steps: seq.len(),
        duration_s: record.duration_s,
        converged: record.converged,
        metadata: seq.metadata.clone(),
        phases_rad: seq.phases_rad().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("schema serializes");
    text.push('\n');
    text
}

pub fn read_pulse_json(text: &str) -> Result<PulseRecord> {
    let file: PulseFileV1 = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {}", e.line()), e.to_string()))?;
    if file.format_version != PULSE_FORMAT_VERSION {
        return Err(Error::parse(
            "format_version",
            format!(
                "unsupported version {}, expected {PULSE_FORMAT_VERSION}",
                file.format_version
            ),
        ));
    }
    let mode = DesignMode::parse(&file.mode).map_err(|e| Error::parse("mode", e.to_string()))?;
    let params = PulseParameters::new(file.amplitude_hz, file.flip_per_step_deg)
        .map_err(|e| Error::parse("amplitude_hz/flip_per_step_deg", e.to_string()))?;
    let derived = params.dwell_s();
    if (file.dwell_s - derived).abs() > derived * 1e-9 {
        return Err(Error::parse(
            "dwell_s",
            format!(
                "inconsistent with flip/amplitude: file {} vs derived {derived}",
                file.dwell_s
            ),
        ));
    }
    if file.steps != file.phases_rad.len() {
        return Err(Error::parse(
            "steps",
            format!(
                "count mismatch: steps = {}, phases_rad holds {}",
                file.steps,
                file.phases_rad.len()
            ),
        ));
    }
    if let Some(bad) = file.phases_rad.iter().find(|p| !p.is_finite()) {
        return Err(Error::parse(
            "phases_rad",
            format!("non-finite phase {bad}"),
        ));
    }
    let expected_duration = file.steps as f64 * derived;
    if (file.duration_s - expected_duration).abs() > expected_duration.max(1e-12) * 1e-9 {
        return Err(Error::parse(
            "duration_s",
            format!(
                "inconsistent with steps * dwell: file {} vs {expected_duration}",
                file.duration_s
            ),
        ));
    }
    let mut sequence = PulseSequence::new(params, file.phases_rad);
    sequence.metadata = file.metadata;
    Ok(PulseRecord {
        sequence,
        mode,
        band_hz: file.band_hz,
        pass_hz: file.pass_hz,
        converged: file.converged,
        duration_s: file.duration_s,
    })
}

/// Trimmed decimal with the given number of significant digits.
pub(crate) fn fmt_sig(x: f64, sig: i32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (sig - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// JCAMP-DX-style shaped pulse text: five "##" header lines, one
/// "amplitude, phase" line per step (constant amplitude 100, phase in degrees
/// in `[0, 360)`, six decimals each), and a terminating "##END=". Line breaks
/// are single line-feeds.
pub fn write_shape_file(seq: &PulseSequence) -> Result<String> {
    if seq.is_empty() {
        return Err(Error::invalid(
            "sequence",
            "cannot export an empty sequence",
        ));
    }
    let title = match seq.metadata.get("mode") {
        Some(mode) => format!("fbpulse {mode} pulse"),
        None => "fbpulse shaped pulse".to_string(),
    };
    let mut out = String::new();
    out.push_str(&format!("##TITLE= {title}\n"));
    out.push_str("##JCAMP-DX= 5.00\n");
    out.push_str("##DATA TYPE= Shape Data\n");
    out.push_str(&format!("##NPOINTS= {}\n", seq.len()));
    out.push_str("##XYPOINTS= (XY..XY)\n");
    for &theta in seq.phases_rad() {
        let mut deg = (theta.to_degrees() * 1e6).round() / 1e6;
        if deg >= 360.0 {
            deg -= 360.0;
        }
        out.push_str(&format!("100.000000, {deg:.6}\n"));
    }
    out.push_str("##END=\n");
    Ok(out)
}

/// Per-step pulse table: step index, start time, phase in radians (shortest
/// exact decimal) and degrees.
pub fn write_pulse_csv(seq: &PulseSequence) -> String {
    let mut out = String::from("step,time_s,phase_rad,phase_deg\n");
    let dwell = seq.params().dwell_s();
    for (i, &theta) in seq.phases_rad().iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{theta},{}\n",
            fmt_sig(i as f64 * dwell, 9),
            fmt_sig(theta.to_degrees(), 9)
        ));
    }
    out
}

/// Profile table: one row per offset, nine significant digits, phase column
/// empty where the transverse magnitude vanishes. Metrics, when given, are
/// appended as "#" comment lines.
pub fn write_profile_csv(profile: &Profile, metrics: Option<&ProfileMetrics>) -> String {
    let mut out = String::from("offset_hz,mx,my,mz,transverse,phase_deg\n");
    for i in 0..profile.len() {
        let tr = profile.transverse(i);
        let phase = if tr < 1e-12 {
            String::new()
        } else {
            fmt_sig(profile.phase_rad(i).to_degrees(), 9)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{phase}\n",
            fmt_sig(profile.offsets_hz[i], 9),
            fmt_sig(profile.mx[i], 9),
            fmt_sig(profile.my[i], 9),
            fmt_sig(profile.mz[i], 9),
            fmt_sig(tr, 9),
        ));
    }
    if let Some(m) = metrics {
        out.push_str(&format!(
            "# worst_inversion = {}\n",
            fmt_sig(m.worst_inversion, 9)
        ));
        out.push_str(&format!(
            "# min_transverse = {}\n",
            fmt_sig(m.min_transverse, 9)
        ));
        out.push_str(&format!(
            "# phase_spread_deg = {}\n",
            fmt_sig(m.phase_spread_deg, 9)
        ));
        if let Some(v) = m.stopband_leakage {
            out.push_str(&format!("# stopband_leakage = {}\n", fmt_sig(v, 9)));
        }
        if let Some(v) = m.passband_ripple {
            out.push_str(&format!("# passband_ripple = {}\n", fmt_sig(v, 9)));
        }
    }
    out
}
