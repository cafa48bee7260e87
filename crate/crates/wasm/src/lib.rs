//! wasm-bindgen surface for the browser demo: run a design in the page,
//! render profile / phase plots as SVG strings, and export the pulse.

use wasm_bindgen::prelude::*;

use fbpulse_core::{
    DesignMode, DesignReport, DesignTask, Magnetization, PulseParameters, PulseRecord,
    amplitude_robustness_sweep, design_pulse, eval_grid, metrics, plot, sweep, write_pulse_json,
    write_shape_file,
};

/// A completed design run, held on the wasm side; the page pulls summaries
/// and rendered plots from it.
#[wasm_bindgen]
pub struct DesignedPulse {
    report: DesignReport,
}

#[allow(clippy::too_many_arguments)]
fn build_task(
    mode: &str,
    amplitude_khz: f64,
    band_khz: f64,
    pass_khz: f64,
    flip_deg: f64,
    n_offsets: usize,
    epsilon: f64,
    max_steps: usize,
) -> fbpulse_core::Result<DesignTask> {
    let mode = DesignMode::parse(mode)?;
    let params = PulseParameters::new(amplitude_khz * 1e3, flip_deg)?;
    let mut task = DesignTask::new(mode, params, band_khz * 1e3);
    if mode == DesignMode::BandSelective {
        task.pass_hz = Some(pass_khz * 1e3);
    }
    task.n_offsets = n_offsets;
    task.epsilon = epsilon;
    task.max_steps = max_steps;
    task.validate()?;
    Ok(task)
}

/// Run a design. `mode` is one of "inversion", "excitation" or
/// "band_selective"; `pass_khz` is ignored outside band-selective mode.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn design(
    mode: &str,
    amplitude_khz: f64,
    band_khz: f64,
    pass_khz: f64,
    flip_deg: f64,
    n_offsets: usize,
    epsilon: f64,
    max_steps: usize,
) -> Result<DesignedPulse, JsError> {
    let task = build_task(
        mode,
        amplitude_khz,
        band_khz,
        pass_khz,
        flip_deg,
        n_offsets,
        epsilon,
        max_steps,
    )
    .map_err(|e| JsError::new(&e.to_string()))?;
    let report = design_pulse(&task).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(DesignedPulse { report })
}

#[wasm_bindgen]
impl DesignedPulse {
    pub fn steps(&self) -> usize {
        self.report.steps
    }

    pub fn duration_ms(&self) -> f64 {
        self.report.duration_s * 1e3
    }

    pub fn converged(&self) -> bool {
        self.report.converged
    }

    pub fn worst_final_z(&self) -> f64 {
        self.report.worst_final_z()
    }

    /// Sweep the designed pulse from the north pole over the design band and
    /// render the profile. `scale` multiplies the RF amplitude (dwell
    /// unchanged) for robustness exploration; 1.0 is the nominal pulse.
    pub fn profile_svg(&self, points: usize, scale: f64) -> Result<String, JsError> {
        let grid = eval_grid(self.report.task.band_hz, points)
            .map_err(|e| JsError::new(&e.to_string()))?;
        let profile = if scale == 1.0 {
            sweep(&self.report.sequence, &grid, Magnetization::NORTH)
                .map_err(|e| JsError::new(&e.to_string()))?
        } else {
            amplitude_robustness_sweep(&self.report.sequence, &grid, Magnetization::NORTH, &[scale])
                .map_err(|e| JsError::new(&e.to_string()))?
                .pop()
                .expect("one profile per scale")
        };
        let title = format!(
            "{} profile from +z (rf scale {scale})",
            self.report.task.mode.as_str()
        );
        Ok(plot::profile_svg(&profile, &title))
    }

    /// Render the per-step RF phase series.
    pub fn phase_svg(&self) -> String {
        let title = format!(
            "{} pulse rf phase ({} steps)",
            self.report.task.mode.as_str(),
            self.report.steps
        );
        plot::phase_series_svg(&self.report.sequence, &title)
    }

    /// Quality metrics of the north-pole profile, rendered as a short
    /// plain-text block.
    pub fn metrics_text(&self, points: usize, scale: f64) -> Result<String, JsError> {
        let band = self.report.task.band_hz;
        let grid = eval_grid(band, points).map_err(|e| JsError::new(&e.to_string()))?;
        let profile = amplitude_robustness_sweep(
            &self.report.sequence,
            &grid,
            Magnetization::NORTH,
            &[scale],
        )
        .map_err(|e| JsError::new(&e.to_string()))?
        .pop()
        .expect("one profile per scale");
        let m = metrics(&profile, band, self.report.task.pass_hz)
            .map_err(|e| JsError::new(&e.to_string()))?;
        let mut text = format!(
            "worst_inversion (max mz): {:+.4}\nmin transverse: {:.4}\nphase spread: {:.2} deg",
            m.worst_inversion, m.min_transverse, m.phase_spread_deg
        );
        if let Some(v) = m.stopband_leakage {
            text.push_str(&format!("\nstop-band leakage: {v:.4}"));
        }
        if let Some(v) = m.passband_ripple {
            text.push_str(&format!("\npass-band ripple: {v:.4}"));
        }
        Ok(text)
    }

    pub fn pulse_json(&self) -> String {
        write_pulse_json(&PulseRecord::from_report(&self.report))
    }

    pub fn shape_file(&self) -> Result<String, JsError> {
        write_shape_file(&self.report.sequence).map_err(|e| JsError::new(&e.to_string()))
    }
}
