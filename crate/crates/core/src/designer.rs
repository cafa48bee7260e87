//! Greedy simulation-in-the-loop pulse design.
//!
//! The designer evolves one magnetization state per design offset. Each step
//! it picks a target offset, reads the phase of that state's transverse
//! component, sets the RF phase a quarter turn ahead of it, and applies one
//! small-flip step to every state. With the right-handed kernel in
//! [`crate::bloch`], the chosen axis is perpendicular to the target state, so
//! the target's z component can only decrease (exactly so on resonance). The
//! loop stops once every state's z is within `epsilon` of the south pole.
//!
//! Three initializations cover the three products:
//!
//! * inversion: start all states at the north pole; the recorded phases are
//!   the deliverable pulse.
//! * excitation: start all states on +y; run the loop, then emit the
//!   time-reversed, pi-incremented sequence.
//! * band-selective excitation: pass-band states start on +y, stop-band
//!   states at the south pole; reverse as above.
//!
//! The reversal works because flipping a step's phase by pi negates the
//! transverse field while negating the offset negates the longitudinal one:
//! `axis(A, theta + pi, nu) = -axis(A, theta, -nu)`, hence the reversed
//! sequence at offset `nu` is exactly the inverse of the forward sequence at
//! `-nu`. On a symmetric offset grid the forward design therefore fixes the
//! reversed pulse's action at every design offset.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::bloch::{Magnetization, PulseParameters, PulseSequence, rotate_step, wrap_phase};
use crate::error::{Error, Result};

/// Default termination tolerance on z (stop at z <= -(1 - epsilon)).
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Default hard cap on design steps.
pub const DEFAULT_MAX_STEPS: usize = 200_000;
/// Default number of design offsets.
pub const DEFAULT_N_OFFSETS: usize = 40;

/// What the designed pulse should do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignMode {
    Inversion,
    Excitation,
    BandSelective,
}

impl DesignMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignMode::Inversion => "inversion",
            DesignMode::Excitation => "excitation",
            DesignMode::BandSelective => "band_selective",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "inversion" => Ok(DesignMode::Inversion),
            "excitation" => Ok(DesignMode::Excitation),
            "band_selective" => Ok(DesignMode::BandSelective),
            other => Err(Error::invalid(
                "mode",
                format!("unknown design mode {other:?}"),
            )),
        }
    }
}

/// How the loop picks the offset to nudge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Target the offset with the largest z (first index wins ties).
    WorstOffset,
    /// Cycle through the offsets in ascending order, one step each
    /// (experimental chirp-like polling).
    LinearSweep,
}

impl SelectionStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionStrategy::WorstOffset => "worst_offset",
            SelectionStrategy::LinearSweep => "linear_sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "worst_offset" => Ok(SelectionStrategy::WorstOffset),
            "linear_sweep" => Ok(SelectionStrategy::LinearSweep),
            other => Err(Error::invalid(
                "strategy",
                format!("unknown selection strategy {other:?}"),
            )),
        }
    }
}

/// A complete design problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignTask {
    pub mode: DesignMode,
    pub params: PulseParameters,
    /// Half-width B of the full design band, Hz.
    pub band_hz: f64,
    /// Half-width C of the pass band, Hz; required for band-selective mode.
    pub pass_hz: Option<f64>,
    /// Number of design offsets (even, >= 2).
    pub n_offsets: usize,
    /// Termination tolerance on z.
    pub epsilon: f64,
    /// Hard iteration cap.
    pub max_steps: usize,
    pub strategy: SelectionStrategy,
}

impl DesignTask {
    /// A task with the crate defaults (40 offsets, epsilon 0.01, 200k step
    /// cap, worst-offset polling).
    pub fn new(mode: DesignMode, params: PulseParameters, band_hz: f64) -> Self {
        DesignTask {
            mode,
            params,
            band_hz,
            pass_hz: None,
            n_offsets: DEFAULT_N_OFFSETS,
            epsilon: DEFAULT_EPSILON,
            max_steps: DEFAULT_MAX_STEPS,
            strategy: SelectionStrategy::WorstOffset,
        }
    }

    pub fn with_pass_band(mut self, pass_hz: f64) -> Self {
        self.pass_hz = Some(pass_hz);
        self
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::require_positive("band_hz", self.band_hz)?;
        match (self.mode, self.pass_hz) {
            (DesignMode::BandSelective, None) => {
                return Err(Error::invalid(
                    "pass_hz",
                    "required for band-selective mode",
                ));
            }
            (DesignMode::BandSelective, Some(c))
                if !(c.is_finite() && c > 0.0 && c < self.band_hz) =>
            {
                return Err(Error::invalid(
                    "pass_hz",
                    format!("must satisfy 0 < pass_hz < band_hz, got {c}"),
                ));
            }
            _ => {}
        }
        if self.n_offsets < 2 || !self.n_offsets.is_multiple_of(2) {
            return Err(Error::invalid(
                "n_offsets",
                format!("must be even and >= 2, got {}", self.n_offsets),
            ));
        }
        let epsilon_ok = self.epsilon > 0.0 && self.epsilon < 1.0;
        if !epsilon_ok {
            return Err(Error::invalid(
                "epsilon",
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps", "must be >= 1"));
        }
        Ok(())
    }
}

/// Per-offset simulation state during a design run.
#[derive(Clone, Debug)]
pub struct DesignState {
    pub offsets_hz: Vec<f64>,
    pub states: Vec<Magnetization>,
    pub step_count: usize,
}

/// Result of a design run.
#[derive(Clone, Debug)]
pub struct DesignReport {
    pub task: DesignTask,
    /// The deliverable pulse (reversed for excitation / band-selective).
    pub sequence: PulseSequence,
    /// The raw forward-loop sequence when `sequence` is its reversal.
    pub forward_sequence: Option<PulseSequence>,
    pub converged: bool,
    pub steps: usize,
    /// `steps * dwell_s`.
    pub duration_s: f64,
    pub offsets_hz: Vec<f64>,
    /// Forward-loop final state at each design offset.
    pub final_states: Vec<Magnetization>,
}

impl DesignReport {
    /// Largest final z over the design grid (<= -(1 - epsilon) iff converged).
    pub fn worst_final_z(&self) -> f64 {
        self.final_states
            .iter()
            .fold(f64::NEG_INFINITY, |a, m| a.max(m.mz))
    }
}

/// Uniform design grid over `[-band_hz, band_hz]`, both endpoints included,
/// with no zero point.
///
/// The positive half is laid out first and the negative half mirrored from
/// it, so `grid[k] == -grid[n-1-k]` holds exactly in floating point; an odd
/// count cannot satisfy that and is rejected.
pub fn make_offset_grid(band_hz: f64, n_offsets: usize) -> Result<Vec<f64>> {
    crate::error::require_positive("band_hz", band_hz)?;
    if n_offsets < 2 || !n_offsets.is_multiple_of(2) {
        return Err(Error::invalid(
            "n_offsets",
            format!("must be even and >= 2 for a symmetric grid, got {n_offsets}"),
        ));
    }
    let spacing = 2.0 * band_hz / (n_offsets - 1) as f64;
    // positive half, descending from +B
    let pos: Vec<f64> = (0..n_offsets / 2)
        .map(|j| band_hz - j as f64 * spacing)
        .collect();
    let mut grid = Vec::with_capacity(n_offsets);
    grid.extend(pos.iter().map(|&v| -v));
    grid.extend(pos.iter().rev());
    Ok(grid)
}

/// Initial magnetization per offset for a task's mode.
pub fn init_states(
    mode: DesignMode,
    pass_hz: Option<f64>,
    offsets_hz: &[f64],
) -> Vec<Magnetization> {
    match mode {
        DesignMode::Inversion => vec![Magnetization::NORTH; offsets_hz.len()],
        DesignMode::Excitation => vec![Magnetization::PLUS_Y; offsets_hz.len()],
        DesignMode::BandSelective => {
            let c = pass_hz.unwrap_or(0.0);
            offsets_hz
                .iter()
                .map(|&nu| {
                    if nu.abs() <= c {
                        Magnetization::PLUS_Y
                    } else {
                        Magnetization::SOUTH
                    }
                })
                .collect()
        }
    }
}

/// Index of the offset to nudge next.
pub fn select_target(state: &DesignState, strategy: SelectionStrategy) -> usize {
    match strategy {
        SelectionStrategy::WorstOffset => {
            let mut best = 0;
            for (i, m) in state.states.iter().enumerate() {
                if m.mz > state.states[best].mz {
                    best = i;
                }
            }
            best
        }
        SelectionStrategy::LinearSweep => state.step_count % state.states.len(),
    }
}

/// RF phase a quarter turn ahead of the state's transverse phase, in
/// `[0, 2*pi)`. At a pole (transverse < 1e-12) the transverse phase is
/// undefined; the convention phi := 0 gives theta = pi/2, so the first step
/// from the north pole rotates about +y.
pub fn feedback_phase(m: Magnetization) -> f64 {
    if m.transverse() < 1e-12 {
        FRAC_PI_2
    } else {
        wrap_phase(m.phase() + FRAC_PI_2)
    }
}

fn max_z(states: &[Magnetization]) -> f64 {
    states.iter().fold(f64::NEG_INFINITY, |a, m| a.max(m.mz))
}

/// Run the greedy forward loop for `task` on its symmetric design grid.
///
/// For inversion tasks the returned sequence is the deliverable pulse; for the
/// other modes it is the forward sequence that [`design_excitation`] and
/// [`design_band_selective`] reverse. Non-convergence within `max_steps` is
/// reported, not raised. Identical tasks produce identical reports.
pub fn design(task: &DesignTask) -> Result<DesignReport> {
    task.validate()?;
    let offsets = make_offset_grid(task.band_hz, task.n_offsets)?;
    design_with_offsets(task, offsets)
}

/// [`design`] on an explicit offset list (diagnostics and degenerate cases;
/// the grid symmetry requirement is not enforced here).
pub fn design_with_offsets(task: &DesignTask, offsets_hz: Vec<f64>) -> Result<DesignReport> {
    if offsets_hz.is_empty() {
        return Err(Error::invalid("offsets", "must not be empty"));
    }
    let epsilon_ok = task.epsilon > 0.0 && task.epsilon < 1.0;
    if !epsilon_ok {
        return Err(Error::invalid(
            "epsilon",
            format!("must lie in (0, 1), got {}", task.epsilon),
        ));
    }
    let mut state = DesignState {
        states: init_states(task.mode, task.pass_hz, &offsets_hz),
        offsets_hz,
        step_count: 0,
    };
    let mut seq = PulseSequence::new(task.params, Vec::new());
    write_task_metadata(&mut seq, task);

    let threshold = -(1.0 - task.epsilon);
    let mut converged = max_z(&state.states) <= threshold;
    while !converged && state.step_count < task.max_steps {
        let j = select_target(&state, task.strategy);
        let theta = feedback_phase(state.states[j]);
        for (m, &nu) in state.states.iter_mut().zip(&state.offsets_hz) {
            *m = rotate_step(*m, &task.params, theta, nu);
        }
        seq.push_phase(theta);
        state.step_count += 1;
        converged = max_z(&state.states) <= threshold;
    }

    let duration_s = seq.duration_s();
    Ok(DesignReport {
        task: task.clone(),
        steps: state.step_count,
        duration_s,
        sequence: seq,
        forward_sequence: None,
        converged,
        offsets_hz: state.offsets_hz,
        final_states: state.states,
    })
}

/// Time-reverse a sequence and increment every phase by pi.
///
/// The propagator of the result at offset `nu` is exactly the inverse of the
/// original's propagator at `-nu`, for any phase list with equal dwell.
pub fn reverse_with_pi(seq: &PulseSequence) -> PulseSequence {
    let phases: Vec<f64> = seq
        .phases_rad()
        .iter()
        .rev()
        .map(|&theta| wrap_phase(theta + PI))
        .collect();
    let mut out = PulseSequence::new(seq.params(), phases);
    out.metadata = seq.metadata.clone();
    let note = match out.metadata.get("transform") {
        Some(prev) => format!("{prev},reverse_with_pi"),
        None => "reverse_with_pi".to_string(),
    };
    out.metadata.insert("transform".to_string(), note);
    out
}

/// Design a broadband excitation pulse: run the forward loop from +y, then
/// reverse with pi. The report's `sequence` is the deliverable excitation
/// pulse; `forward_sequence` and `final_states` carry the forward diagnostics.
pub fn design_excitation(task: &DesignTask) -> Result<DesignReport> {
    if task.mode != DesignMode::Excitation {
        return Err(Error::invalid("mode", "task mode must be excitation"));
    }
    reversed_design(task)
}

/// Design a band-selective excitation pulse (pass band from +y, stop band
/// pinned at the south pole), then reverse with pi.
pub fn design_band_selective(task: &DesignTask) -> Result<DesignReport> {
    if task.mode != DesignMode::BandSelective {
        return Err(Error::invalid("mode", "task mode must be band_selective"));
    }
    reversed_design(task)
}

fn reversed_design(task: &DesignTask) -> Result<DesignReport> {
    let mut report = design(task)?;
    let forward = report.sequence;
    report.sequence = reverse_with_pi(&forward);
    report.forward_sequence = Some(forward);
    Ok(report)
}

/// Dispatch on the task's mode: [`design`] for inversion, the reversing
/// wrappers otherwise.
pub fn design_pulse(task: &DesignTask) -> Result<DesignReport> {
    match task.mode {
        DesignMode::Inversion => design(task),
        DesignMode::Excitation => design_excitation(task),
        DesignMode::BandSelective => design_band_selective(task),
    }
}

fn write_task_metadata(seq: &mut PulseSequence, task: &DesignTask) {
    let md = &mut seq.metadata;
    md.insert("mode".to_string(), task.mode.as_str().to_string());
    md.insert("band_hz".to_string(), format!("{}", task.band_hz));
    if let Some(c) = task.pass_hz {
        md.insert("pass_hz".to_string(), format!("{c}"));
    }
    md.insert("n_offsets".to_string(), format!("{}", task.n_offsets));
    md.insert("epsilon".to_string(), format!("{}", task.epsilon));
    md.insert("max_steps".to_string(), format!("{}", task.max_steps));
    md.insert("strategy".to_string(), task.strategy.as_str().to_string());
}
