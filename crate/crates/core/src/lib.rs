//! Feedback-driven RF pulse design for NMR.
//!
//! The designer simulates a set of resonance offsets on the Bloch sphere,
//! repeatedly picks the offset farthest from the south pole, and applies one
//! small-flip RF step with its phase set a quarter turn ahead of that
//! offset's transverse magnetization. Recording the step phases yields a
//! broadband inversion pulse; running the record backwards with every phase
//! incremented by pi turns an equator-start design into an excitation pulse,
//! and a mixed initialization into a band-selective one.
//!
//! Modules:
//!
//! * [`bloch`] - magnetization states, the exact tilted-axis rotation step,
//!   propagation and propagator matrices.
//! * [`designer`] - the greedy design loop, its initializations, and the
//!   time-reversal transform.
//! * [`profile`] - dense offset sweeps and quality metrics.
//! * [`io`] - pulse JSON, shape-file and CSV writers/readers.
//! * [`plot`] - deterministic SVG renderings of profiles and phase series.
//! * [`presets`] - published reference parameter sets.

pub mod bloch;
pub mod designer;
mod error;
pub mod io;
pub mod plot;
pub mod presets;
pub mod profile;

pub use bloch::{
    Magnetization, PulseParameters, PulseSequence, Rotation, flip_to_duration, propagate,
    propagator, rotate_step, wrap_phase,
};
pub use designer::{
    DEFAULT_EPSILON, DEFAULT_MAX_STEPS, DEFAULT_N_OFFSETS, DesignMode, DesignReport, DesignState,
    DesignTask, SelectionStrategy, design, design_band_selective, design_excitation, design_pulse,
    design_with_offsets, feedback_phase, init_states, make_offset_grid, reverse_with_pi,
    select_target,
};
pub use error::{Error, Result};
pub use io::{
    PulseRecord, read_pulse_json, write_profile_csv, write_pulse_csv, write_pulse_json,
    write_shape_file,
};
#[cfg(feature = "parallel")]
pub use profile::sweep_parallel;
pub use profile::{
    DEFAULT_EVAL_POINTS, Profile, ProfileMetrics, amplitude_robustness_sweep, eval_grid, metrics,
    sweep,
};
