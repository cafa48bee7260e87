//! Published reference parameter sets, bundled so the three standard designs
//! are one-liners. All use the crate defaults for epsilon (0.01), step cap
//! (200k) and worst-offset polling.

use crate::bloch::PulseParameters;
use crate::designer::{DesignMode, DesignTask};

/// Broadband inversion: 10 kHz RF over +-20 kHz, 0.57 deg steps, 40 offsets.
pub fn paper_inversion() -> DesignTask {
    DesignTask::new(
        DesignMode::Inversion,
        PulseParameters::new(10_000.0, 0.57).expect("static parameters"),
        20_000.0,
    )
}

/// Broadband excitation: same field and band as the inversion set.
pub fn paper_excitation() -> DesignTask {
    DesignTask::new(
        DesignMode::Excitation,
        PulseParameters::new(10_000.0, 0.57).expect("static parameters"),
        20_000.0,
    )
}

/// Band-selective excitation: 5 kHz RF, +-5 kHz band with a +-2 kHz pass
/// band, 0.29 deg steps, 40 offsets.
pub fn paper_band() -> DesignTask {
    DesignTask::new(
        DesignMode::BandSelective,
        PulseParameters::new(5_000.0, 0.29).expect("static parameters"),
        5_000.0,
    )
    .with_pass_band(2_000.0)
}

/// Look up a preset by its CLI name.
pub fn by_name(name: &str) -> Option<DesignTask> {
    match name {
        "paper-inversion" => Some(paper_inversion()),
        "paper-excitation" => Some(paper_excitation()),
        "paper-band" => Some(paper_band()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_tasks() {
        for name in ["paper-inversion", "paper-excitation", "paper-band"] {
            let task = by_name(name).unwrap();
            task.validate().unwrap();
            assert_eq!(task.n_offsets, 40);
            assert_eq!(task.epsilon, 0.01);
            assert_eq!(task.max_steps, 200_000);
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn preset_step_durations() {
        assert_eq!(paper_inversion().params.dwell_s(), 0.57 / 3_600_000.0);
        assert_eq!(paper_band().params.dwell_s(), 0.29 / 1_800_000.0);
    }
}
