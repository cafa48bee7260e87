//! Acceptance suite: one test per shipping criterion, each printing a single
//! summary line (visible with `--nocapture`, and always shown for failures).
//!
//! Run with:
//!
//! ```text
//! cargo test -p fbpulse-core --test acceptance -- --nocapture
//! ```

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;
use std::time::Instant;

use common::Rng64;
use fbpulse_core::{
    DesignMode, DesignTask, Magnetization, PulseParameters, PulseRecord, PulseSequence, Rotation,
    design, design_band_selective, design_excitation, design_with_offsets, eval_grid,
    flip_to_duration, metrics, plot, presets, propagator, read_pulse_json, reverse_with_pi,
    rotate_step, sweep, sweep_parallel, write_pulse_json, write_shape_file,
};

fn report(n: u32, name: &str, detail: &str, ok: bool) {
    println!(
        "criterion {n} ({name}): {detail} -> {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

#[test]
fn criterion_1_kernel_exactness() {
    let start = Instant::now();
    let p = PulseParameters::new(10_000.0, 90.0).unwrap();
    let m = rotate_step(Magnetization::NORTH, &p, 0.0, 0.0);
    let handed_err = m.mx.abs().max((m.my + 1.0).abs()).max(m.mz.abs());

    let mut rng = Rng64::new(0xacce_0001);
    let fine = PulseParameters::new(10_000.0, 0.57).unwrap();
    let mut state = rng.unit_vector();
    let mut worst_norm_err = 0.0f64;
    for _ in 0..100_000 {
        let theta = rng.range(0.0, TAU);
        let nu = rng.range(-20_000.0, 20_000.0);
        state = rotate_step(state, &fine, theta, nu);
        worst_norm_err = worst_norm_err.max((state.norm() - 1.0).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "kernel exactness",
        &format!(
            "90x handedness error {handed_err:.2e} (<=1e-12), worst norm drift {worst_norm_err:.2e} \
             over 1e5 random steps (<=1e-9), runtime {elapsed:.2}s (<1s)"
        ),
        handed_err <= 1e-12 && worst_norm_err <= 1e-9 && elapsed < 1.0,
    );
}

#[test]
fn criterion_2_reversal_identity() {
    let start = Instant::now();
    let mut rng = Rng64::new(0xacce_0002);
    let p = PulseParameters::new(10_000.0, 3.0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let seq = rng.random_sequence(p, 100);
        let nu = rng.range(-20_000.0, 20_000.0);
        let composed = propagator(&reverse_with_pi(&seq), nu).compose(&propagator(&seq, -nu));
        worst = worst.max(composed.distance(&Rotation::IDENTITY));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "reversal identity",
        &format!(
            "max |U_rev(nu)*U(-nu) - I| = {worst:.2e} over 100 random sequences (<=1e-9), \
             runtime {elapsed:.2}s (<5s)"
        ),
        worst <= 1e-9 && elapsed < 5.0,
    );
}

#[test]
fn criterion_3_duration_arithmetic() {
    let dur_inv = flip_to_duration(0.57, 10_000.0).unwrap() * 18907.0;
    let dur_band = flip_to_duration(0.29, 5_000.0).unwrap() * 41812.0;
    let dev_inv_stated = (dur_inv - 2.994e-3).abs() / 2.994e-3;
    let dev_band_stated = (dur_band - 6.736e-3).abs() / 6.736e-3;
    let dev_inv_rounded = (dur_inv - 3.0e-3).abs() / 3.0e-3;
    let dev_band_rounded = (dur_band - 6.7e-3).abs() / 6.7e-3;
    report(
        3,
        "duration arithmetic",
        &format!(
            "18907 x dt(0.57deg, 10kHz) = {:.4} ms ({:.3}% from 2.994 ms, {:.3}% from 3 ms); \
             41812 x dt(0.29deg, 5kHz) = {:.4} ms ({:.3}% from 6.736 ms; {:.3}% from the rounded \
             6.7 ms report, i.e. within its 0.05 ms rounding band)",
            dur_inv * 1e3,
            dev_inv_stated * 100.0,
            dev_inv_rounded * 100.0,
            dur_band * 1e3,
            dev_band_stated * 100.0,
            dev_band_rounded * 100.0,
        ),
        dev_inv_stated <= 0.005
            && dev_band_stated <= 0.005
            && dev_inv_rounded <= 0.005
            && (dur_band - 6.7e-3).abs() <= 0.05e-3,
    );
}

#[test]
fn criterion_4_broadband_inversion() {
    let task = presets::paper_inversion();
    let rep = design(&task).unwrap();
    let duration_ms = rep.duration_s * 1e3;
    let converged_ok = rep.converged && rep.steps <= 200_000;
    let duration_ok = (1.5..=6.0).contains(&duration_ms);

    let grid = eval_grid(20_000.0, 401).unwrap();
    let profile = sweep(&rep.sequence, &grid, Magnetization::NORTH).unwrap();
    let mut worst_mz = f64::NEG_INFINITY;
    let mut worst_at = 0.0;
    let mut n_ok = 0usize;
    for i in 0..profile.len() {
        if profile.mz[i] <= -0.9 {
            n_ok += 1;
        }
        if profile.mz[i] > worst_mz {
            worst_mz = profile.mz[i];
            worst_at = profile.offsets_hz[i];
        }
    }
    let dense_ok = worst_mz <= -0.9;
    report(
        4,
        "broadband inversion",
        &format!(
            "steps={} duration={duration_ms:.3} ms (in [1.5,6]: {duration_ok}) converged={} \
             worst design-offset z={:.4}; dense 401-point sweep: mz<=-0.9 at {n_ok}/401 points, \
             max mz={worst_mz:+.4} at {worst_at:.0} Hz (threshold: every point)",
            rep.steps,
            rep.converged,
            rep.worst_final_z(),
        ),
        converged_ok && duration_ok && dense_ok,
    );
}

#[test]
fn criterion_5_broadband_excitation() {
    let task = presets::paper_excitation();
    let rep = design_excitation(&task).unwrap();
    let grid = eval_grid(20_000.0, 401).unwrap();
    let profile = sweep(&rep.sequence, &grid, Magnetization::NORTH).unwrap();
    let m = metrics(&profile, 20_000.0, None).unwrap();
    let mut min_tr = f64::INFINITY;
    let mut min_at = 0.0;
    for i in 0..profile.len() {
        let tr = profile.transverse(i);
        if tr < min_tr {
            min_tr = tr;
            min_at = profile.offsets_hz[i];
        }
    }
    let transverse_ok = min_tr >= 0.9;
    let spread_ok = m.phase_spread_deg <= 15.0;
    report(
        5,
        "broadband excitation",
        &format!(
            "steps={} converged={}; reversed pulse from north over 401 points: \
             min transverse={min_tr:.4} at {min_at:.0} Hz (>=0.9), \
             unwrapped phase spread={:.2} deg (<=15)",
            rep.steps, rep.converged, m.phase_spread_deg
        ),
        rep.converged && transverse_ok && spread_ok,
    );
}

#[test]
fn criterion_6_band_selective_excitation() {
    let task = presets::paper_band();
    let rep = design_band_selective(&task).unwrap();
    let grid = eval_grid(5_000.0, 401).unwrap();
    let profile = sweep(&rep.sequence, &grid, Magnetization::NORTH).unwrap();

    // pass band on the dense grid
    let mut pass_min_tr = f64::INFINITY;
    // stop band on the dense grid outside the +-0.5 kHz transition margin
    let mut stop_max_tr = f64::NEG_INFINITY;
    // transition margin, reported but not thresholded
    let mut margin_max_tr = f64::NEG_INFINITY;
    for i in 0..profile.len() {
        let nu = profile.offsets_hz[i].abs();
        let tr = profile.transverse(i);
        if nu <= 2_000.0 {
            pass_min_tr = pass_min_tr.min(tr);
        } else if nu > 2_500.0 {
            stop_max_tr = stop_max_tr.max(tr);
        } else {
            margin_max_tr = margin_max_tr.max(tr);
        }
    }

    // design stop-band offsets exactly
    let stop_offsets: Vec<f64> = rep
        .offsets_hz
        .iter()
        .copied()
        .filter(|nu| nu.abs() > 2_000.0)
        .collect();
    let stop_profile = sweep(&rep.sequence, &stop_offsets, Magnetization::NORTH).unwrap();
    let mut design_stop_min_mz = f64::INFINITY;
    let mut design_stop_max_tr = f64::NEG_INFINITY;
    for i in 0..stop_profile.len() {
        design_stop_min_mz = design_stop_min_mz.min(stop_profile.mz[i]);
        design_stop_max_tr = design_stop_max_tr.max(stop_profile.transverse(i));
    }

    let pass_ok = pass_min_tr >= 0.9;
    let design_stop_ok = design_stop_min_mz >= 0.98 && design_stop_max_tr <= 0.1;
    let dense_stop_ok = stop_max_tr <= 0.2;
    report(
        6,
        "band-selective excitation",
        &format!(
            "steps={} converged={}; dense pass band |nu|<=2k: min transverse={pass_min_tr:.4} \
             (>=0.9); design stop offsets: min mz={design_stop_min_mz:.4} (>=0.98), \
             max transverse={design_stop_max_tr:.4} (<=0.1); dense stop band beyond 2.5k: \
             max transverse={stop_max_tr:.4} (<=0.2); transition margin 2.0-2.5k: \
             max transverse={margin_max_tr:.4} (reported only)",
            rep.steps, rep.converged
        ),
        pass_ok && design_stop_ok && dense_stop_ok,
    );
}

#[test]
fn criterion_7_degenerate_case_oracle() {
    let task = DesignTask {
        epsilon: 0.01,
        ..DesignTask::new(
            DesignMode::Inversion,
            PulseParameters::new(10_000.0, 0.5).unwrap(),
            1.0,
        )
    };
    let rep = design_with_offsets(&task, vec![0.0]).unwrap();
    let want = ((-(1.0 - task.epsilon)).acos().to_degrees() / 0.5).ceil() as usize;
    report(
        7,
        "degenerate-case oracle",
        &format!(
            "single on-resonance offset converged={} in {} steps, closed form gives {want} \
             (= ceil(171.89/0.5) = 344)",
            rep.converged, rep.steps
        ),
        rep.converged && rep.steps == want && want == 344,
    );
}

fn golden_check(name: &str, got: &str) -> bool {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("REGEN_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, got).unwrap();
    }
    match std::fs::read_to_string(&path) {
        Ok(want) => want == got,
        Err(_) => false,
    }
}

#[test]
fn criterion_8_round_trip_and_golden_files() {
    // bitwise JSON round-trip of a real (small) design
    let mut task = DesignTask::new(
        DesignMode::Excitation,
        PulseParameters::new(10_000.0, 1.0).unwrap(),
        1_000.0,
    );
    task.n_offsets = 2;
    let rep = design_excitation(&task).unwrap();
    let record = PulseRecord::from_report(&rep);
    let text = write_pulse_json(&record);
    let back = read_pulse_json(&text).unwrap();
    let json_ok = back.sequence.phases_rad() == rep.sequence.phases_rad() && back == record;

    // fixed five-step sequence for the golden shape file
    let params = PulseParameters::new(10_000.0, 90.0).unwrap();
    let mut seq = PulseSequence::new(params, vec![0.0, FRAC_PI_2, PI, 1.5 * PI, 1.0]);
    seq.metadata
        .insert("mode".to_string(), "inversion".to_string());
    let shape_ok = golden_check("shape_5step.jcamp", &write_shape_file(&seq).unwrap());

    let grid = eval_grid(10_000.0, 21).unwrap();
    let profile = sweep(&seq, &grid, Magnetization::NORTH).unwrap();
    let profile_ok = golden_check(
        "profile.svg",
        &plot::profile_svg(&profile, "fbpulse profile"),
    );
    let phase_ok = golden_check(
        "phase_series.svg",
        &plot::phase_series_svg(&seq, "fbpulse phase series"),
    );
    report(
        8,
        "round-trip and golden files",
        &format!(
            "json bitwise round-trip={json_ok}, shape golden={shape_ok}, \
             profile svg golden={profile_ok}, phase svg golden={phase_ok}"
        ),
        json_ok && shape_ok && profile_ok && phase_ok,
    );
}

#[test]
fn criterion_9_determinism() {
    let task = presets::paper_inversion();
    let a = design(&task).unwrap();
    let b = design(&task).unwrap();
    let runs_identical = a.sequence.phases_rad() == b.sequence.phases_rad();

    let grid = eval_grid(20_000.0, 401).unwrap();
    let serial = sweep(&a.sequence, &grid, Magnetization::NORTH).unwrap();
    let parallel = sweep_parallel(&a.sequence, &grid, Magnetization::NORTH).unwrap();
    let sweeps_identical = serial == parallel;
    report(
        9,
        "determinism",
        &format!(
            "two preset runs identical={runs_identical} ({} phases), \
             parallel vs serial sweep bitwise identical={sweeps_identical}",
            a.sequence.len()
        ),
        runs_identical && sweeps_identical,
    );
}
