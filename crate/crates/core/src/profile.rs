//! Evaluate a pulse over a dense offset grid and summarize its quality.

use crate::bloch::{Magnetization, PulseSequence, propagate};
use crate::error::{Error, Result};

/// Default dense evaluation grid size (roughly 10x a 40-point design grid).
pub const DEFAULT_EVAL_POINTS: usize = 401;

/// Per-offset final magnetization after applying a pulse from a common
/// initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub offsets_hz: Vec<f64>,
    pub mx: Vec<f64>,
    pub my: Vec<f64>,
    pub mz: Vec<f64>,
    pub initial_state: Magnetization,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.offsets_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets_hz.is_empty()
    }

    pub fn magnetization(&self, i: usize) -> Magnetization {
        Magnetization::new(self.mx[i], self.my[i], self.mz[i])
    }

    pub fn transverse(&self, i: usize) -> f64 {
        (self.mx[i] * self.mx[i] + self.my[i] * self.my[i]).sqrt()
    }

    pub fn phase_rad(&self, i: usize) -> f64 {
        self.my[i].atan2(self.mx[i])
    }
}

/// Uniform evaluation grid over `[-band_hz, band_hz]`, endpoints included.
/// Unlike the design grid this one has no symmetry or parity requirement.
pub fn eval_grid(band_hz: f64, points: usize) -> Result<Vec<f64>> {
    crate::error::require_positive("band_hz", band_hz)?;
    if points < 2 {
        return Err(Error::invalid("points", "need at least 2 grid points"));
    }
    // mirrored like the design grid so both endpoints land exactly on the
    // band edges; odd counts get a zero point
    let spacing = 2.0 * band_hz / (points - 1) as f64;
    let half = points / 2;
    let pos: Vec<f64> = (0..half).map(|j| band_hz - j as f64 * spacing).collect();
    let mut grid = Vec::with_capacity(points);
    grid.extend(pos.iter().map(|&v| -v));
    if points % 2 == 1 {
        grid.push(0.0);
    }
    grid.extend(pos.iter().rev());
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid(
            "grid",
            "offsets must be strictly increasing",
        ));
    }
    Ok(())
}

/// Propagate `m0` through `seq` independently at every grid offset.
pub fn sweep(seq: &PulseSequence, grid: &[f64], m0: Magnetization) -> Result<Profile> {
    check_grid(grid)?;
    let finals: Vec<Magnetization> = grid.iter().map(|&nu| propagate(seq, nu, m0)).collect();
    Ok(collect_profile(grid, finals, m0))
}

/// [`sweep`] with the per-offset propagation run on a thread pool. Offsets
/// are independent, so the output is bitwise identical to the serial sweep.
#[cfg(feature = "parallel")]
pub fn sweep_parallel(seq: &PulseSequence, grid: &[f64], m0: Magnetization) -> Result<Profile> {
    use rayon::prelude::*;
    check_grid(grid)?;
    let finals: Vec<Magnetization> = grid.par_iter().map(|&nu| propagate(seq, nu, m0)).collect();
    Ok(collect_profile(grid, finals, m0))
}

fn collect_profile(grid: &[f64], finals: Vec<Magnetization>, m0: Magnetization) -> Profile {
    let mut p = Profile {
        offsets_hz: grid.to_vec(),
        mx: Vec::with_capacity(grid.len()),
        my: Vec::with_capacity(grid.len()),
        mz: Vec::with_capacity(grid.len()),
        initial_state: m0,
    };
    for m in finals {
        p.mx.push(m.mx);
        p.my.push(m.my);
        p.mz.push(m.mz);
    }
    p
}

/// Scalar quality summary of a profile over its design band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileMetrics {
    /// Max mz over the band (pass band when one is given): -1 is a perfect
    /// inversion everywhere.
    pub worst_inversion: f64,
    /// Min transverse magnitude over the band (pass band when given).
    pub min_transverse: f64,
    /// Max - min of the unwrapped transverse phase, degrees, restricted to
    /// points with transverse magnitude > 0.1.
    pub phase_spread_deg: f64,
    /// Max transverse magnitude over the stop band (pass band given only).
    pub stopband_leakage: Option<f64>,
    /// Max - min transverse magnitude over the pass band (pass band given
    /// only).
    pub passband_ripple: Option<f64>,
}

/// Phase is meaningless near the poles; spread ignores points below this
/// transverse magnitude.
const PHASE_SPREAD_MIN_TRANSVERSE: f64 = 0.1;

/// Compute [`ProfileMetrics`] over `[-band_hz, band_hz]`. With `pass_hz`,
/// worst-inversion / min-transverse / phase-spread are taken over the pass
/// band and the leakage and ripple fields are filled from the stop band
/// (`pass_hz < |offset| <= band_hz`) and pass band respectively.
pub fn metrics(profile: &Profile, band_hz: f64, pass_hz: Option<f64>) -> Result<ProfileMetrics> {
    if profile.is_empty() {
        return Err(Error::invalid("profile", "must not be empty"));
    }
    crate::error::require_positive("band_hz", band_hz)?;
    let lo = *profile.offsets_hz.first().unwrap();
    let hi = *profile.offsets_hz.last().unwrap();
    if -band_hz < lo || band_hz > hi {
        return Err(Error::invalid(
            "band_hz",
            format!("band [-{band_hz}, {band_hz}] exceeds grid coverage [{lo}, {hi}]"),
        ));
    }
    if let Some(c) = pass_hz
        && !(c.is_finite() && c > 0.0 && c <= band_hz)
    {
        return Err(Error::invalid(
            "pass_hz",
            format!("must satisfy 0 < pass_hz <= band_hz, got {c}"),
        ));
    }

    let in_band = |nu: f64| nu.abs() <= band_hz;
    let in_pass = |nu: f64| pass_hz.map(|c| nu.abs() <= c).unwrap_or(true);

    let mut worst_inversion = f64::NEG_INFINITY;
    let mut min_transverse = f64::INFINITY;
    let mut pass_tr_min = f64::INFINITY;
    let mut pass_tr_max = f64::NEG_INFINITY;
    let mut stop_leak = f64::NEG_INFINITY;
    let mut any_primary = false;
    let mut any_stop = false;

    // one pass for the magnitude metrics
    for i in 0..profile.len() {
        let nu = profile.offsets_hz[i];
        if !in_band(nu) {
            continue;
        }
        let tr = profile.transverse(i);
        if in_pass(nu) {
            any_primary = true;
            worst_inversion = worst_inversion.max(profile.mz[i]);
            min_transverse = min_transverse.min(tr);
            pass_tr_min = pass_tr_min.min(tr);
            pass_tr_max = pass_tr_max.max(tr);
        } else {
            any_stop = true;
            stop_leak = stop_leak.max(tr);
        }
    }
    if !any_primary {
        return Err(Error::invalid(
            "band_hz",
            "no grid points fall inside the requested band",
        ));
    }

    // unwrapped phase spread over the primary region
    let mut spread = 0.0f64;
    let mut prev: Option<f64> = None;
    let mut lo_phase = f64::INFINITY;
    let mut hi_phase = f64::NEG_INFINITY;
    let mut phase_points = 0usize;
    for i in 0..profile.len() {
        let nu = profile.offsets_hz[i];
        if !in_band(nu) || !in_pass(nu) || profile.transverse(i) <= PHASE_SPREAD_MIN_TRANSVERSE {
            continue;
        }
        let raw = profile.phase_rad(i);
        let unwrapped = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p;
                while d > std::f64::consts::PI {
                    d -= std::f64::consts::TAU;
                }
                while d < -std::f64::consts::PI {
                    d += std::f64::consts::TAU;
                }
                p + d
            }
        };
        prev = Some(unwrapped);
        lo_phase = lo_phase.min(unwrapped);
        hi_phase = hi_phase.max(unwrapped);
        phase_points += 1;
    }
    if phase_points >= 2 {
        spread = (hi_phase - lo_phase).to_degrees();
    }

    Ok(ProfileMetrics {
        worst_inversion,
        min_transverse,
        phase_spread_deg: spread,
        stopband_leakage: if pass_hz.is_some() && any_stop {
            Some(stop_leak)
        } else {
            None
        },
        passband_ripple: if pass_hz.is_some() {
            Some(pass_tr_max - pass_tr_min)
        } else {
            None
        },
    })
}

/// Re-evaluate the pulse with the RF amplitude multiplied by each scale
/// (dwell unchanged, so the per-step flip scales along). Diagnostic only.
pub fn amplitude_robustness_sweep(
    seq: &PulseSequence,
    grid: &[f64],
    m0: Magnetization,
    scales: &[f64],
) -> Result<Vec<Profile>> {
    let mut out = Vec::with_capacity(scales.len());
    for &scale in scales {
        let params = seq.params().scaled_amplitude(scale)?;
        let mut scaled = PulseSequence::new(params, seq.phases_rad().to_vec());
        scaled.metadata = seq.metadata.clone();
        out.push(sweep(&scaled, grid, m0)?);
    }
    Ok(out)
}
