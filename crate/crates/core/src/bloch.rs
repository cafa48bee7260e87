//! Rotating-frame spin-1/2 dynamics.
//!
//! A magnetization state is a unit 3-vector on the Bloch sphere. One pulse
//! step of RF phase `theta` at amplitude `A` (Hz) applied to a spin with
//! resonance offset `nu` (Hz) rotates the state right-handedly about the
//! effective field
//!
//! ```text
//! n  ~ (A cos(theta), A sin(theta), nu)
//! by   beta = 2*pi * sqrt(A^2 + nu^2) * dwell
//! ```
//!
//! The offset acts simultaneously with the RF within a step (exact tilted-axis
//! rotation, no split-step). With this convention an on-resonance x-phase
//! pulse of total flip 90 degrees maps (0,0,1) to (0,-1,0); every downstream
//! sign in the crate is anchored to that.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::Result;

/// Normalize an angle in radians into `[0, 2*pi)`.
pub fn wrap_phase(rad: f64) -> f64 {
    let p = rad.rem_euclid(TAU);
    // rem_euclid of a tiny negative value can round up to exactly TAU
    if p >= TAU { 0.0 } else { p }
}

/// Magnetization unit vector for a single offset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnetization {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl Magnetization {
    pub const NORTH: Magnetization = Magnetization {
        mx: 0.0,
        my: 0.0,
        mz: 1.0,
    };
    pub const SOUTH: Magnetization = Magnetization {
        mx: 0.0,
        my: 0.0,
        mz: -1.0,
    };
    pub const PLUS_Y: Magnetization = Magnetization {
        mx: 0.0,
        my: 1.0,
        mz: 0.0,
    };

    pub fn new(mx: f64, my: f64, mz: f64) -> Self {
        Magnetization { mx, my, mz }
    }

    pub fn norm(self) -> f64 {
        (self.mx * self.mx + self.my * self.my + self.mz * self.mz).sqrt()
    }

    /// In-plane magnitude `sqrt(mx^2 + my^2)`.
    pub fn transverse(self) -> f64 {
        (self.mx * self.mx + self.my * self.my).sqrt()
    }

    /// Azimuth of the in-plane component: `atan2(my, mx)`, in `(-pi, pi]`.
    pub fn phase(self) -> f64 {
        self.my.atan2(self.mx)
    }

    pub fn dot(self, other: Magnetization) -> f64 {
        self.mx * other.mx + self.my * other.my + self.mz * other.mz
    }
}

/// Constant-amplitude pulse step parameters.
///
/// The step duration is derived, not free: `dwell_s = flip / (360 * A)`, so a
/// value of this type always satisfies the flip-angle relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseParameters {
    amplitude_hz: f64,
    flip_per_step_deg: f64,
    dwell_s: f64,
}

impl PulseParameters {
    pub fn new(amplitude_hz: f64, flip_per_step_deg: f64) -> Result<Self> {
        let dwell_s = flip_to_duration(flip_per_step_deg, amplitude_hz)?;
        Ok(PulseParameters {
            amplitude_hz,
            flip_per_step_deg,
            dwell_s,
        })
    }

    pub fn amplitude_hz(self) -> f64 {
        self.amplitude_hz
    }

    pub fn flip_per_step_deg(self) -> f64 {
        self.flip_per_step_deg
    }

    pub fn dwell_s(self) -> f64 {
        self.dwell_s
    }

    /// Parameters with the RF amplitude multiplied by `scale` and the dwell
    /// kept bit-identical, i.e. the per-step flip scales with the amplitude.
    /// Used for amplitude-robustness evaluation.
    pub fn scaled_amplitude(self, scale: f64) -> Result<Self> {
        crate::error::require_positive("scale", scale)?;
        let amplitude_hz = self.amplitude_hz * scale;
        Ok(PulseParameters {
            amplitude_hz,
            flip_per_step_deg: 360.0 * amplitude_hz * self.dwell_s,
            dwell_s: self.dwell_s,
        })
    }
}

/// Duration of a rectangular pulse of the given on-resonance flip angle:
/// `flip_deg / (360 * amplitude_hz)` seconds, evaluated exactly in IEEE
/// arithmetic.
pub fn flip_to_duration(flip_deg: f64, amplitude_hz: f64) -> Result<f64> {
    crate::error::require_positive("flip_deg", flip_deg)?;
    crate::error::require_positive("amplitude_hz", amplitude_hz)?;
    Ok(flip_deg / (360.0 * amplitude_hz))
}

/// An ordered list of per-step RF phases at constant amplitude and dwell.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    params: PulseParameters,
    phases_rad: Vec<f64>,
    /// Free-form creation record: design mode, band parameters, settings.
    pub metadata: BTreeMap<String, String>,
}

impl PulseSequence {
    /// Build a sequence; every phase is wrapped into `[0, 2*pi)`.
    pub fn new(params: PulseParameters, phases_rad: Vec<f64>) -> Self {
        let phases_rad = phases_rad.into_iter().map(wrap_phase).collect();
        PulseSequence {
            params,
            phases_rad,
            metadata: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> PulseParameters {
        self.params
    }

    pub fn phases_rad(&self) -> &[f64] {
        &self.phases_rad
    }

    pub fn len(&self) -> usize {
        self.phases_rad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases_rad.is_empty()
    }

    /// Total duration: `len * dwell_s`.
    pub fn duration_s(&self) -> f64 {
        self.phases_rad.len() as f64 * self.params.dwell_s
    }

    pub(crate) fn push_phase(&mut self, rad: f64) {
        self.phases_rad.push(wrap_phase(rad));
    }
}

fn rotate_about(m: Magnetization, nx: f64, ny: f64, nz: f64, beta: f64) -> Magnetization {
    let (sb, cb) = beta.sin_cos();
    let k = 1.0 - cb;
    let dot = nx * m.mx + ny * m.my + nz * m.mz;
    let cx = ny * m.mz - nz * m.my;
    let cy = nz * m.mx - nx * m.mz;
    let cz = nx * m.my - ny * m.mx;
    Magnetization {
        mx: m.mx * cb + cx * sb + nx * dot * k,
        my: m.my * cb + cy * sb + ny * dot * k,
        mz: m.mz * cb + cz * sb + nz * dot * k,
    }
}

/// Evolve `m` through one pulse step of the given phase at the given offset.
///
/// Rodrigues rotation `m' = m cos(b) + (n x m) sin(b) + n (n.m)(1 - cos(b))`
/// about the unit effective field; preserves the norm to machine precision.
pub fn rotate_step(
    m: Magnetization,
    params: &PulseParameters,
    phase_rad: f64,
    offset_hz: f64,
) -> Magnetization {
    let a = params.amplitude_hz;
    let field = (a * a + offset_hz * offset_hz).sqrt();
    let beta = TAU * field * params.dwell_s;
    let (sp, cp) = phase_rad.sin_cos();
    rotate_about(m, a * cp / field, a * sp / field, offset_hz / field, beta)
}

/// Apply every step of `seq` in order (first phase first) to `m0`.
pub fn propagate(seq: &PulseSequence, offset_hz: f64, m0: Magnetization) -> Magnetization {
    let mut m = m0;
    for &theta in &seq.phases_rad {
        m = rotate_step(m, &seq.params, theta, offset_hz);
    }
    m
}

/// A 3x3 rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Right-handed rotation by `angle` about the given axis (need not be
    /// normalized here; callers pass unit axes).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let [nx, ny, nz] = axis;
        let (s, c) = angle.sin_cos();
        let k = 1.0 - c;
        Rotation {
            m: [
                [c + nx * nx * k, nx * ny * k - nz * s, nx * nz * k + ny * s],
                [ny * nx * k + nz * s, c + ny * ny * k, ny * nz * k - nx * s],
                [nz * nx * k - ny * s, nz * ny * k + nx * s, c + nz * nz * k],
            ],
        }
    }

    /// Rotation about +z by `angle`.
    pub fn about_z(angle: f64) -> Self {
        Rotation::from_axis_angle([0.0, 0.0, 1.0], angle)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, v: Magnetization) -> Magnetization {
        let m = &self.m;
        Magnetization {
            mx: m[0][0] * v.mx + m[0][1] * v.my + m[0][2] * v.mz,
            my: m[1][0] * v.mx + m[1][1] * v.my + m[1][2] * v.mz,
            mz: m[2][0] * v.mx + m[2][1] * v.my + m[2][2] * v.mz,
        }
    }

    /// Matrix product `self * other` (apply `other` first, then `self`).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let a = &self.m;
        let b = &other.m;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Rotation { m: out }
    }

    /// Inverse of a rotation is its transpose.
    pub fn inverse(&self) -> Rotation {
        let m = &self.m;
        Rotation {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Max absolute elementwise deviation from another rotation.
    pub fn distance(&self, other: &Rotation) -> f64 {
        let mut d = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

/// Total propagator of `seq` at the given offset, as a rotation matrix.
///
/// Acting on any initial state agrees with [`propagate`]; the matrix route
/// composes per-step axis-angle rotations instead of folding the state.
pub fn propagator(seq: &PulseSequence, offset_hz: f64) -> Rotation {
    let a = seq.params.amplitude_hz;
    let field = (a * a + offset_hz * offset_hz).sqrt();
    let beta = TAU * field * seq.params.dwell_s;
    let mut acc = Rotation::IDENTITY;
    for &theta in &seq.phases_rad {
        let (sp, cp) = theta.sin_cos();
        let step =
            Rotation::from_axis_angle([a * cp / field, a * sp / field, offset_hz / field], beta);
        acc = step.compose(&acc);
    }
    acc
}
