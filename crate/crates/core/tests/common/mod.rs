//! Shared test helpers: a deterministic PRNG and an independent
//! quaternion-composition oracle for pulse propagation. The oracle rebuilds
//! each step's axis and angle from the raw parameters and composes unit
//! quaternions, sharing no code with the library's Rodrigues kernel.

#![allow(dead_code)]

use std::f64::consts::TAU;

use fbpulse_core::{Magnetization, PulseParameters, PulseSequence};

/// splitmix64: tiny, seedable, good enough for test-case generation.
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform point on the unit sphere.
    pub fn unit_vector(&mut self) -> Magnetization {
        let z = self.range(-1.0, 1.0);
        let phi = self.range(0.0, TAU);
        let r = (1.0 - z * z).sqrt();
        Magnetization::new(r * phi.cos(), r * phi.sin(), z)
    }

    pub fn random_sequence(&mut self, params: PulseParameters, len: usize) -> PulseSequence {
        let phases = (0..len).map(|_| self.range(0.0, TAU)).collect();
        PulseSequence::new(params, phases)
    }
}

/// Unit quaternion (w, x, y, z).
#[derive(Clone, Copy, Debug)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Quat {
        let h = 0.5 * angle;
        let (s, c) = h.sin_cos();
        Quat {
            w: c,
            x: axis[0] * s,
            y: axis[1] * s,
            z: axis[2] * s,
        }
    }

    /// Hamilton product.
    pub fn mul(self, r: Quat) -> Quat {
        Quat {
            w: self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            x: self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            y: self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            z: self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        }
    }

    pub fn conjugate(self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Rotate a vector: q v q*.
    pub fn rotate(self, v: Magnetization) -> Magnetization {
        let p = Quat {
            w: 0.0,
            x: v.mx,
            y: v.my,
            z: v.mz,
        };
        let r = self.mul(p).mul(self.conjugate());
        Magnetization::new(r.x, r.y, r.z)
    }
}

/// Quaternion for one pulse step, rebuilt from raw parameters.
pub fn step_quat(params: &PulseParameters, phase_rad: f64, offset_hz: f64) -> Quat {
    let a = params.amplitude_hz();
    let omega = (a * a + offset_hz * offset_hz).sqrt();
    let angle = TAU * omega * params.dwell_s();
    let axis = [
        a * phase_rad.cos() / omega,
        a * phase_rad.sin() / omega,
        offset_hz / omega,
    ];
    Quat::from_axis_angle(axis, angle)
}

/// Total propagator of a sequence as a single composed quaternion
/// (first phase applied first).
pub fn sequence_quat(seq: &PulseSequence, offset_hz: f64) -> Quat {
    let mut acc = Quat::IDENTITY;
    for &theta in seq.phases_rad() {
        acc = step_quat(&seq.params(), theta, offset_hz).mul(acc);
    }
    acc
}

/// Propagate via the quaternion route.
pub fn propagate_oracle(seq: &PulseSequence, offset_hz: f64, m0: Magnetization) -> Magnetization {
    sequence_quat(seq, offset_hz).rotate(m0)
}

pub fn component_distance(a: Magnetization, b: Magnetization) -> f64 {
    (a.mx - b.mx)
        .abs()
        .max((a.my - b.my).abs())
        .max((a.mz - b.mz).abs())
}
