//! Stationary band-limited ground acceleration by the spectral representation
//! method.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_S0: f64 = 0.0141;
pub const DEFAULT_OMEGA_MAX: f64 = 35.5;
pub const DEFAULT_DURATION: f64 = 1.0;
pub const DEFAULT_DT: f64 = 0.02;
pub const DEFAULT_N_FREQ: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundMotion {
    pub dt: f64,
    /// `a(k·dt)` for `k = 0 .. T/dt − 1`.
    pub accel: Vec<f64>,
    pub s0: f64,
    pub omega_max: f64,
    pub duration: f64,
    pub n_freq: usize,
    pub seed: Option<u64>,
}

impl GroundMotion {
    pub fn len(&self) -> usize {
        self.accel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accel.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.accel.len()).map(move |k| k as f64 * self.dt)
    }

    /// Two-column comma-separated `(t, a)` table with a comment header.
    pub fn to_delimited(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# ground acceleration: S0 = {}, omega_max = {}, T = {}, dt = {}, n_freq = {}",
            self.s0, self.omega_max, self.duration, self.dt, self.n_freq
        );
        out.push_str("t,a\n");
        for (t, a) in self.times().zip(&self.accel) {
            let _ = writeln!(out, "{t},{a}");
        }
        out
    }
}

/// Number of time steps `T/dt`, which must be a positive integer.
pub fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(duration > 0.0) {
        return Err(Error::InvalidArgument("duration and time step must be positive".into()));
    }
    let exact = duration / dt;
    let n = exact.round();
    if (exact - n).abs() > 1e-9 * exact || n < 1.0 {
        return Err(Error::InvalidArgument(format!("T/dt = {exact} is not an integer")));
    }
    Ok(n as usize)
}

/// `a(t) = √2 Σ_k √(2 S₀ Δω) cos(ω_k t + φ_k)` with `Δω = ω_max/n_freq`,
/// `ω_k = (k − ½)Δω` and iid uniform phases.
pub fn srm_ground_motion<R: Rng + ?Sized>(
    s0: f64,
    omega_max: f64,
    duration: f64,
    dt: f64,
    n_freq: usize,
    rng: &mut R,
) -> Result<GroundMotion> {
    let n_steps = step_count(duration, dt)?;
    if n_freq == 0 || !(omega_max > 0.0) || !(s0 >= 0.0) {
        return Err(Error::InvalidArgument(
            "spectral representation needs n_freq ≥ 1, ω_max > 0 and S0 ≥ 0".into(),
        ));
    }
    let d_omega = omega_max / n_freq as f64;
    let amplitude = std::f64::consts::SQRT_2 * (2.0 * s0 * d_omega).sqrt();
    let phases: Vec<f64> = (0..n_freq).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
    let accel = (0..n_steps)
        .map(|j| {
            let t = j as f64 * dt;
            phases
                .iter()
                .enumerate()
                .map(|(k, phi)| {
                    let omega = (k as f64 + 0.5) * d_omega;
                    (omega * t + phi).cos()
                })
                .sum::<f64>()
                * amplitude
        })
        .collect();
    Ok(GroundMotion {
        dt,
        accel,
        s0,
        omega_max,
        duration,
        n_freq,
        seed: None,
    })
}
