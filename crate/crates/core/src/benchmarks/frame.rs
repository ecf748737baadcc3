//! Two-story linear shear building under base acceleration.
//!
//! Unit floor masses, stiffness `K = [[K₁+K₂, −K₂], [−K₂, K₂]]`, classical
//! modal damping `ξ` in both modes. Modal equations are integrated with the
//! average-acceleration Newmark scheme (β = 1/4, γ = 1/2).

use serde::{Deserialize, Serialize};

use super::ground_motion::GroundMotion;
use crate::error::{Error, Result};

/// Failure when the roof displacement reaches this value.
pub const UMAX_LIMIT: f64 = 0.022;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub k1: f64,
    pub k2: f64,
    pub xi: f64,
}

impl FrameParams {
    pub fn from_slice(x: &[f64]) -> Self {
        FrameParams {
            k1: x[0],
            k2: x[1],
            xi: x[2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && self.k2 > 0.0) || !self.k1.is_finite() || !self.k2.is_finite() {
            return Err(Error::Model(format!(
                "stiffness matrix is not positive definite (K1 = {}, K2 = {})",
                self.k1, self.k2
            )));
        }
        if !(self.xi >= 0.0 && self.xi < 1.0) {
            return Err(Error::Model(format!("damping ratio {} outside [0, 1)", self.xi)));
        }
        Ok(())
    }
}

/// Natural frequencies (ascending) and unit-norm mode shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modes {
    pub omega: [f64; 2],
    /// `shapes[i]` is mode `i` as (floor 1, floor 2).
    pub shapes: [[f64; 2]; 2],
}

impl Modes {
    /// `Γ_i = φ_iᵀ M 1` for unit-norm shapes and `M = I`.
    pub fn participation(&self) -> [f64; 2] {
        [self.shapes[0][0] + self.shapes[0][1], self.shapes[1][0] + self.shapes[1][1]]
    }
}

/// Closed-form eigen-decomposition of the 2×2 stiffness matrix.
pub fn modes(k1: f64, k2: f64) -> Result<Modes> {
    let p = FrameParams { k1, k2, xi: 0.0 };
    p.validate()?;
    let (a, b, d) = (k1 + k2, -k2, k2);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    // the smaller root via the product of roots to avoid cancellation
    let lambda2 = mean + radius;
    let lambda1 = (a * d - b * b) / lambda2;
    let shape = |lambda: f64| {
        let (v1, v2) = (b, lambda - a);
        let n = v1.hypot(v2);
        let s = if v2 < 0.0 { -1.0 } else { 1.0 };
        [s * v1 / n, s * v2 / n]
    };
    Ok(Modes {
        omega: [lambda1.sqrt(), lambda2.sqrt()],
        shapes: [shape(lambda1), shape(lambda2)],
    })
}

/// Displacement and velocity histories of a unit-mass oscillator
/// `ü + 2ξω u̇ + ω² u = f(t)` sampled at `t_k = k·dt`.
pub fn integrate_sdof(omega: f64, xi: f64, force: &[f64], dt: f64, u0: f64, v0: f64) -> (Vec<f64>, Vec<f64>) {
    let (beta, gamma) = (0.25, 0.5);
    let c = 2.0 * xi * omega;
    let k = omega * omega;
    let n = force.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    if n == 0 {
        return (u, v);
    }
    let mut ui = u0;
    let mut vi = v0;
    let mut ai = force[0] - c * vi - k * ui;
    u.push(ui);
    v.push(vi);
    let a1 = 1.0 / (beta * dt * dt) + gamma / (beta * dt) * c;
    let a2 = 1.0 / (beta * dt) + (gamma / beta - 1.0) * c;
    let a3 = (1.0 / (2.0 * beta) - 1.0) + dt * (gamma / (2.0 * beta) - 1.0) * c;
    let k_hat = k + a1;
    for &f in &force[1..] {
        let p_hat = f + a1 * ui + a2 * vi + a3 * ai;
        let un = p_hat / k_hat;
        let vn = gamma / (beta * dt) * (un - ui) + (1.0 - gamma / beta) * vi + dt * (1.0 - gamma / (2.0 * beta)) * ai;
        let an = (un - ui) / (beta * dt * dt) - vi / (beta * dt) - (1.0 / (2.0 * beta) - 1.0) * ai;
        ui = un;
        vi = vn;
        ai = an;
        u.push(ui);
        v.push(vi);
    }
    (u, v)
}

/// Floor displacement and velocity histories relative to the ground.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameHistory {
    pub u: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

/// Response to base acceleration `accel` from initial state `(u0, v0)`.
pub fn frame_history(p: &FrameParams, accel: &[f64], dt: f64, u0: [f64; 2], v0: [f64; 2]) -> Result<FrameHistory> {
    p.validate()?;
    let m = modes(p.k1, p.k2)?;
    let gamma = m.participation();
    let n = accel.len();
    let mut u = vec![[0.0; 2]; n];
    let mut v = vec![[0.0; 2]; n];
    for ((phi, g), omega) in m.shapes.iter().zip(gamma).zip(m.omega) {
        let force: Vec<f64> = accel.iter().map(|a| -g * a).collect();
        let q0 = phi[0] * u0[0] + phi[1] * u0[1];
        let qd0 = phi[0] * v0[0] + phi[1] * v0[1];
        let (q, qd) = integrate_sdof(omega, p.xi, &force, dt, q0, qd0);
        for k in 0..n {
            for dof in 0..2 {
                u[k][dof] += phi[dof] * q[k];
                v[k][dof] += phi[dof] * qd[k];
            }
        }
    }
    Ok(FrameHistory { u, v })
}

/// Peak absolute roof displacement under the record, from rest.
pub fn frame_umax(p: &FrameParams, gm: &GroundMotion) -> Result<f64> {
    let h = frame_history(p, &gm.accel, gm.dt, [0.0; 2], [0.0; 2])?;
    Ok(h.u.iter().map(|u| u[1].abs()).fold(0.0, f64::max))
}

/// `0.022 − u_max` for `x = (K₁, K₂, ξ)`.
pub fn g_frame(x: &[f64], gm: &GroundMotion) -> Result<f64> {
    Ok(UMAX_LIMIT - frame_umax(&FrameParams::from_slice(x), gm)?)
}
