//! Linearised head-drift model.
//!
//! While floating, the head obeys `m x'' + c x' + k x = d` with effective
//! stiffness `k = K_t I - K_b`, a constant disturbance `d` and initial state
//! `x(0) = x'(0) = 0`. This module evaluates the step response in closed form,
//! integrates it numerically as a cross-check, and finds the longest wake-up
//! period for which the drift stays inside a given clearance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftParams {
    /// Actuator-head assembly mass.
    pub mass: f64,
    /// Viscous coefficient.
    pub viscous: f64,
    /// Flex-bias stiffness `K_b`.
    pub k_bias: f64,
    /// Torque constant `K_t`.
    pub k_torque: f64,
    /// Bias-cancelling VCM current `I`.
    pub current: f64,
    /// Constant external disturbance `d`.
    pub disturbance: f64,
}

impl DriftParams {
    /// Reference parameter set: critically damped with unit steady state.
    pub const DEMO: DriftParams = DriftParams {
        mass: 1.0,
        viscous: 2.0,
        k_bias: 1.0,
        k_torque: 2.0,
        current: 1.0,
        disturbance: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("viscous", self.viscous),
            ("k_bias", self.k_bias),
            ("k_torque", self.k_torque),
            ("current", self.current),
            ("disturbance", self.disturbance),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
        if self.mass <= 0.0 {
            return Err(Error::invalid(format!(
                "mass > 0 violated (got {})",
                self.mass
            )));
        }
        if self.viscous < 0.0 {
            return Err(Error::invalid(format!(
                "viscous >= 0 violated (got {})",
                self.viscous
            )));
        }
        Ok(())
    }

    pub fn with_disturbance(self, disturbance: f64) -> Self {
        DriftParams {
            disturbance,
            ..self
        }
    }
}

/// `K_t I - K_b`. Positive is restoring; zero or negative is not.
pub fn effective_stiffness(params: &DriftParams) -> f64 {
    params.k_torque * params.current - params.k_bias
}

/// Which closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Underdamped,
    CriticallyDamped,
    Overdamped,
    /// `k = 0`: free mass with damping.
    Rigid,
    /// `k < 0`: exponential divergence.
    Unstable,
}

const STIFFNESS_EPS: f64 = 1e-12;

impl Regime {
    pub fn of(params: &DriftParams) -> Regime {
        let k = effective_stiffness(params);
        let scale = (params.k_torque * params.current)
            .abs()
            .max(params.k_bias.abs());
        if k.abs() <= STIFFNESS_EPS * scale || k == 0.0 {
            return Regime::Rigid;
        }
        if k < 0.0 {
            return Regime::Unstable;
        }
        let (m, c) = (params.mass, params.viscous);
        let disc = c * c - 4.0 * m * k;
        let tol = STIFFNESS_EPS * (c * c + 4.0 * m * k);
        if disc > tol {
            Regime::Overdamped
        } else if disc < -tol {
            Regime::Underdamped
        } else {
            Regime::CriticallyDamped
        }
    }
}

/// `e^{-a t} sinh(b t)` without overflow for large `t` (requires `a >= b >= 0`
/// for boundedness, but any signs evaluate).
fn exp_sinh(a: f64, b: f64, t: f64) -> f64 {
    let bt = b * t;
    if bt < 20.0 {
        (-a * t).exp() * bt.sinh()
    } else {
        0.5 * (((b - a) * t).exp() - (-(a + b) * t).exp())
    }
}

fn exp_cosh(a: f64, b: f64, t: f64) -> f64 {
    let bt = b * t;
    if bt < 20.0 {
        (-a * t).exp() * bt.cosh()
    } else {
        0.5 * (((b - a) * t).exp() + (-(a + b) * t).exp())
    }
}

/// Position and velocity of the closed-form step response at `t`.
pub fn drift_state(params: &DriftParams, t: f64) -> (f64, f64) {
    let (m, c, d) = (params.mass, params.viscous, params.disturbance);
    if d == 0.0 || t <= 0.0 {
        return (0.0, 0.0);
    }
    let k = effective_stiffness(params);
    let alpha = c / (2.0 * m);
    match Regime::of(params) {
        Regime::Rigid => {
            if c == 0.0 {
                (d * t * t / (2.0 * m), d * t / m)
            } else {
                let u = c * t / m;
                // 1 - e^{-u}
                let one_minus = -(-u).exp_m1();
                ((d / c) * (t - (m / c) * one_minus), (d / c) * one_minus)
            }
        }
        Regime::CriticallyDamped => {
            let decay = (-alpha * t).exp();
            let x = (d / k) * (1.0 - (1.0 + alpha * t) * decay);
            let v = (d / k) * alpha * alpha * t * decay;
            (x, v)
        }
        Regime::Underdamped => {
            let omega = (4.0 * m * k - c * c).sqrt() / (2.0 * m);
            let decay = (-alpha * t).exp();
            let (s, co) = (omega * t).sin_cos();
            let x = (d / k) * (1.0 - decay * (co + (alpha / omega) * s));
            let v = d / (m * omega) * decay * s;
            (x, v)
        }
        Regime::Overdamped | Regime::Unstable => {
            let beta = (c * c - 4.0 * m * k).sqrt() / (2.0 * m);
            let sh = exp_sinh(alpha, beta, t);
            let ch = exp_cosh(alpha, beta, t);
            let x = (d / k) * (1.0 - ch - (alpha / beta) * sh);
            let v = d / (m * beta) * sh;
            (x, v)
        }
    }
}

/// Closed-form drift `x(t)` from rest under the constant disturbance.
pub fn drift_response(params: &DriftParams, t: f64) -> f64 {
    drift_state(params, t).0
}

/// Sampled trajectory from a numerical integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTrace {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl DriftTrace {
    /// CSV with header `t,x,xdot`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x,xdot")?;
        for ((t, x), v) in self.times.iter().zip(&self.positions).zip(&self.velocities) {
            writeln!(out, "{t},{x},{v}")?;
        }
        out.flush()
    }

    /// Closed-form trace on the same sampling grid as [`simulate_drift`].
    pub fn closed_form(params: &DriftParams, t_end: f64, dt: f64) -> Result<DriftTrace> {
        let times = sample_times(t_end, dt)?;
        let (positions, velocities) = times.iter().map(|&t| drift_state(params, t)).unzip();
        Ok(DriftTrace {
            times,
            positions,
            velocities,
        })
    }
}

fn sample_times(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if dt.is_nan() || dt <= 0.0 || dt > t_end {
        return Err(Error::invalid(format!(
            "dt must satisfy 0 < dt <= t_end, got {dt}"
        )));
    }
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    let mut times: Vec<f64> = (0..steps).map(|i| i as f64 * dt).collect();
    times.push(t_end);
    Ok(times)
}

/// Classical fourth-order Runge-Kutta with fixed step `dt` from rest. The last
/// step is shortened to land on `t_end`.
pub fn simulate_drift(params: &DriftParams, t_end: f64, dt: f64) -> Result<DriftTrace> {
    params.validate()?;
    let times = sample_times(t_end, dt)?;
    let (m, c, d) = (params.mass, params.viscous, params.disturbance);
    let k = effective_stiffness(params);
    let accel = |x: f64, v: f64| (d - c * v - k * x) / m;

    let mut positions = Vec::with_capacity(times.len());
    let mut velocities = Vec::with_capacity(times.len());
    let (mut x, mut v) = (0.0f64, 0.0f64);
    positions.push(x);
    velocities.push(v);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let (k1x, k1v) = (v, accel(x, v));
        let (k2x, k2v) = (
            v + 0.5 * h * k1v,
            accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v),
        );
        let (k3x, k3v) = (
            v + 0.5 * h * k2v,
            accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v),
        );
        let (k4x, k4v) = (v + h * k3v, accel(x + h * k3x, v + h * k3v));
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::IntegrationDiverged(w[1]));
        }
        positions.push(x);
        velocities.push(v);
    }
    Ok(DriftTrace {
        times,
        positions,
        velocities,
    })
}

/// Largest drift magnitude reached on `[0, horizon]`.
///
/// The response scales linearly with `d`, so the sign of the disturbance only
/// picks the direction; the magnitude is what a clearance is measured against.
pub fn max_drift(params: &DriftParams, horizon: f64) -> f64 {
    if horizon <= 0.0 || params.disturbance == 0.0 {
        return 0.0;
    }
    let p = params.with_disturbance(params.disturbance.abs());
    let end = drift_response(&p, horizon);
    match Regime::of(&p) {
        Regime::Underdamped => {
            // x' = 0 at t = n pi / omega; the first crossing is the highest peak.
            let k = effective_stiffness(&p);
            let omega = (4.0 * p.mass * k - p.viscous * p.viscous).sqrt() / (2.0 * p.mass);
            let first_peak = std::f64::consts::PI / omega;
            if first_peak <= horizon {
                end.max(drift_response(&p, first_peak))
            } else {
                end
            }
        }
        // Monotone from rest in every other regime.
        _ => end,
    }
}

/// Supremum of the drift magnitude over all time, `None` when unbounded.
pub fn peak_drift(params: &DriftParams) -> Option<f64> {
    let d = params.disturbance.abs();
    if d == 0.0 {
        return Some(0.0);
    }
    let k = effective_stiffness(params);
    match Regime::of(params) {
        Regime::Rigid | Regime::Unstable => None,
        Regime::CriticallyDamped | Regime::Overdamped => Some(d / k),
        Regime::Underdamped => {
            let (m, c) = (params.mass, params.viscous);
            let omega = (4.0 * m * k - c * c).sqrt() / (2.0 * m);
            let alpha = c / (2.0 * m);
            Some(d / k * (1.0 + (-alpha * std::f64::consts::PI / omega).exp()))
        }
    }
}

/// Longest relocation period keeping the drift below a clearance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WakeupPeriod {
    Finite(f64),
    Infinite,
}

impl WakeupPeriod {
    pub fn seconds(self) -> Option<f64> {
        match self {
            WakeupPeriod::Finite(t) => Some(t),
            WakeupPeriod::Infinite => None,
        }
    }
}

/// `sup { T : max_drift(T) < clearance }`, found by bisection.
pub fn wakeup_period(params: &DriftParams, clearance: f64) -> Result<WakeupPeriod> {
    params.validate()?;
    if !(clearance.is_finite() && clearance > 0.0) {
        return Err(Error::invalid(format!(
            "clearance must be positive and finite, got {clearance}"
        )));
    }
    match peak_drift(params) {
        Some(peak) if peak < clearance => return Ok(WakeupPeriod::Infinite),
        // Overdamped and critical responses only approach their peak.
        Some(peak)
            if peak == clearance
                && matches!(
                    Regime::of(params),
                    Regime::CriticallyDamped | Regime::Overdamped
                ) =>
        {
            return Ok(WakeupPeriod::Infinite)
        }
        _ => {}
    }

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while max_drift(params, hi) < clearance {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(WakeupPeriod::Infinite);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if max_drift(params, mid) < clearance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(WakeupPeriod::Finite(0.5 * (lo + hi)))
}

/// Disturbance making the drift reach `target_drift` at `horizon`.
///
/// The response is linear in `d`, so this divides by the unit-disturbance
/// response. Any disturbance set in `params_without_d` is ignored.
pub fn fit_disturbance(
    params_without_d: &DriftParams,
    horizon: f64,
    target_drift: f64,
) -> Result<f64> {
    let unit = params_without_d.with_disturbance(1.0);
    unit.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(target_drift.is_finite() && target_drift > 0.0) {
        return Err(Error::invalid(format!(
            "target drift must be positive, got {target_drift}"
        )));
    }
    let x_unit = drift_response(&unit, horizon);
    if x_unit == 0.0 || !x_unit.is_finite() {
        return Err(Error::invalid(format!(
            "unit response at horizon {horizon} is {x_unit}"
        )));
    }
    Ok(target_drift / x_unit)
}
