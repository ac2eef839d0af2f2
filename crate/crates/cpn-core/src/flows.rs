//! Hamiltonian flow integration and the audits attached to it.
//!
//! Flows of momentum-only Hamiltonians keep `x` frozen under both
//! structures (the coefficient matrices have no `x`-`x` block), so those
//! trajectories are straight lines in the angles; the integrator is still
//! a general fixed-step classical Runge-Kutta scheme so that genuinely
//! nonlinear Hamiltonians (angle-dependent ones) integrate correctly too.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::charts::MomentumAnglePoint;
use crate::invariants::invariant_field;
use crate::math;
use crate::poisson::{phi_axis, x_axis, PoissonStructure};
use crate::scalar::ScalarField;
use crate::DEFAULT_FD_STEP;

/// How far outside the closed simplex a trajectory state may drift.
pub const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    /// A state left the simplex by more than the slack.
    LeftDomain { time: f64, violation: f64 },
    /// Step size must be positive.
    BadStep { dt: f64 },
    /// The trajectory is shorter than a requested probe time.
    TooShort { needed: f64, have: f64 },
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::LeftDomain { time, violation } => {
                write!(f, "state left the simplex at t = {time}: violation {violation:.3e}")
            }
            FlowError::BadStep { dt } => write!(f, "step dt = {dt} must be positive"),
            FlowError::TooShort { needed, have } => {
                write!(f, "trajectory ends at {have}, probe needs {needed}")
            }
        }
    }
}

impl core::error::Error for FlowError {}

/// A fixed-step trajectory with its provenance labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<MomentumAnglePoint>,
    hamiltonian: String,
    structure: String,
    dt: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[MomentumAnglePoint] {
        &self.states
    }

    pub fn hamiltonian(&self) -> &str {
        &self.hamiltonian
    }

    pub fn structure(&self) -> &str {
        &self.structure
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start(&self) -> &MomentumAnglePoint {
        &self.states[0]
    }

    pub fn end(&self) -> &MomentumAnglePoint {
        self.states.last().expect("non-empty trajectory")
    }

    /// Angle `phi_i` at time `t` by linear interpolation between the
    /// bracketing samples (angles are stored unwrapped, so this is exact
    /// for linear flows).
    pub fn angle_at(&self, i: usize, t: f64) -> Result<f64, FlowError> {
        let t_end = *self.times.last().expect("non-empty trajectory");
        if t > t_end {
            return Err(FlowError::TooShort {
                needed: t,
                have: t_end,
            });
        }
        if self.times.len() == 1 {
            return Ok(self.states[0].phi()[i]);
        }
        let pos = t / self.dt;
        let lo = (pos as usize).min(self.times.len() - 2);
        let frac = pos - lo as f64;
        let a = self.states[lo].phi()[i];
        let b = self.states[lo + 1].phi()[i];
        Ok(a + frac * (b - a))
    }
}

/// Classical fixed-step 4th-order integration of the Hamiltonian flow
/// `dy/dt = X_h(y)`; records every step. The step count is
/// `round(t_final / dt)`, so the actual end time is the closest multiple
/// of `dt`.
pub fn integrate(
    h: &ScalarField,
    structure: &dyn PoissonStructure,
    structure_id: &str,
    start: &MomentumAnglePoint,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0) {
        return Err(FlowError::BadStep { dt });
    }
    let n = start.n();
    let dim = 2 * n;
    let steps = math::round(t_final / dt) as usize;
    let pack = |p: &MomentumAnglePoint| -> Vec<f64> {
        let mut y = Vec::with_capacity(dim);
        for i in 0..n {
            y.push(p.x()[i]);
            y.push(p.phi()[i]);
        }
        y
    };
    let unpack = |y: &[f64]| -> MomentumAnglePoint {
        let mut x = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        for i in 0..n {
            x.push(y[x_axis(i)]);
            phi.push(y[phi_axis(i)]);
        }
        MomentumAnglePoint::new_unchecked(x, phi)
    };
    let deriv = |y: &[f64]| -> Vec<f64> {
        let p = unpack(y);
        crate::poisson::hamiltonian_vector_field_with_step(h, structure, &p, DEFAULT_FD_STEP)
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = pack(start);
    times.push(0.0);
    states.push(start.clone());
    for step in 1..=steps {
        let k1 = deriv(&y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
        let k2 = deriv(&y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
        let k3 = deriv(&y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
        let k4 = deriv(&y4);
        for i in 0..dim {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let state = unpack(&y);
        let violation = state.simplex_violation();
        let time = step as f64 * dt;
        if violation > DOMAIN_SLACK {
            return Err(FlowError::LeftDomain { time, violation });
        }
        times.push(time);
        states.push(state);
    }
    Ok(Trajectory {
        times,
        states,
        hamiltonian: h.name().into(),
        structure: structure_id.into(),
        dt,
    })
}

/// Largest drift of any invariant `f_k` along the trajectory.
pub fn conservation_report(traj: &Trajectory) -> f64 {
    let n = traj.start().n();
    let fields: Vec<ScalarField> = (1..=n).map(|k| invariant_field(n, k)).collect();
    let reference: Vec<f64> = fields.iter().map(|f| f.eval(traj.start())).collect();
    let mut worst: f64 = 0.0;
    for state in traj.states() {
        for (f, r) in fields.iter().zip(reference.iter()) {
            worst = worst.max(math::abs(f.eval(state) - r));
        }
    }
    worst
}

/// Drift of the Hamiltonian value itself along the trajectory.
pub fn energy_drift(traj: &Trajectory, h: &ScalarField) -> f64 {
    let reference = h.eval(traj.start());
    traj.states()
        .iter()
        .fold(0.0_f64, |m, s| m.max(math::abs(h.eval(s) - reference)))
}

/// Periodicity audit of the weighted linear flow.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusPeriodReport {
    /// Expected periods `2 pi / (n + 1 - i)` per angle.
    pub periods: Vec<f64>,
    /// Distance of each angle from its start after one expected period.
    pub residuals: Vec<f64>,
    /// Largest `|x(t) - x(0)|`; exactly zero for momentum-only flows.
    pub x_drift: f64,
}

impl TorusPeriodReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |m, v| m.max(*v))
    }
}

/// Check that each angle of the weighted-sum flow returns to its start at
/// `t = 2 pi / (n + 1 - i)`; the trajectory must cover the longest period.
pub fn torus_period_check(traj: &Trajectory) -> Result<TorusPeriodReport, FlowError> {
    let n = traj.start().n();
    let tau = 2.0 * core::f64::consts::PI;
    let mut periods = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for i in 0..n {
        let weight = (n - i) as f64;
        let period = tau / weight;
        let angle = traj.angle_at(i, period)?;
        periods.push(period);
        residuals.push(math::angle_distance(angle, traj.start().phi()[i]));
    }
    let mut x_drift: f64 = 0.0;
    for state in traj.states() {
        for (a, b) in state.x().iter().zip(traj.start().x().iter()) {
            x_drift = x_drift.max(math::abs(a - b));
        }
    }
    Ok(TorusPeriodReport {
        periods,
        residuals,
        x_drift,
    })
}

/// One torus-fixed point with the invariant data attached to it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedPointEntry {
    /// Index `j` of the homogeneous basis point `e_j`.
    pub vertex: usize,
    /// Limit of the prefix sums `c` approaching the vertex inside the cell.
    pub c_limit: Vec<f64>,
    /// `c_1 + ... + c_n` there (the weighted-sum normalization).
    pub value_weighted_sum: f64,
    /// The same value in the wedge-ratio normalization (divided by `n`).
    pub value_ratio: f64,
}

/// The `n + 1` torus-fixed points of the ambient space with their
/// `c`-limits and the values of the first invariant.
///
/// Approaching `e_j` along `z = R e_j`, every `c_k` with `k < j` tends to
/// 1 and every `c_k` with `k >= j` tends to 0; at `e_0` (the cell center)
/// all `c_k` equal 1. The weighted-sum values over the vertices are the
/// distinct consecutive integers `{0, ..., n}`.
pub fn fixed_point_table(n: usize) -> Vec<FixedPointEntry> {
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let c_limit: Vec<f64> = if j == 0 {
            alloc::vec![1.0; n]
        } else {
            (1..=n).map(|k| if k < j { 1.0 } else { 0.0 }).collect()
        };
        let value: f64 = c_limit.iter().sum();
        out.push(FixedPointEntry {
            vertex: j,
            c_limit,
            value_weighted_sum: value,
            value_ratio: value / n as f64,
        });
    }
    out
}
