//! Fixed-step classical Runge-Kutta integration with a physicality guard.
//!
//! After each step, entries pushed outside `[0, 1]` by less than
//! [`REJECT_OVERSHOOT`] are clamped and logged; larger overshoots reject the
//! step, which is then retried as two half steps (up to
//! [`MAX_SUBDIVISIONS`] levels) before the run aborts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{RhsEvaluator, RhsField};
use crate::observables::{measure, ObservableRecord};
use crate::state::DistributionState;

/// Overshoot beyond which a step is rejected.
pub const REJECT_OVERSHOOT: f64 = 1e-3;
/// Halvings attempted before a rejected step aborts the run.
pub const MAX_SUBDIVISIONS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record every this many steps; the final step is always recorded.
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    /// Overshoots up to this size are clamped silently.
    #[serde(default = "default_clamp_tolerance")]
    pub clamp_tolerance: f64,
    /// Evaluate the double-occupancy drift in each record.
    #[serde(default = "default_ddot")]
    pub ddot: bool,
}

fn default_output_every() -> usize {
    1
}

fn default_clamp_tolerance() -> f64 {
    1e-9
}

fn default_ddot() -> bool {
    true
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_final,
            output_every: default_output_every(),
            clamp_tolerance: default_clamp_tolerance(),
            ddot: default_ddot(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "dt must be finite and > 0, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "t_final must be finite and >= 0, got {}",
                self.t_final
            )));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidIntegrator("output_every must be >= 1".into()));
        }
        if !(self.clamp_tolerance >= 0.0 && self.clamp_tolerance < REJECT_OVERSHOOT) {
            return Err(Error::InvalidIntegrator(format!(
                "clamp_tolerance must lie in [0, {REJECT_OVERSHOOT}), got {}",
                self.clamp_tolerance
            )));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_final`; the last may be short.
    pub fn steps(&self) -> usize {
        if self.t_final == 0.0 {
            0
        } else {
            (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize
        }
    }
}

fn axpy(state: &DistributionState, h: f64, k: &RhsField) -> DistributionState {
    let mut out = state.clone();
    for (f, d) in out.as_mut_slice().iter_mut().zip(k.as_slice()) {
        *f += h * d;
    }
    out
}

/// One unguarded RK4 update. `k1` may carry an already computed
/// derivative at `state`.
pub fn rk4_update<F>(
    state: &DistributionState,
    k1: Option<&RhsField>,
    rhs: &F,
    dt: f64,
) -> Result<DistributionState>
where
    F: Fn(&DistributionState) -> Result<RhsField>,
{
    let owned;
    let k1 = match k1 {
        Some(k) => k,
        None => {
            owned = rhs(state)?;
            &owned
        }
    };
    let k2 = rhs(&axpy(state, 0.5 * dt, k1))?;
    let k3 = rhs(&axpy(state, 0.5 * dt, &k2))?;
    let k4 = rhs(&axpy(state, dt, &k3))?;
    let mut out = state.clone();
    let sixth = dt / 6.0;
    for (i, f) in out.as_mut_slice().iter_mut().enumerate() {
        let (a, b, c, d) = (
            k1.as_slice()[i],
            k2.as_slice()[i],
            k3.as_slice()[i],
            k4.as_slice()[i],
        );
        *f += sixth * (a + 2.0 * b + 2.0 * c + d);
    }
    out.t = state.t + dt;
    Ok(out)
}

/// Applies the clamp-or-reject policy to a freshly stepped state.
pub fn enforce_physical(state: &mut DistributionState, clamp_tolerance: f64) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::NonFinite { t: state.t });
    }
    let overshoot = state.overshoot();
    if overshoot > REJECT_OVERSHOOT {
        return Err(Error::StepRejected {
            t: state.t,
            overshoot,
            limit: REJECT_OVERSHOOT,
        });
    }
    if overshoot > 0.0 {
        state.clamp_physical();
        if overshoot > clamp_tolerance {
            log::warn!("clamped overshoot {overshoot:e} at t = {}", state.t);
        } else {
            log::trace!("clamped overshoot {overshoot:e} at t = {}", state.t);
        }
    }
    Ok(())
}

/// One guarded RK4 step with the default clamp tolerance.
pub fn rk4_step<F>(state: &DistributionState, rhs: &F, dt: f64) -> Result<DistributionState>
where
    F: Fn(&DistributionState) -> Result<RhsField>,
{
    let mut next = rk4_update(state, None, rhs, dt)?;
    enforce_physical(&mut next, 1e-9)?;
    Ok(next)
}

fn advance<F>(
    state: &DistributionState,
    k1: Option<&RhsField>,
    rhs: &F,
    dt: f64,
    clamp_tolerance: f64,
    depth: u32,
) -> Result<DistributionState>
where
    F: Fn(&DistributionState) -> Result<RhsField>,
{
    let attempt = rk4_update(state, k1, rhs, dt).and_then(|mut next| {
        enforce_physical(&mut next, clamp_tolerance)?;
        Ok(next)
    });
    match attempt {
        Err(Error::StepRejected { overshoot, .. }) if depth < MAX_SUBDIVISIONS => {
            log::warn!(
                "step at t = {} rejected (overshoot {overshoot:e}); halving dt",
                state.t
            );
            let mid = advance(state, k1, rhs, 0.5 * dt, clamp_tolerance, depth + 1)?;
            advance(&mid, None, rhs, 0.5 * dt, clamp_tolerance, depth + 1)
        }
        other => other,
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<ObservableRecord>,
    pub final_state: DistributionState,
    pub steps: usize,
}

/// Integrates to `config.t_final`, calling `observer(step, state, record)`
/// at every recorded step.
pub fn integrate<F, E>(
    initial: DistributionState,
    evaluator: &RhsEvaluator<'_>,
    config: &IntegratorConfig,
    mut observer: F,
) -> std::result::Result<Trajectory, E>
where
    F: FnMut(usize, &DistributionState, &ObservableRecord) -> std::result::Result<(), E>,
    E: From<Error>,
{
    config.validate()?;
    initial.check_grid(evaluator.grid())?;
    if !initial.is_finite() {
        return Err(Error::NonFinite { t: initial.t }.into());
    }
    let rhs = |s: &DistributionState| evaluator.evaluate(s);
    let steps = config.steps();
    let t0 = initial.t;
    let mut state = initial;
    let mut records = Vec::new();

    for step in 0..=steps {
        let derivative = rhs(&state)?;
        if !derivative.is_finite() {
            return Err(Error::NonFinite { t: state.t }.into());
        }
        if step % config.output_every == 0 || step == steps {
            let record = measure(&state, evaluator, &derivative, config.ddot)?;
            observer(step, &state, &record)?;
            records.push(record);
        }
        if step == steps {
            break;
        }
        let t_next = if step + 1 == steps {
            t0 + config.t_final
        } else {
            t0 + (step + 1) as f64 * config.dt
        };
        let h = t_next - state.t;
        let mut next = advance(
            &state,
            Some(&derivative),
            &rhs,
            h,
            config.clamp_tolerance,
            0,
        )?;
        next.t = t_next;
        state = next;
    }
    Ok(Trajectory {
        records,
        final_state: state,
        steps,
    })
}

/// `sup |∂t f|` relative to the kernel's reference rate.
pub fn stationarity_residual(
    state: &DistributionState,
    evaluator: &RhsEvaluator<'_>,
) -> Result<f64> {
    let rhs = evaluator.evaluate(state)?;
    Ok(evaluator.residual_of(&rhs))
}
