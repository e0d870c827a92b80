//! Zero-order-hold flows of left-invariant dynamics, with the planar
//! unicycle (forward speed + turn rate) as the shipped input model.
//!
//! Inputs are held constant over each sample interval, so the discrete step
//! is exactly a right multiplication by the exponential of the scaled motion
//! generator. Generic groups can step from a raw algebra vector instead of a
//! unicycle input.

use std::io::{self, Write};
use std::sync::Arc;

use crate::lie::{AlgebraVector, GroupElement, LieGroupSpec};

/// Piecewise-constant unicycle input: forward speed (m/s) and turn rate
/// (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    v: f64,
    omega: f64,
}

impl ControlInput {
    pub fn new(v: f64, omega: f64) -> Self {
        assert!(v.is_finite() && omega.is_finite(), "inputs must be finite");
        Self { v, omega }
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Motion generator of a unicycle input in the (forward, lateral, heading)
/// basis: `[v, 0, omega]`.
pub fn generator(u: &ControlInput, spec: &Arc<LieGroupSpec>) -> AlgebraVector {
    assert!(
        spec.dim_algebra() == 3,
        "unicycle inputs need a 3-dimensional algebra"
    );
    AlgebraVector::new(spec, &[u.v, 0.0, u.omega]).expect("finite by construction")
}

/// One exact zero-order-hold step: `x · exp(generator(u) · dt)`.
pub fn zoh_step(x: &GroupElement, u: &ControlInput, dt: f64) -> GroupElement {
    zoh_step_generic(x, &generator(u, x.spec()), dt)
}

/// Zero-order-hold step from a raw algebra generator.
pub fn zoh_step_generic(x: &GroupElement, motion: &AlgebraVector, dt: f64) -> GroupElement {
    assert!(dt > 0.0 && dt.is_finite(), "step length must be positive");
    x.compose(&motion.scale(dt).exp())
}

/// A sampled state history with the inputs that produced it.
/// `states.len() == inputs.len() + 1` always holds.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<GroupElement>,
    inputs: Vec<ControlInput>,
    dt: f64,
    t0: f64,
}

impl Trajectory {
    /// Number of stored states (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of integration steps.
    pub fn num_steps(&self) -> usize {
        self.inputs.len()
    }

    pub fn state(&self, k: usize) -> &GroupElement {
        &self.states[k]
    }

    pub fn states(&self) -> &[GroupElement] {
        &self.states
    }

    pub fn input(&self, k: usize) -> &ControlInput {
        &self.inputs[k]
    }

    pub fn inputs(&self) -> &[ControlInput] {
        &self.inputs
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Sample time of state `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn spec(&self) -> &Arc<LieGroupSpec> {
        self.states[0].spec()
    }

    /// Largest violation of the step identity `x_{k+1} = x_k · exp(f(u_k) dt)`
    /// across the trajectory.
    pub fn step_identity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.inputs.len() {
            let expected = zoh_step(&self.states[k], &self.inputs[k], self.dt);
            worst = worst.max((expected.matrix() - self.states[k + 1].matrix()).norm());
        }
        worst
    }

    /// Writes the planar chart as CSV with header
    /// `t,x,y,theta,v,omega`. The final row repeats the last applied input
    /// (zeros when the trajectory has no steps).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x,y,theta,v,omega")?;
        for (k, state) in self.states.iter().enumerate() {
            let (x, y, theta) = state.pose();
            let input = if self.inputs.is_empty() {
                ControlInput::new(0.0, 0.0)
            } else {
                self.inputs[k.min(self.inputs.len() - 1)]
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.time(k),
                x,
                y,
                theta,
                input.v(),
                input.omega()
            )?;
        }
        Ok(())
    }
}

/// Folds [`zoh_step`] over the input sequence, starting at `x0`.
pub fn simulate(x0: &GroupElement, inputs: &[ControlInput], dt: f64) -> Trajectory {
    assert!(dt > 0.0 && dt.is_finite(), "step length must be positive");
    let mut states = Vec::with_capacity(inputs.len() + 1);
    states.push(x0.clone());
    for u in inputs {
        let next = zoh_step(states.last().unwrap(), u, dt);
        states.push(next);
    }
    Trajectory {
        states,
        inputs: inputs.to_vec(),
        dt,
        t0: 0.0,
    }
}

/// [`simulate`] for a generic group, stepping from raw algebra generators.
pub fn simulate_generic(x0: &GroupElement, motions: &[AlgebraVector], dt: f64) -> Vec<GroupElement> {
    assert!(dt > 0.0 && dt.is_finite(), "step length must be positive");
    let mut states = Vec::with_capacity(motions.len() + 1);
    states.push(x0.clone());
    for m in motions {
        let next = zoh_step_generic(states.last().unwrap(), m, dt);
        states.push(next);
    }
    states
}
