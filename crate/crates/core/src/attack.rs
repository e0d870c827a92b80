//! Attack-side pipeline: observation datasets, displacement learning,
//! spoof realisation, impact/stealth deviations and bounds, and end-to-end
//! transfer runs against the detector.
//!
//! The central objects are a per-step displacement schedule in the algebra,
//! its split into a commuting (ideal) part and a bracket-violating residual,
//! and the flow adjoint that warps the residual's physical effect. The
//! residual's innovation-side effect stays linear; only its impact-side
//! effect is amplified.

use std::io::{self, Write};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use crate::centralizer::{commuting_subspace, decompose, SubspaceBasis, DEFAULT_RANK_TOL};
use crate::dynamics::{generator, ControlInput, Trajectory};
use crate::lie::{AlgebraVector, GroupElement, LieError};
use crate::observer::{observer_step, DetectorConfig, ObserverError, ObserverState, SensorSuite};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("attack signal has {got} entries, trajectory has {expected} states")]
    SignalLength { expected: usize, got: usize },
    #[error("dataset experiments have unequal lengths")]
    RaggedDataset,
    #[error("fault at step {step}: {source}")]
    StepFault {
        step: usize,
        #[source]
        source: Box<AttackError>,
    },
    #[error(transparent)]
    Observer(#[from] ObserverError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Paired nominal/attacked sensor tuples from repeated experiments on one
/// nominal trajectory.
#[derive(Debug, Clone)]
pub struct AttackDataset {
    /// `experiments[i][k] = (nominal tuple, attacked tuple)` at step `k`.
    pub experiments: Vec<Vec<(DVector<f64>, DVector<f64>)>>,
    /// Chart label of the nominal start state.
    pub start_label: String,
    pub dt: f64,
}

impl AttackDataset {
    pub fn num_experiments(&self) -> usize {
        self.experiments.len()
    }

    pub fn num_steps(&self) -> usize {
        self.experiments.first().map_or(0, |e| e.len())
    }
}

/// Generates the dataset for a batch of attack signals: at every trajectory
/// state the attacked tuple measures the right-translated state, plus
/// optional i.i.d. gaussian channel noise (seeded, std `noise_std`).
pub fn generate_dataset(
    nominal: &Trajectory,
    attack_signals: &[Vec<AlgebraVector>],
    suite: &SensorSuite,
    noise_std: f64,
    seed: u64,
) -> Result<AttackDataset, AttackError> {
    let n_states = nominal.len();
    for signal in attack_signals {
        if signal.len() != n_states {
            return Err(AttackError::SignalLength {
                expected: n_states,
                got: signal.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = if noise_std > 0.0 {
        Some(Normal::new(0.0, noise_std).expect("finite std"))
    } else {
        None
    };

    let mut experiments = Vec::with_capacity(attack_signals.len());
    for signal in attack_signals {
        let mut pairs = Vec::with_capacity(n_states);
        for (k, displacement) in signal.iter().enumerate() {
            let state = nominal.state(k);
            let clean = suite.measure(state);
            let mut attacked = suite.measure(&state.compose(&displacement.exp()));
            if let Some(dist) = &noise {
                for v in attacked.iter_mut() {
                    *v += dist.sample(&mut rng);
                }
            }
            pairs.push((clean, attacked));
        }
        experiments.push(pairs);
    }

    let (x, y, theta) = nominal.state(0).pose();
    Ok(AttackDataset {
        experiments,
        start_label: format!("({x:.3}, {y:.3}, {theta:.3})"),
        dt: nominal.dt(),
    })
}

/// A displacement schedule recovered from data, with the subspace used for
/// the ideal/residual split and the worst-case residual seen.
#[derive(Debug, Clone)]
pub struct LearnedAttack {
    pub displacements: Vec<AlgebraVector>,
    pub residual_bound: f64,
    pub subspace: SubspaceBasis,
}

#[derive(Serialize)]
struct LearnedAttackFile<'a> {
    displacements: Vec<&'a [f64]>,
    epsilon: f64,
}

impl LearnedAttack {
    /// Serialises as `{"displacements": [[f, l, theta] ...], "epsilon": e}`.
    pub fn to_json(&self) -> String {
        let file = LearnedAttackFile {
            displacements: self.displacements.iter().map(|d| d.as_slice()).collect(),
            epsilon: self.residual_bound,
        };
        serde_json::to_string_pretty(&file).expect("plain floats serialise")
    }
}

/// Recovers per-step displacements from a dataset by inverting the sensor
/// chart on both tuples and taking the relative log, averaged over
/// experiments in the algebra. The residual bound is the worst complement
/// norm with respect to `subspace`.
pub fn learn_displacements(
    dataset: &AttackDataset,
    suite: &SensorSuite,
    subspace: &SubspaceBasis,
    chart_residual_tol: f64,
) -> Result<LearnedAttack, AttackError> {
    let spec = subspace.generator().spec().clone();
    let n_steps = dataset.num_steps();
    if dataset
        .experiments
        .iter()
        .any(|e| e.len() != n_steps)
    {
        return Err(AttackError::RaggedDataset);
    }
    let m = dataset.num_experiments().max(1) as f64;

    let mut displacements = Vec::with_capacity(n_steps);
    let mut residual_bound: f64 = 0.0;
    for k in 0..n_steps {
        let fault = |e: AttackError| AttackError::StepFault {
            step: k,
            source: Box::new(e),
        };
        let mut mean = AlgebraVector::zero(&spec);
        for experiment in &dataset.experiments {
            let (clean, attacked) = &experiment[k];
            let x_nominal = suite
                .chart_inverse(clean, &spec, chart_residual_tol)
                .map_err(|e| fault(e.into()))?;
            let x_attacked = suite
                .chart_inverse(attacked, &spec, chart_residual_tol)
                .map_err(|e| fault(e.into()))?;
            let displacement = x_nominal
                .inverse()
                .compose(&x_attacked)
                .log()
                .map_err(|e| fault(e.into()))?;
            residual_bound = residual_bound.max(decompose(&displacement, subspace).residual.norm());
            mean = mean.add(&displacement);
        }
        displacements.push(mean.scale(1.0 / m));
    }

    Ok(LearnedAttack {
        displacements,
        residual_bound,
        subspace: subspace.clone(),
    })
}

/// Outcome of the richness test: do the ideal components span the subspace,
/// and do all residuals stay within the budget?
#[derive(Debug, Clone, Serialize)]
pub struct RichnessReport {
    pub rich: bool,
    pub spans_subspace: bool,
    pub rank: usize,
    pub required_rank: usize,
    pub max_residual: f64,
    pub epsilon: f64,
    /// Human-readable description of the first failing condition, if any.
    pub failure: Option<String>,
}

/// Checks a learned schedule against a residual budget `epsilon`: the
/// projected ideal components must span the whole subspace and every
/// residual norm must stay at or below `epsilon`.
pub fn epsilon_richness(
    learned: &LearnedAttack,
    subspace: &SubspaceBasis,
    epsilon: f64,
) -> RichnessReport {
    let d = subspace.dim();
    let n = learned.displacements.len();
    let mut projected = nalgebra::DMatrix::zeros(d, n.max(1));
    let mut max_residual: f64 = 0.0;
    for (k, displacement) in learned.displacements.iter().enumerate() {
        let split = decompose(displacement, subspace);
        max_residual = max_residual.max(split.residual.norm());
        let coords = subspace.basis_matrix().transpose() * split.ideal.coords();
        projected.set_column(k, &coords);
    }
    let rank = if n == 0 {
        0
    } else {
        let svd = projected.svd(false, false);
        let sigma_max = svd.singular_values.max();
        if sigma_max <= 1e-12 {
            0
        } else {
            svd.singular_values
                .iter()
                .filter(|s| **s > 1e-9 * sigma_max)
                .count()
        }
    };

    let spans = rank == d;
    let within = max_residual <= epsilon;
    let failure = if !spans {
        Some(format!(
            "ideal components span only {rank} of {d} directions"
        ))
    } else if !within {
        Some(format!(
            "residual norm {max_residual:.6} exceeds budget {epsilon:.6}"
        ))
    } else {
        None
    };
    RichnessReport {
        rich: spans && within,
        spans_subspace: spans,
        rank,
        required_rank: d,
        max_residual,
        epsilon,
        failure,
    }
}

/// Applies a displacement to a sensor tuple the way an attacker on the
/// sensor channel would.
///
/// A purely lateral displacement `[0, c, 0]` uses the additive
/// heading-coordinated form
/// `z + [-c sin(heading), c cos(heading), 0, c]`; anything else is realised
/// exactly by inverting the chart, right-multiplying the displacement
/// exponential, and re-measuring. With an exact heading estimate the two
/// paths agree.
pub fn spoof_measurement(
    true_meas: &DVector<f64>,
    displacement: &AlgebraVector,
    heading_estimate: f64,
    suite: &SensorSuite,
) -> Result<DVector<f64>, AttackError> {
    if displacement.norm() == 0.0 {
        return Ok(true_meas.clone());
    }
    let coords = displacement.as_slice();
    if coords[0] == 0.0 && coords[2] == 0.0 {
        let c = coords[1];
        let mut out = true_meas.clone();
        out[0] += -c * heading_estimate.sin();
        out[1] += c * heading_estimate.cos();
        out[3] += c;
        return Ok(out);
    }
    let spec = displacement.spec();
    let state = suite.chart_inverse(true_meas, spec, crate::observer::CHART_RESIDUAL_TOL)?;
    Ok(suite.measure(&state.compose(&displacement.exp())))
}

/// The state-independent effect of displacing by `exp(v)` under the flow
/// element `g`: the conjugation `g · exp(v) · g⁻¹ = exp(adjoint_right(g) v)`.
/// Commuting displacements come through unchanged.
pub fn dynamical_impact(displacement: &AlgebraVector, g: &GroupElement) -> GroupElement {
    g.compose(&displacement.exp()).compose(&g.inverse())
}

/// Adjoint-warped residual and its worst-case norm:
/// `(adjoint_right(g) · residual, ||residual|| * ||adjoint_right(g)||)`.
/// The returned vector never exceeds the returned bound.
pub fn impact_bound(residual: &AlgebraVector, g: &GroupElement) -> (AlgebraVector, f64) {
    let deviation = g.adjoint_right().apply(residual);
    let bound = residual.norm() * g.adjoint_operator_norm();
    (deviation, bound)
}

/// Invariant error realised by an imperfect attack under an imperfect drift:
/// `exp(-(drift + adjoint_right(g) · drift_residual)) · exp(displacement + displacement_residual)`.
///
/// Matches the group-product construction with prediction
/// `x · exp(drift + drift_residual) · g⁻¹` and attacked state
/// `x · g⁻¹ · exp(displacement + displacement_residual)` whenever `drift`
/// commutes with `log(g)` (the orientation pairs with [`dynamical_impact`]'s
/// conjugator).
pub fn realized_error(
    drift: &AlgebraVector,
    drift_residual: &AlgebraVector,
    displacement: &AlgebraVector,
    displacement_residual: &AlgebraVector,
    g: &GroupElement,
) -> GroupElement {
    let warped = g.adjoint_right().apply(drift_residual);
    let left = drift.add(&warped).scale(-1.0).exp();
    let right = displacement.add(displacement_residual).exp();
    left.compose(&right)
}

/// Where the attacker reads the heading it uses to coordinate additive
/// spoofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingSource {
    /// Heading recovered from the sensor stream the victim actually sees
    /// (the attacker's own output; one step stale at onset).
    SpoofedStream,
    /// Heading of the true state, for ablations.
    GroundTruth,
}

/// Detector and realisation options for a transfer run.
#[derive(Debug, Clone, Copy)]
pub struct TransferConfig {
    pub detector: DetectorConfig,
    pub heading_source: HeadingSource,
}

impl TransferConfig {
    pub fn new(detector: DetectorConfig) -> Self {
        Self {
            detector,
            heading_source: HeadingSource::SpoofedStream,
        }
    }
}

/// Per-step record of a transfer run.
#[derive(Debug, Clone)]
pub struct ImpactStep {
    pub t: f64,
    /// Dynamical impact of the applied displacement under the step flow.
    pub impact: GroupElement,
    /// Norm of the impact's logarithm.
    pub impact_norm: f64,
    /// Adjoint-warped residual.
    pub deviation: AlgebraVector,
    pub deviation_norm: f64,
    /// Worst-case deviation: residual norm times adjoint norm.
    pub bound: f64,
    /// Ideal-part norm plus the deviation bound.
    pub total_bound: f64,
    /// Invariant error the detector evaluated.
    pub realized_error: GroupElement,
    /// Detector drift after the step.
    pub drift: AlgebraVector,
    pub innovation_norm: f64,
    pub alarm: bool,
}

/// Full trace of a transfer run plus the summary verdict.
#[derive(Debug, Clone)]
pub struct ImpactReport {
    pub steps: Vec<ImpactStep>,
    /// True when no step raised an alarm.
    pub stealthy: bool,
    pub max_innovation: f64,
    /// Largest total bound across the run.
    pub max_bound: f64,
    pub max_deviation: f64,
}

impl ImpactReport {
    /// CSV with header `t,impact_norm,deviation_norm,bound,innov_norm,alarm`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,impact_norm,deviation_norm,bound,innov_norm,alarm")?;
        for s in &self.steps {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.t,
                s.impact_norm,
                s.deviation_norm,
                s.bound,
                s.innovation_norm,
                if s.alarm { 1 } else { 0 }
            )?;
        }
        Ok(())
    }

    /// Observer-trace CSV with header
    /// `t,eta_f,eta_l,eta_theta,innov_norm,alarm`.
    pub fn write_observer_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,eta_f,eta_l,eta_theta,innov_norm,alarm")?;
        for s in &self.steps {
            let d = s.drift.as_slice();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.t,
                d[0],
                d[1],
                d[2],
                s.innovation_norm,
                if s.alarm { 1 } else { 0 }
            )?;
        }
        Ok(())
    }
}

/// Runs a learned displacement schedule against a victim trajectory: spoofs
/// every measurement, feeds the detector, and records impact, deviation,
/// bound and innovation per step. The schedule must carry one displacement
/// per trajectory state; the detector starts converged on the victim's true
/// start state.
pub fn run_transfer(
    victim: &Trajectory,
    learned: &LearnedAttack,
    suite: &SensorSuite,
    config: &TransferConfig,
) -> Result<ImpactReport, AttackError> {
    if learned.displacements.len() != victim.len() {
        return Err(AttackError::SignalLength {
            expected: victim.len(),
            got: learned.displacements.len(),
        });
    }
    let spec = victim.spec().clone();
    let dt = victim.dt();

    let mut observer = ObserverState::new(victim.state(0).clone());
    let mut steps = Vec::with_capacity(victim.num_steps());
    let mut last_spoofed_heading: Option<f64> = None;

    // per-input subspace, recomputed only when the input changes
    let mut cached: Option<(ControlInput, SubspaceBasis)> = None;

    for k in 1..victim.len() {
        let fault = |e: AttackError| AttackError::StepFault {
            step: k,
            source: Box::new(e),
        };
        let u = *victim.input(k - 1);
        let motion = generator(&u, &spec);
        let flow = motion.scale(dt).exp();
        let subspace = match &cached {
            Some((cached_u, sub)) if *cached_u == u => sub.clone(),
            _ => {
                let sub = commuting_subspace(&motion, DEFAULT_RANK_TOL);
                cached = Some((u, sub.clone()));
                sub
            }
        };

        let displacement = &learned.displacements[k];
        let z_true = suite.measure(victim.state(k));
        let heading = match config.heading_source {
            HeadingSource::GroundTruth => victim.state(k).pose().2,
            HeadingSource::SpoofedStream => match last_spoofed_heading {
                Some(h) => h,
                None => suite
                    .chart_inverse(&z_true, &spec, crate::observer::CHART_RESIDUAL_TOL)
                    .map_err(|e| fault(e.into()))?
                    .pose()
                    .2,
            },
        };
        let z_spoofed =
            spoof_measurement(&z_true, displacement, heading, suite).map_err(fault)?;
        last_spoofed_heading = Some(
            suite
                .chart_inverse(&z_spoofed, &spec, crate::observer::CHART_RESIDUAL_TOL)
                .map_err(|e| fault(e.into()))?
                .pose()
                .2,
        );

        let outcome = observer_step(&observer, &u, dt, &z_spoofed, suite, &config.detector)
            .map_err(|e| fault(e.into()))?;

        let split = decompose(displacement, &subspace);
        let (deviation, bound) = impact_bound(&split.residual, &flow);
        let impact = dynamical_impact(displacement, &flow);
        let impact_norm = impact.log().map_err(|e| fault(e.into()))?.norm();

        steps.push(ImpactStep {
            t: victim.time(k),
            impact,
            impact_norm,
            deviation_norm: deviation.norm(),
            deviation,
            bound,
            total_bound: split.ideal.norm() + bound,
            realized_error: outcome.error.clone(),
            drift: outcome.state.drift().clone(),
            innovation_norm: outcome.innovation_norm,
            alarm: outcome.alarm,
        });
        observer = outcome.state;
    }

    let stealthy = steps.iter().all(|s| !s.alarm);
    let max_innovation = steps.iter().fold(0.0f64, |m, s| m.max(s.innovation_norm));
    let max_bound = steps.iter().fold(0.0f64, |m, s| m.max(s.total_bound));
    let max_deviation = steps.iter().fold(0.0f64, |m, s| m.max(s.deviation_norm));
    Ok(ImpactReport {
        steps,
        stealthy,
        max_innovation,
        max_bound,
        max_deviation,
    })
}
