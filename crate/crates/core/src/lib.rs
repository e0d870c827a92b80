//! Simulator and analysis library for sensor-spoofing attacks on systems
//! whose state lives on a matrix Lie group.
//!
//! The crate answers, numerically, when an attack displacement learned in one
//! operating condition carries over to another without changing its physical
//! effect or tripping an innovation-based detector:
//!
//! * [`lie`] — group/algebra arithmetic over a runtime group description,
//!   with SE(2) closed forms (exp/log, brackets, adjoints, operator norms);
//! * [`centralizer`] — the subspace of displacements commuting with a given
//!   motion generator, plus membership, splitting and defense ranking;
//! * [`dynamics`] — zero-order-hold left-invariant flows and unicycle
//!   trajectories;
//! * [`observer`] — a mixed position/odometry sensor suite, invariant
//!   innovations and a multiplicative-drift detector;
//! * [`attack`] — dataset generation, displacement learning, spoof
//!   realisation, impact/deviation bounds and end-to-end transfer runs;
//! * [`scenario`] — JSON-configured scenarios and the CSV/JSON artifacts the
//!   command-line front end emits.

pub mod attack;
pub mod centralizer;
pub mod dynamics;
pub mod lie;
pub mod observer;
pub mod scenario;

pub use attack::{
    dynamical_impact, impact_bound, realized_error, spoof_measurement, AttackDataset,
    AttackError, ImpactReport, ImpactStep, LearnedAttack, RichnessReport,
};
pub use centralizer::{
    commuting_subspace, decompose, defense_rank_inputs, is_transferable, jacobi_closure_check,
    leaf_confinement_check, CentralizerError, Decomposition, DefenseRanking, SubspaceBasis,
    TransferReport,
};
pub use dynamics::{generator, simulate, zoh_step, ControlInput, Trajectory};
pub use lie::{
    se2_adjoint_norm_closed_form, AlgebraVector, GroupElement, LieError, LieGroupSpec,
    LinearOperator,
};
pub use observer::{
    detect, innovation, invariant_error, observe_se2_mixed, observer_step, DetectorConfig,
    ObserverError, ObserverState, SensorSuite, StepOutcome,
};
