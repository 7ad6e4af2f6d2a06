//! Experiment harness: topology reports, window escalation, the skinny and
//! wide ring experiments, random non-singular sweeps and the composition
//! tolerance check.

mod escalation;
mod experiment;
mod oracle;
mod sweep;
mod tolerance;
mod topology;

pub use escalation::{
    escalate, escalate_levels, network_escalation, window_escalation, EscalatedComponent,
    EscalationReport, FinalClass,
};
pub use experiment::{
    default_window, run_experiment, run_seed, train_seed, Aggregate, ExperimentSpec, LevelOutcome,
    ProbeLevels, Regime, RunOutcome, SweepResult, Violation, ViolationKind, INIT_SEED_SALT,
};
pub use oracle::{compare_with_band, is_clear_of, topology_change_values, OracleComparison};
pub use sweep::{
    analyze_nonsingular, nonsingular_aggregate, nonsingular_result, random_nonsingular_sweep,
    random_nonsingular_sweep_with, NonsingularSweep,
};
pub use tolerance::{composition_tolerance_check, ToleranceReport, DELTA_FLOOR};
pub use topology::{analyze_field, field_digest, hex_digest, TopologyReport};
