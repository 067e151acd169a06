//! Existence and nonexistence criteria with auditable reports.

mod asymptotic;
mod energy;
mod report;
mod shifted;

pub use asymptotic::{
    bloch_integral_criterion, boundary_condition, check_energy_ordering, dislocation_report, forward_integral,
    reverse_integral,
};
pub use energy::{
    energy_verdict, large_jump_beta0, large_jump_report, mutually_consistent, nonexistence_check,
    scaled_energy_ratio, scaled_interface_check, sup_of_difference,
};
pub use report::{Assumption, Branch, Condition, CriterionReport, Orientation, Scope, Verdict, DEFAULT_TOL};
pub use shifted::{asymptotic_expansion, shifted_rows, shifted_state_criterion, ShiftRow};
