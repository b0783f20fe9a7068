//! Analytic stability bounds, the Fourier splitting geometry and empirical
//! verifiers of the underlying inequalities.

mod analytic;
mod checks;
mod split;

pub use analytic::{
    ip1_bound, ip1_report, ip2_bound, ip2_branch_squares, ip2_constants, ip2_switch_points, ip3_bound,
    prolate_asymptotic, BoundReport, Ip2Constants, Problem, Regime, BOUND_CSV_HEADER,
};
pub use checks::{
    empirical_ip2_check, optimality_check, two_distance_check, uncertainty_check, EmpiricalReport, FrequencyRegion,
    TrialFamily,
};
pub use split::{fourier_split, split_energy, FourierSplit, Shell, SplitEnergy};
