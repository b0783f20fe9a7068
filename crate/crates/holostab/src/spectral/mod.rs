//! Eigensolvers and stability constants.

pub mod dense;
mod ip1;
pub mod ops;
pub mod prolate;
pub mod solver;

pub use ip1::{
    gram_apply, gram_lambda_max, least_stable_mode, smallest_sv_t, smallest_sv_t_with, stability_constant_ip1,
    stability_ratio, twin_free_energy, EigenReport, LeastStableMode, Method, Quantity, SvdMethod, SvdOptions,
    VALIDITY_FBAR,
};
pub use prolate::{modal_constants, prolate_eigs, ProlateEigenSystem};
