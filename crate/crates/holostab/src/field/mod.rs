//! Grids, sampled fields, supports and the unitary Fourier transform.

mod fourier;
mod grid;
mod sampled;
mod support;

pub use fourier::{apply_multiplier, unitary_ft, unitary_ift};
pub(crate) use fourier::centred_dft;
pub use grid::GridSpec;
pub use sampled::{Domain, SampledField};
pub(crate) use support::apply_mask;
pub use support::{apply_support, Shape, SupportSpec};
