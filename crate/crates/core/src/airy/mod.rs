//! Airy function, extended Airy kernel, Airy-process finite-dimensional
//! distributions, and the Tracy–Widom laws F₁, F₂.

mod fdd;
mod function;
mod kernel;
mod painleve;

pub use fdd::{airy_fdd, airy_trace_tail, tw2_nystrom, FddResult, FddSpec};
pub use function::{ai, airy_fn, airy_moment_tail, airy_square_tail, airy_unchecked, SERIES_LIMIT};
pub use kernel::{
    classic_airy_kernel, double_integral_branch, extended_airy_double_integral, extended_airy_kernel,
    extended_airy_kernel_detail, extended_airy_tilde, phi_gaussian, Branch, ExtendedAiryKernelSpec, KernelValue,
};
pub use painleve::{painleve_hastings_mcleod, tw1, tw2, State, TwTables};
