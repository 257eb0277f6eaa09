//! Toeplitz symbols, their Wiener–Hopf split, the n → ∞ kernel, and contour
//! evaluation of the homogeneous PNG kernel and its Airy scaling limit.

mod png_kernel;
mod scaled;
mod symbol;

pub use png_kernel::{
    multi_time_gap, phi_uv, png_kernel, png_kernel_swapped, png_kernel_tilde, single_time_gap, ContourSpec, PngKernelParams,
    SeriesKernel,
};
pub use scaled::{scaled_gap, scaled_kernel_limit, scaled_site, ScaledGap, ScaledKernelPoint};
pub use symbol::{
    inverse_deviation, limit_bound_check, toeplitz_matrix, BoundSample, InverseDeviation, ScalarSymbol, SymbolSystem,
};
