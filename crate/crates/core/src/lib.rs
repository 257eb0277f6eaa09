//! Discrete polynuclear growth (PNG), its multilayer determinantal structure,
//! and the kernel / Fredholm numerics around it: extended Airy kernel,
//! Tracy–Widom laws, circle walks, and Monte Carlo comparison.

pub mod airy;
pub mod circle;
pub mod determinantal;
pub mod lattice;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod toeplitz;
pub mod verify;

pub use scalar::Scalar;

use num_complex::Complex64;
use num_rational::BigRational;

pub type Real = f64;
pub type Complex = Complex64;
pub type Exact = BigRational;

pub type RealMatrix = linalg::Matrix<f64>;
pub type ComplexMatrix = linalg::Matrix<Complex64>;
pub type ExactMatrix = linalg::Matrix<BigRational>;

pub type RealSystem = determinantal::TransitionSystem<f64>;
pub type ComplexSystem = determinantal::TransitionSystem<Complex64>;
pub type ExactSystem = determinantal::TransitionSystem<BigRational>;

pub type RealBlockKernel = determinantal::BlockKernel<f64>;
pub type ComplexBlockKernel = determinantal::BlockKernel<Complex64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular matrix")]
    Singular,
    #[error("ill-conditioned system: condition number {cond:.3e} exceeds {limit:.1e}")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("enumeration would visit {count} configurations (limit {limit})")]
    SizeGuard { count: f64, limit: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("numerical methods disagree: {0}")]
    Disagreement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
