//! Field types the dense linear algebra and the determinantal machinery run over.

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, Num, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::Neg;

/// A field element: real floats, complex floats, or exact rationals.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + Send + Sync + 'static {
    /// Exact arithmetic: no rounding, so conditioning checks are skipped.
    const EXACT: bool;

    /// Modulus as an f64, used for pivot selection and error reporting.
    fn magnitude(&self) -> f64;

    fn from_f64(x: f64) -> Self;

    /// Real and strictly positive (valid as a reference-measure weight).
    fn is_positive(&self) -> bool;

    fn to_complex(&self) -> Complex64;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
}

impl<F> Scalar for Complex<F>
where
    F: Float + Debug + Send + Sync + 'static,
{
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY)
    }
    fn from_f64(x: f64) -> Self {
        Complex::new(F::from(x).unwrap(), F::zero())
    }
    fn is_positive(&self) -> bool {
        self.im.is_zero() && self.re > F::zero()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    /// Exact binary expansion of `x`; panics on non-finite input.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn is_positive(&self) -> bool {
        *self > BigRational::zero()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rational_from_f64_is_exact() {
        let r = BigRational::from_f64(0.375);
        assert_eq!(r, BigRational::new(BigInt::from(3), BigInt::from(8)));
    }

    #[test]
    fn complex_positivity_requires_real() {
        assert!(Complex::new(1.0f64, 0.0).is_positive());
        assert!(!Complex::new(1.0f64, 1e-300).is_positive());
    }
}
