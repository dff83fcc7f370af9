use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

use crate::Rational;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Default absolute tolerance for PSD tests and imaginary residues.
    fn default_tol() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
}

/// Ordered field used by the exact code paths (and `f64` for the measure
/// routines, where exactness is not required).
pub trait Field:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    fn floor(&self) -> Self;

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts into the field")
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Field for f64 {
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
}

impl Field for Rational {
    fn floor(&self) -> Self {
        Rational::floor(self)
    }
}
