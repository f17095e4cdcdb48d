//! Real scalar abstraction and the tolerance context shared by all checks.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Real scalar type underlying all complex matrix arithmetic.
///
/// Implemented for `f32` and `f64`. Every operation in this crate is generic
/// over the scalar; the crate root exports `f64` aliases for the common types.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default tolerance set for this scalar type.
    fn default_tolerances() -> Tolerances<Self>;

    /// Lossy conversion from `f64`, for constants baked into formulas.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Scalar")
    }

    /// Lossy conversion from `usize` (dimensions, group orders).
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("small usize converts to any Scalar")
    }
}

impl Scalar for f64 {
    fn default_tolerances() -> Tolerances<f64> {
        Tolerances {
            eq: 1e-10,
            psd: 1e-9,
            rank: 1e-8,
            ic: 1e-8,
            boundary: 1e-9,
            prob: 1e-12,
        }
    }
}

impl Scalar for f32 {
    fn default_tolerances() -> Tolerances<f32> {
        Tolerances {
            eq: 1e-4,
            psd: 1e-4,
            rank: 1e-4,
            ic: 1e-4,
            boundary: 1e-5,
            prob: 1e-5,
        }
    }
}

/// Tolerance context used by equality, positivity and rank decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Entrywise operator equality (max-norm).
    pub eq: T,
    /// Eigenvalue floor for positive semidefiniteness checks.
    pub psd: T,
    /// Relative singular value threshold for numerical rank.
    pub rank: T,
    /// Absolute threshold below which a Weyl coefficient counts as vanishing.
    pub ic: T,
    /// Margin applied to the joint-measurability boundary.
    pub boundary: T,
    /// Probability normalization and nonnegativity slack.
    pub prob: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        T::default_tolerances()
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Replace the operator-equality tolerance, keeping the rest.
    pub fn with_eq(mut self, eq: T) -> Self {
        self.eq = eq;
        self
    }
}
