use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point types the FDR and geometry code can run on.
///
/// Implemented for every type with the listed bounds, in practice `f32` and
/// `f64`. `-log10` is part of the math, so exact rationals are not supported.
pub trait Scalar:
    Float + FromPrimitive + FromStr + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    /// Widen to `f64` for formatting and color math.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    /// Narrow from `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to scalar")
    }

    /// Gap to the next representable value above a positive finite `self`.
    fn spacing_up(self) -> Self {
        let (_, exp, _) = self.integer_decode();
        let exp = i32::from(exp);
        // two halves: 2^exp is representable but 2^-exp may overflow
        let two = Self::of(2.0);
        let ulp = two.powi(exp / 2) * two.powi(exp - exp / 2);
        // subnormals decode with a smaller exponent than their real spacing
        ulp.max(Self::min_positive_value() * Self::epsilon())
    }

    /// Smallest value above a positive finite `self`.
    fn next_up(self) -> Self {
        debug_assert!(self > Self::zero() && self.is_finite());
        self + self.spacing_up()
    }

    /// Largest value below a positive finite `self`.
    fn next_down(self) -> Self {
        debug_assert!(self > Self::zero() && self.is_finite());
        let (mantissa, _, _) = self.integer_decode();
        let gap = self.spacing_up();
        // the gap halves below a power of two, except at the bottom normal
        // binade where subnormal spacing continues
        if self > Self::min_positive_value() && mantissa.is_power_of_two() {
            self - gap / Self::of(2.0)
        } else {
            self - gap
        }
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + FromStr + Debug + Display + Default + Send + Sync + 'static
{
}
