//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the geometry, solver and relaxer are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are written as `f64` literals
/// and converted with [`Scalar::lit`], so on `f32` the tightest defaults are
/// effectively clamped by machine precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    /// Lossy widening used by serialization and reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for `T::lit`.
#[inline]
pub(crate) fn lit<T: Scalar>(value: f64) -> T {
    T::lit(value)
}

/// Wraps an angle into `[0, 2π)`.
pub fn canonical_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut a = theta % tau;
    if a < T::zero() {
        a = a + tau;
    }
    if a >= tau {
        a = a - tau;
    }
    a
}

/// Distance between two angles measured around the circle, in `[0, π]`.
pub fn circular_distance<T: Scalar>(a: T, b: T) -> T {
    let d = canonical_angle(a - b);
    d.min(T::TAU() - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn canonical_angle_wraps() {
        assert_eq!(canonical_angle(0.0_f64), 0.0);
        assert!((canonical_angle(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((canonical_angle(5.0 * PI) - PI).abs() < 1e-14);
        assert!(canonical_angle(2.0 * PI) < 2.0 * PI);
    }

    #[test]
    fn circular_distance_is_symmetric_and_short() {
        assert!((circular_distance(0.1_f64, 2.0 * PI - 0.1) - 0.2).abs() < 1e-14);
        assert!((circular_distance(2.0 * PI - 0.1, 0.1_f64) - 0.2).abs() < 1e-14);
        assert!(circular_distance(1.0_f32, 1.0) == 0.0);
    }
}
