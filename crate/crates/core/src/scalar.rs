use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the numerical code is generic over.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + std::fmt::Display + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// A tolerance stated for `f64`, widened to a few hundred ulps for
/// lower-precision scalars.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(256.0);
    let t = lit::<T>(x);
    if t > floor {
        t
    } else {
        floor
    }
}
