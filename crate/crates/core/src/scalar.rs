//! Scalar abstractions shared by every numeric module.
//!
//! [`Scalar`] is the minimal numeric surface (a signed ordered field-ish
//! type convertible to and from primitives). [`Field`] adds the handful of
//! decisions that differ between exact and floating arithmetic: what counts
//! as zero, and how to rescale a direction vector.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("i64 numerator") / Self::from_i64(den).expect("i64 denominator")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Arithmetic policy for pivoting algorithms (simplex, double description,
/// Fourier-Motzkin). Exact types compare against zero exactly; floating
/// types use an absolute tolerance.
pub trait Field: Scalar {
    const EXACT: bool;

    fn zero_tolerance() -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_tolerance()
    }

    fn is_strictly_positive(&self) -> bool {
        *self > Self::zero_tolerance()
    }

    fn is_strictly_negative(&self) -> bool {
        *self < -Self::zero_tolerance()
    }

    /// Rescale a nonzero direction to a canonical representative with the
    /// same orientation.
    fn normalize_direction(v: &mut [Self]);
}

impl Field for Rational {
    const EXACT: bool = true;

    fn zero_tolerance() -> Self {
        Rational::zero()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_strictly_positive(&self) -> bool {
        self.is_positive()
    }

    fn is_strictly_negative(&self) -> bool {
        self.is_negative()
    }

    fn normalize_direction(v: &mut [Self]) {
        let ints = primitive_integers(v);
        for (slot, n) in v.iter_mut().zip(ints) {
            *slot = Rational::from_integer(n);
        }
    }
}

macro_rules! float_field {
    ($t:ty, $eps:expr) => {
        impl Field for $t {
            const EXACT: bool = false;

            fn zero_tolerance() -> Self {
                $eps
            }

            fn normalize_direction(v: &mut [Self]) {
                let m = v.iter().fold(0.0 as $t, |m, x| m.max(x.abs()));
                if m > 0.0 {
                    for x in v.iter_mut() {
                        *x /= m;
                    }
                }
            }
        }
    };
}

float_field!(f64, 1e-9);
float_field!(f32, 1e-5);

/// Scale a rational vector to the unique primitive integer vector (gcd 1)
/// pointing the same way. The zero vector maps to zeros.
pub fn primitive_integers(v: &[Rational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = v.iter().map(|x| (x.numer() * &lcm) / x.denom()).collect();
    let mut g = BigInt::zero();
    for n in &scaled {
        g = g.gcd(n);
    }
    if g.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|n| n / &g).collect()
}

/// A value produced by a lossy float-to-rational conversion, tagged with
/// the largest absolute rounding error introduced.
#[derive(Clone, Debug)]
pub struct Rationalized<V> {
    pub value: V,
    pub max_error: f64,
}

/// Round `x` to the nearest multiple of `1/den` (ties away from zero).
pub fn rationalize(x: f64, den: u64) -> Rational {
    assert!(den > 0, "denominator bound must be positive");
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    let scaled = (x * den as f64).round();
    let num = BigInt::from_f64(scaled).expect("finite");
    Rational::new(num, BigInt::from(den))
}

/// Render a rational as a decimal string with `digits` fractional digits
/// (truncated toward zero).
pub fn decimal_string(x: &Rational, digits: usize) -> String {
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, digits);
    let scaled = (x.numer() * &scale) / x.denom();
    let neg = scaled.sign() == Sign::Minus || (scaled.is_zero() && x.is_negative());
    let mag = scaled.abs().to_string();
    let mag = if mag.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (int, frac) = mag.split_at(mag.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
