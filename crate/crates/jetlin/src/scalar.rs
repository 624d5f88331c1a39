//! Scalar abstraction over the exact rational lane and the f64 oracle lane.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Elementary transcendental functions the expression kernel knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

/// Field the library computes over. `BigRational` is the exact lane, `f64` the
/// numeric lane. Transcendental primitives are partial: they exist on `f64`
/// and are refused exactly (`None`) on rationals.
pub trait Scalar:
    Num + Signed + Clone + PartialEq + PartialOrd + std::fmt::Debug + std::fmt::Display
{
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self;

    /// Applies a transcendental primitive, or `None` when the lane cannot.
    fn call(f: Func, x: &Self) -> Option<Self>;

    /// Lossy view for diagnostics and tolerance checks.
    fn approx(&self) -> f64;

    fn is_finite_scalar(&self) -> bool;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }

    fn call(_f: Func, _x: &Self) -> Option<Self> {
        None
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_scalar(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn call(f: Func, x: &Self) -> Option<Self> {
        Some(match f {
            Func::Exp => x.exp(),
            Func::Log => {
                if *x <= 0.0 {
                    return None;
                }
                x.ln()
            }
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        })
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn is_finite_scalar(&self) -> bool {
        self.is_finite()
    }
}

/// Exact integer power for any scalar; negative exponents divide.
pub fn powi<T: Scalar>(base: &T, exp: i32) -> Option<T> {
    if exp == 0 {
        return Some(T::one());
    }
    let mut acc = T::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc * base.clone();
    }
    if exp < 0 {
        if acc.is_zero() {
            return None;
        }
        Some(T::one() / acc)
    } else {
        Some(acc)
    }
}

pub fn rat_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}
