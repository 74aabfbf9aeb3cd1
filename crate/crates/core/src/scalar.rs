//! Numeric abstraction shared by every time, delay and score computation.
//!
//! The library is written once against [`Scalar`] and instantiated with
//! `f64` for production runs and with [`Exact`] (a 64-bit rational) where
//! tests need bit-for-bit comparisons against brute-force oracles.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

pub trait Scalar:
    Num + NumAssign + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Equality used when breaking ties between computed values. Exact for
    /// rationals, relative tolerance for floats.
    fn ties(self, other: Self) -> bool;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar")
    }

    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("real representable in scalar")
    }

    fn to_real(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Total order with `ties` collapsed to `Equal`.
    fn cmp_ties(self, other: Self) -> Ordering {
        if self.ties(other) {
            Ordering::Equal
        } else {
            self.partial_cmp(&other).unwrap_or(Ordering::Equal)
        }
    }

    /// Total order on the raw values; incomparable values (NaN) are equal.
    fn cmp_total(self, other: Self) -> Ordering {
        self.partial_cmp(&other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for f64 {
    fn ties(self, other: Self) -> bool {
        let scale = 1.0f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= 1e-9 * scale
    }
}

impl Scalar for f32 {
    fn ties(self, other: Self) -> bool {
        let scale = 1.0f32.max(self.abs()).max(other.abs());
        (self - other).abs() <= 1e-5 * scale
    }
}

impl Scalar for Exact {
    fn ties(self, other: Self) -> bool {
        self == other
    }
}

/// Wrapper giving a [`Scalar`] a total order so it can key a heap or a sort.
#[derive(Debug, Clone, Copy)]
pub struct Ordered<T>(pub T);

impl<T: Scalar> PartialEq for Ordered<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Ordered<T> {}

impl<T: Scalar> PartialOrd for Ordered<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Ordered<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_total(other.0)
    }
}
