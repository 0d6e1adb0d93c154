use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A point of `Z^d` in lattice coordinates.
///
/// Points order lexicographically by coordinate, which is the canonical
/// order used for patches and map sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point(Vec<BigInt>);

impl Point {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Point(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![BigInt::zero(); dim])
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The unit vector along axis `axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut p = Point::zero(dim);
        p.0[axis] = BigInt::from(1);
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &BigInt) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    /// Max-norm of the coordinate vector.
    pub fn max_norm(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Coordinates as `i64`, if all of them fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

impl Add<&Point> for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Point> for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// One-dimensional points print as a bare integer, higher dimensions as a
/// parenthesized tuple.
impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
