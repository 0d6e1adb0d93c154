use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use super::{LatticeError, Point};

/// An integer affine map `x -> Q x + t` on `Z^d` with scalar expansion `Q >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineLatticeMap {
    expansion: BigInt,
    translation: Point,
}

impl AffineLatticeMap {
    pub fn new(expansion: BigInt, translation: Point) -> Result<Self, LatticeError> {
        if expansion < BigInt::from(2) {
            return Err(LatticeError::Expansion(expansion));
        }
        if translation.dim() == 0 {
            return Err(LatticeError::ZeroDimension);
        }
        Ok(AffineLatticeMap {
            expansion,
            translation,
        })
    }

    pub fn expansion(&self) -> &BigInt {
        &self.expansion
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    pub fn apply(&self, x: &Point) -> Result<Point, LatticeError> {
        check_dims(self.dim(), x.dim())?;
        Ok(&x.scale(&self.expansion) + &self.translation)
    }

    /// `self ∘ inner`, i.e. `x -> Q_o (Q_i x + t_i) + t_o`.
    pub fn compose(&self, inner: &AffineLatticeMap) -> Result<AffineLatticeMap, LatticeError> {
        check_dims(self.dim(), inner.dim())?;
        Ok(AffineLatticeMap {
            expansion: &self.expansion * &inner.expansion,
            translation: &inner.translation.scale(&self.expansion) + &self.translation,
        })
    }
}

fn check_dims(expected: usize, found: usize) -> Result<(), LatticeError> {
    if expected != found {
        return Err(LatticeError::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn apply_map(f: &AffineLatticeMap, x: &Point) -> Result<Point, LatticeError> {
    f.apply(x)
}

pub fn compose_maps(
    outer: &AffineLatticeMap,
    inner: &AffineLatticeMap,
) -> Result<AffineLatticeMap, LatticeError> {
    outer.compose(inner)
}

// Sorted by translation first so that map sets inside one system entry
// (which share an expansion) come out in lexicographic translation order.
impl Ord for AffineLatticeMap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.translation
            .cmp(&other.translation)
            .then_with(|| self.expansion.cmp(&other.expansion))
    }
}

impl PartialOrd for AffineLatticeMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AffineLatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.translation.is_zero() {
            write!(f, "{}x", self.expansion)
        } else {
            write!(f, "{}x+{}", self.expansion, self.translation)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(q: i64, t: &[i64]) -> AffineLatticeMap {
        AffineLatticeMap::new(BigInt::from(q), Point::from_i64s(t)).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            apply_map(&map(2, &[1]), &Point::from_i64s(&[0])).unwrap(),
            Point::from_i64s(&[1])
        );
        assert_eq!(
            apply_map(&map(2, &[0]), &Point::from_i64s(&[5])).unwrap(),
            Point::from_i64s(&[10])
        );
        assert_eq!(
            apply_map(&map(2, &[1, 1]), &Point::from_i64s(&[3, -2])).unwrap(),
            Point::from_i64s(&[7, -3])
        );
    }

    #[test]
    fn compose_examples() {
        assert_eq!(
            compose_maps(&map(2, &[1]), &map(2, &[0])).unwrap(),
            map(4, &[1])
        );
        assert_eq!(
            compose_maps(&map(2, &[0]), &map(2, &[1])).unwrap(),
            map(4, &[2])
        );
        assert_eq!(
            compose_maps(&map(2, &[0]), &map(2, &[0])).unwrap(),
            map(4, &[0])
        );
    }

    #[test]
    fn dimension_mismatch() {
        let err = apply_map(&map(2, &[1, 1]), &Point::from_i64s(&[3])).unwrap_err();
        assert_eq!(
            err,
            LatticeError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
        assert!(compose_maps(&map(2, &[1]), &map(2, &[0, 0])).is_err());
    }

    #[test]
    fn rejects_small_expansion() {
        assert!(AffineLatticeMap::new(BigInt::from(1), Point::from_i64s(&[0])).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(map(2, &[0]).to_string(), "2x");
        assert_eq!(map(4, &[3]).to_string(), "4x+3");
        assert_eq!(map(2, &[1, 0]).to_string(), "2x+(1,0)");
    }
}
