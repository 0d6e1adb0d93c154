use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LatticeError, Point};

/// A full-rank sublattice of `Z^d`, stored as a column Hermite normal form.
///
/// Column `j` of the basis has zeros in rows `0..j`, a positive entry on the
/// diagonal, and every entry left of a diagonal entry lies in
/// `[0, diagonal)` of its row. Two lattices are equal iff their bases are.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntegerLattice {
    columns: Vec<Point>,
}

impl IntegerLattice {
    /// `Z^d` itself.
    pub fn standard(dim: usize) -> Self {
        IntegerLattice {
            columns: (0..dim).map(|axis| Point::unit(dim, axis)).collect(),
        }
    }

    /// Canonical basis of the Z-span of `generators`.
    ///
    /// Fails with [`LatticeError::RankDeficient`] if the span has rank
    /// below `dim`.
    pub fn from_generators(dim: usize, generators: &[Point]) -> Result<Self, LatticeError> {
        if dim == 0 {
            return Err(LatticeError::ZeroDimension);
        }
        for g in generators {
            if g.dim() != dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        let mut work: Vec<Vec<BigInt>> = generators
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.coords().to_vec())
            .collect();
        let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
        for axis in 0..dim {
            let pivot = loop {
                let Some(p) = work
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w[axis].is_zero())
                    .min_by(|(_, a), (_, b)| a[axis].abs().cmp(&b[axis].abs()))
                    .map(|(i, _)| i)
                else {
                    return Err(LatticeError::RankDeficient { dim, rank: axis });
                };
                let pv = work[p].clone();
                let mut settled = true;
                for (k, w) in work.iter_mut().enumerate() {
                    if k == p || w[axis].is_zero() {
                        continue;
                    }
                    let quo = w[axis].div_floor(&pv[axis]);
                    for (wc, pc) in w.iter_mut().zip(&pv) {
                        *wc -= &quo * pc;
                    }
                    if !w[axis].is_zero() {
                        settled = false;
                    }
                }
                if settled {
                    break work.swap_remove(p);
                }
            };
            let pivot = if pivot[axis].is_negative() {
                pivot.into_iter().map(|c| -c).collect()
            } else {
                pivot
            };
            columns.push(pivot);
            work.retain(|w| w.iter().any(|c| !c.is_zero()));
        }
        debug_assert!(work.is_empty());

        for row in 0..dim {
            let (left, right) = columns.split_at_mut(row);
            let diag_col = &right[0];
            let diag = diag_col[row].clone();
            for col in left.iter_mut() {
                let quo = col[row].div_floor(&diag);
                if quo.is_zero() {
                    continue;
                }
                for (c, d) in col.iter_mut().zip(diag_col) {
                    *c -= &quo * d;
                }
            }
        }
        Ok(IntegerLattice {
            columns: columns.into_iter().map(Point::new).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Basis vectors, one per column of the normal form.
    pub fn basis(&self) -> &[Point] {
        &self.columns
    }

    pub fn diagonal(&self) -> impl Iterator<Item = &BigInt> + '_ {
        self.columns.iter().enumerate().map(|(j, c)| &c.coords()[j])
    }

    /// Index of the lattice in `Z^d`.
    pub fn determinant(&self) -> BigInt {
        self.diagonal().fold(BigInt::one(), |acc, d| acc * d)
    }

    /// Canonical representative of `x + self` in the box
    /// `[0, b_00) x ... x [0, b_{d-1,d-1})`.
    pub fn residue(&self, x: &Point) -> Result<Point, LatticeError> {
        if x.dim() != self.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let mut r = x.coords().to_vec();
        for (row, col) in self.columns.iter().enumerate() {
            let quo = r[row].div_floor(&col.coords()[row]);
            if quo.is_zero() {
                continue;
            }
            for (rc, bc) in r.iter_mut().zip(col.coords()) {
                *rc -= &quo * bc;
            }
        }
        Ok(Point::new(r))
    }

    pub fn contains(&self, x: &Point) -> Result<bool, LatticeError> {
        Ok(self.residue(x)?.is_zero())
    }

    pub fn sum(&self, other: &IntegerLattice) -> Result<IntegerLattice, LatticeError> {
        if self.dim() != other.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let gens: Vec<Point> = self.columns.iter().chain(&other.columns).cloned().collect();
        IntegerLattice::from_generators(self.dim(), &gens)
    }

    pub fn scale(&self, s: &BigInt) -> Result<IntegerLattice, LatticeError> {
        if !s.is_positive() {
            return Err(LatticeError::NonPositiveScale(s.clone()));
        }
        let gens: Vec<Point> = self.columns.iter().map(|c| c.scale(s)).collect();
        IntegerLattice::from_generators(self.dim(), &gens)
    }
}

impl fmt::Display for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

pub fn hnf(dim: usize, generators: &[Point]) -> Result<IntegerLattice, LatticeError> {
    IntegerLattice::from_generators(dim, generators)
}

pub fn lattice_sum(a: &IntegerLattice, b: &IntegerLattice) -> Result<IntegerLattice, LatticeError> {
    a.sum(b)
}

pub fn residue(x: &Point, m: &IntegerLattice) -> Result<Point, LatticeError> {
    m.residue(x)
}

pub fn scale_lattice(m: &IntegerLattice, s: &BigInt) -> Result<IntegerLattice, LatticeError> {
    m.scale(s)
}
