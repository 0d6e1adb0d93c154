//! Finite colored point sets and their growth under substitution.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Pow, Signed, ToPrimitive};
use thiserror::Error;

use crate::lattice::{LatticeError, Point};
use crate::mfs::{MatrixFunctionSystem, MfsError};

pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_SEED_BOUND: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error(transparent)]
    Mfs(#[from] MfsError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("point {point} produced with colors {existing} and {incoming}")]
    Overlap {
        point: Point,
        existing: usize,
        incoming: usize,
    },
    #[error("patch would need {needed} points, budget is {budget}")]
    Budget { needed: BigInt, budget: u64 },
    #[error("no fixed-point seed within {bound} powers")]
    NoSeed { bound: u32 },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Provenance {
    pub seed_color: usize,
    pub iterations: u32,
}

/// A finite map from points of `Z^d` to color indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Patch {
    dim: usize,
    points: BTreeMap<Point, usize>,
    provenance: Option<Provenance>,
}

impl Patch {
    pub fn empty(dim: usize) -> Self {
        Patch {
            dim,
            points: BTreeMap::new(),
            provenance: None,
        }
    }

    /// The one-point patch `({x}, color)`.
    pub fn single(x: Point, color: usize) -> Self {
        let mut p = Patch::empty(x.dim());
        p.points.insert(x, color);
        p.provenance = Some(Provenance {
            seed_color: color,
            iterations: 0,
        });
        p
    }

    pub fn from_points(
        dim: usize,
        points: impl IntoIterator<Item = (Point, usize)>,
    ) -> Result<Self, PatchError> {
        let mut p = Patch::empty(dim);
        for (x, c) in points {
            p.insert(x, c)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, x: Point, color: usize) -> Result<(), PatchError> {
        if x.dim() != self.dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            }
            .into());
        }
        match self.points.entry(x) {
            Entry::Vacant(v) => {
                v.insert(color);
                Ok(())
            }
            Entry::Occupied(o) => Err(PatchError::Overlap {
                point: o.key().clone(),
                existing: *o.get(),
                incoming: color,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn color_at(&self, x: &Point) -> Option<usize> {
        self.points.get(x).copied()
    }

    /// Points with their colors, in lexicographic point order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, usize)> + '_ {
        self.points.iter().map(|(p, &c)| (p, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> + '_ {
        self.points.keys()
    }

    pub fn points_of_color(&self, color: usize) -> impl Iterator<Item = &Point> + '_ {
        self.points
            .iter()
            .filter(move |(_, &c)| c == color)
            .map(|(p, _)| p)
    }

    pub fn color_count(&self, color: usize) -> usize {
        self.points.values().filter(|&&c| c == color).count()
    }

    /// Componentwise minimum of the support.
    pub fn min_corner(&self) -> Option<Point> {
        self.corner(|a, b| a.min(b))
    }

    /// Componentwise maximum of the support.
    pub fn max_corner(&self) -> Option<Point> {
        self.corner(|a, b| a.max(b))
    }

    fn corner(&self, pick: impl Fn(BigInt, BigInt) -> BigInt) -> Option<Point> {
        let mut keys = self.points.keys();
        let first = keys.next()?.coords().to_vec();
        let coords = keys.fold(first, |acc, p| {
            acc.into_iter()
                .zip(p.coords())
                .map(|(a, b)| pick(a, b.clone()))
                .collect()
        });
        Some(Point::new(coords))
    }

    pub fn is_subpatch_of(&self, other: &Patch) -> bool {
        self.points
            .iter()
            .all(|(p, c)| other.points.get(p) == Some(c))
    }

    /// The points lying in `{0, ..., side-1}^d`.
    pub fn restrict_to_block(&self, side: &BigInt) -> Patch {
        let zero = BigInt::from(0);
        Patch {
            dim: self.dim,
            points: self
                .points
                .iter()
                .filter(|(p, _)| p.coords().iter().all(|c| c >= &zero && c < side))
                .map(|(p, &c)| (p.clone(), c))
                .collect(),
            provenance: None,
        }
    }

    /// Smallest nonzero vector `v` with `|v|_inf <= radius` under which the
    /// patch agrees with its own translate wherever both are defined.
    ///
    /// Only one of `v`, `-v` is tried; candidates run by increasing norm,
    /// then lexicographically.
    pub fn find_period(&self, radius: u32) -> Option<Point> {
        let r = radius as i64;
        let mut candidates: Vec<Vec<i64>> = Vec::new();
        let mut cur = vec![-r; self.dim];
        loop {
            let first_nonzero = cur.iter().find(|&&c| c != 0);
            if matches!(first_nonzero, Some(&c) if c > 0) {
                candidates.push(cur.clone());
            }
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    candidates
                        .sort_by_key(|v| (v.iter().map(|c| c.abs()).max().unwrap_or(0), v.clone()));
                    return candidates
                        .into_iter()
                        .map(|v| Point::from_i64s(&v))
                        .find(|v| self.is_period(v));
                }
                axis -= 1;
                if cur[axis] < r {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = -r;
            }
        }
    }

    /// Whether the patch agrees with its translate by `v` on the overlap,
    /// and the overlap is nonempty.
    pub fn is_period(&self, v: &Point) -> bool {
        let mut overlap = false;
        for (p, c) in &self.points {
            if let Some(other) = self.points.get(&(p + v)) {
                if other != c {
                    return false;
                }
                overlap = true;
            }
        }
        overlap
    }
}

/// Replaces each point `(x, j)` by `{(φ(x), i) : φ ∈ Φ_ij}`.
pub fn substitute(sys: &MatrixFunctionSystem, patch: &Patch) -> Result<Patch, PatchError> {
    if patch.dim != sys.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: sys.dim(),
            found: patch.dim,
        }
        .into());
    }
    let mut out = Patch::empty(patch.dim);
    for (x, j) in patch.iter() {
        for (i, f) in sys.column(j) {
            out.insert(f.apply(x)?, i)?;
        }
    }
    out.provenance = patch.provenance.map(|p| Provenance {
        seed_color: p.seed_color,
        iterations: p.iterations + 1,
    });
    Ok(out)
}

/// `Φ^k(({0}, color))`, computed by `k` rounds of [`substitute`].
pub fn superelement(sys: &MatrixFunctionSystem, color: usize, k: u32) -> Result<Patch, PatchError> {
    if color >= sys.color_count() {
        return Err(MfsError::ColorIndex(color).into());
    }
    let mut patch = Patch::single(Point::zero(sys.dim()), color);
    for _ in 0..k {
        patch = substitute(sys, &patch)?;
    }
    Ok(patch)
}

/// A color `i` and level `k` such that `(Φ^k)_ii` contains `x -> Qx`, so
/// that the point `({0}, i)` is fixed by `Φ^k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Seed {
    pub color: usize,
    pub level: u32,
}

/// Least level (then least color) with a zero-translation diagonal map.
pub fn find_seed(sys: &MatrixFunctionSystem, bound: u32) -> Result<Seed, PatchError> {
    let mut power = sys.clone();
    for level in 1..=bound {
        if level > 1 {
            power = power.compose(sys)?;
        }
        let hit = (0..power.color_count())
            .find(|&i| power.entry(i, i).iter().any(|f| f.translation().is_zero()));
        if let Some(color) = hit {
            return Ok(Seed { color, level });
        }
    }
    Err(PatchError::NoSeed { bound })
}

/// Upper bound on the size of `generate(sys, seed, iterations)`.
pub fn generated_size(sys: &MatrixFunctionSystem, seed: Seed, iterations: u32) -> BigInt {
    let side: BigInt = Pow::pow(sys.expansion(), seed.level * iterations);
    Pow::pow(side, sys.dim() as u32)
}

/// The fixed-point patch `(Φ^level)^iterations(({0}, color))`, which fills
/// the block `{0, ..., Q^iterations - 1}^d` for a valid system.
pub fn generate(
    sys: &MatrixFunctionSystem,
    seed: Seed,
    iterations: u32,
    budget: u64,
) -> Result<Patch, PatchError> {
    let needed = generated_size(sys, seed, iterations);
    if needed.is_negative() || needed.to_u64().is_none_or(|n| n > budget) {
        return Err(PatchError::Budget { needed, budget });
    }
    let power = sys.power(seed.level)?;
    superelement(&power, seed.color, iterations)
}

#[cfg(test)]
impl Patch {
    fn with_provenance(mut self, seed_color: usize, iterations: u32) -> Self {
        self.provenance = Some(Provenance {
            seed_color,
            iterations,
        });
        self
    }

    fn without_provenance(mut self) -> Self {
        self.provenance = None;
        self
    }
}
