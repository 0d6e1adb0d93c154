//! Matrix function systems: the substitution rule of a lattice substitution
//! system, its block-structure validation, inflation matrix, and powers.
//!
//! Entry `(i, j)` holds the maps that send a point of color `j` to the
//! points of color `i` it produces. All maps of a system share the
//! expansion `factor^level`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{AffineLatticeMap, LatticeError, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MfsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("inflation factor must be an integer >= 2, got {0}")]
    Factor(BigInt),
    #[error("a system needs at least one color")]
    NoColors,
    #[error("duplicate color name `{0}`")]
    DuplicateColor(String),
    #[error("color index {0} out of range")]
    ColorIndex(usize),
    #[error("map {map} declared twice in entry ({row}, {col})")]
    DuplicateMap { row: usize, col: usize, map: String },
    #[error("power exponent must be at least 1")]
    ZeroPower,
    #[error("systems are not composable (dimension, factor or color count differ)")]
    Incompatible,
    #[error("composition produced map {map} twice in entry ({row}, {col})")]
    Collision { row: usize, col: usize, map: String },
    #[error("system fails block validation:\n{0}")]
    Invalid(BlockReport),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixFunctionSystem {
    dim: usize,
    factor: BigInt,
    colors: Vec<String>,
    level: u32,
    entries: Vec<Vec<BTreeSet<AffineLatticeMap>>>,
}

impl MatrixFunctionSystem {
    /// An empty level-1 system; fill it with [`add_map`](Self::add_map).
    pub fn new(dim: usize, factor: BigInt, colors: Vec<String>) -> Result<Self, MfsError> {
        if dim == 0 {
            return Err(LatticeError::ZeroDimension.into());
        }
        if factor < BigInt::from(2) {
            return Err(MfsError::Factor(factor));
        }
        if colors.is_empty() {
            return Err(MfsError::NoColors);
        }
        let mut seen = BTreeSet::new();
        for c in &colors {
            if !seen.insert(c) {
                return Err(MfsError::DuplicateColor(c.clone()));
            }
        }
        let m = colors.len();
        Ok(MatrixFunctionSystem {
            dim,
            factor,
            colors,
            level: 1,
            entries: vec![vec![BTreeSet::new(); m]; m],
        })
    }

    /// Adds `x -> expansion·x + translation` to entry `(row, col)`.
    pub fn add_map(&mut self, row: usize, col: usize, translation: Point) -> Result<(), MfsError> {
        let m = self.color_count();
        for idx in [row, col] {
            if idx >= m {
                return Err(MfsError::ColorIndex(idx));
            }
        }
        if translation.dim() != self.dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim,
                found: translation.dim(),
            }
            .into());
        }
        let map = AffineLatticeMap::new(self.expansion(), translation)?;
        let text = map.to_string();
        if !self.entries[row][col].insert(map) {
            return Err(MfsError::DuplicateMap {
                row,
                col,
                map: text,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor(&self) -> &BigInt {
        &self.factor
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `factor^level`, the expansion shared by every map.
    pub fn expansion(&self) -> BigInt {
        Pow::pow(&self.factor, self.level)
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.colors.len()
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == name)
    }

    pub fn color_name(&self, idx: usize) -> &str {
        &self.colors[idx]
    }

    pub fn entry(&self, row: usize, col: usize) -> &BTreeSet<AffineLatticeMap> {
        &self.entries[row][col]
    }

    /// All `(row, map)` pairs acting on points of color `col`.
    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, &AffineLatticeMap)> + '_ {
        (0..self.color_count())
            .flat_map(move |row| self.entries[row][col].iter().map(move |f| (row, f)))
    }

    pub fn map_count(&self) -> usize {
        self.entries.iter().flatten().map(BTreeSet::len).sum()
    }

    /// Checks that every column's translations hit each point of
    /// `{0, ..., Q-1}^d` exactly once, where `Q = factor^level`.
    pub fn validate_block_structure(&self) -> BlockReport {
        let q = self.expansion();
        let mut violations = Vec::new();
        for col in 0..self.color_count() {
            let mut hits: BTreeMap<&Point, Vec<usize>> = BTreeMap::new();
            for (row, f) in self.column(col) {
                let t = f.translation();
                if t.coords().iter().any(|c| c < &BigInt::zero() || c >= &q) {
                    violations.push(BlockViolation::OutOfRange {
                        column: col,
                        row,
                        translation: t.clone(),
                    });
                } else {
                    hits.entry(t).or_default().push(row);
                }
            }
            for (t, rows) in &hits {
                if rows.len() > 1 {
                    violations.push(BlockViolation::DuplicateResidue {
                        column: col,
                        residue: (*t).clone(),
                        rows: rows.clone(),
                    });
                }
            }
            let block = Pow::pow(&q, self.dim as u32);
            let missing = block - BigInt::from(hits.len());
            if missing.is_zero() {
                continue;
            }
            match block_points(&q, self.dim) {
                Some(all) => {
                    violations.extend(all.into_iter().filter(|p| !hits.contains_key(p)).map(
                        |residue| BlockViolation::MissingResidue {
                            column: col,
                            residue,
                        },
                    ))
                }
                None => violations.push(BlockViolation::MissingResidueCount {
                    column: col,
                    count: missing,
                }),
            }
        }
        BlockReport {
            colors: self.colors.clone(),
            violations,
        }
    }

    /// Error unless [`validate_block_structure`](Self::validate_block_structure) passes.
    pub fn require_valid(&self) -> Result<(), MfsError> {
        let report = self.validate_block_structure();
        if report.is_valid() {
            Ok(())
        } else {
            Err(MfsError::Invalid(report))
        }
    }

    pub fn inflation_matrix(&self) -> InflationMatrix {
        InflationMatrix {
            counts: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| BigUint::from(e.len())).collect())
                .collect(),
        }
    }

    /// `self ∘ inner`: entry `(i, j)` is the union over `l` of `f∘g` with
    /// `f` in `self[i][l]` and `g` in `inner[l][j]`.
    pub fn compose(&self, inner: &MatrixFunctionSystem) -> Result<MatrixFunctionSystem, MfsError> {
        if self.dim != inner.dim
            || self.factor != inner.factor
            || self.color_count() != inner.color_count()
        {
            return Err(MfsError::Incompatible);
        }
        let m = self.color_count();
        let mut entries = vec![vec![BTreeSet::new(); m]; m];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for l in 0..m {
                    for g in &inner.entries[l][j] {
                        for f in &self.entries[i][l] {
                            let fg = f.compose(g)?;
                            if cell.contains(&fg) {
                                return Err(MfsError::Collision {
                                    row: i,
                                    col: j,
                                    map: fg.to_string(),
                                });
                            }
                            cell.insert(fg);
                        }
                    }
                }
            }
        }
        Ok(MatrixFunctionSystem {
            dim: self.dim,
            factor: self.factor.clone(),
            colors: self.colors.clone(),
            level: self.level + inner.level,
            entries,
        })
    }

    /// The `k`-fold substitution `Φ^k`.
    pub fn power(&self, k: u32) -> Result<MatrixFunctionSystem, MfsError> {
        if k == 0 {
            return Err(MfsError::ZeroPower);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }
}

/// All points of `{0, ..., side-1}^dim`, or `None` when there are more than
/// 2^16 of them.
fn block_points(side: &BigInt, dim: usize) -> Option<Vec<Point>> {
    let s = side.to_u64()?;
    let total = s.checked_pow(dim as u32)?;
    if total > 1 << 16 {
        return None;
    }
    let mut out = Vec::with_capacity(total as usize);
    for mut idx in 0..total {
        let mut coords = vec![BigInt::zero(); dim];
        for c in coords.iter_mut().rev() {
            *c = BigInt::from(idx % s);
            idx /= s;
        }
        out.push(Point::new(coords));
    }
    Some(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BlockViolation {
    MissingResidue {
        column: usize,
        residue: Point,
    },
    MissingResidueCount {
        column: usize,
        count: BigInt,
    },
    DuplicateResidue {
        column: usize,
        residue: Point,
        rows: Vec<usize>,
    },
    OutOfRange {
        column: usize,
        row: usize,
        translation: Point,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockReport {
    colors: Vec<String>,
    pub violations: Vec<BlockViolation>,
}

impl BlockReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for BlockReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            match v {
                BlockViolation::MissingResidue { column, residue } => write!(
                    f,
                    "column {}: missing residue {residue}",
                    self.colors[*column]
                )?,
                BlockViolation::MissingResidueCount { column, count } => write!(
                    f,
                    "column {}: {count} residues missing",
                    self.colors[*column]
                )?,
                BlockViolation::DuplicateResidue {
                    column,
                    residue,
                    rows,
                } => {
                    let names: Vec<&str> = rows.iter().map(|r| self.colors[*r].as_str()).collect();
                    write!(
                        f,
                        "column {}: duplicate residue {residue} in rows {}",
                        self.colors[*column],
                        names.join(",")
                    )?
                }
                BlockViolation::OutOfRange {
                    column,
                    row,
                    translation,
                } => write!(
                    f,
                    "column {}, row {}: translation {translation} out of range",
                    self.colors[*column], self.colors[*row]
                )?,
            }
        }
        Ok(())
    }
}

/// Square matrix of nonnegative counts, `counts[i][j] = #Φ_ij`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InflationMatrix {
    counts: Vec<Vec<BigUint>>,
}

impl InflationMatrix {
    pub fn from_rows(rows: &[&[u64]]) -> Self {
        InflationMatrix {
            counts: rows
                .iter()
                .map(|r| r.iter().map(|&c| BigUint::from(c)).collect())
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.counts[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.counts
    }

    pub fn mul(&self, other: &InflationMatrix) -> InflationMatrix {
        let m = self.size();
        let counts = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|l| &self.counts[i][l] * &other.counts[l][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        InflationMatrix { counts }
    }

    pub fn pow(&self, k: u32) -> InflationMatrix {
        let m = self.size();
        let mut acc = InflationMatrix {
            counts: (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            if i == j {
                                BigUint::one()
                            } else {
                                BigUint::zero()
                            }
                        })
                        .collect()
                })
                .collect(),
        };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Least `k <= (m-1)^2 + 1` with all entries of `M^k` positive, if any.
    pub fn primitivity_exponent(&self) -> Option<u32> {
        let m = self.size();
        if m == 0 {
            return None;
        }
        let pattern: Vec<Vec<bool>> = self
            .counts
            .iter()
            .map(|r| r.iter().map(|c| !c.is_zero()).collect())
            .collect();
        let bound = ((m - 1) * (m - 1) + 1) as u32;
        let mut power = pattern.clone();
        for k in 1..=bound {
            if power.iter().flatten().all(|&b| b) {
                return Some(k);
            }
            power = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| (0..m).any(|l| power[i][l] && pattern[l][j]))
                        .collect()
                })
                .collect();
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }
}

impl fmt::Display for InflationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .counts
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}
