//! Equidistant-sequence witnesses.
//!
//! A witness is an axis-parallel arithmetic progression of stride `r` in a
//! patch whose colors read `a ... a b` (`ℓ-1` copies of `a`, then `b`)
//! periodically, together with two local conditions on the level-1
//! superelements of `a` and `b`:
//!
//! 4. `Φ({0}, a) ⊓ Φ({0}, b)` is empty;
//! 5. some position carries `a` in `Φ({0}, a)` and `b` in `Φ({0}, b)`.
//!
//! A verified witness rules out, on a subset of positive relative density,
//! one-colored lattices whose period along the progression has length
//! `q^k n r` with `k >= 0` and `n` not a multiple of `ℓ`.
//!
//! Only a finite window of the progression is ever checked.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::coincidence::sqcap;
use crate::lattice::Point;
use crate::mfs::MatrixFunctionSystem;
use crate::patch::{substitute, superelement, Patch, PatchError};

pub const DEFAULT_MIN_PERIODS: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("stride must be at least 1")]
    Stride,
    #[error("pattern period must be at least 2, got {0}")]
    Period(u64),
    #[error("the two colors of a witness must differ")]
    SameColor,
    #[error("direction {direction} out of range for dimension {dim}")]
    Direction { direction: usize, dim: usize },
    #[error("pattern window too small: {observed} periods observed, {required} required")]
    WindowTooSmall { observed: u64, required: u64 },
    #[error("patch does not contain the witness window (missing {0})")]
    MissingPoint(Point),
    #[error("witness is not verified")]
    Unverified,
    #[error(transparent)]
    Patch(#[from] PatchError),
}

/// An `a ... a b` progression observed in a patch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SequenceWitness {
    direction: usize,
    stride: u64,
    period: u64,
    a: usize,
    b: usize,
    anchor: Point,
    observed: u64,
}

impl SequenceWitness {
    /// `anchor` is the first `a`; `observed` counts full `ℓ`-periods.
    pub fn new(
        direction: usize,
        stride: u64,
        period: u64,
        a: usize,
        b: usize,
        anchor: Point,
        observed: u64,
    ) -> Result<Self, SequenceError> {
        check_shape(anchor.dim(), direction, stride, period)?;
        if a == b {
            return Err(SequenceError::SameColor);
        }
        Ok(SequenceWitness {
            direction,
            stride,
            period,
            a,
            b,
            anchor,
            observed,
        })
    }

    pub fn direction(&self) -> usize {
        self.direction
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn colors(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn observed(&self) -> u64 {
        self.observed
    }

    /// The `j`-th point of the progression.
    pub fn point(&self, j: u64) -> Point {
        let step =
            Point::unit(self.anchor.dim(), self.direction).scale(&BigInt::from(self.stride * j));
        &self.anchor + &step
    }

    /// The color the pattern prescribes at index `j`.
    pub fn expected_color(&self, j: u64) -> usize {
        if j % self.period == self.period - 1 {
            self.b
        } else {
            self.a
        }
    }

    /// The progression traced by the images at `offset` under one
    /// substitution step: anchor `q·anchor + offset`, stride `q·r`.
    pub fn substituted(&self, factor: u64, offset: &Point) -> SequenceWitness {
        SequenceWitness {
            anchor: &self.anchor.scale(&BigInt::from(factor)) + offset,
            stride: self.stride * factor,
            ..self.clone()
        }
    }
}

fn check_shape(
    dim: usize,
    direction: usize,
    stride: u64,
    period: u64,
) -> Result<(), SequenceError> {
    if stride == 0 {
        return Err(SequenceError::Stride);
    }
    if period < 2 {
        return Err(SequenceError::Period(period));
    }
    if direction >= dim {
        return Err(SequenceError::Direction { direction, dim });
    }
    Ok(())
}

/// Every anchor in `patch` from which the stride-`r` progression along
/// `direction` realizes at least `min_periods` full `a ... a b` periods.
/// Candidates come out in anchor order and are not yet checked against
/// conditions 4 and 5.
pub fn find_sequences(
    patch: &Patch,
    direction: usize,
    stride: u64,
    period: u64,
    min_periods: u64,
) -> Result<Vec<SequenceWitness>, SequenceError> {
    check_shape(patch.dim(), direction, stride, period)?;
    let step = Point::unit(patch.dim(), direction).scale(&BigInt::from(stride));
    let mut out = Vec::new();
    for (anchor, a) in patch.iter() {
        let mut b = None;
        let mut matched = 1u64;
        let mut cursor = anchor + &step;
        while let Some(color) = patch.color_at(&cursor) {
            let ok = if matched % period == period - 1 {
                match b {
                    None if color != a => {
                        b = Some(color);
                        true
                    }
                    Some(bc) => color == bc,
                    None => false,
                }
            } else {
                color == a
            };
            if !ok {
                break;
            }
            matched += 1;
            cursor = &cursor + &step;
        }
        let observed = matched / period;
        if let (Some(b), true) = (b, observed >= min_periods.max(1)) {
            out.push(SequenceWitness {
                direction,
                stride,
                period,
                a,
                b,
                anchor: anchor.clone(),
                observed,
            });
        }
    }
    Ok(out)
}

/// Status of one of the local conditions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Condition {
    Holds,
    Fails,
    /// The system lacks the rules needed to decide it.
    Unavailable,
}

impl Condition {
    fn from_bool(b: bool) -> Self {
        if b {
            Condition::Holds
        } else {
            Condition::Fails
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Condition::Holds)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Holds => "verified",
            Condition::Fails => "failed",
            Condition::Unavailable => "unavailable",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessCheck {
    pub witness: SequenceWitness,
    /// Conditions 1-3: the observed window follows the pattern.
    pub geometry: Condition,
    /// Condition 4: the level-1 superelements of `a` and `b` never agree.
    pub disjoint_superelements: Condition,
    /// Condition 5: first position with `a` in `Φ({0},a)` and `b` in `Φ({0},b)`.
    pub shared_position: Option<Point>,
    /// The window's image contains the progression at `q·anchor + p` with stride `q·r`.
    pub self_reproduction: Condition,
}

impl WitnessCheck {
    pub fn verified(&self) -> bool {
        self.geometry.holds()
            && self.disjoint_superelements.holds()
            && self.shared_position.is_some()
    }
}

/// Whether a level-1 superelement fills the block `{0, ..., q-1}^d`.
fn is_full_block(patch: &Patch, expansion: &BigInt, dim: usize) -> bool {
    let size: BigInt = Pow::pow(expansion, dim as u32);
    BigInt::from(patch.len()) == size
        && patch
            .support()
            .all(|p| p.coords().iter().all(|c| !c.is_negative() && c < expansion))
}

/// Checks a witness against `patch` (conditions 1-3 on its observed window)
/// and against the rules of `sys` (conditions 4 and 5).
pub fn check_witness_conditions(
    sys: &MatrixFunctionSystem,
    witness: &SequenceWitness,
    patch: &Patch,
    min_periods: u64,
) -> Result<WitnessCheck, SequenceError> {
    if witness.observed < min_periods.max(1) {
        return Err(SequenceError::WindowTooSmall {
            observed: witness.observed,
            required: min_periods.max(1),
        });
    }
    let mut geometry = true;
    for j in 0..witness.observed * witness.period {
        let x = witness.point(j);
        let Some(color) = patch.color_at(&x) else {
            return Err(SequenceError::MissingPoint(x));
        };
        geometry &= color == witness.expected_color(j);
    }

    let expansion = sys.expansion();
    let sa = superelement(sys, witness.a, 1)?;
    let sb = superelement(sys, witness.b, 1)?;
    let (disjoint, shared) =
        if is_full_block(&sa, &expansion, sys.dim()) && is_full_block(&sb, &expansion, sys.dim()) {
            let agree =
                sqcap(&sa, &sb).map_err(|_| SequenceError::MissingPoint(Point::zero(sys.dim())))?;
            let shared = sa
                .iter()
                .find(|(p, c)| *c == witness.a && sb.color_at(p) == Some(witness.b))
                .map(|(p, _)| p.clone());
            (Condition::from_bool(agree.is_empty()), shared)
        } else {
            (Condition::Unavailable, None)
        };

    let self_reproduction = match (&shared, expansion.to_u64()) {
        (Some(offset), Some(q)) if geometry => {
            let image = witness.substituted(q, offset);
            let len = witness.observed * witness.period;
            let window = Patch::from_points(
                sys.dim(),
                (0..len).map(|j| (witness.point(j), witness.expected_color(j))),
            )
            .expect("progression points are distinct");
            let reproduced = match substitute(sys, &window) {
                Ok(big) => (0..len)
                    .all(|j| big.color_at(&image.point(j)) == Some(witness.expected_color(j))),
                Err(_) => false,
            };
            Condition::from_bool(reproduced)
        }
        _ => Condition::Unavailable,
    };

    Ok(WitnessCheck {
        witness: witness.clone(),
        geometry: Condition::from_bool(geometry),
        disjoint_superelements: disjoint,
        shared_position: shared,
        self_reproduction,
    })
}

/// The lengths ruled out as lattice periods along the witness direction:
/// `{ q^k n r : k >= 0, n >= 1, ℓ ∤ n }`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExclusionReport {
    pub witness: SequenceWitness,
    pub factor: BigInt,
    /// Where condition 5 holds.
    pub shared_position: Point,
}

impl ExclusionReport {
    pub fn direction(&self) -> usize {
        self.witness.direction
    }

    /// Whether `length = q^k n r` for some `k >= 0` and `n` not divisible by `ℓ`.
    pub fn excludes(&self, length: &BigInt) -> bool {
        if !length.is_positive() {
            return false;
        }
        let ell = BigInt::from(self.witness.period);
        let mut unit = BigInt::from(self.witness.stride);
        while &unit <= length {
            let (n, rem) = length.div_rem(&unit);
            if rem.is_zero() && !n.is_multiple_of(&ell) {
                return true;
            }
            unit *= &self.factor;
        }
        false
    }

    pub fn describe(&self) -> String {
        format!(
            "{{ {}^k * n * {} : k >= 0, n not a multiple of {} }} along axis {}",
            self.factor, self.witness.stride, self.witness.period, self.witness.direction
        )
    }
}

/// Builds the exclusion set for a fully verified witness.
pub fn exclusion_report(
    sys: &MatrixFunctionSystem,
    check: &WitnessCheck,
) -> Result<ExclusionReport, SequenceError> {
    if !check.verified() {
        return Err(SequenceError::Unverified);
    }
    Ok(ExclusionReport {
        witness: check.witness.clone(),
        factor: sys.factor().clone(),
        shared_position: check.shared_position.clone().expect("verified"),
    })
}
