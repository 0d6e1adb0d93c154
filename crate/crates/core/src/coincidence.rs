//! Deciding whether a lattice substitution system consists of model sets.
//!
//! Two routes are combined by [`analyze`]:
//!
//! * negative: if the entries of every row of `Φ` are pairwise disjoint and
//!   the system is primitive and nonperiodic, no color class contains a
//!   translate of a full lattice, so the system is not a model set;
//! * positive: a modular coincidence relative to `q^k L'` in `Φ^k`, where
//!   `L'` is the sum of the difference lattices of the color classes.
//!
//! The coincidence search cannot terminate on negative instances, so it is
//! bounded by `k_max`; running out yields [`Verdict::Unknown`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Pow;
use thiserror::Error;

use crate::lattice::{AffineLatticeMap, IntegerLattice, LatticeError, Point};
use crate::mfs::{MatrixFunctionSystem, MfsError};
use crate::patch::{self, Patch, PatchError, Seed};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Mfs(#[from] MfsError),
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("superelement supports are not translates of each other")]
    NonCongruent,
    #[error("color lattices did not stabilize within the point budget (last level {level})")]
    CosetsUnstable { level: u32 },
    #[error("color {color} point {point} lies outside its L' coset")]
    CosetViolation { color: usize, point: Point },
}

impl AnalysisError {
    /// Whether the failure is a resource limit rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            AnalysisError::Patch(PatchError::Budget { .. }) | AnalysisError::CosetsUnstable { .. }
        )
    }
}

/// Points of `a` on which `a` and `b` carry the same color, after aligning
/// `b` onto `a` by the translation between their minimal corners.
pub fn sqcap(a: &Patch, b: &Patch) -> Result<BTreeSet<Point>, AnalysisError> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return Err(AnalysisError::NonCongruent);
    }
    let (Some(ca), Some(cb)) = (a.min_corner(), b.min_corner()) else {
        return Ok(BTreeSet::new());
    };
    let t = &cb - &ca;
    let mut out = BTreeSet::new();
    for (z, color) in a.iter() {
        match b.color_at(&(z + &t)) {
            None => return Err(AnalysisError::NonCongruent),
            Some(other) if other == color => {
                out.insert(z.clone());
            }
            Some(_) => {}
        }
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RowDisjointness {
    Disjoint,
    /// First shared map, in (row, column pair, map) order.
    Overlap {
        row: usize,
        cols: (usize, usize),
        map: AffineLatticeMap,
    },
}

impl RowDisjointness {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, RowDisjointness::Disjoint)
    }
}

pub fn row_disjointness(sys: &MatrixFunctionSystem) -> RowDisjointness {
    let m = sys.color_count();
    for row in 0..m {
        for a in 0..m {
            for b in a + 1..m {
                if let Some(map) = sys.entry(row, a).intersection(sys.entry(row, b)).next() {
                    return RowDisjointness::Overlap {
                        row,
                        cols: (a, b),
                        map: map.clone(),
                    };
                }
            }
        }
    }
    RowDisjointness::Disjoint
}

/// Difference lattices of the color classes of a fixed-point patch, their
/// sum `L'`, and one representative per `L'`-coset holding each color.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColorCosetData {
    pub color_lattices: Vec<IntegerLattice>,
    pub modulus: IntegerLattice,
    pub cosets: Vec<Point>,
    /// Patch iteration count at which the data was taken.
    pub level: u32,
}

impl ColorCosetData {
    fn from_patch(patch: &Patch, colors: usize, level: u32) -> Result<Option<Self>, AnalysisError> {
        let dim = patch.dim();
        let mut lattices = Vec::with_capacity(colors);
        let mut bases = Vec::with_capacity(colors);
        for color in 0..colors {
            let mut pts = patch.points_of_color(color);
            let Some(base) = pts.next() else {
                return Ok(None);
            };
            let diffs: Vec<Point> = pts.map(|p| p - base).collect();
            match IntegerLattice::from_generators(dim, &diffs) {
                Ok(l) => lattices.push(l),
                Err(LatticeError::RankDeficient { .. }) => return Ok(None),
                Err(e) => return Err(e.into()),
            }
            bases.push(base.clone());
        }
        let mut modulus = lattices[0].clone();
        for l in &lattices[1..] {
            modulus = modulus.sum(l)?;
        }
        let cosets = bases
            .iter()
            .map(|b| modulus.residue(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(ColorCosetData {
            color_lattices: lattices,
            modulus,
            cosets,
            level,
        }))
    }

    fn same_lattices(&self, other: &ColorCosetData) -> bool {
        self.color_lattices == other.color_lattices
            && self.modulus == other.modulus
            && self.cosets == other.cosets
    }

    /// Every point of `patch` must lie in the coset of its color.
    pub fn check_patch(&self, patch: &Patch) -> Result<(), AnalysisError> {
        for (p, color) in patch.iter() {
            if !self.modulus.contains(&(p - &self.cosets[color]))? {
                return Err(AnalysisError::CosetViolation {
                    color,
                    point: p.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Grows the fixed-point patch of `seed` one iteration at a time until the
/// color lattices and cosets agree on two consecutive levels.
pub fn compute_color_cosets(
    sys: &MatrixFunctionSystem,
    seed: Seed,
    budget: u64,
) -> Result<ColorCosetData, AnalysisError> {
    let power = sys.power(seed.level)?;
    let mut patch = Patch::single(Point::zero(sys.dim()), seed.color);
    let mut previous: Option<ColorCosetData> = None;
    let mut level = 0;
    loop {
        if patch::generated_size(sys, seed, level + 1) > BigInt::from(budget) {
            return Err(AnalysisError::CosetsUnstable { level });
        }
        level += 1;
        patch = patch::substitute(&power, &patch)?;
        let current = ColorCosetData::from_patch(&patch, sys.color_count(), level)?;
        // A coset violation means the previous level under-approximated L';
        // keep growing.
        if let (Some(prev), Some(cur)) = (&previous, &current) {
            if prev.same_lattices(cur) && cur.check_patch(&patch).is_ok() {
                return Ok(prev.clone());
            }
        }
        previous = current;
    }
}

/// The residue class `Q c_j + t mod Q L'` of the map `x -> Qx + t` acting on
/// color `col`.
pub fn coincidence_key(
    map: &AffineLatticeMap,
    col: usize,
    cosets: &ColorCosetData,
    scaled_modulus: &IntegerLattice,
) -> Result<Point, AnalysisError> {
    let image = &cosets.cosets[col].scale(map.expansion()) + map.translation();
    Ok(scaled_modulus.residue(&image)?)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coincidence {
    pub k: u32,
    pub residue: Point,
    pub row: usize,
    /// `q^k L'` (for a level-1 system).
    pub modulus: IntegerLattice,
    /// The maps of `Φ^k` in the residue's fiber, as `(row, col, map)`.
    pub fiber: Vec<(usize, usize, AffineLatticeMap)>,
    /// Set when some row of `Φ^k` had an element common to all its entries.
    pub common_row_element: Option<(usize, AffineLatticeMap)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoincidenceSearch {
    Found(Coincidence),
    NotFound { k_max: u32 },
}

/// A row whose entries all share one map.
pub fn common_row_element(sys: &MatrixFunctionSystem) -> Option<(usize, AffineLatticeMap)> {
    (0..sys.color_count()).find_map(|row| {
        let mut entries = (0..sys.color_count()).map(|col| sys.entry(row, col));
        let first = entries.next()?;
        let mut common: BTreeSet<&AffineLatticeMap> = first.iter().collect();
        for e in entries {
            common.retain(|f| e.contains(*f));
        }
        common.into_iter().next().map(|f| (row, f.clone()))
    })
}

fn coincidence_at(
    power: &MatrixFunctionSystem,
    k: u32,
    cosets: &ColorCosetData,
) -> Result<Option<Coincidence>, AnalysisError> {
    let scaled = cosets.modulus.scale(&power.expansion())?;
    let mut fibers: BTreeMap<Point, Vec<(usize, usize, AffineLatticeMap)>> = BTreeMap::new();
    for col in 0..power.color_count() {
        for (row, f) in power.column(col) {
            let key = coincidence_key(f, col, cosets, &scaled)?;
            fibers.entry(key).or_default().push((row, col, f.clone()));
        }
    }
    let hit = fibers
        .into_iter()
        .find(|(_, fiber)| fiber.iter().all(|(r, _, _)| *r == fiber[0].0));
    Ok(hit.map(|(residue, mut fiber)| {
        fiber.sort();
        Coincidence {
            k,
            residue,
            row: fiber[0].0,
            modulus: scaled,
            fiber,
            common_row_element: common_row_element(power),
        }
    }))
}

/// Searches `Φ, Φ^2, ..., Φ^k_max` for a modular coincidence; the witness
/// has the least `k` and, within it, the least residue.
pub fn modular_coincidence(
    sys: &MatrixFunctionSystem,
    cosets: &ColorCosetData,
    k_max: u32,
) -> Result<CoincidenceSearch, AnalysisError> {
    let mut power = sys.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = power.compose(sys)?;
        }
        if let Some(c) = coincidence_at(&power, k, cosets)? {
            return Ok(CoincidenceSearch::Found(c));
        }
    }
    Ok(CoincidenceSearch::NotFound { k_max })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AnalysisOptions {
    pub k_max: u32,
    pub seed_bound: u32,
    pub budget: u64,
    pub assume_nonperiodic: bool,
    pub period_scan_radius: u32,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            k_max: 8,
            seed_bound: patch::DEFAULT_SEED_BOUND,
            budget: patch::DEFAULT_POINT_BUDGET,
            assume_nonperiodic: false,
            period_scan_radius: 8,
        }
    }
}

/// Result of scanning a fixed-point patch for small periods.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PeriodScan {
    pub radius: u32,
    pub iterations: u32,
    /// Side length of the scanned block.
    pub side: BigInt,
    pub period: Option<Point>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Nonperiodicity {
    /// No period of norm at most `radius` in the scanned patch.
    Scanned(PeriodScan),
    /// Asserted by the caller.
    Assumed,
}

/// Scans the smallest fixed-point patch whose side is at least four times
/// the radius.
pub fn scan_periods(
    sys: &MatrixFunctionSystem,
    seed: Seed,
    radius: u32,
    budget: u64,
) -> Result<PeriodScan, AnalysisError> {
    let want = BigInt::from(4 * radius.max(1));
    let step = sys.expansion();
    let mut iterations = 1;
    let mut side: BigInt = Pow::pow(&step, seed.level);
    while side < want {
        iterations += 1;
        side = Pow::pow(&step, seed.level * iterations);
    }
    let patch = patch::generate(sys, seed, iterations, budget)?;
    Ok(PeriodScan {
        radius,
        iterations,
        side,
        period: patch.find_period(radius),
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UnknownReason {
    NotPrimitive,
    NoSeed { bound: u32 },
    BoundReached { k_max: u32 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NotModelSetWitness {
    RowDisjointness {
        primitivity_exponent: u32,
        nonperiodicity: Nonperiodicity,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    ModelSet(Coincidence),
    NotModelSet(NotModelSetWitness),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn outcome(&self) -> &'static str {
        match self {
            Verdict::ModelSet(_) => "MODEL_SET",
            Verdict::NotModelSet(_) => "NOT_MODEL_SET",
            Verdict::Unknown(_) => "UNKNOWN",
        }
    }
}

/// Everything gathered on the way to a verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Evidence {
    pub primitivity_exponent: Option<u32>,
    pub seed: Option<Seed>,
    pub row_disjointness: RowDisjointness,
    pub nonperiodicity: Option<Nonperiodicity>,
    pub cosets: Option<ColorCosetData>,
    pub searched_k: Option<u32>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Analysis {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Runs the full pipeline: primitivity, nonperiodicity evidence,
/// row-disjointness, then the bounded coincidence search.
pub fn analyze(
    sys: &MatrixFunctionSystem,
    opts: &AnalysisOptions,
) -> Result<Analysis, AnalysisError> {
    sys.require_valid()?;
    let mut evidence = Evidence {
        primitivity_exponent: sys.inflation_matrix().primitivity_exponent(),
        seed: None,
        row_disjointness: row_disjointness(sys),
        nonperiodicity: None,
        cosets: None,
        searched_k: None,
    };
    let Some(exponent) = evidence.primitivity_exponent else {
        return Ok(Analysis {
            verdict: Verdict::Unknown(UnknownReason::NotPrimitive),
            evidence,
        });
    };
    evidence.seed = patch::find_seed(sys, opts.seed_bound).ok();

    if opts.assume_nonperiodic {
        evidence.nonperiodicity = Some(Nonperiodicity::Assumed);
    } else if let Some(seed) = evidence.seed {
        let scan = scan_periods(sys, seed, opts.period_scan_radius, opts.budget)?;
        evidence.nonperiodicity = Some(Nonperiodicity::Scanned(scan));
    }
    let nonperiodic = match &evidence.nonperiodicity {
        Some(Nonperiodicity::Assumed) => true,
        Some(Nonperiodicity::Scanned(scan)) => scan.period.is_none(),
        None => false,
    };
    if nonperiodic && evidence.row_disjointness.is_disjoint() {
        let nonperiodicity = evidence.nonperiodicity.clone().expect("set above");
        return Ok(Analysis {
            verdict: Verdict::NotModelSet(NotModelSetWitness::RowDisjointness {
                primitivity_exponent: exponent,
                nonperiodicity,
            }),
            evidence,
        });
    }

    let Some(seed) = evidence.seed else {
        return Ok(Analysis {
            verdict: Verdict::Unknown(UnknownReason::NoSeed {
                bound: opts.seed_bound,
            }),
            evidence,
        });
    };
    let cosets = compute_color_cosets(sys, seed, opts.budget)?;
    let search = modular_coincidence(sys, &cosets, opts.k_max)?;
    evidence.cosets = Some(cosets);
    let verdict = match search {
        CoincidenceSearch::Found(c) => {
            evidence.searched_k = Some(c.k);
            assert!(
                !(nonperiodic && evidence.row_disjointness.is_disjoint()),
                "coincidence found for a row-disjoint nonperiodic system"
            );
            Verdict::ModelSet(c)
        }
        CoincidenceSearch::NotFound { k_max } => {
            evidence.searched_k = Some(k_max);
            Verdict::Unknown(UnknownReason::BoundReached { k_max })
        }
    };
    Ok(Analysis { verdict, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::patch::{find_seed, superelement};

    fn p(c: &[i64]) -> Point {
        Point::from_i64s(c)
    }

    fn lat1(n: i64) -> IntegerLattice {
        IntegerLattice::from_generators(1, &[p(&[n])]).unwrap()
    }

    fn cosets_of(sys: &MatrixFunctionSystem) -> ColorCosetData {
        compute_color_cosets(sys, find_seed(sys, 8).unwrap(), patch::DEFAULT_POINT_BUDGET).unwrap()
    }

    #[test]
    fn sqcap_examples() {
        let tm = corpus::thue_morse();
        let a = superelement(&tm, 0, 1).unwrap();
        let b = superelement(&tm, 1, 1).unwrap();
        assert!(sqcap(&a, &b).unwrap().is_empty());
        assert_eq!(sqcap(&a, &a).unwrap(), a.support().cloned().collect());

        let boxes = corpus::box_fragment();
        let five = boxes.color_index("5").unwrap();
        let eleven = boxes.color_index("11").unwrap();
        let a = superelement(&boxes, five, 1).unwrap();
        let b = superelement(&boxes, eleven, 1).unwrap();
        assert_eq!(a.len(), 8);
        assert!(sqcap(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn sqcap_aligns_translated_blocks() {
        let tm = corpus::thue_morse();
        let a = superelement(&tm, 0, 2).unwrap();
        let shifted = Patch::from_points(1, a.iter().map(|(x, c)| (x + &p(&[12]), c))).unwrap();
        assert_eq!(sqcap(&a, &shifted).unwrap().len(), 4);
        let short = superelement(&tm, 0, 1).unwrap();
        assert_eq!(sqcap(&a, &short), Err(AnalysisError::NonCongruent));
        let gappy = Patch::from_points(1, [(p(&[0]), 0), (p(&[2]), 0)]).unwrap();
        assert_eq!(sqcap(&short, &gappy), Err(AnalysisError::NonCongruent));
    }

    #[test]
    fn row_disjointness_examples() {
        assert!(row_disjointness(&corpus::thue_morse()).is_disjoint());
        assert!(row_disjointness(&corpus::table()).is_disjoint());
        let pd = corpus::period_doubling();
        let expected_map = pd.entry(0, 0).iter().next().unwrap().clone();
        assert_eq!(expected_map.to_string(), "2x");
        assert_eq!(
            row_disjointness(&pd),
            RowDisjointness::Overlap {
                row: 0,
                cols: (0, 1),
                map: expected_map
            }
        );
    }

    #[test]
    fn row_disjointness_matches_level_one_sqcap() {
        for sys in corpus::valid_systems() {
            let m = sys.color_count();
            let mut all_empty = true;
            for a in 0..m {
                for b in a + 1..m {
                    let sa = superelement(&sys, a, 1).unwrap();
                    let sb = superelement(&sys, b, 1).unwrap();
                    all_empty &= sqcap(&sa, &sb).unwrap().is_empty();
                }
            }
            assert_eq!(row_disjointness(&sys).is_disjoint(), all_empty);
        }
    }

    #[test]
    fn cosets_aba() {
        let c = cosets_of(&corpus::aba());
        assert_eq!(c.color_lattices, vec![lat1(2), lat1(2)]);
        assert_eq!(c.modulus, lat1(2));
        assert_eq!(c.cosets, vec![p(&[0]), p(&[1])]);
    }

    #[test]
    fn cosets_thue_morse_and_single() {
        let c = cosets_of(&corpus::thue_morse());
        assert_eq!(c.color_lattices, vec![lat1(1), lat1(1)]);
        assert_eq!(c.modulus, lat1(1));
        assert_eq!(c.cosets, vec![p(&[0]), p(&[0])]);
        let c = cosets_of(&corpus::single());
        assert_eq!(c.modulus, IntegerLattice::standard(1));
        assert_eq!(c.cosets, vec![p(&[0])]);
    }

    #[test]
    fn cosets_respect_budget() {
        let tm = corpus::thue_morse();
        let err = compute_color_cosets(&tm, find_seed(&tm, 8).unwrap(), 4).unwrap_err();
        assert!(err.is_budget(), "{err}");
    }

    #[test]
    fn coincidence_aba_needs_cosets() {
        let aba = corpus::aba();
        let cosets = cosets_of(&aba);
        let CoincidenceSearch::Found(c) = modular_coincidence(&aba, &cosets, 8).unwrap() else {
            panic!("expected a coincidence");
        };
        assert_eq!((c.k, c.residue.clone(), c.row), (1, p(&[0]), 0));
        assert_eq!(c.modulus, lat1(6));
        assert_eq!(c.fiber.len(), 1);

        // Treating every color as sitting in the zero coset of Z loses it at k = 1.
        let naive = ColorCosetData {
            color_lattices: vec![lat1(1), lat1(1)],
            modulus: lat1(2),
            cosets: vec![p(&[0]), p(&[0])],
            level: 0,
        };
        let scaled = naive.modulus.scale(&BigInt::from(3)).unwrap();
        let mut fibers: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
        for col in 0..2 {
            for (row, f) in aba.column(col) {
                fibers
                    .entry(coincidence_key(f, col, &naive, &scaled).unwrap())
                    .or_default()
                    .insert(row);
            }
        }
        assert!(fibers.values().all(|rows| rows.len() == 2));
    }

    #[test]
    fn coincidence_aba_keys() {
        let aba = corpus::aba();
        let cosets = cosets_of(&aba);
        let scaled = cosets.modulus.scale(&BigInt::from(3)).unwrap();
        let mut keys: Vec<(usize, usize, i64)> = Vec::new();
        for col in 0..2 {
            for (row, f) in aba.column(col) {
                let k = coincidence_key(f, col, &cosets, &scaled).unwrap();
                keys.push((col, row, k.to_i64s().unwrap()[0]));
            }
        }
        keys.sort();
        assert_eq!(
            keys,
            vec![
                (0, 0, 0),
                (0, 0, 2),
                (0, 1, 1),
                (1, 0, 4),
                (1, 1, 3),
                (1, 1, 5)
            ]
        );
    }

    #[test]
    fn coincidence_period_doubling() {
        let pd = corpus::period_doubling();
        let cosets = cosets_of(&pd);
        assert_eq!(cosets.modulus, IntegerLattice::standard(1));
        let CoincidenceSearch::Found(c) = modular_coincidence(&pd, &cosets, 8).unwrap() else {
            panic!("expected a coincidence");
        };
        assert_eq!((c.k, c.residue.clone(), c.row), (1, p(&[0]), 0));
        assert_eq!(
            c.fiber
                .iter()
                .map(|(r, col, _)| (*r, *col))
                .collect::<Vec<_>>(),
            vec![(0, 0), (0, 1)]
        );
        assert_eq!(
            c.common_row_element
                .as_ref()
                .map(|(r, f)| (*r, f.to_string())),
            Some((0, "2x".into()))
        );
    }

    #[test]
    fn no_coincidence_for_row_disjoint_systems() {
        for sys in [corpus::thue_morse(), corpus::table(), corpus::flip()] {
            let cosets = cosets_of(&sys);
            assert_eq!(
                modular_coincidence(&sys, &cosets, 5).unwrap(),
                CoincidenceSearch::NotFound { k_max: 5 }
            );
        }
    }

    #[test]
    fn key_is_independent_of_coset_representative() {
        for sys in corpus::valid_systems() {
            let cosets = cosets_of(&sys);
            let shifts: Vec<Point> = cosets.modulus.basis().to_vec();
            for k in 1..=2 {
                let pk = sys.power(k).unwrap();
                let scaled = cosets.modulus.scale(&pk.expansion()).unwrap();
                for (n, shift) in shifts.iter().enumerate() {
                    let mut moved = cosets.clone();
                    let factor = BigInt::from(n as i64 * 3 - 2);
                    for c in moved.cosets.iter_mut() {
                        *c = &*c + &shift.scale(&factor);
                    }
                    for col in 0..pk.color_count() {
                        for (_, f) in pk.column(col) {
                            assert_eq!(
                                coincidence_key(f, col, &cosets, &scaled).unwrap(),
                                coincidence_key(f, col, &moved, &scaled).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn analyze_corpus() {
        let opts = AnalysisOptions::default();
        let tm = analyze(&corpus::thue_morse(), &opts).unwrap();
        assert!(matches!(
            tm.verdict,
            Verdict::NotModelSet(NotModelSetWitness::RowDisjointness {
                primitivity_exponent: 1,
                ..
            })
        ));
        let table = analyze(&corpus::table(), &opts).unwrap();
        assert!(matches!(
            table.verdict,
            Verdict::NotModelSet(NotModelSetWitness::RowDisjointness {
                primitivity_exponent: 2,
                ..
            })
        ));
        let pd = analyze(&corpus::period_doubling(), &opts).unwrap();
        let Verdict::ModelSet(c) = pd.verdict else {
            panic!("{:?}", pd.verdict)
        };
        assert_eq!((c.k, c.row), (1, 0));
        let aba = analyze(&corpus::aba(), &opts).unwrap();
        assert!(matches!(
            aba.verdict,
            Verdict::ModelSet(Coincidence { k: 1, row: 0, .. })
        ));
        let Some(Nonperiodicity::Scanned(scan)) = aba.evidence.nonperiodicity else {
            panic!()
        };
        assert_eq!(scan.period, Some(p(&[2])));
        assert!(matches!(
            analyze(&corpus::single(), &opts).unwrap().verdict,
            Verdict::ModelSet(_)
        ));
        assert!(matches!(
            analyze(&corpus::flip(), &opts).unwrap().verdict,
            Verdict::NotModelSet(_)
        ));
    }

    #[test]
    fn analyze_refuses_invalid_and_reports_non_primitive() {
        assert!(matches!(
            analyze(&corpus::box_fragment(), &AnalysisOptions::default()),
            Err(AnalysisError::Mfs(MfsError::Invalid(_)))
        ));
        let mut split =
            MatrixFunctionSystem::new(1, BigInt::from(2), vec!["a".into(), "b".into()]).unwrap();
        for c in 0..2 {
            split.add_map(c, c, p(&[0])).unwrap();
            split.add_map(c, c, p(&[1])).unwrap();
        }
        let a = analyze(&split, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.verdict, Verdict::Unknown(UnknownReason::NotPrimitive));
    }

    #[test]
    fn assumed_nonperiodicity_is_recorded() {
        let opts = AnalysisOptions {
            assume_nonperiodic: true,
            ..Default::default()
        };
        let a = analyze(&corpus::thue_morse(), &opts).unwrap();
        assert_eq!(
            a.verdict,
            Verdict::NotModelSet(NotModelSetWitness::RowDisjointness {
                primitivity_exponent: 1,
                nonperiodicity: Nonperiodicity::Assumed,
            })
        );
    }

    #[test]
    fn bound_reached_is_unknown() {
        // Periodic and row-disjoint, with the coincidence only visible once
        // the search is allowed to run: k_max = 0 forces Unknown.
        let opts = AnalysisOptions {
            k_max: 0,
            ..Default::default()
        };
        let a = analyze(&corpus::aba(), &opts).unwrap();
        assert_eq!(
            a.verdict,
            Verdict::Unknown(UnknownReason::BoundReached { k_max: 0 })
        );
    }

    #[test]
    fn sqcap_propagates_for_row_disjoint_systems() {
        for sys in corpus::valid_systems() {
            if !row_disjointness(&sys).is_disjoint() {
                continue;
            }
            let m = sys.color_count();
            for k in 1..=3 {
                for a in 0..m {
                    for b in a + 1..m {
                        let sa = superelement(&sys, a, k).unwrap();
                        let sb = superelement(&sys, b, k).unwrap();
                        assert!(sqcap(&sa, &sb).unwrap().is_empty(), "k={k} {a} {b}");
                    }
                }
            }
        }
    }
}
