//! Exact integer algebra: points of `Z^d`, affine maps `x -> Qx + t`, and
//! full-rank sublattices in Hermite normal form.

mod affine;
mod hnf;
mod point;

use num_bigint::BigInt;
use thiserror::Error;

pub use affine::{apply_map, compose_maps, AffineLatticeMap};
pub use hnf::{hnf, lattice_sum, residue, scale_lattice, IntegerLattice};
pub use point::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generators span a rank-{rank} subgroup of Z^{dim}, not a full-rank lattice")]
    RankDeficient { dim: usize, rank: usize },
    #[error("expansion must be an integer >= 2, got {0}")]
    Expansion(BigInt),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(BigInt),
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn point(dim: usize) -> impl Strategy<Value = Point> {
        prop::collection::vec(-12i64..=12, dim).prop_map(|c| Point::from_i64s(&c))
    }

    /// Generator sets in dimension 1..=3 that contain a scaled identity,
    /// so the span is always full-rank.
    fn generators() -> impl Strategy<Value = (usize, Vec<Point>)> {
        (1usize..=3).prop_flat_map(|dim| {
            (Just(dim), prop::collection::vec(point(dim), 0..4), 1i64..=6).prop_map(
                |(dim, mut gens, s)| {
                    for axis in 0..dim {
                        gens.push(Point::unit(dim, axis).scale(&BigInt::from(s)));
                    }
                    (dim, gens)
                },
            )
        })
    }

    fn affine(dim: usize) -> impl Strategy<Value = AffineLatticeMap> {
        (2i64..=5, point(dim)).prop_map(|(q, t)| AffineLatticeMap::new(BigInt::from(q), t).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn hnf_is_idempotent((dim, gens) in generators()) {
            let l = hnf(dim, &gens).unwrap();
            prop_assert_eq!(hnf(dim, l.basis()).unwrap(), l);
        }

        #[test]
        fn combinations_have_zero_residue(
            (dim, gens) in generators(),
            coeffs in prop::collection::vec(-5i64..=5, 8),
        ) {
            let l = hnf(dim, &gens).unwrap();
            let mut acc = Point::zero(dim);
            for (g, c) in gens.iter().zip(coeffs.iter().cycle()) {
                acc = &acc + &g.scale(&BigInt::from(*c));
            }
            prop_assert!(residue(&acc, &l).unwrap().is_zero());
        }

        #[test]
        fn residue_is_well_defined(
            (dim, gens) in generators(),
            x in point(3),
            coeffs in prop::collection::vec(-5i64..=5, 8),
        ) {
            let l = hnf(dim, &gens).unwrap();
            let x = Point::new(x.coords()[..dim].to_vec());
            let mut y = x.clone();
            for (g, c) in l.basis().iter().zip(&coeffs) {
                y = &y + &g.scale(&BigInt::from(*c));
            }
            let rx = residue(&x, &l).unwrap();
            prop_assert_eq!(&rx, &residue(&y, &l).unwrap());
            prop_assert!(l.contains(&(&x - &rx)).unwrap());
            for (c, d) in rx.coords().iter().zip(l.diagonal()) {
                prop_assert!(c >= &BigInt::from(0) && c < d);
            }
        }

        #[test]
        fn lattice_sum_algebra(
            (dim, g) in generators(),
            h in prop::collection::vec(point(3), 0..3),
            k in prop::collection::vec(point(3), 0..3),
            s in 1i64..=5,
        ) {
            let trunc = |v: &Vec<Point>| -> Vec<Point> {
                let mut out: Vec<Point> = v.iter().map(|p| Point::new(p.coords()[..dim].to_vec())).collect();
                for axis in 0..dim {
                    out.push(Point::unit(dim, axis).scale(&BigInt::from(s)));
                }
                out
            };
            let (h, k) = (trunc(&h), trunc(&k));
            let a = hnf(dim, &g).unwrap();
            let b = hnf(dim, &h).unwrap();
            let c = hnf(dim, &k).unwrap();
            prop_assert_eq!(lattice_sum(&a, &b).unwrap(), lattice_sum(&b, &a).unwrap());
            prop_assert_eq!(
                lattice_sum(&lattice_sum(&a, &b).unwrap(), &c).unwrap(),
                lattice_sum(&a, &lattice_sum(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(lattice_sum(&a, &a).unwrap(), a.clone());
            let union: Vec<Point> = g.iter().chain(&h).cloned().collect();
            prop_assert_eq!(hnf(dim, &union).unwrap(), lattice_sum(&a, &b).unwrap());
        }

        #[test]
        fn compose_is_associative_and_matches_application(
            f in affine(2), g in affine(2), h in affine(2), x in point(2),
        ) {
            let fg = compose_maps(&f, &g).unwrap();
            prop_assert_eq!(fg.expansion(), &(f.expansion() * g.expansion()));
            prop_assert_eq!(
                compose_maps(&fg, &h).unwrap(),
                compose_maps(&f, &compose_maps(&g, &h).unwrap()).unwrap()
            );
            prop_assert_eq!(
                apply_map(&fg, &x).unwrap(),
                apply_map(&f, &apply_map(&g, &x).unwrap()).unwrap()
            );
        }
    }
}
