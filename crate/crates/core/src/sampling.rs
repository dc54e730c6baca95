//! Seeded, reproducible random instances for volume checks.
//!
//! Every generator takes an explicit RNG (ChaCha, so streams are identical
//! across platforms); nothing here ever consults time or global state.

use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::Result;
use crate::pugroup::{GElem, GroupOracle, PUFunc};
use crate::rational::rat;
use crate::submeasure::SetFunc;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random label from the pool.
pub fn random_label(pool: &[GElem], rng: &mut ChaCha8Rng) -> GElem {
    pool[rng.gen_range(0..pool.len())].clone()
}

/// A random labeled partition of unity: each atom is assigned a label from
/// the pool and cells are the label preimages. Always valid by construction.
pub fn random_pufunc(
    algebra: &Arc<FiniteAlgebra>,
    group: &Arc<GroupOracle>,
    pool: &[GElem],
    rng: &mut ChaCha8Rng,
) -> Result<PUFunc> {
    let n = algebra.atom_count();
    let mut cells: Vec<(GElem, u32)> = Vec::new();
    for atom in 0..n {
        let label = random_label(pool, rng);
        match cells.iter_mut().find(|(g, _)| *g == label) {
            Some((_, mask)) => *mask |= 1 << atom,
            None => cells.push((label, 1 << atom)),
        }
    }
    let pairs = cells
        .into_iter()
        .map(|(g, mask)| Ok((g, Elem::from_mask(algebra, mask)?)))
        .collect::<Result<Vec<_>>>()?;
    PUFunc::new(algebra, group, pairs)
}

/// The window `{-radius, …, radius}` of integer labels.
pub fn integer_window(radius: i64) -> Vec<GElem> {
    (-radius..=radius).map(GElem::Int).collect()
}

/// A random monotone table: random values pushed up to their monotone
/// closure `φ(A) = max_{B ≤ A} v(B)`, with `φ(0) = 0`.
pub fn random_monotone_table(
    algebra: &Arc<FiniteAlgebra>,
    max_numerator: i64,
    denominator: i64,
    rng: &mut ChaCha8Rng,
) -> Result<SetFunc> {
    let size = algebra.size();
    let mut values: Vec<BigRational> =
        (0..size)
            .map(|m| {
                if m == 0 {
                    rat(0, 1)
                } else {
                    rat(rng.gen_range(0..=max_numerator), denominator)
                }
            })
            .collect();
    for mask in 1..size {
        for atom in 0..algebra.atom_count() {
            if mask & (1 << atom) != 0 {
                let below = mask & !(1 << atom);
                if values[below] > values[mask] {
                    values[mask] = values[below].clone();
                }
            }
        }
    }
    SetFunc::from_table(algebra, values)
}

/// A random atom measure with weights `k/denominator`, `k ≤ max_numerator`.
pub fn random_atom_measure(
    algebra: &Arc<FiniteAlgebra>,
    max_numerator: i64,
    denominator: i64,
    rng: &mut ChaCha8Rng,
) -> Result<SetFunc> {
    let weights = (0..algebra.atom_count())
        .map(|_| rat(rng.gen_range(0..=max_numerator), denominator))
        .collect();
    SetFunc::atom_measure(algebra, weights)
}

/// A random monotone subadditive function: a random covering family with a
/// random positive unit cost, or a pointwise max of random measures.
pub fn random_submeasure(algebra: &Arc<FiniteAlgebra>, rng: &mut ChaCha8Rng) -> Result<SetFunc> {
    if rng.gen_bool(0.5) {
        let n = algebra.atom_count();
        let m = rng.gen_range(2..=(n + 3));
        let mut masks: Vec<u32> = (0..m).map(|_| rng.gen_range(1..algebra.size() as u32)).collect();
        for atom in 0..n {
            let bit = 1u32 << atom;
            if masks.iter().all(|s| s & bit == 0) {
                let idx = atom % masks.len();
                masks[idx] |= bit;
            }
        }
        let family =
            masks.into_iter().map(|m| Elem::from_mask(algebra, m)).collect::<Result<Vec<_>>>()?;
        SetFunc::cover_count(algebra, family, rat(rng.gen_range(1..=4), 2))
    } else {
        let count = rng.gen_range(2..=3);
        let components = (0..count)
            .map(|_| (0..algebra.atom_count()).map(|_| rat(rng.gen_range(0..=6), 6)).collect())
            .collect();
        SetFunc::max_of(algebra, components)
    }
}

/// A random join-monoid homomorphism: arbitrary atom images extended by
/// joins (which is exactly the general form of such a map on a powerset).
pub fn random_vee_hom_table(
    source: &Arc<FiniteAlgebra>,
    target: &Arc<FiniteAlgebra>,
    rng: &mut ChaCha8Rng,
) -> Vec<u32> {
    let atom_images: Vec<u32> =
        (0..source.atom_count()).map(|_| rng.gen_range(0..target.size() as u32)).collect();
    (0..source.size() as u32)
        .map(|mask| {
            let mut img = 0u32;
            for (atom, ai) in atom_images.iter().enumerate() {
                if mask & (1 << atom) != 0 {
                    img |= ai;
                }
            }
            img
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VeeMonoidHom;
    use crate::submeasure::{classify, CheckMode};

    #[test]
    fn pufunc_generator_is_deterministic_and_valid() {
        let alg = FiniteAlgebra::numbered(4).unwrap();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let pool: Vec<GElem> = (0..4).map(GElem::Idx).collect();
        let mut r1 = rng_from_seed(42);
        let mut r2 = rng_from_seed(42);
        for _ in 0..50 {
            let a = random_pufunc(&alg, &z4, &pool, &mut r1).unwrap();
            let b = random_pufunc(&alg, &z4, &pool, &mut r2).unwrap();
            assert_eq!(a, b);
            assert!(a.support_where(|_| true).is_one());
        }
    }

    #[test]
    fn monotone_tables_are_monotone() {
        let alg = FiniteAlgebra::numbered(4).unwrap();
        let mut rng = rng_from_seed(7);
        for _ in 0..20 {
            let phi = random_monotone_table(&alg, 8, 4, &mut rng).unwrap();
            assert!(phi.find_monotonicity_violation().is_none());
        }
    }

    #[test]
    fn random_submeasures_classify_as_submeasures() {
        let alg = FiniteAlgebra::numbered(4).unwrap();
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let phi = random_submeasure(&alg, &mut rng).unwrap();
            let report = classify(&phi, CheckMode::Exhaustive).unwrap();
            assert!(report.is_submeasure());
        }
    }

    #[test]
    fn random_vee_homs_satisfy_join_law() {
        let src = FiniteAlgebra::numbered(3).unwrap();
        let tgt = FiniteAlgebra::numbered(2).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let table = random_vee_hom_table(&src, &tgt, &mut rng);
            VeeMonoidHom::new(&src, &tgt, table).unwrap();
        }
    }
}
