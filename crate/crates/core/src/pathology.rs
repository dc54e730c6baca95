//! Dominated-measure extraction and pathology quantification.
//!
//! The central object is the linear program
//!
//! ```text
//!   M(φ) = max Σ_a x_a   s.t.   Σ_{a∈A} x_a ≤ φ(A)  for every A ≠ 0,  x ≥ 0,
//! ```
//!
//! whose optimum is the largest total mass of a measure dominated by `φ`.
//! `φ` dominates no nonzero measure exactly when `M(φ) = 0`, and
//! `κ(φ) = M(φ)/φ(1) ∈ [0,1]` quantifies the distance from that degenerate
//! case; `κ = 1` for measures.
//!
//! `2^n` rows do not fit a dense tableau at the size cap, so the solver runs
//! on the transposed (fractional-cover) program — one column per nonzero
//! element, one row per atom — with all `2^n − 1` constraints materialized as
//! columns and the domination primal recovered from the optimal dual. Every
//! certificate is replayed exhaustively (primal feasibility on all elements,
//! dual cover of every atom, exact strong duality) before it is returned;
//! a replay failure is a hard internal error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Elem, FiniteAlgebra, PartitionOfUnity};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, RationalLp, RowOp, Sense};
use crate::rational::{lcm_of_denominators, one, zero};
use crate::submeasure::SetFunc;

/// Cap on atom count for the LP-backed operations.
pub const MAX_ATOMS_LP: usize = 12;

/// Primal/dual certificate for the maximal dominated measure.
///
/// Invariants (replayed before construction returns):
/// - `primal` is a nonnegative atom measure with `Σ_{a∈A} primal_a ≤ φ(A)`
///   for every element `A`;
/// - `dual` weights are nonnegative and cover every atom with total ≥ 1;
/// - `primal` total = `value` = `dual_cost` exactly.
#[derive(Debug, Clone)]
pub struct DominationCertificate {
    pub value: BigRational,
    /// Optimal dominated measure, one weight per atom.
    pub primal: Vec<BigRational>,
    /// Nonzero dual weights on elements, sorted by mask.
    pub dual: Vec<(Elem, BigRational)>,
    pub dual_cost: BigRational,
}

fn check_lp_cap(phi: &SetFunc, what: &str) -> Result<()> {
    let n = phi.algebra().atom_count();
    if n > MAX_ATOMS_LP {
        return Err(Error::CapacityExceeded {
            what: what.into(),
            limit: MAX_ATOMS_LP,
            requested: n,
        });
    }
    Ok(())
}

fn require_submeasure(phi: &SetFunc, op: &str) -> Result<()> {
    if let Some(cx) = phi.find_subadditivity_violation() {
        return Err(Error::precondition_with(
            format!("{op} needs a monotone subadditive function"),
            cx.to_string(),
        ));
    }
    Ok(())
}

/// Solves the domination LP exactly and returns a replay-verified certificate.
pub fn max_dominated_measure(phi: &SetFunc) -> Result<DominationCertificate> {
    check_lp_cap(phi, "dominated-measure LP")?;
    require_submeasure(phi, "dominated-measure LP")?;
    let algebra = phi.algebra();
    let n = algebra.atom_count();
    let size = algebra.size() as u32;
    let values = phi.values();

    // Transposed program: min Σ_A φ(A)·y_A  s.t.  Σ_{A∋a} y_A ≥ 1 per atom.
    let objective: Vec<BigRational> = (1..size).map(|m| values[m as usize].clone()).collect();
    let mut cover = RationalLp::new(Sense::Minimize, objective);
    for atom in 0..n {
        let bit = 1u32 << atom;
        let coeffs: Vec<BigRational> =
            (1..size).map(|m| if m & bit != 0 { one() } else { zero() }).collect();
        cover.add_row(coeffs, RowOp::Ge, one())?;
    }
    let sol = match lp::solve(&cover)? {
        LpOutcome::Optimal(sol) => sol,
        // y = (weight 1 on the top element) is always feasible and the
        // objective is bounded below by 0, so neither case can occur.
        other => {
            return Err(Error::VerificationFailed(format!(
                "cover LP unexpectedly not optimal: {other:?}"
            )))
        }
    };
    lp::verify_solution(&cover, &sol)?;

    let primal: Vec<BigRational> = sol.duals.clone();
    let dual: Vec<(Elem, BigRational)> = (1..size)
        .zip(&sol.primal)
        .filter(|(_, y)| !y.is_zero())
        .map(|(m, y)| Ok((Elem::from_mask(algebra, m)?, y.clone())))
        .collect::<Result<_>>()?;
    let cert = DominationCertificate {
        value: sol.objective_value.clone(),
        primal,
        dual,
        dual_cost: sol.objective_value,
    };
    verify_domination_certificate(phi, &cert)?;
    Ok(cert)
}

/// Exhaustively replays all certificate invariants against `φ`.
pub fn verify_domination_certificate(phi: &SetFunc, cert: &DominationCertificate) -> Result<()> {
    let algebra = phi.algebra();
    let n = algebra.atom_count();
    if cert.primal.len() != n {
        return Err(Error::VerificationFailed("primal weight count mismatch".into()));
    }
    if cert.primal.iter().any(|w| w.is_negative()) {
        return Err(Error::VerificationFailed("negative primal weight".into()));
    }
    let values = phi.values();
    for mask in 0..algebra.size() as u32 {
        let mut mass = zero();
        for (i, w) in cert.primal.iter().enumerate() {
            if mask & (1 << i) != 0 {
                mass += w;
            }
        }
        if mass > values[mask as usize] {
            return Err(Error::VerificationFailed(format!(
                "dominated measure exceeds φ on mask {mask}"
            )));
        }
    }
    let primal_total: BigRational = cert.primal.iter().sum();
    if primal_total != cert.value {
        return Err(Error::VerificationFailed("primal mass differs from claimed value".into()));
    }
    let mut dual_cost = zero();
    for (set, y) in &cert.dual {
        if set.algebra() != algebra {
            return Err(Error::VerificationFailed("dual weight on foreign element".into()));
        }
        if y.is_negative() {
            return Err(Error::VerificationFailed("negative dual weight".into()));
        }
        dual_cost += y * phi.eval_mask(set.mask());
    }
    if dual_cost != cert.dual_cost || cert.dual_cost != cert.value {
        return Err(Error::VerificationFailed("strong duality gap in certificate".into()));
    }
    for atom in 0..n {
        let bit = 1u32 << atom;
        let coverage: BigRational =
            cert.dual.iter().filter(|(set, _)| set.mask() & bit != 0).map(|(_, y)| y.clone()).sum();
        if coverage < one() {
            return Err(Error::VerificationFailed(format!(
                "dual weights cover atom {atom} with total {coverage} < 1"
            )));
        }
    }
    Ok(())
}

/// `κ(φ) = M(φ)/φ(1) ∈ [0, 1]`. Requires `φ(1) > 0`.
pub fn kappa(phi: &SetFunc) -> Result<BigRational> {
    let total = phi.total();
    if total.is_zero() {
        return Err(Error::precondition("κ is undefined when φ(1) = 0"));
    }
    let cert = max_dominated_measure(phi)?;
    Ok(cert.value / total)
}

/// A greedy measure extracted from a monotone submodular function along an
/// atom order: `ν(a_i) = φ({a_1..a_i}) − φ({a_1..a_{i−1}})`.
///
/// For such `φ` the result satisfies `ν ≤ φ` everywhere with
/// `ν(1) = φ(1)`; both are replayed exhaustively before return.
#[derive(Debug, Clone)]
pub struct KelleyMeasure {
    pub order: Vec<usize>,
    /// One weight per atom (indexed by atom, not by position in `order`).
    pub nu: Vec<BigRational>,
}

pub fn kelley_greedy(phi: &SetFunc, order: &[usize]) -> Result<KelleyMeasure> {
    let algebra = phi.algebra();
    let n = algebra.atom_count();
    if n > MAX_ATOMS_LP {
        return Err(Error::CapacityExceeded {
            what: "greedy measure extraction".into(),
            limit: MAX_ATOMS_LP,
            requested: n,
        });
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::InvalidInput(format!("order is not a permutation of 0..{n}")));
        }
        seen[i] = true;
    }
    if order.len() != n {
        return Err(Error::InvalidInput(format!("order is not a permutation of 0..{n}")));
    }
    if let Some(cx) = phi.find_monotonicity_violation() {
        return Err(Error::precondition_with("greedy extraction needs monotone φ", cx.to_string()));
    }
    if let Some(cx) = phi.find_submodularity_violation() {
        return Err(Error::precondition_with(
            "greedy extraction needs submodular φ",
            cx.to_string(),
        ));
    }

    let mut nu = vec![zero(); n];
    let mut prefix = 0u32;
    let mut prev = zero();
    for &i in order {
        prefix |= 1 << i;
        let cur = phi.eval_mask(prefix);
        nu[i] = &cur - &prev;
        prev = cur;
    }

    // Replay ν ≤ φ on every element and ν(1) = φ(1).
    let values = phi.values();
    let full = algebra.size() as u32 - 1;
    for mask in 0..algebra.size() as u32 {
        let mut mass = zero();
        for (i, w) in nu.iter().enumerate() {
            if mask & (1 << i) != 0 {
                mass += w;
            }
        }
        if mass > values[mask as usize] {
            return Err(Error::VerificationFailed(format!(
                "greedy measure exceeds φ on mask {mask}"
            )));
        }
        if mask == full && mass != values[mask as usize] {
            return Err(Error::VerificationFailed("greedy measure misses φ(1)".into()));
        }
    }
    Ok(KelleyMeasure { order: order.to_vec(), nu })
}

/// A covering witness: `m` sets of `φ`-value at most `ε` such that every
/// cell of the partition lies below at least `(1−ε)·m` of them.
#[derive(Debug, Clone)]
pub struct ChristensenWitness {
    pub epsilon: BigRational,
    /// Total multiset size `m = Σ multiplicities`.
    pub m: BigInt,
    /// The multiset `(C_i)` as (element, multiplicity) pairs, sorted by mask.
    pub sets: Vec<(Elem, BigInt)>,
    pub partition: PartitionOfUnity,
    /// Minimum over cells of `|{i : Q ≤ C_i}|`.
    pub min_coverage: BigInt,
}

/// Searches for a covering witness at level `ε ∈ (0, 1)`.
///
/// Restricts to `𝒞_ε = {A ≠ 0 : φ(A) ≤ ε}`, maximizes the worst-atom
/// fractional coverage by a unit mass supported on `𝒞_ε`, and — when the
/// optimum reaches `1 − ε` — clears denominators to produce an integer
/// multiset. The partition is fixed to the atom partition, on which the
/// coverage condition is hardest. Returns `None` when `𝒞_ε` is empty or the
/// optimum falls short.
pub fn christensen_witness(
    phi: &SetFunc,
    epsilon: &BigRational,
) -> Result<Option<ChristensenWitness>> {
    if !epsilon.is_positive() || *epsilon >= one() {
        return Err(Error::InvalidInput(format!("ε = {epsilon} is outside (0, 1)")));
    }
    check_lp_cap(phi, "covering-witness LP")?;
    require_submeasure(phi, "covering-witness search")?;
    let algebra = phi.algebra();
    let n = algebra.atom_count();
    let size = algebra.size() as u32;
    let values = phi.values();

    let candidates: Vec<u32> = (1..size).filter(|&m| values[m as usize] <= *epsilon).collect();
    if candidates.is_empty() {
        return Ok(None);
    }

    // Variables: t, then y_A for A in candidates.
    // max t  s.t.  t − Σ_{A∋a} y_A ≤ 0 per atom,  Σ_A y_A ≤ 1,  all ≥ 0.
    // At any optimum with t > 0 the unit-mass row is tight.
    let nv = candidates.len() + 1;
    let mut objective = vec![zero(); nv];
    objective[0] = one();
    let mut witness_lp = RationalLp::new(Sense::Maximize, objective);
    for atom in 0..n {
        let bit = 1u32 << atom;
        let mut coeffs = vec![zero(); nv];
        coeffs[0] = one();
        for (j, &m) in candidates.iter().enumerate() {
            if m & bit != 0 {
                coeffs[j + 1] = -one();
            }
        }
        witness_lp.add_row(coeffs, RowOp::Le, zero())?;
    }
    let mut mass_row = vec![one(); nv];
    mass_row[0] = zero();
    witness_lp.add_row(mass_row, RowOp::Le, one())?;

    let sol = match lp::solve(&witness_lp)? {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::VerificationFailed(format!(
                "witness LP unexpectedly not optimal: {other:?}"
            )))
        }
    };
    lp::verify_solution(&witness_lp, &sol)?;

    let t_star = &sol.primal[0];
    let threshold = one() - epsilon;
    if *t_star < threshold {
        return Ok(None);
    }

    // Clear denominators: multiplicity(A) = y_A · lcm(denominators).
    let y = &sol.primal[1..];
    let denom_lcm = lcm_of_denominators(y);
    let mut sets: Vec<(Elem, BigInt)> = Vec::new();
    let mut m_total = BigInt::zero();
    for (&mask, weight) in candidates.iter().zip(y) {
        if weight.is_zero() {
            continue;
        }
        let mult = (weight * BigRational::from_integer(denom_lcm.clone())).to_integer();
        m_total += &mult;
        sets.push((Elem::from_mask(algebra, mask)?, mult));
    }
    let partition = PartitionOfUnity::atoms(algebra);
    let min_coverage = partition
        .cells()
        .iter()
        .map(|cell| {
            sets.iter()
                .filter(|(set, _)| cell.mask() & !set.mask() == 0)
                .map(|(_, mult)| mult.clone())
                .sum::<BigInt>()
        })
        .min()
        .expect("partition has cells");

    let witness =
        ChristensenWitness { epsilon: epsilon.clone(), m: m_total, sets, partition, min_coverage };
    verify_witness(phi, &witness)?;
    Ok(Some(witness))
}

/// Replays the two defining inequalities of a covering witness.
pub fn verify_witness(phi: &SetFunc, w: &ChristensenWitness) -> Result<()> {
    if !w.epsilon.is_positive() || w.epsilon > one() {
        return Err(Error::VerificationFailed("witness ε outside (0, 1]".into()));
    }
    if w.m <= BigInt::zero() {
        return Err(Error::VerificationFailed("witness has empty multiset".into()));
    }
    let mut total = BigInt::zero();
    for (set, mult) in &w.sets {
        if set.algebra() != phi.algebra() {
            return Err(Error::VerificationFailed("witness set on foreign algebra".into()));
        }
        if mult <= &BigInt::zero() {
            return Err(Error::VerificationFailed("nonpositive multiplicity".into()));
        }
        if phi.eval_mask(set.mask()) > w.epsilon {
            return Err(Error::VerificationFailed(format!(
                "witness set {set} has φ-value above ε"
            )));
        }
        total += mult;
    }
    if total != w.m {
        return Err(Error::VerificationFailed("multiplicities do not sum to m".into()));
    }
    let required = (one() - &w.epsilon) * BigRational::from_integer(w.m.clone());
    let mut min_cov: Option<BigInt> = None;
    for cell in w.partition.cells() {
        let coverage: BigInt = w
            .sets
            .iter()
            .filter(|(set, _)| cell.mask() & !set.mask() == 0)
            .map(|(_, mult)| mult.clone())
            .sum();
        if BigRational::from_integer(coverage.clone()) < required {
            return Err(Error::VerificationFailed(format!(
                "cell {cell} is covered only {coverage} times, needs (1−ε)m = {required}"
            )));
        }
        min_cov = Some(match min_cov {
            None => coverage,
            Some(c) => c.min(coverage),
        });
    }
    if min_cov.as_ref() != Some(&w.min_coverage) {
        return Err(Error::VerificationFailed("recorded minimum coverage is wrong".into()));
    }
    Ok(())
}

/// The averaging bound behind covering witnesses: any measure `μ ≤ φ` has
/// `(1−ε)·m·μ(1) ≤ Σ_i μ(C_i) ≤ m·ε`, hence `M(φ) ≤ ε/(1−ε)`.
///
/// Recomputes `M(φ)`, asserts the inequality (a failure is a soundness bug,
/// not an input property), and returns `(M(φ), ε/(1−ε))`.
pub fn witness_mass_bound(
    phi: &SetFunc,
    w: &ChristensenWitness,
) -> Result<(BigRational, BigRational)> {
    verify_witness(phi, w)?;
    if w.epsilon >= one() {
        return Err(Error::precondition("mass bound needs ε < 1"));
    }
    let cert = max_dominated_measure(phi)?;
    let bound = &w.epsilon / (one() - &w.epsilon);
    if cert.value > bound {
        return Err(Error::VerificationFailed(format!(
            "mass bound violated: M = {} exceeds ε/(1−ε) = {bound}",
            cert.value
        )));
    }
    Ok((cert.value, bound))
}

/// Benchmark families for the κ/witness pipeline.
#[derive(Debug, Clone)]
pub enum GenerateKind {
    /// Family `{X ∖ {i}}` with unit cost 1; needs `n ≥ 2`.
    Copoints { n: usize },
    /// All `ℓ`-subsets as the family, unit cost 1.
    EllSubsetsCover { n: usize, ell: usize },
    /// `m` random subsets (each atom kept with probability `density`),
    /// patched deterministically so the family is nonzero and joins to 1.
    RandomCover { n: usize, m: usize, density: BigRational, seed: u64 },
    /// `φ(A) = f(|A|)` for a concave nondecreasing `f` with `f(0) = 0`,
    /// given by its `n+1` values.
    ConcaveCardinality { n: usize, values: Vec<BigRational> },
}

/// Builds the requested benchmark function. Deterministic for a fixed seed.
pub fn generate(kind: &GenerateKind) -> Result<SetFunc> {
    match kind {
        GenerateKind::Copoints { n } => {
            if *n < 2 {
                return Err(Error::InvalidInput("copoints need at least 2 atoms".into()));
            }
            let algebra = FiniteAlgebra::numbered(*n)?;
            let full = Elem::one(&algebra).mask();
            let family = (0..*n)
                .map(|i| Elem::from_mask(&algebra, full & !(1 << i)))
                .collect::<Result<Vec<_>>>()?;
            SetFunc::cover_count(&algebra, family, one())
        }
        GenerateKind::EllSubsetsCover { n, ell } => {
            if *ell == 0 || ell > n {
                return Err(Error::InvalidInput(format!("ℓ = {ell} must lie in 1..={n}")));
            }
            let algebra = FiniteAlgebra::numbered(*n)?;
            let family = (1..algebra.size() as u32)
                .filter(|m| m.count_ones() as usize == *ell)
                .map(|m| Elem::from_mask(&algebra, m))
                .collect::<Result<Vec<_>>>()?;
            SetFunc::cover_count(&algebra, family, one())
        }
        GenerateKind::RandomCover { n, m, density, seed } => {
            if *m == 0 {
                return Err(Error::InvalidInput("need at least one covering set".into()));
            }
            if !density.is_positive() || *density > one() {
                return Err(Error::InvalidInput(format!("density {density} outside (0, 1]")));
            }
            let algebra = FiniteAlgebra::numbered(*n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let p = density
                .numer()
                .to_u64()
                .ok_or_else(|| Error::InvalidInput("density numerator too large".into()))?;
            let q = density
                .denom()
                .to_u64()
                .ok_or_else(|| Error::InvalidInput("density denominator too large".into()))?;
            let mut masks: Vec<u32> = (0..*m)
                .map(|_| {
                    let mut mask = 0u32;
                    for atom in 0..*n {
                        if rng.gen_range(0..q) < p {
                            mask |= 1 << atom;
                        }
                    }
                    mask
                })
                .collect();
            // Patch empties and uncovered atoms deterministically.
            for (i, mask) in masks.iter_mut().enumerate() {
                if *mask == 0 {
                    *mask = 1 << (i % n);
                }
            }
            for atom in 0..*n {
                let bit = 1u32 << atom;
                if masks.iter().all(|m| m & bit == 0) {
                    let idx = atom % *m;
                    masks[idx] |= bit;
                }
            }
            let family = masks
                .into_iter()
                .map(|m| Elem::from_mask(&algebra, m))
                .collect::<Result<Vec<_>>>()?;
            SetFunc::cover_count(&algebra, family, one())
        }
        GenerateKind::ConcaveCardinality { n, values } => {
            if values.len() != *n + 1 {
                return Err(Error::InvalidInput(format!(
                    "need {} values f(0..={n}), got {}",
                    n + 1,
                    values.len()
                )));
            }
            if !values[0].is_zero() {
                return Err(Error::InvalidInput("f(0) ≠ 0".into()));
            }
            let mut prev_diff: Option<BigRational> = None;
            for k in 1..values.len() {
                let diff = &values[k] - &values[k - 1];
                if diff.is_negative() {
                    return Err(Error::InvalidInput(format!("f decreases at {k}")));
                }
                if let Some(pd) = &prev_diff {
                    if diff > *pd {
                        return Err(Error::InvalidInput(format!("f is not concave at {k}")));
                    }
                }
                prev_diff = Some(diff);
            }
            let algebra = FiniteAlgebra::numbered(*n)?;
            let table = (0..algebra.size() as u32)
                .map(|m| values[m.count_ones() as usize].clone())
                .collect();
            SetFunc::from_table(&algebra, table)
        }
    }
}

/// The copoint function on `n` atoms, used throughout tests and the CLI.
pub fn copoints(n: usize) -> Result<SetFunc> {
    generate(&GenerateKind::Copoints { n })
}
