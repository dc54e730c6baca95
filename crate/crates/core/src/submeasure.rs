//! Set functions `φ: 𝒜 → ℚ≥0` with exact evaluation and classification.
//!
//! A [`SetFunc`] carries one of several representations (explicit table,
//! covering-number function, atom-weighted measure, pointwise max of
//! measures, or pullback along a join-monoid homomorphism) behind a uniform
//! evaluator. `φ(0) = 0` and nonnegativity are enforced at construction for
//! every representation, so downstream certificate code never re-checks them.
//!
//! Covering numbers are solved exactly by branch and bound with a greedy
//! upper bound and a fractional-relaxation lower bound at the root.

use std::fmt;
use std::sync::Arc;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    enumerate_partitions, Elem, FiniteAlgebra, VeeMonoidHom, MAX_ATOMS_EXHAUSTIVE_PAIRS,
    MAX_ATOMS_PARTITION_ENUM,
};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, RationalLp, RowOp, Sense};
use crate::rational::{one, zero};

/// Cap on the number of sets in a covering family.
pub const MAX_COVER_FAMILY: usize = 24;

#[derive(Debug, Clone)]
pub enum Repr {
    /// Explicit value per subset mask.
    Table(Vec<BigRational>),
    /// `φ(A) = unit_cost · min{|I| : A ≤ ⋁_{i∈I} family[i]}`, `φ(0) = 0`.
    CoverCount { family: Vec<Elem>, unit_cost: BigRational },
    /// `φ(A) = Σ_{a∈A} weight(a)`.
    AtomMeasure(Vec<BigRational>),
    /// Pointwise max of atom measures.
    MaxOf(Vec<Vec<BigRational>>),
    /// `φ(A) = outer(θ(A))`.
    Pullback { outer: Box<SetFunc>, hom: VeeMonoidHom },
}

/// A nonnegative set function on a finite Boolean algebra, evaluated exactly.
#[derive(Debug)]
pub struct SetFunc {
    algebra: Arc<FiniteAlgebra>,
    repr: Repr,
    table: OnceLock<Vec<BigRational>>,
}

impl Clone for SetFunc {
    fn clone(&self) -> Self {
        SetFunc {
            algebra: Arc::clone(&self.algebra),
            repr: self.repr.clone(),
            table: self.table.clone(),
        }
    }
}

impl SetFunc {
    pub fn from_table(algebra: &Arc<FiniteAlgebra>, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != algebra.size() {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, algebra has {} elements",
                values.len(),
                algebra.size()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidInput("φ(0) ≠ 0".into()));
        }
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidInput("negative value in table".into()));
        }
        Ok(SetFunc {
            algebra: Arc::clone(algebra),
            repr: Repr::Table(values),
            table: OnceLock::new(),
        })
    }

    pub fn cover_count(
        algebra: &Arc<FiniteAlgebra>,
        family: Vec<Elem>,
        unit_cost: BigRational,
    ) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidInput("empty covering family".into()));
        }
        if family.len() > MAX_COVER_FAMILY {
            return Err(Error::CapacityExceeded {
                what: "covering family size".into(),
                limit: MAX_COVER_FAMILY,
                requested: family.len(),
            });
        }
        let mut join = 0u32;
        for s in &family {
            if s.algebra() != algebra {
                return Err(Error::AlgebraMismatch { context: "covering family member".into() });
            }
            if s.is_zero() {
                return Err(Error::InvalidInput("covering family contains 0".into()));
            }
            join |= s.mask();
        }
        if join != Elem::one(algebra).mask() {
            return Err(Error::InvalidInput("covering family does not join to 1".into()));
        }
        if !unit_cost.is_positive() {
            return Err(Error::InvalidInput("unit cost must be positive".into()));
        }
        Ok(SetFunc {
            algebra: Arc::clone(algebra),
            repr: Repr::CoverCount { family, unit_cost },
            table: OnceLock::new(),
        })
    }

    pub fn atom_measure(algebra: &Arc<FiniteAlgebra>, weights: Vec<BigRational>) -> Result<Self> {
        check_weights(algebra, &weights)?;
        Ok(SetFunc {
            algebra: Arc::clone(algebra),
            repr: Repr::AtomMeasure(weights),
            table: OnceLock::new(),
        })
    }

    pub fn max_of(algebra: &Arc<FiniteAlgebra>, components: Vec<Vec<BigRational>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("max-of needs at least one component".into()));
        }
        for w in &components {
            check_weights(algebra, w)?;
        }
        Ok(SetFunc {
            algebra: Arc::clone(algebra),
            repr: Repr::MaxOf(components),
            table: OnceLock::new(),
        })
    }

    /// Pullback `φ ∘ θ` of `outer` along the join-monoid hom `θ`; lives on
    /// `θ`'s source algebra.
    pub fn pullback(outer: SetFunc, hom: VeeMonoidHom) -> Result<Self> {
        if hom.target() != outer.algebra() {
            return Err(Error::AlgebraMismatch {
                context: "pullback: hom target differs from outer function's algebra".into(),
            });
        }
        Ok(SetFunc {
            algebra: Arc::clone(hom.source()),
            repr: Repr::Pullback { outer: Box::new(outer), hom },
            table: OnceLock::new(),
        })
    }

    pub fn zero_func(algebra: &Arc<FiniteAlgebra>) -> Self {
        SetFunc {
            algebra: Arc::clone(algebra),
            repr: Repr::AtomMeasure(vec![zero(); algebra.atom_count()]),
            table: OnceLock::new(),
        }
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn eval(&self, a: &Elem) -> Result<BigRational> {
        if a.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch { context: "set-function evaluation".into() });
        }
        Ok(self.eval_mask(a.mask()))
    }

    /// Evaluation by raw mask. The mask must be in range for the algebra.
    pub fn eval_mask(&self, mask: u32) -> BigRational {
        if let Some(t) = self.table.get() {
            return t[mask as usize].clone();
        }
        self.compute_mask(mask)
    }

    fn compute_mask(&self, mask: u32) -> BigRational {
        match &self.repr {
            Repr::Table(values) => values[mask as usize].clone(),
            Repr::CoverCount { family, unit_cost } => {
                if mask == 0 {
                    return zero();
                }
                let sets: Vec<u32> = family.iter().map(|e| e.mask()).collect();
                let count = min_cover_size(mask, &sets);
                unit_cost * BigRational::from_integer(count.into())
            }
            Repr::AtomMeasure(weights) => sum_weights(weights, mask),
            Repr::MaxOf(components) => components
                .iter()
                .map(|w| sum_weights(w, mask))
                .max()
                .expect("max-of components are nonempty"),
            Repr::Pullback { outer, hom } => outer.eval_mask(hom.table()[mask as usize]),
        }
    }

    /// The full value table, computed once and shared between concurrent readers.
    pub fn values(&self) -> &[BigRational] {
        self.table
            .get_or_init(|| (0..self.algebra.size() as u32).map(|m| self.compute_mask(m)).collect())
    }

    /// Re-materializes this function as a plain table (same algebra, same values).
    pub fn materialize(&self) -> SetFunc {
        SetFunc {
            algebra: Arc::clone(&self.algebra),
            repr: Repr::Table(self.values().to_vec()),
            table: OnceLock::new(),
        }
    }

    /// `φ(1)`.
    pub fn total(&self) -> BigRational {
        self.eval_mask(Elem::one(&self.algebra).mask())
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values().iter().all(|v| v.is_zero())
    }

    /// Exhaustive monotonicity check via single-atom steps, exact at any
    /// supported size: `φ` is monotone iff `φ(A) ≤ φ(A ∨ {a})` for every
    /// element and atom.
    pub fn find_monotonicity_violation(&self) -> Option<Counterexample> {
        let values = self.values();
        let n = self.algebra.atom_count();
        for mask in 0..self.algebra.size() as u32 {
            for atom in 0..n {
                let bigger = mask | (1 << atom);
                if bigger != mask && values[mask as usize] > values[bigger as usize] {
                    return Some(self.cx(
                        mask,
                        bigger,
                        values[mask as usize].clone(),
                        values[bigger as usize].clone(),
                        "monotone",
                    ));
                }
            }
        }
        None
    }

    /// Exhaustive subadditivity check. Requires monotonicity (checked first);
    /// under it, scanning disjoint pairs is exact and costs `3^n` instead of `4^n`.
    pub fn find_subadditivity_violation(&self) -> Option<Counterexample> {
        if let Some(cx) = self.find_monotonicity_violation() {
            return Some(cx);
        }
        let values = self.values();
        let size = self.algebra.size() as u32;
        for a in 0..size {
            // All submasks of the complement of a.
            let comp = (size - 1) & !a;
            let mut b = comp;
            loop {
                let sum = &values[a as usize] + &values[b as usize];
                if values[(a | b) as usize] > sum {
                    return Some(self.cx(
                        a,
                        b,
                        values[(a | b) as usize].clone(),
                        sum,
                        "subadditive",
                    ));
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & comp;
            }
        }
        None
    }

    /// Exhaustive submodularity check via the diminishing-returns form
    /// (`φ(A∨x) + φ(A∨y) ≥ φ(A∨x∨y) + φ(A)` for atoms `x ≠ y` outside `A`),
    /// which is equivalent to the pairwise definition and costs `n²·2^n`.
    pub fn find_submodularity_violation(&self) -> Option<Counterexample> {
        let values = self.values();
        let n = self.algebra.atom_count();
        for mask in 0..self.algebra.size() as u32 {
            for x in 0..n {
                if mask & (1 << x) != 0 {
                    continue;
                }
                for y in x + 1..n {
                    if mask & (1 << y) != 0 {
                        continue;
                    }
                    let ax = mask | (1 << x);
                    let ay = mask | (1 << y);
                    let axy = ax | (1 << y);
                    let lhs = &values[axy as usize] + &values[mask as usize];
                    let rhs = &values[ax as usize] + &values[ay as usize];
                    if lhs > rhs {
                        return Some(self.cx(ax, ay, lhs, rhs, "submodular"));
                    }
                }
            }
        }
        None
    }

    fn cx(
        &self,
        a: u32,
        b: u32,
        lhs: BigRational,
        rhs: BigRational,
        law: &'static str,
    ) -> Counterexample {
        Counterexample {
            a: Elem::from_mask(&self.algebra, a).expect("in range"),
            b: Elem::from_mask(&self.algebra, b).expect("in range"),
            lhs,
            rhs,
            law,
        }
    }
}

fn check_weights(algebra: &Arc<FiniteAlgebra>, weights: &[BigRational]) -> Result<()> {
    if weights.len() != algebra.atom_count() {
        return Err(Error::InvalidInput(format!(
            "{} weights for an algebra on {} atoms",
            weights.len(),
            algebra.atom_count()
        )));
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::InvalidInput("negative atom weight".into()));
    }
    Ok(())
}

fn sum_weights(weights: &[BigRational], mask: u32) -> BigRational {
    let mut acc = zero();
    for (i, w) in weights.iter().enumerate() {
        if mask & (1 << i) != 0 {
            acc += w;
        }
    }
    acc
}

/// Exact minimum number of family sets covering `target`, by branch and
/// bound. The caller guarantees coverability (families join to 1).
fn min_cover_size(target: u32, sets: &[u32]) -> u64 {
    // Restrict to the target and drop empty or dominated sets.
    let mut restricted: Vec<u32> = sets.iter().map(|s| s & target).filter(|&s| s != 0).collect();
    restricted.sort_unstable();
    restricted.dedup();
    let dominated: Vec<bool> =
        restricted.iter().map(|&s| restricted.iter().any(|&t| t != s && s & !t == 0)).collect();
    let sets: Vec<u32> =
        restricted.into_iter().zip(dominated).filter_map(|(s, dom)| (!dom).then_some(s)).collect();

    // Greedy upper bound.
    let mut best: u64 = 0;
    let mut uncovered = target;
    while uncovered != 0 {
        let s = sets
            .iter()
            .copied()
            .max_by_key(|s| (s & uncovered).count_ones())
            .expect("coverable by precondition");
        uncovered &= !s;
        best += 1;
    }

    // Cheap combinatorial bound first; the fractional-relaxation bound is
    // consulted only when the gap is still open. Either bound meeting the
    // greedy value certifies the greedy cover optimal.
    let max_size = sets.iter().map(|s| s.count_ones() as u64).max().unwrap_or(1);
    if (target.count_ones() as u64).div_ceil(max_size) >= best {
        return best;
    }
    let lb = fractional_cover_bound(target, &sets);
    if lb >= best {
        return best;
    }

    fn search(uncovered: u32, sets: &[u32], depth: u64, best: &mut u64) {
        if uncovered == 0 {
            *best = (*best).min(depth);
            return;
        }
        let max_gain = sets.iter().map(|s| (s & uncovered).count_ones() as u64).max().unwrap_or(0);
        if max_gain == 0 {
            return;
        }
        let remaining = uncovered.count_ones() as u64;
        if depth + remaining.div_ceil(max_gain) >= *best {
            return;
        }
        // Fail-first: branch on the uncovered atom with fewest candidate sets.
        let atom = (0..32)
            .filter(|i| uncovered & (1 << i) != 0)
            .min_by_key(|i| sets.iter().filter(|s| *s & (1 << i) != 0).count())
            .expect("uncovered is nonzero");
        let mut candidates: Vec<u32> =
            sets.iter().copied().filter(|s| s & (1 << atom) != 0).collect();
        candidates.sort_by_key(|s| std::cmp::Reverse((s & uncovered).count_ones()));
        for s in candidates {
            search(uncovered & !s, sets, depth + 1, best);
        }
    }
    search(target, &sets, 0, &mut best);
    best
}

/// Ceiling of the LP relaxation of the covering problem restricted to `target`.
fn fractional_cover_bound(target: u32, sets: &[u32]) -> u64 {
    let mut lp = RationalLp::new(Sense::Minimize, vec![one(); sets.len()]);
    for atom in 0..32 {
        if target & (1 << atom) == 0 {
            continue;
        }
        let coeffs: Vec<BigRational> =
            sets.iter().map(|s| if s & (1 << atom) != 0 { one() } else { zero() }).collect();
        lp.add_row(coeffs, RowOp::Ge, one()).expect("shape");
    }
    match lp::solve(&lp) {
        Ok(LpOutcome::Optimal(sol)) => {
            let v = sol.objective_value;
            let fl = v.floor();
            let c = if v == fl { fl } else { fl + BigRational::from_integer(1.into()) };
            u64::try_from(c.to_integer()).unwrap_or(0)
        }
        _ => 0,
    }
}

/// A witnessed violation of one of the classification laws: the pair
/// `(a, b)` with the two sides of the failed inequality.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub a: Elem,
    pub b: Elem,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub law: &'static str,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at ({}, {}): {} vs {}", self.law, self.a, self.b, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone)]
pub struct PropCheck {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl PropCheck {
    fn from(cx: Option<Counterexample>) -> Self {
        PropCheck { holds: cx.is_none(), counterexample: cx }
    }
}

/// Classification flags with witnesses for every `false`.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub monotone: PropCheck,
    pub subadditive: PropCheck,
    pub submodular: PropCheck,
    pub additive: PropCheck,
    pub strictly_positive: PropCheck,
    /// True when the scan was seeded sampling rather than exhaustive.
    /// Sampled reports never feed certificates.
    pub sampled: bool,
}

impl PropertyReport {
    /// Monotone + subadditive (φ(0)=0 holds by construction).
    pub fn is_submeasure(&self) -> bool {
        self.monotone.holds && self.subadditive.holds
    }

    /// Monotone + additive.
    pub fn is_measure(&self) -> bool {
        self.monotone.holds && self.additive.holds
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_measure() {
            "measure"
        } else if self.is_submeasure() && self.submodular.holds {
            "submodular submeasure"
        } else if self.is_submeasure() {
            "submeasure"
        } else {
            "set function"
        }
    }
}

/// How classification scans the defining inequalities.
#[derive(Debug, Clone, Copy)]
pub enum CheckMode {
    /// Literal scan over all pairs; allowed for `n ≤ MAX_ATOMS_EXHAUSTIVE_PAIRS`.
    Exhaustive,
    /// Seeded random pairs. The seed is mandatory and recorded by callers.
    Sampled { seed: u64, samples: usize },
}

/// Decides each classification flag by scanning its defining inequality.
pub fn classify(phi: &SetFunc, mode: CheckMode) -> Result<PropertyReport> {
    let n = phi.algebra().atom_count();
    match mode {
        CheckMode::Exhaustive => {
            if n > MAX_ATOMS_EXHAUSTIVE_PAIRS {
                return Err(Error::CapacityExceeded {
                    what: "exhaustive classification".into(),
                    limit: MAX_ATOMS_EXHAUSTIVE_PAIRS,
                    requested: n,
                });
            }
            let size = phi.algebra().size() as u32;
            let pairs = (0..size).flat_map(|a| (0..size).map(move |b| (a, b)));
            Ok(classify_pairs(phi, pairs, false))
        }
        CheckMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let size = phi.algebra().size() as u32;
            let pairs: Vec<(u32, u32)> =
                (0..samples).map(|_| (rng.gen_range(0..size), rng.gen_range(0..size))).collect();
            Ok(classify_pairs(phi, pairs.into_iter(), true))
        }
    }
}

fn classify_pairs(
    phi: &SetFunc,
    pairs: impl Iterator<Item = (u32, u32)>,
    sampled: bool,
) -> PropertyReport {
    let values = phi.values();
    let v = |m: u32| &values[m as usize];
    let mk =
        |a: u32, b: u32, lhs: BigRational, rhs: BigRational, law: &'static str| Counterexample {
            a: Elem::from_mask(phi.algebra(), a).expect("in range"),
            b: Elem::from_mask(phi.algebra(), b).expect("in range"),
            lhs,
            rhs,
            law,
        };
    let mut monotone = None;
    let mut subadditive = None;
    let mut submodular = None;
    let mut additive = None;
    let mut strictly_positive = None;
    for (a, b) in pairs {
        if monotone.is_none() && a & !b == 0 && v(a) > v(b) {
            monotone = Some(mk(a, b, v(a).clone(), v(b).clone(), "monotone"));
        }
        if subadditive.is_none() && *v(a | b) > v(a) + v(b) {
            subadditive = Some(mk(a, b, v(a | b).clone(), v(a) + v(b), "subadditive"));
        }
        if submodular.is_none() && v(a | b) + v(a & b) > v(a) + v(b) {
            submodular = Some(mk(a, b, v(a | b) + v(a & b), v(a) + v(b), "submodular"));
        }
        if additive.is_none() && a & b == 0 && *v(a | b) != v(a) + v(b) {
            additive = Some(mk(a, b, v(a | b).clone(), v(a) + v(b), "additive"));
        }
        if strictly_positive.is_none() && a != 0 && v(a).is_zero() {
            strictly_positive = Some(mk(a, a, zero(), zero(), "strictly positive"));
        }
    }
    PropertyReport {
        monotone: PropCheck::from(monotone),
        subadditive: PropCheck::from(subadditive),
        submodular: PropCheck::from(submodular),
        additive: PropCheck::from(additive),
        strictly_positive: PropCheck::from(strictly_positive),
        sampled,
    }
}

fn require_monotone(phi: &SetFunc, op: &str) -> Result<()> {
    if let Some(cx) = phi.find_monotonicity_violation() {
        return Err(Error::precondition_with(
            format!("{op} needs a monotone function"),
            cx.to_string(),
        ));
    }
    Ok(())
}

/// Diffuseness at finite scale: the minimum over all partitions of unity of
/// the largest cell value.
///
/// For monotone `φ` the atom partition is optimal, so the value equals
/// `max_a φ({a})`. Up to the partition-enumeration cap this is recomputed
/// definitionally over every partition and the equality is asserted; above
/// the cap the atom formula alone is used.
pub fn diffuseness(phi: &SetFunc) -> Result<BigRational> {
    require_monotone(phi, "diffuseness")?;
    let atom_max = max_atom_value(phi);
    let n = phi.algebra().atom_count();
    if n <= MAX_ATOMS_PARTITION_ENUM {
        let values = phi.values();
        let min_max = enumerate_partitions(phi.algebra())?
            .into_iter()
            .map(|q| {
                q.cells()
                    .iter()
                    .map(|c| values[c.mask() as usize].clone())
                    .max()
                    .expect("partitions are nonempty")
            })
            .min()
            .expect("at least one partition exists");
        if min_max != atom_max {
            return Err(Error::VerificationFailed(format!(
                "diffuseness mismatch: partition scan gives {min_max}, atom maximum is {atom_max}"
            )));
        }
    }
    Ok(atom_max)
}

fn max_atom_value(phi: &SetFunc) -> BigRational {
    (0..phi.algebra().atom_count())
        .map(|i| phi.eval_mask(1 << i))
        .max()
        .expect("algebras have at least one atom")
}

/// The largest `r ≥ 0` such that `r·χ ≤ φ` for some two-valued homomorphism
/// `χ`. Computed from the defining quantifier: for the ultrafilter at atom
/// `a` the best `r` is `min{φ(A) : a ∈ A}`, and the result is the max over
/// atoms. For monotone `φ` this equals [`diffuseness`].
pub fn two_valued_domination(phi: &SetFunc) -> Result<BigRational> {
    require_monotone(phi, "two-valued domination")?;
    let values = phi.values();
    let size = phi.algebra().size() as u32;
    let mut best = zero();
    for atom in 0..phi.algebra().atom_count() {
        let bit = 1u32 << atom;
        let r = (0..size)
            .filter(|m| m & bit != 0)
            .map(|m| values[m as usize].clone())
            .min()
            .expect("the atom itself is counted");
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// The nondecreasing step function `δ ↦ sup{μ(θ(A)) : φ(A) ≤ δ}`.
#[derive(Debug, Clone)]
pub struct ContinuityModulus {
    /// `(δ, sup)` pairs at the attained values of `φ`, ascending in `δ`.
    pub steps: Vec<(BigRational, BigRational)>,
}

impl ContinuityModulus {
    /// The modulus at `δ`. Defined for `δ ≥ 0` (the step at `δ = 0` always
    /// exists because `φ(0) = 0`).
    pub fn value_at(&self, delta: &BigRational) -> BigRational {
        let mut out = zero();
        for (d, s) in &self.steps {
            if d <= delta {
                out = s.clone();
            } else {
                break;
            }
        }
        out
    }

    /// `θ` is φ-to-μ-continuous at tolerance `(ε, δ)` iff `modulus(δ) ≤ ε`.
    pub fn continuous_at(&self, eps: &BigRational, delta: &BigRational) -> bool {
        self.value_at(delta) <= *eps
    }
}

/// Computes the continuity modulus of `θ` from `φ` (on the source) to `μ`
/// (on the target) exactly, by scanning every source element. Capped at the
/// exhaustive-pair size.
pub fn continuity_modulus(
    theta: &VeeMonoidHom,
    phi: &SetFunc,
    mu: &SetFunc,
) -> Result<ContinuityModulus> {
    if phi.algebra() != theta.source() {
        return Err(Error::AlgebraMismatch {
            context: "modulus: φ must live on θ's source".into(),
        });
    }
    if mu.algebra() != theta.target() {
        return Err(Error::AlgebraMismatch {
            context: "modulus: μ must live on θ's target".into(),
        });
    }
    let n = theta.source().atom_count();
    if n > MAX_ATOMS_EXHAUSTIVE_PAIRS {
        return Err(Error::CapacityExceeded {
            what: "continuity modulus".into(),
            limit: MAX_ATOMS_EXHAUSTIVE_PAIRS,
            requested: n,
        });
    }
    let mut samples: Vec<(BigRational, BigRational)> = (0..theta.source().size() as u32)
        .map(|m| (phi.eval_mask(m), mu.eval_mask(theta.table()[m as usize])))
        .collect();
    samples.sort();
    let mut steps: Vec<(BigRational, BigRational)> = Vec::new();
    let mut running = zero();
    for (d, v) in samples {
        if v > running {
            running = v;
        }
        match steps.last_mut() {
            Some((last_d, last_v)) if *last_d == d => *last_v = running.clone(),
            _ => steps.push((d, running.clone())),
        }
    }
    Ok(ContinuityModulus { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{all_elements, quotient_by_ideal, Ideal};
    use crate::rational::{rat, rat_int};

    fn pqr() -> Arc<FiniteAlgebra> {
        FiniteAlgebra::new(vec!["p".into(), "q".into(), "r".into()]).unwrap()
    }

    /// The copoint covering function on 3 atoms: family `{X∖{i}}`, unit cost 1.
    fn copoints3() -> SetFunc {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let family = (0..3).map(|i| Elem::from_mask(&alg, 0b111 & !(1 << i)).unwrap()).collect();
        SetFunc::cover_count(&alg, family, one()).unwrap()
    }

    /// `φ(A) = min(|A|, 2)` on 3 atoms.
    fn min_card_2() -> SetFunc {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let values = (0..8u32).map(|m| rat_int(m.count_ones().min(2) as i64)).collect();
        SetFunc::from_table(&alg, values).unwrap()
    }

    /// Independent oracle: minimum cover by exhaustive subset enumeration.
    fn min_cover_brute(target: u32, sets: &[u32]) -> u64 {
        (0u32..1 << sets.len())
            .filter(|pick| {
                let mut u = 0u32;
                for (i, s) in sets.iter().enumerate() {
                    if pick & (1 << i) != 0 {
                        u |= s;
                    }
                }
                target & !u == 0
            })
            .map(|pick| pick.count_ones() as u64)
            .min()
            .expect("coverable")
    }

    #[test]
    fn copoints3_eval_whole_space() {
        let phi = copoints3();
        let top = Elem::one(phi.algebra());
        assert_eq!(phi.eval(&top).unwrap(), rat_int(2));
        // Cross-check every element against the brute-force oracle.
        let sets: Vec<u32> = vec![0b110, 0b101, 0b011];
        for m in 1..8u32 {
            assert_eq!(phi.eval_mask(m), rat_int(min_cover_brute(m, &sets) as i64), "mask {m}");
        }
    }

    #[test]
    fn atom_measure_eval() {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        assert_eq!(phi.eval_mask(0b011), rat(2, 3));
    }

    #[test]
    fn zero_maps_to_zero_for_every_repr() {
        let alg = pqr();
        let reprs = vec![
            SetFunc::from_table(&alg, (0..8).map(|i| rat_int(i.min(3))).collect()).unwrap(),
            SetFunc::cover_count(&alg, vec![Elem::one(&alg)], one()).unwrap(),
            SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap(),
            SetFunc::max_of(&alg, vec![vec![one(), zero(), zero()], vec![zero(), one(), one()]])
                .unwrap(),
            SetFunc::pullback(
                SetFunc::atom_measure(&alg, vec![one(), one(), one()]).unwrap(),
                VeeMonoidHom::identity(&alg),
            )
            .unwrap(),
        ];
        for phi in reprs {
            assert!(phi.eval_mask(0).is_zero());
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        let alg = pqr();
        let mut vals: Vec<BigRational> = vec![zero(); 8];
        vals[0] = one();
        assert!(SetFunc::from_table(&alg, vals).is_err()); // φ(0) ≠ 0
        let mut vals: Vec<BigRational> = vec![zero(); 8];
        vals[3] = -one();
        assert!(SetFunc::from_table(&alg, vals).is_err()); // negative
        assert!(SetFunc::cover_count(&alg, vec![], one()).is_err());
        let partial = vec![Elem::from_mask(&alg, 0b011).unwrap()];
        assert!(SetFunc::cover_count(&alg, partial, one()).is_err()); // join ≠ 1
        assert!(SetFunc::cover_count(&alg, vec![Elem::one(&alg)], zero()).is_err());
        assert!(SetFunc::atom_measure(&alg, vec![one()]).is_err());
    }

    #[test]
    fn materialization_agrees_with_direct_eval() {
        let alg = pqr();
        let (quot, theta) =
            quotient_by_ideal(&alg, &Ideal::generated_by_atoms(&alg, &[2]).unwrap()).unwrap();
        let outer = SetFunc::atom_measure(&quot, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let funcs = vec![
            copoints3(),
            min_card_2(),
            SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap(),
            SetFunc::max_of(&alg, vec![vec![one(), zero(), zero()], vec![zero(), one(), one()]])
                .unwrap(),
            SetFunc::pullback(outer, theta).unwrap(),
        ];
        for phi in funcs {
            let table = phi.materialize();
            for a in all_elements(phi.algebra()) {
                assert_eq!(phi.eval(&a).unwrap(), table.eval(&a).unwrap());
            }
        }
    }

    #[test]
    fn classify_min_card() {
        let report = classify(&min_card_2(), CheckMode::Exhaustive).unwrap();
        assert!(report.monotone.holds);
        assert!(report.subadditive.holds);
        assert!(report.submodular.holds);
        assert!(!report.additive.holds);
        let cx = report.additive.counterexample.unwrap();
        // The witness must re-evaluate to an actual violation.
        let phi = min_card_2();
        let a = cx.a.mask();
        let b = cx.b.mask();
        assert_eq!(a & b, 0);
        assert_ne!(phi.eval_mask(a | b), phi.eval_mask(a) + phi.eval_mask(b));
    }

    #[test]
    fn classify_atom_measure() {
        let alg = pqr();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), zero()]).unwrap();
        let report = classify(&phi, CheckMode::Exhaustive).unwrap();
        assert!(report.is_measure());
        assert!(report.subadditive.holds);
        assert!(report.submodular.holds);
        assert!(!report.strictly_positive.holds);
        assert_eq!(report.verdict(), "measure");
    }

    #[test]
    fn classify_copoints() {
        let report = classify(&copoints3(), CheckMode::Exhaustive).unwrap();
        assert!(report.monotone.holds);
        assert!(report.subadditive.holds);
        assert!(!report.submodular.holds);
        let cx = report.submodular.counterexample.unwrap();
        let phi = copoints3();
        let (a, b) = (cx.a.mask(), cx.b.mask());
        assert!(phi.eval_mask(a | b) + phi.eval_mask(a & b) > phi.eval_mask(a) + phi.eval_mask(b));
    }

    #[test]
    fn maxof_is_submeasure_but_not_additive() {
        let alg = pqr();
        let phi =
            SetFunc::max_of(&alg, vec![vec![one(), zero(), zero()], vec![zero(), one(), one()]])
                .unwrap();
        let report = classify(&phi, CheckMode::Exhaustive).unwrap();
        assert!(report.is_submeasure());
        assert!(!report.additive.holds);
    }

    #[test]
    fn diffuseness_examples() {
        assert_eq!(diffuseness(&min_card_2()).unwrap(), rat_int(1));
        let alg = pqr();
        assert_eq!(diffuseness(&SetFunc::zero_func(&alg)).unwrap(), zero());
        let w = SetFunc::atom_measure(&alg, vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        assert_eq!(diffuseness(&w).unwrap(), rat(1, 2));
    }

    #[test]
    fn diffuseness_refuses_non_monotone() {
        let alg = pqr();
        let mut vals: Vec<BigRational> = vec![zero(); 8];
        vals[1] = rat_int(2); // φ({0}) = 2 > φ({0,1}) = 1
        vals[3] = rat_int(1);
        vals[7] = rat_int(1);
        let phi = SetFunc::from_table(&alg, vals).unwrap();
        assert!(matches!(diffuseness(&phi), Err(Error::PreconditionFailed { .. })));
        assert!(matches!(two_valued_domination(&phi), Err(Error::PreconditionFailed { .. })));
    }

    #[test]
    fn two_valued_domination_examples() {
        assert_eq!(two_valued_domination(&min_card_2()).unwrap(), rat_int(1));
        assert_eq!(two_valued_domination(&copoints3()).unwrap(), rat_int(1));
        let alg = pqr();
        assert_eq!(two_valued_domination(&SetFunc::zero_func(&alg)).unwrap(), zero());
    }

    #[test]
    fn diffuseness_equals_two_valued_domination() {
        for phi in [copoints3(), min_card_2()] {
            assert_eq!(diffuseness(&phi).unwrap(), two_valued_domination(&phi).unwrap());
        }
    }

    #[test]
    fn pullback_examples() {
        let alg = pqr();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        // Identity pullback is extensionally φ.
        let id_pb = SetFunc::pullback(phi.clone(), VeeMonoidHom::identity(&alg)).unwrap();
        for a in all_elements(&alg) {
            assert_eq!(id_pb.eval(&a).unwrap(), phi.eval(&a).unwrap());
        }
        // Quotient projection killing r.
        let ideal = Ideal::generated_by_atoms(&alg, &[2]).unwrap();
        let (quot, theta) = quotient_by_ideal(&alg, &ideal).unwrap();
        let outer = SetFunc::atom_measure(&quot, vec![rat(1, 3), rat(1, 3)]).unwrap();
        let pb = SetFunc::pullback(outer, theta).unwrap();
        assert_eq!(pb.eval(&Elem::from_atom_names(&alg, &["r"]).unwrap()).unwrap(), zero());
        assert_eq!(pb.eval(&Elem::from_atom_names(&alg, &["p", "r"]).unwrap()).unwrap(), rat(1, 3));
        // Pullback of a submeasure along any join hom stays a submeasure;
        // of a submodular function stays submodular.
        let report = classify(&pb, CheckMode::Exhaustive).unwrap();
        assert!(report.is_submeasure());
        assert!(report.submodular.holds);
    }

    #[test]
    fn quotient_by_null_ideal_gives_strictly_positive_measure() {
        // Quotienting by the null ideal of a measure and re-weighting gives
        // a strictly positive measure whose pullback is the original.
        let alg = pqr();
        let mu = SetFunc::atom_measure(&alg, vec![rat(1, 2), zero(), rat(1, 2)]).unwrap();
        let null_atoms: Vec<usize> = (0..3).filter(|&i| mu.eval_mask(1 << i).is_zero()).collect();
        let ideal = Ideal::generated_by_atoms(&alg, &null_atoms).unwrap();
        let (quot, theta) = quotient_by_ideal(&alg, &ideal).unwrap();
        let surviving: Vec<BigRational> =
            (0..3).filter(|&i| !null_atoms.contains(&i)).map(|i| mu.eval_mask(1 << i)).collect();
        let mu_prime = SetFunc::atom_measure(&quot, surviving).unwrap();
        let report = classify(&mu_prime, CheckMode::Exhaustive).unwrap();
        assert!(report.is_measure() && report.strictly_positive.holds);
        let back = SetFunc::pullback(mu_prime, theta).unwrap();
        for a in all_elements(&alg) {
            assert_eq!(back.eval(&a).unwrap(), mu.eval(&a).unwrap());
        }
    }

    #[test]
    fn pullback_rejects_algebra_mismatch() {
        let alg = pqr();
        let other = FiniteAlgebra::numbered(2).unwrap();
        let outer = SetFunc::zero_func(&other);
        let theta = VeeMonoidHom::identity(&alg);
        assert!(SetFunc::pullback(outer, theta).is_err());
    }

    #[test]
    fn modulus_examples() {
        let alg = pqr();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        // Identity, μ = φ: modulus(δ) ≤ δ at attained values.
        let m = continuity_modulus(&VeeMonoidHom::identity(&alg), &phi, &phi).unwrap();
        for (d, s) in &m.steps {
            assert!(s <= d);
        }
        // Constant-zero hom: modulus ≡ 0.
        let theta0 = VeeMonoidHom::constant_zero(&alg, &alg);
        let m0 = continuity_modulus(&theta0, &phi, &phi).unwrap();
        assert!(m0.steps.iter().all(|(_, s)| s.is_zero()));
        // Quotient projection: modulus(1/3) = 1/2.
        let ideal = Ideal::generated_by_atoms(&alg, &[2]).unwrap();
        let (quot, theta) = quotient_by_ideal(&alg, &ideal).unwrap();
        let mu = SetFunc::atom_measure(&quot, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let m = continuity_modulus(&theta, &phi, &mu).unwrap();
        assert_eq!(m.value_at(&rat(1, 3)), rat(1, 2));
        assert!(m.continuous_at(&rat(1, 2), &rat(1, 3)));
        assert!(!m.continuous_at(&rat(1, 4), &rat(1, 3)));
    }

    #[test]
    fn covercount_always_monotone_subadditive() {
        // Every covering function must classify as a submeasure.
        let alg = FiniteAlgebra::numbered(4).unwrap();
        let fams: Vec<Vec<u32>> = vec![
            vec![0b1111],
            vec![0b0011, 0b1100],
            vec![0b0111, 0b1011, 0b1101, 0b1110],
            vec![0b0001, 0b0010, 0b0100, 0b1000, 0b0110],
        ];
        for fam in fams {
            let family: Vec<Elem> =
                fam.iter().map(|&m| Elem::from_mask(&alg, m).unwrap()).collect();
            let phi = SetFunc::cover_count(&alg, family, rat(1, 2)).unwrap();
            let report = classify(&phi, CheckMode::Exhaustive).unwrap();
            assert!(report.is_submeasure());
        }
    }

    #[test]
    fn sampled_classification_is_flagged() {
        let phi = min_card_2();
        let report = classify(&phi, CheckMode::Sampled { seed: 7, samples: 200 }).unwrap();
        assert!(report.sampled);
        assert!(report.monotone.holds);
    }
}
