//! The group of labeled partitions of unity and its calculus.
//!
//! A [`PUFunc`] assigns to finitely many group elements pairwise-disjoint
//! algebra elements joining to 1 (zero images are not stored). Under the
//! convolution product
//!
//! ```text
//!   (ab)(g) = ⋁_h a(gh⁻¹) ∧ b(h)
//! ```
//!
//! these form a group; a submeasure `φ` on the algebra induces the
//! bi-invariant pseudometric `d_φ(a,b) = φ(ab⁻¹[G∖{e}])` and the identity
//! neighborhoods `N_φ(U,ε) = {a : φ(a[G∖U]) ≤ ε}`.
//!
//! Infinite label groups (ℤ, ℚ) are handled through the finite supports:
//! every operation touches only the labels actually mapped, so there is no
//! truncation anywhere.

pub mod escape;
pub mod group;
pub mod postype;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use crate::algebra::{check_partition, Elem, FiniteAlgebra, PartitionOfUnity};
use crate::error::{Error, Result};
use crate::submeasure::SetFunc;

pub use escape::{folner_check, is_escape_function, one_over_n, trap, EscapeVerdict, FolnerReport};
pub use group::{
    symm_diff_elem, symm_diff_group, GElem, GroupKind, GroupOracle, LengthFn, Neighborhood,
};
pub use postype::{
    cx, cyclic_character, hermitian_psd, pos_type_check, pos_type_lift, CxRat, PosTypeFn,
};

/// A finitely supported map from group elements to pairwise-disjoint algebra
/// elements joining to 1. Labels with image 0 are omitted.
#[derive(Clone, PartialEq, Eq)]
pub struct PUFunc {
    algebra: Arc<FiniteAlgebra>,
    group: Arc<GroupOracle>,
    labels: BTreeMap<GElem, Elem>,
}

impl fmt::Debug for PUFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PUFunc({self})")
    }
}

impl fmt::Display for PUFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (g, img)) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}↦{}", self.group.format_elem(g), img)?;
        }
        write!(f, "}}")
    }
}

impl PUFunc {
    /// Builds from label/image pairs, dropping zero images and verifying the
    /// partition-of-unity invariants.
    pub fn new(
        algebra: &Arc<FiniteAlgebra>,
        group: &Arc<GroupOracle>,
        pairs: impl IntoIterator<Item = (GElem, Elem)>,
    ) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (g, img) in pairs {
            if !group.contains(&g) {
                return Err(Error::GroupMismatch {
                    context: format!("label {g} is not an element of the group"),
                });
            }
            if img.algebra() != algebra {
                return Err(Error::AlgebraMismatch {
                    context: format!("image of label {g} lives in a different algebra"),
                });
            }
            if img.is_zero() {
                continue;
            }
            if labels.insert(g.clone(), img).is_some() {
                return Err(Error::InvalidInput(format!("label {g} appears twice")));
            }
        }
        let cells: Vec<Elem> = labels.values().cloned().collect();
        if let Some(v) = check_partition(algebra, &cells) {
            return Err(Error::InvalidInput(format!("images are not a partition of unity: {v}")));
        }
        Ok(PUFunc { algebra: Arc::clone(algebra), group: Arc::clone(group), labels })
    }

    /// The neutral element: the constant function at the group identity.
    pub fn identity(algebra: &Arc<FiniteAlgebra>, group: &Arc<GroupOracle>) -> Self {
        let mut labels = BTreeMap::new();
        labels.insert(group.identity(), Elem::one(algebra));
        PUFunc { algebra: Arc::clone(algebra), group: Arc::clone(group), labels }
    }

    /// The embedding of a group element: `η(g) = {g ↦ 1}`.
    pub fn eta(algebra: &Arc<FiniteAlgebra>, group: &Arc<GroupOracle>, g: GElem) -> Result<Self> {
        if !group.contains(&g) {
            return Err(Error::GroupMismatch { context: format!("{g} is not a group element") });
        }
        let mut labels = BTreeMap::new();
        labels.insert(g, Elem::one(algebra));
        Ok(PUFunc { algebra: Arc::clone(algebra), group: Arc::clone(group), labels })
    }

    /// The injection of a labeled partition: `σ_𝒬(labels)(x)` is the join of
    /// the cells labeled `x`. `labels[i]` labels `partition.cells()[i]`.
    pub fn sigma(
        group: &Arc<GroupOracle>,
        partition: &PartitionOfUnity,
        labels: &[GElem],
    ) -> Result<Self> {
        if labels.len() != partition.cells().len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} cells",
                labels.len(),
                partition.cells().len()
            )));
        }
        let algebra = partition.algebra();
        let mut merged: BTreeMap<GElem, Elem> = BTreeMap::new();
        for (cell, g) in partition.cells().iter().zip(labels) {
            if !group.contains(g) {
                return Err(Error::GroupMismatch {
                    context: format!("label {g} is not a group element"),
                });
            }
            let entry = merged.entry(g.clone()).or_insert_with(|| Elem::zero(algebra));
            *entry = entry.join(cell)?;
        }
        PUFunc::new(algebra, group, merged)
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn group(&self) -> &Arc<GroupOracle> {
        &self.group
    }

    /// The image of a label (0 for labels outside the support).
    pub fn get(&self, g: &GElem) -> Elem {
        self.labels.get(g).cloned().unwrap_or_else(|| Elem::zero(&self.algebra))
    }

    /// The nonzero labels in canonical order.
    pub fn support(&self) -> impl Iterator<Item = &GElem> {
        self.labels.keys()
    }

    pub fn label_map(&self) -> &BTreeMap<GElem, Elem> {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.labels.len() == 1 && self.labels.contains_key(&self.group.identity())
    }

    fn check_compatible(&self, other: &PUFunc, op: &str) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch { context: op.into() });
        }
        if self.group != other.group {
            return Err(Error::GroupMismatch { context: op.into() });
        }
        Ok(())
    }

    /// Convolution product `(ab)(g) = ⋁_h a(gh⁻¹) ∧ b(h)`, computed over the
    /// finite supports.
    pub fn mul(&self, other: &PUFunc) -> Result<PUFunc> {
        self.check_compatible(other, "product of labeled partitions")?;
        let mut acc: BTreeMap<GElem, Elem> = BTreeMap::new();
        for (x, ax) in &self.labels {
            for (h, bh) in &other.labels {
                let meet = ax.meet(bh)?;
                if meet.is_zero() {
                    continue;
                }
                let g = self.group.mul(x, h)?;
                let entry = acc.entry(g).or_insert_with(|| Elem::zero(&self.algebra));
                *entry = entry.join(&meet)?;
            }
        }
        PUFunc::new(&self.algebra, &self.group, acc)
    }

    /// `a⁻¹(g) = a(g⁻¹)`.
    pub fn inverse(&self) -> Result<PUFunc> {
        let mut labels = BTreeMap::new();
        for (g, img) in &self.labels {
            labels.insert(self.group.inv(g)?, img.clone());
        }
        Ok(PUFunc { algebra: Arc::clone(&self.algebra), group: Arc::clone(&self.group), labels })
    }

    /// `aⁿ` for `n ≥ 0`.
    pub fn pow(&self, n: u64) -> Result<PUFunc> {
        let mut acc = PUFunc::identity(&self.algebra, &self.group);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The support map `a[T] = ⋁_{g∈T} a(g)` over an explicit label set.
    pub fn support_in(&self, t: &BTreeSet<GElem>) -> Elem {
        self.support_where(|g| t.contains(g))
    }

    /// `a[{g : pred(g)}]`; exact because only the finite support matters.
    pub fn support_where(&self, pred: impl Fn(&GElem) -> bool) -> Elem {
        let mut acc = Elem::zero(&self.algebra);
        for (g, img) in &self.labels {
            if pred(g) {
                acc = acc.join(img).expect("same algebra");
            }
        }
        acc
    }

    /// `a[G ∖ {e}]`, the support off the identity label.
    pub fn support_off_identity(&self) -> Elem {
        let e = self.group.identity();
        self.support_where(|g| *g != e)
    }

    /// `a[G ∖ U]` for an identity neighborhood `U` of the label group.
    pub fn support_outside(&self, u: &Neighborhood) -> Result<Elem> {
        let mut acc = Elem::zero(&self.algebra);
        for (g, img) in &self.labels {
            if !u.contains(&self.group, g)? {
                acc = acc.join(img)?;
            }
        }
        Ok(acc)
    }

    /// Relabeling along an arbitrary map of labels:
    /// `f_•(a)(h) = a[f⁻¹(h)]`. Always yields a valid labeled partition.
    pub fn relabel(
        &self,
        target: &Arc<GroupOracle>,
        f: impl Fn(&GElem) -> Result<GElem>,
    ) -> Result<PUFunc> {
        let mut acc: BTreeMap<GElem, Elem> = BTreeMap::new();
        for (g, img) in &self.labels {
            let h = f(g)?;
            if !target.contains(&h) {
                return Err(Error::GroupMismatch {
                    context: format!("relabeling sends {g} outside the target group"),
                });
            }
            let entry = acc.entry(h).or_insert_with(|| Elem::zero(&self.algebra));
            *entry = entry.join(img)?;
        }
        PUFunc::new(&self.algebra, target, acc)
    }

    /// Relabels by the group's length function, landing in additive ℚ.
    pub fn length_relabel(&self) -> Result<PUFunc> {
        let target = GroupOracle::rationals_additive();
        self.relabel(&target, |g| Ok(GElem::Rat(self.group.length(g)?)))
    }
}

/// The bi-invariant pseudometric `d_φ(a, b) = φ(ab⁻¹[G∖{e}])`.
pub fn d_phi(phi: &SetFunc, a: &PUFunc, b: &PUFunc) -> Result<BigRational> {
    if phi.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch { context: "pseudometric".into() });
    }
    let ab_inv = a.mul(&b.inverse()?)?;
    phi.eval(&ab_inv.support_off_identity())
}

/// The identity neighborhood `N_φ(U, ε)` of the group of labeled partitions.
#[derive(Debug, Clone)]
pub struct PuNeighborhood {
    pub label_nbhd: Neighborhood,
    pub epsilon: BigRational,
}

/// Membership in `N_φ(U, ε)`: `φ(a[G∖U]) ≤ ε`.
pub fn in_nbhd(phi: &SetFunc, a: &PUFunc, n: &PuNeighborhood) -> Result<bool> {
    if phi.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch { context: "neighborhood membership".into() });
    }
    Ok(phi.eval(&a.support_outside(&n.label_nbhd)?)? <= n.epsilon)
}

/// Membership in the supported subgroup `Γ(A) = {a : a[G∖{e}] ≤ A}`.
pub fn gamma_contains(a_elem: &Elem, a: &PUFunc) -> Result<bool> {
    if a_elem.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch { context: "supported-subgroup membership".into() });
    }
    a.support_off_identity().leq(a_elem)
}

/// Splits `c ∈ Γ(A ∨ B)` into `a ∈ Γ(A)`, `b ∈ Γ(B)` with `ab = c`:
///
/// ```text
///   a(e) = c(e) ∨ ¬A,  a(g) = c(g) ∧ A   (g ≠ e)
///   b(e) = c(e) ∨ A,   b(g) = c(g) ∧ ¬A  (g ≠ e)
/// ```
///
/// All three postconditions are replayed (the product by actual convolution).
pub fn gamma_decompose(c: &PUFunc, a_elem: &Elem, b_elem: &Elem) -> Result<(PUFunc, PUFunc)> {
    let algebra = c.algebra();
    if a_elem.algebra() != algebra || b_elem.algebra() != algebra {
        return Err(Error::AlgebraMismatch { context: "supported-subgroup decomposition".into() });
    }
    let bound = a_elem.join(b_elem)?;
    let e = c.group().identity();
    for (g, img) in c.label_map() {
        if *g != e && !img.leq(&bound)? {
            return Err(Error::precondition_with(
                "decomposition input must be supported in A ∨ B",
                format!("label {g} has image {img} ≰ {bound}"),
            ));
        }
    }
    let ce = c.get(&e);
    let mut a_pairs = vec![(e.clone(), ce.join(&a_elem.complement())?)];
    let mut b_pairs = vec![(e.clone(), ce.join(a_elem)?)];
    for (g, img) in c.label_map() {
        if *g == e {
            continue;
        }
        a_pairs.push((g.clone(), img.meet(a_elem)?));
        b_pairs.push((g.clone(), img.meet(&a_elem.complement())?));
    }
    let a = PUFunc::new(algebra, c.group(), a_pairs)?;
    let b = PUFunc::new(algebra, c.group(), b_pairs)?;
    if !gamma_contains(a_elem, &a)? {
        return Err(Error::VerificationFailed("left factor escapes Γ(A)".into()));
    }
    if !gamma_contains(b_elem, &b)? {
        return Err(Error::VerificationFailed("right factor escapes Γ(B)".into()));
    }
    if a.mul(&b)? != *c {
        return Err(Error::VerificationFailed("decomposition product differs from input".into()));
    }
    Ok((a, b))
}

/// A partial homomorphism `π: G → S(𝒜, H)` given by a finite table on the
/// labels actually used. Homomorphy is verified lazily on the products an
/// application demands, and verified pairs are memoized behind a lock so
/// concurrent callers observe one verdict.
pub struct PuHom {
    source_group: Arc<GroupOracle>,
    algebra: Arc<FiniteAlgebra>,
    target_group: Arc<GroupOracle>,
    map: BTreeMap<GElem, PUFunc>,
    verified: Mutex<BTreeSet<(GElem, GElem)>>,
}

impl Clone for PuHom {
    fn clone(&self) -> Self {
        PuHom {
            source_group: Arc::clone(&self.source_group),
            algebra: Arc::clone(&self.algebra),
            target_group: Arc::clone(&self.target_group),
            map: self.map.clone(),
            verified: Mutex::new(self.verified.lock().expect("lock").clone()),
        }
    }
}

impl PuHom {
    pub fn new(
        source_group: &Arc<GroupOracle>,
        algebra: &Arc<FiniteAlgebra>,
        target_group: &Arc<GroupOracle>,
        map: BTreeMap<GElem, PUFunc>,
    ) -> Result<Self> {
        for (g, value) in &map {
            if !source_group.contains(g) {
                return Err(Error::GroupMismatch {
                    context: format!("table key {g} is not a source-group element"),
                });
            }
            if value.algebra() != algebra || value.group() != target_group {
                return Err(Error::GroupMismatch {
                    context: format!("value at {g} lives over the wrong algebra or group"),
                });
            }
        }
        Ok(PuHom {
            source_group: Arc::clone(source_group),
            algebra: Arc::clone(algebra),
            target_group: Arc::clone(target_group),
            map,
            verified: Mutex::new(BTreeSet::new()),
        })
    }

    /// Builds the table by evaluating `f` on the given labels.
    pub fn from_fn(
        source_group: &Arc<GroupOracle>,
        algebra: &Arc<FiniteAlgebra>,
        target_group: &Arc<GroupOracle>,
        labels: impl IntoIterator<Item = GElem>,
        f: impl Fn(&GElem) -> Result<PUFunc>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for g in labels {
            let value = f(&g)?;
            map.insert(g, value);
        }
        Self::new(source_group, algebra, target_group, map)
    }

    pub fn get(&self, g: &GElem) -> Result<&PUFunc> {
        self.map
            .get(g)
            .ok_or_else(|| Error::InvalidInput(format!("homomorphism table has no entry for {g}")))
    }

    /// Checks `π(g)π(h) = π(gh)` for all pairs from `labels` whose product is
    /// tabulated. Pairs already verified are skipped.
    fn verify_products(&self, labels: &[&GElem]) -> Result<()> {
        let mut verified = self.verified.lock().expect("verification lock");
        for &g in labels {
            for &h in labels {
                let key = (g.clone(), h.clone());
                if verified.contains(&key) {
                    continue;
                }
                let gh = self.source_group.mul(g, h)?;
                if let (Some(pg), Some(ph), Some(pgh)) =
                    (self.map.get(g), self.map.get(h), self.map.get(&gh))
                {
                    if pg.mul(ph)? != *pgh {
                        return Err(Error::precondition_with(
                            "table is not homomorphic on the demanded products",
                            format!("π({g})·π({h}) ≠ π({})", self.source_group.format_elem(&gh)),
                        ));
                    }
                }
                verified.insert(key);
            }
        }
        Ok(())
    }

    /// The lifted homomorphism `π_#(a)(h) = ⋁_g a(g) ∧ π(g)(h)`.
    ///
    /// `π` must be defined on the support of `a`; homomorphy of the table is
    /// verified on the support's pairwise products before lifting.
    pub fn lift(&self, a: &PUFunc) -> Result<PUFunc> {
        if a.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch { context: "homomorphism lift".into() });
        }
        if a.group() != &self.source_group {
            return Err(Error::GroupMismatch { context: "homomorphism lift".into() });
        }
        let support: Vec<&GElem> = a.support().collect();
        self.verify_products(&support)?;
        let mut acc: BTreeMap<GElem, Elem> = BTreeMap::new();
        for (g, ag) in a.label_map() {
            let pg = self.get(g)?;
            for (h, ph) in pg.label_map() {
                let meet = ag.meet(ph)?;
                if meet.is_zero() {
                    continue;
                }
                let entry = acc.entry(h.clone()).or_insert_with(|| Elem::zero(&self.algebra));
                *entry = entry.join(&meet)?;
            }
        }
        PUFunc::new(&self.algebra, &self.target_group, acc)
    }
}

/// The partial order on ℚ-labeled partitions:
/// `a ≤ b :⟺ ∀r: a[[r,∞)] ≤ b[[r,∞)]`.
///
/// Both support functions are step functions changing only at the finitely
/// many labels present, so scanning those labels decides the quantifier.
pub fn pu_leq(a: &PUFunc, b: &PUFunc) -> Result<bool> {
    for x in [a, b] {
        if !matches!(x.group().kind(), GroupKind::RationalsAdd) {
            return Err(Error::GroupMismatch {
                context: "the label order is defined for ℚ-labeled partitions".into(),
            });
        }
    }
    if a.algebra() != b.algebra() {
        return Err(Error::AlgebraMismatch { context: "label order".into() });
    }
    let mut thresholds: BTreeSet<&GElem> = a.support().collect();
    thresholds.extend(b.support());
    for r in thresholds {
        let GElem::Rat(r) = r else { unreachable!("ℚ labels") };
        let upper_a = a.support_where(|g| matches!(g, GElem::Rat(x) if x >= r));
        let upper_b = b.support_where(|g| matches!(g, GElem::Rat(x) if x >= r));
        if !upper_a.leq(&upper_b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Addition of ℚ-labeled partitions (the convolution in additive ℚ).
pub fn pu_add(a: &PUFunc, b: &PUFunc) -> Result<PUFunc> {
    if !matches!(a.group().kind(), GroupKind::RationalsAdd) {
        return Err(Error::GroupMismatch { context: "addition needs ℚ labels".into() });
    }
    a.mul(b)
}

/// Splits `a` into one factor per atom cell, each supported in its cell:
///
/// ```text
///   a_Q(e) = a(e) ∨ ¬Q,   a_Q(g) = a(g) ∧ Q  (g ≠ e).
/// ```
///
/// Requires the atom partition to have all `φ`-values ≤ ε (else refuses,
/// naming the offending atom). Verifies that each factor lies in `Γ(Q)`,
/// that the cyclic subgroup it generates stays inside `N_φ(V,ε)` (iterating
/// powers up to the element order for finite label groups, where the walk is
/// guaranteed to close), and that the ordered product replays to `a`.
pub fn trap_decompose(
    phi: &SetFunc,
    a: &PUFunc,
    v: &Neighborhood,
    epsilon: &BigRational,
) -> Result<Vec<PUFunc>> {
    if phi.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch { context: "trap decomposition".into() });
    }
    let algebra = a.algebra();
    for i in 0..algebra.atom_count() {
        let value = phi.eval_mask(1 << i);
        if value > *epsilon {
            return Err(Error::precondition_with(
                "no qualifying partition: an atom exceeds ε",
                format!("atom {} has φ-value {}", algebra.atom_names()[i], value),
            ));
        }
    }
    let e = a.group().identity();
    let ae = a.get(&e);
    let mut factors = Vec::with_capacity(algebra.atom_count());
    for i in 0..algebra.atom_count() {
        let cell = Elem::atom(algebra, i)?;
        let mut pairs = vec![(e.clone(), ae.join(&cell.complement())?)];
        for (g, img) in a.label_map() {
            if *g == e {
                continue;
            }
            pairs.push((g.clone(), img.meet(&cell)?));
        }
        let factor = PUFunc::new(algebra, a.group(), pairs)?;
        if !gamma_contains(&cell, &factor)? {
            return Err(Error::VerificationFailed("factor escapes its cell subgroup".into()));
        }
        // Powers stay in Γ(cell), hence in N_φ(V, ε); replay explicitly on
        // finite label groups where the walk closes.
        if a.group().is_finite() {
            let nbhd = PuNeighborhood { label_nbhd: v.clone(), epsilon: epsilon.clone() };
            let mut power = factor.clone();
            loop {
                if !in_nbhd(phi, &power, &nbhd)? {
                    return Err(Error::VerificationFailed(
                        "a factor power leaves the target neighborhood".into(),
                    ));
                }
                if power.is_identity() {
                    break;
                }
                power = power.mul(&factor)?;
            }
        }
        factors.push(factor);
    }
    let mut product = PUFunc::identity(algebra, a.group());
    for f in &factors {
        product = product.mul(f)?;
    }
    if product != *a {
        return Err(Error::VerificationFailed("factor product differs from input".into()));
    }
    Ok(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn pq() -> Arc<FiniteAlgebra> {
        FiniteAlgebra::new(vec!["p".into(), "q".into()]).unwrap()
    }

    fn el(alg: &Arc<FiniteAlgebra>, names: &[&str]) -> Elem {
        Elem::from_atom_names(alg, names).unwrap()
    }

    fn half_measure(alg: &Arc<FiniteAlgebra>) -> SetFunc {
        SetFunc::atom_measure(alg, vec![rat(1, 2); alg.atom_count()]).unwrap()
    }

    #[test]
    fn identity_and_eta() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let e = PUFunc::identity(&alg, &z2);
        assert_eq!(e.get(&GElem::Idx(0)), Elem::one(&alg));
        assert!(e.is_identity());
        let a = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        assert_eq!(e.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&e).unwrap(), a);
        // support of the identity: 1 iff e ∈ T.
        let with_e: BTreeSet<GElem> = [GElem::Idx(0)].into();
        let without_e: BTreeSet<GElem> = [GElem::Idx(1)].into();
        assert!(e.support_in(&with_e).is_one());
        assert!(e.support_in(&without_e).is_zero());
    }

    #[test]
    fn construction_rejects_bad_labelings() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        // Overlapping images.
        assert!(PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(0), el(&alg, &["p"])), (GElem::Idx(1), el(&alg, &["p", "q"]))],
        )
        .is_err());
        // Join below one.
        assert!(PUFunc::new(&alg, &z2, [(GElem::Idx(0), el(&alg, &["p"]))]).is_err());
        // Label outside the group.
        assert!(PUFunc::new(&alg, &z2, [(GElem::Idx(5), Elem::one(&alg))]).is_err());
        // Zero images are dropped silently.
        let ok = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(0), Elem::one(&alg)), (GElem::Idx(1), Elem::zero(&alg))],
        )
        .unwrap();
        assert_eq!(ok.support().count(), 1);
    }

    #[test]
    fn convolution_hand_example() {
        // a = {1↦{p}, 0↦{q}}, b = {1↦{p,q}} over ℤ₂: ab = {0↦{p}, 1↦{q}}.
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let a = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        let b = PUFunc::new(&alg, &z2, [(GElem::Idx(1), Elem::one(&alg))]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.get(&GElem::Idx(0)), el(&alg, &["p"]));
        assert_eq!(ab.get(&GElem::Idx(1)), el(&alg, &["q"]));
    }

    #[test]
    fn inverse_example_and_group_law() {
        let alg = pq();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let a = PUFunc::new(
            &alg,
            &z4,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(3), el(&alg, &["q"]))],
        )
        .unwrap();
        let ai = a.inverse().unwrap();
        assert_eq!(ai.get(&GElem::Idx(3)), el(&alg, &["p"]));
        assert_eq!(ai.get(&GElem::Idx(1)), el(&alg, &["q"]));
        assert!(a.mul(&ai).unwrap().is_identity());
        assert!(ai.mul(&a).unwrap().is_identity());
        // a[G] = 1 always.
        assert!(a.support_where(|_| true).is_one());
    }

    #[test]
    fn support_is_boolean_hom() {
        let alg = pq();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let a = PUFunc::new(
            &alg,
            &z4,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(2), el(&alg, &["q"]))],
        )
        .unwrap();
        let s: BTreeSet<GElem> = [GElem::Idx(1), GElem::Idx(2)].into();
        let t: BTreeSet<GElem> = [GElem::Idx(2), GElem::Idx(3)].into();
        let meet: BTreeSet<GElem> = s.intersection(&t).cloned().collect();
        assert_eq!(a.support_in(&s).meet(&a.support_in(&t)).unwrap(), a.support_in(&meet));
        // a⁻¹[T] = a[T⁻¹].
        let t_inv: BTreeSet<GElem> = t.iter().map(|g| z4.inv(g).unwrap()).collect();
        assert_eq!(a.inverse().unwrap().support_in(&t), a.support_in(&t_inv));
    }

    #[test]
    fn dphi_examples() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let phi = half_measure(&alg); // φ(A) = |A|/2
        let a = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        let e = PUFunc::identity(&alg, &z2);
        assert_eq!(d_phi(&phi, &a, &e).unwrap(), rat(1, 2));
        assert_eq!(d_phi(&phi, &a, &a).unwrap(), rat_int(0));
        // Symmetry and bi-invariance on this instance.
        assert_eq!(d_phi(&phi, &e, &a).unwrap(), rat(1, 2));
        let c = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(0), el(&alg, &["p"])), (GElem::Idx(1), el(&alg, &["q"]))],
        )
        .unwrap();
        assert_eq!(
            d_phi(&phi, &a.mul(&c).unwrap(), &e.mul(&c).unwrap()).unwrap(),
            d_phi(&phi, &a, &e).unwrap()
        );
        assert_eq!(
            d_phi(&phi, &c.mul(&a).unwrap(), &c.mul(&e).unwrap()).unwrap(),
            d_phi(&phi, &a, &e).unwrap()
        );
    }

    #[test]
    fn eta_is_homomorphism_and_sigma_constant_case() {
        let alg = pq();
        let z4 = GroupOracle::cyclic(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let lhs = PUFunc::eta(&alg, &z4, GElem::Idx(i))
                    .unwrap()
                    .mul(&PUFunc::eta(&alg, &z4, GElem::Idx(j)).unwrap())
                    .unwrap();
                let rhs = PUFunc::eta(&alg, &z4, GElem::Idx((i + j) % 4)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // σ over the atom partition with constant labels equals η.
        let part = PartitionOfUnity::atoms(&alg);
        let labels = vec![GElem::Idx(3), GElem::Idx(3)];
        let sigma = PUFunc::sigma(&z4, &part, &labels).unwrap();
        assert_eq!(sigma, PUFunc::eta(&alg, &z4, GElem::Idx(3)).unwrap());
    }

    #[test]
    fn sigma_is_homomorphism_cellwise() {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let part = PartitionOfUnity::atoms(&alg);
        let u = vec![GElem::Idx(1), GElem::Idx(2), GElem::Idx(3)];
        let v = vec![GElem::Idx(3), GElem::Idx(3), GElem::Idx(2)];
        let uv: Vec<GElem> = u.iter().zip(&v).map(|(a, b)| z4.mul(a, b).unwrap()).collect();
        let lhs = PUFunc::sigma(&z4, &part, &u)
            .unwrap()
            .mul(&PUFunc::sigma(&z4, &part, &v).unwrap())
            .unwrap();
        let rhs = PUFunc::sigma(&z4, &part, &uv).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_decompose_example() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let a_elem = el(&alg, &["p"]);
        let b_elem = el(&alg, &["q"]);
        let c = PUFunc::new(&alg, &z2, [(GElem::Idx(1), Elem::one(&alg))]).unwrap();
        let (a, b) = gamma_decompose(&c, &a_elem, &b_elem).unwrap();
        assert_eq!(a.get(&GElem::Idx(1)), el(&alg, &["p"]));
        assert_eq!(a.get(&GElem::Idx(0)), el(&alg, &["q"]));
        assert_eq!(b.get(&GElem::Idx(1)), el(&alg, &["q"]));
        assert_eq!(b.get(&GElem::Idx(0)), el(&alg, &["p"]));
        assert_eq!(a.mul(&b).unwrap(), c);
        // Identity input decomposes into identities.
        let e = PUFunc::identity(&alg, &z2);
        let (ea, eb) = gamma_decompose(&e, &a_elem, &b_elem).unwrap();
        assert!(ea.is_identity() && eb.is_identity());
    }

    #[test]
    fn gamma_decompose_exhaustive_small() {
        // All c ∈ Γ(1) over (n=2, ℤ₂): 16 cases, all (A,B) with A∨B ⊇ supp.
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let elems: Vec<Elem> = crate::algebra::all_elements(&alg).collect();
        let mut all: Vec<PUFunc> = Vec::new();
        for m in &elems {
            all.push(
                PUFunc::new(
                    &alg,
                    &z2,
                    [(GElem::Idx(1), m.clone()), (GElem::Idx(0), m.complement())],
                )
                .unwrap(),
            );
        }
        for c in &all {
            for a_elem in &elems {
                for b_elem in &elems {
                    let supp = c.support_off_identity();
                    if !supp.leq(&a_elem.join(b_elem).unwrap()).unwrap() {
                        assert!(gamma_decompose(c, a_elem, b_elem).is_err());
                        continue;
                    }
                    let (a, b) = gamma_decompose(c, a_elem, b_elem).unwrap();
                    assert!(gamma_contains(a_elem, &a).unwrap());
                    assert!(gamma_contains(b_elem, &b).unwrap());
                    assert_eq!(a.mul(&b).unwrap(), *c);
                }
            }
        }
    }

    #[test]
    fn pi_sharp_unit_and_mod2() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let z = GroupOracle::integers();
        // π = η ∘ ident on ℤ₂: lift is the identity map.
        let labels: Vec<GElem> = vec![GElem::Idx(0), GElem::Idx(1)];
        let pi =
            PuHom::from_fn(&z2, &alg, &z2, labels, |g| PUFunc::eta(&alg, &z2, g.clone())).unwrap();
        let a = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        assert_eq!(pi.lift(&a).unwrap(), a);
        // π(k) = η(k mod 2) out of ℤ: labels reduce mod 2.
        let window: Vec<GElem> = (-4..=4).map(GElem::Int).collect();
        let pi2 = PuHom::from_fn(&z, &alg, &z2, window, |g| {
            let GElem::Int(k) = g else { unreachable!() };
            PUFunc::eta(&alg, &z2, GElem::Idx((k.rem_euclid(2)) as usize))
        })
        .unwrap();
        let b = PUFunc::new(
            &alg,
            &z,
            [(GElem::Int(3), el(&alg, &["p"])), (GElem::Int(-2), el(&alg, &["q"]))],
        )
        .unwrap();
        let lifted = pi2.lift(&b).unwrap();
        assert_eq!(lifted.get(&GElem::Idx(1)), el(&alg, &["p"]));
        assert_eq!(lifted.get(&GElem::Idx(0)), el(&alg, &["q"]));
        // π = π_# ∘ η on tabulated labels.
        let g = GElem::Int(2);
        let eta_g = PUFunc::eta(&alg, &z, g.clone()).unwrap();
        assert_eq!(pi2.lift(&eta_g).unwrap(), *pi2.get(&g).unwrap());
    }

    #[test]
    fn pi_sharp_rejects_non_homomorphic_tables() {
        // π(0) must be idempotent since 0 + 0 = 0 in ℤ₂; map it to a
        // non-identity element and the table fails homomorphy on (0, 0).
        let alg = pq();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let swap = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        let mut map = BTreeMap::new();
        map.insert(GElem::Idx(0), swap.clone());
        map.insert(GElem::Idx(1), PUFunc::identity(&alg, &z2));
        let pi = PuHom::new(&z2, &alg, &z2, map).unwrap();
        assert!(matches!(pi.lift(&swap), Err(Error::PreconditionFailed { .. })));
    }

    #[test]
    fn relabel_examples() {
        let alg = pq();
        let z2 = GroupOracle::cyclic(2)
            .unwrap()
            .with_length(LengthFn::Table(vec![rat_int(0), rat_int(1)]))
            .unwrap();
        let a = PUFunc::new(
            &alg,
            &z2,
            [(GElem::Idx(1), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        // Length relabeling into ℚ keeps the same shape here.
        let la = a.length_relabel().unwrap();
        assert_eq!(la.get(&GElem::Rat(rat_int(1))), el(&alg, &["p"]));
        assert_eq!(la.get(&GElem::Rat(rat_int(0))), el(&alg, &["q"]));
        // Constant map collapses to the identity.
        let q = GroupOracle::rationals_additive();
        let collapsed = a.relabel(&q, |_| Ok(GElem::Rat(rat_int(0)))).unwrap();
        assert!(collapsed.is_identity());
        // f_•(a⁻¹) = f_•(a) for length relabelings.
        assert_eq!(a.inverse().unwrap().length_relabel().unwrap(), la);
    }

    #[test]
    fn label_order_and_addition() {
        let alg = pq();
        let q = GroupOracle::rationals_additive();
        let a = PUFunc::new(
            &alg,
            &q,
            [
                (GElem::Rat(rat_int(1)), el(&alg, &["p"])),
                (GElem::Rat(rat_int(0)), el(&alg, &["q"])),
            ],
        )
        .unwrap();
        let b = PUFunc::new(
            &alg,
            &q,
            [(GElem::Rat(rat_int(2)), el(&alg, &["p"])), (GElem::Rat(rat(1, 2)), el(&alg, &["q"]))],
        )
        .unwrap();
        assert!(pu_leq(&a, &a).unwrap());
        assert!(pu_leq(&a, &b).unwrap());
        assert!(!pu_leq(&b, &a).unwrap());
        // 0-labeled identity is below any nonnegative labeling.
        let zero = PUFunc::identity(&alg, &q);
        assert!(pu_leq(&zero, &a).unwrap());
        // Addition: labels add cellwise.
        let sum = pu_add(&a, &b).unwrap();
        assert_eq!(sum.get(&GElem::Rat(rat_int(3))), el(&alg, &["p"]));
        assert_eq!(sum.get(&GElem::Rat(rat(1, 2))), el(&alg, &["q"]));
        // Wrong label group rejected.
        let z2 = GroupOracle::cyclic(2).unwrap();
        let c = PUFunc::identity(&alg, &z2);
        assert!(pu_leq(&c, &c).is_err());
    }

    #[test]
    fn gamma_endpoints() {
        // Γ(0) contains only the identity; Γ(1) contains everything.
        let alg = pq();
        let z4 = GroupOracle::cyclic(4).unwrap();
        let zero = Elem::zero(&alg);
        let top = Elem::one(&alg);
        let e = PUFunc::identity(&alg, &z4);
        assert!(gamma_contains(&zero, &e).unwrap());
        let a = PUFunc::new(
            &alg,
            &z4,
            [(GElem::Idx(3), el(&alg, &["p"])), (GElem::Idx(0), el(&alg, &["q"]))],
        )
        .unwrap();
        assert!(!gamma_contains(&zero, &a).unwrap());
        assert!(gamma_contains(&top, &a).unwrap());
        assert!(gamma_contains(&top, &e).unwrap());
    }

    #[test]
    fn trap_decompose_example() {
        let alg = FiniteAlgebra::numbered(3).unwrap();
        let z2 = GroupOracle::cyclic(2).unwrap();
        let phi = SetFunc::atom_measure(&alg, vec![rat(1, 3); 3]).unwrap();
        let a = PUFunc::new(&alg, &z2, [(GElem::Idx(1), Elem::one(&alg))]).unwrap();
        let v = Neighborhood::finite(&z2, [GElem::Idx(0)]).unwrap();
        let eps = rat(1, 3);
        let factors = trap_decompose(&phi, &a, &v, &eps).unwrap();
        assert_eq!(factors.len(), 3);
        let mut prod = PUFunc::identity(&alg, &z2);
        for f in &factors {
            prod = prod.mul(f).unwrap();
        }
        assert_eq!(prod, a);
        // Identity input gives identity factors.
        let e = PUFunc::identity(&alg, &z2);
        for f in trap_decompose(&phi, &e, &v, &eps).unwrap() {
            assert!(f.is_identity());
        }
        // ε below the atom level refuses with the offending atom named.
        let err = trap_decompose(&phi, &a, &v, &rat(1, 4));
        assert!(matches!(err, Err(Error::PreconditionFailed { .. })));
    }

    #[test]
    fn in_nbhd_through_finite_support() {
        let alg = pq();
        let z = GroupOracle::integers();
        let phi = half_measure(&alg);
        let a = PUFunc::new(
            &alg,
            &z,
            [(GElem::Int(7), el(&alg, &["p"])), (GElem::Int(0), el(&alg, &["q"]))],
        )
        .unwrap();
        let near = PuNeighborhood {
            label_nbhd: Neighborhood::ball(&z, rat_int(10)).unwrap(),
            epsilon: rat_int(0),
        };
        assert!(in_nbhd(&phi, &a, &near).unwrap());
        let far = PuNeighborhood {
            label_nbhd: Neighborhood::ball(&z, rat_int(3)).unwrap(),
            epsilon: rat(1, 4),
        };
        assert!(!in_nbhd(&phi, &a, &far).unwrap());
    }
}
